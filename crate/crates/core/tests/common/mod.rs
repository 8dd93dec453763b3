#![allow(dead_code)]

use loadability_core::component::Component;
use loadability_core::components::*;
use loadability_core::units::OMEGA_60HZ;
use loadability_core::{CompositeSystem, Topology};

pub fn machine_params() -> MachineParams {
    MachineParams {
        j: 7.0,
        kd: 0.0,
        ra: 0.003,
        xl: 0.15,
        xd: 1.81,
        xd1: 0.30,
        xd2: 0.23,
        xq: 1.76,
        xq2: 0.25,
        td01: 8.0,
        td02: 0.03,
        tq02: 0.07,
        droop: 0.05,
        tg: 0.5,
        ka: 200.0,
        ta: 0.02,
        pref: 0.0,
        vref: 1.0,
    }
}

pub fn line(x: f64) -> PiLineParams {
    PiLineParams {
        r: x / 10.0,
        x,
        b: 0.1,
    }
}

/// Generator, line, load and optionally a controlled source on the load bus.
pub fn radial(
    m: MachineParams,
    l: PiLineParams,
    load: RlLoadParams,
    source: Option<PqSourceParams>,
) -> CompositeSystem {
    let mut comps: Vec<Box<dyn Component>> = vec![
        Box::new(Machine::new(m, OMEGA_60HZ).unwrap()),
        Box::new(PiLine::new(l)),
        Box::new(RlLoad::new(load)),
    ];
    let mut names = vec!["g1".to_string(), "tl1".into(), "l1".into()];
    let mut t = Topology::with_buses(["gen", "load"]);
    t.attach(&[0]).attach(&[0, 1]).attach(&[1]);
    if let Some(s) = source {
        comps.push(Box::new(PqSource::new(s)));
        names.push("g2".into());
        t.attach(&[1]);
    }
    CompositeSystem::assemble(comps, names, t, OMEGA_60HZ).unwrap()
}

pub fn fig1(line_x: f64, load_r: f64) -> CompositeSystem {
    radial(
        machine_params(),
        line(line_x),
        RlLoadParams { r: load_r, x: 0.1 },
        None,
    )
}

pub fn two_machine(j: f64) -> CompositeSystem {
    let m = MachineParams {
        j,
        ..machine_params()
    };
    let comps: Vec<Box<dyn Component>> = vec![
        Box::new(Machine::new(m, OMEGA_60HZ).unwrap()),
        Box::new(PiLine::new(line(0.1))),
        Box::new(Machine::new(m, OMEGA_60HZ).unwrap()),
    ];
    let mut t = Topology::with_buses(["a", "b"]);
    t.attach(&[0]).attach(&[0, 1]).attach(&[1]);
    CompositeSystem::assemble(
        comps,
        vec!["g1".into(), "tl1".into(), "g2".into()],
        t,
        OMEGA_60HZ,
    )
    .unwrap()
}
