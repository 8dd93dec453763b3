//! Scheduled changes to component drives.

use alloc::vec::Vec;

use crate::component::Drive;
use crate::network::CompositeSystem;
use crate::{Error, Result};

/// What an event does to its target component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// Start a controlled source tracking its setpoints.
    EnableSource,
    /// Scale the exciter voltage reference by `1 + magnitude`.
    ExciterRefStep,
    /// Scale the load resistance by `1 + magnitude`.
    LoadStep,
    /// Set the power-reference adjustment of a machine to `magnitude`.
    Redispatch,
}

/// A drive change on one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    /// Start time, s.
    pub time: f64,
    /// Target component index.
    pub component: usize,
    /// Kind.
    pub kind: EventKind,
    /// Relative size, or the new value for a redispatch; ignored for source
    /// enabling.
    pub magnitude: f64,
    /// How long the change lasts; `None` is permanent.
    pub duration: Option<f64>,
}

impl Event {
    /// The pinned stability probe: a 1 % exciter reference step held for 100 ms.
    pub fn exciter_probe(time: f64, component: usize, magnitude: f64) -> Self {
        Self {
            time,
            component,
            kind: EventKind::ExciterRefStep,
            magnitude,
            duration: Some(0.1),
        }
    }

    fn active(&self, t: f64) -> bool {
        t >= self.time && self.duration.is_none_or(|d| t < self.time + d)
    }

    fn end(&self) -> Option<f64> {
        self.duration.map(|d| self.time + d)
    }
}

/// Events plus the drives they modify.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    base: Vec<Drive>,
    events: Vec<Event>,
}

impl Schedule {
    /// Build a schedule. Sources with a positive enable time start disabled
    /// and get an enabling event.
    pub fn new(
        sys: &CompositeSystem,
        base: Vec<Drive>,
        mut events: Vec<Event>,
        t_end: f64,
    ) -> Result<Self> {
        let n = sys.components().len();
        if base.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: base.len(),
            });
        }
        let mut base = base;
        for (c, comp) in sys.components().iter().enumerate() {
            if let Some(te) = comp.enable_time() {
                if te > 0.0 {
                    base[c].enabled = false;
                    events.push(Event {
                        time: te,
                        component: c,
                        kind: EventKind::EnableSource,
                        magnitude: 0.0,
                        duration: None,
                    });
                }
            }
        }
        for ev in &events {
            if ev.component >= n {
                return Err(Error::Invalid(alloc::format!(
                    "event targets missing component {}",
                    ev.component
                )));
            }
            if !(ev.time >= 0.0 && ev.time <= t_end) {
                return Err(Error::Invalid(alloc::format!(
                    "event time {} outside [0, {t_end}]",
                    ev.time
                )));
            }
            if ev.duration.is_some_and(|d| !(d > 0.0)) {
                return Err(Error::Invalid("event duration must be positive".into()));
            }
        }
        events.sort_by(|a, b| a.time.total_cmp(&b.time));
        Ok(Self { base, events })
    }

    /// Drives before any event.
    pub fn base(&self) -> &[Drive] {
        &self.base
    }

    /// Events in time order.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Drives in effect on `[t, next breakpoint)`.
    pub fn drives_at(&self, t: f64) -> Vec<Drive> {
        let mut d = self.base.clone();
        for ev in self.events.iter().filter(|e| e.active(t)) {
            let slot = &mut d[ev.component];
            match ev.kind {
                EventKind::EnableSource => slot.enabled = true,
                EventKind::ExciterRefStep => slot.vref_scale *= 1.0 + ev.magnitude,
                EventKind::LoadStep => slot.r_scale *= 1.0 + ev.magnitude,
                EventKind::Redispatch => slot.power_adjust = ev.magnitude,
            }
        }
        d
    }

    /// Sorted distinct times in `(t0, t1)` where drives change.
    pub fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .events
            .iter()
            .flat_map(|e| [Some(e.time), e.end()])
            .flatten()
            .filter(|&t| t > t0 && t < t1)
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}
