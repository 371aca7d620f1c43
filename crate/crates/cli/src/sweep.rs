//! Velocity sweeps of the mean arrival times.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use spinarrival_core::{arrival_summary, ArrivalError, ComponentSelector};

use crate::config::{SpecError, SweepSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Degenerate,
    NonConvergent,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "OK",
            Status::Degenerate => "DEGENERATE",
            Status::NonConvergent => "NONCONVERGENT",
        })
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "OK" => Ok(Status::Ok),
            "DEGENERATE" => Ok(Status::Degenerate),
            "NONCONVERGENT" => Ok(Status::NonConvergent),
            _ => Err(format!("unknown status `{s}`")),
        }
    }
}

/// One sweep velocity. Numeric fields are `None` for unselected components
/// and for every component of a row that is not `Ok`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub u: f64,
    pub tau: Option<f64>,
    pub tau_i: Option<f64>,
    pub tau_s: Option<f64>,
    pub norm: Option<f64>,
    pub norm_i: Option<f64>,
    pub norm_s: Option<f64>,
    pub t_max_used: Option<f64>,
    pub status: Status,
}

impl SweepRow {
    fn failed(u: f64, status: Status) -> Self {
        SweepRow {
            u,
            tau: None,
            tau_i: None,
            tau_s: None,
            norm: None,
            norm_i: None,
            norm_s: None,
            t_max_used: None,
            status,
        }
    }

    pub fn tau_for(&self, sel: ComponentSelector) -> Option<f64> {
        match sel {
            ComponentSelector::Total => self.tau,
            ComponentSelector::SpinIndependent => self.tau_i,
            ComponentSelector::SpinOnly => self.tau_s,
        }
    }

    pub fn norm_for(&self, sel: ComponentSelector) -> Option<f64> {
        match sel {
            ComponentSelector::Total => self.norm,
            ComponentSelector::SpinIndependent => self.norm_i,
            ComponentSelector::SpinOnly => self.norm_s,
        }
    }
}

fn status_of(err: &ArrivalError) -> Status {
    match err {
        ArrivalError::DegenerateDistribution { .. } => Status::Degenerate,
        _ => Status::NonConvergent,
    }
}

/// Evaluates a single velocity of a validated spec.
pub fn sweep_row(spec: &SweepSpec, u: f64) -> SweepRow {
    let (Ok(packet), Ok(detector)) = (spec.packet(u), spec.detector()) else {
        return SweepRow::failed(u, Status::NonConvergent);
    };
    let summary = match arrival_summary(&packet, &detector, &spec.quadrature) {
        Ok(s) => s,
        Err(e) => return SweepRow::failed(u, status_of(&e)),
    };
    let mut row = SweepRow::failed(u, Status::Ok);
    for sel in spec.selectors.iter() {
        match summary.get(sel) {
            Ok(m) => {
                let (tau, norm) = match sel {
                    ComponentSelector::Total => (&mut row.tau, &mut row.norm),
                    ComponentSelector::SpinIndependent => (&mut row.tau_i, &mut row.norm_i),
                    ComponentSelector::SpinOnly => (&mut row.tau_s, &mut row.norm_s),
                };
                *tau = Some(m.tau);
                *norm = Some(m.norm);
                row.t_max_used.get_or_insert(m.t_max_used());
            }
            Err(e) => {
                let s = status_of(e);
                if row.status != Status::NonConvergent {
                    row.status = s;
                }
            }
        }
    }
    if row.status == Status::Ok {
        row
    } else {
        SweepRow::failed(u, row.status)
    }
}

/// All rows of a sweep, computed in parallel and returned in velocity order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SpecError> {
    spec.validate()?;
    Ok(spec.velocities().par_iter().map(|&u| sweep_row(spec, u)).collect())
}
