//! Single space-time point evaluations.

use std::fmt::Write as _;
use std::str::FromStr;

use spinarrival_core::{
    current_numeric, CurrentSample, CurrentSource, FiniteDifferenceError, Packet, PolarCurrent, SpaceTimePoint,
    SpinVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed forms, or the polar construction for a tilted spin.
    Closed,
    /// Central differences of the wavefunction.
    Numeric,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "closed" => Ok(Method::Closed),
            "numeric" => Ok(Method::Numeric),
            _ => Err(format!("unrecognised method `{s}`")),
        }
    }
}

pub fn evaluate(
    packet: &Packet,
    pt: SpaceTimePoint,
    spin: SpinVector,
    method: Method,
    step: Option<f64>,
) -> Result<CurrentSample, FiniteDifferenceError> {
    match method {
        Method::Closed if spin == SpinVector::UP_Z => Ok(packet.current(pt)),
        Method::Closed => Ok(PolarCurrent { source: *packet, spin }.current(pt)),
        Method::Numeric => {
            let h = step.unwrap_or_else(|| spinarrival_core::default_step(pt.position().max_abs()));
            current_numeric(packet, spin, pt, h)
        }
    }
}

/// `rho` on one line, then `j_i`, `j_s` and `j` with three components each.
pub fn render(sample: &CurrentSample) -> String {
    let mut out = String::new();
    // adding zero turns -0 into +0
    writeln!(out, "rho {:.15e}", sample.rho + 0.0).unwrap();
    for (name, v) in [("j_i", sample.j_i), ("j_s", sample.j_s), ("j", sample.j)] {
        writeln!(out, "{name} {:.15e} {:.15e} {:.15e}", v.x + 0.0, v.y + 0.0, v.z + 0.0).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use spinarrival_core::{AsymmetricPacket, SymmetricPacket, Vec3};

    #[test]
    fn spin_current_vanishes_on_the_moving_center() {
        let p: Packet = SymmetricPacket::new(0.2, 1.5).unwrap().into();
        let s = evaluate(&p, SpaceTimePoint::new(0.75, 0.0, 0.0, 0.5), SpinVector::UP_Z, Method::Closed, None).unwrap();
        assert_eq!(s.j_s, Vec3::ZERO);
        assert!(render(&s).contains("j_s 0.000000000000000e0 0.000000000000000e0 0.000000000000000e0"));
    }

    #[test]
    fn matched_asymmetric_packet_prints_the_same_values() {
        let pt = SpaceTimePoint::new(1.0, 1.0, 1.0, 1.0);
        let s: Packet = SymmetricPacket::new(0.01, 1.0).unwrap().into();
        let a: Packet = AsymmetricPacket::matching_symmetric(0.01, 1.0).unwrap().into();
        let rs = evaluate(&s, pt, SpinVector::UP_Z, Method::Closed, None).unwrap();
        let ra = evaluate(&a, pt, SpinVector::UP_Z, Method::Closed, None).unwrap();
        let short = |x: &CurrentSample| {
            [x.rho, x.j.x, x.j.y, x.j.z]
                .iter()
                .map(|v| format!("{v:.9e}"))
                .collect::<Vec<_>>()
        };
        assert_eq!(short(&rs), short(&ra));
    }

    #[test]
    fn numeric_method_agrees_with_closed_form() {
        let p: Packet = SymmetricPacket::new(0.3, 1.0).unwrap().into();
        let pt = SpaceTimePoint::new(0.4, 0.2, 0.1, 0.5);
        let c = evaluate(&p, pt, SpinVector::UP_Z, Method::Closed, None).unwrap();
        let n = evaluate(&p, pt, SpinVector::UP_Z, Method::Numeric, None).unwrap();
        assert!((c.j - n.j).max_abs() < 1e-6 * c.j.max_abs());
    }
}
