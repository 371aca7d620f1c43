//! Mean arrival times at a point detector.
//!
//! The arrival density is the Euclidean norm of the chosen current component
//! at the detector, `Π(t) = |J(X, t)|`, and the mean arrival time is its first
//! moment `τ = ∫₀^∞ t Π dt / ∫₀^∞ Π dt`. Using `J`, `J_i` or `J_s` gives the
//! total time `τ`, the spin-ignored time `τ_i` or the spin-only time `τ_s`.

use thiserror::Error;

use crate::currents::{CurrentSample, CurrentSource};
use crate::packets::SpaceTimePoint;
use crate::quadrature::{integrate_semi_infinite_many, IntegralResult, QuadratureConfig, QuadratureError};
use crate::vec3::Vec3;

/// Norms below this are treated as "the particle never reaches the detector".
pub const DEGENERATE_NORM_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ArrivalError {
    #[error("arrival times are defined for t >= 0, got t = {0}")]
    NegativeTime(f64),
    #[error("arrival distribution is degenerate at this detector (norm {norm:e})")]
    DegenerateDistribution { norm: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A point detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detector {
    position: Vec3,
}

impl Detector {
    /// `None` unless every coordinate is finite.
    pub fn new(position: Vec3) -> Option<Self> {
        position.is_finite().then_some(Detector { position })
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentSelector {
    /// `J = J_i + J_s`, giving `τ`.
    Total,
    /// `J_i`, giving `τ_i`.
    SpinIndependent,
    /// `J_s`, giving `τ_s`.
    SpinOnly,
}

impl ComponentSelector {
    pub const ALL: [ComponentSelector; 3] = [
        ComponentSelector::Total,
        ComponentSelector::SpinIndependent,
        ComponentSelector::SpinOnly,
    ];

    pub fn pick(self, sample: &CurrentSample) -> Vec3 {
        match self {
            ComponentSelector::Total => sample.j,
            ComponentSelector::SpinIndependent => sample.j_i,
            ComponentSelector::SpinOnly => sample.j_s,
        }
    }
}

/// `|J_sel(X, t)|`.
pub fn arrival_density<S: CurrentSource + ?Sized>(
    source: &S,
    detector: &Detector,
    t: f64,
    selector: ComponentSelector,
) -> Result<f64, ArrivalError> {
    if !(t >= 0.0) {
        return Err(ArrivalError::NegativeTime(t));
    }
    Ok(density_at(source, detector, t, selector))
}

fn density_at<S: CurrentSource + ?Sized>(
    source: &S,
    detector: &Detector,
    t: f64,
    selector: ComponentSelector,
) -> f64 {
    selector
        .pick(&source.current(SpaceTimePoint::at(detector.position, t)))
        .norm()
}

/// First moment of one arrival density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanArrival {
    pub tau: f64,
    /// `∫ Π dt`
    pub norm: f64,
    pub denominator: IntegralResult,
    /// `∫ t Π dt`
    pub numerator: IntegralResult,
}

impl MeanArrival {
    fn from_integrals(numerator: IntegralResult, denominator: IntegralResult) -> Result<Self, ArrivalError> {
        let norm = denominator.value;
        if !(norm > DEGENERATE_NORM_FLOOR) {
            return Err(ArrivalError::DegenerateDistribution { norm });
        }
        Ok(MeanArrival {
            tau: numerator.value / norm,
            norm,
            denominator,
            numerator,
        })
    }

    pub fn t_max_used(&self) -> f64 {
        self.denominator.t_max_used
    }
}

/// Mean arrival time for one component.
pub fn mean_arrival<S: CurrentSource + ?Sized>(
    source: &S,
    detector: &Detector,
    selector: ComponentSelector,
    cfg: &QuadratureConfig,
) -> Result<MeanArrival, ArrivalError> {
    let [den, num] = integrate_semi_infinite_many(
        |t| {
            let p = density_at(source, detector, t, selector);
            [p, t * p]
        },
        cfg,
    )?;
    MeanArrival::from_integrals(num, den)
}

/// `τ`, `τ_i` and `τ_s` from one shared set of time samples.
///
/// A degenerate component does not spoil the others.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalSummary {
    pub total: Result<MeanArrival, ArrivalError>,
    pub spin_independent: Result<MeanArrival, ArrivalError>,
    pub spin_only: Result<MeanArrival, ArrivalError>,
}

impl ArrivalSummary {
    pub fn get(&self, selector: ComponentSelector) -> &Result<MeanArrival, ArrivalError> {
        match selector {
            ComponentSelector::Total => &self.total,
            ComponentSelector::SpinIndependent => &self.spin_independent,
            ComponentSelector::SpinOnly => &self.spin_only,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        self.total.as_ref().ok().map(|m| m.tau)
    }

    pub fn tau_i(&self) -> Option<f64> {
        self.spin_independent.as_ref().ok().map(|m| m.tau)
    }

    pub fn tau_s(&self) -> Option<f64> {
        self.spin_only.as_ref().ok().map(|m| m.tau)
    }
}

pub fn arrival_summary<S: CurrentSource + ?Sized>(
    source: &S,
    detector: &Detector,
    cfg: &QuadratureConfig,
) -> Result<ArrivalSummary, ArrivalError> {
    let [n, nt, ni, nit, ns, nst] = integrate_semi_infinite_many(
        |t| {
            let c = source.current(SpaceTimePoint::at(detector.position, t));
            let (p, pi, ps) = (c.j.norm(), c.j_i.norm(), c.j_s.norm());
            [p, t * p, pi, t * pi, ps, t * ps]
        },
        cfg,
    )?;
    Ok(ArrivalSummary {
        total: MeanArrival::from_integrals(nt, n),
        spin_independent: MeanArrival::from_integrals(nit, ni),
        spin_only: MeanArrival::from_integrals(nst, ns),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::currents::{PolarCurrent, SpinVector};
    use crate::packets::{AsymmetricPacket, SymmetricPacket};

    fn det(x: f64, y: f64, z: f64) -> Detector {
        Detector::new(Vec3::new(x, y, z)).unwrap()
    }

    #[test]
    fn detector_rejects_non_finite_positions() {
        assert!(Detector::new(Vec3::new(f64::NAN, 0.0, 0.0)).is_none());
    }

    #[test]
    fn density_on_center_worldline() {
        let p = SymmetricPacket::new(0.5, 2.0).unwrap();
        // the center passes x = 1 at t = 0.5
        let d = det(1.0, 0.0, 0.0);
        let rho = p.current(SpaceTimePoint::new(1.0, 0.0, 0.0, 0.5)).rho;
        let total = arrival_density(&p, &d, 0.5, ComponentSelector::Total).unwrap();
        assert!((total - rho * 2.0).abs() <= 1e-15 * total);
        assert_eq!(arrival_density(&p, &d, 0.5, ComponentSelector::SpinOnly).unwrap(), 0.0);
    }

    #[test]
    fn density_underflows_before_arrival() {
        let p = SymmetricPacket::new(0.01, 1.0).unwrap();
        let d = det(1.0, 1.0, 1.0);
        for sel in ComponentSelector::ALL {
            assert_eq!(arrival_density(&p, &d, 1e-5, sel).unwrap(), 0.0);
        }
    }

    #[test]
    fn negative_time_is_rejected() {
        let p = SymmetricPacket::new(0.01, 1.0).unwrap();
        assert_eq!(
            arrival_density(&p, &det(1.0, 1.0, 1.0), -0.1, ComponentSelector::Total),
            Err(ArrivalError::NegativeTime(-0.1))
        );
    }

    #[test]
    fn unreachable_detector_is_degenerate() {
        let p = SymmetricPacket::new(0.01, 1.0).unwrap();
        // total underflow: far off axis and the packet never spreads enough in time
        let cfg = QuadratureConfig {
            max_doublings: 3,
            ..QuadratureConfig::default()
        };
        let d = det(1e6, 1e6, 1e6);
        let err = mean_arrival(&p, &d, ComponentSelector::Total, &cfg).unwrap_err();
        assert!(matches!(err, ArrivalError::DegenerateDistribution { .. }));
    }

    #[test]
    fn spin_reversal_leaves_component_means_unchanged() {
        let p = SymmetricPacket::new(0.3, 1.5).unwrap();
        let d = det(1.0, 0.5, -0.2);
        let cfg = QuadratureConfig::default();
        let up = PolarCurrent { source: p, spin: SpinVector::UP_Z };
        let down = PolarCurrent { source: p, spin: SpinVector::UP_Z.reversed() };
        for sel in [ComponentSelector::SpinIndependent, ComponentSelector::SpinOnly] {
            let a = mean_arrival(&up, &d, sel, &cfg).unwrap().tau;
            let b = mean_arrival(&down, &d, sel, &cfg).unwrap().tau;
            assert_eq!(a, b);
        }
        // J_i·J_s = -ρ²uy/(2σ²) ≠ 0 here, so |J_i ± J_s| and τ differ
        let a = mean_arrival(&up, &d, ComponentSelector::Total, &cfg).unwrap().tau;
        let b = mean_arrival(&down, &d, ComponentSelector::Total, &cfg).unwrap().tau;
        assert!((a - b).abs() > 1e-5 * a);
    }

    #[test]
    fn spin_reversal_leaves_total_unchanged_when_currents_are_orthogonal() {
        // u = 0: J_i is radial and J_s azimuthal
        let p = SymmetricPacket::new(0.3, 0.0).unwrap();
        let d = det(1.0, 0.5, -0.2);
        let cfg = QuadratureConfig::default();
        let up = PolarCurrent { source: p, spin: SpinVector::UP_Z };
        let down = PolarCurrent { source: p, spin: SpinVector::UP_Z.reversed() };
        let a = mean_arrival(&up, &d, ComponentSelector::Total, &cfg).unwrap().tau;
        let b = mean_arrival(&down, &d, ComponentSelector::Total, &cfg).unwrap().tau;
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn summary_matches_single_component_means() {
        let p = AsymmetricPacket::new(0.2, 0.4, 0.3, 0.1, 2.0).unwrap();
        let d = det(1.0, 0.5, 0.2);
        let cfg = QuadratureConfig::default();
        let s = arrival_summary(&p, &d, &cfg).unwrap();
        for sel in ComponentSelector::ALL {
            let single = mean_arrival(&p, &d, sel, &cfg).unwrap();
            let shared = s.get(sel).unwrap();
            assert!((single.tau - shared.tau).abs() <= 1e-7 * single.tau);
            assert!(shared.tau >= 0.0 && shared.tau <= shared.t_max_used());
        }
    }

    #[test]
    fn spin_only_is_degenerate_on_the_beam_axis_at_rest() {
        // u = 0 and a detector on the z axis: ∇ρ ∥ ẑ, so ∇ρ × ẑ vanishes for all t
        let p = SymmetricPacket::new(0.5, 0.0).unwrap();
        let s = arrival_summary(&p, &det(0.0, 0.0, 1.0), &QuadratureConfig::default()).unwrap();
        assert!(matches!(s.spin_only, Err(ArrivalError::DegenerateDistribution { .. })));
        assert_eq!(s.tau(), s.tau_i());
    }
}
