//! Invariant and oracle suites behind the `validate` command.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use spinarrival_core::oracle::{
    closed_vs_numeric, continuity_residual, normalization, observed_order, reduction_residual, reference_mean,
    spin_divergence, time_derivative_residual, OracleError, ReferenceMean, FD_TOLERANCE, MEAN_TOLERANCE,
    REDUCTION_TOLERANCE,
};
use spinarrival_core::{
    current_numeric, mean_arrival, AsymmetricPacket, ComponentSelector, CurrentSample, CurrentSource, Detector,
    Packet, QuadratureConfig, SpaceTimePoint, SpinVector, SymmetricPacket, Vec3,
};

use crate::config::{Preset, SweepSpec};

pub const CONFIGURATION_SEED: u64 = 0x5eed_0001;
pub const REDUCTION_SEED: u64 = 0x5eed_0002;
pub const MEAN_SEED: u64 = 0x5eed_0003;
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;
pub const MIN_ORDER: f64 = 1.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Fast,
    /// Adds the dense-grid mean arrival cross-checks.
    Slow,
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(Tier::Fast),
            "slow" => Ok(Tier::Slow),
            _ => Err(format!("unrecognised tier `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub params: String,
    pub residual: f64,
    pub scale: f64,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {:.6e} {:.6e} {}",
            self.name,
            self.params,
            self.residual,
            self.scale,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn suite<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn describe_packet(p: &Packet) -> String {
    match p {
        Packet::Symmetric(s) => format!("sym(sigma0={:.4e},u={:.4e})", s.sigma0(), s.u()),
        Packet::Asymmetric(a) => {
            let s = a.spreads();
            format!(
                "asym(a={:.4e},b={:.4e},c={:.4e},x1={:.4e},u={:.4e})",
                s.x,
                s.y,
                s.z,
                a.x1(),
                a.u()
            )
        }
    }
}

fn describe_point(pt: SpaceTimePoint) -> String {
    format!("@({:.4e},{:.4e},{:.4e},{:.4e})", pt.x, pt.y, pt.z, pt.t)
}

/// Current used by the suites; swapping it lets a test inject a faulty implementation.
pub trait CurrentModel: Sync {
    fn current(&self, packet: &Packet, pt: SpaceTimePoint) -> CurrentSample;
}

impl<F: Fn(&Packet, SpaceTimePoint) -> CurrentSample + Sync> CurrentModel for F {
    fn current(&self, packet: &Packet, pt: SpaceTimePoint) -> CurrentSample {
        self(packet, pt)
    }
}

/// The closed forms shipped with the library.
pub struct ClosedForm;

impl CurrentModel for ClosedForm {
    fn current(&self, packet: &Packet, pt: SpaceTimePoint) -> CurrentSample {
        packet.current(pt)
    }
}

fn bind<'a, M: CurrentModel + ?Sized>(model: &'a M, packet: &'a Packet) -> impl Fn(SpaceTimePoint) -> CurrentSample + 'a {
    move |pt| model.current(packet, pt)
}

/// Seeded random packets of both families, each with a point within a few
/// widths of its center.
pub fn random_configurations(seed: u64, n: usize) -> Vec<(Packet, SpaceTimePoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = |rng: &mut ChaCha8Rng| 10f64.powf(rng.gen_range(-1.5..0.0));
    (0..n)
        .map(|i| {
            let p: Packet = if i % 2 == 0 {
                SymmetricPacket::new(spread(&mut rng), rng.gen_range(-3.0..10.0)).unwrap().into()
            } else {
                let (a, b, c) = (spread(&mut rng), spread(&mut rng), spread(&mut rng));
                AsymmetricPacket::new(a, b, c, rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..10.0))
                    .unwrap()
                    .into()
            };
            let t = rng.gen_range(0.0..3.0);
            let c = p.density_center(t);
            let w = p.density_widths(t);
            let pt = SpaceTimePoint::new(
                c.x + w.x * rng.gen_range(-2.5..2.5),
                c.y + w.y * rng.gen_range(-2.5..2.5),
                c.z + w.z * rng.gen_range(-2.5..2.5),
                t,
            );
            (p, pt)
        })
        .collect()
}

fn local_step(p: &Packet, t: f64) -> f64 {
    let w = p.density_widths(t);
    1e-4 * w.x.min(w.y).min(w.z)
}

fn params(p: &Packet, pt: SpaceTimePoint) -> String {
    format!("{}{}", describe_packet(p), describe_point(pt))
}

/// `|∂ρ/∂t + ∇·J|` against the model current.
pub fn continuity_suite<M: CurrentModel + ?Sized>(configs: &[(Packet, SpaceTimePoint)], model: &M) -> Vec<Check> {
    configs
        .par_iter()
        .map(|(p, pt)| {
            let r = continuity_residual(p, &bind(model, p), *pt, local_step(p, pt.t), FD_TOLERANCE);
            Check {
                name: "continuity",
                params: params(p, *pt),
                residual: r.residual,
                scale: r.scale,
                passed: r.passed,
            }
        })
        .collect()
}

/// Analytic `∂ρ/∂t` against a time difference of `ρ`.
pub fn time_derivative_suite(configs: &[(Packet, SpaceTimePoint)]) -> Vec<Check> {
    configs
        .par_iter()
        .map(|(p, pt)| {
            let r = time_derivative_residual(p, *pt, 1e-6, FD_TOLERANCE);
            Check {
                name: "drho_dt",
                params: params(p, *pt),
                residual: r.residual,
                scale: r.scale,
                passed: r.passed,
            }
        })
        .collect()
}

pub fn spin_divergence_suite<M: CurrentModel + ?Sized>(
    configs: &[(Packet, SpaceTimePoint)],
    model: &M,
) -> Vec<Check> {
    configs
        .par_iter()
        .map(|(p, pt)| {
            let r = spin_divergence(&bind(model, p), *pt, local_step(p, pt.t), FD_TOLERANCE);
            Check {
                name: "spin_divergence",
                params: params(p, *pt),
                residual: r.residual,
                scale: r.scale,
                passed: r.passed,
            }
        })
        .collect()
}

/// The three reference parameter sets for the closed-form comparison.
pub fn closed_form_cases() -> [(Packet, SpaceTimePoint); 3] {
    [
        (SymmetricPacket::new(0.01, 1.0).unwrap().into(), SpaceTimePoint::new(1.0, 1.0, 1.0, 1.0)),
        (
            AsymmetricPacket::new(0.001, 0.4, 0.01, 0.0, 2.0).unwrap().into(),
            SpaceTimePoint::new(1.0, 2.0, 1.0, 0.4),
        ),
        (SymmetricPacket::new(0.3, 1.5).unwrap().into(), SpaceTimePoint::new(0.6, 0.3, -0.2, 0.4)),
    ]
}

/// Model current against central differences of `ψ` at `h = 10⁻⁶`, plus the
/// observed order of the differences under step halving.
pub fn closed_vs_numeric_suite<M: CurrentModel + ?Sized>(model: &M) -> Vec<Check> {
    let mut out = Vec::new();
    for (p, pt) in closed_form_cases() {
        let r = closed_vs_numeric(&bind(model, &p), &p, SpinVector::UP_Z, pt, 1e-6, FD_TOLERANCE)
            .expect("the step is far above the rounding limit");
        out.push(Check {
            name: "closed_vs_numeric",
            params: params(&p, pt),
            residual: r.residual,
            scale: r.scale,
            passed: r.passed,
        });
    }
    let order_cases: [(Packet, SpaceTimePoint, f64); 2] = [
        (SymmetricPacket::new(0.3, 1.0).unwrap().into(), SpaceTimePoint::new(0.8, 0.2, -0.1, 0.5), 0.02),
        (
            AsymmetricPacket::new(0.3, 0.5, 0.4, 0.2, 1.5).unwrap().into(),
            SpaceTimePoint::new(0.5, 0.3, 0.2, 0.6),
            0.02,
        ),
    ];
    for (p, pt, h) in order_cases {
        let exact = model.current(&p, pt);
        let err = |h: f64| {
            let n = current_numeric(&p, SpinVector::UP_Z, pt, h).expect("finite step");
            (n.j_i - exact.j_i).max_abs().max((n.j_s - exact.j_s).max_abs())
        };
        let (coarse, fine) = (err(h), err(h / 2.0));
        let order = observed_order(coarse, fine);
        out.push(Check {
            name: "fd_order",
            params: format!("{};order={order:.3}", params(&p, pt)),
            residual: fine,
            scale: coarse,
            passed: order >= MIN_ORDER,
        });
    }
    out
}

pub fn reduction_suite(seed: u64, n: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let sigma0 = 10f64.powf(rng.gen_range(-2.0..0.3));
            let u = rng.gen_range(-3.0..10.0);
            let t = rng.gen_range(0.0..3.0);
            let p = SymmetricPacket::new(sigma0, u).unwrap();
            let w = p.sigma_of_t(t);
            let pt = SpaceTimePoint::new(
                u * t + w * rng.gen_range(-2.5..2.5),
                w * rng.gen_range(-2.5..2.5),
                w * rng.gen_range(-2.5..2.5),
                t,
            );
            let r = reduction_residual(sigma0, u, pt, REDUCTION_TOLERANCE).expect("valid parameters");
            Check {
                name: "reduction",
                params: params(&p.into(), pt),
                residual: r.residual,
                scale: r.scale,
                passed: r.passed,
            }
        })
        .collect()
}

pub fn normalization_suite() -> Vec<Check> {
    let packets: [Packet; 4] = [
        SymmetricPacket::new(0.01, 1.0).unwrap().into(),
        SymmetricPacket::new(0.7, -2.0).unwrap().into(),
        AsymmetricPacket::new(0.001, 0.4, 0.01, 0.0, 3.0).unwrap().into(),
        AsymmetricPacket::new(0.3, 1.1, 0.6, 0.8, 1.0).unwrap().into(),
    ];
    let mut out = Vec::new();
    for p in packets {
        for t in [0.0, 0.5, 2.0] {
            let total = normalization(&p, t, p.density_center(t), p.density_widths(t) * 1.3, 40);
            let residual = (total - 1.0).abs();
            out.push(Check {
                name: "normalization",
                params: format!("{};t={t}", describe_packet(&p)),
                residual,
                scale: 1.0,
                passed: residual <= NORMALIZATION_TOLERANCE,
            });
        }
    }
    out
}

/// One mean arrival cross-check target.
#[derive(Debug, Clone, Copy)]
pub struct MeanCase {
    pub label: &'static str,
    pub packet: Packet,
    pub detector: Detector,
    pub selector: ComponentSelector,
}

/// The fig1 and fig2 presets at `u ∈ {1, 3, 8}` plus four seeded random
/// configurations, ten in all.
pub fn mean_cases(seed: u64) -> Vec<MeanCase> {
    let mut out = Vec::new();
    for (label, preset) in [("fig1", Preset::Fig1), ("fig2", Preset::Fig2)] {
        let spec = SweepSpec::preset(preset);
        let detector = spec.detector().unwrap();
        for u in [1.0, 3.0, 8.0] {
            let packet = spec.packet(u).unwrap();
            for selector in spec.selectors.iter() {
                out.push(MeanCase {
                    label,
                    packet,
                    detector,
                    selector,
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = |rng: &mut ChaCha8Rng| 10f64.powf(rng.gen_range(-1.5..-0.3));
    for i in 0..4 {
        let u = rng.gen_range(0.5..8.0);
        let packet: Packet = if i % 2 == 0 {
            SymmetricPacket::new(spread(&mut rng), u).unwrap().into()
        } else {
            let (a, b, c) = (spread(&mut rng), spread(&mut rng), spread(&mut rng));
            AsymmetricPacket::new(a, b, c, rng.gen_range(-0.5..0.5), u).unwrap().into()
        };
        let detector = Detector::new(Vec3::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ))
        .unwrap();
        for selector in ComponentSelector::ALL {
            out.push(MeanCase {
                label: "random",
                packet,
                detector,
                selector,
            });
        }
    }
    out
}

/// Dense-grid reference, widening the horizon until its tail is negligible.
pub fn reference_for<S: CurrentSource + ?Sized>(
    source: &S,
    detector: &Detector,
    selector: ComponentSelector,
) -> Result<ReferenceMean, OracleError> {
    let mut t_max = 1e4;
    loop {
        match reference_mean(source, detector, selector, 4000, t_max) {
            Err(OracleError::TailNotNegligible { .. }) if t_max < 1e9 => t_max *= 4.0,
            other => return other,
        }
    }
}

fn selector_name(sel: ComponentSelector) -> &'static str {
    match sel {
        ComponentSelector::Total => "tau",
        ComponentSelector::SpinIndependent => "tau_i",
        ComponentSelector::SpinOnly => "tau_s",
    }
}

pub fn mean_arrival_suite<M: CurrentModel + ?Sized>(cases: &[MeanCase], model: &M) -> Vec<Check> {
    let cfg = QuadratureConfig::default();
    cases
        .par_iter()
        .map(|case| {
            let source = bind(model, &case.packet);
            let x = case.detector.position();
            let params = format!(
                "{}:{}:{}@({},{},{})",
                case.label,
                describe_packet(&case.packet),
                selector_name(case.selector),
                x.x,
                x.y,
                x.z
            );
            let adaptive = mean_arrival(&source, &case.detector, case.selector, &cfg);
            let reference = reference_for(&source, &case.detector, case.selector);
            match (adaptive, reference) {
                (Ok(a), Ok(r)) => {
                    let residual = (a.tau - r.tau).abs();
                    Check {
                        name: "mean_arrival",
                        params,
                        residual,
                        scale: r.tau.abs(),
                        passed: residual <= MEAN_TOLERANCE * r.tau.abs(),
                    }
                }
                _ => Check {
                    name: "mean_arrival",
                    params,
                    residual: f64::NAN,
                    scale: f64::NAN,
                    passed: false,
                },
            }
        })
        .collect()
}

pub fn run(tier: Tier) -> Report {
    run_with(tier, &ClosedForm)
}

pub fn run_with<M: CurrentModel + ?Sized>(tier: Tier, model: &M) -> Report {
    let configs = random_configurations(CONFIGURATION_SEED, 200);
    let mut checks = continuity_suite(&configs, model);
    checks.extend(time_derivative_suite(&configs));
    checks.extend(spin_divergence_suite(&configs, model));
    checks.extend(closed_vs_numeric_suite(model));
    checks.extend(reduction_suite(REDUCTION_SEED, 100));
    checks.extend(normalization_suite());
    if tier == Tier::Slow {
        checks.extend(mean_arrival_suite(&mean_cases(MEAN_SEED), model));
    }
    Report { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configurations_are_reproducible() {
        assert_eq!(random_configurations(3, 10), random_configurations(3, 10));
        assert_ne!(random_configurations(3, 10), random_configurations(4, 10));
    }

    #[test]
    fn mean_cases_cover_presets() {
        let cases = mean_cases(MEAN_SEED);
        assert_eq!(cases.iter().filter(|c| c.label == "fig1").count(), 3);
        assert_eq!(cases.iter().filter(|c| c.label == "fig2").count(), 6);
        assert_eq!(cases.iter().filter(|c| c.label == "random").count(), 12);
    }

    #[test]
    fn report_lines_have_five_fields() {
        let c = &normalization_suite()[0];
        let line = c.to_string();
        assert_eq!(line.split(' ').count(), 5, "{line}");
        assert!(line.ends_with("PASS"));
    }
}
