//! Adaptive integration over `[0, ∞)`.
//!
//! Finite panels are integrated with the embedded 7-point Gauss / 15-point
//! Kronrod pair and refined globally: the panel with the largest error
//! relative to its component tolerance is bisected until every component
//! meets `max(abs_tol, rel_tol·|I|)`.
//!
//! The semi-infinite axis is handled by octave doubling. `[0, T₀]` is
//! integrated first, then `[T, 2T]` for `T = T₀, 2T₀, …` until the last octave
//! contributes less than `tail_fraction` of the accumulated value. Integrands
//! that are still not done after `max_doublings` octaves get their remainder
//! `[T, ∞)` through the map `t = T + T·s/(1 − s)`, which handles power-law
//! tails such as the `t⁻⁴` decay of `|J|` for a spreading packet.
//!
//! Every routine integrates `N` components sharing one set of panels, so the
//! numerator and denominator of a mean see the same truncation.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand is not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("no convergence: {reason} (horizon {t_max})")]
    NonConvergent {
        reason: NonConvergence,
        t_max: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonConvergence {
    /// Panel budget exhausted before the tolerance was met.
    PanelLimit,
    /// Panels can no longer be bisected in floating point.
    Roundoff,
    /// Neither octave doubling nor the mapped tail settled.
    Tail,
}

impl core::fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            NonConvergence::PanelLimit => "panel limit reached",
            NonConvergence::Roundoff => "panel width at rounding limit",
            NonConvergence::Tail => "tail criterion never met",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// First truncation horizon.
    pub t_initial: f64,
    pub max_doublings: u32,
    /// Largest allowed contribution of the last octave, relative to the total.
    pub tail_fraction: f64,
    /// Panel budget per finite interval.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-30,
            t_initial: 1.0,
            max_doublings: 60,
            tail_fraction: 1e-10,
            max_panels: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadratureError::InvalidConfig("rel_tol must be positive"));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadratureError::InvalidConfig("abs_tol must be non-negative"));
        }
        if !(self.t_initial > 0.0 && self.t_initial.is_finite()) {
            return Err(QuadratureError::InvalidConfig("t_initial must be positive"));
        }
        if self.max_doublings < 1 {
            return Err(QuadratureError::InvalidConfig("max_doublings must be at least 1"));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction.is_finite()) {
            return Err(QuadratureError::InvalidConfig("tail_fraction must be positive"));
        }
        if self.max_panels < 2 {
            return Err(QuadratureError::InvalidConfig("max_panels must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Truncation horizon; `∞` when the mapped tail was used.
    pub t_max_used: f64,
    /// Integrand evaluations, shared by all components integrated together.
    pub evaluations: usize,
}

// Kronrod abscissae, the odd entries being the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = libm::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

fn sample<const N: usize, F>(f: &mut F, t: f64, evals: &mut usize) -> Result<[f64; N], QuadratureError>
where
    F: FnMut(f64) -> [f64; N],
{
    *evals += 1;
    let v = f(t);
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(QuadratureError::NonFinite { t })
    }
}

/// One Gauss–Kronrod 7/15 estimate; the flag reports an all-zero sample.
fn gauss_kronrod<const N: usize, F>(
    f: &mut F,
    a: f64,
    b: f64,
    evals: &mut usize,
) -> Result<(Panel<N>, bool), QuadratureError>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = sample(f, center, evals)?;
    let mut fv1 = [[0.0; N]; 7];
    let mut fv2 = [[0.0; N]; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        fv1[j] = sample(f, center - dx, evals)?;
        fv2[j] = sample(f, center + dx, evals)?;
    }

    let mut all_zero = fc.iter().all(|&x| x == 0.0);
    let mut panel = Panel {
        a,
        b,
        value: [0.0; N],
        error: [0.0; N],
    };
    for k in 0..N {
        let mut res_g = fc[k] * WG[3];
        let mut res_k = fc[k] * WGK[7];
        let mut res_abs = fc[k].abs() * WGK[7];
        for j in 0..7 {
            let (f1, f2) = (fv1[j][k], fv2[j][k]);
            all_zero &= f1 == 0.0 && f2 == 0.0;
            res_k += WGK[j] * (f1 + f2);
            res_abs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                res_g += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * res_k;
        let mut res_asc = WGK[7] * (fc[k] - mean).abs();
        for j in 0..7 {
            res_asc += WGK[j] * ((fv1[j][k] - mean).abs() + (fv2[j][k] - mean).abs());
        }
        let h = half.abs();
        panel.value[k] = res_k * half;
        panel.error[k] = rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h);
    }
    Ok((panel, all_zero))
}

/// Globally adaptive integration of `N` components over `[a, b]`.
///
/// A first panel whose samples are all exactly zero is bisected once before
/// being accepted, so a narrow pulse between the nodes is not lost.
pub(crate) fn integrate_panel<const N: usize, F>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_panels: usize,
    evals: &mut usize,
) -> Result<([f64; N], [f64; N]), QuadratureError>
where
    F: FnMut(f64) -> [f64; N],
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    let mut panels: Vec<Panel<N>> = Vec::new();
    let (first, zero) = gauss_kronrod(f, a, b, evals)?;
    let mid = 0.5 * (a + b);
    if zero && a < mid && mid < b {
        panels.push(gauss_kronrod(f, a, mid, evals)?.0);
        panels.push(gauss_kronrod(f, mid, b, evals)?.0);
    } else {
        panels.push(first);
    }

    loop {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        for p in &panels {
            for k in 0..N {
                value[k] += p.value[k];
                error[k] += p.error[k];
            }
        }
        let target: [f64; N] = core::array::from_fn(|k| tol.target(value[k]));
        if (0..N).all(|k| error[k] <= target[k]) {
            return Ok((value, error));
        }
        if panels.len() >= max_panels {
            return Err(QuadratureError::NonConvergent {
                reason: NonConvergence::PanelLimit,
                t_max: b,
            });
        }

        let badness = |p: &Panel<N>| {
            (0..N)
                .map(|k| {
                    if target[k] > 0.0 {
                        p.error[k] / target[k]
                    } else if p.error[k] > 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max)
        };
        let mut worst = 0;
        let mut worst_badness = badness(&panels[0]);
        for (i, p) in panels.iter().enumerate().skip(1) {
            let bad = badness(p);
            if bad > worst_badness {
                worst = i;
                worst_badness = bad;
            }
        }

        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(p.a < mid && mid < p.b) {
            return Err(QuadratureError::NonConvergent {
                reason: NonConvergence::Roundoff,
                t_max: b,
            });
        }
        panels.push(gauss_kronrod(f, p.a, mid, evals)?.0);
        panels.push(gauss_kronrod(f, mid, p.b, evals)?.0);
    }
}

/// Adaptive integral of `f` over the finite panel `[a, b]`.
///
/// Returns `(value, error_estimate)`.
pub fn adaptive_panel<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64), QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    if !(rel_tol > 0.0) {
        return Err(QuadratureError::InvalidConfig("rel_tol must be positive"));
    }
    let tol = Tolerance {
        rel: rel_tol,
        abs: f64::MIN_POSITIVE,
    };
    let mut evals = 0;
    let mut g = |t: f64| [f(t)];
    let (v, e) = integrate_panel(&mut g, a, b, tol, QuadratureConfig::default().max_panels, &mut evals)?;
    Ok((v[0], e[0]))
}

/// Integral of `f` over `[0, ∞)`.
pub fn integrate_semi_infinite<F>(mut f: F, cfg: &QuadratureConfig) -> Result<IntegralResult, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let [r] = integrate_semi_infinite_many(|t| [f(t)], cfg)?;
    Ok(r)
}

/// Integrals of the `N` components of `f` over `[0, ∞)` on shared panels and
/// a shared truncation horizon.
pub fn integrate_semi_infinite_many<const N: usize, F>(
    mut f: F,
    cfg: &QuadratureConfig,
) -> Result<[IntegralResult; N], QuadratureError>
where
    F: FnMut(f64) -> [f64; N],
{
    cfg.validate()?;
    let tol = Tolerance {
        rel: cfg.rel_tol,
        abs: cfg.abs_tol,
    };
    let mut evals = 0;
    let (mut value, mut error) = integrate_panel(&mut f, 0.0, cfg.t_initial, tol, cfg.max_panels, &mut evals)?;
    let mut horizon = cfg.t_initial;

    let finish = |value: [f64; N], error: [f64; N], t_max: f64, evals: usize| {
        core::array::from_fn(|k| IntegralResult {
            value: value[k],
            error_estimate: error[k],
            t_max_used: t_max,
            evaluations: evals,
        })
    };

    for _ in 0..cfg.max_doublings {
        let (octave, octave_err) =
            integrate_panel(&mut f, horizon, 2.0 * horizon, tol, cfg.max_panels, &mut evals)?;
        horizon *= 2.0;
        for k in 0..N {
            value[k] += octave[k];
            error[k] += octave_err[k];
        }
        let arrived = value.iter().any(|v| v.abs() > cfg.abs_tol);
        let settled =
            (0..N).all(|k| octave[k].abs() <= cfg.tail_fraction * value[k].abs() + cfg.abs_tol);
        if arrived && settled {
            // the remaining tail is bounded by the last octave for decaying tails
            for k in 0..N {
                error[k] += octave[k].abs();
            }
            return Ok(finish(value, error, horizon, evals));
        }
        if !horizon.is_finite() {
            break;
        }
    }

    if value.iter().all(|v| v.abs() <= cfg.abs_tol) {
        // vanishes on the whole horizon
        return Ok(finish(value, error, horizon, evals));
    }

    let start = horizon;
    let mut mapped = |s: f64| {
        let one_minus = 1.0 - s;
        let t = start + start * s / one_minus;
        let jac = start / (one_minus * one_minus);
        let v = f(t);
        let out: [f64; N] = core::array::from_fn(|k| if v[k] == 0.0 { 0.0 } else { v[k] * jac });
        out
    };
    let (tail, tail_err) = integrate_panel(&mut mapped, 0.0, 1.0, tol, cfg.max_panels, &mut evals)
        .map_err(|e| match e {
            QuadratureError::NonConvergent { .. } => QuadratureError::NonConvergent {
                reason: NonConvergence::Tail,
                t_max: f64::INFINITY,
            },
            other => other,
        })?;
    for k in 0..N {
        value[k] += tail[k];
        error[k] += tail_err[k];
    }
    Ok(finish(value, error, f64::INFINITY, evals))
}
