//! Brute-force validators, independent of the closed forms they check.
//!
//! * continuity `∂ρ/∂t + ∇·J = 0` with `∇·J` from central differences,
//! * divergence-free spin current `∇·J_s = 0`,
//! * closed-form currents against differentiation of `ψ`,
//! * reduction of the asymmetric family to the symmetric one,
//! * `∫ρ d³x = 1` by tensor-product Gauss–Hermite quadrature,
//! * mean arrival times from a Richardson-extrapolated trapezoid rule on a
//!   logarithmically graded time grid.

use alloc::vec::Vec;

use thiserror::Error;

use crate::arrival::{ComponentSelector, Detector, DEGENERATE_NORM_FLOOR};
use crate::currents::{current_numeric, CurrentSample, CurrentSource, FiniteDifferenceError, SpinVector};
use crate::packets::{Amplitude, AsymmetricPacket, PacketError, PolarSource, SpaceTimePoint, SymmetricPacket};
use crate::vec3::Vec3;

/// Relative tolerance for finite-difference comparisons.
pub const FD_TOLERANCE: f64 = 1e-5;
/// Relative tolerance for adaptive vs. reference mean arrival times.
pub const MEAN_TOLERANCE: f64 = 1e-4;
/// Relative tolerance for the asymmetric → symmetric reduction.
pub const REDUCTION_TOLERANCE: f64 = 1e-10;
/// Lower bound of the comparison scale in residual reports.
pub const SCALE_FLOOR: f64 = 1e-30;
/// Largest tail mass (relative) tolerated beyond the reference horizon.
pub const REFERENCE_TAIL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum OracleError {
    #[error("reference grid needs at least 2 panels and a positive horizon")]
    InvalidGrid,
    #[error("tail beyond the reference horizon carries {fraction:e} of the mass")]
    TailNotNegligible { fraction: f64 },
    #[error("reference distribution is degenerate (norm {norm:e})")]
    Degenerate { norm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub point: SpaceTimePoint,
    pub residual: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualReport {
    /// Passes iff `residual ≤ tolerance·scale`.
    pub fn new(point: SpaceTimePoint, residual: f64, scale: f64, tolerance: f64) -> Self {
        ResidualReport {
            point,
            residual,
            scale,
            tolerance,
            passed: residual <= tolerance * scale,
        }
    }

    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }
}

/// Central-difference Jacobian `∂_l v_k` of a vector field picked from the
/// current, returned row-major as `[k][l]`.
fn jacobian<C, F>(source: &C, pt: SpaceTimePoint, h: f64, pick: F) -> [[f64; 3]; 3]
where
    C: CurrentSource + ?Sized,
    F: Fn(&CurrentSample) -> Vec3,
{
    let mut jac = [[0.0; 3]; 3];
    for l in 0..3 {
        let c = pt.position()[l];
        let (plus, minus) = (c + h, c - h);
        let span = plus - minus;
        let vp = pick(&source.current(pt.shifted(l, plus - c)));
        let vm = pick(&source.current(pt.shifted(l, minus - c)));
        for (k, row) in jac.iter_mut().enumerate() {
            row[l] = (vp[k] - vm[k]) / span;
        }
    }
    jac
}

/// `|∂ρ/∂t + ∇·J|` with analytic `∂ρ/∂t` and `∇·J` by central differences of
/// the current with spatial step `h`.
pub fn continuity_residual<P, C>(polar: &P, current: &C, pt: SpaceTimePoint, h: f64, tol: f64) -> ResidualReport
where
    P: PolarSource + ?Sized,
    C: CurrentSource + ?Sized,
{
    let drho_dt = polar.polar_fields(pt).drho_dt;
    let jac = jacobian(current, pt, h, |c| c.j);
    let div = jac[0][0] + jac[1][1] + jac[2][2];
    let scale = drho_dt.abs().max(div.abs()).max(SCALE_FLOOR);
    ResidualReport::new(pt, (drho_dt + div).abs(), scale, tol)
}

/// Analytic `∂ρ/∂t` against a central difference of `ρ` in time.
pub fn time_derivative_residual<P>(polar: &P, pt: SpaceTimePoint, h_time: f64, tol: f64) -> ResidualReport
where
    P: PolarSource + ?Sized,
{
    let analytic = polar.polar_fields(pt).drho_dt;
    let (tp, tm) = (pt.t + h_time, pt.t - h_time);
    let numeric =
        (polar.polar_fields(pt.with_time(tp)).rho - polar.polar_fields(pt.with_time(tm)).rho) / (tp - tm);
    let scale = analytic.abs().max(numeric.abs()).max(SCALE_FLOOR);
    ResidualReport::new(pt, (analytic - numeric).abs(), scale, tol)
}

/// `|∇·J_s|` by central differences, compared against the largest entry of
/// the spin-current Jacobian (the size of the terms that must cancel).
pub fn spin_divergence<C>(current: &C, pt: SpaceTimePoint, h: f64, tol: f64) -> ResidualReport
where
    C: CurrentSource + ?Sized,
{
    let jac = jacobian(current, pt, h, |c| c.j_s);
    let div = jac[0][0] + jac[1][1] + jac[2][2];
    let scale = jac
        .iter()
        .flatten()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(SCALE_FLOOR);
    ResidualReport::new(pt, div.abs(), scale, tol)
}

/// Largest componentwise deviation between two vectors, relative to the
/// larger of their sup norms. Two zero vectors agree exactly.
pub fn relative_deviation(reference: Vec3, other: Vec3) -> f64 {
    let scale = reference.max_abs().max(other.max_abs());
    if scale == 0.0 {
        0.0
    } else {
        (reference - other).max_abs() / scale
    }
}

/// Closed-form current against [`current_numeric`] on the same amplitude.
///
/// The residual is the worst [`relative_deviation`] over `J_i` and `J_s`.
pub fn closed_vs_numeric<C, A>(
    closed: &C,
    amplitude: &A,
    spin: SpinVector,
    pt: SpaceTimePoint,
    h: f64,
    tol: f64,
) -> Result<ResidualReport, FiniteDifferenceError>
where
    C: CurrentSource + ?Sized,
    A: Amplitude + ?Sized,
{
    let exact = closed.current(pt);
    let numeric = current_numeric(amplitude, spin, pt, h)?;
    let residual = relative_deviation(exact.j_i, numeric.j_i).max(relative_deviation(exact.j_s, numeric.j_s));
    Ok(ResidualReport::new(pt, residual, 1.0, tol))
}

/// Asymmetric packet with `a = b = c = √2σ0`, `x1 = 0` against the symmetric
/// packet: worst relative deviation over `ρ`, `J_i`, `J_s`.
pub fn reduction_residual(sigma0: f64, u: f64, pt: SpaceTimePoint, tol: f64) -> Result<ResidualReport, PacketError> {
    let sym = SymmetricPacket::new(sigma0, u)?;
    let asym = AsymmetricPacket::matching_symmetric(sigma0, u)?;
    let (cs, ca) = (sym.current(pt), asym.current(pt));
    let rho_scale = cs.rho.abs().max(ca.rho.abs());
    let rho_dev = if rho_scale == 0.0 {
        0.0
    } else {
        (cs.rho - ca.rho).abs() / rho_scale
    };
    let residual = rho_dev
        .max(relative_deviation(cs.j_i, ca.j_i))
        .max(relative_deviation(cs.j_s, ca.j_s));
    Ok(ResidualReport::new(pt, residual, 1.0, tol))
}

/// Observed convergence order from errors at step `h` and `h/2`.
pub fn observed_order(error_h: f64, error_half_h: f64) -> f64 {
    libm::log2(error_h / error_half_h)
}

/// Gauss–Hermite nodes and weights for `∫ e^{-x²} g(x) dx`, by Newton
/// iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let pim4 = libm::pow(core::f64::consts::PI, -0.25);
    let mut z = 0.0_f64;
    for i in 0..m {
        z = match i {
            0 => libm::sqrt(2.0 * nf + 1.0) - 1.855_75 * libm::pow(2.0 * nf + 1.0, -1.0 / 6.0),
            1 => z - 1.14 * libm::pow(nf, 0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * libm::sqrt(2.0 / jf) * p2 - libm::sqrt((jf - 1.0) / jf) * p3;
            }
            pp = libm::sqrt(2.0 * nf) * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 3e-14 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.into_iter().zip(w).collect()
}

/// `∫ρ d³x` by an `n³`-point Gauss–Hermite rule centred at `center` with
/// per-axis length scales `widths` (standard deviations).
pub fn normalization<P: PolarSource + ?Sized>(source: &P, t: f64, center: Vec3, widths: Vec3, n: usize) -> f64 {
    let rule = gauss_hermite(n);
    let s = widths * core::f64::consts::SQRT_2;
    let mut total = 0.0;
    for &(xi, wi) in &rule {
        for &(yj, wj) in &rule {
            for &(zk, wk) in &rule {
                let p = SpaceTimePoint::new(center.x + s.x * xi, center.y + s.y * yj, center.z + s.z * zk, t);
                let g = source.polar_fields(p).rho * libm::exp(xi * xi + yj * yj + zk * zk);
                total += wi * wj * wk * g;
            }
        }
    }
    total * s.x * s.y * s.z
}

/// A reference mean arrival time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceMean {
    pub tau: f64,
    pub norm: f64,
    /// Relative mass in `[t_max, 2·t_max]`.
    pub tail_fraction: f64,
}

/// Mean of a non-negative density on `[0, t_max]` by the composite trapezoid
/// rule on `n` and `2n` panels, Richardson-extrapolated.
///
/// The grid is uniform in `s ∈ [0, 1]` with `t = κ(e^{Ls} − 1)` and
/// `κ = 10⁻¹²·t_max`, which spreads panels evenly over twelve decades of `t`.
pub fn reference_mean_of<F: FnMut(f64) -> f64>(
    mut density: F,
    grid_n: usize,
    t_max: f64,
) -> Result<ReferenceMean, OracleError> {
    if grid_n < 2 || !(t_max > 0.0 && t_max.is_finite()) {
        return Err(OracleError::InvalidGrid);
    }
    let knee = 1e-12 * t_max;
    let rate = libm::log1p(t_max / knee);
    let fine = 2 * grid_n;
    let ds = 1.0 / fine as f64;

    let (mut den2, mut num2, mut den1, mut num1) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..=fine {
        let s = j as f64 * ds;
        let t = if j == fine { t_max } else { knee * libm::expm1(rate * s) };
        let jac = knee * rate * libm::exp(rate * s);
        let d = density(t) * jac;
        let end = if j == 0 || j == fine { 0.5 } else { 1.0 };
        den2 += end * d;
        num2 += end * t * d;
        if j % 2 == 0 {
            den1 += end * d;
            num1 += end * t * d;
        }
    }
    let (den2, num2) = (den2 * ds, num2 * ds);
    let (den1, num1) = (den1 * 2.0 * ds, num1 * 2.0 * ds);
    let norm = (4.0 * den2 - den1) / 3.0;
    let first = (4.0 * num2 - num1) / 3.0;
    if !(norm > DEGENERATE_NORM_FLOOR) {
        return Err(OracleError::Degenerate { norm });
    }

    // one extra octave, plain trapezoid in t
    let dt = t_max / grid_n as f64;
    let (mut tail_den, mut tail_num) = (0.0, 0.0);
    for j in 0..=grid_n {
        let t = t_max + j as f64 * dt;
        let end = if j == 0 || j == grid_n { 0.5 } else { 1.0 };
        let d = density(t);
        tail_den += end * d * dt;
        tail_num += end * t * d * dt;
    }
    let tail_fraction = (tail_den / norm).max(tail_num / first.abs().max(f64::MIN_POSITIVE));
    if !(tail_fraction < REFERENCE_TAIL_LIMIT) {
        return Err(OracleError::TailNotNegligible { fraction: tail_fraction });
    }
    Ok(ReferenceMean {
        tau: first / norm,
        norm,
        tail_fraction,
    })
}

/// Reference mean arrival time of one current component at a detector.
pub fn reference_mean<S: CurrentSource + ?Sized>(
    source: &S,
    detector: &Detector,
    selector: ComponentSelector,
    grid_n: usize,
    t_max: f64,
) -> Result<ReferenceMean, OracleError> {
    let x = detector.position();
    reference_mean_of(
        |t| selector.pick(&source.current(SpaceTimePoint::at(x, t))).norm(),
        grid_n,
        t_max,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn gauss_hermite_moments() {
        for n in [1, 2, 5, 20, 40] {
            let rule = gauss_hermite(n);
            let m0: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((m0 - libm::sqrt(PI)).abs() < 1e-13, "n = {n}");
            if n >= 2 {
                let m2: f64 = rule.iter().map(|&(x, w)| w * x * x).sum();
                assert!((m2 - 0.5 * libm::sqrt(PI)).abs() < 1e-13, "n = {n}");
            }
        }
        // symmetric nodes
        let rule = gauss_hermite(7);
        assert!(rule[3].0.abs() < 1e-15);
        assert!((rule[0].0 + rule[6].0).abs() < 1e-14);
    }

    #[test]
    fn underflowed_point_passes_continuity() {
        let p = SymmetricPacket::new(0.01, 1.0).unwrap();
        let pt = SpaceTimePoint::new(1.0, 1.0, 1.0, 1e-4);
        let r = continuity_residual(&p, &p, pt, 1e-3, FD_TOLERANCE);
        assert_eq!(r.residual, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn zero_gradient_point_has_no_spin_divergence() {
        let p = SymmetricPacket::new(0.5, 1.0).unwrap();
        let r = spin_divergence(&p, SpaceTimePoint::new(0.8, 0.0, 0.0, 0.8), 1e-4, FD_TOLERANCE);
        assert!(r.passed, "{r:?}");
        assert!(r.relative() < 1e-8);
    }

    #[test]
    fn truncated_gaussian_mean() {
        // ∫₀^∞ t e^{-(t-3)²} / ∫₀^∞ e^{-(t-3)²} = 3 + e^{-9} / (√π (1 + erf 3))
        let exact = 3.0 + libm::exp(-9.0) / (libm::sqrt(PI) * (1.0 + libm::erf(3.0)));
        let r = reference_mean_of(|t| libm::exp(-(t - 3.0) * (t - 3.0)), 1 << 14, 100.0).unwrap();
        assert!((r.tau - exact).abs() < 1e-10 * exact, "{} vs {exact}", r.tau);
    }

    #[test]
    fn reference_flags_heavy_tails() {
        let err = reference_mean_of(|t| 1.0 / (1.0 + t * t), 1 << 10, 10.0).unwrap_err();
        assert!(matches!(err, OracleError::TailNotNegligible { .. }));
        assert_eq!(reference_mean_of(|_| 1.0, 1, 1.0), Err(OracleError::InvalidGrid));
        assert!(matches!(
            reference_mean_of(|_| 0.0, 16, 1.0),
            Err(OracleError::Degenerate { .. })
        ));
    }

    #[test]
    fn relative_deviation_handles_zero_vectors() {
        assert_eq!(relative_deviation(Vec3::ZERO, Vec3::ZERO), 0.0);
        assert_eq!(relative_deviation(Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)), 2.0);
    }
}
