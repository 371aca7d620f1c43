//! Spin-decomposed probability current `J = J_i + J_s`.
//!
//! With `ψ₁ = R e^{iS} χ` for a fixed spin eigenstate `χ`, the
//! non-relativistic Dirac current is
//!
//! ```text
//! J = ρ ∇S + ∇ρ × s,      s = ½ χ†σχ,  |s| = ½
//! ```
//!
//! (natural units). Three independent routes are provided: the closed forms
//! hard-wired to `s = ẑ/2` ([`CurrentSource`] on the packet types), the generic
//! polar-field formula ([`current_from_polar`]) and central differences of the
//! complex amplitude ([`current_numeric`]).

use thiserror::Error;

use crate::packets::{
    Amplitude, AsymmetricPacket, Packet, PolarFields, PolarSource, SpaceTimePoint, SymmetricPacket,
};
use crate::vec3::Vec3;

/// Allowed deviation of `|s|` from `½`.
pub const SPIN_MAGNITUDE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpinError {
    #[error("spin vector must have magnitude 1/2, got {magnitude}")]
    WrongMagnitude { magnitude: f64 },
    #[error("spin direction must be a finite non-zero vector")]
    ZeroDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FiniteDifferenceError {
    #[error("step {step} is lost in rounding at coordinate {coordinate}")]
    DegenerateStep { step: f64, coordinate: f64 },
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

/// Spin expectation vector `s = ½ χ†σχ` of a pure spin state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinVector(Vec3);

impl SpinVector {
    /// Spin up along `+z`, the orientation used by the closed forms.
    pub const UP_Z: SpinVector = SpinVector(Vec3::new(0.0, 0.0, 0.5));

    pub fn new(sx: f64, sy: f64, sz: f64) -> Result<Self, SpinError> {
        let v = Vec3::new(sx, sy, sz);
        let magnitude = v.norm();
        if !v.is_finite() || (magnitude - 0.5).abs() > SPIN_MAGNITUDE_TOLERANCE {
            return Err(SpinError::WrongMagnitude { magnitude });
        }
        Ok(SpinVector(v))
    }

    /// Spin of magnitude ½ pointing along `direction`.
    pub fn along(direction: Vec3) -> Result<Self, SpinError> {
        let n = direction.norm();
        if !direction.is_finite() || n == 0.0 {
            return Err(SpinError::ZeroDirection);
        }
        Ok(SpinVector(direction * (0.5 / n)))
    }

    pub fn reversed(self) -> Self {
        SpinVector(-self.0)
    }

    pub fn vector(self) -> Vec3 {
        self.0
    }
}

impl Default for SpinVector {
    fn default() -> Self {
        SpinVector::UP_Z
    }
}

/// Current components and density at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurrentSample {
    pub j_i: Vec3,
    pub j_s: Vec3,
    pub j: Vec3,
    pub rho: f64,
}

impl CurrentSample {
    /// Builds a sample with `j = j_i + j_s`.
    pub fn new(rho: f64, j_i: Vec3, j_s: Vec3) -> Self {
        if rho == 0.0 {
            return CurrentSample::default();
        }
        CurrentSample {
            j_i,
            j_s,
            j: j_i + j_s,
            rho,
        }
    }

    /// Every current component multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        CurrentSample {
            j_i: self.j_i * factor,
            j_s: self.j_s * factor,
            j: self.j * factor,
            rho: self.rho * factor,
        }
    }
}

/// Anything that yields a [`CurrentSample`] at a spacetime point.
pub trait CurrentSource {
    fn current(&self, pt: SpaceTimePoint) -> CurrentSample;
}

impl<F> CurrentSource for F
where
    F: Fn(SpaceTimePoint) -> CurrentSample,
{
    fn current(&self, pt: SpaceTimePoint) -> CurrentSample {
        self(pt)
    }
}

/// `J_i = ρ∇S`, `J_s = ∇ρ × s`.
pub fn current_from_polar(fields: &PolarFields, spin: SpinVector) -> CurrentSample {
    CurrentSample::new(
        fields.rho,
        fields.grad_s * fields.rho,
        fields.grad_rho.cross(spin.vector()),
    )
}

/// Closed-form current of the symmetric packet with `s = ẑ/2`.
pub fn current_symmetric(packet: &SymmetricPacket, pt: SpaceTimePoint) -> CurrentSample {
    let rho = packet.polar_fields(pt).rho;
    if rho == 0.0 {
        return CurrentSample::default();
    }
    let t = pt.t;
    let s0 = packet.sigma0();
    let sigma_sq = packet.sigma_of_t(t) * packet.sigma_of_t(t);
    let dx = pt.x - packet.u() * t;
    let spread = 4.0 * s0 * s0 * sigma_sq;
    let j_i = Vec3::new(
        packet.u() + dx * t / spread,
        pt.y * t / spread,
        pt.z * t / spread,
    ) * rho;
    let j_s = Vec3::new(-pt.y / (2.0 * sigma_sq), dx / (2.0 * sigma_sq), 0.0) * rho;
    CurrentSample::new(rho, j_i, j_s)
}

/// Closed-form current of the asymmetric packet with `s = ẑ/2`.
pub fn current_asymmetric(packet: &AsymmetricPacket, pt: SpaceTimePoint) -> CurrentSample {
    let rho = packet.polar_fields(pt).rho;
    if rho == 0.0 {
        return CurrentSample::default();
    }
    let t = pt.t;
    let Vec3 { x: a, y: b, z: c } = packet.spreads();
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let (da, db, dc) = (a2 * a2 + t * t, b2 * b2 + t * t, c2 * c2 + t * t);
    let dx = pt.x + packet.x1() - packet.u() * t;
    let j_i = Vec3::new(packet.u() + dx * t / da, pt.y * t / db, pt.z * t / dc) * rho;
    let j_s = Vec3::new(-b2 * pt.y / db, a2 * dx / da, 0.0) * rho;
    CurrentSample::new(rho, j_i, j_s)
}

impl CurrentSource for SymmetricPacket {
    fn current(&self, pt: SpaceTimePoint) -> CurrentSample {
        current_symmetric(self, pt)
    }
}

impl CurrentSource for AsymmetricPacket {
    fn current(&self, pt: SpaceTimePoint) -> CurrentSample {
        current_asymmetric(self, pt)
    }
}

impl CurrentSource for Packet {
    fn current(&self, pt: SpaceTimePoint) -> CurrentSample {
        match self {
            Packet::Symmetric(p) => current_symmetric(p, pt),
            Packet::Asymmetric(p) => current_asymmetric(p, pt),
        }
    }
}

/// Current of any polar source for an arbitrary spin orientation.
#[derive(Debug, Clone, Copy)]
pub struct PolarCurrent<P> {
    pub source: P,
    pub spin: SpinVector,
}

impl<P: PolarSource> CurrentSource for PolarCurrent<P> {
    fn current(&self, pt: SpaceTimePoint) -> CurrentSample {
        current_from_polar(&self.source.polar_fields(pt), self.spin)
    }
}

/// Default finite-difference step `10⁻⁶·max(1, |coordinate|)`.
pub fn default_step(coordinate: f64) -> f64 {
    1e-6 * coordinate.abs().max(1.0)
}

/// Current from central differences of `ψ` with step `h` along each axis.
///
/// `j_i = Im(ψ*∇ψ)` and `j_s = ∇|ψ|² × s`.
pub fn current_numeric<A: Amplitude + ?Sized>(
    amplitude: &A,
    spin: SpinVector,
    pt: SpaceTimePoint,
    h: f64,
) -> Result<CurrentSample, FiniteDifferenceError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(FiniteDifferenceError::InvalidStep(h));
    }
    let centre = amplitude.psi(pt);
    let rho = centre.norm_sqr();
    let mut grad_re = [0.0; 3];
    let mut grad_im = [0.0; 3];
    for axis in 0..3 {
        let coordinate = pt.position()[axis];
        let (plus, minus) = (coordinate + h, coordinate - h);
        let span = plus - minus;
        if span == 0.0 {
            return Err(FiniteDifferenceError::DegenerateStep { step: h, coordinate });
        }
        let fp = amplitude.psi(pt.shifted(axis, plus - coordinate));
        let fm = amplitude.psi(pt.shifted(axis, minus - coordinate));
        grad_re[axis] = (fp.re - fm.re) / span;
        grad_im[axis] = (fp.im - fm.im) / span;
    }
    let grad_re = Vec3::from(grad_re);
    let grad_im = Vec3::from(grad_im);
    let j_i = grad_im * centre.re - grad_re * centre.im;
    let grad_rho = (grad_re * centre.re + grad_im * centre.im) * 2.0;
    Ok(CurrentSample::new(rho, j_i, grad_rho.cross(spin.vector())))
}

/// [`current_numeric`] as a [`CurrentSource`], using [`default_step`] when
/// `step` is `None`.
#[derive(Debug, Clone, Copy)]
pub struct NumericCurrent<A> {
    pub amplitude: A,
    pub spin: SpinVector,
    pub step: Option<f64>,
}

impl<A: Amplitude> NumericCurrent<A> {
    pub fn new(amplitude: A, spin: SpinVector) -> Self {
        NumericCurrent {
            amplitude,
            spin,
            step: None,
        }
    }

    pub fn try_current(&self, pt: SpaceTimePoint) -> Result<CurrentSample, FiniteDifferenceError> {
        let h = self.step.unwrap_or_else(|| {
            default_step(pt.x.abs().max(pt.y.abs()).max(pt.z.abs()))
        });
        current_numeric(&self.amplitude, self.spin, pt, h)
    }
}

impl<A: Amplitude> CurrentSource for NumericCurrent<A> {
    /// Panics on a degenerate step; use [`NumericCurrent::try_current`] to
    /// handle that case.
    fn current(&self, pt: SpaceTimePoint) -> CurrentSample {
        match self.try_current(pt) {
            Ok(sample) => sample,
            Err(e) => panic!("numeric current at {pt:?}: {e}"),
        }
    }
}
