//! Analytic free Gaussian wave packets and their polar decomposition.
//!
//! Two families are provided, both in natural units `ħ = m = 1`:
//!
//! * [`SymmetricPacket`]: isotropic spread `σ0`, released at the origin with
//!   group velocity `u` along `+x`.
//! * [`AsymmetricPacket`]: independent axis spreads `a`, `b`, `c`, released at
//!   `(-x1, 0, 0)` with group velocity `u = k` along `+x`.
//!
//! Every evaluator works with the log-density first and exponentiates once, so
//! far from the packet the density underflows cleanly to `0.0` instead of
//! producing `0 · ∞` or `NaN`.

use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PacketError {
    #[error("spread `{name}` must be positive and finite, got {value}")]
    NonPositiveSpread { name: &'static str, value: f64 },
    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

fn check_spread(name: &'static str, value: f64) -> Result<f64, PacketError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(PacketError::NonPositiveSpread { name, value })
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<f64, PacketError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(PacketError::NonFinite { name, value })
    }
}

/// A point in space and time at which fields are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl SpaceTimePoint {
    pub const fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        SpaceTimePoint { x, y, z, t }
    }

    pub fn at(position: Vec3, t: f64) -> Self {
        SpaceTimePoint::new(position.x, position.y, position.z, t)
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    /// The same point displaced by `delta` along spatial axis `axis`.
    pub fn shifted(&self, axis: usize, delta: f64) -> Self {
        let mut p = *self;
        match axis {
            0 => p.x += delta,
            1 => p.y += delta,
            2 => p.z += delta,
            _ => panic!("axis index {axis} out of range"),
        }
        p
    }

    pub fn with_time(&self, t: f64) -> Self {
        SpaceTimePoint { t, ..*self }
    }
}

/// Wave-function value `ψ = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl From<Complex64> for ComplexAmplitude {
    fn from(c: Complex64) -> Self {
        ComplexAmplitude { re: c.re, im: c.im }
    }
}

/// Density, phase gradient and density derivatives at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarFields {
    pub rho: f64,
    pub grad_rho: Vec3,
    pub grad_s: Vec3,
    pub drho_dt: f64,
}

/// Anything that can be evaluated to a complex amplitude.
pub trait Amplitude {
    fn psi(&self, pt: SpaceTimePoint) -> ComplexAmplitude;
}

/// Anything that can be evaluated to polar fields `ρ, ∇ρ, ∇S, ∂ρ/∂t`.
pub trait PolarSource {
    fn polar_fields(&self, pt: SpaceTimePoint) -> PolarFields;
}

/// Isotropic Gaussian packet released at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricPacket {
    sigma0: f64,
    u: f64,
}

impl SymmetricPacket {
    pub fn new(sigma0: f64, u: f64) -> Result<Self, PacketError> {
        Ok(SymmetricPacket {
            sigma0: check_spread("sigma0", sigma0)?,
            u: check_finite("u", u)?,
        })
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Spread `σ(t) = σ0 √(1 + t²/(4σ0⁴))`.
    pub fn sigma_of_t(&self, t: f64) -> f64 {
        libm::sqrt(self.sigma_sq(t))
    }

    fn sigma_sq(&self, t: f64) -> f64 {
        let s2 = self.sigma0 * self.sigma0;
        s2 + t * t / (4.0 * s2)
    }

    /// Position of the density maximum at time `t`.
    pub fn density_center(&self, t: f64) -> Vec3 {
        Vec3::new(self.u * t, 0.0, 0.0)
    }

    /// Per-axis standard deviation of the density at time `t`.
    pub fn density_widths(&self, t: f64) -> Vec3 {
        let s = self.sigma_of_t(t);
        Vec3::new(s, s, s)
    }

    fn offset(&self, pt: &SpaceTimePoint) -> Vec3 {
        Vec3::new(pt.x - self.u * pt.t, pt.y, pt.z)
    }

    fn log_rho(&self, d: Vec3, sigma_sq: f64) -> f64 {
        -1.5 * libm::log(2.0 * PI * sigma_sq) - d.dot(d) / (2.0 * sigma_sq)
    }

    /// Phase `S`, including the spatially constant Gouy term.
    pub fn phase(&self, pt: SpaceTimePoint) -> f64 {
        let s02 = self.sigma0 * self.sigma0;
        let sigma_sq = self.sigma_sq(pt.t);
        let d = self.offset(&pt);
        -1.5 * libm::atan(pt.t / (2.0 * s02))
            + self.u * (pt.x - 0.5 * self.u * pt.t)
            + d.dot(d) * pt.t / (8.0 * s02 * sigma_sq)
    }
}

impl PolarSource for SymmetricPacket {
    fn polar_fields(&self, pt: SpaceTimePoint) -> PolarFields {
        let t = pt.t;
        let s02 = self.sigma0 * self.sigma0;
        let sigma_sq = self.sigma_sq(t);
        let d = self.offset(&pt);
        let rho = libm::exp(self.log_rho(d, sigma_sq));

        let grad_rho = d * (-rho / sigma_sq);
        let grad_s = Vec3::new(self.u, 0.0, 0.0) + d * (t / (4.0 * s02 * sigma_sq));

        let dsigma_sq = t / (2.0 * s02);
        let dlog_rho = -1.5 * dsigma_sq / sigma_sq
            + d.x * self.u / sigma_sq
            + d.dot(d) * dsigma_sq / (2.0 * sigma_sq * sigma_sq);

        PolarFields {
            rho,
            grad_rho,
            grad_s,
            drho_dt: rho * dlog_rho,
        }
    }
}

impl Amplitude for SymmetricPacket {
    fn psi(&self, pt: SpaceTimePoint) -> ComplexAmplitude {
        let d = self.offset(&pt);
        let r = libm::exp(0.5 * self.log_rho(d, self.sigma_sq(pt.t)));
        let (sin, cos) = libm::sincos(self.phase(pt));
        ComplexAmplitude {
            re: r * cos,
            im: r * sin,
        }
    }
}

/// Product of three independent Gaussians released at `(-x1, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricPacket {
    a: f64,
    b: f64,
    c: f64,
    x1: f64,
    u: f64,
}

impl AsymmetricPacket {
    pub fn new(a: f64, b: f64, c: f64, x1: f64, u: f64) -> Result<Self, PacketError> {
        Ok(AsymmetricPacket {
            a: check_spread("a", a)?,
            b: check_spread("b", b)?,
            c: check_spread("c", c)?,
            x1: check_finite("x1", x1)?,
            u: check_finite("u", u)?,
        })
    }

    /// The member of this family that coincides with `SymmetricPacket(σ0, u)`.
    pub fn matching_symmetric(sigma0: f64, u: f64) -> Result<Self, PacketError> {
        let s = core::f64::consts::SQRT_2 * check_spread("sigma0", sigma0)?;
        AsymmetricPacket::new(s, s, s, 0.0, u)
    }

    pub fn spreads(&self) -> Vec3 {
        Vec3::new(self.a, self.b, self.c)
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// The real and imaginary parts of `(a² + it)(b² + it)(c² + it)`.
    pub fn pq_factors(&self, t: f64) -> (f64, f64) {
        let (a2, b2, c2) = (self.a * self.a, self.b * self.b, self.c * self.c);
        let t2 = t * t;
        let p = a2 * b2 * c2 - (a2 + b2 + c2) * t2;
        let q = (a2 * b2 + a2 * c2 + b2 * c2) * t - t2 * t;
        (p, q)
    }

    pub fn density_center(&self, t: f64) -> Vec3 {
        Vec3::new(-self.x1 + self.u * t, 0.0, 0.0)
    }

    /// Per-axis standard deviation of the density, `√((a⁴ + t²)/(2a²))` etc.
    pub fn density_widths(&self, t: f64) -> Vec3 {
        let w = |s: f64| libm::sqrt((s * s * s * s + t * t) / (2.0 * s * s));
        Vec3::new(w(self.a), w(self.b), w(self.c))
    }

    fn offset(&self, pt: &SpaceTimePoint) -> Vec3 {
        Vec3::new(pt.x + self.x1 - self.u * pt.t, pt.y, pt.z)
    }

    /// `s²` and `s⁴ + t²` for each axis.
    fn axis_terms(&self, t: f64) -> ([f64; 3], [f64; 3]) {
        let sq = [self.a * self.a, self.b * self.b, self.c * self.c];
        let den = [sq[0] * sq[0] + t * t, sq[1] * sq[1] + t * t, sq[2] * sq[2] + t * t];
        (sq, den)
    }

    fn log_rho(&self, d: Vec3, sq: &[f64; 3], den: &[f64; 3]) -> f64 {
        let norm = libm::log(self.a) + libm::log(self.b) + libm::log(self.c) - 1.5 * libm::log(PI);
        let mut lr = norm;
        for k in 0..3 {
            lr -= 0.5 * libm::log(den[k]) + sq[k] * d[k] * d[k] / den[k];
        }
        lr
    }

    /// Phase `S`, including the spatially constant term `-½ arg((a²+it)(b²+it)(c²+it))`.
    ///
    /// The constant is taken on the continuous branch that matches principal
    /// square roots of each factor, so it stays consistent with
    /// [`Amplitude::psi`] when `p < 0`.
    pub fn phase(&self, pt: SpaceTimePoint) -> f64 {
        let t = pt.t;
        let (sq, den) = self.axis_terms(t);
        let d = self.offset(&pt);
        let gouy = 0.5 * (libm::atan2(t, sq[0]) + libm::atan2(t, sq[1]) + libm::atan2(t, sq[2]));
        let mut s = self.u * pt.x - 0.5 * self.u * self.u * t - gouy;
        for k in 0..3 {
            s += t * d[k] * d[k] / (2.0 * den[k]);
        }
        s
    }
}

impl PolarSource for AsymmetricPacket {
    fn polar_fields(&self, pt: SpaceTimePoint) -> PolarFields {
        let t = pt.t;
        let (sq, den) = self.axis_terms(t);
        let d = self.offset(&pt);
        let rho = libm::exp(self.log_rho(d, &sq, &den));

        let mut grad_log = [0.0; 3];
        let mut grad_s = [0.0; 3];
        let mut dlog_rho = 0.0;
        let velocity = [self.u, 0.0, 0.0];
        for k in 0..3 {
            grad_log[k] = -2.0 * sq[k] * d[k] / den[k];
            grad_s[k] = velocity[k] + t * d[k] / den[k];
            // ∂t of -½ ln(s⁴+t²) - s² d²/(s⁴+t²), with ∂t d = -velocity
            dlog_rho += -t / den[k]
                - sq[k] * (-2.0 * d[k] * velocity[k] * den[k] - 2.0 * t * d[k] * d[k])
                    / (den[k] * den[k]);
        }

        PolarFields {
            rho,
            grad_rho: Vec3::from(grad_log) * rho,
            grad_s: Vec3::from(grad_s),
            drho_dt: rho * dlog_rho,
        }
    }
}

impl Amplitude for AsymmetricPacket {
    /// Direct complex evaluation with `α = (a² + it)^{1/2}` etc. on the
    /// principal branch; the Gaussian exponents use `α²` without a root.
    fn psi(&self, pt: SpaceTimePoint) -> ComplexAmplitude {
        let t = pt.t;
        let d = self.offset(&pt);
        let alpha_sq = Complex64::new(self.a * self.a, t);
        let beta_sq = Complex64::new(self.b * self.b, t);
        let gamma_sq = Complex64::new(self.c * self.c, t);

        let exponent = Complex64::new(0.0, self.u * pt.x - 0.5 * self.u * self.u * t)
            - d.x * d.x / (2.0 * alpha_sq)
            - d.y * d.y / (2.0 * beta_sq)
            - d.z * d.z / (2.0 * gamma_sq);
        let roots = alpha_sq.sqrt() * beta_sq.sqrt() * gamma_sq.sqrt();
        // (a²b²c²/π³)^{1/4}, kept in log form with the Gaussian exponent
        let log_norm =
            0.5 * (libm::log(self.a) + libm::log(self.b) + libm::log(self.c)) - 0.75 * libm::log(PI);
        let psi = (exponent + log_norm - roots.ln()).exp();
        psi.into()
    }
}

/// Either packet family behind one type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Packet {
    Symmetric(SymmetricPacket),
    Asymmetric(AsymmetricPacket),
}

impl Packet {
    pub fn u(&self) -> f64 {
        match self {
            Packet::Symmetric(p) => p.u(),
            Packet::Asymmetric(p) => p.u(),
        }
    }

    /// The same packet with a different group velocity.
    pub fn with_velocity(&self, u: f64) -> Result<Packet, PacketError> {
        Ok(match self {
            Packet::Symmetric(p) => Packet::Symmetric(SymmetricPacket::new(p.sigma0, u)?),
            Packet::Asymmetric(p) => {
                Packet::Asymmetric(AsymmetricPacket::new(p.a, p.b, p.c, p.x1, u)?)
            }
        })
    }

    pub fn density_center(&self, t: f64) -> Vec3 {
        match self {
            Packet::Symmetric(p) => p.density_center(t),
            Packet::Asymmetric(p) => p.density_center(t),
        }
    }

    pub fn density_widths(&self, t: f64) -> Vec3 {
        match self {
            Packet::Symmetric(p) => p.density_widths(t),
            Packet::Asymmetric(p) => p.density_widths(t),
        }
    }
}

impl From<SymmetricPacket> for Packet {
    fn from(p: SymmetricPacket) -> Self {
        Packet::Symmetric(p)
    }
}

impl From<AsymmetricPacket> for Packet {
    fn from(p: AsymmetricPacket) -> Self {
        Packet::Asymmetric(p)
    }
}

impl PolarSource for Packet {
    fn polar_fields(&self, pt: SpaceTimePoint) -> PolarFields {
        match self {
            Packet::Symmetric(p) => p.polar_fields(pt),
            Packet::Asymmetric(p) => p.polar_fields(pt),
        }
    }
}

impl Amplitude for Packet {
    fn psi(&self, pt: SpaceTimePoint) -> ComplexAmplitude {
        match self {
            Packet::Symmetric(p) => p.psi(pt),
            Packet::Asymmetric(p) => p.psi(pt),
        }
    }
}
