//! Arrival-time distributions of free spin-1/2 particles.
//!
//! The probability current of a spin-1/2 particle in the non-relativistic
//! limit of the Dirac equation splits into a convective part `ρ∇S/m` and a
//! divergence-free spin part `(∇ρ × s)/m`. Both enter the arrival-time
//! density `|J(X, t)|` at a point detector `X`, so the mean arrival time of a
//! free particle carries a measurable spin signature.
//!
//! This crate evaluates two analytic families of time-evolved Gaussian
//! packets ([`packets`]), builds the decomposed current ([`currents`]),
//! integrates the mean arrival times over `[0, ∞)` ([`quadrature`],
//! [`arrival`]) and ships brute-force validators ([`oracle`]).
//!
//! All quantities are in natural units `ħ = m = 1`. To convert to SI, lengths
//! scale with an arbitrary unit `L`, times with `m L² / ħ`, velocities with
//! `ħ / (m L)` and densities with `L⁻³`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod arrival;
pub mod currents;
pub mod oracle;
pub mod packets;
pub mod quadrature;
mod vec3;

pub use arrival::{
    arrival_density, arrival_summary, mean_arrival, ArrivalError, ArrivalSummary,
    ComponentSelector, Detector, MeanArrival,
};
pub use currents::{
    current_asymmetric, current_from_polar, current_numeric, current_symmetric, default_step,
    CurrentSample, CurrentSource, FiniteDifferenceError, NumericCurrent, PolarCurrent, SpinError,
    SpinVector,
};
pub use packets::{
    Amplitude, AsymmetricPacket, ComplexAmplitude, Packet, PacketError, PolarFields, PolarSource,
    SpaceTimePoint, SymmetricPacket,
};
pub use quadrature::{
    adaptive_panel, integrate_semi_infinite, integrate_semi_infinite_many, IntegralResult,
    NonConvergence, QuadratureConfig, QuadratureError,
};
pub use vec3::Vec3;
