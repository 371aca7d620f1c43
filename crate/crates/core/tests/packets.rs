use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinarrival_core::oracle::{normalization, observed_order};
use spinarrival_core::{Amplitude, AsymmetricPacket, Packet, PolarFields, PolarSource, SpaceTimePoint, SymmetricPacket, Vec3};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn vec_rel(a: Vec3, b: Vec3) -> f64 {
    (a - b).max_abs() / a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
}

/// Polar fields rebuilt from central differences of `ψ` alone.
fn fields_from_psi<A: Amplitude>(amp: &A, pt: SpaceTimePoint, h: f64) -> PolarFields {
    let c = amp.psi(pt);
    let rho = c.norm_sqr();
    let mut grad_rho = [0.0; 3];
    let mut grad_s = [0.0; 3];
    for k in 0..3 {
        let p = amp.psi(pt.shifted(k, h));
        let m = amp.psi(pt.shifted(k, -h));
        let d_re = (p.re - m.re) / (2.0 * h);
        let d_im = (p.im - m.im) / (2.0 * h);
        grad_rho[k] = (p.norm_sqr() - m.norm_sqr()) / (2.0 * h);
        grad_s[k] = (c.re * d_im - c.im * d_re) / rho;
    }
    let drho_dt = (amp.psi(pt.with_time(pt.t + h)).norm_sqr() - amp.psi(pt.with_time(pt.t - h)).norm_sqr()) / (2.0 * h);
    PolarFields {
        rho,
        grad_rho: grad_rho.into(),
        grad_s: grad_s.into(),
        drho_dt,
    }
}

fn assert_fields_close(analytic: &PolarFields, numeric: &PolarFields, tol: f64) {
    assert!(rel(analytic.rho, numeric.rho) < 1e-12, "rho {analytic:?} vs {numeric:?}");
    assert!(vec_rel(analytic.grad_rho, numeric.grad_rho) < tol, "grad_rho {analytic:?} vs {numeric:?}");
    assert!(vec_rel(analytic.grad_s, numeric.grad_s) < tol, "grad_s {analytic:?} vs {numeric:?}");
    assert!(rel(analytic.drho_dt, numeric.drho_dt) < tol, "drho_dt {analytic:?} vs {numeric:?}");
}

#[test]
fn symmetric_fields_match_finite_differences_of_psi() {
    let p = SymmetricPacket::new(0.01, 1.0).unwrap();
    let pt = SpaceTimePoint::new(1.0, 1.0, 1.0, 1.0);
    assert_fields_close(&p.polar_fields(pt), &fields_from_psi(&p, pt, 1e-6), 1e-5);
}

#[test]
fn asymmetric_fields_match_finite_differences_of_psi() {
    let p = AsymmetricPacket::new(0.001, 0.4, 0.01, 0.0, 2.0).unwrap();
    let pt = SpaceTimePoint::new(1.0, 2.0, 1.0, 0.4);
    assert_fields_close(&p.polar_fields(pt), &fields_from_psi(&p, pt, 1e-6), 1e-5);
}

#[test]
fn gradients_converge_at_second_order() {
    let cases: [(Packet, SpaceTimePoint, f64); 2] = [
        (
            SymmetricPacket::new(0.3, 1.0).unwrap().into(),
            SpaceTimePoint::new(0.6, 0.2, -0.3, 0.5),
            0.02,
        ),
        (
            AsymmetricPacket::new(0.3, 0.5, 0.4, 0.2, 1.5).unwrap().into(),
            SpaceTimePoint::new(0.4, 0.3, 0.2, 0.6),
            0.02,
        ),
    ];
    for (packet, pt, h) in cases {
        let exact = packet.polar_fields(pt);
        let coarse = fields_from_psi(&packet, pt, h);
        let fine = fields_from_psi(&packet, pt, h / 2.0);
        let orders = [
            observed_order(
                (coarse.grad_rho - exact.grad_rho).max_abs(),
                (fine.grad_rho - exact.grad_rho).max_abs(),
            ),
            observed_order(
                (coarse.grad_s - exact.grad_s).max_abs(),
                (fine.grad_s - exact.grad_s).max_abs(),
            ),
            observed_order((coarse.drho_dt - exact.drho_dt).abs(), (fine.drho_dt - exact.drho_dt).abs()),
        ];
        for order in orders {
            assert!(order >= 1.9, "{packet:?}: order {order}");
        }
    }
}

#[test]
fn psi_symmetric_matches_high_precision_oracle() {
    // 40-digit evaluation of R·(cos S, sin S)
    let p = SymmetricPacket::new(0.01, 5.0).unwrap();
    let psi = p.psi(SpaceTimePoint::new(1.0, 0.0, 0.0, 0.2));
    assert!(rel(psi.re, 0.007_884_311_387_647_142_542) < 1e-10, "{psi:?}");
    assert!(rel(psi.im, 0.001_153_765_416_591_998_764) < 1e-9, "{psi:?}");
}

#[test]
fn psi_asymmetric_matches_high_precision_oracle() {
    // 40-digit complex evaluation of the propagated product Gaussian
    let p = AsymmetricPacket::new(0.001, 0.4, 0.01, 0.0, 2.0).unwrap();
    let psi = p.psi(SpaceTimePoint::new(1.0, 2.0, 1.0, 0.4));
    assert!(rel(psi.re, -3.902_290_884_026_221_991e-5) < 1e-9, "{psi:?}");
    assert!(rel(psi.im, -5.741_733_531_400_961_391e-4) < 1e-10, "{psi:?}");
}

#[test]
fn asymmetric_modulus_matches_real_form_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let p = AsymmetricPacket::new(
            rng.gen_range(0.01..1.0),
            rng.gen_range(0.01..1.0),
            rng.gen_range(0.01..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-3.0..10.0),
        )
        .unwrap();
        let t = rng.gen_range(0.0..3.0);
        let c = p.density_center(t);
        let w = p.density_widths(t);
        let pt = SpaceTimePoint::new(
            c.x + w.x * rng.gen_range(-3.0..3.0),
            c.y + w.y * rng.gen_range(-3.0..3.0),
            c.z + w.z * rng.gen_range(-3.0..3.0),
            t,
        );
        let rho = p.polar_fields(pt).rho;
        assert!(rel(p.psi(pt).norm_sqr(), rho) < 1e-10, "{p:?} at {pt:?}");
    }
}

#[test]
fn densities_are_normalized() {
    let packets: [Packet; 4] = [
        SymmetricPacket::new(0.01, 1.0).unwrap().into(),
        SymmetricPacket::new(0.7, -2.0).unwrap().into(),
        AsymmetricPacket::new(0.001, 0.4, 0.01, 0.0, 3.0).unwrap().into(),
        AsymmetricPacket::new(0.3, 1.1, 0.6, 0.8, 1.0).unwrap().into(),
    ];
    for p in packets {
        for t in [0.0, 0.5, 2.0] {
            // mismatched scale
            let w = p.density_widths(t) * 1.3;
            let total = normalization(&p, t, p.density_center(t), w, 40);
            assert!((total - 1.0).abs() < 1e-8, "{p:?} at t={t}: {total}");
        }
    }
}

#[test]
fn density_depends_on_x_only_through_x_minus_ut() {
    let moving = SymmetricPacket::new(0.4, 2.5).unwrap();
    let still = SymmetricPacket::new(0.4, 0.0).unwrap();
    for (x, y, z, t) in [(0.3, 0.1, -0.2, 0.0), (1.4, -0.5, 0.3, 0.8), (5.0, 0.2, 0.2, 2.0)] {
        let a = moving.polar_fields(SpaceTimePoint::new(x, y, z, t)).rho;
        let b = still.polar_fields(SpaceTimePoint::new(x - 2.5 * t, y, z, t)).rho;
        assert!(rel(a, b) < 1e-14);
    }
}

proptest! {
    #[test]
    fn spread_is_even_and_non_decreasing(sigma0 in 1e-3f64..10.0, t in 0.0f64..100.0, dt in 0.0f64..10.0) {
        let p = SymmetricPacket::new(sigma0, 0.0).unwrap();
        prop_assert_eq!(p.sigma_of_t(t), p.sigma_of_t(-t));
        prop_assert!(p.sigma_of_t(t + dt) >= p.sigma_of_t(t));
        prop_assert!(p.sigma_of_t(t) >= sigma0);
    }

    #[test]
    fn symmetric_modulus_identity(
        sigma0 in 0.05f64..2.0,
        u in -5.0f64..5.0,
        x in -3.0f64..3.0,
        y in -3.0f64..3.0,
        z in -3.0f64..3.0,
        t in -2.0f64..4.0,
    ) {
        let p = SymmetricPacket::new(sigma0, u).unwrap();
        let pt = SpaceTimePoint::new(x, y, z, t);
        let rho = p.polar_fields(pt).rho;
        prop_assert!(rel(p.psi(pt).norm_sqr(), rho) < 1e-12);
        prop_assert!(rho >= 0.0);
    }

    #[test]
    fn reduction_holds_pointwise(
        sigma0 in 0.05f64..2.0,
        u in -5.0f64..5.0,
        x in -3.0f64..3.0,
        y in -3.0f64..3.0,
        z in -3.0f64..3.0,
        t in 0.0f64..4.0,
    ) {
        let s = SymmetricPacket::new(sigma0, u).unwrap();
        let a = AsymmetricPacket::matching_symmetric(sigma0, u).unwrap();
        let pt = SpaceTimePoint::new(x, y, z, t);
        let (fs, fa) = (s.polar_fields(pt), a.polar_fields(pt));
        prop_assert!(rel(fs.rho, fa.rho) < 1e-10);
        prop_assert!(vec_rel(fs.grad_rho, fa.grad_rho) < 1e-10);
        prop_assert!(vec_rel(fs.grad_s, fa.grad_s) < 1e-10);
    }
}
