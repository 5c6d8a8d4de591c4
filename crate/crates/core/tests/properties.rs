use nse_lab::bilinear::{bilinear_fft, BilinearWorkspace};
use nse_lab::ledger::{build_table, LedgerConstants, LedgerOptions, TableMode};
use nse_lab::sigma_class::{c_sigma_norm, NormMode, Scaling};
use nse_lab::spectral::transform::PaddedTransform;
use nse_lab::spectral::{
    from_stream_function, random_field, stream_function, FieldFamily, GridSpec, SpectralField,
    Symmetry, C64,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family() -> impl Strategy<Value = FieldFamily> {
    prop_oneof![
        (0.0..3.0f64, 1.0..8.0f64)
            .prop_map(|(slope, cutoff)| FieldFamily::PowerLaw { slope, cutoff }),
        (1.0..4.0f64, 1.0..4.0f64).prop_map(|(lo, w)| FieldFamily::WhiteInShell {
            k_lo: lo,
            k_hi: lo + w
        }),
        prop::sample::select(vec![1i64, 2, 5, 8, 13, 25])
            .prop_map(|k_sq| FieldFamily::SingleShell { k_sq }),
    ]
}

fn symmetry() -> impl Strategy<Value = Symmetry> {
    prop_oneof![Just(Symmetry::Real), Just(Symmetry::Complex)]
}

fn field(len: f64, fam: FieldFamily, sym: Symmetry, seed: u64) -> SpectralField {
    let grid = GridSpec::new(len, 6).unwrap();
    random_field(grid, fam, sym, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(len in 1.0..10.0f64, fam in family(), sym in symmetry(), seed: u64) {
        let u = field(len, fam, sym, seed);
        let g = *u.grid();
        let m = g.padded();
        let mut t = PaddedTransform::new(g.k_max(), m);
        let mut energy = 0.0;
        for d in 0..2 {
            let spec: Vec<C64> = u.coeffs().iter().map(|c| c[d]).collect();
            let mut phys = vec![C64::new(0.0, 0.0); m * m];
            t.synthesize(&spec, &mut phys);
            energy += phys.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let physical = energy * len * len / (m * m) as f64;
        prop_assert!(close(physical, u.norm().powi(2), 1e-12));
    }

    #[test]
    fn powers_compose(fam in family(), sym in symmetry(), seed: u64, a in -2.0..3.0f64, b in -2.0..3.0f64) {
        let u = field(2.0, fam, sym, seed);
        let two = u.apply_power(a).apply_power(b);
        let one = u.apply_power(a + b);
        let diff = two.axpy(C64::new(-1.0, 0.0), &one).unwrap().norm();
        prop_assert!(diff <= 1e-12 * one.norm());
        prop_assert!(close(u.apply_power(a / 2.0).norm(), u.sobolev_norm(a), 1e-12));
    }

    #[test]
    fn powers_are_self_adjoint(fam in family(), sym in symmetry(), s1: u64, s2: u64, a in 0.0..4.0f64) {
        let u = field(3.0, fam, sym, s1);
        let v = field(3.0, fam, sym, s2);
        let lhs = u.apply_power(a).inner(&v).unwrap();
        let rhs = u.inner(&v.apply_power(a)).unwrap();
        let scale = u.apply_power(a).norm() * v.norm();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn poincare_chain(len in 0.5..12.0f64, fam in family(), seed: u64, a in 0.0..4.0f64, gap in 0.0..3.0f64) {
        let u = field(len, fam, Symmetry::Real, seed);
        let k0 = u.grid().kappa0();
        prop_assert!(u.sobolev_norm(a) * k0.powf(gap) <= u.sobolev_norm(a + gap) * (1.0 + 1e-12));
    }

    #[test]
    fn stream_function_roundtrip(fam in family(), sym in symmetry(), seed: u64) {
        let u = field(4.0, fam, sym, seed);
        let back = from_stream_function(*u.grid(), &stream_function(&u), sym).unwrap();
        prop_assert!(back.axpy(C64::new(-1.0, 0.0), &u).unwrap().norm() <= 1e-13 * u.norm());
    }

    #[test]
    fn sigma_norm_decreases_in_sigma(fam in family(), seed: u64, s in 0.05..2.0f64, ds in 0.01..2.0f64) {
        let u = field(2.0 * std::f64::consts::PI, fam, Symmetry::Real, seed);
        for mode in [NormMode::Integer, NormMode::Continuous] {
            let lo = c_sigma_norm(&u, s, mode, Scaling::Raw).unwrap();
            let hi = c_sigma_norm(&u, s + ds, mode, Scaling::Raw).unwrap();
            prop_assert!(hi.value <= lo.value * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sigma_norm_scales_linearly(fam in family(), seed: u64, s in 0.05..2.0f64, lambda in 1e-3..1e3f64) {
        let u = field(2.0 * std::f64::consts::PI, fam, Symmetry::Real, seed);
        let scaled = u.scaled(C64::new(lambda, 0.0));
        for mode in [NormMode::Integer, NormMode::Continuous] {
            let a = c_sigma_norm(&u, s, mode, Scaling::Raw).unwrap().value;
            let b = c_sigma_norm(&scaled, s, mode, Scaling::Raw).unwrap().value;
            prop_assert!(close(b, lambda * a, 1e-10));
        }
    }

    #[test]
    fn bilinear_is_bilinear(fam in family(), sym in symmetry(), s1: u64, s2: u64, a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let u = field(2.0, fam, sym, s1);
        let v = field(2.0, fam, sym, s2);
        let mut ws = BilinearWorkspace::new(u.grid());
        let lhs = ws.eval(&u.scaled(C64::new(a, 0.0)), &v.scaled(C64::new(b, 0.0))).unwrap();
        let rhs = bilinear_fft(&u, &v).unwrap().scaled(C64::new(a * b, 0.0));
        let scale = rhs.norm().max(u.sobolev_norm(1.0) * v.sobolev_norm(1.0) * (a * b).abs() * 1e-3);
        prop_assert!(lhs.axpy(C64::new(-1.0, 0.0), &rhs).unwrap().norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn ledger_rows_grow(g in 0.7..50.0f64) {
        let c = LedgerConstants::new(1.0, 1.0, g).unwrap();
        let opts = LedgerOptions { alpha_max: 20, ..Default::default() };
        for mode in [TableMode::ConditionalFixedStrip, TableMode::ConditionalShrinking] {
            let t = build_table(mode, &c, &opts).unwrap();
            for r in t.rows.iter().filter(|r| r.alpha >= 4) {
                prop_assert!(r.step_ln.unwrap() > 0.0);
                prop_assert!(r.rt_sq_ln <= r.envelope_ln.unwrap());
            }
        }
    }
}
