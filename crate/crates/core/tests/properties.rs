use proptest::prelude::*;

use polydiv::calibration::{
    bachelier_price, black_price, from_free, implied_black_vol, implied_normal_vol, objective, to_free,
    InstrumentQuote, QuoteKind,
};
use polydiv::ljd::{build_generator, FourFactorParams};
use polydiv::maxent::potential;
use polydiv::poly::{basis_dim, basis_index, moment_formula, poly_multiply, Basis, MultiIndex, Poly};
use polydiv::pricing::{PricingModel, SwapSchedule};
use polydiv::seasonality::{bootstrap_curve, BootstrapOptions};

fn fixture() -> (PricingModel, Vec<f64>) {
    let p = FourFactorParams::fixture();
    (PricingModel::new(p.to_spec().unwrap()).unwrap(), p.x0.to_vec())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn graded_lex_ranks() {
    assert_eq!(basis_index(&MultiIndex::new(vec![0, 0]), 2).unwrap(), 0);
    assert_eq!(basis_index(&MultiIndex::new(vec![1, 0]), 2).unwrap(), 1);
    assert_eq!(basis_index(&MultiIndex::new(vec![0, 2]), 2).unwrap(), 5);
    assert!(basis_index(&MultiIndex::new(vec![2, 1]), 2).is_err());
}

#[test]
fn product_expands_by_hand() {
    let a = Poly::from_coeffs(2, 1, vec![1.0, 2.0, 0.0]);
    let b = Poly::from_coeffs(2, 1, vec![3.0, 0.0, 1.0]);
    // 1, x1, x2, x1², x1x2, x2²
    assert_eq!(poly_multiply(&a, &b).coeffs(), &[3.0, 6.0, 1.0, 0.0, 2.0, 0.0]);
}

#[test]
fn generator_annihilates_constants() {
    let spec = FourFactorParams::fixture().to_spec().unwrap();
    for n in 1..=4 {
        let g = build_generator(&spec, n).unwrap().dense();
        assert!(g.row(0).iter().all(|&v| v == 0.0));
        let m = moment_formula(&build_generator(&spec, n).unwrap(), &spec.x0, 3.0).unwrap();
        assert_eq!(m[0], 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_round_trips(d in 1usize..5, n in 0usize..5, seed in 0usize..10_000) {
        let basis = Basis::new(d, n);
        prop_assert_eq!(basis.len(), basis_dim(d, n));
        let r = seed % basis.len();
        prop_assert_eq!(basis_index(&basis.basis_monomial(r), n).unwrap(), r);
    }

    #[test]
    fn semigroup(s in 0.0f64..5.0, t in 0.0f64..5.0) {
        let spec = FourFactorParams::fixture().to_spec().unwrap();
        let g = build_generator(&spec, 2).unwrap();
        let lhs = g.exp(s + t).unwrap();
        let rhs = g.exp(s).unwrap() * g.exp(t).unwrap();
        let err = (&lhs - &rhs).abs().max() / lhs.abs().max();
        prop_assert!(err < 1e-10, "relative error {}", err);
    }

    #[test]
    fn basis_nesting(dt in 0.0f64..10.0) {
        let spec = FourFactorParams::fixture().to_spec().unwrap();
        let high = moment_formula(&build_generator(&spec, 3).unwrap(), &spec.x0, dt).unwrap();
        let low = moment_formula(&build_generator(&spec, 2).unwrap(), &spec.x0, dt).unwrap();
        for (a, b) in low.iter().zip(&high) {
            prop_assert!(rel(*b, *a) < 1e-10);
        }
    }

    #[test]
    fn black_round_trip(vol in 0.02f64..1.5, t in 0.1f64..10.0, m in 0.5f64..2.0, call in any::<bool>()) {
        let (f, df) = (100.0, 0.9);
        let p = black_price(f, f * m, vol, t, df, call);
        prop_assume!(p - df * if call { f - f * m } else { f * m - f }.max(0.0) > 1e-10 * f);
        let back = implied_black_vol(p, f, f * m, t, df, call).unwrap();
        prop_assert!((back - vol).abs() < 1e-9, "{} vs {}", back, vol);
    }

    #[test]
    fn bachelier_round_trip(vol in 1e-4f64..0.03, t in 0.1f64..10.0, shift in -0.02f64..0.02, call in any::<bool>()) {
        let (f, a) = (0.03, 4.2);
        let k = f + shift;
        let p = bachelier_price(f, k, vol, t, a, call);
        prop_assume!(p - a * if call { f - k } else { k - f }.max(0.0) > 1e-12);
        let back = implied_normal_vol(p, f, k, t, a, call).unwrap();
        prop_assert!((back - vol).abs() < 1e-9, "{} vs {}", back, vol);
    }

    #[test]
    fn potential_is_convex(
        a in prop::collection::vec(-0.5f64..0.5, 3),
        b in prop::collection::vec(-0.5f64..0.5, 3),
        w in 0.0f64..1.0,
    ) {
        let m = [1.0, 0.1, 1.2];
        let la = [a[0], a[1], 0.5 + a[2].abs()];
        let lb = [b[0], b[1], 0.5 + b[2].abs()];
        let mid: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| w * x + (1.0 - w) * y).collect();
        let pa = potential(&m, &la, -12.0, 12.0);
        let pb = potential(&m, &lb, -12.0, 12.0);
        let pm = potential(&m, &mid, -12.0, 12.0);
        prop_assert!(pm <= w * pa + (1.0 - w) * pb + 1e-12 * (pa.abs() + pb.abs()));
    }

    #[test]
    fn free_coordinates_round_trip(u in prop::collection::vec(-3.0f64..3.0, 12)) {
        let p = from_free(&u);
        let back = to_free(&p);
        for (a, b) in u.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn futures_are_additive_and_bonds_bounded(t1 in 0.0f64..10.0, len in 0.01f64..5.0, cut in 0.0f64..1.0) {
        let (m, x) = fixture();
        let t2 = t1 + len;
        let mid = t1 + cut * len;
        let whole = m.dividend_futures(&x, 0.0, t1, t2).unwrap();
        let parts = m.dividend_futures(&x, 0.0, t1, mid).unwrap() + m.dividend_futures(&x, 0.0, mid, t2).unwrap();
        prop_assert!(rel(parts, whole) < 1e-10);
        let b = m.zero_coupon_bond(&x, 0.0, t2).unwrap();
        prop_assert!(b > 0.0 && b <= 1.0);
    }

    #[test]
    fn par_swaps_are_worth_nothing(start in 0.0f64..5.0, tenor in 1usize..15) {
        let (m, x) = fixture();
        let s = SwapSchedule::regular(start, tenor as f64, 1.0).unwrap();
        let k = m.forward_swap_rate(&x, 0.0, &s).unwrap();
        prop_assert!(m.swap_value(&x, 0.0, &s, k).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bootstrap_reprices_every_bucket(
        targets in prop::collection::vec(0.005f64..0.05, 1..6),
        raw in prop::collection::vec(0.0f64..1.0, 1..13),
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 0.1);
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let opts = BootstrapOptions { points_per_year: 24, ..BootstrapOptions::default() };
        let c = bootstrap_curve(&targets, &w, &opts).unwrap();
        for (k, v) in c.bucket_integrals().iter().enumerate() {
            let target = w[k % w.len()] * targets[k / w.len()];
            prop_assert!((v - target).abs() <= 1e-10 * targets[k / w.len()]);
        }
        prop_assert!(c.kkt_residual < 1e-8);
    }
}

fn rate_quotes() -> Vec<InstrumentQuote> {
    let mut qs: Vec<InstrumentQuote> = (0..8)
        .map(|i| InstrumentQuote::new(QuoteKind::DivFuture, i as f64, i as f64 + 1.0, None, 0.02 - 0.001 * i as f64))
        .collect();
    for (t, r) in [(1.0, 0.021), (2.0, 0.024), (5.0, 0.03), (10.0, 0.034)] {
        qs.push(InstrumentQuote::new(QuoteKind::SwapRate, 0.0, t, None, r));
    }
    qs.push(InstrumentQuote::new(QuoteKind::IndexLevel, 0.0, 0.0, None, 0.45));
    qs
}

#[test]
fn objective_ignores_order_and_scales_with_weights() {
    let p = FourFactorParams::fixture();
    let qs = rate_quotes();
    let base = objective(&p, &qs, 4);
    let mut rev = qs.clone();
    rev.reverse();
    assert!(rel(objective(&p, &rev, 4), base) < 1e-14);
    let scaled: Vec<InstrumentQuote> = qs
        .iter()
        .map(|q| InstrumentQuote {
            weight: Some(3.0 * q.effective_weight()),
            ..q.clone()
        })
        .collect();
    assert!(rel(objective(&p, &scaled, 4), 3.0 * base) < 1e-12);
}

#[test]
fn objective_moves_by_weight_times_square() {
    let p = FourFactorParams::fixture();
    let mut qs = rate_quotes();
    let values = polydiv::calibration::model_values(&p, &qs, 4).unwrap();
    for (q, v) in qs.iter_mut().zip(values) {
        q.value = v;
    }
    assert!(objective(&p, &qs, 4) < 1e-20);
    qs[9].value += 1e-4;
    assert!(rel(objective(&p, &qs, 4), 1.0) < 1e-6);
}
