use laborcast_core::cointegration::{johansen_columns, JohansenTrend};
use laborcast_core::critical::Significance;
use laborcast_core::evaluate::{naive_rmsfe, r_squared, rmsfe};
use laborcast_core::forecast::{project, ForecastScenario};
use laborcast_core::lagmodel::{DriverTransform, PiecewiseLagModel, Segment};
use laborcast_core::linalg::Matrix;
use laborcast_core::regress::{long_run_variance, ols};
use laborcast_core::series::{cumulative, diff, lag_shift, moving_average};
use laborcast_core::unitroot::{adf, dfgls, pp, Deterministic};
use laborcast_core::{Error, Period, Series};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn walk(seed: u64, n: usize) -> Vec<f64> {
    let mut acc = 0.0;
    normals(seed, n).into_iter().map(|e| { acc += e; acc }).collect()
}

fn annual(values: &[f64]) -> Series {
    Series::from_values("s", Period::annual(1950), values).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diff_of_cumulative_reproduces_the_series(v in prop::collection::vec(-10.0f64..10.0, 2..40), base in 0usize..5) {
        let s = annual(&v);
        let base = base.min(v.len() - 2);
        let c = cumulative(&s, s.period_at(base)).unwrap();
        let d = diff(&c).unwrap();
        for (t, x) in d.iter() {
            let want = s.get(&t).unwrap();
            prop_assert!((x.unwrap() - want).abs() <= 1e-9 * (1.0 + want.abs()) * v.len() as f64);
        }
    }

    #[test]
    fn lag_shift_round_trips(v in prop::collection::vec(-1.0f64..1.0, 2..30), k in -5i64..5) {
        let s = annual(&v);
        prop_assume!((k.unsigned_abs() as usize) < v.len());
        let back = lag_shift(&lag_shift(&s, k).unwrap(), -k).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn moving_average_of_one_is_identity(v in prop::collection::vec(-1.0f64..1.0, 1..30)) {
        let s = annual(&v);
        let m = moving_average(&s, 1).unwrap();
        prop_assert_eq!(m.values(), s.values());
    }

    #[test]
    fn ols_is_scale_equivariant(seed in 0u64..10_000, c in prop::sample::select(vec![-3.0, 0.01, 0.5, 7.0, 1e3])) {
        let e = normals(seed, 60);
        let x1: Vec<f64> = e[..30].to_vec();
        let y: Vec<f64> = (0..30).map(|i| 1.0 + 2.0 * x1[i] + e[30 + i]).collect();
        let x = Matrix::from_columns(&[vec![1.0; 30], x1]).unwrap();
        let a = ols(&y, &x).unwrap();
        let ys: Vec<f64> = y.iter().map(|v| c * v).collect();
        let b = ols(&ys, &x).unwrap();
        for i in 0..2 {
            prop_assert!(close(b.coefficients[i], c * a.coefficients[i], 1e-9));
            prop_assert!(close(b.t_stats[i], c.signum() * a.t_stats[i], 1e-9));
        }
    }

    #[test]
    fn long_run_variance_ignores_sign(u in prop::collection::vec(-5.0f64..5.0, 5..50), bw in 0usize..4) {
        prop_assume!(bw < u.len());
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        prop_assert_eq!(long_run_variance(&u, bw).unwrap(), long_run_variance(&neg, bw).unwrap());
    }

    #[test]
    fn adf_with_constant_is_location_scale_invariant(seed in 0u64..10_000, shift in -100.0f64..100.0, scale in 0.01f64..100.0) {
        let x = walk(seed, 80);
        let y: Vec<f64> = x.iter().map(|v| shift + scale * v).collect();
        for det in [Deterministic::Constant, Deterministic::ConstantAndTrend] {
            let a = adf(&x, det, 2).unwrap().statistic.value;
            let b = adf(&y, det, 2).unwrap().statistic.value;
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn decisions_follow_statistic_and_table(seed in 0u64..10_000) {
        let x = walk(seed, 50);
        for r in [adf(&x, Deterministic::Constant, 1).unwrap(), pp(&x, Deterministic::Constant, 3).unwrap(), dfgls(&x, Deterministic::ConstantAndTrend, 1).unwrap()] {
            for level in Significance::ALL {
                prop_assert_eq!(r.reject_at(level), r.statistic.value < r.statistic.critical.at(level));
            }
        }
    }

    #[test]
    fn johansen_is_order_and_scale_invariant(seed in 0u64..10_000, c in 0.01f64..100.0, lag in 1usize..3) {
        let x = walk(seed, 100);
        let noise = normals(seed + 1_000_000, 100);
        let y: Vec<f64> = x.iter().zip(&noise).map(|(a, e)| 0.7 * a + e).collect();
        for trend in [JohansenTrend::None, JohansenTrend::RConstant] {
            let a = johansen_columns(&[x.clone(), y.clone()], lag, trend).unwrap();
            let b = johansen_columns(&[y.clone(), x.clone()], lag, trend).unwrap();
            let ys: Vec<f64> = y.iter().map(|v| c * v).collect();
            let s = johansen_columns(&[x.clone(), ys], lag, trend).unwrap();
            for i in 0..2 {
                prop_assert!((a.eigenvalues[i] - b.eigenvalues[i]).abs() < 1e-9);
                prop_assert!((a.eigenvalues[i] - s.eigenvalues[i]).abs() < 1e-8);
                prop_assert!((a.eigenvalues[i]) >= 0.0 && a.eigenvalues[i] < 1.0);
                let (ta, tb, ts) = (a.rows[i].trace_stat.unwrap(), b.rows[i].trace_stat.unwrap(), s.rows[i].trace_stat.unwrap());
                prop_assert!((ta - tb).abs() < 1e-9 * (1.0 + ta));
                prop_assert!((ta - ts).abs() < 1e-8 * (1.0 + ta));
                let from_eig: f64 = a.eigenvalues[i..].iter().map(|l| -(a.nobs as f64) * (1.0 - l).ln()).sum();
                prop_assert!((ta - from_eig).abs() < 1e-9 * (1.0 + ta));
                prop_assert!(ta >= 0.0);
            }
        }
    }

    #[test]
    fn metric_symmetry_and_affine_invariance(o in prop::collection::vec(-1.0f64..1.0, 4..30), seed in 0u64..1000, a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let e = normals(seed, o.len());
        let p: Vec<f64> = o.iter().zip(&e).map(|(x, n)| x + 0.1 * n).collect();
        let (os, ps) = (annual(&o), annual(&p));
        prop_assert_eq!(rmsfe(&os, &ps).unwrap(), rmsfe(&ps, &os).unwrap());
        let r = r_squared(&os, &ps);
        prop_assume!(r.is_ok());
        let oa = annual(&o.iter().map(|x| a * x + b).collect::<Vec<_>>());
        let pa = annual(&p.iter().map(|x| a * x + b).collect::<Vec<_>>());
        prop_assert!((r.unwrap() - r_squared(&oa, &pa).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn naive_is_rmsfe_against_the_shifted_series(o in prop::collection::vec(-1.0f64..1.0, 3..30)) {
        let s = annual(&o);
        let shifted = lag_shift(&s, 1).unwrap();
        prop_assert!((naive_rmsfe(&s, 1).unwrap() - rmsfe(&s, &shifted).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn higher_growth_never_lowers_projected_inflation(base in prop::collection::vec(-0.02f64..0.03, 44), bump in prop::collection::vec(0.0f64..0.02, 44), slope in 0.0f64..2.0) {
        let levels = |g: &[f64]| {
            let mut v = vec![4000.0];
            for x in g { let l = *v.last().unwrap(); v.push(l * (1.0 + x)); }
            Series::from_values("lf", Period::annual(2006), &v).unwrap()
        };
        let hi: Vec<f64> = base.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let m = PiecewiseLagModel {
            driver_id: "lf".into(),
            response_id: "cpi".into(),
            driver_transform: DriverTransform::GrowthRate,
            segments: vec![Segment { start: Period::annual(1992), end: None, lag: 1, slope, intercept: 0.006 }],
        };
        let lo_s = ForecastScenario::new("lo", levels(&base)).unwrap();
        let hi_s = ForecastScenario::new("hi", levels(&hi)).unwrap();
        let (from, to) = (Period::annual(2010), Period::annual(2050));
        let a = project(&m, None, &lo_s, from, to).unwrap().inflation;
        let b = project(&m, None, &hi_s, from, to).unwrap().inflation;
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!(y.unwrap() >= x.unwrap() - 1e-15);
        }
        prop_assert_eq!(project(&m, None, &lo_s, from, to).unwrap().inflation, a);
    }
}

#[test]
fn duplicated_regressor_is_reported() {
    let e = normals(3, 20);
    let x = Matrix::from_columns(&[vec![1.0; 20], e.clone(), e.clone()]).unwrap();
    let err = ols(&normals(4, 20), &x).unwrap_err();
    assert!(matches!(err, Error::RankDeficient { .. }), "{err:?}");
}

#[test]
fn all_tests_reject_a_strongly_stationary_series() {
    let e = normals(2024, 500);
    let mut x = vec![0.0; 500];
    for t in 1..500 {
        x[t] = 0.2 * x[t - 1] + e[t];
    }
    assert!(adf(&x, Deterministic::Constant, 2).unwrap().reject_at(Significance::One));
    assert!(pp(&x, Deterministic::Constant, 5).unwrap().reject_at(Significance::One));
    assert!(dfgls(&x, Deterministic::Constant, 2).unwrap().reject_at(Significance::One));
}

/// Rejection rates at 5% on driftless random walks, T = 100.
#[test]
fn dfgls_and_pp_size_on_random_walks() {
    let trials = 400;
    let (mut gls, mut pps) = (0, 0);
    for i in 0..trials {
        let x = walk(10_000 + i, 100);
        gls += dfgls(&x, Deterministic::Constant, 1).unwrap().reject_at(Significance::Five) as usize;
        pps += pp(&x, Deterministic::Constant, 4).unwrap().reject_at(Significance::Five) as usize;
    }
    let rate = |k: usize| k as f64 / trials as f64;
    assert!((0.02..=0.09).contains(&rate(gls)), "dfgls size {}", rate(gls));
    assert!((0.02..=0.09).contains(&rate(pps)), "pp size {}", rate(pps));
}
