use bigpast::baselines::{ad_region, cg_region, crawford_t_region, z_region, GaussianSummary};
use bigpast::mh::truncated_step;
use bigpast::rng::rng_from_seed;
use bigpast::simlab::{gen_subjects_ratio, gen_subjects_tail_uniform, ConfusionCounts, NegativeSource};
use bigpast::single_subject::{np_region, RegionFit};
use bigpast::special::{inv_reg_inc_beta, reg_inc_beta, student_t_cdf, student_t_quantile};
use bigpast::{skewt, Alternative, Sample, SkewTParams};
use proptest::prelude::*;

fn alternative() -> impl Strategy<Value = Alternative> {
    prop_oneof![Just(Alternative::TwoSided), Just(Alternative::Less), Just(Alternative::Greater)]
}

fn sample(n: usize, seed: u64) -> Sample {
    let p = SkewTParams::new(-2.0, 5.0, 1.0, 2.0).unwrap();
    Sample::new(skewt::sample(&p, n, seed).unwrap()).unwrap()
}

fn regions(data: &Sample, beta: f64, alt: Alternative) -> Vec<RegionFit> {
    let g = GaussianSummary::from_sample(data).unwrap();
    vec![
        z_region(&g, beta, alt).unwrap(),
        crawford_t_region(&g, beta, alt).unwrap(),
        np_region(data, beta, alt).unwrap(),
        ad_region(data, beta, alt).unwrap(),
        cg_region(data, beta, alt, 2000, 5).unwrap(),
    ]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incomplete_beta_round_trip(a in 0.2f64..30.0, b in 0.2f64..30.0, p in 1e-6f64..(1.0 - 1e-6)) {
        let x = inv_reg_inc_beta(a, b, p).unwrap();
        prop_assert!((reg_inc_beta(a, b, x).unwrap() - p).abs() < 1e-9 * p.max(1e-3));
        // Reflection: I_x(a, b) = 1 − I_{1−x}(b, a).
        let y = 0.37;
        prop_assert!((reg_inc_beta(a, b, y).unwrap() + reg_inc_beta(b, a, 1.0 - y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn student_t_quantile_inverts_cdf(df in 0.5f64..500.0, p in 1e-6f64..(1.0 - 1e-6)) {
        let x = student_t_quantile(p, df).unwrap();
        prop_assert!((student_t_cdf(x, df).unwrap() - p).abs() < 1e-9 * p.min(1.0 - p).max(1e-4));
        prop_assert!((student_t_quantile(1.0 - p, df).unwrap() + x).abs() < 1e-8 * (1.0 + x.abs()));
    }

    #[test]
    fn skewt_quantile_inverts_cdf(alpha in -20.0f64..20.0, nu in 1.0f64..60.0, p in 1e-4f64..(1.0 - 1e-4)) {
        let d = SkewTParams::standard(alpha, nu).unwrap();
        let x = skewt::quantile(p, &d).unwrap();
        prop_assert!((skewt::cdf(x, &d).unwrap() - p).abs() < 1e-8);
        // Reflecting α reflects the distribution.
        let m = SkewTParams::standard(-alpha, nu).unwrap();
        prop_assert!((skewt::quantile(1.0 - p, &m).unwrap() + x).abs() < 1e-6 * (1.0 + x.abs()));
    }

    #[test]
    fn truncated_proposals_stay_positive(old in 1e-8f64..1e4, delta in 0.01f64..10.0, u in 1e-12f64..(1.0 - 1e-12)) {
        let (new, corr) = truncated_step(old, delta, u).unwrap();
        prop_assert!(new > 0.0 && new.is_finite());
        prop_assert!(corr.is_finite());
    }

    #[test]
    fn decisions_match_intervals(seed in 0u64..1000, beta in 0.02f64..0.3, alt in alternative(), x in -30.0f64..30.0) {
        let data = sample(120, seed);
        for r in regions(&data, beta, alt) {
            let t = r.decide(x);
            prop_assert_eq!(t.reject, !(x >= t.interval.lo && x <= t.interval.hi));
            prop_assert!(t.interval.lo <= t.interval.hi);
            match alt {
                Alternative::Less => prop_assert!(t.interval.hi == f64::INFINITY),
                Alternative::Greater => prop_assert!(t.interval.lo == f64::NEG_INFINITY),
                Alternative::TwoSided => prop_assert!(t.interval.lo.is_finite() && t.interval.hi.is_finite()),
            }
        }
    }

    #[test]
    fn larger_beta_gives_nested_intervals(seed in 0u64..1000, b1 in 0.02f64..0.2, gap in 0.01f64..0.2, alt in alternative()) {
        let data = sample(120, seed);
        let b2 = b1 + gap;
        for (wide, narrow) in regions(&data, b1, alt).into_iter().zip(regions(&data, b2, alt)) {
            prop_assert!(wide.interval.lo <= narrow.interval.lo + 1e-12, "{:?}", wide.method);
            prop_assert!(wide.interval.hi >= narrow.interval.hi - 1e-12, "{:?}", wide.method);
        }
    }

    #[test]
    fn affine_equivariance(seed in 0u64..1000, scale in 0.01f64..100.0, shift in -50.0f64..50.0, alt in alternative()) {
        let data = sample(60, seed);
        let moved = Sample::new(data.values().iter().map(|x| shift + scale * x).collect()).unwrap();
        for (a, b) in regions(&data, 0.05, alt).into_iter().zip(regions(&moved, 0.05, alt)) {
            for (x, y) in [(a.interval.lo, b.interval.lo), (a.interval.hi, b.interval.hi)] {
                let mapped = shift + scale * x;
                prop_assert!(close(mapped, y, 1e-6), "{:?}: {} vs {}", a.method, mapped, y);
            }
        }
    }

    #[test]
    fn generated_labels_match_true_regions(seed in 0u64..1000, alt in alternative(), beta in 0.02f64..0.2) {
        let truth = SkewTParams::new(-3.23, 7.0, 0.5, 1.5).unwrap();
        let subjects = gen_subjects_ratio(&truth, 30, 30, beta, alt, NegativeSource::Band, &mut rng_from_seed(seed)).unwrap();
        let (a, b) = match alt {
            Alternative::TwoSided => (beta / 2.0, beta / 2.0),
            Alternative::Less => (beta, 0.0),
            Alternative::Greater => (0.0, beta),
        };
        let mut counts = ConfusionCounts::default();
        for s in &subjects {
            let u = skewt::cdf(s.value, &truth).unwrap();
            let reject = u <= a || u >= 1.0 - b;
            counts.record(s.positive, reject);
        }
        // The true-CDF decision rule is a perfect oracle.
        prop_assert_eq!(counts.total(), 60);
        prop_assert_eq!(counts.acc(), Some(1.0));
    }

    #[test]
    fn tail_uniform_oracle_is_perfect(seed in 0u64..1000) {
        let truth = SkewTParams::new(10.0, 10.0, -2.0, 2.0).unwrap();
        let subjects = gen_subjects_tail_uniform(&truth, 40, 40, &mut rng_from_seed(seed)).unwrap();
        let mut counts = ConfusionCounts::default();
        for s in &subjects {
            let u = skewt::cdf(s.value, &truth).unwrap();
            counts.record(s.positive, !(0.025..=0.975).contains(&u));
        }
        prop_assert_eq!(counts.acc(), Some(1.0));
        prop_assert_eq!(counts.tp + counts.fn_, 40);
    }
}
