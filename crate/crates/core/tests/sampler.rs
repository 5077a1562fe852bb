mod common;

use bigpast::mh::{run_chain_with, FreeParams, MhConfig};
use bigpast::single_subject::{run_test, Method};
use bigpast::{Sample, SkewTParams, TestConfig};
use common::{gamma3_cdf, gamma_chain, ks_distance};

#[test]
fn one_dimensional_chain_recovers_its_target() {
    for seed in [1, 2] {
        let d = ks_distance(&gamma_chain(seed), gamma3_cdf);
        assert!(d < 0.02, "seed {seed}: KS {d}");
    }
}

#[test]
fn ks_check_detects_boundary_bias() {
    // Skipping the Hastings correction leaves the chain on π(ν)·Φ(ν/δ).
    // Feeding the sampler π/Φ instead must fail the same KS check, or
    // the check above could not see a missing correction.
    let cfg = MhConfig { m0: 400_000, burn_in: 0.05, step: 2.0, seed: 1, ..MhConfig::default() };
    let free = FreeParams { alpha: false, nu: true, xi: false, omega: false };
    let init = SkewTParams::new(0.0, 3.0, 0.0, 1.0).unwrap();
    let lnphi = |x: f64| bigpast::special::ln_normal_cdf(x / 2.0);
    let biased = run_chain_with(|p| Ok(2.0 * p.nu.ln() - p.nu - lnphi(p.nu)), init, &cfg, free).unwrap();
    assert!(ks_distance(&biased.component(|p| p.nu), gamma3_cdf) > 0.02);
}

#[test]
fn mh_test_is_reproducible() {
    let truth = SkewTParams::new(2.0, 5.0, 0.0, 1.0).unwrap();
    let data = Sample::new(bigpast::skewt::sample(&truth, 80, 3).unwrap()).unwrap();
    let cfg = TestConfig { m0: 3000, seed: 11, ..TestConfig::default() };
    let a = run_test(Method::Mh, 1.0, &data, &cfg).unwrap();
    let b = run_test(Method::Mh, 1.0, &data, &cfg).unwrap();
    assert_eq!(a, b);
    let c = run_test(Method::Mh, 1.0, &data, &TestConfig { seed: 12, ..cfg }).unwrap();
    assert_ne!(a.interval, c.interval);
    let acc = a.chain_acceptance.unwrap();
    assert!(acc > 0.0 && acc < 1.0);
}
