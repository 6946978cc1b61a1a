use nlsd_core::bootstrap::{bootstrap_local_power, bootstrap_null, estimate, plug_in_statistic, BootstrapConfig, RebuildMode};
use nlsd_core::dist::{chi2_cdf, ErrorDistribution};
use nlsd_core::gcov::AlternativeDirection;
use nlsd_core::{derive_seed, gcov_fit, GcovConfig, ModelSpec, TransformSet};

fn transforms() -> TransformSet {
    TransformSet::parse_list("identity,power:2").unwrap()
}

fn ks_chi2(mut v: Vec<f64>, df: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = chi2_cdf(*x, df);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn identical_seeds_give_identical_layers() {
    let spec = ModelSpec::mar(vec![], vec![0.5]).unwrap();
    let y = spec.simulate(ErrorDistribution::StudentT { nu: 5.0 }, 150, None, 4).unwrap().series;
    let cfg = BootstrapConfig { replicates: 30, seed: 77, ..Default::default() };
    let a = bootstrap_null(&spec, &y, &transforms(), 2, &cfg).unwrap();
    let b = bootstrap_null(&spec, &y, &transforms(), 2, &cfg).unwrap();
    assert_eq!(a, b);
    let c = bootstrap_null(&spec, &y, &transforms(), 2, &BootstrapConfig { seed: 78, ..cfg }).unwrap();
    assert_ne!(a.statistics, c.statistics);
}

#[test]
fn null_direction_power_matches_size() {
    let spec = ModelSpec::mar(vec![], vec![0.5]).unwrap();
    let y = spec.simulate(ErrorDistribution::StudentT { nu: 5.0 }, 200, None, 12).unwrap().series;
    let cfg = BootstrapConfig { replicates: 400, seed: 3, ..Default::default() };
    let lp = bootstrap_local_power(&spec, None, &y, &transforms(), 2, &cfg, 0.05).unwrap();
    let se = (0.05 * 0.95 / lp.alternative_layer.statistics.len() as f64).sqrt();
    assert!((lp.power - 0.05).abs() <= 3.0 * se + 1.0 / 400.0, "power {}", lp.power);
}

#[test]
fn bootstrap_law_is_close_to_chi_square() {
    // Residual bootstrap of the fitted null, exact rebuild, refit by GCov.
    let h = 3;
    let ts = transforms();
    let spec = ModelSpec::mar(vec![], vec![0.5]).unwrap();
    let y = spec.simulate(ErrorDistribution::Uniform, 500, None, 21).unwrap().series;
    let fit = gcov_fit(&spec, &y, &ts, h, &GcovConfig::default(), None).unwrap();
    let cfg = BootstrapConfig { replicates: 400, seed: 5, rebuild: RebuildMode::OriginalBoundary, ..Default::default() };
    let boot = bootstrap_null(&fit.model, &y, &ts, h, &cfg).unwrap();
    let ks = ks_chi2(boot.statistics, fit.df() as f64);
    assert!(ks < 0.1, "KS {ks}");
}

#[test]
fn bootstrap_power_tracks_direct_simulation() {
    let h = 2;
    let ts = transforms();
    let null = ModelSpec::mar(vec![], vec![0.3]).unwrap();
    let alt = ModelSpec::mar(vec![0.8], vec![0.3]).unwrap();
    let law = ErrorDistribution::StudentT { nu: 5.0 };
    let t = 100;
    let y = alt.simulate(law, t, None, 41).unwrap().series;
    let cfg = BootstrapConfig { replicates: 200, seed: 9, ..Default::default() };
    let lp = bootstrap_local_power(&null, Some(AlternativeDirection::CausalLag), &y, &ts, h, &cfg, 0.05).unwrap();
    // Direct simulation from the true alternative against the same critical value.
    let reps = 200;
    let hits = (0..reps)
        .filter(|r| {
            let ys = alt.simulate(law, t, None, derive_seed(97, *r)).unwrap().series;
            let fitted = estimate(&null, &ys, &ts, h, &cfg.estimator).unwrap();
            plug_in_statistic(&fitted, &ys, &ts, h).unwrap() > lp.critical_value
        })
        .count();
    let direct = hits as f64 / reps as f64;
    assert!((lp.power - direct).abs() <= 0.1, "bootstrap {} direct {direct}", lp.power);
}
