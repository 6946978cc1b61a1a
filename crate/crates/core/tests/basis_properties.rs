use nlsd_core::basis::{
    build_generators, diagonal_gcov_start, many_transform_statistic, orthonormalize, standardized_statistic, GeneratorGrid, SignMode,
};
use nlsd_core::dist::{sample, ErrorDistribution};
use nlsd_core::gcov::gcov_objective_diagonal;
use nlsd_core::optim::NelderMeadConfig;
use nlsd_core::{derive_seed, gcov_fit, gcov_objective, GcovConfig, ModelSpec, TimeSeries, TransformSet};

fn mar01(psi: f64, law: ErrorDistribution, t: usize, seed: u64) -> (ModelSpec, TimeSeries) {
    let spec = ModelSpec::mar(vec![], vec![psi]).unwrap();
    let y = spec.simulate(law, t, None, seed).unwrap().series;
    (spec, y)
}

#[test]
fn exponential_weights_reproduce_laplace_transform() {
    // -ln(V) with V uniform on (0, 1) is exponential(1).
    let u = sample(ErrorDistribution::Uniform, 200_000, 4).unwrap();
    let x: Vec<f64> = u.iter().map(|v| -((v + 1.0) / 2.0).ln()).filter(|v| v.is_finite()).collect();
    let grid = build_generators(1, 5, 1.0, SignMode::PositiveSupport).unwrap();
    for (k, g) in grid.generators.iter().enumerate().filter(|(_, g)| g.p == 0) {
        let m = x.iter().map(|&v| grid.eval(k, v)).sum::<f64>() / x.len() as f64;
        assert!((m - 1.0 / (1.0 + g.t)).abs() < 5e-3, "t = {}: {m}", g.t);
    }
}

#[test]
fn statistic_depends_only_on_the_spanned_space() {
    let (spec, y) = mar01(0.5, ErrorDistribution::Laplace, 400, 2);
    let res = spec.residual_columns(&y).unwrap();
    let grid = GeneratorGrid::new(1, 3, vec![0.0, 0.5], SignMode::AbsoluteValue).unwrap();
    let mut reversed = grid.clone();
    reversed.generators.reverse();
    let a = orthonormalize(&res[0], &grid, 0.0).unwrap();
    let b = orthonormalize(&res[0], &reversed, 0.0).unwrap();
    assert_eq!(a.k_star(), b.k_star());
    let nm = NelderMeadConfig::default();
    let xa = many_transform_statistic(&spec, &y, &a, 3, false, &nm).unwrap().xi;
    let xb = many_transform_statistic(&spec, &y, &b, 3, false, &nm).unwrap().xi;
    assert!((xa - xb).abs() < 1e-8 * xa.max(1.0), "{xa} vs {xb}");
    // Each element of one basis lies in the span of the other.
    let (ca, cb) = (a.evaluate(&res[0]), b.evaluate(&res[0]));
    let n = res[0].len() as f64;
    for col in &cb {
        let mut r = col.clone();
        for q in &ca {
            let c = r.iter().zip(q).map(|(x, y)| x * y).sum::<f64>() / n;
            r.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
        let rest = (r.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
        assert!(rest < 1e-6, "projection residual {rest}");
    }
}

#[test]
fn full_basis_reproduces_gcov_objective() {
    let (spec, y) = mar01(0.4, ErrorDistribution::Uniform, 500, 9);
    let res = spec.residual_columns(&y).unwrap();
    let grid = GeneratorGrid::new(1, 3, vec![0.0], SignMode::AbsoluteValue).unwrap();
    let basis = orthonormalize(&res[0], &grid, 0.0).unwrap();
    assert_eq!(basis.k_star(), grid.len());
    let raw = grid.transform_set().unwrap();
    let h = 2;
    let xi = many_transform_statistic(&spec, &y, &basis, h, false, &NelderMeadConfig::default()).unwrap();
    let l = gcov_objective(&[0.4], &spec, &y, &raw, h).unwrap();
    assert!((xi.xi / xi.t as f64 - l).abs() < 1e-8, "{} vs {l}", xi.xi / xi.t as f64);
    // Orthonormal transforms make the diagonal objective the full one.
    let ortho = basis.transform_set().unwrap();
    let full = gcov_objective(&[0.4], &spec, &y, &ortho, h).unwrap();
    let diag = gcov_objective_diagonal(&[0.4], &spec, &y, &ortho, h).unwrap();
    assert!((full - diag).abs() < 1e-10);
    assert!((full - l).abs() < 1e-8);
}

#[test]
fn diagonal_start_equals_full_fit_for_one_transform() {
    let (spec, y) = mar01(0.6, ErrorDistribution::StudentT { nu: 5.0 }, 300, 3);
    let ts = TransformSet::parse_list("abs-power:1").unwrap();
    let a = diagonal_gcov_start(&spec, &y, &ts, 4, &GcovConfig::default()).unwrap();
    let b = gcov_fit(&spec, &y, &ts, 4, &GcovConfig::default(), None).unwrap();
    assert_eq!(a.theta_hat, b.theta_hat);
}

#[test]
fn diagonal_start_survives_ill_conditioned_generators() {
    let (spec, y) = mar01(0.3, ErrorDistribution::StudentT { nu: 5.0 }, 500, 1);
    let ts = GeneratorGrid::abs_powers(9, 0.01).unwrap().transform_set().unwrap();
    let fit = diagonal_gcov_start(&spec, &y, &ts, 3, &GcovConfig::default()).unwrap();
    assert!((fit.theta_hat[0] - 0.3).abs() < 0.2);
}

#[test]
fn standardized_statistic_is_roughly_standard_normal_for_a_small_basis() {
    let grid = GeneratorGrid::new(1, 3, vec![0.0, 0.1], SignMode::AbsoluteValue).unwrap();
    let h = 3;
    let zs: Vec<f64> = (0..300)
        .map(|r| {
            let (spec, y) = mar01(0.5, ErrorDistribution::Uniform, 500, derive_seed(31, r));
            let res = spec.residual_columns(&y).unwrap();
            let basis = orthonormalize(&res[0], &grid, 1e-8).unwrap();
            let v = many_transform_statistic(&spec, &y, &basis, h, false, &NelderMeadConfig::default()).unwrap();
            standardized_statistic(v.xi, h, v.k_star)
        })
        .collect();
    let m = zs.iter().sum::<f64>() / zs.len() as f64;
    let sd = (zs.iter().map(|z| (z - m).powi(2)).sum::<f64>() / (zs.len() - 1) as f64).sqrt();
    assert!(m.abs() < 0.15 && (0.8..=1.2).contains(&sd), "mean {m}, sd {sd}");
}

#[test]
fn polynomial_basis_recovers_hermite_directions() {
    let u = sample(ErrorDistribution::Gaussian, 100_000, 17).unwrap();
    let grid = GeneratorGrid::new(1, 3, vec![0.0], SignMode::PositiveSupport).unwrap();
    let basis = orthonormalize(&u, &grid, 1e-8).unwrap();
    let cols = basis.evaluate(&u);
    let he2: Vec<f64> = u.iter().map(|v| v * v - 1.0).collect();
    let mean = he2.iter().sum::<f64>() / he2.len() as f64;
    let c: Vec<f64> = he2.iter().map(|v| v - mean).collect();
    let corr = cols[1].iter().zip(&c).map(|(a, b)| a * b).sum::<f64>()
        / (cols[1].iter().map(|a| a * a).sum::<f64>() * c.iter().map(|b| b * b).sum::<f64>()).sqrt();
    assert!((corr.abs() - 1.0).abs() < 1e-3, "corr {corr}");
}
