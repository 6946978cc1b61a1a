use nlsd_core::bootstrap::rebuild_exact;
use nlsd_core::dist::ErrorDistribution;
use nlsd_core::models::mar_components;
use nlsd_core::ModelSpec;
use proptest::prelude::*;

fn laws() -> impl Strategy<Value = ErrorDistribution> {
    prop_oneof![
        Just(ErrorDistribution::Uniform),
        Just(ErrorDistribution::Laplace),
        Just(ErrorDistribution::StudentT { nu: 5.0 }),
        Just(ErrorDistribution::Cauchy),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn simulated_errors_are_recovered(
        phi in -0.9f64..0.9, psi in -0.9f64..0.9, law in laws(), seed in any::<u64>(), t in 50usize..400
    ) {
        let spec = ModelSpec::mar(vec![phi], vec![psi]).unwrap();
        let sim = spec.simulate(law, t, None, seed).unwrap();
        let u = spec.residual_columns(&sim.series).unwrap();
        let e = sim.errors.column(0);
        let scale = e.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (i, v) in u[0].iter().enumerate() {
            prop_assert!((v - e[i + 1]).abs() <= 1e-6 * scale, "row {}: {} vs {}", i + 1, v, e[i + 1]);
        }
    }

    #[test]
    fn dual_component_reconstructions_agree(
        phi in -0.9f64..0.9, psi in -0.9f64..0.9, law in laws(), seed in any::<u64>()
    ) {
        let spec = ModelSpec::mar(vec![phi], vec![psi]).unwrap();
        let y = spec.simulate(law, 200, None, seed).unwrap().series;
        let c = mar_components(&y, &[phi], &[psi]).unwrap();
        let scale = y.column(0).iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for t in 1..199 {
            let a = c.reconstruct_from_lag(t).unwrap();
            let b = c.reconstruct_from_lead(t).unwrap();
            prop_assert!((a - y.column(0)[t]).abs() <= 1e-8 * scale);
            prop_assert!((b - y.column(0)[t]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn rebuild_from_own_residuals_is_identity(
        phi in proptest::collection::vec(-0.45f64..0.45, 0..3),
        psi in proptest::collection::vec(-0.45f64..0.45, 0..3),
        law in laws(),
        seed in any::<u64>(),
    ) {
        prop_assume!(phi.len() + psi.len() > 0);
        let spec = ModelSpec::mar(phi, psi).unwrap();
        let y = spec.simulate(law, 150, None, seed).unwrap().series;
        let u = spec.residual_columns(&y).unwrap();
        let back = rebuild_exact(&spec, &y, &u).unwrap();
        let scale = y.column(0).iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in back.column(0).iter().zip(y.column(0)) {
            prop_assert!((a - b).abs() <= 1e-8 * scale);
        }
    }
}

#[test]
fn var_and_dar_rebuilds_are_identities() {
    let var = ModelSpec::var(2, vec![vec![0.5, 0.1, -0.2, 0.3]]).unwrap();
    let y = var.simulate(ErrorDistribution::Laplace, 300, None, 4).unwrap().series;
    let back = rebuild_exact(&var, &y, &var.residual_columns(&y).unwrap()).unwrap();
    for k in 0..2 {
        for (a, b) in back.column(k).iter().zip(y.column(k)) {
            assert!((a - b).abs() < 1e-8);
        }
    }
    let dar = ModelSpec::dar1(0.2, 0.5, 0.4).unwrap();
    let y = dar.simulate(ErrorDistribution::StudentT { nu: 6.0 }, 300, None, 8).unwrap().series;
    let back = rebuild_exact(&dar, &y, &dar.residual_columns(&y).unwrap()).unwrap();
    for (a, b) in back.column(0).iter().zip(y.column(0)) {
        assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()));
    }
}
