use holomat::conn::{bianchi_residual, bismut_skew_residual, connection, ConnectionKind};
use holomat::linalg::{hermitian_residual, max_abs_r, C64};
use holomat::models::{catalog, catalog_names, metric_jet, ManifoldModel, Params};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(name: &str) -> ManifoldModel {
    catalog(name, &Params::new()).unwrap()
}

fn point(model: &ManifoldModel, seed: u64) -> Vec<C64> {
    model.sample_point(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn any_model() -> impl Strategy<Value = String> {
    prop::sample::select(catalog_names())
}

fn chart_model() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["flat", "torus-flat", "fubini-study", "hopf-surface", "product", "perturbed"]).prop_map(String::from)
}

fn any_kind() -> impl Strategy<Value = ConnectionKind> {
    prop_oneof![
        Just(ConnectionKind::LeviCivita),
        Just(ConnectionKind::Chern),
        Just(ConnectionKind::Bismut),
        (0.0f64..=2.0).prop_map(|t| ConnectionKind::Gauduchon { t }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn metric_jets_are_hermitian(name in chart_model(), seed in any::<u64>()) {
        let m = model(&name);
        let jet = metric_jet(&m, &point(&m, seed), 2).unwrap();
        prop_assert!(hermitian_residual(&jet.g) < 1e-12);
        prop_assert!(jet.asymmetry < 1e-8, "{}", jet.asymmetry);
    }

    #[test]
    fn unperturbed_model_matches_its_base(seed in any::<u64>(), kind in any_kind()) {
        let mut p = Params::new();
        p.insert("epsilon".into(), serde_json::json!(0.0));
        let pert = catalog("perturbed", &p).unwrap();
        let base = model("fubini-study");
        let z = point(&base, seed);
        let a = connection(&pert, kind, &z).unwrap();
        let b = connection(&base, kind, &z).unwrap();
        let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).fold(0.0f64, |acc, (u, v)| acc.max((u - v).abs()));
        prop_assert!(diff(&a.torsion, &b.torsion) < 1e-12);
        let curv = a.curvature.iter().zip(&b.curvature).map(|(x, y)| max_abs_r(&(x - y))).fold(0.0, f64::max);
        prop_assert!(curv < 1e-12);
    }

    #[test]
    fn gauduchon_family_is_affine(name in any_model(), seed in any::<u64>()) {
        let m = model(&name);
        let z = point(&m, seed);
        let at = |t: f64| connection(&m, ConnectionKind::Gauduchon { t }, &z).unwrap();
        let (g0, g1, g2) = (at(0.0), at(1.0), at(2.0));
        for a in 0..g0.n() {
            prop_assert!(max_abs_r(&(&g1.gamma[a] - (&g0.gamma[a] + &g2.gamma[a]) * 0.5)) < 1e-12);
        }
    }

    #[test]
    fn connections_are_metric_and_satisfy_bianchi(name in any_model(), seed in any::<u64>(), kind in any_kind()) {
        let m = model(&name);
        let cd = connection(&m, kind, &point(&m, seed)).unwrap();
        let (tol, bianchi_tol) = if m.is_invariant() { (1e-12, 1e-10) } else { (1e-6, 5e-4) };
        prop_assert!(cd.metric_residual() < tol, "{}", cd.metric_residual());
        if kind.is_hermitian() {
            prop_assert!(cd.j_residual() < tol, "{}", cd.j_residual());
        }
        let b = bianchi_residual(&cd, true);
        prop_assert!(b < bianchi_tol, "{name} {kind:?}: {b}");
    }

    #[test]
    fn chern_torsion_has_no_mixed_part(name in any_model(), seed in any::<u64>()) {
        let m = model(&name);
        let cd = connection(&m, ConnectionKind::Chern, &point(&m, seed)).unwrap();
        for i in 0..m.m {
            for j in 0..m.m {
                let (t10, t01) = cd.complex_torsion(i, j, true);
                let worst = t10.iter().chain(&t01).fold(0.0f64, |a, z| a.max(z.norm()));
                prop_assert!(worst < 1e-14, "{worst}");
            }
        }
    }

    #[test]
    fn bismut_torsion_is_totally_skew(name in any_model(), seed in any::<u64>()) {
        let m = model(&name);
        let cd = connection(&m, ConnectionKind::Bismut, &point(&m, seed)).unwrap();
        let tol = if m.is_invariant() { 1e-12 } else { 1e-6 };
        prop_assert!(bismut_skew_residual(&cd) < tol);
    }

    #[test]
    fn kaehler_chern_curvature_has_kaehler_symmetries(seed in any::<u64>(), m in 1usize..=3) {
        let mut p = Params::new();
        p.insert("m".into(), m.into());
        let fs = catalog("fubini-study", &p).unwrap();
        let cd = connection(&fs, ConnectionKind::Chern, &point(&fs, seed)).unwrap();
        let res = cd.complex_curvature().symmetry_residual();
        prop_assert!(res < 1e-6, "{res}");
    }
}
