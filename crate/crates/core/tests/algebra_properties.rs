use holomat::fiber::{HermitianFiber, KaehlerCurvature};
use holomat::hol::{center, derived, is_irreducible, lie_closure, real_schur, Ambient, MatrixLieSubalgebra};
use holomat::kforms::{eigen_sum_min, fs_shifted, greedy_extremal_frame, normal_form_2form, two_form_from_matrix, wedge_power};
use holomat::linalg::{
    binomial, complex_gaussian, random_hermitian, random_pd_hermitian, random_unitary, CMat, CVec, RankTol, C64, IM, ONE,
};
use holomat::rep::{permutation_matrix, permutations, torus_project, WedgeRep};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(m: usize, i: usize, j: usize, z: C64) -> CMat {
    let mut a = CMat::zeros(m, m);
    a[(i, j)] = z;
    a
}

/// Blocks carrying `u(k)`, `su(k)`, scalars or nothing, conjugated by a random unitary.
fn random_subalgebra(m: usize, rng: &mut ChaCha8Rng) -> MatrixLieSubalgebra {
    let mut gens = Vec::new();
    let mut off = 0;
    while off < m {
        let k = rng.random_range(1..=m - off);
        let choice = rng.random_range(0..4);
        if choice < 2 {
            for a in 0..k {
                for b in a + 1..k {
                    gens.push(unit(m, off + a, off + b, ONE) - unit(m, off + b, off + a, ONE));
                    gens.push(unit(m, off + a, off + b, IM) + unit(m, off + b, off + a, IM));
                }
            }
        }
        match choice {
            0 => gens.extend((0..k).map(|a| unit(m, off + a, off + a, IM))),
            1 => gens.extend((1..k).map(|a| unit(m, off + a - 1, off + a - 1, IM) - unit(m, off + a, off + a, IM))),
            2 => gens.push((0..k).fold(CMat::zeros(m, m), |acc, a| acc + unit(m, off + a, off + a, IM))),
            _ => {}
        }
        off += k;
    }
    let q = random_unitary(m, rng);
    let gens: Vec<CMat> = gens.iter().map(|g| &q * g * q.adjoint()).collect();
    lie_closure(Ambient::Unitary { m }, &gens, RankTol::EXACT).unwrap()
}

fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |x, z| x.max(z.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closure_is_idempotent(seed in any::<u64>(), m in 1usize..=5) {
        let g = random_subalgebra(m, &mut ChaCha8Rng::seed_from_u64(seed));
        let again = lie_closure(Ambient::Unitary { m }, &g.basis, RankTol::EXACT).unwrap();
        prop_assert_eq!(again.dim(), g.dim());
        for b in &again.basis {
            prop_assert!(g.span_residual(b) < 1e-10);
        }
    }

    #[test]
    fn center_is_orthogonal_to_derived(seed in any::<u64>(), m in 1usize..=5) {
        let g = random_subalgebra(m, &mut ChaCha8Rng::seed_from_u64(seed));
        let z = center(&g).unwrap();
        let d = derived(&g).unwrap();
        prop_assert_eq!(z.dim() + d.dim(), g.dim());
        for a in &z.basis {
            for b in &d.basis {
                prop_assert!((a * b).trace().re.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn irreducible_algebras_have_scalar_center(seed in any::<u64>(), m in 1usize..=5) {
        let g = random_subalgebra(m, &mut ChaCha8Rng::seed_from_u64(seed));
        if is_irreducible(&g).is_irreducible() {
            for a in &center(&g).unwrap().basis {
                let s = a.trace() / C64::new(m as f64, 0.0);
                prop_assert!(max_abs(&(a - CMat::identity(m, m) * s)) < 1e-8);
            }
        }
        let rs = real_schur(&g).unwrap();
        if rs.real_irreducible {
            prop_assert!(rs.skew_square < 1e-8);
            prop_assert!(rs.skew_centralizer <= 1);
        }
    }

    #[test]
    fn centerless_algebras_are_traceless(seed in any::<u64>(), m in 1usize..=5) {
        let g = random_subalgebra(m, &mut ChaCha8Rng::seed_from_u64(seed));
        if center(&g).unwrap().dim() == 0 {
            for a in &g.basis {
                prop_assert!(a.trace().norm() < 1e-8);
            }
        }
    }

    #[test]
    fn permutations_act_by_signed_permutation((m, p) in (1usize..=5).prop_flat_map(|m| (Just(m), 1..=m)), pick in any::<prop::sample::Index>()) {
        let rep = WedgeRep::new(m, p).unwrap();
        prop_assert_eq!(rep.dim(), binomial(m, p));
        let perms = permutations(m);
        let perm = &perms[pick.index(perms.len())];
        let action = rep.action(&permutation_matrix(perm));
        for (col, multi) in rep.basis.iter().enumerate() {
            let mut image: Vec<usize> = multi.iter().map(|&i| perm[i]).collect();
            let mut sign = 1.0;
            for a in 0..image.len() {
                for b in a + 1..image.len() {
                    if image[a] > image[b] {
                        sign = -sign;
                    }
                }
            }
            image.sort();
            let row = rep.index_of(&image).unwrap();
            for r in 0..rep.dim() {
                let expect = if r == row { sign } else { 0.0 };
                prop_assert!((action[(r, col)] - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn torus_projections_split_vectors(seed in any::<u64>(), (m, p) in (1usize..=4).prop_flat_map(|m| (Just(m), 1..=m))) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = WedgeRep::new(m, p).unwrap();
        let v: Vec<C64> = (0..rep.dim()).map(|_| complex_gaussian(&mut rng)).collect();
        let mut sum = CVec::zeros(rep.dim());
        for multi in &rep.basis {
            let once = torus_project(&rep, &v, multi, 3).unwrap();
            let twice = torus_project(&rep, once.as_slice(), multi, 3).unwrap();
            prop_assert!((&twice - &once).norm() < 1e-12);
            sum += once;
        }
        prop_assert!((sum - CVec::from_column_slice(&v)).norm() < 1e-12);
    }

    #[test]
    fn weights_are_distinct(seed in any::<u64>(), (m, p) in (1usize..=6).prop_flat_map(|m| (Just(m), 1..=m))) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = WedgeRep::new(m, p).unwrap();
        let z: Vec<C64> = (0..m).map(|_| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect();
        let chars: Vec<C64> = rep.basis.iter().map(|multi| rep.character(multi, &z)).collect();
        for a in 0..chars.len() {
            for b in a + 1..chars.len() {
                prop_assert!((chars[a] - chars[b]).norm() > 1e-9);
            }
        }
    }

    #[test]
    fn eigen_sum_min_is_monotone(seed in any::<u64>(), (m, p) in (1usize..=5).prop_flat_map(|m| (Just(m), 1..=m))) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ric = random_hermitian(m, &mut rng);
        let psd = random_pd_hermitian(m, &mut rng) * C64::new(rng.random_range(0.0..2.0), 0.0);
        let before = eigen_sum_min(&ric, p).unwrap();
        let after = eigen_sum_min(&(&ric + psd), p).unwrap();
        prop_assert!(after >= before - 1e-12);
    }

    #[test]
    fn normal_form_rank_is_wedge_rank(seed in any::<u64>(), (m, r) in (2usize..=5).prop_flat_map(|m| (Just(m), 0..=m / 2))) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fib = HermitianFiber::new(random_pd_hermitian(m, &mut rng)).unwrap();
        let u = random_unitary(m, &mut rng);
        let mut sigma = CMat::zeros(m, m);
        for i in 0..r {
            let f = rng.random_range(0.5..2.0);
            sigma[(2 * i, 2 * i + 1)] = C64::new(f, 0.0);
            sigma[(2 * i + 1, 2 * i)] = C64::new(-f, 0.0);
        }
        let phi = two_form_from_matrix(&fib, &(&u * sigma * u.transpose())).unwrap();
        let nf = normal_form_2form(&fib, &phi).unwrap();
        prop_assert_eq!(nf.rank, r);
        prop_assert_eq!(nf.wedge_rank, r);
        if r > 0 {
            prop_assert!(wedge_power(&fib, &phi, r).unwrap().max_abs() > 1e-6);
        }
        if 2 * (r + 1) <= m {
            prop_assert!(wedge_power(&fib, &phi, r + 1).unwrap().max_abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn extremal_frames_are_ordered_unitary_and_bounded(seed in any::<u64>(), m in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = fs_shifted(m, &mut rng).unwrap();
        let f = greedy_extremal_frame(&t, &mut rng).unwrap();
        prop_assert!(f.unitarity < 1e-10);
        for w in f.h_values.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
        prop_assert!(f.slack >= -1e-6);
    }

    #[test]
    fn extremal_frames_scale_with_the_tensor(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = fs_shifted(2, &mut rng).unwrap();
        let base = greedy_extremal_frame(&t, &mut rng).unwrap();
        let scaled: KaehlerCurvature = t.scale(c);
        let f = greedy_extremal_frame(&scaled, &mut rng).unwrap();
        prop_assert!((f.kappa - c * base.kappa).abs() < 1e-6 * c.max(1.0));
        prop_assert!(f.slack >= -1e-6 * c.max(1.0));
    }
}
