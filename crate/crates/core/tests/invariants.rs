use cartan_spectra::numkit::{
    eigenvalues, generalized_eigenspaces, kernel_basis, kron, norm2, rank_with_tol, real_matrix, CMat, CVec,
};
use cartan_spectra::spectra::{
    all_regular_spectra, cartan_taylor, spectrum_by_common_eigenvectors, weights_of_nilpotent_rep, SpectrumKind,
};
use cartan_spectra::verify::{check_duality, generate_case, unimodular, FuzzDims, Instance};
use cartan_spectra::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn instance(seed: u64) -> (Instance, Instance) {
    generate_case(seed, &FuzzDims::default(), &tol()).unwrap()
}

fn decomposition(alg: &LieAlgebra, seed: u64) -> CartanDecomposition {
    let h = find_cartan_subalgebra(alg, seed, &tol()).unwrap();
    root_decomposition(alg, &h, &tol()).unwrap()
}

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec(-3i32..=3, rows * cols)
        .prop_map(move |v| CMat::from_fn(rows, cols, |i, j| C64::new(v[i * cols + j] as f64, 0.0)))
}

fn triangular_conjugate(seed: u64, n: usize) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = CMat::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = C64::new([0.0, 1.0, -2.0][(seed as usize + i) % 3], 0.0);
        for j in i + 1..n {
            t[(i, j)] = C64::new(((seed >> (i + j)) % 3) as f64 - 1.0, 0.0);
        }
    }
    let p = unimodular(&mut rng, n);
    let pinv = p.clone().try_inverse().unwrap();
    p * t * pinv
}

fn power(m: &CMat, k: usize) -> CMat {
    let mut out = CMat::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn rank_nullity(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| int_matrix(r, c))) {
        let t = tol();
        prop_assert_eq!(rank_with_tol(&m, &t).unwrap() + kernel_basis(&m, &t).unwrap().dim(), m.ncols());
    }

    #[test]
    fn generalized_eigenspaces_cover_and_annihilate(seed in any::<u64>(), n in 1usize..6) {
        let t = tol();
        let m = triangular_conjugate(seed, n);
        let g = generalized_eigenspaces(&m, &t).unwrap();
        prop_assert_eq!(g.total_dim(), n);
        let bound = 10.0 * t.rank_eps * norm2(&m).max(1.0).powi(n as i32);
        for b in &g.blocks {
            let p = power(&(&m - CMat::identity(n, n) * b.value), n);
            for v in b.space.orthonormal().column_iter() {
                prop_assert!((&p * v).norm() <= bound * v.norm());
            }
        }
    }

    #[test]
    fn numerics_are_deterministic(seed in any::<u64>(), n in 1usize..6) {
        let m = triangular_conjugate(seed, n);
        prop_assert_eq!(eigenvalues(&m).unwrap(), eigenvalues(&m).unwrap());
        let t = tol();
        let (k1, k2) = (kernel_basis(&m, &t).unwrap(), kernel_basis(&m, &t).unwrap());
        prop_assert_eq!(k1.orthonormal(), k2.orthonormal());
    }

    #[test]
    fn algebra_invariants(seed in any::<u64>()) {
        let t = tol();
        let (a, b) = instance(seed);
        let (la, lb) = (a.rep.algebra(), b.rep.algebra());
        prop_assert!(la.opposite().validate(&t).accepted());
        prop_assert_eq!(&la.opposite().opposite(), la);
        if la.is_nilpotent(&t).unwrap() {
            prop_assert!(la.is_solvable(&t).unwrap());
        }
        let sum = LieAlgebra::direct_sum(la, lb);
        let d = sum.derived_subalgebra(&t).unwrap();
        let (da, db) = (la.derived_subalgebra(&t).unwrap(), lb.derived_subalgebra(&t).unwrap());
        let mut expected = CMat::zeros(la.dim() + lb.dim(), da.dim() + db.dim());
        expected.view_mut((0, 0), (la.dim(), da.dim())).copy_from(da.orthonormal());
        expected.view_mut((la.dim(), da.dim()), (lb.dim(), db.dim())).copy_from(db.orthonormal());
        let expected = Subspace::span_of(&expected, &t).unwrap();
        prop_assert!(d.same_span(&expected, &t));
        let n = la.dim();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (numkit::unit_vector(n, i), numkit::unit_vector(n, j));
                let lhs = la.ad_matrix(&la.bracket(&x, &y).unwrap()).unwrap();
                let (ax, ay) = (la.ad_matrix(&x).unwrap(), la.ad_matrix(&y).unwrap());
                let rhs = &ax * &ay - &ay * &ax;
                prop_assert!((lhs - rhs).norm() <= 10.0 * t.rank_eps * la.scale().max(1.0).powi(2));
            }
        }
    }

    #[test]
    fn cartan_invariants(seed in any::<u64>()) {
        let t = tol();
        let (a, _) = instance(seed);
        let alg = a.rep.algebra();
        let n = alg.dim();
        let cd = decomposition(alg, seed);
        prop_assert_eq!(cd.h().dim() + cd.h_star().dim(), n);
        prop_assert_eq!(cd.h().space().intersection(cd.h_star(), &t).unwrap().dim(), 0);
        for root in cd.roots() {
            for (j, h) in cd.h().basis().column_iter().enumerate() {
                let ad = alg.ad_matrix(&h.clone_owned()).unwrap();
                let p = power(&(&ad - CMat::identity(n, n) * root.alpha[j]), n);
                for v in root.space.orthonormal().column_iter() {
                    prop_assert!((&p * v).norm() <= 1e-6 * norm2(&ad).max(1.0).powi(n as i32));
                }
            }
        }
        let other = find_cartan_subalgebra(alg, seed.wrapping_add(17), &t).unwrap();
        prop_assert!(is_cartan(alg, &other, &t));
        prop_assert!(is_cartan(alg, cd.h(), &t));
    }

    #[test]
    fn representation_invariants(seed in any::<u64>()) {
        let t = tol();
        let (a, b) = instance(seed);
        let rho = &a.rep;
        prop_assert_eq!(&rho.adjoint().adjoint(), rho);
        if rho.space_dim() * rho.space_dim() <= 64 {
            let (l, r) = (rho.left_mult(64).unwrap(), rho.right_mult(64).unwrap());
            for x in l.mats() {
                for y in r.mats() {
                    prop_assert!((x * y - y * x).norm() <= 1e-9 * (1.0 + x.norm() * y.norm()));
                }
            }
            let m = Representation::multiplication(rho, rho, 64).unwrap();
            for (i, x) in l.mats().iter().enumerate() {
                prop_assert!((&m.mats()[i] - x).norm() <= 1e-12 * (1.0 + x.norm()));
            }
        }
        // v1 ⊗ v2 is a common eigenvector of the tensor representation.
        let (cd1, cd2) = (decomposition(rho.algebra(), seed), decomposition(b.rep.algebra(), seed));
        let w1 = weights_of_nilpotent_rep(&rho.restrict(cd1.h(), &t).unwrap(), &t).unwrap();
        let w2 = weights_of_nilpotent_rep(&b.rep.restrict(cd2.h(), &t).unwrap(), &t).unwrap();
        let tensor = Representation::tensor(rho, &b.rep, 64).unwrap();
        let v = kron(&CMat::from_column_slice(rho.space_dim(), 1, w1[0].witness.as_slice()),
                     &CMat::from_column_slice(b.rep.space_dim(), 1, w2[0].witness.as_slice()));
        let v = CVec::from_column_slice(v.as_slice());
        let (n1, n2) = (rho.algebra().dim(), b.rep.algebra().dim());
        for (j, h) in cd1.h().basis().column_iter().enumerate() {
            let mut big = CVec::zeros(n1 + n2);
            big.rows_mut(0, n1).copy_from(&h);
            let m = tensor.act(&big).unwrap();
            prop_assert!((&m * &v - &v * w1[0].values[j]).norm() <= 1e-8 * (1.0 + m.norm()));
        }
        for (j, h) in cd2.h().basis().column_iter().enumerate() {
            let mut big = CVec::zeros(n1 + n2);
            big.rows_mut(n1, n2).copy_from(&h);
            let m = tensor.act(&big).unwrap();
            prop_assert!((&m * &v - &v * w2[0].values[j]).norm() <= 1e-8 * (1.0 + m.norm()));
        }
    }

    #[test]
    fn koszul_invariants(seed in any::<u64>()) {
        let t = tol();
        let (a, _) = instance(seed);
        let cd = decomposition(a.rep.algebra(), seed);
        let hr = a.rep.restrict(cd.h(), &t).unwrap();
        for w in weights_of_nilpotent_rep(&hr, &t).unwrap() {
            let c = build_complex(&hr, &w.values, &t).unwrap();
            let r = c.h_dim();
            for p in 1..r {
                let (d1, d2) = (c.boundary(p).unwrap(), c.boundary(p + 1).unwrap());
                prop_assert!(norm2(&(d1 * d2)) <= 10.0 * t.rank_eps * norm2(d1).max(1.0) * norm2(d2).max(1.0));
            }
            let h = homology_dims(&c, &t).unwrap();
            if r >= 1 {
                prop_assert_eq!(h.euler_characteristic(), 0);
            }
            prop_assert!(!h.is_exact());
            for side in [Side::Delta, Side::Pi] {
                for k in 0..r {
                    if h.slodkowski_membership(k, side).unwrap() {
                        prop_assert!(h.slodkowski_membership(k + 1, side).unwrap());
                    }
                }
                prop_assert_eq!(h.slodkowski_membership(r, side).unwrap(), h.taylor_membership());
            }
        }
    }

    #[test]
    fn spectrum_invariants(seed in any::<u64>()) {
        let t = tol();
        let (a, _) = instance(seed);
        let rho = &a.rep;
        let cd = decomposition(rho.algebra(), seed);
        let taylor = cartan_taylor(rho, &cd, &t).unwrap();
        let oracle = spectrum_by_common_eigenvectors(rho, &cd, &t).unwrap();
        prop_assert!(spectra::hausdorff_distance(&taylor.coords(), &oracle.coords()) <= t.match_eps);
        let sets = if rho.space_dim() * rho.space_dim() <= 64 {
            all_regular_spectra(rho, &cd, &t).unwrap()
        } else {
            vec![taylor.clone()]
        };
        for s in &sets {
            prop_assert!(!s.is_empty(), "{} empty", s.kind);
            prop_assert!(spectra::hausdorff_distance(&s.coords(), &taylor.coords()) <= t.match_eps, "{} differs", s.kind);
            for p in &s.points {
                prop_assert!(p.character.is_character);
                prop_assert!(cd.h_star_residual(&p.character.coords) <= t.match_eps);
            }
        }
        let n = rho.algebra().dim();
        for kind in [SpectrumKind::SlodkowskiDelta(n), SpectrumKind::SlodkowskiPi(n)] {
            let s = spectra::spectrum(rho, &cd, kind, &t).unwrap();
            prop_assert!(spectra::hausdorff_distance(&s.coords(), &taylor.coords()) <= t.match_eps);
        }
    }

    #[test]
    fn check_reports_are_reproducible(seed in any::<u64>()) {
        let t = tol();
        let (a, _) = instance(seed);
        prop_assert_eq!(check_duality(&a.rep, seed, &t).unwrap(), check_duality(&a.rep, seed, &t).unwrap());
    }
}

#[test]
fn kron_of_identities_is_identity() {
    let i2 = real_matrix(&[&[1.0, 0.0], &[0.0, 1.0]]);
    assert_eq!(kron(&i2, &i2), CMat::identity(4, 4));
}
