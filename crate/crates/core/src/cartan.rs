//! Cartan subalgebras of solvable Lie algebras and the root-space
//! decomposition `L = H ⊕ H*`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::liealg::{LieAlgebra, SubalgebraBasis};
use crate::numkit::{
    generalized_kernel, hcat, joint_generalized_eigenspaces, least_squares, norm2, sup_norm, CMat, CVec, Subspace,
    Tolerance, C64,
};
use crate::{input_err, numerical_err, Result};

/// Number of generic elements tried before giving up.
pub const MAX_ATTEMPTS: usize = 20;

/// Random coordinates of the generic element lie in `[-COORD_RANGE, COORD_RANGE]`.
pub const COORD_RANGE: i32 = 5;

/// A root `α` on `H`, given by its values on the basis of `H`, and its
/// generalized root space `L^α`.
#[derive(Debug, Clone)]
pub struct Root {
    pub alpha: Vec<C64>,
    pub space: Subspace,
}

impl Root {
    pub fn is_zero(&self, tol: &Tolerance) -> bool {
        sup_norm(&self.alpha) <= tol.match_eps
    }
}

#[derive(Debug, Clone)]
pub struct CartanDecomposition {
    algebra: LieAlgebra,
    h: SubalgebraBasis,
    roots: Vec<Root>,
    h_star: Subspace,
}

impl CartanDecomposition {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn h(&self) -> &SubalgebraBasis {
        &self.h
    }

    /// All roots, the zero root included, sorted by `(re, im)` of their values.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Sum of the root spaces of the nonzero roots.
    pub fn h_star(&self) -> &Subspace {
        &self.h_star
    }

    /// The functional on `L` that restricts to `g` on `H` (values on the
    /// basis of `H`) and vanishes on `H*`, in the coordinates `e_1 … e_n`.
    pub fn lift(&self, g: &[C64], tol: &Tolerance) -> Result<Vec<C64>> {
        let r = self.h.dim();
        if g.len() != r {
            return input_err(format!("functional on H needs {r} values, got {}", g.len()));
        }
        let n = self.algebra.dim();
        let b = hcat(self.h.basis(), self.h_star.orthonormal());
        let mut rhs = CMat::zeros(n, 1);
        for (i, &x) in g.iter().enumerate() {
            rhs[(i, 0)] = x;
        }
        let f = least_squares(&b.transpose(), &rhs, tol)?;
        Ok(f.column(0).iter().copied().collect())
    }

    /// Values of `f` on the basis of `H`.
    pub fn restrict_to_h(&self, f: &[C64]) -> Vec<C64> {
        self.h.restrict_functional(f)
    }

    /// `max |f(q)|` over an orthonormal basis `q` of `H*`.
    pub fn h_star_residual(&self, f: &[C64]) -> f64 {
        self.h_star
            .orthonormal()
            .column_iter()
            .map(|q| q.iter().zip(f).map(|(x, y)| x * y).sum::<C64>().norm())
            .fold(0.0, f64::max)
    }
}

fn ensure_solvable(alg: &LieAlgebra, tol: &Tolerance) -> Result<()> {
    let report = alg.validate(tol);
    if !report.accepted() {
        return input_err(format!(
            "algebra rejected (antisymmetric: {}, Jacobi: {}, solvable: {})",
            report.antisymmetric, report.jacobi, report.solvable
        ));
    }
    Ok(())
}

fn ad_threshold(ad: &CMat, tol: &Tolerance) -> f64 {
    tol.rank_eps * norm2(ad).max(1.0)
}

/// Joint generalized null space `L⁰` of `ad(h)` over the basis of `h`.
fn zero_root_space(alg: &LieAlgebra, h: &Subspace, tol: &Tolerance) -> Result<Subspace> {
    let mut acc = Subspace::full(alg.dim());
    for col in h.basis().column_iter() {
        let ad = alg.ad_matrix(&col.clone_owned())?;
        let k = generalized_kernel(&ad, ad_threshold(&ad, tol))?;
        acc = acc.intersection(&k, tol)?;
    }
    Ok(acc)
}

/// `H` is a Cartan subalgebra when it is nilpotent and equals the joint
/// generalized 0-eigenspace of `ad(H)` on `L`.
pub fn is_cartan(alg: &LieAlgebra, h: &SubalgebraBasis, tol: &Tolerance) -> bool {
    if h.parent().dim() != alg.dim() || !h.closure_check(tol) {
        return false;
    }
    let nilpotent = h
        .induced_algebra(tol)
        .and_then(|ind| ind.is_nilpotent(tol))
        .unwrap_or(false);
    if !nilpotent {
        return false;
    }
    match zero_root_space(alg, h.space(), tol) {
        Ok(l0) => l0.same_span(h.space(), tol),
        Err(_) => false,
    }
}

/// Rescales the columns of an orthonormal basis to a column-echelon form:
/// each column has a 1 in its pivot row and zeros in the other pivot rows.
/// Pivots prefer low row indices, so the Cartan subalgebra of the affine
/// algebra comes out as `span{e1 + t·e2}`.
fn echelon_basis(q: &CMat) -> CMat {
    let (n, m) = q.shape();
    let mut b = q.clone();
    let mut pivots = Vec::with_capacity(m);
    for c in 0..m {
        let overall = (0..n)
            .filter(|i| !pivots.contains(i))
            .flat_map(|i| (c..m).map(move |j| (i, j)))
            .map(|(i, j)| b[(i, j)].norm())
            .fold(0.0, f64::max);
        let Some((pr, pc)) = (0..n).filter(|i| !pivots.contains(i)).find_map(|i| {
            let (j, v) = (c..m)
                .map(|j| (j, b[(i, j)].norm()))
                .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            (v >= 0.1 * overall && v > 0.0).then_some((i, j))
        }) else {
            break;
        };
        b.swap_columns(c, pc);
        let p = b[(pr, c)];
        for i in 0..n {
            b[(i, c)] /= p;
        }
        for j in 0..m {
            if j != c {
                let factor = b[(pr, j)];
                for i in 0..n {
                    let delta = factor * b[(i, c)];
                    b[(i, j)] -= delta;
                }
            }
        }
        pivots.push(pr);
    }
    let mut order: Vec<usize> = (0..pivots.len()).collect();
    order.sort_by_key(|&c| pivots[c]);
    let mut out = CMat::zeros(n, m);
    for (dst, &src) in order.iter().enumerate() {
        out.set_column(dst, &b.column(src));
    }
    for x in out.iter_mut() {
        if x.re.abs() <= 1e-12 {
            x.re = 0.0;
        }
        if x.im.abs() <= 1e-12 {
            x.im = 0.0;
        }
    }
    out
}

/// Searches for a Cartan subalgebra as the Fitting null component
/// `ker (ad x)^n` of a generic element `x` with small random integer
/// coordinates, retrying up to [`MAX_ATTEMPTS`] times.
pub fn find_cartan_subalgebra(alg: &LieAlgebra, seed: u64, tol: &Tolerance) -> Result<SubalgebraBasis> {
    ensure_solvable(alg, tol)?;
    let n = alg.dim();
    if n == 0 {
        return Ok(SubalgebraBasis::whole(alg));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let x = CVec::from_iterator(
            n,
            (0..n).map(|_| C64::new(rng.gen_range(-COORD_RANGE..=COORD_RANGE) as f64, 0.0)),
        );
        if x.iter().all(|z| *z == C64::default()) {
            continue;
        }
        let ad = alg.ad_matrix(&x)?;
        let null = generalized_kernel(&ad, ad_threshold(&ad, tol))?;
        if null.dim() == 0 {
            continue;
        }
        let basis = echelon_basis(null.orthonormal());
        let Ok(space) = Subspace::from_basis(basis, tol) else { continue };
        let candidate = SubalgebraBasis::from_space_unchecked(alg, space);
        if is_cartan(alg, &candidate, tol) {
            return Ok(candidate);
        }
    }
    numerical_err(format!("no Cartan subalgebra found after {MAX_ATTEMPTS} attempts (seed {seed})"))
}

/// Root-space decomposition of `L` relative to the Cartan subalgebra `h`.
pub fn root_decomposition(alg: &LieAlgebra, h: &SubalgebraBasis, tol: &Tolerance) -> Result<CartanDecomposition> {
    if !is_cartan(alg, h, tol) {
        return input_err("the given subalgebra is not a Cartan subalgebra");
    }
    let n = alg.dim();
    let ops = h
        .basis()
        .column_iter()
        .map(|col| alg.ad_matrix(&col.clone_owned()))
        .collect::<Result<Vec<_>>>()?;
    let blocks = joint_generalized_eigenspaces(&ops, n, tol)?;
    let roots: Vec<Root> = blocks.into_iter().map(|b| Root { alpha: b.values, space: b.space }).collect();

    let zero_dim: usize = roots.iter().filter(|rt| rt.is_zero(tol)).map(|rt| rt.space.dim()).sum();
    if zero_dim != h.dim() {
        return numerical_err(format!(
            "zero root space has dimension {zero_dim} but H has dimension {}",
            h.dim()
        ));
    }
    let mut h_star = Subspace::zero(n);
    for rt in roots.iter().filter(|rt| !rt.is_zero(tol)) {
        h_star = h_star.sum(&rt.space, tol)?;
    }
    if h_star.dim() + h.dim() != n {
        return numerical_err(format!(
            "dim H + dim H* = {} + {} differs from dim L = {n}",
            h.dim(),
            h_star.dim()
        ));
    }
    Ok(CartanDecomposition { algebra: alg.clone(), h: h.clone(), roots, h_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{r, real_matrix, real_vector, unit_vector};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn sub(alg: &LieAlgebra, rows: &[&[f64]]) -> SubalgebraBasis {
        SubalgebraBasis::new(alg, real_matrix(rows), &tol()).unwrap()
    }

    #[test]
    fn affine_cartan_search() {
        let t = tol();
        let a = LieAlgebra::affine();
        for seed in 0..5 {
            let h = find_cartan_subalgebra(&a, seed, &t).unwrap();
            assert_eq!(h.dim(), 1);
            assert!(is_cartan(&a, &h, &t));
            // Fitting null component of x = a e1 + b e2 is span{x}: e1 + (b/a) e2.
            assert!((h.basis()[(0, 0)] - r(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_algebras_are_their_own_cartan() {
        let t = tol();
        for alg in [LieAlgebra::heisenberg(), LieAlgebra::abelian(2)] {
            let h = find_cartan_subalgebra(&alg, 7, &t).unwrap();
            assert_eq!(h.dim(), alg.dim());
        }
    }

    #[test]
    fn non_solvable_is_rejected() {
        assert!(matches!(
            find_cartan_subalgebra(&LieAlgebra::so3(), 1, &tol()),
            Err(crate::Error::Input(_))
        ));
    }

    #[test]
    fn is_cartan_examples() {
        let t = tol();
        let a = LieAlgebra::affine();
        assert!(is_cartan(&a, &sub(&a, &[&[1.0], &[0.0]]), &t));
        assert!(!is_cartan(&a, &sub(&a, &[&[0.0], &[1.0]]), &t));
        let h = LieAlgebra::heisenberg();
        assert!(!is_cartan(&h, &sub(&h, &[&[0.0], &[0.0], &[1.0]]), &t));
        assert!(is_cartan(&h, &SubalgebraBasis::whole(&h), &t));
    }

    #[test]
    fn affine_root_decomposition() {
        let t = tol();
        let a = LieAlgebra::affine();
        let cd = root_decomposition(&a, &sub(&a, &[&[1.0], &[0.0]]), &t).unwrap();
        assert_eq!(cd.roots().len(), 2);
        assert!(cd.roots()[0].is_zero(&t));
        assert!(cd.roots()[0].space.contains(&unit_vector(2, 0), &t));
        assert!((cd.roots()[1].alpha[0] - r(1.0)).norm() < 1e-12);
        assert!(cd.roots()[1].space.contains(&unit_vector(2, 1), &t));
        assert_eq!(cd.h_star().dim(), 1);
        assert!(cd.h_star().contains(&unit_vector(2, 1), &t));

        // lift: f(e1) = 1 on H, f vanishes on H* = span{e2}
        let f = cd.lift(&[r(1.0)], &t).unwrap();
        assert!((f[0] - r(1.0)).norm() < 1e-12 && f[1].norm() < 1e-12);
    }

    #[test]
    fn lift_through_a_tilted_cartan() {
        let t = tol();
        let a = LieAlgebra::affine();
        let cd = root_decomposition(&a, &sub(&a, &[&[1.0], &[1.0]]), &t).unwrap();
        let f = cd.lift(&[r(1.0)], &t).unwrap();
        assert!((f[0] - r(1.0)).norm() < 1e-12 && f[1].norm() < 1e-12);
        assert!(cd.h_star_residual(&f) < 1e-12);
    }

    #[test]
    fn heisenberg_single_zero_root() {
        let t = tol();
        let h = LieAlgebra::heisenberg();
        let cd = root_decomposition(&h, &SubalgebraBasis::whole(&h), &t).unwrap();
        assert_eq!(cd.roots().len(), 1);
        assert!(cd.roots()[0].is_zero(&t));
        assert_eq!(cd.h_star().dim(), 0);
    }

    #[test]
    fn direct_sum_of_affine_copies() {
        let t = tol();
        let a = LieAlgebra::affine();
        let s = LieAlgebra::direct_sum(&a, &a);
        let h = sub(&s, &[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let cd = root_decomposition(&s, &h, &t).unwrap();
        assert_eq!(cd.h_star().dim(), 2);
        let nonzero: Vec<&Root> = cd.roots().iter().filter(|rt| !rt.is_zero(&t)).collect();
        assert_eq!(nonzero.len(), 2);
        assert!(cd.h_star().contains(&real_vector(&[0.0, 1.0, 0.0, 0.0]), &t));
        assert!(cd.h_star().contains(&real_vector(&[0.0, 0.0, 0.0, 1.0]), &t));
        let found = find_cartan_subalgebra(&s, 3, &t).unwrap();
        assert_eq!(found.dim(), 2);
        assert!(is_cartan(&s, &found, &t));
    }

    #[test]
    fn root_spaces_are_generalized_eigenspaces() {
        let t = tol();
        let a = LieAlgebra::affine();
        let alg = LieAlgebra::direct_sum(&a, &LieAlgebra::heisenberg());
        let h = find_cartan_subalgebra(&alg, 11, &t).unwrap();
        let cd = root_decomposition(&alg, &h, &t).unwrap();
        let n = alg.dim();
        assert_eq!(cd.h().dim() + cd.h_star().dim(), n);
        assert_eq!(cd.h().space().intersection(cd.h_star(), &t).unwrap().dim(), 0);
        for rt in cd.roots() {
            for (j, hcol) in h.basis().column_iter().enumerate() {
                let ad = alg.ad_matrix(&hcol.clone_owned()).unwrap();
                let shifted = ad - CMat::identity(n, n) * rt.alpha[j];
                let mut p = CMat::identity(n, n);
                for _ in 0..n {
                    p = &p * &shifted;
                }
                for v in rt.space.basis().column_iter() {
                    assert!((&p * v).norm() <= 1e-9 * norm2(&shifted).max(1.0).powi(n as i32));
                }
            }
        }
    }
}
