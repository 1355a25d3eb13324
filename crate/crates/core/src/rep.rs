//! Matrix representations of Lie algebras and the representations derived
//! from them (restriction, dual, left/right multiplication, tensor product,
//! multiplication on operator spaces).
//!
//! Operator spaces `L(X)` and `L(X₂, X₁)` are coordinatized by matrix units
//! in row-major order, `E₁₁, E₁₂, …`, so an operator `T` has coordinate
//! `T[i][j]` at index `i·cols + j`. In these coordinates `T ↦ A·T` is
//! `A ⊗ I` and `T ↦ T·B` is `I ⊗ Bᵀ`.

use crate::liealg::{LieAlgebra, SubalgebraBasis};
use crate::numkit::{kron, CMat, CVec, Tolerance, C64};
use crate::{input_err, Result};

/// Default bound on the dimension of derived carrier spaces.
pub const DEFAULT_CAP: usize = 64;

/// `ρ: L → L(X)` given by the matrices `ρ(e_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    algebra: LieAlgebra,
    space_dim: usize,
    mats: Vec<CMat>,
}

/// Homomorphism residual of a representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepReport {
    /// `max_{i<j} ‖ρ([e_i, e_j]) − [ρ(e_i), ρ(e_j)]‖_F`
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Representation {
    pub fn new(algebra: &LieAlgebra, space_dim: usize, mats: Vec<CMat>) -> Result<Self> {
        if space_dim == 0 {
            return input_err("representation space must be at least one-dimensional");
        }
        if mats.len() != algebra.dim() {
            return input_err(format!(
                "representation of a {}-dimensional algebra needs {} matrices, got {}",
                algebra.dim(),
                algebra.dim(),
                mats.len()
            ));
        }
        for (i, m) in mats.iter().enumerate() {
            if m.shape() != (space_dim, space_dim) {
                return input_err(format!(
                    "matrix {} is {}x{}, expected {space_dim}x{space_dim}",
                    i + 1,
                    m.nrows(),
                    m.ncols()
                ));
            }
            crate::numkit::ensure_finite(m, "representation matrix")?;
        }
        Ok(Representation { algebra: algebra.clone(), space_dim, mats })
    }

    pub fn zero(algebra: &LieAlgebra, space_dim: usize) -> Self {
        Representation {
            algebra: algebra.clone(),
            space_dim,
            mats: vec![CMat::zeros(space_dim, space_dim); algebra.dim()],
        }
    }

    /// `l ↦ ad(l)` on `L` itself.
    pub fn adjoint_action(algebra: &LieAlgebra) -> Self {
        let n = algebra.dim();
        let mats = (0..n)
            .map(|i| algebra.ad_matrix(&crate::numkit::unit_vector(n, i)).expect("length matches"))
            .collect();
        Representation { algebra: algebra.clone(), space_dim: n, mats }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    /// `ρ(l) = Σ l_i ρ(e_i)`.
    pub fn act(&self, l: &CVec) -> Result<CMat> {
        if l.len() != self.algebra.dim() {
            return input_err(format!("element of length {} for a {}-dimensional algebra", l.len(), self.algebra.dim()));
        }
        let mut out = CMat::zeros(self.space_dim, self.space_dim);
        for (coef, m) in l.iter().zip(&self.mats) {
            if *coef != C64::default() {
                out += m * *coef;
            }
        }
        Ok(out)
    }

    /// Largest Frobenius norm among the `ρ(e_i)`.
    pub fn scale(&self) -> f64 {
        self.mats.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    pub fn validate(&self, tol: &Tolerance) -> RepReport {
        let n = self.algebra.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut lhs = CMat::zeros(self.space_dim, self.space_dim);
                for k in 0..n {
                    let c = self.algebra.structure_constant(i, j, k);
                    if c != C64::default() {
                        lhs += &self.mats[k] * c;
                    }
                }
                let comm = &self.mats[i] * &self.mats[j] - &self.mats[j] * &self.mats[i];
                worst = worst.max((lhs - comm).norm());
            }
        }
        let m = self.scale().max(1.0);
        let threshold = 10.0 * tol.rank_eps * m * m * self.algebra.scale().max(1.0);
        RepReport { max_residual: worst, threshold, passed: worst <= threshold }
    }

    /// `ρ|_E` as a representation of the subalgebra with its induced
    /// structure constants.
    pub fn restrict(&self, sub: &SubalgebraBasis, tol: &Tolerance) -> Result<Representation> {
        if sub.parent().dim() != self.algebra.dim() {
            return input_err("subalgebra belongs to an algebra of a different dimension");
        }
        if !sub.closure_check(tol) {
            return input_err("cannot restrict to a subspace that is not a subalgebra");
        }
        let induced = sub.induced_algebra(tol)?;
        let mats = sub
            .basis()
            .column_iter()
            .map(|u| self.act(&u.clone_owned()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Representation { algebra: induced, space_dim: self.space_dim, mats })
    }

    /// `ρ*` on the dual space: transposed matrices, carried by `Lᵒᵖ`.
    pub fn adjoint(&self) -> Representation {
        Representation {
            algebra: self.algebra.opposite(),
            space_dim: self.space_dim,
            mats: self.mats.iter().map(|m| m.transpose()).collect(),
        }
    }

    fn check_cap(dim: usize, cap: usize) -> Result<()> {
        if dim > cap {
            return input_err(format!("derived carrier space has dimension {dim}, above the cap {cap}"));
        }
        Ok(())
    }

    /// `L_ρ(l)(T) = ρ(l)·T` on `L(X)`.
    pub fn left_mult(&self, cap: usize) -> Result<Representation> {
        let d = self.space_dim;
        Self::check_cap(d * d, cap)?;
        let id = CMat::identity(d, d);
        Ok(Representation {
            algebra: self.algebra.clone(),
            space_dim: d * d,
            mats: self.mats.iter().map(|m| kron(m, &id)).collect(),
        })
    }

    /// `R_ρ(l)(T) = T·ρ(l)` on `L(X)`, carried by `Lᵒᵖ`.
    pub fn right_mult(&self, cap: usize) -> Result<Representation> {
        let d = self.space_dim;
        Self::check_cap(d * d, cap)?;
        let id = CMat::identity(d, d);
        Ok(Representation {
            algebra: self.algebra.opposite(),
            space_dim: d * d,
            mats: self.mats.iter().map(|m| kron(&id, &m.transpose())).collect(),
        })
    }

    /// `ρ(l₁, l₂) = ρ₁(l₁) ⊗ I + I ⊗ ρ₂(l₂)` of `L₁ × L₂` on `X₁ ⊗ X₂`.
    pub fn tensor(r1: &Representation, r2: &Representation, cap: usize) -> Result<Representation> {
        let (d1, d2) = (r1.space_dim, r2.space_dim);
        Self::check_cap(d1 * d2, cap)?;
        let (i1, i2) = (CMat::identity(d1, d1), CMat::identity(d2, d2));
        let mats = r1
            .mats
            .iter()
            .map(|m| kron(m, &i2))
            .chain(r2.mats.iter().map(|m| kron(&i1, m)))
            .collect();
        Ok(Representation {
            algebra: LieAlgebra::direct_sum(&r1.algebra, &r2.algebra),
            space_dim: d1 * d2,
            mats,
        })
    }

    /// `ρ̃(l₁, l₂)(T) = ρ₁(l₁)·T + T·ρ₂(l₂)` of `L₁ × L₂ᵒᵖ` on `L(X₂, X₁)`,
    /// with `T` a `d₁×d₂` matrix.
    pub fn multiplication(r1: &Representation, r2: &Representation, cap: usize) -> Result<Representation> {
        let (d1, d2) = (r1.space_dim, r2.space_dim);
        Self::check_cap(d1 * d2, cap)?;
        let (i1, i2) = (CMat::identity(d1, d1), CMat::identity(d2, d2));
        let mats = r1
            .mats
            .iter()
            .map(|m| kron(m, &i2))
            .chain(r2.mats.iter().map(|m| kron(&i1, &m.transpose())))
            .collect();
        Ok(Representation {
            algebra: LieAlgebra::direct_sum(&r1.algebra, &r2.algebra.opposite()),
            space_dim: d1 * d2,
            mats,
        })
    }

    /// Block-diagonal sum of two representations of the same algebra.
    pub fn direct_sum(r1: &Representation, r2: &Representation) -> Result<Representation> {
        if r1.algebra != r2.algebra {
            return input_err("direct sum of representations of different algebras");
        }
        let (d1, d2) = (r1.space_dim, r2.space_dim);
        let mats = r1
            .mats
            .iter()
            .zip(&r2.mats)
            .map(|(a, b)| {
                let mut m = CMat::zeros(d1 + d2, d1 + d2);
                m.view_mut((0, 0), (d1, d1)).copy_from(a);
                m.view_mut((d1, d1), (d2, d2)).copy_from(b);
                m
            })
            .collect();
        Ok(Representation { algebra: r1.algebra.clone(), space_dim: d1 + d2, mats })
    }

    /// `ρ + f·I`; a representation again whenever `f` vanishes on `L²`.
    pub fn twist(&self, f: &[C64]) -> Result<Representation> {
        if f.len() != self.algebra.dim() {
            return input_err("twisting functional has the wrong length");
        }
        let id = CMat::identity(self.space_dim, self.space_dim);
        let mats = self.mats.iter().zip(f).map(|(m, &c)| m + &id * c).collect();
        Ok(Representation { algebra: self.algebra.clone(), space_dim: self.space_dim, mats })
    }

    /// `P ρ P⁻¹`.
    pub fn conjugate(&self, p: &CMat) -> Result<Representation> {
        let d = self.space_dim;
        if p.shape() != (d, d) {
            return input_err(format!("conjugating matrix must be {d}x{d}"));
        }
        let Some(pinv) = p.clone().try_inverse() else {
            return input_err("conjugating matrix is singular");
        };
        let mats = self.mats.iter().map(|m| p * m * &pinv).collect();
        Ok(Representation { algebra: self.algebra.clone(), space_dim: d, mats })
    }

    /// The same representation written over the algebra basis given by the
    /// columns of `p`.
    pub fn change_algebra_basis(&self, p: &CMat, tol: &Tolerance) -> Result<Representation> {
        let algebra = self.algebra.change_basis(p, tol)?;
        let mats = p
            .column_iter()
            .map(|col| self.act(&col.clone_owned()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Representation { algebra, space_dim: self.space_dim, mats })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{eigenvalues, r, real_matrix, sort_complex};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    pub(crate) fn affine_rep() -> Representation {
        Representation::new(
            &LieAlgebra::affine(),
            2,
            vec![real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]), real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]])],
        )
        .unwrap()
    }

    fn sorted_eigs(m: &CMat) -> Vec<f64> {
        let mut e = eigenvalues(m).unwrap();
        sort_complex(&mut e);
        e.iter().map(|z| (z.re * 1e9).round() / 1e9).collect()
    }

    #[test]
    fn validate_examples() {
        assert!(affine_rep().validate(&tol()).passed);
        let bad = Representation::new(
            &LieAlgebra::affine(),
            2,
            vec![real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]), CMat::identity(2, 2)],
        )
        .unwrap();
        let report = bad.validate(&tol());
        assert!(!report.passed);
        assert!((report.max_residual - 2f64.sqrt()).abs() < 1e-12);
        assert!(Representation::zero(&LieAlgebra::affine(), 3).validate(&tol()).passed);
    }

    #[test]
    fn shape_errors() {
        let a = LieAlgebra::affine();
        assert!(Representation::new(&a, 2, vec![CMat::identity(2, 2)]).is_err());
        assert!(Representation::new(&a, 2, vec![CMat::identity(2, 2), CMat::identity(3, 3)]).is_err());
    }

    #[test]
    fn restriction_examples() {
        let t = tol();
        let rho = affine_rep();
        let a = LieAlgebra::affine();
        let e1 = SubalgebraBasis::new(&a, real_matrix(&[&[1.0], &[0.0]]), &t).unwrap();
        let r1 = rho.restrict(&e1, &t).unwrap();
        assert_eq!(r1.algebra().dim(), 1);
        assert_eq!(r1.mats()[0], rho.mats()[0]);
        let e2 = SubalgebraBasis::new(&a, real_matrix(&[&[0.0], &[1.0]]), &t).unwrap();
        assert_eq!(rho.restrict(&e2, &t).unwrap().mats()[0], rho.mats()[1]);
        let whole = rho.restrict(&SubalgebraBasis::whole(&a), &t).unwrap();
        assert_eq!(whole.mats(), rho.mats());
        assert!(whole.algebra().validate(&t).accepted());
    }

    #[test]
    fn dual_representation() {
        let t = tol();
        let d = affine_rep().adjoint();
        assert_eq!(d.mats()[1], real_matrix(&[&[0.0, 0.0], &[1.0, 0.0]]));
        assert_eq!(d.algebra(), &LieAlgebra::affine().opposite());
        assert!(d.validate(&t).passed);
        assert_eq!(d.adjoint(), affine_rep());

        let diag = Representation::new(
            &LieAlgebra::abelian(2),
            2,
            vec![real_matrix(&[&[1.0, 0.0], &[0.0, 2.0]]), real_matrix(&[&[3.0, 0.0], &[0.0, 4.0]])],
        )
        .unwrap();
        assert_eq!(diag.adjoint().mats(), diag.mats());
    }

    #[test]
    fn multiplication_representations() {
        let t = tol();
        let rho = affine_rep();
        let left = rho.left_mult(DEFAULT_CAP).unwrap();
        let right = rho.right_mult(DEFAULT_CAP).unwrap();
        assert!(left.validate(&t).passed);
        assert!(right.validate(&t).passed);
        assert_eq!(sorted_eigs(&left.mats()[0]), vec![0.0, 0.0, 1.0, 1.0]);
        // Row-major E11, E12, E21, E22: right multiplication by diag(1,0)
        // keeps the first column of T.
        let diag: Vec<f64> = (0..4).map(|i| right.mats()[0][(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 1.0, 0.0]);

        let scalar = Representation::new(&LieAlgebra::abelian(1), 1, vec![real_matrix(&[&[3.0]])]).unwrap();
        assert_eq!(scalar.left_mult(DEFAULT_CAP).unwrap().mats()[0], real_matrix(&[&[3.0]]));

        for x in left.mats() {
            for y in right.mats() {
                assert!((x * y - y * x).norm() < 1e-12);
            }
        }
        assert!(Representation::zero(&LieAlgebra::affine(), 9).left_mult(DEFAULT_CAP).is_err());
    }

    #[test]
    fn tensor_of_diagonal_reps() {
        let t = tol();
        let a = LieAlgebra::abelian(1);
        let r1 = Representation::new(&a, 2, vec![real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]])]).unwrap();
        let r2 = Representation::new(&a, 2, vec![real_matrix(&[&[5.0, 0.0], &[0.0, 7.0]])]).unwrap();
        let tp = Representation::tensor(&r1, &r2, DEFAULT_CAP).unwrap();
        assert!(tp.validate(&t).passed);
        let pairs: Vec<(f64, f64)> = (0..4).map(|i| (tp.mats()[0][(i, i)].re, tp.mats()[1][(i, i)].re)).collect();
        assert_eq!(pairs, vec![(1.0, 5.0), (1.0, 7.0), (0.0, 5.0), (0.0, 7.0)]);

        let z = Representation::zero(&a, 1);
        let tz = Representation::tensor(&z, &r2, DEFAULT_CAP).unwrap();
        assert_eq!(tz.mats()[1], r2.mats()[0]);
        assert!(Representation::tensor(&r1, &Representation::zero(&a, 40), DEFAULT_CAP).is_err());
    }

    #[test]
    fn multiplication_rep_examples() {
        let t = tol();
        let a = LieAlgebra::abelian(1);
        let z = Representation::zero(&a, 1);
        let r2 = Representation::new(&a, 2, vec![real_matrix(&[&[5.0, 0.0], &[0.0, 7.0]])]).unwrap();
        let m = Representation::multiplication(&z, &r2, DEFAULT_CAP).unwrap();
        assert!(m.validate(&t).passed);
        assert_eq!(sorted_eigs(&m.mats()[1]), vec![5.0, 7.0]);

        let rho = affine_rep();
        let m = Representation::multiplication(&rho, &Representation::zero(&a, 1), DEFAULT_CAP).unwrap();
        assert_eq!(m.mats()[0], rho.mats()[0]);
        assert_eq!(m.mats()[1], rho.mats()[1]);

        let zz = Representation::multiplication(&z, &z, DEFAULT_CAP).unwrap();
        assert!(zz.mats().iter().all(|m| m.norm() == 0.0));

        // With X1 = X2 the first factor acts as left multiplication.
        let full = Representation::multiplication(&rho, &rho, DEFAULT_CAP).unwrap();
        assert!(full.validate(&t).passed);
        let left = rho.left_mult(DEFAULT_CAP).unwrap();
        assert_eq!(&full.mats()[..2], left.mats());
    }

    #[test]
    fn twist_and_conjugate_keep_homomorphism() {
        let t = tol();
        let rho = affine_rep();
        let tw = rho.twist(&[r(3.0), r(0.0)]).unwrap();
        assert!(tw.validate(&t).passed);
        let p = real_matrix(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(rho.conjugate(&p).unwrap().validate(&t).passed);
        let q = real_matrix(&[&[1.0, 0.0], &[1.0, 1.0]]);
        let changed = rho.change_algebra_basis(&q, &t).unwrap();
        assert!(changed.validate(&t).passed);
        assert!(Representation::adjoint_action(&LieAlgebra::heisenberg()).validate(&t).passed);
    }
}
