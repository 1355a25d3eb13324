//! Finite-dimensional complex Lie algebras given by structure constants.

use crate::numkit::{least_squares, r, sup_norm, CMat, CVec, Subspace, Tolerance, C64};
use crate::{input_err, Result};

/// A Lie algebra on the basis `e_0 … e_{n-1}` with
/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    consts: Vec<C64>,
}

/// Outcome of [`LieAlgebra::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub antisymmetry_residual: f64,
    pub jacobi_residual: f64,
    pub antisymmetric: bool,
    pub jacobi: bool,
    pub solvable: bool,
    /// Dimensions along the derived series, starting with `dim L`.
    pub derived_dims: Vec<usize>,
}

impl ValidationReport {
    /// Downstream operations only accept algebras that pass all three checks.
    pub fn accepted(&self) -> bool {
        self.antisymmetric && self.jacobi && self.solvable
    }
}

impl LieAlgebra {
    /// `consts` is indexed as `(i * n + j) * n + k`.
    pub fn new(dim: usize, consts: Vec<C64>) -> Result<Self> {
        if consts.len() != dim * dim * dim {
            return input_err(format!(
                "structure tensor of a {dim}-dimensional algebra needs {} entries, got {}",
                dim * dim * dim,
                consts.len()
            ));
        }
        if !consts.iter().all(crate::numkit::is_finite) {
            return input_err("structure constants contain non-finite entries");
        }
        Ok(LieAlgebra { dim, consts })
    }

    /// Builds the algebra from `[e_i, e_j] = v` entries (0-based, `i ≠ j`);
    /// `[e_j, e_i] = -v` is filled in. Unlisted pairs bracket to zero.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vec<C64>)]) -> Result<Self> {
        let mut consts = vec![C64::default(); dim * dim * dim];
        let mut seen = vec![false; dim * dim];
        for (i, j, v) in brackets {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim {
                return input_err(format!("bracket index ({i}, {j}) out of range for dimension {dim}"));
            }
            if i == j {
                return input_err(format!("bracket [e{i}, e{i}] is zero by antisymmetry and cannot be set"));
            }
            if v.len() != dim {
                return input_err(format!("bracket ({i}, {j}) has {} coefficients, expected {dim}", v.len()));
            }
            if seen[i * dim + j] {
                return input_err(format!("bracket ({i}, {j}) listed twice"));
            }
            seen[i * dim + j] = true;
            seen[j * dim + i] = true;
            for (k, &x) in v.iter().enumerate() {
                consts[(i * dim + j) * dim + k] = x;
                consts[(j * dim + i) * dim + k] = -x;
            }
        }
        LieAlgebra::new(dim, consts)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra { dim, consts: vec![C64::default(); dim * dim * dim] }
    }

    /// The two-dimensional non-abelian algebra, `[e1, e2] = e2`.
    pub fn affine() -> Self {
        Self::from_brackets(2, &[(0, 1, vec![r(0.0), r(1.0)])]).expect("valid")
    }

    /// `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        Self::from_brackets(3, &[(0, 1, vec![r(0.0), r(0.0), r(1.0)])]).expect("valid")
    }

    /// `[e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2` (not solvable).
    pub fn so3() -> Self {
        Self::from_brackets(
            3,
            &[
                (0, 1, vec![r(0.0), r(0.0), r(1.0)]),
                (1, 2, vec![r(1.0), r(0.0), r(0.0)]),
                (2, 0, vec![r(0.0), r(1.0), r(0.0)]),
            ],
        )
        .expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> C64 {
        self.consts[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure_tensor(&self) -> &[C64] {
        &self.consts
    }

    /// Largest structure constant in modulus.
    pub fn scale(&self) -> f64 {
        sup_norm(&self.consts)
    }

    fn check_len(&self, v: &CVec) -> Result<()> {
        if v.len() != self.dim {
            return input_err(format!("vector of length {} in a {}-dimensional algebra", v.len(), self.dim));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &CVec, y: &CVec) -> Result<CVec> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &CVec, y: &CVec) -> CVec {
        let n = self.dim;
        let mut out = CVec::zeros(n);
        for i in 0..n {
            if x[i] == C64::default() {
                continue;
            }
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == C64::default() {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    out[k] += xy * self.consts[base + k];
                }
            }
        }
        out
    }

    fn basis_bracket(&self, i: usize, j: usize) -> CVec {
        let n = self.dim;
        CVec::from_iterator(n, (0..n).map(|k| self.structure_constant(i, j, k)))
    }

    /// Matrix of `l ↦ [h, l]` in the standard basis.
    pub fn ad_matrix(&self, h: &CVec) -> Result<CMat> {
        self.check_len(h)?;
        let n = self.dim;
        let mut m = CMat::zeros(n, n);
        for l in 0..n {
            for i in 0..n {
                if h[i] == C64::default() {
                    continue;
                }
                for k in 0..n {
                    m[(k, l)] += h[i] * self.structure_constant(i, l, k);
                }
            }
        }
        Ok(m)
    }

    /// Antisymmetry and Jacobi residuals (sup norm) plus the solvability
    /// verdict. Thresholds are `10·rank_eps` scaled by the size of the
    /// structure constants.
    pub fn validate(&self, tol: &Tolerance) -> ValidationReport {
        let n = self.dim;
        let scale = self.scale().max(1.0);
        let mut anti = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    anti = anti.max((self.structure_constant(i, j, k) + self.structure_constant(j, i, k)).norm());
                }
            }
        }
        let mut jac = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let ei = crate::numkit::unit_vector(n, i);
                    let ej = crate::numkit::unit_vector(n, j);
                    let ek = crate::numkit::unit_vector(n, k);
                    let t1 = self.bracket_unchecked(&ei, &self.basis_bracket(j, k));
                    let t2 = self.bracket_unchecked(&ej, &self.basis_bracket(k, i));
                    let t3 = self.bracket_unchecked(&ek, &self.basis_bracket(i, j));
                    jac = jac.max(sup_norm((t1 + t2 + t3).as_slice()));
                }
            }
        }
        let derived_dims = match self.derived_series(tol) {
            Ok(series) => series.iter().map(Subspace::dim).collect(),
            Err(_) => vec![n],
        };
        let solvable = derived_dims.last() == Some(&0);
        ValidationReport {
            antisymmetry_residual: anti,
            jacobi_residual: jac,
            antisymmetric: anti <= 10.0 * tol.rank_eps * scale,
            jacobi: jac <= 10.0 * tol.rank_eps * scale * scale,
            solvable,
            derived_dims,
        }
    }

    /// Span of all brackets `[u, v]` with `u` from `a` and `v` from `b`.
    pub fn bracket_spaces(&self, a: &Subspace, b: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        let n = self.dim;
        let mut cols = Vec::with_capacity(a.dim() * b.dim());
        for u in a.orthonormal().column_iter() {
            for v in b.orthonormal().column_iter() {
                cols.push(self.bracket_unchecked(&u.clone_owned(), &v.clone_owned()));
            }
        }
        if cols.is_empty() {
            return Ok(Subspace::zero(n));
        }
        let m = crate::numkit::columns_to_matrix(n, &cols);
        // Relative rank decisions on a matrix of brackets would promote
        // round-off to rank when every bracket vanishes.
        if sup_norm(m.as_slice()) <= tol.rank_eps * self.scale().max(1.0) {
            return Ok(Subspace::zero(n));
        }
        Subspace::span_of(&m, tol)
    }

    fn series(&self, tol: &Tolerance, lower_central: bool) -> Result<Vec<Subspace>> {
        let full = Subspace::full(self.dim);
        let mut out = vec![full.clone()];
        loop {
            let last = out.last().expect("nonempty");
            if last.dim() == 0 {
                break;
            }
            let next = if lower_central {
                self.bracket_spaces(&full, last, tol)?
            } else {
                self.bracket_spaces(last, last, tol)?
            };
            if next.dim() == last.dim() {
                break;
            }
            out.push(next);
        }
        Ok(out)
    }

    /// `L^(0) = L`, `L^(k+1) = [L^(k), L^(k)]`, until it vanishes or stabilizes.
    pub fn derived_series(&self, tol: &Tolerance) -> Result<Vec<Subspace>> {
        self.series(tol, false)
    }

    /// `L^1 = L`, `L^(k+1) = [L, L^k]`, until it vanishes or stabilizes.
    pub fn lower_central_series(&self, tol: &Tolerance) -> Result<Vec<Subspace>> {
        self.series(tol, true)
    }

    pub fn is_solvable(&self, tol: &Tolerance) -> Result<bool> {
        Ok(self.derived_series(tol)?.last().is_none_or(|s| s.dim() == 0))
    }

    pub fn is_nilpotent(&self, tol: &Tolerance) -> Result<bool> {
        Ok(self.lower_central_series(tol)?.last().is_none_or(|s| s.dim() == 0))
    }

    /// The derived algebra `L² = [L, L]`.
    pub fn derived_subalgebra(&self, tol: &Tolerance) -> Result<Subspace> {
        let full = Subspace::full(self.dim);
        self.bracket_spaces(&full, &full, tol)
    }

    /// Same space with `[x, y]ᵒᵖ = -[x, y]`.
    pub fn opposite(&self) -> LieAlgebra {
        LieAlgebra { dim: self.dim, consts: self.consts.iter().map(|&x| -x).collect() }
    }

    /// `a × b` on the basis `(e_1^a, …, e_n^a, e_1^b, …, e_m^b)`, cross brackets zero.
    pub fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> LieAlgebra {
        let (na, nb) = (a.dim, b.dim);
        let n = na + nb;
        let mut consts = vec![C64::default(); n * n * n];
        for i in 0..na {
            for j in 0..na {
                for k in 0..na {
                    consts[(i * n + j) * n + k] = a.structure_constant(i, j, k);
                }
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                for k in 0..nb {
                    consts[((na + i) * n + na + j) * n + na + k] = b.structure_constant(i, j, k);
                }
            }
        }
        LieAlgebra { dim: n, consts }
    }

    /// The same algebra on the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &CMat, tol: &Tolerance) -> Result<LieAlgebra> {
        let n = self.dim;
        if p.shape() != (n, n) {
            return input_err(format!("change of basis must be {n}x{n}"));
        }
        if crate::numkit::rank_with_tol(p, tol)? != n {
            return input_err("change of basis matrix is singular");
        }
        let mut brackets = CMat::zeros(n, n * n);
        for i in 0..n {
            for j in 0..n {
                let b = self.bracket_unchecked(&p.column(i).clone_owned(), &p.column(j).clone_owned());
                brackets.set_column(i * n + j, &b);
            }
        }
        let coeffs = least_squares(p, &brackets, tol)?;
        let mut consts = vec![C64::default(); n * n * n];
        for ij in 0..n * n {
            for k in 0..n {
                consts[ij * n + k] = coeffs[(k, ij)];
            }
        }
        LieAlgebra::new(n, consts)
    }
}

/// A subalgebra given by a basis in the parent's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SubalgebraBasis {
    parent: LieAlgebra,
    space: Subspace,
}

impl SubalgebraBasis {
    /// Columns of `basis` must be independent and closed under the bracket.
    pub fn new(parent: &LieAlgebra, basis: CMat, tol: &Tolerance) -> Result<Self> {
        if basis.nrows() != parent.dim() {
            return input_err(format!(
                "subalgebra basis vectors have length {}, algebra has dimension {}",
                basis.nrows(),
                parent.dim()
            ));
        }
        let space = Subspace::from_basis(basis, tol)?;
        let sub = SubalgebraBasis { parent: parent.clone(), space };
        let residual = sub.closure_residual();
        if !sub.closure_check(tol) {
            return input_err(format!("subspace is not closed under the bracket (residual {residual:.3e})"));
        }
        Ok(sub)
    }

    pub(crate) fn from_space_unchecked(parent: &LieAlgebra, space: Subspace) -> Self {
        SubalgebraBasis { parent: parent.clone(), space }
    }

    pub fn whole(parent: &LieAlgebra) -> Self {
        SubalgebraBasis { parent: parent.clone(), space: Subspace::full(parent.dim()) }
    }

    pub fn parent(&self) -> &LieAlgebra {
        &self.parent
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> &CMat {
        self.space.basis()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Largest distance from a bracket of basis vectors to the subspace,
    /// normalized by `‖u‖·‖v‖·max(1, scale)`.
    pub fn closure_residual(&self) -> f64 {
        let b = self.space.basis();
        let norm = self.parent.scale().max(1.0);
        let mut worst = 0.0f64;
        for a in 0..b.ncols() {
            for c in (a + 1)..b.ncols() {
                let u = b.column(a).clone_owned();
                let v = b.column(c).clone_owned();
                let w = self.parent.bracket_unchecked(&u, &v);
                worst = worst.max(self.space.residual(&w) / (u.norm() * v.norm() * norm));
            }
        }
        worst
    }

    pub fn closure_check(&self, tol: &Tolerance) -> bool {
        self.closure_residual() <= tol.match_eps
    }

    /// Structure constants of the subalgebra in its own basis.
    pub fn induced_algebra(&self, tol: &Tolerance) -> Result<LieAlgebra> {
        let m = self.dim();
        let b = self.space.basis();
        let n = self.parent.dim();
        let mut brackets = CMat::zeros(n, m * m);
        for i in 0..m {
            for j in 0..m {
                let w = self.parent.bracket_unchecked(&b.column(i).clone_owned(), &b.column(j).clone_owned());
                brackets.set_column(i * m + j, &w);
            }
        }
        let coeffs = least_squares(b, &brackets, tol)?;
        let mut consts = vec![C64::default(); m * m * m];
        for ij in 0..m * m {
            for k in 0..m {
                consts[ij * m + k] = coeffs[(k, ij)];
            }
        }
        LieAlgebra::new(m, consts)
    }

    /// Restriction `L* → E*`: the values `f(u_a)` on the basis vectors.
    pub fn restrict_functional(&self, f: &[C64]) -> Vec<C64> {
        self.space
            .basis()
            .column_iter()
            .map(|u| u.iter().zip(f).map(|(x, y)| x * y).sum())
            .collect()
    }
}
