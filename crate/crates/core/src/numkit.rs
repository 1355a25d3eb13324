//! Dense complex linear algebra with explicit tolerances.
//!
//! Every rank decision in the crate goes through this module. Ranks are
//! decided from singular values, either relative to the largest singular
//! value of the matrix at hand ([`rank_with_tol`], [`kernel_basis`]) or
//! against an absolute threshold supplied by a caller that knows the scale
//! of the operators involved ([`rank_below`], [`kernel_with_threshold`]).

use std::collections::HashMap;

use faer::{Mat, MatRef};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{input_err, numerical_err, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;


/// Rank and matching thresholds.
///
/// `rank_eps` is relative: a singular value counts toward the rank when it
/// exceeds `rank_eps` times the reference scale. `match_eps` is an absolute
/// distance used to identify eigenvalues, roots and characters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_eps: f64,
    pub match_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rank_eps: 1e-9, match_eps: 1e-7 }
    }
}

impl Tolerance {
    pub fn new(rank_eps: f64, match_eps: f64) -> Result<Self> {
        if !(rank_eps.is_finite() && rank_eps > 0.0) {
            return input_err(format!("rank_eps must be positive and finite, got {rank_eps}"));
        }
        if !(match_eps.is_finite() && match_eps > 0.0) {
            return input_err(format!("match_eps must be positive and finite, got {match_eps}"));
        }
        Ok(Tolerance { rank_eps, match_eps })
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Builds a complex matrix from real rows.
pub fn real_matrix(rows: &[&[f64]]) -> CMat {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |row| row.len());
    CMat::from_fn(nrows, ncols, |i, j| r(rows[i][j]))
}

/// Builds a complex vector from real entries.
pub fn real_vector(entries: &[f64]) -> CVec {
    CVec::from_iterator(entries.len(), entries.iter().map(|&x| r(x)))
}

/// The `i`-th standard basis vector of length `n`.
pub fn unit_vector(n: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[i] = r(1.0);
    v
}

pub fn is_finite(z: &C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn ensure_finite(m: &CMat, what: &str) -> Result<()> {
    if m.iter().all(is_finite) {
        Ok(())
    } else {
        input_err(format!("{what} contains non-finite entries"))
    }
}

fn ensure_square(m: &CMat, what: &str) -> Result<()> {
    if m.nrows() == m.ncols() {
        Ok(())
    } else {
        input_err(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols()))
    }
}

fn to_faer(m: &CMat) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, C64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full singular value decomposition `m = U·Σ·Vᴴ` with square `U`, `V`.
struct FullSvd {
    u: CMat,
    s: Vec<f64>,
    v: CMat,
}

fn svd(m: &CMat) -> Result<FullSvd> {
    let f = to_faer(m);
    let Ok(d) = f.svd() else {
        return numerical_err(format!("SVD of a {}x{} matrix did not converge", m.nrows(), m.ncols()));
    };
    let s = (0..d.S().dim()).map(|i| d.S()[i].re).collect();
    Ok(FullSvd { u: from_faer(d.U()), s, v: from_faer(d.V()) })
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    ensure_finite(m, "matrix")?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    match to_faer(m).singular_values() {
        Ok(s) => Ok(s),
        Err(_) => numerical_err(format!("SVD of a {}x{} matrix did not converge", m.nrows(), m.ncols())),
    }
}

/// Spectral norm (largest singular value); zero for empty matrices.
pub fn norm2(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).ok().and_then(|s| s.first().copied()).unwrap_or_else(|| m.norm())
}

/// Number of singular values strictly above `rank_eps` times the largest one.
pub fn rank_with_tol(m: &CMat, tol: &Tolerance) -> Result<usize> {
    let s = singular_values(m)?;
    let Some(&top) = s.first() else { return Ok(0) };
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > tol.rank_eps * top).count())
}

/// Number of singular values strictly above an absolute threshold.
pub fn rank_below(m: &CMat, threshold: f64) -> Result<usize> {
    Ok(singular_values(m)?.iter().filter(|&&x| x > threshold).count())
}

/// Kernel of `m`, deciding rank relative to the largest singular value.
pub fn kernel_basis(m: &CMat, tol: &Tolerance) -> Result<Subspace> {
    ensure_finite(m, "matrix")?;
    let top = singular_values(m)?.first().copied().unwrap_or(0.0);
    kernel_with_threshold(m, tol.rank_eps * top)
}

/// Kernel of `m`: right singular vectors whose singular value is at most
/// `threshold` (zero-padded so that wide matrices expose their full kernel).
pub fn kernel_with_threshold(m: &CMat, threshold: f64) -> Result<Subspace> {
    ensure_finite(m, "matrix")?;
    let n = m.ncols();
    if n == 0 {
        return Ok(Subspace::zero(0));
    }
    if m.nrows() == 0 {
        return Ok(Subspace::full(n));
    }
    let d = svd(m)?;
    let cols: Vec<CVec> = (0..n)
        .filter(|&j| d.s.get(j).is_none_or(|&sv| sv <= threshold))
        .map(|j| d.v.column(j).clone_owned())
        .collect();
    Ok(Subspace::from_orthonormal(n, columns_to_matrix(n, &cols)))
}

pub fn columns_to_matrix(nrows: usize, cols: &[CVec]) -> CMat {
    CMat::from_fn(nrows, cols.len(), |i, j| cols[j][i])
}

/// Eigenvalues, sorted by `(re, im)`.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    ensure_square(m, "matrix")?;
    ensure_finite(m, "matrix")?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let Ok(mut vals) = to_faer(m).eigenvalues() else {
        return numerical_err(format!("eigenvalue iteration on a {n}x{n} matrix did not converge"));
    };
    sort_complex(&mut vals);
    Ok(vals)
}

pub fn cmp_complex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn sort_complex(vals: &mut [C64]) {
    vals.sort_by(cmp_complex);
}

/// Lexicographic order on coordinate vectors, by `(re, im)` per entry.
pub fn cmp_coords(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = cmp_complex(x, y);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Sup-norm distance between coordinate vectors (modulus per entry).
pub fn sup_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn sup_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Least-squares solution of `a x = b` through the pseudo-inverse.
pub fn least_squares(a: &CMat, b: &CMat, tol: &Tolerance) -> Result<CMat> {
    ensure_finite(a, "matrix")?;
    ensure_finite(b, "right-hand side")?;
    if a.nrows() != b.nrows() {
        return input_err("least squares: row mismatch");
    }
    if a.ncols() == 0 {
        return Ok(CMat::zeros(0, b.ncols()));
    }
    let d = svd(a)?;
    let top = d.s.first().copied().unwrap_or(0.0);
    let mut x = CMat::zeros(a.ncols(), b.ncols());
    for (i, &sv) in d.s.iter().enumerate() {
        if sv > tol.rank_eps * top {
            let coeff = d.u.column(i).adjoint() * b / C64::new(sv, 0.0);
            x += d.v.column(i) * coeff;
        }
    }
    Ok(x)
}

/// A linear subspace of `ℂ^n`.
///
/// Keeps the basis it was built from (so coordinates stay meaningful to the
/// caller) together with an orthonormal basis of the same span.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: CMat,
    ortho: CMat,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: CMat::zeros(ambient, 0), ortho: CMat::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        let id = CMat::identity(ambient, ambient);
        Subspace { ambient, basis: id.clone(), ortho: id }
    }

    pub(crate) fn from_orthonormal(ambient: usize, q: CMat) -> Self {
        Subspace { ambient, basis: q.clone(), ortho: q }
    }

    /// Uses the columns of `cols` as the basis; they must be linearly
    /// independent at `tol`.
    pub fn from_basis(cols: CMat, tol: &Tolerance) -> Result<Self> {
        ensure_finite(&cols, "subspace basis")?;
        let ambient = cols.nrows();
        if cols.ncols() == 0 {
            return Ok(Subspace::zero(ambient));
        }
        let rank = rank_with_tol(&cols, tol)?;
        if rank != cols.ncols() {
            return input_err(format!(
                "subspace basis has {} columns but rank {rank}",
                cols.ncols()
            ));
        }
        let ortho = orthonormal_span(&cols, tol)?;
        Ok(Subspace { ambient, basis: cols, ortho })
    }

    /// The span of the columns of `cols`, with an orthonormal basis.
    pub fn span_of(cols: &CMat, tol: &Tolerance) -> Result<Self> {
        ensure_finite(cols, "spanning set")?;
        let q = orthonormal_span(cols, tol)?;
        Ok(Subspace::from_orthonormal(cols.nrows(), q))
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// The basis as supplied at construction.
    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// Orthonormal basis of the same span.
    pub fn orthonormal(&self) -> &CMat {
        &self.ortho
    }

    /// Distance from `v` to the subspace.
    pub fn residual(&self, v: &CVec) -> f64 {
        let proj = &self.ortho * (self.ortho.adjoint() * v);
        (v - proj).norm()
    }

    /// `v` lies in the subspace when its residual is at most
    /// `match_eps · ‖v‖`.
    pub fn contains(&self, v: &CVec, tol: &Tolerance) -> bool {
        v.len() == self.ambient && self.residual(v) <= tol.match_eps * v.norm()
    }

    pub fn contains_subspace(&self, other: &Subspace, tol: &Tolerance) -> bool {
        other.ambient == self.ambient
            && other.ortho.column_iter().all(|col| self.contains(&col.clone_owned(), tol))
    }

    pub fn same_span(&self, other: &Subspace, tol: &Tolerance) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other, tol)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return input_err(format!(
                "ambient dimension mismatch: {} vs {}",
                self.ambient, other.ambient
            ));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.check_ambient(other)?;
        let cat = hcat(&self.ortho, &other.ortho);
        Subspace::span_of(&cat, tol)
    }

    /// Intersection via the kernel of `[A  -B]` on orthonormal bases.
    pub fn intersection(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        let cat = hcat(&self.ortho, &(-&other.ortho));
        let k = kernel_basis(&cat, tol)?;
        let top = k.orthonormal().rows(0, self.dim());
        let vecs = &self.ortho * top;
        Subspace::span_of(&vecs, tol)
    }

    /// Matrix of `op` compressed to the subspace, `Qᴴ op Q` on the
    /// orthonormal basis. Exact restriction when the subspace is invariant.
    pub fn compress(&self, op: &CMat) -> CMat {
        self.ortho.adjoint() * op * &self.ortho
    }

    /// Coordinates of `v` in the stored basis (least squares).
    pub fn coordinates(&self, v: &CVec, tol: &Tolerance) -> Result<CVec> {
        let b = CMat::from_column_slice(v.len(), 1, v.as_slice());
        let x = least_squares(&self.basis, &b, tol)?;
        Ok(x.column(0).clone_owned())
    }
}

pub fn hcat(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows().max(b.nrows());
    let mut out = CMat::zeros(n, a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn vcat(blocks: &[CMat]) -> CMat {
    let ncols = blocks.first().map_or(0, |b| b.ncols());
    let nrows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(nrows, ncols);
    let mut row = 0;
    for b in blocks {
        out.view_mut((row, 0), b.shape()).copy_from(b);
        row += b.nrows();
    }
    out
}

fn orthonormal_span(cols: &CMat, tol: &Tolerance) -> Result<CMat> {
    let n = cols.nrows();
    if cols.ncols() == 0 || n == 0 {
        return Ok(CMat::zeros(n, 0));
    }
    let d = svd(cols)?;
    let top = d.s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(CMat::zeros(n, 0));
    }
    let keep: Vec<CVec> = d
        .s
        .iter()
        .enumerate()
        .filter(|(_, &sv)| sv > tol.rank_eps * top)
        .map(|(i, _)| d.u.column(i).clone_owned())
        .collect();
    Ok(columns_to_matrix(n, &keep))
}

/// Generalized kernel `ker aᵖ` for `p = n`, grown one step at a time:
/// `K_{j+1} = { v : a v ∈ K_j }`. Each step is a rank decision on `a` itself
/// rather than on a high power of it.
pub fn generalized_kernel(a: &CMat, threshold: f64) -> Result<Subspace> {
    ensure_square(a, "operator")?;
    let n = a.nrows();
    let mut q = CMat::zeros(n, 0);
    while q.ncols() < n {
        // New directions are sought only in the orthogonal complement of the
        // current space: x = Q⊥y with A·x ∈ span(Q).
        let complement = if q.ncols() == 0 {
            CMat::identity(n, n)
        } else {
            kernel_with_threshold(&q.adjoint(), 0.5)?.orthonormal().clone()
        };
        let pa = (a - &q * (q.adjoint() * a)) * &complement;
        let k = kernel_with_threshold(&pa, threshold)?;
        if k.dim() == 0 {
            break;
        }
        q = hcat(&q, &(&complement * k.orthonormal()));
    }
    Ok(Subspace::from_orthonormal(n, q))
}

/// One generalized eigenspace.
#[derive(Debug, Clone)]
pub struct EigenBlock {
    pub value: C64,
    pub space: Subspace,
}

#[derive(Debug, Clone)]
pub struct GeneralizedEigenspaces {
    pub blocks: Vec<EigenBlock>,
    /// Set when no clustering reconciled eigenvalue counts with generalized
    /// kernel dimensions, or when two reported eigenvalues sit within
    /// `2·match_eps` of each other.
    pub ambiguous: bool,
}

impl GeneralizedEigenspaces {
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.space.dim()).sum()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = i;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let root = self.find(i);
            by_root[root].push(i);
        }
        by_root.into_iter().filter(|g| !g.is_empty()).collect()
    }
}

fn mean(vals: &[C64], members: &[usize]) -> C64 {
    let sum: C64 = members.iter().map(|&i| vals[i]).sum();
    sum / members.len() as f64
}

/// Generalized eigenspaces of a square matrix.
///
/// Eigenvalue approximations are clustered by single linkage. The finest
/// clustering uses radius `match_eps`; coarser clusterings follow the
/// single-linkage merge order. Each candidate clustering is checked by
/// comparing every cluster's size with the dimension of the generalized
/// kernel of `m − μI` at its mean `μ`, and the coarsest consistent clustering
/// is returned. This keeps a perturbed Jordan block (whose computed
/// eigenvalues scatter well beyond `match_eps`) together as one eigenvalue.
pub fn generalized_eigenspaces(m: &CMat, tol: &Tolerance) -> Result<GeneralizedEigenspaces> {
    generalized_eigenspaces_at_scale(m, 0.0, tol)
}

/// As [`generalized_eigenspaces`], with rank decisions made relative to at
/// least `scale`. Used on compressions of a larger operator, whose own norm
/// may be pure round-off.
pub fn generalized_eigenspaces_at_scale(m: &CMat, scale: f64, tol: &Tolerance) -> Result<GeneralizedEigenspaces> {
    ensure_square(m, "matrix")?;
    ensure_finite(m, "matrix")?;
    let n = m.nrows();
    if n == 0 {
        return Ok(GeneralizedEigenspaces { blocks: Vec::new(), ambiguous: false });
    }
    let vals = eigenvalues(m)?;
    let scale = norm2(m).max(scale);

    // Single-linkage merge order (Kruskal on the complete graph).
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push(((vals[i] - vals[j]).norm(), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut uf = UnionFind::new(n);
    let mut rest = edges.into_iter().peekable();
    while let Some(&(d, i, j)) = rest.peek() {
        if d > tol.match_eps {
            break;
        }
        uf.union(i, j);
        rest.next();
    }

    let mut cache: HashMap<Vec<usize>, (C64, Subspace)> = HashMap::new();
    let mut space_of = |members: &[usize]| -> Result<(C64, Subspace)> {
        if let Some(hit) = cache.get(members) {
            return Ok(hit.clone());
        }
        let mu = mean(&vals, members);
        let shifted = m - CMat::identity(n, n) * mu;
        let thr = tol.rank_eps * scale.max(mu.norm()).max(1.0);
        let space = generalized_kernel(&shifted, thr)?;
        cache.insert(members.to_vec(), (mu, space.clone()));
        Ok((mu, space))
    };

    let mut evaluate = |groups: &[Vec<usize>]| -> Result<Option<Vec<EigenBlock>>> {
        let mut blocks = Vec::with_capacity(groups.len());
        for g in groups {
            let (mu, space) = space_of(g)?;
            if space.dim() != g.len() {
                return Ok(None);
            }
            blocks.push(EigenBlock { value: mu, space });
        }
        Ok(Some(blocks))
    };

    let finest = uf.groups();
    let mut best = evaluate(&finest)?;
    for (_, i, j) in rest {
        if !uf.union(i, j) {
            continue;
        }
        let groups = uf.groups();
        if let Some(blocks) = evaluate(&groups)? {
            best = Some(blocks);
        }
        if groups.len() == 1 {
            break;
        }
    }

    let (mut blocks, mut ambiguous) = match best {
        Some(b) => (b, false),
        None => {
            // Nothing consistent: report the finest clustering and flag it.
            let mut uf = UnionFind::new(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if (vals[i] - vals[j]).norm() <= tol.match_eps {
                        uf.union(i, j);
                    }
                }
            }
            let mut blocks = Vec::new();
            for g in uf.groups() {
                let (mu, space) = space_of(&g)?;
                blocks.push(EigenBlock { value: mu, space });
            }
            (blocks, true)
        }
    };
    blocks.sort_by(|a, b| cmp_complex(&a.value, &b.value));
    for w in blocks.windows(2) {
        if (w[0].value - w[1].value).norm() <= 2.0 * tol.match_eps {
            ambiguous = true;
        }
    }
    Ok(GeneralizedEigenspaces { blocks, ambiguous })
}

/// One joint generalized eigenspace of a family of operators.
#[derive(Debug, Clone)]
pub struct JointBlock {
    /// Eigenvalue of each operator on the block, in operator order.
    pub values: Vec<C64>,
    pub space: Subspace,
}

/// Simultaneous generalized-eigenspace refinement of `ops`, which must
/// pairwise preserve each other's generalized eigenspaces (true for the
/// images of a nilpotent Lie algebra). Spaces are split operator by operator
/// in index order; the reported eigenvalue of each operator on a block is the
/// trace of its compression divided by the block dimension.
pub fn joint_generalized_eigenspaces(ops: &[CMat], ambient: usize, tol: &Tolerance) -> Result<Vec<JointBlock>> {
    for op in ops {
        if op.shape() != (ambient, ambient) {
            return input_err(format!("operator is {}x{}, expected {ambient}x{ambient}", op.nrows(), op.ncols()));
        }
        ensure_finite(op, "operator")?;
    }
    if ambient == 0 {
        return Ok(Vec::new());
    }
    let mut spaces = vec![Subspace::full(ambient)];
    for op in ops {
        let op_scale = norm2(op);
        let mut next = Vec::with_capacity(spaces.len());
        for space in &spaces {
            let compressed = space.compress(op);
            let split = generalized_eigenspaces_at_scale(&compressed, op_scale, tol)?;
            if split.total_dim() != space.dim() {
                return numerical_err(format!(
                    "generalized eigenspaces of a {}-dimensional block add up to {}",
                    space.dim(),
                    split.total_dim()
                ));
            }
            for block in split.blocks {
                let q = space.orthonormal() * block.space.orthonormal();
                next.push(Subspace::from_orthonormal(ambient, q));
            }
        }
        spaces = next;
    }
    let mut blocks: Vec<JointBlock> = spaces
        .into_iter()
        .map(|space| {
            let dim = space.dim() as f64;
            let values = ops.iter().map(|op| space.compress(op).trace() / dim).collect();
            JointBlock { values, space }
        })
        .collect();
    blocks.sort_by(|a, b| cmp_coords(&a.values, &b.values));
    let total: usize = blocks.iter().map(|b| b.space.dim()).sum();
    if total != ambient {
        return numerical_err(format!("joint refinement covers {total} of {ambient} dimensions"));
    }
    Ok(blocks)
}
