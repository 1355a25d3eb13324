//! Cartan joint spectra of a representation `ρ: L → L(X)`.
//!
//! Every spectrum is assembled from the restriction `ρ|_H` to a Cartan
//! subalgebra `H`: a functional `f` on `L` belongs to it when `f|_H` lies in
//! the corresponding joint spectrum of `ρ|_H` and `f` vanishes on `H*`.
//! Candidates are the joint weights of `ρ|_H` (a finite set); membership is
//! then decided from the homology of the twisted Koszul complex.
//! [`spectrum_by_common_eigenvectors`] computes the Taylor spectrum along a
//! second route that never builds a complex.

use serde::{Deserialize, Serialize};

use crate::cartan::{root_decomposition, CartanDecomposition};
use crate::koszul::{build_complex, homology_dims, HomologyProfile, Side};
use crate::liealg::{LieAlgebra, SubalgebraBasis};
use crate::numkit::{
    cmp_coords, generalized_eigenspaces, joint_generalized_eigenspaces, kernel_with_threshold, norm2, sup_distance,
    vcat, CMat, CVec, Subspace, Tolerance, C64,
};
use crate::rep::{Representation, DEFAULT_CAP};
use crate::{input_err, numerical_err, Result};

/// Reason attached to every essential spectrum.
pub const FREDHOLM_TRIVIAL: &str = "finite_dimensional_fredholm_trivial";

/// The spectrum families. Levels `k` run over `0..=dim L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum SpectrumKind {
    Taylor,
    SlodkowskiDelta(usize),
    SlodkowskiPi(usize),
    Split,
    SplitDelta(usize),
    SplitPi(usize),
    EssentialTaylor,
    EssentialDelta(usize),
    EssentialPi(usize),
    EssentialSplit,
    EssentialSplitDelta(usize),
    EssentialSplitPi(usize),
}

impl SpectrumKind {
    pub fn is_essential(&self) -> bool {
        matches!(
            self,
            SpectrumKind::EssentialTaylor
                | SpectrumKind::EssentialDelta(_)
                | SpectrumKind::EssentialPi(_)
                | SpectrumKind::EssentialSplit
                | SpectrumKind::EssentialSplitDelta(_)
                | SpectrumKind::EssentialSplitPi(_)
        )
    }

    pub fn level(&self) -> Option<usize> {
        match *self {
            SpectrumKind::SlodkowskiDelta(k)
            | SpectrumKind::SlodkowskiPi(k)
            | SpectrumKind::SplitDelta(k)
            | SpectrumKind::SplitPi(k)
            | SpectrumKind::EssentialDelta(k)
            | SpectrumKind::EssentialPi(k)
            | SpectrumKind::EssentialSplitDelta(k)
            | SpectrumKind::EssentialSplitPi(k) => Some(k),
            _ => None,
        }
    }

    /// Every non-essential kind for an algebra of dimension `n`.
    pub fn all_regular(n: usize) -> Vec<SpectrumKind> {
        let mut out = vec![SpectrumKind::Taylor, SpectrumKind::Split];
        for k in 0..=n {
            out.extend([
                SpectrumKind::SlodkowskiDelta(k),
                SpectrumKind::SlodkowskiPi(k),
                SpectrumKind::SplitDelta(k),
                SpectrumKind::SplitPi(k),
            ]);
        }
        out
    }

    /// Every essential kind for an algebra of dimension `n`.
    pub fn all_essential(n: usize) -> Vec<SpectrumKind> {
        let mut out = vec![SpectrumKind::EssentialTaylor, SpectrumKind::EssentialSplit];
        for k in 0..=n {
            out.extend([
                SpectrumKind::EssentialDelta(k),
                SpectrumKind::EssentialPi(k),
                SpectrumKind::EssentialSplitDelta(k),
                SpectrumKind::EssentialSplitPi(k),
            ]);
        }
        out
    }

    /// Snake-case family name without the level.
    pub fn family(&self) -> &'static str {
        match self {
            SpectrumKind::Taylor => "taylor",
            SpectrumKind::SlodkowskiDelta(_) | SpectrumKind::SlodkowskiPi(_) => "slodkowski",
            SpectrumKind::Split => "split",
            SpectrumKind::SplitDelta(_) | SpectrumKind::SplitPi(_) => "split",
            SpectrumKind::EssentialTaylor => "essential_taylor",
            SpectrumKind::EssentialDelta(_) | SpectrumKind::EssentialPi(_) => "essential_slodkowski",
            SpectrumKind::EssentialSplit => "essential_split",
            SpectrumKind::EssentialSplitDelta(_) | SpectrumKind::EssentialSplitPi(_) => "essential_split",
        }
    }

    /// Parses a family name plus optional level and side, as used on the
    /// command line (`taylor`, `slodkowski --k 1 --side pi`, `split`, …).
    pub fn from_parts(family: &str, k: Option<usize>, side: Option<Side>) -> Result<SpectrumKind> {
        let side = side.unwrap_or(Side::Delta);
        let levelled = |delta: fn(usize) -> SpectrumKind, pi: fn(usize) -> SpectrumKind| -> Result<SpectrumKind> {
            let Some(k) = k else {
                return input_err(format!("spectrum kind '{family}' needs a level k"));
            };
            Ok(match side {
                Side::Delta => delta(k),
                Side::Pi => pi(k),
            })
        };
        match family {
            "taylor" => Ok(SpectrumKind::Taylor),
            "slodkowski" => levelled(SpectrumKind::SlodkowskiDelta, SpectrumKind::SlodkowskiPi),
            "split" => match k {
                None => Ok(SpectrumKind::Split),
                Some(_) => levelled(SpectrumKind::SplitDelta, SpectrumKind::SplitPi),
            },
            "essential_taylor" => Ok(SpectrumKind::EssentialTaylor),
            "essential_slodkowski" => levelled(SpectrumKind::EssentialDelta, SpectrumKind::EssentialPi),
            "essential_split" => match k {
                None => Ok(SpectrumKind::EssentialSplit),
                Some(_) => levelled(SpectrumKind::EssentialSplitDelta, SpectrumKind::EssentialSplitPi),
            },
            other => input_err(format!("unknown spectrum kind '{other}'")),
        }
    }
}

impl std::fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumKind::SlodkowskiDelta(k) => write!(f, "slodkowski_delta({k})"),
            SpectrumKind::SlodkowskiPi(k) => write!(f, "slodkowski_pi({k})"),
            SpectrumKind::SplitDelta(k) => write!(f, "split_delta({k})"),
            SpectrumKind::SplitPi(k) => write!(f, "split_pi({k})"),
            SpectrumKind::EssentialDelta(k) => write!(f, "essential_delta({k})"),
            SpectrumKind::EssentialPi(k) => write!(f, "essential_pi({k})"),
            SpectrumKind::EssentialSplitDelta(k) => write!(f, "essential_split_delta({k})"),
            SpectrumKind::EssentialSplitPi(k) => write!(f, "essential_split_pi({k})"),
            other => f.write_str(other.family()),
        }
    }
}

/// A functional on `L`, in the coordinates `f(e_1), …, f(e_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Character {
    pub coords: Vec<C64>,
    /// `f(L²) = 0` at tolerance.
    pub is_character: bool,
    /// `max |f(v)|` over an orthonormal basis `v` of `L²`.
    pub derived_residual: f64,
}

impl Character {
    pub fn new(alg: &LieAlgebra, coords: Vec<C64>, tol: &Tolerance) -> Result<Character> {
        if coords.len() != alg.dim() {
            return input_err(format!("functional has {} coordinates, algebra has dimension {}", coords.len(), alg.dim()));
        }
        let derived = alg.derived_subalgebra(tol)?;
        let derived_residual = derived
            .orthonormal()
            .column_iter()
            .map(|v| v.iter().zip(&coords).map(|(x, y)| x * y).sum::<C64>().norm())
            .fold(0.0, f64::max);
        Ok(Character { coords, is_character: derived_residual <= tol.match_eps, derived_residual })
    }
}

/// Why a point belongs to a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    /// Homology of the Koszul complex of `ρ|_H` twisted by `f|_H`.
    Homology { profile: HomologyProfile, complex_residual: f64 },
    /// A common eigenvector `x` with `ρ(h)x = f(h)x` on the basis of `H`.
    Eigenvector { witness: Vec<C64>, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub character: Character,
    pub evidence: Evidence,
    /// Dimension of the generalized joint weight space (diagnostic only).
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub kind: SpectrumKind,
    pub points: Vec<SpectrumPoint>,
    pub tolerance: Tolerance,
    /// Basis vectors of the Cartan subalgebra used, in `L` coordinates.
    pub cartan_basis: Vec<Vec<C64>>,
    pub reason: Option<String>,
}

impl SpectrumSet {
    pub fn coords(&self) -> Vec<Vec<C64>> {
        self.points.iter().map(|p| p.character.coords.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

/// Hausdorff distance between finite point sets in the sup norm.
/// Zero for two empty sets, infinite when exactly one is empty.
pub fn hausdorff_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed_distance(a, b).max(directed_distance(b, a)),
    }
}

/// `sup_{x∈a} min_{y∈b} ‖x − y‖∞`; zero when `a` is empty.
pub fn directed_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| sup_distance(x, y)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// A joint weight of a representation of a nilpotent algebra.
#[derive(Debug, Clone)]
pub struct Weight {
    /// `f(h_j)` on the basis of `H`.
    pub values: Vec<C64>,
    pub multiplicity: usize,
    /// Unit common eigenvector inside the weight space.
    pub witness: CVec,
    /// `max_j ‖ρ(h_j)x − f(h_j)x‖`.
    pub residual: f64,
}

fn rep_scale(mats: &[CMat]) -> f64 {
    mats.iter().map(norm2).fold(0.0, f64::max)
}

fn eigen_residual(mats: &[CMat], values: &[C64], x: &CVec) -> f64 {
    mats.iter()
        .zip(values)
        .map(|(m, &v)| (m * x - x * v).norm())
        .fold(0.0, f64::max)
}

/// Common eigenvector inside `space` for the given eigenvalues: the kernel
/// of the stacked compressed operators, or the least singular direction when
/// round-off hides the kernel.
fn common_eigenvector(mats: &[CMat], values: &[C64], space: &Subspace, threshold: f64) -> Result<CVec> {
    let s = space.dim();
    let stacked = vcat(
        &mats
            .iter()
            .zip(values)
            .map(|(m, &v)| space.compress(m) - CMat::identity(s, s) * v)
            .collect::<Vec<_>>(),
    );
    let k = kernel_with_threshold(&stacked, threshold)?;
    let y = if k.dim() > 0 {
        k.orthonormal().column(0).clone_owned()
    } else {
        let all = kernel_with_threshold(&stacked, f64::INFINITY)?;
        all.orthonormal().column(s - 1).clone_owned()
    };
    let x = space.orthonormal() * y;
    let norm = x.norm();
    Ok(x / C64::new(norm, 0.0))
}

/// Joint weights of a representation of a nilpotent algebra `H`, by
/// simultaneous generalized-eigenspace refinement over the basis of `H`.
pub fn weights_of_nilpotent_rep(h_rep: &Representation, tol: &Tolerance) -> Result<Vec<Weight>> {
    if !h_rep.algebra().is_nilpotent(tol)? {
        return input_err("weights are only defined here for nilpotent algebras");
    }
    let report = h_rep.validate(tol);
    if !report.passed {
        return input_err(format!("representation fails the homomorphism law (residual {:.3e})", report.max_residual));
    }
    let d = h_rep.space_dim();
    let mats = h_rep.mats();
    if mats.is_empty() {
        let x = crate::numkit::unit_vector(d, 0);
        return Ok(vec![Weight { values: Vec::new(), multiplicity: d, witness: x, residual: 0.0 }]);
    }
    let blocks = joint_generalized_eigenspaces(mats, d, tol)?;
    let threshold = tol.rank_eps * rep_scale(mats).max(1.0);
    blocks
        .into_iter()
        .map(|b| {
            let witness = common_eigenvector(mats, &b.values, &b.space, threshold)?;
            let residual = eigen_residual(mats, &b.values, &witness);
            Ok(Weight { values: b.values, multiplicity: b.space.dim(), witness, residual })
        })
        .collect()
}

fn ensure_compatible(r: &Representation, cd: &CartanDecomposition, tol: &Tolerance) -> Result<()> {
    if r.algebra() != cd.algebra() {
        return input_err("the Cartan decomposition belongs to a different algebra");
    }
    let alg = r.algebra().validate(tol);
    if !alg.accepted() {
        return input_err("the algebra is not a valid solvable Lie algebra");
    }
    let report = r.validate(tol);
    if !report.passed {
        return input_err(format!("representation fails the homomorphism law (residual {:.3e})", report.max_residual));
    }
    Ok(())
}

/// A candidate character together with its Koszul homology.
#[derive(Debug, Clone)]
pub struct KoszulCandidate {
    pub character: Character,
    pub weight: Vec<C64>,
    pub profile: HomologyProfile,
    pub complex_residual: f64,
    pub multiplicity: usize,
}

/// Lifts every weight of `ρ|_H` to `L` and computes the homology of its
/// twisted Koszul complex. All spectra of the Taylor/Słodkowski families are
/// read off this list.
pub fn koszul_candidates(r: &Representation, cd: &CartanDecomposition, tol: &Tolerance) -> Result<Vec<KoszulCandidate>> {
    ensure_compatible(r, cd, tol)?;
    let h_rep = r.restrict(cd.h(), tol)?;
    let weights = weights_of_nilpotent_rep(&h_rep, tol)?;
    let mut out = Vec::with_capacity(weights.len());
    for w in weights {
        let complex = build_complex(&h_rep, &w.values, tol)?;
        let profile = homology_dims(&complex, tol)?;
        let coords = cd.lift(&w.values, tol)?;
        out.push(KoszulCandidate {
            character: Character::new(r.algebra(), coords, tol)?,
            weight: w.values,
            profile,
            complex_residual: complex.relative_residual(),
            multiplicity: w.multiplicity,
        });
    }
    Ok(out)
}

fn merge_points(mut points: Vec<SpectrumPoint>, tol: &Tolerance) -> Vec<SpectrumPoint> {
    points.sort_by(|a, b| cmp_coords(&a.character.coords, &b.character.coords));
    let mut out: Vec<SpectrumPoint> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(q) = out
            .iter_mut()
            .find(|q| sup_distance(&q.character.coords, &p.character.coords) <= tol.match_eps)
        {
            q.multiplicity += p.multiplicity;
        } else {
            out.push(p);
        }
    }
    out
}

fn cartan_basis_of(cd: &CartanDecomposition) -> Vec<Vec<C64>> {
    cd.h().basis().column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn assemble(
    kind: SpectrumKind,
    candidates: &[KoszulCandidate],
    cd: &CartanDecomposition,
    tol: &Tolerance,
    member: impl Fn(&HomologyProfile) -> Result<bool>,
) -> Result<SpectrumSet> {
    let mut points = Vec::new();
    for c in candidates {
        if member(&c.profile)? {
            points.push(SpectrumPoint {
                character: c.character.clone(),
                evidence: Evidence::Homology { profile: c.profile.clone(), complex_residual: c.complex_residual },
                multiplicity: c.multiplicity,
            });
        }
    }
    Ok(SpectrumSet {
        kind,
        points: merge_points(points, tol),
        tolerance: *tol,
        cartan_basis: cartan_basis_of(cd),
        reason: None,
    })
}

fn check_level(alg: &LieAlgebra, k: usize) -> Result<()> {
    if k > alg.dim() {
        return input_err(format!("level k = {k} exceeds dim L = {}", alg.dim()));
    }
    Ok(())
}

/// `Σ(ρ)`: lifted weights whose twisted complex is not exact.
pub fn cartan_taylor(r: &Representation, cd: &CartanDecomposition, tol: &Tolerance) -> Result<SpectrumSet> {
    let cands = koszul_candidates(r, cd, tol)?;
    taylor_from_candidates(&cands, cd, tol)
}

pub fn taylor_from_candidates(cands: &[KoszulCandidate], cd: &CartanDecomposition, tol: &Tolerance) -> Result<SpectrumSet> {
    assemble(SpectrumKind::Taylor, cands, cd, tol, |p| Ok(p.taylor_membership()))
}

/// `Σ_{δ,k}(ρ)` or `Σ_{π,k}(ρ)`, `0 ≤ k ≤ dim L`. Levels above `dim H`
/// inspect the whole complex, so `k = dim L` gives `Σ(ρ)` on both sides.
pub fn cartan_slodkowski(
    r: &Representation,
    cd: &CartanDecomposition,
    k: usize,
    side: Side,
    tol: &Tolerance,
) -> Result<SpectrumSet> {
    check_level(r.algebra(), k)?;
    let cands = koszul_candidates(r, cd, tol)?;
    slodkowski_from_candidates(&cands, cd, k, side, tol)
}

pub fn slodkowski_from_candidates(
    cands: &[KoszulCandidate],
    cd: &CartanDecomposition,
    k: usize,
    side: Side,
    tol: &Tolerance,
) -> Result<SpectrumSet> {
    check_level(cd.algebra(), k)?;
    let kind = match side {
        Side::Delta => SpectrumKind::SlodkowskiDelta(k),
        Side::Pi => SpectrumKind::SlodkowskiPi(k),
    };
    assemble(kind, cands, cd, tol, |p| p.slodkowski_membership(k.min(p.top_degree()), side))
}

/// The Cartan decomposition of `Lᵒᵖ` through the same subspace `H`.
pub fn opposite_decomposition(cd: &CartanDecomposition, tol: &Tolerance) -> Result<CartanDecomposition> {
    let op = cd.algebra().opposite();
    let h = SubalgebraBasis::new(&op, cd.h().basis().clone(), tol)?;
    root_decomposition(&op, &h, tol)
}

/// Split spectra through the multiplication representations:
/// `Sp(ρ) = Σ(L_ρ)`, `Sp_{δ,k}(ρ) = Σ_{δ,k}(L_ρ)`, `Sp_{π,k}(ρ) = Σ_{δ,k}(R_ρ)`.
/// Characters of `R_ρ` live on `Lᵒᵖ` and are read back coordinate-wise.
pub fn cartan_split(
    r: &Representation,
    cd: &CartanDecomposition,
    level: Option<(usize, Side)>,
    tol: &Tolerance,
) -> Result<SpectrumSet> {
    let (kind, set) = match level {
        None => {
            let left = r.left_mult(DEFAULT_CAP)?;
            (SpectrumKind::Split, cartan_taylor(&left, cd, tol)?)
        }
        Some((k, Side::Delta)) => {
            let left = r.left_mult(DEFAULT_CAP)?;
            (SpectrumKind::SplitDelta(k), cartan_slodkowski(&left, cd, k, Side::Delta, tol)?)
        }
        Some((k, Side::Pi)) => {
            let right = r.right_mult(DEFAULT_CAP)?;
            let cd_op = opposite_decomposition(cd, tol)?;
            let mut set = cartan_slodkowski(&right, &cd_op, k, Side::Delta, tol)?;
            for p in &mut set.points {
                p.character = Character::new(r.algebra(), p.character.coords.clone(), tol)?;
            }
            (SpectrumKind::SplitPi(k), set)
        }
    };
    Ok(SpectrumSet { kind, ..set })
}

/// Essential spectra are empty on finite-dimensional spaces: every operator
/// there is Fredholm.
pub fn cartan_essential(
    r: &Representation,
    cd: &CartanDecomposition,
    kind: SpectrumKind,
    tol: &Tolerance,
) -> Result<SpectrumSet> {
    if !kind.is_essential() {
        return input_err(format!("{kind} is not an essential spectrum kind"));
    }
    if let Some(k) = kind.level() {
        check_level(r.algebra(), k)?;
    }
    if r.algebra() != cd.algebra() {
        return input_err("the Cartan decomposition belongs to a different algebra");
    }
    Ok(SpectrumSet {
        kind,
        points: Vec::new(),
        tolerance: *tol,
        cartan_basis: cartan_basis_of(cd),
        reason: Some(FREDHOLM_TRIVIAL.to_string()),
    })
}

/// Any spectrum kind.
pub fn spectrum(r: &Representation, cd: &CartanDecomposition, kind: SpectrumKind, tol: &Tolerance) -> Result<SpectrumSet> {
    match kind {
        SpectrumKind::Taylor => cartan_taylor(r, cd, tol),
        SpectrumKind::SlodkowskiDelta(k) => cartan_slodkowski(r, cd, k, Side::Delta, tol),
        SpectrumKind::SlodkowskiPi(k) => cartan_slodkowski(r, cd, k, Side::Pi, tol),
        SpectrumKind::Split => cartan_split(r, cd, None, tol),
        SpectrumKind::SplitDelta(k) => cartan_split(r, cd, Some((k, Side::Delta)), tol),
        SpectrumKind::SplitPi(k) => cartan_split(r, cd, Some((k, Side::Pi)), tol),
        essential => cartan_essential(r, cd, essential, tol),
    }
}

/// Every non-essential kind at once, sharing the Koszul computations.
pub fn all_regular_spectra(r: &Representation, cd: &CartanDecomposition, tol: &Tolerance) -> Result<Vec<SpectrumSet>> {
    let n = r.algebra().dim();
    let cands = koszul_candidates(r, cd, tol)?;
    let left = r.left_mult(DEFAULT_CAP)?;
    let left_cands = koszul_candidates(&left, cd, tol)?;
    let right = r.right_mult(DEFAULT_CAP)?;
    let cd_op = opposite_decomposition(cd, tol)?;
    let right_cands = koszul_candidates(&right, &cd_op, tol)?;
    let mut out = Vec::new();
    for kind in SpectrumKind::all_regular(n) {
        let set = match kind {
            SpectrumKind::Taylor => taylor_from_candidates(&cands, cd, tol)?,
            SpectrumKind::SlodkowskiDelta(k) => slodkowski_from_candidates(&cands, cd, k, Side::Delta, tol)?,
            SpectrumKind::SlodkowskiPi(k) => slodkowski_from_candidates(&cands, cd, k, Side::Pi, tol)?,
            SpectrumKind::Split => SpectrumSet { kind, ..taylor_from_candidates(&left_cands, cd, tol)? },
            SpectrumKind::SplitDelta(k) => {
                SpectrumSet { kind, ..slodkowski_from_candidates(&left_cands, cd, k, Side::Delta, tol)? }
            }
            SpectrumKind::SplitPi(k) => {
                SpectrumSet { kind, ..slodkowski_from_candidates(&right_cands, &cd_op, k, Side::Delta, tol)? }
            }
            _ => unreachable!("all_regular yields no essential kinds"),
        };
        out.push(set);
    }
    Ok(out)
}

/// The Taylor spectrum without Koszul complexes: characters `f` with
/// `f(L²) = 0` admitting `x ≠ 0` with `ρ(h)x = f(h)x` for all `h ∈ H`.
///
/// Candidates are enumerated depth-first over the eigenvalues of each
/// `ρ(h_j)` separately, intersecting eigenspaces on the full carrier space;
/// branches whose intersection is zero are pruned.
pub fn spectrum_by_common_eigenvectors(
    r: &Representation,
    cd: &CartanDecomposition,
    tol: &Tolerance,
) -> Result<SpectrumSet> {
    ensure_compatible(r, cd, tol)?;
    let d = r.space_dim();
    let mats = cd
        .h()
        .basis()
        .column_iter()
        .map(|h| r.act(&h.clone_owned()))
        .collect::<Result<Vec<_>>>()?;
    let candidates = mats
        .iter()
        .map(|m| Ok(generalized_eigenspaces(m, tol)?.blocks.into_iter().map(|b| b.value).collect()))
        .collect::<Result<Vec<Vec<C64>>>>()?;
    let scale = rep_scale(&mats);

    let mut found: Vec<(Vec<C64>, CVec)> = Vec::new();
    let mut stack: Vec<(usize, Subspace, Vec<C64>)> = vec![(0, Subspace::full(d), Vec::new())];
    while let Some((j, space, values)) = stack.pop() {
        if j == mats.len() {
            let x = space.orthonormal().column(0).clone_owned();
            found.push((values, x));
            continue;
        }
        for &lambda in candidates[j].iter().rev() {
            let shifted = (&mats[j] - CMat::identity(d, d) * lambda) * space.orthonormal();
            let threshold = tol.rank_eps * scale.max(lambda.norm()).max(1.0);
            let coeffs = kernel_with_threshold(&shifted, threshold)?;
            if coeffs.dim() == 0 {
                continue;
            }
            let next = Subspace::span_of(&(space.orthonormal() * coeffs.orthonormal()), tol)?;
            let mut vals = values.clone();
            vals.push(lambda);
            stack.push((j + 1, next, vals));
        }
    }
    if found.is_empty() && d > 0 {
        return numerical_err("no common eigenvector found for any candidate weight");
    }
    let mut points = Vec::with_capacity(found.len());
    for (values, x) in found {
        let residual = eigen_residual(&mats, &values, &x);
        let coords = cd.lift(&values, tol)?;
        points.push(SpectrumPoint {
            character: Character::new(r.algebra(), coords, tol)?,
            evidence: Evidence::Eigenvector { witness: x.iter().copied().collect(), residual },
            multiplicity: 1,
        });
    }
    Ok(SpectrumSet {
        kind: SpectrumKind::Taylor,
        points: merge_points(points, tol),
        tolerance: *tol,
        cartan_basis: cartan_basis_of(cd),
        reason: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::find_cartan_subalgebra;
    use crate::numkit::{r, real_matrix};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn affine_rep() -> Representation {
        Representation::new(
            &LieAlgebra::affine(),
            2,
            vec![real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]), real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]])],
        )
        .unwrap()
    }

    fn heisenberg_rep() -> Representation {
        let mut e12 = CMat::zeros(3, 3);
        e12[(0, 1)] = r(1.0);
        let mut e23 = CMat::zeros(3, 3);
        e23[(1, 2)] = r(1.0);
        let mut e13 = CMat::zeros(3, 3);
        e13[(0, 2)] = r(1.0);
        Representation::new(&LieAlgebra::heisenberg(), 3, vec![e12, e23, e13]).unwrap()
    }

    fn decomposition(alg: &LieAlgebra, seed: u64) -> CartanDecomposition {
        let h = find_cartan_subalgebra(alg, seed, &tol()).unwrap();
        root_decomposition(alg, &h, &tol()).unwrap()
    }

    fn real_points(set: &SpectrumSet) -> Vec<Vec<f64>> {
        set.points
            .iter()
            .map(|p| {
                p.character.coords.iter().map(|z| {
                    assert!(z.im.abs() < 1e-9);
                    (z.re * 1e6).round() / 1e6 + 0.0
                }).collect()
            })
            .collect()
    }

    fn points(rows: &[&[f64]]) -> Vec<Vec<C64>> {
        rows.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect()
    }

    #[test]
    fn weights_examples() {
        let t = tol();
        let a = LieAlgebra::affine();
        let h = SubalgebraBasis::new(&a, real_matrix(&[&[1.0], &[0.0]]), &t).unwrap();
        let hr = affine_rep().restrict(&h, &t).unwrap();
        let w = weights_of_nilpotent_rep(&hr, &t).unwrap();
        assert_eq!(w.len(), 2);
        assert!((w[0].values[0] - r(0.0)).norm() < 1e-12 && w[0].multiplicity == 1);
        assert!((w[1].values[0] - r(1.0)).norm() < 1e-12 && w[1].multiplicity == 1);

        let w = weights_of_nilpotent_rep(&heisenberg_rep(), &t).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].multiplicity, 3);
        assert!(w[0].values.iter().all(|v| v.norm() < 1e-12));
        assert!((w[0].witness[0].norm() - 1.0).abs() < 1e-12);
        assert!(w[0].residual < 1e-12);

        let z = Representation::zero(&LieAlgebra::abelian(2), 4);
        let w = weights_of_nilpotent_rep(&z, &t).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].multiplicity, 4);
    }

    #[test]
    fn taylor_examples() {
        let t = tol();
        let cd = decomposition(&LieAlgebra::affine(), 1);
        let s = cartan_taylor(&affine_rep(), &cd, &t).unwrap();
        assert_eq!(real_points(&s), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);

        let cd = decomposition(&LieAlgebra::heisenberg(), 1);
        let s = cartan_taylor(&heisenberg_rep(), &cd, &t).unwrap();
        assert_eq!(real_points(&s), vec![vec![0.0, 0.0, 0.0]]);

        let ab = Representation::new(
            &LieAlgebra::abelian(2),
            2,
            vec![real_matrix(&[&[1.0, 0.0], &[0.0, 2.0]]), real_matrix(&[&[3.0, 0.0], &[0.0, 4.0]])],
        )
        .unwrap();
        let cd = decomposition(&LieAlgebra::abelian(2), 1);
        let s = cartan_taylor(&ab, &cd, &t).unwrap();
        assert_eq!(real_points(&s), vec![vec![1.0, 3.0], vec![2.0, 4.0]]);
        // Independent route: eigenvalue pairs confirmed by kernel intersection.
        let o = spectrum_by_common_eigenvectors(&ab, &cd, &t).unwrap();
        assert!(hausdorff_distance(&o.coords(), &points(&[&[1.0, 3.0], &[2.0, 4.0]])) < 1e-9);
    }

    #[test]
    fn slodkowski_levels_collapse_in_finite_dimensions() {
        let t = tol();
        let cd = decomposition(&LieAlgebra::affine(), 2);
        let rho = affine_rep();
        let taylor = cartan_taylor(&rho, &cd, &t).unwrap();
        for k in 0..=2 {
            for side in [Side::Delta, Side::Pi] {
                let s = cartan_slodkowski(&rho, &cd, k, side, &t).unwrap();
                assert!(hausdorff_distance(&s.coords(), &taylor.coords()) <= t.match_eps);
            }
        }
        assert!(cartan_slodkowski(&rho, &cd, 3, Side::Delta, &t).is_err());
    }

    #[test]
    fn split_examples() {
        let t = tol();
        let cd = decomposition(&LieAlgebra::affine(), 1);
        let rho = affine_rep();
        let sp = cartan_split(&rho, &cd, None, &t).unwrap();
        assert_eq!(sp.kind, SpectrumKind::Split);
        assert_eq!(real_points(&sp), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let pi = cartan_split(&rho, &cd, Some((1, Side::Pi)), &t).unwrap();
        assert_eq!(real_points(&pi), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let z = Representation::zero(&LieAlgebra::affine(), 2);
        assert_eq!(real_points(&cartan_split(&z, &cd, None, &t).unwrap()), vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn essential_spectra_are_empty_with_reason() {
        let t = tol();
        let cd = decomposition(&LieAlgebra::affine(), 1);
        for kind in SpectrumKind::all_essential(2) {
            let s = cartan_essential(&affine_rep(), &cd, kind, &t).unwrap();
            assert!(s.is_empty());
            assert_eq!(s.reason.as_deref(), Some(FREDHOLM_TRIVIAL));
        }
        assert!(cartan_essential(&affine_rep(), &cd, SpectrumKind::Taylor, &t).is_err());
    }

    #[test]
    fn common_eigenvector_route_examples() {
        let t = tol();
        let cd = decomposition(&LieAlgebra::affine(), 4);
        let s = spectrum_by_common_eigenvectors(&affine_rep(), &cd, &t).unwrap();
        assert_eq!(real_points(&s), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let cd = decomposition(&LieAlgebra::heisenberg(), 4);
        let s = spectrum_by_common_eigenvectors(&heisenberg_rep(), &cd, &t).unwrap();
        assert_eq!(real_points(&s), vec![vec![0.0, 0.0, 0.0]]);
        let one = Representation::new(&LieAlgebra::abelian(1), 1, vec![CMat::from_element(1, 1, C64::new(2.5, -1.0))])
            .unwrap();
        let cd = decomposition(&LieAlgebra::abelian(1), 4);
        let s = spectrum_by_common_eigenvectors(&one, &cd, &t).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.points[0].character.coords[0] - C64::new(2.5, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn hausdorff_distance_cases() {
        let a = points(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let b = points(&[&[1.0, 0.0], &[0.0, 0.5]]);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
        assert_eq!(hausdorff_distance(&a, &b), 0.5);
        assert_eq!(hausdorff_distance(&[], &[]), 0.0);
        assert_eq!(hausdorff_distance(&a, &[]), f64::INFINITY);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(SpectrumKind::from_parts("taylor", None, None).unwrap(), SpectrumKind::Taylor);
        assert_eq!(
            SpectrumKind::from_parts("slodkowski", Some(1), Some(Side::Pi)).unwrap(),
            SpectrumKind::SlodkowskiPi(1)
        );
        assert_eq!(SpectrumKind::from_parts("split", None, None).unwrap(), SpectrumKind::Split);
        assert!(SpectrumKind::from_parts("slodkowski", None, None).is_err());
        assert!(SpectrumKind::from_parts("bogus", None, None).is_err());
        assert_eq!(SpectrumKind::all_regular(2).len(), 2 + 4 * 3);
    }
}
