//! Executable spectral identities and a seeded generator of solvable
//! instances to run them on.
//!
//! Each checker returns a [`CheckReport`] holding every pair of compared
//! point sets with their Hausdorff distance, so a failure can be inspected
//! without re-running anything.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cartan::{find_cartan_subalgebra, root_decomposition, CartanDecomposition};
use crate::koszul::Side;
use crate::liealg::{LieAlgebra, SubalgebraBasis};
use crate::numkit::{r, CMat, Tolerance, C64};
use crate::rep::{Representation, DEFAULT_CAP};
use crate::spectra::{
    all_regular_spectra, directed_distance, hausdorff_distance, koszul_candidates, opposite_decomposition,
    slodkowski_from_candidates, spectrum_by_common_eigenvectors, taylor_from_candidates, SpectrumKind, SpectrumSet,
};
use crate::{input_err, Error, Result};

type Points = Vec<Vec<C64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub lhs: Points,
    pub rhs: Points,
    pub distance: f64,
    pub passed: bool,
    /// For one-sided identities `rhs ⊆ lhs`, checked on its own.
    pub inclusion_ok: Option<bool>,
}

impl Comparison {
    pub fn new(label: impl Into<String>, lhs: Points, rhs: Points, tol: &Tolerance) -> Comparison {
        let distance = hausdorff_distance(&lhs, &rhs);
        Comparison { label: label.into(), lhs, rhs, distance, passed: distance <= tol.match_eps, inclusion_ok: None }
    }

    /// Equality plus the separate inclusion `rhs ⊆ lhs`.
    pub fn with_inclusion(label: impl Into<String>, lhs: Points, rhs: Points, tol: &Tolerance) -> Comparison {
        let inclusion = directed_distance(&rhs, &lhs) <= tol.match_eps;
        Comparison { inclusion_ok: Some(inclusion), ..Comparison::new(label, lhs, rhs, tol) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub theorem_id: String,
    pub inputs_digest: String,
    pub comparisons: Vec<Comparison>,
    /// Largest distance over all comparisons.
    pub distance: f64,
    pub passed: bool,
    pub seed: Option<u64>,
    pub error: Option<String>,
}

impl CheckReport {
    fn from_comparisons(id: &str, digest: String, comparisons: Vec<Comparison>, seed: Option<u64>, tol: &Tolerance) -> Self {
        let distance = comparisons.iter().map(|c| c.distance).fold(0.0, f64::max);
        CheckReport {
            theorem_id: id.to_string(),
            inputs_digest: digest,
            passed: distance <= tol.match_eps,
            distance,
            comparisons,
            seed,
            error: None,
        }
    }

    fn failed(id: &str, digest: String, seed: Option<u64>, err: &Error) -> Self {
        CheckReport {
            theorem_id: id.to_string(),
            inputs_digest: digest,
            comparisons: Vec::new(),
            distance: f64::INFINITY,
            passed: false,
            seed,
            error: Some(err.to_string()),
        }
    }

    /// All inclusion flags that were recorded hold.
    pub fn inclusions_ok(&self) -> bool {
        self.comparisons.iter().all(|c| c.inclusion_ok != Some(false))
    }
}

/// Hex SHA-256 over a canonical byte encoding of the representations
/// (structure constants, carrier dimension, matrices) and a free-form tag.
pub fn inputs_digest(reps: &[&Representation], tag: &str) -> String {
    let mut h = Sha256::new();
    for rep in reps {
        let alg = rep.algebra();
        h.update((alg.dim() as u64).to_le_bytes());
        for z in alg.structure_tensor() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
        h.update((rep.space_dim() as u64).to_le_bytes());
        for m in rep.mats() {
            for z in m.iter() {
                h.update(z.re.to_le_bytes());
                h.update(z.im.to_le_bytes());
            }
        }
    }
    h.update(tag.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn cartan_for(alg: &LieAlgebra, seed: u64, tol: &Tolerance) -> Result<CartanDecomposition> {
    let h = find_cartan_subalgebra(alg, seed, tol)?;
    root_decomposition(alg, &h, tol)
}

/// Taylor and both Słodkowski families at every level `0..=dim L`.
struct Family {
    taylor: Points,
    delta: Vec<Points>,
    pi: Vec<Points>,
}

impl Family {
    fn compute(r: &Representation, cd: &CartanDecomposition, tol: &Tolerance) -> Result<Family> {
        let cands = koszul_candidates(r, cd, tol)?;
        let n = r.algebra().dim();
        let level = |k, side| slodkowski_from_candidates(&cands, cd, k, side, tol).map(|s| s.coords());
        Ok(Family {
            taylor: taylor_from_candidates(&cands, cd, tol)?.coords(),
            delta: (0..=n).map(|k| level(k, Side::Delta)).collect::<Result<_>>()?,
            pi: (0..=n).map(|k| level(k, Side::Pi)).collect::<Result<_>>()?,
        })
    }

    fn side(&self, side: Side) -> &[Points] {
        match side {
            Side::Delta => &self.delta,
            Side::Pi => &self.pi,
        }
    }
}

fn run(id: &str, digest: String, seed: Option<u64>, tol: &Tolerance, f: impl FnOnce() -> Result<Vec<Comparison>>) -> Result<CheckReport> {
    match f() {
        Ok(c) => Ok(CheckReport::from_comparisons(id, digest, c, seed, tol)),
        Err(e @ Error::Numerical(_)) => Ok(CheckReport::failed(id, digest, seed, &e)),
        Err(e) => Err(e),
    }
}

/// `Σ_{π,k}(ρ) = Σ_{δ,k}(ρ*)`, `Σ_{δ,k}(ρ) = Σ_{π,k}(ρ*)` for every `k`,
/// and `Σ(ρ) = Σ(ρ*)`; `ρ*` lives on `Lᵒᵖ`, whose coordinates are those of `L`.
pub fn check_duality(r: &Representation, seed: u64, tol: &Tolerance) -> Result<CheckReport> {
    let digest = inputs_digest(&[r], "duality");
    run("duality", digest, Some(seed), tol, || {
        let cd = cartan_for(r.algebra(), seed, tol)?;
        let cd_op = opposite_decomposition(&cd, tol)?;
        let f = Family::compute(r, &cd, tol)?;
        let g = Family::compute(&r.adjoint(), &cd_op, tol)?;
        let mut out = vec![Comparison::new("taylor(rho) = taylor(rho*)", f.taylor, g.taylor, tol)];
        for k in 0..f.delta.len() {
            out.push(Comparison::new(format!("pi_{k}(rho) = delta_{k}(rho*)"), f.pi[k].clone(), g.delta[k].clone(), tol));
            out.push(Comparison::new(format!("delta_{k}(rho) = pi_{k}(rho*)"), f.delta[k].clone(), g.pi[k].clone(), tol));
        }
        Ok(out)
    })
}

/// `Sp(ρ) = Σ(L_ρ) = Σ(R_ρ) = Σ(ρ)`, `Sp_{δ,k}(ρ) = Σ_{δ,k}(L_ρ) = Σ_{δ,k}(ρ)`
/// and `Sp_{π,k}(ρ) = Σ_{δ,k}(R_ρ) = Σ_{π,k}(ρ)`.
pub fn check_split_identity(r: &Representation, seed: u64, tol: &Tolerance) -> Result<CheckReport> {
    let digest = inputs_digest(&[r], "split_identity");
    let left = r.left_mult(DEFAULT_CAP)?;
    let right = r.right_mult(DEFAULT_CAP)?;
    run("split_identity", digest, Some(seed), tol, || {
        let cd = cartan_for(r.algebra(), seed, tol)?;
        let cd_op = opposite_decomposition(&cd, tol)?;
        let own = Family::compute(r, &cd, tol)?;
        let lf = Family::compute(&left, &cd, tol)?;
        let rf = Family::compute(&right, &cd_op, tol)?;
        let split = all_regular_spectra(r, &cd, tol)?;
        let get = |kind: SpectrumKind| -> Points {
            split.iter().find(|s| s.kind == kind).map(SpectrumSet::coords).unwrap_or_default()
        };
        let sp = get(SpectrumKind::Split);
        let mut out = vec![
            Comparison::new("sp(rho) = taylor(L_rho)", sp.clone(), lf.taylor.clone(), tol),
            Comparison::new("sp(rho) = taylor(R_rho)", sp.clone(), rf.taylor.clone(), tol),
            Comparison::new("sp(rho) = taylor(rho)", sp, own.taylor.clone(), tol),
        ];
        for k in 0..own.delta.len() {
            let spd = get(SpectrumKind::SplitDelta(k));
            let spp = get(SpectrumKind::SplitPi(k));
            out.push(Comparison::new(format!("sp_delta_{k}(rho) = delta_{k}(L_rho)"), spd.clone(), lf.delta[k].clone(), tol));
            out.push(Comparison::new(format!("sp_delta_{k}(rho) = delta_{k}(rho)"), spd, own.delta[k].clone(), tol));
            out.push(Comparison::new(format!("sp_pi_{k}(rho) = delta_{k}(R_rho)"), spp.clone(), rf.delta[k].clone(), tol));
            out.push(Comparison::new(format!("sp_pi_{k}(rho) = pi_{k}(rho)"), spp, own.pi[k].clone(), tol));
        }
        Ok(out)
    })
}

fn level_kind(kind: SpectrumKind, cap: usize) -> SpectrumKind {
    match kind {
        SpectrumKind::SlodkowskiDelta(k) => SpectrumKind::SlodkowskiDelta(k.min(cap)),
        SpectrumKind::SlodkowskiPi(k) => SpectrumKind::SlodkowskiPi(k.min(cap)),
        SpectrumKind::SplitDelta(k) => SpectrumKind::SplitDelta(k.min(cap)),
        SpectrumKind::SplitPi(k) => SpectrumKind::SplitPi(k.min(cap)),
        other => other,
    }
}

/// `π(Σ_*(ρ)) = Σ_*(ρ|_E)` for every non-essential kind, `π` the restriction
/// of functionals to `E`. Levels above `dim E` are compared with level `dim E`.
pub fn check_projection(r: &Representation, sub: &SubalgebraBasis, seed: u64, tol: &Tolerance) -> Result<CheckReport> {
    if sub.parent() != r.algebra() {
        return input_err("subalgebra belongs to a different algebra");
    }
    let restricted = r.restrict(sub, tol)?;
    let digest = inputs_digest(&[r, &restricted], "projection");
    let split_ok = r.space_dim() * r.space_dim() <= DEFAULT_CAP;
    run("projection", digest, Some(seed), tol, || {
        let cd = cartan_for(r.algebra(), seed, tol)?;
        let cd_e = cartan_for(restricted.algebra(), seed, tol)?;
        let (full, part) = if split_ok {
            (all_regular_spectra(r, &cd, tol)?, all_regular_spectra(&restricted, &cd_e, tol)?)
        } else {
            (sigma_sets(r, &cd, tol)?, sigma_sets(&restricted, &cd_e, tol)?)
        };
        let m = sub.dim();
        let mut out = Vec::with_capacity(full.len());
        for set in &full {
            let target = level_kind(set.kind, m);
            let Some(other) = part.iter().find(|s| s.kind == target) else {
                continue;
            };
            let projected = set.coords().iter().map(|f| sub.restrict_functional(f)).collect();
            out.push(Comparison::new(format!("pi({}) = {}(E)", set.kind, target), projected, other.coords(), tol));
        }
        Ok(out)
    })
}

fn sigma_sets(r: &Representation, cd: &CartanDecomposition, tol: &Tolerance) -> Result<Vec<SpectrumSet>> {
    let cands = koszul_candidates(r, cd, tol)?;
    let mut out = vec![taylor_from_candidates(&cands, cd, tol)?];
    for k in 0..=r.algebra().dim() {
        out.push(slodkowski_from_candidates(&cands, cd, k, Side::Delta, tol)?);
        out.push(slodkowski_from_candidates(&cands, cd, k, Side::Pi, tol)?);
    }
    Ok(out)
}

fn every_kind(r: &Representation, cd: &CartanDecomposition, tol: &Tolerance) -> Result<Vec<SpectrumSet>> {
    let mut sets = if r.space_dim() * r.space_dim() <= DEFAULT_CAP {
        all_regular_spectra(r, cd, tol)?
    } else {
        sigma_sets(r, cd, tol)?
    };
    for kind in SpectrumKind::all_essential(r.algebra().dim()) {
        sets.push(crate::spectra::cartan_essential(r, cd, kind, tol)?);
    }
    Ok(sets)
}

fn compare_decompositions(
    r: &Representation,
    cds: &[CartanDecomposition],
    names: &[String],
    tol: &Tolerance,
) -> Result<Vec<Comparison>> {
    let all = cds.iter().map(|cd| every_kind(r, cd, tol)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (j, sets) in all.iter().enumerate().skip(1) {
        for (a, b) in all[0].iter().zip(sets) {
            out.push(Comparison::new(
                format!("{} via {} = via {}", a.kind, names[0], names[j]),
                a.coords(),
                b.coords(),
                tol,
            ));
        }
    }
    Ok(out)
}

/// Every spectrum kind agrees across the Cartan subalgebras found from the
/// given seeds.
pub fn check_cartan_independence(r: &Representation, seeds: &[u64], tol: &Tolerance) -> Result<CheckReport> {
    if seeds.len() < 2 {
        return input_err("Cartan independence needs at least two seeds");
    }
    let digest = inputs_digest(&[r], &format!("cartan_independence{seeds:?}"));
    run("cartan_independence", digest, seeds.first().copied(), tol, || {
        let cds = seeds.iter().map(|&s| cartan_for(r.algebra(), s, tol)).collect::<Result<Vec<_>>>()?;
        let names: Vec<String> = seeds.iter().map(|s| format!("seed {s}")).collect();
        compare_decompositions(r, &cds, &names, tol)
    })
}

/// Cartan independence over explicitly given Cartan subalgebras.
pub fn check_cartan_independence_with(
    r: &Representation,
    cartans: &[SubalgebraBasis],
    tol: &Tolerance,
) -> Result<CheckReport> {
    if cartans.len() < 2 {
        return input_err("Cartan independence needs at least two Cartan subalgebras");
    }
    let cds = cartans.iter().map(|h| root_decomposition(r.algebra(), h, tol)).collect::<Result<Vec<_>>>()?;
    let digest = inputs_digest(&[r], "cartan_independence_explicit");
    run("cartan_independence", digest, None, tol, || {
        let names: Vec<String> = (1..=cds.len()).map(|i| format!("H{i}")).collect();
        compare_decompositions(r, &cds, &names, tol)
    })
}

fn product(a: &[Vec<C64>], b: &[Vec<C64>]) -> Points {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.iter().chain(y).copied().collect()))
        .collect()
}

/// `Σ_{*,k}(ρ₁ ⊗ ρ₂) = ⋃_{p+q=k} Σ_{*,p}(ρ₁) × Σ_{*,q}(ρ₂)` on `L₁ × L₂`, for
/// both sides and every `k`, plus `Σ(ρ₁ ⊗ ρ₂) = Σ(ρ₁) × Σ(ρ₂)`. The inclusion
/// `⊇` is recorded separately.
pub fn check_tensor_formula(r1: &Representation, r2: &Representation, seed: u64, tol: &Tolerance) -> Result<CheckReport> {
    let t = Representation::tensor(r1, r2, DEFAULT_CAP)?;
    let digest = inputs_digest(&[r1, r2], "tensor_formula");
    run("tensor_formula", digest, Some(seed), tol, || {
        let f1 = Family::compute(r1, &cartan_for(r1.algebra(), seed, tol)?, tol)?;
        let f2 = Family::compute(r2, &cartan_for(r2.algebra(), seed, tol)?, tol)?;
        let ft = Family::compute(&t, &cartan_for(t.algebra(), seed, tol)?, tol)?;
        let (n1, n2) = (r1.algebra().dim(), r2.algebra().dim());
        let mut out = vec![Comparison::with_inclusion("taylor", ft.taylor.clone(), product(&f1.taylor, &f2.taylor), tol)];
        for side in [Side::Delta, Side::Pi] {
            for k in 0..=n1 + n2 {
                let mut rhs = Vec::new();
                for p in k.saturating_sub(n2)..=k.min(n1) {
                    rhs.extend(product(&f1.side(side)[p], &f2.side(side)[k - p]));
                }
                out.push(Comparison::with_inclusion(format!("{side}_{k}"), ft.side(side)[k].clone(), rhs, tol));
            }
        }
        Ok(out)
    })
}

/// For `ρ̃` on `L₁ × L₂ᵒᵖ` with `m = dim L₂`:
/// `Σ_{δ,k}(ρ̃) = ⋃_{p+q=k} Σ_{δ,p}(ρ₁) × Σ_{π,m−q}(ρ₂)` and the same with
/// `δ` and `π` exchanged, plus `Σ(ρ̃) = Σ(ρ₁) × Σ(ρ₂)`.
pub fn check_multiplication_formula(
    r1: &Representation,
    r2: &Representation,
    seed: u64,
    tol: &Tolerance,
) -> Result<CheckReport> {
    let t = Representation::multiplication(r1, r2, DEFAULT_CAP)?;
    let digest = inputs_digest(&[r1, r2], "multiplication_formula");
    run("multiplication_formula", digest, Some(seed), tol, || {
        let f1 = Family::compute(r1, &cartan_for(r1.algebra(), seed, tol)?, tol)?;
        let f2 = Family::compute(r2, &cartan_for(r2.algebra(), seed, tol)?, tol)?;
        let ft = Family::compute(&t, &cartan_for(t.algebra(), seed, tol)?, tol)?;
        let (n1, m) = (r1.algebra().dim(), r2.algebra().dim());
        let mut out = vec![Comparison::with_inclusion("taylor", ft.taylor.clone(), product(&f1.taylor, &f2.taylor), tol)];
        for side in [Side::Delta, Side::Pi] {
            for k in 0..=n1 + m {
                let mut rhs = Vec::new();
                for p in k.saturating_sub(m)..=k.min(n1) {
                    let q = k - p;
                    rhs.extend(product(&f1.side(side)[p], &f2.side(side.flip())[m - q]));
                }
                out.push(Comparison::with_inclusion(format!("{side}_{k}"), ft.side(side)[k].clone(), rhs, tol));
            }
        }
        Ok(out)
    })
}

/// For nilpotent `L`: spectra through a searched Cartan subalgebra equal the
/// spectra taken directly with `H = L`.
pub fn check_nilpotent_coincidence(r: &Representation, seed: u64, tol: &Tolerance) -> Result<CheckReport> {
    if !r.algebra().is_nilpotent(tol)? {
        return input_err("the algebra is not nilpotent");
    }
    let digest = inputs_digest(&[r], "nilpotent_coincidence");
    run("nilpotent_coincidence", digest, Some(seed), tol, || {
        let searched = cartan_for(r.algebra(), seed, tol)?;
        let direct = root_decomposition(r.algebra(), &SubalgebraBasis::whole(r.algebra()), tol)?;
        compare_decompositions(r, &[searched, direct], &["search".into(), "H = L".into()], tol)
    })
}

/// The Koszul Taylor spectrum equals the common-eigenvector description.
pub fn check_common_eigenvectors(r: &Representation, seed: u64, tol: &Tolerance) -> Result<CheckReport> {
    let digest = inputs_digest(&[r], "common_eigenvectors");
    run("common_eigenvectors", digest, Some(seed), tol, || {
        let cd = cartan_for(r.algebra(), seed, tol)?;
        let koszul = Family::compute(r, &cd, tol)?;
        let oracle = spectrum_by_common_eigenvectors(r, &cd, tol)?.coords();
        Ok(vec![Comparison::new("taylor = common eigenvectors", koszul.taylor, oracle, tol)])
    })
}

/// 1- and 2-dimensional subalgebras to test projection on: basis lines, a
/// few random lines, closed coordinate planes, `L²` and `H` when small
/// enough, and random closed planes.
pub fn test_subalgebras(alg: &LieAlgebra, seed: u64, tol: &Tolerance) -> Result<Vec<SubalgebraBasis>> {
    let n = alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<SubalgebraBasis> = Vec::new();
    let push = |b: CMat, out: &mut Vec<SubalgebraBasis>| {
        if let Ok(s) = SubalgebraBasis::new(alg, b, tol) {
            if !out.iter().any(|o| o.space().same_span(s.space(), tol)) {
                out.push(s);
            }
        }
    };
    let unit = |i: usize| crate::numkit::unit_vector(n, i);
    let random_vec = |rng: &mut ChaCha8Rng| {
        crate::numkit::CVec::from_iterator(n, (0..n).map(|_| r(rng.gen_range(-3..=3) as f64)))
    };
    for i in 0..n {
        push(CMat::from_columns(&[unit(i)]), &mut out);
    }
    for _ in 0..2 {
        let v = random_vec(&mut rng);
        if v.norm() > 0.0 {
            push(CMat::from_columns(&[v]), &mut out);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            push(CMat::from_columns(&[unit(i), unit(j)]), &mut out);
        }
    }
    let derived = alg.derived_subalgebra(tol)?;
    if (1..=2).contains(&derived.dim()) {
        push(derived.orthonormal().clone(), &mut out);
    }
    let h = find_cartan_subalgebra(alg, seed, tol)?;
    if h.dim() <= 2 {
        push(h.basis().clone(), &mut out);
    }
    if n >= 2 {
        for _ in 0..4 {
            let (u, v) = (random_vec(&mut rng), random_vec(&mut rng));
            push(CMat::from_columns(&[u, v]), &mut out);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Instance generation

/// Bounds for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzDims {
    pub max_algebra_dim: usize,
    pub max_space_dim: usize,
    pub nilpotent_only: bool,
}

impl Default for FuzzDims {
    fn default() -> Self {
        FuzzDims { max_algebra_dim: 3, max_space_dim: 4, nilpotent_only: false }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub rep: Representation,
}

/// A normal form with the coordinates a character may use (the complement
/// of `L²` among the basis vectors).
struct NormalForm {
    name: String,
    alg: LieAlgebra,
    free: Vec<bool>,
}

fn bracket(i: usize, j: usize, coeffs: &[f64]) -> (usize, usize, Vec<C64>) {
    (i, j, coeffs.iter().map(|&x| r(x)).collect())
}

fn normal_form(rng: &mut ChaCha8Rng, max_dim: usize, nilpotent: bool) -> NormalForm {
    let dim = rng.gen_range(1..=max_dim.clamp(1, 3));
    let abelian = |n: usize| NormalForm { name: format!("abelian{n}"), alg: LieAlgebra::abelian(n), free: vec![true; n] };
    match (dim, nilpotent) {
        (1, _) => abelian(1),
        (2, true) => abelian(2),
        (2, false) => {
            if rng.gen_bool(0.3) {
                abelian(2)
            } else {
                NormalForm { name: "affine".into(), alg: LieAlgebra::affine(), free: vec![true, false] }
            }
        }
        (_, true) => {
            if rng.gen_bool(0.3) {
                abelian(3)
            } else {
                NormalForm { name: "heisenberg".into(), alg: LieAlgebra::heisenberg(), free: vec![true, true, false] }
            }
        }
        _ => match rng.gen_range(0..5) {
            0 => abelian(3),
            1 => NormalForm { name: "heisenberg".into(), alg: LieAlgebra::heisenberg(), free: vec![true, true, false] },
            2 => NormalForm {
                name: "c+affine".into(),
                alg: LieAlgebra::from_brackets(3, &[bracket(1, 2, &[0.0, 0.0, 1.0])]).expect("valid brackets"),
                free: vec![true, true, false],
            },
            3 => NormalForm {
                name: "r3".into(),
                alg: LieAlgebra::from_brackets(3, &[bracket(0, 1, &[0.0, 1.0, 0.0]), bracket(0, 2, &[0.0, 1.0, 1.0])])
                    .expect("valid brackets"),
                free: vec![true, false, false],
            },
            _ => {
                let lambda = [-2.0, -1.0, 1.0, 2.0, 3.0][rng.gen_range(0..5)];
                NormalForm {
                    name: format!("r3({lambda})"),
                    alg: LieAlgebra::from_brackets(
                        3,
                        &[bracket(0, 1, &[0.0, 1.0, 0.0]), bracket(0, 2, &[0.0, 0.0, lambda])],
                    )
                    .expect("valid brackets"),
                    free: vec![true, false, false],
                }
            }
        },
    }
}

fn random_character(rng: &mut ChaCha8Rng, free: &[bool]) -> Vec<C64> {
    free.iter().map(|&f| r(if f { rng.gen_range(-3..=3) as f64 } else { 0.0 })).collect()
}

fn triangular(rng: &mut ChaCha8Rng, s: usize) -> CMat {
    let diag = [-1.0, 0.0, 1.0, 2.0];
    let mut a = CMat::zeros(s, s);
    for i in 0..s {
        a[(i, i)] = r(diag[rng.gen_range(0..diag.len())]);
        for j in i + 1..s {
            a[(i, j)] = r(rng.gen_range(-2..=2) as f64);
        }
    }
    a
}

/// Integer matrix of determinant one: a few elementary row operations
/// applied to the identity.
pub fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let mut p = CMat::identity(n, n);
    if n < 2 {
        return p;
    }
    for _ in 0..n + 1 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = [-2.0, -1.0, 1.0, 2.0][rng.gen_range(0..4)];
        let row = p.row(j).clone_owned() * r(c);
        let mut target = p.row_mut(i);
        target += row;
    }
    p
}

/// One summand of a generated representation, in the normal-form basis.
fn piece(rng: &mut ChaCha8Rng, nf: &NormalForm, room: usize) -> Result<Representation> {
    let n = nf.alg.dim();
    let choice = rng.gen_range(0..4);
    if choice == 0 || room == 1 && choice != 1 {
        let f = random_character(rng, &nf.free);
        return Representation::zero(&nf.alg, 1).twist(&f);
    }
    if choice == 2 && n <= room {
        let f = random_character(rng, &nf.free);
        return Representation::adjoint_action(&nf.alg).twist(&f);
    }
    if choice == 3 && nf.name == "heisenberg" && room >= 3 {
        let mut e = vec![CMat::zeros(3, 3); 3];
        e[0][(0, 1)] = r(1.0);
        e[1][(1, 2)] = r(1.0);
        e[2][(0, 2)] = r(1.0);
        let f = random_character(rng, &nf.free);
        return Representation::new(&nf.alg, 3, e)?.twist(&f);
    }
    // A triangular pair of commuting matrices acting through two characters.
    let s = rng.gen_range(1..=room.min(3));
    let a = triangular(rng, s);
    let b = &a * &a + &a * r(rng.gen_range(-1..=1) as f64);
    let (f1, f2) = (random_character(rng, &nf.free), random_character(rng, &nf.free));
    let mats = (0..n).map(|i| &a * f1[i] + &b * f2[i]).collect();
    Representation::new(&nf.alg, s, mats)
}

/// A random instance: a normal-form solvable algebra, a direct sum of
/// simple pieces, then integer unimodular changes of basis on both `L` and `X`.
pub fn random_instance(rng: &mut ChaCha8Rng, dims: &FuzzDims, tol: &Tolerance) -> Result<Instance> {
    let nf = normal_form(rng, dims.max_algebra_dim, dims.nilpotent_only);
    let target = rng.gen_range(1..=dims.max_space_dim.max(1));
    let mut rep = piece(rng, &nf, target)?;
    while rep.space_dim() < target {
        let next = piece(rng, &nf, target - rep.space_dim())?;
        rep = Representation::direct_sum(&rep, &next)?;
    }
    let q = unimodular(rng, rep.space_dim());
    let p = unimodular(rng, nf.alg.dim());
    let rep = rep.conjugate(&q)?.change_algebra_basis(&p, tol)?;
    Ok(Instance { label: format!("{} on C^{}", nf.name, rep.space_dim()), rep })
}

/// The adjoint representation of `so(3)`, which is not solvable.
pub fn so3_instance() -> Instance {
    Instance { label: "so3 adjoint".into(), rep: Representation::adjoint_action(&LieAlgebra::so3()) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CaseOutcome {
    Checked { reports: Vec<CheckReport> },
    Rejected { reason: String },
    GenerationFailed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzCase {
    pub index: usize,
    pub seed: u64,
    pub label: String,
    pub outcome: CaseOutcome,
}

impl FuzzCase {
    pub fn passed(&self) -> bool {
        match &self.outcome {
            CaseOutcome::Checked { reports } => reports.iter().all(|r| r.passed),
            CaseOutcome::Rejected { .. } => true,
            CaseOutcome::GenerationFailed { .. } => false,
        }
    }
}

/// Why an instance is outside the contract, if it is.
pub fn rejection(rep: &Representation, tol: &Tolerance) -> Option<String> {
    let v = rep.algebra().validate(tol);
    if !v.accepted() {
        return Some(format!(
            "algebra rejected: antisymmetry residual {:.3e}, jacobi residual {:.3e}, derived dims {:?}",
            v.antisymmetry_residual, v.jacobi_residual, v.derived_dims
        ));
    }
    let rv = rep.validate(tol);
    if !rv.passed {
        return Some(format!("representation rejected: residual {:.3e} > {:.3e}", rv.max_residual, rv.threshold));
    }
    None
}

/// Runs every checker on one instance; `partner` supplies the second
/// factor of the tensor and multiplication checks.
pub fn run_case(inst: &Instance, partner: Option<&Instance>, seed: u64, tol: &Tolerance) -> CaseOutcome {
    if let Some(reason) = rejection(&inst.rep, tol) {
        return CaseOutcome::Rejected { reason };
    }
    match run_checks(inst, partner, seed, tol) {
        Ok(reports) => CaseOutcome::Checked { reports },
        Err(e @ Error::Input(_)) => CaseOutcome::Rejected { reason: e.to_string() },
        Err(e) => CaseOutcome::GenerationFailed { reason: e.to_string() },
    }
}

fn run_checks(inst: &Instance, partner: Option<&Instance>, seed: u64, tol: &Tolerance) -> Result<Vec<CheckReport>> {
    let rho = &inst.rep;
    let mut reports = vec![check_common_eigenvectors(rho, seed, tol)?, check_duality(rho, seed, tol)?];
    if rho.space_dim() * rho.space_dim() <= DEFAULT_CAP {
        reports.push(check_split_identity(rho, seed, tol)?);
    }
    for sub in test_subalgebras(rho.algebra(), seed, tol)? {
        reports.push(check_projection(rho, &sub, seed, tol)?);
    }
    reports.push(check_cartan_independence(rho, &[seed, seed.wrapping_add(1), seed.wrapping_add(2)], tol)?);
    if rho.algebra().is_nilpotent(tol)? {
        reports.push(check_nilpotent_coincidence(rho, seed, tol)?);
    }
    if let Some(other) = partner {
        if rejection(&other.rep, tol).is_none() {
            reports.push(check_tensor_formula(rho, &other.rep, seed, tol)?);
            reports.push(check_multiplication_formula(rho, &other.rep, seed, tol)?);
        }
    }
    Ok(reports)
}

/// Deterministic per-case seeds derived from a batch seed.
pub fn case_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.next_u64() >> 1).collect()
}

/// A generated instance and its tensor partner (product dimension ≤ 16).
pub fn generate_case(case_seed: u64, dims: &FuzzDims, tol: &Tolerance) -> Result<(Instance, Instance)> {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
    let inst = random_instance(&mut rng, dims, tol)?;
    let room = (16 / inst.rep.space_dim()).clamp(1, dims.max_space_dim.max(1));
    let partner_dims = FuzzDims { max_space_dim: room, ..*dims };
    let partner = random_instance(&mut rng, &partner_dims, tol)?;
    Ok((inst, partner))
}

/// Generates `count` instances and runs every checker on each. A case that
/// cannot be generated is recorded, never fatal.
pub fn fuzz(seed: u64, count: usize, dims: &FuzzDims, tol: &Tolerance) -> Vec<FuzzCase> {
    case_seeds(seed, count)
        .into_iter()
        .enumerate()
        .map(|(index, s)| match generate_case(s, dims, tol) {
            Ok((inst, partner)) => FuzzCase {
                index,
                seed: s,
                label: format!("{} x {}", inst.label, partner.label),
                outcome: run_case(&inst, Some(&partner), s, tol),
            },
            Err(e) => FuzzCase {
                index,
                seed: s,
                label: String::new(),
                outcome: CaseOutcome::GenerationFailed { reason: e.to_string() },
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::real_matrix;

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
        let mut e = vec![CMat::zeros(3, 3); 3];
        e[0][(0, 1)] = r(1.0);
        e[1][(1, 2)] = r(1.0);
        e[2][(0, 2)] = r(1.0);
        Representation::new(&LieAlgebra::heisenberg(), 3, e).unwrap()
    }

    fn diag57() -> Representation {
        Representation::new(&LieAlgebra::abelian(1), 2, vec![real_matrix(&[&[5.0, 0.0], &[0.0, 7.0]])]).unwrap()
    }

    fn assert_passed(rep: &CheckReport) {
        assert!(rep.passed, "{} failed: {:?} {:?}", rep.theorem_id, rep.error, rep.comparisons.iter().find(|c| !c.passed));
    }

    #[test]
    fn duality_examples() {
        let t = tol();
        let rep = check_duality(&affine_rep(), 1, &t).unwrap();
        assert_passed(&rep);
        assert_eq!(rep.comparisons[0].lhs.len(), 2);
        assert_passed(&check_duality(&heisenberg_rep(), 1, &t).unwrap());
        assert_passed(&check_duality(&Representation::zero(&LieAlgebra::affine(), 2), 1, &t).unwrap());
    }

    #[test]
    fn split_identity_examples() {
        let t = tol();
        assert_passed(&check_split_identity(&affine_rep(), 3, &t).unwrap());
        let ab = Representation::new(
            &LieAlgebra::abelian(2),
            2,
            vec![real_matrix(&[&[1.0, 0.0], &[0.0, 2.0]]), real_matrix(&[&[3.0, 0.0], &[0.0, 4.0]])],
        )
        .unwrap();
        assert_passed(&check_split_identity(&ab, 3, &t).unwrap());
        let one = Representation::zero(&LieAlgebra::abelian(1), 1).twist(&[r(2.0)]).unwrap();
        assert_passed(&check_split_identity(&one, 3, &t).unwrap());
    }

    #[test]
    fn projection_examples() {
        let t = tol();
        let a = LieAlgebra::affine();
        let e2 = SubalgebraBasis::new(&a, real_matrix(&[&[0.0], &[1.0]]), &t).unwrap();
        let rep = check_projection(&affine_rep(), &e2, 1, &t).unwrap();
        assert_passed(&rep);
        assert_eq!(rep.comparisons[0].rhs, vec![vec![r(0.0)]]);
        let e1 = SubalgebraBasis::new(&a, real_matrix(&[&[1.0], &[0.0]]), &t).unwrap();
        let rep = check_projection(&affine_rep(), &e1, 1, &t).unwrap();
        assert_passed(&rep);
        assert_eq!(rep.comparisons[0].rhs.len(), 2);
        assert_passed(&check_projection(&affine_rep(), &SubalgebraBasis::whole(&a), 1, &t).unwrap());
    }

    #[test]
    fn cartan_independence_examples() {
        let t = tol();
        let a = LieAlgebra::affine();
        let h1 = SubalgebraBasis::new(&a, real_matrix(&[&[1.0], &[0.0]]), &t).unwrap();
        let h2 = SubalgebraBasis::new(&a, real_matrix(&[&[1.0], &[1.0]]), &t).unwrap();
        let rep = check_cartan_independence_with(&affine_rep(), &[h1, h2], &t).unwrap();
        assert_passed(&rep);
        assert_passed(&check_cartan_independence(&heisenberg_rep(), &[1, 2], &t).unwrap());
        let two = LieAlgebra::direct_sum(&a, &a);
        let mut mats = Vec::new();
        for m in affine_rep().mats() {
            let mut big = CMat::zeros(4, 4);
            big.view_mut((0, 0), (2, 2)).copy_from(m);
            mats.push(big);
        }
        for m in affine_rep().mats() {
            let mut big = CMat::zeros(4, 4);
            big.view_mut((2, 2), (2, 2)).copy_from(m);
            mats.push(big);
        }
        let sum = Representation::new(&two, 4, mats).unwrap();
        assert_passed(&check_cartan_independence(&sum, &[1, 2], &t).unwrap());
        assert!(check_cartan_independence(&sum, &[1], &t).is_err());
    }

    #[test]
    fn tensor_and_multiplication_examples() {
        let t = tol();
        let rep = check_tensor_formula(&affine_rep(), &diag57(), 1, &t).unwrap();
        assert_passed(&rep);
        assert!(rep.inclusions_ok());
        let mut lhs = rep.comparisons[0].lhs.clone();
        lhs.sort_by(|a, b| crate::numkit::cmp_coords(a, b));
        let want: Points = [[0.0, 0.0, 5.0], [0.0, 0.0, 7.0], [1.0, 0.0, 5.0], [1.0, 0.0, 7.0]]
            .iter()
            .map(|p| p.iter().map(|&x| r(x)).collect())
            .collect();
        assert!(hausdorff_distance(&lhs, &want) < 1e-9);

        let zero = Representation::zero(&LieAlgebra::abelian(1), 1);
        let rep = check_tensor_formula(&zero, &affine_rep(), 1, &t).unwrap();
        assert_passed(&rep);
        let rep = check_multiplication_formula(&zero, &diag57(), 1, &t).unwrap();
        assert_passed(&rep);
        let want: Points = vec![vec![r(0.0), r(5.0)], vec![r(0.0), r(7.0)]];
        assert!(hausdorff_distance(&rep.comparisons[0].lhs, &want) < 1e-9);
        assert_passed(&check_multiplication_formula(&affine_rep(), &heisenberg_rep(), 2, &t).unwrap());
    }

    #[test]
    fn nilpotent_coincidence_examples() {
        let t = tol();
        assert_passed(&check_nilpotent_coincidence(&heisenberg_rep(), 1, &t).unwrap());
        let ab = Representation::new(
            &LieAlgebra::abelian(2),
            2,
            vec![real_matrix(&[&[1.0, 0.0], &[0.0, 2.0]]), real_matrix(&[&[3.0, 0.0], &[0.0, 4.0]])],
        )
        .unwrap();
        assert_passed(&check_nilpotent_coincidence(&ab, 1, &t).unwrap());
        assert_passed(&check_nilpotent_coincidence(&diag57(), 1, &t).unwrap());
        assert!(matches!(check_nilpotent_coincidence(&affine_rep(), 1, &t), Err(Error::Input(_))));
    }

    #[test]
    fn fuzz_examples() {
        let t = tol();
        assert!(fuzz(7, 0, &FuzzDims::default(), &t).is_empty());
        let cases = fuzz(42, 1, &FuzzDims::default(), &t);
        assert_eq!(cases.len(), 1);
        assert!(matches!(cases[0].outcome, CaseOutcome::Checked { .. }), "{:?}", cases[0].outcome);
        assert!(cases[0].passed(), "{:?}", cases[0]);
        assert_eq!(cases, fuzz(42, 1, &FuzzDims::default(), &t));
        let so3 = run_case(&so3_instance(), None, 1, &t);
        assert!(matches!(so3, CaseOutcome::Rejected { .. }));
    }

    #[test]
    fn generated_instances_validate() {
        let t = tol();
        for s in case_seeds(5, 40) {
            let (a, b) = generate_case(s, &FuzzDims::default(), &t).unwrap();
            assert!(rejection(&a.rep, &t).is_none(), "{}", a.label);
            assert!(a.rep.algebra().is_solvable(&t).unwrap());
            assert!(a.rep.space_dim() * b.rep.space_dim() <= 16);
        }
        let nil = FuzzDims { nilpotent_only: true, ..FuzzDims::default() };
        for s in case_seeds(6, 20) {
            let (a, _) = generate_case(s, &nil, &t).unwrap();
            assert!(a.rep.algebra().is_nilpotent(&t).unwrap());
        }
    }

    #[test]
    fn unimodular_has_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..5 {
            let p = unimodular(&mut rng, n);
            assert!((p.determinant() - r(1.0)).norm() < 1e-12);
        }
    }
}
