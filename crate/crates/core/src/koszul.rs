//! Chevalley-Eilenberg (Koszul) chain complexes of a representation of a
//! nilpotent algebra `H`, twisted by a functional `f` on `H`.
//!
//! Chains in degree `p` are `X ⊗ Λᵖ H`. Wedge monomials `h_{i1} ∧ … ∧ h_{ip}`
//! (`i1 < … < ip`) are ordered lexicographically; the chain coordinate of
//! `x_a ⊗ w_s` is `s·d + a`, so each boundary matrix is a grid of `d×d`
//! blocks.

use serde::{Deserialize, Serialize};

use crate::numkit::{norm2, rank_below, CMat, Tolerance, C64};
use crate::rep::Representation;
use crate::{input_err, numerical_err, Result};

/// Boundary maps `d_p : X ⊗ Λᵖ H → X ⊗ Λᵖ⁻¹ H`, `p = 1..=r`.
#[derive(Debug, Clone)]
pub struct KoszulComplex {
    h_dim: usize,
    space_dim: usize,
    boundaries: Vec<CMat>,
    scale: f64,
}

/// Homology dimensions `H_0 … H_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub dims: Vec<usize>,
}

/// Which end of the complex a Słodkowski level inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Degrees `0..=k`.
    Delta,
    /// Degrees `r-k..=r`.
    Pi,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Delta => Side::Pi,
            Side::Pi => Side::Delta,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Delta => "delta",
            Side::Pi => "pi",
        })
    }
}

/// Lexicographically ordered `p`-subsets of `0..r`.
pub fn wedge_basis(r: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, r: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            if r - i < p - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, r, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= r {
        rec(0, r, p, &mut Vec::with_capacity(p), &mut out);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn sign(exp: usize) -> f64 {
    if exp.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Builds the complex of `h_rep` twisted by `f`:
///
/// `d(x ⊗ h_{i1}∧…∧h_{ip}) = Σ_k (−1)^{k+1} (ρ(h_{ik}) − f(h_{ik}))x ⊗ (omit h_{ik})
///   + Σ_{k<l} (−1)^{k+l+1} x ⊗ [h_{ik}, h_{il}] ∧ (omit both)`.
///
/// With `ρ` acting on the left, the bracket term carries the extra sign that
/// makes `d ∘ d = 0`.
/// `f` must vanish on `H²` so that `ρ − f` is again a representation.
pub fn build_complex(h_rep: &Representation, f: &[C64], tol: &Tolerance) -> Result<KoszulComplex> {
    let alg = h_rep.algebra();
    let r = alg.dim();
    let d = h_rep.space_dim();
    if f.len() != r {
        return input_err(format!("twisting functional has {} values, H has dimension {r}", f.len()));
    }
    let derived = alg.derived_subalgebra(tol)?;
    for v in derived.orthonormal().column_iter() {
        let val: C64 = v.iter().zip(f).map(|(x, y)| x * y).sum();
        if val.norm() > tol.match_eps {
            return input_err(format!("twisting functional does not vanish on [H, H] (|f(v)| = {:.3e})", val.norm()));
        }
    }

    let id = CMat::identity(d, d);
    let twisted: Vec<CMat> = h_rep.mats().iter().zip(f).map(|(m, &c)| m - &id * c).collect();
    let bases: Vec<Vec<Vec<usize>>> = (0..=r).map(|p| wedge_basis(r, p)).collect();
    let index_of = |p: usize, s: &[usize]| -> usize {
        bases[p].binary_search_by(|probe| probe.as_slice().cmp(s)).expect("wedge monomial present")
    };

    let mut boundaries = Vec::with_capacity(r);
    for p in 1..=r {
        let mut m = CMat::zeros(d * bases[p - 1].len(), d * bases[p].len());
        for (col, s) in bases[p].iter().enumerate() {
            // Operator terms.
            for k in 0..p {
                let mut rest = s.clone();
                let i = rest.remove(k);
                let row = index_of(p - 1, &rest);
                let sgn = sign(k); // (−1)^{(k+1)+1} with 1-based k
                let mut block = m.view_mut((row * d, col * d), (d, d));
                block += &twisted[i] * C64::new(sgn, 0.0);
            }
            // Bracket terms.
            for k in 0..p {
                for l in (k + 1)..p {
                    let (a, b) = (s[k], s[l]);
                    let rest: Vec<usize> = s.iter().enumerate().filter(|&(t, _)| t != k && t != l).map(|(_, &x)| x).collect();
                    let outer = sign(k + l + 1); // (−1)^{(k+1)+(l+1)+1}
                    for mm in 0..r {
                        let cst = alg.structure_constant(a, b, mm);
                        if cst == C64::default() || rest.contains(&mm) {
                            continue;
                        }
                        let before = rest.iter().filter(|&&x| x < mm).count();
                        let mut target = rest.clone();
                        target.insert(before, mm);
                        let row = index_of(p - 1, &target);
                        let coef = cst * (outer * sign(before));
                        for t in 0..d {
                            m[(row * d + t, col * d + t)] += coef;
                        }
                    }
                }
            }
        }
        boundaries.push(m);
    }
    let scale = boundaries.iter().map(norm2).fold(0.0, f64::max);
    Ok(KoszulComplex { h_dim: r, space_dim: d, boundaries, scale })
}

impl KoszulComplex {
    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    /// `d_p` for `p = 1..=r`.
    pub fn boundary(&self, p: usize) -> Option<&CMat> {
        p.checked_sub(1).and_then(|i| self.boundaries.get(i))
    }

    pub fn chain_dim(&self, p: usize) -> usize {
        self.space_dim * binomial(self.h_dim, p)
    }

    /// Largest spectral norm among the boundary maps; ranks are decided
    /// against `rank_eps` times this value.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `max_p ‖d_p d_{p+1}‖ / (‖d_p‖·‖d_{p+1}‖)`, zero when a factor vanishes.
    pub fn relative_residual(&self) -> f64 {
        self.boundaries
            .windows(2)
            .map(|w| {
                let denom = norm2(&w[0]) * norm2(&w[1]);
                if denom == 0.0 {
                    0.0
                } else {
                    norm2(&(&w[0] * &w[1])) / denom
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn is_complex(&self, tol: &Tolerance) -> bool {
        self.relative_residual() <= 10.0 * tol.rank_eps
    }
}

/// `H_p = dim ker d_p − rank d_{p+1}` with ranks decided at
/// `rank_eps · scale`.
pub fn homology_dims(c: &KoszulComplex, tol: &Tolerance) -> Result<HomologyProfile> {
    let r = c.h_dim;
    let threshold = tol.rank_eps * c.scale.max(1.0);
    let ranks = c
        .boundaries
        .iter()
        .map(|m| rank_below(m, threshold))
        .collect::<Result<Vec<_>>>()?;
    let rank_of = |p: usize| -> usize {
        if p == 0 || p > r {
            0
        } else {
            ranks[p - 1]
        }
    };
    let mut dims = Vec::with_capacity(r + 1);
    for p in 0..=r {
        let kernel = c.chain_dim(p) as i64 - rank_of(p) as i64;
        let h = kernel - rank_of(p + 1) as i64;
        if h < 0 {
            return numerical_err(format!("negative homology dimension {h} in degree {p}"));
        }
        dims.push(h as usize);
    }
    Ok(HomologyProfile { dims })
}

impl HomologyProfile {
    /// `r`, the top degree.
    pub fn top_degree(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn nonexact_degrees(&self) -> Vec<usize> {
        self.dims.iter().enumerate().filter(|(_, &h)| h != 0).map(|(p, _)| p).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.dims.iter().all(|&h| h == 0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(p, &h)| sign(p) as i64 * h as i64).sum()
    }

    /// δ-side: some `H_p ≠ 0` with `p ≤ k`; π-side: some `H_p ≠ 0` with
    /// `p ≥ r − k`.
    pub fn slodkowski_membership(&self, k: usize, side: Side) -> Result<bool> {
        let r = self.top_degree();
        if k > r {
            return input_err(format!("level {k} exceeds the top degree {r}"));
        }
        let window = match side {
            Side::Delta => 0..=k,
            Side::Pi => (r - k)..=r,
        };
        Ok(window.into_iter().any(|p| self.dims[p] != 0))
    }

    /// Nonexact somewhere.
    pub fn taylor_membership(&self) -> bool {
        !self.is_exact()
    }
}
