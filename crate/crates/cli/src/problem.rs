//! JSON problem files.
//!
//! Complex numbers are `[re, im]` pairs, basis indices are 1-based, and
//! brackets are listed sparsely as `[i, j, coefficients]` with `i < j`.
//!
//! ```json
//! {
//!   "algebra": { "dim": 2, "brackets": [[1, 2, [[0, 0], [1, 0]]]] },
//!   "representation": {
//!     "space_dim": 2,
//!     "matrices": [
//!       [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
//!       [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]
//!     ]
//!   },
//!   "subalgebras": [{ "name": "E", "basis": [[[0, 0], [1, 0]]] }],
//!   "cartan": [[[1, 0], [0, 0]]],
//!   "tolerance": { "rank_eps": 1e-9, "match_eps": 1e-7 }
//! }
//! ```

use cartan_spectra::numkit::CMat;
use cartan_spectra::{LieAlgebra, Representation, SubalgebraBasis, Tolerance, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub algebra: AlgebraBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subalgebras: Vec<SubalgebraBlock>,
    /// Basis of a Cartan subalgebra to use instead of a seeded search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan: Option<Vec<Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<ToleranceBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraBlock {
    pub dim: usize,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, Vec<Pair>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepBlock {
    pub space_dim: usize,
    /// One matrix per basis vector of the algebra, as a list of rows.
    pub matrices: Vec<Vec<Vec<Pair>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubalgebraBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub basis: Vec<Vec<Pair>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_eps: Option<f64>,
}

/// A parsed problem with all numerical objects built.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub algebra: LieAlgebra,
    pub representation: Option<Representation>,
    pub subalgebras: Vec<(String, SubalgebraBasis)>,
    pub cartan: Option<SubalgebraBasis>,
    pub tolerance: Tolerance,
}

fn complex(p: &Pair, what: &str) -> Result<C64, CliError> {
    if !p[0].is_finite() || !p[1].is_finite() {
        return Err(CliError::input(format!("non-finite entry in {what}")));
    }
    Ok(C64::new(p[0], p[1]))
}

fn vector(v: &[Pair], dim: usize, what: &str) -> Result<Vec<C64>, CliError> {
    if v.len() != dim {
        return Err(CliError::input(format!("{what} has {} entries, expected {dim}", v.len())));
    }
    v.iter().map(|p| complex(p, what)).collect()
}

fn columns(basis: &[Vec<Pair>], dim: usize, what: &str) -> Result<CMat, CliError> {
    let mut m = CMat::zeros(dim, basis.len());
    for (j, v) in basis.iter().enumerate() {
        for (i, z) in vector(v, dim, what)?.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

pub fn to_pairs(v: &[C64]) -> Vec<Pair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("malformed problem file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    /// sha256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("problem files serialize");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn tolerance(&self, rank_eps: Option<f64>, match_eps: Option<f64>) -> Result<Tolerance, CliError> {
        let d = Tolerance::default();
        let file = self.tolerance.unwrap_or_default();
        Ok(Tolerance::new(
            rank_eps.or(file.rank_eps).unwrap_or(d.rank_eps),
            match_eps.or(file.match_eps).unwrap_or(d.match_eps),
        )?)
    }

    pub fn build_algebra(&self) -> Result<LieAlgebra, CliError> {
        let n = self.algebra.dim;
        if n == 0 {
            return Err(CliError::input("algebra dimension must be positive"));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut brackets = Vec::with_capacity(self.algebra.brackets.len());
        for (i, j, v) in &self.algebra.brackets {
            if *i < 1 || *j > n || i >= j {
                return Err(CliError::input(format!("bracket indices ({i}, {j}) must satisfy 1 <= i < j <= {n}")));
            }
            if !seen.insert((*i, *j)) {
                return Err(CliError::input(format!("bracket ({i}, {j}) listed twice")));
            }
            brackets.push((i - 1, j - 1, vector(v, n, &format!("bracket ({i}, {j})"))?));
        }
        Ok(LieAlgebra::from_brackets(n, &brackets)?)
    }

    /// Builds everything without judging validity; see [`crate::commands`].
    pub fn build(&self, rank_eps: Option<f64>, match_eps: Option<f64>) -> Result<Problem, CliError> {
        let tolerance = self.tolerance(rank_eps, match_eps)?;
        let algebra = self.build_algebra()?;
        let n = algebra.dim();
        let representation = match &self.representation {
            None => None,
            Some(rb) => {
                if rb.matrices.len() != n {
                    return Err(CliError::input(format!(
                        "representation lists {} matrices for an algebra of dimension {n}",
                        rb.matrices.len()
                    )));
                }
                let d = rb.space_dim;
                let mut mats = Vec::with_capacity(n);
                for (k, rows) in rb.matrices.iter().enumerate() {
                    let what = format!("matrix {}", k + 1);
                    if rows.len() != d {
                        return Err(CliError::input(format!("{what} has {} rows, expected {d}", rows.len())));
                    }
                    let mut m = CMat::zeros(d, d);
                    for (i, row) in rows.iter().enumerate() {
                        for (j, z) in vector(row, d, &what)?.into_iter().enumerate() {
                            m[(i, j)] = z;
                        }
                    }
                    mats.push(m);
                }
                Some(Representation::new(&algebra, d, mats)?)
            }
        };
        let mut subalgebras = Vec::new();
        for (idx, sb) in self.subalgebras.iter().enumerate() {
            let name = sb.name.clone().unwrap_or_else(|| format!("subalgebra {}", idx + 1));
            let basis = columns(&sb.basis, n, &name)?;
            subalgebras.push((name, SubalgebraBasis::new(&algebra, basis, &tolerance)?));
        }
        let cartan = match &self.cartan {
            None => None,
            Some(b) => Some(SubalgebraBasis::new(&algebra, columns(b, n, "cartan basis")?, &tolerance)?),
        };
        Ok(Problem { file: self.clone(), algebra, representation, subalgebras, cartan, tolerance })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const AFFINE: &str = r#"{
        "algebra": { "dim": 2, "brackets": [[1, 2, [[0, 0], [1, 0]]]] },
        "representation": { "space_dim": 2, "matrices": [
            [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
            [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]
        ] }
    }"#;

    #[test]
    fn parses_affine_example() {
        let p = ProblemFile::parse(AFFINE).unwrap().build(None, None).unwrap();
        assert_eq!(p.algebra, LieAlgebra::affine());
        assert_eq!(p.representation.unwrap().mats()[1][(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(p.tolerance, Tolerance::default());
    }

    #[test]
    fn round_trip_preserves_digest() {
        let p = ProblemFile::parse(AFFINE).unwrap();
        let q = ProblemFile::parse(&p.to_json()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.digest(), q.digest());
    }

    #[test]
    fn rejects_bad_brackets() {
        for bad in [
            r#"{"algebra": {"dim": 2, "brackets": [[2, 1, [[0,0],[1,0]]]]}}"#,
            r#"{"algebra": {"dim": 2, "brackets": [[1, 3, [[0,0],[1,0]]]]}}"#,
            r#"{"algebra": {"dim": 2, "brackets": [[1, 2, [[0,0]]]]}}"#,
            r#"{"algebra": {"dim": 2, "brackets": [[1, 2, [[0,0],[1,0]]], [1, 2, [[0,0],[1,0]]]]}}"#,
            r#"{"algebra": {"dim": 2}, "extra": 1}"#,
        ] {
            let err = ProblemFile::parse(bad).and_then(|f| f.build(None, None)).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{bad}");
        }
    }

    #[test]
    fn flags_override_file_tolerance() {
        let mut f = ProblemFile::parse(AFFINE).unwrap();
        f.tolerance = Some(ToleranceBlock { rank_eps: Some(1e-8), match_eps: None });
        let t = f.tolerance(None, Some(1e-6)).unwrap();
        assert_eq!((t.rank_eps, t.match_eps), (1e-8, 1e-6));
        assert!(f.tolerance(Some(-1.0), None).is_err());
    }
}
