use cartan_spectra::spectra::{spectrum, SpectrumKind};
use cartan_spectra::verify::{self, CheckReport, FuzzDims};
use cartan_spectra::{
    find_cartan_subalgebra, root_decomposition, CartanDecomposition, LieAlgebra, Representation, Side,
    SubalgebraBasis, Tolerance,
};
use serde_json::{json, Value};

use crate::problem::{to_pairs, Problem, ProblemFile};
use crate::{CliError, Outcome, ResultDocument};

fn document(command: &str, file: Option<&ProblemFile>, parameters: Value, results: Value, tol: Tolerance, seed: Option<u64>) -> ResultDocument {
    ResultDocument {
        version: env!("CARGO_PKG_VERSION").to_string(),
        input_digest: file.map(ProblemFile::digest),
        command: command.to_string(),
        parameters,
        results,
        tolerance: tol,
        seed,
    }
}

fn basis_json(m: &cartan_spectra::CMat) -> Value {
    json!(m.column_iter().map(|c| to_pairs(c.as_slice())).collect::<Vec<_>>())
}

fn algebra_report(alg: &LieAlgebra, tol: &Tolerance) -> (bool, Value) {
    let v = alg.validate(tol);
    let nilpotent = v.accepted() && alg.is_nilpotent(tol).unwrap_or(false);
    (
        v.accepted(),
        json!({
            "antisymmetry_residual": v.antisymmetry_residual,
            "jacobi_residual": v.jacobi_residual,
            "antisymmetric": v.antisymmetric,
            "jacobi": v.jacobi,
            "solvable": v.solvable,
            "nilpotent": nilpotent,
            "derived_dims": v.derived_dims,
            "accepted": v.accepted(),
        }),
    )
}

fn rep_report(r: &Representation, tol: &Tolerance) -> (bool, Value) {
    let v = r.validate(tol);
    (v.passed, json!({ "max_residual": v.max_residual, "threshold": v.threshold, "passed": v.passed }))
}

/// Diagnostics for every part of the problem, and whether all of it is usable.
fn diagnostics(p: &Problem) -> (bool, Value) {
    let tol = &p.tolerance;
    let (alg_ok, alg) = algebra_report(&p.algebra, tol);
    let (rep_ok, rep) = p.representation.as_ref().map_or((true, Value::Null), |r| rep_report(r, tol));
    let subs: Vec<Value> = p
        .subalgebras
        .iter()
        .map(|(name, s)| json!({ "name": name, "dim": s.dim(), "closure_residual": s.closure_residual(), "closed": s.closure_check(tol) }))
        .collect();
    let subs_ok = p.subalgebras.iter().all(|(_, s)| s.closure_check(tol));
    let cartan = p.cartan.as_ref().map(|h| {
        json!({ "dim": h.dim(), "closed": h.closure_check(tol), "is_cartan": alg_ok && cartan_spectra::is_cartan(&p.algebra, h, tol) })
    });
    let cartan_ok = p.cartan.as_ref().is_none_or(|h| alg_ok && h.closure_check(tol) && cartan_spectra::is_cartan(&p.algebra, h, tol));
    let ok = alg_ok && rep_ok && subs_ok && cartan_ok;
    (ok, json!({ "valid": ok, "algebra": alg, "representation": rep, "subalgebras": subs, "cartan": cartan }))
}

fn require_valid(p: &Problem) -> Result<(), CliError> {
    let (ok, report) = diagnostics(p);
    if ok {
        Ok(())
    } else {
        Err(CliError::rejected("problem failed validation", report))
    }
}

fn require_rep(p: &Problem) -> Result<&Representation, CliError> {
    p.representation.as_ref().ok_or_else(|| CliError::input("this command needs a representation block"))
}

fn decomposition(p: &Problem, seed: u64) -> Result<CartanDecomposition, CliError> {
    let h = match &p.cartan {
        Some(h) => h.clone(),
        None => find_cartan_subalgebra(&p.algebra, seed, &p.tolerance)?,
    };
    Ok(root_decomposition(&p.algebra, &h, &p.tolerance)?)
}

pub fn cmd_validate(file: &ProblemFile, rank_eps: Option<f64>, match_eps: Option<f64>) -> Result<Outcome, CliError> {
    let p = file.build(rank_eps, match_eps)?;
    let (ok, report) = diagnostics(&p);
    let error = (!ok).then(|| CliError::rejected("problem failed validation", report.clone()));
    Ok(Outcome { document: document("validate", Some(file), json!({}), report, p.tolerance, None), error })
}

pub fn cmd_cartan(file: &ProblemFile, seed: u64, rank_eps: Option<f64>, match_eps: Option<f64>) -> Result<Outcome, CliError> {
    let p = file.build(rank_eps, match_eps)?;
    require_valid(&p)?;
    let cd = decomposition(&p, seed)?;
    let roots: Vec<Value> = cd
        .roots()
        .iter()
        .map(|r| json!({ "alpha": to_pairs(&r.alpha), "dim": r.space.dim(), "basis": basis_json(r.space.basis()) }))
        .collect();
    let results = json!({
        "h_basis": basis_json(cd.h().basis()),
        "h_star_basis": basis_json(cd.h_star().basis()),
        "roots": roots,
        "from_file": p.cartan.is_some(),
    });
    Ok(Outcome { document: document("cartan", Some(file), json!({}), results, p.tolerance, Some(seed)), error: None })
}

pub fn parse_side(s: &str) -> Result<Side, CliError> {
    match s {
        "delta" => Ok(Side::Delta),
        "pi" => Ok(Side::Pi),
        other => Err(CliError::input(format!("unknown side '{other}', expected delta or pi"))),
    }
}

pub fn cmd_spectrum(
    file: &ProblemFile,
    kind: &str,
    k: Option<usize>,
    side: Option<Side>,
    seed: u64,
    rank_eps: Option<f64>,
    match_eps: Option<f64>,
) -> Result<Outcome, CliError> {
    let p = file.build(rank_eps, match_eps)?;
    let r = require_rep(&p)?;
    require_valid(&p)?;
    let kind = SpectrumKind::from_parts(kind, k, side)?;
    let cd = decomposition(&p, seed)?;
    let set = spectrum(r, &cd, kind, &p.tolerance)?;
    let params = json!({ "kind": kind.to_string() });
    let results = serde_json::to_value(&set).expect("spectrum sets serialize");
    Ok(Outcome { document: document("spectrum", Some(file), params, results, p.tolerance, Some(seed)), error: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Theorem {
    Duality,
    SplitIdentity,
    Projection,
    CartanIndependence,
    Tensor,
    Multiplication,
    Nilpotent,
    Eigenvectors,
    All,
}

fn partner_rep(with: Option<&ProblemFile>, p: &Problem) -> Result<Option<Representation>, CliError> {
    let Some(f) = with else { return Ok(None) };
    let q = f.build(Some(p.tolerance.rank_eps), Some(p.tolerance.match_eps))?;
    require_rep(&q)?;
    require_valid(&q)?;
    Ok(q.representation)
}

pub fn cmd_verify(
    file: &ProblemFile,
    theorem: Theorem,
    seeds: &[u64],
    with: Option<&ProblemFile>,
    rank_eps: Option<f64>,
    match_eps: Option<f64>,
) -> Result<Outcome, CliError> {
    let p = file.build(rank_eps, match_eps)?;
    let r = require_rep(&p)?;
    require_valid(&p)?;
    let tol = &p.tolerance;
    let seeds: Vec<u64> = if seeds.is_empty() { vec![0, 1, 2] } else { seeds.to_vec() };
    let seed = seeds[0];
    let partner = partner_rep(with, &p)?;
    let nilpotent = p.algebra.is_nilpotent(tol)?;
    let mut reports: Vec<CheckReport> = Vec::new();
    let all = theorem == Theorem::All;

    if all || theorem == Theorem::Duality {
        reports.push(verify::check_duality(r, seed, tol)?);
    }
    if theorem == Theorem::SplitIdentity || (all && r.space_dim() * r.space_dim() <= 64) {
        reports.push(verify::check_split_identity(r, seed, tol)?);
    }
    if all || theorem == Theorem::Projection {
        let subs: Vec<SubalgebraBasis> = if p.subalgebras.is_empty() {
            verify::test_subalgebras(&p.algebra, seed, tol)?
        } else {
            p.subalgebras.iter().map(|(_, s)| s.clone()).collect()
        };
        for s in &subs {
            reports.push(verify::check_projection(r, s, seed, tol)?);
        }
    }
    if all || theorem == Theorem::CartanIndependence {
        let mut bases = Vec::new();
        if let Some(h) = &p.cartan {
            bases.push(h.clone());
        }
        for s in &seeds {
            bases.push(find_cartan_subalgebra(&p.algebra, *s, tol)?);
        }
        if bases.len() < 2 {
            return Err(CliError::input("Cartan independence needs at least two seeds or a file Cartan subalgebra plus one seed"));
        }
        reports.push(verify::check_cartan_independence_with(r, &bases, tol)?);
    }
    for (want, f) in [
        (Theorem::Tensor, verify::check_tensor_formula as fn(&Representation, &Representation, u64, &Tolerance) -> cartan_spectra::Result<CheckReport>),
        (Theorem::Multiplication, verify::check_multiplication_formula),
    ] {
        if all || theorem == want {
            match &partner {
                Some(q) => reports.push(f(r, q, seed, tol)?),
                None if all => {}
                None => return Err(CliError::input("tensor and multiplication checks need a second problem file via --with")),
            }
        }
    }
    if theorem == Theorem::Nilpotent || (all && nilpotent) {
        reports.push(verify::check_nilpotent_coincidence(r, seed, tol)?);
    }
    if all || theorem == Theorem::Eigenvectors {
        reports.push(verify::check_common_eigenvectors(r, seed, tol)?);
    }

    let failed = reports.iter().filter(|c| !c.passed).count();
    let params = json!({
        "theorem": format!("{theorem:?}"),
        "seeds": seeds,
        "with_digest": with.map(ProblemFile::digest),
    });
    let results = json!({ "passed": failed == 0, "failed": failed, "reports": reports });
    let error = (failed > 0).then(|| CliError::Numerical(format!("{failed} check(s) failed")));
    Ok(Outcome { document: document("verify", Some(file), params, results, *tol, Some(seed)), error })
}

pub fn cmd_fuzz(seed: u64, count: usize, dims: FuzzDims, rank_eps: Option<f64>, match_eps: Option<f64>) -> Result<Outcome, CliError> {
    let d = Tolerance::default();
    let tol = Tolerance::new(rank_eps.unwrap_or(d.rank_eps), match_eps.unwrap_or(d.match_eps))?;
    if dims.max_algebra_dim == 0 || dims.max_space_dim == 0 {
        return Err(CliError::input("fuzz dimensions must be positive"));
    }
    let cases = verify::fuzz(seed, count, &dims, &tol);
    let mut counts = [0usize; 3];
    for c in &cases {
        counts[match c.outcome {
            verify::CaseOutcome::Checked { .. } => 0,
            verify::CaseOutcome::Rejected { .. } => 1,
            verify::CaseOutcome::GenerationFailed { .. } => 2,
        }] += 1;
    }
    let failed = cases.iter().filter(|c| !c.passed()).count();
    let params = json!({ "count": count, "dims": dims });
    let results = json!({
        "checked": counts[0],
        "rejected": counts[1],
        "generation_failed": counts[2],
        "failed": failed,
        "cases": cases,
    });
    let error = (failed > 0).then(|| CliError::Numerical(format!("{failed} fuzz case(s) failed")));
    Ok(Outcome { document: document("fuzz", None, params, results, tol, Some(seed)), error })
}
