//! Batch front end: job documents parsed from flags or JSON, dispatched
//! to the library modules, emitted as deterministic JSON or TSV.
//!
//! Exit codes: 0 on success, 1 when a mathematical verdict fails (so
//! shell pipelines can test inequalities), 2 on input errors.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::affine::{admissible_set, point_count, AffineFamily};
use crate::arith::{format_q, parse_q, Q};
use crate::characters::{satake_basis_change, satake_count_polynomials, INTERPOLATION_PRIMES};
use crate::datum::RootDatum;
use crate::local_model::{
    dp1_kernel_rank_linear, dp1_kernel_rank_symplectic, finite_field_census,
    lie_quotient_oracle_linear, lie_quotient_oracle_symplectic, normalized_exponent_linear,
    normalized_exponent_symplectic, strata_linear, strata_symplectic, CensusFamily,
};
use crate::newton::{katz_mazur_check, lafforgue_check, newton_map, NewtonPoint, SatakeClass};
use crate::normalize::{
    generator_table, integral_exponent, symplectic_exponent, t_basis_exponent, unitary_exponent,
    Preset, SignatureWeight,
};
use crate::{Error, Result};

/// A complete description of one batch job. Serialized form is a flat
/// JSON object; unknown fields are rejected by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: CommandName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuations: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infchar: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl JobSpec {
    pub fn new(command: CommandName) -> JobSpec {
        JobSpec {
            command,
            family: None,
            g: None,
            n: None,
            p: None,
            q: None,
            j: None,
            kappa: None,
            central: None,
            preset: None,
            lambda: None,
            mu: None,
            level: None,
            valuations: None,
            infchar: None,
            nu: None,
            degrees: None,
            height_bound: None,
            q0: None,
            format: None,
            budget: None,
            seed: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Normalize,
    Strata,
    Admissible,
    Satake,
    NewtonCheck,
    KatzMazur,
    Consistency,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Tsv,
}

/// Machine-readable code for a module error, printed on stderr before
/// exiting with code 2.
pub fn error_code(err: &Error) -> &'static str {
    match err {
        Error::Shape(_) => "E_SHAPE",
        Error::NotIntegral(_) => "E_NOT_INTEGRAL",
        Error::Parity(_) => "E_PARITY",
        Error::NotDominant(_) => "E_NOT_DOMINANT",
        Error::BadRank(_) => "E_BAD_RANK",
        Error::Oversize(_) => "E_OVERSIZE",
        Error::Indeterminate(_) => "E_INDETERMINATE",
        Error::Invalid(_) => "E_INVALID",
    }
}

/// Parses a job document, reporting malformed input with position info.
pub fn parse_spec(text: &str) -> Result<JobSpec> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("job document: {e}")))
}

pub fn load_spec(path: &Path) -> Result<JobSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

/// Serializes a job document; `parse_spec(&emit_spec(s)) == s` for every
/// valid spec.
pub fn emit_spec(spec: &JobSpec) -> String {
    let mut out = serde_json::to_string_pretty(spec).expect("spec serializes");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------
// Reports.

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Normalize(NormalizeReport),
    Strata(StrataReport),
    Admissible(AdmissibleReport),
    Satake(SatakeReport),
    NewtonCheck(NewtonCheckReport),
    KatzMazur(KatzMazurOut),
    Consistency(ConsistencyReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<TableOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableOut {
    pub label: String,
    pub rows: Vec<RowOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowOut {
    pub name: String,
    pub coweight: String,
    pub exponent: i64,
    pub naive: String,
    pub invertible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentOut {
    pub family: String,
    pub kappa: String,
    pub lambda: String,
    pub integral: String,
    pub t_basis: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrataReport {
    pub family: String,
    pub components: Vec<ComponentOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentOut {
    pub parameter: usize,
    pub index_set: Vec<usize>,
    pub diagonal: Vec<i64>,
    pub dimension: u64,
    pub dp1: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibleReport {
    pub family: String,
    pub level: Vec<usize>,
    pub mu: Vec<i64>,
    pub strata: Vec<AdmStratumOut>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmStratumOut {
    pub window: Vec<i64>,
    pub translation: Vec<i64>,
    pub dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SatakeReport {
    pub n: usize,
    pub lambda: Vec<i64>,
    /// Coset basis expanded over normalized characters, keyed by weight;
    /// entries are polynomials in the field size, constant term first.
    pub forward: BTreeMap<String, BTreeMap<String, Vec<i64>>>,
    /// Normalized characters expanded over the coset basis.
    pub inverse: BTreeMap<String, BTreeMap<String, Vec<i64>>>,
    /// Coset-count polynomials in the residue field size, constant term
    /// first, keyed by torus exponent vector.
    pub coset_polynomials: BTreeMap<String, Vec<i64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NewtonCheckReport {
    pub newton_point: Vec<String>,
    pub target: Vec<String>,
    pub direct: bool,
    pub trace_side: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<i64>>>,
    pub indeterminate_count: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KatzMazurOut {
    pub rows: Vec<KmRow>,
    pub equality_at_end: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<KmFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KmRow {
    pub k: usize,
    pub newton: String,
    pub hodge: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KmFailure {
    pub k: usize,
    pub slack: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub checks: Vec<CheckOut>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOut {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Rendered output plus the mathematical verdict controlling the exit
/// code.
#[derive(Debug)]
pub struct RunOutput {
    pub rendered: String,
    pub verdict_ok: bool,
}

// ---------------------------------------------------------------------
// Dispatch.

pub fn run(spec: &JobSpec) -> Result<RunOutput> {
    let format = spec.format.unwrap_or_default();
    let (report, verdict_ok) = match spec.command {
        CommandName::Normalize => run_normalize(spec)?,
        CommandName::Strata => run_strata(spec)?,
        CommandName::Admissible => run_admissible(spec)?,
        CommandName::Satake => run_satake(spec)?,
        CommandName::NewtonCheck => run_newton_check(spec)?,
        CommandName::KatzMazur => run_katz_mazur(spec)?,
        CommandName::Consistency => run_consistency(spec)?,
    };
    Ok(RunOutput {
        rendered: emit(&report, format),
        verdict_ok,
    })
}

fn need<T: Clone>(opt: &Option<T>, what: &str) -> Result<T> {
    opt.clone()
        .ok_or_else(|| Error::Invalid(format!("missing required input: {what}")))
}

fn parse_int_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|_| Error::Invalid(format!("bad integer '{part}'")))
        })
        .collect()
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad index '{part}'")))
        })
        .collect()
}

fn parse_q_list(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(|part| parse_q(part.trim())).collect()
}

fn parse_q_rows(s: &str) -> Result<Vec<Vec<Q>>> {
    s.split(';').map(parse_q_list).collect()
}

/// Weight string: comma-separated entries, optional `;central` suffix,
/// and the shorthand `k=<int>` for a single entry.
fn parse_weights(s: &str) -> Result<(Vec<i64>, Option<i64>)> {
    let (body, central) = match s.split_once(';') {
        Some((b, c)) => {
            let central = c
                .trim()
                .parse::<i64>()
                .map_err(|_| Error::Invalid(format!("bad central coordinate '{c}'")))?;
            (b, Some(central))
        }
        None => (s, None),
    };
    let body = body.trim();
    let entries = match body.strip_prefix("k=") {
        Some(rest) => vec![rest
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Invalid(format!("bad weight '{rest}'")))?],
        None => parse_int_list(body)?,
    };
    Ok((entries, central))
}

fn format_vec_q(xs: &[Q]) -> Vec<String> {
    xs.iter().map(|&x| format_q(x)).collect()
}

fn join_i64(xs: &[i64]) -> String {
    xs.iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn run_normalize(spec: &JobSpec) -> Result<(Report, bool)> {
    if let Some(name) = &spec.preset {
        let (entries, _central) = parse_weights(&need(&spec.kappa, "--kappa")?)?;
        let preset = match name.as_str() {
            "modular-curve" => {
                if entries.len() != 1 {
                    return Err(Error::Invalid("modular-curve takes one weight".into()));
                }
                if spec.g.is_some_and(|g| g != 1) {
                    return Err(Error::Invalid("modular-curve has genus 1".into()));
                }
                Preset::ModularCurve { weight: entries[0] }
            }
            "hilbert" => Preset::Hilbert {
                weights: entries,
                central: need(&spec.central, "--central")?,
            },
            "siegel" => Preset::Siegel { weights: entries },
            "gu21" => {
                if entries.len() != 2 {
                    return Err(Error::Invalid("gu21 takes two weights".into()));
                }
                Preset::Gu21 {
                    k1: entries[0],
                    k2: entries[1],
                }
            }
            other => {
                return Err(Error::Invalid(format!(
                    "unknown preset '{other}' (modular-curve, hilbert, siegel, gu21)"
                )))
            }
        };
        let table = generator_table(&preset)?;
        let rows = table
            .rows
            .into_iter()
            .map(|r| RowOut {
                name: r.name,
                coweight: r.coweight,
                exponent: r.exponent,
                naive: r.naive,
                invertible: r.invertible,
            })
            .collect();
        let report = NormalizeReport {
            table: Some(TableOut {
                label: table.label,
                rows,
            }),
            exponents: None,
        };
        return Ok((Report::Normalize(report), true));
    }

    let family = need(&spec.family, "--family")?;
    let datum = build_datum(&family, spec)?;
    let (kents, kc) = parse_weights(&need(&spec.kappa, "--kappa")?)?;
    let kappa = datum.coords_int(&kents, kc)?;
    let (lents, lc) = parse_weights(&need(&spec.lambda, "--lambda")?)?;
    let lambda = datum.coords_int(&lents, lc)?;
    let integral = integral_exponent(&datum, &lambda, &kappa)?;
    let t_basis = t_basis_exponent(&datum, &lambda, &kappa)?;
    let report = NormalizeReport {
        table: None,
        exponents: Some(ExponentOut {
            family,
            kappa: kappa.to_string(),
            lambda: lambda.to_string(),
            integral: format_q(integral),
            t_basis: format_q(t_basis),
        }),
    };
    Ok((Report::Normalize(report), true))
}

fn build_datum(family: &str, spec: &JobSpec) -> Result<RootDatum> {
    match family {
        "gl" => RootDatum::gl(need(&spec.n, "--n")?),
        "gsp" => RootDatum::gsp(need(&spec.g, "--g")?),
        "unitary" => RootDatum::unitary_product(need(&spec.n, "--n")?, 1),
        other => Err(Error::Invalid(format!(
            "unknown family '{other}' (gl, gsp, unitary)"
        ))),
    }
}

fn run_strata(spec: &JobSpec) -> Result<(Report, bool)> {
    let family = need(&spec.family, "--family")?;
    let records = match family.as_str() {
        "gsp" | "symplectic" => strata_symplectic(need(&spec.g, "--g")?)?,
        "linear" | "gl" | "unitary" => strata_linear(
            need(&spec.n, "--n")?,
            need(&spec.p, "--p")?,
            need(&spec.q, "--q")?,
            need(&spec.j, "--j")?,
        )?,
        other => {
            return Err(Error::Invalid(format!(
                "unknown family '{other}' (gsp, linear)"
            )))
        }
    };
    let components = records
        .into_iter()
        .map(|r| ComponentOut {
            parameter: r.parameter,
            index_set: r.index_set,
            diagonal: r.diagonal,
            dimension: r.dimension,
            dp1: r.dp1,
        })
        .collect();
    Ok((
        Report::Strata(StrataReport { family, components }),
        true,
    ))
}

fn run_admissible(spec: &JobSpec) -> Result<(Report, bool)> {
    let family_name = need(&spec.family, "--family")?;
    let family = match family_name.as_str() {
        "gl" => AffineFamily::Linear {
            n: need(&spec.n, "--n")?,
        },
        "gsp" => AffineFamily::Symplectic {
            g: need(&spec.g, "--g")?,
        },
        other => {
            return Err(Error::Invalid(format!(
                "unknown family '{other}' (gl, gsp)"
            )))
        }
    };
    let mu = parse_int_list(&need(&spec.mu, "--mu")?)?;
    let level: BTreeSet<usize> = match &spec.level {
        Some(s) => parse_usize_list(s)?.into_iter().collect(),
        None => BTreeSet::from([0]),
    };
    let strata = admissible_set(family, &level, &mu)?;
    let out = strata
        .iter()
        .map(|s| {
            let (translation, _finite) = s.representative.translation_and_finite();
            AdmStratumOut {
                window: s.representative.window().to_vec(),
                translation,
                dimension: s.dimension,
                points: spec.q0.map(|q0| point_count(family, &level, &s.representative, q0)),
            }
        })
        .collect();
    Ok((
        Report::Admissible(AdmissibleReport {
            family: family_name,
            level: level.into_iter().collect(),
            mu,
            strata: out,
        }),
        true,
    ))
}

fn run_satake(spec: &JobSpec) -> Result<(Report, bool)> {
    let lambda = parse_int_list(&need(&spec.lambda, "--lambda")?)?;
    let n = spec.n.unwrap_or(lambda.len());
    let change = satake_basis_change(n, &lambda, &INTERPOLATION_PRIMES)?;
    let polys = satake_count_polynomials(n, &lambda)?;
    let to_map = |m: &BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, Vec<i64>>>| {
        m.iter()
            .map(|(k, row)| {
                (
                    join_i64(k),
                    row.iter().map(|(k2, v)| (join_i64(k2), v.clone())).collect(),
                )
            })
            .collect()
    };
    let report = SatakeReport {
        n,
        lambda,
        forward: to_map(&change.forward),
        inverse: to_map(&change.inverse),
        coset_polynomials: polys
            .iter()
            .map(|(k, v)| (join_i64(k), v.clone()))
            .collect(),
    };
    Ok((Report::Satake(report), true))
}

fn run_newton_check(spec: &JobSpec) -> Result<(Report, bool)> {
    let blocks = parse_q_rows(&need(&spec.valuations, "--valuations")?)?;
    let datum = match &spec.degrees {
        Some(s) => {
            let degrees = parse_usize_list(s)?;
            if degrees.len() != blocks.len() {
                return Err(Error::Invalid(
                    "one degree per valuation block is required".into(),
                ));
            }
            let shapes: Vec<(usize, usize)> = blocks
                .iter()
                .zip(&degrees)
                .map(|(b, &d)| (b.len(), d))
                .collect();
            RootDatum::res_product(&shapes)?
        }
        None => {
            if blocks.len() != 1 {
                return Err(Error::Invalid(
                    "several valuation blocks need --degrees".into(),
                ));
            }
            RootDatum::gl(blocks[0].len())?
        }
    };
    let class = SatakeClass::new(datum.clone(), blocks)?;
    let newton = newton_map(&class);
    let target = match &spec.nu {
        Some(s) => {
            let rows = parse_q_rows(s)?;
            NewtonPoint {
                datum: datum.clone(),
                point: datum.coords(rows, None)?,
            }
        }
        None => newton.clone(),
    };
    let verdict = lafforgue_check(&class, &target, spec.height_bound.unwrap_or(3))?;
    let pass = verdict.direct && verdict.trace_side;
    let report = NewtonCheckReport {
        newton_point: newton
            .point
            .blocks
            .iter()
            .map(|b| format_vec_q(b).join(","))
            .collect(),
        target: target
            .point
            .blocks
            .iter()
            .map(|b| format_vec_q(b).join(","))
            .collect(),
        direct: verdict.direct,
        trace_side: verdict.trace_side,
        witness: verdict.witness,
        indeterminate_count: verdict.indeterminate.len(),
        pass,
    };
    Ok((Report::NewtonCheck(report), pass))
}

fn run_katz_mazur(spec: &JobSpec) -> Result<(Report, bool)> {
    let valuations = parse_q_list(&need(&spec.valuations, "--valuations")?)?;
    let infchar = parse_q_rows(&need(&spec.infchar, "--infchar")?)?;
    let report = katz_mazur_check(&valuations, &infchar)?;
    let rows = report
        .rows
        .iter()
        .enumerate()
        .map(|(i, (newton, hodge, ok))| KmRow {
            k: i + 1,
            newton: format_q(*newton),
            hodge: format_q(*hodge),
            ok: *ok,
        })
        .collect();
    let out = KatzMazurOut {
        rows,
        equality_at_end: report.equality_at_end,
        pass: report.pass,
        first_failure: report.first_failure.map(|(k, slack)| KmFailure {
            k,
            slack: format_q(slack),
        }),
    };
    let pass = report.pass;
    Ok((Report::KatzMazur(out), pass))
}

// ---------------------------------------------------------------------
// Consistency suite.

fn run_consistency(spec: &JobSpec) -> Result<(Report, bool)> {
    let budget = spec.budget.unwrap_or(1).clamp(1, 4) as usize;
    let seed = spec.seed.unwrap_or(0);
    let mut checks = Vec::new();
    checks.push(check_symplectic_pairing(budget)?);
    checks.push(check_normalized_symplectic(budget)?);
    checks.push(check_normalized_linear(budget)?);
    checks.push(check_dp1_oracle(budget)?);
    checks.push(check_census()?);
    checks.push(check_satake_triangularity()?);
    checks.push(check_newton_sweep(budget, seed)?);
    let pass = checks.iter().all(|c| c.pass);
    Ok((Report::Consistency(ConsistencyReport { checks, pass }), pass))
}

fn symplectic_weight_grid(g: usize, span: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for hi in -span..=span {
        for gap in 0..=2i64 {
            let w: Vec<i64> = (0..g).map(|i| hi - gap * i as i64).collect();
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

fn check_symplectic_pairing(budget: usize) -> Result<CheckOut> {
    let mut tested = 0usize;
    let mut failures = 0usize;
    for g in 1..=(1 + budget).min(3) {
        let datum = RootDatum::gsp(g)?;
        for w in symplectic_weight_grid(g, 3) {
            let total: i64 = w.iter().sum();
            for extra in [0i64, 2, -4] {
                let central = -total + extra;
                if (total + central).rem_euclid(2) != 0 {
                    continue;
                }
                let closed = symplectic_exponent(std::slice::from_ref(&w), central)?;
                let kappa = datum.coords_int(&w, Some(central))?;
                let lambda_t = datum.coords(
                    vec![vec![crate::arith::q(-1, 2); g]],
                    Some(crate::arith::q(-1, 2)),
                )?;
                let paired = t_basis_exponent(&datum, &lambda_t, &kappa)?;
                tested += 1;
                if paired != crate::arith::q_int(closed) {
                    failures += 1;
                }
            }
        }
    }
    Ok(CheckOut {
        name: "symplectic-closed-form-vs-pairing".into(),
        pass: failures == 0,
        detail: format!("{tested} weight vectors, {failures} mismatches"),
    })
}

fn check_normalized_symplectic(budget: usize) -> Result<CheckOut> {
    let mut tested = 0usize;
    let mut failures = 0usize;
    for g in 1..=(1 + budget).min(3) {
        for w in symplectic_weight_grid(g, 4) {
            let central = -w.iter().sum::<i64>();
            let lhs = normalized_exponent_symplectic(&w)?;
            let rhs = symplectic_exponent(std::slice::from_ref(&w), central)?;
            tested += 1;
            if lhs != rhs {
                failures += 1;
            }
        }
    }
    Ok(CheckOut {
        name: "normalized-exponent-symplectic".into(),
        pass: failures == 0,
        detail: format!("{tested} weight vectors, {failures} mismatches"),
    })
}

fn check_normalized_linear(budget: usize) -> Result<CheckOut> {
    let mut tested = 0usize;
    let mut failures = 0usize;
    let n_max = (2 + budget).min(4);
    for n in 2..=n_max {
        for p in 1..n {
            let q = n - p;
            for hi in -2i64..=2 {
                let a: Vec<i64> = (0..p).map(|i| hi - i as i64).collect();
                let b: Vec<i64> = (0..q).map(|i| 1 - hi - 2 * i as i64).collect();
                let w = SignatureWeight::new(a.clone(), b.clone())?;
                for j in 1..n {
                    let lhs = normalized_exponent_linear(&a, &b, j)?;
                    let rhs = unitary_exponent(std::slice::from_ref(&w), &[], j)?;
                    tested += 1;
                    if lhs != rhs {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(CheckOut {
        name: "normalized-exponent-linear".into(),
        pass: failures == 0,
        detail: format!("{tested} weight vectors, {failures} mismatches"),
    })
}

fn check_dp1_oracle(budget: usize) -> Result<CheckOut> {
    let mut tested = 0usize;
    let mut failures = 0usize;
    for g in 1..=(1 + budget).min(3) {
        for s in 0..=g {
            tested += 1;
            if lie_quotient_oracle_symplectic(g, s)? != dp1_kernel_rank_symplectic(g, s) {
                failures += 1;
            }
        }
    }
    for (n, p, q) in [(2usize, 1usize, 1usize), (3, 2, 1), (4, 2, 2)] {
        for j in 1..n {
            for rec in strata_linear(n, p, q, j)? {
                tested += 1;
                if lie_quotient_oracle_linear(n, p, q, j, rec.parameter)?
                    != dp1_kernel_rank_linear(p, j, rec.parameter)
                {
                    failures += 1;
                }
            }
        }
    }
    Ok(CheckOut {
        name: "dp1-kernel-vs-lie-oracle".into(),
        pass: failures == 0,
        detail: format!("{tested} components, {failures} mismatches"),
    })
}

fn check_census() -> Result<CheckOut> {
    let mut pass = true;
    let mut details = Vec::new();
    for (q0, expected) in [(2u64, vec![1u64, 2, 2]), (3, vec![1, 3, 3])] {
        let census = finite_field_census(
            &CensusFamily::Linear {
                n: 2,
                p: 1,
                q: 1,
                j: 1,
            },
            q0,
        )?;
        let mut counts: Vec<u64> = census.values().copied().collect();
        counts.sort_unstable();
        if counts != expected || census.len() != 3 {
            pass = false;
        }
        details.push(format!("F{q0}: {} signatures", census.len()));
    }
    Ok(CheckOut {
        name: "finite-field-census".into(),
        pass,
        detail: details.join("; "),
    })
}

fn check_satake_triangularity() -> Result<CheckOut> {
    let mut tested = 0usize;
    let mut failures = 0usize;
    for (n, lambda) in [(2usize, vec![1i64, 0]), (2, vec![2, 0]), (3, vec![1, 0, 0])] {
        let change = satake_basis_change(n, &lambda, &INTERPOLATION_PRIMES)?;
        for nu in &change.weights {
            let row = &change.forward[nu];
            tested += 1;
            if row.get(nu) != Some(&vec![1]) {
                failures += 1;
            }
        }
    }
    Ok(CheckOut {
        name: "satake-unitriangularity".into(),
        pass: failures == 0,
        detail: format!("{tested} diagonal entries, {failures} mismatches"),
    })
}

fn check_newton_sweep(budget: usize, seed: u64) -> Result<CheckOut> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let target = 25 * budget;
    let mut tested = 0usize;
    let mut disagreements = 0usize;
    let mut draws = 0usize;
    while tested < target && draws < 40 * target {
        draws += 1;
        let n = if rng.gen_bool(0.5) { 2 } else { 3 };
        let datum = RootDatum::gl(n)?;
        let vals: Vec<Q> = (0..n)
            .map(|_| crate::arith::q_int(rng.gen_range(-2i64..=2)))
            .collect();
        let nu_vals: Vec<Q> = (0..n)
            .map(|_| crate::arith::q_int(rng.gen_range(-2i64..=2)))
            .collect();
        let class = SatakeClass::new(datum.clone(), vec![vals])?;
        let nu_class = SatakeClass::new(datum.clone(), vec![nu_vals])?;
        let target_point = newton_map(&nu_class);
        let verdict = lafforgue_check(&class, &target_point, 3)?;
        if !verdict.indeterminate.is_empty() {
            continue;
        }
        tested += 1;
        if verdict.direct != verdict.trace_side {
            disagreements += 1;
        }
    }
    Ok(CheckOut {
        name: "newton-direct-vs-sweep".into(),
        pass: disagreements == 0 && tested == target,
        detail: format!("{tested} tie-free classes, {disagreements} disagreements"),
    })
}

// ---------------------------------------------------------------------
// Emission.

pub fn emit(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
            out
        }
        OutputFormat::Tsv => emit_tsv(report),
    }
}

fn emit_tsv(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Normalize(r) => {
            if let Some(table) = &r.table {
                writeln!(out, "name\tcoweight\texponent\tnaive\tinvertible").unwrap();
                for row in &table.rows {
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}",
                        row.name, row.coweight, row.exponent, row.naive, row.invertible
                    )
                    .unwrap();
                }
            }
            if let Some(e) = &r.exponents {
                writeln!(out, "family\t{}", e.family).unwrap();
                writeln!(out, "kappa\t{}", e.kappa).unwrap();
                writeln!(out, "lambda\t{}", e.lambda).unwrap();
                writeln!(out, "integral\t{}", e.integral).unwrap();
                writeln!(out, "t_basis\t{}", e.t_basis).unwrap();
            }
        }
        Report::Strata(r) => {
            writeln!(out, "parameter\tindex_set\tdiagonal\tdimension\tdp1").unwrap();
            for c in &r.components {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    c.parameter,
                    c.index_set
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(","),
                    join_i64(&c.diagonal),
                    c.dimension,
                    c.dp1
                )
                .unwrap();
            }
        }
        Report::Admissible(r) => {
            writeln!(out, "window\ttranslation\tdimension\tpoints").unwrap();
            for s in &r.strata {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    join_i64(&s.window),
                    join_i64(&s.translation),
                    s.dimension,
                    s.points.map_or(String::from("-"), |p| p.to_string())
                )
                .unwrap();
            }
        }
        Report::Satake(r) => {
            for (nu, row) in &r.forward {
                for (mu, coeff) in row {
                    writeln!(out, "forward\t{nu}\t{mu}\t{}", join_i64(coeff)).unwrap();
                }
            }
            for (nu, row) in &r.inverse {
                for (mu, coeff) in row {
                    writeln!(out, "inverse\t{nu}\t{mu}\t{}", join_i64(coeff)).unwrap();
                }
            }
            for (mu, poly) in &r.coset_polynomials {
                writeln!(out, "polynomial\t{mu}\t{}", join_i64(poly)).unwrap();
            }
        }
        Report::NewtonCheck(r) => {
            writeln!(out, "newton_point\t{}", r.newton_point.join(" | ")).unwrap();
            writeln!(out, "target\t{}", r.target.join(" | ")).unwrap();
            writeln!(out, "direct\t{}", r.direct).unwrap();
            writeln!(out, "trace_side\t{}", r.trace_side).unwrap();
            if let Some(w) = &r.witness {
                let parts: Vec<String> = w.iter().map(|b| join_i64(b)).collect();
                writeln!(out, "witness\t{}", parts.join(" | ")).unwrap();
            }
            writeln!(out, "indeterminate\t{}", r.indeterminate_count).unwrap();
            writeln!(out, "pass\t{}", r.pass).unwrap();
        }
        Report::KatzMazur(r) => {
            writeln!(out, "k\tnewton\thodge\tok").unwrap();
            for row in &r.rows {
                writeln!(out, "{}\t{}\t{}\t{}", row.k, row.newton, row.hodge, row.ok).unwrap();
            }
            writeln!(out, "equality_at_end\t{}", r.equality_at_end).unwrap();
            writeln!(out, "pass\t{}", r.pass).unwrap();
        }
        Report::Consistency(r) => {
            writeln!(out, "check\tpass\tdetail").unwrap();
            for c in &r.checks {
                writeln!(out, "{}\t{}\t{}", c.name, c.pass, c.detail).unwrap();
            }
            writeln!(out, "pass\t{}", r.pass).unwrap();
        }
    }
    out
}

// ---------------------------------------------------------------------
// Command line surface.

#[derive(Parser, Debug)]
#[command(
    name = "satake",
    version,
    about = "Exact spherical Hecke computations: normalization tables, local-model strata, \
             admissible sets, Satake tables, Newton and prefix-polygon checks"
)]
struct Cli {
    /// JSON job document used instead of a subcommand.
    #[arg(long, value_name = "FILE", global = true)]
    spec: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<CliCommand>,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Normalization exponent tables for the preset settings, or
    /// one-off exponents for explicit weights.
    Normalize(NormalizeArgs),
    /// Components of the two-lattice local models.
    Strata(StrataArgs),
    /// Admissible sets at parahoric level.
    Admissible(AdmissibleArgs),
    /// Coset tables and basis-change matrices.
    Satake(SatakeArgs),
    /// Newton dominance: direct comparison against the sweep verdict.
    NewtonCheck(NewtonCheckArgs),
    /// Prefix-sum polygon verifier.
    KatzMazur(KatzMazurArgs),
    /// Cross-module identity suite.
    Consistency(ConsistencyArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Cap on enumeration sizes where a command samples or sweeps.
    #[arg(long)]
    budget: Option<u64>,
    /// Seed for randomized sampling.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Weight entries: "3,2", "k=2", or "3,2;-5" with a central
    /// coordinate.
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// Central coordinate for the hilbert preset.
    #[arg(long, allow_hyphen_values = true)]
    central: Option<i64>,
    /// Preset table: modular-curve, hilbert, siegel, or gu21.
    #[arg(long)]
    preset: Option<String>,
    /// Coweight for one-off exponents, same syntax as --kappa.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct StrataArgs {
    /// gsp or linear.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct AdmissibleArgs {
    /// gl or gsp.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Coweight window vector, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Parahoric level: comma-separated simple indices (default "0").
    #[arg(long)]
    level: Option<String>,
    /// Field size for point counts.
    #[arg(long)]
    q0: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct SatakeArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Dominant exponent vector, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct NewtonCheckArgs {
    /// Eigenvalue valuations: blocks split by ';', entries by ','.
    #[arg(long, allow_hyphen_values = true)]
    valuations: Option<String>,
    /// Residue degrees, one per block, for multi-place inputs.
    #[arg(long)]
    degrees: Option<String>,
    /// Target point to compare against (defaults to the class's own).
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// Sweep cap on the coordinate sums of test coweights.
    #[arg(long, allow_hyphen_values = true)]
    height_bound: Option<i64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct KatzMazurArgs {
    /// Frobenius valuations in increasing order, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    valuations: Option<String>,
    /// Weight rows: rows split by ';', entries by ','.
    #[arg(long, allow_hyphen_values = true)]
    infchar: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct ConsistencyArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn spec_from_cli(command: CliCommand) -> JobSpec {
    match command {
        CliCommand::Normalize(a) => {
            let mut s = JobSpec::new(CommandName::Normalize);
            s.family = a.family;
            s.g = a.g;
            s.n = a.n;
            s.kappa = a.kappa;
            s.central = a.central;
            s.preset = a.preset;
            s.lambda = a.lambda;
            apply_common(&mut s, a.common);
            s
        }
        CliCommand::Strata(a) => {
            let mut s = JobSpec::new(CommandName::Strata);
            s.family = a.family;
            s.g = a.g;
            s.n = a.n;
            s.p = a.p;
            s.q = a.q;
            s.j = a.j;
            apply_common(&mut s, a.common);
            s
        }
        CliCommand::Admissible(a) => {
            let mut s = JobSpec::new(CommandName::Admissible);
            s.family = a.family;
            s.g = a.g;
            s.n = a.n;
            s.mu = a.mu;
            s.level = a.level;
            s.q0 = a.q0;
            apply_common(&mut s, a.common);
            s
        }
        CliCommand::Satake(a) => {
            let mut s = JobSpec::new(CommandName::Satake);
            s.n = a.n;
            s.lambda = a.lambda;
            apply_common(&mut s, a.common);
            s
        }
        CliCommand::NewtonCheck(a) => {
            let mut s = JobSpec::new(CommandName::NewtonCheck);
            s.valuations = a.valuations;
            s.degrees = a.degrees;
            s.nu = a.nu;
            s.height_bound = a.height_bound;
            apply_common(&mut s, a.common);
            s
        }
        CliCommand::KatzMazur(a) => {
            let mut s = JobSpec::new(CommandName::KatzMazur);
            s.valuations = a.valuations;
            s.infchar = a.infchar;
            apply_common(&mut s, a.common);
            s
        }
        CliCommand::Consistency(a) => {
            let mut s = JobSpec::new(CommandName::Consistency);
            apply_common(&mut s, a.common);
            s
        }
    }
}

fn apply_common(spec: &mut JobSpec, common: CommonArgs) {
    spec.format = common.format;
    spec.budget = common.budget;
    spec.seed = common.seed;
}

/// Full program entry: parses arguments, runs the job, prints output,
/// and returns the process exit code.
pub fn main_entry<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 2;
        }
    };
    let spec = match (cli.spec, cli.command) {
        (Some(path), None) => match load_spec(&path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error[{}]: {e}", error_code(&e));
                return 2;
            }
        },
        (None, Some(cmd)) => spec_from_cli(cmd),
        (Some(_), Some(_)) => {
            eprintln!("error[E_INVALID]: give either --spec or a subcommand, not both");
            return 2;
        }
        (None, None) => {
            eprintln!("error[E_INVALID]: a subcommand or --spec is required (see --help)");
            return 2;
        }
    };
    match run(&spec) {
        Ok(out) => {
            print!("{}", out.rendered);
            u8::from(!out.verdict_ok)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", error_code(&e));
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_of(cmd: CommandName) -> JobSpec {
        JobSpec::new(cmd)
    }

    #[test]
    fn spec_roundtrip_is_stable() {
        let mut spec = spec_of(CommandName::Normalize);
        spec.family = Some("gsp".into());
        spec.g = Some(1);
        spec.kappa = Some("k=2".into());
        spec.preset = Some("modular-curve".into());
        let text = emit_spec(&spec);
        let parsed = parse_spec(&text).unwrap();
        assert_eq!(parsed, spec);
        assert_eq!(emit_spec(&parsed), text);
    }

    #[test]
    fn unknown_field_is_rejected_by_name() {
        let err = parse_spec(r#"{"command": "strata", "genus": 2}"#).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("genus"), "message was: {message}");
    }

    #[test]
    fn minimal_documents_parse_for_every_command() {
        for name in [
            "normalize",
            "strata",
            "admissible",
            "satake",
            "newton-check",
            "katz-mazur",
            "consistency",
        ] {
            let text = format!(r#"{{"command": "{name}"}}"#);
            parse_spec(&text).unwrap();
        }
    }

    #[test]
    fn modular_curve_table_contains_the_weight_two_exponent() {
        let mut spec = spec_of(CommandName::Normalize);
        spec.family = Some("gsp".into());
        spec.g = Some(1);
        spec.kappa = Some("k=2".into());
        spec.preset = Some("modular-curve".into());
        let out = run(&spec).unwrap();
        assert!(out.verdict_ok);
        assert!(out.rendered.contains("\"name\": \"T_p\""));
        assert!(out.rendered.contains("\"exponent\": -1"));
        assert!(out.rendered.contains("\"exponent\": -2"));
    }

    #[test]
    fn strata_example_has_two_components() {
        let mut spec = spec_of(CommandName::Strata);
        spec.family = Some("linear".into());
        spec.n = Some(3);
        spec.p = Some(2);
        spec.q = Some(1);
        spec.j = Some(1);
        let out = run(&spec).unwrap();
        let value: serde_json::Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(value["components"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn katz_mazur_zero_instance_passes() {
        let mut spec = spec_of(CommandName::KatzMazur);
        spec.valuations = Some("0,0".into());
        spec.infchar = Some("0,0".into());
        let out = run(&spec).unwrap();
        assert!(out.verdict_ok);
        let value: serde_json::Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(value["pass"], serde_json::Value::Bool(true));
    }

    #[test]
    fn katz_mazur_violation_fails_with_location() {
        let mut spec = spec_of(CommandName::KatzMazur);
        spec.valuations = Some("-1,0".into());
        spec.infchar = Some("0,0".into());
        let out = run(&spec).unwrap();
        assert!(!out.verdict_ok);
        let value: serde_json::Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(value["first_failure"]["k"], serde_json::json!(1));
    }

    #[test]
    fn newton_check_verdicts_drive_the_exit_flag() {
        let mut spec = spec_of(CommandName::NewtonCheck);
        spec.valuations = Some("0,1".into());
        spec.nu = Some("1/2,1/2".into());
        let out = run(&spec).unwrap();
        assert!(!out.verdict_ok);

        spec.nu = Some("1,0".into());
        let out = run(&spec).unwrap();
        assert!(out.verdict_ok);

        spec.nu = None;
        let out = run(&spec).unwrap();
        assert!(out.verdict_ok);
    }

    #[test]
    fn satake_report_is_unitriangular_on_the_diagonal() {
        let mut spec = spec_of(CommandName::Satake);
        spec.lambda = Some("1,0".into());
        let out = run(&spec).unwrap();
        let value: serde_json::Value = serde_json::from_str(&out.rendered).unwrap();
        assert_eq!(value["forward"]["1,0"]["1,0"], serde_json::json!([1]));
    }

    #[test]
    fn admissible_report_lists_three_strata_for_the_modular_curve() {
        let mut spec = spec_of(CommandName::Admissible);
        spec.family = Some("gl".into());
        spec.n = Some(2);
        spec.mu = Some("1,0".into());
        spec.level = Some("0,1".into());
        spec.q0 = Some(2);
        let out = run(&spec).unwrap();
        let value: serde_json::Value = serde_json::from_str(&out.rendered).unwrap();
        let strata = value["strata"].as_array().unwrap();
        assert_eq!(strata.len(), 3);
        let mut points: Vec<u64> = strata
            .iter()
            .map(|s| s["points"].as_u64().unwrap())
            .collect();
        points.sort_unstable();
        assert_eq!(points, vec![1, 2, 2]);
    }

    #[test]
    fn tsv_output_is_deterministic() {
        let mut spec = spec_of(CommandName::Strata);
        spec.family = Some("gsp".into());
        spec.g = Some(2);
        spec.format = Some(OutputFormat::Tsv);
        let a = run(&spec).unwrap().rendered;
        let b = run(&spec).unwrap().rendered;
        assert_eq!(a, b);
        assert!(a.starts_with("parameter\t"));
        assert_eq!(a.lines().count(), 4);
    }

    #[test]
    fn input_errors_surface_module_codes() {
        let mut spec = spec_of(CommandName::Strata);
        spec.family = Some("linear".into());
        spec.n = Some(3);
        spec.p = Some(2);
        spec.q = Some(1);
        spec.j = Some(5);
        let err = run(&spec).unwrap_err();
        assert_eq!(error_code(&err), "E_BAD_RANK");

        let mut spec = spec_of(CommandName::Normalize);
        spec.preset = Some("unknown-preset".into());
        spec.kappa = Some("k=2".into());
        let err = run(&spec).unwrap_err();
        assert_eq!(error_code(&err), "E_INVALID");
    }

    #[test]
    fn consistency_suite_passes_at_minimal_budget() {
        let mut spec = spec_of(CommandName::Consistency);
        spec.budget = Some(1);
        spec.seed = Some(7);
        let out = run(&spec).unwrap();
        assert!(out.verdict_ok, "output: {}", out.rendered);
    }

    #[test]
    fn main_entry_exit_codes() {
        assert_eq!(
            main_entry(["satake", "katz-mazur", "--valuations", "0,0", "--infchar", "0,0"]),
            0
        );
        assert_eq!(
            main_entry([
                "satake",
                "katz-mazur",
                "--valuations",
                "-1,0",
                "--infchar",
                "0,0"
            ]),
            1
        );
        assert_eq!(main_entry(["satake", "strata", "--family", "nope"]), 2);
        assert_eq!(main_entry(["satake"]), 2);
        assert_eq!(main_entry(["satake", "--help"]), 0);
    }
}
