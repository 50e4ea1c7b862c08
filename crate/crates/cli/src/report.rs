use icdlab::concurrence::{eof_from_concurrence, LogBase};
use icdlab::icd::{classify_region, concurrence_icd, icd_density, lambda_spectrum_icd};
use icdlab::lsd::{decompose, verify_optimality, LSDecomposition, OptimalityVerdict};
use icdlab::oracle::bsa_numeric;
use icdlab::qstate::ppt_min_eigenvalue;
use icdlab::{ICDParams, OracleReport, RegionKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Allowed excess of the oracle over the verified λ.
pub const GAP_TOL: f64 = 1e-9;

pub const CSV_HEADER: &str = "p1,p2,p3,p4,theta,region,concurrence,eof,pt_min_eig,lambda";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub params: ICDParams,
    pub region: RegionKind,
    /// Largest region margin; positive inside an entangled region.
    pub region_slack: f64,
    pub concurrence: f64,
    pub eof: f64,
    pub pt_min_eig: f64,
    /// λ1 ≥ λ2 ≥ λ3 ≥ λ4.
    pub lambda_spectrum: [f64; 4],
    /// Separable weight; 1 for separable points.
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<LSDecomposition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<OptimalityVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ICDParams,
    pub region: RegionKind,
    pub lambda: f64,
    pub verdict: OptimalityVerdict,
    pub oracle: OracleReport,
    /// `λ − λ_numeric`; negative when the search found a larger separable weight.
    pub gap: f64,
    /// `1 − C`, an upper bound on any separable weight.
    pub concurrence_bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: [f64; 4],
    pub theta: f64,
    pub region: RegionKind,
    pub concurrence: f64,
    pub eof: f64,
    pub pt_min_eig: f64,
    pub lambda: f64,
}

pub fn analyze(params: &ICDParams, verify: bool) -> Result<AnalyzeReport, CliError> {
    let label = classify_region(params);
    let concurrence = concurrence_icd(params);
    let decomposition = if label.kind == RegionKind::Separable {
        None
    } else {
        Some(decompose(params)?)
    };
    let verdict = match (&decomposition, verify) {
        (Some(d), true) => Some(verify_optimality(d)),
        _ => None,
    };
    Ok(AnalyzeReport {
        params: *params,
        region: label.kind,
        region_slack: label.slack,
        concurrence,
        eof: eof_from_concurrence(concurrence, LogBase::Two)?,
        pt_min_eig: ppt_min_eigenvalue(&icd_density(params)),
        lambda_spectrum: lambda_spectrum_icd(params).sorted,
        lambda: decomposition.as_ref().map_or(1.0, |d| d.lambda),
        decomposition,
        verdict,
    })
}

/// Verifies `d` and compares it with the numeric oracle.
pub fn verify(d: &LSDecomposition, budget: u64, seed: u64) -> VerifyReport {
    let params = d.params;
    let verdict = verify_optimality(d);
    let oracle = bsa_numeric(&icd_density(&params), budget, seed);
    let gap = d.lambda - oracle.numeric_lambda;
    VerifyReport {
        params,
        region: d.region,
        lambda: d.lambda,
        passed: verdict.overall && gap >= -GAP_TOL,
        verdict,
        oracle,
        gap,
        concurrence_bound: 1.0 - concurrence_icd(&params),
    }
}

pub fn verify_point(params: &ICDParams, budget: u64, seed: u64) -> Result<VerifyReport, CliError> {
    if classify_region(params).kind == RegionKind::Separable {
        return Err(CliError::Precondition(
            "the point is separable; there is nothing to verify".into(),
        ));
    }
    Ok(verify(&decompose(params)?, budget, seed))
}

/// Barycentric points `i / n` with `Σ i_k = n`, in lexicographic order of
/// `(i1, i2, i3, i4)`.
pub fn simplex_grid(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for i1 in 0..=n {
        for i2 in 0..=n - i1 {
            for i3 in 0..=n - i1 - i2 {
                out.push([i1, i2, i3, n - i1 - i2 - i3]);
            }
        }
    }
    out
}

pub fn sweep_row(params: &ICDParams) -> Result<SweepRow, CliError> {
    let r = analyze(params, false)?;
    Ok(SweepRow {
        p: params.p(),
        theta: params.theta(),
        region: r.region,
        concurrence: r.concurrence,
        eof: r.eof,
        pt_min_eig: r.pt_min_eig,
        lambda: r.lambda,
    })
}

/// All rows, θ outermost, evaluated in parallel and returned in grid order.
pub fn sweep(resolution: usize, thetas: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    let grid = simplex_grid(resolution);
    let points: Vec<(usize, f64)> = thetas
        .iter()
        .flat_map(|&t| (0..grid.len()).map(move |k| (k, t)))
        .collect();
    points
        .par_iter()
        .map(|&(k, theta)| {
            let p = grid[k].map(|i| i as f64 / resolution as f64);
            sweep_row(&ICDParams::new(p, theta)?)
        })
        .collect()
}

/// `x` with 9 significant digits, ties to even, `.` as decimal separator.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp >= 0 {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

pub fn csv_line(row: &SweepRow) -> String {
    let mut fields: Vec<String> = row.p.iter().map(|&x| fmt_sig(x)).collect();
    fields.push(fmt_sig(row.theta));
    fields.push(row.region.to_string());
    for x in [row.concurrence, row.eof, row.pt_min_eig, row.lambda] {
        fields.push(fmt_sig(x));
    }
    fields.join(",")
}

pub fn csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_line(r));
        out.push('\n');
    }
    out
}

/// Parses one CSV data line back into a grid point and its reported values.
pub fn parse_csv_line(line: &str) -> Result<SweepRow, CliError> {
    let f: Vec<&str> = line.trim().split(',').collect();
    if f.len() != 10 {
        return Err(CliError::Input(format!(
            "expected 10 fields, got {}",
            f.len()
        )));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| CliError::Input(format!("bad number {s:?}: {e}")))
    };
    let region = match f[5] {
        "Separable" => RegionKind::Separable,
        "Entangled1" => RegionKind::Entangled1,
        "Entangled2" => RegionKind::Entangled2,
        "Entangled3" => RegionKind::Entangled3,
        "Entangled4" => RegionKind::Entangled4,
        other => return Err(CliError::Input(format!("unknown region {other:?}"))),
    };
    Ok(SweepRow {
        p: [num(f[0])?, num(f[1])?, num(f[2])?, num(f[3])?],
        theta: num(f[4])?,
        region,
        concurrence: num(f[6])?,
        eof: num(f[7])?,
        pt_min_eig: num(f[8])?,
        lambda: num(f[9])?,
    })
}
