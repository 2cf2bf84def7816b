//! Spectra along the circle G = C cos φ, J = C sin φ and their output.
//!
//! φ ∈ (−π/2, 0) is the antiferromagnetic side, (0, π/2) the ferromagnetic
//! side, and φ > π/2 gives G < 0.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Chain;
use crate::spectral::{spectrum_of, Level, SpectralError, Tolerances};

pub const DEFAULT_POINTS: usize = 601;
pub const DEFAULT_PHI_MIN: f64 = -std::f64::consts::FRAC_PI_2;
pub const DEFAULT_PHI_MAX: f64 = std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("sweep row at phi = {phi} failed: {source}")]
    Row {
        phi: f64,
        #[source]
        source: SpectralError,
    },
    #[error("cannot emit an empty table")]
    EmptyTable,
    #[error("row {0} has no levels")]
    EmptyRow(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    /// Circle radius C.
    pub c: f64,
    pub n_points: usize,
    pub phi_min: f64,
    pub phi_max: f64,
    pub chain: Chain,
}

impl SweepSpec {
    /// The default range (−π/2, π) with 601 points on a circle of radius `c`.
    pub fn new(chain: Chain, c: f64) -> Self {
        SweepSpec {
            c,
            n_points: DEFAULT_POINTS,
            phi_min: DEFAULT_PHI_MIN,
            phi_max: DEFAULT_PHI_MAX,
            chain,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SweepError::Invalid(format!(
                "radius must be positive, got {}",
                self.c
            )));
        }
        if self.n_points < 2 {
            return Err(SweepError::Invalid(format!(
                "need at least 2 points, got {}",
                self.n_points
            )));
        }
        if !self.phi_min.is_finite() || !self.phi_max.is_finite() || self.phi_min >= self.phi_max {
            return Err(SweepError::Invalid(format!(
                "need phi_min < phi_max, got {} and {}",
                self.phi_min, self.phi_max
            )));
        }
        self.chain
            .validate()
            .map_err(|e| SweepError::Invalid(e.to_string()))
    }

    /// Uniform grid including both end points.
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.phi_max - self.phi_min) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i == self.n_points - 1 {
                    self.phi_max
                } else {
                    self.phi_min + i as f64 * step
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    pub levels: Vec<Level>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// (G, J) on the circle of radius `c` at angle `phi`.
pub fn polar_couplings(c: f64, phi: f64) -> (f64, f64) {
    (c * phi.cos(), c * phi.sin())
}

/// Spectra at explicit angles. Rows are computed in parallel and returned in
/// input order.
pub fn sweep_angles(
    chain: &Chain,
    c: f64,
    phis: &[f64],
    tols: &Tolerances,
) -> Result<SweepTable, SweepError> {
    chain
        .validate()
        .map_err(|e| SweepError::Invalid(e.to_string()))?;
    let rows = phis
        .par_iter()
        .map(|&phi| {
            let (g, j) = polar_couplings(c, phi);
            spectrum_of(&chain.with_couplings(g, j), tols)
                .map(|s| SweepRow {
                    phi,
                    levels: s.levels,
                })
                .map_err(|source| SweepError::Row { phi, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepTable { rows })
}

pub fn sweep_phi(spec: &SweepSpec, tols: &Tolerances) -> Result<SweepTable, SweepError> {
    spec.validate()?;
    sweep_angles(&spec.chain, spec.c, &spec.grid(), tols)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Gnuplot,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "gnuplot" => Ok(Format::Gnuplot),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

/// A real with 17 significant digits, in the style of C's `%.17g`:
/// trailing zeros are dropped, and exponent notation is used when the
/// decimal exponent is below −4 or at least 17.
pub fn format_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (PRECISION - 1 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn check_nonempty(table: &SweepTable) -> Result<(), SweepError> {
    if table.rows.is_empty() {
        return Err(SweepError::EmptyTable);
    }
    if let Some(i) = table.rows.iter().position(|r| r.levels.is_empty()) {
        return Err(SweepError::EmptyRow(i));
    }
    Ok(())
}

pub fn emit(table: &SweepTable, format: Format) -> Result<String, SweepError> {
    check_nonempty(table)?;
    match format {
        Format::Csv => Ok(emit_csv(table)),
        Format::Json => Ok(serde_json::to_string_pretty(table)? + "\n"),
        Format::Gnuplot => Ok(emit_gnuplot(table)),
    }
}

fn emit_csv(table: &SweepTable) -> String {
    let mut out = String::from("phi,level_index,energy,multiplicity\n");
    for row in &table.rows {
        let phi = format_g17(row.phi);
        for (i, lvl) in row.levels.iter().enumerate() {
            let _ = writeln!(
                out,
                "{phi},{i},{},{}",
                format_g17(lvl.energy),
                lvl.multiplicity
            );
        }
    }
    out
}

fn emit_gnuplot(table: &SweepTable) -> String {
    let max_levels = table.rows.iter().map(|r| r.levels.len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str("# energy levels versus phi; one data index per level index\n");
    out.push_str("$levels << EOD\n");
    for idx in 0..max_levels {
        if idx > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# level_index {idx}");
        for row in &table.rows {
            if let Some(lvl) = row.levels.get(idx) {
                let _ = writeln!(
                    out,
                    "{} {} {}",
                    format_g17(row.phi),
                    format_g17(lvl.energy),
                    lvl.multiplicity
                );
            }
        }
    }
    out.push_str("EOD\n");
    out.push_str("set xlabel 'phi (rad)'\n");
    out.push_str("set ylabel 'E'\n");
    out.push_str("set key off\n");
    let _ = writeln!(
        out,
        "plot for [i=0:{}] $levels index i using 1:2 with lines",
        max_levels.saturating_sub(1)
    );
    out
}
