//! Randomized property scans. Item `i` uses seed `seed + i`; items run in
//! parallel and are reported in index order.

use std::f64::consts::PI;
use std::fmt::Write as _;

use clap::ValueEnum;
use mahler::functional::check_concavity_bound;
use mahler::io::fmt_num;
use mahler::polygon::make_random_symmetric;
use mahler::polytope::{cube_mahler, random_symmetric};
use mahler::sampling::{random_perturbation, random_smooth_support};
use mahler::Result;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    /// 8 <= M <= pi^2 on random symmetric polygons.
    MahlerBounds,
    /// The local concavity bound on random smooth bodies and deformations.
    Concavity,
    /// Relative defect of M(P°) = M(P) on random symmetric polygons.
    Duality,
    /// Kuperberg's lower bound on random symmetric 3-polytopes.
    #[value(name = "kuperberg-3d")]
    Kuperberg3d,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::MahlerBounds => "mahler-bounds",
            Self::Concavity => "concavity",
            Self::Duality => "duality",
            Self::Kuperberg3d => "kuperberg-3d",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Self::Duality => 1e-10,
            _ => 1e-9,
        }
    }

    fn value_name(self) -> &'static str {
        match self {
            Self::MahlerBounds | Self::Kuperberg3d => "mahler",
            Self::Concavity => "margin",
            Self::Duality => "defect",
        }
    }
}

pub struct Row {
    pub index: u64,
    pub seed: u64,
    pub outcome: Result<(f64, bool)>,
}

/// Value and violation flag of one draw.
fn item(kind: ScanKind, seed: u64, grid_n: usize, tol: f64) -> Result<(f64, bool)> {
    match kind {
        ScanKind::MahlerBounds => {
            let m = make_random_symmetric(2 + (seed % 9) as usize, seed)?.mahler();
            Ok((m, m < 8.0 - tol || m > PI * PI + tol))
        }
        ScanKind::Concavity => {
            let h = random_smooth_support(grid_n, seed, false)?;
            let v = random_perturbation(grid_n, seed.wrapping_mul(0x9e37_79b9_7f4a_7c15))?;
            let c = check_concavity_bound(&h, &v)?;
            Ok((c.rhs - c.lhs, c.lhs > c.rhs + tol))
        }
        ScanKind::Duality => {
            let p = make_random_symmetric(2 + (seed % 9) as usize, seed)?;
            let m = p.mahler();
            let defect = (p.polar()?.mahler() - m).abs() / m;
            Ok((defect, defect > tol))
        }
        ScanKind::Kuperberg3d => {
            let p = random_symmetric(3, 3 + (seed % 18) as usize, seed)?;
            let gap = p.kuperberg_gap()?;
            Ok((p.mahler()?, gap < -tol))
        }
    }
}

pub fn run(kind: ScanKind, count: u64, seed: u64, grid_n: usize, tol: f64) -> Vec<Row> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let s = seed.wrapping_add(index);
            Row {
                index,
                seed: s,
                outcome: item(kind, s, grid_n, tol),
            }
        })
        .collect()
}

pub fn table(kind: ScanKind, rows: &[Row]) -> String {
    let mut out = format!("index,seed,{},violation,error\n", kind.value_name());
    for r in rows {
        let _ = match &r.outcome {
            Ok((v, bad)) => writeln!(out, "{},{},{},{},", r.index, r.seed, fmt_num(*v), bad),
            Err(e) => writeln!(out, "{},{},,,\"{e}\"", r.index, r.seed),
        };
    }
    out
}

pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub violations: usize,
    pub errors: usize,
    /// 3-D draws below the cube value 32/3.
    pub conjecture_violations: Option<usize>,
}

pub fn summarize(kind: ScanKind, rows: &[Row], tol: f64) -> Summary {
    let values: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|o| o.0))
        .collect();
    Summary {
        count: rows.len(),
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        violations: rows
            .iter()
            .filter(|r| matches!(r.outcome, Ok((_, true))))
            .count(),
        errors: rows.iter().filter(|r| r.outcome.is_err()).count(),
        conjecture_violations: (kind == ScanKind::Kuperberg3d)
            .then(|| values.iter().filter(|&&m| m < cube_mahler(3) - tol).count()),
    }
}
