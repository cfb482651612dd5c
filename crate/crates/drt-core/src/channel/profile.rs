//! Channel profiles and run comparison grids.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::channel::runner::{RunResult, Snapshot};

/// Default Doppler resolution, hertz (70 ms observation window).
pub const DEFAULT_DOPPLER_BIN_HZ: f64 = 14.34;
/// Default time resolution for profile grids, seconds.
pub const DEFAULT_TIME_BIN_S: f64 = 0.2;
/// Default delay resolution, seconds (30 m of path length).
pub const DEFAULT_DELAY_BIN_S: f64 = 1e-7;

/// Sparse power grid over (row, column) bins; rows and columns are linear
/// quantities divided by their bin widths. Accumulation is in watts.
#[derive(Debug, Clone)]
pub struct ProfileGrid {
    pub row_bin: f64,
    pub col_bin: f64,
    cells: BTreeMap<(i64, i64), f64>,
}

impl ProfileGrid {
    pub fn new(row_bin: f64, col_bin: f64) -> Self {
        ProfileGrid { row_bin, col_bin, cells: BTreeMap::new() }
    }

    pub fn add(&mut self, row_value: f64, col_value: f64, power_w: f64) {
        let r = (row_value / self.row_bin).floor() as i64;
        let c = (col_value / self.col_bin).floor() as i64;
        *self.cells.entry((r, c)).or_insert(0.0) += power_w;
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn total_power_w(&self) -> f64 {
        self.cells.values().sum()
    }

    /// Deterministic CSV: one row per occupied cell, sorted by (row, col),
    /// bin centers in the first two columns, power in dBm. Empty bins are
    /// absent rather than -inf.
    pub fn to_csv(&self, row_name: &str, col_name: &str) -> String {
        let mut out = format!("{row_name},{col_name},power_dbm\n");
        for (&(r, c), &p) in &self.cells {
            let _ = writeln!(
                out,
                "{:.9e},{:.9e},{:.6}",
                (r as f64 + 0.5) * self.row_bin,
                (c as f64 + 0.5) * self.col_bin,
                crate::em::field::watts_to_dbm(p)
            );
        }
        out
    }
}

/// Power-delay profile: power over (time, delay) bins.
pub fn build_pdp(run: &RunResult, time_bin: f64, delay_bin: f64) -> ProfileGrid {
    let mut g = ProfileGrid::new(time_bin, delay_bin);
    for s in &run.snapshots {
        for r in &s.rays {
            g.add(s.t, r.delay, r.power_w);
        }
    }
    g
}

/// Power-Doppler profile: power over (time, Doppler shift) bins.
pub fn build_pdfp(run: &RunResult, time_bin: f64, doppler_bin: f64) -> ProfileGrid {
    let mut g = ProfileGrid::new(time_bin, doppler_bin);
    for s in &run.snapshots {
        for r in &s.rays {
            g.add(s.t, r.doppler_hz, r.power_w);
        }
    }
    g
}

/// One time step of a run-vs-run comparison.
#[derive(Debug, Clone)]
pub struct StepComparison {
    pub t: f64,
    pub power_a_dbm: f64,
    pub power_b_dbm: f64,
    /// Power difference, only meaningful when both runs found the same ray
    /// structures.
    pub delta_db: Option<f64>,
    pub structures_match: bool,
}

fn labels(s: &Snapshot) -> Vec<&str> {
    let mut v: Vec<&str> = s.rays.iter().map(|r| r.label.as_str()).collect();
    v.sort_unstable();
    v
}

/// Step-by-step comparison of two runs over the same time grid. Steps where
/// the ray sets differ structurally are flagged instead of contributing a
/// power delta, so transient disagreements around path birth/death don't
/// masquerade as field errors.
pub fn error_map(a: &RunResult, b: &RunResult) -> Vec<StepComparison> {
    assert_eq!(a.snapshots.len(), b.snapshots.len(), "runs cover different grids");
    a.snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(sa, sb)| {
            assert!((sa.t - sb.t).abs() < 1e-12);
            let matches = labels(sa) == labels(sb);
            let pa = crate::em::field::watts_to_dbm(sa.total_power_w);
            let pb = crate::em::field::watts_to_dbm(sb.total_power_w);
            StepComparison {
                t: sa.t,
                power_a_dbm: pa,
                power_b_dbm: pb,
                delta_db: if matches { Some(pa - pb) } else { None },
                structures_match: matches,
            }
        })
        .collect()
}

/// Per-ray CSV of a run: deterministic row order (time, then label).
pub fn rays_to_csv(run: &RunResult) -> String {
    let mut out = String::from("t_s,label,delay_s,power_w,doppler_hz\n");
    for s in &run.snapshots {
        let mut rows: Vec<_> = s.rays.iter().collect();
        rows.sort_by(|x, y| x.label.cmp(&y.label));
        for r in rows {
            let _ = writeln!(
                out,
                "{:.9e},{},{:.9e},{:.9e},{:.9e}",
                s.t, r.label, r.delay, r.power_w, r.doppler_hz
            );
        }
    }
    out
}

/// Total received power per step.
pub fn power_to_csv(run: &RunResult) -> String {
    let mut out = String::from("t_s,power_w,power_dbm,n_rays,retraced\n");
    for s in &run.snapshots {
        let _ = writeln!(
            out,
            "{:.9e},{:.9e},{:.6},{},{}",
            s.t,
            s.total_power_w,
            crate::em::field::watts_to_dbm(s.total_power_w),
            s.rays.len(),
            u8::from(s.retraced)
        );
    }
    out
}
