//! Machine-readable run reports and CSV traces.
//!
//! Non-finite floats serialize as `null` (they are stored as `None`), so every
//! report survives a JSON round trip unchanged.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hullsolve::TraceRecord;
use serde::{Deserialize, Serialize};

pub const TRACE_HEADER: &str = "iter,t,gap_or_E,alpha_b,pivot,witness";

/// `Some(x)` for finite `x`.
pub fn fin(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn fin_opt(x: Option<f64>) -> Option<f64> {
    x.and_then(fin)
}

pub fn fin_vec(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().map(|&x| fin(x)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub command: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub status: String,
    pub exit_code: i32,
    pub wall_time_s: Option<f64>,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
    pub diagnostics: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are plain data")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Zero the one field allowed to differ between identical runs.
    pub fn without_wall_time(mut self) -> Self {
        self.wall_time_s = None;
        self
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Hull(HullSection),
    Solve(SolveSection),
    Analyze(AnalyzeSection),
    Oracle(OracleSection),
    Bench(BenchSection),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSection {
    pub point: Vec<Option<f64>>,
    pub coefficients: Vec<Option<f64>>,
    pub margins: Vec<Option<f64>>,
    pub distance_lower: Option<f64>,
    pub distance_upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullSection {
    pub result: String,
    pub iterations: usize,
    pub iteration_cap: usize,
    pub epsilon: Option<f64>,
    pub radius: Option<f64>,
    pub initial_gap: Option<f64>,
    pub gap: Option<f64>,
    pub point: Vec<Option<f64>>,
    pub coefficients: Vec<Option<f64>>,
    pub last_pivot: Option<usize>,
    pub witness: Option<WitnessSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySection {
    pub iteration: usize,
    pub hull_gap: Option<f64>,
    pub epsilon: Option<f64>,
    pub epsilon_prime: Option<f64>,
    pub residual: Option<f64>,
    pub holds: bool,
}

/// Shift bounds, kept in log space since the linear values overflow quickly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftBoundsSection {
    pub log_tau_star: Option<f64>,
    pub log_tau_star_prime: Option<f64>,
    pub tau_star: Option<f64>,
    pub tau_star_prime: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSection {
    pub mode: String,
    pub status: String,
    pub n: usize,
    pub x: Option<Vec<Option<f64>>>,
    pub residual_norm: Option<f64>,
    pub relative_residual: Option<f64>,
    pub rho: Option<f64>,
    pub epsilon0: Option<f64>,
    pub shift_t: Option<f64>,
    pub delta0_prime: Option<f64>,
    pub inner_epsilon: Option<f64>,
    pub epsilon_prime: Option<f64>,
    pub iterations: usize,
    pub phase1_iterations: usize,
    pub iteration_cap: usize,
    pub shift_escalations: usize,
    pub reseeds: usize,
    pub sensitivity: Option<SensitivitySection>,
    pub witness: Option<WitnessSection>,
    pub shift_bounds: Option<ShiftBoundsSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeSection {
    pub n: usize,
    pub rho: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_min_converged: bool,
    pub log_det_q: Option<f64>,
    pub delta0_stated: Option<f64>,
    pub delta0_rayleigh: Option<f64>,
    pub delta0_bound: Option<f64>,
    pub shift_bounds: ShiftBoundsSection,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub problem: String,
    /// Exact solution for systems.
    pub x: Option<Vec<Option<f64>>>,
    pub t_star: Option<f64>,
    pub residual_norm: Option<f64>,
    /// Planar membership for point sets.
    pub inside: Option<bool>,
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub id: usize,
    pub n: usize,
    pub status: String,
    pub iterations: usize,
    pub relative_residual: Option<f64>,
    pub error_to_planted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSection {
    pub suite: String,
    pub seed: u64,
    pub threads: usize,
    pub converged: usize,
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub t: Option<f64>,
    pub gap_or_e: Option<f64>,
    pub alpha_b: Option<f64>,
    pub pivot: Option<usize>,
    pub witness: bool,
}

impl From<&TraceRecord<f64>> for TraceRow {
    fn from(r: &TraceRecord<f64>) -> Self {
        Self {
            iter: r.iteration,
            t: fin(r.shift),
            gap_or_e: fin(r.value),
            alpha_b: fin_opt(r.alpha_b),
            pivot: r.pivot,
            witness: r.witness,
        }
    }
}

fn cell(x: Option<f64>) -> String {
    // `Display` on f64 prints the shortest string that parses back exactly.
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut s = String::with_capacity(32 * (rows.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in rows {
        let pivot = r.pivot.map(|p| p.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.iter,
            cell(r.t),
            cell(r.gap_or_e),
            cell(r.alpha_b),
            pivot,
            u8::from(r.witness)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        RunReport {
            tool: "hullsolve 0.1.0".into(),
            command: vec!["solve".into(), "--matrix".into(), "a.txt".into()],
            config: BTreeMap::from([("epsilon0".into(), "1e-8".into())]),
            status: "converged".into(),
            exit_code: 0,
            wall_time_s: Some(0.25),
            outcome: Outcome::Solve(SolveSection {
                mode: "incremental".into(),
                status: "converged".into(),
                n: 2,
                x: Some(fin_vec(&[-1.0000000000000002, f64::NAN])),
                residual_norm: Some(0.1 + 0.2),
                relative_residual: fin(f64::INFINITY),
                rho: Some(3.0),
                epsilon0: Some(1e-8),
                shift_t: Some(8.0 / 3.0),
                delta0_prime: None,
                inner_epsilon: None,
                epsilon_prime: None,
                iterations: 41,
                phase1_iterations: 0,
                iteration_cap: 10,
                shift_escalations: 0,
                reseeds: 0,
                sensitivity: None,
                witness: None,
                shift_bounds: Some(ShiftBoundsSection {
                    log_tau_star: Some(1e300f64.ln() * 3.0),
                    log_tau_star_prime: Some(2.5),
                    tau_star: None,
                    tau_star_prime: Some(12.182493960703473),
                }),
            }),
            trace: Some(vec![TraceRow {
                iter: 1,
                t: Some(2.0),
                gap_or_e: Some(936f64.sqrt() / 11.0),
                alpha_b: Some(11.0 / 52.0),
                pivot: Some(0),
                witness: false,
            }]),
            diagnostics: vec!["note".into()],
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let json = r.to_json();
        assert!(json.contains("\"kind\": \"solve\""));
        assert!(json.contains("null"));
        assert_eq!(RunReport::from_json(&json).unwrap(), r);
    }

    #[test]
    fn csv_cells_round_trip() {
        let rows = sample().trace.unwrap();
        let csv = trace_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TRACE_HEADER));
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[2].parse::<f64>().unwrap(), 936f64.sqrt() / 11.0);
        assert_eq!(cells[5], "0");
        let empty =
            trace_csv(&[TraceRow { iter: 0, t: None, gap_or_e: None, alpha_b: None, pivot: None, witness: true }]);
        assert!(empty.ends_with("0,,,,,1\n"));
    }
}
