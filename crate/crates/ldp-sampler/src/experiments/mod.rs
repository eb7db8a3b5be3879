//! Experiment harness: finite-space risk tables, Laplace-mixture worst-case
//! sweeps, and the density-grid visual, all emitting deterministic CSV plus a
//! JSON mirror with the resolved configuration echoed back.

mod laplace;
mod visual;

pub use laplace::{run_laplace_sweep, SweepConfig};
pub use visual::{run_visual, VisualConfig, VisualGrid, VisualResult};

use serde::Serialize;
use serde_json::json;

use crate::divergence::FDivergence;
use crate::error::{Error, Result};
use crate::risk::{local_risk_functional, local_risk_pure, minimax_risk};
use crate::tradeoff::TradeoffFunction;

/// Which privacy family a comparison sweeps over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepPrivacy {
    Pure,
    Gldp,
}

impl SweepPrivacy {
    pub fn tradeoff(&self, param: f64) -> Result<TradeoffFunction> {
        match self {
            SweepPrivacy::Pure => TradeoffFunction::pure(param),
            SweepPrivacy::Gldp => TradeoffFunction::gaussian(param),
        }
    }

    /// The paper-parity privacy grid is the same for both families.
    pub fn default_grid() -> Vec<f64> {
        vec![0.1, 0.5, 1.0, 2.0]
    }
}

/// One local-vs-global comparison cell.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub privacy_param: f64,
    pub divergence: FDivergence,
    pub local: f64,
    pub global: f64,
    /// The claim under test; recorded, never asserted by the harness itself.
    pub local_leq_global: bool,
    /// Client index for per-client sweep rows; `None` marks the
    /// max-over-clients summary (and all finite-space rows).
    pub client: Option<usize>,
}

/// A finished experiment: rows plus the configuration echo.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub experiment_id: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub rows: Vec<ResultRow>,
}

impl ExperimentResult {
    /// CSV schema:
    /// `experiment_id,privacy_param,divergence,sampler,value,client_id,seed`.
    /// Each row expands into a local line and a global line; summary rows
    /// leave `client_id` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("experiment_id,privacy_param,divergence,sampler,value,client_id,seed\n");
        for row in &self.rows {
            for (sampler, value) in [("local", row.local), ("global", row.global)] {
                let client = row.client.map(|c| c.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{:.12e},{},{}\n",
                    self.experiment_id,
                    row.privacy_param,
                    row.divergence.name(),
                    sampler,
                    value,
                    client,
                    self.seed
                ));
            }
        }
        out
    }

    /// JSON mirror of the CSV rows with the config echo attached.
    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .flat_map(|row| {
                [("local", row.local), ("global", row.global)].map(|(sampler, value)| {
                    json!({
                        "privacy_param": row.privacy_param,
                        "divergence": row.divergence.name(),
                        "sampler": sampler,
                        "value": value,
                        "client_id": row.client,
                    })
                })
            })
            .collect();
        Ok(serde_json::to_string_pretty(&json!({
            "experiment_id": self.experiment_id,
            "seed": self.seed,
            "config": self.config,
            "rows": rows,
        }))?)
    }

    /// Summary (max-over-clients) rows only.
    pub fn summary_rows(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.client.is_none())
    }

    /// Per-client rows only.
    pub fn client_rows(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| r.client.is_some())
    }
}

/// Theoretical local-vs-global risk table on [k]: the local class is the
/// neighborhood of the uniform with gamma = k/2 - 1, the global class the
/// full simplex. Pure uses the clipping-sampler closed form, Gaussian the
/// numeric mixing-weight infimum.
pub fn run_finite(
    privacy: SweepPrivacy,
    k: usize,
    privacy_grid: &[f64],
    divergences: &[FDivergence],
) -> Result<ExperimentResult> {
    if !k.is_multiple_of(2) || k < 6 {
        return Err(Error::Config(format!(
            "finite experiment needs even k >= 6 so gamma = k/2 - 1 is a usable integer, got {k}"
        )));
    }
    if privacy_grid.is_empty() || divergences.is_empty() {
        return Err(Error::Config("privacy grid and divergence list must be non-empty".into()));
    }
    let gamma = (k / 2 - 1) as u32;
    let mut rows = Vec::with_capacity(privacy_grid.len() * divergences.len());
    for &param in privacy_grid {
        for &f in divergences {
            let (local, global) = match privacy {
                SweepPrivacy::Pure => {
                    let g = TradeoffFunction::pure(param)?;
                    (
                        local_risk_pure(gamma, param, f)?.risk,
                        minimax_risk(0.0, k as f64, &g, f)?.risk,
                    )
                }
                SweepPrivacy::Gldp => {
                    let g = TradeoffFunction::gaussian(param)?;
                    (
                        local_risk_functional(gamma, &g, f)?.risk,
                        minimax_risk(0.0, k as f64, &g, f)?.risk,
                    )
                }
            };
            rows.push(ResultRow {
                privacy_param: param,
                divergence: f,
                local,
                global,
                local_leq_global: local <= global,
                client: None,
            });
        }
    }
    let id = match privacy {
        SweepPrivacy::Pure => "finite-pure",
        SweepPrivacy::Gldp => "finite-gldp",
    };
    Ok(ExperimentResult {
        experiment_id: id.to_string(),
        seed: 0,
        config: json!({
            "id": id,
            "k": k,
            "gamma": gamma,
            "privacy_grid": privacy_grid,
            "divergences": divergences.iter().map(|d| d.name()).collect::<Vec<_>>(),
        }),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_pure_reference_values() {
        let res = run_finite(
            SweepPrivacy::Pure,
            20,
            &[0.1, 0.5, 1.0, 2.0],
            &FDivergence::STANDARD,
        )
        .unwrap();
        assert_eq!(res.rows.len(), 12);
        let kl_row = res
            .rows
            .iter()
            .find(|r| r.privacy_param == 1.0 && r.divergence == FDivergence::Kl)
            .unwrap();
        let e = std::f64::consts::E;
        assert!((kl_row.global - (1.0 + 19.0 / e).ln()).abs() < 1e-12);
        assert!((kl_row.local - 1.016_344_740_609_404_6).abs() < 1e-9);
        for row in &res.rows {
            assert!(row.local < row.global, "row {row:?} not strictly ordered");
            assert!(row.local_leq_global);
        }
    }

    #[test]
    fn finite_pure_all_paper_sizes_strictly_ordered() {
        for k in [10usize, 20, 100] {
            let res = run_finite(
                SweepPrivacy::Pure,
                k,
                &SweepPrivacy::default_grid(),
                &FDivergence::STANDARD,
            )
            .unwrap();
            for row in &res.rows {
                assert!(row.local < row.global, "k={k}, row {row:?}");
            }
        }
    }

    #[test]
    fn finite_gldp_ordering() {
        for k in [10usize, 20] {
            let res = run_finite(
                SweepPrivacy::Gldp,
                k,
                &SweepPrivacy::default_grid(),
                &FDivergence::STANDARD,
            )
            .unwrap();
            assert_eq!(res.rows.len(), 12);
            for row in &res.rows {
                assert!(
                    row.local <= row.global + 1e-12,
                    "k={k}, row {row:?} out of order"
                );
            }
        }
    }

    #[test]
    fn finite_rejects_odd_k() {
        assert!(run_finite(SweepPrivacy::Pure, 7, &[1.0], &FDivergence::STANDARD).is_err());
        assert!(run_finite(SweepPrivacy::Pure, 20, &[], &FDivergence::STANDARD).is_err());
    }

    #[test]
    fn csv_shape_and_round_trip() {
        let res = run_finite(SweepPrivacy::Pure, 10, &[0.5, 1.0], &FDivergence::STANDARD).unwrap();
        let csv = res.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        // Header plus (2 eps x 3 divergences) x 2 samplers.
        assert_eq!(lines.len(), 1 + 12);
        assert_eq!(
            lines[0],
            "experiment_id,privacy_param,divergence,sampler,value,client_id,seed"
        );
        for line in &lines[1..] {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 7);
            assert!(fields[4].parse::<f64>().is_ok(), "value field parses: {line}");
        }
        // JSON mirror parses and echoes config.
        let js = res.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v["config"]["k"], 10);
        assert_eq!(v["rows"].as_array().unwrap().len(), 12);
    }
}
