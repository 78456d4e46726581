//! Orchestration: paired protocol comparisons, gateway-weight sweeps and
//! multi-seed batches. Independent runs go through [`par_map`].

use std::fmt;

use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::metrics::{MetricsReport, SweepRow};
use crate::parallel::{par_map, Execution};
use crate::protocol::Protocol;
use crate::sim::{Scenario, ScenarioError, SimError, Simulator};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("sweep weight {0} is outside [0, 1]")]
    BadWeight(f64),
    #[error("sweep needs at least one weight")]
    EmptySweep,
}

pub fn run(config: &ScenarioConfig) -> Result<MetricsReport, ExperimentError> {
    let sc = Scenario::from_config(config)?;
    Ok(Simulator::new(&sc).run()?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub epo_sociable: u64,
    pub epo_flooding: u64,
    /// share of flooding's transmissions saved, in percent
    pub epo_reduction_pct: f64,
    pub max_ncv_sociable: usize,
    pub max_ncv_flooding: usize,
    pub add_sociable_ms: Option<f64>,
    pub add_flooding_ms: Option<f64>,
    pub ndm_sociable: u64,
    pub ndm_flooding: u64,
    pub ngm_identical: bool,
}

impl ComparisonSummary {
    pub fn new(sociable: &MetricsReport, flooding: &MetricsReport) -> Self {
        let (s, f) = (sociable.totals.epo, flooding.totals.epo);
        ComparisonSummary {
            epo_sociable: s,
            epo_flooding: f,
            epo_reduction_pct: if f == 0 { 0.0 } else { (f as f64 - s as f64) / f as f64 * 100.0 },
            max_ncv_sociable: sociable.max_ncv(),
            max_ncv_flooding: flooding.max_ncv(),
            add_sociable_ms: sociable.totals.add_ms,
            add_flooding_ms: flooding.totals.add_ms,
            ndm_sociable: sociable.totals.ndm,
            ndm_flooding: flooding.totals.ndm,
            ngm_identical: sociable.ngm_series() == flooding.ngm_series(),
        }
    }
}

fn ms(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.1} ms"))
}

impl fmt::Display for ComparisonSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>10} {:>8} {:>8} {:>12}", "protocol", "EPO", "maxNCV", "NDM", "ADD")?;
        writeln!(
            f,
            "{:<10} {:>10} {:>8} {:>8} {:>12}",
            "sociable", self.epo_sociable, self.max_ncv_sociable, self.ndm_sociable, ms(self.add_sociable_ms)
        )?;
        writeln!(
            f,
            "{:<10} {:>10} {:>8} {:>8} {:>12}",
            "flooding", self.epo_flooding, self.max_ncv_flooding, self.ndm_flooding, ms(self.add_flooding_ms)
        )?;
        writeln!(f, "EPO reduction: {:.2}%", self.epo_reduction_pct)?;
        write!(f, "NGM streams identical: {}", if self.ngm_identical { "yes" } else { "NO" })
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub sociable: MetricsReport,
    pub flooding: MetricsReport,
    pub summary: ComparisonSummary,
}

/// Both protocols over one scenario: same trajectories, communities and
/// detection schedule.
pub fn compare_scenario(sc: &Scenario, exec: Execution) -> Result<Comparison, SimError> {
    let mut out = par_map(exec, vec![Protocol::Sociable, Protocol::Flooding], |p| {
        Simulator::new(sc).protocol(p).run()
    })
    .into_iter();
    let sociable = out.next().expect("two runs")?;
    let flooding = out.next().expect("two runs")?;
    let summary = ComparisonSummary::new(&sociable, &flooding);
    Ok(Comparison {
        sociable,
        flooding,
        summary,
    })
}

pub fn run_comparison(config: &ScenarioConfig, exec: Execution) -> Result<Comparison, ExperimentError> {
    let sc = Scenario::from_config(config)?;
    Ok(compare_scenario(&sc, exec)?)
}

/// One SOCIABLE run per weight with the gateway weight held fixed at every
/// hop.
pub fn sweep_scenario(sc: &Scenario, values: &[f64], exec: Execution) -> Result<Vec<SweepRow>, ExperimentError> {
    if values.is_empty() {
        return Err(ExperimentError::EmptySweep);
    }
    if let Some(&bad) = values.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(ExperimentError::BadWeight(bad));
    }
    let base = sc.config.protocol_params();
    par_map(exec, values.to_vec(), |w| {
        let params = crate::protocol::ProtocolParams {
            w_ec_min: w,
            w_ec_max: w,
            ..base
        };
        let r = Simulator::new(sc).protocol(Protocol::Sociable).params(params).run()?;
        Ok(SweepRow {
            w_ec: w,
            add_ms: r.totals.add_ms,
            ndm: r.totals.ndm,
        })
    })
    .into_iter()
    .collect()
}

pub fn run_sweep(config: &ScenarioConfig, values: &[f64], exec: Execution) -> Result<Vec<SweepRow>, ExperimentError> {
    let sc = Scenario::from_config(config)?;
    sweep_scenario(&sc, values, exec)
}

/// `0.1, 0.2, ..., 0.9`
pub fn default_sweep_values() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// The configured protocol once per seed.
pub fn run_batch(config: &ScenarioConfig, seeds: &[u64], exec: Execution) -> Result<Vec<MetricsReport>, ExperimentError> {
    par_map(exec, seeds.to_vec(), |seed| {
        run(&ScenarioConfig {
            seed,
            ..config.clone()
        })
    })
    .into_iter()
    .collect()
}

/// A paired comparison per seed. Seeds run in parallel; each pair runs
/// sequentially inside its worker.
pub fn run_comparison_batch(
    config: &ScenarioConfig,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<Comparison>, ExperimentError> {
    par_map(exec, seeds.to_vec(), |seed| {
        run_comparison(
            &ScenarioConfig {
                seed,
                ..config.clone()
            },
            Execution::Sequential,
        )
    })
    .into_iter()
    .collect()
}
