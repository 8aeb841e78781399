//! The two worked scenarios: a drone swarm with human-gated task
//! assignment, and a learning loop over demonstrated user actions.

pub mod human;
pub mod lam;
pub mod swarm;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::engine::{FiringPolicy, Trace};
use crate::format::trace::records;
use crate::space::CommSpaceNet;
use human::{HumanDecider, HumanError};
use lam::LamConfig;
use swarm::SwarmConfig;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("invalid config field {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
}

impl ConfigError {
    pub fn field(&self) -> &str {
        match self {
            ConfigError::InvalidConfig { field, .. } => field,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Human(#[from] HumanError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ScenarioConfig {
    Swarm(SwarmConfig),
    Lam(LamConfig),
}

impl ScenarioConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioConfig::Swarm(_) => "swarm",
            ScenarioConfig::Lam(_) => "lam",
        }
    }

    pub fn build(&self) -> Result<CommSpaceNet, ConfigError> {
        match self {
            ScenarioConfig::Swarm(c) => swarm::build_swarm_net(c),
            ScenarioConfig::Lam(c) => lam::build_lam_net(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub seed: u64,
    pub policy: String,
    pub steps: usize,
    pub terminal: String,
    pub tasks_assigned: usize,
    pub approvals_requested: usize,
    pub approvals_granted: usize,
    pub approvals_denied: usize,
    pub prediction_accuracy: Vec<f64>,
    /// Scheduled changes applied during the run, with their step index.
    pub events: Vec<String>,
    #[serde(serialize_with = "trace_doc")]
    pub trace: Trace,
}

fn trace_doc<S: Serializer>(t: &Trace, s: S) -> Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(3))?;
    m.serialize_entry("terminal", t.terminal.as_str())?;
    m.serialize_entry("final_marking_digest", &t.final_marking.digest())?;
    m.serialize_entry("steps", &records(t))?;
    m.end()
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// One line of counters for humans.
    pub fn headline(&self) -> String {
        match self.scenario.as_str() {
            "lam" => {
                let acc: Vec<String> = self.prediction_accuracy.iter().map(|a| format!("{a:.3}")).collect();
                format!(
                    "lam: steps={} terminal={} accuracy=[{}]",
                    self.steps,
                    self.terminal,
                    acc.join(", ")
                )
            }
            name => format!(
                "{name}: steps={} terminal={} tasks_assigned={} approvals_requested={} approvals_granted={} approvals_denied={}",
                self.steps,
                self.terminal,
                self.tasks_assigned,
                self.approvals_requested,
                self.approvals_granted,
                self.approvals_denied
            ),
        }
    }
}

/// Run a scenario net built from `config`. Human decisions come from
/// `decider`; the LAM scenario makes none.
pub fn run_scenario(
    csnet: &CommSpaceNet,
    config: &ScenarioConfig,
    policy: FiringPolicy,
    seed: u64,
    decider: &mut HumanDecider<'_>,
) -> Result<ScenarioReport, ScenarioError> {
    match config {
        ScenarioConfig::Swarm(c) => swarm::run_swarm(csnet, c, policy, seed, decider),
        ScenarioConfig::Lam(c) => Ok(lam::run_lam(csnet, c, policy, seed)),
    }
}
