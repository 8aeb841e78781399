//! Human approval policies and the arbiter that routes gate decisions
//! through them.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::ColorValue;
use crate::engine::{Arbiter, Event};
use crate::marking::Marking;
use crate::net::{Binding, Net};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Approve,
    Deny,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Approve => "approve",
            Decision::Deny => "deny",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HumanPolicy {
    ApproveAll,
    DenyAll,
    /// One decision per request, consumed in request order.
    Script(Vec<Decision>),
    /// Ask on a line-oriented input channel ("y"/"n").
    Interactive,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HumanError {
    #[error("scripted decisions exhausted after {0} requests")]
    ScriptExhausted(usize),
    #[error("input channel closed while waiting for a decision")]
    InputClosed,
    #[error("human decision channel failed: {0}")]
    Io(String),
    #[error("decision {decision} for {transition} is not enabled in the net")]
    Unavailable { transition: String, decision: &'static str },
}

/// A policy plus the state it needs: script position and, for interactive
/// use, the input line source and the prompt sink.
pub struct HumanDecider<'io> {
    policy: HumanPolicy,
    answered: usize,
    input: Option<Box<dyn BufRead + 'io>>,
    prompt: Option<Box<dyn Write + 'io>>,
}

impl<'io> HumanDecider<'io> {
    pub fn new(policy: HumanPolicy) -> Self {
        HumanDecider {
            policy,
            answered: 0,
            input: None,
            prompt: None,
        }
    }

    /// Attach the channel used by the interactive policy.
    pub fn with_channel(mut self, input: impl BufRead + 'io, prompt: impl Write + 'io) -> Self {
        self.input = Some(Box::new(input));
        self.prompt = Some(Box::new(prompt));
        self
    }

    pub fn policy(&self) -> &HumanPolicy {
        &self.policy
    }

    pub fn answered(&self) -> usize {
        self.answered
    }

    /// Decide one approval request. `request` is shown to an interactive user.
    pub fn decide(&mut self, request: &str) -> Result<Decision, HumanError> {
        let d = match &self.policy {
            HumanPolicy::ApproveAll => Decision::Approve,
            HumanPolicy::DenyAll => Decision::Deny,
            HumanPolicy::Script(ds) => *ds
                .get(self.answered)
                .ok_or(HumanError::ScriptExhausted(self.answered))?,
            HumanPolicy::Interactive => self.ask(request)?,
        };
        self.answered += 1;
        Ok(d)
    }

    fn ask(&mut self, request: &str) -> Result<Decision, HumanError> {
        let io = |e: std::io::Error| HumanError::Io(e.to_string());
        let input = self.input.as_mut().ok_or(HumanError::InputClosed)?;
        loop {
            if let Some(p) = self.prompt.as_mut() {
                write!(p, "approve {request}? [y/n] ").map_err(io)?;
                p.flush().map_err(io)?;
            }
            let mut line = String::new();
            if input.read_line(&mut line).map_err(io)? == 0 {
                return Err(HumanError::InputClosed);
            }
            match line.trim().to_ascii_lowercase().as_str() {
                "y" | "yes" => return Ok(Decision::Approve),
                "n" | "no" => return Ok(Decision::Deny),
                _ => {}
            }
        }
    }
}

/// A pair of conflicting transitions that encode one human decision: both
/// consume the same request, they differ in the value bound to `var`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumanGate {
    pub approve: String,
    pub deny: String,
    pub var: String,
}

fn describe(b: &Binding, skip: &str) -> String {
    let parts: Vec<String> = b
        .iter()
        .filter(|(k, _)| k.as_str() != skip)
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// Arbiter that hands every decision event to a [`HumanDecider`] and fires
/// whichever side of the gate the human picked.
pub struct GateArbiter<'a, 'io> {
    pub gates: &'a [HumanGate],
    pub decider: &'a mut HumanDecider<'io>,
    pub error: Option<HumanError>,
}

impl<'a, 'io> GateArbiter<'a, 'io> {
    pub fn new(gates: &'a [HumanGate], decider: &'a mut HumanDecider<'io>) -> Self {
        GateArbiter {
            gates,
            decider,
            error: None,
        }
    }

    fn resolve(&mut self, chosen: Event, enabled: &[Event]) -> Result<Event, HumanError> {
        let Some(gate) = self
            .gates
            .iter()
            .find(|g| g.approve == chosen.transition || g.deny == chosen.transition)
        else {
            return Ok(chosen);
        };
        let request = describe(&chosen.binding, &gate.var);
        let decision = self.decider.decide(&request)?;
        let target = match decision {
            Decision::Approve => &gate.approve,
            Decision::Deny => &gate.deny,
        };
        let same_request = |b: &Binding| {
            b.len() == chosen.binding.len()
                && b.iter()
                    .all(|(k, v)| k == &gate.var || chosen.binding.get(k) == Some(v))
        };
        enabled
            .iter()
            .find(|e| &e.transition == target && same_request(&e.binding))
            .cloned()
            .ok_or(HumanError::Unavailable {
                transition: target.clone(),
                decision: decision.as_str(),
            })
    }
}

impl Arbiter for GateArbiter<'_, '_> {
    fn arbitrate(&mut self, _net: &Net, _marking: &Marking, chosen: Event, enabled: &[Event]) -> Result<Event, String> {
        self.resolve(chosen, enabled).map_err(|e| {
            let msg = e.to_string();
            self.error = Some(e);
            msg
        })
    }
}

/// The value a decision variable takes in the scenario nets.
pub fn decision_value(net: &Net, d: Decision) -> ColorValue {
    net.sym("Decision", d.as_str())
}
