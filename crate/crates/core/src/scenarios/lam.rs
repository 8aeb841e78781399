//! Action-model feedback loop: a user performs demonstrated actions, the
//! model predicts each one from the previous action, compares, and learns.
//!
//! Every action goes through one cycle:
//!
//! ```text
//! user_turn(k) + script(k,r,c,a) -perform-> raw_action  (surface)
//! raw_action -parse_action-> observed                    (observation)
//! observed(k,r,c,a) + model -predict_<c>_<p>-> prediction(k,r,c,a,p) + model
//! prediction -compare_hit | compare_miss-> feedback(k,c,a) + score(r, hit|miss)
//! feedback(k,c,a) + model + inc -update_<c>_<a>-> model' + ack(k)
//! ack(k) + next_turn(k,k') -advance-> user_turn(k')
//! ```
//!
//! The model token is a tuple of counts, one per (context, action) pair.
//! The context of the first action of every demonstration is `_start`.
//! `predict_<c>_<p>` is guarded so that exactly one `p` is enabled per
//! context: the highest count, earliest in the alphabet on ties.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ConfigError, ScenarioReport};
use crate::color::{ColorSet, ColorValue};
use crate::engine::{run, FiringPolicy};
use crate::marking::Marking;
use crate::net::{ArcExpr, ArcPattern, CmpOp, Guard, Net, Operand, Transition};
use crate::space::{CommSpaceNet, SpaceAssignment, SpaceKind};

pub const START: &str = "_start";

pub const SCRIPT: &str = "script";
pub const USER_TURN: &str = "user_turn";
pub const RAW_ACTION: &str = "raw_action";
pub const OBSERVED: &str = "observed";
pub const MODEL: &str = "model";
pub const INC: &str = "inc";
pub const PREDICTION: &str = "prediction";
pub const FEEDBACK: &str = "feedback";
pub const SCORE: &str = "score";
pub const ACK: &str = "ack";
pub const NEXT_TURN: &str = "next_turn";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LamConfig {
    pub action_alphabet: Vec<String>,
    pub demonstrations: Vec<Vec<String>>,
    pub repetitions: u32,
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidConfig {
        field: field.into(),
        reason: reason.into(),
    }
}

impl LamConfig {
    pub fn new<S: AsRef<str>>(alphabet: &[S], demonstration: &[S], repetitions: u32) -> Self {
        let own = |xs: &[S]| xs.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        LamConfig {
            action_alphabet: own(alphabet),
            demonstrations: vec![own(demonstration)],
            repetitions,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.action_alphabet.is_empty() {
            return Err(invalid("action_alphabet", "alphabet is empty"));
        }
        let mut seen = BTreeSet::new();
        for a in &self.action_alphabet {
            let ok =
                !a.is_empty() && a != START && a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            if !ok || !seen.insert(a.as_str()) {
                return Err(invalid("action_alphabet", format!("bad or repeated action {a:?}")));
            }
        }
        if self.demonstrations.is_empty() {
            return Err(invalid("demonstrations", "no demonstrations"));
        }
        for d in &self.demonstrations {
            if d.is_empty() {
                return Err(invalid("demonstrations", "empty demonstration"));
            }
            if let Some(a) = d.iter().find(|a| !seen.contains(a.as_str())) {
                return Err(invalid(
                    "demonstrations",
                    format!("action {a:?} is not in the alphabet"),
                ));
            }
        }
        if self.repetitions < 1 {
            return Err(invalid("repetitions", "at least one repetition is required"));
        }
        Ok(())
    }

    pub fn contexts(&self) -> Vec<&str> {
        std::iter::once(START)
            .chain(self.action_alphabet.iter().map(String::as_str))
            .collect()
    }

    /// Every (repetition, context, action) in performance order.
    pub fn script(&self) -> Vec<(u32, &str, &str)> {
        let mut out = Vec::new();
        for r in 0..self.repetitions {
            for d in &self.demonstrations {
                let mut ctx = START;
                for a in d {
                    out.push((r, ctx, a.as_str()));
                    ctx = a;
                }
            }
        }
        out
    }

    pub fn actions_per_repetition(&self) -> usize {
        self.demonstrations.iter().map(Vec::len).sum()
    }
}

/// First-order frequency table: context → next action → count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LamModel {
    pub alphabet: Vec<String>,
    pub counts: BTreeMap<String, BTreeMap<String, u32>>,
}

impl LamModel {
    pub fn new(alphabet: &[String]) -> Self {
        LamModel {
            alphabet: alphabet.to_vec(),
            counts: BTreeMap::new(),
        }
    }

    pub fn count(&self, ctx: &str, action: &str) -> u32 {
        self.counts
            .get(ctx)
            .and_then(|row| row.get(action))
            .copied()
            .unwrap_or(0)
    }

    /// Highest count, earliest in the alphabet on ties.
    pub fn predict(&self, ctx: &str) -> &str {
        let mut best = &self.alphabet[0];
        for a in &self.alphabet[1..] {
            if self.count(ctx, a) > self.count(ctx, best) {
                best = a;
            }
        }
        best
    }

    pub fn observe(&mut self, ctx: &str, action: &str) {
        *self
            .counts
            .entry(ctx.into())
            .or_default()
            .entry(action.into())
            .or_default() += 1;
    }

    /// Decode the net's model token.
    pub fn from_token(config: &LamConfig, token: &ColorValue) -> Option<LamModel> {
        let cells = token.as_tuple()?;
        let mut m = LamModel::new(&config.action_alphabet);
        let a = config.action_alphabet.len();
        for (ci, ctx) in config.contexts().iter().enumerate() {
            for (ai, act) in config.action_alphabet.iter().enumerate() {
                let n = cells.get(ci * a + ai)?.as_int()?;
                if n > 0 {
                    m.counts.entry((*ctx).into()).or_default().insert(act.clone(), n as u32);
                }
            }
        }
        Some(m)
    }
}

/// Per-repetition accuracy computed directly, without the net.
pub fn simulate(config: &LamConfig) -> Vec<f64> {
    let mut model = LamModel::new(&config.action_alphabet);
    let mut hits = vec![0usize; config.repetitions as usize];
    for (r, ctx, a) in config.script() {
        if model.predict(ctx) == a {
            hits[r as usize] += 1;
        }
        model.observe(ctx, a);
    }
    let per = config.actions_per_repetition() as f64;
    hits.into_iter().map(|h| h as f64 / per).collect()
}

fn var(name: &str) -> Operand {
    Operand::Var(name.into())
}

pub fn build_lam_net(config: &LamConfig) -> Result<CommSpaceNet, ConfigError> {
    use SpaceKind::*;
    config.validate()?;
    let script = config.script();
    let n = script.len() as i64;
    let contexts = config.contexts();
    let alphabet = &config.action_alphabet;
    let a_len = alphabet.len();
    let cells = contexts.len() * a_len;

    let mut net = Net::new();
    net.colorset(ColorSet::enumeration("Action", alphabet))
        .colorset(ColorSet::enumeration("Context", &contexts))
        .colorset(ColorSet::int_range("Step", 0, n - 1))
        .colorset(ColorSet::int_range("Rep", 0, i64::from(config.repetitions) - 1))
        .colorset(ColorSet::int_range("Count", 0, n))
        .colorset(ColorSet::product("Model", vec!["Count"; cells]))
        .colorset(ColorSet::product("Inc", ["Count", "Count"]))
        .colorset(ColorSet::product("Turn", ["Step", "Rep", "Context", "Action"]))
        .colorset(ColorSet::product("StepPair", ["Step", "Step"]))
        .colorset(ColorSet::product(
            "Prediction",
            ["Step", "Rep", "Context", "Action", "Action"],
        ))
        .colorset(ColorSet::enumeration("Outcome", ["hit", "miss"]))
        .colorset(ColorSet::product("Score", ["Rep", "Outcome"]))
        .colorset(ColorSet::product("Feedback", ["Step", "Context", "Action"]));

    let mut spaces = SpaceAssignment::default();
    for (p, cs, s) in [
        (SCRIPT, "Turn", Surface),
        (USER_TURN, "Step", Surface),
        (RAW_ACTION, "Turn", Surface),
        (OBSERVED, "Turn", Observation),
        (ACK, "Step", Observation),
        (NEXT_TURN, "StepPair", Observation),
        (MODEL, "Model", Computation),
        (INC, "Inc", Computation),
        (PREDICTION, "Prediction", Computation),
        (FEEDBACK, "Feedback", Computation),
        (SCORE, "Score", Computation),
    ] {
        net.place(p, cs);
        spaces.place(p, s);
    }

    let pv = |names: &[&str]| ArcPattern::Tuple(names.iter().map(|v| ArcPattern::var(v)).collect());
    let ev = |names: &[&str]| ArcExpr::Tuple(names.iter().map(|v| ArcExpr::var(v)).collect());
    let m_names: Vec<String> = (0..cells).map(|i| format!("m{i}")).collect();
    let m_refs: Vec<&str> = m_names.iter().map(String::as_str).collect();
    let model_pat = pv(&m_refs);
    let model_expr = ev(&m_refs);

    net.add_transition(
        Transition::new("perform")
            .named("user: perform action")
            .input(USER_TURN, ArcPattern::var("k"))
            .input(SCRIPT, pv(&["k", "r", "c", "a"]))
            .output(RAW_ACTION, ev(&["k", "r", "c", "a"])),
    );
    spaces.transition("perform", Surface);
    net.add_transition(
        Transition::new("parse_action")
            .named("parse user action")
            .input(RAW_ACTION, pv(&["k", "r", "c", "a"]))
            .output(OBSERVED, ev(&["k", "r", "c", "a"])),
    );
    spaces.transition("parse_action", Observation);

    for (ci, ctx) in contexts.iter().enumerate() {
        let c_val = net.sym("Context", ctx);
        for (pi, p) in alphabet.iter().enumerate() {
            let p_val = net.sym("Action", p);
            let own = &m_names[ci * a_len + pi];
            let conds: Vec<Guard> = (0..a_len)
                .filter(|&q| q != pi)
                .map(|q| {
                    let op = if q < pi { CmpOp::Gt } else { CmpOp::Ge };
                    Guard::cmp(op, var(own), var(&m_names[ci * a_len + q]))
                })
                .collect();
            let guard = if conds.is_empty() {
                Guard::True
            } else {
                Guard::And(conds)
            };
            let id = format!("predict_{ctx}_{p}");
            net.add_transition(
                Transition::new(&id)
                    .named(&format!("model: predict {p} after {ctx}"))
                    .input(
                        OBSERVED,
                        ArcPattern::Tuple(vec![
                            ArcPattern::var("k"),
                            ArcPattern::var("r"),
                            ArcPattern::Lit(c_val.clone()),
                            ArcPattern::var("a"),
                        ]),
                    )
                    .input(MODEL, model_pat.clone())
                    .output(
                        PREDICTION,
                        ArcExpr::Tuple(vec![
                            ArcExpr::var("k"),
                            ArcExpr::var("r"),
                            ArcExpr::Lit(c_val.clone()),
                            ArcExpr::var("a"),
                            ArcExpr::Lit(p_val),
                        ]),
                    )
                    .output(MODEL, model_expr.clone())
                    .guard(guard),
            );
            spaces.transition(&id, Computation);
        }
    }

    for (id, outcome, op) in [("compare_hit", "hit", CmpOp::Eq), ("compare_miss", "miss", CmpOp::Ne)] {
        let o = net.sym("Outcome", outcome);
        net.add_transition(
            Transition::new(id)
                .named(&format!("compare: {outcome}"))
                .input(PREDICTION, pv(&["k", "r", "c", "a", "p"]))
                .output(FEEDBACK, ev(&["k", "c", "a"]))
                .output(SCORE, ArcExpr::Tuple(vec![ArcExpr::var("r"), ArcExpr::Lit(o)]))
                .guard(Guard::cmp(op, var("a"), var("p"))),
        );
        spaces.transition(id, Computation);
    }

    for (ci, ctx) in contexts.iter().enumerate() {
        let c_val = net.sym("Context", ctx);
        for (ai, act) in alphabet.iter().enumerate() {
            let a_val = net.sym("Action", act);
            let slot = ci * a_len + ai;
            let mut bumped: Vec<ArcExpr> = m_refs.iter().map(|v| ArcExpr::var(v)).collect();
            bumped[slot] = ArcExpr::var("n");
            let id = format!("update_{ctx}_{act}");
            net.add_transition(
                Transition::new(&id)
                    .named(&format!("model: count {act} after {ctx}"))
                    .input(
                        FEEDBACK,
                        ArcPattern::Tuple(vec![
                            ArcPattern::var("k"),
                            ArcPattern::Lit(c_val.clone()),
                            ArcPattern::Lit(a_val),
                        ]),
                    )
                    .input(MODEL, model_pat.clone())
                    .input(INC, pv(&[m_refs[slot], "n"]))
                    .output(MODEL, ArcExpr::Tuple(bumped))
                    .output(INC, ev(&[m_refs[slot], "n"]))
                    .output(ACK, ArcExpr::var("k")),
            );
            spaces.transition(&id, Computation);
        }
    }

    net.add_transition(
        Transition::new("advance")
            .named("hand the turn back to the user")
            .input(ACK, ArcPattern::var("k"))
            .input(NEXT_TURN, pv(&["k", "k2"]))
            .output(USER_TURN, ArcExpr::var("k2")),
    );
    spaces.transition("advance", Observation);

    for (k, (r, ctx, a)) in script.iter().enumerate() {
        let tok = ColorValue::tuple([
            ColorValue::int(k as i64),
            ColorValue::int(i64::from(*r)),
            net.sym("Context", ctx),
            net.sym("Action", a),
        ]);
        net.token(SCRIPT, tok);
    }
    net.token(USER_TURN, ColorValue::int(0));
    for k in 0..n - 1 {
        net.token(
            NEXT_TURN,
            ColorValue::tuple([ColorValue::int(k), ColorValue::int(k + 1)]),
        );
    }
    for c in 0..n {
        net.token(INC, ColorValue::tuple([ColorValue::int(c), ColorValue::int(c + 1)]));
    }
    net.token(MODEL, ColorValue::tuple(vec![ColorValue::int(0); cells]));
    CommSpaceNet::new(net, spaces).map_err(|e| invalid("net", e.to_string()))
}

/// Hits over actions, per repetition, read from the score place.
pub fn accuracy(config: &LamConfig, net: &Net, m: &Marking) -> Vec<f64> {
    let hit = net.sym("Outcome", "hit");
    let per = config.actions_per_repetition() as f64;
    (0..config.repetitions)
        .map(|r| {
            let tok = ColorValue::tuple([ColorValue::int(i64::from(r)), hit.clone()]);
            f64::from(m.count_value(SCORE, &tok)) / per
        })
        .collect()
}

/// The single model token of a marking.
pub fn model_of(config: &LamConfig, m: &Marking) -> Option<LamModel> {
    let ms = m.get(MODEL)?;
    let tokens = ms.sorted();
    match tokens.as_slice() {
        [only] => LamModel::from_token(config, only),
        _ => None,
    }
}

pub fn run_lam(csnet: &CommSpaceNet, config: &LamConfig, policy: FiringPolicy, seed: u64) -> ScenarioReport {
    let bound = 8 * config.script().len() + 8;
    let trace = run(&csnet.net, policy, seed, bound);
    ScenarioReport {
        scenario: "lam".into(),
        seed,
        policy: policy.as_str().into(),
        steps: trace.len(),
        terminal: trace.terminal.as_str().into(),
        tasks_assigned: 0,
        approvals_requested: 0,
        approvals_granted: 0,
        approvals_denied: 0,
        prediction_accuracy: accuracy(config, &csnet.net, &trace.final_marking),
        events: Vec::new(),
        trace,
    }
}
