//! Drone swarm with a planning stub and human sign-off.
//!
//! Token flow, per drone `d` and task `t`:
//!
//! ```text
//! drone_sensor(d) -emit_telemetry-> telemetry(d) -parse_telemetry-> drone_ready(d)
//! drone_ready(d) + task_pool(t) + llm_proposals(d,t) -llm_plan-> proposal(d,t)
//!   mas:        proposal(d,t) -assign_direct-> assigned(d,t)
//!   centaurian: proposal(d,t) -route_for_review-> plan_pending(d,t) + approval_request(d,t)
//!               approval_request(d,t) + human_policy(approve) -approve-> approval(t)
//!               approval_request(d,t) + plan_pending(d,t) + human_policy(deny) -deny->
//!                   drone_ready(d) + abandoned(t)
//!               plan_pending(d,t) + approval(t) -assign_task-> assigned(d,t)
//! ```
//!
//! `llm_proposals` holds the planner's table, recomputed by the runner when
//! an obstacle appears. `coupling_mode` holds the current mode, swapped by
//! the runner according to the schedule.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::human::{GateArbiter, HumanDecider, HumanGate, HumanPolicy};
use super::{ConfigError, ScenarioError, ScenarioReport};
use crate::color::{ColorSet, ColorValue};
use crate::engine::{enabled_transitions, fire, rng_from_seed, Arbiter, FiringPolicy, Terminal, Trace, TraceStep};
use crate::marking::Marking;
use crate::net::{ArcExpr, ArcPattern, CmpOp, Guard, Net, Operand, Transition};
use crate::space::{CommSpaceNet, SpaceAssignment, SpaceKind};

pub const DRONE_SENSOR: &str = "drone_sensor";
pub const TELEMETRY: &str = "telemetry";
pub const DRONE_READY: &str = "drone_ready";
pub const TASK_POOL: &str = "task_pool";
pub const LLM_PROPOSALS: &str = "llm_proposals";
pub const PROPOSAL: &str = "proposal";
pub const PLAN_PENDING: &str = "plan_pending";
pub const APPROVAL_REQUEST: &str = "approval_request";
pub const HUMAN_POLICY: &str = "human_policy";
pub const APPROVAL: &str = "approval";
pub const COUPLING_MODE: &str = "coupling_mode";
pub const ASSIGNED: &str = "assigned";
pub const ABANDONED: &str = "abandoned";

pub const ASSIGN_GATE: &str = "assign_task";
pub const ASSIGN_DIRECT: &str = "assign_direct";
pub const ROUTE: &str = "route_for_review";
pub const APPROVE: &str = "approve";
pub const DENY: &str = "deny";

/// Upper bound on firings in one scenario run.
pub const STEP_CAP: usize = 100_000;

pub type Cell = [i64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingMode {
    Mas,
    Centaurian,
}

impl CouplingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CouplingMode::Mas => "mas",
            CouplingMode::Centaurian => "centaurian",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub id: String,
    pub cell: Cell,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub step: usize,
    pub cell: Cell,
}

/// `mode` applies to firing indices in `from..to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModePhase {
    pub from: usize,
    pub to: usize,
    pub mode: CouplingMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwarmConfig {
    /// Width and height in cells.
    pub grid: [i64; 2],
    pub drones: u32,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    pub human_policy: HumanPolicy,
    #[serde(default)]
    pub seed: u64,
    /// Steps not covered by any phase run in MAS mode.
    #[serde(default)]
    pub mode_schedule: Vec<ModePhase>,
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidConfig {
        field: field.into(),
        reason: reason.into(),
    }
}

impl SwarmConfig {
    /// A square grid with every step in one mode.
    pub fn simple(size: i64, drones: u32, tasks: &[(&str, Cell)], policy: HumanPolicy, mode: CouplingMode) -> Self {
        SwarmConfig {
            grid: [size, size],
            drones,
            tasks: tasks
                .iter()
                .map(|(id, cell)| TaskSpec {
                    id: (*id).into(),
                    cell: *cell,
                })
                .collect(),
            obstacles: Vec::new(),
            human_policy: policy,
            seed: 0,
            mode_schedule: vec![ModePhase {
                from: 0,
                to: usize::MAX,
                mode,
            }],
        }
    }

    pub fn mode_at(&self, step: usize) -> CouplingMode {
        self.mode_schedule
            .iter()
            .find(|p| p.from <= step && step < p.to)
            .map_or(CouplingMode::Mas, |p| p.mode)
    }

    fn in_grid(&self, c: Cell) -> bool {
        (0..self.grid[0]).contains(&c[0]) && (0..self.grid[1]).contains(&c[1])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid[0] < 1 || self.grid[1] < 1 {
            return Err(invalid("grid", "width and height must be at least 1"));
        }
        if self.drones < 1 {
            return Err(invalid("drones", "at least one drone is required"));
        }
        let mut ids = BTreeSet::new();
        for t in &self.tasks {
            if t.id.is_empty() || !ids.insert(t.id.as_str()) {
                return Err(invalid("tasks", format!("task id {:?} is empty or repeated", t.id)));
            }
            if !self.in_grid(t.cell) {
                return Err(invalid(
                    "tasks",
                    format!("task {} cell {:?} is outside the grid", t.id, t.cell),
                ));
            }
        }
        for o in &self.obstacles {
            if !self.in_grid(o.cell) {
                return Err(invalid("obstacles", format!("cell {:?} is outside the grid", o.cell)));
            }
        }
        for p in &self.mode_schedule {
            if p.from >= p.to {
                return Err(invalid("mode_schedule", format!("empty range {}..{}", p.from, p.to)));
            }
        }
        if let HumanPolicy::Script(ds) = &self.human_policy {
            let reviewed = self.mode_schedule.iter().any(|p| p.mode == CouplingMode::Centaurian);
            let needed = initial_plan(self).len();
            if reviewed && ds.len() < needed {
                return Err(invalid(
                    "human_policy",
                    format!(
                        "script has {} decisions, the first planning round alone makes {needed} requests",
                        ds.len()
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Task ids in token order.
    pub fn task_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.tasks.iter().map(|t| t.id.as_str()).collect();
        ids.sort_unstable();
        ids
    }

    pub fn drone_cell(&self, drone: u32) -> Cell {
        let d = i64::from(drone);
        [d % self.grid[0], (d / self.grid[0]) % self.grid[1]]
    }

    fn task_cells(&self) -> Vec<Cell> {
        let by_id: BTreeMap<&str, Cell> = self.tasks.iter().map(|t| (t.id.as_str(), t.cell)).collect();
        self.task_ids().iter().map(|id| by_id[id]).collect()
    }
}

/// What the planner sees: the grid, blocked cells, idle drones and
/// unassigned tasks with their cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    pub grid: [i64; 2],
    pub blocked: BTreeSet<Cell>,
    pub idle_drones: Vec<(u32, Cell)>,
    pub open_tasks: Vec<(u32, Cell)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Proposal {
    pub drone: u32,
    pub task: u32,
    pub distance: u32,
}

/// Shortest 4-neighbour path length avoiding blocked cells. With nothing
/// blocked this is the Manhattan distance.
pub fn grid_distance(grid: [i64; 2], blocked: &BTreeSet<Cell>, from: Cell, to: Cell) -> Option<u32> {
    if blocked.is_empty() {
        return Some(((from[0] - to[0]).abs() + (from[1] - to[1]).abs()) as u32);
    }
    if blocked.contains(&to) {
        return None;
    }
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([(from, 0u32)]);
    while let Some((c, d)) = queue.pop_front() {
        if c == to {
            return Some(d);
        }
        for [dx, dy] in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
            let n = [c[0] + dx, c[1] + dy];
            let inside = (0..grid[0]).contains(&n[0]) && (0..grid[1]).contains(&n[1]);
            if inside && !blocked.contains(&n) && seen.insert(n) {
                queue.push_back((n, d + 1));
            }
        }
    }
    None
}

/// Greedy nearest-idle-drone assignment: pairs are taken in order of
/// distance, then drone id, then task id, skipping used drones and tasks.
pub fn llm_stub_plan(world: &World) -> Vec<Proposal> {
    let mut pairs = Vec::new();
    for &(drone, dc) in &world.idle_drones {
        for &(task, tc) in &world.open_tasks {
            if let Some(distance) = grid_distance(world.grid, &world.blocked, dc, tc) {
                pairs.push((distance, drone, task));
            }
        }
    }
    pairs.sort_unstable();
    let mut used_d = BTreeSet::new();
    let mut used_t = BTreeSet::new();
    let mut out = Vec::new();
    for (distance, drone, task) in pairs {
        if !used_d.contains(&drone) && !used_t.contains(&task) {
            used_d.insert(drone);
            used_t.insert(task);
            out.push(Proposal { drone, task, distance });
        }
    }
    out
}

fn blocked_at(config: &SwarmConfig, step: usize) -> BTreeSet<Cell> {
    config
        .obstacles
        .iter()
        .filter(|o| o.step <= step)
        .map(|o| o.cell)
        .collect()
}

fn initial_plan(config: &SwarmConfig) -> Vec<Proposal> {
    let cells = config.task_cells();
    llm_stub_plan(&World {
        grid: config.grid,
        blocked: blocked_at(config, 0),
        idle_drones: (0..config.drones).map(|d| (d, config.drone_cell(d))).collect(),
        open_tasks: (0..cells.len() as u32).zip(cells).collect(),
    })
}

fn pair(d: &str, t: &str) -> ArcPattern {
    ArcPattern::Tuple(vec![ArcPattern::var(d), ArcPattern::var(t)])
}

fn pair_expr(d: &str, t: &str) -> ArcExpr {
    ArcExpr::Tuple(vec![ArcExpr::var(d), ArcExpr::var(t)])
}

/// The joint gate: one planning token and one approval token for the same
/// task produce an assignment.
pub fn build_assign_gate() -> Transition {
    Transition::new(ASSIGN_GATE)
        .named("satellite: assign task")
        .input(PLAN_PENDING, pair("d", "t"))
        .input(APPROVAL, ArcPattern::var("t2"))
        .output(ASSIGNED, pair_expr("d", "t"))
        .guard(Guard::var_eq("t", "t2"))
}

/// Space of every swarm transition. The same table holds for any drone
/// and task count.
pub const LAYER_TABLE: [(&str, SpaceKind); 8] = [
    ("emit_telemetry", SpaceKind::Surface),
    ("parse_telemetry", SpaceKind::Observation),
    ("llm_plan", SpaceKind::Computation),
    (ROUTE, SpaceKind::Observation),
    (APPROVE, SpaceKind::Observation),
    (DENY, SpaceKind::Observation),
    (ASSIGN_GATE, SpaceKind::Computation),
    (ASSIGN_DIRECT, SpaceKind::Computation),
];

fn proposal_token(p: &Proposal) -> ColorValue {
    ColorValue::tuple([ColorValue::int(i64::from(p.drone)), ColorValue::int(i64::from(p.task))])
}

pub fn build_swarm_net(config: &SwarmConfig) -> Result<CommSpaceNet, ConfigError> {
    use SpaceKind::*;
    config.validate()?;
    let n_tasks = config.tasks.len() as i64;
    let mut net = Net::new();
    net.colorset(ColorSet::int_range("Drone", 0, i64::from(config.drones) - 1))
        .colorset(ColorSet::int_range("Task", 0, (n_tasks - 1).max(0)))
        .colorset(ColorSet::product("Assignment", ["Drone", "Task"]))
        .colorset(ColorSet::enumeration("Decision", ["approve", "deny"]))
        .colorset(ColorSet::enumeration("Mode", ["mas", "centaurian"]));

    let mut spaces = SpaceAssignment::default();
    for (p, cs, s) in [
        (DRONE_SENSOR, "Drone", Surface),
        (TELEMETRY, "Drone", Surface),
        (HUMAN_POLICY, "Decision", Surface),
        (DRONE_READY, "Drone", Observation),
        (APPROVAL_REQUEST, "Assignment", Observation),
        (APPROVAL, "Task", Observation),
        (TASK_POOL, "Task", Computation),
        (LLM_PROPOSALS, "Assignment", Computation),
        (PROPOSAL, "Assignment", Computation),
        (PLAN_PENDING, "Assignment", Computation),
        (COUPLING_MODE, "Mode", Computation),
        (ASSIGNED, "Assignment", Computation),
        (ABANDONED, "Task", Computation),
    ] {
        net.place(p, cs);
        spaces.place(p, s);
    }

    let approve = net.sym("Decision", "approve");
    let deny = net.sym("Decision", "deny");
    let centaurian = net.sym("Mode", "centaurian");
    let mas = net.sym("Mode", "mas");
    let is = |v: &str, lit: &ColorValue| Guard::cmp(CmpOp::Eq, Operand::Var(v.into()), Operand::Lit(lit.clone()));

    let transitions = [
        Transition::new("emit_telemetry")
            .named("drone: emit telemetry")
            .input(DRONE_SENSOR, ArcPattern::var("d"))
            .output(TELEMETRY, ArcExpr::var("d")),
        Transition::new("parse_telemetry")
            .named("parse telemetry into a ready status")
            .input(TELEMETRY, ArcPattern::var("d"))
            .output(DRONE_READY, ArcExpr::var("d")),
        Transition::new("llm_plan")
            .named("llm: propose assignment")
            .input(DRONE_READY, ArcPattern::var("d"))
            .input(TASK_POOL, ArcPattern::var("t"))
            .input(LLM_PROPOSALS, pair("d", "t"))
            .output(PROPOSAL, pair_expr("d", "t")),
        Transition::new(ROUTE)
            .named("route proposal to the operator")
            .input(PROPOSAL, pair("d", "t"))
            .input(COUPLING_MODE, ArcPattern::var("m"))
            .output(PLAN_PENDING, pair_expr("d", "t"))
            .output(APPROVAL_REQUEST, pair_expr("d", "t"))
            .output(COUPLING_MODE, ArcExpr::var("m"))
            .guard(is("m", &centaurian)),
        Transition::new(APPROVE)
            .named("human: approve")
            .input(APPROVAL_REQUEST, pair("d", "t"))
            .input(HUMAN_POLICY, ArcPattern::var("h"))
            .output(APPROVAL, ArcExpr::var("t"))
            .output(HUMAN_POLICY, ArcExpr::var("h"))
            .guard(is("h", &approve)),
        Transition::new(DENY)
            .named("human: deny")
            .input(APPROVAL_REQUEST, pair("d", "t"))
            .input(PLAN_PENDING, pair("d", "t"))
            .input(HUMAN_POLICY, ArcPattern::var("h"))
            .output(DRONE_READY, ArcExpr::var("d"))
            .output(ABANDONED, ArcExpr::var("t"))
            .output(HUMAN_POLICY, ArcExpr::var("h"))
            .guard(is("h", &deny)),
        build_assign_gate(),
        Transition::new(ASSIGN_DIRECT)
            .named("satellite: assign task autonomously")
            .input(PROPOSAL, pair("d", "t"))
            .input(COUPLING_MODE, ArcPattern::var("m"))
            .output(ASSIGNED, pair_expr("d", "t"))
            .output(COUPLING_MODE, ArcExpr::var("m"))
            .guard(is("m", &mas)),
    ];
    for t in transitions {
        net.add_transition(t);
    }
    for (t, s) in LAYER_TABLE {
        spaces.transition(t, s);
    }

    for d in 0..config.drones {
        net.token(DRONE_SENSOR, ColorValue::int(i64::from(d)));
    }
    for t in 0..n_tasks {
        net.token(TASK_POOL, ColorValue::int(t));
    }
    for p in initial_plan(config) {
        net.token(LLM_PROPOSALS, proposal_token(&p));
    }
    match config.human_policy {
        HumanPolicy::ApproveAll => {
            net.token(HUMAN_POLICY, approve);
        }
        HumanPolicy::DenyAll => {
            net.token(HUMAN_POLICY, deny);
        }
        HumanPolicy::Script(_) | HumanPolicy::Interactive => {
            net.token(HUMAN_POLICY, approve).token(HUMAN_POLICY, deny);
        }
    }
    let mode = net.sym("Mode", config.mode_at(0).as_str());
    net.token(COUPLING_MODE, mode);
    CommSpaceNet::new(net, spaces).map_err(|e| invalid("net", e.to_string()))
}

/// The gate pair that carries human decisions in the swarm net.
pub fn swarm_gates() -> Vec<HumanGate> {
    vec![HumanGate {
        approve: APPROVE.into(),
        deny: DENY.into(),
        var: "h".into(),
    }]
}

fn ints(m: &Marking, place: &str) -> Vec<u32> {
    m.get(place)
        .map(|ms| {
            ms.entries()
                .flat_map(|(v, n)| std::iter::repeat_n(v.as_int().unwrap_or(0) as u32, n as usize))
                .collect()
        })
        .unwrap_or_default()
}

/// Apply an obstacle: recompute the planner table from the idle drones and
/// unassigned tasks. Abandoned tasks rejoin the pool for the new round.
fn replan(config: &SwarmConfig, m: &mut Marking, blocked: &BTreeSet<Cell>) -> usize {
    for t in ints(m, ABANDONED) {
        m.remove(ABANDONED, &ColorValue::int(i64::from(t)), 1);
        m.add_token(TASK_POOL, ColorValue::int(i64::from(t)));
    }
    m.retain(|p| p != LLM_PROPOSALS);
    let mut idle: Vec<u32> = [DRONE_SENSOR, TELEMETRY, DRONE_READY]
        .iter()
        .flat_map(|p| ints(m, p))
        .collect();
    idle.sort_unstable();
    let cells = config.task_cells();
    let world = World {
        grid: config.grid,
        blocked: blocked.clone(),
        idle_drones: idle.iter().map(|&d| (d, config.drone_cell(d))).collect(),
        open_tasks: ints(m, TASK_POOL).into_iter().map(|t| (t, cells[t as usize])).collect(),
    };
    let plan = llm_stub_plan(&world);
    for p in &plan {
        m.add_token(LLM_PROPOSALS, proposal_token(p));
    }
    plan.len()
}

/// Mode switches and obstacles still to come.
struct Schedule<'c> {
    switches: VecDeque<usize>,
    pending: VecDeque<&'c Obstacle>,
    blocked: BTreeSet<Cell>,
    mode: CouplingMode,
}

impl<'c> Schedule<'c> {
    fn new(config: &'c SwarmConfig) -> Self {
        let mut pending: Vec<&Obstacle> = config.obstacles.iter().filter(|o| o.step > 0).collect();
        pending.sort_by_key(|o| o.step);
        let switches: BTreeSet<usize> = config
            .mode_schedule
            .iter()
            .flat_map(|p| [p.from, p.to])
            .filter(|&s| s > 0 && s != usize::MAX)
            .collect();
        Schedule {
            switches: switches.into_iter().collect(),
            pending: pending.into(),
            blocked: blocked_at(config, 0),
            mode: config.mode_at(0),
        }
    }

    fn next_change(&self) -> Option<usize> {
        [self.switches.front().copied(), self.pending.front().map(|o| o.step)]
            .into_iter()
            .flatten()
            .min()
    }

    fn apply(&mut self, at: usize, config: &SwarmConfig, net: &Net, marking: &mut Marking, events: &mut Vec<String>) {
        while self.switches.front().is_some_and(|&s| s <= at) {
            self.switches.pop_front();
            let now = config.mode_at(at);
            if now != self.mode {
                self.mode = now;
                marking.retain(|p| p != COUPLING_MODE);
                marking.add_token(COUPLING_MODE, net.sym("Mode", now.as_str()));
                events.push(format!("step {at}: mode {}", now.as_str()));
            }
        }
        let mut changed = false;
        while self.pending.front().is_some_and(|o| o.step <= at) {
            let o = self.pending.pop_front().expect("checked");
            changed |= self.blocked.insert(o.cell);
        }
        if changed {
            let n = replan(config, marking, &self.blocked);
            events.push(format!("step {at}: obstacles {:?}, {n} new proposals", self.blocked));
        }
    }
}

/// Run the swarm net, applying mode switches and obstacles at their step
/// indices. When nothing is enabled but scheduled changes remain, the next
/// one is applied immediately.
pub fn run_swarm(
    csnet: &CommSpaceNet,
    config: &SwarmConfig,
    policy: FiringPolicy,
    seed: u64,
    decider: &mut HumanDecider<'_>,
) -> Result<ScenarioReport, ScenarioError> {
    let net = &csnet.net;
    let gates = swarm_gates();
    let mut arbiter = GateArbiter::new(&gates, decider);
    let mut rng = rng_from_seed(seed);
    let mut marking = net.initial.clone();
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut events = Vec::new();
    let mut schedule = Schedule::new(config);

    let terminal = loop {
        let at = steps.len();
        schedule.apply(at, config, net, &mut marking, &mut events);
        let mut enabled = enabled_transitions(net, &marking);
        while enabled.is_empty() {
            let Some(next) = schedule.next_change() else { break };
            schedule.apply(next, config, net, &mut marking, &mut events);
            enabled = enabled_transitions(net, &marking);
        }
        if enabled.is_empty() {
            break Terminal::Quiescent;
        }
        if at >= STEP_CAP {
            break Terminal::MaxSteps;
        }
        let chosen = enabled[policy.choose(enabled.len(), &mut rng)].clone();
        let ev = match arbiter.arbitrate(net, &marking, chosen, &enabled) {
            Ok(ev) => ev,
            Err(_) => break Terminal::Halted,
        };
        marking = fire(net, &marking, &ev.transition, &ev.binding).expect("enabled event fires");
        steps.push(TraceStep {
            index: at,
            transition: ev.transition,
            binding: ev.binding,
            digest: marking.digest(),
        });
    };
    if let Some(e) = arbiter.error.take() {
        return Err(ScenarioError::Human(e));
    }
    let trace = Trace {
        seed,
        policy,
        steps,
        terminal,
        final_marking: marking,
    };
    Ok(ScenarioReport {
        scenario: "swarm".into(),
        seed,
        policy: policy.as_str().into(),
        steps: trace.len(),
        terminal: terminal.as_str().into(),
        tasks_assigned: trace.final_marking.count(ASSIGNED),
        approvals_requested: trace.count(ROUTE),
        approvals_granted: trace.count(APPROVE),
        approvals_denied: trace.count(DENY),
        prediction_accuracy: Vec::new(),
        events,
        trace,
    })
}
