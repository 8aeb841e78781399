//! The `csnet` command line. Every command takes its standard streams as
//! arguments and returns the process exit code, so it runs in-process too.
//!
//! Exit codes: 0 success, 1 check or validation failure, 2 parse or usage
//! error, 3 interactive input closed, 4 graph truncated before a check
//! could be decided.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{
    check_boundedness, dead_transitions, explore, find_deadlocks, to_dot, verify_edge_property, AnalysisVerdict,
    CounterExample, Limits, Outcome, ReachabilityGraph,
};
use crate::engine::{run_with, Event, FiringPolicy, PolicyOnly};
use crate::format::netfile::{load, net_digest, Loaded, NetFile};
use crate::format::trace::write_trace;
use crate::net::Net;
use crate::scenarios::human::{GateArbiter, HumanDecider, HumanError, HumanPolicy};
use crate::scenarios::{run_scenario, ScenarioConfig, ScenarioError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_TRUNCATED: i32 = 4;

/// Standard streams of one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    LexicographicFirst,
    SeededUniformRandom,
}

impl From<PolicyArg> for FiringPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::LexicographicFirst => FiringPolicy::LexicographicFirst,
            PolicyArg::SeededUniformRandom => FiringPolicy::SeededUniformRandom,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    Swarm,
    Lam,
}

#[derive(Debug, Parser)]
#[command(
    name = "csnet",
    version,
    about = "Validate, run and analyze communication-space nets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a net file and list every violation.
    Validate { path: PathBuf },
    /// Simulate a net and write a trace.
    Run {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "seeded-uniform-random")]
        policy: PolicyArg,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        /// Where to write the JSON Lines trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Ask on standard input at every human gate of the net file.
        #[arg(long)]
        interactive: bool,
    },
    /// Build the reachability graph and run checks on it.
    Analyze {
        path: PathBuf,
        /// bounded:K, live, deadlock or gate:TRANSITION:PLACE. Repeatable.
        #[arg(long = "check")]
        checks: Vec<String>,
        #[arg(long, default_value_t = 100_000)]
        max_nodes: usize,
        /// Where to write the graph in DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Build and run one of the stock scenarios.
    Scenario {
        name: ScenarioName,
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the seed in the config, which defaults to 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

/// Parse `args` (including the program name) and dispatch.
pub fn main_with<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(io.stderr, "{text}");
                EXIT_PARSE
            } else {
                let _ = write!(io.stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match cli.command {
        Command::Validate { path } => cmd_validate(&path, io),
        Command::Run {
            path,
            seed,
            policy,
            max_steps,
            trace,
            interactive,
        } => cmd_run(&path, seed, policy.into(), max_steps, trace.as_deref(), interactive, io),
        Command::Analyze {
            path,
            checks,
            max_nodes,
            dot,
        } => cmd_analyze(&path, &checks, max_nodes, dot.as_deref(), io),
        Command::Scenario {
            name,
            config,
            seed,
            report,
        } => cmd_scenario(name, &config, seed, report.as_deref(), io),
    }
}

fn read(path: &Path, io: &mut Io<'_>) -> Option<String> {
    match fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let _ = writeln!(io.stderr, "error: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn write_file(path: &Path, text: &[u8], io: &mut Io<'_>) -> bool {
    match fs::write(path, text) {
        Ok(()) => true,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: cannot write {}: {e}", path.display());
            false
        }
    }
}

/// Read, parse and validate. `Err` carries the exit code.
fn load_valid(path: &Path, io: &mut Io<'_>) -> Result<Loaded, i32> {
    let src = read(path, io).ok_or(EXIT_PARSE)?;
    let loaded = load(&src).map_err(|e| {
        let _ = writeln!(io.stderr, "error: {}: {e}", path.display());
        EXIT_PARSE
    })?;
    let v = loaded.violations();
    if !v.is_empty() {
        for x in &v {
            let _ = writeln!(io.stderr, "{x}");
        }
        return Err(EXIT_FAIL);
    }
    Ok(loaded)
}

pub fn cmd_validate(path: &Path, io: &mut Io<'_>) -> i32 {
    let Some(src) = read(path, io) else { return EXIT_PARSE };
    let loaded = match load(&src) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {}: {e}", path.display());
            return EXIT_PARSE;
        }
    };
    let v = loaded.violations();
    if v.is_empty() {
        let _ = writeln!(io.stdout, "OK");
        EXIT_OK
    } else {
        for x in &v {
            let _ = writeln!(io.stdout, "{x}");
        }
        EXIT_FAIL
    }
}

pub fn cmd_run(
    path: &Path,
    seed: u64,
    policy: FiringPolicy,
    max_steps: usize,
    trace_out: Option<&Path>,
    interactive: bool,
    io: &mut Io<'_>,
) -> i32 {
    let loaded = match load_valid(path, io) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let net = &loaded.csnet.net;
    let (trace, halt) = if interactive {
        let (out, err) = {
            let mut decider = HumanDecider::new(HumanPolicy::Interactive).with_channel(&mut *io.stdin, &mut *io.stderr);
            let mut arbiter = GateArbiter::new(&loaded.human_gates, &mut decider);
            let out = run_with(net, net.initial.clone(), policy, seed, max_steps, &mut arbiter);
            (out, arbiter.error.take())
        };
        if let Some(e) = err {
            let _ = writeln!(io.stderr, "error: {e}");
            return match e {
                HumanError::InputClosed | HumanError::Io(_) => EXIT_INPUT,
                _ => EXIT_FAIL,
            };
        }
        out
    } else {
        run_with(net, net.initial.clone(), policy, seed, max_steps, &mut PolicyOnly)
    };
    if let Some(msg) = halt {
        let _ = writeln!(io.stderr, "error: run halted: {msg}");
        return EXIT_FAIL;
    }
    if let Some(out) = trace_out {
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace, &net_digest(&loaded.csnet)).expect("writing to memory");
        if !write_file(out, &buf, io) {
            return EXIT_FAIL;
        }
    }
    let _ = writeln!(
        io.stdout,
        "steps={} terminal={} marking={}",
        trace.len(),
        trace.terminal.as_str(),
        trace.final_marking.digest()
    );
    EXIT_OK
}

pub fn format_event(ev: &Event) -> String {
    let b: Vec<String> = ev.binding.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{}{{{}}}", ev.transition, b.join(", "))
}

fn format_path(c: &CounterExample) -> String {
    if c.path.is_empty() {
        "(initial marking)".into()
    } else {
        c.path.iter().map(format_event).collect::<Vec<_>>().join(" -> ")
    }
}

/// One parsed `--check` argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Bounded(usize),
    Live,
    Deadlock,
    /// Every firing of the transition starts from a marking where the
    /// place is non-empty.
    Gate {
        transition: String,
        place: String,
    },
}

impl Check {
    pub fn parse(s: &str) -> Result<Check, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["bounded", k] => k.parse().map(Check::Bounded).map_err(|_| format!("bad bound in {s:?}")),
            ["live"] => Ok(Check::Live),
            ["deadlock"] => Ok(Check::Deadlock),
            ["gate", t, p] if !t.is_empty() && !p.is_empty() => Ok(Check::Gate {
                transition: (*t).into(),
                place: (*p).into(),
            }),
            _ => Err(format!("unknown check {s:?}")),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Check::Bounded(k) => format!("bounded:{k}"),
            Check::Live => "live".into(),
            Check::Deadlock => "deadlock".into(),
            Check::Gate { transition, place } => format!("gate:{transition}:{place}"),
        }
    }
}

/// Evaluate one check. The extra lines explain failures.
pub fn evaluate(check: &Check, g: &ReachabilityGraph, net: &Net) -> (Outcome, Vec<String>) {
    match check {
        Check::Bounded(k) => {
            let AnalysisVerdict { outcome, .. } = check_boundedness(g, *k);
            let notes = match &outcome {
                Outcome::Fails(c) => vec![format!("path: {}", format_path(c))],
                _ => vec![],
            };
            (outcome, notes)
        }
        Check::Live => match dead_transitions(g, net) {
            Err(_) => (Outcome::UnknownTruncated, vec![]),
            Ok(dead) if dead.is_empty() => (Outcome::Holds, vec![]),
            Ok(dead) => {
                let root = CounterExample {
                    path: vec![],
                    target: g.root().clone(),
                };
                (
                    Outcome::Fails(root),
                    dead.iter().map(|t| format!("dead: {t}")).collect(),
                )
            }
        },
        Check::Deadlock => {
            let found = (0..g.node_count()).find(|&i| g.is_terminal(i));
            match found {
                Some(i) => {
                    let c = CounterExample {
                        path: g.path_to(i),
                        target: g.digest(i).clone(),
                    };
                    let notes = vec![
                        format!("terminal markings: {}", find_deadlocks(g).len()),
                        format!("path: {}", format_path(&c)),
                    ];
                    (Outcome::Fails(c), notes)
                }
                None if g.truncated => (Outcome::UnknownTruncated, vec![]),
                None => (Outcome::Holds, vec![]),
            }
        }
        Check::Gate { transition, place } => {
            if net.transition(transition).is_none() || !net.places.contains_key(place) {
                let root = CounterExample {
                    path: vec![],
                    target: g.root().clone(),
                };
                return (
                    Outcome::Fails(root),
                    vec![format!("unknown transition or place in {}", check.name())],
                );
            }
            match verify_edge_property(g, transition, |m| m.count(place) > 0) {
                Err(_) => (Outcome::UnknownTruncated, vec![]),
                Ok(v) => {
                    let notes = match &v.outcome {
                        Outcome::Fails(c) => vec![format!("path: {}", format_path(c))],
                        _ => vec![],
                    };
                    (v.outcome, notes)
                }
            }
        }
    }
}

pub fn cmd_analyze(path: &Path, checks: &[String], max_nodes: usize, dot: Option<&Path>, io: &mut Io<'_>) -> i32 {
    let parsed: Result<Vec<Check>, String> = checks.iter().map(|c| Check::parse(c)).collect();
    let parsed = match parsed {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            return EXIT_PARSE;
        }
    };
    let loaded = match load_valid(path, io) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let net = &loaded.csnet.net;
    let g = explore(
        net,
        Limits {
            max_nodes,
            ..Limits::default()
        },
    );
    let _ = writeln!(
        io.stdout,
        "nodes={} edges={} truncated={}",
        g.node_count(),
        g.edges.len(),
        g.truncated
    );
    if let Some(out) = dot {
        if !write_file(out, to_dot(&g, net).as_bytes(), io) {
            return EXIT_FAIL;
        }
    }
    let mut failed = false;
    let mut unknown = false;
    for c in &parsed {
        let (outcome, notes) = evaluate(c, &g, net);
        let word = match outcome {
            Outcome::Holds => "PASS",
            Outcome::Fails(_) => {
                failed = true;
                "FAIL"
            }
            Outcome::UnknownTruncated => {
                unknown = true;
                "UNKNOWN"
            }
        };
        let _ = writeln!(io.stdout, "{word} {}", c.name());
        for n in notes {
            let _ = writeln!(io.stdout, "  {n}");
        }
    }
    if unknown {
        EXIT_TRUNCATED
    } else if failed {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

/// Accepts a scenario config on its own, wrapped as `{"swarm": {...}}`, or
/// as the `scenario` section of a net file.
pub fn read_scenario_config(name: ScenarioName, src: &str) -> Result<ScenarioConfig, String> {
    let value: serde_json::Value = serde_json::from_str(src).map_err(|e| e.to_string())?;
    let config = if value.get("version").is_some() {
        NetFile::parse(src)
            .map_err(|e| e.to_string())?
            .scenario
            .ok_or("net file has no scenario section")?
    } else if value.get("swarm").is_some() || value.get("lam").is_some() {
        serde_json::from_value(value).map_err(|e| e.to_string())?
    } else {
        match name {
            ScenarioName::Swarm => ScenarioConfig::Swarm(serde_json::from_value(value).map_err(|e| e.to_string())?),
            ScenarioName::Lam => ScenarioConfig::Lam(serde_json::from_value(value).map_err(|e| e.to_string())?),
        }
    };
    Ok(config)
}

pub fn cmd_scenario(
    name: ScenarioName,
    config_path: &Path,
    seed: Option<u64>,
    report: Option<&Path>,
    io: &mut Io<'_>,
) -> i32 {
    let Some(src) = read(config_path, io) else {
        return EXIT_PARSE;
    };
    let config = match read_scenario_config(name, &src) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {}: {e}", config_path.display());
            return EXIT_PARSE;
        }
    };
    let wanted = match name {
        ScenarioName::Swarm => "swarm",
        ScenarioName::Lam => "lam",
    };
    if config.name() != wanted {
        let _ = writeln!(io.stderr, "error: config is a {} scenario, not {wanted}", config.name());
        return EXIT_FAIL;
    }
    let csnet = match config.build() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            return EXIT_FAIL;
        }
    };
    let (seed, policy) = match &config {
        ScenarioConfig::Swarm(c) => (seed.unwrap_or(c.seed), c.human_policy.clone()),
        ScenarioConfig::Lam(_) => (seed.unwrap_or(0), HumanPolicy::ApproveAll),
    };
    let result = {
        let mut decider = HumanDecider::new(policy).with_channel(&mut *io.stdin, &mut *io.stderr);
        run_scenario(&csnet, &config, FiringPolicy::SeededUniformRandom, seed, &mut decider)
    };
    let r = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            return match e {
                ScenarioError::Human(HumanError::InputClosed | HumanError::Io(_)) => EXIT_INPUT,
                _ => EXIT_FAIL,
            };
        }
    };
    if let Some(out) = report {
        if !write_file(out, r.to_json().as_bytes(), io) {
            return EXIT_FAIL;
        }
    }
    let _ = writeln!(io.stdout, "{}", r.headline());
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_syntax() {
        assert_eq!(Check::parse("bounded:3"), Ok(Check::Bounded(3)));
        assert_eq!(Check::parse("live"), Ok(Check::Live));
        assert_eq!(
            Check::parse("gate:assign_task:approval"),
            Ok(Check::Gate {
                transition: "assign_task".into(),
                place: "approval".into()
            })
        );
        assert!(Check::parse("bounded:x").is_err());
        assert!(Check::parse("gate:t").is_err());
        assert!(Check::parse("safety").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        let mut input: &[u8] = b"";
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut io = Io {
            stdin: &mut input,
            stdout: &mut out,
            stderr: &mut err,
        };
        assert_eq!(main_with(["csnet", "frobnicate"], &mut io), EXIT_PARSE);
        assert_eq!(main_with(["csnet", "--help"], &mut io), EXIT_OK);
        assert!(String::from_utf8_lossy(&out).contains("validate"));
    }
}
