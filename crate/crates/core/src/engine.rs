//! Binding enumeration, firing, and seeded simulation runs.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::color::ColorValue;
use crate::marking::{Digest256, Marking};
use crate::net::{Binding, Net, Transition};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("unknown transition {0}")]
    UnknownTransition(String),
    #[error("transition {0} is not enabled under the given binding")]
    NotEnabled(String),
}

/// A transition occurrence: which transition, under which binding.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Event {
    pub transition: String,
    pub binding: Binding,
}

/// How one enabled event is picked when several compete.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FiringPolicy {
    LexicographicFirst,
    #[default]
    SeededUniformRandom,
}

impl FiringPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            FiringPolicy::LexicographicFirst => "lexicographic-first",
            FiringPolicy::SeededUniformRandom => "seeded-uniform-random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lexicographic-first" => Some(FiringPolicy::LexicographicFirst),
            "seeded-uniform-random" => Some(FiringPolicy::SeededUniformRandom),
            _ => None,
        }
    }

    /// Index of the chosen event among `n` candidates (n > 0).
    pub fn choose(self, n: usize, rng: &mut ChaCha8Rng) -> usize {
        match self {
            FiringPolicy::LexicographicFirst => 0,
            FiringPolicy::SeededUniformRandom => rng.gen_range(0..n),
        }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All bindings of `transition_id` enabled in `marking`, sorted.
pub fn enabled_bindings(net: &Net, marking: &Marking, transition_id: &str) -> Result<Vec<Binding>, EngineError> {
    let t = net
        .transition(transition_id)
        .ok_or_else(|| EngineError::UnknownTransition(transition_id.into()))?;
    Ok(bindings_of(t, marking))
}

fn bindings_of(t: &Transition, marking: &Marking) -> Vec<Binding> {
    let mut found = BTreeSet::new();
    let mut taken: Vec<(&str, &ColorValue)> = Vec::with_capacity(t.inputs.len());
    search(t, marking, 0, &mut Binding::new(), &mut taken, &mut found);
    found.into_iter().collect()
}

fn search<'a>(
    t: &'a Transition,
    marking: &'a Marking,
    arc: usize,
    binding: &mut Binding,
    taken: &mut Vec<(&'a str, &'a ColorValue)>,
    found: &mut BTreeSet<Binding>,
) {
    let Some(input) = t.inputs.get(arc) else {
        if t.guard.eval(binding) {
            found.insert(binding.clone());
        }
        return;
    };
    let place = input.place.as_str();
    let Some(tokens) = marking.get(place) else {
        return;
    };
    for (value, count) in tokens.entries() {
        let used = taken.iter().filter(|(p, v)| *p == place && *v == value).count() as u32;
        if used >= count {
            continue;
        }
        let mut extended = binding.clone();
        if !input.pattern.matches(value, &mut extended) {
            continue;
        }
        taken.push((place, value));
        search(t, marking, arc + 1, &mut extended, taken, found);
        taken.pop();
    }
}

/// Every enabled event, ordered by transition id and then binding.
pub fn enabled_transitions(net: &Net, marking: &Marking) -> Vec<Event> {
    net.transitions
        .values()
        .flat_map(|t| {
            bindings_of(t, marking).into_iter().map(|binding| Event {
                transition: t.id.clone(),
                binding,
            })
        })
        .collect()
}

/// Fire `transition_id` under `binding`, returning the successor marking.
/// The binding must be one of [`enabled_bindings`].
pub fn fire(net: &Net, marking: &Marking, transition_id: &str, binding: &Binding) -> Result<Marking, EngineError> {
    let t = net
        .transition(transition_id)
        .ok_or_else(|| EngineError::UnknownTransition(transition_id.into()))?;
    let not_enabled = || EngineError::NotEnabled(transition_id.into());
    if !binding.keys().cloned().eq(t.input_vars()) || !t.guard.eval(binding) {
        return Err(not_enabled());
    }
    let mut next = marking.clone();
    for a in &t.inputs {
        let v = a.pattern.instantiate(binding).ok_or_else(not_enabled)?;
        if !next.remove(&a.place, &v, 1) {
            return Err(not_enabled());
        }
    }
    for a in &t.outputs {
        let v = a.expr.eval(binding).ok_or_else(not_enabled)?;
        next.add_token(&a.place, v);
    }
    Ok(next)
}

/// Pick one enabled event per `policy` and fire it. `None` means quiescence.
pub fn step(net: &Net, marking: &Marking, policy: FiringPolicy, rng: &mut ChaCha8Rng) -> Option<(Event, Marking)> {
    let mut events = enabled_transitions(net, marking);
    if events.is_empty() {
        return None;
    }
    let ev = events.swap_remove(policy.choose(events.len(), rng));
    let next = fire(net, marking, &ev.transition, &ev.binding).expect("enabled event must fire");
    Some((ev, next))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    Quiescent,
    MaxSteps,
    Halted,
}

impl Terminal {
    pub fn as_str(self) -> &'static str {
        match self {
            Terminal::Quiescent => "quiescent",
            Terminal::MaxSteps => "max-steps",
            Terminal::Halted => "halted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub index: usize,
    pub transition: String,
    pub binding: Binding,
    pub digest: Digest256,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub seed: u64,
    pub policy: FiringPolicy,
    pub steps: Vec<TraceStep>,
    pub terminal: Terminal,
    pub final_marking: Marking,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn count(&self, transition: &str) -> usize {
        self.steps.iter().filter(|s| s.transition == transition).count()
    }
}

/// Hook consulted after the policy picks an event. It may substitute another
/// enabled event (for example a human decision) or stop the run.
pub trait Arbiter {
    fn arbitrate(&mut self, net: &Net, marking: &Marking, chosen: Event, enabled: &[Event]) -> Result<Event, String>;
}

/// Accepts whatever the policy picked.
pub struct PolicyOnly;

impl Arbiter for PolicyOnly {
    fn arbitrate(&mut self, _: &Net, _: &Marking, chosen: Event, _: &[Event]) -> Result<Event, String> {
        Ok(chosen)
    }
}

/// Run from the initial marking until quiescence or `max_steps` firings.
pub fn run(net: &Net, policy: FiringPolicy, seed: u64, max_steps: usize) -> Trace {
    run_with(net, net.initial.clone(), policy, seed, max_steps, &mut PolicyOnly).0
}

/// Like [`run`], from an explicit marking and with an [`Arbiter`]. Returns
/// the halt message when the arbiter stopped the run.
pub fn run_with(
    net: &Net,
    start: Marking,
    policy: FiringPolicy,
    seed: u64,
    max_steps: usize,
    arbiter: &mut dyn Arbiter,
) -> (Trace, Option<String>) {
    let mut rng = rng_from_seed(seed);
    let mut marking = start;
    let mut steps = Vec::new();
    let mut halt = None;
    let terminal = loop {
        let events = enabled_transitions(net, &marking);
        if events.is_empty() {
            break Terminal::Quiescent;
        }
        if steps.len() >= max_steps {
            break Terminal::MaxSteps;
        }
        let chosen = events[policy.choose(events.len(), &mut rng)].clone();
        let ev = match arbiter.arbitrate(net, &marking, chosen, &events) {
            Ok(ev) => ev,
            Err(msg) => {
                halt = Some(msg);
                break Terminal::Halted;
            }
        };
        marking = match fire(net, &marking, &ev.transition, &ev.binding) {
            Ok(m) => m,
            Err(e) => {
                halt = Some(e.to_string());
                break Terminal::Halted;
            }
        };
        steps.push(TraceStep {
            index: steps.len(),
            transition: ev.transition,
            binding: ev.binding,
            digest: marking.digest(),
        });
    };
    (
        Trace {
            seed,
            policy,
            steps,
            terminal,
            final_marking: marking,
        },
        halt,
    )
}
