//! Explicit state-space construction and the checks run over it:
//! k-boundedness, dead transitions, terminal markings and gate properties
//! on transition edges.

use std::fmt::Write as _;

use indexmap::IndexMap;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{enabled_transitions, fire, EngineError, Event};
use crate::marking::{Digest256, Marking};
use crate::net::Net;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: usize,
    /// Successors with more tokens than this in a single place are cut off.
    pub max_tokens_per_place: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: 100_000,
            max_tokens_per_place: 1_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub event: Event,
    pub target: usize,
}

/// Reachability graph. Nodes are kept in breadth-first discovery order and
/// keyed by the digest of their canonical marking; node 0 is the root.
#[derive(Clone, Debug)]
pub struct ReachabilityGraph {
    pub nodes: IndexMap<Digest256, Marking>,
    pub edges: Vec<Edge>,
    pub truncated: bool,
    pub limits: Limits,
    /// Edge through which each node was first reached (`None` for the root).
    parent: Vec<Option<usize>>,
    /// Whether each node has no enabled event at all.
    terminal: Vec<bool>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("the reachability graph is truncated; the verdict needs a complete graph")]
    TruncatedGraph,
}

impl ReachabilityGraph {
    pub fn root(&self) -> &Digest256 {
        self.nodes.get_index(0).expect("root always present").0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn digest(&self, node: usize) -> &Digest256 {
        self.nodes.get_index(node).expect("node index in range").0
    }

    pub fn marking(&self, node: usize) -> &Marking {
        self.nodes.get_index(node).expect("node index in range").1
    }

    pub fn index_of(&self, digest: &str) -> Option<usize> {
        self.nodes.get_index_of(digest)
    }

    /// Events along the breadth-first tree from the root to `node`.
    pub fn path_to(&self, node: usize) -> Vec<Event> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some(e) = self.parent[cur] {
            path.push(self.edges[e].event.clone());
            cur = self.edges[e].source;
        }
        path.reverse();
        path
    }

    pub fn is_terminal(&self, node: usize) -> bool {
        self.terminal[node]
    }

    fn require_complete(&self) -> Result<(), AnalysisError> {
        if self.truncated {
            Err(AnalysisError::TruncatedGraph)
        } else {
            Ok(())
        }
    }
}

/// Breadth-first closure of `fire` from the initial marking.
///
/// Each frontier level is expanded in parallel on the current rayon pool and
/// merged sequentially in frontier order, so node and edge order do not
/// depend on the number of threads.
pub fn explore(net: &Net, limits: Limits) -> ReachabilityGraph {
    let root = net.initial.clone();
    let mut g = ReachabilityGraph {
        nodes: IndexMap::new(),
        edges: Vec::new(),
        truncated: false,
        limits,
        parent: vec![None],
        terminal: Vec::new(),
    };
    g.nodes.insert(root.digest(), root);
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let expanded: Vec<Vec<(Event, Marking, Digest256)>> = frontier
            .par_iter()
            .map(|&i| {
                let m = g.marking(i);
                enabled_transitions(net, m)
                    .into_iter()
                    .map(|ev| {
                        let next = fire(net, m, &ev.transition, &ev.binding).expect("enabled event must fire");
                        let d = next.digest();
                        (ev, next, d)
                    })
                    .collect()
            })
            .collect();
        let mut next_frontier = Vec::new();
        for (&src, succs) in frontier.iter().zip(expanded) {
            g.terminal.resize(g.terminal.len().max(src + 1), false);
            g.terminal[src] = succs.is_empty();
            for (event, marking, digest) in succs {
                let target = match g.nodes.get_index_of(&digest) {
                    Some(t) => t,
                    None => {
                        let too_full = marking.places().any(|(_, ms)| ms.len() > limits.max_tokens_per_place);
                        if too_full || g.nodes.len() >= limits.max_nodes {
                            g.truncated = true;
                            continue;
                        }
                        g.nodes.insert(digest, marking);
                        g.parent.push(Some(g.edges.len()));
                        next_frontier.push(g.nodes.len() - 1);
                        g.nodes.len() - 1
                    }
                };
                g.edges.push(Edge {
                    source: src,
                    event,
                    target,
                });
            }
        }
        frontier = next_frontier;
    }
    g.terminal.resize(g.nodes.len(), false);
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterExample {
    /// Firing sequence from the initial marking.
    pub path: Vec<Event>,
    /// Digest of the marking the path ends in.
    pub target: Digest256,
}

impl CounterExample {
    /// Re-fire the path from the initial marking.
    pub fn replay(&self, net: &Net) -> Result<Marking, EngineError> {
        let mut m = net.initial.clone();
        for ev in &self.path {
            m = fire(net, &m, &ev.transition, &ev.binding)?;
        }
        Ok(m)
    }

    pub fn replays(&self, net: &Net) -> bool {
        self.replay(net).is_ok_and(|m| m.digest() == self.target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails(CounterExample),
    UnknownTruncated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisVerdict {
    pub property: String,
    pub outcome: Outcome,
}

impl AnalysisVerdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

fn counterexample_to(g: &ReachabilityGraph, node: usize) -> CounterExample {
    CounterExample {
        path: g.path_to(node),
        target: g.digest(node).clone(),
    }
}

/// Holds iff no place ever holds more than `k` tokens.
pub fn check_boundedness(g: &ReachabilityGraph, k: usize) -> AnalysisVerdict {
    let property = format!("bounded:{k}");
    let violating = (0..g.node_count()).find(|&i| g.marking(i).places().any(|(_, ms)| ms.len() > k));
    let outcome = match violating {
        Some(i) => Outcome::Fails(counterexample_to(g, i)),
        None if g.truncated => Outcome::UnknownTruncated,
        None => Outcome::Holds,
    };
    AnalysisVerdict { property, outcome }
}

/// Transitions that label no edge of the complete graph.
pub fn dead_transitions(g: &ReachabilityGraph, net: &Net) -> Result<Vec<String>, AnalysisError> {
    g.require_complete()?;
    Ok(net
        .transitions
        .keys()
        .filter(|t| !g.edges.iter().any(|e| &e.event.transition == *t))
        .cloned()
        .collect())
}

/// Digests of markings in which nothing is enabled, in discovery order.
pub fn find_deadlocks(g: &ReachabilityGraph) -> Vec<Digest256> {
    (0..g.node_count())
        .filter(|&i| g.is_terminal(i))
        .map(|i| g.digest(i).clone())
        .collect()
}

/// Holds iff every edge labeled `transition` leaves a marking satisfying
/// `pred`. The counterexample ends just after the offending firing.
pub fn verify_edge_property(
    g: &ReachabilityGraph,
    transition: &str,
    pred: impl Fn(&Marking) -> bool,
) -> Result<AnalysisVerdict, AnalysisError> {
    g.require_complete()?;
    let property = format!("edge:{transition}");
    let bad = g
        .edges
        .iter()
        .find(|e| e.event.transition == transition && !pred(g.marking(e.source)));
    let outcome = match bad {
        None => Outcome::Holds,
        Some(e) => {
            let mut path = g.path_to(e.source);
            path.push(e.event.clone());
            Outcome::Fails(CounterExample {
                path,
                target: g.digest(e.target).clone(),
            })
        }
    };
    Ok(AnalysisVerdict { property, outcome })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering. Nodes are labeled with a digest prefix and the token
/// count of every non-empty place; edges with the transition name.
pub fn to_dot(g: &ReachabilityGraph, net: &Net) -> String {
    let mut out = String::from("digraph reachability {\n  node [shape=box];\n");
    for (i, (digest, m)) in g.nodes.iter().enumerate() {
        let counts: Vec<String> = m.places().map(|(p, ms)| format!("{p}={}", ms.len())).collect();
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\\n{}\"];",
            &digest[..12],
            dot_escape(&counts.join(" "))
        );
    }
    for e in &g.edges {
        let name = net
            .transition(&e.event.transition)
            .map_or(e.event.transition.as_str(), |t| t.name.as_str());
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{}\"];",
            e.source,
            e.target,
            dot_escape(name)
        );
    }
    out.push_str("}\n");
    out
}
