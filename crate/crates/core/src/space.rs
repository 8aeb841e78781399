//! Surface / observation / computation layering of a net.
//!
//! Every place and every transition carries a space label. An arc may only
//! connect a transition to a place in the same or an adjacent space, and
//! surface and computation are not adjacent: data from the outside world
//! always passes through an observation step before it reaches computation.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{Net, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Surface,
    Observation,
    Computation,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 3] = [SpaceKind::Surface, SpaceKind::Observation, SpaceKind::Computation];

    /// Same space, or one step apart.
    pub fn reaches(self, other: SpaceKind) -> bool {
        !matches!(
            (self, other),
            (SpaceKind::Surface, SpaceKind::Computation) | (SpaceKind::Computation, SpaceKind::Surface)
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Surface => "surface",
            SpaceKind::Observation => "observation",
            SpaceKind::Computation => "computation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpaceAssignment {
    pub places: BTreeMap<String, SpaceKind>,
    pub transitions: BTreeMap<String, SpaceKind>,
}

impl SpaceAssignment {
    pub fn place(&mut self, id: &str, space: SpaceKind) -> &mut Self {
        self.places.insert(id.into(), space);
        self
    }

    pub fn transition(&mut self, id: &str, space: SpaceKind) -> &mut Self {
        self.transitions.insert(id.into(), space);
        self
    }

    /// Label every place and transition of `net` with `space`.
    pub fn uniform(net: &Net, space: SpaceKind) -> Self {
        SpaceAssignment {
            places: net.places.keys().map(|p| (p.clone(), space)).collect(),
            transitions: net.transitions.keys().map(|t| (t.clone(), space)).collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("unknown transition {0}")]
    UnknownTransition(String),
    #[error("invalid communication-space net: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string().replace('\t', " "))
        .collect::<Vec<_>>()
        .join("; ")
}

/// A net whose places and transitions are partitioned into spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommSpaceNet {
    pub net: Net,
    pub spaces: SpaceAssignment,
}

impl CommSpaceNet {
    /// Checked constructor: the net must be well-formed and correctly layered.
    pub fn new(net: Net, spaces: SpaceAssignment) -> Result<Self, SpaceError> {
        let cs = CommSpaceNet { net, spaces };
        let mut v = crate::net::validate_net(&cs.net);
        v.extend(validate_layering(&cs));
        if v.is_empty() {
            Ok(cs)
        } else {
            Err(SpaceError::Invalid(v))
        }
    }

    pub fn place_space(&self, id: &str) -> Option<SpaceKind> {
        self.spaces.places.get(id).copied()
    }

    pub fn transition_space(&self, id: &str) -> Option<SpaceKind> {
        self.spaces.transitions.get(id).copied()
    }
}

/// Missing labels, labels for unknown ids, and every arc that connects a
/// transition to a place outside its own or an adjacent space.
pub fn validate_layering(csnet: &CommSpaceNet) -> Vec<Violation> {
    let net = &csnet.net;
    let sp = &csnet.spaces;
    let mut out = Vec::new();
    for p in net.places.keys() {
        if !sp.places.contains_key(p) {
            out.push(Violation::Unassigned {
                kind: "place",
                id: p.clone(),
            });
        }
    }
    for t in net.transitions.keys() {
        if !sp.transitions.contains_key(t) {
            out.push(Violation::Unassigned {
                kind: "transition",
                id: t.clone(),
            });
        }
    }
    for p in sp.places.keys() {
        if !net.places.contains_key(p) {
            out.push(Violation::UnknownAssignment {
                kind: "place",
                id: p.clone(),
            });
        }
    }
    for t in sp.transitions.keys() {
        if !net.transitions.contains_key(t) {
            out.push(Violation::UnknownAssignment {
                kind: "transition",
                id: t.clone(),
            });
        }
    }
    for t in net.transitions.values() {
        let Some(&ts) = sp.transitions.get(&t.id) else { continue };
        for a in &t.inputs {
            if let Some(&ps) = sp.places.get(&a.place) {
                if !ps.reaches(ts) {
                    out.push(Violation::Bypass {
                        transition: t.id.clone(),
                        place: a.place.clone(),
                        from: ps,
                        to: ts,
                    });
                }
            }
        }
        for a in &t.outputs {
            if let Some(&ps) = sp.places.get(&a.place) {
                if !ts.reaches(ps) {
                    out.push(Violation::Bypass {
                        transition: t.id.clone(),
                        place: a.place.clone(),
                        from: ts,
                        to: ps,
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowKind {
    /// Every arc stays inside the transition's own space.
    Horizontal,
    /// At least one arc crosses into an adjacent space.
    Vertical,
}

pub fn flow_classify(csnet: &CommSpaceNet, transition_id: &str) -> Result<FlowKind, SpaceError> {
    let t = csnet
        .net
        .transition(transition_id)
        .ok_or_else(|| SpaceError::UnknownTransition(transition_id.into()))?;
    let ts = csnet.transition_space(transition_id);
    let horizontal = t.arc_places().into_iter().all(|p| csnet.place_space(p) == ts);
    if horizontal {
        Ok(FlowKind::Horizontal)
    } else {
        Ok(FlowKind::Vertical)
    }
}

/// The subnet of one space: its places and its horizontal transitions.
/// Only the color sets those places need are kept.
pub fn space_projection(csnet: &CommSpaceNet, space: SpaceKind) -> Net {
    let src = &csnet.net;
    let places: BTreeMap<_, _> = src
        .places
        .iter()
        .filter(|(id, _)| csnet.place_space(id) == Some(space))
        .map(|(id, p)| (id.clone(), p.clone()))
        .collect();
    let transitions = src
        .transitions
        .iter()
        .filter(|(id, _)| {
            csnet.transition_space(id) == Some(space) && flow_classify(csnet, id) == Ok(FlowKind::Horizontal)
        })
        .map(|(id, t)| (id.clone(), t.clone()))
        .collect();

    let mut needed = BTreeSet::new();
    let mut stack: Vec<String> = places.values().map(|p| p.colorset.clone()).collect();
    while let Some(c) = stack.pop() {
        if needed.insert(c.clone()) {
            if let Some(comps) = src.colorsets.components(&c) {
                stack.extend(comps.iter().cloned());
            }
        }
    }
    let mut colorsets = crate::color::ColorSets::new();
    for cs in src.colorsets.iter().filter(|c| needed.contains(&c.name)) {
        colorsets.insert(cs.clone());
    }
    let mut initial = src.initial.clone();
    initial.retain(|p| places.contains_key(p));
    Net {
        colorsets,
        places,
        transitions,
        initial,
    }
}
