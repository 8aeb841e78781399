//! The `csnet-1` JSON net document.
//!
//! ```json
//! {
//!   "version": "csnet-1",
//!   "colorsets": [{"kind": "unit", "name": "U"}],
//!   "places": [{"id": "P1", "name": "P1", "colorset": "U", "space": "surface"}],
//!   "transitions": [{"id": "T", "name": "T", "space": "observation",
//!                    "inputs": [{"place": "P1", "pattern": {"lit": null}}],
//!                    "outputs": [], "guard": "true"}],
//!   "initial_marking": [{"place": "P1", "tokens": [null]}]
//! }
//! ```
//!
//! Optional sections: `human_gates`, `groups`, `scenario`. Unknown fields
//! are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::sexpr::{guard_to_sexpr, parse_guard};
use super::{value_from_json, value_to_json};
use crate::color::{ColorSet, ColorSetKind, ColorValue};
use crate::group::{AgentRef, Agents, GroupAgent, GroupError, Status};
use crate::marking::{Digest256, Marking};
use crate::net::{ArcExpr, ArcPattern, Net, Transition, Violation};
use crate::scenarios::human::HumanGate;
use crate::scenarios::ScenarioConfig;
use crate::space::{validate_layering, CommSpaceNet, SpaceAssignment, SpaceKind};

pub const VERSION: &str = "csnet-1";

/// A token value inside the document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenValue(pub ColorValue);

impl Serialize for TokenValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        value_to_json(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TokenValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = serde_json::Value::deserialize(d)?;
        value_from_json(&j).map(TokenValue).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ColorSetDoc {
    Unit { name: String },
    IntRange { name: String, lo: i64, hi: i64 },
    Enum { name: String, symbols: Vec<String> },
    Product { name: String, components: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub colorset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceKind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PatternDoc {
    Var(String),
    Lit(TokenValue),
    Tuple(Vec<PatternDoc>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    pub place: String,
    pub pattern: PatternDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    pub place: String,
    pub expr: PatternDoc,
}

fn default_guard() -> String {
    "true".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceKind>,
    #[serde(default)]
    pub inputs: Vec<InputDoc>,
    #[serde(default)]
    pub outputs: Vec<OutputDoc>,
    #[serde(default = "default_guard")]
    pub guard: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkingDoc {
    pub place: String,
    pub tokens: Vec<TokenValue>,
}

fn status_on() -> Status {
    Status::On
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberDoc {
    pub id: String,
    #[serde(default = "status_on")]
    pub st: Status,
    #[serde(default)]
    pub topics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub id: String,
    pub topic: String,
    #[serde(default = "status_on")]
    pub st: Status,
    #[serde(default)]
    pub members: Vec<MemberDoc>,
}

impl GroupDoc {
    /// Register the members in document order.
    pub fn build(&self) -> Result<(GroupAgent, Agents), GroupError> {
        let mut g = GroupAgent::new(&self.id, &self.topic);
        g.st = self.st;
        let mut agents = Agents::new();
        for m in &self.members {
            let a = AgentRef::new(&m.id, m.st, &m.topics);
            g.register(&a)?;
            agents.insert(m.id.clone(), a);
        }
        Ok((g, agents))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetFile {
    pub version: String,
    #[serde(default)]
    pub colorsets: Vec<ColorSetDoc>,
    #[serde(default)]
    pub places: Vec<PlaceDoc>,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
    #[serde(default)]
    pub initial_marking: Vec<MarkingDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub human_gates: Vec<HumanGate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetFileError {
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported version {0:?}, expected {VERSION:?}")]
    Version(String),
    #[error("transition {transition}: {source}")]
    Guard {
        transition: String,
        source: super::sexpr::SexprError,
    },
}

/// A parsed document turned into a net, together with the problems that
/// the net itself can no longer show (duplicate ids collapse in maps).
#[derive(Clone, Debug)]
pub struct Loaded {
    pub csnet: CommSpaceNet,
    pub structural: Vec<Violation>,
    pub human_gates: Vec<HumanGate>,
    pub groups: Vec<GroupDoc>,
    pub scenario: Option<ScenarioConfig>,
}

impl Loaded {
    /// Every violation: structural, typing, layering, gates and groups.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = self.structural.clone();
        v.extend(crate::net::validate_net(&self.csnet.net));
        v.extend(validate_layering(&self.csnet));
        let net = &self.csnet.net;
        for g in &self.human_gates {
            for t in [&g.approve, &g.deny] {
                if net.transition(t).is_none() {
                    v.push(Violation::UnknownGate { transition: t.clone() });
                }
            }
        }
        for g in &self.groups {
            if let Err(e) = g.build() {
                v.push(Violation::InvalidGroup {
                    group: g.id.clone(),
                    detail: e.to_string(),
                });
            }
        }
        v
    }
}

impl NetFile {
    pub fn parse(src: &str) -> Result<NetFile, NetFileError> {
        let doc: NetFile = serde_json::from_str(src).map_err(|e| NetFileError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if doc.version != VERSION {
            return Err(NetFileError::Version(doc.version));
        }
        Ok(doc)
    }

    /// Pretty-printed canonical text with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("net documents serialize");
        s.push('\n');
        s
    }

    pub fn to_net(&self) -> Result<Loaded, NetFileError> {
        let mut structural = Vec::new();
        let mut dup = |kind: &'static str, seen: &mut BTreeSet<String>, id: &str| {
            if !seen.insert(id.to_string()) {
                structural.push(Violation::DuplicateId {
                    kind,
                    id: id.to_string(),
                });
            }
        };
        let mut net = Net::new();
        let mut spaces = SpaceAssignment::default();

        let mut seen = BTreeSet::new();
        for c in &self.colorsets {
            let cs = match c {
                ColorSetDoc::Unit { name } => ColorSet::unit(name),
                ColorSetDoc::IntRange { name, lo, hi } => ColorSet::int_range(name, *lo, *hi),
                ColorSetDoc::Enum { name, symbols } => ColorSet::enumeration(name, symbols),
                ColorSetDoc::Product { name, components } => ColorSet::product(name, components),
            };
            dup("colorset", &mut seen, &cs.name);
            net.colorset(cs);
        }

        let mut seen = BTreeSet::new();
        for p in &self.places {
            dup("place", &mut seen, &p.id);
            net.place(&p.id, &p.colorset);
            if let Some(name) = &p.name {
                net.places.get_mut(&p.id).expect("just inserted").name = name.clone();
            }
            if let Some(s) = p.space {
                spaces.place(&p.id, s);
            }
        }

        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            dup("transition", &mut seen, &t.id);
            let guard = parse_guard(&t.guard).map_err(|source| NetFileError::Guard {
                transition: t.id.clone(),
                source,
            })?;
            let mut tr = Transition::new(&t.id).guard(guard);
            if let Some(name) = &t.name {
                tr = tr.named(name);
            }
            for a in &t.inputs {
                tr = tr.input(&a.place, to_pattern(&a.pattern));
            }
            for a in &t.outputs {
                tr = tr.output(&a.place, to_expr(&a.expr));
            }
            net.add_transition(tr);
            if let Some(s) = t.space {
                spaces.transition(&t.id, s);
            }
        }

        for m in &self.initial_marking {
            for tok in &m.tokens {
                net.token(&m.place, tok.0.clone());
            }
        }
        net.resolve_symbols();
        Ok(Loaded {
            csnet: CommSpaceNet { net, spaces },
            structural,
            human_gates: self.human_gates.clone(),
            groups: self.groups.clone(),
            scenario: self.scenario.clone(),
        })
    }

    /// The canonical document of a net: every section sorted by id, tokens
    /// in canonical order, one entry per token occurrence.
    pub fn from_csnet(cs: &CommSpaceNet) -> NetFile {
        let net = &cs.net;
        let colorsets = net
            .colorsets
            .iter()
            .map(|c| {
                let name = c.name.clone();
                match &c.kind {
                    ColorSetKind::Unit => ColorSetDoc::Unit { name },
                    ColorSetKind::IntRange { lo, hi } => ColorSetDoc::IntRange { name, lo: *lo, hi: *hi },
                    ColorSetKind::Enum { symbols } => ColorSetDoc::Enum {
                        name,
                        symbols: symbols.clone(),
                    },
                    ColorSetKind::Product { components } => ColorSetDoc::Product {
                        name,
                        components: components.clone(),
                    },
                }
            })
            .collect();
        let places = net
            .places
            .values()
            .map(|p| PlaceDoc {
                id: p.id.clone(),
                name: Some(p.name.clone()),
                colorset: p.colorset.clone(),
                space: cs.place_space(&p.id),
            })
            .collect();
        let transitions = net
            .transitions
            .values()
            .map(|t| TransitionDoc {
                id: t.id.clone(),
                name: Some(t.name.clone()),
                space: cs.transition_space(&t.id),
                inputs: t
                    .inputs
                    .iter()
                    .map(|a| InputDoc {
                        place: a.place.clone(),
                        pattern: from_pattern(&a.pattern),
                    })
                    .collect(),
                outputs: t
                    .outputs
                    .iter()
                    .map(|a| OutputDoc {
                        place: a.place.clone(),
                        expr: from_expr(&a.expr),
                    })
                    .collect(),
                guard: guard_to_sexpr(&t.guard),
            })
            .collect();
        NetFile {
            version: VERSION.into(),
            colorsets,
            places,
            transitions,
            initial_marking: marking_docs(&net.initial),
            human_gates: Vec::new(),
            groups: Vec::new(),
            scenario: None,
        }
    }
}

fn marking_docs(m: &Marking) -> Vec<MarkingDoc> {
    m.places()
        .map(|(p, ms)| MarkingDoc {
            place: p.to_string(),
            tokens: ms.sorted().into_iter().map(TokenValue).collect(),
        })
        .collect()
}

fn to_pattern(p: &PatternDoc) -> ArcPattern {
    match p {
        PatternDoc::Var(v) => ArcPattern::Var(v.clone()),
        PatternDoc::Lit(v) => ArcPattern::Lit(v.0.clone()),
        PatternDoc::Tuple(ps) => ArcPattern::Tuple(ps.iter().map(to_pattern).collect()),
    }
}

fn to_expr(p: &PatternDoc) -> ArcExpr {
    match p {
        PatternDoc::Var(v) => ArcExpr::Var(v.clone()),
        PatternDoc::Lit(v) => ArcExpr::Lit(v.0.clone()),
        PatternDoc::Tuple(ps) => ArcExpr::Tuple(ps.iter().map(to_expr).collect()),
    }
}

fn from_pattern(p: &ArcPattern) -> PatternDoc {
    match p {
        ArcPattern::Var(v) => PatternDoc::Var(v.clone()),
        ArcPattern::Lit(v) => PatternDoc::Lit(TokenValue(v.clone())),
        ArcPattern::Tuple(ps) => PatternDoc::Tuple(ps.iter().map(from_pattern).collect()),
    }
}

fn from_expr(e: &ArcExpr) -> PatternDoc {
    match e {
        ArcExpr::Var(v) => PatternDoc::Var(v.clone()),
        ArcExpr::Lit(v) => PatternDoc::Lit(TokenValue(v.clone())),
        ArcExpr::Tuple(es) => PatternDoc::Tuple(es.iter().map(from_expr).collect()),
    }
}

/// Parse and convert in one go.
pub fn load(src: &str) -> Result<Loaded, NetFileError> {
    NetFile::parse(src)?.to_net()
}

/// Lowercase hex SHA-256 of the canonical compact document of `cs`.
pub fn net_digest(cs: &CommSpaceNet) -> Digest256 {
    let doc = serde_json::to_string(&NetFile::from_csnet(cs)).expect("net documents serialize");
    hex::encode(Sha256::digest(doc.as_bytes()))
}

/// Space labels of a loaded net, by kind, for summaries.
pub fn space_census(cs: &CommSpaceNet) -> BTreeMap<SpaceKind, (usize, usize)> {
    let mut out: BTreeMap<SpaceKind, (usize, usize)> = BTreeMap::new();
    for s in cs.spaces.places.values() {
        out.entry(*s).or_default().0 += 1;
    }
    for s in cs.spaces.transitions.values() {
        out.entry(*s).or_default().1 += 1;
    }
    out
}

impl fmt::Display for NetFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// Convenience for builders: a token value with symbols resolved later.
pub fn token(v: ColorValue) -> TokenValue {
    TokenValue(v)
}
