//! Topic-scoped group agents.
//!
//! A group keeps two compartments of member ids: active members receive
//! every message delivered on the group's topic, non-active members are
//! remembered but skipped. The four behaviors (`register`, `deliver`,
//! `deregister`, `switch_cmp`) are the only way the compartments change.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{ColorSet, ColorSets, ColorValue};
use crate::marking::Marking;
use crate::net::{ArcExpr, ArcPattern, Guard, Net, Transition};
use crate::space::{CommSpaceNet, SpaceAssignment, SpaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    On,
    Off,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::On => "on",
            Status::Off => "off",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub seq: u64,
    pub sender: String,
    pub topic: String,
    pub payload: ColorValue,
}

/// A message before the group has sequenced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outgoing {
    pub sender: String,
    pub topic: String,
    pub payload: ColorValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentRef {
    pub id: String,
    pub st: Status,
    pub topics: BTreeSet<String>,
    pub buffer: Vec<Message>,
}

impl AgentRef {
    pub fn new<S: AsRef<str>>(id: &str, st: Status, topics: impl IntoIterator<Item = S>) -> Self {
        AgentRef {
            id: id.into(),
            st,
            topics: topics.into_iter().map(|t| t.as_ref().to_string()).collect(),
            buffer: Vec::new(),
        }
    }

    pub fn is_concerned_with(&self, topic: &str) -> bool {
        self.topics.contains(topic)
    }
}

/// Agents addressed by id.
pub type Agents = BTreeMap<String, AgentRef>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupEvent {
    Registered { agent: String, active: bool },
    NotConcerned { agent: String },
    Delivered { seq: u64, recipients: Vec<String> },
    Dropped { sender: String, topic: String },
    Deregistered { agent: String },
    Switched { agent: String, active: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegisterOutcome {
    Active,
    NonActive,
    NotConcerned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeregisterOutcome {
    Removed,
    NoEffect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchOutcome {
    ToActive,
    ToNonActive,
    Unchanged,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Delivery {
    /// `None` when the message was dropped.
    pub seq: Option<u64>,
    pub recipients: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("agent {0} is already a member")]
    AlreadyMember(String),
    #[error("sender {0} is not a member")]
    SenderNotMember(String),
    #[error("agent {0} is not a member")]
    NotMember(String),
    #[error("active member {0} is missing from the agent table")]
    UnknownAgent(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAgent {
    pub id: String,
    pub st: Status,
    pub topic: String,
    pub cmp_active: BTreeSet<String>,
    pub cmp_nonactive: BTreeSet<String>,
    pub next_seq: u64,
    pub events: Vec<GroupEvent>,
}

impl GroupAgent {
    pub fn new(id: &str, topic: &str) -> Self {
        GroupAgent {
            id: id.into(),
            st: Status::On,
            topic: topic.into(),
            cmp_active: BTreeSet::new(),
            cmp_nonactive: BTreeSet::new(),
            next_seq: 0,
            events: Vec::new(),
        }
    }

    pub fn is_member(&self, id: &str) -> bool {
        self.cmp_active.contains(id) || self.cmp_nonactive.contains(id)
    }

    pub fn members(&self) -> BTreeSet<&str> {
        self.cmp_active
            .iter()
            .chain(&self.cmp_nonactive)
            .map(String::as_str)
            .collect()
    }

    pub fn register(&mut self, agent: &AgentRef) -> Result<RegisterOutcome, GroupError> {
        if self.is_member(&agent.id) {
            return Err(GroupError::AlreadyMember(agent.id.clone()));
        }
        if !agent.is_concerned_with(&self.topic) {
            self.events.push(GroupEvent::NotConcerned {
                agent: agent.id.clone(),
            });
            return Ok(RegisterOutcome::NotConcerned);
        }
        let active = agent.st == Status::On;
        if active {
            self.cmp_active.insert(agent.id.clone());
        } else {
            self.cmp_nonactive.insert(agent.id.clone());
        }
        self.events.push(GroupEvent::Registered {
            agent: agent.id.clone(),
            active,
        });
        Ok(if active {
            RegisterOutcome::Active
        } else {
            RegisterOutcome::NonActive
        })
    }

    /// Sequence `msg` and append it to the buffer of every active member.
    /// A group that is off, or a message on another topic, drops the message.
    pub fn deliver(&mut self, agents: &mut Agents, msg: Outgoing) -> Result<Delivery, GroupError> {
        if !self.is_member(&msg.sender) {
            return Err(GroupError::SenderNotMember(msg.sender));
        }
        if self.st != Status::On || msg.topic != self.topic {
            self.events.push(GroupEvent::Dropped {
                sender: msg.sender,
                topic: msg.topic,
            });
            return Ok(Delivery {
                seq: None,
                recipients: Vec::new(),
            });
        }
        if let Some(missing) = self.cmp_active.iter().find(|id| !agents.contains_key(*id)) {
            return Err(GroupError::UnknownAgent(missing.clone()));
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        let recipients: Vec<String> = self.cmp_active.iter().cloned().collect();
        for id in &recipients {
            let agent = agents.get_mut(id).expect("checked above");
            agent.buffer.push(Message {
                seq,
                sender: msg.sender.clone(),
                topic: msg.topic.clone(),
                payload: msg.payload.clone(),
            });
        }
        self.events.push(GroupEvent::Delivered {
            seq,
            recipients: recipients.clone(),
        });
        Ok(Delivery {
            seq: Some(seq),
            recipients,
        })
    }

    /// Only active members can be deregistered.
    pub fn deregister(&mut self, agent_id: &str) -> DeregisterOutcome {
        if self.cmp_active.remove(agent_id) {
            self.events.push(GroupEvent::Deregistered { agent: agent_id.into() });
            DeregisterOutcome::Removed
        } else {
            DeregisterOutcome::NoEffect
        }
    }

    /// Move `agent` to the compartment matching its current status.
    pub fn switch_cmp(&mut self, agent: &AgentRef) -> Result<SwitchOutcome, GroupError> {
        if !self.is_member(&agent.id) {
            return Err(GroupError::NotMember(agent.id.clone()));
        }
        let outcome = if agent.st == Status::Off && self.cmp_active.remove(&agent.id) {
            self.cmp_nonactive.insert(agent.id.clone());
            SwitchOutcome::ToNonActive
        } else if agent.st == Status::On && self.cmp_nonactive.remove(&agent.id) {
            self.cmp_active.insert(agent.id.clone());
            SwitchOutcome::ToActive
        } else {
            SwitchOutcome::Unchanged
        };
        if outcome != SwitchOutcome::Unchanged {
            self.events.push(GroupEvent::Switched {
                agent: agent.id.clone(),
                active: outcome == SwitchOutcome::ToActive,
            });
        }
        Ok(outcome)
    }

    /// Check the compartment invariants against the agent table.
    pub fn check_invariants(&self, agents: &Agents) -> Result<(), String> {
        if let Some(id) = self.cmp_active.intersection(&self.cmp_nonactive).next() {
            return Err(format!("{id} is in both compartments"));
        }
        for (ids, want) in [(&self.cmp_active, Status::On), (&self.cmp_nonactive, Status::Off)] {
            for id in ids {
                let a = agents.get(id).ok_or_else(|| format!("{id} missing from agent table"))?;
                if !a.is_concerned_with(&self.topic) {
                    return Err(format!("{id} is not concerned with {}", self.topic));
                }
                if a.st != want {
                    return Err(format!("{id} has status {} in the wrong compartment", a.st.as_str()));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of the net fragment a group compiles to.
#[derive(Clone, Debug)]
pub struct FragmentOptions {
    /// Color sets needed by the payload type.
    pub payload_colorsets: ColorSets,
    pub payload: String,
    /// Topics that may appear on published messages; the group's topic is
    /// always included.
    pub topics: Vec<String>,
    /// Highest sequence number the fragment can assign.
    pub capacity: u32,
}

impl Default for FragmentOptions {
    fn default() -> Self {
        let mut payload_colorsets = ColorSets::new();
        payload_colorsets.insert(ColorSet::unit("Payload"));
        FragmentOptions {
            payload_colorsets,
            payload: "Payload".into(),
            topics: Vec::new(),
            capacity: 8,
        }
    }
}

pub const PUBLISH: &str = "publish";

pub fn inbox_place(agent: &str) -> String {
    format!("inbox_{agent}")
}

fn queue_place(agent: &str) -> String {
    format!("queue_{agent}")
}

/// Compile a group into a communication-space net fragment.
///
/// Published messages are `(sender, topic, payload)` tokens on the surface
/// place `publish`. An observation-space `accept` transition (present only
/// when there are active members) stamps the next sequence number and fans
/// the message out to one queue per active member; one `deliver_<id>`
/// transition per active member, guarded on the group topic, moves it into
/// that member's inbox. Every member gets an inbox place.
pub fn compile_group_to_net(group: &GroupAgent, opts: &FragmentOptions) -> CommSpaceNet {
    use SpaceKind::*;
    let mut net = Net::new();
    for cs in opts.payload_colorsets.iter() {
        net.colorset(cs.clone());
    }
    let mut agents: BTreeSet<String> = group.members().into_iter().map(String::from).collect();
    agents.insert(group.id.clone());
    let mut topics: BTreeSet<String> = opts.topics.iter().cloned().collect();
    topics.insert(group.topic.clone());
    let cap = i64::from(opts.capacity);
    net.colorset(ColorSet::enumeration("Agent", &agents))
        .colorset(ColorSet::enumeration("Topic", &topics))
        .colorset(ColorSet::enumeration("GroupStatus", ["on", "off"]))
        .colorset(ColorSet::int_range("Seq", 0, cap))
        .colorset(ColorSet::product("SeqStep", ["Seq", "Seq"]))
        .colorset(ColorSet::product("Post", ["Agent", "Topic", opts.payload.as_str()]))
        .colorset(ColorSet::product(
            "Msg",
            ["Seq", "Agent", "Topic", opts.payload.as_str()],
        ));

    let mut spaces = SpaceAssignment::default();
    net.place(PUBLISH, "Post");
    spaces.place(PUBLISH, Surface);
    for (p, cs) in [("group_st", "GroupStatus"), ("next_seq", "Seq"), ("succ", "SeqStep")] {
        net.place(p, cs);
        spaces.place(p, Observation);
    }
    for m in group.members() {
        net.place(&inbox_place(m), "Msg");
        spaces.place(&inbox_place(m), Observation);
    }

    let on = net.sym("GroupStatus", "on");
    let st = net.sym("GroupStatus", group.st.as_str());
    let topic = net.sym("Topic", &group.topic);
    net.token("group_st", st);
    net.token(
        "next_seq",
        ColorValue::Int(group.next_seq.min(opts.capacity as u64) as i64),
    );
    for i in 0..cap {
        net.token("succ", ColorValue::tuple([ColorValue::Int(i), ColorValue::Int(i + 1)]));
    }

    let msg_expr = || ArcExpr::Tuple(["n", "sender", "topic", "payload"].map(ArcExpr::var).to_vec());
    if !group.cmp_active.is_empty() {
        let mut accept = Transition::new("accept")
            .named("sequence and fan out")
            .input(
                PUBLISH,
                ArcPattern::Tuple(["sender", "topic", "payload"].map(ArcPattern::var).to_vec()),
            )
            .input("group_st", ArcPattern::Lit(on.clone()))
            .input("next_seq", ArcPattern::var("n"))
            .input(
                "succ",
                ArcPattern::Tuple(vec![ArcPattern::var("n"), ArcPattern::var("n2")]),
            )
            .output("group_st", ArcExpr::Lit(on))
            .output("next_seq", ArcExpr::var("n2"))
            .output("succ", ArcExpr::Tuple(vec![ArcExpr::var("n"), ArcExpr::var("n2")]))
            .guard(Guard::var_is("topic", topic.clone()));
        for m in &group.cmp_active {
            net.place(&queue_place(m), "Msg");
            spaces.place(&queue_place(m), Observation);
            accept = accept.output(&queue_place(m), msg_expr());
        }
        net.add_transition(accept);
        spaces.transition("accept", Observation);
        for m in &group.cmp_active {
            let id = format!("deliver_{m}");
            net.add_transition(
                Transition::new(&id)
                    .named(&format!("deliver to {m}"))
                    .input(
                        &queue_place(m),
                        ArcPattern::Tuple(["n", "sender", "topic", "payload"].map(ArcPattern::var).to_vec()),
                    )
                    .output(&inbox_place(m), msg_expr())
                    .guard(Guard::var_is("topic", topic.clone())),
            );
            spaces.transition(&id, Observation);
        }
    }
    CommSpaceNet { net, spaces }
}

/// Token for a published, not yet sequenced message.
pub fn post_token(net: &Net, msg: &Outgoing) -> ColorValue {
    ColorValue::tuple([
        net.sym("Agent", &msg.sender),
        net.sym("Topic", &msg.topic),
        net.colorsets.resolve(&post_payload_colorset(net), msg.payload.clone()),
    ])
}

fn post_payload_colorset(net: &Net) -> String {
    net.colorsets
        .components("Post")
        .and_then(|c| c.get(2).cloned())
        .unwrap_or_default()
}

/// Inbox contents of a fragment marking, per member, ordered by sequence.
pub fn fragment_buffers(group: &GroupAgent, marking: &Marking) -> BTreeMap<String, Vec<Message>> {
    group
        .members()
        .into_iter()
        .map(|m| {
            let mut msgs: Vec<Message> = marking
                .get(&inbox_place(m))
                .map(|ms| ms.sorted())
                .unwrap_or_default()
                .into_iter()
                .filter_map(|tok| match tok {
                    ColorValue::Tuple(f) if f.len() == 4 => Some(Message {
                        seq: f[0].as_int()? as u64,
                        sender: f[1].as_sym()?.to_string(),
                        topic: f[2].as_sym()?.to_string(),
                        payload: f[3].clone(),
                    }),
                    _ => None,
                })
                .collect();
            msgs.sort_by_key(|m| m.seq);
            (m.to_string(), msgs)
        })
        .collect()
}
