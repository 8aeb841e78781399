//! Test support: seeded random nets and independent reference
//! implementations (brute-force bindings, firing, exploration, layering,
//! group membership) that share no code with the library's algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use csnet::color::{ColorSet, ColorValue};
use csnet::engine::{run_with, FiringPolicy, PolicyOnly};
use csnet::group::{
    compile_group_to_net, fragment_buffers, post_token, AgentRef, Agents, FragmentOptions, GroupAgent, Message,
    Outgoing, Status, PUBLISH,
};
use csnet::marking::Marking;
use csnet::net::{ArcExpr, ArcPattern, Binding, CmpOp, Guard, Net, Operand, Transition};
use csnet::space::{CommSpaceNet, SpaceAssignment, SpaceKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The color sets a random net may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ty {
    U,
    I,
    E,
    B,
    F,
    P,
}

pub const PLACE_TYPES: [Ty; 4] = [Ty::U, Ty::I, Ty::E, Ty::P];
const ENUM_NAMES: [&str; 4] = ["red", "green", "blue", "gray"];

fn cs_name(t: Ty) -> &'static str {
    match t {
        Ty::U => "U",
        Ty::I => "I",
        Ty::E => "E",
        Ty::B => "B",
        Ty::F => "F",
        Ty::P => "P",
    }
}

fn vars_of(t: Ty) -> &'static [&'static str] {
    match t {
        Ty::U => &["u"],
        Ty::I => &["i", "j"],
        Ty::E => &["e", "f"],
        Ty::B => &["b"],
        Ty::F => &["x"],
        Ty::P => &["p"],
    }
}

pub fn var_type(v: &str) -> Ty {
    match v {
        "u" => Ty::U,
        "i" | "j" => Ty::I,
        "e" | "f" => Ty::E,
        "b" => Ty::B,
        "x" => Ty::F,
        "p" => Ty::P,
        other => panic!("unknown generator variable {other}"),
    }
}

/// A random net plus what the oracles need to know about it.
#[derive(Clone, Debug)]
pub struct RandomNet {
    pub net: Net,
    pub int_size: i64,
    pub enum_size: usize,
    pub place_types: BTreeMap<String, Ty>,
}

impl RandomNet {
    /// Every value of a type, built from the sizes chosen at generation.
    pub fn domain(&self, t: Ty) -> Vec<ColorValue> {
        match t {
            Ty::U => vec![ColorValue::Unit],
            Ty::I => (0..self.int_size).map(ColorValue::Int).collect(),
            Ty::E => ENUM_NAMES[..self.enum_size]
                .iter()
                .map(|s| self.net.sym("E", s))
                .collect(),
            Ty::B => vec![ColorValue::Int(0), ColorValue::Int(1)],
            Ty::F => vec![self.net.sym("F", "x"), self.net.sym("F", "y")],
            Ty::P => {
                let mut out = Vec::new();
                for b in self.domain(Ty::B) {
                    for f in self.domain(Ty::F) {
                        out.push(ColorValue::tuple([b.clone(), f]));
                    }
                }
                out
            }
        }
    }

    fn pick(&self, t: Ty, r: &mut ChaCha8Rng) -> ColorValue {
        self.domain(t).choose(r).expect("domains are non-empty").clone()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_tokens: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
}

/// The sizes named by the binding criterion: up to 4 places, 3
/// transitions, 5 tokens, every color domain of at most 4 values.
pub const SMALL: Shape = Shape {
    max_places: 4,
    max_transitions: 3,
    max_tokens: 5,
    max_inputs: 3,
    max_outputs: 2,
};

/// More tokens and fewer inputs, so more nets get past the first step.
pub const GROWING: Shape = Shape {
    max_places: 4,
    max_transitions: 3,
    max_tokens: 8,
    max_inputs: 2,
    max_outputs: 2,
};

fn gen_pattern(rn: &RandomNet, t: Ty, r: &mut ChaCha8Rng) -> ArcPattern {
    let var = |r: &mut ChaCha8Rng| ArcPattern::var(vars_of(t).choose(r).unwrap());
    match t {
        Ty::P => match r.gen_range(0..10) {
            0..=2 => var(r),
            3..=4 => ArcPattern::Lit(rn.pick(t, r)),
            _ => ArcPattern::Tuple(vec![gen_pattern(rn, Ty::B, r), gen_pattern(rn, Ty::F, r)]),
        },
        _ => {
            if r.gen_bool(0.6) {
                var(r)
            } else {
                ArcPattern::Lit(rn.pick(t, r))
            }
        }
    }
}

fn gen_expr(rn: &RandomNet, t: Ty, bound: &BTreeSet<String>, r: &mut ChaCha8Rng) -> ArcExpr {
    let candidates: Vec<&str> = vars_of(t).iter().copied().filter(|v| bound.contains(*v)).collect();
    if t == Ty::P && r.gen_bool(0.5) {
        return ArcExpr::Tuple(vec![gen_expr(rn, Ty::B, bound, r), gen_expr(rn, Ty::F, bound, r)]);
    }
    if !candidates.is_empty() && r.gen_bool(0.7) {
        ArcExpr::var(candidates.choose(r).unwrap())
    } else {
        ArcExpr::Lit(rn.pick(t, r))
    }
}

fn gen_atom(rn: &RandomNet, bound: &BTreeSet<String>, r: &mut ChaCha8Rng) -> Guard {
    let ints: Vec<&String> = bound.iter().filter(|v| matches!(var_type(v), Ty::I | Ty::B)).collect();
    let enums: Vec<&String> = bound.iter().filter(|v| var_type(v) == Ty::E).collect();
    let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
    if !ints.is_empty() && (enums.is_empty() || r.gen_bool(0.6)) {
        let a = ints.choose(r).unwrap().to_string();
        let ta = var_type(&a);
        let same: Vec<&&String> = ints.iter().filter(|v| var_type(v) == ta).collect();
        let b = if r.gen_bool(0.5) {
            Operand::Var(same.choose(r).unwrap().to_string())
        } else {
            Operand::Lit(rn.pick(ta, r))
        };
        Guard::cmp(*ops.choose(r).unwrap(), Operand::Var(a), b)
    } else if !enums.is_empty() {
        let a = enums.choose(r).unwrap().to_string();
        let b = if r.gen_bool(0.5) {
            Operand::Var(enums.choose(r).unwrap().to_string())
        } else {
            Operand::Lit(rn.pick(Ty::E, r))
        };
        let op = if r.gen_bool(0.5) { CmpOp::Eq } else { CmpOp::Ne };
        Guard::cmp(op, Operand::Var(a), b)
    } else {
        Guard::True
    }
}

fn gen_guard(rn: &RandomNet, bound: &BTreeSet<String>, r: &mut ChaCha8Rng, depth: u32) -> Guard {
    match r.gen_range(0..10) {
        0..=3 => Guard::True,
        4..=6 => gen_atom(rn, bound, r),
        7 if depth > 0 => Guard::Not(Box::new(gen_guard(rn, bound, r, depth - 1))),
        8 if depth > 0 => Guard::And(vec![
            gen_guard(rn, bound, r, depth - 1),
            gen_guard(rn, bound, r, depth - 1),
        ]),
        9 if depth > 0 => Guard::Or(vec![
            gen_guard(rn, bound, r, depth - 1),
            gen_guard(rn, bound, r, depth - 1),
        ]),
        _ => gen_atom(rn, bound, r),
    }
}

fn pattern_vars(p: &ArcPattern, out: &mut BTreeSet<String>) {
    match p {
        ArcPattern::Var(v) => {
            out.insert(v.clone());
        }
        ArcPattern::Lit(_) => {}
        ArcPattern::Tuple(ps) => ps.iter().for_each(|p| pattern_vars(p, out)),
    }
}

/// A well-typed random net with a random initial marking.
pub fn random_net(seed: u64, shape: Shape) -> RandomNet {
    let r = &mut rng(seed);
    let int_size = r.gen_range(1..=4);
    let enum_size = r.gen_range(1..=4);
    let mut net = Net::new();
    net.colorset(ColorSet::unit("U"))
        .colorset(ColorSet::int_range("I", 0, int_size - 1))
        .colorset(ColorSet::enumeration("E", &ENUM_NAMES[..enum_size]))
        .colorset(ColorSet::int_range("B", 0, 1))
        .colorset(ColorSet::enumeration("F", ["x", "y"]))
        .colorset(ColorSet::product("P", ["B", "F"]));
    let mut rn = RandomNet {
        net,
        int_size,
        enum_size,
        place_types: BTreeMap::new(),
    };
    let n_places = r.gen_range(1..=shape.max_places);
    for i in 0..n_places {
        let t = *PLACE_TYPES.choose(r).unwrap();
        let id = format!("p{i}");
        rn.net.place(&id, cs_name(t));
        rn.place_types.insert(id, t);
    }
    let places: Vec<(String, Ty)> = rn.place_types.iter().map(|(k, v)| (k.clone(), *v)).collect();
    let n_trans = r.gen_range(1..=shape.max_transitions);
    for ti in 0..n_trans {
        let mut t = Transition::new(&format!("t{ti}"));
        let mut bound = BTreeSet::new();
        for _ in 0..r.gen_range(1..=shape.max_inputs) {
            let (p, ty) = places.choose(r).unwrap();
            let pat = gen_pattern(&rn, *ty, r);
            pattern_vars(&pat, &mut bound);
            t = t.input(p, pat);
        }
        for _ in 0..r.gen_range(0..=shape.max_outputs) {
            let (p, ty) = places.choose(r).unwrap();
            t = t.output(p, gen_expr(&rn, *ty, &bound, r));
        }
        t = t.guard(gen_guard(&rn, &bound, r, 2));
        rn.net.add_transition(t);
    }
    rn.net.initial = random_marking(&rn, shape.max_tokens, r);
    rn
}

pub fn random_marking(rn: &RandomNet, max_tokens: usize, r: &mut ChaCha8Rng) -> Marking {
    let places: Vec<(&String, &Ty)> = rn.place_types.iter().collect();
    let mut m = Marking::new();
    for _ in 0..r.gen_range(0..=max_tokens) {
        let (p, t) = places.choose(r).unwrap();
        m.add_token(p, rn.pick(**t, r));
    }
    m
}

// ---------------------------------------------------------------- oracles

/// A marking as plain nested maps, without the library's types.
pub type Key = BTreeMap<String, BTreeMap<ColorValue, u32>>;

pub fn key_of(m: &Marking) -> Key {
    m.places()
        .map(|(p, ms)| (p.to_string(), ms.entries().map(|(v, n)| (v.clone(), n)).collect()))
        .collect()
}

fn inst(p: &ArcPattern, b: &Binding) -> ColorValue {
    match p {
        ArcPattern::Var(v) => b[v].clone(),
        ArcPattern::Lit(v) => v.clone(),
        ArcPattern::Tuple(ps) => ColorValue::Tuple(ps.iter().map(|p| inst(p, b)).collect()),
    }
}

fn eval(e: &ArcExpr, b: &Binding) -> ColorValue {
    match e {
        ArcExpr::Var(v) => b[v].clone(),
        ArcExpr::Lit(v) => v.clone(),
        ArcExpr::Tuple(es) => ColorValue::Tuple(es.iter().map(|e| eval(e, b)).collect()),
    }
}

fn operand(o: &Operand, b: &Binding) -> ColorValue {
    match o {
        Operand::Var(v) => b[v].clone(),
        Operand::Lit(v) => v.clone(),
    }
}

pub fn guard_holds(g: &Guard, b: &Binding) -> bool {
    match g {
        Guard::True => true,
        Guard::Cmp(op, l, r) => {
            let (l, r) = (operand(l, b), operand(r, b));
            match op {
                CmpOp::Eq => l == r,
                CmpOp::Ne => l != r,
                _ => match (l, r) {
                    (ColorValue::Int(x), ColorValue::Int(y)) => match op {
                        CmpOp::Lt => x < y,
                        CmpOp::Le => x <= y,
                        CmpOp::Gt => x > y,
                        _ => x >= y,
                    },
                    _ => false,
                },
            }
        }
        Guard::And(gs) => gs.iter().all(|g| guard_holds(g, b)),
        Guard::Or(gs) => gs.iter().any(|g| guard_holds(g, b)),
        Guard::Not(g) => !guard_holds(g, b),
    }
}

fn covers(key: &Key, need: &Key) -> bool {
    need.iter().all(|(p, vs)| {
        vs.iter()
            .all(|(v, n)| key.get(p).and_then(|have| have.get(v)).copied().unwrap_or(0) >= *n)
    })
}

fn demand(t: &Transition, b: &Binding) -> Key {
    let mut need = Key::new();
    for a in &t.inputs {
        *need
            .entry(a.place.clone())
            .or_default()
            .entry(inst(&a.pattern, b))
            .or_default() += 1;
    }
    need
}

/// Every assignment of the transition's variables over their full
/// domains that passes the guard and is covered by the marking.
pub fn oracle_bindings(rn: &RandomNet, key: &Key, tid: &str) -> Vec<Binding> {
    let t = &rn.net.transitions[tid];
    let mut vars = BTreeSet::new();
    for a in &t.inputs {
        pattern_vars(&a.pattern, &mut vars);
    }
    let vars: Vec<String> = vars.into_iter().collect();
    let domains: Vec<Vec<ColorValue>> = vars.iter().map(|v| rn.domain(var_type(v))).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let b: Binding = vars
            .iter()
            .zip(&idx)
            .zip(&domains)
            .map(|((v, &i), d)| (v.clone(), d[i].clone()))
            .collect();
        if guard_holds(&t.guard, &b) && covers(key, &demand(t, &b)) {
            out.push(b);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                out.sort();
                return out;
            }
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Consume the instantiated inputs and add the evaluated outputs.
pub fn oracle_fire(net: &Net, key: &Key, tid: &str, b: &Binding) -> Key {
    let t = &net.transitions[tid];
    let mut next = key.clone();
    for a in &t.inputs {
        let v = inst(&a.pattern, b);
        let place = next.get_mut(&a.place).expect("covered");
        let n = place.get_mut(&v).expect("covered");
        *n -= 1;
        if *n == 0 {
            place.remove(&v);
        }
        if place.is_empty() {
            next.remove(&a.place);
        }
    }
    for a in &t.outputs {
        *next
            .entry(a.place.clone())
            .or_default()
            .entry(eval(&a.expr, b))
            .or_default() += 1;
    }
    next
}

pub type OracleEdge = (Key, String, Binding, Key);

/// Breadth-first exploration with the oracles. `None` when more than
/// `cap` markings are reachable.
pub fn naive_explore(rn: &RandomNet, cap: usize) -> Option<(BTreeSet<Key>, Vec<OracleEdge>)> {
    let root = key_of(&rn.net.initial);
    let mut seen = BTreeSet::from([root.clone()]);
    let mut queue = VecDeque::from([root]);
    let mut edges = Vec::new();
    while let Some(k) = queue.pop_front() {
        for tid in rn.net.transitions.keys() {
            for b in oracle_bindings(rn, &k, tid) {
                let next = oracle_fire(&rn.net, &k, tid, &b);
                edges.push((k.clone(), tid.clone(), b, next.clone()));
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return None;
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    edges.sort();
    Some((seen, edges))
}

// --------------------------------------------------------------- layering

fn two_apart(a: SpaceKind, b: SpaceKind) -> bool {
    use SpaceKind::*;
    matches!((a, b), (Surface, Computation) | (Computation, Surface))
}

/// Every arc that jumps directly between surface and computation, as
/// (transition, place, from, to), worked out from the labels alone.
pub fn expected_bypasses(cs: &CommSpaceNet) -> Vec<(String, String, SpaceKind, SpaceKind)> {
    let mut out = Vec::new();
    for t in cs.net.transitions.values() {
        let ts = cs.spaces.transitions[&t.id];
        for a in &t.inputs {
            let ps = cs.spaces.places[&a.place];
            if two_apart(ps, ts) {
                out.push((t.id.clone(), a.place.clone(), ps, ts));
            }
        }
        for a in &t.outputs {
            let ps = cs.spaces.places[&a.place];
            if two_apart(ts, ps) {
                out.push((t.id.clone(), a.place.clone(), ts, ps));
            }
        }
    }
    out.sort();
    out
}

/// A random labeling. With `bypass` set, at least one transition is forced
/// to touch a place two layers away.
pub fn layering_case(seed: u64, bypass: bool) -> CommSpaceNet {
    use SpaceKind::*;
    let rn = random_net(
        seed,
        Shape {
            max_places: 4,
            max_transitions: 3,
            max_tokens: 2,
            max_inputs: 2,
            max_outputs: 2,
        },
    );
    let r = &mut rng(seed ^ 0x5eed);
    let net = rn.net;
    let all = [Surface, Observation, Computation];
    let mut spaces = SpaceAssignment::default();
    for p in net.places.keys() {
        spaces.place(p, *all.choose(r).unwrap());
    }
    for t in net.transitions.values() {
        let ps: Vec<SpaceKind> = t.arc_places().iter().map(|p| spaces.places[*p]).collect();
        let ok: Vec<SpaceKind> = all
            .into_iter()
            .filter(|s| ps.iter().all(|p| !two_apart(*p, *s)))
            .collect();
        spaces.transition(&t.id, *ok.choose(r).expect("observation is always adjacent"));
    }
    if bypass {
        let ts: Vec<&Transition> = net.transitions.values().collect();
        let t = ts.choose(r).unwrap();
        let places: Vec<&str> = t.arc_places().into_iter().collect();
        let p = places.choose(r).unwrap();
        let (ps, tsp) = if r.gen_bool(0.5) {
            (Surface, Computation)
        } else {
            (Computation, Surface)
        };
        spaces.place(p, ps);
        spaces.transition(&t.id, tsp);
    }
    CommSpaceNet { net, spaces }
}

// ------------------------------------------------------------------ groups

#[derive(Clone, Debug)]
pub enum GroupOp {
    Register(usize),
    Deregister(usize),
    Toggle(usize),
    Deliver { sender: usize, on_topic: bool },
}

pub const POOL: usize = 5;
pub const TOPIC: &str = "survey";

pub fn agent_pool(r: &mut ChaCha8Rng) -> Vec<AgentRef> {
    (0..POOL)
        .map(|i| {
            let st = if r.gen_bool(0.7) { Status::On } else { Status::Off };
            let topics: Vec<&str> = if r.gen_bool(0.8) {
                vec![TOPIC, "weather"]
            } else {
                vec!["weather"]
            };
            AgentRef::new(&format!("a{i}"), st, topics)
        })
        .collect()
}

pub fn group_ops(r: &mut ChaCha8Rng, len: usize) -> Vec<GroupOp> {
    (0..len)
        .map(|_| match r.gen_range(0..4) {
            0 => GroupOp::Register(r.gen_range(0..POOL)),
            1 => GroupOp::Deregister(r.gen_range(0..POOL)),
            2 => GroupOp::Toggle(r.gen_range(0..POOL)),
            _ => GroupOp::Deliver {
                sender: r.gen_range(0..POOL),
                on_topic: r.gen_bool(0.8),
            },
        })
        .collect()
}

/// Apply `ops` to a fresh group and to a plain reference model, checking
/// disjointness, exact delivery and dense sequence numbers after every
/// step. Returns the first discrepancy.
pub fn check_group_sequence(pool: &[AgentRef], ops: &[GroupOp], group_on: bool) -> Result<(), String> {
    let mut agents: Agents = pool.iter().map(|a| (a.id.clone(), a.clone())).collect();
    let mut g = GroupAgent::new("g", TOPIC);
    if !group_on {
        g.st = Status::Off;
    }
    // Reference: member id -> active?
    let mut model: BTreeMap<String, bool> = BTreeMap::new();
    let mut delivered = 0u64;
    for (step, op) in ops.iter().enumerate() {
        let fail = |why: String| Err(format!("step {step} {op:?}: {why}"));
        match op {
            GroupOp::Register(i) => {
                let a = agents[&format!("a{i}")].clone();
                let res = g.register(&a);
                if model.contains_key(&a.id) {
                    if res.is_ok() {
                        return fail("re-registration accepted".into());
                    }
                } else if a.topics.contains(TOPIC) {
                    model.insert(a.id.clone(), a.st == Status::On);
                }
            }
            GroupOp::Deregister(i) => {
                let id = format!("a{i}");
                g.deregister(&id);
                if model.get(&id) == Some(&true) {
                    model.remove(&id);
                }
            }
            GroupOp::Toggle(i) => {
                let id = format!("a{i}");
                let a = agents.get_mut(&id).unwrap();
                a.st = if a.st == Status::On { Status::Off } else { Status::On };
                let a = a.clone();
                if let Some(active) = model.get_mut(&id) {
                    g.switch_cmp(&a).map_err(|e| e.to_string())?;
                    *active = a.st == Status::On;
                }
            }
            GroupOp::Deliver { sender, on_topic } => {
                let from = format!("a{sender}");
                let topic = if *on_topic { TOPIC } else { "weather" };
                let before: BTreeMap<String, usize> = agents.iter().map(|(k, a)| (k.clone(), a.buffer.len())).collect();
                let res = g.deliver(
                    &mut agents,
                    Outgoing {
                        sender: from.clone(),
                        topic: topic.into(),
                        payload: ColorValue::Unit,
                    },
                );
                if !model.contains_key(&from) {
                    if res.is_ok() {
                        return fail("non-member sender accepted".into());
                    }
                    continue;
                }
                let d = res.map_err(|e| e.to_string())?;
                let want: Vec<String> = if group_on && *on_topic {
                    model.iter().filter(|(_, a)| **a).map(|(k, _)| k.clone()).collect()
                } else {
                    Vec::new()
                };
                if d.recipients != want {
                    return fail(format!("recipients {:?}, expected {want:?}", d.recipients));
                }
                for (k, a) in &agents {
                    let grew = a.buffer.len() - before[k];
                    let expect = usize::from(want.contains(k));
                    if grew != expect {
                        return fail(format!("{k} buffer grew by {grew}"));
                    }
                }
                if group_on && *on_topic {
                    if d.seq != Some(delivered) {
                        return fail(format!("sequence {:?}, expected {delivered}", d.seq));
                    }
                    delivered += 1;
                } else if d.seq.is_some() {
                    return fail("dropped message got a sequence number".into());
                }
            }
        }
        let active: BTreeSet<&String> = model.iter().filter(|(_, a)| **a).map(|(k, _)| k).collect();
        let inactive: BTreeSet<&String> = model.iter().filter(|(_, a)| !**a).map(|(k, _)| k).collect();
        if g.cmp_active.iter().collect::<BTreeSet<_>>() != active
            || g.cmp_nonactive.iter().collect::<BTreeSet<_>>() != inactive
        {
            return fail(format!(
                "compartments {:?}/{:?} differ from model {model:?}",
                g.cmp_active, g.cmp_nonactive
            ));
        }
        if g.cmp_active.intersection(&g.cmp_nonactive).next().is_some() {
            return fail("compartments overlap".into());
        }
        g.check_invariants(&agents).map_err(|e| format!("step {step}: {e}"))?;
        if g.next_seq != delivered {
            return fail(format!("next_seq {} after {delivered} deliveries", g.next_seq));
        }
        for a in agents.values() {
            if a.buffer.windows(2).any(|w| w[0].seq >= w[1].seq) || a.buffer.iter().any(|m| m.seq >= delivered) {
                return fail(format!("{} holds out-of-order or unissued sequence numbers", a.id));
            }
        }
    }
    Ok(())
}

/// Members `m0..m{n}` whose on/off pattern is the low bits of `mask`.
pub fn configured_group(n: usize, mask: u32) -> (GroupAgent, Agents) {
    let mut g = GroupAgent::new("g", TOPIC);
    let mut agents = Agents::new();
    for i in 0..n {
        let st = if mask >> i & 1 == 1 { Status::On } else { Status::Off };
        let a = AgentRef::new(&format!("m{i}"), st, [TOPIC]);
        g.register(&a).expect("fresh member");
        agents.insert(a.id.clone(), a);
    }
    (g, agents)
}

/// Post each message to the compiled fragment, running it to quiescence
/// between posts, and compare the inboxes with direct delivery.
pub fn fragment_agrees(g: &GroupAgent, agents: &Agents, msgs: &[Outgoing], seed: u64) -> Result<(), String> {
    let opts = FragmentOptions {
        topics: vec!["weather".into()],
        ..Default::default()
    };
    let cs = compile_group_to_net(g, &opts);
    let mut marking = cs.net.initial.clone();
    let mut direct = g.clone();
    let mut table = agents.clone();
    for m in msgs {
        direct.deliver(&mut table, m.clone()).map_err(|e| e.to_string())?;
        marking.add_token(PUBLISH, post_token(&cs.net, m));
        let (tr, halt) = run_with(
            &cs.net,
            marking,
            FiringPolicy::SeededUniformRandom,
            seed,
            10_000,
            &mut PolicyOnly,
        );
        if let Some(h) = halt {
            return Err(h);
        }
        marking = tr.final_marking;
    }
    let via_net = fragment_buffers(g, &marking);
    let want: BTreeMap<String, Vec<Message>> = table.into_iter().map(|(k, a)| (k, a.buffer)).collect();
    if via_net == want {
        Ok(())
    } else {
        Err(format!("net delivered {via_net:?}, direct delivered {want:?}"))
    }
}
