//! Net structure: places, transitions, arc inscriptions and guards, plus the
//! structural/typing validator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::color::{ColorSet, ColorSets, ColorValue};
use crate::marking::Marking;

/// Variable name → value. Ordered by variable name, so comparing two
/// bindings of the same transition compares their values in name order.
pub type Binding = BTreeMap<String, ColorValue>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub id: String,
    pub name: String,
    pub colorset: String,
}

/// Input arc inscription.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArcPattern {
    Var(String),
    Lit(ColorValue),
    Tuple(Vec<ArcPattern>),
}

/// Output arc inscription.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArcExpr {
    Var(String),
    Lit(ColorValue),
    Tuple(Vec<ArcExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Var(String),
    Lit(ColorValue),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn is_ordering(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    True,
    Cmp(CmpOp, Operand, Operand),
    And(Vec<Guard>),
    Or(Vec<Guard>),
    Not(Box<Guard>),
}

impl Guard {
    pub fn cmp(op: CmpOp, a: Operand, b: Operand) -> Self {
        Guard::Cmp(op, a, b)
    }

    pub fn var_eq(a: &str, b: &str) -> Self {
        Guard::Cmp(CmpOp::Eq, Operand::Var(a.into()), Operand::Var(b.into()))
    }

    pub fn var_is(a: &str, v: ColorValue) -> Self {
        Guard::Cmp(CmpOp::Eq, Operand::Var(a.into()), Operand::Lit(v))
    }

    /// Evaluate under a binding. Unbound variables and ordering comparisons
    /// between non-integers evaluate to false; the validator rules both out.
    pub fn eval(&self, b: &Binding) -> bool {
        match self {
            Guard::True => true,
            Guard::And(gs) => gs.iter().all(|g| g.eval(b)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval(b)),
            Guard::Not(g) => !g.eval(b),
            Guard::Cmp(op, l, r) => {
                let (Some(l), Some(r)) = (operand_value(l, b), operand_value(r, b)) else {
                    return false;
                };
                match op {
                    CmpOp::Eq => l == r,
                    CmpOp::Ne => l != r,
                    _ => match (l.as_int(), r.as_int()) {
                        (Some(x), Some(y)) => match op {
                            CmpOp::Lt => x < y,
                            CmpOp::Le => x <= y,
                            CmpOp::Gt => x > y,
                            CmpOp::Ge => x >= y,
                            CmpOp::Eq | CmpOp::Ne => unreachable!(),
                        },
                        _ => false,
                    },
                }
            }
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Guard::True => {}
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.vars(out)),
            Guard::Not(g) => g.vars(out),
            Guard::Cmp(_, l, r) => {
                for o in [l, r] {
                    if let Operand::Var(v) = o {
                        out.insert(v.clone());
                    }
                }
            }
        }
    }

    /// Resolve symbol literals against the type of the variable they are
    /// compared with.
    pub fn resolve_symbols(&mut self, var_types: &BTreeMap<String, String>, cs: &ColorSets) {
        match self {
            Guard::True => {}
            Guard::And(gs) | Guard::Or(gs) => gs.iter_mut().for_each(|g| g.resolve_symbols(var_types, cs)),
            Guard::Not(g) => g.resolve_symbols(var_types, cs),
            Guard::Cmp(_, l, r) => {
                let resolve = |lit: &mut Operand, other: &Operand| {
                    if let (Operand::Lit(v), Operand::Var(name)) = (&mut *lit, other) {
                        if let Some(ty) = var_types.get(name) {
                            *v = cs.resolve(ty, std::mem::replace(v, ColorValue::Unit));
                        }
                    }
                };
                let (lc, rc) = (l.clone(), r.clone());
                resolve(l, &rc);
                resolve(r, &lc);
            }
        }
    }
}

fn operand_value<'a>(o: &'a Operand, b: &'a Binding) -> Option<&'a ColorValue> {
    match o {
        Operand::Var(v) => b.get(v),
        Operand::Lit(v) => Some(v),
    }
}

impl ArcPattern {
    pub fn var(name: &str) -> Self {
        ArcPattern::Var(name.into())
    }

    /// Try to match `value`, extending `binding`. Repeated variables must
    /// bind equal values.
    pub fn matches(&self, value: &ColorValue, binding: &mut Binding) -> bool {
        match self {
            ArcPattern::Var(name) => match binding.get(name) {
                Some(bound) => bound == value,
                None => {
                    binding.insert(name.clone(), value.clone());
                    true
                }
            },
            ArcPattern::Lit(lit) => lit == value,
            ArcPattern::Tuple(ps) => match value {
                ColorValue::Tuple(vs) if vs.len() == ps.len() => ps.iter().zip(vs).all(|(p, v)| p.matches(v, binding)),
                _ => false,
            },
        }
    }

    /// The token this pattern denotes under a total binding.
    pub fn instantiate(&self, binding: &Binding) -> Option<ColorValue> {
        match self {
            ArcPattern::Var(n) => binding.get(n).cloned(),
            ArcPattern::Lit(v) => Some(v.clone()),
            ArcPattern::Tuple(ps) => ps
                .iter()
                .map(|p| p.instantiate(binding))
                .collect::<Option<Vec<_>>>()
                .map(ColorValue::Tuple),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ArcPattern::Var(n) => {
                out.insert(n.clone());
            }
            ArcPattern::Lit(_) => {}
            ArcPattern::Tuple(ps) => ps.iter().for_each(|p| p.vars(out)),
        }
    }

    fn resolve(&mut self, cs_name: &str, cs: &ColorSets) {
        match self {
            ArcPattern::Var(_) => {}
            ArcPattern::Lit(v) => *v = cs.resolve(cs_name, std::mem::replace(v, ColorValue::Unit)),
            ArcPattern::Tuple(ps) => {
                if let Some(comps) = cs.components(cs_name) {
                    if comps.len() == ps.len() {
                        for (p, c) in ps.iter_mut().zip(comps.to_vec()) {
                            p.resolve(&c, cs);
                        }
                    }
                }
            }
        }
    }
}

impl ArcExpr {
    pub fn var(name: &str) -> Self {
        ArcExpr::Var(name.into())
    }

    pub fn eval(&self, binding: &Binding) -> Option<ColorValue> {
        match self {
            ArcExpr::Var(n) => binding.get(n).cloned(),
            ArcExpr::Lit(v) => Some(v.clone()),
            ArcExpr::Tuple(es) => es
                .iter()
                .map(|e| e.eval(binding))
                .collect::<Option<Vec<_>>>()
                .map(ColorValue::Tuple),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ArcExpr::Var(n) => {
                out.insert(n.clone());
            }
            ArcExpr::Lit(_) => {}
            ArcExpr::Tuple(es) => es.iter().for_each(|e| e.vars(out)),
        }
    }

    fn resolve(&mut self, cs_name: &str, cs: &ColorSets) {
        match self {
            ArcExpr::Var(_) => {}
            ArcExpr::Lit(v) => *v = cs.resolve(cs_name, std::mem::replace(v, ColorValue::Unit)),
            ArcExpr::Tuple(es) => {
                if let Some(comps) = cs.components(cs_name) {
                    if comps.len() == es.len() {
                        for (e, c) in es.iter_mut().zip(comps.to_vec()) {
                            e.resolve(&c, cs);
                        }
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputArc {
    pub place: String,
    pub pattern: ArcPattern,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputArc {
    pub place: String,
    pub expr: ArcExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    pub name: String,
    pub inputs: Vec<InputArc>,
    pub outputs: Vec<OutputArc>,
    pub guard: Guard,
}

impl Transition {
    pub fn new(id: &str) -> Self {
        Transition {
            id: id.into(),
            name: id.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            guard: Guard::True,
        }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn input(mut self, place: &str, pattern: ArcPattern) -> Self {
        self.inputs.push(InputArc {
            place: place.into(),
            pattern,
        });
        self
    }

    pub fn output(mut self, place: &str, expr: ArcExpr) -> Self {
        self.outputs.push(OutputArc {
            place: place.into(),
            expr,
        });
        self
    }

    pub fn guard(mut self, guard: Guard) -> Self {
        self.guard = guard;
        self
    }

    /// Variables bound by the input patterns.
    pub fn input_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in &self.inputs {
            a.pattern.vars(&mut out);
        }
        out
    }

    /// Every place this transition touches.
    pub fn arc_places(&self) -> BTreeSet<&str> {
        self.inputs
            .iter()
            .map(|a| a.place.as_str())
            .chain(self.outputs.iter().map(|a| a.place.as_str()))
            .collect()
    }
}

/// A colored net with its initial marking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Net {
    pub colorsets: ColorSets,
    pub places: BTreeMap<String, Place>,
    pub transitions: BTreeMap<String, Transition>,
    pub initial: Marking,
}

impl Net {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn colorset(&mut self, cs: ColorSet) -> &mut Self {
        self.colorsets.insert(cs);
        self
    }

    pub fn place(&mut self, id: &str, colorset: &str) -> &mut Self {
        self.places.insert(
            id.into(),
            Place {
                id: id.into(),
                name: id.into(),
                colorset: colorset.into(),
            },
        );
        self
    }

    pub fn add_transition(&mut self, t: Transition) -> &mut Self {
        self.transitions.insert(t.id.clone(), t);
        self
    }

    pub fn token(&mut self, place: &str, value: ColorValue) -> &mut Self {
        self.initial.add_token(place, value);
        self
    }

    pub fn tokens(&mut self, place: &str, value: ColorValue, n: u32) -> &mut Self {
        self.initial.add(place, value, n);
        self
    }

    /// Resolved symbol of enum `cs`. Panics if absent; intended for builders
    /// that declared the enum themselves.
    pub fn sym(&self, cs: &str, name: &str) -> ColorValue {
        self.colorsets
            .sym(cs, name)
            .unwrap_or_else(|| panic!("{name} is not a symbol of {cs}"))
    }

    /// Resolve symbol names written without declaration indices (literals in
    /// inscriptions and guards, initial tokens) against their context types.
    pub fn resolve_symbols(&mut self) {
        let cs = self.colorsets.clone();
        let place_cs: BTreeMap<String, String> = self
            .places
            .values()
            .map(|p| (p.id.clone(), p.colorset.clone()))
            .collect();
        for t in self.transitions.values_mut() {
            for a in &mut t.inputs {
                if let Some(c) = place_cs.get(&a.place) {
                    a.pattern.resolve(c, &cs);
                }
            }
            for a in &mut t.outputs {
                if let Some(c) = place_cs.get(&a.place) {
                    a.expr.resolve(c, &cs);
                }
            }
        }
        let typed: Vec<(String, BTreeMap<String, String>)> = self
            .transitions
            .values()
            .map(|t| (t.id.clone(), infer_var_types(self, t).0))
            .collect();
        for (tid, types) in typed {
            if let Some(t) = self.transitions.get_mut(&tid) {
                t.guard.resolve_symbols(&types, &cs);
            }
        }
        let mut m = Marking::new();
        for (p, ms) in self.initial.places() {
            for (v, n) in ms.entries() {
                let v = match place_cs.get(p) {
                    Some(c) => cs.resolve(c, v.clone()),
                    None => v.clone(),
                };
                m.add(p, v, n);
            }
        }
        self.initial = m;
    }

    pub fn transition(&self, id: &str) -> Option<&Transition> {
        self.transitions.get(id)
    }

    pub fn place_colorset(&self, place: &str) -> Option<&str> {
        self.places.get(place).map(|p| p.colorset.as_str())
    }
}

/// A structural, typing or layering problem. `Display` renders the
/// machine-readable `CODE<TAB>detail` line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    DuplicateId {
        kind: &'static str,
        id: String,
    },
    InvalidColorSet {
        name: String,
        reason: String,
    },
    UnknownColorSet {
        owner: String,
        colorset: String,
    },
    UnknownPlace {
        transition: String,
        place: String,
    },
    PatternTypeError {
        transition: String,
        place: String,
        detail: String,
    },
    ExprTypeError {
        transition: String,
        place: String,
        detail: String,
    },
    VariableTypeConflict {
        transition: String,
        var: String,
    },
    UnboundVariable {
        transition: String,
        var: String,
    },
    GuardTypeError {
        transition: String,
        detail: String,
    },
    UnknownMarkingPlace {
        place: String,
    },
    MarkingTypeError {
        place: String,
        value: String,
    },
    Unassigned {
        kind: &'static str,
        id: String,
    },
    UnknownAssignment {
        kind: &'static str,
        id: String,
    },
    UnknownGate {
        transition: String,
    },
    InvalidGroup {
        group: String,
        detail: String,
    },
    Bypass {
        transition: String,
        place: String,
        from: crate::space::SpaceKind,
        to: crate::space::SpaceKind,
    },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::DuplicateId { .. } => "DUPLICATE_ID",
            Violation::InvalidColorSet { .. } => "INVALID_COLORSET",
            Violation::UnknownColorSet { .. } => "UNKNOWN_COLORSET",
            Violation::UnknownPlace { .. } => "UNKNOWN_PLACE",
            Violation::PatternTypeError { .. } => "PATTERN_TYPE",
            Violation::ExprTypeError { .. } => "EXPR_TYPE",
            Violation::VariableTypeConflict { .. } => "VAR_TYPE_CONFLICT",
            Violation::UnboundVariable { .. } => "UNBOUND_VAR",
            Violation::GuardTypeError { .. } => "GUARD_TYPE",
            Violation::UnknownMarkingPlace { .. } => "UNKNOWN_MARKING_PLACE",
            Violation::MarkingTypeError { .. } => "MARKING_TYPE",
            Violation::Unassigned { .. } => "UNASSIGNED",
            Violation::UnknownAssignment { .. } => "UNKNOWN_ASSIGNMENT",
            Violation::UnknownGate { .. } => "UNKNOWN_GATE",
            Violation::InvalidGroup { .. } => "INVALID_GROUP",
            Violation::Bypass { .. } => "BYPASS",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t", self.code())?;
        match self {
            Violation::DuplicateId { kind, id } => write!(f, "{kind} {id}"),
            Violation::InvalidColorSet { name, reason } => write!(f, "{name} {reason}"),
            Violation::UnknownColorSet { owner, colorset } => write!(f, "{owner} {colorset}"),
            Violation::UnknownPlace { transition, place } => write!(f, "{transition} {place}"),
            Violation::PatternTypeError {
                transition,
                place,
                detail,
            }
            | Violation::ExprTypeError {
                transition,
                place,
                detail,
            } => write!(f, "{transition} {place} {detail}"),
            Violation::VariableTypeConflict { transition, var } | Violation::UnboundVariable { transition, var } => {
                write!(f, "{transition} {var}")
            }
            Violation::GuardTypeError { transition, detail } => write!(f, "{transition} {detail}"),
            Violation::UnknownMarkingPlace { place } => write!(f, "{place}"),
            Violation::MarkingTypeError { place, value } => write!(f, "{place} {value}"),
            Violation::Unassigned { kind, id } | Violation::UnknownAssignment { kind, id } => {
                write!(f, "{kind} {id}")
            }
            Violation::UnknownGate { transition } => write!(f, "{transition}"),
            Violation::InvalidGroup { group, detail } => write!(f, "{group} {detail}"),
            Violation::Bypass {
                transition, from, to, ..
            } => write!(f, "{transition} {from}->{to}"),
        }
    }
}

/// Infer variable types from input patterns. Returns the type map and the
/// variables that were used at two different types.
fn infer_var_types(net: &Net, t: &Transition) -> (BTreeMap<String, String>, BTreeSet<String>) {
    let mut types = BTreeMap::new();
    let mut conflicts = BTreeSet::new();
    for a in &t.inputs {
        if let Some(cs) = net.place_colorset(&a.place) {
            collect_pattern_types(&net.colorsets, &a.pattern, cs, &mut types, &mut conflicts);
        }
    }
    (types, conflicts)
}

fn collect_pattern_types(
    cs: &ColorSets,
    p: &ArcPattern,
    ty: &str,
    types: &mut BTreeMap<String, String>,
    conflicts: &mut BTreeSet<String>,
) {
    match p {
        ArcPattern::Var(v) => match types.get(v) {
            Some(prev) if prev != ty => {
                conflicts.insert(v.clone());
            }
            Some(_) => {}
            None => {
                types.insert(v.clone(), ty.to_string());
            }
        },
        ArcPattern::Lit(_) => {}
        ArcPattern::Tuple(ps) => {
            if let Some(comps) = cs.components(ty) {
                if comps.len() == ps.len() {
                    for (p, c) in ps.iter().zip(comps) {
                        collect_pattern_types(cs, p, c, types, conflicts);
                    }
                }
            }
        }
    }
}

fn check_pattern(cs: &ColorSets, p: &ArcPattern, ty: &str) -> Result<(), String> {
    match p {
        ArcPattern::Var(_) => Ok(()),
        ArcPattern::Lit(v) => {
            if cs.conforms(ty, v) {
                Ok(())
            } else {
                Err(format!("literal {v} does not conform to {ty}"))
            }
        }
        ArcPattern::Tuple(ps) => match cs.components(ty) {
            Some(comps) if comps.len() == ps.len() => {
                for (p, c) in ps.iter().zip(comps) {
                    check_pattern(cs, p, c)?;
                }
                Ok(())
            }
            _ => Err(format!("tuple of arity {} does not fit {ty}", ps.len())),
        },
    }
}

fn check_expr(cs: &ColorSets, e: &ArcExpr, ty: &str, types: &BTreeMap<String, String>) -> Result<(), String> {
    match e {
        ArcExpr::Var(v) => match types.get(v) {
            Some(t) if t == ty => Ok(()),
            Some(t) => Err(format!("variable {v} has type {t}, expected {ty}")),
            // unbound variables are reported separately
            None => Ok(()),
        },
        ArcExpr::Lit(v) => {
            if cs.conforms(ty, v) {
                Ok(())
            } else {
                Err(format!("literal {v} does not conform to {ty}"))
            }
        }
        ArcExpr::Tuple(es) => match cs.components(ty) {
            Some(comps) if comps.len() == es.len() => {
                for (e, c) in es.iter().zip(comps) {
                    check_expr(cs, e, c, types)?;
                }
                Ok(())
            }
            _ => Err(format!("tuple of arity {} does not fit {ty}", es.len())),
        },
    }
}

fn check_guard(cs: &ColorSets, g: &Guard, types: &BTreeMap<String, String>, out: &mut Vec<String>) {
    match g {
        Guard::True => {}
        Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| check_guard(cs, g, types, out)),
        Guard::Not(g) => check_guard(cs, g, types, out),
        Guard::Cmp(op, l, r) => {
            let ty_of = |o: &Operand| match o {
                Operand::Var(v) => types.get(v).cloned(),
                Operand::Lit(_) => None,
            };
            match (l, r, ty_of(l), ty_of(r)) {
                (Operand::Var(a), Operand::Var(b), Some(ta), Some(tb)) => {
                    if ta != tb {
                        out.push(format!("{a}:{ta} compared with {b}:{tb}"));
                    } else if op.is_ordering() && !cs.is_int(&ta) {
                        out.push(format!("{} on non-integer {a}", op.symbol()));
                    }
                }
                (Operand::Var(a), Operand::Lit(v), Some(ta), _) | (Operand::Lit(v), Operand::Var(a), _, Some(ta)) => {
                    if !cs.conforms(&ta, v) {
                        out.push(format!("literal {v} does not conform to {a}:{ta}"));
                    } else if op.is_ordering() && !cs.is_int(&ta) {
                        out.push(format!("{} on non-integer {a}", op.symbol()));
                    }
                }
                (Operand::Lit(a), Operand::Lit(b), _, _) => {
                    let both_int = a.as_int().is_some() && b.as_int().is_some();
                    if op.is_ordering() && !both_int {
                        out.push(format!("{} on non-integer literals", op.symbol()));
                    }
                    let unresolved = |v: &ColorValue| matches!(v, ColorValue::Sym(s) if !s.is_resolved());
                    if unresolved(a) || unresolved(b) {
                        out.push("untyped symbol literal".into());
                    }
                }
                // unbound variables are reported separately
                _ => {}
            }
        }
    }
}

/// Every structural and typing violation of `net`; empty iff well-formed.
pub fn validate_net(net: &Net) -> Vec<Violation> {
    let mut out = Vec::new();
    let cs = &net.colorsets;
    for (name, reason) in cs.problems() {
        out.push(Violation::InvalidColorSet { name, reason });
    }
    for p in net.places.values() {
        if !cs.contains(&p.colorset) {
            out.push(Violation::UnknownColorSet {
                owner: p.id.clone(),
                colorset: p.colorset.clone(),
            });
        }
    }
    for t in net.transitions.values() {
        let (types, conflicts) = infer_var_types(net, t);
        for v in conflicts {
            out.push(Violation::VariableTypeConflict {
                transition: t.id.clone(),
                var: v,
            });
        }
        for a in &t.inputs {
            match net.place_colorset(&a.place) {
                None => out.push(Violation::UnknownPlace {
                    transition: t.id.clone(),
                    place: a.place.clone(),
                }),
                Some(ty) if cs.contains(ty) => {
                    if let Err(detail) = check_pattern(cs, &a.pattern, ty) {
                        out.push(Violation::PatternTypeError {
                            transition: t.id.clone(),
                            place: a.place.clone(),
                            detail,
                        });
                    }
                }
                Some(_) => {}
            }
        }
        for a in &t.outputs {
            match net.place_colorset(&a.place) {
                None => out.push(Violation::UnknownPlace {
                    transition: t.id.clone(),
                    place: a.place.clone(),
                }),
                Some(ty) if cs.contains(ty) => {
                    if let Err(detail) = check_expr(cs, &a.expr, ty, &types) {
                        out.push(Violation::ExprTypeError {
                            transition: t.id.clone(),
                            place: a.place.clone(),
                            detail,
                        });
                    }
                }
                Some(_) => {}
            }
        }
        let mut used = BTreeSet::new();
        for a in &t.outputs {
            a.expr.vars(&mut used);
        }
        t.guard.vars(&mut used);
        for v in used {
            if !types.contains_key(&v) && !t.input_vars().contains(&v) {
                out.push(Violation::UnboundVariable {
                    transition: t.id.clone(),
                    var: v,
                });
            }
        }
        let mut guard_problems = Vec::new();
        check_guard(cs, &t.guard, &types, &mut guard_problems);
        for detail in guard_problems {
            out.push(Violation::GuardTypeError {
                transition: t.id.clone(),
                detail,
            });
        }
    }
    for (p, ms) in net.initial.places() {
        match net.place_colorset(p) {
            None => out.push(Violation::UnknownMarkingPlace { place: p.into() }),
            Some(ty) => {
                for (v, _) in ms.entries() {
                    if !cs.conforms(ty, v) {
                        out.push(Violation::MarkingTypeError {
                            place: p.into(),
                            value: v.to_string(),
                        });
                    }
                }
            }
        }
    }
    out
}
