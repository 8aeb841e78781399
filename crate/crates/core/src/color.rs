//! Color sets and the token values that inhabit them.
//!
//! The color language is deliberately small: unit, bounded integer ranges,
//! enumerations and products. Every color set therefore has a finite domain,
//! which keeps binding enumeration and state-space construction decidable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Index carried by a symbol that has not been resolved against an enum yet.
pub const UNRESOLVED: u32 = u32::MAX;

/// An enum symbol. Ordered by its declaration index in the owning enum, then
/// by name, so multisets of symbols sort the way the enum was declared.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub index: u32,
    pub name: Arc<str>,
}

impl Symbol {
    pub fn is_resolved(&self) -> bool {
        self.index != UNRESOLVED
    }
}

/// A token value.
///
/// The derived ordering is the canonical one used everywhere: `Unit` sorts
/// before every `Int`, integers by value, symbols by declaration index and
/// tuples lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColorValue {
    Unit,
    Int(i64),
    Sym(Symbol),
    Tuple(Vec<ColorValue>),
}

impl ColorValue {
    pub fn int(v: i64) -> Self {
        ColorValue::Int(v)
    }

    /// A symbol whose index is filled in later by [`ColorSets::resolve`].
    pub fn sym_unresolved(name: &str) -> Self {
        ColorValue::Sym(Symbol {
            index: UNRESOLVED,
            name: Arc::from(name),
        })
    }

    pub fn tuple(elems: impl IntoIterator<Item = ColorValue>) -> Self {
        ColorValue::Tuple(elems.into_iter().collect())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            ColorValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            ColorValue::Sym(s) => Some(&s.name),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[ColorValue]> {
        match self {
            ColorValue::Tuple(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for ColorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorValue::Unit => write!(f, "()"),
            ColorValue::Int(v) => write!(f, "{v}"),
            ColorValue::Sym(s) => write!(f, "{}", s.name),
            ColorValue::Tuple(elems) => {
                write!(f, "(")?;
                for (i, e) in elems.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColorSetKind {
    Unit,
    IntRange { lo: i64, hi: i64 },
    Enum { symbols: Vec<String> },
    Product { components: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorSet {
    pub name: String,
    pub kind: ColorSetKind,
}

impl ColorSet {
    pub fn unit(name: &str) -> Self {
        Self::new(name, ColorSetKind::Unit)
    }

    pub fn int_range(name: &str, lo: i64, hi: i64) -> Self {
        Self::new(name, ColorSetKind::IntRange { lo, hi })
    }

    pub fn enumeration<S: AsRef<str>>(name: &str, symbols: impl IntoIterator<Item = S>) -> Self {
        let symbols = symbols.into_iter().map(|s| s.as_ref().to_string()).collect();
        Self::new(name, ColorSetKind::Enum { symbols })
    }

    pub fn product<S: AsRef<str>>(name: &str, components: impl IntoIterator<Item = S>) -> Self {
        let components = components.into_iter().map(|s| s.as_ref().to_string()).collect();
        Self::new(name, ColorSetKind::Product { components })
    }

    fn new(name: &str, kind: ColorSetKind) -> Self {
        ColorSet {
            name: name.to_string(),
            kind,
        }
    }
}

/// The color set declarations of one net, keyed by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColorSets(pub BTreeMap<String, ColorSet>);

impl ColorSets {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, cs: ColorSet) {
        self.0.insert(cs.name.clone(), cs);
    }

    pub fn get(&self, name: &str) -> Option<&ColorSet> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ColorSet> {
        self.0.values()
    }

    /// Build a resolved symbol value of enum `cs`, if `name` is one of its symbols.
    pub fn sym(&self, cs: &str, name: &str) -> Option<ColorValue> {
        match &self.get(cs)?.kind {
            ColorSetKind::Enum { symbols } => {
                let index = symbols.iter().position(|s| s == name)?;
                Some(ColorValue::Sym(Symbol {
                    index: index as u32,
                    name: Arc::from(name),
                }))
            }
            _ => None,
        }
    }

    /// Fill in symbol indices of `value` as seen through color set `cs`.
    /// Anything that does not fit is returned unchanged so that conformance
    /// checking can report it.
    pub fn resolve(&self, cs: &str, value: ColorValue) -> ColorValue {
        let Some(set) = self.get(cs) else {
            return value;
        };
        match (&set.kind, value) {
            (ColorSetKind::Enum { symbols }, ColorValue::Sym(s)) => match symbols.iter().position(|x| **x == *s.name) {
                Some(i) => ColorValue::Sym(Symbol {
                    index: i as u32,
                    name: s.name,
                }),
                None => ColorValue::Sym(Symbol {
                    index: UNRESOLVED,
                    name: s.name,
                }),
            },
            (ColorSetKind::Product { components }, ColorValue::Tuple(elems)) if components.len() == elems.len() => {
                ColorValue::Tuple(components.iter().zip(elems).map(|(c, e)| self.resolve(c, e)).collect())
            }
            (_, v) => v,
        }
    }

    /// True iff `value` has exactly the shape of color set `cs`.
    pub fn conforms(&self, cs: &str, value: &ColorValue) -> bool {
        let Some(set) = self.get(cs) else {
            return false;
        };
        match (&set.kind, value) {
            (ColorSetKind::Unit, ColorValue::Unit) => true,
            (ColorSetKind::IntRange { lo, hi }, ColorValue::Int(v)) => lo <= v && v <= hi,
            (ColorSetKind::Enum { symbols }, ColorValue::Sym(s)) => {
                symbols.get(s.index as usize).is_some_and(|n| **n == *s.name)
            }
            (ColorSetKind::Product { components }, ColorValue::Tuple(elems)) => {
                components.len() == elems.len() && components.iter().zip(elems).all(|(c, e)| self.conforms(c, e))
            }
            _ => false,
        }
    }

    pub fn is_int(&self, cs: &str) -> bool {
        matches!(self.get(cs).map(|s| &s.kind), Some(ColorSetKind::IntRange { .. }))
    }

    pub fn components(&self, cs: &str) -> Option<&[String]> {
        match &self.get(cs)?.kind {
            ColorSetKind::Product { components } => Some(components),
            _ => None,
        }
    }

    /// Every value of `cs` in canonical order, or `None` if the set is
    /// malformed or its domain exceeds `limit`.
    pub fn domain(&self, cs: &str, limit: usize) -> Option<Vec<ColorValue>> {
        let set = self.get(cs)?;
        let values = match &set.kind {
            ColorSetKind::Unit => vec![ColorValue::Unit],
            ColorSetKind::IntRange { lo, hi } => {
                if hi < lo || (hi - lo) as u128 >= limit as u128 {
                    return None;
                }
                (*lo..=*hi).map(ColorValue::Int).collect()
            }
            ColorSetKind::Enum { symbols } => symbols
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    ColorValue::Sym(Symbol {
                        index: i as u32,
                        name: Arc::from(s.as_str()),
                    })
                })
                .collect(),
            ColorSetKind::Product { components } => {
                let mut acc: Vec<Vec<ColorValue>> = vec![Vec::new()];
                for c in components {
                    let dom = self.domain(c, limit)?;
                    let mut next = Vec::with_capacity(acc.len() * dom.len());
                    for prefix in &acc {
                        for v in &dom {
                            let mut p = prefix.clone();
                            p.push(v.clone());
                            next.push(p);
                        }
                    }
                    if next.len() > limit {
                        return None;
                    }
                    acc = next;
                }
                acc.into_iter().map(ColorValue::Tuple).collect()
            }
        };
        (values.len() <= limit).then_some(values)
    }

    /// Structural problems of the declarations: `(color set, reason)` pairs.
    pub fn problems(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for set in self.iter() {
            match &set.kind {
                ColorSetKind::Unit => {}
                ColorSetKind::IntRange { lo, hi } => {
                    if lo > hi {
                        out.push((set.name.clone(), format!("empty range [{lo},{hi}]")));
                    }
                }
                ColorSetKind::Enum { symbols } => {
                    if symbols.is_empty() {
                        out.push((set.name.clone(), "enum has no symbols".into()));
                    }
                    let mut seen = BTreeSet::new();
                    for s in symbols {
                        if !seen.insert(s) {
                            out.push((set.name.clone(), format!("duplicate symbol {s}")));
                        }
                    }
                }
                ColorSetKind::Product { components } => {
                    for c in components {
                        if !self.contains(c) {
                            out.push((set.name.clone(), format!("unknown component {c}")));
                        }
                    }
                    if self.reaches_itself(&set.name) {
                        out.push((set.name.clone(), "cyclic product".into()));
                    }
                }
            }
        }
        out
    }

    fn reaches_itself(&self, start: &str) -> bool {
        let mut stack: Vec<&str> = self
            .components(start)
            .into_iter()
            .flatten()
            .map(|s| s.as_str())
            .collect();
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if n == start {
                return true;
            }
            if seen.insert(n) {
                stack.extend(self.components(n).into_iter().flatten().map(|s| s.as_str()));
            }
        }
        false
    }
}
