//! Markings: one multiset of token values per place.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::color::ColorValue;
use crate::format::value_to_json;

/// A multiset of token values. Zero counts are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset(BTreeMap<ColorValue, u32>);

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: ColorValue, n: u32) {
        if n > 0 {
            *self.0.entry(value).or_insert(0) += n;
        }
    }

    /// Remove `n` copies; returns false (and leaves the multiset untouched)
    /// if fewer than `n` are present.
    pub fn remove(&mut self, value: &ColorValue, n: u32) -> bool {
        match self.0.get_mut(value) {
            Some(c) if *c >= n => {
                *c -= n;
                if *c == 0 {
                    self.0.remove(value);
                }
                true
            }
            _ => n == 0,
        }
    }

    pub fn count(&self, value: &ColorValue) -> u32 {
        self.0.get(value).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.values().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct values with their multiplicities, in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&ColorValue, u32)> {
        self.0.iter().map(|(v, &c)| (v, c))
    }

    /// Every occurrence, in canonical (sorted) order.
    pub fn sorted(&self) -> Vec<ColorValue> {
        self.entries()
            .flat_map(|(v, c)| std::iter::repeat_n(v.clone(), c as usize))
            .collect()
    }
}

impl FromIterator<ColorValue> for Multiset {
    fn from_iter<I: IntoIterator<Item = ColorValue>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for v in iter {
            m.add(v, 1);
        }
        m
    }
}

/// Lowercase hex SHA-256 of a canonical serialization.
pub type Digest256 = String;

/// The state of a net. Places that are absent hold no tokens; empty
/// multisets are never stored, so structural equality is marking equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(BTreeMap<String, Multiset>);

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, place: &str, value: ColorValue, n: u32) {
        if n == 0 {
            return;
        }
        self.0.entry(place.to_string()).or_default().add(value, n);
    }

    pub fn add_token(&mut self, place: &str, value: ColorValue) {
        self.add(place, value, 1);
    }

    pub fn remove(&mut self, place: &str, value: &ColorValue, n: u32) -> bool {
        let Some(ms) = self.0.get_mut(place) else {
            return n == 0;
        };
        let ok = ms.remove(value, n);
        if ms.is_empty() {
            self.0.remove(place);
        }
        ok
    }

    pub fn get(&self, place: &str) -> Option<&Multiset> {
        self.0.get(place)
    }

    pub fn count(&self, place: &str) -> usize {
        self.get(place).map_or(0, Multiset::len)
    }

    pub fn count_value(&self, place: &str, value: &ColorValue) -> u32 {
        self.get(place).map_or(0, |m| m.count(value))
    }

    pub fn total_tokens(&self) -> usize {
        self.0.values().map(Multiset::len).sum()
    }

    /// Non-empty places in id order.
    pub fn places(&self) -> impl Iterator<Item = (&str, &Multiset)> {
        self.0.iter().map(|(p, m)| (p.as_str(), m))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Restrict to the places accepted by `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&str) -> bool) {
        self.0.retain(|p, _| keep(p));
    }

    /// The canonical serialization: a JSON array of `[place, [tokens...]]`
    /// pairs, places sorted by id, tokens in canonical value order.
    pub fn canonical_json(&self) -> String {
        let doc: Vec<serde_json::Value> = self
            .places()
            .map(|(p, ms)| {
                serde_json::Value::Array(vec![
                    serde_json::Value::String(p.to_string()),
                    serde_json::Value::Array(ms.sorted().iter().map(value_to_json).collect()),
                ])
            })
            .collect();
        serde_json::Value::Array(doc).to_string()
    }

    pub fn digest(&self) -> Digest256 {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, ms)) in self.places().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}: [")?;
            for (j, v) in ms.sorted().iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "}}")
    }
}
