use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A relation from a `source`-element set to a `target`-element set, stored
/// as its set of `(source, target)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub source: usize,
    pub target: usize,
    pairs: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RelationDump {
    source: usize,
    target: usize,
    /// `matrix[t][s]` is true iff `s` relates to `t`.
    matrix: Vec<Vec<bool>>,
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut matrix = vec![vec![false; self.source]; self.target];
        for &(a, b) in &self.pairs {
            matrix[b][a] = true;
        }
        RelationDump {
            source: self.source,
            target: self.target,
            matrix,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dump = RelationDump::deserialize(d)?;
        if dump.matrix.len() != dump.target || dump.matrix.iter().any(|r| r.len() != dump.source) {
            return Err(serde::de::Error::custom("relation matrix shape mismatch"));
        }
        let pairs = dump
            .matrix
            .iter()
            .enumerate()
            .flat_map(|(t, row)| row.iter().enumerate().filter(|(_, &b)| b).map(move |(s, _)| (s, t)))
            .collect();
        Ok(Relation {
            source: dump.source,
            target: dump.target,
            pairs,
        })
    }
}

impl Relation {
    pub fn new(source: usize, target: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        if pairs.iter().any(|&(a, b)| a >= source || b >= target) {
            return Err(Error::InvalidInput("relation pair out of range".into()));
        }
        Ok(Relation {
            source,
            target,
            pairs,
        })
    }

    pub fn identity(n: usize) -> Self {
        Relation {
            source: n,
            target: n,
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    /// A state: a relation from the one-point set.
    pub fn state(target: usize, elements: impl IntoIterator<Item = usize>) -> Self {
        Relation {
            source: 1,
            target,
            pairs: elements.into_iter().map(|t| (0, t)).collect(),
        }
    }

    /// Permutation of `perm.len()` factors of size `n`, factor `i` going to
    /// position `perm[i]`.
    pub fn permutation(n: usize, perm: &[usize]) -> Self {
        let k = perm.len();
        let size = n.pow(k as u32);
        let pairs = (0..size).map(|idx| {
            let mut digits = vec![0; k];
            let mut rest = idx;
            for slot in digits.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            let mut out = vec![0; k];
            for (i, &p) in perm.iter().enumerate() {
                out[p] = digits[i];
            }
            (idx, out.iter().fold(0, |acc, &x| acc * n + x))
        });
        Relation {
            source: size,
            target: size,
            pairs: pairs.collect(),
        }
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    /// Targets of a state.
    pub fn image(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|&(_, b)| b).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dagger(&self) -> Relation {
        Relation {
            source: self.target,
            target: self.source,
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &Relation) -> Relation {
        assert_eq!(self.target, after.source, "relation composition shape mismatch");
        let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(b, c) in &after.pairs {
            by_source.entry(b).or_default().push(c);
        }
        let mut pairs = BTreeSet::new();
        for &(a, b) in &self.pairs {
            if let Some(cs) = by_source.get(&b) {
                pairs.extend(cs.iter().map(|&c| (a, c)));
            }
        }
        Relation {
            source: self.source,
            target: after.target,
            pairs,
        }
    }

    /// `self ⊗ other`, with the first factor most significant.
    pub fn tensor(&self, other: &Relation) -> Relation {
        let mut pairs = BTreeSet::new();
        for &(a, b) in &self.pairs {
            for &(c, d) in &other.pairs {
                pairs.insert((a * other.source + c, b * other.target + d));
            }
        }
        Relation {
            source: self.source * other.source,
            target: self.target * other.target,
            pairs,
        }
    }
}
