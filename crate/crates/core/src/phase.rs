//! Qudit Z-phases stored exactly as rational turns.
//!
//! A phase for dimension `D` is the diagonal `diag(1, e^{2πi t_1}, ..., e^{2πi t_{D-1}})`
//! with each `t_j ∈ [0, 1)` rational. Phases compose by componentwise
//! addition mod 1. The X-classical points are the phases `t_j = g j / D`,
//! forming a copy of `Z_D`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Turn = Ratio<i64>;

fn wrap(t: Turn) -> Turn {
    t - t.floor()
}

/// Parses `"p/q"`, `"p"` or a decimal-free integer into a turn in `[0,1)`.
pub fn parse_turn(s: &str) -> Result<Turn> {
    let s = s.trim();
    let t = match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: i64 = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if q == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ratio::new(p, q)
        }
        None => Ratio::from_integer(
            s.parse()
                .map_err(|_| Error::Parse(format!("bad turn literal {s:?}")))?,
        ),
    };
    Ok(wrap(t))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    turns: Vec<Turn>,
}

impl PhasePoint {
    pub fn new(turns: Vec<Turn>) -> Self {
        PhasePoint {
            turns: turns.into_iter().map(wrap).collect(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        PhasePoint {
            turns: vec![Ratio::from_integer(0); dim.saturating_sub(1)],
        }
    }

    /// The X-classical point `g ∈ Z_D` seen as a Z-phase.
    pub fn classical(dim: usize, g: u64) -> Self {
        let d = dim as i64;
        let g = g as i64;
        PhasePoint::new((1..d).map(|j| Ratio::new((g * j).rem_euclid(d), d)).collect())
    }

    pub fn from_pairs(pairs: &[[i64; 2]]) -> Result<Self> {
        pairs
            .iter()
            .map(|&[p, q]| {
                if q == 0 {
                    Err(Error::Parse("zero denominator in phase".into()))
                } else {
                    Ok(Ratio::new(p, q))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(PhasePoint::new)
    }

    pub fn to_pairs(&self) -> Vec<[i64; 2]> {
        self.turns.iter().map(|t| [*t.numer(), *t.denom()]).collect()
    }

    /// Parses a comma-separated list of `D-1` turns, e.g. `"1/9,8/9"`.
    pub fn parse(s: &str, dim: usize) -> Result<Self> {
        let turns = s
            .split(',')
            .map(parse_turn)
            .collect::<Result<Vec<_>>>()?;
        if turns.len() == 1 && turns[0] == Ratio::from_integer(0) && dim > 2 {
            return Ok(PhasePoint::zero(dim));
        }
        if turns.len() + 1 != dim {
            return Err(Error::Arity {
                expected: dim - 1,
                got: turns.len(),
            });
        }
        Ok(PhasePoint::new(turns))
    }

    pub fn dim(&self) -> usize {
        self.turns.len() + 1
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    pub fn is_zero(&self) -> bool {
        self.turns.iter().all(|t| *t.numer() == 0)
    }

    pub fn add(&self, other: &PhasePoint) -> PhasePoint {
        debug_assert_eq!(self.dim(), other.dim());
        PhasePoint::new(self.turns.iter().zip(&other.turns).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> PhasePoint {
        PhasePoint::new(self.turns.iter().map(|t| -t).collect())
    }

    pub fn scale(&self, n: i64) -> PhasePoint {
        PhasePoint::new(self.turns.iter().map(|t| t * n).collect())
    }

    pub fn sum<'a>(dim: usize, phases: impl IntoIterator<Item = &'a PhasePoint>) -> PhasePoint {
        phases
            .into_iter()
            .fold(PhasePoint::zero(dim), |acc, p| acc.add(p))
    }

    /// `Some(g)` iff this phase is the X-classical point `g`.
    pub fn classical_index(&self) -> Option<u64> {
        let d = self.dim() as i64;
        let Some(first) = self.turns.first() else {
            return Some(0);
        };
        let scaled = first * d;
        if !scaled.is_integer() {
            return None;
        }
        let g = scaled.to_integer().rem_euclid(d) as u64;
        (PhasePoint::classical(self.dim(), g) == *self).then_some(g)
    }

    pub fn is_classical(&self) -> bool {
        self.classical_index().is_some()
    }

    /// Least common denominator of the turns.
    pub fn denominator(&self) -> i64 {
        self.turns.iter().fold(1, |acc, t| acc.lcm(t.denom()))
    }

    /// Diagonal entries `(1, e^{2πi t_1}, ...)`.
    pub fn diagonal(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(1.0, 0.0))
            .chain(self.turns.iter().map(|t| {
                let x = *t.numer() as f64 / *t.denom() as f64;
                Complex64::from_polar(1.0, TAU * x)
            }))
            .collect()
    }

    /// Angles in radians.
    pub fn radians(&self) -> Vec<f64> {
        self.turns
            .iter()
            .map(|t| TAU * *t.numer() as f64 / *t.denom() as f64)
            .collect()
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.turns.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for PhasePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhasePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[i64; 2]>::deserialize(d)?;
        PhasePoint::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}
