use std::fmt;

use serde::{Deserialize, Serialize};

use super::point::{check_dimension, Point, Sign};
use crate::error::{Error, Result};

/// One literal of a conjunction: coordinate `index` must equal `sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub index: usize,
    pub sign: Sign,
}

/// Structured identifier of a concept. Indices are 1-based and kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptKind {
    Constant(Sign),
    /// `sign · x_index`
    Dictator {
        index: usize,
        sign: Sign,
    },
    /// Product of the listed coordinates; the empty product is the constant +1.
    Parity(Vec<usize>),
    /// +1 iff every literal holds; the empty conjunction is the constant +1.
    Conjunction(Vec<Literal>),
    /// `sign(w·x − t)` with `sign(0) = +1`.
    Halfspace {
        weights: Vec<i64>,
        threshold: i64,
    },
    /// Full truth table for n ≤ 6; bit `b` is the value at the point with mask `b` (1 = +1).
    Table(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Eval {
    Const(Sign),
    Parity(u32),
    NegParity(u32),
    Conj { care: u32, want: u32 },
    Halfspace { weights: Vec<i64>, threshold: i64 },
    Table(u64),
}

/// A deterministic ±1 function on {±1}ⁿ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Concept {
    kind: ConceptKind,
    dim: usize,
    eval: Eval,
}

impl Concept {
    pub fn new(kind: ConceptKind, dim: usize) -> Result<Self> {
        check_dimension(dim)?;
        let in_range = |i: usize| -> Result<()> {
            if i == 0 || i > dim {
                Err(Error::Config(format!("coordinate {i} outside 1..={dim}")))
            } else {
                Ok(())
            }
        };
        let eval = match &kind {
            ConceptKind::Constant(s) => Eval::Const(*s),
            ConceptKind::Dictator { index, sign } => {
                in_range(*index)?;
                let mask = 1u32 << (index - 1);
                if sign.is_plus() {
                    Eval::Parity(mask)
                } else {
                    Eval::NegParity(mask)
                }
            }
            ConceptKind::Parity(idx) => {
                strictly_increasing(idx.iter().copied(), "parity")?;
                let mut mask = 0;
                for &i in idx {
                    in_range(i)?;
                    mask |= 1 << (i - 1);
                }
                Eval::Parity(mask)
            }
            ConceptKind::Conjunction(lits) => {
                strictly_increasing(lits.iter().map(|l| l.index), "conjunction")?;
                let (mut care, mut want) = (0u32, 0u32);
                for l in lits {
                    in_range(l.index)?;
                    care |= 1 << (l.index - 1);
                    if !l.sign.is_plus() {
                        want |= 1 << (l.index - 1);
                    }
                }
                Eval::Conj { care, want }
            }
            ConceptKind::Halfspace { weights, threshold } => {
                if weights.len() != dim {
                    return Err(Error::Config(format!("halfspace has {} weights in dimension {dim}", weights.len())));
                }
                Eval::Halfspace { weights: weights.clone(), threshold: *threshold }
            }
            ConceptKind::Table(bits) => {
                if dim > 6 {
                    return Err(Error::Config(format!("truth tables need dimension <= 6, got {dim}")));
                }
                if dim < 6 && bits >> (1u32 << dim) != 0 {
                    return Err(Error::Config(format!("table {bits:#x} too wide for dimension {dim}")));
                }
                Eval::Table(*bits)
            }
        };
        Ok(Concept { kind, dim, eval })
    }

    pub fn dictator(index: usize, sign: Sign, dim: usize) -> Result<Self> {
        Self::new(ConceptKind::Dictator { index, sign }, dim)
    }

    pub fn constant(sign: Sign, dim: usize) -> Result<Self> {
        Self::new(ConceptKind::Constant(sign), dim)
    }

    pub fn parity(mut indices: Vec<usize>, dim: usize) -> Result<Self> {
        indices.sort_unstable();
        Self::new(ConceptKind::Parity(indices), dim)
    }

    pub fn kind(&self) -> &ConceptKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &Point) -> Result<Sign> {
        if x.dimension() != self.dim {
            return Err(Error::Config(format!("point of dimension {} given to concept {} of dimension {}", x.dimension(), self, self.dim)));
        }
        Ok(self.eval(x))
    }

    /// Unchecked evaluation; the caller guarantees matching dimensions.
    #[inline]
    pub fn eval(&self, x: &Point) -> Sign {
        debug_assert_eq!(x.dimension(), self.dim);
        let b = x.bits();
        match &self.eval {
            Eval::Const(s) => *s,
            Eval::Parity(m) => Sign::from_bool((b & m).count_ones().is_multiple_of(2)),
            Eval::NegParity(m) => Sign::from_bool((b & m).count_ones() % 2 == 1),
            Eval::Conj { care, want } => Sign::from_bool(b & care == *want),
            Eval::Halfspace { weights, threshold } => {
                let dot: i64 = weights.iter().enumerate().map(|(j, w)| if b & (1 << j) == 0 { *w } else { -*w }).sum();
                Sign::of((dot - threshold) as f64)
            }
            Eval::Table(t) => Sign::from_bool((t >> b) & 1 == 1),
        }
    }

    /// Truth table as a vector indexed by point mask.
    pub fn truth_table(&self) -> Result<Vec<Sign>> {
        Ok(Point::all(self.dim)?.map(|x| self.eval(&x)).collect())
    }

    /// Parse a descriptor such as `dict:+2` or `parity:[1,3]` in dimension `dim`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("concept {text:?}: {why}"));
        let (tag, body) = text.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let kind = match tag {
            "const" => ConceptKind::Constant(parse_sign(body).ok_or_else(|| bad("expected +1 or -1"))?),
            "dict" => {
                let (sign, rest) = split_sign(body).ok_or_else(|| bad("expected +i or -i"))?;
                let index = rest.parse().map_err(|_| bad("bad index"))?;
                ConceptKind::Dictator { index, sign }
            }
            "parity" => ConceptKind::Parity(
                parse_list(body)
                    .ok_or_else(|| bad("expected [i,j,...]"))?
                    .iter()
                    .map(|s| s.parse().map_err(|_| bad("bad index")))
                    .collect::<Result<_>>()?,
            ),
            "conj" => ConceptKind::Conjunction(
                parse_list(body)
                    .ok_or_else(|| bad("expected [+i,-j,...]"))?
                    .iter()
                    .map(|s| {
                        let (sign, rest) = split_sign(s).ok_or_else(|| bad("literal needs a sign"))?;
                        let index = rest.parse().map_err(|_| bad("bad index"))?;
                        Ok(Literal { index, sign })
                    })
                    .collect::<Result<_>>()?,
            ),
            "halfspace" => {
                let (w, t) = body.split_once(";t=").ok_or_else(|| bad("expected w=[..];t=.."))?;
                let w = w.strip_prefix("w=").ok_or_else(|| bad("expected w=[..]"))?;
                let weights = parse_list(w)
                    .ok_or_else(|| bad("expected weight list"))?
                    .iter()
                    .map(|s| s.parse().map_err(|_| bad("bad weight")))
                    .collect::<Result<_>>()?;
                let threshold = t.parse().map_err(|_| bad("bad threshold"))?;
                ConceptKind::Halfspace { weights, threshold }
            }
            "table" => {
                let hex = body.strip_prefix("0x").ok_or_else(|| bad("expected 0x..."))?;
                ConceptKind::Table(u64::from_str_radix(hex, 16).map_err(|_| bad("bad hex"))?)
            }
            _ => return Err(bad("unknown kind")),
        };
        let c = Concept::new(kind, dim)?;
        if c.to_string() != text {
            return Err(bad(&format!("not in canonical form (expected {c})")));
        }
        Ok(c)
    }
}

fn strictly_increasing(mut it: impl Iterator<Item = usize>, what: &str) -> Result<()> {
    let mut prev = match it.next() {
        Some(p) => p,
        None => return Ok(()),
    };
    for i in it {
        if i <= prev {
            return Err(Error::Config(format!("{what} indices must be strictly increasing")));
        }
        prev = i;
    }
    Ok(())
}

fn parse_sign(s: &str) -> Option<Sign> {
    match s {
        "+1" => Some(Sign::Plus),
        "-1" => Some(Sign::Minus),
        _ => None,
    }
}

fn split_sign(s: &str) -> Option<(Sign, &str)> {
    if let Some(r) = s.strip_prefix('+') {
        Some((Sign::Plus, r))
    } else {
        s.strip_prefix('-').map(|r| (Sign::Minus, r))
    }
}

fn parse_list(s: &str) -> Option<Vec<&str>> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?;
    if inner.is_empty() {
        return Some(Vec::new());
    }
    Some(inner.split(',').collect())
}

fn sign_prefix(s: Sign) -> char {
    if s.is_plus() {
        '+'
    } else {
        '-'
    }
}

fn join<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ConceptKind::Constant(s) => write!(f, "const:{s}"),
            ConceptKind::Dictator { index, sign } => write!(f, "dict:{}{index}", sign_prefix(*sign)),
            ConceptKind::Parity(idx) => write!(f, "parity:[{}]", join(idx.iter())),
            ConceptKind::Conjunction(lits) => {
                write!(f, "conj:[{}]", join(lits.iter().map(|l| format!("{}{}", sign_prefix(l.sign), l.index))))
            }
            ConceptKind::Halfspace { weights, threshold } => {
                write!(f, "halfspace:w=[{}];t={threshold}", join(weights.iter()))
            }
            ConceptKind::Table(bits) => write!(f, "table:{bits:#x}"),
        }
    }
}
