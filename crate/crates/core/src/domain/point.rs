use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIMENSION: usize = 24;

/// A ±1 value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn from_bool(plus: bool) -> Self {
        if plus {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }

    /// Sign of a real score, ties to `Plus`.
    pub fn of(score: f64) -> Self {
        Sign::from_bool(score >= 0.0)
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bool(self == rhs)
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("{v} is not a sign")),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// A vertex of the hypercube {±1}ⁿ.
///
/// Stored as a bit mask: bit `j` set means coordinate `j + 1` equals −1.
/// Coordinates are numbered from 1 in every public API.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    bits: u32,
    dim: u8,
}

impl Point {
    pub fn new(bits: u32, dim: usize) -> Result<Self> {
        check_dimension(dim)?;
        if dim < 32 && bits >> dim != 0 {
            return Err(Error::Argument(format!("mask {bits:#x} has bits beyond dimension {dim}")));
        }
        Ok(Point { bits, dim: dim as u8 })
    }

    /// Point from a mask already known to fit in `dim` bits.
    pub(crate) fn from_bits(bits: u32, dim: usize) -> Self {
        debug_assert!(dim <= MAX_DIMENSION && (bits >> dim) == 0);
        Point { bits, dim: dim as u8 }
    }

    pub fn from_signs(signs: &[Sign]) -> Result<Self> {
        check_dimension(signs.len())?;
        let bits = signs.iter().enumerate().filter(|(_, s)| !s.is_plus()).fold(0u32, |acc, (j, _)| acc | (1 << j));
        Ok(Point { bits, dim: signs.len() as u8 })
    }

    pub fn from_values(values: &[i32]) -> Result<Self> {
        let signs = values.iter().map(|&v| Sign::try_from(v as i8).map_err(Error::Argument)).collect::<Result<Vec<_>>>()?;
        Self::from_signs(&signs)
    }

    pub fn dimension(&self) -> usize {
        self.dim as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Coordinate `index` (1-based).
    pub fn coord(&self, index: usize) -> Sign {
        debug_assert!(index >= 1 && index <= self.dimension());
        Sign::from_bool(self.bits & (1 << (index - 1)) == 0)
    }

    pub fn signs(&self) -> Vec<Sign> {
        (1..=self.dimension()).map(|i| self.coord(i)).collect()
    }

    /// All 2ⁿ points in mask order.
    pub fn all(dim: usize) -> Result<impl Iterator<Item = Point>> {
        check_dimension(dim)?;
        Ok((0..(1u32 << dim)).map(move |b| Point::from_bits(b, dim)))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dimension() {
            f.write_str(if self.coord(i).is_plus() { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for Point {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(Error::Parse(format!("point {s:?}: expected only '+' or '-'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Point::from_signs(&signs)
    }
}

pub(crate) fn check_dimension(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIMENSION {
        return Err(Error::Config(format!("dimension {dim} outside 1..={MAX_DIMENSION}")));
    }
    Ok(())
}

/// A point together with its label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledExample {
    pub point: Point,
    pub label: Sign,
}

impl LabeledExample {
    pub fn new(point: Point, label: Sign) -> Self {
        LabeledExample { point, label }
    }
}
