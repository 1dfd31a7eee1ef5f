use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::stream::{label, RandomnessStream};
use crate::domain::point::{check_dimension, Point};
use crate::error::{Error, Result};

/// Largest dimension whose full hypercube we enumerate.
pub const MAX_ENUMERABLE_DIMENSION: usize = 20;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Uniform,
    /// P(coordinate i = +1)
    Product(Vec<f64>),
    Explicit {
        support: Vec<(Point, f64)>,
        cumulative: Vec<f64>,
    },
}

/// A samplable distribution 𝒟 on {±1}ⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct MarginalDistribution {
    dim: usize,
    kind: Kind,
}

impl MarginalDistribution {
    pub fn uniform(dim: usize) -> Result<Self> {
        check_dimension(dim)?;
        Ok(MarginalDistribution { dim, kind: Kind::Uniform })
    }

    /// Independent coordinates with P(x_i = +1) = `biases[i-1]`.
    pub fn product(biases: Vec<f64>) -> Result<Self> {
        check_dimension(biases.len())?;
        if let Some(p) = biases.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("product bias {p} outside [0, 1]")));
        }
        Ok(MarginalDistribution { dim: biases.len(), kind: Kind::Product(biases) })
    }

    /// Finite support with explicit probabilities summing to 1.
    pub fn explicit(dim: usize, support: Vec<(Point, f64)>) -> Result<Self> {
        check_dimension(dim)?;
        if support.is_empty() {
            return Err(Error::Config("explicit distribution has empty support".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (x, p) in &support {
            if x.dimension() != dim {
                return Err(Error::Config(format!("support point {x} not of dimension {dim}")));
            }
            if !(*p >= 0.0) {
                return Err(Error::Config(format!("negative probability {p} at {x}")));
            }
            if !seen.insert(*x) {
                return Err(Error::Config(format!("support point {x} listed twice")));
            }
        }
        let total: f64 = support.iter().map(|s| s.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("support probabilities sum to {total}, not 1")));
        }
        let cumulative = support
            .iter()
            .scan(0.0, |acc, (_, p)| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(MarginalDistribution { dim, kind: Kind::Explicit { support, cumulative } })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, Kind::Uniform)
    }

    /// One draw from `rng`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match &self.kind {
            Kind::Uniform => {
                let bits = rng.gen::<u32>() & mask(self.dim);
                Point::from_bits(bits, self.dim)
            }
            Kind::Product(p) => {
                let bits = p.iter().enumerate().fold(0u32, |acc, (j, &pj)| if rng.gen::<f64>() < pj { acc } else { acc | 1 << j });
                Point::from_bits(bits, self.dim)
            }
            Kind::Explicit { support, cumulative } => {
                let u = rng.gen::<f64>() * cumulative[cumulative.len() - 1];
                let i = cumulative.partition_point(|&c| c <= u).min(support.len() - 1);
                support[i].0
            }
        }
    }

    /// Probability mass at `x`.
    pub fn probability(&self, x: &Point) -> f64 {
        if x.dimension() != self.dim {
            return 0.0;
        }
        match &self.kind {
            Kind::Uniform => (0.5f64).powi(self.dim as i32),
            Kind::Product(p) => p.iter().enumerate().map(|(j, &pj)| if x.bits() & (1 << j) == 0 { pj } else { 1.0 - pj }).product(),
            Kind::Explicit { support, .. } => support.iter().find(|(y, _)| y == x).map(|s| s.1).unwrap_or(0.0),
        }
    }

    /// Every point of positive-or-zero mass with its probability.
    /// Hypercube kinds are capped at dimension 20.
    pub fn support(&self) -> Result<Vec<(Point, f64)>> {
        match &self.kind {
            Kind::Explicit { support, .. } => Ok(support.clone()),
            _ => {
                if self.dim > MAX_ENUMERABLE_DIMENSION {
                    return Err(Error::SizeCap {
                        what: format!("support of {self} (use a Monte Carlo estimator)"),
                        size: 1u128 << self.dim,
                        cap: 1u128 << MAX_ENUMERABLE_DIMENSION,
                    });
                }
                Ok(Point::all(self.dim)?.map(|x| (x, self.probability(&x))).collect())
            }
        }
    }

    pub fn support_size(&self) -> u128 {
        match &self.kind {
            Kind::Explicit { support, .. } => support.len() as u128,
            _ => 1u128 << self.dim,
        }
    }
}

fn mask(dim: usize) -> u32 {
    if dim >= 32 {
        u32::MAX
    } else {
        (1u32 << dim) - 1
    }
}

/// `count` i.i.d. draws from `d`, replayable from `rs`.
pub fn sample_marginal(d: &MarginalDistribution, rs: &RandomnessStream, count: usize) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let mut rng = rs.child(label::POINTS).rng();
    Ok((0..count).map(|_| d.draw(&mut rng)).collect())
}

impl fmt::Display for MarginalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Uniform => write!(f, "uniform({})", self.dim),
            Kind::Product(p) => {
                let items: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                write!(f, "product([{}])", items.join(","))
            }
            Kind::Explicit { support, .. } => {
                let items: Vec<String> = support.iter().map(|(x, p)| format!("{x}:{p}")).collect();
                write!(f, "explicit([{}])", items.join(","))
            }
        }
    }
}

impl From<MarginalDistribution> for String {
    fn from(m: MarginalDistribution) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for MarginalDistribution {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
