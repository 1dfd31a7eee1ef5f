use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::marginal::{sample_marginal, MarginalDistribution};
use super::stream::{label, RandomnessStream};
use crate::domain::concept::Concept;
use crate::domain::point::{LabeledExample, Point, Sign};
use crate::error::{Error, Result};

/// Conditional law of the label given the point.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelLaw {
    /// y = c(x), flipped independently with probability `flip` ∈ [0, 1/2].
    ConceptNoisy { concept: Concept, flip: f64 },
    /// P(y = +1 | x) read from a table that must cover the support.
    Conditional(BTreeMap<Point, f64>),
    /// Fair coins independent of x.
    Rademacher,
}

/// A distribution 𝒟′ on example-label pairs with declared x-marginal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct JointDistribution {
    marginal: MarginalDistribution,
    labels: LabelLaw,
}

impl JointDistribution {
    pub fn new(marginal: MarginalDistribution, labels: LabelLaw) -> Result<Self> {
        let dim = marginal.dimension();
        match &labels {
            LabelLaw::ConceptNoisy { concept, flip } => {
                if concept.dimension() != dim {
                    return Err(Error::Config(format!("label concept {concept} not of dimension {dim}")));
                }
                if !(0.0..=0.5).contains(flip) {
                    return Err(Error::Config(format!("flip probability {flip} outside [0, 1/2]")));
                }
            }
            LabelLaw::Conditional(table) => {
                for (x, q) in table {
                    if x.dimension() != dim {
                        return Err(Error::Config(format!("table point {x} not of dimension {dim}")));
                    }
                    if !(0.0..=1.0).contains(q) {
                        return Err(Error::Config(format!("table probability {q} at {x} outside [0, 1]")));
                    }
                }
                if marginal.support_size() <= 1 << 16 {
                    for (x, p) in marginal.support()? {
                        if p > 0.0 && !table.contains_key(&x) {
                            return Err(Error::Config(format!("conditional table misses support point {x}")));
                        }
                    }
                }
            }
            LabelLaw::Rademacher => {}
        }
        Ok(JointDistribution { marginal, labels })
    }

    pub fn concept_noisy(marginal: MarginalDistribution, concept: Concept, flip: f64) -> Result<Self> {
        Self::new(marginal, LabelLaw::ConceptNoisy { concept, flip })
    }

    pub fn rademacher(marginal: MarginalDistribution) -> Self {
        JointDistribution { marginal, labels: LabelLaw::Rademacher }
    }

    pub fn marginal(&self) -> &MarginalDistribution {
        &self.marginal
    }

    pub fn labels(&self) -> &LabelLaw {
        &self.labels
    }

    pub fn dimension(&self) -> usize {
        self.marginal.dimension()
    }

    /// P(y = +1 | x).
    pub fn plus_probability(&self, x: &Point) -> Result<f64> {
        match &self.labels {
            LabelLaw::ConceptNoisy { concept, flip } => Ok(if concept.evaluate(x)?.is_plus() { 1.0 - flip } else { *flip }),
            LabelLaw::Conditional(table) => {
                table.get(x).copied().ok_or_else(|| Error::Config(format!("conditional table misses point {x}")))
            }
            LabelLaw::Rademacher => Ok(0.5),
        }
    }

    /// Draw a label for `x` from `rng`.
    pub fn draw_label<R: Rng + ?Sized>(&self, x: &Point, rng: &mut R) -> Result<Sign> {
        let q = self.plus_probability(x)?;
        Ok(Sign::from_bool(rng.gen::<f64>() < q))
    }

    /// One example drawn from `rng`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LabeledExample> {
        let x = self.marginal.draw(rng);
        Ok(LabeledExample::new(x, self.draw_label(&x, rng)?))
    }
}

/// `count` i.i.d. examples. The points are exactly `sample_marginal(j.marginal(), rs, count)`.
pub fn sample_joint(j: &JointDistribution, rs: &RandomnessStream, count: usize) -> Result<Vec<LabeledExample>> {
    let points = sample_marginal(&j.marginal, rs, count)?;
    let mut rng = rs.child(label::LABELS).rng();
    points.into_iter().map(|x| Ok(LabeledExample::new(x, j.draw_label(&x, &mut rng)?))).collect()
}

fn fmt_table(table: &BTreeMap<Point, f64>) -> String {
    table.iter().map(|(x, q)| format!("{x}:{q}")).collect::<Vec<_>>().join(",")
}

impl fmt::Display for LabelLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelLaw::ConceptNoisy { concept, flip } => write!(f, "concept_noisy(\"{concept}\", {flip})"),
            LabelLaw::Conditional(t) => write!(f, "conditional([{}])", fmt_table(t)),
            LabelLaw::Rademacher => f.write_str("rademacher"),
        }
    }
}

impl fmt::Display for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "joint{{marginal={}, labels={}}}", self.marginal, self.labels)
    }
}

impl From<JointDistribution> for String {
    fn from(j: JointDistribution) -> String {
        j.to_string()
    }
}

impl TryFrom<String> for JointDistribution {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::marginal::sample_marginal;

    fn uniform(n: usize) -> MarginalDistribution {
        MarginalDistribution::uniform(n).unwrap()
    }

    #[test]
    fn noiseless_labels_follow_concept() {
        let c = Concept::parse("parity:[1,3]", 4).unwrap();
        let j = JointDistribution::concept_noisy(uniform(4), c.clone(), 0.0).unwrap();
        let s = sample_joint(&j, &RandomnessStream::new(1), 2000).unwrap();
        assert!(s.iter().all(|e| e.label == c.eval(&e.point)));
    }

    #[test]
    fn joint_points_replay_the_marginal() {
        let c = Concept::parse("dict:+2", 3).unwrap();
        let rs = RandomnessStream::new(8).child(4);
        let j = JointDistribution::concept_noisy(uniform(3), c, 0.3).unwrap();
        let pts: Vec<Point> = sample_joint(&j, &rs, 500).unwrap().iter().map(|e| e.point).collect();
        assert_eq!(pts, sample_marginal(j.marginal(), &rs, 500).unwrap());
    }

    #[test]
    fn rademacher_labels_are_uncorrelated() {
        let j = JointDistribution::rademacher(uniform(6));
        let c = Concept::parse("dict:+1", 6).unwrap();
        let s = sample_joint(&j, &RandomnessStream::new(2), 100_000).unwrap();
        let cor = s.iter().map(|e| (c.eval(&e.point) * e.label).as_f64()).sum::<f64>() / s.len() as f64;
        assert!(cor.abs() <= 0.02, "correlation {cor}");
    }

    #[test]
    fn conditional_table_must_cover_support() {
        let mut t = BTreeMap::new();
        t.insert("+".parse().unwrap(), 0.7);
        let err = JointDistribution::new(uniform(1), LabelLaw::Conditional(t.clone())).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        t.insert("-".parse().unwrap(), 0.2);
        assert!(JointDistribution::new(uniform(1), LabelLaw::Conditional(t)).is_ok());
    }

    #[test]
    fn flip_probability_range() {
        let c = Concept::parse("dict:+1", 1).unwrap();
        assert!(JointDistribution::concept_noisy(uniform(1), c, 0.6).is_err());
    }
}
