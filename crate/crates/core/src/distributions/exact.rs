//! Exact expectations by full-support summation.

use super::joint::JointDistribution;
use crate::domain::class::ConceptClass;
use crate::domain::concept::Concept;
use crate::domain::point::Point;
use crate::error::{Error, Result};

/// Support points with weight P(x)·E[y | x].
fn label_weights(j: &JointDistribution) -> Result<Vec<(Point, f64)>> {
    j.marginal().support()?.into_iter().filter(|(_, p)| *p > 0.0).map(|(x, p)| Ok((x, p * (2.0 * j.plus_probability(&x)? - 1.0)))).collect()
}

/// E[c(x)·y] under `j`.
pub fn exact_correlation(j: &JointDistribution, c: &Concept) -> Result<f64> {
    check_dim(j, c.dimension())?;
    Ok(label_weights(j)?.iter().map(|(x, w)| w * c.eval(x).as_f64()).sum())
}

/// sup over the class of E[c(x)·y], with the first maximiser in enumeration order.
pub fn exact_opt_correlation(j: &JointDistribution, class: &ConceptClass) -> Result<(f64, usize)> {
    check_dim(j, class.dimension())?;
    let weights = label_weights(j)?;
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, c) in class.iter().enumerate() {
        let cor: f64 = weights.iter().map(|(x, w)| w * c.eval(x).as_f64()).sum();
        if cor > best.0 {
            best = (cor, i);
        }
    }
    Ok(best)
}

/// inf over the class of Pr[c(x) ≠ y] = (1 − opt correlation)/2.
pub fn exact_opt_error(j: &JointDistribution, class: &ConceptClass) -> Result<f64> {
    Ok((1.0 - exact_opt_correlation(j, class)?.0) / 2.0)
}

/// E[v(x)·y] for a real-valued v on the support.
pub fn exact_value_correlation<F>(j: &JointDistribution, mut v: F) -> Result<f64>
where
    F: FnMut(&Point) -> Result<f64>,
{
    let mut total = 0.0;
    for (x, w) in label_weights(j)? {
        total += w * v(&x)?;
    }
    Ok(total)
}

/// Pr[h(x) ≠ y] when h(x) = +1 with probability (1 + v(x))/2.
pub fn exact_value_error<F>(j: &JointDistribution, mut v: F) -> Result<f64>
where
    F: FnMut(&Point) -> Result<f64>,
{
    let mut total = 0.0;
    for (x, p) in j.marginal().support()? {
        if p == 0.0 {
            continue;
        }
        let q = j.plus_probability(&x)?;
        let plus = (1.0 + v(&x)?) / 2.0;
        total += p * (q * (1.0 - plus) + (1.0 - q) * plus);
    }
    Ok(total)
}

fn check_dim(j: &JointDistribution, dim: usize) -> Result<()> {
    if j.dimension() != dim {
        return Err(Error::Config(format!("joint of dimension {} used with dimension {dim}", j.dimension())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::joint::LabelLaw;
    use crate::distributions::marginal::MarginalDistribution;
    use crate::domain::class::{enumerate_class, ClassSpec};
    use std::collections::BTreeMap;

    fn uniform(n: usize) -> MarginalDistribution {
        MarginalDistribution::uniform(n).unwrap()
    }

    #[test]
    fn noiseless_self_correlation_is_one() {
        let c = Concept::parse("parity:[1,2]", 3).unwrap();
        let j = JointDistribution::concept_noisy(uniform(3), c.clone(), 0.0).unwrap();
        assert_eq!(exact_correlation(&j, &c).unwrap(), 1.0);
    }

    #[test]
    fn rademacher_correlation_is_zero() {
        let j = JointDistribution::rademacher(uniform(4));
        let c = Concept::parse("dict:-3", 4).unwrap();
        assert_eq!(exact_correlation(&j, &c).unwrap(), 0.0);
    }

    /// Oracle: direct sum over the four points with the noisy-label probabilities.
    #[test]
    fn parity_labels_are_uncorrelated_with_dictator() {
        let parity = Concept::parse("parity:[1,2]", 2).unwrap();
        let dict = Concept::parse("dict:+1", 2).unwrap();
        let j = JointDistribution::concept_noisy(uniform(2), parity.clone(), 0.25).unwrap();
        let mut oracle = 0.0;
        for x in Point::all(2).unwrap() {
            let ey = if parity.eval(&x).is_plus() { 0.75 - 0.25 } else { 0.25 - 0.75 };
            oracle += 0.25 * dict.eval(&x).as_f64() * ey;
        }
        assert_eq!(oracle, 0.0);
        assert_eq!(exact_correlation(&j, &dict).unwrap(), oracle);
    }

    #[test]
    fn planted_dictator_is_optimal() {
        let class = enumerate_class(&ClassSpec::DictatorsWithNegations(5)).unwrap();
        let c = Concept::parse("dict:-4", 5).unwrap();
        let j = JointDistribution::concept_noisy(uniform(5), c.clone(), 0.1).unwrap();
        let (v, i) = exact_opt_correlation(&j, &class).unwrap();
        assert!((v - 0.8).abs() < 1e-12);
        assert_eq!(class.get(i), &c);
        let others: Vec<f64> = class.iter().filter(|k| **k != c).map(|k| exact_correlation(&j, k).unwrap()).collect();
        assert!(others.iter().all(|o| *o < 0.8 - 1e-9));
        assert!((exact_opt_error(&j, &class).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn ties_resolve_to_lowest_index() {
        let class = enumerate_class(&ClassSpec::DictatorsWithNegations(2)).unwrap();
        let j = JointDistribution::rademacher(uniform(2));
        assert_eq!(exact_opt_correlation(&j, &class).unwrap(), (0.0, 0));
        // table equal on the points where x1 = ±1 makes ±x1 tie at zero
        let table: BTreeMap<Point, f64> = Point::all(2).unwrap().map(|x| (x, if x.coord(2).is_plus() { 0.9 } else { 0.1 })).collect();
        let j = JointDistribution::new(uniform(2), LabelLaw::Conditional(table)).unwrap();
        let (v, i) = exact_opt_correlation(&j, &class).unwrap();
        assert_eq!(class.get(i).to_string(), "dict:+2");
        assert!((v - 0.8).abs() < 1e-12);
        let only_x1 = enumerate_class(&"explicit(2;dict:+1;dict:-1)".parse().unwrap()).unwrap();
        assert_eq!(exact_opt_correlation(&j, &only_x1).unwrap().1, 0);
    }

    #[test]
    fn error_correlation_conversion() {
        let class = enumerate_class(&ClassSpec::ParitiesUpToDegree(3, 2)).unwrap();
        let c = Concept::parse("parity:[2,3]", 3).unwrap();
        let j = JointDistribution::concept_noisy(MarginalDistribution::product(vec![0.3, 0.6, 0.8]).unwrap(), c, 0.15).unwrap();
        for k in class.iter() {
            let cor = exact_correlation(&j, k).unwrap();
            let err = exact_value_error(&j, |x| Ok(k.eval(x).as_f64())).unwrap();
            assert!((err - (1.0 - cor) / 2.0).abs() < 1e-12);
        }
    }
}
