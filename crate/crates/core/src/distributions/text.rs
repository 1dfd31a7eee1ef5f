//! Text forms of marginals and joints as used in experiment configs, e.g.
//! `joint{marginal=uniform(8), labels=concept_noisy("dict:+3", 0.1)}`.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::joint::{JointDistribution, LabelLaw};
use super::marginal::MarginalDistribution;
use crate::domain::concept::Concept;
use crate::domain::point::Point;
use crate::error::{Error, Result};

fn bad(what: &str, text: &str) -> Error {
    Error::Parse(format!("{what} {text:?}"))
}

fn call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

fn list(s: &str) -> Option<Vec<&str>> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?;
    Some(if inner.is_empty() { Vec::new() } else { inner.split(',').collect() })
}

fn point_table(s: &str) -> Option<Vec<(Point, f64)>> {
    list(s)?
        .into_iter()
        .map(|item| {
            let (x, p) = item.split_once(':')?;
            Some((x.parse().ok()?, p.parse().ok()?))
        })
        .collect()
}

fn compact(s: &str) -> String {
    // whitespace is insignificant outside quotes; descriptors never contain spaces
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

impl FromStr for MarginalDistribution {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let s = compact(text);
        if let Some(n) = call(&s, "uniform") {
            return MarginalDistribution::uniform(n.parse().map_err(|_| bad("marginal", text))?);
        }
        if let Some(body) = call(&s, "product") {
            let biases = list(body)
                .ok_or_else(|| bad("marginal", text))?
                .iter()
                .map(|p| p.parse().map_err(|_| bad("bias in", text)))
                .collect::<Result<_>>()?;
            return MarginalDistribution::product(biases);
        }
        if let Some(body) = call(&s, "explicit") {
            let support = point_table(body).ok_or_else(|| bad("marginal", text))?;
            let dim =
                support.first().map(|s| s.0.dimension()).ok_or_else(|| Error::Config("explicit distribution has empty support".into()))?;
            return MarginalDistribution::explicit(dim, support);
        }
        Err(bad("marginal", text))
    }
}

fn parse_labels(s: &str, dim: usize, text: &str) -> Result<LabelLaw> {
    if s == "rademacher" {
        return Ok(LabelLaw::Rademacher);
    }
    if let Some(body) = call(s, "concept_noisy") {
        let (desc, flip) = body.rsplit_once(',').ok_or_else(|| bad("labels", text))?;
        let desc = desc.strip_prefix('"').and_then(|d| d.strip_suffix('"')).ok_or_else(|| bad("quoted concept in", text))?;
        let concept = Concept::parse(desc, dim)?;
        let flip = flip.parse().map_err(|_| bad("flip probability in", text))?;
        return Ok(LabelLaw::ConceptNoisy { concept, flip });
    }
    if let Some(body) = call(s, "conditional") {
        let table: BTreeMap<Point, f64> = point_table(body).ok_or_else(|| bad("labels", text))?.into_iter().collect();
        return Ok(LabelLaw::Conditional(table));
    }
    Err(bad("labels", text))
}

impl FromStr for JointDistribution {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let s = compact(text);
        let body = s.strip_prefix("joint{").and_then(|b| b.strip_suffix('}')).ok_or_else(|| bad("joint", text))?;
        let (m, l) = body.split_once(",labels=").ok_or_else(|| bad("joint", text))?;
        let m = m.strip_prefix("marginal=").ok_or_else(|| bad("joint", text))?;
        let marginal: MarginalDistribution = m.parse()?;
        let labels = parse_labels(l, marginal.dimension(), text)?;
        JointDistribution::new(marginal, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_example() {
        let j: JointDistribution = "joint{marginal=uniform(8), labels=concept_noisy(\"dict:+3\", 0.10)}".parse().unwrap();
        assert_eq!(j.to_string(), "joint{marginal=uniform(8), labels=concept_noisy(\"dict:+3\", 0.1)}");
        assert_eq!(j.to_string().parse::<JointDistribution>().unwrap(), j);
    }

    #[test]
    fn other_forms_round_trip() {
        for s in [
            "joint{marginal=product([0.5,0.25]), labels=rademacher}",
            "joint{marginal=explicit([+:0.7,-:0.3]), labels=conditional([+:0.9,-:0.2])}",
            "joint{marginal=uniform(2), labels=concept_noisy(\"halfspace:w=[1,-1];t=0\", 0.25)}",
        ] {
            let j: JointDistribution = s.parse().unwrap();
            assert_eq!(j.to_string(), s);
        }
    }

    #[test]
    fn rejects_malformed() {
        for s in [
            "joint{marginal=uniform(8)}",
            "joint{marginal=gaussian(3), labels=rademacher}",
            "joint{marginal=uniform(2), labels=concept_noisy(dict:+1, 0.1)}",
            "joint{marginal=uniform(2), labels=concept_noisy(\"dict:+3\", 0.1)}",
            "joint{marginal=explicit([]), labels=rademacher}",
        ] {
            assert!(s.parse::<JointDistribution>().is_err(), "{s}");
        }
    }
}
