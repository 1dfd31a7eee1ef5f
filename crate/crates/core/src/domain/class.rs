use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::concept::{Concept, ConceptKind, Literal};
use super::point::{check_dimension, Sign};
use crate::error::{Error, Result};

/// Enumerability bound on class sizes.
pub const MAX_CLASS_SIZE: u128 = 1 << 20;

/// Recipe for instantiating a concept class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ClassSpec {
    /// ±x_i for i = 1..n.
    DictatorsWithNegations(usize),
    /// All parities on at most k coordinates (degree 0 is the constant +1).
    ParitiesUpToDegree(usize, usize),
    /// All satisfiable conjunctions of at most s literals.
    ConjunctionsUpToSize(usize, usize),
    /// sign(w·x − t) with integer weights in [−W, W] and thresholds in [−nW, nW].
    IntegerHalfspaces(usize, i64),
    /// Every Boolean function, n ≤ 4.
    AllFunctions(usize),
    /// Explicit descriptor list.
    Explicit { dim: usize, descriptors: Vec<String> },
}

impl ClassSpec {
    pub fn dimension(&self) -> usize {
        match self {
            ClassSpec::DictatorsWithNegations(n)
            | ClassSpec::ParitiesUpToDegree(n, _)
            | ClassSpec::ConjunctionsUpToSize(n, _)
            | ClassSpec::IntegerHalfspaces(n, _)
            | ClassSpec::AllFunctions(n) => *n,
            ClassSpec::Explicit { dim, .. } => *dim,
        }
    }

    /// Class size predicted without enumerating.
    pub fn size(&self) -> u128 {
        match self {
            ClassSpec::DictatorsWithNegations(n) => 2 * *n as u128,
            ClassSpec::ParitiesUpToDegree(n, k) => (0..=*k.min(n)).map(|j| binomial(*n, j)).sum(),
            ClassSpec::ConjunctionsUpToSize(n, s) => (0..=*s.min(n)).map(|j| binomial(*n, j).saturating_mul(1u128 << j)).sum(),
            ClassSpec::IntegerHalfspaces(n, w) => {
                let w = (*w).max(0) as u128;
                let per = 2 * w + 1;
                let n = *n as u32;
                per.checked_pow(n).and_then(|p| p.checked_mul(2 * n as u128 * w + 1)).unwrap_or(u128::MAX)
            }
            ClassSpec::AllFunctions(n) => {
                if *n >= 7 {
                    u128::MAX
                } else {
                    1u128 << (1u32 << n)
                }
            }
            ClassSpec::Explicit { descriptors, .. } => descriptors.len() as u128,
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Subsets of {1..n} of size j in lexicographic order.
fn subsets(n: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=j).collect();
    if j > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut pos = j;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] < n - (j - 1 - pos) {
                cur[pos] += 1;
                for q in pos + 1..j {
                    cur[q] = cur[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A finite, deterministically ordered family of concepts over {±1}ⁿ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptClass {
    name: String,
    dim: usize,
    concepts: Vec<Concept>,
}

impl ConceptClass {
    pub fn new(name: impl Into<String>, dim: usize, concepts: Vec<Concept>) -> Result<Self> {
        check_dimension(dim)?;
        if concepts.is_empty() {
            return Err(Error::Config("concept class is empty".into()));
        }
        if concepts.len() as u128 > MAX_CLASS_SIZE {
            return Err(Error::SizeCap { what: "concept class".into(), size: concepts.len() as u128, cap: MAX_CLASS_SIZE });
        }
        if let Some(c) = concepts.iter().find(|c| c.dimension() != dim) {
            return Err(Error::Config(format!("concept {c} has dimension {} not {dim}", c.dimension())));
        }
        Ok(ConceptClass { name: name.into(), dim, concepts })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn get(&self, i: usize) -> &Concept {
        &self.concepts[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Concept> {
        self.concepts.iter()
    }

    /// Descriptor strings in enumeration order.
    pub fn descriptors(&self) -> Vec<String> {
        self.concepts.iter().map(|c| c.to_string()).collect()
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }
}

/// Instantiate the class named by `spec`.
pub fn enumerate_class(spec: &ClassSpec) -> Result<ConceptClass> {
    let n = spec.dimension();
    check_dimension(n)?;
    let size = spec.size();
    if size > MAX_CLASS_SIZE {
        return Err(Error::SizeCap { what: format!("class {spec}"), size, cap: MAX_CLASS_SIZE });
    }
    let mut out = Vec::with_capacity(size as usize);
    match spec {
        ClassSpec::DictatorsWithNegations(_) => {
            for i in 1..=n {
                for s in Sign::both() {
                    out.push(Concept::dictator(i, s, n)?);
                }
            }
        }
        ClassSpec::ParitiesUpToDegree(_, k) => {
            for j in 0..=(*k).min(n) {
                for set in subsets(n, j) {
                    out.push(Concept::new(ConceptKind::Parity(set), n)?);
                }
            }
        }
        ClassSpec::ConjunctionsUpToSize(_, s) => {
            for j in 0..=(*s).min(n) {
                for set in subsets(n, j) {
                    // polarity patterns in binary order, first literal most significant, + before -
                    for pattern in 0..(1u32 << j) {
                        let lits = set
                            .iter()
                            .enumerate()
                            .map(|(q, &index)| Literal { index, sign: Sign::from_bool(pattern >> (j - 1 - q) & 1 == 0) })
                            .collect();
                        out.push(Concept::new(ConceptKind::Conjunction(lits), n)?);
                    }
                }
            }
        }
        ClassSpec::IntegerHalfspaces(_, w) => {
            let w = *w;
            if w < 0 {
                return Err(Error::Config(format!("weight bound {w} is negative")));
            }
            let per = (2 * w + 1) as usize;
            let total = per.pow(n as u32);
            let bound = n as i64 * w;
            for code in 0..total {
                let mut rest = code;
                let weights: Vec<i64> = (0..n)
                    .map(|_| {
                        let d = (rest % per) as i64;
                        rest /= per;
                        d - w
                    })
                    .rev()
                    .collect();
                for t in -bound..=bound {
                    out.push(Concept::new(ConceptKind::Halfspace { weights: weights.clone(), threshold: t }, n)?);
                }
            }
        }
        ClassSpec::AllFunctions(_) => {
            if n > 4 {
                return Err(Error::SizeCap { what: format!("class {spec}"), size, cap: MAX_CLASS_SIZE });
            }
            for t in 0..(1u64 << (1u32 << n)) {
                out.push(Concept::new(ConceptKind::Table(t), n)?);
            }
        }
        ClassSpec::Explicit { descriptors, .. } => {
            for d in descriptors {
                let c = Concept::parse(d, n)?;
                if out.contains(&c) {
                    return Err(Error::Config(format!("duplicate descriptor {d}")));
                }
                out.push(c);
            }
        }
    }
    ConceptClass::new(spec.to_string(), n, out)
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSpec::DictatorsWithNegations(n) => write!(f, "dictators_with_negations({n})"),
            ClassSpec::ParitiesUpToDegree(n, k) => write!(f, "parities_up_to_degree({n},{k})"),
            ClassSpec::ConjunctionsUpToSize(n, s) => write!(f, "conjunctions_up_to_size({n},{s})"),
            ClassSpec::IntegerHalfspaces(n, w) => write!(f, "integer_halfspaces({n},{w})"),
            ClassSpec::AllFunctions(n) => write!(f, "all_functions({n})"),
            ClassSpec::Explicit { dim, descriptors } => {
                write!(f, "explicit({dim};{})", descriptors.join(";"))
            }
        }
    }
}

impl FromStr for ClassSpec {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("class spec {text:?}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (name, args) = s.split_once('(').ok_or_else(bad)?;
        let args = args.strip_suffix(')').ok_or_else(bad)?;
        if name == "explicit" {
            let mut parts = args.split(';');
            let dim = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let descriptors = parts.filter(|p| !p.is_empty()).map(String::from).collect();
            return Ok(ClassSpec::Explicit { dim, descriptors });
        }
        let nums: Vec<i64> = args.split(',').map(|a| a.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        let u = |i: usize| -> Result<usize> { nums.get(i).copied().filter(|v| *v >= 0).map(|v| v as usize).ok_or_else(bad) };
        let spec = match (name, nums.len()) {
            ("dictators_with_negations", 1) => ClassSpec::DictatorsWithNegations(u(0)?),
            ("parities_up_to_degree", 2) => ClassSpec::ParitiesUpToDegree(u(0)?, u(1)?),
            ("conjunctions_up_to_size", 2) => ClassSpec::ConjunctionsUpToSize(u(0)?, u(1)?),
            ("integer_halfspaces", 2) => ClassSpec::IntegerHalfspaces(u(0)?, nums[1]),
            ("all_functions", 1) => ClassSpec::AllFunctions(u(0)?),
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

impl From<ClassSpec> for String {
    fn from(c: ClassSpec) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for ClassSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::point::Point;
    use std::collections::HashSet;

    #[test]
    fn dictators_with_negations_of_three() {
        let c = enumerate_class(&ClassSpec::DictatorsWithNegations(3)).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.descriptors()[..2], ["dict:+1".to_string(), "dict:-1".to_string()]);
    }

    #[test]
    fn all_parities_of_three() {
        let c = enumerate_class(&ClassSpec::ParitiesUpToDegree(3, 3)).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.get(0).to_string(), "parity:[]");
        assert_eq!(c.get(7).to_string(), "parity:[1,2,3]");
    }

    /// Independent count: every set of literals over distinct variables, keyed by truth table.
    #[test]
    fn conjunctions_match_truth_table_oracle() {
        let n = 2;
        let literals: Vec<(usize, bool)> = (0..n).flat_map(|i| [(i, true), (i, false)]).collect();
        let mut tables = HashSet::new();
        for mask in 0u32..(1 << literals.len()) {
            let chosen: Vec<_> = (0..literals.len()).filter(|q| mask >> q & 1 == 1).map(|q| literals[q]).collect();
            let vars: HashSet<_> = chosen.iter().map(|l| l.0).collect();
            if chosen.len() > 2 || vars.len() != chosen.len() {
                continue;
            }
            let table: Vec<bool> = (0u32..4).map(|x| chosen.iter().all(|&(i, pos)| (x >> i & 1 == 0) == pos)).collect();
            tables.insert(table);
        }
        assert_eq!(tables.len(), 9);
        let c = enumerate_class(&ClassSpec::ConjunctionsUpToSize(2, 2)).unwrap();
        assert_eq!(c.len(), tables.len());
        let ours: HashSet<Vec<bool>> = c.iter().map(|k| Point::all(2).unwrap().map(|x| k.eval(&x).is_plus()).collect()).collect();
        assert_eq!(ours, tables);
    }

    #[test]
    fn halfspace_count_and_cap() {
        let spec = ClassSpec::IntegerHalfspaces(3, 1);
        let c = enumerate_class(&spec).unwrap();
        assert_eq!(c.len() as u128, spec.size());
        assert_eq!(c.len(), 27 * 7);
        let huge = ClassSpec::IntegerHalfspaces(12, 3);
        assert!(matches!(enumerate_class(&huge), Err(Error::SizeCap { .. })));
        assert!(matches!(enumerate_class(&ClassSpec::AllFunctions(5)), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn size_cap_on_parities() {
        let spec = ClassSpec::ParitiesUpToDegree(24, 24);
        assert!(matches!(enumerate_class(&spec), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn spec_text_round_trip() {
        for s in [
            "dictators_with_negations(8)",
            "parities_up_to_degree(3,0)",
            "conjunctions_up_to_size(4,2)",
            "integer_halfspaces(3,-1)",
            "all_functions(2)",
            "explicit(2;const:+1;dict:-2)",
        ] {
            assert_eq!(s.parse::<ClassSpec>().unwrap().to_string(), s);
        }
        let c = enumerate_class(&"explicit(2;const:+1;dict:-2)".parse().unwrap()).unwrap();
        assert_eq!(c.len(), 2);
        assert!("dictators(3)".parse::<ClassSpec>().is_err());
    }

    #[test]
    fn explicit_rejects_duplicates() {
        let spec = ClassSpec::Explicit { dim: 2, descriptors: vec!["dict:+1".into(), "dict:+1".into()] };
        assert!(enumerate_class(&spec).is_err());
    }
}
