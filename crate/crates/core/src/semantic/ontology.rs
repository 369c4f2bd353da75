//! Concept graph: IsA edges lift sensory kinds to canonical concepts,
//! IsPartOf edges aggregate parts into wholes, and pair rules turn two
//! nearby parts into one whole (posts into a goal).

use super::SemanticError;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq)]
pub struct PairRule {
    pub part: String,
    pub whole: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ontology {
    /// child -> parent, both kinds and concepts.
    pub isa: Vec<(String, String)>,
    /// part concept -> whole concept.
    pub partof: Vec<(String, String)>,
    pub pairs: Vec<PairRule>,
}

impl Ontology {
    /// Statement-per-line text: `isa child parent`, `partof part whole`,
    /// `pair Part Whole min=.. max=..`, `#` comments.
    pub fn parse(text: &str) -> Result<Ontology, SemanticError> {
        let mut ont = Ontology::default();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "isa" if toks.len() == 3 => {
                    ont.isa.push((toks[1].to_string(), toks[2].to_string()));
                }
                "partof" if toks.len() == 3 => {
                    ont.partof.push((toks[1].to_string(), toks[2].to_string()));
                }
                "pair" if toks.len() == 5 => {
                    let mut min = None;
                    let mut max = None;
                    for t in &toks[3..] {
                        if let Some(v) = t.strip_prefix("min=") {
                            min = v.parse::<f64>().ok();
                        } else if let Some(v) = t.strip_prefix("max=") {
                            max = v.parse::<f64>().ok();
                        }
                    }
                    let (min, max) = match (min, max) {
                        (Some(a), Some(b)) => (a, b),
                        _ => {
                            return Err(SemanticError::Parse {
                                line: lineno,
                                msg: "pair needs min=<m> max=<m>".into(),
                            })
                        }
                    };
                    ont.pairs.push(PairRule {
                        part: toks[1].to_string(),
                        whole: toks[2].to_string(),
                        min,
                        max,
                    });
                }
                other => {
                    return Err(SemanticError::Parse {
                        line: lineno,
                        msg: format!("unrecognized statement `{other}`"),
                    })
                }
            }
        }
        ont.validate()?;
        Ok(ont)
    }

    pub fn validate(&self) -> Result<(), SemanticError> {
        // acyclic IsA
        let mut children: BTreeSet<&str> = BTreeSet::new();
        for (child, _) in &self.isa {
            children.insert(child);
        }
        for start in &children {
            let mut seen = BTreeSet::new();
            let mut current = (*start).to_string();
            while let Some(parent) = self.direct_concept(&current) {
                if !seen.insert(parent.to_string()) {
                    return Err(SemanticError::IsaCycle { concept: parent.to_string() });
                }
                current = parent.to_string();
            }
        }
        // one direct target per sensory kind
        let mut targets: BTreeMap<&str, usize> = BTreeMap::new();
        for (child, _) in &self.isa {
            if child.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
                *targets.entry(child.as_str()).or_insert(0) += 1;
            }
        }
        for (kind, n) in targets {
            if n > 1 {
                return Err(SemanticError::AmbiguousIsa { kind: kind.to_string() });
            }
        }
        for rule in &self.pairs {
            if !(rule.min > 0.0 && rule.min < rule.max) {
                return Err(SemanticError::BadPairWindow {
                    whole: rule.whole.clone(),
                    min: rule.min,
                    max: rule.max,
                });
            }
        }
        Ok(())
    }

    /// Sensory vocabulary: the lowercase IsA sources.
    pub fn knows_kind(&self, kind: &str) -> bool {
        self.isa.iter().any(|(child, _)| child == kind)
    }

    /// Direct IsA target of a kind or concept.
    pub fn direct_concept(&self, name: &str) -> Option<&str> {
        self.isa.iter().find(|(child, _)| child == name).map(|(_, p)| p.as_str())
    }

    /// Pair rule producing `whole`, if any.
    pub fn pair_rule_for(&self, whole: &str) -> Option<&PairRule> {
        self.pairs.iter().find(|r| r.whole == whole)
    }

    /// IsPartOf wholes without a pair rule aggregate any non-empty part set.
    pub fn plain_aggregations(&self) -> impl Iterator<Item = &(String, String)> {
        self.partof.iter().filter(|(_, whole)| self.pair_rule_for(whole).is_none())
    }
}
