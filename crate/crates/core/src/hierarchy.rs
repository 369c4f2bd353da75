//! Levels of operation: the semantic map selects the highest level whose
//! concept requirements are met, and the goal is assembled as the
//! conjunction of the goal fragments up to that level, so every level's goal
//! nests inside the next one's.

use crate::pltl::{self, Formula};
use crate::semantic::{delta, DeltaWeights, Instance, SemanticMap, SemanticError};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HierarchyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("level requirements must grow with the level (level {level} breaks the chain)")]
    NotMonotone { level: u8 },
    #[error("no level templates defined")]
    Empty,
    #[error("level {level} is not defined")]
    NoSuchLevel { level: u8 },
    #[error("level {level} requires {concept} x{required}, map has {available}")]
    MissingGrounding { level: u8, concept: String, required: usize, available: usize },
    #[error(transparent)]
    Formula(#[from] pltl::ParseError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

/// Which concrete form of a level's goal fragment to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GoalVariant {
    #[default]
    Text,
    Caption,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelTemplate {
    pub level: u8,
    /// Minimum concept counts required to operate at this level.
    pub requires: BTreeMap<String, usize>,
    /// Goal conjunct contributed by this level, if any.
    pub fragment: Option<Formula>,
    /// Alternate form of the fragment, selectable via [`GoalVariant::Caption`].
    pub caption_fragment: Option<Formula>,
    /// Expected concept counts of the reference map for delta diagnostics.
    pub reference: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Templates {
    levels: Vec<LevelTemplate>,
}

impl Templates {
    pub fn levels(&self) -> &[LevelTemplate] {
        &self.levels
    }

    pub fn level(&self, level: u8) -> Option<&LevelTemplate> {
        self.levels.iter().find(|t| t.level == level)
    }

    /// Structured text: `level N` opens a block of `require`, `fragment`,
    /// `caption_fragment` and `template` lines.
    pub fn parse(text: &str) -> Result<Templates, HierarchyError> {
        let mut levels: Vec<LevelTemplate> = Vec::new();
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
            let perr = |msg: String| HierarchyError::Parse { line: lineno, msg };
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "level" => {
                    let n: u8 =
                        rest.parse().map_err(|_| perr(format!("bad level number `{rest}`")))?;
                    levels.push(LevelTemplate {
                        level: n,
                        requires: BTreeMap::new(),
                        fragment: None,
                        caption_fragment: None,
                        reference: BTreeMap::new(),
                    });
                }
                "require" | "template" => {
                    let current =
                        levels.last_mut().ok_or_else(|| perr("no `level` opened yet".into()))?;
                    let (concept, count) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| perr(format!("`{key}` needs a concept and a count")))?;
                    let count: usize = count
                        .trim()
                        .parse()
                        .map_err(|_| perr(format!("bad count in `{key} {rest}`")))?;
                    let target = if key == "require" {
                        &mut current.requires
                    } else {
                        &mut current.reference
                    };
                    target.insert(concept.to_string(), count);
                }
                "fragment" | "caption_fragment" => {
                    let current =
                        levels.last_mut().ok_or_else(|| perr("no `level` opened yet".into()))?;
                    let f = pltl::parse_formula(rest)?;
                    if key == "fragment" {
                        current.fragment = Some(f);
                    } else {
                        current.caption_fragment = Some(f);
                    }
                }
                other => return Err(perr(format!("unrecognized statement `{other}`"))),
            }
        }
        let t = Templates { levels };
        t.validate()?;
        Ok(t)
    }

    /// Requirement multisets must grow along the level chain.
    pub fn validate(&self) -> Result<(), HierarchyError> {
        if self.levels.is_empty() {
            return Err(HierarchyError::Empty);
        }
        for pair in self.levels.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            let included = lo
                .requires
                .iter()
                .all(|(c, n)| hi.requires.get(c).copied().unwrap_or(0) >= *n);
            let grew = hi.requires.len() > lo.requires.len()
                || hi.requires.iter().any(|(c, n)| lo.requires.get(c).copied().unwrap_or(0) < *n);
            if !included || !grew {
                return Err(HierarchyError::NotMonotone { level: hi.level });
            }
        }
        Ok(())
    }

    fn meets(&self, t: &LevelTemplate, sm: &SemanticMap) -> bool {
        t.requires.iter().all(|(c, n)| sm.count(c) >= *n)
    }

    /// Synthetic map matching a level's reference counts, in `frame`.
    pub fn reference_map(&self, level: u8, frame: &str) -> Result<SemanticMap, HierarchyError> {
        let t = self.level(level).ok_or(HierarchyError::NoSuchLevel { level })?;
        let mut instances = Vec::new();
        let mut predicates = std::collections::BTreeSet::new();
        for (concept, count) in &t.reference {
            for k in 1..=*count {
                let id = if concept == "Ball" && k == 1 {
                    "ball".to_string()
                } else {
                    format!("{}{}", concept.to_ascii_lowercase(), k)
                };
                predicates.insert(crate::pltl::Atom::new("present", vec![id.clone()]).map_err(
                    SemanticError::from,
                )?);
                instances.push(Instance {
                    concept: concept.clone(),
                    id,
                    x: 0.0,
                    y: 0.0,
                    sources: Vec::new(),
                });
            }
        }
        Ok(SemanticMap { frame: frame.to_string(), instances, predicates })
    }
}

/// Outcome of level selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelChoice {
    Level(u8),
    /// No level is satisfied, with the first missing requirement named.
    Idle { reason: String },
}

/// Highest level whose checklist the map satisfies, plus the comparison
/// metric against each level's reference map (diagnostics only — selection
/// is by checklist).
pub fn select_level(
    sm: &SemanticMap,
    templates: &Templates,
) -> Result<(LevelChoice, Vec<(u8, f64)>), HierarchyError> {
    templates.validate()?;
    let mut diagnostics = Vec::new();
    for t in templates.levels() {
        let reference = templates.reference_map(t.level, &sm.frame)?;
        diagnostics.push((t.level, delta(sm, &reference, DeltaWeights::default())?));
    }
    let chosen = templates
        .levels()
        .iter()
        .filter(|t| templates.meets(t, sm))
        .map(|t| t.level)
        .max();
    let choice = match chosen {
        Some(level) => LevelChoice::Level(level),
        None => {
            let first = templates.levels().first().expect("validated non-empty");
            let (concept, required) = first
                .requires
                .iter()
                .find(|(c, n)| sm.count(c) < **n)
                .map(|(c, n)| (c.clone(), *n))
                .unwrap_or(("Ball".to_string(), 1));
            LevelChoice::Idle { reason: format!("no {} x{}", concept.to_ascii_lowercase(), required) }
        }
    };
    Ok((choice, diagnostics))
}

/// Conjunction of the goal fragments of all levels up to `level`, grounded
/// against the map. The caption variant swaps in `caption_fragment` where a
/// level defines one.
pub fn assemble_goal(
    level: u8,
    sm: &SemanticMap,
    templates: &Templates,
    variant: GoalVariant,
) -> Result<Formula, HierarchyError> {
    let t = templates.level(level).ok_or(HierarchyError::NoSuchLevel { level })?;
    for (concept, required) in &t.requires {
        let available = sm.count(concept);
        if available < *required {
            return Err(HierarchyError::MissingGrounding {
                level,
                concept: concept.clone(),
                required: *required,
                available,
            });
        }
    }
    let mut goal: Option<Formula> = None;
    for lt in templates.levels().iter().filter(|lt| lt.level <= level) {
        let fragment = match variant {
            GoalVariant::Caption => lt.caption_fragment.clone().or_else(|| lt.fragment.clone()),
            GoalVariant::Text => lt.fragment.clone(),
        };
        if let Some(f) = fragment {
            goal = Some(match goal {
                None => f,
                Some(g) => Formula::and(g, f),
            });
        }
    }
    goal.ok_or(HierarchyError::NoSuchLevel { level })
}
