//! Scenario files: the desk-scale stand-in for the perception stack.
//!
//! Line format: `frame <name>` once, then one object per line as
//! `kind x y [heading] [key=value ...]`, `#` comments. The object carrying
//! `id=robot1` is the agent itself: it anchors the start pose, is never
//! dropped by the simulated perceptor and does not become a percept.

use super::{Ontology, SemanticError};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Reserved object id for the agent.
pub const AGENT_ID: &str = "robot1";

#[derive(Debug, Clone, PartialEq)]
pub struct WorldObject {
    pub id: String,
    pub kind: String,
    pub x: f64,
    pub y: f64,
    pub heading: Option<f64>,
    pub attrs: BTreeMap<String, String>,
}

impl WorldObject {
    pub fn is_agent(&self) -> bool {
        self.id == AGENT_ID
    }

    pub fn distance(&self, other: &WorldObject) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub frame: String,
    pub objects: Vec<WorldObject>,
}

impl Scenario {
    pub fn agent(&self) -> Option<&WorldObject> {
        self.objects.iter().find(|o| o.is_agent())
    }
}

/// The retained percepts of one perception pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptSet {
    pub frame: String,
    pub objects: Vec<WorldObject>,
}

/// Parse and validate a scenario against the ontology's sensory vocabulary.
pub fn load_scenario(text: &str, ont: &Ontology) -> Result<Scenario, SemanticError> {
    let mut frame: Option<String> = None;
    let mut objects: Vec<WorldObject> = Vec::new();
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
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
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        if head == "frame" {
            let name = tokens
                .next()
                .ok_or(SemanticError::Parse { line: lineno, msg: "frame needs a name".into() })?;
            if frame.is_some() {
                return Err(SemanticError::Parse {
                    line: lineno,
                    msg: "frame declared twice".into(),
                });
            }
            frame = Some(name.to_string());
            continue;
        }
        let kind = head.to_string();
        if !ont.knows_kind(&kind) {
            return Err(SemanticError::UnknownKind { kind, line: lineno });
        }
        let parse_f64 = |tok: Option<&str>, what: &str| -> Result<f64, SemanticError> {
            let tok = tok.ok_or(SemanticError::MalformedPose {
                line: lineno,
                msg: format!("missing {what}"),
            })?;
            let v: f64 = tok.parse().map_err(|_| SemanticError::MalformedPose {
                line: lineno,
                msg: format!("{what} `{tok}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(SemanticError::MalformedPose {
                    line: lineno,
                    msg: format!("{what} must be finite"),
                });
            }
            Ok(v)
        };
        let rest: Vec<&str> = tokens.collect();
        let x = parse_f64(rest.first().copied(), "x")?;
        let y = parse_f64(rest.get(1).copied(), "y")?;
        let mut heading = None;
        let mut attrs = BTreeMap::new();
        for tok in &rest[2..] {
            if let Some((k, v)) = tok.split_once('=') {
                attrs.insert(k.to_string(), v.to_string());
            } else if heading.is_none() {
                heading = Some(parse_f64(Some(tok), "heading")?);
            } else {
                return Err(SemanticError::Parse {
                    line: lineno,
                    msg: format!("unexpected token `{tok}`"),
                });
            }
        }
        let id = match attrs.get("id") {
            Some(id) => {
                if objects.iter().any(|o| &o.id == id) {
                    return Err(SemanticError::DuplicateId { id: id.clone(), line: lineno });
                }
                id.clone()
            }
            None => {
                // advance past claimed ids; the agent id is never auto-assigned
                let n = counters.entry(kind.clone()).or_insert(0);
                loop {
                    *n += 1;
                    let candidate = format!("{kind}{n}");
                    if candidate != AGENT_ID && !objects.iter().any(|o| o.id == candidate) {
                        break candidate;
                    }
                }
            }
        };
        objects.push(WorldObject { id, kind, x, y, heading, attrs });
    }
    let frame = frame.ok_or(SemanticError::Parse {
        line: text.lines().count().max(1),
        msg: "scenario has no `frame` line".into(),
    })?;
    Ok(Scenario { frame, objects })
}

/// Simulated perception: each non-agent object is independently retained
/// with probability `1 - dropout` under the seeded generator; the agent is
/// always kept.
pub fn perceive(sc: &Scenario, dropout: f64, seed: u64) -> Result<PerceptSet, SemanticError> {
    if !(0.0..1.0).contains(&dropout) {
        return Err(SemanticError::BadDropout(dropout));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objects = sc
        .objects
        .iter()
        .filter(|o| o.is_agent() || rng.gen_bool(1.0 - dropout))
        .cloned()
        .collect();
    Ok(PerceptSet { frame: sc.frame.clone(), objects })
}
