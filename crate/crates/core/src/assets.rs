//! Built-in defaults: the soccer domain, the conceptual-layer ontology, the
//! level templates and the bundled scenarios. Commands fall back to these
//! when no file is given.

use crate::fond::{parse_domain, FondDomain};
use crate::hierarchy::Templates;
use crate::semantic::Ontology;

pub const DOMAIN_PDDL: &str = include_str!("../assets/domain.pddl");
pub const ONTOLOGY_TEXT: &str = include_str!("../assets/ontology.txt");
pub const TEMPLATES_TEXT: &str = include_str!("../assets/templates.txt");

pub const SCENARIO_BALL_ONLY: &str = include_str!("../assets/scenarios/ball_only.txt");
pub const SCENARIO_SODA_CANS: &str = include_str!("../assets/scenarios/soda_cans.txt");
pub const SCENARIO_FOUR_POSTS: &str = include_str!("../assets/scenarios/four_posts.txt");
pub const SCENARIO_FULL_FIELD: &str = include_str!("../assets/scenarios/full_field.txt");
pub const SCENARIO_EMPTY: &str = include_str!("../assets/scenarios/empty.txt");

pub fn default_domain() -> FondDomain {
    parse_domain(DOMAIN_PDDL).expect("bundled domain parses")
}

pub fn default_ontology() -> Ontology {
    Ontology::parse(ONTOLOGY_TEXT).expect("bundled ontology parses")
}

pub fn default_templates() -> Templates {
    Templates::parse(TEMPLATES_TEXT).expect("bundled templates parse")
}
