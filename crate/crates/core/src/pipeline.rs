//! Stage orchestration: perceive, conceptualize, select the level, assemble
//! the goal, build the symbolic planning problem, compile, ground, plan and
//! execute. The command-line front end materializes each stage's artifact;
//! this module holds the shared logic so the stages compose identically in
//! tests and in the CLI.

use crate::compile::{compile, CompilationMap, CompileError, CompileOptions};
use crate::fond::{FondDomain, FondError, FondProblem, GroundedModel, InitAtom, TypedName};
use crate::hierarchy::{
    assemble_goal, select_level, GoalVariant, HierarchyError, LevelChoice, Templates,
};
use crate::plan::{plan, Mode, PlanError, PlanOutcome, Policy};
use crate::pltl::Formula;
use crate::semantic::{
    conceptualize, load_scenario, perceive, Ontology, PerceptSet, Scenario, SemanticError,
    SemanticMap,
};
use crate::sim::{run, Episode, SimError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Fond(#[from] FondError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("nothing to do: {0}")]
    Idle(String),
    #[error("planning found no policy")]
    Unsolvable,
}

/// Everything the perception stage produces.
#[derive(Debug, Clone)]
pub struct Perception {
    pub scenario: Scenario,
    pub percepts: PerceptSet,
    pub map: SemanticMap,
    pub choice: LevelChoice,
    pub deltas: Vec<(u8, f64)>,
}

pub fn perceive_scenario(
    scenario_text: &str,
    ont: &Ontology,
    templates: &Templates,
    dropout: f64,
    seed: u64,
) -> Result<Perception, PipelineError> {
    let scenario = load_scenario(scenario_text, ont)?;
    let percepts = perceive(&scenario, dropout, seed)?;
    let map = conceptualize(&percepts, ont)?;
    let (choice, deltas) = select_level(&map, templates)?;
    Ok(Perception { scenario, percepts, map, choice, deltas })
}

/// Symbolic planning problem for the map: the agent, the ball, and — when
/// any goal was recognized — the opponent goal under its role name `goal1`
/// at `goalposition` (the registry decides which physical goal that is).
pub fn build_problem(
    domain: &FondDomain,
    sm: &SemanticMap,
    name: &str,
) -> Result<FondProblem, PipelineError> {
    let mut objects = vec![
        TypedName { name: "robot1".into(), ty: "robot".into() },
        TypedName { name: "ball".into(), ty: "item".into() },
        TypedName { name: "startposition".into(), ty: "location".into() },
    ];
    let mut init = vec![
        InitAtom { pred: "isat".into(), args: vec!["robot1".into(), "startposition".into()] },
        InitAtom { pred: "isat".into(), args: vec!["ball".into(), "ballposition".into()] },
        InitAtom { pred: "present".into(), args: vec!["ball".into()] },
    ];
    if sm.count("Ball") == 0 {
        return Err(PipelineError::Idle("no ball in the semantic map".into()));
    }
    if sm.count("Goal") > 0 {
        objects.push(TypedName { name: "goal1".into(), ty: "item".into() });
        objects.push(TypedName { name: "goalposition".into(), ty: "location".into() });
        init.push(InitAtom { pred: "present".into(), args: vec!["goal1".into()] });
        init.push(InitAtom {
            pred: "isat".into(),
            args: vec!["goal1".into(), "goalposition".into()],
        });
    }
    let problem = FondProblem {
        name: name.to_string(),
        domain: domain.name.clone(),
        objects,
        init,
        goal: crate::fond::Cond::True,
    };
    crate::fond::validate_problem(domain, &problem)?;
    Ok(problem)
}

/// Compiled artifacts for one goal over one problem.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub domain: FondDomain,
    pub problem: FondProblem,
    pub map: CompilationMap,
    pub model: GroundedModel,
}

pub fn compile_goal(
    domain: &FondDomain,
    problem: &FondProblem,
    goal: &Formula,
    opts: CompileOptions,
) -> Result<Compiled, PipelineError> {
    let (d2, p2, map) = compile(domain, problem, goal, opts)?;
    let model = GroundedModel::ground(&d2, &p2)?;
    Ok(Compiled { domain: d2, problem: p2, map, model })
}

/// Full pipeline output for one scenario and one seed.
#[derive(Debug, Clone)]
pub struct PlayOutput {
    pub perception: Perception,
    pub level: u8,
    pub goal: Formula,
    pub compiled: Compiled,
    pub policy: Policy,
    pub episode: Episode,
}

#[derive(Debug, Clone)]
pub struct PlayConfig {
    pub dropout: f64,
    pub perception_seed: u64,
    pub mode: Mode,
    pub seed: u64,
    pub max_steps: usize,
    pub variant: GoalVariant,
}

impl Default for PlayConfig {
    fn default() -> Self {
        PlayConfig {
            dropout: 0.0,
            perception_seed: 0,
            mode: Mode::StrongCyclic,
            seed: 0,
            max_steps: 40,
            variant: GoalVariant::Text,
        }
    }
}

/// The pipeline end to end: perceive, assemble, compile, plan, run.
pub fn play(
    scenario_text: &str,
    domain: &FondDomain,
    ont: &Ontology,
    templates: &Templates,
    cfg: &PlayConfig,
) -> Result<PlayOutput, PipelineError> {
    let perception =
        perceive_scenario(scenario_text, ont, templates, cfg.dropout, cfg.perception_seed)?;
    let level = match &perception.choice {
        LevelChoice::Level(l) => *l,
        LevelChoice::Idle { reason } => return Err(PipelineError::Idle(reason.clone())),
    };
    let goal = assemble_goal(level, &perception.map, templates, cfg.variant)?;
    let problem = build_problem(domain, &perception.map, &format!("{}-level{level}", perception.scenario.frame))?;
    let compiled = compile_goal(domain, &problem, &goal, CompileOptions::default())?;
    let policy = match plan(&compiled.model, cfg.mode) {
        PlanOutcome::Solved(policy) => policy,
        PlanOutcome::Unsolvable => return Err(PipelineError::Unsolvable),
    };
    let episode = run(
        &compiled.model,
        &policy,
        &compiled.map,
        &goal,
        &perception.scenario,
        &perception.map,
        cfg.seed,
        cfg.max_steps,
    )?;
    Ok(PlayOutput { perception, level, goal, compiled, policy, episode })
}

/// Episode report in the structured text format.
pub fn episode_report(out: &PlayOutput) -> String {
    format!(
        "goal: {}\nlevel: {}\nmode: {}\nseed: {}\nsteps: {}\nstatus: {}\nverdict: {}\n",
        out.goal,
        out.level,
        out.policy.mode,
        out.episode.seed,
        out.episode.steps,
        out.episode.status,
        out.episode.verdict,
    )
}
