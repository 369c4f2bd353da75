//! `pastfond` — temporal-goal planning pipeline over a perceived scene.
//!
//! Subcommands mirror the pipeline stages so every intermediate artifact can
//! be produced, inspected and replayed from files: `perceive`,
//! `assemble-goal`, `compile`, `plan`, `verify`, `simulate`, `play`,
//! `eval-trace` and `dot`. Exit codes: 0 success, 1 error, 3 unsolvable.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pastfond::assets;
use pastfond::compile::{compile, CompilationMap, CompileOptions};
use pastfond::fond::{parse_domain, parse_problem, print_domain, print_problem, GroundedModel};
use pastfond::hierarchy::{assemble_goal, GoalVariant, LevelChoice, Templates};
use pastfond::pipeline::{self, PlayConfig};
use pastfond::plan::{
    export_dot, plan, policy_from_doc, policy_to_doc, verify_policy, Mode, PlanOutcome, PolicyDoc,
    Verdict,
};
use pastfond::pltl::{eval_trace, parse_formula, parse_trace};
use pastfond::semantic::Ontology;
use rayon::prelude::*;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_UNSOLVABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "pastfond", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strong,
    #[value(name = "strong-cyclic")]
    StrongCyclic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Strong => Mode::Strong,
            ModeArg::StrongCyclic => Mode::StrongCyclic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Text,
    Caption,
}

impl From<VariantArg> for GoalVariant {
    fn from(v: VariantArg) -> GoalVariant {
        match v {
            VariantArg::Text => GoalVariant::Text,
            VariantArg::Caption => GoalVariant::Caption,
        }
    }
}

/// Inputs shared by the scene-driven commands.
#[derive(Args)]
struct SceneArgs {
    /// Scenario file
    #[arg(long)]
    scenario: PathBuf,
    /// Ontology file (bundled default when omitted)
    #[arg(long)]
    ontology: Option<PathBuf>,
    /// Level templates file (bundled default when omitted)
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Perceptor dropout probability
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    /// Seed for the simulated perceptor
    #[arg(long, default_value_t = 0)]
    perception_seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Perceive a scenario: semantic map, per-level deltas, selected level
    Perceive {
        #[command(flatten)]
        scene: SceneArgs,
    },
    /// Print the goal formula the scenario's level assembles
    AssembleGoal {
        #[command(flatten)]
        scene: SceneArgs,
        /// Override the selected level
        #[arg(long)]
        level: Option<u8>,
        /// Which form of the top-level fragment to use
        #[arg(long, value_enum, default_value = "text")]
        g2_variant: VariantArg,
    },
    /// Compile a temporal goal into a plain FOND domain/problem pair
    Compile {
        /// Base domain file (bundled soccer domain when omitted)
        #[arg(long)]
        domain: Option<PathBuf>,
        /// Base problem file (alternative to --scenario)
        #[arg(long)]
        problem: Option<PathBuf>,
        /// Goal formula text (defaults to the scenario's assembled goal)
        #[arg(long)]
        goal: Option<String>,
        /// Scenario to derive the problem and goal from
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        ontology: Option<PathBuf>,
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        g2_variant: VariantArg,
        /// Emit the goal unfolded over basic and memory fluents
        #[arg(long)]
        unfold_goal: bool,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan a policy for a compiled domain/problem pair
    Plan {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "strong-cyclic")]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a policy against the model and the temporal goal
    Verify {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
    },
    /// Execute a policy in the micro-simulator
    Simulate {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive seed range `a..b` for a sweep
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long, default_value_t = 40)]
        max_steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: perceive, assemble, compile, plan, run
    Play {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "strong-cyclic")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "text")]
        g2_variant: VariantArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive seed range `a..b` for a sweep
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long, default_value_t = 40)]
        max_steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a formula on a trace file
    EvalTrace {
        #[arg(long)]
        goal: String,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Render a policy as a DOT graph
    Dot {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        policy: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_ontology(path: &Option<PathBuf>) -> Result<Ontology> {
    match path {
        Some(p) => Ok(Ontology::parse(&read(p)?)?),
        None => Ok(assets::default_ontology()),
    }
}

fn load_templates(path: &Option<PathBuf>) -> Result<Templates> {
    match path {
        Some(p) => Ok(Templates::parse(&read(p)?)?),
        None => Ok(assets::default_templates()),
    }
}

fn load_domain(path: &Option<PathBuf>) -> Result<pastfond::fond::FondDomain> {
    match path {
        Some(p) => Ok(parse_domain(&read(p)?)?),
        None => Ok(assets::default_domain()),
    }
}

fn parse_seed_range(range: &str) -> Result<(u64, u64)> {
    let (a, b) = range
        .split_once("..")
        .ok_or_else(|| anyhow!("seed range must be `a..b`, got `{range}`"))?;
    let a: u64 = a.trim().parse().context("range start")?;
    let b: u64 = b.trim().parse().context("range end")?;
    if b < a {
        bail!("empty seed range `{range}`");
    }
    Ok((a, b))
}

fn perception_report(p: &pipeline::Perception) -> String {
    let mut out = String::new();
    out.push_str(&format!("frame: {}\n", p.scenario.frame));
    out.push_str(&format!("objects: {}\n", p.scenario.objects.len()));
    out.push_str(&format!(
        "percepts: {}\n",
        p.percepts.objects.iter().filter(|o| !o.is_agent()).count()
    ));
    let counts = p.map.counts();
    let m_line: Vec<String> =
        counts.iter().map(|(concept, n)| format!("{concept} x{n}")).collect();
    out.push_str(&format!("M: {}\n", if m_line.is_empty() { "-".into() } else { m_line.join(", ") }));
    for inst in &p.map.instances {
        let from = if inst.sources.is_empty() {
            String::new()
        } else {
            format!(" from {}", inst.sources.join(" "))
        };
        out.push_str(&format!(
            "instance: {} {} ({:.2}, {:.2}){}\n",
            inst.id, inst.concept, inst.x, inst.y, from
        ));
    }
    let preds: Vec<String> = p.map.predicates.iter().map(|a| a.to_string()).collect();
    out.push_str(&format!("P: {}\n", if preds.is_empty() { "-".into() } else { preds.join(", ") }));
    let deltas: Vec<String> =
        p.deltas.iter().map(|(level, d)| format!("level{level}={d}")).collect();
    out.push_str(&format!("delta: {}\n", deltas.join(" ")));
    match &p.choice {
        LevelChoice::Level(l) => out.push_str(&format!("level: {l}\n")),
        LevelChoice::Idle { reason } => out.push_str(&format!("level: idle ({reason})\n")),
    }
    out
}

fn cmd_perceive(scene: &SceneArgs) -> Result<()> {
    let ont = load_ontology(&scene.ontology)?;
    let templates = load_templates(&scene.templates)?;
    let p = pipeline::perceive_scenario(
        &read(&scene.scenario)?,
        &ont,
        &templates,
        scene.dropout,
        scene.perception_seed,
    )?;
    print!("{}", perception_report(&p));
    Ok(())
}

fn scene_goal(
    scene: &SceneArgs,
    level: Option<u8>,
    variant: GoalVariant,
) -> Result<(pipeline::Perception, u8, pastfond::pltl::Formula, Templates)> {
    let ont = load_ontology(&scene.ontology)?;
    let templates = load_templates(&scene.templates)?;
    let p = pipeline::perceive_scenario(
        &read(&scene.scenario)?,
        &ont,
        &templates,
        scene.dropout,
        scene.perception_seed,
    )?;
    let level = match (level, &p.choice) {
        (Some(l), _) => l,
        (None, LevelChoice::Level(l)) => *l,
        (None, LevelChoice::Idle { reason }) => bail!("scenario is idle: {reason}"),
    };
    let goal = assemble_goal(level, &p.map, &templates, variant)?;
    Ok((p, level, goal, templates))
}

fn cmd_assemble_goal(scene: &SceneArgs, level: Option<u8>, variant: GoalVariant) -> Result<()> {
    let (_, level, goal, _) = scene_goal(scene, level, variant)?;
    println!("level: {level}");
    println!("goal: {goal}");
    Ok(())
}

struct CompiledFiles {
    domain: String,
    problem: String,
    mapping: String,
}

fn write_compiled(out: &Path, c: &CompiledFiles) -> Result<()> {
    write(&out.join("domain.pddl"), &c.domain)?;
    write(&out.join("problem.pddl"), &c.problem)?;
    write(&out.join("mapping.txt"), &c.mapping)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_compile(
    domain: &Option<PathBuf>,
    problem: &Option<PathBuf>,
    goal: &Option<String>,
    scenario: &Option<PathBuf>,
    ontology: &Option<PathBuf>,
    templates: &Option<PathBuf>,
    variant: GoalVariant,
    unfold_goal: bool,
    out: &Path,
) -> Result<()> {
    let d = load_domain(domain)?;
    let opts = CompileOptions { unfold_goal };
    let (base_problem, goal) = match (problem, scenario) {
        (Some(p), None) => {
            let goal_text =
                goal.as_ref().ok_or_else(|| anyhow!("--problem requires --goal"))?;
            (parse_problem(&read(p)?)?, parse_formula(goal_text)?)
        }
        (None, Some(sc_path)) => {
            let scene = SceneArgs {
                scenario: sc_path.clone(),
                ontology: ontology.clone(),
                templates: templates.clone(),
                dropout: 0.0,
                perception_seed: 0,
            };
            let (p, level, assembled, _) = scene_goal(&scene, None, variant)?;
            let base = pipeline::build_problem(
                &d,
                &p.map,
                &format!("{}-level{level}", p.scenario.frame),
            )?;
            let goal = match goal {
                Some(text) => parse_formula(text)?,
                None => assembled,
            };
            (base, goal)
        }
        _ => bail!("give exactly one of --problem or --scenario"),
    };
    let (d2, p2, map) = compile(&d, &base_problem, &goal, opts)?;
    write_compiled(
        out,
        &CompiledFiles {
            domain: print_domain(&d2),
            problem: print_problem(&p2),
            mapping: map.to_text(),
        },
    )?;
    println!("goal: {goal}");
    println!("memory fluents: {}", map.memory.len());
    println!("derived predicates: {}", map.derived.len());
    println!("wrote: {}", out.join("domain.pddl").display());
    println!("wrote: {}", out.join("problem.pddl").display());
    println!("wrote: {}", out.join("mapping.txt").display());
    Ok(())
}

fn load_model(domain: &Path, problem: &Path) -> Result<GroundedModel> {
    let d = parse_domain(&read(domain)?)?;
    let p = parse_problem(&read(problem)?)?;
    Ok(GroundedModel::ground(&d, &p)?)
}

fn cmd_plan(domain: &Path, problem: &Path, mode: Mode, out: &Path) -> Result<ExitCode> {
    let m = load_model(domain, problem)?;
    match plan(&m, mode) {
        PlanOutcome::Solved(policy) => {
            let doc = policy_to_doc(&m, &policy);
            write(&out.join("policy.json"), &doc.to_json())?;
            write(&out.join("policy.dot"), &export_dot(&m, &policy))?;
            println!("solved: {} states mapped", policy.stats.policy_size);
            println!("states expanded: {}", policy.stats.states_expanded);
            println!("wrote: {}", out.join("policy.json").display());
            println!("wrote: {}", out.join("policy.dot").display());
            Ok(ExitCode::SUCCESS)
        }
        PlanOutcome::Unsolvable => {
            println!("unsolvable");
            Ok(ExitCode::from(EXIT_UNSOLVABLE))
        }
    }
}

fn cmd_verify(
    domain: &Path,
    problem: &Path,
    policy: &Path,
    goal: &str,
    horizon: usize,
) -> Result<ExitCode> {
    let m = load_model(domain, problem)?;
    let doc = PolicyDoc::from_json(&read(policy)?)?;
    let pi = policy_from_doc(&m, &doc)?;
    let goal = parse_formula(goal)?;
    match verify_policy(&m, &pi, &goal, horizon)? {
        Verdict::Valid => {
            println!("valid");
            Ok(ExitCode::SUCCESS)
        }
        Verdict::CounterExample { reason, trace } => {
            println!("counterexample: {reason}");
            print!("{trace}");
            Ok(ExitCode::FAILURE)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    scene: &SceneArgs,
    domain: &Path,
    problem: &Path,
    policy: &Path,
    mapping: &Path,
    goal: &str,
    seeds: Vec<u64>,
    max_steps: usize,
    out: &Path,
) -> Result<()> {
    let ont = load_ontology(&scene.ontology)?;
    let m = load_model(domain, problem)?;
    let doc = PolicyDoc::from_json(&read(policy)?)?;
    let pi = policy_from_doc(&m, &doc)?;
    let map = CompilationMap::parse(&read(mapping)?)?;
    let goal = parse_formula(goal)?;
    let sc = pastfond::semantic::load_scenario(&read(&scene.scenario)?, &ont)?;
    let ps = pastfond::semantic::perceive(&sc, scene.dropout, scene.perception_seed)?;
    let sm = pastfond::semantic::conceptualize(&ps, &ont)?;
    let episodes: Vec<_> = seeds
        .par_iter()
        .map(|seed| pastfond::sim::run(&m, &pi, &map, &goal, &sc, &sm, *seed, max_steps))
        .collect();
    for (seed, ep) in seeds.iter().zip(episodes) {
        let ep = ep?;
        write(&out.join(format!("trace_{seed}.txt")), &ep.log)?;
        let report = format!(
            "goal: {goal}\nseed: {seed}\nsteps: {}\nstatus: {}\nverdict: {}\n",
            ep.steps, ep.status, ep.verdict
        );
        write(&out.join(format!("episode_{seed}.txt")), &report)?;
        println!("seed {seed}: steps={} status={} verdict={}", ep.steps, ep.status, ep.verdict);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_play(
    scene: &SceneArgs,
    domain: &Option<PathBuf>,
    mode: Mode,
    variant: GoalVariant,
    seeds: Vec<u64>,
    max_steps: usize,
    out: &Path,
) -> Result<ExitCode> {
    let d = load_domain(domain)?;
    let ont = load_ontology(&scene.ontology)?;
    let templates = load_templates(&scene.templates)?;
    let scenario_text = read(&scene.scenario)?;
    // run the first seed to materialize the stage artifacts
    let cfg = PlayConfig {
        dropout: scene.dropout,
        perception_seed: scene.perception_seed,
        mode,
        seed: seeds[0],
        max_steps,
        variant,
    };
    let first = match pipeline::play(&scenario_text, &d, &ont, &templates, &cfg) {
        Ok(p) => p,
        Err(pipeline::PipelineError::Unsolvable) => {
            println!("unsolvable");
            return Ok(ExitCode::from(EXIT_UNSOLVABLE));
        }
        Err(e) => return Err(e.into()),
    };
    write(&out.join("perception.txt"), &perception_report(&first.perception))?;
    write(&out.join("goal.txt"), &format!("{}\n", first.goal))?;
    write(&out.join("domain.pddl"), &print_domain(&first.compiled.domain))?;
    write(&out.join("problem.pddl"), &print_problem(&first.compiled.problem))?;
    write(&out.join("mapping.txt"), &first.compiled.map.to_text())?;
    let doc = policy_to_doc(&first.compiled.model, &first.policy);
    write(&out.join("policy.json"), &doc.to_json())?;
    write(&out.join("policy.dot"), &export_dot(&first.compiled.model, &first.policy))?;
    // remaining seeds reuse the compiled model and policy
    let rest: Vec<u64> = seeds[1..].to_vec();
    let mut episodes = vec![(seeds[0], first.episode.clone())];
    let more: Vec<_> = rest
        .par_iter()
        .map(|seed| {
            pastfond::sim::run(
                &first.compiled.model,
                &first.policy,
                &first.compiled.map,
                &first.goal,
                &first.perception.scenario,
                &first.perception.map,
                *seed,
                max_steps,
            )
            .map(|ep| (*seed, ep))
        })
        .collect();
    for r in more {
        episodes.push(r?);
    }
    for (seed, ep) in &episodes {
        write(&out.join(format!("trace_{seed}.txt")), &ep.log)?;
        let report = format!(
            "goal: {}\nlevel: {}\nmode: {}\nseed: {seed}\nsteps: {}\nstatus: {}\nverdict: {}\n",
            first.goal, first.level, mode, ep.steps, ep.status, ep.verdict
        );
        write(&out.join(format!("episode_{seed}.txt")), &report)?;
        println!("seed {seed}: steps={} status={} verdict={}", ep.steps, ep.status, ep.verdict);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval_trace(goal: &str, trace: &Path) -> Result<()> {
    let goal = parse_formula(goal)?;
    let t = parse_trace(&read(trace)?)?;
    println!("{}", eval_trace(&goal, &t)?);
    Ok(())
}

fn cmd_dot(domain: &Path, problem: &Path, policy: &Path) -> Result<()> {
    let m = load_model(domain, problem)?;
    let doc = PolicyDoc::from_json(&read(policy)?)?;
    let pi = policy_from_doc(&m, &doc)?;
    print!("{}", export_dot(&m, &pi));
    Ok(())
}

fn seed_list(seed: u64, seeds: &Option<String>) -> Result<Vec<u64>> {
    match seeds {
        Some(range) => {
            let (a, b) = parse_seed_range(range)?;
            Ok((a..=b).collect())
        }
        None => Ok(vec![seed]),
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Perceive { scene } => {
            cmd_perceive(scene)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::AssembleGoal { scene, level, g2_variant } => {
            cmd_assemble_goal(scene, *level, (*g2_variant).into())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compile {
            domain,
            problem,
            goal,
            scenario,
            ontology,
            templates,
            g2_variant,
            unfold_goal,
            out,
        } => {
            cmd_compile(
                domain,
                problem,
                goal,
                scenario,
                ontology,
                templates,
                (*g2_variant).into(),
                *unfold_goal,
                out,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan { domain, problem, mode, out } => {
            cmd_plan(domain, problem, (*mode).into(), out)
        }
        Command::Verify { domain, problem, policy, goal, horizon } => {
            cmd_verify(domain, problem, policy, goal, *horizon)
        }
        Command::Simulate {
            scene,
            domain,
            problem,
            policy,
            mapping,
            goal,
            seed,
            seeds,
            max_steps,
            out,
        } => {
            let list = seed_list(*seed, seeds)?;
            cmd_simulate(scene, domain, problem, policy, mapping, goal, list, *max_steps, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Play { scene, domain, mode, g2_variant, seed, seeds, max_steps, out } => {
            let list = seed_list(*seed, seeds)?;
            cmd_play(scene, domain, (*mode).into(), (*g2_variant).into(), list, *max_steps, out)
        }
        Command::EvalTrace { goal, trace } => {
            cmd_eval_trace(goal, trace)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dot { domain, problem, policy } => {
            cmd_dot(domain, problem, policy)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
