//! The `deceptive` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arena::{ArenaError, GameArena, Player, StateId, Strategy, StrategyError};
use crate::attractor::{self, Region};
use crate::ctf::{self, CtfError, GridConfig};
use crate::deception::{self, DeceptiveSolveResult, SolveKind};
use crate::hypergame::{Hypergame, HypergameError};
use crate::perception::{build_inference_graph, InferenceGraph, InferenceMechanism, Perception, PerceptionDocument, PerceptionError};
use crate::scltl::{self, Dfa, ScltlError};
use crate::set::StateSet;
use crate::sim::{self, PlayOptions, RolloutConfig, SimError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    TooLarge(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::TooLarge(_) => 3,
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(ArenaError, PerceptionError, HypergameError, StrategyError, serde_json::Error);

impl From<ScltlError> for CliError {
    fn from(e: ScltlError) -> Self {
        match e {
            ScltlError::TooManyProps(..) | ScltlError::TooManyStates(..) => CliError::TooLarge(e.to_string()),
            e => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<CtfError> for CliError {
    fn from(e: CtfError) -> Self {
        match e {
            CtfError::Formula(e) => e.into(),
            e => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::SizeGuard { .. } => CliError::TooLarge(e.to_string()),
            e => CliError::Invalid(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "deceptive", version, about = "Deceptive strategy synthesis for reachability games")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Keep only product states reachable from the initial pairs (default).
    #[arg(long, global = true, overrides_with = "full_product")]
    pub reachable: bool,
    /// Build every (state, perception) pair.
    #[arg(long, global = true, overrides_with = "reachable")]
    pub full_product: bool,
    /// Print table-shaped summary rows.
    #[arg(long, global = true)]
    pub summary: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a game; with a perception, solve the perceptual game G(X0).
    SolveGame(SolveGameArgs),
    /// Deceptive sure-winning region and strategy.
    SolveDsw(SolveArgs),
    /// Deceptive almost-sure-winning region and strategy.
    SolveDasw(SolveArgs),
    /// Compile an scLTL formula to a DFA.
    CompileScltl(CompileArgs),
    /// Generate the capture-the-flag game and hypergame.
    GenCtf(CtfArgs),
    /// Capture-the-flag table rows.
    BenchCtf(CtfArgs),
    /// Monte-Carlo rollouts of a P1 strategy.
    Simulate(SimulateArgs),
    /// Play as P2 in the terminal.
    Play(PlayArgs),
    /// Graphviz rendering of a solved hypergame.
    ExportDot(ExportArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SolveGameArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub perception: Option<PathBuf>,
}

/// Where the hypergame comes from: a game and a perception file, or a CTF
/// layout and objective.
#[derive(Debug, Args, Serialize)]
pub struct HyperArgs {
    #[arg(long, required_unless_present = "layout", conflicts_with = "layout")]
    pub game: Option<PathBuf>,
    /// Initial perception and inference mechanism; P2 sees every action if
    /// omitted.
    #[arg(long, requires = "game")]
    pub perception: Option<PathBuf>,
    /// Base states paired with the initial perception (all states if omitted).
    #[arg(long, value_delimiter = ',')]
    pub initial: Vec<String>,
    #[arg(long)]
    pub layout: Option<PathBuf>,
    /// `phi1`, `phi2` or a formula over FLAG1, FLAG2, collide.
    #[arg(long, requires = "layout", default_value = "phi1")]
    pub formula: String,
    /// Refuse hypergames with more product states.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_states: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CompileArgs {
    #[arg(long)]
    pub formula: String,
    /// Atomic propositions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub props: Vec<String>,
    /// Compare against a DFA file and report a distinguishing word.
    #[arg(long)]
    pub check: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CtfArgs {
    #[arg(long)]
    pub layout: PathBuf,
    #[arg(long, default_value = "phi1")]
    pub formula: String,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Dsw,
    Dasw,
    /// Uniform over enabled actions everywhere.
    Uniform,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long, value_enum, default_value_t = Solver::Dasw)]
    pub solver: Solver,
    /// P1 strategy file; overrides `--solver`.
    #[arg(long)]
    pub strategy: Option<PathBuf>,
    /// Product state name, or a base state paired with the initial perception.
    #[arg(long)]
    pub start: String,
    #[arg(long, default_value_t = 10_000)]
    pub episodes: usize,
    /// Defaults to ten times the number of product states.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Also run the almost-sure oracle and report whether `start` is in it.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PlayArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long, value_enum, default_value_t = Solver::Dasw)]
    pub solver: Solver,
    #[arg(long)]
    pub start: String,
    /// Show the hypergame state and P2's permissive moves.
    #[arg(long)]
    pub reveal_all: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Sure region file; solved with DSW when omitted.
    #[arg(long)]
    pub sure: Option<PathBuf>,
    /// Almost-sure region file; solved with DASW when omitted.
    #[arg(long)]
    pub almost_sure: Option<PathBuf>,
    /// Colour only the DSW region.
    #[arg(long, conflicts_with = "almost_sure")]
    pub dsw_only: bool,
}

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: u128,
}

/// Written next to every command's results. Everything but `timing` is a
/// function of the inputs and options.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub full_product: bool,
    pub options: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
    pub timing: Timing,
}

struct Run<'a> {
    cli: &'a Cli,
    name: &'static str,
    started: Instant,
    inputs: Vec<InputRecord>,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    fn new(cli: &'a Cli, name: &'static str) -> Result<Self, CliError> {
        fs::create_dir_all(&cli.out_dir)
            .map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", cli.out_dir.display())))?;
        Ok(Run {
            cli,
            name,
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    fn read(&mut self, role: &str, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputRecord {
            role: role.to_string(),
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|_| CliError::Invalid(format!("{} is not UTF-8", path.display())))
    }

    fn write(&mut self, file: &str, contents: &str) -> Result<(), CliError> {
        let path = self.cli.out_dir.join(file);
        fs::write(&path, contents).map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(file.to_string());
        Ok(())
    }

    fn finish<T: Serialize>(mut self, options: &T) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: self.name.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.cli.seed,
            full_product: self.cli.full_product,
            options: serde_json::to_value(options)?,
            inputs: std::mem::take(&mut self.inputs),
            outputs: std::mem::take(&mut self.outputs),
            timing: Timing {
                elapsed_ms: self.started.elapsed().as_millis(),
            },
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        self.write("manifest.json", &text)
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    run_with(args, &mut stdin.lock(), &mut stdout.lock())
}

/// [`run`] with explicit terminal streams.
pub fn run_with<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, input, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Invalid(e.to_string());
    match &cli.command {
        Command::SolveGame(a) => solve_game(cli, a, out),
        Command::SolveDsw(a) => solve(cli, a, SolveKind::Dsw, out),
        Command::SolveDasw(a) => solve(cli, a, SolveKind::Dasw, out),
        Command::CompileScltl(a) => compile_scltl(cli, a, out),
        Command::GenCtf(a) => gen_ctf(cli, a, out),
        Command::BenchCtf(a) => bench_ctf(cli, a, out),
        Command::Simulate(a) => simulate(cli, a, out),
        Command::Play(a) => play(cli, a, input, out),
        Command::ExportDot(a) => export_dot(cli, a, out),
    }
    .and_then(|()| out.flush().map_err(io))
}

fn json_line<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn solve_game(cli: &Cli, a: &SolveGameArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut run = Run::new(cli, "solve-game")?;
    let mut g = GameArena::from_json(&run.read("game", &a.game)?)?;
    if let Some(p) = &a.perception {
        let doc = PerceptionDocument::from_json(&run.read("perception", p)?)?;
        let (_, x0) = doc.resolve(&g)?;
        g = g.restrict_p1_actions(x0.actions())?;
    }
    let sol = attractor::solve(&g);
    run.write("win1.json", &sol.win1.to_json(&g))?;
    run.write("win2.json", &json_line(&names(&g, sol.win2.iter()))?)?;
    run.write("strategy.json", &attractor::sure_strategy(&g, &sol.win1).to_json(&g))?;
    writeln!(out, "win1: {} states, win2: {} states", sol.win1.len(), sol.win2.len()).map_err(io_err)?;
    run.finish(a)
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Invalid(e.to_string())
}

fn names(g: &GameArena, states: impl Iterator<Item = StateId>) -> Vec<String> {
    states.map(|s| g.state_name(s).to_string()).collect()
}

fn load_hypergame(cli: &Cli, run: &mut Run, a: &HyperArgs) -> Result<Hypergame, CliError> {
    let h = if let Some(layout) = &a.layout {
        let c = GridConfig::from_json(&run.read("layout", layout)?)?;
        let phi = ctf::objective(&a.formula)?;
        let b = ctf::build_benchmark(&c, &phi)?;
        if cli.full_product {
            Hypergame::build(&b.game, b.hypergame.igraph(), None)?
        } else {
            b.hypergame
        }
    } else {
        let game = a.game.as_ref().expect("clap requires --game without --layout");
        let g = GameArena::from_json(&run.read("game", game)?)?;
        let (mechanism, x0) = match &a.perception {
            Some(p) => PerceptionDocument::from_json(&run.read("perception", p)?)?.resolve(&g)?,
            None => (InferenceMechanism::Additive, Perception::new(g.player_actions(Player::P1))),
        };
        let ig: InferenceGraph = build_inference_graph(&g, &mechanism, &x0)?;
        if cli.full_product {
            Hypergame::build(&g, &ig, None)?
        } else {
            let init: Vec<(StateId, usize)> = if a.initial.is_empty() {
                g.states().map(|s| (s, 0)).collect()
            } else {
                a.initial
                    .iter()
                    .map(|n| {
                        g.state_by_name(n)
                            .map(|s| (s, 0))
                            .ok_or_else(|| CliError::Invalid(format!("unknown initial state `{n}`")))
                    })
                    .collect::<Result<_, _>>()?
            };
            Hypergame::build(&g, &ig, Some(&init))?
        }
    };
    if h.num_states() > a.max_states {
        return Err(CliError::TooLarge(format!(
            "hypergame has {} states; limit is {}",
            h.num_states(),
            a.max_states
        )));
    }
    Ok(h)
}

fn solve_with(h: &Hypergame, kind: SolveKind) -> DeceptiveSolveResult {
    match kind {
        SolveKind::Dsw => deception::dsw(h),
        SolveKind::Dasw => deception::dasw(h),
    }
}

fn solve(cli: &Cli, a: &SolveArgs, kind: SolveKind, out: &mut dyn Write) -> Result<(), CliError> {
    let (name, label) = match kind {
        SolveKind::Dsw => ("solve-dsw", "dsw"),
        SolveKind::Dasw => ("solve-dasw", "dasw"),
    };
    let mut run = Run::new(cli, name)?;
    let h = load_hypergame(cli, &mut run, &a.hyper)?;
    let r = solve_with(&h, kind);
    let report = deception::vod(&h, &r);
    run.write("hypergame.json", &h.arena().to_json())?;
    run.write("region.json", &r.region.to_json(h.arena()))?;
    run.write("strategy.json", &r.strategy.to_json(h.arena()))?;
    run.write("vod.json", &json_line(&report)?)?;
    writeln!(
        out,
        "{label}: {} winning product states, projection {} base states, VoD = {}",
        r.region.len(),
        report.deceptive_projection,
        deception::format_vod(report.vod)
    )
    .map_err(io_err)?;
    if cli.summary {
        writeln!(
            out,
            "|V| = {}, |E| = {}, |F| = {}, win1 = {}, win2 = {}",
            h.num_states(),
            h.arena().num_transitions(),
            h.arena().final_states().len(),
            report.win1_true,
            report.win2_true
        )
        .map_err(io_err)?;
    }
    run.finish(a)
}

fn compile_scltl(cli: &Cli, a: &CompileArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut run = Run::new(cli, "compile-scltl")?;
    let f = scltl::parse(&a.formula, &a.props)?;
    let dfa = scltl::compile(&f)?;
    run.write("dfa.json", &dfa.to_json())?;
    run.write("dfa.dot", &dfa.to_dot())?;
    writeln!(out, "{}: {} states, accepting {:?}", f, dfa.num_states(), dfa.accepting_states()).map_err(io_err)?;
    if let Some(path) = &a.check {
        let other = Dfa::from_json(&run.read("reference", path)?)?;
        match dfa.difference_witness(&other, |_| true)? {
            None => writeln!(out, "equivalent to {}", path.display()),
            Some(w) => writeln!(out, "differs from {} on symbols {w:?}", path.display()),
        }
        .map_err(io_err)?;
    }
    run.finish(a)
}

fn gen_ctf(cli: &Cli, a: &CtfArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut run = Run::new(cli, "gen-ctf")?;
    let c = GridConfig::from_json(&run.read("layout", &a.layout)?)?;
    let phi = ctf::objective(&a.formula)?;
    let b = ctf::build_benchmark(&c, &phi)?;
    let (mechanism, ig) = ctf::build_ctf_inference(&b.game)?;
    let x0 = ig.vertex(c.initial_inference_vertex).clone();
    run.write("transition_system.json", &b.ts.arena.to_json())?;
    run.write("game.json", &b.game.to_json())?;
    run.write("perception.json", &PerceptionDocument::describe(&b.game, &mechanism, &x0).to_json())?;
    run.write("entries.json", &json_line(&names(&b.game, b.entries.iter().copied()))?)?;
    run.write("hypergame.json", &b.hypergame.arena().to_json())?;
    writeln!(
        out,
        "transition system {} states, game {} states, hypergame {} states",
        b.ts.arena.num_states(),
        b.game.num_states(),
        b.hypergame.num_states()
    )
    .map_err(io_err)?;
    if cli.summary {
        print_table(out, &ctf::table_rows(&b))?;
    }
    run.finish(a)
}

fn print_table(out: &mut dyn Write, rows: &[ctf::TableRow]) -> Result<(), CliError> {
    writeln!(out, "{}", ctf::TABLE_HEADER).map_err(io_err)?;
    for row in rows {
        writeln!(out, "{}", row.render()).map_err(io_err)?;
    }
    Ok(())
}

fn bench_ctf(cli: &Cli, a: &CtfArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut run = Run::new(cli, "bench-ctf")?;
    let c = GridConfig::from_json(&run.read("layout", &a.layout)?)?;
    let phi = ctf::objective(&a.formula)?;
    let b = ctf::build_benchmark(&c, &phi)?;
    let rows = ctf::table_rows(&b);
    print_table(out, &rows)?;
    let mut csv = String::from("row, |V|, |E|, |F|, region, projection, win2, VoD\n");
    for row in &rows {
        csv += &format!("{}, {}\n", row.name, row.csv());
    }
    run.write("table.csv", &csv)?;
    run.write("table.json", &json_line(&rows)?)?;
    run.finish(a)
}

fn resolve_start(h: &Hypergame, name: &str) -> Result<StateId, CliError> {
    h.arena()
        .state_by_name(name)
        .or_else(|| h.base().state_by_name(name).and_then(|s| h.state_of(s, 0)))
        .ok_or_else(|| CliError::Invalid(format!("unknown start state `{name}`")))
}

fn p1_strategy(run: &mut Run, h: &Hypergame, solver: Solver, file: Option<&PathBuf>) -> Result<Strategy, CliError> {
    Ok(match (file, solver) {
        (Some(path), _) => Strategy::from_json(h.arena(), Player::P1, &run.read("strategy", path)?)?,
        (None, Solver::Dsw) => deception::dsw(h).strategy,
        (None, Solver::Dasw) => deception::dasw(h).strategy,
        (None, Solver::Uniform) => Strategy::uniform_enabled(h.arena(), Player::P1),
    })
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    start: &'a str,
    #[serde(flatten)]
    stats: &'a sim::RolloutStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    in_oracle: Option<bool>,
}

fn simulate(cli: &Cli, a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut run = Run::new(cli, "simulate")?;
    let h = load_hypergame(cli, &mut run, &a.hyper)?;
    let start = resolve_start(&h, &a.start)?;
    let pi = p1_strategy(&mut run, &h, a.solver, a.strategy.as_ref())?;
    let mut cfg = RolloutConfig::new(a.episodes, cli.seed);
    cfg.horizon = a.horizon;
    let stats = sim::rollout(&h, &pi, start, &cfg)?;
    let in_oracle = if a.oracle {
        Some(sim::asw_oracle(&h)?.contains(&start))
    } else {
        None
    };
    let text = json_line(&SimulateReport {
        start: h.arena().state_name(start),
        stats: &stats,
        in_oracle,
    })?;
    run.write("stats.json", &text)?;
    out.write_all(text.as_bytes()).map_err(io_err)?;
    run.finish(a)
}

fn play(cli: &Cli, a: &PlayArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let mut run = Run::new(cli, "play")?;
    let h = load_hypergame(cli, &mut run, &a.hyper)?;
    let start = resolve_start(&h, &a.start)?;
    let pi = p1_strategy(&mut run, &h, a.solver, None)?;
    let opts = PlayOptions {
        reveal_all: a.reveal_all,
        seed: cli.seed,
    };
    let transcript = sim::interactive_play(&h, &pi, start, opts, input, &mut *out)?;
    run.write("transcript.json", &(transcript.to_json() + "\n"))?;
    run.finish(a)
}

fn export_dot(cli: &Cli, a: &ExportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut run = Run::new(cli, "export-dot")?;
    let h = load_hypergame(cli, &mut run, &a.hyper)?;
    let mut region = |role: &str, path: Option<&PathBuf>, kind: SolveKind| -> Result<StateSet, CliError> {
        Ok(match path {
            Some(p) => Region::from_json(h.arena(), &run.read(role, p)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?
                .members()
                .clone(),
            None => solve_with(&h, kind).region.members().clone(),
        })
    };
    let sure = region("sure", a.sure.as_ref(), SolveKind::Dsw)?;
    let almost = if a.dsw_only {
        None
    } else {
        Some(region("almost_sure", a.almost_sure.as_ref(), SolveKind::Dasw)?)
    };
    if let Some(z) = &almost {
        if !sure.is_subset(z) {
            return Err(CliError::Invalid("sure region is not contained in the almost-sure region".into()));
        }
    }
    run.write("hypergame.dot", &h.to_dot(&sure, almost.as_ref()))?;
    let green = almost.as_ref().map_or(0, |z| z.len() - sure.len());
    let red = h.num_states() - sure.len() - green;
    writeln!(out, "blue {}, green {green}, red {red}", sure.len()).map_err(io_err)?;
    run.finish(a)
}
