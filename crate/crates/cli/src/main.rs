mod presets;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use degnet::constructions::{
    build_clique, build_figure_network, build_path, build_star, dominating_set_to_set_cover,
    set_cover_to_best_response_gadget, Figure,
};
use degnet::cost::parse_rational;
use degnet::dynamics::{
    adversarial_schedule, run_dynamics, scripted_linear_sequences, ActivationScheme, DynamicsTrace,
    LinearTarget, MovePolicy,
};
use degnet::io::{parse_graph, parse_set_cover, serialize_graph, serialize_set_cover};
use degnet::oracle::{equilibrium_census, Witness};
use degnet::{
    agent_cost, best_response_exact, social_cost, verify_equilibrium, CheckLevel, Execution,
    GameConfig, Locality, OwnedGraph, Price, Variant,
};
use serde::Serialize;

/// Worker count for parallel runs; unset means one per core.
const THREADS_ENV: &str = "DEGNET_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "degnet",
    version,
    about = "Degree-price network creation games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a canonical network in the graph text format.
    Construct(ConstructArgs),
    /// Agent costs and the social cost of a network.
    Cost(CostArgs),
    /// Exact best response of one agent.
    BestResponse(BestResponseArgs),
    /// Check whether a network is an equilibrium.
    Verify(VerifyArgs),
    /// Run improving-response dynamics.
    Dynamics(DynamicsArgs),
    /// Exhaustive census of all networks on n nodes.
    Enumerate(EnumerateArgs),
    /// Hardness reductions as file transformations.
    Reduce(ReduceArgs),
    /// Named experiments with built-in assertions.
    Preset(PresetArgs),
}

#[derive(Args, Debug, Clone)]
struct GameArgs {
    #[arg(long, value_enum, default_value = "ncg")]
    game: GameKind,
    /// Locality radius, or `global`.
    #[arg(long, default_value = "global")]
    k: String,
    #[arg(long, default_value = "1")]
    beta: String,
    #[arg(long, default_value = "-1")]
    gamma: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GameKind {
    Ncg,
    Aog,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write the primary output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Level {
    Exact,
    SingleMove,
}

impl From<Level> for CheckLevel {
    fn from(l: Level) -> Self {
        match l {
            Level::Exact => CheckLevel::Exact,
            Level::SingleMove => CheckLevel::SingleMove,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Policy {
    BestSingleEdge,
    FirstImprovingSingleMove,
    FullBestResponse,
}

impl From<Policy> for MovePolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::BestSingleEdge => MovePolicy::BestSingleEdge,
            Policy::FirstImprovingSingleMove => MovePolicy::FirstImprovingSingleMove,
            Policy::FullBestResponse => MovePolicy::FullBestResponse,
        }
    }
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// `star`, `path`, `clique`, or a figure name such as `fig2b` or `fig3-g1`.
    kind: String,
    /// Node count for star, path and clique.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CostArgs {
    /// Graph file, or a builder such as `star:8`, `path:50`, `clique:5`, `fig:fig2b`.
    graph: String,
    #[arg(long)]
    agent: Option<usize>,
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BestResponseArgs {
    graph: String,
    #[arg(long)]
    agent: usize,
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    graph: String,
    #[arg(long, value_enum, default_value = "exact")]
    level: Level,
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeKind {
    Random,
    RoundRobin,
    /// The scripted add-only schedule from the path that ends at diameter 3.
    Adversarial,
    /// Scripted linear-length sequence to a degAOG equilibrium.
    LinearNe,
    /// Scripted linear-length sequence to a deg2AOG equilibrium.
    Linear2ne,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    /// Initial network: a file or a builder such as `path:50`.
    graph: String,
    #[arg(long, value_enum, default_value = "random")]
    scheme: SchemeKind,
    #[arg(long, value_enum)]
    policy: Option<Policy>,
    /// Seed for the random scheme.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    max_steps: usize,
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    n: usize,
    /// Directory for the optimum and extreme equilibrium witness graphs.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[command(subcommand)]
    which: Reduction,
}

#[derive(Subcommand, Debug)]
enum Reduction {
    /// Set cover instance file to the best-response gadget.
    SetCoverToGadget {
        instance: PathBuf,
        /// Gadget graph file; the role map goes to stdout or `--roles`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        roles: Option<PathBuf>,
    },
    /// Regular graph to the set cover instance of closed neighbourhoods.
    DominatingSetToSetCover {
        graph: String,
        /// Degree of the graph.
        #[arg(long)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct PresetArgs {
    /// Preset name; omit with `--list` to see them all.
    name: Option<String>,
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Assertion(String),
    Resource(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Assertion(m) | CliError::Resource(m) => m,
        }
    }
}

impl From<degnet::Error> for CliError {
    fn from(e: degnet::Error) -> Self {
        if e.is_resource_limit() {
            CliError::Resource(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl GameArgs {
    fn config(&self) -> CliResult<GameConfig> {
        let variant = match self.game {
            GameKind::Ncg => Variant::Ncg,
            GameKind::Aog => Variant::Aog,
        };
        let locality = match self.k.as_str() {
            "global" => Locality::Global,
            k => Locality::Radius(
                k.parse()
                    .map_err(|_| usage(format!("--k expects an integer or `global`, got `{k}`")))?,
            ),
        };
        let beta = parse_rational(&self.beta).map_err(|e| usage(format!("--beta: {e}")))?;
        let gamma = parse_rational(&self.gamma).map_err(|e| usage(format!("--gamma: {e}")))?;
        let cfg = GameConfig::new(variant, locality).with_price(Price::new(beta, gamma));
        cfg.validate()?;
        Ok(cfg)
    }
}

fn builder(kind: &str, n: usize) -> CliResult<OwnedGraph> {
    Ok(match kind {
        "star" => build_star(n)?,
        "path" => build_path(n)?,
        "clique" => build_clique(n),
        _ => return Err(usage(format!("unknown builder `{kind}`"))),
    })
}

/// A graph file, or `star:N`, `path:N`, `clique:N`, `fig:NAME`.
fn load_graph(source: &str) -> CliResult<OwnedGraph> {
    if let Some((kind, arg)) = source.split_once(':') {
        if kind == "fig" {
            return Ok(build_figure_network(arg.parse().map_err(usage)?));
        }
        if matches!(kind, "star" | "path" | "clique") {
            let n = arg
                .parse()
                .map_err(|_| usage(format!("bad node count in `{source}`")))?;
            return builder(kind, n);
        }
    }
    let text = std::fs::read_to_string(source).map_err(|e| usage(format!("{source}: {e}")))?;
    parse_graph(&text).map_err(|e| usage(format!("{source}: {e}")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn reject_csv(output: &OutputArgs, what: &str) -> CliResult<()> {
    if output.format == Format::Csv {
        return Err(usage(format!("{what} has no CSV form")));
    }
    Ok(())
}

fn construct(a: &ConstructArgs) -> CliResult<()> {
    let g = match a.kind.as_str() {
        "star" | "path" | "clique" => {
            let n =
                a.n.ok_or_else(|| usage(format!("`{}` needs --n", a.kind)))?;
            builder(&a.kind, n)?
        }
        fig => {
            if a.n.is_some() {
                return Err(usage("--n conflicts with a figure network"));
            }
            build_figure_network(fig.parse::<Figure>().map_err(usage)?)
        }
    };
    let text = match a.output.format {
        Format::Text => serialize_graph(&g),
        Format::Json => to_json(&Witness(g)),
        Format::Csv => return Err(usage("networks have no CSV form")),
    };
    emit(&a.output.out, &text)
}

#[derive(Serialize)]
struct CostReport {
    config: GameConfig,
    game: String,
    social_cost: degnet::Cost,
    agents: Vec<AgentCost>,
}

#[derive(Serialize)]
struct AgentCost {
    agent: usize,
    #[serde(flatten)]
    cost: degnet::CostBreakdown,
}

fn cost(a: &CostArgs) -> CliResult<()> {
    reject_csv(&a.output, "cost")?;
    let cfg = a.game.config()?;
    let g = load_graph(&a.graph)?;
    let agents: Vec<usize> = match a.agent {
        Some(u) => vec![u],
        None => (0..g.n()).collect(),
    };
    let mut rows = Vec::new();
    for u in agents {
        rows.push(AgentCost {
            agent: u,
            cost: agent_cost(&g, u, &cfg)?,
        });
    }
    let report = CostReport {
        config: cfg,
        game: cfg.to_string(),
        social_cost: social_cost(&g, &cfg),
        agents: rows,
    };
    let text = match a.output.format {
        Format::Text => {
            let mut s = String::new();
            for r in &report.agents {
                let _ = writeln!(s, "agent {}: {}", r.agent, r.cost.total);
            }
            let _ = writeln!(s, "social cost: {}", report.social_cost);
            s
        }
        _ => to_json(&report),
    };
    emit(&a.output.out, &text)
}

fn best_response(a: &BestResponseArgs) -> CliResult<()> {
    reject_csv(&a.output, "best-response")?;
    let cfg = a.game.config()?;
    let g = load_graph(&a.graph)?;
    let br = best_response_exact(&g, a.agent, &cfg)?;
    let text = match a.output.format {
        Format::Text => format!(
            "agent {}: buy {:?}, cost {} (now {})\n",
            br.agent, br.targets, br.cost, br.current_cost
        ),
        _ => to_json(
            &serde_json::json!({ "config": cfg, "game": cfg.to_string(), "best_response": br }),
        ),
    };
    emit(&a.output.out, &text)
}

fn verify(a: &VerifyArgs) -> CliResult<()> {
    reject_csv(&a.output, "verify")?;
    let cfg = a.game.config()?;
    let g = load_graph(&a.graph)?;
    let report = verify_equilibrium(&g, &cfg, a.level.into())?;
    let text = match a.output.format {
        Format::Text => match &report.witness {
            None => format!("{cfg}: equilibrium ({:?})\n", report.check_level),
            Some(w) => format!(
                "{cfg}: not an equilibrium; agent {} improves {} -> {}\n",
                w.agent, w.cost_before, w.cost_after
            ),
        },
        _ => to_json(
            &serde_json::json!({ "config": cfg, "game": cfg.to_string(), "report": report }),
        ),
    };
    emit(&a.output.out, &text)
}

fn dynamics(a: &DynamicsArgs) -> CliResult<()> {
    let cfg = a.game.config()?;
    let g = load_graph(&a.graph)?;
    let n = g.n();
    let scripted = !matches!(a.scheme, SchemeKind::Random | SchemeKind::RoundRobin);
    if scripted && a.policy.is_some() {
        return Err(usage("--policy conflicts with a scripted scheme"));
    }
    if a.seed.is_some() && a.scheme != SchemeKind::Random {
        return Err(usage("--seed only applies to the random scheme"));
    }
    let policy: MovePolicy = a.policy.unwrap_or(Policy::BestSingleEdge).into();
    let scheme = match a.scheme {
        SchemeKind::Random => ActivationScheme::uniform_random(a.seed.unwrap_or(0), policy),
        SchemeKind::RoundRobin => ActivationScheme::round_robin(n, policy),
        SchemeKind::Adversarial => adversarial_schedule(n, &cfg)?,
        SchemeKind::LinearNe => scripted_linear_sequences(n, LinearTarget::DegaogNe)?,
        SchemeKind::Linear2ne => scripted_linear_sequences(n, LinearTarget::Deg2aog2ne)?,
    };
    if scripted && g != build_path(n)? {
        return Err(usage(
            "scripted schemes start from the path 0-1-...-(n-1) with edges owned by the lower id",
        ));
    }
    let trace = run_dynamics(&g, &cfg, &scheme, a.max_steps)?;
    let text = match a.output.format {
        Format::Json => to_json(&serde_json::json!({ "config": cfg, "trace": trace })),
        Format::Csv => format!(
            "{}\n{}\n",
            DynamicsTrace::csv_header(),
            trace.csv_row(&a.graph)
        ),
        Format::Text => format!(
            "{:?} after {} steps ({} activations, {} rounds); social cost {}, diameter {}\n",
            trace.outcome,
            trace.steps.len(),
            trace.activations,
            trace.rounds,
            trace.final_social_cost,
            trace.final_diameter
        ),
    };
    emit(&a.output.out, &text)
}

fn enumerate(a: &EnumerateArgs) -> CliResult<()> {
    reject_csv(&a.output, "enumerate")?;
    let cfg = a.game.config()?;
    let s = equilibrium_census(a.n, &cfg, Execution::default())?;
    if let Some(dir) = &a.witness_dir {
        std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
        for (name, w) in [
            ("opt", &s.opt_witness),
            ("best_eq", &s.best_eq_witness),
            ("worst_eq", &s.worst_eq_witness),
        ] {
            if let Some(w) = w {
                write_file(&dir.join(format!("{name}.txt")), &serialize_graph(&w.0))?;
            }
        }
    }
    let text = match a.output.format {
        Format::Text => {
            let opt = |r: Option<degnet::Rational>| r.map_or("-".to_string(), |r| r.to_string());
            format!(
                "{} n={}: {} equilibria among {} connected networks; opt {}, best eq {}, worst eq {}, PoA {}, PoS {}\n",
                s.game,
                s.n,
                s.equilibrium_count,
                s.connected,
                opt(s.opt_cost),
                opt(s.best_eq_cost),
                opt(s.worst_eq_cost),
                opt(s.poa),
                opt(s.pos)
            )
        }
        _ => to_json(&s),
    };
    emit(&a.output.out, &text)
}

fn reduce(a: &ReduceArgs) -> CliResult<()> {
    match &a.which {
        Reduction::SetCoverToGadget {
            instance,
            out,
            roles,
        } => {
            let text = std::fs::read_to_string(instance)
                .map_err(|e| usage(format!("{}: {e}", instance.display())))?;
            let inst = parse_set_cover(&text)
                .map_err(|e| usage(format!("{}: {e}", instance.display())))?;
            let layout = set_cover_to_best_response_gadget(&inst)?;
            let graph = serialize_graph(&layout.graph);
            let role_json = to_json(&serde_json::json!({
                "u": layout.u(),
                "x": layout.x(),
                "layout": layout,
            }));
            match (out, roles) {
                (Some(o), r) => {
                    write_file(o, &graph)?;
                    emit(r, &role_json)
                }
                (None, Some(r)) => {
                    write_file(r, &role_json)?;
                    print!("{graph}");
                    Ok(())
                }
                (None, None) => {
                    print!(
                        "{}",
                        to_json(
                            &serde_json::json!({ "graph": graph, "roles": serde_json::from_str::<serde_json::Value>(&role_json).expect("valid json") })
                        )
                    );
                    Ok(())
                }
            }
        }
        Reduction::DominatingSetToSetCover { graph, q, out } => {
            let g = load_graph(graph)?;
            let inst = dominating_set_to_set_cover(&g, *q)?;
            emit(out, &serialize_set_cover(&inst))
        }
    }
}

fn preset(a: &PresetArgs) -> CliResult<()> {
    if a.list {
        if a.name.is_some() {
            return Err(usage("--list conflicts with a preset name"));
        }
        let mut s = String::new();
        for p in presets::all() {
            let _ = writeln!(s, "{:<22} {}", p.name, p.description);
        }
        return emit(&a.output.out, &s);
    }
    let name = a
        .name
        .as_deref()
        .ok_or_else(|| usage("a preset name or --list is required"))?;
    let p =
        presets::find(name).ok_or_else(|| usage(format!("unknown preset `{name}`; try --list")))?;
    let report = (p.run)(a.seed)?;
    let text = match a.output.format {
        Format::Json => to_json(&report),
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| usage(format!("preset `{name}` has no CSV form")))?,
        Format::Text => {
            let mut s = String::new();
            for c in &report.assertions {
                let _ = writeln!(
                    s,
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            s
        }
    };
    emit(&a.output.out, &text)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Assertion(format!(
            "preset `{name}` failed its assertions"
        )))
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| usage(format!("{THREADS_ENV} must be a positive integer")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Cost(a) => cost(a),
        Command::BestResponse(a) => best_response(a),
        Command::Verify(a) => verify(a),
        Command::Dynamics(a) => dynamics(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Reduce(a) => reduce(a),
        Command::Preset(a) => preset(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
