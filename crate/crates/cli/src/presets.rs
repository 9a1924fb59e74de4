//! Named experiments. Each is fully determined by its name and seed, and its
//! report carries every game configuration it ran.

use degnet::constructions::{
    build_clique, build_figure_network, build_path, build_star, cycle_swaps,
    set_cover_to_best_response_gadget, Figure, SetCoverInstance,
};
use degnet::dynamics::{
    adversarial_schedule, run_dynamics, scripted_linear_sequences, ActivationScheme, DynamicsTrace,
    LinearTarget, MovePolicy, Outcome, ScriptedMove,
};
use degnet::experiments::{mean, path_sweep, poly_fit, scale_fit};
use degnet::graph::diameter;
use degnet::oracle::{
    best_reachable, equilibrium_census, min_set_cover, optimal_social_cost, DEFAULT_REACH_BUDGET,
};
use degnet::par;
use degnet::{
    best_response_exact, rho, social_cost, verify_equilibrium, CheckLevel, Cost, Execution,
    GameConfig, MoveKind, Rational,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliResult;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    generator: &'static str,
    scheme: &'static str,
    /// Acceptance criteria this preset reproduces.
    criteria: &'static [u32],
    pub run: fn(u64) -> CliResult<PresetReport>,
}

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct PresetReport {
    preset: &'static str,
    description: &'static str,
    generator: &'static str,
    scheme: &'static str,
    criteria: &'static [u32],
    seed: u64,
    configs: Vec<GameConfig>,
    results: Value,
    pub assertions: Vec<Check>,
    pub passed: bool,
    #[serde(skip)]
    pub csv: Option<String>,
}

struct Builder {
    configs: Vec<GameConfig>,
    results: serde_json::Map<String, Value>,
    checks: Vec<Check>,
    csv: Option<String>,
}

impl Builder {
    fn new(configs: &[GameConfig]) -> Self {
        Self {
            configs: configs.to_vec(),
            results: serde_json::Map::new(),
            checks: Vec::new(),
            csv: None,
        }
    }

    fn result(&mut self, key: impl Into<String>, v: impl Serialize) {
        self.results.insert(
            key.into(),
            serde_json::to_value(v).expect("results serialize"),
        );
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn traces_csv(&mut self, traces: &[(String, &DynamicsTrace)]) {
        let mut s = format!("{}\n", DynamicsTrace::csv_header());
        for (label, t) in traces {
            s.push_str(&t.csv_row(label));
            s.push('\n');
        }
        self.csv = Some(s);
    }

    fn finish(self, p: &Preset, seed: u64) -> PresetReport {
        let passed = self.checks.iter().all(|c| c.passed);
        PresetReport {
            preset: p.name,
            description: p.description,
            generator: p.generator,
            scheme: p.scheme,
            criteria: p.criteria,
            seed,
            configs: self.configs,
            results: Value::Object(self.results),
            assertions: self.checks,
            passed,
            csv: self.csv,
        }
    }
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "star-equilibrium",
        description: "stars S_3..S_10 are exact equilibria in all four variants",
        generator: "build_star, n = 3..10",
        scheme: "none",
        criteria: &[1],
        run: star_equilibrium,
    },
    Preset {
        name: "star-optimum",
        description: "brute-force social optimum equals 2(n-1)^2 and is a star",
        generator: "all networks, n = 2..5",
        scheme: "none",
        criteria: &[2],
        run: star_optimum,
    },
    Preset {
        name: "ncg-diameter",
        description: "degNCG equilibria have diameter at most 3",
        generator: "all networks n = 2..5, plus fig2b",
        scheme: "none",
        criteria: &[3],
        run: ncg_diameter,
    },
    Preset {
        name: "local-diameter",
        description: "2-local equilibria stay below (2/3)(1 + sqrt(9n + 19))",
        generator: "all networks n = 2..5, plus fig2c and fig2d",
        scheme: "none",
        criteria: &[4],
        run: local_diameter,
    },
    Preset {
        name: "price-of-stability",
        description: "the optimum is an equilibrium in every variant",
        generator: "all networks, n = 3..5",
        scheme: "none",
        criteria: &[5],
        run: price_of_stability,
    },
    Preset {
        name: "aog-poa",
        description: "cliques are add-only equilibria and witness the worst equilibrium",
        generator: "build_clique n = 3..8; all networks n = 3..5",
        scheme: "none",
        criteria: &[6],
        run: aog_poa,
    },
    Preset {
        name: "improving-cycle",
        description: "six improving swaps cycle back to the first network",
        generator: "fig3-g1",
        scheme: "scripted swaps",
        criteria: &[7],
        run: improving_cycle,
    },
    Preset {
        name: "adversarial",
        description: "the scripted add-only schedule from P_n needs quadratically many moves",
        generator: "build_path, n = 20, 30, 40",
        scheme: "scripted adversarial schedule",
        criteria: &[8],
        run: adversarial,
    },
    Preset {
        name: "round-robin",
        description: "round-robin best single edge dynamics in deg2AOG from P_n",
        generator: "build_path, n = 25, 50, 100",
        scheme: "round robin, best single edge",
        criteria: &[9],
        run: round_robin,
    },
    Preset {
        name: "random-scheme",
        description: "uniform random activation with first improving moves converges",
        generator: "build_path n = 10, 15, 20; 20 seeds from the given seed",
        scheme: "uniform random, first improving single move",
        criteria: &[10],
        run: random_scheme,
    },
    Preset {
        name: "linear-sequences",
        description: "scripted linear-length improving sequences reach equilibria",
        generator: "build_path, n = 10, 13, 16, 19",
        scheme: "scripted linear sequences",
        criteria: &[11],
        run: linear_sequences,
    },
    Preset {
        name: "hardness-gadget",
        description: "the gadget's best response buys a minimum set cover",
        generator: "10 random set cover instances from the seed",
        scheme: "none",
        criteria: &[12],
        run: hardness_gadget,
    },
    Preset {
        name: "rho",
        description: "round-robin outcome against the best reachable network from P_n",
        generator: "build_path, n = 5, 6",
        scheme: "round robin, best single edge; exhaustive reachability",
        criteria: &[13],
        run: rho_preset,
    },
];

pub fn all() -> &'static [Preset] {
    PRESETS
}

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn preset(name: &str) -> &'static Preset {
    find(name).expect("registered preset")
}

fn variants() -> [GameConfig; 4] {
    [
        GameConfig::ncg(),
        GameConfig::local_ncg(2),
        GameConfig::aog(),
        GameConfig::local_aog(2),
    ]
}

fn opt_str(r: Option<Rational>) -> String {
    r.map_or_else(|| "-".into(), |r| r.to_string())
}

fn star_equilibrium(seed: u64) -> CliResult<PresetReport> {
    let cfgs = variants();
    let mut b = Builder::new(&cfgs);
    for cfg in cfgs {
        let mut bad = Vec::new();
        for n in 3..=10 {
            if !verify_equilibrium(&build_star(n)?, &cfg, CheckLevel::Exact)?.is_equilibrium {
                bad.push(n);
            }
        }
        b.check(
            format!("{cfg} stars"),
            bad.is_empty(),
            format!("not equilibria at n = {bad:?}"),
        );
    }
    Ok(b.finish(preset("star-equilibrium"), seed))
}

fn star_optimum(seed: u64) -> CliResult<PresetReport> {
    let cfg = GameConfig::ncg();
    let mut b = Builder::new(&[cfg]);
    let mut rows = Vec::new();
    for n in 2..=5usize {
        let (opt, w) = optimal_social_cost(n, &cfg, Execution::default())?;
        let want = Rational::from_integer(2 * (n as i64 - 1).pow(2));
        let star = w.edge_count() == n - 1 && (0..n).any(|c| w.owned_targets(c).len() == n - 1);
        b.check(
            format!("n={n}"),
            opt == want && star,
            format!("opt {opt}, expected {want}, star witness {star}"),
        );
        rows.push(json!({ "n": n, "opt": opt.to_string() }));
    }
    b.result("optima", rows);
    Ok(b.finish(preset("star-optimum"), seed))
}

fn ncg_diameter(seed: u64) -> CliResult<PresetReport> {
    let cfg = GameConfig::ncg();
    let mut b = Builder::new(&[cfg]);
    for n in 2..=5 {
        let s = equilibrium_census(n, &cfg, Execution::default())?;
        let d = s.max_eq_diameter().unwrap_or(0);
        b.check(
            format!("n={n}"),
            d <= 3,
            format!("{} equilibria, max diameter {d}", s.equilibrium_count),
        );
        b.result(format!("histogram_n{n}"), &s.diameter_histogram);
    }
    let g = build_figure_network(Figure::Fig2b);
    let eq = verify_equilibrium(&g, &cfg, CheckLevel::Exact)?.is_equilibrium;
    b.check(
        "fig2b",
        eq && diameter(&g) == 3,
        format!("equilibrium {eq}, diameter {}", diameter(&g)),
    );
    Ok(b.finish(preset("ncg-diameter"), seed))
}

fn local_diameter(seed: u64) -> CliResult<PresetReport> {
    let cfgs = [GameConfig::local_ncg(2), GameConfig::local_aog(2)];
    let mut b = Builder::new(&cfgs);
    let bound = |n: usize| 2.0 / 3.0 * (1.0 + (9.0 * n as f64 + 19.0).sqrt());
    for cfg in cfgs {
        for n in 2..=5 {
            let d = equilibrium_census(n, &cfg, Execution::default())?
                .max_eq_diameter()
                .unwrap_or(0);
            b.check(
                format!("{cfg} n={n}"),
                (d as f64) < bound(n),
                format!("max diameter {d}, bound {:.3}", bound(n)),
            );
        }
    }
    for (fig, cfg) in [(Figure::Fig2c, cfgs[0]), (Figure::Fig2d, cfgs[1])] {
        let g = build_figure_network(fig);
        let eq = verify_equilibrium(&g, &cfg, CheckLevel::Exact)?.is_equilibrium;
        let d = diameter(&g);
        b.check(
            fig.name(),
            eq && (d as f64) < bound(g.n()),
            format!("{cfg} equilibrium {eq}, diameter {d}"),
        );
    }
    Ok(b.finish(preset("local-diameter"), seed))
}

fn price_of_stability(seed: u64) -> CliResult<PresetReport> {
    let cfgs = variants();
    let mut b = Builder::new(&cfgs);
    for cfg in cfgs {
        for n in 3..=5 {
            let s = equilibrium_census(n, &cfg, Execution::default())?;
            b.check(
                format!("{cfg} n={n}"),
                s.pos == Some(Rational::from_integer(1)),
                format!("PoS {}, PoA {}", opt_str(s.pos), opt_str(s.poa)),
            );
        }
    }
    Ok(b.finish(preset("price-of-stability"), seed))
}

fn aog_poa(seed: u64) -> CliResult<PresetReport> {
    let cfgs = [GameConfig::aog(), GameConfig::local_aog(2)];
    let mut b = Builder::new(&cfgs);
    for cfg in cfgs {
        let bad: Vec<usize> = (3..=8)
            .filter(|&n| !matches!(verify_equilibrium(&build_clique(n), &cfg, CheckLevel::Exact), Ok(r) if r.is_equilibrium))
            .collect();
        b.check(
            format!("{cfg} cliques"),
            bad.is_empty(),
            format!("not equilibria at n = {bad:?}"),
        );
        let mut ratios = Vec::new();
        for n in 3..=5 {
            let s = equilibrium_census(n, &cfg, Execution::default())?;
            let clique = social_cost(&build_clique(n), &cfg);
            let worst = s.worst_eq_cost.map(Cost::Finite);
            b.check(
                format!("{cfg} n={n} worst is the clique"),
                worst == Some(clique),
                format!("worst {}, clique {clique}", opt_str(s.worst_eq_cost)),
            );
            ratios.push(s.poa);
        }
        let increasing = ratios.windows(2).all(|w| w[0] < w[1]);
        b.check(
            format!("{cfg} ratio increases"),
            increasing,
            ratios
                .iter()
                .map(|r| opt_str(*r))
                .collect::<Vec<_>>()
                .join(", "),
        );
    }
    Ok(b.finish(preset("aog-poa"), seed))
}

fn improving_cycle(seed: u64) -> CliResult<PresetReport> {
    let cfg = GameConfig::ncg();
    let mut b = Builder::new(&[cfg]);
    let schedule = cycle_swaps()
        .iter()
        .map(|&(agent, old, new)| ScriptedMove {
            agent,
            kind: MoveKind::SwapEdge { old, new },
        })
        .collect();
    let g1 = build_figure_network(Figure::Fig3G1);
    let t = run_dynamics(&g1, &cfg, &ActivationScheme::scripted(schedule), 100)?;
    b.check(
        "cycle detected",
        t.outcome == Outcome::CycleDetected && t.final_graph.0 == g1,
        format!("{:?} after {} steps", t.outcome, t.steps.len()),
    );
    let costs: Vec<String> = t
        .steps
        .iter()
        .map(|s| format!("{} -> {}", s.cost_before, s.cost_after))
        .collect();
    b.check(
        "all improving",
        t.steps.iter().all(|s| s.is_improving()),
        costs.join(", "),
    );
    b.result("trace", &t);
    Ok(b.finish(preset("improving-cycle"), seed))
}

fn adversarial(seed: u64) -> CliResult<PresetReport> {
    let cfg = GameConfig::local_aog(2);
    let mut b = Builder::new(&[cfg]);
    let sizes = [20usize, 30, 40];
    let traces = path_sweep(
        &sizes,
        &cfg,
        |n| adversarial_schedule(n, &cfg),
        1_000_000,
        Execution::default(),
    )?;
    let steps: Vec<f64> = traces.iter().map(|t| t.steps.len() as f64).collect();
    for (t, n) in traces.iter().zip(sizes) {
        let eq = verify_equilibrium(&t.final_graph.0, &cfg, CheckLevel::SingleMove)?.is_equilibrium;
        b.check(
            format!("n={n}"),
            eq && t.final_diameter == 3,
            format!("{} steps, diameter {}", t.steps.len(), t.final_diameter),
        );
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let c = scale_fit(&xs, &steps, |x| x * x);
    let fit = poly_fit(&xs, &steps, 2);
    b.check(
        "quadratic growth",
        fit.coefficients[2] > 0.0,
        format!("steps ~ {c:.4} n^2"),
    );
    b.result("fit", &fit);
    let labelled: Vec<(String, &DynamicsTrace)> =
        sizes.iter().map(|n| format!("P{n}")).zip(&traces).collect();
    b.traces_csv(&labelled);
    Ok(b.finish(preset("adversarial"), seed))
}

fn round_robin(seed: u64) -> CliResult<PresetReport> {
    let cfg = GameConfig::local_aog(2);
    let mut b = Builder::new(&[cfg]);
    let sizes = [25usize, 50, 100];
    let traces = path_sweep(
        &sizes,
        &cfg,
        |n| Ok(ActivationScheme::round_robin(n, MovePolicy::BestSingleEdge)),
        10_000_000,
        Execution::default(),
    )?;
    for (t, n) in traces.iter().zip(sizes) {
        b.check(
            format!("n={n}"),
            t.outcome == Outcome::Converged,
            format!(
                "{:?}: {} steps, {} rounds, diameter {}",
                t.outcome,
                t.steps.len(),
                t.rounds,
                t.final_diameter
            ),
        );
    }
    let labelled: Vec<(String, &DynamicsTrace)> =
        sizes.iter().map(|n| format!("P{n}")).zip(&traces).collect();
    b.traces_csv(&labelled);
    Ok(b.finish(preset("round-robin"), seed))
}

fn random_scheme(seed: u64) -> CliResult<PresetReport> {
    let cfgs = [GameConfig::aog(), GameConfig::local_aog(2)];
    let mut b = Builder::new(&cfgs);
    let mut rows = Vec::new();
    for cfg in cfgs {
        let mut means = Vec::new();
        for n in [10usize, 15, 20] {
            let g0 = build_path(n)?;
            let runs = par::map_indices(Execution::default(), 20, |i| {
                let scheme = ActivationScheme::uniform_random(
                    seed + i as u64,
                    MovePolicy::FirstImprovingSingleMove,
                );
                run_dynamics(&g0, &cfg, &scheme, 1_000_000)
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            let converged = runs.iter().all(|t| t.outcome == Outcome::Converged);
            let m = mean(
                &runs
                    .iter()
                    .map(|t| t.steps.len() as f64)
                    .collect::<Vec<_>>(),
            );
            b.check(format!("{cfg} n={n}"), converged, format!("mean {m} steps"));
            means.push(m);
            for (i, t) in runs.iter().enumerate() {
                rows.push((format!("{cfg}-P{n}-s{}", seed + i as u64), t.clone()));
            }
        }
        b.result(cfg.to_string(), &means);
    }
    let labelled: Vec<(String, &DynamicsTrace)> =
        rows.iter().map(|(l, t)| (l.clone(), t)).collect();
    b.traces_csv(&labelled);
    Ok(b.finish(preset("random-scheme"), seed))
}

fn linear_sequences(seed: u64) -> CliResult<PresetReport> {
    let cases = [
        (LinearTarget::DegaogNe, GameConfig::aog()),
        (LinearTarget::Deg2aog2ne, GameConfig::local_aog(2)),
    ];
    let mut b = Builder::new(&[cases[0].1, cases[1].1]);
    let sizes = [10usize, 13, 16, 19];
    let mut all = Vec::new();
    for (which, cfg) in cases {
        let traces = path_sweep(
            &sizes,
            &cfg,
            |n| scripted_linear_sequences(n, which),
            10_000,
            Execution::default(),
        )?;
        for (t, n) in traces.iter().zip(sizes) {
            let eq = verify_equilibrium(&t.final_graph.0, &cfg, CheckLevel::Exact)?.is_equilibrium;
            b.check(
                format!("{which:?} n={n}"),
                eq,
                format!("{} steps", t.steps.len()),
            );
            all.push((format!("{which:?}-P{n}"), t.clone()));
        }
    }
    let labelled: Vec<(String, &DynamicsTrace)> = all.iter().map(|(l, t)| (l.clone(), t)).collect();
    b.traces_csv(&labelled);
    Ok(b.finish(preset("linear-sequences"), seed))
}

fn random_instance(rng: &mut ChaCha8Rng) -> CliResult<SetCoverInstance> {
    loop {
        let q = rng.gen_range(4..=5);
        let n = rng.gen_range(q..=10);
        let l = rng.gen_range(1..=5);
        let universe: Vec<usize> = (0..n).collect();
        let sets = (0..l)
            .map(|_| universe.choose_multiple(rng, q).copied().collect())
            .collect();
        let inst = SetCoverInstance::new(n, q, sets)?;
        if inst.uncovered_elements().is_empty() {
            return Ok(inst);
        }
    }
}

fn hardness_gadget(seed: u64) -> CliResult<PresetReport> {
    let cfg = GameConfig::local_ncg(2);
    let mut b = Builder::new(&[cfg]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..10 {
        let inst = random_instance(&mut rng)?;
        let layout = set_cover_to_best_response_gadget(&inst)?;
        let br = best_response_exact(&layout.graph, layout.u(), &cfg)?;
        let chosen = layout.chosen_sets(&br.targets);
        let min = min_set_cover(&inst)?.map_or(0, |c| c.size);
        b.check(
            format!("instance {i}"),
            chosen.len() == min && inst.is_cover(&chosen),
            format!("best response buys sets {chosen:?}, minimum cover has {min}"),
        );
    }
    Ok(b.finish(preset("hardness-gadget"), seed))
}

fn rho_preset(seed: u64) -> CliResult<PresetReport> {
    let cfg = GameConfig::local_aog(2);
    let mut b = Builder::new(&[cfg]);
    for n in [5usize, 6] {
        let p = build_path(n)?;
        let reach = best_reachable(&p, &cfg, DEFAULT_REACH_BUDGET)?;
        let t = run_dynamics(
            &p,
            &cfg,
            &ActivationScheme::round_robin(n, MovePolicy::BestSingleEdge),
            10_000,
        )?;
        let r = rho(&t.final_graph.0, reach.best_cost, &cfg)?;
        b.check(
            format!("n={n}"),
            r >= Rational::from_integer(1),
            format!("rho {r} over {} reachable networks", reach.states),
        );
        b.result(format!("reach_n{n}"), &reach);
    }
    Ok(b.finish(preset("rho"), seed))
}
