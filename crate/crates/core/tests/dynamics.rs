use degnet::constructions::{build_figure_network, build_path, build_star, cycle_swaps, Figure};
use degnet::dynamics::{
    adversarial_schedule, canonical_state_hash, run_dynamics, scripted_linear_sequences,
    ActivationScheme, LinearTarget, MovePolicy, Outcome, ScriptedMove,
};
use degnet::moves::replay;
use degnet::{verify_equilibrium, CheckLevel, GameConfig, MoveKind};

fn fig3_schedule() -> ActivationScheme {
    ActivationScheme::scripted(
        cycle_swaps()
            .iter()
            .map(|&(agent, old, new)| ScriptedMove {
                agent,
                kind: MoveKind::SwapEdge { old, new },
            })
            .collect(),
    )
}

#[test]
fn fig3_cycle_is_detected() {
    let g1 = build_figure_network(Figure::Fig3G1);
    let t = run_dynamics(&g1, &GameConfig::ncg(), &fig3_schedule(), 100).unwrap();
    assert_eq!(t.outcome, Outcome::CycleDetected);
    assert_eq!(t.steps.len(), 6);
    assert_eq!(t.cycle_start, Some(0));
    assert_eq!(t.final_graph.0, g1);
    assert!(t.steps.iter().all(|s| s.is_improving()));
}

#[test]
fn hash_distinguishes_mirrored_networks() {
    let g1 = build_figure_network(Figure::Fig3G1);
    let g4 = build_figure_network(Figure::Fig3G4);
    assert_ne!(canonical_state_hash(&g1), canonical_state_hash(&g4));
}

#[test]
fn every_step_replays() {
    let cases = [
        (GameConfig::ncg(), MovePolicy::BestSingleEdge),
        (
            GameConfig::local_ncg(2),
            MovePolicy::FirstImprovingSingleMove,
        ),
        (GameConfig::ncg(), MovePolicy::FullBestResponse),
        (GameConfig::local_aog(2), MovePolicy::FullBestResponse),
        (GameConfig::aog(), MovePolicy::FirstImprovingSingleMove),
    ];
    for (cfg, policy) in cases {
        for seed in 0..3 {
            let g0 = build_path(9).unwrap();
            let t = run_dynamics(
                &g0,
                &cfg,
                &ActivationScheme::uniform_random(seed, policy),
                500,
            )
            .unwrap();
            let mut g = g0.clone();
            for s in &t.steps {
                let (next, rec) = replay(&g, s.agent, &s.kind, &cfg).unwrap();
                assert_eq!(&rec, s, "{cfg} {policy:?}");
                assert!(rec.is_improving());
                g = next;
            }
            assert_eq!(g, t.final_graph.0);
            if t.outcome == Outcome::Converged {
                let r = verify_equilibrium(&g, &cfg, policy.check_level()).unwrap();
                assert!(r.is_equilibrium, "{cfg} {policy:?} seed {seed}");
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let cfg = GameConfig::local_ncg(2);
    let scheme = ActivationScheme::uniform_random(7, MovePolicy::FirstImprovingSingleMove);
    let a = run_dynamics(&build_path(12).unwrap(), &cfg, &scheme, 1000).unwrap();
    let b = run_dynamics(&build_path(12).unwrap(), &cfg, &scheme, 1000).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn star_converges_immediately() {
    let t = run_dynamics(
        &build_star(8).unwrap(),
        &GameConfig::ncg(),
        &ActivationScheme::round_robin(8, MovePolicy::FullBestResponse),
        10,
    )
    .unwrap();
    assert_eq!((t.outcome, t.steps.len()), (Outcome::Converged, 0));
}

#[test]
fn round_robin_on_a_path_converges() {
    let cfg = GameConfig::local_aog(2);
    let t = run_dynamics(
        &build_path(20).unwrap(),
        &cfg,
        &ActivationScheme::round_robin(20, MovePolicy::BestSingleEdge),
        10_000,
    )
    .unwrap();
    assert_eq!(t.outcome, Outcome::Converged);
    assert!(!t.steps.is_empty());
    let g = &t.final_graph.0;
    assert!(
        verify_equilibrium(g, &cfg, CheckLevel::SingleMove)
            .unwrap()
            .is_equilibrium
    );
    assert!(
        verify_equilibrium(g, &cfg, CheckLevel::Exact)
            .unwrap()
            .is_equilibrium
    );
    // add-only potential: one more edge per step
    assert_eq!(g.edge_count(), 19 + t.steps.len());
}

#[test]
fn adversarial_schedule_replays() {
    let local = GameConfig::local_aog(2);
    let t = run_dynamics(
        &build_path(20).unwrap(),
        &local,
        &adversarial_schedule(20, &local).unwrap(),
        10_000,
    )
    .unwrap();
    assert_eq!(t.outcome, Outcome::Converged);
    let g = &t.final_graph.0;
    assert!(
        verify_equilibrium(g, &local, CheckLevel::SingleMove)
            .unwrap()
            .is_equilibrium
    );
    assert!(
        verify_equilibrium(g, &local, CheckLevel::Exact)
            .unwrap()
            .is_equilibrium
    );

    let global = GameConfig::aog();
    let t = run_dynamics(
        &build_path(20).unwrap(),
        &global,
        &adversarial_schedule(20, &global).unwrap(),
        10_000,
    )
    .unwrap();
    assert_eq!(t.final_diameter, 3);
    assert!(t.steps.iter().all(|s| s.is_improving()));
    assert!(adversarial_schedule(11, &local).is_err());
    assert!(adversarial_schedule(20, &GameConfig::ncg()).is_err());
}

#[test]
fn linear_sequences_reach_equilibria() {
    let t = run_dynamics(
        &build_path(13).unwrap(),
        &GameConfig::aog(),
        &scripted_linear_sequences(13, LinearTarget::DegaogNe).unwrap(),
        1000,
    )
    .unwrap();
    assert_eq!(t.steps.len(), 13 - 2 + (13 - 7) / 3);
    assert!(
        verify_equilibrium(&t.final_graph.0, &GameConfig::aog(), CheckLevel::Exact)
            .unwrap()
            .is_equilibrium
    );

    let local = GameConfig::local_aog(2);
    let t = run_dynamics(
        &build_path(12).unwrap(),
        &local,
        &scripted_linear_sequences(12, LinearTarget::Deg2aog2ne).unwrap(),
        1000,
    )
    .unwrap();
    assert_eq!(t.steps.len(), 12 - 3);
    assert!(
        verify_equilibrium(&t.final_graph.0, &local, CheckLevel::Exact)
            .unwrap()
            .is_equilibrium
    );
    assert!(scripted_linear_sequences(12, LinearTarget::DegaogNe).is_err());
    assert!(scripted_linear_sequences(9, LinearTarget::Deg2aog2ne).is_err());
}

#[test]
fn traces_serialize() {
    let t = run_dynamics(
        &build_path(6).unwrap(),
        &GameConfig::aog(),
        &ActivationScheme::round_robin(6, MovePolicy::BestSingleEdge),
        100,
    )
    .unwrap();
    let v: serde_json::Value = serde_json::to_value(&t).unwrap();
    for key in [
        "initial",
        "steps",
        "outcome",
        "rounds",
        "final_social_cost",
        "final_diameter",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let step = &v["steps"][0];
    assert!(
        step.get("before").is_some() && step.get("after").is_some() && step.get("agent").is_some()
    );
    assert_eq!(v["outcome"], "CONVERGED");
    let row = t.csv_row("p6");
    assert_eq!(
        row.split(',').count(),
        degnet::dynamics::DynamicsTrace::csv_header()
            .split(',')
            .count()
    );
}
