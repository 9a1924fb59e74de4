use std::process::{Command, Output};

fn degnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn construct_writes_a_parseable_star() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("star.txt");
    let o = degnet(&[
        "construct",
        "star",
        "--n",
        "6",
        "--format",
        "text",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n 6\n0 1\n"));

    let o = degnet(&[
        "verify",
        path.to_str().unwrap(),
        "--game",
        "ncg",
        "--k",
        "global",
        "--level",
        "exact",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["report"]["is_equilibrium"], true);
}

#[test]
fn dynamics_from_a_long_path_converges() {
    let o = degnet(&[
        "dynamics",
        "path:50",
        "--game",
        "aog",
        "--k",
        "2",
        "--policy",
        "best-single-edge",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["trace"]["outcome"], "CONVERGED");
    assert_eq!(v["config"]["locality"]["radius"], 2);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "dynamics",
        "path:15",
        "--game",
        "ncg",
        "--k",
        "2",
        "--seed",
        "9",
        "--policy",
        "full-best-response",
    ];
    let a = degnet(&args);
    let b = degnet(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cost_breakdown_has_named_fields() {
    let o = degnet(&["cost", "fig:fig3-g1", "--agent", "4"]);
    let v = json(&o);
    let agent = &v["agents"][0];
    assert_eq!(
        (
            agent["edge_cost"].clone(),
            agent["distance_cost"].clone(),
            agent["total"].clone()
        ),
        (1.into(), 23.into(), 24.into())
    );
}

#[test]
fn best_response_of_a_star_leaf_keeps_nothing() {
    let o = degnet(&[
        "best-response",
        "star:5",
        "--agent",
        "1",
        "--format",
        "text",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("buy []"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(
        degnet(&["verify", "star:5", "--policy", "best-single-edge"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(degnet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        degnet(&["verify", "star:5", "--k", "wide"]).status.code(),
        Some(2)
    );
    assert_eq!(
        degnet(&[
            "dynamics",
            "path:20",
            "--game",
            "aog",
            "--scheme",
            "adversarial",
            "--policy",
            "best-single-edge"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        degnet(&[
            "dynamics",
            "path:20",
            "--scheme",
            "round-robin",
            "--seed",
            "3"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        degnet(&["cost", "/nonexistent/graph.txt"]).status.code(),
        Some(2)
    );
}

#[test]
fn malformed_files_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "n 3\n0 1\n1 0\n").unwrap();
    let o = degnet(&["cost", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn resource_caps_exit_with_three() {
    assert_eq!(degnet(&["enumerate", "--n", "7"]).status.code(), Some(3));
}

#[test]
fn enumerate_writes_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let o = degnet(&[
        "enumerate",
        "--n",
        "4",
        "--game",
        "aog",
        "--witness-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["opt_cost"], 18);
    assert_eq!(v["pos"], 1);
    let opt = std::fs::read_to_string(dir.path().join("opt.txt")).unwrap();
    assert!(opt.starts_with("n 4\n"));
}

#[test]
fn set_cover_reduction_emits_graph_and_roles() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("cover.txt");
    std::fs::write(&inst, "u 8 q 4\n0 1 2 3\n4 5 6 7\n2 3 4 5\n").unwrap();
    let graph = dir.path().join("gadget.txt");
    let roles = dir.path().join("roles.json");
    let o = degnet(&[
        "reduce",
        "set-cover-to-gadget",
        inst.to_str().unwrap(),
        "--out",
        graph.to_str().unwrap(),
        "--roles",
        roles.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&roles).unwrap()).unwrap();
    assert_eq!(v["layout"]["role_map"][0]["role"], "u");
    let br = degnet(&[
        "best-response",
        graph.to_str().unwrap(),
        "--agent",
        "0",
        "--k",
        "2",
    ]);
    assert_eq!(
        json(&br)["best_response"]["targets"],
        serde_json::json!([2, 3])
    );
}

#[test]
fn domination_reduction_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = dir.path().join("c5.txt");
    std::fs::write(&c5, "n 5\n0 1\n1 2\n2 3\n3 4\n4 0\n").unwrap();
    let o = degnet(&[
        "reduce",
        "dominating-set-to-set-cover",
        c5.to_str().unwrap(),
        "--q",
        "2",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("u 5 q 3\n"));
}

#[test]
fn presets_embed_their_config_and_pass() {
    for name in [
        "star-equilibrium",
        "improving-cycle",
        "linear-sequences",
        "hardness-gadget",
        "rho",
    ] {
        let o = degnet(&["preset", name, "--seed", "3"]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
        let v = json(&o);
        assert_eq!(v["preset"], name);
        assert_eq!(v["seed"], 3);
        assert!(!v["configs"].as_array().unwrap().is_empty());
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn failing_presets_exit_with_one() {
    // the n = 3 census has a costlier equilibrium than the triangle
    let o = degnet(&["preset", "aog-poa", "--format", "text"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL degAOG n=3"));
}

#[test]
fn preset_csv_has_one_row_per_run() {
    let o = degnet(&["preset", "round-robin", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("label,n,"));
    assert_eq!(
        degnet(&["preset", "rho", "--format", "csv"]).status.code(),
        Some(2)
    );
}
