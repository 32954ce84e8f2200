use femtocell_cli::{apply_override, parse_spec};
use femtocell_core::{EvalMode, SystemConfig};

fn err(text: &str, overrides: &[&str]) -> String {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    format!("{:#}", parse_spec(text, &o).unwrap_err())
}

#[test]
fn empty_file_gives_defaults() {
    let spec = parse_spec("", &[]).unwrap();
    assert_eq!(spec.system, SystemConfig::default());
    assert_eq!(spec.system.p_max_dbm, 20.0);
    assert_eq!(spec.system.n_prbs_femto, 50);
    assert_eq!(spec.system.coverage_radius_m, 15.0);
    assert_eq!(spec.system.noise.noise_figure_db, 10.0);
    assert_eq!(spec.demand_sweep_bps, vec![spec.system.demand_bps]);
    assert!(spec.out.is_none() && spec.trial_dump.is_none());
}

#[test]
fn femto_prbs_above_total_is_rejected() {
    let e = err("[system]\nn_prbs_femto = 200\n", &[]);
    assert!(e.contains("n_prbs_femto"), "{e}");
}

#[test]
fn decreasing_sweep_is_rejected() {
    let e = err("[experiment]\ndemand_sweep_bps = [1e6, 5e5]\n", &[]);
    assert!(e.contains("demand_sweep_bps"), "{e}");
    let e = err("[experiment]\ndemand_sweep_bps = []\n", &[]);
    assert!(e.contains("demand_sweep_bps"), "{e}");
}

#[test]
fn unknown_keys_are_rejected_by_name() {
    let e = err("[system]\nfap_densty = 0.1\n", &[]);
    assert!(e.contains("fap_densty"), "{e}");
    let e = err("[system.noise]\nfigure = 3\n", &[]);
    assert!(e.contains("figure"), "{e}");
    let e = err("[other]\n", &[]);
    assert!(e.contains("other"), "{e}");
}

#[test]
fn invalid_values_name_the_key() {
    let e = err("[system]\noutage_fraction = 1.5\n", &[]);
    assert!(e.contains("outage_fraction"), "{e}");
    let e = err("[system]\neval_mode = \"fast\"\n", &[]);
    assert!(e.contains("fast"), "{e}");
}

#[test]
fn nested_sections_parse() {
    let text = r#"
[experiment]
label = "low"
demand_sweep_bps = [1e6, 2e6]

[system]
fap_density_per_m2 = 0.001
eval_mode = "sinr"

[system.propagation]
shadow_sigma_db = 4.0
"#;
    let spec = parse_spec(text, &[]).unwrap();
    assert_eq!(spec.label, "low");
    assert_eq!(spec.system.fap_density_per_m2, 0.001);
    assert_eq!(spec.system.eval_mode, EvalMode::Sinr);
    assert_eq!(spec.system.propagation.shadow_sigma_db, 4.0);
}

#[test]
fn overrides_win_over_file() {
    let text = "[system]\nn_topologies = 5\n";
    let o = [
        "n_topologies=7".to_string(),
        "system.noise.noise_figure_db=7".to_string(),
        "experiment.demand_sweep_bps=[1e6,3e6]".to_string(),
        "experiment.label=plain text".to_string(),
    ];
    let spec = parse_spec(text, &o).unwrap();
    assert_eq!(spec.system.n_topologies, 7);
    assert_eq!(spec.system.noise.noise_figure_db, 7.0);
    assert_eq!(spec.demand_sweep_bps, vec![1e6, 3e6]);
    assert_eq!(spec.label, "plain text");
}

#[test]
fn malformed_overrides_fail() {
    let mut t = toml::Table::new();
    assert!(apply_override(&mut t, "no_equals").is_err());
    assert!(apply_override(&mut t, "system..x=1").is_err());
    let e = err("", &["system.p_max_dbm.inner=1"]);
    assert!(e.contains("p_max_dbm"), "{e}");
}
