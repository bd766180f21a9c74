use spheresync::analysis::Verdict;
use spheresync::config::{ConfigError, ScenarioConfig};
use spheresync::dynamics::{simulate, Trace};
use spheresync::io::{
    kept_samples, parse_key_values, read_trace_csv, signal_csv_string, trace_csv_string,
    trace_header,
};
use spheresync::presets::{preset, PRESET_NAMES};
use spheresync::run::run;

const MINIMAL: &str = r#"
[scenario]
mode = "generic_sn"
sphere_dim = 2
n_agents = 3
dt = 0.01
horizon = 2.0
seed = 5

[shaping]
kind = "chordal"

[[graphs]]
edges = [[0, 1, 1.0], [1, 2, 1.0]]

[[graphs]]
edges = [[0, 1, 1.0], [0, 2, 1.0], [1, 2, 0.5]]

[signal]
kind = "explicit"
times = [0.0, 0.5, 1.0, 1.5]
graphs = [0, 1, 0, 1]
dwell = { mode = "fixed", tau_d = 0.5 }

[init]
kind = "cap"
center = [0.0, 0.0, 1.0]
radius = 0.7
"#;

fn field_of(e: ConfigError) -> String {
    match e {
        ConfigError::Field { field, .. } => field,
        ConfigError::Parse(m) => panic!("expected a field error, got parse error {m}"),
    }
}

#[test]
fn minimal_config_resolves() {
    let cfg = ScenarioConfig::from_toml(MINIMAL).unwrap();
    let r = cfg.resolve().unwrap();
    assert_eq!(r.scenario.n_agents(), 3);
    assert_eq!(r.scenario.sphere_dim(), 2);
    assert_eq!(r.scenario.signal.switch_times(), &[0.0, 0.5, 1.0, 1.5]);
    assert_eq!(r.epsilon, 1e-6);
}

#[test]
fn unknown_keys_are_rejected_with_line() {
    let text = MINIMAL.replace("seed = 5", "seed = 5\nsed = 6");
    match ScenarioConfig::from_toml(&text) {
        Err(ConfigError::Parse(msg)) => {
            assert!(msg.contains("sed"), "{msg}");
            assert!(msg.contains("line 9"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
    let text = MINIMAL.replace("radius = 0.7", "radius = 0.7\nradios = 1");
    assert!(ScenarioConfig::from_toml(&text).is_err());
}

#[test]
fn validation_errors_name_the_field() {
    let bad = |from: &str, to: &str| {
        field_of(
            ScenarioConfig::from_toml(&MINIMAL.replace(from, to))
                .unwrap()
                .resolve()
                .unwrap_err(),
        )
    };
    assert_eq!(bad("dt = 0.01", "dt = 0.0"), "scenario.dt");
    assert_eq!(bad("horizon = 2.0", "horizon = -1.0"), "scenario.horizon");
    assert_eq!(bad("radius = 0.7", "radius = 4.0"), "init.radius");
    assert_eq!(bad("[1, 2, 0.5]", "[1, 7, 0.5]"), "graphs[1].edges");
    assert_eq!(bad("graphs = [0, 1, 0, 1]", "graphs = [0, 1, 0, 2]"), "signal.graphs");
    assert_eq!(bad("tau_d = 0.5", "tau_d = -0.5"), "signal.dwell.tau_d");
    assert_eq!(bad("kind = \"chordal\"", "kind = \"power_chordal\""), "shaping.p");
}

#[test]
fn echo_round_trips_to_an_equal_scenario() {
    for text in [MINIMAL.to_string()]
        .into_iter()
        .chain(PRESET_NAMES.iter().map(|n| preset(n).unwrap().unwrap().to_toml()))
    {
        let first = ScenarioConfig::from_toml(&text).unwrap().resolve().unwrap();
        let echoed = first.echo.to_toml();
        let second = ScenarioConfig::from_toml(&echoed).unwrap().resolve().unwrap();
        assert_eq!(first.scenario, second.scenario);
        assert_eq!(second.echo, first.echo);
    }
}

#[test]
fn overrides_reach_nested_keys() {
    let text = preset(PRESET_NAMES[0]).unwrap().unwrap().to_toml();
    let set = |k: &str, v: &str| (k.to_string(), v.to_string());
    let cfg = ScenarioConfig::from_toml_with_overrides(
        &text,
        &[
            set("signal.dwell.tau_d", "0.5"),
            set("scenario.seed", "9"),
            set("graphs.0.edges.0", "[0, 1, 2.0]"),
        ],
    )
    .unwrap();
    assert_eq!(cfg.signal.dwell.as_ref().unwrap().tau_d, Some(0.5));
    assert_eq!(cfg.scenario.seed, 9);
    assert_eq!(cfg.graphs[0].edges[0], (0, 1, 2.0));
    let unknown = ScenarioConfig::from_toml_with_overrides(&text, &[set("scenario.sead", "1")]);
    assert!(matches!(unknown, Err(ConfigError::Parse(m)) if m.contains("sead")));
    let bad_index = ScenarioConfig::from_toml_with_overrides(&text, &[set("graphs.9.edges", "[]")]);
    assert!(bad_index.is_err());
}

#[test]
fn seeds_change_samples_but_not_structure() {
    let a = ScenarioConfig::from_toml(MINIMAL).unwrap().resolve().unwrap();
    let b = ScenarioConfig::from_toml(&MINIMAL.replace("seed = 5", "seed = 6"))
        .unwrap()
        .resolve()
        .unwrap();
    assert_ne!(a.scenario.init, b.scenario.init);
    assert_eq!(a.scenario.signal, b.scenario.signal);
}

fn minimal_trace() -> Trace {
    let r = ScenarioConfig::from_toml(MINIMAL).unwrap().resolve().unwrap();
    simulate(&r.scenario).unwrap()
}

#[test]
fn trace_csv_header_and_values_round_trip() {
    let trace = minimal_trace();
    let csv = trace_csv_string(&trace, 1);
    let header = csv.lines().next().unwrap();
    assert_eq!(header, trace_header(3, 2));
    assert!(header.starts_with("time,graph_index,lyapunov,sync_error,x_0_0,x_0_1,x_0_2,x_1_0"));
    assert!(header.ends_with("x_2_2"));
    let rows = read_trace_csv(&csv, 3, 2).unwrap();
    assert_eq!(rows.len(), trace.samples.len());
    for (row, s) in rows.iter().zip(&trace.samples) {
        assert_eq!(row.time, s.time);
        assert_eq!(row.graph_index, s.graph_index);
        assert_eq!(row.lyapunov, s.lyapunov);
        assert_eq!(row.sync_error, s.sync_error);
        assert_eq!(row.states, s.states);
    }
}

#[test]
fn stride_keeps_switches_and_last_sample() {
    let trace = minimal_trace();
    let kept = kept_samples(&trace, 37);
    assert_eq!(kept[0], 0);
    assert_eq!(*kept.last().unwrap(), trace.samples.len() - 1);
    let csv = trace_csv_string(&trace, 37);
    let rows = read_trace_csv(&csv, 3, 2).unwrap();
    for t in [0.0, 0.5, 1.0, 1.5, 2.0] {
        assert!(rows.iter().any(|r| r.time == t), "missing sample at {t}");
    }
}

#[test]
fn corrupted_header_is_refused() {
    let csv = trace_csv_string(&minimal_trace(), 10).replacen("sync_error", "syncerror", 1);
    let err = read_trace_csv(&csv, 3, 2).unwrap_err();
    assert_eq!(err.line, 1);
    let csv = trace_csv_string(&minimal_trace(), 10);
    let mut lines: Vec<&str> = csv.lines().collect();
    lines[3] = "1.0,0,abc";
    let err = read_trace_csv(&lines.join("\n"), 3, 2).unwrap_err();
    assert_eq!(err.line, 4);
}

#[test]
fn signal_csv_lists_switches() {
    let r = ScenarioConfig::from_toml(MINIMAL).unwrap().resolve().unwrap();
    let s = signal_csv_string(&r.scenario.signal, r.scenario.horizon);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "time,graph_index");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].ends_with(",1"));
}

#[test]
fn report_is_flat_key_values() {
    let r = ScenarioConfig::from_toml(MINIMAL).unwrap().resolve().unwrap();
    let out = run(&r).unwrap();
    let kv = parse_key_values(&out.report_text()).unwrap();
    assert_eq!(kv["verdict"], out.report.verdict.name());
    assert_eq!(kv["hypotheses.graph_connected.0"], "true");
    assert_eq!(kv["hypotheses.dwell.declared"], "true");
    assert_eq!(kv["hypotheses.dwell.ok"], "true");
    assert_eq!(kv["hypotheses.initial_containment"], "certified");
    assert_eq!(kv["scenario.mode"], "generic_sn");
    assert_eq!(
        kv["conclusion.final_sync_error"].parse::<f64>().unwrap(),
        out.report.final_sync_error
    );
    assert_eq!(kv["conclusion.monotonicity_violations"], "0");
    // two seconds are not enough to synchronize
    assert_eq!(kv["conclusion.time_to_epsilon"], "none");
    assert_eq!(out.report.verdict, Verdict::CertificateViolation);
    assert_eq!(out.exit_code(), 2);
}

#[test]
fn presets_are_consistent_and_deterministic() {
    for name in PRESET_NAMES {
        let cfg = preset(name).unwrap().unwrap();
        let r = cfg.resolve().unwrap();
        let a = run(&r).unwrap();
        assert_eq!(a.report.verdict, Verdict::TheoremConsistent, "{name}: {}", a.report_text());
        let b = run(&cfg.resolve().unwrap()).unwrap();
        assert_eq!(trace_csv_string(&a.trace, 10), trace_csv_string(&b.trace, 10), "{name}");
        println!("{name}\n{}", a.report_text());
    }
}
