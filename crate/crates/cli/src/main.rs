use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use spheresync::config::{parse_assignment, ScenarioConfig};
use spheresync::io::{fmt_f64, signal_csv_string, write_trace_csv, KeyValues};
use spheresync::network::{validate_dwell, DwellTimeSpec};
use spheresync::presets::{preset_text, PRESET_NAMES};
use spheresync::run::run;

#[derive(Parser)]
#[command(name = "spheresync", version, about = "Synchronization on S^n under switching topologies")]
struct Cli {
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Override a config value, e.g. `--set signal.dwell.tau_d=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Replace `scenario.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trace and report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check the configured switching signal against its dwell condition.
    ValidateSignal {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every combination of override values and seeds.
    ///
    /// `--set KEY=V1,V2` lists alternatives; commas inside brackets or quotes are kept.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Seed range `A..B` (end excluded) or a single seed.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long = "set", value_name = "KEY=V1,V2,...")]
        set: Vec<String>,
    },
    /// Write config, trace, report and signal for a built-in scenario.
    Reproduce {
        preset: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let quiet = cli.quiet;
    let result = match cli.command {
        Command::Simulate {
            config,
            out,
            common,
        } => read(&config).and_then(|text| simulate(&text, &out, &common, quiet)),
        Command::ValidateSignal { config, common } => {
            read(&config).and_then(|text| validate_signal(&text, &common, quiet))
        }
        Command::Sweep {
            config,
            out,
            seeds,
            set,
        } => read(&config).and_then(|text| sweep(&text, &out, seeds.as_deref(), &set, quiet)),
        Command::Reproduce {
            preset,
            out,
            common,
        } => reproduce(&preset, &out, &common, quiet),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(text: &str, common: &Common) -> Result<ScenarioConfig> {
    let mut overrides = common
        .set
        .iter()
        .map(|s| parse_assignment(s))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(seed) = common.seed {
        overrides.push(("scenario.seed".into(), seed.to_string()));
    }
    Ok(ScenarioConfig::from_toml_with_overrides(text, &overrides)?)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Runs `cfg`, writes trace and report under `out`, returns the exit code.
fn execute(cfg: &ScenarioConfig, out: &Path, quiet: bool) -> Result<(u8, spheresync::run::RunOutput)> {
    let resolved = cfg.resolve()?;
    let output = run(&resolved)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let trace_path = out.join(&resolved.output.trace);
    let file = fs::File::create(&trace_path)
        .with_context(|| format!("writing {}", trace_path.display()))?;
    let mut file = std::io::BufWriter::new(file);
    write_trace_csv(&mut file, &output.trace, resolved.output.stride)
        .with_context(|| format!("writing {}", trace_path.display()))?;
    write(&out.join(&resolved.output.report), &output.report_text())?;
    if !quiet {
        let r = &output.report;
        println!("verdict = {}", r.verdict.name());
        println!("final_sync_error = {}", fmt_f64(r.final_sync_error));
        match r.time_to_epsilon {
            Some(t) => println!("time_to_epsilon = {}", fmt_f64(t)),
            None => println!("time_to_epsilon = none"),
        }
        println!("trace = {}", trace_path.display());
    }
    Ok((output.exit_code() as u8, output))
}

fn simulate(text: &str, out: &Path, common: &Common, quiet: bool) -> Result<u8> {
    let cfg = load(text, common)?;
    Ok(execute(&cfg, out, quiet)?.0)
}

fn validate_signal(text: &str, common: &Common, quiet: bool) -> Result<u8> {
    let cfg = load(text, common)?;
    let spec = cfg
        .dwell_spec()?
        .ok_or_else(|| anyhow!("signal.dwell: a dwell condition is required to validate the signal"))?;
    let signal = cfg.build_signal()?;
    let horizon = cfg.scenario.horizon;
    let report = validate_dwell(&signal, &spec, horizon);
    let mut kv = KeyValues::default();
    match spec {
        DwellTimeSpec::Fixed { tau_d } => {
            kv.push("dwell.mode", "fixed");
            kv.push_f64("dwell.tau_d", tau_d);
        }
        DwellTimeSpec::Average { n0, tau_a } => {
            kv.push("dwell.mode", "average");
            kv.push_f64("dwell.n0", n0);
            kv.push_f64("dwell.tau_a", tau_a);
        }
    }
    kv.push("signal.switches", signal.switches_within(horizon).len());
    kv.push("dwell.ok", report.ok);
    kv.push_f64("dwell.worst_tau", report.worst_pair.0);
    kv.push_f64("dwell.worst_t", report.worst_pair.1);
    kv.push_f64("dwell.margin", report.margin);
    if !quiet || !report.ok {
        print!("{}", kv.render());
    }
    Ok(if report.ok { 0 } else { 1 })
}

/// Splits on commas outside brackets and quotes.
fn split_alternatives(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let (mut depth, mut quoted, mut start) = (0i32, false, 0);
    for (i, c) in s.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '[' | '{' if !quoted => depth += 1,
            ']' | '}' if !quoted => depth -= 1,
            ',' if !quoted && depth == 0 => {
                parts.push(s[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim().to_string());
    parts
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().with_context(|| format!("seed range {s:?}"))?;
        let b: u64 = b.trim().parse().with_context(|| format!("seed range {s:?}"))?;
        if b <= a {
            bail!("seed range {s:?} is empty");
        }
        Ok((a..b).collect())
    } else {
        Ok(vec![s.trim().parse().with_context(|| format!("seed {s:?}"))?])
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

struct Row {
    seed: Option<u64>,
    values: Vec<String>,
    outcome: Result<(String, f64, Option<f64>, usize, u8), String>,
}

fn sweep(text: &str, out: &Path, seeds: Option<&str>, set: &[String], quiet: bool) -> Result<u8> {
    let mut axes: Vec<(String, Vec<String>)> = Vec::new();
    for s in set {
        let (key, values) = parse_assignment(s)?;
        axes.push((key, split_alternatives(&values)));
    }
    let seeds: Vec<Option<u64>> = match seeds {
        Some(s) => parse_seeds(s)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    // the base config must parse on its own
    ScenarioConfig::from_toml(text)?;

    let mut combos: Vec<Vec<String>> = vec![Vec::new()];
    for (_, values) in &axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push(v.clone());
                    c
                })
            })
            .collect();
    }
    let jobs: Vec<(Vec<String>, Option<u64>)> = combos
        .into_iter()
        .flat_map(|c| seeds.iter().map(move |s| (c.clone(), *s)))
        .collect();

    let rows: Vec<Row> = jobs
        .into_par_iter()
        .map(|(values, seed)| {
            let mut overrides: Vec<(String, String)> = axes
                .iter()
                .zip(&values)
                .map(|((k, _), v)| (k.clone(), v.clone()))
                .collect();
            if let Some(seed) = seed {
                overrides.push(("scenario.seed".into(), seed.to_string()));
            }
            let outcome = ScenarioConfig::from_toml_with_overrides(text, &overrides)
                .map_err(|e| e.to_string())
                .and_then(|cfg| cfg.resolve().map_err(|e| e.to_string()))
                .and_then(|r| run(&r).map_err(|e| e.to_string()))
                .map(|o| {
                    let r = &o.report;
                    (
                        r.verdict.name().to_string(),
                        r.final_sync_error,
                        r.time_to_epsilon,
                        r.monotonicity_violations,
                        o.exit_code() as u8,
                    )
                });
            Row {
                seed,
                values,
                outcome,
            }
        })
        .collect();

    let mut table = String::from("run,seed");
    for (k, _) in &axes {
        table.push(',');
        table.push_str(&csv_field(k));
    }
    table.push_str(",verdict,final_sync_error,time_to_epsilon,monotonicity_violations,exit_code,error\n");
    let mut worst = 0u8;
    for (n, row) in rows.iter().enumerate() {
        let mut line = format!("{n},{}", row.seed.map_or("config".into(), |s| s.to_string()));
        for v in &row.values {
            line.push(',');
            line.push_str(&csv_field(v));
        }
        match &row.outcome {
            Ok((verdict, err, tte, mono, code)) => {
                worst = worst.max(*code);
                line.push_str(&format!(
                    ",{verdict},{},{},{mono},{code},",
                    fmt_f64(*err),
                    tte.map_or("none".into(), fmt_f64)
                ));
            }
            Err(e) => {
                worst = worst.max(1);
                line.push_str(&format!(",error,,,,1,{}", csv_field(e)));
            }
        }
        table.push_str(&line);
        table.push('\n');
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(&out.join("sweep.csv"), &table)?;
    if !quiet {
        print!("{table}");
    }
    Ok(worst)
}

fn reproduce(name: &str, out: &Path, common: &Common, quiet: bool) -> Result<u8> {
    let text = preset_text(name).ok_or_else(|| {
        anyhow!(
            "unknown preset {name:?}; available: {}",
            PRESET_NAMES.join(", ")
        )
    })?;
    let cfg = load(text, common)?;
    let resolved = cfg.resolve()?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(&out.join("config.toml"), &resolved.echo.to_toml())?;
    write(
        &out.join("signal.csv"),
        &signal_csv_string(&resolved.scenario.signal, resolved.scenario.horizon),
    )?;
    let (code, _) = execute(&resolved.echo, out, quiet)?;
    Ok(code)
}
