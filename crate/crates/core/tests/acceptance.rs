//! Acceptance suite. Runs every criterion, prints one `[PASS]`/`[FAIL]` line
//! each, and exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spheresync::analysis::{
    certify, consensus_embed, consensus_oracle_compare, consensus_unembed, lyapunov_value,
    Verdict,
};
use spheresync::dynamics::{
    control_law, lift_so3_complete, simulate, AgentStates, Mode, Scenario, Trace, TraceEvent,
};
use spheresync::io::trace_csv_string;
use spheresync::manifold::{
    quat_mul, quat_to_rotmat, reduced_attitude, rotmat_to_quat, sphere_exp, tangent_project,
    Quaternion, RotationMatrix, TangentVector, UnitVector,
};
use spheresync::network::{
    generate_switching_signal, validate_dwell, DwellTimeSpec, Graph, SwitchingSignal,
};
use spheresync::presets::{preset, PRESET_NAMES};
use spheresync::run::{max_rotation_distance, run};
use spheresync::sampling::{
    random_connected_graph, random_quaternion, random_unit_vector, sample_in_cap,
};
use spheresync::shaping::{DistanceFunction, ShapingKind};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("geometry suite", geometry),
        ("gradient check", gradient),
        ("main-theorem consistency", theorem_scenarios),
        ("so3 complete casting", so3_complete),
        ("s2 incomplete casting", s2_incomplete),
        ("consensus casting", consensus),
        ("dwell-time machinery", dwell_machinery),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {} ({secs:.1} s)", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn states(v: Vec<UnitVector>) -> AgentStates {
    AgentStates::new(v, 0.0).unwrap()
}

// Geometry: 1e4 random samples per identity, all under 10 s.
fn geometry() -> Outcome {
    let start = Instant::now();
    let mut r = rng(100);
    let (mut tangency, mut exp_norm, mut homo, mut cover, mut quat_rt, mut embed_rt) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..10_000 {
        let dim = 1 + k % 4;
        let x = random_unit_vector(&mut r, dim);
        let v = DVector::from_fn(dim + 1, |_, _| r.random_range(-2.0..2.0));
        let t = tangent_project(&x, &v).unwrap();
        tangency = tangency.max(t.components().dot(x.coords()).abs());
        let t = t.scale(r.random_range(0.0..2.0 * PI) / t.norm().max(1e-300));
        let y = sphere_exp(&x, &t).unwrap();
        exp_norm = exp_norm.max((y.coords().norm() - 1.0).abs());

        let (p, q) = (random_quaternion(&mut r), random_quaternion(&mut r));
        let lhs = quat_to_rotmat(&quat_mul(&p, &q));
        let rhs = quat_to_rotmat(&p).compose(&quat_to_rotmat(&q));
        homo = homo.max(lhs.frobenius_distance(&rhs));
        cover = cover.max(quat_to_rotmat(&q).frobenius_distance(&quat_to_rotmat(&q.neg())));
        let back = rotmat_to_quat(&quat_to_rotmat(&q)).unwrap();
        let (a, b) = (back.to_array(), q.to_array());
        let same: f64 = (0..4).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
        let flipped: f64 = (0..4).map(|i| (a[i] + b[i]).abs()).fold(0.0, f64::max);
        quat_rt = quat_rt.max(same.min(flipped));

        let n = 1 + k % 3;
        let rho = r.random_range(0.5..20.0);
        let z = DVector::from_fn(n, |_, _| r.random_range(-rho..rho) / (n as f64).sqrt());
        let e = consensus_embed(std::slice::from_ref(&z), rho).unwrap();
        let zb = &consensus_unembed(&e.states, rho).unwrap()[0];
        embed_rt = embed_rt.max((zb - &z).amax());
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = tangency <= 1e-12
        && exp_norm <= 1e-12
        && homo <= 1e-10
        && cover <= 1e-12
        && quat_rt <= 1e-10
        && embed_rt <= 1e-10
        && secs < 10.0;
    outcome(
        pass,
        format!(
            "tangency {tangency:.1e}, exp norm {exp_norm:.1e}, homomorphism {homo:.1e}, \
             double cover {cover:.1e}, quat round trip {quat_rt:.1e}, embed round trip {embed_rt:.1e}"
        ),
    )
}

/// Orthonormal basis of the tangent space at `x`.
fn tangent_basis(x: &UnitVector) -> Vec<DVector<f64>> {
    let m = x.dim() + 1;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for k in 0..m {
        let mut v = DVector::zeros(m);
        v[k] = 1.0;
        v -= x.coords() * x.coords()[k];
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let n = v.norm();
        if n > 1e-6 {
            basis.push(v / n);
        }
        if basis.len() == m - 1 {
            break;
        }
    }
    basis
}

// control_law against central differences of the edge sum, full gradient per agent.
fn gradient() -> Outcome {
    let start = Instant::now();
    let mut r = rng(200);
    let h = 1e-5;
    let kinds = [
        ShapingKind::Chordal,
        ShapingKind::GeodesicQuadratic,
        ShapingKind::PowerChordal { p: 2.5 },
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for kind in kinds {
        let d = DistanceFunction::new(kind, PI).unwrap();
        for dim in 1..=3 {
            for _ in 0..100 {
                let n = r.random_range(3..=7);
                let g = random_connected_graph(&mut r, n, 0.5);
                let center = random_unit_vector(&mut r, dim);
                let s = states((0..n).map(|_| sample_in_cap(&mut r, &center, 1.2)).collect());
                let mut num = 0.0;
                let mut den = 0.0;
                for i in 0..n {
                    let u = control_law(i, &s, &g, &d).unwrap();
                    let mut grad = DVector::zeros(dim + 1);
                    for e in tangent_basis(s.get(i)) {
                        let moved = |sign: f64| {
                            let mut v = s.states().to_vec();
                            let t = TangentVector::new(v[i].clone(), &e * (sign * h)).unwrap();
                            v[i] = sphere_exp(&v[i], &t).unwrap();
                            lyapunov_value(&states(v), &g, &d).unwrap()
                        };
                        grad += &e * ((moved(1.0) - moved(-1.0)) / (2.0 * h));
                    }
                    num += (u.components() + grad).norm_squared();
                    den += u.components().norm_squared();
                }
                worst = worst.max((num / den).sqrt());
                count += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-5 && secs < 30.0,
        format!("{count} configurations, worst relative error {worst:.2e}"),
    )
}

/// Random hypothesis-satisfying scenario: connected library, generated
/// dwell-valid signal, initial states in a cap of radius 0.7.
fn theorem_scenario(seed: u64) -> Scenario {
    let mut r = rng(1000 + seed);
    let n = 3 + (seed as usize) % 8;
    let dim = r.random_range(1..=3);
    let n_graphs = r.random_range(2..=4);
    let graphs: Vec<Graph> = (0..n_graphs)
        .map(|_| random_connected_graph(&mut r, n, 0.6))
        .collect();
    let spec = if seed.is_multiple_of(2) {
        DwellTimeSpec::fixed(r.random_range(0.05..1.0)).unwrap()
    } else {
        DwellTimeSpec::average(r.random_range(1.0..3.0), r.random_range(0.05..1.0)).unwrap()
    };
    let horizon = 50.0;
    let signal = generate_switching_signal(seed, n_graphs, &spec, horizon).unwrap();
    let kind = match seed % 3 {
        0 => ShapingKind::Chordal,
        1 => ShapingKind::GeodesicQuadratic,
        _ => ShapingKind::PowerChordal { p: 1.0 },
    };
    let center = random_unit_vector(&mut r, dim);
    let init = states((0..n).map(|_| sample_in_cap(&mut r, &center, 0.7)).collect());
    Scenario {
        graphs,
        signal,
        dwell: Some(spec),
        shaping: DistanceFunction::with_default_limit(kind).unwrap(),
        init,
        dt: 1e-3,
        horizon,
        mode: Mode::GenericSn,
    }
}

fn max_lyapunov_increase(trace: &Trace) -> f64 {
    trace
        .samples
        .windows(2)
        .filter(|w| w[0].interval == w[1].interval)
        .map(|w| (w[1].lyapunov - w[0].lyapunov) / (w[1].time - w[0].time))
        .fold(f64::NEG_INFINITY, f64::max)
}

// The two 50-scenario criteria share runs; both lines are printed from here.
fn theorem_scenarios() -> Outcome {
    let start = Instant::now();
    let mut mono_ok = 0;
    let mut consistent = 0;
    let mut worst_rate = f64::NEG_INFINITY;
    let mut worst_err: f64 = 0.0;
    let mut latest_tte: f64 = 0.0;
    let mut problems = Vec::new();
    for seed in 0..50 {
        let sc = theorem_scenario(seed);
        let trace = simulate(&sc).unwrap();
        let rate = max_lyapunov_increase(&trace);
        worst_rate = worst_rate.max(rate);
        let increases = trace
            .events
            .iter()
            .filter(|e| matches!(e, TraceEvent::LyapunovIncrease { .. }))
            .count();
        if rate <= 1e-8 && increases == 0 {
            mono_ok += 1;
        } else {
            problems.push(format!("seed {seed}: increase rate {rate:.1e}"));
        }
        let report = certify(&trace, &sc, 1e-6);
        worst_err = worst_err.max(report.final_sync_error);
        if let Some(t) = report.time_to_epsilon {
            latest_tte = latest_tte.max(t);
        }
        if report.verdict == Verdict::TheoremConsistent {
            consistent += 1;
        } else {
            problems.push(format!("seed {seed}: {}", report.verdict.name()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mono_pass = mono_ok == 50 && secs < 300.0;
    println!(
        "[{}] lyapunov monotonicity: {mono_ok}/50 scenarios, largest per-step increase / dt {worst_rate:.1e} ({secs:.1} s)",
        if mono_pass { "PASS" } else { "FAIL" }
    );
    let mut detail = format!(
        "theorem-consistent {consistent}/50, worst final sync error {worst_err:.1e}, latest time to 1e-6 {latest_tte:.1} s"
    );
    if !problems.is_empty() {
        detail.push_str(&format!("; {}", problems.join(", ")));
    }
    outcome(mono_pass && consistent == 50, detail)
}

fn so3_scenario(seed: u64) -> Scenario {
    let mut r = rng(3000 + seed);
    let n = 6;
    let graphs: Vec<Graph> = (0..3).map(|_| random_connected_graph(&mut r, n, 0.4)).collect();
    let spec = DwellTimeSpec::fixed(0.2).unwrap();
    let horizon = 30.0;
    let signal = generate_switching_signal(seed, 3, &spec, horizon).unwrap();
    let center = random_unit_vector(&mut r, 3);
    let init = states(
        (0..n)
            .map(|_| {
                let q = sample_in_cap(&mut r, &center, 0.7);
                if r.random_bool(0.5) {
                    q.neg()
                } else {
                    q
                }
            })
            .collect(),
    );
    Scenario {
        graphs,
        signal,
        dwell: Some(spec),
        shaping: DistanceFunction::chordal(),
        init,
        dt: 1e-3,
        horizon,
        mode: Mode::So3CompleteViaS3,
    }
}

fn rotation_trajectory(trace: &Trace) -> Vec<Vec<RotationMatrix>> {
    (0..trace.samples.len())
        .map(|k| lift_so3_complete(&trace.states_at(k)).unwrap())
        .collect()
}

fn so3_complete() -> Outcome {
    let mut worst_final: f64 = 0.0;
    let mut worst_flip: f64 = 0.0;
    let mut failures = 0;
    for seed in 0..10 {
        let sc = so3_scenario(seed);
        let trace = simulate(&sc).unwrap();
        if trace.events.contains(&TraceEvent::SignAlignmentFailed) || trace.truncated() {
            failures += 1;
        }
        let final_rots = lift_so3_complete(&trace.final_states()).unwrap();
        worst_final = worst_final.max(max_rotation_distance(&final_rots));

        let mut flipped = sc.clone();
        let agent = (seed as usize) % 6;
        let mut v = flipped.init.states().to_vec();
        v[agent] = v[agent].neg();
        flipped.init = states(v);
        let other = simulate(&flipped).unwrap();
        let (a, b) = (rotation_trajectory(&trace), rotation_trajectory(&other));
        if a.len() != b.len() {
            failures += 1;
            continue;
        }
        for (ra, rb) in a.iter().zip(&b) {
            for (x, y) in ra.iter().zip(rb) {
                worst_flip = worst_flip.max(x.frobenius_distance(y));
            }
        }
    }
    outcome(
        failures == 0 && worst_final <= 1e-5 && worst_flip <= 1e-9,
        format!(
            "10 runs, final max |R_i - R_j|_F {worst_final:.1e}, sign-flip trajectory gap {worst_flip:.1e}"
        ),
    )
}

fn s2_incomplete() -> Outcome {
    let b = UnitVector::basis(2, 2);
    let b3 = Vector3::new(0.0, 0.0, 1.0);
    let mut worst_sync: f64 = 0.0;
    let mut largest_rot: f64 = 0.0;
    let mut bad = 0;
    for seed in 0..10u64 {
        let mut r = rng(4000 + seed);
        let n = 10;
        let graphs: Vec<Graph> = (0..3).map(|_| random_connected_graph(&mut r, n, 0.3)).collect();
        let spec = DwellTimeSpec::average(2.0, 0.3).unwrap();
        let horizon = 40.0;
        let signal = generate_switching_signal(seed, 3, &spec, horizon).unwrap();
        let center = random_unit_vector(&mut r, 2);
        let rotations: Vec<RotationMatrix> = (0..n)
            .map(|_| {
                let x = sample_in_cap(&mut r, &center, 0.7);
                let align =
                    Quaternion::from_two_vectors(&b3, &Vector3::from_column_slice(x.as_slice()))
                        .unwrap();
                let spin = Quaternion::from_axis_angle(&b3, r.random_range(-PI..PI)).unwrap();
                quat_to_rotmat(&quat_mul(&align, &spin))
            })
            .collect();
        let init = states(rotations.iter().map(|q| reduced_attitude(q, &b).unwrap()).collect());
        let sc = Scenario {
            graphs,
            signal,
            dwell: Some(spec),
            shaping: DistanceFunction::with_default_limit(ShapingKind::GeodesicQuadratic).unwrap(),
            init,
            dt: 1e-3,
            horizon,
            mode: Mode::So3IncompleteViaS2 {
                body_axis: b.clone(),
                rotations,
            },
        };
        let trace = simulate(&sc).unwrap();
        if trace.truncated() {
            bad += 1;
        }
        worst_sync = worst_sync.max(trace.last().sync_error);
        let rots = trace.final_rotations.as_ref().unwrap();
        largest_rot = largest_rot.max(max_rotation_distance(rots));
    }
    outcome(
        bad == 0 && worst_sync <= 1e-6 && largest_rot > 0.1,
        format!(
            "10 runs, worst pointing sync error {worst_sync:.1e}, largest final |R_i - R_j|_F {largest_rot:.2}"
        ),
    )
}

fn consensus() -> Outcome {
    let rho = 10.0;
    let (mut lin, mut sph, mut rt, mut dev) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..10u64 {
        let mut r = rng(5000 + seed);
        let z0: Vec<DVector<f64>> = (0..5)
            .map(|_| DVector::from_fn(2, |_, _| r.random_range(-5.0..5.0)))
            .collect();
        let g = random_connected_graph(&mut r, 5, 0.4);
        let e = consensus_embed(&z0, rho).unwrap();
        let back = consensus_unembed(&e.states, rho).unwrap();
        for (a, b) in z0.iter().zip(&back) {
            rt = rt.max((a - b).amax());
        }
        let cmp = consensus_oracle_compare(&z0, &g, 50.0, 1e-3, rho).unwrap();
        lin = lin.max(cmp.linear_disagreement);
        sph = sph.max(cmp.sphere_disagreement);
        dev = dev.max(cmp.max_deviation);
    }
    outcome(
        lin <= 1e-6 && sph <= 1e-6 && rt <= 1e-10,
        format!(
            "10 cases, linear disagreement {lin:.1e}, sphere disagreement {sph:.1e}, \
             round trip {rt:.1e} (agreement-point gap {dev:.1e}, informational)"
        ),
    )
}

// Times in units of 0.5 ms: grid points are even, switch instants k*0.01 + 0.0005 are odd.
struct LatticeSignal {
    signal: SwitchingSignal,
    switches: Vec<i64>,
    horizon: i64,
}

fn lattice_signal(r: &mut ChaCha8Rng) -> LatticeSignal {
    let mut k = r.random_range(1..20i64);
    let mut ks = Vec::new();
    let count = r.random_range(3..25);
    for _ in 0..count {
        ks.push(k);
        k += r.random_range(1..30i64);
    }
    let switches: Vec<i64> = ks.iter().map(|k| 20 * k + 1).collect();
    let horizon = 20 * (k + r.random_range(0..10i64));
    let mut times = vec![0.0];
    times.extend(ks.iter().map(|k| *k as f64 * 0.01 + 0.0005));
    let indices = (0..times.len()).map(|i| i % 2).collect();
    LatticeSignal {
        signal: SwitchingSignal::new(times, indices).unwrap(),
        switches,
        horizon,
    }
}

/// Fixed dwell on the 1 ms grid: some closed window of length tau_d - 1 ms holds
/// two events (the start counts as one).
fn grid_fixed_ok(sig: &LatticeSignal, tau_units: i64) -> bool {
    let mut events = vec![0];
    events.extend(&sig.switches);
    let w = tau_units - 2;
    let mut a = 0;
    while a <= sig.horizon {
        let inside = events.iter().filter(|&&e| e >= a && e <= a + w).count();
        if inside >= 2 {
            return false;
        }
        a += 2;
    }
    true
}

/// Average dwell on the 1 ms grid: N(tau, t) <= n0 + (t - tau) / tau_a for all grid tau <= t.
fn grid_average_ok(sig: &LatticeSignal, n0: i64, tau_units: i64) -> bool {
    let grid: Vec<i64> = (0..=sig.horizon / 2).map(|m| 2 * m).collect();
    // switches at or before each grid point
    let upto: Vec<i64> = grid
        .iter()
        .map(|&g| sig.switches.iter().filter(|&&s| s <= g).count() as i64)
        .collect();
    for a in 0..grid.len() {
        for b in a..grid.len() {
            let n = upto[b] - upto[a];
            if n * tau_units > n0 * tau_units + (grid[b] - grid[a]) {
                return false;
            }
        }
    }
    true
}

fn dwell_machinery() -> Outcome {
    let mut r = rng(6000);
    let mut agree = 0;
    let mut violating = 0;
    for k in 0..100 {
        let sig = lattice_signal(&mut r);
        let horizon = sig.horizon as f64 * 0.0005;
        let centis = r.random_range(1..=20i64);
        let tau_units = 20 * centis;
        let (spec, oracle) = if k % 2 == 0 {
            (
                DwellTimeSpec::fixed(centis as f64 * 0.01).unwrap(),
                grid_fixed_ok(&sig, tau_units),
            )
        } else {
            let n0 = r.random_range(1..=3i64);
            (
                DwellTimeSpec::average(n0 as f64, centis as f64 * 0.01).unwrap(),
                grid_average_ok(&sig, n0, tau_units),
            )
        };
        let report = validate_dwell(&sig.signal, &spec, horizon);
        if report.ok == oracle {
            agree += 1;
        }
        if !oracle {
            violating += 1;
        }
    }

    let mut generated_ok = 0;
    let mut implication_ok = 0;
    for seed in 0..100u64 {
        let spec = if seed % 2 == 0 {
            DwellTimeSpec::fixed(r.random_range(0.01..2.0)).unwrap()
        } else {
            DwellTimeSpec::average(r.random_range(1.0..4.0), r.random_range(0.01..2.0)).unwrap()
        };
        let horizon = r.random_range(1.0..60.0);
        let sig = generate_switching_signal(seed, r.random_range(2..5), &spec, horizon).unwrap();
        if validate_dwell(&sig, &spec, horizon).ok {
            generated_ok += 1;
        }
        let tau = r.random_range(0.01..2.0);
        let fixed = DwellTimeSpec::fixed(tau).unwrap();
        let sig = generate_switching_signal(seed, 3, &fixed, horizon).unwrap();
        let avg = DwellTimeSpec::average(1.0, tau).unwrap();
        if validate_dwell(&sig, &fixed, horizon).ok && validate_dwell(&sig, &avg, horizon).ok {
            implication_ok += 1;
        }
    }
    outcome(
        agree == 100 && generated_ok == 100 && implication_ok == 100,
        format!(
            "grid oracle agreement {agree}/100 ({violating} violating), generated signals valid \
             {generated_ok}/100, fixed implies average {implication_ok}/100"
        ),
    )
}

fn determinism() -> Outcome {
    let mut identical = 0;
    for name in PRESET_NAMES {
        let cfg = preset(name).unwrap().unwrap();
        let a = run(&cfg.resolve().unwrap()).unwrap();
        let b = run(&cfg.resolve().unwrap()).unwrap();
        if trace_csv_string(&a.trace, 1) == trace_csv_string(&b.trace, 1)
            && a.report_text() == b.report_text()
        {
            identical += 1;
        }
    }
    outcome(
        identical == PRESET_NAMES.len(),
        format!("{identical}/{} presets byte-identical across runs", PRESET_NAMES.len()),
    )
}
