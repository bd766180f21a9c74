//! One end-to-end run: resolved config in, trace, certificate and report out.

use nalgebra::DVector;

use crate::analysis::{
    certify, consensus_oracle_compare, consensus_unembed, CertificateReport, Verdict,
};
use crate::config::Resolved;
use crate::dynamics::{lift_so3_complete, simulate, Mode, Scenario, Trace, TraceEvent};
use crate::io::{report_entries, KeyValues};
use crate::manifold::RotationMatrix;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: Trace,
    pub report: CertificateReport,
    /// Scenario summary, event counts and casting-specific metrics.
    pub extras: KeyValues,
}

impl RunOutput {
    /// Full key-value report: certificate first, then the extras.
    pub fn report_text(&self) -> String {
        let mut kv = report_entries(&self.report);
        kv.extend(self.extras.clone());
        kv.render()
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.report.verdict)
    }
}

/// 0 for consistent or neutral runs, 2 for a violation under certified hypotheses.
pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::TheoremConsistent | Verdict::HypothesesNotCertified => 0,
        Verdict::CertificateViolation => 2,
    }
}

pub fn run(resolved: &Resolved) -> crate::Result<RunOutput> {
    let sc = &resolved.scenario;
    let trace = simulate(sc)?;
    let report = certify(&trace, sc, resolved.epsilon);
    let mut extras = scenario_summary(sc);
    extras.extend(event_summary(&trace));
    extras.extend(casting_summary(&trace, sc)?);
    Ok(RunOutput {
        trace,
        report,
        extras,
    })
}

fn scenario_summary(sc: &Scenario) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.push("scenario.mode", sc.mode.name());
    kv.push("scenario.n_agents", sc.n_agents());
    kv.push("scenario.sphere_dim", sc.sphere_dim());
    kv.push_f64("scenario.dt", sc.dt);
    kv.push_f64("scenario.horizon", sc.horizon);
    kv.push("scenario.shaping", sc.shaping.kind().name());
    kv.push("scenario.switches", sc.signal.switches_within(sc.horizon).len());
    kv
}

fn event_summary(trace: &Trace) -> KeyValues {
    let mut kv = KeyValues::default();
    let count = |f: fn(&TraceEvent) -> bool| trace.events.iter().filter(|e| f(e)).count();
    kv.push("events.switch", count(|e| matches!(e, TraceEvent::Switch { .. })));
    kv.push(
        "events.lyapunov_increase",
        count(|e| matches!(e, TraceEvent::LyapunovIncrease { .. })),
    );
    kv.push(
        "events.sign_alignment_failed",
        count(|e| matches!(e, TraceEvent::SignAlignmentFailed)),
    );
    if let Some(TraceEvent::Singular { time, i, j }) = trace
        .events
        .iter()
        .find(|e| matches!(e, TraceEvent::Singular { .. }))
    {
        kv.push_f64("events.singular.time", *time);
        kv.push("events.singular.pair", format!("{i},{j}"));
    }
    kv.push("samples", trace.samples.len());
    kv
}

pub fn max_rotation_distance(rots: &[RotationMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in rots.iter().enumerate() {
        for b in &rots[i + 1..] {
            worst = worst.max(a.frobenius_distance(b));
        }
    }
    worst
}

fn casting_summary(trace: &Trace, sc: &Scenario) -> crate::Result<KeyValues> {
    let mut kv = KeyValues::default();
    match &sc.mode {
        Mode::GenericSn => {}
        Mode::So3CompleteViaS3 | Mode::So3IncompleteViaS2 { .. } => {
            let rots = match &trace.final_rotations {
                Some(r) => r.clone(),
                None => lift_so3_complete(&trace.final_states())?,
            };
            kv.push_f64("casting.max_rotation_distance", max_rotation_distance(&rots));
        }
        Mode::RnConsensusViaSn { rho } => {
            let initial = consensus_unembed(&trace.states_at(0), *rho)?;
            let outside = initial.iter().filter(|z| z.norm() >= *rho).count();
            kv.push("casting.outside_hemisphere", outside);
            let z = consensus_unembed(&trace.final_states(), *rho)?;
            let mut worst: f64 = 0.0;
            for (i, a) in z.iter().enumerate() {
                for b in &z[i + 1..] {
                    worst = worst.max((a - b).norm());
                }
            }
            kv.push_f64("casting.euclidean_disagreement", worst);
            let mean = z.iter().fold(DVector::zeros(z[0].len()), |m, p| m + p) / z.len() as f64;
            for (k, v) in mean.iter().enumerate() {
                kv.push_f64(format!("casting.agreement.{k}"), *v);
            }
            let single_graph = sc
                .signal
                .graph_indices()
                .iter()
                .zip(sc.signal.switch_times())
                .filter(|(_, t)| **t <= sc.horizon)
                .all(|(g, _)| *g == sc.signal.graph_indices()[0]);
            if single_graph && sc.signal.start() == 0.0 {
                let g = &sc.graphs[sc.signal.graph_indices()[0]];
                match consensus_oracle_compare(&initial, g, sc.horizon, sc.dt, *rho) {
                    Ok(cmp) => {
                        kv.push_f64("casting.oracle.max_deviation", cmp.max_deviation);
                        kv.push_f64("casting.oracle.linear_disagreement", cmp.linear_disagreement);
                        kv.push_f64("casting.oracle.sphere_disagreement", cmp.sphere_disagreement);
                    }
                    Err(e) => kv.push("casting.oracle.error", e),
                }
            }
        }
    }
    Ok(kv)
}
