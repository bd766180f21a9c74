use super::metrics::{hemisphere_certificate, Containment};
use crate::dynamics::{Scenario, Trace, MONOTONICITY_TOL};
use crate::network::{validate_dwell, DwellReport};

/// Grid size used for the shaping-function admissibility check.
const ADMISSIBILITY_GRID: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Hypotheses certified and synchronization reached.
    TheoremConsistent,
    /// At least one hypothesis could not be certified; the outcome says nothing
    /// about the convergence result either way.
    HypothesesNotCertified,
    /// Hypotheses certified but the run did not synchronize cleanly.
    CertificateViolation,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::TheoremConsistent => "theorem_consistent",
            Verdict::HypothesesNotCertified => "hypotheses_not_certified",
            Verdict::CertificateViolation => "certificate_violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    /// Connectivity of every graph in the library.
    pub graph_connected: Vec<bool>,
    /// Connectivity of the graphs the signal actually activates before the horizon.
    pub active_graphs_connected: bool,
    /// `None` when the scenario declares no dwell condition.
    pub dwell: Option<DwellReport>,
    pub shaping_admissible: bool,
    pub initial_containment: Containment,
    pub epsilon: f64,
    pub final_sync_error: f64,
    /// Earliest sample time after which the sync error stays within `epsilon`.
    pub time_to_epsilon: Option<f64>,
    pub monotonicity_violations: usize,
    pub truncated: bool,
    pub verdict: Verdict,
}

impl CertificateReport {
    pub fn hypotheses_certified(&self) -> bool {
        self.active_graphs_connected
            && self.dwell.is_none_or(|d| d.ok)
            && self.shaping_admissible
            && self.initial_containment.is_certified()
    }
}

/// Packages the hypothesis checks for `sc` and the conclusion metrics of `trace`.
pub fn certify(trace: &Trace, sc: &Scenario, epsilon: f64) -> CertificateReport {
    let graph_connected: Vec<bool> = sc.graphs.iter().map(|g| g.is_connected()).collect();
    let active_graphs_connected = sc
        .signal
        .graph_indices()
        .iter()
        .zip(sc.signal.switch_times())
        .filter(|(_, t)| **t <= sc.horizon)
        .all(|(g, _)| graph_connected.get(*g).copied().unwrap_or(false));
    let dwell = sc
        .dwell
        .as_ref()
        .map(|spec| validate_dwell(&sc.signal, spec, sc.horizon));
    let shaping_admissible = sc
        .shaping
        .verify_admissibility(ADMISSIBILITY_GRID)
        .is_ok_and(|r| r.ok);
    let initial_containment =
        hemisphere_certificate(&trace.states_at(0)).unwrap_or(Containment::Uncertified);

    let final_sync_error = trace.last().sync_error;
    let time_to_epsilon = if final_sync_error <= epsilon {
        let first_settled = trace
            .samples
            .iter()
            .rposition(|s| s.sync_error > epsilon)
            .map_or(0, |k| k + 1);
        Some(trace.samples[first_settled].time)
    } else {
        None
    };
    let monotonicity_violations = trace
        .samples
        .windows(2)
        .filter(|w| {
            w[0].interval == w[1].interval
                && w[1].lyapunov - w[0].lyapunov > MONOTONICITY_TOL * (w[1].time - w[0].time)
        })
        .count();
    let truncated = trace.truncated();

    let mut report = CertificateReport {
        graph_connected,
        active_graphs_connected,
        dwell,
        shaping_admissible,
        initial_containment,
        epsilon,
        final_sync_error,
        time_to_epsilon,
        monotonicity_violations,
        truncated,
        verdict: Verdict::HypothesesNotCertified,
    };
    let concluded = time_to_epsilon.is_some() && monotonicity_violations == 0 && !truncated;
    report.verdict = match (report.hypotheses_certified(), concluded) {
        (false, _) => Verdict::HypothesesNotCertified,
        (true, true) => Verdict::TheoremConsistent,
        (true, false) => Verdict::CertificateViolation,
    };
    report
}
