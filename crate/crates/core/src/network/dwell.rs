use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::signal::SwitchingSignal;
use crate::error::{Error, Result};

/// Slack absorbing round-off in switch-time arithmetic.
const DWELL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DwellTimeSpec {
    /// Every interval between consecutive switches lasts at least `tau_d`.
    Fixed { tau_d: f64 },
    /// `N(tau, t) <= n0 + (t - tau) / tau_a` for all `tau <= t`.
    Average { n0: f64, tau_a: f64 },
}

impl DwellTimeSpec {
    pub fn fixed(tau_d: f64) -> Result<Self> {
        let spec = DwellTimeSpec::Fixed { tau_d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn average(n0: f64, tau_a: f64) -> Result<Self> {
        let spec = DwellTimeSpec::Average { n0, tau_a };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DwellTimeSpec::Fixed { tau_d } if !(tau_d > 0.0 && tau_d.is_finite()) => Err(
                Error::InvalidDwellSpec(format!("tau_d must be positive and finite, got {tau_d}")),
            ),
            DwellTimeSpec::Average { n0, .. } if !(n0 >= 1.0 && n0.is_finite()) => Err(
                Error::InvalidDwellSpec(format!("N0 must be at least 1, got {n0}")),
            ),
            DwellTimeSpec::Average { tau_a, .. } if !(tau_a > 0.0 && tau_a.is_finite()) => Err(
                Error::InvalidDwellSpec(format!("tau_a must be positive and finite, got {tau_a}")),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellReport {
    pub ok: bool,
    /// The tightest `(tau, t)`. For average dwell, `tau` is a switch instant
    /// approached from the left so that the switch at `tau` is counted.
    pub worst_pair: (f64, f64),
    /// Smallest slack of the checked inequality; `+inf` without switches.
    pub margin: f64,
}

/// Checks `sig` against `spec` over `[t0, horizon]`.
///
/// Fixed dwell inspects consecutive gaps, including the first interval after
/// t0. Average dwell is exact over the finite set of switch instants: the
/// count is piecewise constant, so the worst window starts just before some
/// switch `s_j` and ends at some switch `s_k`.
pub fn validate_dwell(sig: &SwitchingSignal, spec: &DwellTimeSpec, horizon: f64) -> DwellReport {
    let t0 = sig.start();
    let switches = sig.switches_within(horizon);
    let mut report = DwellReport {
        ok: true,
        worst_pair: (t0, horizon.max(t0)),
        margin: f64::INFINITY,
    };
    match *spec {
        DwellTimeSpec::Fixed { tau_d } => {
            let mut prev = t0;
            for &s in switches {
                let margin = (s - prev) - tau_d;
                if margin < report.margin {
                    report.margin = margin;
                    report.worst_pair = (prev, s);
                }
                prev = s;
            }
        }
        DwellTimeSpec::Average { n0, tau_a } => {
            // margin(j, k) = n0 - 1 + (s_k / tau_a - k) - (s_j / tau_a - j); keep the
            // running max of the subtracted term over j <= k.
            let mut best: Option<(f64, f64)> = None;
            for (k, &s) in switches.iter().enumerate() {
                let term = s / tau_a - k as f64;
                if best.is_none_or(|(b, _)| term > b) {
                    best = Some((term, s));
                }
                let (b, s_j) = best.unwrap();
                let margin = n0 - 1.0 + term - b;
                if margin < report.margin {
                    report.margin = margin;
                    report.worst_pair = (s_j, s);
                }
            }
        }
    }
    report.ok = report.margin >= -DWELL_SLACK;
    report
}

/// Seeded random signal on `[0, horizon]` that satisfies `spec`.
///
/// Consecutive intervals never reuse the same graph when `n_graphs > 1`.
pub fn generate_switching_signal(
    seed: u64,
    n_graphs: usize,
    spec: &DwellTimeSpec,
    horizon: f64,
) -> Result<SwitchingSignal> {
    spec.validate()?;
    if n_graphs == 0 {
        return Err(Error::Infeasible("graph library is empty".into()));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Infeasible(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = rng.random_range(0..n_graphs);
    let mut times = vec![0.0];
    let mut indices = vec![current];
    if n_graphs == 1 {
        return SwitchingSignal::new(times, indices);
    }
    // running max of s_j - tau_a * j over accepted switches (j counted from 0)
    let mut avg_front = f64::NEG_INFINITY;
    loop {
        let last = *times.last().unwrap();
        let next = match *spec {
            DwellTimeSpec::Fixed { tau_d } => last + tau_d * (1.0 + rng.random::<f64>()),
            DwellTimeSpec::Average { n0, tau_a } => {
                let k = (times.len() - 1) as f64;
                let proposal = last + 2.0 * tau_a * rng.random::<f64>();
                let earliest = avg_front + tau_a * (k + 1.0 - n0);
                let s = proposal.max(earliest + 1e-9 * tau_a);
                if s <= last {
                    last + 1e-9 * tau_a.max(1.0)
                } else {
                    s
                }
            }
        };
        if next > horizon {
            break;
        }
        if let DwellTimeSpec::Average { tau_a, .. } = *spec {
            let k = (times.len() - 1) as f64;
            avg_front = avg_front.max(next - tau_a * k);
        }
        let mut pick = rng.random_range(0..n_graphs - 1);
        if pick >= current {
            pick += 1;
        }
        current = pick;
        times.push(next);
        indices.push(current);
    }
    SwitchingSignal::new(times, indices)
}
