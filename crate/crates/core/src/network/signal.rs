use crate::error::{Error, Result};

/// Piecewise-constant, right-continuous selection of the active graph.
///
/// `switch_times[0]` is the start time t0; interval `k` is
/// `[switch_times[k], switch_times[k + 1])` and uses `graph_indices[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSignal {
    switch_times: Vec<f64>,
    graph_indices: Vec<usize>,
}

impl SwitchingSignal {
    pub fn new(switch_times: Vec<f64>, graph_indices: Vec<usize>) -> Result<Self> {
        if switch_times.is_empty() {
            return Err(Error::InvalidSignal("signal needs a start time".into()));
        }
        if switch_times.len() != graph_indices.len() {
            return Err(Error::InvalidSignal(format!(
                "{} switch times but {} graph indices",
                switch_times.len(),
                graph_indices.len()
            )));
        }
        if let Some(t) = switch_times.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidSignal(format!("non-finite switch time {t}")));
        }
        if let Some(w) = switch_times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSignal(format!(
                "switch times not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self {
            switch_times,
            graph_indices,
        })
    }

    /// A signal that never switches.
    pub fn constant(start: f64, graph_index: usize) -> Self {
        Self {
            switch_times: vec![start],
            graph_indices: vec![graph_index],
        }
    }

    pub fn start(&self) -> f64 {
        self.switch_times[0]
    }

    pub fn switch_times(&self) -> &[f64] {
        &self.switch_times
    }

    pub fn graph_indices(&self) -> &[usize] {
        &self.graph_indices
    }

    /// Index of the interval containing `t`.
    pub fn interval_at(&self, t: f64) -> Result<usize> {
        if !(t >= self.start()) {
            return Err(Error::BeforeSignalStart {
                t,
                start: self.start(),
            });
        }
        Ok(self.switch_times.partition_point(|s| *s <= t) - 1)
    }

    /// sigma(t).
    pub fn active_graph(&self, t: f64) -> Result<usize> {
        Ok(self.graph_indices[self.interval_at(t)?])
    }

    /// Number of switch instants `s` with `tau < s <= t`.
    pub fn count_switches(&self, tau: f64, t: f64) -> Result<usize> {
        if tau > t || tau.is_nan() || t.is_nan() {
            return Err(Error::InvalidInterval { tau, t });
        }
        let upto = |x: f64| self.switch_times.partition_point(|s| *s <= x);
        Ok(upto(t) - upto(tau))
    }

    /// Switch instants after the start, up to and including `horizon`.
    pub fn switches_within(&self, horizon: f64) -> &[f64] {
        let end = self.switch_times.partition_point(|s| *s <= horizon);
        &self.switch_times[1.min(end)..end]
    }

    /// Largest graph index used.
    pub fn max_graph_index(&self) -> usize {
        self.graph_indices.iter().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn signal() -> SwitchingSignal {
        SwitchingSignal::new(vec![0.0, 1.0, 2.0, 3.0], vec![0, 1, 0, 2]).unwrap()
    }

    #[test]
    fn active_graph_is_right_continuous() {
        let s = SwitchingSignal::new(vec![0.0, 1.0, 2.0], vec![5, 6, 7]).unwrap();
        assert_eq!(s.active_graph(0.5).unwrap(), 5);
        assert_eq!(s.active_graph(1.0).unwrap(), 6);
        assert_eq!(s.active_graph(0.0).unwrap(), 5);
        assert_eq!(s.active_graph(1e9).unwrap(), 7);
        assert!(matches!(
            s.active_graph(-0.1),
            Err(Error::BeforeSignalStart { .. })
        ));
    }

    #[test]
    fn active_graph_matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = signal();
        for _ in 0..1000 {
            let t: f64 = rng.random_range(0.0..4.0);
            let mut expected = s.graph_indices()[0];
            for (k, st) in s.switch_times().iter().enumerate() {
                if *st <= t {
                    expected = s.graph_indices()[k];
                }
            }
            assert_eq!(s.active_graph(t).unwrap(), expected);
        }
    }

    #[test]
    fn counting_examples() {
        let s = signal();
        assert_eq!(s.count_switches(1.5, 1.5).unwrap(), 0);
        assert_eq!(s.count_switches(1.0, 1.0).unwrap(), 0);
        assert_eq!(s.count_switches(0.5, 2.5).unwrap(), 2);
        assert_eq!(s.count_switches(1.0, 2.0).unwrap(), 1);
        assert!(matches!(
            s.count_switches(2.0, 1.0),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn counting_matches_filter_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let mut t = 0.0;
            let mut times = vec![0.0];
            for _ in 0..rng.random_range(0..20) {
                t += rng.random_range(0.01..0.5);
                times.push(t);
            }
            let idx = vec![0; times.len()];
            let s = SwitchingSignal::new(times.clone(), idx).unwrap();
            for _ in 0..20 {
                let a: f64 = rng.random_range(0.0..t + 1.0);
                let b: f64 = rng.random_range(a..t + 1.5);
                let expected = times.iter().filter(|x| a < **x && **x <= b).count();
                assert_eq!(s.count_switches(a, b).unwrap(), expected);
            }
        }
    }

    #[test]
    fn rejects_bad_signals() {
        assert!(SwitchingSignal::new(vec![], vec![]).is_err());
        assert!(SwitchingSignal::new(vec![0.0, 0.0], vec![0, 1]).is_err());
        assert!(SwitchingSignal::new(vec![0.0, 1.0], vec![0]).is_err());
        assert!(SwitchingSignal::new(vec![0.0, f64::INFINITY], vec![0, 1]).is_err());
    }

    #[test]
    fn switches_within_horizon() {
        let s = signal();
        assert_eq!(s.switches_within(2.0), &[1.0, 2.0]);
        assert_eq!(s.switches_within(0.5), &[] as &[f64]);
        assert!(SwitchingSignal::constant(0.0, 0).switches_within(5.0).is_empty());
    }
}
