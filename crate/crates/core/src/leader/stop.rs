use serde::{Deserialize, Serialize};

use super::LeaderConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// More positive passes than allowed.
    PassLimit,
    /// Best payoff stalled over the improvement window.
    Converged,
    /// Too many feasibility passes in a row.
    Infeasible,
    Deadline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopDecision {
    Continue,
    Stop(StopReason),
    Infeasible,
}

/// Stop rules of the leader loop. `best_history` holds the best feasible
/// payoff recorded before each positive pass.
pub fn check_stop(
    positive_passes: u64,
    consecutive_feasibility_passes: u64,
    best_history: &[f64],
    config: &LeaderConfig,
) -> StopDecision {
    if consecutive_feasibility_passes > config.max_feasibility_passes {
        return StopDecision::Infeasible;
    }
    if positive_passes > config.max_positive_passes {
        return StopDecision::Stop(StopReason::PassLimit);
    }
    let n = best_history.len();
    let w = config.improvement_window;
    if w > 0 && n > w && best_history[n - 1] - best_history[n - 1 - w] < config.improvement_eps {
        return StopDecision::Stop(StopReason::Converged);
    }
    StopDecision::Continue
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_limit() {
        let c = LeaderConfig::default();
        assert_eq!(check_stop(5000, 0, &[], &c), StopDecision::Continue);
        assert_eq!(check_stop(5001, 0, &[], &c), StopDecision::Stop(StopReason::PassLimit));
    }

    #[test]
    fn stalled_improvement() {
        let c = LeaderConfig::default();
        let mut h: Vec<f64> = (0..=500).map(|i| i as f64 * 1e-3).collect();
        assert_eq!(check_stop(500, 0, &h, &c), StopDecision::Continue);
        h = (0..=500).map(|i| if i == 500 { 1e-6 } else { 0.0 }).collect();
        assert_eq!(check_stop(500, 0, &h, &c), StopDecision::Stop(StopReason::Converged));
        h.truncate(500);
        assert_eq!(check_stop(499, 0, &h, &c), StopDecision::Continue);
    }

    #[test]
    fn feasibility_limit() {
        let c = LeaderConfig::default();
        assert_eq!(check_stop(0, 10_000, &[], &c), StopDecision::Continue);
        assert_eq!(check_stop(0, 10_001, &[], &c), StopDecision::Infeasible);
    }
}
