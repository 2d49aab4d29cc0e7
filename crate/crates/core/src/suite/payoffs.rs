use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::Vertex;
use super::Family;
use crate::error::DescriptorError;
use crate::game::Payoff;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatchPayoff {
    pub attacker_caught_penalty: f64,
    pub defender_catch_reward: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackPayoff {
    pub attacker_attack_reward: f64,
    pub defender_attack_penalty: f64,
}

/// Payoffs of an interception game, defender = leader, attacker = follower.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    /// Indexed by vertex.
    pub catch: Vec<CatchPayoff>,
    /// Indexed by vertex; `Some` exactly at targets.
    pub attack: Vec<Option<AttackPayoff>>,
    pub timeout: Payoff,
}

impl PayoffTable {
    pub fn interception(&self, v: Vertex) -> Payoff {
        let c = self.catch[v];
        Payoff::new(c.defender_catch_reward, c.attacker_caught_penalty)
    }

    pub fn attack(&self, v: Vertex) -> Option<Payoff> {
        self.attack[v].map(|a| Payoff::new(a.defender_attack_penalty, a.attacker_attack_reward))
    }

    /// Checks the table against the family's declared payoff ranges.
    pub fn check(&self, family: Family, n: usize, targets: &[Vertex]) -> Result<(), DescriptorError> {
        let bad = |reason: String| Err(DescriptorError::field("payoffs", reason));
        if self.catch.len() != n || self.attack.len() != n {
            return bad(format!("table covers {} vertices, graph has {n}", self.catch.len()));
        }
        for v in 0..n {
            if targets.contains(&v) != self.attack[v].is_some() {
                return bad(format!("attack payoff presence at vertex {v} disagrees with targets"));
            }
        }
        if self.timeout != Payoff::ZERO {
            return bad("timeout payoff must be (0, 0)".into());
        }
        let within = |x: f64, lo: f64, hi: f64| (lo..=hi).contains(&x);
        for v in 0..n {
            let c = self.catch[v];
            let target = self.attack[v].is_some();
            let ok = match family {
                Family::Wnz => {
                    let pen_hi = if target { 0.2 } else { 0.0 };
                    let reward = if target { 0.2 } else { 0.1 };
                    within(c.attacker_caught_penalty, -1.0, pen_hi) && c.defender_catch_reward == reward
                }
                Family::Seg => c.attacker_caught_penalty == -1.0 && c.defender_catch_reward == 1.0,
                Family::Whg => {
                    within(c.attacker_caught_penalty, -1.0, 0.0)
                        && within(c.defender_catch_reward, -0.1, 1.1)
                }
            };
            if !ok {
                return bad(format!("catch payoff at vertex {v} outside {family:?} range"));
            }
            if let Some(a) = self.attack[v] {
                let ok = match family {
                    Family::Wnz => {
                        within(a.attacker_attack_reward, -0.2, 1.0)
                            && within(a.defender_attack_penalty, -1.0, 0.2)
                    }
                    Family::Seg => {
                        within(a.attacker_attack_reward, 1.0, 2.0) && a.defender_attack_penalty == -1.0
                    }
                    Family::Whg => {
                        within(a.attacker_attack_reward, 0.0, 1.0)
                            && within(a.defender_attack_penalty, -1.1, 0.1)
                    }
                };
                if !ok {
                    return bad(format!("attack payoff at vertex {v} outside {family:?} range"));
                }
            }
        }
        Ok(())
    }
}

fn is_target(targets: &[Vertex], v: Vertex) -> bool {
    targets.contains(&v)
}

/// Modified warehouse payoffs with diverse, far-from-zero-sum values.
pub fn sample_wnz_payoffs(n: usize, targets: &[Vertex], rng: &mut impl Rng) -> PayoffTable {
    let catch = (0..n)
        .map(|v| {
            let target = is_target(targets, v);
            CatchPayoff {
                attacker_caught_penalty: if target {
                    rng.gen_range(-1.0..=0.2)
                } else {
                    rng.gen_range(-1.0..=0.0)
                },
                defender_catch_reward: if target { 0.2 } else { 0.1 },
            }
        })
        .collect();
    let attack = (0..n)
        .map(|v| {
            is_target(targets, v).then(|| AttackPayoff {
                attacker_attack_reward: rng.gen_range(-0.2..=1.0),
                defender_attack_penalty: rng.gen_range(-1.0..=0.2),
            })
        })
        .collect();
    PayoffTable {
        catch,
        attack,
        timeout: Payoff::ZERO,
    }
}

/// Search-game payoffs: fixed catch values, random attack rewards in `[1, 2]`.
pub fn sample_seg_payoffs(n: usize, targets: &[Vertex], rng: &mut impl Rng) -> PayoffTable {
    let catch = vec![
        CatchPayoff {
            attacker_caught_penalty: -1.0,
            defender_catch_reward: 1.0,
        };
        n
    ];
    let attack = (0..n)
        .map(|v| {
            is_target(targets, v).then(|| AttackPayoff {
                attacker_attack_reward: rng.gen_range(1.0..=2.0),
                defender_attack_penalty: -1.0,
            })
        })
        .collect();
    PayoffTable {
        catch,
        attack,
        timeout: Payoff::ZERO,
    }
}

/// Near-zero-sum warehouse payoffs: the defender receives the negated
/// attacker payoff plus `U[-0.1, 0.1]` noise.
pub fn sample_whg_payoffs(n: usize, targets: &[Vertex], rng: &mut impl Rng) -> PayoffTable {
    let catch = (0..n)
        .map(|_| {
            let pen: f64 = rng.gen_range(-1.0..=0.0);
            CatchPayoff {
                attacker_caught_penalty: pen,
                defender_catch_reward: -pen + rng.gen_range(-0.1..=0.1),
            }
        })
        .collect();
    let attack = (0..n)
        .map(|v| {
            is_target(targets, v).then(|| {
                let reward: f64 = rng.gen_range(0.0..=1.0);
                AttackPayoff {
                    attacker_attack_reward: reward,
                    defender_attack_penalty: -reward + rng.gen_range(-0.1..=0.1),
                }
            })
        })
        .collect();
    PayoffTable {
        catch,
        attack,
        timeout: Payoff::ZERO,
    }
}

pub fn sample_payoffs(family: Family, n: usize, targets: &[Vertex], rng: &mut impl Rng) -> PayoffTable {
    match family {
        Family::Wnz => sample_wnz_payoffs(n, targets, rng),
        Family::Seg => sample_seg_payoffs(n, targets, rng),
        Family::Whg => sample_whg_payoffs(n, targets, rng),
    }
}
