//! Exact Stackelberg solutions of small games through their induced normal
//! form: one linear program per follower column, best column wins.

pub mod simplex;

use serde::{Deserialize, Serialize};

pub use simplex::{simplex_solve, LpProblem, LpResult};

use crate::error::{ExactError, GameError};
use crate::game::{
    enumerate_pure_strategies, ExtensiveGame, LeaderBehaviorStrategy, NodeKind, Payoff, Player,
    PlayerSequences, PureStrategy,
};
use crate::Deadline;

/// Largest `rows * cols` accepted by [`induce_normal_form`].
pub const CELL_GUARD: u128 = 1_000_000;

/// Best-response constraints are checked to this slack.
const BR_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct InducedNormalForm {
    pub rows: Vec<PureStrategy>,
    pub cols: Vec<PureStrategy>,
    /// Row-major, `rows.len() x cols.len()`.
    pub u_leader: Vec<f64>,
    pub u_follower: Vec<f64>,
}

impl InducedNormalForm {
    /// Builds a normal form from explicit matrices, labelling strategies by
    /// index only.
    pub fn from_matrices(u_leader: Vec<Vec<f64>>, u_follower: Vec<Vec<f64>>) -> Self {
        let m = u_leader.len();
        let n = u_leader.first().map_or(0, Vec::len);
        assert_eq!(u_follower.len(), m);
        assert!(u_leader.iter().chain(&u_follower).all(|r| r.len() == n));
        InducedNormalForm {
            rows: (0..m).map(|_| PureStrategy::new()).collect(),
            cols: (0..n).map(|_| PureStrategy::new()).collect(),
            u_leader: u_leader.concat(),
            u_follower: u_follower.concat(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn leader(&self, i: usize, j: usize) -> f64 {
        self.u_leader[i * self.cols.len() + j]
    }

    pub fn follower(&self, i: usize, j: usize) -> f64 {
        self.u_follower[i * self.cols.len() + j]
    }

    fn column_dot(&self, u: &[f64], x: &[f64], j: usize) -> f64 {
        let n = self.cols.len();
        x.iter().enumerate().map(|(i, xi)| xi * u[i * n + j]).sum()
    }
}

/// Terminal payoff reached when both players follow pure plans.
fn pure_outcome(game: &ExtensiveGame, leader: &PureStrategy, follower: &PureStrategy) -> Result<Payoff, GameError> {
    let mut id = game.root();
    loop {
        match &game.node(id).kind {
            NodeKind::Terminal(p) => return Ok(*p),
            NodeKind::Decision { owner, infoset, children, .. } => {
                let a = match owner {
                    Some(Player::Leader) => leader.choice(*infoset).ok_or(GameError::MissingLeaderStrategy(*infoset))?,
                    Some(Player::Follower) => {
                        follower.choice(*infoset).ok_or(GameError::MissingFollowerChoice(*infoset))?
                    }
                    None => return Err(GameError::Ownerless(id)),
                };
                id = *children
                    .get(a)
                    .ok_or(GameError::IllegalAction { infoset: *infoset, action: a })?;
            }
        }
    }
}

pub fn induce_normal_form(game: &ExtensiveGame) -> Result<InducedNormalForm, ExactError> {
    let rows_count = PlayerSequences::new(game, Player::Leader).count();
    let cols_count = PlayerSequences::new(game, Player::Follower).count();
    if rows_count.saturating_mul(cols_count) > CELL_GUARD {
        return Err(ExactError::TooLarge {
            rows: rows_count,
            cols: cols_count,
            limit: CELL_GUARD,
        });
    }
    let rows: Vec<_> = enumerate_pure_strategies(game, Player::Leader).collect();
    let cols: Vec<_> = enumerate_pure_strategies(game, Player::Follower).collect();
    let mut u_leader = Vec::with_capacity(rows.len() * cols.len());
    let mut u_follower = Vec::with_capacity(rows.len() * cols.len());
    for r in &rows {
        for c in &cols {
            let p = pure_outcome(game, r, c)?;
            u_leader.push(p.leader);
            u_follower.push(p.follower);
        }
    }
    Ok(InducedNormalForm {
        rows,
        cols,
        u_leader,
        u_follower,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormSolution {
    /// Mixed strategy over rows.
    pub mix: Vec<f64>,
    pub column: usize,
    pub value: f64,
    pub follower_value: f64,
    /// Columns whose LP was actually solved.
    pub lps_solved: usize,
}

/// Best commitment inducing column `j`, or `None` if `j` can never be a best
/// response. Best-response constraints are added lazily, most violated first.
pub fn solve_column(nf: &InducedNormalForm, j: usize) -> Result<Option<(Vec<f64>, f64)>, ExactError> {
    let m = nf.num_rows();
    let n = nf.num_cols();
    let objective: Vec<f64> = (0..m).map(|i| nf.leader(i, j)).collect();
    let gap = |i: usize, k: usize| nf.follower(i, k) - nf.follower(i, j);
    let mut lp = LpProblem::new(objective).eq(vec![1.0; m], 1.0);
    let mut added = vec![false; n];
    loop {
        let (x, value) = match simplex_solve(&lp) {
            LpResult::Optimal { x, value } => (x, value),
            LpResult::Infeasible => return Ok(None),
            LpResult::Unbounded => return Err(ExactError::Numerical(j)),
        };
        let mut worst: Option<(usize, f64)> = None;
        for k in (0..n).filter(|&k| k != j && !added[k]) {
            let v: f64 = x.iter().enumerate().map(|(i, xi)| xi * gap(i, k)).sum();
            if v > BR_TOL && worst.is_none_or(|(_, w)| v > w) {
                worst = Some((k, v));
            }
        }
        match worst {
            None => return Ok(Some((x, value))),
            Some((k, _)) => {
                added[k] = true;
                lp = lp.le((0..m).map(|i| gap(i, k)).collect(), 0.0);
            }
        }
    }
}

/// Strong Stackelberg commitment of a normal-form game.
///
/// Columns are visited by decreasing best-case leader payoff and skipped once
/// they cannot beat the incumbent.
pub fn solve_sse(nf: &InducedNormalForm) -> Result<NormalFormSolution, ExactError> {
    solve_sse_until(nf, Deadline::none())
}

pub fn solve_sse_until(nf: &InducedNormalForm, deadline: Deadline) -> Result<NormalFormSolution, ExactError> {
    let m = nf.num_rows();
    let n = nf.num_cols();
    let bound = |j: usize| (0..m).map(|i| nf.leader(i, j)).fold(f64::NEG_INFINITY, f64::max);
    let mut order: Vec<(usize, f64)> = (0..n).map(|j| (j, bound(j))).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut best: Option<(Vec<f64>, usize, f64)> = None;
    let mut lps_solved = 0;
    for (j, ub) in order {
        if best.as_ref().is_some_and(|b| ub <= b.2) {
            break;
        }
        if deadline.expired() {
            return Err(ExactError::Deadline);
        }
        lps_solved += 1;
        if let Some((x, value)) = solve_column(nf, j)? {
            if best.as_ref().is_none_or(|b| value > b.2) {
                best = Some((x, j, value));
            }
        }
    }
    let (mix, column, value) = best.ok_or(ExactError::NoFeasibleColumn)?;
    let follower_value = nf.column_dot(&nf.u_follower, &mix, column);
    Ok(NormalFormSolution {
        mix,
        column,
        value,
        follower_value,
        lps_solved,
    })
}

/// Leader maximin value `max_x min_j x·U_L[:, j]`.
pub fn maximin_value(nf: &InducedNormalForm) -> Result<f64, ExactError> {
    let m = nf.num_rows();
    // Variables: x (m), v+ , v-.
    let mut objective = vec![0.0; m + 2];
    objective[m] = 1.0;
    objective[m + 1] = -1.0;
    let mut sum = vec![1.0; m + 2];
    sum[m] = 0.0;
    sum[m + 1] = 0.0;
    let mut lp = LpProblem::new(objective).eq(sum, 1.0);
    for j in 0..nf.num_cols() {
        let mut row: Vec<f64> = (0..m).map(|i| -nf.leader(i, j)).collect();
        row.push(1.0);
        row.push(-1.0);
        lp = lp.le(row, 0.0);
    }
    match simplex_solve(&lp) {
        LpResult::Optimal { value, .. } => Ok(value),
        _ => Err(ExactError::Numerical(0)),
    }
}

/// Behavior strategy realizing a mixture over leader plans.
pub fn mix_to_behavior(game: &ExtensiveGame, rows: &[PureStrategy], mix: &[f64]) -> LeaderBehaviorStrategy {
    let mut out = LeaderBehaviorStrategy::first_action(game);
    for i in game.player_infosets(Player::Leader) {
        let k = game.infoset(i).num_actions;
        let mut mass = vec![0.0; k];
        for (plan, &x) in rows.iter().zip(mix) {
            if let Some(a) = plan.choice(i) {
                mass[a] += x;
            }
        }
        let total: f64 = mass.iter().sum();
        if total > 0.0 {
            out.set(i, mass.iter().map(|v| v / total).collect());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub leader: LeaderBehaviorStrategy,
    pub follower: PureStrategy,
    pub payoff: Payoff,
    pub rows: usize,
    pub cols: usize,
    pub lps_solved: usize,
}

/// Exact Stackelberg solution of an extensive game.
pub fn solve_game(game: &ExtensiveGame, deadline: Deadline) -> Result<ExactSolution, ExactError> {
    let nf = induce_normal_form(game)?;
    let sol = solve_sse_until(&nf, deadline)?;
    Ok(ExactSolution {
        leader: mix_to_behavior(game, &nf.rows, &sol.mix),
        follower: nf.cols[sol.column].clone(),
        payoff: Payoff::new(sol.value, sol.follower_value),
        rows: nf.num_rows(),
        cols: nf.num_cols(),
        lps_solved: sol.lps_solved,
    })
}
