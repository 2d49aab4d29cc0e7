//! Dense two-phase simplex for small linear programs.
//!
//! Pricing is Dantzig's largest coefficient, switching to Bland's rule after a
//! run of degenerate pivots so that cycling cannot occur.

pub const TOL: f64 = 1e-9;
const DEGENERATE_SWITCH: usize = 50;

/// `maximize c·x  s.t.  le_i·x <= b_i,  eq_k·x = d_k,  x >= 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub le: Vec<(Vec<f64>, f64)>,
    pub eq: Vec<(Vec<f64>, f64)>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        LpProblem {
            objective,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.le.push((row, rhs));
        self
    }

    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq.push((row, rhs));
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn optimal(&self) -> Option<(&[f64], f64)> {
        match self {
            LpResult::Optimal { x, value } => Some((x, *value)),
            _ => None,
        }
    }
}

struct Tableau {
    /// `rows x (cols + 1)`, the last column is the right-hand side.
    a: Vec<f64>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    /// Reduced-cost row for maximization, `cols + 1` wide.
    obj: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.a[pr * w + pc];
        for c in 0..w {
            self.a[pr * w + c] *= inv;
        }
        self.a[pr * w + pc] = 1.0;
        let (before, rest) = self.a.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[pc];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * p;
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        eliminate(&mut self.obj);
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Runs primal simplex on columns `0..active`. Returns false if unbounded.
    fn optimize(&mut self, active: usize) -> bool {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_SWITCH;
            // obj[c] holds -(reduced profit); negative means improving.
            let mut enter = None;
            let mut best = -TOL;
            for c in 0..active {
                let v = self.obj[c];
                if v < -TOL {
                    if bland {
                        enter = Some(c);
                        break;
                    }
                    if v < best {
                        best = v;
                        enter = Some(c);
                    }
                }
            }
            let Some(pc) = enter else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - TOL
                                || (ratio <= lratio + TOL && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leave else { return false };
            degenerate = if ratio.abs() <= TOL { degenerate + 1 } else { 0 };
            self.pivot(pr, pc);
        }
    }
}

/// Solves `lp` to optimality or reports infeasibility/unboundedness.
pub fn simplex_solve(lp: &LpProblem) -> LpResult {
    let n = lp.num_vars();
    let m_le = lp.le.len();
    let rows = m_le + lp.eq.len();
    // Columns: x (n), one slack/surplus per inequality, one artificial per row.
    let slack0 = n;
    let art0 = n + m_le;
    let cols = art0 + rows;
    let w = cols + 1;
    let mut a = vec![0.0; rows * w];
    let mut basis = vec![0; rows];
    let mut artificial_needed = vec![false; rows];
    let all = lp.le.iter().map(|(r, b)| (r, *b, true)).chain(lp.eq.iter().map(|(r, b)| (r, *b, false)));
    for (i, (row, b, is_le)) in all.enumerate() {
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        for (j, v) in row.iter().enumerate().take(n) {
            a[i * w + j] = sign * v;
        }
        a[i * w + cols] = sign * b;
        if is_le {
            a[i * w + slack0 + i] = sign;
        }
        if is_le && sign > 0.0 {
            basis[i] = slack0 + i;
        } else {
            a[i * w + art0 + i] = 1.0;
            basis[i] = art0 + i;
            artificial_needed[i] = true;
        }
    }
    let mut t = Tableau {
        a,
        rows,
        cols,
        basis,
        obj: vec![0.0; w],
        pivots: 0,
    };

    // Phase 1: maximize -sum(artificials), priced out against the basis.
    if artificial_needed.iter().any(|&x| x) {
        for r in 0..rows {
            if artificial_needed[r] {
                t.obj[art0 + r] = 1.0;
            }
        }
        for r in 0..rows {
            if artificial_needed[r] {
                for c in 0..w {
                    t.obj[c] -= t.a[r * w + c];
                }
            }
        }
        t.optimize(cols);
        if t.obj[cols] < -TOL * (1.0 + rows as f64) {
            return LpResult::Infeasible;
        }
        // Drive remaining artificials out of the basis.
        let mut r = 0;
        while r < t.rows {
            if t.basis[r] >= art0 {
                match (0..art0).find(|&c| t.at(r, c).abs() > TOL) {
                    Some(c) => t.pivot(r, c),
                    None => {
                        // Redundant row: drop it.
                        let w = t.cols + 1;
                        t.a.drain(r * w..(r + 1) * w);
                        t.basis.remove(r);
                        t.rows -= 1;
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    // Phase 2 on the non-artificial columns.
    t.obj = vec![0.0; w];
    for (j, &c) in lp.objective.iter().enumerate() {
        t.obj[j] = -c;
    }
    for r in 0..t.rows {
        let b = t.basis[r];
        let f = t.obj[b];
        if f != 0.0 {
            for c in 0..w {
                t.obj[c] -= f * t.a[r * w + c];
            }
        }
    }
    if !t.optimize(art0) {
        return LpResult::Unbounded;
    }
    let mut x = vec![0.0; n];
    for r in 0..t.rows {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpResult::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::rational::Ratio;
    use num::{BigInt, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_bound() {
        let lp = LpProblem::new(vec![1.0]).le(vec![1.0], 1.0);
        assert_eq!(simplex_solve(&lp), LpResult::Optimal { x: vec![1.0], value: 1.0 });
    }

    #[test]
    fn empty_region_is_infeasible() {
        let lp = LpProblem::new(vec![1.0]).le(vec![1.0], -1.0);
        assert_eq!(simplex_solve(&lp), LpResult::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let lp = LpProblem::new(vec![1.0, 1.0]).le(vec![1.0, -1.0], 1.0);
        assert_eq!(simplex_solve(&lp), LpResult::Unbounded);
    }

    #[test]
    fn equality_and_redundant_rows() {
        // x + y = 1 stated twice, maximize x - y.
        let lp = LpProblem::new(vec![1.0, -1.0])
            .eq(vec![1.0, 1.0], 1.0)
            .eq(vec![2.0, 2.0], 2.0);
        let (x, v) = simplex_solve(&lp).optimal().map(|(x, v)| (x.to_vec(), v)).unwrap();
        assert_eq!(x, vec![1.0, 0.0]);
        assert_eq!(v, 1.0);
    }

    type Q = Ratio<BigInt>;

    fn q(x: i64) -> Q {
        Q::from_integer(BigInt::from(x))
    }

    /// Solves a square system exactly; `None` if singular.
    fn solve_exact(mut m: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Option<Vec<Q>> {
        let n = rhs.len();
        for col in 0..n {
            let p = (col..n).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, p);
            rhs.swap(col, p);
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = &m[r][col] / &m[col][col];
                    for c in col..n {
                        let d = &f * &m[col][c];
                        m[r][c] -= d;
                    }
                    let d = &f * &rhs[col];
                    rhs[r] -= d;
                }
            }
        }
        Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
    }

    /// Optimum over all vertices of `{A x <= b, x >= 0}` in exact arithmetic,
    /// `None` if no vertex is feasible.
    fn vertex_enumeration(c: &[i64], a: &[Vec<i64>], b: &[i64]) -> Option<Q> {
        let n = c.len();
        // Constraints as rows (coefficients, rhs): A rows then -x_j <= 0.
        let mut cons: Vec<(Vec<Q>, Q)> = a
            .iter()
            .zip(b)
            .map(|(r, &bi)| (r.iter().map(|&v| q(v)).collect(), q(bi)))
            .collect();
        for j in 0..n {
            let mut r = vec![q(0); n];
            r[j] = q(-1);
            cons.push((r, q(0)));
        }
        let mut best: Option<Q> = None;
        let k = cons.len();
        let mut pick: Vec<usize> = (0..n).collect();
        loop {
            let m: Vec<Vec<Q>> = pick.iter().map(|&i| cons[i].0.clone()).collect();
            let rhs: Vec<Q> = pick.iter().map(|&i| cons[i].1.clone()).collect();
            if let Some(x) = solve_exact(m, rhs) {
                let feasible = cons.iter().all(|(r, bi)| {
                    let lhs: Q = r.iter().zip(&x).map(|(a, v)| a * v).sum();
                    lhs <= *bi
                });
                if feasible {
                    let val: Q = c.iter().zip(&x).map(|(&ci, v)| q(ci) * v).sum();
                    if best.as_ref().is_none_or(|b| val > *b) {
                        best = Some(val);
                    }
                }
            }
            // Next n-subset of 0..k.
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if pick[i] < k - n + i {
                    pick[i] += 1;
                    for j in i + 1..n {
                        pick[j] = pick[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn matches_exact_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=5);
            let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
            let a: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-4..=6)).collect()).collect();
            let b: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=10)).collect();
            // Box constraints keep the region bounded.
            let mut lp = LpProblem::new(c.iter().map(|&v| v as f64).collect());
            let mut a_all = a.clone();
            let mut b_all = b.clone();
            for j in 0..n {
                let mut r = vec![0; n];
                r[j] = 1;
                a_all.push(r);
                b_all.push(10);
            }
            for (r, &bi) in a_all.iter().zip(&b_all) {
                lp = lp.le(r.iter().map(|&v| v as f64).collect(), bi as f64);
            }
            let oracle = vertex_enumeration(&c, &a_all, &b_all);
            match (simplex_solve(&lp), oracle) {
                (LpResult::Optimal { value, .. }, Some(best)) => {
                    let best = best.numer().to_string().parse::<f64>().unwrap()
                        / best.denom().to_string().parse::<f64>().unwrap();
                    assert!((value - best).abs() < 1e-7, "{value} vs {best}");
                }
                (LpResult::Infeasible, None) => {}
                (got, want) => panic!("simplex {got:?}, oracle {want:?}"),
            }
        }
    }
}
