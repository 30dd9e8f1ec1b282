//! Potential-minimizing allocation under maximum-item-value predictions.
//!
//! Inputs are normalized so every agent's predicted maximum is 1. Each agent
//! carries `phi = a / ((n^2+n+1) a + n^2 * base * a - 1)`, where before the
//! agent's first value-1 good `a = 1/(1 + v(G))` and `base = v(A)`, and from
//! then on `a = 1/v(G)` and `base = v(A)` minus that good if held. Each good
//! goes to the agent that minimizes the summed potential.

use serde::Serialize;

use super::{validate_column, OnlineAllocator};
use crate::error::{Error, Result};
use crate::rat::Rat;

/// `a / ((n^2+n+1) a + n^2 * base * a - 1)`; errors on a non-positive
/// denominator.
pub fn phi(n: usize, a: &Rat, base: &Rat) -> Result<Rat> {
    let n2 = Rat::from(n * n);
    let den = Rat::from(n * n + n + 1) * a + &n2 * base * a - Rat::one();
    if !den.is_positive() {
        return Err(Error::InvariantBreach(format!("potential denominator {den} at a = {a}, base = {base}")));
    }
    Ok(a / den)
}

/// One decision with every intermediate quantity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MivStep {
    /// One-based arrival index.
    pub t: usize,
    pub a: Vec<Rat>,
    pub b: Vec<Rat>,
    pub c: Vec<Rat>,
    /// `c_i + sum_{j != i} b_j` for every candidate `i`.
    pub candidates: Vec<Rat>,
    pub chosen: usize,
    /// `(x_i, y_i)` after the assignment.
    pub x: Vec<Rat>,
    pub y: Vec<Rat>,
    pub phi: Vec<Rat>,
    pub potential: Rat,
}

#[derive(Clone, Debug)]
pub struct MivAllocator {
    n: usize,
    t: usize,
    /// First arrival index with value exactly 1.
    r: Vec<Option<usize>>,
    /// Whether the agent holds its own first value-1 good.
    holds_r: Vec<bool>,
    held: Vec<Rat>,
    total: Vec<Rat>,
    potential: Rat,
    steps: Vec<MivStep>,
    keep_steps: bool,
}

impl MivAllocator {
    pub fn new(n: usize) -> Self {
        MivAllocator {
            n,
            t: 0,
            r: vec![None; n],
            holds_r: vec![false; n],
            held: vec![Rat::zero(); n],
            total: vec![Rat::zero(); n],
            potential: Rat::new(1, n as i64 + 1),
            steps: Vec::new(),
            keep_steps: true,
        }
    }

    /// Stops recording [`MivStep`]s (checks still run).
    pub fn without_steps(mut self) -> Self {
        self.keep_steps = false;
        self
    }

    pub fn steps(&self) -> &[MivStep] {
        &self.steps
    }

    pub fn first_unit(&self) -> &[Option<usize>] {
        &self.r
    }

    /// Initial potential `1/(n+1)`.
    pub fn initial_potential(n: usize) -> Rat {
        Rat::new(1, n as i64 + 1)
    }
}

impl OnlineAllocator for MivAllocator {
    fn n(&self) -> usize {
        self.n
    }

    fn potential(&self) -> Option<Rat> {
        Some(self.potential.clone())
    }

    fn observe(&mut self, column: &[Rat]) -> Result<usize> {
        let n = self.n;
        validate_column(column, n)?;
        if let Some((i, v)) = column.iter().enumerate().find(|(_, v)| **v > Rat::one()) {
            return Err(Error::ContractViolation(format!("agent {} values good {} at {v} > 1", i + 1, self.t + 1)));
        }
        self.t += 1;
        let t = self.t;
        let one = Rat::one();

        let mut a = Vec::with_capacity(n);
        let mut base_b = Vec::with_capacity(n);
        let mut base_c = Vec::with_capacity(n);
        for (i, v) in column.iter().enumerate() {
            self.total[i] += v;
            if self.r[i].is_none() && *v == one {
                self.r[i] = Some(t);
            }
            match self.r[i] {
                None => {
                    a.push((&one + &self.total[i]).recip());
                    base_b.push(self.held[i].clone());
                    base_c.push(&self.held[i] + v);
                }
                Some(r) => {
                    a.push(self.total[i].recip());
                    let excl = if self.holds_r[i] { &self.held[i] - &one } else { self.held[i].clone() };
                    // At t = r the arriving good is the excluded one.
                    base_c.push(if r == t { excl.clone() } else { &excl + v });
                    base_b.push(excl);
                }
            }
        }
        let b = (0..n).map(|i| phi(n, &a[i], &base_b[i])).collect::<Result<Vec<_>>>()?;
        let c = (0..n).map(|i| phi(n, &a[i], &base_c[i])).collect::<Result<Vec<_>>>()?;
        let sum_b: Rat = b.iter().sum();
        let candidates: Vec<Rat> = (0..n).map(|i| &c[i] + &sum_b - &b[i]).collect();
        let mut chosen = 0;
        for i in 1..n {
            if candidates[i] < candidates[chosen] {
                chosen = i;
            }
        }
        let next = candidates[chosen].clone();

        let phis: Vec<Rat> = (0..n).map(|i| if i == chosen { c[i].clone() } else { b[i].clone() }).collect();
        if next > self.potential {
            return Err(Error::InvariantBreach(format!(
                "potential rose from {} to {next} at good {t}",
                self.potential
            )));
        }
        if let Some(i) = phis.iter().position(Rat::is_negative) {
            return Err(Error::InvariantBreach(format!("phi of agent {} is negative at good {t}", i + 1)));
        }
        let floor = Rat::new(1, (n * n) as i64);
        let x = a.clone();
        let y: Vec<Rat> = (0..n).map(|i| if i == chosen { &base_c[i] * &a[i] } else { &base_b[i] * &a[i] }).collect();
        if let Some(i) = (0..n).find(|&i| &x[i] + &y[i] < floor) {
            return Err(Error::InvariantBreach(format!("x + y below 1/n^2 for agent {} at good {t}", i + 1)));
        }

        self.held[chosen] += &column[chosen];
        if self.r[chosen] == Some(t) {
            self.holds_r[chosen] = true;
        }
        self.potential = next.clone();
        if self.keep_steps {
            self.steps.push(MivStep { t, a, b, c, candidates, chosen, x, y, phi: phis, potential: next });
        }
        Ok(chosen)
    }
}
