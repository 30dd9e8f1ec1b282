//! Adaptive construction that drags the third greedy rule's PROP1 quantity
//! down at a harmonic rate.
//!
//! After an opening of three all-ones goods, each cycle first sends goods
//! worth `c_j/2` to the agent `j` whose quantity is higher (and nothing to
//! anyone else), which the rule must give to the other agent `i`. Once
//! `alpha_j` has been pulled to within a factor `1 + c_j / (2 v_j(G))` of
//! `alpha_i`, a good worth `c_k` to both agents strictly lowers the minimum.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{AdaptiveAdversary, Emit};
use crate::error::{Error, Result};
use crate::metrics::Ledger;
use crate::rat::{ExtRat, Rat};

/// Per-cycle lower bound on `1/min alpha`, checked exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub cycle: usize,
    /// Goods emitted when the cycle closed.
    pub goods: usize,
    pub equalizing_goods: usize,
    pub inverse_alpha: Rat,
    pub bound: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Opening,
    Equalize,
    Strike,
}

#[derive(Clone, Debug)]
pub struct Greedy3Adversary {
    n: usize,
    target: Rat,
    max_steps: usize,
    ledger: Ledger,
    last: Option<Vec<Rat>>,
    emitted: usize,
    expected: Option<usize>,
    phase: Phase,
    /// Frozen `c_1, c_2` after the opening.
    c: [Rat; 2],
    lambda: Rat,
    start_inverse: Rat,
    lead: usize,
    lag: usize,
    tau: usize,
    taken: usize,
    before_strike: Option<ExtRat>,
    bound: Rat,
    certificates: Vec<Certificate>,
}

const OPENING_OWNERS: [usize; 3] = [0, 1, 0];

impl Greedy3Adversary {
    /// Halts once `min(1, n * min_i alpha_i) < target`; `0 < target < 2/3`.
    pub fn new(n: usize, target: Rat, max_steps: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 agents, got {n}")));
        }
        if !target.is_positive() || target >= Rat::new(2, 3) {
            return Err(Error::InvalidInput(format!(
                "target {target} outside (0, 2/3): the opening already leaves the minimum at 2/3"
            )));
        }
        Ok(Greedy3Adversary {
            n,
            target,
            max_steps,
            ledger: Ledger::new(n),
            last: None,
            emitted: 0,
            expected: None,
            phase: Phase::Opening,
            c: [Rat::one(), Rat::one()],
            lambda: Rat::zero(),
            start_inverse: Rat::zero(),
            lead: 0,
            lag: 1,
            tau: 0,
            taken: 0,
            before_strike: None,
            bound: Rat::zero(),
            certificates: Vec::new(),
        })
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certificates
    }

    pub fn cycles(&self) -> usize {
        self.certificates.len()
    }

    pub fn lambda(&self) -> &Rat {
        &self.lambda
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    /// `min(1, n * min_i alpha_i)` over the goods emitted so far.
    pub fn ratio(&self) -> Rat {
        match self.ledger.min_alpha() {
            ExtRat::Finite(a) => (Rat::from(self.n) * a).min(Rat::one()),
            ExtRat::Infinite => Rat::one(),
        }
    }

    fn column(&self, head: [Rat; 2]) -> Vec<Rat> {
        let mut col: Vec<Rat> = head.into();
        col.resize(self.n, Rat::zero());
        col
    }

    fn finite_alpha(&self, agent: usize) -> Result<Rat> {
        self.ledger
            .agent(agent)
            .alpha()
            .finite()
            .cloned()
            .ok_or_else(|| Error::AdversaryAssertion(format!("agent {} has no value after the opening", agent + 1)))
    }

    fn absorb(&mut self, history: &[usize]) -> Result<()> {
        if history.len() != self.emitted {
            return Err(Error::AdversaryAssertion(format!(
                "history has {} decisions, {} goods were emitted",
                history.len(),
                self.emitted
            )));
        }
        let Some(col) = self.last.take() else { return Ok(()) };
        let owner = *history.last().expect("non-empty when a column is pending");
        if let Some(want) = self.expected.take() {
            if owner != want {
                return Err(Error::AdversaryAssertion(format!(
                    "good {} went to agent {}, construction requires agent {}",
                    self.emitted,
                    owner + 1,
                    want + 1
                )));
            }
        }
        self.ledger.record(&col, owner);
        Ok(())
    }

    fn close_opening(&mut self) -> Result<()> {
        let a1 = self.finite_alpha(0)?;
        let a2 = self.finite_alpha(1)?;
        if a1 != Rat::one() || a2 != Rat::new(2, 3) {
            return Err(Error::AdversaryAssertion(format!("opening left alpha = ({a1}, {a2}), expected (1, 2/3)")));
        }
        for j in 0..2 {
            self.c[j] = self.ledger.agent(j).outside_max.clone();
        }
        self.lambda = (0..2).map(|j| &self.ledger.agent(j).held / &self.c[j]).max().expect("two agents");
        if self.lambda != Rat::from(2i64) {
            return Err(Error::AdversaryAssertion(format!("lambda = {}, expected 2", self.lambda)));
        }
        self.start_inverse = a2.recip();
        self.bound = self.start_inverse.clone();
        Ok(())
    }

    fn close_strike(&mut self) -> Result<()> {
        let before = self.before_strike.take().expect("strike recorded the previous minimum");
        let after = self.ledger.min_alpha();
        if after >= before {
            return Err(Error::AdversaryAssertion(format!("minimum alpha did not drop: {before} -> {after}")));
        }
        let cycle = self.certificates.len() + 1;
        self.bound += Rat::new(1, 2) / (Rat::from(cycle) + &self.lambda);
        let inverse_alpha =
            after.finite().ok_or_else(|| Error::AdversaryAssertion("minimum alpha became infinite".into()))?.recip();
        if inverse_alpha < self.bound {
            return Err(Error::AdversaryAssertion(format!(
                "cycle {cycle}: 1/alpha = {inverse_alpha} below certificate {}",
                self.bound
            )));
        }
        self.certificates.push(Certificate {
            cycle,
            goods: self.emitted,
            equalizing_goods: self.taken,
            inverse_alpha,
            bound: self.bound.clone(),
        });
        Ok(())
    }

    /// Picks the lagging pair and the predicted number of equalizing goods.
    fn begin_cycle(&mut self) -> Result<()> {
        let (a0, a1) = (self.finite_alpha(0)?, self.finite_alpha(1)?);
        (self.lead, self.lag) = if a1 < a0 { (1, 0) } else { (0, 1) };
        let (ai, aj) = if self.lead == 0 { (a0, a1) } else { (a1, a0) };
        let j = self.lag;
        let x = Rat::from(2i64) / &self.c[j] * &self.ledger.agent(j).total * (aj / ai - Rat::one());
        let tau: BigInt = x.ceil() - 1;
        self.tau = usize::try_from(tau.max(BigInt::zero())).expect("step count fits in usize");
        self.taken = 0;
        Ok(())
    }

    fn still_equalizing(&self) -> Result<bool> {
        let (i, j) = (self.lead, self.lag);
        let ai = self.finite_alpha(i)?;
        let aj = self.finite_alpha(j)?;
        let delta = &self.c[j] / (Rat::from(2i64) * &self.ledger.agent(j).total);
        Ok(aj > ai * (Rat::one() + delta))
    }

    fn emit(&mut self, col: Vec<Rat>, expected: Option<usize>) -> Emit {
        self.emitted += 1;
        self.expected = expected;
        self.last = Some(col.clone());
        Emit::Column(col)
    }
}

impl AdaptiveAdversary for Greedy3Adversary {
    fn n(&self) -> usize {
        self.n
    }

    fn next_column(&mut self, history: &[usize]) -> Result<Emit> {
        self.absorb(history)?;
        if self.phase == Phase::Opening && self.emitted < OPENING_OWNERS.len() {
            let want = OPENING_OWNERS[self.emitted];
            let col = self.column([Rat::one(), Rat::one()]);
            return Ok(self.emit(col, Some(want)));
        }
        match self.phase {
            Phase::Opening => {
                self.close_opening()?;
                self.phase = Phase::Equalize;
                self.begin_cycle()?;
            }
            Phase::Strike => {
                self.close_strike()?;
                self.phase = Phase::Equalize;
                self.begin_cycle()?;
            }
            Phase::Equalize => {}
        }
        if self.ratio() < self.target {
            return Ok(Emit::Done);
        }
        if self.emitted >= self.max_steps {
            return Err(Error::BudgetExhausted {
                steps: self.emitted,
                detail: format!("ratio {} still at or above target {}", self.ratio(), self.target),
            });
        }
        if self.still_equalizing()? {
            let j = self.lag;
            let mut head = [Rat::zero(), Rat::zero()];
            head[j] = &self.c[j] / Rat::from(2i64);
            self.taken += 1;
            let col = self.column(head);
            return Ok(self.emit(col, Some(self.lead)));
        }
        if self.taken != self.tau {
            return Err(Error::AdversaryAssertion(format!(
                "equalization took {} goods, predicted {}",
                self.taken, self.tau
            )));
        }
        self.before_strike = Some(self.ledger.min_alpha());
        self.phase = Phase::Strike;
        let col = self.column([self.c[0].clone(), self.c[1].clone()]);
        Ok(self.emit(col, None))
    }
}

/// Cycles after which the certificate alone forces `n * min alpha < target`:
/// the least `k` with `3/2 + sum_{s=1..k} 1/(2(s+2)) > n/target`. Returns
/// an estimate when `k` is beyond direct summation.
pub fn greedy3_cycle_bound(n: usize, target: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let goal = n as f64 / target;
    let mut sum = 1.5;
    let mut k = 0u64;
    while k < 10_000_000 {
        if sum > goal {
            return k as f64;
        }
        k += 1;
        sum += 1.0 / (2.0 * (k as f64 + 2.0));
    }
    // sum = 3/2 + (H_{k+2} - 3/2) / 2 and H_N ~ ln N + gamma
    let needed_h = 2.0 * goal - 1.5;
    (needed_h - EULER_GAMMA).exp() - 2.0
}
