use super::{validate_column, OnlineAllocator};
use crate::error::{Error, Result};
use crate::instance::Predictions;
use crate::rat::Rat;

/// PROP1 factor kept by [`Robustified`] around an `alpha`-PROP1 rule:
/// `alpha (1 - eps) / (1 - alpha eps / n)`.
pub fn robust_beta(alpha: &Rat, epsilon: &Rat, n: usize) -> Rat {
    let one = Rat::one();
    alpha * (&one - epsilon) / (&one - alpha * epsilon / Rat::from(n))
}

/// A value raised to 1 before the inner rule saw it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Override {
    /// One-based arrival index.
    pub t: usize,
    pub agent: usize,
    /// Normalized value before the override.
    pub original: Rat,
}

/// Runs an inner rule that expects predictions equal to 1 on values that
/// only satisfy `(1 - eps) p_i <= max_g v_i(g) <= p_i`.
///
/// Values are divided by `p_i`; the first normalized value per agent that
/// reaches `1 - eps` is shown to the inner rule as exactly 1.
#[derive(Clone, Debug)]
pub struct Robustified<A> {
    inner: A,
    p: Vec<Rat>,
    threshold: Rat,
    raised: Vec<bool>,
    overrides: Vec<Override>,
    t: usize,
}

impl<A: OnlineAllocator> Robustified<A> {
    pub fn new(inner: A, predictions: &Predictions) -> Result<Self> {
        let n = inner.n();
        if predictions.p.len() != n {
            return Err(Error::InvalidInput(format!("{} predictions for {n} agents", predictions.p.len())));
        }
        let checked = Predictions::new(predictions.p.clone(), predictions.epsilon.clone())?;
        Ok(Robustified {
            inner,
            p: checked.p,
            threshold: Rat::one() - checked.epsilon,
            raised: vec![false; n],
            overrides: Vec::new(),
            t: 0,
        })
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }

    pub fn overrides(&self) -> &[Override] {
        &self.overrides
    }

    /// The column the inner rule sees, without advancing any state.
    fn augment(&self, column: &[Rat]) -> Result<(Vec<Rat>, Vec<usize>)> {
        let mut out = Vec::with_capacity(column.len());
        let mut raised = Vec::new();
        for (i, v) in column.iter().enumerate() {
            let w = v / &self.p[i];
            if w > Rat::one() {
                return Err(Error::ContractViolation(format!(
                    "agent {} values good {} at {v}, above its prediction {}",
                    i + 1,
                    self.t + 1,
                    self.p[i]
                )));
            }
            if !self.raised[i] && w >= self.threshold {
                raised.push(i);
                out.push(Rat::one());
            } else {
                out.push(w);
            }
        }
        Ok((out, raised))
    }
}

impl<A: OnlineAllocator> OnlineAllocator for Robustified<A> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn potential(&self) -> Option<Rat> {
        self.inner.potential()
    }

    fn observe(&mut self, column: &[Rat]) -> Result<usize> {
        validate_column(column, self.n())?;
        let (shown, raised) = self.augment(column)?;
        self.t += 1;
        for i in raised {
            self.raised[i] = true;
            let original = &column[i] / &self.p[i];
            if original != shown[i] {
                self.overrides.push(Override { t: self.t, agent: i, original });
            }
        }
        self.inner.observe(&shown)
    }
}
