//! Adaptive input on which no online rule can be approximately EF1, MMS or
//! PROPX, even when every agent's maximum single-good value is known to be 1.
//!
//! The first good is worth 1 to everyone; call its receiver the anchor. Each
//! later good is worth 1 to the anchor and a geometrically growing `eps K^(t-2)`
//! to the others, as long as the anchor still holds one good or `t <= n`.
//! Afterwards only worthless goods arrive.

use num_traits::ToPrimitive;

use super::{check_alpha_target, AdaptiveAdversary, Emit};
use crate::error::{Error, Result};
use crate::metrics::Notion;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImpossibilityParams {
    /// Number of goods, `ceil(n/alpha) + n + 2`.
    pub m: usize,
    /// Growth factor, `ceil(3/alpha)`.
    pub k: Rat,
    /// `1 / K^(m-2)`, so the largest emitted value is exactly 1.
    pub epsilon: Rat,
}

impl ImpossibilityParams {
    pub fn new(n: usize, alpha: &Rat) -> Result<Self> {
        check_alpha_target(n, alpha)?;
        let ceil = |x: Rat| x.ceil().to_usize().expect("parameter fits in usize");
        let m = ceil(Rat::from(n) / alpha) + n + 2;
        let k = Rat::from(ceil(Rat::from(3i64) / alpha));
        let epsilon = k.pow(-(m as i32 - 2));
        Ok(ImpossibilityParams { m, k, epsilon })
    }

    /// Non-anchor value of good `t` (one-based, `t >= 2`).
    pub fn small_value(&self, t: usize) -> Rat {
        &self.epsilon * self.k.pow(t as i32 - 2)
    }
}

#[derive(Clone, Debug)]
pub struct ImpossibilityAdversary {
    n: usize,
    params: ImpossibilityParams,
    notion: Notion,
    emitted: usize,
}

impl ImpossibilityAdversary {
    /// `notion` labels the run; the construction defeats all three at once.
    pub fn new(n: usize, alpha: &Rat, notion: Notion) -> Result<Self> {
        if notion == Notion::Prop1 {
            return Err(Error::InvalidInput("the construction targets ef1, mms or propx".into()));
        }
        Ok(ImpossibilityAdversary { n, params: ImpossibilityParams::new(n, alpha)?, notion, emitted: 0 })
    }

    pub fn params(&self) -> &ImpossibilityParams {
        &self.params
    }

    pub fn notion(&self) -> Notion {
        self.notion
    }
}

impl AdaptiveAdversary for ImpossibilityAdversary {
    fn n(&self) -> usize {
        self.n
    }

    fn next_column(&mut self, history: &[usize]) -> Result<Emit> {
        if history.len() != self.emitted {
            return Err(Error::AdversaryAssertion(format!(
                "history has {} decisions, {} goods were emitted",
                history.len(),
                self.emitted
            )));
        }
        if self.emitted == self.params.m {
            return Ok(Emit::Done);
        }
        let t = self.emitted + 1;
        self.emitted += 1;
        if t == 1 {
            return Ok(Emit::Column(vec![Rat::one(); self.n]));
        }
        let anchor = history[0];
        let anchor_goods = history.iter().filter(|&&o| o == anchor).count();
        if anchor_goods > 1 && t > self.n {
            return Ok(Emit::Column(vec![Rat::zero(); self.n]));
        }
        let small = self.params.small_value(t);
        if small > Rat::one() {
            return Err(Error::AdversaryAssertion(format!("good {t} worth {small} exceeds the prediction 1")));
        }
        let col = (0..self.n).map(|i| if i == anchor { Rat::one() } else { small.clone() }).collect();
        Ok(Emit::Column(col))
    }
}
