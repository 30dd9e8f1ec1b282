//! Valuation instances, allocations and MIV predictions, plus their JSON
//! file formats.
//!
//! Agents and goods are zero-based in the API. Files and CLI output use the
//! one-based labels of the arrival order (`g_1..g_m`, agents `1..n`).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Full valuation matrix: `values[i][t]` is agent `i`'s value for the good
/// arriving at (zero-based) step `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    values: Vec<Vec<Rat>>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    m: usize,
    n: usize,
    values: Vec<Vec<Rat>>,
}

impl Instance {
    pub fn new(values: Vec<Vec<Rat>>) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 agents, got {n}")));
        }
        let m = values[0].len();
        for (i, row) in values.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidInput(format!(
                    "ragged matrix: agent {} has {} goods, agent 1 has {m}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(t) = row.iter().position(Rat::is_negative) {
                return Err(Error::InvalidInput(format!(
                    "negative value {} for agent {} good {}",
                    row[t],
                    i + 1,
                    t + 1
                )));
            }
        }
        Ok(Instance { n, values })
    }

    /// Builds an instance from arrival-ordered columns.
    pub fn from_columns(n: usize, columns: &[Vec<Rat>]) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::InvalidInput(format!("column of length {} for {n} agents", c.len())));
        }
        let values = (0..n).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
        Instance::new(values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.values[0].len()
    }

    pub fn value(&self, agent: usize, good: usize) -> &Rat {
        &self.values[agent][good]
    }

    pub fn row(&self, agent: usize) -> &[Rat] {
        &self.values[agent]
    }

    pub fn rows(&self) -> &[Vec<Rat>] {
        &self.values
    }

    pub fn column(&self, good: usize) -> Vec<Rat> {
        self.values.iter().map(|row| row[good].clone()).collect()
    }

    pub fn total(&self, agent: usize) -> Rat {
        self.values[agent].iter().sum()
    }

    /// `v_i^max`, zero for an empty instance.
    pub fn max_value(&self, agent: usize) -> Rat {
        self.values[agent].iter().max().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn bundle_value<I>(&self, agent: usize, goods: I) -> Result<Rat>
    where
        I: IntoIterator<Item = usize>,
    {
        if agent >= self.n {
            return Err(Error::IndexOutOfRange(format!("agent {agent} (n = {})", self.n)));
        }
        let row = &self.values[agent];
        let mut sum = Rat::zero();
        for g in goods {
            let v = row.get(g).ok_or_else(|| Error::IndexOutOfRange(format!("good {g} (m = {})", row.len())))?;
            sum += v;
        }
        Ok(sum)
    }

    /// Same instance with one agent's row multiplied by `k`.
    pub fn scale_agent(&self, agent: usize, k: &Rat) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        let mut values = self.values.clone();
        for v in &mut values[agent] {
            *v = &*v * k;
        }
        Instance::new(values)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.values.len() != file.n {
            return Err(Error::InvalidInput(format!("declared n = {} but {} rows given", file.n, file.values.len())));
        }
        let inst = Instance::new(file.values)?;
        if inst.m() != file.m {
            return Err(Error::InvalidInput(format!("declared m = {} but rows have {}", file.m, inst.m())));
        }
        Ok(inst)
    }

    /// Canonical encoding: sorted keys, lowest-terms `"p/q"` strings.
    pub fn to_json(&self) -> String {
        let file = InstanceFile { m: self.m(), n: self.n, values: self.values.clone() };
        serde_json::to_string(&file).expect("instance serialization is infallible")
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    Instance::from_json(&fs::read_to_string(path)?)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, inst.to_json())?;
    Ok(())
}

/// Final partition of the goods: `owner[t]` is the agent holding good `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    n: usize,
    owner: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AllocationFile {
    owner: Vec<usize>,
}

impl Allocation {
    pub fn new(n: usize, owner: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = owner.iter().find(|&&o| o >= n) {
            return Err(Error::IndexOutOfRange(format!("owner {bad} with n = {n}")));
        }
        Ok(Allocation { n, owner })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.owner.len()
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn owner(&self, good: usize) -> usize {
        self.owner[good]
    }

    pub fn bundle(&self, agent: usize) -> Vec<usize> {
        self.owner.iter().enumerate().filter(|(_, &o)| o == agent).map(|(g, _)| g).collect()
    }

    pub fn bundles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (g, &o) in self.owner.iter().enumerate() {
            out[o].push(g);
        }
        out
    }

    pub fn check_against(&self, inst: &Instance) -> Result<()> {
        if self.n != inst.n() || self.m() != inst.m() {
            return Err(Error::InvalidInput(format!(
                "allocation is {}x{} but instance is {}x{}",
                self.n,
                self.m(),
                inst.n(),
                inst.m()
            )));
        }
        Ok(())
    }

    /// Reads the one-based `{"owner": [...]}` format.
    pub fn from_json(text: &str, n: usize) -> Result<Self> {
        let file: AllocationFile = serde_json::from_str(text)?;
        let owner = file
            .owner
            .into_iter()
            .map(|o| {
                if o == 0 || o > n {
                    Err(Error::IndexOutOfRange(format!("owner {o} outside 1..={n}")))
                } else {
                    Ok(o - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Allocation::new(n, owner)
    }

    pub fn to_json(&self) -> String {
        let file = AllocationFile { owner: self.owner.iter().map(|o| o + 1).collect() };
        serde_json::to_string(&file).expect("allocation serialization is infallible")
    }
}

/// MIV predictions with a declared one-sided error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predictions {
    pub p: Vec<Rat>,
    pub epsilon: Rat,
}

impl Predictions {
    pub fn new(p: Vec<Rat>, epsilon: Rat) -> Result<Self> {
        if p.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidInput("predictions must be positive".into()));
        }
        if epsilon.is_negative() || epsilon >= Rat::one() {
            return Err(Error::InvalidInput(format!("epsilon {epsilon} outside [0, 1)")));
        }
        Ok(Predictions { p, epsilon })
    }

    /// Perfect predictions `p_i = v_i^max`. Fails if some agent values
    /// everything at zero.
    pub fn perfect(inst: &Instance) -> Result<Self> {
        Predictions::new((0..inst.n()).map(|i| inst.max_value(i)).collect(), Rat::zero())
    }

    pub fn unit(n: usize) -> Self {
        Predictions { p: vec![Rat::one(); n], epsilon: Rat::zero() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Predictions = serde_json::from_str(text)?;
        Predictions::new(raw.p, raw.epsilon)
    }
}

/// True iff every agent's maximum single-good value lies in
/// `[(1 - eps) p_i, p_i]`.
pub fn check_predictions(inst: &Instance, pred: &Predictions) -> bool {
    if pred.p.len() != inst.n() {
        return false;
    }
    let keep = Rat::one() - &pred.epsilon;
    (0..inst.n()).all(|i| {
        let vmax = inst.max_value(i);
        let p = &pred.p[i];
        vmax <= *p && vmax >= &keep * p
    })
}
