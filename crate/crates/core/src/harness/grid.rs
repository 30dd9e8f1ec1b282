use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Potential `a / ((n^2+n+1) a + n^2 ya - 1)` as a function of `a` and the
/// product `ya`, or `None` where the denominator is not positive.
pub fn grid_phi(n: usize, a: &Rat, ya: &Rat) -> Option<Rat> {
    let den = Rat::from(n * n + n + 1) * a + Rat::from(n * n) * ya - Rat::one();
    den.is_positive().then(|| a / den)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridCell {
    pub a: Rat,
    pub ya: Rat,
    pub phi: Option<Rat>,
}

impl GridCell {
    /// Set where the denominator is not positive.
    pub fn flagged(&self) -> bool {
        self.phi.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PotentialGrid {
    pub n: usize,
    pub a_axis: Vec<Rat>,
    pub ya_axis: Vec<Rat>,
    /// Row-major: `cells[i * ya_axis.len() + j]` is `(a_axis[i], ya_axis[j])`.
    pub cells: Vec<GridCell>,
}

fn axis(lo: &Rat, hi: &Rat, points: usize) -> Vec<Rat> {
    let steps = Rat::from(points - 1);
    (0..points).map(|k| lo + (hi - lo) * Rat::from(k) / &steps).collect()
}

/// Evaluates the potential on `resolution x resolution` evenly spaced points.
pub fn potential_grid(n: usize, a_range: (Rat, Rat), ya_range: (Rat, Rat), resolution: usize) -> Result<PotentialGrid> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 agents, got {n}")));
    }
    if resolution < 2 {
        return Err(Error::InvalidInput("resolution must be at least 2".into()));
    }
    if !a_range.0.is_positive() || a_range.0 >= a_range.1 {
        return Err(Error::InvalidInput(format!(
            "a range [{}, {}] must be positive and increasing",
            a_range.0, a_range.1
        )));
    }
    if ya_range.0.is_negative() || ya_range.0 >= ya_range.1 {
        return Err(Error::InvalidInput(format!(
            "ya range [{}, {}] must be non-negative and increasing",
            ya_range.0, ya_range.1
        )));
    }
    let a_axis = axis(&a_range.0, &a_range.1, resolution);
    let ya_axis = axis(&ya_range.0, &ya_range.1, resolution);
    let cells = a_axis
        .iter()
        .flat_map(|a| ya_axis.iter().map(move |ya| GridCell { a: a.clone(), ya: ya.clone(), phi: grid_phi(n, a, ya) }))
        .collect();
    Ok(PotentialGrid { n, a_axis, ya_axis, cells })
}

impl PotentialGrid {
    pub fn row(&self, i: usize) -> &[GridCell] {
        let w = self.ya_axis.len();
        &self.cells[i * w..(i + 1) * w]
    }

    /// For every `a`, valid cells are non-increasing along `ya`.
    pub fn monotone_in_ya(&self) -> bool {
        (0..self.a_axis.len()).all(|i| {
            let vals: Vec<&Rat> = self.row(i).iter().filter_map(|c| c.phi.as_ref()).collect();
            vals.windows(2).all(|w| w[1] <= w[0])
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["a", "ya", "phi", "phi_f64", "flagged"])?;
        for c in &self.cells {
            let (phi, phi_f) = match &c.phi {
                Some(p) => (p.to_string(), p.to_f64().to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([c.a.to_string(), c.ya.to_string(), phi, phi_f, c.flagged().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn initial_state_cell() {
        assert_eq!(grid_phi(2, &Rat::one(), &Rat::zero()), Some(r("1/6")));
        assert_eq!(grid_phi(2, &Rat::one(), &Rat::zero()).unwrap() * Rat::from(2usize), r("1/3"));
    }

    #[test]
    fn pole_is_flagged() {
        // a = 1/(n^2+n+1) at ya = 0
        assert_eq!(grid_phi(2, &r("1/7"), &Rat::zero()), None);
        let g = potential_grid(2, (r("1/70"), r("1")), (r("0"), r("1/4")), 11).unwrap();
        assert!(g.cells.iter().any(GridCell::flagged));
        assert!(g.cells.iter().any(|c| !c.flagged()));
        assert!(g.monotone_in_ya());
    }

    #[test]
    fn csv_shape() {
        let g = potential_grid(3, (r("1/10"), r("1")), (r("0"), r("1")), 4).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 17);
        assert!(text.starts_with("a,ya,phi,phi_f64,flagged"));
    }

    #[test]
    fn bad_ranges() {
        assert!(potential_grid(2, (r("0"), r("1")), (r("0"), r("1")), 5).is_err());
        assert!(potential_grid(2, (r("1/2"), r("1")), (r("1"), r("0")), 5).is_err());
        assert!(potential_grid(2, (r("1/2"), r("1")), (r("0"), r("1")), 1).is_err());
    }
}
