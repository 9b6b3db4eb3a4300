//! Reality domain of the multiplets over a rectangular `(α, β)` grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::polynomial::{real_filter, roots_with};
use crate::solvers::{energy_polynomial_m2, solve_energies_m2_with, solve_sturmian_with, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Axis { min, max, steps }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidSpec(format!("{name} grid needs at least one step")));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::InvalidSpec(format!(
                "{name} range [{}, {}] is not a finite interval",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// `min + (max − min) i / (steps − 1)`; a single step sits at `min`.
    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepGrid {
    pub alpha: Axis,
    pub beta: Axis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepPoint {
    /// Real roots of the secular polynomial, counted with multiplicity.
    pub n_real: usize,
    /// Entries that passed the rank and residual checks.
    pub validated: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub n_real: usize,
    pub validated: usize,
}

/// Counts at one `(α, β)`; `M` must be 1 (Sturmian) or 2 (energies).
pub fn count_real(spec: &ModelSpec<f64>, tol: &Tolerances) -> Result<SweepPoint> {
    match spec.big_m {
        1 => {
            let r = solve_sturmian_with(spec, tol)?;
            let validated = r.multiplet(spec, tol).validated().count();
            Ok(SweepPoint {
                n_real: r.d_values.len(),
                validated,
            })
        }
        2 => {
            let p = energy_polynomial_m2(&spec.exact())?.to_f64();
            let n_real = match p.degree() {
                Some(d) if d > 0 => real_filter(&roots_with(&p, tol.cluster)?, tol.real).len(),
                _ => 0,
            };
            let validated = solve_energies_m2_with(spec, tol)?.validated().count();
            Ok(SweepPoint { n_real, validated })
        }
        m => Err(Error::WrongMode {
            operation: "sweep",
            required: "1 or 2",
            actual: m,
        }),
    }
}

/// Evaluates every grid point in parallel; rows come back in grid order,
/// `α` outer and `β` inner.
pub fn reality_sweep(big_m: u32, n_states: u32, grid: &SweepGrid, tol: &Tolerances) -> Result<Vec<SweepRow>> {
    grid.alpha.validate("alpha")?;
    grid.beta.validate("beta")?;
    if big_m != 1 && big_m != 2 {
        return Err(Error::WrongMode {
            operation: "sweep",
            required: "1 or 2",
            actual: big_m,
        });
    }
    let points: Vec<(f64, f64)> = (0..grid.alpha.steps)
        .flat_map(|i| (0..grid.beta.steps).map(move |j| (i, j)))
        .map(|(i, j)| (grid.alpha.value(i), grid.beta.value(j)))
        .collect();
    points
        .par_iter()
        .map(|&(alpha, beta)| {
            let spec = ModelSpec::new(alpha, beta, big_m, n_states)?;
            let p = count_real(&spec, tol)?;
            Ok(SweepRow {
                alpha,
                beta,
                n_real: p.n_real,
                validated: p.validated,
            })
        })
        .collect()
}
