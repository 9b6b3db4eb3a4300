use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::Poly;
use crate::scalar::{Algebra, Scalar};

/// The two indeterminates of the coupled secular problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    /// Energy `E`.
    E,
    /// Quadratic coupling `d`.
    D,
}

/// Dense polynomial in the energy `E` and the coupling `d`.
///
/// `terms[i][j]` is the coefficient of `E^i d^j`. Rows are kept rectangular
/// and trailing zero rows and columns are trimmed.
#[derive(Clone, PartialEq, Debug)]
pub struct BiPoly<T> {
    terms: Vec<Vec<T>>,
}

impl<T: Scalar> BiPoly<T> {
    pub fn new(terms: Vec<Vec<T>>) -> Self {
        let cols = terms.iter().map(Vec::len).max().unwrap_or(0);
        let terms = terms
            .into_iter()
            .map(|mut row| {
                row.resize(cols, T::zero());
                row
            })
            .collect();
        let mut p = BiPoly { terms };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self
            .terms
            .last()
            .is_some_and(|row| row.iter().all(Zero::is_zero))
        {
            self.terms.pop();
        }
        loop {
            let Some(cols) = self.terms.first().map(Vec::len) else {
                return;
            };
            if cols == 0 || !self.terms.iter().all(|row| row[cols - 1].is_zero()) {
                break;
            }
            for row in &mut self.terms {
                row.pop();
            }
        }
        if self.terms.first().is_some_and(Vec::is_empty) {
            self.terms.clear();
        }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![vec![c]])
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::E => Self::new(vec![vec![T::zero()], vec![T::one()]]),
            Var::D => Self::new(vec![vec![T::zero(), T::one()]]),
        }
    }

    /// Lift a polynomial in one indeterminate.
    pub fn from_poly(p: &Poly<T>, v: Var) -> Self {
        match v {
            Var::E => Self::new(p.coeffs().iter().map(|c| vec![c.clone()]).collect()),
            Var::D => Self::new(vec![p.coeffs().to_vec()]),
        }
    }

    pub fn coeff(&self, e_power: usize, d_power: usize) -> T {
        self.terms
            .get(e_power)
            .and_then(|row| row.get(d_power))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// Degree in `v`; `None` for the zero polynomial.
    pub fn degree(&self, v: Var) -> Option<usize> {
        if self.terms.is_empty() {
            return None;
        }
        match v {
            Var::E => Some(self.terms.len() - 1),
            Var::D => Some(self.terms[0].len() - 1),
        }
    }

    pub fn eval(&self, e: &T, d: &T) -> T {
        self.terms.iter().rev().fold(T::zero(), |acc, row| {
            let inner = row
                .iter()
                .rev()
                .fold(T::zero(), |a, c| a * d.clone() + c.clone());
            acc * e.clone() + inner
        })
    }

    /// Coefficients of `v^k` as polynomials in the other indeterminate.
    pub fn coefficients_in(&self, v: Var) -> Vec<Poly<T>> {
        match v {
            Var::D => {
                let cols = self.terms.first().map_or(0, Vec::len);
                (0..cols)
                    .map(|j| Poly::new(self.terms.iter().map(|row| row[j].clone()).collect()))
                    .collect()
            }
            Var::E => self.terms.iter().map(|row| Poly::new(row.clone())).collect(),
        }
    }

    /// Fix one indeterminate at `value`, leaving a polynomial in the other.
    pub fn substitute(&self, v: Var, value: &T) -> Poly<T> {
        let parts = self.coefficients_in(match v {
            Var::E => Var::D,
            Var::D => Var::E,
        });
        // parts[k] multiplies (other)^k with coefficients in v
        Poly::new(parts.iter().map(|p| p.eval(value)).collect())
    }

    /// Replace `d` by a polynomial in `E`.
    pub fn substitute_d(&self, d_of_e: &Poly<T>) -> Poly<T> {
        self.coefficients_in(Var::D)
            .into_iter()
            .rev()
            .fold(Poly::zero(), |acc, c| acc * d_of_e.clone() + c)
    }

    pub fn partial(&self, v: Var) -> Self {
        let mut out = Vec::new();
        for (i, row) in self.terms.iter().enumerate() {
            let mut new_row = Vec::new();
            for (j, c) in row.iter().enumerate() {
                let k = match v {
                    Var::E => i,
                    Var::D => j,
                };
                new_row.push(c.clone() * T::from_i64(k as i64));
            }
            match v {
                Var::E if i > 0 => out.push(new_row),
                Var::E => {}
                Var::D => {
                    new_row.remove(0);
                    out.push(new_row);
                }
            }
        }
        Self::new(out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .iter()
            .flatten()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> BiPoly<f64> {
        BiPoly::new(
            self.terms
                .iter()
                .map(|row| row.iter().map(Scalar::to_f64).collect())
                .collect(),
        )
    }
}

impl<T: Scalar> Zero for BiPoly<T> {
    fn zero() -> Self {
        BiPoly { terms: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: Scalar> One for BiPoly<T> {
    fn one() -> Self {
        BiPoly::constant(T::one())
    }
}

impl<T: Scalar> Algebra<T> for BiPoly<T> {
    fn from_scalar(c: T) -> Self {
        BiPoly::constant(c)
    }
}

impl<T: Scalar> Add for BiPoly<T> {
    type Output = BiPoly<T>;

    fn add(self, rhs: Self) -> Self {
        let rows = self.terms.len().max(rhs.terms.len());
        let cols = self
            .terms
            .first()
            .map_or(0, Vec::len)
            .max(rhs.terms.first().map_or(0, Vec::len));
        let mut out = vec![vec![T::zero(); cols]; rows];
        for src in [&self.terms, &rhs.terms] {
            for (i, row) in src.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    out[i][j] = out[i][j].clone() + c.clone();
                }
            }
        }
        BiPoly::new(out)
    }
}

impl<T: Scalar> Neg for BiPoly<T> {
    type Output = BiPoly<T>;

    fn neg(self) -> Self {
        BiPoly {
            terms: self
                .terms
                .into_iter()
                .map(|row| row.into_iter().map(|c| -c).collect())
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for BiPoly<T> {
    type Output = BiPoly<T>;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> Mul for BiPoly<T> {
    type Output = BiPoly<T>;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero();
        }
        let (r1, c1) = (self.terms.len(), self.terms[0].len());
        let (r2, c2) = (rhs.terms.len(), rhs.terms[0].len());
        let mut out = vec![vec![T::zero(); c1 + c2 - 1]; r1 + r2 - 1];
        for (i, row_a) in self.terms.iter().enumerate() {
            for (j, a) in row_a.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, row_b) in rhs.terms.iter().enumerate() {
                    for (l, b) in row_b.iter().enumerate() {
                        if !b.is_zero() {
                            out[i + k][j + l] = out[i + k][j + l].clone() + a.clone() * b.clone();
                        }
                    }
                }
            }
        }
        BiPoly::new(out)
    }
}
