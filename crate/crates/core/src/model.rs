//! Model parameters, the coupling-constant map, and evaluation of the
//! potential and of the closed-form wavefunction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters of one exactly solvable family.
///
/// `alpha` and `beta` enter the exponent `-r^6/6 - alpha r^4/4 - beta r^2/2`,
/// `big_m = L + 1/2` fixes the effective angular momentum, and `n_states`
/// is the length of the polynomial factor (the multiplet size).
/// `dimension` and `ell` only matter for the spike strength.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec<T = f64> {
    pub alpha: T,
    pub beta: T,
    pub big_m: u32,
    pub n_states: u32,
    pub dimension: u32,
    pub ell: u32,
}

impl<T: Scalar> ModelSpec<T> {
    /// Three-dimensional s-wave by default.
    pub fn new(alpha: T, beta: T, big_m: u32, n_states: u32) -> Result<Self> {
        let spec = ModelSpec {
            alpha,
            beta,
            big_m,
            n_states,
            dimension: 3,
            ell: 0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_partial_wave(mut self, dimension: u32, ell: u32) -> Result<Self> {
        self.dimension = dimension;
        self.ell = ell;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.big_m < 1 {
            return Err(Error::InvalidSpec("M must be at least 1".into()));
        }
        if self.n_states < 1 {
            return Err(Error::InvalidSpec("N must be at least 1".into()));
        }
        if self.dimension < 1 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if !self.alpha.to_f64().is_finite() || !self.beta.to_f64().is_finite() {
            return Err(Error::InvalidSpec("alpha and beta must be finite".into()));
        }
        Ok(())
    }

    pub fn angular_l(&self) -> T {
        T::from_ratio(2 * self.big_m as i64 - 1, 2)
    }

    pub fn spike_strength(&self) -> T {
        spike_strength_exact(self.big_m, self.dimension, self.ell)
    }

    /// Shifted coupling `F = d - beta^2 + 2 N alpha`.
    pub fn shifted_coupling(&self, d: &T) -> T {
        d.clone() - self.beta.clone() * self.beta.clone()
            + T::from_i64(2 * self.n_states as i64) * self.alpha.clone()
    }
}

impl ModelSpec<f64> {
    /// The same spec over the rationals. `alpha`, `beta` become the simplest
    /// rationals that round back to the same doubles, so `to_f64` of the
    /// result reproduces `self` exactly.
    pub fn exact(&self) -> ModelSpec<num_rational::BigRational> {
        ModelSpec {
            alpha: crate::scalar::simplest_rational(self.alpha),
            beta: crate::scalar::simplest_rational(self.beta),
            big_m: self.big_m,
            n_states: self.n_states,
            dimension: self.dimension,
            ell: self.ell,
        }
    }
}

/// `f = M^2 - (ell - 1 + D/2)^2`: the spike that turns the bare centrifugal
/// term into `L(L+1)/r^2` with `L = M - 1/2`.
pub fn spike_strength(big_m: u32, dimension: u32, ell: u32) -> f64 {
    spike_strength_exact::<f64>(big_m, dimension, ell)
}

fn spike_strength_exact<T: Scalar>(big_m: u32, dimension: u32, ell: u32) -> T {
    // 4f = (2M)^2 - (2 ell - 2 + D)^2
    let two_m = 2 * big_m as i64;
    let shifted = 2 * ell as i64 - 2 + dimension as i64;
    T::from_ratio(two_m * two_m - shifted * shifted, 4)
}

/// `L = M - 1/2`.
pub fn angular_l(big_m: u32) -> f64 {
    big_m as f64 - 0.5
}

/// The quadratic coupling `d`, which is the unknown in Sturmian problems.
#[derive(Clone, Debug, PartialEq)]
pub enum Coupling<T> {
    Known(T),
    Unsolved,
}

impl<T: Clone> Coupling<T> {
    pub fn value(&self) -> Result<T> {
        match self {
            Coupling::Known(v) => Ok(v.clone()),
            Coupling::Unsolved => Err(Error::UnsolvedCoupling),
        }
    }
}

/// Coefficients of `V(r) = r^10 + a r^8 + b r^6 + c r^4 + d r^2 + f/r^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialCoeffs<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: Coupling<T>,
    pub f: T,
}

/// Couplings for which the ansatz terminates: `a = 2 alpha`,
/// `b = alpha^2 + 2 beta`, `c = 2 alpha beta + 2M - 4N - 2`.
pub fn potential_coeffs<T: Scalar>(spec: &ModelSpec<T>, d: Coupling<T>) -> PotentialCoeffs<T> {
    let two = T::from_i64(2);
    let alpha = spec.alpha.clone();
    let beta = spec.beta.clone();
    PotentialCoeffs {
        a: two.clone() * alpha.clone(),
        b: alpha.clone() * alpha.clone() + two.clone() * beta.clone(),
        c: two * alpha * beta
            + T::from_i64(2 * spec.big_m as i64 - 4 * spec.n_states as i64 - 2),
        d,
        f: spec.spike_strength(),
    }
}

impl PotentialCoeffs<f64> {
    /// Coefficients of the regular part in powers of `r^2`, constant first:
    /// `[0, d, c, b, a, 1]`. The spike is carried by `L(L+1)/r^2` instead.
    pub fn regular_part(&self) -> Result<Vec<f64>> {
        Ok(vec![0.0, self.d.value()?, self.c, self.b, self.a, 1.0])
    }
}

/// `V(r)` including the spike.
pub fn potential_eval(coeffs: &PotentialCoeffs<f64>, r: Complex64) -> Result<Complex64> {
    if r == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularInput("potential at r = 0"));
    }
    let r2 = r * r;
    let poly = coeffs
        .regular_part()?
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * r2 + c);
    Ok(poly + coeffs.f / r2)
}

/// `r^p` on the branch with the cut along the positive imaginary axis,
/// i.e. `arg r` in `(-3π/2, π/2]`.
pub fn power_cut_up(r: Complex64, p: f64) -> Complex64 {
    let mut theta = r.im.atan2(r.re);
    if theta > std::f64::consts::FRAC_PI_2 {
        theta -= 2.0 * std::f64::consts::PI;
    }
    Complex64::from_polar(r.norm().powf(p), p * theta)
}

/// `psi(r) = exp(-r^6/6 - alpha r^4/4 - beta r^2/2) * sum_n h_n r^(2n - L)`.
pub fn wavefunction_eval(spec: &ModelSpec<f64>, h: &[f64], r: Complex64) -> Result<Complex64> {
    if r == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularInput("wavefunction at r = 0"));
    }
    if h.len() != spec.n_states as usize {
        return Err(Error::InvalidSpec(format!(
            "expected {} expansion coefficients, got {}",
            spec.n_states,
            h.len()
        )));
    }
    let r2 = r * r;
    let series = h
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * r2 + c);
    let exponent = -(r2 * r2 * r2) / 6.0 - spec.alpha * r2 * r2 / 4.0 - spec.beta * r2 / 2.0;
    Ok(exponent.exp() * power_cut_up(r, -angular_l(spec.big_m)) * series)
}

/// One exact solution: energy, quadratic coupling and the coefficients of
/// the polynomial factor.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipletEntry {
    pub energy: f64,
    pub quadratic_coupling: f64,
    pub h: Vec<f64>,
    pub recurrence_residual: f64,
    pub validated: bool,
}

/// The exact states supported by one tuned potential, sorted by energy,
/// then coupling, then `h` lexicographically.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Multiplet {
    pub entries: Vec<MultipletEntry>,
}

impl Multiplet {
    pub fn new(mut entries: Vec<MultipletEntry>) -> Self {
        entries.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then(a.quadratic_coupling.total_cmp(&b.quadratic_coupling))
                .then_with(|| {
                    a.h.iter()
                        .zip(&b.h)
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        });
        Multiplet { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validated(&self) -> impl Iterator<Item = &MultipletEntry> {
        self.entries.iter().filter(|e| e.validated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    #[test]
    fn spike_strength_examples() {
        assert_eq!(spike_strength(1, 1, 0), 0.75);
        assert_eq!(spike_strength(1, 4, 0), 0.0);
        assert_eq!(spike_strength(2, 2, 2), 0.0);
        // M = 2 also covers the six-dimensional s-wave and four-dimensional p-wave
        assert_eq!(spike_strength(2, 6, 0), 0.0);
        assert_eq!(spike_strength(2, 4, 1), 0.0);
    }

    #[test]
    fn spike_strength_vanishes_exactly_on_the_diagonal() {
        for m in 1..=10u32 {
            for dim in 1..=8u32 {
                for ell in 0..=8u32 {
                    let f = spike_strength(m, dim, ell);
                    let on_diagonal = 2 * m as i64 == 2 * ell as i64 - 2 + dim as i64;
                    assert_eq!(f == 0.0, on_diagonal, "M={m} D={dim} l={ell}");
                }
            }
        }
    }

    #[test]
    fn spike_reproduces_effective_angular_momentum() {
        // L(L+1) = f + (l + (D-3)/2)(l + (D-1)/2) with L = M - 1/2
        for m in 1..=5u32 {
            for dim in 1..=6u32 {
                for ell in 0..=4u32 {
                    let l = rational(2 * m as i64 - 1, 2);
                    let lhs = l.clone() * (l + rational(1, 1));
                    let bare = rational(2 * ell as i64 + dim as i64 - 3, 2)
                        * rational(2 * ell as i64 + dim as i64 - 1, 2);
                    let f: BigRational = spike_strength_exact(m, dim, ell);
                    assert_eq!(lhs, f + bare);
                }
            }
        }
    }

    #[test]
    fn angular_momentum() {
        assert_eq!(angular_l(1), 0.5);
        assert_eq!(angular_l(2), 1.5);
        assert_eq!(angular_l(5), 4.5);
    }

    #[test]
    fn coupling_map_examples() {
        let s = ModelSpec::new(0.0, 0.0, 2, 3).unwrap();
        let c = potential_coeffs(&s, Coupling::Unsolved);
        assert_eq!((c.a, c.b, c.c), (0.0, 0.0, -10.0));

        let s = ModelSpec::new(1.0, 2.0, 1, 1).unwrap();
        let c = potential_coeffs(&s, Coupling::Known(3.0));
        assert_eq!((c.a, c.b, c.c), (2.0, 5.0, 0.0));
        assert_eq!(c.d, Coupling::Known(3.0));

        let s = ModelSpec::new(0.0, 0.0, 1, 1).unwrap();
        assert_eq!(potential_coeffs(&s, Coupling::Unsolved).c, -4.0);
    }

    #[test]
    fn coupling_map_exact_rationals() {
        let s = ModelSpec::new(rational(1, 3), rational(-2, 7), 3, 4).unwrap();
        let c = potential_coeffs(&s, Coupling::Unsolved);
        assert_eq!(c.a, rational(2, 3));
        assert_eq!(c.b, rational(1, 9) - rational(4, 7));
        assert_eq!(c.c, rational(-4, 21) + rational(6 - 16 - 2, 1));
    }

    #[test]
    fn potential_examples() {
        let ones = PotentialCoeffs {
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: Coupling::Known(1.0),
            f: 1.0,
        };
        assert_eq!(potential_eval(&ones, Complex64::new(1.0, 0.0)).unwrap().re, 6.0);

        let pure = PotentialCoeffs {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: Coupling::Known(0.0),
            f: 0.0,
        };
        assert_eq!(potential_eval(&pure, Complex64::new(2.0, 0.0)).unwrap().re, 1024.0);

        let spike = PotentialCoeffs {
            f: 0.75,
            ..pure.clone()
        };
        let v = potential_eval(&spike, Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.re - 3.0 - 0.5f64.powi(10)).abs() < 1e-12);

        assert!(matches!(
            potential_eval(&pure, Complex64::new(0.0, 0.0)),
            Err(Error::SingularInput(_))
        ));
        let unsolved = PotentialCoeffs {
            d: Coupling::Unsolved,
            ..pure
        };
        assert_eq!(
            potential_eval(&unsolved, Complex64::new(1.0, 0.0)),
            Err(Error::UnsolvedCoupling)
        );
    }

    #[test]
    fn wavefunction_examples() {
        let s = ModelSpec::new(0.0, 0.0, 1, 1).unwrap();
        let psi = wavefunction_eval(&s, &[1.0], Complex64::new(1.0, 0.0)).unwrap();
        assert!((psi.re - (-1.0f64 / 6.0).exp()).abs() < 1e-15);
        assert!((psi.re - 0.846482).abs() < 1e-6);
        assert_eq!(psi.im, 0.0);

        let s3 = ModelSpec::new(0.3, -0.2, 2, 3).unwrap();
        for x in [0.3, 1.0, 2.5] {
            let z = wavefunction_eval(&s3, &[0.0; 3], Complex64::new(x, -0.5)).unwrap();
            assert_eq!(z, Complex64::new(0.0, 0.0));
        }
        assert!(wavefunction_eval(&s, &[1.0], Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn wavefunction_decays_like_the_sextic_exponential() {
        let s = ModelSpec::new(0.5, 1.0, 2, 2).unwrap();
        for x in [3.0, 3.5, 4.0] {
            let psi = wavefunction_eval(&s, &[1.0, 2.0], Complex64::new(x, 0.0)).unwrap();
            let ratio = psi.norm().ln() / (-(x as f64).powi(6) / 6.0);
            assert!((ratio - 1.0).abs() < 0.15, "x={x} ratio={ratio}");
        }
    }

    #[test]
    fn branch_is_cut_upwards() {
        // positive reals: real power
        let p = power_cut_up(Complex64::new(2.0, 0.0), -1.5);
        assert_eq!(p.im, 0.0);
        // negative reals sit at arg = -π, continuous with the lower half plane
        let left = power_cut_up(Complex64::new(-1.0, 0.0), -0.5);
        let below = power_cut_up(Complex64::new(-1.0, -1e-9), -0.5);
        assert!((left - below).norm() < 1e-8);
        // just right and left of the positive imaginary axis differ by the monodromy
        let right = power_cut_up(Complex64::new(1e-12, 1.0), -0.5);
        let left = power_cut_up(Complex64::new(-1e-12, 1.0), -0.5);
        assert!((right + left).norm() < 1e-9);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ModelSpec::new(0.0, 0.0, 0, 1).is_err());
        assert!(ModelSpec::new(0.0, 0.0, 1, 0).is_err());
        assert!(ModelSpec::new(f64::NAN, 0.0, 1, 1).is_err());
        assert!(ModelSpec::new(0.0, 0.0, 1, 1)
            .unwrap()
            .with_partial_wave(0, 0)
            .is_err());
    }

    #[test]
    fn multiplet_ordering_is_total() {
        let entry = |e: f64, d: f64, h: Vec<f64>| MultipletEntry {
            energy: e,
            quadratic_coupling: d,
            h,
            recurrence_residual: 0.0,
            validated: true,
        };
        let m = Multiplet::new(vec![
            entry(1.0, 0.0, vec![1.0]),
            entry(0.0, 2.0, vec![1.0, 0.5]),
            entry(0.0, 2.0, vec![0.0, 1.0]),
            entry(0.0, -1.0, vec![1.0]),
        ]);
        let order: Vec<(f64, f64)> = m
            .entries
            .iter()
            .map(|e| (e.energy, e.quadratic_coupling))
            .collect();
        assert_eq!(order, vec![(0.0, -1.0), (0.0, 2.0), (0.0, 2.0), (1.0, 0.0)]);
        assert_eq!(m.entries[1].h, vec![0.0, 1.0]);
    }
}
