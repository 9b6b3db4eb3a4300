//! Checks that do not trust the solvers: residuals of the recurrence, an
//! independent symbolic substitution of the ansatz into the radial equation,
//! and decay of the ansatz in the PT wedge pairs.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::model::{potential_coeffs, Coupling, ModelSpec, PotentialCoeffs};
use crate::polynomial::Poly;
use crate::recurrence::full_system;
use crate::wedges::pt_pairs;

/// Default relative tolerance for floating-point checks.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// `max_n |row_n(h)| / (scale * max |h_k|)` over all `N + 1` recurrence rows,
/// where `scale` is the largest entry measured before cancellation, e.g.
/// `β² + |α(4n − 2M)| + |d|` for `C_n`. An entry that cancels to rounding
/// noise therefore cannot inflate the ratio. Zero for the zero vector;
/// invariant under rescaling `h`.
pub fn recurrence_residual(spec: &ModelSpec<f64>, energy: f64, coupling: f64, h: &[f64]) -> f64 {
    let n = spec.n_states as usize;
    let mut padded = vec![0.0; n];
    for (dst, src) in padded.iter_mut().zip(h) {
        *dst = *src;
    }
    let h_scale = padded.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if h_scale == 0.0 {
        return 0.0;
    }
    let system = full_system(spec, &energy, &coupling);
    let scale = entry_scale(spec, energy, coupling);
    let worst = system
        .mul_vec(&padded)
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return if worst == 0.0 { 0.0 } else { f64::INFINITY };
    }
    worst / (scale * h_scale)
}

/// Largest uncancelled size of an entry of the full system.
fn entry_scale(spec: &ModelSpec<f64>, energy: f64, coupling: f64) -> f64 {
    let (m, n) = (spec.big_m as i64, spec.n_states as i64);
    let (alpha, beta) = (spec.alpha.abs(), spec.beta.abs());
    let mut scale = 0.0_f64;
    for k in 0..=n {
        let sizes = [
            (k - 2, (4 * (n + 1 - k)) as f64),
            (k - 1, beta * beta + alpha * (4 * k - 2 * m).abs() as f64 + coupling.abs()),
            (k, energy.abs() + beta * (4 * k + 2 - 2 * m).abs() as f64),
            (k + 1, ((2 * k + 2) * (2 * k + 2 - 2 * m)).abs() as f64),
        ];
        for (col, size) in sizes {
            if (0..n).contains(&col) {
                scale = scale.max(size);
            }
        }
    }
    scale
}

/// Laurent-type series `Σ c_j r^(j − L)` with integer `j`.
type Series = BTreeMap<i64, BigRational>;

fn add_term(s: &mut Series, j: i64, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let entry = s.entry(j).or_insert_with(BigRational::zero);
    *entry += c;
    if entry.is_zero() {
        s.remove(&j);
    }
}

/// `g ↦ g' − W' g` with `W' = r^5 + α r^3 + β r`: the action of `d/dr` on
/// `g e^(−W)`, stripped of the exponential.
fn twisted_derivative(g: &Series, l: &BigRational, alpha: &BigRational, beta: &BigRational) -> Series {
    let mut out = Series::new();
    for (&j, c) in g {
        add_term(&mut out, j - 1, c * (BigRational::from_integer(j.into()) - l));
        add_term(&mut out, j + 5, -c.clone());
        add_term(&mut out, j + 3, -(c * alpha));
        add_term(&mut out, j + 1, -(c * beta));
    }
    out
}

/// Exact residual `−ψ'' + (L(L+1)/r^2 + V − E) ψ` for the ansatz with
/// `L = M − 1/2`, divided by `e^(−W) r^(−L)` and multiplied by `r^2`, as a
/// polynomial in `r^2`.
///
/// The coefficient of `(r^2)^0` is the indicial (centrifugal) balance; the
/// coefficient of `(r^2)^(k+1)` is minus the `k`-th recurrence row. The
/// derivation differentiates the ansatz directly and does not touch the
/// recurrence code.
pub fn ode_residual_poly(
    spec: &ModelSpec<BigRational>,
    energy: &BigRational,
    coupling: &BigRational,
    h: &[BigRational],
) -> Poly<BigRational> {
    let coeffs = potential_coeffs(spec, Coupling::Known(coupling.clone()));
    ode_residual_poly_with(spec, &coeffs, energy, h)
}

/// As [`ode_residual_poly`] but with explicitly supplied potential
/// coefficients `a, b, c, d` (the spike enters through `L` only).
pub fn ode_residual_poly_with(
    spec: &ModelSpec<BigRational>,
    coeffs: &PotentialCoeffs<BigRational>,
    energy: &BigRational,
    h: &[BigRational],
) -> Poly<BigRational> {
    let l = spec.angular_l();
    let mut g = Series::new();
    for (n, hn) in h.iter().enumerate() {
        add_term(&mut g, 2 * n as i64, hn.clone());
    }
    let second = twisted_derivative(
        &twisted_derivative(&g, &l, &spec.alpha, &spec.beta),
        &l,
        &spec.alpha,
        &spec.beta,
    );

    let d = match &coeffs.d {
        Coupling::Known(v) => v.clone(),
        Coupling::Unsolved => BigRational::zero(),
    };
    let centrifugal = &l * (&l + BigRational::one());
    let potential: [(i64, BigRational); 7] = [
        (-2, centrifugal),
        (0, -energy.clone()),
        (2, d),
        (4, coeffs.c.clone()),
        (6, coeffs.b.clone()),
        (8, coeffs.a.clone()),
        (10, BigRational::one()),
    ];

    let mut residual = Series::new();
    for (&j, c) in &second {
        add_term(&mut residual, j, -c.clone());
    }
    for (&j, c) in &g {
        for (shift, v) in &potential {
            add_term(&mut residual, j + shift, c * v);
        }
    }

    let top = residual.keys().next_back().copied().unwrap_or(-2);
    let mut out = vec![BigRational::zero(); ((top + 2) / 2 + 1).max(0) as usize];
    for (j, c) in residual {
        debug_assert!(j >= -2 && j % 2 == 0, "odd power r^{j} in the residual");
        out[((j + 2) / 2) as usize] = c;
    }
    Poly::new(out)
}

/// True iff the dominant part of the ansatz exponent
/// `W = r^6/6 + α r^4/4 + β r^2/2` grows along the centers of both sectors
/// of each PT pair of degree `z`, i.e. the first non-vanishing term of
/// `Re W(ρ e^{iφ})` as `ρ → ∞` is positive.
pub fn wedge_decay_check(spec: &ModelSpec<f64>, z: u32) -> Result<Vec<(usize, bool)>> {
    let decays = |phi: f64| {
        let terms = [
            (6.0 * phi).cos() / 6.0,
            spec.alpha * (4.0 * phi).cos() / 4.0,
            spec.beta * (2.0 * phi).cos() / 2.0,
        ];
        terms
            .iter()
            .find(|t| t.abs() > 1e-12)
            .is_some_and(|t| *t > 0.0)
    };
    Ok(pt_pairs(z)?
        .pairs
        .iter()
        .map(|p| (p.index, decays(p.left.center) && decays(p.right.center)))
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub recurrence_residual: f64,
    pub ode_residual_max_coeff: f64,
    pub wedge_decay: Vec<(usize, bool)>,
    pub passed: bool,
}

/// Full check of one candidate. The ODE residual is computed exactly on the
/// rationalised data and reported relative to the largest coefficient of
/// the residual's individual contributions, so an exact solution that only
/// exists in floating point still scores at rounding level.
pub fn verify_solution(
    spec: &ModelSpec<f64>,
    energy: f64,
    coupling: f64,
    h: &[f64],
    tol: f64,
) -> Result<VerificationReport> {
    let rec = recurrence_residual(spec, energy, coupling, h);
    let exact_spec = spec.exact();
    let e = crate::scalar::exact(energy);
    let d = crate::scalar::exact(coupling);
    let hq: Vec<BigRational> = h.iter().map(|v| crate::scalar::exact(*v)).collect();
    let poly = ode_residual_poly(&exact_spec, &e, &d, &hq);
    let scale = ode_term_scale(spec, energy, coupling, h);
    let ode = if scale == 0.0 {
        0.0
    } else {
        poly.max_abs_coeff() / scale
    };
    let wedge_decay = wedge_decay_check(spec, 3)?;
    Ok(VerificationReport {
        recurrence_residual: rec,
        ode_residual_max_coeff: ode,
        passed: rec <= tol && ode <= tol,
        wedge_decay,
    })
}

/// Size of the largest single contribution to any residual coefficient.
fn ode_term_scale(spec: &ModelSpec<f64>, energy: f64, coupling: f64, h: &[f64]) -> f64 {
    let h_max = h.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let n = spec.n_states as f64;
    let m = spec.big_m as f64;
    let entries = [
        energy.abs(),
        coupling.abs(),
        spec.beta * spec.beta,
        spec.alpha.abs() * (4.0 * n + 2.0 * m),
        spec.beta.abs() * (4.0 * n + 2.0 * m),
        (2.0 * n + 2.0) * (2.0 * n + 2.0 * m),
        4.0 * (n + 1.0),
    ];
    entries.iter().fold(0.0_f64, |a, b| a.max(*b)) * h_max
}
