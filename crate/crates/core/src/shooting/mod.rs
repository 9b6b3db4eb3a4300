//! Shooting along a PT-symmetric complex contour.
//!
//! The radial equation `ψ'' = Q ψ`, `Q = L(L+1)/r² + P(r²) − E`, is
//! integrated for the log-derivative `y = ψ'/ψ`, which obeys the Riccati
//! equation `y' = Q − y²` and stays bounded where `ψ` itself would overflow.
//! Poles of `y` (zeros of `ψ`) are stepped over by switching to `z = 1/y`,
//! `z' = 1 − Q z²`, whenever `|y| > 2`, and back once `|z| > 2`.
//!
//! Both halves of the contour are integrated from their far ends, started
//! on the decaying WKB branch, towards the matching point `r = −iε`.

mod dopri;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::PotentialCoeffs;
use crate::wedges::{contains, sectors_for_degree};

/// `P(r²) = Σ_k coeffs[k] r^(2k)`, the regular part of the potential.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenPolynomial {
    pub coeffs: Vec<f64>,
}

impl EvenPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        EvenPolynomial { coeffs }
    }

    /// Regular part of the decadic potential. The spike is not included:
    /// it is carried by the `L(L+1)/r²` term.
    pub fn from_coeffs(coeffs: &PotentialCoeffs<f64>) -> Result<Self> {
        Ok(EvenPolynomial::new(coeffs.regular_part()?))
    }

    /// `(P(r²), dP(r²)/dr)`.
    fn eval(&self, r: Complex64) -> (Complex64, Complex64) {
        let s = r * r;
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * s + p;
            p = p * s + c;
        }
        (p, dp * 2.0 * r)
    }
}

/// The integration path. By default the shifted real line
/// `r = x − iε`, `|x| ≤ x_max`; alternatively a polyline through
/// `waypoints` from `−iε` outwards on the right, mirrored by
/// `r → −r̄` on the left.
///
/// On the default contour the Riccati equation is integrated from
/// `x_max − iε` radially inwards to radius 1 and from there straight to
/// `−iε`. Log-derivatives at the matching point do not depend on the path
/// between the same end points (in the lower half plane), but along the
/// ray the decaying solution stays dominant in the integration direction;
/// on the straight line it does not once `arg r` leaves `(−π/10, π/10)`,
/// which happens for `ε` of order one.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub epsilon: f64,
    pub x_max: f64,
    pub waypoints: Option<Vec<Complex64>>,
}

impl Default for Contour {
    fn default() -> Self {
        Contour {
            epsilon: 0.5,
            x_max: 4.0,
            waypoints: None,
        }
    }
}

impl Contour {
    pub fn straight(epsilon: f64, x_max: f64) -> Result<Self> {
        let c = Contour {
            epsilon,
            x_max,
            waypoints: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// Right half of a bent contour; it ends at the last waypoint, whose
    /// angle must lie strictly inside one of the sextic sectors.
    pub fn bent(epsilon: f64, waypoints: Vec<Complex64>) -> Result<Self> {
        let x_max = waypoints.last().map_or(0.0, |w| w.norm());
        let c = Contour {
            epsilon,
            x_max,
            waypoints: Some(waypoints),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn match_point(&self) -> Complex64 {
        Complex64::new(0.0, -self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidContour(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.x_max > 0.0) || !self.x_max.is_finite() {
            return Err(Error::InvalidContour(format!(
                "x_max must be positive, got {}",
                self.x_max
            )));
        }
        let path = self.right_path();
        for w in path.windows(2) {
            if !w[1].re.is_finite() || !w[1].im.is_finite() {
                return Err(Error::InvalidContour("non-finite waypoint".into()));
            }
            if segment_distance_to_origin(w[0], w[1]) < 1e-9 {
                return Err(Error::InvalidContour(
                    "path passes through the singular point r = 0".into(),
                ));
            }
        }
        let end = *path.last().expect("path has an end point");
        let angle = end.im.atan2(end.re);
        let sectors = sectors_for_degree(3)?;
        if !sectors.iter().any(|s| contains(s, angle)) {
            return Err(Error::InvalidContour(format!(
                "end point angle {angle:.4} is not inside a sector where the solution decays"
            )));
        }
        Ok(())
    }

    /// From the matching point outwards.
    fn right_path(&self) -> Vec<Complex64> {
        let mut path = vec![self.match_point()];
        match &self.waypoints {
            Some(w) => path.extend(w.iter().copied()),
            None => {
                let far = Complex64::new(self.x_max, -self.epsilon);
                let knee = far / far.norm();
                if far.norm() > 1.5 && (knee - self.match_point()).norm() > 1e-3 {
                    path.push(knee);
                }
                path.push(far);
            }
        }
        path
    }

    fn left_path(&self) -> Vec<Complex64> {
        self.right_path().iter().map(|w| -w.conj()).collect()
    }
}

fn segment_distance_to_origin(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.conj() * d).re / len2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    FromLeft,
    FromRight,
}

/// `ψ'/ψ` in whichever chart is numerically safe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogDerivative {
    Direct(Complex64),
    /// Holds `ψ/ψ'`.
    Inverted(Complex64),
}

impl LogDerivative {
    pub fn value(&self) -> Complex64 {
        match *self {
            LogDerivative::Direct(y) => y,
            LogDerivative::Inverted(z) => z.inv(),
        }
    }

    fn from_value(y: Complex64) -> Self {
        if y.norm() > 2.0 {
            LogDerivative::Inverted(y.inv())
        } else {
            LogDerivative::Direct(y)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiccatiSample {
    pub r: Complex64,
    pub log_derivative: LogDerivative,
}

/// Integration controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Converged when `|mismatch|` is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// The secant iteration gives up when it strays this far from the guess.
    pub search_radius: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            rtol: 1e-11,
            atol: 1e-13,
            tolerance: 1e-8,
            max_iterations: 40,
            search_radius: 1.5,
        }
    }
}

struct Equation<'a> {
    potential: &'a EvenPolynomial,
    centrifugal: f64,
    energy: Complex64,
}

impl Equation<'_> {
    /// `(Q, dQ/dr)`.
    fn q(&self, r: Complex64) -> (Complex64, Complex64) {
        let (p, dp) = self.potential.eval(r);
        let inv = r.inv();
        let inv2 = inv * inv;
        (
            inv2 * self.centrifugal + p - self.energy,
            dp - inv2 * inv * (2.0 * self.centrifugal),
        )
    }

    /// Decaying WKB branch at `r`, where `outward` points away from the
    /// matching point along the contour.
    fn wkb_start(&self, r: Complex64, outward: Complex64) -> Complex64 {
        let (q, dq) = self.q(r);
        let root = q.sqrt();
        let sigma = if (root * outward).re >= 0.0 { 1.0 } else { -1.0 };
        -root * sigma - dq / (q * 4.0)
    }
}

fn integrate_path(
    eq: &Equation,
    path: &[Complex64],
    config: &ShootingConfig,
    mut record: impl FnMut(Complex64, LogDerivative),
) -> Result<LogDerivative> {
    // path runs from the matching point outwards; integrate it backwards
    let far = path.len() - 1;
    let outward = path[far] - path[far - 1];
    let mut state = LogDerivative::from_value(eq.wkb_start(path[far], outward / outward.norm()));
    record(path[far], state);
    for seg in (1..=far).rev() {
        let (a, b) = (path[seg], path[seg - 1]);
        state = integrate_segment(eq, a, b, state, config, &mut record)?;
    }
    Ok(state)
}

fn integrate_segment(
    eq: &Equation,
    a: Complex64,
    b: Complex64,
    mut state: LogDerivative,
    config: &ShootingConfig,
    record: &mut impl FnMut(Complex64, LogDerivative),
) -> Result<LogDerivative> {
    let delta = b - a;
    let at = |t: f64| a + delta * t;
    let direct = |t: f64, y: Complex64| (eq.q(at(t)).0 - y * y) * delta;
    let inverted = |t: f64, z: Complex64| (Complex64::new(1.0, 0.0) - eq.q(at(t)).0 * z * z) * delta;

    let mut t = 0.0;
    let scale = 1.0 + delta.norm() * eq.q(a).0.norm().sqrt();
    let mut h = (0.01 / scale).min(1.0);
    while t < 1.0 {
        h = h.min(1.0 - t);
        let (current, (next, err)) = match state {
            LogDerivative::Direct(y) => (y, dopri::step(direct, t, y, h)),
            LogDerivative::Inverted(z) => (z, dopri::step(inverted, t, z, h)),
        };
        let bound = config.atol + config.rtol * current.norm().max(next.norm());
        let ratio = err.norm() / bound;
        if ratio.is_finite() && next.re.is_finite() && next.im.is_finite() && ratio <= 1.0 {
            t = if h >= 1.0 - t { 1.0 } else { t + h };
            state = match state {
                LogDerivative::Direct(_) if next.norm() > 2.0 => LogDerivative::Inverted(next.inv()),
                LogDerivative::Inverted(_) if next.norm() > 2.0 => LogDerivative::Direct(next.inv()),
                LogDerivative::Direct(_) => LogDerivative::Direct(next),
                LogDerivative::Inverted(_) => LogDerivative::Inverted(next),
            };
            record(at(t), state);
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).min(5.0) };
            h *= grow;
        } else {
            let shrink = if ratio.is_finite() {
                (0.9 * ratio.powf(-0.2)).max(0.1)
            } else {
                0.1
            };
            h *= shrink;
        }
        if h < 1e-14 && t < 1.0 {
            let r = at(t);
            return Err(Error::StepUnderflow { re: r.re, im: r.im });
        }
    }
    Ok(state)
}

fn validate_inputs(l: f64, energy: Complex64, contour: &Contour) -> Result<()> {
    contour.validate()?;
    if !energy.re.is_finite() || !energy.im.is_finite() || !l.is_finite() {
        return Err(Error::InvalidSpec("energy and L must be finite".into()));
    }
    Ok(())
}

/// Log-derivative samples from the far end of one half of the contour to
/// the matching point, in integration order.
pub fn integrate_ode(
    potential: &EvenPolynomial,
    l: f64,
    energy: Complex64,
    contour: &Contour,
    direction: Direction,
) -> Result<Vec<RiccatiSample>> {
    integrate_ode_with(potential, l, energy, contour, direction, &ShootingConfig::default())
}

pub fn integrate_ode_with(
    potential: &EvenPolynomial,
    l: f64,
    energy: Complex64,
    contour: &Contour,
    direction: Direction,
    config: &ShootingConfig,
) -> Result<Vec<RiccatiSample>> {
    validate_inputs(l, energy, contour)?;
    let eq = Equation {
        potential,
        centrifugal: l * (l + 1.0),
        energy,
    };
    let path = match direction {
        Direction::FromRight => contour.right_path(),
        Direction::FromLeft => contour.left_path(),
    };
    let mut samples = Vec::new();
    integrate_path(&eq, &path, config, |r, log_derivative| {
        samples.push(RiccatiSample { r, log_derivative })
    })?;
    Ok(samples)
}

/// Normalised Wronskian of the two decaying solutions at `r = −iε`:
/// `(y_R − y_L) / sqrt((1 + |y_R|²)(1 + |y_L|²))`, evaluated in the inverted
/// chart when the log-derivatives are large. For real energies and a
/// PT-symmetric contour the value is real (the real part is returned) and
/// continuous in `E`; it vanishes exactly at eigenvalues.
pub fn wronskian_mismatch(potential: &EvenPolynomial, l: f64, energy: f64, contour: &Contour) -> Result<f64> {
    wronskian_mismatch_with(potential, l, energy, contour, &ShootingConfig::default())
}

pub fn wronskian_mismatch_with(
    potential: &EvenPolynomial,
    l: f64,
    energy: f64,
    contour: &Contour,
    config: &ShootingConfig,
) -> Result<f64> {
    let e = Complex64::new(energy, 0.0);
    validate_inputs(l, e, contour)?;
    let eq = Equation {
        potential,
        centrifugal: l * (l + 1.0),
        energy: e,
    };
    let right = integrate_path(&eq, &contour.right_path(), config, |_, _| {})?;
    let left = integrate_path(&eq, &contour.left_path(), config, |_, _| {})?;
    Ok(normalized_wronskian(right, left).re)
}

fn normalized_wronskian(right: LogDerivative, left: LogDerivative) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let small = match (right, left) {
        (LogDerivative::Direct(a), LogDerivative::Direct(b)) => a.norm().max(b.norm()) <= 1.0,
        (LogDerivative::Inverted(a), LogDerivative::Inverted(b)) => a.norm().min(b.norm()) > 1.0,
        (LogDerivative::Direct(a), LogDerivative::Inverted(b))
        | (LogDerivative::Inverted(b), LogDerivative::Direct(a)) => a.norm() * b.norm() <= 1.0,
    };
    if small {
        let (yr, yl) = (right.value(), left.value());
        (yr - yl) / ((one + yr.norm_sqr()) * (one + yl.norm_sqr())).sqrt()
    } else {
        let inv = |s: LogDerivative| match s {
            LogDerivative::Direct(y) => y.inv(),
            LogDerivative::Inverted(z) => z,
        };
        let (zr, zl) = (inv(right), inv(left));
        let prod = zr * zl;
        let phase = if prod.norm() == 0.0 {
            one
        } else {
            prod.conj() / prod.norm()
        };
        (zl - zr) * phase / ((one + zr.norm_sqr()) * (one + zl.norm_sqr())).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingResult {
    pub energy: f64,
    pub wronskian_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Secant iteration on [`wronskian_mismatch`] seeded at `e_guess`.
/// Failure to converge (or leaving the search radius) is reported in the
/// result rather than as an error; integration errors are propagated.
pub fn find_eigenvalue(potential: &EvenPolynomial, l: f64, e_guess: f64, contour: &Contour) -> Result<ShootingResult> {
    find_eigenvalue_with(potential, l, e_guess, contour, &ShootingConfig::default())
}

pub fn find_eigenvalue_with(
    potential: &EvenPolynomial,
    l: f64,
    e_guess: f64,
    contour: &Contour,
    config: &ShootingConfig,
) -> Result<ShootingResult> {
    let mismatch = |e: f64| wronskian_mismatch_with(potential, l, e, contour, config);
    let mut e0 = e_guess;
    let mut m0 = mismatch(e0)?;
    let mut e1 = e_guess + 1e-3 * (1.0 + e_guess.abs());
    let mut m1 = mismatch(e1)?;
    let mut best = if m1.abs() < m0.abs() { (e1, m1) } else { (e0, m0) };
    let mut iterations = 0;
    let mut strayed = false;
    while iterations < config.max_iterations && m1 != 0.0 && m1 != m0 {
        iterations += 1;
        let e2 = e1 - m1 * (e1 - e0) / (m1 - m0);
        if !e2.is_finite() || (e2 - e_guess).abs() > config.search_radius {
            strayed = true;
            break;
        }
        let m2 = mismatch(e2)?;
        if m2.abs() < best.1.abs() {
            best = (e2, m2);
        }
        let step = (e2 - e1).abs();
        (e0, m0, e1, m1) = (e1, m1, e2, m2);
        if step <= 1e-12 * (1.0 + e2.abs()) {
            break;
        }
    }
    let mut converged = !strayed && best.1.abs() <= config.tolerance;
    if !converged {
        if let Some((found, used)) = bracket_search(&mismatch, e_guess, config)? {
            iterations += used;
            if found.1.abs() < best.1.abs() || strayed {
                best = found;
            }
            converged = best.1.abs() <= config.tolerance;
        }
    }
    if converged {
        if let Some(refined) = refine_double_zero(&mismatch, best, config)? {
            best = refined;
        }
    }
    Ok(ShootingResult {
        energy: best.0,
        wronskian_residual: best.1.abs(),
        iterations,
        converged,
    })
}

/// Fallback when the secant iteration fails: sample the search interval,
/// take the sign change closest to the guess and refine it by false
/// position (Illinois variant). Returns the best point and the number of
/// refinement steps, or `None` without a sign change.
fn bracket_search(
    mismatch: &impl Fn(f64) -> Result<f64>,
    guess: f64,
    config: &ShootingConfig,
) -> Result<Option<((f64, f64), usize)>> {
    const SAMPLES: usize = 32;
    let radius = config.search_radius;
    let mut grid = Vec::with_capacity(SAMPLES + 1);
    for k in 0..=SAMPLES {
        let e = guess - radius + 2.0 * radius * k as f64 / SAMPLES as f64;
        grid.push((e, mismatch(e)?));
    }
    let Some(&[(mut a, mut fa), (mut b, mut fb)]) = grid
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum() || w[0].1 == 0.0)
        .min_by(|x, y| {
            let mid = |w: &[(f64, f64)]| (0.5 * (w[0].0 + w[1].0) - guess).abs();
            mid(x).total_cmp(&mid(y))
        })
    else {
        return Ok(None);
    };
    let mut best = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    let mut side = 0i8;
    let mut steps = 0;
    while steps < 4 * config.max_iterations && best.1 != 0.0 && (b - a).abs() > 1e-13 * (1.0 + a.abs()) {
        steps += 1;
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = mismatch(c)?;
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc.signum() == fb.signum() {
            (b, fb) = (c, fc);
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            (a, fa) = (c, fc);
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(Some((best, steps)))
}

/// At a double zero the mismatch touches zero without changing sign and the
/// secant iteration converges only linearly, to about the square root of
/// the integration noise. The zero of the (central-difference) derivative
/// is simple there, so it is located instead. Returns `None` for a simple
/// zero or when the refinement does not improve on `best`.
fn refine_double_zero(
    mismatch: &impl Fn(f64) -> Result<f64>,
    best: (f64, f64),
    config: &ShootingConfig,
) -> Result<Option<(f64, f64)>> {
    let (e, m) = best;
    let h = 1e-3 * (1.0 + e.abs());
    let (lo, hi) = (mismatch(e - h)?, mismatch(e + h)?);
    if lo.signum() != hi.signum() || lo.abs() <= m.abs() || hi.abs() <= m.abs() {
        return Ok(None);
    }
    // five-point stencil: a central difference is biased by the cubic term
    // by about as much as the accuracy being sought
    let slope = |x: f64| -> Result<f64> {
        let (a, b) = (mismatch(x + h)? - mismatch(x - h)?, mismatch(x + 2.0 * h)? - mismatch(x - 2.0 * h)?);
        Ok((8.0 * a - b) / (12.0 * h))
    };
    let (mut x0, mut s0) = (e - 0.5 * h, slope(e - 0.5 * h)?);
    let (mut x1, mut s1) = (e + 0.5 * h, slope(e + 0.5 * h)?);
    for _ in 0..config.max_iterations {
        if s1 == s0 {
            break;
        }
        let x2 = x1 - s1 * (x1 - x0) / (s1 - s0);
        if !x2.is_finite() || (x2 - e).abs() > 10.0 * h {
            return Ok(None);
        }
        let s2 = slope(x2)?;
        let step = (x2 - x1).abs();
        (x0, s0, x1, s1) = (x1, s1, x2, s2);
        if step <= 1e-12 * (1.0 + x2.abs()) || s2 == 0.0 {
            break;
        }
    }
    let m1 = mismatch(x1)?;
    Ok((m1.abs() <= config.tolerance).then_some((x1, m1)))
}

/// Relative residual `|−ψ'' + Q ψ| / (|ψ''| + |Q ψ|)` of a given function at
/// `r`, with `ψ''` from a five-point difference of step `h` along
/// `direction`.
pub fn ode_local_residual(
    potential: &EvenPolynomial,
    l: f64,
    energy: f64,
    psi: impl Fn(Complex64) -> Result<Complex64>,
    r: Complex64,
    h: f64,
    direction: Complex64,
) -> Result<f64> {
    let eq = Equation {
        potential,
        centrifugal: l * (l + 1.0),
        energy: Complex64::new(energy, 0.0),
    };
    let u = direction / direction.norm() * h;
    let f = |k: f64| psi(r + u * k);
    let second = (-f(2.0)? + f(1.0)? * 16.0 - f(0.0)? * 30.0 + f(-1.0)? * 16.0 - f(-2.0)?) / (u * u * 12.0);
    let q_psi = eq.q(r).0 * f(0.0)?;
    let denom = second.norm() + q_psi.norm();
    Ok(if denom == 0.0 { 0.0 } else { (q_psi - second).norm() / denom })
}
