//! The three solution routes: Sturmian couplings at `M = 1`, energy
//! multiplets at `M = 2`, and the coupled `(E, d)` problem for `M >= 2`.
//!
//! Secular polynomials are expanded exactly over the rationals; their roots
//! are located in floating point, polished against the exact polynomial,
//! and accepted only if the full `(N+1) x N` recurrence system is
//! numerically rank deficient there.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{hessenberg_eigenvalues, null_space, svd_right, DenseMatrix};
use crate::model::{ModelSpec, Multiplet, MultipletEntry};
use crate::polynomial::{
    char_poly, merge_split_roots, polish_real_root, resultant, roots_with, BiPoly, Poly, RootSet,
    Var, CLUSTER_RTOL, REAL_RTOL,
};
use crate::recurrence::{full_system, main_matrix, small_matrix};
use crate::scalar::{exact, Scalar};
use crate::verify::{recurrence_residual, RESIDUAL_TOL};

/// Numerical tolerances shared by the solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// A root is real if `|Im z| <= real * (1 + |z|)`.
    pub real: f64,
    /// Roots closer than `cluster * (1 + |z|)` are merged.
    pub cluster: f64,
    /// Rank deficiency threshold on `σ_min / σ_max` of the full system.
    pub rank: f64,
    /// Acceptance threshold for the relative recurrence residual.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            real: REAL_RTOL,
            cluster: CLUSTER_RTOL,
            rank: 1e-9,
            residual: RESIDUAL_TOL,
        }
    }
}

/// `F = d − β² + 2Nα`.
pub fn shifted_coupling(d: f64, spec: &ModelSpec<f64>) -> f64 {
    spec.shifted_coupling(&d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SturmianResult {
    /// Real eigen-couplings, ascending, repeated according to multiplicity.
    pub d_values: Vec<f64>,
    pub f_values: Vec<f64>,
    /// One coefficient vector per entry of `d_values`.
    pub h_vectors: Vec<Vec<f64>>,
    pub char_poly_in_f: Poly<f64>,
}

impl SturmianResult {
    pub fn multiplet(&self, spec: &ModelSpec<f64>, tol: &Tolerances) -> Multiplet {
        Multiplet::new(
            self.d_values
                .iter()
                .zip(&self.h_vectors)
                .map(|(&d, h)| entry(spec, 0.0, d, h.clone(), tol))
                .collect(),
        )
    }
}

fn entry(spec: &ModelSpec<f64>, energy: f64, d: f64, h: Vec<f64>, tol: &Tolerances) -> MultipletEntry {
    let residual = recurrence_residual(spec, energy, d, &h);
    MultipletEntry {
        energy,
        quadratic_coupling: d,
        validated: residual <= tol.residual,
        recurrence_residual: residual,
        h,
    }
}

fn require_mode(spec_m: u32, ok: bool, operation: &'static str, required: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::WrongMode {
            operation,
            required,
            actual: spec_m,
        })
    }
}

/// `det(main − F·I)` at `E = 0` in the shifted coupling `F`, i.e. the
/// secular polynomial with `d = F + β² − 2Nα`. Exact for rational specs.
pub fn f_polynomial<T: Scalar>(spec: &ModelSpec<T>) -> Result<Poly<T>> {
    require_mode(spec.big_m, spec.big_m == 1, "f_polynomial", "1")?;
    let offset = spec.beta.clone() * spec.beta.clone()
        - T::from_i64(2 * spec.n_states as i64) * spec.alpha.clone();
    let coupling = Poly::x() + Poly::constant(offset);
    Ok(main_matrix(spec, &Poly::zero(), &coupling).determinant())
}

/// Sturmian problem: `E = 0`, the couplings `d` are the eigenvalues of the
/// main matrix.
pub fn solve_sturmian(spec: &ModelSpec<f64>) -> Result<SturmianResult> {
    solve_sturmian_with(spec, &Tolerances::default())
}

pub fn solve_sturmian_with(spec: &ModelSpec<f64>, tol: &Tolerances) -> Result<SturmianResult> {
    require_mode(spec.big_m, spec.big_m == 1, "solve_sturmian", "1")?;
    spec.validate()?;
    let exact_spec = spec.exact();
    let zero = BigRational::zero();
    let char_exact = char_poly(&main_matrix(&exact_spec, &zero, &zero));

    let band = main_matrix(spec, &0.0, &0.0);
    let eigenvalues = hessenberg_eigenvalues(&band.hessenberg_dense())?;
    let mut set = RootSet::from_values(&eigenvalues, tol.cluster);
    merge_split_roots(&char_exact.to_f64(), &mut set, tol.cluster);

    let mut d_values = Vec::new();
    let mut h_vectors = Vec::new();
    for root in &set.roots {
        if root.value.im.abs() > tol.real * (1.0 + root.value.norm()) {
            continue;
        }
        let d = polish_real_root(&char_exact, root.value.re, root.multiplicity);
        let h = best_null_vector(&full_system(spec, &0.0, &d), tol.rank);
        for _ in 0..root.multiplicity {
            d_values.push(d);
            h_vectors.push(h.clone());
        }
    }
    let mut order: Vec<usize> = (0..d_values.len()).collect();
    order.sort_by(|&a, &b| d_values[a].total_cmp(&d_values[b]));
    let d_values: Vec<f64> = order.iter().map(|&i| d_values[i]).collect();
    let h_vectors: Vec<Vec<f64>> = order.iter().map(|&i| h_vectors[i].clone()).collect();

    Ok(SturmianResult {
        f_values: d_values.iter().map(|d| spec.shifted_coupling(d)).collect(),
        d_values,
        h_vectors,
        char_poly_in_f: f_polynomial(&exact_spec)?.to_f64(),
    })
}

/// Normalised null vector: the first entry above `rtol` (relative to the
/// largest) is set to one.
pub fn null_vector(m: &DenseMatrix<f64>, rtol: f64) -> Result<Vec<f64>> {
    let (basis, ratio) = null_space(m, rtol);
    if ratio > rtol || basis.is_empty() {
        return Err(Error::NotRankDeficient { ratio });
    }
    Ok(basis.into_iter().next().expect("non-empty basis"))
}

/// Null vector when one exists, otherwise the right singular vector of the
/// smallest singular value (normalised the same way) so that validation can
/// flag it.
fn best_null_vector(m: &DenseMatrix<f64>, rtol: f64) -> Vec<f64> {
    if let Ok(h) = null_vector(m, rtol) {
        return h;
    }
    let (_, vecs) = svd_right(m);
    let mut v = vecs.last().cloned().unwrap_or_default();
    let scale = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    if let Some(pivot) = v.iter().copied().find(|x| x.abs() > rtol * scale) {
        v.iter_mut().for_each(|x| *x /= pivot);
    }
    v
}

/// Distinct real roots of an exact polynomial with their multiplicities,
/// each polished to the nearest double.
fn real_roots_exact(p: &Poly<BigRational>, tol: &Tolerances) -> Result<Vec<(f64, usize)>> {
    match p.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Ok(Vec::new()),
        _ => {}
    }
    let set = roots_with(&p.to_f64(), tol.cluster)?;
    let mut out: Vec<(f64, usize)> = Vec::new();
    for root in &set.roots {
        if root.value.im.abs() > tol.real * (1.0 + root.value.norm()) {
            continue;
        }
        let x = polish_real_root(p, root.value.re, root.multiplicity);
        match out
            .iter_mut()
            .find(|(y, _)| (x - *y).abs() <= tol.cluster * (1.0 + x.abs()))
        {
            Some((_, m)) => *m += root.multiplicity,
            None => out.push((x, root.multiplicity)),
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Every validated null vector of the full system at `(E, d)` together with
/// `σ_min / σ_max`; empty if the system has full rank.
fn rank_test(spec: &ModelSpec<f64>, energy: f64, d: f64, tol: &Tolerances) -> (Vec<Vec<f64>>, f64) {
    let (basis, ratio) = null_space(&full_system(spec, &energy, &d), tol.rank);
    if ratio > tol.rank {
        return (Vec::new(), ratio);
    }
    (basis, ratio)
}

/// `M = 2`: the small determinant forces `d = E²/4`; the remaining main
/// determinant is a polynomial of degree `2N` in `E`.
pub fn solve_energies_m2(spec: &ModelSpec<f64>) -> Result<Multiplet> {
    solve_energies_m2_with(spec, &Tolerances::default())
}

pub fn solve_energies_m2_with(spec: &ModelSpec<f64>, tol: &Tolerances) -> Result<Multiplet> {
    require_mode(spec.big_m, spec.big_m == 2, "solve_energies_m2", "2")?;
    spec.validate()?;
    let det = energy_polynomial_m2(&spec.exact())?;
    let mut entries = Vec::new();
    for (energy, _) in real_roots_exact(&det, tol)? {
        let d = energy * energy / 4.0;
        let (basis, _) = rank_test(spec, energy, d, tol);
        entries.extend(basis.into_iter().map(|h| entry(spec, energy, d, h, tol)));
    }
    Ok(Multiplet::new(entries))
}

/// Main secular determinant at `M = 2` with `d = E²/4` substituted, as an
/// exact polynomial in `E`.
pub fn energy_polynomial_m2<T: Scalar>(spec: &ModelSpec<T>) -> Result<Poly<T>> {
    require_mode(spec.big_m, spec.big_m == 2, "energy_polynomial_m2", "2")?;
    let coupling = Poly::monomial(T::from_ratio(1, 4), 2);
    Ok(main_matrix(spec, &Poly::x(), &coupling).determinant())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledPair {
    pub energy: f64,
    pub coupling: f64,
    pub h: Vec<f64>,
    /// `σ_min / σ_max` of the full recurrence system.
    pub smallest_singular_value: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoupledSolution {
    pub pairs: Vec<CoupledPair>,
}

impl CoupledSolution {
    pub fn multiplet(&self, spec: &ModelSpec<f64>, tol: &Tolerances) -> Multiplet {
        Multiplet::new(
            self.pairs
                .iter()
                .map(|p| entry(spec, p.energy, p.coupling, p.h.clone(), tol))
                .collect(),
        )
    }
}

/// Small and main secular determinants as exact polynomials in `(E, d)`.
pub fn secular_determinants(spec: &ModelSpec<BigRational>) -> Result<(BiPoly<BigRational>, BiPoly<BigRational>)> {
    let e = BiPoly::var(Var::E);
    let d = BiPoly::var(Var::D);
    let small = small_matrix(spec, &e, &d)?.determinant();
    let main = main_matrix(spec, &e, &d).determinant();
    Ok((small, main))
}

/// Both determinants vanish and the full system is rank deficient.
pub fn solve_coupled(spec: &ModelSpec<f64>) -> Result<CoupledSolution> {
    solve_coupled_with(spec, &Tolerances::default())
}

pub fn solve_coupled_with(spec: &ModelSpec<f64>, tol: &Tolerances) -> Result<CoupledSolution> {
    require_mode(spec.big_m, spec.big_m >= 2, "solve_coupled", ">= 2")?;
    spec.validate()?;
    let exact_spec = spec.exact();
    let (small, main) = secular_determinants(&exact_spec)?;
    let eliminated = resultant(&small, &main, Var::D)?;
    if eliminated.is_zero() {
        return Err(Error::DegenerateResultant(
            "the two secular determinants share a factor".into(),
        ));
    }

    let mut pairs: Vec<CoupledPair> = Vec::new();
    for (e0, _) in real_roots_exact(&eliminated, tol)? {
        let in_d = small.substitute(Var::E, &exact(e0));
        let couplings = match real_roots_exact(&in_d, tol) {
            Ok(ds) => ds,
            // the small determinant does not constrain d here
            Err(Error::ZeroPolynomial) => real_roots_exact(&main.substitute(Var::E, &exact(e0)), tol)
                .unwrap_or_default(),
            Err(e) => return Err(e),
        };
        for (d0, _) in couplings {
            let (energy, d) = newton_2d(&small, &main, e0, d0);
            let (basis, ratio) = rank_test(spec, energy, d, tol);
            for h in basis {
                if recurrence_residual(spec, energy, d, &h) > tol.residual {
                    continue;
                }
                let duplicate = pairs.iter().any(|p| {
                    (p.energy - energy).abs() <= 1e-9 * (1.0 + energy.abs())
                        && (p.coupling - d).abs() <= 1e-9 * (1.0 + d.abs())
                        && p.h.iter().zip(&h).all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + b.abs()))
                });
                if !duplicate {
                    pairs.push(CoupledPair {
                        energy,
                        coupling: d,
                        h,
                        smallest_singular_value: ratio,
                    });
                }
            }
        }
    }
    pairs.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then(a.coupling.total_cmp(&b.coupling))
            .then_with(|| {
                a.h.iter()
                    .zip(&b.h)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    Ok(CoupledSolution { pairs })
}

/// Newton's method on `S(E, d) = P(E, d) = 0`, with both polynomials and
/// their gradients evaluated exactly. Steps that do not reduce the scaled
/// residual are rejected, as are singular Jacobians.
fn newton_2d(s: &BiPoly<BigRational>, p: &BiPoly<BigRational>, e0: f64, d0: f64) -> (f64, f64) {
    let (s_e, s_d) = (s.partial(Var::E), s.partial(Var::D));
    let (p_e, p_d) = (p.partial(Var::E), p.partial(Var::D));
    let s_scale = s.max_abs_coeff().max(f64::MIN_POSITIVE);
    let p_scale = p.max_abs_coeff().max(f64::MIN_POSITIVE);
    let size = |e: &BigRational, d: &BigRational| {
        s.eval(e, d).abs().to_f64() / s_scale + p.eval(e, d).abs().to_f64() / p_scale
    };
    let (mut e, mut d) = (e0, d0);
    let mut current = size(&exact(e), &exact(d));
    for _ in 0..30 {
        if current == 0.0 {
            break;
        }
        let (eq, dq) = (exact(e), exact(d));
        let f1 = s.eval(&eq, &dq).to_f64();
        let f2 = p.eval(&eq, &dq).to_f64();
        let (a, b) = (s_e.eval(&eq, &dq).to_f64(), s_d.eval(&eq, &dq).to_f64());
        let (c, g) = (p_e.eval(&eq, &dq).to_f64(), p_d.eval(&eq, &dq).to_f64());
        let det = a * g - b * c;
        let jac_scale = (a.abs() + b.abs()) * (c.abs() + g.abs());
        if det == 0.0 || det.abs() <= 1e-12 * jac_scale || !det.is_finite() {
            break;
        }
        let ne = e - (g * f1 - b * f2) / det;
        let nd = d - (a * f2 - c * f1) / det;
        if !ne.is_finite() || !nd.is_finite() || (ne == e && nd == d) {
            break;
        }
        let next = size(&exact(ne), &exact(nd));
        if next >= current {
            break;
        }
        e = ne;
        d = nd;
        current = next;
    }
    (e, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{det_bipoly, real_filter, roots};
    use crate::scalar::rational;

    fn spec(alpha: f64, beta: f64, m: u32, n: u32) -> ModelSpec<f64> {
        ModelSpec::new(alpha, beta, m, n).unwrap()
    }

    #[test]
    fn sturmian_single_state() {
        let r = solve_sturmian(&spec(1.0, 2.0, 1, 1)).unwrap();
        assert_eq!(r.d_values, vec![2.0]);
        assert_eq!(r.f_values, vec![0.0]);
        assert_eq!(r.h_vectors, vec![vec![1.0]]);
    }

    #[test]
    fn sturmian_doublet() {
        let s = spec(2.0, 0.0, 1, 2);
        let r = solve_sturmian(&s).unwrap();
        assert_eq!(r.d_values, vec![-12.0, -4.0]);
        assert_eq!(r.f_values, vec![-4.0, 4.0]);
        for f in &r.f_values {
            assert_eq!(f * f, 16.0);
        }
        assert_eq!(r.h_vectors[1], vec![1.0, 0.5]);
        let m = r.multiplet(&s, &Tolerances::default());
        assert!(m.entries.iter().all(|e| e.validated));
    }

    #[test]
    fn sturmian_triplet_at_the_origin() {
        let r = solve_sturmian(&spec(0.0, 0.0, 1, 3)).unwrap();
        assert_eq!(r.d_values.len(), 1);
        let want = 256f64.cbrt();
        assert!((r.d_values[0] - want).abs() < 1e-12);
        assert!((r.f_values[0] - 6.349604).abs() < 1e-6);
        assert!(r.char_poly_in_f.eval(&r.f_values[0]).abs() < 1e-9);
    }

    #[test]
    fn sturmian_rejects_other_modes() {
        assert!(matches!(
            solve_sturmian(&spec(0.0, 0.0, 2, 3)),
            Err(Error::WrongMode { actual: 2, .. })
        ));
    }

    #[test]
    fn f_polynomial_low_orders() {
        let (a, b) = (rational(3, 2), rational(-2, 7));
        let s1 = ModelSpec::new(a.clone(), b.clone(), 1, 1).unwrap();
        assert_eq!(f_polynomial(&s1).unwrap(), Poly::new(vec![rational(0, 1), rational(-1, 1)]));
        let s2 = ModelSpec::new(a.clone(), b.clone(), 1, 2).unwrap();
        let want = Poly::new(vec![
            rational(16, 1) * b.clone() - rational(4, 1) * a.clone() * a.clone(),
            rational(0, 1),
            rational(1, 1),
        ]);
        assert_eq!(f_polynomial(&s2).unwrap(), want);
        let s4 = ModelSpec::new(a.clone(), b.clone(), 1, 4).unwrap();
        let a2 = a.clone() * a.clone();
        let want = Poly::new(vec![
            rational(144, 1) * a2.clone() * a2.clone() - rational(1152, 1) * b.clone() * a2.clone()
                + rational(2304, 1) * b.clone() * b.clone(),
            rational(-1536, 1),
            rational(160, 1) * b.clone() - rational(40, 1) * a2,
            rational(0, 1),
            rational(1, 1),
        ]);
        assert_eq!(f_polynomial(&s4).unwrap(), want);
    }

    #[test]
    fn energies_at_the_origin() {
        let m = solve_energies_m2(&spec(0.0, 0.0, 2, 3)).unwrap();
        let energies: Vec<f64> = m.entries.iter().map(|e| e.energy).collect();
        assert_eq!(energies.len(), 2);
        assert_eq!(energies[0], 0.0);
        assert!((energies[1] - 192f64.cbrt()).abs() < 1e-12);
        assert_eq!(m.entries[0].h, vec![0.0, 0.0, 1.0]);
        for e in &m.entries {
            assert!(e.validated);
            assert_eq!(e.quadratic_coupling, e.energy * e.energy / 4.0);
        }
    }

    #[test]
    fn energies_single_state() {
        for (alpha, beta) in [(0.3, 1.5), (-2.0, -0.75)] {
            let s = spec(alpha, beta, 2, 1);
            // the 1x1 determinant beta^2 - E^2/4 vanishes at both +-2 beta ...
            let det = energy_polynomial_m2(&s.exact()).unwrap().to_f64();
            assert_eq!(det.eval(&(2.0 * beta)), 0.0);
            assert_eq!(det.eval(&(-2.0 * beta)), 0.0);
            // ... but row n = 0 reads (E + 2 beta) h_0 = 0, so only -2 beta
            // carries a nonzero h
            let m = solve_energies_m2(&s).unwrap();
            let energies: Vec<f64> = m.entries.iter().map(|e| e.energy).collect();
            assert_eq!(energies, vec![-2.0 * beta]);
            assert_eq!(m.entries[0].quadratic_coupling, beta * beta);
        }
    }

    #[test]
    fn small_determinant_and_energy_polynomial() {
        let s = ModelSpec::new(rational(2, 3), rational(5, 3), 2, 3).unwrap();
        let e = BiPoly::var(Var::E);
        let d = BiPoly::var(Var::D);
        let small = det_bipoly(&small_matrix(&s, &e, &d).unwrap());
        assert_eq!(small, e.clone() * e - BiPoly::constant(rational(4, 1)) * d);

        let zero = ModelSpec::new(rational(0, 1), rational(0, 1), 2, 3).unwrap();
        let p = energy_polynomial_m2(&zero).unwrap();
        let mut want = vec![rational(0, 1); 7];
        want[3] = rational(3, 1);
        want[6] = rational(-1, 64);
        assert_eq!(p, Poly::new(want));
    }

    #[test]
    fn quintic_roots_are_determinant_roots() {
        let rs = roots(&Poly::new(vec![0.0, 0.0, 192.0, 0.0, 0.0, -1.0])).unwrap();
        let real = real_filter(&rs, REAL_RTOL);
        assert_eq!(real.len(), 3);
        assert_eq!(&real[..2], &[0.0, 0.0]);
        assert!((real[2] - 5.768998).abs() < 1e-6);
    }

    #[test]
    fn coupled_agrees_with_energies_at_m2() {
        let s = spec(0.0, 0.0, 2, 3);
        let c = solve_coupled(&s).unwrap();
        let got: Vec<(f64, f64)> = c.pairs.iter().map(|p| (p.energy, p.coupling)).collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0], (0.0, 0.0));
        let e = 192f64.cbrt();
        assert!((got[1].0 - e).abs() < 1e-12 && (got[1].1 - e * e / 4.0).abs() < 1e-11);
    }

    #[test]
    fn coupled_m3_origin() {
        let c = solve_coupled(&spec(0.0, 0.0, 3, 3)).unwrap();
        let got: Vec<(f64, f64)> = c.pairs.iter().map(|p| (p.energy, p.coupling)).collect();
        assert_eq!(got.len(), 2, "{got:?}");
        assert!((got[0].0 + 5.9634570).abs() < 1e-6 && (got[0].1 + 3.1433388).abs() < 1e-6);
        assert!((got[1].0 - 10.7320301).abs() < 1e-6 && (got[1].1 - 10.1802579).abs() < 1e-6);
        for p in &c.pairs {
            assert!(p.smallest_singular_value < 1e-12);
        }
    }

    #[test]
    fn coupled_mode_checks() {
        assert!(matches!(solve_coupled(&spec(0.0, 0.0, 1, 3)), Err(Error::WrongMode { .. })));
        assert!(matches!(solve_coupled(&spec(0.0, 0.0, 5, 2)), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn null_vector_examples() {
        let m = DenseMatrix::from_rows(vec![vec![0.0, 0.0], vec![4.0, -8.0]]);
        assert_eq!(null_vector(&m, 1e-9).unwrap(), vec![1.0, 0.5]);
        let id = DenseMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(null_vector(&id, 1e-9), Err(Error::NotRankDeficient { .. })));
        let f = full_system(&spec(0.0, 0.0, 2, 3), &0.0, &0.0);
        assert_eq!(null_vector(&f, 1e-9).unwrap(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn shifted_coupling_examples() {
        let (alpha, beta) = (0.75, 1.5);
        assert_eq!(shifted_coupling(beta * beta - 2.0 * alpha, &spec(alpha, beta, 1, 1)), 0.0);
        assert_eq!(shifted_coupling(0.0, &spec(0.0, 0.0, 1, 3)), 0.0);
        assert_eq!(shifted_coupling(-4.0, &spec(2.0, 0.0, 1, 2)), 4.0);
    }
}
