use num_traits::Zero;

use super::{BiPoly, Poly, Var};
use crate::error::{Error, Result};
use crate::linalg::{determinant, DenseMatrix};
use crate::scalar::Scalar;

/// Sylvester matrix of two univariate coefficient lists, rows laid out in
/// ascending powers: `deg q` shifted copies of `p`, then `deg p` of `q`.
pub fn sylvester<T: Scalar>(p: &[T], q: &[T]) -> DenseMatrix<T> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut s = DenseMatrix::filled(size, size, T::zero());
    for i in 0..n {
        for (j, c) in p.iter().enumerate() {
            s.set(i, i + j, c.clone());
        }
    }
    for i in 0..m {
        for (j, c) in q.iter().enumerate() {
            s.set(n + i, i + j, c.clone());
        }
    }
    s
}

/// Resultant of `p` and `q` with respect to `eliminate`, as a polynomial in
/// the remaining indeterminate.
///
/// The Sylvester determinant is sampled at `deg + 1` integer nodes and
/// recovered by Newton interpolation; with rational coefficients every step
/// is exact.
pub fn resultant<T: Scalar>(p: &BiPoly<T>, q: &BiPoly<T>, eliminate: Var) -> Result<Poly<T>> {
    let pc = p.coefficients_in(eliminate);
    let qc = q.coefficients_in(eliminate);
    let m = pc.len().saturating_sub(1);
    let n = qc.len().saturating_sub(1);
    if m == 0 || n == 0 {
        return Err(Error::DegenerateResultant(format!(
            "both polynomials need positive degree in {eliminate:?} (got {m} and {n})"
        )));
    }
    let max_deg = |c: &[Poly<T>]| c.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let bound = n * max_deg(&pc) + m * max_deg(&qc);

    let half = (bound / 2) as i64;
    let nodes: Vec<T> = (0..=bound as i64).map(|k| T::from_i64(k - half)).collect();
    let values: Vec<T> = nodes
        .iter()
        .map(|x| {
            let pv: Vec<T> = pc.iter().map(|c| c.eval(x)).collect();
            let qv: Vec<T> = qc.iter().map(|c| c.eval(x)).collect();
            determinant(&sylvester(&pv, &qv))
        })
        .collect();
    Ok(interpolate(&nodes, &values))
}

/// Newton divided-difference interpolation through `(nodes[k], values[k])`.
pub fn interpolate<T: Scalar>(nodes: &[T], values: &[T]) -> Poly<T> {
    let n = nodes.len();
    let mut c = values.to_vec();
    for level in 1..n {
        for k in (level..n).rev() {
            let num = c[k].clone() - c[k - 1].clone();
            let den = nodes[k].clone() - nodes[k - level].clone();
            c[k] = num / den;
        }
    }
    let mut out = Poly::zero();
    for k in (0..n).rev() {
        let factor = Poly::new(vec![-nodes[k].clone(), T::one()]);
        out = out * factor + Poly::constant(c[k].clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    type Q = BigRational;

    fn e() -> BiPoly<Q> {
        BiPoly::var(Var::E)
    }

    fn d() -> BiPoly<Q> {
        BiPoly::var(Var::D)
    }

    fn c(v: i64) -> BiPoly<Q> {
        BiPoly::constant(rational(v, 1))
    }

    #[test]
    fn linear_substitution_case() {
        // res_d(E^2 - 4d, d - 1) = E^2 - 4
        let r = resultant(&(e() * e() - c(4) * d()), &(d() - c(1)), Var::D).unwrap();
        assert_eq!(r, Poly::new(vec![rational(-4, 1), rational(0, 1), rational(1, 1)]));
    }

    #[test]
    fn eliminating_the_energy() {
        // with E playing y and d playing x: res_y(x - y, y - 2) = x - 2
        let r = resultant(&(d() - e()), &(e() - c(2)), Var::E).unwrap();
        assert_eq!(r, Poly::new(vec![rational(-2, 1), rational(1, 1)]));
    }

    #[test]
    fn constant_in_eliminated_variable_is_degenerate() {
        let err = resultant(&(e() + c(1)), &(d() - c(1)), Var::D).unwrap_err();
        assert!(matches!(err, Error::DegenerateResultant(_)));
    }

    #[test]
    fn common_factor_gives_zero_resultant() {
        let f = e() - d();
        let r = resultant(&(f.clone() * (d() + c(3))), &(f * (e() + c(1))), Var::D).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Poly::new(vec![rational(1, 3), rational(-2, 1), rational(0, 1), rational(5, 7)]);
        let nodes: Vec<Q> = (-2..=2).map(|k| rational(k, 1)).collect();
        let values: Vec<Q> = nodes.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&nodes, &values), p);
    }
}
