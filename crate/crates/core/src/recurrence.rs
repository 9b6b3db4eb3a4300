//! Four-term recurrence `A_n h_{n+1} + B_n h_n + C_n h_{n-1} + D_n h_{n-2} = 0`
//! for the coefficients of the polynomial factor, and the banded secular
//! matrices assembled from it.
//!
//! Every constructor is generic over the entry ring: plain numbers, or
//! polynomials in the energy `E` and coupling `d` when those are symbolic.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::model::ModelSpec;
use crate::polynomial::{BiPoly, Var};
use crate::scalar::{Algebra, Ring, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceCoeffs<R> {
    pub a: R,
    pub b: R,
    pub c: R,
    pub d: R,
}

/// `A_n = (2n+2)(2n+2-2M)`, `B_n = E - beta(4n+2-2M)`,
/// `C_n = beta^2 - d - alpha(4n-2M)`, `D_n = 4(N+1-n)`.
///
/// Defined for `-1 <= n <= N + 1`; the ends carry the structural zeros
/// `A_{-1} = 0` and `D_{N+1} = 0`.
pub fn coeffs<T: Scalar, R: Algebra<T>>(
    spec: &ModelSpec<T>,
    n: i64,
    energy: &R,
    coupling: &R,
) -> Result<RecurrenceCoeffs<R>> {
    let big_n = spec.n_states as i64;
    if n < -1 || n > big_n + 1 {
        return Err(Error::IndexOutOfRange { n, max: big_n + 1 });
    }
    Ok(coeffs_unchecked(spec, n, energy, coupling))
}

fn coeffs_unchecked<T: Scalar, R: Algebra<T>>(
    spec: &ModelSpec<T>,
    n: i64,
    energy: &R,
    coupling: &R,
) -> RecurrenceCoeffs<R> {
    let m = spec.big_m as i64;
    let big_n = spec.n_states as i64;
    let alpha = spec.alpha.clone();
    let beta = spec.beta.clone();
    RecurrenceCoeffs {
        a: R::from_int((2 * n + 2) * (2 * n + 2 - 2 * m)),
        b: energy.clone() - R::from_scalar(beta.clone() * T::from_i64(4 * n + 2 - 2 * m)),
        c: R::from_scalar(beta.clone() * beta - alpha * T::from_i64(4 * n - 2 * m))
            - coupling.clone(),
        d: R::from_int(4 * (big_n + 1 - n)),
    }
}

/// Symbolic energy `E`.
pub fn energy_symbol<T: Scalar>() -> BiPoly<T> {
    BiPoly::var(Var::E)
}

/// Symbolic coupling `d`.
pub fn coupling_symbol<T: Scalar>() -> BiPoly<T> {
    BiPoly::var(Var::D)
}

/// A square matrix with one subdiagonal and two superdiagonals (upper
/// Hessenberg with lower bandwidth one), or the transpose of one.
///
/// The bands always describe the upper Hessenberg form `H`; when
/// `transposed` is set the matrix represented is `H^T`. Determinants and
/// eigenvalues do not depend on the orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadDiagonalMatrix<R> {
    size: usize,
    transposed: bool,
    /// `H[i+1][i]`
    sub: Vec<R>,
    /// `H[i][i]`
    diag: Vec<R>,
    /// `H[i][i+1]`
    sup1: Vec<R>,
    /// `H[i][i+2]`
    sup2: Vec<R>,
}

impl<R: Ring> QuadDiagonalMatrix<R> {
    pub fn from_bands(sub: Vec<R>, diag: Vec<R>, sup1: Vec<R>, sup2: Vec<R>) -> Self {
        let size = diag.len();
        assert!(size >= 1, "empty band matrix");
        assert_eq!(sub.len(), size - 1);
        assert_eq!(sup1.len(), size - 1);
        assert_eq!(sup2.len(), size.saturating_sub(2));
        QuadDiagonalMatrix {
            size,
            transposed: false,
            sub,
            diag,
            sup1,
            sup2,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    pub fn sub(&self) -> &[R] {
        &self.sub
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }

    pub fn sup1(&self) -> &[R] {
        &self.sup1
    }

    pub fn sup2(&self) -> &[R] {
        &self.sup2
    }

    pub fn transpose(mut self) -> Self {
        self.transposed = !self.transposed;
        self
    }

    /// Entry of the upper Hessenberg form.
    fn hessenberg_entry(&self, i: usize, j: usize) -> R {
        if i == j {
            self.diag[i].clone()
        } else if i == j + 1 {
            self.sub[j].clone()
        } else if j == i + 1 {
            self.sup1[i].clone()
        } else if j == i + 2 {
            self.sup2[i].clone()
        } else {
            R::zero()
        }
    }

    pub fn get(&self, i: usize, j: usize) -> R {
        if self.transposed {
            self.hessenberg_entry(j, i)
        } else {
            self.hessenberg_entry(i, j)
        }
    }

    pub fn dense(&self) -> DenseMatrix<R> {
        let n = self.size;
        DenseMatrix::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| self.get(i, j)).collect())
                .collect(),
        )
    }

    /// Upper Hessenberg form regardless of orientation.
    pub fn hessenberg_dense(&self) -> DenseMatrix<R> {
        let n = self.size;
        DenseMatrix::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| self.hessenberg_entry(i, j)).collect())
                .collect(),
        )
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&R) -> U) -> QuadDiagonalMatrix<U> {
        QuadDiagonalMatrix {
            size: self.size,
            transposed: self.transposed,
            sub: self.sub.iter().map(&f).collect(),
            diag: self.diag.iter().map(&f).collect(),
            sup1: self.sup1.iter().map(&f).collect(),
            sup2: self.sup2.iter().map(&f).collect(),
        }
    }

    pub fn with_diagonal(mut self, f: impl Fn(R) -> R) -> Self {
        self.diag = self.diag.into_iter().map(f).collect();
        self
    }

    /// Determinant by the leading-minor recurrence
    /// `P_k = H_kk P_{k-1} - H_{k-1,k} H_{k,k-1} P_{k-2}
    ///        + H_{k-2,k} H_{k-1,k-2} H_{k,k-1} P_{k-3}`.
    /// Division free, so it works over any commutative ring.
    pub fn determinant(&self) -> R {
        let n = self.size;
        let mut p: Vec<R> = Vec::with_capacity(n + 1);
        p.push(R::one());
        for k in 1..=n {
            let mut val = self.diag[k - 1].clone() * p[k - 1].clone();
            if k >= 2 {
                val = val
                    - self.sup1[k - 2].clone() * self.sub[k - 2].clone() * p[k - 2].clone();
            }
            if k >= 3 {
                val = val
                    + self.sup2[k - 3].clone()
                        * self.sub[k - 3].clone()
                        * self.sub[k - 2].clone()
                        * p[k - 3].clone();
            }
            p.push(val);
        }
        p.pop().expect("non-empty")
    }
}

/// The `N x N` secular matrix over `h_0..h_{N-1}`: row `n = 1..N` holds
/// `D_n, C_n, B_n, A_n` in columns `n-2, n-1, n, n+1`.
///
/// With `coupling = 0` and `E = 0` at `M = 1` its eigenvalues are the
/// Sturmian couplings `d`.
pub fn main_matrix<T: Scalar, R: Algebra<T>>(
    spec: &ModelSpec<T>,
    energy: &R,
    coupling: &R,
) -> QuadDiagonalMatrix<R> {
    let n = spec.n_states as usize;
    let rows: Vec<RecurrenceCoeffs<R>> = (1..=n as i64)
        .map(|k| coeffs_unchecked(spec, k, energy, coupling))
        .collect();
    let diag = rows.iter().map(|r| r.c.clone()).collect();
    let sup1 = rows.iter().take(n - 1).map(|r| r.b.clone()).collect();
    let sup2 = rows.iter().take(n.saturating_sub(2)).map(|r| r.a.clone()).collect();
    let sub = rows.iter().skip(1).map(|r| r.d.clone()).collect();
    QuadDiagonalMatrix::from_bands(sub, diag, sup1, sup2)
}

/// The `M x M` preconditioning matrix: rows `n = 0..M-1` over
/// `h_0..h_{M-1}`, closed because `A_{M-1} = 0`.
///
/// Its band shape is the transpose of [`main_matrix`]'s. Requires
/// `M <= N + 1` so that every row is a genuine recurrence row.
pub fn small_matrix<T: Scalar, R: Algebra<T>>(
    spec: &ModelSpec<T>,
    energy: &R,
    coupling: &R,
) -> Result<QuadDiagonalMatrix<R>> {
    let m = spec.big_m as usize;
    if m > spec.n_states as usize + 1 {
        return Err(Error::InvalidSpec(format!(
            "the preconditioning block needs M <= N + 1 (M = {}, N = {})",
            spec.big_m, spec.n_states
        )));
    }
    let rows: Vec<RecurrenceCoeffs<R>> = (0..m as i64)
        .map(|k| coeffs_unchecked(spec, k, energy, coupling))
        .collect();
    // transpose: H[i][i] = B_i, H[i+1][i] = A_i, H[i][i+1] = C_{i+1}, H[i][i+2] = D_{i+2}
    let diag = rows.iter().map(|r| r.b.clone()).collect();
    let sub = rows.iter().take(m - 1).map(|r| r.a.clone()).collect();
    let sup1 = rows.iter().skip(1).map(|r| r.c.clone()).collect();
    let sup2 = rows.iter().skip(2).map(|r| r.d.clone()).collect();
    Ok(QuadDiagonalMatrix::from_bands(sub, diag, sup1, sup2).transpose())
}

/// All `N + 1` recurrence rows `n = 0..N` as an `(N+1) x N` matrix acting on
/// `(h_0, ..., h_{N-1})`. A genuine solution is a null vector.
pub fn full_system<T: Scalar, R: Algebra<T>>(
    spec: &ModelSpec<T>,
    energy: &R,
    coupling: &R,
) -> DenseMatrix<R> {
    let n = spec.n_states as usize;
    let mut m = DenseMatrix::filled(n + 1, n, R::zero());
    for row in 0..=n {
        let k = row as i64;
        let c = coeffs_unchecked(spec, k, energy, coupling);
        for (col, value) in [(k - 2, c.d), (k - 1, c.c), (k, c.b), (k + 1, c.a)] {
            if (0..n as i64).contains(&col) {
                m.set(row, col as usize, value);
            }
        }
    }
    m
}
