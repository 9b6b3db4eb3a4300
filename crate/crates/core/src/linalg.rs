//! Dense linear algebra: a small generic matrix, exact elimination, Hessenberg
//! QR eigenvalues and SVD-based null spaces.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> DenseMatrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        DenseMatrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl DenseMatrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Determinant by Gaussian elimination, pivoting on the largest magnitude.
/// Exact for rational entries.
pub fn determinant<T: Scalar>(m: &DenseMatrix<T>) -> T {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.to_rows();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&x, &y| {
                a[x][col]
                    .abs()
                    .partial_cmp(&a[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(p) = pivot else {
            return T::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det = det * piv.clone();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / piv.clone();
            for c in col..n {
                let delta = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Singular values in descending order together with the matching right
/// singular vectors. Matrices with fewer rows than columns are padded with
/// zero rows so that every right singular vector is returned.
pub fn svd_right(m: &DenseMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let rows = m.rows.max(m.cols);
    let mut a = DMatrix::<f64>::zeros(rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            a[(i, j)] = *m.get(i, j);
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut pairs: Vec<(f64, Vec<f64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(k, &s)| (s, v_t.row(k).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    pairs.into_iter().unzip()
}

/// Basis of the numerical null space: right singular vectors whose singular
/// value is at most `rtol` times the largest. The basis is brought to reduced
/// echelon form, so each vector has a unit entry at its own pivot index
/// (the lowest index whose magnitude exceeds `rtol`) and zeros at the pivots
/// of the others. Entries at rounding level are set to exactly zero.
pub fn null_space(m: &DenseMatrix<f64>, rtol: f64) -> (Vec<Vec<f64>>, f64) {
    let (sv, vecs) = svd_right(m);
    let largest = sv.first().copied().unwrap_or(0.0);
    let smallest = sv.last().copied().unwrap_or(0.0);
    let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
    let mut basis: Vec<Vec<f64>> = sv
        .iter()
        .zip(vecs)
        .filter(|(s, _)| largest == 0.0 || **s <= rtol * largest)
        .map(|(_, v)| v)
        .collect();
    let n = m.cols;
    let snap = 64.0 * f64::EPSILON;
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        if pivot_row == basis.len() {
            break;
        }
        let best = (pivot_row..basis.len()).max_by(|&a, &b| {
            basis[a][col]
                .abs()
                .partial_cmp(&basis[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let Some(best) = best else { break };
        if basis[best][col].abs() <= rtol {
            continue;
        }
        basis.swap(pivot_row, best);
        let p = basis[pivot_row][col];
        for v in basis[pivot_row].iter_mut() {
            *v /= p;
        }
        for r in 0..basis.len() {
            if r != pivot_row {
                let f = basis[r][col];
                if f != 0.0 {
                    for c in 0..n {
                        basis[r][c] -= f * basis[pivot_row][c];
                    }
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    basis.truncate(pivot_row);
    for (k, v) in basis.iter_mut().enumerate() {
        if let Some(refined) = refine_null_vector(m, &pivots, k) {
            let p = pivots[k];
            let current: Vec<f64> = v.iter().map(|x| x / v[p]).collect();
            if residual_norm(m, &refined) <= residual_norm(m, &current) {
                *v = refined;
            }
        }
    }
    for (v, &p) in basis.iter_mut().zip(&pivots) {
        let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for x in v.iter_mut() {
            if x.abs() <= snap * scale {
                *x = 0.0;
            }
        }
        v[p] = 1.0;
    }
    (basis, ratio)
}

/// Re-solve for the `k`-th echelon vector: unit entry at `pivots[k]`, zeros
/// at the other pivots, remaining entries from `A x = 0` by Gaussian
/// elimination with row pivoting on the overdetermined system. Simple
/// rational data then come out exactly instead of carrying the rounding of
/// the singular vectors. `None` if the free columns are rank deficient.
fn refine_null_vector(m: &DenseMatrix<f64>, pivots: &[usize], k: usize) -> Option<Vec<f64>> {
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut v = vec![0.0; m.cols];
    v[pivots[k]] = 1.0;
    let n = free.len();
    if n == 0 {
        return Some(v);
    }
    if m.rows < n {
        return None;
    }
    // augmented rows [A_free | -a_pivot]
    let mut a: Vec<Vec<f64>> = (0..m.rows)
        .map(|i| {
            let mut row: Vec<f64> = free.iter().map(|&c| *m.get(i, c)).collect();
            row.push(-*m.get(i, pivots[k]));
            row
        })
        .collect();
    let scale = m.max_abs();
    for col in 0..n {
        let best = (col..a.len()).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[best][col].abs() <= 1e-10 * scale {
            return None;
        }
        a.swap(col, best);
        for r in col + 1..a.len() {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = a[i][n];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    for (j, &c) in free.iter().enumerate() {
        v[c] = x[j];
    }
    Some(v)
}

fn residual_norm(m: &DenseMatrix<f64>, v: &[f64]) -> f64 {
    m.mul_vec(v).iter().fold(0.0, |acc, r| acc.max(r.abs()))
}

/// Diagonal similarity that equalises row and column norms (powers of two,
/// so no rounding). Keeps Hessenberg structure.
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration. Entries below the first subdiagonal are ignored.
pub fn hessenberg_eigenvalues(h: &DenseMatrix<f64>) -> Result<Vec<Complex64>> {
    assert_eq!(h.rows, h.cols, "eigenvalues of a non-square matrix");
    let n = h.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut rows = h.to_rows();
    for (i, row) in rows.iter_mut().enumerate() {
        for v in row.iter_mut().take(i.saturating_sub(1)) {
            *v = 0.0;
        }
    }
    balance(&mut rows);
    // 1-based working copy keeps the index arithmetic readable
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = rows[i][j];
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.saturating_sub(1)).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = a[nn - 1][nn - 1];
            w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if its == 60 {
                return Err(Error::NoConvergence);
            }
            if its == 10 || its == 20 || its == 40 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    a[i][i] -= x;
                }
                let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            loop {
                z = a[m][m];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k + 1 <= nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k != nn - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn eigenvalues_of_triangular_and_rotation() {
        let h = DenseMatrix::from_rows(vec![vec![-4.0, 0.0], vec![4.0, -12.0]]);
        let ev = sorted(hessenberg_eigenvalues(&h).unwrap());
        assert!((ev[0].re + 12.0).abs() < 1e-13 && ev[0].im == 0.0);
        assert!((ev[1].re + 4.0).abs() < 1e-13);

        let rot = DenseMatrix::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
        let ev = sorted(hessenberg_eigenvalues(&rot).unwrap());
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_of_cubic() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let h = DenseMatrix::from_rows(vec![
            vec![6.0, -11.0, 6.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let ev = sorted(hessenberg_eigenvalues(&h).unwrap());
        for (e, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((e.re - want).abs() < 1e-12 && e.im.abs() < 1e-12, "{e}");
        }
    }

    #[test]
    fn larger_hessenberg_matches_trace_and_determinant() {
        let n = 9;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                rows[i][j] = ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 0.5 } else { 0.0 };
            }
        }
        let h = DenseMatrix::from_rows(rows);
        let ev = hessenberg_eigenvalues(&h).unwrap();
        let trace: f64 = (0..n).map(|i| h.get(i, i)).sum();
        let sum: Complex64 = ev.iter().sum();
        assert!((sum.re - trace).abs() < 1e-9 && sum.im.abs() < 1e-9);
        let prod: Complex64 = ev.iter().product();
        let det = determinant(&h);
        assert!((prod.re - det).abs() < 1e-8 * det.abs().max(1.0));
    }

    #[test]
    fn exact_determinant() {
        let m = DenseMatrix::from_rows(vec![
            vec![rational(1, 2), rational(1, 3)],
            vec![rational(1, 4), rational(1, 5)],
        ]);
        let det: BigRational = determinant(&m);
        assert_eq!(det, rational(1, 10) - rational(1, 12));
    }

    #[test]
    fn null_space_echelon_basis() {
        let m = DenseMatrix::from_rows(vec![vec![0.0, 0.0], vec![4.0, -8.0]]);
        let (basis, ratio) = null_space(&m, 1e-8);
        assert!(ratio < 1e-15);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][0], 1.0);
        assert!((basis[0][1] - 0.5).abs() < 1e-15);

        let zero = DenseMatrix::filled(2, 3, 0.0);
        let (basis, _) = null_space(&zero, 1e-8);
        assert_eq!(basis, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
    }
}
