use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::Poly;
use crate::error::{Error, Result};
use crate::linalg::{hessenberg_eigenvalues, DenseMatrix};
use crate::scalar::Scalar;

/// Default radius factor for merging nearby roots into one multiple root.
pub const CLUSTER_RTOL: f64 = 1e-6;
/// Default tolerance on `|Im z| / (1 + |z|)` for calling a root real.
pub const REAL_RTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Roots of a polynomial with multiplicities found by clustering.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub real_tolerance: f64,
}

impl RootSet {
    /// Sum of multiplicities.
    pub fn count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Group raw values (e.g. eigenvalues) into clusters of radius
    /// `cluster_rtol * (1 + |z|)`.
    pub fn from_values(values: &[Complex64], cluster_rtol: f64) -> Self {
        let roots = cluster(values, cluster_rtol)
            .into_iter()
            .map(|members| {
                let value = centroid(values, &members);
                Root {
                    value,
                    multiplicity: members.len(),
                }
            })
            .collect();
        let mut set = RootSet {
            roots,
            real_tolerance: REAL_RTOL,
        };
        set.sort();
        set
    }

    fn sort(&mut self) {
        self.roots.sort_by(|a, b| {
            a.value
                .re
                .total_cmp(&b.value.re)
                .then(a.value.im.total_cmp(&b.value.im))
        });
    }
}

/// Single-linkage clusters; returns member indices.
fn cluster(values: &[Complex64], rtol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut j = i;
        while label[j] != r {
            let next = label[j];
            label[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let radius = rtol * (1.0 + values[i].norm().max(values[j].norm()));
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index_of_root = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut label, i);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index_of_root[r]].push(i);
    }
    groups
}

/// Rounding splits an `m`-fold root into a ring of radius about
/// `eps^(1/m)`, far wider than the clustering radius once `m >= 3`. Merge the
/// largest group of neighbouring clusters that fits in such a ring, provided
/// the `(m-1)`-th derivative has a simple root at its centre.
pub fn merge_split_roots(p: &Poly<f64>, set: &mut RootSet, rtol: f64) {
    loop {
        let mut best: Option<(usize, Vec<usize>, Complex64)> = None;
        let n = set.roots.len();
        for i in 0..n {
            let mut order: Vec<usize> = (0..n).collect();
            let here = set.roots[i].value;
            order.sort_by(|&a, &b| {
                (set.roots[a].value - here)
                    .norm()
                    .total_cmp(&(set.roots[b].value - here).norm())
            });
            for k in 2..=n {
                let group = &order[..k];
                let m: usize = group.iter().map(|&g| set.roots[g].multiplicity).sum();
                let center = group
                    .iter()
                    .map(|&g| set.roots[g].value * set.roots[g].multiplicity as f64)
                    .sum::<Complex64>()
                    / m as f64;
                let radius = rtol.max((8.0 * f64::EPSILON.powf(1.0 / m as f64)).min(1e-3))
                    * (1.0 + center.norm());
                if group.iter().any(|&g| (set.roots[g].value - center).norm() > radius) {
                    continue;
                }
                let refined = newton_polish(&p.nth_derivative(m - 1), center, 30);
                if (refined - center).norm() > radius {
                    continue;
                }
                if best.as_ref().map_or(true, |(bm, _, _)| m > *bm) {
                    best = Some((m, group.to_vec(), refined));
                }
            }
        }
        let Some((m, mut group, value)) = best else {
            return;
        };
        group.sort_unstable_by(|a, b| b.cmp(a));
        for g in group {
            set.roots.swap_remove(g);
        }
        set.roots.push(Root {
            value,
            multiplicity: m,
        });
    }
}

fn centroid(values: &[Complex64], members: &[usize]) -> Complex64 {
    // an exact zero in the cluster pins it
    if members.iter().any(|&i| values[i] == Complex64::zero()) {
        return Complex64::zero();
    }
    let sum: Complex64 = members.iter().map(|&i| values[i]).sum();
    sum / members.len() as f64
}

/// Newton refinement that only accepts steps reducing `|p|`.
fn newton_polish(p: &Poly<f64>, mut z: Complex64, max_iter: usize) -> Complex64 {
    let (mut value, mut slope) = p.eval_with_derivative(z);
    for _ in 0..max_iter {
        if value.norm() == 0.0 || slope.norm() == 0.0 {
            break;
        }
        let candidate = z - value / slope;
        let (v2, s2) = p.eval_with_derivative(candidate);
        if !(v2.norm() < value.norm()) {
            break;
        }
        z = candidate;
        value = v2;
        slope = s2;
    }
    z
}

/// All complex roots of `p`: companion-matrix eigenvalues (Hessenberg QR with
/// balancing), Newton polishing, then clustering into multiple roots. The
/// centroid of each cluster is refined on the derivative of matching order.
pub fn roots(p: &Poly<f64>) -> Result<RootSet> {
    roots_with(p, CLUSTER_RTOL)
}

pub fn roots_with(p: &Poly<f64>, cluster_rtol: f64) -> Result<RootSet> {
    let Some(_) = p.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    let zeros = p.coeffs().iter().take_while(|c| **c == 0.0).count();
    let q = Poly::new(p.coeffs()[zeros..].to_vec());
    let n = q.degree().unwrap_or(0);

    let mut raw = vec![Complex64::zero(); zeros];
    if n == 1 {
        raw.push(Complex64::new(-q.coeff(0) / q.coeff(1), 0.0));
    } else if n > 1 {
        let lead = q.coeff(n);
        let mut companion = DenseMatrix::filled(n, n, 0.0);
        for k in 0..n {
            companion.set(0, k, -q.coeff(n - 1 - k) / lead);
        }
        for i in 1..n {
            companion.set(i, i - 1, 1.0);
        }
        let eig = hessenberg_eigenvalues(&companion)?;
        raw.extend(eig.into_iter().map(|z| newton_polish(&q, z, 20)));
    }

    let mut set = RootSet::from_values(&raw, cluster_rtol);
    merge_split_roots(&q, &mut set, cluster_rtol);
    for root in &mut set.roots {
        if root.multiplicity > 1 && root.value != Complex64::zero() {
            let dq = q.nth_derivative(root.multiplicity - 1);
            let refined = newton_polish(&dq, root.value, 20);
            let radius = cluster_rtol * (1.0 + root.value.norm());
            if (refined - root.value).norm() <= radius {
                root.value = refined;
            }
        }
    }
    set.sort();
    Ok(set)
}

/// Real roots (|Im z| ≤ tol·(1 + |z|)), multiplicities expanded, ascending.
pub fn real_filter(rs: &RootSet, tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = rs
        .roots
        .iter()
        .filter(|r| r.value.im.abs() <= tol * (1.0 + r.value.norm()))
        .flat_map(|r| std::iter::repeat(r.value.re).take(r.multiplicity))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Refine a real root of an exact polynomial: Newton's method on the
/// derivative of order `multiplicity - 1`, with every iterate evaluated
/// exactly and rounded to the nearest double. Steps that do not reduce the
/// exact residual are rejected.
pub fn polish_real_root(p: &Poly<BigRational>, x0: f64, multiplicity: usize) -> f64 {
    let q = p.nth_derivative(multiplicity.saturating_sub(1));
    let dq = q.derivative();
    let Some(mut x) = BigRational::from_f64(x0) else {
        return x0;
    };
    let mut value = q.eval(&x);
    for _ in 0..12 {
        if value.is_zero() {
            break;
        }
        let slope = dq.eval(&x);
        if slope.is_zero() {
            break;
        }
        let next = x.clone() - value.clone() / slope;
        let Some(next) = BigRational::from_f64(next.to_f64()) else {
            break;
        };
        if next == x {
            break;
        }
        let next_value = q.eval(&next);
        if next_value.abs() >= value.abs() {
            break;
        }
        x = next;
        value = next_value;
    }
    x.to_f64()
}
