//! Asymptotic sectors of the complex plane in which `exp(-x^(2z)/(2z))`
//! decays, and their pairing under the PT mirror `φ → π − φ`.
//!
//! Angles are kept unreduced around the defining center (so a sector such as
//! `(11π/8, 13π/8)` is stored as is) and reduced modulo `2π` only when
//! comparing. All sectors are open intervals.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub half_width: f64,
}

impl Sector {
    pub fn new(lo: f64, hi: f64) -> Self {
        Sector {
            lo,
            hi,
            center: 0.5 * (lo + hi),
            half_width: 0.5 * (hi - lo),
        }
    }

    pub fn around(center: f64, half_width: f64) -> Self {
        Sector {
            lo: center - half_width,
            hi: center + half_width,
            center,
            half_width,
        }
    }

    /// Image under `φ → π − φ`.
    pub fn mirror(&self) -> Sector {
        Sector::new(PI - self.hi, PI - self.lo)
    }

    /// Same interval modulo `2π`, within `tol`.
    pub fn same_as(&self, other: &Sector, tol: f64) -> bool {
        (self.half_width - other.half_width).abs() <= tol
            && angular_distance(self.center, other.center) <= tol
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `|a − b|` reduced to `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// True iff `angle`, shifted by a multiple of `2π` into `[lo, lo + 2π)`, lies
/// strictly between `lo` and `hi`.
pub fn contains(s: &Sector, angle: f64) -> bool {
    let a = s.lo + (angle - s.lo).rem_euclid(TAU);
    s.lo < a && a < s.hi
}

/// The `2z` sectors `(kπ/z − π/(4z), kπ/z + π/(4z))`, `k = 0..2z−1`, where
/// `Re x^(2z) > 0`.
pub fn sectors_for_degree(z: u32) -> Result<Vec<Sector>> {
    if z == 0 {
        return Err(Error::InvalidSpec("wedge degree must be positive".into()));
    }
    let zf = z as f64;
    let half = PI / (4.0 * zf);
    Ok((0..2 * z)
        .map(|k| Sector::around(k as f64 * PI / zf, half))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WedgePair {
    pub left: Sector,
    pub right: Sector,
    /// 1-based label: `1` is the real-axis pair, the rest follow by
    /// decreasing center of the right sector.
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PtPairs {
    pub pairs: Vec<WedgePair>,
    /// Sectors mapped onto themselves (centered at `π/2` or `3π/2`).
    pub self_symmetric: Vec<Sector>,
}

/// Groups the sectors of [`sectors_for_degree`] into mirror pairs.
pub fn pt_pairs(z: u32) -> Result<PtPairs> {
    let sectors = sectors_for_degree(z)?;
    let n = sectors.len();
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    let mut self_symmetric = Vec::new();
    for k in 0..n {
        if used[k] {
            continue;
        }
        // center kπ/z is sent to (z − k)π/z
        let partner = (z as usize + n - k) % n;
        used[k] = true;
        used[partner] = true;
        if partner == k {
            self_symmetric.push(sectors[k]);
            continue;
        }
        let (right, left) = if sectors[k].center.cos() > 0.0 {
            (sectors[k], sectors[partner])
        } else {
            (sectors[partner], sectors[k])
        };
        pairs.push(WedgePair {
            left,
            right,
            index: 0,
        });
    }
    let signed = |s: &Sector| s.center - TAU * ((s.center + PI) / TAU).floor();
    pairs.sort_by(|a, b| {
        let real_a = angular_distance(a.right.center, 0.0) < 1e-12;
        let real_b = angular_distance(b.right.center, 0.0) < 1e-12;
        real_b
            .cmp(&real_a)
            .then(signed(&b.right).total_cmp(&signed(&a.right)))
    });
    for (j, p) in pairs.iter_mut().enumerate() {
        p.index = j + 1;
    }
    Ok(PtPairs {
        pairs,
        self_symmetric,
    })
}

/// Sectors for `V = x^2 (ix)^δ` with half-width `Δ = π/(4 + 2δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenderSectors {
    pub half_width: f64,
    pub left: Sector,
    pub right: Sector,
    pub left2: Sector,
    pub right2: Sector,
    /// The second pair only stays compatible with real coordinates for
    /// `1 < δ < 3`.
    pub second_pair_compatible: bool,
}

pub fn bender_sectors(delta: f64) -> Result<BenderSectors> {
    if !(delta > -2.0) || !delta.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "delta must be finite and greater than -2, got {delta}"
        )));
    }
    let w = PI / (4.0 + 2.0 * delta);
    let left = Sector::new(-3.0 * w - FRAC_PI_2, -w - FRAC_PI_2);
    let right = Sector::new(w - FRAC_PI_2, 3.0 * w - FRAC_PI_2);
    let left2 = Sector::new(-5.0 * w - FRAC_PI_2, -3.0 * w - FRAC_PI_2);
    let right2 = Sector::new(3.0 * w - FRAC_PI_2, 5.0 * w - FRAC_PI_2);
    Ok(BenderSectors {
        half_width: w,
        left,
        right,
        left2,
        right2,
        second_pair_compatible: delta > 1.0 && delta < 3.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-15;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 4.0 * EPS * (1.0 + b.abs())
    }

    #[test]
    fn quartic_sectors() {
        let s = sectors_for_degree(2).unwrap();
        let want = [
            (-PI / 8.0, PI / 8.0),
            (3.0 * PI / 8.0, 5.0 * PI / 8.0),
            (7.0 * PI / 8.0, 9.0 * PI / 8.0),
            (11.0 * PI / 8.0, 13.0 * PI / 8.0),
        ];
        assert_eq!(s.len(), 4);
        for (got, (lo, hi)) in s.iter().zip(want) {
            assert!(close(got.lo, lo) && close(got.hi, hi), "{got:?}");
        }
    }

    #[test]
    fn sextic_and_harmonic_sectors() {
        let s = sectors_for_degree(3).unwrap();
        assert_eq!(s.len(), 6);
        for (k, sec) in s.iter().enumerate() {
            assert!(close(sec.half_width, PI / 12.0));
            assert!(close(sec.center, k as f64 * PI / 3.0));
        }
        let h = sectors_for_degree(1).unwrap();
        assert_eq!(h.len(), 2);
        assert!(close(h[0].center, 0.0) && close(h[1].center, PI));
        assert!(close(h[0].half_width, PI / 4.0));
        assert!(sectors_for_degree(0).is_err());
    }

    #[test]
    fn widths_tile_half_the_circle() {
        for z in 1..=12 {
            let total: f64 = sectors_for_degree(z).unwrap().iter().map(Sector::width).sum();
            assert!((total - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn sextic_has_three_pairs() {
        let p = pt_pairs(3).unwrap();
        assert_eq!(p.pairs.len(), 3);
        assert!(p.self_symmetric.is_empty());
        assert!(close(p.pairs[0].right.center, 0.0));
        assert!(angular_distance(p.pairs[0].left.center, PI) < 1e-12);
        // upper pair before lower pair
        assert!(angular_distance(p.pairs[1].right.center, PI / 3.0) < 1e-12);
        assert!(angular_distance(p.pairs[2].right.center, -PI / 3.0) < 1e-12);
        assert_eq!(
            p.pairs.iter().map(|w| w.index).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
    }

    #[test]
    fn quartic_pairs() {
        let p = pt_pairs(2).unwrap();
        assert_eq!(p.pairs.len(), 1);
        assert_eq!(p.self_symmetric.len(), 2);
        assert!(angular_distance(p.self_symmetric[0].center, PI / 2.0) < 1e-12);
        assert!(angular_distance(p.self_symmetric[1].center, 3.0 * PI / 2.0) < 1e-12);
        assert_eq!(pt_pairs(1).unwrap().pairs.len(), 1);
    }

    #[test]
    fn pair_counts_match_direct_enumeration() {
        for z in 1..=8u32 {
            let p = pt_pairs(z).unwrap();
            let sectors = sectors_for_degree(z).unwrap();
            let fixed = sectors
                .iter()
                .filter(|s| s.mirror().same_as(s, 1e-12))
                .count();
            assert_eq!(p.self_symmetric.len(), fixed);
            if z % 2 == 1 {
                assert_eq!((p.pairs.len(), fixed), (z as usize, 0));
            } else {
                assert_eq!((p.pairs.len(), fixed), (z as usize - 1, 2));
            }
            for w in &p.pairs {
                assert!(w.right.mirror().same_as(&w.left, 1e-12));
                assert!(w.left.mirror().mirror().same_as(&w.left, 1e-12));
            }
        }
    }

    #[test]
    fn bender_examples() {
        let b = bender_sectors(4.0).unwrap();
        assert!(close(b.half_width, PI / 12.0));
        assert!(close(b.left.lo, -3.0 * PI / 4.0) && close(b.left.hi, -7.0 * PI / 12.0));
        assert!(contains(&b.left, -2.0 * PI / 3.0));
        assert!(b.right.mirror().same_as(&b.left, 1e-12));
        assert!(b.right2.mirror().same_as(&b.left2, 1e-12));

        let b = bender_sectors(1.0).unwrap();
        assert!(close(b.half_width, PI / 6.0));
        assert!(close(b.left2.lo, -4.0 * PI / 3.0) && close(b.left2.hi, -PI));
        assert!(!b.second_pair_compatible);
        assert!(bender_sectors(2.0).unwrap().second_pair_compatible);
        assert!(!bender_sectors(3.0).unwrap().second_pair_compatible);

        assert!(close(bender_sectors(0.0).unwrap().half_width, PI / 4.0));
        assert!(bender_sectors(-2.0).is_err());
    }

    #[test]
    fn open_interval_membership() {
        let s1 = sectors_for_degree(2).unwrap()[0];
        assert!(contains(&s1, 0.0));
        assert!(!contains(&s1, PI / 8.0));
        assert!(!contains(&s1, -PI / 8.0));
        assert!(contains(&s1, TAU + 0.1));
        let s4 = sectors_for_degree(2).unwrap()[3];
        assert!(contains(&s4, -PI / 2.0));
        assert!(contains(&s4, 3.0 * PI / 2.0));
    }
}
