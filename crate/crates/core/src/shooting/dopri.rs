//! One Dormand–Prince 5(4) step for a scalar complex ODE `y' = f(t, y)`.

use num_complex::Complex64;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order weights (equal to the last row of `A`).
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Fifth minus fourth order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Returns the fifth-order update and the embedded error estimate.
pub fn step(f: impl Fn(f64, Complex64) -> Complex64, t: f64, y: Complex64, h: f64) -> (Complex64, Complex64) {
    let mut k = [Complex64::new(0.0, 0.0); 7];
    for i in 0..7 {
        let mut yi = y;
        for j in 0..i {
            yi += k[j] * (h * A[i][j]);
        }
        k[i] = f(t + C[i] * h, yi);
    }
    let mut y_new = y;
    let mut err = Complex64::new(0.0, 0.0);
    for i in 0..7 {
        y_new += k[i] * (h * B[i]);
        err += k[i] * (h * E[i]);
    }
    (y_new, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_consistent() {
        assert!((B.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(E.iter().sum::<f64>().abs() < 1e-15);
        for i in 1..7 {
            let row: f64 = A[i].iter().sum();
            assert!((row - C[i]).abs() < 1e-14, "row {i}");
        }
    }

    #[test]
    fn exponential_to_fifth_order() {
        // y' = i y, one step of size h has error O(h^6)
        let f = |_: f64, y: Complex64| Complex64::i() * y;
        let err = |h: f64| {
            let (y, _) = step(f, 0.0, Complex64::new(1.0, 0.0), h);
            (y - Complex64::new(0.0, h).exp()).norm()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 50.0, "ratio {ratio}");
    }
}
