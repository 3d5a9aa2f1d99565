//! Numerical kernels shared by the moment and photon-statistics layers.

pub mod diff;
pub mod jet;
pub mod quadrature;

pub use diff::{derivative_at_origin, DiffConfig};
pub use jet::Jet;
pub use quadrature::{integrate_plane, integrate_radial_kernels, Cutoff, QuadratureConfig};

/// `L_0(u) .. L_n(u)` by the three-term recurrence.
pub fn laguerre_table(n: usize, u: f64, out: &mut [f64]) {
    debug_assert!(out.len() > n);
    out[0] = 1.0;
    if n == 0 {
        return;
    }
    out[1] = 1.0 - u;
    for k in 1..n {
        out[k + 1] = ((2 * k + 1) as f64 - u) * out[k] / (k + 1) as f64 - k as f64 * out[k - 1] / (k + 1) as f64;
    }
}

/// Laguerre polynomial `L_n(u)`.
pub fn laguerre(n: usize, u: f64) -> f64 {
    let (mut a, mut b) = (1.0, 1.0 - u);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = (((2 * k + 1) as f64 - u) * b - k as f64 * a) / (k + 1) as f64;
        a = b;
        b = c;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(n: usize, u: f64) -> f64 {
        // Σ_k C(n,k) (−u)^k / k!
        let mut s = 0.0;
        let mut binom = 1.0;
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            s += binom * (-u).powi(k as i32) / fact;
        }
        s
    }

    #[test]
    fn recurrence_matches_series() {
        for n in 0..12 {
            for u in [0.0, 0.7, 2.5, 6.0] {
                assert!((laguerre(n, u) - series(n, u)).abs() < 1e-10, "n={n} u={u}");
            }
        }
        let mut t = [0.0; 6];
        laguerre_table(5, 0.7, &mut t);
        assert!((t[5] - series(5, 0.7)).abs() < 1e-13);
    }
}
