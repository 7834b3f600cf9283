//! Scalar special functions used across the crate: Bessel J, log-gamma,
//! Pochhammer symbols, Stirling numbers, and unit-phase helpers.

use num_complex::Complex64;

/// Bessel function of the first kind `J_n(x)` for integer order `n >= 0`.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    match n {
        0 => libm::j0(x),
        1 => libm::j1(x),
        _ => libm::jn(n as i32, x),
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Rising factorial `x (x+1) ... (x+n-1)`, with the empty product equal to 1.
pub fn rising_factorial(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (x + j as f64))
}

/// `exp(i*theta)` on the unit circle.
pub fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// `(-i)^k` exactly, cycling through `1, -i, -1, i`.
pub fn neg_i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Stirling numbers of the second kind `S(q, j)` for `0 <= j <= q`.
///
/// Row `q` expands power moments in factorial moments:
/// `x^q = sum_j S(q, j) * x(x-1)...(x-j+1)`.
pub fn stirling2_row(q: usize) -> Vec<f64> {
    let mut row = vec![0.0; q + 1];
    row[0] = 1.0;
    for _ in 1..=q {
        let prev = row.clone();
        row[0] = 0.0;
        for j in 1..row.len() {
            row[j] = prev[j - 1] + j as f64 * prev[j];
        }
    }
    row
}

/// Binomial coefficient as f64; exact for the ranges used here (`n <= 60`).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}
