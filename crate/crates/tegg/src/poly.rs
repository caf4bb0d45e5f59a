//! Polynomial utilities for filter stabilization: root finding through the
//! companion matrix, reconstruction from roots, and the step-down stability
//! test.

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

/// Roots of `c[0] z^n + c[1] z^(n-1) + ... + c[n]` via companion-matrix
/// eigenvalues. Leading zeros are stripped; a constant has no roots.
pub fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let first = coeffs.iter().position(|&c| c != 0.0);
    let Some(first) = first else { return Vec::new() };
    // Trailing zero coefficients contribute roots at the origin.
    let last = coeffs.iter().rposition(|&c| c != 0.0).unwrap();
    let core = &coeffs[first..=last];
    let origin_roots = coeffs.len() - 1 - last;

    let n = core.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); origin_roots];
    if n == 0 {
        return out;
    }
    let lead = core[0];
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        companion[(0, i)] = -core[i + 1] / lead;
    }
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    let eigs = companion.complex_eigenvalues();
    out.extend(eigs.iter().map(|e| Complex64::new(e.re, e.im)));
    out
}

/// Expands a monic polynomial from its roots, returning real coefficients in
/// descending powers. Imaginary residue from conjugate pairing is dropped.
pub fn monic_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        coeffs = next;
    }
    coeffs.into_iter().map(|c| c.re).collect()
}

/// True when every root of `a[0] + a[1] z^-1 + ...` (poles of `1/A`) has
/// magnitude at most `radius`. Runs the step-down (reverse Levinson)
/// recursion on radius-scaled coefficients; no root finding involved.
pub fn max_root_within(a: &[f64], radius: f64) -> bool {
    debug_assert!(radius > 0.0);
    let order = a.len().saturating_sub(1);
    if order == 0 {
        return true;
    }
    let mut b: Vec<f64> = a.iter().enumerate().map(|(k, &c)| c / radius.powi(k as i32)).collect();
    let mut n = order;
    while n > 0 {
        let k = b[n] / b[0];
        if !k.is_finite() || k.abs() >= 1.0 {
            return false;
        }
        let denom = 1.0 - k * k;
        let prev: Vec<f64> = (0..n).map(|i| (b[i] - k * b[n - i]) / denom).collect();
        b = prev;
        n -= 1;
    }
    true
}
