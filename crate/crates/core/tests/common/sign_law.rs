//! The eight 2x2 sign matrices `[[a, b], [b, c]]`, each of probability 1/8.

/// Eigenvalues of each sign matrix in closed form, ascending.
pub fn spectra() -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(8);
    for a in [-1.0f64, 1.0] {
        for b in [-1.0f64, 1.0] {
            for c in [-1.0f64, 1.0] {
                let mid = (a + c) / 2.0;
                let r = (((a - c) / 2.0).powi(2) + b * b).sqrt();
                out.push([mid - r, mid + r]);
            }
        }
    }
    out
}

pub fn probability(event: impl Fn(&[f64; 2]) -> bool) -> f64 {
    spectra().iter().filter(|e| event(e)).count() as f64 / 8.0
}

/// `P(sigma_min(A - lambda) <= delta / sqrt 2)`
pub fn smallball(lambda: f64, delta: f64) -> f64 {
    probability(|e| e.iter().map(|x| (x - lambda).abs()).fold(f64::INFINITY, f64::min) <= delta / 2f64.sqrt())
}

/// `P(both singular values lie in [lo, hi] and differ by at most eps 2^{-3/2})`
pub fn gap(lo: f64, hi: f64, eps: f64) -> f64 {
    probability(|e| {
        let s = [e[0].abs(), e[1].abs()];
        s.iter().all(|x| (lo..=hi).contains(x)) && (s[0] - s[1]).abs() <= eps / 8f64.sqrt()
    })
}

/// `P(|x_i + a2 x_j - d| <= eps 2^{-3/2} for some ordered pair i != j)`
pub fn linear(a2: f64, d: f64, eps: f64) -> f64 {
    let tol = eps / 8f64.sqrt();
    probability(|e| (e[0] + a2 * e[1] - d).abs() <= tol || (e[1] + a2 * e[0] - d).abs() <= tol)
}
