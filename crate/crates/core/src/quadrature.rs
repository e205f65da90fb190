//! Orthogonal polynomial recurrences and Gaussian quadrature.
//!
//! Legendre polynomials are the basis of the weighted Rayleigh-Ritz ansatz;
//! generalized Laguerre polynomials give the closed-form eigenfunctions of
//! the half-harmonic oscillator, which the shooting solver is validated
//! against.

use crate::error::{Error, Result};

/// Largest order accepted by [`gauss_legendre`].
pub const MAX_GAUSS_ORDER: usize = 512;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// A Gauss-Legendre rule on the reference interval (-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]` by an affine map of the reference rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum();
        half * sum
    }

    /// Iterator over `(node, weight)` pairs mapped onto `[a, b]`, with the
    /// Jacobian folded into the weights.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }
}

/// Value and first derivative of the degree-`n` Legendre polynomial.
fn legendre_with_slope(n: usize, t: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    // P'_n = n (t P_n - P_{n-1}) / (t^2 - 1), valid off the endpoints
    let slope = n as f64 * (t * p - p_prev) / (t * t - 1.0);
    (p, slope)
}

/// Gauss-Legendre rule of order `n`, nodes found by Newton iteration from
/// Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_GAUSS_ORDER {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Legendre order must be in 1..={MAX_GAUSS_ORDER}, got {n}"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n / 2;
    for i in 0..half {
        // i-th largest root
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        let mut last_step = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_with_slope(n, t);
            let step = p / dp;
            t -= step;
            last_step = step.abs();
            if last_step <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        // a step stuck a few ulps above the tolerance is rounding, not divergence
        if !converged && last_step > 1e-13 {
            return Err(Error::ConvergenceFailure { order: n, index: i });
        }
        let (_, dp) = legendre_with_slope(n, t);
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[n - 1 - i] = t;
        nodes[i] = -t;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_slope(n, 0.0);
        nodes[half] = 0.0;
        weights[half] = 2.0 / (dp * dp);
    }
    Ok(QuadratureRule { nodes, weights })
}

/// `P_k(t)` by the three-term recurrence
/// `(k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}`.
pub fn legendre_eval(k: usize, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut p_prev = 1.0;
    let mut p = t;
    for j in 1..k {
        let jf = j as f64;
        let p_next = ((2.0 * jf + 1.0) * t * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = p_next;
    }
    p
}

/// Fills `p`, `dp`, `d2p` with `P_k(t)`, `P_k'(t)` and `P_k''(t)` for
/// `k = 0..p.len()`. Derivatives come from differentiating the recurrence,
/// so they stay accurate at `t = ±1`.
pub fn legendre_table(t: f64, p: &mut [f64], dp: &mut [f64], d2p: &mut [f64]) {
    let n = p.len();
    assert!(dp.len() == n && d2p.len() == n, "table slices must match");
    if n == 0 {
        return;
    }
    p[0] = 1.0;
    dp[0] = 0.0;
    d2p[0] = 0.0;
    if n == 1 {
        return;
    }
    p[1] = t;
    dp[1] = 1.0;
    d2p[1] = 0.0;
    for k in 1..n - 1 {
        let kf = k as f64;
        let a = 2.0 * kf + 1.0;
        let c = kf + 1.0;
        p[k + 1] = (a * t * p[k] - kf * p[k - 1]) / c;
        dp[k + 1] = (a * (p[k] + t * dp[k]) - kf * dp[k - 1]) / c;
        d2p[k + 1] = (a * (2.0 * dp[k] + t * d2p[k]) - kf * d2p[k - 1]) / c;
    }
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(t)` by
/// `(k+1) L_{k+1} = (2k+1+alpha-t) L_k - (k+alpha) L_{k-1}`.
pub fn laguerre_eval(alpha: f64, n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut l_prev = 1.0;
    let mut l = 1.0 + alpha - t;
    for k in 1..n {
        let kf = k as f64;
        let l_next = ((2.0 * kf + 1.0 + alpha - t) * l - (kf + alpha) * l_prev) / (kf + 1.0);
        l_prev = l;
        l = l_next;
    }
    l
}

/// Polynomial families available through a common evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolyFamily {
    Legendre,
    Laguerre { alpha: f64 },
}

impl PolyFamily {
    pub fn eval(&self, degree: usize, t: f64) -> f64 {
        match *self {
            PolyFamily::Legendre => legendre_eval(degree, t),
            PolyFamily::Laguerre { alpha } => laguerre_eval(alpha, degree, t),
        }
    }
}

/// Adaptive Gauss-Legendre quadrature comparing a 10- and 20-point rule on
/// each panel and bisecting panels that disagree.
pub struct AdaptiveQuadrature {
    coarse: QuadratureRule,
    fine: QuadratureRule,
    max_panels: usize,
}

impl Default for AdaptiveQuadrature {
    fn default() -> Self {
        Self {
            coarse: gauss_legendre(10).expect("order 10 is valid"),
            fine: gauss_legendre(20).expect("order 20 is valid"),
            max_panels: 1 << 16,
        }
    }
}

impl AdaptiveQuadrature {
    /// Integrates `f` over `[lo, hi]` to absolute tolerance `tol` scaled by
    /// `max(1, |I|)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let width = hi - lo;
        let mut total = 0.0;
        let mut stack = vec![(lo, hi)];
        let mut panels = 0usize;
        while let Some((a, b)) = stack.pop() {
            panels += 1;
            if panels > self.max_panels {
                return Err(Error::QuadratureFailure { lo, hi, tol });
            }
            let coarse = self.coarse.integrate(a, b, &f);
            let fine = self.fine.integrate(a, b, &f);
            if !fine.is_finite() {
                return Err(Error::QuadratureFailure { lo, hi, tol });
            }
            // panels below 1e-6 of the range keep a fixed floor so that
            // integrable endpoint singularities terminate
            let share = tol * ((b - a) / width).max(1e-6);
            if (fine - coarse).abs() <= share * fine.abs().max(1.0) {
                total += fine;
            } else if (b - a) < 1e-13 * width {
                return Err(Error::QuadratureFailure { lo, hi, tol });
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b));
                stack.push((a, m));
            }
        }
        Ok(total)
    }
}
