//! Rayleigh-Ritz solver for the finite-box models.
//!
//! Basis functions are `χ_k(x) = (b² - x²)^w P_k(x/b)` with `w = 3/2` for
//! the affine box and `w = 1` for the canonical box. For `w = 3/2` the
//! weight absorbs the inverse-square walls: `V χ_j χ_k` and `χ_j' χ_k'` are
//! both `(b² - x²)` times a polynomial, so Gauss-Legendre with `2N + 8`
//! nodes integrates every matrix element exactly up to rounding. The
//! kinetic term is assembled in the integrated-by-parts form
//! `∫ ħ² χ_j' χ_k'`; boundary terms vanish because `χ` vanishes at `±b`.

use nalgebra::DMatrix;

use crate::analytic_box::BoxGeometry;
use crate::eigen::{solve_generalized_symmetric, GeneralizedEigen};
pub use crate::eigen::GeneralizedEigProblem;
use crate::error::{Error, Result};
use crate::potentials::ModelSpec;
use crate::quadrature::{gauss_legendre, legendre_table, QuadratureRule};
use crate::stats::least_squares_slope;

pub const MAX_BASIS_SIZE: usize = 64;

/// Interior sample count used for node counting.
pub const NODE_GRID_POINTS: usize = 2048;
/// Boundary margin, as a fraction of `b`, excluded from node counting.
pub const NODE_GRID_MARGIN: f64 = 1e-6;
/// Window `[lo, hi]·b` of wall distances used for exponent fits.
pub const EXPONENT_WINDOW: (f64, f64) = (1e-4, 1e-2);

/// Quadrature order used for a basis of size `n`.
pub fn assembly_order(n: usize) -> usize {
    2 * n + 8
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    size: usize,
    weight_exponent: f64,
    geom: BoxGeometry,
}

impl BasisSpec {
    pub fn new(size: usize, weight_exponent: f64, geom: BoxGeometry) -> Result<Self> {
        if size == 0 || size > MAX_BASIS_SIZE {
            return Err(Error::InvalidParameter(format!(
                "basis size must be in 1..={MAX_BASIS_SIZE}, got {size}"
            )));
        }
        if !(weight_exponent >= 1.0 && weight_exponent.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weight exponent must be >= 1, got {weight_exponent}"
            )));
        }
        Ok(Self {
            size,
            weight_exponent,
            geom,
        })
    }

    /// Weight exponent matched to the model's wall behavior.
    pub fn for_model(model: &ModelSpec, size: usize) -> Result<Self> {
        match model {
            ModelSpec::CqBox { geom } => Self::new(size, 1.0, *geom),
            ModelSpec::AqBox { geom } => Self::new(size, 1.5, *geom),
            other => Err(Error::ModelUnsupported(format!(
                "Rayleigh-Ritz handles cq-box and aq-box, not {}",
                other.name()
            ))),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weight_exponent(&self) -> f64 {
        self.weight_exponent
    }

    pub fn geometry(&self) -> BoxGeometry {
        self.geom
    }

    /// Values, first and second derivatives of every basis function at `x`.
    pub fn evaluate(&self, x: f64) -> BasisValues {
        let n = self.size;
        let b = self.geom.b();
        let w = self.weight_exponent;
        let mut p = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut d2p = vec![0.0; n];
        legendre_table(x / b, &mut p, &mut dp, &mut d2p);
        let ax = x.abs();
        let u = (b - ax) * (b + ax);
        let uw = u.powf(w);
        let uw1 = u.powf(w - 1.0);
        let uw2 = if w == 1.0 { 0.0 } else { u.powf(w - 2.0) };
        let mut out = BasisValues {
            value: vec![0.0; n],
            first: vec![0.0; n],
            second: vec![0.0; n],
        };
        for k in 0..n {
            let (pk, dpk, d2pk) = (p[k], dp[k] / b, d2p[k] / (b * b));
            out.value[k] = uw * pk;
            out.first[k] = -2.0 * w * x * uw1 * pk + uw * dpk;
            out.second[k] = 4.0 * w * (w - 1.0) * x * x * uw2 * pk - 2.0 * w * uw1 * pk - 4.0 * w * x * uw1 * dpk
                + uw * d2pk;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BasisValues {
    pub value: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

/// Stiffness and overlap matrices of `model` in `basis`.
pub fn assemble_matrices(model: &ModelSpec, basis: &BasisSpec, rule: &QuadratureRule) -> Result<GeneralizedEigProblem> {
    let geom = match model {
        ModelSpec::CqBox { geom } | ModelSpec::AqBox { geom } => *geom,
        other => {
            return Err(Error::ModelUnsupported(format!(
                "matrix assembly handles cq-box and aq-box, not {}",
                other.name()
            )))
        }
    };
    let n = basis.size;
    if rule.order() < assembly_order(n) {
        return Err(Error::InvalidParameter(format!(
            "quadrature order {} is below the required {}",
            rule.order(),
            assembly_order(n)
        )));
    }
    let b = geom.b();
    let kinetic = model.kinetic_coefficient();
    let mut h = DMatrix::<f64>::zeros(n, n);
    let mut s = DMatrix::<f64>::zeros(n, n);
    for (x, w) in rule.mapped(-b, b) {
        let v = model.potential(x)?;
        let chi = basis.evaluate(x);
        for j in 0..n {
            for k in j..n {
                let overlap = chi.value[j] * chi.value[k];
                h[(j, k)] += w * (kinetic * chi.first[j] * chi.first[k] + v * overlap);
                s[(j, k)] += w * overlap;
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            h[(j, k)] = h[(k, j)];
            s[(j, k)] = s[(k, j)];
        }
    }
    Ok(GeneralizedEigProblem { h, s })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDiagnostics {
    pub parity: Parity,
    pub node_count: usize,
    pub boundary_exponent: f64,
    /// `‖Hv - λSv‖ / (‖H‖ + |λ| ‖S‖)`.
    pub residual_norm: f64,
    /// Set when the next level lies within `1e-12 |λ|`.
    pub near_degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub model: ModelSpec,
    pub basis: BasisSpec,
    pub eigenvalues: Vec<f64>,
    /// Column `i` holds the basis coefficients of level `i`.
    pub coefficients: DMatrix<f64>,
    pub diagnostics: Vec<LevelDiagnostics>,
}

impl SpectrumResult {
    /// Eigenfunction of `level` at `x`, with its first and second derivative.
    pub fn eigenfunction_with_derivatives(&self, level: usize, x: f64) -> (f64, f64, f64) {
        let chi = self.basis.evaluate(x);
        let c = self.coefficients.column(level);
        let mut out = (0.0, 0.0, 0.0);
        for k in 0..self.basis.size {
            out.0 += c[k] * chi.value[k];
            out.1 += c[k] * chi.first[k];
            out.2 += c[k] * chi.second[k];
        }
        out
    }

    pub fn eigenfunction(&self, level: usize, x: f64) -> f64 {
        self.eigenfunction_with_derivatives(level, x).0
    }

    /// `-κψ'' + Vψ - Eψ` at `x`, with `κ` the kinetic coefficient.
    pub fn pointwise_residual(&self, level: usize, x: f64) -> Result<f64> {
        let (psi, _, d2) = self.eigenfunction_with_derivatives(level, x);
        let v = self.model.potential(x)?;
        Ok(-self.model.kinetic_coefficient() * d2 + (v - self.eigenvalues[level]) * psi)
    }
}

/// Number of sign changes over a sequence, skipping exact zeros.
pub fn count_sign_changes<I: IntoIterator<Item = f64>>(values: I) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for v in values {
        if v == 0.0 || !v.is_finite() {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Least-squares slope of `ln|ψ|` against `ln s` for `s` log-spaced over
/// the exponent window at the right wall.
fn boundary_exponent(result: &SpectrumResult, level: usize) -> f64 {
    let b = result.basis.geom.b();
    let (lo, hi) = EXPONENT_WINDOW;
    let samples = 64;
    let pts: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let s = b * lo * (hi / lo).powf(i as f64 / (samples - 1) as f64);
            let psi = result.eigenfunction(level, b - s);
            (s.ln(), psi.abs().ln())
        })
        .collect();
    least_squares_slope(&pts)
}

fn node_count(result: &SpectrumResult, level: usize) -> usize {
    let b = result.basis.geom.b();
    let lo = -b + NODE_GRID_MARGIN * b;
    let hi = b - NODE_GRID_MARGIN * b;
    let step = (hi - lo) / (NODE_GRID_POINTS - 1) as f64;
    count_sign_changes((0..NODE_GRID_POINTS).map(|i| result.eigenfunction(level, lo + i as f64 * step)))
}

fn parity(coeffs: nalgebra::DVectorView<'_, f64>) -> Parity {
    let (mut even, mut odd) = (0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate() {
        if k % 2 == 0 {
            even += c * c;
        } else {
            odd += c * c;
        }
    }
    if even >= odd {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Assembles, solves and diagnoses the spectrum of a box model with a
/// basis of `n` functions.
pub fn compute_spectrum(model: &ModelSpec, n: usize) -> Result<SpectrumResult> {
    let basis = BasisSpec::for_model(model, n)?;
    let rule = gauss_legendre(assembly_order(n))?;
    let prob = assemble_matrices(model, &basis, &rule)?;
    let GeneralizedEigen { values, vectors, .. } = solve_generalized_symmetric(&prob)?;
    let mut result = SpectrumResult {
        model: *model,
        basis,
        eigenvalues: values,
        coefficients: vectors,
        diagnostics: Vec::with_capacity(n),
    };
    for level in 0..n {
        let v: Vec<f64> = result.coefficients.column(level).iter().copied().collect();
        let lambda = result.eigenvalues[level];
        let near_degenerate = result
            .eigenvalues
            .get(level + 1)
            .is_some_and(|next| (next - lambda).abs() < 1e-12 * lambda.abs());
        let diag = LevelDiagnostics {
            parity: parity(result.coefficients.column(level)),
            node_count: node_count(&result, level),
            boundary_exponent: boundary_exponent(&result, level),
            residual_norm: prob.relative_residual(lambda, &v),
            near_degenerate,
        };
        result.diagnostics.push(diag);
    }
    Ok(result)
}

/// Lowest `levels` eigenvalues for each basis size in `sizes`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub sizes: Vec<usize>,
    /// `energies[i][k]` is level `k` at `sizes[i]`.
    pub energies: Vec<Vec<f64>>,
}

impl ConvergenceTable {
    /// Whether every level is nonincreasing in the basis size, up to an
    /// absolute slack.
    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.energies
            .windows(2)
            .all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| *b <= *a + slack))
    }

    /// `|E_k(last) - E_k(previous)| / |E_k(last)|` per level.
    pub fn final_relative_change(&self) -> Vec<f64> {
        match self.energies.as_slice() {
            [.., prev, last] => prev.iter().zip(last).map(|(a, b)| ((b - a) / b).abs()).collect(),
            _ => Vec::new(),
        }
    }
}

pub fn convergence_sweep(model: &ModelSpec, sizes: &[usize], levels: usize) -> Result<ConvergenceTable> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("basis sizes must be non-empty and strictly ascending".into()));
    }
    if levels == 0 || levels > sizes[0] {
        return Err(Error::InvalidParameter(format!(
            "levels must be in 1..={} (the smallest basis size)",
            sizes[0]
        )));
    }
    let mut energies = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let result = compute_spectrum(model, n)?;
        energies.push(result.eigenvalues[..levels].to_vec());
    }
    Ok(ConvergenceTable {
        sizes: sizes.to_vec(),
        energies,
    })
}
