//! Piecewise-smooth functions and their distributional derivatives.
//!
//! A [`PiecewiseSmooth`] carries analytic evaluators for the value and its
//! derivatives on every piece, so jumps at breakpoints are read off by direct
//! evaluation. Differentiating in the weak sense turns a jump of `f` into a
//! Dirac delta in `f'`, and a jump of `f'` into a delta in `f''`. Any delta
//! puts the derivative outside L².

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::AdaptiveQuadrature;

/// Jumps smaller than this are floating-point noise and produce no delta.
pub const JUMP_THRESHOLD: f64 = 1e-10;

/// Tolerance handed to the adaptive quadrature in [`l2_norm_squared`].
pub const L2_QUADRATURE_TOL: f64 = 1e-10;

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Wraps a closure as an [`Evaluator`].
pub fn evaluator<F>(f: F) -> Evaluator
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One smooth piece on `[lo, hi]`: `derivatives[k]` evaluates the k-th
/// derivative. Endpoints may be declared singular, in which case one-sided
/// limits there are extrapolated instead of evaluated.
#[derive(Clone)]
pub struct Piece {
    lo: f64,
    hi: f64,
    derivatives: Vec<Evaluator>,
    singular_lo: bool,
    singular_hi: bool,
}

impl std::fmt::Debug for Piece {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Piece")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("orders", &self.derivatives.len())
            .field("singular_lo", &self.singular_lo)
            .field("singular_hi", &self.singular_hi)
            .finish()
    }
}

impl Piece {
    /// Piece with value, first and second derivative evaluators.
    pub fn new(lo: f64, hi: f64, value: Evaluator, first: Evaluator, second: Evaluator) -> Self {
        Self::with_derivatives(lo, hi, vec![value, first, second])
    }

    pub fn with_derivatives(lo: f64, hi: f64, derivatives: Vec<Evaluator>) -> Self {
        Self {
            lo,
            hi,
            derivatives,
            singular_lo: false,
            singular_hi: false,
        }
    }

    /// Identically zero piece with all derivatives available.
    pub fn zero(lo: f64, hi: f64) -> Self {
        let z = evaluator(|_| 0.0);
        Self::with_derivatives(lo, hi, vec![z.clone(), z.clone(), z.clone(), z])
    }

    /// Marks an endpoint as singular (evaluators may not be finite there).
    pub fn singular_at(mut self, side: Side) -> Self {
        match side {
            Side::Left => self.singular_lo = true,
            Side::Right => self.singular_hi = true,
        }
        self
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Number of derivative orders carried (1 means value only).
    pub fn orders(&self) -> usize {
        self.derivatives.len()
    }

    fn eval(&self, order: usize, x: f64) -> f64 {
        (self.derivatives[order])(x)
    }
}

/// A function on an interval given as smooth pieces tiling it exactly.
#[derive(Debug, Clone)]
pub struct PiecewiseSmooth {
    pieces: Vec<Piece>,
}

impl PiecewiseSmooth {
    /// Builds a function from pieces; pieces must be ordered, non-empty and
    /// share endpoints exactly.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("a piecewise function needs at least one piece".into()));
        }
        for p in &pieces {
            if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
                return Err(Error::InvalidParameter(format!(
                    "piece interval [{}, {}] is not a finite increasing interval",
                    p.lo, p.hi
                )));
            }
            if p.derivatives.is_empty() {
                return Err(Error::InvalidParameter("piece carries no evaluator".into()));
            }
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::InvalidParameter(format!(
                    "pieces do not tile: gap or overlap between {} and {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        Ok(Self { pieces })
    }

    /// A single smooth piece over `[lo, hi]`.
    pub fn smooth(lo: f64, hi: f64, derivatives: Vec<Evaluator>) -> Result<Self> {
        Self::new(vec![Piece::with_derivatives(lo, hi, derivatives)])
    }

    /// `f` on `[lo, hi]`, extended by zero on `[lo - pad, lo]` and `[hi, hi + pad]`.
    pub fn zero_extended(lo: f64, hi: f64, pad: f64, derivatives: Vec<Evaluator>) -> Result<Self> {
        if !(pad > 0.0) {
            return Err(Error::InvalidParameter(format!("padding must be positive, got {pad}")));
        }
        let orders = derivatives.len();
        let zero = |a, b| {
            let z = evaluator(|_| 0.0);
            Piece::with_derivatives(a, b, vec![z; orders])
        };
        Self::new(vec![
            zero(lo - pad, lo),
            Piece::with_derivatives(lo, hi, derivatives),
            zero(hi, hi + pad),
        ])
    }

    /// The floor-and-ramp function: 0 on [-1, 0], x on [0, 1].
    pub fn floor_and_ramp() -> Self {
        let ramp = Piece::with_derivatives(
            0.0,
            1.0,
            vec![evaluator(|x| x), evaluator(|_| 1.0), evaluator(|_| 0.0), evaluator(|_| 0.0)],
        );
        Self::new(vec![Piece::zero(-1.0, 0.0), ramp]).expect("static pieces tile")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Ambient interval `(lo, hi)`.
    pub fn interval(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    /// Interior breakpoints, strictly increasing.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.lo).collect()
    }

    /// Smallest number of derivative orders carried by any piece.
    pub fn orders(&self) -> usize {
        self.pieces.iter().map(Piece::orders).min().unwrap_or(0)
    }

    fn piece_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.interval();
        if x < lo || x > hi {
            return None;
        }
        // right-continuous convention at breakpoints; the last piece owns `hi`
        let idx = self.pieces.partition_point(|p| p.hi <= x);
        Some(idx.min(self.pieces.len() - 1))
    }

    /// `order`-th derivative at `x`, extended by zero outside the ambient
    /// interval. At a breakpoint the piece on the right is used.
    pub fn derivative_at(&self, order: usize, x: f64) -> f64 {
        match self.piece_index(x) {
            Some(i) if order < self.pieces[i].orders() => self.pieces[i].eval(order, x),
            Some(_) => f64::NAN,
            None => 0.0,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative_at(0, x)
    }

    /// One-sided limit of the `order`-th derivative at `x0`.
    pub fn one_sided_limit(&self, order: usize, x0: f64, side: Side) -> Result<f64> {
        let (lo, hi) = self.interval();
        let outside = match side {
            Side::Left => x0 <= lo,
            Side::Right => x0 >= hi,
        };
        if outside {
            // zero extension beyond the ambient interval
            return Ok(0.0);
        }
        let idx = match side {
            Side::Left => self.pieces.partition_point(|p| p.hi < x0),
            Side::Right => self.pieces.partition_point(|p| p.hi <= x0),
        };
        let piece = &self.pieces[idx.min(self.pieces.len() - 1)];
        if order >= piece.orders() {
            return Err(Error::InvalidParameter(format!(
                "derivative of order {order} not available on piece [{}, {}]",
                piece.lo, piece.hi
            )));
        }
        let at_endpoint = match side {
            Side::Left => x0 == piece.hi,
            Side::Right => x0 == piece.lo,
        };
        let singular = at_endpoint
            && match side {
                Side::Left => piece.singular_hi,
                Side::Right => piece.singular_lo,
            };
        let f = &piece.derivatives[order];
        if singular {
            richardson_limit(|x| f(x), x0, side, 1e-2 * (piece.hi - piece.lo))
        } else {
            let v = f(x0);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { x: x0 })
            }
        }
    }

    /// Pieces shifted by `by` derivative orders.
    fn differentiated(&self, by: usize) -> Result<Self> {
        if self.orders() <= by {
            return Err(Error::InvalidParameter(format!(
                "function carries {} evaluator(s); {} more are needed to differentiate {by} time(s)",
                self.orders(),
                by + 1 - self.orders()
            )));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: p.lo,
                hi: p.hi,
                derivatives: p.derivatives[by..].to_vec(),
                singular_lo: p.singular_lo,
                singular_hi: p.singular_hi,
            })
            .collect();
        Ok(Self { pieces })
    }

    /// Delta terms from jumps of the `order`-th derivative at breakpoints.
    fn jumps(&self, order: usize) -> Result<Vec<DeltaTerm>> {
        let mut out = Vec::new();
        for x0 in self.breakpoints() {
            let right = self.one_sided_limit(order, x0, Side::Right)?;
            let left = self.one_sided_limit(order, x0, Side::Left)?;
            let jump = right - left;
            if jump.abs() >= JUMP_THRESHOLD {
                out.push(DeltaTerm {
                    location: x0,
                    coefficient: jump,
                });
            }
        }
        Ok(out)
    }

    /// `alpha * f + beta * g` on the common refinement of both breakpoint
    /// sets. Both functions must share the ambient interval.
    pub fn linear_combination(alpha: f64, f: &Self, beta: f64, g: &Self) -> Result<Self> {
        if f.interval() != g.interval() {
            return Err(Error::InvalidParameter(format!(
                "ambient intervals differ: {:?} vs {:?}",
                f.interval(),
                g.interval()
            )));
        }
        let (lo, hi) = f.interval();
        let mut cuts: Vec<f64> = f.breakpoints().into_iter().chain(g.breakpoints()).collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(|a, b| a.total_cmp(b));
        cuts.dedup();
        let orders = f.orders().min(g.orders());
        let mut pieces = Vec::with_capacity(cuts.len() - 1);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let pf = &f.pieces[f.piece_index(mid).expect("mid lies inside")];
            let pg = &g.pieces[g.piece_index(mid).expect("mid lies inside")];
            let derivatives = (0..orders)
                .map(|k| {
                    let ef = pf.derivatives[k].clone();
                    let eg = pg.derivatives[k].clone();
                    evaluator(move |x| alpha * ef(x) + beta * eg(x))
                })
                .collect();
            pieces.push(Piece {
                lo: a,
                hi: b,
                derivatives,
                singular_lo: (pf.singular_lo && pf.lo == a) || (pg.singular_lo && pg.lo == a),
                singular_hi: (pf.singular_hi && pf.hi == b) || (pg.singular_hi && pg.hi == b),
            });
        }
        Self::new(pieces)
    }
}

/// A point mass `coefficient * delta(x - location)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub location: f64,
    pub coefficient: f64,
}

/// Distributional derivative: a piecewise smooth part plus point terms.
#[derive(Debug, Clone)]
pub struct WeakDerivative {
    pub smooth_part: PiecewiseSmooth,
    pub delta_terms: Vec<DeltaTerm>,
    pub delta_prime_terms: Vec<DeltaTerm>,
}

impl WeakDerivative {
    /// A weak derivative is square integrable iff it carries no point terms.
    pub fn is_l2_finite(&self) -> bool {
        self.delta_terms.is_empty() && self.delta_prime_terms.is_empty()
    }
}

/// One-sided limit of a scalar evaluator at `x0`.
///
/// Regular endpoints are evaluated directly. For endpoints declared
/// singular the limit is extrapolated from `f(x0 ± eps0 / 2^k)` by a
/// Richardson table; a divergent sequence yields [`Error::NonFinite`].
pub fn one_sided_limit<F: Fn(f64) -> f64>(f: F, x0: f64, side: Side, singular: bool) -> Result<f64> {
    if singular {
        return richardson_limit(f, x0, side, 1e-3 * x0.abs().max(1.0));
    }
    let v = f(x0);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x: x0 })
    }
}

fn richardson_limit<F: Fn(f64) -> f64>(f: F, x0: f64, side: Side, eps0: f64) -> Result<f64> {
    const LEVELS: usize = 10;
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(LEVELS);
    for k in 0..LEVELS {
        let eps = eps0 / f64::powi(2.0, k as i32);
        let mut row = vec![f(x0 + sign * eps)];
        for j in 1..=k {
            let factor = f64::powi(2.0, j as i32) - 1.0;
            let r = row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / factor;
            row.push(r);
        }
        table.push(row);
    }
    let best = table[LEVELS - 1][LEVELS - 1];
    let prev = table[LEVELS - 2][LEVELS - 2];
    let scale = best.abs().max(1.0);
    if best.is_finite() && (best - prev).abs() <= 1e-6 * scale {
        Ok(best)
    } else {
        Err(Error::NonFinite { x: x0 })
    }
}

/// First weak derivative: piecewise derivative plus a delta at every jump
/// of `f`.
pub fn weak_derivative(f: &PiecewiseSmooth) -> Result<WeakDerivative> {
    Ok(WeakDerivative {
        smooth_part: f.differentiated(1)?,
        delta_terms: f.jumps(0)?,
        delta_prime_terms: Vec::new(),
    })
}

/// Second weak derivative: piecewise second derivative, a delta at every
/// jump of `f'` and a delta-prime at every jump of `f`.
pub fn weak_second_derivative(f: &PiecewiseSmooth) -> Result<WeakDerivative> {
    Ok(WeakDerivative {
        smooth_part: f.differentiated(2)?,
        delta_terms: f.jumps(1)?,
        delta_prime_terms: f.jumps(0)?,
    })
}

/// `∫ |w|²` over `interval`; `+∞` as soon as a point term lies in the
/// closed interval.
pub fn l2_norm_squared(w: &WeakDerivative, interval: (f64, f64)) -> Result<f64> {
    let (lo, hi) = interval;
    let (alo, ahi) = w.smooth_part.interval();
    if !(lo <= hi) || lo < alo || hi > ahi {
        return Err(Error::InvalidParameter(format!(
            "interval [{lo}, {hi}] is not inside the ambient interval [{alo}, {ahi}]"
        )));
    }
    let hits = |terms: &[DeltaTerm]| terms.iter().any(|d| d.location >= lo && d.location <= hi);
    if hits(&w.delta_terms) || hits(&w.delta_prime_terms) {
        return Ok(f64::INFINITY);
    }
    let quad = AdaptiveQuadrature::default();
    let mut total = 0.0;
    for piece in w.smooth_part.pieces() {
        let a = piece.lo.max(lo);
        let b = piece.hi.min(hi);
        if a < b {
            let f = &piece.derivatives[0];
            total += quad.integrate(|x| f(x).powi(2), a, b, L2_QUADRATURE_TOL)?;
        }
    }
    Ok(total)
}

/// `h · Σ |D²_h f(x_i)|²` with `D_h` the symmetric difference quotient
/// applied twice, i.e. `D²_h f(x) = [f(x+2h) - 2f(x) + f(x-2h)] / (4h²)`.
///
/// The mesh starts at the left end of the ambient interval and only points
/// whose stencil stays inside it are summed. Breakpoints must fall on the
/// mesh.
pub fn discrete_second_derivative_norm(f: &PiecewiseSmooth, h: f64) -> Result<f64> {
    let (lo, hi) = f.interval();
    let len = hi - lo;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("mesh spacing must be positive, got {h}")));
    }
    let n_real = len / h;
    let n = n_real.round() as usize;
    if (n_real - n as f64).abs() > 1e-9 * n_real.max(1.0) || n < 4 {
        return Err(Error::InvalidParameter(format!(
            "mesh spacing {h} does not divide the interval length {len} into at least 4 cells"
        )));
    }
    for bp in f.breakpoints() {
        let k = (bp - lo) / h;
        if (k - k.round()).abs() > 1e-9 * k.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("breakpoint {bp} is not on the mesh of spacing {h}")));
        }
    }
    let x_at = |i: usize| lo + i as f64 * h;
    let inv = 1.0 / (4.0 * h * h);
    let sum: f64 = (2..=n - 2)
        .map(|i| {
            let d2 = (f.value(x_at(i + 2)) - 2.0 * f.value(x_at(i)) + f.value(x_at(i - 2))) * inv;
            d2 * d2
        })
        .sum();
    Ok(h * sum)
}
