//! Numerov shooting solver, independent of the spectral one.
//!
//! The eigen-equation `-κ ψ'' + V ψ = E ψ` is integrated on a uniform grid
//! from both ends toward a match point. Walls with an inverse-square
//! potential start from the leading Frobenius power `s^p` at a small offset
//! `ε` from the wall; hard walls start from `ψ = 0`.
//!
//! Eigenvalues are bracketed with a Sturm count: with `N_l`, `N_r` the
//! sign changes of the left and right solutions up to the match point and
//! `φ_l`, `φ_r` their Prüfer phases `atan2(ψ, ℓψ') mod π` there, the number
//! of eigenvalues below `E` is `N_l + N_r + [φ_l ≥ φ_r]`. Bisection on that
//! count converges on the zero of the phase mismatch without ever crossing
//! one of its poles.

use crate::error::{BracketSide, Error, Result};
use crate::potentials::{singularity_metadata, ModelSpec};
use crate::rayleigh_ritz::count_sign_changes;
use crate::stats::least_squares_slope;

pub const DEFAULT_GRID_POINTS: usize = 20001;
pub const MIN_GRID_POINTS: usize = 1000;
/// Default wall offset as a fraction of the model's length scale.
pub const DEFAULT_OFFSET: f64 = 1e-6;
pub const OFFSET_RANGE: (f64, f64) = (1e-8, 1e-3);
/// The half oscillator is truncated at `x = 12 √ħ` with `ψ = 0`.
pub const HALF_HO_EXTENT: f64 = 12.0;
/// Upper bracket limit in units of the model's energy scale.
pub const DEFAULT_E_MAX: f64 = 1e4;
/// Wall distances, in units of the length scale, used by the exponent fit.
pub const EXPONENT_WINDOW: (f64, f64) = (1e-4, 1e-2);
pub const MIN_FIT_POINTS: usize = 20;
pub const MIN_ENERGY_TOL: f64 = 1e-10;

const RESCALE_INTERVAL: usize = 512;
const RESCALE_LIMIT: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    /// Distance of the first/last grid point from a singular wall.
    pub offset: f64,
}

impl ShootingGrid {
    /// Grid covering the model's domain; `offset` is relative to the
    /// model's length scale and only applies at inverse-square walls.
    pub fn for_model(model: &ModelSpec, points: usize, offset: f64) -> Result<Self> {
        if points < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {points}"
            )));
        }
        let scale = model.length_scale();
        let needs_offset = matches!(model, ModelSpec::AqBox { .. } | ModelSpec::HalfHarmonic { .. });
        if needs_offset && !(OFFSET_RANGE.0..=OFFSET_RANGE.1).contains(&offset) {
            return Err(Error::InvalidParameter(format!(
                "wall offset must lie in [{:e}, {:e}] length units, got {offset:e}",
                OFFSET_RANGE.0, OFFSET_RANGE.1
            )));
        }
        let eps = offset * scale;
        let (x_min, x_max, offset) = match model {
            ModelSpec::CqBox { geom } => (-geom.b(), geom.b(), 0.0),
            ModelSpec::AqBox { geom } => (-geom.b() + eps, geom.b() - eps, eps),
            ModelSpec::HalfHarmonic { .. } => (eps, HALF_HO_EXTENT * scale, eps),
            ModelSpec::AntiBox { .. } => {
                return Err(Error::DomainError {
                    x: f64::NAN,
                    domain: "anti-box exterior is unbounded; shooting is not supported".into(),
                })
            }
        };
        Ok(Self {
            x_min,
            x_max,
            points,
            offset,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    pub energy: f64,
    /// `sin(φ_l - φ_r)`: the Prüfer phase mismatch at the match point,
    /// zero at eigenvalues and bounded everywhere.
    pub mismatch: f64,
    /// Sign changes of the assembled left/right solution.
    pub node_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum WallStart {
    /// `ψ = 0` on the wall grid point.
    Dirichlet,
    /// `ψ = s^p` with `s` the distance to a wall lying `offset` beyond the grid.
    Frobenius { exponent: f64 },
}

/// Left and right Numerov solutions at one trial energy.
struct Sweep {
    left: Vec<f64>,
    right: Vec<f64>,
    f: Vec<f64>,
}

/// Numerov shooting solver bound to a model and grid.
#[derive(Debug, Clone)]
pub struct Shooter {
    model: ModelSpec,
    grid: ShootingGrid,
    potential: Vec<f64>,
    kinetic: f64,
    left_start: WallStart,
    right_start: WallStart,
    match_index: usize,
    e_max: f64,
}

impl Shooter {
    pub fn new(model: &ModelSpec, points: usize, offset: f64) -> Result<Self> {
        let grid = ShootingGrid::for_model(model, points, offset)?;
        Self::with_grid(model, grid)
    }

    pub fn with_defaults(model: &ModelSpec) -> Result<Self> {
        Self::new(model, DEFAULT_GRID_POINTS, DEFAULT_OFFSET)
    }

    pub fn with_grid(model: &ModelSpec, grid: ShootingGrid) -> Result<Self> {
        if grid.points < MIN_GRID_POINTS || !(grid.x_min < grid.x_max) {
            return Err(Error::InvalidParameter(format!(
                "invalid shooting grid [{}, {}] with {} points",
                grid.x_min, grid.x_max, grid.points
            )));
        }
        let kinetic = model.kinetic_coefficient();
        let scale = model.energy_scale();
        if !(kinetic.is_finite() && kinetic > 0.0 && scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{} parameters overflow double precision (kinetic coefficient {kinetic:e}, energy scale {scale:e})",
                model.name()
            )));
        }
        let (left_start, right_start) = match model {
            ModelSpec::CqBox { .. } => (WallStart::Dirichlet, WallStart::Dirichlet),
            ModelSpec::AqBox { .. } => {
                let walls = singularity_metadata(model)?;
                (
                    WallStart::Frobenius {
                        exponent: walls[0].frobenius_exponent(kinetic),
                    },
                    WallStart::Frobenius {
                        exponent: walls[1].frobenius_exponent(kinetic),
                    },
                )
            }
            ModelSpec::HalfHarmonic { .. } => {
                let walls = singularity_metadata(model)?;
                (
                    WallStart::Frobenius {
                        exponent: walls[0].frobenius_exponent(kinetic),
                    },
                    WallStart::Dirichlet,
                )
            }
            ModelSpec::AntiBox { .. } => {
                return Err(Error::DomainError {
                    x: f64::NAN,
                    domain: "anti-box exterior is unbounded; shooting is not supported".into(),
                })
            }
        };
        let potential = (0..grid.points)
            .map(|i| match model {
                // hard walls sit on the end points; V = 0 inside
                ModelSpec::CqBox { .. } => Ok(0.0),
                _ => model.potential(grid.x(i)),
            })
            .collect::<Result<Vec<f64>>>()?;
        let match_index = match model {
            ModelSpec::HalfHarmonic { .. } => {
                let mut best = 1;
                for i in 1..grid.points - 1 {
                    if potential[i] < potential[best] {
                        best = i;
                    }
                }
                best
            }
            _ => {
                // grid point closest to x = 0
                let i = (-grid.x_min / grid.spacing()).round() as usize;
                i.clamp(1, grid.points - 2)
            }
        };
        Ok(Self {
            model: *model,
            grid,
            potential,
            kinetic,
            left_start,
            right_start,
            match_index: match_index.clamp(2, grid.points - 3),
            e_max: DEFAULT_E_MAX * model.energy_scale(),
        })
    }

    /// Overrides the upper limit used when bracketing eigenvalues.
    pub fn with_e_max(mut self, e_max: f64) -> Self {
        self.e_max = e_max;
        self
    }

    pub fn grid(&self) -> &ShootingGrid {
        &self.grid
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn match_point(&self) -> f64 {
        self.grid.x(self.match_index)
    }

    fn start_values(&self, start: WallStart) -> (f64, f64) {
        let h = self.grid.spacing();
        match start {
            WallStart::Dirichlet => (0.0, h),
            WallStart::Frobenius { exponent } => {
                let s0 = self.grid.offset;
                (s0.powf(exponent), (s0 + h).powf(exponent))
            }
        }
    }

    fn sweep(&self, energy: f64) -> Sweep {
        let n = self.grid.points;
        let m = self.match_index;
        let f: Vec<f64> = self.potential.iter().map(|v| (v - energy) / self.kinetic).collect();
        let mut left = vec![0.0; n];
        let mut right = vec![0.0; n];

        let (a, b) = self.start_values(self.left_start);
        left[0] = a;
        left[1] = b;
        self.numerov(&f, &mut left, (0..=m + 1).collect::<Vec<_>>().as_slice());

        let (a, b) = self.start_values(self.right_start);
        right[n - 1] = a;
        right[n - 2] = b;
        self.numerov(&f, &mut right, ((m - 1)..n).rev().collect::<Vec<_>>().as_slice());
        Sweep { left, right, f }
    }

    /// Runs the Numerov recurrence along `path` (consecutive grid indices,
    /// first two already set), rescaling the filled part when it grows too
    /// large.
    ///
    /// The recurrence is carried in summed-difference form on
    /// `w = (1 - h²f/12) ψ`, `Δw_{i+1} = Δw_i + h² f_i ψ_i`, so the energy
    /// enters through the increments at full precision even when `h²f` is
    /// far below machine epsilon relative to one.
    fn numerov(&self, f: &[f64], psi: &mut [f64], path: &[usize]) {
        let h2 = self.grid.spacing().powi(2);
        let c = h2 / 12.0;
        let (i0, i1) = (path[0], path[1]);
        let mut w = psi[i1] * (1.0 - c * f[i1]);
        let mut dw = w - psi[i0] * (1.0 - c * f[i0]);
        let mut peak: f64 = psi[i0].abs().max(psi[i1].abs());
        for step in 2..path.len() {
            let (prev, next) = (path[step - 1], path[step]);
            dw += h2 * f[prev] * psi[prev];
            w += dw;
            psi[next] = w / (1.0 - c * f[next]);
            peak = peak.max(psi[next].abs());
            if step % RESCALE_INTERVAL == 0 && peak > RESCALE_LIMIT {
                for &i in &path[..=step] {
                    psi[i] /= peak;
                }
                w /= peak;
                dw /= peak;
                peak = 1.0;
            }
        }
    }

    /// Derivative at `i` from the Numerov-consistent three-point formula.
    fn derivative(&self, f: &[f64], psi: &[f64], i: usize) -> f64 {
        let h = self.grid.spacing();
        let c2 = h * h / 6.0;
        (psi[i + 1] * (1.0 - c2 * f[i + 1]) - psi[i - 1] * (1.0 - c2 * f[i - 1])) / (2.0 * h)
    }

    fn phase(&self, psi: f64, dpsi: f64) -> f64 {
        let ell = self.model.length_scale();
        let mut phi = psi.atan2(ell * dpsi);
        if phi < 0.0 {
            phi += std::f64::consts::PI;
        }
        if phi >= std::f64::consts::PI {
            phi -= std::f64::consts::PI;
        }
        phi
    }

    fn phases(&self, sw: &Sweep) -> (f64, f64) {
        let m = self.match_index;
        let phi_l = self.phase(sw.left[m], self.derivative(&sw.f, &sw.left, m));
        let phi_r = self.phase(sw.right[m], self.derivative(&sw.f, &sw.right, m));
        (phi_l, phi_r)
    }

    fn side_nodes(&self, sw: &Sweep) -> (usize, usize) {
        let m = self.match_index;
        let nl = count_sign_changes(sw.left[..=m].iter().copied());
        let nr = count_sign_changes(sw.right[m..].iter().copied());
        (nl, nr)
    }

    /// Number of eigenvalues strictly below `energy`.
    pub fn levels_below(&self, energy: f64) -> usize {
        let sw = self.sweep(energy);
        let (nl, nr) = self.side_nodes(&sw);
        let (phi_l, phi_r) = self.phases(&sw);
        nl + nr + usize::from(phi_l >= phi_r)
    }

    /// Right solution rescaled onto the left one by least squares over
    /// the three points around the match index.
    fn right_scale(&self, sw: &Sweep) -> f64 {
        let m = self.match_index;
        let (mut num, mut den) = (0.0, 0.0);
        for i in m - 1..=m + 1 {
            num += sw.left[i] * sw.right[i];
            den += sw.right[i] * sw.right[i];
        }
        num / den
    }

    fn assemble(&self, sw: &Sweep) -> Vec<f64> {
        let m = self.match_index;
        let scale = self.right_scale(sw);
        (0..self.grid.points)
            .map(|i| if i <= m { sw.left[i] } else { scale * sw.right[i] })
            .collect()
    }

    pub fn integrate(&self, energy: f64) -> MatchResult {
        let sw = self.sweep(energy);
        let (phi_l, phi_r) = self.phases(&sw);
        MatchResult {
            energy,
            mismatch: (phi_l - phi_r).sin(),
            node_count: count_sign_changes(self.assemble(&sw)),
        }
    }

    fn lower_bound(&self) -> f64 {
        self.potential.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn bracket(&self, level: usize) -> Result<(f64, f64)> {
        let lo = self.lower_bound();
        if self.levels_below(lo) > level {
            return Err(Error::BracketFailure {
                level,
                side: BracketSide::Lower,
                e_max: self.e_max,
            });
        }
        let mut step = self.model.energy_scale();
        let mut last = lo;
        loop {
            let hi = lo + step;
            if !(hi <= self.e_max) {
                return Err(Error::BracketFailure {
                    level,
                    side: BracketSide::Upper,
                    e_max: self.e_max,
                });
            }
            if self.levels_below(hi) > level {
                return Ok((last, hi));
            }
            last = hi;
            step *= 2.0;
        }
    }

    /// Eigenvalue `level` (0-based) to within `tol`.
    pub fn search(&self, level: usize, tol: f64) -> Result<f64> {
        if !(tol >= MIN_ENERGY_TOL) {
            return Err(Error::InvalidParameter(format!(
                "energy tolerance must be >= {MIN_ENERGY_TOL:e}, got {tol:e}"
            )));
        }
        let (mut lo, mut hi) = self.bracket(level)?;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.levels_below(mid) > level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Refines an approximate eigenvalue to the resolution of the grid
    /// problem by bisecting on the level count until the bracket stops
    /// shrinking. Returns the energy and the level index.
    pub fn polish(&self, energy: f64) -> Result<(f64, usize)> {
        let mut delta = 1e-8 * energy.abs().max(self.model.energy_scale());
        for _ in 0..8 {
            let mut lo = energy - delta;
            let mut hi = energy + delta;
            let k = self.levels_below(lo);
            if self.levels_below(hi) == k + 1 {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.levels_below(mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok((0.5 * (lo + hi), k));
            }
            delta *= 10.0;
        }
        Err(Error::InvalidParameter(format!(
            "no isolated eigenvalue found near E = {energy}"
        )))
    }

    /// Grid abscissae and the assembled solution at `energy`, scaled to
    /// unit maximum modulus.
    pub fn eigenfunction(&self, energy: f64) -> (Vec<f64>, Vec<f64>) {
        let sw = self.sweep(energy);
        let mut psi = self.assemble(&sw);
        let peak = psi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if peak > 0.0 {
            psi.iter_mut().for_each(|v| *v /= peak);
        }
        ((0..self.grid.points).map(|i| self.grid.x(i)).collect(), psi)
    }

    /// Wall exponent at the left end for a converged eigenvalue.
    ///
    /// The energy is polished, the right-started solution is carried from
    /// the match point back to the left wall, and `ln|ψ|` is fitted against
    /// `ln s` over the exponent window.
    pub fn boundary_exponent(&self, energy: f64) -> Result<f64> {
        let (energy, _) = self.polish(energy)?;
        let sw = self.sweep(energy);
        let m = self.match_index;
        let mut psi = sw.right.clone();
        let path: Vec<usize> = (0..=m + 1).rev().collect();
        self.numerov(&sw.f, &mut psi, &path);

        let ell = self.model.length_scale();
        let (lo, hi) = (EXPONENT_WINDOW.0 * ell, EXPONENT_WINDOW.1 * ell);
        let pts: Vec<(f64, f64)> = (0..=m)
            .filter_map(|i| {
                let s = match self.left_start {
                    WallStart::Dirichlet => i as f64 * self.grid.spacing(),
                    WallStart::Frobenius { .. } => self.grid.offset + i as f64 * self.grid.spacing(),
                };
                (s >= lo && s <= hi && psi[i] != 0.0).then(|| (s.ln(), psi[i].abs().ln()))
            })
            .collect();
        if pts.len() < MIN_FIT_POINTS {
            return Err(Error::FitFailure {
                points: pts.len(),
                required: MIN_FIT_POINTS,
            });
        }
        Ok(least_squares_slope(&pts))
    }
}

/// Integrates at a single trial energy on `grid`.
pub fn numerov_integrate(model: &ModelSpec, energy: f64, grid: &ShootingGrid) -> Result<MatchResult> {
    Ok(Shooter::with_grid(model, *grid)?.integrate(energy))
}

/// Eigenvalue `level` on the default grid.
pub fn eigenvalue_search(model: &ModelSpec, level: usize, tol: f64) -> Result<f64> {
    Shooter::with_defaults(model)?.search(level, tol)
}

/// Probe grid size. The Numerov solution needs a few steps to settle away
/// from a singular start, so the spacing is half the window's inner edge.
pub fn probe_grid_points(model: &ModelSpec) -> usize {
    let ell = model.length_scale();
    let extent = match model {
        ModelSpec::HalfHarmonic { .. } => HALF_HO_EXTENT * ell,
        _ => 2.0 * ell,
    };
    let h = 0.5 * EXPONENT_WINDOW.0 * ell;
    ((extent / h).ceil() as usize + 1).max(DEFAULT_GRID_POINTS)
}

/// Wall exponent of the eigenfunction at `energy`, on a probe grid.
pub fn boundary_exponent_probe(model: &ModelSpec, energy: f64) -> Result<f64> {
    Shooter::new(model, probe_grid_points(model), DEFAULT_OFFSET)?.boundary_exponent(energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic_box::{cq_eigenvalue, BoxGeometry};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn cq_unit() -> ModelSpec {
        ModelSpec::cq_box(1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        let aq = ModelSpec::aq_box(1.0, 1.0).unwrap();
        assert!(ShootingGrid::for_model(&aq, 999, 1e-6).is_err());
        assert!(ShootingGrid::for_model(&aq, 2000, 1e-2).is_err());
        assert!(ShootingGrid::for_model(&aq, 2000, 1e-9).is_err());
        let g = ShootingGrid::for_model(&aq, 2001, 1e-6).unwrap();
        assert_abs_diff_eq!(g.x_min, -1.0 + 1e-6, epsilon = 1e-15);
        assert_eq!(g.x(2000), g.x_max);
        let anti = ModelSpec::anti_box(1.0, 1.0, 1.0).unwrap();
        assert_eq!(ShootingGrid::for_model(&anti, 2001, 1e-6).unwrap_err().name(), "DomainError");
        assert_eq!(Shooter::with_defaults(&anti).unwrap_err().name(), "DomainError");
    }

    #[test]
    fn cq_mismatch_vanishes_at_eigenvalue() {
        let grid = ShootingGrid::for_model(&cq_unit(), 10_000, 0.0).unwrap();
        let r = numerov_integrate(&cq_unit(), PI * PI / 4.0, &grid).unwrap();
        assert!(r.mismatch.abs() < 1e-6, "{r:?}");
        assert_eq!(r.node_count, 0);
        let r = numerov_integrate(&cq_unit(), 2.0, &grid).unwrap();
        assert!(r.mismatch.abs() > 0.01, "{r:?}");
    }

    #[test]
    fn half_ho_mismatch_vanishes_at_ground_level() {
        let model = ModelSpec::half_harmonic(1.0).unwrap();
        let grid = ShootingGrid::for_model(&model, DEFAULT_GRID_POINTS, DEFAULT_OFFSET).unwrap();
        let r = numerov_integrate(&model, 2.0, &grid).unwrap();
        assert!(r.mismatch.abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn cq_levels() {
        let shooter = Shooter::with_defaults(&cq_unit()).unwrap();
        for k in 0..6 {
            let e = shooter.search(k, 1e-10).unwrap();
            let exact = cq_eigenvalue(k as u32 + 1, &BoxGeometry::unit()).unwrap();
            assert_relative_eq!(e, exact, max_relative = 1e-8);
            assert_eq!(shooter.integrate(e).node_count, k);
        }
        assert_relative_eq!(
            eigenvalue_search(&cq_unit(), 0, 1e-10).unwrap(),
            PI * PI / 4.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn half_ho_levels() {
        let model = ModelSpec::half_harmonic(1.0).unwrap();
        let shooter = Shooter::new(&model, 40_001, DEFAULT_OFFSET).unwrap();
        for k in 0..5 {
            let e = shooter.search(k, 1e-10).unwrap();
            assert_relative_eq!(e, 2.0 * (k as f64 + 1.0), max_relative = 1e-6);
            assert_eq!(shooter.integrate(e).node_count, k);
        }
    }

    #[test]
    fn half_ho_eigenfunction_matches_laguerre_form() {
        use crate::quadrature::laguerre_eval;
        let model = ModelSpec::half_harmonic(1.0).unwrap();
        let shooter = Shooter::new(&model, 40_001, DEFAULT_OFFSET).unwrap();
        for k in 0..3 {
            let e = shooter.search(k, 1e-10).unwrap();
            let (xs, psi) = shooter.eigenfunction(e);
            let exact: Vec<f64> = xs
                .iter()
                .map(|&x| x.powf(1.5) * laguerre_eval(1.0, k, x * x) * (-x * x / 2.0).exp())
                .collect();
            let peak = exact.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let i = exact.iter().position(|v| v.abs() == peak).unwrap();
            let sign = (psi[i] / exact[i]).signum();
            for (p, q) in psi.iter().zip(&exact) {
                assert!((p * sign - q / peak).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn overflowing_scales_are_rejected() {
        let tiny = ModelSpec::aq_box(1e-200, 1.0).unwrap();
        assert_eq!(Shooter::with_defaults(&tiny).unwrap_err().name(), "InvalidParameter");
        let huge = ModelSpec::half_harmonic(1e200).unwrap();
        assert_eq!(Shooter::with_defaults(&huge).unwrap_err().name(), "InvalidParameter");
    }

    #[test]
    fn bracket_failure_reports_side() {
        let shooter = Shooter::with_defaults(&cq_unit()).unwrap().with_e_max(5.0);
        match shooter.search(3, 1e-8).unwrap_err() {
            Error::BracketFailure { level, side, .. } => {
                assert_eq!(level, 3);
                assert_eq!(side, BracketSide::Upper);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(shooter.search(0, 1e-14).is_err());
    }

    #[test]
    fn boundary_exponents() {
        let aq = ModelSpec::aq_box(1.0, 1.0).unwrap();
        let e0 = eigenvalue_search(&aq, 0, 1e-10).unwrap();
        assert_abs_diff_eq!(boundary_exponent_probe(&aq, e0).unwrap(), 1.5, epsilon = 0.01);
        let e0 = eigenvalue_search(&cq_unit(), 0, 1e-10).unwrap();
        assert_abs_diff_eq!(boundary_exponent_probe(&cq_unit(), e0).unwrap(), 1.0, epsilon = 0.01);
        let half = ModelSpec::half_harmonic(1.0).unwrap();
        assert_abs_diff_eq!(boundary_exponent_probe(&half, 2.0).unwrap(), 1.5, epsilon = 0.01);
    }

    #[test]
    fn coarse_grid_cannot_fit_exponent() {
        let half = ModelSpec::half_harmonic(1.0).unwrap();
        let shooter = Shooter::new(&half, 2001, DEFAULT_OFFSET).unwrap();
        let e = shooter.search(0, 1e-10).unwrap();
        assert_eq!(shooter.boundary_exponent(e).unwrap_err().name(), "FitFailure");
    }

    #[test]
    fn overflow_is_rescaled() {
        // a deep trial energy below the spectrum makes solutions grow fast
        let half = ModelSpec::half_harmonic(1.0).unwrap();
        let shooter = Shooter::new(&half, 20_001, DEFAULT_OFFSET).unwrap();
        let r = shooter.integrate(0.1);
        assert!(r.mismatch.is_finite());
        let (_, psi) = shooter.eigenfunction(0.1);
        assert!(psi.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn aq_levels_agree_with_rayleigh_ritz() {
        use crate::rayleigh_ritz::compute_spectrum;
        let aq = ModelSpec::aq_box(1.0, 1.0).unwrap();
        let rr = compute_spectrum(&aq, 48).unwrap();
        let shooter = Shooter::new(&aq, 40_001, DEFAULT_OFFSET).unwrap();
        for k in 0..6 {
            let e = shooter.search(k, 1e-10).unwrap();
            assert_relative_eq!(e, rr.eigenvalues[k], max_relative = 1e-6);
            // node law and parity of the assembled solution
            assert_eq!(shooter.integrate(e).node_count, k);
            let (xs, psi) = shooter.eigenfunction(e);
            let n = xs.len();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for i in (0..n / 2).step_by(97) {
                assert!((psi[i] - sign * psi[n - 1 - i]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn aq_offset_robustness() {
        let aq = ModelSpec::aq_box(1.0, 1.0).unwrap();
        let levels = |offset: f64| -> Vec<f64> {
            let s = Shooter::new(&aq, DEFAULT_GRID_POINTS, offset).unwrap();
            (0..4).map(|k| s.search(k, 1e-10).unwrap()).collect()
        };
        let mut prev = levels(1e-7);
        for offset in [1e-6, 1e-5, 1e-4] {
            let next = levels(offset);
            for (a, b) in prev.iter().zip(&next) {
                assert!((a - b).abs() / b < 1e-7, "offset {offset:e}: {a} vs {b}");
            }
            prev = next;
        }
    }

    #[test]
    fn cq_grid_order_is_four() {
        use crate::stats::observed_orders;
        let values: Vec<f64> = [1001, 2001, 4001]
            .iter()
            .map(|&m| Shooter::new(&cq_unit(), m, 0.0).unwrap().search(11, 1e-10).unwrap())
            .collect();
        let order = observed_orders(&values)[0];
        assert!((3.5..=4.5).contains(&order), "order {order}");
    }

    #[test]
    fn aq_grid_order_is_limited_by_the_wall() {
        // ψ ~ s^{3/2} has unbounded higher derivatives at the wall, which
        // caps the uniform-grid Numerov order well below four.
        use crate::stats::observed_orders;
        let aq = ModelSpec::aq_box(1.0, 1.0).unwrap();
        let values: Vec<f64> = [2001, 4001, 8001, 16001]
            .iter()
            .map(|&m| Shooter::new(&aq, m, DEFAULT_OFFSET).unwrap().search(2, 1e-10).unwrap())
            .collect();
        for order in observed_orders(&values) {
            assert!((2.0..=3.0).contains(&order), "order {order}");
        }
        // still monotone and converging from above
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }
}
