//! Closed-form canonical particle in a box on (-b, b) with `2m = 1`.
//!
//! Level `n >= 1` has `E_n = ħ² n² π² / (4 b²)` and eigenfunction
//! `cos(nπx/2b)` for odd `n`, `sin(nπx/2b)` for even `n`, zero outside the
//! box. Only those trig modes vanish at both walls, which is what
//! [`classify_trig_modes`] counts.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::piecewise::{evaluator, Evaluator, PiecewiseSmooth};

/// Half-width `b` and `ħ`, both positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGeometry {
    b: f64,
    hbar: f64,
}

impl BoxGeometry {
    pub fn new(b: f64, hbar: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidParameter(format!("b must be finite and > 0, got {b}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be finite and > 0, got {hbar}")));
        }
        Ok(Self { b, hbar })
    }

    /// `b = ħ = 1`.
    pub fn unit() -> Self {
        Self { b: 1.0, hbar: 1.0 }
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Natural energy unit `ħ²/b²`.
    pub fn energy_scale(&self) -> f64 {
        (self.hbar / self.b).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrigKind {
    Cosine,
    Sine,
}

/// `cos(nπx/2b)` or `sin(nπx/2b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrigMode {
    pub n: u32,
    pub kind: TrigKind,
}

impl TrigMode {
    pub fn eval(&self, x: f64, geom: &BoxGeometry) -> f64 {
        let arg = self.n as f64 * PI * x / (2.0 * geom.b);
        match self.kind {
            TrigKind::Cosine => arg.cos(),
            TrigKind::Sine => arg.sin(),
        }
    }

    /// Whether the mode vanishes at both walls.
    pub fn satisfies_dirichlet(&self) -> bool {
        match self.kind {
            TrigKind::Cosine => self.n % 2 == 1,
            TrigKind::Sine => self.n.is_multiple_of(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqLevel {
    pub n: u32,
    pub energy: f64,
    pub mode: TrigMode,
}

fn mode_for(n: u32) -> TrigMode {
    let kind = if n % 2 == 1 { TrigKind::Cosine } else { TrigKind::Sine };
    TrigMode { n, kind }
}

fn check_index(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("level index n must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Unnormalized eigenfunction, exactly zero for `|x| >= b`.
pub fn cq_eigenfunction(n: u32, x: f64, geom: &BoxGeometry) -> Result<f64> {
    check_index(n)?;
    if x.abs() >= geom.b {
        return Ok(0.0);
    }
    Ok(mode_for(n).eval(x, geom))
}

/// `E_n = ħ² n² π² / (4 b²)`.
pub fn cq_eigenvalue(n: u32, geom: &BoxGeometry) -> Result<f64> {
    check_index(n)?;
    let k = n as f64 * PI / (2.0 * geom.b);
    Ok(geom.hbar * geom.hbar * k * k)
}

/// `∫_{-b}^{b} φ_n² dx`, which equals `b` for every level.
pub fn cq_norm_squared(n: u32, geom: &BoxGeometry) -> Result<f64> {
    check_index(n)?;
    Ok(geom.b)
}

pub fn cq_level(n: u32, geom: &BoxGeometry) -> Result<CqLevel> {
    Ok(CqLevel {
        n,
        energy: cq_eigenvalue(n, geom)?,
        mode: mode_for(n),
    })
}

/// Splits `{cos, sin}(nπx/2b), n = 1..=m` into modes vanishing at both walls
/// and the rest. Each list has exactly `m` entries.
pub fn classify_trig_modes(m: u32) -> Result<(Vec<TrigMode>, Vec<TrigMode>)> {
    check_index(m)?;
    let mut accepted = Vec::with_capacity(m as usize);
    let mut rejected = Vec::with_capacity(m as usize);
    for n in 1..=m {
        for kind in [TrigKind::Cosine, TrigKind::Sine] {
            let mode = TrigMode { n, kind };
            if mode.satisfies_dirichlet() {
                accepted.push(mode);
            } else {
                rejected.push(mode);
            }
        }
    }
    Ok((accepted, rejected))
}

/// Analytic derivatives `[φ, φ', φ'', φ''']` of level `n` inside the box.
pub fn cq_derivative_evaluators(n: u32, geom: &BoxGeometry) -> Result<Vec<Evaluator>> {
    check_index(n)?;
    let k = n as f64 * PI / (2.0 * geom.b);
    let odd = n % 2 == 1;
    let evals = (0..4)
        .map(|order| {
            evaluator(move |x: f64| {
                let (s, c) = (k * x).sin_cos();
                // d^m/dx^m cos(kx) cycles cos, -sin, -cos, sin
                let base = match (odd, order % 4) {
                    (true, 0) => c,
                    (true, 1) => -s,
                    (true, 2) => -c,
                    (true, _) => s,
                    (false, 0) => s,
                    (false, 1) => c,
                    (false, 2) => -s,
                    (false, _) => -c,
                };
                k.powi(order) * base
            })
        })
        .collect();
    Ok(evals)
}

/// Level `n` on `(-b, b)`, extended by zero over a margin of `b` on each
/// side, as a piecewise-smooth function.
pub fn zero_extended_eigenfunction(n: u32, geom: &BoxGeometry) -> Result<PiecewiseSmooth> {
    let evals = cq_derivative_evaluators(n, geom)?;
    PiecewiseSmooth::zero_extended(-geom.b, geom.b, geom.b, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::{l2_norm_squared, weak_second_derivative};
    use crate::quadrature::gauss_legendre;
    use approx::assert_abs_diff_eq;

    #[test]
    fn geometry_validation() {
        assert!(BoxGeometry::new(-1.0, 1.0).is_err());
        assert!(BoxGeometry::new(1.0, 0.0).is_err());
        assert!(BoxGeometry::new(f64::INFINITY, 1.0).is_err());
        assert!(BoxGeometry::new(2.0, 0.5).is_ok());
    }

    #[test]
    fn eigenfunction_values() {
        let g = BoxGeometry::unit();
        assert_eq!(cq_eigenfunction(1, 0.0, &g).unwrap(), 1.0);
        assert_eq!(cq_eigenfunction(2, 1.0, &g).unwrap(), 0.0);
        assert_eq!(cq_eigenfunction(1, 1.5, &g).unwrap(), 0.0);
        assert!(cq_eigenfunction(0, 0.0, &g).is_err());
    }

    #[test]
    fn eigenvalues() {
        let g = BoxGeometry::unit();
        assert_abs_diff_eq!(cq_eigenvalue(1, &g).unwrap(), 2.4674011002723395, epsilon = 1e-15);
        assert_abs_diff_eq!(cq_eigenvalue(2, &g).unwrap(), 9.869604401089358, epsilon = 1e-14);
        let g2 = BoxGeometry::new(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(cq_eigenvalue(1, &g2).unwrap(), PI * PI / 16.0, epsilon = 1e-15);
        let g3 = BoxGeometry::new(1.0, 3.0).unwrap();
        assert_abs_diff_eq!(cq_eigenvalue(1, &g3).unwrap(), 9.0 * PI * PI / 4.0, epsilon = 1e-13);
    }

    #[test]
    fn norm_matches_quadrature() {
        let rule = gauss_legendre(64).unwrap();
        for (n, b) in [(1, 1.0), (4, 1.0), (1, 2.0), (7, 0.5)] {
            let g = BoxGeometry::new(b, 1.0).unwrap();
            let q = rule.integrate(-b, b, |x| cq_eigenfunction(n, x, &g).unwrap().powi(2));
            assert_abs_diff_eq!(cq_norm_squared(n, &g).unwrap(), q, epsilon = 1e-12);
        }
    }

    #[test]
    fn dirichlet_at_walls() {
        let g = BoxGeometry::new(1.3, 1.0).unwrap();
        for n in 1..=50 {
            let k = n as f64 * PI / (2.0 * g.b());
            let value = |x: f64| if n % 2 == 1 { (k * x).cos() } else { (k * x).sin() };
            assert!(value(g.b()).abs() < 1e-14);
            assert!(value(-g.b()).abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonality() {
        let g = BoxGeometry::unit();
        let rule = gauss_legendre(96).unwrap();
        for m in 1..=12 {
            for n in (m + 1)..=12 {
                let q = rule.integrate(-1.0, 1.0, |x| {
                    cq_eigenfunction(m, x, &g).unwrap() * cq_eigenfunction(n, x, &g).unwrap()
                });
                assert!(q.abs() < 1e-10, "m={m} n={n} overlap={q}");
            }
        }
    }

    #[test]
    fn interior_eigen_residual() {
        let g = BoxGeometry::new(1.7, 0.8).unwrap();
        for n in 1..=8 {
            let ev = cq_derivative_evaluators(n, &g).unwrap();
            let e = cq_eigenvalue(n, &g).unwrap();
            for i in 1..=1000 {
                let x = -g.b() + 2.0 * g.b() * i as f64 / 1001.0;
                let r = -g.hbar().powi(2) * ev[2](x) - e * ev[0](x);
                assert!(r.abs() < 1e-10, "n={n} x={x} r={r}");
            }
        }
    }

    #[test]
    fn every_level_has_two_wall_deltas() {
        let g = BoxGeometry::unit();
        for n in 1..=12 {
            let f = zero_extended_eigenfunction(n, &g).unwrap();
            let w = weak_second_derivative(&f).unwrap();
            assert_eq!(w.delta_terms.len(), 2, "n={n}");
            assert_eq!(l2_norm_squared(&w, f.interval()).unwrap(), f64::INFINITY);
        }
    }

    #[test]
    fn classification() {
        let (acc, rej) = classify_trig_modes(2).unwrap();
        assert_eq!(
            acc,
            vec![
                TrigMode { n: 1, kind: TrigKind::Cosine },
                TrigMode { n: 2, kind: TrigKind::Sine }
            ]
        );
        assert_eq!(
            rej,
            vec![
                TrigMode { n: 1, kind: TrigKind::Sine },
                TrigMode { n: 2, kind: TrigKind::Cosine }
            ]
        );
        let (acc, _) = classify_trig_modes(1).unwrap();
        assert_eq!(acc, vec![TrigMode { n: 1, kind: TrigKind::Cosine }]);
        for m in 1..=40 {
            let (acc, rej) = classify_trig_modes(m).unwrap();
            assert_eq!(acc.len(), m as usize);
            assert_eq!(rej.len(), m as usize);
        }
        assert!(classify_trig_modes(0).is_err());
    }

    #[test]
    fn classification_agrees_with_wall_values() {
        let g = BoxGeometry::unit();
        let (acc, rej) = classify_trig_modes(10).unwrap();
        for m in &acc {
            assert!(m.eval(1.0, &g).abs() < 1e-14 && m.eval(-1.0, &g).abs() < 1e-14);
        }
        for m in &rej {
            assert!(m.eval(1.0, &g).abs() > 0.5 || m.eval(-1.0, &g).abs() > 0.5);
        }
    }
}
