//! Schrödinger-representation potentials of the four models.
//!
//! * `CqBox`: free particle on (-b, b) with hard Dirichlet walls, `H = -ħ² d²/dx²`.
//! * `AqBox`: `H = -ħ² d²/dx² + ħ² (2x² + b²) / (b² - x²)²` on (-b, b).
//! * `HalfHarmonic`: `H = ½ [-ħ² d²/dx² + (3/4) ħ²/x² + x²]` on (0, ∞).
//! * `AntiBox`: the `AqBox` term plus `W/|x|` on |x| > b (evaluation only).
//!
//! Near a wall at distance `s` the affine terms behave like `c/s²`, and the
//! regular solution goes like `s^p` with `p(p-1) = c / kinetic`. Both the
//! box and the half oscillator have `c / kinetic = 3/4`, hence `p = 3/2`.

use crate::analytic_box::BoxGeometry;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    CqBox { geom: BoxGeometry },
    AqBox { geom: BoxGeometry },
    HalfHarmonic { hbar: f64 },
    AntiBox { geom: BoxGeometry, coupling: f64 },
}

impl ModelSpec {
    pub fn cq_box(b: f64, hbar: f64) -> Result<Self> {
        Ok(ModelSpec::CqBox {
            geom: BoxGeometry::new(b, hbar)?,
        })
    }

    pub fn aq_box(b: f64, hbar: f64) -> Result<Self> {
        Ok(ModelSpec::AqBox {
            geom: BoxGeometry::new(b, hbar)?,
        })
    }

    pub fn half_harmonic(hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be finite and > 0, got {hbar}")));
        }
        Ok(ModelSpec::HalfHarmonic { hbar })
    }

    pub fn anti_box(b: f64, hbar: f64, coupling: f64) -> Result<Self> {
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::InvalidParameter(format!("W must be finite and >= 0, got {coupling}")));
        }
        Ok(ModelSpec::AntiBox {
            geom: BoxGeometry::new(b, hbar)?,
            coupling,
        })
    }

    /// Command-line spelling of the model.
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::CqBox { .. } => "cq-box",
            ModelSpec::AqBox { .. } => "aq-box",
            ModelSpec::HalfHarmonic { .. } => "half-ho",
            ModelSpec::AntiBox { .. } => "anti-box",
        }
    }

    pub fn hbar(&self) -> f64 {
        match self {
            ModelSpec::CqBox { geom } | ModelSpec::AqBox { geom } | ModelSpec::AntiBox { geom, .. } => geom.hbar(),
            ModelSpec::HalfHarmonic { hbar } => *hbar,
        }
    }

    pub fn geometry(&self) -> Option<BoxGeometry> {
        match self {
            ModelSpec::CqBox { geom } | ModelSpec::AqBox { geom } | ModelSpec::AntiBox { geom, .. } => Some(*geom),
            ModelSpec::HalfHarmonic { .. } => None,
        }
    }

    /// Coefficient of `-d²/dx²` in the Hamiltonian.
    pub fn kinetic_coefficient(&self) -> f64 {
        let h2 = self.hbar().powi(2);
        match self {
            ModelSpec::HalfHarmonic { .. } => 0.5 * h2,
            _ => h2,
        }
    }

    /// `b` for the box models, `√ħ` for the oscillator.
    pub fn length_scale(&self) -> f64 {
        match self.geometry() {
            Some(g) => g.b(),
            None => self.hbar().sqrt(),
        }
    }

    /// `ħ²/b²` for the box models, `ħ` for the oscillator.
    pub fn energy_scale(&self) -> f64 {
        match self.geometry() {
            Some(g) => g.energy_scale(),
            None => self.hbar(),
        }
    }

    /// Open intervals making up the configuration space.
    pub fn domain(&self) -> Vec<(f64, f64)> {
        match self {
            ModelSpec::CqBox { geom } | ModelSpec::AqBox { geom } => vec![(-geom.b(), geom.b())],
            ModelSpec::HalfHarmonic { .. } => vec![(0.0, f64::INFINITY)],
            ModelSpec::AntiBox { geom, .. } => vec![(f64::NEG_INFINITY, -geom.b()), (geom.b(), f64::INFINITY)],
        }
    }

    /// Potential energy at `x`; `DomainError` outside the open domain.
    pub fn potential(&self, x: f64) -> Result<f64> {
        match self {
            ModelSpec::CqBox { geom } => {
                if x.abs() < geom.b() {
                    Ok(0.0)
                } else {
                    Err(domain_error(x, self))
                }
            }
            ModelSpec::AqBox { geom } => aq_box_potential(x, geom),
            ModelSpec::HalfHarmonic { hbar } => half_ho_potential(x, *hbar),
            ModelSpec::AntiBox { geom, coupling } => anti_box_potential(x, geom, *coupling),
        }
    }

    pub fn potential_info(&self) -> Potential {
        Potential {
            model: *self,
            domain: self.domain(),
            singular_endpoints: singularity_metadata(self).unwrap_or_default(),
        }
    }
}

fn domain_error(x: f64, model: &ModelSpec) -> Error {
    let domain = model
        .domain()
        .iter()
        .map(|(a, b)| format!("({a}, {b})"))
        .collect::<Vec<_>>()
        .join(" ∪ ");
    Error::DomainError { x, domain }
}

/// Inverse-square wall: `V ≈ coefficient / distance^2` near `location`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularEndpoint {
    pub location: f64,
    pub coefficient: f64,
    pub exponent: i32,
}

impl SingularEndpoint {
    /// Larger root of `p(p-1) = coefficient / kinetic`.
    pub fn frobenius_exponent(&self, kinetic: f64) -> f64 {
        0.5 + (0.25 + self.coefficient / kinetic).sqrt()
    }
}

/// A model's potential together with its domain and wall metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub model: ModelSpec,
    pub domain: Vec<(f64, f64)>,
    pub singular_endpoints: Vec<SingularEndpoint>,
}

impl Potential {
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.model.potential(x)
    }
}

/// `ħ² (2x² + b²) / (b² - x²)²` for `|x| < b`.
pub fn aq_box_potential(x: f64, geom: &BoxGeometry) -> Result<f64> {
    let b = geom.b();
    if !(x.abs() < b) {
        return Err(Error::DomainError {
            x,
            domain: format!("({}, {})", -b, b),
        });
    }
    Ok(affine_term(x, geom))
}

fn affine_term(x: f64, geom: &BoxGeometry) -> f64 {
    let b = geom.b();
    let ax = x.abs();
    // factored form keeps full relative precision near the walls
    let gap = (b - ax) * (b + ax);
    geom.hbar() * geom.hbar() * (2.0 * x * x + b * b) / (gap * gap)
}

/// `[(3/4) ħ²/x² + x²] / 2` for `x > 0`.
pub fn half_ho_potential(x: f64, hbar: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::DomainError {
            x,
            domain: "(0, inf)".into(),
        });
    }
    Ok(0.5 * (0.75 * hbar * hbar / (x * x) + x * x))
}

/// Affine term plus `W/|x|` for `|x| > b`.
pub fn anti_box_potential(x: f64, geom: &BoxGeometry, coupling: f64) -> Result<f64> {
    if !(x.abs() > geom.b()) || !x.is_finite() {
        return Err(Error::DomainError {
            x,
            domain: format!("(-inf, {}) ∪ ({}, inf)", -geom.b(), geom.b()),
        });
    }
    Ok(affine_term(x, geom) + coupling / x.abs())
}

/// `aq_box_potential(x) / ((3/4) ħ² / (b - |x|)²)`, tending to 1 at the walls.
pub fn boundary_asymptotic_ratio(x: f64, geom: &BoxGeometry) -> Result<f64> {
    let v = aq_box_potential(x, geom)?;
    let s = geom.b() - x.abs();
    Ok(v * s * s / (0.75 * geom.hbar() * geom.hbar()))
}

/// Inverse-square walls of the singular models, coefficients in each
/// model's own normalization.
pub fn singularity_metadata(model: &ModelSpec) -> Result<Vec<SingularEndpoint>> {
    match model {
        ModelSpec::AqBox { geom } => {
            let c = 0.75 * geom.hbar() * geom.hbar();
            Ok(vec![
                SingularEndpoint {
                    location: -geom.b(),
                    coefficient: c,
                    exponent: -2,
                },
                SingularEndpoint {
                    location: geom.b(),
                    coefficient: c,
                    exponent: -2,
                },
            ])
        }
        ModelSpec::HalfHarmonic { hbar } => Ok(vec![SingularEndpoint {
            location: 0.0,
            coefficient: 0.375 * hbar * hbar,
            exponent: -2,
        }]),
        other => Err(Error::Unsupported(format!(
            "singularity metadata is defined for aq-box and half-ho, not {}",
            other.name()
        ))),
    }
}
