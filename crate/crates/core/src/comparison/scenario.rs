//! Scenario files: a domain, a pair of compared functions with analytic
//! derivatives, the coefficient fields `A` (symmetric), `B` (skew), the
//! forcing `f > 0`, and the constants `(δ, α₁, β₁)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

use super::fields::{ForcingField, MatrixField, SamplingBox, ScalarField, SymmetryClass};
use super::grid::Domain;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub domain: Domain,
    pub u: ScalarField,
    pub v: ScalarField,
    pub a: MatrixField,
    pub b: MatrixField,
    pub f: ForcingField,
    pub delta: f64,
    #[serde(default)]
    pub alpha1: f64,
    #[serde(default)]
    pub beta1: f64,
    #[serde(default)]
    pub sampling: SamplingBox,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        let dim = self.dim();
        self.u.validate(dim)?;
        self.v.validate(dim)?;
        self.a.validate(dim, SymmetryClass::Symmetric)?;
        self.b.validate(dim, SymmetryClass::Skew)?;
        self.f.validate()?;
        self.sampling.validate()?;
        if !self.delta.is_finite() || !(0.0..1.0).contains(&self.delta) {
            return Err(Error::BadParams(format!(
                "delta must lie in [0, 1), got {}",
                self.delta
            )));
        }
        for (name, value) in [("alpha1", self.alpha1), ("beta1", self.beta1)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::BadParams(format!(
                    "{name} must be >= 0, got {value}"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::BadInput(format!("scenario JSON: {e}")))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// The bundled reference scenario on the unit disk:
    /// `u = |x|²/2`, `v = u - 0.01(1 - |x|²)`, `A = 0`, constant skew `B`
    /// with `‖B‖ = 0.1`, `f = exp(z)`, `δ = 0.2`, `α₁ = β₁ = 0`.
    pub fn bundled_disk() -> Scenario {
        let b = RealMatrix::from_row_slice(2, 2, &[0.0, 0.1, -0.1, 0.0]);
        Scenario {
            domain: Domain::Disk {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            u: ScalarField::quadratic(RealMatrix::identity(2, 2), vec![0.0, 0.0], 0.0),
            v: ScalarField {
                terms: vec![
                    super::fields::ScalarTerm::Quadratic {
                        hessian: RealMatrix::identity(2, 2),
                        linear: vec![0.0, 0.0],
                        constant: 0.0,
                    },
                    super::fields::ScalarTerm::RadialBump {
                        amplitude: -0.01,
                        center: vec![0.0, 0.0],
                        radius: 1.0,
                    },
                ],
            },
            a: MatrixField::Zero,
            b: MatrixField::Constant { matrix: b },
            f: ForcingField::ExpZ { rate: 1.0 },
            delta: 0.2,
            alpha1: 0.0,
            beta1: 0.0,
            sampling: SamplingBox::default(),
        }
    }

    /// The bundled scenario with `v = u`, for the identical-functions branch
    /// of the conclusion.
    pub fn bundled_disk_identical() -> Scenario {
        let mut s = Scenario::bundled_disk();
        s.v = s.u.clone();
        s
    }
}
