//! Built-in catalog of analytic field families for comparison scenarios.
//!
//! Scenarios are assembled from closed-form families so that values,
//! gradients and Hessians are exact: hypothesis failures are then
//! attributable to the mathematics of the scenario, never to a stencil.
//! Suprema over the unbounded `(z, p)` arguments are exact where the family
//! permits (constant, or z-independent derivatives) and otherwise estimated
//! over the scenario's sampling lattice, flagged as such.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{norms, RealMatrix};

/// A supremum or infimum over `(z, p)`: exact when the family admits a
/// closed form, otherwise a lattice estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub exact: bool,
}

impl Estimate {
    fn exact(value: f64) -> Self {
        Estimate { value, exact: true }
    }

    fn estimated(value: f64) -> Self {
        Estimate {
            value,
            exact: false,
        }
    }
}

/// Lattice over the scalar argument `z` and gradient argument `p` used when
/// a supremum has no closed form.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SamplingBox {
    pub z_min: f64,
    pub z_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub points_per_axis: usize,
}

impl Default for SamplingBox {
    fn default() -> Self {
        SamplingBox {
            z_min: -3.0,
            z_max: 3.0,
            p_min: -3.0,
            p_max: 3.0,
            points_per_axis: 21,
        }
    }
}

impl SamplingBox {
    pub fn validate(&self) -> Result<()> {
        let extent_ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo < hi;
        if !extent_ok(self.z_min, self.z_max) || !extent_ok(self.p_min, self.p_max) {
            return Err(Error::BadInput("sampling box must have positive extent".into()));
        }
        if self.points_per_axis < 2 {
            return Err(Error::BadInput(
                "sampling box needs at least 2 points per axis".into(),
            ));
        }
        Ok(())
    }

    pub fn z_lattice(&self) -> Vec<f64> {
        let m = self.points_per_axis;
        (0..m)
            .map(|i| self.z_min + (self.z_max - self.z_min) * i as f64 / (m - 1) as f64)
            .collect()
    }
}

/// One closed-form term of a scalar field of `x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScalarTerm {
    /// `½ xᵀ H x + bᵀ x + c`.
    Quadratic {
        #[serde(with = "crate::matrix::json_rows")]
        hessian: RealMatrix,
        linear: Vec<f64>,
        #[serde(default)]
        constant: f64,
    },
    /// `a (1 - |x - center|²/r²)`.
    RadialBump {
        amplitude: f64,
        center: Vec<f64>,
        radius: f64,
    },
}

/// A scalar field `w(x)` given as a sum of catalog terms, with analytic
/// gradient and Hessian.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField {
    pub terms: Vec<ScalarTerm>,
}

impl ScalarField {
    pub fn quadratic(hessian: RealMatrix, linear: Vec<f64>, constant: f64) -> Self {
        ScalarField {
            terms: vec![ScalarTerm::Quadratic {
                hessian,
                linear,
                constant,
            }],
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        for term in &self.terms {
            match term {
                ScalarTerm::Quadratic { hessian, linear, .. } => {
                    if hessian.nrows() != dim || hessian.ncols() != dim {
                        return Err(Error::DimensionMismatch(format!(
                            "quadratic term hessian is {}x{}, domain dimension is {dim}",
                            hessian.nrows(),
                            hessian.ncols()
                        )));
                    }
                    if linear.len() != dim {
                        return Err(Error::DimensionMismatch(format!(
                            "quadratic term linear part has length {}, expected {dim}",
                            linear.len()
                        )));
                    }
                    let defect = crate::report::max_abs(&(hessian - hessian.transpose()));
                    if defect > 1e-12 * (1.0 + crate::report::max_abs(hessian)) {
                        return Err(Error::BadInput(
                            "quadratic term hessian must be symmetric".into(),
                        ));
                    }
                }
                ScalarTerm::RadialBump { center, radius, .. } => {
                    if center.len() != dim {
                        return Err(Error::DimensionMismatch(format!(
                            "bump center has length {}, expected {dim}",
                            center.len()
                        )));
                    }
                    if !radius.is_finite() || *radius <= 0.0 {
                        return Err(Error::BadInput("bump radius must be positive".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.terms
            .iter()
            .map(|t| match t {
                ScalarTerm::Quadratic {
                    hessian,
                    linear,
                    constant,
                } => {
                    let b = DVector::from_column_slice(linear);
                    0.5 * (hessian * x).dot(x) + b.dot(x) + constant
                }
                ScalarTerm::RadialBump {
                    amplitude,
                    center,
                    radius,
                } => {
                    let c = DVector::from_column_slice(center);
                    let d = x - c;
                    amplitude * (1.0 - d.norm_squared() / (radius * radius))
                }
            })
            .sum()
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(x.len());
        for t in &self.terms {
            match t {
                ScalarTerm::Quadratic { hessian, linear, .. } => {
                    g += hessian * x + DVector::from_column_slice(linear);
                }
                ScalarTerm::RadialBump {
                    amplitude,
                    center,
                    radius,
                } => {
                    let c = DVector::from_column_slice(center);
                    g += (x - c) * (-2.0 * amplitude / (radius * radius));
                }
            }
        }
        g
    }

    pub fn hessian(&self, x: &DVector<f64>) -> RealMatrix {
        let n = x.len();
        let mut h = RealMatrix::zeros(n, n);
        for t in &self.terms {
            match t {
                ScalarTerm::Quadratic { hessian, .. } => h += hessian,
                ScalarTerm::RadialBump {
                    amplitude, radius, ..
                } => {
                    h += RealMatrix::identity(n, n) * (-2.0 * amplitude / (radius * radius));
                }
            }
        }
        h
    }
}

/// Scalar profile `g(z)` modulating a z-dependent matrix family.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    /// `intercept + slope·z`.
    Linear { intercept: f64, slope: f64 },
    /// `amplitude·sin(z)`.
    Sin { amplitude: f64 },
}

impl Profile {
    fn value(&self, z: f64) -> f64 {
        match self {
            Profile::Linear { intercept, slope } => intercept + slope * z,
            Profile::Sin { amplitude } => amplitude * z.sin(),
        }
    }

    fn derivative(&self, z: f64) -> f64 {
        match self {
            Profile::Linear { slope, .. } => *slope,
            Profile::Sin { amplitude } => amplitude * z.cos(),
        }
    }

    /// Whether the derivative is independent of `z`.
    fn derivative_constant(&self) -> bool {
        matches!(self, Profile::Linear { .. })
    }
}

/// A matrix field of `(x, z, p)`: a fixed matrix, possibly modulated by a
/// scalar profile in `z`. Every family in the catalog is independent of `x`
/// and `p`, so `D_p ≡ 0` and the `(z,p)`-suprema reduce to suprema in `z`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MatrixField {
    Zero,
    Constant {
        #[serde(with = "crate::matrix::json_rows")]
        matrix: RealMatrix,
    },
    ZProfile {
        profile: Profile,
        #[serde(with = "crate::matrix::json_rows")]
        matrix: RealMatrix,
    },
}

/// Symmetry class a matrix field must respect at every point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryClass {
    Symmetric,
    Skew,
}

impl MatrixField {
    pub fn validate(&self, dim: usize, class: SymmetryClass) -> Result<()> {
        let m = match self {
            MatrixField::Zero => return Ok(()),
            MatrixField::Constant { matrix } => matrix,
            MatrixField::ZProfile { matrix, .. } => matrix,
        };
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix field is {}x{}, domain dimension is {dim}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = 1.0 + crate::report::max_abs(m);
        match class {
            SymmetryClass::Symmetric => {
                if crate::report::max_abs(&(m - m.transpose())) > 1e-12 * scale {
                    return Err(Error::BadInput(
                        "matrix field must be symmetric at every point".into(),
                    ));
                }
            }
            SymmetryClass::Skew => {
                if crate::report::max_abs(&(m + m.transpose())) > 1e-12 * scale {
                    return Err(Error::NotSkew(
                        "matrix field must be skew-symmetric at every point".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, dim: usize, _x: &DVector<f64>, z: f64, _p: &DVector<f64>) -> RealMatrix {
        match self {
            MatrixField::Zero => RealMatrix::zeros(dim, dim),
            MatrixField::Constant { matrix } => matrix.clone(),
            MatrixField::ZProfile { profile, matrix } => matrix * profile.value(z),
        }
    }

    /// `∂/∂z` of the field.
    pub fn d_z(&self, dim: usize, _x: &DVector<f64>, z: f64, _p: &DVector<f64>) -> RealMatrix {
        match self {
            MatrixField::Zero | MatrixField::Constant { .. } => RealMatrix::zeros(dim, dim),
            MatrixField::ZProfile { profile, matrix } => matrix * profile.derivative(z),
        }
    }

    /// `∂/∂p_k` of the field; identically zero for the catalog families.
    pub fn d_p(
        &self,
        dim: usize,
        _x: &DVector<f64>,
        _z: f64,
        _p: &DVector<f64>,
        _k: usize,
    ) -> RealMatrix {
        RealMatrix::zeros(dim, dim)
    }

    /// `sup ‖field‖` over `(z, p)`.
    pub fn sup_norm(&self, dim: usize, sampling: &SamplingBox) -> Estimate {
        match self {
            MatrixField::Zero => Estimate::exact(0.0),
            MatrixField::Constant { matrix } => Estimate::exact(norms(matrix).operator),
            MatrixField::ZProfile { profile, matrix } => {
                let base = norms(matrix).operator;
                let sup = sampling
                    .z_lattice()
                    .iter()
                    .map(|&z| profile.value(z).abs())
                    .fold(0.0f64, f64::max);
                let _ = dim;
                Estimate::estimated(sup * base)
            }
        }
    }

    /// `sup ‖∂field/∂z‖` over `(z, p)`.
    pub fn sup_dz_norm(&self, dim: usize, sampling: &SamplingBox) -> Estimate {
        match self {
            MatrixField::Zero | MatrixField::Constant { .. } => Estimate::exact(0.0),
            MatrixField::ZProfile { profile, matrix } => {
                let base = norms(matrix).operator;
                let _ = dim;
                if profile.derivative_constant() {
                    Estimate::exact(profile.derivative(0.0).abs() * base)
                } else {
                    let sup = sampling
                        .z_lattice()
                        .iter()
                        .map(|&z| profile.derivative(z).abs())
                        .fold(0.0f64, f64::max);
                    Estimate::estimated(sup * base)
                }
            }
        }
    }

    /// `inf λ_min(∂field/∂z)` over `(z, p)` — the quantity a symmetric field
    /// must keep above `-α₁·λ_min(ω)`.
    pub fn inf_dz_lambda_min(&self, dim: usize, sampling: &SamplingBox) -> Estimate {
        match self {
            MatrixField::Zero | MatrixField::Constant { .. } => Estimate::exact(0.0),
            MatrixField::ZProfile { profile, matrix } => {
                let eig = matrix.clone().symmetric_eigen().eigenvalues;
                let (lo, hi) = eig
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
                        (lo.min(l), hi.max(l))
                    });
                let lambda_min_of = |factor: f64| {
                    if factor >= 0.0 {
                        factor * lo
                    } else {
                        factor * hi
                    }
                };
                let _ = dim;
                if profile.derivative_constant() {
                    Estimate::exact(lambda_min_of(profile.derivative(0.0)))
                } else {
                    let inf = sampling
                        .z_lattice()
                        .iter()
                        .map(|&z| lambda_min_of(profile.derivative(z)))
                        .fold(f64::INFINITY, f64::min);
                    Estimate::estimated(inf)
                }
            }
        }
    }
}

/// The positive scalar field `f(x, z, p)` on the right-hand side.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ForcingField {
    Constant { value: f64 },
    /// `exp(rate·z)`.
    ExpZ { rate: f64 },
}

impl ForcingField {
    pub fn validate(&self) -> Result<()> {
        match self {
            ForcingField::Constant { value } if !(value.is_finite() && *value > 0.0) => Err(
                Error::BadInput(format!("f must be positive, got constant {value}")),
            ),
            ForcingField::ExpZ { rate } if !rate.is_finite() => {
                Err(Error::BadInput("exp_z rate must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, _x: &DVector<f64>, z: f64, _p: &DVector<f64>) -> f64 {
        match self {
            ForcingField::Constant { value } => *value,
            ForcingField::ExpZ { rate } => (rate * z).exp(),
        }
    }

    pub fn d_z(&self, _x: &DVector<f64>, z: f64, _p: &DVector<f64>) -> f64 {
        match self {
            ForcingField::Constant { .. } => 0.0,
            ForcingField::ExpZ { rate } => rate * (rate * z).exp(),
        }
    }

    pub fn d_p(&self, _x: &DVector<f64>, _z: f64, _p: &DVector<f64>, _k: usize) -> f64 {
        0.0
    }

    /// `inf D_z f / f` over `(z, p)`, exact for both catalog families.
    pub fn inf_dz_over_f(&self, _sampling: &SamplingBox) -> Estimate {
        match self {
            ForcingField::Constant { .. } => Estimate::exact(0.0),
            ForcingField::ExpZ { rate } => Estimate::exact(*rate),
        }
    }
}
