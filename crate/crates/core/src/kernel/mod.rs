//! Floating-point checks of the kernel-side statements: the Fourier transform of
//! `ξ_γξ_ρ⟨ξ⟩⁻⁵`, the logarithm cancellation for trace-free contractions, and
//! sphere averages of the singular model `(1/72π²)K_{γρ}y^γy^ρ/|y|²`.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::asymmetry::levi_civita;
use crate::geometry::CurvatureData;
use crate::jet::rational_to_f64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("{what} did not converge at |y| = {r}: change {delta:e} exceeds tolerance {tol:e}")]
    NonConvergence { what: String, r: f64, delta: f64, tol: f64 },
    #[error("the point y must be nonzero")]
    ZeroPoint,
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
}

pub type Mat = [[f64; 3]; 3];

/// Quadrature settings. `cutoff` is the radial cutoff in the dimensionless
/// variable `t = |ξ||y|`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub cutoff: f64,
    pub tolerance: f64,
    pub limit_tolerance: f64,
    pub radii: Vec<f64>,
    pub angular_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            cutoff: 2000.0 * PI,
            tolerance: 1e-8,
            limit_tolerance: 1e-3,
            radii: vec![0.1, 0.05, 0.025],
            angular_order: 32,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), KernelError> {
        let bad = |m: &str| Err(KernelError::InvalidConfig(m.to_string()));
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return bad("cutoff must be positive");
        }
        if !(self.tolerance > 0.0) || !(self.limit_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.radii.len() < 2 || self.radii.iter().any(|r| !(*r > 0.0)) {
            return bad("at least two positive radii are needed");
        }
        if self.angular_order < 4 {
            return bad("angular order must be at least 4");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cutoff": self.cutoff,
            "tolerance": self.tolerance,
            "limit_tolerance": self.limit_tolerance,
            "radii": self.radii,
            "angular_order": self.angular_order,
        })
    }
}

/// Spherical Bessel `j₁`.
pub fn sph_j1(t: f64) -> f64 {
    if t.abs() < 0.1 {
        let t2 = t * t;
        t / 3.0 * (1.0 - t2 / 10.0 * (1.0 - t2 / 28.0 * (1.0 - t2 / 54.0)))
    } else {
        (t.sin() / t - t.cos()) / t
    }
}

/// Spherical Bessel `j₂`.
pub fn sph_j2(t: f64) -> f64 {
    if t.abs() < 0.1 {
        let t2 = t * t;
        t2 / 15.0 * (1.0 - t2 / 14.0 * (1.0 - t2 / 36.0 * (1.0 - t2 / 66.0)))
    } else {
        (3.0 / (t * t) - 1.0) * t.sin() / t - 3.0 * t.cos() / (t * t)
    }
}

/// `F_{γρ}(y) = A(|y|)δ_{γρ} + B(|y|)ŷ_γŷ_ρ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialParts {
    pub r: f64,
    pub a: f64,
    pub b: f64,
}

impl RadialParts {
    pub fn tensor(&self, yhat: &[f64; 3]) -> Mat {
        std::array::from_fn(|g| {
            std::array::from_fn(|p| if g == p { self.a } else { 0.0 } + self.b * (yhat[g] * yhat[p]))
        })
    }
}

fn panel_sum<F: Fn(f64) -> f64>(f: &F, from: f64, to: f64, tol: f64) -> f64 {
    let panels = ((to - from) / PI).ceil().max(1.0) as usize;
    let width = (to - from) / panels as f64;
    let per = tol / panels as f64;
    (0..panels)
        .map(|p| {
            let a = from + p as f64 * width;
            quadrature::integrate(f, a, a + width, per).integral
        })
        .sum()
}

/// Integrates on `[0, Λ]` in panels of width `π`, then checks that extending
/// to `2Λ` moves the value by less than the tolerance.
fn radial_integral<F: Fn(f64) -> f64>(what: &str, f: F, r: f64, cfg: &QuadratureConfig) -> Result<f64, KernelError> {
    let tol = cfg.tolerance * 1e-3;
    let head = panel_sum(&f, 0.0, cfg.cutoff, tol);
    let tail = panel_sum(&f, cfg.cutoff, 2.0 * cfg.cutoff, tol);
    if tail.abs() > cfg.tolerance || !head.is_finite() {
        return Err(KernelError::NonConvergence {
            what: what.to_string(),
            r,
            delta: tail.abs(),
            tol: cfg.tolerance,
        });
    }
    Ok(head + tail)
}

/// With `t = |ξ||y|` the angular integral reduces to
/// `A = (1/2π²)∫ w(t) j₁(t)/t dt`, `B = −(1/2π²)∫ w(t) j₂(t) dt`, `w = t⁴(r²+t²)^{−5/2}`.
pub fn radial_parts(r: f64, cfg: &QuadratureConfig) -> Result<RadialParts, KernelError> {
    if !(r > 0.0) {
        return Err(KernelError::ZeroPoint);
    }
    cfg.validate()?;
    let c = 1.0 / (2.0 * PI * PI);
    let w = move |t: f64| c * t.powi(4) / (r * r + t * t).powf(2.5);
    let a = radial_integral("A", |t| if t == 0.0 { 0.0 } else { w(t) * sph_j1(t) / t }, r, cfg)?;
    let b = radial_integral("B", |t| -w(t) * sph_j2(t), r, cfg)?;
    Ok(RadialParts { r, a, b })
}

fn norm(y: &[f64; 3]) -> f64 {
    y.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `(2π)⁻³∫ξ_γξ_ρ⟨ξ⟩⁻⁵e^{−iy·ξ}dξ`, as the full tensor.
pub fn ft_tensor(y: &[f64; 3], cfg: &QuadratureConfig) -> Result<Mat, KernelError> {
    let r = norm(y);
    if r == 0.0 {
        return Err(KernelError::ZeroPoint);
    }
    let yhat = y.map(|c| c / r);
    Ok(radial_parts(r, cfg)?.tensor(&yhat))
}

pub fn ft_integral(gamma: usize, rho: usize, y: &[f64; 3], cfg: &QuadratureConfig) -> Result<f64, KernelError> {
    Ok(ft_tensor(y, cfg)?[gamma][rho])
}

/// `F₃₃(r e₃) + (1/12π²)(2 + 1 + 2 ln r)`.
pub fn log_remainder_33(r: f64, cfg: &QuadratureConfig) -> Result<f64, KernelError> {
    let p = radial_parts(r, cfg)?;
    Ok(p.a + p.b + (3.0 + 2.0 * r.ln()) / (12.0 * PI * PI))
}

/// The contraction `K_{γρ} = ε_{αβγ}∇_αRic_{βρ}` at the base point.
pub fn curvature_contraction(data: &CurvatureData) -> [[BigRational; 3]; 3] {
    std::array::from_fn(|g| {
        std::array::from_fn(|p| {
            let mut acc = BigRational::zero();
            for a in 0..3 {
                for b in 0..3 {
                    let e = levi_civita(a, b, g);
                    if e != 0 {
                        acc += &data.dric(a)[b][p] * BigRational::from_integer(e.into());
                    }
                }
            }
            acc
        })
    })
}

/// `y ↦ (1/72π²)K_{γρ}y^γy^ρ/|y|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularModel {
    pub k: Mat,
}

impl SingularModel {
    pub fn new(k: Mat) -> SingularModel {
        SingularModel { k }
    }

    pub fn from_curvature(data: &CurvatureData) -> SingularModel {
        let k = curvature_contraction(data);
        SingularModel::new(std::array::from_fn(|g| std::array::from_fn(|p| rational_to_f64(&k[g][p]))))
    }

    pub fn monomial(gamma: usize, rho: usize) -> SingularModel {
        let mut k = [[0.0; 3]; 3];
        k[gamma][rho] = 72.0 * PI * PI;
        SingularModel::new(k)
    }

    pub fn trace(&self) -> f64 {
        (0..3).map(|g| self.k[g][g]).sum()
    }

    pub fn evaluate(&self, y: &[f64; 3]) -> f64 {
        let n2: f64 = y.iter().map(|c| c * c).sum();
        let mut acc = 0.0;
        for g in 0..3 {
            for p in 0..3 {
                acc += self.k[g][p] * y[g] * y[p];
            }
        }
        acc / (n2 * 72.0 * PI * PI)
    }

    /// `(1/216π²) tr K`, the exact sphere average.
    pub fn analytic_average(&self) -> f64 {
        self.trace() / (216.0 * PI * PI)
    }
}

/// Mean of the model over the sphere `|y| = r`: trapezoid rule in the azimuth,
/// double-exponential quadrature in `cos θ`.
pub fn sphere_average(model: &SingularModel, r: f64, cfg: &QuadratureConfig) -> f64 {
    let n = cfg.angular_order;
    let ring = |z: f64| {
        let s = (1.0 - z * z).max(0.0).sqrt();
        (0..n)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / n as f64;
                model.evaluate(&[r * s * phi.cos(), r * s * phi.sin(), r * z])
            })
            .sum::<f64>()
            / n as f64
    };
    quadrature::integrate(ring, -1.0, 1.0, cfg.tolerance * 1e-4).integral / 2.0
}

pub fn standard_rays() -> Vec<(String, [f64; 3])> {
    let d = 1.0 / 3f64.sqrt();
    vec![
        ("e1".to_string(), [1.0, 0.0, 0.0]),
        ("e3".to_string(), [0.0, 0.0, 1.0]),
        ("(1,1,1)/sqrt3".to_string(), [d, d, d]),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayResult {
    pub label: String,
    pub direction: [f64; 3],
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RayResult {
    /// Largest change between consecutive radii.
    pub fn max_increment(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    }

    pub fn limit(&self) -> f64 {
        *self.values.last().unwrap_or(&f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitVerdict {
    pub rays: Vec<RayResult>,
    pub tolerance: f64,
}

impl SplitVerdict {
    pub fn bounded(&self) -> bool {
        self.rays.iter().all(|r| r.max_increment() < self.tolerance && r.values.iter().all(|v| v.is_finite()))
    }

    pub fn ray_spread(&self) -> f64 {
        let lims: Vec<f64> = self.rays.iter().map(RayResult::limit).collect();
        let hi = lims.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = lims.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    }

    pub fn pass(&self) -> bool {
        self.bounded() && self.ray_spread() < self.tolerance
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rays": self.rays.iter().map(|r| json!({
                "ray": r.label,
                "radii": r.radii,
                "values": r.values,
                "max_increment": r.max_increment(),
            })).collect::<Vec<_>>(),
            "ray_spread": self.ray_spread(),
            "pass": self.pass(),
        })
    }
}

/// Evaluates `K^{γρ}F_{γρ}(y) + (1/6π²)K^{γρ}y_γy_ρ/|y|²` along the standard
/// rays at the configured radii.
pub fn singular_split_check(k: &Mat, cfg: &QuadratureConfig) -> Result<SplitVerdict, KernelError> {
    cfg.validate()?;
    let parts = cfg
        .radii
        .iter()
        .map(|&r| radial_parts(r, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let rays = standard_rays()
        .into_iter()
        .map(|(label, dir)| {
            let values = parts
                .iter()
                .map(|p| {
                    let f = p.tensor(&dir);
                    let mut acc = 0.0;
                    for g in 0..3 {
                        for q in 0..3 {
                            acc += k[g][q] * (f[g][q] + dir[g] * dir[q] / (6.0 * PI * PI));
                        }
                    }
                    acc
                })
                .collect();
            RayResult {
                label,
                direction: dir,
                radii: cfg.radii.clone(),
                values,
            }
        })
        .collect();
    Ok(SplitVerdict {
        rays,
        tolerance: cfg.limit_tolerance,
    })
}

/// Everything the `ft-check` mode reports.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelChecks {
    pub monomial_error: f64,
    pub trace_free_averages: Vec<(f64, f64)>,
    pub identity_average: f64,
    pub identity_expected: f64,
    pub log_limit: Vec<(f64, f64)>,
    pub split_curvature: SplitVerdict,
    pub split_delta: SplitVerdict,
    pub tolerance: f64,
    pub limit_tolerance: f64,
}

impl KernelChecks {
    pub fn monomial_pass(&self) -> bool {
        self.monomial_error < 1e-10
    }

    pub fn trace_free_pass(&self) -> bool {
        self.trace_free_averages.iter().all(|(_, v)| v.abs() < 1e-10)
    }

    pub fn identity_pass(&self) -> bool {
        self.identity_average.abs() > 0.0 && (self.identity_average - self.identity_expected).abs() < self.tolerance
    }

    pub fn log_limit_pass(&self) -> bool {
        self.log_limit
            .windows(2)
            .all(|w| (w[1].1 - w[0].1).abs() < self.limit_tolerance)
    }

    /// The `K = δ` case must be flagged.
    pub fn failure_detected(&self) -> bool {
        !self.split_delta.pass()
    }

    pub fn pass(&self) -> bool {
        self.monomial_pass()
            && self.trace_free_pass()
            && self.identity_pass()
            && self.log_limit_pass()
            && self.split_curvature.pass()
            && self.failure_detected()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sphere_average_monomial": {"max_error": self.monomial_error, "pass": self.monomial_pass()},
            "sphere_average_trace_free": {
                "values": self.trace_free_averages.iter().map(|(r, v)| json!({"r": r, "average": v})).collect::<Vec<_>>(),
                "pass": self.trace_free_pass(),
            },
            "sphere_average_identity": {
                "average": self.identity_average,
                "expected": self.identity_expected,
                "pass": self.identity_pass(),
            },
            "log_limit_f33": {
                "values": self.log_limit.iter().map(|(r, v)| json!({"r": r, "remainder": v})).collect::<Vec<_>>(),
                "pass": self.log_limit_pass(),
            },
            "singular_split_curvature": self.split_curvature.to_json(),
            "singular_split_delta": {
                "check": self.split_delta.to_json(),
                "failure_detected": self.failure_detected(),
            },
            "pass": self.pass(),
        })
    }
}

pub fn kernel_checks(data: &CurvatureData, cfg: &QuadratureConfig) -> Result<KernelChecks, KernelError> {
    cfg.validate()?;
    let mut monomial_error: f64 = 0.0;
    for g in 0..3 {
        for p in 0..3 {
            let avg = sphere_average(&SingularModel::monomial(g, p), 1.0, cfg);
            let expected = if g == p { 1.0 / 3.0 } else { 0.0 };
            monomial_error = monomial_error.max((avg - expected).abs());
        }
    }
    let model = SingularModel::from_curvature(data);
    let trace_free_averages = [1.0, 0.1].iter().map(|&r| (r, sphere_average(&model, r, cfg))).collect();
    let delta = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let id_model = SingularModel::new(delta);
    let log_limit = cfg
        .radii
        .iter()
        .map(|&r| Ok((r, log_remainder_33(r, cfg)?)))
        .collect::<Result<Vec<_>, KernelError>>()?;
    Ok(KernelChecks {
        monomial_error,
        trace_free_averages,
        identity_average: sphere_average(&id_model, 1.0, cfg),
        identity_expected: id_model.analytic_average(),
        log_limit,
        split_curvature: singular_split_check(&model.k, cfg)?,
        split_delta: singular_split_check(&delta, cfg)?,
        tolerance: cfg.tolerance,
        limit_tolerance: cfg.limit_tolerance,
    })
}
