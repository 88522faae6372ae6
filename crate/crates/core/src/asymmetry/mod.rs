//! Matrix traces `ã_{−k}` of the projection corrections, the closed formula
//! they are compared against, and sweeps over the curvature basis.

mod transcript;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::geometry::{
    bianchi_basis, curvature_selfcheck, CurvatureData, FramingConvention, Generator, GeometryError,
    GeometryJets, Tensor3,
};
use crate::jet::{GaussianRational, Jet};
use crate::projection::{run, Branch, ProjectionRun, SpectralData};
use crate::symbol::SymbolError;

pub use transcript::transcript;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymmetryError {
    #[error("momentum is zero")]
    ZeroMomentum,
    #[error("|ξ|² = {0} is not the square of a rational")]
    IrrationalNorm(String),
    #[error("rotation matrix is not a signed permutation with determinant 1")]
    BadRotation,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Pipeline settings shared by every report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub budget: u32,
    pub depth: u32,
    pub framing: FramingConvention,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            budget: 3,
            depth: 3,
            framing: FramingConvention::default(),
        }
    }
}

/// `ε_{αβγ}` with `ε₁₂₃ = 1`.
pub fn levi_civita(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// `E_{αβγ} = ρ(x)ε_{αβγ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonTensor {
    pub rho: Jet,
}

impl EpsilonTensor {
    pub fn new(rho: Jet) -> EpsilonTensor {
        EpsilonTensor { rho }
    }

    pub fn component(&self, a: usize, b: usize, c: usize) -> Jet {
        self.rho.scale(&GaussianRational::from_int(levi_civita(a, b, c)))
    }

    pub fn tensor(&self) -> Tensor3 {
        std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| self.component(a, b, c))))
    }
}

/// `ε^{αβγ}T_{βγ}`, the contraction that vanishes for symmetric `T`.
pub fn epsilon_contract(t: &[[BigRational; 3]; 3]) -> [BigRational; 3] {
    std::array::from_fn(|a| {
        let mut acc = BigRational::zero();
        for b in 0..3 {
            for c in 0..3 {
                acc += &t[b][c] * BigRational::from_integer(levi_civita(a, b, c).into());
            }
        }
        acc
    })
}

/// `−(1/12)ε^{αβγ}∇_αRic_{βρ}ξ_γξ_ρ`, the numerator of the closed formula.
pub fn closed_form_numerator(data: &CurvatureData, xi: &[BigRational; 3]) -> BigRational {
    let mut acc = BigRational::zero();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let e = levi_civita(a, b, c);
                if e == 0 {
                    continue;
                }
                for r in 0..3 {
                    acc += &data.dric(a)[b][r] * &xi[c] * &xi[r] * BigRational::from_integer(e.into());
                }
            }
        }
    }
    acc * BigRational::new((-1).into(), 12.into())
}

/// `−(1/12)ε^{αβγ}∇_αRic_β^ρξ_γξ_ρ/|ξ|⁵` at the base point (`ρ = 1`, flat index raising).
pub fn closed_form_rhs(data: &CurvatureData, xi: &[BigRational; 3]) -> Result<BigRational, AsymmetryError> {
    let n2: BigRational = xi.iter().map(|c| c * c).sum();
    if n2.is_zero() {
        return Err(AsymmetryError::ZeroMomentum);
    }
    let norm = GaussianRational::real(n2.clone())
        .rational_sqrt()
        .map_err(|_| AsymmetryError::IrrationalNorm(n2.to_string()))?;
    let n5 = &n2 * &n2 * norm.re();
    Ok(closed_form_numerator(data, xi) / n5)
}

pub fn xi0() -> [BigRational; 3] {
    [BigRational::zero(), BigRational::zero(), BigRational::from_integer(1.into())]
}

/// Both branches of the projection engine for one curvature input.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub geometry: GeometryJets,
    pub spectral: SpectralData,
    pub plus: ProjectionRun,
    pub minus: ProjectionRun,
}

impl PipelineRun {
    pub fn new(data: &CurvatureData, cfg: &PipelineConfig) -> Result<PipelineRun, AsymmetryError> {
        let geometry = GeometryJets::build_with(data, cfg.budget, cfg.framing)?;
        let spectral = SpectralData::new(&geometry)?;
        let plus = run(Branch::Plus, &spectral, cfg.depth)?;
        let minus = run(Branch::Minus, &spectral, cfg.depth)?;
        Ok(PipelineRun {
            geometry,
            spectral,
            plus,
            minus,
        })
    }

    /// `ã₀ = tr(P^(+) − P^(−))` and `ã_{−k} = tr(X_{+,k} − X_{−,k})`.
    pub fn a_orders(&self) -> BTreeMap<i32, Jet> {
        let mut out = BTreeMap::new();
        out.insert(0, (&self.spectral.p_plus - &self.spectral.p_minus).trace());
        for (p, m) in self.plus.records.iter().zip(&self.minus.records) {
            out.insert(-(p.k as i32), (&p.x - &m.x).trace());
        }
        out
    }
}

/// Verdicts of one pipeline run against the cancellation theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymmetryReport {
    pub generator: String,
    pub data: CurvatureData,
    pub a_orders: BTreeMap<i32, Jet>,
    /// Closed formula at `(0, ξ₀)`.
    pub predicted: BigRational,
    /// `ã₋₃(0, ξ₀)`, from the `∇Ric` part alone when `Ric(0)` is also present.
    pub computed: GaussianRational,
    pub vanishing: bool,
    pub matches: bool,
    pub transcript: String,
}

impl AsymmetryReport {
    pub fn pass(&self) -> bool {
        self.vanishing && self.matches
    }

    pub fn at_origin(&self, order: i32) -> GaussianRational {
        self.a_orders
            .get(&order)
            .map(Jet::eval_origin)
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn to_json(&self) -> Value {
        let orders: serde_json::Map<String, Value> = self
            .a_orders
            .iter()
            .rev()
            .map(|(k, j)| (k.to_string(), jet_to_json(j)))
            .collect();
        json!({
            "generator": self.generator,
            "a_orders": orders,
            "predicted": self.predicted.to_string(),
            "computed": self.computed.to_string(),
            "pass": self.pass(),
        })
    }
}

/// `[[exponents], "coefficient"]` pairs in graded-lex order.
pub fn jet_to_json(j: &Jet) -> Value {
    Value::Array(
        j.terms()
            .map(|(m, c)| json!([m.exponents().to_vec(), c.to_string()]))
            .collect(),
    )
}

/// Runs both branches, traces per order and compares with the closed formula.
pub fn asymmetry_components(
    generator: &str,
    data: &CurvatureData,
    cfg: &PipelineConfig,
) -> Result<AsymmetryReport, AsymmetryError> {
    let full = PipelineRun::new(data, cfg)?;
    curvature_selfcheck(&full.geometry)?;
    let a_orders = full.a_orders();
    let lowest = -(cfg.depth.min(2) as i32);
    let vanishing = (lowest..=0).all(|k| a_orders.get(&k).is_none_or(|j| j.eval_origin().is_zero()));
    let predicted = closed_form_rhs(data, &xi0())?;
    let computed = if cfg.depth < 3 {
        GaussianRational::zero()
    } else if data.has_ric0() && data.has_dric() {
        let part = PipelineRun::new(&data.dric_part(), cfg)?;
        part.a_orders()[&-3].eval_origin()
    } else {
        a_orders[&-3].eval_origin()
    };
    let matches = cfg.depth < 3 || computed == GaussianRational::real(predicted.clone());
    Ok(AsymmetryReport {
        generator: generator.to_string(),
        data: data.clone(),
        transcript: transcript(generator, &full),
        a_orders,
        predicted,
        computed,
        vanishing,
        matches,
    })
}

/// Linearity probe: a rational combination of basis generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationCheck {
    pub label: String,
    pub weights: Vec<(String, BigRational)>,
    pub report: AsymmetryReport,
    /// `Σ wᵢ ã₋₃(genᵢ)` from the individual reports.
    pub superposed: GaussianRational,
}

impl CombinationCheck {
    pub fn pass(&self) -> bool {
        self.report.pass() && self.superposed == self.report.computed
    }

    pub fn to_json(&self) -> Value {
        let weights: serde_json::Map<String, Value> = self
            .weights
            .iter()
            .map(|(id, w)| (id.clone(), Value::String(w.to_string())))
            .collect();
        let mut v = self.report.to_json();
        let obj = v.as_object_mut().expect("report is an object");
        obj.insert("weights".into(), Value::Object(weights));
        obj.insert("superposed".into(), Value::String(self.superposed.to_string()));
        obj.insert("pass".into(), Value::Bool(self.pass()));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepResult {
    pub reports: Vec<AsymmetryReport>,
    pub combinations: Vec<CombinationCheck>,
}

impl SweepResult {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.pass()).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.reports.len() && self.combinations.iter().all(CombinationCheck::pass)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.reports.iter().filter(|r| !r.pass()).map(|r| r.generator.clone()).collect();
        out.extend(self.combinations.iter().filter(|c| !c.pass()).map(|c| c.label.clone()));
        out
    }
}

fn combination(
    label: &str,
    weights: Vec<(String, BigRational)>,
    basis: &[Generator],
    reports: &[AsymmetryReport],
    cfg: &PipelineConfig,
) -> Result<CombinationCheck, AsymmetryError> {
    let find = |id: &str| basis.iter().position(|g| g.id == id).expect("generator id from basis");
    let terms: Vec<(BigRational, &CurvatureData)> =
        weights.iter().map(|(id, w)| (w.clone(), &basis[find(id)].data)).collect();
    let data = CurvatureData::linear_combination(&terms);
    let report = asymmetry_components(label, &data, cfg)?;
    let mut superposed = GaussianRational::zero();
    for (id, w) in &weights {
        superposed = superposed + GaussianRational::real(w.clone()) * reports[find(id)].computed.clone();
    }
    Ok(CombinationCheck {
        label: label.to_string(),
        weights,
        report,
        superposed,
    })
}

/// Seeded rational weights `p/q` with `p ∈ [−5, 5] \ {0}`, `q ∈ [1, 6]` over the `∇Ric` generators.
pub fn random_weights(basis: &[Generator], seed: u64) -> Vec<(String, BigRational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    basis
        .iter()
        .filter(|g| g.data.has_dric())
        .map(|g| {
            let mut p: i64 = rng.random_range(-5..=4);
            if p >= 0 {
                p += 1;
            }
            let q: i64 = rng.random_range(1..=6);
            (g.id.clone(), BigRational::new(BigInt::from(p), BigInt::from(q)))
        })
        .collect()
}

pub const COMBINATION_SEED: u64 = 20_240_607;

/// One report per generator, then `2·c11 + 3·c15` and a seeded random combination.
pub fn sweep(basis: &[Generator], cfg: &PipelineConfig) -> Result<SweepResult, AsymmetryError> {
    let reports = basis
        .iter()
        .map(|g| asymmetry_components(&g.id, &g.data, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut combinations = Vec::new();
    if cfg.depth >= 3 && basis.iter().any(|g| g.id == "dric-c11") && basis.iter().any(|g| g.id == "dric-c15") {
        let w = |n: i64| BigRational::from_integer(n.into());
        combinations.push(combination(
            "2*dric-c11+3*dric-c15",
            vec![("dric-c11".into(), w(2)), ("dric-c15".into(), w(3))],
            basis,
            &reports,
            cfg,
        )?);
        let weights = random_weights(basis, COMBINATION_SEED);
        if !weights.is_empty() {
            combinations.push(combination("random-combination", weights, basis, &reports, cfg)?);
        }
    }
    Ok(SweepResult { reports, combinations })
}

pub fn default_sweep(cfg: &PipelineConfig) -> Result<SweepResult, AsymmetryError> {
    sweep(&bianchi_basis(), cfg)
}

fn check_rotation(r: &[[i64; 3]; 3]) -> Result<(), AsymmetryError> {
    for row in r {
        if row.iter().filter(|v| **v != 0).count() != 1 || row.iter().any(|v| v.abs() > 1) {
            return Err(AsymmetryError::BadRotation);
        }
    }
    for c in 0..3 {
        if (0..3).filter(|&row| r[row][c] != 0).count() != 1 {
            return Err(AsymmetryError::BadRotation);
        }
    }
    let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    if det != 1 {
        return Err(AsymmetryError::BadRotation);
    }
    Ok(())
}

/// `R⁻¹v = Rᵀv` for a signed permutation.
pub fn rotate_back(r: &[[i64; 3]; 3], v: &[BigRational; 3]) -> [BigRational; 3] {
    std::array::from_fn(|i| {
        let mut acc = BigRational::zero();
        for j in 0..3 {
            acc += BigRational::from_integer(r[j][i].into()) * &v[j];
        }
        acc
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationCheck {
    pub pipeline: GaussianRational,
    pub closed_form: BigRational,
}

impl RotationCheck {
    pub fn pass(&self) -> bool {
        self.pipeline == GaussianRational::real(self.closed_form.clone())
    }
}

/// Pipeline value at `ξ₀` for data rotated by `R` against the closed formula
/// at `R⁻¹ξ₀` on the original data.
pub fn rotation_consistency(
    data: &CurvatureData,
    r: &[[i64; 3]; 3],
    cfg: &PipelineConfig,
) -> Result<RotationCheck, AsymmetryError> {
    check_rotation(r)?;
    let rotated = data.rotated(r);
    let run = PipelineRun::new(&rotated.dric_part(), cfg)?;
    let pipeline = run.a_orders().get(&-3).map(Jet::eval_origin).unwrap_or_else(GaussianRational::zero);
    let closed_form = closed_form_rhs(data, &rotate_back(r, &xi0()))?;
    Ok(RotationCheck { pipeline, closed_form })
}
