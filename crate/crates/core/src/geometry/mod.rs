//! Normal-coordinate jets of the metric, density, Christoffel symbols,
//! Levi-Civita framing and projected Pauli matrices built from pointwise
//! curvature data.

mod curvature;

use num_rational::BigRational;
use thiserror::Error;

use crate::jet::{GaussianRational, Jet, JetError, MatrixJet, Var};

pub use curvature::{bianchi_basis, CurvatureData, Generator, Sym3, SYM_PAIRS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("coefficient index {0} out of range 1..=24")]
    CoefficientIndex(usize),
    #[error("unknown curvature key `{0}`")]
    UnknownKey(String),
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
    #[error("budget {0} too small: at least {1} needed")]
    BudgetTooSmall(u32, u32),
    #[error("curvature self-check failed at {component}: expected {expected}, got {got}")]
    SelfCheck {
        component: String,
        expected: String,
        got: String,
    },
    #[error(transparent)]
    Jet(#[from] JetError),
}

pub type Mat3 = [[Jet; 3]; 3];
pub type Tensor3 = [[[Jet; 3]; 3]; 3];
pub type Tensor4 = [[[[Jet; 3]; 3]; 3]; 3];

fn mat3(f: impl Fn(usize, usize) -> Jet) -> Mat3 {
    std::array::from_fn(|a| std::array::from_fn(|b| f(a, b)))
}

fn tensor3(f: impl Fn(usize, usize, usize) -> Jet) -> Tensor3 {
    std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| f(a, b, c))))
}

fn tensor4(f: impl Fn(usize, usize, usize, usize) -> Jet) -> Tensor4 {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| std::array::from_fn(|c| std::array::from_fn(|d| f(a, b, c, d))))
    })
}

fn delta(a: usize, b: usize, budget: u32) -> Jet {
    if a == b {
        Jet::one(budget)
    } else {
        Jet::zero(budget)
    }
}

fn rat(q: &BigRational) -> GaussianRational {
    GaussianRational::real(q.clone())
}

pub fn identity3(budget: u32) -> Mat3 {
    mat3(|a, b| delta(a, b, budget))
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    mat3(|r, c| {
        let mut acc = &a[r][0] * &b[0][c];
        for k in 1..3 {
            acc = &acc + &(&a[r][k] * &b[k][c]);
        }
        acc
    })
}

fn mat3_det(m: &Mat3) -> Jet {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        &(&m[r1][c1] * &m[r2][c2]) - &(&m[r1][c2] * &m[r2][c1])
    };
    let t0 = &m[0][0] * &minor(1, 2, 1, 2);
    let t1 = &m[0][1] * &minor(1, 2, 0, 2);
    let t2 = &m[0][2] * &minor(1, 2, 0, 1);
    &(&t0 - &t1) + &t2
}

/// Inverse of `I + N` with `N` vanishing at the origin, by the Neumann series.
pub fn mat3_invert_near_identity(m: &Mat3) -> Result<Mat3, GeometryError> {
    let budget = m[0][0].budget();
    let id = identity3(budget);
    let n = mat3(|a, b| &m[a][b] - &id[a][b]);
    if n.iter().flatten().any(|j| !j.eval_origin().is_zero()) {
        return Err(JetError::ZeroConstantTerm.into());
    }
    let minus_n = mat3(|a, b| -&n[a][b]);
    let mut sum = id.clone();
    let mut power = id;
    for _ in 0..budget {
        power = mat3_mul(&power, &minus_n);
        sum = mat3(|a, b| &sum[a][b] + &power[a][b]);
    }
    Ok(sum)
}

/// `Riem_{αβγδ}` from the Ricci tensor and the metric, valid in dimension 3:
///
/// `Riem_{αβγδ} = Ric_{αγ}g_{βδ} − Ric_{αδ}g_{βγ} + Ric_{βδ}g_{αγ} − Ric_{βγ}g_{αδ}
///  + (Sc/2)(g_{αδ}g_{βγ} − g_{αγ}g_{βδ})`, with `Sc = g^{μν}Ric_{μν}`.
pub fn riem_from_ric(ric: &Mat3, g: &Mat3, g_inv: &Mat3) -> Tensor4 {
    let budget = g[0][0].budget();
    let mut sc = Jet::zero(budget);
    for m in 0..3 {
        for n in 0..3 {
            sc = &sc + &(&g_inv[m][n] * &ric[m][n]);
        }
    }
    let half_sc = sc.scale(&GaussianRational::frac(1, 2));
    tensor4(|a, b, c, d| {
        let t = &(&ric[a][c] * &g[b][d]) - &(&ric[a][d] * &g[b][c]);
        let t = &t + &(&ric[b][d] * &g[a][c]);
        let t = &t - &(&ric[b][c] * &g[a][d]);
        let w = &(&g[a][d] * &g[b][c]) - &(&g[a][c] * &g[b][d]);
        &t + &(&half_sc * &w)
    })
}

/// `Riem(0)` and `∇_σRiem(0)` (`σ = 0..3`) as constant jets at budget 0.
///
/// `∇Riem(0)` differentiates the Ricci identity once at the base point, where
/// `g = δ` and `∇g = 0`, so it is the same linear map applied to `∇_σRic(0)`.
pub fn curvature_at_origin(data: &CurvatureData) -> (Tensor4, [Tensor4; 3]) {
    let id = identity3(0);
    let constant = |m: &Sym3| mat3(|a, b| Jet::constant(rat(&m[a][b]), 0));
    let riem0 = riem_from_ric(&constant(data.ric0()), &id, &id);
    let driem = std::array::from_fn(|s| riem_from_ric(&constant(data.dric(s)), &id, &id));
    (riem0, driem)
}

/// Metric, inverse metric and density jets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricJets {
    pub g: Mat3,
    pub g_inv: Mat3,
    pub rho: Jet,
}

/// `g_{αβ} = δ_{αβ} − ⅓Riem_{αμβν}(0)x^μx^ν − ⅙∇_σRiem_{αμβν}(0)x^μx^νx^σ`,
/// its inverse, and `ρ = √det g`, all truncated at `budget`.
pub fn metric_jet(data: &CurvatureData, budget: u32) -> Result<MetricJets, GeometryError> {
    let (riem0, driem) = curvature_at_origin(data);
    let x = |a: usize| Jet::var(Var::x(a), budget);
    let third = GaussianRational::frac(-1, 3);
    let sixth = GaussianRational::frac(-1, 6);
    let g = mat3(|a, b| {
        let mut acc = delta(a, b, budget);
        for m in 0..3 {
            for n in 0..3 {
                let xx = &x(m) * &x(n);
                let c = riem0[a][m][b][n].eval_origin();
                if !c.is_zero() {
                    acc = &acc + &xx.scale(&(&c * &third));
                }
                for s in 0..3 {
                    let c = driem[s][a][m][b][n].eval_origin();
                    if !c.is_zero() {
                        acc = &acc + &(&xx * &x(s)).scale(&(&c * &sixth));
                    }
                }
            }
        }
        acc
    });
    let g_inv = mat3_invert_near_identity(&g)?;
    let rho = mat3_det(&g).sqrt()?;
    Ok(MetricJets { g, g_inv, rho })
}

/// `Γ^α_{βγ} = ½ g^{αμ}(∂_βg_{μγ} + ∂_γg_{μβ} − ∂_μg_{βγ})`, indexed `[α][β][γ]`.
pub fn christoffel_jet(g: &Mat3, g_inv: &Mat3) -> Tensor3 {
    let dg: Tensor3 = tensor3(|m, a, b| g[a][b].derivative(Var::x(m)));
    let half = GaussianRational::frac(1, 2);
    tensor3(|a, b, c| {
        let budget = g[0][0].budget();
        let mut acc = Jet::zero(budget);
        for m in 0..3 {
            let bracket = &(&dg[b][m][c] + &dg[c][m][b]) - &dg[m][b][c];
            acc = &acc + &(&g_inv[a][m] * &bracket);
        }
        acc.scale(&half)
    })
}

/// Constant `∂_σ∂_νΓ^α_{βμ}(0)`, indexed `[σ][ν][α][β][μ]` flattened as a closure.
fn second_derivatives_at_origin(gamma: &Tensor3) -> impl Fn(usize, usize, usize, usize, usize) -> GaussianRational + '_ {
    move |s, n, a, b, m| {
        gamma[a][b][m]
            .derivative(Var::x(n))
            .derivative(Var::x(s))
            .eval_origin()
    }
}

/// Coefficient of the cubic term in the framing expansion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum FramingConvention {
    /// `⅙`, the radial parallel-transport frame; orthonormal to every order.
    #[default]
    ParallelTransport,
    /// `⅑`, the expansion as printed in the reference closed-form case.
    /// Not orthonormal at cubic order once `∇Ric(0) ≠ 0`.
    Printed,
}

impl FramingConvention {
    pub fn cubic_coefficient(self) -> GaussianRational {
        match self {
            FramingConvention::ParallelTransport => GaussianRational::frac(1, 6),
            FramingConvention::Printed => GaussianRational::frac(1, 9),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FramingConvention::ParallelTransport => "parallel-transport",
            FramingConvention::Printed => "printed",
        }
    }

    pub fn parse(s: &str) -> Option<FramingConvention> {
        match s {
            "parallel-transport" => Some(FramingConvention::ParallelTransport),
            "printed" => Some(FramingConvention::Printed),
            _ => None,
        }
    }
}

/// Levi-Civita framing `ẽ_j^α` (indexed `[j][α]`) generated by `V_j = e_j`:
///
/// `ẽ_j^α = δ_j^α + ⅙Riem^α_{βjν}(0)x^βx^ν − c∂_σ∂_νΓ^α_{βj}(0)x^βx^νx^σ`,
/// indices raised with `g(0) = δ`, `c` set by the convention.
pub fn levi_civita_framing_jet(
    data: &CurvatureData,
    gamma: &Tensor3,
    convention: FramingConvention,
) -> Mat3 {
    let budget = gamma[0][0][0].budget();
    let (riem0, _) = curvature_at_origin(data);
    let d2 = second_derivatives_at_origin(gamma);
    let x = |a: usize| Jet::var(Var::x(a), budget);
    let sixth = GaussianRational::frac(1, 6);
    let cubic = convention.cubic_coefficient();
    mat3(|j, a| {
        let mut acc = delta(j, a, budget);
        for b in 0..3 {
            for n in 0..3 {
                let c = riem0[a][b][j][n].eval_origin();
                if !c.is_zero() {
                    acc = &acc + &(&x(b) * &x(n)).scale(&(&c * &sixth));
                }
                for s in 0..3 {
                    let c = d2(s, n, a, b, j);
                    if !c.is_zero() {
                        let xxx = &(&x(b) * &x(n)) * &x(s);
                        acc = &acc - &xxx.scale(&(&c * &cubic));
                    }
                }
            }
        }
        acc
    })
}

/// `σ̃^α = s^j ẽ_j^α`.
pub fn pauli_projection_jet(framing: &Mat3) -> [MatrixJet; 3] {
    let budget = framing[0][0].budget();
    std::array::from_fn(|a| {
        let mut acc = MatrixJet::zero(budget);
        for j in 0..3 {
            acc = &acc + &MatrixJet::pauli(j + 1, budget).mul_jet(&framing[j][a]);
        }
        acc
    })
}

/// Every geometric jet the symbol pipeline needs, built once per curvature input.
#[derive(Clone, Debug)]
pub struct GeometryJets {
    pub budget: u32,
    pub convention: FramingConvention,
    pub data: CurvatureData,
    pub g: Mat3,
    pub g_inv: Mat3,
    pub rho: Jet,
    pub christoffel: Tensor3,
    /// `ẽ_j^α`, indexed `[j][α]`.
    pub framing: Mat3,
    /// `σ̃^α`.
    pub pauli: [MatrixJet; 3],
}

impl GeometryJets {
    pub fn build(data: &CurvatureData, budget: u32) -> Result<GeometryJets, GeometryError> {
        Self::build_with(data, budget, FramingConvention::default())
    }

    pub fn build_with(
        data: &CurvatureData,
        budget: u32,
        convention: FramingConvention,
    ) -> Result<GeometryJets, GeometryError> {
        if budget < 2 {
            return Err(GeometryError::BudgetTooSmall(budget, 2));
        }
        let MetricJets { g, g_inv, rho } = metric_jet(data, budget)?;
        let christoffel = christoffel_jet(&g, &g_inv);
        let framing = levi_civita_framing_jet(data, &christoffel, convention);
        let pauli = pauli_projection_jet(&framing);
        Ok(GeometryJets {
            budget,
            convention,
            data: data.clone(),
            g,
            g_inv,
            rho,
            christoffel,
            framing,
            pauli,
        })
    }

    /// `σ̃_β = g_{βμ}σ̃^μ`.
    pub fn pauli_lowered(&self) -> [MatrixJet; 3] {
        std::array::from_fn(|b| {
            let mut acc = MatrixJet::zero(self.budget);
            for m in 0..3 {
                acc = &acc + &self.pauli[m].mul_jet(&self.g[b][m]);
            }
            acc
        })
    }

    /// `g_{αβ}ẽ_j^αẽ_k^β`, which equals `δ_{jk}` for an orthonormal framing.
    pub fn framing_gram(&self) -> Mat3 {
        mat3(|j, k| {
            let mut acc = Jet::zero(self.budget);
            for a in 0..3 {
                for b in 0..3 {
                    acc = &acc + &(&(&self.g[a][b] * &self.framing[j][a]) * &self.framing[k][b]);
                }
            }
            acc
        })
    }

    pub fn det_g(&self) -> Jet {
        mat3_det(&self.g)
    }
}

/// Recomputes `Riem(0)` and `∂_σRiem(0)` from the Christoffel jets and compares
/// them with the Ricci-identity values derived from the input data.
pub fn curvature_selfcheck(geom: &GeometryJets) -> Result<(), GeometryError> {
    if geom.budget < 3 && geom.data.has_dric() {
        return Err(GeometryError::BudgetTooSmall(geom.budget, 3));
    }
    let (riem0, driem) = curvature_at_origin(&geom.data);
    let gamma = &geom.christoffel;
    // Riem^κ_{λμν} = ∂_μΓ^κ_{νλ} − ∂_νΓ^κ_{μλ} + Γ^κ_{μη}Γ^η_{νλ} − Γ^κ_{νη}Γ^η_{μλ}
    let riem_up = |k: usize, l: usize, m: usize, n: usize| {
        let mut r = &gamma[k][n][l].derivative(Var::x(m)) - &gamma[k][m][l].derivative(Var::x(n));
        for e in 0..3 {
            r = &r + &(&gamma[k][m][e] * &gamma[e][n][l]);
            r = &r - &(&gamma[k][n][e] * &gamma[e][m][l]);
        }
        r
    };
    let name = |k: usize, l: usize, m: usize, n: usize| format!("{}{}{}{}", k + 1, l + 1, m + 1, n + 1);
    for k in 0..3 {
        for l in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    let r = riem_up(k, l, m, n);
                    // g(0) = δ, so lowering κ is the identity at the base point
                    let expected = riem0[k][l][m][n].eval_origin();
                    let got = r.eval_origin();
                    if expected != got {
                        return Err(GeometryError::SelfCheck {
                            component: format!("Riem_{}(0)", name(k, l, m, n)),
                            expected: expected.to_string(),
                            got: got.to_string(),
                        });
                    }
                    if geom.budget < 3 {
                        continue;
                    }
                    for s in 0..3 {
                        // Γ(0) = 0 makes ∂_σ and ∇_σ agree, and the lowering
                        // correction ∂_σg(0) vanishes in normal coordinates
                        let expected = driem[s][k][l][m][n].eval_origin();
                        let got = r.derivative(Var::x(s)).eval_origin();
                        if expected != got {
                            return Err(GeometryError::SelfCheck {
                                component: format!("∇_{}Riem_{}(0)", s + 1, name(k, l, m, n)),
                                expected: expected.to_string(),
                                got: got.to_string(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, budget: u32) -> Jet {
        Jet::parse(s, budget).unwrap()
    }

    fn assert_mat(m: &Mat3, expect: [[&str; 3]; 3]) {
        let b = m[0][0].budget();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(m[r][c], p(expect[r][c], b), "entry ({r},{c})");
            }
        }
    }

    fn c11() -> CurvatureData {
        CurvatureData::unit(11).unwrap()
    }

    #[test]
    fn c1_metric_and_density() {
        let m = metric_jet(&CurvatureData::unit(1).unwrap(), 2).unwrap();
        assert_mat(
            &m.g,
            [
                ["1 - x2^2/6 - x3^2/6", "x1*x2/6", "x1*x3/6"],
                ["x1*x2/6", "1 - x1^2/6 + x3^2/6", "-x2*x3/6"],
                ["x1*x3/6", "-x2*x3/6", "1 - x1^2/6 + x2^2/6"],
            ],
        );
        assert_eq!(m.rho, p("1 - x1^2/6", 2));
    }

    #[test]
    fn c11_metric_inverse_and_density() {
        let m = metric_jet(&c11(), 3).unwrap();
        assert_mat(
            &m.g,
            [
                ["1 - x1*x2*x3/3", "x1^2*x3/6", "x1^2*x2/6"],
                ["x1^2*x3/6", "1", "-x1^3/6"],
                ["x1^2*x2/6", "-x1^3/6", "1"],
            ],
        );
        assert_mat(
            &m.g_inv,
            [
                ["1 + x1*x2*x3/3", "-x1^2*x3/6", "-x1^2*x2/6"],
                ["-x1^2*x3/6", "1", "x1^3/6"],
                ["-x1^2*x2/6", "x1^3/6", "1"],
            ],
        );
        assert_eq!(m.rho, p("1 - x1*x2*x3/6", 3));
    }

    #[test]
    fn flat_is_trivial() {
        let g = GeometryJets::build(&CurvatureData::flat(), 4).unwrap();
        assert_eq!(g.g, identity3(4));
        assert_eq!(g.framing, identity3(4));
        assert!(g.christoffel.iter().flatten().flatten().all(Jet::is_zero));
        for a in 0..3 {
            assert_eq!(g.pauli[a], MatrixJet::pauli(a + 1, 4));
        }
        curvature_selfcheck(&g).unwrap();
    }

    #[test]
    fn c11_framing_printed_convention() {
        let g = GeometryJets::build_with(&c11(), 3, FramingConvention::Printed).unwrap();
        assert_mat(
            &g.framing,
            [
                ["1 + x1*x2*x3/9", "-x1^2*x3/18", "-x1^2*x2/18"],
                ["-x1^2*x3/18", "1", "x1^3/18"],
                ["-x1^2*x2/18", "x1^3/18", "1"],
            ],
        );
        let expect = [
            ["-x1^2*x2/18", "1 + x1*x2*x3/9 + i*x1^2*x3/18"],
            ["1 + x1*x2*x3/9 - i*x1^2*x3/18", "x1^2*x2/18"],
        ];
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(*g.pauli[0].entry(r, c), p(expect[r][c], 3));
            }
        }
        assert_eq!(*g.pauli[1].entry(0, 1), p("-x1^2*x3/18 - i", 3));
        assert_eq!(*g.pauli[2].entry(1, 0), p("-x1^2*x2/18 + i*x1^3/18", 3));
    }

    #[test]
    fn c11_framing_parallel_transport() {
        let g = GeometryJets::build(&c11(), 3).unwrap();
        assert_mat(
            &g.framing,
            [
                ["1 + x1*x2*x3/6", "-x1^2*x3/12", "-x1^2*x2/12"],
                ["-x1^2*x3/12", "1", "x1^3/12"],
                ["-x1^2*x2/12", "x1^3/12", "1"],
            ],
        );
    }

    #[test]
    fn framing_orthonormal_for_every_generator() {
        for gen in bianchi_basis() {
            let g = GeometryJets::build(&gen.data, 3).unwrap();
            assert_eq!(g.framing_gram(), identity3(3), "{}", gen.id);
        }
    }

    #[test]
    fn printed_framing_not_orthonormal() {
        let g = GeometryJets::build_with(&c11(), 3, FramingConvention::Printed).unwrap();
        assert_ne!(g.framing_gram(), identity3(3));
    }

    #[test]
    fn normal_coordinate_invariants() {
        for gen in bianchi_basis() {
            let g = GeometryJets::build(&gen.data, 4).unwrap();
            let id = identity3(4);
            assert_eq!(mat3_mul(&g.g, &g.g_inv), id, "{}", gen.id);
            assert_eq!(&g.rho * &g.rho, g.det_g(), "{}", gen.id);
            assert!(g.det_g().eval_origin() == GaussianRational::one());
            for a in 0..3 {
                assert_eq!(g.pauli[a].at_origin(), MatrixJet::pauli(a + 1, 4));
                for v in 0..3 {
                    assert!(g.pauli[a].derivative(Var::x(v)).at_origin().is_zero());
                }
            }
            assert!(g.christoffel.iter().flatten().flatten().all(|j| j.eval_origin().is_zero()));
            curvature_selfcheck(&g).unwrap_or_else(|e| panic!("{}: {e}", gen.id));
        }
    }

    #[test]
    fn linear_in_dric_coefficients() {
        let basis = bianchi_basis();
        let dric: Vec<_> = basis.iter().filter(|g| g.data.has_dric()).collect();
        for pair in dric.windows(2) {
            let sum = CurvatureData::linear_combination(&[
                (BigRational::from_integer(1.into()), &pair[0].data),
                (BigRational::from_integer(1.into()), &pair[1].data),
            ]);
            let a = GeometryJets::build(&pair[0].data, 3).unwrap();
            let b = GeometryJets::build(&pair[1].data, 3).unwrap();
            let s = GeometryJets::build(&sum, 3).unwrap();
            let one = identity3(3);
            for r in 0..3 {
                for c in 0..3 {
                    let lin = |m: &Mat3, n: &Mat3| &(&m[r][c] + &n[r][c]) - &one[r][c];
                    assert_eq!(s.g[r][c], lin(&a.g, &b.g));
                    assert_eq!(s.framing[r][c], lin(&a.framing, &b.framing));
                }
            }
            for k in 0..3 {
                let diff = &(&s.pauli[k] - &a.pauli[k]) - &b.pauli[k];
                assert_eq!(diff, -&MatrixJet::pauli(k + 1, 3));
            }
        }
    }

    #[test]
    fn selfcheck_reports_mismatch() {
        let mut g = GeometryJets::build(&CurvatureData::unit(1).unwrap(), 3).unwrap();
        g.data = CurvatureData::unit(2).unwrap();
        match curvature_selfcheck(&g) {
            Err(GeometryError::SelfCheck { component, .. }) => assert!(component.starts_with("Riem_")),
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn budget_too_small_rejected() {
        assert_eq!(
            GeometryJets::build(&c11(), 1).unwrap_err(),
            GeometryError::BudgetTooSmall(1, 2)
        );
    }
}
