//! Framing rotations `e_j = O_j^k ẽ_k`, their SU(2) lifts `G` with
//! `G* s^j G = O_j^k s^k`, and covariance of the Dirac symbol under them.

use num_rational::BigRational;
use thiserror::Error;

use crate::geometry::{identity3, mat3_mul, pauli_projection_jet, GeometryJets, Mat3};
use crate::jet::{GaussianRational, Jet, JetError, MatrixJet, Var};
use crate::symbol::{dirac_symbol, eigenprojections, norm_jet, DiracSymbol, SymbolError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaugeError {
    #[error("rotation is not orthogonal with determinant 1 up to the budget")]
    NotOrthogonal,
    #[error("generator is not antisymmetric")]
    NotAntisymmetric,
    #[error("lift needs the square root of {0}, which is not rational")]
    IrrationalLift(String),
    #[error("covariance mismatch in {0}")]
    Mismatch(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

fn transpose(m: &Mat3) -> Mat3 {
    std::array::from_fn(|a| std::array::from_fn(|b| m[b][a].clone()))
}

/// A 3×3 rotation-valued jet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameRotation {
    o: Mat3,
}

impl FrameRotation {
    pub fn new(o: Mat3) -> Result<FrameRotation, GaugeError> {
        let r = FrameRotation { o };
        if !r.is_orthogonal() {
            return Err(GaugeError::NotOrthogonal);
        }
        Ok(r)
    }

    pub fn identity(budget: u32) -> FrameRotation {
        FrameRotation { o: identity3(budget) }
    }

    pub fn constant(m: &[[i64; 3]; 3], budget: u32) -> Result<FrameRotation, GaugeError> {
        Self::new(std::array::from_fn(|a| {
            std::array::from_fn(|b| Jet::constant(GaussianRational::from_int(m[a][b]), budget))
        }))
    }

    pub fn constant_rational(m: &[[BigRational; 3]; 3], budget: u32) -> Result<FrameRotation, GaugeError> {
        Self::new(std::array::from_fn(|a| {
            std::array::from_fn(|b| Jet::constant(GaussianRational::real(m[a][b].clone()), budget))
        }))
    }

    /// `exp(x^v J)` for a constant antisymmetric `J`, summed to the budget.
    pub fn exp_linear(j: &[[i64; 3]; 3], v: Var, budget: u32) -> Result<FrameRotation, GaugeError> {
        for a in 0..3 {
            for b in 0..3 {
                if j[a][b] != -j[b][a] {
                    return Err(GaugeError::NotAntisymmetric);
                }
            }
        }
        let x = Jet::var(v, budget);
        let gen: Mat3 = std::array::from_fn(|a| {
            std::array::from_fn(|b| x.scale(&GaussianRational::from_int(j[a][b])))
        });
        let mut sum = identity3(budget);
        let mut term = identity3(budget);
        for n in 1..=budget {
            term = mat3_mul(&term, &gen);
            let inv_n = GaussianRational::frac(1, n as i64);
            term = term.map(|row| row.map(|e| e.scale(&inv_n)));
            sum = std::array::from_fn(|a| std::array::from_fn(|b| &sum[a][b] + &term[a][b]));
        }
        Self::new(sum)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.o
    }

    pub fn budget(&self) -> u32 {
        self.o[0][0].budget()
    }

    pub fn compose(&self, other: &FrameRotation) -> FrameRotation {
        FrameRotation {
            o: mat3_mul(&self.o, &other.o),
        }
    }

    pub fn is_orthogonal(&self) -> bool {
        let b = self.budget();
        if mat3_mul(&transpose(&self.o), &self.o) != identity3(b) {
            return false;
        }
        let m = &self.o;
        let det = &(&(&m[0][0] * &(&(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1])))
            - &(&m[0][1] * &(&(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0]))))
            + &(&m[0][2] * &(&(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0])));
        det == Jet::one(b)
    }

    /// `Σ_k O_j^k s^k`.
    pub fn rotated_pauli(&self, j: usize) -> MatrixJet {
        let b = self.budget();
        let mut acc = MatrixJet::zero(b);
        for k in 0..3 {
            acc = &acc + &MatrixJet::pauli(k + 1, b).mul_jet(&self.o[j][k]);
        }
        acc
    }

    /// `e_j^α = O_j^k ẽ_k^α`.
    pub fn apply_to_framing(&self, framing: &Mat3) -> Mat3 {
        mat3_mul(&self.o, framing)
    }
}

/// An SU(2)-valued jet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeField {
    g: MatrixJet,
}

impl GaugeField {
    pub fn new(g: MatrixJet) -> Result<GaugeField, GaugeError> {
        let b = g.budget();
        if &g.hermitian() * &g != MatrixJet::identity(b) || g.determinant() != Jet::one(b) {
            return Err(GaugeError::NotOrthogonal);
        }
        Ok(GaugeField { g })
    }

    pub fn matrix(&self) -> &MatrixJet {
        &self.g
    }

    /// `G* M G`.
    pub fn conjugate(&self, m: &MatrixJet) -> MatrixJet {
        &(&self.g.hermitian() * m) * &self.g
    }

    /// `true` when `G* s^j G = O_j^k s^k` for every `j`.
    pub fn satisfies_adjoint(&self, o: &FrameRotation) -> bool {
        (0..3).all(|j| self.conjugate(&MatrixJet::pauli(j + 1, self.g.budget())) == o.rotated_pauli(j))
    }

    pub fn equal_up_to_sign(&self, other: &GaugeField) -> bool {
        self.g == other.g || self.g == -&other.g
    }
}

/// The lift of `O` with `G* s^j G = O_j^k s^k`.
///
/// With `Φ(X) = X + Σ_j (O_j^k s^k) X s^j = 2 tr(GX) G*`, the first `X` among
/// `I, i s¹, i s², i s³` with `tr(GX)(0) ≠ 0` gives `G* = Φ(X)/√det Φ(X)`. The
/// positive root fixes the branch: `tr(GX)(0) > 0`, so `Re G₁₁(0) > 0` whenever
/// `G(0)` has a nonzero identity component.
pub fn su2_lift(o: &FrameRotation) -> Result<GaugeField, GaugeError> {
    if !o.is_orthogonal() {
        return Err(GaugeError::NotOrthogonal);
    }
    let b = o.budget();
    let i = GaussianRational::i();
    let seeds = [
        MatrixJet::identity(b),
        MatrixJet::pauli(1, b).scale(&i),
        MatrixJet::pauli(2, b).scale(&i),
        MatrixJet::pauli(3, b).scale(&i),
    ];
    let rotated: Vec<MatrixJet> = (0..3).map(|j| o.rotated_pauli(j)).collect();
    for x in &seeds {
        let mut phi = x.clone();
        for j in 0..3 {
            phi = &phi + &(&(&rotated[j] * x) * &MatrixJet::pauli(j + 1, b));
        }
        if phi.eval_origin().iter().flatten().all(GaussianRational::is_zero) {
            continue;
        }
        let det = phi.determinant();
        let root = det
            .sqrt()
            .map_err(|_| GaugeError::IrrationalLift(det.eval_origin().to_string()))?;
        let g_star = phi.mul_jet(&root.invert()?);
        return GaugeField::new(g_star.hermitian());
    }
    Err(GaugeError::NotOrthogonal)
}

/// `prin → G* prin G`, `zero → −iG*σ̃^α∂_αG + G* zero G`, with `σ̃` the Pauli
/// matrices of the input symbol.
pub fn gauge_transform_dirac(dirac: &DiracSymbol, pauli: &[MatrixJet; 3], g: &GaugeField) -> DiracSymbol {
    let gm = g.matrix();
    let gs = gm.hermitian();
    let mut deriv = MatrixJet::zero(gm.budget());
    for a in 0..3 {
        deriv = &deriv + &(&(&gs * &pauli[a]) * &gm.derivative(Var::x(a)));
    }
    DiracSymbol {
        prin: g.conjugate(&dirac.prin),
        zero: &deriv.scale(&-GaussianRational::i()) + &g.conjugate(&dirac.zero),
    }
}

/// Summary of a covariance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovarianceReport {
    pub prin: bool,
    pub zero: bool,
    pub p_plus: bool,
    pub p_minus: bool,
}

impl CovarianceReport {
    pub fn pass(&self) -> bool {
        self.prin && self.zero && self.p_plus && self.p_minus
    }
}

/// Rebuilds the Dirac symbol in the frame `e_j = O_j^k ẽ_k` for a constant `O`,
/// conjugates it with the lift of `O`, and compares with the Levi-Civita-frame symbol.
pub fn covariance_check(geom: &GeometryJets, o: &FrameRotation) -> Result<CovarianceReport, GaugeError> {
    if o.budget() != geom.budget {
        return Err(JetError::BudgetMismatch(geom.budget, o.budget()).into());
    }
    let g = su2_lift(o)?;
    let base = dirac_symbol(geom);
    let mut rotated_geom = geom.clone();
    rotated_geom.framing = o.apply_to_framing(&geom.framing);
    rotated_geom.pauli = pauli_projection_jet(&rotated_geom.framing);
    let rotated = dirac_symbol(&rotated_geom);
    let back = gauge_transform_dirac(&rotated, &rotated_geom.pauli, &g);
    let (_, h_inv) = norm_jet(geom)?;
    let (pp, pm) = eigenprojections(&base, &h_inv);
    let (rp, rm) = eigenprojections(&rotated, &h_inv);
    Ok(CovarianceReport {
        prin: back.prin == base.prin,
        zero: back.zero == base.zero,
        p_plus: g.conjugate(&rp) == pp,
        p_minus: g.conjugate(&rm) == pm,
    })
}

/// Outcome of one named gauge check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeCheck {
    pub name: String,
    pub pass: bool,
}

/// Constant rotations used by the standard checks: identity, half turn about
/// `e₃`, the cyclic permutation `e₁ → e₂ → e₃`.
pub fn standard_rotations(budget: u32) -> Vec<(&'static str, FrameRotation)> {
    let c = |m: &[[i64; 3]; 3]| FrameRotation::constant(m, budget).expect("signed permutation");
    vec![
        ("identity", FrameRotation::identity(budget)),
        ("half-turn-e3", c(&[[-1, 0, 0], [0, -1, 0], [0, 0, 1]])),
        ("cyclic", c(&[[0, 0, 1], [1, 0, 0], [0, 1, 0]])),
    ]
}

/// Covariance under the standard rotations, agreement of the `∂G` term with
/// symbol composition for `exp(x¹J₁₂)`, and the sign-homomorphism of the lift.
pub fn standard_checks(geom: &GeometryJets) -> Result<Vec<GaugeCheck>, GaugeError> {
    use crate::symbol::{compose, GradedSymbol};
    let b = geom.budget;
    let mut out = Vec::new();
    let rots = standard_rotations(b);
    for (name, o) in &rots {
        out.push(GaugeCheck {
            name: format!("covariance/{name}"),
            pass: covariance_check(geom, o)?.pass(),
        });
    }
    let local = FrameRotation::exp_linear(&[[0, 1, 0], [-1, 0, 0], [0, 0, 0]], Var::X1, b)?;
    let g = su2_lift(&local)?;
    let w = dirac_symbol(geom);
    let t = gauge_transform_dirac(&w, &geom.pauli, &g);
    let gs = GradedSymbol::single(0, g.matrix().hermitian());
    let gg = GradedSymbol::single(0, g.matrix().clone());
    let full = compose(&compose(&gs, &w.to_graded(), 0)?, &gg, 0)?;
    out.push(GaugeCheck {
        name: "x-dependent/composition".into(),
        pass: g.satisfies_adjoint(&local)
            && full.part(1) == t.prin
            && full.part(0).truncate(b - 1) == t.zero.truncate(b - 1),
    });
    let mut all = rots.into_iter().map(|(_, o)| o).collect::<Vec<_>>();
    all.push(local);
    let mut hom = true;
    for o1 in &all {
        for o2 in &all {
            let lhs = su2_lift(&o1.compose(o2))?;
            let rhs = GaugeField::new(su2_lift(o1)?.matrix() * su2_lift(o2)?.matrix())?;
            hom &= lhs.equal_up_to_sign(&rhs);
        }
    }
    out.push(GaugeCheck {
        name: "lift/homomorphism".into(),
        pass: hom,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{bianchi_basis, CurvatureData};
    use crate::symbol::{compose, GradedSymbol};

    const PI_E3: [[i64; 3]; 3] = [[-1, 0, 0], [0, -1, 0], [0, 0, 1]];
    const E3_TO_E1: [[i64; 3]; 3] = [[0, 0, 1], [1, 0, 0], [0, 1, 0]];
    const J12: [[i64; 3]; 3] = [[0, 1, 0], [-1, 0, 0], [0, 0, 0]];

    fn diag(a: GaussianRational, d: GaussianRational, b: u32) -> MatrixJet {
        MatrixJet::constant([[a, GaussianRational::zero()], [GaussianRational::zero(), d]], b)
    }

    #[test]
    fn identity_lifts_to_identity() {
        let g = su2_lift(&FrameRotation::identity(2)).unwrap();
        assert_eq!(*g.matrix(), MatrixJet::identity(2));
    }

    #[test]
    fn half_turn_about_e3() {
        let o = FrameRotation::constant(&PI_E3, 1).unwrap();
        let g = su2_lift(&o).unwrap();
        let i = GaussianRational::i();
        assert_eq!(*g.matrix(), diag(-i.clone(), i, 1));
        assert_eq!(g.conjugate(&MatrixJet::pauli(1, 1)), -&MatrixJet::pauli(1, 1));
        assert_eq!(g.conjugate(&MatrixJet::pauli(2, 1)), -&MatrixJet::pauli(2, 1));
        assert_eq!(g.conjugate(&MatrixJet::pauli(3, 1)), MatrixJet::pauli(3, 1));
    }

    #[test]
    fn x_dependent_lift() {
        let o = FrameRotation::exp_linear(&J12, Var::X1, 2).unwrap();
        let g = su2_lift(&o).unwrap();
        assert!(g.satisfies_adjoint(&o));
        assert_eq!(g.matrix().eval_origin(), MatrixJet::identity(2).eval_origin());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(FrameRotation::constant(&[[1, 1, 0], [0, 1, 0], [0, 0, 1]], 1), Err(GaugeError::NotOrthogonal));
        assert_eq!(FrameRotation::constant(&[[1, 0, 0], [0, 1, 0], [0, 0, -1]], 1), Err(GaugeError::NotOrthogonal));
        assert_eq!(FrameRotation::exp_linear(&[[0, 1, 0], [1, 0, 0], [0, 0, 0]], Var::X1, 2), Err(GaugeError::NotAntisymmetric));
        let quarter = FrameRotation::constant(&[[0, -1, 0], [1, 0, 0], [0, 0, 1]], 1).unwrap();
        assert!(matches!(su2_lift(&quarter), Err(GaugeError::IrrationalLift(_))));
    }

    #[test]
    fn lift_is_homomorphism_up_to_sign() {
        let b = 3;
        let rots = [
            FrameRotation::constant(&PI_E3, b).unwrap(),
            FrameRotation::constant(&E3_TO_E1, b).unwrap(),
            FrameRotation::exp_linear(&J12, Var::X1, b).unwrap(),
            FrameRotation::exp_linear(&[[0, 0, 1], [0, 0, 0], [-1, 0, 0]], Var::X3, b).unwrap(),
        ];
        for o1 in &rots {
            for o2 in &rots {
                let prod = su2_lift(&o1.compose(o2)).unwrap();
                let g1 = su2_lift(o1).unwrap();
                let g2 = su2_lift(o2).unwrap();
                assert!(g1.satisfies_adjoint(o1));
                let both = GaugeField::new(g1.matrix() * g2.matrix()).unwrap();
                assert!(prod.equal_up_to_sign(&both));
            }
        }
    }

    #[test]
    fn trace_is_gauge_invariant() {
        let g = su2_lift(&FrameRotation::exp_linear(&J12, Var::X2, 3).unwrap()).unwrap();
        let m = MatrixJet::new([
            [Jet::parse("x1*e2 + 3", 3).unwrap(), Jet::parse("i*x3^2", 3).unwrap()],
            [Jet::parse("e1 - x2", 3).unwrap(), Jet::parse("x1*x2*e3", 3).unwrap()],
        ])
        .unwrap();
        assert_eq!(g.conjugate(&m).trace(), m.trace());
    }

    #[test]
    fn identity_gauge_is_trivial() {
        let geom = GeometryJets::build(&CurvatureData::unit(11).unwrap(), 3).unwrap();
        let w = dirac_symbol(&geom);
        let g = su2_lift(&FrameRotation::identity(3)).unwrap();
        assert_eq!(gauge_transform_dirac(&w, &geom.pauli, &g), w);
    }

    #[test]
    fn constant_gauge_on_flat_symbol() {
        let geom = GeometryJets::build(&CurvatureData::flat(), 2).unwrap();
        let w = dirac_symbol(&geom);
        let g = su2_lift(&FrameRotation::constant(&E3_TO_E1, 2).unwrap()).unwrap();
        let t = gauge_transform_dirac(&w, &geom.pauli, &g);
        assert!(t.zero.is_zero());
        assert_eq!(t.prin, g.conjugate(&w.prin));
        assert_ne!(t.prin, w.prin);
    }

    #[test]
    fn x_dependent_gauge_generates_zero_order_term() {
        let b = 2;
        let geom = GeometryJets::build(&CurvatureData::flat(), b).unwrap();
        let w = dirac_symbol(&geom);
        let g = su2_lift(&FrameRotation::exp_linear(&J12, Var::X1, b).unwrap()).unwrap();
        let t = gauge_transform_dirac(&w, &geom.pauli, &g);
        assert!(!t.zero.is_zero());
        // the same two components from composing G*∘W∘G
        let gs = GradedSymbol::single(0, g.matrix().hermitian());
        let gg = GradedSymbol::single(0, g.matrix().clone());
        let full = compose(&compose(&gs, &w.to_graded(), 0).unwrap(), &gg, 0).unwrap();
        // one x-derivative of G: the top degree is not resolved
        assert_eq!(full.part(1), t.prin);
        assert_eq!(full.part(0).truncate(b - 1), t.zero.truncate(b - 1));
        let i = GaussianRational::i();
        let half = GaussianRational::frac(1, 2);
        let z01 = Jet::constant(-half.clone(), b - 1) + Jet::var(Var::X1, b - 1).scale(&(&i * &half));
        assert_eq!(*t.zero.truncate(b - 1).entry(0, 1), z01);
    }

    #[test]
    fn standard_checks_pass() {
        let c15 = bianchi_basis().into_iter().find(|g| g.id == "dric-c15").unwrap().data;
        let geom = GeometryJets::build(&c15, 3).unwrap();
        let checks = standard_checks(&geom).unwrap();
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn covariance_examples() {
        let flat = GeometryJets::build(&CurvatureData::flat(), 3).unwrap();
        assert!(covariance_check(&flat, &FrameRotation::identity(3)).unwrap().pass());
        assert!(covariance_check(&flat, &FrameRotation::constant(&PI_E3, 3).unwrap()).unwrap().pass());
        let c11 = bianchi_basis().into_iter().find(|g| g.id == "dric-c11").unwrap().data;
        let geom = GeometryJets::build(&c11, 3).unwrap();
        let r = covariance_check(&geom, &FrameRotation::constant(&E3_TO_E1, 3).unwrap()).unwrap();
        assert!(r.pass(), "{r:?}");
    }
}
