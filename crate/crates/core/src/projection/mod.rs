//! Order-by-order construction of the principal symbols `(X_{±,k})_prin` of the
//! corrections to the spectral projections.

use std::fmt;

use crate::geometry::GeometryJets;
use crate::jet::{GaussianRational, Jet, MatrixJet};
use crate::symbol::{
    compose, dirac_symbol, eigenprojections, norm_jet, operator_commutator, DiracSymbol,
    GradedSymbol, SymbolError,
};

/// Deepest iteration supported.
pub const MAX_DEPTH: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> GaussianRational {
        match self {
            Branch::Plus => GaussianRational::one(),
            Branch::Minus => -GaussianRational::one(),
        }
    }

    pub fn opposite(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Symbols shared by both branches: the Dirac symbol, `h`, `1/h` and `P^(±)`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub budget: u32,
    pub dirac: DiracSymbol,
    pub w: GradedSymbol,
    pub h: Jet,
    pub h_inv: Jet,
    pub p_plus: MatrixJet,
    pub p_minus: MatrixJet,
}

impl SpectralData {
    pub fn new(geom: &GeometryJets) -> Result<SpectralData, SymbolError> {
        let dirac = dirac_symbol(geom);
        let (h, h_inv) = norm_jet(geom)?;
        let (p_plus, p_minus) = eigenprojections(&dirac, &h_inv);
        Ok(SpectralData {
            budget: geom.budget,
            w: dirac.to_graded(),
            dirac,
            h,
            h_inv,
            p_plus,
            p_minus,
        })
    }

    pub fn projection(&self, branch: Branch) -> &MatrixJet {
        match branch {
            Branch::Plus => &self.p_plus,
            Branch::Minus => &self.p_minus,
        }
    }
}

/// `P_{±,k−1}` with `[p]_{−j} = (X_{±,j})_prin` for `0 < j < k` and nothing at order `−k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationState {
    pub branch: Branch,
    pub k: u32,
    pub p_prev: GradedSymbol,
}

impl IterationState {
    pub fn initial(branch: Branch, data: &SpectralData) -> IterationState {
        IterationState {
            branch,
            k: 1,
            p_prev: GradedSymbol::single(0, data.projection(branch).clone()),
        }
    }

    /// `(X_{±,j})_prin` for `j < k`, by order.
    pub fn corrections(&self) -> Vec<(i32, MatrixJet)> {
        self.p_prev
            .components()
            .filter(|(o, _)| *o < 0)
            .map(|(o, m)| (o, m.clone()))
            .collect()
    }

    fn order(&self) -> i32 {
        -(self.k as i32)
    }

    /// Installs `(X_{±,k})_prin` at order `−k` and advances to `k + 1`.
    pub fn install(&self, x: MatrixJet) -> Result<IterationState, SymbolError> {
        let mut p_prev = self.p_prev.clone();
        p_prev.insert(self.order(), x)?;
        Ok(IterationState {
            branch: self.branch,
            k: self.k + 1,
            p_prev,
        })
    }
}

/// `R_{±,k} = −[P_{±,k−1}∘P_{±,k−1} − P_{±,k−1}]_{−k}`.
pub fn defect(state: &IterationState) -> Result<MatrixJet, SymbolError> {
    let k = state.order();
    let sq = compose(&state.p_prev, &state.p_prev, k)?;
    Ok(-&(&sq.part(k) - &state.p_prev.part(k)))
}

/// `S_{±,k} = −R + P^(±)R + RP^(±)`.
pub fn s_correction(r: &MatrixJet, p: &MatrixJet) -> MatrixJet {
    &(&(p * r) + &(r * p)) - r
}

/// `T_{±,k} = [P_{±,k−1}, W]_{1−k} + [S_{±,k}, W_prin]`.
pub fn t_correction(
    state: &IterationState,
    s: &MatrixJet,
    w: &GradedSymbol,
    w_prin: &MatrixJet,
) -> Result<MatrixJet, SymbolError> {
    let order = 1 - state.k as i32;
    let comm = operator_commutator(&state.p_prev, w, order)?;
    Ok(&comm.part(order) + &s.commutator(w_prin)?)
}

/// `(X_{±,k})_prin = S ± (1/2h)(P^(±)TP^(∓) − P^(∓)TP^(±))`.
pub fn x_update(
    branch: Branch,
    s: &MatrixJet,
    t: &MatrixJet,
    p_same: &MatrixJet,
    p_other: &MatrixJet,
    h_inv: &Jet,
) -> MatrixJet {
    let off = &(&(p_same * t) * p_other) - &(&(p_other * t) * p_same);
    let coeff = h_inv.scale(&(branch.sign() * GaussianRational::frac(1, 2)));
    s + &off.mul_jet(&coeff)
}

/// The four matrices produced by one iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    pub k: u32,
    pub r: MatrixJet,
    pub s: MatrixJet,
    pub t: MatrixJet,
    pub x: MatrixJet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionRun {
    pub branch: Branch,
    pub records: Vec<IterationRecord>,
    /// `P_{±,depth}` with every correction installed.
    pub projection: GradedSymbol,
}

impl ProjectionRun {
    pub fn x(&self, k: u32) -> Option<&MatrixJet> {
        self.records.iter().find(|r| r.k == k).map(|r| &r.x)
    }
}

pub fn step(state: &IterationState, data: &SpectralData) -> Result<IterationRecord, SymbolError> {
    let branch = state.branch;
    let p_same = data.projection(branch);
    let p_other = data.projection(branch.opposite());
    let r = defect(state)?;
    let s = s_correction(&r, p_same);
    let t = t_correction(state, &s, &data.w, &data.dirac.prin)?;
    let x = x_update(branch, &s, &t, p_same, p_other, &data.h_inv);
    Ok(IterationRecord { k: state.k, r, s, t, x })
}

/// Runs iterations `1..=depth` (clamped to [`MAX_DEPTH`]) for one branch.
pub fn run(branch: Branch, data: &SpectralData, depth: u32) -> Result<ProjectionRun, SymbolError> {
    let mut state = IterationState::initial(branch, data);
    let mut records = Vec::new();
    for _ in 0..depth.min(MAX_DEPTH) {
        let rec = step(&state, data)?;
        state = state.install(rec.x.clone())?;
        records.push(rec);
    }
    Ok(ProjectionRun {
        branch,
        records,
        projection: state.p_prev,
    })
}

/// Order `−k` component of `P∘P − P` for a projection symbol with corrections
/// through order `−k`.
pub fn projection_defect(p: &GradedSymbol, k: u32) -> Result<MatrixJet, SymbolError> {
    let order = -(k as i32);
    let sq = compose(p, p, order)?;
    Ok(&sq.part(order) - &p.part(order))
}

/// Order `1 − k` component of `[P, W]`.
pub fn commutation_defect(p: &GradedSymbol, w: &GradedSymbol, k: u32) -> Result<MatrixJet, SymbolError> {
    let order = 1 - k as i32;
    Ok(operator_commutator(p, w, order)?.part(order))
}
