//! Graded left symbols of 2×2 matrix pseudodifferential operators, expanded at
//! `x = 0`, `ξ = ξ₀ + η` with `ξ₀ = (0, 0, 1)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::geometry::GeometryJets;
use crate::jet::{GaussianRational, Jet, JetError, MatrixJet, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("symbol has no component of order {0}")]
    MissingComponent(i32),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Finite map from homogeneity order to the matrix jet of that component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSymbol {
    budget: u32,
    components: BTreeMap<i32, MatrixJet>,
}

impl GradedSymbol {
    pub fn zero(budget: u32) -> GradedSymbol {
        GradedSymbol {
            budget,
            components: BTreeMap::new(),
        }
    }

    pub fn identity(budget: u32) -> GradedSymbol {
        Self::single(0, MatrixJet::identity(budget))
    }

    pub fn single(order: i32, m: MatrixJet) -> GradedSymbol {
        let mut s = Self::zero(m.budget());
        s.components.insert(order, m);
        s
    }

    /// A scalar jet times the identity, tagged with `order`.
    pub fn scalar(order: i32, j: &Jet) -> GradedSymbol {
        Self::single(order, MatrixJet::scalar(j))
    }

    pub fn from_components<I>(budget: u32, parts: I) -> Result<GradedSymbol, SymbolError>
    where
        I: IntoIterator<Item = (i32, MatrixJet)>,
    {
        let mut s = Self::zero(budget);
        for (order, m) in parts {
            s.insert(order, m)?;
        }
        Ok(s)
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(MatrixJet::is_zero)
    }

    pub fn max_order(&self) -> Option<i32> {
        self.components.keys().next_back().copied()
    }

    pub fn components(&self) -> impl Iterator<Item = (i32, &MatrixJet)> {
        self.components.iter().rev().map(|(k, v)| (*k, v))
    }

    pub fn component(&self, order: i32) -> Option<&MatrixJet> {
        self.components.get(&order)
    }

    /// The order-`m` component, or zero when absent.
    pub fn part(&self, order: i32) -> MatrixJet {
        self.component(order)
            .cloned()
            .unwrap_or_else(|| MatrixJet::zero(self.budget))
    }

    /// Replaces the order-`m` component; zero matrices are dropped.
    pub fn insert(&mut self, order: i32, m: MatrixJet) -> Result<(), SymbolError> {
        if m.budget() != self.budget {
            return Err(JetError::BudgetMismatch(self.budget, m.budget()).into());
        }
        if m.is_zero() {
            self.components.remove(&order);
        } else {
            self.components.insert(order, m);
        }
        Ok(())
    }

    fn accumulate(&mut self, order: i32, m: &MatrixJet) {
        let sum = match self.components.get(&order) {
            Some(prev) => prev + m,
            None => m.clone(),
        };
        if sum.is_zero() {
            self.components.remove(&order);
        } else {
            self.components.insert(order, sum);
        }
    }

    pub fn checked_add(&self, other: &GradedSymbol) -> Result<GradedSymbol, SymbolError> {
        if self.budget != other.budget {
            return Err(JetError::BudgetMismatch(self.budget, other.budget).into());
        }
        let mut out = self.clone();
        for (order, m) in &other.components {
            out.accumulate(*order, m);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &GradedSymbol) -> Result<GradedSymbol, SymbolError> {
        self.checked_add(&other.scale(&-GaussianRational::one()))
    }

    pub fn scale(&self, c: &GaussianRational) -> GradedSymbol {
        let mut out = Self::zero(self.budget);
        for (order, m) in &self.components {
            out.accumulate(*order, &m.scale(c));
        }
        out
    }

    /// Drops components of order below `min_order`.
    pub fn truncate_orders(&self, min_order: i32) -> GradedSymbol {
        GradedSymbol {
            budget: self.budget,
            components: self.components.range(min_order..).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&MatrixJet) -> MatrixJet) -> GradedSymbol {
        let mut out = Self::zero(self.budget);
        for (order, m) in &self.components {
            out.accumulate(*order, &f(m));
        }
        out
    }
}

impl fmt::Display for GradedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return writeln!(f, "0");
        }
        for (order, m) in self.components() {
            writeln!(f, "order {order}:")?;
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Multi-indices `(a₁, a₂, a₃)` with `a₁ + a₂ + a₃ = k`, in lexicographic order.
fn multi_indices(k: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in (0..=k).rev() {
        for b in (0..=k - a).rev() {
            out.push([a, b, k - a - b]);
        }
    }
    out
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, j| acc * BigInt::from(j))
}

/// `1/(i^k α!)`.
fn leibniz_weight(alpha: &[u32; 3]) -> GaussianRational {
    let k: u32 = alpha.iter().sum();
    let denom: BigInt = alpha.iter().map(|&a| factorial(a)).product();
    let q = GaussianRational::real(BigRational::new(BigInt::from(1), denom));
    // 1/i^k = (−i)^k
    let phase = match k % 4 {
        0 => GaussianRational::one(),
        1 => -GaussianRational::i(),
        2 => -GaussianRational::one(),
        _ => GaussianRational::i(),
    };
    q * phase
}

fn derive(m: &MatrixJet, alpha: &[u32; 3], var: fn(usize) -> Var) -> MatrixJet {
    let mut out = m.clone();
    for (slot, &n) in alpha.iter().enumerate() {
        for _ in 0..n {
            out = out.derivative(var(slot));
        }
    }
    out
}

/// Left symbol of the composition `B∘A`:
/// `Σ_k 1/(i^k k!) ∂ξ^k b · ∂x^k a`, each term landing in order `m_b + m_a − k`.
/// Components below `min_order` are not computed.
pub fn compose(b: &GradedSymbol, a: &GradedSymbol, min_order: i32) -> Result<GradedSymbol, SymbolError> {
    if a.budget != b.budget {
        return Err(JetError::BudgetMismatch(b.budget, a.budget).into());
    }
    let budget = a.budget;
    let mut out = GradedSymbol::zero(budget);
    for (mb, bm) in &b.components {
        for (ma, am) in &a.components {
            let top = mb + ma;
            let mut k = 0u32;
            while top - k as i32 >= min_order && k <= budget {
                let mut acc = MatrixJet::zero(budget);
                for alpha in multi_indices(k) {
                    let db = derive(bm, &alpha, Var::eta);
                    if db.is_zero() {
                        continue;
                    }
                    let da = derive(am, &alpha, Var::x);
                    if da.is_zero() {
                        continue;
                    }
                    acc = &acc + &(&db * &da).scale(&leibniz_weight(&alpha));
                }
                out.accumulate(top - k as i32, &acc);
                k += 1;
            }
        }
    }
    Ok(out)
}

/// `[B, A]` as operators, through `compose` both ways.
pub fn operator_commutator(
    b: &GradedSymbol,
    a: &GradedSymbol,
    min_order: i32,
) -> Result<GradedSymbol, SymbolError> {
    compose(b, a, min_order)?.checked_sub(&compose(a, b, min_order)?)
}

/// Principal (order 1) and order 0 parts of the Dirac symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracSymbol {
    pub prin: MatrixJet,
    pub zero: MatrixJet,
}

impl DiracSymbol {
    pub fn to_graded(&self) -> GradedSymbol {
        let mut s = GradedSymbol::zero(self.prin.budget());
        s.accumulate(1, &self.prin);
        s.accumulate(0, &self.zero);
        s
    }
}

/// `ξ₀ + η` as three jets.
pub fn momentum(budget: u32) -> [Jet; 3] {
    [
        Jet::var(Var::Eta1, budget),
        Jet::var(Var::Eta2, budget),
        &Jet::one(budget) + &Jet::var(Var::Eta3, budget),
    ]
}

/// `W_prin = σ̃^α(ξ₀+η)_α` and
/// `W₀ = −iσ̃^α(¼σ̃_β(∂_ασ̃^β + Γ^β_{αγ}σ̃^γ) − ½Γ^β_{αβ}I)`.
pub fn dirac_symbol(geom: &GeometryJets) -> DiracSymbol {
    let budget = geom.budget;
    let xi = momentum(budget);
    let sig = &geom.pauli;
    let mut prin = MatrixJet::zero(budget);
    for a in 0..3 {
        prin = &prin + &sig[a].mul_jet(&xi[a]);
    }
    let lowered = geom.pauli_lowered();
    let gamma = &geom.christoffel;
    let quarter = GaussianRational::frac(1, 4);
    let half = GaussianRational::frac(1, 2);
    let mut zero = MatrixJet::zero(budget);
    for a in 0..3 {
        let mut inner = MatrixJet::zero(budget);
        for b in 0..3 {
            let mut cov = sig[b].derivative(Var::x(a));
            for c in 0..3 {
                cov = &cov + &sig[c].mul_jet(&gamma[b][a][c]);
            }
            inner = &inner + &(&lowered[b] * &cov).scale(&quarter);
        }
        let mut trace = Jet::zero(budget);
        for b in 0..3 {
            trace = &trace + &gamma[b][a][b];
        }
        inner = &inner - &MatrixJet::scalar(&trace.scale(&half));
        zero = &zero + &(&sig[a] * &inner);
    }
    DiracSymbol {
        prin,
        zero: zero.scale(&-GaussianRational::i()),
    }
}

/// `h = √(g^{μν}(ξ₀+η)_μ(ξ₀+η)_ν)` and `1/h`.
pub fn norm_jet(geom: &GeometryJets) -> Result<(Jet, Jet), SymbolError> {
    let xi = momentum(geom.budget);
    let mut h2 = Jet::zero(geom.budget);
    for m in 0..3 {
        for n in 0..3 {
            h2 = &h2 + &(&geom.g_inv[m][n] * &(&xi[m] * &xi[n]));
        }
    }
    let h = h2.sqrt()?;
    let h_inv = h.invert()?;
    Ok((h, h_inv))
}

/// `P^(±) = ½(I ± W_prin/h)`, both order 0.
pub fn eigenprojections(dirac: &DiracSymbol, h_inv: &Jet) -> (MatrixJet, MatrixJet) {
    let budget = dirac.prin.budget();
    let half = GaussianRational::frac(1, 2);
    let id = MatrixJet::identity(budget);
    let w = dirac.prin.mul_jet(h_inv);
    ((&id + &w).scale(&half), (&id - &w).scale(&half))
}

/// Scalar graded symbol, the image of the matrix trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarSymbol {
    budget: u32,
    components: BTreeMap<i32, Jet>,
}

impl ScalarSymbol {
    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn component(&self, order: i32) -> Jet {
        self.components
            .get(&order)
            .cloned()
            .unwrap_or_else(|| Jet::zero(self.budget))
    }

    pub fn components(&self) -> impl Iterator<Item = (i32, &Jet)> {
        self.components.iter().rev().map(|(k, v)| (*k, v))
    }

    /// `s_{m−1} + (i/2)∂²s_m/∂x^α∂ξ_α`.
    pub fn subprincipal(&self, m: i32) -> Result<Jet, SymbolError> {
        let top = self.components.get(&m).ok_or(SymbolError::MissingComponent(m))?;
        let mut corr = Jet::zero(self.budget);
        for a in 0..3 {
            corr = &corr + &top.derivative(Var::x(a)).derivative(Var::eta(a));
        }
        Ok(&self.component(m - 1) + &corr.scale(&GaussianRational::imag_frac(1, 2)))
    }
}

/// Order-by-order 2×2 trace.
pub fn matrix_trace_symbol(s: &GradedSymbol) -> ScalarSymbol {
    let components = s
        .components
        .iter()
        .map(|(k, m)| (*k, m.trace()))
        .filter(|(_, j)| !j.is_zero())
        .collect();
    ScalarSymbol {
        budget: s.budget,
        components,
    }
}

/// `s_{m−1} + (i/2)∂²s_m/∂x^α∂ξ_α`.
pub fn subprincipal(s: &GradedSymbol, m: i32) -> Result<MatrixJet, SymbolError> {
    let top = s.component(m).ok_or(SymbolError::MissingComponent(m))?;
    let mut corr = MatrixJet::zero(s.budget);
    for a in 0..3 {
        corr = &corr + &top.derivative(Var::x(a)).derivative(Var::eta(a));
    }
    Ok(&s.part(m - 1) + &corr.scale(&GaussianRational::imag_frac(1, 2)))
}
