//! Truncated polynomials ("jets") in the six variables `(x¹, x², x³, η₁, η₂, η₃)`.
//!
//! Every [`Jet`] carries a joint-degree budget: products discard monomials whose
//! total degree exceeds it, so all series operations (inverse, square root)
//! terminate after finitely many steps. Coefficients are exact
//! [`GaussianRational`]s.

mod coeff;
mod matrix;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

pub use coeff::{parse_rational, GaussianRational};
pub use coeff::rational_to_f64;
pub use matrix::MatrixJet;

/// Largest joint-degree budget a jet may carry.
pub const MAX_BUDGET: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("budget mismatch: {0} vs {1}")]
    BudgetMismatch(u32, u32),
    #[error("budget {0} exceeds the maximum of {MAX_BUDGET}")]
    BudgetTooLarge(u32),
    #[error("constant term is zero")]
    ZeroConstantTerm,
    #[error("constant term {0} is not the square of a positive rational")]
    NotPerfectSquare(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable index {0} out of range 1..=6")]
    BadVariable(usize),
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// One of the six jet variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X1,
    X2,
    X3,
    Eta1,
    Eta2,
    Eta3,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::X1, Var::X2, Var::X3, Var::Eta1, Var::Eta2, Var::Eta3];

    /// Position variable `x^(a+1)` for `a` in `0..3`.
    pub fn x(a: usize) -> Var {
        Self::ALL[a]
    }

    /// Momentum perturbation `η_(a+1)` for `a` in `0..3`.
    pub fn eta(a: usize) -> Var {
        Self::ALL[3 + a]
    }

    /// 1-based index as used in the exponent tuple.
    pub fn from_index(k: usize) -> Result<Var, JetError> {
        (1..=6)
            .contains(&k)
            .then(|| Self::ALL[k - 1])
            .ok_or(JetError::BadVariable(k))
    }

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn is_position(self) -> bool {
        self.slot() < 3
    }
}

/// Exponent tuple ordered `(x¹, x², x³, η₁, η₂, η₃)`.
///
/// Ordered graded-lexicographically: by total degree first, then by the
/// exponent tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u8; 6]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 6]);

    pub fn var(v: Var) -> Self {
        let mut e = [0; 6];
        e[v.slot()] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exponent(&self, v: Var) -> u8 {
        self.0[v.slot()]
    }

    pub fn x_degree(&self) -> u32 {
        self.0[..3].iter().map(|&e| e as u32).sum()
    }

    pub fn eta_degree(&self) -> u32 {
        self.0[3..].iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> [u8; 6] {
        self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 6] = ["x1", "x2", "x3", "e1", "e2", "e3"];
        let mut first = true;
        for (name, &e) in NAMES.iter().zip(&self.0) {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A polynomial in the six jet variables, truncated at joint degree `budget`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    budget: u32,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Jet {
    pub fn zero(budget: u32) -> Jet {
        assert!(budget <= MAX_BUDGET, "budget {budget} exceeds {MAX_BUDGET}");
        Jet {
            budget,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: GaussianRational, budget: u32) -> Jet {
        Jet::monomial(Monomial::ONE, c, budget)
    }

    pub fn one(budget: u32) -> Jet {
        Jet::constant(GaussianRational::one(), budget)
    }

    pub fn var(v: Var, budget: u32) -> Jet {
        Jet::monomial(Monomial::var(v), GaussianRational::one(), budget)
    }

    pub fn monomial(m: Monomial, c: GaussianRational, budget: u32) -> Jet {
        let mut j = Jet::zero(budget);
        if m.degree() <= budget && !c.is_zero() {
            j.terms.insert(m, c);
        }
        j
    }

    /// Builds a jet from terms, summing duplicates and dropping anything past
    /// the budget.
    pub fn from_terms<I>(budget: u32, terms: I) -> Result<Jet, JetError>
    where
        I: IntoIterator<Item = (Monomial, GaussianRational)>,
    {
        if budget > MAX_BUDGET {
            return Err(JetError::BudgetTooLarge(budget));
        }
        let mut j = Jet::zero(budget);
        for (m, c) in terms {
            j.accumulate(m, &c);
        }
        Ok(j)
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Highest total degree present, `None` for the zero jet.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    fn accumulate(&mut self, m: Monomial, c: &GaussianRational) {
        if m.degree() > self.budget || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_budget(&self, other: &Jet) -> Result<(), JetError> {
        if self.budget == other.budget {
            Ok(())
        } else {
            Err(JetError::BudgetMismatch(self.budget, other.budget))
        }
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_budget(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_budget(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, &-c);
        }
        Ok(out)
    }

    /// Truncated product: monomials of joint degree above the budget are discarded.
    pub fn checked_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_budget(other)?;
        let mut out = Jet::zero(self.budget);
        for (ma, ca) in &self.terms {
            let room = self.budget - ma.degree();
            for (mb, cb) in &other.terms {
                // terms are sorted by degree
                if mb.degree() > room {
                    break;
                }
                out.accumulate(ma.mul(mb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Jet {
        if c.is_zero() {
            return Jet::zero(self.budget);
        }
        Jet {
            budget: self.budget,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Formal partial derivative. The budget is kept.
    pub fn derivative(&self, v: Var) -> Jet {
        let k = v.slot();
        let mut out = Jet::zero(self.budget);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut dm = *m;
            dm.0[k] -= 1;
            out.accumulate(dm, &(c * &GaussianRational::from_int(e as i64)));
        }
        out
    }

    /// Multiplicative inverse up to the budget, by the geometric series in the
    /// normalized non-constant part.
    pub fn invert(&self) -> Result<Jet, JetError> {
        let c0 = self.eval_origin();
        if c0.is_zero() {
            return Err(JetError::ZeroConstantTerm);
        }
        let inv_c0 = c0.inv()?;
        let minus_n = self.nonconstant_part().scale(&-&inv_c0);
        let mut sum = Jet::one(self.budget);
        let mut power = Jet::one(self.budget);
        for _ in 0..self.budget {
            power = &power * &minus_n;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum.scale(&inv_c0))
    }

    /// Square root up to the budget via the binomial series.
    ///
    /// The constant term must be the square of a positive rational.
    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let c0 = self.eval_origin();
        let root = c0.rational_sqrt()?;
        let n = self.nonconstant_part().scale(&c0.inv()?);
        let half = BigRational::new(1.into(), 2.into());
        let mut binom = BigRational::one();
        let mut sum = Jet::one(self.budget);
        let mut power = Jet::one(self.budget);
        for k in 1..=self.budget {
            // binom(1/2, k) = binom(1/2, k-1) * (1/2 - k + 1) / k
            let kk = BigRational::from_integer((k as i64).into());
            binom = binom * (&half - &kk + BigRational::one()) / kk;
            power = &power * &n;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power.scale(&GaussianRational::real(binom.clone()));
        }
        Ok(sum.scale(&root))
    }

    /// Entrywise complex conjugation of the coefficients (the variables are real).
    pub fn conjugate(&self) -> Jet {
        Jet {
            budget: self.budget,
            terms: self.terms.iter().map(|(m, c)| (*m, c.conj())).collect(),
        }
    }

    /// Value at `x = 0, η = 0`.
    pub fn eval_origin(&self) -> GaussianRational {
        self.coefficient(&Monomial::ONE)
    }

    pub fn nonconstant_part(&self) -> Jet {
        let mut out = self.clone();
        out.terms.remove(&Monomial::ONE);
        out
    }

    /// Drops every monomial of degree above `budget` and lowers the budget.
    pub fn truncate(&self, budget: u32) -> Jet {
        assert!(budget <= self.budget, "truncate cannot raise the budget");
        Jet {
            budget,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= budget)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Same polynomial at a larger budget. The missing higher-degree terms are
    /// taken to be zero.
    pub fn lift(&self, budget: u32) -> Jet {
        assert!(budget >= self.budget && budget <= MAX_BUDGET);
        Jet {
            budget,
            terms: self.terms.clone(),
        }
    }

    /// Keeps only the terms with the given joint degree.
    pub fn homogeneous_part(&self, degree: u32) -> Jet {
        self.filter(|m| m.degree() == degree)
    }

    /// Sets `η = 0`.
    pub fn at_eta_zero(&self) -> Jet {
        self.filter(|m| m.eta_degree() == 0)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Jet {
        Jet {
            budget: self.budget,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Evaluates at a point in floating point. Used by numerical cross-checks.
    pub fn eval_f64(&self, point: &[f64; 6]) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (m, c) in &self.terms {
            let mv: f64 = m
                .0
                .iter()
                .zip(point)
                .map(|(&e, &p)| p.powi(e as i32))
                .product();
            let (cr, ci) = c.to_f64_pair();
            re += cr * mv;
            im += ci * mv;
        }
        (re, im)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *m == Monomial::ONE {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

// Operator forms panic on a budget mismatch; the `checked_*` methods report it.
impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            budget: self.budget,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

macro_rules! forward_jet_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    )*};
}
forward_jet_owned!(Add add, Sub sub, Mul mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}
