use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{GaussianRational, Jet, JetError, Var};

/// A 2×2 matrix of jets sharing one budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixJet {
    entries: [[Jet; 2]; 2],
}

impl MatrixJet {
    pub fn new(entries: [[Jet; 2]; 2]) -> Result<MatrixJet, JetError> {
        let b = entries[0][0].budget();
        for row in &entries {
            for j in row {
                if j.budget() != b {
                    return Err(JetError::BudgetMismatch(b, j.budget()));
                }
            }
        }
        Ok(MatrixJet { entries })
    }

    pub fn zero(budget: u32) -> MatrixJet {
        Self::from_fn(|_, _| Jet::zero(budget))
    }

    pub fn identity(budget: u32) -> MatrixJet {
        Self::scalar(&Jet::one(budget))
    }

    /// `j·I`.
    pub fn scalar(j: &Jet) -> MatrixJet {
        Self::from_fn(|r, c| {
            if r == c {
                j.clone()
            } else {
                Jet::zero(j.budget())
            }
        })
    }

    pub fn constant(m: [[GaussianRational; 2]; 2], budget: u32) -> MatrixJet {
        let [[a, b], [c, d]] = m;
        MatrixJet {
            entries: [
                [Jet::constant(a, budget), Jet::constant(b, budget)],
                [Jet::constant(c, budget), Jet::constant(d, budget)],
            ],
        }
    }

    /// Standard Pauli matrix `s^k`, `k` in `1..=3`.
    pub fn pauli(k: usize, budget: u32) -> MatrixJet {
        let z = GaussianRational::zero;
        let one = GaussianRational::one;
        let i = GaussianRational::i;
        let m = match k {
            1 => [[z(), one()], [one(), z()]],
            2 => [[z(), -i()], [i(), z()]],
            3 => [[one(), z()], [z(), -one()]],
            _ => panic!("Pauli index {k} out of range 1..=3"),
        };
        Self::constant(m, budget)
    }

    fn from_fn(mut f: impl FnMut(usize, usize) -> Jet) -> MatrixJet {
        MatrixJet {
            entries: [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]],
        }
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> MatrixJet {
        Self::from_fn(|r, c| f(&self.entries[r][c]))
    }

    pub fn budget(&self) -> u32 {
        self.entries[0][0].budget()
    }

    pub fn entry(&self, r: usize, c: usize) -> &Jet {
        &self.entries[r][c]
    }

    pub fn entries(&self) -> &[[Jet; 2]; 2] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Jet::is_zero)
    }

    pub fn checked_add(&self, other: &MatrixJet) -> Result<MatrixJet, JetError> {
        self.check_budget(other)?;
        Ok(Self::from_fn(|r, c| &self.entries[r][c] + &other.entries[r][c]))
    }

    pub fn checked_sub(&self, other: &MatrixJet) -> Result<MatrixJet, JetError> {
        self.check_budget(other)?;
        Ok(Self::from_fn(|r, c| &self.entries[r][c] - &other.entries[r][c]))
    }

    pub fn checked_mul(&self, other: &MatrixJet) -> Result<MatrixJet, JetError> {
        self.check_budget(other)?;
        let (a, b) = (&self.entries, &other.entries);
        Ok(Self::from_fn(|r, c| {
            let mut acc = &a[r][0] * &b[0][c];
            acc = &acc + &(&a[r][1] * &b[1][c]);
            acc
        }))
    }

    fn check_budget(&self, other: &MatrixJet) -> Result<(), JetError> {
        if self.budget() == other.budget() {
            Ok(())
        } else {
            Err(JetError::BudgetMismatch(self.budget(), other.budget()))
        }
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &MatrixJet) -> Result<MatrixJet, JetError> {
        self.checked_mul(other)?
            .checked_sub(&other.checked_mul(self)?)
    }

    pub fn scale(&self, c: &GaussianRational) -> MatrixJet {
        self.map(|j| j.scale(c))
    }

    /// Multiplies every entry by a scalar jet.
    pub fn mul_jet(&self, j: &Jet) -> MatrixJet {
        self.map(|e| e * j)
    }

    pub fn trace(&self) -> Jet {
        &self.entries[0][0] + &self.entries[1][1]
    }

    pub fn determinant(&self) -> Jet {
        let e = &self.entries;
        &(&e[0][0] * &e[1][1]) - &(&e[0][1] * &e[1][0])
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> MatrixJet {
        Self::from_fn(|r, c| self.entries[c][r].conjugate())
    }

    pub fn derivative(&self, v: Var) -> MatrixJet {
        self.map(|j| j.derivative(v))
    }

    pub fn eval_origin(&self) -> [[GaussianRational; 2]; 2] {
        let e = &self.entries;
        [
            [e[0][0].eval_origin(), e[0][1].eval_origin()],
            [e[1][0].eval_origin(), e[1][1].eval_origin()],
        ]
    }

    /// Constant matrix of values at the origin, kept as a jet matrix.
    pub fn at_origin(&self) -> MatrixJet {
        Self::constant(self.eval_origin(), self.budget())
    }

    pub fn truncate(&self, budget: u32) -> MatrixJet {
        self.map(|j| j.truncate(budget))
    }

    pub fn lift(&self, budget: u32) -> MatrixJet {
        self.map(|j| j.lift(budget))
    }

    pub fn at_eta_zero(&self) -> MatrixJet {
        self.map(Jet::at_eta_zero)
    }
}

impl fmt::Display for MatrixJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..2 {
            writeln!(
                f,
                "  [{}]  [{}]",
                self.entries[r][0], self.entries[r][1]
            )?;
        }
        Ok(())
    }
}

impl Add<&MatrixJet> for &MatrixJet {
    type Output = MatrixJet;
    fn add(self, rhs: &MatrixJet) -> MatrixJet {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub<&MatrixJet> for &MatrixJet {
    type Output = MatrixJet;
    fn sub(self, rhs: &MatrixJet) -> MatrixJet {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul<&MatrixJet> for &MatrixJet {
    type Output = MatrixJet;
    fn mul(self, rhs: &MatrixJet) -> MatrixJet {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &MatrixJet {
    type Output = MatrixJet;
    fn neg(self) -> MatrixJet {
        self.map(|j| -j)
    }
}

macro_rules! forward_matrix_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<MatrixJet> for MatrixJet {
            type Output = MatrixJet;
            fn $m(self, rhs: MatrixJet) -> MatrixJet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&MatrixJet> for MatrixJet {
            type Output = MatrixJet;
            fn $m(self, rhs: &MatrixJet) -> MatrixJet {
                (&self).$m(rhs)
            }
        }
        impl $tr<MatrixJet> for &MatrixJet {
            type Output = MatrixJet;
            fn $m(self, rhs: MatrixJet) -> MatrixJet {
                self.$m(&rhs)
            }
        }
    )*};
}
forward_matrix_owned!(Add add, Sub sub, Mul mul);

impl Neg for MatrixJet {
    type Output = MatrixJet;
    fn neg(self) -> MatrixJet {
        -&self
    }
}
