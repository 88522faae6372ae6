#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use diracsym::jet::{GaussianRational, Jet, MatrixJet, Monomial};
use diracsym::symbol::GradedSymbol;

pub const B: u32 = 3;

pub fn rational() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

pub fn coeff() -> impl Strategy<Value = GaussianRational> {
    (rational(), rational(), any::<bool>()).prop_map(|(re, im, real)| {
        if real {
            GaussianRational::real(re)
        } else {
            GaussianRational::new(re, im)
        }
    })
}

pub fn monomial(budget: u32) -> impl Strategy<Value = Monomial> {
    proptest::collection::vec(0usize..6, 0..=budget as usize).prop_map(|vars| {
        let mut e = [0u8; 6];
        for v in vars {
            e[v] += 1;
        }
        Monomial(e)
    })
}

pub fn jet_with(budget: u32) -> impl Strategy<Value = Jet> {
    proptest::collection::vec((monomial(budget), coeff()), 0..6)
        .prop_map(move |terms| Jet::from_terms(budget, terms).unwrap())
}

pub fn jet() -> impl Strategy<Value = Jet> {
    jet_with(B)
}

pub fn unit_jet() -> impl Strategy<Value = Jet> {
    (coeff(), jet()).prop_filter_map("nonzero constant", |(c, j)| {
        (!c.is_zero()).then(|| &Jet::constant(c, B) + &j.nonconstant_part())
    })
}

pub fn matrix(budget: u32) -> impl Strategy<Value = MatrixJet> {
    [jet_with(budget), jet_with(budget), jet_with(budget), jet_with(budget)]
        .prop_map(|[a, b, c, d]| MatrixJet::new([[a, b], [c, d]]).unwrap())
}

pub fn symbol(budget: u32) -> impl Strategy<Value = GradedSymbol> {
    (matrix(budget), matrix(budget))
        .prop_map(move |(m0, m1)| GradedSymbol::from_components(budget, [(0, m0), (-1, m1)]).unwrap())
}

