use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::jet::parse_rational;

use super::GeometryError;

/// Index pairs of the six independent entries of a symmetric 3×3 array, in
/// coefficient order.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

pub type Sym3 = [[BigRational; 3]; 3];

fn zero3() -> Sym3 {
    std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()))
}

/// Pointwise curvature prescription at the base point: `Ric(0)` and the three
/// arrays `∇₁Ric(0)`, `∇₂Ric(0)`, `∇₃Ric(0)`.
///
/// Coefficients `c1..c6` fill `Ric(0)` row by row over the upper triangle;
/// `c7..c12`, `c13..c18`, `c19..c24` do the same for `∇₁Ric`, `∇₂Ric`, `∇₃Ric`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureData {
    ric0: Sym3,
    dric: [Sym3; 3],
}

impl Default for CurvatureData {
    fn default() -> Self {
        Self::flat()
    }
}

impl CurvatureData {
    pub fn flat() -> Self {
        CurvatureData {
            ric0: zero3(),
            dric: [zero3(), zero3(), zero3()],
        }
    }

    pub fn from_coefficients(c: &[BigRational; 24]) -> Self {
        let mut data = Self::flat();
        for (k, v) in c.iter().enumerate() {
            data.set_coefficient(k + 1, v.clone())
                .expect("index in range");
        }
        data
    }

    /// Convenience constructor from `(index, value)` pairs with integer values.
    pub fn from_pairs(pairs: &[(usize, i64)]) -> Result<Self, GeometryError> {
        let mut data = Self::flat();
        for &(k, v) in pairs {
            data.set_coefficient(k, BigRational::from_integer(BigInt::from(v)))?;
        }
        Ok(data)
    }

    /// Data with a single coefficient `c_k = 1`.
    pub fn unit(k: usize) -> Result<Self, GeometryError> {
        Self::from_pairs(&[(k, 1)])
    }

    fn slot(k: usize) -> Result<(Option<usize>, usize, usize), GeometryError> {
        if !(1..=24).contains(&k) {
            return Err(GeometryError::CoefficientIndex(k));
        }
        let block = (k - 1) / 6;
        let (a, b) = SYM_PAIRS[(k - 1) % 6];
        Ok(((block > 0).then(|| block - 1), a, b))
    }

    pub fn set_coefficient(&mut self, k: usize, v: BigRational) -> Result<(), GeometryError> {
        let (block, a, b) = Self::slot(k)?;
        let m = match block {
            None => &mut self.ric0,
            Some(s) => &mut self.dric[s],
        };
        m[a][b] = v.clone();
        m[b][a] = v;
        Ok(())
    }

    pub fn coefficient(&self, k: usize) -> Result<&BigRational, GeometryError> {
        let (block, a, b) = Self::slot(k)?;
        Ok(match block {
            None => &self.ric0[a][b],
            Some(s) => &self.dric[s][a][b],
        })
    }

    pub fn coefficients(&self) -> [BigRational; 24] {
        std::array::from_fn(|k| self.coefficient(k + 1).expect("in range").clone())
    }

    pub fn ric0(&self) -> &Sym3 {
        &self.ric0
    }

    /// `∇_s Ric(0)` for `s` in `0..3`.
    pub fn dric(&self, s: usize) -> &Sym3 {
        &self.dric[s]
    }

    pub fn has_ric0(&self) -> bool {
        self.ric0.iter().flatten().any(|v| !v.is_zero())
    }

    pub fn has_dric(&self) -> bool {
        self.dric.iter().flatten().flatten().any(|v| !v.is_zero())
    }

    pub fn is_flat(&self) -> bool {
        !self.has_ric0() && !self.has_dric()
    }

    /// `∇^α Ric_{αβ} − ½ ∇_β(tr Ric)` for `β = 1, 2, 3`, indices raised with δ.
    pub fn bianchi_residual(&self) -> [BigRational; 3] {
        let half = BigRational::new(1.into(), 2.into());
        std::array::from_fn(|beta| {
            let div: BigRational = (0..3).map(|a| &self.dric[a][a][beta]).sum();
            let tr: BigRational = (0..3).map(|g| &self.dric[beta][g][g]).sum();
            div - &half * tr
        })
    }

    /// Whether `∇Ric(0)` satisfies the contracted second Bianchi identity.
    pub fn bianchi_consistent(&self) -> bool {
        self.bianchi_residual().iter().all(Zero::is_zero)
    }

    pub fn linear_combination(terms: &[(BigRational, &CurvatureData)]) -> CurvatureData {
        let mut c: [BigRational; 24] = std::array::from_fn(|_| BigRational::zero());
        for (w, d) in terms {
            for (acc, v) in c.iter_mut().zip(d.coefficients()) {
                *acc += w * v;
            }
        }
        Self::from_coefficients(&c)
    }

    /// Data expressed in rotated coordinates `y = R x` for an orthogonal `R`.
    ///
    /// Every tensor index transforms with `R`: `Ric'_{ab} = R_{ai} R_{bj} Ric_{ij}`
    /// and `∇'_s Ric'_{ab} = R_{sk} R_{ai} R_{bj} ∇_k Ric_{ij}`.
    pub fn rotated(&self, r: &[[i64; 3]; 3]) -> CurvatureData {
        let rq = |a: usize, b: usize| BigRational::from_integer(BigInt::from(r[a][b]));
        let mut out = Self::flat();
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = BigRational::zero();
                for i in 0..3 {
                    for j in 0..3 {
                        acc += rq(a, i) * rq(b, j) * &self.ric0[i][j];
                    }
                }
                out.ric0[a][b] = acc;
                for s in 0..3 {
                    let mut acc = BigRational::zero();
                    for k in 0..3 {
                        for i in 0..3 {
                            for j in 0..3 {
                                acc += rq(s, k) * rq(a, i) * rq(b, j) * &self.dric[k][i][j];
                            }
                        }
                    }
                    out.dric[s][a][b] = acc;
                }
            }
        }
        out
    }

    /// Keeps only `Ric(0)`.
    pub fn ric0_part(&self) -> CurvatureData {
        CurvatureData {
            ric0: self.ric0.clone(),
            dric: [zero3(), zero3(), zero3()],
        }
    }

    /// Keeps only `∇Ric(0)`.
    pub fn dric_part(&self) -> CurvatureData {
        CurvatureData {
            ric0: zero3(),
            dric: self.dric.clone(),
        }
    }

    /// `(c1, ..) .. (c24, ..)` with rationals rendered as `p/q`.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        self.coefficients()
            .iter()
            .enumerate()
            .map(|(k, v)| (format!("c{}", k + 1), v.to_string()))
            .collect()
    }

    /// Sets coefficient `key` (`c1`..`c24`) from a `p/q` string.
    pub fn set_from_key_value(&mut self, key: &str, value: &str) -> Result<(), GeometryError> {
        let k = key
            .strip_prefix('c')
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| GeometryError::UnknownKey(key.to_string()))?;
        let v = parse_rational(value).ok_or_else(|| GeometryError::BadRational(value.to_string()))?;
        self.set_coefficient(k, v)
    }

    /// Short label listing the nonzero coefficients, e.g. `c11=1`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .to_key_values()
            .into_iter()
            .filter(|(_, v)| v != "0")
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        if parts.is_empty() {
            "flat".to_string()
        } else {
            parts.join(",")
        }
    }
}

impl fmt::Display for CurvatureData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.to_key_values() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// A generator of the curvature sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub data: CurvatureData,
}

/// The 6 `Ric(0)` unit generators followed by a 15-element basis of the
/// `∇Ric(0)` arrays that satisfy the contracted Bianchi identity.
///
/// The three constraints are row-reduced over `c7..c24` in coefficient order;
/// each free coefficient yields one generator (free coefficient set to one,
/// pivots solved for, then cleared of denominators).
pub fn bianchi_basis() -> Vec<Generator> {
    let mut out: Vec<Generator> = (1..=6)
        .map(|k| Generator {
            id: format!("ric0-c{k}"),
            data: CurvatureData::unit(k).expect("in range"),
        })
        .collect();

    // constraint matrix: 3 rows over the 18 derivative coefficients
    let mut rows: Vec<Vec<BigRational>> = (0..3)
        .map(|beta| {
            (7..=24)
                .map(|k| {
                    CurvatureData::unit(k).expect("in range").bianchi_residual()[beta].clone()
                })
                .collect()
        })
        .collect();
    let pivots = rref(&mut rows);
    for free in (0..18).filter(|c| !pivots.contains(c)) {
        let mut v: Vec<BigRational> = vec![BigRational::zero(); 18];
        v[free] = BigRational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -rows[r][free].clone();
        }
        let lcm = v
            .iter()
            .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let mut data = CurvatureData::flat();
        for (k, q) in v.iter().enumerate() {
            let scaled = q * BigRational::from_integer(lcm.clone());
            data.set_coefficient(k + 7, scaled).expect("in range");
        }
        out.push(Generator {
            id: format!("dric-c{}", free + 7),
            data,
        });
    }
    out
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (v, pv) in rows[i].iter_mut().zip(pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}
