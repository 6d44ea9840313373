//! Conjugation of a regular matrix into the big Bruhat cell for the cycle
//! `(1 2 ... n)` and the exact factorisation `g' = b * p_sigma * u`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{hnf, IntMatrix, RatMatrix};

/// Signed cycle matrix: ones on the subdiagonal and `(-1)^{n+1}` in the
/// top-right corner, so that its determinant is 1.
pub fn p_sigma(n: usize) -> IntMatrix {
    let corner = if n % 2 == 1 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    IntMatrix::from_fn(n, |i, j| {
        if i == j + 1 {
            BigInt::one()
        } else if i == 0 && j + 1 == n {
            corner.clone()
        } else {
            BigInt::zero()
        }
    })
}

/// Columns `v, gv, ..., g^{n-1} v`.
pub fn krylov_matrix(g: &IntMatrix, v: &[BigInt]) -> IntMatrix {
    let n = g.dim();
    let mut cols = Vec::with_capacity(n);
    let mut cur = v.to_vec();
    for _ in 0..n {
        let next = g.mul_vec(&cur);
        cols.push(cur);
        cur = next;
    }
    IntMatrix::from_cols(&cols).expect("square Krylov matrix")
}

fn is_cyclic_for(g: &IntMatrix, v: &[BigInt]) -> bool {
    !krylov_matrix(g, v).det().is_zero()
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Largest radius tried by [`find_cyclic_vector`] before giving up.
pub const CYCLIC_SEARCH_RADIUS: u32 = 6;

/// Deterministic cyclic-vector search: `e_1..e_n`, then `e_i + e_j` for
/// `i < j` lexicographically, then primitive vectors of sup-norm 2, 3, ...
/// in lexicographic order.
pub fn find_cyclic_vector(g: &IntMatrix) -> Result<Vec<BigInt>> {
    let n = g.dim();
    let unit = |i: usize| -> Vec<BigInt> {
        (0..n)
            .map(|k| {
                if k == i {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect()
    };
    for i in 0..n {
        let v = unit(i);
        if is_cyclic_for(g, &v) {
            return Ok(v);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut v = unit(i);
            v[j] = BigInt::one();
            if is_cyclic_for(g, &v) {
                return Ok(v);
            }
        }
    }
    for r in 2..=CYCLIC_SEARCH_RADIUS as i64 {
        let side = (2 * r + 1) as usize;
        let total = side.pow(n as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut v = vec![BigInt::zero(); n];
            for k in (0..n).rev() {
                v[k] = BigInt::from((rem % side) as i64 - r);
                rem /= side;
            }
            if v.iter().map(|x| x.abs()).max() != Some(BigInt::from(r)) || !content(&v).is_one() {
                continue;
            }
            if is_cyclic_for(g, &v) {
                return Ok(v);
            }
        }
    }
    Err(Error::SearchBudget(CYCLIC_SEARCH_RADIUS))
}

/// Unimodular `c` with `det c = 1` whose first `k` columns are a basis of the
/// saturation of `span_Q{v, ..., g^{k-1} v}` in `Z^n`, for every `k`.
pub fn adapted_basis(g: &IntMatrix, v: &[BigInt]) -> Result<IntMatrix> {
    let n = g.dim();
    let cont = content(v);
    if cont.is_zero() {
        return Err(Error::NotCyclic);
    }
    let prim: Vec<BigInt> = v.iter().map(|x| x / &cont).collect();
    let k = krylov_matrix(g, &prim);
    if k.det().is_zero() {
        return Err(Error::NotCyclic);
    }
    // Row HNF: Q * K = H upper triangular, so K = Q^{-1} H.
    let lat = hnf(n, &k.rows());
    debug_assert_eq!(lat.pivots(), (0..n).collect::<Vec<_>>().as_slice());
    let q = IntMatrix::from_rows(lat.transform().to_vec())?;
    let mut c = q.inverse()?;
    if c.det().is_negative() {
        for i in 0..n {
            let x = -c.get(i, n - 1).clone();
            c.set(i, n - 1, x);
        }
    }
    Ok(c)
}

/// Exact factorisation of a rational matrix in the cell `B p_sigma U_{n-1,n}`.
///
/// The first `n - 1` columns of `g'` must form an upper Hessenberg block with
/// nonzero subdiagonal; they become columns `2..n` of `b`, and the last column
/// is solved against them to obtain `u` and `b_{11}`.
pub fn bruhat_decompose_rat(gp: &RatMatrix) -> Result<(RatMatrix, RatMatrix)> {
    let n = gp.dim();
    if n < 2 {
        return Err(Error::NotInCell("dimension below 2".into()));
    }
    for c in 0..n - 1 {
        if gp.get(c + 1, c).is_zero() {
            return Err(Error::NotInCell(format!(
                "zero subdiagonal entry in column {}",
                c + 1
            )));
        }
        for r in c + 2..n {
            if !gp.get(r, c).is_zero() {
                return Err(Error::NotInCell(format!(
                    "entry ({}, {}) below the subdiagonal",
                    r + 1,
                    c + 1
                )));
            }
        }
    }
    let mut mu = vec![BigRational::zero(); n - 1];
    for row in (1..n).rev() {
        let mut rhs = gp.get(row, n - 1).clone();
        for (r, m) in mu.iter().enumerate().skip(row) {
            rhs -= m * gp.get(row, r);
        }
        mu[row - 1] = rhs / gp.get(row, row - 1);
    }
    let mut s = gp.get(0, n - 1).clone();
    for (r, m) in mu.iter().enumerate() {
        s -= m * gp.get(0, r);
    }
    let b11 = if n % 2 == 1 { s } else { -s };
    if b11.is_zero() {
        return Err(Error::NotInCell("vanishing b_11".into()));
    }
    let b = RatMatrix::from_fn(n, |i, j| {
        if j == 0 {
            if i == 0 {
                b11.clone()
            } else {
                BigRational::zero()
            }
        } else {
            gp.get(i, j - 1).clone()
        }
    });
    let mut u = RatMatrix::identity(n);
    for (r, m) in mu.into_iter().enumerate() {
        u.set(r, n - 1, m);
    }
    let recon = &(&b * &p_sigma(n).to_rat()) * &u;
    if &recon != gp || !b.is_upper_triangular() {
        return Err(Error::NotInCell("reconstruction mismatch".into()));
    }
    Ok((b, u))
}

pub fn bruhat_decompose(gp: &IntMatrix) -> Result<(RatMatrix, RatMatrix)> {
    bruhat_decompose_rat(&gp.to_rat())
}

/// Frame for every later derivation: `c^{-1} g c = g' = b p_sigma u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruhatData {
    pub c: IntMatrix,
    pub g_prime: IntMatrix,
    pub b: RatMatrix,
    pub u: RatMatrix,
    pub p_sigma: IntMatrix,
}

impl BruhatData {
    pub fn n(&self) -> usize {
        self.c.dim()
    }

    /// Runs the cyclic vector search, adapted basis and decomposition.
    pub fn from_regular(g: &IntMatrix) -> Result<Self> {
        let v = find_cyclic_vector(g)?;
        let c = adapted_basis(g, &v)?;
        Self::from_conjugator(g, c)
    }

    pub fn from_conjugator(g: &IntMatrix, c: IntMatrix) -> Result<Self> {
        let g_prime = &(&c.inverse()? * g) * &c;
        let (b, u) = bruhat_decompose(&g_prime)?;
        Ok(BruhatData {
            p_sigma: p_sigma(g.dim()),
            c,
            g_prime,
            b,
            u,
        })
    }

    pub fn b_inv(&self) -> RatMatrix {
        self.b.inverse().expect("b is invertible")
    }
}

/// Support pattern of the subgroup `U_{i,j}` (zero-based, `i < j`): positions
/// `(r, s)` with `s > j`, or `s = j` and `r <= i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnipotentPattern {
    pub n: usize,
    pub i: usize,
    pub j: usize,
}

impl UnipotentPattern {
    pub fn new(n: usize, i: usize, j: usize) -> Self {
        assert!(i < j && j < n, "pattern needs i < j < n");
        UnipotentPattern { n, i, j }
    }

    pub fn allows(&self, r: usize, s: usize) -> bool {
        r < s && (s > self.j || (s == self.j && r <= self.i))
    }

    /// The next smaller subgroup in the chain; `None` stands for the trivial group.
    pub fn predecessor(&self) -> Option<UnipotentPattern> {
        let n = self.n;
        if self.i != 0 {
            Some(UnipotentPattern::new(n, self.i - 1, self.j))
        } else if self.j != n - 1 {
            Some(UnipotentPattern::new(n, self.j, self.j + 1))
        } else {
            None
        }
    }

    pub fn contains<T: crate::exactalg::Scalar>(&self, x: &crate::exactalg::Matrix<T>) -> bool {
        x.dim() == self.n
            && x.is_upper_unitriangular()
            && (0..self.n)
                .all(|r| (r + 1..self.n).all(|s| self.allows(r, s) || x.get(r, s).is_zero()))
    }

    /// Membership in `U_{i,j}` but not in its predecessor.
    pub fn contains_strictly<T: crate::exactalg::Scalar>(
        &self,
        x: &crate::exactalg::Matrix<T>,
    ) -> bool {
        self.contains(x) && !x.get(self.i, self.j).is_zero()
    }
}
