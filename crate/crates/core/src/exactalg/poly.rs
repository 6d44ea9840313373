//! Univariate polynomials over Q, characteristic and minimal polynomials,
//! discriminants.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{parse_rat, rat_to_string, IntMatrix, RatMatrix};
use crate::error::{Error, Result};

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_ints(&[1])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        Poly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        Poly::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        Poly::new(
            (0..len)
                .map(|k| self.coeffs.get(k).unwrap_or(&z) + other.coeffs.get(k).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let neg = Poly::new(other.coeffs.iter().map(|c| -c).collect());
        self.add(&neg)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lc = divisor.leading();
        if self.is_zero() || self.degree() < dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic least common multiple.
    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(other);
        self.mul(&other.div_rem(&g).0).monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation at a matrix.
    pub fn eval_matrix(&self, a: &RatMatrix) -> RatMatrix {
        let n = a.dim();
        let mut acc = RatMatrix::zeros(n);
        for c in self.coeffs.iter().rev() {
            acc = &acc * a;
            for i in 0..n {
                let v = acc.get(i, i) + c;
                acc.set(i, i, v);
            }
        }
        acc
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs
            .iter()
            .map(rat_to_string)
            .collect::<Vec<_>>()
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<String> = Vec::deserialize(de)?;
        let coeffs = raw
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Poly::new(coeffs))
    }
}

/// Companion matrix of a monic integer polynomial: ones on the subdiagonal,
/// negated low coefficients in the last column.
pub fn companion(coeffs_low_to_high: &[i64]) -> IntMatrix {
    let n = coeffs_low_to_high.len() - 1;
    assert!(
        n >= 1 && coeffs_low_to_high[n] == 1,
        "companion needs a monic polynomial"
    );
    IntMatrix::from_fn(n, |i, j| {
        if j + 1 == n {
            BigInt::from(-coeffs_low_to_high[i])
        } else if i == j + 1 {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    })
}

/// `det(xI - A)` by the division-free Berkowitz recurrence.
pub fn char_poly(a: &IntMatrix) -> Poly {
    let n = a.dim();
    // Coefficients high to low for the trailing k x k block.
    let mut q: Vec<BigInt> = vec![BigInt::one()];
    for start in (0..n).rev() {
        let k = n - 1 - start;
        let diag = a.get(start, start).clone();
        let row: Vec<BigInt> = (start + 1..n).map(|j| a.get(start, j).clone()).collect();
        let mut col: Vec<BigInt> = (start + 1..n).map(|i| a.get(i, start).clone()).collect();
        // s_t = R A^t C for the trailing block.
        let mut s = Vec::with_capacity(k);
        for _ in 0..k {
            s.push(
                row.iter()
                    .zip(&col)
                    .fold(BigInt::zero(), |acc, (r, c)| acc + r * c),
            );
            col = (0..k)
                .map(|i| {
                    (0..k).fold(BigInt::zero(), |acc, j| {
                        acc + a.get(start + 1 + i, start + 1 + j) * &col[j]
                    })
                })
                .collect();
        }
        let mut p = vec![BigInt::zero(); k + 2];
        for (idx, c) in q.iter().enumerate() {
            p[idx] += c;
            p[idx + 1] -= &diag * c;
        }
        for i in 0..k {
            let corr = (0..=i).fold(BigInt::zero(), |acc, l| acc + &q[l] * &s[i - l]);
            p[i + 2] -= corr;
        }
        q = p;
    }
    Poly::new(q.into_iter().rev().map(BigRational::from_integer).collect())
}

/// Solves `sum_j x_j cols[j] = target` over Q, if consistent.
pub(crate) fn solve_in_span(
    cols: &[Vec<BigRational>],
    target: &[BigRational],
) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let k = cols.len();
    // Augmented rows x (k + 1).
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            cols.iter()
                .map(|c| c[i].clone())
                .chain(std::iter::once(target[i].clone()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x /= &pv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=k {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..rows).any(|i| !m[i][k].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][k].clone();
    }
    Some(x)
}

/// Monic annihilator of minimal degree for `v` under `a`.
pub fn local_annihilator(a: &IntMatrix, v: &[BigInt]) -> Poly {
    let ar = a.to_rat();
    let mut krylov: Vec<Vec<BigRational>> =
        vec![v.iter().cloned().map(BigRational::from_integer).collect()];
    loop {
        let next = ar.mul_vec(krylov.last().unwrap());
        if let Some(x) = solve_in_span(&krylov, &next) {
            let mut c: Vec<BigRational> = x.into_iter().map(|t| -t).collect();
            c.push(BigRational::one());
            return Poly::new(c);
        }
        krylov.push(next);
    }
}

/// Minimal polynomial as the lcm of the local annihilators of the standard basis.
pub fn min_poly(a: &IntMatrix) -> Poly {
    let n = a.dim();
    let mut acc = Poly::one();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        acc = acc.lcm(&local_annihilator(a, &e));
    }
    acc
}

/// `(-1)^{n(n-1)/2} res(f, f') / lc(f)` with the resultant taken as a
/// Sylvester determinant.
pub fn discriminant(f: &Poly) -> Result<BigRational> {
    let n = f.degree();
    if f.is_zero() || n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    let df = f.derivative();
    let m = df.degree();
    let size = n + m;
    let mut syl = RatMatrix::zeros(size);
    // Coefficient rows are high-to-low, shifted.
    for r in 0..m {
        for (k, c) in f.coeffs().iter().rev().enumerate() {
            syl.set(r, r + k, c.clone());
        }
    }
    for r in 0..n {
        for (k, c) in df.coeffs().iter().rev().enumerate() {
            syl.set(m + r, r + k, c.clone());
        }
    }
    let res = syl.det();
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    Ok(sign * res / f.leading())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::matrix::IntMatrix;
    use proptest::prelude::*;

    fn q(p: i64) -> BigRational {
        BigRational::from_integer(p.into())
    }

    fn block_diag(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        let (n, m) = (a.dim(), b.dim());
        IntMatrix::from_fn(n + m, |i, j| {
            if i < n && j < n {
                a.get(i, j).clone()
            } else if i >= n && j >= n {
                b.get(i - n, j - n).clone()
            } else {
                BigInt::zero()
            }
        })
    }

    #[test]
    fn companion_char_poly() {
        let c = companion(&[-1, -1, 0, 1]);
        assert_eq!(char_poly(&c), Poly::from_ints(&[-1, -1, 0, 1]));
        assert_eq!(min_poly(&c), Poly::from_ints(&[-1, -1, 0, 1]));
    }

    #[test]
    fn identity_min_poly() {
        assert_eq!(min_poly(&IntMatrix::identity(3)), Poly::from_ints(&[-1, 1]));
        assert_eq!(
            char_poly(&IntMatrix::identity(3)),
            Poly::from_ints(&[-1, 3, -3, 1])
        );
    }

    #[test]
    fn repeated_block_min_poly_drops_degree() {
        let c = companion(&[1, -3, 1]);
        let a = block_diag(&c, &c);
        let mp = min_poly(&a);
        assert_eq!(mp.degree(), 2);
        // Oracle: the degree-2 divisor annihilates, no linear candidate does.
        assert!(Poly::from_ints(&[1, -3, 1])
            .eval_matrix(&a.to_rat())
            .entries()
            .iter()
            .all(Zero::is_zero));
        for r in [-1i64, 0, 1] {
            let lin = Poly::from_ints(&[-r, 1]);
            assert!(!lin
                .eval_matrix(&a.to_rat())
                .entries()
                .iter()
                .all(Zero::is_zero));
        }
        assert!(char_poly(&a).div_rem(&mp).1.is_zero());
    }

    /// Independent oracles: `b^2 - 4ac` and `-4p^3 - 27q^2`.
    #[test]
    fn discriminant_oracles() {
        assert_eq!(
            discriminant(&Poly::from_ints(&[-1, -1, 0, 1])).unwrap(),
            q(-4 * (-1i64).pow(3) - 27)
        );
        assert_eq!(
            discriminant(&Poly::from_ints(&[-1, -1, 0, 1])).unwrap(),
            q(-23)
        );
        assert_eq!(discriminant(&Poly::from_ints(&[1, -2, 1])).unwrap(), q(0));
        assert_eq!(
            discriminant(&Poly::from_ints(&[1, 0, 1])).unwrap(),
            q(0 - 4)
        );
        assert_eq!(
            discriminant(&Poly::from_ints(&[1, -3, 1])).unwrap(),
            q(9 - 4)
        );
        // non-monic quadratic 2x^2 + 3x - 5
        assert_eq!(
            discriminant(&Poly::from_ints(&[-5, 3, 2])).unwrap(),
            q(9 + 40)
        );
        assert_eq!(
            discriminant(&Poly::from_ints(&[1, 1])),
            Err(Error::DegreeTooSmall(1))
        );
    }

    #[test]
    fn poly_division_and_gcd() {
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[-1, 1]);
        let (qq, r) = a.div_rem(&b);
        assert_eq!(qq, Poly::from_ints(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&Poly::from_ints(&[1, 1])), Poly::from_ints(&[1, 1]));
        assert_eq!(b.lcm(&Poly::from_ints(&[1, 1])), a);
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(-4i64..=4, n * n)
            .prop_map(move |v| IntMatrix::from_fn(n, |i, j| BigInt::from(v[i * n + j])))
    }

    proptest! {
        #[test]
        fn cayley_hamilton(a in (2usize..=5).prop_flat_map(arb_matrix)) {
            let cp = char_poly(&a);
            prop_assert_eq!(cp.degree(), a.dim());
            prop_assert!(cp.leading().is_one());
            prop_assert!(cp.eval_matrix(&a.to_rat()).entries().iter().all(Zero::is_zero));
            // constant term is (-1)^n det
            let det = BigRational::from_integer(a.det());
            let c0 = cp.coeffs().first().cloned().unwrap_or_else(BigRational::zero);
            let expect = if a.dim() % 2 == 0 { det } else { -det };
            prop_assert_eq!(c0, expect);
        }

        #[test]
        fn min_poly_divides_char_poly(a in (2usize..=4).prop_flat_map(arb_matrix)) {
            let mp = min_poly(&a);
            prop_assert!(mp.eval_matrix(&a.to_rat()).entries().iter().all(Zero::is_zero));
            prop_assert!(char_poly(&a).div_rem(&mp).1.is_zero());
        }
    }
}
