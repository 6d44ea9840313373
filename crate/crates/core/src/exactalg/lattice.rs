//! Integer lattices: row-style Hermite normal form with transforms, Smith
//! normal form, and saturation exponents.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::RatMatrix;
use crate::error::{Error, Result};

pub type IntVec = Vec<BigInt>;

/// Lattice spanned by integer row vectors, in canonical HNF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLattice {
    dim: usize,
    generators: Vec<IntVec>,
    basis: Vec<IntVec>,
    pivots: Vec<usize>,
    /// Unimodular, `transform * generators = basis` stacked over zero rows.
    transform: Vec<IntVec>,
}

impl IntLattice {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn generators(&self) -> &[IntVec] {
        &self.generators
    }

    pub fn basis(&self) -> &[IntVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn transform(&self) -> &[IntVec] {
        &self.transform
    }

    /// Coefficients of `v` in the HNF basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<IntVec> {
        assert_eq!(v.len(), self.dim);
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if rest[..p].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
            coords.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Integer combination of the generators equal to `v`, if any.
    pub fn express(&self, v: &[BigInt]) -> Option<IntVec> {
        let coords = self.coordinates(v)?;
        let m = self.generators.len();
        Some(
            (0..m)
                .map(|g| {
                    coords
                        .iter()
                        .zip(&self.transform)
                        .fold(BigInt::zero(), |acc, (c, t)| acc + c * &t[g])
                })
                .collect(),
        )
    }
}

fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Applies the unimodular 2x2 map `[[x, y], [-b/g, a/g]]` to rows `r` and `s`.
fn combine_rows(
    m: &mut [IntVec],
    r: usize,
    s: usize,
    x: &BigInt,
    y: &BigInt,
    u: &BigInt,
    v: &BigInt,
) {
    let (ra, sa) = (m[r].clone(), m[s].clone());
    for k in 0..ra.len() {
        m[r][k] = x * &ra[k] + y * &sa[k];
        m[s][k] = u * &ra[k] + v * &sa[k];
    }
}

/// Row-style Hermite normal form of the given generators (all of length `dim`).
///
/// The basis rows have strictly increasing pivot columns, positive pivots, and
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(dim: usize, generators: &[IntVec]) -> IntLattice {
    assert!(
        generators.iter().all(|g| g.len() == dim),
        "generator length mismatch"
    );
    let m = generators.len();
    let mut a: Vec<IntVec> = generators.to_vec();
    let mut t: Vec<IntVec> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..dim {
        if r == m {
            break;
        }
        for s in r + 1..m {
            if a[s][col].is_zero() {
                continue;
            }
            if a[r][col].is_zero() {
                a.swap(r, s);
                t.swap(r, s);
                continue;
            }
            let (g, x, y) = xgcd(&a[r][col], &a[s][col]);
            let u = -(&a[s][col] / &g);
            let v = &a[r][col] / &g;
            combine_rows(&mut a, r, s, &x, &y, &u, &v);
            combine_rows(&mut t, r, s, &x, &y, &u, &v);
        }
        if a[r][col].is_zero() {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut().chain(t[r].iter_mut()) {
                *x = -x.clone();
            }
        }
        for above in 0..r {
            let q = a[above][col].div_floor(&a[r][col]);
            if q.is_zero() {
                continue;
            }
            for k in 0..dim {
                let d = &q * &a[r][k];
                a[above][k] -= d;
            }
            for k in 0..m {
                let d = &q * &t[r][k];
                t[above][k] -= d;
            }
        }
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    IntLattice {
        dim,
        generators: generators.to_vec(),
        basis: a,
        pivots,
        transform: t,
    }
}

/// Smith normal form `left * a * right = diag`, with the diagonal a
/// divisibility chain of non-negative entries.
#[derive(Clone, Debug)]
pub struct Snf {
    pub diagonal: Vec<BigInt>,
    pub form: Vec<IntVec>,
    pub left: Vec<IntVec>,
    pub right: Vec<IntVec>,
}

fn identity(k: usize) -> Vec<IntVec> {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn transpose(a: &[IntVec], cols: usize) -> Vec<IntVec> {
    (0..cols)
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn snf(a: &[IntVec]) -> Snf {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut s: Vec<IntVec> = a.to_vec();
    let mut left = identity(rows);
    // Column operations are tracked as row operations on right^T.
    let mut right_t = identity(cols);
    let mut st = Vec::new();
    let k = rows.min(cols);
    for d in 0..k {
        // Pivot: smallest nonzero absolute value in the trailing block.
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in d..rows {
                for j in d..cols {
                    if !s[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(s, left, right_t, cols);
            };
            s.swap(d, pi);
            left.swap(d, pi);
            if pj != d {
                for row in s.iter_mut() {
                    row.swap(d, pj);
                }
                right_t.swap(d, pj);
            }
            let mut clean = true;
            for i in d + 1..rows {
                let q = s[i][d].div_floor(&s[d][d]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let v = &q * &s[d][j];
                        s[i][j] -= v;
                    }
                    for j in 0..rows {
                        let v = &q * &left[d][j];
                        left[i][j] -= v;
                    }
                }
                if !s[i][d].is_zero() {
                    clean = false;
                }
            }
            for j in d + 1..cols {
                let q = s[d][j].div_floor(&s[d][d]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let v = &q * &s[i][d];
                        s[i][j] -= v;
                    }
                    st.clear();
                    st.extend(right_t[d].iter().cloned());
                    for (x, y) in right_t[j].iter_mut().zip(&st) {
                        *x -= &q * y;
                    }
                }
                if !s[d][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold any non-multiple into row d and retry.
            let bad =
                (d + 1..rows).find(|&i| (d + 1..cols).any(|j| !s[i][j].is_multiple_of(&s[d][d])));
            match bad {
                Some(i) => {
                    for j in 0..cols {
                        let v = s[i][j].clone();
                        s[d][j] += v;
                    }
                    for j in 0..rows {
                        let v = left[i][j].clone();
                        left[d][j] += v;
                    }
                }
                None => break,
            }
        }
        if s[d][d].is_negative() {
            for x in s[d].iter_mut().chain(left[d].iter_mut()) {
                *x = -x.clone();
            }
        }
    }
    finish(s, left, right_t, cols)
}

fn finish(s: Vec<IntVec>, left: Vec<IntVec>, right_t: Vec<IntVec>, cols: usize) -> Snf {
    let k = s.len().min(cols);
    let diagonal = (0..k).map(|i| s[i][i].clone()).collect();
    Snf {
        diagonal,
        form: s,
        left,
        right: transpose(&right_t, cols),
    }
}

/// Least `d0 > 0` with `d0 * Z^dim` inside the lattice, together with
/// `coeffs[r]`: an integer combination of the generators equal to `d0 * e_r`.
pub fn saturation_exponent(lattice: &IntLattice) -> Result<(BigInt, Vec<IntVec>)> {
    let d = lattice.dim();
    if lattice.rank() != d {
        return Err(Error::RankDeficient {
            rank: lattice.rank(),
            dim: d,
        });
    }
    let h = RatMatrix::from_rows(
        lattice
            .basis()
            .iter()
            .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
            .collect(),
    )?;
    let hinv = h.inverse()?;
    let d0 = hinv.denominator_lcm();
    let mut coeffs = Vec::with_capacity(d);
    for r in 0..d {
        let mut target = vec![BigInt::zero(); d];
        target[r] = d0.clone();
        let c = lattice
            .express(&target)
            .expect("d0 * e_r lies in the lattice by construction");
        coeffs.push(c);
    }
    Ok((d0, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> IntVec {
        x.iter().map(|&t| BigInt::from(t)).collect()
    }

    fn mat_mul(a: &[IntVec], b: &[IntVec]) -> Vec<IntVec> {
        let inner = b.len();
        let cols = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|r| {
                (0..cols)
                    .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &r[k] * &b[k][j]))
                    .collect()
            })
            .collect()
    }

    fn det(a: &[IntVec]) -> BigInt {
        crate::exactalg::IntMatrix::from_rows(a.to_vec())
            .unwrap()
            .det()
    }

    #[test]
    fn hnf_example() {
        let l = hnf(2, &[v(&[2, 0]), v(&[1, 3])]);
        assert_eq!(l.basis(), &[v(&[1, 3]), v(&[0, 6])]);
        // Two-way membership oracle.
        for g in l.generators() {
            assert!(l.contains(g));
        }
        let other = hnf(2, l.basis());
        for b in l.basis() {
            assert!(hnf(2, l.generators()).contains(b));
        }
        assert_eq!(other.basis(), l.basis());
    }

    #[test]
    fn hnf_identity_and_empty() {
        let l = hnf(3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert_eq!(l.basis(), &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]);
        let z = hnf(3, &[]);
        assert_eq!(z.rank(), 0);
        assert!(z.contains(&v(&[0, 0, 0])));
        assert!(!z.contains(&v(&[1, 0, 0])));
    }

    #[test]
    fn snf_already_diagonal() {
        let s = snf(&[v(&[2, 0]), v(&[0, 6])]);
        assert_eq!(s.diagonal, v(&[2, 6]));
    }

    #[test]
    fn snf_fixes_divisibility() {
        let a = [v(&[2, 0]), v(&[0, 3])];
        let s = snf(&a);
        assert_eq!(s.diagonal, v(&[1, 6]));
        assert_eq!(mat_mul(&mat_mul(&s.left, &a), &s.right), s.form);
    }

    #[test]
    fn saturation_examples() {
        let l = hnf(2, &[v(&[2, 0]), v(&[1, 3])]);
        let (d0, coeffs) = saturation_exponent(&l).unwrap();
        assert_eq!(d0, BigInt::from(6));
        for (r, c) in coeffs.iter().enumerate() {
            let combo: IntVec = (0..2)
                .map(|k| {
                    c.iter()
                        .zip(l.generators())
                        .fold(BigInt::zero(), |a, (x, g)| a + x * &g[k])
                })
                .collect();
            let mut want = v(&[0, 0]);
            want[r] = d0.clone();
            assert_eq!(combo, want);
        }
        let id = hnf(3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert_eq!(saturation_exponent(&id).unwrap().0, BigInt::one());
        for m in 1..6i64 {
            let diag = hnf(2, &[v(&[m, 0]), v(&[0, m * m])]);
            assert_eq!(saturation_exponent(&diag).unwrap().0, BigInt::from(m * m));
        }
        let deficient = hnf(2, &[v(&[1, 1]), v(&[2, 2])]);
        assert_eq!(
            saturation_exponent(&deficient),
            Err(Error::RankDeficient { rank: 1, dim: 2 })
        );
    }

    fn arb_gens() -> impl Strategy<Value = (usize, Vec<IntVec>)> {
        (1usize..=4, 1usize..=5).prop_flat_map(|(d, m)| {
            (
                Just(d),
                proptest::collection::vec(proptest::collection::vec(-6i64..=6, d), m),
            )
                .prop_map(|(d, rows)| (d, rows.into_iter().map(|r| v(&r)).collect()))
        })
    }

    proptest! {
        #[test]
        fn hnf_invariants((d, gens) in arb_gens()) {
            let l = hnf(d, &gens);
            let t = l.transform();
            prop_assert_eq!(det(t).abs(), BigInt::one());
            let prod = mat_mul(t, &gens);
            for (i, row) in prod.iter().enumerate() {
                if i < l.rank() {
                    prop_assert_eq!(row, &l.basis()[i]);
                } else {
                    prop_assert!(row.iter().all(Zero::is_zero));
                }
            }
            for (i, (row, &p)) in l.basis().iter().zip(l.pivots()).enumerate() {
                prop_assert!(row[p].is_positive());
                prop_assert!(row[..p].iter().all(Zero::is_zero));
                for above in &l.basis()[..i] {
                    prop_assert!(!above[p].is_negative() && above[p] < row[p]);
                }
            }
            for g in &gens {
                prop_assert!(l.contains(g));
                let c = l.express(g).unwrap();
                let back: IntVec = (0..d).map(|k| c.iter().zip(&gens).fold(BigInt::zero(), |a, (x, gg)| a + x * &gg[k])).collect();
                prop_assert_eq!(&back, g);
            }
        }

        #[test]
        fn snf_invariants((_d, gens) in arb_gens()) {
            let s = snf(&gens);
            prop_assert_eq!(mat_mul(&mat_mul(&s.left, &gens), &s.right), s.form.clone());
            prop_assert_eq!(det(&s.left).abs(), BigInt::one());
            prop_assert_eq!(det(&s.right).abs(), BigInt::one());
            for (i, row) in s.form.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if i != j { prop_assert!(x.is_zero()); }
                }
            }
            for w in s.diagonal.windows(2) {
                prop_assert!(!w[0].is_negative());
                if w[0].is_zero() { prop_assert!(w[1].is_zero()); } else { prop_assert!(w[1].is_multiple_of(&w[0])); }
            }
        }
    }
}
