//! Finite-quotient sanity checks: group orders of `SL(n, Z/N)`, closure of
//! images modulo `N`, and surjectivity modulo a prime.
//!
//! The mod-`p` image order comes from a deterministic Schreier-Sims run on
//! the permutation action over `F_p^n`; plain element enumeration does not
//! scale to `SL(3, 11)` (about 2 * 10^8 elements).

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{dec, IntMatrix};

/// Default element cap for closures.
pub const DEFAULT_CAP: usize = 10_000_000;

/// Prime factorisation by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `|SL(n, Z/N)|`, multiplicative over prime powers with
/// `|SL(n, Z/p^e)| = p^{(e-1)(n^2-1)} p^{n(n-1)/2} prod_{i=2}^{n} (p^i - 1)`.
pub fn sl_order(n: usize, modulus: u64) -> BigInt {
    let mut total = BigInt::one();
    for (p, e) in factorize(modulus) {
        let p = BigInt::from(p);
        let mut o =
            p.pow(((e as usize - 1) * (n * n - 1)) as u32) * p.pow((n * (n - 1) / 2) as u32);
        for i in 2..=n {
            o *= p.pow(i as u32) - BigInt::one();
        }
        total *= o;
    }
    total
}

fn reduce(m: &IntMatrix, modulus: u64) -> Vec<u64> {
    let md = BigInt::from(modulus);
    m.entries()
        .iter()
        .map(|x| x.mod_floor(&md).to_u64().expect("reduced below modulus"))
        .collect()
}

fn mul_mod(a: &[u64], b: &[u64], n: usize, modulus: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k] as u128;
            if x == 0 {
                continue;
            }
            for j in 0..n {
                let v = (out[i * n + j] as u128 + x * b[k * n + j] as u128) % modulus as u128;
                out[i * n + j] = v as u64;
            }
        }
    }
    out
}

/// Size of the subgroup of `GL(n, Z/N)` generated by `gens`, by
/// breadth-first closure from the identity.
pub fn closure_size(gens: &[IntMatrix], modulus: u64, cap: usize) -> Result<usize> {
    let Some(first) = gens.first() else {
        return Ok(1);
    };
    let n = first.dim();
    if modulus == 1 {
        return Ok(1);
    }
    let gs: Vec<Vec<u64>> = gens.iter().map(|g| reduce(g, modulus)).collect();
    let id = reduce(&IntMatrix::identity(n), modulus);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in &gs {
            let y = mul_mod(&x, g, n, modulus);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(seen.len())
}

/// `[SL(n, Z/N) : image of <g, h>]`.
pub fn index_mod_n(g: &IntMatrix, h: &IntMatrix, modulus: u64, cap: usize) -> Result<BigInt> {
    if modulus == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let size = closure_size(&[g.clone(), h.clone()], modulus, cap)?;
    let order = sl_order(g.dim(), modulus);
    let (q, r) = order.div_rem(&BigInt::from(size));
    if !r.is_zero() {
        return Err(Error::Identity(format!(
            "closure size {size} does not divide |SL| = {order}"
        )));
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModPReport {
    pub p: u64,
    #[serde(with = "dec")]
    pub image_order: BigInt,
    #[serde(with = "dec")]
    pub group_order: BigInt,
    pub surjective: bool,
}

/// Order of the image of `<g, h>` in `SL(n, p)` and whether it is everything.
pub fn mod_p_image(g: &IntMatrix, h: &IntMatrix, p: u64) -> Result<ModPReport> {
    if p < 2 || factorize(p) != vec![(p, 1)] {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let n = g.dim();
    let degree = (p as u128).pow(n as u32);
    if degree > 1 << 22 {
        return Err(Error::CapExceeded(1 << 22));
    }
    let group_order = sl_order(n, p);
    let gens: Vec<Perm> = [g, h].iter().map(|m| vector_action(m, p)).collect();
    let image_order = schreier_sims_order(&gens, Some(&group_order));
    Ok(ModPReport {
        p,
        surjective: image_order == group_order,
        image_order,
        group_order,
    })
}

pub fn mod_p_image_check(g: &IntMatrix, h: &IntMatrix, p: u64) -> Result<bool> {
    Ok(mod_p_image(g, h, p)?.surjective)
}

type Perm = Vec<u32>;

/// Permutation of `F_p^n` (vectors encoded base `p`) induced by `v -> m v`.
fn vector_action(m: &IntMatrix, p: u64) -> Perm {
    let n = m.dim();
    let a = reduce(m, p);
    let size = p.pow(n as u32) as usize;
    let mut out = Vec::with_capacity(size);
    let mut v = vec![0u64; n];
    for code in 0..size {
        let mut c = code as u64;
        for x in v.iter_mut() {
            *x = c % p;
            c /= p;
        }
        let mut image = 0u64;
        for i in (0..n).rev() {
            let s = (0..n).fold(0u64, |acc, k| (acc + a[i * n + k] * v[k]) % p);
            image = image * p + s;
        }
        out.push(image as u32);
    }
    out
}

/// Apply `a`, then `b`.
fn compose(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

fn invert(a: &Perm) -> Perm {
    let mut out = vec![0u32; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

fn is_identity(a: &Perm) -> bool {
    a.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

struct Level {
    base: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    /// `trans[x]` maps the base point to `x`; `trans_inv` is its inverse.
    trans: Vec<Option<Perm>>,
    trans_inv: Vec<Option<Perm>>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut l = Level {
            base,
            gens: Vec::new(),
            orbit: Vec::new(),
            trans: vec![None; degree],
            trans_inv: vec![None; degree],
        };
        l.rebuild();
        l
    }

    fn rebuild(&mut self) {
        let degree = self.trans.len();
        let id: Perm = (0..degree as u32).collect();
        self.trans = vec![None; degree];
        self.trans_inv = vec![None; degree];
        self.trans[self.base as usize] = Some(id.clone());
        self.trans_inv[self.base as usize] = Some(id);
        self.orbit = vec![self.base];
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            for s in &self.gens {
                let y = s[x as usize];
                if self.trans[y as usize].is_none() {
                    let u = compose(self.trans[x as usize].as_ref().expect("orbit point"), s);
                    self.trans_inv[y as usize] = Some(invert(&u));
                    self.trans[y as usize] = Some(u);
                    self.orbit.push(y);
                }
            }
            k += 1;
        }
    }
}

/// Sifts `g` through `levels`; returns the residue and the level where it
/// left the stabiliser chain (`levels.len()` if it sifted through).
fn strip(levels: &[Level], g: &Perm) -> (Perm, usize) {
    let mut h = g.clone();
    for (l, lev) in levels.iter().enumerate() {
        let beta = h[lev.base as usize] as usize;
        match &lev.trans_inv[beta] {
            None => return (h, l),
            Some(ui) => h = compose(&h, ui),
        }
    }
    (h, levels.len())
}

fn chain_order(levels: &[Level]) -> BigInt {
    levels
        .iter()
        .fold(BigInt::one(), |acc, l| acc * BigInt::from(l.orbit.len()))
}

/// Group order by deterministic Schreier-Sims. The product of basic orbit
/// lengths is a lower bound at every stage, so reaching `target` (the order
/// of a known overgroup) ends the run early with an exact answer.
fn schreier_sims_order(gens: &[Perm], target: Option<&BigInt>) -> BigInt {
    let gens: Vec<Perm> = gens.iter().filter(|g| !is_identity(g)).cloned().collect();
    let Some(first) = gens.first() else {
        return BigInt::one();
    };
    let degree = first.len();
    let mut levels: Vec<Level> = Vec::new();
    for s in &gens {
        if levels.iter().all(|l| s[l.base as usize] == l.base) {
            let moved = s
                .iter()
                .enumerate()
                .find(|(i, &x)| *i as u32 != x)
                .map(|(i, _)| i as u32)
                .expect("non-identity");
            levels.push(Level::new(moved, degree));
        }
    }
    // Level k keeps the generators fixing the first k base points.
    let base_pts: Vec<u32> = levels.iter().map(|l| l.base).collect();
    for (k, lev) in levels.iter_mut().enumerate() {
        lev.gens = gens
            .iter()
            .filter(|s| base_pts[..k].iter().all(|&b| s[b as usize] == b))
            .cloned()
            .collect();
        lev.rebuild();
    }

    let done = |levels: &[Level]| target.is_some_and(|t| &chain_order(levels) == t);
    let mut i = levels.len() as isize - 1;
    while i >= 0 {
        if done(&levels) {
            break;
        }
        let iu = i as usize;
        let mut jump = None;
        'search: for &beta in &levels[iu].orbit {
            for s in &levels[iu].gens {
                let u_b = levels[iu].trans[beta as usize]
                    .as_ref()
                    .expect("orbit point");
                let sb = s[beta as usize] as usize;
                let u_sb_inv = levels[iu].trans_inv[sb].as_ref().expect("orbit closed");
                let sch = compose(&compose(u_b, s), u_sb_inv);
                if is_identity(&sch) {
                    continue;
                }
                let (h, j) = strip(&levels[iu + 1..], &sch);
                let j = iu + 1 + j;
                if j < levels.len() || !is_identity(&h) {
                    jump = Some((h, j));
                    break 'search;
                }
            }
        }
        match jump {
            None => i -= 1,
            Some((h, j)) => {
                if j == levels.len() {
                    let moved = h
                        .iter()
                        .enumerate()
                        .find(|(k, &x)| *k as u32 != x)
                        .map(|(k, _)| k as u32)
                        .expect("non-identity");
                    levels.push(Level::new(moved, degree));
                }
                for lev in levels.iter_mut().take(j + 1).skip(iu + 1) {
                    lev.gens.push(h.clone());
                    lev.rebuild();
                }
                i = j as isize;
            }
        }
    }
    chain_order(&levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::elementary;

    fn elementary_gens(n: usize) -> Vec<IntMatrix> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(elementary(n, i, j, 1).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn order_formula_matches_enumeration() {
        assert_eq!(sl_order(3, 2), BigInt::from(168));
        assert_eq!(
            closure_size(&elementary_gens(3), 2, DEFAULT_CAP).unwrap(),
            168
        );
        assert_eq!(sl_order(2, 3), BigInt::from(24));
        assert_eq!(
            closure_size(&elementary_gens(2), 3, DEFAULT_CAP).unwrap(),
            24
        );
        assert_eq!(sl_order(3, 4), BigInt::from(43008));
        assert_eq!(
            closure_size(&elementary_gens(3), 4, DEFAULT_CAP).unwrap(),
            43008
        );
        assert_eq!(sl_order(2, 6), BigInt::from(24 * 6));
        assert_eq!(
            closure_size(&elementary_gens(2), 6, DEFAULT_CAP).unwrap(),
            144
        );
        assert_eq!(sl_order(3, 1), BigInt::one());
    }

    #[test]
    fn schreier_sims_matches_enumeration() {
        let gens = elementary_gens(3);
        for p in [2u64, 3] {
            let perms: Vec<Perm> = gens.iter().map(|m| vector_action(m, p)).collect();
            let size = closure_size(&gens, p, DEFAULT_CAP).unwrap();
            assert_eq!(schreier_sims_order(&perms, None), BigInt::from(size));
        }
        // A proper subgroup: the upper unitriangular group mod 3 has order 27.
        let upper = [
            elementary(3, 0, 1, 1).unwrap(),
            elementary(3, 1, 2, 1).unwrap(),
        ];
        let perms: Vec<Perm> = upper.iter().map(|m| vector_action(m, 3)).collect();
        assert_eq!(schreier_sims_order(&perms, None), BigInt::from(27));
        assert_eq!(closure_size(&upper, 3, DEFAULT_CAP).unwrap(), 27);
    }

    #[test]
    fn trivial_image() {
        let i = IntMatrix::identity(3);
        let r = mod_p_image(&i, &i, 5).unwrap();
        assert!(!r.surjective);
        assert_eq!(r.image_order, BigInt::one());
        assert!(mod_p_image(&i, &i, 4).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            closure_size(&elementary_gens(3), 4, 100),
            Err(Error::CapExceeded(100))
        );
    }

    #[test]
    fn index_of_upper_pair_mod_two() {
        // <e12, e23> mod 2 is the unitriangular group of order 8.
        let idx = index_mod_n(
            &elementary(3, 0, 1, 1).unwrap(),
            &elementary(3, 1, 2, 1).unwrap(),
            2,
            1000,
        )
        .unwrap();
        assert_eq!(idx, BigInt::from(21));
    }
}
