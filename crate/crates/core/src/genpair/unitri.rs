//! Polycyclic sifting in the integral unitriangular group.
//!
//! Positions are ordered along the chain `U = U_{1,2} > ... > 1`: columns
//! ascending, rows descending within a column. Each tail of the chain is
//! normal in `U`, and the entry at the first nonzero position is additive,
//! so a table holding at most one element per position with a positive
//! leading entry (an induced polycyclic sequence) decides membership by
//! division with remainder.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::IntMatrix;

use super::ctx::{power, Ctx, Elt};

/// Chain order of the strictly upper positions (zero-based).
pub(crate) fn chain_positions(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for j in 1..n {
        for i in (0..j).rev() {
            out.push((i, j));
        }
    }
    out
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Distinct prime factors; a cofactor left after trial division is
/// returned as one entry (possibly composite).
pub(crate) fn prime_factors(c: &BigInt) -> Vec<BigInt> {
    let mut c = c.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= c && p <= limit {
        if (&c % &p).is_zero() {
            out.push(p.clone());
            while (&c % &p).is_zero() {
                c /= &p;
            }
        }
        p += 1;
    }
    if c > BigInt::one() {
        out.push(c);
    }
    out
}

pub(crate) struct Ips {
    n: usize,
    pos: Vec<(usize, usize)>,
    table: Vec<Option<Elt>>,
}

impl Ips {
    pub fn new(n: usize) -> Self {
        let pos = chain_positions(n);
        let table = vec![None; pos.len()];
        Ips { n, pos, table }
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.pos
    }

    pub fn index_of(&self, i: usize, j: usize) -> usize {
        self.pos
            .iter()
            .position(|&p| p == (i, j))
            .expect("strictly upper position")
    }

    pub fn has(&self, q: usize) -> bool {
        self.table[q].is_some()
    }

    #[cfg(test)]
    pub fn entry(&self, q: usize) -> Option<&Elt> {
        self.table[q].as_ref()
    }

    pub fn missing(&self) -> Vec<(usize, usize)> {
        (0..self.pos.len())
            .filter(|&q| self.table[q].is_none())
            .map(|q| self.pos[q])
            .collect()
    }

    fn leading(&self, m: &IntMatrix) -> Option<usize> {
        self.pos.iter().position(|&(i, j)| !m.get(i, j).is_zero())
    }

    fn pivot(&self, q: usize) -> BigInt {
        let (i, j) = self.pos[q];
        self.table[q]
            .as_ref()
            .expect("pivot present")
            .m
            .get(i, j)
            .clone()
    }

    fn check_member(&self, m: &IntMatrix) -> Result<()> {
        if m.dim() != self.n || !m.is_upper_unitriangular() {
            return Err(Error::InvalidArgument(format!(
                "not in the unitriangular group: {m:?}"
            )));
        }
        Ok(())
    }

    /// Adds `x` to the group; returns whether the table changed.
    pub fn insert(&mut self, ctx: &mut Ctx, x: Elt) -> Result<bool> {
        self.check_member(&x.m)?;
        let mut changed = false;
        let mut queue = vec![x];
        'outer: while let Some(mut x) = queue.pop() {
            while let Some(q) = self.leading(&x.m) {
                let (i, j) = self.pos[q];
                let a = x.m.get(i, j).clone();
                let Some(t) = self.table[q].clone() else {
                    if a.is_negative() {
                        x = ctx.inv(&x);
                    }
                    self.table[q] = Some(x);
                    changed = true;
                    continue 'outer;
                };
                let p = t.m.get(i, j).clone();
                if a.is_multiple_of(&p) {
                    let tp = ctx.pow(&t, &-(&a / &p));
                    x = ctx.mul(&tp, &x);
                    continue;
                }
                let eg = p.extended_gcd(&a);
                let parts = [pow_nonzero(ctx, &t, &eg.x), pow_nonzero(ctx, &x, &eg.y)];
                let parts: Vec<Elt> = parts.into_iter().flatten().collect();
                let new = ctx.product(&parts);
                debug_assert_eq!(new.m.get(i, j), &eg.gcd);
                let nt = ctx.pow(&new, &-(&p / &eg.gcd));
                let rem_t = ctx.mul(&nt, &t);
                let nx = ctx.pow(&new, &-(&a / &eg.gcd));
                x = ctx.mul(&nx, &x);
                self.table[q] = Some(new);
                changed = true;
                queue.push(rem_t);
            }
        }
        Ok(changed)
    }

    /// Exponents `(q, e)` with `m = prod T_q^e` (in order), if `m` lies in the group.
    fn sift_exponents(&self, m: &IntMatrix) -> Option<Vec<(usize, BigInt)>> {
        if !m.is_upper_unitriangular() {
            return None;
        }
        let mut cur = m.clone();
        let mut out = Vec::new();
        while let Some(q) = self.leading(&cur) {
            let t = self.table[q].as_ref()?;
            let (i, j) = self.pos[q];
            let p = t.m.get(i, j);
            let a = cur.get(i, j);
            if !a.is_multiple_of(p) {
                return None;
            }
            let e = a / p;
            cur = &power(&t.m, &-&e) * &cur;
            out.push((q, e));
        }
        Some(out)
    }

    pub fn contains(&self, m: &IntMatrix) -> bool {
        self.sift_exponents(m).is_some()
    }

    /// A word for `m` over the table, if `m` lies in the group.
    pub fn sift_word(&self, ctx: &mut Ctx, m: &IntMatrix) -> Option<Elt> {
        let exps = self.sift_exponents(m)?;
        let parts: Vec<Elt> = exps
            .iter()
            .map(|(q, e)| {
                let t = self.table[*q]
                    .clone()
                    .expect("sifted through present pivots");
                ctx.pow(&t, e)
            })
            .collect();
        let w = ctx.product(&parts);
        debug_assert_eq!(&w.m, m);
        Some(w)
    }

    /// Commutator closure until the table is an induced polycyclic sequence.
    pub fn close(&mut self, ctx: &mut Ctx, passes: usize) -> Result<()> {
        for _ in 0..passes {
            let mut changed = false;
            for p in 0..self.pos.len() {
                for q in p + 1..self.pos.len() {
                    let (Some(tp), Some(tq)) = (self.table[p].clone(), self.table[q].clone())
                    else {
                        continue;
                    };
                    let c1 = ctx.comm(&tp, &tq);
                    changed |= self.insert(ctx, c1)?;
                    let ip = ctx.inv(&tp);
                    let c2 = ctx.comm(&ip, &tq);
                    changed |= self.insert(ctx, c2)?;
                }
            }
            if !changed {
                return Ok(());
            }
        }
        Err(Error::BudgetExceeded {
            stage: "commutator closure".into(),
            detail: format!("table still changing after {passes} passes"),
        })
    }

    /// Least `K_q > 0` with `e_q(K_q)` in the group, for every position from
    /// `from` to the end of the chain. Needs a closed table with pivots there.
    pub fn pure_levels(&self, from: usize) -> Result<Vec<(usize, BigInt)>> {
        let fact = factorial(self.n - 1);
        let mut lcm = BigInt::one();
        let mut out = Vec::new();
        for q in (from..self.pos.len()).rev() {
            if self.table[q].is_none() {
                let (i, j) = self.pos[q];
                return Err(Error::InsufficientRank {
                    missing: vec![(i + 1, j + 1)],
                });
            }
            let (i, j) = self.pos[q];
            let elem = |c: &BigInt| {
                let mut e = IntMatrix::identity(self.n);
                e.set(i, j, c.clone());
                e
            };
            // T_q^M with M = (n-1)! lcm(K_later) has e_q(M a) as its pure part
            // and every other factor in the span of the later pure elements.
            let mut c = &fact * &lcm * self.pivot(q);
            if !self.contains(&elem(&c)) {
                return Err(Error::Identity(format!(
                    "pure element at ({}, {}) not reached",
                    i + 1,
                    j + 1
                )));
            }
            for p in prime_factors(&c) {
                while c.is_multiple_of(&p) && self.contains(&elem(&(&c / &p))) {
                    c /= &p;
                }
            }
            lcm = lcm.lcm(&c);
            out.push((q, c));
        }
        out.reverse();
        Ok(out)
    }
}

fn pow_nonzero(ctx: &mut Ctx, x: &Elt, e: &BigInt) -> Option<Elt> {
    (!e.is_zero()).then(|| ctx.pow(x, e))
}
