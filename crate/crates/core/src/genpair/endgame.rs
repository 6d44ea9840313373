//! From the full unitriangular group at level `k_U` to every elementary
//! position, in the `b^{-1}` frame, at one uniform level `N0 = kappa d^2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bruhat::BruhatData;
use crate::error::{Error, Result};
use crate::exactalg::{elementary, IntMatrix, RatMatrix};

use super::ctx::{Ctx, Elt};
use super::harvest::{b_conjugate_unit, conj_unit, content};
use super::LevelReport;

pub(crate) struct EndgameInternal {
    pub d: BigInt,
    pub n0: BigInt,
    pub witnesses: Vec<((usize, usize), Elt)>,
}

/// Least `d > 0` with `b e_{ij}(d) b^{-1}` congruent to `I` mod `k_U` for all `i < j`.
pub fn transported_level(b: &RatMatrix, k_u: &BigInt) -> Result<BigInt> {
    let n = b.dim();
    let b_inv = b.inverse()?;
    let mut d = BigInt::one();
    for j in 1..n {
        for i in 0..j {
            let r = content(&conj_unit(b, &b_inv, i, j));
            let qk = r.denom() * k_u;
            let dij = &qk / qk.gcd(r.numer());
            d = d.lcm(&dij);
        }
    }
    Ok(d)
}

/// `lcm` of all denominators of `b^{-1} E_{ij} b`, diagonal included.
pub fn conjugation_denominator(b: &RatMatrix) -> Result<BigInt> {
    let n = b.dim();
    let b_inv = b.inverse()?;
    let mut delta = BigInt::one();
    for i in 0..n {
        for j in 0..n {
            let x = conj_unit(&b_inv, b, i, j);
            delta = delta.lcm(&x.denominator_lcm());
        }
    }
    Ok(delta)
}

/// Parameter `t` if `b^{-1} x b = e_{ij}(t)`.
fn frame_parameter(bd: &BruhatData, x: &IntMatrix, i: usize, j: usize) -> Option<BigInt> {
    let n = bd.n();
    let y = &(&bd.b_inv() * &x.to_rat()) * &bd.b;
    let t = y.get(i, j).clone();
    if !t.is_integer() {
        return None;
    }
    let mut e = RatMatrix::identity(n);
    e.set(i, j, t.clone());
    (e == y).then(|| t.to_integer())
}

fn expect_frame(bd: &BruhatData, x: &Elt, i: usize, j: usize, what: &str) -> Result<BigInt> {
    frame_parameter(bd, &x.m, i, j)
        .filter(|t| !t.is_zero())
        .ok_or_else(|| {
            Error::Identity(format!(
                "{what} at ({}, {}) is not elementary in the b frame",
                i + 1,
                j + 1
            ))
        })
}

pub(crate) fn endgame_in(
    ctx: &mut Ctx,
    bd: &BruhatData,
    kappa_elt: &Elt,
    kappa: &BigInt,
    k_u: &BigInt,
    pure: &[((usize, usize), Elt)],
) -> Result<EndgameInternal> {
    let n = bd.n();
    if kappa_elt.m != elementary(n, n - 2, n - 1, kappa.clone())? {
        return Err(Error::Identity(
            "kappa witness is not e_{n-1,n}(kappa)".into(),
        ));
    }
    let g = ctx.g();
    let w = ctx.conj(kappa_elt, &g);
    let sign = if n % 2 == 1 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    if expect_frame(bd, &w, n - 1, 0, "conjugated last-column element")? != &sign * kappa {
        return Err(Error::Identity(
            "g' e_{n-1,n}(kappa) g'^{-1} has the wrong parameter".into(),
        ));
    }

    let d = transported_level(&bd.b, k_u)?;
    let pure_at = |i: usize, j: usize| {
        pure.iter()
            .find(|(p, _)| *p == (i, j))
            .map(|(_, e)| e.clone())
    };
    let mut upper = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let target = &(&RatMatrix::identity(n)
                + &b_conjugate_unit(bd, i, j).scale(&BigRational::from_integer(d.clone())))
                .to_int()
                .ok_or_else(|| Error::Identity("transported level leaves denominators".into()))?;
            // Column-descending factorisation into pure elementaries at level k_U.
            let mut parts = Vec::new();
            for s in (1..n).rev() {
                for r in 0..s {
                    let a = target.get(r, s);
                    if a.is_zero() {
                        continue;
                    }
                    if !a.is_multiple_of(k_u) {
                        return Err(Error::Identity(format!(
                            "entry ({}, {}) not divisible by k_U",
                            r + 1,
                            s + 1
                        )));
                    }
                    let p = pure_at(r, s)
                        .ok_or_else(|| Error::Identity("missing pure witness".into()))?;
                    parts.push(ctx.pow(&p, &(a / k_u)));
                }
            }
            let x = ctx.product(&parts);
            if &x.m != target {
                return Err(Error::Identity(format!(
                    "factorisation of transported ({}, {}) failed",
                    i + 1,
                    j + 1
                )));
            }
            expect_frame(bd, &x, i, j, "transported unipotent")?;
            upper[i][j] = Some(x);
        }
    }
    let up = |i: usize, j: usize| upper[i][j].clone().expect("all upper positions built");

    let mut raw: Vec<((usize, usize), Elt)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            raw.push(((i, j), up(i, j)));
        }
    }
    raw.push(((n - 1, 0), w.clone()));
    let mut first_col = vec![None; n];
    for (i, slot) in first_col.iter_mut().enumerate().take(n - 1).skip(1) {
        let x = ctx.comm(&up(i, n - 1), &w);
        *slot = Some(x.clone());
        raw.push(((i, 0), x));
    }
    for j in 1..n - 1 {
        let x = ctx.comm(&w, &up(0, j));
        raw.push(((n - 1, j), x));
    }
    for i in 2..n - 1 {
        for j in 1..i {
            let f = first_col[i].clone().expect("first column built");
            let x = ctx.comm(&f, &up(0, j));
            raw.push(((i, j), x));
        }
    }

    let n0 = kappa * &d * &d;
    let mut witnesses = Vec::with_capacity(n * (n - 1));
    for ((i, j), x) in raw {
        let t = expect_frame(bd, &x, i, j, "endgame element")?;
        if !n0.is_multiple_of(&t) {
            return Err(Error::Identity(format!(
                "level {t} at ({}, {}) does not divide N0",
                i + 1,
                j + 1
            )));
        }
        let y = ctx.pow(&x, &(&n0 / &t));
        if expect_frame(bd, &y, i, j, "normalised element")? != n0 {
            return Err(Error::Identity(format!(
                "normalisation at ({}, {}) failed",
                i + 1,
                j + 1
            )));
        }
        witnesses.push(((i, j), y));
    }
    witnesses.sort_by_key(|(p, _)| *p);
    Ok(EndgameInternal { d, n0, witnesses })
}

/// `N = N0 delta` with `N0 = k d^2`.
pub fn congruence_level(
    k: &BigInt,
    k_u: &BigInt,
    d: &BigInt,
    b: &RatMatrix,
) -> Result<LevelReport> {
    let n0 = k * d * d;
    let delta = conjugation_denominator(b)?;
    let n = &n0 * &delta;
    Ok(LevelReport {
        k: k.clone(),
        k_u: k_u.clone(),
        d: d.clone(),
        n0,
        n,
        delta,
    })
}

/// Checks `b^{-1} X b` is integral and congruent to `I` mod `N0` for random
/// products `X` of elementary matrices at level `N`.
pub fn spot_check_transport(
    levels: &LevelReport,
    bd: &BruhatData,
    samples: usize,
    seed: u64,
) -> Result<()> {
    let n = bd.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b_inv = bd.b_inv();
    for _ in 0..samples {
        let mut x = IntMatrix::identity(n);
        for _ in 0..2 * n {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let t: i64 = rng.random_range(-3..=3);
            x = &x * &elementary(n, i, j, &levels.n * BigInt::from(t))?;
        }
        let y = &(&b_inv * &x.to_rat()) * &bd.b;
        let id = RatMatrix::identity(n);
        let diff = &y - &id;
        let ok = diff
            .entries()
            .iter()
            .all(|v| v.is_integer() && v.to_integer().is_multiple_of(&levels.n0));
        if !ok {
            return Err(Error::Identity(format!(
                "b^-1 X b not in Gamma(N0) for X = {x:?}"
            )));
        }
    }
    Ok(())
}
