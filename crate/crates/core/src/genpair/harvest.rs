//! Filling the unitriangular group column by column, then measuring the
//! level at which every elementary position is reached.
//!
//! For a target `(i', j')` with `j' < n - 1` the source is the b-frame pure
//! element `X = b e_{i'+1,j'+1}(tau) b^{-1}` (integral by choice of `tau`).
//! Once the tail of `X` is known to the table, some power `X^e` sifts, and
//! `g'^{-1} X^e g' = u^{-1} e_{i',j'}(e tau) u` is an integral unitriangular
//! element led by the target position.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bruhat::BruhatData;
use crate::error::{Error, Result};
use crate::exactalg::{elementary, unit_rat, IntMatrix, RatMatrix};

use super::ctx::{power, Ctx, Elt};
use super::unitri::{factorial, prime_factors, Ips};
use super::{Budget, Frame, Saturation, WitnessedElement};

/// Positive rational `r` with `m / r` a primitive integral matrix.
pub(crate) fn content(m: &RatMatrix) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for x in m.entries() {
        if !x.is_zero() {
            num = num.gcd(x.numer());
            den = den.lcm(x.denom());
        }
    }
    BigRational::new(num, den)
}

/// `b E_{ij} b^{-1}`.
pub(crate) fn b_conjugate_unit(bd: &BruhatData, i: usize, j: usize) -> RatMatrix {
    conj_unit(&bd.b, &bd.b_inv(), i, j)
}

pub(crate) fn conj_unit(b: &RatMatrix, b_inv: &RatMatrix, i: usize, j: usize) -> RatMatrix {
    &(b * &unit_rat(b.dim(), i, j)) * b_inv
}

fn harvest_targets(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in (1..n - 1).rev() {
        for i in 0..j {
            out.push((i, j));
        }
    }
    out
}

fn one_based(ps: &[(usize, usize)]) -> Vec<(usize, usize)> {
    ps.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
}

/// Admitted elements, in order. The table must already hold the last column.
pub(crate) fn harvest_in(
    ctx: &mut Ctx,
    bd: &BruhatData,
    ips: &mut Ips,
    budget: &Budget,
) -> Result<Vec<Elt>> {
    let n = bd.n();
    ips.close(ctx, budget.closure_passes)?;
    let g = ctx.g();
    let g_inv = ctx.inv(&g);
    let targets = harvest_targets(n);
    let mut admitted = Vec::new();
    for round in 0..budget.harvest_rounds {
        let open: Vec<(usize, usize)> = targets
            .iter()
            .copied()
            .filter(|&(i, j)| !ips.has(ips.index_of(i, j)))
            .collect();
        if open.is_empty() {
            return Ok(admitted);
        }
        log::debug!("harvest round {round}: open targets {:?}", one_based(&open));
        for (ti, tj) in open {
            let qt = ips.index_of(ti, tj);
            if ips.has(qt) {
                continue;
            }
            let qs = ips.index_of(ti + 1, tj + 1);
            let Ok(levels) = ips.pure_levels(qs) else {
                continue;
            };
            let tail = levels.iter().fold(BigInt::one(), |acc, (_, k)| acc.lcm(k));
            let unit = b_conjugate_unit(bd, ti + 1, tj + 1);
            let tau = content(&unit).recip();
            let x = (&RatMatrix::identity(n) + &unit.scale(&tau))
                .to_int()
                .expect("tau clears denominators");
            let mut e = factorial(n - 1) * tail;
            if !ips.contains(&power(&x, &e)) {
                return Err(Error::Identity(format!(
                    "power of harvest source for ({}, {}) does not sift",
                    ti + 1,
                    tj + 1
                )));
            }
            for p in prime_factors(&e) {
                while e.is_multiple_of(&p) && ips.contains(&power(&x, &(&e / &p))) {
                    e /= &p;
                }
            }
            let w = ips
                .sift_word(ctx, &power(&x, &e))
                .expect("membership established");
            let z = ctx.conj(&w, &g_inv);
            if !admissible(&z.m, ti, tj) {
                log::debug!("discarded harvest candidate for ({}, {})", ti + 1, tj + 1);
                continue;
            }
            ips.insert(ctx, z.clone())?;
            ips.close(ctx, budget.closure_passes)?;
            admitted.push(z);
        }
    }
    let open: Vec<(usize, usize)> = targets
        .into_iter()
        .filter(|&(i, j)| !ips.has(ips.index_of(i, j)))
        .collect();
    if open.is_empty() {
        return Ok(admitted);
    }
    Err(Error::BudgetExceeded {
        stage: "harvest".into(),
        detail: format!("missing superdiagonal positions {:?}", one_based(&open)),
    })
}

/// Integral, upper unitriangular, and led by `(i, j)` in chain order.
fn admissible(z: &IntMatrix, i: usize, j: usize) -> bool {
    if !z.is_upper_unitriangular() {
        return false;
    }
    let ips = Ips::new(z.dim());
    let lead = ips
        .positions()
        .iter()
        .position(|&(r, s)| !z.get(r, s).is_zero());
    lead == Some(ips.index_of(i, j))
}

/// Grows the seed set (last-column witnesses at level `k`) into a set of
/// integral unitriangular elements with a pivot at every position.
pub fn unipotent_harvest(
    bd: &BruhatData,
    m: &BigInt,
    seeds: &[WitnessedElement],
    budget: &Budget,
) -> Result<Vec<WitnessedElement>> {
    let n = bd.n();
    let mut ctx = Ctx::new(bd.g_prime.clone(), elementary(n, 0, n - 1, m.clone())?);
    let mut ips = Ips::new(n);
    let mut out = Vec::new();
    for s in seeds {
        let e = ctx.import(s)?;
        ips.insert(&mut ctx, e.clone())?;
        out.push(e);
    }
    out.extend(harvest_in(&mut ctx, bd, &mut ips, budget)?);
    Ok(out.iter().map(|e| ctx.export(e, Frame::Standard)).collect())
}

pub(crate) struct SatInternal {
    pub k_u: BigInt,
    pub levels: Vec<((usize, usize), BigInt)>,
    pub pure: Vec<((usize, usize), Elt)>,
}

pub(crate) fn saturate_in(
    ctx: &mut Ctx,
    n: usize,
    elems: &[Elt],
    budget: &Budget,
) -> Result<SatInternal> {
    if elems.is_empty() {
        return Err(Error::InvalidArgument("empty generating set".into()));
    }
    let mut ips = Ips::new(n);
    for e in elems {
        ips.insert(ctx, e.clone())?;
    }
    ips.close(ctx, budget.closure_passes)?;
    let missing = ips.missing();
    if !missing.is_empty() {
        return Err(Error::InsufficientRank {
            missing: one_based(&missing),
        });
    }
    let levels = ips.pure_levels(0)?;
    let k_u = levels.iter().fold(BigInt::one(), |acc, (_, k)| acc.lcm(k));
    let mut pure = Vec::with_capacity(levels.len());
    for &(q, _) in &levels {
        let (i, j) = ips.positions()[q];
        let target = elementary(n, i, j, k_u.clone())?;
        let w = ips
            .sift_word(ctx, &target)
            .ok_or_else(|| Error::Identity(format!("e({}, {}) at k_U", i + 1, j + 1)))?;
        pure.push(((i, j), w));
    }
    let levels = levels
        .into_iter()
        .map(|(q, k)| (ips.positions()[q], k))
        .collect();
    Ok(SatInternal { k_u, levels, pure })
}

/// Decides whether `<S>` has finite index in the integral unitriangular
/// group. Words in `S` are over generators valued `g`, `h`.
pub fn unipotent_saturate(
    g: &IntMatrix,
    h: &IntMatrix,
    s: &[WitnessedElement],
    budget: &Budget,
) -> Result<Saturation> {
    let n = g.dim();
    let mut ctx = Ctx::new(g.clone(), h.clone());
    let elems = s
        .iter()
        .map(|w| ctx.import(w))
        .collect::<Result<Vec<_>>>()?;
    let sat = saturate_in(&mut ctx, n, &elems, budget)?;
    Ok(Saturation {
        k_u: sat.k_u,
        levels: sat
            .levels
            .into_iter()
            .map(|((i, j), k)| ((i + 1, j + 1), k))
            .collect(),
        witnesses: sat
            .pure
            .iter()
            .map(|((i, j), e)| ((i + 1, j + 1), ctx.export(e, Frame::Standard)))
            .collect(),
    })
}
