//! Last-column ladder: `y_1 = T`, `y_i = [g' y_{i-1} g'^{-1}, y_1]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bruhat::BruhatData;
use crate::error::{Error, Result};
use crate::exactalg::{elementary, hnf, saturation_exponent, IntMatrix};

use super::ctx::{Ctx, Elt};
use super::{Frame, LadderOutput, LastColumn, WitnessedElement};

/// `b^{-1} y b` is supported in the last column, rows `0..=row`, and its
/// entry at `row` is the returned parameter.
fn b_frame_parameter(bd: &BruhatData, y: &IntMatrix, row: usize) -> Result<BigRational> {
    let n = bd.n();
    let yb = &(&bd.b_inv() * &y.to_rat()) * &bd.b;
    for r in 0..n {
        for s in 0..n {
            let v = yb.get(r, s);
            let expected_zero = if r == s {
                false
            } else {
                !(s == n - 1 && r <= row)
            };
            if (r == s && v != &BigRational::from_integer(1.into()))
                || (expected_zero && !v.is_zero())
            {
                return Err(Error::Identity(format!(
                    "ladder element {} has unexpected b-frame shape {yb:?}",
                    row + 1
                )));
            }
        }
    }
    Ok(yb.get(row, n - 1).clone())
}

pub(crate) fn ladder_in(
    ctx: &mut Ctx,
    bd: &BruhatData,
    m: &BigInt,
) -> Result<(Vec<Elt>, Vec<BigRational>)> {
    let n = bd.n();
    let g = ctx.g();
    let y1 = ctx.h();
    if y1.m != elementary(n, 0, n - 1, m.clone())? {
        return Err(Error::Identity("second generator is not e_{1,n}(m)".into()));
    }
    let mut ys = vec![y1.clone()];
    let mut ts = Vec::with_capacity(n - 1);
    for row in 0..n - 1 {
        if row > 0 {
            let shifted = ctx.conj(&ys[row - 1], &g);
            let y = ctx.comm(&shifted, &y1);
            ys.push(y);
        }
        let t = b_frame_parameter(bd, &ys[row].m, row)?;
        if t.is_zero() {
            return Err(Error::DegenerateLadder(row + 1));
        }
        ts.push(t);
    }
    Ok((ys, ts))
}

/// Builds the ladder for `T = e_{1,n}(m)`. Each `y_i` satisfies
/// `b^{-1} y_i b = e_{i,n}(t_i) * (terms above row i in the last column)`.
pub fn column_ladder(bd: &BruhatData, m: &BigInt) -> Result<LadderOutput> {
    let mut ctx = Ctx::new(
        bd.g_prime.clone(),
        elementary(bd.n(), 0, bd.n() - 1, m.clone())?,
    );
    let (ys, t) = ladder_in(&mut ctx, bd, m)?;
    Ok(LadderOutput {
        y: ys
            .iter()
            .map(|y| ctx.export(y, Frame::BConjugated))
            .collect(),
        t,
    })
}

pub(crate) fn last_column_in(ctx: &mut Ctx, ys: &[Elt]) -> Result<(BigInt, Vec<Elt>)> {
    let n = ys[0].m.dim();
    let vecs: Vec<Vec<BigInt>> = ys
        .iter()
        .map(|y| (0..n - 1).map(|r| y.m.get(r, n - 1).clone()).collect())
        .collect();
    let lattice = hnf(n - 1, &vecs);
    let (k, coeffs) = saturation_exponent(&lattice)?;
    let mut out = Vec::with_capacity(n - 1);
    for (r, co) in coeffs.iter().enumerate() {
        let parts: Vec<Elt> = ys
            .iter()
            .zip(co)
            .filter(|(_, c)| !c.is_zero())
            .map(|(y, c)| ctx.pow(y, c))
            .collect();
        let e = ctx.product(&parts);
        if e.m != elementary(n, r, n - 1, k.clone())? {
            return Err(Error::Identity(format!(
                "last-column witness for row {} is {:?}",
                r + 1,
                e.m
            )));
        }
        out.push(e);
    }
    Ok((k, out))
}

/// Saturation exponent `k` of the ladder's last-column lattice and
/// witnesses for `e_{r,n}(k)`, `r = 1..n-1`.
pub fn last_column_level(bd: &BruhatData, m: &BigInt, ladder: &LadderOutput) -> Result<LastColumn> {
    let mut ctx = Ctx::new(
        bd.g_prime.clone(),
        elementary(bd.n(), 0, bd.n() - 1, m.clone())?,
    );
    let ys = ladder
        .y
        .iter()
        .map(|y| ctx.import(y))
        .collect::<Result<Vec<_>>>()?;
    let (k, es) = last_column_in(&mut ctx, &ys)?;
    let witnesses: Vec<WitnessedElement> =
        es.iter().map(|e| ctx.export(e, Frame::Standard)).collect();
    Ok(LastColumn { k, witnesses })
}
