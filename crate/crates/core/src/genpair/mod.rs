//! The construction pipeline: from a regular `g` and `m` to witnessed
//! elementary matrices at an explicit congruence level.
//!
//! Stages, all in the frame `g' = c^{-1} g c = b p_sigma u` with
//! `T = e_{1,n}(m)`:
//!
//! 1. ladder: last-column elements `y_1 .. y_{n-1}` of `<g', T>`;
//! 2. last-column level `k`: saturation of their coordinate lattice;
//! 3. harvest: conjugation by `g'^{-1}` shifts b-frame pure elements one
//!    step up and left, filling the unitriangular group column by column;
//! 4. saturation: the least `K_q` per position, `k_U = lcm K_q`;
//! 5. endgame: commutators give every `e_{ij}` in the `b^{-1}` frame at
//!    `N0 = k d^2`;
//! 6. transport: `N = N0 delta` undoes the frame change.

mod ctx;
mod endgame;
mod harvest;
mod ladder;
mod unitri;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::bruhat::BruhatData;
use crate::certify::{self, Certificate, VerifyOptions};
use crate::error::{Error, Result};
use crate::exactalg::{dec, elementary, IntMatrix};
use crate::hypothesis::check_hypothesis;
use crate::slp::Slp;

use ctx::Ctx;
use unitri::Ips;

pub use endgame::{
    congruence_level, conjugation_denominator, spot_check_transport, transported_level,
};
pub use harvest::{unipotent_harvest, unipotent_saturate};
pub use ladder::{column_ladder, last_column_level};

/// Whether the claimed normal form of a witnessed element is `x` itself or `b^{-1} x b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Standard,
    BConjugated,
}

/// An exact matrix together with a word over `G -> g'`, `H -> T` evaluating to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessedElement {
    pub matrix: IntMatrix,
    pub word: Slp,
    pub frame: Frame,
}

impl WitnessedElement {
    /// Re-evaluates the word.
    pub fn check(&self, g: &IntMatrix, h: &IntMatrix) -> Result<bool> {
        Ok(self.word.eval(g, h)? == self.matrix)
    }
}

#[derive(Clone, Debug)]
pub struct LadderOutput {
    pub y: Vec<WitnessedElement>,
    /// `t_i`: entry `i` of the last column of `b^{-1} y_i b`.
    pub t: Vec<BigRational>,
}

#[derive(Clone, Debug)]
pub struct LastColumn {
    pub k: BigInt,
    /// `e_{r,n}(k)` for `r = 1..n-1`.
    pub witnesses: Vec<WitnessedElement>,
}

/// Result of the unitriangular saturation; positions are 1-based.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub k_u: BigInt,
    /// Least level `K_q` reached at each position.
    pub levels: Vec<((usize, usize), BigInt)>,
    /// `e_q(k_U)` for each position.
    pub witnesses: PositionedWitnesses,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    #[serde(with = "dec")]
    pub k: BigInt,
    #[serde(with = "dec")]
    pub k_u: BigInt,
    #[serde(with = "dec")]
    pub d: BigInt,
    #[serde(with = "dec")]
    pub n0: BigInt,
    #[serde(with = "dec")]
    pub n: BigInt,
    #[serde(with = "dec")]
    pub delta: BigInt,
}

/// Search limits: harvest sweeps over the open targets, and passes of the
/// pairwise commutator closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub harvest_rounds: usize,
    pub closure_passes: usize,
}

impl Budget {
    pub fn for_dim(n: usize) -> Self {
        Budget {
            harvest_rounds: 4 * n,
            closure_passes: 2 * n * n,
        }
    }
}

/// Intermediate values of one run, kept for inspection.
#[derive(Clone, Debug)]
pub struct Trace {
    pub bruhat: BruhatData,
    pub ladder: LadderOutput,
    pub last_column: LastColumn,
    pub harvested: Vec<WitnessedElement>,
    pub saturation: Saturation,
    pub levels: LevelReport,
}

/// Runs the full pipeline and returns a certificate that has passed
/// [`certify::verify`].
pub fn construct(g: &IntMatrix, m: &BigInt, budget: Option<Budget>) -> Result<Certificate> {
    construct_traced(g, m, budget).map(|(c, _)| c)
}

pub fn construct_traced(
    g: &IntMatrix,
    m: &BigInt,
    budget: Option<Budget>,
) -> Result<(Certificate, Trace)> {
    if !m.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "m must be positive, got {m}"
        )));
    }
    let report = check_hypothesis(g)?;
    if !report.regular {
        return Err(Error::HypothesisFailed);
    }
    let n = g.dim();
    let budget = budget.unwrap_or_else(|| Budget::for_dim(n));
    let bd = BruhatData::from_regular(g)?;
    log::info!("conjugator found; b = {:?}", bd.b);
    let t_gen = elementary(n, 0, n - 1, m.clone())?;
    let mut ctx = Ctx::new(bd.g_prime.clone(), t_gen.clone());

    let (ys, ts) = ladder::ladder_in(&mut ctx, &bd, m)?;
    let (k, last) = ladder::last_column_in(&mut ctx, &ys)?;
    log::info!("last-column level k = {k}");

    let mut ips = Ips::new(n);
    for e in ys.iter().chain(&last) {
        ips.insert(&mut ctx, e.clone())?;
    }
    let admitted = harvest::harvest_in(&mut ctx, &bd, &mut ips, &budget)?;
    let mut pool: Vec<_> = ys.iter().chain(&last).cloned().collect();
    pool.extend(admitted.iter().cloned());
    let sat = harvest::saturate_in(&mut ctx, n, &pool, &budget)?;
    log::info!("unitriangular level k_U = {}", sat.k_u);

    let kappa_elt = last[n - 2].clone();
    let eg = endgame::endgame_in(&mut ctx, &bd, &kappa_elt, &k, &sat.k_u, &sat.pure)?;
    let levels = congruence_level(&k, &sat.k_u, &eg.d, &bd.b)?;
    spot_check_transport(&levels, &bd, 16, 0x5eed)?;
    log::info!(
        "levels: N0 = {}, delta = {}, N = {}",
        levels.n0,
        levels.delta,
        levels.n
    );

    let h = &(&bd.c * &t_gen) * &bd.c.inverse()?;
    if !h.is_unipotent() {
        return Err(Error::Identity("h is not unipotent".into()));
    }
    let witnesses = eg
        .witnesses
        .iter()
        .map(|((i, j), e)| (i + 1, j + 1, ctx.words.extract(e.id)))
        .collect();
    let cert = Certificate::new(
        g.clone(),
        m.clone(),
        h,
        &bd,
        levels.clone(),
        witnesses,
        budget,
        report,
    );
    let verdict = certify::verify(&cert, &VerifyOptions::default());
    if !verdict.passed {
        return Err(Error::Identity(format!(
            "emitted certificate failed verification: {}",
            verdict.verdict
        )));
    }

    let export = |e: &ctx::Elt, f| ctx.export(e, f);
    let trace = Trace {
        ladder: LadderOutput {
            y: ys.iter().map(|y| export(y, Frame::BConjugated)).collect(),
            t: ts,
        },
        last_column: LastColumn {
            k,
            witnesses: last.iter().map(|e| export(e, Frame::Standard)).collect(),
        },
        harvested: admitted
            .iter()
            .map(|e| export(e, Frame::Standard))
            .collect(),
        saturation: Saturation {
            k_u: sat.k_u.clone(),
            levels: sat
                .levels
                .iter()
                .map(|((i, j), k)| ((i + 1, j + 1), k.clone()))
                .collect(),
            witnesses: sat
                .pure
                .iter()
                .map(|((i, j), e)| ((i + 1, j + 1), export(e, Frame::Standard)))
                .collect(),
        },
        bruhat: bd,
        levels,
    };
    Ok((cert, trace))
}

/// Witnesses keyed by 1-based position.
pub type PositionedWitnesses = Vec<((usize, usize), WitnessedElement)>;

/// Endgame on explicit inputs: `kappa_witness` is `e_{n-1,n}(kappa)` and
/// `pure` holds `e_{ij}(k_U)` (1-based positions) for every `i < j`.
/// Returns `(d, N0, witnesses)` with `b^{-1} w b = e_{ij}(N0)`.
pub fn endgame(
    bd: &BruhatData,
    m: &BigInt,
    kappa: &BigInt,
    kappa_witness: &WitnessedElement,
    k_u: &BigInt,
    pure: &[((usize, usize), WitnessedElement)],
) -> Result<(BigInt, BigInt, PositionedWitnesses)> {
    let n = bd.n();
    let mut ctx = Ctx::new(bd.g_prime.clone(), elementary(n, 0, n - 1, m.clone())?);
    let ke = ctx.import(kappa_witness)?;
    let pure = pure
        .iter()
        .map(|((i, j), w)| Ok(((i - 1, j - 1), ctx.import(w)?)))
        .collect::<Result<Vec<_>>>()?;
    let eg = endgame::endgame_in(&mut ctx, bd, &ke, kappa, k_u, &pure)?;
    let ws = eg
        .witnesses
        .iter()
        .map(|((i, j), e)| ((i + 1, j + 1), ctx.export(e, Frame::BConjugated)))
        .collect();
    Ok((eg.d, eg.n0, ws))
}
