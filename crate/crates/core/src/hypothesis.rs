//! Regularity test for the input matrix.
//!
//! A matrix is regular (cyclic) when its minimal polynomial equals its
//! characteristic polynomial; this is exactly the case in which the
//! characteristic polynomials of the rational canonical form blocks are
//! pairwise coprime. A nonzero discriminant already forces regularity.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{
    char_poly, discriminant, min_poly, parse_rat, rat_to_string, IntMatrix, Poly,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// Squarefree characteristic polynomial; minimal polynomial not computed.
    NonzeroDiscriminant,
    /// Minimal polynomial computed and equal to the characteristic polynomial.
    CyclicMinimalPolynomial,
    /// Minimal polynomial has degree below `n`.
    MinimalPolynomialTooSmall,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub regular: bool,
    pub char_poly: Poly,
    pub min_poly: Poly,
    #[serde(with = "rat_string")]
    pub discriminant: BigRational,
    pub reason: Reason,
}

mod rat_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Gate for the pipeline: `det g = 1` and `n >= 3`.
pub fn ensure_sl(g: &IntMatrix) -> Result<()> {
    if g.dim() < 3 {
        return Err(Error::NotSl(format!("dimension {} < 3", g.dim())));
    }
    let d = g.det();
    if !d.is_one() {
        return Err(Error::NotSl(format!("determinant {d}")));
    }
    Ok(())
}

pub fn check_hypothesis(g: &IntMatrix) -> Result<HypothesisReport> {
    ensure_sl(g)?;
    let cp = char_poly(g);
    let disc = discriminant(&cp)?;
    if !disc.is_zero() {
        return Ok(HypothesisReport {
            regular: true,
            min_poly: cp.clone(),
            char_poly: cp,
            discriminant: disc,
            reason: Reason::NonzeroDiscriminant,
        });
    }
    let mp = min_poly(g);
    let regular = mp.degree() == g.dim();
    Ok(HypothesisReport {
        regular,
        char_poly: cp,
        min_poly: mp,
        discriminant: disc,
        reason: if regular {
            Reason::CyclicMinimalPolynomial
        } else {
            Reason::MinimalPolynomialTooSmall
        },
    })
}
