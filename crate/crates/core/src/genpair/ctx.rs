//! Shared word arena for one pipeline run: every element carries its exact
//! value and a node in a single deduplicating program.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::IntMatrix;
use crate::slp::{pow_big, NodeId, SlpBuilder};

use super::{Frame, WitnessedElement};

#[derive(Clone, Debug)]
pub(crate) struct Elt {
    pub m: IntMatrix,
    pub id: NodeId,
}

pub(crate) struct Ctx {
    pub words: SlpBuilder,
    g: IntMatrix,
    h: IntMatrix,
}

impl Ctx {
    pub fn new(g: IntMatrix, h: IntMatrix) -> Self {
        Ctx {
            words: SlpBuilder::new(),
            g,
            h,
        }
    }

    pub fn g(&mut self) -> Elt {
        Elt {
            m: self.g.clone(),
            id: self.words.gen_g(),
        }
    }

    pub fn h(&mut self) -> Elt {
        Elt {
            m: self.h.clone(),
            id: self.words.gen_h(),
        }
    }

    pub fn identity(&mut self) -> Elt {
        let h = self.words.gen_h();
        Elt {
            m: IntMatrix::identity(self.g.dim()),
            id: self.words.pow(h, 0),
        }
    }

    pub fn mul(&mut self, a: &Elt, b: &Elt) -> Elt {
        Elt {
            m: &a.m * &b.m,
            id: self.words.mul(a.id, b.id),
        }
    }

    pub fn inv(&mut self, a: &Elt) -> Elt {
        Elt {
            m: inverse(&a.m),
            id: self.words.inv(a.id),
        }
    }

    pub fn pow(&mut self, a: &Elt, e: &BigInt) -> Elt {
        if e.is_one() {
            return a.clone();
        }
        Elt {
            m: power(&a.m, e),
            id: self.words.pow(a.id, e.clone()),
        }
    }

    /// `a b a^{-1} b^{-1}`.
    pub fn comm(&mut self, a: &Elt, b: &Elt) -> Elt {
        let m = &(&(&a.m * &b.m) * &inverse(&a.m)) * &inverse(&b.m);
        Elt {
            m,
            id: self.words.comm(a.id, b.id),
        }
    }

    /// `y x y^{-1}`.
    pub fn conj(&mut self, x: &Elt, y: &Elt) -> Elt {
        let m = &(&y.m * &x.m) * &inverse(&y.m);
        Elt {
            m,
            id: self.words.conj(x.id, y.id),
        }
    }

    /// Left-to-right product; the empty product is the identity.
    pub fn product(&mut self, items: &[Elt]) -> Elt {
        let mut it = items.iter();
        let Some(first) = it.next() else {
            return self.identity();
        };
        it.fold(first.clone(), |acc, x| self.mul(&acc, x))
    }

    /// Brings an external witness into the arena after re-evaluating it.
    pub fn import(&mut self, w: &WitnessedElement) -> Result<Elt> {
        let v = w.word.eval(&self.g, &self.h)?;
        if v != w.matrix {
            return Err(Error::Identity(format!(
                "witness word evaluates to {v:?}, claimed {:?}",
                w.matrix
            )));
        }
        Ok(Elt {
            m: v,
            id: self.words.import(&w.word),
        })
    }

    pub fn export(&self, e: &Elt, frame: Frame) -> WitnessedElement {
        WitnessedElement {
            matrix: e.m.clone(),
            word: self.words.extract(e.id),
            frame,
        }
    }
}

/// Inverse of an element of `SL(n, Z)`, with a nilpotent shortcut.
pub(crate) fn inverse(m: &IntMatrix) -> IntMatrix {
    let n = m.dim();
    let id = IntMatrix::identity(n);
    let nil = m - &id;
    if m.is_upper_unitriangular() || m.is_unipotent() {
        // (I + N)^{-1} = sum (-N)^s
        let neg = -&nil;
        let mut term = id.clone();
        let mut acc = id;
        for _ in 1..n {
            term = &term * &neg;
            acc = &acc + &term;
        }
        return acc;
    }
    m.inverse().expect("pipeline elements are unimodular")
}

/// `m^e` for any integer `e`. Unipotent bases use the terminating binomial
/// series, which also covers negative exponents.
pub(crate) fn power(m: &IntMatrix, e: &BigInt) -> IntMatrix {
    let n = m.dim();
    if e.is_zero() {
        return IntMatrix::identity(n);
    }
    if m.is_upper_unitriangular() || m.is_unipotent() {
        let nil = m - &IntMatrix::identity(n);
        let mut acc = IntMatrix::identity(n);
        let mut term = IntMatrix::identity(n);
        let mut coeff = BigInt::one();
        for s in 1..n {
            term = &term * &nil;
            coeff = coeff * (e - BigInt::from(s - 1)) / BigInt::from(s);
            if coeff.is_zero() {
                break;
            }
            acc = &acc + &term.scale(&coeff);
        }
        return acc;
    }
    if e.is_negative() {
        pow_big(&inverse(m), &-e)
    } else {
        pow_big(m, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::elementary;

    #[test]
    fn binomial_power_matches_repeated_product() {
        let x = &(&elementary(4, 0, 1, 2).unwrap() * &elementary(4, 1, 3, -3).unwrap())
            * &elementary(4, 2, 3, 1).unwrap();
        let mut acc = IntMatrix::identity(4);
        for e in 0..7i64 {
            assert_eq!(power(&x, &BigInt::from(e)), acc);
            assert_eq!(&power(&x, &BigInt::from(-e)) * &acc, IntMatrix::identity(4));
            acc = &acc * &x;
        }
    }

    #[test]
    fn general_power_and_inverse() {
        let g = IntMatrix::from_i64_rows(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 0]]).unwrap();
        assert!((&inverse(&g) * &g).is_identity());
        assert_eq!(power(&g, &BigInt::from(3)), &(&g * &g) * &g);
        assert!((&power(&g, &BigInt::from(-2)) * &(&g * &g)).is_identity());
    }
}
