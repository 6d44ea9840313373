//! Deterministic random elements of `SL(n, Z)`.
//!
//! `random_sl(n, steps, seed)` multiplies `steps` elementary matrices drawn
//! from `ChaCha8Rng::seed_from_u64(seed)`: per step the row `i` is uniform
//! in `0..n`, the column uniform among the other `n - 1` indices, and the
//! parameter uniform in `{-2, -1, 1, 2}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactalg::{elementary, IntMatrix};

const PARAMETERS: [i64; 4] = [-2, -1, 1, 2];

pub fn random_sl(n: usize, steps: usize, seed: u64) -> Result<IntMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension {n} < 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = IntMatrix::identity(n);
    for _ in 0..steps {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let t = PARAMETERS[rng.random_range(0..PARAMETERS.len())];
        acc = &acc * &elementary(n, i, j, t)?;
    }
    Ok(acc)
}
