//! Certificate format and independent verification.
//!
//! A certificate claims `Gamma(N) <= <g, h>`. Everything except the cited
//! generation theorem for congruence subgroups is re-checked here with exact
//! arithmetic, from the stored fields alone.

pub mod finite;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bruhat::p_sigma;
use crate::error::Result;
use crate::exactalg::{dec, elementary, rat_to_string, IntMatrix, RatMatrix};
use crate::genpair::{conjugation_denominator, transported_level, Budget, LevelReport};
use crate::hypothesis::HypothesisReport;
use crate::slp::Slp;
use crate::BruhatData;

pub use finite::{index_mod_n, mod_p_image, sl_order, ModPReport};

pub const SCHEMA_VERSION: u32 = 1;

/// The one external theorem the certificate relies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axiom {
    pub name: String,
    pub statement: String,
    pub use_in_certificate: String,
    pub open_question: String,
}

impl Axiom {
    pub fn bass_lazard_serre() -> Self {
        Axiom {
            name: "Bass-Lazard-Serre".into(),
            statement: "For n >= 3 and every m >= 1, the subgroup of SL(n, Z) generated by the elementary \
                        matrices e_ij(m), i != j, is the principal congruence subgroup Gamma(m)."
                .into(),
            use_in_certificate: "Applied with m = N0 in the b^{-1} frame: the witnessed e_ij(N0) generate \
                                 Gamma(N0) inside b^{-1} <g', T> b."
                .into(),
            open_question: "Stated here as an equality of groups. The classical form concerns the normal \
                            closure of these matrices in SL(n, Z); only the containment of Gamma(m) in the \
                            generated group is used, and whether it holds as stated is left open."
                .into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub budget: Budget,
    pub hypothesis: HypothesisReport,
}

/// Word for the `b^{-1}`-frame elementary `e_{ij}(N0)`; positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub word: Slp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub n: usize,
    #[serde(with = "dec")]
    pub m: BigInt,
    pub g: IntMatrix,
    pub h: IntMatrix,
    pub c: IntMatrix,
    pub b: RatMatrix,
    pub u: RatMatrix,
    pub levels: LevelReport,
    pub witnesses: Vec<Witness>,
    pub axiom: Axiom,
    pub metadata: Metadata,
}

impl Certificate {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        g: IntMatrix,
        m: BigInt,
        h: IntMatrix,
        bd: &BruhatData,
        levels: LevelReport,
        witnesses: Vec<(usize, usize, Slp)>,
        budget: Budget,
        hypothesis: HypothesisReport,
    ) -> Self {
        Certificate {
            schema_version: SCHEMA_VERSION,
            n: g.dim(),
            m,
            g,
            h,
            c: bd.c.clone(),
            b: bd.b.clone(),
            u: bd.u.clone(),
            levels,
            witnesses: witnesses
                .into_iter()
                .map(|(i, j, word)| Witness { i, j, word })
                .collect(),
            axiom: Axiom::bass_lazard_serre(),
            metadata: Metadata {
                tool_version: env!("CARGO_PKG_VERSION").into(),
                budget,
                hypothesis,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| crate::Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub parallel: bool,
    /// Primes for the optional surjectivity check modulo `p`.
    pub primes: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// 1-based position the failure refers to, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<Vec<String>>>,
}

impl CheckResult {
    fn pass(id: u8, name: &str) -> Self {
        CheckResult {
            id,
            name: name.into(),
            passed: true,
            detail: None,
            position: None,
            counterexample: None,
        }
    }

    fn fail(id: u8, name: &str, detail: impl Into<String>) -> Self {
        CheckResult {
            passed: false,
            detail: Some(detail.into()),
            ..Self::pass(id, name)
        }
    }

    fn with_matrix(mut self, rows: Vec<Vec<String>>) -> Self {
        self.counterexample = Some(rows);
        self
    }

    fn at(mut self, pos: (usize, usize)) -> Self {
        self.position = Some(pos);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub verdict: String,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mod_p: Vec<ModPReport>,
}

impl VerifyReport {
    pub fn failed_checks(&self) -> Vec<u8> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.id)
            .collect()
    }
}

fn int_rows(m: &IntMatrix) -> Vec<Vec<String>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

fn rat_rows(m: &RatMatrix) -> Vec<Vec<String>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(rat_to_string).collect())
        .collect()
}

fn shapes_ok(cert: &Certificate) -> bool {
    let n = cert.n;
    n >= 3
        && [
            cert.g.dim(),
            cert.h.dim(),
            cert.c.dim(),
            cert.b.dim(),
            cert.u.dim(),
        ]
        .iter()
        .all(|&d| d == n)
}

/// `c^{-1} g c`, when `c` is unimodular.
fn frame_matrix(cert: &Certificate) -> Option<IntMatrix> {
    let c_inv = cert.c.inverse().ok()?;
    Some(&(&c_inv * &cert.g) * &cert.c)
}

fn check_determinants(cert: &Certificate) -> CheckResult {
    const NAME: &str = "det g = det c = 1";
    if !shapes_ok(cert) {
        return CheckResult::fail(1, NAME, "matrix dimensions disagree with n (or n < 3)");
    }
    for (label, m) in [("g", &cert.g), ("c", &cert.c)] {
        let d = m.det();
        if !d.is_one() {
            return CheckResult::fail(1, NAME, format!("det {label} = {d}"))
                .with_matrix(int_rows(m));
        }
    }
    CheckResult::pass(1, NAME)
}

fn check_bruhat(cert: &Certificate) -> CheckResult {
    const NAME: &str = "c^-1 g c = b p_sigma u";
    let n = cert.n;
    if !shapes_ok(cert) {
        return CheckResult::fail(2, NAME, "dimension mismatch");
    }
    if !cert.b.is_upper_triangular() || (0..n).any(|i| cert.b.get(i, i).is_zero()) {
        return CheckResult::fail(2, NAME, "b is not invertible upper triangular")
            .with_matrix(rat_rows(&cert.b));
    }
    let u_ok = (0..n).all(|r| {
        (0..n).all(|s| {
            let v = cert.u.get(r, s);
            if r == s {
                v.is_one()
            } else {
                s == n - 1 || v.is_zero()
            }
        })
    }) && cert.u.get(n - 1, n - 1).is_one();
    if !u_ok {
        return CheckResult::fail(
            2,
            NAME,
            "u - I is not supported in the last column above the diagonal",
        )
        .with_matrix(rat_rows(&cert.u));
    }
    let Some(gp) = frame_matrix(cert) else {
        return CheckResult::fail(2, NAME, "c is not invertible over Z")
            .with_matrix(int_rows(&cert.c));
    };
    let rhs = &(&cert.b * &p_sigma(n).to_rat()) * &cert.u;
    if gp.to_rat() != rhs {
        return CheckResult::fail(
            2,
            NAME,
            "frame identity fails; counterexample is c^-1 g c - b p_sigma u",
        )
        .with_matrix(rat_rows(&(&gp.to_rat() - &rhs)));
    }
    CheckResult::pass(2, NAME)
}

fn check_h(cert: &Certificate) -> CheckResult {
    const NAME: &str = "h = c e_1n(m) c^-1, unipotent";
    let n = cert.n;
    if !shapes_ok(cert) || !cert.m.is_positive() {
        return CheckResult::fail(3, NAME, "bad dimension or non-positive m");
    }
    let Ok(c_inv) = cert.c.inverse() else {
        return CheckResult::fail(3, NAME, "c is not invertible over Z");
    };
    let t = elementary(n, 0, n - 1, cert.m.clone()).expect("valid position");
    let expected = &(&cert.c * &t) * &c_inv;
    if expected != cert.h {
        return CheckResult::fail(
            3,
            NAME,
            "h differs from c e_1n(m) c^-1; counterexample is the expected h",
        )
        .with_matrix(int_rows(&expected));
    }
    if !cert.h.is_unipotent() {
        return CheckResult::fail(3, NAME, "(h - I)^n != 0").with_matrix(int_rows(&cert.h));
    }
    CheckResult::pass(3, NAME)
}

fn check_one_witness(
    cert: &Certificate,
    gp: &IntMatrix,
    t: &IntMatrix,
    b_inv: &RatMatrix,
    w: &Witness,
) -> CheckResult {
    const NAME: &str = "b^-1 eval(w) b = e_ij(N0)";
    let n = cert.n;
    let pos = (w.i, w.j);
    if w.i == 0 || w.j == 0 || w.i > n || w.j > n || w.i == w.j {
        return CheckResult::fail(4, NAME, "invalid position").at(pos);
    }
    let x = match w.word.eval(gp, t) {
        Ok(x) => x,
        Err(e) => return CheckResult::fail(4, NAME, format!("evaluation failed: {e}")).at(pos),
    };
    let y = &(b_inv * &x.to_rat()) * &cert.b;
    let mut target = RatMatrix::identity(n);
    target.set(
        w.i - 1,
        w.j - 1,
        BigRational::from_integer(cert.levels.n0.clone()),
    );
    if y != target {
        return CheckResult::fail(
            4,
            NAME,
            format!(
                "witness at ({}, {}) evaluates to the wrong element",
                w.i, w.j
            ),
        )
        .at(pos)
        .with_matrix(rat_rows(&y));
    }
    CheckResult::pass(4, NAME)
}

fn check_witnesses(cert: &Certificate, parallel: bool) -> CheckResult {
    const NAME: &str = "b^-1 eval(w) b = e_ij(N0)";
    if !shapes_ok(cert) {
        return CheckResult::fail(4, NAME, "dimension mismatch");
    }
    let Some(gp) = frame_matrix(cert) else {
        return CheckResult::fail(4, NAME, "c is not invertible over Z");
    };
    let Ok(b_inv) = cert.b.inverse() else {
        return CheckResult::fail(4, NAME, "b is singular");
    };
    let Ok(t) = elementary(cert.n, 0, cert.n - 1, cert.m.clone()) else {
        return CheckResult::fail(4, NAME, "bad m");
    };
    let results: Vec<CheckResult> = if parallel {
        cert.witnesses
            .par_iter()
            .map(|w| check_one_witness(cert, &gp, &t, &b_inv, w))
            .collect()
    } else {
        cert.witnesses
            .iter()
            .map(|w| check_one_witness(cert, &gp, &t, &b_inv, w))
            .collect()
    };
    results
        .into_iter()
        .find(|r| !r.passed)
        .unwrap_or_else(|| CheckResult::pass(4, NAME))
}

fn check_coverage(cert: &Certificate) -> CheckResult {
    const NAME: &str = "all n^2 - n positions witnessed";
    let n = cert.n;
    let mut seen = vec![vec![false; n + 1]; n + 1];
    for w in &cert.witnesses {
        if w.i == 0 || w.j == 0 || w.i > n || w.j > n || w.i == w.j {
            return CheckResult::fail(5, NAME, "invalid position").at((w.i, w.j));
        }
        if seen[w.i][w.j] {
            return CheckResult::fail(5, NAME, "duplicate position").at((w.i, w.j));
        }
        seen[w.i][w.j] = true;
    }
    for i in 1..=n {
        for j in 1..=n {
            if i != j && !seen[i][j] {
                return CheckResult::fail(5, NAME, "position not witnessed").at((i, j));
            }
        }
    }
    CheckResult::pass(5, NAME)
}

fn check_levels(cert: &Certificate) -> CheckResult {
    const NAME: &str = "N = N0 delta recomputed";
    let l = &cert.levels;
    if [&l.k, &l.k_u, &l.d, &l.n0, &l.n, &l.delta]
        .iter()
        .any(|x| !x.is_positive())
    {
        return CheckResult::fail(6, NAME, "levels must be positive");
    }
    let (Ok(d), Ok(delta)) = (
        transported_level(&cert.b, &l.k_u),
        conjugation_denominator(&cert.b),
    ) else {
        return CheckResult::fail(6, NAME, "b is singular");
    };
    if d != l.d {
        return CheckResult::fail(
            6,
            NAME,
            format!("d recomputed as {d}, certificate says {}", l.d),
        );
    }
    if &l.k * &d * &d != l.n0 {
        return CheckResult::fail(
            6,
            NAME,
            format!(
                "N0 = k d^2 = {} but certificate says {}",
                &l.k * &d * &d,
                l.n0
            ),
        );
    }
    if delta != l.delta {
        return CheckResult::fail(
            6,
            NAME,
            format!("delta recomputed as {delta}, certificate says {}", l.delta),
        );
    }
    if &l.n0 * &delta != l.n {
        return CheckResult::fail(
            6,
            NAME,
            format!(
                "N0 delta = {} but certificate says N = {}",
                &l.n0 * &delta,
                l.n
            ),
        );
    }
    CheckResult::pass(6, NAME)
}

/// Runs checks 1-6 (and the optional mod-p images). The verdict passes
/// exactly when every check passes.
pub fn verify(cert: &Certificate, opts: &VerifyOptions) -> VerifyReport {
    let mut checks = vec![
        check_determinants(cert),
        check_bruhat(cert),
        check_h(cert),
        check_witnesses(cert, opts.parallel),
        check_coverage(cert),
        check_levels(cert),
    ];
    let mut mod_p = Vec::new();
    if !opts.primes.is_empty() {
        const NAME: &str = "image mod p is SL(n, p) for p not dividing N";
        let mut result = CheckResult::pass(7, NAME);
        for &p in &opts.primes {
            match mod_p_image(&cert.g, &cert.h, p) {
                Ok(r) => {
                    let expected = !(&cert.levels.n % BigInt::from(p)).is_zero();
                    if expected && !r.surjective && result.passed {
                        result = CheckResult::fail(
                            7,
                            NAME,
                            format!("image mod {p} has order {}", r.image_order),
                        );
                    }
                    mod_p.push(r);
                }
                Err(e) if result.passed => {
                    result = CheckResult::fail(7, NAME, format!("p = {p}: {e}"))
                }
                Err(_) => {}
            }
        }
        checks.push(result);
    }
    let passed = checks.iter().all(|c| c.passed);
    let verdict = if passed {
        format!(
            "Gamma({}) <= <g, h>, modulo the cited {} statement",
            cert.levels.n, cert.axiom.name
        )
    } else {
        let failed: Vec<u8> = checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
        format!("rejected: failed checks {failed:?}")
    };
    VerifyReport {
        passed,
        verdict,
        checks,
        mod_p,
    }
}
