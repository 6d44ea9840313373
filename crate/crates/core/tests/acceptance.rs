//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Oracles here use small local routines on `Vec<Vec<BigInt>>` (schoolbook
//! products, cofactor determinants and adjugates) rather than the library's
//! own kernels.

use std::collections::{HashSet, VecDeque};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slgen::certify::finite::{closure_size, index_mod_n, mod_p_image, sl_order, DEFAULT_CAP};
use slgen::certify::{verify, Certificate, VerifyOptions};
use slgen::exactalg::{companion, elementary, hnf, saturation_exponent};
use slgen::genpair::{
    construct, construct_traced, unipotent_saturate, Budget, Frame, WitnessedElement,
};
use slgen::sample::random_sl;
use slgen::slp::{Node, Slp};
use slgen::{bruhat, check_hypothesis, Error, IntMatrix, RatMatrix};

const CRIT1_LIMIT: Duration = Duration::from_secs(10);
const CRIT2_LIMIT: Duration = Duration::from_secs(30);
const CRIT3_LIMIT: Duration = Duration::from_secs(600);
const CRIT3_SEEDS: std::ops::Range<u64> = 0..50;
const CRIT3_MIN_REGULAR: f64 = 0.8;
const CRIT4_TRIALS: usize = 100;
const CRIT5_TRIALS: usize = 100;
const CRIT5_MAX_D: i64 = 12;
const CRIT6_CASES: usize = 40;
const CRIT6_BOX: i64 = 24;
const CRIT7_MUTATIONS: usize = 150;

type M = Vec<Vec<BigInt>>;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn rows(m: &IntMatrix) -> M {
    m.rows()
}

fn ident(n: usize) -> M {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { big(1) } else { big(0) })
                .collect()
        })
        .collect()
}

fn elem(n: usize, i: usize, j: usize, t: BigInt) -> M {
    let mut m = ident(n);
    m[i][j] = t;
    m
}

fn mul(a: &M, b: &M) -> M {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(big(0), |s, k| s + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn minor(a: &M, r: usize, c: usize) -> M {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != c)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

fn det(a: &M) -> BigInt {
    match a.len() {
        0 => big(1),
        1 => a[0][0].clone(),
        n => (0..n).fold(big(0), |s, j| {
            let term = &a[0][j] * det(&minor(a, 0, j));
            if j % 2 == 0 {
                s + term
            } else {
                s - term
            }
        }),
    }
}

fn adjugate(a: &M) -> M {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = det(&minor(a, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect()
        })
        .collect()
}

/// Inverse of a matrix with determinant `+-1`.
fn inv(a: &M) -> M {
    let d = det(a);
    assert!(d.abs().is_one(), "not unimodular");
    adjugate(a)
        .into_iter()
        .map(|r| r.into_iter().map(|x| x * &d).collect())
        .collect()
}

fn pow(a: &M, e: &BigInt) -> M {
    let (mut base, mut e) = if e.is_negative() {
        (inv(a), -e)
    } else {
        (a.clone(), e.clone())
    };
    let mut acc = ident(a.len());
    while !e.is_zero() {
        if e.is_odd() {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    acc
}

/// Straight-line program evaluation by direct multiplication.
fn eval_direct(w: &Slp, g: &M, h: &M) -> M {
    let mut vals: Vec<M> = Vec::with_capacity(w.len());
    for node in w.nodes() {
        let v = match node {
            Node::GenG => g.clone(),
            Node::GenH => h.clone(),
            Node::Mul(a, b) => mul(&vals[*a], &vals[*b]),
            Node::Inv(a) => inv(&vals[*a]),
            Node::Pow(a, e) => pow(&vals[*a], e),
            Node::Comm(a, b) => {
                let (x, y) = (&vals[*a], &vals[*b]);
                mul(&mul(x, y), &mul(&inv(x), &inv(y)))
            }
            Node::Conj(a, b) => {
                let (x, y) = (&vals[*a], &vals[*b]);
                mul(&mul(y, x), &inv(y))
            }
        };
        vals.push(v);
    }
    vals.pop().expect("non-empty word")
}

fn is_unipotent_direct(h: &M) -> bool {
    let n = h.len();
    let mut x = h.clone();
    for (i, row) in x.iter_mut().enumerate() {
        row[i] -= 1;
    }
    let mut p = x.clone();
    for _ in 1..n {
        p = mul(&p, &x);
    }
    p.iter().flatten().all(Zero::is_zero)
}

/// `b^{-1} x b` over the rationals, for upper triangular `b`.
fn rat_conj(b: &RatMatrix, x: &M) -> Vec<Vec<BigRational>> {
    let n = x.len();
    let bq: Vec<Vec<BigRational>> = b.rows();
    let xq: Vec<Vec<BigRational>> = x
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    // Back-substitute b y = x b column by column.
    let rhs: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |s, k| s + &xq[i][k] * &bq[k][j]))
                .collect()
        })
        .collect();
    let mut y = vec![vec![BigRational::zero(); n]; n];
    for j in 0..n {
        for i in (0..n).rev() {
            let mut s = rhs[i][j].clone();
            for k in i + 1..n {
                s -= &bq[i][k] * &y[k][j];
            }
            y[i][j] = s / &bq[i][i];
        }
    }
    y
}

fn witnesses_hold(cert: &Certificate) -> bool {
    let n = cert.n;
    let g = rows(&cert.g);
    let c = rows(&cert.c);
    let gp = mul(&mul(&inv(&c), &g), &c);
    let t = elem(n, 0, n - 1, cert.m.clone());
    let mut seen = HashSet::new();
    for w in &cert.witnesses {
        let y = rat_conj(&cert.b, &eval_direct(&w.word, &gp, &t));
        let target = elem(n, w.i - 1, w.j - 1, cert.levels.n0.clone());
        let ok = (0..n)
            .all(|r| (0..n).all(|s| y[r][s] == BigRational::from_integer(target[r][s].clone())));
        if !ok || !seen.insert((w.i, w.j)) {
            return false;
        }
    }
    seen.len() == n * n - n
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn companion_g() -> IntMatrix {
    companion(&[-1, -1, 0, 1])
}

fn criterion_1(hs: &mut Vec<IntMatrix>) -> Outcome {
    let start = Instant::now();
    let g = companion_g();
    let (cert, trace) = match construct_traced(&g, &big(1), None) {
        Ok(x) => x,
        Err(e) => return outcome(false, format!("construct failed: {e}")),
    };
    hs.push(cert.h.clone());
    let mut fails = Vec::new();
    let bd = &trace.bruhat;
    if !bd.b.is_identity() {
        fails.push("b != I");
    }
    if bd.u != elementary(3, 0, 2, 1).unwrap().to_rat() {
        fails.push("u != e13(1)");
    }
    let p = vec![
        vec![big(0), big(0), big(1)],
        vec![big(1), big(0), big(0)],
        vec![big(0), big(1), big(0)],
    ];
    let c = rows(&bd.c);
    let gp = mul(&mul(&inv(&c), &rows(&g)), &c);
    if gp != rows(&bd.g_prime) || gp != mul(&p, &elem(3, 0, 2, big(1))) {
        fails.push("c^-1 g c != b p u");
    }
    let y1 = elem(3, 0, 2, big(1));
    let shifted = mul(&mul(&gp, &y1), &inv(&gp));
    let y2 = mul(&mul(&shifted, &y1), &mul(&inv(&shifted), &inv(&y1)));
    if y2 != elem(3, 1, 2, big(1)) || rows(&trace.ladder.y[1].matrix) != y2 {
        fails.push("y2 != e23(1)");
    }
    let e12 = elem(3, 0, 1, big(1));
    let harvested = trace
        .harvested
        .iter()
        .any(|w| rows(&w.matrix) == e12 && eval_direct(&w.word, &gp, &y1) == e12);
    if !harvested {
        fails.push("harvest did not yield e12(1)");
    }
    if !witnesses_hold(&cert) {
        fails.push("witnesses do not give all six e_ij(1)");
    }
    if cert.levels.n != big(1) {
        fails.push("N != 1");
    }
    if !verify(&cert, &VerifyOptions::default()).passed {
        fails.push("verify rejected");
    }
    let el = start.elapsed();
    if el > CRIT1_LIMIT {
        fails.push("runtime over 10 s");
    }
    outcome(
        fails.is_empty(),
        format!("N = {}, {:.2?}{}", cert.levels.n, el, join(&fails)),
    )
}

fn join(fails: &[&str]) -> String {
    if fails.is_empty() {
        String::new()
    } else {
        format!("; {}", fails.join("; "))
    }
}

fn criterion_2(hs: &mut Vec<IntMatrix>) -> Outcome {
    let mut fails = Vec::new();
    let mut notes = Vec::new();
    for m in [2i64, 3] {
        let start = Instant::now();
        let (cert, trace) = match construct_traced(&companion_g(), &big(m), None) {
            Ok(x) => x,
            Err(e) => return outcome(false, format!("m = {m}: construct failed: {e}")),
        };
        hs.push(cert.h.clone());
        let t = &trace.ladder.t;
        let sq = &t[0] * &t[0];
        if t[1] != sq && t[1] != -sq {
            fails.push(format!("m = {m}: t2 = {} is not +-t1^2", t[1]));
        }
        let l = &cert.levels;
        if l.k != big(m * m) {
            fails.push(format!("m = {m}: k = {} != m^2", l.k));
        }
        if l.n != &l.k * &l.d * &l.d * &l.delta {
            fails.push(format!("m = {m}: N != k d^2 delta"));
        }
        if !verify(&cert, &VerifyOptions::default()).passed || !witnesses_hold(&cert) {
            fails.push(format!("m = {m}: certificate rejected"));
        }
        let el = start.elapsed();
        if el > CRIT2_LIMIT {
            fails.push(format!("m = {m}: runtime {el:.2?} over 30 s"));
        }
        notes.push(format!(
            "m = {m}: t = ({}, {}), k = {}, N = {}, {:.2?}",
            t[0], t[1], l.k, l.n, el
        ));
    }
    let fails: Vec<&str> = fails.iter().map(String::as_str).collect();
    outcome(
        fails.is_empty(),
        format!("{}{}", notes.join("; "), join(&fails)),
    )
}

fn criterion_3(hs: &mut Vec<IntMatrix>) -> Outcome {
    let start = Instant::now();
    let (mut regular, mut certified, mut budget_errors) = (0usize, 0usize, 0usize);
    let mut fails = Vec::new();
    for seed in CRIT3_SEEDS {
        let g = random_sl(3, 8, seed).expect("valid dimension");
        if !check_hypothesis(&g).expect("det 1").regular {
            continue;
        }
        regular += 1;
        match construct(&g, &big(1), None) {
            Ok(cert) => {
                if verify(&cert, &VerifyOptions::default()).passed && witnesses_hold(&cert) {
                    certified += 1;
                    hs.push(cert.h.clone());
                } else {
                    fails.push(format!("seed {seed}: unverifiable certificate"));
                }
            }
            Err(
                Error::BudgetExceeded { .. }
                | Error::InsufficientRank { .. }
                | Error::SearchBudget(_),
            ) => budget_errors += 1,
            Err(e) => fails.push(format!("seed {seed}: undeclared failure {e}")),
        }
    }
    let total = CRIT3_SEEDS.end - CRIT3_SEEDS.start;
    let frac = regular as f64 / total as f64;
    if frac < CRIT3_MIN_REGULAR {
        fails.push(format!("only {regular}/{total} regular"));
    }
    let el = start.elapsed();
    if el > CRIT3_LIMIT {
        fails.push(format!("runtime {el:.2?} over 10 min"));
    }
    let fails: Vec<&str> = fails.iter().map(String::as_str).collect();
    outcome(
        fails.is_empty(),
        format!(
            "{regular}/{total} regular, {certified} certified, {budget_errors} budget errors, {el:.2?}{}",
            join(&fails)
        ),
    )
}

fn random_rat(rng: &mut ChaCha8Rng, nonzero: bool) -> BigRational {
    loop {
        let p = rng.random_range(-5i64..=5);
        if nonzero && p == 0 {
            continue;
        }
        return BigRational::new(big(p), big(rng.random_range(1i64..=5)));
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for trial in 0..CRIT4_TRIALS {
        let n = if trial % 2 == 0 { 3 } else { 4 };
        let mut b0 = RatMatrix::zeros(n);
        let mut u0 = RatMatrix::identity(n);
        for i in 0..n {
            b0.set(i, i, random_rat(&mut rng, true));
            for j in i + 1..n {
                b0.set(i, j, random_rat(&mut rng, false));
            }
            if i + 1 < n {
                u0.set(i, n - 1, random_rat(&mut rng, false));
            }
        }
        let p = bruhat::p_sigma(n).to_rat();
        let gp = &(&b0 * &p) * &u0;
        match bruhat::bruhat_decompose_rat(&gp) {
            Ok((b, u)) if b == b0 && u == u0 => {}
            _ => bad += 1,
        }
    }
    outcome(
        bad == 0,
        format!("{}/{} round trips exact", CRIT4_TRIALS - bad, CRIT4_TRIALS),
    )
}

/// `v` lies in the row lattice of the square nonsingular `basis`.
fn in_lattice(basis: &M, v: &[BigInt]) -> bool {
    let d = det(basis);
    let adj = adjugate(basis);
    let n = v.len();
    (0..n).all(|j| {
        (0..n)
            .fold(big(0), |s, k| s + &v[k] * &adj[k][j])
            .is_multiple_of(&d)
    })
}

fn unit_vec(dim: usize, r: usize, d: i64) -> Vec<BigInt> {
    (0..dim)
        .map(|j| if j == r { big(d) } else { big(0) })
        .collect()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    let mut bad = Vec::new();
    while done < CRIT5_TRIALS {
        let dim = rng.random_range(1..=3usize);
        let basis: M = (0..dim)
            .map(|_| (0..dim).map(|_| big(rng.random_range(-4i64..=4))).collect())
            .collect();
        let dt = det(&basis).abs();
        if dt.is_zero() || dt > big(CRIT5_MAX_D) {
            continue;
        }
        let mut gens = basis.clone();
        if rng.random_bool(0.5) {
            let (a, b) = (rng.random_range(-2i64..=2), rng.random_range(-2i64..=2));
            let extra = (0..dim)
                .map(|j| &basis[0][j] * a + &basis[dim - 1][j] * b)
                .collect();
            gens.push(extra);
        }
        let brute = (1..=CRIT5_MAX_D)
            .find(|&d| (0..dim).all(|r| in_lattice(&basis, &unit_vec(dim, r, d))))
            .expect("exponent divides the determinant");
        let lat = hnf(dim, &gens);
        match saturation_exponent(&lat) {
            Ok((d, coeffs)) => {
                let combos_ok = (0..dim).all(|r| {
                    (0..dim).all(|j| {
                        let s = gens
                            .iter()
                            .zip(&coeffs[r])
                            .fold(big(0), |s, (g, c)| s + &g[j] * c);
                        s == if j == r { d.clone() } else { big(0) }
                    })
                });
                if d != big(brute) || !combos_ok {
                    bad.push(format!("{gens:?}: got {d}, brute force {brute}"));
                }
            }
            Err(e) => bad.push(format!("{gens:?}: {e}")),
        }
        done += 1;
    }
    let first = bad
        .first()
        .map(|b| format!("; first failure: {b}"))
        .unwrap_or_default();
    outcome(
        bad.is_empty(),
        format!(
            "{}/{} lattices agree{first}",
            CRIT5_TRIALS - bad.len(),
            CRIT5_TRIALS
        ),
    )
}

/// Heisenberg coordinates `(x12, x23, x13)`.
type U3 = [i64; 3];

fn u3_mul(a: &U3, b: &U3) -> U3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]]
}

fn u3_inv(a: &U3) -> U3 {
    [-a[0], -a[1], a[0] * a[1] - a[2]]
}

fn u3_matrix(a: &U3) -> IntMatrix {
    IntMatrix::from_i64_rows(&[&[1, a[0], a[2]], &[0, 1, a[1]], &[0, 0, 1]]).unwrap()
}

/// Elements of `<gens>` reachable without leaving the box `|x| <= CRIT6_BOX`.
fn bounded_closure(gens: &[U3]) -> HashSet<U3> {
    let steps: Vec<U3> = gens.iter().flat_map(|g| [*g, u3_inv(g)]).collect();
    let mut seen = HashSet::from([[0, 0, 0]]);
    let mut queue = VecDeque::from([[0, 0, 0]]);
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            let y = u3_mul(&x, s);
            if y.iter().all(|v| v.abs() <= CRIT6_BOX) && seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

fn pure(q: (usize, usize), t: i64) -> U3 {
    match q {
        (1, 2) => [t, 0, 0],
        (2, 3) => [0, t, 0],
        _ => [0, 0, t],
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let budget = Budget::for_dim(3);
    let (mut full, mut deficient, mut attempts) = (0usize, 0usize, 0usize);
    let mut bad = Vec::new();
    while full < CRIT6_CASES && attempts < 20_000 {
        attempts += 1;
        let mut gens: [U3; 2] = [[0; 3]; 2];
        for g in gens.iter_mut() {
            *g = [
                rng.random_range(-3..=3),
                rng.random_range(-3..=3),
                rng.random_range(-3..=3),
            ];
        }
        if rng.random_range(0..5) == 0 {
            let c = rng.random_range(0..2);
            gens[0][c] = 0;
            gens[1][c] = 0;
        }
        let (a, b) = (u3_matrix(&gens[0]), u3_matrix(&gens[1]));
        let s = [
            WitnessedElement {
                matrix: a.clone(),
                word: Slp::gen_g(),
                frame: Frame::Standard,
            },
            WitnessedElement {
                matrix: b.clone(),
                word: Slp::gen_h(),
                frame: Frame::Standard,
            },
        ];
        match unipotent_saturate(&a, &b, &s, &budget) {
            Ok(sat) if sat.k_u <= big(4) => {
                full += 1;
                let reach = bounded_closure(&gens);
                let k_u = sat.k_u.to_i64().unwrap();
                for (q, kq) in &sat.levels {
                    let kq = kq.to_i64().unwrap();
                    let reached = reach.contains(&pure(*q, kq)) && reach.contains(&pure(*q, k_u));
                    let too_low = (1..kq)
                        .any(|t| reach.contains(&pure(*q, t)) || reach.contains(&pure(*q, -t)));
                    if !reached || too_low {
                        bad.push(format!(
                            "{gens:?} at {q:?}: K = {kq}, reached {reached}, lower {too_low}"
                        ));
                    }
                }
            }
            Ok(_) => {}
            Err(Error::InsufficientRank { missing }) => {
                deficient += 1;
                let reach = bounded_closure(&gens);
                for q in missing {
                    if (1..=4).any(|t| reach.contains(&pure(q, t))) {
                        bad.push(format!("{gens:?}: {q:?} reported missing but reached"));
                    }
                }
            }
            Err(e) => bad.push(format!("{gens:?}: {e}")),
        }
    }
    if full < CRIT6_CASES {
        bad.push(format!("only {full} sets with k_U <= 4"));
    }
    let first = bad
        .first()
        .map(|b| format!("; first failure: {b}"))
        .unwrap_or_default();
    outcome(
        bad.is_empty(),
        format!(
            "{full} sets with k_U <= 4 and {deficient} rank-deficient sets agree with BFS{first}"
        ),
    )
}

#[derive(Clone, Copy, Debug)]
enum Field {
    G,
    C,
    H,
    M,
    B,
    U,
    LevelN,
    LevelN0,
    LevelK,
    LevelD,
    LevelDelta,
    WordExponent,
    WitnessPosition,
    WitnessDrop,
}

const FIELDS: [Field; 14] = [
    Field::G,
    Field::C,
    Field::H,
    Field::M,
    Field::B,
    Field::U,
    Field::LevelN,
    Field::LevelN0,
    Field::LevelK,
    Field::LevelD,
    Field::LevelDelta,
    Field::WordExponent,
    Field::WitnessPosition,
    Field::WitnessDrop,
];

fn flip(x: &BigInt, rng: &mut ChaCha8Rng) -> BigInt {
    x ^ (big(1) << rng.random_range(0..3usize))
}

fn flip_int_entry(m: &mut IntMatrix, rng: &mut ChaCha8Rng) {
    let n = m.dim();
    let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
    let v = flip(m.get(i, j), rng);
    m.set(i, j, v);
}

fn flip_rat_entry(m: &mut RatMatrix, rng: &mut ChaCha8Rng) {
    let n = m.dim();
    let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
    let x = m.get(i, j).clone();
    m.set(
        i,
        j,
        BigRational::new(flip(x.numer(), rng), x.denom().clone()),
    );
}

/// Applies one mutation and returns the check that must fail first.
fn mutate(cert: &mut Certificate, field: Field, rng: &mut ChaCha8Rng) -> u8 {
    let w = rng.random_range(0..cert.witnesses.len());
    match field {
        Field::G | Field::C => {
            let m = if matches!(field, Field::G) {
                &mut cert.g
            } else {
                &mut cert.c
            };
            flip_int_entry(m, rng);
            if det(&rows(m)).is_one() {
                2
            } else {
                1
            }
        }
        Field::H => {
            flip_int_entry(&mut cert.h, rng);
            3
        }
        Field::M => {
            cert.m = flip(&cert.m, rng);
            3
        }
        Field::B => {
            flip_rat_entry(&mut cert.b, rng);
            2
        }
        Field::U => {
            flip_rat_entry(&mut cert.u, rng);
            2
        }
        Field::LevelN => {
            cert.levels.n = flip(&cert.levels.n, rng);
            6
        }
        Field::LevelN0 => {
            cert.levels.n0 = flip(&cert.levels.n0, rng);
            4
        }
        Field::LevelK => {
            cert.levels.k = flip(&cert.levels.k, rng);
            6
        }
        Field::LevelD => {
            cert.levels.d = flip(&cert.levels.d, rng);
            6
        }
        Field::LevelDelta => {
            cert.levels.delta = flip(&cert.levels.delta, rng);
            6
        }
        Field::WordExponent => {
            let text = cert.witnesses[w].word.to_string();
            let mut parts: Vec<String> = text.split(';').map(str::to_owned).collect();
            let pows: Vec<usize> = (0..parts.len())
                .filter(|&k| parts[k].starts_with("pow "))
                .collect();
            if pows.is_empty() {
                let other = (w + 1) % cert.witnesses.len();
                cert.witnesses[w].word = cert.witnesses[other].word.clone();
            } else {
                let k = pows[rng.random_range(0..pows.len())];
                let toks: Vec<&str> = parts[k].split(' ').collect();
                let e: BigInt = toks[2].parse().unwrap();
                parts[k] = format!("pow {} {}", toks[1], flip(&e, rng));
                cert.witnesses[w].word = parts.join(";").parse().unwrap();
            }
            4
        }
        Field::WitnessPosition => {
            let wi = &mut cert.witnesses[w];
            if rng.random_bool(0.5) {
                wi.i ^= 1 << rng.random_range(0..2);
            } else {
                wi.j ^= 1 << rng.random_range(0..2);
            }
            4
        }
        Field::WitnessDrop => {
            cert.witnesses.remove(w);
            5
        }
    }
}

fn criterion_7() -> Outcome {
    let base = [
        construct(&companion_g(), &big(2), None).expect("companion certificate"),
        construct(&random_sl(3, 8, 2).unwrap(), &big(1), None).expect("random certificate"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    for k in 0..CRIT7_MUTATIONS {
        let mut cert = base[k % 2].clone();
        let field = FIELDS[k % FIELDS.len()];
        let expected = mutate(&mut cert, field, &mut rng);
        // Round trip through the file format, as a consumer would.
        let cert = Certificate::from_json(&cert.to_json()).expect("mutated certificate serialises");
        let report = verify(&cert, &VerifyOptions::default());
        let first = report.failed_checks().first().copied();
        if report.passed || first != Some(expected) {
            bad.push(format!(
                "{field:?}: expected check {expected}, got {:?}",
                report.failed_checks()
            ));
        }
    }
    let first = bad
        .first()
        .map(|b| format!("; first failure: {b}"))
        .unwrap_or_default();
    outcome(
        bad.is_empty(),
        format!(
            "{}/{} mutations rejected at the expected check{first}",
            CRIT7_MUTATIONS - bad.len(),
            CRIT7_MUTATIONS
        ),
    )
}

fn sl3_order(p: u64) -> BigInt {
    let p = big(p as i64);
    p.pow(3) * (p.pow(2) - 1) * (p.pow(3) - 1)
}

fn criterion_8() -> Outcome {
    let cert = construct(&companion_g(), &big(1), None).expect("criterion-1 certificate");
    let mut fails = Vec::new();
    for p in [5u64, 7, 11] {
        match mod_p_image(&cert.g, &cert.h, p) {
            Ok(r) if r.surjective && r.image_order == sl3_order(p) => {}
            other => fails.push(format!("p = {p}: {other:?}")),
        }
    }
    let gens: Vec<IntMatrix> = (0..3)
        .flat_map(|i| {
            (0..3)
                .filter(move |&j| j != i)
                .map(move |j| elementary(3, i, j, 1).unwrap())
        })
        .collect();
    match closure_size(&gens, 2, DEFAULT_CAP) {
        Ok(168) if sl_order(3, 2) == big(168) && sl3_order(2) == big(168) => {}
        other => fails.push(format!("SL(3, Z/2) enumeration {other:?}")),
    }
    match index_mod_n(&cert.g, &cert.h, 1, DEFAULT_CAP) {
        Ok(i) if i.is_one() => {}
        other => fails.push(format!("index mod 1: {other:?}")),
    }
    let fails: Vec<&str> = fails.iter().map(String::as_str).collect();
    outcome(
        fails.is_empty(),
        format!(
            "images mod 5, 7, 11 surjective; |SL(3, Z/2)| = 168; index 1{}",
            join(&fails)
        ),
    )
}

fn criterion_9(hs: &[IntMatrix]) -> Outcome {
    let bad = hs.iter().filter(|h| !is_unipotent_direct(&rows(h))).count();
    outcome(
        bad == 0 && !hs.is_empty(),
        format!("{} of {} h satisfy (h - I)^n = 0", hs.len() - bad, hs.len()),
    )
}

fn main() {
    let mut hs = Vec::new();
    let results = [
        criterion_1(&mut hs),
        criterion_2(&mut hs),
        criterion_3(&mut hs),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(&hs),
    ];
    for (k, r) in results.iter().enumerate() {
        println!(
            "criterion {} {}: {}",
            k + 1,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    if results.iter().any(|r| !r.passed) {
        std::process::exit(1);
    }
}
