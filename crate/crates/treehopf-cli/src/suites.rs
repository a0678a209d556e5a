//! Invariant suites behind the `check` verb.
//!
//! Each suite reruns a batch of library identities and reports one
//! pass/fail line per identity. Randomized suites are driven by an
//! explicit seed so failures reproduce exactly.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use treehopf::algebra::TensorElement;
use treehopf::comodule::{
    build_comodule, extract_family, flag, is_reduced, verify_coassociative, PrimitiveMatrix,
};
use treehopf::hopf::{antipode, coproduct, coproduct_forest, counit};
use treehopf::lie::{bracket, pair, LieElement};
use treehopf::primitives::{dimension_table, ladder_primitive, phi, primitive_basis, theta};
use treehopf::trees::{b_plus, count_forests, enumerate_forests, enumerate_trees, Forest};
use treehopf::{AlgebraElement, Rational, RootedTree};

use crate::io::FORMAT;
use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x7ee5;

pub struct SuiteOutcome {
    pub suite: &'static str,
    pub max_weight: usize,
    pub seed: Option<u64>,
    pub checks: Vec<(String, bool)>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn text(&self) -> String {
        let mut lines = Vec::new();
        if let Some(seed) = self.seed {
            lines.push(format!("seed: {seed}"));
        }
        for (name, ok) in &self.checks {
            lines.push(format!("{}: {name}", if *ok { "ok" } else { "FAIL" }));
        }
        lines.push(format!(
            "suite {} (max weight {}): {}",
            self.suite,
            self.max_weight,
            if self.ok() { "passed" } else { "FAILED" },
        ));
        lines.join("\n")
    }

    pub fn json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|(name, ok)| json!({ "name": name, "ok": ok }))
            .collect();
        json!({
            "format": FORMAT,
            "kind": "check",
            "suite": self.suite,
            "max_weight": self.max_weight,
            "seed": self.seed,
            "checks": checks,
            "ok": self.ok(),
        })
    }
}

/// Dispatches a named suite. Each suite picks its own default weight
/// bound: 5 for the axiom and Lie suites, 6 for roundtrips, 29 for the
/// arithmetic tables, 3 for the comodule entry pool.
pub fn run(suite: &str, max_weight: Option<usize>, seed: u64) -> Result<SuiteOutcome, CliError> {
    match suite {
        "hopf-axioms" => Ok(hopf_axioms(max_weight.unwrap_or(5))),
        "roundtrip" => Ok(roundtrip(max_weight.unwrap_or(6), seed)),
        "tables" => Ok(tables(max_weight.unwrap_or(29))),
        "comodules" => Ok(comodules(max_weight.unwrap_or(3), seed)),
        "lie" => Ok(lie_identities(max_weight.unwrap_or(5))),
        other => Err(CliError::Input(format!(
            "unknown suite \"{other}\"; expected hopf-axioms, roundtrip, tables, comodules, or lie"
        ))),
    }
}

/// Grading, coassociativity, counit, antipode convolution, and the
/// root-adding cocycle equation, on every forest up to the bound.
fn hopf_axioms(n: usize) -> SuiteOutcome {
    let mut grading = true;
    let mut coassoc = true;
    let mut counits = true;
    let mut convolution = true;
    let mut cocycle = true;
    let mut count = 0usize;
    for w in 0..=n {
        for f in enumerate_forests(w) {
            count += 1;
            let x = AlgebraElement::from_forest(f);
            let d = coproduct(&x);
            grading &= d.terms().all(|(key, _)| key[0].weight() + key[1].weight() == w);
            coassoc &= d.expand_slot(0, coproduct_forest) == d.expand_slot(1, coproduct_forest);
            let eps = |g: &Forest| {
                AlgebraElement::scalar(counit(&AlgebraElement::from_forest(g.clone())))
            };
            counits &= d.apply_slot(0, eps).multiply_slots() == x
                && d.apply_slot(1, eps).multiply_slots() == x;
            let s = |g: &Forest| antipode(&AlgebraElement::from_forest(g.clone()));
            let expect = AlgebraElement::scalar(counit(&x));
            convolution &= d.apply_slot(0, s).multiply_slots() == expect
                && d.apply_slot(1, s).multiply_slots() == expect;
            let bplus =
                |y: &AlgebraElement| y.map_forests(|g| AlgebraElement::from_tree(b_plus(g)));
            let mut rhs = d.apply_slot(1, |g| bplus(&AlgebraElement::from_forest(g.clone())));
            rhs.add_assign(&TensorElement::tensor(&[bplus(&x), AlgebraElement::one()]));
            cocycle &= coproduct(&bplus(&x)) == rhs;
        }
    }
    SuiteOutcome {
        suite: "hopf-axioms",
        max_weight: n,
        seed: None,
        checks: vec![
            (format!("coproduct grading on {count} forests"), grading),
            (format!("coassociativity on {count} forests"), coassoc),
            (format!("counit identities on {count} forests"), counits),
            (format!("antipode convolution on {count} forests"), convolution),
            (format!("root-adding cocycle on {count} forests"), cocycle),
        ],
    }
}

/// Randomized render/parse roundtrips for elements and trees.
fn roundtrip(n: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forests: Vec<Vec<Forest>> = (0..=n).map(enumerate_forests).collect();
    let trees: Vec<Vec<RootedTree>> = (1..=n).map(enumerate_trees).collect();
    let mut elements = true;
    let mut tree_strings = true;
    for _ in 0..200 {
        let mut x = AlgebraElement::zero();
        for _ in 0..rng.gen_range(0..=4usize) {
            let w = rng.gen_range(0..=n);
            let f = forests[w][rng.gen_range(0..forests[w].len())].clone();
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=9);
            x.add_assign(&AlgebraElement::from_term(
                f,
                Rational::new(num.into(), den.into()),
            ));
        }
        elements &= x.to_string().parse::<AlgebraElement>().map(|y| y == x).unwrap_or(false);
    }
    for _ in 0..200 {
        let row = &trees[rng.gen_range(0..trees.len())];
        let t = row[rng.gen_range(0..row.len())].clone();
        tree_strings &= t.to_string().parse::<RootedTree>().map(|u| u == t).unwrap_or(false);
    }
    SuiteOutcome {
        suite: "roundtrip",
        max_weight: n,
        seed: Some(seed),
        checks: vec![
            ("200 random elements reparse to themselves".into(), elements),
            ("200 random trees reparse to themselves".into(), tree_strings),
        ],
    }
}

/// Dimension tables: forest counts against the direct counter, the
/// chain-length-one column against the sieve, rows against the
/// partition polynomials, and row sums against the forest counts.
fn tables(n: usize) -> SuiteOutcome {
    let table = dimension_table(n);
    let rs: Vec<BigInt> = (1..=n).map(|w| BigInt::from(count_forests(w))).collect();
    let mut forest_col = true;
    let mut first_col = true;
    let mut rows = true;
    let mut sums = true;
    for w in 1..=n {
        forest_col &= BigInt::from(table.forests(w).clone()) == rs[w - 1];
        first_col &= BigInt::from(table.chains(w, 1).clone()) == theta(&rs[..w]);
    }
    let hs: Vec<BigInt> = (1..=n)
        .map(|w| BigInt::from(table.chains(w, 1).clone()))
        .collect();
    for w in 1..=n {
        let mut sum = BigUint::from(0u32);
        for k in 1..=w {
            rows &= BigInt::from(table.chains(w, k).clone()) == phi(k, &hs[..w]);
            sum += table.chains(w, k);
        }
        sums &= sum == *table.forests(w);
    }
    SuiteOutcome {
        suite: "tables",
        max_weight: n,
        seed: None,
        checks: vec![
            ("forest column matches the direct counter".into(), forest_col),
            ("length-one column matches the primitive sieve".into(), first_col),
            ("all columns match the partition polynomials".into(), rows),
            ("row sums recover the forest counts".into(), sums),
        ],
    }
}

/// Randomized comodules built from ladder primitives: coassociativity,
/// family extraction, flag growth, and type agreement.
fn comodules(pool_max: usize, seed: u64) -> SuiteOutcome {
    let pool: Vec<AlgebraElement> = (1..=pool_max.max(1)).map(ladder_primitive).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coassoc = true;
    let mut roundtrips = true;
    let mut flags = true;
    let mut types = true;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4usize);
        let mut raw = vec![vec![AlgebraElement::zero(); n + 1]; n + 1];
        for i in 1..=n {
            for slot in &mut raw[i - 1][i..=n] {
                let mut entry = AlgebraElement::zero();
                for p in &pool {
                    let c = rng.gen_range(-2i64..=2);
                    if c != 0 {
                        entry.add_assign(&p.scale(&Rational::from_integer(c.into())));
                    }
                }
                *slot = entry;
            }
        }
        let p = PrimitiveMatrix::new(raw).expect("pool entries are primitive");
        let q = build_comodule(&p);
        coassoc &= verify_coassociative(&q);
        roundtrips &= extract_family(&q).map(|back| back == p).unwrap_or(false);
        let fl = flag(&q);
        flags &= fl.dims.windows(2).all(|w| w[0] < w[1]) && fl.dims.last() == Some(&(n + 1));
        if let Some(profile) = is_reduced(&p) {
            types &= profile == fl.type_profile();
        }
    }
    SuiteOutcome {
        suite: "comodules",
        max_weight: pool_max,
        seed: Some(seed),
        checks: vec![
            ("100 random coactions are coassociative".into(), coassoc),
            ("families extract back from their coactions".into(), roundtrips),
            ("coinvariant flags grow strictly to the full space".into(), flags),
            ("reduced block profiles match the flag type".into(), types),
        ],
    }
}

/// Lie algebra identities: antisymmetry, Jacobi, and the grading and
/// length constraints of the enveloping pairing.
fn lie_identities(n: usize) -> SuiteOutcome {
    let mut antisym = true;
    let mut jacobi = true;
    let mut grading = true;
    let mut lengths = true;
    for wa in 1..n {
        for wb in 1..=(n - wa) {
            for a in enumerate_trees(wa) {
                for b in enumerate_trees(wb) {
                    let la = LieElement::from_tree(a.clone());
                    let lb = LieElement::from_tree(b);
                    antisym &= bracket(&la, &lb).add(&bracket(&lb, &la)).is_zero();
                }
            }
        }
    }
    for wa in 1..n {
        for wb in 1..=(n - wa) {
            for wc in 1..=(n.saturating_sub(wa + wb)) {
                for a in enumerate_trees(wa) {
                    for b in enumerate_trees(wb) {
                        for c in enumerate_trees(wc) {
                            let la = LieElement::from_tree(a.clone());
                            let lb = LieElement::from_tree(b.clone());
                            let lc = LieElement::from_tree(c);
                            let total = bracket(&bracket(&la, &lb), &lc)
                                .add(&bracket(&bracket(&lb, &lc), &la))
                                .add(&bracket(&bracket(&lc, &la), &lb));
                            jacobi &= total.is_zero();
                        }
                    }
                }
            }
        }
    }
    let bound = n.min(5);
    for wa in 1..=bound {
        for wb in 1..=bound {
            if wa == wb {
                continue;
            }
            for a in enumerate_trees(wa) {
                for b in enumerate_trees(wb) {
                    grading &= pair(std::slice::from_ref(&a), &AlgebraElement::from_tree(b)).is_zero();
                }
            }
        }
    }
    for w in 2..=bound {
        for p in primitive_basis(w).elements() {
            lengths &= pair(&[], p).is_zero();
            for wa in 1..w {
                for a in enumerate_trees(wa) {
                    for b in enumerate_trees(w - wa) {
                        lengths &= pair(&[a.clone(), b], p).is_zero();
                    }
                }
            }
        }
    }
    SuiteOutcome {
        suite: "lie",
        max_weight: n,
        seed: None,
        checks: vec![
            ("bracket antisymmetry".into(), antisym),
            ("Jacobi identity".into(), jacobi),
            ("pairing vanishes across different weights".into(), grading),
            ("primitives pair only with single-letter words".into(), lengths),
        ],
    }
}
