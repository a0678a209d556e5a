//! Ladder primitives, primitive bases, and exact dimension tables.
//!
//! The ladder primitive of weight `i` is the unique primitive element
//! supported on ladder monomials whose ladder coefficient is 1; the
//! substitution polynomial `psi` inverts the family, recovering each
//! ladder from the primitives below it. The same partition sums, read
//! on integer inputs, produce the dimension polynomials: `theta` turns
//! forest counts into primitive dimensions, and `phi` turns primitive
//! dimensions into chain dimensions of any length. [`dimension_table`]
//! assembles both and cross-checks them against the defining power
//! series identities before returning.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::algebra::{AlgebraElement, Rational};
use crate::growth::BasisTables;
use crate::linalg;
use crate::trees::{enumerate_forests, forest_counts_upto, Forest, RootedTree};

/// A basis of the primitive elements of one weight, each tagged with
/// the forest whose projection produced it.
pub struct PrimitiveBasis {
    weight: usize,
    elements: Vec<AlgebraElement>,
    provenance: Vec<Forest>,
}

impl PrimitiveBasis {
    pub(crate) fn from_scan(
        weight: usize,
        elements: Vec<AlgebraElement>,
        provenance: Vec<Forest>,
    ) -> Self {
        assert_eq!(elements.len(), provenance.len());
        PrimitiveBasis { weight, elements, provenance }
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &AlgebraElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[AlgebraElement] {
        &self.elements
    }

    /// The forest whose projection produced basis element `i`.
    pub fn provenance(&self, i: usize) -> &Forest {
        &self.provenance[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Forest, &AlgebraElement)> {
        self.provenance.iter().zip(self.elements.iter())
    }
}

/// Basis of the primitives of weight `n`, via the projection scan.
pub fn primitive_basis(n: usize) -> PrimitiveBasis {
    let mut tables = BasisTables::new();
    let src = tables.primitive_basis(n);
    PrimitiveBasis {
        weight: src.weight,
        elements: src.elements.clone(),
        provenance: src.provenance.clone(),
    }
}

/// Same basis extraction, but scanning only non-connected forests at
/// weights past 1: single trees never project onto new primitives.
/// Spans are checked against the full scan in tests.
pub fn primitive_basis_pruned(n: usize) -> PrimitiveBasis {
    assert!(n >= 1, "primitive basis is graded by weight >= 1");
    let forests = enumerate_forests(n);
    let index: alloc::collections::BTreeMap<Forest, usize> =
        forests.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
    let mut ech = linalg::Echelon::new(forests.len());
    let mut elements = Vec::new();
    let mut provenance = Vec::new();
    for f in &forests {
        if n >= 2 && f.is_connected() {
            continue;
        }
        let v = crate::growth::pi1(&AlgebraElement::from_forest(f.clone()));
        if v.is_zero() {
            continue;
        }
        if ech.insert(crate::growth::element_vector(&v, &index, forests.len())) {
            elements.push(v);
            provenance.push(f.clone());
        }
    }
    PrimitiveBasis::from_scan(n, elements, provenance)
}

/// Multiplicity vectors `b` with `sum j * b[j-1] = n`, parts ascending
/// within the recursion, deterministic order.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut b = vec![0usize; n];
    fn rec(rest: usize, max_part: usize, b: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(b.clone());
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            b[part - 1] += 1;
            rec(rest - part, part, b, out);
            b[part - 1] -= 1;
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        rec(n, n, &mut b, &mut out);
    }
    out
}

fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// `(sum b)! / prod b[j]!` as an exact integer.
fn multinomial(b: &[usize]) -> BigInt {
    let k: usize = b.iter().sum();
    let mut num = factorial(k);
    for &m in b {
        let d = factorial(m);
        debug_assert!((&num % &d).is_zero());
        num /= d;
    }
    num
}

/// The primitive ladder element of weight `i`: an alternating partition
/// sum over ladder monomials with ladder coefficient 1.
pub fn ladder_primitive(i: usize) -> AlgebraElement {
    assert!(i >= 1, "ladder primitives are graded by weight >= 1");
    let mut out = AlgebraElement::zero();
    for b in partitions(i) {
        let k: usize = b.iter().sum();
        let sign = if k % 2 == 0 { -BigInt::one() } else { BigInt::one() };
        let mut den = BigInt::one();
        for &m in &b {
            den *= factorial(m);
        }
        let coeff: Rational = Ratio::new(sign * factorial(k - 1), den);
        out.add_term(ladder_monomial(&b), coeff);
    }
    out
}

fn ladder_monomial(b: &[usize]) -> Forest {
    let mut trees = Vec::new();
    for (j, &m) in b.iter().enumerate() {
        for _ in 0..m {
            trees.push(RootedTree::ladder(j + 1));
        }
    }
    Forest::from_trees(trees)
}

/// Evaluates the weight-`n` substitution polynomial on `values[j-1]`
/// for the variable of weight `j`, where `n = values.len()`. On the
/// ladder primitives it returns the ladder of weight `n`.
pub fn psi_substitute(values: &[AlgebraElement]) -> AlgebraElement {
    let n = values.len();
    let mut out = AlgebraElement::zero();
    for b in partitions(n) {
        let mut term = AlgebraElement::one();
        let mut den = BigInt::one();
        for (j, &m) in b.iter().enumerate() {
            term = term.mul(&values[j].pow(m));
            den *= factorial(m);
        }
        out.add_assign(&term.scale(&Ratio::new(BigInt::one(), den)));
    }
    out
}

/// The weight-`n` alternating partition polynomial on integer inputs,
/// `n = values.len()`; on forest counts it yields the primitive
/// dimension of weight `n`.
pub fn theta(values: &[BigInt]) -> BigInt {
    let n = values.len();
    let mut acc = BigInt::zero();
    for b in partitions(n) {
        let k: usize = b.iter().sum();
        let sign = if k % 2 == 0 { -BigInt::one() } else { BigInt::one() };
        acc += sign * multinomial(&b) * monomial_value(&b, values);
    }
    acc
}

/// The `k`-part partition polynomial of weight `values.len()`; on the
/// primitive dimensions it yields the dimension of the length-`k` chain
/// space of that weight.
pub fn phi(k: usize, values: &[BigInt]) -> BigInt {
    let n = values.len();
    let mut acc = BigInt::zero();
    for b in partitions(n) {
        let parts: usize = b.iter().sum();
        if parts != k {
            continue;
        }
        acc += multinomial(&b) * monomial_value(&b, values);
    }
    acc
}

fn monomial_value(b: &[usize], values: &[BigInt]) -> BigInt {
    let mut acc = BigInt::one();
    for (j, &m) in b.iter().enumerate() {
        for _ in 0..m {
            acc *= &values[j];
        }
    }
    acc
}

/// Exact dimensions of the graded pieces: `forests(n)` counts the
/// forest basis, `chains(n, k)` the length-`k` chain space inside it.
pub struct DimensionTable {
    max: usize,
    forests: Vec<BigUint>,
    chains: Vec<Vec<BigUint>>,
}

impl DimensionTable {
    pub fn max_weight(&self) -> usize {
        self.max
    }

    /// Dimension of the weight-`n` graded piece of the algebra.
    pub fn forests(&self, n: usize) -> &BigUint {
        &self.forests[n]
    }

    /// Dimension of the weight-`n` part of the length-`k` chain image;
    /// `k = 1` counts the primitives.
    pub fn chains(&self, n: usize, k: usize) -> &BigUint {
        assert!(
            (1..=n).contains(&k) && n <= self.max,
            "chain dimensions need 1 <= k <= n <= max"
        );
        &self.chains[n][k - 1]
    }

    /// The row `chains(n, 1), ..., chains(n, n)`.
    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.chains[n]
    }

    /// Rows rendered as `n: r_n | h_1 h_2 ... h_n`.
    pub fn render(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        for n in 1..=self.max {
            let _ = write!(s, "{}: {} |", n, self.forests[n]);
            for v in &self.chains[n] {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }
}

/// Builds the dimension table up to `max`, verifying the defining
/// series identities along the way.
pub fn dimension_table(max: usize) -> DimensionTable {
    let forests = forest_counts_upto(max);
    let forests_int: Vec<BigInt> = forests.iter().map(|v| BigInt::from(v.clone())).collect();
    let mut prim_int: Vec<BigInt> = vec![BigInt::zero()];
    for n in 1..=max {
        let h = theta(&forests_int[1..=n]);
        assert!(h.is_positive(), "primitive dimension must be positive at weight {n}");
        prim_int.push(h);
    }
    let mut chains: Vec<Vec<BigUint>> = vec![Vec::new()];
    for n in 1..=max {
        let mut row = Vec::with_capacity(n);
        for k in 1..=n {
            let v = phi(k, &prim_int[1..=n]);
            assert!(!v.is_negative(), "chain dimension must be nonnegative");
            row.push(v.to_biguint().unwrap());
        }
        chains.push(row);
    }
    // Chain dimensions of one weight must exhaust the forest dimension.
    for n in 1..=max {
        let total: BigUint = chains[n].iter().sum();
        assert_eq!(total, forests[n], "chain dimensions fail to add up at weight {n}");
    }
    // The primitive series must be the reciprocal complement of the
    // forest series: r_n = sum_j h_j r_(n-j).
    for n in 1..=max {
        let mut acc = BigInt::zero();
        for j in 1..=n {
            acc += &prim_int[j] * &forests_int[n - j];
        }
        assert_eq!(acc, forests_int[n], "series inversion fails at weight {n}");
    }
    // Each chain row must match the corresponding power of the
    // primitive series.
    let mut power: Vec<BigInt> = vec![BigInt::one()];
    power.resize(max + 1, BigInt::zero());
    for k in 1..=max {
        let mut next: Vec<BigInt> = vec![BigInt::zero(); max + 1];
        for a in 0..=max {
            if power[a].is_zero() {
                continue;
            }
            for j in 1..=(max - a) {
                next[a + j] += &power[a] * &prim_int[j];
            }
        }
        power = next;
        for n in k..=max {
            assert_eq!(
                power[n].to_biguint().unwrap(),
                chains[n][k - 1],
                "chain row disagrees with the series power at ({n}, {k})"
            );
        }
    }
    DimensionTable { max, forests, chains }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_element, ratio};
    use crate::growth::{chain_unchecked, graft, BasisTables};
    use crate::hopf::{coproduct, is_primitive};
    use crate::trees::count_forests;

    fn e(s: &str) -> AlgebraElement {
        parse_element(s).unwrap()
    }

    #[test]
    fn ladder_primitive_goldens() {
        assert_eq!(ladder_primitive(1), e("[]"));
        assert_eq!(ladder_primitive(2), e("1 [[]] + -1/2 [] []"));
        assert_eq!(
            ladder_primitive(3),
            e("1 [[[]]] + -1 [[]] [] + 1/3 [] [] []")
        );
    }

    #[test]
    fn ladder_primitives_are_primitive() {
        for i in 1..=6 {
            assert!(is_primitive(&ladder_primitive(i)), "weight {i}");
        }
    }

    #[test]
    fn psi_recovers_ladders() {
        for n in 1..=6 {
            let ps: Vec<AlgebraElement> = (1..=n).map(ladder_primitive).collect();
            assert_eq!(
                psi_substitute(&ps),
                AlgebraElement::from_tree(RootedTree::ladder(n)),
                "weight {n}"
            );
        }
        assert_eq!(psi_substitute(&[]), AlgebraElement::one());
    }

    #[test]
    fn psi_goldens() {
        let x1 = e("[]");
        let x2 = e("[[]]");
        assert_eq!(
            psi_substitute(&[x1.clone(), x2.clone()]),
            x2.add(&x1.pow(2).scale(&ratio(1, 2)))
        );
    }

    #[test]
    fn ladder_span_is_a_subcoalgebra() {
        // Coproducts of ladder monomials stay inside ladder monomials.
        let is_ladder_forest = |f: &Forest| {
            f.trees().iter().all(|t| *t == RootedTree::ladder(t.weight()))
        };
        for n in 1..=5 {
            let x = AlgebraElement::from_tree(RootedTree::ladder(n));
            for (key, _) in coproduct(&x).terms() {
                assert!(key.iter().all(&is_ladder_forest));
            }
        }
    }

    #[test]
    fn theta_turns_forest_counts_into_primitive_dimensions() {
        let r: Vec<BigInt> = forest_counts_upto(8)
            .into_iter()
            .map(BigInt::from)
            .collect();
        let dims: Vec<BigInt> = (1..=8).map(|n| theta(&r[1..=n])).collect();
        let expect: Vec<BigInt> = [1, 1, 1, 2, 3, 8, 16, 41].map(BigInt::from).into();
        assert_eq!(dims, expect);
    }

    #[test]
    fn phi_small_goldens() {
        let h: Vec<BigInt> = [1, 1, 1, 2].map(BigInt::from).into();
        // Two-part chains of weight 4: compositions (1,3), (2,2), (3,1).
        assert_eq!(phi(2, &h), BigInt::from(3));
        assert_eq!(phi(1, &h), BigInt::from(2));
        assert_eq!(phi(4, &h), BigInt::one());
    }

    #[test]
    fn partitions_are_complete() {
        let counts: Vec<usize> = (0..=10).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        for b in partitions(6) {
            let total: usize = b.iter().enumerate().map(|(j, m)| (j + 1) * m).sum();
            assert_eq!(total, 6);
        }
    }

    #[test]
    fn dimension_table_matches_counts_and_bases() {
        let table = dimension_table(12);
        for n in 1..=12 {
            assert_eq!(table.forests(n), &count_forests(n));
        }
        let mut tables = BasisTables::new();
        for n in 1..=6 {
            assert_eq!(
                BigUint::from(tables.primitive_basis(n).len()),
                *table.chains(n, 1),
                "primitive basis dimension at weight {n}"
            );
        }
        // Chain keys per length agree with the table rows.
        for n in 1..=5 {
            let keys = tables.chain_keys(n).to_vec();
            for k in 1..=n {
                let count = keys.iter().filter(|key| key.len() == k).count();
                assert_eq!(BigUint::from(count), *table.chains(n, k), "({n}, {k})");
            }
        }
    }

    #[test]
    fn free_generation_dimension_identity() {
        // The chain images make the algebra free on the primitives:
        // f_0 = 1, f_n = sum_j h_j f_(n-j) reproduces the forest counts.
        let table = dimension_table(12);
        let mut f: Vec<BigUint> = vec![BigUint::one()];
        for n in 1..=12 {
            let mut acc = BigUint::zero();
            for j in 1..=n {
                acc += table.chains(j, 1) * &f[n - j];
            }
            f.push(acc);
        }
        for n in 0..=12 {
            assert_eq!(&f[n], table.forests(n));
        }
    }

    #[test]
    fn theta_inverts_the_chain_sum_polynomials() {
        // Theta_k(Phi_1, ..., Phi_k) = X_k as graded polynomials, where
        // Phi_n sums all partition monomials of weight n.
        type Poly = alloc::collections::BTreeMap<Vec<usize>, BigInt>;
        let vars = 8usize;
        let weight = |exps: &[usize]| -> usize {
            exps.iter().enumerate().map(|(j, m)| (j + 1) * m).sum()
        };
        let mul = |a: &Poly, b: &Poly, cap: usize| -> Poly {
            let mut out = Poly::new();
            for (ea, ca) in a {
                for (eb, cb) in b {
                    let exps: Vec<usize> =
                        ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                    if weight(&exps) > cap {
                        continue;
                    }
                    *out.entry(exps).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
            out.retain(|_, c| !c.is_zero());
            out
        };
        let var = |j: usize| -> Poly {
            let mut exps = vec![0usize; vars];
            exps[j - 1] = 1;
            Poly::from([(exps, BigInt::one())])
        };
        let phi_poly = |n: usize| -> Poly {
            let mut out = Poly::new();
            for b in partitions(n) {
                let mut exps = vec![0usize; vars];
                exps[..n].copy_from_slice(&b);
                out.insert(exps, multinomial(&b));
            }
            out
        };
        for k in 1..=vars {
            // Substitute Phi_j for X_j in Theta_k, truncated at weight k.
            let mut acc = Poly::new();
            for b in partitions(k) {
                let parts: usize = b.iter().sum();
                let sign = if parts % 2 == 0 { -BigInt::one() } else { BigInt::one() };
                let mut term = Poly::from([(vec![0usize; vars], sign * multinomial(&b))]);
                for (j, &m) in b.iter().enumerate() {
                    for _ in 0..m {
                        term = mul(&term, &phi_poly(j + 1), k);
                    }
                }
                for (exps, c) in term {
                    let entry = acc.entry(exps).or_insert_with(BigInt::zero);
                    *entry += c;
                }
            }
            acc.retain(|_, c| !c.is_zero());
            assert_eq!(acc, var(k), "inversion fails at weight {k}");
        }
    }

    #[test]
    fn primitive_bases_span_and_are_primitive() {
        for n in 1..=5 {
            let basis = primitive_basis(n);
            assert_eq!(basis.weight(), n);
            for (src, p) in basis.iter() {
                assert!(is_primitive(p), "pi1({src}) not primitive");
                assert_eq!(p.is_homogeneous(), Some(n));
            }
        }
        assert_eq!(primitive_basis(1).len(), 1);
        assert_eq!(primitive_basis(4).len(), 2);
        assert_eq!(primitive_basis(5).len(), 3);
    }

    #[test]
    fn pruned_scan_spans_the_full_basis() {
        for n in 1..=6 {
            let full = primitive_basis(n);
            let pruned = primitive_basis_pruned(n);
            assert_eq!(full.len(), pruned.len(), "rank differs at weight {n}");
            // Same span: every full element reduces to zero against the
            // pruned echelon rows and vice versa.
            let forests = enumerate_forests(n);
            let index: alloc::collections::BTreeMap<Forest, usize> =
                forests.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
            let mut ech = linalg::Echelon::new(forests.len());
            for p in pruned.elements() {
                assert!(ech.insert(crate::growth::element_vector(p, &index, forests.len())));
            }
            for p in full.elements() {
                assert!(
                    !ech.insert(crate::growth::element_vector(p, &index, forests.len())),
                    "full scan escapes the pruned span at weight {n}"
                );
            }
        }
    }

    #[test]
    fn chains_of_ladder_primitives_stay_in_ladder_span() {
        let value = chain_unchecked(&[ladder_primitive(2), ladder_primitive(1)]);
        assert_eq!(value.is_homogeneous(), Some(3));
        let alt = graft(&ladder_primitive(2), &ladder_primitive(1));
        assert_eq!(value, alt);
    }

    #[test]
    fn render_lists_rows() {
        let table = dimension_table(3);
        assert_eq!(table.render(), "1: 1 | 1\n2: 2 | 1 1\n3: 4 | 1 2 1\n");
    }
}
