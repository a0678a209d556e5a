//! Toy-model renormalization driven by admissible cuts.
//!
//! Every rooted tree `t` labels a formal divergent integral `x_t(c)`: the
//! leaf is a single logarithmically divergent integral with external scale
//! `c`, and each node of `t` nests one subintegral per child, so the cut
//! combinatorics of `t` mirrors the subdivergence structure. Cutting
//! branches off `t` yields its trunks `t_1, ..., t_m = t`, ordered by
//! weight, and the span of the symbols `x_{t_i}` is a comodule: the
//! coaction sends `x_{t_i}` to `1 (x) x_{t_i}` plus the sum over admissible
//! cuts of `P^C(t_i) (x) x_{R^C(t_i)}`.
//!
//! Regularization is the bracket `[E]`, evaluation of a product of symbols
//! at `c = 0`; it satisfies `[1] = 1` and `[[E]] = [E]`. The counterterm of
//! `t` applies the antipode to the left tensor legs of the coaction on
//! `x_t`, replaces each resulting forest by a bracket, and multiplies onto
//! the right legs. Subtracting the bracket of the counterterm itself gives
//! the renormalized value, finite as the regulator is removed.

use crate::algebra::{AlgebraElement, Rational};
use crate::comodule::StructureMatrix;
use crate::hopf::{antipode, reduced_coproduct};
use crate::trees::RootedTree;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_traits::{One, Zero};

/// One multiplicand of a formal product: a bare symbol `x_t(c)` or a
/// regularized bracket `[E]` around a product.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Factor {
    Sym(RootedTree),
    Bracket(Term),
}

/// Brackets precede symbols in a product; ties sort structurally.
fn factor_display_cmp(a: &Factor, b: &Factor) -> Ordering {
    match (a, b) {
        (Factor::Bracket(x), Factor::Bracket(y)) => x.cmp(y),
        (Factor::Bracket(_), Factor::Sym(_)) => Ordering::Less,
        (Factor::Sym(_), Factor::Bracket(_)) => Ordering::Greater,
        (Factor::Sym(x), Factor::Sym(y)) => x.cmp(y),
    }
}

/// A commutative product of factors, kept in display order. The empty
/// product is the unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Term {
    factors: Vec<Factor>,
}

impl Term {
    pub fn unit() -> Self {
        Term { factors: Vec::new() }
    }

    pub fn symbol(t: RootedTree) -> Self {
        Term { factors: vec![Factor::Sym(t)] }
    }

    /// Builds a product from arbitrary factors, restoring display order.
    pub fn from_factors(mut factors: Vec<Factor>) -> Self {
        factors.sort_by(factor_display_cmp);
        Term { factors }
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn product(&self, other: &Term) -> Term {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Term::from_factors(factors)
    }

    /// The regularized value `[self]`. `[1]` flattens to `1`, and a lone
    /// bracket absorbs the new one since brackets already sit at `c = 0`.
    pub fn bracket(&self) -> Term {
        if self.is_unit() {
            return Term::unit();
        }
        if let [Factor::Bracket(_)] = self.factors.as_slice() {
            return self.clone();
        }
        Term { factors: vec![Factor::Bracket(self.clone())] }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut prev_sym = false;
        for factor in &self.factors {
            match factor {
                Factor::Bracket(inner) => {
                    write!(f, "[{inner}]")?;
                    prev_sym = false;
                }
                Factor::Sym(t) => {
                    if prev_sym {
                        write!(f, " ")?;
                    }
                    write!(f, "x_{t}(c)")?;
                    prev_sym = true;
                }
            }
        }
        Ok(())
    }
}

/// A rational combination of formal products of symbols and brackets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RenormExpression {
    terms: BTreeMap<Term, Rational>,
}

impl RenormExpression {
    pub fn zero() -> Self {
        RenormExpression { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        RenormExpression::from_term(Term::unit(), Rational::one())
    }

    pub fn symbol(t: RootedTree) -> Self {
        RenormExpression::from_term(Term::symbol(t), Rational::one())
    }

    pub fn from_term(term: Term, c: Rational) -> Self {
        let mut e = RenormExpression::zero();
        e.add_term(term, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, term: &Term) -> Rational {
        self.terms.get(term).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, term: Term, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(term).or_insert_with(Rational::zero);
        *entry += c;
        // prune exact cancellations so equality stays structural
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn add_assign(&mut self, other: &RenormExpression) {
        for (t, c) in other.terms() {
            self.add_term(t.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &RenormExpression) -> RenormExpression {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn neg(&self) -> RenormExpression {
        let mut out = RenormExpression::zero();
        for (t, c) in self.terms() {
            out.add_term(t.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &RenormExpression) -> RenormExpression {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> RenormExpression {
        let mut out = RenormExpression::zero();
        for (t, v) in self.terms() {
            out.add_term(t.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &RenormExpression) -> RenormExpression {
        let mut out = RenormExpression::zero();
        for (s, a) in self.terms() {
            for (t, b) in other.terms() {
                out.add_term(s.product(t), a.clone() * b.clone());
            }
        }
        out
    }

    /// Applies the bracket to every term: linear, `[1] = 1`, `[[E]] = [E]`.
    pub fn bracket(&self) -> RenormExpression {
        let mut out = RenormExpression::zero();
        for (t, c) in self.terms() {
            out.add_term(t.bracket(), c.clone());
        }
        out
    }
}

impl fmt::Display for RenormExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (term, c)) in self.terms.iter().enumerate() {
            let negative = c < &Rational::zero();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = if negative { -c.clone() } else { c.clone() };
            if term.is_unit() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{term}")?;
            } else {
                write!(f, "{mag} {term}")?;
            }
        }
        Ok(())
    }
}

/// The comodule spanned by the symbols of `t` and all its trunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeComodule {
    trunks: Vec<RootedTree>,
    structure: StructureMatrix,
}

impl SubtreeComodule {
    /// All trunks of the defining tree, weight-ascending; the last entry is
    /// the tree itself.
    pub fn trunks(&self) -> &[RootedTree] {
        &self.trunks
    }

    /// The coaction matrix over the trunk basis, with the trivial basis
    /// vector in row zero.
    pub fn structure(&self) -> &StructureMatrix {
        &self.structure
    }
}

fn trunk_cmp(a: &RootedTree, b: &RootedTree) -> Ordering {
    a.weight().cmp(&b.weight()).then_with(|| a.cmp(b))
}

/// Builds the subtree comodule of `t`: the trunk set is the closure of
/// `{t}` under admissible cuts, and row `i` of the structure matrix lists
/// the pruned forests of the cuts of trunk `i` grouped by what remains.
pub fn subtree_comodule(t: &RootedTree) -> SubtreeComodule {
    let mut seen = BTreeSet::new();
    seen.insert(t.clone());
    let mut queue = vec![t.clone()];
    while let Some(s) = queue.pop() {
        let cuts = reduced_coproduct(&AlgebraElement::from_tree(s));
        for (key, _) in cuts.terms() {
            let trunk = key[1].trees()[0].clone();
            if seen.insert(trunk.clone()) {
                queue.push(trunk);
            }
        }
    }
    let mut trunks: Vec<RootedTree> = seen.into_iter().collect();
    trunks.sort_by(trunk_cmp);
    let index: BTreeMap<&RootedTree, usize> =
        trunks.iter().enumerate().map(|(i, s)| (s, i + 1)).collect();

    let m = trunks.len();
    let mut entries = vec![vec![AlgebraElement::zero(); m + 1]; m + 1];
    entries[0][0] = AlgebraElement::one();
    for (i, trunk) in trunks.iter().enumerate() {
        entries[i + 1][i + 1] = AlgebraElement::one();
        let cuts = reduced_coproduct(&AlgebraElement::from_tree(trunk.clone()));
        for (key, c) in cuts.terms() {
            let col = index[&key[1].trees()[0]];
            entries[i + 1][col].add_assign(&AlgebraElement::from_term(key[0].clone(), c.clone()));
        }
    }
    let structure =
        StructureMatrix::new(entries).expect("trunk coaction is lower unitriangular");
    SubtreeComodule { trunks, structure }
}

/// Replaces every forest of `x` by the bracket of its symbol product, so
/// the scalar part passes through unbracketed.
fn bracket_of_element(x: &AlgebraElement) -> RenormExpression {
    let mut out = RenormExpression::zero();
    for (forest, c) in x.terms() {
        if forest.is_empty() {
            out.add_term(Term::unit(), c.clone());
        } else {
            let syms = forest.trees().iter().cloned().map(Factor::Sym).collect();
            out.add_term(Term::from_factors(syms).bracket(), c.clone());
        }
    }
    out
}

fn counterterm_via(
    t: &RootedTree,
    s: impl Fn(&AlgebraElement) -> AlgebraElement,
) -> RenormExpression {
    let sc = subtree_comodule(t);
    let m = sc.structure.size();
    let mut out = RenormExpression::zero();
    for j in 1..=m {
        let left = bracket_of_element(&s(sc.structure.q(m, j)));
        let sym = RenormExpression::symbol(sc.trunks[j - 1].clone());
        out.add_assign(&left.mul(&sym));
    }
    out
}

/// The twisted symbol of `t`: the antipode applied to the left legs of the
/// coaction, regularized by brackets. Every subdivergence of `x_t(c)` is
/// cancelled by one of its terms.
pub fn counterterm(t: &RootedTree) -> RenormExpression {
    counterterm_via(t, antipode)
}

/// The renormalized value of `x_t(c)`: the counterterm minus its own
/// regularized value, finite at the physical scale.
pub fn renormalized(t: &RootedTree) -> RenormExpression {
    let bar = counterterm(t);
    bar.sub(&bar.bracket())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::comodule::verify_coassociative;
    use crate::hopf::antipode_by_convolution;
    use crate::trees::enumerate_trees;
    use alloc::string::ToString;

    fn tree(s: &str) -> RootedTree {
        s.parse().unwrap()
    }

    fn elem(s: &str) -> AlgebraElement {
        s.parse().unwrap()
    }

    #[test]
    fn trunk_sets_are_weight_ordered_and_closed() {
        for w in 1..=5 {
            for t in enumerate_trees(w) {
                let sc = subtree_comodule(&t);
                let trunks = sc.trunks();
                assert_eq!(trunks.last(), Some(&t));
                for pair in trunks.windows(2) {
                    assert!(trunk_cmp(&pair[0], &pair[1]) == Ordering::Less);
                }
                let all: BTreeSet<_> = trunks.iter().cloned().collect();
                for s in trunks {
                    for inner in subtree_comodule(s).trunks() {
                        assert!(all.contains(inner), "trunk set not closed under cuts");
                    }
                }
            }
        }
    }

    #[test]
    fn ladder_trunks_are_shorter_ladders() {
        let sc = subtree_comodule(&RootedTree::ladder(4));
        let expected: Vec<_> = (1..=4).map(RootedTree::ladder).collect();
        assert_eq!(sc.trunks(), &expected[..]);
    }

    #[test]
    fn subtree_coaction_matches_cut_table() {
        let sc = subtree_comodule(&RootedTree::ladder(3));
        let q = sc.structure();
        assert_eq!(q.size(), 3);
        assert_eq!(q.q(1, 0), &AlgebraElement::zero());
        assert_eq!(q.q(2, 1), &elem("[]"));
        assert_eq!(q.q(3, 1), &elem("[[]]"));
        assert_eq!(q.q(3, 2), &elem("[]"));

        let sc = subtree_comodule(&tree("[[][]]"));
        assert_eq!(sc.trunks(), &[tree("[]"), tree("[[]]"), tree("[[][]]")][..]);
        let q = sc.structure();
        assert_eq!(q.q(3, 2), &elem("2 []"));
        assert_eq!(q.q(3, 1), &elem("[] []"));
    }

    #[test]
    fn subtree_coactions_are_coassociative() {
        for w in 1..=5 {
            for t in enumerate_trees(w) {
                let sc = subtree_comodule(&t);
                assert!(verify_coassociative(sc.structure()), "failed for {t}");
            }
        }
    }

    #[test]
    fn counterterm_goldens() {
        assert_eq!(counterterm(&RootedTree::leaf()).to_string(), "x_[](c)");
        assert_eq!(
            counterterm(&RootedTree::ladder(2)).to_string(),
            "x_[[]](c) - [x_[](c)]x_[](c)"
        );
        assert_eq!(
            counterterm(&RootedTree::ladder(3)).to_string(),
            "x_[[[]]](c) - [x_[[]](c)]x_[](c) - [x_[](c)]x_[[]](c) + [x_[](c) x_[](c)]x_[](c)"
        );
        assert_eq!(
            counterterm(&tree("[[][]]")).to_string(),
            "x_[[][]](c) - 2 [x_[](c)]x_[[]](c) + [x_[](c) x_[](c)]x_[](c)"
        );
    }

    #[test]
    fn renormalized_goldens() {
        assert_eq!(renormalized(&RootedTree::leaf()).to_string(), "x_[](c) - [x_[](c)]");
        assert_eq!(
            renormalized(&RootedTree::ladder(3)).to_string(),
            "x_[[[]]](c) - [x_[[[]]](c)] - [x_[[]](c)]x_[](c) - [x_[](c)]x_[[]](c) \
             + [x_[](c) x_[](c)]x_[](c) + [[x_[[]](c)]x_[](c)] + [[x_[](c)]x_[[]](c)] \
             - [[x_[](c) x_[](c)]x_[](c)]"
        );
    }

    #[test]
    fn brackets_flatten_and_collapse() {
        assert_eq!(RenormExpression::one().bracket(), RenormExpression::one());
        let single = RenormExpression::symbol(RootedTree::leaf()).bracket();
        assert_eq!(single.bracket(), single);
        let wide = counterterm(&RootedTree::ladder(2)).bracket();
        assert_eq!(wide.bracket(), wide);
        assert_eq!(
            RenormExpression::symbol(RootedTree::leaf()).bracket().to_string(),
            "[x_[](c)]"
        );
    }

    #[test]
    fn expression_arithmetic_is_exact() {
        let a = counterterm(&RootedTree::ladder(2));
        let b = counterterm(&tree("[[][]]"));
        assert_eq!(a.sub(&a), RenormExpression::zero());
        assert_eq!(a.add(&b), b.add(&a));
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.scale(&rat(3)).sub(&a).sub(&a).sub(&a), RenormExpression::zero());
        let one = RenormExpression::one();
        assert_eq!(a.mul(&one), a);
    }

    #[test]
    fn counterterm_matches_convolution_antipode() {
        for w in 1..=5 {
            for t in enumerate_trees(w) {
                assert_eq!(
                    counterterm_via(&t, antipode),
                    counterterm_via(&t, antipode_by_convolution),
                    "antipode routes disagree on {t}",
                );
            }
        }
    }

    #[test]
    fn counterterm_term_counts_follow_antipode_support() {
        for w in 1..=4 {
            for t in enumerate_trees(w) {
                let sc = subtree_comodule(&t);
                let m = sc.structure().size();
                let expected: usize =
                    (1..=m).map(|j| antipode(sc.structure().q(m, j)).len()).sum();
                assert_eq!(counterterm(&t).len(), expected, "term count off for {t}");
            }
        }
    }

    #[test]
    fn renormalized_splits_into_disjoint_halves() {
        for w in 1..=4 {
            for t in enumerate_trees(w) {
                let bar = counterterm(&t);
                let ren = renormalized(&t);
                assert_eq!(ren.len(), 2 * bar.len(), "bracketed half collides for {t}");
                for (term, c) in bar.terms() {
                    assert_eq!(&ren.coefficient(term), c);
                    assert_eq!(ren.coefficient(&term.bracket()), -c.clone());
                }
            }
        }
    }
}
