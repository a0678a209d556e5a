//! The Lie algebra dual to the tree coalgebra, enveloping-algebra
//! words, and the bilinear pairing between the two.
//!
//! One generator `Z_t` per rooted tree; the structure constant
//! `n_count(t1, t2, t)` counts the single-edge cuts of `t` with crown
//! `t1` and trunk `t2`, and the bracket takes their antisymmetric
//! combination. Enveloping-algebra words are plain ordered lists of
//! trees; [`pair`] evaluates a word against an algebra element through
//! the coproduct, exhibiting words as graded-dual functionals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Zero;

use crate::algebra::{rat, AlgebraElement, Rational};
use crate::growth::graft;
use crate::hopf::{coproduct, counit};
use crate::trees::{admissible_cuts, enumerate_trees, symmetry_factor, Forest, RootedTree};

/// Element of the Lie algebra with one generator per rooted tree.
#[derive(Clone, PartialEq, Eq)]
pub struct LieElement {
    terms: BTreeMap<RootedTree, Rational>,
}

impl LieElement {
    pub fn zero() -> Self {
        LieElement { terms: BTreeMap::new() }
    }

    pub fn from_tree(t: RootedTree) -> Self {
        let mut out = LieElement::zero();
        out.add_term(t, rat(1));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: RootedTree, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(t) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RootedTree, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &RootedTree) -> Rational {
        self.terms.get(t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_term(t.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> LieElement {
        let mut out = LieElement::zero();
        for (t, c) in self.terms() {
            out.add_term(t.clone(), c * k);
        }
        out
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c} Z{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Number of single-edge cuts of `t` with crown `t1` and trunk `t2`.
pub fn n_count(t1: &RootedTree, t2: &RootedTree, t: &RootedTree) -> usize {
    admissible_cuts(t)
        .iter()
        .filter(|c| {
            c.size() == 1 && c.trunk() == t2 && {
                let crown = c.crown().trees();
                crown.len() == 1 && &crown[0] == t1
            }
        })
        .count()
}

/// The one-sided structure sum over cut counts, computed through
/// grafting: cut counts equal grafting-position counts rescaled by the
/// automorphism orders of the three trees involved.
fn one_sided(t1: &RootedTree, t2: &RootedTree) -> LieElement {
    let planted = graft(
        &AlgebraElement::from_tree(t1.clone()),
        &AlgebraElement::from_tree(t2.clone()),
    );
    let s12 = BigInt::from(symmetry_factor(t1) * symmetry_factor(t2));
    let mut out = LieElement::zero();
    for (f, c) in planted.terms() {
        let trees = f.trees();
        debug_assert_eq!(trees.len(), 1, "grafting a tree on a tree yields trees");
        let t = &trees[0];
        let coeff = c
            * rat(t2.weight() as i64)
            * Ratio::new(BigInt::from(symmetry_factor(t)), s12.clone());
        debug_assert!(coeff.is_integer());
        out.add_term(t.clone(), coeff);
    }
    out
}

/// The Lie bracket, extended bilinearly from the antisymmetrized cut
/// counts on generators. Computed through the grafting route.
pub fn bracket(a: &LieElement, b: &LieElement) -> LieElement {
    let mut out = LieElement::zero();
    for (ta, c) in a.terms() {
        for (tb, d) in b.terms() {
            let one = one_sided(ta, tb).sub(&one_sided(tb, ta));
            out = out.add(&one.scale(&(c * d)));
        }
    }
    out
}

/// The same bracket by direct enumeration of candidate trees and their
/// single-edge cuts.
pub fn bracket_by_counting(a: &LieElement, b: &LieElement) -> LieElement {
    let mut out = LieElement::zero();
    for (ta, c) in a.terms() {
        for (tb, d) in b.terms() {
            let cd = c * d;
            for t in enumerate_trees(ta.weight() + tb.weight()) {
                let n = n_count(ta, tb, &t) as i64 - n_count(tb, ta, &t) as i64;
                if n != 0 {
                    out.add_term(t, &cd * rat(n));
                }
            }
        }
    }
    out
}

/// Evaluates the enveloping-algebra word `Z_(w[0]) ... Z_(w[k-1])`
/// against an algebra element: the empty word is the counit, a single
/// generator reads off the matching single-tree coefficient, and longer
/// words recurse through the coproduct.
pub fn pair(word: &[RootedTree], x: &AlgebraElement) -> Rational {
    match word.split_first() {
        None => counit(x),
        Some((head, rest)) => {
            if rest.is_empty() {
                return x.coefficient(&Forest::single(head.clone()));
            }
            let mut right = AlgebraElement::zero();
            for (key, c) in coproduct(x).terms() {
                let left = key[0].trees();
                if left.len() == 1 && &left[0] == head {
                    right.add_term(key[1].clone(), c.clone());
                }
            }
            pair(rest, &right)
        }
    }
}

/// [`pair`] recursing on the last letter instead of the first; the two
/// agree by coassociativity.
#[cfg(test)]
pub(crate) fn pair_right(word: &[RootedTree], x: &AlgebraElement) -> Rational {
    match word.split_last() {
        None => counit(x),
        Some((last, init)) => {
            if init.is_empty() {
                return x.coefficient(&Forest::single(last.clone()));
            }
            let mut left = AlgebraElement::zero();
            for (key, c) in coproduct(x).terms() {
                let right = key[1].trees();
                if right.len() == 1 && &right[0] == last {
                    left.add_term(key[0].clone(), c.clone());
                }
            }
            pair_right(init, &left)
        }
    }
}

/// All enveloping-algebra words of the given total weight, in
/// depth-first order over the first letter.
pub fn enveloping_words(weight: usize) -> Vec<Vec<RootedTree>> {
    if weight == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for w in 1..=weight {
        for t in enumerate_trees(w) {
            for tail in enveloping_words(weight - w) {
                let mut word = Vec::with_capacity(tail.len() + 1);
                word.push(t.clone());
                word.extend(tail);
                out.push(word);
            }
        }
    }
    out
}
