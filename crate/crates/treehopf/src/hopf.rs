//! The Hopf structure on the algebra of forests.
//!
//! The coproduct of a tree enumerates admissible cuts,
//! `crown (x) trunk`, plus the two trivial terms; it extends
//! multiplicatively to forests and linearly to elements. The antipode of
//! a tree sums over all cuts (including the empty one) with sign
//! `(-1)^(edges removed + 1)`, multiplying crown and trunk back
//! together; an independent recursive form derived from the convolution
//! identity serves as a cross-check.

use alloc::collections::BTreeMap;
use alloc::vec;

use num_traits::{One, Zero};

use crate::algebra::{AlgebraElement, Rational, TensorElement};
use crate::trees::{admissible_cuts, all_cuts, Forest, RootedTree};

/// Coproduct of a single tree: `1 (x) t + t (x) 1` plus one term per
/// admissible cut.
pub fn coproduct_tree(t: &RootedTree) -> TensorElement {
    let mut out = TensorElement::zero(2);
    let whole = Forest::single(t.clone());
    out.add_term(vec![Forest::empty(), whole.clone()], Rational::one());
    out.add_term(vec![whole, Forest::empty()], Rational::one());
    for cut in admissible_cuts(t) {
        out.add_term(
            vec![cut.crown().clone(), Forest::single(cut.trunk().clone())],
            Rational::one(),
        );
    }
    out
}

/// Coproduct of a basis forest: the componentwise product of its trees'
/// coproducts.
pub fn coproduct_forest(f: &Forest) -> TensorElement {
    let mut out = TensorElement::tensor(&[AlgebraElement::one(), AlgebraElement::one()]);
    for t in f.trees() {
        out = out.mul(&coproduct_tree(t));
    }
    out
}

/// Linear extension of the coproduct.
pub fn coproduct(x: &AlgebraElement) -> TensorElement {
    let mut out = TensorElement::zero(2);
    for (f, c) in x.terms() {
        out.add_assign(&coproduct_forest(f).scale(c));
    }
    out
}

/// The counit: the coefficient of the empty forest.
pub fn counit(x: &AlgebraElement) -> Rational {
    x.scalar_part()
}

fn reduced_coproduct_forest(f: &Forest) -> TensorElement {
    if f.is_empty() {
        return TensorElement::zero(2);
    }
    let mut out = coproduct_forest(f);
    out.add_term(vec![Forest::empty(), f.clone()], -Rational::one());
    out.add_term(vec![f.clone(), Forest::empty()], -Rational::one());
    out
}

/// Reduced coproduct: both trivial legs removed. On basis forests this
/// is the sum over genuine cuts only; the unit maps to zero.
pub fn reduced_coproduct(x: &AlgebraElement) -> TensorElement {
    let mut out = TensorElement::zero(2);
    for (f, c) in x.terms() {
        out.add_assign(&reduced_coproduct_forest(f).scale(c));
    }
    out
}

/// Iterated reduced coproduct, a rank-`k+1` tensor. Step zero is
/// `x - counit(x) 1`; each further step expands the leftmost slot.
pub fn iterated_reduced(x: &AlgebraElement, k: usize) -> TensorElement {
    if k == 0 {
        let centered = x.sub(&AlgebraElement::scalar(counit(x)));
        return TensorElement::from_element(&centered);
    }
    let mut acc = reduced_coproduct(x);
    for _ in 2..=k {
        acc = acc.expand_slot(0, reduced_coproduct_forest);
    }
    acc
}

/// Whether `Delta(x) = x (x) 1 + 1 (x) x`.
pub fn is_primitive(x: &AlgebraElement) -> bool {
    counit(x).is_zero() && reduced_coproduct(x).is_zero()
}

fn antipode_tree(t: &RootedTree) -> AlgebraElement {
    let mut out = AlgebraElement::from_tree(t.clone()).neg();
    for cut in all_cuts(t) {
        let forest = cut.crown().product(&Forest::single(cut.trunk().clone()));
        let sign = if cut.size() % 2 == 0 { -Rational::one() } else { Rational::one() };
        out.add_term(forest, sign);
    }
    out
}

fn antipode_forest(f: &Forest) -> AlgebraElement {
    let mut out = AlgebraElement::one();
    for t in f.trees() {
        out = out.mul(&antipode_tree(t));
    }
    out
}

/// Antipode via the all-cuts expansion, extended multiplicatively and
/// linearly.
pub fn antipode(x: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (f, c) in x.terms() {
        out.add_assign(&antipode_forest(f).scale(c));
    }
    out
}

/// Antipode via the recursion `S(t) = -t - sum S(crown) trunk` over
/// admissible cuts, the convolution identity unrolled by weight.
/// Independent of [`antipode`]; used to cross-check it.
pub fn antipode_by_convolution(x: &AlgebraElement) -> AlgebraElement {
    let mut memo: BTreeMap<RootedTree, AlgebraElement> = BTreeMap::new();
    let mut out = AlgebraElement::zero();
    for (f, c) in x.terms() {
        out.add_assign(&antipode_forest_rec(f, &mut memo).scale(c));
    }
    out
}

fn antipode_forest_rec(
    f: &Forest,
    memo: &mut BTreeMap<RootedTree, AlgebraElement>,
) -> AlgebraElement {
    let mut out = AlgebraElement::one();
    for t in f.trees() {
        let s = antipode_tree_rec(t, memo);
        out = out.mul(&s);
    }
    out
}

fn antipode_tree_rec(
    t: &RootedTree,
    memo: &mut BTreeMap<RootedTree, AlgebraElement>,
) -> AlgebraElement {
    if let Some(v) = memo.get(t) {
        return v.clone();
    }
    let mut out = AlgebraElement::from_tree(t.clone()).neg();
    for cut in admissible_cuts(t) {
        let s_crown = antipode_forest_rec(cut.crown(), memo);
        let trunk = AlgebraElement::from_tree(cut.trunk().clone());
        out.add_assign(&s_crown.mul(&trunk).neg());
    }
    memo.insert(t.clone(), out.clone());
    out
}
