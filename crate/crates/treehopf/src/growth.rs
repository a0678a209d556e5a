//! Natural growth, growth chains, and the chain decomposition of the
//! algebra.
//!
//! The natural growth `graft(M, N)` attaches the whole forest `M` as
//! extra children of each vertex of `N` in turn, averaging over the
//! `weight(N)` placements; `graft(M, 1) = 0` and `graft(1, N) = N`. A
//! growth chain folds a list of primitive elements left to right:
//! `chain([p, q, r]) = (p graft q) graft r`. The images of the length-j
//! chain maps, together with the unit, decompose the whole algebra; the
//! projection onto the length-1 part is `pi1`, computed by the
//! recursion `pi1(F) = F - sum F' graft pi1(F'')` over the reduced
//! coproduct.
//!
//! [`BasisTables`] caches, per weight: the forest basis, a primitive
//! basis extracted from the `pi1` scan, the chain-key basis, and the
//! inverted chain matrix used by [`BasisTables::decompose`].

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::algebra::{AlgebraElement, Rational};
use crate::hopf::{counit, is_primitive, iterated_reduced, reduced_coproduct};
use crate::linalg;
use crate::primitives::PrimitiveBasis;
use crate::trees::{enumerate_forests, Forest, RootedTree};

/// Natural growth on basis forests.
fn graft_forests(m: &Forest, n: &Forest) -> AlgebraElement {
    if n.is_empty() {
        return AlgebraElement::zero();
    }
    let coeff = Rational::one() / Rational::from_integer(n.weight().into());
    let mut out = AlgebraElement::zero();
    for (i, tree) in n.trees().iter().enumerate() {
        for v in 0..tree.weight() {
            let grown = tree.grow_at(v, m.trees());
            let mut trees: Vec<RootedTree> = n.trees().to_vec();
            trees[i] = grown;
            out.add_term(Forest::from_trees(trees), coeff.clone());
        }
    }
    out
}

/// Bilinear natural growth of elements.
pub fn graft(m: &AlgebraElement, n: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (f, c) in m.terms() {
        for (g, d) in n.terms() {
            out.add_assign(&graft_forests(f, g).scale(&(c * d)));
        }
    }
    out
}

/// Growth-module errors.
#[derive(Clone, PartialEq, Eq)]
pub enum GrowthError {
    /// A chain input at this position is not primitive.
    NotPrimitive { position: usize },
}

impl fmt::Display for GrowthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthError::NotPrimitive { position } => {
                write!(f, "chain input {position} is not primitive")
            }
        }
    }
}

impl fmt::Debug for GrowthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl core::error::Error for GrowthError {}

/// Left fold of natural growth over primitive inputs; the empty list
/// gives the unit. Inputs are checked for primitivity.
pub fn chain(ps: &[AlgebraElement]) -> Result<AlgebraElement, GrowthError> {
    for (i, p) in ps.iter().enumerate() {
        if !is_primitive(p) {
            return Err(GrowthError::NotPrimitive { position: i });
        }
    }
    Ok(chain_unchecked(ps))
}

pub(crate) fn chain_unchecked(ps: &[AlgebraElement]) -> AlgebraElement {
    let Some(first) = ps.first() else {
        return AlgebraElement::one();
    };
    let mut acc = first.clone();
    for p in &ps[1..] {
        acc = graft(&acc, p);
    }
    acc
}

/// Least `k` with the k-fold reduced coproduct of `x` zero; `None` for
/// the zero element. Step zero kills exactly the scalars.
pub fn deg_p(x: &AlgebraElement) -> Option<usize> {
    if x.is_zero() {
        return None;
    }
    let mut k = 0;
    let mut cur = iterated_reduced(x, 0);
    loop {
        if cur.is_zero() {
            return Some(k);
        }
        k += 1;
        cur = iterated_reduced(x, k);
    }
}

fn pi1_forest(f: &Forest, memo: &mut BTreeMap<Forest, AlgebraElement>) -> AlgebraElement {
    if f.is_empty() {
        return AlgebraElement::zero();
    }
    if let Some(v) = memo.get(f) {
        return v.clone();
    }
    let mut acc = AlgebraElement::from_forest(f.clone());
    let reduced = reduced_coproduct(&AlgebraElement::from_forest(f.clone()));
    for (key, c) in reduced.terms() {
        let tail = pi1_forest(&key[1], memo);
        if tail.is_zero() {
            continue;
        }
        let head = AlgebraElement::from_forest(key[0].clone());
        acc.add_assign(&graft(&head, &tail).scale(&-c.clone()));
    }
    memo.insert(f.clone(), acc.clone());
    acc
}

fn pi1_with_memo(x: &AlgebraElement, memo: &mut BTreeMap<Forest, AlgebraElement>) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (f, c) in x.terms() {
        out.add_assign(&pi1_forest(f, memo).scale(c));
    }
    out
}

/// Projection onto the length-1 chain part (the totally primitive
/// subspace), along the unit and all longer chain images.
pub fn pi1(x: &AlgebraElement) -> AlgebraElement {
    let mut memo = BTreeMap::new();
    pi1_with_memo(x, &mut memo)
}

/// A primitive-basis vector: weight and index into that weight's basis.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimRef {
    pub weight: usize,
    pub index: usize,
}

impl fmt::Debug for PrimRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.weight, self.index)
    }
}

/// A chain of primitive-basis vectors, leftmost applied last.
pub type ChainKey = Vec<PrimRef>;

/// Result of [`BasisTables::decompose`]: the scalar part plus one
/// component per chain length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decomposition {
    pub scalar: Rational,
    pub components: BTreeMap<usize, AlgebraElement>,
}

impl Decomposition {
    /// Recombines the parts; equals the decomposed element.
    pub fn total(&self) -> AlgebraElement {
        let mut out = AlgebraElement::scalar(self.scalar.clone());
        for x in self.components.values() {
            out.add_assign(x);
        }
        out
    }

    /// Largest chain length with a nonzero component.
    pub fn max_length(&self) -> Option<usize> {
        self.components.keys().copied().max()
    }
}

struct WeightTable {
    forests: Vec<Forest>,
    index: BTreeMap<Forest, usize>,
    prim: PrimitiveBasis,
    chains: Option<ChainData>,
}

struct ChainData {
    keys: Vec<ChainKey>,
    inverse: Vec<Vec<Rational>>,
}

/// Per-weight caches: forest bases, primitive bases from the `pi1`
/// scan, chain bases and the inverted chain matrices. All entries are
/// built lazily and exactly.
pub struct BasisTables {
    weights: BTreeMap<usize, WeightTable>,
    pi1_memo: BTreeMap<Forest, AlgebraElement>,
    value_memo: BTreeMap<ChainKey, AlgebraElement>,
}

impl Default for BasisTables {
    fn default() -> Self {
        Self::new()
    }
}

impl BasisTables {
    pub fn new() -> Self {
        BasisTables {
            weights: BTreeMap::new(),
            pi1_memo: BTreeMap::new(),
            value_memo: BTreeMap::new(),
        }
    }

    /// Memoized [`pi1`].
    pub fn pi1(&mut self, x: &AlgebraElement) -> AlgebraElement {
        pi1_with_memo(x, &mut self.pi1_memo)
    }

    fn ensure_prim(&mut self, w: usize) {
        if w == 0 || self.weights.contains_key(&w) {
            return;
        }
        let forests = enumerate_forests(w);
        let index: BTreeMap<Forest, usize> =
            forests.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let mut ech = linalg::Echelon::new(forests.len());
        let mut elements = Vec::new();
        let mut provenance = Vec::new();
        for f in &forests {
            let v = pi1_forest(f, &mut self.pi1_memo);
            if v.is_zero() {
                continue;
            }
            if ech.insert(element_vector(&v, &index, forests.len())) {
                elements.push(v);
                provenance.push(f.clone());
            }
        }
        let prim = PrimitiveBasis::from_scan(w, elements, provenance);
        self.weights.insert(w, WeightTable { forests, index, prim, chains: None });
    }

    fn ensure_chains(&mut self, w: usize) {
        if w == 0 {
            return;
        }
        for v in 1..=w {
            self.ensure_prim(v);
        }
        if self.weights[&w].chains.is_some() {
            return;
        }
        let mut keys: Vec<ChainKey> = Vec::new();
        for len in 1..=w {
            for comp in compositions(w, len) {
                let mut partial: Vec<ChainKey> = vec![Vec::new()];
                for &a in &comp {
                    let dim = self.weights[&a].prim.len();
                    let mut next = Vec::with_capacity(partial.len() * dim);
                    for key in &partial {
                        for i in 0..dim {
                            let mut k = key.clone();
                            k.push(PrimRef { weight: a, index: i });
                            next.push(k);
                        }
                    }
                    partial = next;
                }
                keys.extend(partial);
            }
        }
        let values: Vec<AlgebraElement> =
            keys.iter().map(|k| self.chain_value(k)).collect();
        let tbl = self.weights.get(&w).unwrap();
        let n = tbl.forests.len();
        assert_eq!(
            keys.len(),
            n,
            "chain count must match the forest dimension at weight {w}"
        );
        let mut matrix: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; n];
        for (col, v) in values.iter().enumerate() {
            for (f, c) in v.terms() {
                matrix[tbl.index[f]][col] = c.clone();
            }
        }
        let inverse = linalg::invert(&matrix)
            .expect("chain basis failed to span; this is a fatal invariant violation");
        let tbl = self.weights.get_mut(&w).unwrap();
        tbl.chains = Some(ChainData { keys, inverse });
    }

    /// The primitive basis at one weight.
    pub fn primitive_basis(&mut self, w: usize) -> &PrimitiveBasis {
        assert!(w >= 1, "primitive basis is graded by weight >= 1");
        self.ensure_prim(w);
        &self.weights[&w].prim
    }

    /// The basis element a [`PrimRef`] points at.
    pub fn primitive_element(&mut self, r: &PrimRef) -> AlgebraElement {
        self.ensure_prim(r.weight);
        self.weights[&r.weight].prim.element(r.index).clone()
    }

    /// All forests of one weight, ascending.
    pub fn forests(&mut self, w: usize) -> &[Forest] {
        self.ensure_prim(w);
        &self.weights[&w].forests
    }

    /// Chain keys of one total weight, ordered by length then key.
    pub fn chain_keys(&mut self, w: usize) -> &[ChainKey] {
        self.ensure_chains(w);
        self.weights[&w].chains.as_ref().unwrap().keys.as_slice()
    }

    /// The algebra value of a chain key (memoized fold of grafts).
    pub fn chain_value(&mut self, key: &ChainKey) -> AlgebraElement {
        if key.is_empty() {
            return AlgebraElement::one();
        }
        if let Some(v) = self.value_memo.get(key) {
            return v.clone();
        }
        let prefix = key[..key.len() - 1].to_vec();
        let head = self.chain_value(&prefix);
        let last = self.primitive_element(&key[key.len() - 1]);
        let v = if prefix.is_empty() { last } else { graft(&head, &last) };
        self.value_memo.insert(key.clone(), v.clone());
        v
    }

    /// Exact chain coordinates of an element: the scalar part plus a
    /// coefficient per chain key.
    pub fn chain_coordinates(
        &mut self,
        x: &AlgebraElement,
    ) -> (Rational, BTreeMap<ChainKey, Rational>) {
        let scalar = counit(x);
        let mut coords = BTreeMap::new();
        for (w, xw) in x.weight_split() {
            if w == 0 {
                continue;
            }
            self.ensure_chains(w);
            let tbl = &self.weights[&w];
            let data = tbl.chains.as_ref().unwrap();
            let vec = element_vector(&xw, &tbl.index, tbl.forests.len());
            let sol = linalg::mat_vec(&data.inverse, &vec);
            for (i, c) in sol.into_iter().enumerate() {
                if !c.is_zero() {
                    coords.insert(data.keys[i].clone(), c);
                }
            }
        }
        (scalar, coords)
    }

    /// Splits `x` into its scalar part and one component per chain
    /// length; the components recombine to `x`.
    pub fn decompose(&mut self, x: &AlgebraElement) -> Decomposition {
        let (scalar, coords) = self.chain_coordinates(x);
        let mut components: BTreeMap<usize, AlgebraElement> = BTreeMap::new();
        for (key, c) in coords {
            let value = self.chain_value(&key);
            components.entry(key.len()).or_default().add_assign(&value.scale(&c));
        }
        components.retain(|_, v| !v.is_zero());
        Decomposition { scalar, components }
    }

    /// The length-`j` component of the chain decomposition.
    pub fn pi_j(&mut self, x: &AlgebraElement, j: usize) -> AlgebraElement {
        assert!(j >= 1, "chain components are indexed from 1");
        self.decompose(x).components.remove(&j).unwrap_or_else(AlgebraElement::zero)
    }
}

/// One-shot [`BasisTables::decompose`].
pub fn decompose(x: &AlgebraElement) -> Decomposition {
    BasisTables::new().decompose(x)
}

/// One-shot [`BasisTables::pi_j`].
pub fn pi_j(x: &AlgebraElement, j: usize) -> AlgebraElement {
    BasisTables::new().pi_j(x, j)
}

pub(crate) fn element_vector(
    x: &AlgebraElement,
    index: &BTreeMap<Forest, usize>,
    len: usize,
) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    for (f, c) in x.terms() {
        let i = *index.get(f).expect("forest outside the indexed weight slice");
        v[i] = c.clone();
    }
    v
}

/// Ordered compositions of `n` into `k` positive parts, lexicographic.
pub(crate) fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for a in 1..=(n + 1 - k) {
            cur.push(a);
            rec(n - a, k - 1, cur, out);
            cur.pop();
        }
    }
    if k >= 1 && k <= n {
        rec(n, k, &mut cur, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_element, rat, ratio, TensorElement};
    use crate::hopf::coproduct;
    use crate::primitives::ladder_primitive;

    fn e(s: &str) -> AlgebraElement {
        parse_element(s).unwrap()
    }

    fn ladder_elem(n: usize) -> AlgebraElement {
        AlgebraElement::from_tree(RootedTree::ladder(n))
    }

    #[test]
    fn graft_goldens() {
        // Growing a single node on a single node averages to the ladder.
        assert_eq!(graft(&e("[]"), &e("[]")), e("1 [[]]"));
        // Ladder onto the two-vertex ladder splits half and half.
        assert_eq!(graft(&e("[]"), &e("[[]]")), e("1/2 [[][]] + 1/2 [[[]]]"));
        // Unit conventions.
        assert_eq!(graft(&e("[]"), &AlgebraElement::one()), AlgebraElement::zero());
        assert_eq!(graft(&AlgebraElement::one(), &e("[[]]")), e("1 [[]]"));
    }

    #[test]
    fn graft_figure_identities() {
        // Ladder grafted onto the cherry.
        assert_eq!(
            graft(&e("[[]]"), &e("[[][]]")),
            e("1/3 [[[]][][]] + 2/3 [[[[]]][]]")
        );
        // Two loose nodes grafted onto the ladder of weight 3: both land
        // on the same vertex.
        assert_eq!(
            graft(&e("[] []"), &e("[[[]]]")),
            e("1/3 [[[]][][]] + 1/3 [[[][][]]] + 1/3 [[[[][]]]]")
        );
        // Ladder grafted onto two loose nodes.
        assert_eq!(graft(&e("[[]]"), &e("[] []")), e("1 [[[]]] []"));
    }

    #[test]
    fn graft_is_weight_additive() {
        let m = e("1 [[]] + 2 []");
        let n = e("1 [[][]]");
        for (f, _) in graft(&m, &n).terms() {
            assert!(f.weight() == 5 || f.weight() == 4);
        }
        let hom = graft(&e("1 [[]]"), &n);
        assert_eq!(hom.is_homogeneous(), Some(5));
    }

    #[test]
    fn growth_by_primitive_is_cointeractive() {
        // Delta(x graft p) = (x graft p) (x) 1 + (id (x) graft p) Delta(x)
        // for primitive p.
        let p2 = ladder_primitive(2);
        for x in [e("1 [[]]"), e("1 [] []"), e("1 [[][]] + 2 []")] {
            let grown = graft(&x, &p2);
            let lhs = coproduct(&grown);
            let mut rhs = coproduct(&x).apply_slot(1, |f| {
                graft(&AlgebraElement::from_forest(f.clone()), &p2)
            });
            rhs.add_assign(&TensorElement::tensor(&[grown, AlgebraElement::one()]));
            assert_eq!(lhs, rhs, "failed for x = {x}");
        }
    }

    #[test]
    fn chains_fold_left() {
        let l1 = ladder_elem(1);
        assert_eq!(chain(&[]).unwrap(), AlgebraElement::one());
        assert_eq!(chain(&[l1.clone(), l1.clone()]).unwrap(), ladder_elem(2));
        assert_eq!(chain(&[l1.clone(), l1.clone(), l1.clone()]).unwrap(), ladder_elem(3));
        assert_eq!(
            chain(&[ladder_elem(1)]).unwrap(),
            ladder_elem(1)
        );
        let err = chain(&[l1, ladder_elem(2)]).unwrap_err();
        assert_eq!(err, GrowthError::NotPrimitive { position: 1 });
    }

    #[test]
    fn reduced_coproduct_deconcatenates_chains() {
        let ps = [ladder_primitive(2), ladder_primitive(1), ladder_primitive(3)];
        let value = chain(&ps).unwrap();
        let mut expect = TensorElement::zero(2);
        for split in 1..ps.len() {
            let left = chain_unchecked(&ps[..split]);
            let right = chain_unchecked(&ps[split..]);
            expect.add_assign(&TensorElement::pair(&left, &right));
        }
        assert_eq!(reduced_coproduct(&value), expect);
    }

    #[test]
    fn iterated_reduced_recovers_chain_tensor() {
        let ps = [ladder_primitive(1), ladder_primitive(2), ladder_primitive(1)];
        let value = chain(&ps).unwrap();
        let recovered = iterated_reduced(&value, ps.len() - 1);
        assert_eq!(recovered, TensorElement::tensor(&ps));
        assert!(iterated_reduced(&value, ps.len()).is_zero());
        assert_eq!(deg_p(&value), Some(ps.len()));
    }

    #[test]
    fn deg_p_goldens() {
        assert_eq!(deg_p(&AlgebraElement::zero()), None);
        assert_eq!(deg_p(&AlgebraElement::one()), Some(0));
        assert_eq!(deg_p(&AlgebraElement::scalar(rat(7))), Some(0));
        for n in 1..=5 {
            assert_eq!(deg_p(&ladder_elem(n)), Some(n));
        }
        assert_eq!(deg_p(&ladder_primitive(4)), Some(1));
        assert_eq!(deg_p(&e("1 1 + 1 []")), Some(1));
    }

    #[test]
    fn pi1_goldens() {
        assert_eq!(pi1(&e("[]")), e("[]"));
        assert_eq!(pi1(&e("[] []")), e("1 [] [] + -2 [[]]"));
        assert_eq!(
            pi1(&e("[] [] []")),
            e("1 [] [] [] + -3 [[]] [] + 3 [[[]]]")
        );
        assert!(pi1(&AlgebraElement::one()).is_zero());
    }

    #[test]
    fn pi1_kills_trees_and_grown_forests() {
        for w in 2..=5 {
            for t in crate::trees::enumerate_trees(w) {
                assert!(pi1(&AlgebraElement::from_tree(t)).is_zero());
            }
        }
        // pi1 annihilates anything grown from a nonempty forest.
        let p = ladder_primitive(2);
        for f in ["1 [[]]", "1 [] []", "1 [[][]] + 1 []"] {
            let grown = graft(&e(f), &p);
            assert!(pi1(&grown).is_zero(), "pi1(({f}) graft p2) != 0");
        }
    }

    #[test]
    fn pi1_fixes_primitives_and_is_idempotent() {
        for i in 1..=4 {
            let p = ladder_primitive(i);
            assert_eq!(pi1(&p), p);
        }
        for f in ["1 [] []", "1 [[]] []", "1 [] [] []"] {
            let img = pi1(&e(f));
            assert!(crate::hopf::is_primitive(&img));
            assert_eq!(pi1(&img), img);
        }
    }

    #[test]
    fn pi1_product_of_primitives_identity() {
        // pi1(p q) = p q - p graft q - q graft p for primitives p, q.
        for (i, j) in [(1, 1), (1, 2), (2, 2), (1, 3)] {
            let p = ladder_primitive(i);
            let q = ladder_primitive(j);
            let lhs = pi1(&p.mul(&q));
            let rhs = p.mul(&q).sub(&graft(&p, &q)).sub(&graft(&q, &p));
            assert_eq!(lhs, rhs, "failed for ({i}, {j})");
        }
    }

    #[test]
    fn decompose_roundtrips_and_grades() {
        let mut tables = BasisTables::new();
        let x = e("1 [[]] + 1 [] [] + 2 [] + -3 1 + 1/2 [[][]]");
        let d = tables.decompose(&x);
        assert_eq!(d.scalar, rat(-3));
        assert_eq!(d.total(), x);
        assert_eq!(d.max_length(), deg_p(&x));
        // Components are idempotent under renewed decomposition.
        for (j, comp) in &d.components {
            let again = tables.decompose(comp);
            assert_eq!(again.components.len(), 1);
            assert_eq!(&again.components[j], comp);
            assert!(again.scalar.is_zero());
        }
    }

    #[test]
    fn pi_j_matches_pi1_and_chain_split() {
        let mut tables = BasisTables::new();
        // l1^2 = (l1^2 - 2 l2) + 2 l2 splits across lengths 1 and 2.
        let sq = e("1 [] []");
        assert_eq!(tables.pi_j(&sq, 1), e("1 [] [] + -2 [[]]"));
        assert_eq!(tables.pi_j(&sq, 2), e("2 [[]]"));
        assert!(tables.pi_j(&sq, 3).is_zero());
        // The length-1 projection is pi1 itself.
        for f in ["1 [[][]]", "1 [[]] []", "1 [] [] + 1 [[]]"] {
            assert_eq!(tables.pi_j(&e(f), 1), pi1(&e(f)), "pi_j(1) != pi1 on {f}");
        }
        assert_eq!(deg_p(&sq), Some(2));
    }

    #[test]
    fn chain_matrix_dimensions_match_forest_counts() {
        let mut tables = BasisTables::new();
        for w in 1..=5 {
            let keys = tables.chain_keys(w).to_vec();
            assert_eq!(keys.len(), tables.forests(w).len());
            // Ordered by length, then lexicographically.
            for pair in keys.windows(2) {
                assert!(
                    (pair[0].len(), &pair[0]) <= (pair[1].len(), &pair[1]),
                    "chain keys out of order at weight {w}"
                );
            }
        }
    }

    #[test]
    fn compositions_are_lexicographic_and_complete() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(compositions(3, 3), vec![vec![1, 1, 1]]);
        assert!(compositions(2, 3).is_empty());
        let total: usize = (1..=5).map(|k| compositions(5, k).len()).sum();
        assert_eq!(total, 16); // 2^(n-1) compositions of n = 5
    }

    #[test]
    fn scalar_grafts() {
        // Scalars act through the conventions: 1 graft N = N.
        let n = e("1 [[]] + 1 []");
        assert_eq!(graft(&AlgebraElement::scalar(ratio(3, 2)), &n), n.scale(&ratio(3, 2)));
    }
}
