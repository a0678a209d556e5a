//! The graded algebra of chains with its shuffle product, and the
//! endomorphisms of the tree algebra.
//!
//! Chains of primitives multiply by shuffling, deconcatenate under the
//! coproduct, and reverse with a sign under the antipode. Bialgebra
//! endomorphisms correspond to tree-indexed families of primitives via
//! a grafting recursion; coalgebra endomorphisms correspond to
//! arity-graded maps on tensor powers of primitives. The two structures
//! meet in an explicit weight- and depth-preserving Hopf isomorphism
//! from the plain product onto the shuffle product.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::algebra::{AlgebraElement, Rational};
use crate::growth::{compositions, element_vector, graft, BasisTables, ChainKey, PrimRef};
use crate::hopf::{coproduct, is_primitive, reduced_coproduct};
use crate::linalg;
use crate::trees::{enumerate_forests, enumerate_trees, Forest, RootedTree};

/// Failure modes for morphism constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismError {
    /// An input exceeds the working truncation bound.
    BoundExceeded { required: usize, bound: usize },
    /// A family value is neither zero nor primitive.
    NotPrimitive,
    /// A tree family is missing a tree within its bound.
    IncompleteFamily,
    /// An oracle failed to behave as a bialgebra endomorphism.
    NotMorphism,
    /// An arity map sends a tensor to a different weight.
    WeightMismatch,
    /// An arity map is keyed by a tuple of the wrong length, or a pure
    /// arity-one operation received a family with higher arities.
    BadArity,
}

impl fmt::Display for MorphismError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismError::BoundExceeded { required, bound } => {
                write!(f, "weight or length {required} exceeds the bound {bound}")
            }
            MorphismError::NotPrimitive => write!(f, "family value is not primitive"),
            MorphismError::IncompleteFamily => {
                write!(f, "family is missing a tree within its bound")
            }
            MorphismError::NotMorphism => {
                write!(f, "map is not a bialgebra endomorphism on the truncation")
            }
            MorphismError::WeightMismatch => {
                write!(f, "arity map does not preserve total weight")
            }
            MorphismError::BadArity => write!(f, "arity map has an inconsistent arity"),
        }
    }
}

impl core::error::Error for MorphismError {}

/// An element of the graded presentation: a scalar plus a combination of
/// chains of primitive-basis vectors, keyed leftmost first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrElement {
    scalar: Rational,
    terms: BTreeMap<ChainKey, Rational>,
}

impl GrElement {
    pub fn zero() -> Self {
        GrElement { scalar: Rational::zero(), terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        GrElement::scalar(Rational::one())
    }

    pub fn scalar(c: Rational) -> Self {
        GrElement { scalar: c, terms: BTreeMap::new() }
    }

    /// A single chain with coefficient one; the empty chain is the unit.
    pub fn from_chain(key: ChainKey) -> Self {
        let mut out = GrElement::zero();
        out.add_term(key, Rational::one());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() && self.terms.is_empty()
    }

    pub fn scalar_part(&self) -> &Rational {
        &self.scalar
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ChainKey, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &[PrimRef]) -> Rational {
        if key.is_empty() {
            return self.scalar.clone();
        }
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, key: ChainKey, c: Rational) {
        if c.is_zero() {
            return;
        }
        if key.is_empty() {
            self.scalar += c;
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            let key: Vec<ChainKey> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &GrElement) -> GrElement {
        let mut out = self.clone();
        out.scalar += &other.scalar;
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GrElement) -> GrElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GrElement {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> GrElement {
        if c.is_zero() {
            return GrElement::zero();
        }
        GrElement {
            scalar: &self.scalar * c,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Largest chain length present.
    pub fn max_length(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.len()).max()
    }
}

fn render_key(key: &[PrimRef]) -> String {
    use fmt::Write;
    let mut s = String::new();
    for (i, r) in key.iter().enumerate() {
        if i > 0 {
            s.push('>');
        }
        let _ = write!(s, "{}:{}", r.weight, r.index);
    }
    s
}

impl fmt::Display for GrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        if !self.scalar.is_zero() {
            write!(f, "{}", self.scalar)?;
            first = false;
        }
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{} {}", c, render_key(k))?;
            first = false;
        }
        Ok(())
    }
}

fn interleave(a: &[PrimRef], b: &[PrimRef], acc: &mut ChainKey, out: &mut Vec<ChainKey>) {
    if a.is_empty() {
        let mut k = acc.clone();
        k.extend_from_slice(b);
        out.push(k);
        return;
    }
    if b.is_empty() {
        let mut k = acc.clone();
        k.extend_from_slice(a);
        out.push(k);
        return;
    }
    acc.push(a[0]);
    interleave(&a[1..], b, acc, out);
    acc.pop();
    acc.push(b[0]);
    interleave(a, &b[1..], acc, out);
    acc.pop();
}

/// All interleavings of two chains preserving the internal order of
/// each; repeated primitives yield repeated keys, i.e. multiplicities.
pub fn shuffles(a: &[PrimRef], b: &[PrimRef]) -> Vec<ChainKey> {
    let mut out = Vec::new();
    interleave(a, b, &mut Vec::new(), &mut out);
    out
}

/// The bilinear shuffle product on the graded presentation.
pub fn shuffle_product(a: &GrElement, b: &GrElement) -> GrElement {
    let mut out = GrElement::zero();
    out.scalar = &a.scalar * &b.scalar;
    for (k, c) in &a.terms {
        out.add_term(k.clone(), c * &b.scalar);
    }
    for (k, c) in &b.terms {
        out.add_term(k.clone(), c * &a.scalar);
    }
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            let c = ca * cb;
            for k in shuffles(ka, kb) {
                out.add_term(k, c.clone());
            }
        }
    }
    out
}

/// The graded antipode: a chain of length `j` maps to its reversal with
/// sign `(-1)^j`; scalars are fixed.
pub fn gr_antipode(a: &GrElement) -> GrElement {
    let mut out = GrElement::scalar(a.scalar.clone());
    for (k, c) in &a.terms {
        let rev: ChainKey = k.iter().rev().copied().collect();
        let signed = if k.len() % 2 == 1 { -c.clone() } else { c.clone() };
        out.add_term(rev, signed);
    }
    out
}

/// Chain coordinates of an algebra element.
pub fn to_gr(x: &AlgebraElement, tables: &mut BasisTables) -> GrElement {
    let (scalar, coords) = tables.chain_coordinates(x);
    let mut out = GrElement::scalar(scalar);
    for (k, c) in coords {
        out.add_term(k, c);
    }
    out
}

/// Evaluates chains back to algebra elements.
pub fn from_gr(a: &GrElement, tables: &mut BasisTables) -> AlgebraElement {
    let mut out = AlgebraElement::scalar(a.scalar.clone());
    for (k, c) in &a.terms {
        out.add_assign(&tables.chain_value(k).scale(c));
    }
    out
}

/// The shuffle product transported onto algebra elements through the
/// chain coordinates.
pub fn star_product(
    x: &AlgebraElement,
    y: &AlgebraElement,
    tables: &mut BasisTables,
) -> AlgebraElement {
    let gx = to_gr(x, tables);
    let gy = to_gr(y, tables);
    from_gr(&shuffle_product(&gx, &gy), tables)
}

/// Checks that the top chain-length part of the plain product of two
/// chain values equals the evaluated shuffle of the chains.
pub fn leading_term_check(a: &ChainKey, b: &ChainKey, tables: &mut BasisTables) -> bool {
    assert!(!a.is_empty() && !b.is_empty(), "chains must be nonempty");
    let total = a.len() + b.len();
    let va = tables.chain_value(a);
    let vb = tables.chain_value(b);
    let projected = tables.pi_j(&va.mul(&vb), total);
    let shuffled = shuffle_product(&GrElement::from_chain(a.clone()), &GrElement::from_chain(b.clone()));
    projected == from_gr(&shuffled, tables)
}

/// A total assignment of a primitive element to every tree up to a
/// weight bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFamily {
    bound: usize,
    map: BTreeMap<RootedTree, AlgebraElement>,
}

impl TreeFamily {
    /// Validates totality up to the bound and primitivity of all values
    /// (zero values are allowed).
    pub fn new(
        bound: usize,
        map: BTreeMap<RootedTree, AlgebraElement>,
    ) -> Result<Self, MorphismError> {
        for w in 1..=bound {
            for t in enumerate_trees(w) {
                if !map.contains_key(&t) {
                    return Err(MorphismError::IncompleteFamily);
                }
            }
        }
        for (t, v) in &map {
            if t.weight() > bound {
                return Err(MorphismError::BoundExceeded { required: t.weight(), bound });
            }
            if !v.is_zero() && !is_primitive(v) {
                return Err(MorphismError::NotPrimitive);
            }
        }
        Ok(TreeFamily { bound, map })
    }

    pub fn from_fn(
        bound: usize,
        mut f: impl FnMut(&RootedTree) -> AlgebraElement,
    ) -> Result<Self, MorphismError> {
        let mut map = BTreeMap::new();
        for w in 1..=bound {
            for t in enumerate_trees(w) {
                let v = f(&t);
                map.insert(t, v);
            }
        }
        TreeFamily::new(bound, map)
    }

    /// The family recovering the identity endomorphism: each tree maps
    /// to its chain-length-one projection.
    pub fn identity(bound: usize) -> Self {
        let mut tables = BasisTables::new();
        TreeFamily::from_fn(bound, |t| tables.pi1(&AlgebraElement::from_tree(t.clone())))
            .expect("projections are primitive")
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn get(&self, t: &RootedTree) -> &AlgebraElement {
        self.map.get(t).expect("tree beyond the family bound")
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RootedTree, &AlgebraElement)> {
        self.map.iter()
    }
}

fn phi_tree(
    t: &RootedTree,
    family: &TreeFamily,
    memo: &mut BTreeMap<RootedTree, AlgebraElement>,
) -> AlgebraElement {
    if let Some(v) = memo.get(t) {
        return v.clone();
    }
    let mut acc = family.get(t).clone();
    let red = reduced_coproduct(&AlgebraElement::from_tree(t.clone()));
    for (key, c) in red.terms() {
        let trunk = key[1].trees();
        debug_assert_eq!(trunk.len(), 1, "trunk of a tree cut is connected");
        let left = phi_forest(&key[0], family, memo);
        acc.add_assign(&graft(&left, family.get(&trunk[0])).scale(c));
    }
    memo.insert(t.clone(), acc.clone());
    acc
}

fn phi_forest(
    f: &Forest,
    family: &TreeFamily,
    memo: &mut BTreeMap<RootedTree, AlgebraElement>,
) -> AlgebraElement {
    let mut acc = AlgebraElement::one();
    for t in f.trees() {
        acc = acc.mul(&phi_tree(t, family, memo));
    }
    acc
}

/// The bialgebra endomorphism attached to a tree family: on a tree it is
/// the family value plus the grafting of its own values on the cut
/// pieces; extended multiplicatively and linearly.
pub fn phi_family(family: &TreeFamily, x: &AlgebraElement) -> Result<AlgebraElement, MorphismError> {
    if let Some(w) = x.max_weight() {
        if w > family.bound() {
            return Err(MorphismError::BoundExceeded { required: w, bound: family.bound() });
        }
    }
    let mut memo = BTreeMap::new();
    let mut out = AlgebraElement::zero();
    for (f, c) in x.terms() {
        out.add_assign(&phi_forest(f, family, &mut memo).scale(c));
    }
    Ok(out)
}

/// Reads the family of a bialgebra endomorphism off its values on trees
/// (chain-length-one projections), then verifies the roundtrip on every
/// forest within the bound.
pub fn recover_family<F>(oracle: F, bound: usize) -> Result<TreeFamily, MorphismError>
where
    F: Fn(&AlgebraElement) -> AlgebraElement,
{
    let mut tables = BasisTables::new();
    let mut map = BTreeMap::new();
    for w in 1..=bound {
        for t in enumerate_trees(w) {
            let image = oracle(&AlgebraElement::from_tree(t.clone()));
            map.insert(t, tables.pi1(&image));
        }
    }
    let family = TreeFamily::new(bound, map).expect("projections are primitive");
    for w in 1..=bound {
        for f in enumerate_forests(w) {
            let x = AlgebraElement::from_forest(f);
            if phi_family(&family, &x)? != oracle(&x) {
                return Err(MorphismError::NotMorphism);
            }
        }
    }
    Ok(family)
}

/// A linear combination of primitive-basis vectors of one weight.
pub type PrimCombo = BTreeMap<PrimRef, Rational>;

/// An arity-graded family of maps from tensor powers of primitives to
/// primitives, given over the computed bases. Absent arities and absent
/// tuples act as zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UFamily {
    bound: usize,
    maps: BTreeMap<usize, BTreeMap<Vec<PrimRef>, PrimCombo>>,
}

impl UFamily {
    /// Validates arity keys and weight additivity: a tuple of total
    /// weight `w` must map into the weight-`w` primitives.
    pub fn new(
        bound: usize,
        maps: BTreeMap<usize, BTreeMap<Vec<PrimRef>, PrimCombo>>,
    ) -> Result<Self, MorphismError> {
        for (arity, m) in &maps {
            if *arity == 0 || *arity > bound {
                return Err(MorphismError::BadArity);
            }
            for (key, combo) in m {
                if key.len() != *arity {
                    return Err(MorphismError::BadArity);
                }
                let w: usize = key.iter().map(|r| r.weight).sum();
                if combo.keys().any(|r| r.weight != w) {
                    return Err(MorphismError::WeightMismatch);
                }
            }
        }
        Ok(UFamily { bound, maps })
    }

    /// The arity-one identity on all primitive bases of weight at most
    /// `weight_max`, declared up to chain length `bound`.
    pub fn identity(bound: usize, weight_max: usize, tables: &mut BasisTables) -> Self {
        let mut arity1 = BTreeMap::new();
        for w in 1..=weight_max {
            for i in 0..tables.primitive_basis(w).len() {
                let r = PrimRef { weight: w, index: i };
                arity1.insert(vec![r], BTreeMap::from([(r, Rational::one())]));
            }
        }
        UFamily::new(bound, BTreeMap::from([(1, arity1)])).expect("identity maps are graded")
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    fn lookup(&self, arity: usize, key: &[PrimRef]) -> Option<&PrimCombo> {
        self.maps.get(&arity)?.get(key)
    }
}

/// The coalgebra endomorphism of an arity family: each chain maps to the
/// sum, over all splittings into consecutive blocks, of the chains of
/// blockwise images.
pub fn phi_u(u: &UFamily, x: &GrElement) -> Result<GrElement, MorphismError> {
    let mut out = GrElement::scalar(x.scalar_part().clone());
    for (key, c) in x.terms() {
        let n = key.len();
        if n > u.bound {
            return Err(MorphismError::BoundExceeded { required: n, bound: u.bound });
        }
        for k in 1..=n {
            for comp in compositions(n, k) {
                let mut blocks: Vec<&PrimCombo> = Vec::with_capacity(k);
                let mut pos = 0;
                let mut dead = false;
                for &a in &comp {
                    match u.lookup(a, &key[pos..pos + a]) {
                        Some(combo) if !combo.is_empty() => blocks.push(combo),
                        _ => {
                            dead = true;
                            break;
                        }
                    }
                    pos += a;
                }
                if dead {
                    continue;
                }
                let mut acc: Vec<(ChainKey, Rational)> = vec![(Vec::new(), c.clone())];
                for combo in blocks {
                    let mut next = Vec::with_capacity(acc.len() * combo.len());
                    for (prefix, cp) in &acc {
                        for (r, cr) in combo {
                            let mut k2 = prefix.clone();
                            k2.push(*r);
                            next.push((k2, cp * cr));
                        }
                    }
                    acc = next;
                }
                for (k2, c2) in acc {
                    out.add_term(k2, c2);
                }
            }
        }
    }
    Ok(out)
}

/// An arity family yields a bijective endomorphism exactly when its
/// arity-one part is invertible, checked per weight up to `weight_max`.
pub fn is_invertible(u: &UFamily, weight_max: usize, tables: &mut BasisTables) -> bool {
    for w in 1..=weight_max {
        let len = tables.primitive_basis(w).len();
        if len == 0 {
            continue;
        }
        let mut rows = Vec::with_capacity(len);
        for i in 0..len {
            let mut row = vec![Rational::zero(); len];
            if let Some(combo) = u.lookup(1, &[PrimRef { weight: w, index: i }]) {
                for (r, c) in combo {
                    row[r.index] = c.clone();
                }
            }
            rows.push(row);
        }
        if linalg::invert(&rows).is_none() {
            return false;
        }
    }
    true
}

/// Composes two families supported in arity one; the result represents
/// the composite endomorphism.
pub fn compose_pure(u: &UFamily, v: &UFamily) -> Result<UFamily, MorphismError> {
    if u.maps.keys().any(|&a| a != 1) || v.maps.keys().any(|&a| a != 1) {
        return Err(MorphismError::BadArity);
    }
    let mut arity1: BTreeMap<Vec<PrimRef>, PrimCombo> = BTreeMap::new();
    if let Some(vmap) = v.maps.get(&1) {
        for (key, vcombo) in vmap {
            let mut out: PrimCombo = BTreeMap::new();
            for (mid, cv) in vcombo {
                if let Some(ucombo) = u.lookup(1, &[*mid]) {
                    for (r, cu) in ucombo {
                        let entry = out.entry(*r).or_insert_with(Rational::zero);
                        *entry += cv * cu;
                    }
                }
            }
            out.retain(|_, c| !c.is_zero());
            if !out.is_empty() {
                arity1.insert(key.clone(), out);
            }
        }
    }
    UFamily::new(u.bound.min(v.bound), BTreeMap::from([(1, arity1)]))
}

/// Largest weight the isomorphism construction accepts.
pub const XI_MAX_BOUND: usize = 6;

/// Verification summary for a constructed isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XiReport {
    pub invertible: bool,
    pub weight_preserved: bool,
    pub degp_preserved: bool,
    pub coproduct_commutes: bool,
}

impl XiReport {
    pub fn all_ok(&self) -> bool {
        self.invertible && self.weight_preserved && self.degp_preserved && self.coproduct_commutes
    }
}

/// The weight-graded Hopf isomorphism from the plain product onto the
/// shuffle product, as explicit images of all forests up to a bound.
#[derive(Debug, Clone)]
pub struct XiMap {
    bound: usize,
    map: BTreeMap<Forest, AlgebraElement>,
    v_dims: BTreeMap<usize, Vec<usize>>,
    family: UFamily,
}

impl XiMap {
    pub fn bound(&self) -> usize {
        self.bound
    }

    fn forest_image(&self, f: &Forest) -> AlgebraElement {
        if f.is_empty() {
            return AlgebraElement::one();
        }
        self.map.get(f).expect("forest within bound").clone()
    }

    /// Applies the isomorphism linearly.
    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement, MorphismError> {
        let mut out = AlgebraElement::zero();
        for (f, c) in x.terms() {
            if f.is_empty() {
                out.add_assign(&AlgebraElement::scalar(c.clone()));
                continue;
            }
            let w = f.weight();
            if w > self.bound {
                return Err(MorphismError::BoundExceeded { required: w, bound: self.bound });
            }
            out.add_assign(&self.map[f].scale(c));
        }
        Ok(out)
    }

    /// The matrix of the isomorphism on one weight, columns indexed by
    /// the canonical forest enumeration.
    pub fn matrix(&self, w: usize) -> Vec<Vec<Rational>> {
        assert!(1 <= w && w <= self.bound, "weight out of range");
        let forests = enumerate_forests(w);
        let index: BTreeMap<Forest, usize> =
            forests.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let mut m = vec![vec![Rational::zero(); forests.len()]; forests.len()];
        for (c, f) in forests.iter().enumerate() {
            for (g, coeff) in self.map[f].terms() {
                m[index[g]][c] = coeff.clone();
            }
        }
        m
    }

    /// Number of complement generators per chain length at one weight.
    pub fn v_dimensions(&self, w: usize) -> &[usize] {
        &self.v_dims[&w]
    }

    /// The arity family presenting the isomorphism as a coalgebra
    /// endomorphism of the chain presentation.
    pub fn family(&self) -> &UFamily {
        &self.family
    }

    /// Exact verification: per-weight invertibility, weight and depth
    /// preservation, and commutation with the coproduct.
    pub fn verify(&self) -> XiReport {
        let mut invertible = true;
        for w in 1..=self.bound {
            if linalg::invert(&self.matrix(w)).is_none() {
                invertible = false;
            }
        }
        let mut weight_preserved = true;
        let mut degp_preserved = true;
        let mut coproduct_commutes = true;
        for (f, img) in &self.map {
            let x = AlgebraElement::from_forest(f.clone());
            if img.is_homogeneous() != Some(f.weight()) {
                weight_preserved = false;
            }
            if crate::growth::deg_p(img) != crate::growth::deg_p(&x) {
                degp_preserved = false;
            }
            let lhs = coproduct(img);
            let rhs = coproduct(&x)
                .apply_slot(0, |g| self.forest_image(g))
                .apply_slot(1, |g| self.forest_image(g));
            if lhs != rhs {
                coproduct_commutes = false;
            }
        }
        XiReport { invertible, weight_preserved, degp_preserved, coproduct_commutes }
    }
}

/// Builds the isomorphism up to `bound`. The map is determined arity
/// level by arity level in the chain presentation: the length-one part
/// is the identity, and at each level the next arity map is solved from
/// the requirement that plain products land on shuffle products, which
/// forces a primitive correction on every shuffle of shorter chains.
/// A greedy complement of the decomposable span is computed alongside
/// as a per-weight dimension report.
pub fn xi_isomorphism(bound: usize) -> Result<XiMap, MorphismError> {
    if bound > XI_MAX_BOUND {
        return Err(MorphismError::BoundExceeded { required: bound, bound: XI_MAX_BOUND });
    }
    let mut tables = BasisTables::new();
    let mut maps: BTreeMap<usize, BTreeMap<Vec<PrimRef>, PrimCombo>> = BTreeMap::new();
    let mut arity1 = BTreeMap::new();
    for w in 1..=bound {
        for i in 0..tables.primitive_basis(w).len() {
            let r = PrimRef { weight: w, index: i };
            arity1.insert(vec![r], PrimCombo::from([(r, Rational::one())]));
        }
    }
    maps.insert(1, arity1);
    for n in 2..=bound {
        // The correction at this level is computed against the map with
        // all lower arities filled in and this one still zero.
        let partial = UFamily::new(bound, maps.clone()).expect("constructed maps are graded");
        let mut level: BTreeMap<Vec<PrimRef>, PrimCombo> = BTreeMap::new();
        for w in n..=bound {
            let keys_n: Vec<ChainKey> =
                tables.chain_keys(w).iter().filter(|k| k.len() == n).cloned().collect();
            if keys_n.is_empty() {
                continue;
            }
            let key_index: BTreeMap<&ChainKey, usize> =
                keys_n.iter().enumerate().map(|(i, k)| (k, i)).collect();
            let d = tables.primitive_basis(w).len();
            // One equation per pair of shorter chains: the shuffle's
            // coordinates against the forced primitive correction.
            let mut a_rows: Vec<Vec<Rational>> = Vec::new();
            let mut rhs_rows: Vec<Vec<Rational>> = Vec::new();
            for i in 1..=(n / 2) {
                let j = n - i;
                for wx in i..=(w - j) {
                    let wy = w - wx;
                    let xs: Vec<ChainKey> = tables
                        .chain_keys(wx)
                        .iter()
                        .filter(|k| k.len() == i)
                        .cloned()
                        .collect();
                    let ys: Vec<ChainKey> = tables
                        .chain_keys(wy)
                        .iter()
                        .filter(|k| k.len() == j)
                        .cloned()
                        .collect();
                    for kx in &xs {
                        for ky in &ys {
                            let mut row = vec![Rational::zero(); keys_n.len()];
                            for s in shuffles(kx, ky) {
                                row[key_index[&s]] += Rational::one();
                            }
                            let vx = tables.chain_value(kx);
                            let vy = tables.chain_value(ky);
                            let px = from_gr(
                                &phi_u(&partial, &to_gr(&vx, &mut tables))?,
                                &mut tables,
                            );
                            let py = from_gr(
                                &phi_u(&partial, &to_gr(&vy, &mut tables))?,
                                &mut tables,
                            );
                            let pxy = from_gr(
                                &phi_u(&partial, &to_gr(&vx.mul(&vy), &mut tables))?,
                                &mut tables,
                            );
                            let z = star_product(&px, &py, &mut tables).sub(&pxy);
                            assert!(
                                z.is_zero() || is_primitive(&z),
                                "level correction must be primitive"
                            );
                            let (scalar, coords) = tables.chain_coordinates(&z);
                            assert!(scalar.is_zero(), "level correction has no scalar part");
                            let mut zrow = vec![Rational::zero(); d];
                            for (key, c) in coords {
                                assert_eq!(key.len(), 1, "level correction is primitive");
                                zrow[key[0].index] = c;
                            }
                            a_rows.push(row);
                            rhs_rows.push(zrow);
                        }
                    }
                }
            }
            // Solve for the arity map one primitive coordinate at a time;
            // free directions stay zero.
            let mut u_cols: Vec<Vec<Rational>> = Vec::with_capacity(d);
            for p in 0..d {
                let b: Vec<Rational> = rhs_rows.iter().map(|row| row[p].clone()).collect();
                let sol = if a_rows.is_empty() {
                    vec![Rational::zero(); keys_n.len()]
                } else {
                    linalg::solve(&a_rows, &b)
                        .expect("level corrections are consistent across factorizations")
                };
                u_cols.push(sol);
            }
            for (c, key) in keys_n.iter().enumerate() {
                let mut combo = PrimCombo::new();
                for (p, col) in u_cols.iter().enumerate() {
                    if !col[c].is_zero() {
                        combo.insert(PrimRef { weight: w, index: p }, col[c].clone());
                    }
                }
                if !combo.is_empty() {
                    level.insert(key.clone(), combo);
                }
            }
        }
        if !level.is_empty() {
            maps.insert(n, level);
        }
    }
    let family = UFamily::new(bound, maps).expect("constructed maps are graded");
    // Tabulate forest images through the chain presentation.
    let mut map: BTreeMap<Forest, AlgebraElement> = BTreeMap::new();
    for w in 1..=bound {
        for f in tables.forests(w).to_vec() {
            let x = AlgebraElement::from_forest(f.clone());
            let gx = to_gr(&x, &mut tables);
            let img = from_gr(&phi_u(&family, &gx)?, &mut tables);
            map.insert(f, img);
        }
    }
    let v_dims = complement_dimensions(bound, &mut tables);
    Ok(XiMap { bound, map, v_dims, family })
}

/// Greedy complement of the span of non-connected forests inside each
/// weight, drawn from the chain basis in order of increasing length;
/// returns the number of generators picked per chain length.
fn complement_dimensions(bound: usize, tables: &mut BasisTables) -> BTreeMap<usize, Vec<usize>> {
    let mut v_dims = BTreeMap::new();
    for w in 1..=bound {
        let forests: Vec<Forest> = tables.forests(w).to_vec();
        let index: BTreeMap<Forest, usize> =
            forests.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let mut ech = linalg::Echelon::new(forests.len());
        for (i, f) in forests.iter().enumerate() {
            if !f.is_connected() {
                let mut unit = vec![Rational::zero(); forests.len()];
                unit[i] = Rational::one();
                let inserted = ech.insert(unit);
                debug_assert!(inserted, "distinct forests are independent");
            }
        }
        let keys: Vec<ChainKey> = tables.chain_keys(w).to_vec();
        let mut dims_here = vec![0usize; w];
        let mut picked = 0usize;
        for key in &keys {
            let val = tables.chain_value(key);
            if ech.insert(element_vector(&val, &index, forests.len())) {
                dims_here[key.len() - 1] += 1;
                picked += 1;
            }
        }
        assert_eq!(
            ech.rank(),
            forests.len(),
            "complement selection failed to span a graded piece"
        );
        let tree_count = forests.iter().filter(|f| f.is_connected()).count();
        assert_eq!(picked, tree_count, "complement dimension must match the tree count");
        v_dims.insert(w, dims_here);
    }
    v_dims
}
