//! Rooted trees, forests, and edge cuts.
//!
//! A rooted tree is stored with the children of every vertex sorted, so
//! structural equality coincides with isomorphism of rooted trees and
//! every tree has exactly one representation. The canonical text form is
//! `"[" children "]"` with children concatenated in sorted order; the
//! single vertex is `[]`. Sorting uses the byte order of the canonical
//! strings (`'['` sorts before `']'`), implemented structurally without
//! rendering. A forest is a multiset of trees, kept as a sorted vector;
//! the empty forest renders as `1`.
//!
//! Cuts remove a nonempty set of edges. A cut is admissible when no two
//! removed edges lie on one root path. Removing the edges splits the
//! tree into the trunk (the component containing the root) and the
//! crown (the forest of the remaining components).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A rooted tree in canonical form. The number of vertices is its weight.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RootedTree {
    children: Vec<RootedTree>,
    weight: usize,
}

impl RootedTree {
    /// Builds a tree from child subtrees, sorting them into canonical order.
    pub fn new(mut children: Vec<RootedTree>) -> Self {
        children.sort();
        let weight = 1 + children.iter().map(|c| c.weight).sum::<usize>();
        RootedTree { children, weight }
    }

    /// The single-vertex tree `[]`.
    pub fn leaf() -> Self {
        RootedTree { children: Vec::new(), weight: 1 }
    }

    /// The ladder with `n` vertices: each vertex has one child except the leaf.
    ///
    /// Panics when `n == 0`; there is no empty tree.
    pub fn ladder(n: usize) -> Self {
        assert!(n >= 1, "ladder weight must be at least 1");
        let mut t = RootedTree::leaf();
        for _ in 1..n {
            t = RootedTree::new(vec![t]);
        }
        t
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Rebuilds the tree with `added` appended as extra children of the
    /// vertex with the given preorder index (the root has index 0).
    pub fn grow_at(&self, vertex: usize, added: &[RootedTree]) -> RootedTree {
        assert!(vertex < self.weight, "vertex index out of range");
        let mut counter = 0;
        grow_rec(self, vertex, &mut counter, added)
    }

    /// Parent preorder index of every vertex; the root maps to itself.
    fn parents(&self) -> Vec<usize> {
        let mut parent = vec![0; self.weight];
        let mut counter = 0;
        fn walk(node: &RootedTree, my: usize, counter: &mut usize, parent: &mut [usize]) {
            for c in node.children() {
                *counter += 1;
                let idx = *counter;
                parent[idx] = my;
                walk(c, idx, counter, parent);
            }
        }
        walk(self, 0, &mut counter, &mut parent);
        parent
    }
}

fn grow_rec(node: &RootedTree, target: usize, counter: &mut usize, added: &[RootedTree]) -> RootedTree {
    let my = *counter;
    *counter += 1;
    let mut kids: Vec<RootedTree> = Vec::with_capacity(node.children.len());
    for c in &node.children {
        kids.push(grow_rec(c, target, counter, added));
    }
    if my == target {
        kids.extend(added.iter().cloned());
    }
    RootedTree::new(kids)
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        // Byte order of canonical strings. Child lists compare
        // lexicographically; when one list is a prefix of the other, the
        // shorter tree closes with ']' where the longer continues with
        // '[', so fewer children sorts greater.
        for (a, b) in self.children.iter().zip(other.children.iter()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        other.children.len().cmp(&self.children.len())
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for c in &self.children {
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RootedTree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_tree(s)
    }
}

/// A multiset of rooted trees, kept sorted. The empty forest is the unit
/// of the algebra and renders as `1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Forest {
    trees: Vec<RootedTree>,
    weight: usize,
}

impl Forest {
    pub fn empty() -> Self {
        Forest { trees: Vec::new(), weight: 0 }
    }

    pub fn from_trees(mut trees: Vec<RootedTree>) -> Self {
        trees.sort();
        let weight = trees.iter().map(|t| t.weight()).sum();
        Forest { trees, weight }
    }

    pub fn single(tree: RootedTree) -> Self {
        let weight = tree.weight();
        Forest { trees: vec![tree], weight }
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[RootedTree] {
        &self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    /// True when the forest is a single tree.
    pub fn is_connected(&self) -> bool {
        self.trees.len() == 1
    }

    /// Multiset union: the product of the two forests in the algebra.
    pub fn product(&self, other: &Forest) -> Forest {
        let mut trees = Vec::with_capacity(self.trees.len() + other.trees.len());
        trees.extend(self.trees.iter().cloned());
        trees.extend(other.trees.iter().cloned());
        Forest::from_trees(trees)
    }
}

impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.trees.cmp(&other.trees)
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trees.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Forest {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_forest(s)
    }
}

/// Grafting closure: the tree whose root has the forest as children.
pub fn b_plus(f: &Forest) -> RootedTree {
    RootedTree::new(f.trees().to_vec())
}

/// Inverse of [`b_plus`]: the forest of root subtrees.
pub fn b_minus(t: &RootedTree) -> Forest {
    Forest::from_trees(t.children().to_vec())
}

/// Parse failure with the byte offset where it occurred.
#[derive(Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl fmt::Debug for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl core::error::Error for ParseError {}

pub(crate) struct Cursor<'a> {
    bytes: &'a [u8],
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(s: &'a str) -> Self {
        Cursor { bytes: s.as_bytes(), pos: 0 }
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    pub fn peek_at(&self, pos: usize) -> Option<u8> {
        self.bytes.get(pos).copied()
    }

    pub fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    pub fn error(&self, message: &str) -> ParseError {
        ParseError { position: self.pos, message: String::from(message) }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.bytes.len()
    }

    /// One tree: `'[' tree* ']'`, whitespace tolerated between tokens.
    pub fn tree(&mut self) -> Result<RootedTree, ParseError> {
        self.skip_ws();
        match self.bump() {
            Some(b'[') => {}
            _ => return Err(ParseError { position: self.pos.saturating_sub(1), message: String::from("expected '['") }),
        }
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'[') => children.push(self.tree()?),
                Some(b']') => {
                    self.pos += 1;
                    return Ok(RootedTree::new(children));
                }
                _ => return Err(self.error("expected '[' or ']'")),
            }
        }
    }
}

/// Parses a single tree; the whole input must be consumed.
pub fn parse_tree(s: &str) -> Result<RootedTree, ParseError> {
    let mut cur = Cursor::new(s);
    let t = cur.tree()?;
    if !cur.at_end() {
        return Err(cur.error("trailing input after tree"));
    }
    Ok(t)
}

/// Parses a forest: `1` for the empty forest, otherwise trees separated
/// by whitespace. Child order inside trees need not be canonical.
pub fn parse_forest(s: &str) -> Result<Forest, ParseError> {
    let mut cur = Cursor::new(s);
    cur.skip_ws();
    match cur.peek() {
        Some(b'1') => {
            cur.pos += 1;
            if !cur.at_end() {
                return Err(cur.error("trailing input after '1'"));
            }
            Ok(Forest::empty())
        }
        Some(b'[') => {
            let mut trees = Vec::new();
            loop {
                trees.push(cur.tree()?);
                cur.skip_ws();
                match cur.peek() {
                    None => return Ok(Forest::from_trees(trees)),
                    Some(b'[') => continue,
                    Some(_) => return Err(cur.error("expected '[' or end of input")),
                }
            }
        }
        None => Err(cur.error("empty input, expected forest")),
        Some(_) => Err(cur.error("expected '1' or '['")),
    }
}

/// One edge cut of a tree.
#[derive(Clone, PartialEq, Eq)]
pub struct Cut {
    edges: Vec<usize>,
    crown: Forest,
    trunk: RootedTree,
}

impl Cut {
    /// Preorder indices of the vertices below the removed edges, ascending.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// The components separated from the root.
    pub fn crown(&self) -> &Forest {
        &self.crown
    }

    /// The component still containing the root.
    pub fn trunk(&self) -> &RootedTree {
        &self.trunk
    }
}

impl fmt::Debug for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cut{{edges: {:?}, crown: {}, trunk: {}}}", self.edges, self.crown, self.trunk)
    }
}

fn split(t: &RootedTree, mask: u64) -> (Forest, RootedTree) {
    fn build(node: &RootedTree, counter: &mut usize, mask: u64, crown: &mut Vec<RootedTree>) -> RootedTree {
        *counter += 1;
        let mut kids: Vec<RootedTree> = Vec::with_capacity(node.children().len());
        for c in node.children() {
            let child_idx = *counter;
            let sub = build(c, counter, mask, crown);
            if mask & (1u64 << child_idx) != 0 {
                crown.push(sub);
            } else {
                kids.push(sub);
            }
        }
        RootedTree::new(kids)
    }
    let mut crown = Vec::new();
    let mut counter = 0;
    let trunk = build(t, &mut counter, mask, &mut crown);
    (Forest::from_trees(crown), trunk)
}

fn cut_from_mask(t: &RootedTree, mask: u64) -> Cut {
    let edges: Vec<usize> = (1..t.weight()).filter(|v| mask & (1u64 << v) != 0).collect();
    let (crown, trunk) = split(t, mask);
    Cut { edges, crown, trunk }
}

/// All nonempty cuts with no two removed edges on one root path.
/// The empty cut is excluded. Emitted in ascending edge-set order.
pub fn admissible_cuts(t: &RootedTree) -> Vec<Cut> {
    cuts_impl(t, true)
}

/// Every nonempty edge subset, admissible or not; there are
/// `2^(weight-1) - 1` of them.
pub fn all_cuts(t: &RootedTree) -> Vec<Cut> {
    cuts_impl(t, false)
}

fn cuts_impl(t: &RootedTree, admissible_only: bool) -> Vec<Cut> {
    let w = t.weight();
    assert!(w <= 64, "cut enumeration supports trees up to 64 vertices");
    if w == 1 {
        return Vec::new();
    }
    let parent = t.parents();
    let mut out = Vec::new();
    // Vertex v (1-based preorder) marks the edge above it: bit v of the mask.
    for raw in 1..(1u64 << (w - 1)) {
        let mask = raw << 1;
        if admissible_only && !is_admissible(mask, &parent) {
            continue;
        }
        out.push(cut_from_mask(t, mask));
    }
    out
}

fn is_admissible(mask: u64, parent: &[usize]) -> bool {
    for v in 1..parent.len() {
        if mask & (1u64 << v) == 0 {
            continue;
        }
        let mut p = parent[v];
        while p != 0 {
            if mask & (1u64 << p) != 0 {
                return false;
            }
            p = parent[p];
        }
    }
    true
}

fn trees_by_weight(max: usize) -> Vec<Vec<RootedTree>> {
    let mut by_w: Vec<Vec<RootedTree>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        by_w[1].push(RootedTree::leaf());
    }
    for w in 2..=max {
        let mut ts: Vec<RootedTree> =
            forests_from(w - 1, &by_w).into_iter().map(|f| b_plus(&f)).collect();
        ts.sort();
        by_w[w] = ts;
    }
    by_w
}

fn forests_from(weight: usize, by_w: &[Vec<RootedTree>]) -> Vec<Forest> {
    let pool: Vec<&RootedTree> = by_w.iter().flatten().collect();
    let mut out = Vec::new();
    let mut current: Vec<RootedTree> = Vec::new();
    fn rec(
        pool: &[&RootedTree],
        start: usize,
        remaining: usize,
        current: &mut Vec<RootedTree>,
        out: &mut Vec<Forest>,
    ) {
        if remaining == 0 {
            out.push(Forest::from_trees(current.clone()));
            return;
        }
        for idx in start..pool.len() {
            if pool[idx].weight() <= remaining {
                current.push(pool[idx].clone());
                rec(pool, idx, remaining - pool[idx].weight(), current, out);
                current.pop();
            }
        }
    }
    rec(&pool, 0, weight, &mut current, &mut out);
    out
}

/// All trees of the given weight in ascending canonical order.
pub fn enumerate_trees(weight: usize) -> Vec<RootedTree> {
    if weight == 0 {
        return Vec::new();
    }
    trees_by_weight(weight).swap_remove(weight)
}

/// All forests of the given weight in ascending canonical order; weight 0
/// yields the empty forest alone.
pub fn enumerate_forests(weight: usize) -> Vec<Forest> {
    if weight == 0 {
        return vec![Forest::empty()];
    }
    let by_w = trees_by_weight(weight);
    let mut fs = forests_from(weight, &by_w);
    fs.sort();
    fs
}

/// Order of the automorphism group of a rooted tree: runs of identical
/// child subtrees may permute, recursively.
pub fn symmetry_factor(t: &RootedTree) -> BigUint {
    let mut acc = BigUint::one();
    let children = t.children();
    let mut i = 0;
    while i < children.len() {
        let mut j = i;
        while j < children.len() && children[j] == children[i] {
            j += 1;
        }
        for m in 2..=(j - i) {
            acc *= BigUint::from(m);
        }
        for child in &children[i..j] {
            acc *= symmetry_factor(child);
        }
        i = j;
    }
    acc
}

/// Number of rooted trees of the given weight, computed arithmetically.
pub fn count_trees(weight: usize) -> BigUint {
    tree_counts(weight).swap_remove(weight)
}

/// Number of forests of the given weight: the multiset (Euler) transform
/// of the tree counts. This is the dimension of the weight-graded piece
/// of the algebra.
pub fn count_forests(weight: usize) -> BigUint {
    forest_counts_upto(weight).swap_remove(weight)
}

/// `r[0..=max]` where `r[n]` counts forests with `n` vertices.
pub(crate) fn forest_counts_upto(max: usize) -> Vec<BigUint> {
    let t = tree_counts(max);
    let c = edge_weighted_sums(&t);
    let mut r: Vec<BigUint> = Vec::with_capacity(max + 1);
    r.push(BigUint::one());
    for n in 1..=max {
        let mut acc = BigUint::zero();
        for k in 1..=n {
            acc += &c[k] * &r[n - k];
        }
        let n_big = BigUint::from(n);
        debug_assert!((&acc % &n_big).is_zero());
        r.push(acc / n_big);
    }
    r
}

/// `t[0..=max]` where `t[n]` counts rooted trees with `n` vertices.
fn tree_counts(max: usize) -> Vec<BigUint> {
    let mut t: Vec<BigUint> = vec![BigUint::zero(); max + 1];
    let mut c: Vec<BigUint> = vec![BigUint::zero(); max + 1];
    for n in 1..=max {
        if n == 1 {
            t[1] = BigUint::one();
        } else {
            let mut acc = BigUint::zero();
            for k in 1..n {
                acc += &c[k] * &t[n - k];
            }
            let den = BigUint::from(n - 1);
            debug_assert!((&acc % &den).is_zero());
            t[n] = acc / den;
        }
        let mut ck = BigUint::zero();
        for d in 1..=n {
            if n % d == 0 {
                ck += BigUint::from(d) * &t[d];
            }
        }
        c[n] = ck;
    }
    t
}

fn edge_weighted_sums(t: &[BigUint]) -> Vec<BigUint> {
    let max = t.len() - 1;
    let mut c: Vec<BigUint> = vec![BigUint::zero(); max + 1];
    for k in 1..=max {
        for d in 1..=k {
            if k % d == 0 {
                c[k] += BigUint::from(d) * &t[d];
            }
        }
    }
    c
}
