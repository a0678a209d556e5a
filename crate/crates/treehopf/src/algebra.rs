//! The free commutative algebra on rooted trees over exact rationals,
//! and its tensor powers.
//!
//! An element is a finite rational combination of forests, stored
//! sparsely with zero coefficients normalized away. The product of two
//! basis forests is their multiset union; the empty forest is the unit.
//! Tensor elements generalize this to rank-k tensors with forest tuples
//! as basis keys.
//!
//! Text form of an element: terms `c F` joined by `+`, where `c` is an
//! integer or `p/q` (omittable when 1) and `F` is a forest, e.g.
//! `1 [] [] + -2 [[]]`. The renderer emits terms in ascending forest
//! order with explicit coefficients.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::trees::{Cursor, Forest, ParseError, RootedTree};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Fraction `num/den` as a rational; panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A sparse rational combination of forests.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<Forest, Rational>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement { terms: BTreeMap::new() }
    }

    /// The unit: the empty forest with coefficient 1.
    pub fn one() -> Self {
        AlgebraElement::from_forest(Forest::empty())
    }

    pub fn from_forest(f: Forest) -> Self {
        AlgebraElement::from_term(f, Rational::one())
    }

    pub fn from_tree(t: RootedTree) -> Self {
        AlgebraElement::from_forest(Forest::single(t))
    }

    pub fn from_term(f: Forest, c: Rational) -> Self {
        let mut e = AlgebraElement::zero();
        e.add_term(f, c);
        e
    }

    /// Scalar multiple of the unit.
    pub fn scalar(c: Rational) -> Self {
        AlgebraElement::from_term(Forest::empty(), c)
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

    pub fn terms(&self) -> impl Iterator<Item = (&Forest, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, f: &Forest) -> Rational {
        self.terms.get(f).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * f`, dropping the entry when the total cancels.
    pub fn add_term(&mut self, f: Forest, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(f).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    pub fn add_assign(&mut self, other: &AlgebraElement) {
        for (f, c) in other.terms() {
            self.add_term(f.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (f, c) in other.terms() {
            out.add_term(f.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> AlgebraElement {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        let terms = self.terms.iter().map(|(f, v)| (f.clone(), v * c)).collect();
        AlgebraElement { terms }
    }

    /// Bilinear product; basis forests multiply by multiset union.
    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (f, c) in self.terms() {
            for (g, d) in other.terms() {
                out.add_term(f.product(g), c * d);
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> AlgebraElement {
        let mut out = AlgebraElement::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Coefficient of the empty forest: the counit.
    pub fn scalar_part(&self) -> Rational {
        self.coefficient(&Forest::empty())
    }

    /// Splits into homogeneous components keyed by weight.
    pub fn weight_split(&self) -> BTreeMap<usize, AlgebraElement> {
        let mut out: BTreeMap<usize, AlgebraElement> = BTreeMap::new();
        for (f, c) in self.terms() {
            out.entry(f.weight()).or_default().add_term(f.clone(), c.clone());
        }
        out
    }

    /// The common weight of all supported forests, when there is one.
    /// Zero (empty support) and mixed-weight elements give `None`.
    pub fn is_homogeneous(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let first = it.next()?.weight();
        if it.all(|f| f.weight() == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn max_weight(&self) -> Option<usize> {
        self.terms.keys().map(|f| f.weight()).max()
    }

    /// Projection onto the span of single-tree forests.
    pub fn pi_c(&self) -> AlgebraElement {
        let terms = self
            .terms
            .iter()
            .filter(|(f, _)| f.is_connected())
            .map(|(f, c)| (f.clone(), c.clone()))
            .collect();
        AlgebraElement { terms }
    }

    /// Linear extension of a map defined on basis forests.
    pub fn map_forests(&self, f: impl Fn(&Forest) -> AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (forest, c) in self.terms() {
            let image = f(forest);
            for (g, d) in image.terms() {
                out.add_term(g.clone(), c * d);
            }
        }
        out
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::add(self, rhs)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::sub(self, rhs)
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::mul(self, rhs)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement::neg(self)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (forest, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c} {forest}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for AlgebraElement {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_element(s)
    }
}

/// Parses the element grammar: terms `c F` joined by `+`; the
/// coefficient may be omitted (1) and `F` may be omitted after an
/// explicit coefficient (unit forest).
pub fn parse_element(s: &str) -> Result<AlgebraElement, ParseError> {
    let mut cur = Cursor::new(s);
    let mut out = AlgebraElement::zero();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            return Err(cur.error("expected term"));
        }
        let coeff = match cur.peek() {
            Some(b'-') | Some(b'0'..=b'9') => parse_rational(&mut cur)?,
            _ => Rational::one(),
        };
        cur.skip_ws();
        let forest = match cur.peek() {
            Some(b'[') => {
                let mut trees = Vec::new();
                loop {
                    trees.push(cur.tree()?);
                    cur.skip_ws();
                    if cur.peek() != Some(b'[') {
                        break;
                    }
                }
                Forest::from_trees(trees)
            }
            Some(b'1') => {
                cur.pos += 1;
                Forest::empty()
            }
            Some(b'+') | None => Forest::empty(),
            _ => return Err(cur.error("expected forest")),
        };
        out.add_term(forest, coeff);
        cur.skip_ws();
        match cur.bump() {
            None => return Ok(out),
            Some(b'+') => continue,
            _ => {
                return Err(ParseError {
                    position: cur.pos - 1,
                    message: String::from("expected '+' or end of input"),
                })
            }
        }
    }
}

fn parse_rational(cur: &mut Cursor<'_>) -> Result<Rational, ParseError> {
    let negative = if cur.peek() == Some(b'-') {
        cur.pos += 1;
        true
    } else {
        false
    };
    let numer = parse_digits(cur)?;
    let denom = if cur.peek() == Some(b'/') {
        cur.pos += 1;
        let d = parse_digits(cur)?;
        if d.is_zero() {
            return Err(cur.error("zero denominator"));
        }
        d
    } else {
        BigInt::one()
    };
    let r = Rational::new(numer, denom);
    Ok(if negative { -r } else { r })
}

fn parse_digits(cur: &mut Cursor<'_>) -> Result<BigInt, ParseError> {
    let start = cur.pos;
    while matches!(cur.peek(), Some(b'0'..=b'9')) {
        cur.pos += 1;
    }
    if cur.pos == start {
        return Err(cur.error("expected digits"));
    }
    let mut acc = BigInt::zero();
    for p in start..cur.pos {
        let digit = match cur.peek_at(p) {
            Some(b) => (b - b'0') as u32,
            None => unreachable!(),
        };
        acc = acc * 10 + digit;
    }
    Ok(acc)
}

/// A sparse rank-`k` tensor over the forest basis.
///
/// Rank is part of the value; combining tensors of different ranks is a
/// logic error and panics.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    rank: usize,
    terms: BTreeMap<Vec<Forest>, Rational>,
}

impl TensorElement {
    pub fn zero(rank: usize) -> Self {
        assert!(rank >= 1, "tensor rank must be at least 1");
        TensorElement { rank, terms: BTreeMap::new() }
    }

    /// Rank-1 tensor from an element.
    pub fn from_element(x: &AlgebraElement) -> Self {
        let mut t = TensorElement::zero(1);
        for (f, c) in x.terms() {
            t.add_term(vec![f.clone()], c.clone());
        }
        t
    }

    /// Tensor product of elements, one per slot.
    pub fn tensor(factors: &[AlgebraElement]) -> Self {
        assert!(!factors.is_empty(), "tensor needs at least one factor");
        let mut t = TensorElement::zero(factors.len());
        let mut key: Vec<Forest> = Vec::with_capacity(factors.len());
        fn rec(
            factors: &[AlgebraElement],
            slot: usize,
            key: &mut Vec<Forest>,
            c: Rational,
            out: &mut TensorElement,
        ) {
            if slot == factors.len() {
                out.add_term(key.clone(), c);
                return;
            }
            for (f, d) in factors[slot].terms() {
                key.push(f.clone());
                rec(factors, slot + 1, key, &c * d, out);
                key.pop();
            }
        }
        rec(factors, 0, &mut key, Rational::one(), &mut t);
        t
    }

    pub fn pair(a: &AlgebraElement, b: &AlgebraElement) -> Self {
        TensorElement::tensor(&[a.clone(), b.clone()])
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Forest>, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &[Forest]) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, key: Vec<Forest>, c: Rational) {
        assert_eq!(key.len(), self.rank, "tensor rank mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            let dead: Vec<Vec<Forest>> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add_assign(&mut self, other: &TensorElement) {
        assert_eq!(self.rank, other.rank, "tensor rank mismatch");
        for (k, c) in other.terms() {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TensorElement {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> TensorElement {
        if c.is_zero() {
            return TensorElement::zero(self.rank);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        TensorElement { rank: self.rank, terms }
    }

    /// Componentwise product: the algebra structure of the tensor power.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.rank, other.rank, "tensor rank mismatch");
        let mut out = TensorElement::zero(self.rank);
        for (k, c) in self.terms() {
            for (l, d) in other.terms() {
                let key: Vec<Forest> = k.iter().zip(l.iter()).map(|(a, b)| a.product(b)).collect();
                out.add_term(key, c * d);
            }
        }
        out
    }

    /// Applies a linear map to one slot; the map is given by its values
    /// on basis forests and must return plain elements.
    pub fn apply_slot(
        &self,
        slot: usize,
        f: impl Fn(&Forest) -> AlgebraElement,
    ) -> TensorElement {
        assert!(slot < self.rank, "slot out of range");
        let mut out = TensorElement::zero(self.rank);
        for (key, c) in self.terms() {
            let image = f(&key[slot]);
            for (g, d) in image.terms() {
                let mut k = key.clone();
                k[slot] = g.clone();
                out.add_term(k, c * d);
            }
        }
        out
    }

    /// Replaces one slot by a tensor-valued linear map, splicing the
    /// result in place; the output rank grows accordingly.
    pub fn expand_slot(
        &self,
        slot: usize,
        f: impl Fn(&Forest) -> TensorElement,
    ) -> TensorElement {
        assert!(slot < self.rank, "slot out of range");
        let mut out: Option<TensorElement> = None;
        for (key, c) in self.terms() {
            let image = f(&key[slot]);
            let new_rank = self.rank - 1 + image.rank();
            let acc = out.get_or_insert_with(|| TensorElement::zero(new_rank));
            assert_eq!(acc.rank(), new_rank, "inconsistent expansion rank");
            for (mid, d) in image.terms() {
                let mut k: Vec<Forest> = Vec::with_capacity(new_rank);
                k.extend(key[..slot].iter().cloned());
                k.extend(mid.iter().cloned());
                k.extend(key[slot + 1..].iter().cloned());
                out_add(acc, k, c * d);
            }
        }
        out.unwrap_or_else(|| TensorElement::zero(self.rank + 1))
    }

    /// Multiplies all slots together, landing back in the algebra.
    pub fn multiply_slots(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (key, c) in self.terms() {
            let mut prod = Forest::empty();
            for f in key {
                prod = prod.product(f);
            }
            out.add_term(prod, c.clone());
        }
        out
    }

    /// Rank-1 tensors convert back to elements.
    pub fn into_element(&self) -> AlgebraElement {
        assert_eq!(self.rank, 1, "only rank-1 tensors convert to elements");
        let mut out = AlgebraElement::zero();
        for (key, c) in self.terms() {
            out.add_term(key[0].clone(), c.clone());
        }
        out
    }
}

fn out_add(t: &mut TensorElement, key: Vec<Forest>, c: Rational) {
    t.add_term(key, c);
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (key, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if !c.is_one() {
                write!(f, "{c} ")?;
            }
            for (j, forest) in key.iter().enumerate() {
                if j > 0 {
                    f.write_str(" (x) ")?;
                }
                write!(f, "{forest}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
