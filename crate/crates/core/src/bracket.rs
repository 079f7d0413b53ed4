//! Formal brackets, bracket monomials and bracket polynomials with exact
//! rational coefficients.
//!
//! A [`BracketPolynomial`] lives in the polynomial ring generated by the
//! brackets of a fixed width `w` over an index set `J`. Every value is kept
//! in canonical form: brackets are strictly increasing, monomials are sorted
//! multisets of brackets, and no stored coefficient is zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

/// A point label. Labels are positive integers.
pub type Label = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Self {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_rational(self) -> Rational {
        Rational::from_integer(self.to_i64().into())
    }
}

/// Canonical bracket: a strictly increasing sequence of positive labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bracket(Vec<Label>);

impl Bracket {
    /// Builds a bracket from an already increasing sequence.
    pub fn new(indices: Vec<Label>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyBracket);
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0) {
            return Err(Error::NonPositiveIndex(bad));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing);
        }
        Ok(Bracket(indices))
    }

    pub fn indices(&self) -> &[Label] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.0.binary_search(&label).is_ok()
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_indices(f, &self.0)
    }
}

fn write_indices(f: &mut fmt::Formatter<'_>, indices: &[Label]) -> fmt::Result {
    f.write_str("[")?;
    if indices.iter().all(|&i| i <= 9) {
        for i in indices {
            write!(f, "{i}")?;
        }
    } else {
        for (k, i) in indices.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
    }
    f.write_str("]")
}

/// A bracket together with the sign picked up while sorting it, or zero when
/// an index repeats.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SignedBracket {
    Zero,
    Nonzero { sign: Sign, bracket: Bracket },
}

/// Sorts `indices`, returning the sign of the sorting permutation, or
/// [`SignedBracket::Zero`] if an index repeats.
pub fn normalize_bracket(indices: &[Label]) -> Result<SignedBracket> {
    if indices.is_empty() {
        return Err(Error::EmptyBracket);
    }
    if let Some(&bad) = indices.iter().find(|&&i| i == 0) {
        return Err(Error::NonPositiveIndex(bad));
    }
    let mut sorted = indices.to_vec();
    let mut odd = false;
    // insertion sort; parity of the swaps is the permutation sign
    for i in 1..sorted.len() {
        let mut k = i;
        while k > 0 && sorted[k - 1] > sorted[k] {
            sorted.swap(k - 1, k);
            odd = !odd;
            k -= 1;
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(SignedBracket::Zero);
    }
    Ok(SignedBracket::Nonzero { sign: Sign::from_parity(odd), bracket: Bracket(sorted) })
}

/// A product of brackets of one width, stored as a sorted sequence.
///
/// The derived ordering is the term order used throughout the crate:
/// lexicographic on the sorted bracket sequences, brackets compared
/// lexicographically, a proper prefix counting as smaller.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BracketMonomial(Vec<Bracket>);

impl BracketMonomial {
    /// The empty product.
    pub fn one() -> Self {
        BracketMonomial(Vec::new())
    }

    pub fn new(mut brackets: Vec<Bracket>) -> Result<Self> {
        if let Some(first) = brackets.first() {
            let w = first.width();
            if let Some(b) = brackets.iter().find(|b| b.width() != w) {
                return Err(Error::WidthMismatch(w, b.width()));
            }
        }
        brackets.sort();
        Ok(BracketMonomial(brackets))
    }

    pub fn brackets(&self) -> &[Bracket] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn width(&self) -> Option<usize> {
        self.0.first().map(Bracket::width)
    }

    pub fn times(&self, other: &BracketMonomial) -> BracketMonomial {
        let mut brackets = Vec::with_capacity(self.0.len() + other.0.len());
        brackets.extend_from_slice(&self.0);
        brackets.extend_from_slice(&other.0);
        brackets.sort();
        BracketMonomial(brackets)
    }

    /// Replaces the brackets at positions `first` and `first + 1` by `pair`.
    pub(crate) fn replace_adjacent(&self, first: usize, pair: &BracketMonomial) -> BracketMonomial {
        let mut brackets = Vec::with_capacity(self.0.len());
        brackets.extend_from_slice(&self.0[..first]);
        brackets.extend_from_slice(&self.0[first + 2..]);
        brackets.extend_from_slice(&pair.0);
        brackets.sort();
        BracketMonomial(brackets)
    }

    /// First adjacent pair `(k, k+1)` that breaks standardness, together with
    /// the first offending row (0-based).
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        self.0.windows(2).enumerate().find_map(|(k, pair)| {
            let (mu, lambda) = (pair[0].indices(), pair[1].indices());
            (0..mu.len()).find(|&row| mu[row] > lambda[row]).map(|row| (k, row))
        })
    }

    pub fn is_standard(&self) -> bool {
        self.first_violation().is_none()
    }
}

impl fmt::Display for BracketMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Tableau condition: with the brackets sorted, every row is nondecreasing.
pub fn is_standard(m: &BracketMonomial) -> bool {
    m.is_standard()
}

pub fn compare_monomials(a: &BracketMonomial, b: &BracketMonomial) -> std::cmp::Ordering {
    a.cmp(b)
}

/// An element of the bracket polynomial ring of width `w` over `J`.
///
/// Equality compares width and terms; the index set is the declared ambient
/// set and takes part in validation (lifts, construction) only.
#[derive(Clone, Debug)]
pub struct BracketPolynomial {
    width: usize,
    index_set: BTreeSet<Label>,
    terms: BTreeMap<BracketMonomial, Rational>,
}

impl PartialEq for BracketPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.terms == other.terms
    }
}

impl Eq for BracketPolynomial {}

impl BracketPolynomial {
    pub fn zero(width: usize, index_set: impl IntoIterator<Item = Label>) -> Self {
        BracketPolynomial { width, index_set: index_set.into_iter().collect(), terms: BTreeMap::new() }
    }

    pub fn one(width: usize, index_set: impl IntoIterator<Item = Label>) -> Self {
        Self::constant(Rational::one(), width, index_set)
    }

    pub fn constant(c: Rational, width: usize, index_set: impl IntoIterator<Item = Label>) -> Self {
        let mut p = Self::zero(width, index_set);
        p.add_term(BracketMonomial::one(), c);
        p
    }

    /// The polynomial `±[indices]`, normalized; zero if an index repeats.
    /// The index set is the set of indices.
    pub fn bracket(indices: &[Label]) -> Result<Self> {
        let mut p = Self::zero(indices.len(), indices.iter().copied());
        if let SignedBracket::Nonzero { sign, bracket } = normalize_bracket(indices)? {
            p.add_term(BracketMonomial(vec![bracket]), sign.to_rational());
        }
        Ok(p)
    }

    /// `coeff · m`, with the index set taken from the brackets of `m`.
    pub fn monomial(coeff: Rational, m: BracketMonomial, width: usize) -> Result<Self> {
        if let Some(w) = m.width() {
            if w != width {
                return Err(Error::WidthMismatch(width, w));
            }
        }
        let index_set: BTreeSet<Label> = m.brackets().iter().flat_map(|b| b.indices().iter().copied()).collect();
        let mut p = Self::zero(width, index_set);
        p.add_term(m, coeff);
        Ok(p)
    }

    /// Builds a polynomial from signed index sequences; each sequence list is
    /// one monomial. Brackets are normalized and zero brackets kill the term.
    pub fn from_terms<I, M>(width: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, M)>,
        M: IntoIterator<Item = Vec<Label>>,
    {
        let mut p = Self::zero(width, []);
        for (coeff, seqs) in terms {
            let mut c = coeff;
            let mut brackets = Vec::new();
            let mut zero = false;
            for seq in seqs {
                if seq.len() != width {
                    return Err(Error::WidthMismatch(width, seq.len()));
                }
                p.index_set.extend(seq.iter().copied());
                match normalize_bracket(&seq)? {
                    SignedBracket::Zero => zero = true,
                    SignedBracket::Nonzero { sign, bracket } => {
                        if sign == Sign::Minus {
                            c = -c;
                        }
                        brackets.push(bracket);
                    }
                }
            }
            if !zero {
                p.add_term(BracketMonomial::new(brackets)?, c);
            }
        }
        Ok(p)
    }

    pub fn with_index_set(mut self, index_set: impl IntoIterator<Item = Label>) -> Self {
        self.index_set.extend(index_set);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn index_set(&self) -> &BTreeSet<Label> {
        &self.index_set
    }

    pub fn terms(&self) -> &BTreeMap<BracketMonomial, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &BracketMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c · m` in place, keeping canonical form.
    pub(crate) fn add_term(&mut self, m: BracketMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        for b in m.brackets() {
            self.index_set.extend(b.indices().iter().copied());
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub(crate) fn remove_term(&mut self, m: &BracketMonomial) -> Option<Rational> {
        self.terms.remove(m)
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.width != other.width {
            return Err(Error::WidthMismatch(self.width, other.width));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        let mut out = self.clone();
        out.index_set.extend(other.index_set.iter().copied());
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        let mut out = Self::zero(self.width, self.index_set.union(&other.index_set).copied());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.width, self.index_set.iter().copied());
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect();
        out
    }

    /// True if `self == other` or `self == -other`.
    pub fn equals_up_to_sign(&self, other: &Self) -> bool {
        self == other || *self == other.neg()
    }

    /// Parses a signed sum such as `"[123][145]-2[124][135]"`, inferring the
    /// width from the first bracket.
    pub fn parse(text: &str) -> Result<Self> {
        parse_polynomial(text, None)
    }

    /// Like [`BracketPolynomial::parse`], but also accepts bracket-free input
    /// such as `"0"` by using the given width.
    pub fn parse_with_width(text: &str, width: usize) -> Result<Self> {
        parse_polynomial(text, Some(width))
    }
}

pub fn poly_add(p: &BracketPolynomial, q: &BracketPolynomial) -> Result<BracketPolynomial> {
    p.checked_add(q)
}

pub fn poly_mul(p: &BracketPolynomial, q: &BracketPolynomial) -> Result<BracketPolynomial> {
    p.checked_mul(q)
}

impl fmt::Display for BracketPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            if c.is_negative() {
                f.write_str("-")?;
            } else if k > 0 {
                f.write_str("+")?;
            }
            if m.degree() == 0 {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}")?;
                }
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for BracketPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn parse_polynomial(text: &str, width_hint: Option<usize>) -> Result<BracketPolynomial> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let err = |msg: &str, at: usize| Error::Parse(format!("{msg} at offset {at} in {text:?}"));

    let mut terms: Vec<(Rational, Vec<Vec<Label>>)> = Vec::new();
    let mut width = width_hint;
    skip_ws(&mut pos);
    if pos == chars.len() {
        return Err(err("empty polynomial", pos));
    }
    let mut first = true;
    while pos < chars.len() {
        let mut negative = false;
        match chars[pos] {
            '+' => pos += 1,
            '-' => {
                negative = true;
                pos += 1
            }
            _ if !first => return Err(err("expected '+' or '-'", pos)),
            _ => {}
        }
        first = false;
        skip_ws(&mut pos);
        let start = pos;
        while pos < chars.len() && (chars[pos].is_ascii_digit() || chars[pos] == '/') {
            pos += 1;
        }
        let mut coeff = if pos > start {
            let literal: String = chars[start..pos].iter().collect();
            parse_rational(&literal)?
        } else {
            Rational::one()
        };
        skip_ws(&mut pos);
        if pos < chars.len() && chars[pos] == '*' {
            pos += 1;
            skip_ws(&mut pos);
        }
        let mut brackets = Vec::new();
        while pos < chars.len() && chars[pos] == '[' {
            let close = chars[pos..]
                .iter()
                .position(|&c| c == ']')
                .map(|o| pos + o)
                .ok_or_else(|| err("unclosed bracket", pos))?;
            let body: String = chars[pos + 1..close].iter().collect();
            let indices = parse_bracket_body(&body).map_err(|m| err(&m, pos))?;
            match width {
                None => width = Some(indices.len()),
                Some(w) if w != indices.len() => return Err(Error::WidthMismatch(w, indices.len())),
                _ => {}
            }
            brackets.push(indices);
            pos = close + 1;
            skip_ws(&mut pos);
        }
        if pos == start {
            return Err(err("expected a coefficient or bracket", pos));
        }
        if negative {
            coeff = -coeff;
        }
        terms.push((coeff, brackets));
    }
    let width = width.ok_or_else(|| err("cannot infer bracket width", 0))?;
    BracketPolynomial::from_terms(width, terms)
}

fn parse_bracket_body(body: &str) -> std::result::Result<Vec<Label>, String> {
    let parts: Vec<&str> = if body.contains(',') {
        body.split(',').map(str::trim).collect()
    } else if body.trim().contains(char::is_whitespace) {
        body.split_whitespace().collect()
    } else {
        let trimmed = body.trim();
        if !trimmed.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("bad bracket body {body:?}"));
        }
        return Ok(trimmed.chars().map(|c| c.to_digit(10).unwrap() as Label).collect());
    };
    parts
        .iter()
        .map(|p| p.parse::<Label>().map_err(|_| format!("bad index {p:?}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .and_then(|v| if v.is_empty() { Err("empty bracket".to_string()) } else { Ok(v) })
}
