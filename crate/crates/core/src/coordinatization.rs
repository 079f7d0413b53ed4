//! The generic coordinatization: brackets as determinants.
//!
//! Two routes to the same map are provided. [`evaluate_poly`] substitutes a
//! concrete rational matrix; [`expand_symbolic`] produces the polynomial in
//! the indeterminates `x[i,j]` outright, which is only feasible for small
//! widths. [`is_syzygy_probabilistic`] is the random-evaluation identity test
//! used where expansion is too large.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bracket::{Bracket, BracketPolynomial, Label};
use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::rational::Rational;

pub const DEFAULT_EXPANSION_BOUND: usize = 10_000_000;
pub const DEFAULT_HEIGHT: u64 = 100;
pub const DEFAULT_TRIALS: usize = 10;

/// A `rows × |J|` rational matrix whose columns carry the labels of `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateMatrix {
    rows: usize,
    labels: Vec<Label>,
    columns: Vec<Vec<Rational>>,
}

impl CoordinateMatrix {
    pub fn new(labels: Vec<Label>, columns: Vec<Vec<Rational>>) -> Result<Self> {
        if labels.len() != columns.len() {
            return Err(Error::WrongPointCount { expected: labels.len(), got: columns.len() });
        }
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(k) = columns.iter().position(|c| c.len() != rows) {
            return Err(Error::CoordinateLength(labels[k]));
        }
        Ok(CoordinateMatrix { rows, labels, columns })
    }

    /// Columns labelled `1..=n`.
    pub fn from_columns(columns: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new((1..=columns.len()).collect(), columns)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn columns(&self) -> &[Vec<Rational>] {
        &self.columns
    }

    pub fn column(&self, label: Label) -> Option<&[Rational]> {
        self.labels.iter().position(|&l| l == label).map(|k| self.columns[k].as_slice())
    }

    pub fn entry(&self, row: usize, label: Label) -> Option<&Rational> {
        self.column(label).map(|c| &c[row])
    }
}

/// Determinant of the columns named by `indices`, in the given order.
/// Repeated or unsorted indices are allowed.
pub fn evaluate_sequence(indices: &[Label], m: &CoordinateMatrix) -> Result<Rational> {
    if indices.len() != m.rows {
        return Err(Error::RowMismatch { rows: m.rows, width: indices.len() });
    }
    let cols = indices.iter().map(|&l| m.column(l).ok_or(Error::MissingLabel(l))).collect::<Result<Vec<_>>>()?;
    let mat: Vec<Vec<Rational>> = (0..m.rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    Ok(determinant(&mat))
}

pub fn evaluate_bracket(b: &Bracket, m: &CoordinateMatrix) -> Result<Rational> {
    evaluate_sequence(b.indices(), m)
}

/// Evaluates bracket polynomials at one matrix, memoizing bracket values.
pub struct BracketEvaluator<'a> {
    matrix: &'a CoordinateMatrix,
    cache: HashMap<Bracket, Rational>,
}

impl<'a> BracketEvaluator<'a> {
    pub fn new(matrix: &'a CoordinateMatrix) -> Self {
        BracketEvaluator { matrix, cache: HashMap::new() }
    }

    pub fn bracket(&mut self, b: &Bracket) -> Result<Rational> {
        if let Some(v) = self.cache.get(b) {
            return Ok(v.clone());
        }
        let v = evaluate_bracket(b, self.matrix)?;
        self.cache.insert(b.clone(), v.clone());
        Ok(v)
    }

    pub fn poly(&mut self, p: &BracketPolynomial) -> Result<Rational> {
        if !p.is_zero() && p.width() != self.matrix.rows {
            return Err(Error::RowMismatch { rows: self.matrix.rows, width: p.width() });
        }
        let mut total = Rational::zero();
        for (m, c) in p.terms() {
            let mut term = c.clone();
            for b in m.brackets() {
                let v = self.bracket(b)?;
                if v.is_zero() {
                    term = Rational::zero();
                    break;
                }
                term *= v;
            }
            total += term;
        }
        Ok(total)
    }
}

pub fn evaluate_poly(p: &BracketPolynomial, m: &CoordinateMatrix) -> Result<Rational> {
    BracketEvaluator::new(m).poly(p)
}

/// The indeterminate `x[row, label]`, rows counted from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub row: usize,
    pub label: Label,
}

/// Sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicMonomial(Vec<(Variable, u32)>);

impl SymbolicMonomial {
    pub fn one() -> Self {
        SymbolicMonomial(Vec::new())
    }

    pub fn variable(v: Variable) -> Self {
        SymbolicMonomial(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(Variable, u32)] {
        &self.0
    }

    fn times(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        SymbolicMonomial(out)
    }
}

/// Multivariate polynomial in the `x[i,j]` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolicPolynomial {
    terms: BTreeMap<SymbolicMonomial, Rational>,
}

impl SymbolicPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(SymbolicMonomial::one(), c);
        p
    }

    pub fn variable(v: Variable) -> Self {
        let mut p = Self::zero();
        p.add_term(SymbolicMonomial::variable(v), Rational::one());
        p
    }

    pub fn terms(&self) -> &BTreeMap<SymbolicMonomial, Rational> {
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

    fn add_term(&mut self, m: SymbolicMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    /// Product, refusing when the naive term count would pass `bound`.
    pub fn mul_bounded(&self, other: &Self, bound: usize) -> Result<Self> {
        if self.len().saturating_mul(other.len()) > bound {
            return Err(Error::ExpansionTooLarge(bound));
        }
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_bounded(other, usize::MAX).expect("unbounded product")
    }

    /// Substitutes `x[i,j] = M[i][j]`.
    pub fn evaluate(&self, m: &CoordinateMatrix) -> Result<Rational> {
        let mut total = Rational::zero();
        for (mono, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in mono.factors() {
                let x = m.entry(v.row - 1, v.label).ok_or(Error::MissingLabel(v.label))?;
                term *= num_traits::pow(x.clone(), *e as usize);
            }
            total += term;
        }
        Ok(total)
    }
}

impl fmt::Display for SymbolicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if c.is_negative() {
                f.write_str(if k == 0 { "-" } else { " - " })?;
            } else if k > 0 {
                f.write_str(" + ")?;
            }
            let mut parts = Vec::new();
            if !mag.is_one() || m.factors().is_empty() {
                parts.push(mag.to_string());
            }
            for (v, e) in m.factors() {
                if *e == 1 {
                    parts.push(format!("x[{},{}]", v.row, v.label));
                } else {
                    parts.push(format!("x[{},{}]^{e}", v.row, v.label));
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

/// Leibniz expansion of one bracket.
fn expand_bracket(b: &Bracket, bound: usize) -> Result<SymbolicPolynomial> {
    let w = b.width();
    let factorial = (1..=w).try_fold(1usize, |acc, k| acc.checked_mul(k));
    if factorial.is_none_or(|f| f > bound) {
        return Err(Error::ExpansionTooLarge(bound));
    }
    let mut out = SymbolicPolynomial::zero();
    let mut perm: Vec<usize> = (0..w).collect();
    permutations(&mut perm, 0, false, &mut |perm, odd| {
        let mut factors: Vec<(Variable, u32)> =
            perm.iter().enumerate().map(|(i, &p)| (Variable { row: i + 1, label: b.indices()[p] }, 1)).collect();
        factors.sort();
        let sign = if odd { -Rational::one() } else { Rational::one() };
        out.add_term(SymbolicMonomial(factors), sign);
    });
    Ok(out)
}

fn permutations(v: &mut Vec<usize>, k: usize, odd: bool, f: &mut impl FnMut(&[usize], bool)) {
    if k == v.len() {
        f(v, odd);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, odd ^ (i != k), f);
        v.swap(k, i);
    }
}

pub fn expand_symbolic(p: &BracketPolynomial) -> Result<SymbolicPolynomial> {
    expand_symbolic_bounded(p, DEFAULT_EXPANSION_BOUND)
}

pub fn expand_symbolic_bounded(p: &BracketPolynomial, bound: usize) -> Result<SymbolicPolynomial> {
    let mut cache: HashMap<&Bracket, SymbolicPolynomial> = HashMap::new();
    let mut total = SymbolicPolynomial::zero();
    for (m, c) in p.terms() {
        let mut term = SymbolicPolynomial::constant(c.clone());
        for b in m.brackets() {
            if !cache.contains_key(b) {
                cache.insert(b, expand_bracket(b, bound)?);
            }
            term = term.mul_bounded(&cache[b], bound)?;
        }
        total = total.add(&term);
        if total.len() > bound {
            return Err(Error::ExpansionTooLarge(bound));
        }
    }
    Ok(total)
}

fn random_entry(rng: &mut ChaCha8Rng, height: u64) -> Rational {
    let h = height as i64;
    let num = rng.random_range(-h..=h);
    let den = rng.random_range(1..=h);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Deterministic pseudo-random `w × |J|` matrix; numerators lie in
/// `[-height, height]` and denominators in `[1, height]`.
pub fn random_matrix(
    width: usize,
    labels: impl IntoIterator<Item = Label>,
    seed: u64,
    height: u64,
) -> CoordinateMatrix {
    assert!(height >= 1, "height must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<Label> = labels.into_iter().collect();
    let columns = labels.iter().map(|_| (0..width).map(|_| random_entry(&mut rng, height)).collect()).collect();
    CoordinateMatrix { rows: width, labels, columns }
}

pub(crate) fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One-sided identity test: `false` is certain, `true` holds with high
/// probability. Trials are independent and run in parallel.
pub fn is_syzygy_probabilistic(p: &BracketPolynomial, trials: usize, seed: u64) -> bool {
    assert!(trials >= 1, "at least one trial is required");
    if p.is_zero() {
        return true;
    }
    let labels: Vec<Label> = p.index_set().iter().copied().collect();
    (0..trials as u64).into_par_iter().all(|t| {
        let m = random_matrix(p.width(), labels.iter().copied(), trial_seed(seed, t), DEFAULT_HEIGHT);
        evaluate_poly(p, &m).map(|v| v.is_zero()).unwrap_or(false)
    })
}
