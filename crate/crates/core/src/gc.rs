//! Grassmann-Cayley algebra: extensors in Plücker coordinates, join and
//! meet, expression trees over labelled points, and their expansion into
//! bracket polynomials.
//!
//! Numeric values are stored as coordinate vectors over the increasing
//! `k`-subsets of the standard basis, so evaluation never depends on a
//! particular factorization. The meet of `A` (step `j`) and `B` (step `k`)
//! in ambient `m` follows the shuffle formula
//!
//! ```text
//! (a_1…a_j) ∧ (b_1…b_k) = Σ_σ sign(σ) [a_σ(1) … a_σ(m−k) b_1 … b_k] a_σ(m−k+1) … a_σ(j)
//! ```
//!
//! applied to basis extensors of `A`. The top-step extensor `e_1…e_m` is
//! identified with the scalar 1, so a step-`m` value and a step-0 value are
//! both read as scalars.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::bracket::{normalize_bracket, BracketPolynomial, Label, SignedBracket};
use crate::coordinatization::CoordinateMatrix;
use crate::error::{Error, Result};
use crate::rational::Rational;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Increasing `k`-subsets of `{0..m-1}` in lexicographic order.
pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(m, k));
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Position of an increasing subset of `{0..m-1}` in [`subsets`] order.
fn subset_rank(subset: &[usize], m: usize) -> usize {
    let k = subset.len();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &c) in subset.iter().enumerate() {
        for v in prev..c {
            rank += binomial(m - 1 - v, k - 1 - i);
        }
        prev = c + 1;
    }
    rank
}

/// Parity of pairs `(x, y)` with `x ∈ left`, `y ∈ right`, `x > y`.
fn cross_inversions_odd(left: &[usize], right: &[usize]) -> bool {
    let mut count = 0usize;
    for x in left {
        count += right.iter().filter(|&&y| y < *x).count();
    }
    count % 2 == 1
}

/// An element of `Λ^step(V)` for `dim V = ambient`, in Plücker coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extensor {
    step: usize,
    ambient: usize,
    coords: Vec<Rational>,
}

impl Extensor {
    pub fn zero(step: usize, ambient: usize) -> Self {
        Extensor { step, ambient, coords: vec![Rational::zero(); binomial(ambient, step)] }
    }

    pub fn scalar(value: Rational, ambient: usize) -> Self {
        Extensor { step: 0, ambient, coords: vec![value] }
    }

    pub fn vector(coords: Vec<Rational>) -> Self {
        Extensor { step: 1, ambient: coords.len(), coords }
    }

    /// Basis vector `e_i`, counting from 1.
    pub fn basis_vector(i: usize, ambient: usize) -> Self {
        let mut e = Self::zero(1, ambient);
        e.coords[i - 1] = Rational::one();
        e
    }

    /// Builds an extensor from its coordinates in [`subsets`] order.
    pub fn from_coords(step: usize, ambient: usize, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != binomial(ambient, step) {
            return Err(Error::CoordinateLength(coords.len()));
        }
        Ok(Extensor { step, ambient, coords })
    }

    /// `v_1 ∨ … ∨ v_k`.
    pub fn from_vectors(vectors: &[Vec<Rational>]) -> Result<Self> {
        let ambient = vectors.first().map_or(0, Vec::len);
        vectors.iter().try_fold(Self::scalar(Rational::one(), ambient), |acc, v| join(&acc, &Self::vector(v.clone())))
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// Coordinate on `e_{s_1} … e_{s_k}` for an increasing 1-based subset.
    pub fn coordinate(&self, subset: &[usize]) -> Rational {
        let zero_based: Vec<usize> = subset.iter().map(|i| i - 1).collect();
        self.coords[subset_rank(&zero_based, self.ambient)].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The scalar of a step-0 or top-step extensor.
    pub fn scalar_value(&self) -> Option<Rational> {
        (self.step == 0 || self.step == self.ambient).then(|| self.coords[0].clone())
    }

    /// Coordinates of a step-1 extensor.
    pub fn as_vector(&self) -> Option<&[Rational]> {
        (self.step == 1).then_some(self.coords.as_slice())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Extensor { step: self.step, ambient: self.ambient, coords: self.coords.iter().map(|x| x * c).collect() }
    }

    fn nonzero_terms(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> {
        subsets(self.ambient, self.step).into_iter().zip(&self.coords).filter(|(_, c)| !c.is_zero())
    }
}

/// Wedge product. Steps summing past the ambient dimension give zero.
pub fn join(a: &Extensor, b: &Extensor) -> Result<Extensor> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch(a.ambient, b.ambient));
    }
    let m = a.ambient;
    let mut out = Extensor::zero(a.step + b.step, m);
    if a.step + b.step > m {
        return Ok(out);
    }
    let b_terms: Vec<_> = b.nonzero_terms().collect();
    for (p, ca) in a.nonzero_terms() {
        for (q, cb) in &b_terms {
            if q.iter().any(|x| p.contains(x)) {
                continue;
            }
            let mut union: Vec<usize> = p.iter().chain(q.iter()).copied().collect();
            union.sort_unstable();
            let term = ca * *cb;
            let slot = &mut out.coords[subset_rank(&union, m)];
            if cross_inversions_odd(&p, q) {
                *slot -= term;
            } else {
                *slot += term;
            }
        }
    }
    Ok(out)
}

/// Meet of extensors of steps `j`, `k` with `j + k ≥ m`; result has step
/// `j + k − m`.
pub fn meet(a: &Extensor, b: &Extensor) -> Result<Extensor> {
    if a.ambient != b.ambient {
        return Err(Error::AmbientMismatch(a.ambient, b.ambient));
    }
    let m = a.ambient;
    let (j, k) = (a.step, b.step);
    if j + k < m || j > m || k > m {
        return Err(Error::StepSumTooSmall(j, k, m));
    }
    let mut out = Extensor::zero(j + k - m, m);
    let take = m - k;
    for (p, ca) in a.nonzero_terms() {
        for positions in subsets(j, take) {
            let front: Vec<usize> = positions.iter().map(|&i| p[i]).collect();
            let back: Vec<usize> = p.iter().copied().filter(|x| !front.contains(x)).collect();
            let rest: Vec<usize> = (0..m).filter(|x| !front.contains(x)).collect();
            let cb = &b.coords[subset_rank(&rest, m)];
            if cb.is_zero() {
                continue;
            }
            // sign(σ) for the split of p, times the sign of [e_front ∨ e_rest]
            let odd = cross_inversions_odd(&front, &back) ^ cross_inversions_odd(&front, &rest);
            let term = ca * cb;
            let slot = &mut out.coords[subset_rank(&back, m)];
            if odd {
                *slot -= term;
            } else {
                *slot += term;
            }
        }
    }
    Ok(out)
}

/// Whether `v` lies in the subspace spanned by the nonzero extensor `a`.
pub fn span_contains(a: &Extensor, v: &Extensor) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::ZeroExtensor);
    }
    if v.step != 1 {
        return Err(Error::StepOutOfRange { step: v.step, ambient: 1 });
    }
    Ok(join(a, v)?.is_zero())
}

/// A Grassmann-Cayley expression over labelled points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GcExpr {
    Atom(Label),
    Join(Vec<GcExpr>),
    Meet(Vec<GcExpr>),
}

impl GcExpr {
    pub fn atom(label: Label) -> Self {
        GcExpr::Atom(label)
    }

    /// Join of the given children; a single child is returned as is.
    pub fn join(mut children: Vec<GcExpr>) -> Self {
        assert!(!children.is_empty(), "join needs at least one operand");
        if children.len() == 1 {
            return children.pop().unwrap();
        }
        GcExpr::Join(children)
    }

    /// Meet of the given children, applied left to right.
    pub fn meet(mut children: Vec<GcExpr>) -> Self {
        assert!(!children.is_empty(), "meet needs at least one operand");
        if children.len() == 1 {
            return children.pop().unwrap();
        }
        GcExpr::Meet(children)
    }

    /// Join of point atoms.
    pub fn points(labels: &[Label]) -> Self {
        Self::join(labels.iter().map(|&l| GcExpr::Atom(l)).collect())
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        match self {
            GcExpr::Atom(l) => {
                out.insert(*l);
            }
            GcExpr::Join(ch) | GcExpr::Meet(ch) => ch.iter().for_each(|c| c.collect_labels(out)),
        }
    }

    /// Formal step in ambient dimension `m`, checking every node stays in
    /// `[0, m]` and every meet is defined.
    pub fn step(&self, m: usize) -> Result<usize> {
        let step = match self {
            GcExpr::Atom(_) => 1,
            GcExpr::Join(ch) => ch.iter().map(|c| c.step(m)).sum::<Result<usize>>()?,
            GcExpr::Meet(ch) => {
                let mut acc = ch[0].step(m)?;
                for c in &ch[1..] {
                    let k = c.step(m)?;
                    if acc + k < m {
                        return Err(Error::StepSumTooSmall(acc, k, m));
                    }
                    acc = acc + k - m;
                }
                acc
            }
        };
        if step > m {
            return Err(Error::StepOutOfRange { step, ambient: m });
        }
        Ok(step)
    }

    fn is_point_list(&self) -> bool {
        matches!(self, GcExpr::Join(ch) if ch.iter().all(|c| matches!(c, GcExpr::Atom(_))))
    }
}

/// Printer for the text grammar: juxtaposed labels join points, `^` is meet
/// and `v` is join. Meets and non-trivial joins are parenthesized.
impl fmt::Display for GcExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GcExpr::Atom(l) => write!(f, "{l}"),
            GcExpr::Join(ch) if self.is_point_list() => {
                let parts: Vec<String> = ch.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(" "))
            }
            GcExpr::Join(ch) => {
                let parts: Vec<String> = ch.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join(" v "))
            }
            GcExpr::Meet(ch) => {
                let parts: Vec<String> = ch.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join(" ^ "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    JoinOp,
    MeetOp,
    Label(Label),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((at, c)) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            '(' => tokens.push(Token::Open),
            ')' => tokens.push(Token::Close),
            'v' | 'V' | '∨' => tokens.push(Token::JoinOp),
            '^' | '∧' => tokens.push(Token::MeetOp),
            '0'..='9' => {
                let mut digits = c.to_string();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    digits.push(d);
                    chars.next();
                }
                let label: Label = digits.parse().map_err(|_| Error::Parse(format!("bad label {digits:?}")))?;
                if label == 0 {
                    return Err(Error::Parse("point labels start at 1".into()));
                }
                tokens.push(Token::Label(label));
            }
            other => return Err(Error::Parse(format!("unexpected {other:?} at offset {at}"))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<GcExpr> {
        let mut parts = vec![self.meet_level()?];
        while self.peek() == Some(&Token::JoinOp) {
            self.pos += 1;
            parts.push(self.meet_level()?);
        }
        Ok(GcExpr::join(parts))
    }

    fn meet_level(&mut self) -> Result<GcExpr> {
        let mut parts = vec![self.juxtaposition()?];
        while self.peek() == Some(&Token::MeetOp) {
            self.pos += 1;
            parts.push(self.juxtaposition()?);
        }
        Ok(GcExpr::meet(parts))
    }

    fn juxtaposition(&mut self) -> Result<GcExpr> {
        let mut parts = Vec::new();
        while matches!(self.peek(), Some(Token::Label(_)) | Some(Token::Open)) {
            parts.push(self.primary()?);
        }
        if parts.is_empty() {
            return Err(Error::Parse(format!("expected a point or '(' at token {}", self.pos)));
        }
        Ok(GcExpr::join(parts))
    }

    fn primary(&mut self) -> Result<GcExpr> {
        match self.peek().cloned() {
            Some(Token::Label(l)) => {
                self.pos += 1;
                Ok(GcExpr::Atom(l))
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(Error::Parse(format!("unexpected token at {}", self.pos))),
        }
    }
}

impl FromStr for GcExpr {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut parser = Parser { tokens: tokenize(text)?, pos: 0 };
        let expr = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("trailing input at token {}", parser.pos)));
        }
        Ok(expr)
    }
}

/// Symbolic value: sorted point lists with bracket-polynomial coefficients.
struct SymbolicValue {
    terms: BTreeMap<Vec<Label>, BracketPolynomial>,
}

struct Expander<'a> {
    ambient: usize,
    points: &'a BTreeSet<Label>,
}

impl Expander<'_> {
    fn one(&self) -> BracketPolynomial {
        BracketPolynomial::one(self.ambient, self.points.iter().copied())
    }

    fn accumulate(
        terms: &mut BTreeMap<Vec<Label>, BracketPolynomial>,
        key: Vec<Label>,
        value: BracketPolynomial,
    ) -> Result<()> {
        if value.is_zero() {
            return Ok(());
        }
        let sum = match terms.remove(&key) {
            Some(prev) => prev.checked_add(&value)?,
            None => value,
        };
        if !sum.is_zero() {
            terms.insert(key, sum);
        }
        Ok(())
    }

    fn value(&self, expr: &GcExpr) -> Result<SymbolicValue> {
        match expr {
            GcExpr::Atom(l) => {
                if !self.points.contains(l) {
                    return Err(Error::UnknownLabel(*l));
                }
                Ok(SymbolicValue { terms: BTreeMap::from([(vec![*l], self.one())]) })
            }
            GcExpr::Join(ch) => {
                let mut acc = self.value(&ch[0])?;
                for c in &ch[1..] {
                    acc = self.join(&acc, &self.value(c)?)?;
                }
                Ok(acc)
            }
            GcExpr::Meet(ch) => {
                let mut acc = self.value(&ch[0])?;
                for c in &ch[1..] {
                    acc = self.meet(&acc, &self.value(c)?)?;
                }
                Ok(acc)
            }
        }
    }

    fn join(&self, a: &SymbolicValue, b: &SymbolicValue) -> Result<SymbolicValue> {
        let mut terms = BTreeMap::new();
        for (fa, ca) in &a.terms {
            for (fb, cb) in &b.terms {
                if fa.len() + fb.len() > self.ambient {
                    continue;
                }
                let seq: Vec<Label> = fa.iter().chain(fb).copied().collect();
                let Some((odd, sorted)) = sort_with_sign(seq) else {
                    continue;
                };
                let mut coeff = ca.checked_mul(cb)?;
                if odd {
                    coeff = coeff.neg();
                }
                Self::accumulate(&mut terms, sorted, coeff)?;
            }
        }
        Ok(SymbolicValue { terms })
    }

    fn meet(&self, a: &SymbolicValue, b: &SymbolicValue) -> Result<SymbolicValue> {
        let m = self.ambient;
        let mut terms = BTreeMap::new();
        for (fa, ca) in &a.terms {
            for (fb, cb) in &b.terms {
                let (j, k) = (fa.len(), fb.len());
                if j + k < m {
                    return Err(Error::StepSumTooSmall(j, k, m));
                }
                let product = ca.checked_mul(cb)?;
                for positions in subsets(j, m - k) {
                    let back_positions: Vec<usize> = (0..j).filter(|i| !positions.contains(i)).collect();
                    let split_odd = cross_inversions_odd(&positions, &back_positions);
                    let seq: Vec<Label> = positions.iter().map(|&i| fa[i]).chain(fb.iter().copied()).collect();
                    let SignedBracket::Nonzero { sign, bracket } = normalize_bracket(&seq)? else {
                        continue;
                    };
                    let bracket_poly = BracketPolynomial::bracket(bracket.indices())?;
                    let sign = sign.to_i64() * if split_odd { -1 } else { 1 };
                    let coeff = product.checked_mul(&bracket_poly)?.scale(&Rational::from_integer(sign.into()));
                    let rest: Vec<Label> = back_positions.iter().map(|&i| fa[i]).collect();
                    Self::accumulate(&mut terms, rest, coeff)?;
                }
            }
        }
        Ok(SymbolicValue { terms })
    }
}

/// Sorts a label list, returning the permutation parity, or `None` when a
/// label repeats.
fn sort_with_sign(mut seq: Vec<Label>) -> Option<(bool, Vec<Label>)> {
    let mut odd = false;
    for i in 1..seq.len() {
        let mut k = i;
        while k > 0 && seq[k - 1] > seq[k] {
            seq.swap(k - 1, k);
            odd = !odd;
            k -= 1;
        }
    }
    if seq.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((odd, seq))
}

/// Expands a scalar-valued expression into a bracket polynomial over
/// `points` in ambient dimension `m`.
///
/// The expression must have step 0 or step `m`; a step-`m` result
/// `c · a_1…a_m` is read as `c · [a_1…a_m]`.
pub fn expand_to_brackets(expr: &GcExpr, points: &[Label], m: usize) -> Result<BracketPolynomial> {
    let step = expr.step(m)?;
    if step != 0 && step != m {
        return Err(Error::NotScalar(step));
    }
    let points: BTreeSet<Label> = points.iter().copied().collect();
    let expander = Expander { ambient: m, points: &points };
    let value = expander.value(expr)?;
    let mut out = BracketPolynomial::zero(m, points.iter().copied());
    for (factors, coeff) in value.terms {
        let term =
            if factors.is_empty() { coeff } else { coeff.checked_mul(&BracketPolynomial::bracket(&factors)?)? };
        out = out.checked_add(&term)?;
    }
    Ok(out)
}

/// Evaluates an expression numerically, each atom `i` standing for the
/// column labelled `i`.
pub fn evaluate_expr<C: AsRef<CoordinateMatrix>>(expr: &GcExpr, config: &C) -> Result<Extensor> {
    let matrix = config.as_ref();
    expr.step(matrix.rows())?;
    eval_node(expr, matrix)
}

fn eval_node(expr: &GcExpr, matrix: &CoordinateMatrix) -> Result<Extensor> {
    match expr {
        GcExpr::Atom(l) => {
            let column = matrix.column(*l).ok_or(Error::UnknownLabel(*l))?;
            Ok(Extensor::vector(column.to_vec()))
        }
        GcExpr::Join(ch) => {
            let mut acc = eval_node(&ch[0], matrix)?;
            for c in &ch[1..] {
                acc = join(&acc, &eval_node(c, matrix)?)?;
            }
            Ok(acc)
        }
        GcExpr::Meet(ch) => {
            let mut acc = eval_node(&ch[0], matrix)?;
            for c in &ch[1..] {
                acc = meet(&acc, &eval_node(c, matrix)?)?;
            }
            Ok(acc)
        }
    }
}

impl AsRef<CoordinateMatrix> for CoordinateMatrix {
    fn as_ref(&self) -> &CoordinateMatrix {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordinatization::{evaluate_poly, evaluate_sequence, random_matrix};
    use crate::linalg::{from_columns, nullspace, rank};
    use crate::rational::int;
    use crate::syzygy::straighten;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Extensor {
        Extensor::vector(xs.iter().map(|&x| int(x)).collect())
    }

    fn poly(s: &str) -> BracketPolynomial {
        BracketPolynomial::parse(s).unwrap()
    }

    const PASCAL_FOUR_TERM: &str =
        "[145][256][361][234]-[245][356][461][123]+[245][356][361][124]-[245][256][361][134]";

    #[test]
    fn subset_ranks_follow_enumeration() {
        for m in 0..=7 {
            for k in 0..=m {
                for (i, s) in subsets(m, k).iter().enumerate() {
                    assert_eq!(subset_rank(s, m), i);
                }
                assert_eq!(subsets(m, k).len(), binomial(m, k));
            }
        }
    }

    #[test]
    fn join_examples() {
        let e1 = Extensor::basis_vector(1, 3);
        let e2 = Extensor::basis_vector(2, 3);
        let e12 = join(&e1, &e2).unwrap();
        assert_eq!(e12.step(), 2);
        assert_eq!(e12.coordinate(&[1, 2]), int(1));
        assert_eq!(join(&e2, &e1).unwrap(), e12.scale(&int(-1)));
        assert!(join(&e1, &e1).unwrap().is_zero());

        let pts = [v(&[1, 0, 0]), v(&[1, 1, 1]), v(&[1, 2, 4])];
        let top = join(&join(&pts[0], &pts[1]).unwrap(), &pts[2]).unwrap();
        assert_eq!(top.scalar_value(), Some(int(2)));
        let over = join(&top, &v(&[0, 0, 1])).unwrap();
        assert_eq!(over.step(), 4);
        assert!(over.is_zero());
        assert_eq!(join(&e1, &v(&[1, 0])), Err(Error::AmbientMismatch(3, 2)));
    }

    #[test]
    fn meet_examples() {
        let e = |i| Extensor::basis_vector(i, 3);
        let a = join(&e(1), &e(2)).unwrap();
        let b = join(&e(2), &e(3)).unwrap();
        let p = meet(&a, &b).unwrap();
        assert_eq!(p.step(), 1);
        assert_eq!(p, e(2));
        assert_eq!(meet(&e(1), &e(2)), Err(Error::StepSumTooSmall(1, 1, 3)));
        assert!(meet(&a, &a).unwrap().is_zero());
        assert!(join(&a, &join(&e(1), &e(3)).unwrap()).unwrap().is_zero());

        // (P1 P2) ∧ (P4 P5 P7) = [1457] P2 − [2457] P1 in ambient 4
        let m = random_matrix(4, 1..=7, 11, 30);
        let col = |l| Extensor::vector(m.column(l).unwrap().to_vec());
        let line = join(&col(1), &col(2)).unwrap();
        let plane = Extensor::from_vectors(&[4, 5, 7].map(|l| m.column(l).unwrap().to_vec())).unwrap();
        let expected_coords: Vec<Rational> = (0..4)
            .map(|i| {
                evaluate_sequence(&[1, 4, 5, 7], &m).unwrap() * &m.column(2).unwrap()[i]
                    - evaluate_sequence(&[2, 4, 5, 7], &m).unwrap() * &m.column(1).unwrap()[i]
            })
            .collect();
        assert_eq!(meet(&line, &plane).unwrap(), Extensor::vector(expected_coords));
    }

    #[test]
    fn span_examples() {
        let e = |i| Extensor::basis_vector(i, 3);
        let a = join(&e(1), &e(2)).unwrap();
        assert!(span_contains(&a, &v(&[3, -1, 0])).unwrap());
        assert!(!span_contains(&a, &e(3)).unwrap());
        assert_eq!(span_contains(&Extensor::zero(2, 3), &e(1)), Err(Error::ZeroExtensor));

        // a line meeting a hyperplane at a chosen point Q
        let m = random_matrix(4, 1..=5, 21, 20);
        let col = |l| m.column(l).unwrap().to_vec();
        let q = col(1);
        let line = Extensor::from_vectors(&[q.clone(), col(2)]).unwrap();
        let hyper = Extensor::from_vectors(&[q.clone(), col(3), col(4)]).unwrap();
        let x = meet(&line, &hyper).unwrap();
        assert!(span_contains(&x, &Extensor::vector(q)).unwrap());
        assert!(!span_contains(&x, &Extensor::vector(col(5))).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let text = "((1 2 ^ 4 5 7) v (2 3 ^ 5 6 7) v (3 4 ^ 6 1 7) v 7)";
        let expr: GcExpr = text.parse().unwrap();
        assert_eq!(expr.to_string(), text);
        assert_eq!(expr.step(4).unwrap(), 4);
        let GcExpr::Join(parts) = &expr else { panic!("expected a join") };
        assert_eq!(parts.len(), 4);
        assert_eq!(parts[3], GcExpr::Atom(7));
        assert_eq!(parts[0], GcExpr::meet(vec![GcExpr::points(&[1, 2]), GcExpr::points(&[4, 5, 7])]));

        let unicode: GcExpr = "(1 2 ∧ 4 5) ∨ (2 3 ∧ 5 6) ∨ (3 4 ∧ 6 1)".parse().unwrap();
        assert_eq!(unicode.to_string(), "((1 2 ^ 4 5) v (2 3 ^ 5 6) v (3 4 ^ 6 1))");
        assert_eq!("12 3".parse::<GcExpr>().unwrap(), GcExpr::points(&[12, 3]));

        for bad in ["", "(1 2", "1 2)", "1 ^", "v 1", "1 x 2", "0 1"] {
            assert!(bad.parse::<GcExpr>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn step_bookkeeping() {
        let expr: GcExpr = "1 ^ 2 3".parse().unwrap();
        assert_eq!(expr.step(4), Err(Error::StepSumTooSmall(1, 2, 4)));
        assert_eq!("1 2 ^ 3".parse::<GcExpr>().unwrap().step(3).unwrap(), 0);
        let too_big: GcExpr = "1 2 3 4".parse().unwrap();
        assert!(matches!(too_big.step(3), Err(Error::StepOutOfRange { .. })));
        assert_eq!("1 2 ^ 3 4".parse::<GcExpr>().unwrap().step(3).unwrap(), 1);
    }

    #[test]
    fn pascal_expansion() {
        let expr: GcExpr = "(1 2 ^ 4 5) v (2 3 ^ 5 6) v (3 4 ^ 6 1)".parse().unwrap();
        let expanded = expand_to_brackets(&expr, &[1, 2, 3, 4, 5, 6], 3).unwrap();
        assert_eq!(expanded, poly(PASCAL_FOUR_TERM));
        assert_eq!(straighten(&expanded), poly("[124][135][236][456]-[123][145][246][356]"));
    }

    #[test]
    fn complementary_meet_is_a_bracket() {
        for m in 3..=6 {
            let rest: Vec<Label> = (3..=m).collect();
            let expr = GcExpr::meet(vec![GcExpr::points(&[1, 2]), GcExpr::points(&rest)]);
            assert_eq!(expr.step(m).unwrap(), 0);
            let labels: Vec<Label> = (1..=m).collect();
            let p = expand_to_brackets(&expr, &labels, m).unwrap();
            assert_eq!(p, BracketPolynomial::bracket(&labels).unwrap());
            let mat = random_matrix(m, 1..=m, m as u64, 20);
            assert_eq!(
                evaluate_expr(&expr, &mat).unwrap().scalar_value(),
                Some(evaluate_sequence(&labels, &mat).unwrap())
            );
        }
    }

    #[test]
    fn expansion_errors() {
        let expr: GcExpr = "1 2 ^ 3 4".parse().unwrap();
        assert_eq!(expand_to_brackets(&expr, &[1, 2, 3, 4], 3), Err(Error::NotScalar(1)));
        let pascal: GcExpr = "(1 2 ^ 4 5) v (2 3 ^ 5 6) v (3 4 ^ 6 1)".parse().unwrap();
        assert_eq!(expand_to_brackets(&pascal, &[1, 2, 3, 4, 5], 3), Err(Error::UnknownLabel(6)));
        let mat = random_matrix(3, 1..=5, 0, 10);
        assert_eq!(evaluate_expr(&pascal, &mat), Err(Error::UnknownLabel(6)));
    }

    #[test]
    fn pascal_evaluation_on_and_off_a_conic() {
        let pascal: GcExpr = "(1 2 ^ 4 5) v (2 3 ^ 5 6) v (3 4 ^ 6 1)".parse().unwrap();
        let on =
            CoordinateMatrix::from_columns((0..6).map(|t: i64| vec![int(1), int(t), int(t * t)]).collect()).unwrap();
        assert_eq!(evaluate_expr(&pascal, &on).unwrap().scalar_value(), Some(int(0)));
        let off = random_matrix(3, 1..=6, 5, 50);
        assert_ne!(evaluate_expr(&pascal, &off).unwrap().scalar_value(), Some(int(0)));
    }

    fn arb_columns(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
        proptest::collection::vec(proptest::collection::vec((-4i64..=4).prop_map(int), m), n)
    }

    /// Columns where some vectors may be combinations of earlier ones.
    fn arb_dependent_columns(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
        (arb_columns(m, n), proptest::collection::vec((0usize..4, -2i64..=2, -2i64..=2), n)).prop_map(
            |(mut cols, mix)| {
                for k in 2..cols.len() {
                    let (mode, a, b) = mix[k];
                    if mode == 0 {
                        cols[k] =
                            (0..cols[0].len()).map(|i| int(a) * &cols[k - 1][i] + int(b) * &cols[k - 2][i]).collect();
                    }
                }
                cols
            },
        )
    }

    fn extensor(cols: &[Vec<Rational>]) -> Extensor {
        Extensor::from_vectors(cols).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn join_is_graded_anticommutative(cols in arb_columns(5, 5), j in 1usize..=3, k in 1usize..=2) {
            let a = extensor(&cols[..j]);
            let b = extensor(&cols[j..j + k]);
            let sign = if j * k % 2 == 1 { int(-1) } else { int(1) };
            prop_assert_eq!(join(&a, &b).unwrap(), join(&b, &a).unwrap().scale(&sign));
        }

        #[test]
        fn join_and_meet_are_associative(cols in arb_columns(4, 9)) {
            let a = extensor(&cols[0..1]);
            let b = extensor(&cols[1..2]);
            let c = extensor(&cols[2..4]);
            prop_assert_eq!(
                join(&join(&a, &b).unwrap(), &c).unwrap(),
                join(&a, &join(&b, &c).unwrap()).unwrap()
            );
            let x = extensor(&cols[0..3]);
            let y = extensor(&cols[3..6]);
            let z = extensor(&cols[6..9]);
            prop_assert_eq!(
                meet(&meet(&x, &y).unwrap(), &z).unwrap(),
                meet(&x, &meet(&y, &z).unwrap()).unwrap()
            );
        }

        #[test]
        fn join_is_nonzero_iff_independent(cols in arb_dependent_columns(5, 4), k in 1usize..=4) {
            let a = extensor(&cols[..k]);
            prop_assert_eq!(!a.is_zero(), rank(&from_columns(&cols[..k])) == k);
        }

        #[test]
        fn meet_spans_the_intersection(cols in arb_dependent_columns(4, 6), j in 2usize..=4) {
            let k = 6 - j;
            let (ac, bc) = cols.split_at(j);
            let (a, b) = (extensor(ac), extensor(bc));
            let out = meet(&a, &b).unwrap();
            let spans_everything = rank(&from_columns(&cols)) == 4;
            prop_assert_eq!(!out.is_zero(), !a.is_zero() && !b.is_zero() && spans_everything);
            if !out.is_zero() {
                prop_assert_eq!(out.step(), j + k - 4);
                // oracle: x·a = y·b solved by a nullspace computation
                let mut stacked: Vec<Vec<Rational>> = ac.to_vec();
                stacked.extend(bc.iter().map(|c| c.iter().map(|x| -x).collect::<Vec<_>>()));
                for sol in nullspace(&from_columns(&stacked)) {
                    let w: Vec<Rational> = (0..4)
                        .map(|r| (0..j).map(|i| &sol[i] * &ac[i][r]).sum())
                        .collect();
                    prop_assert!(span_contains(&out, &Extensor::vector(w)).unwrap());
                }
            }
        }

        #[test]
        fn meet_is_graded_anticommutative(cols in arb_columns(5, 8), j in 1usize..=5, k in 1usize..=5) {
            prop_assume!(j + k >= 5 && j + k <= 8);
            let a = extensor(&cols[..j]);
            let b = extensor(&cols[j..j + k]);
            let sign = if (5 - j) * (5 - k) % 2 == 1 { int(-1) } else { int(1) };
            prop_assert_eq!(meet(&a, &b).unwrap(), meet(&b, &a).unwrap().scale(&sign));
        }

        #[test]
        fn join_spans_the_sum(cols in arb_dependent_columns(5, 4), j in 1usize..=3) {
            let ab = join(&extensor(&cols[..j]), &extensor(&cols[j..])).unwrap();
            if !ab.is_zero() {
                for c in &cols {
                    prop_assert!(span_contains(&ab, &Extensor::vector(c.clone())).unwrap());
                }
            }
        }

        #[test]
        fn meet_ignores_the_factorization(cols in arb_columns(4, 5), c in -3i64..=3) {
            let mut refactored = cols[..2].to_vec();
            refactored[0] = (0..4).map(|r| &cols[0][r] + int(c) * &cols[1][r]).collect();
            let b = extensor(&cols[2..5]);
            prop_assert_eq!(meet(&extensor(&refactored), &b).unwrap(), meet(&extensor(&cols[..2]), &b).unwrap());
        }

        #[test]
        fn printing_round_trips(expr in arb_expr()) {
            let text = expr.to_string();
            let back: GcExpr = text.parse().unwrap();
            prop_assert_eq!(&back, &expr);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn expansion_agrees_with_evaluation(seed in any::<u64>()) {
            let expr: GcExpr = "((1 2 ^ 4 5 7) v (2 3 ^ 5 6 7) v (3 4 ^ 6 1 7) v 7)".parse().unwrap();
            let labels: Vec<Label> = (1..=7).collect();
            let p = expand_to_brackets(&expr, &labels, 4).unwrap();
            let mat = random_matrix(4, 1..=7, seed, 20);
            prop_assert_eq!(Some(evaluate_poly(&p, &mat).unwrap()), evaluate_expr(&expr, &mat).unwrap().scalar_value());
        }
    }

    fn arb_expr() -> impl Strategy<Value = GcExpr> {
        let leaf = (1usize..=12).prop_map(GcExpr::Atom);
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..4).prop_map(GcExpr::Join),
                proptest::collection::vec(inner, 2..4).prop_map(GcExpr::Meet),
            ]
        })
    }
}
