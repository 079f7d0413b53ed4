//! Van der Waerden syzygies, the lift homomorphism and the straightening
//! algorithm.
//!
//! Straightening rewrites the largest non-standard monomial first. For a
//! sorted adjacent pair `[μ][λ]` whose first violated row is `t` (so
//! `μ_t > λ_t`), it uses the syzygy with
//!
//! ```text
//! α = (μ_1 … μ_{t-1}),  β = sort(μ_t … μ_w, λ_1 … λ_t),  γ = (λ_{t+1} … λ_w)
//! ```
//!
//! in which `[μ][λ]` appears with coefficient `+1` and every other monomial
//! has a first bracket lexicographically below `μ`. Each rewrite therefore
//! strictly lowers the monomial in the term order, so the loop terminates on
//! the unique standard representative.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bracket::{normalize_bracket, BracketMonomial, BracketPolynomial, Label, Sign, SignedBracket};
use crate::error::{Error, Result};

/// Rewrite steps after which straightening is considered broken.
pub const STRAIGHTEN_STEP_CAP: usize = 1_000_000;

/// One split of `{1..n}` into an increasing subset and its complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleSplit {
    pub tau: Vec<usize>,
    pub complement: Vec<usize>,
    pub sign: Sign,
}

/// Sign of the permutation listing `tau` first and its complement after,
/// both in increasing order.
pub fn shuffle_sign(tau: &[usize], n: usize) -> Result<Sign> {
    if let Some(&bad) = tau.iter().find(|&&t| t == 0 || t > n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    if tau.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotIncreasing);
    }
    // inversions: complement element c sitting after a larger tau element
    let inversions: usize = tau.iter().enumerate().map(|(k, &t)| t - 1 - k).sum();
    Ok(Sign::from_parity(inversions % 2 == 1))
}

/// All increasing `s`-subsets of `{1..n}` with their shuffle signs, in
/// lexicographic order.
pub fn shuffle_splits(n: usize, s: usize) -> Vec<ShuffleSplit> {
    let mut out = Vec::new();
    let mut tau = Vec::with_capacity(s);
    fn rec(start: usize, n: usize, s: usize, tau: &mut Vec<usize>, out: &mut Vec<ShuffleSplit>) {
        if tau.len() == s {
            let complement = (1..=n).filter(|i| !tau.contains(i)).collect();
            let sign = shuffle_sign(tau, n).expect("generated subsets are valid");
            out.push(ShuffleSplit { tau: tau.clone(), complement, sign });
            return;
        }
        for i in start..=n {
            tau.push(i);
            rec(i + 1, n, s, tau, out);
            tau.pop();
        }
    }
    rec(1, n, s, &mut tau, &mut out);
    out
}

/// The van der Waerden syzygy `[[α β• γ]]` of width `w`, with
/// `s = |α| + 1`, `|β| = w + 1` and `|γ| = w − s`.
pub fn van_der_waerden(alpha: &[Label], beta: &[Label], gamma: &[Label], width: usize) -> Result<BracketPolynomial> {
    let s = alpha.len() + 1;
    if beta.len() != width + 1 || s > width || gamma.len() + s != width {
        return Err(Error::InvalidSyzygyShape { alpha: alpha.len(), beta: beta.len(), gamma: gamma.len(), width });
    }
    let terms = shuffle_splits(width + 1, s).into_iter().map(|split| {
        let first: Vec<Label> = alpha.iter().copied().chain(split.complement.iter().map(|&k| beta[k - 1])).collect();
        let second: Vec<Label> = split.tau.iter().map(|&k| beta[k - 1]).chain(gamma.iter().copied()).collect();
        (split.sign.to_rational(), vec![first, second])
    });
    BracketPolynomial::from_terms(width, terms)
}

/// The lift `η_j`: appends `j` to every bracket, raising the width by one.
pub fn lift(p: &BracketPolynomial, j: Label) -> Result<BracketPolynomial> {
    if j == 0 {
        return Err(Error::NonPositiveIndex(j));
    }
    if p.index_set().contains(&j) {
        return Err(Error::IndexNotFresh(j));
    }
    let mut out = BracketPolynomial::zero(p.width() + 1, p.index_set().iter().copied().chain([j]));
    for (m, c) in p.terms() {
        let mut coeff = c.clone();
        let mut brackets = Vec::with_capacity(m.degree());
        for b in m.brackets() {
            let mut seq = b.indices().to_vec();
            seq.push(j);
            match normalize_bracket(&seq)? {
                SignedBracket::Nonzero { sign, bracket } => {
                    if sign == Sign::Minus {
                        coeff = -coeff;
                    }
                    brackets.push(bracket);
                }
                SignedBracket::Zero => unreachable!("j is fresh"),
            }
        }
        out.add_term(BracketMonomial::new(brackets)?, coeff);
    }
    Ok(out)
}

/// Lifts by each index in turn.
pub fn lift_all(p: &BracketPolynomial, js: &[Label]) -> Result<BracketPolynomial> {
    js.iter().try_fold(p.clone(), |acc, &j| lift(&acc, j))
}

/// A single straightening rewrite, for debugging output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub monomial: String,
    pub alpha: Vec<Label>,
    pub beta: Vec<Label>,
    pub gamma: Vec<Label>,
}

pub fn straighten(p: &BracketPolynomial) -> BracketPolynomial {
    run_straighten(p, None)
}

pub fn straighten_with_trace(p: &BracketPolynomial) -> (BracketPolynomial, Vec<RewriteStep>) {
    let mut trace = Vec::new();
    let out = run_straighten(p, Some(&mut trace));
    (out, trace)
}

fn run_straighten(p: &BracketPolynomial, mut trace: Option<&mut Vec<RewriteStep>>) -> BracketPolynomial {
    let width = p.width();
    let mut poly = p.clone();
    // rewrites only create smaller monomials, so everything at or above the
    // last rewritten monomial is already standard
    let mut ceiling: Option<BracketMonomial> = None;
    let mut steps = 0usize;
    loop {
        let next = match &ceiling {
            None => poly.terms().iter().rev().find(|(m, _)| !m.is_standard()),
            Some(top) => poly.terms().range(..top.clone()).rev().find(|(m, _)| !m.is_standard()),
        }
        .map(|(m, c)| (m.clone(), c.clone()));
        let Some((monomial, coeff)) = next else {
            break;
        };
        steps += 1;
        assert!(
            steps <= STRAIGHTEN_STEP_CAP,
            "straightening exceeded {STRAIGHTEN_STEP_CAP} rewrites; term order is not descending"
        );

        let (k, row) = monomial.first_violation().expect("monomial is non-standard");
        let mu = monomial.brackets()[k].indices();
        let lambda = monomial.brackets()[k + 1].indices();
        let alpha = mu[..row].to_vec();
        let mut beta: Vec<Label> = mu[row..].iter().chain(&lambda[..=row]).copied().collect();
        beta.sort_unstable();
        let gamma = lambda[row + 1..].to_vec();
        let syzygy = van_der_waerden(&alpha, &beta, &gamma, width).expect("shape fits by construction");

        let pair = BracketMonomial::new(vec![monomial.brackets()[k].clone(), monomial.brackets()[k + 1].clone()])
            .expect("equal widths");
        let lead = syzygy.coefficient(&pair);
        assert!(!lead.is_zero(), "rewrite syzygy misses {pair}");
        let factor = -(&coeff / &lead);

        if let Some(trace) = trace.as_deref_mut() {
            trace.push(RewriteStep {
                monomial: monomial.to_string(),
                alpha: alpha.clone(),
                beta: beta.clone(),
                gamma: gamma.clone(),
            });
        }

        poly.remove_term(&monomial);
        for (sm, sc) in syzygy.terms() {
            if *sm == pair {
                continue;
            }
            poly.add_term(monomial.replace_adjacent(k, sm), &factor * sc);
        }
        ceiling = Some(monomial);
    }
    poly
}

/// Equality in the bracket ring: `p − q` straightens to zero.
pub fn bracket_equal(p: &BracketPolynomial, q: &BracketPolynomial) -> Result<bool> {
    Ok(straighten(&p.checked_sub(q)?).is_zero())
}

/// `Some(sign)` if `p = sign · q` in the bracket ring.
pub fn bracket_equal_up_to_sign(p: &BracketPolynomial, q: &BracketPolynomial) -> Result<Option<Sign>> {
    if straighten(&p.checked_sub(q)?).is_zero() {
        Ok(Some(Sign::Plus))
    } else if straighten(&p.checked_add(q)?).is_zero() {
        Ok(Some(Sign::Minus))
    } else {
        Ok(None)
    }
}
