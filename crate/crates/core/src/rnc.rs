//! Equations for `d+4` points on a rational normal curve in `ℙ^d`.
//!
//! For each 6-subset `I` of the labels the quartic `φ_I` (Pascal's conic
//! condition on `I`) is carried to width `d+1` in two ways: by the
//! complement substitution ([`psi_substitution`]) and by lifting with the
//! complementary labels ([`psi_lifted`]). The two differ by an overall
//! sign. [`gc_condition`] is the synthetic version: three line/hyperplane
//! intersections and the points of `Iᶜ` must lie on a common hyperplane.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bracket::{BracketPolynomial, Label};
use crate::coordinatization::CoordinateMatrix;
use crate::error::{Error, Result};
use crate::gc::{evaluate_expr, join, meet, subsets, Extensor, GcExpr};
use crate::linalg::{determinant, from_columns, inverse, mat_vec, rank, Matrix};
use crate::rational::{parse_rational, Rational};
use crate::syzygy::lift_all;

/// `n` labelled points of `ℙ^d` as the columns of a `(d+1) × n` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfiguration {
    dimension: usize,
    matrix: CoordinateMatrix,
}

impl PointConfiguration {
    /// Points labelled `1..=n` in the given order.
    pub fn new(dimension: usize, columns: Vec<Vec<Rational>>) -> Result<Self> {
        for (k, c) in columns.iter().enumerate() {
            if c.len() != dimension + 1 {
                return Err(Error::CoordinateLength(k + 1));
            }
            if c.iter().all(Zero::is_zero) {
                return Err(Error::ZeroColumn(k + 1));
            }
        }
        let matrix = CoordinateMatrix::from_columns(columns)?;
        Ok(PointConfiguration { dimension, matrix })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.matrix.labels().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn columns(&self) -> &[Vec<Rational>] {
        self.matrix.columns()
    }

    /// Coordinates of point `label`, counting from 1.
    pub fn point(&self, label: Label) -> &[Rational] {
        &self.matrix.columns()[label - 1]
    }

    pub fn matrix(&self) -> &CoordinateMatrix {
        &self.matrix
    }

    /// Applies `x ↦ M x` to every point.
    pub fn transform(&self, m: &Matrix) -> Result<Self> {
        if determinant(m).is_zero() {
            return Err(Error::SingularTransform);
        }
        Self::new(self.dimension, self.columns().iter().map(|c| mat_vec(m, c)).collect())
    }

    /// Relabels so that new point `k` is old point `order[k-1]`.
    pub fn relabel(&self, order: &[Label]) -> Result<Self> {
        Self::new(self.dimension, order.iter().map(|&l| self.point(l).to_vec()).collect())
    }

    pub fn with_point(&self, label: Label, coords: Vec<Rational>) -> Result<Self> {
        let mut columns = self.columns().to_vec();
        columns[label - 1] = coords;
        Self::new(self.dimension, columns)
    }
}

impl AsRef<CoordinateMatrix> for PointConfiguration {
    fn as_ref(&self) -> &CoordinateMatrix {
        &self.matrix
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct ConfigurationDocument {
    dimension: usize,
    points: Vec<Vec<Entry>>,
}

impl Serialize for PointConfiguration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigurationDocument {
            dimension: self.dimension,
            points: self.columns().iter().map(|c| c.iter().map(|x| Entry::Text(x.to_string())).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointConfiguration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = ConfigurationDocument::deserialize(d)?;
        let columns = doc
            .points
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|e| match e {
                        Entry::Int(n) => Ok(Rational::from_integer(n.into())),
                        Entry::Text(t) => parse_rational(&t),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        PointConfiguration::new(doc.dimension, columns).map_err(D::Error::custom)
    }
}

/// An increasing 6-subset `I` of `{1..n}` together with its complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetI {
    n: usize,
    i: [Label; 6],
    complement: Vec<Label>,
}

impl SubsetI {
    pub fn new(i: &[Label], n: usize) -> Result<Self> {
        let arr: [Label; 6] =
            i.try_into().map_err(|_| Error::InvalidSubset(format!("expected 6 labels, got {}", i.len())))?;
        if arr.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubset(format!("{arr:?} is not increasing")));
        }
        if arr[0] == 0 || arr[5] > n {
            return Err(Error::InvalidSubset(format!("{arr:?} is not inside 1..={n}")));
        }
        let complement = (1..=n).filter(|l| !arr.contains(l)).collect();
        Ok(SubsetI { n, i: arr, complement })
    }

    /// All 6-subsets of `{1..n}` in lexicographic order.
    pub fn all(n: usize) -> Vec<SubsetI> {
        subsets(n, 6)
            .into_iter()
            .map(|s| {
                let labels: Vec<Label> = s.iter().map(|x| x + 1).collect();
                SubsetI::new(&labels, n).expect("valid subset")
            })
            .collect()
    }

    pub fn labels(&self) -> &[Label; 6] {
        &self.i
    }

    pub fn complement(&self) -> &[Label] {
        &self.complement
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl fmt::Display for SubsetI {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.i.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn check_dimension(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(Error::DimensionTooSmall(d, min));
    }
    Ok(())
}

fn check_subset(i: &SubsetI, d: usize) -> Result<()> {
    if i.n != d + 4 {
        return Err(Error::InvalidSubset(format!("{i} is a subset of 1..={}, expected 1..={}", i.n, d + 4)));
    }
    Ok(())
}

/// Pascal's conic condition on the six points of `I`, as index triples.
fn phi_monomials(i: &[Label; 6]) -> [[[Label; 3]; 4]; 2] {
    let [a, b, c, d, e, f] = *i;
    [[[a, b, c], [a, d, e], [b, d, f], [c, e, f]], [[a, b, d], [a, c, e], [b, c, f], [d, e, f]]]
}

fn binomial_poly(
    width: usize,
    index_set: impl IntoIterator<Item = Label>,
    monos: [Vec<Vec<Label>>; 2],
    signs: [i64; 2],
) -> BracketPolynomial {
    BracketPolynomial::from_terms(
        width,
        monos.into_iter().zip(signs).map(|(m, s)| (Rational::from_integer(s.into()), m)),
    )
    .expect("well-formed brackets")
    .with_index_set(index_set)
}

/// `[i₁i₂i₃][i₁i₄i₅][i₂i₄i₆][i₃i₅i₆] − [i₁i₂i₄][i₁i₃i₅][i₂i₃i₆][i₄i₅i₆]`.
pub fn phi(i: &SubsetI) -> BracketPolynomial {
    let monos = phi_monomials(&i.i).map(|m| m.iter().map(|t| t.to_vec()).collect());
    binomial_poly(3, i.i, monos, [1, -1])
}

/// `φ_I` with each `[abc]` replaced by `(−1)^S` times the bracket of the
/// complement of `{a,b,c}` in `{1..d+4}`, `S = (a−1)+(b−2)+(c−3)`.
pub fn psi_substitution(i: &SubsetI, d: usize) -> Result<BracketPolynomial> {
    check_dimension(d, 3)?;
    check_subset(i, d)?;
    let n = d + 4;
    let mut signs = [1i64, -1];
    let monos = phi_monomials(&i.i).map(|m| m.to_vec());
    let mut out: [Vec<Vec<Label>>; 2] = [Vec::new(), Vec::new()];
    for (k, mono) in monos.iter().enumerate() {
        for t in mono {
            let s = (t[0] - 1) + (t[1] - 2) + (t[2] - 3);
            if s % 2 == 1 {
                signs[k] = -signs[k];
            }
            out[k].push((1..=n).filter(|l| !t.contains(l)).collect());
        }
    }
    Ok(binomial_poly(d + 1, 1..=n, out, signs))
}

/// `η_{j_{d−2}} ∘ … ∘ η_{j_1}(φ_I)`.
pub fn psi_lifted(i: &SubsetI, d: usize) -> Result<BracketPolynomial> {
    check_dimension(d, 3)?;
    check_subset(i, d)?;
    lift_all(&phi(i), i.complement())
}

/// The residue polynomial used for membership: `φ_I` when `d = 2`, `ψ_I`
/// otherwise.
fn residue_poly(i: &SubsetI, d: usize) -> Result<BracketPolynomial> {
    if d == 2 {
        Ok(phi(i))
    } else {
        psi_substitution(i, d)
    }
}

/// The four parts `I₁ ⊔ I₂ ⊔ I₃ ⊔ I₄` of `Iᶜ` distributed over the three
/// line factors and the trailing join.
fn condition_expr(i: &SubsetI, parts: [&[Label]; 4]) -> GcExpr {
    let [i1, i2, i3, i4, i5, i6] = i.i;
    let js = i.complement();
    let factor = |a: Label, b: Label, extra: &[Label], c: Label, e: Label| {
        let line: Vec<Label> = [a, b].into_iter().chain(extra.iter().copied()).collect();
        let hyper: Vec<Label> = [c, e].into_iter().chain(js.iter().copied()).collect();
        GcExpr::meet(vec![GcExpr::points(&line), GcExpr::points(&hyper)])
    };
    let mut terms =
        vec![factor(i1, i2, parts[0], i4, i5), factor(i2, i3, parts[1], i5, i6), factor(i3, i4, parts[2], i6, i1)];
    if !parts[3].is_empty() {
        terms.push(GcExpr::points(parts[3]));
    }
    GcExpr::join(terms)
}

/// `(P_{i₁}P_{i₂} ∧ P_{i₄}P_{i₅}P_J) ∨ (P_{i₂}P_{i₃} ∧ P_{i₅}P_{i₆}P_J) ∨
/// (P_{i₃}P_{i₄} ∧ P_{i₆}P_{i₁}P_J) ∨ P_J` with `J = Iᶜ`.
pub fn gc_condition(i: &SubsetI, d: usize) -> Result<GcExpr> {
    check_dimension(d, 3)?;
    check_subset(i, d)?;
    Ok(condition_expr(i, [&[], &[], &[], i.complement()]))
}

/// The rewritten condition where parts `I₁, I₂, I₃` of `Iᶜ` join the three
/// lines and `I₄` is joined at the end.
pub fn gc_condition_partitioned(i: &SubsetI, parts: &[Vec<Label>; 4], d: usize) -> Result<GcExpr> {
    check_dimension(d, 3)?;
    check_subset(i, d)?;
    let mut seen = BTreeSet::new();
    for p in parts {
        if p.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!("{p:?} is not ascending")));
        }
        for &l in p {
            if !seen.insert(l) {
                return Err(Error::InvalidPartition(format!("label {l} appears twice")));
            }
        }
    }
    if !seen.iter().copied().eq(i.complement().iter().copied()) {
        return Err(Error::InvalidPartition(format!("parts cover {seen:?}, expected {:?}", i.complement())));
    }
    Ok(condition_expr(i, [&parts[0], &parts[1], &parts[2], &parts[3]]))
}

/// Random partition of `Iᶜ` into four ascending parts.
pub fn random_partition(i: &SubsetI, seed: u64) -> [Vec<Label>; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<Label>; 4] = Default::default();
    for &j in i.complement() {
        parts[rng.random_range(0..4)].push(j);
    }
    parts
}

/// Whether the points span at most a hyperplane.
pub fn on_hyperplane(config: &PointConfiguration) -> bool {
    rank(&from_columns(config.columns())) <= config.dimension
}

/// Whether every `d+1` of the points are independent.
pub fn general_position(config: &PointConfiguration) -> bool {
    MinorTable::new(config).all_nonzero()
}

/// Maximal minors `[λ]` of a configuration, keyed by increasing label lists.
struct MinorTable {
    minors: HashMap<Vec<Label>, Rational>,
}

impl MinorTable {
    fn new(config: &PointConfiguration) -> Self {
        let w = config.dimension + 1;
        let minors = subsets(config.len(), w)
            .into_par_iter()
            .map(|s| {
                let labels: Vec<Label> = s.iter().map(|x| x + 1).collect();
                let cols: Vec<Vec<Rational>> = labels.iter().map(|&l| config.point(l).to_vec()).collect();
                (labels, determinant(&from_columns(&cols)))
            })
            .collect();
        MinorTable { minors }
    }

    fn all_nonzero(&self) -> bool {
        !self.minors.is_empty() && self.minors.values().all(|v| !v.is_zero())
    }

    fn evaluate(&self, p: &BracketPolynomial) -> Rational {
        let mut total = Rational::zero();
        for (m, c) in p.terms() {
            let mut term = c.clone();
            for b in m.brackets() {
                term *= &self.minors[b.indices()];
            }
            total += term;
        }
        total
    }
}

/// Which family of tests decides the verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Algebraic,
    Geometric,
    #[default]
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algebraic" => Ok(Method::Algebraic),
            "geometric" => Ok(Method::Geometric),
            "both" => Ok(Method::Both),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "in_V")]
    InV,
    #[serde(rename = "not_in_V")]
    NotInV,
    #[serde(rename = "hyperplane_case")]
    HyperplaneCase,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::InV => "in_V",
            Verdict::NotInV => "not_in_V",
            Verdict::HyperplaneCase => "hyperplane_case",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetResult {
    #[serde(rename = "I")]
    pub i: Vec<Label>,
    #[serde(with = "crate::rational::serde_string::option", default, skip_serializing_if = "Option::is_none")]
    pub residue: Option<Rational>,
    #[serde(with = "crate::rational::serde_string::option", default, skip_serializing_if = "Option::is_none")]
    pub geometric_determinant: Option<Rational>,
    pub degenerate: bool,
}

impl SubsetResult {
    /// Whether the subset's condition fails (a nonzero residue, or a
    /// nonzero determinant when no residue was computed).
    pub fn fails(&self) -> bool {
        match (&self.residue, &self.geometric_determinant) {
            (Some(r), _) => !r.is_zero(),
            (None, Some(g)) => !self.degenerate && !g.is_zero(),
            (None, None) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub dimension: usize,
    pub n: usize,
    pub method: Method,
    pub on_hyperplane: bool,
    pub general_position: bool,
    pub subsets: Vec<SubsetResult>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MembershipReport {
    pub fn first_failure(&self) -> Option<&SubsetResult> {
        self.subsets.iter().find(|s| s.fails())
    }
}

/// Intersection points of [`geometric_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricCheck {
    pub points: [Extensor; 3],
    pub determinant: Rational,
    pub degenerate: bool,
}

/// Join of the labelled points. Each point is first scaled to integer
/// coordinates and the product of the scales divided out at the end, which
/// keeps the intermediate products small.
fn point_extensor(config: &PointConfiguration, labels: &[Label]) -> Extensor {
    let m = config.dimension + 1;
    let mut scale = Rational::one();
    let joined = labels.iter().fold(Extensor::scalar(Rational::one(), m), |acc, &l| {
        let p = config.point(l);
        let lcm = Rational::from_integer(p.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom())));
        let v = p.iter().map(|x| x * &lcm).collect();
        scale /= lcm;
        join(&acc, &Extensor::vector(v)).expect("same ambient")
    });
    joined.scale(&scale)
}

/// Sorts a label list, reporting whether the permutation was odd.
fn sorted_with_parity(labels: &[Label]) -> (Vec<Label>, bool) {
    let mut sorted = labels.to_vec();
    let mut odd = false;
    for a in 0..sorted.len() {
        for b in 0..sorted.len() - 1 - a {
            if sorted[b] > sorted[b + 1] {
                sorted.swap(b, b + 1);
                odd = !odd;
            }
        }
    }
    (sorted, odd)
}

fn hyperplane_labels(i: &SubsetI) -> [Vec<Label>; 3] {
    let [i1, _, _, i4, i5, i6] = i.i;
    let with_js = |c: Label, e: Label| [c, e].into_iter().chain(i.complement().iter().copied()).collect();
    [with_js(i4, i5), with_js(i5, i6), with_js(i6, i1)]
}

/// Hyperplane extensors shared by the geometric checks of several subsets,
/// keyed by sorted label set.
struct HyperplaneTable(HashMap<Vec<Label>, Extensor>);

impl HyperplaneTable {
    fn new(config: &PointConfiguration, subsets: &[SubsetI]) -> Self {
        let keys: BTreeSet<Vec<Label>> =
            subsets.iter().flat_map(hyperplane_labels).map(|l| sorted_with_parity(&l).0).collect();
        let keys: Vec<Vec<Label>> = keys.into_iter().collect();
        let table = keys.into_par_iter().map(|k| {
            let e = point_extensor(config, &k);
            (k, e)
        });
        HyperplaneTable(table.collect())
    }

    fn get(&self, labels: &[Label]) -> Extensor {
        let (sorted, odd) = sorted_with_parity(labels);
        let e = &self.0[&sorted];
        if odd {
            e.scale(&-Rational::one())
        } else {
            e.clone()
        }
    }
}

/// The three line/hyperplane intersections for `I` and the determinant of
/// the matrix with columns `Q₁, Q₂, Q₃, P_{j₁}, …, P_{j_{d−2}}`.
///
/// Works for `d = 2` too, where it is the Pascal line test.
pub fn geometric_check(config: &PointConfiguration, i: &SubsetI) -> Result<GeometricCheck> {
    let d = config.dimension;
    check_dimension(d, 2)?;
    if config.len() != d + 4 {
        return Err(Error::WrongPointCount { expected: d + 4, got: config.len() });
    }
    check_subset(i, d)?;
    geometric_check_with(config, i, |labels| point_extensor(config, labels))
}

fn geometric_check_with(
    config: &PointConfiguration,
    i: &SubsetI,
    hyperplane: impl Fn(&[Label]) -> Extensor,
) -> Result<GeometricCheck> {
    let [i1, i2, i3, i4, ..] = i.i;
    let hypers = hyperplane_labels(i);
    let lines = [[i1, i2], [i2, i3], [i3, i4]];
    let mut points = Vec::with_capacity(3);
    for (line, hyper) in lines.iter().zip(&hypers) {
        points.push(meet(&point_extensor(config, line), &hyperplane(hyper))?);
    }
    let points: [Extensor; 3] = points.try_into().expect("three points");
    let degenerate = points.iter().any(Extensor::is_zero);
    let mut cols: Vec<Vec<Rational>> =
        points.iter().map(|p| p.as_vector().expect("meet of a line and a hyperplane").to_vec()).collect();
    cols.extend(i.complement().iter().map(|&j| config.point(j).to_vec()));
    let determinant = determinant(&from_columns(&cols));
    Ok(GeometricCheck { points, determinant, degenerate })
}

/// The GC expression evaluated numerically; equals the determinant of
/// [`geometric_check`].
pub fn evaluate_condition(config: &PointConfiguration, i: &SubsetI) -> Result<Rational> {
    let expr = condition_expr(i, [&[], &[], &[], i.complement()]);
    let value = evaluate_expr(&expr, config)?;
    Ok(value.scalar_value().expect("condition has top step"))
}

pub fn check_membership(config: &PointConfiguration, method: Method) -> Result<MembershipReport> {
    check_membership_on(config, method, None)
}

/// [`check_membership`] restricted to the given subsets, or all of them.
pub fn check_membership_on(
    config: &PointConfiguration,
    method: Method,
    only: Option<&[SubsetI]>,
) -> Result<MembershipReport> {
    let d = config.dimension;
    check_dimension(d, 2)?;
    let n = d + 4;
    if config.len() != n {
        return Err(Error::WrongPointCount { expected: n, got: config.len() });
    }
    let all;
    let chosen: &[SubsetI] = match only {
        Some(s) => {
            for i in s {
                check_subset(i, d)?;
            }
            s
        }
        None => {
            all = SubsetI::all(n);
            &all
        }
    };
    let table = MinorTable::new(config);
    let hyperplane = on_hyperplane(config);
    let algebraic = method != Method::Geometric;
    let geometric = method != Method::Algebraic;
    let hyperplanes = geometric.then(|| HyperplaneTable::new(config, chosen));
    let subsets = chosen
        .par_iter()
        .map(|i| -> Result<SubsetResult> {
            let residue = if algebraic { Some(table.evaluate(&residue_poly(i, d)?)) } else { None };
            let (geometric_determinant, degenerate) = if geometric {
                let table = hyperplanes.as_ref().expect("built for geometric methods");
                let g = geometric_check_with(config, i, |labels| table.get(labels))?;
                (Some(g.determinant), g.degenerate)
            } else {
                (None, false)
            };
            Ok(SubsetResult { i: i.i.to_vec(), residue, geometric_determinant, degenerate })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = if hyperplane {
        Verdict::HyperplaneCase
    } else if subsets.iter().any(SubsetResult::fails) {
        Verdict::NotInV
    } else {
        Verdict::InV
    };
    let note = match (hyperplane, d) {
        (true, 3 | 4) => Some(format!(
            "the points lie on a hyperplane; for d = {d} such configurations are also limits of points on rational normal curves"
        )),
        (true, _) => Some("the points lie on a hyperplane; the equations do not separate this case".into()),
        (false, _) if only.is_some() => Some("verdict restricted to the requested subsets".into()),
        _ => None,
    };
    Ok(MembershipReport {
        dimension: d,
        n,
        method,
        on_hyperplane: hyperplane,
        general_position: table.all_nonzero(),
        subsets,
        verdict,
        seed: None,
        note,
    })
}

/// A curve parameter; `Infinity` maps to `(0, …, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Finite(t) => write!(f, "{t}"),
            Param::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Param::Infinity),
            t => parse_rational(t).map(Param::Finite),
        }
    }
}

/// Points `(1, t, …, t^d)` on the moment curve, optionally moved by an
/// invertible `(d+1) × (d+1)` matrix.
pub fn sample_moment_curve(d: usize, params: &[Param], transform: Option<&Matrix>) -> Result<PointConfiguration> {
    let mut seen = BTreeSet::new();
    for p in params {
        if !seen.insert(p.to_string()) {
            return Err(Error::RepeatedParameter(p.to_string()));
        }
    }
    if let Some(m) = transform {
        if m.len() != d + 1 || m.iter().any(|row| row.len() != d + 1) || determinant(m).is_zero() {
            return Err(Error::SingularTransform);
        }
    }
    let columns = params
        .iter()
        .map(|p| match p {
            Param::Finite(t) => {
                let mut col = Vec::with_capacity(d + 1);
                let mut x = Rational::one();
                for _ in 0..=d {
                    col.push(x.clone());
                    x *= t;
                }
                col
            }
            Param::Infinity => {
                let mut col = vec![Rational::zero(); d + 1];
                col[d] = Rational::one();
                col
            }
        })
        .map(|c| match transform {
            Some(m) => mat_vec(m, &c),
            None => c,
        })
        .collect();
    PointConfiguration::new(d, columns)
}

/// `count` distinct finite parameters with small numerators and denominators.
pub fn random_parameters(count: usize, seed: u64) -> Vec<Param> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t = Rational::new(rng.random_range(-30i64..=30).into(), rng.random_range(1i64..=6).into());
        if seen.insert(t.clone()) {
            out.push(Param::Finite(t));
        }
    }
    out
}

/// A random invertible integer matrix.
pub fn random_transform(size: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m: Matrix = (0..size)
            .map(|_| (0..size).map(|_| Rational::from_integer(rng.random_range(-5i64..=5).into())).collect())
            .collect();
        if inverse(&m).is_some() {
            return m;
        }
    }
}

/// A random point with entries of height at most `height`.
pub fn random_point(size: usize, seed: u64, height: i64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let p: Vec<Rational> = (0..size)
            .map(|_| Rational::new(rng.random_range(-height..=height).into(), rng.random_range(1..=height).into()))
            .collect();
        if p.iter().any(|x| !x.is_zero()) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordinatization::{evaluate_poly, is_syzygy_probabilistic};
    use crate::gc::expand_to_brackets;
    use crate::rational::{int, ratio};
    use crate::syzygy::{bracket_equal_up_to_sign, straighten};
    use proptest::prelude::*;

    fn poly(s: &str) -> BracketPolynomial {
        BracketPolynomial::parse(s).unwrap()
    }

    fn first(n: usize) -> SubsetI {
        SubsetI::new(&[1, 2, 3, 4, 5, 6], n).unwrap()
    }

    fn params(ts: &[(i64, i64)]) -> Vec<Param> {
        ts.iter().map(|&(p, q)| Param::Finite(ratio(p, q))).collect()
    }

    fn cubic_sample() -> PointConfiguration {
        sample_moment_curve(3, &params(&[(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (1, 2)]), None).unwrap()
    }

    #[test]
    fn subsets_and_complements() {
        let s = SubsetI::new(&[1, 3, 4, 5, 7, 8], 9).unwrap();
        assert_eq!(s.complement(), &[2, 6, 9]);
        assert_eq!(SubsetI::all(7).len(), 7);
        assert_eq!(SubsetI::all(10).len(), 210);
        assert!(SubsetI::all(8).windows(2).all(|w| w[0].labels() < w[1].labels()));
        assert!(SubsetI::new(&[1, 2, 3, 4, 5], 7).is_err());
        assert!(SubsetI::new(&[1, 2, 3, 5, 4, 6], 7).is_err());
        assert!(SubsetI::new(&[1, 2, 3, 4, 5, 8], 7).is_err());
    }

    #[test]
    fn phi_examples() {
        let p = phi(&first(6));
        assert_eq!(p, poly("[123][145][246][356]-[124][135][236][456]"));
        assert!(p.terms().keys().all(|m| m.is_standard()));
        let q = phi(&SubsetI::new(&[2, 3, 4, 5, 6, 7], 7).unwrap());
        assert_eq!(q, poly("[234][256][357][467]-[235][246][347][567]"));
        assert_eq!(q.terms().keys().map(|m| m.degree()).sum::<usize>(), 8);
    }

    #[test]
    fn psi_examples() {
        let i = first(7);
        assert_eq!(psi_lifted(&i, 3).unwrap(), poly("[1237][1457][2467][3567]-[1247][1357][2367][4567]"));
        assert_eq!(psi_substitution(&i, 3).unwrap(), poly("[1247][1357][2367][4567]-[1237][1457][2467][3567]"));
        assert_eq!(
            psi_lifted(&first(8), 4).unwrap(),
            poly("[1,2,3,7,8][1,4,5,7,8][2,4,6,7,8][3,5,6,7,8]-[1,2,4,7,8][1,3,5,7,8][2,3,6,7,8][4,5,6,7,8]")
        );
        assert_eq!(psi_lifted(&first(6), 2), Err(Error::DimensionTooSmall(2, 3)));
        assert!(psi_substitution(&first(7), 4).is_err());
        for b in psi_substitution(&SubsetI::new(&[1, 3, 4, 6, 7, 8], 9).unwrap(), 5)
            .unwrap()
            .terms()
            .keys()
            .flat_map(|m| m.brackets())
        {
            assert_eq!(b.width(), 6);
            assert_eq!([1, 3, 4, 6, 7, 8].iter().filter(|l| !b.contains(**l)).count(), 3);
        }
    }

    #[test]
    fn psi_sign_relation() {
        for d in 3..=5 {
            for i in SubsetI::all(d + 4) {
                let sub = psi_substitution(&i, d).unwrap();
                assert_eq!(sub, psi_lifted(&i, d).unwrap().neg(), "{i}, d = {d}");
                assert!(is_syzygy_probabilistic(&sub.checked_add(&psi_lifted(&i, d).unwrap()).unwrap(), 2, 1));
            }
        }
    }

    #[test]
    fn condition_text_and_steps() {
        let expr = gc_condition(&first(7), 3).unwrap();
        assert_eq!(expr.to_string(), "((1 2 ^ 4 5 7) v (2 3 ^ 5 6 7) v (3 4 ^ 6 1 7) v 7)");
        for d in 3..=6 {
            let i = SubsetI::all(d + 4).pop().unwrap();
            assert_eq!(gc_condition(&i, d).unwrap().step(d + 1).unwrap(), d + 1);
        }
        let trivial = [vec![], vec![], vec![], vec![7]];
        assert_eq!(gc_condition_partitioned(&first(7), &trivial, 3).unwrap(), gc_condition(&first(7), 3).unwrap());
        let split = [vec![7], vec![], vec![], vec![8]];
        assert_eq!(
            gc_condition_partitioned(&first(8), &split, 4).unwrap().to_string(),
            "((1 2 7 ^ 4 5 7 8) v (2 3 ^ 5 6 7 8) v (3 4 ^ 6 1 7 8) v 8)"
        );
        let bad = [
            [vec![8, 7], vec![], vec![], vec![]],
            [vec![7], vec![7], vec![], vec![8]],
            [vec![7], vec![], vec![], vec![]],
        ];
        for b in &bad {
            assert!(matches!(gc_condition_partitioned(&first(8), b, 4), Err(Error::InvalidPartition(_))));
        }
    }

    #[test]
    fn condition_expands_to_lifted_psi() {
        let i = first(7);
        let expanded = expand_to_brackets(&gc_condition(&i, 3).unwrap(), &(1..=7).collect::<Vec<_>>(), 4).unwrap();
        assert_eq!(
            expanded,
            poly("[1457][2567][1367][2347]-[2457][3567][1467][1237]+[2457][3567][1367][1247]-[2457][2567][1367][1347]")
        );
        assert!(straighten(&expanded).equals_up_to_sign(&psi_lifted(&i, 3).unwrap()));

        let split = [vec![7], vec![], vec![], vec![8]];
        let e = gc_condition_partitioned(&first(8), &split, 4).unwrap();
        let p = expand_to_brackets(&e, &(1..=8).collect::<Vec<_>>(), 5).unwrap();
        assert!(bracket_equal_up_to_sign(&p, &psi_lifted(&first(8), 4).unwrap()).unwrap().is_some());
    }

    #[test]
    fn hyperplane_and_position() {
        let cubic = cubic_sample();
        assert!(!on_hyperplane(&cubic));
        assert!(general_position(&cubic));
        let flat = PointConfiguration::new(3, (0..7).map(|t: i64| vec![int(1), int(t), int(t * t), int(0)]).collect())
            .unwrap();
        assert!(on_hyperplane(&flat));
        let basis = PointConfiguration::new(
            2,
            vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]],
        )
        .unwrap();
        assert!(!on_hyperplane(&basis));
        let doubled = cubic.with_point(2, cubic.point(1).iter().map(|x| x * int(3)).collect()).unwrap();
        assert!(!general_position(&doubled));
    }

    #[test]
    fn configuration_validation() {
        assert_eq!(PointConfiguration::new(2, vec![vec![int(0), int(0), int(0)]]), Err(Error::ZeroColumn(1)));
        assert_eq!(PointConfiguration::new(2, vec![vec![int(1), int(0)]]), Err(Error::CoordinateLength(1)));
        let json = r#"{"dimension":2,"points":[["1","0","0"],[1,1,1],["1","2","4"],["1","3","9"],["1","4","16"],["1/3","5","25"]]}"#;
        let c: PointConfiguration = serde_json::from_str(json).unwrap();
        assert_eq!(c.point(6)[0], ratio(1, 3));
        let back: PointConfiguration = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<PointConfiguration>(r#"{"dimension":1,"points":[["0","0"]]}"#).is_err());
        assert!(serde_json::from_str::<PointConfiguration>(r#"{"dimension":1,"points":[["1/0","0"]]}"#).is_err());
    }

    #[test]
    fn sampling() {
        let conic = sample_moment_curve(2, &params(&[(0, 1), (1, 1), (2, 1)]), None).unwrap();
        assert_eq!(
            conic.columns(),
            &[vec![int(1), int(0), int(0)], vec![int(1), int(1), int(1)], vec![int(1), int(2), int(4)]]
        );
        let with_inf = sample_moment_curve(2, &[Param::Finite(int(0)), Param::Infinity], None).unwrap();
        assert_eq!(with_inf.point(2), &[int(0), int(0), int(1)]);
        assert!(matches!(sample_moment_curve(2, &params(&[(1, 1), (2, 2)]), None), Err(Error::RepeatedParameter(_))));
        let singular = vec![vec![int(1), int(1), int(0)], vec![int(1), int(1), int(0)], vec![int(0), int(0), int(1)]];
        assert_eq!(sample_moment_curve(2, &params(&[(1, 1)]), Some(&singular)), Err(Error::SingularTransform));
        assert_eq!(random_parameters(9, 3), random_parameters(9, 3));
        assert_eq!("inf".parse::<Param>().unwrap(), Param::Infinity);
        assert_eq!("-2/4".parse::<Param>().unwrap(), Param::Finite(ratio(-1, 2)));
    }

    #[test]
    fn membership_on_the_twisted_cubic() {
        let cubic = cubic_sample();
        let report = check_membership(&cubic, Method::Both).unwrap();
        assert_eq!(report.verdict, Verdict::InV);
        assert_eq!(report.subsets.len(), 7);
        for (s, i) in report.subsets.iter().zip(SubsetI::all(7)) {
            assert_eq!(s.i, i.labels().to_vec());
            assert_eq!(s.residue, Some(int(0)));
            assert_eq!(s.geometric_determinant, Some(int(0)));
            // oracle: direct determinant evaluation of ψ_I
            assert!(evaluate_poly(&psi_substitution(&i, 3).unwrap(), cubic.matrix()).unwrap().is_zero());
        }
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"verdict\":\"in_V\""));
        assert_eq!(serde_json::from_str::<MembershipReport>(&json).unwrap(), report);

        let moved = cubic.with_point(7, random_point(4, 9, 20)).unwrap();
        let off = check_membership(&moved, Method::Both).unwrap();
        assert_eq!(off.verdict, Verdict::NotInV);
        assert!(off.first_failure().is_some());
        for s in &off.subsets {
            assert_eq!(s.residue.as_ref().unwrap().is_zero(), s.geometric_determinant.as_ref().unwrap().is_zero());
        }
        assert_eq!(check_membership(&moved, Method::Geometric).unwrap().verdict, Verdict::NotInV);
        assert_eq!(check_membership(&moved, Method::Algebraic).unwrap().verdict, Verdict::NotInV);
    }

    #[test]
    fn membership_on_a_transformed_quartic() {
        let d = 4;
        let t = random_transform(d + 1, 17);
        let config = sample_moment_curve(d, &random_parameters(d + 4, 5), Some(&t)).unwrap();
        let report = check_membership(&config, Method::Algebraic).unwrap();
        assert_eq!(report.subsets.len(), 28);
        assert!(report.subsets.iter().all(|s| s.residue == Some(int(0))));
        assert_eq!(report.verdict, Verdict::InV);
    }

    #[test]
    fn hyperplane_case_gets_a_note() {
        let flat =
            PointConfiguration::new(3, (0..7).map(|t: i64| vec![int(1), int(t), int(t * t * t), int(0)]).collect())
                .unwrap();
        let report = check_membership(&flat, Method::Both).unwrap();
        assert_eq!(report.verdict, Verdict::HyperplaneCase);
        assert!(report.note.is_some());
        assert_eq!(
            check_membership(&cubic_sample().relabel(&[1, 2, 3, 4, 5, 6]).unwrap(), Method::Both).err(),
            Some(Error::WrongPointCount { expected: 7, got: 6 })
        );
    }

    #[test]
    fn line_plus_conic_is_in_v() {
        // conic in x₃ = 0 through (1,0,0,0), and a line through that point along e₄
        let mut cols: Vec<Vec<Rational>> =
            [1, 2, 3, -1].iter().map(|&t: &i64| vec![int(1), int(t), int(t * t), int(0)]).collect();
        cols.extend([1, 2, 5].iter().map(|&s| vec![int(1), int(0), int(0), int(s)]));
        let config = PointConfiguration::new(3, cols).unwrap();
        assert!(!on_hyperplane(&config));
        assert_eq!(check_membership(&config, Method::Both).unwrap().verdict, Verdict::InV);
    }

    #[test]
    fn pappus_configuration_has_zero_pascal_residue() {
        // three points on y = 0 and three on x = 0, alternating around the hexagon
        let pts = [(1, 0), (0, 1), (2, 0), (0, 3), (5, 0), (0, -2)];
        let config =
            PointConfiguration::new(2, pts.iter().map(|&(x, y)| vec![int(1), int(x), int(y)]).collect()).unwrap();
        let report = check_membership(&config, Method::Both).unwrap();
        assert_eq!(report.subsets.len(), 1);
        assert_eq!(report.subsets[0].residue, Some(int(0)));
        assert_eq!(report.verdict, Verdict::InV);
    }

    #[test]
    fn geometric_check_details() {
        let cubic = cubic_sample();
        let g = geometric_check(&cubic, &first(7)).unwrap();
        assert!(!g.degenerate);
        assert_eq!(g.determinant, int(0));
        let random = PointConfiguration::new(3, (0..7).map(|k| random_point(4, k, 30)).collect()).unwrap();
        let g = geometric_check(&random, &first(7)).unwrap();
        assert_ne!(g.determinant, int(0));
        assert_eq!(g.determinant, evaluate_condition(&random, &first(7)).unwrap());
        let collapsed = random.with_point(2, random.point(1).to_vec()).unwrap();
        assert!(geometric_check(&collapsed, &first(7)).unwrap().degenerate);
    }

    #[test]
    fn report_determinants_match_standalone_checks() {
        let config = PointConfiguration::new(4, (0..8).map(|k| random_point(5, 40 + k, 9)).collect()).unwrap();
        let report = check_membership(&config, Method::Geometric).unwrap();
        for (i, row) in SubsetI::all(8).iter().zip(&report.subsets) {
            let g = geometric_check(&config, i).unwrap();
            assert_eq!(row.geometric_determinant.as_ref(), Some(&g.determinant), "I = {i}");
            assert_eq!(g.determinant, evaluate_condition(&config, i).unwrap());
        }
    }

    #[test]
    fn restricted_subsets() {
        let cubic = cubic_sample();
        let only = [first(7)];
        let report = check_membership_on(&cubic, Method::Algebraic, Some(&only)).unwrap();
        assert_eq!(report.subsets.len(), 1);
        assert!(report.subsets[0].geometric_determinant.is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn verdict_is_projectively_invariant(seed in any::<u64>(), on_curve in any::<bool>()) {
            let d = 3;
            let mut config = sample_moment_curve(d, &random_parameters(d + 4, seed), None).unwrap();
            if !on_curve {
                config = config.with_point(1, random_point(d + 1, seed ^ 1, 20)).unwrap();
            }
            let base = check_membership(&config, Method::Algebraic).unwrap().verdict;
            let moved = config.transform(&random_transform(d + 1, seed ^ 2)).unwrap();
            prop_assert_eq!(check_membership(&moved, Method::Algebraic).unwrap().verdict, base);
            let scaled = config.with_point(3, config.point(3).iter().map(|x| x * ratio(-7, 3)).collect()).unwrap();
            prop_assert_eq!(check_membership(&scaled, Method::Algebraic).unwrap().verdict, base);
        }

        #[test]
        fn verdict_is_label_invariant(seed in any::<u64>(), order in Just((1..=7).collect::<Vec<Label>>()).prop_shuffle(), on_curve in any::<bool>()) {
            let mut config = sample_moment_curve(3, &random_parameters(7, seed), None).unwrap();
            if !on_curve {
                config = config.with_point(5, random_point(4, seed ^ 3, 20)).unwrap();
            }
            let base = check_membership(&config, Method::Both).unwrap().verdict;
            prop_assert_eq!(check_membership(&config.relabel(&order).unwrap(), Method::Both).unwrap().verdict, base);
        }

        #[test]
        fn residues_vanish_on_samples(seed in any::<u64>(), d in 3usize..=5) {
            let config = sample_moment_curve(d, &random_parameters(d + 4, seed), None).unwrap();
            prop_assert!(general_position(&config));
            let report = check_membership(&config, Method::Algebraic).unwrap();
            prop_assert_eq!(report.verdict, Verdict::InV);
        }
    }
}
