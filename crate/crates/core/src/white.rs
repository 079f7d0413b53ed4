//! Seven points on a twisted cubic and the seven planes through Fano-plane
//! triples of them.
//!
//! Planes are handled as covectors, so a plane of `ℙ³` is a point of the
//! dual space and the rest of the crate applies to them unchanged. In the
//! dual algebra the line `H_a ∩ H_b` is the join `h_a ∨ h_b`, the point
//! `H_c ∩ H_d ∩ H_e` is `h_c ∨ h_d ∨ h_e`, and the plane spanned by such a
//! line and point is their meet.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::Label;
use crate::error::{Error, Result};
use crate::gc::{join, meet, Extensor};
use crate::linalg::{determinant, from_columns};
use crate::rational::Rational;
use crate::rnc::{check_membership, MembershipReport, Method, PointConfiguration, SubsetI, Verdict};

/// Seven triples of `{1..7}` covering every pair exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripleSystem {
    triples: Vec<[Label; 3]>,
}

impl TripleSystem {
    pub fn new(triples: &[[Label; 3]]) -> Result<Self> {
        if triples.len() != 7 {
            return Err(Error::InvalidTripleSystem(format!("expected 7 triples, got {}", triples.len())));
        }
        let mut sorted: Vec<[Label; 3]> = triples
            .iter()
            .map(|t| {
                let mut t = *t;
                t.sort_unstable();
                t
            })
            .collect();
        sorted.sort_unstable();
        let mut pairs = BTreeSet::new();
        for t in &sorted {
            if t[0] == 0 || t[2] > 7 || t[0] == t[1] || t[1] == t[2] {
                return Err(Error::InvalidTripleSystem(format!("bad triple {t:?}")));
            }
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                if !pairs.insert((a, b)) {
                    return Err(Error::InvalidTripleSystem(format!("pair {{{a},{b}}} is covered twice")));
                }
            }
        }
        // 7 triples with no repeated pair cover all 21 pairs
        Ok(TripleSystem { triples: sorted })
    }

    /// The system `{ade, afg, bdf, beg, cdg, cef, abc}` with `a..g ↦ 1..7`.
    pub fn example() -> Self {
        Self::new(&[[1, 4, 5], [1, 6, 7], [2, 4, 6], [2, 5, 7], [3, 4, 7], [3, 5, 6], [1, 2, 3]])
            .expect("a Steiner system")
    }

    pub fn triples(&self) -> &[[Label; 3]] {
        &self.triples
    }

    /// Image under the relabeling `i ↦ perm[i-1]`.
    pub fn relabel(&self, perm: &[Label]) -> Self {
        let mapped: Vec<[Label; 3]> = self.triples.iter().map(|t| t.map(|l| perm[l - 1])).collect();
        Self::new(&mapped).expect("relabeling preserves the Steiner property")
    }
}

impl fmt::Display for TripleSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.triples.iter().map(|t| format!("{}{}{}", t[0], t[1], t[2])).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All 30 Steiner triple systems on `{1..7}`, sorted.
pub fn fano_systems() -> Vec<TripleSystem> {
    fn extend(covered: &mut [[bool; 8]; 8], chosen: &mut Vec<[Label; 3]>, out: &mut Vec<TripleSystem>) {
        // the first uncovered pair must lie in the next triple
        let next = (1..=7).flat_map(|a| (a + 1..=7).map(move |b| (a, b))).find(|&(a, b)| !covered[a][b]);
        let Some((a, b)) = next else {
            out.push(TripleSystem::new(chosen).expect("complete cover"));
            return;
        };
        for c in b + 1..=7 {
            if covered[a][c] || covered[b][c] {
                continue;
            }
            for (x, y) in [(a, b), (a, c), (b, c)] {
                covered[x][y] = true;
            }
            chosen.push([a, b, c]);
            extend(covered, chosen, out);
            chosen.pop();
            for (x, y) in [(a, b), (a, c), (b, c)] {
                covered[x][y] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut [[false; 8]; 8], &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Seven planes of `ℙ³` as covectors, read as points of the dual space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualConfiguration {
    planes: PointConfiguration,
}

impl DualConfiguration {
    pub fn new(covectors: Vec<Vec<Rational>>) -> Result<Self> {
        Ok(DualConfiguration { planes: PointConfiguration::new(3, covectors)? })
    }

    pub fn covector(&self, label: Label) -> &[Rational] {
        self.planes.point(label)
    }

    pub fn covectors(&self) -> &[Vec<Rational>] {
        self.planes.columns()
    }

    pub fn as_points(&self) -> &PointConfiguration {
        &self.planes
    }
}

/// Covector `h` of the plane through `p, q, r`: `h · x = det[p q r x]`.
pub fn plane_covector(p: &[Rational], q: &[Rational], r: &[Rational]) -> Vec<Rational> {
    (0..4)
        .map(|i| {
            let mut e = vec![Rational::zero(); 4];
            e[i] = Rational::from_integer(1.into());
            determinant(&from_columns(&[p.to_vec(), q.to_vec(), r.to_vec(), e]))
        })
        .collect()
}

fn check_seven_in_space(config: &PointConfiguration) -> Result<()> {
    if config.dimension() != 3 {
        return Err(Error::DimensionTooSmall(config.dimension(), 3));
    }
    if config.len() != 7 {
        return Err(Error::WrongPointCount { expected: 7, got: config.len() });
    }
    Ok(())
}

/// Plane `H_k` through the points of the `k`-th triple of `system`.
pub fn planes_from_triples(config: &PointConfiguration, system: &TripleSystem) -> Result<DualConfiguration> {
    check_seven_in_space(config)?;
    let covectors = system
        .triples()
        .iter()
        .map(|t| {
            let h = plane_covector(config.point(t[0]), config.point(t[1]), config.point(t[2]));
            if h.iter().all(Zero::is_zero) {
                return Err(Error::DegenerateTriple(*t));
            }
            Ok(h)
        })
        .collect::<Result<Vec<_>>>()?;
    DualConfiguration::new(covectors)
}

/// Membership test for the seven dual points.
pub fn verify_white(config: &PointConfiguration, system: &TripleSystem) -> Result<MembershipReport> {
    check_membership(planes_from_triples(config, system)?.as_points(), Method::Both)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualIncidence {
    pub is_point: bool,
    pub on_hj: bool,
    pub degenerate: bool,
}

/// The planes `(H_{i₁}∩H_{i₂}) + (H_{i₄}∩H_{i₅}∩H_j)` and its two rotations,
/// as covectors. `None` when a line, point or span degenerates.
pub fn spanned_planes(dual: &DualConfiguration, i: &SubsetI) -> Result<Option<[Extensor; 3]>> {
    let [i1, i2, i3, i4, i5, i6] = *i.labels();
    let &[j] = i.complement() else {
        return Err(Error::InvalidSubset(format!("{i} leaves {} labels, expected 1", i.complement().len())));
    };
    let h = |l: Label| Extensor::vector(dual.covector(l).to_vec());
    let span = |a, b, c, e| -> Result<Extensor> {
        let line = join(&h(a), &h(b))?;
        let point = join(&join(&h(c), &h(e))?, &h(j))?;
        meet(&line, &point)
    };
    let planes = [span(i1, i2, i4, i5)?, span(i2, i3, i5, i6)?, span(i3, i4, i6, i1)?];
    Ok((!planes.iter().any(Extensor::is_zero)).then_some(planes))
}

pub fn dual_incidence(dual: &DualConfiguration, i: &SubsetI) -> Result<DualIncidence> {
    let Some([a, b, c]) = spanned_planes(dual, i)? else {
        return Ok(DualIncidence { is_point: false, on_hj: false, degenerate: true });
    };
    let j = i.complement()[0];
    let three = join(&join(&a, &b)?, &c)?;
    let is_point = !three.is_zero();
    let on_hj = is_point && join(&three, &Extensor::vector(dual.covector(j).to_vec()))?.is_zero();
    Ok(DualIncidence { is_point, on_hj, degenerate: false })
}

pub fn verify_dual_incidence(config: &PointConfiguration, system: &TripleSystem, i: &SubsetI) -> Result<DualIncidence> {
    dual_incidence(&planes_from_triples(config, system)?, i)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceRow {
    #[serde(rename = "I")]
    pub i: Vec<Label>,
    pub j: Label,
    #[serde(flatten)]
    pub incidence: DualIncidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemResult {
    pub triples: Vec<[Label; 3]>,
    pub verdict: Verdict,
    /// Whether no four of the planes pass through a common point.
    pub general_position: bool,
    pub incidences: Vec<IncidenceRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhiteReport {
    pub systems: Vec<SystemResult>,
}

impl WhiteReport {
    /// Every dual configuration is in `V`, and every one in general
    /// position satisfies all seven incidences.
    pub fn all_hold(&self) -> bool {
        self.systems.iter().all(|s| {
            s.verdict == Verdict::InV
                && (!s.general_position || s.incidences.iter().all(|r| r.incidence.is_point && r.incidence.on_hj))
        })
    }
}

/// Dual membership and incidences for every Fano system, in sorted order.
pub fn white_demo(config: &PointConfiguration) -> Result<WhiteReport> {
    check_seven_in_space(config)?;
    let systems = fano_systems()
        .into_par_iter()
        .map(|system| -> Result<SystemResult> {
            let dual = planes_from_triples(config, &system)?;
            let report = check_membership(dual.as_points(), Method::Both)?;
            let incidences = SubsetI::all(7)
                .iter()
                .map(|i| {
                    Ok(IncidenceRow {
                        i: i.labels().to_vec(),
                        j: i.complement()[0],
                        incidence: dual_incidence(&dual, i)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SystemResult {
                triples: system.triples().to_vec(),
                verdict: report.verdict,
                general_position: report.general_position,
                incidences,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WhiteReport { systems })
}
