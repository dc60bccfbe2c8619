//! Certificates that a structure-constant model maps isomorphically onto a
//! computed ring.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{RingModel, RingPresentation};
use crate::characters::CharacterTable;
use crate::cyclotomic::root_of_unity;
use crate::linalg::{det, rank_z};
use crate::rational::{serde_z, serde_z_mat, Z};
use crate::repring::{AmalgamRing, Membership, RFRing, RepRingError};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "kebab-case")]
pub enum CertifyFailure {
    #[error("{expected} generator images of length {rank} needed")]
    BadImages { expected: usize, rank: usize },
    #[error("image of {generator} is not in the lattice")]
    ImageNotInLattice { generator: String },
    #[error("relation {relation} does not vanish: residue {residue:?}")]
    RelationViolated {
        relation: String,
        residue: Vec<String>,
    },
    #[error("model has rank {model}, ring has rank {ring}")]
    RankMismatch { model: usize, ring: usize },
    #[error("mapped basis has rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("mapped basis spans a sublattice of index {index}")]
    Index { index: String },
    #[error("no degree-one image works ({tried} tried)")]
    SearchExhausted { tried: usize },
}

impl CertifyFailure {
    pub fn code(&self) -> &'static str {
        match self {
            CertifyFailure::BadImages { .. } => "ring-presentations/bad-images",
            CertifyFailure::ImageNotInLattice { .. } => "ring-presentations/image-not-in-lattice",
            CertifyFailure::RelationViolated { .. } => "ring-presentations/relation-violated",
            CertifyFailure::RankMismatch { .. } => "ring-presentations/rank-mismatch",
            CertifyFailure::RankDeficient { .. } => "ring-presentations/rank-deficient",
            CertifyFailure::Index { .. } => "ring-presentations/index",
            CertifyFailure::SearchExhausted { .. } => "ring-presentations/search-exhausted",
        }
    }

    pub fn is_math_failure(&self) -> bool {
        !matches!(self, CertifyFailure::BadImages { .. })
    }
}

/// Everything needed to re-check an isomorphism without the groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub generators: Vec<String>,
    #[serde(with = "serde_z_mat")]
    pub images: Vec<Vec<Z>>,
    pub model_basis: Vec<String>,
    /// Row `i` is the image of model basis element `i` in ring coordinates.
    #[serde(with = "serde_z_mat")]
    pub matrix: Vec<Vec<Z>>,
    #[serde(with = "serde_z")]
    pub determinant: Z,
    /// Each relation evaluated on the images; all zero.
    #[serde(with = "serde_z_mat")]
    pub relation_residues: Vec<Vec<Z>>,
}

impl Certificate {
    /// Determinant ±1 and vanishing residues, from the stored data alone.
    pub fn recheck(&self) -> bool {
        let n = self.matrix.len();
        self.matrix.iter().all(|r| r.len() == n)
            && det(&self.matrix) == self.determinant
            && self.determinant.abs().is_one()
            && self.relation_residues.iter().flatten().all(Z::is_zero)
    }
}

fn monomial(r: &RFRing, images: &[Vec<Z>], e: &[u32]) -> Vec<Z> {
    let mut acc = r.unit.clone();
    for (img, &k) in images.iter().zip(e) {
        if k > 0 {
            acc = r.mul(&acc, &r.pow(img, k));
        }
    }
    acc
}

/// Checks that `generator i ↦ images[i]` (ring coordinates) induces a ring
/// isomorphism from the model onto `r`.
pub fn certify_isomorphism(
    p: &RingPresentation,
    m: &RingModel,
    r: &RFRing,
    images: &[Vec<Z>],
) -> Result<Certificate, CertifyFailure> {
    let n = r.rank();
    if images.len() != p.generators.len() || images.iter().any(|v| v.len() != n) {
        return Err(CertifyFailure::BadImages {
            expected: p.generators.len(),
            rank: n,
        });
    }
    let mut residues = vec![];
    for (rel, shown) in p.relations.iter().zip(p.relation_strings()) {
        let mut acc = vec![Z::zero(); n];
        for (e, c) in &rel.poly.terms {
            for (a, x) in acc.iter_mut().zip(monomial(r, images, e)) {
                *a += c * x;
            }
        }
        if acc.iter().any(|x| !x.is_zero()) {
            return Err(CertifyFailure::RelationViolated {
                relation: shown,
                residue: acc.iter().map(Z::to_string).collect(),
            });
        }
        residues.push(acc);
    }
    if m.rank() != n {
        return Err(CertifyFailure::RankMismatch {
            model: m.rank(),
            ring: n,
        });
    }
    let matrix: Vec<Vec<Z>> = m
        .basis_monomials
        .iter()
        .map(|e| monomial(r, images, e))
        .collect();
    let rank = rank_z(&matrix);
    if rank < n {
        return Err(CertifyFailure::RankDeficient { rank, expected: n });
    }
    let d = det(&matrix);
    if !d.abs().is_one() {
        return Err(CertifyFailure::Index {
            index: d.abs().to_string(),
        });
    }
    Ok(Certificate {
        generators: p.generators.clone(),
        images: images.to_vec(),
        model_basis: m.basis_labels.clone(),
        matrix,
        determinant: d,
        relation_residues: residues,
    })
}

/// A degree-one pair chosen for one generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairChoice {
    pub left_row: usize,
    pub right_row: usize,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub choices: Vec<PairChoice>,
    pub tried: usize,
    pub certificate: Certificate,
}

/// Exponents `k` with `χ(x) = ζ_o^k` on each group generator `x` of order `o`.
fn generator_exponents(t: &CharacterTable, row: usize) -> Vec<usize> {
    let cl = &t.classes;
    t.group
        .generators()
        .iter()
        .map(|&x| {
            let c = cl.class_of[x];
            let o = cl.elt_order[c];
            let v = &t.irreducibles[row][c];
            (0..o)
                .find(|&k| root_of_unity(o, k as i64) == *v)
                .expect("degree-one value is a root of unity")
        })
        .collect()
}

/// `"g->z4"`-style description of a degree-one character.
fn describe(t: &CharacterTable, row: usize) -> String {
    let cl = &t.classes;
    t.group
        .generators()
        .iter()
        .map(|&x| format!("{}->{}", t.group.label(x), t.irreducibles[row][cl.class_of[x]]))
        .collect::<Vec<_>>()
        .join(",")
}

fn ordered_degree_one(t: &CharacterTable) -> Vec<usize> {
    let mut rows = t.degree_one();
    rows.sort_by_key(|&i| generator_exponents(t, i));
    rows
}

/// Coordinates in `r` of the pair (left irreducible `i`, right irreducible
/// `j`); `None` if the pair is compatible but not in the lattice.
pub fn pair_coords(
    ar: &AmalgamRing,
    r: &RFRing,
    i: usize,
    j: usize,
) -> Result<Option<Vec<Z>>, RepRingError> {
    let (l, rr) = ar.pair(i, j);
    let (values, _) = ar.element_eval(&l, &rr)?;
    // the full ring has one column per fused class, in order
    let on_r: Vec<_> = r.columns.iter().map(|c| values[c.fused].clone()).collect();
    Ok(match r.coords(&on_r)? {
        Membership::Member(c) => Some(c),
        Membership::NonMember(_) => None,
    })
}

/// Tries every assignment of compatible degree-one pairs to the generators,
/// in a fixed order, until one certifies.
pub fn search_degree_one(
    p: &RingPresentation,
    m: &RingModel,
    ar: &AmalgamRing,
    r: &RFRing,
) -> Result<SearchHit, CertifyFailure> {
    const MAX_TRIES: usize = 100_000;
    let mut candidates = vec![];
    for i in ordered_degree_one(&ar.tables.left) {
        for j in ordered_degree_one(&ar.tables.right) {
            if let Ok(Some(c)) = pair_coords(ar, r, i, j) {
                candidates.push((i, j, c));
            }
        }
    }
    let k = p.generators.len();
    if candidates.is_empty() || k == 0 {
        return Err(CertifyFailure::SearchExhausted { tried: 0 });
    }
    let mut idx = vec![0usize; k];
    let mut tried = 0;
    loop {
        tried += 1;
        let images: Vec<Vec<Z>> = idx.iter().map(|&c| candidates[c].2.clone()).collect();
        if let Ok(certificate) = certify_isomorphism(p, m, r, &images) {
            let choices = idx
                .iter()
                .map(|&c| {
                    let (i, j, _) = candidates[c];
                    PairChoice {
                        left_row: i,
                        right_row: j,
                        left: describe(&ar.tables.left, i),
                        right: describe(&ar.tables.right, j),
                    }
                })
                .collect();
            return Ok(SearchHit {
                choices,
                tried,
                certificate,
            });
        }
        // odometer
        let mut pos = k;
        loop {
            if pos == 0 {
                return Err(CertifyFailure::SearchExhausted { tried });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < candidates.len() {
                break;
            }
            idx[pos] = 0;
        }
        if tried >= MAX_TRIES {
            return Err(CertifyFailure::SearchExhausted { tried });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::tests::{cyc, degenerate, sl2z};
    use crate::presentation::{build_model, parse_presentation, SL2Z_PRESENTATION};
    use crate::repring::compute;

    #[test]
    fn sl2z_search_finds_faithful_pair() {
        let p = parse_presentation(SL2Z_PRESENTATION).unwrap();
        let m = build_model(&p).unwrap();
        let ar = compute(&sl2z()).unwrap();
        let hit = search_degree_one(&p, &m, &ar, &ar.ring).unwrap();
        assert_eq!(hit.choices[0].left, "g->z4");
        assert_eq!(hit.choices[0].right, "g->z6");
        assert!(hit.certificate.determinant.abs().is_one());
        assert!(hit.certificate.recheck());
        let json = serde_json::to_string(&hit).unwrap();
        assert_eq!(serde_json::from_str::<SearchHit>(&json).unwrap(), hit);

        let mut forged = hit.certificate.clone();
        forged.matrix[0][0] += 1;
        assert!(!forged.recheck());
    }

    #[test]
    fn unit_image_is_rank_deficient() {
        let p = parse_presentation(SL2Z_PRESENTATION).unwrap();
        let m = build_model(&p).unwrap();
        let ar = compute(&sl2z()).unwrap();
        let e = certify_isomorphism(&p, &m, &ar.ring, std::slice::from_ref(&ar.ring.unit)).unwrap_err();
        assert_eq!(e, CertifyFailure::RankDeficient { rank: 1, expected: 8 });
    }

    #[test]
    fn relation_violation_reported() {
        let p = parse_presentation(SL2Z_PRESENTATION).unwrap();
        let m = build_model(&p).unwrap();
        let ar = compute(&sl2z()).unwrap();
        let two: Vec<Z> = ar.ring.unit.iter().map(|x| x * 2).collect();
        let e = certify_isomorphism(&p, &m, &ar.ring, &[two]).unwrap_err();
        assert_eq!(e.code(), "ring-presentations/relation-violated");
    }

    #[test]
    fn degenerate_c2_is_group_ring() {
        let p = parse_presentation("ring Z[x] / x^2 - 1 = 0").unwrap();
        let m = build_model(&p).unwrap();
        let ar = compute(&degenerate(cyc(2))).unwrap();
        let hit = search_degree_one(&p, &m, &ar, &ar.ring).unwrap();
        assert_eq!(hit.choices[0].left, "g->-1");
        assert!(hit.certificate.recheck());
    }
}
