//! Bounded conjugacy search in an amalgam, by reduced-word arithmetic.
//!
//! Elements are kept in the normal form `h c_1 c_2 … c_k` with `h ∈ H` and
//! each `c_i` a nontrivial right coset representative of `H` in an
//! alternating factor. Representatives are the minimal element ids of their
//! cosets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Amalgam, Side, TorsionClassSet};
use crate::group::Elt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub head: Elt,
    pub syllables: Vec<(Side, Elt)>,
}

impl NormalForm {
    pub fn identity() -> Self {
        NormalForm {
            head: 0,
            syllables: vec![],
        }
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Conjugate { conjugator: String, length: usize },
    NotFoundWithinBound { bound: usize },
}

impl Verdict {
    pub fn is_conjugate(&self) -> bool {
        matches!(self, Verdict::Conjugate { .. })
    }
}

struct Transversal {
    /// `g = embed(coset_head[g]) * coset_rep[g]`
    coset_rep: Vec<Elt>,
    coset_head: Vec<Elt>,
    reps: Vec<Elt>,
}

/// Word arithmetic for one amalgam.
pub struct WordEngine<'a> {
    a: &'a Amalgam,
    left: Transversal,
    right: Transversal,
}

impl<'a> WordEngine<'a> {
    pub fn new(a: &'a Amalgam) -> Self {
        WordEngine {
            a,
            left: Self::transversal(a, Side::Left),
            right: Self::transversal(a, Side::Right),
        }
    }

    fn transversal(a: &Amalgam, side: Side) -> Transversal {
        let g = a.factor(side);
        let e = a.embedding(side);
        let mut coset_rep = vec![usize::MAX; g.order()];
        let mut coset_head = vec![usize::MAX; g.order()];
        let mut reps = vec![];
        for x in g.elements() {
            if coset_rep[x] != usize::MAX {
                continue;
            }
            // x is the minimal id of its coset H x
            reps.push(x);
            for h in a.edge.elements() {
                let y = g.mul(e.apply(h), x);
                coset_rep[y] = x;
                coset_head[y] = h;
            }
        }
        debug_assert!(coset_head.iter().all(|&h| h != usize::MAX));
        Transversal {
            coset_rep,
            coset_head,
            reps,
        }
    }

    fn tr(&self, side: Side) -> &Transversal {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// `x · w` for `x` in the factor on `side`.
    pub fn lmul(&self, side: Side, x: Elt, w: &NormalForm) -> NormalForm {
        let g = self.a.factor(side);
        let y = g.mul(x, self.a.embedding(side).apply(w.head));
        let tr = self.tr(side);
        let mut syl = w.syllables.clone();
        let z = match syl.first() {
            Some(&(s, c)) if s == side => {
                syl.remove(0);
                g.mul(y, c)
            }
            _ => y,
        };
        let c = tr.coset_rep[z];
        if c != 0 {
            syl.insert(0, (side, c));
        }
        NormalForm {
            head: tr.coset_head[z],
            syllables: syl,
        }
    }

    pub fn from_factor(&self, side: Side, x: Elt) -> NormalForm {
        self.lmul(side, x, &NormalForm::identity())
    }

    pub fn mul(&self, u: &NormalForm, w: &NormalForm) -> NormalForm {
        let mut out = w.clone();
        for &(s, c) in u.syllables.iter().rev() {
            out = self.lmul(s, c, &out);
        }
        self.lmul(Side::Left, self.a.embed_left.apply(u.head), &out)
    }

    pub fn inverse(&self, u: &NormalForm) -> NormalForm {
        let h_inv = self.a.edge.inv(u.head);
        let mut out = self.from_factor(Side::Left, self.a.embed_left.apply(h_inv));
        for &(s, c) in &u.syllables {
            out = self.lmul(s, self.a.factor(s).inv(c), &out);
        }
        out
    }

    pub fn conjugate(&self, w: &NormalForm, x: &NormalForm) -> NormalForm {
        self.mul(&self.mul(w, x), &self.inverse(w))
    }

    pub fn render(&self, w: &NormalForm) -> String {
        let mut parts = vec![];
        if w.head != 0 || w.syllables.is_empty() {
            parts.push(format!("edge:{}", self.a.edge.label(w.head)));
        }
        for &(s, c) in &w.syllables {
            parts.push(self.a.label(s, c));
        }
        parts.join(" * ")
    }

    /// All normal forms with at most `bound` syllables, shortest first.
    pub fn words_up_to(&self, bound: usize) -> Vec<NormalForm> {
        let mut tails: Vec<Vec<(Side, Elt)>> = vec![vec![]];
        let mut frontier = tails.clone();
        for _ in 0..bound {
            let mut next = vec![];
            for t in &frontier {
                for side in [Side::Left, Side::Right] {
                    if t.last().map(|&(s, _)| s) == Some(side) {
                        continue;
                    }
                    for &c in self.tr(side).reps.iter().filter(|&&c| c != 0) {
                        let mut w = t.clone();
                        w.push((side, c));
                        next.push(w);
                    }
                }
            }
            tails.extend(next.iter().cloned());
            frontier = next;
        }
        tails
            .into_iter()
            .flat_map(|syllables| {
                self.a.edge.elements().map(move |head| NormalForm {
                    head,
                    syllables: syllables.clone(),
                })
            })
            .collect()
    }

    /// Every `w x w⁻¹` with `w` of at most `bound` syllables.
    pub fn conjugates_within(&self, x: &NormalForm, bound: usize) -> HashSet<NormalForm> {
        self.words_up_to(bound)
            .iter()
            .map(|w| self.conjugate(w, x))
            .collect()
    }
}

/// Searches for `w` of syllable length at most `bound` with `w x w⁻¹ = y`.
pub fn oracle_conjugacy(
    a: &Amalgam,
    x: (Side, Elt),
    y: (Side, Elt),
    bound: usize,
) -> Verdict {
    let eng = WordEngine::new(a);
    let xf = eng.from_factor(x.0, x.1);
    let yf = eng.from_factor(y.0, y.1);
    for w in eng.words_up_to(bound) {
        if eng.conjugate(&w, &xf) == yf {
            return Verdict::Conjugate {
                conjugator: eng.render(&w),
                length: w.len(),
            };
        }
    }
    Verdict::NotFoundWithinBound { bound }
}

/// A pair of factor class representatives on which fusion and the oracle
/// disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub x: String,
    pub y: String,
    pub fused: bool,
    pub oracle_conjugate: bool,
}

/// Compares the fusion classification with the oracle on every pair of
/// factor class representatives.
pub fn check_against_oracle(
    a: &Amalgam,
    t: &TorsionClassSet,
    bound: usize,
) -> (usize, Vec<Disagreement>) {
    let eng = WordEngine::new(a);
    let words = eng.words_up_to(bound);
    let reps: Vec<(Side, Elt, usize)> = [Side::Left, Side::Right]
        .into_iter()
        .flat_map(|s| {
            let cl = a.factor_classes(s);
            (0..cl.len()).map(move |c| (s, cl.reps[c], c))
        })
        .collect();
    let forms: Vec<NormalForm> = reps.iter().map(|&(s, x, _)| eng.from_factor(s, x)).collect();
    let mut bad = vec![];
    let mut pairs = 0;
    for (i, &(si, xi, ci)) in reps.iter().enumerate() {
        let conj: HashSet<NormalForm> = words.iter().map(|w| eng.conjugate(w, &forms[i])).collect();
        for (j, &(sj, xj, cj)) in reps.iter().enumerate() {
            pairs += 1;
            let fused = t.fused_of(si, ci) == t.fused_of(sj, cj);
            let found = conj.contains(&forms[j]);
            if fused != found {
                bad.push(Disagreement {
                    x: a.label(si, xi),
                    y: a.label(sj, xj),
                    fused,
                    oracle_conjugate: found,
                });
            }
        }
    }
    (pairs, bad)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{free, sl2z};
    use super::*;
    use crate::amalgam::torsion_classes;

    #[test]
    fn normal_form_arithmetic() {
        let a = sl2z();
        let eng = WordEngine::new(&a);
        let x = eng.from_factor(Side::Left, 1);
        let y = eng.from_factor(Side::Right, 1);
        let xy = eng.mul(&x, &y);
        assert_eq!(xy.len(), 2);
        assert_eq!(eng.mul(&xy, &eng.inverse(&xy)), NormalForm::identity());
        // g^2 in C4 and g^3 in C6 are the same element of the amalgam
        assert_eq!(eng.from_factor(Side::Left, 2), eng.from_factor(Side::Right, 3));
        // x^4 = 1
        let mut p = NormalForm::identity();
        for _ in 0..4 {
            p = eng.mul(&p, &x);
        }
        assert_eq!(p, NormalForm::identity());
        for w in eng.words_up_to(3) {
            assert_eq!(eng.mul(&eng.inverse(&w), &w), NormalForm::identity());
        }
    }

    #[test]
    fn oracle_examples() {
        let a = sl2z();
        assert!(oracle_conjugacy(&a, (Side::Left, 1), (Side::Left, 1), 0).is_conjugate());
        assert!(oracle_conjugacy(&a, (Side::Left, 2), (Side::Right, 3), 0).is_conjugate());
        // g and g^3 in C4 are not conjugate in SL2(Z)
        assert!(!oracle_conjugacy(&a, (Side::Left, 1), (Side::Left, 3), 4).is_conjugate());

        let f = free(2, 2);
        for l in 0..=8 {
            assert_eq!(
                oracle_conjugacy(&f, (Side::Left, 1), (Side::Right, 1), l),
                Verdict::NotFoundWithinBound { bound: l }
            );
        }
    }

    #[test]
    fn free_product_count_from_oracle() {
        // independent count: orbits of factor class reps under bounded conjugacy
        let f = free(2, 2);
        let eng = WordEngine::new(&f);
        let reps = [(Side::Left, 0), (Side::Left, 1), (Side::Right, 0), (Side::Right, 1)];
        let mut classes: Vec<HashSet<NormalForm>> = vec![];
        for (s, x) in reps {
            let xf = eng.from_factor(s, x);
            if !classes.iter().any(|c| c.contains(&xf)) {
                classes.push(eng.conjugates_within(&xf, 6));
            }
        }
        assert_eq!(classes.len(), 3);
        assert_eq!(torsion_classes(&f).len(), 3);
    }

    #[test]
    fn fusion_matches_oracle() {
        for a in [sl2z(), free(2, 3)] {
            let t = torsion_classes(&a);
            let (pairs, bad) = check_against_oracle(&a, &t, 6);
            assert!(pairs > 0);
            assert!(bad.is_empty(), "{bad:?}");
        }
    }
}
