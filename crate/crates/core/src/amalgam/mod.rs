//! Amalgamated products `G1 *_H G2` of finite groups and their torsion
//! conjugacy classes.
//!
//! Every finite-order element of an amalgam is conjugate into a factor, and
//! two factor elements are conjugate in the amalgam exactly when their factor
//! classes are linked by a chain of edge elements. The classes are therefore
//! computed by union-find over the factor classes, one merge per `h ∈ H`.
//! The [`oracle`] module checks this against brute-force word arithmetic.

pub mod oracle;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{ConjClassTable, Elt, FiniteGroup, GroupHom};
use crate::modp::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmalgamError {
    #[error("{side} embedding is not injective")]
    NotInjective { side: Side },
    #[error("{side} embedding has the wrong {which}")]
    Mismatch { side: Side, which: &'static str },
    #[error("{0} is not prime")]
    NotPrime(u64),
}

impl AmalgamError {
    pub fn code(&self) -> &'static str {
        match self {
            AmalgamError::NotInjective { .. } => "amalgam-fusion/non-injective-embedding",
            AmalgamError::Mismatch { .. } => "amalgam-fusion/source-target-mismatch",
            AmalgamError::NotPrime(_) => "amalgam-fusion/non-prime",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Amalgam {
    pub left: Arc<FiniteGroup>,
    pub right: Arc<FiniteGroup>,
    pub edge: Arc<FiniteGroup>,
    pub embed_left: GroupHom,
    pub embed_right: GroupHom,
}

pub fn make_amalgam(
    left: Arc<FiniteGroup>,
    right: Arc<FiniteGroup>,
    edge: Arc<FiniteGroup>,
    embed_left: GroupHom,
    embed_right: GroupHom,
) -> Result<Amalgam, AmalgamError> {
    for (side, e, tgt) in [(Side::Left, &embed_left, &left), (Side::Right, &embed_right, &right)] {
        if !e.source.same_table(&edge) {
            return Err(AmalgamError::Mismatch {
                side,
                which: "source",
            });
        }
        if !e.target.same_table(tgt) {
            return Err(AmalgamError::Mismatch {
                side,
                which: "target",
            });
        }
        if !e.is_injective() {
            return Err(AmalgamError::NotInjective { side });
        }
    }
    Ok(Amalgam {
        left,
        right,
        edge,
        embed_left,
        embed_right,
    })
}

impl Amalgam {
    pub fn factor(&self, side: Side) -> &Arc<FiniteGroup> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn embedding(&self, side: Side) -> &GroupHom {
        match side {
            Side::Left => &self.embed_left,
            Side::Right => &self.embed_right,
        }
    }

    pub fn factor_classes(&self, side: Side) -> &Arc<ConjClassTable> {
        self.factor(side).classes()
    }

    pub fn label(&self, side: Side, x: Elt) -> String {
        format!("{side}:{}", self.factor(side).label(x))
    }
}

/// A link `class_L(e1(h)) ~ class_R(e2(h))` used to merge two factor classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionLink {
    pub edge_element: Elt,
    pub left_class: usize,
    pub right_class: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusedClass {
    /// `(side, factor class id)`, sorted.
    pub members: Vec<(Side, usize)>,
    pub rep: (Side, Elt),
    pub order: usize,
    /// Spanning tree of links joining all members.
    pub certificate: Vec<FusionLink>,
}

#[derive(Debug, Clone)]
pub struct TorsionClassSet {
    /// In canonical order: element order, then representative side, then id.
    pub classes: Vec<FusedClass>,
    left_of: Vec<usize>,
    right_of: Vec<usize>,
}

impl TorsionClassSet {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Fused class containing factor class `c` of `side`.
    pub fn fused_of(&self, side: Side, c: usize) -> usize {
        match side {
            Side::Left => self.left_of[c],
            Side::Right => self.right_of[c],
        }
    }

    /// Fused class of an element of a factor.
    pub fn class_of_element(&self, a: &Amalgam, side: Side, x: Elt) -> usize {
        self.fused_of(side, a.factor_classes(side).class_of[x])
    }

    pub fn orders(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.order).collect()
    }

    /// Replays every certificate through the embeddings.
    pub fn verify_certificates(&self, a: &Amalgam) -> Result<(), String> {
        let cl = a.left.classes();
        let cr = a.right.classes();
        for (i, fc) in self.classes.iter().enumerate() {
            let mut uf = UnionFind::new(fc.members.len());
            let pos = |m: (Side, usize)| fc.members.iter().position(|&x| x == m);
            for link in &fc.certificate {
                let h = link.edge_element;
                if cl.class_of[a.embed_left.apply(h)] != link.left_class
                    || cr.class_of[a.embed_right.apply(h)] != link.right_class
                {
                    return Err(format!("class {i}: link through {h} does not replay"));
                }
                let (Some(x), Some(y)) = (
                    pos((Side::Left, link.left_class)),
                    pos((Side::Right, link.right_class)),
                ) else {
                    return Err(format!("class {i}: link leaves the fused class"));
                };
                uf.union(x, y);
            }
            let root = uf.find(0);
            if (0..fc.members.len()).any(|m| uf.find(m) != root) {
                return Err(format!("class {i}: certificate does not connect all members"));
            }
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

pub fn torsion_classes(a: &Amalgam) -> TorsionClassSet {
    let cl = a.left.classes();
    let cr = a.right.classes();
    let (k1, k2) = (cl.len(), cr.len());
    let mut uf = UnionFind::new(k1 + k2);
    let mut links = vec![];
    for h in a.edge.elements() {
        let l = cl.class_of[a.embed_left.apply(h)];
        let r = cr.class_of[a.embed_right.apply(h)];
        if uf.union(l, k1 + r) {
            links.push(FusionLink {
                edge_element: h,
                left_class: l,
                right_class: r,
            });
        }
    }

    let mut groups: std::collections::BTreeMap<usize, Vec<(Side, usize)>> = Default::default();
    for node in 0..k1 + k2 {
        let m = if node < k1 {
            (Side::Left, node)
        } else {
            (Side::Right, node - k1)
        };
        groups.entry(uf.find(node)).or_default().push(m);
    }
    let mut classes: Vec<(usize, FusedClass)> = groups
        .into_iter()
        .map(|(root, members)| {
            let rep = members
                .iter()
                .map(|&(s, c)| {
                    let t = if s == Side::Left { cl } else { cr };
                    (s, t.reps[c])
                })
                .min()
                .expect("nonempty class");
            let (s, c) = members[0];
            let order = if s == Side::Left { cl } else { cr }.elt_order[c];
            (
                root,
                FusedClass {
                    members,
                    rep,
                    order,
                    certificate: vec![],
                },
            )
        })
        .collect();
    for link in links {
        let root = uf.find(link.left_class);
        let fc = classes
            .iter_mut()
            .find(|(r, _)| *r == root)
            .expect("link root is a class");
        fc.1.certificate.push(link);
    }
    let mut classes: Vec<FusedClass> = classes.into_iter().map(|(_, c)| c).collect();
    classes.sort_by_key(|c| (c.order, c.rep));

    let mut left_of = vec![0; k1];
    let mut right_of = vec![0; k2];
    for (i, fc) in classes.iter().enumerate() {
        for &(s, c) in &fc.members {
            match s {
                Side::Left => left_of[c] = i,
                Side::Right => right_of[c] = i,
            }
        }
    }
    TorsionClassSet {
        classes,
        left_of,
        right_of,
    }
}

/// `order` is `p^k` for some `k ≥ 0`; `k = 0` counts only if `include_identity`.
pub fn is_p_power(order: usize, p: u64, include_identity: bool) -> bool {
    if order == 1 {
        return include_identity;
    }
    let mut o = order as u64;
    while o.is_multiple_of(p) {
        o /= p;
    }
    o == 1
}

pub fn check_prime(p: u64) -> Result<(), AmalgamError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(AmalgamError::NotPrime(p))
    }
}

pub fn n_torsion(a: &Amalgam) -> usize {
    torsion_classes(a).len()
}

/// Number of torsion classes of p-power order, identity included.
pub fn n_p(a: &Amalgam, p: u64) -> Result<usize, AmalgamError> {
    n_p_with(a, p, true)
}

pub fn n_p_with(a: &Amalgam, p: u64, include_identity: bool) -> Result<usize, AmalgamError> {
    check_prime(p)?;
    Ok(torsion_classes(a)
        .classes
        .iter()
        .filter(|c| is_p_power(c.order, p, include_identity))
        .count())
}

/// Same count for a finite group.
pub fn n_p_group(g: &FiniteGroup, p: u64, include_identity: bool) -> Result<usize, AmalgamError> {
    check_prime(p)?;
    Ok(g.classes()
        .elt_order
        .iter()
        .filter(|&&o| is_p_power(o, p, include_identity))
        .count())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReportEntry {
    pub rep: String,
    pub order: usize,
    pub members: Vec<String>,
    pub certificate: Vec<CertificateLink>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateLink {
    pub edge: String,
    pub left: String,
    pub right: String,
}

pub fn class_report(a: &Amalgam, t: &TorsionClassSet) -> Vec<ClassReportEntry> {
    let rep_label = |s: Side, c: usize| a.label(s, a.factor_classes(s).reps[c]);
    t.classes
        .iter()
        .map(|fc| ClassReportEntry {
            rep: a.label(fc.rep.0, fc.rep.1),
            order: fc.order,
            members: fc.members.iter().map(|&(s, c)| rep_label(s, c)).collect(),
            certificate: fc
                .certificate
                .iter()
                .map(|l| CertificateLink {
                    edge: a.edge.label(l.edge_element).to_string(),
                    left: rep_label(Side::Left, l.left_class),
                    right: rep_label(Side::Right, l.right_class),
                })
                .collect(),
        })
        .collect()
}
