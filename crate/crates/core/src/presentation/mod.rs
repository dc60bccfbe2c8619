//! Finitely presented commutative rings over Z and their structure-constant
//! models.
//!
//! Two kinds of presentation are understood: a single monic relation in one
//! generator, and "linear-closed" presentations in which every product of two
//! generators is rewritten to an affine combination of the generators.
//! Anything else is rejected.

mod certify;
mod parse;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use certify::{
    certify_isomorphism, pair_coords, search_degree_one, Certificate, CertifyFailure, PairChoice,
    SearchHit,
};
pub use parse::Poly;

use crate::rational::{Q, Z};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("presentation is neither a univariate quotient nor linear-closed: {0}")]
    Unclassifiable(String),
    #[error("associativity fails on ({}, {}, {})", .0[0], .0[1], .0[2])]
    Associativity([String; 3]),
    #[error("multiplication is not commutative on ({0}, {1})")]
    NotCommutative(String, String),
    #[error("1 is not a unit for {0}")]
    Unit(String),
    #[error("two different rules for {pair}: {first} and {second}")]
    InconsistentRule {
        pair: String,
        first: String,
        second: String,
    },
}

impl PresentationError {
    pub fn code(&self) -> &'static str {
        match self {
            PresentationError::Syntax { .. } => "ring-presentations/syntax",
            PresentationError::Unclassifiable(_) => "ring-presentations/unclassifiable-kind",
            PresentationError::Associativity(_) => "ring-presentations/associativity-violation",
            PresentationError::NotCommutative(..) => "ring-presentations/not-commutative",
            PresentationError::Unit(_) => "ring-presentations/unit",
            PresentationError::InconsistentRule { .. } => "ring-presentations/inconsistent-rule",
        }
    }

    /// Parse and classification problems are input errors; the rest are
    /// failed checks on a well-formed presentation.
    pub fn is_math_failure(&self) -> bool {
        !matches!(
            self,
            PresentationError::Syntax { .. } | PresentationError::Unclassifiable(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PresentationKind {
    UnivariateQuotient { degree: usize },
    LinearClosed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    /// Normalized so that the relation reads `poly = 0`.
    pub poly: Poly,
    pub source: String,
}

/// `x_i x_j = c_0 + Σ c_k x_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Rule {
    pair: (usize, usize),
    affine: Vec<Z>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPresentation {
    pub generators: Vec<String>,
    pub relations: Vec<Relation>,
    pub kind: PresentationKind,
    rules: Vec<Rule>,
}

impl RingPresentation {
    pub fn relation_strings(&self) -> Vec<String> {
        self.relations
            .iter()
            .map(|r| format!("{} = 0", r.poly.display_with(&self.generators)))
            .collect()
    }
}

fn monomial_pair(e: &[u32]) -> Option<(usize, usize)> {
    let idx: Vec<usize> = e
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
        .collect();
    match idx[..] {
        [i, j] => Some((i, j)),
        _ => None,
    }
}

fn as_rule(p: &Poly) -> Result<Rule, String> {
    let n = p.nvars;
    let quad: Vec<(&Vec<u32>, &Z)> = p
        .terms
        .iter()
        .filter(|(e, _)| e.iter().sum::<u32>() >= 2)
        .collect();
    let (e, c) = match quad[..] {
        [(e, c)] if e.iter().sum::<u32>() == 2 && c.abs().is_one() => (e, c),
        _ => return Err("relation is not of the form (generator product) = affine".into()),
    };
    let pair = monomial_pair(e).expect("degree two");
    // x_i x_j = -c · (rest)
    let mut affine = vec![Z::zero(); n + 1];
    for (m, v) in &p.terms {
        if m == e {
            continue;
        }
        let slot = match m.iter().position(|&k| k == 1) {
            Some(i) => i + 1,
            None => 0,
        };
        affine[slot] = -(c * v);
    }
    Ok(Rule { pair, affine })
}

/// Parses and classifies a presentation.
pub fn parse_presentation(text: &str) -> Result<RingPresentation, PresentationError> {
    let (generators, rels) = parse::parse(text)?;
    let relations: Vec<Relation> = rels
        .into_iter()
        .map(|(poly, source)| Relation { poly, source })
        .collect();
    let n = generators.len();

    if n == 1 && relations.len() == 1 {
        let p = &relations[0].poly;
        let d = p.total_degree();
        if d >= 1 && p.terms.get(&vec![d]).is_some_and(|c| c.is_one()) {
            return Ok(RingPresentation {
                generators,
                relations,
                kind: PresentationKind::UnivariateQuotient { degree: d as usize },
                rules: vec![],
            });
        }
    }

    let mut rules = vec![];
    for r in &relations {
        let rule = as_rule(&r.poly).map_err(|why| {
            PresentationError::Unclassifiable(format!("{}: {why}", r.source))
        })?;
        rules.push(rule);
    }
    for i in 0..n {
        for j in i..n {
            if !rules.iter().any(|r| r.pair == (i, j)) {
                return Err(PresentationError::Unclassifiable(format!(
                    "no rule for {}*{}",
                    generators[i], generators[j]
                )));
            }
        }
    }
    Ok(RingPresentation {
        generators,
        relations,
        kind: PresentationKind::LinearClosed,
        rules,
    })
}

/// A ring that is free as a Z-module, given by structure constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingModel {
    pub basis_labels: Vec<String>,
    /// Exponent vector in the presentation's generators for each basis element.
    pub basis_monomials: Vec<Vec<u32>>,
    #[serde(with = "crate::rational::serde_z_tensor")]
    pub structure_constants: Vec<Vec<Vec<Z>>>,
    pub unit: usize,
}

impl RingModel {
    pub fn rank(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Z> {
        (0..self.rank())
            .map(|j| if i == j { Z::one() } else { Z::zero() })
            .collect()
    }

    pub fn mul(&self, a: &[Z], b: &[Z]) -> Vec<Z> {
        let n = self.rank();
        let mut out = vec![Z::zero(); n];
        for i in (0..n).filter(|&i| !a[i].is_zero()) {
            for j in (0..n).filter(|&j| !b[j].is_zero()) {
                let ab = &a[i] * &b[j];
                for (o, c) in out.iter_mut().zip(&self.structure_constants[i][j]) {
                    *o += &ab * c;
                }
            }
        }
        out
    }

    /// Unit, commutativity and associativity on all basis elements.
    pub fn verify(&self) -> Result<(), PresentationError> {
        let n = self.rank();
        let e: Vec<Vec<Z>> = (0..n).map(|i| self.basis_vector(i)).collect();
        let u = &e[self.unit];
        for i in 0..n {
            if self.mul(u, &e[i]) != e[i] {
                return Err(PresentationError::Unit(self.basis_labels[i].clone()));
            }
            for j in 0..n {
                if self.structure_constants[i][j] != self.structure_constants[j][i] {
                    return Err(PresentationError::NotCommutative(
                        self.basis_labels[i].clone(),
                        self.basis_labels[j].clone(),
                    ));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul(&e[i], &e[j]);
                for k in 0..n {
                    let jk = self.mul(&e[j], &e[k]);
                    if self.mul(&ij, &e[k]) != self.mul(&e[i], &jk) {
                        return Err(PresentationError::Associativity([
                            self.basis_labels[i].clone(),
                            self.basis_labels[j].clone(),
                            self.basis_labels[k].clone(),
                        ]));
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of multiplication by `a`: column `j` holds `a · b_j`.
    pub fn mul_matrix(&self, a: &[Z]) -> Vec<Vec<Z>> {
        let n = self.rank();
        let cols: Vec<Vec<Z>> = (0..n).map(|j| self.mul(a, &self.basis_vector(j))).collect();
        (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect()
    }

    /// Characteristic polynomial of multiplication by `a`, lowest degree
    /// first and monic.
    pub fn charpoly(&self, a: &[Z]) -> Vec<Z> {
        charpoly(&self.mul_matrix(a))
    }
}

/// Faddeev–LeVerrier over Q.
pub fn charpoly(m: &[Vec<Z>]) -> Vec<Z> {
    let n = m.len();
    let a: Vec<Vec<Q>> = m
        .iter()
        .map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect())
        .collect();
    let matmul = |x: &Vec<Vec<Q>>, y: &Vec<Vec<Q>>| -> Vec<Vec<Q>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &x[i][k] * &y[k][j]).sum())
                    .collect()
            })
            .collect()
    };
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut mk = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        let mut next = matmul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n + 1 - k];
        }
        mk = next;
        let am = matmul(&a, &mk);
        let tr: Q = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / Q::from_integer(Z::from(k));
    }
    c.into_iter()
        .map(|x| {
            debug_assert!(x.is_integer());
            x.to_integer()
        })
        .collect()
}

fn label(generators: &[String], e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| match k {
            1 => generators[i].clone(),
            _ => format!("{}^{}", generators[i], k),
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// The structure-constant model of a classified presentation.
pub fn build_model(p: &RingPresentation) -> Result<RingModel, PresentationError> {
    let model = match p.kind {
        PresentationKind::UnivariateQuotient { degree } => univariate_model(p, degree),
        PresentationKind::LinearClosed => linear_model(p)?,
    };
    model.verify()?;
    Ok(model)
}

fn univariate_model(p: &RingPresentation, d: usize) -> RingModel {
    let f = &p.relations[0].poly;
    // w^d = -Σ_{i<d} f_i w^i
    let tail: Vec<Z> = (0..d)
        .map(|i| -f.terms.get(&vec![i as u32]).cloned().unwrap_or_default())
        .collect();
    let mut powers: Vec<Vec<Z>> = vec![];
    let mut cur: Vec<Z> = (0..d).map(|i| if i == 0 { Z::one() } else { Z::zero() }).collect();
    for _ in 0..(2 * d - 1) {
        powers.push(cur.clone());
        // multiply by w
        let top = cur[d - 1].clone();
        let mut next = vec![Z::zero(); d];
        next[1..d].clone_from_slice(&cur[..d - 1]);
        for (x, t) in next.iter_mut().zip(&tail) {
            *x += &top * t;
        }
        cur = next;
    }
    let sc = (0..d)
        .map(|i| (0..d).map(|j| powers[i + j].clone()).collect())
        .collect();
    let monos: Vec<Vec<u32>> = (0..d as u32).map(|i| vec![i]).collect();
    RingModel {
        basis_labels: monos.iter().map(|e| label(&p.generators, e)).collect(),
        basis_monomials: monos,
        structure_constants: sc,
        unit: 0,
    }
}

fn linear_model(p: &RingPresentation) -> Result<RingModel, PresentationError> {
    let n = p.generators.len();
    let r = n + 1;
    let mut monos = vec![vec![0u32; n]];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        monos.push(e);
    }
    let labels: Vec<String> = monos.iter().map(|e| label(&p.generators, e)).collect();
    let affine_str = |v: &[Z]| {
        let mut q = Poly::constant(n, v[0].clone());
        for (i, c) in v[1..].iter().enumerate() {
            q = q.add(&Poly::var(n, i).mul(&Poly::constant(n, c.clone())));
        }
        q.display_with(&p.generators)
    };
    let mut table: BTreeMap<(usize, usize), Vec<Z>> = BTreeMap::new();
    for rule in &p.rules {
        if let Some(prev) = table.get(&rule.pair) {
            if *prev != rule.affine {
                let (i, j) = rule.pair;
                return Err(PresentationError::InconsistentRule {
                    pair: format!("{}*{}", p.generators[i], p.generators[j]),
                    first: affine_str(prev),
                    second: affine_str(&rule.affine),
                });
            }
        }
        table.insert(rule.pair, rule.affine.clone());
    }
    let mut sc = vec![vec![vec![Z::zero(); r]; r]; r];
    for a in 0..r {
        sc[0][a][a] = Z::one();
        sc[a][0][a] = Z::one();
    }
    for ((i, j), v) in table {
        sc[i + 1][j + 1] = v.clone();
        sc[j + 1][i + 1] = v;
    }
    Ok(RingModel {
        basis_labels: labels,
        basis_monomials: monos,
        structure_constants: sc,
        unit: 0,
    })
}

/// `R_F(SL_2(Z))`, rank 8.
pub const SL2Z_PRESENTATION: &str = "ring Z[w] / w^8 + w^6 - w^2 - 1 = 0";

/// The rank-5 presentation for the 2-local ring of SL_3(Z).
pub const SL3Z_PRESENTATION: &str = "ring Z[a1,a2,b1,b2] / \
    a1^2 = a2^2 = 1; a1*b1 = b1; b1^2 = 2(1 + a1); b2^2 = 2(1 + a2); \
    a2*b2 = b2; a1*a2 = a1 + a2 - 1; a1*b2 = 2*a1 + b2 - 2; \
    b1*b2 = 2*b1 + 2*b2 - 4; a2*b1 = 2*a2 + b1 - 2";

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(v: &[i64]) -> Vec<Z> {
        v.iter().map(|&x| Z::from(x)).collect()
    }

    #[test]
    fn parses_univariate() {
        let p = parse_presentation(SL2Z_PRESENTATION).unwrap();
        assert_eq!(p.kind, PresentationKind::UnivariateQuotient { degree: 8 });
        assert_eq!(p.relation_strings(), vec!["w^8 + w^6 - w^2 - 1 = 0"]);
    }

    #[test]
    fn parses_linear_closed() {
        let p = parse_presentation(SL3Z_PRESENTATION).unwrap();
        assert_eq!(p.kind, PresentationKind::LinearClosed);
        // the chained a1^2 = a2^2 = 1 gives two relations
        assert_eq!(p.relations.len(), 10);
        let q = parse_presentation("ring Z[α₁] / α₁^2 = 1").unwrap();
        assert_eq!(q.generators, vec!["α₁"]);
    }

    #[test]
    fn rejects() {
        let e = parse_presentation("ring Z[x] / x^2 = x^3").unwrap_err();
        assert_eq!(e.code(), "ring-presentations/unclassifiable-kind");
        let e = parse_presentation("ring Z[x] / x^2 = y").unwrap_err();
        assert!(matches!(e, PresentationError::Syntax { pos: 18, .. }), "{e:?}");
        let e = parse_presentation("ring Z[x] / x^2 + = 1").unwrap_err();
        assert!(matches!(e, PresentationError::Syntax { pos: 18, .. }), "{e:?}");
        let e = parse_presentation("ring Q[x] / x = 1").unwrap_err();
        assert!(matches!(e, PresentationError::Syntax { pos: 5, .. }), "{e:?}");
        assert!(parse_presentation("ring Z[x,y] / x^2 = 1; y^2 = 1").is_err());
        let e = parse_presentation("ring Z[x] / x^2 = 1; x^2 = x").unwrap();
        assert!(matches!(
            build_model(&e),
            Err(PresentationError::InconsistentRule { .. })
        ));
    }

    #[test]
    fn implicit_products() {
        let p = parse_presentation("ring Z[x] / x^2 = 2(1 + x) - 3x").unwrap();
        let m = build_model(&p).unwrap();
        assert_eq!(m.structure_constants[1][1], z(&[2, -1]));
    }

    #[test]
    fn sl2z_model() {
        let p = parse_presentation(SL2Z_PRESENTATION).unwrap();
        let m = build_model(&p).unwrap();
        assert_eq!(m.rank(), 8);
        assert_eq!(m.basis_labels[3], "w^3");
        assert_eq!(m.charpoly(&m.basis_vector(1)), z(&[-1, 0, -1, 0, 0, 0, 1, 0, 1]));
    }

    #[test]
    fn sl3z_model() {
        let p = parse_presentation(SL3Z_PRESENTATION).unwrap();
        let m = build_model(&p).unwrap();
        assert_eq!(m.rank(), 5);
        let [_, a1, a2, b1, _] = [0, 1, 2, 3, 4].map(|i| m.basis_vector(i));
        let lhs = m.mul(&m.mul(&a1, &a2), &b1);
        let rhs = m.mul(&a1, &m.mul(&a2, &b1));
        // 2 a2 + b1 - 2
        assert_eq!(lhs, z(&[-2, 0, 2, 1, 0]));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn associativity_failure_has_witness() {
        // x^2 = x and y^2 = y with x y = 1 is not associative: (x x) y = 1, x (x y) = x
        let p = parse_presentation("ring Z[x,y] / x^2 = x; y^2 = y; x*y = 1").unwrap();
        match build_model(&p) {
            Err(PresentationError::Associativity(t)) => assert!(t.contains(&"x".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_model() {
        let m = build_model(&parse_presentation("ring Z[x] / x^2 - 1 = 0").unwrap()).unwrap();
        assert_eq!(m.rank(), 2);
        let x = m.basis_vector(1);
        assert_eq!(m.mul(&x, &x), m.basis_vector(0));
    }

    proptest! {
        #[test]
        fn univariate_charpoly_is_defining(coeffs in proptest::collection::vec(-4i64..5, 2..6)) {
            let d = coeffs.len();
            let mut text = format!("ring Z[t] / t^{d}");
            for (i, c) in coeffs.iter().enumerate() {
                text.push_str(&format!(" + ({c}) t^{i}"));
            }
            text.push_str(" = 0");
            let p = parse_presentation(&text).unwrap();
            let m = build_model(&p).unwrap();
            prop_assert!(m.verify().is_ok());
            let mut expect = z(&coeffs);
            expect.push(Z::one());
            prop_assert_eq!(m.charpoly(&m.basis_vector(1)), expect);
        }
    }
}
