//! The reduced representation ring of an amalgam as an integer lattice of
//! character vectors on its torsion classes.
//!
//! A representation of `G1 *_H G2` restricts to a pair of factor
//! representations that agree on `H`; conversely any such pair can be
//! conjugated to agree on `H` and so glues to a representation of the
//! amalgam. The ring is therefore the image of the pullback
//! `R(G1) ×_{R(H)} R(G2)` under evaluation on the fused torsion classes.
//!
//! Lattices are stored through flattened coordinates: a character vector over
//! `Q(ζ_m)^n` becomes a rational vector of length `n·φ(m)`, scaled by one
//! global denominator and put in Hermite normal form.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amalgam::{check_prime, is_p_power, torsion_classes, Amalgam, AmalgamError, Side, TorsionClassSet};
use crate::characters::{
    character_table, combination, restrict, restriction_matrix, CharacterError, CharacterTable,
    ClassFunction,
};
use crate::cyclotomic::{phi, Cyclotomic};
use crate::group::Elt;
use crate::linalg::{clear_denominators, echelon_coords, hnf, left_kernel};
use crate::rational::{serde_q_mat, serde_z, serde_z_vec, Q, Z};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepRingError {
    #[error("lattice has rank {got}, expected {expected}")]
    RankDeficient { expected: usize, got: usize },
    #[error("product of basis elements {i} and {j} is not in the lattice")]
    NotClosed { i: usize, j: usize },
    #[error("character pair disagrees on edge class {witness}: {left} vs {right}")]
    IncompatiblePair {
        witness: String,
        left: String,
        right: String,
    },
    #[error("character vector is not well defined on fused class {0}")]
    IllDefined(String),
    #[error("vector is not in the rational span of the lattice")]
    NotInSpan,
    #[error("coordinate vector has length {got}, expected {expected}")]
    BadCoordinates { expected: usize, got: usize },
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
}

impl RepRingError {
    pub fn code(&self) -> &'static str {
        match self {
            RepRingError::RankDeficient { .. } => "rep-ring/rank-deficient",
            RepRingError::NotClosed { .. } => "rep-ring/not-closed",
            RepRingError::IncompatiblePair { .. } => "rep-ring/incompatible-pair",
            RepRingError::IllDefined(_) => "rep-ring/ill-defined",
            RepRingError::NotInSpan => "rep-ring/not-in-span",
            RepRingError::BadCoordinates { .. } => "rep-ring/bad-coordinates",
            RepRingError::Character(e) => e.code(),
            RepRingError::Amalgam(e) => e.code(),
        }
    }

    /// Whether the failure refutes a mathematical claim rather than rejecting input.
    pub fn is_math_failure(&self) -> bool {
        matches!(
            self,
            RepRingError::RankDeficient { .. }
                | RepRingError::NotClosed { .. }
                | RepRingError::IllDefined(_)
        )
    }
}

/// Character tables of the three groups of an amalgam, with the restriction
/// matrices of both factors to the edge group.
#[derive(Debug, Clone)]
pub struct AmalgamTables {
    pub left: CharacterTable,
    pub right: CharacterTable,
    pub edge: CharacterTable,
    pub res_left: Vec<Vec<Z>>,
    pub res_right: Vec<Vec<Z>>,
}

impl AmalgamTables {
    pub fn new(a: &Amalgam) -> Result<Self, CharacterError> {
        let left = character_table(&a.left)?;
        let right = character_table(&a.right)?;
        let edge = character_table(&a.edge)?;
        let res_left = restriction_matrix(&left, &edge, &a.embed_left)?;
        let res_right = restriction_matrix(&right, &edge, &a.embed_right)?;
        Ok(AmalgamTables {
            left,
            right,
            edge,
            res_left,
            res_right,
        })
    }

    pub fn table(&self, side: Side) -> &CharacterTable {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn conductor(&self) -> usize {
        self.left.conductor.lcm(&self.right.conductor)
    }
}

/// Compatible pairs `(x, y) ∈ R(G1) ⊕ R(G2)` with `res(x) = res(y)`, in
/// irreducible-character coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackLattice {
    #[serde(with = "crate::rational::serde_z_mat")]
    pub basis: Vec<Vec<Z>>,
    pub rank: usize,
    pub left_len: usize,
    pub right_len: usize,
}

impl PullbackLattice {
    pub fn split<'a>(&self, v: &'a [Z]) -> (&'a [Z], &'a [Z]) {
        v.split_at(self.left_len)
    }
}

pub fn pullback_lattice(t: &AmalgamTables) -> PullbackLattice {
    let k_h = t.edge.len();
    let rows: Vec<Vec<Z>> = t
        .res_left
        .iter()
        .cloned()
        .chain(t.res_right.iter().map(|r| r.iter().map(|x| -x).collect()))
        .collect();
    let basis = left_kernel(&rows, k_h);
    PullbackLattice {
        rank: basis.len(),
        basis,
        left_len: t.left.len(),
        right_len: t.right.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    /// Index into the amalgam's torsion class list.
    pub fused: usize,
    pub rep_side: Side,
    pub rep_elt: Elt,
    pub rep: String,
    pub order: usize,
}

/// The ring as a lattice with integral structure constants.
#[derive(Debug, Clone)]
pub struct RFRing {
    pub columns: Vec<Column>,
    pub conductor: usize,
    pub prime: Option<u64>,
    /// Basis elements as character vectors on the columns.
    pub basis_chars: Vec<Vec<Cyclotomic>>,
    /// Flattened basis rows: `n` rows of length `columns · φ(conductor)`.
    pub basis: Vec<Vec<Q>>,
    /// Integer HNF rows; `basis = basis_int / scale`.
    pub basis_int: Vec<Vec<Z>>,
    pub scale: Z,
    pub unit: Vec<Z>,
    /// `b_i b_j = Σ_k structure_constants[i][j][k] b_k`.
    pub structure_constants: Vec<Vec<Vec<Z>>>,
}

/// Coordinates of a character vector with respect to a lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(Vec<Z>),
    /// In the rational span but with these non-integral coordinates.
    NonMember(Vec<Q>),
}

impl RFRing {
    /// Builds the lattice spanned by `generators` (character vectors on
    /// `columns`) and its ring structure; fails unless the rank is `expected`.
    pub fn from_generators(
        columns: Vec<Column>,
        conductor: usize,
        prime: Option<u64>,
        generators: &[Vec<Cyclotomic>],
        expected: usize,
    ) -> Result<Self, RepRingError> {
        let flat: Vec<Vec<Q>> = generators
            .iter()
            .map(|v| flatten(v, conductor))
            .collect();
        let width = columns.len() * phi(conductor);
        let (ints, scale) = clear_denominators(&flat);
        let basis_int = hnf(&ints, width);
        if basis_int.len() != expected {
            return Err(RepRingError::RankDeficient {
                expected,
                got: basis_int.len(),
            });
        }
        Self::from_basis(columns, conductor, prime, basis_int, scale)
    }

    fn from_basis(
        columns: Vec<Column>,
        conductor: usize,
        prime: Option<u64>,
        basis_int: Vec<Vec<Z>>,
        scale: Z,
    ) -> Result<Self, RepRingError> {
        let sq = Q::from_integer(scale.clone());
        let basis: Vec<Vec<Q>> = basis_int
            .iter()
            .map(|r| r.iter().map(|x| Q::from_integer(x.clone()) / &sq).collect())
            .collect();
        let f = phi(conductor);
        let basis_chars: Vec<Vec<Cyclotomic>> = basis
            .iter()
            .map(|row| {
                row.chunks(f)
                    .map(|c| Cyclotomic::new(conductor, c.to_vec()).expect("chunk has length phi"))
                    .collect()
            })
            .collect();
        let mut ring = RFRing {
            columns,
            conductor,
            prime,
            basis_chars,
            basis,
            basis_int,
            scale,
            unit: vec![],
            structure_constants: vec![],
        };
        let ones = vec![Cyclotomic::one(); ring.columns.len()];
        ring.unit = match ring.coords(&ones)? {
            Membership::Member(c) => c,
            Membership::NonMember(_) => return Err(RepRingError::NotClosed { i: 0, j: 0 }),
        };
        let n = ring.rank();
        let mut sc = vec![vec![vec![]; n]; n];
        for i in 0..n {
            for j in i..n {
                let prod: Vec<Cyclotomic> = ring.basis_chars[i]
                    .iter()
                    .zip(&ring.basis_chars[j])
                    .map(|(a, b)| a * b)
                    .collect();
                let c = match ring.coords(&prod)? {
                    Membership::Member(c) => c,
                    Membership::NonMember(_) => return Err(RepRingError::NotClosed { i, j }),
                };
                sc[j][i] = c.clone();
                sc[i][j] = c;
            }
        }
        ring.structure_constants = sc;
        Ok(ring)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Lattice coordinates of a character vector on the columns.
    pub fn coords(&self, v: &[Cyclotomic]) -> Result<Membership, RepRingError> {
        let flat = flatten(v, self.conductor.lcm(&max_conductor(v)));
        // values outside Q(ζ_m) cannot lie in the span
        if flat.len() != self.columns.len() * phi(self.conductor) {
            return Err(RepRingError::NotInSpan);
        }
        let c = echelon_coords(&self.basis, &flat).ok_or(RepRingError::NotInSpan)?;
        Ok(if c.iter().all(Q::is_integer) {
            Membership::Member(c.iter().map(Q::to_integer).collect())
        } else {
            Membership::NonMember(c)
        })
    }

    /// Character vector of the element with the given coordinates.
    pub fn evaluate(&self, coords: &[Z]) -> Vec<Cyclotomic> {
        let mut out = vec![Cyclotomic::zero(); self.columns.len()];
        for (c, row) in coords.iter().zip(&self.basis_chars) {
            if c.is_zero() {
                continue;
            }
            let s = Q::from_integer(c.clone());
            for (o, x) in out.iter_mut().zip(row) {
                *o = &*o + &x.scale(&s);
            }
        }
        out
    }

    /// Product through the structure constants.
    pub fn mul(&self, a: &[Z], b: &[Z]) -> Vec<Z> {
        let n = self.rank();
        let mut out = vec![Z::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for (o, c) in out.iter_mut().zip(&self.structure_constants[i][j]) {
                    if !c.is_zero() {
                        *o += &ab * c;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[Z], k: u32) -> Vec<Z> {
        let mut acc = self.unit.clone();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Z> {
        (0..self.rank())
            .map(|j| if i == j { Z::one() } else { Z::zero() })
            .collect()
    }

    /// Symmetry, associativity and the unit law of the structure constants.
    pub fn check_structure(&self) -> Result<(), String> {
        let n = self.rank();
        for i in 0..n {
            for j in 0..n {
                if self.structure_constants[i][j] != self.structure_constants[j][i] {
                    return Err(format!("not symmetric at ({i},{j})"));
                }
            }
        }
        for i in 0..n {
            let bi = self.basis_vector(i);
            if self.mul(&self.unit, &bi) != bi {
                return Err(format!("unit fails on b_{i}"));
            }
            for j in 0..n {
                let bij = self.mul(&bi, &self.basis_vector(j));
                for k in 0..n {
                    let bk = self.basis_vector(k);
                    let lhs = self.mul(&bij, &bk);
                    let rhs = self.mul(&bi, &self.mul(&self.basis_vector(j), &bk));
                    if lhs != rhs {
                        return Err(format!("associativity fails at ({i},{j},{k})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether permuting columns (`v'[c] = v[perm[c]]`) maps the lattice onto itself.
    pub fn is_stable_under_columns(&self, perm: &[usize]) -> bool {
        self.is_stable_under(|v| perm.iter().map(|&p| v[p].clone()).collect())
    }

    /// Whether complex conjugation maps the lattice onto itself.
    pub fn is_conjugation_stable(&self) -> bool {
        self.is_stable_under(|v| v.iter().map(Cyclotomic::conj).collect())
    }

    fn is_stable_under(&self, f: impl Fn(&[Cyclotomic]) -> Vec<Cyclotomic>) -> bool {
        let mut images = vec![];
        for b in &self.basis_chars {
            match self.coords(&f(b)) {
                Ok(Membership::Member(c)) => images.push(c),
                _ => return false,
            }
        }
        crate::linalg::det(&images).abs().is_one()
    }

    /// Column permutation of the power map `γ ↦ γ^k`.
    pub fn adams_permutation(&self, a: &Amalgam, t: &TorsionClassSet, k: i64) -> Vec<usize> {
        self.columns
            .iter()
            .map(|col| {
                let g = a.factor(col.rep_side);
                let target = t.class_of_element(a, col.rep_side, g.pow(col.rep_elt, k));
                self.columns
                    .iter()
                    .position(|c| c.fused == target)
                    .expect("power map preserves the column set")
            })
            .collect()
    }

    /// Restricts to a subset of columns, keeping the image lattice (no
    /// saturation).
    pub fn project(&self, keep: &[usize], prime: Option<u64>) -> Result<RFRing, RepRingError> {
        let columns: Vec<Column> = keep.iter().map(|&i| self.columns[i].clone()).collect();
        let gens: Vec<Vec<Cyclotomic>> = self
            .basis_chars
            .iter()
            .map(|row| keep.iter().map(|&i| row[i].clone()).collect())
            .collect();
        let got = {
            let flat: Vec<Vec<Q>> = gens.iter().map(|v| flatten(v, self.conductor)).collect();
            crate::linalg::rank_q(&flat)
        };
        RFRing::from_generators(columns, self.conductor, prime, &gens, got)
    }

    pub fn to_json(&self) -> RFRingJson {
        let mut triples = vec![];
        for (i, plane) in self.structure_constants.iter().enumerate() {
            for (j, row) in plane.iter().enumerate() {
                for (k, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        triples.push(StructureTriple {
                            i,
                            j,
                            k,
                            c: c.to_string(),
                        });
                    }
                }
            }
        }
        RFRingJson {
            rank: self.rank(),
            prime: self.prime,
            conductor: self.conductor,
            columns: self.columns.clone(),
            scale: self.scale.clone(),
            basis: self.basis.clone(),
            unit: self.unit.clone(),
            structure_constants: triples,
        }
    }
}

fn max_conductor(v: &[Cyclotomic]) -> usize {
    v.iter().map(Cyclotomic::conductor).fold(1, |a, b| a.lcm(&b))
}

fn flatten(v: &[Cyclotomic], m: usize) -> Vec<Q> {
    v.iter().flat_map(|x| x.flatten(m)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureTriple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RFRingJson {
    pub rank: usize,
    pub prime: Option<u64>,
    pub conductor: usize,
    pub columns: Vec<Column>,
    #[serde(with = "serde_z")]
    pub scale: Z,
    #[serde(with = "serde_q_mat")]
    pub basis: Vec<Vec<Q>>,
    #[serde(with = "serde_z_vec")]
    pub unit: Vec<Z>,
    pub structure_constants: Vec<StructureTriple>,
}

/// Everything computed for one amalgam.
#[derive(Debug, Clone)]
pub struct AmalgamRing {
    pub amalgam: Amalgam,
    pub tables: AmalgamTables,
    pub classes: TorsionClassSet,
    pub pullback: PullbackLattice,
    pub ring: RFRing,
}

fn columns_of(a: &Amalgam, t: &TorsionClassSet, keep: impl Fn(usize) -> bool) -> Vec<Column> {
    t.classes
        .iter()
        .enumerate()
        .filter(|(_, c)| keep(c.order))
        .map(|(i, c)| Column {
            fused: i,
            rep_side: c.rep.0,
            rep_elt: c.rep.1,
            rep: a.label(c.rep.0, c.rep.1),
            order: c.order,
        })
        .collect()
}

/// Character vector of a compatible pair on the fused classes.
fn glue(
    t: &TorsionClassSet,
    columns: &[Column],
    left: &ClassFunction,
    right: &ClassFunction,
) -> Result<Vec<Cyclotomic>, RepRingError> {
    columns
        .iter()
        .map(|col| {
            let fc = &t.classes[col.fused];
            let value = |&(s, c): &(Side, usize)| match s {
                Side::Left => &left.values[c],
                Side::Right => &right.values[c],
            };
            let v = value(&fc.members[0]);
            if fc.members.iter().any(|m| value(m) != v) {
                return Err(RepRingError::IllDefined(col.rep.clone()));
            }
            Ok(v.clone())
        })
        .collect()
}

fn pullback_vectors(
    tables: &AmalgamTables,
    t: &TorsionClassSet,
    pb: &PullbackLattice,
    columns: &[Column],
) -> Result<Vec<Vec<Cyclotomic>>, RepRingError> {
    pb.basis
        .iter()
        .map(|v| {
            let (x, y) = pb.split(v);
            glue(t, columns, &combination(&tables.left, x), &combination(&tables.right, y))
        })
        .collect()
}

/// `R_F` of an amalgam, with all intermediate data.
pub fn compute(a: &Amalgam) -> Result<AmalgamRing, RepRingError> {
    let tables = AmalgamTables::new(a)?;
    let classes = torsion_classes(a);
    let pullback = pullback_lattice(&tables);
    let columns = columns_of(a, &classes, |_| true);
    let gens = pullback_vectors(&tables, &classes, &pullback, &columns)?;
    let ring = RFRing::from_generators(columns, tables.conductor(), None, &gens, classes.len())?;
    Ok(AmalgamRing {
        amalgam: a.clone(),
        tables,
        classes,
        pullback,
        ring,
    })
}

pub fn rf_ring(a: &Amalgam) -> Result<RFRing, RepRingError> {
    Ok(compute(a)?.ring)
}

impl AmalgamRing {
    /// `R_{F(p)}`: evaluation of the pullback on the p-power torsion classes.
    pub fn p_local(&self, p: u64) -> Result<RFRing, RepRingError> {
        check_prime(p)?;
        let columns = columns_of(&self.amalgam, &self.classes, |o| is_p_power(o, p, true));
        let expected = columns.len();
        let gens = pullback_vectors(&self.tables, &self.classes, &self.pullback, &columns)?;
        RFRing::from_generators(columns, self.ring.conductor, Some(p), &gens, expected)
    }

    /// The same ring obtained by projecting the full ring's basis.
    pub fn p_local_by_projection(&self, p: u64) -> Result<RFRing, RepRingError> {
        check_prime(p)?;
        let keep: Vec<usize> = (0..self.ring.columns.len())
            .filter(|&i| is_p_power(self.ring.columns[i].order, p, true))
            .collect();
        self.ring.project(&keep, Some(p))
    }

    /// Evaluates a pair of factor class functions on the torsion classes.
    pub fn element_eval(
        &self,
        left: &ClassFunction,
        right: &ClassFunction,
    ) -> Result<(Vec<Cyclotomic>, Membership), RepRingError> {
        element_eval(&self.amalgam, &self.classes, &self.ring, left, right)
    }

    /// The pair of irreducible characters `(left row i, right row j)`.
    pub fn pair(&self, i: usize, j: usize) -> (ClassFunction, ClassFunction) {
        (self.tables.left.character(i), self.tables.right.character(j))
    }

    /// Powers `k` coprime to every torsion order, up to the exponent.
    pub fn adams_exponents(&self) -> Vec<i64> {
        let m = self.ring.conductor as i64;
        (1..=m.max(2)).filter(|k| k.gcd(&m) == 1).collect()
    }
}

pub fn element_eval(
    a: &Amalgam,
    t: &TorsionClassSet,
    ring: &RFRing,
    left: &ClassFunction,
    right: &ClassFunction,
) -> Result<(Vec<Cyclotomic>, Membership), RepRingError> {
    let rl = restrict(left, &a.embed_left)?;
    let rr = restrict(right, &a.embed_right)?;
    for (c, (x, y)) in rl.values.iter().zip(&rr.values).enumerate() {
        if x != y {
            let h = a.edge.classes().reps[c];
            return Err(RepRingError::IncompatiblePair {
                witness: a.edge.label(h).to_string(),
                left: x.to_string(),
                right: y.to_string(),
            });
        }
    }
    let values = glue(t, &ring.columns, left, right)?;
    let m = ring.coords(&values)?;
    Ok((values, m))
}
