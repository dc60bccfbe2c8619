//! Irreducible character tables of finite groups.
//!
//! The table is found from the class algebra: the central characters
//! `ω_χ(C) = |C| χ(g_C) / χ(1)` are the common eigenvectors of the class
//! multiplication matrices. The eigenspaces are split over a prime field
//! `F_p` with `p ≡ 1 (mod exp G)` and `p > 2 sqrt|G|`, where every character
//! value has an image. Each value is then lifted back exactly: restricted to
//! the cyclic subgroup `<g>` a character is a sum of roots of unity whose
//! multiplicities lie in `[0, χ(1)]`, so they are recovered from their residues.

use std::cmp::Reverse;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{Cyclotomic, CyclotomicError};
use crate::group::{ConjClassTable, FiniteGroup, GroupHom};
use crate::modp::{inv_mod, is_prime, nullspace, pow_mod, primitive_root, rref};
use crate::rational::{q, to_integer, Q, Z};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharacterError {
    #[error("class functions live on different class tables")]
    TableMismatch,
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
    #[error("character table computation failed: {0}")]
    Internal(String),
    #[error("multiplicity {0} is not an integer")]
    NonIntegralMultiplicity(String),
}

impl CharacterError {
    pub fn code(&self) -> &'static str {
        match self {
            CharacterError::TableMismatch => "characters/table-mismatch",
            CharacterError::Cyclotomic(e) => e.code(),
            CharacterError::Internal(_) => "characters/internal",
            CharacterError::NonIntegralMultiplicity(_) => "characters/non-integral-multiplicity",
        }
    }
}

/// A function on the conjugacy classes of a group.
#[derive(Debug, Clone)]
pub struct ClassFunction {
    pub classes: Arc<ConjClassTable>,
    pub values: Vec<Cyclotomic>,
}

impl ClassFunction {
    pub fn new(classes: Arc<ConjClassTable>, values: Vec<Cyclotomic>) -> Self {
        assert_eq!(classes.len(), values.len());
        ClassFunction { classes, values }
    }

    pub fn trivial(classes: Arc<ConjClassTable>) -> Self {
        let values = vec![Cyclotomic::one(); classes.len()];
        ClassFunction { classes, values }
    }

    /// Character of the regular representation.
    pub fn regular(classes: Arc<ConjClassTable>) -> Self {
        let mut values = vec![Cyclotomic::zero(); classes.len()];
        values[0] = Cyclotomic::from_int(classes.group_order as i64);
        ClassFunction { classes, values }
    }

    pub fn degree(&self) -> &Cyclotomic {
        &self.values[0]
    }

    fn same_table(&self, other: &Self) -> Result<(), CharacterError> {
        if Arc::ptr_eq(&self.classes, &other.classes) || self.classes == other.classes {
            Ok(())
        } else {
            Err(CharacterError::TableMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CharacterError> {
        self.same_table(other)?;
        Ok(ClassFunction {
            classes: self.classes.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, CharacterError> {
        self.same_table(other)?;
        Ok(ClassFunction {
            classes: self.classes.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, s: &Q) -> Self {
        ClassFunction {
            classes: self.classes.clone(),
            values: self.values.iter().map(|v| v.scale(s)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        ClassFunction {
            classes: self.classes.clone(),
            values: self.values.iter().map(Cyclotomic::conj).collect(),
        }
    }
}

/// `(1/|G|) Σ |C| χ(C) conj(ψ(C))`.
pub fn inner_product(chi: &ClassFunction, psi: &ClassFunction) -> Result<Q, CharacterError> {
    chi.same_table(psi)?;
    let t = &chi.classes;
    let total: Cyclotomic = chi
        .values
        .iter()
        .zip(&psi.values)
        .zip(&t.sizes)
        .map(|((a, b), &s)| (a * &b.conj()).scale(&q(s as i64)))
        .sum();
    Ok(total.to_rational()? / q(t.group_order as i64))
}

/// Value of `chi` at each class of `f.source`, read through `f`.
pub fn restrict(chi: &ClassFunction, f: &GroupHom) -> Result<ClassFunction, CharacterError> {
    let tgt = f.target.classes();
    if !(Arc::ptr_eq(tgt, &chi.classes) || **tgt == *chi.classes) {
        return Err(CharacterError::TableMismatch);
    }
    let src = f.source.classes().clone();
    let values = src
        .reps
        .iter()
        .map(|&h| chi.values[tgt.class_of[f.apply(h)]].clone())
        .collect();
    Ok(ClassFunction {
        classes: src,
        values,
    })
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub group: Arc<FiniteGroup>,
    pub classes: Arc<ConjClassTable>,
    /// Rows are irreducible characters, columns are classes.
    pub irreducibles: Vec<Vec<Cyclotomic>>,
    pub degrees: Vec<u64>,
    pub conductor: usize,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.irreducibles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreducibles.is_empty()
    }

    pub fn character(&self, i: usize) -> ClassFunction {
        ClassFunction {
            classes: self.classes.clone(),
            values: self.irreducibles[i].clone(),
        }
    }

    pub fn characters(&self) -> impl Iterator<Item = ClassFunction> + '_ {
        (0..self.len()).map(|i| self.character(i))
    }

    /// Multiplicities of the irreducibles in `chi`.
    pub fn decompose(&self, chi: &ClassFunction) -> Result<Vec<Q>, CharacterError> {
        self.characters().map(|x| inner_product(chi, &x)).collect()
    }

    /// Integer multiplicities; errors if `chi` is not a virtual character.
    pub fn decompose_integral(&self, chi: &ClassFunction) -> Result<Vec<Z>, CharacterError> {
        self.decompose(chi)?
            .iter()
            .map(|m| {
                to_integer(m).ok_or_else(|| CharacterError::NonIntegralMultiplicity(m.to_string()))
            })
            .collect()
    }

    /// Indices of the linear characters.
    pub fn degree_one(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == 1).collect()
    }

    pub fn to_json(&self) -> CharacterTableJson {
        CharacterTableJson {
            order: self.group.order(),
            conductor: self.conductor,
            classes: (0..self.classes.len())
                .map(|c| ClassMeta {
                    rep: self.group.label(self.classes.reps[c]).to_string(),
                    size: self.classes.sizes[c],
                    order: self.classes.elt_order[c],
                })
                .collect(),
            degrees: self.degrees.clone(),
            irreducibles: self
                .irreducibles
                .iter()
                .map(|row| row.iter().map(|v| v.lift(self.conductor)).collect())
                .collect(),
        }
    }
}

/// Matrix whose row `i` gives the decomposition of the restriction of
/// irreducible `i` of `big` into irreducibles of `small`, along `f`.
pub fn restriction_matrix(
    big: &CharacterTable,
    small: &CharacterTable,
    f: &GroupHom,
) -> Result<Vec<Vec<Z>>, CharacterError> {
    big.characters()
        .map(|chi| small.decompose_integral(&restrict(&chi, f)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMeta {
    pub rep: String,
    pub size: usize,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterTableJson {
    pub order: usize,
    pub conductor: usize,
    pub classes: Vec<ClassMeta>,
    pub degrees: Vec<u64>,
    pub irreducibles: Vec<Vec<Cyclotomic>>,
}

/// Smallest prime `p ≡ 1 (mod e)` with `p² > 4n`.
fn dixon_prime(e: usize, n: usize) -> u64 {
    let (e, n) = (e as u64, n as u64);
    let mut p = e + 1;
    loop {
        if is_prime(p) && p * p > 4 * n {
            return p;
        }
        p += e;
    }
}

struct ClassAlgebra<'a> {
    g: &'a FiniteGroup,
    t: &'a ConjClassTable,
    p: u64,
}

impl ClassAlgebra<'_> {
    /// `A_j[k][l] = #{x ∈ C_j : x⁻¹ z_l ∈ C_k}`, so that
    /// `ω_j ω_k = Σ_l A_j[k][l] ω_l`.
    fn matrix(&self, j: usize) -> Vec<Vec<u64>> {
        let r = self.t.len();
        let mut a = vec![vec![0u64; r]; r];
        for (l, &z) in self.t.reps.iter().enumerate() {
            for &x in &self.t.classes[j] {
                let k = self.t.class_of[self.g.mul(self.g.inv(x), z)];
                a[k][l] += 1;
            }
        }
        for row in a.iter_mut() {
            for x in row.iter_mut() {
                *x %= self.p;
            }
        }
        a
    }
}

/// Splits a subspace (RREF rows, with pivots) into eigenspaces of `a`.
fn split_space(
    basis: &[Vec<u64>],
    pivots: &[usize],
    a: &[Vec<u64>],
    p: u64,
) -> Result<Vec<Vec<Vec<u64>>>, CharacterError> {
    let k = basis.len();
    let r = a.len();
    // b[i][i'] = coordinate of A v_i along v_i'
    let b: Vec<Vec<u64>> = basis
        .iter()
        .map(|v| {
            let w: Vec<u64> = (0..r)
                .map(|row| a[row].iter().zip(v).map(|(x, y)| x * y % p).sum::<u64>() % p)
                .collect();
            pivots.iter().map(|&pc| w[pc]).collect()
        })
        .collect();
    let mut out = vec![];
    let mut found = 0;
    for lambda in 0..p {
        // left eigenvectors: c (B - λ) = 0  <=>  (B - λ)^T c = 0
        let bt: Vec<Vec<u64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let x = b[j][i];
                        if i == j {
                            (x + p - lambda) % p
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        let ns = nullspace(&bt, p);
        if ns.is_empty() {
            continue;
        }
        found += ns.len();
        let space: Vec<Vec<u64>> = ns
            .iter()
            .map(|c| {
                (0..r)
                    .map(|col| {
                        c.iter()
                            .zip(basis)
                            .map(|(ci, v)| ci * v[col] % p)
                            .sum::<u64>()
                            % p
                    })
                    .collect()
            })
            .collect();
        out.push(space);
        if found == k {
            break;
        }
    }
    if found != k {
        return Err(CharacterError::Internal(format!(
            "class matrix not diagonalizable mod {p}"
        )));
    }
    Ok(out)
}

/// Computes the exact irreducible character table.
///
/// Rows are ordered by degree, then the trivial character first, then by
/// flattened coefficient vectors (at the group exponent) in descending
/// lexicographic order.
pub fn character_table(g: &Arc<FiniteGroup>) -> Result<CharacterTable, CharacterError> {
    let t = g.classes().clone();
    let n = g.order();
    let r = t.len();
    let e = t.exponent;
    let p = dixon_prime(e, n);
    let alg = ClassAlgebra { g, t: &t, p };

    let identity: Vec<Vec<u64>> = (0..r)
        .map(|i| (0..r).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut spaces = vec![identity];
    for j in 1..r {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let a = alg.matrix(j);
        let mut next = vec![];
        for mut s in spaces {
            if s.len() == 1 {
                next.push(s);
                continue;
            }
            let piv = rref(&mut s, p);
            for mut sub in split_space(&s, &piv, &a, p)? {
                rref(&mut sub, p);
                next.push(sub);
            }
        }
        spaces = next;
    }
    if spaces.len() != r {
        return Err(CharacterError::Internal(format!(
            "found {} simultaneous eigenvectors, expected {r}",
            spaces.len()
        )));
    }

    let sizes: Vec<u64> = t.sizes.iter().map(|&s| s as u64 % p).collect();
    let isqrt = (1..=n).take_while(|d| d * d <= n).last().unwrap_or(1) as u64;
    let root = pow_mod(primitive_root(p), (p - 1) / e as u64, p);

    let mut rows = Vec::with_capacity(r);
    for s in &spaces {
        let v = &s[0];
        if v[0] == 0 {
            return Err(CharacterError::Internal("eigenvector vanishes at identity".into()));
        }
        let norm = inv_mod(v[0], p);
        let omega: Vec<u64> = v.iter().map(|x| x * norm % p).collect();
        let sum = (0..r)
            .map(|l| omega[l] * omega[t.inverse_class(l)] % p * inv_mod(sizes[l], p) % p)
            .sum::<u64>()
            % p;
        let d2 = n as u64 % p * inv_mod(sum, p) % p;
        let d = (1..=isqrt)
            .find(|d| d * d % p == d2)
            .ok_or_else(|| CharacterError::Internal("no degree matches".into()))?;
        let chi_mod: Vec<u64> = (0..r)
            .map(|l| omega[l] * d % p * inv_mod(sizes[l], p) % p)
            .collect();
        let mut row = Vec::with_capacity(r);
        for l in 0..r {
            let o = t.elt_order[l];
            let step = e / o;
            let zo = pow_mod(root, step as u64, p);
            let inv_o = inv_mod(o as u64 % p, p);
            let mut value = Cyclotomic::zero();
            for jj in 0..o {
                let mut m = 0u64;
                for k in 0..o {
                    let ck = chi_mod[t.power(l, k as i64)];
                    let z = pow_mod(zo, ((o - jj) * k % o) as u64, p);
                    m = (m + ck * z) % p;
                }
                m = m * inv_o % p;
                if m > d {
                    return Err(CharacterError::Internal(format!(
                        "eigenvalue multiplicity {m} exceeds degree {d}"
                    )));
                }
                if m > 0 {
                    let z = Cyclotomic::root_of_unity(e, (jj * step) as i64);
                    value = &value + &z.scale(&q(m as i64));
                }
            }
            row.push(value.lift(e));
        }
        rows.push((d, row));
    }

    let deg_sq: u64 = rows.iter().map(|(d, _)| d * d).sum();
    if deg_sq != n as u64 {
        return Err(CharacterError::Internal(format!(
            "sum of squared degrees {deg_sq} != {n}"
        )));
    }

    let flat = |row: &Vec<Cyclotomic>| -> Vec<Q> { row.iter().flat_map(|v| v.flatten(e)).collect() };
    let is_trivial = |row: &Vec<Cyclotomic>| row.iter().all(|v| *v == Cyclotomic::one());
    rows.sort_by_cached_key(|(d, row)| (*d, !is_trivial(row), Reverse(flat(row))));

    Ok(CharacterTable {
        group: g.clone(),
        classes: t.clone(),
        degrees: rows.iter().map(|(d, _)| *d).collect(),
        irreducibles: rows.into_iter().map(|(_, row)| row).collect(),
        conductor: e,
    })
}

/// Checks both orthogonality relations and `Σ d² = |G|` exactly.
pub fn verify_table(t: &CharacterTable) -> Result<(), String> {
    let n = t.group.order();
    if t.degrees.iter().map(|d| d * d).sum::<u64>() != n as u64 {
        return Err("sum of squared degrees".into());
    }
    if t.len() != t.classes.len() {
        return Err("table is not square".into());
    }
    for i in 0..t.len() {
        for j in 0..t.len() {
            let ip = inner_product(&t.character(i), &t.character(j)).map_err(|e| e.to_string())?;
            let want = q(i64::from(i == j));
            if ip != want {
                return Err(format!("<chi_{i}, chi_{j}> = {ip}"));
            }
        }
    }
    // Σ_χ χ(a) conj(χ(b)) = δ_ab |C_G(a)|
    for a in 0..t.len() {
        for b in 0..t.len() {
            let s: Cyclotomic = t
                .irreducibles
                .iter()
                .map(|row| &row[a] * &row[b].conj())
                .sum();
            let want = if a == b {
                Cyclotomic::from_int((n / t.classes.sizes[a]) as i64)
            } else {
                Cyclotomic::zero()
            };
            if s != want {
                return Err(format!("column orthogonality fails at ({a}, {b})"));
            }
        }
    }
    for (i, row) in t.irreducibles.iter().enumerate() {
        if row[0] != Cyclotomic::from_int(t.degrees[i] as i64) {
            return Err(format!("degree mismatch in row {i}"));
        }
    }
    Ok(())
}

/// Whether `values` is a virtual character: integral multiplicities.
pub fn is_virtual_character(t: &CharacterTable, chi: &ClassFunction) -> bool {
    t.decompose(chi)
        .map(|ms| ms.iter().all(|m| m.is_integer()))
        .unwrap_or(false)
}

/// Zero class function helper.
pub fn zero_function(classes: Arc<ConjClassTable>) -> ClassFunction {
    let values = vec![Cyclotomic::zero(); classes.len()];
    ClassFunction { classes, values }
}

/// Integer combination of irreducibles.
pub fn combination(t: &CharacterTable, coeffs: &[Z]) -> ClassFunction {
    let mut values = vec![Cyclotomic::zero(); t.classes.len()];
    for (c, row) in coeffs.iter().zip(&t.irreducibles) {
        if c.is_zero() {
            continue;
        }
        let s = Q::from_integer(c.clone());
        for (v, x) in values.iter_mut().zip(row) {
            *v = &*v + &x.scale(&s);
        }
    }
    ClassFunction {
        classes: t.classes.clone(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::root_of_unity;
    use crate::group::{cyclic, direct_product, from_permutations, hom, DEFAULT_CAP};

    fn arc(g: FiniteGroup) -> Arc<FiniteGroup> {
        Arc::new(g)
    }

    fn s3() -> Arc<FiniteGroup> {
        arc(from_permutations(3, &[vec![vec![1, 2]], vec![vec![1, 2, 3]]], DEFAULT_CAP).unwrap())
    }

    fn ints(v: &[i64]) -> Vec<Cyclotomic> {
        v.iter().map(|&x| Cyclotomic::from_int(x)).collect()
    }

    #[test]
    fn c2_table() {
        let t = character_table(&arc(cyclic(2, DEFAULT_CAP).unwrap())).unwrap();
        assert_eq!(t.irreducibles, vec![ints(&[1, 1]), ints(&[1, -1])]);
    }

    #[test]
    fn c4_table_is_dual_group() {
        let t = character_table(&arc(cyclic(4, DEFAULT_CAP).unwrap())).unwrap();
        assert_eq!(t.len(), 4);
        let mut seen = vec![];
        for row in &t.irreducibles {
            // row is g^k -> ζ^(a k) for some a
            let a = (0..4)
                .find(|&a| (0..4).all(|k| row[k] == root_of_unity(4, a * k as i64)))
                .expect("row is a power character");
            seen.push(a);
        }
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2, 3]);
        assert_eq!(t.irreducibles[1][1], root_of_unity(4, 1));
    }

    /// Oracle: the natural permutation character minus the trivial one is
    /// the 2-dimensional irreducible of S3 (fixed points minus one).
    #[test]
    fn s3_table() {
        let g = s3();
        let t = character_table(&g).unwrap();
        assert_eq!(t.degrees, vec![1, 1, 2]);
        let cl = &t.classes;
        let fixed_minus_one: Vec<Cyclotomic> = cl
            .reps
            .iter()
            .map(|&r| {
                let label = g.label(r);
                let moved = label.chars().filter(char::is_ascii_digit).count() as i64;
                Cyclotomic::from_int(3 - moved - 1)
            })
            .collect();
        assert_eq!(t.irreducibles[2], fixed_minus_one);
        let cy = cl.elt_order.iter().position(|&o| o == 3).unwrap();
        let tr = cl.elt_order.iter().position(|&o| o == 2).unwrap();
        assert_eq!(t.irreducibles[2][tr], Cyclotomic::from_int(0));
        assert_eq!(t.irreducibles[2][cy], Cyclotomic::from_int(-1));
        let reg = ClassFunction::regular(cl.clone());
        assert_eq!(t.decompose(&reg).unwrap(), vec![q(1), q(1), q(2)]);
        verify_table(&t).unwrap();
    }

    #[test]
    fn restriction_examples() {
        let c2 = arc(cyclic(2, DEFAULT_CAP).unwrap());
        let c4 = arc(cyclic(4, DEFAULT_CAP).unwrap());
        let f = hom(c2.clone(), c4.clone(), &[2]).unwrap();
        let t4 = character_table(&c4).unwrap();
        let t2 = character_table(&c2).unwrap();
        let triv = restrict(&t4.character(0), &f).unwrap();
        assert_eq!(triv.values, ints(&[1, 1]));
        // g -> ζ4 restricts to the sign character
        let z = restrict(&t4.character(1), &f).unwrap();
        assert_eq!(z.values, ints(&[1, -1]));
        let reg = restrict(&ClassFunction::regular(c4.classes().clone()), &f).unwrap();
        let reg2 = ClassFunction::regular(c2.classes().clone()).scale(&q(2));
        assert_eq!(reg.values, reg2.values);
        let m = restriction_matrix(&t4, &t2, &f).unwrap();
        assert_eq!(m.len(), 4);
    }

    #[test]
    fn inner_products() {
        let g = s3();
        let t = character_table(&g).unwrap();
        for i in 0..3 {
            assert_eq!(inner_product(&t.character(i), &t.character(i)).unwrap(), q(1));
        }
        assert_eq!(inner_product(&t.character(0), &t.character(2)).unwrap(), q(0));
        let reg = ClassFunction::regular(t.classes.clone());
        let triv = ClassFunction::trivial(t.classes.clone());
        assert_eq!(inner_product(&reg, &triv).unwrap(), q(1));
        let c4 = arc(cyclic(4, DEFAULT_CAP).unwrap());
        let bad = ClassFunction::trivial(c4.classes().clone());
        assert_eq!(inner_product(&reg, &bad), Err(CharacterError::TableMismatch));
        // a non-character class function with irrational inner product
        let t4 = character_table(&c4).unwrap();
        let half = t4.character(1).scale(&Q::new(1.into(), 2.into()));
        let mixed = ClassFunction::new(
            c4.classes().clone(),
            vec![Cyclotomic::one(), Cyclotomic::zero(), Cyclotomic::zero(), Cyclotomic::zero()],
        );
        let ip = inner_product(&half, &mixed).unwrap();
        assert_eq!(ip, Q::new(1.into(), 8.into()));
    }

    #[test]
    fn product_group_tables() {
        let c2 = cyclic(2, DEFAULT_CAP).unwrap();
        let c3 = cyclic(3, DEFAULT_CAP).unwrap();
        let s = s3();
        for g in [
            arc(direct_product(&c2, &c2, DEFAULT_CAP).unwrap()),
            arc(direct_product(&c2, &c3, DEFAULT_CAP).unwrap()),
            arc(direct_product(&s, &c2, DEFAULT_CAP).unwrap()),
            arc(cyclic(12, DEFAULT_CAP).unwrap()),
        ] {
            let t = character_table(&g).unwrap();
            verify_table(&t).unwrap();
        }
    }
}
