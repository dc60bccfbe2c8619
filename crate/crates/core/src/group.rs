//! Finite groups materialized as full multiplication tables.
//!
//! Element id 0 is always the identity. Every constructor closes the group,
//! fills the table, and refuses to build anything larger than the configured
//! cap.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use thiserror::Error;

/// Default upper bound on group order.
pub const DEFAULT_CAP: usize = 2000;

pub type Elt = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order {order} exceeds the size cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("cyclic group order must be positive")]
    EmptyCyclic,
    #[error("generator {index} is not a permutation of 1..={degree}: {reason}")]
    BadPermutation {
        index: usize,
        degree: usize,
        reason: String,
    },
    #[error("not a homomorphism: image({a}*{b}) != image({a})*image({b})")]
    NotAHomomorphism { a: String, b: String },
    #[error("generator images do not determine the map: {reached} of {order} elements reached")]
    AmbiguousExtension { reached: usize, order: usize },
    #[error("no image given for source generator {0}")]
    MissingGeneratorImage(String),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
}

impl GroupError {
    pub fn code(&self) -> &'static str {
        match self {
            GroupError::CapExceeded { .. } => "group-core/cap-exceeded",
            GroupError::EmptyCyclic => "group-core/empty-cyclic",
            GroupError::BadPermutation { .. } => "group-core/bad-permutation",
            GroupError::NotAHomomorphism { .. } => "group-core/not-a-homomorphism",
            GroupError::AmbiguousExtension { .. } => "group-core/ambiguous-extension",
            GroupError::MissingGeneratorImage(_) => "group-core/missing-generator-image",
            GroupError::UnknownLabel(_) => "group-core/unknown-label",
        }
    }
}

/// A finite group given by its multiplication table.
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inv: Vec<Elt>,
    labels: Vec<String>,
    generators: Vec<Elt>,
    classes: OnceLock<Arc<ConjClassTable>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("generators", &self.generator_labels())
            .finish()
    }
}

impl FiniteGroup {
    /// Builds a group from a raw table. The table is checked for identity,
    /// inverses and associativity.
    pub fn from_table(
        order: usize,
        table: Vec<u32>,
        labels: Vec<String>,
        generators: Vec<Elt>,
        cap: usize,
    ) -> Result<Self, GroupError> {
        if order > cap {
            return Err(GroupError::CapExceeded { order, cap });
        }
        assert_eq!(table.len(), order * order, "table must be order x order");
        assert_eq!(labels.len(), order);
        let mut inv = vec![usize::MAX; order];
        for x in 0..order {
            for y in 0..order {
                if table[x * order + y] == 0 {
                    inv[x] = y;
                    break;
                }
            }
            assert!(inv[x] != usize::MAX, "element {x} has no inverse");
        }
        let g = FiniteGroup {
            order,
            table,
            inv,
            labels,
            generators,
            classes: OnceLock::new(),
        };
        debug_assert!(g.order > 64 || g.check_axioms().is_ok());
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Same multiplication table (identical element indexing).
    pub fn same_table(&self, other: &FiniteGroup) -> bool {
        std::ptr::eq(self, other) || (self.order == other.order && self.table == other.table)
    }

    pub fn identity(&self) -> Elt {
        0
    }

    #[inline]
    pub fn mul(&self, x: Elt, y: Elt) -> Elt {
        self.table[x * self.order + y] as Elt
    }

    #[inline]
    pub fn inv(&self, x: Elt) -> Elt {
        self.inv[x]
    }

    pub fn pow(&self, x: Elt, k: i64) -> Elt {
        let o = self.element_order(x) as i64;
        let k = k.rem_euclid(o);
        let mut acc = 0;
        for _ in 0..k {
            acc = self.mul(acc, x);
        }
        acc
    }

    pub fn conj(&self, g: Elt, x: Elt) -> Elt {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn elements(&self) -> std::ops::Range<Elt> {
        0..self.order
    }

    pub fn label(&self, x: Elt) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find_label(&self, label: &str) -> Result<Elt, GroupError> {
        let wanted: String = label.chars().filter(|c| !c.is_whitespace()).collect();
        self.labels
            .iter()
            .position(|l| *l == wanted)
            .ok_or_else(|| GroupError::UnknownLabel(label.to_string()))
    }

    pub fn generators(&self) -> &[Elt] {
        &self.generators
    }

    pub fn generator_labels(&self) -> Vec<&str> {
        self.generators.iter().map(|&g| self.label(g)).collect()
    }

    /// Least `k >= 1` with `x^k = 1`.
    pub fn element_order(&self, x: Elt) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.elements()
            .map(|x| self.element_order(x))
            .fold(1, |a, b| a.lcm(&b))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|&a| {
            self.generators
                .iter()
                .all(|&b| self.mul(a, b) == self.mul(b, a))
        })
    }

    /// Full associativity, identity and inverse check.
    pub fn check_axioms(&self) -> Result<(), String> {
        for x in self.elements() {
            if self.mul(0, x) != x || self.mul(x, 0) != x {
                return Err(format!("0 is not an identity at {x}"));
            }
            if self.mul(x, self.inv(x)) != 0 || self.mul(self.inv(x), x) != 0 {
                return Err(format!("bad inverse at {x}"));
            }
        }
        for x in self.elements() {
            for y in self.elements() {
                let xy = self.mul(x, y);
                for z in self.elements() {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return Err(format!("associativity fails at ({x},{y},{z})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Conjugacy classes, computed once and cached.
    pub fn classes(&self) -> &Arc<ConjClassTable> {
        self.classes
            .get_or_init(|| Arc::new(ConjClassTable::compute(self)))
    }
}

/// Cyclic group of order `n`, generator labeled `g`.
pub fn cyclic(n: usize, cap: usize) -> Result<FiniteGroup, GroupError> {
    if n == 0 {
        return Err(GroupError::EmptyCyclic);
    }
    if n > cap {
        return Err(GroupError::CapExceeded { order: n, cap });
    }
    let mut table = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            table.push(((i + j) % n) as u32);
        }
    }
    let labels = (0..n)
        .map(|i| match i {
            0 => "e".to_string(),
            1 => "g".to_string(),
            _ => format!("g^{i}"),
        })
        .collect();
    let generators = if n > 1 { vec![1] } else { vec![] };
    FiniteGroup::from_table(n, table, labels, generators, cap)
}

/// Direct product with lexicographic indexing `(a, b) -> a * |K| + b`.
pub fn direct_product(
    g: &FiniteGroup,
    k: &FiniteGroup,
    cap: usize,
) -> Result<FiniteGroup, GroupError> {
    let order = g.order() * k.order();
    if order > cap {
        return Err(GroupError::CapExceeded { order, cap });
    }
    let kn = k.order();
    let mut table = Vec::with_capacity(order * order);
    for x in 0..order {
        let (xa, xb) = (x / kn, x % kn);
        for y in 0..order {
            let (ya, yb) = (y / kn, y % kn);
            table.push((g.mul(xa, ya) * kn + k.mul(xb, yb)) as u32);
        }
    }
    let labels = (0..order)
        .map(|x| format!("({},{})", g.label(x / kn), k.label(x % kn)))
        .collect();
    let generators = g
        .generators()
        .iter()
        .map(|&a| a * kn)
        .chain(k.generators().iter().copied())
        .collect();
    FiniteGroup::from_table(order, table, labels, generators, cap)
}

/// A permutation of `{0..degree}` in image form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree).collect())
    }

    /// Parses a product of disjoint or overlapping cycles on points `1..=degree`.
    /// Cycles are composed left to right.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, String> {
        let mut p = Perm::identity(degree);
        for cyc in cycles {
            let mut seen = std::collections::HashSet::new();
            for &pt in cyc {
                if pt == 0 || pt > degree {
                    return Err(format!("point {pt} out of range"));
                }
                if !seen.insert(pt) {
                    return Err(format!("point {pt} repeated in a cycle"));
                }
            }
            let mut c = Perm::identity(degree);
            for (i, &pt) in cyc.iter().enumerate() {
                c.0[pt - 1] = cyc[(i + 1) % cyc.len()] - 1;
            }
            p = p.then(&c);
        }
        Ok(p)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i]).collect())
    }

    pub fn cycle_string(&self) -> String {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cyc = vec![];
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push((i + 1).to_string());
                i = self.0[i];
            }
            out.push('(');
            out.push_str(&cyc.join(","));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// Closure of permutation generators, enumerated breadth-first from the
/// identity. Elements are indexed in discovery order and multiplied left to
/// right (`x * y` applies `x` first).
pub fn from_permutations(
    degree: usize,
    gens: &[Vec<Vec<usize>>],
    cap: usize,
) -> Result<FiniteGroup, GroupError> {
    let perms: Vec<Perm> = gens
        .iter()
        .enumerate()
        .map(|(index, cycles)| {
            Perm::from_cycles(degree, cycles).map_err(|reason| GroupError::BadPermutation {
                index,
                degree,
                reason,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut elems = vec![Perm::identity(degree)];
    let mut index: HashMap<Perm, usize> = HashMap::new();
    index.insert(elems[0].clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for s in &perms {
            let y = elems[x].then(s);
            if !index.contains_key(&y) {
                if elems.len() == cap {
                    return Err(GroupError::CapExceeded {
                        order: cap + 1,
                        cap,
                    });
                }
                index.insert(y.clone(), elems.len());
                queue.push_back(elems.len());
                elems.push(y);
            }
        }
    }

    let order = elems.len();
    let mut table = Vec::with_capacity(order * order);
    for x in &elems {
        for y in &elems {
            table.push(index[&x.then(y)] as u32);
        }
    }
    let labels = elems.iter().map(Perm::cycle_string).collect();
    let mut generators = vec![];
    for p in &perms {
        let id = index[p];
        if id != 0 && !generators.contains(&id) {
            generators.push(id);
        }
    }
    FiniteGroup::from_table(order, table, labels, generators, cap)
}

/// A homomorphism between finite groups, stored as its full image table.
#[derive(Debug, Clone)]
pub struct GroupHom {
    pub source: Arc<FiniteGroup>,
    pub target: Arc<FiniteGroup>,
    image: Vec<Elt>,
    injective: bool,
}

impl GroupHom {
    pub fn apply(&self, x: Elt) -> Elt {
        self.image[x]
    }

    pub fn images(&self) -> &[Elt] {
        &self.image
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.order()];
        for &y in &self.image {
            hit[y] = true;
        }
        hit.into_iter().all(|b| b)
    }

    /// Identity map of a group onto itself.
    pub fn identity(g: Arc<FiniteGroup>) -> Self {
        GroupHom {
            image: g.elements().collect(),
            injective: true,
            source: g.clone(),
            target: g,
        }
    }
}

/// Extends generator images to a homomorphism, rejecting maps that violate a
/// relation. `gen_images[i]` is the image of `src.generators()[i]`.
pub fn hom(
    src: Arc<FiniteGroup>,
    tgt: Arc<FiniteGroup>,
    gen_images: &[Elt],
) -> Result<GroupHom, GroupError> {
    let gens = src.generators().to_vec();
    if gen_images.len() < gens.len() {
        let missing = src.label(gens[gen_images.len()]).to_string();
        return Err(GroupError::MissingGeneratorImage(missing));
    }
    let mut image = vec![usize::MAX; src.order()];
    image[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    let mut reached = 1;
    while let Some(x) = queue.pop_front() {
        for (s, &t) in gens.iter().zip(gen_images) {
            let y = src.mul(x, *s);
            if image[y] == usize::MAX {
                image[y] = tgt.mul(image[x], t);
                reached += 1;
                queue.push_back(y);
            }
        }
    }
    if reached < src.order() {
        return Err(GroupError::AmbiguousExtension {
            reached,
            order: src.order(),
        });
    }
    for a in src.elements() {
        for b in src.elements() {
            if image[src.mul(a, b)] != tgt.mul(image[a], image[b]) {
                return Err(GroupError::NotAHomomorphism {
                    a: src.label(a).to_string(),
                    b: src.label(b).to_string(),
                });
            }
        }
    }
    let injective = (1..src.order()).all(|x| image[x] != 0);
    Ok(GroupHom {
        source: src,
        target: tgt,
        image,
        injective,
    })
}

/// Same as [`hom`] with generators and images addressed by label.
pub fn hom_by_labels(
    src: Arc<FiniteGroup>,
    tgt: Arc<FiniteGroup>,
    gen_images: &[(String, String)],
) -> Result<GroupHom, GroupError> {
    let mut images = Vec::with_capacity(src.generators().len());
    for &g in src.generators() {
        let label = src.label(g);
        let (_, img) = gen_images
            .iter()
            .find(|(k, _)| src.find_label(k).ok() == Some(g))
            .ok_or_else(|| GroupError::MissingGeneratorImage(label.to_string()))?;
        images.push(tgt.find_label(img)?);
    }
    hom(src, tgt, &images)
}

/// Conjugacy classes of a finite group, with representatives and power maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjClassTable {
    pub group_order: usize,
    pub exponent: usize,
    pub classes: Vec<Vec<Elt>>,
    pub reps: Vec<Elt>,
    pub sizes: Vec<usize>,
    pub elt_order: Vec<usize>,
    /// `power_map[c][k]` is the class of `reps[c]^k`, for `k` in `0..exponent`.
    pub power_map: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl ConjClassTable {
    fn compute(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<Elt>> = vec![];
        for x in g.elements() {
            if class_of[x] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = vec![];
            for h in g.elements() {
                let y = g.conj(h, x);
                if class_of[y] == usize::MAX {
                    class_of[y] = c;
                    members.push(y);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        let reps: Vec<Elt> = classes.iter().map(|c| c[0]).collect();
        let sizes = classes.iter().map(Vec::len).collect();
        let elt_order: Vec<usize> = reps.iter().map(|&r| g.element_order(r)).collect();
        let exponent = elt_order.iter().fold(1, |a, b| a.lcm(b));
        let power_map = reps
            .iter()
            .map(|&r| {
                let mut acc = 0;
                (0..exponent)
                    .map(|_| {
                        let c = class_of[acc];
                        acc = g.mul(acc, r);
                        c
                    })
                    .collect()
            })
            .collect();
        ConjClassTable {
            group_order: n,
            exponent,
            classes,
            reps,
            sizes,
            elt_order,
            power_map,
            class_of,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class of `reps[c]^k` for any integer `k`.
    pub fn power(&self, c: usize, k: i64) -> usize {
        self.power_map[c][k.rem_euclid(self.exponent as i64) as usize]
    }

    /// Class containing the inverses of class `c`.
    pub fn inverse_class(&self, c: usize) -> usize {
        self.power(c, -1)
    }
}

pub fn conjugacy_classes(g: &FiniteGroup) -> Arc<ConjClassTable> {
    g.classes().clone()
}

pub fn element_order(g: &FiniteGroup, x: Elt) -> usize {
    g.element_order(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orders(g: &FiniteGroup) -> Vec<usize> {
        g.elements().map(|x| g.element_order(x)).collect()
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    fn s3() -> FiniteGroup {
        from_permutations(3, &[vec![vec![1, 2]], vec![vec![1, 2, 3]]], DEFAULT_CAP).unwrap()
    }

    #[test]
    fn cyclic_groups() {
        assert_eq!(cyclic(1, DEFAULT_CAP).unwrap().order(), 1);
        assert_eq!(orders(&cyclic(4, DEFAULT_CAP).unwrap()), vec![1, 4, 2, 4]);
        assert_eq!(
            sorted(orders(&cyclic(6, DEFAULT_CAP).unwrap())),
            vec![1, 2, 3, 3, 6, 6]
        );
        assert_eq!(cyclic(0, DEFAULT_CAP).unwrap_err(), GroupError::EmptyCyclic);
        assert!(matches!(
            cyclic(10, 8),
            Err(GroupError::CapExceeded { order: 10, cap: 8 })
        ));
    }

    #[test]
    fn products() {
        let c2 = cyclic(2, DEFAULT_CAP).unwrap();
        let c3 = cyclic(3, DEFAULT_CAP).unwrap();
        let v4 = direct_product(&c2, &c2, DEFAULT_CAP).unwrap();
        assert_eq!(orders(&v4), vec![1, 2, 2, 2]);
        let c6 = direct_product(&c2, &c3, DEFAULT_CAP).unwrap();
        // brute force: order of (a,b) is lcm(|a|,|b|)
        let expected: Vec<usize> = (0..6)
            .map(|x| c2.element_order(x / 3).lcm(&c3.element_order(x % 3)))
            .collect();
        assert_eq!(orders(&c6), expected);
        assert_eq!(sorted(orders(&c6)), vec![1, 2, 3, 3, 6, 6]);

        let c1 = cyclic(1, DEFAULT_CAP).unwrap();
        let copy = direct_product(&c1, &c3, DEFAULT_CAP).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(copy.mul(x, y), c3.mul(x, y));
            }
        }
        assert!(direct_product(&c6, &c6, 30).is_err());
    }

    #[test]
    fn permutation_closure() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert!(g.check_axioms().is_ok());
        assert_eq!(from_permutations(4, &[], DEFAULT_CAP).unwrap().order(), 1);
        assert_eq!(
            from_permutations(2, &[vec![vec![1, 2]]], DEFAULT_CAP)
                .unwrap()
                .order(),
            2
        );
        let again = s3();
        assert_eq!(g.labels(), again.labels());
        assert!(from_permutations(3, &[vec![vec![1, 4]]], DEFAULT_CAP).is_err());
        assert!(from_permutations(5, &[vec![vec![1, 2, 3, 4, 5]], vec![vec![1, 2]]], 100).is_err());
    }

    #[test]
    fn homomorphisms() {
        let c2 = Arc::new(cyclic(2, DEFAULT_CAP).unwrap());
        let c4 = Arc::new(cyclic(4, DEFAULT_CAP).unwrap());
        let c6 = Arc::new(cyclic(6, DEFAULT_CAP).unwrap());
        let f = hom(c2.clone(), c4.clone(), &[2]).unwrap();
        assert!(f.is_injective());
        let f = hom(c2.clone(), c6.clone(), &[3]).unwrap();
        assert!(f.is_injective());
        assert_eq!(f.apply(1), 3);
        let err = hom(c2.clone(), c4.clone(), &[1]).unwrap_err();
        assert_eq!(
            err,
            GroupError::NotAHomomorphism {
                a: "g".into(),
                b: "g".into()
            }
        );
        let triv = hom(c4.clone(), c2.clone(), &[0]).unwrap();
        assert!(!triv.is_injective());
        let by_label =
            hom_by_labels(c2.clone(), c4.clone(), &[("g".into(), "g^2".into())]).unwrap();
        assert_eq!(by_label.apply(1), 2);
    }

    #[test]
    fn hom_orders_divide() {
        let s3 = Arc::new(s3());
        let c2 = Arc::new(cyclic(2, DEFAULT_CAP).unwrap());
        // sign map: transposition -> g, 3-cycle -> e
        let f = hom(s3.clone(), c2.clone(), &[1, 0]).unwrap();
        for x in s3.elements() {
            assert_eq!(s3.element_order(x) % c2.element_order(f.apply(x)), 0);
        }
    }

    #[test]
    fn classes_of_small_groups() {
        let c4 = cyclic(4, DEFAULT_CAP).unwrap();
        let t = c4.classes();
        assert_eq!(t.len(), 4);
        assert_eq!(t.power(1, 2), t.class_of[2]);
        assert_eq!(t.power(1, 1), 1);

        let g = s3();
        let t = g.classes();
        // brute force conjugation orbits
        let mut orbit_sizes: Vec<usize> = vec![];
        let mut seen = [false; 6];
        for x in g.elements() {
            if seen[x] {
                continue;
            }
            let orbit: std::collections::BTreeSet<_> =
                g.elements().map(|h| g.conj(h, x)).collect();
            for &y in &orbit {
                seen[y] = true;
            }
            orbit_sizes.push(orbit.len());
        }
        assert_eq!(t.sizes, orbit_sizes);
        assert_eq!(sorted(t.sizes.clone()), vec![1, 2, 3]);
        assert_eq!(t.sizes.iter().sum::<usize>(), 6);
        for (c, &r) in t.reps.iter().enumerate() {
            assert_eq!(r, *t.classes[c].iter().min().unwrap());
        }
    }

    #[test]
    fn element_orders_in_c6() {
        let c6 = cyclic(6, DEFAULT_CAP).unwrap();
        assert_eq!(element_order(&c6, 0), 1);
        assert_eq!(element_order(&c6, 1), 6);
        assert_eq!(element_order(&c6, 3), 2);
        assert_eq!(c6.pow(1, -1), 5);
        assert_eq!(c6.exponent(), 6);
    }
}
