//! Corpus loading and the acceptance checks, shared by the acceptance runner
//! and the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rfring::amalgam::oracle::check_against_oracle;
use rfring::amalgam::{torsion_classes, Amalgam, Side};
use rfring::characters::{character_table, restrict, verify_table};
use rfring::cli::{cmd_classes, Options, WorkspaceDoc};
use rfring::cyclotomic::Cyclotomic;
use rfring::group::FiniteGroup;
use rfring::ktheory::{delta_permutation, gl_rank_check, k_ranks, GLRankInput};
use rfring::modp::is_prime;
use rfring::presentation::{
    build_model, parse_presentation, search_degree_one, SL2Z_PRESENTATION, SL3Z_PRESENTATION,
};
use rfring::rational::Z;
use rfring::repring::{compute, AmalgamRing, Membership, RFRing};

pub type Check = Result<String, String>;

pub fn corpus_path() -> String {
    format!("{}/../../data/corpus.json", env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus() -> WorkspaceDoc {
    let text = std::fs::read_to_string(corpus_path()).expect("corpus document");
    WorkspaceDoc::parse(&text).expect("corpus parses")
}

pub fn amalgams(doc: &WorkspaceDoc) -> Vec<(String, Amalgam)> {
    doc.amalgams
        .keys()
        .map(|n| (n.clone(), doc.amalgam(n, doc.options.cap).expect("corpus amalgam")))
        .collect()
}

/// Primes dividing some element order of either factor.
pub fn torsion_primes(a: &Amalgam) -> Vec<u64> {
    let mut orders: Vec<usize> = a.left.classes().elt_order.clone();
    orders.extend(&a.right.classes().elt_order);
    (2..=*orders.iter().max().unwrap() as u64)
        .filter(|&p| is_prime(p) && orders.iter().any(|&o| (o as u64).is_multiple_of(p)))
        .collect()
}

fn is_p_power(mut n: usize, p: u64) -> bool {
    while n.is_multiple_of(p as usize) {
        n /= p as usize;
    }
    n == 1
}

/// p-power classes of a finite group, counted from element orders.
fn n_p_direct(g: &FiniteGroup, p: u64) -> usize {
    g.classes()
        .elt_order
        .iter()
        .filter(|&&o| is_p_power(o, p))
        .count()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn criterion_1() -> Check {
    let doc = corpus();
    let r = cmd_classes(&doc, "sl2z", &Options::default()).map_err(|e| e.to_string())?;
    let mut orders = r.orders.clone();
    orders.sort();
    ensure(r.n_torsion == 8, || format!("{} classes", r.n_torsion))?;
    ensure(orders == vec![1, 2, 3, 3, 4, 4, 6, 6], || format!("orders {orders:?}"))?;
    Ok(format!("n = 8, orders {orders:?}"))
}

pub fn criterion_2() -> Check {
    let doc = corpus();
    let a = doc.amalgam("sl2z", 2000).map_err(|e| e.to_string())?;
    let ar = compute(&a).map_err(|e| e.to_string())?;
    ensure(ar.ring.rank() == 8, || format!("rank {}", ar.ring.rank()))?;
    let p = parse_presentation(SL2Z_PRESENTATION).map_err(|e| e.to_string())?;
    let m = build_model(&p).map_err(|e| e.to_string())?;
    let hit = search_degree_one(&p, &m, &ar, &ar.ring).map_err(|e| e.to_string())?;
    let c = &hit.certificate;
    ensure(c.recheck(), || "certificate does not recheck".into())?;
    // the model's defining polynomial is the characteristic polynomial of w
    let cp = m.charpoly(&m.basis_vector(1));
    let f: Vec<Z> = [-1, 0, -1, 0, 0, 0, 1, 0, 1].iter().map(|&x| Z::from(x)).collect();
    ensure(cp == f, || format!("charpoly {cp:?}"))?;
    Ok(format!(
        "rank 8, det {}, w = ({}, {}) after {} tries",
        c.determinant, hit.choices[0].left, hit.choices[0].right, hit.tried
    ))
}

/// `n_2(SL_3(Z))`, as stated alongside the presentation.
pub const N2_SL3Z: usize = 5;

pub fn criterion_3() -> Check {
    let p = parse_presentation(SL3Z_PRESENTATION).map_err(|e| e.to_string())?;
    let m = build_model(&p).map_err(|e| e.to_string())?;
    m.verify().map_err(|e| e.to_string())?;
    ensure(m.rank() == N2_SL3Z, || format!("rank {}", m.rank()))?;
    // spot check: (a1 a2) b1 = a1 (a2 b1) = 2 a2 + b1 - 2
    let e = |i| m.basis_vector(i);
    let lhs = m.mul(&m.mul(&e(1), &e(2)), &e(3));
    let rhs = m.mul(&e(1), &m.mul(&e(2), &e(3)));
    let want: Vec<Z> = [-2, 0, 2, 1, 0].iter().map(|&x| Z::from(x)).collect();
    ensure(lhs == rhs && lhs == want, || format!("{lhs:?} vs {rhs:?}"))?;
    Ok(format!("{} relations, rank {}", p.relations.len(), m.rank()))
}

pub fn criterion_4() -> Check {
    let doc = corpus();
    let all = amalgams(&doc);
    ensure(all.len() >= 10, || format!("only {} amalgams", all.len()))?;
    let mut checked = 0;
    for (name, a) in &all {
        let ar = compute(a).map_err(|e| format!("{name}: {e}"))?;
        let n = ar.classes.len();
        ensure(ar.ring.rank() == n, || format!("{name}: rank {} vs n {n}", ar.ring.rank()))?;
        for p in torsion_primes(a) {
            let n_p = ar.classes.orders().iter().filter(|&&o| is_p_power(o, p)).count();
            let r = ar.p_local(p).map_err(|e| format!("{name} p={p}: {e}"))?;
            let q = ar.p_local_by_projection(p).map_err(|e| format!("{name} p={p}: {e}"))?;
            ensure(r.rank() == n_p && q.rank() == n_p, || {
                format!("{name} p={p}: ranks {} / {} vs n_p {n_p}", r.rank(), q.rank())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{} amalgams, {checked} p-local rings", all.len()))
}

pub fn criterion_5() -> Check {
    let doc = corpus();
    let mut rows = 0;
    for (name, a) in amalgams(&doc) {
        let ar = compute(&a).map_err(|e| e.to_string())?;
        let degenerate = name.starts_with("degenerate");
        let primes: Vec<u64> = if degenerate { vec![2, 3, 5, 7] } else { torsion_primes(&a) };
        for p in primes {
            let r = k_ranks(&ar, p, true).map_err(|e| format!("{name} p={p}: {e}"))?;
            let gamma = ar.classes.orders().iter().filter(|&&o| is_p_power(o, p)).count();
            let v = gamma as i64 - n_p_direct(&a.left, p) as i64 - n_p_direct(&a.right, p) as i64
                + n_p_direct(&a.edge, p) as i64;
            ensure(r.v_p == v && r.rank_k0 == gamma && r.lattice_rank == gamma, || {
                format!("{name} p={p}: {r:?}, expected v_p {v}")
            })?;
            ensure(!r.v_p_negative, || format!("{name} p={p}: v_p < 0"))?;
            if degenerate {
                ensure(r.v_p == 0, || format!("{name} p={p}: v_p {}", r.v_p))?;
            }
            if name == "sl2z" {
                ensure(r.v_p == 0 && r.rank_k1 == 0, || format!("sl2z p={p}: {r:?}"))?;
            }
            rows += 1;
        }
    }
    Ok(format!("{rows} (amalgam, prime) reports"))
}

/// A random orbit partition of `cl` into divisors of `p − 1`.
pub fn random_gl_input(rng: &mut StdRng) -> GLRankInput {
    let primes: Vec<u64> = (3..50).filter(|&p| is_prime(p)).collect();
    let p = primes[rng.gen_range(0..primes.len())];
    let cl = rng.gen_range(1..=12u64);
    let divs: Vec<u64> = (1..p).filter(|d| (p - 1).is_multiple_of(*d)).collect();
    let mut orbits = vec![];
    let mut left = cl;
    while left > 0 {
        let fit: Vec<u64> = divs.iter().copied().filter(|&d| d <= left).collect();
        let d = fit[rng.gen_range(0..fit.len())];
        orbits.push(d);
        left -= d;
    }
    GLRankInput {
        p,
        class_number: cl,
        orbit_sizes: orbits,
    }
}

fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut n = 0;
    for s in 0..perm.len() {
        if !seen[s] {
            n += 1;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = perm[x];
            }
        }
    }
    n
}

pub fn criterion_6() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_2005);
    let mut structures = std::collections::BTreeSet::new();
    for _ in 0..200 {
        let input = random_gl_input(&mut rng);
        let r = gl_rank_check(&input).map_err(|e| format!("{input:?}: {e}"))?;
        ensure(r.rank_rf == 1 + input.class_number as usize, || format!("{input:?}: {r:?}"))?;
        // Burnside: invariants of a permutation representation = number of orbits
        let cycles = cycle_count(&delta_permutation(&input, r.delta_generator));
        ensure(r.rank_invariants == cycles, || format!("{input:?}: {cycles} orbits"))?;
        structures.insert((input.p, input.orbit_sizes.clone()));
    }
    Ok(format!("200 inputs, {} distinct orbit structures", structures.len()))
}

pub fn criterion_7() -> Check {
    let doc = corpus();
    let mut pairs = 0;
    for (name, a) in amalgams(&doc) {
        let t = torsion_classes(&a);
        let (n, bad) = check_against_oracle(&a, &t, 6);
        ensure(bad.is_empty(), || format!("{name}: {bad:?}"))?;
        pairs += n;
    }
    Ok(format!("{pairs} representative pairs agree at bound 6"))
}

fn corpus_groups(doc: &WorkspaceDoc) -> Vec<(String, Arc<FiniteGroup>)> {
    doc.groups
        .keys()
        .map(|n| (n.clone(), doc.group(n, doc.options.cap).unwrap()))
        .collect()
}

pub fn criterion_8() -> Check {
    let doc = corpus();
    for (name, g) in corpus_groups(&doc) {
        let t = character_table(&g).map_err(|e| format!("{name}: {e}"))?;
        verify_table(&t).map_err(|e| format!("{name}: {e}"))?;
        let sq: u64 = t.degrees.iter().map(|d| d * d).sum();
        ensure(sq == g.order() as u64, || format!("{name}: Σd² = {sq}"))?;
    }
    let mut pairs = 0;
    for (name, a) in amalgams(&doc) {
        let edge = character_table(&a.edge).map_err(|e| e.to_string())?;
        for side in [Side::Left, Side::Right] {
            let t = character_table(a.factor(side)).map_err(|e| e.to_string())?;
            let f = a.embedding(side);
            let chars: Vec<_> = t.characters().collect();
            for x in &chars {
                let rx = restrict(x, f).map_err(|e| e.to_string())?;
                edge.decompose_integral(&rx)
                    .map_err(|e| format!("{name}: restriction not a character: {e}"))?;
                for y in &chars {
                    let lhs = restrict(&x.mul(y).unwrap(), f).unwrap();
                    let rhs = rx.mul(&restrict(y, f).unwrap()).unwrap();
                    ensure(lhs.values == rhs.values, || format!("{name}: restriction not multiplicative"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{} groups; {pairs} restriction products", doc.groups.len()))
}

fn random_coords(rng: &mut StdRng, n: usize) -> Vec<Z> {
    (0..n).map(|_| Z::from(rng.gen_range(-3i64..=3))).collect()
}

/// Structural checks on one ring; returns the number of random checks.
pub fn check_ring(ar: &AmalgamRing, r: &RFRing, rng: &mut StdRng) -> Result<usize, String> {
    r.check_structure()?;
    let one = r.evaluate(&r.unit);
    ensure(one.iter().all(|v| *v == Cyclotomic::one()), || "unit is not the constant 1".into())?;
    let n = r.rank();
    let mut checks = 0;
    for _ in 0..100 {
        let a = random_coords(rng, n);
        let b = random_coords(rng, n);
        let va = r.evaluate(&a);
        let vb = r.evaluate(&b);
        let pointwise: Vec<Cyclotomic> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
        match r.coords(&pointwise).map_err(|e| e.to_string())? {
            Membership::Member(c) => ensure(c == r.mul(&a, &b), || "product mismatch".into())?,
            Membership::NonMember(_) => return Err("product left the lattice".into()),
        }
        checks += 1;
    }
    for k in ar.adams_exponents() {
        let perm = r.adams_permutation(&ar.amalgam, &ar.classes, k);
        ensure(r.is_stable_under_columns(&perm), || format!("not stable under psi^{k}"))?;
        checks += 1;
    }
    ensure(r.is_conjugation_stable(), || "not stable under conjugation".into())?;
    Ok(checks + 1)
}

pub fn criterion_9() -> Check {
    let doc = corpus();
    let mut rng = StdRng::seed_from_u64(9);
    let mut rings = 0;
    let mut checks = 0;
    for (name, a) in amalgams(&doc) {
        let ar = compute(&a).map_err(|e| e.to_string())?;
        let mut all = vec![ar.ring.clone()];
        for p in torsion_primes(&a) {
            all.push(ar.p_local(p).map_err(|e| e.to_string())?);
        }
        for r in &all {
            checks += check_ring(&ar, r, &mut rng).map_err(|e| format!("{name} {:?}: {e}", r.prime))?;
            rings += 1;
        }
    }
    Ok(format!("{rings} rings, {checks} checks"))
}

pub type Criterion = (u32, &'static str, f64, fn() -> Check);

/// Number, description, time limit in seconds, check.
pub const CRITERIA: [Criterion; 9] = [
    (1, "SL2(Z) torsion class count", 1.0, criterion_1),
    (2, "SL2(Z) ring and certified presentation", 5.0, criterion_2),
    (3, "rank-5 linear-closed presentation", 1.0, criterion_3),
    (4, "rank R_F = n and rank R_F(p) = n_p on the corpus", 60.0, criterion_4),
    (5, "K-theory rank bookkeeping", 5.0, criterion_5),
    (6, "GL_{p-1}(Z) rank identity on 200 random inputs", 30.0, criterion_6),
    (7, "fusion agrees with the word oracle", 120.0, criterion_7),
    (8, "character table integrity", 30.0, criterion_8),
    (9, "structural properties of every ring", 120.0, criterion_9),
];

