//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.
//!
//! A value of conductor `m` is stored in the power basis `1, ζ, …, ζ^{φ(m)-1}`
//! after reduction by the m-th cyclotomic polynomial, so equality at a fixed
//! conductor is coefficient equality. Binary operations lift both operands to
//! the lcm of their conductors.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{fmt_q, q, serde_q_vec, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CyclotomicError {
    #[error("value {0} is not rational")]
    NotRational(String),
    #[error("coefficient vector has length {got}, expected phi({conductor}) = {expected}")]
    BadLength {
        conductor: usize,
        got: usize,
        expected: usize,
    },
    #[error("conductor must be positive")]
    ZeroConductor,
}

impl CyclotomicError {
    pub fn code(&self) -> &'static str {
        match self {
            CyclotomicError::NotRational(_) => "cyclotomic/not-rational",
            CyclotomicError::BadLength { .. } => "cyclotomic/bad-length",
            CyclotomicError::ZeroConductor => "cyclotomic/zero-conductor",
        }
    }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the m-th cyclotomic polynomial, lowest degree first.
/// Obtained by dividing `x^m - 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(m: usize) -> Arc<Vec<i64>> {
    assert!(m >= 1);
    if let Some(p) = cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        let div = cyclotomic_polynomial(d);
        num = div_monic(&num, &div);
    }
    let p = Arc::new(num);
    cache().lock().unwrap().insert(m, p.clone());
    p
}

fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// Euler's totient.
pub fn phi(m: usize) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

/// Reduces a polynomial modulo `Φ_m` into a coefficient vector of length φ(m).
fn reduce(mut poly: Vec<Q>, m: usize) -> Vec<Q> {
    let cp = cyclotomic_polynomial(m);
    let d = cp.len() - 1;
    for i in (d..poly.len()).rev() {
        if poly[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut poly[i]);
        for (j, &pj) in cp[..d].iter().enumerate() {
            if pj != 0 {
                poly[i - d + j] -= &c * q(pj);
            }
        }
    }
    poly.resize(d, Q::zero());
    poly
}

#[derive(Clone, Serialize, Deserialize)]
pub struct Cyclotomic {
    conductor: usize,
    #[serde(with = "serde_q_vec")]
    coeffs: Vec<Q>,
}

impl Cyclotomic {
    pub fn new(conductor: usize, coeffs: Vec<Q>) -> Result<Self, CyclotomicError> {
        if conductor == 0 {
            return Err(CyclotomicError::ZeroConductor);
        }
        let expected = phi(conductor);
        if coeffs.len() != expected {
            return Err(CyclotomicError::BadLength {
                conductor,
                got: coeffs.len(),
                expected,
            });
        }
        Ok(Cyclotomic { conductor, coeffs })
    }

    pub fn from_rational(x: Q) -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![x],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(q(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `ζ_m^k`.
    pub fn root_of_unity(m: usize, k: i64) -> Self {
        assert!(m >= 1, "conductor must be positive");
        let k = k.rem_euclid(m as i64) as usize;
        let mut poly = vec![Q::zero(); k + 1];
        poly[k] = Q::one();
        Cyclotomic {
            conductor: m,
            coeffs: reduce(poly, m),
        }
    }

    pub fn conductor(&self) -> usize {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Re-expresses the value at conductor `target`, a multiple of the current one.
    pub fn lift(&self, target: usize) -> Self {
        assert!(
            target.is_multiple_of(self.conductor),
            "cannot lift conductor {} to {}",
            self.conductor,
            target
        );
        if target == self.conductor {
            return self.clone();
        }
        let step = target / self.conductor;
        let mut poly = vec![Q::zero(); step * (self.coeffs.len().max(1) - 1) + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Cyclotomic {
            conductor: target,
            coeffs: reduce(poly, target),
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let m = a.conductor.lcm(&b.conductor);
        (a.lift(m), b.lift(m))
    }

    /// Applies `ζ ↦ ζ^k`. `k` must be coprime to the conductor for this to be
    /// a field automorphism.
    pub fn galois(&self, k: i64) -> Self {
        let m = self.conductor;
        let mut poly = vec![Q::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = ((i as i64) * k).rem_euclid(m as i64) as usize;
            poly[e] += c;
        }
        Cyclotomic {
            conductor: m,
            coeffs: reduce(poly, m),
        }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn to_rational(&self) -> Result<Q, CyclotomicError> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Ok(self.coeffs[0].clone())
        } else {
            Err(CyclotomicError::NotRational(self.to_string()))
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclotomic::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficients at conductor `m` (a multiple of the current conductor).
    pub fn flatten(&self, m: usize) -> Vec<Q> {
        self.lift(m).coeffs
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Cyclotomic::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = match i {
                0 => String::new(),
                1 => format!("z{}", self.conductor),
                _ => format!("z{}^{}", self.conductor, i),
            };
            terms.push(match (i, c.is_one()) {
                (0, _) => fmt_q(c),
                (_, true) => z,
                _ if *c == -Q::one() => format!("-{z}"),
                _ => format!("{}*{}", fmt_q(c), z),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
        }
    }
}

impl<'a> std::ops::Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = Cyclotomic::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl<'a> std::ops::Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> std::ops::Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::common(self, rhs);
        let m = a.conductor;
        let mut poly = vec![Q::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] += x * y;
                }
            }
        }
        Cyclotomic {
            conductor: m,
            coeffs: reduce(poly, m),
        }
    }
}

impl std::iter::Sum for Cyclotomic {
    fn sum<I: Iterator<Item = Cyclotomic>>(iter: I) -> Self {
        iter.fold(Cyclotomic::zero(), |acc, x| &acc + &x)
    }
}

pub fn root_of_unity(m: usize, k: i64) -> Cyclotomic {
    Cyclotomic::root_of_unity(m, k)
}

pub fn to_rational(a: &Cyclotomic) -> Result<Q, CyclotomicError> {
    a.to_rational()
}
