//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! Elements are stored on the power basis {zeta_N^k : 0 <= k < phi(N)},
//! reduced modulo the N-th cyclotomic polynomial. Values of different
//! conductors are promoted to the least common conductor before combining.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::CoreError;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Monic coefficients of the N-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<Rat> {
    assert!(n >= 1);
    // x^n - 1 divided by the product of Phi_d over proper divisors d of n.
    let mut num: Vec<Rat> = vec![Rat::zero(); n as usize + 1];
    num[0] = -Rat::one();
    num[n as usize] = Rat::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    num
}

/// Exact division of polynomials over Q; panics if the division is not exact.
fn poly_div_exact(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
    let mut rem: Vec<Rat> = num.to_vec();
    let dd = den.len() - 1;
    assert!(!den[dd].is_zero());
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone() / den[dd].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for j in 0..=dd {
            let t = rem[i - dd + j].clone() - c.clone() * den[j].clone();
            rem[i - dd + j] = t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// Remainder of `p` modulo the monic polynomial `m`, coefficients over Q.
fn poly_mod(p: &[Rat], m: &[Rat]) -> Vec<Rat> {
    let dm = m.len() - 1;
    let mut rem: Vec<Rat> = p.to_vec();
    if rem.len() <= dm {
        rem.resize(dm, Rat::zero());
        return rem;
    }
    for i in (dm..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        rem[i] = Rat::zero();
        for j in 0..dm {
            let t = rem[i - dm + j].clone() - c.clone() * m[j].clone();
            rem[i - dm + j] = t;
        }
    }
    rem.truncate(dm);
    rem
}

/// An exact element of the cyclotomic field Q(zeta_N).
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    conductor: u64,
    /// Coefficients on {zeta_N^k : 0 <= k < phi(N)}, reduced mod Phi_N.
    coeffs: Vec<Rat>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![Rat::zero()],
        }
    }

    pub fn one() -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![Rat::one()],
        }
    }

    pub fn from_rat(r: Rat) -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rat(rat(n, d))
    }

    /// zeta_N^k in canonical form.
    pub fn zeta(n: u64, k: i64) -> Self {
        assert!(n >= 1, "conductor must be positive");
        let k = k.rem_euclid(n as i64) as usize;
        let mut p = vec![Rat::zero(); k + 1];
        p[k] = Rat::one();
        Self::from_poly(n, p)
    }

    fn from_poly(n: u64, p: Vec<Rat>) -> Self {
        let phi = cyclotomic_polynomial(n);
        let coeffs = poly_mod(&p, &phi);
        Cyclotomic { conductor: n, coeffs }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        *self == Cyclotomic::one()
    }

    /// Re-express in Q(zeta_m); requires conductor | m.
    pub fn promote(&self, m: u64) -> Self {
        assert!(m % self.conductor == 0, "can only promote to a multiple conductor");
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut p = vec![Rat::zero(); self.coeffs.len() * step];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                p[k * step] = c.clone();
            }
        }
        Self::from_poly(m, p)
    }

    fn promoted_pair(&self, other: &Self) -> (Self, Self, u64) {
        let m = lcm(self.conductor, other.conductor);
        (self.promote(m), other.promote(m), m)
    }

    pub fn inv(&self) -> Result<Self, CoreError> {
        if self.is_zero() {
            return Err(CoreError::DivisionByZero);
        }
        // Extended Euclid in Q[x] against Phi_N: gcd is 1 since Phi_N is
        // irreducible and self != 0 mod Phi_N.
        let phi = cyclotomic_polynomial(self.conductor);
        let (mut r0, mut r1) = (phi.clone(), trim(&self.coeffs));
        let (mut s0, mut s1) = (vec![Rat::zero()], vec![Rat::one()]);
        while !is_zero_poly(&r1) {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant gcd; s0 / r0 is the inverse of self mod Phi.
        assert_eq!(r0.len(), 1);
        let c = r0[0].clone();
        let inv_poly: Vec<Rat> = s0.into_iter().map(|a| a / c.clone()).collect();
        Ok(Self::from_poly(self.conductor, inv_poly))
    }

    /// Embedding zeta_N -> exp(2 pi i / N) in double precision.
    pub fn to_complex(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let n = self.conductor as f64;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / n;
            let cf = rat_to_f64(c);
            acc += Complex64::new(theta.cos(), theta.sin()) * cf;
        }
        acc
    }

    /// Exact rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Cyclotomic::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplicative order, if this is a root of unity (None otherwise).
    /// Only orders dividing `bound` are probed.
    pub fn root_of_unity_order(&self, bound: u32) -> Option<u32> {
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_one() {
                return Some(k);
            }
            acc = &acc * self;
        }
        None
    }
}

fn trim(p: &[Rat]) -> Vec<Rat> {
    let mut v = p.to_vec();
    while v.len() > 1 && v.last().unwrap().is_zero() {
        v.pop();
    }
    v
}

fn is_zero_poly(p: &[Rat]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                let t = out[i + j].clone() + x.clone() * y.clone();
                out[i + j] = t;
            }
        }
    }
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        let t = out[i].clone() - y.clone();
        out[i] = t;
    }
    trim(&out)
}

fn poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let den = trim(den);
    let dd = den.len() - 1;
    let mut rem = trim(num);
    if rem.len() <= dd {
        return (vec![Rat::zero()], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone() / den[dd].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for j in 0..=dd {
            let t = rem[i - dd + j].clone() - c.clone() * den[j].clone();
            rem[i - dd + j] = t;
        }
    }
    (trim(&quot), trim(&rem))
}

fn rat_to_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Good enough for desk-scale numerators; fall back through string
    // conversion if the magnitude ever exceeds f64 range.
    let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
    nf / df
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = self.promoted_pair(other);
        a.coeffs.len() == b.coeffs.len() && a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, other: &Cyclotomic) -> Cyclotomic {
        let (mut a, b, _) = self.promoted_pair(other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y.clone();
        }
        a
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, other: &Cyclotomic) -> Cyclotomic {
        let (mut a, b, _) = self.promoted_pair(other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x -= y.clone();
        }
        a
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, other: &Cyclotomic) -> Cyclotomic {
        let (a, b, m) = self.promoted_pair(other);
        Cyclotomic::from_poly(m, poly_mul(&a.coeffs, &b.coeffs))
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        let mut a = self.clone();
        for c in a.coeffs.iter_mut() {
            *c = -c.clone();
        }
        a
    }
}

impl Div for &Cyclotomic {
    type Output = Cyclotomic;
    fn div(self, other: &Cyclotomic) -> Cyclotomic {
        self.checked_div(other).expect("division by zero")
    }
}

impl Cyclotomic {
    pub fn checked_div(&self, other: &Self) -> Result<Self, CoreError> {
        let (a, b, _) = self.promoted_pair(other);
        Ok(&a * &b.inv()?)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let mut a = self.clone();
        for c in a.coeffs.iter_mut() {
            *c *= r.clone();
        }
        a
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            if k == 0 {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "z{}^{}", self.conductor, k)?;
            } else {
                write!(f, "{}*z{}^{}", mag, self.conductor, k)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
