//! Exact arithmetic in the rings of integers ℤ and ℤ[i].
//!
//! Both rings are Euclidean, so gcds, Smith forms and ideal factorizations
//! reduce to division with remainder. Elements carry their ring tag; mixing
//! rings in an arithmetic operator is a logic error and panics, while the
//! fallible entry points (`try_gcd` and friends) report [`Error::RingMismatch`].

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Which ring of integers an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    /// The rational integers.
    Integers,
    /// The Gaussian integers ℤ[i].
    Gaussian,
}

impl Ring {
    /// Degree of the fraction field over ℚ.
    pub fn degree(self) -> u32 {
        match self {
            Ring::Integers => 1,
            Ring::Gaussian => 2,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => f.write_str("Z"),
            Ring::Gaussian => f.write_str("Z[i]"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" | "ZZ" | "integers" => Ok(Ring::Integers),
            "Zi" | "Z[i]" | "gaussian" => Ok(Ring::Gaussian),
            other => Err(Error::Parse(alloc::format!("unknown ring `{other}`"))),
        }
    }
}

/// An element `re + im·i` of ℤ or ℤ[i]; `im` is always zero over ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    ring: Ring,
    re: BigInt,
    im: BigInt,
}

impl RingElement {
    pub fn integer(value: impl Into<BigInt>) -> Self {
        RingElement { ring: Ring::Integers, re: value.into(), im: BigInt::zero() }
    }

    pub fn gaussian(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        RingElement { ring: Ring::Gaussian, re: re.into(), im: im.into() }
    }

    /// Builds an element of `ring`; fails if `im ≠ 0` over ℤ.
    pub fn new(ring: Ring, re: BigInt, im: BigInt) -> Result<Self> {
        if ring == Ring::Integers && !im.is_zero() {
            return Err(Error::Input("integer element with imaginary part".to_string()));
        }
        Ok(RingElement { ring, re, im })
    }

    /// Embeds a rational integer into `ring`.
    pub fn from_int(ring: Ring, value: impl Into<BigInt>) -> Self {
        RingElement { ring, re: value.into(), im: BigInt::zero() }
    }

    pub fn zero(ring: Ring) -> Self {
        Self::from_int(ring, 0)
    }

    pub fn one(ring: Ring) -> Self {
        Self::from_int(ring, 1)
    }

    /// The imaginary unit of ℤ[i].
    pub fn i() -> Self {
        Self::gaussian(0, 1)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn re(&self) -> &BigInt {
        &self.re
    }

    pub fn im(&self) -> &BigInt {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Absolute norm `|O/xO|`; zero for zero.
    pub fn norm(&self) -> BigUint {
        match self.ring {
            Ring::Integers => self.re.magnitude().clone(),
            Ring::Gaussian => {
                let a = self.re.magnitude();
                let b = self.im.magnitude();
                a * a + b * b
            }
        }
    }

    /// Largest absolute value among the conjugates: `|a|` over ℤ, `√(a²+b²)` over ℤ[i].
    pub fn ceil(&self) -> f64 {
        match self.ring {
            Ring::Integers => big_to_f64(self.re.magnitude()),
            Ring::Gaussian => libm::sqrt(big_to_f64(&self.norm())),
        }
    }

    /// Natural log of [`RingElement::ceil`], usable for huge values; `-∞` for zero.
    pub fn ln_ceil(&self) -> f64 {
        match self.ring {
            Ring::Integers => ln_biguint(self.re.magnitude()),
            Ring::Gaussian => 0.5 * ln_biguint(&self.norm()),
        }
    }

    /// Complex conjugate (identity over ℤ).
    pub fn conj(&self) -> Self {
        RingElement { ring: self.ring, re: self.re.clone(), im: -&self.im }
    }

    /// Multiplication by the imaginary unit.
    fn mul_i(&self) -> Self {
        RingElement { ring: self.ring, re: -&self.im, im: self.re.clone() }
    }

    /// Units of the ring: ±1 over ℤ, ±1, ±i over ℤ[i].
    pub fn units(ring: Ring) -> Vec<Self> {
        match ring {
            Ring::Integers => alloc::vec![Self::integer(1), Self::integer(-1)],
            Ring::Gaussian => alloc::vec![
                Self::gaussian(1, 0),
                Self::gaussian(0, 1),
                Self::gaussian(-1, 0),
                Self::gaussian(0, -1),
            ],
        }
    }

    /// Inverse of a unit, `None` otherwise.
    pub fn unit_inverse(&self) -> Option<Self> {
        if self.is_unit() {
            Some(self.conj())
        } else {
            None
        }
    }

    /// The canonical associate together with the unit `u` such that `u·self` is canonical.
    ///
    /// Over ℤ the canonical associate is `|a|`; over ℤ[i] it is the associate with
    /// `a > 0, b ≥ 0`. Zero is canonical with unit 1.
    pub fn canonical_with_unit(&self) -> (Self, Self) {
        let one = Self::one(self.ring);
        if self.is_zero() {
            return (self.clone(), one);
        }
        match self.ring {
            Ring::Integers => {
                if self.re.is_negative() {
                    (-self.clone(), -one)
                } else {
                    (self.clone(), one)
                }
            }
            Ring::Gaussian => {
                let mut x = self.clone();
                let mut unit = one;
                for _ in 0..4 {
                    if x.re.is_positive() && !x.im.is_negative() {
                        return (x, unit);
                    }
                    x = x.mul_i();
                    unit = unit.mul_i();
                }
                unreachable!("one of the four associates lies in the first quadrant")
            }
        }
    }

    pub fn canonical_associate(&self) -> Self {
        self.canonical_with_unit().0
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical_associate()
    }

    /// Euclidean division with `N(r) < N(d)` (in fact `N(r) ≤ N(d)/2`).
    ///
    /// Panics if `d` is zero or the rings differ.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert_same_ring(self, d);
        assert!(!d.is_zero(), "division by zero");
        let q = match self.ring {
            Ring::Integers => {
                let q = round_div(&self.re, &d.re);
                Self::integer(q)
            }
            Ring::Gaussian => {
                let num = self * &d.conj();
                let n = BigInt::from(d.norm());
                Self::gaussian(round_div(&num.re, &n), round_div(&num.im, &n))
            }
        };
        let r = self - &(&q * d);
        (q, r)
    }

    /// `self / d` when the division is exact.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert_same_ring(self, d);
        if d.is_zero() {
            return if self.is_zero() { Some(self.clone()) } else { None };
        }
        match self.ring {
            Ring::Integers => {
                let (q, r) = self.re.div_rem(&d.re);
                r.is_zero().then(|| Self::integer(q))
            }
            Ring::Gaussian => {
                let num = self * &d.conj();
                let n = BigInt::from(d.norm());
                let (qa, ra) = num.re.div_rem(&n);
                let (qb, rb) = num.im.div_rem(&n);
                (ra.is_zero() && rb.is_zero()).then(|| Self::gaussian(qa, qb))
            }
        }
    }

    /// Whether `self` divides `x` (zero divides only zero).
    pub fn divides(&self, x: &Self) -> bool {
        x.div_exact(self).is_some()
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.ring);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Parses an element of a prescribed ring; `i` terms are rejected over ℤ.
    pub fn parse_in(s: &str, ring: Ring) -> Result<Self> {
        let x: RingElement = s.parse()?;
        match (ring, x.ring) {
            (Ring::Gaussian, Ring::Integers) => Ok(Self::gaussian(x.re, x.im)),
            (Ring::Integers, Ring::Gaussian) => {
                Err(Error::Parse(alloc::format!("`{s}` is not a rational integer")))
            }
            _ => Ok(x),
        }
    }
}

fn assert_same_ring(x: &RingElement, y: &RingElement) {
    assert_eq!(x.ring, y.ring, "ring mismatch in arithmetic");
}

fn check_same_ring(x: &RingElement, y: &RingElement) -> Result<()> {
    if x.ring != y.ring {
        return Err(Error::RingMismatch(x.ring, y.ring));
    }
    Ok(())
}

/// Nearest-integer division `round(a / b)`, halves rounded up.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (num, den) = if b.is_negative() { (-a, -b) } else { (a.clone(), b.clone()) };
    (&num * &two + &den).div_floor(&(&den * &two))
}

pub(crate) fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Natural logarithm of a big unsigned integer without overflowing `f64`.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return libm::log(big_to_f64(x));
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    libm::log(top) + shift as f64 * core::f64::consts::LN_2
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        assert_same_ring(self, rhs);
        RingElement { ring: self.ring, re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        assert_same_ring(self, rhs);
        RingElement { ring: self.ring, re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        assert_same_ring(self, rhs);
        match self.ring {
            Ring::Integers => RingElement::integer(&self.re * &rhs.re),
            Ring::Gaussian => RingElement::gaussian(
                &self.re * &rhs.re - &self.im * &rhs.im,
                &self.re * &rhs.im + &self.im * &rhs.re,
            ),
        }
    }
}

impl Add for RingElement {
    type Output = RingElement;
    fn add(self, rhs: RingElement) -> RingElement {
        &self + &rhs
    }
}

impl Sub for RingElement {
    type Output = RingElement;
    fn sub(self, rhs: RingElement) -> RingElement {
        &self - &rhs
    }
}

impl Mul for RingElement {
    type Output = RingElement;
    fn mul(self, rhs: RingElement) -> RingElement {
        &self * &rhs
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement { ring: self.ring, re: -self.re, im: -self.im }
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement { ring: self.ring, re: -&self.re, im: -&self.im }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let imag = |f: &mut fmt::Formatter<'_>, b: &BigInt| -> fmt::Result {
            if b.magnitude().is_one() {
                f.write_str("i")
            } else {
                write!(f, "{}i", b.magnitude())
            }
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                f.write_str("-")?;
            }
            return imag(f, &self.im);
        }
        write!(f, "{}", self.re)?;
        f.write_str(if self.im.is_negative() { "-" } else { "+" })?;
        imag(f, &self.im)
    }
}

impl FromStr for RingElement {
    type Err = Error;

    /// Accepts `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i` (decimal, no inner spaces needed).
    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(alloc::format!("malformed ring element `{s}`"));
        if text.is_empty() {
            return Err(bad());
        }
        let Some(body) = text.strip_suffix('i') else {
            let re: BigInt = text.parse().map_err(|_| bad())?;
            return Ok(RingElement::integer(re));
        };
        // split the real part from the imaginary coefficient at the last sign
        let split = body
            .char_indices()
            .rev()
            .find(|&(idx, c)| (c == '+' || c == '-') && idx > 0)
            .map(|(idx, _)| idx);
        let (re_text, im_text) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let re: BigInt = re_text.parse().map_err(|_| bad())?;
        let im: BigInt = match im_text {
            "" | "+" => BigInt::one(),
            "-" => -BigInt::one(),
            t => t.parse().map_err(|_| bad())?,
        };
        Ok(RingElement::gaussian(re, im))
    }
}

/// Canonical greatest common divisor; `gcd(0, 0) = 0`. Panics on ring mismatch.
pub fn gcd(x: &RingElement, y: &RingElement) -> RingElement {
    assert_same_ring(x, y);
    let mut a = x.clone();
    let mut b = y.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    a.canonical_associate()
}

/// [`gcd`] with the ring check surfaced as an error.
pub fn try_gcd(x: &RingElement, y: &RingElement) -> Result<RingElement> {
    check_same_ring(x, y)?;
    Ok(gcd(x, y))
}

/// Extended gcd: returns `(g, s, t)` with `s·x + t·y = g` and `g` canonical.
pub fn extended_gcd(x: &RingElement, y: &RingElement) -> (RingElement, RingElement, RingElement) {
    assert_same_ring(x, y);
    let ring = x.ring;
    let (mut r0, mut r1) = (x.clone(), y.clone());
    let (mut s0, mut s1) = (RingElement::one(ring), RingElement::zero(ring));
    let (mut t0, mut t1) = (RingElement::zero(ring), RingElement::one(ring));
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        r0 = core::mem::replace(&mut r1, r);
        let s = &s0 - &(&q * &s1);
        s0 = core::mem::replace(&mut s1, s);
        let t = &t0 - &(&q * &t1);
        t0 = core::mem::replace(&mut t1, t);
    }
    let (g, u) = r0.canonical_with_unit();
    (g, &u * &s0, &u * &t0)
}

/// The `m`-adic valuation; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn min_with(self, i: u32) -> u32 {
        match self {
            Valuation::Finite(k) => k.min(i),
            Valuation::Infinite => i,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(k) => write!(f, "{k}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// A maximal ideal `(π)` of ℤ or ℤ[i], with `π` canonical and prime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    generator: RingElement,
    residue_norm: BigUint,
}

impl PrimeIdeal {
    /// Checks primality of `x` and normalizes it to its canonical associate.
    pub fn new(x: &RingElement) -> Result<Self> {
        if !is_prime_element(x) {
            return Err(Error::Input(alloc::format!("{x} is not prime in {}", x.ring)));
        }
        let generator = x.canonical_associate();
        let residue_norm = generator.norm();
        Ok(PrimeIdeal { generator, residue_norm })
    }

    fn trusted(generator: RingElement) -> Self {
        let residue_norm = generator.norm();
        PrimeIdeal { generator, residue_norm }
    }

    pub fn generator(&self) -> &RingElement {
        &self.generator
    }

    pub fn residue_norm(&self) -> &BigUint {
        &self.residue_norm
    }

    pub fn ring(&self) -> Ring {
        self.generator.ring
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (&self.residue_norm, &self.generator).cmp(&(&other.residue_norm, &other.generator))
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

/// `v_m(x)`: the largest `e` with `π^e | x`.
pub fn valuation(x: &RingElement, m: &PrimeIdeal) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let mut rest = x.clone();
    let mut e = 0;
    while let Some(q) = rest.div_exact(&m.generator) {
        rest = q;
        e += 1;
    }
    Valuation::Finite(e)
}

/// Whether `x` generates a maximal ideal.
pub fn is_prime_element(x: &RingElement) -> bool {
    match x.ring {
        Ring::Integers => is_prime(x.re.magnitude()),
        Ring::Gaussian => {
            let n = x.norm();
            if is_prime(&n) {
                return true;
            }
            // inert primes: associates of a rational prime q ≡ 3 (mod 4)
            let q = if x.im.is_zero() {
                x.re.magnitude().clone()
            } else if x.re.is_zero() {
                x.im.magnitude().clone()
            } else {
                return false;
            };
            is_prime(&q) && (&q % 4u32) == BigUint::from(3u32)
        }
    }
}

/// Prime ideal factorization of `xO`, sorted by norm then generator.
pub fn factor_ideal(x: &RingElement) -> Result<Vec<(PrimeIdeal, u32)>> {
    if x.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    let mut out = Vec::new();
    match x.ring {
        Ring::Integers => {
            for (p, e) in factor_biguint(x.re.magnitude()) {
                out.push((PrimeIdeal::trusted(RingElement::integer(BigInt::from(p))), e));
            }
        }
        Ring::Gaussian => {
            let mut rest = x.clone();
            for (p, _) in factor_biguint(&x.norm()) {
                for pi in gaussian_primes_over(&p) {
                    let ideal = PrimeIdeal::trusted(pi);
                    let mut e = 0;
                    while let Some(q) = rest.div_exact(&ideal.generator) {
                        rest = q;
                        e += 1;
                    }
                    if e > 0 {
                        out.push((ideal, e));
                    }
                }
            }
            debug_assert!(rest.is_unit());
        }
    }
    out.sort();
    Ok(out)
}

/// Canonical Gaussian primes lying over the rational prime `p`.
pub fn gaussian_primes_over(p: &BigUint) -> Vec<RingElement> {
    let two = BigUint::from(2u32);
    if *p == two {
        return alloc::vec![RingElement::gaussian(1, 1)];
    }
    if (p % 4u32) == BigUint::from(3u32) {
        return alloc::vec![RingElement::gaussian(BigInt::from(p.clone()), 0)];
    }
    let t = sqrt_minus_one_mod(p);
    let pi = gcd(
        &RingElement::gaussian(BigInt::from(p.clone()), 0),
        &RingElement::gaussian(BigInt::from(t), 1),
    );
    let other = pi.conj().canonical_associate();
    let mut both = alloc::vec![pi, other];
    both.sort();
    both
}

/// All prime ideals of `ring` with norm at most `bound`, sorted by norm.
pub fn primes_up_to_norm(ring: Ring, bound: u64) -> Vec<PrimeIdeal> {
    let mut out = Vec::new();
    for p in small_primes(bound) {
        match ring {
            Ring::Integers => out.push(PrimeIdeal::trusted(RingElement::integer(p))),
            Ring::Gaussian => {
                if p % 4 == 3 {
                    if p.saturating_mul(p) <= bound {
                        out.push(PrimeIdeal::trusted(RingElement::gaussian(p, 0)));
                    }
                } else {
                    for g in gaussian_primes_over(&BigUint::from(p)) {
                        out.push(PrimeIdeal::trusted(g));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn small_primes(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = alloc::vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &p)| p).map(|(k, _)| k as u64).collect()
}

/// A square root of −1 modulo a prime `p ≡ 1 (mod 4)`.
///
/// Scans residues `a = 2, 3, …` and returns `a^((p−1)/4)` for the first quadratic
/// non-residue `a`; half of all residues qualify.
fn sqrt_minus_one_mod(p: &BigUint) -> BigUint {
    let exp = (p - 1u32) >> 2;
    let minus_one = p - 1u32;
    let mut a = BigUint::from(2u32);
    loop {
        let t = a.modpow(&exp, p);
        if (&t * &t) % p == minus_one {
            return t;
        }
        a += 1u32;
    }
}

const MR_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin with the first twelve prime bases (deterministic below 3.3·10²⁴).
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &b in &MR_BASES {
        let b = BigUint::from(b);
        if *n == b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &b in &MR_BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factorization of a positive integer into `(prime, exponent)` pairs, ascending.
pub fn factor_biguint(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut primes = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return Vec::new();
    }
    let mut p = 2u32;
    while p < 10_000 {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            primes.push(bp.clone());
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_large(rest, &mut primes);
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

fn split_large(n: BigUint, primes: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        primes.push(n);
        return;
    }
    let d = pollard_brent(&n);
    let other = &n / &d;
    split_large(d, primes);
    split_large(other, primes);
}

/// Brent's variant of Pollard's rho; `n` must be composite and odd-free of small factors.
fn pollard_brent(n: &BigUint) -> BigUint {
    if (n % 2u32).is_zero() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m: u64 = 64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn z(v: i64) -> RingElement {
        RingElement::integer(v)
    }

    fn g(a: i64, b: i64) -> RingElement {
        RingElement::gaussian(a, b)
    }

    #[test]
    fn norms() {
        assert_eq!(z(-6).norm(), BigUint::from(6u32));
        assert_eq!(g(1, 2).norm(), BigUint::from(5u32));
        assert_eq!(g(0, 1).norm(), BigUint::one());
        assert!(z(0).norm().is_zero());
    }

    #[test]
    fn ceilings() {
        assert_eq!(z(-3).ceil(), 3.0);
        assert_eq!(g(3, 4).ceil(), 5.0);
        assert_eq!(z(0).ceil(), 0.0);
    }

    #[test]
    fn gcds() {
        assert_eq!(gcd(&z(12), &z(18)), z(6));
        assert_eq!(gcd(&g(1, 1), &g(2, 0)), g(1, 1));
        assert_eq!(gcd(&z(0), &z(-7)), z(7));
        assert_eq!(gcd(&z(0), &z(0)), z(0));
        assert_eq!(try_gcd(&z(1), &g(1, 0)), Err(Error::RingMismatch(Ring::Integers, Ring::Gaussian)));
    }

    #[test]
    fn extended_gcd_is_bezout() {
        let (x, y) = (g(7, 3), g(-4, 5));
        let (d, s, t) = extended_gcd(&x, &y);
        assert_eq!(&(&s * &x) + &(&t * &y), d);
        assert_eq!(d, gcd(&x, &y));
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(z(-5).canonical_associate(), z(5));
        assert_eq!(g(-1, 1).canonical_associate(), g(1, 1));
        assert_eq!(g(0, 1).canonical_associate(), g(1, 0));
        assert_eq!(g(0, -3).canonical_associate(), g(3, 0));
    }

    #[test]
    fn factorizations() {
        let f = factor_ideal(&z(12)).unwrap();
        assert_eq!(f.iter().map(|(p, e)| (p.generator().clone(), *e)).collect::<Vec<_>>(), vec![(z(2), 2), (z(3), 1)]);
        let f = factor_ideal(&g(5, 0)).unwrap();
        let gens: Vec<_> = f.iter().map(|(p, e)| (p.generator().clone(), *e)).collect();
        // 2−i is canonically 1+2i (multiply by i)
        assert_eq!(gens, vec![(g(1, 2), 1), (g(2, 1), 1)]);
        assert_eq!(g(2, -1).canonical_associate(), g(1, 2));
        let f = factor_ideal(&g(1, 1)).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].1, 1);
        assert_eq!(factor_ideal(&z(0)), Err(Error::ZeroIdeal));
        assert!(factor_ideal(&z(-1)).unwrap().is_empty());
    }

    #[test]
    fn large_factorization_uses_rho() {
        let p = BigUint::from(1_000_000_007u64);
        let q = BigUint::from(998_244_353u64);
        let n = &p * &q;
        assert_eq!(factor_biguint(&n), vec![(q, 1), (p, 1)]);
    }

    #[test]
    fn valuations() {
        let two = PrimeIdeal::new(&z(2)).unwrap();
        assert_eq!(valuation(&z(12), &two), Valuation::Finite(2));
        let ramified = PrimeIdeal::new(&g(1, 1)).unwrap();
        assert_eq!(valuation(&g(2, 0), &ramified), Valuation::Finite(2));
        assert_eq!(valuation(&z(0), &two), Valuation::Infinite);
        assert!(PrimeIdeal::new(&z(6)).is_err());
        assert!(PrimeIdeal::new(&g(3, 0)).is_ok());
        assert!(PrimeIdeal::new(&g(5, 0)).is_err());
    }

    #[test]
    fn display_and_parse() {
        for (s, x) in [("3+4i", g(3, 4)), ("-2", z(-2)), ("0", z(0)), ("1-i", g(1, -1)), ("-i", g(0, -1)), ("2i", g(0, 2))] {
            assert_eq!(s.parse::<RingElement>().unwrap(), x);
            assert_eq!(x.to_string(), s);
        }
        assert_eq!("1+1i".parse::<RingElement>().unwrap(), g(1, 1));
        assert!("3+".parse::<RingElement>().is_err());
        assert!(RingElement::parse_in("1+i", Ring::Integers).is_err());
        assert_eq!(RingElement::parse_in("7", Ring::Gaussian).unwrap(), g(7, 0));
    }

    #[test]
    fn small_prime_lists() {
        let zi: Vec<_> = primes_up_to_norm(Ring::Gaussian, 10).iter().map(|p| p.generator().clone()).collect();
        assert_eq!(zi, vec![g(1, 1), g(1, 2), g(2, 1), g(3, 0)]);
        assert_eq!(primes_up_to_norm(Ring::Integers, 10).len(), 4);
    }
}
