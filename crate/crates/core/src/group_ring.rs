//! Elements of `O[F(S)]` and the operators they induce on sofic samples.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{input, Error, Result};
use crate::group::{GroupSpec, SoficSample, Word};
use crate::linalg::{rank_over_fraction_field, ExactMatrix};
use crate::ring::{Ring, RingElement};

/// A finite sum `Σ a_w w` over freely reduced words with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    ring: Ring,
    terms: BTreeMap<Word, RingElement>,
}

/// Support size `S(a)`, `|a| = Σ|a_w|` and `⌈a⌉ = Σ⌈a_w⌉`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementStats {
    pub support: usize,
    pub abs_sum: f64,
    pub ceil_sum: f64,
}

impl GroupRingElement {
    pub fn zero(ring: Ring) -> Self {
        GroupRingElement { ring, terms: BTreeMap::new() }
    }

    pub fn constant(c: RingElement) -> Self {
        Self::monomial(Word::empty(), c)
    }

    pub fn monomial(w: Word, c: RingElement) -> Self {
        let mut a = Self::zero(c.ring());
        a.add_term(w, c);
        a
    }

    /// Sums the given terms; words are reduced, coefficients must share `ring`.
    pub fn from_terms(ring: Ring, terms: impl IntoIterator<Item = (Word, RingElement)>) -> Result<Self> {
        let mut a = Self::zero(ring);
        for (w, c) in terms {
            if c.ring() != ring {
                return Err(Error::RingMismatch(ring, c.ring()));
            }
            a.add_term(w, c);
        }
        Ok(a)
    }

    /// Builds from `(generator name, exponent)` lists with coefficient strings,
    /// e.g. `[("t", 1)], "-1"`. An empty name or exponent 0 contributes nothing.
    pub fn from_named_terms<'a>(
        ring: Ring,
        group: &GroupSpec,
        terms: impl IntoIterator<Item = (Vec<(&'a str, i64)>, &'a str)>,
    ) -> Result<Self> {
        let mut a = Self::zero(ring);
        for (letters, coeff) in terms {
            let mut w = Word::empty();
            for (name, exp) in letters {
                if name.is_empty() || exp == 0 {
                    continue;
                }
                let g = group
                    .generator_index(name)
                    .ok_or_else(|| Error::Input(alloc::format!("unknown generator `{name}`")))?;
                w = w.concat(&Word::power(g, exp));
            }
            a.add_term(w, RingElement::parse_in(coeff, ring)?);
        }
        Ok(a)
    }

    /// Parses shorthand such as `2 - t - t^-1`, `3*t1*t2^-1` or `(1+2i)*t`.
    pub fn parse(s: &str, ring: Ring, group: &GroupSpec) -> Result<Self> {
        let mut a = Self::zero(ring);
        for (negative, term) in split_terms(s)? {
            let mut coeff = RingElement::one(ring);
            let mut w = Word::empty();
            for factor in term.split('*').map(str::trim) {
                if factor.is_empty() {
                    return Err(Error::Parse(alloc::format!("empty factor in `{term}`")));
                }
                let first = factor.chars().next().unwrap_or(' ');
                if factor.starts_with('(') && factor.ends_with(')') {
                    coeff = &coeff * &RingElement::parse_in(&factor[1..factor.len() - 1], ring)?;
                } else if first.is_ascii_digit() || factor == "i" {
                    coeff = &coeff * &RingElement::parse_in(factor, ring)?;
                } else {
                    w = w.concat(&Word::parse(factor, group)?);
                }
            }
            if negative {
                coeff = -coeff;
            }
            a.add_term(w, coeff);
        }
        Ok(a)
    }

    fn add_term(&mut self, w: Word, c: RingElement) {
        assert_eq!(c.ring(), self.ring, "coefficient ring differs from element ring");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&w) {
            Some(old) => {
                let sum = &old + &c;
                if !sum.is_zero() {
                    self.terms.insert(w, sum);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Word, RingElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> RingElement {
        self.terms.get(w).cloned().unwrap_or_else(|| RingElement::zero(self.ring))
    }

    /// Longest word in the support.
    pub fn max_word_length(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.terms.keys().flat_map(|w| w.letters().iter().map(|&(g, _)| g)).max()
    }

    /// `a* = Σ conj(a_w) w⁻¹`.
    pub fn adjoint(&self) -> Self {
        GroupRingElement {
            ring: self.ring,
            terms: self.terms.iter().map(|(w, c)| (w.inverse(), c.conj())).collect(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        let mut out = Self::zero(self.ring);
        for (w, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(w.concat(v), a * b);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&-RingElement::one(other.ring)))
    }

    pub fn scale(&self, c: &RingElement) -> Self {
        let mut out = Self::zero(self.ring);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    /// `b = a·a*`, the positive element behind the spectral measure.
    pub fn times_adjoint(&self) -> Self {
        self.try_mul(&self.adjoint()).expect("same ring")
    }

    pub fn stats(&self) -> ElementStats {
        element_stats(self)
    }

    /// Renders with generator names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        ElementDisplay { a: self, names }
    }
}

struct ElementDisplay<'a> {
    a: &'a GroupRingElement,
    names: &'a [String],
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a.is_zero() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.a.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let simple = c.im().sign() == num_bigint::Sign::NoSign;
            match (w.is_empty(), c.is_one()) {
                (true, _) if simple => write!(f, "{c}")?,
                (true, _) => write!(f, "({c})")?,
                (false, true) => write!(f, "{}", w.display_with(self.names))?,
                (false, false) if simple => write!(f, "{c}*{}", w.display_with(self.names))?,
                (false, false) => write!(f, "({c})*{}", w.display_with(self.names))?,
            }
        }
        Ok(())
    }
}

/// Splits shorthand into signed top-level terms; `^-` exponents and parentheses are respected.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(alloc::format!("unbalanced parentheses in `{s}`")));
        }
        if (ch == '+' || ch == '-') && depth == 0 && prev != Some('^') {
            if !current.is_empty() {
                out.push((negative, core::mem::take(&mut current)));
                negative = false;
            }
            if ch == '-' {
                negative = !negative;
            }
        } else {
            current.push(ch);
        }
        prev = Some(ch);
    }
    if depth != 0 {
        return Err(Error::Parse(alloc::format!("unbalanced parentheses in `{s}`")));
    }
    if current.is_empty() {
        return Err(Error::Parse(alloc::format!("missing term at the end of `{s}`")));
    }
    out.push((negative, current));
    Ok(out)
}

pub fn element_stats(a: &GroupRingElement) -> ElementStats {
    // for ℤ and ℤ[i] the complex absolute value coincides with the ceiling
    let abs_sum: f64 = a.terms.values().map(RingElement::ceil).sum();
    let ceil_sum = abs_sum;
    ElementStats { support: a.terms.len(), abs_sum, ceil_sum }
}

/// The `|X|×|X|` matrix of `x ↦ x·a`: entry `(i, j)` sums `a_w` over words with `i·w = j`.
pub fn operator_matrix(a: &GroupRingElement, x: &SoficSample) -> Result<ExactMatrix> {
    if let Some(g) = a.max_generator() {
        if g >= x.generator_count() {
            return input(alloc::format!(
                "element uses generator {g} but the sample has {} generators",
                x.generator_count()
            ));
        }
    }
    let n = x.size();
    let mut m = ExactMatrix::zeros(a.ring, n, n);
    for i in 0..n {
        for (w, c) in &a.terms {
            let j = x.act_unchecked(i, w);
            let v = m.get(i, j) + c;
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// `rank(φ^a_X) / |X|` over the fraction field.
pub fn rank_normalized(a: &GroupRingElement, x: &SoficSample) -> Result<BigRational> {
    let m = operator_matrix(a, x)?;
    let r = rank_over_fraction_field(&m);
    Ok(BigRational::new(BigInt::from(r), BigInt::from(x.size())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_sample, Family};
    use alloc::string::ToString;
    use alloc::vec;

    fn z() -> GroupSpec {
        GroupSpec::free_abelian(1).unwrap()
    }

    fn parse(s: &str) -> GroupRingElement {
        GroupRingElement::parse(s, Ring::Integers, &z()).unwrap()
    }

    #[test]
    fn parsing() {
        let a = parse("2 - t - t^-1");
        assert_eq!(a.terms().len(), 3);
        assert_eq!(a.coefficient(&Word::power(0, -1)), RingElement::integer(-1));
        assert_eq!(a.coefficient(&Word::empty()), RingElement::integer(2));
        let b = GroupRingElement::parse("(1+2i)*t - i", Ring::Gaussian, &z()).unwrap();
        assert_eq!(b.coefficient(&Word::generator(0)), RingElement::gaussian(1, 2));
        assert_eq!(b.coefficient(&Word::empty()), RingElement::gaussian(0, -1));
        let z2 = GroupSpec::free_abelian(2).unwrap();
        let c = GroupRingElement::parse("3*t1*t2^-1", Ring::Integers, &z2).unwrap();
        assert_eq!(c.terms().len(), 1);
        assert_eq!(parse("t - t"), GroupRingElement::zero(Ring::Integers));
        assert_eq!(parse("-1 + t"), parse("t - 1"));
        assert!(GroupRingElement::parse("2 -", Ring::Integers, &z()).is_err());
        assert!(GroupRingElement::parse("s", Ring::Integers, &z()).is_err());
        let named = GroupRingElement::from_named_terms(
            Ring::Integers,
            &z(),
            vec![(vec![("t", 1)], "-1"), (vec![("", 0)], "2"), (vec![("t", -1)], "-1")],
        )
        .unwrap();
        assert_eq!(named, a);
        assert_eq!(a.display_with(z().generators()).to_string(), "2 + -1*t^-1 + -1*t");
    }

    #[test]
    fn adjoint_and_products() {
        assert_eq!(parse("1 - t").adjoint(), parse("1 - t^-1"));
        assert_eq!(parse("2").adjoint(), parse("2"));
        let g = GroupRingElement::parse("(1+i)*t", Ring::Gaussian, &z()).unwrap();
        assert_eq!(g.adjoint(), GroupRingElement::parse("(1-i)*t^-1", Ring::Gaussian, &z()).unwrap());
        assert_eq!(parse("1 - t").try_mul(&parse("1 - t^-1")).unwrap(), parse("2 - t - t^-1"));
        assert_eq!(parse("t").try_mul(&parse("t^-1")).unwrap(), parse("1"));
        let a = parse("3 + t^2");
        assert_eq!(a.try_mul(&parse("1")).unwrap(), a);
        assert!(a.try_mul(&GroupRingElement::zero(Ring::Gaussian)).is_err());
    }

    #[test]
    fn stats() {
        let s = element_stats(&parse("2 - t - t^-1"));
        assert_eq!((s.support, s.abs_sum, s.ceil_sum), (3, 4.0, 4.0));
        let s = element_stats(&parse("5"));
        assert_eq!((s.support, s.abs_sum, s.ceil_sum), (1, 5.0, 5.0));
        let s = element_stats(&GroupRingElement::zero(Ring::Integers));
        assert_eq!((s.support, s.abs_sum, s.ceil_sum), (0, 0.0, 0.0));
    }

    #[test]
    fn operator_matrices() {
        let t3 = build_sample(&z(), &Family::Torus(vec![3])).unwrap();
        assert_eq!(operator_matrix(&parse("1"), &t3).unwrap(), ExactMatrix::identity(Ring::Integers, 3));
        assert_eq!(
            operator_matrix(&parse("t"), &t3).unwrap(),
            ExactMatrix::from_int_rows(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])
        );
        assert_eq!(
            operator_matrix(&parse("2 - t - t^-1"), &t3).unwrap(),
            ExactMatrix::from_int_rows(&[&[2, -1, -1], &[-1, 2, -1], &[-1, -1, 2]])
        );
        let z2 = GroupSpec::free_abelian(2).unwrap();
        let bad = GroupRingElement::parse("t2", Ring::Integers, &z2).unwrap();
        assert!(operator_matrix(&bad, &t3).is_err());
    }

    #[test]
    fn ranks() {
        let t4 = build_sample(&z(), &Family::Torus(vec![4])).unwrap();
        assert_eq!(rank_normalized(&parse("1"), &t4).unwrap(), BigRational::new(1.into(), 1.into()));
        assert_eq!(rank_normalized(&GroupRingElement::zero(Ring::Integers), &t4).unwrap(), BigRational::new(0.into(), 1.into()));
        assert_eq!(rank_normalized(&parse("1 - t"), &t4).unwrap(), BigRational::new(3.into(), 4.into()));
    }
}
