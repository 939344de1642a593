//! Spectral measures of `φ^{aa*}` on samples, exact moments, and the group-side moments.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{input, Error, Result};
use crate::group::{GroupElement, GroupSpec, SoficSample};
use crate::group_ring::{element_stats, operator_matrix, GroupRingElement};
use crate::linalg::{char_poly, rank_over_fraction_field, real_embedding, ExactMatrix};
use crate::ring::{Ring, RingElement};

/// Largest power expanded by [`group_moment`].
pub const GROUP_MOMENT_MAX_POWER: u32 = 12;
/// Largest number of group elements tracked during the expansion.
pub const GROUP_MOMENT_TERM_LIMIT: usize = 200_000;
/// Slack for the zero-mass bound comparison.
pub const LUCK_SLACK: f64 = 1e-12;

/// Spectrum and exact invariants of `B = φ^{aa*}_X`.
#[derive(Clone, Debug)]
pub struct SpectralSummary {
    pub size: usize,
    /// Ascending eigenvalues of `B`, one per point.
    pub eigenvalues: Vec<f64>,
    /// `dim ker B`, from the exact rank.
    pub kernel_dim: usize,
    /// `m_l = tr(B^l) / |X|` for `l = 0..=L`.
    pub moments: Vec<BigRational>,
    /// `S(b)·|b|` with `b = aa*`.
    pub c_bound: f64,
    /// Product of the nonzero eigenvalues, exactly.
    pub spectral_det_plus: BigInt,
    /// Eigenvalues came from the real `2k×2k` embedding with multiplicities halved.
    pub via_real_embedding: bool,
}

impl SpectralSummary {
    /// `μ({0}) = dim ker B / |X|`.
    pub fn mu_zero(&self) -> BigRational {
        BigRational::new(BigInt::from(self.kernel_dim), BigInt::from(self.size))
    }
}

/// `B = φ^{aa*}_X`.
pub fn positive_operator(a: &GroupRingElement, x: &SoficSample) -> Result<ExactMatrix> {
    operator_matrix(&a.times_adjoint(), x)
}

/// Builds `B = φ^{aa*}_X` and summarizes its spectrum with `moment_count + 1` exact moments.
pub fn spectral_summary(a: &GroupRingElement, x: &SoficSample, moment_count: u32) -> Result<SpectralSummary> {
    let b = a.times_adjoint();
    let matrix = operator_matrix(&b, x)?;
    let stats = element_stats(&b);
    let c_bound = stats.support as f64 * stats.abs_sum;
    summarize_matrix(&matrix, moment_count, c_bound)
}

/// Spectral data of a Hermitian integral matrix.
pub fn summarize_matrix(matrix: &ExactMatrix, moment_count: u32, c_bound: f64) -> Result<SpectralSummary> {
    if !matrix.is_square() {
        return input("spectral summary needs a square matrix");
    }
    let size = matrix.rows();
    if size == 0 {
        return input("spectral summary of an empty sample");
    }
    let via_real_embedding = matrix.ring() == Ring::Gaussian;
    let eigenvalues = eigenvalues(matrix);
    let kernel_dim = size - rank_over_fraction_field(matrix);
    let moments = exact_moments(matrix, moment_count)?;
    let spectral_det_plus = spectral_det_plus(matrix)?;
    Ok(SpectralSummary { size, eigenvalues, kernel_dim, moments, c_bound, spectral_det_plus, via_real_embedding })
}

/// Ascending eigenvalues of a Hermitian matrix; Gaussian input goes through the real embedding.
pub fn eigenvalues(matrix: &ExactMatrix) -> Vec<f64> {
    let real = match matrix.ring() {
        Ring::Integers => matrix.clone(),
        Ring::Gaussian => real_embedding(matrix),
    };
    let n = real.rows();
    let dense = DMatrix::from_fn(n, n, |i, j| real.get(i, j).re().to_f64().unwrap_or(f64::NAN));
    let mut values: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    if matrix.ring() == Ring::Gaussian {
        // each eigenvalue of the Hermitian matrix appears twice in the embedding
        values = values.into_iter().step_by(2).collect();
    }
    values
}

/// `tr(B^l)/|X|` for `l = 0..=count`, exactly.
pub fn exact_moments(matrix: &ExactMatrix, count: u32) -> Result<Vec<BigRational>> {
    let size = BigInt::from(matrix.rows());
    let real_trace = |m: &ExactMatrix| -> Result<BigInt> {
        let t = m.trace();
        if !t.im().is_zero() {
            return Err(Error::Precondition("trace of a power is not real; the matrix is not Hermitian".into()));
        }
        Ok(t.re().clone())
    };
    let mut out = alloc::vec![BigRational::from_integer(1.into())];
    let mut power = matrix.clone();
    for l in 1..=count {
        if l > 1 {
            power = power.try_mul(matrix)?;
        }
        out.push(BigRational::new(real_trace(&power)?, size.clone()));
    }
    Ok(out)
}

/// Product of the nonzero eigenvalues of a Hermitian integral matrix, via the
/// lowest nonzero coefficient of the characteristic polynomial.
pub fn spectral_det_plus(b: &ExactMatrix) -> Result<BigInt> {
    if !b.is_square() {
        return input("spectral det+ of a non-square matrix");
    }
    match b.ring() {
        Ring::Integers => Ok(lowest_nonzero(&char_poly(b)?)),
        Ring::Gaussian => {
            // the embedding's characteristic polynomial is the square of the Hermitian one
            let sq = lowest_nonzero(&char_poly(&real_embedding(b))?);
            let root = sq.sqrt();
            if &root * &root != sq {
                return Err(Error::Precondition("embedded determinant is not a square; matrix is not Hermitian".into()));
            }
            Ok(root)
        }
    }
}

fn lowest_nonzero(poly: &[BigInt]) -> BigInt {
    poly.iter().find(|c| !c.is_zero()).map(|c| c.abs()).unwrap_or_else(|| BigInt::from(1))
}

/// The identity coefficient of `(aa*)^l`, expanded inside `G` itself.
pub fn group_moment(group: &GroupSpec, a: &GroupRingElement, l: u32) -> Result<BigRational> {
    if l > GROUP_MOMENT_MAX_POWER {
        return Err(Error::Size(alloc::format!("group moments are expanded up to power {GROUP_MOMENT_MAX_POWER}")));
    }
    let b = a.times_adjoint();
    let ring = a.ring();
    let mut steps: Vec<(Vec<(usize, i8)>, RingElement)> = Vec::new();
    for (w, c) in b.terms() {
        group.evaluate(w)?;
        steps.push((w.letters().to_vec(), c.clone()));
    }
    let mut state: BTreeMap<GroupElement, RingElement> = BTreeMap::new();
    state.insert(GroupElement::identity(group), RingElement::one(ring));
    for _ in 0..l {
        let mut next: BTreeMap<GroupElement, RingElement> = BTreeMap::new();
        for (g, c) in &state {
            for (letters, d) in &steps {
                let mut h = g.clone();
                for &(gen, e) in letters {
                    h.mul_generator(gen, e);
                }
                let slot = next.entry(h).or_insert_with(|| RingElement::zero(ring));
                *slot = &*slot + &(c * d);
            }
        }
        next.retain(|_, c| !c.is_zero());
        if next.len() > GROUP_MOMENT_TERM_LIMIT {
            return Err(Error::Size(alloc::format!(
                "expansion of (aa*)^{l} exceeds {GROUP_MOMENT_TERM_LIMIT} group elements"
            )));
        }
        state = next;
    }
    let coeff = state.get(&GroupElement::identity(group)).cloned().unwrap_or_else(|| RingElement::zero(ring));
    if !coeff.im().is_zero() {
        return Err(Error::Precondition("identity coefficient of a Hermitian power is not real".into()));
    }
    Ok(BigRational::from_integer(coeff.re().clone()))
}

/// `|tr(B^l)/|X| − group_moment(l)|`.
pub fn moment_gap(group: &GroupSpec, a: &GroupRingElement, x: &SoficSample, l: u32) -> Result<BigRational> {
    let b = positive_operator(a, x)?;
    let finite = exact_moments(&b, l)?.pop().expect("nonempty");
    Ok((finite - group_moment(group, a, l)?).abs())
}

/// Spectral mass in `(0, ε)` against `−log c / log ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct LuckAudit {
    pub epsilon: f64,
    pub gap_count: usize,
    pub gap_mass: BigRational,
    pub bound: f64,
    pub holds: bool,
}

/// Checks the zero-neighbourhood bound on a summary of an integral element.
///
/// The kernel is the `kernel_dim` eigenvalues of smallest magnitude; every other
/// eigenvalue below `ε` counts towards the gap.
pub fn luck_zero_bound_check(summary: &SpectralSummary, epsilon: f64) -> Result<LuckAudit> {
    if summary.via_real_embedding {
        return input("the zero-mass bound is checked for integer coefficients only");
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return input(alloc::format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    let mut by_magnitude = summary.eigenvalues.clone();
    by_magnitude.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let gap_count = by_magnitude[summary.kernel_dim..].iter().filter(|&&v| v < epsilon).count();
    let gap_mass = BigRational::new(BigInt::from(gap_count), BigInt::from(summary.size));
    let c = summary.c_bound;
    let bound = if c > 1.0 { -libm::log(c) / libm::log(epsilon) } else { 0.0 };
    let holds = gap_mass.to_f64().unwrap_or(f64::INFINITY) <= bound + LUCK_SLACK;
    Ok(LuckAudit { epsilon, gap_count, gap_mass, bound, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_sample, Family};
    use alloc::vec;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn z() -> GroupSpec {
        GroupSpec::free_abelian(1).unwrap()
    }

    fn el(s: &str) -> GroupRingElement {
        GroupRingElement::parse(s, Ring::Integers, &z()).unwrap()
    }

    fn torus(n: usize) -> SoficSample {
        build_sample(&z(), &Family::Torus(vec![n])).unwrap()
    }

    #[test]
    fn identity_element() {
        let s = spectral_summary(&el("1"), &torus(4), 3).unwrap();
        assert!(s.eigenvalues.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert_eq!(s.kernel_dim, 0);
        assert_eq!(s.moments, vec![q(1, 1); 4]);
        assert_eq!(s.spectral_det_plus, BigInt::from(1));
    }

    #[test]
    fn one_minus_t_on_two_points() {
        let s = spectral_summary(&el("1 - t"), &torus(2), 2).unwrap();
        assert!((s.eigenvalues[0]).abs() < 1e-12 && (s.eigenvalues[1] - 4.0).abs() < 1e-12);
        assert_eq!(s.mu_zero(), q(1, 2));
        assert_eq!(s.moments, vec![q(1, 1), q(2, 1), q(8, 1)]);
        assert_eq!(s.spectral_det_plus, BigInt::from(4));
        assert_eq!(moment_gap(&z(), &el("1 - t"), &torus(2), 2).unwrap(), q(2, 1));
        let audit = luck_zero_bound_check(&s, 0.5).unwrap();
        assert_eq!(audit.gap_count, 0);
        assert!(audit.holds);
    }

    #[test]
    fn zero_element() {
        let s = spectral_summary(&el("t - t"), &torus(3), 1).unwrap();
        assert_eq!(s.kernel_dim, 3);
        assert_eq!(s.spectral_det_plus, BigInt::from(1));
    }

    #[test]
    fn central_binomials() {
        let expected = [1, 2, 6, 20, 70, 252];
        for (l, &c) in expected.iter().enumerate() {
            assert_eq!(group_moment(&z(), &el("1 - t"), l as u32).unwrap(), q(c, 1));
        }
        assert_eq!(group_moment(&z(), &el("1"), 7).unwrap(), q(1, 1));
        assert!(group_moment(&z(), &el("1"), 13).is_err());
        for l in 0..4 {
            assert_eq!(moment_gap(&z(), &el("1 - t"), &torus(16), l).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn lamplighter_moments() {
        let l = GroupSpec::lamplighter();
        let a = GroupRingElement::parse("a + b", Ring::Integers, &l).unwrap();
        let x = build_sample(&l, &Family::WreathQuotient(5)).unwrap();
        // the sample is the group's quotient by a large cycle, so short loops agree
        for k in 0..4 {
            assert_eq!(moment_gap(&l, &a, &x, k).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn gaussian_summary() {
        let a = GroupRingElement::parse("(1+i) - t", Ring::Gaussian, &z()).unwrap();
        let x = torus(3);
        let s = spectral_summary(&a, &x, 2).unwrap();
        assert!(s.via_real_embedding);
        assert_eq!(s.eigenvalues.len(), 3);
        let trace: f64 = s.eigenvalues.iter().sum();
        assert!((trace - s.moments[1].to_f64().unwrap() * 3.0).abs() < 1e-8 * trace.abs().max(1.0));
        let product: f64 = s.eigenvalues.iter().filter(|v| v.abs() > 1e-9).product();
        assert!((product - s.spectral_det_plus.to_f64().unwrap()).abs() < 1e-6 * product);
        assert!(luck_zero_bound_check(&s, 0.1).is_err());
    }

    #[test]
    fn luck_on_long_cycle() {
        let s = spectral_summary(&el("1 - t"), &torus(64), 1).unwrap();
        assert_eq!(s.kernel_dim, 1);
        let audit = luck_zero_bound_check(&s, 0.01).unwrap();
        // 2 − 2cos(2πk/64) < 0.01 exactly for k = ±1 among the nonzero eigenvalues
        assert_eq!(audit.gap_count, 2);
        assert!(audit.holds);
        let audit = luck_zero_bound_check(&s, 0.5).unwrap();
        assert!(audit.gap_count > 0 && audit.holds);
        assert!(luck_zero_bound_check(&s, 1.5).is_err());
    }

    #[test]
    fn spectral_det_plus_examples() {
        assert_eq!(spectral_det_plus(&ExactMatrix::from_int_rows(&[&[2, -2], &[-2, 2]])).unwrap(), BigInt::from(4));
        assert_eq!(spectral_det_plus(&ExactMatrix::identity(Ring::Integers, 3)).unwrap(), BigInt::from(1));
        assert_eq!(spectral_det_plus(&ExactMatrix::zeros(Ring::Integers, 3, 3)).unwrap(), BigInt::from(1));
        assert_eq!(spectral_det_plus(&ExactMatrix::from_int_rows(&[&[1, 1], &[1, 1]])).unwrap(), BigInt::from(2));
    }
}
