//! Ideal-valued measures attached to cokernels of operator matrices.
//!
//! Over a PID the cokernel of `x ↦ xA` on `O^k` splits as `(O/O)^s ⊕ O/I₁ ⊕ … ⊕ O/I_t ⊕ O^r`,
//! read off from the Smith divisors. The measure puts mass `1/k` on each summand's ideal.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{input, Error, Result};
use crate::group::SoficSample;
use crate::group_ring::{element_stats, operator_matrix, GroupRingElement};
use crate::linalg::{ceil_matrix, kernel_length_local, smith_diagonal, ExactMatrix};
use crate::ring::{factor_ideal, ln_biguint, primes_up_to_norm, valuation, PrimeIdeal, Ring, RingElement, Valuation};

/// Largest number of distinct primes handled by the interval recursion.
pub const INTERVAL_PRIME_LIMIT: usize = 4;
/// Relative slack for floating-point bound comparisons.
pub const BOUND_SLACK: f64 = 1e-9;
/// Absolute slack for the tail-mass comparison.
pub const TAIL_SLACK: f64 = 1e-12;
/// Largest prime ≤ 100, used in the default truncation level.
const DEFAULT_LAMBDA_PRIME: u64 = 97;
/// Prime lists beyond this norm bound are replaced by primes dividing the support.
const PRIME_LIST_LIMIT: u64 = 1_000_000;

/// An ideal of `O`: zero or principal with a canonical generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ideal {
    Zero,
    Principal(RingElement),
}

impl Ideal {
    /// The ideal generated by `x`.
    pub fn generated_by(x: &RingElement) -> Self {
        if x.is_zero() {
            Ideal::Zero
        } else {
            Ideal::Principal(x.canonical_associate())
        }
    }

    /// The unit ideal `O`.
    pub fn unit(ring: Ring) -> Self {
        Ideal::Principal(RingElement::one(ring))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Ideal::Zero)
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Ideal::Principal(g) if g.is_one())
    }

    pub fn generator(&self) -> Option<&RingElement> {
        match self {
            Ideal::Zero => None,
            Ideal::Principal(g) => Some(g),
        }
    }

    /// `N(I) = |O/I|`; `None` for the zero ideal.
    pub fn norm(&self) -> Option<BigUint> {
        self.generator().map(RingElement::norm)
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Ideal) -> bool {
        match (self, other) {
            (_, Ideal::Zero) => true,
            (Ideal::Zero, Ideal::Principal(_)) => false,
            (Ideal::Principal(g), Ideal::Principal(h)) => g.divides(h),
        }
    }

    pub fn valuation(&self, m: &PrimeIdeal) -> Valuation {
        match self {
            Ideal::Zero => Valuation::Infinite,
            Ideal::Principal(g) => valuation(g, m),
        }
    }

    /// Parses a ring-element string; `0` is the zero ideal.
    pub fn parse_in(s: &str, ring: Ring) -> Result<Self> {
        Ok(Self::generated_by(&RingElement::parse_in(s, ring)?))
    }
}

impl Ord for Ideal {
    /// Principal ideals by (norm, generator), the zero ideal last.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ideal::Zero, Ideal::Zero) => Ordering::Equal,
            (Ideal::Zero, _) => Ordering::Greater,
            (_, Ideal::Zero) => Ordering::Less,
            (Ideal::Principal(g), Ideal::Principal(h)) => g.norm().cmp(&h.norm()).then_with(|| g.cmp(h)),
        }
    }
}

impl PartialOrd for Ideal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ideal::Zero => f.write_str("0"),
            Ideal::Principal(g) => write!(f, "{g}"),
        }
    }
}

/// `(O/O)^s ⊕ O/I₁ ⊕ … ⊕ O/I_t ⊕ O^r` with `I₁ ⊇ I₂ ⊇ …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleDecomposition {
    pub ring: Ring,
    pub trivial_count: usize,
    /// Proper nonzero ideals, each generator dividing the next (repeats allowed).
    pub torsion_ideals: Vec<Ideal>,
    pub free_rank: usize,
    pub total: usize,
}

impl ModuleDecomposition {
    /// `|M_tors| = Π N(I_j)`.
    pub fn torsion_order(&self) -> BigUint {
        self.torsion_ideals.iter().filter_map(Ideal::norm).product()
    }

    /// `ln |M_tors|`, finite even when the order itself is astronomically large.
    pub fn ln_torsion_order(&self) -> f64 {
        self.torsion_ideals.iter().filter_map(Ideal::norm).map(|n| ln_biguint(&n)).sum()
    }
}

/// Cokernel decomposition of `x ↦ xA` from the Smith divisors of a square matrix.
pub fn decompose_cokernel(a: &ExactMatrix) -> Result<ModuleDecomposition> {
    if !a.is_square() {
        return input("cokernel decomposition needs a square matrix");
    }
    let diag = smith_diagonal(a);
    let trivial_count = diag.divisors.iter().filter(|d| d.is_unit()).count();
    let torsion_ideals = diag
        .divisors
        .iter()
        .filter(|d| !d.is_unit())
        .map(Ideal::generated_by)
        .collect();
    Ok(ModuleDecomposition { ring: a.ring(), trivial_count, torsion_ideals, free_rank: diag.free_count, total: a.rows() })
}

/// A probability measure on ideals with finitely many atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealMeasure {
    ring: Ring,
    masses: BTreeMap<Ideal, BigRational>,
    total_points: usize,
}

impl IdealMeasure {
    /// Builds from atom counts over `total_points`; counts must sum to the total.
    pub fn from_counts(ring: Ring, counts: impl IntoIterator<Item = (Ideal, usize)>, total_points: usize) -> Result<Self> {
        if total_points == 0 {
            return input("a measure needs at least one point");
        }
        let mut agg: BTreeMap<Ideal, usize> = BTreeMap::new();
        for (ideal, c) in counts {
            if let Some(g) = ideal.generator() {
                if g.ring() != ring {
                    return Err(Error::RingMismatch(ring, g.ring()));
                }
            }
            if c > 0 {
                *agg.entry(ideal).or_insert(0) += c;
            }
        }
        if agg.values().sum::<usize>() != total_points {
            return input("atom counts do not sum to the number of points");
        }
        let masses = agg
            .into_iter()
            .map(|(i, c)| (i, BigRational::new(BigInt::from(c), BigInt::from(total_points))))
            .collect();
        Ok(IdealMeasure { ring, masses, total_points })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn total_points(&self) -> usize {
        self.total_points
    }

    pub fn masses(&self) -> &BTreeMap<Ideal, BigRational> {
        &self.masses
    }

    pub fn mass(&self, ideal: &Ideal) -> BigRational {
        self.masses.get(ideal).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn zero_mass(&self) -> BigRational {
        self.mass(&Ideal::Zero)
    }

    pub fn unit_mass(&self) -> BigRational {
        self.mass(&Ideal::unit(self.ring))
    }

    /// Largest norm among nonzero ideals carrying mass.
    pub fn max_support_norm(&self) -> BigUint {
        self.masses.keys().filter_map(Ideal::norm).max().unwrap_or_else(BigUint::one)
    }

    /// Atoms other than the zero ideal and `O`, heaviest first (ties in ideal order).
    pub fn top_torsion(&self, count: usize) -> Vec<(Ideal, BigRational)> {
        let mut atoms: Vec<(Ideal, BigRational)> = self
            .masses
            .iter()
            .filter(|(i, _)| !i.is_zero() && !i.is_unit())
            .map(|(i, m)| (i.clone(), m.clone()))
            .collect();
        atoms.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        atoms.truncate(count);
        atoms
    }
}

pub fn measure_from_decomposition(dec: &ModuleDecomposition) -> Result<IdealMeasure> {
    if dec.trivial_count + dec.torsion_ideals.len() + dec.free_rank != dec.total {
        return input("decomposition counts do not add up to its total");
    }
    let counts = core::iter::once((Ideal::unit(dec.ring), dec.trivial_count))
        .chain(dec.torsion_ideals.iter().map(|i| (i.clone(), 1)))
        .chain(core::iter::once((Ideal::Zero, dec.free_rank)));
    IdealMeasure::from_counts(dec.ring, counts, dec.total)
}

/// Pushforward along `v_𝔪`; the zero ideal lands at `∞`.
pub fn localize_measure(nu: &IdealMeasure, m: &PrimeIdeal) -> Result<BTreeMap<Valuation, BigRational>> {
    if nu.ring != m.ring() {
        return Err(Error::RingMismatch(nu.ring, m.ring()));
    }
    let mut out: BTreeMap<Valuation, BigRational> = BTreeMap::new();
    for (ideal, mass) in &nu.masses {
        *out.entry(ideal.valuation(m)).or_insert_with(BigRational::zero) += mass;
    }
    Ok(out)
}

/// `ν([0, I])` where `[0, I] = {J : J ⊆ I}`.
pub fn interval_mass(nu: &IdealMeasure, ideal: &Ideal) -> Result<BigRational> {
    if ideal.is_zero() {
        return input("[0, 0] is the single zero ideal; read its mass directly");
    }
    let mut total = BigRational::zero();
    for (j, mass) in &nu.masses {
        if ideal.contains(j) {
            total += mass;
        }
    }
    Ok(total)
}

/// `Σ |ν₁({I}) − ν₂({I})|`.
pub fn measure_distance(a: &IdealMeasure, b: &IdealMeasure) -> Result<BigRational> {
    if a.ring != b.ring {
        return Err(Error::RingMismatch(a.ring, b.ring));
    }
    let keys: BTreeSet<&Ideal> = a.masses.keys().chain(b.masses.keys()).collect();
    let mut total = BigRational::zero();
    for k in keys {
        total += (a.mass(k) - b.mass(k)).abs();
    }
    Ok(total)
}

/// Norm of the torsion of the cokernel: product of norms of the nonunit nonzero divisors.
pub fn torsion_det_plus(a: &ExactMatrix) -> Result<BigUint> {
    Ok(decompose_cokernel(a)?.torsion_order())
}

/// Both sides of a length identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySides {
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl IdentitySides {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn residual(&self) -> BigRational {
        (&self.lhs - &self.rhs).abs()
    }
}

/// `det₊ ≤ ⌈·⌉^{k·deg}` audits, compared in log space.
#[derive(Clone, Debug, PartialEq)]
pub struct DetPlusAudit {
    pub det_plus: BigUint,
    pub ln_det_plus: f64,
    /// `ln(⌈a⌉^{|X|·deg})`.
    pub ln_bound: f64,
    pub holds: bool,
    /// `ln(⌈φ^a⌉^{|X|·deg})`, the matrix-level bound.
    pub ln_matrix_bound: f64,
    pub matrix_bound_holds: bool,
    pub matrix_ceiling: f64,
    pub element_ceiling: f64,
    /// `⌈φ^a⌉ ≤ ⌈a⌉`.
    pub ceiling_holds: bool,
}

/// Mass on proper nonzero ideals of norm above `λ`, against `1/log_c λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailAudit {
    pub lambda: f64,
    pub tail: BigRational,
    pub bound: f64,
    pub holds: bool,
}

fn slack_le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + BOUND_SLACK * rhs.abs().max(1.0)
}

/// The operator of `a` on a sample together with its cokernel data.
#[derive(Clone, Debug)]
pub struct OperatorAnalysis {
    element: GroupRingElement,
    matrix: ExactMatrix,
    decomposition: ModuleDecomposition,
    measure: IdealMeasure,
}

/// Builds `φ^a_X` and its measure `ν^a_X`.
pub fn analyze(a: &GroupRingElement, x: &SoficSample) -> Result<OperatorAnalysis> {
    let matrix = operator_matrix(a, x)?;
    let decomposition = decompose_cokernel(&matrix)?;
    let measure = measure_from_decomposition(&decomposition)?;
    Ok(OperatorAnalysis { element: a.clone(), matrix, decomposition, measure })
}

/// `ν^a_X`.
pub fn adelic_measure(a: &GroupRingElement, x: &SoficSample) -> Result<IdealMeasure> {
    Ok(analyze(a, x)?.measure)
}

impl OperatorAnalysis {
    pub fn element(&self) -> &GroupRingElement {
        &self.element
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn decomposition(&self) -> &ModuleDecomposition {
        &self.decomposition
    }

    pub fn measure(&self) -> &IdealMeasure {
        &self.measure
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    fn ring(&self) -> Ring {
        self.matrix.ring()
    }

    /// `c = ⌈a⌉^{deg}`.
    pub fn c_value(&self) -> f64 {
        libm::pow(element_stats(&self.element).ceil_sum, f64::from(self.ring().degree()))
    }

    fn check_ideal_ring(&self, ideal: &Ideal) -> Result<()> {
        match ideal.generator() {
            Some(g) if g.ring() != self.ring() => Err(Error::RingMismatch(self.ring(), g.ring())),
            _ => Ok(()),
        }
    }

    fn proper_factorization(&self, ideal: &Ideal) -> Result<Vec<(PrimeIdeal, u32)>> {
        self.check_ideal_ring(ideal)?;
        match ideal {
            Ideal::Zero => input("the zero ideal is not allowed here"),
            Ideal::Principal(g) if g.is_one() => input("the unit ideal is not allowed here"),
            Ideal::Principal(g) => factor_ideal(g),
        }
    }

    /// `L_{O/𝔪^i}(ker φ_{X,𝔪^i}) / |X|` by local elimination; zero for `i = 0`.
    pub fn normalized_kernel_length(&self, m: &PrimeIdeal, i: u32) -> Result<BigRational> {
        if i == 0 {
            return Ok(BigRational::zero());
        }
        let len = kernel_length_local(&self.matrix, m, i)?;
        Ok(BigRational::new(BigInt::from(len), BigInt::from(self.size())))
    }

    /// Left side: normalized kernel length over `O/I`, summed over the prime powers of `I`.
    /// Right side: `Σ_J ν({J}) Σ_𝔪 min(v_𝔪(I), v_𝔪(J))`.
    pub fn kernel_length_identity(&self, ideal: &Ideal) -> Result<IdentitySides> {
        let factors = self.proper_factorization(ideal)?;
        let mut lhs = BigRational::zero();
        for (m, e) in &factors {
            lhs += self.normalized_kernel_length(m, *e)?;
        }
        let mut rhs = BigRational::zero();
        for (j, mass) in &self.measure.masses {
            let weight: u32 = factors.iter().map(|(m, e)| j.valuation(m).min_with(*e)).sum();
            rhs += mass * BigRational::from_integer(BigInt::from(weight));
        }
        Ok(IdentitySides { lhs, rhs })
    }

    /// `ν([0, I])` from kernel lengths alone.
    ///
    /// For one prime, `ν([0, 𝔪^d]) = ℓ(d) − ℓ(d−1)` with `ℓ(d)` the normalized length over
    /// `O/𝔪^d`. The cokernel ideals form a chain, so each `{J : v_𝔪(J) ≥ d}` is an upper
    /// segment of it and their intersection has the smallest of the single-prime masses.
    pub fn interval_mass_via_lengths(&self, ideal: &Ideal) -> Result<BigRational> {
        let factors = self.proper_factorization(ideal)?;
        if factors.len() > INTERVAL_PRIME_LIMIT {
            return Err(Error::Size(alloc::format!(
                "interval recursion supports at most {INTERVAL_PRIME_LIMIT} distinct primes, got {}",
                factors.len()
            )));
        }
        let mut best: Option<BigRational> = None;
        for (m, d) in &factors {
            let diff = self.normalized_kernel_length(m, *d)? - self.normalized_kernel_length(m, d - 1)?;
            best = Some(match best {
                Some(b) if b <= diff => b,
                _ => diff,
            });
        }
        Ok(best.expect("proper ideals have a prime factor"))
    }

    /// Checks `ℓ(I) − ℓ(I') = Σ_i ν([0, 𝔪_i^{d_i}])` for `I = Π 𝔪_i^{d_i}`, `I' = Π 𝔪_i^{d_i − 1}`;
    /// the left side from kernel lengths, the right from the measure.
    pub fn length_difference_identity(&self, ideal: &Ideal) -> Result<IdentitySides> {
        let factors = self.proper_factorization(ideal)?;
        let mut lhs = BigRational::zero();
        let mut rhs = BigRational::zero();
        for (m, d) in &factors {
            lhs += self.normalized_kernel_length(m, *d)? - self.normalized_kernel_length(m, d - 1)?;
            rhs += interval_mass(&self.measure, &Ideal::Principal(m.generator().pow(*d)))?;
        }
        Ok(IdentitySides { lhs, rhs })
    }

    /// `ν({I}) = ν([0, I]) − ν(⋃_{N(𝔪I) ≤ λ} [0, 𝔪I])` by inclusion–exclusion.
    ///
    /// The zero ideal lies in every interval and cancels, so only nonzero atoms enter.
    /// `λ` defaults to `(max support norm)·97·N(I)`, which makes the result exact.
    /// When `c = ⌈a⌉^{deg} ≤ 1` the torsion is trivial and the direct mass is returned.
    pub fn pointwise_mass_via_intervals(&self, ideal: &Ideal, lambda: Option<f64>) -> Result<BigRational> {
        self.check_ideal_ring(ideal)?;
        let Ideal::Principal(g) = ideal else {
            return input("pointwise mass via intervals needs a nonzero ideal");
        };
        let c = self.c_value();
        if c <= 1.0 {
            return Ok(self.measure.mass(ideal));
        }
        let norm_i = g.norm();
        let max_norm = self.measure.max_support_norm();
        let lambda = match lambda {
            Some(l) if l > c => l,
            Some(l) => return input(alloc::format!("truncation level {l} must exceed c = {c}")),
            None => crate::ring::big_to_f64(&(&max_norm * BigUint::from(DEFAULT_LAMBDA_PRIME) * &norm_i)),
        };
        let nonzero: Vec<(&RingElement, &BigRational)> = self
            .measure
            .masses
            .iter()
            .filter_map(|(j, m)| j.generator().map(|h| (h, m)))
            .collect();
        let interval = |k: &RingElement| -> BigRational {
            nonzero.iter().filter(|(h, _)| k.divides(h)).map(|(_, m)| (*m).clone()).sum()
        };
        // primes with N(𝔪I) ≤ λ; only those with N(𝔪I) ≤ max norm can carry mass
        let limit = (lambda / crate::ring::big_to_f64(&norm_i)).min(crate::ring::big_to_f64(&max_norm));
        let primes = if limit < PRIME_LIST_LIMIT as f64 {
            primes_up_to_norm(self.ring(), limit.max(0.0) as u64)
        } else {
            let mut set = BTreeSet::new();
            for (h, _) in &nonzero {
                if let Some(q) = h.div_exact(g) {
                    if !q.is_unit() {
                        for (m, _) in factor_ideal(&q)? {
                            if crate::ring::big_to_f64(m.residue_norm()) <= limit {
                                set.insert(m);
                            }
                        }
                    }
                }
            }
            set.into_iter().collect()
        };
        let mut union = BigRational::zero();
        let mut stack: Vec<(usize, RingElement, bool)> = alloc::vec![(0, g.clone(), false)];
        while let Some((start, product, odd)) = stack.pop() {
            for (idx, m) in primes.iter().enumerate().skip(start) {
                let next = &product * m.generator();
                if next.norm() > max_norm {
                    // primes are sorted by norm, so every later extension is empty as well
                    break;
                }
                let mass = interval(&next);
                if mass.is_zero() {
                    continue;
                }
                if odd {
                    union -= &mass;
                } else {
                    union += &mass;
                }
                stack.push((idx + 1, next, !odd));
            }
        }
        Ok(interval(g) - union)
    }

    /// `det₊(φ^a) ≤ ⌈a⌉^{|X|·deg}`, `det₊(φ^a) ≤ ⌈φ^a⌉^{|X|·deg}` and `⌈φ^a⌉ ≤ ⌈a⌉`.
    pub fn detplus_bound_check(&self) -> Result<DetPlusAudit> {
        if self.element.is_zero() {
            return input("the det+ bound is vacuous for a = 0");
        }
        let deg = f64::from(self.ring().degree());
        let k = self.size() as f64;
        let element_ceiling = element_stats(&self.element).ceil_sum;
        let matrix_ceiling = ceil_matrix(&self.matrix);
        let det_plus = self.decomposition.torsion_order();
        let ln_det_plus = self.decomposition.ln_torsion_order();
        let ln_bound = k * deg * libm::log(element_ceiling);
        let ln_matrix_bound = k * deg * libm::log(matrix_ceiling);
        Ok(DetPlusAudit {
            det_plus,
            ln_det_plus,
            ln_bound,
            holds: slack_le(ln_det_plus, ln_bound),
            ln_matrix_bound,
            matrix_bound_holds: slack_le(ln_det_plus, ln_matrix_bound),
            matrix_ceiling,
            element_ceiling,
            ceiling_holds: slack_le(matrix_ceiling, element_ceiling),
        })
    }

    /// Tail mass above `λ` versus `1/log_c λ`.
    pub fn tail_mass_check(&self, lambda: f64) -> Result<TailAudit> {
        if lambda.is_nan() || lambda <= 1.0 {
            return input(alloc::format!("tail level must exceed 1, got {lambda}"));
        }
        let mut tail = BigRational::zero();
        for (j, mass) in &self.measure.masses {
            if let Some(n) = j.norm() {
                if !n.is_one() && n.to_f64().is_none_or(|v| v > lambda) {
                    tail += mass;
                }
            }
        }
        let c = self.c_value();
        let bound = if c > 1.0 { libm::log(c) / libm::log(lambda) } else { 0.0 };
        let holds = tail.to_f64().unwrap_or(f64::INFINITY) <= bound + TAIL_SLACK;
        Ok(TailAudit { lambda, tail, bound, holds })
    }
}

/// See [`OperatorAnalysis::kernel_length_identity`].
pub fn kernel_length_identity(a: &GroupRingElement, x: &SoficSample, ideal: &Ideal) -> Result<IdentitySides> {
    analyze(a, x)?.kernel_length_identity(ideal)
}

/// See [`OperatorAnalysis::interval_mass_via_lengths`].
pub fn interval_mass_via_lengths(a: &GroupRingElement, x: &SoficSample, ideal: &Ideal) -> Result<BigRational> {
    analyze(a, x)?.interval_mass_via_lengths(ideal)
}

/// See [`OperatorAnalysis::pointwise_mass_via_intervals`].
pub fn pointwise_mass_via_intervals(
    a: &GroupRingElement,
    x: &SoficSample,
    ideal: &Ideal,
    lambda: Option<f64>,
) -> Result<BigRational> {
    analyze(a, x)?.pointwise_mass_via_intervals(ideal, lambda)
}

/// See [`OperatorAnalysis::detplus_bound_check`].
pub fn detplus_bound_check(a: &GroupRingElement, x: &SoficSample) -> Result<DetPlusAudit> {
    analyze(a, x)?.detplus_bound_check()
}

/// See [`OperatorAnalysis::tail_mass_check`].
pub fn tail_mass_check(a: &GroupRingElement, x: &SoficSample, lambda: f64) -> Result<TailAudit> {
    analyze(a, x)?.tail_mass_check(lambda)
}
