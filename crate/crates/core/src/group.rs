//! Finitely generated groups, freely reduced words, and finite sofic samples.
//!
//! A sample is a finite set with one permutation per generator, i.e. an action of the
//! free group `F(S)`. Points act on the right: `x·(s₁s₂)` applies `s₁` first.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{input, Error, Result};

/// Upper limit on the number of reduced words enumerated for ball computations.
pub const WORD_ENUMERATION_LIMIT: u64 = 1_000_000;
/// Upper limit on sample sizes built here.
pub const SAMPLE_SIZE_LIMIT: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    FreeAbelian(usize),
    Lamplighter,
}

/// A concrete group `G = F(S)/N` with named generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    generators: Vec<String>,
}

impl GroupSpec {
    /// `ℤ^d` with generators `t` (d = 1) or `t1..td`.
    pub fn free_abelian(d: usize) -> Result<Self> {
        if d == 0 {
            return input("free abelian rank must be at least 1");
        }
        let generators = if d == 1 {
            alloc::vec!["t".to_string()]
        } else {
            (1..=d).map(|i| alloc::format!("t{i}")).collect()
        };
        Ok(GroupSpec { kind: GroupKind::FreeAbelian(d), generators })
    }

    /// The lamplighter group `ℤ/2 ≀ ℤ` with shift `a` and lamp `b`.
    pub fn lamplighter() -> Self {
        GroupSpec { kind: GroupKind::Lamplighter, generators: alloc::vec!["a".into(), "b".into()] }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, GroupKind::FreeAbelian(_))
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters.iter().find(|(g, _)| *g >= self.generators.len()) {
            Some((g, _)) => input(alloc::format!("generator index {g} is not in the group's {} generators", self.generators.len())),
            None => Ok(()),
        }
    }

    /// Normal form of the group element represented by `w`.
    pub fn evaluate(&self, w: &Word) -> Result<GroupElement> {
        self.check_word(w)?;
        let mut e = GroupElement::identity(self);
        for &(g, exp) in &w.letters {
            e.mul_generator(g, exp);
        }
        Ok(e)
    }
}

/// Whether `w` maps to the identity of `G`.
pub fn is_trivial_word(group: &GroupSpec, w: &Word) -> Result<bool> {
    Ok(group.evaluate(w)?.is_identity())
}

/// Normal forms: exponent vectors for `ℤ^d`; (lit lamps, cursor) for the lamplighter,
/// with `(f, p)·(g, q) = (f Δ (g + p), p + q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Abelian(Vec<i64>),
    Lamplighter { lamps: BTreeSet<i64>, position: i64 },
}

impl GroupElement {
    pub fn identity(group: &GroupSpec) -> Self {
        match group.kind {
            GroupKind::FreeAbelian(d) => GroupElement::Abelian(alloc::vec![0; d]),
            GroupKind::Lamplighter => GroupElement::Lamplighter { lamps: BTreeSet::new(), position: 0 },
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Abelian(v) => v.iter().all(|&x| x == 0),
            GroupElement::Lamplighter { lamps, position } => lamps.is_empty() && *position == 0,
        }
    }

    /// Right multiplication by a generator or its inverse.
    pub fn mul_generator(&mut self, g: usize, exp: i8) {
        match self {
            GroupElement::Abelian(v) => v[g] += i64::from(exp),
            GroupElement::Lamplighter { lamps, position } => {
                if g == 0 {
                    *position += i64::from(exp);
                } else if !lamps.remove(position) {
                    lamps.insert(*position);
                }
            }
        }
    }
}

/// A freely reduced word: letters are (generator index, exponent ±1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<(usize, i8)>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn generator(g: usize) -> Self {
        Word { letters: alloc::vec![(g, 1)] }
    }

    /// `g^k` for any integer `k`.
    pub fn power(g: usize, k: i64) -> Self {
        let e = if k < 0 { -1 } else { 1 };
        Word { letters: (0..k.unsigned_abs()).map(|_| (g, e)).collect() }
    }

    /// Builds a word from letters, freely reducing it. Exponents must be ±1.
    pub fn from_letters(letters: impl IntoIterator<Item = (usize, i8)>) -> Result<Self> {
        let mut w = Word::empty();
        for (g, e) in letters {
            if e != 1 && e != -1 {
                return input(alloc::format!("letter exponent must be ±1, got {e}"));
            }
            w.push(g, e);
        }
        Ok(w)
    }

    fn push(&mut self, g: usize, e: i8) {
        if self.letters.last() == Some(&(g, -e)) {
            self.letters.pop();
        } else {
            self.letters.push((g, e));
        }
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word { letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }

    /// Reduced concatenation.
    pub fn concat(&self, other: &Word) -> Self {
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        w
    }

    /// Parses `t1*t2^-1`, `t^3`, `1` (the empty word) against generator names.
    pub fn parse(s: &str, group: &GroupSpec) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::empty());
        }
        let mut w = Word::empty();
        for factor in s.split('*') {
            let factor = factor.trim();
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e.trim().trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| {
                        Error::Parse(alloc::format!("bad exponent in `{factor}`"))
                    })?;
                    (n.trim(), e)
                }
                None => (factor, 1),
            };
            let g = group
                .generator_index(name)
                .ok_or_else(|| Error::Input(alloc::format!("unknown generator `{name}`")))?;
            w = w.concat(&Word::power(g, exp));
        }
        Ok(w)
    }

    /// Renders with generator names, grouping runs into powers.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        WordDisplay { word: self, names }
    }
}

struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        let letters = &self.word.letters;
        let mut i = 0;
        let mut first = true;
        while i < letters.len() {
            let mut j = i;
            while j < letters.len() && letters[j] == letters[i] {
                j += 1;
            }
            let (g, e) = letters[i];
            let k = (j - i) as i64 * i64::from(e);
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let name = self.names.get(g).map_or("?", String::as_str);
            if k == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{k}")?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Sample families; see [`build_sample`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `ℤ/n₁ × … × ℤ/n_d` acted on by coordinate shifts.
    Torus(Vec<usize>),
    /// `(ℤ/2)^m ⋊ ℤ/m` acted on by right multiplication.
    WreathQuotient(usize),
    /// A base family with each generator rewired on an `ε`-fraction of the points.
    Perturbed { base: alloc::boxed::Box<Family>, epsilon: BigRational, seed: u64 },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Torus(ns) => {
                let dims: Vec<String> = ns.iter().map(ToString::to_string).collect();
                alloc::format!("torus({})", dims.join("x"))
            }
            Family::WreathQuotient(m) => alloc::format!("wreath({m})"),
            Family::Perturbed { base, epsilon, seed } => {
                alloc::format!("perturbed({},{epsilon},{seed})", base.label())
            }
        }
    }

    fn index_param(&self) -> Vec<u64> {
        match self {
            Family::Torus(ns) => ns.iter().map(|&n| n as u64).collect(),
            Family::WreathQuotient(m) => alloc::vec![*m as u64],
            Family::Perturbed { base, .. } => base.index_param(),
        }
    }
}

/// A finite `F(S)`-set: one permutation of `0..size` per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoficSample {
    size: usize,
    perms: Vec<Vec<usize>>,
    inverses: Vec<Vec<usize>>,
    family_label: String,
    index_param: Vec<u64>,
}

impl SoficSample {
    /// Validates that every generator map is a bijection of `0..size`.
    pub fn new(size: usize, perms: Vec<Vec<usize>>, family_label: impl Into<String>, index_param: Vec<u64>) -> Result<Self> {
        if size == 0 {
            return input("sample size must be positive");
        }
        let mut inverses = Vec::with_capacity(perms.len());
        for (g, p) in perms.iter().enumerate() {
            if p.len() != size {
                return input(alloc::format!("generator {g} maps {} points, expected {size}", p.len()));
            }
            let mut inv = alloc::vec![usize::MAX; size];
            for (x, &y) in p.iter().enumerate() {
                if y >= size || inv[y] != usize::MAX {
                    return input(alloc::format!("generator {g} is not a bijection"));
                }
                inv[y] = x;
            }
            inverses.push(inv);
        }
        Ok(SoficSample { size, perms, inverses, family_label: family_label.into(), index_param })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn generator_count(&self) -> usize {
        self.perms.len()
    }

    pub fn perm(&self, g: usize) -> &[usize] {
        &self.perms[g]
    }

    pub fn family_label(&self) -> &str {
        &self.family_label
    }

    pub fn index_param(&self) -> &[u64] {
        &self.index_param
    }

    /// `x·s^e` for a single letter; unchecked.
    #[inline]
    pub fn step(&self, x: usize, g: usize, e: i8) -> usize {
        if e > 0 {
            self.perms[g][x]
        } else {
            self.inverses[g][x]
        }
    }

    /// `x·w`; unchecked apart from debug assertions.
    pub fn act_unchecked(&self, x: usize, w: &Word) -> usize {
        w.letters.iter().fold(x, |p, &(g, e)| self.step(p, g, e))
    }
}

/// Evaluates the action `x·w`.
pub fn act(sample: &SoficSample, x: usize, w: &Word) -> Result<usize> {
    if x >= sample.size {
        return input(alloc::format!("point {x} outside a sample of size {}", sample.size));
    }
    if let Some((g, _)) = w.letters.iter().find(|(g, _)| *g >= sample.perms.len()) {
        return input(alloc::format!("generator index {g} not present in the sample"));
    }
    Ok(sample.act_unchecked(x, w))
}

/// Builds a sample of the given family for `group`.
pub fn build_sample(group: &GroupSpec, family: &Family) -> Result<SoficSample> {
    let label = family.label();
    let params = family.index_param();
    match (family, group.kind()) {
        (Family::Torus(ns), GroupKind::FreeAbelian(d)) => {
            if ns.len() != *d {
                return input(alloc::format!("torus has {} dimensions but the group has rank {d}", ns.len()));
            }
            if ns.contains(&0) {
                return input("torus side lengths must be positive");
            }
            let size = ns.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).filter(|&s| s <= SAMPLE_SIZE_LIMIT);
            let size = size.ok_or_else(|| Error::Size(alloc::format!("torus {label} exceeds {SAMPLE_SIZE_LIMIT} points")))?;
            // mixed radix, first coordinate fastest
            let mut perms = Vec::with_capacity(*d);
            let mut stride = 1;
            for &n in ns {
                let perm = (0..size)
                    .map(|x| {
                        let coord = (x / stride) % n;
                        if coord + 1 == n {
                            x - coord * stride
                        } else {
                            x + stride
                        }
                    })
                    .collect();
                perms.push(perm);
                stride *= n;
            }
            SoficSample::new(size, perms, label, params)
        }
        (Family::WreathQuotient(m), GroupKind::Lamplighter) => {
            let m = *m;
            if m == 0 {
                return input("wreath quotient needs m >= 1");
            }
            if m > 20 || (m << m) > SAMPLE_SIZE_LIMIT {
                return Err(Error::Size(alloc::format!("wreath quotient with m = {m} is too large")));
            }
            let lamps = 1usize << m;
            let size = lamps * m;
            // point = position·2^m + lamp mask
            let shift = (0..size).map(|x| ((x / lamps + 1) % m) * lamps + x % lamps).collect();
            let toggle = (0..size).map(|x| x ^ (1 << (x / lamps))).collect();
            SoficSample::new(size, alloc::vec![shift, toggle], label, params)
        }
        (Family::Perturbed { base, epsilon, seed }, _) => {
            if *epsilon < BigRational::zero() || *epsilon > BigRational::from_integer(1.into()) {
                return input("perturbation fraction must lie in [0, 1]");
            }
            let base_sample = build_sample(group, base)?;
            let size = base_sample.size;
            let k = perturbation_count(epsilon, size);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut perms = base_sample.perms.clone();
            for perm in &mut perms {
                if k < 2 {
                    continue;
                }
                let mut points: Vec<usize> = (0..size).collect();
                points.shuffle(&mut rng);
                let subset = &points[..k];
                // σ' = σ∘π with π cycling the chosen points, so exactly k images move
                let old: Vec<usize> = subset.iter().map(|&x| perm[x]).collect();
                for (j, &x) in subset.iter().enumerate() {
                    perm[x] = old[(j + 1) % k];
                }
            }
            SoficSample::new(size, perms, label, params)
        }
        _ => input(alloc::format!("family {label} does not match the group")),
    }
}

/// Number of rewired points per generator: `⌊ε·size⌋`, raised to 2 when it would be 1
/// (a single point cannot be moved by a permutation of itself).
pub fn perturbation_count(epsilon: &BigRational, size: usize) -> usize {
    let k = (epsilon * BigRational::from_integer(BigInt::from(size))).floor().to_integer();
    let k = k.to_usize().unwrap_or(size).min(size);
    if k == 1 && size >= 2 {
        2
    } else {
        k
    }
}

/// Number of reduced words of length ≤ r over `s` generators.
pub fn ball_size(s: usize, r: usize) -> u64 {
    if s == 0 {
        return 1;
    }
    let mut total: u64 = 1;
    let mut layer: u64 = 2 * s as u64;
    for _ in 0..r {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(2 * s as u64 - 1);
    }
    total
}

/// Indicator of `P_r(X)`: points whose `r`-ball matches the group, i.e. `x·w = x ⇔ w ∈ N`
/// for every reduced `w` with `|w| ≤ r`.
///
/// For `ℤ^d` acting through commuting permutations, `x·w` depends only on the exponent
/// vector of `w`, and every vector with `‖v‖₁ ≤ r` is the exponent vector of a reduced word
/// of length `≤ r`, so only those vectors are visited.
pub fn good_points(sample: &SoficSample, group: &GroupSpec, r: usize) -> Result<Vec<bool>> {
    if sample.generator_count() != group.generator_count() {
        return input("sample and group have different generator counts");
    }
    match group.kind() {
        GroupKind::FreeAbelian(d) if generators_commute(sample) => good_points_abelian(sample, *d, r),
        _ => good_points_by_words(sample, group, r),
    }
}

fn generators_commute(sample: &SoficSample) -> bool {
    let s = sample.generator_count();
    (0..s).all(|g| {
        (g + 1..s).all(|h| (0..sample.size).all(|x| sample.step(sample.step(x, g, 1), h, 1) == sample.step(sample.step(x, h, 1), g, 1)))
    })
}

/// `#{v ∈ ℤ^d : ‖v‖₁ ≤ r}`, saturating.
pub fn l1_ball_size(d: usize, r: usize) -> u64 {
    // count[k] = vectors in the current dimension with norm exactly k
    let mut count = alloc::vec![0u64; r + 1];
    count[0] = 1;
    for _ in 0..d {
        let mut next = alloc::vec![0u64; r + 1];
        for (k, &c) in count.iter().enumerate() {
            for (j, slot) in next.iter_mut().enumerate().skip(k) {
                let ways = if j == k { 1 } else { 2 };
                *slot = slot.saturating_add(c.saturating_mul(ways));
            }
        }
        count = next;
    }
    count.iter().fold(0u64, |a, &c| a.saturating_add(c))
}

fn good_points_abelian(sample: &SoficSample, d: usize, r: usize) -> Result<Vec<bool>> {
    let vectors = l1_ball_size(d, r);
    if vectors > WORD_ENUMERATION_LIMIT {
        return Err(Error::Size(alloc::format!(
            "l1 ball of radius {r} in dimension {d} has {vectors} vectors (limit {WORD_ENUMERATION_LIMIT})"
        )));
    }
    let mut good = alloc::vec![true; sample.size];
    let start: Vec<usize> = (0..sample.size).collect();
    // (images of x·v, next coordinate to vary, remaining budget, v ≠ 0)
    let mut stack = alloc::vec![(start, 0usize, r, false)];
    while let Some((images, coord, budget, nonzero)) = stack.pop() {
        if coord == d {
            if nonzero {
                for (x, &y) in images.iter().enumerate() {
                    if y == x {
                        good[x] = false;
                    }
                }
            }
            continue;
        }
        stack.push((images.clone(), coord + 1, budget, nonzero));
        for e in [1i8, -1] {
            let mut cur = images.clone();
            for k in 1..=budget {
                cur = cur.iter().map(|&y| sample.step(y, coord, e)).collect();
                stack.push((cur.clone(), coord + 1, budget - k, true));
            }
        }
    }
    Ok(good)
}

/// Images `x·w` of all points, the normal form of `w`, its last letter and its length.
type WordFrame = (Vec<usize>, GroupElement, Option<(usize, i8)>, usize);

fn good_points_by_words(sample: &SoficSample, group: &GroupSpec, r: usize) -> Result<Vec<bool>> {
    let s = group.generator_count();
    let words = ball_size(s, r);
    if words > WORD_ENUMERATION_LIMIT {
        return Err(Error::Size(alloc::format!(
            "ball of radius {r} has {words} words (limit {WORD_ENUMERATION_LIMIT})"
        )));
    }
    let mut good = alloc::vec![true; sample.size];
    let images: Vec<usize> = (0..sample.size).collect();
    // depth-first over reduced words, carrying x·w for every x and the normal form of w
    let mut stack: Vec<WordFrame> =
        alloc::vec![(images, GroupElement::identity(group), None, 0)];
    while let Some((images, elem, last, depth)) = stack.pop() {
        let trivial = elem.is_identity();
        for (x, &y) in images.iter().enumerate() {
            if (y == x) != trivial {
                good[x] = false;
            }
        }
        if depth == r {
            continue;
        }
        for g in 0..s {
            for e in [1i8, -1] {
                if last == Some((g, -e)) {
                    continue;
                }
                let next: Vec<usize> = images.iter().map(|&y| sample.step(y, g, e)).collect();
                let mut ne = elem.clone();
                ne.mul_generator(g, e);
                stack.push((next, ne, Some((g, e)), depth + 1));
            }
        }
    }
    Ok(good)
}

/// `|P_r(X)| / |X|`.
pub fn sofic_quality(sample: &SoficSample, group: &GroupSpec, r: usize) -> Result<BigRational> {
    let good = good_points(sample, group, r)?;
    let count = good.iter().filter(|&&g| g).count();
    Ok(BigRational::new(BigInt::from(count), BigInt::from(sample.size)))
}

/// `|∂_E F| / |F|` with `∂_E F = {g : (g + E) meets both F and its complement}`.
pub fn folner_boundary_ratio(f_set: &BTreeSet<Vec<i64>>, e: &BTreeSet<Vec<i64>>) -> Result<BigRational> {
    if f_set.is_empty() {
        return input("boundary ratio of an empty set");
    }
    let dim = f_set.iter().next().map_or(0, Vec::len);
    if f_set.iter().chain(e.iter()).any(|v| v.len() != dim) {
        return input("points have inconsistent dimensions");
    }
    let mut candidates = BTreeSet::new();
    for x in f_set {
        for y in e {
            candidates.insert(x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<i64>>());
        }
    }
    let boundary = candidates
        .iter()
        .filter(|g| {
            let mut inside = false;
            let mut outside = false;
            for y in e {
                let p: Vec<i64> = g.iter().zip(y).map(|(a, b)| a + b).collect();
                if f_set.contains(&p) {
                    inside = true;
                } else {
                    outside = true;
                }
            }
            inside && outside
        })
        .count();
    Ok(BigRational::new(BigInt::from(boundary), BigInt::from(f_set.len())))
}

/// `|{g ∈ X : g + F ⊆ X}| / |X|`.
pub fn invariance_fraction(x_set: &BTreeSet<Vec<i64>>, f: &BTreeSet<Vec<i64>>) -> Result<BigRational> {
    if x_set.is_empty() {
        return input("invariance fraction of an empty set");
    }
    let inner = x_set
        .iter()
        .filter(|g| {
            f.iter().all(|y| {
                let p: Vec<i64> = g.iter().zip(y).map(|(a, b)| a + b).collect();
                x_set.contains(&p)
            })
        })
        .count();
    Ok(BigRational::new(BigInt::from(inner), BigInt::from(x_set.len())))
}

/// Integer points of the box `[0, n₁) × … × [0, n_d)`.
pub fn box_set(sides: &[i64]) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    if sides.iter().any(|&n| n <= 0) {
        return out;
    }
    let mut p = alloc::vec![0i64; sides.len()];
    loop {
        out.insert(p.clone());
        let mut i = 0;
        loop {
            if i == sides.len() {
                return out;
            }
            p[i] += 1;
            if p[i] < sides[i] {
                break;
            }
            p[i] = 0;
            i += 1;
        }
    }
}
