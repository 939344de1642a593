//! Even coverings, ε-disjoint extraction, and quasitilings of samples by interval or box tiles.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{input, Error, Result};
use crate::group::{good_points, GroupKind, GroupSpec, SoficSample, Word};

fn rat(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A finite family of nonempty subsets of `0..ground_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    ground_size: usize,
    sets: Vec<Vec<usize>>,
}

impl Cover {
    /// Members are sorted and deduplicated; empty or out-of-range members are rejected.
    pub fn new(ground_size: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(sets.len());
        for (i, mut s) in sets.into_iter().enumerate() {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return input(alloc::format!("member {i} is empty"));
            }
            if s.last().is_some_and(|&x| x >= ground_size) {
                return input(alloc::format!("member {i} leaves the ground set of size {ground_size}"));
            }
            clean.push(s);
        }
        Ok(Cover { ground_size, sets: clean })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }
}

/// Largest multiplicity `M` and the best `λ` with `Σ|X_i| ≥ λ·M·|F|`.
pub fn even_covering_stats(cover: &Cover) -> Result<(usize, BigRational)> {
    if cover.sets.is_empty() || cover.ground_size == 0 {
        return input("even covering statistics need a nonempty cover of a nonempty set");
    }
    let mut counts = alloc::vec![0usize; cover.ground_size];
    let mut total = 0usize;
    for s in &cover.sets {
        total += s.len();
        for &x in s {
            counts[x] += 1;
        }
    }
    let multiplicity = counts.into_iter().max().unwrap_or(0);
    Ok((multiplicity, rat(total) / rat(multiplicity * cover.ground_size)))
}

fn check_even(cover: &Cover, lambda: &BigRational) -> Result<()> {
    if *lambda <= BigRational::zero() {
        return input("lambda must be positive");
    }
    let (_, best) = even_covering_stats(cover)?;
    if *lambda > best {
        return Err(Error::Precondition(alloc::format!("the cover is only {best}-even, not {lambda}-even")));
    }
    Ok(())
}

/// First index with `|X_i ∩ Y| / |X_i| ≤ |Y| / (λ|F|)`.
pub fn find_low_overlap_member(cover: &Cover, y: &[usize], lambda: &BigRational) -> Result<usize> {
    check_even(cover, lambda)?;
    let mut in_y = alloc::vec![false; cover.ground_size];
    for &p in y {
        if p >= cover.ground_size {
            return input(alloc::format!("point {p} is outside the ground set"));
        }
        in_y[p] = true;
    }
    let y_size = in_y.iter().filter(|&&b| b).count();
    let rhs = rat(y_size) / (lambda * rat(cover.ground_size));
    cover
        .sets
        .iter()
        .position(|s| {
            let overlap = s.iter().filter(|&&p| in_y[p]).count();
            rat(overlap) / rat(s.len()) <= rhs
        })
        .ok_or_else(|| Error::Precondition("no member satisfies the overlap inequality".into()))
}

/// Greedy ε-disjoint subfamily: members are admitted in index order when their overlap
/// with the union admitted so far is at most `ε` of their size.
pub fn extract_disjoint_subcover(cover: &Cover, epsilon: &BigRational, lambda: &BigRational) -> Result<Vec<usize>> {
    let half = BigRational::new(1.into(), 2.into());
    if *epsilon < BigRational::zero() || *epsilon > half {
        return input(alloc::format!("epsilon must lie in [0, 1/2], got {epsilon}"));
    }
    if *lambda > BigRational::one() {
        return input(alloc::format!("lambda must lie in (0, 1], got {lambda}"));
    }
    check_even(cover, lambda)?;
    let mut covered = alloc::vec![false; cover.ground_size];
    let mut chosen = Vec::new();
    for (i, s) in cover.sets.iter().enumerate() {
        let overlap = s.iter().filter(|&&p| covered[p]).count();
        if rat(overlap) <= epsilon * rat(s.len()) {
            chosen.push(i);
            for &p in s {
                covered[p] = true;
            }
        }
    }
    Ok(chosen)
}

/// Whether each listed member meets the union of the earlier ones in at most `ε` of itself.
pub fn greedy_disjointness_certificate(sets: &[&[usize]], epsilon: &BigRational) -> bool {
    let mut covered = BTreeMap::new();
    for s in sets {
        let overlap = s.iter().filter(|p| covered.contains_key(*p)).count();
        if rat(overlap) > epsilon * rat(s.len()) {
            return false;
        }
        for &p in *s {
            covered.insert(p, ());
        }
    }
    true
}

/// A finite subset of `ℤ^d` containing 0 in which every point reaches 0 by
/// repeatedly stepping its last nonzero coordinate towards 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    dim: usize,
    /// Offsets sorted by ℓ¹ norm; entry 0 is the origin.
    offsets: Vec<Vec<i64>>,
    /// For offsets past the origin: (parent index, generator, sign) with `v = parent + sign·e_gen`.
    steps: Vec<(usize, usize, i8)>,
    radius: usize,
}

impl Tile {
    pub fn from_offsets(dim: usize, offsets: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return input("tiles need a positive dimension");
        }
        let mut offsets = offsets;
        if offsets.iter().any(|v| v.len() != dim) {
            return input("tile offsets have inconsistent dimensions");
        }
        offsets.sort_by(|a, b| l1(a).cmp(&l1(b)).then_with(|| a.cmp(b)));
        offsets.dedup();
        if offsets.first().is_none_or(|v| v.iter().any(|&c| c != 0)) {
            return input("tiles must contain the origin");
        }
        let index: BTreeMap<&Vec<i64>, usize> = offsets.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut steps = Vec::with_capacity(offsets.len());
        steps.push((0, 0, 0));
        for v in offsets.iter().skip(1) {
            let g = v.iter().rposition(|&c| c != 0).expect("nonzero offset");
            let sign: i8 = if v[g] > 0 { 1 } else { -1 };
            let mut parent = v.clone();
            parent[g] -= i64::from(sign);
            let Some(&p) = index.get(&parent) else {
                return input("tile is not connected to the origin along coordinate paths");
            };
            steps.push((p, g, sign));
        }
        let radius = offsets.iter().map(|v| l1(v)).max().unwrap_or(0) as usize;
        Ok(Tile { dim, offsets, steps, radius })
    }

    /// `{−⌊(L−1)/2⌋, …, ⌈(L−1)/2⌉} ⊂ ℤ`.
    pub fn interval(len: usize) -> Result<Self> {
        Self::boxed(&[len])
    }

    /// Product of centered intervals.
    pub fn boxed(sides: &[usize]) -> Result<Self> {
        if sides.is_empty() || sides.contains(&0) {
            return input("box sides must be positive");
        }
        let mut offsets = alloc::vec![Vec::new()];
        for &s in sides {
            let lo = -(((s - 1) / 2) as i64);
            let mut next = Vec::with_capacity(offsets.len() * s);
            for v in &offsets {
                for k in 0..s as i64 {
                    let mut w: Vec<i64> = v.clone();
                    w.push(lo + k);
                    next.push(w);
                }
            }
            offsets = next;
        }
        Self::from_offsets(sides.len(), offsets)
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    /// `t_1^{v_1} ⋯ t_d^{v_d}`.
    pub fn word_for(&self, v: &[i64]) -> Word {
        v.iter().enumerate().fold(Word::empty(), |w, (g, &k)| w.concat(&Word::power(g, k)))
    }

    /// `φ_x(T)` along the parent chain.
    fn image(&self, sample: &SoficSample, x: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.offsets.len());
        out.push(x);
        for &(p, g, s) in &self.steps[1..] {
            out.push(sample.step(out[p], g, s));
        }
        out
    }
}

fn l1(v: &[i64]) -> u64 {
    v.iter().map(|c| c.unsigned_abs()).sum()
}

/// One pass of the construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub tile_index: usize,
    pub tile_len: usize,
    pub centers: Vec<usize>,
    pub placed_area: usize,
    pub cumulative_coverage: BigRational,
}

/// Placed tiles `⋃_k {φ_x(T_k) : x ∈ C_k}` with the stage log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileSystem {
    pub tiles: Vec<Tile>,
    pub stages: Vec<Stage>,
    pub epsilon: BigRational,
    /// `|Q_R(X)| / |X|` at the largest tile radius.
    pub quality: BigRational,
    pub warnings: Vec<String>,
}

impl TileSystem {
    /// Centers per tile, merged over stages.
    pub fn centers(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.tiles.len()];
        for s in &self.stages {
            out[s.tile_index].extend_from_slice(&s.centers);
        }
        out
    }
}

/// Smallest `m` with `(1 − ε/2)^m < ε`.
pub fn stage_count(epsilon: &BigRational) -> Result<usize> {
    if *epsilon <= BigRational::zero() || *epsilon >= BigRational::one() {
        return input(alloc::format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    let factor = BigRational::one() - epsilon / BigRational::from_integer(2.into());
    let mut power = BigRational::one();
    let mut m = 0;
    while power >= *epsilon {
        power *= &factor;
        m += 1;
    }
    Ok(m)
}

/// Smallest admissible ratio between consecutive tile radii.
pub const TILE_SCALE_RATIO: usize = 8;

/// Quasitiles `X` with the given tiles.
///
/// Stages run from the largest tile down, then repeat the smallest until the stage
/// count reaches `max(#tiles, m)` with `(1 − ε/2)^m < ε`. Centers are points of
/// `Q_R(X) = P_{2R+1}(X)` for the largest radius `R`, scanned in index order; a tile
/// is placed when it meets the union already placed in at most `ε` of itself.
pub fn quasitile_sample(sample: &SoficSample, group: &GroupSpec, tiles: &[Tile], epsilon: &BigRational) -> Result<TileSystem> {
    let GroupKind::FreeAbelian(d) = *group.kind() else {
        return input("interval and box tiles need a free abelian group");
    };
    if tiles.is_empty() {
        return input("at least one tile is required");
    }
    if tiles.iter().any(|t| t.dim != d) {
        return input(alloc::format!("tiles must live in dimension {d}"));
    }
    let m = stage_count(epsilon)?;
    let mut order: Vec<usize> = (0..tiles.len()).collect();
    order.sort_by(|&a, &b| tiles[b].len().cmp(&tiles[a].len()).then(a.cmp(&b)));
    let mut warnings = Vec::new();
    for pair in order.windows(2) {
        let (big, small) = (&tiles[pair[0]], &tiles[pair[1]]);
        if big.radius < TILE_SCALE_RATIO * small.radius.max(1) {
            warnings.push(alloc::format!(
                "tile radii {} and {} are closer than a factor {TILE_SCALE_RATIO}",
                big.radius, small.radius
            ));
        }
    }
    let r = tiles.iter().map(Tile::radius).max().unwrap_or(0);
    let good = good_points(sample, group, 2 * r + 1)?;
    let n = sample.size();
    let quality = BigRational::new(BigInt::from(good.iter().filter(|&&g| g).count()), BigInt::from(n));
    let required = BigRational::one() - epsilon / BigRational::from_integer(4.into());
    if quality <= required {
        return Err(Error::Quality {
            quality: quality.to_f64().unwrap_or(0.0),
            required: required.to_f64().unwrap_or(1.0),
        });
    }
    let mut covered = alloc::vec![false; n];
    let mut covered_count = 0usize;
    let mut stages = Vec::new();
    let smallest = *order.last().expect("nonempty");
    for s in 0..m.max(tiles.len()) {
        let tile_index = order.get(s).copied().unwrap_or(smallest);
        let tile = &tiles[tile_index];
        let mut centers = Vec::new();
        let mut placed_area = 0;
        let mut seen = alloc::vec![false; n];
        for x in (0..n).filter(|&x| good[x]) {
            let image = tile.image(sample, x);
            // injectivity guard, the good-point condition already implies it
            let mut distinct = true;
            for &p in &image {
                if seen[p] {
                    distinct = false;
                }
                seen[p] = true;
            }
            for &p in &image {
                seen[p] = false;
            }
            if !distinct {
                continue;
            }
            let overlap = image.iter().filter(|&&p| covered[p]).count();
            if rat(overlap) <= epsilon * rat(image.len()) {
                for &p in &image {
                    if !covered[p] {
                        covered[p] = true;
                        covered_count += 1;
                    }
                }
                centers.push(x);
                placed_area += image.len();
            }
        }
        stages.push(Stage {
            tile_index,
            tile_len: tile.len(),
            centers,
            placed_area,
            cumulative_coverage: BigRational::new(BigInt::from(covered_count), BigInt::from(n)),
        });
    }
    let coverage = BigRational::new(BigInt::from(covered_count), BigInt::from(n));
    let target = BigRational::one() - epsilon;
    if coverage < target {
        return Err(Error::Coverage {
            achieved: coverage.to_f64().unwrap_or(0.0),
            target: target.to_f64().unwrap_or(1.0),
        });
    }
    Ok(TileSystem { tiles: tiles.to_vec(), stages, epsilon: epsilon.clone(), quality, warnings })
}

/// Replays a tile system with explicit words: returns (ε-disjoint, coverage).
///
/// A placement fails the disjointness check if its image has fewer points than the tile
/// or meets the union of the earlier placements in more than `ε` of itself.
pub fn verify_quasitiling(ts: &TileSystem, sample: &SoficSample) -> (bool, BigRational) {
    let n = sample.size();
    let mut covered = alloc::vec![false; n];
    let mut count = 0usize;
    let mut disjoint = true;
    for stage in &ts.stages {
        let Some(tile) = ts.tiles.get(stage.tile_index) else {
            return (false, BigRational::zero());
        };
        for &x in &stage.centers {
            if x >= n {
                return (false, BigRational::zero());
            }
            let mut image: Vec<usize> = tile
                .offsets
                .iter()
                .map(|v| sample.act_unchecked(x, &tile.word_for(v)))
                .collect();
            image.sort_unstable();
            image.dedup();
            if image.len() != tile.len() {
                disjoint = false;
            }
            let overlap = image.iter().filter(|&&p| covered[p]).count();
            if rat(overlap) > &ts.epsilon * rat(tile.len()) {
                disjoint = false;
            }
            for p in image {
                if !covered[p] {
                    covered[p] = true;
                    count += 1;
                }
            }
        }
    }
    (disjoint, BigRational::new(BigInt::from(count), BigInt::from(n)))
}
