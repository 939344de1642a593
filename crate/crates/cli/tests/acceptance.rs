//! Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.
//! Oracles are computed here, independently of the library routes they check.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use adelic_cli::{run_convergence, run_quasitile, run_spectral, ExperimentConfig};
use adelic_core::group::{build_sample, Family, GroupSpec, Word};
use adelic_core::group_ring::{operator_matrix, rank_normalized, GroupRingElement};
use adelic_core::linalg::{
    gcd_minor_divisors, is_unimodular, kernel_length_brute, kernel_length_mod_power, smith_normal_form, ExactMatrix,
};
use adelic_core::measure::{analyze, interval_mass, torsion_det_plus, Ideal};
use adelic_core::quasitile::{
    even_covering_stats, extract_disjoint_subcover, find_low_overlap_member, quasitile_sample, verify_quasitiling,
    Cover, Tile,
};
use adelic_core::ring::{gcd, PrimeIdeal};
use adelic_core::spectral::{exact_moments, group_moment, luck_zero_bound_check, positive_operator, spectral_summary};
use adelic_core::{Error, Rational, Ring, RingElement};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {id} [{name}]: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn parse_rational(cell: &str) -> Rational {
    let (n, d) = cell.split_once('/').unwrap_or((cell, "1"));
    Rational::new(n.parse::<BigInt>().unwrap(), d.parse::<BigInt>().unwrap())
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load_config(name: &str) -> ExperimentConfig {
    ExperimentConfig::parse(&std::fs::read_to_string(configs_dir().join(name)).unwrap()).unwrap()
}

/// Header-indexed view of CSV text.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Self {
        let mut lines = text.lines().map(|l| l.split(',').map(String::from).collect::<Vec<_>>());
        let header = lines.next().unwrap();
        Table { header, rows: lines.collect() }
    }

    fn get<'a>(&self, row: &'a [String], col: &str) -> &'a str {
        let k = self.header.iter().position(|h| h == col).unwrap_or_else(|| panic!("no column {col}"));
        &row[k]
    }

    fn find(&self, family: &str, n: usize) -> &[String] {
        self.rows.iter().find(|r| r[0] == family && r[1] == n.to_string()).unwrap()
    }
}

// ---- oracles ----

/// Cofactor expansion along the first row.
fn laplace_det(m: &[Vec<RingElement>], ring: Ring) -> RingElement {
    let n = m.len();
    if n == 0 {
        return RingElement::one(ring);
    }
    let mut total = RingElement::zero(ring);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<RingElement>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect()).collect();
        let term = &m[0][j] * &laplace_det(&minor, ring);
        total = if j % 2 == 0 { &total + &term } else { &total - &term };
    }
    total
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// gcd of all k×k minors, by cofactor expansion.
fn minors_gcd(a: &ExactMatrix, k: usize) -> RingElement {
    let ring = a.ring();
    let mut g = RingElement::zero(ring);
    for rows in combinations(a.rows(), k) {
        for cols in combinations(a.cols(), k) {
            let m: Vec<Vec<RingElement>> =
                rows.iter().map(|&i| cols.iter().map(|&j| a.get(i, j).clone()).collect()).collect();
            g = gcd(&g, &laplace_det(&m, ring));
        }
    }
    g
}

fn random_element(rng: &mut ChaCha8Rng, ring: Ring, max: i64) -> RingElement {
    match ring {
        Ring::Integers => RingElement::integer(rng.gen_range(-max..=max)),
        Ring::Gaussian => RingElement::gaussian(rng.gen_range(-max..=max), rng.gen_range(-max..=max)),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, ring: Ring, max_dim: usize) -> ExactMatrix {
    let (r, c) = (rng.gen_range(1..=max_dim), rng.gen_range(1..=max_dim));
    ExactMatrix::from_fn(ring, r, c, |_, _| random_element(rng, ring, 9))
}

fn random_group_element(rng: &mut ChaCha8Rng, ring: Ring, generators: usize, max_support: usize) -> GroupRingElement {
    loop {
        let mut a = GroupRingElement::zero(ring);
        for _ in 0..rng.gen_range(1..=max_support) {
            let mut w = Word::empty();
            for _ in 0..rng.gen_range(0..=3) {
                let g = rng.gen_range(0..generators);
                w = w.concat(&Word::power(g, rng.gen_range(-2..=2)));
            }
            let c = loop {
                let c = random_element(rng, ring, 4);
                if !c.is_zero() {
                    break c;
                }
            };
            a = a.try_add(&GroupRingElement::monomial(w, c)).unwrap();
        }
        if !a.is_zero() {
            return a;
        }
    }
}

/// `#{k : f(e^{2πik/n}) = 0}` for a Laurent polynomial `f` with integer coefficients.
fn circulant_kernel_dim(coeffs: &[(i64, i64)], n: usize) -> usize {
    (0..n)
        .filter(|&k| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for &(e, c) in coeffs {
                let theta = 2.0 * std::f64::consts::PI * (k as f64) * (e as f64) / n as f64;
                re += c as f64 * theta.cos();
                im += c as f64 * theta.sin();
            }
            re.hypot(im) < 1e-9
        })
        .count()
}

fn central_binomial(l: u64) -> BigInt {
    (1..=l).fold(BigInt::one(), |acc, k| acc * BigInt::from(l + k) / BigInt::from(k))
}

/// Whether disjoint `Y_i ⊆ X_i` with `|Y_i| ≥ (1 − ε)|X_i|` exist, by bipartite matching of
/// demand slots to points.
fn eps_disjoint_by_matching(sets: &[&Vec<usize>], ground: usize, eps: &Rational) -> bool {
    let mut slots: Vec<usize> = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let need = (Rational::one() - eps) * Rational::from_integer(BigInt::from(s.len()));
        let need: usize = need.ceil().to_integer().try_into().unwrap();
        slots.extend(std::iter::repeat_n(i, need));
    }
    let mut owner: Vec<Option<usize>> = vec![None; ground];
    fn augment(slot: usize, slots: &[usize], sets: &[&Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &p in sets[slots[slot]].iter() {
            if seen[p] {
                continue;
            }
            seen[p] = true;
            if owner[p].is_none() || augment(owner[p].unwrap(), slots, sets, owner, seen) {
                owner[p] = Some(slot);
                return true;
            }
        }
        false
    }
    (0..slots.len()).all(|s| augment(s, &slots, sets, &mut owner, &mut vec![false; ground]))
}

// ---- criteria ----

#[test]
fn criterion_1_snf_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    let mut count = 0;
    for (ring, n, dim) in [(Ring::Integers, 500, 6), (Ring::Gaussian, 200, 5)] {
        for _ in 0..n {
            let a = random_matrix(&mut rng, ring, dim);
            let s = smith_normal_form(&a);
            let ok = s.divisors == gcd_minor_divisors(&a).unwrap()
                && s.p.try_mul(&s.d).unwrap().try_mul(&s.q).unwrap() == a
                && is_unimodular(&s.p)
                && is_unimodular(&s.q);
            failures += usize::from(!ok);
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "smith form vs gcd of minors",
        failures == 0 && elapsed < Duration::from_secs(15),
        format!("{count} matrices, {failures} failures, {:.2}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_2_kernel_length_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let z = GroupSpec::free_abelian(1).unwrap();
    let (mut failures, mut brute_checked) = (0, 0);
    for inst in 0..200 {
        let ring = if inst % 4 == 3 { Ring::Gaussian } else { Ring::Integers };
        let a = random_group_element(&mut rng, ring, 1, 4);
        let x = build_sample(&z, &Family::Torus(vec![rng.gen_range(1..=12)])).unwrap();
        let mut primes = [2i64, 3, 5];
        primes.shuffle(&mut rng);
        let mut gen = RingElement::one(ring);
        for &p in primes.iter().take(rng.gen_range(1..=2)) {
            gen = &gen * &RingElement::from_int(ring, p).pow(rng.gen_range(1..=3));
        }
        let an = analyze(&a, &x).unwrap();
        let ideal = Ideal::generated_by(&gen);
        if !an.kernel_length_identity(&ideal).unwrap().holds() {
            failures += 1;
        }
        for (m, e) in adelic_core::ring::factor_ideal(&gen).unwrap() {
            let structural = kernel_length_mod_power(an.matrix(), &m, e).unwrap();
            match kernel_length_brute(an.matrix(), &m, e) {
                Ok(b) => {
                    brute_checked += 1;
                    failures += usize::from(b != structural);
                }
                Err(Error::Size(_)) => {}
                Err(e) => panic!("{e}"),
            }
            let pe = Ideal::generated_by(&m.generator().pow(e));
            if an.interval_mass_via_lengths(&pe).unwrap() != interval_mass(an.measure(), &pe).unwrap() {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        2,
        "kernel length identities",
        failures == 0 && brute_checked > 0 && elapsed < Duration::from_secs(60),
        format!("200 instances, {brute_checked} brute-force comparisons, {failures} failures, {:.2}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_3_det_plus_minors() {
    // torsion det+ is defined for square matrices: the square part of the criterion-1
    // corpus, plus a seeded batch of square matrices of every size
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut corpus = Vec::new();
    for (ring, n, dim) in [(Ring::Integers, 500, 6), (Ring::Gaussian, 200, 5)] {
        corpus.extend((0..n).map(|_| random_matrix(&mut rng, ring, dim)).filter(ExactMatrix::is_square));
    }
    let from_corpus = corpus.len();
    let mut extra = ChaCha8Rng::seed_from_u64(3);
    for k in 0..300 {
        let (ring, dim) = if k % 3 == 2 { (Ring::Gaussian, 1 + k % 5) } else { (Ring::Integers, 1 + k % 6) };
        let mut a = ExactMatrix::from_fn(ring, dim, dim, |_, _| random_element(&mut extra, ring, 9));
        if k % 4 == 0 && dim > 1 {
            // force rank deficiency
            for j in 0..dim {
                let v = a.get(0, j) * &RingElement::from_int(ring, 2);
                a.set(dim - 1, j, v);
            }
        }
        corpus.push(a);
    }
    let mut failures = 0;
    for a in &corpus {
        let rank = (1..=a.rows()).rev().find(|&k| !minors_gcd(a, k).is_zero()).unwrap_or(0);
        let expected = if rank == 0 { BigInt::one().magnitude().clone() } else { minors_gcd(a, rank).norm() };
        failures += usize::from(torsion_det_plus(a).unwrap() != expected);
    }
    report(
        3,
        "det+ as norm of the minor gcd",
        failures == 0,
        format!("{from_corpus} square matrices from criterion 1 and 300 more, {failures} failures"),
    );
}

#[test]
fn criterion_4_bound_audits() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut pairs, mut violations) = (0usize, 0usize);
    let groups = [
        (GroupSpec::free_abelian(1).unwrap(), "z"),
        (GroupSpec::free_abelian(2).unwrap(), "z2"),
        (GroupSpec::lamplighter(), "lamp"),
    ];
    for inst in 0..240 {
        let (group, tag) = &groups[inst % 3];
        let ring = if *tag != "lamp" && inst % 5 == 0 { Ring::Gaussian } else { Ring::Integers };
        let family = match *tag {
            "z" => Family::Torus(vec![rng.gen_range(1..=12)]),
            "z2" => Family::Torus(vec![rng.gen_range(1..=4), rng.gen_range(1..=4)]),
            _ => Family::WreathQuotient(rng.gen_range(1..=4)),
        };
        let family = if inst % 7 == 0 {
            Family::Perturbed { base: Box::new(family), epsilon: q(1, 4), seed: inst as u64 }
        } else {
            family
        };
        let x = build_sample(group, &family).unwrap();
        let a = random_group_element(&mut rng, ring, group.generator_count(), 4);
        let an = analyze(&a, &x).unwrap();
        let det = an.detplus_bound_check().unwrap();
        for ok in [det.holds, det.matrix_bound_holds, det.ceiling_holds] {
            pairs += 1;
            violations += usize::from(!ok);
        }
        for lambda in [10.0, 100.0] {
            pairs += 1;
            violations += usize::from(!an.tail_mass_check(lambda).unwrap().holds);
        }
        if ring == Ring::Integers {
            let s = spectral_summary(&a, &x, 1).unwrap();
            for eps in [0.5, 0.1, 0.01] {
                pairs += 1;
                violations += usize::from(!luck_zero_bound_check(&s, eps).unwrap().holds);
            }
        }
    }
    report(
        4,
        "det+, ceiling, tail and zero-mass bounds",
        violations == 0 && pairs >= 1000,
        format!("{pairs} instance-parameter pairs, {violations} violations"),
    );
}

#[test]
fn criterion_5_exact_rank_and_measure() {
    let z = GroupSpec::free_abelian(1).unwrap();
    let a = GroupRingElement::parse("1 - t", Ring::Integers, &z).unwrap();
    let mut failures = Vec::new();
    for n in [4usize, 8, 16, 64, 256] {
        let x = build_sample(&z, &Family::Torus(vec![n])).unwrap();
        let kernel = circulant_kernel_dim(&[(0, 1), (1, -1)], n) as i64;
        let (n_i, rank) = (n as i64, rank_normalized(&a, &x).unwrap());
        let nu_zero = analyze(&a, &x).unwrap().measure().zero_mass();
        if rank != q(n_i - kernel, n_i) || nu_zero != q(kernel, n_i) || kernel != 1 {
            failures.push(format!("n={n}: rank {rank}, nu0 {nu_zero}"));
        }
    }
    let b = GroupRingElement::parse("1 + t", Ring::Integers, &z).unwrap();
    let x5 = build_sample(&z, &Family::Torus(vec![5])).unwrap();
    let m = operator_matrix(&b, &x5).unwrap();
    // elementary divisors d_k = Δ_k / Δ_{k-1} from cofactor-expansion minors
    let deltas: Vec<RingElement> = (0..=5).map(|k| if k == 0 { RingElement::integer(1) } else { minors_gcd(&m, k) }).collect();
    let mut expected: std::collections::BTreeMap<String, Rational> = Default::default();
    for k in 1..=5 {
        let d = deltas[k].div_exact(&deltas[k - 1]).unwrap().canonical_associate();
        *expected.entry(d.to_string()).or_insert_with(Rational::zero) += q(1, 5);
    }
    let nu = analyze(&b, &x5).unwrap().measure().clone();
    let got: std::collections::BTreeMap<String, Rational> =
        nu.masses().iter().map(|(i, m)| (i.to_string(), m.clone())).collect();
    if got != expected || got.get("1") != Some(&q(4, 5)) || got.get("2") != Some(&q(1, 5)) {
        failures.push(format!("1+t on torus(5): {got:?} vs {expected:?}"));
    }
    report(5, "exact rank and measure values", failures.is_empty(), format!("failures: {failures:?}"));
}

#[test]
fn criterion_6_moment_identities() {
    let z = GroupSpec::free_abelian(1).unwrap();
    let a = GroupRingElement::parse("1 - t", Ring::Integers, &z).unwrap();
    let mut failures = Vec::new();
    for l in 0..=5u32 {
        let oracle = Rational::from_integer(central_binomial(u64::from(l)));
        if group_moment(&z, &a, l).unwrap() != oracle {
            failures.push(format!("group moment {l}"));
        }
    }
    for n in 1..=24usize {
        let x = build_sample(&z, &Family::Torus(vec![n])).unwrap();
        let moments = exact_moments(&positive_operator(&a, &x).unwrap(), 5).unwrap();
        for (l, m) in moments.iter().enumerate() {
            if n > 2 * l && *m != Rational::from_integer(central_binomial(l as u64)) {
                failures.push(format!("torus({n}) moment {l} = {m}"));
            }
        }
    }
    // det+ over aa* instances; for the cycle Laplacian it is n·(spanning trees) = n²
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut instances = 0;
    for n in 2..=20usize {
        let x = build_sample(&z, &Family::Torus(vec![n])).unwrap();
        let s = spectral_summary(&a, &x, 0).unwrap();
        if s.spectral_det_plus != BigInt::from(n * n) {
            failures.push(format!("cycle det+ at n={n}: {}", s.spectral_det_plus));
        }
        for ring in [Ring::Integers, Ring::Gaussian] {
            let b = random_group_element(&mut rng, ring, 1, 4);
            if spectral_summary(&b, &x, 0).unwrap().spectral_det_plus < BigInt::one() {
                failures.push(format!("det+ not positive for {b:?} on torus({n})"));
            }
            instances += 1;
        }
    }
    let g = GroupSpec::lamplighter();
    for m in 1..=4 {
        let x = build_sample(&g, &Family::WreathQuotient(m)).unwrap();
        let b = random_group_element(&mut rng, Ring::Integers, 2, 4);
        if spectral_summary(&b, &x, 0).unwrap().spectral_det_plus < BigInt::one() {
            failures.push(format!("det+ not positive on wreath({m})"));
        }
        instances += 1;
    }
    report(
        6,
        "moment identities and integral det+",
        failures.is_empty(),
        format!("{} det+ instances, failures: {failures:?}", instances + 19),
    );
}

#[test]
fn criterion_7_convergence_between_families() {
    let config = load_config("converge_perturbed.toml");
    let table = Table::parse(&run_convergence(&config).unwrap().csv);
    let mut failures = Vec::new();
    let tv = |n| parse_rational(table.get(table.find("torus", n), "tv_to_perturbed"));
    for &n in &config.families[0].schedule {
        let (t, p) = (table.find("torus", n), table.find("perturbed", n));
        let tol = q(2, n as i64);
        for col in ["nu_zero", "rank"] {
            let diff = parse_rational(table.get(t, col)) - parse_rational(table.get(p, col));
            if diff.abs() > tol {
                failures.push(format!("{col} at n={n} differs by {diff}"));
            }
        }
        if tv(n) != parse_rational(table.get(p, "tv_to_torus")) {
            failures.push(format!("asymmetric TV at n={n}"));
        }
    }
    if !(tv(200) < q(5, 100) && tv(200) < tv(20)) {
        failures.push(format!("TV at 200 is {}, at 20 is {}", tv(200), tv(20)));
    }
    report(
        7,
        "torus vs perturbed convergence",
        failures.is_empty(),
        format!("TV(20) = {}, TV(200) = {}, failures: {failures:?}", tv(20), tv(200)),
    );
}

#[test]
fn criterion_8_quasitiling() {
    let mut failures = Vec::new();
    let start = Instant::now();
    let z = GroupSpec::free_abelian(1).unwrap();
    let x = build_sample(&z, &Family::Torus(vec![1000])).unwrap();
    let tiles: Vec<Tile> = [5, 50, 500].iter().map(|&l| Tile::interval(l).unwrap()).collect();
    let ts = quasitile_sample(&x, &z, &tiles, &q(1, 4)).unwrap();
    let (disjoint, coverage) = verify_quasitiling(&ts, &x);
    let elapsed = start.elapsed();
    if !(disjoint && coverage >= q(3, 4) && elapsed < Duration::from_secs(5)) {
        failures.push(format!("torus 1000: disjoint {disjoint}, coverage {coverage}, {:.2}s", elapsed.as_secs_f64()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let eps_choices = [q(0, 1), q(1, 10), q(1, 4), q(1, 3), q(1, 2)];
    for case in 0..200 {
        let ground = rng.gen_range(1..=10);
        let sets: Vec<Vec<usize>> = (0..rng.gen_range(1..=7))
            .map(|_| {
                let mut s: Vec<usize> = (0..ground).filter(|_| rng.gen_bool(0.4)).collect();
                if s.is_empty() {
                    s.push(rng.gen_range(0..ground));
                }
                s
            })
            .collect();
        let cover = Cover::new(ground, sets).unwrap();
        let (mult, lambda) = even_covering_stats(&cover).unwrap();
        let total: usize = cover.sets().iter().map(Vec::len).sum();
        if lambda != q(total as i64, (mult * ground) as i64) {
            failures.push(format!("case {case}: lambda {lambda}"));
        }
        let eps = eps_choices.choose(&mut rng).unwrap().clone();
        let chosen = extract_disjoint_subcover(&cover, &eps, &lambda).unwrap();
        let target = &eps * &lambda * q(ground as i64, 1);
        let satisfies = |idx: &[usize]| {
            let members: Vec<&Vec<usize>> = idx.iter().map(|&i| &cover.sets()[i]).collect();
            let union: std::collections::BTreeSet<usize> = members.iter().flat_map(|s| s.iter().copied()).collect();
            eps_disjoint_by_matching(&members, ground, &eps) && q(union.len() as i64, 1) >= target
        };
        let k = cover.sets().len();
        let good: Vec<Vec<usize>> = (0u32..1 << k)
            .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|idx| satisfies(idx))
            .collect();
        if good.is_empty() || !good.contains(&chosen) {
            failures.push(format!("case {case}: greedy {chosen:?}, satisfying {}", good.len()));
        }
        let y: Vec<usize> = (0..ground).filter(|_| rng.gen_bool(0.5)).collect();
        let i = find_low_overlap_member(&cover, &y, &lambda).unwrap();
        let overlap = cover.sets()[i].iter().filter(|p| y.contains(p)).count();
        if q((overlap) as i64, 1) * &lambda * q(ground as i64, 1) > q((y.len() * cover.sets()[i].len()) as i64, 1) {
            failures.push(format!("case {case}: low-overlap index {i} violates the inequality"));
        }
    }
    report(
        8,
        "quasitiling and greedy extraction",
        failures.is_empty(),
        format!("torus 1000 coverage {coverage} in {:.2}s, 200 covers, failures: {failures:?}", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_9_determinism() {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    entries.sort();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut failures = Vec::new();
    for path in &entries {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let config = ExperimentConfig::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
        let runner = match name.split('_').next().unwrap() {
            "converge" => run_convergence,
            "spectral" => run_spectral,
            "quasitile" => run_quasitile,
            other => panic!("unexpected config prefix {other}"),
        };
        let first = runner(&config).unwrap();
        let second = runner(&config).unwrap();
        let serial = single.install(|| runner(&config).unwrap());
        if first.csv != second.csv || first.csv != serial.csv {
            failures.push(name.clone());
        }
        if !first.audits_ok {
            failures.push(format!("{name}: audit column false"));
        }
    }
    report(
        9,
        "byte-identical reruns",
        failures.is_empty() && !entries.is_empty(),
        format!("{} configs, failures: {failures:?}", entries.len()),
    );
}

#[test]
fn prime_ideal_smoke() {
    // guards the test helpers against silently changing ring conventions
    assert_eq!(PrimeIdeal::new(&RingElement::integer(-3)).unwrap().generator(), &RingElement::integer(3));
    assert_eq!(laplace_det(&[vec![RingElement::integer(2)]], Ring::Integers), RingElement::integer(2));
}
