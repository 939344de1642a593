//! Row-parallel experiment runners. Every runner returns the full CSV text; rows are
//! computed concurrently and assembled in (family, n) order.

use adelic_core::group::build_sample;
use adelic_core::group_ring::rank_normalized;
use adelic_core::linalg::{smith_normal_form, ExactMatrix};
use adelic_core::measure::{analyze, interval_mass, measure_distance, Ideal, IdealMeasure, OperatorAnalysis};
use adelic_core::quasitile::{quasitile_sample, verify_quasitiling};
use adelic_core::ring::{primes_up_to_norm, PrimeIdeal};
use adelic_core::spectral::{group_moment, luck_zero_bound_check, spectral_summary};
use adelic_core::{Rational, Ring};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::config::{decimal_to_rational, ExperimentConfig, FamilyPlan};
use crate::CliError;

/// CSV text plus whether every audit column held.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub csv: String,
    pub audits_ok: bool,
}

/// Exact `num/den`.
pub fn rational_cell(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn decimal_cell(x: f64) -> String {
    format!("{x:.6}")
}

/// Ideals of norm at most this are factored for the length identity checks.
const IDENTITY_NORM_LIMIT: u64 = 1_000_000_000_000;

#[derive(Clone, Copy)]
struct Task<'a> {
    plan: &'a FamilyPlan,
    position: usize,
    n: usize,
}

fn tasks(config: &ExperimentConfig) -> Vec<Task<'_>> {
    config
        .families
        .iter()
        .flat_map(|plan| plan.schedule.iter().enumerate().map(move |(position, &n)| Task { plan, position, n }))
        .collect()
}

fn write_csv(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn analysis_for(config: &ExperimentConfig, task: Task<'_>) -> Result<OperatorAnalysis, CliError> {
    let x = build_sample(&config.group, &task.plan.family(&config.group, task.n))?;
    Ok(analyze(&config.element, &x)?)
}

/// Largest residual over the kernel-length identity at small prime powers and the
/// leading torsion ideals, together with the interval-mass identities at the prime powers.
pub fn identity_residual(an: &OperatorAnalysis) -> Result<Rational, CliError> {
    let ring = an.element().ring();
    let mut worst = Rational::zero();
    let mut bump = |r: Rational| {
        if r > worst {
            worst = r;
        }
    };
    let primes: Vec<PrimeIdeal> = primes_up_to_norm(ring, 5);
    for m in &primes {
        for e in 1..=2u32 {
            let ideal = Ideal::generated_by(&m.generator().pow(e));
            bump(an.kernel_length_identity(&ideal)?.residual());
            bump(an.length_difference_identity(&ideal)?.residual());
            let direct = interval_mass(an.measure(), &ideal)?;
            bump((an.interval_mass_via_lengths(&ideal)? - direct).abs());
        }
    }
    for (ideal, _) in an.measure().top_torsion(5) {
        if ideal.norm().is_some_and(|n| n <= BigUint::from(IDENTITY_NORM_LIMIT)) {
            bump(an.kernel_length_identity(&ideal)?.residual());
        }
    }
    Ok(worst)
}

struct ConvergenceRow {
    family: String,
    n: usize,
    position: usize,
    cells: Vec<String>,
    tail_cells: Vec<String>,
    residual: Rational,
    audits_ok: bool,
    measure: IdealMeasure,
}

fn convergence_row(config: &ExperimentConfig, task: Task<'_>) -> Result<ConvergenceRow, CliError> {
    let x = build_sample(&config.group, &task.plan.family(&config.group, task.n))?;
    let an = analyze(&config.element, &x)?;
    let rank = rank_normalized(&config.element, &x)?;
    let nu = an.measure().clone();
    let mut cells = vec![
        x.size().to_string(),
        rational_cell(&rank),
        rational_cell(&nu.zero_mass()),
        rational_cell(&nu.unit_mass()),
    ];
    let top = nu.top_torsion(5);
    for k in 0..5 {
        match top.get(k) {
            Some((ideal, mass)) => {
                cells.push(format!("({ideal})"));
                cells.push(rational_cell(mass));
            }
            None => cells.extend([String::new(), String::new()]),
        }
    }
    let det = an.detplus_bound_check()?;
    let det_holds = det.holds && det.matrix_bound_holds && det.ceiling_holds;
    cells.push(det.det_plus.to_string());
    cells.push(det_holds.to_string());
    let mut audits_ok = det_holds;
    let mut tail_cells = Vec::new();
    for &lambda in &config.lambdas {
        let tail = an.tail_mass_check(lambda)?;
        audits_ok &= tail.holds;
        tail_cells.push(rational_cell(&tail.tail));
        tail_cells.push(tail.holds.to_string());
    }
    let residual = identity_residual(&an)?;
    audits_ok &= residual.is_zero();
    Ok(ConvergenceRow {
        family: task.plan.name.clone(),
        n: task.n,
        position: task.position,
        cells,
        tail_cells,
        residual,
        audits_ok,
        measure: nu,
    })
}

fn lambda_suffix(config: &ExperimentConfig, base: &str, lambda: f64) -> String {
    if config.lambdas.len() == 1 {
        base.to_string()
    } else {
        format!("{base}_{lambda}")
    }
}

/// One row per (family, n): rank, measure summary, audits and total-variation
/// distances to every family at the same schedule position.
pub fn run_convergence(config: &ExperimentConfig) -> Result<Report, CliError> {
    let rows: Vec<ConvergenceRow> =
        tasks(config).par_iter().map(|&t| convergence_row(config, t)).collect::<Result<_, _>>()?;
    let mut header: Vec<String> = ["family", "n", "size", "rank", "nu_zero", "nu_unit"].map(String::from).to_vec();
    for k in 1..=5 {
        header.push(format!("ideal{k}"));
        header.push(format!("mass{k}"));
    }
    header.extend(["detplus_torsion", "detplus_bound_holds"].map(String::from));
    for &l in &config.lambdas {
        header.push(lambda_suffix(config, "tail_mass", l));
        header.push(lambda_suffix(config, "tail_bound_holds", l));
    }
    header.push("len_identity_residual".into());
    for f in &config.families {
        header.push(format!("tv_to_{}", f.name));
    }
    let mut out = vec![header];
    let mut audits_ok = true;
    for row in &rows {
        audits_ok &= row.audits_ok;
        let mut record = vec![row.family.clone(), row.n.to_string()];
        record.extend(row.cells.iter().cloned());
        record.extend(row.tail_cells.iter().cloned());
        record.push(rational_cell(&row.residual));
        for f in &config.families {
            let other = rows.iter().find(|r| r.family == f.name && r.position == row.position);
            record.push(match other {
                Some(o) => rational_cell(&(measure_distance(&row.measure, &o.measure)? / Rational::from_integer(2.into()))),
                None => String::new(),
            });
        }
        out.push(record);
    }
    Ok(Report { csv: write_csv(out)?, audits_ok })
}

/// Exact moments, group moments, gaps, `μ({0})`, spectral `det₊` and the zero-mass bound per ε.
pub fn run_spectral(config: &ExperimentConfig) -> Result<Report, CliError> {
    let l_max = config.moments;
    let group_moments: Vec<Rational> =
        (0..=l_max).map(|l| group_moment(&config.group, &config.element, l)).collect::<Result<_, _>>()?;
    let integral = config.ring == Ring::Integers;
    let rows: Vec<(Vec<String>, bool)> = tasks(config)
        .par_iter()
        .map(|&t| -> Result<(Vec<String>, bool), CliError> {
            let x = build_sample(&config.group, &t.plan.family(&config.group, t.n))?;
            let s = spectral_summary(&config.element, &x, l_max)?;
            let mut record = vec![t.plan.name.clone(), t.n.to_string(), s.size.to_string()];
            record.extend(s.moments.iter().map(rational_cell));
            record.extend(group_moments.iter().map(rational_cell));
            record.extend(s.moments.iter().zip(&group_moments).map(|(m, g)| rational_cell(&(m - g).abs())));
            record.push(rational_cell(&s.mu_zero()));
            record.push(s.spectral_det_plus.to_string());
            record.push(decimal_cell(s.c_bound));
            let mut ok = s.spectral_det_plus > BigInt::zero();
            if integral {
                for &eps in &config.epsilons {
                    let audit = luck_zero_bound_check(&s, eps)?;
                    ok &= audit.holds;
                    record.push(rational_cell(&audit.gap_mass));
                    record.push(audit.holds.to_string());
                }
            }
            Ok((record, ok))
        })
        .collect::<Result<_, _>>()?;
    let mut header: Vec<String> = ["family", "n", "size"].map(String::from).to_vec();
    header.extend((0..=l_max).map(|l| format!("m{l}")));
    header.extend((0..=l_max).map(|l| format!("group_m{l}")));
    header.extend((0..=l_max).map(|l| format!("gap{l}")));
    header.extend(["mu_zero", "spectral_detplus", "c_bound"].map(String::from));
    if integral {
        for &eps in &config.epsilons {
            header.push(format!("zero_gap_mass_{eps}"));
            header.push(format!("luck_bound_holds_{eps}"));
        }
    }
    let audits_ok = rows.iter().all(|(_, ok)| *ok);
    let out = std::iter::once(header).chain(rows.into_iter().map(|(r, _)| r));
    Ok(Report { csv: write_csv(out)?, audits_ok })
}

/// Stage rows for every (family, n, ε), each run closed by a `final` row.
pub fn run_quasitile(config: &ExperimentConfig) -> Result<Report, CliError> {
    if config.tiles.is_empty() {
        return Err(CliError::Config { line: None, message: "quasitile runs need `tiles`".into() });
    }
    let runs: Vec<(Task<'_>, f64)> =
        tasks(config).into_iter().flat_map(|t| config.epsilons.iter().map(move |&e| (t, e))).collect();
    let blocks: Vec<(Vec<Vec<String>>, bool)> = runs
        .par_iter()
        .map(|&(t, eps)| -> Result<(Vec<Vec<String>>, bool), CliError> {
            let epsilon = decimal_to_rational(eps).expect("validated epsilon");
            let x = build_sample(&config.group, &t.plan.family(&config.group, t.n))?;
            let lead = [t.plan.name.clone(), t.n.to_string(), rational_cell(&epsilon)];
            let row = |rest: [String; 8]| lead.iter().cloned().chain(rest).collect::<Vec<_>>();
            match quasitile_sample(&x, &config.group, &config.tiles, &epsilon) {
                Ok(ts) => {
                    let mut rows = Vec::new();
                    for (k, s) in ts.stages.iter().enumerate() {
                        rows.push(row([
                            (k + 1).to_string(),
                            s.tile_len.to_string(),
                            s.centers.len().to_string(),
                            s.placed_area.to_string(),
                            rational_cell(&s.cumulative_coverage),
                            String::new(),
                            String::new(),
                            ts.warnings.join("; "),
                        ]));
                    }
                    let (disjoint, coverage) = verify_quasitiling(&ts, &x);
                    let covered = coverage >= Rational::from_integer(1.into()) - &epsilon;
                    let centers: usize = ts.stages.iter().map(|s| s.centers.len()).sum();
                    let area: usize = ts.stages.iter().map(|s| s.placed_area).sum();
                    rows.push(row([
                        "final".into(),
                        String::new(),
                        centers.to_string(),
                        area.to_string(),
                        rational_cell(&coverage),
                        disjoint.to_string(),
                        covered.to_string(),
                        format!("quality {}", rational_cell(&ts.quality)),
                    ]));
                    Ok((rows, disjoint && covered))
                }
                Err(e @ (adelic_core::Error::Quality { .. } | adelic_core::Error::Coverage { .. })) => {
                    let rest = ["error", "", "", "", "", "false", "false"].map(String::from);
                    let mut r: Vec<String> = lead.iter().cloned().chain(rest).collect();
                    r.push(e.to_string());
                    Ok((vec![r], false))
                }
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<_, _>>()?;
    let header = [
        "family", "n", "epsilon", "stage", "tile_len", "centers", "placed_area", "coverage", "disjoint",
        "coverage_holds", "diagnostic",
    ]
    .map(String::from)
    .to_vec();
    let audits_ok = blocks.iter().all(|(_, ok)| *ok);
    let out = std::iter::once(header).chain(blocks.into_iter().flat_map(|(rows, _)| rows));
    Ok(Report { csv: write_csv(out)?, audits_ok })
}

/// Full measure `ν^a_{X_n}` of every family at index `n`.
pub fn run_measure(config: &ExperimentConfig, n: usize) -> Result<Report, CliError> {
    let rows: Vec<Vec<Vec<String>>> = config
        .families
        .par_iter()
        .map(|plan| -> Result<Vec<Vec<String>>, CliError> {
            let an = analysis_for(config, Task { plan, position: 0, n })?;
            let nu = an.measure();
            let mut atoms: Vec<(&Ideal, &Rational)> = nu.masses().iter().collect();
            // zero ideal first, then by norm
            atoms.sort_by_key(|(i, _)| !i.is_zero());
            Ok(atoms
                .into_iter()
                .map(|(i, m)| vec![plan.name.clone(), n.to_string(), format!("({i})"), rational_cell(m)])
                .collect())
        })
        .collect::<Result<_, _>>()?;
    let header = ["family", "n", "ideal", "mass"].map(String::from).to_vec();
    Ok(Report { csv: write_csv(std::iter::once(header).chain(rows.into_iter().flatten()))?, audits_ok: true })
}

/// Smith form of a CSV matrix: divisors, then `P`, `D`, `Q` with `A = P·D·Q`.
pub fn run_snf(text: &str, ring: Option<Ring>) -> Result<String, CliError> {
    let a = ExactMatrix::from_csv(text, ring)?;
    let s = smith_normal_form(&a);
    let divisors: Vec<String> = s.divisors.iter().map(ToString::to_string).collect();
    Ok(format!(
        "# divisors\n{}\n# free\n{}\n# P\n{}# D\n{}# Q\n{}",
        divisors.join(","),
        s.free_count,
        s.p.to_csv(),
        s.d.to_csv(),
        s.q.to_csv()
    ))
}
