//! Dense exact matrices over ℤ and ℤ[i].
//!
//! Smith normal form with accumulated unimodular factors, the gcd-of-minors
//! oracle for elementary divisors, fraction-free rank, determinants,
//! characteristic polynomials, trace powers, the matrix ceiling and kernel
//! lengths over `O/𝔪^i`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{input, Error, Result};
use crate::ring::{gcd, valuation, PrimeIdeal, Ring, RingElement};

/// Largest `min(rows, cols)` accepted by the gcd-of-minors oracle.
pub const MINOR_ORACLE_LIMIT: usize = 8;
/// Largest number of vectors enumerated by the brute-force kernel paths.
pub const BRUTE_FORCE_LIMIT: u64 = 300_000;

/// A dense row-major matrix whose entries all share one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<RingElement>,
}

impl ExactMatrix {
    pub fn new(ring: Ring, rows: usize, cols: usize, entries: Vec<RingElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return input(alloc::format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            ));
        }
        if let Some(bad) = entries.iter().find(|e| e.ring() != ring) {
            return Err(Error::RingMismatch(ring, bad.ring()));
        }
        Ok(ExactMatrix { ring, rows, cols, entries })
    }

    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Self {
        ExactMatrix { ring, rows, cols, entries: alloc::vec![RingElement::zero(ring); rows * cols] }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, RingElement::one(ring));
        }
        m
    }

    pub fn from_fn(ring: Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RingElement) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.ring(), ring, "entry ring differs from matrix ring");
                entries.push(e);
            }
        }
        ExactMatrix { ring, rows, cols, entries }
    }

    /// Integer matrix from nested rows; convenient in tests and examples.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(Ring::Integers, r, c, |i, j| RingElement::integer(rows[i][j]))
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(ring: Ring, diag: &[RingElement]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(ring, n, n);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[RingElement] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: RingElement) {
        assert_eq!(value.ring(), self.ring);
        self.entries[i * self.cols + j] = value;
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut RingElement {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElement::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.ring, rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return input("matrix shapes differ");
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(ExactMatrix { ring: self.ring, rows: self.rows, cols: self.cols, entries })
    }

    /// Matrix product; zero entries of `self` are skipped, which keeps sparse products cheap.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.cols != other.rows {
            return input(alloc::format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    let slot = out.get_mut(i, j);
                    *slot = &*slot + &prod;
                }
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    pub fn trace(&self) -> RingElement {
        let mut t = RingElement::zero(self.ring);
        for i in 0..self.rows.min(self.cols) {
            t = &t + self.get(i, i);
        }
        t
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> Result<RingElement> {
        if !self.is_square() {
            return input("determinant of a non-square matrix");
        }
        Ok(bareiss_determinant(self.clone()))
    }

    /// Serializes as CSV lines of ring-element strings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }

    /// Parses CSV lines of ring-element strings. Blank lines and `#` comments are skipped;
    /// without an explicit ring, any `i` term makes the whole matrix Gaussian.
    pub fn from_csv(text: &str, ring: Option<Ring>) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let ring = ring.unwrap_or(if text.contains('i') { Ring::Gaussian } else { Ring::Integers });
        let mut entries = Vec::new();
        let mut cols = None;
        for (lineno, line) in lines.iter().enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            match cols {
                None => cols = Some(cells.len()),
                Some(c) if c != cells.len() => {
                    return Err(Error::Parse(alloc::format!(
                        "row {} has {} cells, expected {c}",
                        lineno + 1,
                        cells.len()
                    )))
                }
                _ => {}
            }
            for cell in cells {
                entries.push(RingElement::parse_in(cell, ring).map_err(|e| {
                    Error::Parse(alloc::format!("row {}: {e}", lineno + 1))
                })?);
            }
        }
        Self::new(ring, lines.len(), cols.unwrap_or(0), entries)
    }
}

fn bareiss_determinant(mut m: ExactMatrix) -> RingElement {
    let n = m.rows;
    let ring = m.ring;
    if n == 0 {
        return RingElement::one(ring);
    }
    let mut negate = false;
    let mut prev = RingElement::one(ring);
    for k in 0..n - 1 {
        if m.get(k, k).is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                return RingElement::zero(ring);
            };
            for j in 0..n {
                m.entries.swap(k * n + j, swap * n + j);
            }
            negate = !negate;
        }
        let pivot = m.get(k, k).clone();
        for i in k + 1..n {
            let lead = m.get(i, k).clone();
            for j in k + 1..n {
                let num = &(m.get(i, j) * &pivot) - &(&lead * m.get(k, j));
                let value = num.div_exact(&prev).expect("Bareiss division is exact");
                m.set(i, j, value);
            }
        }
        prev = pivot;
    }
    let det = m.get(n - 1, n - 1).clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Smith normal form `A = P·D·Q` with `P`, `Q` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub p: ExactMatrix,
    pub d: ExactMatrix,
    pub q: ExactMatrix,
    /// Canonical nonzero diagonal entries, each dividing the next.
    pub divisors: Vec<RingElement>,
    /// Number of zero diagonal entries.
    pub free_count: usize,
}

/// Elementary divisors without the transforms, plus the zero-diagonal count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDiagonal {
    pub divisors: Vec<RingElement>,
    pub free_count: usize,
}

/// Computes the Smith normal form, accumulating both unimodular factors.
pub fn smith_normal_form(a: &ExactMatrix) -> SmithForm {
    let mut w = SmithWorker::new(a, true);
    w.run();
    let divisors = w.divisors();
    let free_count = a.rows.min(a.cols) - divisors.len();
    SmithForm {
        p: w.p.expect("tracked"),
        d: w.m,
        q: w.q.expect("tracked"),
        divisors,
        free_count,
    }
}

/// Elementary divisors only; skips the transform bookkeeping.
pub fn smith_diagonal(a: &ExactMatrix) -> SmithDiagonal {
    let mut w = SmithWorker::new(a, false);
    w.run();
    let divisors = w.divisors();
    let free_count = a.rows.min(a.cols) - divisors.len();
    SmithDiagonal { divisors, free_count }
}

struct SmithWorker {
    m: ExactMatrix,
    p: Option<ExactMatrix>,
    q: Option<ExactMatrix>,
}

impl SmithWorker {
    fn new(a: &ExactMatrix, track: bool) -> Self {
        SmithWorker {
            m: a.clone(),
            p: track.then(|| ExactMatrix::identity(a.ring, a.rows)),
            q: track.then(|| ExactMatrix::identity(a.ring, a.cols)),
        }
    }

    fn divisors(&self) -> Vec<RingElement> {
        (0..self.m.rows.min(self.m.cols))
            .map(|k| self.m.get(k, k).clone())
            .filter(|d| !d.is_zero())
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let c = self.m.cols;
        for col in 0..c {
            self.m.entries.swap(i * c + col, j * c + col);
        }
        if let Some(p) = &mut self.p {
            let pc = p.cols;
            for row in 0..p.rows {
                p.entries.swap(row * pc + i, row * pc + j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let c = self.m.cols;
        for row in 0..self.m.rows {
            self.m.entries.swap(row * c + i, row * c + j);
        }
        if let Some(q) = &mut self.q {
            let qc = q.cols;
            for col in 0..qc {
                q.entries.swap(i * qc + col, j * qc + col);
            }
        }
    }

    /// row[dst] += c·row[src]; P absorbs the inverse as col[src] −= c·col[dst].
    fn add_row(&mut self, dst: usize, src: usize, c: &RingElement, from_col: usize) {
        for col in from_col..self.m.cols {
            let s = self.m.get(src, col);
            if s.is_zero() {
                continue;
            }
            let delta = c * s;
            let slot = self.m.get_mut(dst, col);
            *slot = &*slot + &delta;
        }
        if let Some(p) = &mut self.p {
            for row in 0..p.rows {
                let d = p.get(row, dst);
                if d.is_zero() {
                    continue;
                }
                let delta = c * d;
                let slot = p.get_mut(row, src);
                *slot = &*slot - &delta;
            }
        }
    }

    /// col[dst] += c·col[src]; Q absorbs the inverse as row[src] −= c·row[dst].
    fn add_col(&mut self, dst: usize, src: usize, c: &RingElement, from_row: usize) {
        for row in from_row..self.m.rows {
            let s = self.m.get(row, src);
            if s.is_zero() {
                continue;
            }
            let delta = c * s;
            let slot = self.m.get_mut(row, dst);
            *slot = &*slot + &delta;
        }
        if let Some(q) = &mut self.q {
            for col in 0..q.cols {
                let d = q.get(dst, col);
                if d.is_zero() {
                    continue;
                }
                let delta = c * d;
                let slot = q.get_mut(src, col);
                *slot = &*slot - &delta;
            }
        }
    }

    fn scale_row(&mut self, i: usize, unit: &RingElement) {
        for col in 0..self.m.cols {
            let v = self.m.get(i, col) * unit;
            self.m.set(i, col, v);
        }
        if let Some(p) = &mut self.p {
            let inv = unit.unit_inverse().expect("scaling by a unit");
            for row in 0..p.rows {
                let v = p.get(row, i) * &inv;
                p.set(row, i, v);
            }
        }
    }

    /// Minimal-norm nonzero entry of the trailing submatrix, ties to the lowest (row, col).
    fn find_pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigUint, usize, usize)> = None;
        for i in k..self.m.rows {
            for j in k..self.m.cols {
                let e = self.m.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let n = e.norm();
                if best.as_ref().is_none_or(|(bn, _, _)| n < *bn) {
                    let unit = n.is_one();
                    best = Some((n, i, j));
                    if unit {
                        return best.map(|(_, i, j)| (i, j));
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn run(&mut self) {
        let diag = self.m.rows.min(self.m.cols);
        for k in 0..diag {
            loop {
                let Some((pi, pj)) = self.find_pivot(k) else {
                    return;
                };
                self.swap_rows(k, pi);
                self.swap_cols(k, pj);
                let pivot = self.m.get(k, k).clone();
                let mut dirty = false;
                for i in k + 1..self.m.rows {
                    let e = self.m.get(i, k);
                    if e.is_zero() {
                        continue;
                    }
                    let (q, r) = e.div_rem(&pivot);
                    self.add_row(i, k, &-q, k);
                    dirty |= !r.is_zero();
                }
                for j in k + 1..self.m.cols {
                    let e = self.m.get(k, j);
                    if e.is_zero() {
                        continue;
                    }
                    let (q, r) = e.div_rem(&pivot);
                    self.add_col(j, k, &-q, k);
                    dirty |= !r.is_zero();
                }
                if dirty {
                    continue;
                }
                if !pivot.is_unit() {
                    if let Some(i) = self.non_divisible_row(k, &pivot) {
                        let one = RingElement::one(self.m.ring);
                        self.add_row(k, i, &one, k);
                        continue;
                    }
                }
                break;
            }
            let (_, unit) = self.m.get(k, k).canonical_with_unit();
            if !unit.is_one() {
                self.scale_row(k, &unit);
            }
        }
    }

    fn non_divisible_row(&self, k: usize, pivot: &RingElement) -> Option<usize> {
        (k + 1..self.m.rows).find(|&i| {
            (k + 1..self.m.cols).any(|j| {
                let e = self.m.get(i, j);
                !e.is_zero() && !pivot.divides(e)
            })
        })
    }
}

/// Elementary divisors from gcds of minors: `α_k = d_k / d_{k−1}`.
///
/// Exponential in the dimension; only for matrices with `min(rows, cols) ≤ 8`.
pub fn gcd_minor_divisors(a: &ExactMatrix) -> Result<Vec<RingElement>> {
    let t = a.rows.min(a.cols);
    if t > MINOR_ORACLE_LIMIT {
        return Err(Error::Size(alloc::format!(
            "minor oracle supports min(rows, cols) <= {MINOR_ORACLE_LIMIT}, got {t}"
        )));
    }
    let mut out = Vec::new();
    let mut prev = RingElement::one(a.ring);
    for k in 1..=t {
        let dk = minor_gcd(a, k);
        if dk.is_zero() {
            break;
        }
        out.push(dk.div_exact(&prev).expect("d_{k-1} divides d_k").canonical_associate());
        prev = dk;
    }
    Ok(out)
}

/// Canonical gcd of all `k×k` minors.
pub fn minor_gcd(a: &ExactMatrix, k: usize) -> RingElement {
    let mut g = RingElement::zero(a.ring);
    if k == 0 {
        return RingElement::one(a.ring);
    }
    for rows in combinations(a.rows, k) {
        for cols in combinations(a.cols, k) {
            let det = bareiss_determinant(a.submatrix(&rows, &cols));
            if !det.is_zero() {
                g = gcd(&g, &det);
                if g.is_unit() {
                    return g;
                }
            }
        }
    }
    g
}

/// Norm of the ideal generated by the rank-sized minors (the torsion order of the cokernel).
pub fn det_plus_via_minors(a: &ExactMatrix) -> Result<BigUint> {
    let t = a.rows.min(a.cols);
    if t > MINOR_ORACLE_LIMIT {
        return Err(Error::Size(alloc::format!(
            "minor oracle supports min(rows, cols) <= {MINOR_ORACLE_LIMIT}, got {t}"
        )));
    }
    let r = rank_over_fraction_field(a);
    Ok(minor_gcd(a, r).norm())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Rank over ℚ or ℚ(i) by fraction-free elimination with content removal.
pub fn rank_over_fraction_field(a: &ExactMatrix) -> usize {
    let ring = a.ring;
    let mut rows: Vec<Vec<RingElement>> =
        (0..a.rows).map(|i| (0..a.cols).map(|j| a.get(i, j).clone()).collect()).collect();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == rows.len() {
            break;
        }
        let Some(pr) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let pivot_row = rows[rank].clone();
        let pivot = pivot_row[col].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let g = gcd(&pivot, &row[col]);
            let scale_self = pivot.div_exact(&g).expect("gcd divides");
            let scale_pivot = row[col].div_exact(&g).expect("gcd divides");
            let mut content = RingElement::zero(ring);
            for j in col..row.len() {
                let v = &(&row[j] * &scale_self) - &(&pivot_row[j] * &scale_pivot);
                if !v.is_zero() && !content.is_unit() {
                    content = gcd(&content, &v);
                }
                row[j] = v;
            }
            if !content.is_zero() && !content.is_unit() {
                for v in row.iter_mut().skip(col) {
                    *v = v.div_exact(&content).expect("content divides");
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Length of the kernel of `x ↦ xA` on `(O/𝔪^i)^k`, from the Smith divisors.
///
/// Each divisor `α_j` contributes `min(v_𝔪(α_j), i)` and each zero diagonal entry contributes `i`.
pub fn kernel_length_mod_power(a: &ExactMatrix, m: &PrimeIdeal, i: u32) -> Result<u64> {
    check_kernel_args(a, m, i)?;
    let diag = smith_diagonal(a);
    Ok(kernel_length_from_divisors(&diag, m, i))
}

pub(crate) fn kernel_length_from_divisors(diag: &SmithDiagonal, m: &PrimeIdeal, i: u32) -> u64 {
    let torsion: u64 = diag.divisors.iter().map(|d| u64::from(valuation(d, m).min_with(i))).sum();
    torsion + u64::from(i) * diag.free_count as u64
}

fn check_kernel_args(a: &ExactMatrix, m: &PrimeIdeal, i: u32) -> Result<()> {
    if i == 0 {
        return input("kernel length needs a positive exponent");
    }
    if !a.is_square() {
        return input("kernel length needs a square matrix");
    }
    if a.ring != m.ring() {
        return Err(Error::RingMismatch(a.ring, m.ring()));
    }
    Ok(())
}

/// Kernel length over `O/𝔪^i` by elimination inside the local ring itself.
///
/// Entries are reduced modulo `π^i` and diagonalized with minimal-valuation pivots, so
/// this route never sees the global elementary divisors.
pub fn kernel_length_local(a: &ExactMatrix, m: &PrimeIdeal, i: u32) -> Result<u64> {
    check_kernel_args(a, m, i)?;
    if a.ring == Ring::Integers {
        let p = m.generator().re().to_u64();
        let q = p.and_then(|p| p.checked_pow(i)).filter(|&q| q < 1 << 62);
        if let (Some(p), Some(q)) = (p, q) {
            return Ok(local_length_u64(a, p, i, q));
        }
    }
    Ok(local_length_generic(a, m, i))
}

fn local_length_u64(a: &ExactMatrix, p: u64, i: u32, q: u64) -> u64 {
    let n = a.rows;
    let mut m: Vec<u64> = a.entries.iter().map(|e| reduce_mod(e.re(), q)).collect();
    let val = |x: u64| -> u32 {
        if x == 0 {
            return i;
        }
        let mut v = 0;
        let mut y = x;
        while y.is_multiple_of(p) {
            y /= p;
            v += 1;
        }
        v
    };
    let mut total = 0u64;
    for k in 0..n {
        let mut best = (i, k, k);
        'search: for r in k..n {
            for c in k..n {
                let v = val(m[r * n + c]);
                if v < best.0 {
                    best = (v, r, c);
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let (v, pr, pc) = best;
        if v == i {
            total += u64::from(i) * (n - k) as u64;
            break;
        }
        for c in 0..n {
            m.swap(k * n + c, pr * n + c);
        }
        for r in 0..n {
            m.swap(r * n + k, r * n + pc);
        }
        let pv = p.pow(v);
        let unit = m[k * n + k] / pv;
        let uinv = inv_mod_composite(unit % q, q);
        for r in k + 1..n {
            let e = m[r * n + k];
            if e == 0 {
                continue;
            }
            let f = mul_mod(e / pv, uinv, q);
            for c in k..n {
                let sub = mul_mod(f, m[k * n + c], q);
                m[r * n + c] = sub_mod(m[r * n + c], sub, q);
            }
        }
        // every other entry of row k is a multiple of the pivot; column operations clear them
        total += u64::from(v);
    }
    total
}

fn inv_mod_composite(a: u64, q: u64) -> u64 {
    let (mut r0, mut r1) = (q as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let quo = r0 / r1;
        (r0, r1) = (r1, r0 - quo * r1);
        (t0, t1) = (t1, t0 - quo * t1);
    }
    debug_assert_eq!(r0, 1, "pivot unit must be invertible");
    t0.rem_euclid(q as i128) as u64
}

fn local_length_generic(a: &ExactMatrix, m: &PrimeIdeal, i: u32) -> u64 {
    let n = a.rows;
    let q = m.generator().pow(i);
    let reduce = |x: &RingElement| x.div_rem(&q).1;
    let mut mat: Vec<RingElement> = a.entries.iter().map(reduce).collect();
    let val = |x: &RingElement| valuation(x, m).min_with(i);
    let mut total = 0u64;
    for k in 0..n {
        let mut best = (i, k, k);
        'search: for r in k..n {
            for c in k..n {
                let v = val(&mat[r * n + c]);
                if v < best.0 {
                    best = (v, r, c);
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let (v, pr, pc) = best;
        if v == i {
            total += u64::from(i) * (n - k) as u64;
            break;
        }
        for c in 0..n {
            mat.swap(k * n + c, pr * n + c);
        }
        for r in 0..n {
            mat.swap(r * n + k, r * n + pc);
        }
        let pv = m.generator().pow(v);
        let unit = mat[k * n + k].div_exact(&pv).expect("pivot valuation");
        let (g, s, _) = crate::ring::extended_gcd(&unit, &q);
        debug_assert!(g.is_one());
        for r in k + 1..n {
            if mat[r * n + k].is_zero() {
                continue;
            }
            let f = reduce(&(&mat[r * n + k].div_exact(&pv).expect("valuation at least the pivot's") * &s));
            for c in k..n {
                let sub = &f * &mat[k * n + c];
                mat[r * n + c] = reduce(&(&mat[r * n + c] - &sub));
            }
        }
        total += u64::from(v);
    }
    total
}

/// Brute-force kernel length: enumerates `(O/𝔪^i)^k` and counts solutions of `xA ≡ 0`.
pub fn kernel_length_brute(a: &ExactMatrix, m: &PrimeIdeal, i: u32) -> Result<u64> {
    check_kernel_args(a, m, i)?;
    let modulus = m.generator().pow(i);
    let count = kernel_size_brute(a, &modulus)?;
    let base = m.residue_norm().to_u128().ok_or_else(|| Error::Size("prime norm too large".into()))?;
    let mut len = 0;
    let mut rest = count;
    while rest > 1 {
        if rest % base != 0 {
            return Err(Error::Precondition("kernel size is not a power of the residue norm".into()));
        }
        rest /= base;
        len += 1;
    }
    Ok(len)
}

/// Counts `x ∈ (O/(g))^k` with `xA ≡ 0 (mod g)` by enumeration.
pub fn kernel_size_brute(a: &ExactMatrix, g: &RingElement) -> Result<u128> {
    if g.is_zero() {
        return input("modulus must be nonzero");
    }
    if g.ring() != a.ring {
        return Err(Error::RingMismatch(a.ring, g.ring()));
    }
    let k = a.rows;
    let n = g.norm().to_u64().unwrap_or(u64::MAX);
    let total = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > u128::from(BRUTE_FORCE_LIMIT) {
        return Err(Error::Size(alloc::format!(
            "brute force would enumerate {total} vectors (limit {BRUTE_FORCE_LIMIT})"
        )));
    }
    let reps = residue_representatives(g)?;
    let small = |x: &RingElement| -> Result<(i128, i128)> {
        match (x.re().to_i128(), x.im().to_i128()) {
            (Some(a), Some(b)) if a.abs() < 1 << 40 && b.abs() < 1 << 40 => Ok((a, b)),
            _ => Err(Error::Size("entries too large for brute force".into())),
        }
    };
    let mat: Vec<(i128, i128)> = a.entries.iter().map(small).collect::<Result<_>>()?;
    let reps: Vec<(i128, i128)> = reps.iter().map(small).collect::<Result<_>>()?;
    let (gr, gi) = small(g)?;
    let gn = gr * gr + gi * gi;
    // (x + yi) ≡ 0 mod g  ⇔  g divides it  ⇔  (x+yi)·conj(g) ≡ 0 mod N(g) componentwise
    let divisible = |(x, y): (i128, i128)| -> bool {
        let re = x * gr + y * gi;
        let im = y * gr - x * gi;
        re % gn == 0 && im % gn == 0
    };
    let cols = a.cols;
    let mut idx = alloc::vec![0usize; k];
    let mut count: u128 = 0;
    loop {
        let in_kernel = (0..cols).all(|j| {
            let mut acc = (0i128, 0i128);
            for (r, &digit) in idx.iter().enumerate() {
                let (xa, xb) = reps[digit];
                let (ma, mb) = mat[r * cols + j];
                acc.0 += xa * ma - xb * mb;
                acc.1 += xa * mb + xb * ma;
            }
            divisible(acc)
        });
        if in_kernel {
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(count);
            }
            idx[pos] += 1;
            if idx[pos] < reps.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// A complete set of representatives of `O/(g)`, `g ≠ 0`.
pub fn residue_representatives(g: &RingElement) -> Result<Vec<RingElement>> {
    if g.is_zero() {
        return input("the zero ideal has infinitely many residues");
    }
    let n = g.norm().to_u64().ok_or_else(|| Error::Size("residue ring too large".into()))?;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::Size(alloc::format!("residue ring of size {n} is too large")));
    }
    match g.ring() {
        Ring::Integers => Ok((0..n).map(RingElement::integer).collect()),
        Ring::Gaussian => {
            // gO as a lattice in ℤ² has basis (gr, gi), (−gi, gr); its Hermite form is
            // {(h11, 0), (x, h22)} with h22 = gcd(gr, gi) and h11·h22 = N(g).
            let gr = g.re().clone();
            let gi = g.im().clone();
            let h22 = num_integer::Integer::gcd(&gr, &gi);
            let h22 = h22.to_u64().expect("bounded by the norm");
            let h11 = n / h22;
            let mut out = Vec::with_capacity(n as usize);
            for b in 0..h22 {
                for a in 0..h11 {
                    out.push(RingElement::gaussian(a, b));
                }
            }
            Ok(out)
        }
    }
}

/// Characteristic polynomial `det(xI − A)` of an integer matrix, lowest degree first.
///
/// Computed modulo enough 62-bit primes to exceed twice a Hadamard-type bound on the
/// coefficients, via Hessenberg reduction, and lifted by the Chinese remainder theorem.
pub fn char_poly(a: &ExactMatrix) -> Result<Vec<BigInt>> {
    if !a.is_square() {
        return input("characteristic polynomial of a non-square matrix");
    }
    if a.ring != Ring::Integers {
        return input("characteristic polynomial needs an integer matrix; embed Gaussian matrices first");
    }
    let n = a.rows;
    if n == 0 {
        return Ok(alloc::vec![BigInt::one()]);
    }
    // |coefficient of x^{n-k}| ≤ C(n,k)·R^k ≤ (1+R)^n with R the largest row 2-norm.
    let mut ln_row_max: f64 = 0.0;
    for i in 0..n {
        let mut s = BigUint::zero();
        for j in 0..n {
            let v = a.get(i, j).re().magnitude();
            s += v * v;
        }
        ln_row_max = ln_row_max.max(0.5 * crate::ring::ln_biguint(&s));
    }
    let ln_bound = n as f64 * libm::log1p(libm::exp(ln_row_max));
    let bits_needed = (ln_bound / core::f64::consts::LN_2) as u64 + 4;
    let mut modulus = BigUint::one();
    let mut residues: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut candidate: u64 = (1 << 62) - 1;
    while modulus.bits() < bits_needed {
        while !crate::ring::is_prime(&BigUint::from(candidate)) {
            candidate -= 2;
        }
        let p = candidate;
        candidate -= 2;
        let reduced: Vec<u64> = a.entries.iter().map(|e| reduce_mod(e.re(), p)).collect();
        residues.push((p, hessenberg_char_poly(reduced, n, p)));
        modulus *= p;
    }
    let half = &modulus >> 1;
    let mut coeffs = Vec::with_capacity(n + 1);
    for idx in 0..=n {
        let mut acc = BigUint::zero();
        let mut m = BigUint::one();
        for (p, poly) in &residues {
            // Garner-free CRT: acc ≡ poly[idx] (mod p), acc < m·p
            let pm = BigUint::from(*p);
            let acc_mod = (&acc % &pm).to_u64().expect("fits");
            let m_mod = (&m % &pm).to_u64().expect("fits");
            let diff = sub_mod(poly[idx], acc_mod, *p);
            let t = mul_mod(diff, inv_mod(m_mod, *p), *p);
            acc += &m * BigUint::from(t);
            m *= &pm;
        }
        let v = if acc > half { BigInt::from(acc) - BigInt::from(modulus.clone()) } else { BigInt::from(acc) };
        coeffs.push(v);
    }
    Ok(coeffs)
}

fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r < BigInt::zero() { r + BigInt::from(p) } else { r };
    r.to_u64().expect("reduced below p")
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Characteristic polynomial modulo a prime via reduction to upper Hessenberg form.
fn hessenberg_char_poly(mut h: Vec<u64>, n: usize, p: u64) -> Vec<u64> {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[at(i, j)] != 0) else {
            continue;
        };
        if piv != j + 1 {
            for c in 0..n {
                h.swap(at(piv, c), at(j + 1, c));
            }
            for r in 0..n {
                h.swap(at(r, piv), at(r, j + 1));
            }
        }
        let inv = inv_mod(h[at(j + 1, j)], p);
        for r in j + 2..n {
            let u = mul_mod(h[at(r, j)], inv, p);
            if u == 0 {
                continue;
            }
            for c in 0..n {
                let v = mul_mod(u, h[at(j + 1, c)], p);
                h[at(r, c)] = sub_mod(h[at(r, c)], v, p);
            }
            for row in 0..n {
                let v = mul_mod(u, h[at(row, r)], p);
                h[at(row, j + 1)] = add_mod(h[at(row, j + 1)], v, p);
            }
        }
    }
    // polys[m] is the characteristic polynomial of the leading m×m block
    let mut polys: Vec<Vec<u64>> = alloc::vec![alloc::vec![1]];
    for m in 1..=n {
        let diag = h[at(m - 1, m - 1)];
        let prev = &polys[m - 1];
        let mut next = alloc::vec![0u64; m + 1];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = add_mod(next[d + 1], c, p);
            next[d] = sub_mod(next[d], mul_mod(diag, c, p), p);
        }
        let mut t = 1u64;
        for i in (1..m).rev() {
            t = mul_mod(t, h[at(i, i - 1)], p);
            let coef = mul_mod(h[at(i - 1, m - 1)], t, p);
            if coef == 0 {
                continue;
            }
            for (d, &c) in polys[i - 1].iter().enumerate() {
                next[d] = sub_mod(next[d], mul_mod(coef, c, p), p);
            }
        }
        polys.push(next);
    }
    polys.pop().expect("n ≥ 1")
}

/// Exact `tr(A^l)`; `tr(A^0)` is the dimension.
pub fn trace_power(a: &ExactMatrix, l: u32) -> Result<RingElement> {
    if !a.is_square() {
        return input("trace power of a non-square matrix");
    }
    if l == 0 {
        return Ok(RingElement::from_int(a.ring, a.rows as u64));
    }
    let mut power = a.clone();
    for _ in 1..l {
        power = a.try_mul(&power)?;
    }
    Ok(power.trace())
}

/// `max_j Σ_i ⌈a_ij⌉`, with the zero matrix assigned 1.
pub fn ceil_matrix(a: &ExactMatrix) -> f64 {
    if a.is_zero() {
        return 1.0;
    }
    (0..a.cols)
        .map(|j| (0..a.rows).map(|i| a.get(i, j).ceil()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Real symmetric `2k×2k` embedding `[[Re, −Im], [Im, Re]]` of a Gaussian matrix.
pub fn real_embedding(a: &ExactMatrix) -> ExactMatrix {
    let (r, c) = (a.rows, a.cols);
    ExactMatrix::from_fn(Ring::Integers, 2 * r, 2 * c, |i, j| {
        let e = a.get(i % r, j % c);
        let v = match (i < r, j < c) {
            (true, true) | (false, false) => e.re().clone(),
            (true, false) => -e.im().clone(),
            (false, true) => e.im().clone(),
        };
        RingElement::integer(v)
    })
}

impl core::fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.to_csv())
    }
}

impl SmithForm {
    /// `P·D·Q`, which must equal the input.
    pub fn reconstruct(&self) -> ExactMatrix {
        self.p.try_mul(&self.d).and_then(|pd| pd.try_mul(&self.q)).expect("shapes agree")
    }
}

/// Whether a square matrix has unit determinant.
pub fn is_unimodular(a: &ExactMatrix) -> bool {
    a.determinant().map(|d| d.is_unit()).unwrap_or(false)
}
