//! Stratification data of the two-lattice local models: component
//! records, closed-form differential kernel ranks with a matrix-shape
//! oracle, valuation bounds for the correspondence maps, normalized
//! exponents, and a finite-field census of chain points.

use std::collections::BTreeMap;

use crate::arith::{q_int, rank as q_rank, Q};
use crate::{Error, Result};

/// One irreducible component of the special fiber, with its standard
/// representative and differential kernel rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumRecord {
    /// Component index: `s` for the symplectic family, `r` for the
    /// linear one.
    pub parameter: usize,
    /// 1-based indices of the standard basis vectors spanning the
    /// representative subspace (the zero-exponent positions of the
    /// diagonal element).
    pub index_set: Vec<usize>,
    /// Exponents of `t` in the diagonal loop-group element.
    pub diagonal: Vec<i64>,
    pub dimension: u64,
    pub dp1: u64,
}

/// Kernel rank of the first projection differential on the symplectic
/// component `s`.
pub fn dp1_kernel_rank_symplectic(g: usize, s: usize) -> u64 {
    let d = (g - s) as u64;
    d * (d + 1) / 2
}

/// Kernel rank of the first projection differential on the linear
/// component `r`.
pub fn dp1_kernel_rank_linear(p: usize, j: usize, r: usize) -> u64 {
    ((j - r) as u64) * ((p - r) as u64)
}

/// The `g + 1` components of the genus-`g` symplectic model with
/// parahoric level `{0, g}`.
pub fn strata_symplectic(g: usize) -> Result<Vec<StratumRecord>> {
    if g < 1 {
        return Err(Error::BadRank("genus must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(g + 1);
    for s in 0..=g {
        let mut diagonal = Vec::with_capacity(2 * g);
        diagonal.extend(std::iter::repeat(1).take(s));
        diagonal.extend(std::iter::repeat(0).take(g - s));
        diagonal.extend(std::iter::repeat(1).take(g - s));
        diagonal.extend(std::iter::repeat(0).take(s));
        let index_set: Vec<usize> = (s + 1..=g).chain(2 * g - s + 1..=2 * g).collect();
        out.push(StratumRecord {
            parameter: s,
            index_set,
            diagonal,
            dimension: (g as u64) * (g as u64 + 1) / 2,
            dp1: dp1_kernel_rank_symplectic(g, s),
        });
    }
    Ok(out)
}

/// The components of the linear model of signature `(p, q)` with
/// parahoric level `{0, j}`, indexed by `max(0, j - q) <= r <= min(p, j)`.
pub fn strata_linear(n: usize, p: usize, q: usize, j: usize) -> Result<Vec<StratumRecord>> {
    if p + q != n || p == 0 || q == 0 {
        return Err(Error::BadRank(format!(
            "signature ({p}, {q}) does not fit rank {n}"
        )));
    }
    if j == 0 || j >= n {
        return Err(Error::BadRank(format!(
            "lattice index {j} must satisfy 1 <= j <= {}",
            n - 1
        )));
    }
    let r_lo = j.saturating_sub(q);
    let r_hi = p.min(j);
    let mut out = Vec::with_capacity(r_hi - r_lo + 1);
    for r in r_lo..=r_hi {
        let mut diagonal = Vec::with_capacity(n);
        diagonal.extend(std::iter::repeat(1).take(r));
        diagonal.extend(std::iter::repeat(0).take(j - r));
        diagonal.extend(std::iter::repeat(1).take(p - r));
        diagonal.extend(std::iter::repeat(0).take(q + r - j));
        let index_set: Vec<usize> = (r + 1..=j).chain(j + p - r + 1..=n).collect();
        out.push(StratumRecord {
            parameter: r,
            index_set,
            diagonal,
            dimension: (p as u64) * (q as u64),
            dp1: dp1_kernel_rank_linear(p, j, r),
        });
    }
    Ok(out)
}

/// Upper bound on the valuation of the pushforward map on the symplectic
/// component `s`: the sum of the smallest `s` weight entries.
pub fn alpha_valuation_bound_symplectic(weights: &[i64], s: usize) -> Result<i64> {
    check_decreasing(weights)?;
    let g = weights.len();
    if s > g {
        return Err(Error::BadRank(format!(
            "component {s} out of range for genus {g}"
        )));
    }
    Ok(weights[g - s..].iter().sum())
}

/// Upper bound on the valuation of the pushforward map on the linear
/// component `r`: tail sums of the two weight parts.
pub fn alpha_valuation_bound_linear(
    a: &[i64],
    b: &[i64],
    j: usize,
    r: usize,
) -> Result<i64> {
    check_decreasing(a)?;
    check_decreasing(b)?;
    let (p, q) = (a.len(), b.len());
    if r > p || r > j || j > p + q || j - r > q {
        return Err(Error::BadRank(format!(
            "component {r} out of range for (p, q, j) = ({p}, {q}, {j})"
        )));
    }
    let a_tail: i64 = a[p - r..].iter().sum();
    let b_tail: i64 = b[q - (q + r - j)..].iter().sum();
    Ok(a_tail + b_tail)
}

fn check_decreasing(w: &[i64]) -> Result<()> {
    if w.windows(2).any(|x| x[0] < x[1]) {
        Err(Error::NotDominant(format!("{w:?} is not decreasing")))
    } else {
        Ok(())
    }
}

/// Exponent normalizing the symplectic correspondence integrally: the
/// negated minimum over components of the valuation bound plus the
/// kernel rank.
pub fn normalized_exponent_symplectic(weights: &[i64]) -> Result<i64> {
    let g = weights.len();
    if g == 0 {
        return Err(Error::BadRank("need at least one weight entry".into()));
    }
    let mut best: Option<i64> = None;
    for record in strata_symplectic(g)? {
        let bound = alpha_valuation_bound_symplectic(weights, record.parameter)?;
        let value = bound + record.dp1 as i64;
        best = Some(best.map_or(value, |b: i64| b.min(value)));
    }
    Ok(-best.expect("at least one component"))
}

/// Exponent normalizing the degree-`j` linear correspondence integrally.
pub fn normalized_exponent_linear(a: &[i64], b: &[i64], j: usize) -> Result<i64> {
    let (p, q) = (a.len(), b.len());
    let mut best: Option<i64> = None;
    for record in strata_linear(p + q, p, q, j)? {
        let bound = alpha_valuation_bound_linear(a, b, j, record.parameter)?;
        let value = bound + record.dp1 as i64;
        best = Some(best.map_or(value, |x: i64| x.min(value)));
    }
    Ok(-best.expect("at least one component"))
}

const ORACLE_MAX_GENUS: usize = 3;
const ORACLE_MAX_RANK: usize = 6;
const TRUNCATION: i64 = 3;

/// Kernel rank of the projection differential on the symplectic stratum
/// `s`, computed from explicit truncated matrix shapes: the quotient of
/// the two-lattice parahoric algebra by its intersection with the
/// conjugate of the moving-lattice one, relative to the self-conjugate
/// part, inside the similitude Lie algebra.
pub fn lie_quotient_oracle_symplectic(g: usize, s: usize) -> Result<u64> {
    if g < 1 || s > g {
        return Err(Error::BadRank(format!("bad component (g, s) = ({g}, {s})")));
    }
    if g > ORACLE_MAX_GENUS {
        return Err(Error::Oversize(format!(
            "oracle supports genus up to {ORACLE_MAX_GENUS}, got {g}"
        )));
    }
    let n = 2 * g;
    let exps = diag_exponents_symplectic(g, s);
    let inner = shape_dim(n, &conjugated_shape(n, g, &exps, true), true);
    let outer = shape_dim(n, &conjugated_shape(n, g, &exps, false), true);
    Ok((outer - inner) as u64)
}

/// Kernel rank of the projection differential on the linear stratum `r`,
/// computed from the same truncated matrix shapes without the symmetry
/// constraint.
pub fn lie_quotient_oracle_linear(
    n: usize,
    p: usize,
    q: usize,
    j: usize,
    r: usize,
) -> Result<u64> {
    if p + q != n || j == 0 || j >= n || r > p.min(j) || j > r + q {
        return Err(Error::BadRank(format!(
            "bad component (n, p, q, j, r) = ({n}, {p}, {q}, {j}, {r})"
        )));
    }
    if n > ORACLE_MAX_RANK {
        return Err(Error::Oversize(format!(
            "oracle supports rank up to {ORACLE_MAX_RANK}, got {n}"
        )));
    }
    let exps = diag_exponents_linear(p, q, j, r);
    let inner = shape_dim(n, &conjugated_shape(n, j, &exps, true), false);
    let outer = shape_dim(n, &conjugated_shape(n, j, &exps, false), false);
    Ok((outer - inner) as u64)
}

fn diag_exponents_symplectic(g: usize, s: usize) -> Vec<i64> {
    strata_symplectic(g)
        .expect("validated")
        .into_iter()
        .find(|rec| rec.parameter == s)
        .expect("component in range")
        .diagonal
}

fn diag_exponents_linear(p: usize, q: usize, j: usize, r: usize) -> Vec<i64> {
    strata_linear(p + q, p, q, j)
        .expect("validated")
        .into_iter()
        .find(|rec| rec.parameter == r)
        .expect("component in range")
        .diagonal
}

/// Valuation floor of entry (row, col) in the two-lattice parahoric: the
/// upper-right block (rows <= cut < cols) sits in `t` times the integers.
fn parahoric_floor(cut: usize, row: usize, col: usize) -> i64 {
    i64::from(row < cut && col >= cut)
}

/// Valuation floors after intersecting the two-lattice parahoric with the
/// diagonal conjugate of either itself (`self_target`) or of the
/// moving-lattice endomorphism algebra.
fn conjugated_shape(n: usize, cut: usize, exps: &[i64], self_target: bool) -> Vec<Vec<i64>> {
    let mut out = vec![vec![0i64; n]; n];
    for row in 0..n {
        for col in 0..n {
            let base = parahoric_floor(cut, row, col);
            let target = if self_target {
                base
            } else {
                // Endomorphisms of the moving lattice alone: upper-right
                // entries in t * O, lower-left entries allowed a pole.
                if row < cut && col >= cut {
                    1
                } else if row >= cut && col < cut {
                    -1
                } else {
                    0
                }
            };
            out[row][col] = base.max(target + exps[row] - exps[col]);
        }
    }
    out
}

/// Dimension over the base field of the truncated matrix shape, with an
/// optional similitude-symplectic symmetry constraint. Coordinates are
/// `t^m` coefficients of entries with `m` from the entry's floor up to
/// the truncation order; the constraint is imposed by exact rank
/// computation.
fn shape_dim(n: usize, floors: &[Vec<i64>], symplectic: bool) -> usize {
    let mut coord_index: BTreeMap<(usize, usize, i64), usize> = BTreeMap::new();
    for (row, row_floors) in floors.iter().enumerate() {
        for (col, &floor) in row_floors.iter().enumerate() {
            for m in floor.max(0)..TRUNCATION {
                let k = coord_index.len();
                coord_index.insert((row, col, m), k);
            }
        }
    }
    if !symplectic {
        return coord_index.len();
    }
    // Unknowns: shape coordinates plus the truncated similitude scalar.
    let width = coord_index.len() + TRUNCATION as usize;
    let g = n / 2;
    let sign = |i: usize| if i < g { 1i64 } else { -1 };
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for m in 0..TRUNCATION {
                let mut row = vec![q_int(0); width];
                let mut nonzero = false;
                // (X^T J + J X)_{ab} = s(n-1-b) X_{n-1-b, a} + s(a) X_{n-1-a, b}.
                for (r, c, s) in [(n - 1 - b, a, sign(n - 1 - b)), (n - 1 - a, b, sign(a))] {
                    if let Some(&k) = coord_index.get(&(r, c, m)) {
                        row[k] += q_int(s);
                        nonzero = true;
                    }
                }
                if b == n - 1 - a {
                    row[coord_index.len() + m as usize] -= q_int(sign(a));
                    nonzero = true;
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
    }
    width - q_rank(&rows)
}

/// Shape parameters for the finite-field census of chain points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CensusFamily {
    Linear { n: usize, p: usize, q: usize, j: usize },
    Symplectic { g: usize },
}

/// Rank signature of one chain point: for each of the two chain maps,
/// the rank of its restriction to the subspaces and the rank of the map
/// induced on the quotients.
pub type CensusSignature = Vec<(usize, usize)>;

/// Enumerates all chain points over the field with `q0` elements and
/// groups them by rank signature.
pub fn finite_field_census(
    family: &CensusFamily,
    q0: u64,
) -> Result<BTreeMap<CensusSignature, u64>> {
    let gf = Gf::new(q0)?;
    let (n, cut, sub_rank, symplectic) = match family {
        CensusFamily::Linear { n, p, q, j } => {
            if p + q != *n || *j == 0 || *j >= *n {
                return Err(Error::BadRank(format!(
                    "bad census shape (n, p, q, j) = ({n}, {p}, {q}, {j})"
                )));
            }
            if *n > 4 {
                return Err(Error::Oversize(format!(
                    "census supports rank up to 4, got {n}"
                )));
            }
            (*n, *j, *q, false)
        }
        CensusFamily::Symplectic { g } => {
            if *g == 0 {
                return Err(Error::BadRank("genus must be at least 1".into()));
            }
            if *g > 2 {
                return Err(Error::Oversize(format!(
                    "census supports genus up to 2, got {g}"
                )));
            }
            (2 * g, *g, *g, true)
        }
    };
    // Chain maps between the two lattices reduce to complementary 0/1
    // diagonal patterns over the residue field.
    let mask_fwd: Vec<u64> = (0..n).map(|i| u64::from(i < cut)).collect();
    let mask_bwd: Vec<u64> = (0..n).map(|i| u64::from(i >= cut)).collect();

    let mut spaces = enumerate_subspaces(gf, n, sub_rank);
    if symplectic {
        spaces.retain(|basis| is_isotropic(gf, basis));
    }

    let mut census: BTreeMap<CensusSignature, u64> = BTreeMap::new();
    for f0 in &spaces {
        let r0 = Rref::new(gf, f0);
        for f1 in &spaces {
            let r1 = Rref::new(gf, f1);
            if !maps_into(gf, f0, &mask_fwd, &r1) || !maps_into(gf, f1, &mask_bwd, &r0) {
                continue;
            }
            let sig = vec![
                map_signature(gf, n, f0, f1, &mask_fwd),
                map_signature(gf, n, f1, f0, &mask_bwd),
            ];
            *census.entry(sig).or_insert(0) += 1;
        }
    }
    Ok(census)
}

/// Arithmetic in the field with 2, 3, or 4 elements. The four-element
/// field is represented as 0, 1, x, x+1 with x^2 = x + 1.
#[derive(Clone, Copy)]
struct Gf {
    q: u64,
}

const GF4_MUL: [[u64; 4]; 4] = [
    [0, 0, 0, 0],
    [0, 1, 2, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
];

impl Gf {
    fn new(q: u64) -> Result<Gf> {
        if matches!(q, 2 | 3 | 4) {
            Ok(Gf { q })
        } else {
            Err(Error::Invalid(format!(
                "census fields have 2, 3, or 4 elements, got {q}"
            )))
        }
    }

    fn add(self, a: u64, b: u64) -> u64 {
        if self.q == 4 {
            a ^ b
        } else {
            (a + b) % self.q
        }
    }

    fn neg(self, a: u64) -> u64 {
        if self.q == 4 {
            a
        } else {
            (self.q - a) % self.q
        }
    }

    fn mul(self, a: u64, b: u64) -> u64 {
        if self.q == 4 {
            GF4_MUL[a as usize][b as usize]
        } else {
            a * b % self.q
        }
    }

    fn inv(self, a: u64) -> u64 {
        (1..self.q)
            .find(|&x| self.mul(a, x) == 1)
            .expect("nonzero element is invertible")
    }
}

/// Row-reduced echelon basis of a subspace, for membership tests.
struct Rref {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Rref {
    fn new(gf: Gf, basis: &[Vec<u64>]) -> Rref {
        let mut rows: Vec<Vec<u64>> = basis.to_vec();
        let mut pivots = Vec::new();
        let width = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..width {
            let Some(pivot_row) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot_row);
            let inv = gf.inv(rows[rank][col]);
            for x in rows[rank].iter_mut() {
                *x = gf.mul(*x, inv);
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let factor = rows[r][col];
                    for c in 0..width {
                        let sub = gf.mul(factor, rows[rank][c]);
                        rows[r][c] = gf.add(rows[r][c], gf.neg(sub));
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        Rref { rows, pivots }
    }

    fn contains(&self, gf: Gf, v: &[u64]) -> bool {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p] != 0 {
                let factor = v[p];
                for c in 0..v.len() {
                    let sub = gf.mul(factor, row[c]);
                    v[c] = gf.add(v[c], gf.neg(sub));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

fn matrix_rank(gf: Gf, rows: &[Vec<u64>]) -> usize {
    Rref::new(gf, rows).rank()
}

/// All `k`-dimensional subspaces of the `n`-space, as row-reduced bases.
fn enumerate_subspaces(gf: Gf, n: usize, k: usize) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        // Free positions: to the right of each pivot, in non-pivot columns.
        let mut free = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for c in p + 1..n {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut values = vec![0u64; free.len()];
        loop {
            let mut basis = vec![vec![0u64; n]; k];
            for (i, &p) in pivots.iter().enumerate() {
                basis[i][p] = 1;
            }
            for (&(i, c), &v) in free.iter().zip(&values) {
                basis[i][c] = v;
            }
            out.push(basis);
            // Odometer over the free values.
            let mut pos = 0;
            loop {
                if pos == values.len() {
                    break;
                }
                values[pos] += 1;
                if values[pos] < gf.q {
                    break;
                }
                values[pos] = 0;
                pos += 1;
            }
            if pos == values.len() {
                break;
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize, n: usize, k: usize) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(out, cur, i + 1, n, k);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, n, k);
    out
}

/// Antidiagonal symplectic form: +1 in the first half, -1 in the second.
fn form_value(gf: Gf, u: &[u64], v: &[u64]) -> u64 {
    let n = u.len();
    let mut acc = 0u64;
    for i in 0..n {
        let term = gf.mul(u[i], v[n - 1 - i]);
        let signed = if i < n / 2 { term } else { gf.neg(term) };
        acc = gf.add(acc, signed);
    }
    acc
}

fn is_isotropic(gf: Gf, basis: &[Vec<u64>]) -> bool {
    for (i, u) in basis.iter().enumerate() {
        for v in &basis[i..] {
            if form_value(gf, u, v) != 0 {
                return false;
            }
        }
    }
    true
}

fn apply_mask(gf: Gf, mask: &[u64], v: &[u64]) -> Vec<u64> {
    mask.iter().zip(v).map(|(&m, &x)| gf.mul(m, x)).collect()
}

fn maps_into(gf: Gf, src: &[Vec<u64>], mask: &[u64], dst: &Rref) -> bool {
    src.iter()
        .all(|v| dst.contains(gf, &apply_mask(gf, mask, v)))
}

/// Rank of the chain map restricted to the subspaces and of the induced
/// map on quotients.
fn map_signature(
    gf: Gf,
    n: usize,
    src: &[Vec<u64>],
    dst: &[Vec<u64>],
    mask: &[u64],
) -> (usize, usize) {
    let restricted: Vec<Vec<u64>> = src.iter().map(|v| apply_mask(gf, mask, v)).collect();
    let rank_sub = matrix_rank(gf, &restricted);
    // Image of the full space plus the destination subspace, modulo it.
    let mut stacked: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut e = vec![0u64; n];
            e[i] = 1;
            apply_mask(gf, mask, &e)
        })
        .collect();
    stacked.extend(dst.iter().cloned());
    let rank_quot = matrix_rank(gf, &stacked) - dst.len();
    (rank_sub, rank_quot)
}
