//! Weight multiplicities, characters and twisted characters of linear
//! blocks, the lattice coset-counting oracle behind the spherical
//! transform, and the two triangular basis changes it induces.
//!
//! Everything is exact: multiplicities come from the Freudenthal
//! recursion (with a tableau-counting oracle in the tests), coset counts
//! from explicit Hermite-form enumeration with valuation bookkeeping, and
//! the basis-change coefficients from unitriangular solves over the
//! rationals with integrality asserted, never rounded.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::arith::{lagrange_interpolate, q_int, Q};
use crate::{Error, Result};

/// Largest total size accepted by the coset oracle.
pub const ORACLE_MAX_TOTAL: i64 = 4;
/// Largest rank accepted by the coset oracle.
pub const ORACLE_MAX_RANK: usize = 4;
/// Primes used when recovering coefficient polynomials by interpolation.
pub const INTERPOLATION_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn is_decreasing(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

fn require_dominant(v: &[i64]) -> Result<()> {
    if is_decreasing(v) {
        Ok(())
    } else {
        Err(Error::NotDominant(format!("{v:?} is not weakly decreasing")))
    }
}

/// `<v, 2 rho>` for the rank-`n` linear block: `sum v_i (n + 1 - 2i)`.
fn pair_two_rho(v: &[i64]) -> i64 {
    let n = v.len() as i64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| x * (n + 1 - 2 * (i as i64 + 1)))
        .sum()
}

/// `<v, rho>` as an exact rational.
pub fn pair_rho(v: &[i64]) -> Q {
    Q::new(pair_two_rho(v), 2)
}

/// Dominance for same-total integer vectors: prefix sums of `a` never
/// exceed those of `b`, with equal totals.
pub fn dominance_leq_int(a: &[i64], b: &[i64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut pa = 0i64;
    let mut pb = 0i64;
    for (x, y) in a.iter().zip(b) {
        pa += x;
        pb += y;
        if pa > pb {
            return false;
        }
    }
    pa == pb
}

/// All dominant integer vectors with the same total that are
/// dominance-below `lambda`, sorted by decreasing `<., rho>` (so `lambda`
/// itself comes first).
pub fn dominant_weights_below(lambda: &[i64]) -> Result<Vec<Vec<i64>>> {
    require_dominant(lambda)?;
    let n = lambda.len();
    let total: i64 = lambda.iter().sum();
    let hi = *lambda.first().expect("nonempty");
    let lo = *lambda.last().expect("nonempty");
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(
        out: &mut Vec<Vec<i64>>,
        cur: &mut Vec<i64>,
        lambda: &[i64],
        remaining: i64,
        lo: i64,
        hi: i64,
    ) {
        let n = lambda.len();
        if cur.len() == n {
            if remaining == 0 && dominance_leq_int(cur, lambda) {
                out.push(cur.clone());
            }
            return;
        }
        let slots_left = (n - cur.len()) as i64;
        let cap = cur.last().copied().unwrap_or(hi);
        for v in (lo..=cap).rev() {
            // Remaining entries are each at most v and at least lo.
            let rest = remaining - v;
            if rest < (slots_left - 1) * lo || rest > (slots_left - 1) * v {
                continue;
            }
            cur.push(v);
            rec(out, cur, lambda, rest, lo, hi);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, lambda, total, lo, hi);
    out.sort_by_key(|mu| -pair_two_rho(mu));
    Ok(out)
}

/// Weight multiplicities of the irreducible with highest weight `lambda`
/// on a rank-`n` linear block, as a map over dominant weights, by the
/// Freudenthal recursion.
pub fn weight_multiplicities(lambda: &[i64]) -> Result<BTreeMap<Vec<i64>, u64>> {
    require_dominant(lambda)?;
    let n = lambda.len();
    let dominants = dominant_weights_below(lambda)?;
    let lam_norm: i64 = lambda.iter().map(|&x| x * x).sum();
    let lam_rho = pair_two_rho(lambda);
    let pos_roots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let hi = *lambda.first().expect("nonempty");
    let lo = *lambda.last().expect("nonempty");

    let mut mult: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for mu in &dominants {
        if mu == lambda {
            mult.insert(mu.clone(), 1);
            continue;
        }
        let mu_norm: i64 = mu.iter().map(|&x| x * x).sum();
        let mu_rho = pair_two_rho(mu);
        let denom = lam_norm + lam_rho - mu_norm - mu_rho;
        assert!(denom > 0, "recursion denominator must be positive");
        let mut rhs: i64 = 0;
        for &(i, j) in &pos_roots {
            // alpha = e_i - e_j; walk mu + k alpha while entries stay in
            // the weight hull.
            let mut shifted = mu.clone();
            loop {
                shifted[i] += 1;
                shifted[j] -= 1;
                if shifted[i] > hi || shifted[j] < lo {
                    break;
                }
                let mut dom = shifted.clone();
                dom.sort_unstable_by(|a, b| b.cmp(a));
                let m = mult.get(&dom).copied().unwrap_or(0);
                if m > 0 {
                    // (mu + k alpha, alpha) for alpha = e_i - e_j.
                    let pairing = shifted[i] - shifted[j];
                    rhs += 2 * pairing * m as i64;
                }
            }
        }
        assert!(rhs >= 0 && rhs % denom == 0, "Freudenthal division must be exact");
        let m = (rhs / denom) as u64;
        if m > 0 {
            mult.insert(mu.clone(), m);
        }
    }
    Ok(mult)
}

/// All distinct rearrangements of a vector.
fn distinct_permutations(v: &[i64]) -> Vec<Vec<i64>> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    // Lexicographic next-permutation walk over the multiset.
    loop {
        out.push(sorted.clone());
        // Find the rightmost ascent.
        let Some(i) = (0..sorted.len().saturating_sub(1))
            .rev()
            .find(|&i| sorted[i] < sorted[i + 1])
        else {
            break;
        };
        let j = (i + 1..sorted.len())
            .rev()
            .find(|&j| sorted[j] > sorted[i])
            .expect("ascent guarantees a successor");
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
    }
    out
}

/// An element of the group algebra of the character lattice of a rank-`n`
/// torus: finitely many integer exponent vectors with integer
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub n: usize,
    pub coeffs: BTreeMap<Vec<i64>, i64>,
}

impl Character {
    pub fn coeff(&self, key: &[i64]) -> i64 {
        self.coeffs.get(key).copied().unwrap_or(0)
    }
}

/// Full character of the irreducible with highest weight `lambda`: the
/// Weyl-orbit spread of the dominant multiplicity table.
pub fn character(lambda: &[i64]) -> Result<Character> {
    let mult = weight_multiplicities(lambda)?;
    let mut coeffs = BTreeMap::new();
    for (mu, m) in &mult {
        for perm in distinct_permutations(mu) {
            coeffs.insert(perm, *m as i64);
        }
    }
    Ok(Character {
        n: lambda.len(),
        coeffs,
    })
}

/// Orbit sum `[mu]`: each distinct rearrangement once.
pub fn orbit_sum(mu: &[i64]) -> Result<Character> {
    require_dominant(mu)?;
    let coeffs = distinct_permutations(mu)
        .into_iter()
        .map(|v| (v, 1))
        .collect();
    Ok(Character {
        n: mu.len(),
        coeffs,
    })
}

/// Trace function of a twisted conjugacy class datum on a degree-`d`
/// restriction block: the twisted trace of the product of the factor
/// evaluations, which is the ordinary character of the single-factor
/// irreducible in norm coordinates. The block degree changes how
/// exponents pair, not the coefficient table.
pub fn twisted_character(degree: usize, lambda: &[i64]) -> Result<Character> {
    if degree == 0 {
        return Err(Error::BadRank("block degree must be positive".into()));
    }
    character(lambda)
}

/// Expansion of the character of `lambda` over orbit sums: the map
/// `mu -> multiplicity` over dominant `mu`, unitriangular with leading
/// coefficient one.
pub fn orbit_expansion(lambda: &[i64]) -> Result<BTreeMap<Vec<i64>, u64>> {
    weight_multiplicities(lambda)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Valuation of `x` modulo `p^cap`, with zero reported as `cap`.
fn val_mod(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while v < cap && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn mod_inverse(a: u64, modulus: u64) -> u64 {
    // Extended Euclid; `a` must be a unit.
    let (mut old_r, mut r) = (a as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    assert_eq!(old_r.abs(), 1, "not a unit");
    let m = modulus as i128;
    ((old_s * old_r.signum()).rem_euclid(m)) as u64
}

/// Valuations of the elementary divisors of an integer matrix at `p`,
/// sorted decreasing, via minor valuations. Exact for ranks up to 4.
/// Reference implementation kept to cross-check the modular reduction.
#[cfg(test)]
fn elementary_divisor_type(mat: &[Vec<i128>], p: u64) -> Vec<i64> {
    let n = mat.len();
    let mut minor_val = vec![0i64; n + 1];
    for k in 1..=n {
        let mut best: Option<i64> = None;
        // All k x k minors.
        let rows = subsets(n, k);
        for ri in &rows {
            for ci in &rows {
                let det = minor_det(mat, ri, ci);
                if det == 0 {
                    continue;
                }
                let mut v = 0i64;
                let mut d = det.abs() as u128;
                let pp = p as u128;
                while d % pp == 0 {
                    d /= pp;
                    v += 1;
                }
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        minor_val[k] = best.expect("full-rank matrix has nonzero minors");
    }
    let mut divisors: Vec<i64> = (1..=n).map(|k| minor_val[k] - minor_val[k - 1]).collect();
    divisors.sort_unstable_by(|a, b| b.cmp(a));
    divisors
}

#[cfg(test)]
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
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

#[cfg(test)]
fn minor_det(mat: &[Vec<i128>], rows: &[usize], cols: &[usize]) -> i128 {
    let k = rows.len();
    if k == 1 {
        return mat[rows[0]][cols[0]];
    }
    let mut det = 0i128;
    let mut sign = 1i128;
    for (idx, &c) in cols.iter().enumerate() {
        let sub_cols: Vec<usize> = cols
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, &x)| x)
            .collect();
        det += sign * mat[rows[0]][c] * minor_det(mat, &rows[1..], &sub_cols);
        sign = -sign;
    }
    det
}

/// Diagonal valuations after column reduction to lower-triangular form
/// over `Z / p^cap`, in row order, consuming a flat row-major buffer of
/// already-reduced entries. This reads off the torus part of the standard
/// decomposition of the matrix against the integral subgroup.
fn iwasawa_diagonal_valuations(entries: &mut [u64], n: usize, p: u64, cap: u32) -> Vec<i64> {
    let modulus = (p as u128).pow(cap) as u64;
    let mut out = vec![0i64; n];
    for r in 0..n {
        let (pivot_col, pivot_val) = (r..n)
            .map(|c| (c, val_mod(entries[r * n + c], p, cap)))
            .min_by_key(|&(c, v)| (v, c))
            .expect("row range nonempty");
        assert!(pivot_val < cap, "precision exhausted in column reduction");
        if pivot_col != r {
            for row in 0..n {
                entries.swap(row * n + r, row * n + pivot_col);
            }
        }
        let pk = p.pow(pivot_val);
        let reduced_mod = modulus / pk;
        let unit_inv = mod_inverse(entries[r * n + r] / pk % reduced_mod, reduced_mod);
        for c in r + 1..n {
            let b = entries[r * n + c];
            if b == 0 {
                continue;
            }
            let factor = (b / pk) % reduced_mod * unit_inv % reduced_mod;
            for row in 0..n {
                let sub = (factor as u128 * entries[row * n + r] as u128 % modulus as u128) as u64;
                let e = &mut entries[row * n + c];
                *e = (*e + modulus - sub) % modulus;
            }
        }
        out[r] = pivot_val as i64;
    }
    out
}

/// Valuations at `p` of the elementary divisors of a full-rank matrix
/// given as a flat row-major buffer modulo `p^cap`, written to `out`
/// sorted decreasing. Exact when the valuations sum below `cap`, which
/// keeps every pivot under the precision cap; the buffer is scratch.
fn divisor_valuations_mod(entries: &mut [u64], n: usize, p: u64, cap: u32, out: &mut Vec<i64>) {
    let modulus = (p as u128).pow(cap) as u64;
    out.clear();
    for k in 0..n {
        let mut pivot: Option<(u32, usize, usize)> = None;
        'scan: for r in k..n {
            for c in k..n {
                let v = val_mod(entries[r * n + c], p, cap);
                if pivot.is_none_or(|(best, _, _)| v < best) {
                    pivot = Some((v, r, c));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let (v, pr, pc) = pivot.expect("pivot scan range nonempty");
        assert!(v < cap, "precision exhausted in divisor reduction");
        if pr != k {
            for c in 0..n {
                entries.swap(pr * n + c, k * n + c);
            }
        }
        if pc != k {
            for r in 0..n {
                entries.swap(r * n + pc, r * n + k);
            }
        }
        let pk = p.pow(v);
        let reduced_mod = modulus / pk;
        let unit_inv = mod_inverse(entries[k * n + k] / pk % reduced_mod, reduced_mod);
        for c in k + 1..n {
            let b = entries[k * n + c];
            if b == 0 {
                continue;
            }
            let factor = (b / pk) % reduced_mod * unit_inv % reduced_mod;
            for r in k..n {
                let sub = (factor as u128 * entries[r * n + k] as u128 % modulus as u128) as u64;
                let e = &mut entries[r * n + c];
                *e = (*e + modulus - sub) % modulus;
            }
        }
        // Row clearing below the pivot would only zero column k: the pivot
        // row is zero past the pivot after the column pass, so the residual
        // submatrix is already final and later rounds never read column k.
        out.push(v as i64);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
}

/// Coset-counting oracle: for a dominant `lambda` on a rank-`n` linear
/// block and a prime `p`, returns the number of left cosets in the
/// double coset of `diag(p^lambda)` whose torus part under the standard
/// lower-triangular decomposition is `diag(p^mu)`, for every exponent
/// vector `mu` that occurs (in coordinate order, not sorted).
pub fn satake_coset_oracle(
    n: usize,
    lambda: &[i64],
    p: u64,
) -> Result<BTreeMap<Vec<i64>, u64>> {
    if lambda.len() != n {
        return Err(Error::Shape(format!("expected {n} entries")));
    }
    require_dominant(lambda)?;
    if !is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    if n > ORACLE_MAX_RANK {
        return Err(Error::Oversize(format!(
            "rank {n} exceeds the oracle bound {ORACLE_MAX_RANK}"
        )));
    }
    let shift = *lambda.last().expect("nonempty");
    let norm: Vec<i64> = lambda.iter().map(|&x| x - shift).collect();
    let total: i64 = norm.iter().sum();
    if total > ORACLE_MAX_TOTAL {
        return Err(Error::Oversize(format!(
            "normalized total {total} exceeds the oracle bound {ORACLE_MAX_TOTAL}"
        )));
    }
    let target_type: Vec<i64> = {
        let mut t = norm.clone();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    };
    let cap = total as u32 + 1;

    let mut tally: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    let mut work = vec![0u64; n * n];
    let mut divisors: Vec<i64> = Vec::with_capacity(n);
    for v in compositions_of(total, n) {
        // Hermite family: upper triangular, diagonal p^{v_i}, row i
        // entries modulo p^{v_i} above the diagonal.
        let diag: Vec<u64> = v.iter().map(|&e| p.pow(e as u32)).collect();
        let mut mat = vec![0u64; n * n];
        let mut free_positions = Vec::new();
        for i in 0..n {
            mat[i * n + i] = diag[i];
            for j in i + 1..n {
                if diag[i] > 1 {
                    free_positions.push((i * n + j, diag[i]));
                }
            }
        }
        let mut counters = vec![0u64; free_positions.len()];
        loop {
            for (slot, &(pos, _)) in free_positions.iter().enumerate() {
                mat[pos] = counters[slot];
            }
            work.copy_from_slice(&mat);
            divisor_valuations_mod(&mut work, n, p, cap, &mut divisors);
            if divisors == target_type {
                work.copy_from_slice(&mat);
                let mu = iwasawa_diagonal_valuations(&mut work, n, p, cap);
                debug_assert_eq!(mu.iter().sum::<i64>(), total);
                let key: Vec<i64> = mu.iter().map(|&x| x + shift).collect();
                *tally.entry(key).or_insert(0) += 1;
            }
            // Odometer increment over the free entries.
            let mut slot = 0;
            loop {
                if slot == free_positions.len() {
                    break;
                }
                counters[slot] += 1;
                if counters[slot] < free_positions[slot].1 {
                    break;
                }
                counters[slot] = 0;
                slot += 1;
            }
            if slot == free_positions.len() {
                break;
            }
        }
    }
    Ok(tally)
}

fn compositions_of(total: i64, parts: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(out: &mut Vec<Vec<i64>>, cur: &mut Vec<i64>, remaining: i64, parts_left: usize) {
        if parts_left == 1 {
            cur.push(remaining);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=remaining {
            cur.push(v);
            rec(out, cur, remaining - v, parts_left - 1);
            cur.pop();
        }
    }
    if parts > 0 {
        rec(&mut out, &mut cur, total, parts);
    }
    out
}

/// The two unitriangular basis changes attached to the ideal of dominant
/// weights below `lambda`: `forward[nu][mu]` expands the transform of the
/// coset basis element at `nu` over scaled characters, and
/// `inverse[nu][mu]` expands scaled characters over transformed coset
/// elements. Entries are integer polynomials in the residue field size
/// (coefficient vectors, constant term first), recovered by interpolation
/// across the supplied primes; absent entries are zero and the diagonal
/// is the constant `[1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    pub weights: Vec<Vec<i64>>,
    pub forward: BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, Vec<i64>>>,
    pub inverse: BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, Vec<i64>>>,
}

pub fn satake_basis_change(n: usize, lambda: &[i64], primes: &[u64]) -> Result<BasisChange> {
    if primes.is_empty() {
        return Err(Error::Invalid("need at least one prime".into()));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != primes.len() {
        return Err(Error::Invalid("interpolation primes must be distinct".into()));
    }
    let weights = dominant_weights_below(lambda)?;
    // deg b_nu(mu) <= <nu - mu, rho>, so the list-wide bound is the rho
    // pairing spread of the ideal; interpolation needs one more prime.
    let spread = pair_rho(&weights[0]) - pair_rho(weights.last().expect("nonempty"));
    assert!(spread.is_integer(), "rho spread must be integral");
    let needed = spread.to_integer() as usize + 1;
    if primes.len() < needed {
        return Err(Error::Oversize(format!(
            "basis change at {lambda:?} needs {needed} interpolation primes, got {}",
            primes.len()
        )));
    }
    let chars: BTreeMap<Vec<i64>, Character> = weights
        .iter()
        .map(|w| Ok((w.clone(), character(w)?)))
        .collect::<Result<_>>()?;

    let mut forward: BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, Vec<i64>>> = BTreeMap::new();
    for nu in &weights {
        let rows: Vec<BTreeMap<Vec<i64>, i64>> = primes
            .iter()
            .map(|&p| expand_over_characters(n, nu, p, &weights, &chars))
            .collect::<Result<_>>()?;
        let mut keys: BTreeSet<Vec<i64>> = BTreeSet::new();
        for r in &rows {
            keys.extend(r.keys().cloned());
        }
        let mut row: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
        for mu in keys {
            let points: Vec<(Q, Q)> = primes
                .iter()
                .zip(&rows)
                .map(|(&p, r)| (q_int(p as i64), q_int(r.get(&mu).copied().unwrap_or(0))))
                .collect();
            let coeffs = lagrange_interpolate(&points)?;
            let ints: Vec<i64> = coeffs
                .iter()
                .map(|c| {
                    if c.is_integer() {
                        Ok(c.to_integer())
                    } else {
                        Err(Error::Invalid(format!(
                            "expansion coefficient at {mu:?} is not an integer polynomial"
                        )))
                    }
                })
                .collect::<Result<_>>()?;
            let poly = poly_trim(ints);
            if poly.is_empty() {
                continue;
            }
            let entry_bound = pair_rho(nu) - pair_rho(&mu);
            if q_int(poly.len() as i64 - 1) > entry_bound {
                return Err(Error::Invalid(format!(
                    "expansion coefficient at {mu:?} exceeds its degree bound"
                )));
            }
            row.insert(mu, poly);
        }
        if row.get(nu) != Some(&vec![1]) {
            return Err(Error::Invalid("leading coefficient must be one".into()));
        }
        forward.insert(nu.clone(), row);
    }

    // Unitriangular inversion over the same weight list (ordered with
    // lambda first, decreasing <., rho>).
    let mut inverse: BTreeMap<Vec<i64>, BTreeMap<Vec<i64>, Vec<i64>>> = BTreeMap::new();
    for (i, nu) in weights.iter().enumerate() {
        let mut row: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::from([(nu.clone(), vec![1])]);
        // inverse[nu] = e_nu - sum_{mu < nu} (forward[nu][mu]) inverse[mu],
        // solved in order of the list.
        for mu in weights.iter().skip(i + 1) {
            let mut acc: Vec<i64> = Vec::new();
            for (kappa, c) in &row {
                if kappa == mu {
                    continue;
                }
                if let Some(f) = forward[kappa].get(mu) {
                    poly_add_assign(&mut acc, &poly_mul(c, f));
                }
            }
            if !acc.is_empty() {
                row.insert(mu.clone(), acc.iter().map(|&x| -x).collect());
            }
        }
        inverse.insert(nu.clone(), row);
    }
    // Verify the inversion: inverse . forward = identity.
    for nu in &weights {
        for mu in &weights {
            let mut acc: Vec<i64> = Vec::new();
            for (kappa, c) in &inverse[nu] {
                if let Some(f) = forward[kappa].get(mu) {
                    poly_add_assign(&mut acc, &poly_mul(c, f));
                }
            }
            let expected: &[i64] = if nu == mu { &[1] } else { &[] };
            assert_eq!(acc, expected, "unitriangular inversion check failed");
        }
    }
    Ok(BasisChange {
        weights,
        forward,
        inverse,
    })
}

fn poly_trim(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(out)
}

fn poly_add_assign(acc: &mut Vec<i64>, other: &[i64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, &b) in acc.iter_mut().zip(other) {
        *a += b;
    }
    while acc.last() == Some(&0) {
        acc.pop();
    }
}

/// Expands the transform of one coset basis element over scaled
/// characters at a single prime; coefficients must come out integral.
fn expand_over_characters(
    n: usize,
    nu: &[i64],
    p: u64,
    weights: &[Vec<i64>],
    chars: &BTreeMap<Vec<i64>, Character>,
) -> Result<BTreeMap<Vec<i64>, i64>> {
    let tally = satake_coset_oracle(n, nu, p)?;
    // Exponent-basis coefficients of the transform, normalized by
    // p^{-<nu, rho>} to clear half-integer powers.
    let mut residual: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
    for (mu, count) in &tally {
        let exp = pair_rho(mu) - pair_rho(nu);
        assert!(exp.is_integer(), "rho pairing difference must be integral");
        let scale = pow_q(p, exp.to_integer());
        let entry = residual.entry(mu.clone()).or_insert_with(Q::zero);
        *entry += q_int(*count as i64) * scale;
    }
    let mut row: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for target in weights {
        if !dominance_leq_int(target, nu) {
            continue;
        }
        let lead = residual.get(target).copied().unwrap_or_else(Q::zero);
        if lead == Q::zero() {
            continue;
        }
        // Coefficient of the scaled character at `target`.
        let coeff = lead * pow_q(p, (pair_rho(nu) - pair_rho(target)).to_integer());
        if !coeff.is_integer() {
            return Err(Error::Invalid(format!(
                "non-integral expansion coefficient {coeff} at {target:?}"
            )));
        }
        let c = coeff.to_integer();
        row.insert(target.clone(), c);
        let scale = pow_q(p, (pair_rho(target) - pair_rho(nu)).to_integer());
        for (key, m) in &chars[target].coeffs {
            let delta = q_int(c * m) * scale;
            let entry = residual.entry(key.clone()).or_insert_with(Q::zero);
            *entry -= delta;
            if *entry == Q::zero() {
                residual.remove(key);
            }
        }
    }
    if !residual.is_empty() {
        return Err(Error::Invalid(
            "transform did not reduce to zero over the dominant ideal".into(),
        ));
    }
    if row.get(nu) != Some(&1) {
        return Err(Error::Invalid("leading coefficient must be one".into()));
    }
    Ok(row)
}

fn pow_q(p: u64, e: i64) -> Q {
    let mag = (p as i64).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        q_int(mag)
    } else {
        Q::new(1, mag)
    }
}

/// Coefficients (constant term first) of the coset-count polynomials in
/// the field size, one per torus-part exponent vector, recovered by
/// interpolation across primes. The ideal degree bound `<lambda, 2 rho>`
/// after normalization must stay within the interpolation budget.
pub fn satake_count_polynomials(
    n: usize,
    lambda: &[i64],
) -> Result<BTreeMap<Vec<i64>, Vec<i64>>> {
    require_dominant(lambda)?;
    let shift = *lambda.last().expect("nonempty");
    let norm: Vec<i64> = lambda.iter().map(|&x| x - shift).collect();
    let degree_bound = pair_two_rho(&norm);
    let max_degree = INTERPOLATION_PRIMES.len() as i64 - 1;
    if degree_bound > max_degree {
        return Err(Error::Oversize(format!(
            "degree bound {degree_bound} exceeds the interpolation budget {max_degree}"
        )));
    }
    let primes = &INTERPOLATION_PRIMES[..=degree_bound as usize];
    let tables: Vec<BTreeMap<Vec<i64>, u64>> = primes
        .iter()
        .map(|&p| satake_coset_oracle(n, lambda, p))
        .collect::<Result<_>>()?;
    let mut keys: BTreeSet<Vec<i64>> = BTreeSet::new();
    for t in &tables {
        keys.extend(t.keys().cloned());
    }
    let mut out = BTreeMap::new();
    for key in keys {
        let points: Vec<(Q, Q)> = primes
            .iter()
            .zip(&tables)
            .map(|(&p, t)| {
                (
                    q_int(p as i64),
                    q_int(t.get(&key).copied().unwrap_or(0) as i64),
                )
            })
            .collect();
        let coeffs = lagrange_interpolate(&points)?;
        let mut ints: Vec<i64> = coeffs
            .iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::Invalid(
                        "count polynomial has a non-integer coefficient".into(),
                    ))
                }
            })
            .collect::<Result<_>>()?;
        while ints.len() > 1 && ints.last() == Some(&0) {
            ints.pop();
        }
        out.insert(key, ints);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force semistandard tableau count: shape `lambda` (a
    /// partition), content `mu`, entries bounded by the length of `mu`.
    fn kostka_by_tableaux(lambda: &[i64], mu: &[i64]) -> u64 {
        let rows: Vec<usize> = lambda
            .iter()
            .take_while(|&&x| x > 0)
            .map(|&x| x as usize)
            .collect();
        let n = mu.len();
        let mut grid: Vec<Vec<usize>> = rows.iter().map(|&len| vec![0; len]).collect();
        let mut remaining: Vec<i64> = mu.to_vec();
        fn fill(
            grid: &mut Vec<Vec<usize>>,
            remaining: &mut Vec<i64>,
            rows: &[usize],
            n: usize,
            r: usize,
            c: usize,
        ) -> u64 {
            if r == rows.len() {
                return 1;
            }
            let (nr, nc) = if c + 1 < rows[r] {
                (r, c + 1)
            } else {
                (r + 1, 0)
            };
            let mut total = 0;
            for entry in 1..=n {
                if remaining[entry - 1] == 0 {
                    continue;
                }
                if c > 0 && grid[r][c - 1] > entry {
                    continue;
                }
                if r > 0 && grid[r - 1][c] >= entry {
                    continue;
                }
                grid[r][c] = entry;
                remaining[entry - 1] -= 1;
                total += fill(grid, remaining, rows, n, nr, nc);
                remaining[entry - 1] += 1;
                grid[r][c] = 0;
            }
            total
        }
        if rows.is_empty() {
            return u64::from(mu.iter().all(|&x| x == 0));
        }
        fill(&mut grid, &mut remaining, &rows, n, 0, 0)
    }

    #[test]
    fn freudenthal_matches_tableau_counts() {
        let shapes: Vec<Vec<i64>> = vec![
            vec![1, 0, 0],
            vec![1, 1, 0],
            vec![2, 0, 0],
            vec![2, 1, 0],
            vec![3, 1, 0],
            vec![2, 1, 1],
            vec![2, 2, 0],
            vec![2, 1, 0, 0],
            vec![1, 1, 1, 0],
        ];
        for lambda in shapes {
            let mult = weight_multiplicities(&lambda).unwrap();
            for (mu, m) in &mult {
                assert_eq!(
                    *m,
                    kostka_by_tableaux(&lambda, mu),
                    "multiplicity at {mu:?} for {lambda:?}"
                );
            }
        }
    }

    #[test]
    fn multiplicities_shift_invariance_and_dimension() {
        let base = weight_multiplicities(&[2, 1, 0]).unwrap();
        let shifted = weight_multiplicities(&[1, 0, -1]).unwrap();
        for ((mu, m), (nu, k)) in base.iter().zip(&shifted) {
            let back: Vec<i64> = nu.iter().map(|&x| x + 1).collect();
            assert_eq!(mu, &back);
            assert_eq!(m, k);
        }
        // Dimension check through the orbit spread: adjoint-like (2,1,0)
        // has dimension 8.
        let chi = character(&[2, 1, 0]).unwrap();
        let dim: i64 = chi.coeffs.values().sum();
        assert_eq!(dim, 8);
        // Highest weight multiplicity is always one.
        assert_eq!(base.get(&vec![2, 1, 0]).copied(), Some(1));
    }

    #[test]
    fn orbit_expansion_is_unitriangular() {
        let lambda = vec![3, 1, 0];
        let expansion = orbit_expansion(&lambda).unwrap();
        assert_eq!(expansion.get(&lambda).copied(), Some(1));
        for mu in expansion.keys() {
            assert!(dominance_leq_int(mu, &lambda));
        }
    }

    #[test]
    fn oracle_minuscule_rank_two() {
        // One coset with torus part (1,0) and p cosets with (0,1): the
        // classical p + 1 split.
        for p in [2u64, 3, 5] {
            let tally = satake_coset_oracle(2, &[1, 0], p).unwrap();
            assert_eq!(tally.get(&vec![1, 0]).copied(), Some(1));
            assert_eq!(tally.get(&vec![0, 1]).copied(), Some(p));
            assert_eq!(tally.len(), 2);
        }
    }

    #[test]
    fn oracle_total_counts_lattices() {
        // Summing over both elementary divisor types of total 2 in rank
        // two counts all index-p^2 sublattices: p^2 + p + 1.
        for p in [2u64, 3] {
            let t20 = satake_coset_oracle(2, &[2, 0], p).unwrap();
            let t11 = satake_coset_oracle(2, &[1, 1], p).unwrap();
            let total: u64 = t20.values().chain(t11.values()).sum();
            assert_eq!(total, p * p + p + 1);
        }
    }

    #[test]
    fn oracle_respects_support_bound() {
        // Torus parts outside the dominance ideal of lambda never occur:
        // sorted-decreasing torus part must be dominance-below lambda.
        for p in [2u64, 3] {
            for lambda in [vec![2, 0], vec![2, 1, 0]] {
                let tally = satake_coset_oracle(lambda.len(), &lambda, p).unwrap();
                for mu in tally.keys() {
                    let mut sorted = mu.clone();
                    sorted.sort_unstable_by(|a, b| b.cmp(a));
                    assert!(
                        dominance_leq_int(&sorted, &lambda),
                        "stray torus part {mu:?} for {lambda:?}"
                    );
                }
                // The dominant vector itself occurs exactly once.
                assert_eq!(tally.get(&lambda).copied(), Some(1));
            }
        }
    }

    #[test]
    fn oracle_shift_invariance() {
        let plain = satake_coset_oracle(2, &[2, 0], 3).unwrap();
        let shifted = satake_coset_oracle(2, &[1, -1], 3).unwrap();
        assert_eq!(plain.len(), shifted.len());
        for (mu, count) in &plain {
            let key: Vec<i64> = mu.iter().map(|&x| x - 1).collect();
            assert_eq!(shifted.get(&key), Some(count));
        }
    }

    #[test]
    fn divisor_reduction_matches_minor_valuations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..300 {
            let n = rng.gen_range(1..=4usize);
            let p = [2u64, 3, 5][rng.gen_range(0..3usize)];
            let vals: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2u32)).collect();
            let total: u32 = vals.iter().sum();
            if total > 4 {
                continue;
            }
            let mut mat: Vec<Vec<i128>> = vec![vec![0; n]; n];
            for i in 0..n {
                mat[i][i] = (p as i128).pow(vals[i]);
                for j in i + 1..n {
                    mat[i][j] = rng.gen_range(0..mat[i][i]);
                }
            }
            // Unimodular row and column mixes leave the divisors alone
            // but take the matrix well outside the Hermite family.
            for _ in 0..4 {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a == b {
                    continue;
                }
                let c = rng.gen_range(-2i128..=2);
                if rng.gen_bool(0.5) {
                    for j in 0..n {
                        mat[a][j] += c * mat[b][j];
                    }
                } else {
                    for i in 0..n {
                        mat[i][a] += c * mat[i][b];
                    }
                }
            }
            let reference = elementary_divisor_type(&mat, p);
            let cap = total + 1;
            let modulus = (p as u128).pow(cap) as i128;
            let mut flat: Vec<u64> = mat
                .iter()
                .flatten()
                .map(|&x| x.rem_euclid(modulus) as u64)
                .collect();
            let mut fast = Vec::new();
            divisor_valuations_mod(&mut flat, n, p, cap, &mut fast);
            assert_eq!(fast, reference, "matrix {mat:?} at p = {p}");
        }
    }

    #[test]
    fn oracle_rejects_oversize_and_bad_input() {
        assert!(matches!(
            satake_coset_oracle(5, &[1, 0, 0, 0, 0], 2),
            Err(Error::Oversize(_))
        ));
        assert!(matches!(
            satake_coset_oracle(2, &[5, 0], 2),
            Err(Error::Oversize(_))
        ));
        assert!(matches!(
            satake_coset_oracle(2, &[0, 1], 2),
            Err(Error::NotDominant(_))
        ));
        assert!(matches!(
            satake_coset_oracle(2, &[1, 0], 4),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn rank_two_basis_change_square_relation() {
        // The square of the minuscule transform: S(T_(1,0))^2 =
        // S(T_(2,0)) + (q + 1) S(T_(1,1)) forces forward[(2,0)][(1,1)] = -1
        // and inverse[(2,0)][(1,1)] = +1, both constant in q.
        let change = satake_basis_change(2, &[2, 0], &[2, 3, 5]).unwrap();
        assert_eq!(change.forward[&vec![2, 0]].get(&vec![1, 1]), Some(&vec![-1]));
        assert_eq!(change.inverse[&vec![2, 0]].get(&vec![1, 1]), Some(&vec![1]));
        assert_eq!(change.forward[&vec![2, 0]].get(&vec![2, 0]), Some(&vec![1]));
    }

    #[test]
    fn rank_three_basis_change_has_polynomial_entry() {
        // Hall-Littlewood expansion in rank 3: the regular weight sits
        // over the central one with coefficient -(q + 1), so a constant
        // per-prime table cannot exist and interpolation is forced.
        let change = satake_basis_change(3, &[2, 1, 0], &[2, 3, 5]).unwrap();
        assert_eq!(
            change.forward[&vec![2, 1, 0]].get(&vec![1, 1, 1]),
            Some(&vec![-1, -1])
        );
        assert_eq!(
            change.inverse[&vec![2, 1, 0]].get(&vec![1, 1, 1]),
            Some(&vec![1, 1])
        );
        assert!(matches!(
            satake_basis_change(3, &[2, 1, 0], &[2, 3]),
            Err(Error::Oversize(_))
        ));
    }

    #[test]
    fn basis_change_is_unitriangular_with_unit_diagonal() {
        for lambda in [vec![2, 1, 0], vec![1, 1, 0]] {
            let change = satake_basis_change(3, &lambda, &[2, 3, 5]).unwrap();
            for (nu, row) in &change.forward {
                assert_eq!(row.get(nu), Some(&vec![1]));
                for mu in row.keys() {
                    assert!(dominance_leq_int(mu, nu));
                }
            }
        }
    }

    #[test]
    fn count_polynomials_minuscule() {
        let polys = satake_count_polynomials(2, &[1, 0]).unwrap();
        assert_eq!(polys.get(&vec![1, 0]).cloned(), Some(vec![1]));
        assert_eq!(polys.get(&vec![0, 1]).cloned(), Some(vec![0, 1]));
        assert!(matches!(
            satake_count_polynomials(3, &[3, 0, 0]),
            Err(Error::Oversize(_))
        ));
    }

    #[test]
    fn twisted_character_matches_untwisted_table() {
        let twisted = twisted_character(3, &[2, 0]).unwrap();
        let plain = character(&[2, 0]).unwrap();
        assert_eq!(twisted, plain);
        assert!(twisted_character(0, &[1, 0]).is_err());
    }

    #[test]
    fn distinct_permutation_counts() {
        assert_eq!(distinct_permutations(&[1, 0, 0]).len(), 3);
        assert_eq!(distinct_permutations(&[2, 1, 0]).len(), 6);
        assert_eq!(distinct_permutations(&[1, 1]).len(), 1);
    }
}
