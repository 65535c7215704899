//! The Newton map on parameter valuations, dominance of Newton points,
//! the lowest-eigenvalue-valuation identity, the valuation criterion for
//! Newton dominance, and the prefix-sum valuation inequality verifier.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::arith::{q_int, Q};
use crate::characters::weight_multiplicities;
use crate::datum::{Coords, Family, RootDatum};
use crate::{Error, Result};

/// A semisimple parameter class recorded by the valuations of its entries:
/// one rational vector per block. For a block restricted along a degree-d
/// extension the vector holds the valuations of the norm's eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatakeClass {
    pub datum: RootDatum,
    pub valuations: Vec<Vec<Q>>,
}

impl SatakeClass {
    pub fn new(datum: RootDatum, valuations: Vec<Vec<Q>>) -> Result<SatakeClass> {
        if !matches!(datum.family, Family::Gl | Family::ResProduct) {
            return Err(Error::Invalid(
                "parameter classes are recorded on linear-type data".into(),
            ));
        }
        if valuations.len() != datum.blocks.len()
            || valuations
                .iter()
                .zip(&datum.blocks)
                .any(|(v, b)| v.len() != b.size)
        {
            return Err(Error::Shape(
                "one valuation vector per block, sized by the block".into(),
            ));
        }
        Ok(SatakeClass { datum, valuations })
    }
}

/// A dominant rational point in the closed positive chamber, stored once
/// per block orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPoint {
    pub datum: RootDatum,
    pub point: Coords,
}

/// Sorts each block's valuations into the dominant chamber and divides by
/// the block degree (the orbit average along the unramified extension).
pub fn newton_map(class: &SatakeClass) -> NewtonPoint {
    let blocks: Vec<Vec<Q>> = class
        .valuations
        .iter()
        .zip(&class.datum.blocks)
        .map(|(vals, block)| {
            let mut v = vals.clone();
            v.sort();
            v.reverse();
            let d = q_int(block.degree as i64);
            v.into_iter().map(|x| x / d).collect()
        })
        .collect();
    NewtonPoint {
        datum: class.datum.clone(),
        point: Coords {
            blocks,
            central: None,
        },
    }
}

/// Dominance of Newton points: the difference must lie in the nonnegative
/// span of the positive coroots (for linear blocks this is also the span
/// of the positive roots, so the two printed forms of the order agree).
pub fn newton_leq(nu1: &NewtonPoint, nu2: &NewtonPoint) -> Result<bool> {
    if nu1.datum != nu2.datum {
        return Err(Error::Shape("points live on different data".into()));
    }
    nu1.datum.dominance_leq(&nu1.point, &nu2.point)
}

/// Prefix-sum comparison of two same-length rational vectors with equal
/// totals: the polygon of `a` lies above the polygon of `b` with the same
/// endpoint. Oracle form of `newton_leq` for one linear block.
pub fn polygon_above(a: &[Q], b: &[Q]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut pa = Q::zero();
    let mut pb = Q::zero();
    for (x, y) in a.iter().zip(b) {
        pa += *x;
        pb += *y;
        if pa > pb {
            return false;
        }
    }
    pa == pb
}

/// `<w0(lambda), newton_map(c)>`: the smallest valuation of an eigenvalue
/// of the twisted class acting on the irreducible with highest weight
/// `lambda`.
pub fn min_eigenvalue_valuation(class: &SatakeClass, lambda: &Coords) -> Result<Q> {
    let nu = newton_map(class);
    let flipped = class.datum.w0_apply(lambda)?;
    class.datum.pairing(&flipped, &nu.point)
}

/// Valuation of one trace: determinate when a unique weight of
/// multiplicity one achieves the minimal term valuation, otherwise the
/// ties could cancel and only a lower bound is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceValuation {
    Determinate(Q),
    Indeterminate { lower_bound: Q },
}

/// Valuation data of the trace of the twisted class on the irreducible
/// with highest weight `lambda` (integer, one vector per block): each
/// trace term is a product of eigenvalue powers, so its valuation pairs
/// the weight with the valuation vector; block contributions add.
pub fn trace_valuation(class: &SatakeClass, lambda: &[Vec<i64>]) -> Result<TraceValuation> {
    if lambda.len() != class.datum.blocks.len() {
        return Err(Error::Shape("one highest weight per block".into()));
    }
    // Per block: all weights with multiplicity, paired against the raw
    // valuation vector.
    let mut total_min = Q::zero();
    let mut determinate = true;
    for (lam, vals) in lambda.iter().zip(&class.valuations) {
        if lam.len() != vals.len() {
            return Err(Error::Shape("weight length must match block size".into()));
        }
        let mut lam_sorted = lam.clone();
        lam_sorted.sort_unstable_by(|a, b| b.cmp(a));
        if lam_sorted != *lam {
            return Err(Error::NotDominant(format!("{lam:?} is not dominant")));
        }
        let mult = weight_multiplicities(lam)?;
        let mut block_min: Option<Q> = None;
        let mut minimizers = 0u64;
        for (mu_dom, m) in &mult {
            for mu in distinct_perms(mu_dom) {
                let value: Q = mu
                    .iter()
                    .zip(vals)
                    .map(|(&e, &v)| q_int(e) * v)
                    .sum();
                match block_min {
                    None => {
                        block_min = Some(value);
                        minimizers = *m;
                    }
                    Some(cur) if value < cur => {
                        block_min = Some(value);
                        minimizers = *m;
                    }
                    Some(cur) if value == cur => minimizers += *m,
                    _ => {}
                }
            }
        }
        let block_min = block_min.expect("weight diagram is nonempty");
        total_min += block_min;
        if minimizers != 1 {
            determinate = false;
        }
    }
    Ok(if determinate {
        TraceValuation::Determinate(total_min)
    } else {
        TraceValuation::Indeterminate {
            lower_bound: total_min,
        }
    })
}

fn distinct_perms(v: &[i64]) -> Vec<Vec<i64>> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(sorted.clone());
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

/// Outcome of the valuation criterion for Newton dominance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LafforgueVerdict {
    /// Direct comparison `newton_map(c) <= nu`.
    pub direct: bool,
    /// Trace-side verdict over the swept weights with determinate trace
    /// valuations.
    pub trace_side: bool,
    /// First swept weight whose determinate trace valuation violates the
    /// bound.
    pub witness: Option<Vec<Vec<i64>>>,
    /// Swept weights whose trace valuation could not be pinned down.
    pub indeterminate: Vec<Vec<Vec<i64>>>,
}

/// Tests the equivalence between Newton dominance and the family of trace
/// valuation inequalities, sweeping all dominant integer weights whose
/// absolute coordinate sums stay within `height_bound` on every block.
pub fn lafforgue_check(
    class: &SatakeClass,
    nu: &NewtonPoint,
    height_bound: i64,
) -> Result<LafforgueVerdict> {
    if nu.datum != class.datum {
        return Err(Error::Shape("class and point live on different data".into()));
    }
    let direct = newton_leq(&newton_map(class), nu)?;

    let per_block: Vec<Vec<Vec<i64>>> = class
        .datum
        .blocks
        .iter()
        .map(|b| dominant_height_sweep(b.size, height_bound))
        .collect();
    let mut combos: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for block_choices in &per_block {
        let mut next = Vec::new();
        for prefix in &combos {
            for choice in block_choices {
                let mut ext = prefix.clone();
                ext.push(choice.clone());
                next.push(ext);
            }
        }
        combos = next;
    }

    let mut trace_side = true;
    let mut witness = None;
    let mut indeterminate = Vec::new();
    for lambda in combos {
        let coords = class.datum.coords(
            lambda
                .iter()
                .map(|b| b.iter().map(|&x| q_int(x)).collect())
                .collect(),
            None,
        )?;
        let flipped = class.datum.w0_apply(&coords)?;
        let bound = class.datum.pairing(&flipped, &nu.point)?;
        match trace_valuation(class, &lambda)? {
            TraceValuation::Determinate(v) => {
                if v < bound && witness.is_none() {
                    trace_side = false;
                    witness = Some(lambda);
                }
            }
            TraceValuation::Indeterminate { .. } => indeterminate.push(lambda),
        }
    }
    Ok(LafforgueVerdict {
        direct,
        trace_side,
        witness,
        indeterminate,
    })
}

/// Weakly decreasing integer vectors of the given length whose absolute
/// coordinate sum is bounded, ordered by that sum and then
/// lexicographically, so earlier witnesses are lower.
pub fn dominant_height_sweep(len: usize, height_bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(out: &mut Vec<Vec<i64>>, cur: &mut Vec<i64>, len: usize, budget: i64, cap: i64) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let hi = cap.min(budget);
        let lo = -budget;
        for v in (lo..=hi).rev() {
            cur.push(v);
            rec(out, cur, len, budget - v.abs(), v);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, len, height_bound, height_bound);
    out.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
    out
}

/// Report of the prefix-sum valuation inequality check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatzMazurReport {
    /// Per prefix length: (lhs, rhs, satisfied).
    pub rows: Vec<(Q, Q, bool)>,
    /// Equality holds at the full length.
    pub equality_at_end: bool,
    pub pass: bool,
    /// First failing prefix length (1-based), with its slack.
    pub first_failure: Option<(usize, Q)>,
}

/// Verifies, for increasing valuations `v(a_1) <= ... <= v(a_n)` and a
/// family of decreasing weight rows, that every prefix sum of the
/// valuations dominates the corresponding negated weight prefix sums,
/// with equality at the full prefix.
pub fn katz_mazur_check(valuations: &[Q], infchar: &[Vec<Q>]) -> Result<KatzMazurReport> {
    let n = valuations.len();
    if n == 0 {
        return Err(Error::Shape("need at least one valuation".into()));
    }
    if valuations.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Shape(
            "valuations must be sorted in increasing order".into(),
        ));
    }
    for row in infchar {
        if row.len() != n {
            return Err(Error::Shape(format!(
                "weight row of length {} against {} valuations",
                row.len(),
                n
            )));
        }
        if row.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Shape(
                "weight rows must be sorted in decreasing order".into(),
            ));
        }
    }
    let mut rows = Vec::with_capacity(n);
    let mut lhs = Q::zero();
    let mut rhs = Q::zero();
    let mut first_failure = None;
    for k in 0..n {
        lhs += valuations[k];
        let step: Q = infchar.iter().map(|row| -row[k]).sum();
        rhs += step;
        let ok = lhs >= rhs;
        if !ok && first_failure.is_none() {
            first_failure = Some((k + 1, lhs - rhs));
        }
        rows.push((lhs, rhs, ok));
    }
    let equality_at_end = lhs == rhs;
    Ok(KatzMazurReport {
        pass: first_failure.is_none() && equality_at_end,
        rows,
        equality_at_end,
        first_failure,
    })
}

/// Frequency table of Newton points over a list of classes, used by the
/// batch front end for deterministic summaries.
pub fn newton_census(classes: &[SatakeClass]) -> Result<BTreeMap<String, usize>> {
    let mut out = BTreeMap::new();
    for c in classes {
        let nu = newton_map(c);
        let key = nu.point.to_string();
        *out.entry(key).or_insert(0) += 1;
    }
    Ok(out)
}
