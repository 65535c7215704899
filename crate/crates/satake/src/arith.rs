//! Exact rational arithmetic helpers shared by the other modules: parsing
//! and printing of rationals, linear algebra over the rationals, a
//! cone-membership test by exact phase-one simplex, and Lagrange
//! interpolation for recovering polynomial coefficients from evaluations.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Exact rational scalar used for all weight and coweight coordinates.
pub type Q = Rational64;

/// Shorthand constructor. Panics on a zero denominator.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(num, den)
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(n)
}

/// Renders a rational as `p` or `p/q`, the form used in all serialized
/// output.
pub fn format_q(x: Q) -> String {
    if x.denom() == &1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<i64> {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::Invalid(format!("not an integer: {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(Q::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den == 0 {
                return Err(Error::Invalid(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(parse_int(num)?, den))
        }
    }
}

pub fn to_big(x: Q) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

/// Sum of a slice of rationals.
pub fn sum_q(xs: &[Q]) -> Q {
    xs.iter().copied().sum()
}

/// Tests whether `target` is a nonnegative rational combination of
/// `generators`, by a phase-one simplex run with Bland's rule on exact
/// big-rational arithmetic. An empty generator list spans only the origin.
pub fn in_nonneg_span(generators: &[Vec<Q>], target: &[Q]) -> bool {
    let m = target.len();
    assert!(
        generators.iter().all(|g| g.len() == m),
        "generator dimension mismatch"
    );
    let n = generators.len();
    let cols = n + m;

    // Rows scaled so every right-hand side is nonnegative; artificial
    // variable i occupies column n + i.
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = target[i] < Q::zero();
        let mut row: Vec<BigRational> = Vec::with_capacity(cols + 1);
        for g in generators {
            let v = to_big(g[i]);
            row.push(if flip { -v } else { v });
        }
        for j in 0..m {
            row.push(if j == i {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        let rhs = to_big(target[i]);
        row.push(if flip { -rhs } else { rhs });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..cols).collect();

    // Reduced costs for minimizing the sum of artificials: cost 1 on
    // artificial columns, 0 elsewhere; all basic columns start artificial.
    let mut reduced: Vec<BigRational> = (0..cols)
        .map(|j| {
            let c_j = if j >= n {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            let through_basis: BigRational = tab.iter().map(|row| row[j].clone()).sum();
            c_j - through_basis
        })
        .collect();

    loop {
        let Some(enter) = (0..cols).find(|&j| reduced[j] < BigRational::zero()) else {
            break;
        };
        // Ratio test; Bland tie-break on the smallest basic variable index.
        let mut leave: Option<usize> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter] <= BigRational::zero() {
                continue;
            }
            let ratio = row[cols].clone() / row[enter].clone();
            let better = match leave {
                None => true,
                Some(l) => {
                    let cur = tab[l][cols].clone() / tab[l][enter].clone();
                    ratio < cur || (ratio == cur && basis[i] < basis[l])
                }
            };
            if better {
                leave = Some(i);
            }
        }
        let Some(l) = leave else {
            // The phase-one objective is bounded below by zero, so an
            // unbounded ray cannot occur.
            unreachable!("phase-one simplex cannot be unbounded");
        };

        let pivot = tab[l][enter].clone();
        for v in tab[l].iter_mut() {
            *v /= pivot.clone();
        }
        for i in 0..m {
            if i == l || tab[i][enter].is_zero() {
                continue;
            }
            let factor = tab[i][enter].clone();
            for j in 0..=cols {
                let delta = factor.clone() * tab[l][j].clone();
                tab[i][j] -= delta;
            }
        }
        if !reduced[enter].is_zero() {
            let factor = reduced[enter].clone();
            for j in 0..cols {
                let delta = factor.clone() * tab[l][j].clone();
                reduced[j] -= delta;
            }
        }
        basis[l] = enter;
    }

    // Feasible for the original system iff every artificial is zero.
    (0..m).all(|i| basis[i] < n || tab[i][cols].is_zero())
}

/// Row rank of a rational matrix, by Gaussian elimination over big
/// rationals.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| to_big(x)).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    assert!(m.iter().all(|r| r.len() == ncols), "ragged matrix");
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let lead = m[rank][col].clone();
        for v in m[rank].iter_mut() {
            *v /= lead.clone();
        }
        for i in 0..m.len() {
            if i == rank || m[i][col].is_zero() {
                continue;
            }
            let factor = m[i][col].clone();
            for j in col..ncols {
                let delta = factor.clone() * m[rank][j].clone();
                m[i][j] -= delta;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Coefficients (constant term first) of the unique polynomial of degree
/// `< points.len()` through the given points. Abscissae must be distinct.
pub fn lagrange_interpolate(points: &[(Q, Q)]) -> Result<Vec<Q>> {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            if points[i].0 == points[j].0 {
                return Err(Error::Invalid("repeated interpolation abscissa".into()));
            }
        }
    }
    let mut coeffs = vec![BigRational::zero(); n];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        // Basis polynomial prod_{j != i} (x - x_j) / (x_i - x_j).
        let mut poly = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            let root = to_big(xj);
            let mut next = vec![BigRational::zero(); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] += c.clone();
                next[k] -= root.clone() * c.clone();
            }
            poly = next;
            denom *= to_big(xi) - root;
        }
        let scale = to_big(yi) / denom;
        for (k, c) in poly.into_iter().enumerate() {
            coeffs[k] += c * scale.clone();
        }
    }
    coeffs
        .into_iter()
        .map(|c| {
            let num = i64::try_from(c.numer().clone())
                .map_err(|_| Error::Oversize("interpolated coefficient overflow".into()))?;
            let den = i64::try_from(c.denom().clone())
                .map_err(|_| Error::Oversize("interpolated coefficient overflow".into()))?;
            Ok(Q::new(num, den))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse_roundtrip() {
        for x in [q_int(0), q_int(-3), q(7, 2), q(-5, 4)] {
            assert_eq!(parse_q(&format_q(x)).unwrap(), x);
        }
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn cone_membership_in_the_plane() {
        let gens = vec![vec![q_int(1), q_int(0)], vec![q_int(1), q_int(1)]];
        assert!(in_nonneg_span(&gens, &[q_int(3), q_int(1)]));
        assert!(in_nonneg_span(&gens, &[q_int(0), q_int(0)]));
        assert!(!in_nonneg_span(&gens, &[q_int(0), q_int(1)]));
        assert!(!in_nonneg_span(&gens, &[q_int(-1), q_int(0)]));
        assert!(in_nonneg_span(&gens, &[q(1, 2), q(1, 3)]));
    }

    #[test]
    fn cone_membership_degenerate_generators() {
        assert!(in_nonneg_span(&[], &[q_int(0), q_int(0)]));
        assert!(!in_nonneg_span(&[], &[q_int(1), q_int(0)]));
        let gens = vec![vec![q_int(1), q_int(-1)], vec![q_int(-1), q_int(1)]];
        assert!(in_nonneg_span(&gens, &[q_int(2), q_int(-2)]));
        assert!(!in_nonneg_span(&gens, &[q_int(1), q_int(1)]));
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[vec![q_int(0), q_int(0)]]), 0);
        assert_eq!(
            rank(&[
                vec![q_int(1), q_int(2), q_int(3)],
                vec![q_int(2), q_int(4), q_int(6)],
                vec![q_int(0), q_int(1), q_int(1)],
            ]),
            2
        );
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        // q^2 + q + 1 through q = 2, 3, 5.
        let pts = vec![
            (q_int(2), q_int(7)),
            (q_int(3), q_int(13)),
            (q_int(5), q_int(31)),
        ];
        assert_eq!(
            lagrange_interpolate(&pts).unwrap(),
            vec![q_int(1), q_int(1), q_int(1)]
        );
        // Constant through one point.
        assert_eq!(
            lagrange_interpolate(&[(q_int(2), q_int(9))]).unwrap(),
            vec![q_int(9)]
        );
        assert!(lagrange_interpolate(&[(q_int(2), q_int(1)), (q_int(2), q_int(2))]).is_err());
    }
}
