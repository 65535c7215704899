//! Integral normalization of Hecke generators: the infinitesimal
//! character attached to a coherent weight, pairing-based exponents, the
//! symplectic and unitary closed forms, and generator tables for the
//! classical settings.

use crate::arith::Q;
use crate::datum::{Chamber, Coords, RootDatum};
use crate::{Error, Result};

/// The infinitesimal character of a coherent weight: the exact vector
/// `-kappa - rho` and its dominant representative for the full group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalCharacter {
    pub raw: Coords,
    pub dominant: Coords,
}

/// Computes `-kappa - rho` and its dominant representative. The weight
/// must be dominant for the standard Levi.
pub fn infinitesimal_character(
    datum: &RootDatum,
    kappa: &Coords,
) -> Result<InfinitesimalCharacter> {
    if !datum.is_dominant(kappa, Chamber::ForLevi)? {
        return Err(Error::NotDominant(format!(
            "weight {kappa} is not Levi-dominant"
        )));
    }
    let raw = kappa.neg().sub(&datum.rho())?;
    let dominant = datum.dominant_representative(&raw, Chamber::ForG)?;
    Ok(InfinitesimalCharacter { raw, dominant })
}

/// Exponent placing `[V_lambda]` in the integrally normalized algebra:
/// the pairing of the coweight against the dominant representative of
/// the infinitesimal character.
pub fn integral_exponent(datum: &RootDatum, lambda: &Coords, kappa: &Coords) -> Result<Q> {
    if !datum.is_dominant(lambda, Chamber::ForG)? {
        return Err(Error::NotDominant(format!(
            "coweight {lambda} is not dominant"
        )));
    }
    datum.coweight_lattice_check(lambda)?;
    let inf = infinitesimal_character(datum, kappa)?;
    datum.pairing(lambda, &inf.dominant)
}

/// Exponent against the coset basis element for `lambda` instead of the
/// character basis: for minuscule coweights the two basis elements agree
/// up to the factor `q^{<lambda, rho>}`, so the exponent drops by the
/// rho-pairing.
pub fn t_basis_exponent(datum: &RootDatum, lambda: &Coords, kappa: &Coords) -> Result<Q> {
    let e = integral_exponent(datum, lambda, kappa)?;
    let shift = datum.pairing(lambda, &datum.rho())?;
    Ok(e - shift)
}

/// Per-index values of the symplectic exponent for one embedding:
/// entry `j` (for `j = 0..=g`) is
/// `(sum of the first j weights - sum of the rest + central)/2 - j(j+1)/2`.
pub fn symplectic_profile(weights: &[i64], central: i64) -> Result<Vec<i64>> {
    if weights.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::NotDominant(format!(
            "weights {weights:?} are not decreasing"
        )));
    }
    let total: i64 = weights.iter().sum();
    if (total + central) % 2 != 0 {
        return Err(Error::Parity(format!(
            "weight sum {total} and central coordinate {central} have different parities"
        )));
    }
    let g = weights.len() as i64;
    let mut prefix = 0i64;
    let mut out = Vec::with_capacity(weights.len() + 1);
    for j in 0..=g {
        if j > 0 {
            prefix += weights[(j - 1) as usize];
        }
        let suffix = total - prefix;
        out.push((prefix - suffix + central) / 2 - j * (j + 1) / 2);
    }
    Ok(out)
}

/// The symplectic normalization exponent for a set of embeddings sharing
/// one central coordinate: the sum over embeddings of the maximum profile
/// entry. Ties resolve to the smallest index; the value is tie-free.
pub fn symplectic_exponent(rows: &[Vec<i64>], central: i64) -> Result<i64> {
    let mut total = 0i64;
    for row in rows {
        let profile = symplectic_profile(row, central)?;
        total += profile.iter().copied().max().expect("profile is nonempty");
    }
    Ok(total)
}

/// Index attaining the maximum of the symplectic profile, smallest first.
pub fn symplectic_argmax(weights: &[i64], central: i64) -> Result<usize> {
    let profile = symplectic_profile(weights, central)?;
    let best = *profile.iter().max().expect("profile is nonempty");
    Ok(profile.iter().position(|&v| v == best).expect("max exists"))
}

/// Exponent of the central generator: the central coordinate summed over
/// the embeddings attached to the place.
pub fn symplectic_s_exponent(central: i64, embeddings: usize) -> i64 {
    central * embeddings as i64
}

/// Coherent weight data for one embedding of a unitary group of
/// signature `(p, q)`: the `a` part has length `p`, the `b` part length
/// `q`, both weakly decreasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureWeight {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl SignatureWeight {
    pub fn new(a: Vec<i64>, b: Vec<i64>) -> Result<SignatureWeight> {
        if a.windows(2).any(|w| w[0] < w[1]) || b.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotDominant(
                "signature weight parts must be weakly decreasing".into(),
            ));
        }
        Ok(SignatureWeight { a, b })
    }
}

/// The unitary normalization exponent for the degree-`j` generator.
/// Embeddings at the place contribute a maximum over splittings
/// `r + s = n - j` of tail sums of the weight with a crossing correction;
/// embeddings away from the place contribute the negated `b` sum.
pub fn unitary_exponent(
    active: &[SignatureWeight],
    passive: &[SignatureWeight],
    j: usize,
) -> Result<i64> {
    let Some(first) = active.first().or(passive.first()) else {
        return Err(Error::Shape("no embeddings given".into()));
    };
    let (p, q) = (first.a.len(), first.b.len());
    let n = p + q;
    if active
        .iter()
        .chain(passive)
        .any(|w| w.a.len() != p || w.b.len() != q)
    {
        return Err(Error::Shape(
            "all embeddings must share one signature".into(),
        ));
    }
    if j > n {
        return Err(Error::Invalid(format!(
            "generator degree {j} exceeds the rank {n}"
        )));
    }
    let mut total = 0i64;
    for w in passive {
        total -= w.b.iter().sum::<i64>();
    }
    for w in active {
        let mut best: Option<i64> = None;
        let r_lo = (n - j).saturating_sub(q);
        let r_hi = p.min(n - j);
        for r in r_lo..=r_hi {
            let s = n - j - r;
            let a_tail: i64 = w.a[r..].iter().sum();
            let b_tail: i64 = w.b[q - s..].iter().sum();
            let value = -a_tail - b_tail - (r as i64) * ((q - s) as i64);
            best = Some(best.map_or(value, |b: i64| b.max(value)));
        }
        total += best.expect("splitting range is nonempty for j <= n");
    }
    Ok(total)
}

/// One normalized generator: name, coweight (display form), integral
/// exponent, a plain description of the underlying double coset, and
/// whether the normalized operator is invertible in the integral algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorRow {
    pub name: String,
    pub coweight: String,
    pub exponent: i64,
    pub naive: String,
    pub invertible: bool,
}

/// A generator table for one of the classical settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationTable {
    pub label: String,
    pub rows: Vec<GeneratorRow>,
}

/// The classical settings with pinned central conventions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Elliptic modular forms of weight `k`: genus one, central `-k`.
    ModularCurve { weight: i64 },
    /// Hilbert modular forms with one weight per real embedding, all
    /// embeddings lying over a single inert prime, shared central
    /// coordinate.
    Hilbert { weights: Vec<i64>, central: i64 },
    /// Siegel modular forms of genus `g` with decreasing weight vector
    /// and central coordinate pinned to the negated weight sum.
    Siegel { weights: Vec<i64> },
    /// Picard-type setting of signature (2,1) at a split prime, third
    /// weight entry pinned to 1.
    Gu21 { k1: i64, k2: i64 },
}

fn half_vector(len: usize) -> String {
    let parts = vec!["-1/2"; len];
    parts.join(",")
}

/// Builds the table of normalized Hecke generators for a preset setting.
pub fn generator_table(preset: &Preset) -> Result<NormalizationTable> {
    match preset {
        Preset::ModularCurve { weight } => {
            let k = *weight;
            let t_exp = symplectic_exponent(&[vec![k]], -k)?;
            let s_exp = symplectic_s_exponent(-k, 1);
            Ok(NormalizationTable {
                label: format!("modular curve, weight {k}"),
                rows: vec![
                    GeneratorRow {
                        name: "T_p".into(),
                        coweight: "(-1/2; -1/2)".into(),
                        exponent: t_exp,
                        naive: "[K diag(p^-1, 1) K]".into(),
                        invertible: false,
                    },
                    GeneratorRow {
                        name: "S_p".into(),
                        coweight: "(0; -1)".into(),
                        exponent: s_exp,
                        naive: "[K p^-1 I_2 K]".into(),
                        invertible: true,
                    },
                ],
            })
        }
        Preset::Hilbert { weights, central } => {
            if weights.is_empty() {
                return Err(Error::Shape("need at least one embedding".into()));
            }
            let rows_as_slices: Vec<Vec<i64>> = weights.iter().map(|&k| vec![k]).collect();
            let t_exp = symplectic_exponent(&rows_as_slices, *central)?;
            let s_exp = symplectic_s_exponent(*central, weights.len());
            let d = weights.len();
            let blocks = vec!["-1/2"; d].join(" | ");
            let zeros = vec!["0"; d].join(" | ");
            Ok(NormalizationTable {
                label: format!("Hilbert, weights {weights:?}, central {central}"),
                rows: vec![
                    GeneratorRow {
                        name: "T_p".into(),
                        coweight: format!("({blocks}; -1/2)"),
                        exponent: t_exp,
                        naive: "[K diag(p^-1, 1) K] at each embedding".into(),
                        invertible: false,
                    },
                    GeneratorRow {
                        name: "S_p".into(),
                        coweight: format!("({zeros}; -1)"),
                        exponent: s_exp,
                        naive: "[K p^-1 I_2 K] at each embedding".into(),
                        invertible: true,
                    },
                ],
            })
        }
        Preset::Siegel { weights } => {
            let g = weights.len();
            if g == 0 {
                return Err(Error::BadRank("genus must be at least 1".into()));
            }
            let central = -weights.iter().sum::<i64>();
            let t_exp = symplectic_exponent(&[weights.clone()], central)?;
            let s_exp = symplectic_s_exponent(central, 1);
            Ok(NormalizationTable {
                label: format!("Siegel genus {g}, weights {weights:?}"),
                rows: vec![
                    GeneratorRow {
                        name: "T_p".into(),
                        coweight: format!("({}; -1/2)", half_vector(g)),
                        exponent: t_exp,
                        naive: format!("[K diag(p^-1 I_{g}, I_{g}) K]"),
                        invertible: false,
                    },
                    GeneratorRow {
                        name: "S_p".into(),
                        coweight: format!("({}; -1)", vec!["0"; g].join(",")),
                        exponent: s_exp,
                        naive: format!("[K p^-1 I_{} K]", 2 * g),
                        invertible: true,
                    },
                ],
            })
        }
        Preset::Gu21 { k1, k2 } => {
            if k1 < k2 {
                return Err(Error::NotDominant(format!(
                    "need k1 >= k2, got ({k1}, {k2})"
                )));
            }
            let w = SignatureWeight::new(vec![*k1, *k2], vec![1])?;
            let mut rows = Vec::new();
            for j in 0..=3usize {
                let exponent = unitary_exponent(std::slice::from_ref(&w), &[], j)?;
                let lam: Vec<&str> = (0..3)
                    .map(|i| if i < 3 - j { "1/2" } else { "-1/2" })
                    .collect();
                rows.push(GeneratorRow {
                    name: format!("T_p,{j}"),
                    coweight: format!("({}; -1/2)", lam.join(",")),
                    exponent,
                    naive: format!("[K (diag(p^-1 I_{j}, I_{}), p^-1) K]", 3 - j),
                    invertible: j == 0 || j == 3,
                });
            }
            Ok(NormalizationTable {
                label: format!("signature (2,1), weights ({k1}, {k2}, 1)"),
                rows,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, q_int};

    fn gsp_weight(datum: &RootDatum, weights: &[i64], central: i64) -> Coords {
        datum.coords_int(weights, Some(central)).unwrap()
    }

    fn minuscule_t(datum: &RootDatum) -> Coords {
        let g = datum.blocks[0].size;
        datum
            .coords(vec![vec![q(-1, 2); g]], Some(q(-1, 2)))
            .unwrap()
    }

    #[test]
    fn infinitesimal_character_examples() {
        let gsp1 = RootDatum::gsp(1).unwrap();
        for k in [-2i64, 0, 1, 2, 5] {
            let kappa = gsp_weight(&gsp1, &[k], -k);
            let inf = infinitesimal_character(&gsp1, &kappa).unwrap();
            assert_eq!(inf.raw.blocks[0], vec![q_int(-k + 1)]);
            assert_eq!(inf.raw.central, Some(q_int(k)));
            assert_eq!(inf.dominant.blocks[0], vec![q_int(-(k - 1).abs())]);
        }
        // Negated rho maps to zero.
        let neg_rho = gsp1.rho().neg();
        let inf = infinitesimal_character(&gsp1, &neg_rho).unwrap();
        assert!(inf.raw.blocks[0].iter().all(|v| *v == q_int(0)));

        let u3 = RootDatum::unitary_product(3, 1).unwrap();
        let kappa = u3
            .coords(vec![vec![q_int(4), q_int(2), q_int(0)]], Some(q_int(-6)))
            .unwrap();
        let inf = infinitesimal_character(&u3, &kappa).unwrap();
        assert_eq!(inf.raw.blocks[0], vec![q_int(-5), q_int(-2), q_int(1)]);
        assert_eq!(inf.raw.central, Some(q_int(6)));

        let bad = u3
            .coords(vec![vec![q_int(0), q_int(2), q_int(1)]], Some(q_int(0)))
            .unwrap();
        assert!(matches!(
            infinitesimal_character(&u3, &bad),
            Err(Error::NotDominant(_))
        ));
    }

    #[test]
    fn modular_curve_exponent() {
        for k in -3i64..=4 {
            let expected = -1.min(k);
            assert_eq!(symplectic_exponent(&[vec![k]], -k).unwrap(), expected);
            let gsp1 = RootDatum::gsp(1).unwrap();
            let kappa = gsp_weight(&gsp1, &[k], -k);
            let e = t_basis_exponent(&gsp1, &minuscule_t(&gsp1), &kappa).unwrap();
            assert_eq!(e, q_int(expected), "k = {k}");
        }
    }

    #[test]
    fn central_generator_exponent() {
        let gsp1 = RootDatum::gsp(1).unwrap();
        let k = 2i64;
        let kappa = gsp_weight(&gsp1, &[k], -k);
        let lambda_s = gsp1.coords_int(&[0], Some(-1)).unwrap();
        let e = integral_exponent(&gsp1, &lambda_s, &kappa).unwrap();
        assert_eq!(e, q_int(-k));
        assert_eq!(symplectic_s_exponent(-k, 1), -k);
        assert_eq!(symplectic_s_exponent(3, 2), 6);
    }

    #[test]
    fn closed_form_matches_pairing_in_the_symplectic_family() {
        for g in 1..=3usize {
            let datum = RootDatum::gsp(g).unwrap();
            let lam = minuscule_t(&datum);
            let mut rows: Vec<Vec<i64>> = Vec::new();
            let range: Vec<i64> = (-5..=5).collect();
            // Deterministic sample of decreasing rows.
            for (i, &hi) in range.iter().enumerate() {
                let mut row = Vec::with_capacity(g);
                let mut v = hi;
                for step in 0..g {
                    row.push(v);
                    v -= ((i + step) % 3) as i64;
                }
                rows.push(row);
            }
            for row in rows {
                let total: i64 = row.iter().sum();
                for central in [-total, -total - 2, -total + 4, total % 2] {
                    if (total + central) % 2 != 0 {
                        continue;
                    }
                    let kappa = gsp_weight(&datum, &row, central);
                    let closed = symplectic_exponent(&[row.clone()], central).unwrap();
                    let paired = t_basis_exponent(&datum, &lam, &kappa).unwrap();
                    assert_eq!(paired, q_int(closed), "row {row:?}, central {central}");
                }
            }
        }
    }

    #[test]
    fn hilbert_per_embedding_form() {
        for k in -4i64..=6 {
            for central in -5i64..=5 {
                if (k + central) % 2 != 0 {
                    continue;
                }
                let expected = ((k + central) / 2 - 1).max((central - k) / 2);
                assert_eq!(
                    symplectic_exponent(&[vec![k]], central).unwrap(),
                    expected
                );
            }
        }
        // Two embeddings add.
        let two = symplectic_exponent(&[vec![3], vec![1]], 1).unwrap();
        let a = symplectic_exponent(&[vec![3]], 1).unwrap();
        let b = symplectic_exponent(&[vec![1]], 1).unwrap();
        assert_eq!(two, a + b);
    }

    #[test]
    fn siegel_suffix_form() {
        let weights = vec![5i64, 3, 2];
        let central = -weights.iter().sum::<i64>();
        let got = symplectic_exponent(&[weights.clone()], central).unwrap();
        let brute = (0..=weights.len())
            .map(|j| {
                let suffix: i64 = weights[j..].iter().sum();
                -suffix - (j as i64) * (j as i64 + 1) / 2
            })
            .max()
            .unwrap();
        assert_eq!(got, brute);
    }

    #[test]
    fn symplectic_profile_is_concave_for_decreasing_weights() {
        let cases = [vec![4i64, 2, 1], vec![0, 0, 0], vec![3, 3, -2], vec![7]];
        for row in cases {
            let total: i64 = row.iter().sum();
            let central = -total;
            let profile = symplectic_profile(&row, central).unwrap();
            for w in profile.windows(3) {
                assert!(w[1] - w[0] >= w[2] - w[1], "profile {profile:?}");
            }
        }
    }

    #[test]
    fn symplectic_errors() {
        assert!(matches!(
            symplectic_profile(&[1, 3], 0),
            Err(Error::NotDominant(_))
        ));
        assert!(matches!(
            symplectic_profile(&[2], 1),
            Err(Error::Parity(_))
        ));
        assert!(matches!(symplectic_argmax(&[1], -1), Ok(0)));
        assert_eq!(symplectic_argmax(&[2], -2).unwrap(), 1);
    }

    #[test]
    fn unitary_exponent_signature_21() {
        for k1 in -3i64..=5 {
            for k2 in -3i64..=k1 {
                let w = SignatureWeight::new(vec![k1, k2], vec![1]).unwrap();
                let e = |j| unitary_exponent(std::slice::from_ref(&w), &[], j).unwrap();
                assert_eq!(e(0), -1, "k = ({k1}, {k2})");
                assert_eq!(e(1), -1 - 1.min(k2), "k = ({k1}, {k2})");
                assert_eq!(e(2), -1 - k2.min(k1 + k2), "k = ({k1}, {k2})");
                assert_eq!(e(3), -k1 - k2, "k = ({k1}, {k2})");
            }
        }
    }

    #[test]
    fn unitary_passive_embeddings_contribute_b_sums() {
        let active = SignatureWeight::new(vec![2, 0], vec![1]).unwrap();
        let passive = SignatureWeight::new(vec![9, 9], vec![4]).unwrap();
        let with = unitary_exponent(
            std::slice::from_ref(&active),
            std::slice::from_ref(&passive),
            1,
        )
        .unwrap();
        let without = unitary_exponent(std::slice::from_ref(&active), &[], 1).unwrap();
        assert_eq!(with, without - 4);
    }

    #[test]
    fn unitary_errors() {
        let w = SignatureWeight::new(vec![1, 0], vec![0]).unwrap();
        assert!(matches!(
            unitary_exponent(std::slice::from_ref(&w), &[], 4),
            Err(Error::Invalid(_))
        ));
        assert!(SignatureWeight::new(vec![0, 1], vec![0]).is_err());
        let other = SignatureWeight::new(vec![1], vec![0]).unwrap();
        assert!(matches!(
            unitary_exponent(&[w, other], &[], 1),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            unitary_exponent(&[], &[], 0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn generator_tables() {
        let table = generator_table(&Preset::ModularCurve { weight: 2 }).unwrap();
        assert_eq!(table.rows[0].exponent, -1);
        assert_eq!(table.rows[1].exponent, -2);
        assert!(table.rows[1].invertible);
        assert!(!table.rows[0].invertible);

        let table = generator_table(&Preset::Siegel {
            weights: vec![3, 3],
        })
        .unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[1].exponent, -6);

        let table = generator_table(&Preset::Gu21 { k1: 3, k2: 2 }).unwrap();
        let exps: Vec<i64> = table.rows.iter().map(|r| r.exponent).collect();
        assert_eq!(exps, vec![-1, -2, -3, -5]);
        let inv: Vec<bool> = table.rows.iter().map(|r| r.invertible).collect();
        assert_eq!(inv, vec![true, false, false, true]);

        assert!(matches!(
            generator_table(&Preset::Hilbert {
                weights: vec![2],
                central: 1
            }),
            Err(Error::Parity(_))
        ));
        let table = generator_table(&Preset::Hilbert {
            weights: vec![2, 4],
            central: 2,
        })
        .unwrap();
        assert_eq!(table.rows[1].exponent, 4);
    }
}
