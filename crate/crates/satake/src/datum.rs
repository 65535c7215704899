//! Root data for the supported families of unramified groups, together
//! with exact weight and coweight coordinates, the canonical pairing,
//! dominance chambers, Weyl orbit utilities, and coroot cone membership.
//!
//! Coordinates are always block vectors of rationals plus, for families
//! with a similitude or central torus factor, one central coordinate.
//! Weights and coweights share the same container; the family decides how
//! entries pair and which chamber counts as dominant.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::arith::{in_nonneg_span, q, q_int, sum_q, Q};
use crate::{Error, Result};

/// Family tag for a root datum.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Family {
    /// Split general linear group of rank `n`.
    Gl,
    /// Split similitude symplectic group of genus `g`, with one central
    /// (similitude) coordinate.
    Gsp,
    /// Product of general linear factors indexed by embeddings, plus one
    /// shared central coordinate; the shape of quasi-split unitary
    /// similitude groups at split places.
    UnitaryProduct,
    /// Product of general linear blocks, each carrying the degree of the
    /// unramified extension it is restricted from.
    ResProduct,
}

/// One linear block: `size` coordinates from a factor restricted along an
/// unramified extension of the stated `degree`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Block {
    pub size: usize,
    pub degree: usize,
}

/// A root datum: family tag plus block shapes. Central coordinate
/// presence is a function of the family.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootDatum {
    pub family: Family,
    pub blocks: Vec<Block>,
}

/// Which dominance chamber a predicate refers to: the full group or the
/// standard block-upper-triangular Levi.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Chamber {
    ForG,
    ForLevi,
}

impl RootDatum {
    pub fn gl(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadRank("linear rank must be at least 1".into()));
        }
        Ok(RootDatum {
            family: Family::Gl,
            blocks: vec![Block { size: n, degree: 1 }],
        })
    }

    pub fn gsp(g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::BadRank("genus must be at least 1".into()));
        }
        Ok(RootDatum {
            family: Family::Gsp,
            blocks: vec![Block { size: g, degree: 1 }],
        })
    }

    /// `places` general linear blocks of rank `n` sharing one central
    /// coordinate.
    pub fn unitary_product(n: usize, places: usize) -> Result<Self> {
        if n == 0 || places == 0 {
            return Err(Error::BadRank(
                "unitary product needs positive rank and at least one place".into(),
            ));
        }
        Ok(RootDatum {
            family: Family::UnitaryProduct,
            blocks: vec![Block { size: n, degree: 1 }; places],
        })
    }

    pub fn res_product(shapes: &[(usize, usize)]) -> Result<Self> {
        if shapes.is_empty() || shapes.iter().any(|&(n, d)| n == 0 || d == 0) {
            return Err(Error::BadRank(
                "restriction blocks need positive size and degree".into(),
            ));
        }
        Ok(RootDatum {
            family: Family::ResProduct,
            blocks: shapes
                .iter()
                .map(|&(size, degree)| Block { size, degree })
                .collect(),
        })
    }

    pub fn has_central(&self) -> bool {
        matches!(self.family, Family::Gsp | Family::UnitaryProduct)
    }

    /// Builds a coordinate vector after validating its shape against this
    /// datum.
    pub fn coords(&self, blocks: Vec<Vec<Q>>, central: Option<Q>) -> Result<Coords> {
        if blocks.len() != self.blocks.len() {
            return Err(Error::Shape(format!(
                "expected {} blocks, got {}",
                self.blocks.len(),
                blocks.len()
            )));
        }
        for (b, spec) in blocks.iter().zip(&self.blocks) {
            if b.len() != spec.size {
                return Err(Error::Shape(format!(
                    "expected block of size {}, got {}",
                    spec.size,
                    b.len()
                )));
            }
        }
        match (self.has_central(), central.is_some()) {
            (true, false) => {
                return Err(Error::Shape("missing central coordinate".into()));
            }
            (false, true) => {
                return Err(Error::Shape("unexpected central coordinate".into()));
            }
            _ => {}
        }
        Ok(Coords { blocks, central })
    }

    /// Convenience constructor for single-block data from integer entries.
    pub fn coords_int(&self, entries: &[i64], central: Option<i64>) -> Result<Coords> {
        self.coords(
            vec![entries.iter().map(|&x| q_int(x)).collect()],
            central.map(q_int),
        )
    }

    /// The canonical pairing between a weight and a coweight. Blocks pair
    /// by the dot product scaled by the block degree; central coordinates
    /// pair directly.
    pub fn pairing(&self, a: &Coords, b: &Coords) -> Result<Q> {
        self.check_shape(a)?;
        self.check_shape(b)?;
        let mut total = Q::zero();
        for ((xa, xb), spec) in a.blocks.iter().zip(&b.blocks).zip(&self.blocks) {
            let dot: Q = xa.iter().zip(xb).map(|(&u, &v)| u * v).sum();
            total += dot * q_int(spec.degree as i64);
        }
        if let (Some(ca), Some(cb)) = (a.central, b.central) {
            total += ca * cb;
        }
        Ok(total)
    }

    /// Half the sum of the positive roots, in weight coordinates.
    ///
    /// Linear blocks use the standard decreasing ladder
    /// `((n-1)/2, ..., (1-n)/2)`. The symplectic family uses the chamber
    /// in which the similitude-standard positive roots point, which makes
    /// its ladder `(-1, -2, ..., -g)` with central coordinate zero.
    pub fn rho(&self) -> Coords {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match self.family {
                Family::Gsp => (1..=b.size as i64).map(|i| q_int(-i)).collect(),
                _ => (0..b.size as i64)
                    .map(|i| q(b.size as i64 - 1 - 2 * i, 2))
                    .collect(),
            })
            .collect();
        let central = self.has_central().then(Q::zero);
        Coords { blocks, central }
    }

    fn check_shape(&self, x: &Coords) -> Result<()> {
        if x.blocks.len() != self.blocks.len()
            || x.blocks
                .iter()
                .zip(&self.blocks)
                .any(|(b, spec)| b.len() != spec.size)
            || x.central.is_some() != self.has_central()
        {
            return Err(Error::Shape("coordinate shape does not match datum".into()));
        }
        Ok(())
    }

    /// Dominance test. For linear blocks both chambers ask for weakly
    /// decreasing entries. For the symplectic family the full-group
    /// chamber is `0 >= x_1 >= ... >= x_g` and the Levi chamber is plain
    /// weakly decreasing.
    pub fn is_dominant(&self, x: &Coords, chamber: Chamber) -> Result<bool> {
        self.check_shape(x)?;
        for block in &x.blocks {
            if block.windows(2).any(|w| w[0] < w[1]) {
                return Ok(false);
            }
            if self.family == Family::Gsp
                && chamber == Chamber::ForG
                && block.first().is_some_and(|&x0| x0 > Q::zero())
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The dominant representative of the Weyl orbit of `x` for the given
    /// chamber. Central coordinates are Weyl-invariant and pass through.
    pub fn dominant_representative(&self, x: &Coords, chamber: Chamber) -> Result<Coords> {
        self.check_shape(x)?;
        let blocks = x
            .blocks
            .iter()
            .map(|block| {
                let mut b = block.clone();
                if self.family == Family::Gsp && chamber == Chamber::ForG {
                    // Signed Weyl group: sort absolute values increasing,
                    // then point every entry weakly below zero.
                    b.iter_mut().for_each(|v| *v = -v.abs());
                    b.sort();
                    b.reverse();
                } else {
                    b.sort();
                    b.reverse();
                }
                b
            })
            .collect();
        Ok(Coords {
            blocks,
            central: x.central,
        })
    }

    /// Action of the longest Weyl element: negation for the symplectic
    /// family, per-block reversal for linear families. Central
    /// coordinates are fixed.
    pub fn w0_apply(&self, x: &Coords) -> Result<Coords> {
        self.check_shape(x)?;
        let blocks = x
            .blocks
            .iter()
            .map(|block| match self.family {
                Family::Gsp => block.iter().map(|&v| -v).collect(),
                _ => block.iter().rev().copied().collect(),
            })
            .collect();
        Ok(Coords {
            blocks,
            central: x.central,
        })
    }

    /// Simple coroots in coweight coordinates, flattened to plain vectors
    /// (blocks concatenated, central coordinate last when present).
    fn simple_coroot_vectors(&self) -> Vec<Vec<Q>> {
        let total: usize = self.blocks.iter().map(|b| b.size).sum();
        let width = total + usize::from(self.has_central());
        let mut gens = Vec::new();
        let mut offset = 0;
        for block in &self.blocks {
            for i in 0..block.size.saturating_sub(1) {
                let mut v = vec![Q::zero(); width];
                v[offset + i] = q_int(1);
                v[offset + i + 1] = q_int(-1);
                gens.push(v);
            }
            if self.family == Family::Gsp {
                // Coroot of the long root -2e_1 in the chamber of `rho`.
                let mut v = vec![Q::zero(); width];
                v[offset] = q_int(-1);
                gens.push(v);
            }
            offset += block.size;
        }
        gens
    }

    /// Whether `x` lies in the closed cone spanned by the positive
    /// coroots over the nonnegative rationals. Central coordinates of
    /// coroots vanish, so membership forces a zero central part.
    pub fn in_coroot_cone(&self, x: &Coords) -> Result<bool> {
        self.check_shape(x)?;
        let mut flat: Vec<Q> = x.blocks.iter().flatten().copied().collect();
        if let Some(c) = x.central {
            flat.push(c);
        }
        Ok(in_nonneg_span(&self.simple_coroot_vectors(), &flat))
    }

    /// Root-cone dominance order: `a <= b` iff `b - a` is a nonnegative
    /// rational combination of positive coroots.
    pub fn dominance_leq(&self, a: &Coords, b: &Coords) -> Result<bool> {
        let diff = b.sub(a)?;
        self.in_coroot_cone(&diff)
    }

    /// Checks that `x` is a point of the weight lattice: entries (and the
    /// central coordinate) integral, plus the symplectic parity relation
    /// between the central coordinate and each block sum.
    pub fn weight_lattice_check(&self, x: &Coords) -> Result<()> {
        self.check_shape(x)?;
        let all_integral = x
            .blocks
            .iter()
            .flatten()
            .chain(x.central.iter())
            .all(|v| v.is_integer());
        if !all_integral {
            return Err(Error::NotIntegral(format!(
                "weight has a non-integral coordinate: {x}"
            )));
        }
        if self.family == Family::Gsp {
            let k = x.central.expect("checked shape");
            for block in &x.blocks {
                if (sum_q(block) - k).numer() % 2 != 0 {
                    return Err(Error::Parity(format!(
                        "central coordinate and block sum differ in parity: {x}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that `x` is a point of the coweight lattice. Symplectic
    /// coweights `(r_1..r_g; r_0)` embed into rank-`2g` linear coordinates
    /// as `r_0 + r_i` and `r_0 - r_i`, all of which must be integers;
    /// linear families need integer entries.
    pub fn coweight_lattice_check(&self, x: &Coords) -> Result<()> {
        self.check_shape(x)?;
        match self.family {
            Family::Gsp => {
                let r0 = x.central.expect("checked shape");
                for block in &x.blocks {
                    for &ri in block {
                        if !(r0 + ri).is_integer() || !(r0 - ri).is_integer() {
                            return Err(Error::NotIntegral(format!(
                                "symplectic coweight does not embed integrally: {x}"
                            )));
                        }
                    }
                }
                Ok(())
            }
            Family::UnitaryProduct => {
                let r0 = x.central.expect("checked shape");
                for block in &x.blocks {
                    for &ri in block {
                        if !(ri - r0).is_integer() {
                            return Err(Error::NotIntegral(format!(
                                "coweight entries must differ from the central one by integers: {x}"
                            )));
                        }
                    }
                }
                if !(q_int(2) * r0).is_integer() {
                    return Err(Error::NotIntegral(format!(
                        "twice the central coordinate must be integral: {x}"
                    )));
                }
                Ok(())
            }
            _ => {
                if x.blocks.iter().flatten().all(|v| v.is_integer()) {
                    Ok(())
                } else {
                    Err(Error::NotIntegral(format!(
                        "coweight has a non-integral coordinate: {x}"
                    )))
                }
            }
        }
    }

    /// Embeds a symplectic coweight `(r_1..r_g; r_0)` into rank `2g` as
    /// the multiset `{r_0 + r_i} ∪ {r_0 - r_i}`, returned in the dominant
    /// (weakly decreasing) arrangement.
    pub fn gsp_embed_coweight(&self, x: &Coords) -> Result<Vec<i64>> {
        if self.family != Family::Gsp {
            return Err(Error::Invalid(
                "coweight embedding is specific to the symplectic family".into(),
            ));
        }
        self.coweight_lattice_check(x)?;
        let r0 = x.central.expect("checked shape");
        let mut out: Vec<i64> = x.blocks[0]
            .iter()
            .flat_map(|&ri| [(r0 + ri).to_integer(), (r0 - ri).to_integer()])
            .collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        Ok(out)
    }
}

/// Block coordinates plus optional central coordinate; the shared
/// container for weights and coweights.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Coords {
    pub blocks: Vec<Vec<Q>>,
    pub central: Option<Q>,
}

impl Coords {
    pub fn add(&self, other: &Coords) -> Result<Coords> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Coords) -> Result<Coords> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Coords {
        Coords {
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|&v| -v).collect())
                .collect(),
            central: self.central.map(|c| -c),
        }
    }

    fn zip_with(&self, other: &Coords, f: impl Fn(Q, Q) -> Q) -> Result<Coords> {
        if self.blocks.len() != other.blocks.len()
            || self
                .blocks
                .iter()
                .zip(&other.blocks)
                .any(|(a, b)| a.len() != b.len())
            || self.central.is_some() != other.central.is_some()
        {
            return Err(Error::Shape("coordinate shapes differ".into()));
        }
        Ok(Coords {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
            central: match (self.central, other.central) {
                (Some(a), Some(b)) => Some(f(a, b)),
                _ => None,
            },
        })
    }
}

impl fmt::Display for Coords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "(")?;
        for block in &self.blocks {
            if !first {
                write!(f, " | ")?;
            }
            first = false;
            let parts: Vec<String> = block.iter().map(|&v| crate::arith::format_q(v)).collect();
            write!(f, "{}", parts.join(","))?;
        }
        if let Some(c) = self.central {
            write!(f, "; {}", crate::arith::format_q(c))?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl3_vec(entries: [i64; 3]) -> Coords {
        RootDatum::gl(3).unwrap().coords_int(&entries, None).unwrap()
    }

    #[test]
    fn rho_ladders() {
        let gl3 = RootDatum::gl(3).unwrap();
        assert_eq!(
            gl3.rho().blocks[0],
            vec![q_int(1), q_int(0), q_int(-1)]
        );
        let gsp2 = RootDatum::gsp(2).unwrap();
        let rho = gsp2.rho();
        assert_eq!(rho.blocks[0], vec![q_int(-1), q_int(-2)]);
        assert_eq!(rho.central, Some(Q::zero()));
        let gl2 = RootDatum::gl(2).unwrap();
        assert_eq!(gl2.rho().blocks[0], vec![q(1, 2), q(-1, 2)]);
    }

    #[test]
    fn pairing_respects_block_degree() {
        let res = RootDatum::res_product(&[(2, 3)]).unwrap();
        let a = res.coords_int(&[1, 2], None).unwrap();
        let b = res.coords_int(&[4, 5], None).unwrap();
        assert_eq!(res.pairing(&a, &b).unwrap(), q_int(3 * (4 + 10)));

        let gsp = RootDatum::gsp(1).unwrap();
        let w = gsp.coords_int(&[3], Some(2)).unwrap();
        let c = gsp
            .coords(vec![vec![q(1, 2)]], Some(q(-1, 2)))
            .unwrap();
        assert_eq!(gsp.pairing(&w, &c).unwrap(), q(3, 2) - q_int(1));
    }

    #[test]
    fn symplectic_chambers() {
        let gsp2 = RootDatum::gsp(2).unwrap();
        let x = gsp2.coords_int(&[-1, -3], Some(0)).unwrap();
        assert!(gsp2.is_dominant(&x, Chamber::ForG).unwrap());
        let y = gsp2.coords_int(&[3, -1], Some(0)).unwrap();
        assert!(!gsp2.is_dominant(&y, Chamber::ForG).unwrap());
        assert!(gsp2.is_dominant(&y, Chamber::ForLevi).unwrap());
        assert_eq!(
            gsp2.dominant_representative(&y, Chamber::ForG)
                .unwrap()
                .blocks[0],
            vec![q_int(-1), q_int(-3)]
        );
        assert!(gsp2.is_dominant(&gsp2.rho(), Chamber::ForG).unwrap());
    }

    #[test]
    fn dominant_representative_maximizes_pairing_against_dominant_vectors() {
        // For dominant lambda, <lambda, dom(x)> is the maximum of
        // <lambda, wx> over the orbit; spot-check on the symplectic family
        // by brute force over signed permutations.
        let gsp2 = RootDatum::gsp(2).unwrap();
        let lam = gsp2
            .coords(vec![vec![q(-1, 2), q(-1, 2)]], Some(q(-1, 2)))
            .unwrap();
        assert!(gsp2.is_dominant(&lam, Chamber::ForG).unwrap());
        let x = gsp2.coords_int(&[2, -5], Some(7)).unwrap();
        let dom = gsp2.dominant_representative(&x, Chamber::ForG).unwrap();
        let mut best: Option<Q> = None;
        for signs in 0..4u32 {
            for perm in [[0usize, 1], [1, 0]] {
                let b = &x.blocks[0];
                let entries: Vec<Q> = (0..2)
                    .map(|i| {
                        let v = b[perm[i]];
                        if signs >> i & 1 == 1 {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect();
                let wx = gsp2.coords(vec![entries], x.central).unwrap();
                let val = gsp2.pairing(&lam, &wx).unwrap();
                best = Some(best.map_or(val, |b: Q| b.max(val)));
            }
        }
        assert_eq!(gsp2.pairing(&lam, &dom).unwrap(), best.unwrap());
    }

    #[test]
    fn gl_dominance_matches_prefix_sums() {
        let gl3 = RootDatum::gl(3).unwrap();
        let a = gl3_vec([1, 1, 1]);
        let b = gl3_vec([2, 1, 0]);
        assert!(gl3.dominance_leq(&a, &b).unwrap());
        assert!(!gl3.dominance_leq(&b, &a).unwrap());
        // Different totals are incomparable.
        let c = gl3_vec([2, 2, 0]);
        assert!(!gl3.dominance_leq(&a, &c).unwrap());
        assert!(gl3.dominance_leq(&b, &b).unwrap());
    }

    #[test]
    fn symplectic_coroot_cone_closed_form() {
        // Membership should match: central zero, prefix sums S_k >= S_g
        // for k < g, and S_g <= 0.
        let gsp3 = RootDatum::gsp(3).unwrap();
        let cases: Vec<([i64; 3], i64)> = vec![
            ([1, -1, 0], 0),
            ([0, 0, -1], 0),
            ([1, 0, -2], 0),
            ([-1, 0, 0], 0),
            ([1, 0, 0], 0),
            ([0, 0, 1], 0),
            ([1, -1, 0], 1),
        ];
        for (entries, central) in cases {
            let x = gsp3.coords_int(&entries, Some(central)).unwrap();
            let sums: Vec<i64> = (1..=3)
                .map(|k| entries[..k].iter().sum::<i64>())
                .collect();
            let expected = central == 0
                && sums[2] <= 0
                && sums[..2].iter().all(|&s| s >= sums[2]);
            assert_eq!(
                gsp3.in_coroot_cone(&x).unwrap(),
                expected,
                "entries {entries:?}; central {central}"
            );
        }
    }

    #[test]
    fn lattice_checks() {
        let gsp1 = RootDatum::gsp(1).unwrap();
        assert!(gsp1
            .weight_lattice_check(&gsp1.coords_int(&[2], Some(-2)).unwrap())
            .is_ok());
        assert!(matches!(
            gsp1.weight_lattice_check(&gsp1.coords_int(&[2], Some(1)).unwrap()),
            Err(Error::Parity(_))
        ));
        let half = gsp1.coords(vec![vec![q(1, 2)]], Some(q(1, 2))).unwrap();
        assert!(matches!(
            gsp1.weight_lattice_check(&half),
            Err(Error::NotIntegral(_))
        ));
        assert!(gsp1.coweight_lattice_check(&half).is_ok());
        assert_eq!(gsp1.gsp_embed_coweight(&half).unwrap(), vec![1, 0]);
        let bad = gsp1.coords(vec![vec![q(1, 2)]], Some(q_int(1))).unwrap();
        assert!(matches!(
            gsp1.coweight_lattice_check(&bad),
            Err(Error::NotIntegral(_))
        ));
    }

    #[test]
    fn gsp_embedding_of_minuscule_point() {
        let gsp2 = RootDatum::gsp(2).unwrap();
        let mu = gsp2
            .coords(vec![vec![q(1, 2), q(1, 2)]], Some(q(1, 2)))
            .unwrap();
        assert_eq!(gsp2.gsp_embed_coweight(&mu).unwrap(), vec![1, 1, 0, 0]);
        let inv = gsp2
            .coords(vec![vec![q(-1, 2), q(-1, 2)]], Some(q(-1, 2)))
            .unwrap();
        assert_eq!(gsp2.gsp_embed_coweight(&inv).unwrap(), vec![0, 0, -1, -1]);
    }

    #[test]
    fn w0_negates_or_reverses() {
        let gl3 = RootDatum::gl(3).unwrap();
        let x = gl3_vec([2, 1, 0]);
        assert_eq!(
            gl3.w0_apply(&x).unwrap().blocks[0],
            vec![q_int(0), q_int(1), q_int(2)]
        );
        let gsp2 = RootDatum::gsp(2).unwrap();
        let y = gsp2.coords_int(&[3, 1], Some(5)).unwrap();
        let w0y = gsp2.w0_apply(&y).unwrap();
        assert_eq!(w0y.blocks[0], vec![q_int(-3), q_int(-1)]);
        assert_eq!(w0y.central, Some(q_int(5)));
    }
}
