//! Extended affine Weyl groups realized as periodic permutations of the
//! integers in window notation, with length, reduced words, Bruhat order,
//! parahoric double cosets, admissible sets, and minimal coset
//! representatives labeling stratum closures.
//!
//! An element is stored by its window `u(1), ..., u(m)`; it extends to all
//! of `Z` by `u(i + m) = u(i) + m`. Translations by coweights, the finite
//! Weyl group, and the length-zero stabilizer of the base alcove all live
//! in the same container.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::{Error, Result};

/// A periodic permutation of the integers: `window[k] = u(k + 1)` for
/// `k < m`, extended by `u(i + m) = u(i) + m`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffPerm {
    m: usize,
    window: Vec<i64>,
}

impl AffPerm {
    pub fn identity(m: usize) -> AffPerm {
        AffPerm {
            m,
            window: (1..=m as i64).collect(),
        }
    }

    /// Validates that the window entries hit each residue class modulo
    /// `m` exactly once.
    pub fn from_window(window: Vec<i64>) -> Result<AffPerm> {
        let m = window.len();
        if m == 0 {
            return Err(Error::Shape("empty window".into()));
        }
        let mut seen = vec![false; m];
        for &v in &window {
            let r = v.rem_euclid(m as i64) as usize;
            if seen[r] {
                return Err(Error::Shape(format!(
                    "window {window:?} repeats a residue class"
                )));
            }
            seen[r] = true;
        }
        Ok(AffPerm { m, window })
    }

    pub fn window(&self) -> &[i64] {
        &self.window
    }

    pub fn window_size(&self) -> usize {
        self.m
    }

    /// Value at any integer, by periodicity.
    pub fn apply(&self, i: i64) -> i64 {
        let m = self.m as i64;
        let q = (i - 1).div_euclid(m);
        let r = (i - 1).rem_euclid(m) as usize;
        self.window[r] + q * m
    }

    /// Composition `(self * rhs)(i) = self(rhs(i))`.
    pub fn mul(&self, rhs: &AffPerm) -> AffPerm {
        assert_eq!(self.m, rhs.m, "window size mismatch");
        AffPerm {
            m: self.m,
            window: rhs.window.iter().map(|&v| self.apply(v)).collect(),
        }
    }

    pub fn inverse(&self) -> AffPerm {
        let m = self.m as i64;
        let mut window = vec![0i64; self.m];
        for (k, &v) in self.window.iter().enumerate() {
            let i = k as i64 + 1;
            let q = (v - 1).div_euclid(m);
            let r = (v - 1).rem_euclid(m);
            window[r as usize] = i - q * m;
        }
        AffPerm { m: self.m, window }
    }

    pub fn is_identity(&self) -> bool {
        self.window
            .iter()
            .enumerate()
            .all(|(k, &v)| v == k as i64 + 1)
    }

    /// Writes the element as a translation followed by a finite
    /// permutation: `u = t_v w` with `w(i)` in `1..=m`. Returns
    /// `(v, w images)`.
    pub fn translation_and_finite(&self) -> (Vec<i64>, Vec<usize>) {
        let m = self.m as i64;
        let mut v = vec![0i64; self.m];
        let mut w = vec![0usize; self.m];
        for (k, &u) in self.window.iter().enumerate() {
            let r = (u - 1).rem_euclid(m) + 1;
            w[k] = r as usize;
            v[r as usize - 1] = (u - r) / m;
        }
        (v, w)
    }

    /// Index of the connected component of the stabilizer group this
    /// element belongs to: the average displacement `sum(u(i) - i) / m`.
    pub fn omega_component(&self) -> i64 {
        let m = self.m as i64;
        let total: i64 = self
            .window
            .iter()
            .enumerate()
            .map(|(k, &v)| v - (k as i64 + 1))
            .sum();
        total / m
    }
}

/// The affine family fixing the simple reflections and the window
/// predicate: linear groups on `n` letters, or symplectic similitude
/// groups on `2g` letters.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AffineFamily {
    Linear { n: usize },
    Symplectic { g: usize },
}

impl AffineFamily {
    pub fn window_size(&self) -> usize {
        match *self {
            AffineFamily::Linear { n } => n,
            AffineFamily::Symplectic { g } => 2 * g,
        }
    }

    /// Number of simple reflections; indices run from 0 (the affine one)
    /// to `simple_count() - 1`.
    pub fn simple_count(&self) -> usize {
        match *self {
            AffineFamily::Linear { n } => n,
            AffineFamily::Symplectic { g } => g + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AffineFamily::Linear { n } => n >= 2,
            AffineFamily::Symplectic { g } => g >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadRank(
                "affine family needs rank at least 2 (linear) or genus at least 1".into(),
            ))
        }
    }

    pub fn simple(&self, j: usize) -> AffPerm {
        let m = self.window_size();
        assert!(j < self.simple_count(), "simple reflection out of range");
        let mut window: Vec<i64> = (1..=m as i64).collect();
        match *self {
            AffineFamily::Linear { n } => {
                if j == 0 {
                    window[0] = 0;
                    window[n - 1] = n as i64 + 1;
                } else {
                    window.swap(j - 1, j);
                }
            }
            AffineFamily::Symplectic { g } => {
                if j == 0 {
                    window[0] = 0;
                    window[2 * g - 1] = 2 * g as i64 + 1;
                } else if j == g {
                    window.swap(g - 1, g);
                } else {
                    window.swap(j - 1, j);
                    window.swap(2 * g - j - 1, 2 * g - j);
                }
            }
        }
        AffPerm { m, window }
    }

    /// Whether the element lies in this family's extended affine Weyl
    /// group. Linear windows always do; symplectic ones must satisfy
    /// `u(i) + u(2g + 1 - i) = 2g + 1 + 2g c` for a constant integer `c`.
    pub fn contains(&self, x: &AffPerm) -> bool {
        if x.m != self.window_size() {
            return false;
        }
        match *self {
            AffineFamily::Linear { .. } => true,
            AffineFamily::Symplectic { g } => {
                let m = 2 * g as i64;
                let s = x.window[0] + x.apply(m);
                if (s - (m + 1)).rem_euclid(m) != 0 {
                    return false;
                }
                (1..=m).all(|i| x.apply(i) + x.apply(m + 1 - i) == s)
            }
        }
    }

    /// Translation element for a lattice vector in window coordinates
    /// (length `n` for linear, `2g` with constant pair sums for
    /// symplectic).
    pub fn translation(&self, c: &[i64]) -> Result<AffPerm> {
        let m = self.window_size();
        if c.len() != m {
            return Err(Error::Shape(format!(
                "translation vector must have length {m}"
            )));
        }
        if let AffineFamily::Symplectic { g } = *self {
            let s = c[0] + c[2 * g - 1];
            if (1..=g).any(|i| c[i - 1] + c[2 * g - i] != s) {
                return Err(Error::NotIntegral(
                    "symplectic translation vector needs constant pair sums".into(),
                ));
            }
        }
        Ok(AffPerm {
            m,
            window: c
                .iter()
                .enumerate()
                .map(|(k, &v)| k as i64 + 1 + m as i64 * v)
                .collect(),
        })
    }

    pub fn right_descent(&self, x: &AffPerm, j: usize) -> bool {
        assert!(j < self.simple_count());
        let m = x.m as i64;
        match *self {
            AffineFamily::Linear { .. } => {
                if j == 0 {
                    x.apply(m) - m > x.window[0]
                } else {
                    x.window[j - 1] > x.window[j]
                }
            }
            AffineFamily::Symplectic { .. } => {
                if j == 0 {
                    x.apply(m) - m > x.window[0]
                } else {
                    x.window[j - 1] > x.window[j]
                }
            }
        }
    }

    pub fn left_descent(&self, x: &AffPerm, j: usize) -> bool {
        self.right_descent(&x.inverse(), j)
    }

    fn first_right_descent(&self, x: &AffPerm) -> Option<usize> {
        (0..self.simple_count()).find(|&j| self.right_descent(x, j))
    }

    /// Coxeter length in this family's system.
    pub fn length(&self, x: &AffPerm) -> usize {
        match *self {
            AffineFamily::Linear { n } => {
                // Inversion-count formula, exact for the extended linear
                // affine group.
                let nn = n as i64;
                let mut total = 0i64;
                for i in 0..n {
                    for j in i + 1..n {
                        total += (x.window[j] - x.window[i]).div_euclid(nn).abs();
                    }
                }
                total as usize
            }
            AffineFamily::Symplectic { .. } => {
                debug_assert!(self.contains(x), "element outside symplectic family");
                let mut y = x.clone();
                let mut len = 0;
                while let Some(j) = self.first_right_descent(&y) {
                    y = y.mul(&self.simple(j));
                    len += 1;
                }
                len
            }
        }
    }

    /// Greedy factorization `x = omega * s_{w_1} * ... * s_{w_k}` with the
    /// word reduced and `omega` of length zero.
    pub fn reduced_word(&self, x: &AffPerm) -> (AffPerm, Vec<usize>) {
        let mut y = x.clone();
        let mut collected = Vec::new();
        while let Some(j) = self.first_right_descent(&y) {
            y = y.mul(&self.simple(j));
            collected.push(j);
        }
        collected.reverse();
        (y, collected)
    }

    /// Bruhat order on the extended group: comparable only within one
    /// component of the length-zero stabilizer.
    pub fn bruhat_leq(&self, u: &AffPerm, v: &AffPerm) -> bool {
        let (lu, lv) = (self.length(u), self.length(v));
        if lu > lv {
            return false;
        }
        if lv == 0 {
            return u == v;
        }
        let j = self
            .first_right_descent(v)
            .expect("positive length implies a descent");
        let s = self.simple(j);
        let v_short = v.mul(&s);
        if self.right_descent(u, j) {
            self.bruhat_leq(&u.mul(&s), &v_short)
        } else {
            self.bruhat_leq(u, &v_short)
        }
    }

    /// All elements of the finite Weyl group (products of the nonzero
    /// simple reflections).
    pub fn finite_weyl(&self) -> Vec<AffPerm> {
        let id = AffPerm::identity(self.window_size());
        let gens: Vec<AffPerm> = (1..self.simple_count()).map(|j| self.simple(j)).collect();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([id.clone()]);
        seen.insert(id);
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            out.push(x.clone());
            for s in &gens {
                let y = x.mul(s);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        out
    }

    /// Finite Weyl orbit of a lattice vector under the window action
    /// `(w . c)_{w(i)} = c_i`.
    pub fn coweight_orbit(&self, c: &[i64]) -> Result<Vec<Vec<i64>>> {
        if c.len() != self.window_size() {
            return Err(Error::Shape("orbit vector has the wrong length".into()));
        }
        let gens: Vec<AffPerm> = (1..self.simple_count()).map(|j| self.simple(j)).collect();
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut queue = VecDeque::from([c.to_vec()]);
        seen.insert(c.to_vec());
        while let Some(v) = queue.pop_front() {
            for s in &gens {
                let mut next = vec![0i64; v.len()];
                for (k, &val) in v.iter().enumerate() {
                    next[s.window[k] as usize - 1] = val;
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }
}

/// Minimal representative of the double coset `W_I x W_I`, where `W_I` is
/// generated by the simple reflections whose indices are NOT in `level`.
pub fn double_coset_minimum(
    family: AffineFamily,
    level: &BTreeSet<usize>,
    x: &AffPerm,
) -> AffPerm {
    let outside: Vec<usize> = (0..family.simple_count())
        .filter(|j| !level.contains(j))
        .collect();
    let mut y = x.clone();
    'outer: loop {
        for &j in &outside {
            if family.left_descent(&y, j) {
                y = family.simple(j).mul(&y);
                continue 'outer;
            }
            if family.right_descent(&y, j) {
                y = y.mul(&family.simple(j));
                continue 'outer;
            }
        }
        return y;
    }
}

/// Elements of `W_I`, the finite group generated by the simple
/// reflections outside `level`.
fn level_subgroup(family: AffineFamily, level: &BTreeSet<usize>) -> Vec<AffPerm> {
    let outside: Vec<usize> = (0..family.simple_count())
        .filter(|j| !level.contains(j))
        .collect();
    let id = AffPerm::identity(family.window_size());
    let mut seen: HashSet<AffPerm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for &j in &outside {
            let y = x.mul(&family.simple(j));
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// All elements of the double coset `W_I x W_I`.
fn double_coset_elements(
    family: AffineFamily,
    level: &BTreeSet<usize>,
    x: &AffPerm,
) -> HashSet<AffPerm> {
    let w_i = level_subgroup(family, level);
    let mut out = HashSet::new();
    for a in &w_i {
        let ax = a.mul(x);
        for b in &w_i {
            out.insert(ax.mul(b));
        }
    }
    out
}

/// Dimension of the orbit indexed by a double coset: the largest length
/// among coset elements minimal in their right `W_I`-coset. This is the
/// top exponent of the orbit's point-count polynomial.
fn orbit_dimension(family: AffineFamily, level: &BTreeSet<usize>, x: &AffPerm) -> usize {
    let outside: Vec<usize> = (0..family.simple_count())
        .filter(|j| !level.contains(j))
        .collect();
    double_coset_elements(family, level, x)
        .into_iter()
        .filter(|y| outside.iter().all(|&j| !family.right_descent(y, j)))
        .map(|y| family.length(&y))
        .max()
        .expect("double coset is nonempty")
}

/// One stratum of the level-`I` admissible set: the minimal double coset
/// representative and the dimension of the corresponding orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub representative: AffPerm,
    pub dimension: usize,
}

/// The admissible set for the coweight with window vector `mu` at
/// parahoric level `level`: all double cosets whose representatives are
/// Bruhat-below a translation by a finite Weyl conjugate of `mu`,
/// computed by closing the subword products of reduced words. Sorted by
/// dimension then window for determinism.
pub fn admissible_set(
    family: AffineFamily,
    level: &BTreeSet<usize>,
    mu: &[i64],
) -> Result<Vec<Stratum>> {
    family.validate()?;
    if level.is_empty() {
        return Err(Error::Invalid(
            "level must contain at least one simple index".into(),
        ));
    }
    if level.iter().any(|&j| j >= family.simple_count()) {
        return Err(Error::Invalid("level index out of range".into()));
    }

    let mut iwahori: HashSet<AffPerm> = HashSet::new();
    for c in family.coweight_orbit(mu)? {
        let t = family.translation(&c)?;
        let (omega, word) = family.reduced_word(&t);
        let mut products: HashSet<AffPerm> = HashSet::from([omega]);
        for &j in &word {
            let s = family.simple(j);
            let grown: Vec<AffPerm> = products.iter().map(|x| x.mul(&s)).collect();
            products.extend(grown);
        }
        iwahori.extend(products);
    }

    let mut reps: HashSet<AffPerm> = HashSet::new();
    for x in iwahori {
        reps.insert(double_coset_minimum(family, level, &x));
    }
    let mut strata: Vec<Stratum> = reps
        .into_iter()
        .map(|representative| Stratum {
            dimension: orbit_dimension(family, level, &representative),
            representative,
        })
        .collect();
    strata.sort_by(|a, b| {
        (a.dimension, a.representative.window()).cmp(&(b.dimension, b.representative.window()))
    });
    Ok(strata)
}

/// Number of points of the orbit of a stratum representative over a field
/// with `q0` elements: the sum of `q0^length` over the elements of the
/// double coset that are minimal in their right `W_I`-coset.
pub fn point_count(
    family: AffineFamily,
    level: &BTreeSet<usize>,
    representative: &AffPerm,
    q0: u64,
) -> u64 {
    let outside: Vec<usize> = (0..family.simple_count())
        .filter(|j| !level.contains(j))
        .collect();
    double_coset_elements(family, level, representative)
        .into_iter()
        .filter(|y| outside.iter().all(|&j| !family.right_descent(y, j)))
        .map(|y| q0.pow(family.length(&y) as u32))
        .sum()
}

/// Minimal-length finite Weyl element carrying the dominant coweight
/// window vector to the stated orbit vector, labeling one irreducible
/// component of the corresponding translation union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KostantRep {
    pub coweight: Vec<i64>,
    pub representative: AffPerm,
    pub length: usize,
}

pub fn kostant_representatives(family: AffineFamily, mu: &[i64]) -> Result<Vec<KostantRep>> {
    family.validate()?;
    let orbit = family.coweight_orbit(mu)?;
    let finite = family.finite_weyl();
    let mut out = Vec::new();
    for c in orbit {
        let mut best: Option<(usize, AffPerm)> = None;
        for w in &finite {
            let mut moved = vec![0i64; mu.len()];
            for (k, &val) in mu.iter().enumerate() {
                moved[w.window[k] as usize - 1] = val;
            }
            if moved != c {
                continue;
            }
            let len = family.length(w);
            let better = match &best {
                None => true,
                Some((l, b)) => len < *l || (len == *l && w.window() < b.window()),
            };
            if better {
                best = Some((len, w.clone()));
            }
        }
        let (length, representative) =
            best.ok_or_else(|| Error::Invalid("orbit vector not reachable".into()))?;
        out.push(KostantRep {
            coweight: c,
            representative,
            length,
        });
    }
    out.sort_by(|a, b| (a.length, &a.coweight).cmp(&(b.length, &b.coweight)));
    Ok(out)
}
