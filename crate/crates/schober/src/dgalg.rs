//! Exact homology engine for finitely generated dg path categories.
//!
//! The categories handled here have morphisms freely generated by graded
//! arrows and a differential that lowers degree by one and raises word
//! length by one on generators. The internal grade `s = degree + length` is
//! therefore preserved, so each mapping complex splits into finite blocks
//! that can be processed with exact linear algebra.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DgError {
    #[error("differential of {gen} is not composable")]
    NotComposable { gen: String },
    #[error("differential of {gen} has a term of degree {found}, expected {expected}")]
    WrongDegree { gen: String, found: i64, expected: i64 },
    #[error("d^2 != 0 at {gen}: residue {residue}")]
    DSquared { gen: String, residue: String },
    #[error("homology ranks changed between length bounds {at} and {next}")]
    Unstable { at: usize, next: usize },
    #[error("{0}")]
    Precondition(String),
}

/// Ground field for rank computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// A generator arrow of the path category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
    pub degree: i64,
}

/// A word is a composable sequence of generator indices written
/// target-to-source: `[g, f]` denotes the composite `g ∘ f`.
pub type Word = Vec<usize>;

/// Formal integer combination of composable words.
pub type Combination = Vec<(i64, Word)>;

/// A dg category with free underlying graded path category and
/// length-homogeneous differential.
#[derive(Debug, Clone)]
pub struct DgPathCategory {
    pub objects: Vec<String>,
    pub generators: Vec<Generator>,
    /// Differential per generator, as combinations of length-2 words
    /// (longer words are permitted by the engine but unused here).
    pub differential: Vec<Combination>,
}

impl DgPathCategory {
    pub fn word_src(&self, w: &Word) -> usize {
        self.generators[*w.last().expect("empty word")].src
    }

    pub fn word_tgt(&self, w: &Word) -> usize {
        self.generators[w[0]].tgt
    }

    pub fn word_degree(&self, w: &Word) -> i64 {
        w.iter().map(|&g| self.generators[g].degree).sum()
    }

    pub fn is_composable(&self, w: &Word) -> bool {
        w.windows(2).all(|p| self.generators[p[0]].src == self.generators[p[1]].tgt)
    }

    /// Differential of a word by the graded Leibniz rule
    /// `d(fg) = d(f) g + (-1)^{|f|} f d(g)`.
    ///
    /// Words are stored target-to-source, so index 0 is the outermost left
    /// factor and the Koszul sign at position `i` collects the degrees of
    /// the letters before it.
    pub fn d_word(&self, word: &Word) -> BTreeMap<Word, i64> {
        let mut acc: BTreeMap<Word, i64> = BTreeMap::new();
        let mut sign = 1i64;
        for (i, &g) in word.iter().enumerate() {
            for (c, dw) in &self.differential[g] {
                let mut new_word = Vec::with_capacity(word.len() + dw.len() - 1);
                new_word.extend_from_slice(&word[..i]);
                new_word.extend_from_slice(dw);
                new_word.extend_from_slice(&word[i + 1..]);
                let e = acc.entry(new_word).or_insert(0);
                *e += sign * c;
            }
            sign *= if self.generators[g].degree % 2 == 0 { 1 } else { -1 };
        }
        acc.retain(|_, c| *c != 0);
        acc
    }

    /// Structural checks: composability, degree/length homogeneity, d^2 = 0.
    pub fn check_d_squared(&self) -> Vec<DgError> {
        let mut errors = Vec::new();
        for (gi, gen) in self.generators.iter().enumerate() {
            for (_, w) in &self.differential[gi] {
                if w.is_empty() || !self.is_composable(w) {
                    errors.push(DgError::NotComposable { gen: gen.name.clone() });
                    continue;
                }
                if self.word_src(w) != gen.src || self.word_tgt(w) != gen.tgt {
                    errors.push(DgError::NotComposable { gen: gen.name.clone() });
                    continue;
                }
                let deg = self.word_degree(w);
                if deg != gen.degree - 1 {
                    errors.push(DgError::WrongDegree {
                        gen: gen.name.clone(),
                        found: deg,
                        expected: gen.degree - 1,
                    });
                }
            }
            let mut acc: BTreeMap<Word, i64> = BTreeMap::new();
            for (c, w) in &self.differential[gi] {
                for (w2, c2) in self.d_word(w) {
                    let e = acc.entry(w2).or_insert(0);
                    *e += c * c2;
                }
            }
            acc.retain(|_, c| *c != 0);
            if !acc.is_empty() {
                let mut residue = String::new();
                for (w, c) in &acc {
                    let names: Vec<_> =
                        w.iter().map(|&g| self.generators[g].name.as_str()).collect();
                    let _ = write!(residue, "{c:+}*{} ", names.join("."));
                }
                errors.push(DgError::DSquared { gen: gen.name.clone(), residue });
            }
        }
        errors
    }

    /// Enumerates the composable words from `src` to `tgt` with the given
    /// length and total degree. Generator degrees may be negative (this
    /// happens in `D_m` for m > n), so the search is guided by a
    /// reachability table over (remaining length, object, remaining degree).
    fn words(&self, src: usize, tgt: usize, length: usize, degree: i64) -> Vec<Word> {
        let n_obj = self.objects.len();
        let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n_obj];
        for (i, g) in self.generators.iter().enumerate() {
            outgoing[g.src].push(i);
        }
        let min_deg = self.generators.iter().map(|g| g.degree).min().unwrap_or(0);
        let max_deg = self.generators.iter().map(|g| g.degree).max().unwrap_or(0);
        // degree offsets: remaining degree lies in [len*min_deg, len*max_deg]
        let lo = (length as i64 * min_deg).min(0);
        let hi = (length as i64 * max_deg).max(0);
        let width = (hi - lo + 1) as usize;
        let idx = |d: i64| -> Option<usize> {
            if d < lo || d > hi {
                None
            } else {
                Some((d - lo) as usize)
            }
        };
        // reach[len][obj][d] = some word obj -> tgt of this length and degree d
        let mut reach = vec![vec![vec![false; width]; n_obj]; length + 1];
        if let Some(z) = idx(0) {
            reach[0][tgt][z] = true;
        }
        for len in 1..=length {
            for (gi, g) in self.generators.iter().enumerate() {
                let _ = gi;
                for d in lo..=hi {
                    let rest = d - g.degree;
                    if let (Some(di), Some(ri)) = (idx(d), idx(rest)) {
                        if reach[len - 1][g.tgt][ri] {
                            reach[len][g.src][di] = true;
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        #[allow(clippy::too_many_arguments)]
        fn rec(
            cat: &DgPathCategory,
            outgoing: &[Vec<usize>],
            reach: &[Vec<Vec<bool>>],
            idx: &dyn Fn(i64) -> Option<usize>,
            at: usize,
            remaining: usize,
            degree_left: i64,
            stack: &mut Vec<usize>,
            out: &mut Vec<Word>,
        ) {
            if remaining == 0 {
                let mut w = stack.clone();
                w.reverse();
                out.push(w);
                return;
            }
            for &g in &outgoing[at] {
                let rest = degree_left - cat.generators[g].degree;
                let ok = idx(rest)
                    .map(|ri| reach[remaining - 1][cat.generators[g].tgt][ri])
                    .unwrap_or(false);
                if !ok {
                    continue;
                }
                stack.push(g);
                rec(cat, outgoing, reach, idx, cat.generators[g].tgt, remaining - 1, rest, stack, out);
                stack.pop();
            }
        }
        if idx(degree).map(|di| reach[length][src][di]).unwrap_or(false) {
            rec(self, &outgoing, &reach, &idx, src, length, degree, &mut stack, &mut out);
        }
        out.sort();
        out
    }
}

/// Rank of an integer matrix over the chosen field.
/// Rows are sparse (column, coefficient) lists.
pub fn matrix_rank(rows: &[Vec<(usize, i64)>], cols: usize, field: Field) -> usize {
    match field {
        Field::Prime(p) => rank_mod_p(rows, cols, p),
        Field::Rational => rank_bigint(rows, cols),
    }
}

fn rank_mod_p(rows: &[Vec<(usize, i64)>], cols: usize, p: u64) -> usize {
    let m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut dense = vec![0u64; cols];
            for &(c, v) in r {
                dense[c] = v.rem_euclid(p as i64) as u64;
            }
            dense
        })
        .collect();
    let mut m = m;
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = mod_inv(m[rank][col], p);
        for c in col..cols {
            m[rank][c] = m[rank][c] * inv % p;
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for c in col..cols {
                    row[c] = (row[c] + (p - f % p) * pivot_row[c]) % p;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Fraction-free Gaussian elimination (Bareiss) over i128 with a fallback
/// to arbitrary precision on overflow; exact rank over the rationals.
fn rank_bigint(rows: &[Vec<(usize, i64)>], cols: usize) -> usize {
    rank_i128(rows, cols).unwrap_or_else(|| rank_bigint_slow(rows, cols))
}

fn rank_i128(rows: &[Vec<(usize, i64)>], cols: usize) -> Option<usize> {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            let mut dense = vec![0i128; cols];
            for &(c, v) in r {
                dense[c] = v as i128;
            }
            dense
        })
        .collect();
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        let pivot = m[rank][col];
        for r in rank + 1..m.len() {
            if m[r][col] == 0 {
                continue;
            }
            for c in col + 1..cols {
                let a = pivot.checked_mul(m[r][c])?;
                let b = m[r][col].checked_mul(m[rank][c])?;
                m[r][c] = a.checked_sub(b)? / prev;
            }
            m[r][col] = 0;
        }
        prev = pivot;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    Some(rank)
}

fn rank_bigint_slow(rows: &[Vec<(usize, i64)>], cols: usize) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut dense = vec![BigInt::zero(); cols];
            for &(c, v) in r {
                dense[c] = BigInt::from(v);
            }
            dense
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, piv);
        let pivot = m[rank][col].clone();
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() && m[r][col + 1..].iter().all(|x| x.is_zero()) {
                continue;
            }
            for c in col + 1..cols {
                let num = &pivot * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = &num / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Homology dimensions of one mapping complex, by homological degree, with a
/// completeness flag per degree.
#[derive(Debug, Clone, Default)]
pub struct HomologyDims {
    /// degree -> (rank, complete)
    pub dims: BTreeMap<i64, (usize, bool)>,
    pub field: Option<Field>,
}

impl HomologyDims {
    pub fn rank(&self, degree: i64) -> usize {
        self.dims.get(&degree).map_or(0, |&(r, _)| r)
    }

    pub fn complete(&self, degree: i64) -> bool {
        self.dims.get(&degree).is_none_or(|&(_, c)| c)
    }
}

/// Caching homology engine over one dg path category and field.
///
/// The differential preserves the internal grade `s = degree + length`, so
/// `H_d` splits over `s`; the block-`s` summand at degree `d` only involves
/// words of lengths `s - d - 1 .. s - d + 1`. Word bases and boundary ranks
/// are cached across neighboring degrees.
pub struct HomologyEngine<'a> {
    cat: &'a DgPathCategory,
    field: Field,
    words: std::cell::RefCell<BTreeMap<(usize, usize, usize, i64), std::rc::Rc<Vec<Word>>>>,
    ranks: std::cell::RefCell<BTreeMap<(usize, usize, i64, i64), usize>>,
}

impl<'a> HomologyEngine<'a> {
    pub fn new(cat: &'a DgPathCategory, field: Field) -> Self {
        assert!(
            cat.generators.iter().all(|g| g.degree >= -1),
            "block finiteness requires generator degrees >= -1"
        );
        HomologyEngine {
            cat,
            field,
            words: Default::default(),
            ranks: Default::default(),
        }
    }

    fn basis(&self, src: usize, tgt: usize, len: i64, deg: i64) -> std::rc::Rc<Vec<Word>> {
        if len < 0 {
            return std::rc::Rc::new(Vec::new());
        }
        let key = (src, tgt, len as usize, deg);
        if let Some(w) = self.words.borrow().get(&key) {
            return w.clone();
        }
        let words = if len == 0 {
            if src == tgt && deg == 0 {
                vec![Vec::new()]
            } else {
                Vec::new()
            }
        } else {
            self.cat.words(src, tgt, len as usize, deg)
        };
        let rc = std::rc::Rc::new(words);
        self.words.borrow_mut().insert(key, rc.clone());
        rc
    }

    /// Rank of the boundary map `C_d -> C_{d-1}` inside the block `s`.
    fn boundary_rank(&self, src: usize, tgt: usize, s: i64, d: i64) -> usize {
        let key = (src, tgt, s, d);
        if let Some(&r) = self.ranks.borrow().get(&key) {
            return r;
        }
        let upper = self.basis(src, tgt, s - d, d);
        let lower = self.basis(src, tgt, s - d + 1, d - 1);
        let rank = if upper.is_empty() || lower.is_empty() {
            0
        } else {
            let index: BTreeMap<&Word, usize> =
                lower.iter().enumerate().map(|(i, w)| (w, i)).collect();
            let rows: Vec<Vec<(usize, i64)>> = upper
                .iter()
                .map(|w| {
                    self.cat
                        .d_word(w)
                        .into_iter()
                        .filter_map(|(w2, c)| index.get(&w2).map(|&i| (i, c)))
                        .collect()
                })
                .collect();
            matrix_rank(&rows, lower.len(), self.field)
        };
        self.ranks.borrow_mut().insert(key, rank);
        rank
    }

    /// Block-`s` homology at degree `d`.
    fn block_at(&self, src: usize, tgt: usize, s: i64, d: i64) -> usize {
        let dim = self.basis(src, tgt, s - d, d).len();
        if dim == 0 {
            return 0;
        }
        dim - self.boundary_rank(src, tgt, s, d) - self.boundary_rank(src, tgt, s, d + 1)
    }

    /// Homology rank at degree `d` summed over blocks whose words at this
    /// degree have length at most `length_bound + 2`, plus a completeness
    /// flag: complete when the two extra lengths contribute nothing.
    pub fn homology_at(
        &self,
        src: usize,
        tgt: usize,
        d: i64,
        length_bound: usize,
    ) -> (usize, bool) {
        let mut total = 0;
        let mut tail = 0;
        for len in 0..=(length_bound as i64 + 2) {
            let h = self.block_at(src, tgt, d + len, d);
            total += h;
            if len > length_bound as i64 {
                tail += h;
            }
        }
        (total, tail == 0)
    }
}

/// Exact homology of `Hom(src, tgt)` in the given degree range; see
/// [`HomologyEngine::homology_at`] for the completeness certificate.
pub fn homology_dims(
    cat: &DgPathCategory,
    src: usize,
    tgt: usize,
    degrees: std::ops::RangeInclusive<i64>,
    length_bound: usize,
    field: Field,
) -> HomologyDims {
    let engine = HomologyEngine::new(cat, field);
    let mut dims = BTreeMap::new();
    for d in degrees {
        dims.insert(d, engine.homology_at(src, tgt, d, length_bound));
    }
    HomologyDims { dims, field: Some(field) }
}

/// The dg category `D_m`: objects `z_1..z_m`, generators `b_{i,j}` for all
/// `i != j` of degree `j-i-1` when `j > i` and `n+j-i-1` when `j < i`.
pub fn build_dm(n: usize, m: usize) -> DgPathCategory {
    assert!(n >= 3 && m >= 3);
    let objects: Vec<String> = (1..=m).map(|i| format!("z{i}")).collect();
    let mut generators = Vec::new();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for i in 1..=m {
        for j in 1..=m {
            if i == j {
                continue;
            }
            let degree = if j > i {
                j as i64 - i as i64 - 1
            } else {
                n as i64 + j as i64 - i as i64 - 1
            };
            index.insert((i, j), generators.len());
            generators.push(Generator {
                name: format!("b{i}_{j}"),
                src: i - 1,
                tgt: j - 1,
                degree,
            });
        }
    }
    let mut differential = vec![Vec::new(); generators.len()];
    for i in 1..=m {
        for j in 1..=m {
            if i == j {
                continue;
            }
            let mut terms: Combination = Vec::new();
            let mut push = |sign: i64, k: usize| {
                terms.push((sign, vec![index[&(k, j)], index[&(i, k)]]));
            };
            if j > i {
                for k in i + 1..j {
                    let sign = if (j as i64 - k as i64 + 1).rem_euclid(2) == 0 { 1 } else { -1 };
                    push(sign, k);
                }
            } else {
                for k in i + 1..=m {
                    let e = j as i64 - k as i64 + n as i64 + 1;
                    push(if e.rem_euclid(2) == 0 { 1 } else { -1 }, k);
                }
                for k in 1..j {
                    let e = j as i64 - k as i64 + 1;
                    push(if e.rem_euclid(2) == 0 { 1 } else { -1 }, k);
                }
            }
            differential[index[&(i, j)]] = terms;
        }
    }
    DgPathCategory { objects, generators, differential }
}

/// Expected homology of `Hom(z_i, z_j)` in `D_m` per the four-case table:
/// the pattern of `k[t_{n-2}]` on `j = i` and `j = i+1`, the same pattern
/// shifted by `n - m` at `(i, j) = (m, 1)`, zero elsewhere.
pub fn dm_expected_rank(n: usize, m: usize, i: usize, j: usize, degree: i64) -> usize {
    let step = (n - 2) as i64;
    let pattern = |offset: i64| -> usize {
        let d = degree - offset;
        usize::from(d >= 0 && d % step == 0)
    };
    if i == m && j == 1 {
        return pattern(n as i64 - m as i64);
    }
    if j == i {
        return pattern(0);
    }
    if j == i + 1 {
        return pattern(0);
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dm_generator_degrees() {
        let d33 = build_dm(3, 3);
        let degs: BTreeMap<&str, i64> = d33
            .generators
            .iter()
            .map(|g| (g.name.as_str(), g.degree))
            .collect();
        assert_eq!(degs["b1_2"], 0);
        assert_eq!(degs["b2_3"], 0);
        assert_eq!(degs["b3_1"], 0);
        assert_eq!(degs["b1_3"], 1);
        assert_eq!(degs["b2_1"], 1);
        assert_eq!(degs["b3_2"], 1);
    }

    #[test]
    fn dm_d_squared_zero() {
        for (n, m) in [(3, 3), (3, 4), (4, 4), (4, 5)] {
            let cat = build_dm(n, m);
            assert!(cat.check_d_squared().is_empty(), "d^2 != 0 for D_{m} (n={n})");
        }
    }

    #[test]
    fn corrupted_sign_is_caught() {
        let mut cat = build_dm(3, 4);
        // flip one sign in some nonzero differential
        let gi = cat
            .differential
            .iter()
            .position(|d| !d.is_empty())
            .unwrap();
        cat.differential[gi][0].0 *= -1;
        let errs = cat.check_d_squared();
        assert!(errs.iter().any(|e| matches!(e, DgError::DSquared { .. })));
    }

    #[test]
    fn d3_hom_z1_z1_is_polynomial_pattern() {
        let cat = build_dm(3, 3);
        let h = homology_dims(&cat, 0, 0, 0..=3, 10, Field::Rational);
        for d in 0..=3 {
            assert!(h.complete(d), "degree {d} incomplete");
            assert_eq!(h.rank(d), 1, "degree {d}");
        }
    }

    #[test]
    fn d3_hom_z1_z3_vanishes() {
        let cat = build_dm(3, 3);
        let h = homology_dims(&cat, 0, 2, 0..=3, 10, Field::Rational);
        for d in 0..=3 {
            assert!(h.complete(d));
            assert_eq!(h.rank(d), 0, "degree {d}");
        }
    }

    #[test]
    fn d4_n4_shifted_corner() {
        let cat = build_dm(4, 4);
        // (i, j) = (m, 1): k[t_2] shifted by n - m = 0
        let h = homology_dims(&cat, 3, 0, 0..=4, 12, Field::Rational);
        for d in 0..=4 {
            assert!(h.complete(d));
            assert_eq!(h.rank(d), dm_expected_rank(4, 4, 4, 1, d), "degree {d}");
        }
    }

    #[test]
    fn rank_agrees_over_fields() {
        let cat = build_dm(3, 4);
        for (src, tgt) in [(0, 1), (1, 3), (2, 2)] {
            let hq = homology_dims(&cat, src, tgt, 0..=4, 10, Field::Rational);
            let hp = homology_dims(&cat, src, tgt, 0..=4, 10, Field::Prime(101));
            for d in 0..=4 {
                assert_eq!(hq.rank(d), hp.rank(d), "({src},{tgt}) degree {d}");
            }
        }
    }
}
