//! HashTag vector MDS code construction.
//!
//! A code is described by `r = n - k` index arrays. Array 1 is the plain
//! `alpha x k` grid; arrays 2..r carry `ceil(k/r)` appended columns whose
//! entries schedule extra data elements into parity substripes. The appended
//! structure is what buys sub-packetized repair: a lost node is rebuilt from
//! the small row set where its elements were scheduled instead of from whole
//! nodes.
//!
//! Scheduling is deterministic. Coefficients are drawn pseudo-randomly from a
//! seed and the construction is accepted only after MDS verification, with a
//! bounded redraw on failure.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// One scheduled data element: substripe `row` of data node `node`, 1-based.
/// `(0, 0)` marks an unused appended slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexPair {
    pub row: usize,
    pub node: usize,
}

impl IndexPair {
    pub const UNSET: IndexPair = IndexPair { row: 0, node: 0 };

    pub fn new(row: usize, node: usize) -> Self {
        IndexPair { row, node }
    }

    pub fn is_set(&self) -> bool {
        *self != IndexPair::UNSET
    }
}

/// Index array of one parity node: `alpha` rows by `k + e` entries where the
/// first `k` entries of row `j` are `(j, 1) .. (j, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexArray {
    pub rows: Vec<Vec<IndexPair>>,
}

impl IndexArray {
    fn base(alpha: usize, k: usize, appended: usize) -> Self {
        let rows = (1..=alpha)
            .map(|j| {
                let mut row: Vec<IndexPair> =
                    (1..=k).map(|node| IndexPair::new(j, node)).collect();
                row.extend(std::iter::repeat_n(IndexPair::UNSET, appended));
                row
            })
            .collect();
        IndexArray { rows }
    }

    /// Appended entries of one row (the part after the first k columns).
    pub fn appended(&self, row: usize, k: usize) -> &[IndexPair] {
        &self.rows[row - 1][k..]
    }
}

/// How exhaustively `verify_mds` samples the k-subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdsMode {
    Exhaustive,
    Sampled(usize),
}

/// Outcome of an MDS check; failing subsets are content, not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsReport {
    pub mode: MdsMode,
    pub checked: usize,
    pub failures: Vec<Vec<usize>>,
}

impl MdsReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Which node groups the scheduler populates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ScheduleMode {
    /// All groups, with leftover elements packed into free slots afterwards.
    Full,
    /// Only the first r nodes, one aligned row set each, nothing else. Used
    /// by the mixed-global construction where extra appended entries would
    /// inflate the global-repair read count.
    FirstGroupOnly,
}

/// A HashTag code: parameters, field, index arrays and coefficients.
///
/// `coeffs[i][row][slot]` multiplies the element named by
/// `arrays[i].rows[row][slot]`; unset slots carry coefficient 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub field: Field,
    pub arrays: Vec<IndexArray>,
    pub coeffs: Vec<Vec<Vec<FieldElement>>>,
    pub seed: u64,
}

/// Content of one node: `alpha` substripes, each a payload of field elements
/// processed element-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeVector {
    pub substripes: Vec<Vec<FieldElement>>,
}

impl NodeVector {
    pub fn zero(alpha: usize, payload_len: usize) -> Self {
        NodeVector {
            substripes: vec![vec![0; payload_len]; alpha],
        }
    }

    pub fn alpha(&self) -> usize {
        self.substripes.len()
    }

    pub fn payload_len(&self) -> usize {
        self.substripes.first().map_or(0, Vec::len)
    }
}

/// A full encoded stripe: k systematic nodes followed by r parity nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripe {
    pub nodes: Vec<NodeVector>,
}

/// Builds the index arrays for an `(n, k)` code with sub-packetization
/// `alpha`. Requires `r = n - k >= 2`, `r | k`, `r | alpha` and
/// `alpha <= r^ceil(k/r)`.
pub fn build_index_arrays(n: usize, k: usize, alpha: usize) -> Result<Vec<IndexArray>> {
    let r = n.saturating_sub(k);
    if r < 2 {
        return Err(Error::InvalidParameters(format!(
            "need at least 2 parities, got n={n} k={k}"
        )));
    }
    if k == 0 || !k.is_multiple_of(r) {
        return Err(Error::InvalidParameters(format!("r={r} must divide k={k}")));
    }
    if alpha == 0 || (alpha != 1 && !alpha.is_multiple_of(r)) {
        return Err(Error::InvalidParameters(format!(
            "r={r} must divide alpha={alpha}"
        )));
    }
    let m = k.div_ceil(r);
    let bound = checked_pow(r, m);
    if bound.map(|b| alpha > b).unwrap_or(false) {
        return Err(Error::InvalidParameters(format!(
            "alpha={alpha} exceeds r^ceil(k/r)={}",
            bound.unwrap()
        )));
    }
    Ok(schedule_arrays(n, k, alpha, ScheduleMode::Full))
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Deterministic scheduler behind [`build_index_arrays`]; no divisibility
/// preconditions so the mixed-global construction can reuse it.
pub(crate) fn schedule_arrays(
    n: usize,
    k: usize,
    alpha: usize,
    mode: ScheduleMode,
) -> Vec<IndexArray> {
    let r = n - k;
    let m = k.div_ceil(r);
    let mut arrays = Vec::with_capacity(r);
    arrays.push(IndexArray::base(alpha, k, 0));
    for _ in 1..r {
        arrays.push(IndexArray::base(alpha, k, m));
    }
    if alpha == 1 {
        return arrays;
    }

    let groups = if matches!(mode, ScheduleMode::FirstGroupOnly) {
        1
    } else {
        m
    };
    let mut deferred: Vec<(usize, usize)> = Vec::new(); // (node, row)
    let mut run = alpha.div_ceil(r).max(1);
    for c in 1..=groups {
        let class = |i: usize| ((i - 1) / run) % r;
        let present: BTreeSet<usize> = (1..=alpha).map(class).collect();
        let first = (c - 1) * r + 1;
        let last = (c * r).min(k);
        for j in first..=last {
            let p = j - (c - 1) * r;
            if !present.contains(&(p - 1)) {
                if matches!(mode, ScheduleMode::Full) {
                    deferred.extend((1..=alpha).map(|i| (j, i)));
                }
                continue;
            }
            let missing: Vec<usize> = present.iter().copied().filter(|&d| d != p - 1).collect();
            for i in 1..=alpha {
                let d = class(i);
                if d == p - 1 {
                    continue;
                }
                let t = missing.iter().position(|&x| x == d).expect("class present");
                let shift = (d as isize - (p as isize - 1)) * run as isize;
                let rho = i as isize - shift;
                let slot_ok = rho >= 1
                    && rho <= alpha as isize
                    && class(rho as usize) == p - 1
                    && rho as usize != i
                    && t + 1 < r
                    && !arrays[t + 1].rows[rho as usize - 1][k + c - 1].is_set();
                if slot_ok {
                    arrays[t + 1].rows[rho as usize - 1][k + c - 1] = IndexPair::new(i, j);
                } else if matches!(mode, ScheduleMode::Full) {
                    deferred.push((j, i));
                }
            }
        }
        run = (run / r).max(1);
    }

    if matches!(mode, ScheduleMode::Full) {
        // Pack leftovers into free slots, preferring the column of the
        // element's own node group so repair row sets stay aligned.
        deferred.sort_unstable();
        for (j, i) in deferred {
            let own_col = (j - 1) / r;
            let mut slots: Vec<(usize, usize, usize, usize)> = Vec::new();
            for (nu, array) in arrays.iter().enumerate().skip(1) {
                for rho in 1..=alpha {
                    for col in 0..m {
                        if !array.rows[rho - 1][k + col].is_set() && rho != i {
                            let pref = usize::from(col != own_col);
                            slots.push((pref, nu, rho, col));
                        }
                    }
                }
            }
            slots.sort_unstable();
            if let Some(&(_, nu, rho, col)) = slots.first() {
                arrays[nu].rows[rho - 1][k + col] = IndexPair::new(i, j);
            }
        }
    }

    arrays
}

/// Draws nonzero coefficients from `seed`, verifies the result is MDS and
/// redraws with incremented seeds (up to 64) on failure.
pub fn assign_coefficients(
    n: usize,
    k: usize,
    alpha: usize,
    arrays: Vec<IndexArray>,
    field: Field,
    seed: u64,
) -> Result<CodeSpec> {
    let subsets = binomial(n, k);
    let mode = if subsets <= 512 {
        MdsMode::Exhaustive
    } else {
        MdsMode::Sampled(64)
    };
    let mut tried = Vec::new();
    for attempt in 0..64u64 {
        let s = seed.wrapping_add(attempt);
        let spec = CodeSpec::from_parts(n, k, alpha, field.clone(), arrays.clone(), s);
        if spec.verify_mds(mode).passed() {
            return Ok(spec);
        }
        tried.push(s);
    }
    Err(Error::SeedsExhausted { tried })
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(usize::MAX as u128) as usize
}

/// All k-subsets of `1..=n`, lexicographic.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - (k - 1 - i) {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl CodeSpec {
    /// Schedules the arrays and assigns verified coefficients in one step.
    pub fn build(n: usize, k: usize, alpha: usize, field: Field, seed: u64) -> Result<Self> {
        let arrays = build_index_arrays(n, k, alpha)?;
        assign_coefficients(n, k, alpha, arrays, field, seed)
    }

    /// Assembles a spec with coefficients drawn from `seed` but without any
    /// verification. Callers are expected to run [`CodeSpec::verify_mds`].
    pub fn from_parts(
        n: usize,
        k: usize,
        alpha: usize,
        field: Field,
        arrays: Vec<IndexArray>,
        seed: u64,
    ) -> Self {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let order = field.order() as u32;
        let coeffs = arrays
            .iter()
            .map(|array| {
                array
                    .rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|pair| {
                                if pair.is_set() {
                                    (rng.next_u32() % (order - 1) + 1) as FieldElement
                                } else {
                                    0
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        CodeSpec {
            n,
            k,
            alpha,
            field,
            arrays,
            coeffs,
            seed,
        }
    }

    /// Assembles a spec from explicit coefficients (used by the golden code
    /// and by tests that construct deliberately broken specs).
    pub fn with_coefficients(
        n: usize,
        k: usize,
        alpha: usize,
        field: Field,
        arrays: Vec<IndexArray>,
        coeffs: Vec<Vec<Vec<FieldElement>>>,
        seed: u64,
    ) -> Self {
        CodeSpec {
            n,
            k,
            alpha,
            field,
            arrays,
            coeffs,
            seed,
        }
    }

    pub fn r(&self) -> usize {
        self.n - self.k
    }

    /// Terms of the parity equation for substripe `row` of parity `parity`
    /// (both 1-based): `(data element, coefficient)` pairs.
    pub fn parity_row_terms(&self, parity: usize, row: usize) -> Vec<(IndexPair, FieldElement)> {
        self.arrays[parity - 1].rows[row - 1]
            .iter()
            .zip(&self.coeffs[parity - 1][row - 1])
            .filter(|(pair, _)| pair.is_set())
            .map(|(pair, coeff)| (*pair, *coeff))
            .collect()
    }

    /// Where element `(row i, node j)` is scheduled as an appended entry:
    /// `(parity index, parity row)`, if anywhere.
    pub fn element_host(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        for (nu, array) in self.arrays.iter().enumerate().skip(1) {
            for (rho, row) in array.rows.iter().enumerate() {
                if row[self.k..].contains(&IndexPair::new(i, j)) {
                    return Some((nu + 1, rho + 1));
                }
            }
        }
        None
    }

    /// Row set driving systematic repair of node `j`: rows hosting the
    /// node's appended elements plus the base rows of its unhosted ones.
    pub fn node_rowset(&self, j: usize) -> BTreeSet<usize> {
        let mut rows = BTreeSet::new();
        for i in 1..=self.alpha {
            match self.element_host(i, j) {
                Some((_, rho)) => {
                    rows.insert(rho);
                }
                None => {
                    rows.insert(i);
                }
            }
        }
        rows
    }

    /// Systematic encode: copies the k data nodes through and computes the r
    /// parity nodes element-wise over the payloads.
    pub fn encode(&self, data: &[NodeVector]) -> Result<Stripe> {
        let payload_len = self.check_data_shape(data)?;
        let mut nodes: Vec<NodeVector> = data.to_vec();
        for parity in 1..=self.r() {
            let mut node = NodeVector::zero(self.alpha, payload_len);
            for row in 1..=self.alpha {
                let acc = &mut node.substripes[row - 1];
                for (pair, coeff) in self.parity_row_terms(parity, row) {
                    let src = &data[pair.node - 1].substripes[pair.row - 1];
                    for (dst, &s) in acc.iter_mut().zip(src) {
                        *dst ^= self.field.mul(coeff, s);
                    }
                }
            }
            nodes.push(node);
        }
        Ok(Stripe { nodes })
    }

    pub(crate) fn check_data_shape(&self, data: &[NodeVector]) -> Result<usize> {
        if data.len() != self.k {
            return Err(Error::ShapeMismatch(format!(
                "expected {} data nodes, got {}",
                self.k,
                data.len()
            )));
        }
        let payload_len = data[0].payload_len();
        for (idx, node) in data.iter().enumerate() {
            if node.alpha() != self.alpha {
                return Err(Error::ShapeMismatch(format!(
                    "node {} has {} substripes, expected {}",
                    idx + 1,
                    node.alpha(),
                    self.alpha
                )));
            }
            if node.substripes.iter().any(|s| s.len() != payload_len) {
                return Err(Error::ShapeMismatch(format!(
                    "node {} has ragged payloads",
                    idx + 1
                )));
            }
        }
        Ok(payload_len)
    }

    /// Generator matrix of the associated scalar code, `alpha*k` rows by
    /// `alpha*n` columns in thick-column layout, `[I | P]`.
    pub fn generator_matrix(&self) -> Vec<Vec<FieldElement>> {
        let rows = self.alpha * self.k;
        let cols = self.alpha * self.n;
        let mut g = vec![vec![0; cols]; rows];
        for s in 0..rows {
            g[s][s] = 1;
        }
        for parity in 1..=self.r() {
            for row in 1..=self.alpha {
                let col = (self.k + parity - 1) * self.alpha + (row - 1);
                for (pair, coeff) in self.parity_row_terms(parity, row) {
                    let s = (pair.node - 1) * self.alpha + (pair.row - 1);
                    g[s][col] ^= coeff;
                }
            }
        }
        g
    }

    /// Checks any-k decodability: every (or `t` random) k-subsets of nodes
    /// must give a full-rank restriction of the generator matrix.
    pub fn verify_mds(&self, mode: MdsMode) -> MdsReport {
        let g = self.generator_matrix();
        let mut failures = Vec::new();
        let mut checked = 0;
        let check = |subset: &[usize]| {
            let restricted: Vec<Vec<FieldElement>> = g
                .iter()
                .map(|grow| {
                    subset
                        .iter()
                        .flat_map(|&node| {
                            let base = (node - 1) * self.alpha;
                            grow[base..base + self.alpha].iter().copied()
                        })
                        .collect()
                })
                .collect();
            self.field.rank(&restricted) == self.alpha * self.k
        };
        match mode {
            MdsMode::Exhaustive => {
                for subset in combinations(self.n, self.k) {
                    checked += 1;
                    if !check(&subset) {
                        failures.push(subset);
                    }
                }
            }
            MdsMode::Sampled(t) => {
                let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(self.seed ^ 0x5eed_5eed);
                for _ in 0..t {
                    let mut pool: Vec<usize> = (1..=self.n).collect();
                    for i in 0..self.k {
                        let pick = i + (rng.next_u32() as usize) % (self.n - i);
                        pool.swap(i, pick);
                    }
                    let mut subset: Vec<usize> = pool[..self.k].to_vec();
                    subset.sort_unstable();
                    checked += 1;
                    if !check(&subset) {
                        failures.push(subset);
                    }
                }
            }
        }
        MdsReport {
            mode,
            checked,
            failures,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheduler_matches_published_9_6_structure() {
        let arrays = build_index_arrays(9, 6, 9).unwrap();
        assert_eq!(arrays.len(), 3);
        assert_eq!(arrays[0].rows[0].len(), 6);
        assert_eq!(arrays[1].rows[0].len(), 8);
        // appended pairs of parity 2, row 1 and parity 3, row 1
        assert_eq!(
            arrays[1].appended(1, 6),
            &[IndexPair::new(4, 1), IndexPair::new(2, 4)]
        );
        assert_eq!(
            arrays[2].appended(1, 6),
            &[IndexPair::new(7, 1), IndexPair::new(3, 4)]
        );
    }

    #[test]
    fn scheduler_covers_every_element_once_at_full_subpacketization() {
        for (n, k) in [(9usize, 6usize), (6, 4), (10, 8)] {
            let r = n - k;
            let alpha = checked_pow(r, k.div_ceil(r)).unwrap();
            let arrays = build_index_arrays(n, k, alpha).unwrap();
            let mut seen = BTreeSet::new();
            for array in arrays.iter().skip(1) {
                for (rho, row) in array.rows.iter().enumerate() {
                    for pair in &row[k..] {
                        assert!(pair.is_set());
                        assert_ne!(pair.row, rho + 1, "appended entry repeats base row");
                        assert!(seen.insert(*pair), "duplicate appended entry {pair:?}");
                    }
                }
            }
            // every element outside its own row set is scheduled exactly once
            assert_eq!(seen.len(), k * alpha - k * alpha / r);
        }
    }

    #[test]
    fn scalar_code_has_no_appended_entries() {
        let arrays = build_index_arrays(8, 6, 1).unwrap();
        for array in arrays.iter().skip(1) {
            for row in &array.rows {
                assert!(row[6..].iter().all(|p| !p.is_set()));
            }
        }
    }

    #[test]
    fn scheduler_rejects_bad_parameters() {
        assert!(build_index_arrays(7, 6, 9).is_err()); // r = 1
        assert!(build_index_arrays(9, 5, 9).is_err()); // r does not divide k
        assert!(build_index_arrays(9, 6, 4).is_err()); // r does not divide alpha
        assert!(build_index_arrays(9, 6, 27).is_err()); // alpha above r^ceil(k/r)
    }

    #[test]
    fn scheduler_is_deterministic() {
        let a = build_index_arrays(9, 6, 9).unwrap();
        let b = build_index_arrays(9, 6, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_code_passes_mds_with_random_coefficients() {
        let arrays = build_index_arrays(4, 2, 1).unwrap();
        let spec = assign_coefficients(4, 2, 1, arrays, Field::gf32(), 7).unwrap();
        assert!(spec.verify_mds(MdsMode::Exhaustive).passed());
    }

    #[test]
    fn all_ones_scalar_code_is_degenerate_and_detected() {
        // two identical parities cannot be MDS; the verifier must flag it
        let arrays = build_index_arrays(6, 4, 1).unwrap();
        let coeffs: Vec<Vec<Vec<u16>>> = arrays
            .iter()
            .map(|a| {
                a.rows
                    .iter()
                    .map(|row| row.iter().map(|p| u16::from(p.is_set())).collect())
                    .collect()
            })
            .collect();
        let spec = CodeSpec::with_coefficients(6, 4, 1, Field::gf32(), arrays.clone(), coeffs, 0);
        assert!(!spec.verify_mds(MdsMode::Exhaustive).passed());
        // and the drawing loop recovers by moving past such degeneracies
        let fixed = assign_coefficients(6, 4, 1, arrays, Field::gf32(), 0).unwrap();
        assert!(fixed.verify_mds(MdsMode::Exhaustive).passed());
    }

    #[test]
    fn zeroed_coefficient_row_fails_verification() {
        let mut spec = CodeSpec::build(6, 4, 2, Field::gf32(), 3).unwrap();
        for slot in spec.coeffs[1][0].iter_mut() {
            *slot = 0;
        }
        let report = spec.verify_mds(MdsMode::Exhaustive);
        assert!(!report.passed());
    }

    #[test]
    fn single_subset_when_n_equals_k() {
        // no parity nodes: the lone subset is the systematic one
        let spec = CodeSpec::with_coefficients(
            3,
            3,
            2,
            Field::gf32(),
            vec![],
            vec![],
            0,
        );
        let report = spec.verify_mds(MdsMode::Exhaustive);
        assert_eq!(report.checked, 1);
        assert!(report.passed());
    }

    #[test]
    fn encode_is_linear_and_systematic() {
        let spec = CodeSpec::build(6, 4, 2, Field::gf32(), 11).unwrap();
        let f = &spec.field;
        let mk = |seed: u16| -> Vec<NodeVector> {
            (0..4)
                .map(|j| NodeVector {
                    substripes: (0..2)
                        .map(|i| vec![(seed * 7 + j * 3 + i) % 32, (seed + j + i * 5) % 32])
                        .collect(),
                })
                .collect()
        };
        let x = mk(1);
        let y = mk(9);
        let (a, b) = (13u16, 22u16);
        let combined: Vec<NodeVector> = x
            .iter()
            .zip(&y)
            .map(|(nx, ny)| NodeVector {
                substripes: nx
                    .substripes
                    .iter()
                    .zip(&ny.substripes)
                    .map(|(sx, sy)| {
                        sx.iter()
                            .zip(sy)
                            .map(|(&ex, &ey)| f.mul(a, ex) ^ f.mul(b, ey))
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        let ex = spec.encode(&x).unwrap();
        let ey = spec.encode(&y).unwrap();
        let ec = spec.encode(&combined).unwrap();
        for node in 0..6 {
            for row in 0..2 {
                for e in 0..2 {
                    let lhs = ec.nodes[node].substripes[row][e];
                    let rhs = f.mul(a, ex.nodes[node].substripes[row][e])
                        ^ f.mul(b, ey.nodes[node].substripes[row][e]);
                    assert_eq!(lhs, rhs);
                }
            }
        }
        // systematic prefix equals input
        assert_eq!(&ex.nodes[..4], &x[..]);
    }

    #[test]
    fn generator_matrix_agrees_with_index_evaluator() {
        let spec = CodeSpec::build(6, 4, 4, Field::gf32(), 5).unwrap();
        let g = spec.generator_matrix();
        // identity sub-block over the systematic thick columns
        for s in 0..16 {
            for c in 0..16 {
                assert_eq!(g[s][c], u16::from(s == c));
            }
        }
        let data: Vec<NodeVector> = (0..4)
            .map(|j| NodeVector {
                substripes: (0..4).map(|i| vec![(j * 11 + i * 3 + 1) % 32]).collect(),
            })
            .collect();
        let stripe = spec.encode(&data).unwrap();
        // flatten, multiply, compare
        let scalars: Vec<u16> = data
            .iter()
            .flat_map(|nv| nv.substripes.iter().map(|s| s[0]))
            .collect();
        for node in 0..6 {
            for row in 0..4 {
                let col = node * 4 + row;
                let mut acc = 0u16;
                for (s, &d) in scalars.iter().enumerate() {
                    acc ^= spec.field.mul(g[s][col], d);
                }
                assert_eq!(acc, stripe.nodes[node].substripes[row][0]);
            }
        }
    }

    #[test]
    fn combinations_count_matches_binomial() {
        assert_eq!(combinations(9, 6).len(), binomial(9, 6));
        assert_eq!(binomial(9, 6), 84);
        assert_eq!(combinations(5, 5), vec![vec![1, 2, 3, 4, 5]]);
    }
}
