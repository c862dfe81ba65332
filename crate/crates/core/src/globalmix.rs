//! Locally repairable codes whose global parity nodes repair at data-node
//! bandwidth, via pairwise substripe mixing.
//!
//! The construction keeps the sub-packetization at `alpha = g`: a base code
//! with `g + 1` parities is built, parity 1 is split into `l` local parities
//! (delta = 2) and the remaining `g` parities become global nodes whose
//! off-diagonal substripes are mixed in pairs: for `a < b`,
//!
//! ```text
//! g'_{a,b} = f1 * g_{a,b} + f2 * g_{b,a}
//! g'_{b,a} = f3 * g_{a,b} + f4 * g_{b,a}
//! ```
//!
//! with each 2x2 matrix nonsingular and diagonal substripes left unmixed.
//! Losing global node `t` then costs one row of data reads (for the
//! diagonal) plus a single mirror substripe per surviving global: the mirror
//! and the row-t parity expression pin both pre-mix values of the pair.
//!
//! The base scheduler runs in first-group-only mode here: each extra
//! appended entry in a parity row is one more forced read during global
//! repair, so only the row sets that pay for themselves are scheduled.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};

use crate::code::{combinations, CodeSpec, MdsMode, NodeVector, ScheduleMode};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::locality::{assemble_plan, LocalityConfig, LrcSpec};
use crate::repair::{EquationSource, RepairPlan, SolveStep, ValueRef};

/// The 2x2 mixing matrices, one per unordered substripe pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixCoefficients {
    pub alpha: usize,
    pairs: BTreeMap<(usize, usize), [FieldElement; 4]>,
}

impl MixCoefficients {
    /// `[f1, f2, f3, f4]` for the unordered pair `(a, b)`, `a < b`.
    pub fn get(&self, a: usize, b: usize) -> [FieldElement; 4] {
        self.pairs[&(a, b)]
    }

    /// The identity mix: `g' = g`. Nonsingular but useless for efficient
    /// repair; the planner degrades to per-substripe re-encode.
    pub fn identity(alpha: usize) -> Self {
        Self::uniform(alpha, [1, 0, 0, 1])
    }

    /// The swap mix: every off-diagonal substripe holds its mirror's value.
    pub fn swap(alpha: usize) -> Self {
        Self::uniform(alpha, [0, 1, 1, 0])
    }

    /// Same matrix for every pair.
    pub fn uniform(alpha: usize, f: [FieldElement; 4]) -> Self {
        let mut pairs = BTreeMap::new();
        for a in 1..=alpha {
            for b in a + 1..=alpha {
                pairs.insert((a, b), f);
            }
        }
        MixCoefficients { alpha, pairs }
    }

    /// Draws matrices with all four entries nonzero and nonzero determinant.
    pub fn draw(alpha: usize, field: &Field, rng: &mut impl RngCore) -> Self {
        let order = field.order() as u32;
        let mut pairs = BTreeMap::new();
        for a in 1..=alpha {
            for b in a + 1..=alpha {
                let f = loop {
                    let mut f = [0u16; 4];
                    for v in f.iter_mut() {
                        *v = (rng.next_u32() % (order - 1) + 1) as FieldElement;
                    }
                    let det = field.mul(f[0], f[3]) ^ field.mul(f[1], f[2]);
                    if det != 0 {
                        break f;
                    }
                };
                pairs.insert((a, b), f);
            }
        }
        MixCoefficients { alpha, pairs }
    }

    pub fn all_nonsingular(&self, field: &Field) -> bool {
        self.pairs
            .values()
            .all(|f| field.mul(f[0], f[3]) ^ field.mul(f[1], f[2]) != 0)
    }

    /// Returns a copy with one pair's matrix replaced.
    pub fn with_pair(mut self, a: usize, b: usize, f: [FieldElement; 4]) -> Self {
        self.pairs.insert((a, b), f);
        self
    }
}

/// A split code with `l` local parities, `g = alpha` mixed global nodes and
/// efficient global-node repair. Stripe order: data `1..=k`, locals, globals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalLrcSpec {
    /// Base code with `k` data nodes, `g + 1` parities and `alpha = g`.
    pub base: CodeSpec,
    pub groups: Vec<Vec<usize>>,
    pub mix: MixCoefficients,
}

impl GlobalLrcSpec {
    pub fn k(&self) -> usize {
        self.base.k
    }

    /// Number of global nodes; equals the sub-packetization level.
    pub fn g(&self) -> usize {
        self.base.alpha
    }

    pub fn l(&self) -> usize {
        self.groups.len()
    }

    pub fn n_total(&self) -> usize {
        self.base.k + self.l() + self.g()
    }

    pub fn local_node(&self, group: usize) -> usize {
        self.base.k + group
    }

    pub fn global_node(&self, i: usize) -> usize {
        self.base.k + self.l() + i
    }

    /// View with the same groups and unmixed parities; valid for local-path
    /// planning (mixing never touches parity 1 or the data nodes).
    pub fn lrc_view(&self) -> LrcSpec {
        LrcSpec {
            base: self.base.clone(),
            config: LocalityConfig {
                groups: self.l(),
                delta: 2,
            },
            groups: self.groups.clone(),
            local_parities: (1..=self.l())
                .map(|group| crate::locality::LocalParity {
                    source_parity: 1,
                    group,
                })
                .collect(),
            global_parities: (2..=self.base.r()).collect(),
        }
    }

    /// Pre-mix value of global substripe `(row, i)` as data-scalar
    /// coefficients: the parity `i + 1` equation at `row`.
    fn premix_coeffs(&self, row: usize, i: usize) -> Vec<FieldElement> {
        let unknowns = self.base.alpha * self.base.k;
        let mut coeffs = alloc::vec![0; unknowns];
        for (pair, c) in self.base.parity_row_terms(i + 1, row) {
            coeffs[(pair.node - 1) * self.base.alpha + (pair.row - 1)] ^= c;
        }
        coeffs
    }

    /// Coefficient rows of one stripe node over the data scalars.
    fn node_equations(&self, node: usize) -> Vec<Vec<FieldElement>> {
        let alpha = self.base.alpha;
        let k = self.base.k;
        let f = &self.base.field;
        let mut rows = Vec::with_capacity(alpha);
        for row in 1..=alpha {
            if node <= k {
                let mut coeffs = alloc::vec![0; alpha * k];
                coeffs[(node - 1) * alpha + (row - 1)] = 1;
                rows.push(coeffs);
            } else if node <= k + self.l() {
                let group = node - k;
                let members = &self.groups[group - 1];
                let mut coeffs = alloc::vec![0; alpha * k];
                for (pair, c) in self.base.parity_row_terms(1, row) {
                    if members.contains(&pair.node) {
                        coeffs[(pair.node - 1) * alpha + (pair.row - 1)] ^= c;
                    }
                }
                rows.push(coeffs);
            } else {
                let i = node - k - self.l();
                if row == i {
                    rows.push(self.premix_coeffs(row, i));
                } else {
                    let (a, b) = (row.min(i), row.max(i));
                    let fx = self.mix.get(a, b);
                    // entry (row, i): above diagonal pairs (f1, f2) with
                    // (g_{row,i}, g_{i,row}); below diagonal (f3, f4) with
                    // (g_{a,b}, g_{b,a}) = (g_{i,row}, g_{row,i})
                    let (own, mirror) = if row < i {
                        (fx[0], fx[1])
                    } else {
                        (fx[3], fx[2])
                    };
                    let own_coeffs = self.premix_coeffs(row, i);
                    let mirror_coeffs = self.premix_coeffs(i, row);
                    let combined = own_coeffs
                        .iter()
                        .zip(&mirror_coeffs)
                        .map(|(&c_own, &c_mir)| f.mul(own, c_own) ^ f.mul(mirror, c_mir))
                        .collect();
                    rows.push(combined);
                }
            }
        }
        rows
    }

    /// Encodes data into the full mixed stripe.
    pub fn encode(&self, data: &[NodeVector]) -> Result<Vec<NodeVector>> {
        let payload_len = self.base.check_data_shape(data)?;
        let alpha = self.base.alpha;
        let f = &self.base.field;
        let stripe = self.base.encode(data)?;
        let mut nodes: Vec<NodeVector> = data.to_vec();
        // locals: parity 1 restricted per group
        for group in 1..=self.l() {
            let members = &self.groups[group - 1];
            let mut node = NodeVector::zero(alpha, payload_len);
            for row in 1..=alpha {
                let acc = &mut node.substripes[row - 1];
                for (pair, c) in self.base.parity_row_terms(1, row) {
                    if members.contains(&pair.node) {
                        let src = &data[pair.node - 1].substripes[pair.row - 1];
                        for (dst, &s) in acc.iter_mut().zip(src) {
                            *dst ^= f.mul(c, s);
                        }
                    }
                }
            }
            nodes.push(node);
        }
        // globals: mixed pre-mix parities 2..=g+1
        let premix = |row: usize, i: usize| -> &Vec<FieldElement> {
            &stripe.nodes[self.base.k + i].substripes[row - 1]
        };
        for i in 1..=self.g() {
            let mut node = NodeVector::zero(alpha, payload_len);
            for row in 1..=alpha {
                let acc = &mut node.substripes[row - 1];
                if row == i {
                    acc.copy_from_slice(premix(row, i));
                } else {
                    let (a, b) = (row.min(i), row.max(i));
                    let fx = self.mix.get(a, b);
                    let (own, mirror) = if row < i {
                        (fx[0], fx[1])
                    } else {
                        (fx[3], fx[2])
                    };
                    for ((dst, &v_own), &v_mir) in
                        acc.iter_mut().zip(premix(row, i)).zip(premix(i, row))
                    {
                        *dst = f.mul(own, v_own) ^ f.mul(mirror, v_mir);
                    }
                }
            }
            nodes.push(node);
        }
        Ok(nodes)
    }

    /// Inverts the mixing on captured global contents, recovering the
    /// pre-mix parity nodes. Exact for every nonsingular mix.
    pub fn premix_globals(&self, mixed: &[NodeVector]) -> Result<Vec<NodeVector>> {
        if mixed.len() != self.g() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} global nodes, got {}",
                self.g(),
                mixed.len()
            )));
        }
        let f = &self.base.field;
        let mut out = mixed.to_vec();
        for a in 1..=self.g() {
            for b in a + 1..=self.g() {
                let fx = self.mix.get(a, b);
                let det = f.mul(fx[0], fx[3]) ^ f.mul(fx[1], fx[2]);
                let det_inv = f.inv(det)?;
                let va = mixed[b - 1].substripes[a - 1].clone();
                let vb = mixed[a - 1].substripes[b - 1].clone();
                // invert [f1 f2; f3 f4] applied to (g_{a,b}, g_{b,a})
                for e in 0..va.len() {
                    let x = f.mul(det_inv, f.mul(fx[3], va[e]) ^ f.mul(fx[1], vb[e]));
                    let y = f.mul(det_inv, f.mul(fx[2], va[e]) ^ f.mul(fx[0], vb[e]));
                    out[b - 1].substripes[a - 1][e] = x;
                    out[a - 1].substripes[b - 1][e] = y;
                }
            }
        }
        Ok(out)
    }

    /// Whether the data survives erasing the given stripe nodes.
    pub fn erasure_decodable(&self, erased: &[usize]) -> bool {
        let erased: BTreeSet<usize> = erased.iter().copied().collect();
        let unknowns = self.base.alpha * self.base.k;
        let mut rows = Vec::new();
        for node in 1..=self.n_total() {
            if !erased.contains(&node) {
                rows.extend(self.node_equations(node));
            }
        }
        self.base.field.rank(&rows) == unknowns
    }

    /// Recovers the k data nodes from a decodable subset of stripe nodes.
    pub fn decode(&self, available: &[usize], contents: &[NodeVector]) -> Result<Vec<NodeVector>> {
        if available.len() != contents.len() {
            return Err(Error::ShapeMismatch(
                "nodes/contents length mismatch".into(),
            ));
        }
        let alpha = self.base.alpha;
        let unknowns = alpha * self.base.k;
        let payload_len = contents.first().map_or(0, NodeVector::payload_len);
        let f = &self.base.field;
        let mut rows: Vec<Vec<FieldElement>> = Vec::new();
        let mut rhs: Vec<Vec<FieldElement>> = Vec::new();
        for (slot, &node) in available.iter().enumerate() {
            for (row, coeffs) in self.node_equations(node).into_iter().enumerate() {
                rows.push(coeffs);
                rhs.push(contents[slot].substripes[row].clone());
            }
        }
        let mut pivot = 0usize;
        let mut pivot_of_col = alloc::vec![usize::MAX; unknowns];
        for col in 0..unknowns {
            let Some(p) = (pivot..rows.len()).find(|&r| rows[r][col] != 0) else {
                return Err(Error::SingularMatrix);
            };
            rows.swap(pivot, p);
            rhs.swap(pivot, p);
            let inv = f.inv(rows[pivot][col])?;
            for c in col..unknowns {
                rows[pivot][c] = f.mul(rows[pivot][c], inv);
            }
            for v in rhs[pivot].iter_mut() {
                *v = f.mul(*v, inv);
            }
            for r in 0..rows.len() {
                if r != pivot && rows[r][col] != 0 {
                    let factor = rows[r][col];
                    for c in col..unknowns {
                        let sub = f.mul(factor, rows[pivot][c]);
                        rows[r][c] ^= sub;
                    }
                    for e in 0..payload_len {
                        let sub = f.mul(factor, rhs[pivot][e]);
                        rhs[r][e] ^= sub;
                    }
                }
            }
            pivot_of_col[col] = pivot;
            pivot += 1;
        }
        Ok((0..self.base.k)
            .map(|j| NodeVector {
                substripes: (0..alpha)
                    .map(|i| rhs[pivot_of_col[j * alpha + i]].clone())
                    .collect(),
            })
            .collect())
    }
}

/// Builds the construction: a base code with `g + 1` parities and
/// `alpha = g`, parity 1 split into `l` locals, parities 2..=g+1 mixed into
/// global nodes. Mixes that lose any decodable subset of the unmixed layout
/// are redrawn.
pub fn build_global_efficient_lrc(
    k: usize,
    l: usize,
    g: usize,
    field: Field,
    seed: u64,
) -> Result<GlobalLrcSpec> {
    if g < 2 {
        return Err(Error::InvalidParameters(format!(
            "need at least 2 global nodes, got g={g}"
        )));
    }
    if l == 0 || k == 0 || !k.is_multiple_of(l) {
        return Err(Error::InvalidParameters(format!(
            "group count {l} must divide k={k}"
        )));
    }
    let r = g + 1;
    let n = k + r;
    let alpha = g;
    let arrays = crate::code::schedule_arrays(n, k, alpha, ScheduleMode::FirstGroupOnly);

    // base coefficients: draw-and-verify with bounded retries
    let subsets = crate::code::binomial(n, k);
    let mode = if subsets <= 512 {
        MdsMode::Exhaustive
    } else {
        MdsMode::Sampled(64)
    };
    let mut tried = Vec::new();
    let mut base = None;
    for attempt in 0..64u64 {
        let s = seed.wrapping_add(attempt);
        let candidate = CodeSpec::from_parts(n, k, alpha, field.clone(), arrays.clone(), s);
        if candidate.verify_mds(mode).passed() {
            base = Some(candidate);
            break;
        }
        tried.push(s);
    }
    let base = base.ok_or(Error::SeedsExhausted {
        tried: tried.clone(),
    })?;

    let per = k / l;
    let groups: Vec<Vec<usize>> = (0..l)
        .map(|s| (s * per + 1..=(s + 1) * per).collect())
        .collect();

    // mix draw: nonsingular pairs, then check no decodable subset is lost
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed ^ 0x6d69_7800);
    let unmixed = GlobalLrcSpec {
        base: base.clone(),
        groups: groups.clone(),
        mix: MixCoefficients::identity(alpha),
    };
    let all_subsets = combinations(unmixed.n_total(), k);
    let decodable_unmixed: Vec<Vec<usize>> = all_subsets
        .iter()
        .filter(|s| {
            let erased: Vec<usize> =
                (1..=unmixed.n_total()).filter(|n| !s.contains(n)).collect();
            unmixed.erasure_decodable(&erased)
        })
        .cloned()
        .collect();
    let mut mix_tried = 0u64;
    loop {
        let mix = MixCoefficients::draw(alpha, &base.field, &mut rng);
        let candidate = GlobalLrcSpec {
            base: base.clone(),
            groups: groups.clone(),
            mix,
        };
        let preserved = decodable_unmixed.iter().all(|s| {
            let erased: Vec<usize> = (1..=candidate.n_total())
                .filter(|n| !s.contains(n))
                .collect();
            candidate.erasure_decodable(&erased)
        });
        if preserved {
            return Ok(candidate);
        }
        mix_tried += 1;
        if mix_tried >= 64 {
            return Err(Error::SeedsExhausted {
                tried: (0..mix_tried).collect(),
            });
        }
    }
}

/// Plans repair of lost global node `t` (1-based among globals).
///
/// The diagonal substripe is re-encoded from one row of data reads; every
/// other substripe costs one mirror read from the surviving global of its
/// pair plus at most the appended extras of that parity row. When a needed
/// mix coefficient is zero (possible only with hand-built mixes), the
/// substripe degrades to a plain row re-encode.
pub fn plan_global_node_repair(spec: &GlobalLrcSpec, t: usize) -> Result<RepairPlan> {
    let g = spec.g();
    if t == 0 || t > g {
        return Err(Error::NodeOutOfRange { node: t, limit: g });
    }
    let k = spec.base.k;
    let f = &spec.base.field;
    let lost = spec.global_node(t);
    let mut read_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut schedule: Vec<SolveStep> = Vec::new();

    // scratch ids: rho -> g_{t, rho} (pre-mix row t of parity rho+1),
    // g + rho -> g_{rho, t} (pre-mix row rho of the lost parity t+1)
    let scratch_row_t = |rho: usize| ValueRef::Scratch(rho);
    let scratch_lost = |rho: usize| ValueRef::Scratch(g + rho);

    // one row of data reads for the diagonal and all row-t expressions
    for node in 1..=k {
        read_set.insert((node, t));
    }
    let eval_parity_row = |read_set: &mut BTreeSet<(usize, usize)>,
                               parity: usize,
                               row: usize|
     -> Vec<(ValueRef, FieldElement)> {
        spec.base
            .parity_row_terms(parity, row)
            .into_iter()
            .map(|(pair, c)| {
                read_set.insert((pair.node, pair.row));
                (
                    ValueRef::Stripe {
                        node: pair.node,
                        row: pair.row,
                    },
                    c,
                )
            })
            .collect()
    };

    // g_{t,t}: evaluate the lost parity's own row t
    let diag_terms = eval_parity_row(&mut read_set, t + 1, t);
    schedule.push(SolveStep {
        target: scratch_row_t(t),
        source: EquationSource::Reencode { parity: t + 1, row: t },
        terms: diag_terms,
    });
    schedule.push(SolveStep {
        target: ValueRef::Stripe { node: lost, row: t },
        source: EquationSource::Reencode { parity: t + 1, row: t },
        terms: alloc::vec![(scratch_row_t(t), 1)],
    });

    for rho in (1..=g).filter(|&rho| rho != t) {
        let (a, b) = (t.min(rho), t.max(rho));
        let fx = spec.mix.get(a, b);
        // the mirror substripe g'_{t,rho} combines (unknown, known):
        //   t < rho: g'_{t,rho} = f1 g_{t,rho} + f2 g_{rho,t}
        //   t > rho: g'_{t,rho} = f3 g_{rho,t} + f4 g_{t,rho}
        let (known_coef, unknown_coef) = if t < rho {
            (fx[0], fx[1])
        } else {
            (fx[3], fx[2])
        };
        // the lost substripe g'_{rho,t}:
        //   t < rho: g'_{rho,t} = f3 g_{t,rho} + f4 g_{rho,t}
        //   t > rho: g'_{rho,t} = f1 g_{rho,t} + f2 g_{t,rho}
        let (out_row_t, out_lost) = if t < rho {
            (fx[2], fx[3])
        } else {
            (fx[1], fx[0])
        };

        if unknown_coef != 0 {
            // mirror path: read g'_{t,rho}, evaluate g_{t,rho} from row t,
            // solve the pair for g_{rho,t}
            let row_t_terms = eval_parity_row(&mut read_set, rho + 1, t);
            schedule.push(SolveStep {
                target: scratch_row_t(rho),
                source: EquationSource::Reencode { parity: rho + 1, row: t },
                terms: row_t_terms,
            });
            let mirror = ValueRef::Stripe {
                node: spec.global_node(rho),
                row: t,
            };
            read_set.insert((spec.global_node(rho), t));
            let inv = f.inv(unknown_coef)?;
            schedule.push(SolveStep {
                target: scratch_lost(rho),
                source: EquationSource::MixPair { low: a, high: b },
                terms: alloc::vec![(mirror, inv), (scratch_row_t(rho), f.mul(known_coef, inv))],
            });
        } else {
            // degenerate mix entry: re-encode the pre-mix value from row rho
            let row_terms = eval_parity_row(&mut read_set, t + 1, rho);
            schedule.push(SolveStep {
                target: scratch_lost(rho),
                source: EquationSource::Reencode { parity: t + 1, row: rho },
                terms: row_terms,
            });
            if out_row_t != 0 {
                let row_t_terms = eval_parity_row(&mut read_set, rho + 1, t);
                schedule.push(SolveStep {
                    target: scratch_row_t(rho),
                    source: EquationSource::Reencode { parity: rho + 1, row: t },
                    terms: row_t_terms,
                });
            }
        }

        let mut out_terms = Vec::new();
        if out_row_t != 0 {
            out_terms.push((scratch_row_t(rho), out_row_t));
        }
        if out_lost != 0 {
            out_terms.push((scratch_lost(rho), out_lost));
        }
        schedule.push(SolveStep {
            target: ValueRef::Stripe {
                node: lost,
                row: rho,
            },
            source: EquationSource::MixPair { low: a, high: b },
            terms: out_terms,
        });
    }

    Ok(assemble_plan(
        lost,
        spec.base.alpha,
        &read_set,
        schedule,
        Vec::new(),
    ))
}
