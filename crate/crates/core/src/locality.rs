//! Parity splitting: locally repairable codes derived from a HashTag code.
//!
//! The first `delta - 1` parity nodes of the base code are each split into
//! `l` local parity nodes by restricting their equations to disjoint,
//! contiguous groups of data nodes (coefficients unchanged). The remaining
//! parities are renamed global. The sum of the `l` locals of one source
//! parity reproduces that parity exactly, which is what lets a lost
//! systematic node choose between two repairs: whole-node reads inside its
//! group, or the base code's sub-packetized path with the split parity
//! standing in for its group-local shard.
//!
//! Minimum distance is certified by an erasure oracle (exhaustive decode of
//! all patterns per size) rather than computed from a closed form.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::code::{combinations, CodeSpec, IndexPair, NodeVector};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::repair::{
    plan_systematic_repair, EquationSource, ReadRequest, RepairPlan, SolveStep, ValueRef,
};

/// Locality parameters: `groups` disjoint data groups (the paper's `l`) and
/// local distance `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalityConfig {
    pub groups: usize,
    pub delta: usize,
}

/// One local parity node: the restriction of `source_parity` to `group`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalParity {
    pub source_parity: usize,
    pub group: usize,
}

/// A split code: base HashTag code plus the locality layout.
///
/// Stripe node order is systematic `1..=k`, then the `l * (delta - 1)` local
/// parities ordered by (source parity, group), then the global parities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrcSpec {
    pub base: CodeSpec,
    pub config: LocalityConfig,
    pub groups: Vec<Vec<usize>>,
    pub local_parities: Vec<LocalParity>,
    pub global_parities: Vec<usize>,
}

/// Block length after splitting: `n + l*(delta-1) - delta + 1`.
pub fn lrc_dimensions(n: usize, _k: usize, l: usize, delta: usize) -> usize {
    n + l * (delta - 1) - delta + 1
}

/// Distance certification: the oracle-certified minimum distance next to the
/// published upper bounds (evaluated with per-group locality `k / l`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceReport {
    pub d_min: usize,
    pub bound_singleton: usize,
    /// Locality bound specialised to delta = 2, when applicable.
    pub bound_delta2: Option<usize>,
    pub bound_general: usize,
}

/// Splits the first `delta - 1` parities of `base` into group-local parities
/// over the canonical contiguous grouping.
pub fn split_parities(base: CodeSpec, config: LocalityConfig) -> Result<LrcSpec> {
    let (l, delta) = (config.groups, config.delta);
    let r = base.r();
    if l == 0 || !base.k.is_multiple_of(l) {
        return Err(Error::InvalidParameters(format!(
            "group count {l} must divide k={}",
            base.k
        )));
    }
    if delta < 2 || delta > r {
        return Err(Error::InvalidParameters(format!(
            "need 2 <= delta <= r, got delta={delta} r={r}"
        )));
    }
    let per = base.k / l;
    let groups: Vec<Vec<usize>> = (0..l)
        .map(|g| (g * per + 1..=(g + 1) * per).collect())
        .collect();
    let local_parities = (1..delta)
        .flat_map(|source_parity| {
            (1..=l).map(move |group| LocalParity {
                source_parity,
                group,
            })
        })
        .collect();
    let global_parities = (delta..=r).collect();
    Ok(LrcSpec {
        base,
        config,
        groups,
        local_parities,
        global_parities,
    })
}

impl LrcSpec {
    pub fn k(&self) -> usize {
        self.base.k
    }

    pub fn alpha(&self) -> usize {
        self.base.alpha
    }

    /// Total node count of the split stripe.
    pub fn n_prime(&self) -> usize {
        lrc_dimensions(
            self.base.n,
            self.base.k,
            self.config.groups,
            self.config.delta,
        )
    }

    pub fn local_count(&self) -> usize {
        self.local_parities.len()
    }

    /// Stripe node index of local parity (source, group), both 1-based.
    pub fn local_node(&self, source_parity: usize, group: usize) -> usize {
        self.base.k + (source_parity - 1) * self.config.groups + group
    }

    /// Stripe node index of global parity `g` (1-based among globals).
    pub fn global_node(&self, g: usize) -> usize {
        self.base.k + self.local_count() + g
    }

    /// Group that data node `j` belongs to (1-based).
    pub fn group_of(&self, j: usize) -> usize {
        (j - 1) / (self.base.k / self.config.groups) + 1
    }

    pub fn is_local_node(&self, node: usize) -> bool {
        node > self.base.k && node <= self.base.k + self.local_count()
    }

    pub fn is_global_node(&self, node: usize) -> bool {
        node > self.base.k + self.local_count() && node <= self.n_prime()
    }

    /// Terms of local parity (source, group) at `row`: the source parity
    /// equation restricted to the group's data nodes, coefficients unchanged.
    pub fn local_row_terms(
        &self,
        source_parity: usize,
        group: usize,
        row: usize,
    ) -> Vec<(IndexPair, FieldElement)> {
        let members = &self.groups[group - 1];
        self.base
            .parity_row_terms(source_parity, row)
            .into_iter()
            .filter(|(pair, _)| members.contains(&pair.node))
            .collect()
    }

    /// Encodes data into the split stripe: systematic, locals, globals.
    pub fn encode(&self, data: &[NodeVector]) -> Result<Vec<NodeVector>> {
        let payload_len = self.base.check_data_shape(data)?;
        let alpha = self.alpha();
        let mut nodes: Vec<NodeVector> = data.to_vec();
        for lp in &self.local_parities {
            let mut node = NodeVector::zero(alpha, payload_len);
            for row in 1..=alpha {
                let acc = &mut node.substripes[row - 1];
                for (pair, coeff) in self.local_row_terms(lp.source_parity, lp.group, row) {
                    let src = &data[pair.node - 1].substripes[pair.row - 1];
                    for (dst, &s) in acc.iter_mut().zip(src) {
                        *dst ^= self.base.field.mul(coeff, s);
                    }
                }
            }
            nodes.push(node);
        }
        for &parity in &self.global_parities {
            let mut node = NodeVector::zero(alpha, payload_len);
            for row in 1..=alpha {
                let acc = &mut node.substripes[row - 1];
                for (pair, coeff) in self.base.parity_row_terms(parity, row) {
                    let src = &data[pair.node - 1].substripes[pair.row - 1];
                    for (dst, &s) in acc.iter_mut().zip(src) {
                        *dst ^= self.base.field.mul(coeff, s);
                    }
                }
            }
            nodes.push(node);
        }
        Ok(nodes)
    }

    /// Coefficient rows contributed by one stripe node, over the `alpha * k`
    /// data scalars.
    fn node_equations(&self, node: usize) -> Vec<Vec<FieldElement>> {
        let alpha = self.alpha();
        let unknowns = alpha * self.base.k;
        let mut rows = Vec::with_capacity(alpha);
        for row in 1..=alpha {
            let mut coeffs = alloc::vec![0; unknowns];
            if node <= self.base.k {
                coeffs[(node - 1) * alpha + (row - 1)] = 1;
            } else if self.is_local_node(node) {
                let lp = self.local_parities[node - self.base.k - 1];
                for (pair, c) in self.local_row_terms(lp.source_parity, lp.group, row) {
                    coeffs[(pair.node - 1) * alpha + (pair.row - 1)] ^= c;
                }
            } else {
                let parity = self.global_parities[node - self.base.k - self.local_count() - 1];
                for (pair, c) in self.base.parity_row_terms(parity, row) {
                    coeffs[(pair.node - 1) * alpha + (pair.row - 1)] ^= c;
                }
            }
            rows.push(coeffs);
        }
        rows
    }

    /// Whether the data survives erasing exactly the given stripe nodes.
    pub fn erasure_decodable(&self, erased: &[usize]) -> bool {
        let erased: BTreeSet<usize> = erased.iter().copied().collect();
        let unknowns = self.alpha() * self.base.k;
        let mut rows = Vec::new();
        for node in 1..=self.n_prime() {
            if !erased.contains(&node) {
                rows.extend(self.node_equations(node));
            }
        }
        self.base.field.rank(&rows) == unknowns
    }

    /// Recovers the k data nodes from any decodable subset of stripe nodes.
    pub fn decode(&self, available: &[usize], contents: &[NodeVector]) -> Result<Vec<NodeVector>> {
        if available.len() != contents.len() {
            return Err(Error::ShapeMismatch(
                "nodes/contents length mismatch".into(),
            ));
        }
        let alpha = self.alpha();
        let payload_len = contents.first().map_or(0, NodeVector::payload_len);
        let unknowns = alpha * self.base.k;
        let mut rows: Vec<Vec<FieldElement>> = Vec::new();
        let mut rhs: Vec<Vec<FieldElement>> = Vec::new();
        for (slot, &node) in available.iter().enumerate() {
            if node == 0 || node > self.n_prime() {
                return Err(Error::NodeOutOfRange {
                    node,
                    limit: self.n_prime(),
                });
            }
            for (row, coeffs) in self.node_equations(node).into_iter().enumerate() {
                rows.push(coeffs);
                rhs.push(contents[slot].substripes[row].clone());
            }
        }
        let f = &self.base.field;
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

/// Certifies the minimum distance by exhaustive erasure decoding, growing the
/// pattern size until some pattern fails.
pub fn lrc_min_distance(spec: &LrcSpec) -> DistanceReport {
    let n_prime = spec.n_prime();
    let k = spec.base.k;
    let l = spec.config.groups;
    let delta = spec.config.delta;
    let mut d_min = n_prime - k + 1;
    'size: for e in 1..=(n_prime - k + 1) {
        for pattern in combinations(n_prime, e) {
            if !spec.erasure_decodable(&pattern) {
                d_min = e;
                break 'size;
            }
        }
    }
    DistanceReport {
        d_min,
        bound_singleton: n_prime - k + 1,
        bound_delta2: (delta == 2).then_some(n_prime - k - l + 2),
        bound_general: n_prime - k + 1 - (l - 1) * (delta - 1),
    }
}

/// Plans in-group repair: whole-node reads of the surviving group members
/// plus the group's first local parity. Works for lost systematic nodes and
/// lost local parities; global parities have no group.
pub fn plan_local_repair(spec: &LrcSpec, lost: usize) -> Result<RepairPlan> {
    let alpha = spec.alpha();
    let k = spec.base.k;
    if lost == 0 || lost > spec.n_prime() {
        return Err(Error::NodeOutOfRange {
            node: lost,
            limit: spec.n_prime(),
        });
    }
    if spec.is_global_node(lost) {
        return Err(Error::InvalidParameters(format!(
            "node {lost} is a global parity and belongs to no locality group"
        )));
    }

    let mut read_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut schedule = Vec::new();
    if lost <= k {
        let group = spec.group_of(lost);
        let members = spec.groups[group - 1].clone();
        for &m in members.iter().filter(|&&m| m != lost) {
            for row in 1..=alpha {
                read_set.insert((m, row));
            }
        }
        let local_node = spec.local_node(1, group);
        for row in 1..=alpha {
            read_set.insert((local_node, row));
        }
        for row in 1..=alpha {
            let terms = spec.local_row_terms(1, group, row);
            let target_coeff = terms
                .iter()
                .find(|(pair, _)| pair.node == lost)
                .map(|(_, c)| *c)
                .expect("first parity covers every group member");
            let inv = spec.base.field.inv(target_coeff)?;
            let mut step_terms = alloc::vec![(
                ValueRef::Stripe {
                    node: local_node,
                    row,
                },
                inv,
            )];
            for (pair, c) in &terms {
                if pair.node != lost {
                    step_terms.push((
                        ValueRef::Stripe {
                            node: pair.node,
                            row: pair.row,
                        },
                        spec.base.field.mul(*c, inv),
                    ));
                }
            }
            schedule.push(SolveStep {
                target: ValueRef::Stripe { node: lost, row },
                source: EquationSource::Local {
                    source_parity: 1,
                    group,
                    row,
                },
                terms: step_terms,
            });
        }
    } else {
        // lost local parity: re-encode from its whole group
        let lp = spec.local_parities[lost - k - 1];
        for &m in &spec.groups[lp.group - 1] {
            for row in 1..=alpha {
                read_set.insert((m, row));
            }
        }
        for row in 1..=alpha {
            let terms = spec
                .local_row_terms(lp.source_parity, lp.group, row)
                .into_iter()
                .map(|(pair, c)| {
                    (
                        ValueRef::Stripe {
                            node: pair.node,
                            row: pair.row,
                        },
                        c,
                    )
                })
                .collect();
            schedule.push(SolveStep {
                target: ValueRef::Stripe { node: lost, row },
                source: EquationSource::Local {
                    source_parity: lp.source_parity,
                    group: lp.group,
                    row,
                },
                terms,
            });
        }
    }
    Ok(assemble_plan(lost, alpha, &read_set, schedule, Vec::new()))
}

/// Plans repair of a lost global parity: full re-encode from the k data
/// nodes. The sub-packetized alternative exists only for the mixed
/// construction in [`crate::globalmix`].
pub fn plan_lrc_global_parity_repair(spec: &LrcSpec, node: usize) -> Result<RepairPlan> {
    if !spec.is_global_node(node) {
        return Err(Error::InvalidParameters(format!(
            "node {node} is not a global parity"
        )));
    }
    let alpha = spec.alpha();
    let parity = spec.global_parities[node - spec.base.k - spec.local_count() - 1];
    let mut read_set = BTreeSet::new();
    for data in 1..=spec.base.k {
        for row in 1..=alpha {
            read_set.insert((data, row));
        }
    }
    let schedule = (1..=alpha)
        .map(|row| SolveStep {
            target: ValueRef::Stripe { node, row },
            source: EquationSource::Reencode { parity, row },
            terms: spec
                .base
                .parity_row_terms(parity, row)
                .into_iter()
                .map(|(pair, c)| {
                    (
                        ValueRef::Stripe {
                            node: pair.node,
                            row: pair.row,
                        },
                        c,
                    )
                })
                .collect(),
        })
        .collect();
    Ok(assemble_plan(node, alpha, &read_set, schedule, Vec::new()))
}

/// Plans the global path for a lost systematic node: the base code's
/// sub-packetized plan with reads of split parities rewritten to the lost
/// node's group-local parity (the restricted equation already determines the
/// group's unknowns, so the other shards are not read).
pub fn plan_global_path_repair(spec: &LrcSpec, j: usize) -> Result<RepairPlan> {
    if j == 0 || j > spec.base.k {
        return Err(Error::NodeOutOfRange {
            node: j,
            limit: spec.base.k,
        });
    }
    let base_plan = plan_systematic_repair(&spec.base, j)?;
    let group = spec.group_of(j);
    rewrite_base_plan(spec, &base_plan, group).ok_or(Error::InvalidParameters(format!(
        "base plan for node {j} crosses group boundaries through a split parity"
    )))
}

fn map_base_node(spec: &LrcSpec, group: usize, node: usize) -> usize {
    let k = spec.base.k;
    let delta = spec.config.delta;
    if node <= k {
        node
    } else {
        let parity = node - k;
        if parity < delta {
            spec.local_node(parity, group)
        } else {
            spec.global_node(parity - delta + 1)
        }
    }
}

fn rewrite_base_plan(spec: &LrcSpec, base_plan: &RepairPlan, group: usize) -> Option<RepairPlan> {
    let k = spec.base.k;
    let delta = spec.config.delta;
    let members = &spec.groups[group - 1];
    let mut read_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for req in &base_plan.reads {
        let node = map_base_node(spec, group, req.node);
        for &s in &req.substripes {
            read_set.insert((node, s));
        }
    }
    let rewrite_steps = |steps: &[SolveStep]| -> Option<Vec<SolveStep>> {
        steps
            .iter()
            .map(|step| {
                let split_source = match step.source {
                    EquationSource::Parity { parity, row } if parity < delta => {
                        Some((parity, row))
                    }
                    _ => None,
                };
                let target = map_ref(spec, group, step.target);
                if let Some((parity, row)) = split_source {
                    // restricted equation: the solved value and all surviving
                    // data terms must stay inside the group
                    if let ValueRef::Stripe { node, .. } = step.target {
                        if node <= k && !members.contains(&node) {
                            return None;
                        }
                    }
                    let terms = step
                        .terms
                        .iter()
                        .filter_map(|&(vref, c)| match vref {
                            ValueRef::Stripe { node, .. }
                                if node <= k && !members.contains(&node) =>
                            {
                                None
                            }
                            _ => Some((map_ref(spec, group, vref), c)),
                        })
                        .collect();
                    Some(SolveStep {
                        target,
                        source: EquationSource::Local {
                            source_parity: parity,
                            group,
                            row,
                        },
                        terms,
                    })
                } else {
                    Some(SolveStep {
                        target,
                        source: step.source,
                        terms: step
                            .terms
                            .iter()
                            .map(|&(vref, c)| (map_ref(spec, group, vref), c))
                            .collect(),
                    })
                }
            })
            .collect()
    };
    let schedule = rewrite_steps(&base_plan.schedule)?;
    let checks = rewrite_steps(&base_plan.checks)?;
    Some(assemble_plan(
        base_plan.lost_node,
        base_plan.alpha,
        &read_set,
        schedule,
        checks,
    ))
}

fn map_ref(spec: &LrcSpec, group: usize, vref: ValueRef) -> ValueRef {
    match vref {
        ValueRef::Stripe { node, row } => ValueRef::Stripe {
            node: map_base_node(spec, group, node),
            row,
        },
        scratch => scratch,
    }
}

pub(crate) fn assemble_plan(
    lost: usize,
    alpha: usize,
    read_set: &BTreeSet<(usize, usize)>,
    schedule: Vec<SolveStep>,
    checks: Vec<SolveStep>,
) -> RepairPlan {
    let mut by_node: alloc::collections::BTreeMap<usize, Vec<usize>> =
        alloc::collections::BTreeMap::new();
    for &(node, row) in read_set {
        by_node.entry(node).or_default().push(row);
    }
    let reads: Vec<ReadRequest> = by_node
        .into_iter()
        .map(|(node, mut substripes)| {
            substripes.sort_unstable();
            substripes.dedup();
            ReadRequest { node, substripes }
        })
        .collect();
    let metrics = crate::repair::RepairMetrics::from_reads(&reads, alpha);
    RepairPlan {
        lost_node: lost,
        alpha,
        reads,
        schedule,
        checks,
        metrics,
    }
}
