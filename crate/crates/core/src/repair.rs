//! Single-node repair planning and execution, any-k decoding and the
//! repair-bandwidth bound calculators.
//!
//! A [`RepairPlan`] is a frozen artifact: an explicit read list plus a
//! sequence of linear evaluation steps whose coefficients were resolved at
//! planning time. Executing a plan touches nothing beyond its reads, so the
//! accounting in [`RepairMetrics`] is exact by construction.
//!
//! Planning for a lost systematic node tries, in order:
//!
//! 1. the row-set plan: read the rows named by the index arrays from all
//!    n-1 helpers and peel the parity equations restricted to those rows;
//! 2. a greedy equation plan that buys individual out-of-row substripes when
//!    the row set alone cannot be peeled (sub-optimal sub-packetization);
//! 3. full decode through the extras-free first parity, reading k whole
//!    nodes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::code::{CodeSpec, NodeVector};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ratio::Ratio;

/// Substripes to fetch from one helper node. Indices are 1-based and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadRequest {
    pub node: usize,
    pub substripes: Vec<usize>,
}

/// A value the schedule reads, derives or emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ValueRef {
    /// Substripe `row` of stripe node `node` (1-based).
    Stripe { node: usize, row: usize },
    /// A named intermediate that lives only inside the schedule.
    Scratch(usize),
}

/// Where a schedule step's equation comes from; informational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationSource {
    /// Parity equation `row` of parity `parity` (1-based) of the base code.
    Parity { parity: usize, row: usize },
    /// Group-restricted parity equation of a local parity node.
    Local {
        source_parity: usize,
        group: usize,
        row: usize,
    },
    /// The 2x2 substripe-mixing relation of a pair of global nodes.
    MixPair { low: usize, high: usize },
    /// Straight re-evaluation of a parity expression.
    Reencode { parity: usize, row: usize },
    /// Generator-matrix decode fallback.
    Decode,
}

/// One linear step: `target = XOR of coeff * term` over the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveStep {
    pub target: ValueRef,
    pub source: EquationSource,
    pub terms: Vec<(ValueRef, FieldElement)>,
}

/// Read accounting of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepairMetrics {
    /// Total substripes read.
    pub substripes: usize,
    /// Maximal contiguous runs of substripe indices, summed over nodes.
    pub read_ops: usize,
    /// Bandwidth in node units: substripes / alpha, exact.
    pub gamma: Ratio,
}

impl RepairMetrics {
    pub fn from_reads(reads: &[ReadRequest], alpha: usize) -> Self {
        let substripes: usize = reads.iter().map(|r| r.substripes.len()).sum();
        let read_ops = reads.iter().map(|r| contiguous_runs(&r.substripes)).sum();
        RepairMetrics {
            substripes,
            read_ops,
            gamma: Ratio::new(substripes as i128, alpha as i128),
        }
    }

    /// Bytes transferred under a given substripe size.
    pub fn bytes(&self, substripe_size: u64) -> u64 {
        self.substripes as u64 * substripe_size
    }
}

/// Number of maximal runs of consecutive indices in a sorted list.
pub fn contiguous_runs(sorted: &[usize]) -> usize {
    let mut runs = 0;
    let mut prev = None;
    for &s in sorted {
        if prev != Some(s.wrapping_sub(1)) && prev != Some(s) {
            runs += 1;
        }
        prev = Some(s);
    }
    runs
}

/// An executable repair: ordered reads plus a linear recovery schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPlan {
    pub lost_node: usize,
    pub alpha: usize,
    pub reads: Vec<ReadRequest>,
    pub schedule: Vec<SolveStep>,
    /// Redundant equations the reads must satisfy; violated checks surface
    /// corrupted inputs at execution time.
    pub checks: Vec<SolveStep>,
    pub metrics: RepairMetrics,
}

impl RepairPlan {
    fn assemble(
        lost_node: usize,
        alpha: usize,
        read_set: &BTreeSet<(usize, usize)>,
        schedule: Vec<SolveStep>,
        checks: Vec<SolveStep>,
    ) -> Self {
        let mut by_node: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
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
        let metrics = RepairMetrics::from_reads(&reads, alpha);
        RepairPlan {
            lost_node,
            alpha,
            reads,
            schedule,
            checks,
            metrics,
        }
    }

    /// Helper nodes contacted.
    pub fn helper_count(&self) -> usize {
        self.reads.len()
    }
}

/// Serves substripe payloads to [`execute_repair`].
pub trait ReadProvider {
    fn read(&mut self, node: usize, substripe: usize) -> Option<Vec<FieldElement>>;
}

/// Provider over an in-memory map keyed by `(node, substripe)`.
pub struct MapProvider(pub BTreeMap<(usize, usize), Vec<FieldElement>>);

impl ReadProvider for MapProvider {
    fn read(&mut self, node: usize, substripe: usize) -> Option<Vec<FieldElement>> {
        self.0.get(&(node, substripe)).cloned()
    }
}

/// Provider backed by a full stripe (tests and in-process repair); refuses to
/// serve the masked node.
pub struct StripeProvider<'a> {
    pub nodes: &'a [NodeVector],
    pub masked: usize,
}

impl ReadProvider for StripeProvider<'_> {
    fn read(&mut self, node: usize, substripe: usize) -> Option<Vec<FieldElement>> {
        if node == self.masked || node == 0 || node > self.nodes.len() {
            return None;
        }
        self.nodes[node - 1].substripes.get(substripe - 1).cloned()
    }
}

/// Lower bound on repair bandwidth with `d` helpers: `(m/k) * d / (d-k+1)`.
pub fn repair_bandwidth_bound(n: usize, k: usize, d: usize, m: Ratio) -> Result<Ratio> {
    if k == 0 || d < k || d > n.saturating_sub(1) {
        return Err(Error::InvalidParameters(format!(
            "need k <= d <= n-1, got n={n} k={k} d={d}"
        )));
    }
    Ok(m / Ratio::from_int(k as i128) * Ratio::new(d as i128, (d - k + 1) as i128))
}

/// The minimum-storage-regenerating point: `(m/k) * (n-1) / (n-k)`.
pub fn msr_bound(n: usize, k: usize, m: Ratio) -> Result<Ratio> {
    if n <= k || k == 0 {
        return Err(Error::InvalidParameters(format!(
            "need n > k >= 1, got n={n} k={k}"
        )));
    }
    Ok(m / Ratio::from_int(k as i128) * Ratio::new((n - 1) as i128, (n - k) as i128))
}

/// Recovers the k data nodes from any k available nodes by restricting the
/// generator matrix and solving. Firing `SingularMatrix` here means the spec
/// was never verified MDS.
pub fn decode_any_k(
    spec: &CodeSpec,
    available: &[usize],
    contents: &[NodeVector],
) -> Result<Vec<NodeVector>> {
    if available.len() != spec.k || contents.len() != available.len() {
        return Err(Error::ShapeMismatch(format!(
            "need exactly k={} nodes, got {}",
            spec.k,
            available.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for &node in available {
        if node == 0 || node > spec.n || !seen.insert(node) {
            return Err(Error::NodeOutOfRange {
                node,
                limit: spec.n,
            });
        }
    }
    let alpha = spec.alpha;
    let payload_len = contents[0].payload_len();
    for nv in contents {
        if nv.alpha() != alpha || nv.substripes.iter().any(|s| s.len() != payload_len) {
            return Err(Error::ShapeMismatch("ragged node contents".into()));
        }
    }

    let unknowns = alpha * spec.k;
    let mut rows: Vec<Vec<FieldElement>> = Vec::with_capacity(unknowns);
    let mut rhs_rows: Vec<&Vec<FieldElement>> = Vec::with_capacity(unknowns);
    for (slot, &node) in available.iter().enumerate() {
        for row in 1..=alpha {
            let mut coeffs = alloc::vec![0; unknowns];
            if node <= spec.k {
                coeffs[(node - 1) * alpha + (row - 1)] = 1;
            } else {
                for (pair, c) in spec.parity_row_terms(node - spec.k, row) {
                    coeffs[(pair.node - 1) * alpha + (pair.row - 1)] ^= c;
                }
            }
            rows.push(coeffs);
            rhs_rows.push(&contents[slot].substripes[row - 1]);
        }
    }
    let solution = solve_payload_system(spec, &rows, &rhs_rows, unknowns, payload_len)?;
    Ok((0..spec.k)
        .map(|j| NodeVector {
            substripes: (0..alpha)
                .map(|i| solution[j * alpha + i].clone())
                .collect(),
        })
        .collect())
}

/// Gaussian elimination with payload-wide right-hand sides.
fn solve_payload_system(
    spec: &CodeSpec,
    rows: &[Vec<FieldElement>],
    rhs: &[&Vec<FieldElement>],
    unknowns: usize,
    payload_len: usize,
) -> Result<Vec<Vec<FieldElement>>> {
    let f = &spec.field;
    let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
    let mut b: Vec<Vec<FieldElement>> = rhs.iter().map(|r| (*r).clone()).collect();
    let mut pivot = 0usize;
    let mut pivot_of_col = alloc::vec![usize::MAX; unknowns];
    for col in 0..unknowns {
        let Some(p) = (pivot..m.len()).find(|&r| m[r][col] != 0) else {
            return Err(Error::SingularMatrix);
        };
        m.swap(pivot, p);
        b.swap(pivot, p);
        let inv = f.inv(m[pivot][col])?;
        for c in col..unknowns {
            m[pivot][c] = f.mul(m[pivot][c], inv);
        }
        for v in b[pivot].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for r in 0..m.len() {
            if r != pivot && m[r][col] != 0 {
                let factor = m[r][col];
                for c in col..unknowns {
                    let sub = f.mul(factor, m[pivot][c]);
                    m[r][c] ^= sub;
                }
                for e in 0..payload_len {
                    let sub = f.mul(factor, b[pivot][e]);
                    b[r][e] ^= sub;
                }
            }
        }
        pivot_of_col[col] = pivot;
        pivot += 1;
    }
    Ok(pivot_of_col
        .iter()
        .map(|&p| b[p].clone())
        .collect())
}

/// Plans bandwidth-efficient repair of systematic node `j`.
pub fn plan_systematic_repair(spec: &CodeSpec, j: usize) -> Result<RepairPlan> {
    if j == 0 || j > spec.k {
        return Err(Error::NodeOutOfRange { node: j, limit: spec.k });
    }
    let full_cost = spec.k * spec.alpha;
    if let Some(plan) = rowset_plan(spec, j) {
        if plan.metrics.substripes < full_cost {
            return Ok(plan);
        }
    }
    if let Some(plan) = greedy_plan(spec, j) {
        if plan.metrics.substripes < full_cost {
            return Ok(plan);
        }
    }
    Ok(fallback_systematic_plan(spec, j))
}

/// Full-decode repair of parity node `parity` (1-based): read the k data
/// nodes and re-evaluate the parity expressions.
pub fn plan_parity_repair(spec: &CodeSpec, parity: usize) -> Result<RepairPlan> {
    if parity == 0 || parity > spec.r() {
        return Err(Error::NodeOutOfRange {
            node: parity,
            limit: spec.r(),
        });
    }
    let mut read_set = BTreeSet::new();
    for node in 1..=spec.k {
        for row in 1..=spec.alpha {
            read_set.insert((node, row));
        }
    }
    let schedule = (1..=spec.alpha)
        .map(|row| SolveStep {
            target: ValueRef::Stripe {
                node: spec.k + parity,
                row,
            },
            source: EquationSource::Reencode { parity, row },
            terms: spec
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
    Ok(RepairPlan::assemble(
        spec.k + parity,
        spec.alpha,
        &read_set,
        schedule,
        Vec::new(),
    ))
}

/// The row-set plan: read rows `R_j` from all n-1 helpers and peel the
/// parity equations restricted to those rows. Returns `None` when peeling
/// cannot recover every target substripe.
fn rowset_plan(spec: &CodeSpec, j: usize) -> Option<RepairPlan> {
    let rows: Vec<usize> = spec.node_rowset(j).into_iter().collect();
    let mut read_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for node in 1..=spec.n {
        if node == j {
            continue;
        }
        for &row in &rows {
            read_set.insert((node, row));
        }
    }

    let mut known: BTreeSet<ValueRef> = read_set
        .iter()
        .map(|&(node, row)| ValueRef::Stripe { node, row })
        .collect();
    // (source, terms, used as a pivot)
    type Equation = (EquationSource, Vec<(ValueRef, FieldElement)>, bool);
    let mut equations: Vec<Equation> = Vec::new();
    for parity in 1..=spec.r() {
        for &row in &rows {
            let mut terms: Vec<(ValueRef, FieldElement)> = spec
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
                .collect();
            terms.push((
                ValueRef::Stripe {
                    node: spec.k + parity,
                    row,
                },
                1,
            ));
            equations.push((EquationSource::Parity { parity, row }, terms, false));
        }
    }

    let mut schedule = Vec::new();
    loop {
        let mut progressed = false;
        for (source, terms, used) in equations.iter_mut() {
            if *used {
                continue;
            }
            let unknown: Vec<usize> = terms
                .iter()
                .enumerate()
                .filter(|(_, (v, _))| !known.contains(v))
                .map(|(idx, _)| idx)
                .collect();
            if unknown.len() == 1 {
                let idx = unknown[0];
                let (target, target_coeff) = terms[idx];
                let inv = spec.field.inv(target_coeff).ok()?;
                let step_terms: Vec<(ValueRef, FieldElement)> = terms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != idx)
                    .map(|(_, (v, c))| (*v, spec.field.mul(*c, inv)))
                    .collect();
                schedule.push(SolveStep {
                    target,
                    source: *source,
                    terms: step_terms,
                });
                known.insert(target);
                *used = true;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }

    let all_recovered = (1..=spec.alpha).all(|row| known.contains(&ValueRef::Stripe { node: j, row }));
    if !all_recovered {
        return None;
    }

    // Unused but fully-known equations double as consistency checks on the
    // read parity substripes.
    let checks: Vec<SolveStep> = equations
        .iter()
        .filter(|(_, terms, used)| !used && terms.iter().all(|(v, _)| known.contains(v)))
        .map(|(source, terms, _)| {
            let (last, rest) = terms.split_last().expect("parity term present");
            SolveStep {
                target: last.0,
                source: *source,
                terms: rest.to_vec(),
            }
        })
        .collect();

    Some(RepairPlan::assemble(j, spec.alpha, &read_set, schedule, checks))
}

/// Greedy equation plan: repeatedly pick the parity equation with exactly one
/// unsolved substripe of the lost node that needs the fewest new reads,
/// preferring equations inside the node's own row set (that is where its
/// scheduled elements sit, so later steps stay cheap).
fn greedy_plan(spec: &CodeSpec, j: usize) -> Option<RepairPlan> {
    let home_rows = spec.node_rowset(j);
    let mut solved: BTreeSet<usize> = BTreeSet::new();
    let mut read_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut schedule = Vec::new();
    while solved.len() < spec.alpha {
        // (new_reads, away_from_home, parity, row, target_row)
        let mut best: Option<(usize, usize, usize, usize, usize)> = None;
        for parity in 1..=spec.r() {
            for row in 1..=spec.alpha {
                let terms = spec.parity_row_terms(parity, row);
                let lost: Vec<usize> = terms
                    .iter()
                    .filter(|(pair, _)| pair.node == j && !solved.contains(&pair.row))
                    .map(|(pair, _)| pair.row)
                    .collect();
                if lost.len() != 1 {
                    continue;
                }
                let mut new_reads = usize::from(!read_set.contains(&(spec.k + parity, row)));
                for (pair, _) in &terms {
                    if pair.node != j && !read_set.contains(&(pair.node, pair.row)) {
                        new_reads += 1;
                    }
                }
                let away = usize::from(!home_rows.contains(&row));
                let cand = (new_reads, away, parity, row, lost[0]);
                if best.map(|b| cand < b).unwrap_or(true) {
                    best = Some(cand);
                }
            }
        }
        let (_, _, parity, row, target_row) = best?;
        let terms = spec.parity_row_terms(parity, row);
        let target_coeff = terms
            .iter()
            .find(|(pair, _)| pair.node == j && pair.row == target_row)
            .map(|(_, c)| *c)
            .expect("target term present");
        let inv = spec.field.inv(target_coeff).ok()?;
        let mut step_terms = alloc::vec![(
            ValueRef::Stripe {
                node: spec.k + parity,
                row,
            },
            inv,
        )];
        read_set.insert((spec.k + parity, row));
        for (pair, c) in &terms {
            if pair.node == j && pair.row == target_row {
                continue;
            }
            if pair.node != j {
                read_set.insert((pair.node, pair.row));
            }
            step_terms.push((
                ValueRef::Stripe {
                    node: pair.node,
                    row: pair.row,
                },
                spec.field.mul(*c, inv),
            ));
        }
        schedule.push(SolveStep {
            target: ValueRef::Stripe {
                node: j,
                row: target_row,
            },
            source: EquationSource::Parity { parity, row },
            terms: step_terms,
        });
        solved.insert(target_row);
    }
    Some(RepairPlan::assemble(j, spec.alpha, &read_set, schedule, Vec::new()))
}

/// Full-decode repair through the extras-free first parity.
fn fallback_systematic_plan(spec: &CodeSpec, j: usize) -> RepairPlan {
    let mut read_set = BTreeSet::new();
    for node in (1..=spec.k).filter(|&node| node != j) {
        for row in 1..=spec.alpha {
            read_set.insert((node, row));
        }
    }
    for row in 1..=spec.alpha {
        read_set.insert((spec.k + 1, row));
    }
    let schedule = (1..=spec.alpha)
        .map(|row| {
            let terms = spec.parity_row_terms(1, row);
            let target_coeff = terms
                .iter()
                .find(|(pair, _)| pair.node == j)
                .map(|(_, c)| *c)
                .expect("first parity covers every data node");
            let inv = spec.field.inv(target_coeff).expect("nonzero coefficient");
            let mut step_terms = alloc::vec![(
                ValueRef::Stripe {
                    node: spec.k + 1,
                    row,
                },
                inv,
            )];
            for (pair, c) in &terms {
                if pair.node != j {
                    step_terms.push((
                        ValueRef::Stripe {
                            node: pair.node,
                            row: pair.row,
                        },
                        spec.field.mul(*c, inv),
                    ));
                }
            }
            SolveStep {
                target: ValueRef::Stripe { node: j, row },
                source: EquationSource::Parity { parity: 1, row },
                terms: step_terms,
            }
        })
        .collect();
    RepairPlan::assemble(j, spec.alpha, &read_set, schedule, Vec::new())
}

/// Executes a plan against a provider and returns the reconstructed node.
/// Touches exactly the plan's reads.
pub fn execute_repair(
    spec: &CodeSpec,
    plan: &RepairPlan,
    provider: &mut dyn ReadProvider,
) -> Result<NodeVector> {
    execute_schedule(&spec.field, plan, provider)
}

/// Field-generic schedule execution shared by all plan kinds.
pub fn execute_schedule(
    field: &crate::field::Field,
    plan: &RepairPlan,
    provider: &mut dyn ReadProvider,
) -> Result<NodeVector> {
    let mut values: BTreeMap<ValueRef, Vec<FieldElement>> = BTreeMap::new();
    for req in &plan.reads {
        for &s in &req.substripes {
            let payload = provider.read(req.node, s).ok_or(Error::MissingRead {
                node: req.node,
                substripe: s,
            })?;
            values.insert(
                ValueRef::Stripe {
                    node: req.node,
                    row: s,
                },
                payload,
            );
        }
    }
    let eval = |values: &BTreeMap<ValueRef, Vec<FieldElement>>,
                terms: &[(ValueRef, FieldElement)]|
     -> Result<Vec<FieldElement>> {
        let len = values.values().next().map_or(0, Vec::len);
        let mut acc = alloc::vec![0; len];
        for (vref, coeff) in terms {
            let payload = values.get(vref).ok_or(Error::MissingRead {
                node: match vref {
                    ValueRef::Stripe { node, .. } => *node,
                    ValueRef::Scratch(id) => *id,
                },
                substripe: match vref {
                    ValueRef::Stripe { row, .. } => *row,
                    ValueRef::Scratch(_) => 0,
                },
            })?;
            for (dst, &s) in acc.iter_mut().zip(payload) {
                *dst ^= field.mul(*coeff, s);
            }
        }
        Ok(acc)
    };
    for step in &plan.schedule {
        let value = eval(&values, &step.terms)?;
        values.insert(step.target, value);
    }
    for check in &plan.checks {
        let expect = eval(&values, &check.terms)?;
        let got = values.get(&check.target).ok_or(Error::MissingRead {
            node: 0,
            substripe: 0,
        })?;
        if *got != expect {
            if let ValueRef::Stripe { node, row } = check.target {
                return Err(Error::InconsistentData {
                    node,
                    substripe: row,
                });
            }
        }
    }
    let substripes = (1..=plan.alpha)
        .map(|row| {
            values
                .get(&ValueRef::Stripe {
                    node: plan.lost_node,
                    row,
                })
                .cloned()
                .ok_or(Error::MissingRead {
                    node: plan.lost_node,
                    substripe: row,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeVector { substripes })
}
