//! Versioned JSON documents for code specs and repair plans.
//!
//! One document shape covers all three spec kinds: the locality block marks
//! a split code and the mix block marks the efficient-global variant. Field
//! order is fixed by the struct definitions and every value is an integer,
//! so load/save round-trips are byte-exact.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use htlrc_core::code::{CodeSpec, IndexArray, IndexPair, NodeVector};
use htlrc_core::field::Field;
use htlrc_core::globalmix::{GlobalLrcSpec, MixCoefficients};
use htlrc_core::locality::{LocalParity, LocalityConfig, LrcSpec};
use htlrc_core::repair::{EquationSource, RepairPlan, ValueRef};

use crate::{Result, StoreError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldDoc {
    pub w: u32,
    pub poly: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalityDoc {
    pub l: usize,
    pub delta: usize,
}

/// The on-disk spec document. Optional blocks extend the base code: a
/// locality block for split codes, plus a mix block for the
/// efficient-global-repair variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecDoc {
    pub version: u32,
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub field: FieldDoc,
    pub arrays: Vec<Vec<Vec<[usize; 2]>>>,
    pub coeffs: Vec<Vec<Vec<u16>>>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locality: Option<LocalityDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_parities: Option<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_parities: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mix: Option<Vec<[u32; 6]>>,
}

/// Any of the three spec kinds, resolved from a document.
#[derive(Debug, Clone)]
pub enum AnySpec {
    Code(CodeSpec),
    Lrc(LrcSpec),
    Global(GlobalLrcSpec),
}

impl AnySpec {
    pub fn base(&self) -> &CodeSpec {
        match self {
            AnySpec::Code(s) => s,
            AnySpec::Lrc(s) => &s.base,
            AnySpec::Global(s) => &s.base,
        }
    }

    /// Stripe node count of this spec kind.
    pub fn node_count(&self) -> usize {
        match self {
            AnySpec::Code(s) => s.n,
            AnySpec::Lrc(s) => s.n_prime(),
            AnySpec::Global(s) => s.n_total(),
        }
    }

    pub fn alpha(&self) -> usize {
        self.base().alpha
    }

    pub fn encode(&self, data: &[NodeVector]) -> Result<Vec<NodeVector>> {
        Ok(match self {
            AnySpec::Code(s) => s.encode(data)?.nodes,
            AnySpec::Lrc(s) => s.encode(data)?,
            AnySpec::Global(s) => s.encode(data)?,
        })
    }

    pub fn to_doc(&self) -> SpecDoc {
        let base = self.base();
        let mut doc = SpecDoc {
            version: FORMAT_VERSION,
            n: base.n,
            k: base.k,
            alpha: base.alpha,
            field: FieldDoc {
                w: base.field.word_size(),
                poly: base.field.poly(),
            },
            arrays: base
                .arrays
                .iter()
                .map(|a| {
                    a.rows
                        .iter()
                        .map(|row| row.iter().map(|p| [p.row, p.node]).collect())
                        .collect()
                })
                .collect(),
            coeffs: base.coeffs.clone(),
            seed: base.seed,
            locality: None,
            groups: None,
            local_parities: None,
            global_parities: None,
            mix: None,
        };
        match self {
            AnySpec::Code(_) => {}
            AnySpec::Lrc(s) => {
                doc.locality = Some(LocalityDoc {
                    l: s.config.groups,
                    delta: s.config.delta,
                });
                doc.groups = Some(s.groups.clone());
                doc.local_parities = Some(
                    s.local_parities
                        .iter()
                        .map(|lp| [lp.source_parity, lp.group])
                        .collect(),
                );
                doc.global_parities = Some(s.global_parities.clone());
            }
            AnySpec::Global(s) => {
                doc.locality = Some(LocalityDoc {
                    l: s.l(),
                    delta: 2,
                });
                doc.groups = Some(s.groups.clone());
                doc.local_parities = Some((1..=s.l()).map(|g| [1, g]).collect());
                doc.global_parities = Some((2..=s.base.r()).collect());
                let mut mix = Vec::new();
                for a in 1..=s.g() {
                    for b in a + 1..=s.g() {
                        let f = s.mix.get(a, b);
                        mix.push([
                            a as u32, b as u32, f[0] as u32, f[1] as u32, f[2] as u32,
                            f[3] as u32,
                        ]);
                    }
                }
                doc.mix = Some(mix);
            }
        }
        doc
    }

    pub fn from_doc(doc: SpecDoc) -> Result<Self> {
        if doc.version != FORMAT_VERSION {
            return Err(StoreError::Invalid(format!(
                "unsupported spec version {}",
                doc.version
            )));
        }
        let field = Field::new(doc.field.w, doc.field.poly)?;
        let order = field.order() as u16;
        let r = doc
            .n
            .checked_sub(doc.k)
            .filter(|&r| r >= 1)
            .ok_or_else(|| StoreError::Invalid("n must exceed k".into()))?;
        if doc.arrays.len() != r || doc.coeffs.len() != r {
            return Err(StoreError::Invalid(format!(
                "expected {r} arrays and coefficient tables"
            )));
        }
        let mut arrays = Vec::with_capacity(r);
        for (ai, rows) in doc.arrays.iter().enumerate() {
            if rows.len() != doc.alpha {
                return Err(StoreError::Invalid(format!(
                    "array {} has {} rows, expected {}",
                    ai + 1,
                    rows.len(),
                    doc.alpha
                )));
            }
            let mut parsed = Vec::with_capacity(doc.alpha);
            for (ri, row) in rows.iter().enumerate() {
                if row.len() < doc.k || doc.coeffs[ai][ri].len() != row.len() {
                    return Err(StoreError::Invalid(format!(
                        "array {} row {} is malformed",
                        ai + 1,
                        ri + 1
                    )));
                }
                let mut prow = Vec::with_capacity(row.len());
                for (si, &[prow_idx, pnode]) in row.iter().enumerate() {
                    let pair = IndexPair::new(prow_idx, pnode);
                    let coeff = doc.coeffs[ai][ri][si];
                    if pair.is_set() {
                        if prow_idx > doc.alpha || pnode > doc.k || coeff == 0 || coeff >= order {
                            return Err(StoreError::Invalid(format!(
                                "array {} row {} slot {} out of range",
                                ai + 1,
                                ri + 1,
                                si + 1
                            )));
                        }
                        if si < doc.k && (prow_idx != ri + 1 || pnode != si + 1) {
                            return Err(StoreError::Invalid(format!(
                                "array {} row {} has a non-systematic base grid",
                                ai + 1,
                                ri + 1
                            )));
                        }
                    } else if coeff != 0 || si < doc.k {
                        return Err(StoreError::Invalid(format!(
                            "array {} row {} slot {} is unset but carries data",
                            ai + 1,
                            ri + 1,
                            si + 1
                        )));
                    }
                    prow.push(pair);
                }
                parsed.push(prow);
            }
            arrays.push(IndexArray { rows: parsed });
        }
        let base = CodeSpec::with_coefficients(
            doc.n, doc.k, doc.alpha, field, arrays, doc.coeffs, doc.seed,
        );

        let Some(locality) = doc.locality else {
            return Ok(AnySpec::Code(base));
        };
        let groups = doc
            .groups
            .ok_or_else(|| StoreError::Invalid("locality block without groups".into()))?;
        if groups.len() != locality.l
            || groups.iter().flatten().count() != doc.k
            || {
                let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
                all.sort_unstable();
                all != (1..=doc.k).collect::<Vec<_>>()
            }
        {
            return Err(StoreError::Invalid(
                "groups must partition the data nodes".into(),
            ));
        }
        let local_parities: Vec<LocalParity> = doc
            .local_parities
            .unwrap_or_default()
            .into_iter()
            .map(|[source_parity, group]| LocalParity {
                source_parity,
                group,
            })
            .collect();
        let global_parities = doc.global_parities.unwrap_or_default();

        if let Some(mix_rows) = doc.mix {
            if locality.delta != 2 {
                return Err(StoreError::Invalid(
                    "mixed-global specs require delta = 2".into(),
                ));
            }
            let mut flat = std::collections::BTreeMap::new();
            for [a, b, f1, f2, f3, f4] in mix_rows {
                flat.insert(
                    (a as usize, b as usize),
                    [f1 as u16, f2 as u16, f3 as u16, f4 as u16],
                );
            }
            let mut mix = MixCoefficients::identity(doc.alpha);
            for a in 1..=doc.alpha {
                for b in a + 1..=doc.alpha {
                    let Some(&f) = flat.get(&(a, b)) else {
                        return Err(StoreError::Invalid(format!(
                            "mix block missing pair ({a}, {b})"
                        )));
                    };
                    mix = mix.with_pair(a, b, f);
                }
            }
            let spec = GlobalLrcSpec {
                base,
                groups,
                mix,
            };
            if spec.g() != spec.base.alpha || spec.base.r() != spec.g() + 1 {
                return Err(StoreError::Invalid(
                    "mixed-global specs need r = g + 1 parities and alpha = g".into(),
                ));
            }
            return Ok(AnySpec::Global(spec));
        }

        Ok(AnySpec::Lrc(LrcSpec {
            base,
            config: LocalityConfig {
                groups: locality.l,
                delta: locality.delta,
            },
            groups,
            local_parities,
            global_parities,
        }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDoc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    /// Hash binding stripes to the spec that wrote them.
    pub fn spec_hash(&self) -> String {
        let compact = serde_json::to_string(&self.to_doc()).expect("spec serializes");
        let digest = Sha256::digest(compact.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

// ---------------------------------------------------------------------------
// repair plan documents
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueRefDoc {
    Stripe { node: usize, row: usize },
    Scratch { id: usize },
}

impl From<ValueRef> for ValueRefDoc {
    fn from(v: ValueRef) -> Self {
        match v {
            ValueRef::Stripe { node, row } => ValueRefDoc::Stripe { node, row },
            ValueRef::Scratch(id) => ValueRefDoc::Scratch { id },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationSourceDoc {
    Parity { parity: usize, row: usize },
    Local { source_parity: usize, group: usize, row: usize },
    MixPair { low: usize, high: usize },
    Reencode { parity: usize, row: usize },
    Decode,
}

impl From<EquationSource> for EquationSourceDoc {
    fn from(s: EquationSource) -> Self {
        match s {
            EquationSource::Parity { parity, row } => EquationSourceDoc::Parity { parity, row },
            EquationSource::Local {
                source_parity,
                group,
                row,
            } => EquationSourceDoc::Local {
                source_parity,
                group,
                row,
            },
            EquationSource::MixPair { low, high } => EquationSourceDoc::MixPair { low, high },
            EquationSource::Reencode { parity, row } => EquationSourceDoc::Reencode { parity, row },
            EquationSource::Decode => EquationSourceDoc::Decode,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveStepDoc {
    pub target: ValueRefDoc,
    pub source: EquationSourceDoc,
    pub terms: Vec<(ValueRefDoc, u16)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReadRequestDoc {
    pub node: usize,
    pub substripes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub substripes: usize,
    pub read_ops: usize,
    pub gamma: [i64; 2],
}

/// Serializable form of a repair plan (1-based indices throughout).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanDoc {
    pub version: u32,
    pub lost_node: usize,
    pub alpha: usize,
    pub reads: Vec<ReadRequestDoc>,
    pub schedule: Vec<SolveStepDoc>,
    pub metrics: MetricsDoc,
}

impl PlanDoc {
    pub fn from_plan(plan: &RepairPlan) -> Self {
        PlanDoc {
            version: FORMAT_VERSION,
            lost_node: plan.lost_node,
            alpha: plan.alpha,
            reads: plan
                .reads
                .iter()
                .map(|r| ReadRequestDoc {
                    node: r.node,
                    substripes: r.substripes.clone(),
                })
                .collect(),
            schedule: plan
                .schedule
                .iter()
                .map(|s| SolveStepDoc {
                    target: s.target.into(),
                    source: s.source.into(),
                    terms: s.terms.iter().map(|&(v, c)| (v.into(), c)).collect(),
                })
                .collect(),
            metrics: MetricsDoc {
                substripes: plan.metrics.substripes,
                read_ops: plan.metrics.read_ops,
                gamma: [
                    plan.metrics.gamma.numer() as i64,
                    plan.metrics.gamma.denom() as i64,
                ],
            },
        }
    }
}
