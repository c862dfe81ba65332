//! Substripe-addressable chunk persistence: one directory per node, one file
//! per substripe.
//!
//! Layout: `<root>/<stripe-id>/node<j>/s<i>` plus `manifest.json`. Keeping
//! each substripe in its own file makes read-op accounting observable at the
//! filesystem boundary: a contiguous run of substripe indices is one logical
//! read op, and the store reports the runs it actually served so they can be
//! reconciled against a plan's predicted metrics.
//!
//! Writes are atomic per file (temp + rename) with the manifest written
//! last; node loss is simulated by removing the node directory.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use htlrc_core::code::NodeVector;
use htlrc_core::field::FieldElement;
use htlrc_core::repair::{contiguous_runs, ReadProvider, ReadRequest};

use crate::format::AnySpec;
use crate::packing::{file_bytes_to_payload, payload_to_file_bytes, stored_bytes_per_symbol};
use crate::{Result, StoreError};

/// Where one stripe lives on disk.
#[derive(Debug, Clone)]
pub struct StripeLayout {
    pub root: PathBuf,
    pub stripe_id: String,
}

impl StripeLayout {
    pub fn new(root: impl Into<PathBuf>, stripe_id: impl Into<String>) -> Self {
        StripeLayout {
            root: root.into(),
            stripe_id: stripe_id.into(),
        }
    }

    pub fn stripe_dir(&self) -> PathBuf {
        self.root.join(&self.stripe_id)
    }

    pub fn node_dir(&self, node: usize) -> PathBuf {
        self.stripe_dir().join(format!("node{node}"))
    }

    pub fn substripe_path(&self, node: usize, substripe: usize) -> PathBuf {
        self.node_dir(node).join(format!("s{substripe}"))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.stripe_dir().join("manifest.json")
    }
}

/// Stripe metadata, written after all substripe files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Manifest {
    pub spec_hash: String,
    pub n_prime: usize,
    pub alpha: usize,
    pub substripe_size: u64,
    pub payload_len: usize,
    pub original_size: u64,
}

/// Read-op accounting observed while serving requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObservedMetrics {
    pub substripes: usize,
    pub read_ops: usize,
}

/// Writes a full stripe; refuses to overwrite a stripe written by a
/// different spec.
pub fn write_stripe(
    layout: &StripeLayout,
    spec: &AnySpec,
    nodes: &[NodeVector],
    original_size: u64,
) -> Result<Manifest> {
    let w = spec.base().field.word_size();
    if nodes.len() != spec.node_count() {
        return Err(StoreError::Invalid(format!(
            "stripe has {} nodes, spec wants {}",
            nodes.len(),
            spec.node_count()
        )));
    }
    let payload_len = nodes[0].payload_len();
    let substripe_size = (payload_len * stored_bytes_per_symbol(w)) as u64;
    let manifest = Manifest {
        spec_hash: spec.spec_hash(),
        n_prime: spec.node_count(),
        alpha: spec.alpha(),
        substripe_size,
        payload_len,
        original_size,
    };
    if let Ok(existing) = read_manifest(layout) {
        if existing.spec_hash != manifest.spec_hash {
            return Err(StoreError::SpecMismatch {
                expected: existing.spec_hash,
                found: manifest.spec_hash,
            });
        }
    }
    for (idx, node) in nodes.iter().enumerate() {
        let dir = layout.node_dir(idx + 1);
        fs::create_dir_all(&dir)?;
        for (row, payload) in node.substripes.iter().enumerate() {
            if payload.len() != payload_len {
                return Err(StoreError::Invalid("ragged payload lengths".into()));
            }
            let bytes = payload_to_file_bytes(payload, w);
            atomic_write(&layout.substripe_path(idx + 1, row + 1), &bytes)?;
        }
    }
    atomic_write(
        &layout.manifest_path(),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;
    Ok(manifest)
}

/// Writes one repaired node back into the stripe.
pub fn write_node(
    layout: &StripeLayout,
    manifest: &Manifest,
    node: usize,
    content: &NodeVector,
    w: u32,
) -> Result<()> {
    if content.alpha() != manifest.alpha || content.payload_len() != manifest.payload_len {
        return Err(StoreError::Invalid("repaired node has the wrong shape".into()));
    }
    let dir = layout.node_dir(node);
    fs::create_dir_all(&dir)?;
    for (row, payload) in content.substripes.iter().enumerate() {
        atomic_write(
            &layout.substripe_path(node, row + 1),
            &payload_to_file_bytes(payload, w),
        )?;
    }
    Ok(())
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_manifest(layout: &StripeLayout) -> Result<Manifest> {
    let text = fs::read_to_string(layout.manifest_path())?;
    Ok(serde_json::from_str(&text)?)
}

/// Checks the stripe belongs to `spec` and returns the manifest.
pub fn open_stripe(layout: &StripeLayout, spec: &AnySpec) -> Result<Manifest> {
    let manifest = read_manifest(layout)?;
    let expected = spec.spec_hash();
    if manifest.spec_hash != expected {
        return Err(StoreError::SpecMismatch {
            expected,
            found: manifest.spec_hash,
        });
    }
    Ok(manifest)
}

fn read_substripe_file(
    layout: &StripeLayout,
    manifest: &Manifest,
    w: u32,
    node: usize,
    substripe: usize,
) -> Result<Vec<FieldElement>> {
    let path = layout.substripe_path(node, substripe);
    let bytes = fs::read(&path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            StoreError::Missing(format!("{}", path.display()))
        } else {
            StoreError::Io(e)
        }
    })?;
    if bytes.len() as u64 != manifest.substripe_size {
        return Err(StoreError::Truncated {
            path: path.display().to_string(),
            got: bytes.len() as u64,
            want: manifest.substripe_size,
        });
    }
    Ok(file_bytes_to_payload(&bytes, w))
}

/// Serves the given requests, reporting observed contiguous-run metrics.
/// Requests against a missing node surface as [`StoreError::Missing`].
pub fn read_substripes(
    layout: &StripeLayout,
    manifest: &Manifest,
    w: u32,
    requests: &[ReadRequest],
) -> Result<(BTreeMap<(usize, usize), Vec<FieldElement>>, ObservedMetrics)> {
    let mut payloads = BTreeMap::new();
    let mut observed = ObservedMetrics::default();
    for req in requests {
        let mut sorted = req.substripes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        observed.read_ops += contiguous_runs(&sorted);
        for s in sorted {
            let payload = read_substripe_file(layout, manifest, w, req.node, s)?;
            observed.substripes += 1;
            payloads.insert((req.node, s), payload);
        }
    }
    Ok((payloads, observed))
}

/// Reads one whole node.
pub fn read_node(
    layout: &StripeLayout,
    manifest: &Manifest,
    w: u32,
    node: usize,
) -> Result<NodeVector> {
    let substripes = (1..=manifest.alpha)
        .map(|s| read_substripe_file(layout, manifest, w, node, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeVector { substripes })
}

pub fn node_exists(layout: &StripeLayout, node: usize) -> bool {
    layout.node_dir(node).is_dir()
}

/// Simulates node loss.
pub fn remove_node(layout: &StripeLayout, node: usize) -> Result<()> {
    fs::remove_dir_all(layout.node_dir(node))?;
    Ok(())
}

/// [`ReadProvider`] over a stripe directory that records what it served.
pub struct StoreProvider<'a> {
    pub layout: &'a StripeLayout,
    pub manifest: &'a Manifest,
    pub w: u32,
    pub served: Vec<(usize, usize)>,
    pub error: Option<StoreError>,
}

impl<'a> StoreProvider<'a> {
    pub fn new(layout: &'a StripeLayout, manifest: &'a Manifest, w: u32) -> Self {
        StoreProvider {
            layout,
            manifest,
            w,
            served: Vec::new(),
            error: None,
        }
    }

    /// Observed metrics for everything served so far.
    pub fn observed(&self) -> ObservedMetrics {
        let mut by_node: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(node, s) in &self.served {
            by_node.entry(node).or_default().push(s);
        }
        let mut metrics = ObservedMetrics::default();
        for (_, mut rows) in by_node {
            rows.sort_unstable();
            rows.dedup();
            metrics.substripes += rows.len();
            metrics.read_ops += contiguous_runs(&rows);
        }
        metrics
    }
}

impl ReadProvider for StoreProvider<'_> {
    fn read(&mut self, node: usize, substripe: usize) -> Option<Vec<FieldElement>> {
        match read_substripe_file(self.layout, self.manifest, self.w, node, substripe) {
            Ok(payload) => {
                self.served.push((node, substripe));
                Some(payload)
            }
            Err(e) => {
                self.error.get_or_insert(e);
                None
            }
        }
    }
}
