//! Command-line surface tying code construction, encoding, repair, duality
//! decisions and curve generation together.
//!
//! Exit codes: 0 success, 2 validation error, 3 I/O error, 4 verification
//! failure. Randomized constructions take `--seed`; `HTLRC_SEED` overrides
//! the default seed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use htlrc::format::{AnySpec, PlanDoc};
use htlrc::packing::{bytes_to_symbols, symbols_per_byte, symbols_to_bytes};
use htlrc::store::{self, Manifest, ObservedMetrics, StoreProvider, StripeLayout};
use htlrc::StoreError;
use htlrc_core::code::{CodeSpec, MdsMode, NodeVector};
use htlrc_core::duality::{bandwidth_curves, choose_repair, CostModel, RepairStrategy};
use htlrc_core::field::Field;
use htlrc_core::globalmix::{build_global_efficient_lrc, plan_global_node_repair};
use htlrc_core::golden::golden_9_6_code;
use htlrc_core::locality::{
    plan_global_path_repair, plan_local_repair, plan_lrc_global_parity_repair, split_parities,
    LocalityConfig,
};
use htlrc_core::repair::{
    execute_schedule, plan_parity_repair, plan_systematic_repair, RepairPlan,
};
use htlrc_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "htlrc",
    version,
    about = "HashTag erasure codes with locally repairable derivatives"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Auto,
    Local,
    Global,
}

#[derive(Args)]
struct CostFlags {
    /// Transfer rate in bytes per second.
    #[arg(long, default_value_t = 104_857_600.0)]
    rate: f64,
    /// Seek time in seconds; defaults to the time of transferring 9 KB.
    #[arg(long)]
    seek: Option<f64>,
    /// Substripe size in bytes for pricing; defaults to the stripe manifest.
    #[arg(long)]
    substripe_size: Option<u64>,
}

impl CostFlags {
    fn model(&self, default_substripe: u64) -> CostModel {
        let seek = self.seek.unwrap_or(9216.0 / self.rate);
        CostModel {
            seek_time: seek,
            transfer_rate: self.rate,
            substripe_size: self.substripe_size.unwrap_or(default_substripe).max(1),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Construct a HashTag code spec and write it as JSON.
    GenCode {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        alpha: Option<usize>,
        /// Install the built-in (9,6) alpha=9 GF(32) reference code.
        #[arg(long = "golden-9-6", default_value_t = false)]
        golden: bool,
        /// Field: gf32, gf256 or <w>:<poly> (poly accepts 0x-prefixed hex).
        #[arg(long, default_value = "gf256")]
        field: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Split a code spec into a locally repairable one.
    Split {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        delta: Option<usize>,
        /// Shorthand "k,l,delta", e.g. 6,2,2.
        #[arg(long)]
        kld: Option<String>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Construct a split code with efficient global-parity repair.
    GenGlobalLrc {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        g: usize,
        #[arg(long, default_value = "gf256")]
        field: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Encode a file into a stripe directory.
    Encode {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value = "stripe0")]
        stripe_id: String,
        /// Input bytes per substripe; defaults to the smallest that fits.
        #[arg(long)]
        substripe_size: Option<usize>,
    },
    /// Decode a file from a subset of stripe nodes.
    Decode {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated node indices, e.g. 1,2,3,4,5,6.
        #[arg(long)]
        nodes: String,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Repair a lost node in place and print metrics.
    Repair {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        lost: usize,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
        #[command(flatten)]
        cost: CostFlags,
        /// Plan and print without writing the repaired node.
        #[arg(long, default_value_t = false)]
        dry_run: bool,
    },
    /// Print (or dump as JSON) the repair plan for a lost node.
    PlanRepair {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        lost: usize,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
        #[command(flatten)]
        cost: CostFlags,
        /// Write the full plan JSON here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Price both repair paths over a substripe-size grid (decision table).
    Simulate {
        #[arg(long, default_value_t = 9)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        k: usize,
        #[arg(long, default_value_t = 9)]
        alpha: usize,
        /// Comma-separated group counts.
        #[arg(long, default_value = "2")]
        l: String,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        /// Comma-separated substripe sizes in bytes.
        #[arg(long, default_value = "1024,10485760")]
        substripe: String,
        #[arg(long, default_value_t = 104_857_600.0)]
        rate: f64,
        /// Seek cost expressed as bytes transferred in the same time.
        #[arg(long, default_value_t = 9216)]
        seek_equiv_bytes: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit the repair-bandwidth curve table as CSV.
    Curves {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        /// Comma-separated group counts, e.g. 2,4.
        #[arg(long)]
        l: String,
        /// Inclusive range of input-code lengths, e.g. 9..16.
        #[arg(long)]
        n: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Verify a spec (and optionally a stored stripe) and report failures.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// exhaustive or sampled:<count>.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let (category, code) = classify(&e);
            eprintln!("error: {category}: {e}");
            ExitCode::from(code)
        }
    }
}

fn classify(e: &StoreError) -> (&'static str, u8) {
    match e {
        StoreError::Io(_) | StoreError::Missing(_) | StoreError::Truncated { .. } => ("io", 3),
        StoreError::Json(_) | StoreError::Invalid(_) | StoreError::SpecMismatch { .. } => {
            ("validation", 2)
        }
        StoreError::Core(core) => match core {
            CoreError::SingularMatrix
            | CoreError::InconsistentData { .. }
            | CoreError::SeedsExhausted { .. } => ("verification", 4),
            CoreError::MissingRead { .. } => ("io", 3),
            _ => ("validation", 2),
        },
    }
}

fn default_seed(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("HTLRC_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn parse_field(text: &str) -> Result<Field, StoreError> {
    match text {
        "gf32" => Ok(Field::gf32()),
        "gf256" => Ok(Field::gf256()),
        other => {
            let (w, poly) = other
                .split_once(':')
                .ok_or_else(|| StoreError::Invalid(format!("unknown field '{other}'")))?;
            let w: u32 = w
                .parse()
                .map_err(|_| StoreError::Invalid(format!("bad field width '{w}'")))?;
            let poly = if let Some(hex) = poly.strip_prefix("0x") {
                u32::from_str_radix(hex, 16)
            } else {
                poly.parse()
            }
            .map_err(|_| StoreError::Invalid(format!("bad polynomial '{poly}'")))?;
            Ok(Field::new(w, poly)?)
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<usize>, StoreError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| StoreError::Invalid(format!("bad list entry '{s}'")))
        })
        .collect()
}

fn parse_range(text: &str) -> Result<(usize, usize), StoreError> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| StoreError::Invalid(format!("bad range '{text}', want a..b")))?;
    let lo = a
        .parse()
        .map_err(|_| StoreError::Invalid(format!("bad range start '{a}'")))?;
    let hi = b
        .trim_start_matches('=')
        .parse()
        .map_err(|_| StoreError::Invalid(format!("bad range end '{b}'")))?;
    Ok((lo, hi))
}

fn load_spec(path: &PathBuf) -> Result<AnySpec, StoreError> {
    let text = fs::read_to_string(path)?;
    AnySpec::from_json(&text)
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), StoreError> {
    fs::write(path, text)?;
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, StoreError> {
    match command {
        Command::GenCode {
            n,
            k,
            alpha,
            golden,
            field,
            seed,
            out,
        } => {
            let spec = if golden {
                for (name, got, want) in [("n", n, 9), ("k", k, 6), ("alpha", alpha, 9)] {
                    if got.is_some() && got != Some(want) {
                        return Err(StoreError::Invalid(format!(
                            "--golden-9-6 fixes {name} = {want}"
                        )));
                    }
                }
                golden_9_6_code()
            } else {
                let (Some(n), Some(k), Some(alpha)) = (n, k, alpha) else {
                    return Err(StoreError::Invalid(
                        "--n, --k and --alpha are required without --golden-9-6".into(),
                    ));
                };
                CodeSpec::build(n, k, alpha, parse_field(&field)?, default_seed(seed))?
            };
            let any = AnySpec::Code(spec);
            write_text(&out, &any.to_json())?;
            println!(
                "wrote ({}, {}) code with alpha {} to {}",
                any.base().n,
                any.base().k,
                any.base().alpha,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Split {
            spec,
            l,
            delta,
            kld,
            out,
        } => {
            let base = match load_spec(&spec)? {
                AnySpec::Code(c) => c,
                _ => {
                    return Err(StoreError::Invalid(
                        "split expects a plain code spec".into(),
                    ))
                }
            };
            let (l, delta) = if let Some(text) = kld {
                let parts = parse_list(&text)?;
                let [k, l, delta] = parts[..] else {
                    return Err(StoreError::Invalid("--kld wants k,l,delta".into()));
                };
                if k != base.k {
                    return Err(StoreError::Invalid(format!(
                        "shorthand k={k} does not match the spec's k={}",
                        base.k
                    )));
                }
                (l, delta)
            } else {
                match (l, delta) {
                    (Some(l), Some(delta)) => (l, delta),
                    _ => {
                        return Err(StoreError::Invalid(
                            "pass --l and --delta, or --kld k,l,delta".into(),
                        ))
                    }
                }
            };
            let lrc = split_parities(base, LocalityConfig { groups: l, delta })?;
            println!(
                "split into a ({}, {}) code, shorthand ({}, {}, {})",
                lrc.n_prime(),
                lrc.k(),
                lrc.k(),
                l,
                delta
            );
            write_text(&out, &AnySpec::Lrc(lrc).to_json())?;
            Ok(ExitCode::SUCCESS)
        }

        Command::GenGlobalLrc {
            k,
            l,
            g,
            field,
            seed,
            out,
        } => {
            let spec =
                build_global_efficient_lrc(k, l, g, parse_field(&field)?, default_seed(seed))?;
            println!(
                "wrote ({}, {}) code with {} locals, {} mixed globals, alpha {}",
                spec.n_total(),
                k,
                spec.l(),
                spec.g(),
                spec.g()
            );
            write_text(&out, &AnySpec::Global(spec).to_json())?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Encode {
            spec,
            file,
            out_dir,
            stripe_id,
            substripe_size,
        } => {
            let spec = load_spec(&spec)?;
            let bytes = fs::read(&file)?;
            let k = spec.base().k;
            let alpha = spec.alpha();
            let chunk = substripe_size.unwrap_or_else(|| bytes.len().div_ceil(k * alpha).max(1));
            let nodes = encode_bytes(&spec, &bytes, chunk)?;
            let layout = StripeLayout::new(&out_dir, &stripe_id);
            let manifest = store::write_stripe(&layout, &spec, &nodes, bytes.len() as u64)?;
            println!(
                "encoded {} bytes into {} nodes x {} substripes of {} stored bytes at {}",
                bytes.len(),
                manifest.n_prime,
                manifest.alpha,
                manifest.substripe_size,
                layout.stripe_dir().display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Decode {
            spec,
            dir,
            nodes,
            out,
        } => {
            let spec = load_spec(&spec)?;
            let (layout, manifest) = open_dir(&spec, &dir)?;
            let subset = parse_list(&nodes)?;
            let w = spec.base().field.word_size();
            let contents: Vec<NodeVector> = subset
                .iter()
                .map(|&node| store::read_node(&layout, &manifest, w, node))
                .collect::<Result<_, _>>()?;
            let data = match &spec {
                AnySpec::Code(c) => htlrc_core::repair::decode_any_k(c, &subset, &contents)?,
                AnySpec::Lrc(l) => l.decode(&subset, &contents)?,
                AnySpec::Global(g) => g.decode(&subset, &contents)?,
            };
            let bytes = decode_bytes(&spec, &data, &manifest);
            fs::write(&out, &bytes)?;
            println!("decoded {} bytes to {}", bytes.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }

        Command::Repair {
            spec,
            dir,
            lost,
            strategy,
            cost,
            dry_run,
        } => {
            let spec = load_spec(&spec)?;
            let (layout, manifest) = open_dir(&spec, &dir)?;
            let model = cost.model(manifest.substripe_size);
            let (plan, decision) = plan_for(&spec, lost, strategy, &model)?;
            if let Some((local_cost, global_cost, chosen)) = &decision {
                println!(
                    "auto: local {:.6}s vs global {:.6}s -> {}",
                    local_cost,
                    global_cost,
                    strategy_name(*chosen)
                );
            }
            print_plan_metrics(&plan, &model);
            if dry_run {
                return Ok(ExitCode::SUCCESS);
            }
            let w = spec.base().field.word_size();
            let mut provider = StoreProvider::new(&layout, &manifest, w);
            let rebuilt = match execute_schedule(&spec.base().field, &plan, &mut provider) {
                Ok(node) => node,
                Err(e) => return Err(provider.error.take().unwrap_or(StoreError::Core(e))),
            };
            let observed: ObservedMetrics = provider.observed();
            println!(
                "observed: {} substripes in {} read ops",
                observed.substripes, observed.read_ops
            );
            store::write_node(&layout, &manifest, lost, &rebuilt, w)?;
            println!("repaired node {lost} in place");
            Ok(ExitCode::SUCCESS)
        }

        Command::PlanRepair {
            spec,
            lost,
            strategy,
            cost,
            dump,
        } => {
            let spec = load_spec(&spec)?;
            let model = cost.model(cost.substripe_size.unwrap_or(1024));
            let (plan, decision) = plan_for(&spec, lost, strategy, &model)?;
            if let Some((local_cost, global_cost, chosen)) = &decision {
                println!(
                    "auto: local {:.6}s vs global {:.6}s -> {}",
                    local_cost,
                    global_cost,
                    strategy_name(*chosen)
                );
            }
            print_plan_metrics(&plan, &model);
            for req in &plan.reads {
                println!("read node {}: substripes {:?}", req.node, req.substripes);
            }
            if let Some(path) = dump {
                let doc = PlanDoc::from_plan(&plan);
                write_text(&path, &serde_json::to_string_pretty(&doc)?)?;
                println!("dumped plan to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Simulate {
            n,
            k,
            alpha,
            l,
            delta,
            substripe,
            rate,
            seek_equiv_bytes,
            seed,
        } => {
            let l_values = parse_list(&l)?;
            let sizes = parse_list(&substripe)?;
            println!(
                "n,k,l,delta,substripe_bytes,lost,local_ops,local_bytes,global_ops,global_bytes,local_cost_s,global_cost_s,chosen"
            );
            for &l in &l_values {
                let base = if (n, k, alpha) == (9, 6, 9) {
                    golden_9_6_code()
                } else {
                    CodeSpec::build(n, k, alpha, Field::gf256(), default_seed(seed))?
                };
                let lrc = split_parities(base, LocalityConfig { groups: l, delta })?;
                for &size in &sizes {
                    let model = CostModel::seek_equivalent(seek_equiv_bytes, rate, size as u64);
                    for lost in 1..=k {
                        let d = choose_repair(&lrc, lost, &model)?;
                        println!(
                            "{n},{k},{l},{delta},{size},{lost},{},{},{},{},{:.9},{:.9},{}",
                            d.local_plan.metrics.read_ops,
                            d.local_plan.metrics.bytes(model.substripe_size),
                            d.global_plan.metrics.read_ops,
                            d.global_plan.metrics.bytes(model.substripe_size),
                            d.local_cost,
                            d.global_cost,
                            strategy_name(d.chosen)
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Curves {
            k,
            delta,
            l,
            n,
            out,
        } => {
            let l_values = parse_list(&l)?;
            let (lo, hi) = parse_range(&n)?;
            let points = bandwidth_curves(k, &l_values, delta, lo..=hi)?;
            let mut text =
                String::from("n,k,l,delta,gamma_local_branch,gamma_global_branch,gamma_min\n");
            for p in &points {
                text.push_str(&format!(
                    "{},{},{},{},{:.12},{:.12},{:.12}\n",
                    p.n,
                    p.k,
                    p.l,
                    p.delta,
                    p.gamma_local_branch.to_f64(),
                    p.gamma_global_branch.to_f64(),
                    p.gamma_min.to_f64()
                ));
            }
            match out {
                Some(path) => {
                    write_text(&path, &text)?;
                    println!("wrote {} rows to {}", points.len(), path.display());
                }
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { spec, mode, dir } => {
            let spec = load_spec(&spec)?;
            let mode = match mode.as_str() {
                "exhaustive" => MdsMode::Exhaustive,
                other => {
                    let count = other
                        .strip_prefix("sampled:")
                        .and_then(|c| c.parse().ok())
                        .ok_or_else(|| {
                            StoreError::Invalid(format!(
                                "bad mode '{other}', want exhaustive or sampled:<count>"
                            ))
                        })?;
                    MdsMode::Sampled(count)
                }
            };
            let mut ok = true;
            let report = spec.base().verify_mds(mode);
            println!(
                "mds: checked {} subsets, {} failing",
                report.checked,
                report.failures.len()
            );
            for f in report.failures.iter().take(10) {
                println!("  non-decodable subset {f:?}");
                ok = false;
            }
            ok &= verify_extensions(&spec)?;
            if let Some(dir) = dir {
                ok &= verify_stripe(&spec, &dir)?;
            }
            if ok {
                println!("verify: ok");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("verify: FAILED");
                Ok(ExitCode::from(4))
            }
        }
    }
}

fn strategy_name(s: RepairStrategy) -> &'static str {
    match s {
        RepairStrategy::Local => "local",
        RepairStrategy::Global => "global",
    }
}

/// File bytes -> stripe nodes under the spec's field packing.
fn encode_bytes(spec: &AnySpec, bytes: &[u8], chunk: usize) -> Result<Vec<NodeVector>, StoreError> {
    let base = spec.base();
    let w = base.field.word_size();
    let capacity = base.k * base.alpha * chunk;
    if bytes.len() > capacity {
        return Err(StoreError::Invalid(format!(
            "file of {} bytes exceeds stripe capacity {} (k*alpha*substripe)",
            bytes.len(),
            capacity
        )));
    }
    let mut padded = bytes.to_vec();
    padded.resize(capacity, 0);
    let data: Vec<NodeVector> = (0..base.k)
        .map(|j| NodeVector {
            substripes: (0..base.alpha)
                .map(|i| {
                    let start = (j * base.alpha + i) * chunk;
                    bytes_to_symbols(&padded[start..start + chunk], w)
                })
                .collect(),
        })
        .collect();
    spec.encode(&data)
}

/// Stripe data nodes -> original file bytes.
fn decode_bytes(spec: &AnySpec, data: &[NodeVector], manifest: &Manifest) -> Vec<u8> {
    let w = spec.base().field.word_size();
    let spb = symbols_per_byte(w);
    let mut bytes = Vec::with_capacity(manifest.original_size as usize);
    for node in data {
        for payload in &node.substripes {
            debug_assert_eq!(payload.len() % spb, 0);
            bytes.extend(symbols_to_bytes(payload, w));
        }
    }
    bytes.truncate(manifest.original_size as usize);
    bytes
}

fn open_dir(spec: &AnySpec, dir: &PathBuf) -> Result<(StripeLayout, Manifest), StoreError> {
    let stripe_id = dir
        .file_name()
        .and_then(|name| name.to_str())
        .ok_or_else(|| StoreError::Invalid("bad stripe directory".into()))?
        .to_string();
    let root = dir
        .parent()
        .ok_or_else(|| StoreError::Invalid("bad stripe directory".into()))?
        .to_path_buf();
    let layout = StripeLayout::new(root, stripe_id);
    let manifest = store::open_stripe(&layout, spec)?;
    Ok((layout, manifest))
}

type Decision = Option<(f64, f64, RepairStrategy)>;

/// Routes (spec kind, lost node, strategy) to a plan.
fn plan_for(
    spec: &AnySpec,
    lost: usize,
    strategy: Strategy,
    model: &CostModel,
) -> Result<(RepairPlan, Decision), StoreError> {
    if lost == 0 || lost > spec.node_count() {
        return Err(StoreError::Core(CoreError::NodeOutOfRange {
            node: lost,
            limit: spec.node_count(),
        }));
    }
    let k = spec.base().k;
    match spec {
        AnySpec::Code(code) => {
            if matches!(strategy, Strategy::Local) {
                return Err(StoreError::Invalid(
                    "a plain code has no locality groups; use --strategy global".into(),
                ));
            }
            let plan = if lost <= k {
                plan_systematic_repair(code, lost)?
            } else {
                plan_parity_repair(code, lost - k)?
            };
            Ok((plan, None))
        }
        AnySpec::Lrc(lrc) => {
            if lost <= k {
                match strategy {
                    Strategy::Local => Ok((plan_local_repair(lrc, lost)?, None)),
                    Strategy::Global => Ok((plan_global_path_repair(lrc, lost)?, None)),
                    Strategy::Auto => {
                        let d = choose_repair(lrc, lost, model)?;
                        let decision = Some((d.local_cost, d.global_cost, d.chosen));
                        Ok((d.chosen_plan().clone(), decision))
                    }
                }
            } else if lrc.is_local_node(lost) {
                Ok((plan_local_repair(lrc, lost)?, None))
            } else {
                Ok((plan_lrc_global_parity_repair(lrc, lost)?, None))
            }
        }
        AnySpec::Global(global) => {
            let view = global.lrc_view();
            if lost <= k {
                if matches!(strategy, Strategy::Global) {
                    return Err(StoreError::Invalid(
                        "mixed-global specs repair systematic nodes through their group".into(),
                    ));
                }
                Ok((plan_local_repair(&view, lost)?, None))
            } else if lost <= k + global.l() {
                Ok((plan_local_repair(&view, lost)?, None))
            } else {
                let t = lost - k - global.l();
                Ok((plan_global_node_repair(global, t)?, None))
            }
        }
    }
}

fn print_plan_metrics(plan: &RepairPlan, model: &CostModel) {
    println!(
        "plan: lost node {}, {} substripes in {} read ops from {} helpers, gamma {} ({} bytes at {} per substripe)",
        plan.lost_node,
        plan.metrics.substripes,
        plan.metrics.read_ops,
        plan.helper_count(),
        plan.metrics.gamma,
        plan.metrics.bytes(model.substripe_size),
        model.substripe_size,
    );
}

/// Structural identities beyond plain MDS, per spec kind.
fn verify_extensions(spec: &AnySpec) -> Result<bool, StoreError> {
    let mut ok = true;
    match spec {
        AnySpec::Code(_) => {}
        AnySpec::Lrc(lrc) => {
            // virtual-global identity on pseudo-random data
            let data = probe_data(lrc.base.k, lrc.alpha(), lrc.base.field.order() as u64);
            let nodes = lrc.encode(&data)?;
            let base_stripe = lrc.base.encode(&data)?;
            for source in 1..lrc.config.delta {
                for row in 0..lrc.alpha() {
                    let mut sum = vec![0u16; nodes[0].substripes[0].len()];
                    for group in 1..=lrc.config.groups {
                        let node = lrc.local_node(source, group);
                        for (dst, &v) in sum.iter_mut().zip(&nodes[node - 1].substripes[row]) {
                            *dst ^= v;
                        }
                    }
                    if sum != base_stripe.nodes[lrc.base.k + source - 1].substripes[row] {
                        println!("  split identity broken at parity {source} row {}", row + 1);
                        ok = false;
                    }
                }
            }
            for node in 1..=lrc.n_prime() {
                if !lrc.erasure_decodable(&[node]) {
                    println!("  single erasure of node {node} is not repairable");
                    ok = false;
                }
            }
        }
        AnySpec::Global(global) => {
            if !global.mix.all_nonsingular(&global.base.field) {
                println!("  mix contains a singular pair matrix");
                ok = false;
            }
            for node in 1..=global.n_total() {
                if !global.erasure_decodable(&[node]) {
                    println!("  single erasure of node {node} is not repairable");
                    ok = false;
                }
            }
        }
    }
    Ok(ok)
}

/// Re-encodes the stripe from its data nodes and compares every present
/// node, surfacing silent corruption.
fn verify_stripe(spec: &AnySpec, dir: &PathBuf) -> Result<bool, StoreError> {
    let (layout, manifest) = open_dir(spec, dir)?;
    let w = spec.base().field.word_size();
    let k = spec.base().k;
    let mut ok = true;
    let mut data = Vec::with_capacity(k);
    for node in 1..=k {
        if !store::node_exists(&layout, node) {
            println!("  data node {node} is missing; skipping stripe verification");
            return Ok(ok);
        }
        data.push(store::read_node(&layout, &manifest, w, node)?);
    }
    let expected = spec.encode(&data)?;
    for (idx, want) in expected.iter().enumerate() {
        let node = idx + 1;
        if !store::node_exists(&layout, node) {
            println!("  node {node} is missing");
            ok = false;
            continue;
        }
        let got = store::read_node(&layout, &manifest, w, node)?;
        if got != *want {
            println!("  node {node} content mismatch");
            ok = false;
        }
    }
    Ok(ok)
}

fn probe_data(k: usize, alpha: usize, order: u64) -> Vec<NodeVector> {
    let mut state = 0x853c_49e6_748f_ea9bu64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % order) as u16
    };
    (0..k)
        .map(|_| NodeVector {
            substripes: (0..alpha).map(|_| vec![next(), next()]).collect(),
        })
        .collect()
}
