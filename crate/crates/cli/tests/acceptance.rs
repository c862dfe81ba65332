//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criteria 1, 4 and 7 carry sub-results that cannot hold simultaneously
//! with the published reference material (misprinted coefficient tables; an
//! inherent mirror-read asymmetry for three or more mixed globals). Those
//! tests verify everything attainable first, print exact findings, and then
//! assert the criterion as stated, so the failures stay visible rather than
//! papered over.

use std::time::Instant;

use htlrc_core::code::{combinations, CodeSpec, MdsMode, NodeVector};
use htlrc_core::duality::{
    bandwidth_curves, choose_repair, gamma_branches, CostModel, RepairStrategy,
};
use htlrc_core::field::Field;
use htlrc_core::globalmix::{build_global_efficient_lrc, plan_global_node_repair};
use htlrc_core::golden::golden_9_6_code;
use htlrc_core::locality::{
    plan_global_path_repair, plan_local_repair, split_parities, LocalityConfig, LrcSpec,
};
use htlrc_core::ratio::Ratio;
use htlrc_core::repair::{
    execute_schedule, msr_bound, plan_systematic_repair, StripeProvider,
};

const KB: u64 = 1024;
const MB: u64 = 1024 * 1024;

/// Example 1's 27 parity equations, transcribed independently of the
/// structured constants in the library: `base coefficients | coeff:row,node
/// extras`.
const REFERENCE_EQUATIONS: [[&str; 9]; 3] = [
    [
        "7,10,18,11,17,6",
        "26,17,25,27,31,4",
        "22,12,27,31,31,23",
        "17,9,14,4,21,25",
        "20,5,5,13,11,16",
        "25,16,30,28,10,24",
        "20,8,21,9,3,25",
        "23,4,12,16,8,17",
        "2,21,8,16,7,25",
    ],
    [
        "8,24,21,19,6,20|8:4,1|6:2,4",
        "3,12,6,3,16,10|30:5,1|24:1,5",
        "23,20,30,7,16,10|21:6,1|27:1,6",
        "14,7,10,14,24,20|16:1,2|31:5,4",
        "25,11,29,12,20,24|15:2,2|6:4,5",
        "17,27,4,21,15,11|19:3,2|21:4,6",
        "19,23,16,4,14,16|9:1,3|8:8,4",
        "5,26,22,30,22,21|24:2,3|26:7,5",
        "10,8,10,27,28,20|16:3,3|4:7,6",
    ],
    [
        "20,20,30,17,12,27|28:7,1|9:3,4",
        "18,10,20,21,13,7|2:8,1|6:3,5",
        "31,25,12,18,15,24|31:9,1|28:2,6",
        "6,16,26,4,21,27|26:7,2|8:6,4",
        "7,6,26,6,15,16|28:8,2|4:6,5",
        "20,20,12,20,18,26|19:9,2|30:5,6",
        "26,2,6,20,17,23|8:4,3|31:9,4",
        "20,15,13,20,10,24|31:5,3|9:9,5",
        "6,2,31,12,16,30|20:6,3|13:8,6",
    ],
];

fn parse_equation(text: &str) -> Vec<(usize, usize, u16)> {
    // returns (row, node, coeff) terms
    let mut parts = text.split('|');
    let base = parts.next().unwrap();
    let mut terms = Vec::new();
    for (node, coeff) in base.split(',').enumerate() {
        terms.push((usize::MAX, node + 1, coeff.parse().unwrap()));
    }
    for extra in parts {
        let (coeff, pair) = extra.split_once(':').unwrap();
        let (row, node) = pair.split_once(',').unwrap();
        terms.push((
            row.parse().unwrap(),
            node.parse().unwrap(),
            coeff.parse().unwrap(),
        ));
    }
    terms
}

fn random_data(k: usize, alpha: usize, payload_len: usize, order: u64, seed: u64) -> Vec<NodeVector> {
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % order) as u16
    };
    (0..k)
        .map(|_| NodeVector {
            substripes: (0..alpha)
                .map(|_| (0..payload_len).map(|_| next()).collect())
                .collect(),
        })
        .collect()
}

fn golden_split(l: usize) -> LrcSpec {
    split_parities(
        golden_9_6_code(),
        LocalityConfig {
            groups: l,
            delta: 2,
        },
    )
    .unwrap()
}

#[test]
fn criterion_1_golden_code_fidelity() {
    let start = Instant::now();
    let spec = golden_9_6_code();
    // every coefficient of all 27 equations, against an independent
    // transcription
    let mut coefficients = 0;
    for (pi, rows) in REFERENCE_EQUATIONS.iter().enumerate() {
        for (ri, text) in rows.iter().enumerate() {
            let expected = parse_equation(text);
            let got = spec.parity_row_terms(pi + 1, ri + 1);
            assert_eq!(got.len(), expected.len(), "parity {} row {}", pi + 1, ri + 1);
            for (slot, (row, node, coeff)) in expected.into_iter().enumerate() {
                let (pair, c) = got[slot];
                let want_row = if row == usize::MAX { ri + 1 } else { row };
                assert_eq!(
                    (pair.row, pair.node, c),
                    (want_row, node, coeff),
                    "parity {} row {} slot {}",
                    pi + 1,
                    ri + 1,
                    slot
                );
                coefficients += 1;
            }
        }
    }
    let report = spec.verify_mds(MdsMode::Exhaustive);
    let elapsed = start.elapsed();
    let pass = report.passed() && elapsed.as_secs() < 10;
    assert_eq!(coefficients, 198, "all 27 equations covered");
    println!(
        "criterion 1 (golden-code fidelity): {} — {coefficients}/198 coefficients verbatim, \
         {}/{} subsets decodable in {:.2?}",
        if pass { "PASS" } else { "FAIL" },
        report.checked - report.failures.len(),
        report.checked,
        elapsed
    );
    for f in &report.failures {
        println!("  singular subset {f:?} (reference listing misprint)");
    }
    assert!(elapsed.as_secs() < 10, "runtime budget exceeded");
    // Unattainable as stated: the published table carries at least three
    // coefficient misprints (no 1- or 2-coefficient correction can clear all
    // six singular subsets), so verbatim fidelity and full MDS conflict.
    // Fidelity wins; this assertion records the defect.
    assert!(
        report.passed(),
        "verify_mds fails on {} of 84 subsets with the verbatim reference table",
        report.failures.len()
    );
}

#[test]
fn criterion_2_msr_bandwidth_attainment() {
    let spec = golden_9_6_code();
    let data = random_data(6, 9, 2, 32, 0x2222);
    let stripe = spec.encode(&data).unwrap();
    for j in 1..=6 {
        let plan = plan_systematic_repair(&spec, j).unwrap();
        assert_eq!(plan.metrics.substripes, 24, "node {j}");
        assert_eq!(plan.metrics.gamma, Ratio::new(8, 3), "node {j}");
        let mut provider = StripeProvider {
            nodes: &stripe.nodes,
            masked: j,
        };
        let rebuilt = execute_schedule(&spec.field, &plan, &mut provider).unwrap();
        assert_eq!(rebuilt, stripe.nodes[j - 1], "node {j}");
    }
    println!(
        "criterion 2 (MSR bandwidth attainment): PASS — 24 substripes (gamma 8/3) for every systematic node"
    );
}

#[test]
fn criterion_3_parity_splitting_vectors() {
    // Example 2: (6,2,2), block length 10
    let two = golden_split(2);
    assert_eq!(two.n_prime(), 10);
    for row in 1..=9 {
        let base = parse_equation(REFERENCE_EQUATIONS[0][row - 1]);
        let l1 = two.local_row_terms(1, 1, row);
        let l2 = two.local_row_terms(1, 2, row);
        let expect =
            |terms: &[(usize, usize, u16)], nodes: std::ops::RangeInclusive<usize>| -> Vec<(usize, usize, u16)> {
                terms
                    .iter()
                    .filter(|(_, node, _)| nodes.contains(node))
                    .map(|&(r, n, c)| (if r == usize::MAX { row } else { r }, n, c))
                    .collect()
            };
        let got1: Vec<(usize, usize, u16)> =
            l1.iter().map(|(p, c)| (p.row, p.node, *c)).collect();
        let got2: Vec<(usize, usize, u16)> =
            l2.iter().map(|(p, c)| (p.row, p.node, *c)).collect();
        assert_eq!(got1, expect(&base, 1..=3), "l=2 group 1 row {row}");
        assert_eq!(got2, expect(&base, 4..=6), "l=2 group 2 row {row}");
    }

    // Example 3: (6,3,2), block length 11
    let three = golden_split(3);
    assert_eq!(three.n_prime(), 11);
    for row in 1..=9 {
        let base = parse_equation(REFERENCE_EQUATIONS[0][row - 1]);
        for group in 1..=3usize {
            let lo = (group - 1) * 2 + 1;
            let got: Vec<(usize, usize, u16)> = three
                .local_row_terms(1, group, row)
                .iter()
                .map(|(p, c)| (p.row, p.node, *c))
                .collect();
            let want: Vec<(usize, usize, u16)> = base
                .iter()
                .filter(|(_, node, _)| (lo..lo + 2).contains(node))
                .map(|&(r, n, c)| (if r == usize::MAX { row } else { r }, n, c))
                .collect();
            assert_eq!(got, want, "l=3 group {group} row {row}");
        }
    }
    println!(
        "criterion 3 (parity-splitting vectors): PASS — both splits coefficient-exact, block lengths 10 and 11"
    );
}

#[test]
fn criterion_4_distance_certification() {
    let start = Instant::now();
    let two = golden_split(2);
    for pattern in combinations(10, 2) {
        assert!(
            two.erasure_decodable(&pattern),
            "double erasure {pattern:?} must decode"
        );
    }
    let failing_triple = combinations(10, 3)
        .into_iter()
        .find(|p| !two.erasure_decodable(p));
    assert!(failing_triple.is_some(), "a failing triple certifies d = 3");
    println!(
        "criterion 4a ((10,6) distance): PASS — 45/45 doubles decode, triple {:?} fails (d_min = 3)",
        failing_triple.unwrap()
    );

    let three = golden_split(3);
    let failing: Vec<Vec<usize>> = combinations(11, 3)
        .into_iter()
        .filter(|p| !three.erasure_decodable(p))
        .collect();
    let elapsed = start.elapsed();
    println!(
        "criterion 4b ((11,6) distance): {} — {}/165 triples decode in {:.2?}",
        if failing.is_empty() { "PASS" } else { "FAIL" },
        165 - failing.len(),
        elapsed
    );
    for f in &failing {
        println!("  failing triple {f:?} (traces to a reference-listing misprint subset)");
    }
    assert!(elapsed.as_secs() < 60, "runtime budget exceeded");
    // Unattainable as stated: the same misprints that break criterion 1
    // surface here as failing triples; with a fully MDS base every triple
    // would decode.
    assert!(
        failing.is_empty(),
        "{} of 165 triple erasures fail on the verbatim reference table",
        failing.len()
    );
}

#[test]
fn criterion_5_repair_duality_example() {
    let spec = golden_split(2);
    let rate = 100.0 * MB as f64;

    // small stripe: 1 KB substripes, seek worth 9 KB of transfer
    let small = CostModel::seek_equivalent(9 * KB, rate, KB);
    let d = choose_repair(&spec, 1, &small).unwrap();
    assert_eq!(d.chosen, RepairStrategy::Local);
    assert_eq!(d.local_plan.metrics.read_ops, 3);
    assert_eq!(d.local_plan.metrics.bytes(small.substripe_size), 27 * KB);
    assert!(d.global_plan.metrics.read_ops >= 8 && d.global_plan.metrics.read_ops <= 24);
    for j in 2..=6 {
        assert_eq!(
            choose_repair(&spec, j, &small).unwrap().chosen,
            RepairStrategy::Local,
            "node {j} at 1 KB substripes"
        );
    }

    // large stripe: 10 MB substripes, same seek calibration
    let large = CostModel::seek_equivalent(9 * KB, rate, 10 * MB);
    let d = choose_repair(&spec, 1, &large).unwrap();
    assert_eq!(d.chosen, RepairStrategy::Global);
    assert_eq!(d.global_plan.metrics.bytes(large.substripe_size), 240 * MB);
    assert_eq!(d.local_plan.metrics.bytes(large.substripe_size), 270 * MB);
    for j in 2..=6 {
        let d = choose_repair(&spec, j, &large).unwrap();
        assert_eq!(d.chosen, RepairStrategy::Global, "node {j} at 10 MB");
        assert!(d.global_plan.metrics.read_ops >= 8 && d.global_plan.metrics.read_ops <= 24);
    }
    println!(
        "criterion 5 (repair duality walkthrough): PASS — local at 1 KB (3 ops, 27 KB), global at 10 MB (240 MB vs 270 MB)"
    );
}

#[test]
fn criterion_6_bandwidth_curve_values() {
    let delta2 = bandwidth_curves(8, &[2, 4], 2, 9..=16).unwrap();
    for p in &delta2 {
        let flat = if p.l == 2 {
            Ratio::new(1, 2)
        } else {
            Ratio::new(1, 4)
        };
        assert_eq!(p.gamma_local_branch, flat, "k=8 delta=2 l={} n={}", p.l, p.n);
        let global = Ratio::new((p.n - 1) as i128, (8 * (p.n - 8)) as i128);
        assert_eq!(p.gamma_global_branch, global);
        assert_eq!(p.gamma_min, flat.min(global));
    }
    let delta3 = bandwidth_curves(8, &[2, 4], 3, 9..=16).unwrap();
    for p in &delta3 {
        let flat = if p.l == 2 {
            Ratio::new(5, 16) // 0.3125
        } else {
            Ratio::new(3, 16) // 0.1875
        };
        assert_eq!(p.gamma_local_branch, flat, "k=8 delta=3 l={} n={}", p.l, p.n);
    }
    println!(
        "criterion 6 (curve values): PASS — flat 0.5/0.25 at delta=2 and 0.3125/0.1875 at delta=3, exact"
    );
}

#[test]
fn criterion_7_global_parity_repair_bandwidth() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for k in [4usize, 6] {
        for g in [2usize, 3] {
            for seed in 0..20u64 {
                let spec = build_global_efficient_lrc(k, 2, g, Field::gf256(), seed * 31 + 1)
                    .unwrap_or_else(|e| panic!("build k={k} g={g} seed={seed}: {e}"));
                let base_plan = plan_systematic_repair(&spec.base, 1).unwrap();
                let data = random_data(k, g, 2, 256, seed + 5);
                let nodes = spec.encode(&data).unwrap();
                for t in 1..=g {
                    checked += 1;
                    let plan = plan_global_node_repair(&spec, t).unwrap();
                    let mut provider = StripeProvider {
                        nodes: &nodes,
                        masked: spec.global_node(t),
                    };
                    let rebuilt =
                        execute_schedule(&spec.base.field, &plan, &mut provider).unwrap();
                    assert_eq!(
                        rebuilt,
                        nodes[spec.global_node(t) - 1],
                        "reconstruction k={k} g={g} t={t}"
                    );
                    if plan.metrics.substripes != base_plan.metrics.substripes {
                        failures.push((
                            k,
                            g,
                            seed,
                            t,
                            plan.metrics.substripes,
                            base_plan.metrics.substripes,
                        ));
                    }
                }
            }
        }
    }
    let unique: std::collections::BTreeSet<(usize, usize, usize, usize)> = failures
        .iter()
        .map(|&(k, g, _, _, got, want)| (k, g, got, want))
        .collect();
    println!(
        "criterion 7 (global-node repair bandwidth): {} — {}/{} repairs byte-exact, count equality holds for g=2; mismatches: {:?}",
        if failures.is_empty() { "PASS" } else { "FAIL" },
        checked,
        checked,
        unique
    );
    // Unattainable as stated for g = 3: the diagonal substripe costs k data
    // reads plus the row's appended extras, and each surviving global costs
    // one mirror read, which exceeds the data-node row-set read count
    // (n - 1 substripes) by exactly one whenever g > 2. Exact for g = 2.
    assert!(
        failures.is_empty(),
        "global repair exceeds the data-node count by one substripe on g=3 instances: {unique:?}"
    );
}

#[test]
fn criterion_8_bound_compliance() {
    // randomized (n, k, alpha) grid with r | k, r | alpha, n <= 12
    let grid: &[(usize, usize, usize)] = &[
        (6, 4, 2),
        (6, 4, 4),
        (6, 3, 3),
        (8, 6, 2),
        (8, 6, 4),
        (8, 6, 8),
        (8, 4, 4),
        (9, 6, 3),
        (9, 6, 9),
        (10, 8, 2),
        (10, 8, 4),
        (10, 8, 16),
        (10, 5, 5),
        (12, 9, 3),
        (12, 9, 9),
        (12, 6, 6),
        (12, 8, 4),
    ];
    // GF(4096): large enough that random coefficient draws clear exhaustive
    // verification in a few attempts even at the biggest grid shapes
    let field = Field::new(12, 0x1053).unwrap();
    for &(n, k, alpha) in grid {
        let r = n - k;
        let spec = CodeSpec::build(n, k, alpha, field.clone(), (n * 100 + k * 10 + alpha) as u64)
            .unwrap_or_else(|e| panic!("build ({n},{k},{alpha}): {e}"));
        let bound = msr_bound(n, k, Ratio::from_int(k as i128)).unwrap(); // node units, d = n-1
        let optimal = alpha == r.pow(k.div_ceil(r) as u32);
        for j in 1..=k {
            let plan = plan_systematic_repair(&spec, j).unwrap();
            assert!(
                plan.metrics.gamma >= bound,
                "({n},{k},{alpha}) node {j}: gamma {} below bound {bound}",
                plan.metrics.gamma
            );
            if optimal {
                assert_eq!(
                    plan.metrics.gamma, bound,
                    "({n},{k},{alpha}) node {j}: row-set plan must attain the bound"
                );
            }
        }
    }
    println!(
        "criterion 8 (bound compliance): PASS — gamma >= (n-1)/(n-k) on {} grid codes, equality at full sub-packetization",
        grid.len()
    );
}

#[test]
fn criterion_9_simulator_orderings() {
    // (a) sub-packetized plans always move fewer bytes than the full-decode
    // plan of the alpha = 1 equivalent; with any positive transfer cost the
    // transfer-cost ordering follows.
    for alpha in [3usize, 6, 9] {
        let spec = if alpha == 9 {
            golden_9_6_code()
        } else {
            CodeSpec::build(9, 6, alpha, Field::gf256(), alpha as u64).unwrap()
        };
        for j in 1..=6 {
            let plan = plan_systematic_repair(&spec, j).unwrap();
            // node units: full decode reads k = 6 node units
            assert!(
                plan.metrics.gamma < Ratio::from_int(6),
                "alpha={alpha} node {j}"
            );
            // model-scaled transfer costs preserve the ordering for any
            // positive transfer rate and node size
            let mut state = (alpha * 7 + j) as u64 | 1;
            for _ in 0..8 {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let node_bytes = (state % 1_000_000 + 1) * 90; // divisible by 9 and 1..=90 MBish
                let rate = ((state >> 8) % 1_000_000 + 1) as f64;
                let ht = CostModel {
                    seek_time: 1e-9,
                    transfer_rate: rate,
                    substripe_size: node_bytes / alpha as u64,
                };
                let rs = CostModel {
                    seek_time: 1e-9,
                    transfer_rate: rate,
                    substripe_size: node_bytes,
                };
                let ht_transfer = ht.transfer_cost(&plan.metrics);
                // alpha = 1 full decode: k whole-node substripes
                let rs_metrics = htlrc_core::repair::RepairMetrics {
                    substripes: 6,
                    read_ops: 6,
                    gamma: Ratio::from_int(6),
                };
                let rs_transfer = rs.transfer_cost(&rs_metrics);
                assert!(
                    ht_transfer < rs_transfer,
                    "alpha={alpha} node {j}: {ht_transfer} !< {rs_transfer}"
                );
            }
        }
    }
    println!(
        "criterion 9a (sub-packetization beats full decode): PASS — strictly fewer bytes for alpha in {{3, 6, 9}}, every node"
    );

    // (b) under the small-seek calibration at the 10 MB substripe scale, the
    // three-group local repair beats the base sub-packetized plan while the
    // two-group local repair does not.
    let base = golden_9_6_code();
    let model = CostModel::seek_equivalent(9 * KB, 100.0 * MB as f64, 10 * MB);
    let two = golden_split(2);
    let three = golden_split(3);
    for j in 1..=6 {
        let msr = model.price(&plan_systematic_repair(&base, j).unwrap().metrics);
        let local2 = model.price(&plan_local_repair(&two, j).unwrap().metrics);
        let local3 = model.price(&plan_local_repair(&three, j).unwrap().metrics);
        assert!(
            local3 < msr,
            "node {j}: three-group local {local3} must beat the base plan {msr}"
        );
        assert!(
            local2 > msr,
            "node {j}: two-group local {local2} must not beat the base plan {msr}"
        );
    }
    println!(
        "criterion 9b (variant ordering at scale): PASS — (11,6) local beats the (9,6) plan, (10,6) local does not"
    );

    // the analytic curves agree with the measured plans they summarise
    let m = Ratio::from_int(6);
    let (l2, g2) = gamma_branches(9, 6, 2, 2, m).unwrap();
    assert_eq!(plan_local_repair(&two, 1).unwrap().metrics.gamma, l2);
    assert_eq!(plan_global_path_repair(&two, 1).unwrap().metrics.gamma, g2);
}
