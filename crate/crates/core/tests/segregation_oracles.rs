//! Spectral index checked against a dense symmetric eigensolver oracle.
//!
//! The community transition block B = D^{-1} W (restricted rows/columns, full
//! row sums) is similar to the symmetric matrix D^{-1/2} W D^{-1/2}, so its
//! dominant eigenvalue can be recovered independently with nalgebra's
//! SymmetricEigen. The oracle path shares no code with the power iteration.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use segnet_core::corpus::{PublicationRecord, PublicationSet};
use segnet_core::graph::{build_graph, CoauthorGraph, NodeId, StrengthDivisor, WeightingScheme};
use segnet_core::segregation::{community_submatrix, ssi, SsiOptions, TransitionView};

fn random_corpus(seed: u64, n_authors: usize, n_papers: usize, max_k: usize) -> PublicationSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<String> = (0..n_authors).map(|i| format!("r{i:03}")).collect();
    let mut records = Vec::new();
    for p in 0..n_papers {
        let k = rng.gen_range(2..=max_k);
        let mut authors: Vec<String> = Vec::new();
        while authors.len() < k {
            let candidate = pool[rng.gen_range(0..n_authors)].clone();
            if !authors.contains(&candidate) {
                authors.push(candidate);
            }
        }
        records.push(PublicationRecord {
            paper_id: format!("p{p:04}"),
            year: 2011,
            field: "CS".into(),
            authors,
            cited_paper_ids: vec![],
        });
    }
    PublicationSet::from_records(records).unwrap()
}

/// Dominant eigenvalue of the community block via the symmetric similarity
/// transform and a dense QR eigensolver.
fn dense_oracle_lambda(g: &CoauthorGraph, members: &[NodeId]) -> f64 {
    let n = members.len();
    let row_sums: Vec<f64> = members
        .iter()
        .map(|&v| g.neighbors(v).iter().map(|&(_, w)| w).sum())
        .collect();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let w = g.weight(members[i], members[j]);
            if w != 0.0 {
                s[(i, j)] = w / (row_sums[i] * row_sums[j]).sqrt();
            }
        }
    }
    let eigen = nalgebra::SymmetricEigen::new(s);
    eigen
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn random_community(rng: &mut ChaCha8Rng, g: &CoauthorGraph, max_size: usize) -> Vec<NodeId> {
    let size = rng.gen_range(1..=max_size.min(g.n_nodes()));
    let mut members = Vec::new();
    let mut guard = 0;
    while members.len() < size && guard < 10_000 {
        guard += 1;
        let v = rng.gen_range(0..g.n_nodes());
        if g.degree(v) > 0 && !members.contains(&v) {
            members.push(v);
        }
    }
    members.sort_unstable();
    members
}

#[test]
fn ssi_matches_dense_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let opts = SsiOptions::default();
    let mut checked = 0;
    for seed in 0..5 {
        let set = random_corpus(seed, 40, 80, 5);
        let g = build_graph(
            &set,
            WeightingScheme::Strength,
            StrengthDivisor::CoauthorsMinusOne,
        );
        let view = TransitionView::new(&g);
        for _ in 0..12 {
            let members = random_community(&mut rng, &g, 12);
            if members.is_empty() {
                continue;
            }
            let sub = community_submatrix(&view, &members).unwrap();
            let got = ssi(&sub, &opts).unwrap();
            let oracle = dense_oracle_lambda(&g, &members);
            assert!(
                (got - oracle).abs() < 1e-8,
                "seed {seed}, members {members:?}: {got} vs oracle {oracle}"
            );
            assert!(
                (0.0..=1.0 + 1e-12).contains(&got),
                "Perron bound violated: {got}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 50);
}

#[test]
fn perron_bound_on_random_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for seed in 20..25 {
        let set = random_corpus(seed, 30, 50, 4);
        let g = build_graph(
            &set,
            WeightingScheme::Strength,
            StrengthDivisor::CoauthorsMinusOne,
        );
        let k = rng.gen_range(2..6);
        let labels: Vec<usize> = (0..g.n_nodes()).map(|_| rng.gen_range(0..k)).collect();
        let p = segnet_core::community::CommunityPartition::from_labels(&labels, "manual", 0, true);
        let report = segnet_core::segregation::ssi_all(&g, &p, &SsiOptions::default());
        for e in &report.entries {
            assert!(
                e.raw_ssi >= -1e-12 && e.raw_ssi <= 1.0 + 1e-12,
                "community {} out of Perron range: {}",
                e.community,
                e.raw_ssi
            );
        }
    }
}
