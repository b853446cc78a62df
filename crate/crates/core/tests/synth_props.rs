//! Planted-structure recoverability of the generator.

use segnet_core::community::{adjusted_rand_index, label_propagation};
use segnet_core::corpus::filter_field_year;
use segnet_core::graph::{build_graph, StrengthDivisor, WeightingScheme};
use segnet_core::synth::{generate, SynthConfig};

/// At low mixing, label propagation should recover the planted teams with
/// high adjusted agreement on most seeds (statistical acceptance, not
/// per-run).
#[test]
fn label_propagation_recovers_planted_teams() {
    let mut good = 0;
    for seed in 0..10u64 {
        let config = SynthConfig {
            n_teams: 12,
            team_size_range: (4, 7),
            papers_per_team_range: (8, 14),
            authors_per_paper_range: (2, 4),
            mixing: 0.05,
            citation_rate: 0.0,
            window_end: 2011,
            seed,
            ..Default::default()
        };
        let out = generate(&config).unwrap();
        let focal = filter_field_year(&out.set, "CS", 2011);
        let g = build_graph(
            &focal,
            WeightingScheme::Strength,
            StrengthDivisor::CoauthorsMinusOne,
        );
        let truth: Vec<usize> = (0..g.n_nodes()).map(|v| out.team_of[g.id_of(v)]).collect();
        let p = label_propagation(&g, seed.wrapping_add(1000), 200);
        let ari = adjusted_rand_index(&truth, &p.assignment);
        if ari >= 0.9 {
            good += 1;
        }
    }
    assert!(
        good >= 8,
        "only {good}/10 seeds recovered the planted teams"
    );
}
