//! Match two networks that share latent positions, with no known seeds.

use graphon_match::evaluation::baseline_losses;
use graphon_match::graphon_model::{build_probability_matrix, sample_adjacency, sample_latents, Graphon};
use graphon_match::matcher::{match_graphs, MatcherConfig, Network};
use graphon_match::rng::stream;
use graphon_match::Permutation;

fn main() -> graphon_match::Result<()> {
    let n = 600;
    let mut rng = stream(11, "unseeded-example");
    let graphon = Graphon::gradient();
    let xi = sample_latents(n, &mut rng)?;
    let w = build_probability_matrix(&graphon, &xi)?;
    let a1 = sample_adjacency(&w, &mut rng);
    // hide the correspondence by relabeling the second network
    let hidden = Permutation::random(n, &mut rng);
    let a2 = sample_adjacency(&w, &mut rng).permuted(&hidden)?;
    let w2 = graphon_match::ProbabilityMatrix::new(hidden.conjugate(w.as_array())?)?;

    let cfg = MatcherConfig::default();
    let mut result = match_graphs(&a1, &a2, &cfg, &mut stream(11, "match"))?;
    let loss = result.evaluate(&w, &w2)?;
    let baseline = baseline_losses(
        &w.restrict(&result.retained.0),
        &w2.restrict(&result.retained.1),
        &mut stream(11, "baseline"),
        100,
    )?;
    println!("d = {} seeds, dropped {} nodes per network", result.d, result.dropped.0.len());
    println!("seeds in network 1: {:?}", result.seed_nodes(Network::First));
    println!("seeds in network 2: {:?}", result.seed_nodes(Network::Second));
    println!("block pairing {:?}, search cost {:.3}", result.q_tilde.as_slice(), result.enumeration_cost);
    println!("loss {loss:.4}; random matchings: median {:.4}, min {:.4}", baseline.median, baseline.min);

    // how close matched nodes are in latent position
    let gaps: Vec<f64> = result
        .pairs()
        .iter()
        .map(|&(i, j)| (xi.values()[i] - xi.values()[hidden[j]]).abs())
        .collect();
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    println!("mean latent gap of matched pairs {mean_gap:.3} (random pairs: 0.333)");
    Ok(())
}
