//! Match a 400-node network into a 520-node one.

use graphon_match::graphon_model::{build_probability_matrix, sample_adjacency, sample_latents, Graphon, LatentPositions};
use graphon_match::matcher::{match_unequal, MatcherConfig};
use graphon_match::rng::stream;

fn main() -> graphon_match::Result<()> {
    let mut rng = stream(5, "unequal-example");
    let graphon = Graphon::sinusoidal();
    let xi = sample_latents(520, &mut rng)?;
    let small = LatentPositions::new(xi.values()[..400].to_vec())?;
    let w_small = build_probability_matrix(&graphon, &small)?;
    let w_big = build_probability_matrix(&graphon, &xi)?;
    let a_small = sample_adjacency(&w_small, &mut rng);
    let a_big = sample_adjacency(&w_big, &mut rng);

    let mut out = match_unequal(&a_small, &a_big, &MatcherConfig::default(), &mut stream(5, "match"))?;
    let loss = out.result.evaluate(&w_small, &w_big)?;
    println!("larger network: {:?}, subsampled {} nodes", out.larger, out.subsample.len());
    println!("loss on the matched subnetwork {loss:.4} with d = {}", out.result.d);
    let mut per_group = vec![0; out.result.d];
    for e in &out.extension {
        per_group[e.group] += 1;
    }
    println!("{} leftover nodes placed into groups: {per_group:?}", out.extension.len());
    for e in out.extension.iter().take(5) {
        println!("  node {} -> group {} (partner {} in the smaller network)", e.node, e.group, e.partner);
    }
    Ok(())
}
