//! Draw pairs of networks from a few graphons and latent couplings.

use graphon_match::graphon_model::{
    build_probability_matrix, couple_latents, sample_adjacency, sample_latents, CouplingMode,
    Graphon,
};
use graphon_match::rng::StreamSeed;

fn main() -> graphon_match::Result<()> {
    let n = 300;
    let graphons = [
        ("gradient", Graphon::gradient()),
        ("sinusoidal", Graphon::sinusoidal()),
        (
            "two blocks",
            Graphon::equal_blocks(vec![vec![0.6, 0.1], vec![0.1, 0.4]])?,
        ),
    ];
    let couplings = [
        CouplingMode::Identical,
        CouplingMode::ComonotoneNoise { rho: 0.8 },
        CouplingMode::Independent,
    ];
    let root = StreamSeed::new(42);
    println!("{:<12} {:<32} {:>8} {:>8} {:>10}", "graphon", "coupling", "edges1", "edges2", "corr(xi,eta)");
    for (name, graphon) in &graphons {
        for coupling in couplings {
            let seed = root.child(name).child(&format!("{coupling:?}"));
            let xi = sample_latents(n, &mut seed.child("latents").rng())?;
            let eta = couple_latents(&xi, coupling, &mut seed.child("coupling").rng())?;
            let w1 = build_probability_matrix(graphon, &xi)?;
            let w2 = build_probability_matrix(graphon, &eta)?;
            let mut rng = seed.child("adjacency").rng();
            let a1 = sample_adjacency(&w1, &mut rng);
            let a2 = sample_adjacency(&w2, &mut rng);
            println!(
                "{name:<12} {:<32} {:>8} {:>8} {:>10.3}",
                format!("{coupling:?}"),
                a1.edge_count(),
                a2.edge_count(),
                correlation(xi.values(), eta.values())
            );
        }
    }
    Ok(())
}

fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let vy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    cov / (vx * vy).sqrt()
}
