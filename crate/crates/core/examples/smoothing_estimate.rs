//! Estimate edge probabilities from one adjacency matrix and watch the
//! column error shrink with n.

use graphon_match::graphon_model::{build_probability_matrix, sample_adjacency, sample_latents, Graphon};
use graphon_match::rng::stream;
use graphon_match::smoothing::{estimate_probabilities, max_column_error, SmoothingConfig};

fn main() -> graphon_match::Result<()> {
    let graphon = Graphon::sinusoidal();
    for c0 in [0.5, 1.0, 2.0] {
        let cfg = SmoothingConfig {
            bandwidth_constant: c0,
            ..Default::default()
        };
        for n in [100, 200, 400, 800] {
            let mut rng = stream(7, &format!("smoothing-{n}"));
            let xi = sample_latents(n, &mut rng)?;
            let w = build_probability_matrix(&graphon, &xi)?;
            let a = sample_adjacency(&w, &mut rng);
            let w_hat = estimate_probabilities(&a, &cfg)?;
            let err = max_column_error(&w_hat, &w)?;
            let rate = ((n as f64).ln() / n as f64).sqrt();
            println!("C0={c0:<4} n={n:<5} h={:.3} error={err:.4} error/rate={:.3}", cfg.quantile(n), err / rate);
        }
    }
    Ok(())
}
