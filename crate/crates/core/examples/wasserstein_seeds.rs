//! How well do d random seed positions, each repeated n/d times, represent
//! the whole latent sample?

use rand::seq::index;
use rand::Rng;

use graphon_match::rng::stream;
use graphon_match::wasserstein::{
    oracle_latent_permutation, replicate_sample, w2_distance, EmpiricalSample,
};

fn main() -> graphon_match::Result<()> {
    let n = 4096;
    let mut rng = stream(3, "wasserstein-example");
    let latents: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let full = EmpiricalSample::new(latents.clone())?;
    for d in [4, 16, 64, 256, 1024] {
        let picks = index::sample(&mut rng, n, d);
        let seeds = EmpiricalSample::new(picks.iter().map(|i| latents[i]).collect())?;
        let w = w2_distance(&full, &replicate_sample(&seeds, n / d)?)?;
        println!("d={d:<5} W2={w:.5} W2*sqrt(d)={:.3}", w * (d as f64).sqrt());
    }

    let x = EmpiricalSample::new(vec![0.9, 0.1, 0.5])?;
    let y = EmpiricalSample::new(vec![0.2, 0.6, 0.8])?;
    let sigma = oracle_latent_permutation(&x, &y)?;
    println!("monotone coupling of {:?} onto {:?}: {:?}", x.values(), y.values(), sigma.as_slice());
    Ok(())
}
