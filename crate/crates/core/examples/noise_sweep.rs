//! Entropy of a noisy sinusoid on a random geometric graph as the noise
//! probability grows.

use std::f64::consts::PI;

use graphent::dispersion_entropy_graph;
use graphent::entropy::{ColumnStats, EntropyParams};
use graphent::generators::{mix_signal, rgg, RggOptions, SeedSequence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds = SeedSequence::new(1);
    let gg = rgg(500, 2, 0.08, RggOptions::default(), &mut seeds.rng("graph", 0))?;
    let params = EntropyParams::new(3, 1, 3)?.with_stats(ColumnStats::PerColumn);
    println!("p\tentropy");
    for step in 0..=5 {
        let p = step as f64 / 5.0;
        let x = mix_signal(&gg, p, 2.0 * PI, &mut seeds.rng("signal", 0))?;
        let r = dispersion_entropy_graph(&gg.graph, &x, &params)?;
        println!("{p:.1}\t{:.4}", r.value);
    }
    Ok(())
}
