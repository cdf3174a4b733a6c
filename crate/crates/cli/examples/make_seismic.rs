//! Writes a synthetic stand-in for the `gdenergy`/`gdpuls` columns of the
//! seismic-bumps data: 670 rows of integer percentage deviations with a
//! heavy right tail and strong correlation between the two columns.
//!
//! ```text
//! cargo run -p ocsvm-rules-cli --example make_seismic -- data/seismic.csv
//! ```

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const ROWS: usize = 670;

fn main() -> std::io::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/seismic.csv".into());
    let seed: u64 = std::env::args().nth(2).map_or(8, |s| s.parse().expect("seed"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
    writeln!(out, "gdenergy,gdpuls")?;
    for _ in 0..ROWS {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let z2 = 0.75 * z1 + (1.0 - 0.75f64 * 0.75).sqrt() * z2;
        // Shifted log-normal: a deviation of -100% is the floor.
        let energy = -100.0 + 95.0 * (0.6 * z1).exp();
        let puls = -100.0 + 97.0 * (0.5 * z2).exp();
        writeln!(out, "{},{}", energy.round(), puls.round())?;
    }
    Ok(())
}
