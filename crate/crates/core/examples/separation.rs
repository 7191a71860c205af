//! Close pairs and separation of the harmonic ensemble against the bound on
//! the expected number of close pairs.

use sphere_dpp::sampling::{run_trials, sample_dpp};
use sphere_dpp::stats::{
    close_pair_count, close_pairs_threshold, expected_close_pairs, expected_close_pairs_bound, separation,
};
use sphere_dpp::HarmonicEnsemble;

fn main() -> sphere_dpp::Result<()> {
    let e = HarmonicEnsemble::new(2, 8)?;
    let t = 0.8 * close_pairs_threshold(&e);
    let draws = run_trials(300, 5, |rng| {
        let x = sample_dpp(&e, rng)?;
        Ok((close_pair_count(&x, t) as f64, separation(&x)?))
    })?;
    let mean_g = draws.iter().map(|v| v.0).sum::<f64>() / draws.len() as f64;
    let min_sep = draws.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    println!("t = {t:.5}");
    println!("mean close pairs {mean_g:.4}, exact {:.4}, bound {:.4}", expected_close_pairs(&e, t)?, expected_close_pairs_bound(&e, t)?);
    println!("smallest separation over {} draws: {min_sep:.5}", draws.len());
    Ok(())
}
