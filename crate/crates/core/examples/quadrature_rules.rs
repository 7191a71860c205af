//! Gauss–Jacobi rules and zonal integrals over spheres.

use sphere_dpp::quadrature::{gauss_jacobi_rule, jacobi_weight_mass, zonal_integral};

fn main() -> sphere_dpp::Result<()> {
    let rule = gauss_jacobi_rule(0.5, -0.5, 6)?;
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        println!("node {x:>20.16}  weight {w:.16}");
    }
    println!("sum of weights {:.16}, mass {:.16}", rule.weights().iter().sum::<f64>(), jacobi_weight_mass(0.5, -0.5)?);
    // mean of ⟨x, e⟩² over S^d is 1/(d+1)
    for d in 1..=5 {
        println!("S^{d}: mean of t^2 = {:.15}", zonal_integral(d, |t| t * t, 0.0, 0.0, 4)?);
    }
    Ok(())
}
