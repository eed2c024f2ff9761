//! Zeros of the hyperbolic Gaussian analytic function in a window, with
//! first and second order count statistics.

use psdpp::sampler::{sample_gaf, validate_statistics, GafSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = GafSpec::new(3.0);
    let x = sample_gaf(&spec, 7)?;
    println!("seed 7: {} zeros in B(o, 3), degree {}", x.len(), x.meta.degree);
    for p in x.points.iter().take(3) {
        println!("  {:.6}", p.coords()[0]);
    }
    let configs = (0..200).map(|s| sample_gaf(&spec, s)).collect::<Result<Vec<_>, _>>()?;
    let r = validate_statistics(&configs, &[1.0, 2.0])?;
    for b in &r.radii {
        println!(
            "B(o,{}): mean {:.4} (expect {:.4}, z = {:+.2}), variance {:.4} (expect {:.4})",
            b.radius, b.mean, b.expected_mean, b.mean_z, b.variance, b.expected_variance
        );
    }
    Ok(())
}
