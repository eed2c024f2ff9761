//! Coefficients of weighted Bergman kernels, and the diagonal of the
//! critical kernel against its logarithmic model.

use psdpp::kernels::{KernelCoeffs, WeightSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let crit = KernelCoeffs::for_range(&WeightSpec::critical(1), 0.99, 1e-9)?;
    let sup = KernelCoeffs::for_range(&WeightSpec::supercritical(0.5, 1)?, 0.99, 1e-9)?;
    println!("{} coefficients, a_0 = {:.12} (log 4 = {:.12})", crit.degree() + 1, crit.coeffs[0], 4f64.ln());
    for n in [1usize, 10, 100, 1000] {
        let model = (4.0 * (n as f64 + 1.0)).ln();
        println!("n={n:<5} a_n(W_cr)/log(4n+4) = {:.5}", crit.coeffs[n] / model);
    }
    println!("   t²    K_cr·(1-t²)/log(2/(1-t²))   K_0.5/K_cr");
    for t2 in [0.0, 0.5, 0.9, 0.99] {
        let kc = crit.eval_diag(t2)?.value;
        let ks = sup.eval_diag(t2)?.value;
        println!("{t2:>5}    {:>10.6}                  {:>8.5}", kc * (1.0 - t2) / (2.0 / (1.0 - t2)).ln(), ks / kc);
    }
    Ok(())
}
