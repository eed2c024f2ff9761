//! The variance of the kernel-valued statistic g^R_X(z; K(·, x)) by two
//! routes, and the impossibility ratio Var/(g^R_P)² ≥ 1/128.

use psdpp::hypgeom::Point;
use psdpp::kernels::RadialProfile;
use psdpp::variance::{identity_iz, identity_iz_angular, impossibility_ratio, residue_jz_check};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [RadialProfile::indicator(1.5), RadialProfile::bump(2.5), RadialProfile::indicator(5.0)] {
        for z in [0.0, 0.5] {
            let zp = Point::disk(z, 0.0)?;
            let a = identity_iz(&p, &zp)?.value;
            let b = identity_iz_angular(&p, &zp)?.value;
            let r = impossibility_ratio(&p, &zp)?;
            println!("{:<14} z={z}: {a:.10} {b:.10}  ratio {r:.4} (1/128 = {:.4})", p.label(), 1.0 / 128.0);
        }
    }
    let (quad, closed) = residue_jz_check(0.7, 0.5, &Point::disk(0.2, -0.3)?)?;
    println!("J_z: trapezoid {quad:.12}, residue {closed:.12}");
    Ok(())
}
