//! Patterson–Sullivan interpolation of a Poisson integral: the estimate
//! g_X(s, z; f)/g_X(s, z) and its unit-ball error for the atom μ = δ_1.

use psdpp::hypgeom::{BoundaryPoint, Point, C64};
use psdpp::psinterp::{ps_ratio, TestFunction};
use psdpp::sampler::{sample_hkpv, HkpvMode, HkpvSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = sample_hkpv(&HkpvSpec::new(1, 6.0, HkpvMode::Window), 3)?;
    let hardy = TestFunction::hardy_atomic(vec![BoundaryPoint::circle(0.0)], vec![1.0], vec![C64::new(1.0, 0.0)])?;
    let poisson = TestFunction::poisson(0.0);
    let z = Point::disk(0.4, 0.0)?;
    println!("{} points; P(z, 1) = {:.6}", x.len(), poisson.evaluate(&z)?.re);
    println!("   s     estimate   sup error");
    for s in [1.5, 1.3, 1.2, 1.1] {
        let scalar = ps_ratio(&x, s, &z, &poisson)?;
        let record = ps_ratio(&x, s, &z, &hardy)?;
        println!("{s:>5}   {:>9.6}   {:.6}", scalar.estimate.scalar().unwrap().re, record.error.unwrap());
    }
    Ok(())
}
