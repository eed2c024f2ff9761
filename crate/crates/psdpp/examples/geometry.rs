//! Bergman distances, Möbius involutions and the Poincaré mass.

use psdpp::hypgeom::{bergman_distance, disk, mobius_involution, poincare_mass, Point, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z = Point::disk(0.3, 0.4)?;
    let w = Point::disk(-0.5, 0.1)?;
    println!("d_B(z, w)        = {:.12}", bergman_distance(&z, &w)?);
    // φ_z swaps z and o and preserves distances
    let pz = mobius_involution(&w, &z)?;
    println!("d_B(o, φ_z(w))   = {:.12}", bergman_distance(&Point::origin(1), &pz)?);
    println!("disk::distance   = {:.12}", disk::distance(C64::new(0.3, 0.4), C64::new(-0.5, 0.1)));

    for (s, d) in [(1.001, 1), (2.0, 1), (2.001, 2), (3.5, 3)] {
        let g = poincare_mass(s, d)?;
        println!("d={d} s={s:<6} g_P = {g:.10}  (s-d) g_P = {:.7}", (s - d as f64) * g);
    }
    Ok(())
}
