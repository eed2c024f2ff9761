//! Annulus-by-annulus accumulation of a weighted Poincaré series and its
//! tail bounds.

use psdpp::hypgeom::Point;
use psdpp::psinterp::{poincare_series, ps_weighted_sum, TestFunction, CSV_HEADER};
use psdpp::sampler::{sample_hkpv, HkpvMode, HkpvSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = sample_hkpv(&HkpvSpec::new(1, 5.0, HkpvMode::Window), 0)?;
    let o = Point::origin(1);
    let p = poincare_series(&x, 1.3, &o)?;
    println!("g_X(1.3, o) = {:.6} over {} points, outside-window bound {:.3e}", p.value, p.count, p.tail_bound);
    let e = ps_weighted_sum(&x, 1.3, &o, &TestFunction::real_part(1), None)?;
    for b in &e.annular {
        println!("A_{}: {:>3} points  g = {:.5}", b.k, b.count, b.g);
    }
    println!("{CSV_HEADER}\n{}", e.csv_row()?);
    Ok(())
}
