//! The tempered functional α²∫|f|²(1-|x|²)^{α-1} separates the lacunary
//! witness from functions with tempered growth.

use psdpp::psinterp::{tempered_functional, TestFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fs = [
        ("1", TestFunction::one(1)),
        ("z^3", TestFunction::monomial(3)),
        ("Re z", TestFunction::real_part(1)),
        ("lacunary", TestFunction::lacunary()),
    ];
    println!("{:>10} {:>12} {:>12} {:>12}", "f", "α=0.1", "α=0.01", "α=0.001");
    for (name, f) in &fs {
        let v: Vec<f64> = [0.1, 0.01, 0.001].iter().map(|&a| tempered_functional(f, a)).collect::<Result<_, _>>()?;
        println!("{name:>10} {:>12.4e} {:>12.4e} {:>12.4e}", v[0], v[1], v[2]);
    }
    Ok(())
}
