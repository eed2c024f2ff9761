//! The radial moment ratio U/V, the divergent lower-bound functional and the
//! d ≥ 2 cross-term diagnostic.

use psdpp::variance::{claim_a_uv, pluri_ratio_bound, pluri_ratio_limit, sharp_functional};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, s) in [(0, 1.0), (0, 2.0), (10, 1.5), (200, 1.0)] {
        let c = claim_a_uv(n, s)?;
        println!("n={n:<3} s={s}: U={:.6e} V={:.6e} U/V={:.5}", c.u, c.v, c.ratio);
    }
    for s in [1.25, 2.0] {
        let v: Vec<String> = [5, 10, 20, 40].iter().map(|&n| sharp_functional(s, n).map(|x| format!("{x:.4e}"))).collect::<Result<_, _>>()?;
        println!("s={s}: lower bound at N = 5, 10, 20, 40: {}", v.join("  "));
    }
    for n in [10, 100, 1000] {
        println!("|n|={n:<4} pluri_ratio_bound(s=2.5, d=2) = {:.8}", pluri_ratio_bound(n, 2.5, 2)?);
    }
    println!("limit B(3, 3) = {:.8}", pluri_ratio_limit(2.5, 2));
    Ok(())
}
