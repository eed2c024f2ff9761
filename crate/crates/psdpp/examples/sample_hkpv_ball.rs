//! The Bergman process on the ball of C² by the projection sampler, and the
//! archive format.

use psdpp::sampler::{sample_hkpv, Configuration, HkpvMode, HkpvSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = HkpvSpec::new(2, 3.0, HkpvMode::Window);
    let x = sample_hkpv(&spec, 1)?;
    // μ(B(o, r)) = sinh⁴(r/2) in C²
    let counts: Vec<usize> = (0..100).map(|s| sample_hkpv(&spec, s).map(|c| c.count_in_ball(2.0))).collect::<Result<_, _>>()?;
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    println!("{} points; mean count in B(o,2) over 100 draws {mean:.3}, expected {:.3}", x.len(), 1f64.sinh().powi(4));
    let text = x.to_archive();
    for line in text.lines().take(4) {
        println!("| {line}");
    }
    assert_eq!(Configuration::from_archive(&text)?, x);
    Ok(())
}
