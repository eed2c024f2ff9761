//! Geometry of the unit ball `D_d ⊂ C^d` with its Bergman metric.
//!
//! Points are stored as raw complex coordinates in the ball model. The
//! operations on [`Point`] work in any dimension; [`disk`] repeats the hot
//! ones for `d = 1` on bare [`C64`] values so inner loops avoid allocation.

use num_complex::Complex64;

pub mod disk;
mod measure;

pub use measure::{ball_volume, ball_volume_scaled, poincare_mass, poincare_mass_disk};

pub type C64 = Complex64;

/// Below this squared norm the involution `φ_w` is taken to be `z ↦ -z`.
pub const ORIGIN_EPS: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point outside the open unit ball (|z|^2 = {0})")]
    OutsideBall(f64),
    #[error("boundary point not on the unit sphere (|ζ|^2 = {0})")]
    NotOnSphere(f64),
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

/// A point of the open unit ball in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<C64>,
}

impl Point {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GeomError::Argument("dimension must be at least 1".into()));
        }
        let n2: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if !(n2 < 1.0) {
            return Err(GeomError::OutsideBall(n2));
        }
        Ok(Point { coords })
    }

    pub fn origin(d: usize) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        Point {
            coords: vec![C64::new(0.0, 0.0); d],
        }
    }

    /// The `d = 1` point `re + i·im`.
    pub fn disk(re: f64, im: f64) -> Result<Self> {
        Point::new(vec![C64::new(re, im)])
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian product `⟨self, w⟩ = Σ self_i · conj(w_i)`.
    pub fn dot(&self, w: &Point) -> C64 {
        dot(&self.coords, &w.coords)
    }
}

/// A point of the unit sphere `S_d = ∂D_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    coords: Vec<C64>,
}

impl BoundaryPoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        let n2: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if coords.is_empty() || (n2 - 1.0).abs() > 1e-12 {
            return Err(GeomError::NotOnSphere(n2));
        }
        Ok(BoundaryPoint { coords })
    }

    /// `e^{iθ}` on the unit circle.
    pub fn circle(theta: f64) -> Self {
        BoundaryPoint {
            coords: vec![C64::from_polar(1.0, theta)],
        }
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Hyperbolic ball `B(center, radius)`; annuli are differences of two.
#[derive(Debug, Clone, PartialEq)]
pub struct BallRegion {
    pub center: Point,
    pub radius: f64,
}

impl BallRegion {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(GeomError::Argument(format!("radius {radius}")));
        }
        Ok(BallRegion { center, radius })
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        Ok(bergman_distance(x, &self.center)? < self.radius)
    }

    /// Euclidean radius of `B(o, r)`.
    pub fn euclidean_radius_at_origin(&self) -> f64 {
        (0.5 * self.radius).tanh()
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn same_dim(a: &Point, b: &Point) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(GeomError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

/// The involution `φ_w` of the ball exchanging `w` and the origin.
pub fn mobius_involution(w: &Point, z: &Point) -> Result<Point> {
    same_dim(w, z)?;
    let w2 = w.norm_sqr();
    if w2 < ORIGIN_EPS {
        return Ok(Point {
            coords: z.coords.iter().map(|c| -c).collect(),
        });
    }
    let zw = z.dot(w);
    let s = (1.0 - w2).sqrt();
    let denom = C64::new(1.0, 0.0) - zw;
    let coords = w
        .coords
        .iter()
        .zip(&z.coords)
        .map(|(wi, zi)| {
            let p = wi * (zw / w2);
            (wi - p - (zi - p) * s) / denom
        })
        .collect();
    Ok(Point { coords })
}

/// `1 - |φ_z(x)|²`, computed without cancellation.
pub fn one_minus_mobius_norm_sqr(x: &Point, z: &Point) -> Result<f64> {
    same_dim(x, z)?;
    let d = (C64::new(1.0, 0.0) - x.dot(z)).norm_sqr();
    Ok((1.0 - z.norm_sqr()) * (1.0 - x.norm_sqr()) / d)
}

/// Bergman distance `log((1+|φ_z(x)|)/(1-|φ_z(x)|))`.
pub fn bergman_distance(x: &Point, z: &Point) -> Result<f64> {
    let q = one_minus_mobius_norm_sqr(x, z)?;
    if q > 0.5 {
        let p = mobius_involution(z, x)?.norm();
        Ok(2.0 * p.atanh())
    } else {
        let p = (1.0 - q).sqrt();
        Ok(((1.0 + p) * (1.0 + p) / q).ln())
    }
}

/// Index `k` of the annulus `A_k(z) = {k ≤ d_B(x, z) < k + 1}` containing `x`.
pub fn annulus_index(x: &Point, z: &Point) -> Result<u64> {
    Ok(bergman_distance(x, z)?.floor() as u64)
}

/// `|LHS - RHS|` of `1 - φ_z(x)·conj(φ_z(y)) = (1-|z|²)(1-x·ȳ)/((1-x·z̄)(1-z·ȳ))`.
pub fn mobius_kernel_identity_residual(x: &Point, y: &Point, z: &Point) -> Result<f64> {
    same_dim(x, y)?;
    same_dim(x, z)?;
    let one = C64::new(1.0, 0.0);
    let px = mobius_involution(z, x)?;
    let py = mobius_involution(z, y)?;
    let lhs = one - px.dot(&py);
    let rhs = (1.0 - z.norm_sqr()) * (one - x.dot(y)) / ((one - x.dot(z)) * (one - z.dot(y)));
    Ok((lhs - rhs).norm())
}

/// Density `(1-|z|²)^{-(d+1)}` of the invariant measure against `dv_d`.
pub fn invariant_density(z: &Point) -> f64 {
    (1.0 - z.norm_sqr()).powi(-(z.dim() as i32 + 1))
}

/// Poisson–Szegő kernel `(1-|z|²)^d / |1 - ζ·z̄|^{2d}`.
pub fn poisson_kernel(z: &Point, zeta: &BoundaryPoint) -> Result<f64> {
    if z.dim() != zeta.dim() {
        return Err(GeomError::DimensionMismatch(z.dim(), zeta.dim()));
    }
    let d = z.dim() as i32;
    let den = (C64::new(1.0, 0.0) - dot(&zeta.coords, &z.coords)).norm_sqr();
    Ok(((1.0 - z.norm_sqr()) / den).powi(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_branch() {
        let o = Point::origin(2);
        let z = Point::new(vec![C64::new(0.1, 0.2), C64::new(-0.3, 0.1)]).unwrap();
        let p = mobius_involution(&o, &z).unwrap();
        assert_eq!(p.coords(), &[-z.coords()[0], -z.coords()[1]]);
    }

    #[test]
    fn swaps_w_and_origin() {
        let w = Point::disk(0.5, 0.0).unwrap();
        assert!(mobius_involution(&w, &w).unwrap().norm() < 1e-15);
        let o = Point::origin(1);
        assert!((mobius_involution(&w, &o).unwrap().coords()[0] - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Point::disk(1.0, 0.0).is_err());
        let a = Point::origin(1);
        let b = Point::origin(2);
        assert_eq!(bergman_distance(&a, &b), Err(GeomError::DimensionMismatch(1, 2)));
        assert!(BoundaryPoint::new(vec![C64::new(0.9, 0.0)]).is_err());
    }

    #[test]
    fn distance_at_tanh_one() {
        let o = Point::origin(1);
        let x = Point::disk(1.0f64.tanh(), 0.0).unwrap();
        assert!((bergman_distance(&o, &x).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(bergman_distance(&o, &o).unwrap(), 0.0);
    }

    #[test]
    fn annulus_half_open() {
        let o = Point::origin(1);
        let at = |r: f64| Point::disk((0.5 * r).tanh(), 0.0).unwrap();
        assert_eq!(annulus_index(&o, &o).unwrap(), 0);
        assert_eq!(annulus_index(&at(1.5), &o).unwrap(), 1);
        assert_eq!(annulus_index(&at(3.0 + 1e-12), &o).unwrap(), 3);
    }

    #[test]
    fn density_values() {
        assert_eq!(invariant_density(&Point::origin(3)), 1.0);
        let h = 0.5f64.sqrt();
        assert!((invariant_density(&Point::disk(h, 0.0).unwrap()) - 4.0).abs() < 1e-12);
        let z = Point::new(vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0)]).unwrap();
        assert!((invariant_density(&z) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_at_origin() {
        let zeta = BoundaryPoint::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        assert!((poisson_kernel(&Point::origin(2), &zeta).unwrap() - 1.0).abs() < 1e-15);
    }
}
