use std::collections::BinaryHeap;

use crate::QuadError;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule: converged once `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 2000,
        }
    }

    pub const fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-13, 1e-11)
    }
}

/// Result of a quadrature: estimate, error estimate, integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, o: Integral) -> Integral {
        Integral {
            value: self.value + o.value,
            error: self.error + o.error,
            evals: self.evals + o.evals,
        }
    }
}

struct Cell {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite { x: c });
    }
    let mut rk = WGK[10] * fc;
    let mut rg = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let (x1, x2) = (c - dx, c + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite { x: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite { x: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        rk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * rk;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let asc = asc * h.abs();
    let value = rk * h;
    let mut err = ((rk - rg) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (1.0_f64).min((200.0 * err / asc).powf(1.5));
    }
    // Roundoff floor, as in QUADPACK.
    let floor = 50.0 * f64::EPSILON * (rk * h).abs();
    Ok((value, err.max(floor)))
}

/// Globally adaptive Gauss–Kronrod (G10/K21) integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Integral, QuadError> {
    adapt(&mut f, a, b, tol)
}

fn adapt<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Integral, QuadError> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let (v, e) = kronrod(f, a, b)?;
    let mut evals = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    while total_err > tol.target(total) {
        if heap.len() >= tol.max_intervals {
            return Err(QuadError::NotConverged {
                a,
                b,
                value: total,
                error: total_err,
                intervals: heap.len(),
            });
        }
        let cell = heap.pop().expect("heap is never empty");
        let m = 0.5 * (cell.a + cell.b);
        if m <= cell.a.min(cell.b) || m >= cell.a.max(cell.b) {
            // Interval cannot be split further in floating point.
            heap.push(cell);
            return Err(QuadError::NotConverged {
                a,
                b,
                value: total,
                error: total_err,
                intervals: heap.len(),
            });
        }
        let (v1, e1) = kronrod(f, cell.a, m)?;
        let (v2, e2) = kronrod(f, m, cell.b)?;
        evals += 42;
        total += v1 + v2 - cell.value;
        total_err += e1 + e2 - cell.error;
        heap.push(Cell {
            a: cell.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Cell {
            a: m,
            b: cell.b,
            value: v2,
            error: e2,
        });
        // Periodically resum to avoid drift in the running totals.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|c| c.value).sum();
            total_err = heap.iter().map(|c| c.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|c| c.value).sum();
    let error: f64 = heap.iter().map(|c| c.error).sum();
    Ok(Integral {
        value,
        error,
        evals,
    })
}

/// Integrates over consecutive intervals `[p_0,p_1], [p_1,p_2], ...`.
///
/// Breakpoints should sit on discontinuities or kinks of the integrand. The
/// tolerance is applied per piece with the absolute part split evenly.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    tol: Tolerance,
) -> Result<Integral, QuadError> {
    let mut out = Integral {
        value: 0.0,
        error: 0.0,
        evals: 0,
    };
    if points.len() < 2 {
        return Ok(out);
    }
    let pieces = (points.len() - 1) as f64;
    let piece_tol = Tolerance {
        abs: tol.abs / pieces,
        ..tol
    };
    for w in points.windows(2) {
        out = out + adapt(&mut f, w[0], w[1], piece_tol)?;
    }
    Ok(out)
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + (1 - u)/u`, `u ∈ (0, 1]`.
pub fn integrate_to_inf<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    tol: Tolerance,
) -> Result<Integral, QuadError> {
    let g = |u: f64| {
        let x = a + (1.0 - u) / u;
        let v = f(x) / (u * u);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}
