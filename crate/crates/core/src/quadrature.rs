//! Globally adaptive 21-point Gauss–Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

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
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
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

/// Tolerances and budget of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<R> {
    pub value: R,
    pub error: R,
}

struct Panel<R> {
    a: R,
    b: R,
    value: R,
    error: R,
    resabs: R,
}

impl<R: Real> PartialEq for Panel<R> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<R: Real> Eq for Panel<R> {}

impl<R: Real> PartialOrd for Panel<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<R: Real> Ord for Panel<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn rescale_error<R: Real>(err: R, resabs: R, resasc: R) -> R {
    let mut scaled = err.abs();
    if resasc != R::zero() && scaled != R::zero() {
        let scale = (R::lit(200.0) * scaled / resasc).powf(R::lit(1.5));
        scaled = if scale < R::one() {
            resasc * scale
        } else {
            resasc
        };
    }
    let floor = R::lit(50.0) * R::epsilon() * resabs;
    if resabs > R::min_positive_value() / (R::lit(50.0) * R::epsilon()) && floor > scaled {
        scaled = floor;
    }
    scaled
}

fn kronrod21<R: Real, F: Fn(R) -> R>(f: &F, a: R, b: R) -> Panel<R> {
    let half = R::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let f_center = f(center);

    let mut res_gauss = R::zero();
    let mut res_kronrod = f_center * R::lit(WGK[10]);
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [R::zero(); 10];
    let mut fv2 = [R::zero(); 10];

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half_len * R::lit(XGK[jtw]);
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss = res_gauss + R::lit(WG[j]) * (f1 + f2);
        res_kronrod = res_kronrod + R::lit(WGK[jtw]) * (f1 + f2);
        res_abs = res_abs + R::lit(WGK[jtw]) * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half_len * R::lit(XGK[jtwm1]);
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod = res_kronrod + R::lit(WGK[jtwm1]) * (f1 + f2);
        res_abs = res_abs + R::lit(WGK[jtwm1]) * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * half;
    let mut res_asc = R::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + R::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half_len;
    let abs_len = half_len.abs();
    let resabs = res_abs * abs_len;
    Panel {
        a,
        b,
        value: res_kronrod * half_len,
        error: rescale_error(err, resabs, res_asc * abs_len),
        resabs,
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<R, F>(f: F, a: R, b: R, opts: &QuadratureOptions) -> Result<Estimate<R>>
where
    R: Real,
    F: Fn(R) -> R,
{
    integrate_with_breakpoints(f, &[a, b], opts)
}

/// Integrates `f` over `[p_0, p_last]`, seeding one panel per consecutive
/// pair of points so that kinks and narrow features start on a panel edge.
pub fn integrate_with_breakpoints<R, F>(
    f: F,
    points: &[R],
    opts: &QuadratureOptions,
) -> Result<Estimate<R>>
where
    R: Real,
    F: Fn(R) -> R,
{
    if points.len() < 2 {
        return Ok(Estimate {
            value: R::zero(),
            error: R::zero(),
        });
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] != w[0] {
            heap.push(kronrod21(&f, w[0], w[1]));
        }
    }
    let abs_tol = R::lit(opts.abs_tol);
    let rel_tol = R::lit(opts.rel_tol);
    let mut subdivisions = heap.len();

    loop {
        let value: R = heap.iter().map(|p| p.value).sum();
        let error: R = heap.iter().map(|p| p.error).sum();
        let resabs: R = heap.iter().map(|p| p.resabs).sum();
        let target = abs_tol.max(rel_tol * value.abs());
        let roundoff = R::lit(100.0) * R::epsilon() * resabs;
        if error <= target || error <= roundoff {
            return Ok(Estimate { value, error });
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: value.as_f64(),
                error: error.as_f64(),
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(Estimate { value, error });
        };
        let mid = (worst.a + worst.b) * R::lit(0.5);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel cannot be split further at this precision.
            heap.push(Panel {
                error: R::zero(),
                ..worst
            });
            continue;
        }
        heap.push(kronrod21(&f, worst.a, mid));
        heap.push(kronrod21(&f, mid, worst.b));
        subdivisions += 1;
    }
}
