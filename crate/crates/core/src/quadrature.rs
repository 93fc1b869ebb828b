//! Globally adaptive 21-point Gauss–Kronrod integration over a set of
//! breakpoints, with an optional mapped tail to +∞.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_980_355,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Linear,
    /// ω = origin + scale·tan θ
    Tail { origin: f64, scale: f64 },
}

impl Map {
    fn to_omega(self, t: f64) -> f64 {
        match self {
            Map::Linear => t,
            Map::Tail { origin, scale } => origin + scale * t.tan(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    map: Map,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, map: Map) -> (f64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let g = |t: f64| match map {
        Map::Linear => f(t),
        Map::Tail { origin, scale } => {
            let c = t.cos();
            f(origin + scale * t.tan()) * scale / (c * c)
        }
    };
    let fc = g(centre);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = g(centre - dx) + g(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error.max(50.0 * f64::EPSILON * value.abs()))
}

impl Integrator {
    /// `∫ f` over `[knots[0], knots.last()]`, each knot a forced split point.
    /// Knots must be sorted and finite.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, knots: &[f64]) -> Result<Integral> {
        self.run(&f, knots, None)
    }

    /// `∫ f` over `[knots[0], ∞)`. The last knot starts the tail, which is
    /// mapped through `ω = L + scale·tan θ`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
        &self,
        f: F,
        knots: &[f64],
        scale: f64,
    ) -> Result<Integral> {
        self.run(&f, knots, Some(scale))
    }

    fn run<F: Fn(f64) -> f64>(&self, f: &F, knots: &[f64], tail: Option<f64>) -> Result<Integral> {
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        let mut push = |heap: &mut BinaryHeap<Piece>, lo: f64, hi: f64, map: Map| {
            let (value, error) = kronrod(f, lo, hi, map);
            evaluations += 21;
            heap.push(Piece { lo, hi, map, value, error });
        };
        for w in knots.windows(2) {
            if w[1] > w[0] {
                push(&mut heap, w[0], w[1], Map::Linear);
            }
        }
        if let (Some(scale), Some(&origin)) = (tail, knots.last()) {
            push(&mut heap, 0.0, FRAC_PI_2, Map::Tail { origin, scale });
        }

        loop {
            let (value, error) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target {
                return Ok(Integral { value, error, evaluations });
            }
            let worst = match heap.pop() {
                Some(p) => p,
                None => return Ok(Integral { value, error, evaluations }),
            };
            let mid = 0.5 * (worst.lo + worst.hi);
            let exhausted = heap.len() + 2 > self.max_intervals
                || !(mid > worst.lo && mid < worst.hi)
                || !worst.value.is_finite();
            if exhausted {
                return Err(Error::Quadrature {
                    lo: worst.map.to_omega(worst.lo),
                    hi: worst.map.to_omega(worst.hi),
                    error: worst.error,
                });
            }
            push(&mut heap, worst.lo, mid, worst.map);
            push(&mut heap, mid, worst.hi, worst.map);
        }
    }
}
