//! Adaptive Gauss–Kronrod (7/15) quadrature for real and complex integrands.

use crate::numeric::QuadValue;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point node with its Kronrod weight and its embedded Gauss weight (0 if none).
#[derive(Debug, Clone, Copy)]
pub struct PanelNode {
    pub x: f64,
    pub kronrod: f64,
    pub gauss: f64,
}

/// Nodes and weights of the Kronrod rule on `[a, b]`, weights already scaled.
pub fn gk15_panel(a: f64, b: f64) -> [PanelNode; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [PanelNode { x: c, kronrod: WGK[7] * h, gauss: WG[3] * h }; 15];
    for j in 0..7 {
        let g = if j % 2 == 1 { WG[j / 2] * h } else { 0.0 };
        out[2 * j] = PanelNode { x: c - h * XGK[j], kronrod: WGK[j] * h, gauss: g };
        out[2 * j + 1] = PanelNode { x: c + h * XGK[j], kronrod: WGK[j] * h, gauss: g };
    }
    out
}

fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let mut k = T::zero();
    let mut g = T::zero();
    for node in gk15_panel(a, b) {
        let v = f(node.x);
        k = k + v * node.kronrod;
        if node.gauss != 0.0 {
            g = g + v * node.gauss;
        }
    }
    (k, (k - g).magnitude())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 2000 }
    }
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive GK15 over `[a, b]` split initially at `breaks` (any order).
pub fn integrate_with_breaks<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> QuadResult<T> {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&c| c > a && c < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk15(&f, w[0], w[1]);
            heap.push(Piece { a: w[0], b: w[1], value, error });
        }
    }
    loop {
        let (total, err) = heap
            .iter()
            .fold((T::zero(), 0.0), |(s, e), p| (s + p.value, e + p.error));
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= tol || heap.len() >= opts.max_intervals {
            return QuadResult { value: total, error: err, intervals: heap.len(), converged: err <= tol };
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted in floating point
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
}

/// Globally adaptive GK15 over `[a, b]`.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult<T> {
    integrate_with_breaks(f, a, b, &[], opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x: f64| x.powi(6) - 3.0 * x, 0.0, 2.0, QuadOptions::default());
        assert!((r.value - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_complex() {
        let r = integrate(|t: f64| Complex64::new(0.0, 5.0 * t).exp(), 0.0, 10.0, QuadOptions::default());
        let exact = (Complex64::new(0.0, 50.0).exp() - 1.0) / Complex64::new(0.0, 5.0);
        assert!((r.value - exact).norm() < 1e-11);
        assert!(r.converged);
    }

    #[test]
    fn weights_sum_to_length() {
        let s: f64 = gk15_panel(1.0, 4.0).iter().map(|n| n.kronrod).sum();
        let g: f64 = gk15_panel(1.0, 4.0).iter().map(|n| n.gauss).sum();
        assert!((s - 3.0).abs() < 1e-14 && (g - 3.0).abs() < 1e-14);
    }

    #[test]
    fn breakpoint_kink() {
        let r = integrate_with_breaks(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], QuadOptions::default());
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }
}
