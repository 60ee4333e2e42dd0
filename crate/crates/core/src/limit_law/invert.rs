//! Numerical inversion `F(y) = 1/2 - (1/pi) int_0^T Im(e^{-i tau y} phi(tau))/tau dtau`.

use super::cf::CharacteristicFunction;
use crate::error::{Error, Result};
use crate::numeric::fmt17;
use crate::quadrature::{gk15_panel, integrate, integrate_with_breaks, QuadOptions};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

/// Below this `tau` the integrand is frozen at its value here.
const TAU_FLOOR: f64 = 1e-6;

/// Magnitude above which `phi` is considered not to decay by `T`.
const DECAY_LIMIT: f64 = 0.5;

fn integrand(phi: Complex64, tau: f64, y: f64) -> f64 {
    (Complex64::from_polar(1.0, -tau * y) * phi).im / tau
}

/// Refuses when `|phi|` is still large near the cutoff.
pub fn check_decay<C: CharacteristicFunction + ?Sized>(cf: &C, t_int: f64) -> Result<()> {
    for k in 0..=10 {
        let tau = t_int * (0.9 + 0.01 * k as f64);
        let m = cf.eval(tau).norm();
        if m >= DECAY_LIMIT {
            return Err(Error::InsufficientDecay { tau, magnitude: m });
        }
    }
    Ok(())
}

/// Value of `F(y)` with its error components.
#[derive(Debug, Clone, Copy)]
pub struct Inversion {
    pub value: f64,
    pub quadrature_error: f64,
    /// Size of the last octave `[T/2, T]`, standing in for the neglected `[T, inf)`.
    pub truncation_error: f64,
    /// Effect of the product tail model on the integral.
    pub model_error: f64,
}

impl Inversion {
    pub fn error(&self) -> f64 {
        self.quadrature_error + self.truncation_error + self.model_error
    }
}

/// Adaptive inversion at a single point.
pub fn invert_cf<C: CharacteristicFunction + ?Sized>(cf: &C, y: f64, t_int: f64) -> Result<Inversion> {
    if !(t_int > 0.0 && t_int.is_finite()) {
        return Err(Error::RejectedInput(format!("T_int must be positive, got {t_int}")));
    }
    check_decay(cf, t_int)?;
    let g = |tau: f64| {
        let t = tau.max(TAU_FLOOR);
        integrand(cf.eval(t), t, y)
    };
    let opts = QuadOptions { abs_tol: 1e-11, rel_tol: 1e-11, max_intervals: 20_000 };
    let half = 0.5 * t_int;
    let breaks: Vec<f64> = (1..12).map(|k| half / (1u64 << k) as f64).collect();
    let lo = integrate_with_breaks(g, 0.0, half, &breaks, opts);
    let hi = integrate(g, half, t_int, opts);
    let model = integrate(|tau: f64| cf.tail_error(tau.max(TAU_FLOOR)) / tau.max(TAU_FLOOR), 0.0, t_int, QuadOptions { abs_tol: 1e-9, rel_tol: 1e-2, max_intervals: 200 });
    Ok(Inversion {
        value: 0.5 - (lo.value + hi.value) / PI,
        quadrature_error: (lo.error + hi.error) / PI,
        truncation_error: hi.value.abs() / PI,
        model_error: model.value / PI,
    })
}

/// Options for `InvertedLaw::build`.
#[derive(Debug, Clone, Copy)]
pub struct GridOptions {
    pub t_int: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    /// Largest allowed CDF increment between neighbouring grid points.
    pub interp_tol: f64,
    pub max_points: usize,
}

impl GridOptions {
    pub fn new(t_int: f64, y_lo: f64, y_hi: f64) -> Self {
        Self { t_int, y_lo, y_hi, interp_tol: 2.5e-4, max_points: 1 << 15 }
    }
}

/// `F` tabulated on an adaptive `y` grid, linearly interpolated.
#[derive(Debug, Clone)]
pub struct InvertedLaw {
    ys: Vec<f64>,
    fs: Vec<f64>,
    errs: Vec<f64>,
    interp_error: f64,
    t_int: f64,
}

struct Nodes {
    /// Panel width and the 15 node offsets inside a panel.
    width: f64,
    offsets: [f64; 15],
    panels: usize,
    /// Kronrod and embedded Gauss weights times `e^{-i tau c} phi(tau)/tau`.
    k: Vec<Complex64>,
    g: Vec<Complex64>,
    /// Phases are measured from the centre `c` of the y range.
    center: f64,
    model_error: f64,
}

impl Nodes {
    fn new<C: CharacteristicFunction + ?Sized>(cf: &C, t_int: f64, omega: f64, center: f64) -> Self {
        let panels = 2 * ((t_int * omega / 8.0).ceil().max(1.0) as usize);
        let width = t_int / panels as f64;
        let proto = gk15_panel(0.0, width);
        let offsets = proto.map(|n| n.x);
        let vals = cf.eval_panels(0.0, width, panels, &offsets);
        let mut k = Vec::with_capacity(vals.len());
        let mut g = Vec::with_capacity(vals.len());
        let mut model = 0.0;
        for (i, (phi, err)) in vals.iter().enumerate() {
            let node = &proto[i % 15];
            let tau = (i / 15) as f64 * width + node.x;
            let shifted = phi * Complex64::from_polar(1.0, -tau * center) / tau;
            k.push(shifted * node.kronrod);
            g.push(shifted * node.gauss);
            model += node.kronrod * err / tau;
        }
        Self { width, offsets, panels, k, g, center, model_error: model / PI }
    }

    /// `(F(y), pointwise error)`.
    fn eval(&self, y: f64) -> (f64, f64) {
        let d = y - self.center;
        let off: Vec<Complex64> = self.offsets.iter().map(|&o| Complex64::from_polar(1.0, -o * d)).collect();
        let rot = Complex64::from_polar(1.0, -self.width * d);
        let mut base = Complex64::new(1.0, 0.0);
        let mut total = 0.0;
        let mut last = 0.0;
        let mut quad = 0.0;
        for m in 0..self.panels {
            if m % 256 == 0 {
                base = Complex64::from_polar(1.0, -(m as f64) * self.width * d);
            }
            let mut pk = 0.0;
            let mut pg = 0.0;
            for j in 0..15 {
                let e = base * off[j];
                pk += (e * self.k[m * 15 + j]).im;
                pg += (e * self.g[m * 15 + j]).im;
            }
            total += pk;
            quad += (pk - pg).abs();
            if m >= self.panels / 2 {
                last += pk;
            }
            base *= rot;
        }
        (0.5 - total / PI, (quad + last.abs()) / PI + self.model_error)
    }
}

impl InvertedLaw {
    pub fn build<C: CharacteristicFunction + ?Sized>(cf: &C, opts: GridOptions) -> Result<Self> {
        if !(opts.y_hi > opts.y_lo) {
            return Err(Error::RejectedInput("empty y range".into()));
        }
        check_decay(cf, opts.t_int)?;
        // phases are taken from the range centre, so frequencies stay within about one range
        let center = 0.5 * (opts.y_lo + opts.y_hi);
        let omega = 1.5 * (opts.y_hi - opts.y_lo) + 1.0;
        let nodes = Nodes::new(cf, opts.t_int, omega, center);
        let n0 = 257;
        let mut pts: Vec<(f64, (f64, f64))> = (0..n0)
            .into_par_iter()
            .map(|j| {
                let y = opts.y_lo + (opts.y_hi - opts.y_lo) * j as f64 / (n0 - 1) as f64;
                (y, nodes.eval(y))
            })
            .collect();
        loop {
            let mids: Vec<f64> = pts
                .windows(2)
                .filter(|w| (w[1].1 .0 - w[0].1 .0).abs() > opts.interp_tol && w[1].0 - w[0].0 > 1e-9)
                .map(|w| 0.5 * (w[0].0 + w[1].0))
                .collect();
            if mids.is_empty() || pts.len() + mids.len() > opts.max_points {
                break;
            }
            let new: Vec<(f64, (f64, f64))> = mids.par_iter().map(|&y| (y, nodes.eval(y))).collect();
            pts.extend(new);
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        let interp_error = pts.windows(2).map(|w| (w[1].1 .0 - w[0].1 .0).abs()).fold(0.0, f64::max);
        Ok(Self {
            ys: pts.iter().map(|p| p.0).collect(),
            fs: pts.iter().map(|p| p.1 .0).collect(),
            errs: pts.iter().map(|p| p.1 .1).collect(),
            interp_error,
            t_int: opts.t_int,
        })
    }

    pub fn t_int(&self) -> f64 {
        self.t_int
    }

    pub fn grid(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.ys, &self.fs, &self.errs)
    }

    /// Interpolated `F(y)`, clamped to the end values outside the grid.
    pub fn cdf(&self, y: f64) -> f64 {
        let i = self.ys.partition_point(|&v| v <= y);
        if i == 0 {
            return self.fs[0];
        }
        if i == self.ys.len() {
            return self.fs[i - 1];
        }
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        let t = (y - y0) / (y1 - y0);
        self.fs[i - 1] + t * (self.fs[i] - self.fs[i - 1])
    }

    /// Largest pointwise inversion error over the grid.
    pub fn pointwise_error(&self) -> f64 {
        self.errs.iter().copied().fold(0.0, f64::max)
    }

    /// Largest CDF increment between grid points, bounding the interpolation error.
    pub fn interpolation_error(&self) -> f64 {
        self.interp_error
    }

    /// Error of `cdf` anywhere on the grid range, plus the mass missing outside it.
    pub fn error_bound(&self) -> f64 {
        let outside = self.fs[0].abs() + (1.0 - self.fs[self.fs.len() - 1]).abs();
        self.pointwise_error() + self.interp_error + outside
    }

    /// Writes `y,F,err`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "y,F,err")?;
        for ((y, f), e) in self.ys.iter().zip(&self.fs).zip(&self.errs) {
            writeln!(w, "{},{},{}", fmt17(*y), fmt17(*f), fmt17(*e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::cf::{DegenerateCf, FnCf, GaussianCf};
    use super::*;

    /// Standard normal CDF from the Taylor series of erf, an independent oracle.
    fn normal_cdf(y: f64) -> f64 {
        let z = y / std::f64::consts::SQRT_2;
        let mut term = z;
        let mut sum = z;
        for n in 1..200 {
            term *= -z * z / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        0.5 + sum / PI.sqrt()
    }

    #[test]
    fn gaussian_control() {
        let cf = GaussianCf { mean: 0.0, sd: 1.0 };
        for y in [0.0, 1.0, 2.0] {
            let r = invert_cf(&cf, y, 40.0).unwrap();
            assert!((r.value - normal_cdf(y)).abs() < 1e-9, "y = {y}: {}", r.value);
            assert!(r.error() < 1e-6);
        }
        assert!((normal_cdf(1.0) - 0.841_344_746).abs() < 1e-9);
    }

    #[test]
    fn symmetric_law_has_median_zero() {
        let cf = FnCf(|t: f64| Complex64::new((-t.abs()).exp(), 0.0));
        let r = invert_cf(&cf, 0.0, 50.0).unwrap();
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn degenerate_is_refused() {
        let r = invert_cf(&DegenerateCf { at: 1.0 }, 0.0, 100.0);
        assert!(matches!(r, Err(Error::InsufficientDecay { .. })));
    }

    #[test]
    fn grid_law_matches_normal() {
        let cf = GaussianCf { mean: 0.5, sd: 2.0 };
        let law = InvertedLaw::build(&cf, GridOptions::new(20.0, -8.0, 9.0)).unwrap();
        for y in [-3.0, 0.0, 0.5, 2.2, 6.0] {
            assert!((law.cdf(y) - normal_cdf((y - 0.5) / 2.0)).abs() < 1e-6, "y = {y}");
        }
        assert!(law.pointwise_error() < 1e-6);
        let (_, fs, errs) = law.grid();
        assert!(fs.windows(2).zip(errs.windows(2)).all(|(f, e)| f[1] >= f[0] - 2.0 * (e[0] + e[1])));
    }
}
