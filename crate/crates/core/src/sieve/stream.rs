//! Histogram summaries for ranges too large to keep in memory, and histogram CSV export.

use super::engine::{run_segment, small_primes, ValueFold};
use super::table::SieveTable;
use crate::error::{Error, Result};
use crate::function_model::AdditiveFunctionSpec;
use crate::numeric::fmt17;
use rayon::prelude::*;
use std::io::Write;

/// Default number of quantile bins.
pub const DEFAULT_BINS: usize = 1 << 16;

const PILOT_X: u64 = 1 << 20;
const MAX_OMEGA_TRACKED: usize = 16;

/// Counts of `f(n)` per bin `(edges[j-1], edges[j]]`, with open end bins, overall and per `omega`.
#[derive(Debug, Clone)]
pub struct HistogramSummary {
    pub x: u64,
    pub edges: Vec<f64>,
    /// `edges.len() + 1` counts; the last bin is `(edges[last], +inf)`.
    pub counts: Vec<u64>,
    /// `per_omega[k][j]`.
    pub per_omega: Vec<Vec<u64>>,
}

impl HistogramSummary {
    /// `F_x` at `edges[j]`, exact.
    pub fn cdf_at_edge(&self, j: usize) -> f64 {
        self.counts[..=j].iter().sum::<u64>() as f64 / self.x as f64
    }

    /// Bounds `(lo, hi)` on `F_x(y)` from the binned counts.
    pub fn cdf_bounds(&self, y: f64) -> (f64, f64) {
        let j = self.edges.partition_point(|&e| e <= y);
        let lo = self.counts[..j].iter().sum::<u64>();
        let hi = lo + self.counts[j];
        (lo as f64 / self.x as f64, hi as f64 / self.x as f64)
    }

    pub fn pi_k(&self, k: usize) -> u64 {
        self.per_omega.get(k).map_or(0, |c| c.iter().sum())
    }

    /// Writes `y,count,cdf` rows at the bin edges; the overflow bin is reported at `inf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "y,count,cdf")?;
        let mut acc = 0u64;
        for (j, &e) in self.edges.iter().enumerate() {
            acc += self.counts[j];
            writeln!(w, "{},{},{}", fmt17(e), self.counts[j], fmt17(acc as f64 / self.x as f64))?;
        }
        let last = *self.counts.last().expect("overflow bin");
        writeln!(w, "inf,{},{}", last, fmt17((acc + last) as f64 / self.x as f64))?;
        Ok(())
    }
}

/// Quantile edges from a pilot sieve on `1..=min(x, 2^20)`.
fn pilot_edges(spec: &AdditiveFunctionSpec, x: u64, segment_size: u64, bins: usize) -> Result<Vec<f64>> {
    let pilot = super::table::build_sieve(spec, x.min(PILOT_X), segment_size)?;
    let sorted = pilot.sorted_values();
    let mut edges: Vec<f64> = (1..=bins).map(|i| sorted[(i * sorted.len()).div_ceil(bins) - 1]).collect();
    edges.dedup();
    Ok(edges)
}

/// Streams segments over `1..=x` and bins `f(n)`; memory is independent of `x`.
pub fn stream_summary(spec: &AdditiveFunctionSpec, x: u64, segment_size: u64, bins: usize) -> Result<HistogramSummary> {
    if x == 0 {
        return Err(Error::EmptyTable);
    }
    if segment_size < 2 || bins == 0 {
        return Err(Error::RejectedInput("segment size must be >= 2 and bins >= 1".into()));
    }
    let edges = pilot_edges(spec, x, segment_size, bins)?;
    let primes = small_primes(x);
    let fold = ValueFold::new(spec, &primes, x);
    let nb = edges.len() + 1;
    let mut counts = vec![0u64; nb];
    let mut per_omega = vec![vec![0u64; nb]; MAX_OMEGA_TRACKED];
    let batch = rayon::current_num_threads().max(1) as u64 * 4;
    let n_segments = x.div_ceil(segment_size);
    let mut s = 0u64;
    while s < n_segments {
        let end = (s + batch).min(n_segments);
        let parts: Vec<(Vec<f64>, Vec<u8>)> = (s..end)
            .into_par_iter()
            .map(|j| {
                let lo = 1 + j * segment_size;
                let len = segment_size.min(x - lo + 1) as usize;
                let mut f = vec![0.0; len];
                let mut w = vec![0u8; len];
                run_segment(&fold, &primes, lo, &mut f, &mut w);
                (f, w)
            })
            .collect();
        for (f, w) in parts {
            for (&v, &k) in f.iter().zip(&w) {
                let j = edges.partition_point(|&e| e < v);
                counts[j] += 1;
                per_omega[(k as usize).min(MAX_OMEGA_TRACKED - 1)][j] += 1;
            }
        }
        s = end;
    }
    while per_omega.last().is_some_and(|c| c.iter().all(|&v| v == 0)) {
        per_omega.pop();
    }
    Ok(HistogramSummary { x, edges, counts, per_omega })
}

impl SieveTable {
    /// Writes `y,count,cdf` over the distinct values of `f`.
    pub fn write_histogram_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "y,count,cdf")?;
        let sorted = self.sorted_values();
        let n = sorted.len() as f64;
        let mut i = 0;
        while i < sorted.len() {
            let v = sorted[i];
            let j = i + sorted[i..].partition_point(|&u| u <= v);
            writeln!(w, "{},{},{}", fmt17(v), j - i, fmt17(j as f64 / n))?;
            i = j;
        }
        Ok(())
    }
}
