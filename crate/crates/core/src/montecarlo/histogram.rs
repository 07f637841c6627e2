use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Bin count used by the density subcommands and the bimodality check.
pub const DEFAULT_BINS: usize = 400;

/// A peak-to-centre density ratio below this marks the marginal as bimodal.
pub const BIMODAL_RATIO: f64 = 0.95;

/// Equal-width histogram normalised to unit area.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centre(&self, k: usize) -> f64 {
        0.5 * (self.edges[k] + self.edges[k + 1])
    }

    /// Index of the bin containing `v`, if inside the range.
    pub fn bin_of(&self, v: f64) -> Option<usize> {
        let (lo, hi) = (self.edges[0], *self.edges.last().unwrap());
        if !(lo..=hi).contains(&v) {
            return None;
        }
        Some((((v - lo) / self.width()) as usize).min(self.bins() - 1))
    }

    /// `bin_left,bin_right,count,density` rows; the caller writes the header.
    pub fn write_rows(&self, out: &mut String) {
        out.push_str("bin_left,bin_right,count,density\n");
        for k in 0..self.bins() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                self.edges[k],
                self.edges[k + 1],
                self.counts[k],
                self.density[k]
            );
        }
    }
}

/// Equal-width bins over `[min, max]` of the data. If every value is equal the
/// single bin has unit width, centred on that value.
pub fn make_histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("histogram input must be finite".into()));
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi, bins) = if hi > lo { (lo, hi, bins) } else { (lo - 0.5, lo + 0.5, 1) };
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|k| if k == bins { hi } else { lo + width * k as f64 })
        .collect();
    let mut counts = vec![0u64; bins];
    for v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let norm = values.len() as f64 * width;
    let density = counts.iter().map(|&c| c as f64 / norm).collect();
    Ok(Histogram { edges, counts, density })
}

/// Peak heights either side of the centre and the density at the centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bimodality {
    pub left_peak: f64,
    pub right_peak: f64,
    pub centre_density: f64,
    /// `centre_density / min(left_peak, right_peak)`.
    pub ratio: f64,
}

impl Bimodality {
    pub fn is_bimodal(&self) -> bool {
        self.ratio < BIMODAL_RATIO
    }
}

/// Compares the density of the bin containing `centre` with the highest bins
/// strictly to its left and right.
pub fn bimodality(hist: &Histogram, centre: f64) -> Result<Bimodality> {
    let c = hist
        .bin_of(centre)
        .ok_or_else(|| Error::InvalidParameter(format!("centre {centre} outside histogram range")))?;
    if c == 0 || c + 1 == hist.bins() {
        return Err(Error::InvalidParameter("centre bin has no neighbour on one side".into()));
    }
    let left_peak = hist.density[..c].iter().cloned().fold(0.0, f64::max);
    let right_peak = hist.density[c + 1..].iter().cloned().fold(0.0, f64::max);
    let centre_density = hist.density[c];
    let floor = left_peak.min(right_peak);
    let ratio = if floor > 0.0 { centre_density / floor } else { f64::INFINITY };
    Ok(Bimodality {
        left_peak,
        right_peak,
        centre_density,
        ratio,
    })
}
