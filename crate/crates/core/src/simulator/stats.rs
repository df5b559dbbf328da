//! Batch-means bookkeeping shared by single runs and pooled replications.

/// Totals for one batch of consecutive measured decisions, plus the
/// inter-departure intervals that completed while the batch was open.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Batch {
    pub decisions: u64,
    pub aud_sum: f64,
    pub updates: u64,
    pub missed: u64,
    pub dropped: u64,
    pub y_sum: f64,
}

/// Ratio `Σnum / Σden` with its batch-means standard error (delta method).
///
/// Returns NaN for the error when fewer than two batches are available.
pub(crate) fn ratio_estimate(pairs: &[(f64, f64)]) -> (f64, f64) {
    let num: f64 = pairs.iter().map(|p| p.0).sum();
    let den: f64 = pairs.iter().map(|p| p.1).sum();
    if den <= 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let ratio = num / den;
    let b = pairs.len() as f64;
    if pairs.len() < 2 {
        return (ratio, f64::NAN);
    }
    let mean_den = den / b;
    let ss: f64 = pairs
        .iter()
        .map(|&(n, d)| {
            let r = n - ratio * d;
            r * r
        })
        .sum();
    (ratio, (ss / (b * (b - 1.0))).sqrt() / mean_den)
}
