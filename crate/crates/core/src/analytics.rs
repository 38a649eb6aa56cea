//! Summary statistics over vineyards and heat runs.

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;
pub use crate::vineyard::StepCounts;
use crate::vineyard::Vineyard;

#[derive(Clone, Debug, PartialEq)]
pub struct VineDurationStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// Most frequent duration; ties go to the smaller value.
    pub mode: usize,
    /// Population standard deviation (divides by the count).
    pub sd: f64,
    /// `(low, high, count)` for equal-width inclusive bins over `0..=max`.
    pub histogram: Vec<(usize, usize, usize)>,
}

pub const HISTOGRAM_BINS: usize = 10;

/// Statistics of a multiset of durations; `None` when it is empty.
pub fn duration_stats(durations: &[usize]) -> Option<VineDurationStats> {
    if durations.is_empty() {
        return None;
    }
    let mut sorted = durations.to_vec();
    sorted.sort_unstable();
    let count = sorted.len();
    let mean = sorted.iter().sum::<usize>() as f64 / count as f64;
    let median = if count % 2 == 1 {
        sorted[count / 2] as f64
    } else {
        (sorted[count / 2 - 1] + sorted[count / 2]) as f64 / 2.0
    };
    let mut mode = (sorted[0], 0usize);
    let mut k = 0;
    while k < count {
        let run = sorted[k..].iter().take_while(|&&d| d == sorted[k]).count();
        if run > mode.1 {
            mode = (sorted[k], run);
        }
        k += run;
    }
    let var = sorted.iter().map(|&d| (d as f64 - mean).powi(2)).sum::<f64>() / count as f64;

    let max = sorted[count - 1];
    let bins = HISTOGRAM_BINS.min(max + 1);
    let width = (max + 1).div_ceil(bins);
    let mut histogram: Vec<(usize, usize, usize)> = (0..bins)
        .map(|b| (b * width, ((b + 1) * width - 1).min(max), 0))
        .filter(|&(lo, _, _)| lo <= max)
        .collect();
    for &d in &sorted {
        histogram[d / width].2 += 1;
    }
    Some(VineDurationStats {
        count,
        mean,
        median,
        mode: mode.0,
        sd: var.sqrt(),
        histogram,
    })
}

/// Duration statistics over all vines of dimension `p`, essential ones included.
pub fn vine_duration_stats(vineyard: &Vineyard, p: usize) -> Option<VineDurationStats> {
    let durations: Vec<usize> = vineyard
        .vines
        .iter()
        .filter(|v| v.dim == p)
        .map(|v| v.duration())
        .collect();
    duration_stats(&durations)
}

/// `Σ (death − birth)^q` over the finite points.
pub fn total_persistence(diagram: &PersistenceDiagram, q: f64) -> f64 {
    diagram
        .points
        .iter()
        .filter(|p| p.1.is_finite())
        .map(|&(b, d)| (d - b).powf(q))
        .fold(0.0, |acc, x| acc + x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranspositionCounts {
    /// Entry `k` covers the transition from step `k` to step `k + 1`.
    pub per_step: Vec<StepCounts>,
}

pub fn transposition_counts(vineyard: &Vineyard) -> TranspositionCounts {
    TranspositionCounts {
        per_step: vineyard.per_step_counts.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub d: f64,
    pub critical: f64,
    pub reject: bool,
}

/// Asymptotic two-sample critical coefficient `c(α) = sqrt(-ln(α/2) / 2)`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(sample1: &[f64], sample2: &[f64], alpha: f64) -> Result<KsResult> {
    if sample1.is_empty() || sample2.is_empty() {
        return Err(Error::Input("KS test needs two non-empty samples".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Input(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if sample1.iter().chain(sample2).any(|x| x.is_nan()) {
        return Err(Error::Input("KS samples contain NaN".into()));
    }
    let mut s1 = sample1.to_vec();
    let mut s2 = sample2.to_vec();
    s1.sort_by(f64::total_cmp);
    s2.sort_by(f64::total_cmp);
    let (n1, n2) = (s1.len(), s2.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n1 && j < n2 {
        let x = s1[i].min(s2[j]);
        while i < n1 && s1[i] <= x {
            i += 1;
        }
        while j < n2 && s2[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let critical = ks_coefficient(alpha) * ((n1f + n2f) / (n1f * n2f)).sqrt();
    Ok(KsResult {
        d,
        critical,
        reject: d > critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duration_examples() {
        let s = duration_stats(&[7]).unwrap();
        assert_eq!((s.mean, s.median, s.mode, s.sd), (7.0, 7.0, 7, 0.0));
        let s = duration_stats(&[1, 1, 4]).unwrap();
        assert_eq!((s.mean, s.median, s.mode), (2.0, 1.0, 1));
        assert!((s.sd - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.histogram.iter().map(|h| h.2).sum::<usize>(), 3);
        assert!(duration_stats(&[]).is_none());
        // ties go to the smaller value
        assert_eq!(duration_stats(&[5, 5, 2, 2, 9]).unwrap().mode, 2);
    }

    #[test]
    fn total_persistence_examples() {
        let d = PersistenceDiagram {
            dim: 0,
            points: vec![(1.0, 5.0), (2.0, 6.0), (3.0, 6.0)],
            essential_births: vec![0.0],
        };
        assert_eq!(total_persistence(&d, 1.0), 11.0);
        assert_eq!(total_persistence(&d, 2.0), 41.0);
        assert_eq!(total_persistence(&PersistenceDiagram::empty(1), 1.0), 0.0);
    }

    #[test]
    fn ks_examples() {
        let r = ks_two_sample(&[1.0, 2.0], &[1.0, 2.0], 0.05).unwrap();
        assert_eq!((r.d, r.reject), (0.0, false));
        let r = ks_two_sample(&[0.0; 3], &[1.0; 3], 0.05).unwrap();
        assert_eq!(r.d, 1.0);
        assert!(!r.reject);
        assert!((r.critical - 1.358 * (2.0f64 / 3.0).sqrt()).abs() < 1e-3);
        let r = ks_two_sample(&[1.0, 2.0, 3.0, 4.0], &[1.5, 2.5, 3.5, 4.5], 0.05).unwrap();
        assert_eq!((r.d, r.reject), (0.25, false));
        assert!(ks_two_sample(&[], &[1.0], 0.05).is_err());
        assert!((ks_coefficient(0.05) - 1.358).abs() < 1e-3);
    }
}
