//! Edit distance and the aggregated error statistics of a simulation point.

/// Unit-cost Levenshtein distance, keeping one DP row over the shorter input.
pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, &x) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &y) in short.iter().enumerate() {
            let next = (diag + usize::from(x != y)).min(row[j] + 1).min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[short.len()]
}

/// Outcome of one simulated transmission and reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    pub edit_distance: usize,
    pub exact_match: bool,
    pub segmentation_failures: usize,
    pub trace_lengths: Vec<usize>,
}

/// Aggregate over the trials of one `(scheme, point, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub trials: usize,
    /// Mean of `L_d / n`.
    pub mean_norm_edit: f64,
    /// Sample standard deviation of `L_d / n` over `sqrt(trials)`.
    pub stderr_norm_edit: f64,
    /// Fraction of trials with a wrong estimate.
    pub p_e_hat: f64,
    pub mean_seg_fail_rate: f64,
    pub rate: f64,
}

impl SummaryStats {
    /// Aggregates results listed in trial order; the summation order is fixed
    /// so equal inputs give bit-identical output.
    pub fn from_trials(results: &[TrialResult], n: usize, t: usize, rate: f64) -> Self {
        let trials = results.len();
        if trials == 0 {
            return Self {
                trials,
                mean_norm_edit: f64::NAN,
                stderr_norm_edit: f64::NAN,
                p_e_hat: f64::NAN,
                mean_seg_fail_rate: f64::NAN,
                rate,
            };
        }
        let count = trials as f64;
        let norm: Vec<f64> = results.iter().map(|r| r.edit_distance as f64 / n as f64).collect();
        let mean = norm.iter().sum::<f64>() / count;
        let stderr = if trials > 1 {
            let var = norm.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
            (var / count).sqrt()
        } else {
            0.0
        };
        let errors = results.iter().filter(|r| !r.exact_match).count();
        let seg = results
            .iter()
            .map(|r| r.segmentation_failures as f64 / t as f64)
            .sum::<f64>()
            / count;
        Self {
            trials,
            mean_norm_edit: mean,
            stderr_norm_edit: stderr,
            p_e_hat: errors as f64 / count,
            mean_seg_fail_rate: seg,
            rate,
        }
    }

    /// Normal-approximation 95% interval for the mean normalized edit error.
    pub fn ci95(&self) -> (f64, f64) {
        let h = 1.96 * self.stderr_norm_edit;
        (self.mean_norm_edit - h, self.mean_norm_edit + h)
    }

    /// Standard error of `p_e_hat`.
    pub fn stderr_p_e(&self) -> f64 {
        (self.p_e_hat * (1.0 - self.p_e_hat) / self.trials as f64).sqrt()
    }

    /// Normal-approximation 95% interval for the error probability.
    pub fn p_e_ci95(&self) -> (f64, f64) {
        let h = 1.96 * self.stderr_p_e();
        (self.p_e_hat - h, self.p_e_hat + h)
    }
}
