use serde::{Deserialize, Serialize};

use crate::numerics::linear_fit;

use super::FitError;

/// Magnitudes m_i sampled at increasing times t_i > 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySamples {
    pub t: Vec<f64>,
    pub m: Vec<f64>,
    pub tag: String,
}

impl DecaySamples {
    pub fn new(t: Vec<f64>, m: Vec<f64>, tag: impl Into<String>) -> Result<Self, FitError> {
        if t.len() != m.len() {
            return Err(FitError::InvalidSamples(format!("{} times but {} magnitudes", t.len(), m.len())));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|&x| !(x > 0.0)) {
            return Err(FitError::InvalidSamples("times must be positive and increasing".into()));
        }
        if m.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(FitError::InvalidSamples("magnitudes must be finite and nonnegative".into()));
        }
        Ok(DecaySamples { t, m, tag: tag.into() })
    }

    /// Centered running maximum over `window` samples (truncated at the ends).
    pub fn envelope(&self, window: usize) -> DecaySamples {
        let half = window / 2;
        let n = self.m.len();
        let m = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(half);
                let hi = (i + half + 1).min(n);
                self.m[lo..hi].iter().cloned().fold(0.0, f64::max)
            })
            .collect();
        DecaySamples { t: self.t.clone(), m, tag: self.tag.clone() }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub p_candidates: Vec<u32>,
    pub t_min: f64,
    /// Running-max window applied before fitting (None fits the raw samples).
    pub envelope_window: Option<usize>,
    /// Theoretical log power used when the data cannot resolve it.
    pub target_p: Option<u32>,
    /// A log power p ≥ 1 is claimed only if its residual is at most
    /// residual(p = 0) / dominance.
    pub dominance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { p_candidates: vec![0, 1, 2], t_min: 8.0, envelope_window: None, target_p: None, dominance: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub p: u32,
    pub beta: f64,
    pub log_c: f64,
    pub rms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub beta: f64,
    pub p: u32,
    pub log_c: f64,
    pub candidates: Vec<PowerFit>,
    /// false when the log power fell back to the target (or to 0).
    pub resolved: bool,
    pub note: String,
    pub samples_used: usize,
    pub t_range: (f64, f64),
}

impl DecayFit {
    pub fn residual(&self, p: u32) -> Option<f64> {
        self.candidates.iter().find(|c| c.p == p).map(|c| c.rms)
    }
}

/// Least-squares fit of log m = log C + β log t + p log log t for each candidate p.
pub fn fit_decay(samples: &DecaySamples, opts: &FitOptions) -> Result<DecayFit, FitError> {
    let data = match opts.envelope_window {
        Some(w) if w > 1 => samples.envelope(w),
        _ => samples.clone(),
    };
    let keep: Vec<usize> = (0..data.len()).filter(|&i| data.t[i] >= opts.t_min).collect();
    if keep.len() < 8 {
        return Err(FitError::InsufficientRange(format!("{} samples with t >= {}", keep.len(), opts.t_min)));
    }
    let t0 = data.t[keep[0]];
    let t1 = data.t[*keep.last().unwrap()];
    if t1 < 4.0 * t0 {
        return Err(FitError::InsufficientRange(format!("t spans [{t0}, {t1}], less than a factor 4")));
    }
    if keep.iter().any(|&i| data.m[i] <= 0.0) {
        return Err(FitError::InvalidSamples("zero magnitude inside the fitting window".into()));
    }
    if opts.p_candidates.iter().any(|&p| p > 0) && t0 <= 1.0 {
        return Err(FitError::InvalidSamples("log-power models need t > 1".into()));
    }
    if opts.p_candidates.is_empty() {
        return Err(FitError::InvalidSamples("no log-power candidates".into()));
    }
    let lt: Vec<f64> = keep.iter().map(|&i| data.t[i].ln()).collect();
    let lm: Vec<f64> = keep.iter().map(|&i| data.m[i].ln()).collect();
    let candidates: Vec<PowerFit> = opts
        .p_candidates
        .iter()
        .map(|&p| {
            let y: Vec<f64> = lm.iter().zip(&lt).map(|(m, t)| m - p as f64 * t.ln()).collect();
            let (log_c, beta, rms) = linear_fit(&lt, &y);
            PowerFit { p, beta, log_c, rms }
        })
        .collect();

    let best = candidates.iter().min_by(|a, b| a.rms.partial_cmp(&b.rms).unwrap()).unwrap();
    let r0 = candidates.iter().find(|c| c.p == 0).map(|c| c.rms);
    let (chosen, resolved, note) = match (best.p, r0) {
        (0, _) | (_, None) => (best.p, true, "minimum residual".to_string()),
        (p, Some(r0)) if best.rms * opts.dominance <= r0 => (p, true, format!("p={p} residual dominates p=0 by >= {}x", opts.dominance)),
        (p, Some(_)) => {
            let fallback = opts.target_p.filter(|q| opts.p_candidates.contains(q)).unwrap_or(0);
            (fallback, false, format!("p={p} not dominant; fell back to p={fallback}"))
        }
    };
    let sel = candidates.iter().find(|c| c.p == chosen).unwrap().clone();
    Ok(DecayFit {
        beta: sel.beta,
        p: chosen,
        log_c: sel.log_c,
        candidates,
        resolved,
        note,
        samples_used: keep.len(),
        t_range: (t0, t1),
    })
}

/// Geometric schedule from t0 to t1 with ratio ≤ `ratio`.
pub fn geometric_schedule(t0: f64, t1: f64, ratio: f64) -> Vec<f64> {
    let steps = ((t1 / t0).ln() / ratio.ln()).ceil().max(1.0) as usize;
    (0..=steps).map(|i| t0 * (t1 / t0).powf(i as f64 / steps as f64)).collect()
}
