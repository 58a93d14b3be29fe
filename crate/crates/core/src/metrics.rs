//! Scoring and channel-statistics estimation.
//!
//! Classification scores follow the OFF-positive convention: a true
//! positive is an OFF bit classified as OFF. Accuracy is symmetric in the
//! convention, and `ber = 1 - accuracy` holds exactly for every report.
//!
//! Scintillation estimation offers two routes: a closed-form log-moment
//! estimator (primary) and a least-squares fit of the log-normal density
//! against a 64-bin histogram (secondary cross-check). The two must agree
//! on genuine log-normal data; neither is derived from the other.

use serde::{Deserialize, Serialize};

use crate::channel::{BitStream, TurbulenceModel};
use crate::error::{Error, Result};

/// Binary confusion counts with OFF (bit 0) as the positive class:
/// `tp` = OFF classified OFF, `fp` = ON classified OFF,
/// `fn` = OFF classified ON, `tn` = ON classified ON.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// Row-normalized matrix: rows are the true class (OFF, ON), columns the
    /// predicted class (OFF, ON); each row sums to 1 when nonempty.
    pub fn normalized_rows(&self) -> [[f64; 2]; 2] {
        let off_total = (self.tp + self.fn_) as f64;
        let on_total = (self.fp + self.tn) as f64;
        let row = |num: u64, den: f64| if den > 0.0 { num as f64 / den } else { 0.0 };
        [
            [row(self.tp, off_total), row(self.fn_, off_total)],
            [row(self.fp, on_total), row(self.tn, on_total)],
        ]
    }

    /// Row-normalized 2x2 CSV with LF line endings.
    pub fn to_normalized_csv(&self) -> String {
        let m = self.normalized_rows();
        format!(
            ",pred_off,pred_on\ntrue_off,{},{}\ntrue_on,{},{}\n",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// Full score bundle for one truth/prediction pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub accuracy: f64,
    pub ber: f64,
    pub f1: f64,
    pub confusion: ConfusionMatrix,
    pub n: u64,
}

/// Counts the confusion matrix of `pred` against `truth`.
pub fn confusion(truth: &BitStream, pred: &BitStream) -> Result<ConfusionMatrix> {
    if truth.len() != pred.len() {
        return Err(Error::Data(format!(
            "length mismatch: truth {} vs prediction {}",
            truth.len(),
            pred.len()
        )));
    }
    let mut cm = ConfusionMatrix {
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 0,
    };
    for (&t, &p) in truth.iter().zip(pred.iter()) {
        match (t, p) {
            (0, 0) => cm.tp += 1,
            (1, 0) => cm.fp += 1,
            (0, 1) => cm.fn_ += 1,
            (1, 1) => cm.tn += 1,
            _ => unreachable!("BitStream guarantees binary symbols"),
        }
    }
    Ok(cm)
}

/// F1 score `tp / (tp + (fp + fn)/2)` under the OFF-positive convention.
///
/// Errors when the denominator is zero (no OFF bits anywhere).
pub fn f1(cm: &ConfusionMatrix) -> Result<f64> {
    let denom = cm.tp + cm.fp + cm.fn_;
    if denom == 0 {
        return Err(Error::Data(
            "f1 undefined: tp + fp + fn is zero".into(),
        ));
    }
    Ok(cm.tp as f64 / (cm.tp as f64 + 0.5 * (cm.fp + cm.fn_) as f64))
}

/// Assembles accuracy, BER, F1, and the confusion matrix for one pair.
pub fn score(truth: &BitStream, pred: &BitStream) -> Result<ScoreReport> {
    if truth.is_empty() {
        return Err(Error::Data("cannot score an empty bit stream".into()));
    }
    let cm = confusion(truth, pred)?;
    let accuracy = cm.accuracy();
    Ok(ScoreReport {
        accuracy,
        ber: 1.0 - accuracy,
        f1: f1(&cm)?,
        confusion: cm,
        n: cm.total(),
    })
}

/// Scintillation estimate: `si_hat = exp(sigma2_hat) - 1` by construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScintillationFit {
    /// Mean irradiance estimate.
    pub i0_hat: f64,
    /// Log-intensity variance estimate.
    pub sigma2_hat: f64,
    /// Normalized intensity variance estimate.
    pub si_hat: f64,
}

fn check_fit_input(samples: &[f64]) -> Result<()> {
    if samples.len() < 100 {
        return Err(Error::Data(format!(
            "scintillation fit needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&bad) = samples.iter().find(|&&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::Data(format!(
            "scintillation fit requires positive samples, found {bad}"
        )));
    }
    Ok(())
}

/// Log-moment scintillation estimator (primary route).
///
/// `sigma2_hat` is the sample variance of `ln I` and
/// `i0_hat = exp(mean(ln I) + sigma2_hat/2)`.
pub fn fit_scintillation(samples: &[f64]) -> Result<ScintillationFit> {
    check_fit_input(samples)?;
    let n = samples.len() as f64;
    let mut sum = 0.0;
    for &x in samples {
        sum += x.ln();
    }
    let mean_log = sum / n;
    let mut ss = 0.0;
    for &x in samples {
        let d = x.ln() - mean_log;
        ss += d * d;
    }
    let sigma2 = ss / (n - 1.0);
    Ok(ScintillationFit {
        i0_hat: (mean_log + sigma2 / 2.0).exp(),
        sigma2_hat: sigma2,
        si_hat: sigma2.exp() - 1.0,
    })
}

/// Histogram curve-fit scintillation estimator (secondary route).
///
/// Least squares of the log-normal density against a 64-bin histogram over
/// (0, q0.995], starting from plain intensity moments and refined with
/// Nelder-Mead. Independent of the log-moment route.
pub fn fit_scintillation_histogram(samples: &[f64]) -> Result<ScintillationFit> {
    check_fit_input(samples)?;

    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let hi = sorted[((sorted.len() - 1) as f64 * 0.995) as usize];
    if hi <= 0.0 {
        return Err(Error::Data("degenerate sample range".into()));
    }

    const BINS: usize = 64;
    let width = hi / BINS as f64;
    let mut counts = [0u64; BINS];
    let mut kept = 0u64;
    for &x in samples {
        if x <= hi {
            let mut b = (x / width) as usize;
            if b >= BINS {
                b = BINS - 1;
            }
            counts[b] += 1;
            kept += 1;
        }
    }
    if kept == 0 {
        return Err(Error::Data("empty histogram".into()));
    }
    let n = samples.len() as f64;
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let centers: Vec<f64> = (0..BINS).map(|b| (b as f64 + 0.5) * width).collect();

    // Plain-moment initialization (mean and variance of I, not of ln I).
    let m1 = samples.iter().sum::<f64>() / n;
    let m2 = samples.iter().map(|&x| (x - m1) * (x - m1)).sum::<f64>() / (n - 1.0);
    let si0 = (m2 / (m1 * m1)).max(1e-6);
    let init = [m1.ln(), (1.0 + si0).ln().ln()];

    let sse = |p: &[f64; 2]| -> f64 {
        let i0 = p[0].exp();
        let sigma2 = p[1].exp();
        let model = match TurbulenceModel::new(i0, sigma2) {
            Ok(m) => m,
            Err(_) => return f64::INFINITY,
        };
        centers
            .iter()
            .zip(density.iter())
            .map(|(&c, &d)| {
                let e = model.density(c) - d;
                e * e
            })
            .sum()
    };

    let best = nelder_mead(init, 0.2, sse, 400);
    let sigma2 = best[1].exp();
    Ok(ScintillationFit {
        i0_hat: best[0].exp(),
        sigma2_hat: sigma2,
        si_hat: sigma2.exp() - 1.0,
    })
}

/// Minimal 2-parameter Nelder-Mead, enough for the histogram fit.
fn nelder_mead<F: Fn(&[f64; 2]) -> f64>(init: [f64; 2], step: f64, f: F, iters: usize) -> [f64; 2] {
    let mut pts = [
        init,
        [init[0] + step, init[1]],
        [init[0], init[1] + step],
    ];
    let mut vals = [f(&pts[0]), f(&pts[1]), f(&pts[2])];

    for _ in 0..iters {
        // Order: best, middle, worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        let (b, m, w) = (order[0], order[1], order[2]);
        if (vals[w] - vals[b]).abs() <= 1e-14 * (1.0 + vals[b].abs()) {
            break;
        }
        let centroid = [
            (pts[b][0] + pts[m][0]) / 2.0,
            (pts[b][1] + pts[m][1]) / 2.0,
        ];
        let reflect = [
            centroid[0] + (centroid[0] - pts[w][0]),
            centroid[1] + (centroid[1] - pts[w][1]),
        ];
        let fr = f(&reflect);
        if fr < vals[b] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - pts[w][0]),
                centroid[1] + 2.0 * (centroid[1] - pts[w][1]),
            ];
            let fe = f(&expand);
            if fe < fr {
                pts[w] = expand;
                vals[w] = fe;
            } else {
                pts[w] = reflect;
                vals[w] = fr;
            }
        } else if fr < vals[m] {
            pts[w] = reflect;
            vals[w] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (pts[w][0] - centroid[0]),
                centroid[1] + 0.5 * (pts[w][1] - centroid[1]),
            ];
            let fc = f(&contract);
            if fc < vals[w] {
                pts[w] = contract;
                vals[w] = fc;
            } else {
                // Shrink toward the best point.
                for i in 0..3 {
                    if i != b {
                        pts[i] = [
                            pts[b][0] + 0.5 * (pts[i][0] - pts[b][0]),
                            pts[b][1] + 0.5 * (pts[i][1] - pts[b][1]),
                        ];
                        vals[i] = f(&pts[i]);
                    }
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    pts[best]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_turbulence, stream_rng};

    fn bits(v: &[u8]) -> BitStream {
        BitStream::new(v.to_vec()).unwrap()
    }

    #[test]
    fn confusion_basic() {
        let cm = confusion(&bits(&[0, 0, 1]), &bits(&[0, 0, 1])).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_, cm.tn), (2, 0, 0, 1));

        let cm = confusion(&bits(&[0, 1]), &bits(&[1, 0])).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_, cm.tn), (0, 1, 1, 0));
    }

    #[test]
    fn confusion_length_mismatch() {
        assert!(confusion(&bits(&[0]), &bits(&[0, 1])).is_err());
    }

    #[test]
    fn confusion_matches_brute_force() {
        let mut rng = stream_rng(123, 0);
        let truth = crate::channel::generate_bits(1000, &mut rng);
        let pred = crate::channel::generate_bits(1000, &mut rng);
        let cm = confusion(&truth, &pred).unwrap();

        let count = |t: u8, p: u8| {
            truth
                .iter()
                .zip(pred.iter())
                .filter(|&(&a, &b)| a == t && b == p)
                .count() as u64
        };
        assert_eq!(cm.tp, count(0, 0));
        assert_eq!(cm.fp, count(1, 0));
        assert_eq!(cm.fn_, count(0, 1));
        assert_eq!(cm.tn, count(1, 1));
        assert_eq!(cm.total(), 1000);
    }

    #[test]
    fn f1_values() {
        let perfect = ConfusionMatrix { tp: 10, fp: 0, fn_: 0, tn: 0 };
        assert_eq!(f1(&perfect).unwrap(), 1.0);

        let mixed = ConfusionMatrix { tp: 8, fp: 2, fn_: 4, tn: 0 };
        assert!((f1(&mixed).unwrap() - 8.0 / 11.0).abs() < 1e-12);

        let undefined = ConfusionMatrix { tp: 0, fp: 0, fn_: 0, tn: 5 };
        assert!(f1(&undefined).is_err());
    }

    #[test]
    fn score_identities() {
        let t = bits(&[0, 1, 0, 1, 0]);
        let r = score(&t, &t).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.ber, 0.0);
        assert_eq!(r.f1, 1.0);

        let p = bits(&[0, 1, 0, 1, 1]);
        let r = score(&t, &p).unwrap();
        assert_eq!(r.ber, 1.0 - r.accuracy);
        assert_eq!(r.n, 5);

        assert!(score(&bits(&[]), &bits(&[])).is_err());
    }

    #[test]
    fn normalized_csv_shape() {
        let cm = ConfusionMatrix { tp: 3, fp: 1, fn_: 1, tn: 3 };
        let csv = cm.to_normalized_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with(",pred_off,pred_on\n"));
        assert!(!csv.contains('\r'));
        let rows = cm.normalized_rows();
        assert!((rows[0][0] + rows[0][1] - 1.0).abs() < 1e-12);
        assert!((rows[1][0] + rows[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_scintillation_recovers_si() {
        let mut rng = stream_rng(7, 1);
        let samples = sample_turbulence(1_000_000, 1.8, 1.0, &mut rng).unwrap();
        let fit = fit_scintillation(&samples).unwrap();
        assert!((1.7..=1.9).contains(&fit.si_hat), "si_hat {}", fit.si_hat);
        assert!((fit.i0_hat - 1.0).abs() < 0.02, "i0_hat {}", fit.i0_hat);
        assert!((fit.si_hat - (fit.sigma2_hat.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn fit_scintillation_constant_samples() {
        let fit = fit_scintillation(&vec![3.25; 500]).unwrap();
        assert!(fit.sigma2_hat.abs() < 1e-15);
        assert!(fit.si_hat.abs() < 1e-15);
        assert!((fit.i0_hat - 3.25).abs() < 1e-12);
    }

    #[test]
    fn fit_scintillation_rejects_bad_input() {
        assert!(fit_scintillation(&[1.0; 10]).is_err());
        let mut xs = vec![1.0; 200];
        xs[50] = 0.0;
        assert!(fit_scintillation(&xs).is_err());
    }

    #[test]
    fn fit_scintillation_scale_equivariant() {
        let mut rng = stream_rng(7, 2);
        let samples = sample_turbulence(100_000, 1.0, 1.0, &mut rng).unwrap();
        let base = fit_scintillation(&samples).unwrap();
        let scaled_samples: Vec<f64> = samples.iter().map(|&x| 17.5 * x).collect();
        let scaled = fit_scintillation(&scaled_samples).unwrap();
        assert!((scaled.i0_hat / base.i0_hat - 17.5).abs() < 1e-10);
        assert!((scaled.sigma2_hat - base.sigma2_hat).abs() < 1e-10);
        assert!((scaled.si_hat - base.si_hat).abs() < 1e-10);
    }

    #[test]
    fn histogram_fit_agrees_with_moments() {
        let mut rng = stream_rng(7, 3);
        let samples = sample_turbulence(1_000_000, 1.8, 1.0, &mut rng).unwrap();
        let moments = fit_scintillation(&samples).unwrap();
        let hist = fit_scintillation_histogram(&samples).unwrap();
        let rel = (hist.si_hat - moments.si_hat).abs() / moments.si_hat;
        assert!(rel < 0.10, "histogram si {} vs moments {}", hist.si_hat, moments.si_hat);
        let rel_i0 = (hist.i0_hat - moments.i0_hat).abs() / moments.i0_hat;
        assert!(rel_i0 < 0.10, "histogram i0 {} vs moments {}", hist.i0_hat, moments.i0_hat);
    }
}
