//! One-vs-rest logistic regression and F1 scores.

use std::collections::BTreeMap;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{EcneError, Result};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig {
    pub l2: f64,
    pub max_iterations: usize,
    pub learning_rate: f64,
    /// Stop once the gradient norm of every binary problem falls below this.
    pub tolerance: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: 1e-4,
            max_iterations: 300,
            learning_rate: 1.0,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Scores {
    pub micro: f64,
    pub macro_: f64,
}

/// Micro and macro F1 for single-label predictions. Macro averages over
/// every class seen in either `truth` or `predicted`.
pub fn f1_scores(truth: &[usize], predicted: &[usize]) -> F1Scores {
    assert_eq!(truth.len(), predicted.len());
    let mut counts: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
    for (&t, &p) in truth.iter().zip(predicted) {
        if t == p {
            counts.entry(t).or_default().0 += 1;
        } else {
            counts.entry(p).or_default().1 += 1;
            counts.entry(t).or_default().2 += 1;
        }
    }
    let f1 = |tp: usize, fp: usize, fn_: usize| {
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    let (tp, fp, fn_) = counts
        .values()
        .fold((0, 0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2));
    let macro_ = if counts.is_empty() {
        0.0
    } else {
        counts.values().map(|&(a, b, c)| f1(a, b, c)).sum::<f64>() / counts.len() as f64
    };
    F1Scores {
        micro: f1(tp, fp, fn_),
        macro_,
    }
}

/// Per-class binary logistic models over standardized features.
#[derive(Debug, Clone)]
pub struct OneVsRest {
    classes: Vec<usize>,
    mean: Vec<f64>,
    scale: Vec<f64>,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

impl OneVsRest {
    pub fn fit(features: &[Vec<f64>], labels: &[usize], cfg: &LogisticConfig) -> Result<OneVsRest> {
        if features.is_empty() || features.len() != labels.len() {
            return Err(EcneError::Shape(format!(
                "{} feature rows for {} labels",
                features.len(),
                labels.len()
            )));
        }
        let dim = features[0].len();
        let n = features.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in features {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x / n;
            }
        }
        let mut scale = vec![0.0; dim];
        for row in features {
            for ((s, x), m) in scale.iter_mut().zip(row).zip(&mean) {
                *s += (x - m).powi(2) / n;
            }
        }
        for s in &mut scale {
            *s = if *s > 1e-24 { s.sqrt() } else { 1.0 };
        }
        let xs: Vec<Vec<f64>> = features
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&mean)
                    .zip(&scale)
                    .map(|((x, m), s)| (x - m) / s)
                    .collect()
            })
            .collect();

        let mut classes: Vec<usize> = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        let mut weights = Vec::with_capacity(classes.len());
        let mut biases = Vec::with_capacity(classes.len());
        for &c in &classes {
            let ys: Vec<f64> = labels.iter().map(|&l| f64::from(u8::from(l == c))).collect();
            let (w, b) = fit_binary(&xs, &ys, cfg);
            weights.push(w);
            biases.push(b);
        }
        Ok(OneVsRest {
            classes,
            mean,
            scale,
            weights,
            biases,
        })
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    /// Class with the highest one-vs-rest score; ties go to the smaller class.
    pub fn predict(&self, row: &[f64]) -> usize {
        let x: Vec<f64> = row
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((x, m), s)| (x - m) / s)
            .collect();
        let mut best = (f64::NEG_INFINITY, self.classes[0]);
        for ((w, b), &c) in self.weights.iter().zip(&self.biases).zip(&self.classes) {
            let z = b + w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
            if z > best.0 {
                best = (z, c);
            }
        }
        best.1
    }
}

/// Full-batch gradient descent on mean log-loss plus `l2/2·‖w‖²`.
fn fit_binary(xs: &[Vec<f64>], ys: &[f64], cfg: &LogisticConfig) -> (Vec<f64>, f64) {
    let dim = xs[0].len();
    let n = xs.len() as f64;
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut gw = vec![0.0; dim];
    for _ in 0..cfg.max_iterations {
        gw.iter_mut().zip(&w).for_each(|(g, w)| *g = cfg.l2 * w);
        let mut gb = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let z = b + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            let r = (logistic(z) - y) / n;
            gb += r;
            gw.iter_mut().zip(x).for_each(|(g, x)| *g += r * x);
        }
        let norm = (gb * gb + gw.iter().map(|g| g * g).sum::<f64>()).sqrt();
        if norm < cfg.tolerance {
            break;
        }
        w.iter_mut().zip(&gw).for_each(|(w, g)| *w -= cfg.learning_rate * g);
        b -= cfg.learning_rate * gb;
    }
    (w, b)
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Per-class split of item indices: `round(fraction·n_c)` items of each class
/// go to training, clamped so both sides keep at least one. Classes with a
/// single item cannot be split and are dropped with a warning.
pub fn stratified_split(labels: &[usize], fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(EcneError::InvalidArgument(format!(
            "train fraction must be in (0, 1), got {fraction}"
        )));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in labels.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x57a7]));
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (class, mut items) in by_class {
        if items.len() < 2 {
            warn!("class {class} has a single item and is left out of classification");
            continue;
        }
        items.shuffle(&mut rng);
        let k = ((fraction * items.len() as f64).round() as usize).clamp(1, items.len() - 1);
        train.extend_from_slice(&items[..k]);
        test.extend_from_slice(&items[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOutcome {
    pub f1: F1Scores,
    pub accuracy: f64,
    pub train_items: usize,
    pub test_items: usize,
}

/// Train on a stratified `fraction` of the labelled rows and score the rest.
pub fn classify(
    features: &[Vec<f64>],
    labels: &[usize],
    fraction: f64,
    seed: u64,
    cfg: &LogisticConfig,
) -> Result<ClassifyOutcome> {
    let (train, test) = stratified_split(labels, fraction, seed)?;
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            idx.iter().map(|&i| features[i].clone()).collect(),
            idx.iter().map(|&i| labels[i]).collect(),
        )
    };
    let (train_x, train_y) = pick(&train);
    let (test_x, test_y) = pick(&test);
    let distinct = {
        let mut c = train_y.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    if distinct < 2 {
        return Err(EcneError::InvalidArgument(
            "classification needs at least two classes with two or more items".into(),
        ));
    }
    let model = OneVsRest::fit(&train_x, &train_y, cfg)?;
    let predicted: Vec<usize> = test_x.iter().map(|x| model.predict(x)).collect();
    let f1 = f1_scores(&test_y, &predicted);
    let correct = test_y.iter().zip(&predicted).filter(|(a, b)| a == b).count();
    Ok(ClassifyOutcome {
        f1,
        accuracy: correct as f64 / test_y.len() as f64,
        train_items: train.len(),
        test_items: test.len(),
    })
}
