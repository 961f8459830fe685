use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::adam::{Adam, AdamConfig};
use super::aggregator::EdgeVectors;
use super::model::{bce_loss, Gradients, LinkModel};
use super::paths::PathBundle;
use crate::error::{EcneError, Result};
use crate::seed::derive_seed;

/// Examples per deterministic gradient partial sum.
const REDUCE_CHUNK: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub adam: AdamConfig,
    pub max_epochs: usize,
    pub patience: usize,
    pub validation_fraction: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            adam: AdamConfig::default(),
            max_epochs: 50,
            patience: 5,
            validation_fraction: 0.1,
            batch_size: 32,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct History {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub best_epoch: Option<usize>,
    pub stopped_early: bool,
}

/// Labelled evidence for one candidate pair.
#[derive(Debug, Clone)]
pub struct Sample<'a> {
    pub bundle: &'a PathBundle,
    pub label: f64,
}

/// Adam on mean binary cross-entropy with early stopping on a held-out slice
/// of the training samples. The parameters of the best validation epoch are
/// restored before returning.
pub fn train(model: &mut LinkModel, samples: &[Sample<'_>], table: &EdgeVectors, cfg: &TrainConfig) -> Result<History> {
    let mut history = History::default();
    if cfg.max_epochs == 0 || samples.is_empty() {
        return Ok(history);
    }
    if cfg.batch_size == 0 {
        return Err(EcneError::InvalidArgument("batch size must be positive".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0x7a1]));
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng);
    let n_val = if samples.len() >= 10 {
        ((samples.len() as f64 * cfg.validation_fraction).round() as usize).min(samples.len() - 1)
    } else {
        0
    };
    let (val_idx, train_idx) = order.split_at(n_val);
    let mut train_idx = train_idx.to_vec();

    let mut adam = Adam::new(cfg.adam, &model.params());
    let mut best: Option<(f64, LinkModel)> = None;
    let mut since_best = 0;

    for epoch in 0..cfg.max_epochs {
        train_idx.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (b, batch) in train_idx.chunks(cfg.batch_size).enumerate() {
            let (loss, mut grads) = batch_gradient(model, samples, batch, table)?;
            if !loss.is_finite() {
                return Err(EcneError::NonFiniteLoss { epoch, batch: b });
            }
            grads.scale(1.0 / batch.len() as f64);
            adam.update(model.params_mut(), &grads);
            if !model.is_finite() {
                return Err(EcneError::NonFiniteLoss { epoch, batch: b });
            }
            epoch_loss += loss;
        }
        let train_loss = epoch_loss / train_idx.len() as f64;
        history.train_loss.push(train_loss);

        let monitored = if val_idx.is_empty() {
            train_loss
        } else {
            let val = evaluate_loss(model, samples, val_idx, table)?;
            history.val_loss.push(val);
            val
        };
        debug!("epoch {epoch}: train {train_loss:.5}, monitored {monitored:.5}");

        if best.as_ref().is_none_or(|(b, _)| monitored < *b) {
            best = Some((monitored, model.clone()));
            history.best_epoch = Some(epoch);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                history.stopped_early = true;
                info!("early stop at epoch {epoch}, best epoch {:?}", history.best_epoch);
                break;
            }
        }
    }
    if let Some((_, best_model)) = best {
        *model = best_model;
    }
    Ok(history)
}

/// Summed loss and summed gradient over `batch`. Partial sums are formed over
/// fixed chunks and combined in order, so the result does not depend on the
/// number of threads.
fn batch_gradient(
    model: &LinkModel,
    samples: &[Sample<'_>],
    batch: &[usize],
    table: &EdgeVectors,
) -> Result<(f64, Gradients)> {
    let partials: Vec<(f64, Gradients)> = batch
        .par_chunks(REDUCE_CHUNK)
        .map(|chunk| {
            let mut grads = model.zero_grads();
            let mut loss = 0.0;
            for &i in chunk {
                let s = &samples[i];
                let fwd = model.forward(table, s.bundle)?;
                loss += bce_loss(&[fwd.eta], &[s.label]);
                model.backward(&fwd, fwd.eta - s.label, &mut grads);
            }
            Ok((loss, grads))
        })
        .collect::<Result<_>>()?;
    let mut iter = partials.into_iter();
    let (mut loss, mut grads) = iter.next().expect("non-empty batch");
    for (l, g) in iter {
        loss += l;
        grads.add(&g);
    }
    Ok((loss, grads))
}

fn evaluate_loss(model: &LinkModel, samples: &[Sample<'_>], idx: &[usize], table: &EdgeVectors) -> Result<f64> {
    let preds = idx
        .par_iter()
        .map(|&i| model.predict(table, samples[i].bundle))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<f64> = idx.iter().map(|&i| samples[i].label).collect();
    Ok(bce_loss(&preds, &labels))
}

/// `(η, label)` for every sample.
pub fn score(model: &LinkModel, samples: &[Sample<'_>], table: &EdgeVectors) -> Result<Vec<(f64, f64)>> {
    samples
        .par_iter()
        .map(|s| model.predict(table, s.bundle).map(|eta| (eta, s.label)))
        .collect()
}
