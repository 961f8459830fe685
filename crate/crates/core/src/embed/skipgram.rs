//! Skip-gram with negative sampling over random-walk corpora.
//!
//! For a center item `c` and a context item `o` inside the window the pair
//! loss is `-log σ(e_c·k_o) - Σ_neg log σ(-e_c·k_neg)`, with negatives drawn
//! from walk occurrence counts raised to the 0.75 power. `e` is the input
//! (returned) table and `k` the context table.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alias::AliasTable;
use super::walks::Walk;
use super::WalkConfig;
use crate::error::{EcneError, Result};
use crate::seed::derive_seed;

const NOISE_POWER: f64 = 0.75;

#[derive(Debug, Clone)]
pub struct SkipGramModel {
    pub dim: usize,
    pub input: Vec<f32>,
    pub context: Vec<f32>,
    /// Mean pair loss per epoch.
    pub epoch_losses: Vec<f64>,
}

impl SkipGramModel {
    pub fn input_row(&self, item: usize) -> &[f32] {
        &self.input[item * self.dim..(item + 1) * self.dim]
    }

    pub fn context_row(&self, item: usize) -> &[f32] {
        &self.context[item * self.dim..(item + 1) * self.dim]
    }

    /// `σ(e_a · k_b)`.
    pub fn pair_probability(&self, a: usize, b: usize) -> f64 {
        sigmoid(dot(self.input_row(a), self.context_row(b)) as f64)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `-log σ(x)` without overflow.
fn neg_log_sigmoid(x: f32) -> f64 {
    let x = x as f64;
    if x < -30.0 {
        -x
    } else {
        (-x).exp().ln_1p()
    }
}

#[inline]
fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let chunks = a.len() / 8 * 8;
    for (ca, cb) in a[..chunks].chunks_exact(8).zip(b[..chunks].chunks_exact(8)) {
        for l in 0..8 {
            acc[l] += ca[l] * cb[l];
        }
    }
    let mut sum = acc.iter().sum::<f32>();
    for i in chunks..a.len() {
        sum += a[i] * b[i];
    }
    sum
}

#[inline]
fn axpy(alpha: f32, x: &[f32], y: &mut [f32]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Raw view of the two tables shared between training workers. With more
/// than one worker, rows are read and written without synchronization.
struct Tables {
    input: *mut f32,
    context: *mut f32,
    dim: usize,
}

unsafe impl Send for Tables {}
unsafe impl Sync for Tables {}

impl Tables {
    #[allow(clippy::mut_from_ref)]
    unsafe fn input_row(&self, item: usize) -> &mut [f32] {
        std::slice::from_raw_parts_mut(self.input.add(item * self.dim), self.dim)
    }

    #[allow(clippy::mut_from_ref)]
    unsafe fn context_row(&self, item: usize) -> &mut [f32] {
        std::slice::from_raw_parts_mut(self.context.add(item * self.dim), self.dim)
    }
}

struct Worker<'a> {
    tables: &'a Tables,
    noise: &'a AliasTable,
    noise_items: &'a [usize],
    cfg: &'a WalkConfig,
    total_positions: u64,
    processed: &'a AtomicU64,
    gradient: Vec<f32>,
}

impl Worker<'_> {
    fn learning_rate(&self) -> f32 {
        let done = self.processed.load(Ordering::Relaxed) as f64 / self.total_positions as f64;
        let lr = self.cfg.lr_start - (self.cfg.lr_start - self.cfg.lr_end) * done.min(1.0);
        lr.max(self.cfg.lr_end) as f32
    }

    /// Returns (loss sum, pair count).
    fn train_walks(&mut self, walks: &[Walk], rng: &mut ChaCha8Rng) -> (f64, u64) {
        let mut loss = 0.0;
        let mut pairs = 0;
        let window = self.cfg.window;
        for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let lr = self.learning_rate();
                let lo = i.saturating_sub(window);
                let hi = (i + window).min(walk.len() - 1);
                for (j, &ctx) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    loss += self.update(center, ctx, lr, rng);
                    pairs += 1;
                }
                self.processed.fetch_add(1, Ordering::Relaxed);
            }
        }
        (loss, pairs)
    }

    fn update(&mut self, center: usize, ctx: usize, lr: f32, rng: &mut ChaCha8Rng) -> f64 {
        self.gradient.iter_mut().for_each(|g| *g = 0.0);
        // SAFETY: rows are in bounds; aliasing across workers is the accepted
        // hogwild contract, and within one worker `center` is only borrowed
        // immutably while context rows are written.
        let input = unsafe { self.tables.input_row(center) };
        let mut loss = 0.0;
        for k in 0..=self.cfg.negatives {
            let (target, label) = if k == 0 {
                (ctx, 1.0f32)
            } else {
                let t = self.noise_items[self.noise.sample(rng)];
                if t == ctx {
                    continue;
                }
                (t, 0.0)
            };
            let out = unsafe { self.tables.context_row(target) };
            let score = dot(input, out);
            let prob = 1.0 / (1.0 + (-score).exp());
            // -log of the probability assigned to the observed label
            let fit = if label > 0.5 { prob } else { 1.0 - prob };
            loss += if fit > 1e-30 {
                -f64::from(fit.ln())
            } else {
                neg_log_sigmoid(if label > 0.5 { score } else { -score })
            };
            let g = (label - prob) * lr;
            axpy(g, out, &mut self.gradient);
            axpy(g, input, out);
        }
        axpy(1.0, &self.gradient, input);
        loss
    }
}

/// Trains input/context tables for `item_count` items on the given walks.
/// With `cfg.workers == 1` the result is a pure function of the inputs.
pub fn train_skipgram(walks: &[Walk], item_count: usize, dim: usize, cfg: &WalkConfig) -> Result<SkipGramModel> {
    if dim == 0 {
        return Err(EcneError::InvalidArgument(
            "embedding dimension must be positive".into(),
        ));
    }
    cfg.validate()?;
    if walks.iter().all(|w| w.len() < 2) {
        return Err(EcneError::NoPositivePairs);
    }
    let mut counts = vec![0u64; item_count];
    for &item in walks.iter().flatten() {
        if item >= item_count {
            return Err(EcneError::InvalidArgument(format!(
                "walk item {item} outside 0..{item_count}"
            )));
        }
        counts[item] += 1;
    }
    let noise_items: Vec<usize> = (0..item_count).filter(|&i| counts[i] > 0).collect();
    let noise_weights: Vec<f64> = noise_items
        .iter()
        .map(|&i| (counts[i] as f64).powf(NOISE_POWER))
        .collect();
    let noise = AliasTable::new(&noise_weights);

    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0x1417]));
    let half = 0.5 / dim as f32;
    let mut input: Vec<f32> = (0..item_count * dim).map(|_| init_rng.gen_range(-half..half)).collect();
    let mut context = vec![0.0f32; item_count * dim];

    let positions: u64 = walks.iter().map(|w| w.len() as u64).sum();
    let total_positions = positions * cfg.epochs as u64;
    let processed = AtomicU64::new(0);
    let tables = Tables {
        input: input.as_mut_ptr(),
        context: context.as_mut_ptr(),
        dim,
    };
    let workers = cfg.workers.max(1);
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        let chunk = walks.len().div_ceil(workers);
        let (loss, pairs) = if workers == 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0x5347, epoch as u64]));
            let mut worker = Worker {
                tables: &tables,
                noise: &noise,
                noise_items: &noise_items,
                cfg,
                total_positions,
                processed: &processed,
                gradient: vec![0.0; dim],
            };
            worker.train_walks(walks, &mut rng)
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = walks
                    .chunks(chunk)
                    .enumerate()
                    .map(|(t, part)| {
                        let (tables, noise, noise_items, processed) = (&tables, &noise, &noise_items, &processed);
                        scope.spawn(move || {
                            let mut rng =
                                ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[0x5347, epoch as u64, t as u64]));
                            let mut worker = Worker {
                                tables,
                                noise,
                                noise_items,
                                cfg,
                                total_positions,
                                processed,
                                gradient: vec![0.0; dim],
                            };
                            worker.train_walks(part, &mut rng)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("skip-gram worker panicked"))
                    .fold((0.0, 0), |(l, p), (a, b)| (l + a, p + b))
            })
        };
        epoch_losses.push(loss / pairs.max(1) as f64);
    }

    if input.iter().chain(&context).any(|v| !v.is_finite()) {
        return Err(EcneError::NonFiniteLoss {
            epoch: cfg.epochs,
            batch: 0,
        });
    }
    Ok(SkipGramModel {
        dim,
        input,
        context,
        epoch_losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> WalkConfig {
        WalkConfig {
            negatives: 1,
            window: 1,
            epochs: 1,
            ..WalkConfig::default()
        }
    }

    #[test]
    fn rejects_zero_dim_and_trivial_walks() {
        assert!(matches!(
            train_skipgram(&[vec![0, 1]], 2, 0, &cfg()),
            Err(EcneError::InvalidArgument(_))
        ));
        assert!(matches!(
            train_skipgram(&[vec![0], vec![1]], 2, 4, &cfg()),
            Err(EcneError::NoPositivePairs)
        ));
    }

    #[test]
    fn single_pair_is_driven_up() {
        // items 0 and 1 co-occur; 2 and 3 only supply negatives
        let mut walks = vec![vec![0, 1]; 200];
        walks.push(vec![2, 3]);
        let cfg = WalkConfig { epochs: 20, ..cfg() };
        let model = train_skipgram(&walks, 4, 8, &cfg).unwrap();
        let p = model.pair_probability(0, 1);
        assert!(p > 0.9 && p < 1.0, "σ = {p}");
    }

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f32> = (0..19).map(|i| i as f32 * 0.5).collect();
        let b: Vec<f32> = (0..19).map(|i| 1.0 - i as f32 * 0.1).collect();
        let naive: f32 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-4);
    }

    #[test]
    fn neg_log_sigmoid_is_stable() {
        assert!((neg_log_sigmoid(0.0) - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((neg_log_sigmoid(-100.0) - 100.0).abs() < 1e-9);
        assert!(neg_log_sigmoid(100.0) < 1e-30);
    }
}
