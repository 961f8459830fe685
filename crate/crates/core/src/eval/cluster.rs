//! k-means with k-means++ seeding, and normalized mutual information.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EcneError, Result};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub max_rounds: usize,
    /// Stop once no center moves farther than this (Euclidean).
    pub tolerance: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            max_rounds: 300,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub inertia: f64,
    pub rounds: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Euclidean k-means on the rows of `points`.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, cfg: &KMeansConfig) -> Result<Clustering> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(EcneError::InvalidArgument(format!(
            "k = {k} must be between 1 and the item count {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0xc1u64]));

    let mut centers = vec![points[rng.gen_range(0..n)].clone()];
    let mut closest: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let next = match WeightedIndex::new(&closest) {
            Ok(dist) => dist.sample(&mut rng),
            // every point already coincides with a center
            Err(_) => rng.gen_range(0..n),
        };
        centers.push(points[next].clone());
        let c = centers.last().expect("just pushed");
        for (d, p) in closest.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, c));
        }
    }

    let dim = points[0].len();
    let mut assignment = vec![0; n];
    let mut rounds = 0;
    while rounds < cfg.max_rounds {
        rounds += 1;
        for (a, p) in assignment.iter_mut().zip(points) {
            *a = nearest(p, &centers).0;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignment) {
            sizes[a] += 1;
            sums[a].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            let updated = if sizes[c] == 0 {
                // reseed an empty cluster at the point worst served by its center
                let far = (0..n)
                    .max_by(|&i, &j| {
                        let di = sq_dist(&points[i], &centers[assignment[i]]);
                        let dj = sq_dist(&points[j], &centers[assignment[j]]);
                        di.total_cmp(&dj).then(j.cmp(&i))
                    })
                    .expect("non-empty input");
                points[far].clone()
            } else {
                sums[c].iter().map(|s| s / sizes[c] as f64).collect()
            };
            shift = shift.max(sq_dist(&updated, &centers[c]).sqrt());
            centers[c] = updated;
        }
        if shift <= cfg.tolerance {
            break;
        }
    }
    let mut inertia = 0.0;
    for (a, p) in assignment.iter_mut().zip(points) {
        let (c, d) = nearest(p, &centers);
        *a = c;
        inertia += d;
    }
    Ok(Clustering {
        assignment,
        centers,
        inertia,
        rounds,
    })
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// True when the two labelings induce the same partition.
fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut fwd = BTreeMap::new();
    let mut back = BTreeMap::new();
    a.iter()
        .zip(b)
        .all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Mutual information over the arithmetic mean of the two entropies,
/// natural logs. Identical partitions score 1; otherwise a zero-entropy
/// side scores 0.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(EcneError::Shape(format!(
            "partitions of {} and {} items",
            a.len(),
            b.len()
        )));
    }
    if same_partition(a, b) {
        return Ok(1.0);
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ca: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cb: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
    }
    let ha = entropy(ca.values().copied(), n);
    let hb = entropy(cb.values().copied(), n);
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| {
            let pxy = c as f64 / n;
            pxy * (pxy * n * n / (ca[&x] as f64 * cb[&y] as f64)).ln()
        })
        .sum();
    Ok((mi / (0.5 * (ha + hb))).clamp(0.0, 1.0))
}
