//! Direct simulation of the branching process: statistical oracles for the
//! rare-event ratios and for the martingale-limit density.
//!
//! Reproducibility: trials are grouped into fixed-size batches; batch `b`
//! draws from `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(b)`, and
//! batch results are merged in batch order. Results therefore depend only on
//! `(seed, trials)`, not on the thread count.

use crate::curve::{CurveMeta, DensityCurve};
use crate::error::{Error, Result};
use crate::model::{Environment, OffspringPgf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

/// Above this population a step samples per-offspring-count multinomial
/// blocks (sequential exact binomials) instead of per-individual draws.
const POP_BATCH_THRESHOLD: u64 = 10_000;

/// Trials per RNG stream.
const TRIALS_PER_STREAM: u64 = 1 << 14;

#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// Starting population.
    pub initial: u64,
    /// Number of generations to simulate.
    pub horizon: u32,
    /// Independent histories.
    pub trials: u64,
    /// Base RNG seed (see module docs for the stream mapping).
    pub seed: u64,
}

/// Total offspring of `pop` individuals drawing independently from the
/// distribution. Exact for both paths: the multinomial block counts have
/// precisely the same law as summing per-individual draws.
pub fn simulate_step<G: Rng + ?Sized>(pop: u64, pgf: &OffspringPgf, rng: &mut G) -> u64 {
    if pop == 0 {
        return 0;
    }
    let probs = pgf.probs();
    if probs.len() == 1 {
        // unit offspring is deterministic
        return pop;
    }
    if pop <= POP_BATCH_THRESHOLD {
        let mut total = 0u64;
        for _ in 0..pop {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut count = probs.len() as u64;
            for (i, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    count = i as u64 + 1;
                    break;
                }
            }
            total += count;
        }
        total
    } else {
        let mut total = 0u64;
        let mut remaining = pop;
        let mut rem_prob = 1.0f64;
        for (i, &p) in probs[..probs.len() - 1].iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if p <= 0.0 {
                rem_prob -= p;
                continue;
            }
            let ratio = (p / rem_prob).clamp(0.0, 1.0);
            let c = Binomial::new(remaining, ratio)
                .expect("probability in [0,1]")
                .sample(rng);
            total += (i as u64 + 1) * c;
            remaining -= c;
            rem_prob -= p;
        }
        total + probs.len() as u64 * remaining
    }
}

/// Cumulative member weights for one environment draw per generation.
struct MemberSampler<'a> {
    env: &'a Environment,
    cum: Vec<f64>,
}

impl<'a> MemberSampler<'a> {
    fn new(env: &'a Environment) -> Self {
        let mut cum = Vec::with_capacity(env.members().len());
        let mut acc = 0.0;
        for m in env.members() {
            acc += m.weight;
            cum.push(acc);
        }
        MemberSampler { env, cum }
    }

    fn draw<G: Rng + ?Sized>(&self, rng: &mut G) -> &'a OffspringPgf {
        let total = *self.cum.last().unwrap();
        let u: f64 = rng.random::<f64>() * total;
        let idx = self
            .cum
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cum.len() - 1);
        &self.env.members()[idx].pgf
    }
}

fn run_trial<G: Rng + ?Sized>(
    sampler: &MemberSampler,
    initial: u64,
    horizon: u32,
    rng: &mut G,
) -> u64 {
    let mut pop = initial;
    for _ in 0..horizon {
        let pgf = sampler.draw(rng);
        pop = simulate_step(pop, pgf, rng);
    }
    pop
}

/// Runs `cfg.trials` histories in deterministic parallel batches, folding
/// each final population into the accumulator.
fn accumulate_trials<A, F>(env: &Environment, initial: u64, cfg: &SimConfig, fold: F) -> Vec<A>
where
    A: Default + Send,
    F: Fn(&mut A, u64) + Send + Sync,
{
    let sampler = MemberSampler::new(env);
    let batches = cfg.trials.div_ceil(TRIALS_PER_STREAM);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let count = TRIALS_PER_STREAM.min(cfg.trials - b * TRIALS_PER_STREAM);
            let mut acc = A::default();
            for _ in 0..count {
                let end = run_trial(&sampler, initial, cfg.horizon, &mut rng);
                fold(&mut acc, end);
            }
            acc
        })
        .collect()
}

/// Monte Carlo estimate of `P(X_t = n) / P(X_t = j)` for the process started
/// from j individuals (the configured `initial` is overridden by `j`).
/// Returns the ratio and its delta-method standard error.
pub fn estimate_ratio(env: &Environment, n: u64, j: u64, cfg: &SimConfig) -> Result<(f64, f64)> {
    if j < 1 {
        return Err(Error::OutOfRange("conditioning state j must be >= 1".into()));
    }
    #[derive(Default)]
    struct Counts {
        at_n: u64,
        at_j: u64,
    }
    let parts = accumulate_trials::<Counts, _>(env, j, cfg, |acc, end| {
        if end == n {
            acc.at_n += 1;
        }
        if end == j {
            acc.at_j += 1;
        }
    });
    let mut cnt_n = 0u64;
    let mut cnt_j = 0u64;
    for p in &parts {
        cnt_n += p.at_n;
        cnt_j += p.at_j;
    }
    if cnt_j == 0 {
        return Err(Error::EmptyConditioning { j });
    }
    if n == j {
        return Ok((1.0, 0.0));
    }
    let trials = cfg.trials as f64;
    let (a, b) = (cnt_n as f64, cnt_j as f64);
    let (pa, pb) = (a / trials, b / trials);
    let r = a / b;
    // multinomial covariance of the two counts through the ratio
    let var_a = trials * pa * (1.0 - pa);
    let var_b = trials * pb * (1.0 - pb);
    let cov = -trials * pa * pb;
    let var_r = (var_a - 2.0 * r * cov + r * r * var_b) / (b * b);
    Ok((r, var_r.max(0.0).sqrt()))
}

/// Histogram of `X_t / E^t` over independent trials, normalized by trial
/// count and bin width (a density estimate on the requested window).
/// Bin counts are returned in the auxiliary column; the sample mean and
/// standard deviation of the scaled population go into the metadata.
pub fn martingale_histogram(
    env: &Environment,
    cfg: &SimConfig,
    bins: usize,
    x_range: (f64, f64),
) -> Result<DensityCurve> {
    if bins < 10 {
        return Err(Error::OutOfRange("need at least 10 bins".into()));
    }
    let (lo, hi) = x_range;
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::OutOfRange(format!(
            "bad histogram range [{lo}, {hi})"
        )));
    }
    struct Acc {
        counts: Vec<u64>,
        sum: f64,
        sum_sq: f64,
    }
    impl Default for Acc {
        fn default() -> Self {
            Acc {
                counts: Vec::new(),
                sum: 0.0,
                sum_sq: 0.0,
            }
        }
    }
    let scale = env.common_mean().powi(cfg.horizon as i32);
    let width = (hi - lo) / bins as f64;
    let parts = accumulate_trials::<Acc, _>(env, cfg.initial, cfg, |acc, end| {
        if acc.counts.is_empty() {
            acc.counts = vec![0u64; bins];
        }
        let w = end as f64 / scale;
        acc.sum += w;
        acc.sum_sq += w * w;
        if w >= lo && w < hi {
            acc.counts[((w - lo) / width) as usize] += 1;
        }
    });
    let mut counts = vec![0u64; bins];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for p in &parts {
        if !p.counts.is_empty() {
            for (c, pc) in counts.iter_mut().zip(&p.counts) {
                *c += pc;
            }
        }
        sum += p.sum;
        sum_sq += p.sum_sq;
    }
    let trials = cfg.trials as f64;
    let mean = sum / trials;
    let sd = ((sum_sq - trials * mean * mean) / (trials - 1.0).max(1.0)).max(0.0);
    let curve = DensityCurve {
        xs: (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect(),
        ps: counts
            .iter()
            .map(|&c| c as f64 / (trials * width))
            .collect(),
        aux: counts.iter().map(|&c| c as f64).collect(),
        meta: CurveMeta::MonteCarlo {
            horizon: cfg.horizon,
            trials: cfg.trials,
            seed: cfg.seed,
            bins,
            sample_mean: mean,
            sample_sd: sd.sqrt(),
        },
    };
    curve.assert_valid();
    Ok(curve)
}
