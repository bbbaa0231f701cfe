//! Seeded Monte Carlo simulation of counting paths and subordinated walks.
//!
//! Waiting times are drawn by exact inverse-CDF lookup against a tabulated
//! distribution function; the table grows by doubling when a draw lands
//! beyond it and refuses (with `TAIL_CAP_EXCEEDED`) once the configured cap
//! is reached, which heavy-tailed laws will eventually hit.
//!
//! Reproducibility contract: all randomness comes from ChaCha12 seeded with
//! `SimConfig::seed`, and path `i` uses the independent substream
//! `set_stream(1 + i)`. Every call to [`WaitingSampler::sample`] or
//! [`WaitingSampler::sample_capped`] consumes exactly one uniform draw, and
//! every jump of a walk path consumes exactly one more, so identical
//! configurations reproduce results bit for bit regardless of how many paths
//! ran before or after.

use crate::counting::{self, PdtpParams};
use crate::dtrw::check_stochastic;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Waiting-time law driving a renewal simulation.
#[derive(Debug, Clone)]
pub enum WaitingLaw {
    /// Prabhakar-type discrete waiting time.
    Pdtp(PdtpParams),
    /// Sibuya(alpha) waiting time, `P(W = t) = (-1)^{t+1} C(alpha, t)`.
    Sibuya { alpha: f64 },
    /// Deterministic waiting time of exactly `period` steps.
    Fixed { period: usize },
}

impl WaitingLaw {
    /// Distribution function table `P(W <= t)` for `t = 0..=len`.
    fn cdf_table(&self, len: usize) -> Result<Vec<f64>> {
        match self {
            WaitingLaw::Pdtp(params) => {
                let pmf = counting::pdtp_waiting_pmf(params, len)?;
                Ok(crate::gfcalc::cumulate(&pmf).coeffs)
            }
            WaitingLaw::Sibuya { alpha } => {
                let pmf = counting::sibuya_pmf(*alpha, len)?;
                Ok(crate::gfcalc::cumulate(&pmf).coeffs)
            }
            WaitingLaw::Fixed { period } => {
                if *period == 0 {
                    return Err(Error::invalid_params(
                        "fixed waiting period must be >= 1",
                    ));
                }
                Ok((0..=len).map(|t| if t >= *period { 1.0 } else { 0.0 }).collect())
            }
        }
    }
}

/// Inverse-CDF sampler with an adaptively doubled lookup table.
#[derive(Debug, Clone)]
pub struct WaitingSampler {
    law: WaitingLaw,
    /// `cdf[t] = P(W <= t)`, `t = 0..=tabulated`; `cdf[0] = 0`.
    cdf: Vec<f64>,
    table_cap: usize,
}

impl WaitingSampler {
    /// Builds a sampler with `P(W <= t)` tabulated up to `t = initial_len`,
    /// allowed to grow up to `table_cap`.
    pub fn new(law: WaitingLaw, initial_len: usize, table_cap: usize) -> Result<Self> {
        if initial_len == 0 || table_cap < initial_len {
            return Err(Error::invalid_params(format!(
                "need 1 <= initial_len <= table_cap, got initial_len = {initial_len}, \
                 table_cap = {table_cap}"
            )));
        }
        let cdf = law.cdf_table(initial_len)?;
        Ok(Self {
            law,
            cdf,
            table_cap,
        })
    }

    /// Largest waiting time currently tabulated.
    pub fn tabulated(&self) -> usize {
        self.cdf.len() - 1
    }

    /// Probability mass covered by the current table.
    pub fn tabulated_mass(&self) -> f64 {
        *self.cdf.last().expect("table is never empty")
    }

    /// Grows the table so that `P(W <= needed)` is tabulated, doubling as it
    /// goes; fails with `TAIL_CAP_EXCEEDED` when that requires exceeding the
    /// cap.
    fn ensure_tabulated(&mut self, needed: usize) -> Result<()> {
        if needed <= self.tabulated() {
            return Ok(());
        }
        if needed > self.table_cap {
            return Err(Error::TailCapExceeded {
                cap: self.table_cap,
                tabulated_mass: self.tabulated_mass(),
            });
        }
        let new_len = (self.tabulated() * 2).clamp(needed, self.table_cap);
        self.cdf = self.law.cdf_table(new_len)?;
        Ok(())
    }

    /// Smallest `t` with `cdf[t] > u`, i.e. the exact inverse-CDF image of
    /// `u` under the tabulated law, or `None` if `u` lies beyond the table.
    fn lookup(&self, u: f64) -> Option<usize> {
        if u >= self.tabulated_mass() {
            return None;
        }
        Some(self.cdf.partition_point(|&c| c <= u))
    }

    /// Draws one waiting time, extending the table as needed. Consumes
    /// exactly one uniform draw. Heavy-tailed laws eventually push a draw
    /// past any finite table; that returns `TAIL_CAP_EXCEEDED`.
    pub fn sample<R: Rng>(&mut self, rng: &mut R) -> Result<usize> {
        let u: f64 = rng.gen();
        loop {
            if let Some(w) = self.lookup(u) {
                return Ok(w);
            }
            let grown = (self.tabulated() * 2).min(self.table_cap);
            if grown <= self.tabulated() {
                return Err(Error::TailCapExceeded {
                    cap: self.table_cap,
                    tabulated_mass: self.tabulated_mass(),
                });
            }
            self.cdf = self.law.cdf_table(grown)?;
        }
    }

    /// Draws one waiting time conditioned on the horizon: returns
    /// `Some(w)` when the wait is `<= remaining` and `None` when the renewal
    /// falls beyond it. Consumes exactly one uniform draw either way and
    /// never tabulates past `remaining`, so a horizon within the cap can
    /// always be simulated even for heavy-tailed laws.
    pub fn sample_capped<R: Rng>(
        &mut self,
        rng: &mut R,
        remaining: usize,
    ) -> Result<Option<usize>> {
        let u: f64 = rng.gen();
        if remaining == 0 {
            return Ok(None);
        }
        self.ensure_tabulated(remaining)?;
        if u >= self.cdf[remaining] {
            return Ok(None);
        }
        Ok(Some(self.cdf.partition_point(|&c| c <= u)))
    }
}

/// Configuration of a Monte Carlo run.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// Master seed; two runs with equal configuration are bitwise identical.
    pub seed: u64,
    /// Number of independent paths.
    pub n_paths: usize,
    /// Horizon: paths are observed at `t = 0..=t_max`.
    pub t_max: usize,
    /// Largest waiting time the sampler may tabulate; must cover `t_max`.
    pub table_cap: usize,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::invalid_params("n_paths must be >= 1"));
        }
        if self.t_max == 0 {
            return Err(Error::invalid_params("t_max must be >= 1"));
        }
        if self.table_cap < self.t_max {
            return Err(Error::invalid_params(format!(
                "table_cap ({}) must cover the horizon t_max ({})",
                self.table_cap, self.t_max
            )));
        }
        Ok(())
    }

    fn path_rng(&self, path: usize) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(1 + path as u64);
        rng
    }
}

/// Empirical state occupation frequencies.
///
/// `freq[n][t]` estimates `P(N(t) = n)`; `stderr` holds the plug-in binomial
/// standard errors `sqrt(f (1 - f) / n_paths)` (zero where `f` is 0 or 1, so
/// prefer analytic-probability bands when testing rare cells).
#[derive(Debug, Clone)]
pub struct EmpiricalPanel {
    pub freq: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub n_paths: usize,
}

/// Empirical node occupation frequencies of a walk started at `start`.
/// `freq[t][j]` estimates `P(X_t = j | X_0 = start)`.
#[derive(Debug, Clone)]
pub struct EmpiricalWalk {
    pub freq: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub n_paths: usize,
    pub start: usize,
}

fn to_freq(counts: Vec<Vec<u64>>, n_paths: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = n_paths as f64;
    let freq: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / n).collect())
        .collect();
    let stderr = freq
        .iter()
        .map(|row| row.iter().map(|&f| (f * (1.0 - f) / n).sqrt()).collect())
        .collect();
    (freq, stderr)
}

/// Simulates `config.n_paths` renewal paths and tallies the arrival count at
/// every step: `freq[n][t]` for `n, t = 0..=t_max` (more than `t_max`
/// arrivals cannot occur because waits are at least one step).
pub fn simulate_states(law: &WaitingLaw, config: &SimConfig) -> Result<EmpiricalPanel> {
    config.validate()?;
    let t_max = config.t_max;
    let mut sampler = WaitingSampler::new(law.clone(), t_max, config.table_cap)?;
    let mut counts = vec![vec![0u64; t_max + 1]; t_max + 1];
    for path in 0..config.n_paths {
        let mut rng = config.path_rng(path);
        let mut t = 0usize; // start of the current constant-count stretch
        let mut n = 0usize;
        loop {
            match sampler.sample_capped(&mut rng, t_max - t)? {
                Some(w) => {
                    for s in t..t + w {
                        counts[n][s] += 1;
                    }
                    t += w;
                    n += 1;
                }
                None => {
                    for s in t..=t_max {
                        counts[n][s] += 1;
                    }
                    break;
                }
            }
        }
    }
    let (freq, stderr) = to_freq(counts, config.n_paths);
    Ok(EmpiricalPanel {
        freq,
        stderr,
        n_paths: config.n_paths,
    })
}

/// Simulates subordinated walk paths on the chain `h` from node `start`:
/// the walker draws renewal waiting times and performs one `h`-jump per
/// arrival. Returns node occupation frequencies per step.
pub fn simulate_walk(
    law: &WaitingLaw,
    h: &DMatrix<f64>,
    start: usize,
    config: &SimConfig,
) -> Result<EmpiricalWalk> {
    config.validate()?;
    check_stochastic(h)?;
    let n_nodes = h.nrows();
    if start >= n_nodes {
        return Err(Error::invalid_params(format!(
            "start node {start} out of range for {n_nodes} nodes"
        )));
    }
    // Per-row jump distribution functions.
    let row_cdf: Vec<Vec<f64>> = (0..n_nodes)
        .map(|i| {
            let mut acc = 0.0;
            (0..n_nodes)
                .map(|j| {
                    acc += h[(i, j)];
                    acc
                })
                .collect()
        })
        .collect();
    let t_max = config.t_max;
    let mut sampler = WaitingSampler::new(law.clone(), t_max, config.table_cap)?;
    let mut counts = vec![vec![0u64; n_nodes]; t_max + 1];
    for path in 0..config.n_paths {
        let mut rng = config.path_rng(path);
        let mut t = 0usize;
        let mut node = start;
        loop {
            match sampler.sample_capped(&mut rng, t_max - t)? {
                Some(w) => {
                    for s in t..t + w {
                        counts[s][node] += 1;
                    }
                    t += w;
                    let u: f64 = rng.gen();
                    let cdf = &row_cdf[node];
                    node = cdf.partition_point(|&c| c <= u).min(n_nodes - 1);
                }
                None => {
                    for s in t..=t_max {
                        counts[s][node] += 1;
                    }
                    break;
                }
            }
        }
    }
    let (freq, stderr) = to_freq(counts, config.n_paths);
    Ok(EmpiricalWalk {
        freq,
        stderr,
        n_paths: config.n_paths,
        start,
    })
}
