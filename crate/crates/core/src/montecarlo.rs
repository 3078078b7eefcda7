//! Monte Carlo estimators used to validate the analytic results.
//!
//! Every replication owns the counter-based stream `(seed, index)`, and
//! per-replication results are reduced in index order, so estimates do not
//! depend on the thread count.

use std::f64::consts::TAU;
use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::csv_number;
use crate::error::{domain, Error, Result};
use crate::geometry::{PairConfiguration, Point2};
use crate::params::NetworkParams;
use crate::process::{ProcessType, ThinningRule};
use crate::quadrature::pairwise_sum;
use crate::rng::{self, StreamRng};
use crate::sampling::{
    poisson_count, sample_bipolar_with, SimulationWindow, Thinner, TransceiverPair,
    DEFAULT_MAX_POINTS,
};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Palm estimators abort when fewer than this fraction of attempts keep the planted pair.
pub const MIN_ACCEPTANCE_RATE: f64 = 1e-3;

/// Sample mean with its standard error and 95% normal interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_effective: usize,
    pub seed: u64,
}

impl EstimateWithCI {
    /// Estimate from i.i.d. replication values, summed in the given order.
    pub fn from_samples(samples: &[f64], seed: u64) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(domain("estimate needs at least one replication"));
        }
        let mean = pairwise_sum(samples.iter().copied()) / n as f64;
        let var = if n > 1 {
            pairwise_sum(samples.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64
        } else {
            0.0
        };
        let std_error = (var / n as f64).sqrt();
        Ok(Self {
            mean,
            std_error,
            ci_low: mean - Z95 * std_error,
            ci_high: mean + Z95 * std_error,
            n_effective: n,
            seed,
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Palm estimate together with the acceptance statistics of its conditioning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PalmEstimate {
    pub estimate: EstimateWithCI,
    pub accepted: u64,
    pub attempted: u64,
}

impl PalmEstimate {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.attempted as f64
    }
}

fn check_reps(n_reps: usize) -> Result<()> {
    if n_reps == 0 {
        return Err(domain("n_reps must be >= 1"));
    }
    Ok(())
}

/// Retained-transmitter count in the observation region divided by its area,
/// averaged over `n_reps` independent realizations.
pub fn estimate_intensity(
    params: &NetworkParams,
    process: ProcessType,
    window: &SimulationWindow,
    n_reps: usize,
    seed: u64,
) -> Result<EstimateWithCI> {
    params.validate()?;
    window.validate(params)?;
    check_reps(n_reps)?;
    let area = window.observation_area();
    let densities: Vec<f64> = (0..n_reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let pairs = sample_bipolar_with(window, params, &mut rng, DEFAULT_MAX_POINTS)?;
            let thinner = Thinner::for_process(&pairs, params, process);
            let count = (0..pairs.len())
                .filter(|&j| window.in_observation(pairs[j].tx) && thinner.is_retained(j))
                .count();
            Ok(count as f64 / area)
        })
        .collect::<Result<_>>()?;
    EstimateWithCI::from_samples(&densities, seed)
}

/// One accepted Palm replication.
struct PalmSample {
    /// `l(|x − z_o|)` of every retained interferer, in sampling order.
    gains: Vec<f64>,
    attempts: u64,
}

/// Acceptance-conditioned Palm sampler for a pair planted at the origin with
/// its receiver at `z_o = (d, 0)`.
///
/// The PPP inside `B(o, reach)` decides whether the planted pair survives;
/// the rest of the window is drawn only for accepted attempts. The two parts
/// are independent, so their union is a PPP on the whole window.
struct PalmSampler<'a> {
    params: &'a NetworkParams,
    process: ProcessType,
    window: &'a SimulationWindow,
    reach: f64,
    max_attempts: u64,
}

impl<'a> PalmSampler<'a> {
    fn new(
        params: &'a NetworkParams,
        process: ProcessType,
        window: &'a SimulationWindow,
    ) -> Result<Self> {
        params.validate()?;
        window.validate(params)?;
        let shape = process.exclusion(params);
        if !(params.d < shape.tx_radius) {
            return Err(domain(format!(
                "Palm interference needs d < R_cs (d = {}, R_cs = {})",
                params.d, shape.tx_radius
            )));
        }
        Ok(Self {
            params,
            process,
            window,
            reach: shape.reach(),
            max_attempts: (50.0 / MIN_ACCEPTANCE_RATE) as u64,
        })
    }

    fn planted(&self, rng: &mut StreamRng) -> TransceiverPair {
        TransceiverPair::new(Point2::ORIGIN, 0.0, rng.random::<f64>())
    }

    fn sample_inner(&self, rng: &mut StreamRng, out: &mut Vec<TransceiverPair>) -> Result<()> {
        let r = self.reach;
        let n = poisson_count(
            self.params.lambda_p * std::f64::consts::PI * r * r,
            rng,
            DEFAULT_MAX_POINTS,
        )?;
        for _ in 0..n {
            let tx = Point2::polar(r * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
            let theta = TAU * rng.random::<f64>();
            let mark = rng.random::<f64>();
            out.push(TransceiverPair::new(tx, theta, mark));
        }
        Ok(())
    }

    fn planted_survives(&self, pairs: &[TransceiverPair]) -> bool {
        let shape = self.process.exclusion(self.params);
        let o = pairs[0];
        let rx = o.receiver(shape.d);
        pairs[1..].iter().all(|p| {
            !shape.contains(o.tx, rx, p.tx)
                || match self.process.rule() {
                    ThinningRule::Void => false,
                    ThinningRule::EarliestMark => p.mark > o.mark,
                }
        })
    }

    /// Replication `index`: attempts until the planted pair is retained.
    fn replicate(&self, seed: u64, index: u64) -> Result<Option<PalmSample>> {
        let mut rng = rng::stream(seed, index);
        let mut pairs = Vec::new();
        for attempt in 1..=self.max_attempts {
            pairs.clear();
            pairs.push(self.planted(&mut rng));
            self.sample_inner(&mut rng, &mut pairs)?;
            if !self.planted_survives(&pairs) {
                continue;
            }
            let r2 = self.reach * self.reach;
            let outer =
                sample_bipolar_with(self.window, self.params, &mut rng, DEFAULT_MAX_POINTS)?;
            pairs.extend(
                outer
                    .into_iter()
                    .filter(|p| p.tx.dist2(Point2::ORIGIN) > r2),
            );
            let thinner = Thinner::for_process(&pairs, self.params, self.process);
            let z = pairs[0].receiver(self.params.d);
            let gains = (1..pairs.len())
                .filter(|&j| self.window.in_observation(pairs[j].tx) && thinner.is_retained(j))
                .map(|j| self.params.path_loss(pairs[j].tx.dist(z)))
                .collect();
            return Ok(Some(PalmSample {
                gains,
                attempts: attempt,
            }));
        }
        Ok(None)
    }

    /// Accepted replications `0..n_reps`, in index order.
    fn run(&self, n_reps: usize, seed: u64) -> Result<(Vec<PalmSample>, u64)> {
        check_reps(n_reps)?;
        let pilot = n_reps.min(64);
        let mut samples = Vec::with_capacity(n_reps);
        let mut attempted = 0u64;
        for range in [0..pilot, pilot..n_reps] {
            let batch: Vec<Option<PalmSample>> = range
                .into_par_iter()
                .map(|i| self.replicate(seed, i as u64))
                .collect::<Result<_>>()?;
            for s in batch {
                match s {
                    Some(s) => {
                        attempted += s.attempts;
                        samples.push(s);
                    }
                    None => {
                        attempted += self.max_attempts;
                        return Err(self.too_low(samples.len() as u64, attempted));
                    }
                }
            }
            if (samples.len() as f64) < MIN_ACCEPTANCE_RATE * attempted as f64 {
                return Err(self.too_low(samples.len() as u64, attempted));
            }
        }
        Ok((samples, attempted))
    }

    fn too_low(&self, accepted: u64, attempted: u64) -> Error {
        Error::AcceptanceTooLow {
            rate: accepted as f64 / attempted as f64,
            min_rate: MIN_ACCEPTANCE_RATE,
            accepted,
            attempted,
        }
    }
}

/// Palm mean interference at the receiver of a retained pair, over `n_reps`
/// accepted replications.
///
/// Interferers are the retained transmitters in the observation region; the
/// guard margin makes their retention exact.
pub fn palm_interference(
    params: &NetworkParams,
    process: ProcessType,
    window: &SimulationWindow,
    n_reps: usize,
    seed: u64,
) -> Result<PalmEstimate> {
    let sampler = PalmSampler::new(params, process, window)?;
    let (samples, attempted) = sampler.run(n_reps, seed)?;
    let values: Vec<f64> = samples
        .iter()
        .map(|s| params.p_t * pairwise_sum(s.gains.iter().copied()))
        .collect();
    Ok(PalmEstimate {
        estimate: EstimateWithCI::from_samples(&values, seed)?,
        accepted: samples.len() as u64,
        attempted,
    })
}

/// Empirical SIR ccdf `P(SIR > T)` under unit-mean Rayleigh fading, one
/// estimate per threshold in `thresholds` (linear). All thresholds share the
/// same samples. `SIR = +∞` when there are no interferers.
pub fn estimate_success_prob(
    params: &NetworkParams,
    process: ProcessType,
    thresholds: &[f64],
    window: &SimulationWindow,
    n_reps: usize,
    seed: u64,
) -> Result<Vec<EstimateWithCI>> {
    if let Some(t) = thresholds.iter().find(|t| !(**t >= 0.0)) {
        return Err(domain(format!("SIR thresholds must be >= 0, got {t}")));
    }
    let sampler = PalmSampler::new(params, process, window)?;
    let (samples, _) = sampler.run(n_reps, seed)?;
    // fading uses a stream family disjoint from the geometry streams
    let fading_seed = seed ^ 0x5EED_FADE_0000_0001;
    let signal = params.path_loss(params.d);
    let sirs: Vec<f64> = samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = rng::stream(fading_seed, i as u64);
            let h0: f64 = Exp1.sample(&mut rng);
            let interference = pairwise_sum(s.gains.iter().map(|g| {
                let h: f64 = Exp1.sample(&mut rng);
                h * g
            }));
            if interference == 0.0 {
                f64::INFINITY
            } else {
                h0 * signal / interference
            }
        })
        .collect();
    thresholds
        .iter()
        .map(|&t| {
            let hits: Vec<f64> = sirs.iter().map(|&s| f64::from(u8::from(s > t))).collect();
            EstimateWithCI::from_samples(&hits, seed)
        })
        .collect()
}

/// Frequency with which two pairs planted in configuration `config` are both
/// retained inside an independent PPP background, over `n_reps` replications.
pub fn two_pair_retention(
    config: &PairConfiguration,
    params: &NetworkParams,
    process: ProcessType,
    n_reps: usize,
    seed: u64,
) -> Result<EstimateWithCI> {
    params.validate()?;
    check_reps(n_reps)?;
    let shape = process.exclusion(params);
    let rule = process.rule();
    // only background points within reach of either transmitter matter
    let radius = config.r + shape.reach();
    let mean = params.lambda_p * std::f64::consts::PI * radius * radius;
    let b_tx = config.second_tx();
    let hits: Vec<f64> = (0..n_reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let mut pairs = vec![
                TransceiverPair::new(Point2::ORIGIN, 0.0, rng.random::<f64>()),
                TransceiverPair::new(b_tx, config.theta, rng.random::<f64>()),
            ];
            let n = poisson_count(mean, &mut rng, DEFAULT_MAX_POINTS)?;
            for _ in 0..n {
                let tx = Point2::polar(
                    radius * rng.random::<f64>().sqrt(),
                    TAU * rng.random::<f64>(),
                );
                let theta = TAU * rng.random::<f64>();
                let mark = rng.random::<f64>();
                pairs.push(TransceiverPair::new(tx, theta, mark));
            }
            let thinner = Thinner::new(&pairs, shape, rule);
            let both = thinner.is_retained(0) && thinner.is_retained(1);
            Ok(f64::from(u8::from(both)))
        })
        .collect::<Result<_>>()?;
    EstimateWithCI::from_samples(&hits, seed)
}

pub const ESTIMATE_CSV_HEADER: &str = "quantity,param_point,mean,stderr,ci_low,ci_high,n,seed";

/// One row of an estimate dump.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub quantity: String,
    pub param_point: String,
    pub estimate: EstimateWithCI,
}

/// Write estimates as CSV with header [`ESTIMATE_CSV_HEADER`].
pub fn write_estimates_csv<W: Write>(mut out: W, rows: &[EstimateRow]) -> io::Result<()> {
    writeln!(out, "{ESTIMATE_CSV_HEADER}")?;
    for r in rows {
        let e = &r.estimate;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.quantity,
            r.param_point,
            csv_number(e.mean),
            csv_number(e.std_error),
            csv_number(e.ci_low),
            csv_number(e.ci_high),
            e.n_effective,
            e.seed
        )?;
    }
    Ok(())
}
