//! Poisson bipolar sampling and dual-zone / Matérn thinning.

use std::f64::consts::TAU;
use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::geometry::{ExclusionShape, Point2};
use crate::params::NetworkParams;
use crate::process::{ProcessType, ThinningRule};
use crate::rng;

/// Default cap on the expected number of sampled points per realization.
pub const DEFAULT_MAX_POINTS: usize = 10_000_000;

/// A potential transmitter with its receiver orientation, time mark and access indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransceiverPair {
    pub tx: Point2,
    /// Receiver direction in `[0, 2π)`.
    pub theta: f64,
    /// Contention time stamp in `[0, 1]`; ignored by void (Type I) thinning.
    pub mark: f64,
    /// Medium access indicator `e`.
    pub active: bool,
}

impl TransceiverPair {
    pub fn new(tx: Point2, theta: f64, mark: f64) -> Self {
        Self {
            tx,
            theta,
            mark,
            active: false,
        }
    }

    pub fn receiver(&self, d: f64) -> Point2 {
        self.tx.offset(d, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowShape {
    /// Axis-aligned square of the given side, centred at the origin.
    Square { side: f64 },
    /// Disk of the given radius, centred at the origin.
    Disk { radius: f64 },
}

/// Observation region plus a guard margin. Points are sampled over the
/// enlarged region so every pair whose exclusion region can reach the
/// observation region sees its full neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationWindow {
    pub shape: WindowShape,
    pub guard: f64,
}

impl SimulationWindow {
    pub fn square(side: f64, guard: f64) -> Self {
        Self {
            shape: WindowShape::Square { side },
            guard,
        }
    }

    pub fn disk(radius: f64, guard: f64) -> Self {
        Self {
            shape: WindowShape::Disk { radius },
            guard,
        }
    }

    /// Smallest admissible guard margin, `R_cs + R_tx + d`.
    pub fn min_guard(params: &NetworkParams) -> f64 {
        params.r_cs + params.r_tx + params.d
    }

    /// Square window of side `side` with the smallest admissible guard.
    pub fn square_for(side: f64, params: &NetworkParams) -> Self {
        Self::square(side, Self::min_guard(params))
    }

    pub fn disk_for(radius: f64, params: &NetworkParams) -> Self {
        Self::disk(radius, Self::min_guard(params))
    }

    pub fn validate(&self, params: &NetworkParams) -> Result<()> {
        let extent = match self.shape {
            WindowShape::Square { side } => side,
            WindowShape::Disk { radius } => radius,
        };
        if !(extent.is_finite() && extent > 0.0) {
            return Err(domain(format!("window extent must be > 0, got {extent}")));
        }
        let need = Self::min_guard(params);
        if !(self.guard.is_finite() && self.guard >= need * (1.0 - 1e-12)) {
            return Err(domain(format!(
                "guard margin {} is below R_cs + R_tx + d = {need}",
                self.guard
            )));
        }
        Ok(())
    }

    pub fn observation_area(&self) -> f64 {
        match self.shape {
            WindowShape::Square { side } => side * side,
            WindowShape::Disk { radius } => std::f64::consts::PI * radius * radius,
        }
    }

    /// Area of the observation region enlarged by the guard margin.
    pub fn sampling_area(&self) -> f64 {
        match self.shape {
            WindowShape::Square { side } => {
                let s = side + 2.0 * self.guard;
                s * s
            }
            WindowShape::Disk { radius } => {
                let r = radius + self.guard;
                std::f64::consts::PI * r * r
            }
        }
    }

    pub fn in_observation(&self, p: Point2) -> bool {
        match self.shape {
            WindowShape::Square { side } => {
                let h = 0.5 * side;
                p.x.abs() <= h && p.y.abs() <= h
            }
            WindowShape::Disk { radius } => p.dist2(Point2::ORIGIN) <= radius * radius,
        }
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        match self.shape {
            WindowShape::Square { side } => {
                let h = 0.5 * side + self.guard;
                let x = (rng.random::<f64>() * 2.0 - 1.0) * h;
                let y = (rng.random::<f64>() * 2.0 - 1.0) * h;
                Point2::new(x, y)
            }
            WindowShape::Disk { radius } => {
                let r = (radius + self.guard) * rng.random::<f64>().sqrt();
                Point2::polar(r, TAU * rng.random::<f64>())
            }
        }
    }
}

/// Sample a Poisson bipolar realization over the window (observation plus guard).
///
/// Deterministic for a fixed seed: draws come from replication stream 0.
pub fn sample_bipolar(
    window: &SimulationWindow,
    params: &NetworkParams,
    seed: u64,
) -> Result<Vec<TransceiverPair>> {
    let mut rng = rng::stream(seed, 0);
    sample_bipolar_with(window, params, &mut rng, DEFAULT_MAX_POINTS)
}

/// Sample with an explicit random source and point cap.
pub fn sample_bipolar_with<R: Rng + ?Sized>(
    window: &SimulationWindow,
    params: &NetworkParams,
    rng: &mut R,
    max_points: usize,
) -> Result<Vec<TransceiverPair>> {
    window.validate(params)?;
    let mean = params.lambda_p * window.sampling_area();
    let n = poisson_count(mean, rng, max_points)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let tx = window.sample_point(rng);
        let theta = TAU * rng.random::<f64>();
        let mark = rng.random::<f64>();
        out.push(TransceiverPair::new(tx, theta, mark));
    }
    Ok(out)
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(
    mean: f64,
    rng: &mut R,
    max_points: usize,
) -> Result<usize> {
    if !(mean.is_finite() && mean >= 0.0) {
        return Err(domain(format!("invalid Poisson mean {mean}")));
    }
    if mean > max_points as f64 {
        return Err(Error::Resource {
            expected: mean,
            cap: max_points,
        });
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| domain(format!("Poisson({mean}): {e}")))?;
    Ok(dist.sample(rng) as usize)
}

/// Uniform bucket grid over transmitter positions for fixed-radius neighbour queries.
pub struct NeighborGrid {
    min: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl NeighborGrid {
    pub fn new(points: &[Point2], cell: f64) -> Self {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        if points.is_empty() {
            min = Point2::ORIGIN;
            max = Point2::ORIGIN;
        }
        let mut cell = if cell > 0.0 { cell } else { 1.0 };
        let span = (max.x - min.x).max(max.y - min.y).max(cell);
        // keep the bucket array O(n)
        let budget = (4 * points.len()).max(16) as f64;
        if (span / cell).powi(2) > budget {
            cell = span / budget.sqrt();
        }
        let nx = ((max.x - min.x) / cell).floor() as usize + 1;
        let ny = ((max.y - min.y) / cell).floor() as usize + 1;

        let mut counts = vec![0usize; nx * ny + 1];
        let keys: Vec<usize> = points
            .iter()
            .map(|p| {
                let ix = (((p.x - min.x) / cell) as usize).min(nx - 1);
                let iy = (((p.y - min.y) / cell) as usize).min(ny - 1);
                iy * nx + ix
            })
            .collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0usize; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            items[fill[k]] = i;
            fill[k] += 1;
        }
        Self {
            min,
            cell,
            nx,
            ny,
            starts: counts,
            items,
        }
    }

    /// Visit every indexed point whose bucket intersects the square of half-side `radius` around `p`.
    pub fn for_each_candidate(&self, p: Point2, radius: f64, mut f: impl FnMut(usize) -> bool) {
        let lo_x = ((p.x - radius - self.min.x) / self.cell).floor();
        let hi_x = ((p.x + radius - self.min.x) / self.cell).floor();
        let lo_y = ((p.y - radius - self.min.y) / self.cell).floor();
        let hi_y = ((p.y + radius - self.min.y) / self.cell).floor();
        if hi_x < 0.0 || hi_y < 0.0 {
            return;
        }
        let ix0 = lo_x.max(0.0) as usize;
        let iy0 = lo_y.max(0.0) as usize;
        let ix1 = (hi_x as usize).min(self.nx - 1);
        let iy1 = (hi_y as usize).min(self.ny - 1);
        if ix0 > ix1 || iy0 > iy1 {
            return;
        }
        for iy in iy0..=iy1 {
            let row = iy * self.nx;
            for &idx in &self.items[self.starts[row + ix0]..self.starts[row + ix1 + 1]] {
                if !f(idx) {
                    return;
                }
            }
        }
    }
}

/// Access-indicator evaluator over one realization of potential transmitters.
///
/// Suppression is always evaluated against all potential transmitters, never
/// only against retained ones.
pub struct Thinner<'a> {
    pairs: &'a [TransceiverPair],
    positions: Vec<Point2>,
    receivers: Vec<Point2>,
    shape: ExclusionShape,
    rule: ThinningRule,
    grid: NeighborGrid,
}

impl<'a> Thinner<'a> {
    pub fn new(pairs: &'a [TransceiverPair], shape: ExclusionShape, rule: ThinningRule) -> Self {
        let positions: Vec<Point2> = pairs.iter().map(|p| p.tx).collect();
        let receivers = pairs.iter().map(|p| p.receiver(shape.d)).collect();
        let grid = NeighborGrid::new(&positions, shape.reach());
        Self {
            pairs,
            positions,
            receivers,
            shape,
            rule,
            grid,
        }
    }

    pub fn for_process(
        pairs: &'a [TransceiverPair],
        params: &NetworkParams,
        process: ProcessType,
    ) -> Self {
        Self::new(pairs, process.exclusion(params), process.rule())
    }

    /// Access indicator `e_i` of pair `i`.
    pub fn is_retained(&self, i: usize) -> bool {
        let tx = self.positions[i];
        let rx = self.receivers[i];
        let mark = self.pairs[i].mark;
        let mut retained = true;
        self.grid.for_each_candidate(tx, self.shape.reach(), |j| {
            if j == i || !self.shape.contains(tx, rx, self.positions[j]) {
                return true;
            }
            let blocks = match self.rule {
                ThinningRule::Void => true,
                ThinningRule::EarliestMark => self.pairs[j].mark <= mark,
            };
            if blocks {
                retained = false;
            }
            !blocks
        });
        retained
    }

    pub fn indicators(&self) -> Vec<bool> {
        (0..self.pairs.len())
            .into_par_iter()
            .map(|i| self.is_retained(i))
            .collect()
    }
}

/// Set the access indicator of every pair under `process`.
pub fn apply_thinning(pairs: &mut [TransceiverPair], params: &NetworkParams, process: ProcessType) {
    let flags = Thinner::for_process(pairs, params, process).indicators();
    for (p, e) in pairs.iter_mut().zip(flags) {
        p.active = e;
    }
}

/// Retained pairs (with `active = true`) under `process`, in input order.
pub fn thin(
    pairs: &[TransceiverPair],
    params: &NetworkParams,
    process: ProcessType,
) -> Vec<TransceiverPair> {
    let flags = Thinner::for_process(pairs, params, process).indicators();
    pairs
        .iter()
        .zip(flags)
        .filter(|(_, e)| *e)
        .map(|(p, _)| TransceiverPair { active: true, ..*p })
        .collect()
}

/// Type I dual-zone thinning: keep a pair iff its exclusion region holds no other potential transmitter.
pub fn thin_type1(pairs: &[TransceiverPair], params: &NetworkParams) -> Vec<TransceiverPair> {
    thin(pairs, params, ProcessType::TypeI)
}

/// Type II dual-zone thinning: keep a pair iff its mark is below every mark in its exclusion region.
pub fn thin_type2(pairs: &[TransceiverPair], params: &NetworkParams) -> Vec<TransceiverPair> {
    thin(pairs, params, ProcessType::TypeII)
}

/// Matérn carrier-sense thinning with exclusion region `B_tx(R_cs)`.
pub fn thin_matern(
    pairs: &[TransceiverPair],
    params: &NetworkParams,
    rule: ThinningRule,
) -> Vec<TransceiverPair> {
    let process = match rule {
        ThinningRule::Void => ProcessType::MaternI,
        ThinningRule::EarliestMark => ProcessType::MaternII,
    };
    thin(pairs, params, process)
}

/// Sample and thin one realization, returning the pairs whose transmitter lies
/// in the observation region with their access indicators set.
pub fn simulate_realization(
    window: &SimulationWindow,
    params: &NetworkParams,
    process: ProcessType,
    seed: u64,
) -> Result<Vec<TransceiverPair>> {
    let mut pairs = sample_bipolar(window, params, seed)?;
    apply_thinning(&mut pairs, params, process);
    pairs.retain(|p| window.in_observation(p.tx));
    Ok(pairs)
}

pub const REALIZATION_CSV_HEADER: &str = "x,y,theta,mark,e";

/// Write pairs as CSV with header `x,y,theta,mark,e`.
pub fn write_realization_csv<W: Write>(mut out: W, pairs: &[TransceiverPair]) -> io::Result<()> {
    writeln!(out, "{REALIZATION_CSV_HEADER}")?;
    for p in pairs {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.tx.x,
            p.tx.y,
            p.theta,
            p.mark,
            u8::from(p.active)
        )?;
    }
    Ok(())
}
