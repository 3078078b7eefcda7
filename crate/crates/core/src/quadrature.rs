//! Numerical integration over `(r, β, θ) ∈ [0, r_max] × [0, 2π) × [0, 2π)`
//! with the polar area element `r`.
//!
//! The radial direction is refined adaptively (panel bisection until the
//! refinement delta falls below the tolerance); the angular directions use
//! composite Gauss–Legendre panels on a 2π-periodic grid. Integrands may
//! report their jump locations in each coordinate, and the panels are then
//! split there so a discontinuous kernel is integrated piecewise-smoothly.

use std::f64::consts::{PI, TAU};

use arrayvec::ArrayVec;
use rayon::prelude::*;

use crate::analytics;
use crate::error::{domain, Error, Result};
use crate::params::NetworkParams;
use crate::process::ProcessType;

/// Breakpoint buffer for one angular coordinate.
pub type Breaks = ArrayVec<f64, 8>;

const RADIAL_ORDER: usize = 6;
const ANGULAR_ORDER: usize = 6;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_n(x) and its derivative
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// `∫_a^b f` with this rule mapped onto `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Resolution and tolerance of a kernel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Truncation radius of the radial integral.
    pub r_max: f64,
    /// Initial radial panel count.
    pub n_r: usize,
    /// Angular panel count over a full turn in β.
    pub n_beta: usize,
    /// Angular panel count over a full turn in θ.
    pub n_theta: usize,
    /// Target relative tolerance of the radial refinement.
    pub rel_tol: f64,
    /// Add the analytic far-field tail beyond `r_max`.
    pub tail_correction: bool,
    /// Maximum number of radial bisection rounds.
    pub max_depth: usize,
}

impl QuadratureSpec {
    /// Defaults for a parameter set: `r_max = 10·R_cs` (at least `2(R_cs + R_tx + d)`).
    pub fn for_params(params: &NetworkParams) -> Self {
        let floor = 2.0 * (params.r_cs + params.r_tx + params.d);
        Self {
            r_max: (10.0 * params.r_cs).max(floor),
            n_r: 16,
            n_beta: 16,
            n_theta: 16,
            rel_tol: 1e-4,
            tail_correction: true,
            max_depth: 24,
        }
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_panels(mut self, n_r: usize, n_beta: usize, n_theta: usize) -> Self {
        self.n_r = n_r;
        self.n_beta = n_beta;
        self.n_theta = n_theta;
        self
    }

    /// Structural checks independent of any parameter set.
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(domain(format!("r_max must be > 0, got {}", self.r_max)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(domain(format!(
                "rel_tol must lie in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        if self.n_r < 8 || self.n_beta < 8 || self.n_theta < 8 {
            return Err(domain("panel counts must be >= 8"));
        }
        Ok(())
    }

    /// Checks that also need the model geometry.
    pub fn validate_for(&self, params: &NetworkParams) -> Result<()> {
        self.validate()?;
        let floor = 2.0 * (params.r_cs + params.r_tx + params.d);
        if self.r_max < floor * (1.0 - 1e-12) {
            return Err(domain(format!(
                "r_max = {} below 2(R_cs + R_tx + d) = {floor}",
                self.r_max
            )));
        }
        Ok(())
    }
}

/// An integrand `f(r, β, θ)` for [`integrate_kernel`].
pub trait PolarIntegrand: Sync {
    fn value(&self, r: f64, beta: f64, theta: f64) -> f64;

    /// Radial lower limit; the integrand is treated as zero below it.
    fn radial_start(&self) -> f64 {
        0.0
    }

    /// Radii where the integrand may jump or lose smoothness.
    fn radial_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Jump locations in β (any real values; reduced mod 2π) at radius `r`.
    fn beta_breakpoints(&self, _r: f64, _out: &mut Breaks) {}

    /// Jump locations in θ at `(r, β)`.
    fn theta_breakpoints(&self, _r: f64, _beta: f64, _out: &mut Breaks) {}

    /// Whether `f(r, β, θ) = f(r, −β, −θ)`, allowing β to be folded onto `[0, π]`.
    fn reflection_symmetric(&self) -> bool {
        false
    }
}

impl<F> PolarIntegrand for F
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    fn value(&self, r: f64, beta: f64, theta: f64) -> f64 {
        self(r, beta, theta)
    }
}

/// Value of an integral with the magnitude of its last refinement delta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
}

/// `∫_0^{r_max} ∫_0^{2π} ∫_0^{2π} f(r, β, θ) r dθ dβ dr`.
pub fn integrate_kernel<F: PolarIntegrand + ?Sized>(
    f: &F,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    let integrator = Integrator::new(f, spec);
    integrator.run()
}

struct Integrator<'a, F: ?Sized> {
    f: &'a F,
    spec: &'a QuadratureSpec,
    radial: GaussRule,
    angular: GaussRule,
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
}

impl<'a, F: PolarIntegrand + ?Sized> Integrator<'a, F> {
    fn new(f: &'a F, spec: &'a QuadratureSpec) -> Self {
        Self {
            f,
            spec,
            radial: GaussRule::legendre(RADIAL_ORDER),
            angular: GaussRule::legendre(ANGULAR_ORDER),
        }
    }

    fn run(&self) -> Result<QuadratureResult> {
        let lo = self.f.radial_start().max(0.0);
        let hi = self.spec.r_max;
        if lo >= hi {
            return Ok(QuadratureResult {
                value: 0.0,
                error: 0.0,
            });
        }
        let mut cuts: Vec<f64> = self
            .f
            .radial_breakpoints()
            .into_iter()
            .filter(|&x| x > lo && x < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let span = hi - lo;
        let mut initial = Vec::new();
        for w in cuts.windows(2) {
            let k = ((self.spec.n_r as f64 * (w[1] - w[0]) / span).round() as usize).max(1);
            let h = (w[1] - w[0]) / k as f64;
            for j in 0..k {
                let a = w[0] + j as f64 * h;
                let b = if j + 1 == k { w[1] } else { a + h };
                initial.push((a, b));
            }
        }
        let mut active: Vec<Panel> = initial
            .par_iter()
            .map(|&(a, b)| Panel {
                a,
                b,
                value: self.panel(a, b),
            })
            .collect();

        // Bisect every unresolved panel each round. A panel retires once its
        // refinement delta is within its length-proportional share of the
        // tolerance; the whole integral stops once a round moves the total by
        // less than `rel_tol` in aggregate.
        let mut done: Vec<f64> = Vec::new();
        let mut done_err = 0.0;
        let mut previous = pairwise_sum(active.iter().map(|p| p.value));
        for _ in 0..self.spec.max_depth {
            let halves: Vec<(Panel, Panel)> = active
                .par_iter()
                .map(|p| {
                    let m = 0.5 * (p.a + p.b);
                    let left = Panel {
                        a: p.a,
                        b: m,
                        value: self.panel(p.a, m),
                    };
                    let right = Panel {
                        a: m,
                        b: p.b,
                        value: self.panel(m, p.b),
                    };
                    (left, right)
                })
                .collect();
            let total = pairwise_sum(
                done.iter()
                    .copied()
                    .chain(halves.iter().flat_map(|(l, r)| [l.value, r.value])),
            );
            let budget = self.spec.rel_tol * total.abs();

            let mut next = Vec::new();
            let mut round_delta = 0.0;
            for (p, (l, r)) in active.iter().zip(halves) {
                let delta = (l.value + r.value - p.value).abs();
                round_delta += delta;
                if delta <= budget * (p.b - p.a) / span {
                    done.push(l.value + r.value);
                    done_err += delta;
                } else {
                    next.push(l);
                    next.push(r);
                }
            }
            if next.is_empty() || round_delta <= budget {
                let pending: f64 = if next.is_empty() { 0.0 } else { round_delta };
                return Ok(QuadratureResult {
                    value: total,
                    error: done_err + pending,
                });
            }
            active = next;
            previous = total;
        }
        let last = pairwise_sum(done.iter().copied().chain(active.iter().map(|p| p.value)));
        Err(Error::NonConvergence {
            depth: self.spec.max_depth,
            last,
            previous,
        })
    }

    /// Radial Gauss–Legendre estimate over `[a, b]`.
    fn panel(&self, a: f64, b: f64) -> f64 {
        self.radial
            .integrate(a, b, |r| r * self.angular_integral(r))
    }

    /// `∫∫ f(r, β, θ) dθ dβ` at fixed `r`.
    fn angular_integral(&self, r: f64) -> f64 {
        let symmetric = self.f.reflection_symmetric();
        let beta_end = if symmetric { PI } else { TAU };
        let mut bb = Breaks::new();
        self.f.beta_breakpoints(r, &mut bb);
        let beta_cuts = angular_cuts(&bb, beta_end);
        let mut tb = Breaks::new();
        let outer = integrate_pieces(&self.angular, &beta_cuts, self.spec.n_beta, |beta| {
            tb.clear();
            self.f.theta_breakpoints(r, beta, &mut tb);
            let theta_cuts = angular_cuts(&tb, TAU);
            integrate_pieces(&self.angular, &theta_cuts, self.spec.n_theta, |theta| {
                self.f.value(r, beta, theta)
            })
        });
        if symmetric {
            2.0 * outer
        } else {
            outer
        }
    }
}

/// Sorted cut points `0 = c_0 < … < c_k = end` including the breakpoints
/// (reduced mod 2π) that fall strictly inside `(0, end)`.
fn angular_cuts(breaks: &Breaks, end: f64) -> ArrayVec<f64, 10> {
    let mut cuts = ArrayVec::<f64, 10>::new();
    cuts.push(0.0);
    for &b in breaks {
        let x = b.rem_euclid(TAU);
        if x > 1e-12 && x < end - 1e-12 {
            cuts.push(x);
        }
    }
    cuts.push(end);
    cuts.sort_unstable_by(f64::total_cmp);
    cuts
}

/// Composite rule over consecutive cut intervals; each interval gets a share
/// of `panels_per_turn` proportional to its length (at least one panel).
fn integrate_pieces(
    rule: &GaussRule,
    cuts: &[f64],
    panels_per_turn: usize,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let k = ((panels_per_turn as f64 * len / TAU).ceil() as usize).max(1);
        let h = len / k as f64;
        for j in 0..k {
            let a = w[0] + j as f64 * h;
            acc += rule.integrate(a, a + h, &mut f);
        }
    }
    acc
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    fn rec(v: &[f64]) -> f64 {
        if v.len() <= 8 {
            return v.iter().sum();
        }
        let m = v.len() / 2;
        rec(&v[..m]) + rec(&v[m..])
    }
    let v: Vec<f64> = values.into_iter().collect();
    rec(&v)
}

/// Far-field tail `∫_{r_max}^∞ ∫∫ l(|x − z_o|) k_∞ r dθ dβ dr` of the kernel integral.
///
/// Beyond `r_max ≥ 2(R_cs + R_tx + d)` the two exclusion regions are disjoint,
/// so the kernel equals its far-field value `k_∞ = (λ/λ_p)²`. The angular
/// average of `|x − z_o|^{-α}` over β is `r^{-α} ₂F₁(α/2, α/2; 1; d²/r²)`;
/// integrating the series term by term gives
/// `k_∞ 4π² A Σ_n c_n d^{2n} r_max^{2−α−2n} / (α + 2n − 2)` whose leading
/// term is `k_∞ 4π² A r_max^{2−α} / (α − 2)`.
pub fn tail_correction(params: &NetworkParams, process: ProcessType, r_max: f64) -> Result<f64> {
    if !(params.alpha > 2.0) {
        return Err(domain(format!(
            "tail diverges for alpha = {} <= 2",
            params.alpha
        )));
    }
    if r_max.is_infinite() {
        return Ok(0.0);
    }
    if !(r_max > params.d) {
        return Err(domain("tail correction needs r_max > d"));
    }
    let k_inf = far_field_kernel(params, process);
    if k_inf == 0.0 {
        return Ok(0.0);
    }
    let a = params.alpha;
    let q = (params.d / r_max).powi(2);
    // c_n = ((α/2)_n / n!)², accumulated alongside q^n
    let mut coeff = 1.0;
    let mut qn = 1.0;
    let mut series = 0.0;
    for n in 0..200 {
        let nf = n as f64;
        let term = coeff * qn / (a + 2.0 * nf - 2.0);
        series += term;
        if term.abs() < 1e-17 * series.abs() {
            break;
        }
        let ratio = (0.5 * a + nf) / (nf + 1.0);
        coeff *= ratio * ratio;
        qn *= q;
    }
    Ok(k_inf * 4.0 * PI * PI * params.path_loss_const * r_max.powf(2.0 - a) * series)
}

/// Kernel value for independent, far-apart pairs: `(λ/λ_p)²`.
pub fn far_field_kernel(params: &NetworkParams, process: ProcessType) -> f64 {
    if params.lambda_p <= 0.0 {
        return 1.0;
    }
    let ratio = analytics::intensity(process, params) / params.lambda_p;
    ratio * ratio
}

/// Gauss–Kronrod 7/15 abscissae on `[0, 1]` (positive half) and weights.
const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK15_WEIGHTS[7];
    let mut gauss = fc * G7_WEIGHTS[3];
    for i in 0..7 {
        let dx = h * GK15_NODES[i];
        let s = f(c - dx) + f(c + dx);
        kron += GK15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod integration of a smooth 1D function on a finite interval.
pub fn integrate_adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult> {
    const MAX_INTERVALS: usize = 2000;
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let value: f64 = intervals.iter().map(|x| x.2).sum();
        let error: f64 = intervals.iter().map(|x| x.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult { value, error });
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergence {
                depth: MAX_INTERVALS,
                last: value,
                previous: value - error,
            });
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        for n in 1..=12 {
            let rule = GaussRule::legendre(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let got = rule.integrate(0.0, 2.0, |x| x.powi(deg as i32));
            let want = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
            assert!(((got - want) / want).abs() < 1e-13, "n={n}");
        }
    }

    fn spec(r_max: f64) -> QuadratureSpec {
        QuadratureSpec {
            r_max,
            n_r: 8,
            n_beta: 8,
            n_theta: 8,
            rel_tol: 1e-6,
            tail_correction: false,
            max_depth: 30,
        }
    }

    #[test]
    fn constant_integrand() {
        let res = integrate_kernel(&|_r: f64, _b: f64, _t: f64| 1.0, &spec(50.0)).unwrap();
        let want = 2.0 * PI * PI * 50.0 * 50.0;
        assert!(((res.value - want) / want).abs() < 1e-10);
    }

    #[test]
    fn indicator_of_carrier_sense_disk() {
        let r_cs = 120.0;
        let s = spec(1200.0).with_rel_tol(1e-4);
        let f = |r: f64, _b: f64, _t: f64| if r <= r_cs { 1.0 } else { 0.0 };
        let res = integrate_kernel(&f, &s).unwrap();
        let want = 2.0 * PI * PI * r_cs * r_cs;
        assert!(
            ((res.value - want) / want).abs() < 1e-3,
            "{} vs {want}",
            res.value
        );
    }

    #[test]
    fn angular_breakpoints_capture_jumps_exactly() {
        struct Wedge;
        impl PolarIntegrand for Wedge {
            fn value(&self, _r: f64, beta: f64, theta: f64) -> f64 {
                let inb = beta < 1.0;
                let int = (theta - beta).rem_euclid(TAU) < 2.0;
                f64::from(u8::from(inb && int))
            }
            fn beta_breakpoints(&self, _r: f64, out: &mut Breaks) {
                out.push(1.0);
            }
            fn theta_breakpoints(&self, _r: f64, beta: f64, out: &mut Breaks) {
                out.push(beta);
                out.push(beta + 2.0);
            }
        }
        let res = integrate_kernel(&Wedge, &spec(1.0)).unwrap();
        // ∫ r dr = 1/2, β-measure 1, θ-measure 2
        assert!((res.value - 1.0).abs() < 1e-12, "{}", res.value);
    }

    #[test]
    fn rejects_bad_spec() {
        let mut s = spec(10.0);
        s.rel_tol = 0.5;
        assert!(integrate_kernel(&|_: f64, _: f64, _: f64| 1.0, &s).is_err());
        let mut s = spec(10.0);
        s.n_beta = 4;
        assert!(s.validate().is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let mut s = spec(10.0);
        s.max_depth = 1;
        s.rel_tol = 1e-12;
        let f = |r: f64, _: f64, _: f64| (1.0 / (r - 3.3).abs().max(1e-12)).sqrt().sin() * 1e3;
        match integrate_kernel(&f, &s) {
            Err(Error::NonConvergence { depth, .. }) => assert_eq!(depth, 1),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn adaptive_gk_handles_peaks() {
        let res = integrate_adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 0.0).unwrap();
        let want = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!(((res.value - want) / want).abs() < 1e-11);
    }

    #[test]
    fn pairwise_sum_is_plain_sum_for_small_inputs() {
        assert_eq!(pairwise_sum([1.0, 2.0, 3.0]), 6.0);
        assert_eq!(pairwise_sum((0..100).map(f64::from)), 4950.0);
    }

    #[test]
    fn tail_vanishes_and_scales() {
        let p = NetworkParams::baseline();
        assert_eq!(
            tail_correction(&p, ProcessType::TypeI, f64::INFINITY).unwrap(),
            0.0
        );
        let t1 = tail_correction(&p, ProcessType::TypeI, 1e4).unwrap();
        let t2 = tail_correction(&p, ProcessType::TypeI, 2e4).unwrap();
        let ratio = t2 / t1;
        assert!((ratio / 2f64.powf(-1.5) - 1.0).abs() < 1e-3, "{ratio}");
        let mut bad = p;
        bad.alpha = 2.0;
        assert!(tail_correction(&bad, ProcessType::TypeI, 1e4).is_err());
    }

    #[test]
    fn tail_series_matches_direct_quadrature() {
        // Check against ∫_{r_max}^{R} ∫_0^{2π} A|x - z|^{-α} dβ 2π k r dr for a large R plus its leading tail.
        let p = NetworkParams::baseline();
        let r_max: f64 = 700.0;
        let k = far_field_kernel(&p, ProcessType::TypeII);
        let rule = GaussRule::legendre(20);
        let far: f64 = 1e7;
        let mut direct = 0.0;
        let edges: Vec<f64> = (0..=400)
            .map(|i| r_max * (far / r_max).powf(i as f64 / 400.0))
            .collect();
        for w in edges.windows(2) {
            direct += rule.integrate(w[0], w[1], |r| {
                let ang = GaussRule::legendre(24).integrate(0.0, TAU, |b| {
                    p.path_loss((r * r - 2.0 * r * p.d * b.cos() + p.d * p.d).sqrt())
                });
                2.0 * PI * k * ang * r
            });
        }
        direct += k * 4.0 * PI * PI * p.path_loss_const * far.powf(2.0 - p.alpha) / (p.alpha - 2.0);
        let series = tail_correction(&p, ProcessType::TypeII, r_max).unwrap();
        assert!(
            ((series - direct) / direct).abs() < 1e-8,
            "{series} vs {direct}"
        );
    }
}
