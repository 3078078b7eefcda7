//! Closed-form and semi-analytical quantities of the dual-zone hard-core process.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::geometry::{ExclusionShape, Membership, PairConfiguration, RegionClass};
use crate::params::NetworkParams;
use crate::process::{ProcessType, ThinningRule};
use crate::quadrature::{self, Breaks, PolarIntegrand, QuadratureSpec};

/// Mean interference at the typical receiver and the derived MISR and gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceResult {
    /// Mean interference power (W).
    pub mean_interference: f64,
    /// Mean interference-to-signal ratio at the reference distance.
    pub misr: f64,
    /// Asymptotic gain over the PPP, `MISR_PPP / MISR`.
    pub gain: f64,
    /// Quadrature error estimate, in the units of `mean_interference`.
    pub quad_error: f64,
    /// Part of `mean_interference` contributed by the analytic far-field tail.
    pub tail: f64,
}

/// Area of the exclusion region used by `process`.
pub fn exclusion_area(process: ProcessType, params: &NetworkParams) -> f64 {
    process.exclusion(params).area()
}

/// Intensity of retained transmitters.
///
/// Void (Type I) thinning keeps a point with the void probability of its
/// exclusion region, `λ_p e^{-λ_p V_o}`; earliest-mark (Type II) thinning
/// averages `e^{-λ_p t V_o}` over a uniform mark, `(1 − e^{-λ_p V_o}) / V_o`.
pub fn intensity(process: ProcessType, params: &NetworkParams) -> f64 {
    intensity_from_area(
        process.rule(),
        params.lambda_p,
        exclusion_area(process, params),
    )
}

pub fn intensity_from_area(rule: ThinningRule, lambda_p: f64, area: f64) -> f64 {
    let x = lambda_p * area;
    match rule {
        ThinningRule::Void => lambda_p * (-x).exp(),
        // dividing by the area once keeps the curve monotone in λ_p after rounding
        ThinningRule::EarliestMark if x > 0.0 => -(-x).exp_m1() / area,
        ThinningRule::EarliestMark => lambda_p,
    }
}

/// Mean of `e^{-u t}` over `t ~ U[0, 1]`, i.e. `(1 − e^{-u}) / u`.
pub fn phi(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        -(-u).exp_m1() / u
    }
}

/// `∫_0^1 t^k e^{-u t} dt` for `u ≥ 0`.
fn moment_exp(k: u32, u: f64) -> f64 {
    if u > 2.0 * k as f64 + 10.0 {
        // upward recurrence is stable once u exceeds k
        let e = (-u).exp();
        let mut j = phi(u);
        for i in 1..=k {
            j = (i as f64 * j - e) / u;
        }
        j
    } else {
        // e^{-u} Σ_n u^n k!/(k+n+1)!, all terms positive
        let mut term = 1.0 / (k as f64 + 1.0);
        let mut sum = term;
        for n in 0..400 {
            term *= u / (k as f64 + n as f64 + 2.0);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        (-u).exp() * sum
    }
}

/// Probability weight `η(V)` of one mark ordering for two pairs whose regions
/// have union `V` and individual areas `V_o`:
///
/// `η(V) = ∫_0^1 e^{-λ_p t_1 V_o} ∫_0^{t_1} e^{-λ_p t_2 (V − V_o)} dt_2 dt_1`,
///
/// evaluated without the cancellation of the closed form near `V = V_o` or
/// small `λ_p`.
pub fn eta(v: f64, params: &NetworkParams) -> Result<f64> {
    let vo = ExclusionShape::dual_zone(params).area();
    eta_with(v, vo, params.lambda_p)
}

/// [`eta`] with explicit `V_o` and `λ_p`.
pub fn eta_with(v: f64, vo: f64, lambda_p: f64) -> Result<f64> {
    if !(vo > 0.0 && lambda_p >= 0.0 && lambda_p.is_finite()) {
        return Err(domain(format!(
            "eta needs V_o > 0 and λ_p >= 0, got {vo}, {lambda_p}"
        )));
    }
    let slack = 1e-9 * vo;
    if !(v >= vo - slack && v <= 2.0 * vo + slack) {
        return Err(domain(format!(
            "eta: V = {v} outside [V_o, 2 V_o] = [{vo}, {}]",
            2.0 * vo
        )));
    }
    Ok(eta_unchecked(v.clamp(vo, 2.0 * vo), vo, lambda_p))
}

fn eta_unchecked(v: f64, vo: f64, lambda_p: f64) -> f64 {
    let x = lambda_p * vo;
    let y = lambda_p * v;
    let h = 0.5 * (y - x);
    if h > 1.0 {
        // (V_o e^{-λV} − V e^{-λV_o} + V − V_o) / (λ²(V − V_o) V V_o), as a divided difference of φ
        return (phi(x) - phi(y)) / (y - x);
    }
    // Central expansion of the divided difference of φ about m = (x + y)/2:
    // Σ_j J_{2j+1}(m) h^{2j} / (2j+1)!
    let m = 0.5 * (x + y);
    let h2 = h * h;
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut fact = 1.0;
    for j in 0..12u32 {
        let k = 2 * j + 1;
        if j > 0 {
            fact *= (2 * j) as f64 * (2 * j + 1) as f64;
            pow *= h2;
        }
        let term = moment_exp(k, m) * pow / fact;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Two-point retention kernel `k(r, β, 0, θ)`: probability that both pairs
/// in configuration `config` are retained, given both are potential transmitters.
pub fn kernel(config: &PairConfiguration, params: &NetworkParams, process: ProcessType) -> f64 {
    let shape = process.exclusion(params);
    let vo = shape.area();
    let class = shape.membership(config).class(process.rule());
    kernel_for_class(class, params.lambda_p, vo, || shape.combined_area(config))
}

fn kernel_for_class(
    class: RegionClass,
    lambda_p: f64,
    vo: f64,
    union_area: impl FnOnce() -> f64,
) -> f64 {
    match class {
        RegionClass::Suppressed => 0.0,
        RegionClass::Survives => (-lambda_p * union_area()).exp(),
        RegionClass::DoubleSurvival => {
            2.0 * eta_unchecked(union_area().clamp(vo, 2.0 * vo), vo, lambda_p)
        }
        RegionClass::SingleSurvival => {
            eta_unchecked(union_area().clamp(vo, 2.0 * vo), vo, lambda_p)
        }
    }
}

/// Integrand `l(|x − z_o|) k(r, β, 0, θ)` of the mean-interference integral,
/// with the receiver of the typical pair at `z_o = (d, 0)`.
///
/// The kernel jumps on the boundaries of S2 and S3. At fixed `r` both are arcs
/// with the same half-width: with `c = (r² + d² − R_tx²)/(2rd)`, S2 is
/// `cos β ≥ c` and S3 is `cos(β − θ) ≤ −c`, so the jumps sit at `β = ±acos c`
/// and `θ = β ± acos(−c)`.
pub struct InterferenceIntegrand {
    params: NetworkParams,
    shape: ExclusionShape,
    rule: ThinningRule,
    vo: f64,
    far: f64,
}

impl InterferenceIntegrand {
    pub fn new(params: &NetworkParams, process: ProcessType) -> Self {
        let shape = process.exclusion(params);
        Self {
            params: *params,
            shape,
            rule: process.rule(),
            vo: shape.area(),
            far: 2.0 * shape.reach(),
        }
    }

    fn cos_boundary(&self, r: f64) -> Option<f64> {
        let (d, rho) = (self.shape.d, self.shape.rx_radius);
        if rho <= 0.0 || r <= 0.0 || d <= 0.0 {
            return None;
        }
        let c = (r * r + d * d - rho * rho) / (2.0 * r * d);
        (c.abs() < 1.0).then_some(c)
    }

    pub fn kernel(&self, r: f64, beta: f64, theta: f64) -> f64 {
        let config = PairConfiguration { r, beta, theta };
        let membership: Membership = self.shape.membership(&config);
        let class = membership.class(self.rule);
        let far = r >= self.far;
        let vo = self.vo;
        kernel_for_class(class, self.params.lambda_p, vo, || {
            if far {
                2.0 * vo
            } else {
                self.shape.combined_area(&config)
            }
        })
    }
}

impl PolarIntegrand for InterferenceIntegrand {
    fn value(&self, r: f64, beta: f64, theta: f64) -> f64 {
        let k = self.kernel(r, beta, theta);
        if k == 0.0 {
            return 0.0;
        }
        let d = self.shape.d;
        let dist2 = r * r - 2.0 * r * d * beta.cos() + d * d;
        self.params.path_loss(dist2.sqrt()) * k
    }

    fn radial_start(&self) -> f64 {
        self.shape.tx_radius
    }

    fn radial_breakpoints(&self) -> Vec<f64> {
        let (d, rho) = (self.shape.d, self.shape.rx_radius);
        let mut v = vec![self.far];
        if rho > 0.0 {
            v.push((d - rho).abs());
            v.push(d + rho);
        }
        v
    }

    fn beta_breakpoints(&self, r: f64, out: &mut Breaks) {
        if let Some(c) = self.cos_boundary(r) {
            let a = c.acos();
            out.push(a);
            out.push(-a);
        }
    }

    fn theta_breakpoints(&self, r: f64, beta: f64, out: &mut Breaks) {
        if let Some(c) = self.cos_boundary(r) {
            let a = (-c).acos();
            out.push(beta - a);
            out.push(beta + a);
        }
    }

    fn reflection_symmetric(&self) -> bool {
        true
    }
}

fn check_interference_inputs(
    params: &NetworkParams,
    process: ProcessType,
    spec: &QuadratureSpec,
) -> Result<()> {
    params.validate()?;
    spec.validate_for(params)?;
    if !(params.lambda_p > 0.0) {
        return Err(domain("mean interference needs lambda_p > 0"));
    }
    if !(params.path_loss_const > 0.0) {
        return Err(domain("mean interference needs A > 0"));
    }
    let shape = process.exclusion(params);
    if !(params.d < shape.tx_radius) {
        return Err(domain(format!(
            "mean interference needs d < R_cs (d = {}, R_cs = {})",
            params.d, shape.tx_radius
        )));
    }
    Ok(())
}

/// Mean interference at the receiver of the typical retained pair:
///
/// `λ_p² P_t / (2πλ) ∫∫∫ l(√(r² − 2rd cos β + d²)) k(r, β, 0, θ) r dθ dβ dr`,
///
/// truncated at `spec.r_max` plus the analytic tail when enabled.
pub fn mean_interference(
    params: &NetworkParams,
    process: ProcessType,
    spec: &QuadratureSpec,
) -> Result<InterferenceResult> {
    check_interference_inputs(params, process, spec)?;
    let integrand = InterferenceIntegrand::new(params, process);
    let integral = quadrature::integrate_kernel(&integrand, spec)?;
    let tail = if spec.tail_correction {
        quadrature::tail_correction(params, process, spec.r_max)?
    } else {
        0.0
    };
    let lambda = intensity(process, params);
    let prefactor = params.lambda_p * params.lambda_p * params.p_t / (2.0 * PI * lambda);
    let mean = prefactor * (integral.value + tail);
    let misr = misr_from_mean(mean, params);
    Ok(InterferenceResult {
        mean_interference: mean,
        misr,
        gain: gain_from_misr(misr, params.alpha),
        quad_error: prefactor * integral.error,
        tail: prefactor * tail,
    })
}

/// MISR of a PPP with nearest-transmitter association, `2/(α − 2)`.
pub fn misr_ppp(alpha: f64) -> f64 {
    2.0 / (alpha - 2.0)
}

fn misr_from_mean(mean: f64, params: &NetworkParams) -> f64 {
    mean * params.reference_distance().powf(params.alpha) / (params.p_t * params.path_loss_const)
}

fn gain_from_misr(misr: f64, alpha: f64) -> f64 {
    if misr == 0.0 {
        log::warn!("MISR is zero (no interferers); asymptotic gain is unbounded");
        f64::INFINITY
    } else {
        misr_ppp(alpha) / misr
    }
}

/// Mean interference divided by the average received power `P_t A r_0^{-α}`.
pub fn misr(params: &NetworkParams, process: ProcessType, spec: &QuadratureSpec) -> Result<f64> {
    Ok(mean_interference(params, process, spec)?.misr)
}

/// `G = MISR_PPP / MISR`; `+∞` when the MISR vanishes.
pub fn asymptotic_gain(
    params: &NetworkParams,
    process: ProcessType,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(mean_interference(params, process, spec)?.gain)
}

fn check_threshold(threshold: f64, alpha: f64) -> Result<()> {
    if !(threshold >= 0.0) || threshold.is_nan() {
        return Err(domain(format!(
            "SIR threshold must be >= 0, got {threshold}"
        )));
    }
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(domain(format!("alpha must be > 2, got {alpha}")));
    }
    Ok(())
}

/// Success probability `P(SIR > T)` of the Poisson reference model (Rayleigh
/// fading, nearest-transmitter association). Uses the arctangent closed form at α = 4.
pub fn success_prob_ppp(threshold: f64, alpha: f64) -> Result<f64> {
    check_threshold(threshold, alpha)?;
    if alpha == 4.0 {
        let s = threshold.sqrt();
        if s.is_infinite() {
            return Ok(0.0);
        }
        return Ok(1.0 / (1.0 + s * s.atan()));
    }
    success_prob_ppp_integral(threshold, alpha)
}

/// General-α evaluation of the Poisson reference success probability
/// `1 / (1 + ρ)`, `ρ = T^{2/α} ∫_{T^{-2/α}}^∞ dt / (1 + t^{α/2})`.
///
/// Substituting `t = T^{-2/α} w^{-2/(α−2)}` gives the smooth form
/// `ρ = 2/(α−2) ∫_0^1 T / (1 + T w^{α/(α−2)}) dw`.
pub fn success_prob_ppp_integral(threshold: f64, alpha: f64) -> Result<f64> {
    check_threshold(threshold, alpha)?;
    if threshold == 0.0 {
        return Ok(1.0);
    }
    if threshold.is_infinite() {
        return Ok(0.0);
    }
    let p = alpha / (alpha - 2.0);
    let t = threshold;
    let res = quadrature::integrate_adaptive(|w| t / (1.0 + t * w.powf(p)), 0.0, 1.0, 1e-13, 0.0)?;
    let rho = misr_ppp(alpha) * res.value;
    Ok(1.0 / (1.0 + rho))
}

/// `P_PPP(T / G)`: the success probability of a process with asymptotic gain `G`.
pub fn success_prob_with_gain(threshold: f64, gain: f64, alpha: f64) -> Result<f64> {
    if !(gain > 0.0) {
        return Err(domain(format!("asymptotic gain must be > 0, got {gain}")));
    }
    success_prob_ppp(threshold / gain, alpha)
}

/// Success probability approximation `P_PPP(T / G)` for the given process.
pub fn success_prob_dzhcp(
    threshold: f64,
    params: &NetworkParams,
    process: ProcessType,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let gain = asymptotic_gain(params, process, spec)?;
    success_prob_with_gain(threshold, gain, params.alpha)
}
