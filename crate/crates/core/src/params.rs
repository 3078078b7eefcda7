//! Scalar model parameters shared by every module.

use crate::error::{domain, Result};

/// Scalar parameters of the Poisson bipolar network and its dual-zone exclusion rule.
///
/// All quantities are linear SI units: intensities in m⁻², lengths in meters,
/// power in watts. dB conversions happen only at the command-line boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Intensity of potential transmitters.
    pub lambda_p: f64,
    /// Virtual (RTS/CTS) sensing radius around the receiver.
    pub r_tx: f64,
    /// Physical carrier-sensing radius around the transmitter.
    pub r_cs: f64,
    /// Transmitter–receiver link distance.
    pub d: f64,
    /// Transmit power.
    pub p_t: f64,
    /// Path-loss constant `A` in `l(r) = A r^-alpha`.
    pub path_loss_const: f64,
    /// Path-loss exponent, strictly greater than 2.
    pub alpha: f64,
    /// SIR threshold (linear).
    pub threshold: f64,
    /// Reference distance used to normalize the MISR; `None` means the link distance.
    pub r0: Option<f64>,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self::baseline()
    }
}

impl NetworkParams {
    /// Default system parameters: λp = 1e-5 m⁻², R_tx = 100 m, R_cs = 1.2·R_tx,
    /// d = 0.8·R_tx, P_t = 20 dBm, T = 0 dB, α = 3.5, A = 0.01.
    pub fn baseline() -> Self {
        let r_tx = 100.0;
        Self {
            lambda_p: 1e-5,
            r_tx,
            r_cs: 1.2 * r_tx,
            d: 0.8 * r_tx,
            p_t: 0.1,
            path_loss_const: 0.01,
            alpha: 3.5,
            threshold: 1.0,
            r0: None,
        }
    }

    pub fn with_lambda_p(mut self, lambda_p: f64) -> Self {
        self.lambda_p = lambda_p;
        self
    }

    pub fn with_radii(mut self, r_cs: f64, r_tx: f64, d: f64) -> Self {
        self.r_cs = r_cs;
        self.r_tx = r_tx;
        self.d = d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64, name: &str| -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(domain(format!("{name} must be finite and >= 0, got {v}")))
            }
        };
        finite_nonneg(self.lambda_p, "lambda_p")?;
        finite_nonneg(self.r_tx, "R_tx")?;
        finite_nonneg(self.r_cs, "R_cs")?;
        finite_nonneg(self.d, "d")?;
        finite_nonneg(self.threshold, "T")?;
        finite_nonneg(self.path_loss_const, "A")?;
        if !(self.p_t.is_finite() && self.p_t > 0.0) {
            return Err(domain(format!("P_t must be > 0, got {}", self.p_t)));
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(domain(format!(
                "alpha must be > 2 for finite interference, got {}",
                self.alpha
            )));
        }
        if let Some(r0) = self.r0 {
            if !(r0.is_finite() && r0 > 0.0) {
                return Err(domain(format!("r_0 must be > 0, got {r0}")));
            }
        }
        if self.r_tx >= self.r_cs && self.r_tx > 0.0 {
            log::info!(
                "R_tx = {} >= R_cs = {}: the transmitter-centred virtual disk dominates the carrier-sense disk",
                self.r_tx,
                self.r_cs
            );
        }
        Ok(())
    }

    /// Reference distance of the MISR normalization.
    pub fn reference_distance(&self) -> f64 {
        self.r0.unwrap_or(self.d)
    }

    /// Deterministic path loss `A r^-alpha`.
    #[inline]
    pub fn path_loss(&self, dist: f64) -> f64 {
        self.path_loss_const * dist.powf(-self.alpha)
    }
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// dBm to watts; 20 dBm is exactly 0.1 W.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    // 10^((dbm - 30)/10), with integral exponents routed through powi to keep round values exact
    let e = (dbm - 30.0) / 10.0;
    if e.fract() == 0.0 && e.abs() < 300.0 {
        10f64.powi(e as i32)
    } else {
        10f64.powf(e)
    }
}
