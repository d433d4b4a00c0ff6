//! Closed-form benchmarks: Black-Scholes price and delta, the blended
//! portfolio's volatility and drift, the real-measure unhedged value and the
//! Leland number.
//!
//! Every function here is pure. Below a diffusion scale of [`MIN_DIFFUSION`]
//! (`σ√τ`) the formulas switch to their no-diffusion limits instead of
//! dividing by zero.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `σ√τ` below this is treated as the no-diffusion limit.
pub const MIN_DIFFUSION: f64 = 1e-12;

/// Contract terms for the option on the blend `α·S₁ + (1−α)·S₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSpec {
    /// Weight of asset 1 in the blend.
    pub alpha: f64,
    pub strike: f64,
    /// Annual risk-free rate, simple inside the ledger, continuous for discounting.
    pub rate: f64,
    /// Years to expiry.
    pub expiry: f64,
}

impl PortfolioSpec {
    pub fn new(alpha: f64, strike: f64, rate: f64, expiry: f64) -> Result<Self> {
        let spec = PortfolioSpec {
            alpha,
            strike,
            rate,
            expiry,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::domain("alpha", self.alpha, "0 <= alpha <= 1"));
        }
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(Error::domain("strike", self.strike, "strike > 0"));
        }
        if !(self.expiry > 0.0 && self.expiry.is_finite()) {
            return Err(Error::domain("expiry", self.expiry, "expiry > 0"));
        }
        if !self.rate.is_finite() {
            return Err(Error::domain("rate", self.rate, "finite rate"));
        }
        Ok(())
    }
}

/// Volatility and drift of the blended portfolio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendStats {
    pub sigma_p: f64,
    pub mu_p: f64,
}

impl BlendStats {
    pub fn new(alpha: f64, mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        Ok(BlendStats {
            sigma_p: blended_volatility(alpha, sigma1, sigma2, rho)?,
            mu_p: blended_drift(alpha, mu1, mu2),
        })
    }
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `√(α²σ₁² + (1−α)²σ₂² + 2α(1−α)ρσ₁σ₂)`.
pub fn blended_volatility(alpha: f64, sigma1: f64, sigma2: f64, rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::domain("rho", rho, "-1 <= rho <= 1"));
    }
    if !(sigma1 >= 0.0) {
        return Err(Error::domain("sigma_1", sigma1, "sigma >= 0"));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::domain("sigma_2", sigma2, "sigma >= 0"));
    }
    let beta = 1.0 - alpha;
    let variance = alpha * alpha * sigma1 * sigma1
        + beta * beta * sigma2 * sigma2
        + 2.0 * alpha * beta * rho * sigma1 * sigma2;
    // Round-off can push a perfectly anticorrelated blend a hair below zero.
    if variance < -1e-14 {
        return Err(Error::Contract(format!(
            "blended variance {variance} is negative"
        )));
    }
    Ok(variance.max(0.0).sqrt())
}

/// `α·μ₁ + (1−α)·μ₂`.
pub fn blended_drift(alpha: f64, mu1: f64, mu2: f64) -> f64 {
    alpha * mu1 + (1.0 - alpha) * mu2
}

fn check_spot_strike(spot: f64, strike: f64) -> Result<()> {
    if !(spot > 0.0 && spot.is_finite()) {
        return Err(Error::domain("spot", spot, "spot > 0"));
    }
    if !(strike > 0.0 && strike.is_finite()) {
        return Err(Error::domain("strike", strike, "strike > 0"));
    }
    Ok(())
}

fn check_sigma_tau(sigma: f64, tau: f64) -> Result<()> {
    if !(sigma >= 0.0) {
        return Err(Error::domain("sigma", sigma, "sigma >= 0"));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain("tau", tau, "tau >= 0"));
    }
    Ok(())
}

/// `d₁` for a lognormal forward with growth rate `growth`; `None` in the
/// no-diffusion limit.
fn d1(spot: f64, strike: f64, growth: f64, sigma: f64, tau: f64) -> Option<f64> {
    let vol = sigma * tau.sqrt();
    if vol < MIN_DIFFUSION {
        return None;
    }
    Some(((spot / strike).ln() + (growth + 0.5 * sigma * sigma) * tau) / vol)
}

/// Black-Scholes price of a European call.
pub fn bs_call(spot: f64, strike: f64, rate: f64, sigma: f64, tau: f64) -> Result<f64> {
    check_spot_strike(spot, strike)?;
    check_sigma_tau(sigma, tau)?;
    let discount = (-rate * tau).exp();
    Ok(match d1(spot, strike, rate, sigma, tau) {
        Some(d1) => {
            let d2 = d1 - sigma * tau.sqrt();
            spot * norm_cdf(d1) - strike * discount * norm_cdf(d2)
        }
        None => (spot - strike * discount).max(0.0),
    })
}

/// Black-Scholes hedge ratio `Φ(d₁)` for the traded asset.
///
/// Without diffusion the ratio is the indicator of finishing in the money,
/// judged on the sign of `ln(S/K) + rτ`; at expiry that is `S` against `K`.
/// A tie is valued 0.5.
pub fn bs_delta(
    asset_spot: f64,
    strike: f64,
    rate: f64,
    asset_sigma: f64,
    tau: f64,
) -> Result<f64> {
    check_spot_strike(asset_spot, strike)?;
    check_sigma_tau(asset_sigma, tau)?;
    Ok(match d1(asset_spot, strike, rate, asset_sigma, tau) {
        Some(d1) => norm_cdf(d1),
        None => {
            let moneyness = (asset_spot / strike).ln() + rate * tau;
            step(moneyness)
        }
    })
}

/// Hedge ratio at expiry.
pub fn expiry_delta(asset_spot: f64, strike: f64) -> f64 {
    if asset_spot > strike {
        1.0
    } else if asset_spot < strike {
        0.0
    } else {
        0.5
    }
}

fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Discounted real-measure expectation `e^{−rτ}·E[(S_T − K)⁺]` when `S`
/// grows at drift `mu`. Equals [`bs_call`] when `mu == rate`.
pub fn unhedged_value(
    spot: f64,
    strike: f64,
    rate: f64,
    mu: f64,
    sigma: f64,
    tau: f64,
) -> Result<f64> {
    check_spot_strike(spot, strike)?;
    check_sigma_tau(sigma, tau)?;
    let discount = (-rate * tau).exp();
    Ok(match d1(spot, strike, mu, sigma, tau) {
        Some(d1) => {
            let d2 = d1 - sigma * tau.sqrt();
            // Written as spot·e^{(μ−r)τ} so that μ = r reproduces bs_call bit for bit.
            spot * ((mu - rate) * tau).exp() * norm_cdf(d1) - strike * discount * norm_cdf(d2)
        }
        None => discount * (spot * (mu * tau).exp() - strike).max(0.0),
    })
}

/// Leland number `√(2/π)·k/(σ√δt)`.
pub fn leland_number(cost_rate: f64, sigma: f64, dt: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain("sigma", sigma, "sigma > 0"));
    }
    if !(dt > 0.0) {
        return Err(Error::domain("dt", dt, "dt > 0"));
    }
    if !(cost_rate >= 0.0) {
        return Err(Error::domain("cost_rate", cost_rate, "cost_rate >= 0"));
    }
    Ok((2.0 / PI).sqrt() * cost_rate / (sigma * dt.sqrt()))
}
