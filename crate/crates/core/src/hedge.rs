//! Single-path delta-hedging ledger with proportional transaction costs.
//!
//! The option is written on the blend `α·S₁ + (1−α)·S₂` but the hedger holds
//! `Φ(d₁)` shares of one asset only, computed from that asset's own price and
//! volatility. The ledger, for traded asset `j` with cost rate `k`:
//!
//! ```text
//! PV₀ = Δ₀·S_j(0)·(1 − k)
//! PV_i = (1 + r·dt)·PV_{i−1} + (Δ_i − Δ_{i−1})·S_j(t_i)·(1 − sgn(Δ_i − Δ_{i−1})·k)   i = 1..N−1
//! PV_N = (1 + r·dt)·PV_{N−1} + (Δ_N − Δ_{N−1})·S_j(T)·(1 − sgn(·)·k) − Δ_N·S_j(T) + (S_port(T) − K)⁺
//! ```
//!
//! `Δ_N` is the expiry indicator and the terminal liquidation `Δ_N·S_j(T)` is
//! not charged a cost. The simulated price is `e^{−rT}·PV_N`.

use serde::{Deserialize, Serialize};

use crate::analytic::{bs_delta, expiry_delta, PortfolioSpec};
use crate::paths::{portfolio_price, AssetSpec, PathPair};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyChoice {
    TradeAsset1,
    TradeAsset2,
    TradeNone,
}

impl StrategyChoice {
    /// Physical asset number, if any.
    pub fn asset_id(self) -> Option<u8> {
        match self {
            StrategyChoice::TradeAsset1 => Some(1),
            StrategyChoice::TradeAsset2 => Some(2),
            StrategyChoice::TradeNone => None,
        }
    }
}

/// Per-path results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgeOutcome {
    /// Ledger value at expiry.
    pub final_pv: f64,
    /// `e^{−rT}·final_pv`.
    pub discounted_price: f64,
    /// `α·S₁(T) + (1−α)·S₂(T)`.
    pub terminal_portfolio_price: f64,
    /// `e^{−rT}·(S_port(T) − K)⁺`.
    pub measure: f64,
}

/// `sgn` with `sgn(0) = 0`, so an unchanged position costs nothing.
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn trade_value(change: f64, price: f64, cost_rate: f64) -> f64 {
    change * price * (1.0 - sign(change) * cost_rate)
}

fn check_path(path: &PathPair, spec: &PortfolioSpec) -> Result<usize> {
    let n = path.num_steps();
    if n == 0 {
        return Err(Error::domain("num_steps", 0.0, "num_steps >= 1"));
    }
    if path.s1.len() != n + 1 || path.s2.len() != n + 1 {
        return Err(Error::Contract(format!(
            "path has {} times but {}/{} prices",
            n + 1,
            path.s1.len(),
            path.s2.len()
        )));
    }
    let end = path.times[n];
    if (end - spec.expiry).abs() > 1e-9 * spec.expiry.max(1.0) {
        return Err(Error::Contract(format!(
            "path ends at t = {end} but the option expires at {}",
            spec.expiry
        )));
    }
    Ok(n)
}

fn payoff_terms(path: &PathPair, spec: &PortfolioSpec) -> (f64, f64, f64) {
    let (s1_t, s2_t) = path.terminal();
    let s_port = portfolio_price(spec.alpha, s1_t, s2_t);
    let payoff = (s_port - spec.strike).max(0.0);
    let discount = (-spec.rate * spec.expiry).exp();
    (s_port, payoff, discount)
}

/// Runs the hedging ledger trading one asset.
pub fn hedge_path(
    path: &PathPair,
    spec: &PortfolioSpec,
    traded: StrategyChoice,
    a1: &AssetSpec,
    a2: &AssetSpec,
) -> Result<HedgeOutcome> {
    let (prices, asset) = match traded {
        StrategyChoice::TradeAsset1 => (&path.s1, a1),
        StrategyChoice::TradeAsset2 => (&path.s2, a2),
        StrategyChoice::TradeNone => {
            return Err(Error::Contract(
                "hedge_path needs a traded asset; use unhedged_path for TradeNone".into(),
            ))
        }
    };
    let n = check_path(path, spec)?;
    let (strike, rate, expiry) = (spec.strike, spec.rate, spec.expiry);
    let k = asset.cost_rate;
    let dt = expiry / n as f64;
    let growth = 1.0 + rate * dt;

    let mut delta = bs_delta(prices[0], strike, rate, asset.sigma, expiry)?;
    let mut pv = delta * prices[0] * (1.0 - k);
    for (&s, &t) in prices[1..n].iter().zip(&path.times[1..n]) {
        let next = bs_delta(s, strike, rate, asset.sigma, expiry - t)?;
        pv = growth * pv + trade_value(next - delta, s, k);
        delta = next;
    }

    let s_t = prices[n];
    let (s_port, payoff, discount) = payoff_terms(path, spec);
    let final_delta = expiry_delta(s_t, strike);
    let final_pv =
        growth * pv + trade_value(final_delta - delta, s_t, k) - final_delta * s_t + payoff;

    Ok(HedgeOutcome {
        final_pv,
        discounted_price: discount * final_pv,
        terminal_portfolio_price: s_port,
        measure: discount * payoff,
    })
}

/// The no-hedge strategy: its value is the discounted payoff.
pub fn unhedged_path(path: &PathPair, spec: &PortfolioSpec) -> Result<HedgeOutcome> {
    check_path(path, spec)?;
    let (s_port, payoff, discount) = payoff_terms(path, spec);
    let measure = discount * payoff;
    Ok(HedgeOutcome {
        final_pv: measure,
        discounted_price: measure,
        terminal_portfolio_price: s_port,
        measure,
    })
}

/// Dispatches on the strategy.
pub fn evaluate(
    path: &PathPair,
    spec: &PortfolioSpec,
    strategy: StrategyChoice,
    a1: &AssetSpec,
    a2: &AssetSpec,
) -> Result<HedgeOutcome> {
    match strategy {
        StrategyChoice::TradeNone => unhedged_path(path, spec),
        traded => hedge_path(path, spec, traded, a1, a2),
    }
}
