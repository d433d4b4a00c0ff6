//! Risk-adjusted value and the wrong-asset / right-asset / no-hedge verdicts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::experiment::{CostVariant, PointResult, StrategyKey, StrategySummary};
use crate::hedge::StrategyChoice;
use crate::{Error, Result};

/// `(μ_r − r)/σ_r`.
pub fn market_price_of_risk(mu_r: f64, rate: f64, sigma_r: f64) -> Result<f64> {
    if !(sigma_r > 0.0) {
        return Err(Error::domain("sigma_r", sigma_r, "sigma_r > 0"));
    }
    Ok((mu_r - rate) / sigma_r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RavInputs {
    pub mean: f64,
    pub std: f64,
    pub lambda: f64,
}

/// `mean − λ·std`.
pub fn rav(inputs: RavInputs) -> f64 {
    inputs.mean - inputs.lambda * inputs.std
}

/// The three alternatives being ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Choice {
    Wrong,
    Right,
    None,
}

impl Choice {
    pub fn code(self) -> &'static str {
        match self {
            Choice::Wrong => "WA",
            Choice::Right => "RA",
            Choice::None => "NA",
        }
    }

    /// Tie-break order: fewer trades wins.
    fn priority(self) -> u8 {
        match self {
            Choice::None => 0,
            Choice::Right => 1,
            Choice::Wrong => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Best,
    Second,
    Worst,
}

impl Verdict {
    pub fn word(self) -> &'static str {
        match self {
            Verdict::Best => "BEST",
            Verdict::Second => "SECOND",
            Verdict::Worst => "WORST",
        }
    }

    pub fn mark(self) -> &'static str {
        match self {
            Verdict::Best => "✓✓",
            Verdict::Second => "✓",
            Verdict::Worst => "✗",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    /// Best first.
    pub order: [Choice; 3],
}

impl Ranking {
    pub fn verdict(&self, choice: Choice) -> Verdict {
        match self.order.iter().position(|&c| c == choice) {
            Some(0) => Verdict::Best,
            Some(1) => Verdict::Second,
            _ => Verdict::Worst,
        }
    }

    pub fn best(&self) -> Choice {
        self.order[0]
    }
}

/// Orders the alternatives by descending RAV; exact ties go NA, RA, WA.
pub fn rank_strategies(rav_wrong: f64, rav_right: f64, rav_none: f64) -> Result<Ranking> {
    for (name, v) in [
        ("rav_wrong", rav_wrong),
        ("rav_right", rav_right),
        ("rav_none", rav_none),
    ] {
        if !v.is_finite() {
            return Err(Error::domain(name, v, "finite RAV"));
        }
    }
    let mut scored = [
        (Choice::Wrong, rav_wrong),
        (Choice::Right, rav_right),
        (Choice::None, rav_none),
    ];
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(a.0.priority().cmp(&b.0.priority()))
    });
    Ok(Ranking {
        order: [scored[0].0, scored[1].0, scored[2].0],
    })
}

/// The physical asset the portfolio is concentrated in, which is the right
/// one to hedge with. Undefined for a blended portfolio.
pub fn right_asset(alpha: f64) -> Option<StrategyChoice> {
    if alpha == 0.0 {
        Some(StrategyChoice::TradeAsset2)
    } else if alpha == 1.0 {
        Some(StrategyChoice::TradeAsset1)
    } else {
        None
    }
}

fn other(asset: StrategyChoice) -> StrategyChoice {
    match asset {
        StrategyChoice::TradeAsset1 => StrategyChoice::TradeAsset2,
        StrategyChoice::TradeAsset2 => StrategyChoice::TradeAsset1,
        StrategyChoice::TradeNone => StrategyChoice::TradeNone,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub alpha: f64,
    pub rho: f64,
    pub num_steps: usize,
    pub lambda: f64,
    pub cost_variant: CostVariant,
    pub rav_wrong: f64,
    pub rav_right: f64,
    pub rav_none: f64,
    pub ranking: Ranking,
    pub right_asset: StrategyChoice,
}

/// Hedged strategies are scored on the discounted simulated price; the
/// no-hedge strategy on its discounted payoff.
fn strategy_rav(summary: &StrategySummary, hedged: bool, lambda: f64) -> f64 {
    let (mean, std) = if hedged {
        (summary.mean_price, summary.std_price)
    } else {
        (summary.mean_measure, summary.std_measure)
    };
    rav(RavInputs { mean, std, lambda })
}

pub fn decide_from(
    wrong: &StrategySummary,
    right: &StrategySummary,
    none: &StrategySummary,
    lambda: f64,
) -> Result<(f64, f64, f64, Ranking)> {
    let rw = strategy_rav(wrong, true, lambda);
    let rr = strategy_rav(right, true, lambda);
    let rn = strategy_rav(none, false, lambda);
    Ok((rw, rr, rn, rank_strategies(rw, rr, rn)?))
}

/// Decision reports at one grid point for each λ and cost variant.
pub fn decide_point(
    point: &PointResult,
    lambdas: &[f64],
    variants: &[CostVariant],
) -> Result<Vec<DecisionReport>> {
    let alpha = point.params.portfolio.alpha;
    let right = right_asset(alpha).ok_or_else(|| {
        Error::Contract(format!(
            "wrong/right asset labels are undefined for alpha = {alpha}"
        ))
    })?;
    let wrong = other(right);
    let none = point
        .get(StrategyKey::none())
        .ok_or_else(|| Error::Contract("no-hedge summary missing".into()))?;
    let mut out = Vec::new();
    for &costs in variants {
        let lookup = |s: StrategyChoice| {
            point.get(StrategyKey::new(s, costs)).ok_or_else(|| {
                Error::Contract(format!("{s:?} summary missing for {} costs", costs.label()))
            })
        };
        let (ws, rs) = (lookup(wrong)?, lookup(right)?);
        for &lambda in lambdas {
            let (rav_wrong, rav_right, rav_none, ranking) = decide_from(ws, rs, none, lambda)?;
            out.push(DecisionReport {
                alpha,
                rho: point.params.corr.rho(),
                num_steps: point.params.grid.num_steps(),
                lambda,
                cost_variant: costs,
                rav_wrong,
                rav_right,
                rav_none,
                ranking,
                right_asset: right,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_formula() {
        assert_eq!(market_price_of_risk(0.02, 0.02, 0.1).unwrap(), 0.0);
        assert!((market_price_of_risk(0.05, 0.02, 0.15).unwrap() - 0.2).abs() < 1e-12);
        assert!((market_price_of_risk(0.08, 0.02, 0.03).unwrap() - 2.0).abs() < 1e-12);
        assert!(market_price_of_risk(0.08, 0.02, 0.0).is_err());
    }

    #[test]
    fn rav_examples() {
        assert_eq!(
            rav(RavInputs {
                mean: 4.4,
                std: 6.86,
                lambda: 0.0
            }),
            4.4
        );
        assert!(
            (rav(RavInputs {
                mean: 4.4,
                std: 6.86,
                lambda: 0.5
            }) - 0.97)
                .abs()
                < 1e-12
        );
        assert!(
            (rav(RavInputs {
                mean: 4.46,
                std: 1.0,
                lambda: 2.0
            }) - 2.46)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn strict_ordering() {
        let r = rank_strategies(1.2, 1.5, 0.3).unwrap();
        assert_eq!(r.verdict(Choice::Right), Verdict::Best);
        assert_eq!(r.verdict(Choice::Wrong), Verdict::Second);
        assert_eq!(r.verdict(Choice::None), Verdict::Worst);
    }

    #[test]
    fn ties_prefer_fewer_trades() {
        let r = rank_strategies(1.0, 1.0, 1.0).unwrap();
        assert_eq!(r.order, [Choice::None, Choice::Right, Choice::Wrong]);
        let r = rank_strategies(2.0, 2.0, 0.0).unwrap();
        assert_eq!(r.order, [Choice::Right, Choice::Wrong, Choice::None]);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(rank_strategies(f64::NAN, 1.0, 0.0).is_err());
        assert!(rank_strategies(1.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn right_asset_resolution() {
        assert_eq!(right_asset(0.0), Some(StrategyChoice::TradeAsset2));
        assert_eq!(right_asset(1.0), Some(StrategyChoice::TradeAsset1));
        assert_eq!(right_asset(0.5), None);
    }

    fn summary(
        mean_price: f64,
        std_price: f64,
        mean_measure: f64,
        std_measure: f64,
    ) -> StrategySummary {
        StrategySummary {
            n_sims: 100,
            mean_price,
            std_price,
            mean_s_t: 50.0,
            std_s_t: 10.0,
            mean_measure,
            std_measure,
            bs_price: 4.46,
            unhedged_value: 4.46,
            leland: None,
        }
    }

    #[test]
    fn no_hedge_scored_on_measure() {
        // distinct price and measure statistics reveal which pair is used
        let wrong = summary(3.0, 1.0, 100.0, 0.0);
        let right = summary(4.0, 1.0, 100.0, 0.0);
        let none = summary(-100.0, 0.0, 5.0, 2.0);
        let (rw, rr, rn, ranking) = decide_from(&wrong, &right, &none, 1.0).unwrap();
        assert_eq!((rw, rr, rn), (2.0, 3.0, 3.0));
        // tie between RA and NA resolves to NA
        assert_eq!(ranking.order, [Choice::None, Choice::Right, Choice::Wrong]);
    }
}
