//! Built-in acceptance checks, run by `hedgelab validate` and by the
//! `acceptance` test target. Every tolerance is fixed here.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analytic::{
    blended_volatility, bs_call, bs_delta, leland_number, norm_cdf, unhedged_value, PortfolioSpec,
};
use crate::cli::build_outputs;
use crate::decision::{decide_from, rank_strategies, rav, Choice, RavInputs};
use crate::experiment::{
    run_point, CellParams, CostVariant, ExperimentConfig, StrategyKey, StrategySummary,
};
use crate::hedge::{hedge_path, StrategyChoice};
use crate::paths::{AssetSpec, CorrelationSpec, GbmSource, PathSource, TimeGrid};
use crate::{Result, DEFAULT_SEED};

/// Black-Scholes price at the reference parameters (S = K = 50, r = 0.02, σ = 0.2, T = 1).
pub const REFERENCE_BS: f64 = 4.4578;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} :: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail
        )
    }
}

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    check: fn() -> Result<(bool, String)>,
}

impl Criterion {
    pub fn run(&self) -> Outcome {
        let (passed, detail) = match (self.check)() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        Outcome {
            id: self.id,
            title: self.title,
            passed,
            detail,
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            title: "analytic Black-Scholes prices",
            check: analytic_prices,
        },
        Criterion {
            id: 2,
            title: "zero-volatility hedge oracle",
            check: zero_vol_oracle,
        },
        Criterion {
            id: 3,
            title: "replication calibration without costs",
            check: replication_calibration,
        },
        Criterion {
            id: 4,
            title: "transaction-cost drag",
            check: cost_drag,
        },
        Criterion {
            id: 5,
            title: "wrong-asset risk blow-up",
            check: wrong_asset_risk,
        },
        Criterion {
            id: 6,
            title: "unhedged value consistency",
            check: unhedged_consistency,
        },
        Criterion {
            id: 7,
            title: "terminal portfolio price moment",
            check: terminal_moment,
        },
        Criterion {
            id: 8,
            title: "correlation fidelity",
            check: correlation_fidelity,
        },
        Criterion {
            id: 9,
            title: "decision-table reproduction",
            check: decision_tables,
        },
        Criterion {
            id: 10,
            title: "Leland number flags",
            check: leland_flags,
        },
        Criterion {
            id: 11,
            title: "worker-count determinism",
            check: determinism,
        },
        Criterion {
            id: 12,
            title: "analytic and decision property sweeps",
            check: property_sweeps,
        },
    ]
}

pub fn run_all() -> Vec<Outcome> {
    criteria().iter().map(Criterion::run).collect()
}

pub fn run_one(id: u8) -> Option<Outcome> {
    criteria().iter().find(|c| c.id == id).map(Criterion::run)
}

fn reference_asset(mu: f64, k: f64) -> AssetSpec {
    AssetSpec {
        s0: 50.0,
        mu,
        sigma: 0.2,
        cost_rate: k,
    }
}

fn reference_point(
    alpha: f64,
    rho: f64,
    steps: usize,
    a1: AssetSpec,
    a2: AssetSpec,
    n_sims: u64,
) -> Result<CellParams> {
    Ok(CellParams {
        asset1: a1,
        asset2: a2,
        portfolio: PortfolioSpec::new(alpha, 50.0, 0.02, 1.0)?,
        corr: CorrelationSpec::new(rho)?,
        grid: TimeGrid::new(1.0, steps)?,
        n_sims,
        master_seed: DEFAULT_SEED,
    })
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn analytic_prices() -> Result<(bool, String)> {
    let c0 = bs_call(50.0, 50.0, 0.02, 0.2, 1.0)?;
    let sigma = blended_volatility(0.5, 0.2, 0.2, 0.2)?;
    let c_half = bs_call(50.0, 50.0, 0.02, sigma, 1.0)?;
    let ok = within(c0, REFERENCE_BS, 0.005) && within(c_half, 3.578, 0.005);
    Ok((ok, format!("C(sigma=0.2) = {c0:.5} (4.4578 +/- 0.005); C(alpha=0.5, rho=0.2) = {c_half:.5} (3.578 +/- 0.005)")))
}

fn zero_vol_oracle() -> Result<(bool, String)> {
    let a = AssetSpec {
        s0: 50.0,
        mu: 0.02,
        sigma: 0.0,
        cost_rate: 0.0,
    };
    let p = reference_point(1.0, 0.2, 252, a, a, 200)?;
    let src = p.source();
    let mut worst: f64 = 0.0;
    for i in 0..p.n_sims {
        let out = hedge_path(
            &src.path(i),
            &p.portfolio,
            StrategyChoice::TradeAsset1,
            &a,
            &a,
        )?;
        worst = worst.max((out.discounted_price - 0.9901).abs());
    }
    Ok((
        worst <= 1e-3,
        format!("max |price - 0.9901| over 200 paths = {worst:.2e} (<= 1e-3)"),
    ))
}

fn hedge_key(strategy: StrategyChoice, costs: CostVariant) -> StrategyKey {
    StrategyKey::new(strategy, costs)
}

fn replication_calibration() -> Result<(bool, String)> {
    let p = reference_point(
        1.0,
        0.2,
        252,
        reference_asset(0.02, 0.0),
        reference_asset(0.02, 0.0),
        10_000,
    )?;
    let s = run_point(
        &p,
        &[hedge_key(StrategyChoice::TradeAsset1, CostVariant::With)],
    )?
    .remove(0);
    let tol = 3.0 * s.std_price / 100.0;
    let ok = within(s.mean_price, REFERENCE_BS, tol) && (0.7..=1.4).contains(&s.std_price);
    Ok((
        ok,
        format!(
            "mean = {:.4} (|mean - 4.4578| <= {tol:.4}), std = {:.4} (in [0.7, 1.4])",
            s.mean_price, s.std_price
        ),
    ))
}

fn cost_drag() -> Result<(bool, String)> {
    let p = reference_point(
        1.0,
        0.2,
        252,
        reference_asset(0.02, 0.005),
        reference_asset(0.02, 0.0),
        10_000,
    )?;
    let keys = [
        hedge_key(StrategyChoice::TradeAsset1, CostVariant::Without),
        hedge_key(StrategyChoice::TradeAsset1, CostVariant::With),
    ];
    let s = run_point(&p, &keys)?;
    let (free, costly) = (s[0].mean_price, s[1].mean_price);
    let ok = (3.0..=3.5).contains(&costly) && costly < free;
    Ok((
        ok,
        format!("mean with k1=0.005 = {costly:.4} (in [3.0, 3.5]); without = {free:.4}"),
    ))
}

fn wrong_asset_risk() -> Result<(bool, String)> {
    let p = reference_point(
        0.0,
        0.2,
        252,
        reference_asset(0.02, 0.0),
        reference_asset(0.02, 0.0),
        10_000,
    )?;
    let s = run_point(
        &p,
        &[hedge_key(StrategyChoice::TradeAsset1, CostVariant::With)],
    )?
    .remove(0);
    let se = s.price_std_error();
    let ok = within(s.mean_price, REFERENCE_BS, 3.0 * se) && (8.0..=9.8).contains(&s.std_price);
    Ok((
        ok,
        format!(
            "mean = {:.4} (within 3 SE = {:.4} of 4.4578), std = {:.4} (in [8.0, 9.8])",
            s.mean_price,
            3.0 * se,
            s.std_price
        ),
    ))
}

/// Direct terminal sampling of `e^{−rT}(S_T − K)⁺` under drift `mu`; it never
/// touches the path simulator.
#[allow(clippy::too_many_arguments)]
fn payoff_monte_carlo(
    spot: f64,
    strike: f64,
    rate: f64,
    mu: f64,
    sigma: f64,
    tau: f64,
    n: u64,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let discount = (-rate * tau).exp();
    let drift = (mu - 0.5 * sigma * sigma) * tau;
    let vol = sigma * tau.sqrt();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        let x = discount * (spot * (drift + vol * z).exp() - strike).max(0.0);
        sum += x;
        sum_sq += x * x;
    }
    let mean = sum / n as f64;
    let var = (sum_sq - n as f64 * mean * mean) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn unhedged_consistency() -> Result<(bool, String)> {
    let a = reference_asset(0.02, 0.0);
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.0, 0.5, 1.0] {
        let p = reference_point(alpha, 0.2, 252, a, a, 10_000)?;
        let s = run_point(&p, &[StrategyKey::none()])?.remove(0);
        let sigma = blended_volatility(alpha, 0.2, 0.2, 0.2)?;
        let bs = bs_call(50.0, 50.0, 0.02, sigma, 1.0)?;
        let identity = (s.unhedged_value - bs).abs() <= 1e-12;
        let close = within(
            s.mean_measure,
            s.unhedged_value,
            3.0 * s.measure_std_error(),
        );
        ok &= identity && close;
        detail.push(format!(
            "alpha={alpha}: measure {:.4} vs UV {:.4} (3 SE {:.4})",
            s.mean_measure,
            s.unhedged_value,
            3.0 * s.measure_std_error()
        ));
    }
    let uv = unhedged_value(50.0, 50.0, 0.02, 0.05, 0.2, 1.0)?;
    let (mc, se) = payoff_monte_carlo(
        50.0,
        50.0,
        0.02,
        0.05,
        0.2,
        1.0,
        100_000,
        DEFAULT_SEED ^ 0x5eed,
    );
    ok &= within(uv, mc, 3.0 * se);
    detail.push(format!(
        "mu=0.05: UV {uv:.4} vs MC {mc:.4} (3 SE {:.4})",
        3.0 * se
    ));
    Ok((ok, detail.join("; ")))
}

fn terminal_moment() -> Result<(bool, String)> {
    let a = reference_asset(0.02, 0.0);
    let expected = 50.0 * 0.02f64.exp();
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.0, 0.5, 1.0] {
        let p = reference_point(alpha, 0.2, 252, a, a, 10_000)?;
        let s = run_point(&p, &[StrategyKey::none()])?.remove(0);
        let tol = 3.0 * s.s_t_std_error();
        ok &= within(s.mean_s_t, expected, tol);
        detail.push(format!("alpha={alpha}: {:.3} (3 SE {tol:.3})", s.mean_s_t));
    }
    Ok((ok, format!("target {expected:.4}; {}", detail.join(", "))))
}

/// Pearson correlation of the standardized per-step innovations recovered
/// from the simulated log returns.
pub fn innovation_correlation(source: &GbmSource, n_paths: u64) -> f64 {
    let dt = source.grid.dt();
    let standardize = |a: &AssetSpec, prev: f64, next: f64| {
        ((next / prev).ln() - (a.mu - 0.5 * a.sigma * a.sigma) * dt) / (a.sigma * dt.sqrt())
    };
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n_paths {
        let p = source.path(i);
        for t in 1..p.s1.len() {
            let x = standardize(&source.asset1, p.s1[t - 1], p.s1[t]);
            let y = standardize(&source.asset2, p.s2[t - 1], p.s2[t]);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            n += 1.0;
        }
    }
    let cov = sxy / n - (sx / n) * (sy / n);
    let vx = sxx / n - (sx / n).powi(2);
    let vy = syy / n - (sy / n).powi(2);
    cov / (vx * vy).sqrt()
}

fn correlation_fidelity() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for rho in [0.2, 0.99] {
        let a = reference_asset(0.02, 0.0);
        let src = reference_point(0.0, rho, 252, a, a, 10_000)?.source();
        let est = innovation_correlation(&src, 10_000);
        ok &= within(est, rho, 0.02);
        detail.push(format!("rho={rho}: {est:.4}"));
    }
    Ok((ok, format!("{} (+/- 0.02)", detail.join(", "))))
}

pub const DECISION_RHOS: [f64; 8] = [0.2, 0.3, 0.35, 0.5, 0.55, 0.7, 0.8, 0.99];
pub const DECISION_STEPS: [usize; 5] = [2, 4, 12, 52, 252];

/// Right = asset 2 (α = 0), wrong = asset 1, both drifting at 5%.
fn decision_best(
    rho: f64,
    steps: usize,
    k_wrong: f64,
    k_right: f64,
    lambda: f64,
) -> Result<(Choice, [f64; 3])> {
    let p = reference_point(
        0.0,
        rho,
        steps,
        reference_asset(0.05, k_wrong),
        reference_asset(0.05, k_right),
        10_000,
    )?;
    let keys = [
        hedge_key(StrategyChoice::TradeAsset1, CostVariant::With),
        hedge_key(StrategyChoice::TradeAsset2, CostVariant::With),
        StrategyKey::none(),
    ];
    let s: Vec<StrategySummary> = run_point(&p, &keys)?;
    let (rw, rr, rn, ranking) = decide_from(&s[0], &s[1], &s[2], lambda)?;
    Ok((ranking.best(), [rw, rr, rn]))
}

fn decision_tables() -> Result<(bool, String)> {
    let mut misses = Vec::new();
    let mut cells = 0;
    for &rho in &DECISION_RHOS {
        for &steps in &DECISION_STEPS {
            cells += 1;
            let (best, ravs) = decision_best(rho, steps, 0.0, 0.01, 2.0)?;
            let expected = if rho <= 0.8 {
                Choice::Right
            } else {
                Choice::Wrong
            };
            if best != expected {
                misses.push(format!(
                    "k=(0,0.01) lambda=2 rho={rho} N={steps}: best {} expected {} RAV(WA,RA,NA)=({:.3},{:.3},{:.3})",
                    best.code(), expected.code(), ravs[0], ravs[1], ravs[2]
                ));
            }
        }
    }
    for &rho in &DECISION_RHOS {
        for steps in [52, 252] {
            cells += 1;
            let (best, ravs) = decision_best(rho, steps, 0.1, 0.1, 0.5)?;
            if best != Choice::None {
                misses.push(format!(
                    "k=(0.1,0.1) lambda=0.5 rho={rho} N={steps}: best {} expected NA RAV(WA,RA,NA)=({:.3},{:.3},{:.3})",
                    best.code(), ravs[0], ravs[1], ravs[2]
                ));
            }
        }
    }
    let ok = misses.is_empty();
    let detail = if ok {
        format!("{cells} cells at seed {DEFAULT_SEED} match the expected best strategy")
    } else {
        format!(
            "{} of {cells} cells differ: {}",
            misses.len(),
            misses.join(" | ")
        )
    };
    Ok((ok, detail))
}

fn leland_flags() -> Result<(bool, String)> {
    let low = leland_number(0.005, 0.2, 1.0 / 252.0)?;
    let high = leland_number(0.1, 0.2, 1.0 / 252.0)?;
    let ok = within(low, 0.3167, 0.0005) && low < 1.0 && within(high, 6.333, 0.005) && high > 1.0;
    Ok((
        ok,
        format!("A(0.005) = {low:.4} (< 1), A(0.1) = {high:.4} (> 1)"),
    ))
}

/// A reduced stats grid used to compare outputs across worker counts.
pub fn determinism_config() -> ExperimentConfig {
    ExperimentConfig {
        asset1: reference_asset(0.02, 0.005),
        asset2: reference_asset(0.02, 0.001),
        strike: 50.0,
        rate: 0.02,
        expiry: 1.0,
        alphas: vec![0.0, 0.5, 1.0],
        rhos: vec![0.2, 0.99],
        steps: vec![12, 52],
        lambdas: vec![2.0, 0.5],
        n_sims: 2_000,
        master_seed: DEFAULT_SEED,
        cost_variants: vec![CostVariant::Without, CostVariant::With],
        traded: vec![StrategyChoice::TradeAsset1, StrategyChoice::TradeAsset2],
    }
}

fn determinism() -> Result<(bool, String)> {
    let config = determinism_config();
    let one = build_outputs("simulate", &config, Some(1))?.files;
    let eight = build_outputs("simulate", &config, Some(8))?.files;
    let ok = one == eight;
    let bytes: usize = one.iter().map(|(_, c)| c.len()).sum();
    Ok((
        ok,
        format!(
            "{} files, {bytes} bytes, identical for 1 and 8 workers: {ok}",
            one.len()
        ),
    ))
}

fn property_sweeps() -> Result<(bool, String)> {
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |what: &str| failures.push(what.to_string());

    // norm_cdf symmetry and monotonicity
    let mut prev = 0.0;
    for i in -800..=800 {
        let x = i as f64 * 0.01;
        let p = norm_cdf(x);
        if (norm_cdf(-x) - (1.0 - p)).abs() > 1e-12 {
            fail("norm_cdf symmetry");
            break;
        }
        if p < prev {
            fail("norm_cdf monotonicity");
            break;
        }
        prev = p;
    }

    // bs_call bounds and monotonicity, delta against central differences
    let spots = [20.0, 40.0, 50.0, 60.0, 90.0];
    let sigmas = [0.1, 0.2, 0.4, 0.8];
    let taus = [0.25, 0.5, 1.0, 2.0];
    let rates = [0.0, 0.02, 0.08];
    for &r in &rates {
        for &sigma in &sigmas {
            for &tau in &taus {
                for &s in &spots {
                    let c = bs_call(s, 50.0, r, sigma, tau)?;
                    let lower = (s - 50.0 * (-r * tau).exp()).max(0.0);
                    if c < lower - 1e-10 || c > s + 1e-10 {
                        fail("bs_call bounds");
                    }
                    if bs_call(s * 1.01, 50.0, r, sigma, tau)? < c - 1e-12 {
                        fail("bs_call monotone in spot");
                    }
                    if bs_call(s, 50.0, r, sigma * 1.1, tau)? < c - 1e-12 {
                        fail("bs_call monotone in sigma");
                    }
                    if bs_call(s, 50.0, r, sigma, tau * 1.1)? < c - 1e-12 {
                        fail("bs_call monotone in tau");
                    }
                    let h = 1e-4 * s;
                    let fd = (bs_call(s + h, 50.0, r, sigma, tau)?
                        - bs_call(s - h, 50.0, r, sigma, tau)?)
                        / (2.0 * h);
                    if (fd - bs_delta(s, 50.0, r, sigma, tau)?).abs() > 1e-5 {
                        fail("delta vs finite difference");
                    }
                }
            }
        }
    }

    // blended volatility degenerate cases
    for i in 0..=10 {
        let alpha = i as f64 / 10.0;
        for sigma in [0.0, 0.15, 0.3] {
            if (blended_volatility(alpha, sigma, sigma, 1.0)? - sigma).abs() > 1e-14 {
                fail("blended_volatility(alpha, s, s, 1) = s");
            }
            for rho in [-1.0, -0.5, 0.0, 0.7] {
                let v = blended_volatility(alpha, sigma, 0.25, rho)?;
                if !(v >= 0.0 && v.is_finite()) {
                    fail("blended_volatility real and nonnegative");
                }
            }
        }
    }

    // RAV affine and monotone in lambda
    for &(mean, std) in &[(4.46, 1.0), (4.4, 6.86), (-2.0, 0.0), (0.5, 12.0)] {
        for &lambda in &[0.0, 0.2, 0.5, 2.0] {
            let base = rav(RavInputs { mean, std, lambda });
            let shifted = rav(RavInputs {
                mean: mean + 3.25,
                std,
                lambda,
            });
            if (shifted - base - 3.25).abs() > 1e-12 {
                fail("rav affine");
            }
            let more = rav(RavInputs {
                mean,
                std,
                lambda: lambda + 0.1,
            });
            if more > base || (std > 0.0 && more >= base) {
                fail("rav monotone in lambda");
            }
        }
    }

    // ranking: deterministic tie-break, shift invariance
    let tied = rank_strategies(1.0, 1.0, 1.0)?;
    if tied.order != [Choice::None, Choice::Right, Choice::Wrong] {
        fail("tie-break NA > RA > WA");
    }
    for triple in [
        (1.2, 1.5, 0.3),
        (0.0, -1.0, 2.0),
        (3.0, 3.0, -1.0),
        (-5.0, 2.0, 2.0),
    ] {
        let a = rank_strategies(triple.0, triple.1, triple.2)?;
        let b = rank_strategies(triple.0 + 10.0, triple.1 + 10.0, triple.2 + 10.0)?;
        if a != b {
            fail("ranking shift invariance");
        }
    }

    failures.dedup();
    let ok = failures.is_empty();
    Ok((
        ok,
        if ok {
            "all sampled properties hold".to_string()
        } else {
            failures.join(", ")
        },
    ))
}
