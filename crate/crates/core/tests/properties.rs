use hedgelab::analytic::{
    blended_volatility, bs_call, bs_delta, norm_cdf, unhedged_value, PortfolioSpec,
};
use hedgelab::decision::{rank_strategies, rav, Choice, RavInputs, Verdict};
use hedgelab::hedge::{hedge_path, unhedged_path, StrategyChoice};
use hedgelab::paths::{
    correlated_normals, simulate_path, AssetSpec, CorrelationSpec, PathStream, TimeGrid,
};
use hedgelab::stats::Moments;
use proptest::prelude::*;

proptest! {
    #[test]
    fn norm_cdf_symmetric(x in -10.0f64..10.0) {
        prop_assert!((norm_cdf(-x) - (1.0 - norm_cdf(x))).abs() <= 1e-12);
    }

    #[test]
    fn norm_cdf_monotone(x in -10.0f64..10.0, dx in 0.0f64..5.0) {
        prop_assert!(norm_cdf(x) <= norm_cdf(x + dx));
        prop_assert!((0.0..=1.0).contains(&norm_cdf(x)));
    }

    #[test]
    fn call_within_arbitrage_bounds(
        spot in 1.0f64..200.0,
        strike in 1.0f64..200.0,
        rate in 0.0f64..0.1,
        sigma in 0.01f64..1.0,
        tau in 0.01f64..3.0,
    ) {
        let c = bs_call(spot, strike, rate, sigma, tau).unwrap();
        let lower = (spot - strike * (-rate * tau).exp()).max(0.0);
        prop_assert!(c >= lower - 1e-9 * spot, "{c} < {lower}");
        prop_assert!(c <= spot + 1e-12);
    }

    #[test]
    fn call_monotone_in_spot_vol_and_time(
        spot in 10.0f64..100.0,
        rate in 0.0f64..0.1,
        sigma in 0.05f64..0.8,
        tau in 0.05f64..2.0,
        bump in 1.001f64..1.5,
    ) {
        let c = bs_call(spot, 50.0, rate, sigma, tau).unwrap();
        prop_assert!(bs_call(spot * bump, 50.0, rate, sigma, tau).unwrap() >= c - 1e-12);
        prop_assert!(bs_call(spot, 50.0, rate, sigma * bump, tau).unwrap() >= c - 1e-12);
        prop_assert!(bs_call(spot, 50.0, rate, sigma, tau * bump).unwrap() >= c - 1e-12);
    }

    #[test]
    fn delta_matches_central_difference(
        spot in 20.0f64..100.0,
        rate in 0.0f64..0.1,
        sigma in 0.1f64..0.8,
        tau in 0.25f64..2.0,
    ) {
        let h = 1e-4 * spot;
        let fd = (bs_call(spot + h, 50.0, rate, sigma, tau).unwrap()
            - bs_call(spot - h, 50.0, rate, sigma, tau).unwrap()) / (2.0 * h);
        let delta = bs_delta(spot, 50.0, rate, sigma, tau).unwrap();
        prop_assert!((fd - delta).abs() <= 1e-5, "fd {fd} vs {delta}");
    }

    #[test]
    fn blended_volatility_degenerate_cases(
        alpha in 0.0f64..=1.0,
        s1 in 0.0f64..1.0,
        s2 in 0.0f64..1.0,
        rho in -1.0f64..=1.0,
    ) {
        prop_assert!((blended_volatility(alpha, s1, s1, 1.0).unwrap() - s1).abs() <= 1e-14);
        prop_assert!((blended_volatility(1.0, s1, s2, rho).unwrap() - s1).abs() <= 1e-14);
        prop_assert!((blended_volatility(0.0, s1, s2, rho).unwrap() - s2).abs() <= 1e-14);
        let perfect = alpha * s1 + (1.0 - alpha) * s2;
        prop_assert!((blended_volatility(alpha, s1, s2, 1.0).unwrap() - perfect).abs() <= 1e-12);
        let v = blended_volatility(alpha, s1, s2, rho).unwrap();
        prop_assert!(v >= 0.0 && v <= perfect + 1e-12);
    }

    #[test]
    fn unhedged_value_reduces_to_call_when_drift_is_rate(
        spot in 10.0f64..100.0,
        rate in 0.0f64..0.1,
        sigma in 0.05f64..0.8,
        tau in 0.05f64..2.0,
    ) {
        let uv = unhedged_value(spot, 50.0, rate, rate, sigma, tau).unwrap();
        let c = bs_call(spot, 50.0, rate, sigma, tau).unwrap();
        prop_assert!((uv - c).abs() <= 1e-12);
    }

    #[test]
    fn rav_is_affine_and_monotone(
        mean in -50.0f64..50.0,
        std in 0.0f64..20.0,
        lambda in 0.0f64..3.0,
        shift in -10.0f64..10.0,
        dl in 0.01f64..1.0,
    ) {
        let base = rav(RavInputs { mean, std, lambda });
        let moved = rav(RavInputs { mean: mean + shift, std, lambda });
        prop_assert!((moved - base - shift).abs() <= 1e-9);
        let steeper = rav(RavInputs { mean, std, lambda: lambda + dl });
        prop_assert!(steeper <= base);
        if std > 0.0 {
            prop_assert!(steeper < base);
        }
        prop_assert_eq!(rav(RavInputs { mean, std, lambda: 0.0 }), mean);
    }

    #[test]
    fn ranking_is_shift_invariant_bijective_and_sorted(
        w in -20.0f64..20.0,
        r in -20.0f64..20.0,
        n in -20.0f64..20.0,
        shift in -5.0f64..5.0,
    ) {
        let a = rank_strategies(w, r, n).unwrap();
        // rounding in the shift can create or break exact ties
        let b = rank_strategies(w + shift, r + shift, n + shift).unwrap();
        let strict = w != r && r != n && w != n
            && (w + shift != r + shift) && (r + shift != n + shift) && (w + shift != n + shift);
        if strict {
            prop_assert_eq!(a, b);
        }
        let mut verdicts: Vec<Verdict> = [Choice::Wrong, Choice::Right, Choice::None]
            .iter().map(|&c| a.verdict(c)).collect();
        verdicts.sort_by_key(|v| *v as u8);
        prop_assert_eq!(verdicts, vec![Verdict::Best, Verdict::Second, Verdict::Worst]);
        let value = |c: Choice| match c { Choice::Wrong => w, Choice::Right => r, Choice::None => n };
        prop_assert!(value(a.order[0]) >= value(a.order[1]));
        prop_assert!(value(a.order[1]) >= value(a.order[2]));
    }

    #[test]
    fn ties_are_broken_deterministically(v in -10.0f64..10.0) {
        let r = rank_strategies(v, v, v).unwrap();
        prop_assert_eq!(r.order, [Choice::None, Choice::Right, Choice::Wrong]);
        let r = rank_strategies(v, v, v - 1.0).unwrap();
        prop_assert_eq!(r.order, [Choice::Right, Choice::Wrong, Choice::None]);
    }

    #[test]
    fn paths_stay_positive_and_reproducible(
        seed in any::<u64>(),
        index in 0u64..1_000_000,
        mu in -0.5f64..0.5,
        sigma in 0.0f64..2.0,
        rho in -1.0f64..=1.0,
        steps in 1usize..64,
    ) {
        let a1 = AssetSpec::new(50.0, mu, sigma, 0.0).unwrap();
        let a2 = AssetSpec::new(20.0, -mu, sigma * 0.5, 0.0).unwrap();
        let corr = CorrelationSpec::new(rho).unwrap();
        let grid = TimeGrid::new(1.0, steps).unwrap();
        let p = simulate_path(&a1, &a2, &corr, &grid, &mut PathStream::new(seed, index));
        let q = simulate_path(&a1, &a2, &corr, &grid, &mut PathStream::new(seed, index));
        prop_assert_eq!(&p, &q);
        prop_assert_eq!(p.s1.len(), steps + 1);
        prop_assert_eq!(p.s1[0], 50.0);
        prop_assert_eq!(p.s2[0], 20.0);
        prop_assert!(p.s1.iter().chain(&p.s2).all(|&s| s > 0.0 && s.is_finite()));
        prop_assert_eq!(p.times[steps], 1.0);
    }

    #[test]
    fn correlated_pair_follows_the_mixing_rule(seed in any::<u64>(), rho in -1.0f64..=1.0) {
        let corr = CorrelationSpec::new(rho).unwrap();
        let mut a = PathStream::new(seed, 0);
        let (z1, z2) = correlated_normals(&mut a, &corr);
        let mut b = PathStream::new(seed, 0);
        let (x, w) = (b.standard_normal(), b.standard_normal());
        prop_assert_eq!(z1, x);
        prop_assert!((z2 - (rho * x + (1.0 - rho * rho).sqrt() * w)).abs() <= 1e-15);
    }

    #[test]
    fn ledger_discounting_identity_and_cost_drag(
        seed in any::<u64>(),
        alpha in 0.0f64..=1.0,
        rho in -1.0f64..=1.0,
        k in 0.0001f64..0.05,
        steps in 1usize..60,
    ) {
        let free = AssetSpec::new(50.0, 0.05, 0.25, 0.0).unwrap();
        let costly = free.with_cost(k);
        let spec = PortfolioSpec::new(alpha, 50.0, 0.02, 1.0).unwrap();
        let p = simulate_path(&free, &free, &CorrelationSpec::new(rho).unwrap(),
            &TimeGrid::new(1.0, steps).unwrap(), &mut PathStream::new(seed, 3));
        for traded in [StrategyChoice::TradeAsset1, StrategyChoice::TradeAsset2] {
            let base = hedge_path(&p, &spec, traded, &free, &free).unwrap();
            let with = hedge_path(&p, &spec, traded, &costly, &costly).unwrap();
            let back = base.discounted_price * (0.02f64).exp();
            prop_assert!((back - base.final_pv).abs() <= 1e-12 * base.final_pv.abs().max(1.0));
            prop_assert!(with.discounted_price < base.discounted_price);
            prop_assert!(base.measure >= 0.0);
        }
        let na = unhedged_path(&p, &spec).unwrap();
        prop_assert_eq!(na.discounted_price, na.measure);
    }

    #[test]
    fn moments_merge_independent_of_split(
        xs in proptest::collection::vec(-1e3f64..1e3, 2..200),
        cut in 0usize..200,
    ) {
        let cut = cut.min(xs.len());
        let whole: Moments = xs.iter().copied().collect();
        let mut left: Moments = xs[..cut].iter().copied().collect();
        let right: Moments = xs[cut..].iter().copied().collect();
        left.merge(&right);
        prop_assert_eq!(left.count(), whole.count());
        let scale = whole.mean().abs().max(1.0);
        prop_assert!((left.mean() - whole.mean()).abs() <= 1e-12 * scale);
        let vscale = whole.variance().max(1.0);
        prop_assert!((left.variance() - whole.variance()).abs() <= 1e-9 * vscale);
    }
}
