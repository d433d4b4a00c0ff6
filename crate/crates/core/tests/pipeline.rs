//! Grid runs end to end: statistics, rendering and round trips.

use hedgelab::cli::{build_outputs, decisions_for};
use hedgelab::config::{parse_config, render_config};
use hedgelab::decision::Choice;
use hedgelab::experiment::{run_grid, run_point, CostVariant, StrategyKey};
use hedgelab::hedge::StrategyChoice;
use hedgelab::manifest::RunManifest;
use hedgelab::report::{render_decision_csv, render_stats_csv, Precision, DECISION_HEADER};
use hedgelab::validation::determinism_config;

const SINGLE_ASSET_GRID: &str = "\
s0_1 = 50
s0_2 = 50
mu_1 = 0.02
mu_2 = 0.02
sigma_1 = 0.2
sigma_2 = 0.2
k_1 = 0.005
strike = 50
rate = 0.02
n_sims = 10000
steps = 252
rho = 0.2
alpha = 0
alpha = 1
traded = 1
";

#[test]
fn single_asset_grid_shape_and_first_row() {
    let config = parse_config(SINGLE_ASSET_GRID).unwrap();
    let results = run_grid(&config, None).unwrap();
    let rounded = render_stats_csv(&results, Precision::Rounded);
    let rows: Vec<&str> = rounded.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("0,4.46,4.46,"), "{}", rows[0]);
    assert!(rows[0].contains(",without,1,0.2,252,"));
    assert!(rows[3].starts_with("1,4.46,4.46,"));
    assert!(rows[3].contains(",with,1,0.2,252,0.32"));
}

#[test]
fn rounded_file_is_the_full_file_rounded() {
    let results = run_grid(&determinism_config(), None).unwrap();
    let full = render_stats_csv(&results, Precision::Full);
    let rounded = render_stats_csv(&results, Precision::Rounded);
    for (f, r) in full.lines().skip(1).zip(rounded.lines().skip(1)) {
        for (i, (a, b)) in f.split(',').zip(r.split(',')).enumerate() {
            match i {
                0 | 9 | 10 | 11 | 12 => assert_eq!(a, b),
                _ => {
                    let x: f64 = a.parse().unwrap();
                    let t = format!("{x:.2}");
                    assert_eq!(if t == "-0.00" { "0.00" } else { t.as_str() }, b);
                }
            }
        }
    }
}

#[test]
fn replication_error_shrinks_with_rebalancing() {
    let mut config = parse_config(SINGLE_ASSET_GRID).unwrap();
    config.alphas = vec![1.0];
    config.steps = vec![2, 12, 252];
    config.cost_variants = vec![CostVariant::Without];
    let results = run_grid(&config, None).unwrap();
    let key = StrategyKey::new(StrategyChoice::TradeAsset1, CostVariant::Without);
    let stds: Vec<f64> = results
        .points
        .iter()
        .map(|p| p.get(key).unwrap().std_price)
        .collect();
    assert!(stds[2] < stds[1] && stds[1] < stds[0], "{stds:?}");
}

#[test]
fn wrong_asset_std_exceeds_eight_times_right_asset() {
    let config = parse_config(SINGLE_ASSET_GRID).unwrap();
    let results = run_grid(&config, None).unwrap();
    let key = StrategyKey::new(StrategyChoice::TradeAsset1, CostVariant::Without);
    let wrong = results.points[0].get(key).unwrap().std_price;
    let right = results.points[1].get(key).unwrap().std_price;
    assert!(wrong > 8.0 * right, "{wrong} vs {right}");
}

#[test]
fn costs_lower_the_mean_on_common_paths() {
    let config = parse_config(SINGLE_ASSET_GRID).unwrap();
    let point = &config.points().unwrap()[1];
    let keys = [
        StrategyKey::new(StrategyChoice::TradeAsset1, CostVariant::Without),
        StrategyKey::new(StrategyChoice::TradeAsset1, CostVariant::With),
    ];
    let s = run_point(point, &keys).unwrap();
    assert!(s[1].mean_price < s[0].mean_price);
    // the terminal prices come from the same paths
    assert_eq!(s[0].mean_s_t, s[1].mean_s_t);
}

#[test]
fn decision_csv_for_small_grid() {
    let mut config = determinism_config();
    config.alphas = vec![0.0];
    config.rhos = vec![0.2];
    config.steps = vec![52];
    config.lambdas = vec![2.0];
    config.asset1.cost_rate = 0.0;
    config.asset2.cost_rate = 0.01;
    config.asset1.mu = 0.05;
    config.asset2.mu = 0.05;
    config.n_sims = 10_000;
    let results = run_grid(&config, None).unwrap();
    let reports = decisions_for(&config, &results).unwrap();
    assert_eq!(reports.len(), 2);
    let with = reports
        .iter()
        .find(|r| r.cost_variant == CostVariant::With)
        .unwrap();
    assert_eq!(
        with.ranking.order,
        [Choice::Right, Choice::None, Choice::Wrong]
    );
    let csv = render_decision_csv(&reports).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(DECISION_HEADER));
    assert!(csv.contains("0.2,52,2,with,WORST,BEST,SECOND,"), "{csv}");
    assert_eq!(
        render_decision_csv(&reports[..1]).unwrap().lines().count(),
        2
    );
}

#[test]
fn interior_alpha_gets_no_decision_rows() {
    let config = determinism_config();
    let results = run_grid(&config, None).unwrap();
    let reports = decisions_for(&config, &results).unwrap();
    assert!(reports.iter().all(|r| r.alpha == 0.0 || r.alpha == 1.0));
    // 2 rho x 2 steps x 2 alphas x 2 lambdas x 2 cost variants
    assert_eq!(reports.len(), 32);
}

#[test]
fn manifest_echo_round_trips() {
    let config = determinism_config();
    let manifest = RunManifest::new("simulate", &config, &["stats.csv"]);
    assert_eq!(parse_config(&manifest.config_text).unwrap(), config);
    let back: RunManifest = serde_json::from_str(&manifest.to_json()).unwrap();
    assert_eq!(back, manifest);
    assert_eq!(parse_config(&render_config(&config)).unwrap(), config);
}

#[test]
fn outputs_repeat_byte_for_byte() {
    let config = determinism_config();
    let a = build_outputs("decide", &config, Some(1)).unwrap();
    let b = build_outputs("decide", &config, Some(3)).unwrap();
    assert_eq!(a, b);
    let names: Vec<&str> = a.files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "stats.csv",
            "stats_rounded.csv",
            "decisions.csv",
            "manifest.json"
        ]
    );
}

#[test]
fn seed_changes_output() {
    let config = determinism_config();
    let mut other = config.clone();
    other.master_seed = 7;
    let a = build_outputs("simulate", &config, None).unwrap();
    let b = build_outputs("simulate", &other, None).unwrap();
    assert_ne!(a.files[0], b.files[0]);
}
