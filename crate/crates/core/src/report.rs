//! CSV and console rendering.
//!
//! Full-precision files print computed values with 17 significant digits;
//! the rounded variant prints the same values at 2 decimals. Inputs (α, ρ, λ)
//! are echoed in their shortest round-trip form.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::decision::{Choice, DecisionReport};
use crate::experiment::{CostVariant, GridResults, StrategySummary};
use crate::hedge::StrategyChoice;
use crate::{Error, Result};

pub const STATS_HEADER: &str = "alpha,bs_price,avg_unhedged,avg_sim_price,std_sim_price,avg_S_T,std_S_T,dis_P_measure,std_dis_P,cost_variant,traded_asset,rho,num_steps,leland_A";

pub const DECISION_HEADER: &str =
    "rho,num_steps,lambda,cost_variant,WA,RA,NA,rav_WA,rav_RA,rav_NA,alpha,right_asset";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Full,
    Rounded,
}

/// `%.17g`-style formatting.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if !(-5..17).contains(&exp) {
        let (mantissa, e) = sci.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{e}");
    }
    let fixed = format!("{x:.*}", (16 - exp).max(0) as usize);
    if fixed.contains('.') {
        fixed
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        fixed
    }
}

fn value(x: f64, precision: Precision) -> String {
    match precision {
        Precision::Full => sig17(x),
        Precision::Rounded => {
            let s = format!("{x:.2}");
            if s == "-0.00" {
                "0.00".into()
            } else {
                s
            }
        }
    }
}

struct StatsRow<'a> {
    alpha: f64,
    rho: f64,
    steps: usize,
    costs: CostVariant,
    traded: u8,
    summary: &'a StrategySummary,
}

fn stats_rows(results: &GridResults) -> Vec<StatsRow<'_>> {
    let mut rows: Vec<StatsRow<'_>> = results
        .points
        .iter()
        .flat_map(|p| {
            p.entries.iter().filter_map(move |(key, summary)| {
                key.strategy.asset_id().map(|traded| StatsRow {
                    alpha: p.params.portfolio.alpha,
                    rho: p.params.corr.rho(),
                    steps: p.params.grid.num_steps(),
                    costs: key.costs,
                    traded,
                    summary,
                })
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.rho
            .total_cmp(&b.rho)
            .then(a.steps.cmp(&b.steps))
            .then(a.alpha.total_cmp(&b.alpha))
            .then(a.costs.cmp(&b.costs))
            .then(a.traded.cmp(&b.traded))
    });
    rows
}

/// One row per (grid point, cost variant, traded asset).
pub fn render_stats_csv(results: &GridResults, precision: Precision) -> String {
    let mut out = String::new();
    out.push_str(STATS_HEADER);
    out.push('\n');
    for row in stats_rows(results) {
        let s = row.summary;
        let leland = s.leland.map(|a| value(a, precision)).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.alpha,
            value(s.bs_price, precision),
            value(s.unhedged_value, precision),
            value(s.mean_price, precision),
            value(s.std_price, precision),
            value(s.mean_s_t, precision),
            value(s.std_s_t, precision),
            value(s.mean_measure, precision),
            value(s.std_measure, precision),
            row.costs.label(),
            row.traded,
            row.rho,
            row.steps,
            leland,
        );
    }
    out
}

fn decision_order(a: &DecisionReport, b: &DecisionReport) -> Ordering {
    a.rho
        .total_cmp(&b.rho)
        .then(a.num_steps.cmp(&b.num_steps))
        .then(a.lambda.total_cmp(&b.lambda))
        .then(a.cost_variant.cmp(&b.cost_variant))
        .then(a.alpha.total_cmp(&b.alpha))
}

fn sorted(reports: &[DecisionReport]) -> Result<Vec<&DecisionReport>> {
    if let Some(r) = reports.iter().find(|r| r.alpha != 0.0 && r.alpha != 1.0) {
        return Err(Error::Contract(format!(
            "decision tables need alpha in {{0, 1}}, got {}",
            r.alpha
        )));
    }
    let mut rows: Vec<&DecisionReport> = reports.iter().collect();
    rows.sort_by(|a, b| decision_order(a, b));
    Ok(rows)
}

pub fn render_decision_csv(reports: &[DecisionReport]) -> Result<String> {
    let mut out = String::new();
    out.push_str(DECISION_HEADER);
    out.push('\n');
    for r in sorted(reports)? {
        let right = match r.right_asset {
            StrategyChoice::TradeAsset1 => 1,
            _ => 2,
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.rho,
            r.num_steps,
            r.lambda,
            r.cost_variant.label(),
            r.ranking.verdict(Choice::Wrong).word(),
            r.ranking.verdict(Choice::Right).word(),
            r.ranking.verdict(Choice::None).word(),
            sig17(r.rav_wrong),
            sig17(r.rav_right),
            sig17(r.rav_none),
            r.alpha,
            right,
        );
    }
    Ok(out)
}

/// Human-readable decision table with ✓✓/✓/✗ marks.
pub fn render_decision_console(reports: &[DecisionReport]) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:>6} {:>5} {:>7} {:>4} {:>4} {:>4}  {:>9} {:>9} {:>9}",
        "alpha", "rho", "steps", "lambda", "WA", "RA", "NA", "RAV(WA)", "RAV(RA)", "RAV(NA)"
    );
    let mut last_group: Option<(u64, CostVariant)> = None;
    for r in sorted(reports)? {
        let group = (r.rho.to_bits(), r.cost_variant);
        if last_group.is_some_and(|g| g.0 != group.0) {
            out.push('\n');
        }
        last_group = Some(group);
        let _ = writeln!(
            out,
            "{:>5} {:>6} {:>5} {:>7} {:>4} {:>4} {:>4}  {:>9.3} {:>9.3} {:>9.3}  [{} costs]",
            r.alpha,
            r.rho,
            r.num_steps,
            r.lambda,
            r.ranking.verdict(Choice::Wrong).mark(),
            r.ranking.verdict(Choice::Right).mark(),
            r.ranking.verdict(Choice::None).mark(),
            r.rav_wrong,
            r.rav_right,
            r.rav_none,
            r.cost_variant.label(),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig17_formats() {
        assert_eq!(sig17(0.0), "0");
        assert_eq!(sig17(4.5), "4.5");
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(-2.0), "-2");
        assert_eq!(sig17(1e-9), "1.0000000000000001e-9");
        for x in [4.457_799_7_f64, 1.0 / 3.0, 51.010_1, -0.97, 1e20, 6.02e-7] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x, "{x}");
        }
    }

    #[test]
    fn empty_results_are_header_only() {
        let csv = render_stats_csv(&GridResults { points: vec![] }, Precision::Full);
        assert_eq!(csv, format!("{STATS_HEADER}\n"));
        assert_eq!(
            render_decision_csv(&[]).unwrap(),
            format!("{DECISION_HEADER}\n")
        );
    }

    #[test]
    fn rounding() {
        assert_eq!(value(4.4578, Precision::Rounded), "4.46");
        assert_eq!(value(-0.001, Precision::Rounded), "0.00");
    }
}
