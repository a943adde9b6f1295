use std::fmt::Write;

use super::grid::GridResult;

pub const PR_DUMP_HEADER: &str =
    "algorithm,setup,analysis,combination,aggregation,precision,recall,f1";

const GRID_HEADER: &str =
    "rank\tsetup\tanalysis\tcombination\taggregation\talgorithm\tprecision\trecall\tf1\ttp\tfp\tfn\ttn\tseed\tstatus";

fn metric(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Tab-separated grid, one row per cell in the given order. Failed cells
/// carry their reason in the status column.
pub fn grid_tsv(rows: &[GridResult]) -> String {
    let mut out = String::from(GRID_HEADER);
    out.push('\n');
    for (rank, r) in rows.iter().enumerate() {
        let m = r.metrics;
        let count = |f: fn(&super::EvalMetrics) -> usize| {
            m.as_ref().map(|m| f(m).to_string()).unwrap_or_default()
        };
        let status = match &r.failure {
            Some(reason) => format!("failed: {}", reason.replace(['\t', '\n'], " ")),
            None => "ok".to_string(),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            rank + 1,
            r.config.setup(),
            r.config.selector.analysis_label(),
            r.config.combination.as_str(),
            r.config.aggregation.as_str(),
            r.algorithm,
            metric(m.map(|m| m.precision)),
            metric(m.map(|m| m.recall)),
            metric(m.map(|m| m.f1)),
            count(|m| m.true_pos),
            count(|m| m.false_pos),
            count(|m| m.false_neg),
            count(|m| m.true_neg),
            r.seed,
            status,
        );
    }
    out
}

/// Precision/recall dump for plotting, one line per cell. Failed cells have
/// empty metric fields.
pub fn pr_dump_csv(rows: &[GridResult]) -> String {
    let mut out = String::from(PR_DUMP_HEADER);
    out.push('\n');
    for r in rows {
        let m = r.metrics;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.algorithm,
            r.config.setup(),
            r.config.selector.analysis_label(),
            r.config.combination.as_str(),
            r.config.aggregation.as_str(),
            metric(m.map(|m| m.precision)),
            metric(m.map(|m| m.recall)),
            metric(m.map(|m| m.f1)),
        );
    }
    out
}

/// Fixed-width table of the given rows for terminal output.
pub fn top_table(rows: &[GridResult]) -> String {
    let names: Vec<String> = rows.iter().map(|r| r.config.name()).collect();
    let width = names
        .iter()
        .map(|n| n.chars().count())
        .max()
        .unwrap_or(0)
        .max(13);
    let mut out = format!(
        "{:>4}  {:<width$}  {:<7}  {:>9}  {:>9}  {:>9}\n",
        "rank", "configuration", "algo", "precision", "recall", "f1"
    );
    for (i, (r, name)) in rows.iter().zip(&names).enumerate() {
        let m = r.metrics;
        let _ = writeln!(
            out,
            "{:>4}  {:<width$}  {:<7}  {:>9}  {:>9}  {:>9}",
            i + 1,
            name,
            r.algorithm.as_str(),
            metric(m.map(|m| m.precision)),
            metric(m.map(|m| m.recall)),
            metric(m.map(|m| m.f1)),
        );
    }
    out
}
