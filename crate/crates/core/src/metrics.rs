//! Success rate, optimality gap and cost aggregation, verifier confusion
//! counts, library usage, and table export.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::exact::{CertificateStatus, OptimalCertificate};
use crate::pipeline::{
    classify_approach, scan_imports, ApproachRules, ApproachTag, ConfusionLabel, ContextKind, FinalStatus,
    FrameworkKind, LibraryTag, RunRecord,
};
use crate::routing::VariantKind;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("records mix experiment ids: {0:?}")]
    MixedExperiments(Vec<String>),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// `100 * feasible / total`; `None` for an empty set.
pub fn success_rate_counts(feasible: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * feasible as f64 / total as f64)
}

/// Aborted runs count as failures unless `exclude_aborted`.
pub fn success_rate(records: &[&RunRecord], exclude_aborted: bool) -> Option<f64> {
    let counted: Vec<_> = records
        .iter()
        .filter(|r| !(exclude_aborted && r.final_status == FinalStatus::Aborted))
        .collect();
    let ok = counted.iter().filter(|r| r.final_status == FinalStatus::Feasible).count();
    success_rate_counts(ok, counted.len())
}

pub fn gap_percent(v: f64, v_star: f64) -> Option<f64> {
    (v_star != 0.0 && v_star.is_finite()).then(|| 100.0 * (v - v_star) / v_star)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub percent: f64,
    /// Measured against a lower bound rather than a proven optimum.
    pub against_bound: bool,
}

pub fn optimality_gap(v: f64, cert: &OptimalCertificate) -> Option<Gap> {
    match cert.status {
        CertificateStatus::ProvenOptimal => gap_percent(v, cert.value.value).map(|percent| Gap {
            percent,
            against_bound: false,
        }),
        CertificateStatus::BoundOnly => gap_percent(v, cert.lower_bound).map(|percent| Gap {
            percent,
            against_bound: true,
        }),
    }
}

pub fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKey {
    Task,
    Framework,
    Context,
    Model,
}

/// Sortable, printable value of one group key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KeyValue {
    Task(VariantKind),
    Framework(FrameworkKind),
    Context(ContextKind, Option<u8>),
    Model(String),
}

impl KeyValue {
    fn of(key: GroupKey, r: &RunRecord) -> Self {
        match key {
            GroupKey::Task => KeyValue::Task(r.variant),
            GroupKey::Framework => KeyValue::Framework(r.framework),
            GroupKey::Context => KeyValue::Context(r.context.kind, r.context.asset_id),
            GroupKey::Model => KeyValue::Model(r.model.model_name.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            KeyValue::Task(k) => k.display_name().to_string(),
            KeyValue::Framework(f) => f.display_name().to_string(),
            KeyValue::Context(c, None) => c.display_name().to_string(),
            KeyValue::Context(c, Some(id)) => format!("{} {id}", c.display_name()),
            KeyValue::Model(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub key: Vec<KeyValue>,
    pub runs: usize,
    pub feasible: usize,
    pub success_rate: Option<f64>,
    /// Means over feasible runs only.
    pub mean_gap: Option<f64>,
    pub mean_execution_time: Option<f64>,
    pub mean_cost: Option<f64>,
    /// Some gap was measured against a lower bound.
    pub gap_against_bound: bool,
    /// Feasible runs without any certificate, left out of the gap.
    pub missing_certificates: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateOptions {
    pub exclude_aborted: bool,
}

fn single_experiment(records: &[RunRecord]) -> Result<(), MetricsError> {
    let ids: BTreeSet<&str> = records.iter().map(|r| r.experiment_id.as_str()).collect();
    if ids.len() > 1 {
        return Err(MetricsError::MixedExperiments(ids.into_iter().map(String::from).collect()));
    }
    Ok(())
}

/// One cell per distinct value of `group_by`, in key order.
pub fn aggregate(
    records: &[RunRecord],
    certificates: &HashMap<String, OptimalCertificate>,
    group_by: &[GroupKey],
    options: AggregateOptions,
) -> Result<Vec<CellStats>, MetricsError> {
    single_experiment(records)?;
    let mut groups: BTreeMap<Vec<KeyValue>, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = group_by.iter().map(|&g| KeyValue::of(g, r)).collect();
        groups.entry(key).or_default().push(r);
    }
    Ok(groups
        .into_iter()
        .map(|(key, rs)| {
            let feasible: Vec<&&RunRecord> = rs.iter().filter(|r| r.final_status == FinalStatus::Feasible).collect();
            let mut gaps = Vec::new();
            let mut against_bound = false;
            let mut missing = 0;
            for r in &feasible {
                match (r.objective, certificates.get(&r.instance)) {
                    (Some(v), Some(c)) => {
                        if let Some(g) = optimality_gap(v, c) {
                            against_bound |= g.against_bound;
                            gaps.push(g.percent);
                        }
                    }
                    _ => missing += 1,
                }
            }
            CellStats {
                key,
                runs: rs.len(),
                feasible: feasible.len(),
                success_rate: success_rate(&rs, options.exclude_aborted),
                mean_gap: mean(gaps),
                mean_execution_time: mean(feasible.iter().filter_map(|r| r.execution_time)),
                mean_cost: mean(feasible.iter().filter_map(|r| r.cost)),
                gap_against_bound: against_bound,
                missing_certificates: missing,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Num(Option<f64>),
}

impl Cell {
    /// Two decimals; an undefined value renders as "-".
    pub fn display(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(Some(x)) => format!("{x:.2}"),
            Cell::Num(None) => "-".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    /// File stem for exports.
    pub name: String,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

const METRICS: [(&str, fn(&CellStats) -> Option<f64>); 4] = [
    ("Success (%)", |c| c.success_rate),
    ("Gap (%)", |c| c.mean_gap),
    ("Time (s)", |c| c.mean_execution_time),
    ("Cost ($)", |c| c.mean_cost),
];

/// Tasks as rows, one column per (metric, value of `column`), and a Mean
/// row holding the mean of the cell values in each column.
pub fn pivot_table(
    name: &str,
    title: &str,
    records: &[RunRecord],
    certificates: &HashMap<String, OptimalCertificate>,
    column: GroupKey,
    options: AggregateOptions,
) -> Result<ReportTable, MetricsError> {
    let cells = aggregate(records, certificates, &[GroupKey::Task, column], options)?;
    let tasks: BTreeSet<KeyValue> = cells.iter().map(|c| c.key[0].clone()).collect();
    let cols: BTreeSet<KeyValue> = cells.iter().map(|c| c.key[1].clone()).collect();
    let lookup: HashMap<(&KeyValue, &KeyValue), &CellStats> = cells.iter().map(|c| ((&c.key[0], &c.key[1]), c)).collect();

    let mut columns = vec!["Task".to_string()];
    for (metric, _) in METRICS {
        for c in &cols {
            columns.push(format!("{metric} {}", c.label()));
        }
    }
    let mut rows = Vec::new();
    let mut per_column: Vec<Vec<f64>> = vec![Vec::new(); columns.len() - 1];
    for t in &tasks {
        let mut row = vec![Cell::Text(t.label())];
        for (mi, (_, get)) in METRICS.iter().enumerate() {
            for (ci, c) in cols.iter().enumerate() {
                let v = lookup.get(&(t, c)).and_then(|cell| get(cell));
                if let Some(x) = v {
                    per_column[mi * cols.len() + ci].push(x);
                }
                row.push(Cell::Num(v));
            }
        }
        rows.push(row);
    }
    if !rows.is_empty() {
        let mut mean_row = vec![Cell::Text("Mean".into())];
        mean_row.extend(per_column.into_iter().map(|xs| Cell::Num(mean(xs))));
        rows.push(mean_row);
    }
    let mut notes = vec![
        "Gap, time and cost are means over feasible runs only; \"-\" marks a cell with no feasible run.".to_string(),
        "Mean row: mean of the task cells in each column.".to_string(),
    ];
    if cells.iter().any(|c| c.gap_against_bound) {
        notes.push("Some gaps are measured against a lower bound (no proven optimum).".into());
    }
    let missing: usize = cells.iter().map(|c| c.missing_certificates).sum();
    if missing > 0 {
        notes.push(format!("{missing} feasible run(s) had no certificate and are left out of the gap."));
    }
    Ok(ReportTable {
        name: name.into(),
        title: title.into(),
        columns,
        rows,
        notes,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub false_negative: usize,
    pub feasible_checked: usize,
    pub false_positive: usize,
    pub infeasible_checked: usize,
}

impl ConfusionCounts {
    fn add(&mut self, label: ConfusionLabel) {
        match label {
            ConfusionLabel::TruePositive => self.feasible_checked += 1,
            ConfusionLabel::FalseNegative => {
                self.feasible_checked += 1;
                self.false_negative += 1;
            }
            ConfusionLabel::TrueNegative => self.infeasible_checked += 1,
            ConfusionLabel::FalsePositive => {
                self.infeasible_checked += 1;
                self.false_positive += 1;
            }
        }
    }
}

/// Per-task verifier misclassification counts over every checked attempt.
pub fn confusion_counts(records: &[RunRecord]) -> (BTreeMap<VariantKind, ConfusionCounts>, ConfusionCounts) {
    let mut per_task: BTreeMap<VariantKind, ConfusionCounts> = BTreeMap::new();
    let mut total = ConfusionCounts::default();
    for r in records {
        for label in r.confusion_labels() {
            per_task.entry(r.variant).or_default().add(label);
            total.add(label);
        }
    }
    (per_task, total)
}

pub fn confusion_table(records: &[RunRecord]) -> ReportTable {
    let (per_task, total) = confusion_counts(records);
    let row = |name: String, c: &ConfusionCounts| {
        vec![
            Cell::Text(name),
            Cell::Text(format!("{} / {}", c.false_negative, c.feasible_checked)),
            Cell::Text(format!("{} / {}", c.false_positive, c.infeasible_checked)),
        ]
    };
    let mut rows: Vec<Vec<Cell>> = per_task.iter().map(|(k, c)| row(k.display_name().into(), c)).collect();
    rows.push(row("Total".into(), &total));
    ReportTable {
        name: "verifier".into(),
        title: "LLM-generated verifier misclassifications".into(),
        columns: vec![
            "Task".into(),
            "False Negative (rejected feasible / feasible checked)".into(),
            "False Positive (accepted infeasible / infeasible checked)".into(),
        ],
        rows,
        notes: vec!["Counts cover every attempt whose result reached the LLM unit test.".into()],
    }
}

/// Share of generated programs importing each library, per context.
/// Total counts programs that import any of them.
pub fn library_usage_table(records: &[RunRecord]) -> ReportTable {
    let mut by_context: BTreeMap<ContextKind, (usize, BTreeMap<LibraryTag, usize>, usize)> = BTreeMap::new();
    for r in records {
        let entry = by_context.entry(r.context.kind).or_default();
        for src in r.attempts.iter().filter_map(|a| a.generated_source.as_deref()) {
            entry.0 += 1;
            let tags = scan_imports(src);
            for t in &tags {
                *entry.1.entry(*t).or_default() += 1;
            }
            if !tags.is_empty() {
                entry.2 += 1;
            }
        }
    }
    let mut columns = vec!["Category".to_string()];
    columns.extend(LibraryTag::ALL.iter().map(|t| format!("{} (%)", t.display_name())));
    columns.push("Total (%)".into());
    columns.push("Programs".into());
    let rows = by_context
        .iter()
        .map(|(ctx, (n, counts, any))| {
            let mut row = vec![Cell::Text(ctx.display_name().into())];
            for t in LibraryTag::ALL {
                row.push(Cell::Num(success_rate_counts(counts.get(&t).copied().unwrap_or(0), *n)));
            }
            row.push(Cell::Num(success_rate_counts(*any, *n)));
            row.push(Cell::Text(n.to_string()));
            row
        })
        .collect();
    ReportTable {
        name: "libraries".into(),
        title: "Optimization libraries imported by generated programs".into(),
        columns,
        rows,
        notes: vec!["Denominator: every generated program in the context, executed or not.".into()],
    }
}

/// Algorithm family of successfully executed programs, per framework.
pub fn approach_table(records: &[RunRecord], rules: &ApproachRules) -> ReportTable {
    let tags = [
        ApproachTag::Exact,
        ApproachTag::Heuristic,
        ApproachTag::Approximation,
        ApproachTag::Unknown,
    ];
    let mut by_fw: BTreeMap<FrameworkKind, BTreeMap<ApproachTag, usize>> = BTreeMap::new();
    for r in records {
        let entry = by_fw.entry(r.framework).or_default();
        for a in &r.attempts {
            let (Some(src), Some(exec)) = (a.generated_source.as_deref(), a.execution.as_ref()) else {
                continue;
            };
            if exec.is_ok() {
                *entry.entry(classify_approach(src, rules)).or_default() += 1;
            }
        }
    }
    let mut columns = vec!["Framework".to_string(), "Programs".to_string()];
    columns.extend(["Exact (%)", "Heuristic (%)", "Approximation (%)", "Unknown (%)"].map(String::from));
    let rows = by_fw
        .iter()
        .map(|(fw, counts)| {
            let n: usize = counts.values().sum();
            let mut row = vec![Cell::Text(fw.display_name().into()), Cell::Text(n.to_string())];
            row.extend(tags.iter().map(|t| Cell::Num(success_rate_counts(counts.get(t).copied().unwrap_or(0), n))));
            row
        })
        .collect();
    ReportTable {
        name: "approaches".into(),
        title: "Algorithm family of successfully executed programs".into(),
        columns,
        rows,
        notes: vec!["Keyword classification with manual overrides; see ApproachRules.".into()],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Markdown,
    Csv,
    Json,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Markdown => "md",
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

pub fn to_markdown(table: &ReportTable) -> String {
    let mut s = format!("## {}\n\n", table.title);
    let _ = writeln!(s, "| {} |", table.columns.join(" | "));
    let _ = writeln!(s, "|{}", table.columns.iter().map(|_| " --- |").collect::<String>());
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::display).collect();
        let _ = writeln!(s, "| {} |", cells.join(" | "));
    }
    if !table.notes.is_empty() {
        s.push('\n');
        for n in &table.notes {
            let _ = writeln!(s, "- {n}");
        }
    }
    s
}

pub fn to_csv(table: &ReportTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::display)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

/// Header plus rows of a CSV export; "-" cells load as `None`.
pub fn load_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<Option<String>>>), csv::Error> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(|c| (c != "-").then(|| c.to_string())).collect());
    }
    Ok((header, rows))
}

pub fn to_json(table: &ReportTable) -> Value {
    serde_json::to_value(table).expect("table serializes")
}

/// Writes `<dir>/<table.name>.<ext>`.
pub fn export(table: &ReportTable, format: ExportFormat, dir: &Path) -> Result<PathBuf, MetricsError> {
    let io = |p: &Path, e: std::io::Error| MetricsError::Io {
        path: p.display().to_string(),
        message: e.to_string(),
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(format!("{}.{}", table.name, format.extension()));
    let body = match format {
        ExportFormat::Markdown => to_markdown(table),
        ExportFormat::Csv => to_csv(table),
        ExportFormat::Json => serde_json::to_string_pretty(&to_json(table)).expect("json") + "\n",
    };
    fs::write(&path, body).map_err(|e| io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::Usage;
    use crate::pipeline::{Budgets, ContextSpec, ModelSettings};
    use crate::routing::{ObjectiveKind, ObjectiveValue, Solution};
    use proptest::prelude::*;

    fn record(instance: &str, variant: VariantKind, status: FinalStatus, objective: Option<f64>) -> RunRecord {
        RunRecord {
            experiment_id: "e".into(),
            instance: instance.into(),
            variant,
            framework: FrameworkKind::SingleAttempt,
            context: ContextSpec::none(),
            model: ModelSettings {
                model_name: "m".into(),
                temperature: 0.2,
                max_tokens: 10,
            },
            repeat: 0,
            budgets: Budgets::default(),
            attempts: vec![],
            final_status: status,
            objective,
            usage: Usage::default(),
            cost: Some(0.5),
            llm_calls: 1,
            generation_calls: 1,
            execution_time: Some(1.0),
            total_execution_time: 1.0,
            wall_time: 1.0,
            error: None,
        }
    }

    fn cert(v: f64, status: CertificateStatus, lb: f64) -> OptimalCertificate {
        OptimalCertificate {
            value: ObjectiveValue {
                value: v,
                kind: ObjectiveKind::Sum,
            },
            solution: Solution::single(vec![0, 1, 0]),
            status,
            lower_bound: lb,
            solve_time: 0.0,
        }
    }

    #[test]
    fn success_rate_examples() {
        assert!((success_rate_counts(22, 75).unwrap() - 29.33).abs() < 0.005);
        assert_eq!(success_rate_counts(0, 25), Some(0.0));
        assert_eq!(success_rate_counts(75, 75), Some(100.0));
        assert_eq!(success_rate_counts(0, 0), None);
    }

    #[test]
    fn gap_examples() {
        assert!((gap_percent(108.69, 100.0).unwrap() - 8.69).abs() < 1e-9);
        assert_eq!(gap_percent(40.0, 40.0), Some(0.0));
        assert_eq!(gap_percent(1.0, 0.0), None);
        let g = optimality_gap(110.0, &cert(0.0, CertificateStatus::BoundOnly, 100.0)).unwrap();
        assert!(g.against_bound && (g.percent - 10.0).abs() < 1e-9);
    }

    #[test]
    fn mean_row_of_cells() {
        let cells = [29.33, 18.67, 62.67, 41.33, 24.00, 40.00, 0.00, 8.00];
        assert!((mean(cells).unwrap() - 28.00).abs() < 0.005);
    }

    #[test]
    fn infeasible_cell_renders_dash() {
        let rs = vec![
            record("a", VariantKind::MdMtsp, FinalStatus::Infeasible, None),
            record("a", VariantKind::MdMtsp, FinalStatus::NoSolution, None),
        ];
        let t = pivot_table("t", "t", &rs, &HashMap::new(), GroupKey::Framework, AggregateOptions::default()).unwrap();
        let md = to_markdown(&t);
        assert!(md.contains("| MD m-TSP | 0.00 | - | - | - |"), "{md}");
    }

    #[test]
    fn single_record_cell() {
        let rs = vec![record("a", VariantKind::Tsp, FinalStatus::Feasible, Some(44.0))];
        let certs = HashMap::from([("a".to_string(), cert(40.0, CertificateStatus::ProvenOptimal, 40.0))]);
        let c = &aggregate(&rs, &certs, &[GroupKey::Task], AggregateOptions::default()).unwrap()[0];
        assert_eq!(c.success_rate, Some(100.0));
        assert!((c.mean_gap.unwrap() - 10.0).abs() < 1e-9);
        assert_eq!(c.mean_execution_time, Some(1.0));
        assert_eq!(c.mean_cost, Some(0.5));
    }

    #[test]
    fn mixed_experiments_rejected() {
        let mut b = record("a", VariantKind::Tsp, FinalStatus::Feasible, Some(1.0));
        b.experiment_id = "other".into();
        let rs = vec![record("a", VariantKind::Tsp, FinalStatus::Feasible, Some(1.0)), b];
        assert!(matches!(
            aggregate(&rs, &HashMap::new(), &[GroupKey::Task], AggregateOptions::default()),
            Err(MetricsError::MixedExperiments(_))
        ));
    }

    #[test]
    fn aborted_policy() {
        let rs = [
            record("a", VariantKind::Tsp, FinalStatus::Feasible, Some(1.0)),
            record("a", VariantKind::Tsp, FinalStatus::Aborted, None),
        ];
        let refs: Vec<&RunRecord> = rs.iter().collect();
        assert_eq!(success_rate(&refs, false), Some(50.0));
        assert_eq!(success_rate(&refs, true), Some(100.0));
    }

    #[test]
    fn empty_confusion_table() {
        let t = confusion_table(&[]);
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0][1], Cell::Text("0 / 0".into()));
    }

    #[test]
    fn csv_round_trip_and_json_precision() {
        let t = ReportTable {
            name: "x".into(),
            title: "X".into(),
            columns: vec!["Task".into(), "Gap (%)".into()],
            rows: vec![
                vec![Cell::Text("TSP, small".into()), Cell::Num(Some(8.691234567891))],
                vec![Cell::Text("BTSP".into()), Cell::Num(None)],
            ],
            notes: vec![],
        };
        let (header, rows) = load_csv(&to_csv(&t)).unwrap();
        assert_eq!(header, t.columns);
        assert_eq!(rows[0][0].as_deref(), Some("TSP, small"));
        assert_eq!(rows[0][1].as_deref().unwrap().parse::<f64>().unwrap(), 8.69);
        assert_eq!(rows[1][1], None);
        let j = to_json(&t);
        assert_eq!(j["rows"][0][1].as_f64().unwrap(), 8.691234567891);
        assert!(j["rows"][1][1].is_null());
        let dir = tempfile::tempdir().unwrap();
        for f in [ExportFormat::Markdown, ExportFormat::Csv, ExportFormat::Json] {
            assert!(export(&t, f, dir.path()).unwrap().exists());
        }
    }

    fn status_strategy() -> impl Strategy<Value = FinalStatus> {
        prop_oneof![
            Just(FinalStatus::Feasible),
            Just(FinalStatus::Infeasible),
            Just(FinalStatus::NoSolution)
        ]
    }

    proptest! {
        #[test]
        fn success_rate_permutation_invariant(statuses in prop::collection::vec(status_strategy(), 1..40), seed in any::<u64>()) {
            let rs: Vec<RunRecord> = statuses.iter().map(|&s| record("a", VariantKind::Tsp, s, None)).collect();
            let mut refs: Vec<&RunRecord> = rs.iter().collect();
            let before = success_rate(&refs, false);
            let k = (seed as usize) % refs.len();
            refs.rotate_left(k);
            refs.reverse();
            prop_assert_eq!(before, success_rate(&refs, false));
        }

        #[test]
        fn infeasible_records_do_not_move_gap(objs in prop::collection::vec(40.0f64..80.0, 1..10), extra in 0usize..6) {
            let certs = HashMap::from([("a".to_string(), cert(40.0, CertificateStatus::ProvenOptimal, 40.0))]);
            let mut rs: Vec<RunRecord> = objs.iter().map(|&v| record("a", VariantKind::Tsp, FinalStatus::Feasible, Some(v))).collect();
            let base = aggregate(&rs, &certs, &[GroupKey::Task], AggregateOptions::default()).unwrap()[0].mean_gap;
            for _ in 0..extra {
                rs.push(record("a", VariantKind::Tsp, FinalStatus::Infeasible, None));
            }
            let with = aggregate(&rs, &certs, &[GroupKey::Task], AggregateOptions::default()).unwrap()[0].mean_gap;
            prop_assert_eq!(base, with);
        }

        #[test]
        fn equal_cells_mean_equals_pooled(flags in prop::collection::vec(prop::collection::vec(any::<bool>(), 5), 1..8)) {
            let mut rs = Vec::new();
            for (i, cell) in flags.iter().enumerate() {
                let kind = VariantKind::ALL[i % 8];
                for &ok in cell {
                    let status = if ok { FinalStatus::Feasible } else { FinalStatus::Infeasible };
                    rs.push(record(&format!("i{i}"), kind, status, None));
                }
            }
            // cells must be equal-sized for the identity to hold
            let distinct: BTreeSet<usize> = (0..flags.len()).map(|i| i % 8).collect();
            prop_assume!(distinct.len() == flags.len());
            let cells = aggregate(&rs, &HashMap::new(), &[GroupKey::Task], AggregateOptions::default()).unwrap();
            let of_means = mean(cells.iter().filter_map(|c| c.success_rate)).unwrap();
            let refs: Vec<&RunRecord> = rs.iter().collect();
            prop_assert!((of_means - success_rate(&refs, false).unwrap()).abs() < 1e-9);
        }
    }
}
