//! Result formatting: aligned text tables and CSV files.
//!
//! Every CSV row carries the full configuration provenance (seed,
//! parameters, modes), and all numbers are formatted with fixed precision,
//! so identical runs serialize to identical bytes.

use std::io::Write;

use super::reference;
use super::{CaseRow, CvMode, MetricAveraging, RunSpec, SweepRow};
use crate::error::{Error, Result};
use crate::svm::SvmParams;

/// Configuration provenance stamped onto every CSV row.
#[derive(Debug, Clone)]
pub struct ReportContext {
    pub wavelet: String,
    pub selection: String,
    pub params: SvmParams,
    pub grid_search: bool,
    pub cv_mode: CvMode,
    pub averaging: MetricAveraging,
    pub seed: u64,
}

impl From<&RunSpec> for ReportContext {
    fn from(spec: &RunSpec) -> Self {
        ReportContext {
            wavelet: spec.wavelet.to_string(),
            selection: spec.selection.to_string_canonical(),
            params: spec.params.clone(),
            grid_search: spec.grid_search,
            cv_mode: spec.cv_mode,
            averaging: spec.averaging,
            seed: spec.seed,
        }
    }
}

impl ReportContext {
    fn csv_header() -> [&'static str; 10] {
        [
            "wavelet",
            "nodes",
            "c",
            "gamma",
            "tol",
            "normalize",
            "class_weight",
            "grid_search",
            "cv_mode",
            "seed",
        ]
    }

    fn csv_fields(&self) -> [String; 10] {
        [
            self.wavelet.clone(),
            self.selection.clone(),
            format!("{}", self.params.c),
            self.params.gamma.to_string(),
            format!("{}", self.params.tol),
            self.params.normalize.to_string(),
            self.params.class_weight.to_string(),
            self.grid_search.to_string(),
            self.cv_mode.to_string(),
            self.seed.to_string(),
        ]
    }
}

fn pct(fraction: f64) -> String {
    format!("{:.2}", fraction * 100.0)
}

fn csv_rate(fraction: f64) -> String {
    format!("{fraction:.6}")
}

fn csv_error(source: csv::Error) -> Error {
    match source.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: "<csv writer>".into(),
            source,
        },
        other => Error::InvalidParams(format!("csv serialization failed: {other:?}")),
    }
}

/// Render rows as an aligned text table. Columns from `right_align_from`
/// onward are right-aligned (numeric columns); earlier ones left-aligned.
fn aligned_table(header: &[&str], rows: &[Vec<String>], right_align_from: usize) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let render = |cells: &[String]| -> String {
        let mut line = String::new();
        for (i, (cell, &w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            if i >= right_align_from {
                line.push_str(&format!("{cell:>w$}"));
            } else {
                line.push_str(&format!("{cell:<w$}"));
            }
        }
        line.truncate(line.trim_end().len());
        line
    };
    let header_cells: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    let rule = widths
        .iter()
        .map(|w| "-".repeat(*w))
        .collect::<Vec<_>>()
        .join("  ");
    let mut out = String::new();
    out.push_str(&render(&header_cells));
    out.push('\n');
    out.push_str(rule.trim_end());
    out.push('\n');
    for row in rows {
        out.push_str(&render(row));
        out.push('\n');
    }
    out
}

/// Metrics of several case × fold-count cells as an aligned table
/// (rates in percent).
pub fn case_table(rows: &[CaseRow]) -> String {
    let header = ["case", "folds", "ca%", "sens%", "spec%", "tp", "fp", "tn", "fn"];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let c = row.metrics.confusion;
            vec![
                row.case.to_string(),
                row.k.to_string(),
                pct(row.metrics.ca),
                pct(row.metrics.sensitivity),
                pct(row.metrics.specificity),
                c.true_pos.to_string(),
                c.false_pos.to_string(),
                c.true_neg.to_string(),
                c.false_neg.to_string(),
            ]
        })
        .collect();
    aligned_table(&header, &body, 1)
}

/// Metrics of several case × fold-count cells as CSV (rates as fractions),
/// one provenance block per row.
pub fn case_csv<W: Write>(w: W, rows: &[CaseRow], ctx: &ReportContext) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    let mut header = vec![
        "case",
        "k",
        "ca",
        "sensitivity",
        "specificity",
        "true_pos",
        "false_pos",
        "true_neg",
        "false_neg",
        "averaging",
    ];
    header.extend(ReportContext::csv_header());
    csv.write_record(&header).map_err(csv_error)?;
    let stamp = ctx.csv_fields();
    for row in rows {
        let c = row.metrics.confusion;
        let mut record = vec![
            row.case.to_string(),
            row.k.to_string(),
            csv_rate(row.metrics.ca),
            csv_rate(row.metrics.sensitivity),
            csv_rate(row.metrics.specificity),
            c.true_pos.to_string(),
            c.false_pos.to_string(),
            c.true_neg.to_string(),
            c.false_neg.to_string(),
            ctx.averaging.to_string(),
        ];
        record.extend(stamp.iter().cloned());
        csv.write_record(&record).map_err(csv_error)?;
    }
    csv.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })
}

/// A sweep as an aligned table sorted as given, with rank numbers and a
/// winner line.
pub fn sweep_table(rows: &[SweepRow], subject: &str) -> String {
    let header = ["rank", "configuration", "ca%"];
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        rows[b]
            .ca
            .partial_cmp(&rows[a].ca)
            .expect("accuracies are finite")
            .then(a.cmp(&b))
    });
    let mut rank_of = vec![0usize; rows.len()];
    for (rank, &i) in order.iter().enumerate() {
        rank_of[i] = rank + 1;
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            vec![
                rank_of[i].to_string(),
                row.configuration.clone(),
                pct(row.ca),
            ]
        })
        .collect();
    let mut out = aligned_table(&header, &body, 2);
    if let Some(winner) = super::sweep_winner(rows) {
        out.push_str(&format!(
            "winner ({subject}): {} (ca {}%)\n",
            winner.configuration,
            pct(winner.ca)
        ));
    }
    out
}

/// A sweep as CSV with provenance columns.
pub fn sweep_csv<W: Write>(w: W, rows: &[SweepRow], ctx: &ReportContext) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    let mut header = vec!["configuration", "ca"];
    header.extend(ReportContext::csv_header());
    csv.write_record(&header).map_err(csv_error)?;
    let stamp = ctx.csv_fields();
    for row in rows {
        let mut record = vec![row.configuration.clone(), csv_rate(row.ca)];
        record.extend(stamp.iter().cloned());
        csv.write_record(&record).map_err(csv_error)?;
    }
    csv.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })
}

/// One case cell joined with its reference values; deltas in percentage
/// points (ours − reference).
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub case: crate::dataio::CaseName,
    pub k: usize,
    pub ca_percent: f64,
    pub ca_reference: f64,
    pub ca_delta: f64,
    pub sensitivity_percent: f64,
    pub sensitivity_reference: f64,
    pub sensitivity_delta: f64,
    pub specificity_percent: f64,
    pub specificity_reference: f64,
    pub specificity_delta: f64,
}

/// Join case rows with the embedded reference table; rows without a
/// reference entry are dropped.
pub fn comparison_rows(rows: &[CaseRow]) -> Vec<ComparisonRow> {
    rows.iter()
        .filter_map(|row| {
            let reference = reference::case_reference(row.case, row.k)?;
            let ca = row.metrics.ca * 100.0;
            let sens = row.metrics.sensitivity * 100.0;
            let spec = row.metrics.specificity * 100.0;
            Some(ComparisonRow {
                case: row.case,
                k: row.k,
                ca_percent: ca,
                ca_reference: reference.ca_percent,
                ca_delta: ca - reference.ca_percent,
                sensitivity_percent: sens,
                sensitivity_reference: reference.sensitivity_percent,
                sensitivity_delta: sens - reference.sensitivity_percent,
                specificity_percent: spec,
                specificity_reference: reference.specificity_percent,
                specificity_delta: spec - reference.specificity_percent,
            })
        })
        .collect()
}

/// Side-by-side comparison with the reference values as an aligned table.
pub fn comparison_table(rows: &[ComparisonRow]) -> String {
    let header = [
        "case", "folds", "ca%", "ref_ca%", "dca", "sens%", "ref_sens%", "dsens", "spec%",
        "ref_spec%", "dspec",
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.case.to_string(),
                r.k.to_string(),
                format!("{:.2}", r.ca_percent),
                format!("{:.2}", r.ca_reference),
                format!("{:+.2}", r.ca_delta),
                format!("{:.2}", r.sensitivity_percent),
                format!("{:.2}", r.sensitivity_reference),
                format!("{:+.2}", r.sensitivity_delta),
                format!("{:.2}", r.specificity_percent),
                format!("{:.2}", r.specificity_reference),
                format!("{:+.2}", r.specificity_delta),
            ]
        })
        .collect();
    aligned_table(&header, &body, 1)
}

/// The comparison as CSV.
pub fn comparison_csv<W: Write>(w: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record([
        "case",
        "k",
        "ca_percent",
        "ca_reference",
        "ca_delta",
        "sensitivity_percent",
        "sensitivity_reference",
        "sensitivity_delta",
        "specificity_percent",
        "specificity_reference",
        "specificity_delta",
    ])
    .map_err(csv_error)?;
    for r in rows {
        csv.write_record([
            r.case.to_string(),
            r.k.to_string(),
            format!("{:.2}", r.ca_percent),
            format!("{:.2}", r.ca_reference),
            format!("{:+.2}", r.ca_delta),
            format!("{:.2}", r.sensitivity_percent),
            format!("{:.2}", r.sensitivity_reference),
            format!("{:+.2}", r.sensitivity_delta),
            format!("{:.2}", r.specificity_percent),
            format!("{:.2}", r.specificity_reference),
            format!("{:+.2}", r.specificity_delta),
        ])
        .map_err(csv_error)?;
    }
    csv.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })
}

/// Node-selection sweep rows joined with their reference accuracies (when
/// the configuration appears in the reference sweep).
pub fn sweep_comparison_table(rows: &[SweepRow]) -> String {
    let header = ["configuration", "ca%", "ref_ca%", "dca"];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let reference = reference::BASIS_SWEEP
                .iter()
                .find(|r| r.configuration == row.configuration);
            let ca = row.ca * 100.0;
            match reference {
                Some(r) => vec![
                    row.configuration.clone(),
                    format!("{ca:.2}"),
                    format!("{:.2}", r.ca_percent),
                    format!("{:+.2}", ca - r.ca_percent),
                ],
                None => vec![
                    row.configuration.clone(),
                    format!("{ca:.2}"),
                    "-".into(),
                    "-".into(),
                ],
            }
        })
        .collect();
    aligned_table(&header, &body, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::CaseName;
    use crate::experiments::{Confusion, Metrics};

    fn sample_rows() -> Vec<CaseRow> {
        vec![
            CaseRow {
                case: CaseName::AvsE,
                k: 2,
                metrics: Metrics::from_confusion(Confusion {
                    true_pos: 1666,
                    false_pos: 0,
                    true_neg: 1700,
                    false_neg: 34,
                }),
            },
            CaseRow {
                case: CaseName::ABCDvsE,
                k: 10,
                metrics: Metrics::from_confusion(Confusion {
                    true_pos: 1650,
                    false_pos: 100,
                    true_neg: 6700,
                    false_neg: 50,
                }),
            },
        ]
    }

    #[test]
    fn case_table_lists_every_row_with_percent_rates() {
        let table = case_table(&sample_rows());
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 4, "header, rule, two rows:\n{table}");
        assert!(lines[0].starts_with("case"));
        assert!(lines[2].contains("AvsE"));
        assert!(lines[2].contains("99.00"), "{table}");
        assert!(lines[3].contains("ABCDvsE"));
    }

    #[test]
    fn case_csv_round_trips_and_carries_provenance() {
        let rows = sample_rows();
        let ctx = ReportContext::from(&RunSpec::new(CaseName::AvsE, 2));
        let mut buf = Vec::new();
        case_csv(&mut buf, &rows, &ctx).unwrap();
        let mut reader = csv::Reader::from_reader(&buf[..]);
        let headers = reader.headers().unwrap().clone();
        assert!(headers.iter().any(|h| h == "seed"));
        assert!(headers.iter().any(|h| h == "cv_mode"));
        let records: Vec<csv::StringRecord> =
            reader.records().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(records.len(), 2);
        let ca: f64 = records[0][headers.iter().position(|h| h == "ca").unwrap()]
            .parse()
            .unwrap();
        assert!((ca - 0.99).abs() < 1e-9);
    }

    #[test]
    fn identical_inputs_serialize_to_identical_bytes() {
        let rows = sample_rows();
        let ctx = ReportContext::from(&RunSpec::new(CaseName::AvsE, 2));
        let mut a = Vec::new();
        let mut b = Vec::new();
        case_csv(&mut a, &rows, &ctx).unwrap();
        case_csv(&mut b, &rows, &ctx).unwrap();
        assert_eq!(a, b);
        assert_eq!(case_table(&rows), case_table(&rows));
    }

    #[test]
    fn sweep_table_ranks_by_accuracy_and_names_the_winner() {
        let rows = vec![
            SweepRow {
                configuration: "5:1,4:1,4:2".into(),
                ca: 0.935,
            },
            SweepRow {
                configuration: "5:1,4:1,3:1".into(),
                ca: 0.89,
            },
            SweepRow {
                configuration: "4:1,4:2,4:3".into(),
                ca: 0.91,
            },
        ];
        let table = sweep_table(&rows, "node selection");
        assert!(table.contains("winner (node selection): 5:1,4:1,4:2"));
        let first_body_line = table.lines().nth(2).unwrap();
        assert!(first_body_line.trim_start().starts_with('1'));
        // Rank numbers follow accuracy, not listing order: the second
        // listed row has the lowest accuracy, hence rank 3.
        let second_body_line = table.lines().nth(3).unwrap();
        assert!(second_body_line.trim_start().starts_with('3'), "{table}");
    }

    #[test]
    fn comparison_join_computes_signed_deltas() {
        let rows = comparison_rows(&sample_rows());
        assert_eq!(rows.len(), 2);
        let first = &rows[0];
        assert_eq!(first.case, CaseName::AvsE);
        // 3366/3400 right = 99.00%, reference 99.64 → −0.64.
        assert!((first.ca_delta - (99.0 - 99.64)).abs() < 1e-9);
        let table = comparison_table(&rows);
        assert!(table.contains("-0.64"), "{table}");
        let mut buf = Vec::new();
        comparison_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("-0.64"));
        // Cells without a reference row are dropped from the join.
        let unmatched = vec![CaseRow {
            case: CaseName::AvsE,
            k: 3,
            metrics: sample_rows()[0].metrics,
        }];
        assert!(comparison_rows(&unmatched).is_empty());
    }

    #[test]
    fn sweep_comparison_marks_unknown_configurations() {
        let rows = vec![
            SweepRow {
                configuration: "5:1,4:1,4:2".into(),
                ca: 0.93,
            },
            SweepRow {
                configuration: "0:0".into(),
                ca: 0.5,
            },
        ];
        let table = sweep_comparison_table(&rows);
        assert!(table.contains("93.50"));
        let unknown_line = table.lines().find(|l| l.starts_with("0:0")).unwrap();
        assert!(unknown_line.contains('-'));
    }
}
