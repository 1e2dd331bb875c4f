use std::path::Path;

use crate::analysis::DiagnosticsRecord;
use crate::solver::DiagnosticsSpec;

use super::IoError;

fn exponent_label(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

/// Column names of the diagnostics CSV for `spec`, in file order.
pub fn diagnostics_columns(spec: &DiagnosticsSpec) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "energy", "dissipation", "cum_dissipation", "energy_residual"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(spec.p_list.iter().map(|&p| format!("lp_{}", exponent_label(p))));
    cols.extend(spec.alpha_list.iter().map(|&a| format!("u_H{}", exponent_label(a))));
    cols.extend(
        [
            "u_grad_linf",
            "u_linf",
            "helicity",
            "current_l2",
            "divB_residual",
            "hs_norm_sq",
            "hs_envelope",
            "lp_envelope",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    cols
}

fn record_row(r: &DiagnosticsRecord) -> Vec<f64> {
    let mut row = vec![r.t, r.energy, r.dissipation, r.cum_dissipation, r.energy_residual];
    row.extend(r.lp_norms.iter().map(|x| x.1));
    row.extend(r.u_sobolev.iter().map(|x| x.1));
    row.extend([
        r.u_grad_linf,
        r.u_linf,
        r.helicity.unwrap_or(f64::NAN),
        r.current_l2,
        r.div_b_residual,
        r.hs_norm_sq,
        r.hs_envelope,
        r.lp_envelope,
    ]);
    row
}

/// 17 significant digits, enough for a bit-exact text round trip.
fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header row and one row per entry.
pub fn write_table_csv(path: impl AsRef<Path>, columns: &[String], rows: &[Vec<f64>]) -> Result<(), IoError> {
    let path = path.as_ref();
    let csv_err = |e: csv::Error| IoError::Csv {
        path: path.into(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(columns).map_err(csv_err)?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != columns.len() {
            return Err(IoError::Csv {
                path: path.into(),
                message: format!("row {i} has {} values for {} columns", row.len(), columns.len()),
            });
        }
        w.write_record(row.iter().map(|v| format_value(*v))).map_err(csv_err)?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

/// Diagnostics CSV: columns from [`diagnostics_columns`], records in the given order.
pub fn write_diagnostics_csv(
    records: &[DiagnosticsRecord],
    spec: &DiagnosticsSpec,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let path = path.as_ref();
    let columns = diagnostics_columns(spec);
    if let Some(w) = records.windows(2).find(|w| w[1].t < w[0].t) {
        return Err(IoError::Csv {
            path: path.into(),
            message: format!("records not time-ordered at t = {}", w[1].t),
        });
    }
    let rows: Vec<Vec<f64>> = records.iter().map(record_row).collect();
    write_table_csv(path, &columns, &rows)
}

/// A parsed numeric CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DataTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_table_csv(path: impl AsRef<Path>) -> Result<DataTable, IoError> {
    let path = path.as_ref();
    let csv_err = |e: csv::Error| IoError::Csv {
        path: path.into(),
        message: e.to_string(),
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let columns: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IoError::Csv {
                path: path.into(),
                message: format!("row {}: {e}", line + 1),
            })?;
        rows.push(row);
    }
    Ok(DataTable { columns, rows })
}
