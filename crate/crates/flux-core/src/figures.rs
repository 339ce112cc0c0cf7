//! Figure data emission: threshold curves and the equilibrium-threshold
//! table as stable CSV golden files.
//!
//! All numbers go through the crate's 9-significant-digit formatter so the
//! files are byte-identical across runs of the same build. Parameters that
//! are a presentation choice rather than a derived quantity (the horizon of
//! the per-round curves) are recorded in the leading comment block.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{FluxError, Result};
use crate::format::sig9;
use crate::multi::{dse_threshold, ne_threshold};
use crate::single::{threshold_curve, ThresholdCurve};

/// The three data files the toolkit reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Per-round thresholds at p = 0.3, horizon 10.
    Fig2,
    /// Per-round thresholds at p = 0.7, horizon 10.
    Fig3,
    /// Equilibrium thresholds for horizons 2..=30 at n = 20, C = 20, D = 1.
    Fig4,
}

impl FromStr for FigureId {
    type Err = FluxError;

    fn from_str(s: &str) -> Result<FigureId> {
        match s {
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            other => Err(FluxError::invalid(
                "which",
                format!("expected fig2, fig3 or fig4, got \"{other}\""),
            )),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FigureId::Fig2 => write!(f, "fig2"),
            FigureId::Fig3 => write!(f, "fig3"),
            FigureId::Fig4 => write!(f, "fig4"),
        }
    }
}

/// CSV for a per-round threshold curve: one row per rounds-left value, the
/// no-history column carrying the infinity marker below the horizon.
pub fn curve_csv(curve: &ThresholdCurve) -> String {
    let mut out = String::new();
    out.push_str("# flux per-round truthfulness thresholds\n");
    out.push_str(&format!(
        "# t_rounds: {}, p: {}\n",
        curve.t_rounds,
        sig9(curve.p)
    ));
    out.push_str("# r_no_history: rate to adopt a full report with no prior report\n");
    out.push_str("# r_truthful_history: rate to keep a full report alive\n");
    out.push_str("t,r_no_history,r_truthful_history\n");
    for row in &curve.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.rounds_left,
            row.r_no_history.display_sig9(),
            sig9(row.r_truthful_history)
        ));
    }
    out
}

/// CSV for the equilibrium-threshold table: horizons 2..=30 at n = 20,
/// C = 20, D = 1, for busted probabilities 1/3 and 2/3.
pub fn equilibrium_table_csv() -> Result<String> {
    let (n, c, d) = (20, 20.0, 1.0);
    let (p_lo, p_hi) = (1.0 / 3.0, 2.0 / 3.0);
    let mut out = String::new();
    out.push_str("# flux equilibrium thresholds by horizon\n");
    out.push_str(&format!("# n: {n}, c: {c}, d: {d}\n"));
    out.push_str("T,ne_p=1/3,dse_p=1/3,ne_p=2/3,dse_p=2/3\n");
    for t in 2..=30u32 {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t,
            sig9(ne_threshold(t, p_lo, n, c, d)?),
            sig9(dse_threshold(t, p_lo, n, c, d)?),
            sig9(ne_threshold(t, p_hi, n, c, d)?),
            sig9(dse_threshold(t, p_hi, n, c, d)?),
        ));
    }
    Ok(out)
}

/// The CSV body for a figure.
pub fn figure_csv(which: FigureId) -> Result<String> {
    match which {
        FigureId::Fig2 => Ok(curve_csv(&threshold_curve(10, 0.3)?)),
        FigureId::Fig3 => Ok(curve_csv(&threshold_curve(10, 0.7)?)),
        FigureId::Fig4 => equilibrium_table_csv(),
    }
}

/// Writes a figure's CSV to `out`.
pub fn emit_figure(which: FigureId, out: &Path) -> Result<()> {
    std::fs::write(out, figure_csv(which)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Data rows of a CSV body: comment block and header skipped, cells
    /// split on commas.
    fn rows(csv: &str) -> Vec<Vec<String>> {
        csv.lines()
            .filter(|line| !line.starts_with('#'))
            .skip(1)
            .map(|line| line.split(',').map(str::to_string).collect())
            .collect()
    }

    #[test]
    fn fig2_first_row_has_unit_history_threshold() {
        let csv = figure_csv(FigureId::Fig2).unwrap();
        let rows = rows(&csv);
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[0][0], "1");
        assert_eq!(rows[0][1], "inf");
        assert_eq!(rows[0][2], "1.00000000");
        // Below the horizon the no-history column is the infinity marker.
        assert!(rows[..9].iter().all(|row| row[1] == "inf"));
        assert_ne!(rows[9][1], "inf");
    }

    #[test]
    fn fig3_history_column_is_flat_above_round_one() {
        let csv = figure_csv(FigureId::Fig3).unwrap();
        for row in &rows(&csv)[1..] {
            assert_eq!(row[2], "0.714285714");
        }
    }

    #[test]
    fn fig4_columns_decrease_and_dse_dominates() {
        let csv = figure_csv(FigureId::Fig4).unwrap();
        let rows = rows(&csv);
        assert_eq!(rows.len(), 29);
        // The cells carry 9 significant digits, which cannot resolve the
        // strict decrease once a column is within ~1e-9 of its limit; check
        // strictness on the recomputed values and require every cell to be
        // exactly the formatted image of its value.
        let mut previous: Option<[f64; 4]> = None;
        for row in &rows {
            let t: u32 = row[0].parse().unwrap();
            let values = [
                ne_threshold(t, 1.0 / 3.0, 20, 20.0, 1.0).unwrap(),
                dse_threshold(t, 1.0 / 3.0, 20, 20.0, 1.0).unwrap(),
                ne_threshold(t, 2.0 / 3.0, 20, 20.0, 1.0).unwrap(),
                dse_threshold(t, 2.0 / 3.0, 20, 20.0, 1.0).unwrap(),
            ];
            for (cell, value) in row[1..].iter().zip(&values) {
                assert_eq!(cell, &sig9(*value), "T={t}");
            }
            assert!(values[1] >= values[0], "dse < ne at T={t}");
            assert!(values[3] >= values[2], "dse < ne at T={t}");
            if let Some(prev) = previous {
                for col in 0..4 {
                    assert!(
                        values[col] < prev[col],
                        "column {col} fails to decrease at T={t}"
                    );
                }
            }
            previous = Some(values);
        }
    }

    #[test]
    fn figure_output_is_byte_stable() {
        for which in [FigureId::Fig2, FigureId::Fig3, FigureId::Fig4] {
            assert_eq!(figure_csv(which).unwrap(), figure_csv(which).unwrap());
        }
    }

    #[test]
    fn emit_writes_the_same_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig2.csv");
        emit_figure(FigureId::Fig2, &path).unwrap();
        let on_disk = std::fs::read_to_string(&path).unwrap();
        assert_eq!(on_disk, figure_csv(FigureId::Fig2).unwrap());
    }

    #[test]
    fn figure_ids_parse_and_print() {
        for (text, id) in [
            ("fig2", FigureId::Fig2),
            ("fig3", FigureId::Fig3),
            ("fig4", FigureId::Fig4),
        ] {
            assert_eq!(text.parse::<FigureId>().unwrap(), id);
            assert_eq!(id.to_string(), text);
        }
        assert!("fig5".parse::<FigureId>().is_err());
    }
}
