use std::fmt::Write;

use opmeans_core::{closed_form_phi, representing_phi, Generator};

use crate::error::{CliError, Result};

/// Sample points for the table.
#[derive(Debug, Clone, PartialEq)]
pub enum TGrid {
    /// `steps + 1` points, log-spaced from `lo` to `hi`.
    Range {
        lo: f64,
        hi: f64,
        steps: usize,
    },
    Points(Vec<f64>),
}

impl TGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let points = match self {
            TGrid::Range { lo, hi, steps } => {
                if !(*lo > 0.0 && hi >= lo && hi.is_finite()) {
                    return Err(CliError::Usage(format!("t-range must satisfy 0 < t-min <= t-max, got [{lo}, {hi}]")));
                }
                if *steps == 0 {
                    return Err(CliError::Usage("steps must be at least 1".into()));
                }
                let (a, b) = (lo.log10(), hi.log10());
                // Endpoints are returned as given rather than through pow(10, log10 t).
                (0..=*steps)
                    .map(|i| match i {
                        0 => *lo,
                        i if i == *steps => *hi,
                        i => 10f64.powf(a + (b - a) * i as f64 / *steps as f64),
                    })
                    .collect()
            }
            TGrid::Points(ts) => ts.clone(),
        };
        if let Some(t) = points.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(CliError::Usage(format!("t must be positive and finite, got {t}")));
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiRow {
    pub t: f64,
    pub numeric: f64,
    pub closed_form: Option<f64>,
}

impl PhiRow {
    pub fn abs_gap(&self) -> Option<f64> {
        self.closed_form.map(|c| (c - self.numeric).abs())
    }
}

/// Representing function at each `t`, with the closed form alongside when
/// the weights are equal and the generator has one.
pub fn phi_rows(generator: &Generator, w1: f64, ts: &[f64]) -> Result<Vec<PhiRow>> {
    let weights = (w1, 1.0 - w1);
    let with_closed = w1 == 0.5 && closed_form_phi(generator, 1.0).is_ok();
    ts.iter()
        .map(|&t| {
            let numeric = representing_phi(generator, weights, t)?;
            let closed_form = if with_closed { Some(closed_form_phi(generator, t)?) } else { None };
            Ok(PhiRow { t, numeric, closed_form })
        })
        .collect()
}

/// CSV with 17 significant digits; the closed-form and gap columns appear
/// only when every row has a closed form.
pub fn to_csv(rows: &[PhiRow]) -> String {
    let closed = !rows.is_empty() && rows.iter().all(|r| r.closed_form.is_some());
    let mut out = String::from(if closed { "t,phi_numeric,phi_closed_form,abs_gap\n" } else { "t,phi_numeric\n" });
    for r in rows {
        let _ = write!(out, "{:.16e},{:.16e}", r.t, r.numeric);
        if let (true, Some(c), Some(gap)) = (closed, r.closed_form, r.abs_gap()) {
            let _ = write!(out, ",{c:.16e},{gap:.16e}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_spacing() {
        let ts = TGrid::Range { lo: 0.1, hi: 10.0, steps: 100 }.points().unwrap();
        assert_eq!(ts.len(), 101);
        assert_eq!((ts[0], ts[100]), (0.1, 10.0));
        assert_eq!(ts[50], 1.0);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        assert!(TGrid::Range { lo: 0.0, hi: 1.0, steps: 3 }.points().is_err());
        assert!(TGrid::Range { lo: 2.0, hi: 1.0, steps: 3 }.points().is_err());
        assert!(TGrid::Range { lo: 1.0, hi: 2.0, steps: 0 }.points().is_err());
        assert!(TGrid::Points(vec![1.0, -1.0]).points().is_err());
    }

    #[test]
    fn csv_columns_follow_closed_form_availability() {
        let pc = Generator::power_concave(2.0).unwrap();
        let rows = phi_rows(&pc, 0.5, &[1.0, 4.0]).unwrap();
        let csv = to_csv(&rows);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "t,phi_numeric,phi_closed_form,abs_gap");
        assert!(lines[1].starts_with("1.0000000000000000e0,1.0000000000000000e0,"));
        let fields: Vec<f64> = lines[2].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], 4.0);
        assert!(fields[3] <= 1e-10);

        let rows = phi_rows(&pc, 0.3, &[4.0]).unwrap();
        assert_eq!(to_csv(&rows).lines().next(), Some("t,phi_numeric"));
        let rows = phi_rows(&Generator::karcher(), 0.5, &[4.0]).unwrap();
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 2);
        assert!((csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse::<f64>().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trips_doubles() {
        let t = 0.1f64 + 0.2;
        let row = PhiRow { t, numeric: std::f64::consts::PI, closed_form: None };
        let csv = to_csv(&[row]);
        let fields: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields, vec![t, std::f64::consts::PI]);
    }
}
