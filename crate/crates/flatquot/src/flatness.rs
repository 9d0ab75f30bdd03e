//! The uniform-flatness harness: given a series of quotient records, test the
//! lower bound `diam_S(G/H) ≥ ε·[G:H]^α` and report violations and effective
//! exponent trends.
//!
//! The verdict is one-sided by construction: the harness samples a specific
//! cofinal family of quotients, so a violation witness certifies that
//! `u.q.(α, ε)` fails, while the absence of one can never certify that the
//! property holds. Violation checks are performed in exact integer
//! arithmetic (cross-multiplied powers); floats appear only in the
//! diagnostic trend column.

use crate::exact_arith::Rational;
use crate::families::{DiamMode, QuotientRecord};
use num_bigint::BigInt;
use std::io::Write;
use std::path::Path;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum FlatnessError {
    #[error("series is empty")]
    EmptySeries,
    #[error("two records share the index {0}")]
    DuplicateIndex(u64),
    #[error("alpha must lie in (0, 1], got {0}")]
    BadAlpha(Rational),
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(Rational),
    #[error("exponent of {0} too large for exact comparison")]
    ExponentTooLarge(Rational),
    #[error("malformed report row {row}: {reason}")]
    BadRow { row: usize, reason: String },
}

/// The diameter data of one record, as consumed and re-read by the harness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRow {
    pub family_id: String,
    pub parameter: u64,
    pub index: u64,
    pub diam_exact: Option<u64>,
    pub diam_bound: u64,
}

impl SeriesRow {
    pub fn diameter_estimate(&self) -> u64 {
        self.diam_exact.unwrap_or(self.diam_bound)
    }

    pub fn mode(&self) -> DiamMode {
        if self.diam_exact.is_some() {
            DiamMode::Exact
        } else {
            DiamMode::BoundOnly
        }
    }
}

impl From<&QuotientRecord> for SeriesRow {
    fn from(r: &QuotientRecord) -> Self {
        SeriesRow {
            family_id: r.family_id.clone(),
            parameter: r.parameter,
            index: r.index,
            diam_exact: r.diam_exact,
            diam_bound: r.diam_bound,
        }
    }
}

/// Quotient records sorted by strictly increasing index.
#[derive(Clone, Debug)]
pub struct FlatnessSeries {
    rows: Vec<SeriesRow>,
}

impl FlatnessSeries {
    /// An empty series is legal (its report is a header-only file), but
    /// verdict scans over it are an error.
    pub fn from_rows(mut rows: Vec<SeriesRow>) -> Result<Self, FlatnessError> {
        rows.sort_by_key(|r| r.index);
        for w in rows.windows(2) {
            if w[0].index == w[1].index {
                return Err(FlatnessError::DuplicateIndex(w[0].index));
            }
        }
        Ok(FlatnessSeries { rows })
    }

    pub fn from_records(records: &[QuotientRecord]) -> Result<Self, FlatnessError> {
        Self::from_rows(records.iter().map(SeriesRow::from).collect())
    }

    pub fn rows(&self) -> &[SeriesRow] {
        &self.rows
    }
}

/// A witness that one record breaks the lower bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub family_id: String,
    pub parameter: u64,
    pub index: u64,
    pub diameter: u64,
    /// Whether the diameter used was exact or the analytic bound.
    pub used_exact: bool,
}

/// The outcome of a `u.q.(α, ε)` scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub alpha: Rational,
    pub epsilon: Rational,
    pub violation: Option<Witness>,
}

impl Verdict {
    /// JSON form: `{"alpha":"1/2","epsilon":"1","violated_at":n,...}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::json!({
            "alpha": self.alpha.to_string(),
            "epsilon": self.epsilon.to_string(),
            "violated_at": serde_json::Value::Null,
        });
        if let Some(w) = &self.violation {
            obj["violated_at"] = w.parameter.into();
            obj["family"] = w.family_id.clone().into();
            obj["index"] = w.index.into();
            obj["diameter"] = w.diameter.into();
            obj["diameter_mode"] = if w.used_exact { "exact" } else { "bound-only" }.into();
        }
        obj
    }
}

/// Decide `diameter < ε · index^α` exactly: for `α = a/b` and `ε = e/f`,
/// compare `diameter^b · f^b` against `e^b · index^a` as big integers.
pub fn violates_bound(
    diameter: u64,
    index: u64,
    alpha: &Rational,
    epsilon: &Rational,
) -> Result<bool, FlatnessError> {
    let a = exponent_of(alpha.numerator(), alpha)?;
    let b = exponent_of(alpha.denominator(), alpha)?;
    let e = epsilon.numerator().clone();
    let f = epsilon.denominator().clone();
    let lhs = BigInt::from(diameter).pow(b) * f.pow(b);
    let rhs = e.pow(b) * BigInt::from(index).pow(a);
    Ok(lhs < rhs)
}

fn exponent_of(x: &BigInt, alpha: &Rational) -> Result<u32, FlatnessError> {
    u32::try_from(x.clone()).map_err(|_| FlatnessError::ExponentTooLarge(alpha.clone()))
}

/// Scan the series in index order and return the first record whose diameter
/// estimate breaks `diam ≥ ε·index^α`, if any.
///
/// The exact diameter is used when present, otherwise the analytic upper
/// bound — sound, since any upper bound below the threshold already
/// certifies the violation.
pub fn check_uq(
    series: &FlatnessSeries,
    alpha: &Rational,
    epsilon: &Rational,
) -> Result<Verdict, FlatnessError> {
    if series.rows.is_empty() {
        return Err(FlatnessError::EmptySeries);
    }
    if alpha <= &Rational::zero() || alpha > &Rational::one() {
        return Err(FlatnessError::BadAlpha(alpha.clone()));
    }
    if epsilon <= &Rational::zero() {
        return Err(FlatnessError::BadEpsilon(epsilon.clone()));
    }
    for row in &series.rows {
        let d = row.diameter_estimate();
        if violates_bound(d, row.index, alpha, epsilon)? {
            return Ok(Verdict {
                alpha: alpha.clone(),
                epsilon: epsilon.clone(),
                violation: Some(Witness {
                    family_id: row.family_id.clone(),
                    parameter: row.parameter,
                    index: row.index,
                    diameter: d,
                    used_exact: row.diam_exact.is_some(),
                }),
            });
        }
    }
    Ok(Verdict { alpha: alpha.clone(), epsilon: epsilon.clone(), violation: None })
}

/// Diagnostic effective exponents `ln(diameter) / ln(index)` per record;
/// never used in verdicts.
pub fn alpha_trend(series: &FlatnessSeries) -> Vec<(u64, f64)> {
    series
        .rows
        .iter()
        .map(|row| {
            let d = row.diameter_estimate();
            let ratio = if d >= 1 && row.index >= 2 {
                (d as f64).ln() / (row.index as f64).ln()
            } else {
                f64::NAN
            };
            (row.parameter, ratio)
        })
        .collect()
}

/// Write the series as CSV: one row per record, RFC 4180 quoting,
/// deterministic order (ascending index).
pub fn emit_report(series: &FlatnessSeries, path: &Path) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_report(series, &mut out)
}

pub fn write_report(series: &FlatnessSeries, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "family,parameter,index,diam_exact,diam_bound,mode,alpha_ratio")?;
    let trend = alpha_trend(series);
    for (row, (_, ratio)) in series.rows.iter().zip(trend) {
        let exact = row.diam_exact.map_or(String::new(), |d| d.to_string());
        let ratio_s = if ratio.is_nan() { String::new() } else { format!("{ratio:.6}") };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&row.family_id),
            row.parameter,
            row.index,
            exact,
            row.diam_bound,
            row.mode(),
            ratio_s
        )?;
    }
    out.flush()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Read back a CSV produced by [`emit_report`].
pub fn parse_report(text: &str) -> Result<FlatnessSeries, FlatnessError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields = split_csv_line(line);
        if fields.len() != 7 {
            return Err(FlatnessError::BadRow {
                row: i + 1,
                reason: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let parse_u64 = |s: &str, what: &str| {
            s.parse::<u64>().map_err(|_| FlatnessError::BadRow {
                row: i + 1,
                reason: format!("bad {what}: {s:?}"),
            })
        };
        let diam_exact = if fields[3].is_empty() {
            None
        } else {
            Some(parse_u64(&fields[3], "diam_exact")?)
        };
        rows.push(SeriesRow {
            family_id: fields[0].clone(),
            parameter: parse_u64(&fields[1], "parameter")?,
            index: parse_u64(&fields[2], "index")?,
            diam_exact,
            diam_bound: parse_u64(&fields[4], "diam_bound")?,
        });
    }
    FlatnessSeries::from_rows(rows)
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => quoted = !quoted,
            ',' if !quoted => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{bs_quotient, cyclic_quotient, family_series, FamilySpec};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn series_of(rows: Vec<SeriesRow>) -> FlatnessSeries {
        FlatnessSeries::from_rows(rows).unwrap()
    }

    fn row(index: u64, diam: u64) -> SeriesRow {
        SeriesRow {
            family_id: "t".into(),
            parameter: index,
            index,
            diam_exact: Some(diam),
            diam_bound: diam,
        }
    }

    #[test]
    fn exact_violation_decision() {
        // diam = index: never below ε·index for ε ≤ 1, α = 1.
        let s = series_of(vec![row(100, 100)]);
        let v = check_uq(&s, &q("1"), &q("1/2")).unwrap();
        assert!(v.violation.is_none());
        // A record whose diameter is below √index at ε = 1.
        let s = series_of(vec![row(10_000, 99)]);
        let v = check_uq(&s, &q("1/2"), &q("1")).unwrap();
        let w = v.violation.unwrap();
        assert_eq!(w.index, 10_000);
        // Boundary: 100 < 1·√10000 = 100 is false, no violation.
        let s = series_of(vec![row(10_000, 100)]);
        assert!(check_uq(&s, &q("1/2"), &q("1")).unwrap().violation.is_none());
    }

    #[test]
    fn representation_of_alpha_does_not_matter() {
        let s = series_of(vec![row(10_000, 99), row(20_000, 200)]);
        let v1 = check_uq(&s, &q("1/2"), &q("1")).unwrap();
        let v2 = check_uq(&s, &q("2/4"), &q("3/3")).unwrap();
        assert_eq!(v1.violation, v2.violation);
    }

    #[test]
    fn tiny_epsilon_never_trips_short_series() {
        let rows: Vec<SeriesRow> = (2..=12u64).map(|n| row(n * n, n)).collect();
        let v = check_uq(&series_of(rows), &q("1"), &q("1/1000000")).unwrap();
        assert!(v.violation.is_none());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let s = series_of(vec![row(4, 2)]);
        assert!(matches!(check_uq(&s, &q("0"), &q("1")), Err(FlatnessError::BadAlpha(_))));
        assert!(matches!(check_uq(&s, &q("2"), &q("1")), Err(FlatnessError::BadAlpha(_))));
        assert!(matches!(check_uq(&s, &q("1"), &q("-1")), Err(FlatnessError::BadEpsilon(_))));
        let empty = FlatnessSeries::from_rows(vec![]).unwrap();
        assert!(matches!(
            check_uq(&empty, &q("1"), &q("1")),
            Err(FlatnessError::EmptySeries)
        ));
        assert!(matches!(
            FlatnessSeries::from_rows(vec![row(4, 2), row(4, 3)]),
            Err(FlatnessError::DuplicateIndex(4))
        ));
    }

    #[test]
    fn bound_violation_implies_exact_violation() {
        // If the bound already violates, the (smaller) exact diameter does too.
        let mut r = bs_quotient(2, 10).unwrap();
        let s_bound = series_of(vec![SeriesRow::from(&r)]);
        let v_bound = check_uq(&s_bound, &q("1/2"), &q("1")).unwrap();
        r.fill_diameter(1_000_000).unwrap();
        let s_exact = series_of(vec![SeriesRow::from(&r)]);
        let v_exact = check_uq(&s_exact, &q("1/2"), &q("1")).unwrap();
        if v_bound.violation.is_some() {
            assert!(v_exact.violation.is_some());
        }
    }

    #[test]
    fn cyclic_family_is_a_positive_control() {
        let params: Vec<u64> = (2..=200).collect();
        let recs = family_series(&FamilySpec::Cyclic, &params, 1_000_000);
        let records: Vec<_> = recs.into_iter().map(|(_, r)| r.unwrap()).collect();
        let s = FlatnessSeries::from_records(&records).unwrap();
        let v = check_uq(&s, &q("1"), &q("1/3")).unwrap();
        assert!(v.violation.is_none());
        // The effective exponent tends to 1.
        let trend = alpha_trend(&s);
        let (_, last) = trend.last().unwrap();
        assert!(*last > 0.85, "cyclic trend should approach 1, got {last}");
    }

    #[test]
    fn report_round_trip() {
        let mut rec = cyclic_quotient(9).unwrap();
        rec.fill_diameter(100).unwrap();
        let bs = bs_quotient(2, 5).unwrap();
        let s = FlatnessSeries::from_records(&[rec, bs]).unwrap();
        let mut buf = Vec::new();
        write_report(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "family,parameter,index,diam_exact,diam_bound,mode,alpha_ratio"
        );
        assert_eq!(lines.clone().count(), 2);
        assert!(text.contains("cyclic,9,9,4,9,exact"));
        assert!(text.contains("bs(k=2),5,155,,60,bound-only"));
        let parsed = parse_report(&text).unwrap();
        assert_eq!(parsed.rows(), s.rows());
    }

    #[test]
    fn verdict_json_shape() {
        let s = series_of(vec![row(10_000, 99)]);
        let v = check_uq(&s, &q("1/2"), &q("1")).unwrap();
        let json = v.to_json();
        assert_eq!(json["alpha"], "1/2");
        assert_eq!(json["epsilon"], "1");
        assert_eq!(json["violated_at"], 10_000);
        assert_eq!(json["diameter"], 99);
        let none = check_uq(&s, &q("1"), &q("1/1000000")).unwrap().to_json();
        assert!(none["violated_at"].is_null());
    }

    #[test]
    fn empty_series_report_is_header_only() {
        let empty = FlatnessSeries::from_rows(vec![]).unwrap();
        let mut buf = Vec::new();
        write_report(&empty, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "family,parameter,index,diam_exact,diam_bound,mode,alpha_ratio\n");
        assert!(parse_report(&text).unwrap().rows().is_empty());
    }

    #[test]
    fn bs_trend_falls_below_one_half() {
        let params: Vec<u64> = (2..=12).collect();
        let records: Vec<_> = family_series(&FamilySpec::Bs { k: 2 }, &params, 1_000_000)
            .into_iter()
            .map(|(_, r)| r.unwrap())
            .collect();
        let series = FlatnessSeries::from_records(&records).unwrap();
        let trend = alpha_trend(&series);
        // The effective exponent drops below 1/2 within the range and stays
        // there through n = 12.
        let from = trend.iter().position(|&(_, r)| r < 0.5).unwrap();
        assert!(trend[from..].iter().all(|&(_, r)| r < 0.5));
        assert!(trend.last().unwrap().1 < 0.5);
    }
}
