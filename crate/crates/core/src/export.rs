//! Plain-text and JSON serialisation of coefficients, curves and bound
//! tables. Every file starts with the configuration that produced it.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::algebra::{ModelSpec, Topology};
use crate::series::SeriesCoefficients;
use crate::Rational;

/// Ordered `key = value` pairs echoed at the top of every output.
pub type ConfigEcho = Vec<(String, String)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Source {
    #[serde(rename = "symbolic")]
    Symbolic,
    #[serde(rename = "matrix-oracle")]
    MatrixOracle,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Symbolic => "symbolic",
            Source::MatrixOracle => "matrix-oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientRecord {
    pub observable: String,
    pub topology: String,
    pub lambda_b: usize,
    pub order: usize,
    /// Power of `t` the coefficient multiplies.
    pub power: usize,
    pub numerator: String,
    pub denominator: String,
    /// The coefficient is `i` times the stored value.
    pub imaginary: bool,
    pub universal: bool,
    pub source: Source,
}

pub fn topology_label(model: &ModelSpec) -> String {
    match model.topology() {
        Topology::Ring(l) => format!("ring({l})"),
        Topology::Line(l) => format!("line({l})"),
        Topology::InfiniteLine => "infinite".into(),
    }
}

pub fn coefficient_records(coeffs: &SeriesCoefficients, source: Source) -> Vec<CoefficientRecord> {
    coeffs
        .terms
        .iter()
        .map(|term| CoefficientRecord {
            observable: coeffs.observable.label(),
            topology: topology_label(&coeffs.model),
            lambda_b: coeffs.model.blockade_range(),
            order: term.order,
            power: coeffs.power(term.order),
            numerator: term.value.numer().to_string(),
            denominator: term.value.denom().to_string(),
            imaginary: term.imaginary,
            universal: coeffs.is_universal(term.order),
            source,
        })
        .collect()
}

/// Rounded decimal expansion with `digits` digits after the point.
pub fn rational_decimal(value: &Rational, digits: usize) -> String {
    let negative = value.is_negative();
    let numer = value.numer().abs();
    let denom = value.denom().clone();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let (mut q, r) = (&numer * &scale).div_rem(&denom);
    if &r * 2 >= denom {
        q += 1;
    }
    let mut text = q.to_string();
    if text.len() <= digits {
        text = format!("{}{text}", "0".repeat(digits + 1 - text.len()));
    }
    let split = text.len() - digits;
    let (int, frac) = text.split_at(split);
    let sign = if negative && !q.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Digits after the point in `--decimal` output.
pub const DECIMAL_DIGITS: usize = 40;

fn header(config: &ConfigEcho) -> String {
    let mut out = String::new();
    for (k, v) in config {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}

fn config_json(config: &ConfigEcho) -> Value {
    Value::Object(config.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect::<Map<_, _>>())
}

const RECORD_COLUMNS: [&str; 10] =
    ["observable", "topology", "lambda_b", "order", "power", "numerator", "denominator", "imaginary", "universal", "source"];

pub fn records_csv(config: &ConfigEcho, records: &[CoefficientRecord], decimal: bool) -> String {
    let mut out = header(config);
    out.push_str(&RECORD_COLUMNS.join(","));
    if decimal {
        out.push_str(",decimal");
    }
    out.push('\n');
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.observable,
            r.topology,
            r.lambda_b,
            r.order,
            r.power,
            r.numerator,
            r.denominator,
            r.imaginary,
            r.universal,
            r.source.as_str()
        );
        if decimal {
            let value = Rational::new(r.numerator.parse().expect("integer"), r.denominator.parse().expect("integer"));
            let _ = write!(out, ",{}", rational_decimal(&value, DECIMAL_DIGITS));
        }
        out.push('\n');
    }
    out
}

pub fn records_json(config: &ConfigEcho, records: &[CoefficientRecord], decimal: bool) -> String {
    let mut items = Vec::with_capacity(records.len());
    for r in records {
        let mut v = serde_json::to_value(r).expect("records serialise");
        if decimal {
            let value = Rational::new(r.numerator.parse().expect("integer"), r.denominator.parse().expect("integer"));
            v["decimal"] = Value::String(rational_decimal(&value, DECIMAL_DIGITS));
        }
        items.push(v);
    }
    let doc = json!({ "config": config_json(config), "records": items });
    serde_json::to_string_pretty(&doc).expect("json") + "\n"
}

/// Shortest representation that reads back to the same `f64`; `NaN` for
/// undefined points.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}

/// Numeric table with named columns, e.g. `t,value` curves or `j,log_bj`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self, config: &ConfigEcho) -> String {
        let mut out = header(config);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_f64(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"config": {...}, "columns": {"t": [...], ...}}`; `NaN` becomes
    /// `null`.
    pub fn to_json(&self, config: &ConfigEcho) -> String {
        let mut columns = Map::new();
        for (i, name) in self.columns.iter().enumerate() {
            let values: Vec<Value> = self.rows.iter().map(|r| serde_json::Number::from_f64(r[i]).map_or(Value::Null, Value::Number)).collect();
            columns.insert(name.clone(), Value::Array(values));
        }
        let order: Vec<Value> = self.columns.iter().map(|c| Value::String(c.clone())).collect();
        let doc = json!({ "config": config_json(config), "column_order": order, "columns": columns });
        serde_json::to_string_pretty(&doc).expect("json") + "\n"
    }
}

/// Reads the `t,value` body of a CSV written by [`Table::to_csv`], skipping
/// comment lines and the column header.
pub fn parse_table_csv(text: &str) -> Option<Table> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let mut table = Table::new(lines.next()?.split(','));
    for line in lines {
        let row: Option<Vec<f64>> = line.split(',').map(|c| c.trim().parse().ok()).collect();
        table.push(row?);
    }
    Some(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Budget;
    use crate::series::density_coefficients;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn decimals() {
        assert_eq!(rational_decimal(&q(1, 3), 5), "0.33333");
        assert_eq!(rational_decimal(&q(2, 3), 5), "0.66667");
        assert_eq!(rational_decimal(&q(-81, 280), 6), "-0.289286");
        assert_eq!(rational_decimal(&q(7, 1), 2), "7.00");
        assert_eq!(rational_decimal(&q(-1, 1000), 2), "0.00");
        assert_eq!(rational_decimal(&q(5, 2), 0), "3");
    }

    #[test]
    fn records_carry_universality() {
        let c = density_coefficients(&ModelSpec::ring(3, 1).unwrap(), 3, Budget::default()).unwrap();
        let recs = coefficient_records(&c, Source::Symbolic);
        assert_eq!(recs.iter().map(|r| r.universal).collect::<Vec<_>>(), vec![true, true, false]);
        assert_eq!(recs[1].numerator, "-1");
        assert_eq!(recs[1].power, 4);
        let csv = records_csv(&vec![("command".into(), "coeffs".into())], &recs, false);
        assert!(csv.starts_with("# command = coeffs\nobservable,"));
        assert!(csv.contains("density,ring(3),1,2,4,-1,1,false,true,symbolic"));
        let json: Value = serde_json::from_str(&records_json(&vec![], &recs, true)).unwrap();
        assert_eq!(json["records"][0]["source"], "symbolic");
        assert!(json["records"][0]["decimal"].as_str().unwrap().starts_with("1.000"));
    }

    #[test]
    fn table_round_trip() {
        let mut t = Table::new(["t", "value"]);
        t.push(vec![0.0, 0.0]);
        t.push(vec![0.1, 0.009_900_6]);
        let csv = t.to_csv(&vec![("L".into(), "4".into())]);
        assert_eq!(parse_table_csv(&csv).unwrap(), t);
        let json: Value = serde_json::from_str(&t.to_json(&vec![])).unwrap();
        assert_eq!(json["columns"]["value"][1], 0.009_900_6);
    }
}
