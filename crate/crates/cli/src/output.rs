use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use qfc_core::optimizer::OptimizerReport;
use qfc_core::spec::{ObservableSpec, StateSpec};

/// Formats with 12 significant digits, switching to exponent form outside
/// `[1e-5, 1e12)`.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" { "0".into() } else { s }
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exp}")
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl Cell {
    pub fn display(&self) -> String {
        match self {
            Cell::Num(x) => sig12(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

/// Named results of one command, in display order.
#[derive(Debug, Default)]
pub struct Results {
    pub rows: Vec<(String, Cell)>,
}

impl Results {
    pub fn push(&mut self, name: impl Into<String>, cell: Cell) {
        self.rows.push((name.into(), cell));
    }

    pub fn json(&self) -> Value {
        Value::Object(self.rows.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
    }

    pub fn write_table(&self, out: &mut impl Write) -> std::io::Result<()> {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.rows {
            writeln!(out, "{k:<width$}  {}", v.display())?;
        }
        Ok(())
    }

    pub fn write_csv(&self, out: &mut impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["quantity", "value"])?;
        for (k, v) in &self.rows {
            w.write_record([k.as_str(), v.display().as_str()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct OptimizerSummary {
    pub quantity: String,
    pub best_value: f64,
    pub second_best: Option<f64>,
    pub best_restart: usize,
    pub best_seed: u64,
    pub converged: bool,
    pub evaluations: usize,
    pub iterations: usize,
    pub restart_values: Vec<f64>,
    /// Columns are the optimal basis vectors, as `[re, im]` pairs row-major.
    pub argopt: Vec<Vec<[f64; 2]>>,
}

impl OptimizerSummary {
    pub fn new(quantity: &str, r: &OptimizerReport) -> Self {
        Self {
            quantity: quantity.into(),
            best_value: r.best_value,
            second_best: r.second_best(),
            best_restart: r.best_restart,
            best_seed: r.seed(),
            converged: r.converged,
            evaluations: r.evaluations,
            iterations: r.iterations(),
            restart_values: r.restarts.iter().map(|x| x.value).collect(),
            argopt: qfc_core::spec::matrix_to_literal(&r.best_unitary),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub restarts: usize,
    pub tolerance: f64,
    pub log_base: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableSpec>,
    pub results: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub optimizer: Vec<OptimizerSummary>,
    pub wall_time_s: f64,
}
