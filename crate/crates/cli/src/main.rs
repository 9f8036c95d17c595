mod args;
mod output;

use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use qfc_core::correlations::{q_ah, q_api};
use qfc_core::discord::{entropic_discord, geometric_discord, DiscordResult, Method, ENTROPIC_MAX_DIM_A};
use qfc_core::fisher::{qfi, sld, sld_residual, variance};
use qfc_core::optimizer::OptimizerConfig;
use qfc_core::spec::{parse_observable_spec, parse_state_spec, ObservableSpec, StateSpec};
use qfc_core::states::BipartiteState;
use qfc_core::verify;
use qfc_core::Error;

use args::{Cli, Command, Format, GlobalArgs, StateArgs};
use output::{sig12, Cell, OptimizerSummary, Results, RunReport};

const MAX_DIM: usize = 36;

#[derive(Debug)]
enum Failure {
    /// Bad invocation or unreadable input.
    Usage(String),
    /// The computation itself failed.
    Physics(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Spec { .. } => Failure::Usage(e.to_string()),
            other => Failure::Physics(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Physics(format!("output error: {e}"))
    }
}

struct Outcome {
    report: RunReport,
    results: Results,
    /// Rows for `sweep`, header first.
    table: Option<Vec<Vec<String>>>,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli).and_then(|outcome| emit(&cli, &outcome).map(|()| outcome.ok));
    match result {
        Ok(ok) => ExitCode::from(if ok { 0 } else { 1 }),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Physics(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_text_or_file(arg: &str, what: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| Failure::Usage(format!("cannot read {what} `{arg}`: {e}")))
}

fn load_spec(args: &StateArgs) -> Result<StateSpec, Failure> {
    let text = match (&args.state, &args.state_json) {
        (Some(path), _) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read state file {}: {e}", path.display())))?,
        (None, Some(text)) => text.clone(),
        (None, None) => return Err(Failure::Usage("one of --state or --state-json is required".into())),
    };
    Ok(parse_state_spec(&text)?)
}

fn resolve(spec: &StateSpec, g: &GlobalArgs) -> Result<BipartiteState, Failure> {
    if let Some((m, n)) = spec.dims() {
        guard(m, n, g)?;
    }
    let rho = spec.resolve()?;
    let (m, n) = rho.dims();
    guard(m, n, g)?;
    Ok(rho)
}

fn guard(m: usize, n: usize, g: &GlobalArgs) -> Result<(), Failure> {
    if m * n > MAX_DIM && !g.allow_large {
        return Err(Failure::Usage(format!(
            "total dimension {} exceeds {MAX_DIM}; pass --allow-large to proceed",
            m * n
        )));
    }
    Ok(())
}

fn optimizer_config(g: &GlobalArgs, seed: u64) -> Result<OptimizerConfig, Failure> {
    let cfg = OptimizerConfig {
        restarts: g.restarts,
        tolerance: g.tolerance,
        max_iterations: g.max_iterations,
        seed,
        ..Default::default()
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn report(cli: &Cli, command: &str, spec: Option<StateSpec>) -> RunReport {
    let g = &cli.global;
    RunReport {
        tool: "qfc",
        version: env!("CARGO_PKG_VERSION"),
        command: command.into(),
        seed: g.seed,
        restarts: g.restarts,
        tolerance: g.tolerance,
        log_base: g.log_base.name(),
        spec,
        observable: None,
        results: json!({}),
        optimizer: Vec::new(),
        wall_time_s: 0.0,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let g = &cli.global;
    let mut outcome = match &cli.command {
        Command::Qfi { state, observable } => {
            let spec = load_spec(state)?;
            let obs_spec: ObservableSpec = parse_observable_spec(&read_text_or_file(observable, "observable")?)?;
            let rho = resolve(&spec, g)?;
            let h = obs_spec.resolve(rho.dims())?;
            let f = qfi(rho.density(), &h)?;
            let v = variance(rho.density(), &h)?;
            let l = sld(rho.density(), &h)?;
            let mut results = Results::default();
            results.push("qfi", Cell::Num(f));
            results.push("variance", Cell::Num(v));
            results.push("sld_residual", Cell::Num(sld_residual(rho.density(), &h, &l)));
            let mut r = report(cli, "qfi", Some(spec));
            r.observable = Some(obs_spec);
            Outcome { report: r, results, table: None, ok: true }
        }
        Command::Qah { state } | Command::Qapi { state } => {
            let is_qah = matches!(cli.command, Command::Qah { .. });
            let name = if is_qah { "q_ah" } else { "q_api" };
            let spec = load_spec(state)?;
            let rho = resolve(&spec, g)?;
            let cfg = optimizer_config(g, g.seed)?;
            let res = if is_qah { q_ah(&rho, &cfg)? } else { q_api(&rho, &cfg)? };
            let mut results = Results::default();
            results.push(name, Cell::Num(res.value));
            results.push("converged", Cell::Flag(res.converged()));
            results.push("best_restart", Cell::Int(res.report.best_restart as u64));
            results.push("best_seed", Cell::Int(res.report.seed()));
            if let Some(second) = res.report.second_best() {
                results.push("second_best_objective", Cell::Num(second));
            }
            results.push("evaluations", Cell::Int(res.report.evaluations as u64));
            results.push("iterations", Cell::Int(res.report.iterations() as u64));
            let mut r = report(cli, if is_qah { "qah" } else { "qapi" }, Some(spec));
            r.optimizer.push(OptimizerSummary::new(name, &res.report));
            Outcome { report: r, results, table: None, ok: res.converged() }
        }
        Command::Discord { state } => {
            let spec = load_spec(state)?;
            let rho = resolve(&spec, g)?;
            let cfg = optimizer_config(g, g.seed)?;
            let scale = g.log_base.scale();
            let mut r = report(cli, "discord", Some(spec));
            let mut results = Results::default();
            let mut ok = true;
            if rho.dim_a() <= ENTROPIC_MAX_DIM_A {
                let dq = entropic_discord(&rho, &cfg)?;
                results.push("d_q", Cell::Num(dq.value * scale));
                ok &= push_discord(&mut r, &mut results, "d_q", &dq);
            } else {
                results.push("d_q", Cell::Text(format!("skipped: dim_a > {ENTROPIC_MAX_DIM_A}")));
            }
            let dg = geometric_discord(&rho, &cfg)?;
            results.push("d_g", Cell::Num(dg.value));
            ok &= push_discord(&mut r, &mut results, "d_g", &dg);
            Outcome { report: r, results, table: None, ok }
        }
        Command::Sweep { state, param, from, to, step, values } => {
            let spec = load_spec(state)?;
            let grid = grid(*from, *to, *step, values.as_deref())?;
            sweep(cli, spec, param, &grid)?
        }
        Command::Verify { criteria } => {
            let ids: Vec<u8> = if criteria.is_empty() {
                verify::CRITERIA.iter().map(|(id, _)| *id).collect()
            } else {
                criteria.clone()
            };
            let mut results = Results::default();
            let mut all = Vec::new();
            let mut ok = true;
            for id in ids {
                if !(1..=verify::CRITERIA.len() as u8).contains(&id) {
                    return Err(Failure::Usage(format!("no criterion {id}")));
                }
                let c = verify::run_criterion(id, g.seed)?;
                if !cli_format_is_machine(cli) {
                    println!("{}", c.line());
                }
                ok &= c.passed;
                results.push(format!("criterion_{id}"), Cell::Text(if c.passed { "pass" } else { "fail" }.into()));
                all.push(c);
            }
            let mut r = report(cli, "verify", None);
            r.results = json!(all);
            Outcome { report: r, results, table: None, ok }
        }
    };
    outcome.report.wall_time_s = start.elapsed().as_secs_f64();
    if outcome.report.results == json!({}) {
        outcome.report.results = outcome.results.json();
    }
    Ok(outcome)
}

fn cli_format_is_machine(cli: &Cli) -> bool {
    matches!(cli.global.format, Some(Format::Json) | Some(Format::Csv))
}

fn push_discord(r: &mut RunReport, results: &mut Results, name: &str, d: &DiscordResult) -> bool {
    results.push(
        format!("{name}_method"),
        Cell::Text(match d.method {
            Method::ClosedForm => "closed_form".into(),
            Method::Optimized => "optimized".into(),
        }),
    );
    if let Some(report) = &d.report {
        r.optimizer.push(OptimizerSummary::new(name, report));
        results.push(format!("{name}_converged"), Cell::Flag(report.converged));
    }
    d.converged()
}

fn grid(from: Option<f64>, to: Option<f64>, step: Option<f64>, values: Option<&[f64]>) -> Result<Vec<f64>, Failure> {
    if let Some(v) = values {
        if v.is_empty() {
            return Err(Failure::Usage("--values is empty".into()));
        }
        return Ok(v.to_vec());
    }
    let (Some(a), Some(b), Some(h)) = (from, to, step) else {
        return Err(Failure::Usage("sweep needs --values or all of --from, --to, --step".into()));
    };
    if !(h > 0.0) || !a.is_finite() || !b.is_finite() || b < a {
        return Err(Failure::Usage("sweep needs finite --from <= --to and a positive --step".into()));
    }
    // tolerate roundoff at the upper end
    let count = ((b - a) / h + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| a + k as f64 * h).collect())
}

fn sweep(cli: &Cli, spec: StateSpec, param: &str, grid: &[f64]) -> Result<Outcome, Failure> {
    let g = &cli.global;
    let scale = g.log_base.scale();
    let mut rows = vec![["param", "value", "seed", "q_ah", "q_api", "d_g", "d_q", "converged"]
        .map(String::from)
        .to_vec()];
    let mut json_rows = Vec::new();
    let mut ok = true;
    for (k, &x) in grid.iter().enumerate() {
        let row_spec = spec.with_parameter(param, x)?;
        let rho = resolve(&row_spec, g)?;
        let seed = g.seed.wrapping_add(k as u64);
        let cfg = optimizer_config(g, seed)?;
        let a = q_ah(&rho, &cfg)?;
        let b = q_api(&rho, &cfg)?;
        let dg = geometric_discord(&rho, &cfg)?;
        let dq = if rho.dim_a() <= ENTROPIC_MAX_DIM_A { Some(entropic_discord(&rho, &cfg)?) } else { None };
        let converged = a.converged() && b.converged() && dg.converged() && dq.as_ref().is_none_or(|d| d.converged());
        ok &= converged;
        let dq_value = dq.as_ref().map(|d| d.value * scale);
        rows.push(vec![
            param.to_string(),
            sig12(x),
            seed.to_string(),
            sig12(a.value),
            sig12(b.value),
            sig12(dg.value),
            dq_value.map(sig12).unwrap_or_default(),
            converged.to_string(),
        ]);
        json_rows.push(json!({
            "param": param, "value": x, "seed": seed, "q_ah": a.value, "q_api": b.value,
            "d_g": dg.value, "d_q": dq_value, "converged": converged,
        }));
    }
    let mut r = report(cli, "sweep", Some(spec));
    r.results = json!({ "param": param, "rows": json_rows });
    Ok(Outcome { report: r, results: Results::default(), table: Some(rows), ok })
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let is_sweep = outcome.table.is_some();
    let format = cli.global.format.unwrap_or(if is_sweep { Format::Csv } else { Format::Table });
    let is_verify = matches!(cli.command, Command::Verify { .. });
    match (format, &outcome.table) {
        (Format::Json, _) => {
            serde_json::to_writer_pretty(&mut out, &outcome.report).map_err(|e| Failure::Physics(e.to_string()))?;
            writeln!(out)?;
        }
        (Format::Csv, Some(rows)) => write_csv_rows(&mut out, rows)?,
        (Format::Table, Some(rows)) => {
            let widths: Vec<usize> = (0..rows[0].len()).map(|j| rows.iter().map(|r| r[j].len()).max().unwrap_or(0)).collect();
            for row in rows {
                let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                writeln!(out, "{}", line.join("  ").trim_end())?;
            }
        }
        (Format::Csv, None) if is_verify => {
            let mut rows = vec![["id", "name", "passed", "measured", "threshold", "detail"].map(String::from).to_vec()];
            for c in outcome.report.results.as_array().into_iter().flatten() {
                rows.push(vec![
                    c["id"].to_string(),
                    c["name"].as_str().unwrap_or_default().to_string(),
                    c["passed"].to_string(),
                    c["measured"].as_f64().map(sig12).unwrap_or_default(),
                    c["threshold"].as_f64().map(sig12).unwrap_or_default(),
                    c["detail"].as_str().unwrap_or_default().to_string(),
                ]);
            }
            write_csv_rows(&mut out, &rows)?;
        }
        (Format::Table, None) if is_verify => {
            let passed = outcome.results.rows.iter().filter(|(_, c)| c.display() == "pass").count();
            writeln!(out, "{passed}/{} criteria passed", outcome.results.rows.len())?;
        }
        (Format::Csv, None) => outcome.results.write_csv(&mut out).map_err(|e| Failure::Physics(e.to_string()))?,
        (Format::Table, None) => outcome.results.write_table(&mut out)?,
    }
    Ok(())
}

fn write_csv_rows(out: &mut impl Write, rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.write_record(row).map_err(|e| Failure::Physics(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
