use std::io::Write;
use std::path::{Path, PathBuf};

use hyperdefect::acceptance;
use hyperdefect::chaos::{
    c_coefficient, constant_estimate, constant_lower_bound, exact_variance, facile_check,
    ConstantEstimate, ConstantMethod,
};
use hyperdefect::harmonics::{
    circulant_closed, circulant_sum, cum4_ratio, gaunt_table, lemcg_check,
};
use hyperdefect::montecarlo::{clt_experiment, CltConfig, SamplerMethod};
use hyperdefect::numeric::rel_diff;
use hyperdefect::spherequad::{moment_table, MomentRange};
use serde::Serialize;
use serde_json::json;

use crate::config::{Command, Format, MethodArg, RangeArg, RunConfig, SamplerArg};
use crate::output::{self, config_line, write_json, write_table, Cell, Table};
use crate::CliError;

const LEMCG_LIMIT: f64 = 1e-9;

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.command() {
        Command::Variance => variance(cfg),
        Command::Constant => constant(cfg),
        Command::Ccoef => ccoef(cfg),
        Command::Gaunt => gaunt(cfg),
        Command::Lemcg => lemcg(cfg),
        Command::Circulant => circulant(cfg),
        Command::McClt => mc_clt(cfg),
        Command::Moments => moments(cfg),
        Command::Facile => facile(cfg),
        Command::Selftest => selftest(cfg),
    }
}

fn even_degrees(cfg: &RunConfig) -> Result<Vec<u32>, CliError> {
    let all = cfg.degrees()?;
    let (even, odd): (Vec<u32>, Vec<u32>) = all.into_iter().partition(|l| l % 2 == 0 && *l > 0);
    if !odd.is_empty() {
        eprintln!("warning: skipping odd or zero degrees {odd:?}");
    }
    if even.is_empty() {
        return Err(CliError::Usage("no even degree left to process".into()));
    }
    Ok(even)
}

fn variance(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.d_or(2);
    let tol = cfg.tol.unwrap_or(1e-4);
    let mut rows = Vec::new();
    for l in cfg.degrees()? {
        let r = exact_variance(d, l, tol)?;
        rows.push(vec![
            Cell::Int(l.into()),
            Cell::Float(r.value),
            Cell::Float(f64::from(l).powi(d as i32) * r.value),
            Cell::Float(r.tail_bound),
            Cell::Int(r.q_used as u64),
        ]);
    }
    let table = Table {
        columns: vec!["l", "variance", "scaled_variance", "tail_bound", "q_used"],
        rows,
    };
    write_table(cfg, &table, None)
}

#[derive(Serialize)]
struct BothMethods {
    d: u32,
    series: ConstantEstimate,
    integral: ConstantEstimate,
    disagreement: f64,
    relative_disagreement: f64,
    combined_error: f64,
    lower_bound: f64,
    consistent: bool,
}

fn constant(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.d_or(2);
    let method = cfg.method.unwrap_or(MethodArg::Both);
    let single = |m| -> Result<(), CliError> {
        let e = constant_estimate(d, m)?;
        let table = Table {
            columns: vec!["d", "method", "value", "error_estimate", "lower_bound"],
            rows: vec![vec![
                Cell::Int(d.into()),
                Cell::Text(e.method.to_string()),
                Cell::Float(e.value),
                Cell::Float(e.error),
                Cell::Float(e.lower_bound),
            ]],
        };
        write_table(cfg, &table, None)?;
        if e.value <= e.lower_bound {
            return Err(CliError::Diagnostic(format!(
                "estimate {} does not exceed the lower bound {}",
                e.value, e.lower_bound
            )));
        }
        Ok(())
    };
    match method {
        MethodArg::Series => single(ConstantMethod::Series),
        MethodArg::Integral => single(ConstantMethod::Integral),
        MethodArg::Both => {
            let series = constant_estimate(d, ConstantMethod::Series)?;
            let integral = constant_estimate(d, ConstantMethod::Integral)?;
            let disagreement = (series.value - integral.value).abs();
            let combined_error = series.error + integral.error;
            let lower_bound = constant_lower_bound(d)?;
            let consistent = disagreement <= 3.0 * combined_error + 1e-12 * integral.value.abs()
                && series.value > lower_bound
                && integral.value > lower_bound;
            let report = BothMethods {
                d,
                relative_disagreement: rel_diff(series.value, integral.value),
                series,
                integral,
                disagreement,
                combined_error,
                lower_bound,
                consistent,
            };
            write_json(cfg, &report)?;
            if !consistent {
                return Err(CliError::Diagnostic(format!(
                    "methods disagree by {disagreement:e} beyond combined error {combined_error:e}"
                )));
            }
            Ok(())
        }
    }
}

fn ccoef(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.d_or(2);
    let mut rows = Vec::new();
    let mut positive = 0;
    let orders = cfg.orders("1:6")?;
    for &q in &orders {
        let c = c_coefficient(d, q.into())?;
        if c.value > 0.0 {
            positive += 1;
        }
        rows.push(vec![
            Cell::Int(d.into()),
            Cell::Int(q.into()),
            Cell::Text("lobes".into()),
            Cell::Float(c.value),
            Cell::Float(c.error),
        ]);
        if let Some(exact) = c.closed_form {
            rows.push(vec![
                Cell::Int(d.into()),
                Cell::Int(q.into()),
                Cell::Text("closed-form".into()),
                Cell::Float(exact),
                Cell::Float(0.0),
            ]);
        }
    }
    eprintln!("note: {positive} of {} coefficients positive", orders.len());
    let table = Table {
        columns: vec!["d", "q", "method", "value", "error_estimate"],
        rows,
    };
    write_table(cfg, &table, None)
}

fn single_degree(cfg: &RunConfig) -> Result<u32, CliError> {
    match cfg.degrees()?[..] {
        [l] => Ok(l),
        _ => Err(CliError::Usage("this command takes a single --l".into())),
    }
}

fn gaunt(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.d_or(2);
    let l = single_degree(cfg)?;
    let table = gaunt_table(d, l)?;
    if cfg.format == Some(Format::Json) {
        let entries: Vec<(usize, usize, usize, f64)> = table
            .nonzero()
            .into_iter()
            .map(|(a, b, c, v)| (a + 1, b + 1, c + 1, v))
            .collect();
        let result = json!({
            "d": d, "l": l, "n": table.n(), "exactness": table.exactness(), "entries": entries
        });
        return write_json(cfg, &result);
    }
    let path = output::destination(cfg, "txt");
    let mut out = output::open(path.as_ref())?;
    let io_err = |e: std::io::Error| CliError::Io(e.to_string());
    writeln!(out, "{}", config_line(cfg)).map_err(io_err)?;
    table.write_text(&mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn lemcg(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.d_or(2);
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for l in even_degrees(cfg)? {
        let r = lemcg_check(&gaunt_table(d, l)?)?;
        let pass = r.max_offdiag < LEMCG_LIMIT && r.max_diag_rel < LEMCG_LIMIT;
        if !pass {
            failed.push(l);
        }
        rows.push(vec![
            Cell::Int(d.into()),
            Cell::Int(l.into()),
            Cell::Int(r.n as u64),
            Cell::Float(r.g),
            Cell::Float(r.max_offdiag),
            Cell::Float(r.max_diag_rel),
            Cell::Text(pass.to_string()),
        ]);
    }
    let table = Table {
        columns: vec!["d", "l", "n", "g", "max_offdiag", "max_diag_rel", "pass"],
        rows,
    };
    write_table(cfg, &table, None)?;
    if !failed.is_empty() {
        return Err(CliError::Diagnostic(format!(
            "residuals above {LEMCG_LIMIT:e} at ℓ = {failed:?}"
        )));
    }
    Ok(())
}

fn circulant(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.d_or(2);
    let direct = cfg.direct.unwrap_or(false);
    let mut rows = Vec::new();
    for l in even_degrees(cfg)? {
        let closed = circulant_closed(d, l)?;
        let ratio = cum4_ratio(d, l)?;
        let (sum, diff) = if direct {
            let s = circulant_sum(&gaunt_table(d, l)?)?;
            (Cell::Float(s), Cell::Float(rel_diff(s, closed.value)))
        } else {
            (Cell::Empty, Cell::Empty)
        };
        rows.push(vec![
            Cell::Int(l.into()),
            Cell::Float(closed.g),
            Cell::Float(closed.value),
            sum,
            diff,
            Cell::Float(ratio.ratio),
        ]);
    }
    let table = Table {
        columns: vec![
            "l",
            "g",
            "closed_form",
            "direct_sum",
            "rel_diff",
            "cum4_ratio",
        ],
        rows,
    };
    write_table(cfg, &table, None)
}

fn with_degree(path: &Path, l: u32, many: bool) -> PathBuf {
    if !many {
        return path.to_path_buf();
    }
    let stem = path
        .file_stem()
        .map_or("defects".into(), |s| s.to_string_lossy().into_owned());
    let ext = path
        .extension()
        .map_or("csv".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}_l{l}.{ext}"))
}

fn mc_clt(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.d_or(2);
    let n = cfg.n.unwrap_or(1000);
    let method = match cfg.sampler.unwrap_or(SamplerArg::SpectralBasis) {
        SamplerArg::SpectralBasis => SamplerMethod::SpectralBasis,
        SamplerArg::CovarianceFactorization => SamplerMethod::CovarianceFactorization,
    };
    let config = CltConfig {
        seed: cfg.seed.unwrap_or(0),
        resolution: cfg.grid_resolution,
        method,
        workers: cfg.workers,
        variance_tol: cfg.tol.unwrap_or(1e-4),
    };
    let degrees = even_degrees(cfg)?;
    let mut rows = Vec::new();
    let mut all = Vec::new();
    for &l in &degrees {
        let r = clt_experiment(d, l, n, &config)?;
        if let Some(path) = &cfg.defects {
            let path = with_degree(path, l, degrees.len() > 1);
            let mut out = output::open(Some(&path))?;
            r.write_csv(&mut out)
                .map_err(|e| CliError::Io(e.to_string()))?;
            out.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        let g = &r.diagnostics;
        rows.push(vec![
            Cell::Int(l.into()),
            Cell::Int(n as u64),
            Cell::Int(g.resolution.into()),
            Cell::Int(g.grid_points as u64),
            Cell::Float(g.mean),
            Cell::Float(g.mean_se),
            Cell::Float(g.variance),
            Cell::Float(g.variance_se),
            Cell::Float(g.exact_variance),
            Cell::Float(g.w1),
            Cell::Float(g.ks),
        ]);
        all.push(r.diagnostics);
    }
    let table = Table {
        columns: vec![
            "l",
            "n",
            "resolution",
            "grid_points",
            "mean",
            "mean_se",
            "variance",
            "variance_se",
            "exact_variance",
            "w1",
            "ks",
        ],
        rows,
    };
    write_table(
        cfg,
        &table,
        Some(serde_json::to_value(&all).expect("diagnostics serialize")),
    )
}

fn moments(cfg: &RunConfig) -> Result<(), CliError> {
    let d = cfg.d_or(2);
    let l = single_degree(cfg)?;
    let k_max = cfg.k_max.unwrap_or(6);
    let range = match cfg.range.unwrap_or(RangeArg::Full) {
        RangeArg::Full => MomentRange::Full,
        RangeArg::Half => MomentRange::Half,
    };
    let table = moment_table(d, l, k_max, range)?;
    let rows = table
        .iter()
        .enumerate()
        .map(|(k, m)| vec![Cell::Int(k as u64), Cell::Float(*m)])
        .collect();
    write_table(
        cfg,
        &Table {
            columns: vec!["k", "moment"],
            rows,
        },
        None,
    )
}

fn facile(cfg: &RunConfig) -> Result<(), CliError> {
    let orders = cfg.orders("1:6")?;
    let top = *orders.last().expect("ranges are non-empty");
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for &q in &orders {
        for p in q..=top {
            let r = facile_check(q, p)?;
            if !r.holds() {
                failed.push((q, p));
            }
            rows.push(vec![
                Cell::Int(q.into()),
                Cell::Int(p.into()),
                Cell::Text(r.first.lhs),
                Cell::Text(r.first.rhs),
                Cell::Text(r.first.holds.to_string()),
                Cell::Text(r.second.lhs),
                Cell::Text(r.second.rhs),
                Cell::Text(r.second.holds.to_string()),
            ]);
        }
    }
    let table = Table {
        columns: vec![
            "q",
            "p",
            "first_lhs",
            "first_rhs",
            "first_holds",
            "second_lhs",
            "second_rhs",
            "second_holds",
        ],
        rows,
    };
    write_table(cfg, &table, None)?;
    if !failed.is_empty() {
        return Err(CliError::Diagnostic(format!(
            "inequalities fail at {failed:?}"
        )));
    }
    Ok(())
}

fn selftest(cfg: &RunConfig) -> Result<(), CliError> {
    let mut results = Vec::new();
    for id in 1..=10 {
        let c = acceptance::run(id);
        eprintln!("{c}");
        results.push(c);
    }
    let failed: Vec<u8> = results.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    if cfg.output.is_some() || cfg.format == Some(Format::Json) {
        write_json(cfg, &results)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Diagnostic(format!("criteria {failed:?} failed")))
    }
}
