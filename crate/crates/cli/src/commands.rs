use lapprox_core::approximation::{lambda_N, ApproxConfig, Mode};
use lapprox_core::eigenform::{
    format_coefficients, hecke_consistency_check, parse_coefficients, write_coefficients, CoefficientTable,
};
use lapprox_core::numerics::{parse_real, to_decimal, BigReal, PrecisionContext};
use lapprox_core::regularization::{default_truncation, equidist_probe, PrincipalPartSet};
use lapprox_core::zerofinder::{
    compare_zero_lists, find_zeros, local_minimum_probe, scan_sign_changes, ZSource, ZeroRecord,
};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rug::{Complex, Float};

use crate::config::RunConfig;
use crate::output::{emit, Table};
use crate::source::{cache_path, load, spec_of, with_table};
use crate::CliError;

fn context(cfg: &RunConfig) -> Result<PrecisionContext, CliError> {
    PrecisionContext::new(cfg.bits).map_err(|e| CliError::Usage(e.to_string()))
}

fn approx_config(cfg: &RunConfig) -> Result<ApproxConfig, CliError> {
    Ok(ApproxConfig::new(cfg.target_error)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .with_factors(cfg.n_factors))
}

/// "full,1,3" → [Full, Approx(1), Approx(3)]
pub fn parse_modes(s: &str) -> Result<Vec<Mode>, CliError> {
    let modes = s
        .split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .map(|m| match m {
            "full" => Ok(Mode::Full),
            other => other
                .trim_start_matches('N')
                .parse::<usize>()
                .map(Mode::Approx)
                .map_err(|_| CliError::Usage(format!("unknown mode {other:?}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if modes.is_empty() {
        return Err(CliError::Usage("at least one mode is required".into()));
    }
    Ok(modes)
}

fn mode_label(m: Mode) -> String {
    match m {
        Mode::Full => "Z".into(),
        Mode::Approx(n) => format!("Z_{n}"),
    }
}

fn grid(t_lo: f64, t_hi: f64, step: f64, prec: u32) -> Result<Vec<BigReal>, CliError> {
    if !(step > 0.0) || t_hi < t_lo {
        return Err(CliError::Usage("need step > 0 and t-hi ≥ t-lo".into()));
    }
    let n = ((t_hi - t_lo) / step + 1e-9).floor() as u64;
    let lo = parse_real(&t_lo.to_string(), prec)?;
    let h = parse_real(&step.to_string(), prec)?;
    Ok((0..=n).map(|i| Float::with_val(prec, &h * i) + &lo).collect())
}

pub fn coeffs(cfg: &RunConfig, n_max: usize) -> Result<(), CliError> {
    if n_max == 0 {
        return Err(CliError::Usage("--nmax must be positive".into()));
    }
    let loaded = load(cfg, n_max)?;
    if loaded.table.n_max() < n_max {
        return Err(CliError::Numeric(format!(
            "coefficient file holds {} coefficients, {n_max} requested",
            loaded.table.n_max()
        )));
    }
    eprintln!("cache: {:?}", loaded.cache);
    let table = loaded.table.truncated(n_max);
    let mut text = format_coefficients(&table, &loaded.spec);
    let meta = serde_json::json!({ "version": env!("CARGO_PKG_VERSION"), "config": cfg });
    text.insert_str(text.find('\n').map(|i| i + 1).unwrap_or(0), &format!("# {meta}\n"));
    emit(&text, cfg.out.as_deref())
}

pub fn zfunc(cfg: &RunConfig, t_lo: f64, t_hi: f64, step: f64, modes: &str) -> Result<(), CliError> {
    let modes = parse_modes(modes)?;
    let ctx = context(cfg)?;
    let acfg = approx_config(cfg)?;
    let ts = grid(t_lo, t_hi, step, ctx.work_prec())?;
    let (values, loaded) = with_table(cfg, 256, |l| {
        ts.par_iter()
            .map(|t| {
                modes
                    .iter()
                    .map(|&m| ZSource::new(m, &l.table, &l.spec, &acfg, &ctx).z(t))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut columns = vec!["t".to_string()];
    for &m in &modes {
        columns.push(mode_label(m));
        columns.push(format!("{}_err", mode_label(m)));
    }
    let mut table = Table::new("zfunc", cfg, columns);
    table.set("modes", modes.iter().map(Mode::to_string).collect::<Vec<_>>());
    table.set("t_lo", t_lo);
    table.set("t_hi", t_hi);
    table.set("step", step);
    table.set("n_coefficients", loaded.table.n_max());
    for (t, row) in ts.iter().zip(values) {
        let mut cells = vec![to_decimal(&ctx.round_real(t))];
        for v in row {
            cells.push(to_decimal(&v.value));
            cells.push(format!("{:e}", v.abs_err));
        }
        table.push(cells);
    }
    emit(&table.render(cfg.format)?, cfg.out.as_deref())
}

pub struct ZeroArgs {
    pub t_lo: f64,
    pub t_hi: f64,
    pub step: f64,
    pub tol: f64,
    pub modes: String,
    pub window: f64,
    pub classify: Option<u32>,
    pub probe_minima: bool,
}

fn zero_cells(z: Option<&ZeroRecord>, ctx: &PrecisionContext) -> [String; 3] {
    match z {
        Some(z) => [
            to_decimal(&ctx.round_real(&z.t)),
            format!("{:e}", z.refined_error.to_f64()),
            z.order.to_string(),
        ],
        None => Default::default(),
    }
}

pub fn zeros(cfg: &RunConfig, a: &ZeroArgs) -> Result<(), CliError> {
    let modes = parse_modes(&a.modes)?;
    let ctx = context(cfg)?;
    let acfg = approx_config(cfg)?;
    let lo = parse_real(&a.t_lo.to_string(), ctx.work_prec())?;
    let hi = parse_real(&a.t_hi.to_string(), ctx.work_prec())?;
    let ((lists, minima), loaded) = with_table(cfg, 256, |l| {
        let mut lists = Vec::new();
        let mut minima = Vec::new();
        for &m in &modes {
            let src = ZSource::new(m, &l.table, &l.spec, &acfg, &ctx);
            lists.push(find_zeros(&lo, &hi, a.step, a.tol, a.classify, &src)?);
            if a.probe_minima {
                let scan = scan_sign_changes(&lo, &hi, a.step, &src)?;
                for c in local_minimum_probe(&scan, a.tol, a.classify.unwrap_or(4), &src)? {
                    minima.push((m, c));
                }
            }
        }
        Ok((lists, minima))
    })?;

    let full = modes.iter().position(|m| *m == Mode::Full);
    let mut columns = Vec::new();
    let mut table_rows: Vec<Vec<String>> = Vec::new();
    match full {
        Some(fi) => {
            columns.extend(["t0", "t0_err", "order"].map(String::from));
            let approx: Vec<usize> = (0..modes.len()).filter(|&i| i != fi).collect();
            for &i in &approx {
                let n = match modes[i] {
                    Mode::Approx(n) => n,
                    Mode::Full => unreachable!(),
                };
                columns.extend([
                    format!("t0_{n}"),
                    format!("t0_{n}_err"),
                    format!("order_{n}"),
                    format!("t0-t0_{n}"),
                ]);
            }
            let reference: Vec<BigReal> = lists[fi].iter().map(|z| z.t.clone()).collect();
            let comparisons: Vec<_> = approx
                .iter()
                .map(|&i| {
                    let found: Vec<BigReal> = lists[i].iter().map(|z| z.t.clone()).collect();
                    compare_zero_lists(&found, &reference, a.window)
                })
                .collect();
            for z in &lists[fi] {
                let mut row = zero_cells(Some(z), &ctx).to_vec();
                for (c, &i) in comparisons.iter().zip(&approx) {
                    let hit = c
                        .rows
                        .iter()
                        .find(|r| r.reference.as_ref() == Some(&z.t) && r.found.is_some());
                    let zr = hit.and_then(|r| lists[i].iter().find(|x| Some(&x.t) == r.found.as_ref()));
                    row.extend(zero_cells(zr, &ctx));
                    // t0 − t0' is reference minus found
                    row.push(match hit.and_then(|r| r.diff.as_ref()) {
                        Some(d) => to_decimal(&ctx.round_real(&Float::with_val(d.prec(), -d))),
                        None => String::new(),
                    });
                }
                table_rows.push(row);
            }
            for (c, &i) in comparisons.iter().zip(&approx) {
                for r in c.rows.iter().filter(|r| r.reference.is_none()) {
                    let mut row = vec![String::new(); 3];
                    for &j in &approx {
                        if j == i {
                            let zr = lists[i].iter().find(|x| Some(&x.t) == r.found.as_ref());
                            row.extend(zero_cells(zr, &ctx));
                            row.push(String::new());
                        } else {
                            row.extend(vec![String::new(); 4]);
                        }
                    }
                    table_rows.push(row);
                }
            }
        }
        None => {
            for m in &modes {
                let l = mode_label(*m);
                columns.extend([format!("{l}_t0"), format!("{l}_t0_err"), format!("{l}_order")]);
            }
            let len = lists.iter().map(Vec::len).max().unwrap_or(0);
            for k in 0..len {
                table_rows.push(lists.iter().flat_map(|l| zero_cells(l.get(k), &ctx)).collect());
            }
        }
    }
    let mut table = Table::new("zeros", cfg, columns);
    table.set("modes", modes.iter().map(Mode::to_string).collect::<Vec<_>>());
    table.set("t_lo", a.t_lo);
    table.set("t_hi", a.t_hi);
    table.set("step", a.step);
    table.set("tol", a.tol);
    table.set("window", a.window);
    table.set("n_coefficients", loaded.table.n_max());
    if a.probe_minima {
        let found: Vec<_> = minima
            .iter()
            .map(|(m, c)| serde_json::json!({ "mode": m, "t": to_decimal(&ctx.round_real(&c.t)), "order": c.order }))
            .collect();
        table.set("even_order_candidates", found);
    }
    for r in table_rows {
        table.push(r);
    }
    emit(&table.render(cfg.format)?, cfg.out.as_deref())
}

pub fn oracle_check(
    cfg: &RunConfig,
    samples: usize,
    seed: u64,
    truncation: Option<f64>,
    radius: f64,
    zero_budget: bool,
) -> Result<(), CliError> {
    if samples == 0 || !(radius > 0.0) {
        return Err(CliError::Usage("need samples ≥ 1 and radius > 0".into()));
    }
    let ctx = context(cfg)?;
    let acfg = approx_config(cfg)?;
    let n = cfg.n_factors;
    let spec = crate::source::spec_of(cfg)?;
    let t_trunc = truncation.unwrap_or_else(|| default_truncation(&spec, cfg.target_error));
    let centre = spec.center();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..samples)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            (centre + r * th.cos(), r * th.sin())
        })
        .collect();
    let (results, loaded) = with_table(cfg, 256, |l| {
        let set = PrincipalPartSet::build(n, t_trunc, &l.table, &l.spec, &ctx)?;
        points
            .iter()
            .map(|&p| {
                let s = ctx.complex(p);
                let reg = set.lambda_n(&s, &ctx)?;
                let ser = lambda_N(&s, &l.table, &l.spec, &acfg, &ctx)?;
                Ok((reg, ser))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let columns = [
        "s_re",
        "s_im",
        "regularized_re",
        "regularized_im",
        "series_re",
        "series_im",
        "difference",
        "budget",
        "pass",
    ]
    .map(String::from)
    .to_vec();
    let mut table = Table::new("oracle-check", cfg, columns);
    let mut worst: f64 = 0.0;
    let mut all_pass = true;
    let mut rows = Vec::new();
    for (&(x, y), (reg, ser)) in points.iter().zip(&results) {
        let diff = Complex::with_val(ctx.work_prec(), &reg.value - &ser.value);
        let d = Float::with_val(64, diff.abs_ref()).to_f64();
        let budget = if zero_budget { 0.0 } else { reg.abs_err + ser.abs_err };
        let pass = d <= budget;
        all_pass &= pass;
        worst = worst.max(if budget > 0.0 { d / budget } else { f64::INFINITY });
        rows.push(vec![
            format!("{x}"),
            format!("{y}"),
            to_decimal(&ctx.round_real(reg.value.real())),
            to_decimal(&ctx.round_real(reg.value.imag())),
            to_decimal(&ctx.round_real(ser.value.real())),
            to_decimal(&ctx.round_real(ser.value.imag())),
            format!("{d:e}"),
            format!("{budget:e}"),
            pass.to_string(),
        ]);
    }
    table.set("N", n);
    table.set("truncation", t_trunc);
    table.set("samples", samples);
    table.set("seed", seed);
    table.set("radius", radius);
    table.set("n_coefficients", loaded.table.n_max());
    table.set("max_difference_over_budget", worst);
    table.set("verdict", if all_pass { "PASS" } else { "FAIL" });
    for r in rows {
        table.push(r);
    }
    emit(&table.render(cfg.format)?, cfg.out.as_deref())?;
    if all_pass {
        eprintln!("oracle check: PASS");
        Ok(())
    } else {
        Err(CliError::Numeric(
            "oracle check: FAIL (difference above the combined budget)".into(),
        ))
    }
}

pub fn equidist(cfg: &RunConfig, p: u64, q: u64, m: u64) -> Result<(), CliError> {
    let ctx = context(cfg)?;
    let r = equidist_probe(p, q, m, &ctx)?;
    let columns = [
        "p",
        "q",
        "M",
        "min_scaled",
        "argmin",
        "min_scaled_nearest",
        "argmin_nearest",
        "discrepancy",
    ]
    .map(String::from)
    .to_vec();
    let mut table = Table::new("equidist", cfg, columns);
    table.push(vec![
        r.p.to_string(),
        r.q.to_string(),
        r.m.to_string(),
        format!("{:e}", r.min_scaled),
        r.argmin.to_string(),
        format!("{:e}", r.min_scaled_nearest),
        r.argmin_nearest.to_string(),
        format!("{:e}", r.discrepancy),
    ]);
    emit(&table.render(cfg.format)?, cfg.out.as_deref())
}

/// Reads a fetched body: either the "n value" coefficient format or a
/// bracketed q-expansion list [a_0, a_1, ...] / [a_1, a_2, ...].
pub fn parse_fetched(body: &str) -> Result<CoefficientTable, CliError> {
    let trimmed = body.trim();
    let Some(inner) = trimmed.strip_prefix('[').and_then(|r| r.strip_suffix(']')) else {
        return parse_coefficients(body).map_err(CliError::from);
    };
    let mut vals: Vec<&str> = inner.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    if vals.len() > 1 && vals[0] == "0" {
        vals.remove(0);
    }
    let text: String = vals
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{} {v}\n", i + 1))
        .collect();
    parse_coefficients(&text).map_err(CliError::from)
}

pub fn fetch(cfg: &RunConfig, url: &str, n_max: Option<usize>) -> Result<(), CliError> {
    let spec = spec_of(cfg)?;
    let body = ureq::get(url)
        .call()
        .map_err(|e| CliError::Io(format!("{url}: {e}")))?
        .into_string()
        .map_err(|e| CliError::Io(format!("{url}: {e}")))?;
    let mut table = parse_fetched(&body)?;
    if let Some(n) = n_max {
        if table.n_max() < n {
            return Err(CliError::Numeric(format!(
                "{url} holds {} coefficients, {n} requested",
                table.n_max()
            )));
        }
        table = table.truncated(n);
    }
    let report = hecke_consistency_check(&table, &spec);
    if !report.is_empty() {
        return Err(CliError::Numeric(format!(
            "fetched coefficients fail the Hecke relations: {} multiplicative, {} prime-power, {} Petersson",
            report.multiplicative.len(),
            report.prime_power.len(),
            report.petersson.len()
        )));
    }
    let path = cfg.out.clone().unwrap_or_else(|| cache_path(cfg, "fetched"));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    write_coefficients(&path, &table, &spec).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    eprintln!("fetched {} coefficients into {}", table.n_max(), path.display());
    Ok(())
}
