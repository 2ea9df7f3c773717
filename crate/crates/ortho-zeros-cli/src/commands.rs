//! Subcommand execution. Every mode computes its artifacts fully in
//! memory and writes them only on success, so a failed run leaves no
//! partial output files.

use ortho_zeros::kacrice::{self, KacDomain};
use ortho_zeros::measure::MeasureSpec;
use ortho_zeros::orthopoly::{self, RecurrenceTable};
use ortho_zeros::{equilibrium, kernels, montecarlo};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{normalize, resolve_measure, Cli, CliError, ExperimentConfig};
use crate::output::{fmt_f, linspace, prepare_out_dir, write_files, Csv};

#[derive(Serialize)]
struct Summary<'a> {
    mode: &'a str,
    version: &'a str,
    measure: &'a str,
    n_values: &'a [usize],
    interval: Option<[f64; 2]>,
    trials: Option<usize>,
    sigma: Option<f64>,
    seed: u64,
    rel_tol: f64,
    results: Value,
    artifacts: Vec<String>,
}

struct ModeOutput {
    results: Value,
    files: Vec<(String, String)>,
    interval: Option<[f64; 2]>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mode = cli.command.mode();
    let args = cli.command.args();
    let config = normalize(mode, args)?;
    if args.dump_config {
        let text = serde_json::to_string_pretty(&config).expect("config serializes");
        println!("{text}");
        return Ok(());
    }
    if let Some(k) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .ok();
    }
    prepare_out_dir(&config.out)?;
    let output = match config.mode.as_str() {
        "expected-zeros" => expected_zeros(&config)?,
        "monte-carlo" => monte_carlo(&config)?,
        "universality" => universality(&config)?,
        "equilibrium" => equilibrium_cmd(&config)?,
        "kac" => kac(&config)?,
        "compare" => compare(&config)?,
        other => unreachable!("unknown mode {other}"),
    };

    let uses_sampling = matches!(config.mode.as_str(), "monte-carlo" | "compare");
    let mut artifacts: Vec<String> = output.files.iter().map(|(n, _)| n.clone()).collect();
    artifacts.push("summary.json".to_string());
    let summary = Summary {
        mode: &config.mode,
        version: ortho_zeros::VERSION,
        measure: &config.measure,
        n_values: &config.n_values,
        interval: output.interval,
        trials: uses_sampling.then_some(config.trials),
        sigma: uses_sampling.then_some(config.sigma),
        seed: config.seed,
        rel_tol: config.rel_tol,
        results: output.results,
        artifacts,
    };
    let mut files = output.files;
    let summary_text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    files.push(("summary.json".to_string(), summary_text + "\n"));
    write_files(&config.out, &files)?;
    eprintln!(
        "ortho-zeros {} mode={} seed={} -> {}",
        ortho_zeros::VERSION,
        config.mode,
        config.seed,
        config.out.display()
    );
    Ok(())
}

fn build_table(spec: &MeasureSpec, n_max: usize) -> Result<RecurrenceTable, CliError> {
    orthopoly::recurrence(spec, n_max).map_err(CliError::from)
}

fn expected_zeros(config: &ExperimentConfig) -> Result<ModeOutput, CliError> {
    let spec = resolve_measure(&config.measure)?;
    let n_max = *config.n_values.last().expect("validated nonempty");
    let table = build_table(&spec, n_max)?;
    let interval = config.interval.unwrap_or_else(|| spec.support_bounds());
    let mut csv = Csv::new(&[
        "n",
        "interval_lo",
        "interval_hi",
        "value",
        "value_over_n",
        "est_error",
        "panels",
    ]);
    let mut rows = Vec::new();
    for &n in &config.n_values {
        let r =
            kacrice::expected_zeros_orthopoly(&table, &spec, interval, n, config.rel_tol, true)?;
        let over_n = r.value / n as f64;
        csv.row(&[
            n.to_string(),
            fmt_f(interval.0),
            fmt_f(interval.1),
            fmt_f(r.value),
            fmt_f(over_n),
            fmt_f(r.est_error),
            r.panels_used.to_string(),
        ]);
        rows.push(json!({
            "n": n,
            "value": r.value,
            "value_over_n": over_n,
            "est_error": r.est_error,
            "panels": r.panels_used,
        }));
    }
    let mut files = vec![("expected_zeros.csv".to_string(), csv.into_string())];
    if config.dump_recurrence {
        files.push(("recurrence.csv".to_string(), table.to_csv()));
    }
    Ok(ModeOutput {
        results: json!({ "rows": rows }),
        files,
        interval: Some([interval.0, interval.1]),
    })
}

fn monte_carlo(config: &ExperimentConfig) -> Result<ModeOutput, CliError> {
    let spec = resolve_measure(&config.measure)?;
    let n = config.n_values[0];
    let table = build_table(&spec, n)?;
    let window = config.interval.unwrap_or_else(|| spec.support_bounds());
    let (mut stats, records) = montecarlo::run_experiment(
        &table,
        n,
        config.trials,
        window,
        config.sigma,
        config.seed,
    )?;
    let edges = linspace(window.0, window.1, config.bins + 1);
    let hist = montecarlo::zero_histogram(&records, n, &edges)?;
    stats.histogram = hist.clone();

    let nu = equilibrium::build(spec.support()).ok();
    let mut csv = Csv::new(&["bin_lo", "bin_hi", "empirical_mass", "nu_mass"]);
    for bin in &hist {
        let nu_mass = nu
            .as_ref()
            .map(|em| fmt_f(em.mass((bin.lo, bin.hi))))
            .unwrap_or_default();
        csv.row(&[fmt_f(bin.lo), fmt_f(bin.hi), fmt_f(bin.mass), nu_mass]);
    }
    let mut files = vec![("histogram.csv".to_string(), csv.into_string())];
    if config.dump_trials {
        let mut trials_csv = Csv::new(&["trial_id", "count_in_window"]);
        for r in &records {
            trials_csv.row(&[r.trial_id.to_string(), r.count_in_window.to_string()]);
        }
        files.push(("trials.csv".to_string(), trials_csv.into_string()));
    }
    Ok(ModeOutput {
        results: json!({
            "mean_count": stats.mean_count,
            "std_error": stats.std_error,
        }),
        files,
        interval: Some([window.0, window.1]),
    })
}

fn universality(config: &ExperimentConfig) -> Result<ModeOutput, CliError> {
    let spec = resolve_measure(&config.measure)?;
    let n_max = *config.n_values.last().expect("validated nonempty");
    let table = build_table(&spec, n_max)?;
    let mut csv = Csv::new(&[
        "n",
        "x",
        "ratio_01",
        "target_01",
        "dev_01",
        "ratio_11",
        "target_11",
        "dev_11",
    ]);
    let mut rows = Vec::new();
    for &n in &config.n_values {
        let ratios = kernels::universality_ratios(&table, &spec, config.x, n, &[(0, 1), (1, 1)])?;
        let (r01, t01) = ratios[0];
        let (r11, t11) = ratios[1];
        let dev01 = (r01 - t01).abs();
        let dev11 = (r11 / t11 - 1.0).abs();
        csv.row(&[
            n.to_string(),
            fmt_f(config.x),
            fmt_f(r01),
            fmt_f(t01),
            fmt_f(dev01),
            fmt_f(r11),
            fmt_f(t11),
            fmt_f(dev11),
        ]);
        rows.push(json!({
            "n": n,
            "ratio_01": r01,
            "dev_01": dev01,
            "ratio_11": r11,
            "dev_11": dev11,
        }));
    }
    Ok(ModeOutput {
        results: json!({ "x": config.x, "rows": rows }),
        files: vec![("universality.csv".to_string(), csv.into_string())],
        interval: None,
    })
}

fn equilibrium_cmd(config: &ExperimentConfig) -> Result<ModeOutput, CliError> {
    let spec = resolve_measure(&config.measure)?;
    let interval = config.interval.unwrap_or_else(|| spec.support_bounds());
    let em = match equilibrium::build(spec.support()) {
        Ok(em) => Some(em),
        Err(e) if config.approximate => {
            // no closed form; the Christoffel route below still applies
            let _ = e;
            None
        }
        Err(e) => return Err(e.into()),
    };
    let approx = if config.approximate {
        let n = *config.n_values.last().expect("validated nonempty");
        let table = build_table(&spec, n)?;
        Some((table, n))
    } else {
        None
    };

    let header: &[&str] = if approx.is_some() {
        &["bin_lo", "bin_hi", "nu_mass", "approx_mass"]
    } else {
        &["bin_lo", "bin_hi", "nu_mass"]
    };
    let mut csv = Csv::new(header);
    let edges = linspace(interval.0, interval.1, config.bins + 1);
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let nu_mass = em.map(|m| fmt_f(m.mass((lo, hi)))).unwrap_or_default();
        if let Some((table, n)) = &approx {
            let am = equilibrium::approximate_mass(table, &spec, (lo, hi), *n, config.rel_tol)?;
            csv.row(&[fmt_f(lo), fmt_f(hi), nu_mass, fmt_f(am)]);
        } else {
            csv.row(&[fmt_f(lo), fmt_f(hi), nu_mass]);
        }
    }

    let class = em.map(|m| match m.class() {
        equilibrium::SupportClass::SingleInterval { .. } => "single-interval",
        equilibrium::SupportClass::SymmetricPair { .. } => "symmetric-pair",
    });
    let interval_mass = em.map(|m| m.mass(interval));
    let approx_interval_mass = match &approx {
        Some((table, n)) => Some(equilibrium::approximate_mass(
            table,
            &spec,
            interval,
            *n,
            config.rel_tol,
        )?),
        None => None,
    };
    Ok(ModeOutput {
        results: json!({
            "class": class,
            "capacity": em.map(|m| m.capacity()),
            "interval_mass": interval_mass,
            "approximate": config.approximate,
            "approx_interval_mass": approx_interval_mass,
        }),
        files: vec![("equilibrium.csv".to_string(), csv.into_string())],
        interval: Some([interval.0, interval.1]),
    })
}

fn kac(config: &ExperimentConfig) -> Result<ModeOutput, CliError> {
    let domain = match config.interval {
        Some((a, b)) => KacDomain::Interval(a, b),
        None => KacDomain::FullLine,
    };
    let mut csv = Csv::new(&["n", "value", "est_error", "log_law_ratio"]);
    let mut rows = Vec::new();
    for &n in &config.n_values {
        let r = kacrice::expected_zeros_kac_monomial(n, domain, config.rel_tol)?;
        let ratio = if n >= 2 {
            r.value / (std::f64::consts::FRAC_2_PI * (n as f64).ln())
        } else {
            f64::NAN
        };
        csv.row(&[
            n.to_string(),
            fmt_f(r.value),
            fmt_f(r.est_error),
            fmt_f(ratio),
        ]);
        rows.push(json!({
            "n": n,
            "value": r.value,
            "est_error": r.est_error,
            "log_law_ratio": if ratio.is_nan() { Value::Null } else { json!(ratio) },
        }));
    }
    Ok(ModeOutput {
        results: json!({ "rows": rows }),
        files: vec![("kac.csv".to_string(), csv.into_string())],
        interval: config.interval.map(|(a, b)| [a, b]),
    })
}

fn compare(config: &ExperimentConfig) -> Result<ModeOutput, CliError> {
    let spec = resolve_measure(&config.measure)?;
    let n = config.n_values[0];
    let table = build_table(&spec, n)?;
    let window = config.interval.unwrap_or_else(|| spec.support_bounds());
    let kr = kacrice::expected_zeros_orthopoly(&table, &spec, window, n, config.rel_tol, true)?;
    let (stats, _) = montecarlo::run_experiment(
        &table,
        n,
        config.trials,
        window,
        config.sigma,
        config.seed,
    )?;
    let abs_diff = (stats.mean_count - kr.value).abs();
    let sigmas = if stats.std_error > 0.0 {
        abs_diff / stats.std_error
    } else {
        f64::NAN
    };
    let within = abs_diff <= 3.0 * stats.std_error;
    let mut csv = Csv::new(&[
        "n",
        "window_lo",
        "window_hi",
        "quadrature_value",
        "quadrature_est_error",
        "mc_mean",
        "mc_std_error",
        "abs_diff",
        "diff_over_std_error",
    ]);
    csv.row(&[
        n.to_string(),
        fmt_f(window.0),
        fmt_f(window.1),
        fmt_f(kr.value),
        fmt_f(kr.est_error),
        fmt_f(stats.mean_count),
        fmt_f(stats.std_error),
        fmt_f(abs_diff),
        fmt_f(sigmas),
    ]);
    Ok(ModeOutput {
        results: json!({
            "quadrature_value": kr.value,
            "mc_mean": stats.mean_count,
            "mc_std_error": stats.std_error,
            "abs_diff": abs_diff,
            "within_3_sigma": within,
        }),
        files: vec![("compare.csv".to_string(), csv.into_string())],
        interval: Some([window.0, window.1]),
    })
}
