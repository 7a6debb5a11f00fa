use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use log::info;
use serde_json::json;

use qwalk_core::ingest::{daily_returns, parse_ohlc_csv, ReturnKind};
use qwalk_core::objective::{loss_report, total_variation, KL_EPSILON};
use qwalk_core::pricing::{black_scholes_call, call_payoff_expectation};
use qwalk_core::targets::{
    binomial_target, histogram_from_returns, lognormal_target, PricingParams,
};
use qwalk_core::walk::{dtqw_distribution, min_dtqw_qubits, run_multi_ssqw};
use qwalk_core::{fit, FitSettings, MultiSsqwConfig, OptimizerOptions, TargetDistribution};

use crate::args::{
    DtqwArgs, FitArgs, FitBinomialArgs, FitLognormalArgs, FitReturnsArgs, MarketArgs,
    PriceCallArgs, ReplayArgs, RunCommand,
};
use crate::artifacts::ArtifactSet;
use crate::plot::{bar_chart_ascii, bar_chart_svg, log_line_svg, trace_ascii, Series};
use crate::report::*;
use crate::{CliError, CliResult};

/// A finished run held in memory: artifacts, resolved settings, and what to
/// print on the terminal.
struct Rendered {
    artifacts: ArtifactSet,
    resolved: serde_json::Value,
    summary: Vec<String>,
    ascii: Vec<String>,
}

pub fn execute(cmd: &RunCommand, seed: u64, out: &Path, ascii: bool) -> CliResult<()> {
    let rendered = render(cmd, seed)?;
    let artifacts = finish(cmd, seed, rendered, ascii)?;
    commit(&artifacts, out)
}

pub fn replay(args: &ReplayArgs, out: &Path, ascii: bool) -> CliResult<()> {
    let text = fs::read_to_string(&args.manifest)
        .with_context(|| format!("reading {}", args.manifest.display()))
        .map_err(CliError::validation)?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.manifest.display()))
        .map_err(CliError::validation)?;
    info!(
        "replaying {} with seed {}",
        manifest.run.name(),
        manifest.seed
    );
    let rendered = render(&manifest.run, manifest.seed)?;
    let artifacts = finish(&manifest.run, manifest.seed, rendered, ascii)?;

    if args.verify {
        let base = args.manifest.parent().unwrap_or(Path::new("."));
        for name in manifest.artifacts.iter().filter(|n| is_reproducible(n)) {
            let stored = fs::read(base.join(name))
                .with_context(|| format!("reading stored {name}"))
                .map_err(CliError::validation)?;
            if artifacts.get(name) != Some(stored.as_slice()) {
                return Err(CliError::internal(anyhow!(
                    "{name} differs from the recorded run"
                )));
            }
        }
        println!("replay matches the recorded JSON artifacts");
    }
    commit(&artifacts, out)
}

/// JSON artifacts other than the timing report must reproduce exactly.
pub fn is_reproducible(name: &str) -> bool {
    name.ends_with(".json") && name != TIMING_FILE
}

fn commit(artifacts: &ArtifactSet, out: &Path) -> CliResult<()> {
    let written = artifacts.commit(out)?;
    println!("wrote {} files to {}", written.len(), out.display());
    Ok(())
}

/// Adds the manifest and prints the summary.
fn finish(cmd: &RunCommand, seed: u64, rendered: Rendered, ascii: bool) -> CliResult<ArtifactSet> {
    let Rendered {
        mut artifacts,
        resolved,
        summary,
        ascii: ascii_plots,
    } = rendered;
    let mut names = artifacts.names();
    names.push(MANIFEST_FILE.to_string());
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        run: cmd.clone(),
        resolved,
        artifacts: names,
    };
    artifacts.add_json(MANIFEST_FILE, &manifest)?;
    for line in summary {
        println!("{line}");
    }
    if ascii {
        for plot in ascii_plots {
            println!("\n{plot}");
        }
    }
    Ok(artifacts)
}

fn render(cmd: &RunCommand, seed: u64) -> CliResult<Rendered> {
    match cmd {
        RunCommand::FitReturns(a) => fit_returns(a, seed),
        RunCommand::FitBinomial(a) => fit_binomial(a, seed),
        RunCommand::FitLognormal(a) => fit_lognormal(a, seed),
        RunCommand::PriceCall(a) => price_call(a),
        RunCommand::DtqwDemo(a) => dtqw_demo(a),
    }
}

fn fit_returns(a: &FitReturnsArgs, seed: u64) -> CliResult<Rendered> {
    let file = fs::File::open(&a.csv)
        .with_context(|| format!("opening {}", a.csv.display()))
        .map_err(CliError::validation)?;
    let parsed = parse_ohlc_csv(file)?;
    if parsed.skipped_rows > 0 {
        log::warn!("skipped {} rows without a close price", parsed.skipped_rows);
    }
    let kind = if a.log_returns {
        ReturnKind::Log
    } else {
        ReturnKind::Simple
    };
    let returns = daily_returns(&parsed.series, kind)?;
    let target = histogram_from_returns(&returns, a.bins)?;
    let mut r = fit_target("fit-returns", &target, &a.fit, seed, "daily return (%)")?.rendered;
    r.resolved["closes"] = json!(parsed.series.len());
    r.resolved["skipped_rows"] = json!(parsed.skipped_rows);
    Ok(r)
}

fn fit_binomial(a: &FitBinomialArgs, seed: u64) -> CliResult<Rendered> {
    let qubits = (a.n + 1).next_power_of_two().trailing_zeros() as usize;
    let target = binomial_target(a.n, a.p, qubits.max(1))?;
    Ok(fit_target("fit-binomial", &target, &a.fit, seed, "successes")?.rendered)
}

fn pricing_params(m: &MarketArgs) -> CliResult<PricingParams> {
    Ok(PricingParams::new(
        m.spot,
        m.strike,
        m.rate,
        m.vol,
        m.maturity_days,
    )?)
}

fn payoffs(
    m: &MarketArgs,
    pp: &PricingParams,
    target: &TargetDistribution,
    trained: Option<&TargetDistribution>,
) -> CliResult<PayoffReport> {
    let discount = m.discount.then_some((m.rate, m.maturity_days));
    let targeted = call_payoff_expectation(target, m.strike, discount)?;
    let trained = trained
        .map(|t| call_payoff_expectation(t, m.strike, discount))
        .transpose()?;
    let bs = black_scholes_call(pp)?;
    Ok(PayoffReport {
        strike: m.strike,
        discounted: m.discount,
        targeted_payoff: targeted,
        trained_payoff: trained,
        absolute_gap: trained.map(|t| (t - targeted).abs()),
        black_scholes: if m.discount {
            bs
        } else {
            bs * (m.rate * pp.year_fraction()).exp()
        },
        forward: pp.forward(),
    })
}

fn fit_lognormal(a: &FitLognormalArgs, seed: u64) -> CliResult<Rendered> {
    let pp = pricing_params(&a.market)?;
    let target = lognormal_target(&pp, a.market.qubits, a.market.truncation)?;
    let mut r = fit_target("fit-lognormal", &target, &a.fit, seed, "price")?;
    let trained = target.with_probs("trained", r.trained_probs.clone())?;
    let report = payoffs(&a.market, &pp, &target, Some(&trained))?;
    r.rendered.summary.push(format!(
        "payoff: targeted {:.5}, trained {:.5}, Black-Scholes {:.5}",
        report.targeted_payoff,
        report.trained_payoff.unwrap_or(f64::NAN),
        report.black_scholes
    ));
    r.rendered.artifacts.add_json(PAYOFFS_FILE, &report)?;
    Ok(r.rendered)
}

fn price_call(a: &PriceCallArgs) -> CliResult<Rendered> {
    let m = &a.market;
    let pp = pricing_params(m)?;
    let target = lognormal_target(&pp, m.qubits, m.truncation)?;
    let report = payoffs(m, &pp, &target, None)?;
    let labels = price_labels(&target);
    let mut artifacts = ArtifactSet::default();
    artifacts.add_json(PAYOFFS_FILE, &report)?;
    artifacts.add_json(TARGET_FILE, &target)?;
    let series = [Series {
        name: "target",
        values: &target.probs,
    }];
    artifacts.add_text(
        DIST_SVG,
        bar_chart_svg("Discretized terminal price law", "price", &labels, &series),
    );
    Ok(Rendered {
        artifacts,
        resolved: json!({ "position_qubits": m.qubits, "year_fraction": pp.year_fraction() }),
        summary: vec![format!(
            "payoff: grid {:.5}, Black-Scholes {:.5}",
            report.targeted_payoff, report.black_scholes
        )],
        ascii: vec![bar_chart_ascii("terminal price law", &labels, &series)],
    })
}

fn dtqw_demo(a: &DtqwArgs) -> CliResult<Rendered> {
    let qubits = a.qubits.unwrap_or_else(|| min_dtqw_qubits(a.steps));
    let probs = dtqw_distribution(a.coin.into(), a.init.into(), a.steps, qubits)?;
    let start = 1usize << (qubits - 1);
    let offsets: Vec<i64> = (0..probs.len()).map(|x| x as i64 - start as i64).collect();
    let coin = format!("{:?}", a.coin);
    let init = format!("{:?}", a.init).to_lowercase();
    let labels: Vec<String> = offsets.iter().map(|o| o.to_string()).collect();
    let series = [Series {
        name: "probability",
        values: &probs,
    }];
    let title = format!("DTQW, {coin} coin, {init} start, {} steps", a.steps);
    let report = DtqwReport {
        coin,
        init,
        steps: a.steps,
        position_qubits: qubits,
        start,
        offsets,
        probs: probs.clone(),
    };
    let mut artifacts = ArtifactSet::default();
    artifacts.add_json(DTQW_FILE, &report)?;
    artifacts.add_text(
        DTQW_SVG,
        bar_chart_svg(&title, "offset from start", &labels, &series),
    );
    let spread: f64 = report
        .offsets
        .iter()
        .zip(&probs)
        .map(|(o, p)| p * (*o as f64).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(Rendered {
        artifacts,
        resolved: json!({ "position_qubits": qubits, "start": start }),
        summary: vec![format!("{title}: rms displacement {spread:.4}")],
        ascii: vec![bar_chart_ascii(&title, &labels, &series)],
    })
}

struct FitRendered {
    rendered: Rendered,
    trained_probs: Vec<f64>,
}

fn price_labels(target: &TargetDistribution) -> Vec<String> {
    target
        .bin_labels
        .iter()
        .map(|l| format!("{l:.2}"))
        .collect()
}

fn fit_target(
    subcommand: &str,
    target: &TargetDistribution,
    a: &FitArgs,
    seed: u64,
    x_label: &str,
) -> CliResult<FitRendered> {
    let config = MultiSsqwConfig::new(
        target.position_qubits(),
        a.num,
        a.step,
        a.initial_position.unwrap_or_else(|| target.mode()),
    )?;
    let settings = FitSettings {
        restarts: a.restarts,
        seed,
        optimizer: OptimizerOptions {
            initial_trust_radius: a.rho_begin,
            final_trust_radius: a.rho_end,
            max_evaluations: a.max_evaluations,
        },
        kl_weight: a.kl_weight,
    };
    info!(
        "{subcommand}: N={} num={} step={} restarts={} seed={seed}",
        config.position_qubits, config.num_walkers, config.steps, settings.restarts
    );
    let started = Instant::now();
    let result = fit(&config, target, &settings)?;
    let total = started.elapsed();

    let trained_probs = run_multi_ssqw(&config, &result.best_params)?;
    let loss = loss_report(
        &target.probs,
        &trained_probs,
        settings.kl_weight,
        KL_EPSILON,
    )?;
    let tv = total_variation(&target.probs, &trained_probs)?;
    let boxplot = BoxplotSummary::from_values(&result.restart_final_losses)
        .ok_or_else(|| CliError::internal(anyhow!("no successful restart")))?;
    let restart_seconds: Vec<f64> = result
        .restart_wall_times
        .iter()
        .map(|d| d.as_secs_f64())
        .collect();
    let timing = TimingReport {
        threads: rayon::current_num_threads(),
        total_seconds: total.as_secs_f64(),
        mean_restart_seconds: restart_seconds.iter().sum::<f64>()
            / restart_seconds.len().max(1) as f64,
        restart_seconds,
    };

    let labels: Vec<String> = match target.kind {
        qwalk_core::LabelKind::TrialCount => {
            target.bin_labels.iter().map(|l| format!("{l}")).collect()
        }
        _ => price_labels(target),
    };
    let series = [
        Series {
            name: "target",
            values: &target.probs,
        },
        Series {
            name: "trained",
            values: &trained_probs,
        },
    ];
    let dist_title = format!(
        "{} (num = {}, step = {})",
        target.name, config.num_walkers, config.steps
    );
    let trace_title = format!("Best-so-far loss, restart {}", result.best_restart);

    let mut artifacts = ArtifactSet::default();
    let summary = vec![
        format!(
            "{subcommand}: best loss {:.6e} (mse {:.3e}, kl {:.3e}) at restart {}",
            loss.combined, loss.mse, loss.kl, result.best_restart
        ),
        format!("total variation distance {tv:.5}"),
        format!(
            "restart losses: min {:.4e} median {:.4e} max {:.4e}; {} failed; {:.2} s",
            boxplot.min,
            boxplot.median,
            boxplot.max,
            result.failed_restarts.len(),
            timing.total_seconds
        ),
    ];
    let ascii = vec![
        bar_chart_ascii(&dist_title, &labels, &series),
        trace_ascii(&trace_title, &result.best_trace),
    ];
    artifacts.add_text(
        DIST_SVG,
        bar_chart_svg(&dist_title, x_label, &labels, &series),
    );
    artifacts.add_text(
        TRACE_SVG,
        log_line_svg(&trace_title, "evaluation", "loss", &result.best_trace),
    );
    let resolved = json!({
        "config": config,
        "settings": settings,
        "target_name": target.name,
    });
    let report = FitReport {
        subcommand: subcommand.to_string(),
        config,
        settings,
        target: target.clone(),
        trained: TrainedDistribution {
            probs: trained_probs.clone(),
            bin_labels: target.bin_labels.clone(),
            loss,
            total_variation: tv,
        },
        fit: result,
    };
    artifacts.add_json(RESULT_FILE, &report)?;
    artifacts.add_json(BOXPLOT_FILE, &boxplot)?;
    artifacts.add_json(TIMING_FILE, &timing)?;
    Ok(FitRendered {
        rendered: Rendered {
            artifacts,
            resolved,
            summary,
            ascii,
        },
        trained_probs,
    })
}
