//! Experiment front end behind the `netlpi` binary.
//!
//! Every command reads an [`ExperimentConfig`] and writes plain files into an
//! output directory. Metric CSVs are reproducible byte for byte; wall-clock
//! numbers go to separate `timing.txt` files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{EnvironmentConfig, ExperimentConfig, SweepPoint};
use crate::decay::{
    c_matrix, closure_constants, decay_check, kappa_gap_bound, matrix_csv, optimal_policy_exponent,
    policy_interaction, q_interaction, second_order_interaction, truncation_error, DEFAULT_DIAGNOSTIC_CAP,
};
use crate::error::{Error, Result};
use crate::exact::{
    all_local_q, global_q, objective, objective_from_values, optimal_value, values_csv, ExactModel,
};
use crate::lpi::{lpi_run, EvaluatorKind, ExactOracleEvaluator, PolicyEvaluator, RunMetrics, TdEvaluator};
use crate::mdp::FactoredMdp;
use crate::policy::{read_policy, truncate_policy, uniform_policy, write_policy, JointPolicy};
use crate::td::make_schedule;
use crate::truncated::{point_mass_truncation, write_qtables};

pub const RUN_SCHEMA: &str = "netlpi-run/v1";
pub const AGGREGATE_SCHEMA: &str = "netlpi-aggregate/v1";
pub const SUMMARY_SCHEMA: &str = "netlpi-sweep-summary/v1";
pub const GAP_SCHEMA: &str = "netlpi-kappa-gap/v1";
pub const TRUNCATION_SCHEMA: &str = "netlpi-truncation/v1";

/// Command-line adjustments applied on top of a loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub cap: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            cfg.lpi.seed = seed;
            cfg.sweep.seeds = vec![seed];
        }
        if let Some(cap) = self.cap {
            cfg.oracle.cap = cap;
        }
    }
}

/// Linear-interpolation quantile of an already sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn run_csv(metrics: &RunMetrics) -> String {
    let mut out = format!("# schema: {RUN_SCHEMA}\n");
    let _ = writeln!(out, "# evaluator: {}", metrics.evaluator);
    out.push_str("iteration,regularized_return,sigma,exact_objective,optimality_gap\n");
    for r in &metrics.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.iteration,
            r.regularized_return,
            r.sigma,
            opt(r.exact_objective),
            opt(r.optimality_gap)
        );
    }
    out
}

/// Per-iteration median and quartiles of the return across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub iteration: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub sigma_max: f64,
    pub gap_median: Option<f64>,
}

pub fn aggregate(runs: &[RunMetrics]) -> Vec<AggregateRow> {
    let len = runs.iter().map(|r| r.rows.len()).min().unwrap_or(0);
    (0..len)
        .map(|k| {
            let returns = sorted(runs.iter().map(|r| r.rows[k].regularized_return).collect());
            let gaps: Option<Vec<f64>> = runs.iter().map(|r| r.rows[k].optimality_gap).collect();
            AggregateRow {
                iteration: runs[0].rows[k].iteration,
                median: quantile(&returns, 0.5),
                q25: quantile(&returns, 0.25),
                q75: quantile(&returns, 0.75),
                sigma_max: runs.iter().map(|r| r.rows[k].sigma).fold(0.0, f64::max),
                gap_median: gaps.map(|g| quantile(&sorted(g), 0.5)),
            }
        })
        .collect()
}

pub fn aggregate_csv(label: &str, rows: &[AggregateRow]) -> String {
    let mut out = format!("# schema: {AGGREGATE_SCHEMA}\n# label: {label}\n");
    out.push_str("iteration,return_median,return_q25,return_q75,sigma_max,gap_median\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.iteration,
            r.median,
            r.q25,
            r.q75,
            r.sigma_max,
            opt(r.gap_median)
        );
    }
    out
}

/// Parses an aggregate CSV back into its label and rows.
pub fn parse_aggregate_csv(text: &str) -> Result<(String, Vec<AggregateRow>)> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(&format!("# schema: {AGGREGATE_SCHEMA}")) {
        return Err(Error::Parse(format!("expected schema {AGGREGATE_SCHEMA}")));
    }
    let label = lines
        .next()
        .and_then(|l| l.strip_prefix("# label: "))
        .ok_or_else(|| Error::Parse("missing label line".into()))?
        .to_string();
    if lines.next() != Some("iteration,return_median,return_q25,return_q75,sigma_max,gap_median") {
        return Err(Error::Parse("unexpected aggregate header".into()));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}")));
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(Error::Parse(format!("aggregate row has {} fields", f.len())));
            }
            Ok(AggregateRow {
                iteration: f[0].parse().map_err(|_| Error::Parse(format!("bad iteration {:?}", f[0])))?,
                median: num(f[1])?,
                q25: num(f[2])?,
                q75: num(f[3])?,
                sigma_max: num(f[4])?,
                gap_median: if f[5].is_empty() { None } else { Some(num(f[5])?) },
            })
        })
        .collect::<Result<_>>()?;
    Ok((label, rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub label: String,
    pub point: SweepPoint,
    pub rows: Vec<AggregateRow>,
}

impl PointSummary {
    pub fn last(&self) -> &AggregateRow {
        self.rows.last().expect("at least the iteration-0 row")
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn base_dir(config_path: &Path) -> PathBuf {
    config_path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn build_env(cfg: &ExperimentConfig, base: &Path, point: Option<&SweepPoint>) -> Result<FactoredMdp> {
    cfg.environment
        .build(base, point.and_then(|p| p.n), point.and_then(|p| p.tau))
}

fn manifest(cfg: &ExperimentConfig, command: &str) -> Result<String> {
    let mut out = format!(
        "# netlpi {} manifest, command {command}\n",
        env!("CARGO_PKG_VERSION")
    );
    if let EnvironmentConfig::Spreading { rho: None, .. } = cfg.environment {
        out.push_str("# rho: protection flag uniform, one uniformly chosen source agent\n");
    }
    if matches!(cfg.environment, EnvironmentConfig::Spreading { .. } | EnvironmentConfig::Random { .. }) {
        out.push_str("# default state and action: all zeros\n");
    }
    out.push_str(&cfg.resolved_toml()?);
    Ok(out)
}

fn evaluator_for(cfg: &ExperimentConfig, m: &FactoredMdp) -> Result<Box<dyn PolicyEvaluator>> {
    Ok(match cfg.lpi.evaluator {
        EvaluatorKind::LocalizedTd0 => Box::new(TdEvaluator {
            schedule: make_schedule(&cfg.lpi.schedule, m.gamma(), None)?,
        }),
        EvaluatorKind::ExactOracle => Box::new(ExactOracleEvaluator {
            cap: cfg.oracle.cap,
            tol: cfg.oracle.tol,
        }),
    })
}

/// Runs every (sweep point, seed) pair and writes per-run CSVs, policy and
/// Q-table checkpoints, one aggregate CSV per point and a manifest.
pub fn cmd_train(cfg: &ExperimentConfig, config_path: &Path, out: &Path) -> Result<Vec<PointSummary>> {
    let base = base_dir(config_path);
    let seeds = cfg.seeds();
    let points = cfg.points();
    let envs: Vec<FactoredMdp> = points
        .iter()
        .map(|p| build_env(cfg, &base, Some(p)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|k| seeds.iter().map(move |&s| (k, s)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(k, seed)| {
            let m = &envs[k];
            let evaluator = evaluator_for(cfg, m)?;
            lpi_run(m, &cfg.lpi_config(&points[k], m.tau(), seed), evaluator.as_ref())
        })
        .collect::<Result<_>>()?;
    write(&out.join("manifest.toml"), &manifest(cfg, "train")?)?;
    let mut summaries = Vec::with_capacity(points.len());
    for (k, point) in points.iter().enumerate() {
        let label = point.label();
        let dir = out.join(&label);
        let mut runs = Vec::new();
        let mut timing = String::from("seed iteration seconds\n");
        let mut warnings = String::new();
        for ((_, seed), res) in jobs.iter().zip(&results).filter(|((j, _), _)| *j == k) {
            write(&dir.join(format!("seed-{seed}.csv")), &run_csv(&res.metrics))?;
            write(&dir.join(format!("seed-{seed}.policy")), &write_policy(&res.policy))?;
            if !res.tables.is_empty() {
                write(&dir.join(format!("seed-{seed}.qtable")), &write_qtables(&res.tables))?;
            }
            for (it, secs) in res.metrics.wall_clock.iter().enumerate() {
                let _ = writeln!(timing, "{seed} {it} {secs:.6}");
            }
            for w in &res.metrics.warnings {
                let _ = writeln!(warnings, "seed {seed}: {w}");
            }
            runs.push(res.metrics.clone());
        }
        let rows = aggregate(&runs);
        write(&dir.join("aggregate.csv"), &aggregate_csv(&label, &rows))?;
        write(&dir.join("timing.txt"), &timing)?;
        if !warnings.is_empty() {
            write(&dir.join("warnings.txt"), &warnings)?;
        }
        summaries.push(PointSummary {
            label,
            point: point.clone(),
            rows,
        });
    }
    Ok(summaries)
}

/// [`cmd_train`] plus a summary CSV of final values and a chart of all points.
pub fn cmd_sweep(cfg: &ExperimentConfig, config_path: &Path, out: &Path) -> Result<Vec<PointSummary>> {
    let summaries = cmd_train(cfg, config_path, out)?;
    let mut csv = format!("# schema: {SUMMARY_SCHEMA}\n");
    csv.push_str("label,kappa,beta,tau,n,final_median,final_q25,final_q75\n");
    for s in &summaries {
        let last = s.last();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            s.label,
            s.point.kappa,
            s.point.beta,
            opt(s.point.tau),
            s.point.n.map(|n| n.to_string()).unwrap_or_default(),
            last.median,
            last.q25,
            last.q75
        );
    }
    write(&out.join("summary.csv"), &csv)?;
    let series: Vec<(String, Vec<AggregateRow>)> = summaries.iter().map(|s| (s.label.clone(), s.rows.clone())).collect();
    write(&out.join("returns.svg"), &render_svg(&series))?;
    Ok(summaries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub kappa: usize,
    pub objective: f64,
    pub gap: f64,
    pub bound: Option<f64>,
}

/// Objective of the κ-truncation of `optimal` for every κ up to the diameter.
pub fn kappa_gap_table(model: &ExactModel, optimal: &JointPolicy, optimum: f64, mu: Option<f64>, tol: f64) -> Result<Vec<GapRow>> {
    let m = model.mdp();
    (0..=m.graph().diameter())
        .map(|kappa| {
            let j = objective(model, &truncate_policy(optimal, kappa, m)?, tol)?;
            Ok(GapRow {
                kappa,
                objective: j,
                gap: optimum - j,
                bound: mu.map(|mu| kappa_gap_bound(m.gamma(), m.reward_bound(), kappa, mu)),
            })
        })
        .collect()
}

/// Decay exponent of the optimal policy when it is defined and positive.
fn decay_exponent(m: &FactoredMdp) -> Result<Option<f64>> {
    let c = c_matrix(m, DEFAULT_DIAGNOSTIC_CAP)?;
    Ok(optimal_policy_exponent(m, &c).ok().filter(|mu| *mu > 0.0 && mu.is_finite()))
}

#[derive(Debug, Clone)]
pub struct ExactSummary {
    pub objective: f64,
    pub certified: bool,
    pub gaps: Vec<GapRow>,
}

/// Solves the instance exactly: optimal values, optimal policy, objective and
/// the κ-gap table.
pub fn cmd_solve_exact(cfg: &ExperimentConfig, config_path: &Path, out: &Path) -> Result<ExactSummary> {
    let m = build_env(cfg, &base_dir(config_path), None)?;
    let model = ExactModel::new(&m, cfg.oracle.cap)?;
    let tol = cfg.oracle.tol;
    let sol = optimal_value(&model, tol)?;
    let optimum = objective_from_values(&model, &sol.values);
    let mu = decay_exponent(&m)?;
    let gaps = kappa_gap_table(&model, &sol.policy, optimum, mu, tol)?;
    write(&out.join("manifest.toml"), &manifest(cfg, "solve-exact")?)?;
    write(&out.join("values.csv"), &values_csv(&sol.values))?;
    write(&out.join("optimal.policy"), &write_policy(&sol.policy))?;
    let mut csv = format!("# schema: {GAP_SCHEMA}\n# optimum: {optimum}\n# mu: {}\n", opt(mu));
    csv.push_str("kappa,objective,gap,bound\n");
    for g in &gaps {
        let _ = writeln!(csv, "{},{},{},{}", g.kappa, g.objective, g.gap, opt(g.bound));
    }
    write(&out.join("kappa_gap.csv"), &csv)?;
    write(
        &out.join("summary.txt"),
        &format!(
            "objective {optimum}\ncertified {}\nsweeps {}\n",
            sol.certified, sol.sweeps
        ),
    )?;
    Ok(ExactSummary {
        objective: optimum,
        certified: sol.certified,
        gaps,
    })
}

/// Writes the C matrix and, for the chosen policy, the policy, Q and
/// second-order interaction matrices with certificates, plus the truncation
/// report. Q-based outputs need the instance under the exact cap.
pub fn cmd_diagnose(cfg: &ExperimentConfig, config_path: &Path, out: &Path) -> Result<()> {
    let base = base_dir(config_path);
    let m = build_env(cfg, &base, None)?;
    let cap = cfg.oracle.cap;
    let mu = match cfg.diagnose.mu {
        Some(mu) => mu,
        None => decay_exponent(&m)?.unwrap_or(1.0),
    };
    write(&out.join("manifest.toml"), &manifest(cfg, "diagnose")?)?;
    let mut report = format!("mu {mu}\n");
    let c = c_matrix(&m, DEFAULT_DIAGNOSTIC_CAP)?;
    let cert = decay_check(m.graph(), &c, mu)?;
    let _ = writeln!(report, "c nu {}", cert.nu);
    write(&out.join("c_matrix.csv"), &matrix_csv(&c, Some(&cert)))?;
    let model = match ExactModel::new(&m, cap) {
        Ok(model) => Some(model),
        Err(Error::CapExceeded { what, size, cap }) => {
            let _ = writeln!(report, "exact outputs skipped: {what} = {size} exceeds cap {cap}");
            None
        }
        Err(e) => return Err(e),
    };
    let policy = match (&cfg.diagnose.policy, &model) {
        (Some(path), _) => {
            let full = base.join(path);
            let text = fs::read_to_string(&full).map_err(|e| Error::Parse(format!("reading {}: {e}", full.display())))?;
            read_policy(&m, &text)?
        }
        (None, Some(model)) => optimal_value(model, cfg.oracle.tol)?.policy,
        (None, None) => uniform_policy(&m, cfg.lpi.kappa)?,
    };
    let zp = policy_interaction(&m, &policy, cap)?;
    let pc = decay_check(m.graph(), &zp, mu)?;
    let _ = writeln!(report, "policy nu {}", pc.nu);
    write(&out.join("policy_matrix.csv"), &matrix_csv(&zp, Some(&pc)))?;
    if let Some(model) = &model {
        let tol = cfg.oracle.tol;
        let qs = all_local_q(model, &policy, tol)?;
        let zq = q_interaction(model, &qs, cap)?;
        let qc = decay_check(m.graph(), &zq, mu)?;
        let _ = writeln!(report, "q nu {}", qc.nu);
        write(&out.join("q_matrix.csv"), &matrix_csv(&zq, Some(&qc)))?;
        let h = second_order_interaction(model, &global_q(model, &policy, tol)?, cap)?;
        let hc = decay_check(m.graph(), &h, mu)?;
        write(&out.join("second_order_matrix.csv"), &matrix_csv(&h, Some(&hc)))?;
        let betas: Vec<usize> = if cfg.diagnose.betas.is_empty() {
            (0..=m.graph().diameter()).collect()
        } else {
            cfg.diagnose.betas.clone()
        };
        let mut csv = format!("# schema: {TRUNCATION_SCHEMA}\n# mu: {mu}\nbeta,empirical,nu,bound,holds\n");
        for beta in betas {
            let tables = (0..m.n())
                .map(|i| point_mass_truncation(model, &qs[i], i, beta))
                .collect::<Result<Vec<_>>>()?;
            let r = truncation_error(model, &qs, &tables, beta, mu, cap)?;
            let _ = writeln!(csv, "{beta},{},{},{},{}", r.empirical, r.nu, r.bound, r.holds());
        }
        write(&out.join("truncation.csv"), &csv)?;
        let k = closure_constants(&m);
        let _ = writeln!(report, "closure sigma {} nu {} nu_prime {}", k.sigma, k.nu, k.nu_prime);
    }
    write(&out.join("report.txt"), &report)?;
    Ok(())
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Line chart of median return per iteration with a shaded quartile band,
/// one curve per series.
pub fn render_svg(series: &[(String, Vec<AggregateRow>)]) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (70.0, 170.0, 20.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let all = series.iter().flat_map(|(_, rows)| rows.iter());
    let max_it = all.clone().map(|r| r.iteration).max().unwrap_or(0).max(1) as f64;
    let lo = all.clone().map(|r| r.q25.min(r.median)).fold(f64::INFINITY, f64::min);
    let hi = all.map(|r| r.q75.max(r.median)).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    };
    let x = |it: usize| left + pw * it as f64 / max_it;
    let y = |v: f64| top + ph * (1.0 - (v - lo) / (hi - lo));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            left - 6.0,
            y(v) + 4.0
        );
        let it = (max_it * k as f64 / 4.0).round() as usize;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{it}</text>"#,
            x(it),
            top + ph + 16.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">outer iteration</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">regularized return</text>"#,
        top + ph / 2.0
    );
    for (k, (label, rows)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if rows.is_empty() {
            continue;
        }
        let mut band = String::new();
        for (j, r) in rows.iter().enumerate() {
            let _ = write!(band, "{}{:.2},{:.2} ", if j == 0 { "M" } else { "L" }, x(r.iteration), y(r.q75));
        }
        for r in rows.iter().rev() {
            let _ = write!(band, "L{:.2},{:.2} ", x(r.iteration), y(r.q25));
        }
        let _ = writeln!(out, r#"<path d="{}Z" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, band);
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", x(r.iteration), y(r.median)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let ly = top + 10.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            left + pw + 10.0,
            left + pw + 30.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            left + pw + 36.0,
            ly + 4.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders aggregate CSVs into one SVG.
pub fn cmd_plot(inputs: &[PathBuf], out: &Path) -> Result<()> {
    let series = inputs
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::Parse(format!("reading {}: {e}", p.display())))?;
            parse_aggregate_csv(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    write(out, &render_svg(&series))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(iteration: usize, median: f64, q25: f64, q75: f64) -> AggregateRow {
        AggregateRow {
            iteration,
            median,
            q25,
            q75,
            sigma_max: 0.0,
            gap_median: None,
        }
    }

    #[test]
    fn quartiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }

    #[test]
    fn aggregate_csv_round_trip() {
        let rows = vec![row(0, 1.5, 1.0, 2.0), row(1, 2.5, 2.0, 3.0)];
        let (label, back) = parse_aggregate_csv(&aggregate_csv("kappa-1_beta-1", &rows)).unwrap();
        assert_eq!(label, "kappa-1_beta-1");
        assert_eq!(back, rows);
        assert!(parse_aggregate_csv("# schema: other\n").is_err());
    }

    #[test]
    fn single_point_chart() {
        let svg = render_svg(&[("only".into(), vec![row(0, 1.0, 1.0, 1.0)])]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn one_legend_entry_per_series() {
        let s: Vec<(String, Vec<AggregateRow>)> = (0..3)
            .map(|k| (format!("kappa-{k}"), vec![row(0, 0.0, 0.0, 0.0), row(1, k as f64, k as f64, k as f64)]))
            .collect();
        let svg = render_svg(&s);
        assert_eq!(svg.matches("<line ").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 3);
    }
}
