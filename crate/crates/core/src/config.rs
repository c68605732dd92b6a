//! Experiment configuration (TOML).
//!
//! ```toml
//! [environment]
//! kind = "spreading"
//! n = 8
//! gamma = 0.95
//! tau = 0.05
//!
//! [lpi]
//! kappa = 1
//! beta = 1
//! eta = 0.05
//! p_max = 10
//! outer_iterations = 50
//! trajectory_len = 20000
//! evaluator = "localized-td0"
//!
//! [lpi.schedule]
//! kind = "constant"
//! alpha = 0.1
//!
//! [sweep]
//! kappa = [0, 1, 2]
//! seeds = [0, 1, 2]
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::envs::{random_factored_mdp, spreading_env, RandomMdpParams, SpreadingParams};
use crate::error::{Error, Result};
use crate::exact::{DEFAULT_EXACT_CAP, DEFAULT_TOL};
use crate::graph::GraphSpec;
use crate::lpi::{EvaluatorKind, LpiConfig};
use crate::mdp::{FactoredMdp, InitialDistribution, MdpFile};
use crate::td::ScheduleParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvironmentConfig {
    Spreading {
        n: usize,
        gamma: f64,
        tau: f64,
        #[serde(default = "p1")]
        p1: f64,
        #[serde(default = "p2")]
        p2: f64,
        #[serde(default = "cost")]
        c: f64,
        #[serde(default = "p_eff")]
        p_eff: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        graph: Option<GraphSpec>,
        /// `None` seeds the process at one uniformly chosen agent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rho: Option<InitialDistribution>,
    },
    Random {
        graph: GraphSpec,
        gamma: f64,
        tau: f64,
        #[serde(default = "two")]
        states: usize,
        #[serde(default = "two")]
        actions: usize,
        interaction_budget: f64,
        #[serde(default = "one")]
        reward_bound: f64,
        #[serde(default)]
        seed: u64,
    },
    /// MDP description file; relative paths resolve against the config file.
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
    },
}

fn p1() -> f64 {
    SpreadingParams::new(1).p1
}
fn p2() -> f64 {
    SpreadingParams::new(1).p2
}
fn cost() -> f64 {
    SpreadingParams::new(1).c
}
fn p_eff() -> f64 {
    SpreadingParams::new(1).p_eff
}
fn two() -> usize {
    2
}
fn one() -> f64 {
    1.0
}

impl EnvironmentConfig {
    /// Builds the instance, optionally overriding the agent count and `tau`.
    pub fn build(&self, base_dir: &Path, n_override: Option<usize>, tau_override: Option<f64>) -> Result<FactoredMdp> {
        match self {
            EnvironmentConfig::Spreading {
                n,
                gamma,
                tau,
                p1,
                p2,
                c,
                p_eff,
                graph,
                rho,
            } => {
                let n = n_override.unwrap_or(*n);
                let graph = graph.as_ref().map(|g| g.with_n(n)).transpose()?;
                let params = SpreadingParams {
                    n,
                    p1: *p1,
                    p2: *p2,
                    c: *c,
                    p_eff: *p_eff,
                    graph,
                };
                spreading_env(&params, *gamma, tau_override.unwrap_or(*tau), rho.clone())
            }
            EnvironmentConfig::Random {
                graph,
                gamma,
                tau,
                states,
                actions,
                interaction_budget,
                reward_bound,
                seed,
            } => random_factored_mdp(&RandomMdpParams {
                graph: match n_override {
                    Some(n) => graph.with_n(n)?,
                    None => graph.clone(),
                },
                states: *states,
                actions: *actions,
                interaction_budget: *interaction_budget,
                reward_bound: *reward_bound,
                gamma: *gamma,
                tau: tau_override.unwrap_or(*tau),
                seed: *seed,
            }),
            EnvironmentConfig::File { path, tau } => {
                if n_override.is_some() {
                    return Err(Error::InvalidParameter("an MDP file fixes the agent count; drop the n sweep".into()));
                }
                let full = base_dir.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Parse(format!("reading {}: {e}", full.display())))?;
                let m = MdpFile::from_toml(&text)?.into_mdp()?;
                match tau_override.or(*tau) {
                    Some(t) => m.with_discount_and_tau(m.gamma(), t),
                    None => Ok(m),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpiSection {
    #[serde(default = "one_usize")]
    pub kappa: usize,
    /// Defaults to `kappa`.
    #[serde(default)]
    pub beta: Option<usize>,
    pub eta: f64,
    #[serde(default = "p_max")]
    pub p_max: usize,
    pub outer_iterations: usize,
    pub trajectory_len: usize,
    #[serde(default = "evaluator")]
    pub evaluator: EvaluatorKind,
    #[serde(default)]
    pub schedule: ScheduleParams,
    #[serde(default = "eval_episodes")]
    pub eval_episodes: usize,
    /// Episodes for the final row only.
    #[serde(default)]
    pub final_eval_episodes: Option<usize>,
    /// Defaults to the horizon where `gamma^t < 1e-4`.
    #[serde(default)]
    pub eval_horizon: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn one_usize() -> usize {
    1
}
fn p_max() -> usize {
    10
}
fn evaluator() -> EvaluatorKind {
    EvaluatorKind::LocalizedTd0
}
fn eval_episodes() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub kappa: Vec<usize>,
    #[serde(default)]
    pub tau: Vec<f64>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Keep `beta = kappa` at every sweep point (default true).
    #[serde(default = "yes")]
    pub beta_follows_kappa: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "exact_cap")]
    pub cap: usize,
    #[serde(default = "tol")]
    pub tol: f64,
}

fn exact_cap() -> usize {
    DEFAULT_EXACT_CAP
}
fn tol() -> f64 {
    DEFAULT_TOL
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            enabled: true,
            cap: exact_cap(),
            tol: tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseSection {
    /// Decay exponent for certificates; derived from the model when absent.
    #[serde(default)]
    pub mu: Option<f64>,
    /// Truncation radii to report; defaults to `0..=diameter`.
    #[serde(default)]
    pub betas: Vec<usize>,
    /// Policy checkpoint to diagnose instead of the exact optimum.
    #[serde(default)]
    pub policy: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentConfig,
    pub lpi: LpiSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub diagnose: DiagnoseSection,
    /// Output directory; relative paths resolve against the output root.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// One fully resolved run coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub kappa: usize,
    pub beta: usize,
    pub tau: Option<f64>,
    pub n: Option<usize>,
}

impl SweepPoint {
    /// Directory-safe name built from the coordinates.
    pub fn label(&self) -> String {
        let mut out = format!("kappa-{}_beta-{}", self.kappa, self.beta);
        if let Some(t) = self.tau {
            out.push_str(&format!("_tau-{t}"));
        }
        if let Some(n) = self.n {
            out.push_str(&format!("_n-{n}"));
        }
        out
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut seeds = self.seeds();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("sweep seeds must be distinct".into()));
        }
        if self.sweep.tau.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidParameter("swept tau values must be positive".into()));
        }
        if self.sweep.n.contains(&0) {
            return Err(Error::InvalidParameter("swept n values must be positive".into()));
        }
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        if self.sweep.seeds.is_empty() {
            vec![self.lpi.seed]
        } else {
            self.sweep.seeds.clone()
        }
    }

    /// Cartesian product of the sweep lists in kappa, tau, n order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let kappas = if self.sweep.kappa.is_empty() {
            vec![self.lpi.kappa]
        } else {
            self.sweep.kappa.clone()
        };
        let taus: Vec<Option<f64>> = if self.sweep.tau.is_empty() {
            vec![None]
        } else {
            self.sweep.tau.iter().map(|&t| Some(t)).collect()
        };
        let ns: Vec<Option<usize>> = if self.sweep.n.is_empty() {
            vec![None]
        } else {
            self.sweep.n.iter().map(|&n| Some(n)).collect()
        };
        let mut out = Vec::new();
        for &kappa in &kappas {
            for &tau in &taus {
                for &n in &ns {
                    let beta = if !self.sweep.kappa.is_empty() && self.sweep.beta_follows_kappa {
                        kappa
                    } else {
                        self.lpi.beta.unwrap_or(kappa)
                    };
                    out.push(SweepPoint { kappa, beta, tau, n });
                }
            }
        }
        out
    }

    pub fn lpi_config(&self, point: &SweepPoint, tau: f64, seed: u64) -> LpiConfig {
        LpiConfig {
            kappa: point.kappa,
            beta: point.beta,
            eta: self.lpi.eta,
            tau,
            p_max: self.lpi.p_max,
            outer_iterations: self.lpi.outer_iterations,
            trajectory_len: self.lpi.trajectory_len,
            seed,
            eval_episodes: self.lpi.eval_episodes,
            final_eval_episodes: self.lpi.final_eval_episodes,
            eval_horizon: self.lpi.eval_horizon,
            oracle: self.oracle.enabled,
            exact_cap: self.oracle.cap,
            tol: self.oracle.tol,
        }
    }

    /// Config with every default written out, for the run manifest.
    pub fn resolved_toml(&self) -> Result<String> {
        let mut resolved = self.clone();
        resolved.lpi.beta = Some(self.lpi.beta.unwrap_or(self.lpi.kappa));
        resolved.sweep.seeds = self.seeds();
        toml::to_string(&resolved).map_err(|e| Error::Parse(e.to_string()))
    }
}
