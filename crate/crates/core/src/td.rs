//! β-hop localized TD(0) with entropy-adjusted rewards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lpi::TrajectoryRecord;
use crate::mdp::FactoredMdp;
use crate::policy::{policy_entropy, KHopPolicy};
use crate::truncated::TruncatedQ;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    /// `alpha`, multiplied by `factor` after every `every` steps when set.
    Constant {
        alpha: f64,
        anneal: Option<(usize, f64)>,
    },
    /// `h / (t + t0)`.
    Polynomial { h: f64, t0: f64 },
}

impl StepSchedule {
    pub fn constant(alpha: f64) -> Self {
        StepSchedule::Constant { alpha, anneal: None }
    }

    pub fn step(&self, t: usize) -> f64 {
        match *self {
            StepSchedule::Constant { alpha, anneal: None } => alpha,
            StepSchedule::Constant {
                alpha,
                anneal: Some((every, factor)),
            } => alpha * factor.powi((t / every) as i32),
            StepSchedule::Polynomial { h, t0 } => h / (t as f64 + t0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Constant,
    Polynomial,
}

/// Schedule block of the experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleParams {
    #[serde(default = "default_kind")]
    pub kind: ScheduleKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub anneal_every: Option<usize>,
    #[serde(default = "default_anneal_factor")]
    pub anneal_factor: f64,
    /// Used by the polynomial kind when no ξ estimate is supplied.
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default = "default_t0_floor")]
    pub t0_floor: f64,
}

fn default_kind() -> ScheduleKind {
    ScheduleKind::Constant
}
fn default_alpha() -> f64 {
    0.1
}
fn default_anneal_factor() -> f64 {
    0.5
}
fn default_t0_floor() -> f64 {
    1.0
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            alpha: default_alpha(),
            anneal_every: None,
            anneal_factor: default_anneal_factor(),
            h: None,
            t0_floor: default_t0_floor(),
        }
    }
}

/// Builds a step schedule. The polynomial kind takes `H = 2 / ((1 - gamma) xi)`
/// when `xi` is supplied and `t0 = max(4H, t0_floor)`.
pub fn make_schedule(params: &ScheduleParams, gamma: f64, xi: Option<f64>) -> Result<StepSchedule> {
    match params.kind {
        ScheduleKind::Constant => {
            if !(params.alpha > 0.0 && params.alpha <= 1.0) {
                return Err(Error::InvalidParameter(format!("step size {} outside (0, 1]", params.alpha)));
            }
            let anneal = match params.anneal_every {
                Some(0) => return Err(Error::InvalidParameter("anneal_every must be positive".into())),
                Some(k) => {
                    if !(params.anneal_factor > 0.0 && params.anneal_factor <= 1.0) {
                        return Err(Error::InvalidParameter("anneal_factor must lie in (0, 1]".into()));
                    }
                    Some((k, params.anneal_factor))
                }
                None => None,
            };
            Ok(StepSchedule::Constant {
                alpha: params.alpha,
                anneal,
            })
        }
        ScheduleKind::Polynomial => {
            let h = match (xi, params.h) {
                (Some(x), _) if x <= 0.0 => {
                    return Err(Error::InvalidParameter(format!("xi estimate {x} must be positive")))
                }
                (Some(x), _) => 2.0 / ((1.0 - gamma) * x),
                (None, Some(h)) if h > 0.0 => h,
                _ => return Err(Error::InvalidParameter("polynomial schedule needs xi or a positive h".into())),
            };
            Ok(StepSchedule::Polynomial {
                h,
                t0: (4.0 * h).max(params.t0_floor),
            })
        }
    }
}

/// Localized TD(0) for one agent over a recorded trajectory.
///
/// The per-step reward is `r_i + n tau H(policy row)`. Once the pass is done
/// each cell is shifted by `-n tau H` of the policy row at the cell's state
/// so the table estimates the local Q function itself. Policy rows at cells
/// whose κ-hop neighborhood reaches beyond β use the default state there.
pub fn localized_td0(
    m: &FactoredMdp,
    traj: &TrajectoryRecord,
    policy: &KHopPolicy,
    schedule: &StepSchedule,
) -> Result<TruncatedQ> {
    let i = policy.agent();
    let beta = traj.beta();
    let mut q = TruncatedQ::zeros(m, i, beta)?;
    let view = traj.view(i);
    let weight = m.n() as f64 * m.tau();
    let gamma = m.gamma();
    let len = traj.len();
    let adjusted: Vec<f64> = (0..len)
        .map(|t| view.reward[t] + weight * policy_entropy(policy.row_for(traj.state(t))))
        .collect();
    let cell = |t: usize| q.cell(view.state_index[t] as usize, view.action_index[t] as usize);
    let cells: Vec<usize> = (0..len).map(cell).collect();
    let table = q.table_mut();
    for t in 1..len {
        let (prev, cur) = (cells[t - 1], cells[t]);
        let alpha = schedule.step(t - 1);
        table[prev] += alpha * (adjusted[t - 1] + gamma * table[cur] - table[prev]);
    }
    let codec = q.state_codec().clone();
    let actions = q.action_codec().size();
    let mut global = m.default_state().to_vec();
    for x in 0..codec.size() {
        codec.scatter(x, &mut global);
        let shift = weight * policy_entropy(policy.row_for(&global));
        for y in 0..actions {
            let c = q.cell(x, y);
            q.table_mut()[c] -= shift;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        let c = make_schedule(&ScheduleParams::default(), 0.5, None).unwrap();
        assert!((0..1000).all(|t| c.step(t) == 0.1));
        let p = make_schedule(
            &ScheduleParams {
                kind: ScheduleKind::Polynomial,
                ..Default::default()
            },
            0.5,
            Some(0.5),
        )
        .unwrap();
        match p {
            StepSchedule::Polynomial { h, t0 } => {
                assert_eq!(h, 8.0);
                assert!(t0 >= 32.0);
            }
            _ => unreachable!(),
        }
        let steps: Vec<f64> = (0..100).map(|t| p.step(t)).collect();
        assert!(steps.windows(2).all(|w| w[1] < w[0]));
        assert!(make_schedule(
            &ScheduleParams {
                kind: ScheduleKind::Polynomial,
                ..Default::default()
            },
            0.5,
            Some(0.0)
        )
        .is_err());
        let a = StepSchedule::Constant {
            alpha: 0.1,
            anneal: Some((10, 0.5)),
        };
        assert_eq!(a.step(9), 0.1);
        assert_eq!(a.step(10), 0.05);
    }
}
