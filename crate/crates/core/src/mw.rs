//! Entropy-regularized maximization over products of simplices.
//!
//! Given a payoff table `q` over a product action space, maximize
//! `E_pi[q] + tau * sum_i H(pi_i)` over product distributions `pi`. The solver
//! runs synchronous multiplicative-weights updates from the uniform start:
//! `log pi_i <- (1 - eta*tau) log pi_i + eta * E_{a_-i ~ pi_-i} q(a_i, a_-i)`.

use crate::policy::{policy_entropy, tv_distance};

/// Per-agent expectations `g_i(a_i) = E_{a_-i ~ rows_-i} q(a_i, a_-i)`.
///
/// `q` is indexed by the mixed-radix action index (first agent least
/// significant) over `radices`.
pub fn leave_one_out(q: &[f64], radices: &[usize], rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = radices.len();
    let mut out: Vec<Vec<f64>> = radices.iter().map(|&r| vec![0.0; r]).collect();
    let mut digits = vec![0usize; k];
    let mut prefix = vec![1.0; k + 1];
    let mut suffix = vec![1.0; k + 1];
    for &value in q {
        for j in 0..k {
            prefix[j + 1] = prefix[j] * rows[j][digits[j]];
        }
        for j in (0..k).rev() {
            suffix[j] = suffix[j + 1] * rows[j][digits[j]];
        }
        for j in 0..k {
            out[j][digits[j]] += value * prefix[j] * suffix[j + 1];
        }
        for j in 0..k {
            digits[j] += 1;
            if digits[j] < radices[j] {
                break;
            }
            digits[j] = 0;
        }
    }
    out
}

/// Expectation of `q` over every position except `pos`, as a function of the
/// action at `pos`.
pub fn expectation_at(q: &[f64], radices: &[usize], rows: &[&[f64]], pos: usize) -> Vec<f64> {
    let k = radices.len();
    let mut out = vec![0.0; radices[pos]];
    let mut digits = vec![0usize; k];
    for &value in q {
        let mut w = 1.0;
        for j in 0..k {
            if j != pos {
                w *= rows[j][digits[j]];
            }
        }
        out[digits[pos]] += w * value;
        for j in 0..k {
            digits[j] += 1;
            if digits[j] < radices[j] {
                break;
            }
            digits[j] = 0;
        }
    }
    out
}

/// `E_pi[q] + tau * sum_i H(pi_i)`.
pub fn product_objective(q: &[f64], radices: &[usize], rows: &[Vec<f64>], tau: f64) -> f64 {
    let k = radices.len();
    let mut digits = vec![0usize; k];
    let mut total = 0.0;
    for &value in q {
        let w: f64 = (0..k).map(|j| rows[j][digits[j]]).product();
        total += w * value;
        for j in 0..k {
            digits[j] += 1;
            if digits[j] < radices[j] {
                break;
            }
            digits[j] = 0;
        }
    }
    total + tau * rows.iter().map(|r| policy_entropy(r)).sum::<f64>()
}

/// `log pi <- coef * log pi + eta * g`, normalized in place.
pub fn mw_update(row: &mut [f64], gains: &[f64], coef: f64, eta: f64) {
    let mut logits: Vec<f64> = row
        .iter()
        .zip(gains)
        .map(|(&p, &g)| {
            let prior = if coef == 0.0 { 0.0 } else { coef * p.ln() };
            prior + eta * g
        })
        .collect();
    let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for l in logits.iter_mut() {
        *l = (*l - top).exp();
        z += *l;
    }
    for (p, l) in row.iter_mut().zip(&logits) {
        *p = l / z;
    }
}

#[derive(Debug, Clone)]
pub struct MwOutcome {
    pub rows: Vec<Vec<f64>>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Step size actually used.
    pub eta: f64,
    /// Largest per-agent TV change at every iteration (only when requested).
    pub trace: Vec<f64>,
}

/// Plain multiplicative weights with a fixed step.
pub fn mw_maximize(
    q: &[f64],
    radices: &[usize],
    tau: f64,
    eta: f64,
    budget: usize,
    tol: f64,
    record_trace: bool,
) -> MwOutcome {
    let mut rows: Vec<Vec<f64>> = radices.iter().map(|&r| vec![1.0 / r as f64; r]).collect();
    let coef = 1.0 - eta * tau;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < budget {
        iterations += 1;
        let gains = leave_one_out(q, radices, &rows);
        let mut change: f64 = 0.0;
        let next: Vec<Vec<f64>> = rows
            .iter()
            .zip(&gains)
            .map(|(row, g)| {
                let mut r = row.clone();
                mw_update(&mut r, g, coef, eta);
                change = change.max(tv_distance(row, &r));
                r
            })
            .collect();
        rows = next;
        if record_trace {
            trace.push(change);
        }
        if change <= tol {
            converged = true;
            break;
        }
    }
    let value = product_objective(q, radices, &rows, tau);
    MwOutcome {
        rows,
        value,
        iterations,
        converged,
        eta,
        trace,
    }
}

/// Closed-form single-agent solution: value `tau * logsumexp(q / tau)` and
/// the softmax maximizer.
pub fn soft_max_single(q: &[f64], tau: f64) -> (f64, Vec<f64>) {
    let top = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if tau == 0.0 {
        let best = q.iter().position(|&x| x == top).unwrap_or(0);
        let mut row = vec![0.0; q.len()];
        row[best] = 1.0;
        return (top, row);
    }
    let w: Vec<f64> = q.iter().map(|&x| ((x - top) / tau).exp()).collect();
    let z: f64 = w.iter().sum();
    (top + tau * z.ln(), w.into_iter().map(|x| x / z).collect())
}

/// Full solver used by the Bellman operator.
///
/// Tries `eta = 1/tau` first. If that does not settle within `budget`
/// iterations, retries with damped steps `eta*tau = 1/2, 1/4, 1/8`. The
/// returned flag is `true` only when the undamped run converged.
pub fn maximize_product(
    q: &[f64],
    radices: &[usize],
    tau: f64,
    budget: usize,
    tol: f64,
) -> Option<(MwOutcome, bool)> {
    if tau == 0.0 {
        // a deterministic joint action is itself a product distribution
        let (value, row) = soft_max_single(q, 0.0);
        let best = row.iter().position(|&x| x == 1.0).unwrap_or(0);
        let mut rest = best;
        let rows = radices
            .iter()
            .map(|&r| {
                let mut v = vec![0.0; r];
                v[rest % r] = 1.0;
                rest /= r;
                v
            })
            .collect();
        return Some((
            MwOutcome {
                rows,
                value,
                iterations: 0,
                converged: true,
                eta: f64::INFINITY,
                trace: Vec::new(),
            },
            true,
        ));
    }
    if radices.len() == 1 {
        let (value, row) = soft_max_single(q, tau);
        return Some((
            MwOutcome {
                rows: vec![row],
                value,
                iterations: 1,
                converged: true,
                eta: 1.0 / tau,
                trace: Vec::new(),
            },
            true,
        ));
    }
    for (attempt, scale) in [1.0, 0.5, 0.25, 0.125].into_iter().enumerate() {
        let out = mw_maximize(q, radices, tau, scale / tau, budget, tol, false);
        if out.converged {
            return Some((out, attempt == 0));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leave_one_out_matches_brute_force() {
        let radices = [2, 3];
        let q: Vec<f64> = (0..6).map(|x| x as f64 * 0.7 - 1.0).collect();
        let rows = vec![vec![0.3, 0.7], vec![0.2, 0.5, 0.3]];
        let g = leave_one_out(&q, &radices, &rows);
        for a0 in 0..2 {
            let want: f64 = (0..3).map(|a1| rows[1][a1] * q[a0 + 2 * a1]).sum();
            assert!((g[0][a0] - want).abs() < 1e-15);
        }
        for a1 in 0..3 {
            let want: f64 = (0..2).map(|a0| rows[0][a0] * q[a0 + 2 * a1]).sum();
            assert!((g[1][a1] - want).abs() < 1e-15);
        }
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        assert_eq!(expectation_at(&q, &radices, &refs, 1), g[1]);
    }

    #[test]
    fn single_agent_closed_form_matches_iteration() {
        let q = [0.0, 1.0, 0.25];
        let (v, row) = soft_max_single(&q, 0.7);
        let it = mw_maximize(&q, &[3], 0.7, 1.0 / 0.7, 100, 1e-14, false);
        assert!((it.value - v).abs() < 1e-12);
        assert!(tv_distance(&it.rows[0], &row) < 1e-12);
        let (v2, _) = soft_max_single(&[0.0, 0.0], 1.0);
        assert!((v2 - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn constant_payoff_gives_uniform() {
        let q = vec![3.0; 8];
        let (out, certified) = maximize_product(&q, &[2, 2, 2], 0.5, 1000, 1e-12).unwrap();
        assert!(certified);
        assert!(out.rows.iter().flatten().all(|&p| (p - 0.5).abs() < 1e-12));
        assert!((out.value - (3.0 + 0.5 * 3.0 * 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn zero_tau_picks_best_joint_action() {
        let q = [0.0, 1.0, 5.0, 2.0];
        let (out, _) = maximize_product(&q, &[2, 2], 0.0, 10, 1e-12).unwrap();
        assert_eq!(out.value, 5.0);
        assert_eq!(out.rows, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn damped_step_keeps_interior() {
        let mut row = vec![0.5, 0.5];
        mw_update(&mut row, &[1.0, 0.0], 0.5, 1.0);
        assert!(row[0] > 0.5 && row[1] > 0.0);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
