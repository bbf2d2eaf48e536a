//! The gradient-descent loops.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dist::ProbDistMatrix;
use super::forecast::{forecast, Forecast};
use super::objective::{objective_gradient, objective_value, Objective};
use crate::error::{Error, Result};
use crate::params::CodeParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GradeConfig {
    /// Length of each normalized gradient step.
    pub alpha: f64,
    /// Stop once the objective changes by no more than this.
    pub epsilon: f64,
    /// Target MD density in percent; descent stops once this much mass is relocated.
    pub density_cap: f64,
    pub objective: Objective,
    pub max_iters: usize,
    /// Iterations to run before the density test may stop the loop.
    pub min_iters: usize,
    /// Keep the two-column repeated cycle-8 pattern in the objective.
    pub include_w1: bool,
    /// Random restarts of the one-dimensional optimizer, the uniform start included.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for GradeConfig {
    fn default() -> Self {
        GradeConfig {
            alpha: 0.02,
            epsilon: 1e-8,
            density_cap: 50.0,
            objective: Objective::Cycle8,
            max_iters: 50_000,
            min_iters: 0,
            include_w1: false,
            restarts: 5,
            seed: 0,
        }
    }
}

impl GradeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !(self.epsilon > 0.0) {
            return Err(Error::InvalidParams("alpha and epsilon must be positive".into()));
        }
        if !(self.density_cap > 0.0 && self.density_cap < 100.0) {
            return Err(Error::InvalidParams("density cap must lie strictly between 0 and 100".into()));
        }
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(Error::InvalidParams("max_iters and restarts must be positive".into()));
        }
        Ok(())
    }
}

/// Why the descent loop stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradeStatus {
    DensityReached,
    Converged,
    /// The gradient vanished.
    Stationary,
    /// Hit `max_iters`; the best distribution seen is returned.
    MaxIterations,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradeOutcome {
    pub distribution: ProbDistMatrix,
    pub forecast: Forecast,
    pub objective_value: f64,
    pub initial_objective: f64,
    pub iterations: usize,
    pub status: GradeStatus,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Normalized step followed by projection; halves the step while the
/// projection would empty a row.
fn project_step(p: &ProbDistMatrix, grad: &[f64], alpha: f64) -> Result<ProbDistMatrix> {
    let g = norm(grad);
    let mut step = alpha;
    loop {
        match p.stepped(grad, step / g) {
            Err(Error::DegenerateRow { .. }) if step > alpha * 1e-9 => step /= 2.0,
            other => return other,
        }
    }
}

/// Descends from the unrelocated distribution `P[i][0] = p*[i]` until the
/// relocated share reaches the density cap or the objective settles.
pub fn md_grade(params: &CodeParams, p_star: &[f64], cfg: &GradeConfig) -> Result<GradeOutcome> {
    cfg.validate()?;
    if p_star.len() != params.memory + 1 {
        return Err(Error::InvalidParams(format!(
            "p* has {} entries, expected m + 1 = {}",
            p_star.len(),
            params.memory + 1
        )));
    }
    let eval = |p: &ProbDistMatrix| objective_value(p, params.gamma, params.kappa, cfg.objective, cfg.include_w1);

    let mut p = ProbDistMatrix::unrelocated(p_star, params.copies)?;
    let initial = eval(&p);
    let mut best = (initial, p.clone());
    let mut f_prev = 0.0;
    let mut iterations = 0;
    let status = loop {
        let f_cur = eval(&p);
        if f_cur < best.0 {
            best = (f_cur, p.clone());
        }
        let grad = objective_gradient(&p, params.gamma, params.kappa, cfg.objective, cfg.include_w1);
        if norm(&grad) == 0.0 {
            break GradeStatus::Stationary;
        }
        p = project_step(&p, &grad, cfg.alpha)?;
        iterations += 1;
        let pct = 100.0 - p.relocation_percent();
        if pct <= 100.0 - cfg.density_cap && iterations >= cfg.min_iters {
            break GradeStatus::DensityReached;
        }
        if (f_cur - f_prev).abs() <= cfg.epsilon {
            break GradeStatus::Converged;
        }
        if iterations >= cfg.max_iters {
            warn!("md_grade stopped after {iterations} iterations without converging");
            break GradeStatus::MaxIterations;
        }
        f_prev = f_cur;
    };
    if status == GradeStatus::MaxIterations && best.0 < eval(&p) {
        p = best.1;
    }
    let f_final = eval(&p);
    Ok(GradeOutcome {
        forecast: forecast(&p, params, cfg.objective, cfg.include_w1)?,
        distribution: p,
        objective_value: f_final,
        initial_objective: initial,
        iterations,
        status,
    })
}

/// Locally optimal component distribution of the underlying SC code: the
/// single-copy objective minimized by projected descent with step control,
/// from the uniform vector and `restarts - 1` seeded random starts.
pub fn grade_1d(params: &CodeParams, cfg: &GradeConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if params.memory == 0 {
        return Err(Error::InvalidParams("memory must be at least 1".into()));
    }
    let n = params.memory + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = vec![vec![1.0 / n as f64; n]];
    for _ in 1..cfg.restarts {
        let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
        let s: f64 = w.iter().sum();
        starts.push(w.iter().map(|v| v / s).collect());
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let (f, p) = descend_1d(params, cfg, &start)?;
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, p));
        }
    }
    Ok(best.expect("at least one start").1)
}

fn descend_1d(params: &CodeParams, cfg: &GradeConfig, start: &[f64]) -> Result<(f64, Vec<f64>)> {
    let column = |v: &[f64]| -> Result<ProbDistMatrix> {
        let rows: Vec<Vec<f64>> = v.iter().map(|&x| vec![x]).collect();
        ProbDistMatrix::from_rows(&rows, vec![1.0])
            .or_else(|_| ProbDistMatrix::from_weights(&rows))
    };
    let eval = |p: &ProbDistMatrix| objective_value(p, params.gamma, params.kappa, cfg.objective, cfg.include_w1);
    let mut x = start.to_vec();
    let mut f = eval(&column(&x)?);
    let mut step = 0.1;
    for _ in 0..cfg.max_iters {
        if step < 1e-13 {
            break;
        }
        let p = column(&x)?;
        let grad = objective_gradient(&p, params.gamma, params.kappa, cfg.objective, cfg.include_w1);
        let g = norm(&grad);
        if g == 0.0 {
            break;
        }
        let trial: Vec<f64> = x.iter().zip(&grad).map(|(a, d)| a - step * d / g).collect();
        let projected = project_simplex(&trial);
        let ft = eval(&column(&projected)?);
        if ft < f {
            x = projected;
            f = ft;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    Ok((f, x))
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}
