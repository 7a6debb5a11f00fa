//! COBYLA: constrained optimization by linear approximations.
//!
//! The method keeps `n + 1` interpolation points (a simplex), fits linear
//! models of the objective and of every constraint `c_i(x) ≥ 0` through them,
//! and steps within a trust region of radius `ρ`. Progress is judged with the
//! merit function `f(x) + μ · max(0, -min_i c_i(x))`. When steps stop paying
//! off and the simplex is well shaped, `ρ` is halved until it reaches the
//! final radius.

use serde::{Deserialize, Serialize};

use super::subproblem::trust_region_step;
use super::OptimizerOptions;
use crate::error::{Error, Result};

/// Vertex acceptability bounds, relative to ρ.
const MIN_FACE_DISTANCE: f64 = 0.25;
const MAX_EDGE: f64 = 2.1;
/// Length of a geometry-repair step, relative to ρ.
const REPAIR_STEP: f64 = 0.5;
/// Edge length above which a vertex is preferred for replacement, relative to ρ.
const FAR_VERTEX: f64 = 1.1;

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The trust region shrank to the final radius.
    Converged,
    MaxEvaluations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CobylaOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    /// `max(0, -min_i c_i(x))` at the returned point.
    pub max_violation: f64,
    /// After each evaluation, the lowest objective value seen so far among
    /// points satisfying every constraint (`+∞` before the first one).
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub termination: Termination,
}

/// Minimizes `objective` without constraints.
pub fn cobyla_minimize<F>(
    mut objective: F,
    x0: &[f64],
    options: &OptimizerOptions,
) -> Result<CobylaOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    cobyla_minimize_constrained(|x: &[f64], _: &mut [f64]| objective(x), 0, x0, options)
}

/// Minimizes the objective returned by `problem` subject to the
/// `num_constraints` values it writes into its second argument staying `≥ 0`.
pub fn cobyla_minimize_constrained<F>(
    problem: F,
    num_constraints: usize,
    x0: &[f64],
    options: &OptimizerOptions,
) -> Result<CobylaOutcome>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    options.validate(x0.len())?;
    if let Some(v) = x0.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "non-finite starting point component {v}"
        )));
    }
    let mut solver = Solver::start(problem, num_constraints, x0, options)?;
    let termination = solver.run()?;
    solver.select_pivot();
    Ok(CobylaOutcome {
        x: solver.pivot.clone(),
        f: solver.piv.f,
        max_violation: solver.piv.v,
        trace: solver.trace,
        evaluations: solver.evaluations,
        termination,
    })
}

#[derive(Debug, Clone)]
struct Sample {
    f: f64,
    c: Vec<f64>,
    v: f64,
}

struct Solver<F> {
    problem: F,
    n: usize,
    m: usize,
    rho: f64,
    rho_end: f64,
    mu: f64,
    max_evaluations: usize,
    evaluations: usize,
    trace: Vec<f64>,
    best_feasible: f64,
    pivot: Vec<f64>,
    piv: Sample,
    /// `sim[j]` is vertex `j` minus the pivot.
    sim: Vec<Vec<f64>>,
    /// Inverse of the matrix whose columns are `sim[j]`, stored by rows.
    simi: Vec<Vec<f64>>,
    verts: Vec<Sample>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl<F> Solver<F>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    fn start(problem: F, m: usize, x0: &[f64], options: &OptimizerOptions) -> Result<Self> {
        let n = x0.len();
        let rho = options.initial_trust_radius;
        let mut solver = Solver {
            problem,
            n,
            m,
            rho,
            rho_end: options.final_trust_radius,
            mu: 0.0,
            max_evaluations: options.max_evaluations,
            evaluations: 0,
            trace: Vec::with_capacity(options.max_evaluations),
            best_feasible: f64::INFINITY,
            pivot: x0.to_vec(),
            piv: Sample {
                f: 0.0,
                c: Vec::new(),
                v: 0.0,
            },
            sim: Vec::with_capacity(n),
            simi: Vec::with_capacity(n),
            verts: Vec::with_capacity(n),
        };
        // options.validate guarantees the budget covers the initial simplex
        solver.piv = solver.evaluate(x0)?.expect("budget covers initial simplex");
        for j in 0..n {
            let mut step = vec![0.0; n];
            step[j] = rho;
            let x: Vec<f64> = solver.pivot.iter().zip(&step).map(|(a, b)| a + b).collect();
            let sample = solver.evaluate(&x)?.expect("budget covers initial simplex");
            let mut inv = vec![0.0; n];
            inv[j] = 1.0 / rho;
            let better = sample.f < solver.piv.f;
            solver.sim.push(step);
            solver.simi.push(inv);
            solver.verts.push(sample);
            if better {
                // later vertices are then built around the improved point
                solver.swap_pivot(j);
            }
        }
        Ok(solver)
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<Option<Sample>> {
        if self.evaluations >= self.max_evaluations {
            return Ok(None);
        }
        let mut c = vec![0.0; self.m];
        let f = (self.problem)(x, &mut c);
        self.evaluations += 1;
        if !f.is_finite() {
            return Err(Error::NonFinite {
                evaluation: self.evaluations,
                value: f,
            });
        }
        if let Some(&bad) = c.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                evaluation: self.evaluations,
                value: bad,
            });
        }
        let v = c.iter().fold(0.0f64, |acc, &ci| acc.max(-ci));
        if v == 0.0 && f < self.best_feasible {
            self.best_feasible = f;
        }
        self.trace.push(self.best_feasible);
        Ok(Some(Sample { f, c, v }))
    }

    fn merit(&self, s: &Sample) -> f64 {
        s.f + self.mu * s.v
    }

    fn best_vertex(&self) -> Option<usize> {
        let mut best = None;
        let mut best_phi = self.merit(&self.piv);
        let mut best_v = self.piv.v;
        for (j, s) in self.verts.iter().enumerate() {
            let phi = self.merit(s);
            if phi < best_phi || (phi == best_phi && s.v < best_v) {
                best = Some(j);
                best_phi = phi;
                best_v = s.v;
            }
        }
        best
    }

    /// Makes the vertex with the lowest merit the pivot.
    fn select_pivot(&mut self) {
        if let Some(j) = self.best_vertex() {
            self.swap_pivot(j);
        }
    }

    fn swap_pivot(&mut self, j: usize) {
        let shift = self.sim[j].clone();
        for (p, s) in self.pivot.iter_mut().zip(&shift) {
            *p += s;
        }
        for (i, col) in self.sim.iter_mut().enumerate() {
            if i == j {
                col.iter_mut().for_each(|v| *v = -*v);
            } else {
                col.iter_mut().zip(&shift).for_each(|(v, s)| *v -= s);
            }
        }
        let mut row_sum = vec![0.0; self.n];
        for row in &self.simi {
            row_sum.iter_mut().zip(row).for_each(|(acc, v)| *acc += v);
        }
        self.simi[j] = row_sum.into_iter().map(|v| -v).collect();
        std::mem::swap(&mut self.piv, &mut self.verts[j]);
    }

    /// Gradients of the linear interpolants of the objective and constraints.
    fn models(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.n;
        let mut gf = vec![0.0; n];
        let mut ga = vec![vec![0.0; n]; self.m];
        for (j, row) in self.simi.iter().enumerate() {
            let df = self.verts[j].f - self.piv.f;
            for k in 0..n {
                gf[k] += row[k] * df;
            }
            for (i, gi) in ga.iter_mut().enumerate() {
                let dc = self.verts[j].c[i] - self.piv.c[i];
                for k in 0..n {
                    gi[k] += row[k] * dc;
                }
            }
        }
        (gf, ga)
    }

    fn predicted_violation(&self, ga: &[Vec<f64>], d: &[f64]) -> f64 {
        ga.iter()
            .zip(&self.piv.c)
            .fold(0.0f64, |acc, (gi, ci)| acc.max(-(ci + dot(gi, d))))
    }

    /// Replaces vertex `j` by `pivot + d`; `w` holds the simplex coordinates of `d`.
    fn replace_vertex(&mut self, j: usize, d: Vec<f64>, sample: Sample, w: &[f64]) {
        let pivot_row: Vec<f64> = self.simi[j].iter().map(|v| v / w[j]).collect();
        for (i, row) in self.simi.iter_mut().enumerate() {
            if i != j {
                row.iter_mut()
                    .zip(&pivot_row)
                    .for_each(|(v, p)| *v -= w[i] * p);
            }
        }
        self.simi[j] = pivot_row;
        self.sim[j] = d;
        self.verts[j] = sample;
    }

    fn face_distances(&self) -> Vec<f64> {
        self.simi.iter().map(|row| 1.0 / norm(row)).collect()
    }

    /// Vertex that makes the simplex unacceptable: the farthest one beyond
    /// `MAX_EDGE · ρ` from the pivot, else the one closest to its opposite face
    /// if nearer than `MIN_FACE_DISTANCE · ρ`.
    fn misplaced_vertex(&self) -> Option<usize> {
        let vsig = self.face_distances();
        let veta: Vec<f64> = self.sim.iter().map(|c| norm(c)).collect();
        let far = (0..self.n)
            .filter(|&j| veta[j] > MAX_EDGE * self.rho)
            .max_by(|&a, &b| veta[a].total_cmp(&veta[b]));
        let flat = (0..self.n)
            .filter(|&j| vsig[j] < MIN_FACE_DISTANCE * self.rho)
            .min_by(|&a, &b| vsig[a].total_cmp(&vsig[b]));
        far.or(flat)
    }

    /// Replaces vertex `j` by a point `REPAIR_STEP · ρ` from the pivot along
    /// the normal of the opposite face. Returns false when the budget is spent.
    fn repair_vertex(&mut self, j: usize, gf: &[f64], ga: &[Vec<f64>]) -> Result<bool> {
        let vsig = 1.0 / norm(&self.simi[j]);
        let scale = REPAIR_STEP * self.rho * vsig;
        let mut d: Vec<f64> = self.simi[j].iter().map(|v| v * scale).collect();
        let df = dot(gf, &d);
        let plus = df + self.mu * self.predicted_violation(ga, &d);
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        let minus = -df + self.mu * self.predicted_violation(ga, &neg);
        if minus < plus {
            d = neg;
        }
        let x: Vec<f64> = self.pivot.iter().zip(&d).map(|(a, b)| a + b).collect();
        let Some(sample) = self.evaluate(&x)? else {
            return Ok(false);
        };
        let w: Vec<f64> = self.simi.iter().map(|row| dot(row, &d)).collect();
        self.replace_vertex(j, d, sample, &w);
        Ok(true)
    }

    /// Halves ρ (snapping to the final radius) and relaxes the penalty
    /// parameter; returns false once ρ is already final.
    fn reduce_radius(&mut self) -> bool {
        if self.rho <= self.rho_end {
            return false;
        }
        self.rho *= 0.5;
        if self.rho <= 1.5 * self.rho_end {
            self.rho = self.rho_end;
        }
        if self.mu > 0.0 {
            let all = || std::iter::once(&self.piv).chain(self.verts.iter());
            let mut denom: f64 = 0.0;
            for k in 0..self.m {
                let cmin = all().map(|s| s.c[k]).fold(f64::INFINITY, f64::min);
                let cmax = all().map(|s| s.c[k]).fold(f64::NEG_INFINITY, f64::max);
                if cmin < 0.5 * cmax {
                    let spread = cmax.max(0.0) - cmin;
                    denom = if denom <= 0.0 {
                        spread
                    } else {
                        denom.min(spread)
                    };
                }
            }
            if denom == 0.0 {
                self.mu = 0.0;
            } else {
                let fmin = all().map(|s| s.f).fold(f64::INFINITY, f64::min);
                let fmax = all().map(|s| s.f).fold(f64::NEG_INFINITY, f64::max);
                if fmax - fmin < self.mu * denom {
                    self.mu = (fmax - fmin) / denom;
                }
            }
        }
        true
    }

    fn run(&mut self) -> Result<Termination> {
        // Geometry is only repaired after an unsuccessful trial step.
        let mut trial_pending = true;
        loop {
            self.select_pivot();
            let (gf, ga) = self.models();
            let misplaced = self.misplaced_vertex();
            if !trial_pending {
                if let Some(j) = misplaced {
                    if !self.repair_vertex(j, &gf, &ga)? {
                        return Ok(Termination::MaxEvaluations);
                    }
                    trial_pending = true;
                    continue;
                }
            }

            let d = trust_region_step(&gf, &ga, &self.piv.c, self.rho);
            let mut succeeded = false;
            if dot(&d, &d) < 0.25 * self.rho * self.rho {
                // too short to be informative
                trial_pending = true;
            } else {
                // Raise μ until the step is predicted to reduce the merit function.
                let df = dot(&gf, &d);
                let predicted_recovery = self.piv.v - self.predicted_violation(&ga, &d);
                let needed = if predicted_recovery > 0.0 {
                    df / predicted_recovery
                } else {
                    0.0
                };
                if self.mu < 1.5 * needed {
                    self.mu = 2.0 * needed;
                    if self.best_vertex().is_some() {
                        continue;
                    }
                }
                let mut predicted = self.mu * predicted_recovery - df;

                let x: Vec<f64> = self.pivot.iter().zip(&d).map(|(a, b)| a + b).collect();
                let Some(sample) = self.evaluate(&x)? else {
                    return Ok(Termination::MaxEvaluations);
                };
                trial_pending = true;
                let mut actual = self.merit(&self.piv) - self.merit(&sample);
                if self.mu == 0.0 && sample.f == self.piv.f {
                    predicted = predicted_recovery;
                    actual = self.piv.v - sample.v;
                }
                let w: Vec<f64> = self.simi.iter().map(|row| dot(row, &d)).collect();
                if let Some(j) = self.choose_dropped_vertex(&d, &w, actual > 0.0) {
                    self.replace_vertex(j, d, sample, &w);
                    succeeded = actual > 0.0 && actual >= 0.1 * predicted;
                }
            }
            if succeeded {
                continue;
            }
            if misplaced.is_some() {
                trial_pending = false;
                continue;
            }
            if !self.reduce_radius() {
                return Ok(Termination::Converged);
            }
        }
    }

    /// Vertex to be replaced by the trial point `pivot + d`, if any.
    fn choose_dropped_vertex(&self, d: &[f64], w: &[f64], improved: bool) -> Option<usize> {
        // a failed trial only enters the simplex if it enlarges it
        let mut threshold = if improved { 0.0 } else { 1.0 };
        let mut drop = None;
        for (j, wj) in w.iter().enumerate() {
            if wj.abs() > threshold {
                threshold = wj.abs();
                drop = Some(j);
            }
        }

        // Prefer a distant vertex whose replacement keeps the simplex from flattening.
        let vsig = self.face_distances();
        let mut edge = FAR_VERTEX * self.rho;
        let mut far = None;
        for j in 0..self.n {
            let sigbar = w[j].abs() * vsig[j];
            if sigbar >= MIN_FACE_DISTANCE * self.rho || sigbar >= vsig[j] {
                let dist = if improved {
                    norm(
                        &d.iter()
                            .zip(&self.sim[j])
                            .map(|(a, b)| a - b)
                            .collect::<Vec<_>>(),
                    )
                } else {
                    norm(&self.sim[j])
                };
                if dist > edge {
                    edge = dist;
                    far = Some(j);
                }
            }
        }
        far.or(drop)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn opts(max_evaluations: usize) -> OptimizerOptions {
        OptimizerOptions {
            max_evaluations,
            ..OptimizerOptions::default()
        }
    }

    #[test]
    fn one_dimensional_quadratic() {
        let out = cobyla_minimize(|x| (x[0] - 2.0).powi(2), &[0.0], &opts(1000)).unwrap();
        assert_abs_diff_eq!(out.x[0], 2.0, epsilon = 1e-3);
        assert_eq!(out.termination, Termination::Converged);
    }

    #[test]
    fn sphere() {
        let out =
            cobyla_minimize(|x| x.iter().map(|v| v * v).sum(), &[1.0, 1.0], &opts(1000)).unwrap();
        assert!(out.f < 1e-6, "f = {}", out.f);
    }

    #[test]
    fn rosenbrock() {
        let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        // the curved valley needs a few thousand evaluations with linear models
        let out = cobyla_minimize(rosen, &[-1.2, 1.0], &opts(1000)).unwrap();
        assert!(out.f < 2.0, "f = {}", out.f);
        assert_eq!(out.evaluations, 1000);
        let out = cobyla_minimize(rosen, &[-1.2, 1.0], &opts(5000)).unwrap();
        assert!(out.f < 1e-2, "f = {}", out.f);
    }

    #[test]
    fn trace_is_best_so_far() {
        let out = cobyla_minimize(
            |x| (x[0] - 1.0).powi(2) + (x[1] + 0.5).powi(2),
            &[3.0, 3.0],
            &opts(200),
        )
        .unwrap();
        assert_eq!(out.trace.len(), out.evaluations);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*out.trace.last().unwrap(), out.f);
    }

    #[test]
    fn respects_budget() {
        let out = cobyla_minimize(
            |x| x.iter().map(|v| (v - 3.0).powi(4)).sum(),
            &[0.0; 4],
            &opts(30),
        )
        .unwrap();
        assert_eq!(out.evaluations, 30);
        assert_eq!(out.termination, Termination::MaxEvaluations);
    }

    #[test]
    fn non_finite_objective_aborts() {
        let err = cobyla_minimize(
            |x| if x[0] > 0.2 { f64::NAN } else { -x[0] },
            &[0.0],
            &opts(100),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn linear_constraint_is_active_at_solution() {
        // min (x-1)² + (y-2)²  s.t.  1 - x - y >= 0  → (0, 1), f = 2
        let out = cobyla_minimize_constrained(
            |x: &[f64], c: &mut [f64]| {
                c[0] = 1.0 - x[0] - x[1];
                (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2)
            },
            1,
            &[0.0, 0.0],
            &opts(1000),
        )
        .unwrap();
        assert_abs_diff_eq!(out.x[0], 0.0, epsilon = 1e-4);
        assert_abs_diff_eq!(out.x[1], 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(out.f, 2.0, epsilon = 1e-4);
        assert!(out.max_violation < 1e-6);
    }

    #[test]
    fn infeasible_start_recovers() {
        // min x + y  s.t.  x >= 1, y >= 2, from (0, 0)
        let out = cobyla_minimize_constrained(
            |x: &[f64], c: &mut [f64]| {
                c[0] = x[0] - 1.0;
                c[1] = x[1] - 2.0;
                x[0] + x[1]
            },
            2,
            &[0.0, 0.0],
            &opts(500),
        )
        .unwrap();
        assert_abs_diff_eq!(out.f, 3.0, epsilon = 1e-5);
        assert!(out.max_violation < 1e-6);
    }

    #[test]
    fn rejects_bad_options() {
        let bad = OptimizerOptions {
            initial_trust_radius: 1e-7,
            ..OptimizerOptions::default()
        };
        assert!(cobyla_minimize(|x| x[0], &[0.0], &bad).is_err());
        assert!(cobyla_minimize(|x| x[0], &[0.0, 0.0], &opts(3)).is_err());
        assert!(cobyla_minimize(|x| x[0], &[], &opts(10)).is_err());
    }
}
