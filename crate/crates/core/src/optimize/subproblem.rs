//! Trust-region linear-programming step.
//!
//! Given linear models, finds a step `d` with `‖d‖ ≤ ρ` that first drives the
//! largest constraint violation `max(0, -(a_i·d + b_i))` to zero and then
//! decreases `g·d` while keeping every linearized constraint satisfied.
//! Both phases follow a piecewise-linear path of projected steepest descent,
//! adding constraints as they become active and stopping at the trust-region
//! boundary.

const DEGENERATE: f64 = 1e-12;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal basis of the active rows, with the triangular factor needed to
/// recover multipliers.
struct ActiveBasis {
    q: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
    rows: Vec<usize>,
}

impl ActiveBasis {
    /// Gram-Schmidt over `active`; rows that are numerically dependent on
    /// earlier ones are dropped from `active`.
    fn build(rows: &[Vec<f64>], active: &mut Vec<usize>) -> Self {
        let mut q: Vec<Vec<f64>> = Vec::new();
        let mut r: Vec<Vec<f64>> = Vec::new();
        let mut kept = Vec::new();
        for &i in active.iter() {
            let mut v = rows[i].clone();
            let scale = norm(&v).max(f64::MIN_POSITIVE);
            let mut coeffs = Vec::with_capacity(q.len() + 1);
            // two passes of modified Gram-Schmidt for stability
            let mut acc = vec![0.0; q.len()];
            for _ in 0..2 {
                for (k, qk) in q.iter().enumerate() {
                    let c = dot(qk, &v);
                    acc[k] += c;
                    for (vj, qj) in v.iter_mut().zip(qk) {
                        *vj -= c * qj;
                    }
                }
            }
            let nv = norm(&v);
            if nv <= 1e-10 * scale {
                continue;
            }
            coeffs.extend_from_slice(&acc);
            coeffs.push(nv);
            for vj in v.iter_mut() {
                *vj /= nv;
            }
            q.push(v);
            r.push(coeffs);
            kept.push(i);
        }
        *active = kept.clone();
        ActiveBasis { q, r, rows: kept }
    }

    /// Component of `g` orthogonal to the active rows.
    fn residual(&self, g: &[f64]) -> Vec<f64> {
        let mut res = g.to_vec();
        for qk in &self.q {
            let c = dot(qk, &res);
            for (rj, qj) in res.iter_mut().zip(qk) {
                *rj -= c * qj;
            }
        }
        res
    }

    /// Least-squares multipliers `λ` with `g ≈ Σ λ_k row_k`.
    fn multipliers(&self, g: &[f64]) -> Vec<f64> {
        let k = self.q.len();
        let qtg: Vec<f64> = self.q.iter().map(|qk| dot(qk, g)).collect();
        // R is stored column-wise: r[j][i] is entry (i, j) for i <= j.
        let mut lambda = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = qtg[i];
            for j in i + 1..k {
                s -= self.r[j][i] * lambda[j];
            }
            lambda[i] = s / self.r[i][i];
        }
        lambda
    }
}

/// Largest `α ≥ 0` with `‖z_b + α s_b‖ ≤ ρ` on the first `ball_dims` coordinates.
fn ball_step(z: &[f64], s: &[f64], ball_dims: usize, rho: f64) -> f64 {
    let (zb, sb) = (&z[..ball_dims], &s[..ball_dims]);
    let ss = dot(sb, sb);
    if ss == 0.0 {
        return f64::INFINITY;
    }
    let zs = dot(zb, sb);
    let slack = rho * rho - dot(zb, zb);
    if slack <= 0.0 {
        return 0.0;
    }
    let root = (zs * zs + ss * slack).sqrt();
    if zs >= 0.0 {
        slack / (zs + root)
    } else {
        (root - zs) / ss
    }
}

/// Projected-gradient path for `min grad·z` s.t. `rows_i·z + rhs_i ≥ 0` and the
/// ball on the leading `ball_dims` coordinates. `z` must start feasible.
fn descend(
    grad: &[f64],
    rows: &[Vec<f64>],
    rhs: &[f64],
    z: &mut [f64],
    active: &mut Vec<usize>,
    ball_dims: usize,
    rho: f64,
) {
    let dims = z.len();
    let gscale = norm(grad).max(f64::MIN_POSITIVE);
    let max_iter = 4 * (rows.len() + dims) + 10;
    for _ in 0..max_iter {
        let basis = ActiveBasis::build(rows, active);
        let s: Vec<f64> = basis.residual(grad).iter().map(|v| -v).collect();
        if norm(&s) <= DEGENERATE * gscale {
            let lambda = basis.multipliers(grad);
            let worst = lambda
                .iter()
                .enumerate()
                .filter(|(_, l)| **l < -DEGENERATE * gscale)
                .min_by(|a, b| a.1.total_cmp(b.1));
            match worst {
                Some((k, _)) => {
                    let drop = basis.rows[k];
                    active.retain(|&i| i != drop);
                    continue;
                }
                None => return,
            }
        }
        let alpha_ball = ball_step(z, &s, ball_dims, rho);
        let mut alpha_con = f64::INFINITY;
        let mut hit = None;
        for (i, row) in rows.iter().enumerate() {
            if active.contains(&i) {
                continue;
            }
            let rate = dot(row, &s);
            if rate >= -DEGENERATE * norm(row) * norm(&s) {
                continue;
            }
            let value = (dot(row, z) + rhs[i]).max(0.0);
            let alpha = value / -rate;
            if alpha < alpha_con {
                alpha_con = alpha;
                hit = Some(i);
            }
        }
        if alpha_ball <= alpha_con {
            if alpha_ball.is_finite() {
                for (zj, sj) in z.iter_mut().zip(&s) {
                    *zj += alpha_ball * sj;
                }
            }
            return;
        }
        for (zj, sj) in z.iter_mut().zip(&s) {
            *zj += alpha_con * sj;
        }
        if let Some(i) = hit {
            active.push(i);
        }
    }
}

/// Trust-region step for the linear models `f(d) ≈ g·d` and
/// `c_i(d) ≈ a_i·d + b_i ≥ 0`.
pub(crate) fn trust_region_step(g: &[f64], a: &[Vec<f64>], b: &[f64], rho: f64) -> Vec<f64> {
    let n = g.len();
    let mut d = vec![0.0; n];
    let worst = b.iter().fold(0.0f64, |acc, &bi| acc.max(-bi));
    let mut active: Vec<usize> = Vec::new();

    if worst > 0.0 {
        // Phase one in (d, t): minimize t subject to a_i·d + b_i + t ≥ 0, t ≥ 0.
        let mut rows: Vec<Vec<f64>> = a
            .iter()
            .map(|ai| {
                let mut r = ai.clone();
                r.push(1.0);
                r
            })
            .collect();
        let mut t_row = vec![0.0; n];
        t_row.push(1.0);
        rows.push(t_row);
        let mut rhs = b.to_vec();
        rhs.push(0.0);
        let mut grad = vec![0.0; n];
        grad.push(1.0);

        let mut z = vec![0.0; n + 1];
        z[n] = worst;
        let tie = 1e-14 * worst.max(1.0);
        let mut phase_active: Vec<usize> = (0..b.len()).filter(|&i| -b[i] >= worst - tie).collect();
        descend(&grad, &rows, &rhs, &mut z, &mut phase_active, n, rho);
        d.copy_from_slice(&z[..n]);
        if z[n] > 1e-10 * worst {
            // linearized constraints cannot all be met inside the trust region
            return d;
        }
        active = phase_active.into_iter().filter(|&i| i < b.len()).collect();
    }

    // Phase two: objective descent inside the linearized feasible region.
    let tight = |i: usize, d: &[f64]| {
        let v = dot(&a[i], d) + b[i];
        v <= 1e-12 * (1.0 + b[i].abs())
    };
    active.retain(|&i| tight(i, &d));
    descend(g, a, b, &mut d, &mut active, n, rho);
    d
}
