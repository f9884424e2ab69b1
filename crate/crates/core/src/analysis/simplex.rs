//! Nelder-Mead on a box. The search runs in unbounded coordinates `u`
//! with `x = lo + (hi - lo) (1 + sin u) / 2`, so every trial point is
//! feasible and the simplex never flattens against a bound.

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub converged: bool,
}

pub(crate) struct Settings {
    pub max_iter: usize,
    pub f_tol: f64,
    /// Convergence threshold on the simplex extent in `x`.
    pub x_tol: f64,
}

struct BoxMap<'a> {
    lo: &'a [f64],
    hi: &'a [f64],
}

impl BoxMap<'_> {
    fn to_x(&self, u: &[f64]) -> Vec<f64> {
        (0..u.len()).map(|i| self.lo[i] + (self.hi[i] - self.lo[i]) * 0.5 * (1.0 + u[i].sin())).collect()
    }

    fn to_u(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let t = 2.0 * (x[i] - self.lo[i]) / (self.hi[i] - self.lo[i]) - 1.0;
                t.clamp(-1.0, 1.0).asin()
            })
            .collect()
    }
}

/// Minimizes `f` over the box `[lo, hi]` starting from `x0`, with initial
/// simplex edges of roughly `step` in `x`.
pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    lo: &[f64],
    hi: &[f64],
    settings: &Settings,
) -> Outcome {
    let n = x0.len();
    let map = BoxMap { lo, hi };
    let mut eval = |u: &[f64]| {
        let v = f(&map.to_x(u));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let start = map.to_u(x0);
    let mut simplex: Vec<Vec<f64>> = vec![start.clone()];
    for i in 0..n {
        let mut v = start.clone();
        let half = 0.5 * (hi[i] - lo[i]);
        v[i] += (step[i] / half).clamp(1e-3, 1.0);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut converged = false;
    for _ in 0..settings.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let f_spread = values[n] - values[0];
        let best_x = map.to_x(&simplex[0]);
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| map.to_x(v).into_iter().zip(&best_x).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        if f_spread.is_finite() && f_spread <= settings.f_tol * (1.0 + values[0].abs()) && x_spread <= settings.x_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }
        let towards =
            |t: f64| -> Vec<f64> { (0..n).map(|i| centroid[i] + t * (simplex[n][i] - centroid[i])).collect() };

        let xr = towards(-1.0);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = towards(-2.0);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        // Outside contraction if the reflection helped at all, else inside.
        let xc = if fr < values[n] { towards(-0.5) } else { towards(0.5) };
        let fc = eval(&xc);
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        let (best, rest) = simplex.split_at_mut(1);
        for (v, fv) in rest.iter_mut().zip(&mut values[1..]) {
            for (vi, bi) in v.iter_mut().zip(&best[0]) {
                *vi = bi + 0.5 * (*vi - bi);
            }
            *fv = eval(v);
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Outcome { x: map.to_x(&simplex[best]), f: values[best], converged }
}
