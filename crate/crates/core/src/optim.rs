//! Derivative-free Nelder-Mead simplex search.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han, which behave
//! better than the classic `(1, 2, 1/2, 1/2)` set once the search space has
//! more than a handful of coordinates. After a run converges the search is
//! restarted from the best vertex with a fresh simplex; restarts stop once
//! they no longer improve the value by more than `ftol`.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Converged when `f(worst) - f(best) < ftol` ...
    pub ftol: f64,
    /// ... and every vertex lies within `xtol` (max-norm) of the best one.
    pub xtol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Evaluation budget per run.
    pub max_evals: usize,
    /// Fresh-simplex restarts after the first run.
    pub max_reruns: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            ftol: 1e-10,
            xtol: 1e-9,
            initial_step: 0.1,
            max_evals: 20_000,
            max_reruns: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let mut best = run_once(&mut f, x0, opts.initial_step, opts);
    let mut evals = best.evals;
    let mut step = opts.initial_step;
    for _ in 0..opts.max_reruns {
        step *= 0.1;
        let next = run_once(&mut f, &best.x, step, opts);
        evals += next.evals;
        let improvement = best.fx - next.fx;
        if next.fx <= best.fx {
            best = SimplexResult {
                converged: next.converged,
                ..next
            };
        }
        if improvement < opts.ftol {
            break;
        }
    }
    best.evals = evals;
    best
}

fn run_once<F>(f: &mut F, x0: &[f64], step: f64, opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut order: Vec<usize> = (0..=n).collect();
    let converged;

    loop {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (ib, iw, isw) = (order[0], order[n], order[n - 1]);
        let span = vals[iw] - vals[ib];
        let diam = pts
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[ib])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if span < opts.ftol && diam <= opts.xtol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            converged = span < opts.ftol;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[i]) {
                *c += x / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[iw])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[ib] {
            let xe = along(alpha * beta);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[iw] = xe;
                vals[iw] = fe;
            } else {
                pts[iw] = xr;
                vals[iw] = fr;
            }
            continue;
        }
        if fr < vals[isw] {
            pts[iw] = xr;
            vals[iw] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[iw] {
            let xc = along(alpha * gamma);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = f(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < vals[iw].min(fr) {
            pts[iw] = xc;
            vals[iw] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        let xb = pts[ib].clone();
        for &i in &order[1..] {
            for (p, b) in pts[i].iter_mut().zip(&xb) {
                *p = b + delta * (*p - b);
            }
            vals[i] = f(&pts[i]);
        }
        evals += n;
    }

    let ib = order[0];
    SimplexResult {
        x: pts[ib].clone(),
        fx: vals[ib],
        evals,
        converged,
    }
}
