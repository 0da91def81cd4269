//! Nelder–Mead simplex minimization with best-vertex bookkeeping.

/// Standard coefficients and stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop when every vertex lies within this distance of the best one.
    pub x_tol: f64,
    /// Stop when the objective spread across the simplex falls below this.
    pub f_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            x_tol: 1e-4,
            f_tol: 1e-8,
            max_evals: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimizes `f` from an initial simplex of `dim + 1` vertices.
///
/// The returned point is the best vertex ever evaluated, so it is never
/// worse than the best initial vertex.
pub fn minimize<F>(mut f: F, simplex: Vec<Vec<f64>>, opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = simplex.len().saturating_sub(1);
    assert!(dim >= 1, "simplex needs at least two vertices");
    assert!(
        simplex.iter().all(|v| v.len() == dim),
        "vertex dimension mismatch"
    );

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut verts: Vec<(Vec<f64>, f64)> = simplex
        .into_iter()
        .map(|v| {
            let fv = eval(&v, &mut evals);
            (v, fv)
        })
        .collect();
    let mut converged = false;

    loop {
        verts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &verts[0];
        let spread = verts[dim].1 - best.1;
        let diameter = verts[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&best.0)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < opts.x_tol || spread < opts.f_tol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (v, _) in &verts[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let worst = verts[dim].0.clone();
        let f_worst = verts[dim].1;
        let f_second = verts[dim - 1].1;
        let f_best = verts[0].1;

        let xr = lerp(&centroid, &worst, -opts.reflection);
        let fr = eval(&xr, &mut evals);
        if fr < f_best {
            let xe = lerp(&centroid, &worst, -opts.reflection * opts.expansion);
            let fe = eval(&xe, &mut evals);
            verts[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            verts[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = lerp(&centroid, &xr, opts.contraction);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = lerp(&centroid, &worst, opts.contraction);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            verts[dim] = (xc, fc);
            continue;
        }
        let anchor = verts[0].0.clone();
        for vert in verts.iter_mut().skip(1) {
            let x = lerp(&anchor, &vert.0, opts.shrink);
            let fx = eval(&x, &mut evals);
            *vert = (x, fx);
        }
    }

    verts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = verts.swap_remove(0);
    NelderMeadResult {
        x,
        fx,
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_around(x0: &[f64], step: f64) -> Vec<Vec<f64>> {
        let mut s = vec![x0.to_vec()];
        for i in 0..x0.len() {
            let mut v = x0.to_vec();
            v[i] += step;
            s.push(v);
        }
        s
    }

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.7).powi(2);
        let opts = NelderMeadOptions {
            x_tol: 1e-7,
            f_tol: 1e-14,
            max_evals: 1000,
            ..Default::default()
        };
        let r = minimize(f, simplex_around(&[0.0, 0.0], 0.5), &opts);
        assert!(r.converged);
        assert!((r.x[0] - 0.3).abs() < 1e-5 && (r.x[1] + 0.7).abs() < 1e-5);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            x_tol: 1e-8,
            f_tol: 1e-16,
            max_evals: 5000,
            ..Default::default()
        };
        let r = minimize(f, simplex_around(&[-1.2, 1.0], 0.1), &opts);
        assert!(r.fx < 1e-8, "{r:?}");
    }

    #[test]
    fn never_worse_than_best_start() {
        let f = |x: &[f64]| (10.0 * x[0]).sin() + (7.0 * x[1]).cos();
        let start = simplex_around(&[0.4, 0.2], 0.3);
        let best_start = start.iter().map(|v| f(v)).fold(f64::INFINITY, f64::min);
        let opts = NelderMeadOptions {
            max_evals: 7,
            ..Default::default()
        };
        let r = minimize(f, start, &opts);
        assert!(r.fx <= best_start);
        assert!(!r.converged);
        assert_eq!(f(&r.x), r.fx);
    }
}
