//! Derivative-free minimization used by the clone optimizer.

/// Result of a Nelder–Mead run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    /// Spread of objective values over the final simplex.
    pub spread: f64,
    pub converged: bool,
}

/// Nelder–Mead with the standard coefficients (1, 2, 1/2, 1/2).
///
/// Stops when the objective spread over the simplex drops below `ftol` and
/// the simplex diameter below `xtol`, or after `max_iter` iterations.
pub(crate) fn nelder_mead<const N: usize, F>(
    f: F,
    start: [f64; N],
    step: f64,
    ftol: f64,
    xtol: f64,
    max_iter: usize,
) -> Minimum<N>
where
    F: Fn(&[f64; N]) -> f64,
{
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for k in 0..N {
        let mut p = start;
        p[k] += step;
        simplex.push((p, f(&p)));
    }

    let mut converged = false;
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[N].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(p, _)| {
                p.iter()
                    .zip(simplex[0].0.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= ftol && diameter <= xtol {
            converged = true;
            break;
        }

        let mut centroid = [0.0; N];
        for (p, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += p[k] / N as f64;
            }
        }
        let along = |t: f64| {
            let mut q = [0.0; N];
            for k in 0..N {
                q[k] = centroid[k] + t * (simplex[N].0[k] - centroid[k]);
            }
            q
        };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            simplex[N] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
            continue;
        }
        let contracted = if fr < simplex[N].1 {
            along(-0.5)
        } else {
            along(0.5)
        };
        let fc = f(&contracted);
        if fc < simplex[N].1.min(fr) {
            simplex[N] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        let anchor = simplex[0].0;
        for (p, fp) in simplex.iter_mut().skip(1) {
            for k in 0..N {
                p[k] = anchor[k] + 0.5 * (p[k] - anchor[k]);
            }
            *fp = f(p);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Minimum {
        x: simplex[0].0,
        value: simplex[0].1,
        spread: (simplex[N].1 - simplex[0].1).abs(),
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |p: &[f64; 2]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let m = nelder_mead(f, [-1.2, 1.0], 0.1, 1e-20, 1e-10, 10_000);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn quadratic_3d() {
        let f = |p: &[f64; 3]| (p[0] - 0.3).powi(2) + 2.0 * (p[1] + 1.0).powi(2) + p[2].powi(2);
        let m = nelder_mead(f, [0.0; 3], 0.5, 1e-24, 1e-10, 10_000);
        assert!(m.value < 1e-16);
    }
}
