//! Derivative-free minimisation (Nelder–Mead) on fixed-size vectors.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
    /// Stop when the spread of simplex values falls below this...
    pub f_tolerance: f64,
    /// ...and every vertex lies within this distance (max-norm) of the best.
    pub x_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            f_tolerance: 1e-10,
            x_tolerance: 1e-10,
            max_iterations: 5_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimises `f` from `start`. Deterministic: ties between vertices keep
/// their previous order.
pub fn nelder_mead<const N: usize, F>(mut f: F, start: [f64; N], opts: &NelderMeadOptions) -> Minimum<N>
where
    F: FnMut(&[f64; N]) -> f64,
{
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64; N]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, eval(&start)));
    for i in 0..N {
        let mut x = start;
        x[i] += opts.initial_step;
        simplex.push((x, eval(&x)));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best_x, best_f) = simplex[0];
        let worst_f = simplex[N].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best_x.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (worst_f - best_f).abs() <= opts.f_tolerance && diameter <= opts.x_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / N as f64;
            }
        }
        let along = |t: f64| -> [f64; N] {
            let mut out = [0.0; N];
            for i in 0..N {
                out[i] = centroid[i] + t * (simplex[N].0[i] - centroid[i]);
            }
            out
        };

        let reflected = along(-REFLECT);
        let f_reflected = eval(&reflected);
        let second_worst_f = simplex[N - 1].1;

        if f_reflected < best_f {
            let expanded = along(-EXPAND);
            let f_expanded = eval(&expanded);
            simplex[N] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < second_worst_f {
            simplex[N] = (reflected, f_reflected);
            continue;
        }

        let (contracted, f_contracted) = if f_reflected < worst_f {
            let x = along(-CONTRACT);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(CONTRACT);
            let v = eval(&x);
            (x, v)
        };
        if f_contracted < worst_f.min(f_reflected) {
            simplex[N] = (contracted, f_contracted);
            continue;
        }

        for vertex in simplex.iter_mut().skip(1) {
            let mut x = vertex.0;
            for i in 0..N {
                x[i] = best_x[i] + SHRINK * (x[i] - best_x[i]);
            }
            *vertex = (x, eval(&x));
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex[0];
    Minimum {
        x,
        value,
        iterations,
        evaluations,
        converged,
    }
}
