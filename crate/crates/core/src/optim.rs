//! Nelder–Mead downhill simplex over a fixed number of variables.

/// Simplex coefficients and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_iterations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            diameter_tol: 1e-10,
            max_iterations: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn affine<const N: usize>(base: &[f64; N], toward: &[f64; N], t: f64) -> [f64; N] {
    std::array::from_fn(|i| base[i] + t * (toward[i] - base[i]))
}

impl NelderMead {
    /// Minimizes `f` from an axis-aligned initial simplex `x0 + step_i e_i`.
    ///
    /// `f` may return `f64::INFINITY` for infeasible points; NaN is treated the same way.
    pub fn minimize<const N: usize, F>(&self, f: F, x0: [f64; N], step: [f64; N]) -> Minimum<N>
    where
        F: Fn(&[f64; N]) -> f64,
    {
        let eval = |x: &[f64; N]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
        simplex.push((x0, eval(&x0)));
        for i in 0..N {
            let mut x = x0;
            x[i] += step[i];
            simplex.push((x, eval(&x)));
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iterations {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].0;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&best).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            if diameter < self.diameter_tol {
                converged = true;
                break;
            }
            iterations += 1;

            let centroid: [f64; N] =
                std::array::from_fn(|i| simplex[..N].iter().map(|(x, _)| x[i]).sum::<f64>() / N as f64);
            let (worst, f_worst) = simplex[N];
            let f_best = simplex[0].1;
            let f_second = simplex[N - 1].1;

            let reflected = affine(&centroid, &worst, -self.reflection);
            let f_reflected = eval(&reflected);
            if f_reflected < f_best {
                let expanded = affine(&centroid, &reflected, self.expansion);
                let f_expanded = eval(&expanded);
                simplex[N] = if f_expanded < f_reflected {
                    (expanded, f_expanded)
                } else {
                    (reflected, f_reflected)
                };
                continue;
            }
            if f_reflected < f_second {
                simplex[N] = (reflected, f_reflected);
                continue;
            }
            let (candidate, accept) = if f_reflected < f_worst {
                let outside = affine(&centroid, &reflected, self.contraction);
                let f_out = eval(&outside);
                ((outside, f_out), f_out <= f_reflected)
            } else {
                let inside = affine(&centroid, &worst, self.contraction);
                let f_in = eval(&inside);
                ((inside, f_in), f_in < f_worst)
            };
            if accept {
                simplex[N] = candidate;
                continue;
            }
            for vertex in simplex.iter_mut().skip(1) {
                let x = affine(&best, &vertex.0, self.shrink);
                *vertex = (x, eval(&x));
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        Minimum {
            x: simplex[0].0,
            value: simplex[0].1,
            iterations,
            converged,
        }
    }
}
