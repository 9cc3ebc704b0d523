//! Nelder-Mead simplex minimization.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han (2012), which keep
//! the simplex from collapsing on problems with a dozen or more parameters.
//! Non-finite objective values are treated as `+inf`, so infeasible regions
//! are simply never accepted.

#[derive(Debug, Clone)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Stop once `f_worst - f_best <= tolerance * max(|f_best|, 1e-300)`.
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl NelderMead {
    pub fn new(max_iterations: usize, tolerance: f64) -> Self {
        Self {
            max_iterations,
            tolerance,
        }
    }

    /// Minimizes `f` from the simplex spanned by `x0` and `x0 + steps[i] * e_i`.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64], steps: &[f64]) -> Minimum
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        assert_eq!(steps.len(), n);
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        if n == 0 {
            let value = eval(x0);
            return Minimum {
                x: Vec::new(),
                value,
                iterations: 0,
                evaluations: 1,
                converged: true,
            };
        }

        let nf = n as f64;
        let (alpha, beta, gamma, delta) = (
            1.0,
            1.0 + 2.0 / nf,
            0.75 - 1.0 / (2.0 * nf),
            1.0 - 1.0 / nf,
        );

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for (i, step) in steps.iter().enumerate() {
            let mut v = x0.to_vec();
            v[i] += step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

        let mut converged = false;
        let mut iterations = 0;
        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut trial2 = vec![0.0; n];

        while iterations < self.max_iterations {
            order(&mut simplex, &mut values);
            let best = values[0];
            let worst = values[n];
            if best.is_finite() && worst - best <= self.tolerance * best.abs().max(1e-300) {
                converged = true;
                break;
            }
            iterations += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for v in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / nf;
                }
            }

            let along = |out: &mut [f64], coef: f64, worst: &[f64], centroid: &[f64]| {
                for ((o, c), w) in out.iter_mut().zip(centroid).zip(worst) {
                    *o = c + coef * (c - w);
                }
            };

            along(&mut trial, alpha, &simplex[n], &centroid);
            let f_reflect = eval(&trial);

            if f_reflect < values[0] {
                along(&mut trial2, alpha * beta, &simplex[n], &centroid);
                let f_expand = eval(&trial2);
                if f_expand < f_reflect {
                    simplex[n].copy_from_slice(&trial2);
                    values[n] = f_expand;
                } else {
                    simplex[n].copy_from_slice(&trial);
                    values[n] = f_reflect;
                }
                continue;
            }
            if f_reflect < values[n - 1] {
                simplex[n].copy_from_slice(&trial);
                values[n] = f_reflect;
                continue;
            }

            // contraction: outside when the reflection beat the worst point
            let (coef, target) = if f_reflect < values[n] {
                (alpha * gamma, f_reflect)
            } else {
                (-gamma, values[n])
            };
            along(&mut trial2, coef, &simplex[n], &centroid);
            let f_contract = eval(&trial2);
            if f_contract <= target {
                simplex[n].copy_from_slice(&trial2);
                values[n] = f_contract;
                continue;
            }

            let head = simplex[0].clone();
            for i in 1..=n {
                for (x, h) in simplex[i].iter_mut().zip(&head) {
                    *x = h + delta * (*x - h);
                }
                values[i] = eval(&simplex[i]);
            }
        }
        order(&mut simplex, &mut values);
        Minimum {
            x: simplex.swap_remove(0),
            value: values[0],
            iterations,
            evaluations,
            converged,
        }
    }
}

/// Sorts vertices by objective value; ties keep their current order.
fn order(simplex: &mut Vec<Vec<f64>>, values: &mut Vec<f64>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let s: Vec<Vec<f64>> = idx.iter().map(|&i| std::mem::take(&mut simplex[i])).collect();
    let v: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
    *simplex = s;
    *values = v;
}
