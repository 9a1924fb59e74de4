//! Batch runs over sizes and seeds, and the curve fits used to summarise them.

use serde::Serialize;

use crate::constructions::build_path;
use crate::cost::GameConfig;
use crate::dynamics::{run_dynamics, ActivationScheme, DynamicsTrace, MovePolicy};
use crate::error::Result;
use crate::par::{self, Execution};

/// Runs from `P_n` for every size, one run per size, in parallel.
pub fn path_sweep(
    sizes: &[usize],
    cfg: &GameConfig,
    scheme_for: impl Fn(usize) -> Result<ActivationScheme> + Sync + Send,
    max_steps: usize,
    exec: Execution,
) -> Result<Vec<DynamicsTrace>> {
    par::map_indices(exec, sizes.len(), |i| {
        let n = sizes[i];
        run_dynamics(&build_path(n)?, cfg, &scheme_for(n)?, max_steps)
    })
    .into_iter()
    .collect()
}

/// Uniform-random runs from `P_n` for seeds `0..seeds`.
pub fn random_seed_sweep(
    n: usize,
    seeds: u64,
    cfg: &GameConfig,
    policy: MovePolicy,
    max_steps: usize,
    exec: Execution,
) -> Result<Vec<DynamicsTrace>> {
    let g0 = build_path(n)?;
    par::map_indices(exec, seeds as usize, |s| {
        run_dynamics(
            &g0,
            cfg,
            &ActivationScheme::uniform_random(s as u64, policy),
            max_steps,
        )
    })
    .into_iter()
    .collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyFit {
    /// Coefficients from the constant term upwards.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }
}

/// Least-squares polynomial of the given degree (needs more points than the degree).
pub fn poly_fit(xs: &[f64], ys: &[f64], degree: usize) -> PolyFit {
    let k = degree + 1;
    assert!(
        xs.len() == ys.len() && xs.len() >= k,
        "not enough points for the fit"
    );
    // normal equations, solved by Gaussian elimination with partial pivoting
    let mut a = vec![vec![0.0; k + 1]; k];
    for (&x, &y) in xs.iter().zip(ys) {
        let powers: Vec<f64> = (0..k).map(|p| x.powi(p as i32)).collect();
        for r in 0..k {
            for c in 0..k {
                a[r][c] += powers[r] * powers[c];
            }
            a[r][k] += powers[r] * y;
        }
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
            }
        }
    }
    let coefficients: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let fit = PolyFit {
        coefficients,
        r_squared: 0.0,
    };
    let my = mean(ys);
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - fit.eval(x)).powi(2))
        .sum();
    PolyFit {
        r_squared: if ss_tot == 0.0 {
            1.0
        } else {
            1.0 - ss_res / ss_tot
        },
        ..fit
    }
}

/// Least-squares `c` for `y = c * f(x)`.
pub fn scale_fit(xs: &[f64], ys: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let num: f64 = xs.iter().zip(ys).map(|(&x, &y)| f(x) * y).sum();
    let den: f64 = xs.iter().map(|&x| f(x) * f(x)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_polynomials_are_recovered() {
        let xs = [1.0, 2.0, 3.0, 5.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x + 0.5 * x * x).collect();
        let fit = poly_fit(&xs, &ys, 2);
        for (got, want) in fit.coefficients.iter().zip([2.0, -3.0, 0.5]) {
            assert!((got - want).abs() < 1e-9, "{fit:?}");
        }
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((scale_fit(&xs, &ys.iter().map(|_| 0.0).collect::<Vec<_>>(), |x| x)).abs() < 1e-12);
        let lin: Vec<f64> = xs.iter().map(|x| 4.0 * x).collect();
        assert!((scale_fit(&xs, &lin, |x| x) - 4.0).abs() < 1e-12);
    }
}
