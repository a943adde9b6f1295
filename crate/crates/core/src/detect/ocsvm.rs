//! One-class SVM with an RBF kernel, trained by SMO.
//!
//! Dual problem:
//!
//! ```text
//! minimize   ½ Σᵢⱼ αᵢ αⱼ K(xᵢ, xⱼ)
//! subject to 0 ≤ αᵢ ≤ 1/(ν n),  Σᵢ αᵢ = 1
//! ```
//!
//! Decision value `f(x) = Σᵢ αᵢ K(xᵢ, x) − ρ`; negative means outside the
//! learned region. Each SMO step moves mass between the maximal violating
//! pair chosen with second-order information.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Beyond this many rows the kernel is evaluated per row on demand.
const DENSE_KERNEL_MAX_ROWS: usize = 3000;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// `1 / (d · mean per-feature variance)`, or 1 when the variance is 0.
    Scale,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcsvmParams {
    pub nu: f64,
    pub gamma: GammaMode,
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: f64,
    /// `None` picks `max(1_000_000, 100 n)`.
    pub max_iterations: Option<usize>,
}

impl Default for OcsvmParams {
    fn default() -> Self {
        OcsvmParams {
            nu: 0.05,
            gamma: GammaMode::Scale,
            tolerance: 1e-4,
            max_iterations: None,
        }
    }
}

pub fn scale_gamma(x: &FeatureMatrix) -> f64 {
    let (n, d) = (x.rows(), x.cols());
    if n == 0 || d == 0 {
        return 1.0;
    }
    let mut var_sum = 0.0;
    for c in 0..d {
        let mean = x.iter_rows().map(|r| r[c]).sum::<f64>() / n as f64;
        var_sum += x.iter_rows().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n as f64;
    }
    let mean_var = var_sum / d as f64;
    if mean_var > 0.0 {
        1.0 / (d as f64 * mean_var)
    } else {
        1.0
    }
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * sq).exp()
}

enum Kernel<'a> {
    Dense { n: usize, q: Vec<f64> },
    Lazy { x: &'a FeatureMatrix, gamma: f64 },
}

impl<'a> Kernel<'a> {
    fn new(x: &'a FeatureMatrix, gamma: f64) -> Self {
        let n = x.rows();
        if n <= DENSE_KERNEL_MAX_ROWS {
            let mut q = vec![0.0; n * n];
            for i in 0..n {
                q[i * n + i] = 1.0;
                for j in 0..i {
                    let v = rbf(x.row(i), x.row(j), gamma);
                    q[i * n + j] = v;
                    q[j * n + i] = v;
                }
            }
            Kernel::Dense { n, q }
        } else {
            Kernel::Lazy { x, gamma }
        }
    }

    fn row(&self, i: usize) -> std::borrow::Cow<'_, [f64]> {
        match self {
            Kernel::Dense { n, q } => std::borrow::Cow::Borrowed(&q[i * n..(i + 1) * n]),
            Kernel::Lazy { x, gamma } => {
                std::borrow::Cow::Owned(x.iter_rows().map(|r| rbf(x.row(i), r, *gamma)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneClassSvm {
    support: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    rho: f64,
    gamma: f64,
    /// Decision value of each training row, in input order.
    training_decisions: Vec<f64>,
    kkt_residual: f64,
    iterations: usize,
}

impl OneClassSvm {
    pub fn fit(x: &FeatureMatrix, params: &OcsvmParams) -> Result<Self> {
        let n = x.rows();
        let nu = params.nu;
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::Usage(format!("nu must lie in (0, 1], got {nu}")));
        }
        if n < 2 {
            return Err(Error::Usage(format!(
                "one-class SVM needs at least 2 rows, got {n}"
            )));
        }
        if nu * (n as f64) < 1.0 {
            return Err(Error::Usage(format!(
                "one-class SVM needs nu·n ≥ 1 (nu = {nu}, n = {n}); use at least {} rows",
                (1.0 / nu).ceil()
            )));
        }
        let gamma = match params.gamma {
            GammaMode::Scale => scale_gamma(x),
            GammaMode::Fixed(g) if g > 0.0 => g,
            GammaMode::Fixed(g) => {
                return Err(Error::Usage(format!("gamma must be positive, got {g}")))
            }
        };
        let upper = 1.0 / (nu * n as f64);
        let kernel = Kernel::new(x, gamma);

        // Fill the first rows to the bound until the mass sums to one.
        let mut alpha = vec![0.0; n];
        let mut remaining = 1.0;
        for a in alpha.iter_mut() {
            if remaining <= 0.0 {
                break;
            }
            *a = upper.min(remaining);
            remaining -= *a;
        }
        let mut grad = vec![0.0; n];
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                for (g, k) in grad.iter_mut().zip(kernel.row(i).iter()) {
                    *g += a * k;
                }
            }
        }

        let max_iterations = params
            .max_iterations
            .unwrap_or_else(|| (100 * n).max(1_000_000));
        let mut iterations = 0;
        loop {
            // i: steepest ascent among rows that can still grow.
            let mut i = usize::MAX;
            let mut g_max = f64::NEG_INFINITY;
            for t in 0..n {
                if alpha[t] < upper && -grad[t] > g_max {
                    g_max = -grad[t];
                    i = t;
                }
            }
            let mut g_min = f64::INFINITY;
            for t in 0..n {
                if alpha[t] > 0.0 {
                    g_min = g_min.min(-grad[t]);
                }
            }
            if i == usize::MAX || g_max - g_min < params.tolerance {
                break;
            }
            if iterations >= max_iterations {
                return Err(Error::Convergence {
                    iterations,
                    gap: g_max - g_min,
                });
            }
            iterations += 1;

            let q_i = kernel.row(i);
            let mut j = usize::MAX;
            let mut best = f64::INFINITY;
            for t in 0..n {
                if alpha[t] > 0.0 {
                    let b = g_max + grad[t];
                    if b > 0.0 {
                        let a = (q_i[i] + 1.0 - 2.0 * q_i[t]).max(TAU);
                        let obj = -(b * b) / a;
                        if obj < best {
                            best = obj;
                            j = t;
                        }
                    }
                }
            }
            if j == usize::MAX {
                break;
            }

            let a = (q_i[i] + 1.0 - 2.0 * q_i[j]).max(TAU);
            let step = (grad[j] - grad[i]) / a;
            let room_i = upper - alpha[i];
            let room_j = alpha[j];
            let delta = step.min(room_i).min(room_j);
            alpha[i] = if delta == room_i {
                upper
            } else {
                alpha[i] + delta
            };
            alpha[j] = if delta == room_j {
                0.0
            } else {
                alpha[j] - delta
            };

            let q_j = kernel.row(j);
            for t in 0..n {
                grad[t] += delta * (q_i[t] - q_j[t]);
            }
        }

        let rho = offset(&alpha, &grad, upper);
        let kkt_residual = kkt_residual(&alpha, &grad, upper, rho);
        let training_decisions = grad.iter().map(|g| g - rho).collect();
        let (support, alpha): (Vec<Vec<f64>>, Vec<f64>) = alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0)
            .map(|(i, &a)| (x.row(i).to_vec(), a))
            .unzip();
        Ok(OneClassSvm {
            support,
            alpha,
            rho,
            gamma,
            training_decisions,
            kkt_residual,
            iterations,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Largest violation of the optimality conditions at the returned solution.
    pub fn kkt_residual(&self) -> f64 {
        self.kkt_residual
    }

    pub fn training_decisions(&self) -> &[f64] {
        &self.training_decisions
    }

    pub fn decision_function(&self, point: &[f64]) -> Result<f64> {
        if let Some(sv) = self.support.first() {
            if sv.len() != point.len() {
                return Err(Error::Usage(format!(
                    "point has {} features, model was fitted on {}",
                    point.len(),
                    sv.len()
                )));
            }
        }
        let sum: f64 = self
            .support
            .iter()
            .zip(&self.alpha)
            .map(|(sv, a)| a * rbf(sv, point, self.gamma))
            .sum();
        Ok(sum - self.rho)
    }
}

/// The lowest offset consistent with the optimality conditions: the
/// smallest gradient among rows below the upper bound. Free support vectors
/// then sit on or just inside the boundary, so only rows at the bound can
/// get a negative decision value.
fn offset(alpha: &[f64], grad: &[f64], upper: f64) -> f64 {
    let below = alpha
        .iter()
        .zip(grad)
        .filter(|(&a, _)| a < upper)
        .map(|(_, &g)| g)
        .fold(f64::INFINITY, f64::min);
    if below.is_finite() {
        below
    } else {
        grad.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn kkt_residual(alpha: &[f64], grad: &[f64], upper: f64, rho: f64) -> f64 {
    alpha
        .iter()
        .zip(grad)
        .map(|(&a, &g)| {
            if a <= 0.0 {
                (rho - g).max(0.0)
            } else if a >= upper {
                (g - rho).max(0.0)
            } else {
                (g - rho).abs()
            }
        })
        .fold(0.0, f64::max)
}
