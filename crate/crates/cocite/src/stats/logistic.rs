//! Maximum-likelihood polynomial logistic regression by iteratively
//! reweighted least squares, with step halving so the deviance never
//! increases from its starting point. Warm-started nested fits therefore
//! have non-increasing residual deviance by construction.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Deviance change below which IRLS is considered converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Iteration cap; non-convergence within it is flagged, not fatal.
pub const MAX_ITERATIONS: u32 = 100;
/// |linear predictor| beyond which fitted probabilities are pinned to 0/1
/// and the coefficients are effectively diverging (separation).
const SEPARATION_ETA: f64 = 30.0;

/// One predictor expanded to a polynomial block.
#[derive(Debug, Clone)]
pub struct TermBlock {
    pub variable: String,
    pub degree: usize,
    /// Raw predictor values, one per observation, already scaled to [0, 1].
    pub x: Vec<f64>,
}

impl TermBlock {
    pub fn new(variable: impl Into<String>, degree: usize, x: Vec<f64>) -> Self {
        TermBlock {
            variable: variable.into(),
            degree,
            x,
        }
    }
}

/// A fitted logistic model.
#[derive(Debug, Clone, Serialize)]
pub struct LogisticFit {
    /// (variable, polynomial degree) per term block, model order.
    pub variables: Vec<(String, usize)>,
    /// Intercept first, then each block's x¹..x^degree coefficients.
    pub coefficients: Vec<f64>,
    pub null_deviance: f64,
    pub residual_deviance: f64,
    pub iterations: u32,
    pub converged: bool,
    pub separation: bool,
    pub n: usize,
}

fn sigmoid(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

/// ln(1 + e^eta), computed without overflow.
fn softplus(eta: f64) -> f64 {
    eta.max(0.0) + (-eta.abs()).exp().ln_1p()
}

/// -2 log-likelihood for responses `y` under linear predictors `eta`.
fn deviance(eta: &[f64], y: &[bool]) -> f64 {
    let ll: f64 = eta
        .iter()
        .zip(y)
        .map(|(&e, &yi)| if yi { e - softplus(e) } else { -softplus(e) })
        .sum();
    -2.0 * ll
}

/// Intercept-only deviance: −2N[p̄·ln p̄ + (1−p̄)·ln(1−p̄)].
pub fn null_deviance(y: &[bool]) -> f64 {
    let n = y.len() as f64;
    let p = y.iter().filter(|&&v| v).count() as f64 / n;
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -2.0 * n * (p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}

struct Design {
    /// Column-major design matrix including the leading intercept column.
    columns: Vec<Vec<f64>>,
    variables: Vec<(String, usize)>,
    n: usize,
}

fn build_design(blocks: &[TermBlock], n: usize) -> Result<Design> {
    let mut columns = vec![vec![1.0; n]];
    let mut variables = Vec::new();
    for block in blocks {
        if block.x.len() != n {
            return Err(Error::InvalidConfig(format!(
                "predictor {} has {} rows, expected {n}",
                block.variable,
                block.x.len()
            )));
        }
        if block.degree > 4 {
            return Err(Error::InvalidConfig(format!(
                "polynomial degree {} exceeds the supported maximum of 4",
                block.degree
            )));
        }
        let distinct = {
            let mut vals = block.x.clone();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            vals.len()
        };
        if distinct < block.degree + 2 {
            return Err(Error::DegenerateStatistics(format!(
                "predictor {} has {distinct} distinct values, need at least {}",
                block.variable,
                block.degree + 2
            )));
        }
        for power in 1..=block.degree {
            columns.push(block.x.iter().map(|&v| v.powi(power as i32)).collect());
        }
        variables.push((block.variable.clone(), block.degree));
    }
    Ok(Design {
        columns,
        variables,
        n,
    })
}

fn eta_of(design: &Design, beta: &[f64]) -> Vec<f64> {
    let mut eta = vec![0.0; design.n];
    for (coef, column) in beta.iter().zip(&design.columns) {
        for (e, &x) in eta.iter_mut().zip(column) {
            *e += coef * x;
        }
    }
    eta
}

/// Fit by IRLS with step halving. `warm_start`, when given, must have one
/// coefficient per design column and is also the deviance ceiling: the fit
/// never returns a deviance above the start's.
pub fn fit_logistic(
    blocks: &[TermBlock],
    y: &[bool],
    warm_start: Option<&[f64]>,
) -> Result<LogisticFit> {
    let n = y.len();
    if n == 0 {
        return Err(Error::DegenerateStatistics("no observations to fit".into()));
    }
    let hits = y.iter().filter(|&&v| v).count();
    if hits == 0 || hits == n {
        return Err(Error::DegenerateStatistics(
            "logistic fit requires both response classes".into(),
        ));
    }
    let design = build_design(blocks, n)?;
    let p = design.columns.len();

    let p_bar = hits as f64 / n as f64;
    let mut beta: Vec<f64> = match warm_start {
        Some(start) => {
            if start.len() != p {
                return Err(Error::InvalidConfig(format!(
                    "warm start has {} coefficients, design has {p}",
                    start.len()
                )));
            }
            start.to_vec()
        }
        None => {
            let mut b = vec![0.0; p];
            b[0] = (p_bar / (1.0 - p_bar)).ln();
            b
        }
    };

    let mut eta = eta_of(&design, &beta);
    let mut dev = deviance(&eta, y);
    let mut iterations = 0u32;
    let mut converged = false;
    let mut separation = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;

        // Weighted normal equations (XᵀWX)δ = Xᵀ(y − p̂).
        let probs: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
        let weights: Vec<f64> = probs.iter().map(|&pr| (pr * (1.0 - pr)).max(1e-10)).collect();
        let mut xtwx = DMatrix::<f64>::zeros(p, p);
        let mut grad = DVector::<f64>::zeros(p);
        for r in 0..p {
            let col_r = &design.columns[r];
            grad[r] = col_r
                .iter()
                .zip(y.iter().zip(&probs))
                .map(|(&x, (&yi, &pr))| x * (f64::from(yi) - pr))
                .sum();
            for c in r..p {
                let col_c = &design.columns[c];
                let s: f64 = col_r
                    .iter()
                    .zip(col_c)
                    .zip(&weights)
                    .map(|((&xr, &xc), &w)| w * xr * xc)
                    .sum();
                xtwx[(r, c)] = s;
                xtwx[(c, r)] = s;
            }
        }

        // SVD pseudo-solve: rank-deficient designs (e.g. a duplicated or
        // constant column) get the minimum-norm step instead of failing.
        let svd = xtwx.svd(true, true);
        let delta = svd
            .solve(&grad, 1e-12)
            .map_err(|e| Error::DegenerateStatistics(format!("IRLS solve failed: {e}")))?;

        // Step halving: accept the first candidate that does not worsen the
        // deviance; give up after 32 halvings.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..32 {
            let candidate: Vec<f64> = beta
                .iter()
                .zip(delta.iter())
                .map(|(&b, &d)| b + scale * d)
                .collect();
            let cand_eta = eta_of(&design, &candidate);
            let cand_dev = deviance(&cand_eta, y);
            if cand_dev.is_finite() && cand_dev <= dev {
                let improvement = dev - cand_dev;
                beta = candidate;
                eta = cand_eta;
                dev = cand_dev;
                accepted = true;
                if improvement < CONVERGENCE_TOL {
                    converged = true;
                }
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            // No direction improves: numerically at the optimum.
            converged = true;
        }
        if eta.iter().any(|&e| e.abs() > SEPARATION_ETA) && !converged {
            separation = true;
        }
        if converged || separation {
            break;
        }
    }

    Ok(LogisticFit {
        variables: design.variables,
        coefficients: beta,
        null_deviance: null_deviance(y),
        residual_deviance: dev,
        iterations,
        converged,
        separation,
        n,
    })
}

/// Nested fits entered block by block, warm-started from the previous step.
/// The first element is the intercept-only (null) model. Residual deviance
/// is non-increasing along the returned sequence.
pub fn hierarchical_fit(blocks: &[TermBlock], y: &[bool]) -> Result<Vec<LogisticFit>> {
    let mut fits: Vec<LogisticFit> = vec![fit_logistic(&[], y, None)?];
    for step in 1..=blocks.len() {
        let warm: Vec<f64> = {
            let prev = &fits[step - 1];
            let mut coefs = prev.coefficients.clone();
            coefs.resize(coefs.len() + blocks[step - 1].degree, 0.0);
            coefs
        };
        fits.push(fit_logistic(&blocks[..step], y, Some(&warm))?);
    }
    Ok(fits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logit(p: f64) -> f64 {
        (p / (1.0 - p)).ln()
    }

    #[test]
    fn degree_zero_matches_the_closed_form() {
        let n = 17_000;
        let hits = 850; // 5%
        let y: Vec<bool> = (0..n).map(|i| i < hits).collect();
        let fit = fit_logistic(&[], &y, None).unwrap();
        let p_bar = hits as f64 / n as f64;
        let expected = -2.0 * n as f64 * (p_bar * p_bar.ln() + (1.0 - p_bar) * (1.0 - p_bar).ln());
        assert!(
            (fit.residual_deviance - expected).abs() <= 1e-6 * expected,
            "{} vs {expected}",
            fit.residual_deviance
        );
        assert!((fit.coefficients[0] - logit(0.05)).abs() < 1e-10);
        assert!(fit.converged);
        // magnitude check: ≈ 6749.5 at this n and rate
        assert!((fit.residual_deviance - 6749.5).abs() < 1.0);
    }

    #[test]
    fn recovers_known_coefficients() {
        // y ~ Bernoulli(sigmoid(-2 + 3x)) on a fine deterministic grid.
        let n = 20_000;
        let mut y = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        let mut state = 0x2545F4914F6CDD1Du64;
        for i in 0..n {
            let xv = (i % 101) as f64 / 100.0;
            let p = sigmoid(-2.0 + 3.0 * xv);
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            x.push(xv);
            y.push(u < p);
        }
        let fit = fit_logistic(&[TermBlock::new("x", 1, x)], &y, None).unwrap();
        assert!(fit.converged);
        assert!((fit.coefficients[0] + 2.0).abs() < 0.15, "b0={}", fit.coefficients[0]);
        assert!((fit.coefficients[1] - 3.0).abs() < 0.25, "b1={}", fit.coefficients[1]);
        assert!(fit.residual_deviance < fit.null_deviance);
    }

    #[test]
    fn independent_response_changes_deviance_only_slightly() {
        // y ⟂ x: the deviance drop is a χ²(2) draw; 30 is far in the tail.
        let n = 10_000;
        let mut y = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        let mut state = 99u64;
        for i in 0..n {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            y.push(((state >> 11) as f64 / (1u64 << 53) as f64) < 0.05);
            x.push((i % 100) as f64 / 99.0);
        }
        let fit = fit_logistic(&[TermBlock::new("x", 2, x)], &y, None).unwrap();
        let drop = fit.null_deviance - fit.residual_deviance;
        assert!((0.0..30.0).contains(&drop), "deviance drop {drop}");
    }

    #[test]
    fn symmetric_data_zeroes_odd_coefficients() {
        // x symmetric around 0, y depends on |x| only: the MLE of x¹ and x³
        // coefficients is 0 by symmetry.
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 1..=50 {
            let v = i as f64 / 50.0;
            for &sign in &[-1.0, 1.0] {
                // deterministic symmetric response pattern: hits at large |x|
                for k in 0..10 {
                    x.push(sign * v);
                    y.push(k as f64 / 10.0 < v * v);
                }
            }
        }
        let fit = fit_logistic(&[TermBlock::new("x", 3, x)], &y, None).unwrap();
        assert!(fit.coefficients[1].abs() < 1e-6, "b1={}", fit.coefficients[1]);
        assert!(fit.coefficients[3].abs() < 1e-6, "b3={}", fit.coefficients[3]);
    }

    #[test]
    fn constant_column_leaves_deviance_unchanged() {
        let n = 2_000;
        let y: Vec<bool> = (0..n).map(|i| i % 7 == 0).collect();
        let x: Vec<f64> = (0..n).map(|i| (i % 50) as f64 / 49.0).collect();
        let base = fit_logistic(&[TermBlock::new("x", 2, x.clone())], &y, None).unwrap();
        let with_const = fit_logistic(
            &[
                TermBlock::new("x", 2, x),
                TermBlock::new("c", 1, vec![0.5; n]),
            ],
            &y,
            None,
        );
        // A constant column has a single distinct value; the precondition
        // rejects it before the solver has to cope.
        assert!(with_const.is_err());
        // A duplicated predictor is accepted (SVD pseudo-solve) and cannot
        // improve the deviance beyond round-off.
        let x2: Vec<f64> = base_x(n);
        let dup = fit_logistic(
            &[
                TermBlock::new("x", 2, x2.clone()),
                TermBlock::new("x_again", 2, x2),
            ],
            &y,
            None,
        )
        .unwrap();
        assert!(
            (dup.residual_deviance - base.residual_deviance).abs() < 1e-6,
            "{} vs {}",
            dup.residual_deviance,
            base.residual_deviance
        );
    }

    fn base_x(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i % 50) as f64 / 49.0).collect()
    }

    #[test]
    fn hierarchical_deviance_is_non_increasing() {
        let n = 5_000;
        let y: Vec<bool> = (0..n).map(|i| (i * 31) % 97 < 5).collect();
        let blocks = vec![
            TermBlock::new("a", 2, (0..n).map(|i| (i % 11) as f64 / 10.0).collect()),
            TermBlock::new("b", 2, (0..n).map(|i| ((i * 31) % 97) as f64 / 96.0).collect()),
            TermBlock::new("c", 3, (0..n).map(|i| (i % 7) as f64 / 6.0).collect()),
        ];
        let fits = hierarchical_fit(&blocks, &y).unwrap();
        assert_eq!(fits.len(), 4);
        for pair in fits.windows(2) {
            assert!(
                pair[1].residual_deviance <= pair[0].residual_deviance + 1e-9,
                "{} then {}",
                pair[0].residual_deviance,
                pair[1].residual_deviance
            );
        }
        // variable b drives the response: its entry step produces the drop
        let drop_a = fits[0].residual_deviance - fits[1].residual_deviance;
        let drop_b = fits[1].residual_deviance - fits[2].residual_deviance;
        assert!(drop_b > drop_a.max(10.0), "drop_a={drop_a} drop_b={drop_b}");
    }

    #[test]
    fn duplicate_variable_adds_nothing_in_hierarchy() {
        // Noisy response with a finite MLE; the duplicated block is pure
        // collinearity and cannot move the deviance.
        let n = 3_000;
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut state = 4242u64;
        for i in 0..n {
            let xv = (i % 61) as f64 / 60.0;
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            x.push(xv);
            y.push(u < sigmoid(-3.0 + 2.0 * xv));
        }
        let blocks = vec![
            TermBlock::new("x", 2, x.clone()),
            TermBlock::new("x_dup", 2, x),
        ];
        let fits = hierarchical_fit(&blocks, &y).unwrap();
        assert!(fits[1].converged);
        let drop = fits[1].residual_deviance - fits[2].residual_deviance;
        assert!((0.0..1e-6).contains(&drop), "collinear drop {drop}");
    }

    #[test]
    fn single_class_response_is_rejected() {
        let y = vec![false; 100];
        let err = fit_logistic(&[], &y, None).unwrap_err();
        assert!(matches!(err, Error::DegenerateStatistics(_)));
    }

    #[test]
    fn separated_data_is_flagged() {
        // Perfectly separable: y = (x > 0.5).
        let x: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
        let y: Vec<bool> = x.iter().map(|&v| v > 0.5).collect();
        let fit = fit_logistic(&[TermBlock::new("x", 1, x)], &y, None).unwrap();
        assert!(fit.separation, "expected separation flag: {fit:?}");
    }
}
