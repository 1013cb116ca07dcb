//! The three regression models used by the analysis: ordinary least
//! squares for `y ~ 1 + x + x^2`, log-log OLS for power laws, and damped
//! Gauss-Newton for the rational decay `y = a / (1 + b x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::numeric::pearson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Quadratic,
    LogLog,
    Rational,
}

/// A fitted model with the usual OLS summary fields. For the log-log model
/// residuals live in log space; for the rational model `f_statistic` and
/// `p_value` are absent and `correlation` carries the Pearson correlation
/// between fitted and observed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub model: ModelKind,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub residual_std_error: f64,
    pub rss: f64,
    pub residuals: Vec<f64>,
    pub f_statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub correlation: Option<f64>,
    pub converged: bool,
    pub iterations: u32,
}

// ---------------------------------------------------------------------------
// linear least squares (Householder QR, at most 3 columns)

/// Solve `min ||A beta - y||` for a full-rank `n x p` design, `p <= n`.
/// Returns `None` when the design is (numerically) rank deficient.
fn householder_lstsq(a: &[f64], n: usize, p: usize, y: &[f64]) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * p);
    debug_assert_eq!(y.len(), n);
    let mut r = a.to_vec(); // row-major working copy
    let mut q_t_y = y.to_vec();
    let col_scale = (0..p)
        .map(|k| (0..n).map(|i| r[i * p + k] * r[i * p + k]).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    for k in 0..p {
        // Householder vector for column k below the diagonal
        let mut norm = 0.0;
        for i in k..n {
            norm += r[i * p + k] * r[i * p + k];
        }
        let norm = norm.sqrt();
        if norm <= 1e-12 * col_scale.max(1.0) {
            return None; // dependent column
        }
        let alpha = if r[k * p + k] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| r[i * p + k]).collect();
        v[0] -= alpha;
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if v_norm_sq > 0.0 {
            for col in k..p {
                let dot: f64 = (k..n).map(|i| v[i - k] * r[i * p + col]).sum();
                let f = 2.0 * dot / v_norm_sq;
                for i in k..n {
                    r[i * p + col] -= f * v[i - k];
                }
            }
            let dot: f64 = (k..n).map(|i| v[i - k] * q_t_y[i]).sum();
            let f = 2.0 * dot / v_norm_sq;
            for i in k..n {
                q_t_y[i] -= f * v[i - k];
            }
        }
        r[k * p + k] = alpha;
    }
    // back substitution
    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = q_t_y[k];
        for j in k + 1..p {
            s -= r[k * p + j] * beta[j];
        }
        if r[k * p + k].abs() <= 1e-12 * col_scale.max(1.0) {
            return None;
        }
        beta[k] = s / r[k * p + k];
    }
    Some(beta)
}

fn r_squared(y: &[f64], rss: f64) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if tss == 0.0 {
        // constant data perfectly explained by the intercept
        return 1.0;
    }
    1.0 - rss / tss
}

fn ols_summary(
    model: ModelKind,
    beta: Vec<f64>,
    fitted: Vec<f64>,
    y: &[f64],
) -> RegressionFit {
    let p = beta.len();
    let n = y.len();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let r2 = r_squared(y, rss);
    let df = (n - p) as f64;
    let rse = (rss / df).sqrt();
    // overall F test against the intercept-only model
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let f = ((tss - rss) / (p as f64 - 1.0)) / (rss / df);
    let (f_statistic, p_value) = if f.is_finite() && rss > 0.0 {
        (Some(f), Some(f_sf(f, p as f64 - 1.0, df)))
    } else {
        // an exact interpolation: infinite F, zero p
        (None, Some(0.0))
    };
    RegressionFit {
        model,
        coefficients: beta,
        r_squared: r2,
        residual_std_error: rse,
        rss,
        residuals,
        f_statistic,
        p_value,
        correlation: Some(pearson(&fitted, y)),
        converged: true,
        iterations: 0,
    }
}

/// OLS fit of `y ~ 1 + x + x^2`. Needs at least four points and three
/// distinct abscissas.
pub fn fit_quadratic(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    if x.len() != y.len() {
        return Err(SimError::Config("x and y lengths differ".into()));
    }
    if x.len() < 4 {
        return Err(SimError::Config(format!(
            "quadratic fit needs >= 4 points, got {}",
            x.len()
        )));
    }
    let n = x.len();
    let mut a = Vec::with_capacity(n * 3);
    for &xi in x {
        a.extend_from_slice(&[1.0, xi, xi * xi]);
    }
    let beta = householder_lstsq(&a, n, 3, y)
        .ok_or_else(|| SimError::Config("degenerate design: need 3 distinct x values".into()))?;
    let fitted: Vec<f64> = x
        .iter()
        .map(|&xi| beta[0] + beta[1] * xi + beta[2] * xi * xi)
        .collect();
    Ok(ols_summary(ModelKind::Quadratic, beta, fitted, y))
}

/// OLS fit of `log y ~ a + b log x`; the slope is the power-law exponent.
/// All data must be strictly positive. Residuals are in log space.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    if x.len() != y.len() {
        return Err(SimError::Config("x and y lengths differ".into()));
    }
    if x.len() < 3 {
        return Err(SimError::Config(format!(
            "log-log fit needs >= 3 points, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|&v| v <= 0.0) {
        return Err(SimError::Config(
            "log-log fit requires strictly positive data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len();
    let mut a = Vec::with_capacity(n * 2);
    for &xi in &lx {
        a.extend_from_slice(&[1.0, xi]);
    }
    let beta = householder_lstsq(&a, n, 2, &ly)
        .ok_or_else(|| SimError::Config("degenerate design: need 2 distinct x values".into()))?;
    let fitted: Vec<f64> = lx.iter().map(|&xi| beta[0] + beta[1] * xi).collect();
    Ok(ols_summary(ModelKind::LogLog, beta, fitted, &ly))
}

/// Nonlinear least squares for `y = a / (1 + b x)` by Gauss-Newton with
/// Levenberg-style damping. Non-convergence within `max_iter` is reported
/// through `converged`, not as an error.
pub fn fit_rational_with(
    x: &[f64],
    y: &[f64],
    a_init: f64,
    b_init: f64,
    max_iter: u32,
) -> Result<RegressionFit> {
    if x.len() != y.len() {
        return Err(SimError::Config("x and y lengths differ".into()));
    }
    if x.len() < 3 {
        return Err(SimError::Config(format!(
            "rational fit needs >= 3 points, got {}",
            x.len()
        )));
    }
    if x.iter().any(|&xi| 1.0 + b_init * xi <= 0.0) {
        return Err(SimError::Config(format!(
            "b_init = {b_init} puts a pole inside the data range"
        )));
    }

    let rss_of = |a: f64, b: f64| -> f64 {
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let r = yi - a / (1.0 + b * xi);
                r * r
            })
            .sum()
    };

    let (mut a, mut b) = (a_init, b_init);
    let mut rss = rss_of(a, b);
    let mut mu = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        // normal equations of the linearized problem
        let mut jtj = [0.0f64; 4]; // [aa, ab, ab, bb]
        let mut jtr = [0.0f64; 2];
        for (&xi, &yi) in x.iter().zip(y) {
            let den = 1.0 + b * xi;
            let fi = a / den;
            let r = yi - fi;
            let ja = 1.0 / den; // d f / d a
            let jb = -a * xi / (den * den); // d f / d b
            jtj[0] += ja * ja;
            jtj[1] += ja * jb;
            jtj[3] += jb * jb;
            jtr[0] += ja * r;
            jtr[1] += jb * r;
        }
        let mut accepted = false;
        for _ in 0..25 {
            let m00 = jtj[0] + mu;
            let m11 = jtj[3] + mu;
            let det = m00 * m11 - jtj[1] * jtj[1];
            if det.abs() < 1e-300 {
                mu *= 4.0;
                continue;
            }
            let da = (jtr[0] * m11 - jtj[1] * jtr[1]) / det;
            let db = (m00 * jtr[1] - jtj[1] * jtr[0]) / det;
            let (na, nb) = (a + da, b + db);
            // reject steps that move a pole into the data
            let pole_free = x.iter().all(|&xi| 1.0 + nb * xi > 0.0);
            let new_rss = if pole_free { rss_of(na, nb) } else { f64::INFINITY };
            if new_rss <= rss {
                let step = (da * da + db * db).sqrt();
                let scale = (a * a + b * b).sqrt().max(1.0);
                a = na;
                b = nb;
                rss = new_rss;
                mu = (mu / 3.0).max(1e-12);
                accepted = true;
                if step <= 1e-10 * scale {
                    converged = true;
                }
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            // damping found no improving step: a numerical minimum
            converged = true;
        }
        if converged {
            break;
        }
    }

    let fitted: Vec<f64> = x.iter().map(|&xi| a / (1.0 + b * xi)).collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    let df = (x.len() as isize - 2).max(1) as f64;
    Ok(RegressionFit {
        model: ModelKind::Rational,
        coefficients: vec![a, b],
        r_squared: r_squared(y, rss),
        residual_std_error: (rss / df).sqrt(),
        rss,
        residuals,
        f_statistic: None,
        p_value: None,
        correlation: Some(pearson(&fitted, y)),
        converged,
        iterations,
    })
}

/// [`fit_rational_with`] at the standard iteration budget (200).
pub fn fit_rational(x: &[f64], y: &[f64], a_init: f64, b_init: f64) -> Result<RegressionFit> {
    fit_rational_with(x, y, a_init, b_init, 200)
}

// ---------------------------------------------------------------------------
// F distribution survival function via the regularized incomplete beta

fn ln_gamma(z: f64) -> f64 {
    // Lanczos approximation, g = 7
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        // reflection
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * z).sin().ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Regularized incomplete beta `I_x(a, b)` by the Lentz continued
/// fraction.
pub(crate) fn betainc_reg(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0 && (0.0..=1.0).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let front = (a * x.ln() + b * (1.0 - x).ln() + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b))
        .exp();
    let symmetric = x >= (a + 1.0) / (a + b + 2.0);
    let (a, b, x) = if symmetric { (b, a, 1.0 - x) } else { (a, b, x) };
    // modified Lentz
    let tiny = 1e-300;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..300 {
        let m = m as f64;
        let num = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        d = 1.0 + num * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + num / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        let num = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + num * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + num / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-15 {
            break;
        }
    }
    let value = front * h / a;
    if symmetric {
        1.0 - value
    } else {
        value
    }
}

/// Survival function of the F(d1, d2) distribution.
pub(crate) fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    betainc_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}
