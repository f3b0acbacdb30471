//! Polynomial extrapolation to zero and least-squares line fits.

use crate::error::{Error, Result};
use crate::quadrature::Quantity;

/// Extrapolated limit with an error bar.
#[derive(Clone, Debug, PartialEq)]
pub struct Extrapolated<T> {
    pub value: T,
    /// Distance between the full extrapolation and the one dropping the
    /// sample farthest from zero.
    pub error: f64,
    pub samples: Vec<(f64, T)>,
}

/// Value at x = 0 of the interpolating polynomial through (xs, ys) (Neville).
pub fn neville_at_zero<T: Quantity>(xs: &[f64], ys: &[T]) -> T {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let mut p: Vec<T> = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            // P = (x_j·P_i − x_i·P_{i+1}) / (x_j − x_i) evaluated at 0
            let num = p[i].scaled(xj) + p[i + 1].scaled(-xi);
            p[i] = num.scaled(1.0 / (xj - xi));
        }
    }
    p.swap_remove(0)
}

/// Richardson extrapolation of `f(t)` to t → 0 from the given steps.
///
/// Samples are ordered as given; the error bar compares against the
/// extrapolation that omits the sample with the largest |t|.
pub fn richardson<T, F>(steps: &[f64], mut f: F) -> Result<Extrapolated<T>>
where
    T: Quantity,
    F: FnMut(f64) -> Result<T>,
{
    if steps.len() < 2 {
        return Err(Error::InvalidArgument("Richardson needs at least two steps".into()));
    }
    let mut samples = Vec::with_capacity(steps.len());
    for &t in steps {
        samples.push((t, f(t)?));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<T> = samples.iter().map(|s| s.1.clone()).collect();
    let value = neville_at_zero(&xs, &ys);
    let far = xs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (rx, ry): (Vec<f64>, Vec<T>) = xs
        .iter()
        .zip(&ys)
        .enumerate()
        .filter(|(i, _)| *i != far)
        .map(|(_, (x, y))| (*x, y.clone()))
        .unzip();
    let reduced = neville_at_zero(&rx, &ry);
    let error = (reduced + value.scaled(-1.0)).magnitude();
    Ok(Extrapolated { value, error, samples })
}

/// Least-squares line y ≈ intercept + slope·x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// max_i |y_i − fit_i| / max(|y_i|, tiny)
    pub max_relative_residual: f64,
    pub max_abs_residual: f64,
}

impl LineFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::FitFailure("need at least two matched samples".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::FitFailure("non-finite sample".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitFailure("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut max_rel: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let r = (y - (intercept + slope * x)).abs();
        max_abs = max_abs.max(r);
        max_rel = max_rel.max(r / y.abs().max(f64::MIN_POSITIVE));
    }
    Ok(LineFit {
        intercept,
        slope,
        max_relative_residual: max_rel,
        max_abs_residual: max_abs,
    })
}

/// Exponent α of y ∝ t^α from a log–log line fit.
///
/// Fails when the t range spans less than one decade or any y is not
/// strictly positive.
pub fn power_law_exponent(ts: &[f64], ys: &[f64]) -> Result<LineFit> {
    let (lo, hi) = ts
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), t| (lo.min(*t), hi.max(*t)));
    if !(lo > 0.0) || hi / lo < 10.0 {
        return Err(Error::FitFailure(format!(
            "insufficient dynamic range in t: [{lo:.3e}, {hi:.3e}]"
        )));
    }
    if ys.iter().any(|y| !(*y > 0.0) || !y.is_finite()) {
        return Err(Error::FitFailure("non-positive magnitude in power-law fit".into()));
    }
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_recovers_polynomial_constant() {
        let xs = [0.1, 0.01, 0.001];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 2.0 * x - 5.0 * x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_reports_error_bar() {
        let r = richardson(&[1e-2, 1e-3, 1e-4], |t| Ok(1.0 + t + t.powi(3))).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        assert!(r.error < 1e-6);
        assert_eq!(r.samples.len(), 3);
    }

    #[test]
    fn power_law_slope() {
        let ts = [1e-1, 1e-2, 1e-3];
        let ys: Vec<f64> = ts.iter().map(|t| 7.0 * t * t).collect();
        let fit = power_law_exponent(&ts, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_needs_dynamic_range() {
        assert!(matches!(
            power_law_exponent(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::FitFailure(_))
        ));
        assert!(power_law_exponent(&[1e-2, 1.0], &[0.0, 1.0]).is_err());
    }
}
