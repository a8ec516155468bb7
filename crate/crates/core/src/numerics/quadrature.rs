use crate::{Error, Result};

/// Equal-weight rule on a uniform periodic grid, `(Λ/M)·Σ samples`.
///
/// Spectrally accurate for smooth periodic integrands; exact for any
/// trigonometric polynomial of degree below `M`.
pub fn periodic_trapezoid(samples: &[f64], period: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    Ok(period / samples.len() as f64 * samples.iter().sum::<f64>())
}

/// Least-squares slope of `ln err` against `ln h`: the observed convergence
/// order of a sequence of errors at spacings `h`.
pub fn fit_order(spacings: &[f64], errors: &[f64]) -> Result<f64> {
    if spacings.len() != errors.len() {
        return Err(Error::DimensionMismatch { expected: spacings.len(), found: errors.len() });
    }
    if spacings.len() < 2 {
        return Err(Error::TooFewSamples(spacings.len()));
    }
    if spacings.iter().chain(errors).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidParameter("order fit needs positive finite spacings and errors".into()));
    }
    let n = spacings.len() as f64;
    let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(m: usize, period: f64) -> impl Iterator<Item = f64> {
        (0..m).map(move |i| i as f64 * period / m as f64)
    }

    #[test]
    fn constant() {
        let v = periodic_trapezoid(&[1.0; 16], 2.0 * PI).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn low_harmonics() {
        let c: Vec<f64> = grid(16, 2.0 * PI).map(f64::cos).collect();
        assert!(periodic_trapezoid(&c, 2.0 * PI).unwrap().abs() < 1e-14);
        // ∫₀^{2π} cos² = π
        let c2: Vec<f64> = grid(16, 2.0 * PI).map(|x| x.cos().powi(2)).collect();
        assert!((periodic_trapezoid(&c2, 2.0 * PI).unwrap() - PI).abs() < 1e-13);
    }

    #[test]
    fn too_few() {
        assert_eq!(periodic_trapezoid(&[1.0], 1.0), Err(Error::TooFewSamples(1)));
    }

    #[test]
    fn order_of_power_law() {
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let es: Vec<f64> = hs.iter().map(|h: &f64| 3.0 * h.powi(2)).collect();
        assert!((fit_order(&hs, &es).unwrap() - 2.0).abs() < 1e-12);
    }
}
