//! Small fitting helpers shared by the diagnostics.

/// Ordinary least-squares slope through `(x, y)` points.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Convergence order from successive differences of a sequence computed at
/// spacings h, h/2, h/4, ...: `log2(|e_k - e_{k+1}| / |e_{k+1} - e_{k+2}|)`.
pub fn observed_orders(values: &[f64]) -> Vec<f64> {
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    diffs.windows(2).map(|d| (d[0] / d[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        assert!((least_squares_slope(&pts) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn orders_of_quartic_error() {
        let vals: Vec<f64> = (0..4).map(|k| 1.0 + 0.5f64.powi(4 * k)).collect();
        for o in observed_orders(&vals) {
            assert!((o - 4.0).abs() < 1e-9);
        }
    }
}
