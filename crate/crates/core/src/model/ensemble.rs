use super::ModelError;

/// Elementwise geometric mean of distributions, renormalized to sum to one.
pub fn ensemble(distributions: &[&[f64]]) -> Result<Vec<f64>, ModelError> {
    let first = distributions.first().ok_or_else(|| ModelError::Mismatch("no distributions to ensemble".into()))?;
    let n = first.len();
    if let Some(d) = distributions.iter().find(|d| d.len() != n) {
        return Err(ModelError::Mismatch(format!("distribution sizes {} and {}", n, d.len())));
    }
    let k = distributions.len() as f64;
    let mut logs: Vec<f64> = (0..n).map(|i| distributions.iter().map(|d| d[i].ln()).sum::<f64>() / k).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(vec![1.0 / n as f64; n]);
    }
    let mut sum = 0.0;
    for l in logs.iter_mut() {
        *l = (*l - max).exp();
        sum += *l;
    }
    logs.iter_mut().for_each(|l| *l /= sum);
    Ok(logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identical_inputs_are_returned() {
        let d = [0.7, 0.2, 0.1];
        for k in 1..=20 {
            let many = vec![&d[..]; k];
            assert!(close(&ensemble(&many).unwrap(), &d, 1e-12));
        }
    }

    #[test]
    fn hand_computed_examples() {
        assert!(close(&ensemble(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap(), &[0.5, 0.5], 1e-12));
        assert!(close(&ensemble(&[&[0.9, 0.1], &[0.1, 0.9]]).unwrap(), &[0.5, 0.5], 1e-12));
        // sqrt(0.8 * 0.5) : sqrt(0.2 * 0.5)
        let want = [0.4f64.sqrt() / (0.4f64.sqrt() + 0.1f64.sqrt()), 0.1f64.sqrt() / (0.4f64.sqrt() + 0.1f64.sqrt())];
        assert!(close(&ensemble(&[&[0.8, 0.2], &[0.5, 0.5]]).unwrap(), &want, 1e-12));
    }

    #[test]
    fn order_does_not_matter() {
        let a = [0.6, 0.3, 0.1];
        let b = [0.2, 0.2, 0.6];
        let c = [0.1, 0.8, 0.1];
        let x = ensemble(&[&a, &b, &c]).unwrap();
        let y = ensemble(&[&c, &a, &b]).unwrap();
        assert!(close(&x, &y, 1e-15));
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        assert!(ensemble(&[&[0.5, 0.5], &[1.0]]).is_err());
        assert!(ensemble(&[]).is_err());
    }
}
