//! Small numeric helpers shared across modules.

use num_complex::Complex64;

/// Neumaier-compensated sum; result does not depend on how the input was
/// produced, only on its order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

pub fn compensated_mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

pub fn compensated_sum_complex<I: IntoIterator<Item = Complex64>>(values: I) -> Complex64 {
    let (re, im): (Vec<f64>, Vec<f64>) = values.into_iter().map(|c| (c.re, c.im)).unzip();
    Complex64::new(compensated_sum(re), compensated_sum(im))
}

/// Rounds to 15 significant decimal digits, so that printing with
/// `{:.14e}` and parsing back reproduces the value bit for bit.
pub fn round_to_15_digits(x: f64) -> f64 {
    format!("{x:.14e}").parse().expect("formatted float parses")
}

/// `steps` log-spaced points from `min` to `max` inclusive, each rounded to
/// 15 significant digits. Endpoints are exact.
pub fn log_spaced(min: f64, max: f64, steps: usize) -> Vec<f64> {
    spaced(min, max, steps, |a, b, f| {
        (a.ln() + f * (b.ln() - a.ln())).exp()
    })
}

/// `steps` evenly spaced points from `min` to `max` inclusive, rounded as in
/// [`log_spaced`].
pub fn linear_spaced(min: f64, max: f64, steps: usize) -> Vec<f64> {
    spaced(min, max, steps, |a, b, f| a + f * (b - a))
}

fn spaced(min: f64, max: f64, steps: usize, interp: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![round_to_15_digits(min)],
        _ => (0..steps)
            .map(|i| {
                let x = if i == 0 {
                    min
                } else if i == steps - 1 {
                    max
                } else {
                    interp(min, max, i as f64 / (steps - 1) as f64)
                };
                round_to_15_digits(x)
            })
            .collect(),
    }
}
