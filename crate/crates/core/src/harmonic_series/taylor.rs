//! Power-series-in-`y` evaluation of the Cauchy solution,
//!
//! `h = Σ_k (-1)^k [ g^(2k)(x) s^(2k)/(2k)! + f^(2k)(x) s^(2k+1)/(2k+1)! ]`,
//!
//! kept as an independent path to cross-check the mode solution.

use super::strip::CauchyData;

/// Evaluate the Cauchy solution at `(x, y)` by summing at most
/// `max_terms` pairs of the series. Stops early once a pair contributes
/// less than `1e-17` relative to the running sum.
pub fn taylor_eval(data: &CauchyData, x: f64, y: f64, max_terms: usize) -> f64 {
    let s = y - data.y0;
    let mut sum = 0.0;
    // s^(2k)/(2k)!
    let mut even = 1.0;
    for k in 0..max_terms {
        let order = 2 * k as u32;
        let odd = even * s / (2 * k + 1) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign
            * (data.g.eval_derivative(x, order) * even + data.f.eval_derivative(x, order) * odd);
        sum += term;
        if k > 2 && term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        even = odd * s / (2 * k + 2) as f64;
    }
    sum
}
