//! Natural cubic interpolating splines.

/// A natural cubic spline through `(knots[i], values[i])`.
///
/// One knot gives a constant, two knots a straight line.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalCubicSpline {
    /// `knots` must be strictly increasing and as long as `values`.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(knots.len(), values.len(), "knots and values differ in length");
        assert!(!knots.is_empty(), "spline needs at least one knot");
        debug_assert!(knots.windows(2).all(|w| w[0] < w[1]));
        let second = second_derivatives(&knots, &values);
        Self { knots, values, second }
    }

    /// Spline through `values` at `values.len()` equispaced knots spanning `[lo, hi]`.
    ///
    /// A degenerate span collapses to the constant `values[0]`.
    pub fn uniform(lo: f64, hi: f64, values: Vec<f64>) -> Self {
        let k = values.len();
        if k == 1 || hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
            return Self::new(vec![lo], vec![values[0]]);
        }
        let step = (hi - lo) / (k - 1) as f64;
        let mut knots: Vec<f64> = (0..k).map(|i| lo + step * i as f64).collect();
        knots[k - 1] = hi;
        Self::new(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.knots.len();
        if k == 1 {
            return self.values[0];
        }
        // segment index i with knots[i] <= x < knots[i+1], clamped to the ends
        let i = match self.knots.partition_point(|&t| t <= x) {
            0 => 0,
            p => (p - 1).min(k - 2),
        };
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }
}

/// Second derivatives at the knots with zero curvature at both ends (Thomas algorithm).
fn second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let k = x.len();
    let mut m = vec![0.0; k];
    if k < 3 {
        return m;
    }
    let inner = k - 2;
    let mut diag = vec![0.0; inner];
    let mut upper = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    for r in 0..inner {
        let i = r + 1;
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[r] = 2.0 * (h0 + h1);
        upper[r] = h1;
        rhs[r] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    // sub-diagonal entry of row r is h0 of row r, which equals upper[r-1]
    for r in 1..inner {
        let w = upper[r - 1] / diag[r - 1];
        diag[r] -= w * upper[r - 1];
        rhs[r] -= w * rhs[r - 1];
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for r in (0..inner - 1).rev() {
        m[r + 1] = (rhs[r] - upper[r] * m[r + 2]) / diag[r];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_knots() {
        let s = NaturalCubicSpline::uniform(-1.5, 2.0, vec![0.3, -1.0, 2.2, 0.0, 0.7]);
        for (t, v) in s.knots().iter().zip(s.values()) {
            assert!((s.eval(*t) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_and_linear() {
        let c = NaturalCubicSpline::uniform(0.0, 1.0, vec![4.0]);
        assert_eq!(c.eval(-3.0), 4.0);
        assert_eq!(c.eval(0.5), 4.0);
        let l = NaturalCubicSpline::uniform(0.0, 2.0, vec![1.0, 3.0]);
        assert!((l.eval(0.5) - 1.5).abs() < 1e-15);
        assert!((l.eval(1.7) - 2.7).abs() < 1e-12);
    }

    #[test]
    fn reproduces_a_line_exactly() {
        // natural splines reproduce linear data
        let s = NaturalCubicSpline::uniform(0.0, 4.0, vec![1.0, 3.0, 5.0, 7.0, 9.0]);
        assert!((s.eval(2.3) - 5.6).abs() < 1e-12);
    }

    #[test]
    fn natural_end_conditions_match_hand_solution() {
        // three knots at 0, 1, 2 with values 0, 1, 0: the single interior second
        // derivative solves 4·M1 = 6·(−1 − 1) → M1 = −3, so f(0.5) = 0.5 + (−0.375)(−3)/6
        let s = NaturalCubicSpline::uniform(0.0, 2.0, vec![0.0, 1.0, 0.0]);
        assert!((s.eval(0.5) - 0.6875).abs() < 1e-14);
    }
}
