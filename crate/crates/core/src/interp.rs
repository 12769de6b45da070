//! One-dimensional interpolants over strictly increasing knots.
//!
//! Callers are responsible for domain checks; evaluation clamps to the end
//! knots.

/// Index `k` of the segment `[x[k], x[k+1]]` containing `xq`.
fn segment(x: &[f64], xq: f64) -> usize {
    let n = x.len();
    if xq <= x[0] {
        0
    } else if xq >= x[n - 1] {
        n - 2
    } else {
        x.partition_point(|&xi| xi <= xq) - 1
    }
}

pub fn linear(x: &[f64], y: &[f64], xq: f64) -> f64 {
    let k = segment(x, xq);
    let xq = xq.clamp(x[0], x[x.len() - 1]);
    if xq == x[k] {
        return y[k];
    }
    if xq == x[k + 1] {
        return y[k + 1];
    }
    let t = (xq - x[k]) / (x[k + 1] - x[k]);
    y[k] + t * (y[k + 1] - y[k])
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson
/// slopes with the three-point endpoint rule). Monotone data yields a
/// monotone interpolant that never leaves the range of its bracketing knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    slopes: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        debug_assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = y
            .windows(2)
            .zip(&h)
            .map(|(w, hk)| (w[1] - w[0]) / hk)
            .collect();

        if n == 2 {
            return Self {
                slopes: vec![delta[0]; 2],
            };
        }

        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            let (s1, s2) = (delta[k - 1], delta[k]);
            if s1 == 0.0 || s2 == 0.0 || s1.signum() != s2.signum() {
                d[k] = 0.0;
            } else {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / s1 + w2 / s2);
            }
        }
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Self { slopes: d }
    }

    pub fn eval(&self, x: &[f64], y: &[f64], xq: f64) -> f64 {
        let k = segment(x, xq);
        let xq = xq.clamp(x[0], x[x.len() - 1]);
        if xq == x[k] {
            return y[k];
        }
        if xq == x[k + 1] {
            return y[k + 1];
        }
        let h = x[k + 1] - x[k];
        let t = (xq - x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v =
            h00 * y[k] + h10 * h * self.slopes[k] + h01 * y[k + 1] + h11 * h * self.slopes[k + 1];
        // rounding can push the Hermite sum a few ulps outside the bracket
        let (lo, hi) = if y[k] <= y[k + 1] {
            (y[k], y[k + 1])
        } else {
            (y[k + 1], y[k])
        };
        v.clamp(lo, hi)
    }
}

fn end_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d.signum() != s0.signum() || s0 == 0.0 {
        0.0
    } else if s0.signum() != s1.signum() && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}
