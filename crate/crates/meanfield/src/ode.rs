//! Adaptive Dormand-Prince 5(4) integration of `y' = f(t, y)`.

use crate::error::{MeanFieldError, MeanFieldResult};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step.
    pub h_max: f64,
    pub h_min: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: 0.05, h_min: 1e-12 }
    }
}

/// Accepted steps with the derivative at each point, enough for cubic
/// Hermite interpolation between them.
#[derive(Debug, Clone, Default)]
pub struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub dy: Vec<Vec<f64>>,
}

impl Solution {
    /// Cubic Hermite interpolant on the step `[t[i], t[i+1]]`.
    pub fn interpolate(&self, i: usize, t: f64) -> Vec<f64> {
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (h00, h10) = (2.0 * s * s * s - 3.0 * s * s + 1.0, s * s * s - 2.0 * s * s + s);
        let (h01, h11) = (-2.0 * s * s * s + 3.0 * s * s, s * s * s - s * s);
        (0..self.y[i].len())
            .map(|k| {
                h00 * self.y[i][k] + h10 * h * self.dy[i][k] + h01 * self.y[i + 1][k] + h11 * h * self.dy[i + 1][k]
            })
            .collect()
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub fn dopri5<F>(mut f: F, t0: f64, y0: &[f64], t_end: f64, opts: OdeOptions) -> MeanFieldResult<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    f(t, &y, &mut k[0]);
    let mut sol = Solution { t: vec![t], y: vec![y.clone()], dy: vec![k[0].clone()] };
    let mut h = opts.h_max.min(1e-3 * (t_end - t0).abs().max(1e-3));
    let mut tmp = vec![0.0; n];
    let mut y5 = vec![0.0; n];
    while t < t_end {
        h = h.min(t_end - t).min(opts.h_max);
        for stage in 1..7 {
            for i in 0..n {
                tmp[i] = y[i] + h * (0..stage).map(|j| A[stage][j] * k[j][i]).sum::<f64>();
            }
            f(t + C[stage] * h, &tmp, &mut k[stage]);
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            y5[i] = y[i] + h * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>();
            let y4 = y[i] + h * (0..7).map(|j| B4[j] * k[j][i]).sum::<f64>();
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4) / sc).abs());
        }
        if !err.is_finite() {
            err = f64::INFINITY;
        }
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y5);
            // First-same-as-last: stage 7 was evaluated at the new point.
            let last = k[6].clone();
            k[0] = last;
            sol.t.push(t);
            sol.y.push(y.clone());
            sol.dy.push(k[0].clone());
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < opts.h_min && t < t_end {
            return Err(MeanFieldError::Stiffness { t, h });
        }
    }
    Ok(sol)
}
