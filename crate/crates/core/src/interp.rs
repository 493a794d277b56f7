//! Piecewise cubic Hermite tables on uniform grids.

/// Samples `f(x0 + i h)` with node derivatives, evaluated by cubic Hermite
/// interpolation. Node slopes are limited (Fritsch-Carlson) so that the
/// interpolant is monotone wherever the data are; outside the table the
/// end values are held constant.
#[derive(Clone, Debug)]
pub struct UniformTable {
    x0: f64,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl UniformTable {
    pub fn new(x0: f64, h: f64, values: Vec<f64>, derivs: Vec<f64>) -> Self {
        assert!(h > 0.0 && values.len() >= 2 && values.len() == derivs.len());
        let slopes = limit_slopes(h, &values, derivs);
        UniformTable {
            x0,
            h,
            values,
            slopes,
        }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x_end(&self) -> f64 {
        self.x0 + self.h * (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + self.h * i as f64
    }

    #[inline]
    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let s = (x - self.x0) / self.h;
        let last = self.values.len() - 1;
        if !(s > 0.0) || s >= last as f64 {
            return None;
        }
        let i = (s.floor() as usize).min(last - 1);
        Some((i, s - i as f64))
    }

    /// Value at `x`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => {
                if x <= self.x0 {
                    self.values[0]
                } else {
                    self.values[self.values.len() - 1]
                }
            }
            Some((i, t)) => {
                let (y0, y1) = (self.values[i], self.values[i + 1]);
                let (m0, m1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                    + (t3 - 2.0 * t2 + t) * m0
                    + (-2.0 * t3 + 3.0 * t2) * y1
                    + (t3 - t2) * m1
            }
        }
    }

    /// Derivative of the interpolant at `x` (zero outside the table).
    #[inline]
    pub fn eval_deriv(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => 0.0,
            Some((i, t)) => {
                let (y0, y1) = (self.values[i], self.values[i + 1]);
                let (m0, m1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
                let t2 = t * t;
                ((6.0 * t2 - 6.0 * t) * y0
                    + (3.0 * t2 - 4.0 * t + 1.0) * m0
                    + (-6.0 * t2 + 6.0 * t) * y1
                    + (3.0 * t2 - 2.0 * t) * m1)
                    / self.h
            }
        }
    }
}

fn limit_slopes(h: f64, y: &[f64], mut m: Vec<f64>) -> Vec<f64> {
    let n = y.len();
    for i in 0..n - 1 {
        let delta = (y[i + 1] - y[i]) / h;
        if delta == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        if m[i] * delta < 0.0 {
            m[i] = 0.0;
        }
        if m[i + 1] * delta < 0.0 {
            m[i + 1] = 0.0;
        }
        let a = m[i] / delta;
        let b = m[i + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * delta;
            m[i + 1] = tau * b * delta;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_with_exact_slopes() {
        let h = 0.1;
        let f = |x: f64| 1.0 + x + 0.5 * x * x + 0.2 * x * x * x;
        let df = |x: f64| 1.0 + x + 0.6 * x * x;
        let xs: Vec<f64> = (0..21).map(|i| i as f64 * h).collect();
        let t = UniformTable::new(
            0.0,
            h,
            xs.iter().map(|&x| f(x)).collect(),
            xs.iter().map(|&x| df(x)).collect(),
        );
        for k in 0..200 {
            let x = 0.0013 + k as f64 * 0.00999;
            assert!((t.eval(x) - f(x)).abs() < 1e-12);
            assert!((t.eval_deriv(x) - df(x)).abs() < 1e-10);
        }
        assert_eq!(t.eval(-5.0), f(0.0));
        assert_eq!(t.eval(50.0), t.values()[20]);
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let y = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let t = UniformTable::new(0.0, 1.0, y.clone(), vec![0.0, 0.0, 3.0, 3.0, 0.0, 0.0]);
        let mut prev = t.eval(0.0);
        for k in 1..=500 {
            let v = t.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-15);
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
    }
}
