//! Small dense-free linear algebra, interpolation and quadrature kernels
//! shared by the solvers.

use serde::{Deserialize, Serialize};

/// Solves a tridiagonal system in place with the Thomas algorithm.
///
/// `lower[i]` couples row `i` to `i - 1` (`lower[0]` unused), `upper[i]`
/// couples row `i` to `i + 1` (last entry unused). `rhs` is overwritten with
/// the solution. No pivoting: callers pass diagonally dominant or symmetric
/// positive definite matrices.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return;
    }
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / beta;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Tridiagonal matrix with a precomputed LU factorisation for repeated solves.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    inv_beta: Vec<f64>,
    c: Vec<f64>,
}

impl TridiagonalLu {
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        let mut c = vec![0.0; n];
        let mut inv_beta = vec![0.0; n];
        if n > 0 {
            inv_beta[0] = 1.0 / diag[0];
            c[0] = upper[0] * inv_beta[0];
            for i in 1..n {
                let beta = diag[i] - lower[i] * c[i - 1];
                inv_beta[i] = 1.0 / beta;
                c[i] = upper[i] * inv_beta[i];
            }
        }
        Self {
            lower: lower.to_vec(),
            inv_beta,
            c,
        }
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.inv_beta.len();
        if n == 0 {
            return;
        }
        rhs[0] *= self.inv_beta[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_beta[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.c[i] * rhs[i + 1];
        }
    }

    /// Solves a strided slice in place (`rhs[offset + k * stride]`).
    pub fn solve_strided(&self, rhs: &mut [f64], offset: usize, stride: usize) {
        let n = self.inv_beta.len();
        if n == 0 {
            return;
        }
        let at = |k: usize| offset + k * stride;
        rhs[at(0)] *= self.inv_beta[0];
        for i in 1..n {
            rhs[at(i)] = (rhs[at(i)] - self.lower[i] * rhs[at(i - 1)]) * self.inv_beta[i];
        }
        for i in (0..n - 1).rev() {
            rhs[at(i)] -= self.c[i] * rhs[at(i + 1)];
        }
    }
}

/// Square banded matrix stored by diagonals, factorised without pivoting.
///
/// Entry `(i, j)` with `i - kl <= j <= i + ku` lives at
/// `data[i * width + (j + kl - i)]`.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    factored: bool,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku, "({i},{j}) outside band");
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    /// y = A x (only valid before factorisation).
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert!(!self.factored);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.data[self.slot(i, j)] * x[j];
            }
            y[i] = acc;
        }
    }

    /// In-place LU without pivoting. Multipliers overwrite the strict lower band.
    pub fn factor(&mut self) {
        assert!(!self.factored);
        let n = self.n;
        for k in 0..n {
            let pivot = self.data[self.slot(k, k)];
            let row_hi = (k + self.kl).min(n - 1);
            let col_hi = (k + self.ku).min(n - 1);
            for i in k + 1..=row_hi {
                let s = self.slot(i, k);
                let m = self.data[s] / pivot;
                self.data[s] = m;
                if m != 0.0 {
                    for j in k + 1..=col_hi {
                        let skj = self.data[self.slot(k, j)];
                        let sij = self.slot(i, j);
                        self.data[sij] -= m * skj;
                    }
                }
            }
        }
        self.factored = true;
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        assert!(self.factored, "factor() first");
        let n = self.n;
        for i in 0..n {
            let lo = i.saturating_sub(self.kl);
            let mut acc = rhs[i];
            for j in lo..i {
                acc -= self.data[self.slot(i, j)] * rhs[j];
            }
            rhs[i] = acc;
        }
        for i in (0..n).rev() {
            let hi = (i + self.ku).min(n - 1);
            let mut acc = rhs[i];
            for j in i + 1..=hi {
                acc -= self.data[self.slot(i, j)] * rhs[j];
            }
            rhs[i] = acc / self.data[self.slot(i, i)];
        }
    }

    /// Strided variant of [`solve_in_place`](Self::solve_in_place).
    pub fn solve_strided(&self, rhs: &mut [f64], offset: usize, stride: usize) {
        assert!(self.factored, "factor() first");
        let n = self.n;
        let at = |k: usize| offset + k * stride;
        for i in 0..n {
            let lo = i.saturating_sub(self.kl);
            let mut acc = rhs[at(i)];
            for j in lo..i {
                acc -= self.data[self.slot(i, j)] * rhs[at(j)];
            }
            rhs[at(i)] = acc;
        }
        for i in (0..n).rev() {
            let hi = (i + self.ku).min(n - 1);
            let mut acc = rhs[at(i)];
            for j in i + 1..=hi {
                acc -= self.data[self.slot(i, j)] * rhs[at(j)];
            }
            rhs[at(i)] = acc / self.data[self.slot(i, i)];
        }
    }
}

/// Quadrature rule on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[default]
    Trapezoid,
    Simpson,
}

impl Quadrature {
    /// Weights for `n` nodes with spacing `h`. Simpson needs an odd node count.
    pub fn weights(self, n: usize, h: f64) -> Option<Vec<f64>> {
        if n < 2 {
            return None;
        }
        match self {
            Quadrature::Trapezoid => {
                let mut w = vec![h; n];
                w[0] = 0.5 * h;
                w[n - 1] = 0.5 * h;
                Some(w)
            }
            Quadrature::Simpson => {
                if n.is_multiple_of(2) {
                    return None;
                }
                let mut w = vec![0.0; n];
                for (i, wi) in w.iter_mut().enumerate() {
                    *wi = if i == 0 || i == n - 1 {
                        h / 3.0
                    } else if i % 2 == 1 {
                        4.0 * h / 3.0
                    } else {
                        2.0 * h / 3.0
                    };
                }
                Some(w)
            }
        }
    }
}

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// Cubic Hermite interpolation of samples `(y, dy)` on a uniform grid.
/// Returns `None` outside `[x0, x0 + (n - 1) h]`.
pub fn hermite_eval(x0: f64, h: f64, y: &[f64], dy: &[f64], x: f64) -> Option<(f64, f64)> {
    let n = y.len();
    let s = (x - x0) / h;
    if !(s >= 0.0 && s <= (n - 1) as f64) {
        return None;
    }
    let i = (s.floor() as usize).min(n - 2);
    let t = s - i as f64;
    let (y0, y1) = (y[i], y[i + 1]);
    let (m0, m1) = (dy[i] * h, dy[i + 1] * h);
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
    let d00 = 6.0 * t2 - 6.0 * t;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = -6.0 * t2 + 6.0 * t;
    let d11 = 3.0 * t2 - 2.0 * t;
    let d = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
    Some((v, d))
}

/// Four-point Lagrange (cubic) interpolation on a uniform grid, clamped to
/// the end values outside the grid.
pub fn cubic_lagrange_eval(x0: f64, h: f64, y: &[f64], x: f64) -> f64 {
    let n = y.len();
    let s = (x - x0) / h;
    if s <= 0.0 {
        return y[0];
    }
    if s >= (n - 1) as f64 {
        return y[n - 1];
    }
    if n < 4 {
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        return y[i] * (1.0 - t) + y[i + 1] * t;
    }
    let i = (s.floor() as usize).clamp(1, n - 3);
    let t = s - i as f64;
    let (p0, p1, p2, p3) = (y[i - 1], y[i], y[i + 1], y[i + 2]);
    // nodes at -1, 0, 1, 2
    let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    l0 * p0 + l1 * p1 + l2 * p2 + l3 * p3
}

/// Ordinary least squares fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 0.0 } else { sxy * sxy / (sxx * syy) };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
        n,
    })
}

/// Linear-interpolated location where `values` first crosses `level` going
/// from above to below (scanning left to right). Returns the last such
/// crossing so a trailing plateau does not hide the front.
pub fn level_crossing(x0: f64, h: f64, values: &[f64], level: f64) -> Option<f64> {
    let mut found = None;
    for i in 0..values.len().saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if a >= level && b < level {
            let t = (a - level) / (a - b);
            found = Some(x0 + h * (i as f64 + t));
        }
    }
    found
}

/// Fourth-order finite-difference derivative on a uniform grid, centered in
/// the interior and one-sided on the two nodes nearest each end.
pub fn derivative_4th(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 5, "need at least 5 samples");
    let mut d = vec![0.0; n];
    let s = 1.0 / (12.0 * h);
    for i in 2..n - 2 {
        d[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) * s;
    }
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * s;
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * s;
    d[n - 1] =
        (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5]) * s;
    d[n - 2] =
        (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]) * s;
    d
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_banded() {
        let n = 7;
        let lower: Vec<f64> = (0..n).map(|i| -1.0 - 0.1 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.5 + 0.05 * i as f64).collect();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();

        let mut x1 = b.clone();
        solve_tridiagonal(&lower, &diag, &upper, &mut x1);

        let mut m = BandedMatrix::zeros(n, 1, 1);
        for i in 0..n {
            m.set(i, i, diag[i]);
            if i > 0 {
                m.set(i, i - 1, lower[i]);
            }
            if i + 1 < n {
                m.set(i, i + 1, upper[i]);
            }
        }
        let mut check = vec![0.0; n];
        m.mul_vec(&x1, &mut check);
        for i in 0..n {
            assert!((check[i] - b[i]).abs() < 1e-13);
        }
        m.factor();
        let mut x2 = b.clone();
        m.solve_in_place(&mut x2);
        for i in 0..n {
            assert!((x1[i] - x2[i]).abs() < 1e-13);
        }
        let lu = TridiagonalLu::new(&lower, &diag, &upper);
        let mut x3 = b;
        lu.solve_in_place(&mut x3);
        for i in 0..n {
            assert!((x1[i] - x3[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn simpson_exact_on_cubics() {
        let n = 11;
        let h = 0.1;
        let w = Quadrature::Simpson.weights(n, h).unwrap();
        let s: f64 = (0..n).map(|i| w[i] * (i as f64 * h).powi(3)).sum();
        assert!((s - 0.25).abs() < 1e-14);
        assert!(Quadrature::Simpson.weights(10, h).is_none());
    }

    #[test]
    fn hermite_reproduces_cubic() {
        let h = 0.5;
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * h).collect();
        let f = |x: f64| x * x * x - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let y: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let dy: Vec<f64> = xs.iter().map(|&x| df(x)).collect();
        for &x in &[0.1, 0.77, 1.3, 2.49] {
            let (v, d) = hermite_eval(0.0, h, &y, &dy, x).unwrap();
            assert!((v - f(x)).abs() < 1e-12);
            assert!((d - df(x)).abs() < 1e-12);
        }
        assert!(hermite_eval(0.0, h, &y, &dy, 2.6).is_none());
        for &x in &[0.3, 1.1, 2.2] {
            assert!((cubic_lagrange_eval(0.0, h, &y, x) - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 2.0).abs() < 1e-13);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossing_is_interpolated() {
        let v = [1.0, 0.8, 0.4, 0.0];
        let x = level_crossing(0.0, 1.0, &v, 0.5).unwrap();
        assert!((x - 1.75).abs() < 1e-14);
        assert!(level_crossing(0.0, 1.0, &v, 2.0).is_none());
    }
}
