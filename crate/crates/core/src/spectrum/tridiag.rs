//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a pivoted tridiagonal LU.

/// Symmetric tridiagonal matrix: `diag` has length n, `off` has length n - 1.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal must have n - 1 entries");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin interval containing the whole spectrum.
    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            q = if i == 0 {
                self.diag[0] - x
            } else {
                self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q
            };
            if q.abs() < tiny {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to machine precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit-norm eigenvector for the eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let (lo, hi) = self.gershgorin();
        let norm = lo.abs().max(hi.abs()).max(1.0);
        let lu = ShiftedLu::factor(self, lambda, norm * f64::EPSILON);
        // deterministic start with components along every eigenvector
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).sin()).collect();
        normalize(&mut x);
        for _ in 0..4 {
            lu.solve(&mut x);
            normalize(&mut x);
        }
        x
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// LU factorisation with partial pivoting of T - λI (LAPACK `gttrf` layout).
struct ShiftedLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, lambda: f64, floor: f64) -> Self {
        let n = t.len();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - lambda).collect();
        let mut du = t.off.clone();
        let mut dl = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < floor {
                    d[i] = floor;
                }
                let m = dl[i] / d[i];
                dl[i] = m;
                d[i + 1] -= m * du[i];
            } else {
                let m = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = m;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - m * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -m * du2[i];
                }
                swapped[i] = true;
            }
        }
        if let Some(last) = d.last_mut() {
            if last.abs() < floor {
                *last = floor;
            }
        }
        Self { d, du, du2, dl, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
                b[i + 1] -= self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Free particle in a box: T = tridiag(-1, 2, -1) has eigenvalues
    /// 2 - 2cos(kπ/(n+1)).
    #[test]
    fn discrete_laplacian_eigenvalues() {
        let n = 50;
        let t = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]);
        for k in 0..5 {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-13, "k={k} {} {exact}", t.eigenvalue(k));
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation_and_are_orthogonal() {
        let n = 200;
        let diag: Vec<f64> = (0..n).map(|i| ((i as f64) / 20.0).powi(2)).collect();
        let t = SymTridiagonal::new(diag, vec![-0.5; n - 1]);
        let vecs: Vec<Vec<f64>> = (0..4).map(|k| t.eigenvector(t.eigenvalue(k))).collect();
        for (k, v) in vecs.iter().enumerate() {
            let lambda = t.eigenvalue(k);
            for i in 0..n {
                let mut tv = t.diag[i] * v[i];
                if i > 0 {
                    tv += t.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    tv += t.off[i] * v[i + 1];
                }
                assert!((tv - lambda * v[i]).abs() < 1e-10);
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                let dot: f64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sturm_count_brackets_eigenvalues() {
        let t = SymTridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]);
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(1.5), 1);
        assert_eq!(t.count_below(10.0), 3);
    }
}
