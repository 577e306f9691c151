//! Symmetric tridiagonal matrices: factorization, solves and Sylvester
//! inertia counts for pencils `K - lambda M`.

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn zeros(n: usize) -> Self {
        Self { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Adds a 2x2 symmetric block at rows `(i, i + 1)`.
    pub fn add_block(&mut self, i: usize, a11: f64, a12: f64, a22: f64) {
        self.diag[i] += a11;
        self.diag[i + 1] += a22;
        self.off[i] += a12;
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    pub fn dot(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// `self - shift * other`.
    pub fn shifted(&self, shift: f64, other: &SymTridiag) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a - shift * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a - shift * b).collect(),
        }
    }

    /// LDL^T pivots. Exact zero pivots are nudged so the recursion continues.
    fn pivots(&self) -> Vec<f64> {
        let n = self.len();
        let mut d = Vec::with_capacity(n);
        let mut prev = 0.0_f64;
        for i in 0..n {
            let mut di = self.diag[i];
            if i > 0 {
                di -= self.off[i - 1] * self.off[i - 1] / prev;
            }
            if di == 0.0 {
                di = f64::MIN_POSITIVE.sqrt() * (1.0 + self.diag[i].abs());
            }
            d.push(di);
            prev = di;
        }
        d
    }

    /// Number of negative eigenvalues.
    pub fn negative_count(&self) -> usize {
        self.pivots().iter().filter(|&&d| d < 0.0).count()
    }

    /// Solves `self * x = rhs` by LDL^T without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let d = self.pivots();
        let mut z = rhs.to_vec();
        for i in 1..n {
            z[i] -= self.off[i - 1] / d[i - 1] * z[i - 1];
        }
        for i in 0..n {
            z[i] /= d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            z[i] -= self.off[i] / d[i] * z[i + 1];
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiag {
        SymTridiag { diag: vec![2.0; n], off: vec![-1.0; n - 1] }
    }

    #[test]
    fn solve_roundtrip() {
        let a = laplacian(7);
        let x: Vec<f64> = (0..7).map(|i| (i as f64).sin() + 0.3).collect();
        let b = a.mul(&x);
        let y = a.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn inertia_matches_known_spectrum() {
        // eigenvalues of the n x n Dirichlet Laplacian: 2 - 2 cos(j pi / (n + 1))
        let n = 9;
        let a = laplacian(n);
        let id = SymTridiag { diag: vec![1.0; n], off: vec![0.0; n - 1] };
        let eig: Vec<f64> =
            (1..=n).map(|j| 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()).collect();
        for shift in [0.05, 0.5, 1.0, 2.5, 3.99] {
            let expected = eig.iter().filter(|&&e| e < shift).count();
            assert_eq!(a.shifted(shift, &id).negative_count(), expected);
        }
    }
}
