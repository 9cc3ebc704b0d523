use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ordinary least squares via a thin QR of the column-scaled design.
pub(crate) struct Ols {
    pub beta: DVector<f64>,
    pub ssr: f64,
    pub nobs: usize,
    /// Diagonal of `(X'X)^-1`.
    pub xtx_inv_diag: DVector<f64>,
}

impl Ols {
    pub fn fit(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<Self> {
        let (nobs, k) = x.shape();
        if nobs <= k {
            return Err(Error::SingularRegression);
        }
        // scale columns to unit norm so the pivot check is scale-free
        let norms: Vec<f64> = x.column_iter().map(|c| c.norm()).collect();
        if norms.iter().any(|n| *n == 0.0 || !n.is_finite()) {
            return Err(Error::SingularRegression);
        }
        let mut xs = x.clone();
        for (j, n) in norms.iter().enumerate() {
            xs.column_mut(j).scale_mut(1.0 / n);
        }
        let qr = xs.qr();
        let r = qr.r();
        let (lo, hi) = r
            .diagonal()
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.abs()), hi.max(d.abs())));
        let ratio = lo / hi;
        if ratio.is_nan() || ratio < 1e-7 {
            return Err(Error::SingularRegression);
        }
        let beta_s = r
            .solve_upper_triangular(&(qr.q().transpose() * y))
            .ok_or(Error::SingularRegression)?;
        // (X'X)^-1 = R^-1 R^-T, so its diagonal is the squared row norms of R^-1
        let r_inv = r
            .solve_upper_triangular(&DMatrix::identity(k, k))
            .ok_or(Error::SingularRegression)?;
        let beta = DVector::from_iterator(k, beta_s.iter().zip(&norms).map(|(b, n)| b / n));
        let xtx_inv_diag = DVector::from_iterator(
            k,
            (0..k).map(|j| r_inv.row(j).norm_squared() / (norms[j] * norms[j])),
        );
        let resid = y - x * &beta;
        Ok(Self {
            beta,
            ssr: resid.norm_squared(),
            nobs,
            xtx_inv_diag,
        })
    }

    /// Classical standard-error t-ratio for coefficient `j`.
    pub fn t_value(&self, j: usize) -> f64 {
        let k = self.beta.len();
        let s2 = self.ssr / (self.nobs - k) as f64;
        self.beta[j] / (s2 * self.xtx_inv_diag[j]).sqrt()
    }

    /// Gaussian AIC as computed from the concentrated log-likelihood.
    pub fn aic(&self) -> f64 {
        let n = self.nobs as f64;
        let llf = -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + (self.ssr / n).ln() + 1.0);
        -2.0 * llf + 2.0 * self.beta.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let fit = Ols::fit(&y, &x).unwrap();
        assert!((fit.beta[0] - 1.0).abs() < 1e-12);
        assert!((fit.beta[1] - 2.0).abs() < 1e-12);
        assert!(fit.ssr < 1e-20);
    }

    #[test]
    fn collinear_columns_are_singular() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        assert!(matches!(Ols::fit(&y, &x), Err(Error::SingularRegression)));
    }
}
