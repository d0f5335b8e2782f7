//! Dense complex-f64 kernels backing the float paths of the operator
//! calculus: Hessenberg reduction, shifted QR eigenvalues, cyclic Jacobi for
//! hermitian matrices, and Cholesky. Everything here is deterministic.

use num::complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMat { n_rows, n_cols, data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n_cols, other.n_rows);
        let mut out = CMat::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= y;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(a: &mut CMat) {
    let n = a.n_rows;
    for k in 0..n.saturating_sub(2) {
        let mut norm = 0.0f64;
        for i in k + 1..n {
            norm += a[(i, k)].norm_sqr();
        }
        norm = norm.sqrt();
        if norm <= f64::MIN_POSITIVE {
            continue;
        }
        let pivot = a[(k + 1, k)];
        let alpha = if pivot.norm() == 0.0 {
            Complex64::new(-norm, 0.0)
        } else {
            -(pivot / pivot.norm()) * norm
        };
        // v = x - alpha e1
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        // A <- H A with H = I - 2 v v^H / |v|^2 acting on rows k+1..n
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, i) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * a[(i, j)];
            }
            let f = dot * 2.0 / vnorm2;
            for (idx, i) in (k + 1..n).enumerate() {
                let adj = f * v[idx];
                a[(i, j)] -= adj;
            }
        }
        // A <- A H on columns k+1..n
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (idx, j) in (k + 1..n).enumerate() {
                dot += a[(i, j)] * v[idx];
            }
            let f = dot * 2.0 / vnorm2;
            for (idx, j) in (k + 1..n).enumerate() {
                let adj = f * v[idx].conj();
                a[(i, j)] -= adj;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
        a[(k + 1, k)] = alpha;
    }
}

fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    ((tr + disc) * 0.5, (tr - disc) * 0.5)
}

/// Eigenvalues of a general complex matrix by shifted QR on the Hessenberg
/// form. Values only; eigenspaces are recovered elsewhere by exact or
/// tolerance-pivoted kernels.
pub fn eigenvalues(a: &CMat) -> Result<Vec<Complex64>> {
    assert_eq!(a.n_rows, a.n_cols);
    let n = a.n_rows;
    if n == 0 {
        return Ok(vec![]);
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iters_left = 60 * n.max(1);
    let eps = 1e-14;
    loop {
        // deflate tiny subdiagonals
        let mut lo = hi;
        while lo > 0 {
            let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if h[(lo, lo - 1)].norm() <= eps * scale.max(1e-300) {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h[(hi, hi)]);
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.push(l1);
            eigs.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            continue;
        }
        if iters_left == 0 {
            return Err(Error::EigenNoConvergence);
        }
        iters_left -= 1;
        // Wilkinson shift from the trailing 2x2 of the active block
        let (l1, l2) = eig2(
            h[(hi - 1, hi - 1)],
            h[(hi - 1, hi)],
            h[(hi, hi - 1)],
            h[(hi, hi)],
        );
        let corner = h[(hi, hi)];
        let shift = if (l1 - corner).norm() <= (l2 - corner).norm() { l1 } else { l2 };
        // explicit shifted QR step on the active block:
        // H - sI = QR (Givens down the subdiagonal), then H <- RQ + sI
        for i in lo..=hi {
            let d = h[(i, i)];
            h[(i, i)] = d - shift;
        }
        let mut rotations: Vec<(Complex64, Complex64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r <= f64::MIN_POSITIVE {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (x.conj() / r, y.conj() / r)
            };
            for j in k..=hi {
                let hkj = h[(k, j)];
                let hk1j = h[(k + 1, j)];
                h[(k, j)] = c * hkj + s * hk1j;
                h[(k + 1, j)] = -(s.conj()) * hkj + c.conj() * hk1j;
            }
            rotations.push((c, s));
        }
        for (k, (c, s)) in rotations.into_iter().enumerate() {
            let k = lo + k;
            for i in lo..=(k + 1).min(hi) {
                let hik = h[(i, k)];
                let hik1 = h[(i, k + 1)];
                h[(i, k)] = hik * c.conj() + hik1 * s.conj();
                h[(i, k + 1)] = -hik * s + hik1 * c;
            }
        }
        for i in lo..=hi {
            let d = h[(i, i)];
            h[(i, i)] = d + shift;
        }
    }
    Ok(eigs)
}

/// Cyclic Jacobi eigendecomposition for a hermitian matrix.
/// Returns (eigenvalues, V) with A = V diag(l) V^H, V unitary. Eigenvalues
/// come back unsorted; callers order them.
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    assert_eq!(a.n_rows, a.n_cols);
    let n = a.n_rows;
    let mut m = a.clone();
    // symmetrize defensively; inputs are hermitian up to rounding
    for i in 0..n {
        for j in 0..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
        }
    }
    let mut v = CMat::identity(n);
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        let scale: f64 = (0..n).map(|i| m[(i, i)].norm_sqr()).sum::<f64>().max(1e-300);
        if off.sqrt() <= 1e-15 * scale.sqrt().max(1.0) {
            let eigs = (0..n).map(|i| m[(i, i)].re).collect();
            return Ok((eigs, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / apq.norm();
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s_mag = t * c;
                let s = phase * s_mag;
                // columns p,q of both m and v: rotation R with
                // R[p][p]=c, R[p][q]=s, R[q][p]=-s^*, R[q][q]=c (unitary)
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * c - miq * s.conj();
                    m[(i, q)] = mip * s + miq * c;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = mpj * c - mqj * s;
                    m[(q, j)] = mpj * s.conj() + mqj * c;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * s.conj();
                    v[(i, q)] = vip * s + viq * c;
                }
            }
        }
    }
    Err(Error::EigenNoConvergence)
}

/// Cholesky factor L (lower triangular) of a hermitian positive definite
/// matrix, A = L L^H.
pub fn cholesky(a: &CMat) -> Result<CMat> {
    assert_eq!(a.n_rows, a.n_cols);
    let n = a.n_rows;
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 {
            return Err(Error::GramNotPositive);
        }
        let dj = d.sqrt();
        l[(j, j)] = Complex64::new(dj, 0.0);
        for i in j + 1..n {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = sum / dj;
        }
    }
    Ok(l)
}

/// Solves L x = b for lower-triangular L (forward substitution), column-wise.
pub fn solve_lower(l: &CMat, b: &CMat) -> CMat {
    let n = l.n_rows;
    let mut x = b.clone();
    for col in 0..b.n_cols {
        for i in 0..n {
            let mut sum = x[(i, col)];
            for k in 0..i {
                sum -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = sum / l[(i, i)];
        }
    }
    x
}

/// Solves L^H x = b (back substitution).
pub fn solve_upper_from_lower(l: &CMat, b: &CMat) -> CMat {
    let n = l.n_rows;
    let mut x = b.clone();
    for col in 0..b.n_cols {
        for ii in 0..n {
            let i = n - 1 - ii;
            let mut sum = x[(i, col)];
            for k in i + 1..n {
                sum -= l[(k, i)].conj() * x[(k, col)];
            }
            x[(i, col)] = sum / l[(i, i)].conj();
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn from_rows(rows: &[&[Complex64]]) -> CMat {
        let n_rows = rows.len();
        let n_cols = rows[0].len();
        let mut m = CMat::zeros(n_rows, n_cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, z) in r.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        m
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn qr_eigenvalues_on_companion_like_matrix() {
        // eigenvalues 1, 2, 3
        let a = from_rows(&[
            &[c(6.0, 0.0), c(-11.0, 0.0), c(6.0, 0.0)],
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let eigs = sorted_re(eigenvalues(&a).unwrap());
        let expect = [1.0, 2.0, 3.0];
        for (e, x) in eigs.iter().zip(expect) {
            assert!((e.re - x).abs() < 1e-9 && e.im.abs() < 1e-9, "{e:?}");
        }
    }

    #[test]
    fn qr_eigenvalues_complex_spectrum() {
        // rotation by 90 degrees: eigenvalues +-i
        let a = from_rows(&[&[c(0.0, 0.0), c(-1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        let eigs = sorted_re(eigenvalues(&a).unwrap());
        assert!((eigs[0] - c(0.0, -1.0)).norm() < 1e-10 || (eigs[0] - c(0.0, 1.0)).norm() < 1e-10);
        assert!((eigs[0] + eigs[1]).norm() < 1e-10);
        assert!((eigs[0] * eigs[1] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn jacobi_hermitian_reconstruction() {
        let a = from_rows(&[
            &[c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5)],
            &[c(1.0, -1.0), c(3.0, 0.0), c(0.25, 0.0)],
            &[c(0.0, 0.5), c(0.25, 0.0), c(1.0, 0.0)],
        ]);
        let (eigs, v) = hermitian_eigen(&a).unwrap();
        let mut d = CMat::zeros(3, 3);
        for i in 0..3 {
            d[(i, i)] = c(eigs[i], 0.0);
        }
        let rebuilt = v.mul(&d).mul(&v.dagger());
        assert!(rebuilt.sub(&a).max_abs() < 1e-12);
        let vhv = v.dagger().mul(&v);
        assert!(vhv.sub(&CMat::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn cholesky_round_trip() {
        let b = from_rows(&[
            &[c(1.0, 0.0), c(0.5, 0.25), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(1.0, 0.0), c(-0.5, 0.1)],
            &[c(0.2, 0.0), c(0.0, 0.3), c(1.0, 0.0)],
        ]);
        let a = b.dagger().mul(&b); // hermitian PD
        let l = cholesky(&a).unwrap();
        assert!(l.mul(&l.dagger()).sub(&a).max_abs() < 1e-12);
        let rhs = CMat::identity(3);
        let y = solve_lower(&l, &rhs);
        let x = solve_upper_from_lower(&l, &y);
        assert!(a.mul(&x).sub(&CMat::identity(3)).max_abs() < 1e-10);
    }
}
