//! Operator calculus over a fixed scalar backend: dense matrices, inner
//! products given by Gram matrices, conjugate-linear operators, eigenspace
//! splitting, positive square roots and right polar decomposition.
//!
//! Exact backends do exact elimination; spectral operations on exact input
//! find candidate eigenvalues numerically, rationalize them with bounded
//! denominators, and then verify everything exactly, refusing (with an
//! error that says to convert to the float backend) when a result does not
//! exist in the field.

use num::complex::Complex64;

use crate::arith::{rat_sqrt, rationalize_c64, Backend, Rat, Scalar, Tol};
use crate::error::{Error, Result};
use crate::numeric::{self, CMat};

/// Relative tolerance for clustering nearby eigenvalues before splitting
/// eigenspaces.
pub const CLUSTER_REL: f64 = 1e-7;

/// Denominator bound when rationalizing numeric eigenvalue candidates for
/// exact backends.
pub const RATIONALIZE_MAX_DEN: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n_rows: usize,
    n_cols: usize,
    backend: Backend,
    data: Vec<Scalar>,
}

pub fn vec_zero(n: usize, b: Backend) -> Vec<Scalar> {
    vec![Scalar::zero(b); n]
}

pub fn vec_add(x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    x.iter().zip(y).map(|(a, b)| a.add(b)).collect()
}

pub fn vec_sub(x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    x.iter().zip(y).map(|(a, b)| a.sub(b)).collect()
}

pub fn vec_scale(c: &Scalar, x: &[Scalar]) -> Vec<Scalar> {
    x.iter().map(|a| c.mul(a)).collect()
}

pub fn vec_conj(x: &[Scalar]) -> Vec<Scalar> {
    x.iter().map(|a| a.conj()).collect()
}

pub fn vec_max_abs(x: &[Scalar]) -> f64 {
    x.iter().map(|a| a.abs_f64()).fold(0.0, f64::max)
}

pub fn vec_is_zero_tol(x: &[Scalar], tol: f64) -> bool {
    x.iter().all(|a| a.is_zero_tol(tol))
}

pub fn vec_eq_tol(x: &[Scalar], y: &[Scalar], tol: f64) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(a, b)| a.eq_tol(b, tol))
}

impl Mat {
    pub fn zeros(n_rows: usize, n_cols: usize, backend: Backend) -> Mat {
        Mat {
            n_rows,
            n_cols,
            backend,
            data: vec![Scalar::zero(backend); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize, backend: Backend) -> Mat {
        let mut m = Mat::zeros(n, n, backend);
        for i in 0..n {
            m.set(i, i, Scalar::one(backend));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Mat> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut backend = None;
        for r in &rows {
            if r.len() != n_cols {
                return Err(Error::DimMismatch("ragged rows".into()));
            }
            for s in r {
                match backend {
                    None => backend = Some(s.backend()),
                    Some(b) if b != s.backend() => {
                        return Err(Error::MixedBackends(b, s.backend()))
                    }
                    _ => {}
                }
            }
        }
        let backend = backend.ok_or_else(|| Error::DimMismatch("empty matrix".into()))?;
        Ok(Mat {
            n_rows,
            n_cols,
            backend,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_cols(cols: Vec<Vec<Scalar>>) -> Result<Mat> {
        Ok(Mat::from_rows(cols)?.transpose())
    }

    pub fn from_diag(diag: &[Scalar]) -> Result<Mat> {
        let n = diag.len();
        let backend = diag
            .first()
            .map(|s| s.backend())
            .ok_or_else(|| Error::DimMismatch("empty diagonal".into()))?;
        let mut m = Mat::zeros(n, n, backend);
        for (i, d) in diag.iter().enumerate() {
            if d.backend() != backend {
                return Err(Error::MixedBackends(backend, d.backend()));
            }
            m.set(i, i, d.clone());
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.n_cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        assert_eq!(s.backend(), self.backend, "entry backend mismatch");
        self.data[i * self.n_cols + j] = s;
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        (0..self.n_cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.n_rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Scalar]) {
        assert_eq!(v.len(), self.n_rows);
        for (i, s) in v.iter().enumerate() {
            self.set(i, j, s.clone());
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        Mat {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            backend: self.backend,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        Mat {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            backend: self.backend,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Mat {
        self.map(|s| s.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        self.map(|s| c.mul(s))
    }

    pub fn map<F: Fn(&Scalar) -> Scalar>(&self, f: F) -> Mat {
        Mat {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            backend: self.backend,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n_cols, other.n_rows, "matrix product shape");
        assert_eq!(self.backend, other.backend, "matrix product backend");
        let mut out = Mat::zeros(self.n_rows, other.n_cols, self.backend);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.n_cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.n_cols);
        let mut out = vec_zero(self.n_rows, self.backend);
        for (j, xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for i in 0..self.n_rows {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                out[i] = out[i].add(&a.mul(xj));
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.n_cols, self.n_rows, self.backend);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn conj(&self) -> Mat {
        self.map(|s| s.conj())
    }

    pub fn dagger(&self) -> Mat {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Scalar {
        assert_eq!(self.n_rows, self.n_cols);
        let mut t = Scalar::zero(self.backend);
        for i in 0..self.n_rows {
            t = t.add(self.get(i, i));
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|s| s.abs_f64()).fold(0.0, f64::max)
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.data.iter().all(|s| s.is_zero_tol(tol))
    }

    pub fn eq_tol(&self, other: &Mat, tol: f64) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.eq_tol(b, tol))
    }

    pub fn hstack(blocks: &[&Mat]) -> Result<Mat> {
        let n_rows = blocks[0].n_rows;
        let backend = blocks[0].backend;
        let n_cols = blocks.iter().map(|b| b.n_cols).sum();
        let mut out = Mat::zeros(n_rows, n_cols, backend);
        let mut at = 0;
        for b in blocks {
            if b.n_rows != n_rows {
                return Err(Error::DimMismatch("hstack row counts differ".into()));
            }
            if b.backend != backend {
                return Err(Error::MixedBackends(backend, b.backend));
            }
            for i in 0..n_rows {
                for j in 0..b.n_cols {
                    out.set(i, at + j, b.get(i, j).clone());
                }
            }
            at += b.n_cols;
        }
        Ok(out)
    }

    pub fn to_float(&self) -> Result<Mat> {
        let mut out = Mat::zeros(self.n_rows, self.n_cols, Backend::FloatC);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(i, j, self.get(i, j).to_float_backend()?);
            }
        }
        Ok(out)
    }

    pub fn to_cmat(&self) -> Result<CMat> {
        let mut out = CMat::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(i, j)] = self.get(i, j).to_c64()?;
            }
        }
        Ok(out)
    }

    pub fn from_cmat(m: &CMat) -> Mat {
        let mut out = Mat::zeros(m.n_rows, m.n_cols, Backend::FloatC);
        for i in 0..m.n_rows {
            for j in 0..m.n_cols {
                out.set(i, j, Scalar::FloatC(m[(i, j)]));
            }
        }
        out
    }

    /// Row-reduced echelon form with the pivot column list. `pivot_tol`
    /// decides when a float entry counts as zero; exact backends test
    /// exactly. Deterministic: partial pivoting by magnitude, first row on
    /// ties.
    pub fn rref(&self, pivot_tol: f64) -> Result<(Mat, Vec<usize>)> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.n_cols {
            if r == m.n_rows {
                break;
            }
            let mut best = r;
            let mut best_abs = m.get(r, c).abs_f64();
            for i in r + 1..m.n_rows {
                let a = m.get(i, c).abs_f64();
                if a > best_abs {
                    best = i;
                    best_abs = a;
                }
            }
            if m.get(best, c).is_zero_tol(pivot_tol) {
                continue;
            }
            if best != r {
                for j in 0..m.n_cols {
                    let x = m.get(r, j).clone();
                    let y = m.get(best, j).clone();
                    m.set(r, j, y);
                    m.set(best, j, x);
                }
            }
            let inv = m.get(r, c).inv()?;
            for j in 0..m.n_cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.n_rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.n_cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok((m, pivots))
    }

    pub fn rank(&self, pivot_tol: f64) -> Result<usize> {
        Ok(self.rref(pivot_tol)?.1.len())
    }

    /// Canonical kernel basis from the RREF: one vector per free column,
    /// with a 1 in the free coordinate.
    pub fn kernel(&self, pivot_tol: f64) -> Result<Vec<Vec<Scalar>>> {
        let (r, pivots) = self.rref(pivot_tol)?;
        let mut out = Vec::new();
        let piv_set: std::collections::BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(row, col)| (*col, row)).collect();
        for free in 0..self.n_cols {
            if piv_set.contains_key(&free) {
                continue;
            }
            let mut v = vec_zero(self.n_cols, self.backend);
            v[free] = Scalar::one(self.backend);
            for (col, row) in &piv_set {
                v[*col] = r.get(*row, free).neg();
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Indices of a maximal independent column set (pivot columns).
    pub fn col_basis(&self, pivot_tol: f64) -> Result<Vec<usize>> {
        Ok(self.rref(pivot_tol)?.1)
    }

    pub fn inverse(&self, pivot_tol: f64) -> Result<Mat> {
        assert_eq!(self.n_rows, self.n_cols);
        let aug = Mat::hstack(&[self, &Mat::identity(self.n_rows, self.backend)])?;
        let (r, pivots) = aug.rref(pivot_tol)?;
        if pivots.len() < self.n_rows || pivots.iter().any(|c| *c >= self.n_rows) {
            return Err(Error::Singular);
        }
        let mut out = Mat::zeros(self.n_rows, self.n_rows, self.backend);
        for i in 0..self.n_rows {
            for j in 0..self.n_rows {
                out.set(i, j, r.get(i, self.n_rows + j).clone());
            }
        }
        Ok(out)
    }

    /// Solves self * X = rhs for square nonsingular self.
    pub fn solve(&self, rhs: &Mat, pivot_tol: f64) -> Result<Mat> {
        Ok(self.inverse(pivot_tol)?.mul(rhs))
    }

    /// Any solution of self * X = rhs for rectangular self; errors when the
    /// system is inconsistent beyond the tolerance.
    pub fn solve_general(&self, rhs: &Mat, pivot_tol: f64, residual_tol: f64) -> Result<Mat> {
        assert_eq!(self.n_rows, rhs.n_rows);
        let aug = Mat::hstack(&[self, rhs])?;
        let (r, pivots) = aug.rref(pivot_tol)?;
        if pivots.iter().any(|c| *c >= self.n_cols) {
            return Err(Error::DimMismatch("inconsistent linear system".into()));
        }
        let mut out = Mat::zeros(self.n_cols, rhs.n_cols, self.backend);
        for (row, col) in pivots.iter().enumerate() {
            for j in 0..rhs.n_cols {
                out.set(*col, j, r.get(row, self.n_cols + j).clone());
            }
        }
        let resid = self.mul(&out).sub(rhs);
        if !resid.is_zero_tol(residual_tol) {
            return Err(Error::DimMismatch("inconsistent linear system".into()));
        }
        Ok(out)
    }

    pub fn det(&self, pivot_tol: f64) -> Result<Scalar> {
        assert_eq!(self.n_rows, self.n_cols);
        let mut m = self.clone();
        let n = m.n_rows;
        let mut det = Scalar::one(self.backend);
        for c in 0..n {
            let mut best = c;
            let mut best_abs = m.get(c, c).abs_f64();
            for i in c + 1..n {
                let a = m.get(i, c).abs_f64();
                if a > best_abs {
                    best = i;
                    best_abs = a;
                }
            }
            if m.get(best, c).is_zero_tol(pivot_tol) {
                return Ok(Scalar::zero(self.backend));
            }
            if best != c {
                det = det.neg();
                for j in 0..n {
                    let x = m.get(c, j).clone();
                    let y = m.get(best, j).clone();
                    m.set(c, j, y);
                    m.set(best, j, x);
                }
            }
            let p = m.get(c, c).clone();
            det = det.mul(&p);
            let inv = p.inv()?;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).mul(&inv);
                for j in c..n {
                    let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Coordinates of the operator `self` restricted to the column span of
    /// `basis`: solves basis * X = self * basis.
    pub fn restrict(&self, basis: &Mat, pivot_tol: f64, residual_tol: f64) -> Result<Mat> {
        let image = self.mul(basis);
        basis.solve_general(&image, pivot_tol, residual_tol)
    }
}

impl std::fmt::Display for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n_rows {
            write!(f, "[")?;
            for j in 0..self.n_cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Inner product <x, y> = y^H G x with G hermitian positive definite.
#[derive(Debug, Clone)]
pub struct Gram {
    g: Mat,
}

impl Gram {
    pub fn standard(n: usize, backend: Backend) -> Gram {
        Gram { g: Mat::identity(n, backend) }
    }

    /// Validates hermitian symmetry and positive definiteness.
    pub fn new(g: Mat, tol: &Tol) -> Result<Gram> {
        if g.n_rows() != g.n_cols() {
            return Err(Error::DimMismatch("gram matrix must be square".into()));
        }
        if !g.eq_tol(&g.dagger(), tol.eq) {
            return Err(Error::GramNotHermitian);
        }
        let out = Gram { g };
        if !out.is_positive_definite(tol)? {
            return Err(Error::GramNotPositive);
        }
        Ok(out)
    }

    pub fn new_unchecked(g: Mat) -> Gram {
        Gram { g }
    }

    pub fn matrix(&self) -> &Mat {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.n_rows()
    }

    pub fn backend(&self) -> Backend {
        self.g.backend()
    }

    pub fn inner(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let gx = self.g.apply(x);
        let mut out = Scalar::zero(self.g.backend());
        for (yi, gxi) in y.iter().zip(&gx) {
            out = out.add(&yi.conj().mul(gxi));
        }
        out
    }

    fn is_positive_definite(&self, tol: &Tol) -> Result<bool> {
        match self.g.backend() {
            Backend::FloatC => Ok(numeric::cholesky(&self.g.to_cmat()?).is_ok()),
            Backend::GaussQ => {
                // Sylvester: all leading principal minors positive.
                for k in 1..=self.g.n_rows() {
                    let mut sub = Mat::zeros(k, k, Backend::GaussQ);
                    for i in 0..k {
                        for j in 0..k {
                            sub.set(i, j, self.g.get(i, j).clone());
                        }
                    }
                    let d = sub.det(tol.eq)?;
                    match d.as_real_rat() {
                        Some(r) if r > Rat::from_integer(0.into()) => {}
                        _ => return Ok(false),
                    }
                }
                Ok(true)
            }
            Backend::Laurent => Err(Error::NotRepresentable),
        }
    }

    /// gram_adjoint: the unique A* with <A x, y> = <x, A* y>, i.e.
    /// G^{-1} A^H G.
    pub fn adjoint(&self, a: &Mat, tol: &Tol) -> Result<Mat> {
        let ah = a.dagger();
        let rhs = ah.mul(&self.g);
        self.g.solve(&rhs, tol.eq)
    }

    pub fn is_self_adjoint(&self, a: &Mat, tol: &Tol) -> bool {
        let left = self.g.mul(a);
        let right = a.dagger().mul(&self.g);
        left.eq_tol(&right, tol.eq * left.max_abs().max(1.0))
    }

    /// Minimum eigenvalue of G in the float view.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (eigs, _) = numeric::hermitian_eigen(&self.g.to_cmat()?)?;
        Ok(eigs.into_iter().fold(f64::INFINITY, f64::min))
    }
}

pub fn gram_adjoint(a: &Mat, g: &Gram, tol: &Tol) -> Result<Mat> {
    g.adjoint(a, tol)
}

/// Conjugate-linear operator x -> M conj(x).
#[derive(Debug, Clone, PartialEq)]
pub struct ConjOp {
    pub m: Mat,
}

impl ConjOp {
    pub fn new(m: Mat) -> ConjOp {
        ConjOp { m }
    }

    pub fn identity(n: usize, backend: Backend) -> ConjOp {
        ConjOp { m: Mat::identity(n, backend) }
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.m.apply(&vec_conj(x))
    }

    /// Linear matrix of self composed after other: x -> self(other(x)).
    pub fn compose_conj(&self, other: &ConjOp) -> Mat {
        self.m.mul(&other.m.conj())
    }

    /// Conjugate-linear composition a . self, a linear.
    pub fn after_linear(&self, a: &Mat) -> ConjOp {
        ConjOp { m: a.mul(&self.m) }
    }

    /// Conjugate-linear composition self . a, a linear.
    pub fn before_linear(&self, a: &Mat) -> ConjOp {
        ConjOp { m: self.m.mul(&a.conj()) }
    }

    pub fn is_involution(&self, tol: &Tol) -> bool {
        let n = self.m.n_rows();
        self.compose_conj(self).eq_tol(&Mat::identity(n, self.m.backend()), tol.eq)
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Scalar,
    pub basis: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone)]
pub struct EigenSplit {
    pub pairs: Vec<EigenPair>,
}

impl EigenSplit {
    pub fn total_dim(&self) -> usize {
        self.pairs.iter().map(|p| p.basis.len()).sum()
    }

    /// Eigenvector matrix: basis columns in pair order.
    pub fn basis_matrix(&self, backend: Backend) -> Result<Mat> {
        let cols: Vec<Vec<Scalar>> = self
            .pairs
            .iter()
            .flat_map(|p| p.basis.iter().cloned())
            .collect();
        if cols.is_empty() {
            return Err(Error::DimMismatch("empty eigensplit".into()));
        }
        let _ = backend;
        Mat::from_cols(cols)
    }
}

fn cluster_candidates(mut eigs: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    eigs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for e in eigs {
        match clusters.last_mut() {
            Some((rep, count)) if (e - *rep).norm() <= CLUSTER_REL * rep.norm().max(1.0) => {
                // running mean keeps the representative centered
                let k = *count as f64;
                *rep = (*rep * k + e) / (k + 1.0);
                *count += 1;
            }
            _ => clusters.push((e, 1)),
        }
    }
    clusters
}

/// Splits a diagonalizable operator into eigenvalue/eigenspace pairs,
/// ordered by (re, im). Exact backends verify rationalized eigenvalues
/// exactly; the float backend uses clustered QR values and
/// tolerance-pivoted kernels.
pub fn eigen_split(a: &Mat, tol: &Tol) -> Result<EigenSplit> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::DimMismatch("eigensplit needs a square matrix".into()));
    }
    let n = a.n_rows();
    if n == 0 {
        return Ok(EigenSplit { pairs: vec![] });
    }
    let backend = a.backend();
    if backend == Backend::Laurent {
        return Err(Error::NotRepresentable);
    }
    let candidates = numeric::eigenvalues(&a.to_cmat()?)?;
    let clusters = cluster_candidates(candidates);
    let scale = a.max_abs().max(1.0);
    let mut pairs = Vec::new();
    match backend {
        Backend::GaussQ => {
            for (rep, _count) in &clusters {
                let lam = rationalize_c64(*rep, RATIONALIZE_MAX_DEN, 1e-6 * scale)
                    .ok_or_else(|| {
                        Error::ExactUnrepresentable(format!(
                            "eigenvalue near {}+{}i is not a small gaussian rational",
                            rep.re, rep.im
                        ))
                    })?;
                let shifted = a.sub(&Mat::identity(n, backend).scale(&lam));
                let basis = shifted.kernel(0.0)?;
                if basis.is_empty() {
                    return Err(Error::ExactUnrepresentable(format!(
                        "candidate eigenvalue {} did not verify exactly",
                        lam
                    )));
                }
                pairs.push(EigenPair { value: lam, basis });
            }
            let split = EigenSplit { pairs };
            if split.total_dim() != n {
                return Err(Error::NotDiagonalizable);
            }
            Ok(split)
        }
        Backend::FloatC => {
            for (rep, count) in &clusters {
                let lam = Scalar::FloatC(*rep);
                let shifted = a.sub(&Mat::identity(n, backend).scale(&lam));
                let base_tol = (CLUSTER_REL * rep.norm().max(1.0)).max(tol.eq) * scale;
                let mut found = None;
                for mult in [1.0, 10.0, 100.0] {
                    let basis = shifted.kernel(base_tol * mult)?;
                    if basis.len() == *count {
                        found = Some(basis);
                        break;
                    }
                    if basis.len() > *count {
                        break;
                    }
                }
                match found {
                    Some(basis) => pairs.push(EigenPair { value: lam, basis }),
                    None => return Err(Error::NotDiagonalizable),
                }
            }
            let split = EigenSplit { pairs };
            if split.total_dim() != n {
                return Err(Error::NotDiagonalizable);
            }
            Ok(split)
        }
        Backend::Laurent => unreachable!(),
    }
}

/// Unique G-positive square root of a G-self-adjoint G-positive operator.
///
/// Float inputs reduce to a hermitian problem through the Cholesky factor of
/// G; exact inputs require every eigenvalue to be a perfect rational square
/// and otherwise error, telling the caller to convert to floats.
pub fn positive_sqrt(a: &Mat, g: &Gram, tol: &Tol) -> Result<Mat> {
    if !g.is_self_adjoint(a, tol) {
        return Err(Error::NotSelfAdjoint);
    }
    match a.backend() {
        Backend::FloatC => {
            let l = numeric::cholesky(&g.matrix().to_cmat()?)?;
            let ac = a.to_cmat()?;
            // B = L^H A L^{-H} is hermitian
            let linv_h = numeric::solve_upper_from_lower(&l, &CMat::identity(a.n_rows()));
            let b = l.dagger().mul(&ac).mul(&linv_h);
            let (eigs, u) = numeric::hermitian_eigen(&b)?;
            let scale = b.max_abs().max(1.0);
            let mut d = CMat::zeros(a.n_rows(), a.n_rows());
            for (i, lam) in eigs.iter().enumerate() {
                if *lam < -tol.residual * scale {
                    return Err(Error::NotPositive(format!("{lam}")));
                }
                d[(i, i)] = Complex64::new(lam.max(0.0).sqrt(), 0.0);
            }
            let sqrt_b = u.mul(&d).mul(&u.dagger());
            let p = linv_h.mul(&sqrt_b).mul(&l.dagger());
            Ok(Mat::from_cmat(&p))
        }
        Backend::GaussQ => {
            let split = eigen_split(a, tol)?;
            let mut sqrt_vals = Vec::new();
            for pair in &split.pairs {
                let r = pair.value.as_real_rat().ok_or_else(|| {
                    Error::NotPositive(format!("complex eigenvalue {}", pair.value))
                })?;
                if r < Rat::from_integer(0.into()) {
                    return Err(Error::NotPositive(format!("{}", pair.value)));
                }
                let s = rat_sqrt(&r).ok_or_else(|| {
                    Error::ExactUnrepresentable(format!(
                        "eigenvalue {} has no rational square root",
                        r
                    ))
                })?;
                sqrt_vals.push(Scalar::from_rat(s, Rat::from_integer(0.into())));
            }
            let v = split.basis_matrix(Backend::GaussQ)?;
            let mut diag = Vec::new();
            for (pair, s) in split.pairs.iter().zip(&sqrt_vals) {
                for _ in 0..pair.basis.len() {
                    diag.push(s.clone());
                }
            }
            let d = Mat::from_diag(&diag)?;
            let vinv = v.inverse(0.0)?;
            Ok(v.mul(&d).mul(&vinv))
        }
        Backend::Laurent => Err(Error::NotRepresentable),
    }
}

/// Right polar decomposition A = U P with P = sqrt(A* A) G-positive and U
/// G-unitary. Requires A invertible.
pub fn polar_right(a: &Mat, g: &Gram, tol: &Tol) -> Result<(Mat, Mat)> {
    let astar = g.adjoint(a, tol)?;
    let p = positive_sqrt(&astar.mul(a), g, tol)?;
    let pinv = p.inverse(tol.eq)?;
    let u = a.mul(&pinv);
    let ustar = g.adjoint(&u, tol)?;
    let id = Mat::identity(a.n_rows(), a.backend());
    if !ustar.mul(&u).eq_tol(&id, tol.residual * u.max_abs().max(1.0)) {
        return Err(Error::Normalization(
            "polar factor failed the unitarity check".into(),
        ));
    }
    Ok((u, p))
}

/// Seeded synthetic inputs for sweeps and tests.
pub mod synth {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn rand_scalar(backend: Backend, rng: &mut ChaCha8Rng) -> Scalar {
        match backend {
            Backend::GaussQ => {
                let p = rng.gen_range(-6i64..7);
                let q = rng.gen_range(-6i64..7);
                let d = rng.gen_range(1i64..4);
                Scalar::from_rat(
                    Rat::new(p.into(), d.into()),
                    Rat::new(q.into(), d.into()),
                )
            }
            Backend::FloatC => Scalar::FloatC(Complex64::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )),
            Backend::Laurent => {
                let e = rng.gen_range(-2i64..3);
                let p = rng.gen_range(-4i64..5);
                Scalar::Laurent(crate::arith::Laurent::monomial(e, Rat::from_integer(p.into())))
            }
        }
    }

    pub fn rand_mat(n_rows: usize, n_cols: usize, backend: Backend, rng: &mut ChaCha8Rng) -> Mat {
        let mut m = Mat::zeros(n_rows, n_cols, backend);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m.set(i, j, rand_scalar(backend, rng));
            }
        }
        m
    }

    pub fn rand_invertible(n: usize, backend: Backend, rng: &mut ChaCha8Rng) -> Mat {
        loop {
            let m = rand_mat(n, n, backend, rng);
            let tol = if backend == Backend::FloatC { 1e-3 } else { 0.0 };
            if let Ok(d) = m.det(tol) {
                if !d.is_zero_tol(tol) {
                    return m;
                }
            }
        }
    }

    /// Hermitian positive definite G = B^H B + n I.
    pub fn rand_gram(n: usize, backend: Backend, rng: &mut ChaCha8Rng) -> Gram {
        let b = rand_mat(n, n, backend, rng);
        let g = b
            .dagger()
            .mul(&b)
            .add(&Mat::identity(n, backend).scale(&Scalar::int(backend, n as i64)));
        Gram::new_unchecked(g)
    }

    /// G-self-adjoint operator with spectrum >= 1: B* B + I.
    pub fn rand_g_positive(n: usize, g: &Gram, rng: &mut ChaCha8Rng, tol: &Tol) -> Result<Mat> {
        let backend = g.backend();
        let b = rand_mat(n, n, backend, rng);
        let bstar = g.adjoint(&b, tol)?;
        Ok(bstar.mul(&b).add(&Mat::identity(n, backend)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::ratio(p, d)
    }

    fn gmat(entries: &[&[(i64, i64)]]) -> Mat {
        Mat::from_rows(
            entries
                .iter()
                .map(|r| r.iter().map(|(p, d)| q(*p, *d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_mixed_backends() {
        let rows = vec![vec![Scalar::gauss_int(1, 0), Scalar::from_f64(1.0)]];
        assert!(matches!(Mat::from_rows(rows), Err(Error::MixedBackends(_, _))));
    }

    #[test]
    fn exact_inverse_and_kernel() {
        let a = gmat(&[&[(2, 1), (1, 1)], &[(1, 1), (1, 1)]]);
        let inv = a.inverse(0.0).unwrap();
        assert!(a.mul(&inv).eq_tol(&Mat::identity(2, Backend::GaussQ), 0.0));
        let sing = gmat(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert!(matches!(sing.inverse(0.0), Err(Error::Singular)));
        let k = sing.kernel(0.0).unwrap();
        assert_eq!(k.len(), 1);
        // canonical form: free coordinate set to 1
        assert_eq!(k[0][1], Scalar::gauss_int(1, 0));
        assert_eq!(k[0][0], q(-2, 1));
    }

    #[test]
    fn gram_adjoint_standard_is_dagger() {
        let g = Gram::standard(2, Backend::GaussQ);
        let a = gmat(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]);
        let tol = Tol::default();
        assert!(g.adjoint(&a, &tol).unwrap().eq_tol(&a.dagger(), 0.0));
    }

    #[test]
    fn gram_adjoint_weighted_example() {
        // G = diag(1,2), A = [[0,1],[0,0]] => A* = [[0,0],[1/2,0]];
        // frozen from the defining identity <A e_i, e_j> = <e_i, A* e_j>
        // checked below on all basis pairs.
        let g = Gram::new(gmat(&[&[(1, 1), (0, 1)], &[(0, 1), (2, 1)]]), &Tol::default()).unwrap();
        let a = gmat(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]);
        let tol = Tol::default();
        let astar = g.adjoint(&a, &tol).unwrap();
        let expect = gmat(&[&[(0, 1), (0, 1)], &[(1, 2), (0, 1)]]);
        assert!(astar.eq_tol(&expect, 0.0));
        let e = [
            vec![Scalar::gauss_int(1, 0), Scalar::gauss_int(0, 0)],
            vec![Scalar::gauss_int(0, 0), Scalar::gauss_int(1, 0)],
        ];
        for x in &e {
            for y in &e {
                let lhs = g.inner(&a.apply(x), y);
                let rhs = g.inner(x, &astar.apply(y));
                assert_eq!(lhs, rhs);
            }
        }
        // involution property (A*)* = A
        let astarstar = g.adjoint(&astar, &tol).unwrap();
        assert!(astarstar.eq_tol(&a, 0.0));
    }

    #[test]
    fn eigen_split_exact_symmetric() {
        // [[2,1],[1,2]] has exact eigenvalues 1 and 3
        let a = gmat(&[&[(2, 1), (1, 1)], &[(1, 1), (2, 1)]]);
        let split = eigen_split(&a, &Tol::default()).unwrap();
        assert_eq!(split.pairs.len(), 2);
        assert_eq!(split.pairs[0].value, q(1, 1));
        assert_eq!(split.pairs[1].value, q(3, 1));
        assert_eq!(split.pairs[0].basis, vec![vec![q(-1, 1), q(1, 1)]]);
        assert_eq!(split.pairs[1].basis, vec![vec![q(1, 1), q(1, 1)]]);
    }

    #[test]
    fn eigen_split_multiplicity_and_defective() {
        let a = Mat::from_diag(&[q(1, 1), q(2, 1), q(2, 1)]).unwrap();
        let split = eigen_split(&a, &Tol::default()).unwrap();
        assert_eq!(split.pairs.len(), 2);
        assert_eq!(split.pairs[0].basis.len(), 1);
        assert_eq!(split.pairs[1].basis.len(), 2);

        let jordan = gmat(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 1)]]);
        assert!(matches!(
            eigen_split(&jordan, &Tol::default()),
            Err(Error::NotDiagonalizable)
        ));
    }

    #[test]
    fn positive_sqrt_exact_examples() {
        let tol = Tol::default();
        let g2 = Gram::standard(2, Backend::GaussQ);
        let id = Mat::identity(2, Backend::GaussQ);
        assert!(positive_sqrt(&id, &g2, &tol).unwrap().eq_tol(&id, 0.0));

        let a = Mat::from_diag(&[q(4, 1), q(9, 1)]).unwrap();
        let expect = Mat::from_diag(&[q(2, 1), q(3, 1)]).unwrap();
        assert!(positive_sqrt(&a, &g2, &tol).unwrap().eq_tol(&expect, 0.0));

        // eigenvalues 1 and 3: no rational sqrt of 3
        let b = gmat(&[&[(2, 1), (1, 1)], &[(1, 1), (2, 1)]]);
        assert!(matches!(
            positive_sqrt(&b, &g2, &tol),
            Err(Error::ExactUnrepresentable(_))
        ));

        let neg = Mat::from_diag(&[q(-1, 1), q(1, 1)]).unwrap();
        assert!(matches!(positive_sqrt(&neg, &g2, &tol), Err(Error::NotPositive(_))));
    }

    #[test]
    fn positive_sqrt_float_example() {
        // sqrt([[2,1],[1,2]]) = [[(r3+1)/2,(r3-1)/2],[(r3-1)/2,(r3+1)/2]]
        let tol = Tol::default();
        let g = Gram::standard(2, Backend::FloatC);
        let a = gmat(&[&[(2, 1), (1, 1)], &[(1, 1), (2, 1)]]).to_float().unwrap();
        let p = positive_sqrt(&a, &g, &tol).unwrap();
        let r3 = 3f64.sqrt();
        let expect = Mat::from_rows(vec![
            vec![Scalar::from_f64((r3 + 1.0) / 2.0), Scalar::from_f64((r3 - 1.0) / 2.0)],
            vec![Scalar::from_f64((r3 - 1.0) / 2.0), Scalar::from_f64((r3 + 1.0) / 2.0)],
        ])
        .unwrap();
        assert!(p.eq_tol(&expect, 1e-12));
        assert!(p.mul(&p).eq_tol(&a, 1e-12));
    }

    #[test]
    fn sqrt_conjugation_inverts_through_involutions() {
        // In a basis where sigma swaps two blocks, A = diag(D, D^{-1})
        // satisfies sigma A sigma = A^{-1}; the positive root must then obey
        // sigma P sigma = P^{-1}.
        let tol = Tol::default();
        let g = Gram::standard(2, Backend::FloatC);
        let a = Mat::from_rows(vec![
            vec![Scalar::from_f64(4.0), Scalar::from_f64(0.0)],
            vec![Scalar::from_f64(0.0), Scalar::from_f64(0.25)],
        ])
        .unwrap();
        let sigma = Mat::from_rows(vec![
            vec![Scalar::from_f64(0.0), Scalar::from_f64(1.0)],
            vec![Scalar::from_f64(1.0), Scalar::from_f64(0.0)],
        ])
        .unwrap();
        let p = positive_sqrt(&a, &g, &tol).unwrap();
        let lhs = sigma.mul(&p).mul(&sigma);
        let rhs = p.inverse(tol.eq).unwrap();
        assert!(lhs.eq_tol(&rhs, 1e-12));
    }

    #[test]
    fn polar_right_examples() {
        let tol = Tol::default();
        let g = Gram::standard(2, Backend::FloatC);
        // A already positive diagonal: U = I, P = A
        let a = Mat::from_diag(&[Scalar::from_f64(2.0), Scalar::from_f64(0.5)]).unwrap();
        let (u, p) = polar_right(&a, &g, &tol).unwrap();
        assert!(u.eq_tol(&Mat::identity(2, Backend::FloatC), 1e-12));
        assert!(p.eq_tol(&a, 1e-12));

        // rotation times diagonal: right polar recovers both factors
        let (c, s) = (1f64.cos(), 1f64.sin());
        let rot = Mat::from_rows(vec![
            vec![Scalar::from_f64(c), Scalar::from_f64(-s)],
            vec![Scalar::from_f64(s), Scalar::from_f64(c)],
        ])
        .unwrap();
        let d = Mat::from_diag(&[Scalar::from_f64(2.0), Scalar::from_f64(1.0)]).unwrap();
        let a2 = rot.mul(&d);
        let (u2, p2) = polar_right(&a2, &g, &tol).unwrap();
        assert!(u2.eq_tol(&rot, 1e-12));
        assert!(p2.eq_tol(&d, 1e-12));
        assert!(u2.mul(&p2).eq_tol(&a2, 1e-12));
    }

    #[test]
    fn conj_op_composition() {
        // circ-style operator squared must be linear identity when M conj(M) = I
        let m = Mat::from_rows(vec![
            vec![Scalar::gauss_int(0, 0), Scalar::gauss_int(0, 1)],
            vec![Scalar::gauss_int(0, 1), Scalar::gauss_int(0, 0)],
        ])
        .unwrap();
        let op = ConjOp::new(m);
        assert!(op.is_involution(&Tol::default()));
        let x = vec![Scalar::gauss_int(1, 2), Scalar::gauss_int(-3, 1)];
        let twice = op.apply(&op.apply(&x));
        assert_eq!(twice, x);
    }

    #[test]
    fn restrict_operator_to_invariant_subspace() {
        // A = diag(1,2,2) restricted to span{e2, e3} is 2 I
        let a = Mat::from_diag(&[q(1, 1), q(2, 1), q(2, 1)]).unwrap();
        let basis = Mat::from_cols(vec![
            vec![q(0, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1)],
        ])
        .unwrap();
        let r = a.restrict(&basis, 0.0, 0.0).unwrap();
        let expect = Mat::from_diag(&[q(2, 1), q(2, 1)]).unwrap();
        assert!(r.eq_tol(&expect, 0.0));
    }

    #[test]
    fn seeded_positive_sqrt_sweep_small() {
        let tol = Tol::default();
        let mut rng = synth::rng(7);
        for n in [2usize, 3, 5] {
            let g = synth::rand_gram(n, Backend::FloatC, &mut rng);
            let a = synth::rand_g_positive(n, &g, &mut rng, &tol).unwrap();
            let p = positive_sqrt(&a, &g, &tol).unwrap();
            assert!(p.mul(&p).eq_tol(&a, 1e-10 * a.max_abs().max(1.0)));
            assert!(g.is_self_adjoint(&p, &tol));
        }
    }
}
