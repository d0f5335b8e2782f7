//! Fourier forms on coalgebras: the induced product x * y = sum w(x, y1) y2,
//! recovery of the form from the product, normality, mixed associativity and
//! the sesquilinear pairing through the involution.

use crate::arith::{Backend, Scalar, Tol};
use crate::coalgebra::Coalgebra;
use crate::error::{Error, Result};
use crate::linalg::{self, ConjOp, Mat};

/// Bilinear form w(e_a, e_i) = W[a][i] on a coalgebra.
#[derive(Debug, Clone)]
pub struct FourierForm {
    w: Mat,
}

impl FourierForm {
    pub fn new(co: &Coalgebra, w: Mat) -> Result<FourierForm> {
        if w.n_rows() != co.dim() || w.n_cols() != co.dim() {
            return Err(Error::DimMismatch("form matrix shape".into()));
        }
        if w.backend() != co.backend() {
            return Err(Error::MixedBackends(co.backend(), w.backend()));
        }
        Ok(FourierForm { w })
    }

    pub fn matrix(&self) -> &Mat {
        &self.w
    }

    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let wy = self.w.apply(y);
        let mut out = Scalar::zero(self.w.backend());
        for (xi, wyi) in x.iter().zip(&wy) {
            out = out.add(&xi.mul(wyi));
        }
        out
    }

    /// Structure constants of the induced product: `p[a][b]` lists `(j, c)`
    /// with e_a * e_b = sum c e_j.
    pub fn product_table(&self, co: &Coalgebra) -> Vec<Vec<Vec<Scalar>>> {
        let n = co.dim();
        let backend = co.backend();
        let mut table = vec![vec![linalg::vec_zero(n, backend); n]; n];
        for b in 0..n {
            for (i, j, c) in co.delta(b) {
                for a in 0..n {
                    let wai = self.w.get(a, *i);
                    if wai.is_zero() {
                        continue;
                    }
                    table[a][b][*j] = table[a][b][*j].add(&wai.mul(c));
                }
            }
        }
        table
    }

    pub fn product(&self, co: &Coalgebra, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = co.dim();
        let backend = co.backend();
        let mut out = linalg::vec_zero(n, backend);
        // x * y = sum w(x, y1) y2
        for (k, yk) in y.iter().enumerate() {
            if yk.is_zero() {
                continue;
            }
            for (i, j, c) in co.delta(k) {
                let mut wxi = Scalar::zero(backend);
                for (a, xa) in x.iter().enumerate() {
                    if xa.is_zero() {
                        continue;
                    }
                    wxi = wxi.add(&xa.mul(self.w.get(a, *i)));
                }
                out[*j] = out[*j].add(&wxi.mul(c).mul(yk));
            }
        }
        out
    }

    /// Recovers the form from the product through the counit:
    /// w(x, y) = eps(x * y). Bit-identical to the stored matrix when the
    /// counit law holds, which `round_trip` checks.
    pub fn recovered_matrix(&self, co: &Coalgebra) -> Mat {
        let n = co.dim();
        let table = self.product_table(co);
        let mut r = Mat::zeros(n, n, co.backend());
        for a in 0..n {
            for b in 0..n {
                r.set(a, b, co.eps_of(&table[a][b]));
            }
        }
        r
    }

    /// The recovered form must equal the stored one exactly (scalar
    /// equality, no tolerance).
    pub fn round_trip(&self, co: &Coalgebra) -> bool {
        self.recovered_matrix(co) == self.w
    }

    /// Normal means sum x1 * x2 = x for every x.
    pub fn is_normal(&self, co: &Coalgebra, tol: &Tol) -> bool {
        let n = co.dim();
        let backend = co.backend();
        let table = self.product_table(co);
        let mut m = Mat::zeros(n, n, backend);
        for k in 0..n {
            for (i, j, c) in co.delta(k) {
                for t in 0..n {
                    let term = table[*i][*j][t].mul(c);
                    if term.is_zero() {
                        continue;
                    }
                    let v = m.get(t, k).add(&term);
                    m.set(t, k, v);
                }
            }
        }
        m.eq_tol(&Mat::identity(n, backend), tol.eq)
    }

    /// Basis triples (a, b, c) violating w(e_a * e_b, e_c) = w(e_a, e_b * e_c).
    pub fn mixed_associativity_violations(&self, co: &Coalgebra, tol: &Tol) -> Vec<(usize, usize, usize)> {
        let n = co.dim();
        let table = self.product_table(co);
        let mut bad = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut ec = linalg::vec_zero(n, co.backend());
                    ec[c] = Scalar::one(co.backend());
                    let mut ea = linalg::vec_zero(n, co.backend());
                    ea[a] = Scalar::one(co.backend());
                    let lhs = self.eval(&table[a][b], &ec);
                    let rhs = self.eval(&ea, &table[b][c]);
                    if !lhs.eq_tol(&rhs, tol.eq) {
                        bad.push((a, b, c));
                    }
                }
            }
        }
        bad
    }

    /// The product is associative exactly when the form is mixed
    /// associative.
    pub fn is_associative(&self, co: &Coalgebra, tol: &Tol) -> bool {
        let n = co.dim();
        let table = self.product_table(co);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut ecv = linalg::vec_zero(n, co.backend());
                    ecv[c] = Scalar::one(co.backend());
                    let lhs = self.product(co, &table[a][b], &ecv);
                    let rhs = self.product(
                        co,
                        &{
                            let mut eav = linalg::vec_zero(n, co.backend());
                            eav[a] = Scalar::one(co.backend());
                            eav
                        },
                        &table[b][c],
                    );
                    if !linalg::vec_eq_tol(&lhs, &rhs, tol.eq) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_nondegenerate(&self, tol: &Tol) -> Result<bool> {
        let ptol = match self.w.backend() {
            Backend::FloatC => tol.eq * self.w.max_abs().max(1.0),
            _ => 0.0,
        };
        Ok(self.w.rank(ptol)? == self.w.n_rows())
    }

    /// Sesquilinear pairing s(x, y) = w(x deg, y), conjugate-linear in the
    /// first slot; as a matrix s[i][j] = (M^T W)[i][j].
    pub fn sesq_matrix(&self, circ: &ConjOp) -> Mat {
        circ.m.transpose().mul(&self.w)
    }
}

/// The normal Fourier form on the n x n matrix coalgebra:
/// w(t_ab, t_cd) = [a = d][b = c] / n.
pub fn canonical_matrix_form(n: usize, backend: Backend) -> Result<Mat> {
    let inv_n = Scalar::int(backend, n as i64).inv()?;
    let mut w = Mat::zeros(n * n, n * n, backend);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if a == d && b == c {
                        w.set(a * n + b, c * n + d, inv_n.clone());
                    }
                }
            }
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::matrix_coalgebra;

    #[test]
    fn canonical_form_is_normal_and_associative() {
        let tol = Tol::default();
        for n in 2..=3 {
            let mc = matrix_coalgebra(n, Backend::GaussQ, &tol).unwrap();
            let w = canonical_matrix_form(n, Backend::GaussQ).unwrap();
            let form = FourierForm::new(&mc.co, w).unwrap();
            assert!(form.is_normal(&mc.co, &tol), "n = {n}");
            assert!(form.round_trip(&mc.co), "n = {n}");
            assert!(form.mixed_associativity_violations(&mc.co, &tol).is_empty());
            assert!(form.is_associative(&mc.co, &tol));
            assert!(form.is_nondegenerate(&tol).unwrap());
        }
    }

    #[test]
    fn product_on_matrix_units() {
        // t_ab * t_cd = [b = c]/n t_ad mirrors matrix multiplication
        let tol = Tol::default();
        let n = 2;
        let mc = matrix_coalgebra(n, Backend::GaussQ, &tol).unwrap();
        let w = canonical_matrix_form(n, Backend::GaussQ).unwrap();
        let form = FourierForm::new(&mc.co, w).unwrap();
        let table = form.product_table(&mc.co);
        let half = Scalar::ratio(1, 2);
        // t11 * t11 = t11/2
        assert_eq!(table[0][0][0], half);
        // t11 * t12 = t12/2 (indices: t11 = 0, t12 = 1, t21 = 2, t22 = 3)
        assert_eq!(table[0][1][1], half);
        // t12 * t11 = 0
        assert!(table[1][0].iter().all(|s| s.is_zero()));
        // t12 * t21 = t11/2
        assert_eq!(table[1][2][0], half);
    }

    #[test]
    fn sesq_pairing_of_canonical_form_is_scaled_identity() {
        let tol = Tol::default();
        let n = 3;
        let mc = matrix_coalgebra(n, Backend::GaussQ, &tol).unwrap();
        let w = canonical_matrix_form(n, Backend::GaussQ).unwrap();
        let form = FourierForm::new(&mc.co, w).unwrap();
        let s = form.sesq_matrix(&mc.circ);
        let expect = Mat::identity(n * n, Backend::GaussQ).scale(&Scalar::ratio(1, n as i64));
        assert!(s.eq_tol(&expect, 0.0));
    }

    #[test]
    fn identity_form_on_matrix_coalgebra_fails_mixed_associativity() {
        // w(t_ab, t_cd) = [a=c][b=d] gives t_ab * t_cd = [a=c] t_bd, which
        // is normal but not associative
        let tol = Tol::default();
        let mc = matrix_coalgebra(2, Backend::GaussQ, &tol).unwrap();
        let form = FourierForm::new(&mc.co, Mat::identity(4, Backend::GaussQ)).unwrap();
        assert!(form.is_normal(&mc.co, &tol));
        assert!(!form.mixed_associativity_violations(&mc.co, &tol).is_empty());
        assert!(!form.is_associative(&mc.co, &tol));
    }

    #[test]
    fn grouplike_delta_form_is_normal_but_degenerate_iff_constant() {
        let tol = Tol::default();
        // two grouplikes; w(g, h) = 1 everywhere is normal with rank 1
        let basis = vec!["g".to_string(), "h".to_string()];
        let one = Scalar::gauss_int(1, 0);
        let triples = vec![(0, 0, 0, one.clone()), (1, 1, 1, one.clone())];
        let eps = vec![one.clone(), one.clone()];
        let co = Coalgebra::new(basis, triples, eps, &tol).unwrap();
        let mut w = Mat::zeros(2, 2, Backend::GaussQ);
        for i in 0..2 {
            for j in 0..2 {
                w.set(i, j, one.clone());
            }
        }
        let form = FourierForm::new(&co, w).unwrap();
        assert!(form.is_normal(&co, &tol));
        assert!(!form.is_nondegenerate(&tol).unwrap());
    }
}
