//! Finite-dimensional coalgebras given by structure constants, optional
//! conjugate-linear involutions, and decomposition into simple components
//! through the dual algebra.

use crate::arith::{Backend, Scalar, Tol};
use crate::error::{Error, Result};
use crate::linalg::{self, synth, ConjOp, Mat};

fn pivot_tol(backend: Backend, tol: &Tol) -> f64 {
    match backend {
        Backend::FloatC => tol.eq,
        _ => 0.0,
    }
}

/// Comultiplication and counit on a free module with a named basis.
/// `delta[k]` lists the coefficients of `e_i (x) e_j` in `Delta(e_k)`.
#[derive(Debug, Clone)]
pub struct Coalgebra {
    dim: usize,
    basis: Vec<String>,
    backend: Backend,
    delta: Vec<Vec<(usize, usize, Scalar)>>,
    eps: Vec<Scalar>,
}

impl Coalgebra {
    /// Validates shapes, backend homogeneity, coassociativity and the two
    /// counit laws before accepting the structure constants.
    pub fn new(
        basis: Vec<String>,
        delta_triples: Vec<(usize, usize, usize, Scalar)>,
        eps: Vec<Scalar>,
        tol: &Tol,
    ) -> Result<Coalgebra> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::BadInput("empty basis".into()));
        }
        if eps.len() != dim {
            return Err(Error::DimMismatch("counit length".into()));
        }
        let backend = eps[0].backend();
        for s in &eps {
            if s.backend() != backend {
                return Err(Error::MixedBackends(backend, s.backend()));
            }
        }
        let mut delta = vec![Vec::new(); dim];
        for (i, j, k, c) in delta_triples {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::BadInput(format!(
                    "comultiplication index ({i},{j},{k}) out of range"
                )));
            }
            if c.backend() != backend {
                return Err(Error::MixedBackends(backend, c.backend()));
            }
            if !c.is_zero() {
                delta[k].push((i, j, c));
            }
        }
        let co = Coalgebra { dim, basis, backend, delta, eps };
        co.check_axioms(tol)?;
        Ok(co)
    }

    fn check_axioms(&self, tol: &Tol) -> Result<()> {
        let n = self.dim;
        let t = tol.eq;
        // counit laws
        for k in 0..n {
            let mut left = linalg::vec_zero(n, self.backend);
            let mut right = linalg::vec_zero(n, self.backend);
            for (i, j, c) in &self.delta[k] {
                left[*j] = left[*j].add(&self.eps[*i].mul(c));
                right[*i] = right[*i].add(&self.eps[*j].mul(c));
            }
            for m in 0..n {
                let want = if m == k { Scalar::one(self.backend) } else { Scalar::zero(self.backend) };
                if !left[m].eq_tol(&want, t) {
                    return Err(Error::CoalgebraAxiom(format!(
                        "(eps (x) id) Delta fails on basis element {}",
                        self.basis[k]
                    )));
                }
                if !right[m].eq_tol(&want, t) {
                    return Err(Error::CoalgebraAxiom(format!(
                        "(id (x) eps) Delta fails on basis element {}",
                        self.basis[k]
                    )));
                }
            }
        }
        // coassociativity as n^3 coordinates per basis element
        for k in 0..n {
            let mut lhs = vec![Scalar::zero(self.backend); n * n * n];
            let mut rhs = vec![Scalar::zero(self.backend); n * n * n];
            for (i, j, c) in &self.delta[k] {
                for (a, b, d) in &self.delta[*i] {
                    let idx = (a * n + b) * n + j;
                    lhs[idx] = lhs[idx].add(&d.mul(c));
                }
                for (a, b, d) in &self.delta[*j] {
                    let idx = (i * n + a) * n + b;
                    rhs[idx] = rhs[idx].add(&d.mul(c));
                }
            }
            for (l, r) in lhs.iter().zip(&rhs) {
                if !l.eq_tol(r, t) {
                    return Err(Error::CoalgebraAxiom(format!(
                        "coassociativity fails on basis element {}",
                        self.basis[k]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn eps(&self) -> &[Scalar] {
        &self.eps
    }

    pub fn eps_of(&self, x: &[Scalar]) -> Scalar {
        let mut out = Scalar::zero(self.backend);
        for (xi, ei) in x.iter().zip(&self.eps) {
            out = out.add(&xi.mul(ei));
        }
        out
    }

    /// Sparse comultiplication rows: `delta(k)` lists `(i, j, c)` meaning
    /// `Delta(e_k)` contains `c e_i (x) e_j`.
    pub fn delta(&self, k: usize) -> &[(usize, usize, Scalar)] {
        &self.delta[k]
    }

    pub fn delta_triples(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let mut out = Vec::new();
        for (k, row) in self.delta.iter().enumerate() {
            for (i, j, c) in row {
                out.push((*i, *j, k, c.clone()));
            }
        }
        out
    }

    /// Delta as an n^2 x n matrix, row index i*n + j.
    pub fn delta_matrix(&self) -> Mat {
        let n = self.dim;
        let mut m = Mat::zeros(n * n, n, self.backend);
        for (k, row) in self.delta.iter().enumerate() {
            for (i, j, c) in row {
                m.set(i * n + j, k, c.clone());
            }
        }
        m
    }

    pub fn apply_delta(&self, x: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim;
        let mut out = linalg::vec_zero(n * n, self.backend);
        for (k, xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            for (i, j, c) in &self.delta[k] {
                out[i * n + j] = out[i * n + j].add(&c.mul(xk));
            }
        }
        out
    }

    /// Matrix of the left dual-multiplication g -> f . g, where the dual
    /// product is (f . g)(c) = sum f(c1) g(c2).
    pub fn dual_left_mult(&self, f: &[Scalar]) -> Mat {
        let n = self.dim;
        let mut m = Mat::zeros(n, n, self.backend);
        for (k, row) in self.delta.iter().enumerate() {
            for (i, j, c) in row {
                if f[*i].is_zero() {
                    continue;
                }
                let v = m.get(k, *j).add(&f[*i].mul(c));
                m.set(k, *j, v);
            }
        }
        m
    }

    /// Matrix of the right dual-multiplication f -> f . g.
    pub fn dual_right_mult(&self, g: &[Scalar]) -> Mat {
        let n = self.dim;
        let mut m = Mat::zeros(n, n, self.backend);
        for (k, row) in self.delta.iter().enumerate() {
            for (i, j, c) in row {
                if g[*j].is_zero() {
                    continue;
                }
                let v = m.get(k, *i).add(&g[*j].mul(c));
                m.set(k, *i, v);
            }
        }
        m
    }

    pub fn dual_product(&self, f: &[Scalar], g: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim;
        let mut out = linalg::vec_zero(n, self.backend);
        for (k, row) in self.delta.iter().enumerate() {
            for (i, j, c) in row {
                let term = f[*i].mul(&g[*j]).mul(c);
                out[k] = out[k].add(&term);
            }
        }
        out
    }

    /// Matrix of (f * id): c -> sum f(c1) c2.
    pub fn conv_left(&self, f: &[Scalar]) -> Mat {
        let n = self.dim;
        let mut m = Mat::zeros(n, n, self.backend);
        for (k, row) in self.delta.iter().enumerate() {
            for (i, j, c) in row {
                if f[*i].is_zero() {
                    continue;
                }
                let v = m.get(*j, k).add(&f[*i].mul(c));
                m.set(*j, k, v);
            }
        }
        m
    }

    /// Matrix of (id * f): c -> sum c1 f(c2).
    pub fn conv_right(&self, f: &[Scalar]) -> Mat {
        let n = self.dim;
        let mut m = Mat::zeros(n, n, self.backend);
        for (k, row) in self.delta.iter().enumerate() {
            for (i, j, c) in row {
                if f[*j].is_zero() {
                    continue;
                }
                let v = m.get(*i, k).add(&f[*j].mul(c));
                m.set(*i, k, v);
            }
        }
        m
    }

    /// Basis of the dual algebra's center, as functional coordinate vectors.
    pub fn dual_center(&self, tol: &Tol) -> Result<Vec<Vec<Scalar>>> {
        let n = self.dim;
        let mut rows = Vec::with_capacity(n * n);
        for m in 0..n {
            let mut em = linalg::vec_zero(n, self.backend);
            em[m] = Scalar::one(self.backend);
            let l = self.dual_left_mult(&em);
            let r = self.dual_right_mult(&em);
            let d = l.sub(&r);
            for k in 0..n {
                rows.push(d.row(k));
            }
        }
        let sys = Mat::from_rows(rows)?;
        sys.kernel(pivot_tol(self.backend, tol))
    }

    pub fn to_float(&self) -> Result<Coalgebra> {
        let mut triples = Vec::new();
        for (i, j, k, c) in self.delta_triples() {
            triples.push((i, j, k, c.to_float_backend()?));
        }
        let eps = self
            .eps
            .iter()
            .map(|s| s.to_float_backend())
            .collect::<Result<Vec<_>>>()?;
        Coalgebra::new(self.basis.clone(), triples, eps, &Tol::default())
    }
}

/// A coalgebra with a conjugate-linear involution that reverses
/// comultiplication.
#[derive(Debug, Clone)]
pub struct CircCoalgebra {
    pub co: Coalgebra,
    pub circ: ConjOp,
}

impl CircCoalgebra {
    pub fn new(co: Coalgebra, circ: ConjOp, tol: &Tol) -> Result<CircCoalgebra> {
        let n = co.dim();
        if circ.m.n_rows() != n || circ.m.n_cols() != n {
            return Err(Error::DimMismatch("involution matrix shape".into()));
        }
        if circ.m.backend() != co.backend() {
            return Err(Error::MixedBackends(co.backend(), circ.m.backend()));
        }
        if !circ.is_involution(tol) {
            return Err(Error::CircAxiom("involution squared is not the identity".into()));
        }
        let t = tol.eq;
        // eps(c deg) = conj(eps(c))
        for k in 0..n {
            let mut lhs = Scalar::zero(co.backend());
            for m in 0..n {
                lhs = lhs.add(&circ.m.get(m, k).mul(&co.eps()[m]));
            }
            if !lhs.eq_tol(&co.eps()[k].conj(), t) {
                return Err(Error::CircAxiom(format!(
                    "counit compatibility fails on basis element {}",
                    co.basis_names()[k]
                )));
            }
        }
        // Delta(c deg) = sum c2 deg (x) c1 deg
        for k in 0..n {
            let mut lhs = linalg::vec_zero(n * n, co.backend());
            for m in 0..n {
                let w = circ.m.get(m, k);
                if w.is_zero() {
                    continue;
                }
                for (i, j, c) in co.delta(m) {
                    lhs[i * n + j] = lhs[i * n + j].add(&c.mul(w));
                }
            }
            let mut rhs = linalg::vec_zero(n * n, co.backend());
            for (i, j, c) in co.delta(k) {
                let cc = c.conj();
                for a in 0..n {
                    let ma = circ.m.get(a, *j);
                    if ma.is_zero() {
                        continue;
                    }
                    for b in 0..n {
                        let mb = circ.m.get(b, *i);
                        if mb.is_zero() {
                            continue;
                        }
                        rhs[a * n + b] = rhs[a * n + b].add(&cc.mul(ma).mul(mb));
                    }
                }
            }
            if !linalg::vec_eq_tol(&lhs, &rhs, t) {
                return Err(Error::CircAxiom(format!(
                    "comultiplication reversal fails on basis element {}",
                    co.basis_names()[k]
                )));
            }
        }
        Ok(CircCoalgebra { co, circ })
    }

    pub fn dim(&self) -> usize {
        self.co.dim()
    }

    pub fn backend(&self) -> Backend {
        self.co.backend()
    }

    pub fn to_float(&self) -> Result<CircCoalgebra> {
        let co = self.co.to_float()?;
        let circ = ConjOp::new(self.circ.m.to_float()?);
        CircCoalgebra::new(co, circ, &Tol::default())
    }
}

/// The n x n matrix coalgebra: basis t_ij, Delta(t_ij) = sum_k t_ik (x) t_kj,
/// eps(t_ij) = [i = j], involution t_ij -> t_ji.
pub fn matrix_coalgebra(n: usize, backend: Backend, tol: &Tol) -> Result<CircCoalgebra> {
    let mut basis = Vec::new();
    for i in 0..n {
        for j in 0..n {
            basis.push(format!("t{}{}", i + 1, j + 1));
        }
    }
    let mut triples = Vec::new();
    let mut eps = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let kidx = i * n + j;
            for k in 0..n {
                triples.push((i * n + k, k * n + j, kidx, Scalar::one(backend)));
            }
            eps.push(if i == j { Scalar::one(backend) } else { Scalar::zero(backend) });
        }
    }
    let co = Coalgebra::new(basis, triples, eps, tol)?;
    let mut m = Mat::zeros(n * n, n * n, backend);
    for i in 0..n {
        for j in 0..n {
            m.set(j * n + i, i * n + j, Scalar::one(backend));
        }
    }
    CircCoalgebra::new(co, ConjOp::new(m), tol)
}

/// One simple component of a cosemisimple coalgebra: columns of `basis` span
/// the subcoalgebra inside the ambient space.
#[derive(Debug, Clone)]
pub struct Component {
    pub basis: Mat,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.basis.n_cols()
    }
}

const SPLIT_RETRIES: usize = 8;

/// Splits a cosemisimple coalgebra into its simple components.
///
/// Works through the dual algebra: a random central functional is split into
/// eigenspaces; one-dimensional eigenspaces rescale to the primitive central
/// idempotents, whose convolution action cuts out the components. Exact
/// backends fail with `ExactUnrepresentable` when the component structure
/// needs eigenvalues outside the field.
pub fn decompose_simple(co: &Coalgebra, tol: &Tol, seed: u64) -> Result<Vec<Component>> {
    let n = co.dim();
    let backend = co.backend();
    let ptol = pivot_tol(backend, tol);
    let center = co.dual_center(tol)?;
    let d = center.len();
    if d == 0 {
        return Err(Error::NotCosemisimple("dual center is zero".into()));
    }
    let z_mat = Mat::from_cols(center.clone())?;
    let mut rng = synth::rng(seed);
    let mut split = None;
    let mut last_err = None;
    for _ in 0..SPLIT_RETRIES {
        let coeffs: Vec<Scalar> = (0..d).map(|_| synth::rand_scalar(backend, &mut rng)).collect();
        let z = z_mat.apply(&coeffs);
        let t_full = co.dual_left_mult(&z);
        let t_center = t_full.restrict(&z_mat, ptol, tol.residual)?;
        match linalg::eigen_split(&t_center, tol) {
            Ok(s) => {
                if s.pairs.iter().all(|p| p.basis.len() == 1) && s.total_dim() == d {
                    split = Some(s);
                    break;
                }
                last_err = Some(Error::NotCosemisimple(
                    "central element failed to separate the components".into(),
                ));
            }
            Err(e @ Error::ExactUnrepresentable(_)) => {
                return Err(Error::ExactUnrepresentable(format!(
                    "component split needs scalars outside the exact field ({e}); \
                     rerun with the float backend"
                )));
            }
            Err(Error::NotDiagonalizable) => {
                return Err(Error::NotCosemisimple(
                    "central multiplication is not diagonalizable".into(),
                ));
            }
            Err(e) => return Err(e),
        }
    }
    let split = match split {
        Some(s) => s,
        None => return Err(last_err.unwrap_or(Error::NotCosemisimple("no separating central element".into()))),
    };

    let mut comps = Vec::new();
    for pair in &split.pairs {
        let w = z_mat.apply(&pair.basis[0]);
        let ww = co.dual_product(&w, &w);
        let lead = w.iter().position(|s| !s.is_zero_tol(tol.eq * linalg::vec_max_abs(&w).max(1.0)));
        let lead = lead.ok_or_else(|| Error::NotCosemisimple("zero central eigenvector".into()))?;
        let c = ww[lead].div(&w[lead])?;
        if c.is_zero_tol(tol.eq) {
            return Err(Error::NotCosemisimple(
                "dual center contains a nilpotent element".into(),
            ));
        }
        let scaled = linalg::vec_eq_tol(
            &ww,
            &linalg::vec_scale(&c, &w),
            tol.residual * linalg::vec_max_abs(&ww).max(1.0),
        );
        if !scaled {
            return Err(Error::NotCosemisimple(
                "central eigenvector does not square to a multiple of itself".into(),
            ));
        }
        let p = linalg::vec_scale(&c.inv()?, &w);
        let conv = co.conv_left(&p);
        let (r, pivots) = conv.transpose().rref(ptol)?;
        let mut cols = Vec::new();
        for (row, _) in pivots.iter().enumerate() {
            cols.push(r.row(row));
        }
        if cols.is_empty() {
            return Err(Error::NotCosemisimple("empty component".into()));
        }
        comps.push(Component { basis: Mat::from_cols(cols)? });
    }

    let total: usize = comps.iter().map(|c| c.dim()).sum();
    if total != n {
        return Err(Error::NotCosemisimple(format!(
            "component dimensions sum to {total}, expected {n}"
        )));
    }
    for c in &comps {
        check_subcoalgebra(co, &c.basis, tol)?;
    }
    comps.sort_by(|a, b| {
        a.dim()
            .cmp(&b.dim())
            .then_with(|| pivot_signature(&a.basis).cmp(&pivot_signature(&b.basis)))
    });
    Ok(comps)
}

fn pivot_signature(basis: &Mat) -> Vec<usize> {
    let mut sig = Vec::new();
    for j in 0..basis.n_cols() {
        for i in 0..basis.n_rows() {
            if !basis.get(i, j).is_zero_tol(1e-12) {
                sig.push(i);
                break;
            }
        }
    }
    sig
}

/// Checks Delta(span) is contained in span (x) span.
fn check_subcoalgebra(co: &Coalgebra, basis: &Mat, tol: &Tol) -> Result<()> {
    let n = co.dim();
    let d = basis.n_cols();
    let backend = co.backend();
    let ptol = pivot_tol(backend, tol);
    // columns of bb span the image of span (x) span inside the n^2 space
    let mut bb = Mat::zeros(n * n, d * d, backend);
    for a in 0..d {
        for b in 0..d {
            for i in 0..n {
                let via = basis.get(i, a);
                if via.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let vjb = basis.get(j, b);
                    if vjb.is_zero() {
                        continue;
                    }
                    bb.set(i * n + j, a * d + b, via.mul(vjb));
                }
            }
        }
    }
    let mut rhs = Mat::zeros(n * n, d, backend);
    for a in 0..d {
        let dv = co.apply_delta(&basis.col(a));
        for (idx, s) in dv.into_iter().enumerate() {
            rhs.set(idx, a, s);
        }
    }
    bb.solve_general(&rhs, ptol, tol.residual * rhs.max_abs().max(1.0))
        .map_err(|_| Error::NotCosemisimple("component is not a subcoalgebra".into()))?;
    Ok(())
}

/// A coalgebra is split simple when its dual center is one-dimensional,
/// spanned by a non-nilpotent element, and its dimension is a perfect square.
pub fn is_simple(co: &Coalgebra, tol: &Tol, seed: u64) -> Result<bool> {
    let comps = match decompose_simple(co, tol, seed) {
        Ok(c) => c,
        Err(Error::NotCosemisimple(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    if comps.len() != 1 {
        return Ok(false);
    }
    let n = co.dim();
    let r = (n as f64).sqrt().round() as usize;
    Ok(r * r == n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Scalar {
        Scalar::gauss_int(1, 0)
    }

    #[test]
    fn matrix_coalgebra_passes_axioms() {
        let tol = Tol::default();
        for n in 1..=3 {
            let mc = matrix_coalgebra(n, Backend::GaussQ, &tol).unwrap();
            assert_eq!(mc.dim(), n * n);
        }
    }

    #[test]
    fn broken_coassociativity_is_rejected() {
        let tol = Tol::default();
        // grouplike pair with one bad triple
        let basis = vec!["g".to_string(), "h".to_string()];
        let triples = vec![(0, 0, 0, one()), (0, 1, 1, one())];
        let eps = vec![one(), one()];
        let err = Coalgebra::new(basis, triples, eps, &tol).unwrap_err();
        assert!(matches!(err, Error::CoalgebraAxiom(_)));
    }

    #[test]
    fn broken_counit_is_rejected() {
        let tol = Tol::default();
        let basis = vec!["g".to_string()];
        let triples = vec![(0, 0, 0, one())];
        let eps = vec![Scalar::gauss_int(2, 0)];
        let err = Coalgebra::new(basis, triples, eps, &tol).unwrap_err();
        assert!(matches!(err, Error::CoalgebraAxiom(_)));
    }

    fn grouplike(n: usize) -> Coalgebra {
        let tol = Tol::default();
        let basis = (0..n).map(|i| format!("g{i}")).collect();
        let triples = (0..n).map(|i| (i, i, i, one())).collect();
        let eps = vec![one(); n];
        Coalgebra::new(basis, triples, eps, &tol).unwrap()
    }

    #[test]
    fn grouplike_coalgebra_splits_into_lines() {
        let tol = Tol::default();
        let co = grouplike(3);
        let comps = decompose_simple(&co, &tol, 11).unwrap();
        assert_eq!(comps.len(), 3);
        for c in &comps {
            assert_eq!(c.dim(), 1);
        }
    }

    #[test]
    fn matrix_coalgebra_is_simple() {
        let tol = Tol::default();
        let mc = matrix_coalgebra(2, Backend::GaussQ, &tol).unwrap();
        assert!(is_simple(&mc.co, &tol, 5).unwrap());
        assert!(!is_simple(&grouplike(2), &tol, 5).unwrap());
    }

    #[test]
    fn block_sum_decomposes_into_line_plus_matrix_block() {
        let tol = Tol::default();
        // direct sum of a grouplike line and the 2x2 matrix coalgebra
        let mut basis = vec!["g".to_string()];
        let m2 = matrix_coalgebra(2, Backend::GaussQ, &tol).unwrap();
        basis.extend(m2.co.basis_names().iter().cloned());
        let mut triples = vec![(0, 0, 0, one())];
        for (i, j, k, c) in m2.co.delta_triples() {
            triples.push((i + 1, j + 1, k + 1, c));
        }
        let mut eps = vec![one()];
        eps.extend(m2.co.eps().iter().cloned());
        let co = Coalgebra::new(basis, triples, eps, &tol).unwrap();
        let comps = decompose_simple(&co, &tol, 3).unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].dim(), 1);
        assert_eq!(comps[1].dim(), 4);
        assert!(is_simple(&co, &tol, 3).is_ok_and(|b| !b));
    }

    fn cyclic_convolution(n: usize, backend: Backend) -> Coalgebra {
        let tol = Tol::default();
        let basis = (0..n).map(|i| format!("d{i}")).collect();
        let mut triples = Vec::new();
        for k in 0..n {
            for i in 0..n {
                let j = (n + k - i) % n;
                triples.push((i, j, k, Scalar::one(backend)));
            }
        }
        let mut eps = vec![Scalar::zero(backend); n];
        eps[0] = Scalar::one(backend);
        Coalgebra::new(basis, triples, eps, &tol).unwrap()
    }

    #[test]
    fn convolution_coalgebra_needs_floats_when_characters_are_irrational() {
        let tol = Tol::default();
        let c3 = cyclic_convolution(3, Backend::GaussQ);
        let err = decompose_simple(&c3, &tol, 9).unwrap_err();
        assert!(matches!(err, Error::ExactUnrepresentable(_)));

        let c3f = cyclic_convolution(3, Backend::FloatC);
        let comps = decompose_simple(&c3f, &tol, 9).unwrap();
        assert_eq!(comps.len(), 3);

        // fourth roots of unity live in the field, so exact works
        let c4 = cyclic_convolution(4, Backend::GaussQ);
        let comps = decompose_simple(&c4, &tol, 9).unwrap();
        assert_eq!(comps.len(), 4);
    }

    #[test]
    fn matrix_coalgebra_involution_reverses_delta() {
        let tol = Tol::default();
        let mc = matrix_coalgebra(3, Backend::GaussQ, &tol).unwrap();
        // constructor already validates; check one value by hand:
        // (t12) deg = t21
        let x = mc.circ.apply(&{
            let mut v = linalg::vec_zero(9, Backend::GaussQ);
            v[1] = one();
            v
        });
        assert_eq!(x[3], one());
        assert!(x.iter().enumerate().all(|(i, s)| i == 3 || s.is_zero()));
    }

    #[test]
    fn dual_product_matches_delta_pairing() {
        let tol = Tol::default();
        let mc = matrix_coalgebra(2, Backend::GaussQ, &tol).unwrap();
        // dual of a matrix coalgebra multiplies like matrix units transposed:
        // (e^{ab} . e^{cd})(t_ij) = [a=i][b=c][d=j]
        let mut f = linalg::vec_zero(4, Backend::GaussQ);
        f[0 * 2 + 1] = one(); // e^{12}
        let mut g = linalg::vec_zero(4, Backend::GaussQ);
        g[1 * 2 + 0] = one(); // e^{21}
        let fg = mc.co.dual_product(&f, &g);
        // expect e^{11}
        assert_eq!(fg[0], one());
        assert!(fg[1].is_zero() && fg[2].is_zero() && fg[3].is_zero());
    }
}
