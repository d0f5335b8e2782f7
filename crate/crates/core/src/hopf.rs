//! Hopf algebras by structure constants: axiom validation, the normalized
//! two-sided integral, the induced inner product and compactness verdict,
//! the Nakayama automorphism with its modular functional and distinguished
//! grouplike, positive and unitary antipodes, the square-root functional
//! found through inner automorphisms of simple components, batteries of
//! equivalent trace conditions, and conjugacy of involutions by positive
//! operators.

use crate::arith::{Backend, Scalar, Tol};
use crate::coalgebra::{decompose_simple, CircCoalgebra, Coalgebra, Component};
use crate::error::{Error, Result};
use crate::fourier::FourierForm;
use crate::linalg::{self, positive_sqrt, ConjOp, Gram, Mat};

fn backend_pivot(backend: Backend, tol: &Tol) -> f64 {
    match backend {
        Backend::FloatC => tol.eq,
        _ => 0.0,
    }
}

/// A finite-dimensional Hopf algebra, optionally carrying a conjugate-linear
/// multiplicative involution that reverses comultiplication.
#[derive(Debug, Clone)]
pub struct Hopf {
    pub co: Coalgebra,
    mult: Vec<Vec<Vec<(usize, Scalar)>>>,
    unit: Vec<Scalar>,
    antipode: Mat,
    pub circ: Option<ConjOp>,
}

impl Hopf {
    pub fn new(
        co: Coalgebra,
        mult_triples: Vec<(usize, usize, usize, Scalar)>,
        unit: Vec<Scalar>,
        antipode: Mat,
        circ: Option<ConjOp>,
        tol: &Tol,
    ) -> Result<Hopf> {
        let n = co.dim();
        let backend = co.backend();
        if unit.len() != n {
            return Err(Error::DimMismatch("unit vector length".into()));
        }
        if antipode.n_rows() != n || antipode.n_cols() != n {
            return Err(Error::DimMismatch("antipode matrix shape".into()));
        }
        if antipode.backend() != backend {
            return Err(Error::MixedBackends(backend, antipode.backend()));
        }
        for s in &unit {
            if s.backend() != backend {
                return Err(Error::MixedBackends(backend, s.backend()));
            }
        }
        let mut mult = vec![vec![Vec::new(); n]; n];
        for (i, j, k, c) in mult_triples {
            if i >= n || j >= n || k >= n {
                return Err(Error::BadInput(format!(
                    "product index ({i},{j},{k}) out of range"
                )));
            }
            if c.backend() != backend {
                return Err(Error::MixedBackends(backend, c.backend()));
            }
            if !c.is_zero() {
                mult[i][j].push((k, c));
            }
        }
        let h = Hopf { co, mult, unit, antipode, circ: None };
        h.check_algebra(tol)?;
        h.check_bialgebra(tol)?;
        h.check_antipode(tol)?;
        let h = match circ {
            Some(op) => {
                let h2 = Hopf { circ: Some(op), ..h };
                h2.check_circ(tol)?;
                h2
            }
            None => h,
        };
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.co.dim()
    }

    pub fn backend(&self) -> Backend {
        self.co.backend()
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn antipode(&self) -> &Mat {
        &self.antipode
    }

    pub fn antipode_inverse(&self, tol: &Tol) -> Result<Mat> {
        self.antipode.inverse(self.pivot_tol(tol))
    }

    fn pivot_tol(&self, tol: &Tol) -> f64 {
        backend_pivot(self.backend(), tol)
    }

    pub fn mult_triples(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let mut out = Vec::new();
        for (i, row) in self.mult.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                for (k, c) in cell {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    pub fn basis_vec(&self, i: usize) -> Vec<Scalar> {
        let mut v = linalg::vec_zero(self.dim(), self.backend());
        v[i] = Scalar::one(self.backend());
        v
    }

    pub fn product(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = linalg::vec_zero(n, self.backend());
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let f = xi.mul(yj);
                for (k, c) in &self.mult[i][j] {
                    out[*k] = out[*k].add(&f.mul(c));
                }
            }
        }
        out
    }

    /// Matrix of left multiplication y -> x y.
    pub fn left_mult(&self, x: &[Scalar]) -> Mat {
        let n = self.dim();
        let mut m = Mat::zeros(n, n, self.backend());
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, c) in &self.mult[i][j] {
                    let v = m.get(*k, j).add(&xi.mul(c));
                    m.set(*k, j, v);
                }
            }
        }
        m
    }

    /// Convolution of two linear maps: (A * B)(x) = sum A(x1) B(x2).
    pub fn conv_map(&self, a: &Mat, b: &Mat) -> Mat {
        let n = self.dim();
        let mut out = Mat::zeros(n, n, self.backend());
        for k in 0..n {
            for (i, j, c) in self.co.delta(k) {
                let prod = self.product(&a.col(*i), &b.col(*j));
                for (t, p) in prod.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    let v = out.get(t, k).add(&p.mul(c));
                    out.set(t, k, v);
                }
            }
        }
        out
    }

    pub fn eval_functional(&self, f: &[Scalar], x: &[Scalar]) -> Scalar {
        let mut out = Scalar::zero(self.backend());
        for (fi, xi) in f.iter().zip(x) {
            out = out.add(&fi.mul(xi));
        }
        out
    }

    fn check_algebra(&self, tol: &Tol) -> Result<()> {
        let n = self.dim();
        let t = tol.eq;
        for i in 0..n {
            let ei = self.basis_vec(i);
            let lhs = self.product(&self.unit, &ei);
            let rhs = self.product(&ei, &self.unit);
            if !linalg::vec_eq_tol(&lhs, &ei, t) || !linalg::vec_eq_tol(&rhs, &ei, t) {
                return Err(Error::HopfAxiom(format!(
                    "unit law fails on basis element {}",
                    self.co.basis_names()[i]
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = self.product(&self.product(&self.basis_vec(i), &self.basis_vec(j)), &self.basis_vec(k));
                    let rhs = self.product(&self.basis_vec(i), &self.product(&self.basis_vec(j), &self.basis_vec(k)));
                    if !linalg::vec_eq_tol(&lhs, &rhs, t) {
                        return Err(Error::HopfAxiom(format!(
                            "associativity fails on ({}, {}, {})",
                            self.co.basis_names()[i],
                            self.co.basis_names()[j],
                            self.co.basis_names()[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_bialgebra(&self, tol: &Tol) -> Result<()> {
        let n = self.dim();
        let t = tol.eq;
        let eps = self.co.eps();
        if !self.co.eps_of(&self.unit).eq_tol(&Scalar::one(self.backend()), t) {
            return Err(Error::HopfAxiom("counit of the unit is not 1".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let mut lhs = Scalar::zero(self.backend());
                for (k, c) in &self.mult[i][j] {
                    lhs = lhs.add(&eps[*k].mul(c));
                }
                if !lhs.eq_tol(&eps[i].mul(&eps[j]), t) {
                    return Err(Error::HopfAxiom(format!(
                        "counit is not multiplicative on ({}, {})",
                        self.co.basis_names()[i],
                        self.co.basis_names()[j]
                    )));
                }
            }
        }
        let d1 = self.co.apply_delta(&self.unit);
        for a in 0..n {
            for b in 0..n {
                let want = self.unit[a].mul(&self.unit[b]);
                if !d1[a * n + b].eq_tol(&want, t) {
                    return Err(Error::HopfAxiom("comultiplication of the unit".into()));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let mut lhs = linalg::vec_zero(n * n, self.backend());
                for (k, c) in &self.mult[i][j] {
                    for (a, b, d) in self.co.delta(*k) {
                        lhs[a * n + b] = lhs[a * n + b].add(&d.mul(c));
                    }
                }
                let mut rhs = linalg::vec_zero(n * n, self.backend());
                for (a1, b1, c1) in self.co.delta(i) {
                    for (a2, b2, c2) in self.co.delta(j) {
                        let f = c1.mul(c2);
                        for (ka, ca) in &self.mult[*a1][*a2] {
                            for (kb, cb) in &self.mult[*b1][*b2] {
                                let idx = *ka * n + *kb;
                                rhs[idx] = rhs[idx].add(&f.mul(ca).mul(cb));
                            }
                        }
                    }
                }
                if !linalg::vec_eq_tol(&lhs, &rhs, t) {
                    return Err(Error::HopfAxiom(format!(
                        "comultiplication is not multiplicative on ({}, {})",
                        self.co.basis_names()[i],
                        self.co.basis_names()[j]
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_antipode(&self, tol: &Tol) -> Result<()> {
        let n = self.dim();
        let t = tol.eq;
        let id = Mat::identity(n, self.backend());
        let left = self.conv_map(&self.antipode, &id);
        let right = self.conv_map(&id, &self.antipode);
        for k in 0..n {
            let want = linalg::vec_scale(&self.co.eps()[k], &self.unit);
            if !linalg::vec_eq_tol(&left.col(k), &want, t)
                || !linalg::vec_eq_tol(&right.col(k), &want, t)
            {
                return Err(Error::HopfAxiom(format!(
                    "antipode convolution law fails on {}",
                    self.co.basis_names()[k]
                )));
            }
        }
        Ok(())
    }

    fn check_circ(&self, tol: &Tol) -> Result<()> {
        let op = self.circ.as_ref().expect("check_circ without involution");
        CircCoalgebra::new(self.co.clone(), op.clone(), tol)?;
        let n = self.dim();
        let t = tol.eq;
        let u = op.apply(&self.unit);
        if !linalg::vec_eq_tol(&u, &self.unit, t) {
            return Err(Error::CircAxiom("involution moves the unit".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let mut lhs = linalg::vec_zero(n, self.backend());
                for (k, c) in &self.mult[i][j] {
                    let ck = op.m.col(*k);
                    let cc = c.conj();
                    for (m, s) in ck.iter().enumerate() {
                        lhs[m] = lhs[m].add(&cc.mul(s));
                    }
                }
                let rhs = self.product(&op.m.col(i), &op.m.col(j));
                if !linalg::vec_eq_tol(&lhs, &rhs, t) {
                    return Err(Error::CircAxiom(format!(
                        "involution is not multiplicative on ({}, {})",
                        self.co.basis_names()[i],
                        self.co.basis_names()[j]
                    )));
                }
            }
        }
        // S circ S circ = id
        let s_twisted = self.antipode.mul(&op.m).mul(&self.antipode.conj()).mul(&op.m.conj());
        if !s_twisted.eq_tol(&Mat::identity(n, self.backend()), t) {
            return Err(Error::CircAxiom(
                "antipode conjugated by the involution does not invert".into(),
            ));
        }
        Ok(())
    }

    /// The normalized two-sided integral functional: phi(1) = 1 with
    /// sum phi(x1) x2 = sum x1 phi(x2) = phi(x) 1, by one joint linear
    /// solve over the dual.
    pub fn normal_integral(&self, tol: &Tol) -> Result<Vec<Scalar>> {
        let n = self.dim();
        let backend = self.backend();
        let mut rows = Vec::with_capacity(2 * n * n);
        // sum phi(x1) x2 = phi(x) 1: coefficient rows over (k, m)
        for k in 0..n {
            for m in 0..n {
                let mut row = linalg::vec_zero(n, backend);
                for (i, j, c) in self.co.delta(k) {
                    if *j == m {
                        row[*i] = row[*i].add(c);
                    }
                }
                row[k] = row[k].sub(&self.unit[m]);
                rows.push(row);
            }
        }
        // sum x1 phi(x2) = phi(x) 1
        for k in 0..n {
            for m in 0..n {
                let mut row = linalg::vec_zero(n, backend);
                for (i, j, c) in self.co.delta(k) {
                    if *i == m {
                        row[*j] = row[*j].add(c);
                    }
                }
                row[k] = row[k].sub(&self.unit[m]);
                rows.push(row);
            }
        }
        let sys = Mat::from_rows(rows)?;
        let ker = sys.kernel(self.pivot_tol(tol))?;
        match ker.len() {
            0 => Err(Error::NoIntegral("no normal integral (not cosemisimple)".into())),
            1 => {
                let lam = &ker[0];
                let lam1 = self.eval_functional(lam, &self.unit);
                if lam1.is_zero_tol(tol.eq * linalg::vec_max_abs(lam).max(1.0)) {
                    return Err(Error::NoIntegral(
                        "no normal integral (not cosemisimple)".into(),
                    ));
                }
                Ok(linalg::vec_scale(&lam1.inv()?, lam))
            }
            _ => Err(Error::NoIntegral("integral not unique".into())),
        }
    }

    /// Independent route to the integral: project onto the coefficient of
    /// the unit across the simple-component decomposition.
    pub fn integral_via_decomposition(&self, tol: &Tol, seed: u64) -> Result<Vec<Scalar>> {
        let comps = decompose_simple(&self.co, tol, seed)?;
        let parts: Vec<&Mat> = comps.iter().map(|c| &c.basis).collect();
        let all = Mat::hstack(&parts)?;
        let inv = all.inverse(self.pivot_tol(tol))?;
        // the unit spans a one-dimensional component; its dual coordinate
        // functional kills every other component
        let coords = inv.apply(&self.unit);
        let scale = linalg::vec_max_abs(&coords).max(1.0);
        let mut offset = 0usize;
        let mut phi = None;
        for c in &comps {
            let d = c.dim();
            let support: Vec<usize> = (offset..offset + d)
                .filter(|t| !coords[*t].is_zero_tol(tol.eq * scale))
                .collect();
            if !support.is_empty() {
                if d != 1 || support.len() != 1 || phi.is_some() {
                    return Err(Error::NoIntegral(
                        "unit does not span a line in the decomposition".into(),
                    ));
                }
                let t = support[0];
                let row: Vec<Scalar> = (0..self.dim()).map(|j| inv.get(t, j).clone()).collect();
                let at_unit = self.eval_functional(&row, &self.unit);
                phi = Some(linalg::vec_scale(&at_unit.inv()?, &row));
            }
            offset += d;
        }
        phi.ok_or_else(|| Error::NoIntegral("unit missing from the decomposition".into()))
    }

    /// Inner product matrix G[j][i] = phi(S(e_j deg) e_i) from the integral
    /// and the involution.
    pub fn gram_matrix(&self, tol: &Tol) -> Result<Mat> {
        let op = self
            .circ
            .as_ref()
            .ok_or_else(|| Error::BadInput("no involution on this algebra".into()))?;
        let phi = self.normal_integral(tol)?;
        let n = self.dim();
        let mut g = Mat::zeros(n, n, self.backend());
        for j in 0..n {
            let sj = self.antipode.apply(&op.m.col(j));
            for i in 0..n {
                let prod = self.product(&sj, &self.basis_vec(i));
                g.set(j, i, self.eval_functional(&phi, &prod));
            }
        }
        Ok(g)
    }

    pub fn compact_gram(&self, tol: &Tol) -> Result<Gram> {
        Gram::new(self.gram_matrix(tol)?, tol)
    }

    /// Compactness verdict: either the validated inner product, or the
    /// reason with a witness.
    pub fn compact_verdict(&self, tol: &Tol) -> Result<CompactVerdict> {
        let g = match self.gram_matrix(tol) {
            Ok(g) => g,
            Err(Error::NoIntegral(msg)) => return Ok(CompactVerdict::NoIntegral(msg)),
            Err(e) => return Err(e),
        };
        match Gram::new(g.clone(), tol) {
            Ok(gram) => Ok(CompactVerdict::Compact(gram)),
            Err(Error::GramNotHermitian) => Ok(CompactVerdict::NotHermitian),
            Err(Error::GramNotPositive) => {
                let witness = match g.to_cmat() {
                    Ok(c) => crate::numeric::hermitian_eigen(&c).ok().and_then(|(eigs, v)| {
                        let mut idx = 0;
                        for (i, e) in eigs.iter().enumerate() {
                            if e < &eigs[idx] {
                                idx = i;
                            }
                        }
                        if eigs[idx] <= tol.eq {
                            Some((eigs[idx], (0..g.n_rows()).map(|r| v[(r, idx)]).collect()))
                        } else {
                            None
                        }
                    }),
                    Err(_) => None,
                };
                Ok(CompactVerdict::NotPositive(witness))
            }
            Err(e) => Err(e),
        }
    }

    pub fn is_compact(&self, tol: &Tol) -> Result<bool> {
        Ok(matches!(self.compact_verdict(tol)?, CompactVerdict::Compact(_)))
    }

    /// Pairing matrix B[i][j] = phi(e_i e_j).
    pub fn integral_pairing(&self, tol: &Tol) -> Result<Mat> {
        let phi = self.normal_integral(tol)?;
        let n = self.dim();
        let mut b = Mat::zeros(n, n, self.backend());
        for i in 0..n {
            for j in 0..n {
                let prod = self.product(&self.basis_vec(i), &self.basis_vec(j));
                b.set(i, j, self.eval_functional(&phi, &prod));
            }
        }
        Ok(b)
    }

    /// Nakayama automorphism: the unique N with phi(x y) = phi(y N(x)),
    /// solved from the integral pairing as B^{-1} B^T. When the algebra
    /// carries a compact involution, positivity and commutation with the
    /// involution are verified.
    pub fn nakayama(&self, tol: &Tol) -> Result<Mat> {
        let b = self.integral_pairing(tol)?;
        let binv = b
            .inverse(self.pivot_tol(tol))
            .map_err(|_| Error::NoIntegral("integral pairing is degenerate".into()))?;
        let nk = binv.mul(&b.transpose());
        if let Some(op) = &self.circ {
            if let Ok(g) = self.compact_gram(tol) {
                if !g.is_self_adjoint(&nk, tol) {
                    return Err(Error::NotSelfAdjoint);
                }
                let lhs = nk.mul(&op.m);
                let rhs = op.m.mul(&nk.conj());
                if !lhs.eq_tol(&rhs, tol.residual * lhs.max_abs().max(1.0)) {
                    return Err(Error::Normalization(
                        "integral asymmetry does not commute with the involution".into(),
                    ));
                }
            }
        }
        Ok(nk)
    }

    /// Modular functional alpha = eps . N.
    pub fn modular_functional(&self, tol: &Tol) -> Result<Vec<Scalar>> {
        let nk = self.nakayama(tol)?;
        let n = self.dim();
        let mut out = linalg::vec_zero(n, self.backend());
        for i in 0..n {
            out[i] = self.co.eps_of(&nk.col(i));
        }
        Ok(out)
    }

    /// alpha^{-1} = alpha . S, the convolution inverse of alpha.
    pub fn modular_functional_inverse(&self, tol: &Tol) -> Result<Vec<Scalar>> {
        let alpha = self.modular_functional(tol)?;
        let n = self.dim();
        let mut out = linalg::vec_zero(n, self.backend());
        for i in 0..n {
            out[i] = self.eval_functional(&alpha, &self.antipode.col(i));
        }
        Ok(out)
    }

    /// The grouplike g with sum x1 phi(x2) = phi(x) g; the unit whenever the
    /// integral is two-sided.
    pub fn distinguished_grouplike(&self, tol: &Tol) -> Result<Vec<Scalar>> {
        let phi = self.normal_integral(tol)?;
        let n = self.dim();
        let backend = self.backend();
        let conv = self.co.conv_right(&phi);
        let scale = linalg::vec_max_abs(&phi).max(1.0);
        let kstar = phi
            .iter()
            .position(|s| !s.is_zero_tol(tol.eq * scale))
            .ok_or_else(|| Error::NoIntegral("zero integral".into()))?;
        let g = linalg::vec_scale(&phi[kstar].inv()?, &conv.col(kstar));
        for k in 0..n {
            let want = linalg::vec_scale(&phi[k], &g);
            if !linalg::vec_eq_tol(&conv.col(k), &want, tol.residual * scale) {
                return Err(Error::Normalization(
                    "distinguished grouplike does not verify".into(),
                ));
            }
        }
        let dg = self.co.apply_delta(&g);
        for x in 0..n {
            for y in 0..n {
                if !dg[x * n + y].eq_tol(&g[x].mul(&g[y]), tol.residual) {
                    return Err(Error::Normalization(
                        "distinguished element is not grouplike".into(),
                    ));
                }
            }
        }
        let _ = backend;
        Ok(g)
    }

    /// Positive antipode: the positive square root of S^2. Verified to
    /// square back and to be an algebra and coalgebra automorphism.
    pub fn positive_antipode(&self, tol: &Tol) -> Result<Mat> {
        let g = self.compact_gram(tol)?;
        let s2 = self.antipode.mul(&self.antipode);
        let splus = positive_sqrt(&s2, &g, tol)?;
        let scale = splus.max_abs().max(1.0);
        if !splus.mul(&splus).eq_tol(&s2, tol.residual * scale) {
            return Err(Error::Normalization("positive antipode does not square back".into()));
        }
        if !self.is_algebra_automorphism(&splus, tol)? || !preserves_delta(&self.co, &splus, tol) {
            return Err(Error::Normalization(
                "positive antipode is not a bialgebra automorphism".into(),
            ));
        }
        Ok(splus)
    }

    /// Positive square root of the Nakayama automorphism; verified to be an
    /// algebra automorphism.
    pub fn modular_sqrt(&self, tol: &Tol) -> Result<Mat> {
        let g = self.compact_gram(tol)?;
        let nk = self.nakayama(tol)?;
        let p = positive_sqrt(&nk, &g, tol)?;
        if !self.is_algebra_automorphism(&p, tol)? {
            return Err(Error::Normalization(
                "modular root is not an algebra automorphism".into(),
            ));
        }
        Ok(p)
    }

    /// Unitary antipode U = S S_+^{-1} P^{-1}; verified G-unitary,
    /// involutive and antimultiplicative.
    pub fn unitary_antipode(&self, tol: &Tol) -> Result<Mat> {
        let g = self.compact_gram(tol)?;
        let splus = self.positive_antipode(tol)?;
        let p = self.modular_sqrt(tol)?;
        let ptol = self.pivot_tol(tol);
        let u = self
            .antipode
            .mul(&splus.inverse(ptol)?)
            .mul(&p.inverse(ptol)?);
        let n = self.dim();
        let id = Mat::identity(n, self.backend());
        let scale = u.max_abs().max(1.0);
        let ustar = g.adjoint(&u, tol)?;
        if !ustar.mul(&u).eq_tol(&id, tol.residual * scale) {
            return Err(Error::Normalization("unitary antipode is not unitary".into()));
        }
        if !u.mul(&u).eq_tol(&id, tol.residual * scale) {
            return Err(Error::Normalization("unitary antipode is not involutive".into()));
        }
        if !self.is_algebra_antimorphism(&u, tol)? {
            return Err(Error::Normalization(
                "unitary antipode is not antimultiplicative".into(),
            ));
        }
        Ok(u)
    }

    /// Adjoint of the antipode: S* = S N^{-1}, verified against the Gram
    /// adjoint of S.
    pub fn antipode_adjoint(&self, tol: &Tol) -> Result<Mat> {
        let g = self.compact_gram(tol)?;
        let nk = self.nakayama(tol)?;
        let sstar = self.antipode.mul(&nk.inverse(self.pivot_tol(tol))?);
        let direct = g.adjoint(&self.antipode, tol)?;
        if !sstar.eq_tol(&direct, tol.residual * sstar.max_abs().max(1.0)) {
            return Err(Error::Normalization(
                "antipode adjoint disagrees with the inner-product adjoint".into(),
            ));
        }
        Ok(sstar)
    }

    /// The normal Fourier form w(x, y) = phi(x S(y)).
    pub fn fourier_form(&self, tol: &Tol) -> Result<FourierForm> {
        let phi = self.normal_integral(tol)?;
        let n = self.dim();
        let mut w = Mat::zeros(n, n, self.backend());
        for a in 0..n {
            for i in 0..n {
                let prod = self.product(&self.basis_vec(a), &self.antipode.col(i));
                w.set(a, i, self.eval_functional(&phi, &prod));
            }
        }
        FourierForm::new(&self.co, w)
    }

    pub fn is_algebra_automorphism(&self, a: &Mat, tol: &Tol) -> Result<bool> {
        let n = self.dim();
        let t = tol.residual * a.max_abs().max(1.0);
        if a.inverse(self.pivot_tol(tol)).is_err() {
            return Ok(false);
        }
        if !linalg::vec_eq_tol(&a.apply(&self.unit), &self.unit, t) {
            return Ok(false);
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = a.apply(&self.product(&self.basis_vec(i), &self.basis_vec(j)));
                let rhs = self.product(&a.col(i), &a.col(j));
                if !linalg::vec_eq_tol(&lhs, &rhs, t) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_algebra_antimorphism(&self, a: &Mat, tol: &Tol) -> Result<bool> {
        let n = self.dim();
        let t = tol.residual * a.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                let lhs = a.apply(&self.product(&self.basis_vec(i), &self.basis_vec(j)));
                let rhs = self.product(&a.col(j), &a.col(i));
                if !linalg::vec_eq_tol(&lhs, &rhs, t) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Full Hopf automorphism check: algebra and coalgebra automorphism.
    pub fn is_hopf_automorphism(&self, a: &Mat, tol: &Tol) -> Result<bool> {
        let n = self.dim();
        let t = tol.residual * a.max_abs().max(1.0);
        if !self.is_algebra_automorphism(a, tol)? {
            return Ok(false);
        }
        for i in 0..n {
            if !self.co.eps_of(&a.col(i)).eq_tol(&self.co.eps()[i], t) {
                return Ok(false);
            }
        }
        Ok(preserves_delta(&self.co, a, tol))
    }
}

/// Compactness outcome with a witness on failure.
#[derive(Debug, Clone)]
pub enum CompactVerdict {
    Compact(Gram),
    NoIntegral(String),
    NotHermitian,
    /// Minimum eigenvalue and its eigenvector when the float view found one.
    NotPositive(Option<(f64, Vec<num::complex::Complex64>)>),
}

impl CompactVerdict {
    pub fn is_compact(&self) -> bool {
        matches!(self, CompactVerdict::Compact(_))
    }

    pub fn describe(&self) -> String {
        match self {
            CompactVerdict::Compact(_) => "compact".to_string(),
            CompactVerdict::NoIntegral(msg) => format!("not compact: {msg}"),
            CompactVerdict::NotHermitian => {
                "not compact: integral form is not hermitian".to_string()
            }
            CompactVerdict::NotPositive(Some((eig, _))) => {
                format!("not compact: integral form has eigenvalue {eig:.3e}")
            }
            CompactVerdict::NotPositive(None) => {
                "not compact: integral form is not positive definite".to_string()
            }
        }
    }
}

pub fn preserves_delta(co: &Coalgebra, a: &Mat, tol: &Tol) -> bool {
    let n = co.dim();
    let t = tol.residual * a.max_abs().max(1.0);
    for k in 0..n {
        let lhs = co.apply_delta(&a.col(k));
        let mut rhs = linalg::vec_zero(n * n, co.backend());
        for (i, j, c) in co.delta(k) {
            let ai = a.col(*i);
            let aj = a.col(*j);
            for (x, ax) in ai.iter().enumerate() {
                if ax.is_zero() {
                    continue;
                }
                for (y, ay) in aj.iter().enumerate() {
                    if ay.is_zero() {
                        continue;
                    }
                    rhs[x * n + y] = rhs[x * n + y].add(&c.mul(ax).mul(ay));
                }
            }
        }
        if !linalg::vec_eq_tol(&lhs, &rhs, t) {
            return false;
        }
    }
    true
}

pub fn reverses_delta(co: &Coalgebra, a: &Mat, tol: &Tol) -> bool {
    let n = co.dim();
    let t = tol.residual * a.max_abs().max(1.0);
    for k in 0..n {
        let lhs = co.apply_delta(&a.col(k));
        let mut rhs = linalg::vec_zero(n * n, co.backend());
        for (i, j, c) in co.delta(k) {
            let ai = a.col(*i);
            let aj = a.col(*j);
            for (x, axj) in aj.iter().enumerate() {
                if axj.is_zero() {
                    continue;
                }
                for (y, ayi) in ai.iter().enumerate() {
                    if ayi.is_zero() {
                        continue;
                    }
                    rhs[x * n + y] = rhs[x * n + y].add(&c.mul(axj).mul(ayi));
                }
            }
        }
        if !linalg::vec_eq_tol(&lhs, &rhs, t) {
            return false;
        }
    }
    true
}

/// One flag per equivalent characterization; the interesting output is
/// whether all flags agree.
#[derive(Debug, Clone)]
pub struct TraceBattery {
    pub flags: Vec<(String, bool)>,
}

impl TraceBattery {
    pub fn consistent(&self) -> bool {
        self.flags.windows(2).all(|w| w[0].1 == w[1].1)
    }

    pub fn all_true(&self) -> bool {
        self.flags.iter().all(|f| f.1)
    }
}

/// Eight equivalent conditions for the antipode of a compact algebra to be
/// involutive.
pub fn involutive_battery(h: &Hopf, tol: &Tol) -> Result<TraceBattery> {
    let n = h.dim();
    let backend = h.backend();
    let id = Mat::identity(n, backend);
    let g = h.compact_gram(tol)?;
    let s = h.antipode().clone();
    let s2 = s.mul(&s);
    let t = tol.eq * s.max_abs().max(1.0);

    let mut flags = Vec::new();
    flags.push(("antipode squares to the identity".to_string(), s2.eq_tol(&id, t)));

    let splus = h.positive_antipode(tol)?;
    flags.push(("positive antipode is the identity".to_string(), splus.eq_tol(&id, t)));

    let u = h.unitary_antipode(tol)?;
    flags.push(("unitary antipode equals the antipode".to_string(), u.eq_tol(&s, t)));

    let mut finite_order = false;
    let mut power = id.clone();
    for _ in 0..(2 * n) {
        power = power.mul(&s);
        if power.eq_tol(&id, t) {
            finite_order = true;
            break;
        }
    }
    flags.push((format!("antipode has finite order at most {}", 2 * n), finite_order));

    let sstar = g.adjoint(&s, tol)?;
    flags.push((
        "antipode is normal for the integral inner product".to_string(),
        sstar.mul(&s).eq_tol(&s.mul(&sstar), t),
    ));
    flags.push((
        "antipode is self-adjoint for the integral inner product".to_string(),
        sstar.eq_tol(&s, t),
    ));

    let b = h.integral_pairing(tol)?;
    flags.push((
        "integral is central".to_string(),
        b.eq_tol(&b.transpose(), tol.eq * b.max_abs().max(1.0)),
    ));

    let nk = h.nakayama(tol)?;
    flags.push(("integral asymmetry is trivial".to_string(), nk.eq_tol(&id, t)));

    Ok(TraceBattery { flags })
}

/// Five equivalent conditions for the modular functional to coincide with
/// the counit. The second is checked against the co-opposite structure,
/// which is the form used in the equivalence proof.
pub fn counit_modular_battery(h: &Hopf, tol: &Tol) -> Result<TraceBattery> {
    let backend = h.backend();
    let ptol = backend_pivot(backend, tol);
    let s = h.antipode().clone();
    let s2inv = s.mul(&s).inverse(ptol)?;
    let nk = h.nakayama(tol)?;
    let t = tol.eq * nk.max_abs().max(1.0);

    let mut flags = Vec::new();

    let sstar = h.antipode_adjoint(tol)?;
    flags.push((
        "antipode adjoint reverses comultiplication".to_string(),
        reverses_delta(&h.co, &sstar, tol),
    ));

    let u = h.unitary_antipode(tol)?;
    flags.push((
        "unitary antipode reverses comultiplication".to_string(),
        reverses_delta(&h.co, &u, tol),
    ));

    flags.push((
        "integral asymmetry is comultiplicative".to_string(),
        preserves_delta(&h.co, &nk, tol),
    ));

    let alpha = h.modular_functional(tol)?;
    let eps = h.co.eps().to_vec();
    flags.push((
        "modular functional equals the counit".to_string(),
        linalg::vec_eq_tol(&alpha, &eps, tol.eq * linalg::vec_max_abs(&alpha).max(1.0)),
    ));

    flags.push((
        "integral asymmetry inverts the antipode square".to_string(),
        nk.eq_tol(&s2inv, t),
    ));

    Ok(TraceBattery { flags })
}

/// Residuals of the structural identities tying the Nakayama automorphism,
/// the modular functional and the antipode powers; each named identity must
/// hold on any compact input.
pub fn modular_identity_checks(h: &Hopf, tol: &Tol) -> Result<Vec<(String, bool)>> {
    let n = h.dim();
    let backend = h.backend();
    let ptol = backend_pivot(backend, tol);
    let nk = h.nakayama(tol)?;
    let s = h.antipode().clone();
    let s2 = s.mul(&s);
    let s2inv = s2.inverse(ptol)?;
    let alpha = h.modular_functional(tol)?;
    let alpha_inv = h.modular_functional_inverse(tol)?;
    let scale = nk.max_abs().max(s2.max_abs()).max(1.0);
    let t = tol.residual * scale;
    let mut out = Vec::new();

    let g = h.distinguished_grouplike(tol)?;
    out.push((
        "distinguished grouplike is the unit".to_string(),
        linalg::vec_eq_tol(&g, h.unit(), t),
    ));

    let twisted = s2inv.mul(&h.co.conv_left(&alpha));
    out.push(("nakayama from the modular functional".to_string(), nk.eq_tol(&twisted, t)));

    let nk_inv = nk.inverse(ptol)?;
    let twisted_inv = s2.mul(&h.co.conv_left(&alpha_inv));
    out.push((
        "inverse nakayama from the inverse functional".to_string(),
        nk_inv.eq_tol(&twisted_inv, t),
    ));

    let mut delta_n_ok = true;
    for k in 0..n {
        let lhs = h.co.apply_delta(&nk.col(k));
        let mut rhs = linalg::vec_zero(n * n, backend);
        for (i, j, c) in h.co.delta(k) {
            let ni = nk.col(*i);
            let sj = s2inv.col(*j);
            for (x, nx) in ni.iter().enumerate() {
                if nx.is_zero() {
                    continue;
                }
                for (y, sy) in sj.iter().enumerate() {
                    if sy.is_zero() {
                        continue;
                    }
                    rhs[x * n + y] = rhs[x * n + y].add(&c.mul(nx).mul(sy));
                }
            }
        }
        if !linalg::vec_eq_tol(&lhs, &rhs, t) {
            delta_n_ok = false;
            break;
        }
    }
    out.push(("comultiplication of the nakayama image".to_string(), delta_n_ok));

    let s4 = s2.mul(&s2);
    let radford = h.co.conv_left(&alpha).mul(&h.co.conv_right(&alpha_inv));
    out.push((
        "fourth antipode power from the modular functional".to_string(),
        s4.eq_tol(&radford, t),
    ));

    let conv = h.co.dual_product(&alpha, &alpha_inv);
    let eps = h.co.eps().to_vec();
    out.push((
        "modular functional convolution-inverts".to_string(),
        linalg::vec_eq_tol(&conv, &eps, t),
    ));

    out.push((
        "integral asymmetry is a hopf automorphism".to_string(),
        h.is_hopf_automorphism(&nk, tol)?,
    ));

    let gram = h.compact_gram(tol)?;
    let sstar = h.antipode_adjoint(tol)?;
    // S S* = id * alpha^{-1}, S* S = alpha * id
    let ss_star = s.mul(&sstar);
    out.push((
        "antipode times adjoint from the inverse functional".to_string(),
        ss_star.eq_tol(&h.co.conv_right(&alpha_inv), t),
    ));
    let sstar_s = sstar.mul(&s);
    out.push((
        "adjoint times antipode from the modular functional".to_string(),
        sstar_s.eq_tol(&h.co.conv_left(&alpha), t),
    ));

    let p = h.modular_sqrt(tol)?;
    out.push(("positive modular root squares back".to_string(), p.mul(&p).eq_tol(&nk, t)));

    let splus = h.positive_antipode(tol)?;
    let u = h.unitary_antipode(tol)?;
    out.push((
        "polar factors reassemble the antipode".to_string(),
        u.mul(&splus).mul(&p).eq_tol(&s, t),
    ));

    // the unitary factor of the right polar decomposition of S equals U
    let (pu, _pp) = linalg::polar_right(&s, &gram, tol)?;
    out.push((
        "unitary antipode agrees with the polar factor".to_string(),
        pu.eq_tol(&u, tol.residual * pu.max_abs().max(1.0)),
    ));

    // sum x1 <x2, y> = sum S^2(y1 deg) <x, y2> on basis pairs
    if let Some(op) = &h.circ {
        let gm = gram.matrix();
        let mut fourier2_ok = true;
        'outer: for k in 0..n {
            for l in 0..n {
                let mut lhs = linalg::vec_zero(n, backend);
                for (i, j, c) in h.co.delta(k) {
                    // <e_j, e_l> = G[l][j]
                    lhs[*i] = lhs[*i].add(&c.mul(gm.get(l, *j)));
                }
                let mut rhs = linalg::vec_zero(n, backend);
                for (a, b, d) in h.co.delta(l) {
                    // S^2((e_a) deg) scaled by <e_k, e_b> = G[b][k]
                    let sa = s2.apply(&op.m.col(*a));
                    let w = d.conj().mul(gm.get(*b, k));
                    for (x, sx) in sa.iter().enumerate() {
                        rhs[x] = rhs[x].add(&w.mul(sx));
                    }
                }
                if !linalg::vec_eq_tol(&lhs, &rhs, t) {
                    fourier2_ok = false;
                    break 'outer;
                }
            }
        }
        out.push(("pairing exchange through the antipode square".to_string(), fourier2_ok));
    }

    Ok(out)
}

/// Inner-automorphism decomposition on a simple coalgebra: writes a
/// coalgebra automorphism T as (tau * id)(id * tau^{-1}) for a functional
/// tau, unique up to scalar, normalized so its first nonzero coordinate
/// is 1. Returns (tau, tau inverse).
pub fn albert_tau(co: &Coalgebra, t_map: &Mat, tol: &Tol) -> Result<(Vec<Scalar>, Vec<Scalar>)> {
    let n = co.dim();
    let backend = co.backend();
    let ptol = backend_pivot(backend, tol);
    // dual of T acts on functionals by f -> f . T, matrix T^t; the dual
    // automorphism is inner: solve (f . T) u = u f for all basis f
    let mut rows = Vec::with_capacity(n * n);
    for m in 0..n {
        for k in 0..n {
            let mut row = linalg::vec_zero(n, backend);
            for (i, j, c) in co.delta(k) {
                // lhs coefficient of u_j: sum_i delta[k](i, j) (T^t e^m)_i
                // with (T^t e^m)_i = T[m][i]
                row[*j] = row[*j].add(&c.mul(t_map.get(m, *i)));
            }
            for (i, j, c) in co.delta(k) {
                if *j == m {
                    row[*i] = row[*i].sub(c);
                }
            }
            rows.push(row);
        }
    }
    let sys = Mat::from_rows(rows)?;
    let ker = sys.kernel(ptol)?;
    if ker.len() != 1 {
        return Err(Error::NotInner(format!(
            "intertwiner space has dimension {}",
            ker.len()
        )));
    }
    let u = &ker[0];
    // normalize: first nonzero coordinate 1
    let scale = linalg::vec_max_abs(u).max(1.0);
    let lead = u
        .iter()
        .position(|s| !s.is_zero_tol(tol.eq * scale))
        .ok_or_else(|| Error::NotInner("zero intertwiner".into()))?;
    let tau = linalg::vec_scale(&u[lead].inv()?, u);
    // invert in the dual algebra: tau . v = eps
    let left = co.dual_left_mult(&tau);
    let eps = co.eps().to_vec();
    let mut eps_mat = Mat::zeros(n, 1, backend);
    for (i, e) in eps.iter().enumerate() {
        eps_mat.set(i, 0, e.clone());
    }
    let v = left
        .solve(&eps_mat, ptol)
        .map_err(|_| Error::NotInner("intertwiner is not invertible in the dual".into()))?;
    let tau_inv: Vec<Scalar> = (0..n).map(|i| v.get(i, 0).clone()).collect();
    // verify the reassembly
    let reassembled = co.conv_left(&tau).mul(&co.conv_right(&tau_inv));
    if !reassembled.eq_tol(t_map, tol.residual * t_map.max_abs().max(1.0)) {
        return Err(Error::NotInner("reassembled automorphism drifts".into()));
    }
    Ok((tau, tau_inv))
}

/// The square-root functional of a compact algebra: beta with
/// S_+ = (beta * id)(id * beta^{-1}), normalized per component so that
/// the convolution operators are positive, beta respects the involution,
/// and beta^4 = alpha. Finite-dimensional compact inputs give the counit.
pub fn compute_beta(h: &Hopf, tol: &Tol, seed: u64) -> Result<Vec<Scalar>> {
    let op = h
        .circ
        .as_ref()
        .ok_or_else(|| Error::BadInput("no involution on this algebra".into()))?;
    let n = h.dim();
    let backend = h.backend();
    let ptol = backend_pivot(backend, tol);
    let g = h.compact_gram(tol)?;
    let splus = h.positive_antipode(tol)?;
    let alpha = h.modular_functional(tol)?;
    let comps = decompose_simple(&h.co, tol, seed)?;
    let parts: Vec<&Mat> = comps.iter().map(|c| &c.basis).collect();
    let all = Mat::hstack(&parts)?;
    let all_inv = all.inverse(ptol)?;

    // tau per component from the restricted positive antipode
    let mut tau_blocks: Vec<Vec<Scalar>> = Vec::new();
    for comp in &comps {
        let sub = component_coalgebra(&h.co, comp, tol)?;
        let s_here = splus.restrict(&comp.basis, ptol, tol.residual * splus.max_abs().max(1.0))?;
        let (tau, _) = albert_tau(&sub, &s_here, tol)?;
        tau_blocks.push(tau);
    }

    // assemble the ambient functional: beta(basis column) = tau coordinate
    let assemble = |blocks: &[Vec<Scalar>]| -> Vec<Scalar> {
        let stacked: Vec<Scalar> = blocks.iter().flatten().cloned().collect();
        let mut out = linalg::vec_zero(n, backend);
        for j in 0..n {
            let mut acc = Scalar::zero(backend);
            for (t, s) in stacked.iter().enumerate() {
                acc = acc.add(&s.mul(all_inv.get(t, j)));
            }
            out[j] = acc;
        }
        out
    };

    // the involution permutes the components; find the partner of each
    let mut partner = vec![usize::MAX; comps.len()];
    for (idx, comp) in comps.iter().enumerate() {
        let image = op.m.mul(&comp.basis.conj());
        for (jdx, cand) in comps.iter().enumerate() {
            if cand
                .basis
                .solve_general(&image, ptol, tol.residual * image.max_abs().max(1.0))
                .is_ok()
            {
                partner[idx] = jdx;
                break;
            }
        }
        if partner[idx] == usize::MAX {
            return Err(Error::Normalization(
                "involution does not permute the components".into(),
            ));
        }
    }
    for idx in 0..comps.len() {
        if partner[partner[idx]] != idx {
            return Err(Error::Normalization(
                "involution orbit structure is inconsistent".into(),
            ));
        }
    }

    // transported twist: x in the partner component has x deg back here, so
    // conj(tau(x deg)) is a functional on the partner component
    let twist_block = |idx: usize, tau: &[Scalar]| -> Vec<Scalar> {
        let target = &comps[partner[idx]];
        let mut ambient = linalg::vec_zero(n, backend);
        // tau as an ambient functional supported on component idx only
        // (other components pair to zero through the inverse basis)
        let mut stack = linalg::vec_zero(all.n_cols(), backend);
        let offset: usize = comps[..idx].iter().map(|c| c.dim()).sum();
        for (t, s) in tau.iter().enumerate() {
            stack[offset + t] = s.clone();
        }
        for j in 0..n {
            let mut acc = Scalar::zero(backend);
            for (t, s) in stack.iter().enumerate() {
                acc = acc.add(&s.mul(all_inv.get(t, j)));
            }
            ambient[j] = acc;
        }
        (0..target.dim())
            .map(|c| {
                let col = target.basis.col(c);
                let mut acc = Scalar::zero(backend);
                for (x, xv) in col.iter().enumerate() {
                    // (e deg) coordinates, then tau, then conjugate
                    let mut img = Scalar::zero(backend);
                    for m in 0..n {
                        img = img.add(&op.m.get(m, x).mul(&ambient[m]));
                    }
                    acc = acc.add(&xv.conj().mul(&img));
                }
                acc.conj()
            })
            .collect()
    };

    // phase-fix: beta(x deg) = conj(beta(x)). Self-paired components fix a
    // phase; two-element orbits copy the twist onto the partner.
    for idx in 0..comps.len() {
        if partner[idx] == idx {
            let here = twist_block(idx, &tau_blocks[idx].clone());
            let tau_here = &tau_blocks[idx];
            let scale = linalg::vec_max_abs(tau_here).max(1.0);
            let lead = tau_here
                .iter()
                .position(|s| !s.is_zero_tol(tol.eq * scale))
                .ok_or_else(|| Error::Normalization("zero component functional".into()))?;
            let c = here[lead].div(&tau_here[lead])?;
            if !linalg::vec_eq_tol(
                &here,
                &linalg::vec_scale(&c, tau_here),
                tol.residual * linalg::vec_max_abs(&here).max(1.0),
            ) {
                return Err(Error::Normalization(
                    "involution twist is not proportional on a component".into(),
                ));
            }
            if !c.eq_tol(&Scalar::one(backend), tol.eq) {
                // theta with theta / conj(theta) = c, i.e. theta^2 = c
                let theta = sqrt_unimodular(&c, tol)?;
                tau_blocks[idx] = tau_blocks[idx].iter().map(|s| theta.mul(s)).collect();
            }
        } else if partner[idx] > idx {
            tau_blocks[partner[idx]] = twist_block(idx, &tau_blocks[idx].clone());
        }
    }

    // sign-fix: (beta * id) restricted to each component must be G-positive;
    // flipping one orbit member flips its twist partner with it
    for idx in 0..comps.len() {
        if partner[idx] < idx {
            continue;
        }
        let comp = &comps[idx];
        let beta_now = assemble(&tau_blocks);
        let conv = h.co.conv_left(&beta_now);
        let conv_here = conv.restrict(&comp.basis, ptol, tol.residual * conv.max_abs().max(1.0))?;
        let g_here = Gram::new(
            comp.basis.dagger().mul(g.matrix()).mul(&comp.basis),
            tol,
        )?;
        match definite_sign(&conv_here, &g_here, tol)? {
            1 => {}
            -1 => {
                tau_blocks[idx] = tau_blocks[idx].iter().map(|s| s.neg()).collect();
                if partner[idx] != idx {
                    let p = partner[idx];
                    tau_blocks[p] = tau_blocks[p].iter().map(|s| s.neg()).collect();
                }
            }
            _ => {
                return Err(Error::Normalization(
                    "convolution operator of the square-root functional is indefinite".into(),
                ))
            }
        }
    }

    // scale-fix: beta^4 = alpha per component through a positive real
    // fourth root
    let beta_now = assemble(&tau_blocks);
    let b2 = h.co.dual_product(&beta_now, &beta_now);
    let b4 = h.co.dual_product(&b2, &b2);
    for (idx, comp) in comps.iter().enumerate() {
        let restrict = |f: &[Scalar]| -> Vec<Scalar> {
            (0..comp.dim())
                .map(|c| {
                    let col = comp.basis.col(c);
                    let mut acc = Scalar::zero(backend);
                    for (x, s) in col.iter().enumerate() {
                        acc = acc.add(&s.mul(&f[x]));
                    }
                    acc
                })
                .collect()
        };
        let b4_here = restrict(&b4);
        let alpha_here = restrict(&alpha);
        let scale = linalg::vec_max_abs(&b4_here).max(1.0);
        let lead = b4_here
            .iter()
            .position(|s| !s.is_zero_tol(tol.eq * scale))
            .ok_or_else(|| Error::Normalization("fourth power vanishes on a component".into()))?;
        let c = alpha_here[lead].div(&b4_here[lead])?;
        if !linalg::vec_eq_tol(
            &alpha_here,
            &linalg::vec_scale(&c, &b4_here),
            tol.residual * linalg::vec_max_abs(&alpha_here).max(1.0),
        ) {
            return Err(Error::Normalization(
                "modular functional is not proportional to the fourth power".into(),
            ));
        }
        let root = positive_real_fourth_root(&c, tol)?;
        tau_blocks[idx] = tau_blocks[idx].iter().map(|s| root.mul(s)).collect();
    }

    let beta = assemble(&tau_blocks);

    // postconditions
    let b2 = h.co.dual_product(&beta, &beta);
    let b4 = h.co.dual_product(&b2, &b2);
    let t = tol.residual * linalg::vec_max_abs(&beta).max(1.0);
    if !linalg::vec_eq_tol(&b4, &alpha, t) {
        return Err(Error::Normalization("fourth power misses the modular functional".into()));
    }
    // beta = beta . S_+
    let beta_splus: Vec<Scalar> = (0..n)
        .map(|i| h.eval_functional(&beta, &splus.col(i)))
        .collect();
    if !linalg::vec_eq_tol(&beta, &beta_splus, t) {
        return Err(Error::Normalization(
            "square-root functional moves under the positive antipode".into(),
        ));
    }
    // multiplicative: beta(xy) = beta(x) beta(y), beta(1) = 1
    if !h.eval_functional(&beta, h.unit()).eq_tol(&Scalar::one(backend), t) {
        return Err(Error::Normalization("square-root functional is not unital".into()));
    }
    for i in 0..n {
        for j in 0..n {
            let prod = h.product(&h.basis_vec(i), &h.basis_vec(j));
            let lhs = h.eval_functional(&beta, &prod);
            let rhs = beta[i].mul(&beta[j]);
            if !lhs.eq_tol(&rhs, t) {
                return Err(Error::Normalization(
                    "square-root functional is not multiplicative".into(),
                ));
            }
        }
    }
    // beta^{-1} = beta . S
    let beta_s: Vec<Scalar> = (0..n)
        .map(|i| h.eval_functional(&beta, &h.antipode().col(i)))
        .collect();
    let conv = h.co.dual_product(&beta, &beta_s);
    if !linalg::vec_eq_tol(&conv, &h.co.eps().to_vec(), t) {
        return Err(Error::Normalization(
            "antipode composite fails to convolution-invert the functional".into(),
        ));
    }
    Ok(beta)
}

/// The coalgebra structure induced on a simple component, in the component
/// basis coordinates.
pub fn component_coalgebra(co: &Coalgebra, comp: &Component, tol: &Tol) -> Result<Coalgebra> {
    let n = co.dim();
    let d = comp.dim();
    let backend = co.backend();
    let ptol = backend_pivot(backend, tol);
    // express Delta(basis col) in basis (x) basis coordinates
    let mut bb = Mat::zeros(n * n, d * d, backend);
    for a in 0..d {
        for b in 0..d {
            for i in 0..n {
                let via = comp.basis.get(i, a);
                if via.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let vjb = comp.basis.get(j, b);
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
        let dv = co.apply_delta(&comp.basis.col(a));
        for (idx, s) in dv.into_iter().enumerate() {
            rhs.set(idx, a, s);
        }
    }
    let coords = bb.solve_general(&rhs, ptol, tol.residual * rhs.max_abs().max(1.0))?;
    let mut triples = Vec::new();
    for k in 0..d {
        for a in 0..d {
            for b in 0..d {
                let c = coords.get(a * d + b, k);
                if !c.is_zero_tol(tol.eq) {
                    triples.push((a, b, k, c.clone()));
                }
            }
        }
    }
    let eps: Vec<Scalar> = (0..d).map(|a| co.eps_of(&comp.basis.col(a))).collect();
    let names = (0..d).map(|a| format!("c{a}")).collect();
    Coalgebra::new(names, triples, eps, tol)
}

/// Sign of a G-self-adjoint definite operator: 1, -1, or 0 when indefinite.
fn definite_sign(a: &Mat, g: &Gram, tol: &Tol) -> Result<i32> {
    if !g.is_self_adjoint(a, tol) {
        return Err(Error::NotSelfAdjoint);
    }
    match a.backend() {
        Backend::FloatC => {
            let eigs = crate::numeric::eigenvalues(&a.to_cmat()?)?;
            let scale = a.max_abs().max(1.0);
            let pos = eigs.iter().all(|e| e.re > tol.eq * scale);
            let neg = eigs.iter().all(|e| e.re < -tol.eq * scale);
            Ok(if pos {
                1
            } else if neg {
                -1
            } else {
                0
            })
        }
        _ => {
            let split = linalg::eigen_split(a, tol)?;
            let mut pos = true;
            let mut neg = true;
            for p in &split.pairs {
                match p.value.as_real_rat() {
                    Some(r) => {
                        if r <= num::traits::Zero::zero() {
                            pos = false;
                        }
                        if r >= num::traits::Zero::zero() {
                            neg = false;
                        }
                    }
                    None => return Err(Error::NotPositive("complex eigenvalue".into())),
                }
            }
            Ok(if pos {
                1
            } else if neg {
                -1
            } else {
                0
            })
        }
    }
}

/// Square root of a unimodular scalar, staying in the backend.
fn sqrt_unimodular(c: &Scalar, tol: &Tol) -> Result<Scalar> {
    match c {
        Scalar::FloatC(z) => {
            if (z.norm() - 1.0).abs() > tol.residual {
                return Err(Error::Normalization("phase is not unimodular".into()));
            }
            Ok(Scalar::FloatC(z.sqrt()))
        }
        _ => {
            let one = Scalar::one(c.backend());
            if c.eq_tol(&one, 0.0) {
                return Ok(one);
            }
            let minus_one = one.neg();
            if c.eq_tol(&minus_one, 0.0) {
                // i squares to -1 and stays in the gaussian field
                if c.backend() == Backend::GaussQ {
                    return Ok(Scalar::gauss_int(0, 1));
                }
            }
            Err(Error::ExactUnrepresentable(format!(
                "no exact square root of the phase {c}; rerun with the float backend"
            )))
        }
    }
}

/// Positive real fourth root of a positive real scalar.
fn positive_real_fourth_root(c: &Scalar, tol: &Tol) -> Result<Scalar> {
    match c {
        Scalar::FloatC(z) => {
            if z.im.abs() > tol.residual || z.re <= 0.0 {
                return Err(Error::NotPositive(format!("{z}")));
            }
            Ok(Scalar::from_f64(z.re.powf(0.25)))
        }
        _ => {
            let r = c
                .as_real_rat()
                .ok_or_else(|| Error::NotPositive(format!("{c}")))?;
            if r <= num::traits::Zero::zero() {
                return Err(Error::NotPositive(format!("{c}")));
            }
            let s = crate::arith::rat_sqrt(&r).and_then(|s| crate::arith::rat_sqrt(&s));
            match s {
                Some(root) => Ok(Scalar::from_rat(root, num::traits::Zero::zero())),
                None => Err(Error::ExactUnrepresentable(format!(
                    "no exact fourth root of {c}; rerun with the float backend"
                ))),
            }
        }
    }
}

/// Result of conjugating one involution into another by a positive operator.
#[derive(Debug, Clone)]
pub struct InvolutionConjugacy {
    /// Q = diamond . circ as a linear map.
    pub q: Mat,
    /// The positive conjugating operator.
    pub p: Mat,
    /// P circ P^{-1} as a conjugate-linear operator matrix.
    pub conjugated: Mat,
    /// Dimensions of the diamond-stable component sums.
    pub stable_dims: Vec<usize>,
    /// Whether the second involution also induces a positive inner product.
    pub diamond_compact: bool,
    /// Max residual of the intertwining identities.
    pub residual: f64,
}

/// Given a compact involution (carried by `h`) and a second involution
/// `diamond` on the same algebra, produces the positive operator P built
/// from the fourth root of Q^2 on each diamond-stable component sum, and
/// checks the exchange identities. When `diamond` is itself compact, P
/// conjugates one involution into the other.
pub fn conjugate_involutions(
    h: &Hopf,
    diamond: &ConjOp,
    tol: &Tol,
    seed: u64,
) -> Result<InvolutionConjugacy> {
    let circ = h
        .circ
        .as_ref()
        .ok_or_else(|| Error::BadInput("no base involution on this algebra".into()))?;
    let ptol = backend_pivot(h.backend(), tol);
    // diamond must satisfy every involution axiom for this algebra
    let h_diamond = Hopf::new(
        h.co.clone(),
        h.mult_triples(),
        h.unit().to_vec(),
        h.antipode().clone(),
        Some(diamond.clone()),
        tol,
    )?;
    let g = h.compact_gram(tol)?;
    let q = diamond.compose_conj(circ);
    if !g.is_self_adjoint(&q, tol) {
        return Err(Error::NotSelfAdjoint);
    }

    // diamond permutes the simple components; sum each orbit
    let comps = decompose_simple(&h.co, tol, seed)?;
    let mut used = vec![false; comps.len()];
    let mut blocks: Vec<Mat> = Vec::new();
    for start in 0..comps.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut orbit = vec![start];
        let mut frontier = vec![start];
        while let Some(cur) = frontier.pop() {
            let image = diamond.m.mul(&comps[cur].basis.conj());
            for (idx, cand) in comps.iter().enumerate() {
                if used[idx] {
                    continue;
                }
                if cand
                    .basis
                    .solve_general(&image, ptol, tol.residual * image.max_abs().max(1.0))
                    .is_ok()
                {
                    used[idx] = true;
                    orbit.push(idx);
                    frontier.push(idx);
                }
            }
        }
        let parts: Vec<&Mat> = orbit.iter().map(|i| &comps[*i].basis).collect();
        blocks.push(Mat::hstack(&parts)?);
    }

    // positive fourth root of Q^2 per stable sum, then one global change of
    // basis: P [B1 B2 ...] = [B1 r1, B2 r2, ...]
    let q2 = q.mul(&q);
    let mut stable_dims = Vec::new();
    let mut lifted_cols: Vec<Vec<Scalar>> = Vec::new();
    for block in &blocks {
        stable_dims.push(block.n_cols());
        let q2_here = q2.restrict(block, ptol, tol.residual * q2.max_abs().max(1.0))?;
        let g_here = Gram::new(block.dagger().mul(g.matrix()).mul(block), tol)?;
        let root = positive_sqrt(&q2_here, &g_here, tol)?;
        let fourth = positive_sqrt(&root, &g_here, tol)?;
        let lifted = block.mul(&fourth);
        for c in 0..lifted.n_cols() {
            lifted_cols.push(lifted.col(c));
        }
    }
    let all_basis = Mat::hstack(&blocks.iter().collect::<Vec<_>>())?;
    let lifted_mat = Mat::from_cols(lifted_cols)?;
    let p = lifted_mat.mul(&all_basis.inverse(ptol)?);

    let pinv = p.inverse(ptol)?;
    let mut residual: f64 = 0.0;
    // P circ = circ P^{-1}: P M = M conj(P)^{-1}
    let lhs1 = p.mul(&circ.m);
    let rhs1 = circ.m.mul(&pinv.conj());
    residual = residual.max(lhs1.sub(&rhs1).max_abs());
    // diamond P = P^{-1} diamond: M_d conj(P) = P^{-1} M_d
    let lhs2 = diamond.m.mul(&p.conj());
    let rhs2 = pinv.mul(&diamond.m);
    residual = residual.max(lhs2.sub(&rhs2).max_abs());
    // P^4 = Q^2
    let p2 = p.mul(&p);
    let p4 = p2.mul(&p2);
    residual = residual.max(p4.sub(&q2).max_abs());

    let conjugated = p.mul(&circ.m).mul(&p.conj().inverse(ptol)?);

    let diamond_compact = h_diamond.is_compact(tol)?;
    if diamond_compact {
        residual = residual.max(p2.sub(&q).max_abs());
        residual = residual.max(conjugated.sub(&diamond.m).max_abs());
    }

    Ok(InvolutionConjugacy { q, p, conjugated, stable_dims, diamond_compact, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::matrix_coalgebra;

    fn one() -> Scalar {
        Scalar::gauss_int(1, 0)
    }

    /// The group algebra of Z/2 built by hand.
    fn z2() -> Hopf {
        let tol = Tol::default();
        let basis = vec!["e".to_string(), "g".to_string()];
        let delta = vec![(0, 0, 0, one()), (1, 1, 1, one())];
        let eps = vec![one(), one()];
        let co = Coalgebra::new(basis, delta, eps, &tol).unwrap();
        let mult = vec![
            (0, 0, 0, one()),
            (0, 1, 1, one()),
            (1, 0, 1, one()),
            (1, 1, 0, one()),
        ];
        let unit = vec![one(), Scalar::gauss_int(0, 0)];
        let s = Mat::identity(2, Backend::GaussQ);
        let circ = ConjOp::identity(2, Backend::GaussQ);
        Hopf::new(co, mult, unit, s, Some(circ), &tol).unwrap()
    }

    #[test]
    fn integral_of_group_algebra_is_delta_at_unit() {
        let tol = Tol::default();
        let h = z2();
        let phi = h.normal_integral(&tol).unwrap();
        assert_eq!(phi[0], one());
        assert!(phi[1].is_zero());
        let via = h.integral_via_decomposition(&tol, 7).unwrap();
        assert!(linalg::vec_eq_tol(&phi, &via, 0.0));
    }

    #[test]
    fn gram_of_group_algebra_is_identity() {
        let tol = Tol::default();
        let h = z2();
        let g = h.gram_matrix(&tol).unwrap();
        assert!(g.eq_tol(&Mat::identity(2, Backend::GaussQ), 0.0));
        assert!(h.is_compact(&tol).unwrap());
    }

    #[test]
    fn perturbed_involution_is_rejected() {
        let tol = Tol::default();
        let h = z2();
        // g deg = -g breaks the counit compatibility
        let mut m = Mat::identity(2, Backend::GaussQ);
        m.set(1, 1, one().neg());
        let res = Hopf::new(
            h.co.clone(),
            h.mult_triples(),
            h.unit().to_vec(),
            h.antipode().clone(),
            Some(ConjOp::new(m)),
            &tol,
        );
        assert!(matches!(res, Err(Error::CircAxiom(_))));
    }

    #[test]
    fn trivial_operator_family_on_z2() {
        let tol = Tol::default();
        let h = z2();
        let id = Mat::identity(2, Backend::GaussQ);
        assert!(h.nakayama(&tol).unwrap().eq_tol(&id, 0.0));
        assert!(h.positive_antipode(&tol).unwrap().eq_tol(&id, 0.0));
        assert!(h.modular_sqrt(&tol).unwrap().eq_tol(&id, 0.0));
        assert!(h.unitary_antipode(&tol).unwrap().eq_tol(h.antipode(), 0.0));
        let alpha = h.modular_functional(&tol).unwrap();
        assert!(linalg::vec_eq_tol(&alpha, &h.co.eps().to_vec(), 0.0));
        let g = h.distinguished_grouplike(&tol).unwrap();
        assert!(linalg::vec_eq_tol(&g, h.unit(), 0.0));
    }

    #[test]
    fn batteries_consistent_on_z2() {
        let tol = Tol::default();
        let h = z2();
        let b1 = involutive_battery(&h, &tol).unwrap();
        assert!(b1.consistent() && b1.all_true());
        let b2 = counit_modular_battery(&h, &tol).unwrap();
        assert!(b2.consistent() && b2.all_true());
        for (name, ok) in modular_identity_checks(&h, &tol).unwrap() {
            assert!(ok, "identity failed: {name}");
        }
    }

    #[test]
    fn albert_tau_on_identity_gives_counit() {
        let tol = Tol::default();
        let mc = matrix_coalgebra(2, Backend::GaussQ, &tol).unwrap();
        let id = Mat::identity(4, Backend::GaussQ);
        let (tau, tau_inv) = albert_tau(&mc.co, &id, &tol).unwrap();
        // eps on the matrix coalgebra is (1, 0, 0, 1); normalized the same
        assert_eq!(tau, mc.co.eps().to_vec());
        assert_eq!(tau_inv, mc.co.eps().to_vec());
    }

    #[test]
    fn albert_tau_diagonal_example() {
        // T(t_ij) = (u_i / u_j) t_ij with u = (1, 2)
        let tol = Tol::default();
        let mc = matrix_coalgebra(2, Backend::GaussQ, &tol).unwrap();
        let u = [Scalar::gauss_int(1, 0), Scalar::gauss_int(2, 0)];
        let mut t = Mat::zeros(4, 4, Backend::GaussQ);
        for i in 0..2 {
            for j in 0..2 {
                t.set(i * 2 + j, i * 2 + j, u[i].div(&u[j]).unwrap());
            }
        }
        let (tau, tau_inv) = albert_tau(&mc.co, &t, &tol).unwrap();
        // tau(t_ij) = delta_ij u_i normalized to first coordinate 1
        assert_eq!(tau[0], one());
        assert!(tau[1].is_zero() && tau[2].is_zero());
        assert_eq!(tau[3], Scalar::gauss_int(2, 0));
        // tau . tau_inv = eps
        let conv = mc.co.dual_product(&tau, &tau_inv);
        assert!(linalg::vec_eq_tol(&conv, &mc.co.eps().to_vec(), 0.0));
        // reassembly is exact
        let re = mc.co.conv_left(&tau).mul(&mc.co.conv_right(&tau_inv));
        assert!(re.eq_tol(&t, 0.0));
    }

    #[test]
    fn beta_on_group_algebra_is_counit() {
        let tol = Tol::default();
        let h = z2();
        let beta = compute_beta(&h, &tol, 13).unwrap();
        assert!(linalg::vec_eq_tol(&beta, &h.co.eps().to_vec(), 0.0));
    }

    #[test]
    fn conjugating_by_the_same_involution_is_trivial() {
        let tol = Tol::default();
        let h = z2();
        let circ = h.circ.clone().unwrap();
        let out = conjugate_involutions(&h, &circ, &tol, 5).unwrap();
        let id = Mat::identity(2, Backend::GaussQ);
        assert!(out.q.eq_tol(&id, 0.0));
        assert!(out.p.eq_tol(&id, 0.0));
        assert!(out.diamond_compact);
        assert!(out.residual == 0.0);
    }
}
