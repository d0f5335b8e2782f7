//! Ready-made algebras: group algebras and function algebras over small
//! finite groups, and Sweedler's four-dimensional algebra as the standard
//! example without a normal integral.

use crate::arith::{Backend, Scalar, Tol};
use crate::coalgebra::Coalgebra;
use crate::error::{Error, Result};
use crate::hopf::Hopf;
use crate::linalg::{ConjOp, Mat};

/// A finite group as a multiplication table over named elements.
#[derive(Debug, Clone)]
pub struct GroupTable {
    names: Vec<String>,
    mul: Vec<Vec<usize>>,
    identity: usize,
    inv: Vec<usize>,
}

impl GroupTable {
    pub fn new(names: Vec<String>, mul: Vec<Vec<usize>>) -> Result<GroupTable> {
        let n = names.len();
        if n == 0 {
            return Err(Error::BadInput("empty group".into()));
        }
        if mul.len() != n || mul.iter().any(|r| r.len() != n) {
            return Err(Error::DimMismatch("multiplication table shape".into()));
        }
        for row in &mul {
            for &v in row {
                if v >= n {
                    return Err(Error::BadInput("table entry out of range".into()));
                }
            }
        }
        let mut identity = None;
        for e in 0..n {
            if (0..n).all(|g| mul[e][g] == g && mul[g][e] == g) {
                identity = Some(e);
                break;
            }
        }
        let identity =
            identity.ok_or_else(|| Error::BadInput("no identity element".into()))?;
        let mut inv = vec![usize::MAX; n];
        for g in 0..n {
            for h in 0..n {
                if mul[g][h] == identity && mul[h][g] == identity {
                    inv[g] = h;
                    break;
                }
            }
            if inv[g] == usize::MAX {
                return Err(Error::BadInput(format!("element {} has no inverse", names[g])));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::BadInput(format!(
                            "associativity fails on ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(GroupTable { names, mul, identity, inv })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }
}

pub fn cyclic(n: usize) -> Result<GroupTable> {
    let names = (0..n)
        .map(|k| match k {
            0 => "e".to_string(),
            1 => "g".to_string(),
            _ => format!("g^{k}"),
        })
        .collect();
    let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    GroupTable::new(names, mul)
}

fn perm_name(p: &[usize]) -> String {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || p[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut cur = p[start];
        while cur != start {
            seen[cur] = true;
            cyc.push(cur);
            cur = p[cur];
        }
        out.push('(');
        for v in cyc {
            out.push_str(&v.to_string());
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // (p q)(x) = p(q(x))
    q.iter().map(|&x| p[x]).collect()
}

/// Closure of a generating set of permutations, as a group table.
fn perm_group(degree: usize, generators: &[Vec<usize>]) -> Result<GroupTable> {
    let id: Vec<usize> = (0..degree).collect();
    let mut elements = vec![id];
    let mut frontier = vec![0usize];
    while let Some(at) = frontier.pop() {
        for gen in generators {
            let next = compose(gen, &elements[at]);
            if !elements.contains(&next) {
                elements.push(next);
                frontier.push(elements.len() - 1);
            }
        }
    }
    elements.sort();
    let id_at = elements
        .iter()
        .position(|p| p.iter().enumerate().all(|(i, &v)| i == v))
        .expect("identity in closure");
    elements.rotate_left(id_at);
    let n = elements.len();
    let names = elements.iter().map(|p| perm_name(p)).collect();
    let mut mul = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in 0..n {
            let prod = compose(&elements[a], &elements[b]);
            mul[a][b] = elements
                .iter()
                .position(|p| *p == prod)
                .ok_or_else(|| Error::BadInput("generators do not close".into()))?;
        }
    }
    GroupTable::new(names, mul)
}

pub fn s3() -> Result<GroupTable> {
    perm_group(3, &[vec![1, 2, 0], vec![1, 0, 2]])
}

pub fn d4() -> Result<GroupTable> {
    // rotation i -> i+1 and the reflection i -> -i of a square
    perm_group(4, &[vec![1, 2, 3, 0], vec![0, 3, 2, 1]])
}

pub fn q8() -> Result<GroupTable> {
    // elements (sign, axis) with axis 0 = 1, 1 = i, 2 = j, 3 = k
    let names: Vec<String> = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let enc = |sign: bool, axis: usize| -> usize {
        if axis == 0 {
            sign as usize
        } else {
            2 * axis + sign as usize
        }
    };
    let dec = |idx: usize| -> (bool, usize) {
        if idx < 2 {
            (idx == 1, 0)
        } else {
            (idx % 2 == 1, idx / 2)
        }
    };
    // axis products: table[a][b] = (extra sign, axis)
    let axis_mul = |a: usize, b: usize| -> (bool, usize) {
        match (a, b) {
            (0, x) => (false, x),
            (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    };
    let n = 8;
    let mut mul = vec![vec![0usize; n]; n];
    for x in 0..n {
        for y in 0..n {
            let (sx, ax) = dec(x);
            let (sy, ay) = dec(y);
            let (extra, az) = axis_mul(ax, ay);
            mul[x][y] = enc(sx ^ sy ^ extra, az);
        }
    }
    GroupTable::new(names, mul)
}

/// The group algebra: grouplike basis, S(g) = g^{-1}, trivial involution.
pub fn group_algebra(group: &GroupTable, backend: Backend, tol: &Tol) -> Result<Hopf> {
    let n = group.order();
    let one = Scalar::one(backend);
    let basis = group.names().to_vec();
    let delta = (0..n).map(|g| (g, g, g, one.clone())).collect();
    let eps = vec![one.clone(); n];
    let co = Coalgebra::new(basis, delta, eps, tol)?;
    let mut mult = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            mult.push((a, b, group.mul(a, b), one.clone()));
        }
    }
    let mut unit = vec![Scalar::zero(backend); n];
    unit[group.identity()] = one.clone();
    let mut s = Mat::zeros(n, n, backend);
    for g in 0..n {
        s.set(group.inv(g), g, one.clone());
    }
    let circ = ConjOp::identity(n, backend);
    Hopf::new(co, mult, unit, s, Some(circ), tol)
}

/// The function algebra: pointwise products of delta functions,
/// Delta(d_g) = sum_{hk=g} d_h (x) d_k, involution d_g -> d_{g^{-1}}.
pub fn function_algebra(group: &GroupTable, backend: Backend, tol: &Tol) -> Result<Hopf> {
    let n = group.order();
    let one = Scalar::one(backend);
    let basis = group.names().iter().map(|g| format!("d_{g}")).collect();
    let mut delta = Vec::with_capacity(n * n);
    for h in 0..n {
        for k in 0..n {
            delta.push((h, k, group.mul(h, k), one.clone()));
        }
    }
    let eps = (0..n)
        .map(|g| if g == group.identity() { one.clone() } else { Scalar::zero(backend) })
        .collect();
    let co = Coalgebra::new(basis, delta, eps, tol)?;
    let mult = (0..n).map(|g| (g, g, g, one.clone())).collect();
    let unit = vec![one.clone(); n];
    let mut s = Mat::zeros(n, n, backend);
    for g in 0..n {
        s.set(group.inv(g), g, one.clone());
    }
    let circ = ConjOp::new(s.clone());
    Hopf::new(co, mult, unit, s, Some(circ), tol)
}

/// Sweedler's four-dimensional algebra on the basis (1, g, x, gx): the
/// smallest algebra whose antipode has order four; it has no normal
/// integral and carries no compatible involution here.
pub fn sweedler(backend: Backend, tol: &Tol) -> Result<Hopf> {
    let one = Scalar::one(backend);
    let m1 = one.neg();
    let basis = vec!["1".to_string(), "g".to_string(), "x".to_string(), "gx".to_string()];
    let delta = vec![
        (0, 0, 0, one.clone()),
        (1, 1, 1, one.clone()),
        (2, 0, 2, one.clone()),
        (1, 2, 2, one.clone()),
        (3, 1, 3, one.clone()),
        (0, 3, 3, one.clone()),
    ];
    let eps = vec![one.clone(), one.clone(), Scalar::zero(backend), Scalar::zero(backend)];
    let co = Coalgebra::new(basis, delta, eps, tol)?;
    let mut mult = Vec::new();
    for i in 0..4 {
        mult.push((0, i, i, one.clone()));
        if i != 0 {
            mult.push((i, 0, i, one.clone()));
        }
    }
    mult.push((1, 1, 0, one.clone()));
    mult.push((1, 2, 3, one.clone()));
    mult.push((2, 1, 3, m1.clone()));
    mult.push((1, 3, 2, one.clone()));
    mult.push((3, 1, 2, m1.clone()));
    let unit = {
        let mut u = vec![Scalar::zero(backend); 4];
        u[0] = one.clone();
        u
    };
    let mut s = Mat::zeros(4, 4, backend);
    s.set(0, 0, one.clone());
    s.set(1, 1, one.clone());
    s.set(3, 2, m1.clone());
    s.set(2, 3, one.clone());
    Hopf::new(co, mult, unit, s, None, tol)
}

/// The six standard groups by short name.
pub fn group_by_name(name: &str) -> Result<GroupTable> {
    match name {
        "z2" => cyclic(2),
        "z3" => cyclic(3),
        "z4" => cyclic(4),
        "s3" => s3(),
        "d4" => d4(),
        "q8" => q8(),
        _ => Err(Error::BadInput(format!("unknown group {name}"))),
    }
}

pub const STANDARD_GROUPS: [&str; 6] = ["z2", "z3", "z4", "s3", "d4", "q8"];

/// The twelve standard examples: group and function algebras over the six
/// standard groups.
pub fn standard_examples(backend: Backend, tol: &Tol) -> Result<Vec<(String, Hopf)>> {
    let mut out = Vec::new();
    for name in STANDARD_GROUPS {
        let g = group_by_name(name)?;
        out.push((format!("group-{name}"), group_algebra(&g, backend, tol)?));
        out.push((format!("functions-{name}"), function_algebra(&g, backend, tol)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{
        compute_beta, conjugate_involutions, counit_modular_battery, involutive_battery,
        modular_identity_checks,
    };
    use crate::linalg::{self, Gram};

    #[test]
    fn group_tables_validate() {
        assert_eq!(cyclic(4).unwrap().order(), 4);
        assert_eq!(s3().unwrap().order(), 6);
        assert_eq!(d4().unwrap().order(), 8);
        assert_eq!(q8().unwrap().order(), 8);
    }

    #[test]
    fn s3_is_nonabelian_d4_and_q8_too() {
        for g in [s3().unwrap(), d4().unwrap(), q8().unwrap()] {
            let mut abelian = true;
            for a in 0..g.order() {
                for b in 0..g.order() {
                    if g.mul(a, b) != g.mul(b, a) {
                        abelian = false;
                    }
                }
            }
            assert!(!abelian);
        }
    }

    #[test]
    fn q8_has_one_element_of_order_two() {
        let g = q8().unwrap();
        let count = (0..8)
            .filter(|&x| x != g.identity() && g.mul(x, x) == g.identity())
            .count();
        assert_eq!(count, 1);
    }

    #[test]
    fn broken_table_is_rejected() {
        // swap one entry of the cyclic table
        let names = vec!["e".to_string(), "g".to_string(), "h".to_string()];
        let mul = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]];
        assert!(GroupTable::new(names, mul).is_err());
    }

    #[test]
    fn all_twelve_examples_validate_exactly() {
        let tol = Tol::default();
        let all = standard_examples(Backend::GaussQ, &tol).unwrap();
        assert_eq!(all.len(), 12);
        for (name, h) in &all {
            assert_eq!(h.dim() > 0, true, "{name}");
        }
    }

    #[test]
    fn gram_matrices_take_their_closed_forms() {
        let tol = Tol::default();
        for name in STANDARD_GROUPS {
            let g = group_by_name(name).unwrap();
            let n = g.order();

            let ha = group_algebra(&g, Backend::GaussQ, &tol).unwrap();
            let gram = ha.gram_matrix(&tol).unwrap();
            assert!(gram.eq_tol(&Mat::identity(n, Backend::GaussQ), 0.0), "group-{name}");

            let hf = function_algebra(&g, Backend::GaussQ, &tol).unwrap();
            let gram = hf.gram_matrix(&tol).unwrap();
            let scaled = Mat::identity(n, Backend::GaussQ)
                .scale(&Scalar::ratio(1, n as i64));
            assert!(gram.eq_tol(&scaled, 0.0), "functions-{name}");
        }
    }

    #[test]
    fn integrals_take_their_closed_forms() {
        let tol = Tol::default();
        let g = s3().unwrap();
        let ha = group_algebra(&g, Backend::GaussQ, &tol).unwrap();
        let phi = ha.normal_integral(&tol).unwrap();
        for (k, v) in phi.iter().enumerate() {
            if k == g.identity() {
                assert_eq!(*v, Scalar::one(Backend::GaussQ));
            } else {
                assert!(v.is_zero());
            }
        }
        let hf = function_algebra(&g, Backend::GaussQ, &tol).unwrap();
        let phi = hf.normal_integral(&tol).unwrap();
        for v in &phi {
            assert_eq!(*v, Scalar::ratio(1, 6));
        }
    }

    #[test]
    fn sweedler_has_no_normal_integral() {
        let tol = Tol::default();
        let h = sweedler(Backend::GaussQ, &tol).unwrap();
        let err = h.normal_integral(&tol).unwrap_err();
        match err {
            Error::NoIntegral(msg) => assert!(msg.contains("no normal integral")),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn sweedler_antipode_has_order_four() {
        let tol = Tol::default();
        let h = sweedler(Backend::GaussQ, &tol).unwrap();
        let s = h.antipode();
        let s2 = s.mul(s);
        let id = Mat::identity(4, Backend::GaussQ);
        assert!(!s2.eq_tol(&id, 0.0));
        assert!(s2.mul(&s2).eq_tol(&id, 0.0));
    }

    #[test]
    fn all_twelve_examples_are_compact() {
        let tol = Tol::default();
        for (name, h) in standard_examples(Backend::GaussQ, &tol).unwrap() {
            assert!(h.is_compact(&tol).unwrap(), "{name}");
        }
    }

    #[test]
    fn batteries_are_consistent_and_true_on_nonabelian_examples() {
        let tol = Tol::default();
        for name in ["s3", "q8"] {
            let g = group_by_name(name).unwrap();
            for h in [
                group_algebra(&g, Backend::GaussQ, &tol).unwrap(),
                function_algebra(&g, Backend::GaussQ, &tol).unwrap(),
            ] {
                let b1 = involutive_battery(&h, &tol).unwrap();
                assert!(b1.consistent() && b1.all_true(), "{name}: {:?}", b1.flags);
                let b2 = counit_modular_battery(&h, &tol).unwrap();
                assert!(b2.consistent() && b2.all_true(), "{name}: {:?}", b2.flags);
            }
        }
    }

    #[test]
    fn modular_identities_hold_on_function_algebra_of_s3() {
        let tol = Tol::default();
        let g = s3().unwrap();
        let h = function_algebra(&g, Backend::GaussQ, &tol).unwrap();
        for (name, ok) in modular_identity_checks(&h, &tol).unwrap() {
            assert!(ok, "identity failed: {name}");
        }
    }

    #[test]
    fn beta_is_the_counit_on_exact_examples() {
        let tol = Tol::default();
        // dual centers with rational characters keep this exact
        for (label, h) in [
            ("group-z4", group_algebra(&cyclic(4).unwrap(), Backend::GaussQ, &tol).unwrap()),
            ("functions-s3", function_algebra(&s3().unwrap(), Backend::GaussQ, &tol).unwrap()),
            ("functions-q8", function_algebra(&q8().unwrap(), Backend::GaussQ, &tol).unwrap()),
        ] {
            let beta = compute_beta(&h, &tol, 23).unwrap();
            assert!(
                linalg::vec_eq_tol(&beta, &h.co.eps().to_vec(), 0.0),
                "{label}"
            );
        }
    }

    #[test]
    fn beta_needs_floats_on_the_z3_function_algebra() {
        let tol = Tol::default();
        let g = cyclic(3).unwrap();
        let exact = function_algebra(&g, Backend::GaussQ, &tol).unwrap();
        assert!(matches!(
            compute_beta(&exact, &tol, 23),
            Err(Error::ExactUnrepresentable(_))
        ));
        let float = function_algebra(&g, Backend::FloatC, &tol).unwrap();
        let beta = compute_beta(&float, &tol, 23).unwrap();
        assert!(linalg::vec_eq_tol(&beta, &float.co.eps().to_vec(), tol.residual));
    }

    #[test]
    fn inversion_involution_on_z4_is_not_compact_but_conjugates() {
        let tol = Tol::default();
        let g = cyclic(4).unwrap();
        let h = group_algebra(&g, Backend::GaussQ, &tol).unwrap();
        let n = 4;
        let mut m = Mat::zeros(n, n, Backend::GaussQ);
        for a in 0..n {
            m.set(g.inv(a), a, Scalar::one(Backend::GaussQ));
        }
        let diamond = ConjOp::new(m.clone());
        let out = conjugate_involutions(&h, &diamond, &tol, 17).unwrap();
        assert!(out.q.eq_tol(&m, 0.0));
        let mut dims = out.stable_dims.clone();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
        assert!(out.p.eq_tol(&Mat::identity(n, Backend::GaussQ), 0.0));
        assert!(!out.diamond_compact);
        assert!(out.residual <= tol.residual);
    }

    #[test]
    fn function_algebra_involution_verifies_gram_positivity_bound() {
        let tol = Tol::default();
        for name in STANDARD_GROUPS {
            let g = group_by_name(name).unwrap();
            let n = g.order() as f64;
            let h = function_algebra(&g, Backend::FloatC, &tol).unwrap();
            let gram = Gram::new(h.gram_matrix(&tol).unwrap(), &tol).unwrap();
            let min = gram.min_eigenvalue().unwrap();
            assert!(min >= 1.0 / n - 1e-9, "{name}: {min}");
        }
    }
}
