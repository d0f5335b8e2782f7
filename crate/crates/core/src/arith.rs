//! Scalar arithmetic over the three coefficient backends.
//!
//! `GaussQ` is the exact field Q(i), `Laurent` is the exact ring of Laurent
//! polynomials in a formal positive parameter `s` with rational coefficients,
//! and `FloatC` is complex f64 with tolerance-based comparisons. Backends
//! never coerce into each other; containers reject mixed input at
//! construction time and the binary operations panic on a mismatch, which
//! only ever indicates a bug in calling code.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rat = BigRational;

/// Tag identifying which coefficient arithmetic a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    GaussQ,
    Laurent,
    FloatC,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::GaussQ => write!(f, "gaussq"),
            Backend::Laurent => write!(f, "laurent"),
            Backend::FloatC => write!(f, "float"),
        }
    }
}

/// Comparison tolerances for the float backend.
///
/// `eq` is entrywise equality slack, `residual` bounds norms of whole
/// defect tensors. Exact backends ignore both.
#[derive(Debug, Clone, Copy)]
pub struct Tol {
    pub eq: f64,
    pub residual: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { eq: 1e-9, residual: 1e-8 }
    }
}

impl Tol {
    pub fn new(eq: f64) -> Self {
        Tol { eq, residual: eq.max(1e-8) }
    }
}

/// Laurent polynomial in `s` with rational coefficients, kept normalized
/// (no explicit zero coefficients).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Laurent {
    terms: BTreeMap<i64, Rat>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Laurent::monomial(0, Rat::one())
    }

    pub fn monomial(exp: i64, coeff: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Laurent { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(it: I) -> Self {
        let mut p = Laurent::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exp: i64, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Laurent {
        if c.is_zero() {
            return Laurent::zero();
        }
        Laurent { terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect() }
    }

    /// Returns `(exp, coeff)` when the polynomial is a single term.
    pub fn as_monomial(&self) -> Option<(i64, &Rat)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((*e, c))
        } else {
            None
        }
    }

    /// Inverse of a monomial; anything else is not invertible here.
    pub fn inv(&self) -> Result<Laurent, Error> {
        match self.as_monomial() {
            Some((e, c)) => Ok(Laurent::monomial(-e, c.recip())),
            None if self.is_zero() => Err(Error::DivisionByZero),
            None => Err(Error::NonMonomialInverse(self.to_string())),
        }
    }

    pub fn pow(&self, n: u32) -> Laurent {
        let mut out = Laurent::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*s", c)?,
                _ => write!(f, "{}*s^{}", c, e)?,
            }
        }
        Ok(())
    }
}

/// A number in one of the three backends.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    GaussQ { re: Rat, im: Rat },
    Laurent(Laurent),
    FloatC(Complex64),
}

/// mu = sign * s^2 in the Laurent backend, so |mu|^(1/2) = s exactly.
pub fn laurent_mu(sign: i32) -> Scalar {
    assert!(sign == 1 || sign == -1, "mu sign must be +1 or -1");
    Scalar::Laurent(Laurent::monomial(2, Rat::from_integer(BigInt::from(sign))))
}

/// Backend-aware conjugation: entrywise on GaussQ/FloatC, identity on
/// Laurent because s is a formal positive real.
pub fn scalar_conj(x: &Scalar) -> Scalar {
    x.conj()
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::GaussQ { .. } => Backend::GaussQ,
            Scalar::Laurent(_) => Backend::Laurent,
            Scalar::FloatC(_) => Backend::FloatC,
        }
    }

    pub fn zero(b: Backend) -> Scalar {
        match b {
            Backend::GaussQ => Scalar::GaussQ { re: Rat::zero(), im: Rat::zero() },
            Backend::Laurent => Scalar::Laurent(Laurent::zero()),
            Backend::FloatC => Scalar::FloatC(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(b: Backend) -> Scalar {
        match b {
            Backend::GaussQ => Scalar::GaussQ { re: Rat::one(), im: Rat::zero() },
            Backend::Laurent => Scalar::Laurent(Laurent::one()),
            Backend::FloatC => Scalar::FloatC(Complex64::new(1.0, 0.0)),
        }
    }

    /// Gaussian rational from an integer pair (re, im).
    pub fn gauss_int(re: i64, im: i64) -> Scalar {
        Scalar::GaussQ {
            re: Rat::from_integer(BigInt::from(re)),
            im: Rat::from_integer(BigInt::from(im)),
        }
    }

    /// Gaussian rational re = p/q, im = 0.
    pub fn ratio(p: i64, q: i64) -> Scalar {
        Scalar::GaussQ {
            re: Rat::new(BigInt::from(p), BigInt::from(q)),
            im: Rat::zero(),
        }
    }

    pub fn from_rat(re: Rat, im: Rat) -> Scalar {
        Scalar::GaussQ { re, im }
    }

    pub fn from_c64(z: Complex64) -> Scalar {
        Scalar::FloatC(z)
    }

    pub fn from_f64(x: f64) -> Scalar {
        Scalar::FloatC(Complex64::new(x, 0.0))
    }

    pub fn int(b: Backend, n: i64) -> Scalar {
        match b {
            Backend::GaussQ => Scalar::gauss_int(n, 0),
            Backend::Laurent => {
                Scalar::Laurent(Laurent::monomial(0, Rat::from_integer(BigInt::from(n))))
            }
            Backend::FloatC => Scalar::FloatC(Complex64::new(n as f64, 0.0)),
        }
    }

    fn mismatch(&self, other: &Scalar, op: &str) -> ! {
        panic!(
            "backend mismatch in scalar {}: {} vs {}",
            op,
            self.backend(),
            other.backend()
        )
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::GaussQ { re: a, im: b }, Scalar::GaussQ { re: c, im: d }) => {
                Scalar::GaussQ { re: a + c, im: b + d }
            }
            (Scalar::Laurent(p), Scalar::Laurent(q)) => Scalar::Laurent(p.add(q)),
            (Scalar::FloatC(x), Scalar::FloatC(y)) => Scalar::FloatC(x + y),
            _ => self.mismatch(other, "add"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::GaussQ { re, im } => Scalar::GaussQ { re: -re.clone(), im: -im.clone() },
            Scalar::Laurent(p) => Scalar::Laurent(p.neg()),
            Scalar::FloatC(z) => Scalar::FloatC(-z),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::GaussQ { re: a, im: b }, Scalar::GaussQ { re: c, im: d }) => Scalar::GaussQ {
                re: a * c - b * d,
                im: a * d + b * c,
            },
            (Scalar::Laurent(p), Scalar::Laurent(q)) => Scalar::Laurent(p.mul(q)),
            (Scalar::FloatC(x), Scalar::FloatC(y)) => Scalar::FloatC(x * y),
            _ => self.mismatch(other, "mul"),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::GaussQ { re, im } => Scalar::GaussQ { re: re.clone(), im: -im.clone() },
            Scalar::Laurent(p) => Scalar::Laurent(p.clone()),
            Scalar::FloatC(z) => Scalar::FloatC(z.conj()),
        }
    }

    pub fn inv(&self) -> Result<Scalar, Error> {
        match self {
            Scalar::GaussQ { re, im } => {
                let n = re * re + im * im;
                if n.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Scalar::GaussQ { re: re / &n, im: -im / &n })
            }
            Scalar::Laurent(p) => Ok(Scalar::Laurent(p.inv()?)),
            Scalar::FloatC(z) => {
                if z.norm() == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                Ok(Scalar::FloatC(z.inv()))
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, Error> {
        Ok(self.mul(&other.inv()?))
    }

    /// Structural zero test; FloatC compares against exact 0.0.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::GaussQ { re, im } => re.is_zero() && im.is_zero(),
            Scalar::Laurent(p) => p.is_zero(),
            Scalar::FloatC(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    /// Zero test with slack: exact backends ignore the tolerance.
    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::FloatC(z) => z.norm() <= tol,
            _ => self.is_zero(),
        }
    }

    pub fn eq_tol(&self, other: &Scalar, tol: f64) -> bool {
        if self.backend() != other.backend() {
            return false;
        }
        self.sub(other).is_zero_tol(tol)
    }

    /// Coarse magnitude used for pivoting and residual reporting. For the
    /// Laurent backend this is the sum of coefficient magnitudes, which is
    /// zero exactly when the polynomial is zero.
    pub fn abs_f64(&self) -> f64 {
        match self {
            Scalar::GaussQ { re, im } => {
                let r = re.to_f64().unwrap_or(f64::MAX);
                let i = im.to_f64().unwrap_or(f64::MAX);
                (r * r + i * i).sqrt()
            }
            Scalar::Laurent(p) => p
                .terms
                .values()
                .map(|c| c.abs().to_f64().unwrap_or(f64::MAX))
                .sum(),
            Scalar::FloatC(z) => z.norm(),
        }
    }

    /// Numeric view; exact rationals convert, Laurent refuses.
    pub fn to_c64(&self) -> Result<Complex64, Error> {
        match self {
            Scalar::GaussQ { re, im } => Ok(Complex64::new(
                re.to_f64().ok_or(Error::NotRepresentable)?,
                im.to_f64().ok_or(Error::NotRepresentable)?,
            )),
            Scalar::Laurent(_) => Err(Error::NotRepresentable),
            Scalar::FloatC(z) => Ok(*z),
        }
    }

    /// Re-expresses the value in the float backend when possible.
    pub fn to_float_backend(&self) -> Result<Scalar, Error> {
        Ok(Scalar::FloatC(self.to_c64()?))
    }

    /// Real part as an exact rational, when the value is GaussQ and real.
    pub fn as_real_rat(&self) -> Option<Rat> {
        match self {
            Scalar::GaussQ { re, im } if im.is_zero() => Some(re.clone()),
            _ => None,
        }
    }

    pub fn as_laurent(&self) -> Option<&Laurent> {
        match self {
            Scalar::Laurent(p) => Some(p),
            _ => None,
        }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut out = Scalar::one(self.backend());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::GaussQ { re, im } => {
                if im.is_zero() {
                    write!(f, "{}", re)
                } else if re.is_zero() {
                    write!(f, "{}i", im)
                } else {
                    write!(f, "{} + {}i", re, im)
                }
            }
            Scalar::Laurent(p) => write!(f, "{}", p),
            Scalar::FloatC(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

/// Exact rational square root, if one exists.
pub fn rat_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    if &(&ns * &ns) == x.numer() && &(&ds * &ds) == x.denom() {
        Some(Rat::new(ns, ds))
    } else {
        None
    }
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fraction convergents / semiconvergents).
pub fn rationalize(x: f64, max_den: u64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rat::zero());
    }
    let neg = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::from(0), BigInt::from(1), BigInt::from(1), BigInt::from(0));
    let bound = BigInt::from(max_den);
    for _ in 0..64 {
        let a = x.floor();
        if a > 9e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > bound {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    if q1.is_zero() {
        return None;
    }
    let r = Rat::new(p1, q1);
    Some(if neg { -r } else { r })
}

/// Rationalizes a complex float to a Gaussian rational scalar, requiring the
/// approximation to land within `tol` of the input.
pub fn rationalize_c64(z: Complex64, max_den: u64, tol: f64) -> Option<Scalar> {
    let re = rationalize(z.re, max_den)?;
    let im = rationalize(z.im, max_den)?;
    let back = Complex64::new(re.to_f64()?, im.to_f64()?);
    if (back - z).norm() <= tol {
        Some(Scalar::GaussQ { re, im })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, q_: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q_))
    }

    #[test]
    fn mu_is_signed_s_squared() {
        let plus = laurent_mu(1);
        let minus = laurent_mu(-1);
        assert_eq!(plus, Scalar::Laurent(Laurent::monomial(2, q(1, 1))));
        assert_eq!(minus, Scalar::Laurent(Laurent::monomial(2, q(-1, 1))));
        // (-s^2)^2 = s^4
        assert_eq!(
            minus.mul(&minus),
            Scalar::Laurent(Laurent::monomial(4, q(1, 1)))
        );
    }

    #[test]
    fn conj_per_backend() {
        let g = Scalar::from_rat(q(1, 2), q(-1, 3));
        assert_eq!(scalar_conj(&g), Scalar::from_rat(q(1, 2), q(1, 3)));
        let l = Scalar::Laurent(Laurent::from_terms([(-1, q(2, 1)), (3, q(-5, 7))]));
        assert_eq!(scalar_conj(&l), l);
        let f = Scalar::FloatC(Complex64::new(1.5, -2.5));
        assert_eq!(scalar_conj(&f), Scalar::FloatC(Complex64::new(1.5, 2.5)));
    }

    #[test]
    #[should_panic(expected = "backend mismatch")]
    fn no_cross_backend_arithmetic() {
        let _ = Scalar::gauss_int(1, 0).add(&Scalar::from_f64(1.0));
    }

    #[test]
    fn laurent_monomial_inverse_round_trips() {
        let m = Laurent::monomial(-3, q(2, 5));
        let inv = m.inv().unwrap();
        assert_eq!(m.mul(&inv), Laurent::one());
        let p = Laurent::from_terms([(0, q(1, 1)), (2, q(1, 1))]);
        assert!(matches!(p.inv(), Err(Error::NonMonomialInverse(_))));
    }

    #[test]
    fn gaussq_inverse() {
        // 1/(1+2i) = (1-2i)/5
        let z = Scalar::gauss_int(1, 2);
        assert_eq!(z.inv().unwrap(), Scalar::from_rat(q(1, 5), q(-2, 5)));
        assert!(Scalar::gauss_int(0, 0).inv().is_err());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(rat_sqrt(&q(4, 9)), Some(q(2, 3)));
        assert_eq!(rat_sqrt(&q(2, 1)), None);
        assert_eq!(rat_sqrt(&q(-4, 1)), None);
        assert_eq!(rat_sqrt(&q(0, 1)), Some(q(0, 1)));
    }

    #[test]
    fn rationalize_small_denominators() {
        assert_eq!(rationalize(0.5, 1000), Some(q(1, 2)));
        assert_eq!(rationalize(-1.0 / 3.0, 1000), Some(q(-1, 3)));
        assert_eq!(rationalize(0.0, 10), Some(q(0, 1)));
        let r = rationalize(1.0 / 6.0 + 1e-14, 1_000_000).unwrap();
        assert_eq!(r, q(1, 6));
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-40i64..40, 1i64..12).prop_map(|(p, q_)| q(p, q_))
    }

    fn arb_gauss() -> impl Strategy<Value = Scalar> {
        (arb_rat(), arb_rat()).prop_map(|(re, im)| Scalar::GaussQ { re, im })
    }

    fn arb_laurent() -> impl Strategy<Value = Scalar> {
        proptest::collection::vec((-4i64..5, arb_rat()), 0..4)
            .prop_map(|ts| Scalar::Laurent(Laurent::from_terms(ts)))
    }

    proptest! {
        #[test]
        fn gaussq_field_axioms(a in arb_gauss(), b in arb_gauss(), c in arb_gauss()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&a.neg()), Scalar::zero(Backend::GaussQ));
            if !a.is_zero() {
                prop_assert_eq!(a.mul(&a.inv().unwrap()), Scalar::one(Backend::GaussQ));
            }
            // conjugation is a ring involution
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        }

        #[test]
        fn laurent_ring_axioms(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&a.neg()), Scalar::zero(Backend::Laurent));
            prop_assert_eq!(a.mul(&Scalar::one(Backend::Laurent)), a.clone());
        }
    }
}
