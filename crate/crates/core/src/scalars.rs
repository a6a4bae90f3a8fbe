//! Exact arithmetic in the cyclotomic field Q(ζ) with ζ a primitive 24th root
//! of unity.
//!
//! An element is stored by its eight rational coordinates in the power basis
//! `1, ζ, …, ζ⁷`, reduced modulo the 24th cyclotomic polynomial
//! `x⁸ − x⁴ + 1`. The field contains every constant the constructions need:
//! `ω = ζ⁸`, `i = ζ⁶`, `√2 = ζ³ + ζ⁻³` and `√3 = ζ² + ζ⁻²`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Degree of Q(ζ₂₄) over Q.
pub const DEGREE: usize = 8;

/// Units of Z/24, i.e. the exponents of the Galois automorphisms ζ ↦ ζᵏ.
const GALOIS_EXPONENTS: [usize; 8] = [1, 5, 7, 11, 13, 17, 19, 23];

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    coeffs: [Rational; DEGREE],
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::from_rational(Rational::from_int(v))
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut s = Scalar::zero();
        s.coeffs[0] = r;
        s
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Scalar::from_rational(Rational::new(numer, denom))
    }

    /// Builds an element from its power-basis coordinates.
    pub fn from_coeffs(coeffs: [Rational; DEGREE]) -> Self {
        Scalar { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational; DEGREE] {
        &self.coeffs
    }

    /// ζᵏ for any integer k.
    pub fn zeta_power(k: i64) -> Self {
        let e = k.rem_euclid(24) as usize;
        let mut c: [Rational; 2 * DEGREE - 1] = Default::default();
        c[e % 12] = Rational::one();
        // ζ¹² = −1
        if e >= 12 {
            c[e - 12] = -Rational::one();
        }
        reduce(c)
    }

    /// ω = e^{2πi/3}.
    pub fn omega() -> Self {
        Scalar::zeta_power(8)
    }

    pub fn sqrt2() -> Self {
        Scalar::zeta_power(3) + Scalar::zeta_power(21)
    }

    pub fn sqrt3() -> Self {
        Scalar::zeta_power(2) + Scalar::zeta_power(22)
    }

    pub fn imag_unit() -> Self {
        Scalar::zeta_power(6)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Rational::is_zero)
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Rational::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            if !c.is_zero() {
                *c = &*c * r;
            }
        }
        out
    }

    /// `self += sign · x` for `sign ∈ {−1, 0, 1}`; avoids a multiplication.
    pub fn add_signed(&mut self, x: &Scalar, sign: i8) {
        match sign {
            0 => {}
            s if s > 0 => *self += x,
            _ => *self -= x,
        }
    }

    /// `self += a · b`.
    pub fn add_product(&mut self, a: &Scalar, b: &Scalar) {
        if let Some(r) = a.as_rational() {
            for (acc, y) in self.coeffs.iter_mut().zip(b.coeffs.iter()) {
                acc.add_product(r, y);
            }
            return;
        }
        *self += &(a * b);
    }

    /// Applies the Galois automorphism ζ ↦ ζᵏ (k a unit mod 24).
    pub fn galois(&self, k: usize) -> Self {
        debug_assert!(GALOIS_EXPONENTS.contains(&(k % 24)));
        let mut out = Scalar::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.add_product(
                    &Scalar::from_rational(c.clone()),
                    &Scalar::zeta_power((i * k) as i64),
                );
            }
        }
        out
    }

    /// Field norm down to Q: the product of all eight Galois conjugates.
    pub fn norm(&self) -> Rational {
        let mut acc = self.clone();
        for &k in &GALOIS_EXPONENTS[1..] {
            acc = &acc * &self.galois(k);
        }
        acc.as_rational()
            .cloned()
            .expect("the norm of a cyclotomic integer combination is rational")
    }

    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Scalar::from_rational(r.recip().expect("nonzero")));
        }
        // a⁻¹ = (∏_{k≠1} σ_k(a)) / N(a)
        let mut cofactor = Scalar::one();
        for &k in &GALOIS_EXPONENTS[1..] {
            cofactor = &cofactor * &self.galois(k);
        }
        let norm = (&cofactor * self)
            .as_rational()
            .cloned()
            .expect("the norm of a cyclotomic integer combination is rational");
        Ok(cofactor.scale_rational(&norm.recip().expect("nonzero norm")))
    }

    pub fn div(&self, other: &Scalar) -> Result<Self, ScalarError> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Scalar::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Evaluates the element in C at ζ = e^{iπ/12}.
    pub fn embed(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                Complex64::from_polar(1.0, std::f64::consts::PI * i as f64 / 12.0) * c.to_f64()
            })
            .sum()
    }

    /// A random element with small rational coordinates; roughly a quarter
    /// of the coordinates are left zero so sparse paths get exercised too.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut s = Scalar::zero();
        for c in s.coeffs.iter_mut() {
            if rng.gen_bool(0.75) {
                *c = Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=6));
            }
        }
        s
    }
}

/// Folds a degree ≤ 14 coefficient vector back into the power basis using
/// ζ⁸ = ζ⁴ − 1.
fn reduce(mut c: [Rational; 2 * DEGREE - 1]) -> Scalar {
    for k in (DEGREE..2 * DEGREE - 1).rev() {
        if c[k].is_zero() {
            continue;
        }
        let v = std::mem::take(&mut c[k]);
        c[k - 4] += &v;
        c[k - 8] -= &v;
    }
    let mut out = Scalar::zero();
    for (dst, src) in out.coeffs.iter_mut().zip(c.iter_mut()) {
        *dst = std::mem::take(src);
    }
    out
}

// Index arithmetic on the coefficient array trips this lint.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if let Some(r) = self.as_rational() {
            return rhs.scale_rational(r);
        }
        if let Some(r) = rhs.as_rational() {
            return self.scale_rational(r);
        }
        let mut c: [Rational; 2 * DEGREE - 1] = Default::default();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j].add_product(a, b);
            }
        }
        reduce(c)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Mul<&Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        &self * rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a += b;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a -= b;
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            if !c.is_zero() {
                *c = -&*c;
            }
        }
        out
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return match r.to_i64() {
                Some(v) => write!(f, "{v}"),
                None => write!(f, "{r}"),
            };
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", c.abs())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = match mag.to_i64() {
                Some(v) => v.to_string(),
                None => mag.to_string(),
            };
            match (i, mag.as_str()) {
                (0, m) => write!(f, "{m}")?,
                (_, "1") => write!(f, "z^{i}")?,
                (_, m) => write!(f, "{m}*z^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coeffs = <[Rational; DEGREE]>::deserialize(d)?;
        Ok(Scalar { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: evaluate the defining sums of roots of unity
    /// directly in floating point.
    fn zeta(k: i64) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / 12.0)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn additive_identity() {
        let a = Scalar::sqrt2() + Scalar::omega();
        assert_eq!(&Scalar::zero() + &a, a);
    }

    #[test]
    fn omega_is_a_primitive_cube_root() {
        let w = Scalar::omega();
        assert_eq!(&(&w * &w) * &w, Scalar::one());
        assert_ne!(w, Scalar::one());
        assert!((Scalar::one() + w.clone() + &w * &w).is_zero());
    }

    #[test]
    fn square_roots() {
        let r2 = Scalar::sqrt2();
        assert!(close(r2.embed(), zeta(3) + zeta(21)));
        assert!(close((&r2 * &r2).embed(), Complex64::new(2.0, 0.0)));
        assert_eq!(&r2 * &r2, Scalar::from_int(2));
        let r3 = Scalar::sqrt3();
        assert!(close(r3.embed(), zeta(2) + zeta(22)));
        assert_eq!(&r3 * &r3, Scalar::from_int(3));
        let i = Scalar::imag_unit();
        assert_eq!(&i * &i, Scalar::from_int(-1));
    }

    #[test]
    fn minimal_polynomial_reduction() {
        let z = Scalar::zeta_power(1);
        let z4 = z.pow(4);
        assert_eq!(z.pow(8), &z4 - &Scalar::one());
        for k in 0..48 {
            assert!(close(Scalar::zeta_power(k).embed(), zeta(k)), "zeta^{k}");
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(Scalar::one().inverse().unwrap(), Scalar::one());
        let half_r2 = Scalar::sqrt2().scale_rational(&Rational::new(1, 2));
        assert_eq!(Scalar::sqrt2().inverse().unwrap(), half_r2);
        assert_eq!(&Scalar::sqrt2() * &half_r2, Scalar::one());
        let w = Scalar::omega();
        assert_eq!(w.inverse().unwrap(), &w * &w);
        assert_eq!(Scalar::zero().inverse(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn random_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = Scalar::sample(&mut rng);
            if a.is_zero() {
                continue;
            }
            assert_eq!(&a * &a.inverse().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn serde_roundtrip_shape() {
        let v = serde_json::to_value(Scalar::sqrt2()).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 8);
        assert_eq!(arr[3], "1/1");
        assert_eq!(arr[5], "-1/1");
        let back: Scalar = serde_json::from_value(v).unwrap();
        assert_eq!(back, Scalar::sqrt2());
    }
}
