//! 2×2 integer matrices with determinant ±1.
//!
//! The same type carries mapping-class matrices, monomial exponents on the
//! Cayley cubic, and substitution abelianizations.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct ClassMatrix {
    pub m11: i64,
    pub m12: i64,
    pub m21: i64,
    pub m22: i64,
}

impl From<[[i64; 2]; 2]> for ClassMatrix {
    fn from(r: [[i64; 2]; 2]) -> Self {
        ClassMatrix::new(r[0][0], r[0][1], r[1][0], r[1][1])
    }
}

impl From<ClassMatrix> for [[i64; 2]; 2] {
    fn from(m: ClassMatrix) -> Self {
        m.rows()
    }
}

impl ClassMatrix {
    pub const IDENTITY: ClassMatrix = ClassMatrix::new(1, 0, 0, 1);

    pub const fn new(m11: i64, m12: i64, m21: i64, m22: i64) -> Self {
        ClassMatrix { m11, m12, m21, m22 }
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.m11, self.m12], [self.m21, self.m22]]
    }

    pub fn det(&self) -> i64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> i64 {
        self.m11 + self.m22
    }

    pub fn abs_sum(&self) -> i64 {
        self.m11.abs() + self.m12.abs() + self.m21.abs() + self.m22.abs()
    }

    pub fn max_abs(&self) -> i64 {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }

    /// Checked product; `None` on i64 overflow.
    pub fn checked_mul(&self, o: &ClassMatrix) -> Option<ClassMatrix> {
        let dot = |a: i64, b: i64, c: i64, d: i64| a.checked_mul(b)?.checked_add(c.checked_mul(d)?);
        Some(ClassMatrix::new(
            dot(self.m11, o.m11, self.m12, o.m21)?,
            dot(self.m11, o.m12, self.m12, o.m22)?,
            dot(self.m21, o.m11, self.m22, o.m21)?,
            dot(self.m21, o.m12, self.m22, o.m22)?,
        ))
    }

    pub fn try_mul(&self, o: &ClassMatrix) -> Result<ClassMatrix> {
        self.checked_mul(o).ok_or(Error::Overflow)
    }

    pub fn try_pow(&self, n: u32) -> Result<ClassMatrix> {
        let mut acc = ClassMatrix::IDENTITY;
        for _ in 0..n {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Result<ClassMatrix> {
        let det = self.det();
        if det.abs() != 1 {
            return Err(Error::Invalid(format!(
                "{self} has determinant {det}, not ±1"
            )));
        }
        Ok(ClassMatrix::new(
            det * self.m22,
            -det * self.m12,
            -det * self.m21,
            det * self.m11,
        ))
    }

    pub fn transpose(&self) -> ClassMatrix {
        ClassMatrix::new(self.m11, self.m21, self.m12, self.m22)
    }

    /// Equality in PGL(2,Z): `self == ±other`.
    pub fn eq_projective(&self, other: &ClassMatrix) -> bool {
        self == other || *self == -*other
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }

    /// Membership in the level-2 group: unimodular and ≡ identity mod 2.
    pub fn is_gamma2_star(&self) -> bool {
        self.is_unimodular()
            && self.m11.rem_euclid(2) == 1
            && self.m22.rem_euclid(2) == 1
            && self.m12.rem_euclid(2) == 0
            && self.m21.rem_euclid(2) == 0
    }

    pub fn is_positive(&self) -> bool {
        self.m11 > 0 && self.m12 > 0 && self.m21 > 0 && self.m22 > 0
    }

    /// `P · self · P⁻¹` for unimodular `P`.
    pub fn conjugate_by(&self, p: &ClassMatrix) -> Result<ClassMatrix> {
        p.try_mul(self)?.try_mul(&p.inverse()?)
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [self.m11 as f64, self.m12 as f64],
            [self.m21 as f64, self.m22 as f64],
        ]
    }
}

impl Mul for ClassMatrix {
    type Output = ClassMatrix;

    /// Panics on overflow; use [`ClassMatrix::try_mul`] when entries may be large.
    fn mul(self, o: ClassMatrix) -> ClassMatrix {
        self.checked_mul(&o)
            .expect("class matrix product overflowed i64")
    }
}

impl Neg for ClassMatrix {
    type Output = ClassMatrix;
    fn neg(self) -> ClassMatrix {
        ClassMatrix::new(-self.m11, -self.m12, -self.m21, -self.m22)
    }
}

impl fmt::Display for ClassMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.m11, self.m12, self.m21, self.m22
        )
    }
}

impl std::str::FromStr for ClassMatrix {
    type Err = Error;

    /// Parses the JSON form `[[a,b],[c,d]]`.
    fn from_str(s: &str) -> Result<Self> {
        let rows: [[i64; 2]; 2] = serde_json::from_str(s)
            .map_err(|e| Error::Invalid(format!("cannot parse matrix {s:?}: {e}")))?;
        Ok(rows.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_projective_equality() {
        let m = ClassMatrix::new(5, 2, -2, -1);
        assert_eq!(m.det(), -1);
        assert_eq!(m * m.inverse().unwrap(), ClassMatrix::IDENTITY);
        assert!(m.eq_projective(&-m));
        assert!(!m.eq_projective(&m.transpose()));
    }

    #[test]
    fn json_round_trip() {
        let m = ClassMatrix::new(5, 2, -2, -1);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[5,2],[-2,-1]]");
        assert_eq!(s.parse::<ClassMatrix>().unwrap(), m);
    }

    #[test]
    fn gamma2_membership() {
        assert!(ClassMatrix::new(-1, -2, 0, 1).is_gamma2_star());
        assert!(!ClassMatrix::new(1, 1, 0, 1).is_gamma2_star());
        assert!(!ClassMatrix::new(3, 0, 0, 1).is_gamma2_star());
    }

    #[test]
    fn overflow_is_reported() {
        let big = ClassMatrix::new(i64::MAX / 2, 1, 1, 0);
        assert_eq!(big.try_mul(&big), Err(Error::Overflow));
    }
}
