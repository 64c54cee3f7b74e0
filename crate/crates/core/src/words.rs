//! Words in the three involutions and their matrix realization.
//!
//! A word acts in the order written: `xyz` is `s_x ∘ s_y ∘ s_z`, so `s_z`
//! is applied first, and `word_to_matrix` is a homomorphism onto the
//! level-2 reflection group generated by `r_x`, `r_y`, `r_z`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::class_matrix::ClassMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    pub fn matrix(self) -> ClassMatrix {
        match self {
            Letter::X => ClassMatrix::new(-1, -2, 0, 1),
            Letter::Y => ClassMatrix::new(-1, 0, 0, 1),
            Letter::Z => ClassMatrix::new(1, 0, -2, -1),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
            Letter::Z => 'z',
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    pub letters: Vec<Letter>,
}

impl GroupWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        GroupWord { letters }
    }

    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GroupWord { letters }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    pub fn pow(&self, n: usize) -> GroupWord {
        GroupWord {
            letters: self.letters.repeat(n),
        }
    }

    /// True when the word acts with determinant −1 (odd length).
    pub fn reverses_orientation(&self) -> bool {
        self.letters.len() % 2 == 1
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced() && (self.len() <= 1 || self.letters.first() != self.letters.last())
    }

    pub fn contains_all_letters(&self) -> bool {
        Letter::ALL.iter().all(|l| self.letters.contains(l))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '.' | '*'))
            .map(|c| match c.to_ascii_lowercase() {
                'x' => Ok(Letter::X),
                'y' => Ok(Letter::Y),
                'z' => Ok(Letter::Z),
                other => Err(Error::Invalid(format!(
                    "letter {other:?} is not one of x, y, z"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(GroupWord::new)
    }
}

impl Serialize for GroupWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Free-product normal form: cancel adjacent equal letters.
pub fn reduce(w: &GroupWord) -> GroupWord {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.letters {
        if out.last() == Some(&l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    GroupWord::new(out)
}

/// Splits a word as `conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
pub fn cyclic_reduce(w: &GroupWord) -> (GroupWord, GroupWord) {
    let w = reduce(w);
    let l = &w.letters;
    let (mut i, mut j) = (0, l.len());
    while j - i >= 2 && l[i] == l[j - 1] {
        i += 1;
        j -= 1;
    }
    (
        GroupWord::new(l[i..j].to_vec()),
        GroupWord::new(l[..i].to_vec()),
    )
}

pub fn word_to_matrix(w: &GroupWord) -> ClassMatrix {
    w.letters
        .iter()
        .fold(ClassMatrix::IDENTITY, |acc, l| acc * l.matrix())
}

pub fn try_word_to_matrix(w: &GroupWord) -> Result<ClassMatrix> {
    w.letters
        .iter()
        .try_fold(ClassMatrix::IDENTITY, |acc, l| acc.try_mul(&l.matrix()))
}

/// Recovers the reduced word of a level-2 matrix, up to sign.
///
/// The generators are the reflections in the sides of the ideal triangle
/// with vertices −1, 0, ∞. We follow the image of an interior base point
/// `−1/2 + i` back into that triangle, each time reflecting across the side
/// that separates it from the triangle. All tests are exact integer
/// inequalities.
pub fn matrix_to_word(m: &ClassMatrix) -> Result<GroupWord> {
    if !m.is_gamma2_star() {
        return Err(Error::NotInGamma2(m.to_string()));
    }
    let mut cur = *m;
    let mut letters = Vec::new();
    loop {
        let (a, b, c, d) = (
            cur.m11 as i128,
            cur.m12 as i128,
            cur.m21 as i128,
            cur.m22 as i128,
        );
        // Image of the base point is (p + 2ai)/(q + 2ci).
        let p = 2 * b - a;
        let q = 2 * d - c;
        let re_num = p * q + 4 * a * c;
        let den = q * q + 4 * c * c;
        let letter = if re_num + den < 0 {
            Letter::X
        } else if re_num > 0 {
            Letter::Y
        } else if p * p + 4 * a * a + re_num < 0 {
            Letter::Z
        } else {
            break;
        };
        letters.push(letter);
        cur = letter.matrix().try_mul(&cur)?;
    }
    if !cur.eq_projective(&ClassMatrix::IDENTITY) {
        return Err(Error::Numerical(format!(
            "descent for {m} stopped at {cur}"
        )));
    }
    Ok(GroupWord::new(letters))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for IsometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IsometryKind::Elliptic => "elliptic",
            IsometryKind::Parabolic => "parabolic",
            IsometryKind::Hyperbolic => "hyperbolic",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
}

/// Spectral radius of a unimodular matrix from its characteristic polynomial.
pub fn spectral_radius(m: &ClassMatrix) -> f64 {
    let t = m.trace().unsigned_abs() as f64;
    let disc = t * t - 4.0 * m.det() as f64;
    if disc <= 0.0 {
        1.0
    } else {
        ((t + disc.sqrt()) / 2.0).max(1.0)
    }
}

fn kind_of(m: &ClassMatrix) -> IsometryKind {
    let t = m.trace().abs();
    if m.det() == -1 {
        return if t == 0 {
            IsometryKind::Elliptic
        } else {
            IsometryKind::Hyperbolic
        };
    }
    match t {
        0 | 1 => IsometryKind::Elliptic,
        2 if m.eq_projective(&ClassMatrix::IDENTITY) => IsometryKind::Elliptic,
        2 => IsometryKind::Parabolic,
        _ => IsometryKind::Hyperbolic,
    }
}

pub fn classify(m: &ClassMatrix) -> IsometryClass {
    let kind = kind_of(m);
    if kind != IsometryKind::Hyperbolic {
        return IsometryClass {
            kind,
            lambda: 1.0,
            slope: None,
        };
    }
    let slope = positive_form(m).ok().map(|(n, _)| contracting_slope(&n));
    IsometryClass {
        kind,
        lambda: spectral_radius(m),
        slope,
    }
}

pub fn classify_word(w: &GroupWord) -> Result<IsometryClass> {
    let (core, _) = cyclic_reduce(w);
    Ok(classify(&try_word_to_matrix(&core)?))
}

fn eigenvalues(m: &ClassMatrix) -> (f64, f64) {
    let t = m.trace() as f64;
    let s = (t * t - 4.0 * m.det() as f64).max(0.0).sqrt();
    let (hi, lo) = ((t + s) / 2.0, (t - s) / 2.0);
    if hi.abs() >= lo.abs() {
        (hi, lo)
    } else {
        (lo, hi)
    }
}

fn contracting_slope(n: &ClassMatrix) -> f64 {
    let (_, mu) = eigenvalues(n);
    (mu - n.m11 as f64) / n.m12 as f64
}

const MOVES: [ClassMatrix; 6] = [
    ClassMatrix::new(1, 1, 0, 1),
    ClassMatrix::new(1, -1, 0, 1),
    ClassMatrix::new(1, 0, 1, 1),
    ClassMatrix::new(1, 0, -1, 1),
    ClassMatrix::new(0, 1, 1, 0),
    ClassMatrix::new(-1, 0, 0, 1),
];

const MAX_CONJUGATOR_LENGTH: usize = 20;

/// Finds `N` with positive entries and `P` with `P·M·P⁻¹ = ±N`.
///
/// Breadth-first search over conjugators built from elementary moves.
/// Entry sizes are capped so the search stays finite.
pub fn positive_form(m: &ClassMatrix) -> Result<(ClassMatrix, ClassMatrix)> {
    if kind_of(m) != IsometryKind::Hyperbolic {
        return Err(Error::NotHyperbolic {
            matrix: m.to_string(),
            kind: kind_of(m).to_string(),
        });
    }
    let t = m.trace().abs();
    let cap = 2 * m.abs_sum().max(t * t + 4);
    let sign_normal = |x: ClassMatrix| if x.trace() < 0 { -x } else { x };

    let start = sign_normal(*m);
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, ClassMatrix::IDENTITY, 0usize)]);
    while let Some((cur, p, depth)) = queue.pop_front() {
        if cur.is_positive() {
            return Ok((cur, p));
        }
        if depth == MAX_CONJUGATOR_LENGTH {
            continue;
        }
        for e in MOVES {
            let next = sign_normal(cur.conjugate_by(&e)?);
            if next.max_abs() > cap || !seen.insert(next) {
                continue;
            }
            queue.push_back((next, e * p, depth + 1));
        }
    }
    Err(Error::ConjugatorSearchExhausted(MAX_CONJUGATOR_LENGTH))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfinityVertex {
    #[serde(rename = "v_x")]
    Vx,
    #[serde(rename = "v_y")]
    Vy,
    #[serde(rename = "v_z")]
    Vz,
}

impl fmt::Display for InfinityVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfinityVertex::Vx => "v_x",
            InfinityVertex::Vy => "v_y",
            InfinityVertex::Vz => "v_z",
        })
    }
}

/// Boundary points j_x = −1, j_y = 0, j_z = ∞ cut the circle into three
/// arcs; each arc is opposite one vertex.
pub fn vertex_for_boundary_point(t: f64) -> InfinityVertex {
    if t >= 0.0 || t.is_infinite() {
        InfinityVertex::Vx
    } else if t < -1.0 {
        InfinityVertex::Vy
    } else {
        InfinityVertex::Vz
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityData {
    pub stable: bool,
    pub ind_f: InfinityVertex,
    pub ind_finv: InfinityVertex,
    /// Attracting boundary fixed point ω(f).
    pub omega: f64,
    /// Repelling boundary fixed point α(f).
    pub alpha: f64,
}

/// Boundary fixed points `(attracting, repelling)` of a hyperbolic matrix.
pub fn boundary_fixed_points(m: &ClassMatrix) -> Result<(f64, f64)> {
    if kind_of(m) != IsometryKind::Hyperbolic {
        return Err(Error::NotHyperbolic {
            matrix: m.to_string(),
            kind: kind_of(m).to_string(),
        });
    }
    // A fixed point t has eigenvector (t, 1) with eigenvalue m21·t + m22 and
    // Möbius derivative det/(m21·t + m22)², so the dominant eigenvalue attracts.
    let (hi, lo) = eigenvalues(m);
    let point = |mu: f64| {
        if m.m21 != 0 {
            (mu - m.m22 as f64) / m.m21 as f64
        } else if mu - m.m11 as f64 != 0.0 {
            m.m12 as f64 / (mu - m.m11 as f64)
        } else {
            f64::INFINITY
        }
    };
    Ok((point(hi), point(lo)))
}

/// Cyclically reduced and using all three involutions.
pub fn is_algebraically_stable(w: &GroupWord) -> bool {
    let w = reduce(w);
    w.is_cyclically_reduced() && w.contains_all_letters()
}

pub fn stability_data(w: &GroupWord) -> Result<StabilityData> {
    let w = reduce(w);
    let m = try_word_to_matrix(&w)?;
    let (omega, alpha) = boundary_fixed_points(&m)?;
    Ok(StabilityData {
        stable: is_algebraically_stable(&w),
        ind_f: vertex_for_boundary_point(alpha),
        ind_finv: vertex_for_boundary_point(omega),
        omega,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    #[test]
    fn reduction() {
        assert!(reduce(&w("xx")).is_empty());
        assert_eq!(reduce(&w("xyyz")), w("xz"));
        assert_eq!(reduce(&w("xyz")), w("xyz"));
        assert_eq!(reduce(&w("xyzzyx")), GroupWord::identity());
    }

    #[test]
    fn cyclic_reduction() {
        assert_eq!(cyclic_reduce(&w("xyz")), (w("xyz"), w("")));
        // x·yz·x = xyzx, so the core is yz.
        assert_eq!(cyclic_reduce(&w("xyzx")), (w("yz"), w("x")));
        assert_eq!(cyclic_reduce(&w("y")), (w("y"), w("")));
        let (core, c) = cyclic_reduce(&w("zxyzxz"));
        assert_eq!(reduce(&c.concat(&core).concat(&c.inverse())), w("zxyzxz"));
    }

    #[test]
    fn generator_matrices() {
        assert_eq!(word_to_matrix(&w("x")), ClassMatrix::new(-1, -2, 0, 1));
        assert_eq!(word_to_matrix(&w("")), ClassMatrix::IDENTITY);
        assert_eq!(word_to_matrix(&w("xyz")), ClassMatrix::new(5, 2, -2, -1));
        assert_eq!(word_to_matrix(&w("yx")), ClassMatrix::new(1, 2, 0, 1));
        assert_eq!(word_to_matrix(&w("zy")), ClassMatrix::new(-1, 0, 2, -1));
    }

    #[test]
    fn words_from_matrices() {
        assert_eq!(
            matrix_to_word(&ClassMatrix::new(-1, -2, 0, 1)).unwrap(),
            w("x")
        );
        assert_eq!(
            matrix_to_word(&ClassMatrix::new(5, 2, -2, -1)).unwrap(),
            w("xyz")
        );
        assert_eq!(
            matrix_to_word(&ClassMatrix::new(1, 2, 0, 1)).unwrap(),
            w("yx")
        );
        assert_eq!(
            matrix_to_word(&ClassMatrix::new(-1, 0, 0, -1)).unwrap(),
            w("")
        );
        assert!(matches!(
            matrix_to_word(&ClassMatrix::new(1, 1, 0, 1)),
            Err(Error::NotInGamma2(_))
        ));
    }

    #[test]
    fn classification() {
        let c = classify(&ClassMatrix::new(-1, -2, 0, 1));
        assert_eq!((c.kind, c.lambda), (IsometryKind::Elliptic, 1.0));
        let c = classify(&ClassMatrix::new(-1, 0, 2, -1));
        assert_eq!((c.kind, c.lambda), (IsometryKind::Parabolic, 1.0));
        let c = classify(&ClassMatrix::new(5, 2, -2, -1));
        assert_eq!(c.kind, IsometryKind::Hyperbolic);
        assert!((c.lambda - (2.0 + 5f64.sqrt())).abs() < 1e-14);
        assert!(c.slope.unwrap() < 0.0);
        assert_eq!(
            classify(&ClassMatrix::new(1, 1, -1, 0)).kind,
            IsometryKind::Elliptic
        );
    }

    #[test]
    fn positive_forms() {
        let n = ClassMatrix::new(2, 1, 1, 1);
        assert_eq!(positive_form(&n).unwrap(), (n, ClassMatrix::IDENTITY));

        let m = ClassMatrix::new(5, 2, -2, -1);
        let (n, p) = positive_form(&m).unwrap();
        assert!(n.is_positive());
        assert_eq!((n.trace().abs(), n.det()), (4, -1));
        assert!(m.conjugate_by(&p).unwrap().eq_projective(&n));

        let fib = ClassMatrix::new(1, 1, 1, 0);
        let c = classify(&(fib * fib));
        assert!((c.lambda - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!(positive_form(&ClassMatrix::new(1, 2, 0, 1)).is_err());
    }

    #[test]
    fn stability() {
        let s = stability_data(&w("xyz")).unwrap();
        assert!(s.stable);
        assert!((s.omega - (-3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((s.alpha - (-3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(
            (s.ind_finv, s.ind_f),
            (InfinityVertex::Vy, InfinityVertex::Vz)
        );
        assert!(stability_data(&w("xyxz")).unwrap().stable);
        // xyzx is conjugate to the twist yz, so it has no stability data;
        // a hyperbolic word that is not cyclically reduced is unstable.
        assert!(!is_algebraically_stable(&w("xyzx")));
        assert!(stability_data(&w("xyzx")).is_err());
        assert!(!stability_data(&w("yxyzy")).unwrap().stable);
        assert!(stability_data(&w("yx")).is_err());
    }

    #[test]
    fn word_json() {
        let s = serde_json::to_string(&w("xyz")).unwrap();
        assert_eq!(s, "\"xyz\"");
        assert_eq!(serde_json::from_str::<GroupWord>(&s).unwrap(), w("xyz"));
        assert!("xqz".parse::<GroupWord>().is_err());
    }
}
