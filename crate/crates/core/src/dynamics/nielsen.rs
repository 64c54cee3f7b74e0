//! GL(2,Z) acting on punctured-torus trace coordinates.
//!
//! With x = tr α, y = tr β, z = tr αβ, an automorphism φ of the free group
//! pulls characters back, χ ↦ χ∘φ. That pull-back is contravariant, so the
//! map attached to a matrix M is the pull-back by an automorphism with
//! abelianization M⁻¹; then `nielsen_action(M·N) = nielsen_action(M) ∘ nielsen_action(N)`.

use serde::{Deserialize, Serialize};

use super::{Automorphism, Step};
use crate::class_matrix::ClassMatrix;
use crate::error::{Error, Result};
use crate::surfaces::{Convention, SurfaceParams, SurfacePoint};
use crate::words::{spectral_radius, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NielsenMove {
    /// α ↔ β: (x,y,z) ↦ (y,x,z).
    Swap,
    /// β ↦ αβ: (x,y,z) ↦ (x, z, xz−y).
    Twist,
    /// β ↦ β⁻¹: (x,y,z) ↦ (x, y, xy−z).
    Invert,
}

impl NielsenMove {
    pub fn abelianization(self) -> ClassMatrix {
        match self {
            NielsenMove::Swap => ClassMatrix::new(0, 1, 1, 0),
            NielsenMove::Twist => ClassMatrix::new(1, 1, 0, 1),
            NielsenMove::Invert => ClassMatrix::new(1, 0, 0, -1),
        }
    }

    fn steps(self) -> &'static [Step] {
        match self {
            NielsenMove::Swap => &[Step::Swap(0, 1)],
            NielsenMove::Twist => &[Step::Flip(Letter::Y), Step::Swap(1, 2)],
            NielsenMove::Invert => &[Step::Flip(Letter::Z)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NielsenMap {
    pub matrix: ClassMatrix,
    /// Moves in application order.
    pub moves: Vec<NielsenMove>,
}

impl NielsenMap {
    pub fn steps(&self) -> Vec<Step> {
        self.moves
            .iter()
            .flat_map(|m| m.steps().iter().copied())
            .collect()
    }

    /// Product of the move abelianizations in the order the pull-backs compose.
    pub fn recomposed_inverse(&self) -> ClassMatrix {
        self.moves
            .iter()
            .fold(ClassMatrix::IDENTITY, |acc, m| acc * m.abelianization())
    }

    pub fn apply(&self, p: &SurfacePoint) -> SurfacePoint {
        self.automorphism(&SurfaceParams::pt(Default::default()))
            .expect("PT parameters are valid")
            .apply(p)
    }

    /// The map as an automorphism of the given punctured-torus surface.
    pub fn automorphism(&self, params: &SurfaceParams) -> Result<Automorphism> {
        if params.convention != Convention::PT || !params.abc_vanish() {
            return Err(Error::Invalid(
                "trace maps act on PT-convention surfaces".into(),
            ));
        }
        Ok(Automorphism {
            params: *params,
            steps: self.steps(),
            lambda: spectral_radius(&self.matrix),
            label: format!("nielsen {}", self.matrix),
        })
    }
}

/// Decomposes M⁻¹ into elementary moves by the Euclidean algorithm on its
/// first column.
pub fn nielsen_action(m: &ClassMatrix) -> Result<NielsenMap> {
    let g = m.inverse()?;
    // Left factors L with L_k⋯L_1·g = ±I; the moves are their inverses in order.
    let mut factors: Vec<(NielsenMove, i64)> = Vec::new();
    let mut cur = g;
    while cur.m21 != 0 {
        if cur.m11.abs() < cur.m21.abs() {
            cur = NielsenMove::Swap.abelianization().try_mul(&cur)?;
            factors.push((NielsenMove::Swap, 1));
        } else {
            let q = cur.m11 / cur.m21;
            cur = ClassMatrix::new(1, -q, 0, 1).try_mul(&cur)?;
            factors.push((NielsenMove::Twist, q));
        }
    }
    if cur.m11 < 0 {
        cur = -cur;
    }
    if cur.m22 < 0 {
        cur = NielsenMove::Invert.abelianization().try_mul(&cur)?;
        factors.push((NielsenMove::Invert, 1));
    }
    if cur.m12 != 0 {
        factors.push((NielsenMove::Twist, cur.m12));
    }
    let mut moves = Vec::new();
    for (mv, q) in factors {
        match mv {
            NielsenMove::Twist if q > 0 => {
                moves.extend(std::iter::repeat_n(NielsenMove::Twist, q as usize))
            }
            NielsenMove::Twist => {
                moves.push(NielsenMove::Invert);
                moves.extend(std::iter::repeat_n(
                    NielsenMove::Twist,
                    q.unsigned_abs() as usize,
                ));
                moves.push(NielsenMove::Invert);
            }
            other => moves.push(other),
        }
    }
    Ok(NielsenMap { matrix: *m, moves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{residual, C64};

    fn pt(x: f64, y: f64, z: f64) -> SurfacePoint {
        SurfacePoint::real(x, y, z)
    }

    #[test]
    fn elementary_cases() {
        let p = SurfacePoint::new(C64::new(0.3, 1.0), C64::new(-1.2, 0.5), C64::new(2.0, -0.1));
        let minus = nielsen_action(&-ClassMatrix::IDENTITY).unwrap();
        assert_eq!(minus.apply(&p), p);
        let twist = nielsen_action(&ClassMatrix::new(1, -1, 0, 1)).unwrap();
        assert_eq!(twist.moves, vec![NielsenMove::Twist]);
        assert_eq!(twist.apply(&pt(2.0, 2.0, 2.0)), pt(2.0, 2.0, 2.0));
        assert_eq!(twist.apply(&pt(1.0, 2.0, 3.0)), pt(1.0, 3.0, 1.0));
    }

    #[test]
    fn decomposition_recomposes() {
        for m in [
            ClassMatrix::new(2, 1, 1, 1),
            ClassMatrix::new(5, 2, -2, -1),
            ClassMatrix::new(-3, 7, 2, -5),
            ClassMatrix::new(0, 1, 1, 1),
        ] {
            let n = nielsen_action(&m).unwrap();
            assert!(
                n.recomposed_inverse().eq_projective(&m.inverse().unwrap()),
                "{m}"
            );
        }
        assert!(nielsen_action(&ClassMatrix::new(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn fibonacci_trace_map() {
        // a ↦ b, b ↦ ba has abelianization [[0,1],[1,1]]; its trace map is
        // (x,y,z) ↦ (y, z, yz − x).
        let fib = ClassMatrix::new(0, 1, 1, 1);
        let f = nielsen_action(&fib.inverse().unwrap()).unwrap();
        assert_eq!(f.apply(&pt(1.0, 2.0, 3.0)), pt(2.0, 3.0, 5.0));
    }

    #[test]
    fn preserves_level() {
        let params = SurfaceParams::pt_real(3.0);
        let p = pt(0.5, -1.0, 0.7);
        let m = ClassMatrix::new(3, 2, 4, 3);
        let q = nielsen_action(&m).unwrap().apply(&p);
        assert!((residual(&params, &q) - residual(&params, &p)).norm() < 1e-9);
    }
}
