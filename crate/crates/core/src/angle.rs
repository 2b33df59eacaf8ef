//! Exact angles as half-turn counts with a vector residue.
//!
//! An [`Angle`] is `half_turns * pi + arg(residual)` where the residual is a
//! primitive integer vector with argument in `[0, pi)`. Sums are computed by
//! complex multiplication of residues with carry into the half-turn count,
//! and comparisons reduce to cross-product signs, so cone angles and
//! Gauss-Bonnet ledgers are verified without any trigonometry.

use crate::geom::Vec2;
use crate::Int;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Angle {
    half_turns: u64,
    /// Primitive integer vector, argument in `[0, pi)`: either `y > 0`, or
    /// `y == 0 && x > 0` (trivial residue, argument zero).
    residual: (Int, Int),
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residual_trivial() {
            write!(f, "{}·π", self.half_turns)
        } else {
            write!(
                f,
                "{}·π+arg({},{})",
                self.half_turns, self.residual.0, self.residual.1
            )
        }
    }
}

fn reduce(x: Int, y: Int) -> (Int, Int) {
    let g = x.gcd(&y);
    if g.is_zero() {
        panic!("zero residual vector");
    }
    (x / &g, y / &g)
}

impl Angle {
    pub fn zero() -> Self {
        Angle { half_turns: 0, residual: (Int::from(1), Int::from(0)) }
    }

    pub fn pi() -> Self {
        Angle::from_pi_multiple(1)
    }

    pub fn two_pi() -> Self {
        Angle::from_pi_multiple(2)
    }

    pub fn from_pi_multiple(k: u64) -> Self {
        Angle { half_turns: k, residual: (Int::from(1), Int::from(0)) }
    }

    pub fn is_zero(&self) -> bool {
        self.half_turns == 0 && self.residual_trivial()
    }

    fn residual_trivial(&self) -> bool {
        self.residual.1.is_zero()
    }

    pub fn half_turns(&self) -> u64 {
        self.half_turns
    }

    /// Exact multiple of `pi`, when the angle is one.
    pub fn as_pi_multiple(&self) -> Option<u64> {
        self.residual_trivial().then_some(self.half_turns)
    }

    /// Exact multiple of `2pi`, when the angle is one.
    pub fn as_two_pi_multiple(&self) -> Option<u64> {
        match self.as_pi_multiple() {
            Some(k) if k % 2 == 0 => Some(k / 2),
            _ => None,
        }
    }

    /// Counterclockwise angle from `u` to `w`, in `[0, 2pi)`.
    pub fn between(u: &Vec2, w: &Vec2) -> Self {
        assert!(!u.is_zero() && !w.is_zero(), "angle between zero vectors");
        let dot = u.dot(w);
        let cross = u.cross(w);
        // Clear denominators: only the direction of (dot, cross) matters.
        let l = dot.denom().lcm(cross.denom());
        let dx = dot.numer() * (&l / dot.denom());
        let dy = cross.numer() * (&l / cross.denom());
        if dy.is_zero() {
            if dx.is_positive() {
                Angle::zero()
            } else {
                Angle::pi()
            }
        } else if dy.is_positive() {
            Angle { half_turns: 0, residual: reduce(dx, dy) }
        } else {
            Angle { half_turns: 1, residual: reduce(-dx, -dy) }
        }
    }

    pub fn add(&self, other: &Angle) -> Angle {
        let (x1, y1) = &self.residual;
        let (x2, y2) = &other.residual;
        let x = x1 * x2 - y1 * y2;
        let y = x1 * y2 + y1 * x2;
        let mut ht = self.half_turns + other.half_turns;
        let (x, y) = if y.is_negative() || (y.is_zero() && x.is_negative()) {
            ht += 1;
            (-x, -y)
        } else {
            (x, y)
        };
        Angle { half_turns: ht, residual: reduce(x, y) }
    }

    pub fn sum<'a>(angles: impl IntoIterator<Item = &'a Angle>) -> Angle {
        angles
            .into_iter()
            .fold(Angle::zero(), |acc, a| acc.add(a))
    }

    /// `self - other`, or `None` when the difference would be negative.
    pub fn checked_sub(&self, other: &Angle) -> Option<Angle> {
        if self < other {
            return None;
        }
        // Divide the residues as complex numbers (multiply by conjugate);
        // the argument difference lies in (-pi, pi).
        let (xa, ya) = &self.residual;
        let (xb, yb) = &other.residual;
        let x = xa * xb + ya * yb;
        let y = ya * xb - xa * yb;
        if y.is_negative() || (y.is_zero() && x.is_negative()) {
            // Borrow a half turn.
            Some(Angle {
                half_turns: self.half_turns - other.half_turns - 1,
                residual: reduce(-x, -y),
            })
        } else {
            Some(Angle {
                half_turns: self.half_turns - other.half_turns,
                residual: reduce(x, y),
            })
        }
    }

    /// `k * pi - self`; panics unless `self <= k * pi`.
    pub fn sub_from_pi_multiple(&self, k: u64) -> Angle {
        assert!(
            *self <= Angle::from_pi_multiple(k),
            "angle subtraction would be negative"
        );
        if self.residual_trivial() {
            Angle::from_pi_multiple(k - self.half_turns)
        } else {
            let (x, y) = &self.residual;
            Angle {
                half_turns: k - self.half_turns - 1,
                residual: reduce(-x.clone(), y.clone()),
            }
        }
    }

    /// The smallest multiple of `2pi` strictly greater than this angle,
    /// returned as `(multiple, remainder)` with `remainder > 0`. This is the
    /// canonical cap used to read zero orders off boundary corners.
    pub fn strict_two_pi_cover(&self) -> (u64, Angle) {
        let m = if self.residual_trivial() {
            self.half_turns / 2 + 1
        } else {
            (self.half_turns + 1).div_ceil(2)
        };
        let gamma = self.sub_from_pi_multiple(2 * m);
        (m, gamma)
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.half_turns.cmp(&other.half_turns) {
            Ordering::Equal => {
                let (x1, y1) = &self.residual;
                let (x2, y2) = &other.residual;
                // Both arguments lie in [0, pi): compare by cross sign.
                let c = x1 * y2 - y1 * x2;
                if c.is_positive() {
                    Ordering::Less
                } else if c.is_negative() {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            }
            o => o,
        }
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rat_i;

    fn vi(x: i64, y: i64) -> Vec2 {
        Vec2::new(rat_i(x), rat_i(y))
    }

    #[test]
    fn between_quadrants() {
        assert_eq!(Angle::between(&vi(1, 0), &vi(1, 0)), Angle::zero());
        assert_eq!(Angle::between(&vi(1, 0), &vi(-1, 0)), Angle::pi());
        assert_eq!(Angle::between(&vi(1, 0), &vi(0, 1)).add(&Angle::between(&vi(1, 0), &vi(0, 1))), Angle::pi());
        // three quarter turns
        let q = Angle::between(&vi(1, 0), &vi(0, 1));
        let tq = Angle::between(&vi(1, 0), &vi(0, -1));
        assert_eq!(q.add(&q).add(&q), tq);
    }

    #[test]
    fn sums_carry_half_turns() {
        let a = Angle::between(&vi(1, 0), &vi(1, 1)); // pi/4
        let full = Angle::sum(std::iter::repeat(&a).take(8));
        assert_eq!(full, Angle::two_pi());
        assert_eq!(full.as_two_pi_multiple(), Some(1));
    }

    #[test]
    fn ordering_and_subtraction() {
        let pi4 = Angle::between(&vi(1, 0), &vi(1, 1));
        let pi2 = Angle::between(&vi(1, 0), &vi(0, 1));
        assert!(pi4 < pi2);
        assert!(pi2 < Angle::pi());
        assert_eq!(pi4.sub_from_pi_multiple(1), Angle::between(&vi(1, 1), &vi(-1, 0)));
        assert_eq!(Angle::pi().sub_from_pi_multiple(2), Angle::pi());
    }

    #[test]
    fn strict_cover_reads_cap_orders() {
        // 2pi covers to 4pi: an order-one zero after capping.
        let (m, gamma) = Angle::two_pi().strict_two_pi_cover();
        assert_eq!(m, 2);
        assert_eq!(gamma, Angle::two_pi());
        // 3pi/2 covers to 2pi.
        let a = Angle::pi().add(&Angle::between(&vi(1, 0), &vi(0, 1)));
        let (m, gamma) = a.strict_two_pi_cover();
        assert_eq!(m, 1);
        assert_eq!(gamma, Angle::between(&vi(1, 0), &vi(0, 1)));
        // pi covers to 2pi.
        let (m, gamma) = Angle::pi().strict_two_pi_cover();
        assert_eq!(m, 1);
        assert_eq!(gamma, Angle::pi());
    }
}
