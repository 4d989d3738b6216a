//! Exact dyadic-rational arithmetic and the interval grids built on it.
//!
//! Every coordinate, measure, popularity and threshold in this crate is a
//! dyadic rational `m * 2^e`. Values are kept canonical (odd mantissa, or the
//! unique zero `0 * 2^0`) so that equality and hashing are structural. The
//! shifted grid `D'` (the standard dyadic grid translated left by `1/3`) is
//! kept symbolic: a shifted interval stores the same `(level, index)` pair as
//! its standard counterpart plus a grid tag, and all comparisons against
//! dyadic points are done with cross-multiplied integers so nothing is ever
//! rounded.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::Error;

macro_rules! fmt_debug_as_display {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            fmt::Display::fmt(self, f)
        }
    };
}

/// Exact rational numbers, used where geometry leaves the dyadic world
/// (line-crossing abscissas and the integrals that subdivide at them).
pub type Rat = BigRational;

/// A dyadic rational `mantissa * 2^exponent` in canonical form: the mantissa
/// is odd, or the value is exactly `0 * 2^0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    mantissa: i128,
    exponent: i32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { mantissa: 0, exponent: 0 };
    pub const ONE: Dyadic = Dyadic { mantissa: 1, exponent: 0 };

    /// Builds `mantissa * 2^exponent`, reducing to canonical form.
    pub fn new(mantissa: i128, exponent: i32) -> Dyadic {
        if mantissa == 0 {
            return Dyadic::ZERO;
        }
        let tz = mantissa.trailing_zeros() as i32;
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: exponent.checked_add(tz).expect("dyadic exponent overflow"),
        }
    }

    pub fn from_int(v: i128) -> Dyadic {
        Dyadic::new(v, 0)
    }

    /// `1 / 2^k`.
    pub fn inv_pow2(k: u32) -> Dyadic {
        Dyadic { mantissa: 1, exponent: -(k as i32) }
    }

    pub fn mantissa(&self) -> i128 {
        self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa < 0
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa > 0
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mantissa: self.mantissa.checked_abs().expect("dyadic abs overflow"), exponent: self.exponent }
    }

    /// Multiplies by `2^k` (exact for either sign of `k`).
    pub fn mul_pow2(&self, k: i32) -> Dyadic {
        if self.mantissa == 0 {
            return Dyadic::ZERO;
        }
        Dyadic {
            mantissa: self.mantissa,
            exponent: self.exponent.checked_add(k).expect("dyadic exponent overflow"),
        }
    }

    pub fn half(&self) -> Dyadic {
        self.mul_pow2(-1)
    }

    pub fn mul_int(&self, k: i128) -> Dyadic {
        Dyadic::new(self.mantissa.checked_mul(k).expect("dyadic mul overflow"), self.exponent)
    }

    /// Integer `r`-th power (exact).
    pub fn pow(&self, r: u32) -> Dyadic {
        let mut out = Dyadic::ONE;
        for _ in 0..r {
            out = out * *self;
        }
        out
    }

    /// Largest integer `<=` the value.
    pub fn floor_int(&self) -> i128 {
        if self.exponent >= 0 {
            return self
                .mantissa
                .checked_shl(self.exponent as u32)
                .expect("dyadic floor overflow");
        }
        let shift = (-self.exponent) as u32;
        if shift >= 127 {
            return if self.mantissa < 0 { -1 } else { 0 };
        }
        // Arithmetic shift right floors toward negative infinity.
        self.mantissa >> shift
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa as f64 * (self.exponent as f64).exp2()
    }

    pub fn to_rat(&self) -> Rat {
        let num = BigInt::from(self.mantissa);
        if self.exponent >= 0 {
            Rat::from_integer(num * (BigInt::from(1) << self.exponent as usize))
        } else {
            Rat::new(num, BigInt::from(1) << (-self.exponent) as usize)
        }
    }

    /// Parses `"p"`, `"-p"` or `"p/q"` where `q` is a power of two.
    pub fn parse(s: &str) -> Result<Dyadic, Error> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let n: i128 = num.parse().map_err(|_| Error::ParseDyadic(s.to_string()))?;
        match den {
            None => Ok(Dyadic::from_int(n)),
            Some(d) => {
                let d: i128 = d.parse().map_err(|_| Error::ParseDyadic(s.to_string()))?;
                if d <= 0 || d.count_ones() != 1 {
                    return Err(Error::ParseDyadic(s.to_string()));
                }
                Ok(Dyadic::new(n, -(d.trailing_zeros() as i32)))
            }
        }
    }

    fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let sa = self.mantissa.signum();
        let sb = other.mantissa.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Compare magnitude windows first so aligned mantissas stay in range.
        let la = 128 - self.mantissa.unsigned_abs().leading_zeros() as i32 + self.exponent;
        let lb = 128 - other.mantissa.unsigned_abs().leading_zeros() as i32 + other.exponent;
        if la != lb {
            let mag = la.cmp(&lb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        let (ma, mb) = align(self, other);
        ma.cmp(&mb)
    }
}

/// Mantissas of both values expressed at the common (finer) exponent.
fn align(a: &Dyadic, b: &Dyadic) -> (i128, i128) {
    let e = a.exponent.min(b.exponent);
    let sa = (a.exponent - e) as u32;
    let sb = (b.exponent - e) as u32;
    (
        a.mantissa.checked_shl(sa).filter(|v| v >> sa == a.mantissa).expect("dyadic align overflow"),
        b.mantissa.checked_shl(sb).filter(|v| v >> sb == b.mantissa).expect("dyadic align overflow"),
    )
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let e = self.exponent.min(rhs.exponent);
        let (ma, mb) = align(&self, &rhs);
        Dyadic::new(ma.checked_add(mb).expect("dyadic add overflow"), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::ZERO;
        }
        Dyadic {
            mantissa: self.mantissa.checked_mul(rhs.mantissa).expect("dyadic mul overflow"),
            exponent: self.exponent.checked_add(rhs.exponent).expect("dyadic exponent overflow"),
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Dyadic) {
        *self = *self + rhs;
    }
}

impl SubAssign for Dyadic {
    fn sub_assign(&mut self, rhs: Dyadic) {
        *self = *self - rhs;
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        self.cmp_value(other)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            write!(f, "{}", self.mantissa << self.exponent)
        } else if -self.exponent < 63 {
            write!(f, "{}/{}", self.mantissa, 1i64 << (-self.exponent))
        } else {
            write!(f, "{}/2^{}", self.mantissa, -self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fmt_debug_as_display!();
}

/// Which of the two dyadic grids an interval belongs to: the standard grid
/// `D` on `[0,1]`, or `D'`, the same grid shifted left by `1/3`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Gridline {
    Standard,
    Shifted,
}

/// A dyadic interval at `level` `k`, `index` `j`: the standard interval is
/// `[j/2^k, (j+1)/2^k)` (closed on the right when it abuts `1`), and the
/// shifted interval is the same translated by `-1/3`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub grid: Gridline,
    pub level: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub fn standard(level: u32, index: u64) -> DyadicInterval {
        assert!(level < 63 && index < (1u64 << level), "dyadic interval index out of range");
        DyadicInterval { grid: Gridline::Standard, level, index }
    }

    /// Shifted-grid intervals come from the dyadic grid of the whole line,
    /// so the index may run past `2^level - 1` (the grid must reach `x = 1`
    /// even after the `-1/3` translation).
    pub fn shifted(level: u32, index: u64) -> DyadicInterval {
        assert!(level < 62 && index < (2u64 << level), "dyadic interval index out of range");
        DyadicInterval { grid: Gridline::Shifted, level, index }
    }

    pub fn unit() -> DyadicInterval {
        DyadicInterval::standard(0, 0)
    }

    pub fn len(&self) -> Dyadic {
        Dyadic::inv_pow2(self.level)
    }

    /// Left endpoint before any shift: `j/2^k`.
    pub fn left_unshifted(&self) -> Dyadic {
        Dyadic::new(self.index as i128, -(self.level as i32))
    }

    pub fn right_unshifted(&self) -> Dyadic {
        Dyadic::new(self.index as i128 + 1, -(self.level as i32))
    }

    /// Left endpoint; panics for shifted intervals whose endpoints are not
    /// dyadic. Use `left_rat` for grid-agnostic code.
    pub fn left(&self) -> Dyadic {
        assert_eq!(self.grid, Gridline::Standard, "shifted interval endpoints are not dyadic");
        self.left_unshifted()
    }

    pub fn right(&self) -> Dyadic {
        assert_eq!(self.grid, Gridline::Standard, "shifted interval endpoints are not dyadic");
        self.right_unshifted()
    }

    pub fn left_rat(&self) -> Rat {
        match self.grid {
            Gridline::Standard => self.left_unshifted().to_rat(),
            Gridline::Shifted => self.left_unshifted().to_rat() - Rat::new(BigInt::from(1), BigInt::from(3)),
        }
    }

    pub fn right_rat(&self) -> Rat {
        self.left_rat() + self.len().to_rat()
    }

    /// Whether the interval is closed at its right endpoint. Only the
    /// rightmost standard interval of each level (the one ending at `1`) is.
    pub fn right_closed(&self) -> bool {
        self.grid == Gridline::Standard && self.index == (1u64 << self.level) - 1
    }

    /// Exact point membership for a dyadic point.
    pub fn contains_dyadic(&self, x: Dyadic) -> bool {
        match self.grid {
            Gridline::Standard => {
                let l = self.left_unshifted();
                let r = self.right_unshifted();
                x >= l && (x < r || (self.right_closed() && x == r))
            }
            Gridline::Shifted => {
                // x is in [j/2^k - 1/3, (j+1)/2^k - 1/3) iff
                // 3*(x*2^k) + 2^k is in [3j, 3j+3).
                let scaled = x.mul_pow2(self.level as i32).mul_int(3) + Dyadic::new(1i128 << self.level, 0);
                let lo = Dyadic::from_int(3 * self.index as i128);
                let hi = Dyadic::from_int(3 * self.index as i128 + 3);
                scaled >= lo && scaled < hi
            }
        }
    }

    /// Exact containment of the closed interval `[a, b]` (dyadic endpoints).
    pub fn contains_closed(&self, a: Dyadic, b: Dyadic) -> bool {
        debug_assert!(a <= b);
        self.contains_dyadic(a) && self.contains_dyadic(b)
    }

    /// Containment between standard-grid intervals.
    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        assert_eq!(self.grid, other.grid);
        other.level >= self.level && (other.index >> (other.level - self.level)) == self.index
    }

    pub fn children(&self) -> (DyadicInterval, DyadicInterval) {
        (
            DyadicInterval { grid: self.grid, level: self.level + 1, index: self.index * 2 },
            DyadicInterval { grid: self.grid, level: self.level + 1, index: self.index * 2 + 1 },
        )
    }

    pub fn parent(&self) -> Option<DyadicInterval> {
        if self.level == 0 {
            None
        } else {
            Some(DyadicInterval { grid: self.grid, level: self.level - 1, index: self.index / 2 })
        }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.grid {
            Gridline::Standard => write!(f, "{}:{}", self.level, self.index),
            Gridline::Shifted => write!(f, "{}:{}'", self.level, self.index),
        }
    }
}

impl fmt::Debug for DyadicInterval {
    fmt_debug_as_display!();
}

/// How two slope cells (or dyadic intervals at possibly different levels)
/// relate to each other.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Nesting {
    Equal,
    Contains,
    Inside,
    Disjoint,
}

/// An element of the slope grid `S_k`: simultaneously the slope value
/// `(j + 1/2)/2^k` and the dyadic interval `[j/2^k, (j+1)/2^k)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlopeCell {
    pub level: u32,
    pub index: u64,
}

impl SlopeCell {
    pub fn new(level: u32, index: u64) -> SlopeCell {
        assert!(level < 63 && index < (1u64 << level), "slope cell index out of range");
        SlopeCell { level, index }
    }

    /// The slope value: the midpoint `(2j+1)/2^{k+1}` of the cell.
    pub fn value(&self) -> Dyadic {
        Dyadic::new(2 * self.index as i128 + 1, -(self.level as i32 + 1))
    }

    /// The cell viewed as a standard dyadic interval.
    pub fn interval(&self) -> DyadicInterval {
        DyadicInterval::standard(self.level, self.index)
    }

    /// `self ⊇ other` under the identification of slopes with intervals.
    pub fn contains(&self, other: &SlopeCell) -> bool {
        other.level >= self.level && (other.index >> (other.level - self.level)) == self.index
    }

    pub fn nesting(&self, other: &SlopeCell) -> Nesting {
        if self == other {
            Nesting::Equal
        } else if self.contains(other) {
            Nesting::Contains
        } else if other.contains(self) {
            Nesting::Inside
        } else {
            Nesting::Disjoint
        }
    }

    /// The ancestor cell at a coarser `level`.
    pub fn ancestor(&self, level: u32) -> SlopeCell {
        assert!(level <= self.level);
        SlopeCell { level, index: self.index >> (self.level - level) }
    }
}

impl fmt::Display for SlopeCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}:{}", self.level, self.index)
    }
}

impl fmt::Debug for SlopeCell {
    fmt_debug_as_display!();
}

/// The `2^k` cells of the slope grid `S_k`, in index order.
pub fn slope_grid(k: u32) -> Vec<SlopeCell> {
    assert!(k < 63, "slope grid level out of range");
    (0..(1u64 << k)).map(|j| SlopeCell { level: k, index: j }).collect()
}

/// Finds the smallest interval `K` of `D ∪ D'` containing the closed interval
/// `J = [a, b]`, preferring the standard grid on ties. The returned cover
/// always satisfies `|K| <= 16 |J|`; that bound is asserted by the callers'
/// tests, not assumed here.
pub fn find_dyadic_cover(a: Dyadic, b: Dyadic) -> Result<DyadicInterval, Error> {
    if b <= a {
        return Err(Error::EmptyInterval);
    }
    if a < Dyadic::ZERO || b > Dyadic::ONE {
        return Err(Error::CoverOutOfRange);
    }
    let len = b - a;
    // Largest k with 2^-k >= |J|, capped so shifts stay in range.
    let mut k_hi = 0u32;
    while k_hi < 62 && Dyadic::inv_pow2(k_hi + 1) >= len {
        k_hi += 1;
    }
    for k in (0..=k_hi).rev() {
        // Standard grid: the candidate is the level-k interval containing a.
        let j = a.mul_pow2(k as i32).floor_int();
        if j >= 0 && (j as u64) < (1u64 << k) {
            let cand = DyadicInterval::standard(k, j as u64);
            if cand.contains_closed(a, b) {
                return Ok(cand);
            }
        }
        // Shifted grid: j = floor((a + 1/3) * 2^k), via 3*(a*2^k) + 2^k.
        let scaled = a.mul_pow2(k as i32).mul_int(3) + Dyadic::new(1i128 << k, 0);
        let j = scaled.floor_int() / 3;
        if j >= 0 && (j as u64) < (2u64 << k) {
            let cand = DyadicInterval::shifted(k, j as u64);
            if cand.contains_closed(a, b) {
                return Ok(cand);
            }
        }
    }
    Err(Error::CoverOutOfRange)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dy(m: i128, e: i32) -> Dyadic {
        Dyadic::new(m, e)
    }

    #[test]
    fn canonical_form() {
        assert_eq!(dy(4, -3), dy(1, -1));
        assert_eq!(dy(0, 17), Dyadic::ZERO);
        assert_eq!(dy(-6, 0), dy(-3, 1));
        assert_eq!(dy(3, -2).to_string(), "3/4");
        assert_eq!(dy(2, 1).to_string(), "4");
    }

    #[test]
    fn parse_round_trip() {
        assert_eq!(Dyadic::parse("1/8").unwrap(), dy(1, -3));
        assert_eq!(Dyadic::parse("-3/4").unwrap(), dy(-3, -2));
        assert_eq!(Dyadic::parse("2").unwrap(), dy(1, 1));
        assert!(Dyadic::parse("1/3").is_err());
        assert!(Dyadic::parse("1/0").is_err());
        assert!(Dyadic::parse("x").is_err());
    }

    #[test]
    fn floor_matches_definition() {
        assert_eq!(dy(7, -2).floor_int(), 1);
        assert_eq!(dy(-7, -2).floor_int(), -2);
        assert_eq!(dy(-1, -5).floor_int(), -1);
        assert_eq!(dy(3, 2).floor_int(), 12);
        assert_eq!(Dyadic::ZERO.floor_int(), 0);
    }

    /// Arithmetic oracle: dyadic ops agree with big-integer arithmetic after
    /// clearing denominators, over 10^4 random pairs.
    #[test]
    fn arithmetic_agrees_with_bigint_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x9d7a_11);
        for _ in 0..10_000 {
            let a = dy(rng.gen_range(-(1i128 << 40)..(1i128 << 40)), rng.gen_range(-40..40));
            let b = dy(rng.gen_range(-(1i128 << 40)..(1i128 << 40)), rng.gen_range(-40..40));
            let (ra, rb) = (a.to_rat(), b.to_rat());
            assert_eq!((a + b).to_rat(), &ra + &rb);
            assert_eq!((a - b).to_rat(), &ra - &rb);
            assert_eq!((a * b).to_rat(), &ra * &rb);
            assert_eq!(a.cmp(&b), ra.cmp(&rb));
            assert_eq!(a.half().to_rat(), &ra / Rat::from_integer(BigInt::from(2)));
        }
    }

    #[test]
    fn rat_conversion_is_exact() {
        let x = dy(5, -4);
        assert_eq!(x.to_rat(), Rat::new(BigInt::from(5), BigInt::from(16)));
        assert!(Dyadic::ZERO.to_rat().is_zero());
        assert!(Dyadic::ONE.to_rat().is_one());
        assert!(dy(-1, -1).to_rat().is_negative());
    }

    #[test]
    fn slope_grid_matches_small_cases() {
        // S_0 = {[0,1]}.
        let s0 = slope_grid(0);
        assert_eq!(s0.len(), 1);
        assert_eq!(s0[0].value(), dy(1, -1));
        // S_2 = {[0,1/4), [1/4,1/2), [1/2,3/4), [3/4,1]}.
        let s2 = slope_grid(2);
        assert_eq!(s2.len(), 4);
        for (j, cell) in s2.iter().enumerate() {
            assert_eq!(cell.interval().left(), dy(j as i128, -2));
            assert_eq!(cell.interval().right(), dy(j as i128 + 1, -2));
        }
        // S_1 slope values are 1/4 and 3/4.
        let s1 = slope_grid(1);
        assert_eq!(s1[0].value(), dy(1, -2));
        assert_eq!(s1[1].value(), dy(3, -2));
    }

    #[test]
    fn slope_containment() {
        let whole = SlopeCell::new(0, 0);
        let t = SlopeCell::new(3, 3); // [3/8, 1/2)
        assert!(whole.contains(&t));
        assert!(!SlopeCell::new(2, 0).contains(&SlopeCell::new(2, 1)));
        assert!(SlopeCell::new(2, 1).contains(&t)); // [1/4,1/2) ⊇ [3/8,1/2)
        assert_eq!(whole.nesting(&t), Nesting::Contains);
        assert_eq!(t.nesting(&whole), Nesting::Inside);
    }

    /// Exactly one of {equal, nested, disjoint} holds for every pair.
    #[test]
    fn nesting_trichotomy() {
        let mut cells = Vec::new();
        for k in 0..6 {
            cells.extend(slope_grid(k));
        }
        for a in &cells {
            for b in &cells {
                let n = a.nesting(b);
                let eq = a == b;
                let ab = a.contains(b) && !eq;
                let ba = b.contains(a) && !eq;
                // Disjointness via exact interval arithmetic.
                let disj = a.interval().right_unshifted() <= b.interval().left_unshifted()
                    || b.interval().right_unshifted() <= a.interval().left_unshifted();
                match n {
                    Nesting::Equal => assert!(eq && !disj),
                    Nesting::Contains => assert!(ab && !disj),
                    Nesting::Inside => assert!(ba && !disj),
                    Nesting::Disjoint => assert!(disj && !eq && !ab && !ba),
                }
            }
        }
    }

    #[test]
    fn interval_membership_and_closure() {
        let i = DyadicInterval::standard(2, 3); // [3/4, 1]
        assert!(i.contains_dyadic(dy(3, -2)));
        assert!(i.contains_dyadic(Dyadic::ONE)); // rightmost interval is closed
        let j = DyadicInterval::standard(2, 1); // [1/4, 1/2)
        assert!(!j.contains_dyadic(dy(1, -1)));
        assert!(j.contains_dyadic(dy(1, -2)));

        let s = DyadicInterval::shifted(2, 2); // [1/2 - 1/3, 3/4 - 1/3) = [1/6, 5/12)
        assert!(s.contains_dyadic(dy(1, -2)));
        assert!(!s.contains_dyadic(dy(1, -1))); // 1/2 > 5/12
        assert!(!s.contains_dyadic(dy(1, -3))); // 1/8 < 1/6
    }

    #[test]
    fn cover_examples() {
        // J = [0,1] covers itself.
        let k = find_dyadic_cover(Dyadic::ZERO, Dyadic::ONE).unwrap();
        assert_eq!(k, DyadicInterval::standard(0, 0));

        // J = [5/16, 3/8]: the smallest cover is the shifted interval
        // [5/8-1/3, 3/4-1/3) = [7/24, 5/12), of length 1/8 = 2|J|.
        let k = find_dyadic_cover(dy(5, -4), dy(3, -3)).unwrap();
        assert_eq!(k, DyadicInterval::shifted(3, 5));
        assert!(k.len() <= (dy(3, -3) - dy(5, -4)).mul_int(16));

        // J straddling 1/4 forces the shifted grid.
        let a = dy(1, -2) - dy(1, -6);
        let b = dy(1, -2) + dy(1, -6);
        let k = find_dyadic_cover(a, b).unwrap();
        assert_eq!(k.grid, Gridline::Shifted);
        assert!(k.len() <= dy(1, -1));

        assert!(find_dyadic_cover(dy(1, -1), dy(1, -1)).is_err());
        assert!(find_dyadic_cover(-dy(1, -3), dy(1, -2)).is_err());
    }

    /// Cover bound: over 10^4 random dyadic intervals J with |J| >= 2^-20,
    /// the returned K satisfies J ⊆ K and |K| <= 16 |J|, exactly.
    #[test]
    fn cover_bound_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0);
        for _ in 0..10_000 {
            let e = rng.gen_range(1..=20u32);
            let scale = 1i128 << e;
            let lo = rng.gen_range(0..scale);
            let hi = rng.gen_range(lo + 1..=scale);
            let a = dy(lo, -(e as i32));
            let b = dy(hi, -(e as i32));
            let k = find_dyadic_cover(a, b).unwrap();
            assert!(k.contains_closed(a, b), "J=[{a},{b}] not inside {k}");
            assert!(k.len() <= (b - a).mul_int(16), "cover too large for J=[{a},{b}]: {k}");
        }
    }

    #[test]
    fn cover_is_smallest_and_prefers_standard() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
        for _ in 0..2_000 {
            let e = rng.gen_range(1..=12u32);
            let scale = 1i128 << e;
            let lo = rng.gen_range(0..scale);
            let hi = rng.gen_range(lo + 1..=scale);
            let a = dy(lo, -(e as i32));
            let b = dy(hi, -(e as i32));
            let k = find_dyadic_cover(a, b).unwrap();
            // No interval in either grid with strictly smaller length contains J,
            // and if a standard interval of the same length works, we chose it.
            for level in 0..=14u32 {
                if Dyadic::inv_pow2(level) > k.len() {
                    continue;
                }
                for grid in [Gridline::Standard, Gridline::Shifted] {
                    let hi = if grid == Gridline::Standard { 1u64 << level } else { 2u64 << level };
                    for idx in 0..hi {
                        let cand = DyadicInterval { grid, level, index: idx };
                        if cand.contains_closed(a, b) {
                            assert!(cand.len() >= k.len());
                            if cand.len() == k.len() && grid == Gridline::Standard {
                                assert_eq!(k.grid, Gridline::Standard);
                            }
                        }
                    }
                }
            }
        }
    }
}
