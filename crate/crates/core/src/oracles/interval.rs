//! Rigorous enclosures of `ln` and `exp` at rational arguments.
//!
//! Arithmetic runs on fixed-point intervals `[lo, hi] / 2^PRECISION_BITS`
//! with outward rounding at every step, and series tails are added to the
//! interval explicitly, so the true value always lies inside.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Working precision, about 115 decimal digits.
pub const PRECISION_BITS: u32 = 384;

/// Closed interval with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enclosure {
    pub lower: Rat,
    pub upper: Rat,
}

impl Enclosure {
    pub fn width(&self) -> Rat {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lower <= *x && *x <= self.upper
    }

    /// Lower endpoint rounded down to `digits` places.
    pub fn lower_decimal(&self, digits: u32) -> String {
        self.lower.to_decimal_string(digits, false)
    }

    /// Upper endpoint rounded up to `digits` places.
    pub fn upper_decimal(&self, digits: u32) -> String {
        self.upper.to_decimal_string(digits, true)
    }
}

#[derive(Clone, Debug)]
struct Fx {
    lo: BigInt,
    hi: BigInt,
}

fn scale() -> BigInt {
    BigInt::one() << PRECISION_BITS
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

impl Fx {
    fn exact_int(k: i64) -> Fx {
        let v = BigInt::from(k) << PRECISION_BITS;
        Fx { lo: v.clone(), hi: v }
    }

    fn from_rat(x: &Rat) -> Fx {
        let num = x.numer() << PRECISION_BITS;
        Fx { lo: num.div_floor(x.denom()), hi: ceil_div(&num, x.denom()) }
    }

    fn add(&self, o: &Fx) -> Fx {
        Fx { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    fn mul(&self, o: &Fx) -> Fx {
        let s = scale();
        let products = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let min = products.iter().min().expect("four products");
        let max = products.iter().max().expect("four products");
        Fx { lo: min.div_floor(&s), hi: ceil_div(max, &s) }
    }

    fn mul_int(&self, k: i64) -> Fx {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k >= 0 {
            Fx { lo: a, hi: b }
        } else {
            Fx { lo: b, hi: a }
        }
    }

    fn div_int(&self, k: u64) -> Fx {
        let k = BigInt::from(k);
        Fx { lo: self.lo.div_floor(&k), hi: ceil_div(&self.hi, &k) }
    }

    /// Widens by `[-e, e]` in scaled units.
    fn widen(&self, e: &BigInt) -> Fx {
        Fx { lo: &self.lo - e, hi: &self.hi + e }
    }

    fn magnitude(&self) -> BigInt {
        self.lo.abs().max(self.hi.abs())
    }

    fn enclosure(&self) -> Enclosure {
        let s = scale();
        Enclosure { lower: Rat::from_big(self.lo.clone(), s.clone()), upper: Rat::from_big(self.hi.clone(), s) }
    }
}

/// `atanh(z)` for rational `0 <= z <= 1/3`.
fn atanh_small(z: &Rat) -> Fx {
    debug_assert!(!z.is_negative() && *z <= Rat::new(1, 3));
    let z2 = Fx::from_rat(&(z * z));
    let mut power = Fx::from_rat(z);
    let mut sum = Fx::exact_int(0);
    let mut j: u64 = 0;
    loop {
        sum = sum.add(&power.div_int(2 * j + 1));
        power = power.mul(&z2);
        j += 1;
        // Remaining terms sum to at most power / (1 - z^2) <= 9/8 power.
        if power.hi <= BigInt::one() {
            let tail = power.hi.clone() * 2 + 1;
            return Fx { lo: sum.lo, hi: sum.hi + tail };
        }
    }
}

fn ln2() -> Fx {
    atanh_small(&Rat::new(1, 3)).mul_int(2)
}

fn ln_fx(x: &Rat) -> Result<Fx> {
    if !x.is_positive() {
        return Err(Error::InvalidInput(format!("ln of non-positive {x}")));
    }
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = Rat::from(2i64);
    let mut y = x * two.pow(-(k as i32));
    while y < Rat::one() {
        y = y * &two;
        k -= 1;
    }
    while y >= two {
        y = y / &two;
        k += 1;
    }
    let z = (&y - Rat::one()) / (&y + Rat::one());
    Ok(ln2().mul_int(k).add(&atanh_small(&z).mul_int(2)))
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln_enclosure(x: &Rat) -> Result<Enclosure> {
    Ok(ln_fx(x)?.enclosure())
}

/// Enclosure of `exp x` for rational `x`.
pub fn exp_enclosure(x: &Rat) -> Enclosure {
    let half = Rat::new(1, 2);
    let mut s: u32 = 0;
    let mut r = x.clone();
    while r.clone().max(-r.clone()) > half {
        r = r / Rat::from(2i64);
        s += 1;
    }
    let rr = Fx::from_rat(&r);
    let mut term = Fx::exact_int(1);
    let mut sum = term.clone();
    let mut j: u64 = 1;
    loop {
        term = term.mul(&rr).div_int(j);
        sum = sum.add(&term);
        j += 1;
        // With |r| <= 1/2 the remaining terms sum to at most |term|.
        if j > 2 && term.magnitude() <= BigInt::one() {
            sum = sum.widen(&(term.magnitude() + 1));
            break;
        }
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    if sum.lo.is_negative() {
        sum.lo = BigInt::zero();
    }
    sum.enclosure()
}
