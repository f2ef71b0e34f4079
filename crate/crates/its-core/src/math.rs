//! Exact arithmetic helpers shared by the solvers.
//!
//! Every comparison against a threshold involving Euler's constant e is done
//! with shrinking rational intervals, never floating point, so that ceilings
//! and feasibility predicates are unambiguous. e is irrational, hence every
//! comparison against a rational terminates after finitely many refinements.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

// === rational constructors ===

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parses "3", "3/4" or "0.15" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|e| format!("bad numerator: {e}"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|e| format!("bad denominator: {e}"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int_part: BigInt = if int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().map_err(|e| format!("bad integer part: {e}"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal: {s}"));
        }
        let digits: BigInt = frac
            .parse()
            .map_err(|e| format!("bad fraction part: {e}"))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let neg = s.starts_with('-');
        let frac_rat = Rat::new(digits, scale);
        let int_rat = Rat::from_integer(int_part);
        return Ok(if neg {
            int_rat - frac_rat
        } else {
            int_rat + frac_rat
        });
    }
    let n: BigInt = s.parse().map_err(|e| format!("bad rational: {e}"))?;
    Ok(Rat::from_integer(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

// === Euler's constant as a certified rational interval ===

/// Lower and upper rational bounds on e from n terms of the series sum 1/k!.
/// Tail bound: sum_{k>n} 1/k! < 2/(n+1)!.
fn e_bounds(n: usize) -> (Rat, Rat) {
    let mut fact = BigUint::one();
    let mut lo = Rat::zero();
    for k in 0..=n {
        if k > 0 {
            fact *= BigUint::from(k);
        }
        lo += Rat::new(BigInt::one(), BigInt::from(fact.clone()));
    }
    let next_fact = fact * BigUint::from(n + 1);
    let hi = &lo + Rat::new(BigInt::from(2), BigInt::from(next_fact));
    (lo, hi)
}

/// Runs `f` on successively tighter (lo, hi) bounds for e until it decides.
fn refine_e<T>(mut f: impl FnMut(&Rat, &Rat) -> Option<T>) -> T {
    let mut n = 12;
    loop {
        let (lo, hi) = e_bounds(n);
        if let Some(v) = f(&lo, &hi) {
            return v;
        }
        n += 8;
        assert!(n < 500, "e-interval refinement failed to terminate");
    }
}

/// Is e strictly less than q? (e is irrational, so equality never occurs.)
pub fn e_lt(q: &Rat) -> bool {
    refine_e(|lo, hi| {
        if hi < q {
            Some(true)
        } else if lo >= q {
            Some(false)
        } else {
            None
        }
    })
}

/// Smallest integer >= q*e, for q >= 0.
pub fn ceil_e_times(q: &Rat) -> BigInt {
    if q.is_zero() {
        return BigInt::zero();
    }
    assert!(q.is_positive(), "ceil_e_times requires q >= 0");
    refine_e(|lo, hi| {
        let a = (q * lo).ceil().to_integer();
        let b = (q * hi).ceil().to_integer();
        (a == b).then_some(a)
    })
}

/// Certified rational bound for 1 - k*e, k >= 0: a positive lower bound when
/// the true value is positive, otherwise a negative upper bound. The sign of
/// the returned value always matches the sign of the true value.
pub fn certified_one_minus_e_times(k: &Rat) -> Rat {
    if k.is_zero() {
        return Rat::one();
    }
    assert!(k.is_positive());
    refine_e(|lo, hi| {
        let from_hi = Rat::one() - k * hi;
        if from_hi.is_positive() {
            return Some(from_hi);
        }
        let from_lo = Rat::one() - k * lo;
        if from_lo.is_negative() {
            return Some(from_lo);
        }
        None
    })
}

// === combinatorics ===

/// Binomial coefficient C(n, k) as an arbitrary-precision integer.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k))
}

/// C(n, k) as usize; None on overflow.
pub fn binomial_usize(n: usize, k: usize) -> Option<usize> {
    binomial(n, k).to_usize()
}

/// All k-subsets of {0, .., n-1} in colexicographic order: A < B iff the
/// largest element where they differ belongs to B. Yields sorted index vecs.
pub struct ColexSubsets {
    n: usize,
    k: usize,
    cur: Option<Vec<usize>>,
}

impl ColexSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        let cur = (k <= n).then(|| (0..k).collect());
        ColexSubsets { n, k, cur }
    }
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.take()?;
        let out = cur.clone();
        if self.k > 0 {
            let mut nxt = cur;
            for i in 0..self.k {
                let limit = if i + 1 < self.k { nxt[i + 1] } else { self.n };
                if nxt[i] + 1 < limit {
                    nxt[i] += 1;
                    for (j, v) in nxt.iter_mut().enumerate().take(i) {
                        *v = j;
                    }
                    self.cur = Some(nxt);
                    break;
                }
            }
        }
        Some(out)
    }
}

/// Formats a rational as "num/den" (or "num" when integral).
pub fn rat_str(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Wall-clock ceiling of a rational, as usize (requires r >= 0 and small).
pub fn ceil_to_usize(r: &Rat) -> usize {
    assert!(!r.is_negative());
    r.ceil()
        .to_integer()
        .to_usize()
        .expect("ceiling out of usize range")
}
