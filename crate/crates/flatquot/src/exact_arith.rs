//! Arbitrary-precision rational arithmetic, the ring of `D`-integers, and
//! modular arithmetic extended to rationals.
//!
//! A rational `a/b` reduces mod `p` (for `p` not dividing `b`) to the unique
//! residue `k` with `k·b ≡ a (mod p)`. The ring `Z_D` consists of rationals
//! whose denominators factor entirely over a fixed finite set of primes `D`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Errors from rational and modular arithmetic.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ExactArithError {
    #[error("denominator {denominator} is not invertible mod {modulus}")]
    DenominatorNotInvertible { denominator: BigInt, modulus: u64 },
    #[error("{value} is not a unit mod {modulus}")]
    NotAUnit { value: BigInt, modulus: BigInt },
    #[error("zero denominator in rational literal {literal:?}")]
    ZeroDenominator { literal: String },
    #[error("cannot parse {literal:?} as a rational")]
    BadLiteral { literal: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("primes in a prime set must be distinct and ascending")]
    UnsortedPrimeSet,
    #[error("integer {0} exceeds the supported factorization range (2^64)")]
    MagnitudeTooLarge(BigInt),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(BigInt),
}

/// An arbitrary-precision reduced fraction.
///
/// Invariants: `gcd(|numerator|, denominator) = 1`, `denominator ≥ 1`, and
/// zero is represented as `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

impl Rational {
    /// Build `num/den`, reducing and normalising the sign into the numerator.
    ///
    /// Panics if `den` is zero; use [`Rational::from_str`] for fallible input.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let (num, den) = (num.into(), den.into());
        assert!(!den.is_zero(), "zero denominator");
        let mut r = Rational { num, den };
        r.reduce();
        r
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational { num: n.into(), den: BigInt::one() }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True iff the denominator is 1.
    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn abs(&self) -> Self {
        Rational { num: self.num.abs(), den: self.den.clone() }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        if self.num.is_negative() {
            Rational { num: -self.den.clone(), den: -self.num.clone() }
        } else {
            Rational { num: self.den.clone(), den: self.num.clone() }
        }
    }

    fn reduce(&mut self) {
        if self.den.is_negative() {
            self.num = -std::mem::take(&mut self.num);
            self.den = -std::mem::take(&mut self.den);
        }
        if self.num.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num = &self.num / &g;
            self.den = &self.den / &g;
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = ExactArithError;

    /// Parses `"a/b"` or `"a"`, with an optional leading sign; reduces on input.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactArithError::BadLiteral { literal: s.to_owned() };
        let t = s.trim();
        let (num_str, den_str) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (t, None),
        };
        let num = BigInt::from_str(num_str).map_err(|_| bad())?;
        let den = match den_str {
            Some(d) => BigInt::from_str(d).map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(ExactArithError::ZeroDenominator { literal: s.to_owned() });
        }
        Ok(Rational::new(num, den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        // Denominators are positive, so cross-multiplication preserves order.
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                let ($a, $b) = (self, rhs);
                let mut r = $body;
                r.reduce();
                r
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
    };
}

rational_binop!(Add, add, |a, b| Rational {
    num: &a.num * &b.den + &b.num * &a.den,
    den: &a.den * &b.den,
});
rational_binop!(Sub, sub, |a, b| Rational {
    num: &a.num * &b.den - &b.num * &a.den,
    den: &a.den * &b.den,
});
rational_binop!(Mul, mul, |a, b| Rational {
    num: &a.num * &b.num,
    den: &a.den * &b.den,
});

impl Div for &Rational {
    type Output = Rational;
    // Division is multiplication by the reciprocal.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Rational) -> Rational {
        self * &rhs.recip()
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        &self / &rhs
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num.clone(), den: self.den.clone() }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

/// A finite ordered set of distinct primes, the denominator support `D`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet { primes: Vec::new() }
    }

    /// From a slice of primes in any order; rejects non-primes and duplicates.
    pub fn new(primes: &[u64]) -> Result<Self, ExactArithError> {
        let mut v = primes.to_vec();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(ExactArithError::UnsortedPrimeSet);
            }
        }
        for &p in &v {
            if !is_prime_u64(p) {
                return Err(ExactArithError::NotPrime(p));
            }
        }
        Ok(PrimeSet { primes: v })
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        let mut v = self.primes.clone();
        v.extend_from_slice(&other.primes);
        v.sort_unstable();
        v.dedup();
        PrimeSet { primes: v }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.primes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Reduce a rational mod `p`: the unique `k` in `0..p` with `k·b ≡ a (mod p)`.
///
/// The modular inverse of the denominator comes from the extended Euclidean
/// algorithm, so nothing beyond invertibility is required of `p`.
pub fn reduce_mod_p(q: &Rational, p: u64) -> Result<u64, ExactArithError> {
    let den = q.denominator().mod_floor(&BigInt::from(p));
    let den: u64 = den.try_into().expect("mod_floor of positive modulus fits");
    let inv = inv_mod_u64(den, p).ok_or(ExactArithError::DenominatorNotInvertible {
        denominator: q.denominator().clone(),
        modulus: p,
    })?;
    let num = q.numerator().mod_floor(&BigInt::from(p));
    let num: u64 = num.try_into().expect("mod_floor of positive modulus fits");
    Ok(mul_mod_u64(num, inv, p))
}

/// Smallest `n ≥ 1` with `k^n ≡ 1 (mod m)`, by direct powering.
pub fn multiplicative_order(k: &BigInt, m: &BigInt) -> Result<BigInt, ExactArithError> {
    if m < &BigInt::from(2) {
        return Err(ExactArithError::BadModulus(m.clone()));
    }
    let k = k.mod_floor(m);
    if !k.gcd(m).is_one() {
        return Err(ExactArithError::NotAUnit { value: k, modulus: m.clone() });
    }
    let mut acc = k.clone();
    let mut order = BigInt::one();
    while !acc.is_one() {
        acc = (&acc * &k).mod_floor(m);
        order += 1;
    }
    Ok(order)
}

/// `multiplicative_order` specialised to machine-word moduli.
pub fn multiplicative_order_u64(k: u64, m: u64) -> Result<u64, ExactArithError> {
    if m < 2 {
        return Err(ExactArithError::BadModulus(BigInt::from(m)));
    }
    let k = k % m;
    if gcd_u64(k, m) != 1 {
        return Err(ExactArithError::NotAUnit {
            value: BigInt::from(k),
            modulus: BigInt::from(m),
        });
    }
    let mut acc = k;
    let mut order = 1u64;
    while acc != 1 {
        acc = mul_mod_u64(acc, k, m);
        order += 1;
    }
    Ok(order)
}

/// True iff every prime factor of the denominator of `q` lies in `D`.
pub fn is_d_integer(q: &Rational, d: &PrimeSet) -> Result<bool, ExactArithError> {
    let support = denominator_support(q)?;
    Ok(support.primes.iter().all(|&p| d.contains(p)))
}

/// The set of prime divisors of the denominator of `q`.
pub fn denominator_support(q: &Rational) -> Result<PrimeSet, ExactArithError> {
    let den: u64 = q
        .denominator()
        .try_into()
        .map_err(|_| ExactArithError::MagnitudeTooLarge(q.denominator().clone()))?;
    let mut primes: Vec<u64> = factor_u64(den).into_iter().map(|(p, _)| p).collect();
    primes.sort_unstable();
    Ok(PrimeSet { primes })
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd_u64(b, a % b) }
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse by extended Euclid; `None` when `gcd(a, m) ≠ 1`.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin for `u64` inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    // This witness set decides primality for all n < 3.3·10^24, so for all u64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    loop {
        if is_prime_u64(c) {
            return c;
        }
        c += 1;
    }
}

/// Full factorization of a `u64` as `(prime, exponent)` pairs, ascending.
///
/// Trial division by small primes, then Pollard's rho on what remains.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += 1,
        None => out.push((p, 1)),
    };
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push(m, &mut out);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

/// Euler's totient via factorization.
pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factor_u64(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n));
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn rational_reduces_and_normalises() {
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(q("-2/-4"), q("1/2"));
        assert_eq!(q("2/-4").to_string(), "-1/2");
        assert_eq!(q("0/5"), Rational::zero());
        assert_eq!(q("0/5").denominator(), &BigInt::from(1));
        assert_eq!(q("7").to_string(), "7");
        assert_eq!(q("-4/3").to_string(), "-4/3");
    }

    #[test]
    fn rational_parse_rejects_zero_denominator() {
        assert!(matches!(
            "1/0".parse::<Rational>(),
            Err(ExactArithError::ZeroDenominator { .. })
        ));
        assert!("a/b".parse::<Rational>().is_err());
    }

    #[test]
    fn rational_field_ops() {
        assert_eq!(q("1/2") + q("1/3"), q("5/6"));
        assert_eq!(q("1/2") - q("1/3"), q("1/6"));
        assert_eq!(q("2/3") * q("9/4"), q("3/2"));
        assert_eq!(q("2/3") / q("4/3"), q("1/2"));
        assert_eq!(-q("1/2"), q("-1/2"));
        assert!(q("-1/2") < q("1/3"));
    }

    #[test]
    fn reduce_mod_p_paper_example() {
        // 3^{-1} ≡ 2 (mod 5), so 2/3 ≡ 4.
        assert_eq!(reduce_mod_p(&q("2/3"), 5).unwrap(), 4);
        assert_eq!(reduce_mod_p(&q("0"), 7).unwrap(), 0);
        // Oracle: exhaustive search for k with 2k ≡ 7 (mod 7).
        let oracle = (0..7).find(|k| (2 * k) % 7 == 7 % 7).unwrap();
        assert_eq!(reduce_mod_p(&q("7/2"), 7).unwrap(), oracle);
        assert!(matches!(
            reduce_mod_p(&q("1/5"), 5),
            Err(ExactArithError::DenominatorNotInvertible { .. })
        ));
    }

    #[test]
    fn multiplicative_order_small_cases() {
        assert_eq!(multiplicative_order_u64(1, 100).unwrap(), 1);
        assert_eq!(multiplicative_order_u64(2, 7).unwrap(), 3);
        // ord_{2^n - 1}(2) = n, the order used by the BS(1,2) family.
        for n in 2..=20u64 {
            let m = (1u64 << n) - 1;
            assert_eq!(multiplicative_order_u64(2, m).unwrap(), n);
        }
        assert!(matches!(
            multiplicative_order_u64(2, 8),
            Err(ExactArithError::NotAUnit { .. })
        ));
        let big = multiplicative_order(&BigInt::from(2), &BigInt::from(7)).unwrap();
        assert_eq!(big, BigInt::from(3));
    }

    #[test]
    fn order_divides_phi() {
        for m in [5u64, 9, 12, 35, 101] {
            let phi = euler_phi(m);
            for k in 1..m {
                if gcd_u64(k, m) == 1 {
                    let ord = multiplicative_order_u64(k, m).unwrap();
                    assert_eq!(phi % ord, 0, "ord_{m}({k}) = {ord} must divide φ = {phi}");
                    assert_eq!(pow_mod_u64(k, phi, m), 1);
                }
            }
        }
    }

    #[test]
    fn d_integer_membership() {
        let d23 = PrimeSet::new(&[2, 3]).unwrap();
        let d2 = PrimeSet::new(&[2]).unwrap();
        assert!(is_d_integer(&q("1/6"), &d23).unwrap());
        assert!(!is_d_integer(&q("1/6"), &d2).unwrap());
        assert!(is_d_integer(&q("5"), &PrimeSet::empty()).unwrap());
    }

    #[test]
    fn denominator_support_examples() {
        assert_eq!(
            denominator_support(&q("3/20")).unwrap(),
            PrimeSet::new(&[2, 5]).unwrap()
        );
        assert!(denominator_support(&q("7")).unwrap().is_empty());
        assert_eq!(
            denominator_support(&q("1/97")).unwrap(),
            PrimeSet::new(&[97]).unwrap()
        );
    }

    #[test]
    fn prime_set_rejects_bad_input() {
        assert!(PrimeSet::new(&[4]).is_err());
        assert!(PrimeSet::new(&[3, 3]).is_err());
        assert_eq!(PrimeSet::new(&[5, 2]).unwrap().to_string(), "{2, 5}");
    }

    #[test]
    fn primality_and_factoring() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(999983));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(999981));
        assert!(is_prime_u64(18446744073709551557)); // largest u64 prime
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(20), vec![(2, 2), (5, 1)]);
        assert_eq!(factor_u64(600851475143), vec![(71, 1), (839, 1), (1471, 1), (6857, 1)]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(next_prime(13), 17);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_rational() -> impl Strategy<Value = Rational> {
            (-1000i64..1000, 1i64..1000).prop_map(|(a, b)| Rational::new(a, b))
        }

        proptest! {
            // reduce_mod_p is a ring homomorphism where defined.
            #[test]
            fn reduction_is_ring_hom(a in arb_rational(), b in arb_rational()) {
                let p = 1009u64;
                let (ra, rb) = (reduce_mod_p(&a, p).unwrap(), reduce_mod_p(&b, p).unwrap());
                prop_assert_eq!(reduce_mod_p(&(&a + &b), p).unwrap(), (ra + rb) % p);
                prop_assert_eq!(reduce_mod_p(&(&a * &b), p).unwrap(), mul_mod_u64(ra, rb, p));
            }

            // Z_D is closed under addition and multiplication.
            #[test]
            fn z_d_is_a_ring(a in -100i64..100, b in -100i64..100, ea in 0u32..5, eb in 0u32..5, fa in 0u32..4, fb in 0u32..4) {
                let d = PrimeSet::new(&[2, 3]).unwrap();
                let x = Rational::new(a, 2i64.pow(ea) * 3i64.pow(fa));
                let y = Rational::new(b, 2i64.pow(eb) * 3i64.pow(fb));
                prop_assert!(is_d_integer(&x, &d).unwrap());
                prop_assert!(is_d_integer(&(&x + &y), &d).unwrap());
                prop_assert!(is_d_integer(&(&x * &y), &d).unwrap());
            }

            #[test]
            fn parse_display_round_trip(x in arb_rational()) {
                let s = x.to_string();
                prop_assert_eq!(s.parse::<Rational>().unwrap(), x);
            }
        }
    }
}
