//! Monic rational polynomials: reduction mod `p`, complete-splitting tests,
//! splitting-prime search, root multiplicative orders `λ(P,p)`, cyclotomic
//! polynomials, and the roots-of-unity decision.
//!
//! A prime `p` with `p ∤ lcm` of the coefficient denominators is a *splitting
//! prime* of `P` if `P mod p` factors into linear factors over `F_p` with no
//! zero root. For such `p`, `λ(P,p)` is the lcm of the multiplicative orders
//! of the roots; it diverges over the splitting primes whenever `P` has a
//! root that is not a root of unity.

use crate::exact_arith::{
    self, euler_phi, is_prime_u64, mul_mod_u64, multiplicative_order_u64, next_prime,
    ExactArithError, PrimeSet, Rational,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial must be monic (leading coefficient 1)")]
    NotMonic,
    #[error("polynomial must have degree at least 1")]
    DegreeZero,
    #[error("prime {p} divides the denominator lcm {lcm}")]
    BadPrime { p: u64, lcm: BigInt },
    #[error("polynomial does not split over F_{p} with nonzero roots")]
    NotSplit { p: u64 },
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("no further splitting prime below the search ceiling {ceiling}")]
    SearchCeilingExceeded { ceiling: u64 },
    #[error("cannot parse polynomial {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error(transparent)]
    Arith(#[from] ExactArithError),
}

/// A monic polynomial with rational coefficients, lowest degree first.
///
/// Invariants: leading coefficient is exactly 1 and the degree is at least 1.
#[derive(Clone, PartialEq, Eq)]
pub struct MonicPoly {
    coeffs: Vec<Rational>,
}

/// The full root multiset of a polynomial over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub prime: u64,
    /// Roots in `F_p` with multiplicity, sorted ascending; their count equals
    /// the degree of the polynomial.
    pub roots: Vec<u64>,
}

impl MonicPoly {
    /// Build from coefficients in ascending degree order.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, PolyError> {
        if coeffs.len() < 2 {
            return Err(PolyError::DegreeZero);
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(PolyError::NotMonic);
        }
        Ok(MonicPoly { coeffs })
    }

    pub fn from_integer_coeffs(coeffs: &[i64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// `x - a`.
    pub fn linear(a: Rational) -> Self {
        MonicPoly { coeffs: vec![-a, Rational::one()] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Product of two monic polynomials (monic again).
    pub fn multiply(&self, other: &MonicPoly) -> MonicPoly {
        MonicPoly { coeffs: poly_mul(&self.coeffs, &other.coeffs) }
    }

    /// `(quotient, remainder)` of Euclidean division by another monic polynomial.
    pub fn divrem(&self, divisor: &MonicPoly) -> (Vec<Rational>, Vec<Rational>) {
        poly_divrem(&self.coeffs, &divisor.coeffs)
    }

    /// Exact quotient when `divisor` divides `self` with nonconstant quotient,
    /// otherwise `None`.
    pub fn exact_div(&self, divisor: &MonicPoly) -> Option<MonicPoly> {
        let (q, r) = self.divrem(divisor);
        if r.iter().all(Rational::is_zero) {
            MonicPoly::new(q).ok()
        } else {
            None
        }
    }

    /// Lcm of the coefficient denominators; 1 for integer polynomials.
    pub fn lcm_denominators(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denominator()))
    }

    /// Coefficient-wise reduction mod `p`; the result is monic of the same
    /// degree, lowest degree first.
    pub fn reduce_mod_p(&self, p: u64) -> Result<Vec<u64>, PolyError> {
        let lcm = self.lcm_denominators();
        if lcm.mod_floor(&BigInt::from(p)).is_zero() {
            return Err(PolyError::BadPrime { p, lcm });
        }
        self.coeffs
            .iter()
            .map(|c| exact_arith::reduce_mod_p(c, p).map_err(PolyError::from))
            .collect()
    }

    /// The root multiset of `P mod p` if it factors completely into linear
    /// factors over `F_p`, found by repeated root extraction.
    pub fn splits_over_fp(&self, p: u64) -> Result<Option<SplitReport>, PolyError> {
        let mut rem = self.reduce_mod_p(p)?;
        let mut roots = Vec::with_capacity(self.degree());
        for a in 0..p {
            while rem.len() > 1 && eval_fp(&rem, a, p) == 0 {
                rem = deflate_fp(&rem, a, p);
                roots.push(a);
            }
            if rem.len() == 1 {
                break;
            }
        }
        if rem.len() == 1 {
            Ok(Some(SplitReport { prime: p, roots }))
        } else {
            Ok(None)
        }
    }

    /// `λ(P,p)`: lcm of the multiplicative orders of the roots of `P` in `F_p`.
    ///
    /// Requires `p` to be a splitting prime of `P` with no zero roots.
    pub fn lambda_order(&self, p: u64) -> Result<u64, PolyError> {
        let report = self
            .splits_over_fp(p)?
            .filter(|r| r.roots.iter().all(|&a| a != 0))
            .ok_or(PolyError::NotSplit { p })?;
        let mut lcm = 1u64;
        let mut seen = None;
        for &a in &report.roots {
            if seen == Some(a) {
                continue;
            }
            seen = Some(a);
            let ord = multiplicative_order_u64(a, p)?;
            lcm = lcm / exact_arith::gcd_u64(lcm, ord) * ord;
        }
        Ok(lcm)
    }

    /// Decide whether every complex root of `P` is a root of unity.
    ///
    /// Roots of unity are algebraic integers, and a monic rational polynomial
    /// whose roots are all algebraic integers has integer coefficients, so a
    /// non-integral coefficient immediately decides `false`. Otherwise strip
    /// every cyclotomic factor `Φ_d` to its full multiplicity; only `d` with
    /// `φ(d) ≤ deg P` can divide, and `φ(d) ≥ √(d/2)` bounds the search by
    /// `d ≤ 2·deg²`. The answer is `true` iff nothing else remains.
    pub fn all_roots_roots_of_unity(&self) -> bool {
        if !self.has_integer_coeffs() {
            return false;
        }
        let deg = self.degree() as u64;
        let mut rem = self.clone();
        for d in 1..=2 * deg * deg {
            if euler_phi(d) > deg {
                continue;
            }
            let phi_d = cyclotomic(d);
            loop {
                if rem.degree() == phi_d.degree() {
                    if rem == phi_d {
                        return true;
                    }
                    break;
                }
                match rem.exact_div(&phi_d) {
                    Some(q) => rem = q,
                    None => break,
                }
            }
        }
        false
    }
}

impl fmt::Display for MonicPoly {
    /// Terms in decreasing degree, e.g. `x^2 + 2/3*x - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c < &Rational::zero();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for MonicPoly {
    type Err = PolyError;

    /// Parses the `"x^2 + 2/3*x - 1"` form (any term order, repeated degrees
    /// are summed).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| PolyError::Parse {
            literal: s.to_owned(),
            reason: reason.to_owned(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut terms: Vec<(i64, String)> = Vec::new();
        let mut sign = 1i64;
        let mut cur = String::new();
        for (i, ch) in compact.chars().enumerate() {
            match ch {
                '-' | '+' if i == 0 => sign = if ch == '-' { -1 } else { 1 },
                '-' | '+' if !cur.is_empty() && !cur.ends_with('/') && !cur.ends_with('^') => {
                    terms.push((sign, std::mem::take(&mut cur)));
                    sign = if ch == '-' { -1 } else { 1 };
                }
                _ => cur.push(ch),
            }
        }
        if cur.is_empty() {
            return Err(err("trailing operator"));
        }
        terms.push((sign, cur));

        let mut by_degree: HashMap<usize, Rational> = HashMap::new();
        for (sign, term) in terms {
            let (coeff_str, degree) = match term.find('x') {
                None => (term.as_str(), 0usize),
                Some(ix) => {
                    let coeff = term[..ix].trim_end_matches('*');
                    let rest = &term[ix + 1..];
                    let degree = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|d| d.parse::<usize>().ok())
                            .ok_or_else(|| err("malformed exponent"))?
                    };
                    (coeff, degree)
                }
            };
            let coeff = if coeff_str.is_empty() {
                Rational::one()
            } else {
                coeff_str
                    .parse::<Rational>()
                    .map_err(|_| err("malformed coefficient"))?
            };
            let signed = if sign < 0 { -coeff } else { coeff };
            let slot = by_degree.entry(degree).or_insert_with(Rational::zero);
            *slot = &*slot + &signed;
        }
        let degree = *by_degree.keys().max().unwrap();
        let coeffs: Vec<Rational> = (0..=degree)
            .map(|k| by_degree.remove(&k).unwrap_or_else(Rational::zero))
            .collect();
        MonicPoly::new(coeffs)
    }
}

/// The first `count` primes, ascending, at which every polynomial splits
/// completely with no zero root, skipping `skip` and any prime dividing a
/// coefficient-denominator lcm.
///
/// Termination below any reasonable ceiling is guaranteed by the positive
/// density of such primes; the ceiling converts that into a bounded loop.
pub fn splitting_primes(
    polys: &[MonicPoly],
    count: usize,
    skip: &PrimeSet,
    ceiling: u64,
) -> Result<Vec<u64>, PolyError> {
    for f in polys {
        if f.coeff(0).is_zero() {
            return Err(PolyError::ZeroConstantTerm);
        }
    }
    let mut found = Vec::with_capacity(count);
    let mut p = 1u64;
    while found.len() < count {
        p = next_prime(p);
        if p > ceiling {
            return Err(PolyError::SearchCeilingExceeded { ceiling });
        }
        if skip.contains(p) {
            continue;
        }
        if polys
            .iter()
            .any(|f| f.lcm_denominators().mod_floor(&BigInt::from(p)).is_zero())
        {
            continue;
        }
        let mut all_split = true;
        for f in polys {
            let ok = f
                .splits_over_fp(p)?
                .is_some_and(|r| r.roots.iter().all(|&a| a != 0));
            if !ok {
                all_split = false;
                break;
            }
        }
        if all_split {
            found.push(p);
        }
    }
    Ok(found)
}

/// The `d`-th cyclotomic polynomial `Φ_d`, via division of `x^d - 1` by `Φ_e`
/// for the proper divisors `e | d`, memoized process-wide.
pub fn cyclotomic(d: u64) -> MonicPoly {
    assert!(d >= 1, "cyclotomic index must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<Rational>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(coeffs) = cache.lock().unwrap().get(&d) {
        return MonicPoly { coeffs: coeffs.clone() };
    }
    let mut rem = x_pow_minus_one(d);
    for e in divisors(d) {
        if e == d {
            continue;
        }
        let phi_e = cyclotomic(e);
        let (q, r) = poly_divrem(&rem, &phi_e.coeffs);
        debug_assert!(r.iter().all(Rational::is_zero));
        rem = q;
    }
    cache.lock().unwrap().insert(d, rem.clone());
    MonicPoly { coeffs: rem }
}

fn x_pow_minus_one(d: u64) -> Vec<Rational> {
    let mut coeffs = vec![Rational::zero(); d as usize + 1];
    coeffs[0] = -Rational::one();
    coeffs[d as usize] = Rational::one();
    coeffs
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            out.push(i);
            if i != n / i {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

pub(crate) fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    out
}

/// Euclidean division by a monic divisor, both lowest degree first.
pub(crate) fn poly_divrem(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    assert!(den.last().is_some_and(Rational::is_one), "divisor must be monic");
    let (n, d) = (num.len(), den.len());
    if n < d {
        return (vec![Rational::zero()], num.to_vec());
    }
    let mut rem = num.to_vec();
    let mut quot = vec![Rational::zero(); n - d + 1];
    for k in (0..=n - d).rev() {
        let c = rem[k + d - 1].clone();
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] = &rem[k + j] - &(&c * dj);
        }
    }
    rem.truncate(d - 1);
    if rem.is_empty() {
        rem.push(Rational::zero());
    }
    (quot, rem)
}

pub(crate) fn eval_fp(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = (mul_mod_u64(acc, x, p) + c) % p;
    }
    acc
}

/// Synthetic division of a monic `F_p` polynomial by `(x - a)`; `a` must be a
/// root (checked in debug builds).
pub(crate) fn deflate_fp(coeffs: &[u64], a: u64, p: u64) -> Vec<u64> {
    let n = coeffs.len() - 1;
    let mut q = vec![0u64; n];
    let mut carry = 0u64;
    for k in (0..n).rev() {
        carry = (mul_mod_u64(carry, a, p) + coeffs[k + 1]) % p;
        q[k] = carry;
    }
    debug_assert_eq!((mul_mod_u64(carry, a, p) + coeffs[0]) % p, 0);
    q
}

/// All primes in `[2, bound)`, for scan-style searches.
pub fn primes_below(bound: u64) -> impl Iterator<Item = u64> {
    (2..bound).filter(|&n| is_prime_u64(n))
}
