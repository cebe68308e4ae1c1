//! Truncated formal Laurent series over the rationals.
//!
//! A series stores finitely many nonzero coefficients together with a
//! truncation order `trunc`: every coefficient at an exponent `>= trunc` is
//! unknown. Binary operations propagate the truncation so that every reported
//! coefficient is exact.
//!
//! Truncation rules:
//! - `a ± b`: `min(ta, tb)`
//! - `a · b`: `min(ta + v(b), tb + v(a))`, where `v` is the order of a
//!   nonzero series and the truncation order of a zero one
//! - `f'`: `tf - 1`; `∫f`: `tf + 1`

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, Rational>,
    trunc: i64,
}

impl LaurentSeries {
    pub fn zero(trunc: i64) -> Self {
        LaurentSeries {
            coeffs: BTreeMap::new(),
            trunc,
        }
    }

    /// The constant `c`, known up to (excluding) `z^trunc`.
    pub fn constant(c: Rational, trunc: i64) -> Self {
        Self::monomial(c, 0, trunc)
    }

    pub fn monomial(c: Rational, exp: i64, trunc: i64) -> Self {
        Self::from_terms([(exp, c)], trunc)
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated exponents
    /// are summed; zero coefficients and exponents at or above `trunc` are dropped.
    pub fn from_terms<I>(terms: I, trunc: i64) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if e >= trunc {
                continue;
            }
            accumulate(&mut coeffs, e, c);
        }
        LaurentSeries { coeffs, trunc }
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Order for nonzero series, truncation order for zero ones. A lower bound
    /// on the exponent of every term, known or not.
    pub fn valuation(&self) -> i64 {
        self.order().unwrap_or(self.trunc)
    }

    pub fn leading(&self) -> Option<(i64, &Rational)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Number of stored (nonzero) coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `z^exp`; fails if that coefficient lies beyond the truncation.
    pub fn coeff(&self, exp: i64) -> Result<Rational> {
        if exp >= self.trunc {
            return Err(Error::precision(format!(
                "coefficient of z^{exp} requested from a series truncated at z^{}",
                self.trunc
            )));
        }
        Ok(self
            .coeffs
            .get(&exp)
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    /// Same series with truncation lowered to `min(trunc, self.trunc)`.
    pub fn with_trunc(&self, trunc: i64) -> Self {
        let trunc = trunc.min(self.trunc);
        LaurentSeries {
            coeffs: self
                .coeffs
                .range(..trunc)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            trunc,
        }
    }

    /// Multiplication by the exact monomial `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
            trunc: self.trunc + k,
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.trunc);
        }
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * s)).collect(),
            trunc: self.trunc,
        }
    }

    /// Removes the `z^0` term, projecting onto the subspace without constants.
    pub fn drop_constant(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.remove(&0);
        out
    }

    /// True when every coefficient below the common truncation agrees.
    pub fn agrees_with(&self, other: &LaurentSeries) -> bool {
        let t = self.trunc.min(other.trunc);
        self.coeffs.range(..t).eq(other.coeffs.range(..t))
    }

    /// Membership in `C[[z]]`: no known negative exponents.
    pub fn in_h_plus(&self) -> bool {
        self.valuation() >= 0
    }

    /// Membership in `zC[[z]]`.
    pub fn in_h_prime_plus(&self) -> bool {
        self.valuation() >= 1
    }

    /// Membership in the constant-free subspace; requires the constant term to be known.
    pub fn in_h_prime(&self) -> bool {
        self.trunc > 0 && !self.coeffs.contains_key(&0)
    }

    /// Purely polar part (negative exponents only).
    pub fn in_h_minus(&self) -> bool {
        self.coeffs.keys().all(|&e| e < 0)
    }

    /// Termwise derivative `c z^n ↦ n c z^{n-1}`.
    pub fn derive(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(e, _)| **e != 0)
            .map(|(e, c)| (e - 1, c * int(*e)))
            .collect();
        LaurentSeries {
            coeffs,
            trunc: self.trunc - 1,
        }
    }

    /// Antiderivative with zero constant term.
    pub fn integrate(&self) -> Result<Self> {
        if self.coeffs.contains_key(&-1) {
            return Err(Error::NonzeroResidue);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (e + 1, c / int(e + 1)))
            .collect();
        Ok(LaurentSeries {
            coeffs,
            trunc: self.trunc + 1,
        })
    }

    /// Multiplicative inverse by recursive coefficient solving.
    ///
    /// With `f = z^v (a_0 + a_1 z + …)` known to relative precision `r`, the
    /// inverse is `z^{-v} (b_0 + b_1 z + …)` known to the same relative precision.
    pub fn invert(&self) -> Result<Self> {
        let (v, a0) = match self.leading() {
            Some((v, c)) => (v, c.clone()),
            None => return Err(Error::ZeroSeries),
        };
        let rel = self.trunc - v;
        let a: Vec<Rational> = (0..rel)
            .map(|k| {
                self.coeffs
                    .get(&(v + k))
                    .cloned()
                    .unwrap_or_else(Rational::zero)
            })
            .collect();
        let inv_a0 = a0.recip();
        let mut b: Vec<Rational> = Vec::with_capacity(rel as usize);
        b.push(inv_a0.clone());
        for n in 1..rel as usize {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !a[k].is_zero() && !b[n - k].is_zero() {
                    acc += &a[k] * &b[n - k];
                }
            }
            b.push(-acc * &inv_a0);
        }
        Ok(LaurentSeries::from_terms(
            b.into_iter().enumerate().map(|(n, c)| (n as i64 - v, c)),
            rel - v,
        ))
    }

    /// Square root of a series of even order with leading coefficient 1,
    /// choosing the branch with leading coefficient +1.
    ///
    /// Newton iteration `s ← s + (u - s²)/(2s)` on the unit part `u`, doubling
    /// the number of correct coefficients at each step.
    pub fn sqrt_unit(&self) -> Result<Self> {
        let (v, lead) = match self.leading() {
            Some((v, c)) => (v, c.clone()),
            None => return Err(Error::ZeroSeries),
        };
        if v.rem_euclid(2) != 0 {
            return Err(Error::OddOrder(v));
        }
        if !lead.is_one() {
            return Err(Error::NonUnitLeadingCoefficient(format_rational(&lead)));
        }
        let unit = self.shift(-v);
        let rel = unit.trunc;
        let half = rat(1, 2);
        let mut s = LaurentSeries::constant(Rational::one(), 1);
        let mut prec = 1;
        while prec < rel {
            let next = (2 * prec).min(rel);
            // s is a polynomial approximant; extend it exactly to the new precision.
            let s_ext = LaurentSeries {
                coeffs: s.coeffs.clone(),
                trunc: next,
            };
            let inv = s_ext.with_trunc(prec).invert()?;
            let err = &unit.with_trunc(next) - &(&s_ext * &s_ext);
            let corr = (&err * &inv).scale(&half).with_trunc(next);
            s = (&s_ext + &corr).with_trunc(next);
            prec = next;
        }
        Ok(s.with_trunc(rel).shift(v / 2))
    }

    /// Coefficient of `z^-1`.
    pub fn residue(&self) -> Result<Rational> {
        if self.trunc < 0 {
            return Err(Error::precision(format!(
                "residue needs the z^-1 coefficient, series truncated at z^{}",
                self.trunc
            )));
        }
        self.coeff(-1)
    }

    /// `<f, g> = Res_{z=0} f dg`.
    pub fn symplectic_pair(f: &LaurentSeries, g: &LaurentSeries) -> Result<Rational> {
        (f * &g.derive()).residue()
    }
}

fn accumulate(map: &mut BTreeMap<i64, Rational>, e: i64, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(e) {
        std::collections::btree_map::Entry::Vacant(slot) => {
            slot.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut slot) => {
            *slot.get_mut() += c;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;

    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        let trunc = self.trunc.min(rhs.trunc);
        let mut coeffs: BTreeMap<i64, Rational> = self
            .coeffs
            .range(..trunc)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        for (e, c) in rhs.coeffs.range(..trunc) {
            accumulate(&mut coeffs, *e, c.clone());
        }
        LaurentSeries { coeffs, trunc }
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;

    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;

    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            trunc: self.trunc,
        }
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;

    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        let trunc = (self.trunc + rhs.valuation()).min(rhs.trunc + self.valuation());
        let mut coeffs = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &rhs.coeffs {
                if ea + eb >= trunc {
                    break;
                }
                accumulate(&mut coeffs, ea + eb, ca * cb);
            }
        }
        LaurentSeries { coeffs, trunc }
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.coeffs {
            write!(f, "{}·z^{} + ", c, e)?;
        }
        write!(f, "O(z^{})", self.trunc)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    trunc: i64,
    coeffs: BTreeMap<String, String>,
}

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;

        struct Coeffs<'a>(&'a BTreeMap<i64, Rational>);
        impl Serialize for Coeffs<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_map(
                    self.0
                        .iter()
                        .map(|(e, c)| (e.to_string(), format_rational(c))),
                )
            }
        }

        let mut st = serializer.serialize_struct("LaurentSeries", 2)?;
        st.serialize_field("trunc", &self.trunc)?;
        st.serialize_field("coeffs", &Coeffs(&self.coeffs))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(repr.coeffs.len());
        for (e, c) in repr.coeffs {
            let e: i64 = e
                .trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("bad exponent {e:?}")))?;
            if e >= repr.trunc {
                return Err(D::Error::custom(format!(
                    "exponent {e} is not below the truncation order {}",
                    repr.trunc
                )));
            }
            terms.push((e, parse_rational(&c).map_err(D::Error::custom)?));
        }
        Ok(LaurentSeries::from_terms(terms, repr.trunc))
    }
}
