//! The Witt algebra of formal vector fields `f(z) d/dz`, its representation on
//! Laurent series by `g ↦ f g'`, and the ring of differential operators that
//! compositions of those images generate.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::rational::{binomial, Rational};

/// A formal vector field `f(z) d/dz`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WittElement {
    pub coeff: LaurentSeries,
}

impl WittElement {
    pub fn new(coeff: LaurentSeries) -> Self {
        WittElement { coeff }
    }

    /// `c z^exp d/dz`.
    pub fn monomial(c: Rational, exp: i64, trunc: i64) -> Self {
        WittElement::new(LaurentSeries::monomial(c, exp, trunc))
    }

    pub fn zero(trunc: i64) -> Self {
        WittElement::new(LaurentSeries::zero(trunc))
    }

    /// Regular at the origin: `f ∈ C[[z]]`.
    pub fn is_regular(&self) -> bool {
        self.coeff.in_h_plus()
    }

    pub fn bracket(&self, other: &WittElement) -> WittElement {
        witt_bracket(self, other)
    }

    pub fn add(&self, other: &WittElement) -> WittElement {
        WittElement::new(&self.coeff + &other.coeff)
    }

    pub fn scale(&self, s: &Rational) -> WittElement {
        WittElement::new(self.coeff.scale(s))
    }
}

/// `[a, b] = (f_a f_b' - f_b f_a') d/dz`.
pub fn witt_bracket(a: &WittElement, b: &WittElement) -> WittElement {
    let fa = &a.coeff;
    let fb = &b.coeff;
    WittElement::new(&(fa * &fb.derive()) - &(fb * &fa.derive()))
}

/// A linear differential operator `g ↦ Σ_{k ≥ 1} a_k g^{(k)}` with Laurent
/// series coefficients. Order-zero terms never arise from composing images
/// of vector fields, so they are not representable.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffOp {
    terms: BTreeMap<u32, LaurentSeries>,
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    /// Builds an operator from `(order, coefficient)` pairs; zero coefficients are dropped.
    ///
    /// Panics on order 0.
    pub fn from_terms<I: IntoIterator<Item = (u32, LaurentSeries)>>(terms: I) -> Self {
        let mut op = DiffOp::zero();
        for (k, a) in terms {
            assert!(k >= 1, "differential operators here start at order 1");
            op.add_term(k, a);
        }
        op
    }

    fn add_term(&mut self, order: u32, a: LaurentSeries) {
        let merged = match self.terms.remove(&order) {
            Some(prev) => &prev + &a,
            None => a,
        };
        if !merged.is_zero() {
            self.terms.insert(order, merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &LaurentSeries)> + '_ {
        self.terms.iter().map(|(k, a)| (*k, a))
    }

    pub fn coefficient(&self, order: u32) -> Option<&LaurentSeries> {
        self.terms.get(&order)
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply(&self, g: &LaurentSeries) -> Result<LaurentSeries> {
        diffop_apply(self, g)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &DiffOp) -> DiffOp {
        diffop_compose(self, inner)
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, a) in &other.terms {
            out.add_term(*k, -a);
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> DiffOp {
        DiffOp::from_terms(self.terms.iter().map(|(k, a)| (*k, a.scale(s))))
    }

    /// Same orders, and coefficients that agree up to their common truncation.
    pub fn agrees_with(&self, other: &DiffOp) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((ka, a), (kb, b))| ka == kb && a.agrees_with(b))
    }
}

/// `φ(f d/dz) = {g ↦ f g'}`.
pub fn phi(field: &WittElement) -> DiffOp {
    DiffOp::from_terms([(1, field.coeff.clone())])
}

/// Evaluates `Σ a_k g^{(k)}`.
///
/// Fails when the truncation of `g` leaves no known coefficient in some term.
pub fn diffop_apply(op: &DiffOp, g: &LaurentSeries) -> Result<LaurentSeries> {
    let mut derivs = vec![g.clone()];
    let mut out: Option<LaurentSeries> = None;
    for (k, a) in &op.terms {
        while derivs.len() <= *k as usize {
            let next = derivs.last().unwrap().derive();
            derivs.push(next);
        }
        let dk = &derivs[*k as usize];
        let term = a * dk;
        if term.trunc() <= a.valuation() + g.valuation() - *k as i64 && !g.is_zero() {
            return Err(Error::precision(format!(
                "order-{k} term of the operator has no known coefficients (truncated at z^{})",
                term.trunc()
            )));
        }
        out = Some(match out {
            Some(acc) => &acc + &term,
            None => term,
        });
    }
    Ok(out.unwrap_or_else(|| LaurentSeries::zero(g.trunc())))
}

/// Composition `(w ∘ v)(g) = w(v(g))`, expanded with the Leibniz rule:
/// `b_j (a_k g^{(k)})^{(j)} = Σ_i C(j,i) b_j a_k^{(j-i)} g^{(k+i)}`.
pub fn diffop_compose(w: &DiffOp, v: &DiffOp) -> DiffOp {
    let mut out = DiffOp::zero();
    for (j, b) in &w.terms {
        for (k, a) in &v.terms {
            let mut derivs = vec![a.clone()];
            for _ in 0..*j {
                let next = derivs.last().unwrap().derive();
                derivs.push(next);
            }
            for i in 0..=*j {
                let coeff = binomial(*j, i);
                let term = (b * &derivs[(*j - i) as usize]).scale(&coeff);
                out.add_term(k + i, term);
            }
        }
    }
    out
}

/// Finite certificate of `<α(x), y> + <x, α(y)> = 0` on the monomials
/// `x = z^a`, `y = z^b` with `a, b ∈ [-range, range] \ {0}`.
pub fn sp_witness(op: &DiffOp, range: i64) -> Result<bool> {
    if op.is_zero() {
        return Ok(true);
    }
    let max_order = op.max_order() as i64;
    let min_val = op.terms.values().map(|a| a.valuation()).min().unwrap_or(0);
    // Monomials are exact; give them enough room that only the operator's own
    // truncation can run out.
    let room = 2 * range + max_order + 2 + (-min_val).max(0);
    let mono = |e: i64| LaurentSeries::monomial(Rational::from_integer(1.into()), e, room);
    let exps: Vec<i64> = (-range..=range).filter(|e| *e != 0).collect();
    let images: Vec<LaurentSeries> = exps
        .iter()
        .map(|&e| op.apply(&mono(e)))
        .collect::<Result<_>>()?;
    for (ia, &a) in exps.iter().enumerate() {
        for (ib, &b) in exps.iter().enumerate().skip(ia) {
            let lhs = LaurentSeries::symplectic_pair(&images[ia], &mono(b))?;
            let rhs = LaurentSeries::symplectic_pair(&mono(a), &images[ib])?;
            if !(lhs + rhs).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl Serialize for DiffOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;

        struct Terms<'a>(&'a BTreeMap<u32, LaurentSeries>);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_map(self.0.iter().map(|(k, a)| (k.to_string(), a)))
            }
        }

        let mut st = serializer.serialize_struct("DiffOp", 1)?;
        st.serialize_field("terms", &Terms(&self.terms))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for DiffOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            terms: BTreeMap<String, LaurentSeries>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut op = DiffOp::zero();
        for (k, a) in repr.terms {
            let k: u32 = k
                .trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("bad operator order {k:?}")))?;
            if k == 0 {
                return Err(D::Error::custom("operator orders start at 1"));
            }
            op.add_term(k, a);
        }
        Ok(op)
    }
}

/// Action of the symmetric tensor `Σ c_i h_i k_i` on `x`:
/// `x ↦ Σ c_i (<h_i, x> k_i + <k_i, x> h_i)`.
pub fn symmetric_tensor_action(
    tensor: &[(Rational, LaurentSeries, LaurentSeries)],
    x: &LaurentSeries,
) -> Result<LaurentSeries> {
    let mut out: Option<LaurentSeries> = None;
    for (c, h, k) in tensor {
        let hx = LaurentSeries::symplectic_pair(h, x)?;
        let kx = LaurentSeries::symplectic_pair(k, x)?;
        let term = &k.scale(&(c * hx)) + &h.scale(&(c * kx));
        out = Some(match out {
            Some(acc) => &acc + &term,
            None => term,
        });
    }
    Ok(out.unwrap_or_else(|| LaurentSeries::zero(x.trunc())))
}

/// The finite window `½ Σ_{j ≠ 0, j+k ≠ 0, |j| ≤ window} z^{-j} z^{j+k}` of the
/// symmetric-square expansion of `φ(z^{k+1} d/dz)`. Both factors lie in the
/// constant-free subspace, so the `j = -k` term is omitted.
pub fn phi_symmetric_expansion(
    k: i64,
    window: i64,
    trunc: i64,
) -> Vec<(Rational, LaurentSeries, LaurentSeries)> {
    let half = Rational::new(1.into(), 2.into());
    (-window..=window)
        .filter(|&j| j != 0 && j + k != 0)
        .map(|j| {
            (
                half.clone(),
                LaurentSeries::monomial(Rational::from_integer(1.into()), -j, trunc),
                LaurentSeries::monomial(Rational::from_integer(1.into()), j + k, trunc),
            )
        })
        .collect()
}
