//! Hyperelliptic curves `y² = p(x)` with `p` monic, squarefree, of odd degree
//! `2g + 1`, expanded at their unique point at infinity.
//!
//! The local parameter is fixed by `x = z⁻²`; then
//! `y = z^{-(2g+1)} · sqrt(z^{4g+2} p(z⁻²))` with the `+1` branch. Functions
//! regular away from infinity are spanned by `xᵃ yᵇ` (`b ∈ {0, 1}`), vector
//! fields by `xᵃ yᵇ v₀` with `v₀ = y d/dx`, and holomorphic differentials by
//! `x^{i-1} dx / y`, `i = 1..g`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::witt::WittElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    coeffs: Vec<Rational>,
}

/// JSON form: `{"p": ["c0", "c1", ..., "1"], "precision": N}` with index = degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveInput {
    pub p: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i64>,
}

impl HyperellipticCurve {
    /// Validates `p`: odd degree at least 5, monic, squarefree.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let deg = coeffs.len().saturating_sub(1);
        if deg < 5 || deg.is_multiple_of(2) {
            return Err(Error::InvalidCurve(format!(
                "p must have odd degree >= 5 (genus >= 2), got degree {deg}"
            )));
        }
        if !coeffs[deg].is_one() {
            return Err(Error::InvalidCurve(format!(
                "p must be monic, leading coefficient is {}",
                format_rational(&coeffs[deg])
            )));
        }
        let derivative: Vec<Rational> = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
            .collect();
        if poly_degree(&poly_gcd(&coeffs, &derivative)) > 0 {
            return Err(Error::InvalidCurve("p is not squarefree".into()));
        }
        Ok(HyperellipticCurve { coeffs })
    }

    pub fn from_input(input: &CurveInput) -> Result<Self> {
        let coeffs = input
            .p
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    /// Coefficients of `p`, index = degree.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn genus(&self) -> usize {
        (self.degree() - 1) / 2
    }

    pub fn to_input(&self, precision: Option<i64>) -> CurveInput {
        CurveInput {
            p: self.coeffs.iter().map(format_rational).collect(),
            precision,
        }
    }

    /// Default working precision `8g + 24`.
    pub fn default_precision(&self) -> i64 {
        8 * self.genus() as i64 + 24
    }
}

fn poly_degree(p: &[Rational]) -> i64 {
    p.iter()
        .rposition(|c| !c.is_zero())
        .map_or(-1, |d| d as i64)
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let db = poly_degree(b);
    assert!(db >= 0, "division by the zero polynomial");
    let db = db as usize;
    let mut r: Vec<Rational> = a.to_vec();
    let lead = b[db].clone();
    while poly_degree(&r) >= db as i64 {
        let dr = poly_degree(&r) as usize;
        let q = &r[dr] / &lead;
        for i in 0..=db {
            let delta = &q * &b[i];
            r[dr - db + i] -= delta;
        }
    }
    r
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while poly_degree(&b) >= 0 {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// A basis member labelled by its pole order at infinity and by the monomial
/// `xᵃ yᵇ` it comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleBasisElement<T> {
    pub pole_order: i64,
    pub x_power: u32,
    pub y_power: u32,
    pub value: T,
}

/// Laurent data of a curve at infinity: the inputs of every cohomological computation.
#[derive(Clone, Debug)]
pub struct CurveExpansion {
    curve: HyperellipticCurve,
    precision: i64,
    x_series: LaurentSeries,
    y_series: LaurentSeries,
    v0: WittElement,
    k0_basis: Vec<PoleBasisElement<LaurentSeries>>,
    theta_basis: Vec<PoleBasisElement<WittElement>>,
    h10_basis: Vec<LaurentSeries>,
    gaps_o: Vec<i64>,
    gaps_theta: Vec<i64>,
    cutoff_o: i64,
    cutoff_theta: i64,
}

/// Smallest admissible working precision for genus `g`.
pub fn min_precision(genus: usize) -> i64 {
    4 * genus as i64 + 4
}

/// Builds the expansion with `precision` coefficients of `y` known
/// (`y` truncated at `z^precision`).
///
/// Bases reach pole order `max(4g+2, N)` for functions and `max(6g, N)` for
/// vector fields, so every reduction the working precision can support finds
/// its basis element.
pub fn expand_curve(curve: &HyperellipticCurve, precision: i64) -> Result<CurveExpansion> {
    let g = curve.genus() as i64;
    let n = precision;
    if n < min_precision(curve.genus()) {
        return Err(Error::precision(format!(
            "precision {n} is below the minimum 4g+4 = {}",
            min_precision(curve.genus())
        )));
    }
    let deg_y = 2 * g + 1;

    let x_series = LaurentSeries::monomial(Rational::one(), -2, n);
    // q(z) = z^{4g+2} p(z^-2), a polynomial in z² with constant term 1.
    let q = LaurentSeries::from_terms(
        curve
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (2 * deg_y - 2 * i as i64, c.clone())),
        n + deg_y,
    );
    let y_series = q.sqrt_unit()?.shift(-deg_y);

    let p_of_x = q.shift(-2 * deg_y);
    if !(&y_series * &y_series).agrees_with(&p_of_x) {
        return Err(Error::InvalidCurve(
            "y² = p(x) fails on the expansion".into(),
        ));
    }

    // x' = -2z⁻³ and 1/x' = -z³/2 are exact; give them room beyond y's precision.
    let exact_room = n + 4 * deg_y;
    let x_prime = LaurentSeries::monomial(-Rational::from_integer(2.into()), -3, exact_room);
    let x_prime_inv = LaurentSeries::monomial(Rational::new((-1).into(), 2.into()), 3, exact_room);
    let v0 = WittElement::new(&y_series * &x_prime_inv);
    debug_assert_eq!(v0.coeff.order(), Some(-(2 * g - 2)));
    let y_v0 = &y_series * &v0.coeff;

    let cutoff_o = (4 * g + 2).max(n);
    let mut k0_basis = Vec::new();
    for pole in 1..=cutoff_o {
        let elem = if pole % 2 == 0 {
            Some((
                pole / 2,
                0,
                LaurentSeries::monomial(Rational::one(), -pole, n),
            ))
        } else if pole >= deg_y {
            let a = (pole - deg_y) / 2;
            Some((a, 1, y_series.shift(-2 * a).drop_constant()))
        } else {
            None
        };
        if let Some((a, b, value)) = elem {
            debug_assert_eq!(value.order(), Some(-pole));
            k0_basis.push(PoleBasisElement {
                pole_order: pole,
                x_power: a as u32,
                y_power: b,
                value,
            });
        }
    }

    let v0_pole = 2 * g - 2;
    let cutoff_theta = (6 * g).max(n);
    let mut theta_basis = Vec::new();
    for pole in 1..=cutoff_theta {
        let rest = pole - v0_pole;
        let elem = if rest < 0 {
            None
        } else if rest % 2 == 0 {
            Some((rest / 2, 0, v0.coeff.shift(-rest)))
        } else if rest >= deg_y {
            let a = (rest - deg_y) / 2;
            Some((a, 1, y_v0.shift(-2 * a)))
        } else {
            None
        };
        if let Some((a, b, value)) = elem {
            debug_assert_eq!(value.order(), Some(-pole));
            theta_basis.push(PoleBasisElement {
                pole_order: pole,
                x_power: a as u32,
                y_power: b,
                value: WittElement::new(value),
            });
        }
    }

    let gaps_o = gaps(&k0_basis.iter().map(|e| e.pole_order).collect::<Vec<_>>());
    let gaps_theta = gaps(&theta_basis.iter().map(|e| e.pole_order).collect::<Vec<_>>());
    if gaps_o.len() as i64 != g || gaps_theta.len() as i64 != 3 * g - 3 {
        return Err(Error::InvalidCurve(format!(
            "gap scan found {} function gaps and {} vector-field gaps, expected {} and {}",
            gaps_o.len(),
            gaps_theta.len(),
            g,
            3 * g - 3
        )));
    }

    let y_inv = y_series.invert()?;
    let dx_over_y = &x_prime * &y_inv;
    let h10_basis = (0..g)
        .map(|i| dx_over_y.shift(-2 * i).integrate())
        .collect::<Result<Vec<_>>>()?;

    Ok(CurveExpansion {
        curve: curve.clone(),
        precision: n,
        x_series,
        y_series,
        v0,
        k0_basis,
        theta_basis,
        h10_basis,
        gaps_o,
        gaps_theta,
        cutoff_o,
        cutoff_theta,
    })
}

/// Positive integers below the largest realized pole order that are not realized.
fn gaps(realized: &[i64]) -> Vec<i64> {
    let max = realized.iter().copied().max().unwrap_or(0);
    (1..max).filter(|n| !realized.contains(n)).collect()
}

/// Holomorphic integrals `g_i` with `g_i' dz = x^{i-1} dx / y`, recomputed from scratch.
pub fn holomorphic_integrals(exp: &CurveExpansion) -> Result<Vec<LaurentSeries>> {
    let y_inv = exp.y_series.invert()?;
    let room = exp.precision + 8 * exp.genus() as i64 + 4;
    (0..exp.genus())
        .map(|i| {
            // x^{i-1} x' = -2 z^{-2i-1}
            let form =
                LaurentSeries::monomial(-Rational::from_integer(2.into()), -2 * i as i64 - 3, room);
            (&form * &y_inv).integrate()
        })
        .collect()
}

impl CurveExpansion {
    pub fn curve(&self) -> &HyperellipticCurve {
        &self.curve
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn x_series(&self) -> &LaurentSeries {
        &self.x_series
    }

    pub fn y_series(&self) -> &LaurentSeries {
        &self.y_series
    }

    /// `v₀ = y d/dx = (y / x') d/dz`.
    pub fn v0(&self) -> &WittElement {
        &self.v0
    }

    pub fn k0_basis(&self) -> &[PoleBasisElement<LaurentSeries>] {
        &self.k0_basis
    }

    pub fn theta_basis(&self) -> &[PoleBasisElement<WittElement>] {
        &self.theta_basis
    }

    /// `g_1, …, g_g`.
    pub fn h10_basis(&self) -> &[LaurentSeries] {
        &self.h10_basis
    }

    /// `h_i = g_i'`, the coefficient of `dz` in the `i`-th holomorphic form.
    pub fn holomorphic_forms(&self) -> Vec<LaurentSeries> {
        self.h10_basis.iter().map(LaurentSeries::derive).collect()
    }

    pub fn gaps_o(&self) -> &[i64] {
        &self.gaps_o
    }

    pub fn gaps_theta(&self) -> &[i64] {
        &self.gaps_theta
    }

    pub fn cutoff_o(&self) -> i64 {
        self.cutoff_o
    }

    pub fn cutoff_theta(&self) -> i64 {
        self.cutoff_theta
    }

    pub fn k0_element(&self, pole_order: i64) -> Option<&LaurentSeries> {
        self.k0_basis
            .iter()
            .find(|e| e.pole_order == pole_order)
            .map(|e| &e.value)
    }

    pub fn theta_element(&self, pole_order: i64) -> Option<&WittElement> {
        self.theta_basis
            .iter()
            .find(|e| e.pole_order == pole_order)
            .map(|e| &e.value)
    }

    /// The canonical Kodaira–Spencer fields `z^{-n} d/dz` for the vector-field gaps `n`.
    pub fn ks_gap_fields(&self) -> Vec<WittElement> {
        self.gaps_theta
            .iter()
            .map(|&n| WittElement::monomial(Rational::one(), -n, self.precision))
            .collect()
    }

    /// Checks `y² = p(x)` up to the available truncation.
    pub fn check_curve_equation(&self) -> bool {
        let deg_y = 2 * self.genus() as i64 + 1;
        let p_of_x = LaurentSeries::from_terms(
            self.curve
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (-2 * i as i64, c.clone())),
            self.precision - deg_y,
        );
        (&self.y_series * &self.y_series).agrees_with(&p_of_x)
    }
}
