//! Normal forms in `H¹(O) ≅ H′ / (K₀ + H′₊)` and `H¹(Θ) ≅ d / (Γ(Θ(*p)) ⊕ d₊)`,
//! the residue duality with holomorphic forms, and the projection `ρ` from
//! differential operators to `Hom(H^{1,0}, H^{0,1})`.
//!
//! Classes are written in the gap-monomial bases `[z^{-n}]` and
//! `[z^{-n} d/dz]`, gaps ascending. A [`HomMatrix`] has entry `(i, j)` equal
//! to the `[z^{-n_i}]` coordinate of the image of `g_j`.

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curve::CurveExpansion;
use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::linalg::RatMatrix;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::witt::{DiffOp, WittElement};

/// A class in `H¹(O)`; `coords[i]` multiplies `[z^{-gaps[i]}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1OClass {
    gaps: Vec<i64>,
    coords: Vec<Rational>,
}

/// A class in `H¹(Θ)`; `coords[i]` multiplies `[z^{-gaps[i]} d/dz]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSClass {
    gaps: Vec<i64>,
    coords: Vec<Rational>,
}

macro_rules! gap_class {
    ($ty:ident) => {
        impl $ty {
            pub fn new(gaps: Vec<i64>, coords: Vec<Rational>) -> Self {
                assert_eq!(gaps.len(), coords.len(), "one coordinate per gap");
                $ty { gaps, coords }
            }

            pub fn zero(gaps: &[i64]) -> Self {
                Self::new(gaps.to_vec(), vec![Rational::zero(); gaps.len()])
            }

            pub fn gaps(&self) -> &[i64] {
                &self.gaps
            }

            pub fn coords(&self) -> &[Rational] {
                &self.coords
            }

            pub fn is_zero(&self) -> bool {
                self.coords.iter().all(Zero::is_zero)
            }

            pub fn add(&self, other: &Self) -> Self {
                assert_eq!(self.gaps, other.gaps);
                let coords = self
                    .coords
                    .iter()
                    .zip(&other.coords)
                    .map(|(a, b)| a + b)
                    .collect();
                Self::new(self.gaps.clone(), coords)
            }

            pub fn scale(&self, s: &Rational) -> Self {
                Self::new(
                    self.gaps.clone(),
                    self.coords.iter().map(|c| c * s).collect(),
                )
            }
        }
    };
}

gap_class!(H1OClass);
gap_class!(KSClass);

/// Upward sweep shared by both reductions. `basis` yields the element with a
/// given pole order; the sweep stops at exponent 0.
fn sweep<'a>(
    series: &LaurentSeries,
    gaps: &[i64],
    min_trunc: i64,
    basis: impl Fn(i64) -> Option<&'a LaurentSeries>,
) -> Result<Vec<Rational>> {
    let mut coords = vec![Rational::zero(); gaps.len()];
    let mut rest = series.clone();
    loop {
        if rest.trunc() < min_trunc {
            return Err(Error::precision(format!(
                "reduction needs coefficients below z^{min_trunc}, series is truncated at z^{}",
                rest.trunc()
            )));
        }
        let Some((exp, c)) = rest.leading().map(|(e, c)| (e, c.clone())) else {
            break;
        };
        if exp >= 0 {
            break;
        }
        let pole = -exp;
        let removed = if let Ok(i) = gaps.binary_search(&pole) {
            coords[i] = c.clone();
            LaurentSeries::monomial(c, exp, rest.trunc())
        } else if let Some(elem) = basis(pole) {
            let (lead_exp, lead) = elem.leading().expect("basis elements are nonzero");
            debug_assert_eq!(lead_exp, exp);
            elem.scale(&(c / lead))
        } else {
            return Err(Error::UnreducibleExponent(exp));
        };
        rest = &rest - &removed;
    }
    Ok(coords)
}

/// Gap-basis representative of `[h] ∈ H¹(O)`.
///
/// Realized pole orders are eliminated with `K₀`, gap coefficients are
/// recorded, and everything from `z⁰` upward is discarded.
pub fn reduce_o(h: &LaurentSeries, exp: &CurveExpansion) -> Result<H1OClass> {
    let coords = sweep(h, exp.gaps_o(), 1, |pole| exp.k0_element(pole))?;
    Ok(H1OClass::new(exp.gaps_o().to_vec(), coords))
}

/// Gap-basis representative of `[ζ] ∈ H¹(Θ)`; the regular part lies in `d₊`.
pub fn reduce_theta(zeta: &WittElement, exp: &CurveExpansion) -> Result<KSClass> {
    let coords = sweep(&zeta.coeff, exp.gaps_theta(), 0, |pole| {
        exp.theta_element(pole).map(|t| &t.coeff)
    })?;
    Ok(KSClass::new(exp.gaps_theta().to_vec(), coords))
}

/// `D(i, j) = <g_i, z^{-n_j}>` for the function gaps `n_j`.
pub fn duality_matrix(exp: &CurveExpansion) -> Result<RatMatrix> {
    let gaps = exp.gaps_o();
    let g = exp.h10_basis();
    let mut d = RatMatrix::zeros(g.len(), gaps.len());
    for (i, gi) in g.iter().enumerate() {
        for (j, &n) in gaps.iter().enumerate() {
            let mono = LaurentSeries::monomial(Rational::one(), -n, gi.trunc() + n + 1);
            d[(i, j)] = LaurentSeries::symplectic_pair(gi, &mono)?;
        }
    }
    Ok(d)
}

/// Element of `Hom(H^{1,0}, H^{0,1})` in the bases `g_j` and `[z^{-n_i}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMatrix {
    basis_gaps: Vec<i64>,
    matrix: RatMatrix,
}

impl HomMatrix {
    pub fn new(basis_gaps: Vec<i64>, matrix: RatMatrix) -> Self {
        assert_eq!(matrix.rows(), basis_gaps.len());
        assert_eq!(matrix.rows(), matrix.cols(), "HomMatrix is g×g");
        HomMatrix { basis_gaps, matrix }
    }

    pub fn zero(basis_gaps: &[i64]) -> Self {
        let g = basis_gaps.len();
        Self::new(basis_gaps.to_vec(), RatMatrix::zeros(g, g))
    }

    /// Column `j` is the image of `g_j`.
    pub fn from_columns(columns: &[H1OClass]) -> Self {
        let gaps = columns.first().map(|c| c.gaps.clone()).unwrap_or_default();
        let cols: Vec<Vec<Rational>> = columns.iter().map(|c| c.coords.clone()).collect();
        Self::new(gaps.clone(), RatMatrix::from_columns(gaps.len(), &cols))
    }

    pub fn basis_gaps(&self) -> &[i64] {
        &self.basis_gaps
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis_gaps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn add(&self, other: &HomMatrix) -> HomMatrix {
        assert_eq!(self.basis_gaps, other.basis_gaps);
        Self::new(self.basis_gaps.clone(), self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &HomMatrix) -> HomMatrix {
        assert_eq!(self.basis_gaps, other.basis_gaps);
        Self::new(self.basis_gaps.clone(), self.matrix.sub(&other.matrix))
    }

    pub fn scale(&self, s: &Rational) -> HomMatrix {
        Self::new(self.basis_gaps.clone(), self.matrix.scale(s))
    }

    pub fn neg(&self) -> HomMatrix {
        self.scale(&-Rational::one())
    }

    /// `D · M`, the bilinear form `(ω_i, ω_j) ↦ <ω_i, M ω_j>`.
    pub fn paired(&self, duality: &RatMatrix) -> RatMatrix {
        duality.mul(&self.matrix)
    }

    /// True when `D · M` is symmetric, i.e. `M` is a symmetric map.
    pub fn is_symmetric(&self, duality: &RatMatrix) -> bool {
        self.paired(duality).is_symmetric()
    }

    /// Entries in row-major order as a single vector.
    pub fn vectorize(&self) -> Vec<Rational> {
        self.matrix.entries().to_vec()
    }
}

impl Serialize for HomMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<Vec<String>> = (0..self.matrix.rows())
            .map(|r| self.matrix.row(r).iter().map(format_rational).collect())
            .collect();
        let mut st = serializer.serialize_struct("HomMatrix", 2)?;
        st.serialize_field("basis_gaps", &self.basis_gaps)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for HomMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            basis_gaps: Vec<i64>,
            entries: Vec<Vec<String>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let g = repr.basis_gaps.len();
        if repr.entries.len() != g || repr.entries.iter().any(|r| r.len() != g) {
            return Err(D::Error::custom("entries must be a g×g array"));
        }
        let rows = repr
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(HomMatrix::new(repr.basis_gaps, RatMatrix::from_rows(&rows)))
    }
}

/// Columns `-[op(g_j)]`, reduced in `H¹(O)`.
pub fn rho(op: &DiffOp, exp: &CurveExpansion) -> Result<HomMatrix> {
    let columns = exp
        .h10_basis()
        .iter()
        .map(|g| Ok(reduce_o(&op.apply(g)?, exp)?.scale(&-Rational::one())))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomMatrix::from_columns(&columns))
}

/// Reduces each column series and assembles a matrix, with no sign change.
pub fn hom_from_series(columns: &[LaurentSeries], exp: &CurveExpansion) -> Result<HomMatrix> {
    let classes = columns
        .iter()
        .map(|s| reduce_o(s, exp))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomMatrix::from_columns(&classes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{expand_curve, HyperellipticCurve};
    use crate::rational::int;
    use crate::witt::phi;

    const T: i64 = 64;

    fn genus_two() -> CurveExpansion {
        let c =
            HyperellipticCurve::new([1, 0, 0, 0, 0, 1].iter().map(|&c| int(c)).collect()).unwrap();
        expand_curve(&c, 40).unwrap()
    }

    fn genus_three() -> CurveExpansion {
        let c =
            HyperellipticCurve::new([1, -1, 0, 0, 0, 0, 0, 1].iter().map(|&c| int(c)).collect())
                .unwrap();
        expand_curve(&c, 48).unwrap()
    }

    fn z(e: i64) -> LaurentSeries {
        LaurentSeries::monomial(int(1), e, T)
    }

    /// Serre-duality oracle: the coordinates `c` of `[h]` solve `D c = (<g_i, h>)_i`.
    fn duality_oracle(h: &LaurentSeries, exp: &CurveExpansion) -> Vec<Rational> {
        let d = duality_matrix(exp).unwrap();
        let rhs: Vec<Rational> = exp
            .h10_basis()
            .iter()
            .map(|g| LaurentSeries::symplectic_pair(g, h).unwrap())
            .collect();
        d.solve(&rhs).unwrap()
    }

    #[test]
    fn k0_elements_reduce_to_zero() {
        for exp in [genus_two(), genus_three()] {
            for k in exp.k0_basis() {
                assert!(
                    reduce_o(&k.value, &exp).unwrap().is_zero(),
                    "pole {}",
                    k.pole_order
                );
            }
            for t in exp.theta_basis() {
                assert!(
                    reduce_theta(&t.value, &exp).unwrap().is_zero(),
                    "pole {}",
                    t.pole_order
                );
            }
        }
    }

    #[test]
    fn gap_monomials_are_their_own_representatives() {
        let exp = genus_two();
        assert_eq!(reduce_o(&z(-1), &exp).unwrap().coords(), &[int(1), int(0)]);
        let ks = reduce_theta(&WittElement::new(z(-1)), &exp).unwrap();
        assert_eq!(ks.coords(), &[int(1), int(0), int(0)]);
        assert!(reduce_o(&z(4), &exp).unwrap().is_zero());
    }

    #[test]
    fn sweep_matches_duality_oracle() {
        for exp in [genus_two(), genus_three()] {
            for e in [-5, -7, -9, -11, -13] {
                let class = reduce_o(&z(e), &exp).unwrap();
                assert_eq!(
                    class.coords(),
                    duality_oracle(&z(e), &exp).as_slice(),
                    "z^{e}"
                );
            }
            let mixed = &(&z(-9).scale(&int(3)) + &z(-2)) - &z(-3);
            assert_eq!(
                reduce_o(&mixed, &exp).unwrap().coords(),
                duality_oracle(&mixed, &exp).as_slice()
            );
        }
    }

    /// Expresses the principal part of `ζ` as gap monomials plus theta-basis
    /// principal parts by solving one square linear system.
    fn theta_oracle(zeta: &LaurentSeries, exp: &CurveExpansion) -> Vec<Rational> {
        let p = -zeta.order().unwrap();
        let gaps: Vec<i64> = exp
            .gaps_theta()
            .iter()
            .copied()
            .filter(|&n| n <= p)
            .collect();
        let elems: Vec<&WittElement> = exp
            .theta_basis()
            .iter()
            .filter(|t| t.pole_order <= p)
            .map(|t| &t.value)
            .collect();
        let unknowns = gaps.len() + elems.len();
        assert_eq!(unknowns as i64, p);
        let a = RatMatrix::from_fn(p as usize, unknowns, |r, c| {
            let e = -(r as i64) - 1;
            if c < gaps.len() {
                if gaps[c] == -e {
                    int(1)
                } else {
                    int(0)
                }
            } else {
                elems[c - gaps.len()].coeff.coeff(e).unwrap()
            }
        });
        let b: Vec<Rational> = (0..p).map(|r| zeta.coeff(-r - 1).unwrap()).collect();
        let x = a.solve(&b).unwrap();
        exp.gaps_theta()
            .iter()
            .map(|n| {
                gaps.iter()
                    .position(|m| m == n)
                    .map_or(int(0), |i| x[i].clone())
            })
            .collect()
    }

    #[test]
    fn theta_sweep_matches_linear_algebra() {
        for exp in [genus_two(), genus_three()] {
            for e in [-4, -6, -7, -8, -10, -12] {
                let ks = reduce_theta(&WittElement::new(z(e)), &exp).unwrap();
                assert_eq!(
                    ks.coords(),
                    theta_oracle(&z(e), &exp).as_slice(),
                    "z^{e} d/dz"
                );
            }
        }
    }

    #[test]
    fn reduce_o_is_linear() {
        let exp = genus_three();
        let f = &z(-9) + &z(-4).scale(&int(5));
        let h = &z(-11) - &z(-1);
        let (a, b) = (int(3), Rational::new((-2).into(), 7.into()));
        let lhs = reduce_o(&(&f.scale(&a) + &h.scale(&b)), &exp).unwrap();
        let rhs = reduce_o(&f, &exp)
            .unwrap()
            .scale(&a)
            .add(&reduce_o(&h, &exp).unwrap().scale(&b));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn duality_is_well_defined_and_nondegenerate() {
        let exp = genus_two();
        let d = duality_matrix(&exp).unwrap();
        assert_eq!(
            d,
            RatMatrix::from_rows(&[vec![int(0), int(2)], vec![int(2), int(0)]])
        );
        assert_eq!(d.det(), int(-4));
        // <g_i, z^{-n} + k> = <g_i, z^{-n}> for k in K₀
        for (i, g) in exp.h10_basis().iter().enumerate() {
            for (j, &n) in exp.gaps_o().iter().enumerate() {
                for k in exp.k0_basis().iter().take(6) {
                    let shifted = &z(-n) + &k.value;
                    assert_eq!(
                        LaurentSeries::symplectic_pair(g, &shifted).unwrap(),
                        d[(i, j)]
                    );
                }
                let anti = -LaurentSeries::symplectic_pair(&z(-n), g).unwrap();
                assert_eq!(anti, d[(i, j)]);
            }
        }
        assert_ne!(duality_matrix(&genus_three()).unwrap().det(), int(0));
    }

    #[test]
    fn rho_of_phi_is_symmetric_and_kills_trivial_fields() {
        for exp in [genus_two(), genus_three()] {
            let d = duality_matrix(&exp).unwrap();
            assert!(rho(&DiffOp::zero(), &exp).unwrap().is_zero());
            for e in -7..=4 {
                let m = rho(&phi(&WittElement::new(z(e))), &exp).unwrap();
                assert!(m.is_symmetric(&d), "z^{e} d/dz");
            }
            for t in exp.theta_basis().iter().take(8) {
                assert!(rho(&phi(&t.value), &exp).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn hom_matrix_json_round_trip() {
        let exp = genus_two();
        let m = rho(&phi(&WittElement::new(z(-1))), &exp).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.starts_with(r#"{"basis_gaps":[1,3],"entries":[["#));
        let back: HomMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(
            serde_json::from_str::<HomMatrix>(r#"{"basis_gaps":[1,3],"entries":[["1/1"]]}"#)
                .is_err()
        );
    }

    #[test]
    fn precision_is_reported() {
        let exp = genus_two();
        let short = LaurentSeries::monomial(int(1), -3, 0);
        assert!(matches!(
            reduce_o(&short, &exp),
            Err(Error::PrecisionExhausted(_))
        ));
        let far = LaurentSeries::monomial(int(1), -(exp.cutoff_o() + 1), T);
        assert!(matches!(
            reduce_o(&far, &exp),
            Err(Error::UnreducibleExponent(_))
        ));
    }
}
