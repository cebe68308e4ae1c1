//! The invariant suite: one runner per acceptance criterion, shared by the
//! `periodmap check` command and the acceptance test target.
//!
//! Every comparison is exact equality over the rationals. Randomized checks
//! draw from a ChaCha stream seeded per criterion, so reports are reproducible.

use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{expand_curve, CurveExpansion, CurveInput, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::hodge::{duality_matrix, reduce_theta, HomMatrix};
use crate::laurent::LaurentSeries;
use crate::linalg::RatMatrix;
use crate::period::{
    ell1_n, ell1_n_contraction, ell2, ell2_via_lie, fundamental_form_ii, in_nu1_span, nu1, nu2,
    T2Rep, COMMUTATOR_SIGN,
};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::witt::{
    phi, phi_symmetric_expansion, sp_witness, symmetric_tensor_action, witt_bracket, WittElement,
};

/// Truncation given to exact monomials and random fields.
pub const FIELD_TRUNC: i64 = 64;

/// Regression values a fixture may pin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedInvariants {
    pub gaps_o: Vec<i64>,
    pub gaps_theta: Vec<i64>,
    pub duality_det: String,
    /// `y` through `z^{2g+1}`, the first exponent every coefficient of `p` reaches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_head: Option<LaurentSeries>,
}

/// Fixture JSON: a curve input plus optional name and pinned invariants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub curve: CurveInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedInvariants>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub curve: HyperellipticCurve,
    pub precision: i64,
    pub expected: Option<ExpectedInvariants>,
}

impl Fixture {
    pub fn from_input(input: &FixtureInput) -> Result<Self> {
        let curve = HyperellipticCurve::from_input(&input.curve)?;
        let precision = input
            .curve
            .precision
            .unwrap_or_else(|| curve.default_precision());
        Ok(Fixture {
            name: input
                .name
                .clone()
                .unwrap_or_else(|| format!("genus {} curve", curve.genus())),
            curve,
            precision,
            expected: input.expected.clone(),
        })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let input: FixtureInput =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_input(&input)
    }
}

/// The two reference curves `y² = x⁵ + 1` and `y² = x⁷ - x + 1`.
pub fn default_fixtures() -> Vec<Fixture> {
    [
        include_str!("../fixtures/genus2.json"),
        include_str!("../fixtures/genus3.json"),
    ]
    .iter()
    .map(|json| Fixture::from_json(json).expect("bundled fixtures are valid"))
    .collect()
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub seed: u64,
    pub max_order: usize,
    /// Replaces every fixture's precision when set.
    pub precision: Option<i64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0x5eed_2024,
            max_order: crate::period::DEFAULT_MAX_ORDER,
            precision: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: &'static str,
    pub title: &'static str,
    pub status: Status,
    pub millis: u128,
    pub detail: String,
    #[serde(skip)]
    pub error: Option<Error>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `A7 PASS route equivalence (12 ms): …`
    pub fn line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        format!(
            "{} {} {} ({} ms): {}",
            self.id, status, self.title, self.millis, self.detail
        )
    }
}

/// Outcome of one criterion before timing is attached.
struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

/// A matrix produced by A6–A10, kept for the symmetry criterion.
struct Produced {
    kind: &'static str,
    label: String,
    matrix: HomMatrix,
    fixture: usize,
}

struct Context {
    fixtures: Vec<(Fixture, CurveExpansion, RatMatrix)>,
    config: CheckConfig,
}

impl Context {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

pub const CRITERIA: [(&str, &str); 12] = [
    ("A1", "phi is a Lie homomorphism"),
    ("A2", "phi lands in sp"),
    ("A3", "symmetric-square embedding"),
    ("A4", "curve expansion"),
    ("A5", "Serre duality"),
    ("A6", "nu1 well-defined"),
    ("A7", "route equivalence"),
    ("A8", "commutator identity"),
    ("A9", "second-order representative"),
    ("A10", "higher order"),
    ("A11", "symmetry of targets"),
    ("A12", "II factorization"),
];

/// Runs A1–A12 on the given fixtures. Setup failures (e.g. a precision below
/// the floor) are returned as `Err`; failures inside a criterion are reported.
pub fn run_all(fixtures: &[Fixture], config: &CheckConfig) -> Result<Vec<CheckReport>> {
    let ids: Vec<&str> = CRITERIA.iter().map(|(id, _)| *id).collect();
    run_selected(fixtures, config, &ids)
}

/// Runs the listed criteria, in suite order. A11 inspects the matrices of
/// A6–A10, so selecting it runs those too without reporting them.
pub fn run_selected(
    fixtures: &[Fixture],
    config: &CheckConfig,
    selected: &[&str],
) -> Result<Vec<CheckReport>> {
    if let Some(bad) = selected
        .iter()
        .find(|id| !CRITERIA.iter().any(|(c, _)| c == *id))
    {
        return Err(Error::InvalidArgument(format!("unknown criterion {bad}")));
    }
    let wanted = |id: &str| selected.contains(&id);
    let feeds_a11 = |id: &str| wanted("A11") && ["A6", "A7", "A8", "A9", "A10"].contains(&id);
    let mut prepared = Vec::new();
    for f in fixtures {
        let precision = config.precision.unwrap_or(f.precision);
        let exp = expand_curve(&f.curve, precision)?;
        let d = duality_matrix(&exp)?;
        prepared.push((f.clone(), exp, d));
    }
    let ctx = Context {
        fixtures: prepared,
        config: config.clone(),
    };
    let mut produced: Vec<Produced> = Vec::new();
    let mut reports = Vec::new();
    for (id, title) in CRITERIA {
        if !wanted(id) && !feeds_a11(id) {
            continue;
        }
        let start = Instant::now();
        let result = match id {
            "A1" => check_a1(&ctx),
            "A2" => check_a2(&ctx),
            "A3" => check_a3(&ctx),
            "A4" => check_a4(&ctx),
            "A5" => check_a5(&ctx),
            "A6" => check_a6(&ctx, &mut produced),
            "A7" => check_a7(&ctx, &mut produced),
            "A8" => check_a8(&ctx, &mut produced),
            "A9" => check_a9(&ctx, &mut produced),
            "A10" => check_a10(&ctx, &mut produced),
            "A11" => check_a11(&ctx, &produced),
            "A12" => check_a12(&ctx),
            _ => unreachable!(),
        };
        let millis = start.elapsed().as_millis();
        if !wanted(id) {
            continue;
        }
        reports.push(match result {
            Ok(o) => CheckReport {
                id,
                title,
                status: if o.passed { Status::Pass } else { Status::Fail },
                millis,
                detail: o.detail,
                error: None,
            },
            Err(e) => CheckReport {
                id,
                title,
                status: Status::Error,
                millis,
                detail: e.to_string(),
                error: Some(e),
            },
        });
    }
    Ok(reports)
}

fn small_rational(rng: &mut impl Rng) -> Rational {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-3i64..=3);
    }
    Rational::new(num.into(), rng.gen_range(1i64..=2).into())
}

/// A field with one to three terms, exponents in `[-range, range]`.
pub fn random_sparse_field(rng: &mut impl Rng, range: i64) -> WittElement {
    let terms = rng.gen_range(1..=3);
    let series = LaurentSeries::from_terms(
        (0..terms).map(|_| (rng.gen_range(-range..=range), small_rational(rng))),
        FIELD_TRUNC,
    );
    if series.is_zero() {
        return random_sparse_field(rng, range);
    }
    WittElement::new(series)
}

pub fn monomial_field(exp: i64) -> WittElement {
    WittElement::monomial(Rational::from_integer(1.into()), exp, FIELD_TRUNC)
}

fn z(exp: i64) -> LaurentSeries {
    LaurentSeries::monomial(Rational::from_integer(1.into()), exp, FIELD_TRUNC)
}

fn check_a1(_ctx: &Context) -> Result<Outcome> {
    let mut count = 0;
    for a in -5..=5 {
        for b in -5..=5 {
            let (fa, fb) = (monomial_field(a), monomial_field(b));
            let lhs = phi(&witt_bracket(&fa, &fb));
            let rhs = phi(&fa)
                .compose(&phi(&fb))
                .sub(&phi(&fb).compose(&phi(&fa)));
            if !lhs.agrees_with(&rhs) {
                return Ok(Outcome::new(
                    false,
                    format!("mismatch at z^{a} d/dz, z^{b} d/dz"),
                ));
            }
            count += 1;
        }
    }
    Ok(Outcome::new(true, format!("{count} monomial pairs")))
}

fn check_a2(ctx: &Context) -> Result<Outcome> {
    let mut rng = ctx.rng(2);
    for i in 0..50 {
        let zeta = random_sparse_field(&mut rng, 5);
        if !sp_witness(&phi(&zeta), 8)? {
            return Ok(Outcome::new(
                false,
                format!("sample {i} fails: {}", zeta.coeff),
            ));
        }
    }
    Ok(Outcome::new(true, "50 random fields, window 8"))
}

fn check_a3(_ctx: &Context) -> Result<Outcome> {
    let mut count = 0;
    for k in -4..=4 {
        let tensor = phi_symmetric_expansion(k, 16, FIELD_TRUNC);
        let op = phi(&monomial_field(k + 1));
        for m in (-8..=8).filter(|m| *m != 0) {
            let via_tensor = symmetric_tensor_action(&tensor, &z(m))?.drop_constant();
            let via_phi = op.apply(&z(m))?.drop_constant();
            if !via_tensor.agrees_with(&via_phi) {
                return Ok(Outcome::new(
                    false,
                    format!("k = {k}, m = {m}: {via_tensor} vs {via_phi}"),
                ));
            }
            count += 1;
        }
    }
    Ok(Outcome::new(
        true,
        format!("{count} (k, m) pairs, modulo constants"),
    ))
}

fn check_a4(ctx: &Context) -> Result<Outcome> {
    let mut notes = Vec::new();
    for (f, exp, _) in &ctx.fixtures {
        let g = exp.genus();
        if !exp.check_curve_equation() {
            return Ok(Outcome::new(false, format!("{}: y² ≠ p(x)", f.name)));
        }
        let window: Vec<&LaurentSeries> = exp
            .k0_basis()
            .iter()
            .filter(|k| k.pole_order <= 4 * g as i64 + 2)
            .map(|k| &k.value)
            .collect();
        for (i, a) in window.iter().enumerate() {
            for b in &window[i..] {
                if !LaurentSeries::symplectic_pair(a, b)?.is_zero() {
                    return Ok(Outcome::new(false, format!("{}: <K0, K0> ≠ 0", f.name)));
                }
            }
            for gi in exp.h10_basis() {
                if !LaurentSeries::symplectic_pair(a, gi)?.is_zero() {
                    return Ok(Outcome::new(false, format!("{}: <K0, g_i> ≠ 0", f.name)));
                }
            }
        }
        if exp.gaps_o().len() != g || exp.gaps_theta().len() != 3 * g - 3 {
            return Ok(Outcome::new(false, format!("{}: gap counts", f.name)));
        }
        if let Some(e) = &f.expected {
            if e.gaps_o != exp.gaps_o() || e.gaps_theta != exp.gaps_theta() {
                return Ok(Outcome::new(
                    false,
                    format!("{}: gap sequences differ from the fixture", f.name),
                ));
            }
            if let Some(head) = &e.y_head {
                if exp.y_series().with_trunc(head.trunc()) != *head {
                    return Ok(Outcome::new(
                        false,
                        format!("{}: y expansion differs from the fixture", f.name),
                    ));
                }
            }
        }
        notes.push(format!("g={g}: {} K0 elements", window.len()));
    }
    Ok(Outcome::new(true, notes.join("; ")))
}

fn check_a5(ctx: &Context) -> Result<Outcome> {
    let mut notes = Vec::new();
    for (f, _, d) in &ctx.fixtures {
        let det = d.det();
        if det.is_zero() {
            return Ok(Outcome::new(
                false,
                format!("{}: duality matrix is singular", f.name),
            ));
        }
        if let Some(e) = &f.expected {
            let pinned = parse_rational(&e.duality_det)?;
            if pinned != det {
                return Ok(Outcome::new(
                    false,
                    format!(
                        "{}: det {} differs from pinned {}",
                        f.name,
                        format_rational(&det),
                        e.duality_det
                    ),
                ));
            }
        }
        notes.push(format!("det {}", format_rational(&det)));
    }
    Ok(Outcome::new(true, notes.join("; ")))
}

fn check_a6(ctx: &Context, produced: &mut Vec<Produced>) -> Result<Outcome> {
    let mut rng = ctx.rng(6);
    let mut count = 0;
    for (fi, (f, exp, _)) in ctx.fixtures.iter().enumerate() {
        let mut trivial: Vec<WittElement> =
            exp.theta_basis().iter().map(|t| t.value.clone()).collect();
        trivial.push(monomial_field(3));
        trivial.push(monomial_field(4));
        for t in &trivial {
            let m = nu1(t, exp)?;
            if !m.is_zero() {
                return Ok(Outcome::new(
                    false,
                    format!("{}: nu1 ≠ 0 on {}", f.name, t.coeff),
                ));
            }
            produced.push(Produced {
                kind: "nu1",
                label: format!("{} nu1({})", f.name, t.coeff),
                matrix: m,
                fixture: fi,
            });
            count += 1;
        }
        for _ in 0..10 {
            let zeta = random_sparse_field(&mut rng, 5);
            let mut moved = zeta.clone();
            for _ in 0..3 {
                let t = &trivial[rng.gen_range(0..trivial.len())];
                moved = moved.add(&t.scale(&small_rational(&mut rng)));
            }
            let (a, b) = (nu1(&zeta, exp)?, nu1(&moved, exp)?);
            if a != b || reduce_theta(&zeta, exp)? != reduce_theta(&moved, exp)? {
                return Ok(Outcome::new(
                    false,
                    format!("{}: nu1 changes along the trivial span", f.name),
                ));
            }
            produced.push(Produced {
                kind: "nu1",
                label: format!("{} nu1({})", f.name, zeta.coeff),
                matrix: a,
                fixture: fi,
            });
            count += 1;
        }
    }
    Ok(Outcome::new(true, format!("{count} fields")))
}

fn check_a7(ctx: &Context, produced: &mut Vec<Produced>) -> Result<Outcome> {
    let mut count = 0;
    for (fi, (f, exp, _)) in ctx.fixtures.iter().enumerate() {
        for a in -6..=6 {
            for b in -6..=6 {
                let (fa, fb) = (monomial_field(a), monomial_field(b));
                let op = ell2(&fa, &fb, exp)?;
                let lie = ell2_via_lie(&fa, &fb, exp)?;
                if op != lie {
                    return Ok(Outcome::new(
                        false,
                        format!("{}: routes differ at ({a}, {b})", f.name),
                    ));
                }
                produced.push(Produced {
                    kind: "ell2",
                    label: format!("{} ell2(z^{a}, z^{b})", f.name),
                    matrix: op,
                    fixture: fi,
                });
                count += 1;
            }
        }
    }
    Ok(Outcome::new(true, format!("{count} monomial pairs")))
}

fn check_a8(ctx: &Context, produced: &mut Vec<Produced>) -> Result<Outcome> {
    let mut rng = ctx.rng(8);
    let mut found_sign: Option<i64> = None;
    let mut count = 0;
    for (fi, (f, exp, _)) in ctx.fixtures.iter().enumerate() {
        for _ in 0..60 {
            let (a, b) = (
                random_sparse_field(&mut rng, 5),
                random_sparse_field(&mut rng, 5),
            );
            let diff = ell2(&a, &b, exp)?.sub(&ell2(&b, &a, exp)?);
            let br = nu1(&witt_bracket(&a, &b), exp)?;
            let s = if diff.is_zero() && br.is_zero() {
                None
            } else if diff == br {
                Some(1)
            } else if diff == br.neg() {
                Some(-1)
            } else {
                return Ok(Outcome::new(
                    false,
                    format!("{}: difference is not ±nu1 of the bracket", f.name),
                ));
            };
            if let Some(s) = s {
                if *found_sign.get_or_insert(s) != s {
                    return Ok(Outcome::new(false, "sign is not global"));
                }
            }
            produced.push(Produced {
                kind: "ell2 commutator",
                label: format!("{} ell2 commutator", f.name),
                matrix: diff,
                fixture: fi,
            });
            count += 1;
        }
    }
    match found_sign {
        Some(s) if s == COMMUTATOR_SIGN => {
            Ok(Outcome::new(true, format!("{count} pairs, s = {s:+}")))
        }
        Some(s) => Ok(Outcome::new(
            false,
            format!("observed s = {s:+}, pinned {COMMUTATOR_SIGN:+}"),
        )),
        None => Ok(Outcome::new(false, "no pair determined the sign")),
    }
}

fn check_a9(ctx: &Context, produced: &mut Vec<Produced>) -> Result<Outcome> {
    let mut rng = ctx.rng(9);
    let mut count = 0;
    for (fi, (f, exp, _)) in ctx.fixtures.iter().enumerate() {
        for _ in 0..25 {
            let (zeta, xi) = (
                random_sparse_field(&mut rng, 5),
                random_sparse_field(&mut rng, 5),
            );
            let rep = T2Rep::lemma_representative(&zeta, &xi);
            let m = nu2(&rep, exp)?;
            if m != ell2(&zeta, &xi, exp)? {
                return Ok(Outcome::new(
                    false,
                    format!("{}: nu2 ≠ ell2 on ({}, {})", f.name, zeta.coeff, xi.coeff),
                ));
            }
            produced.push(Produced {
                kind: "nu2",
                label: format!("{} nu2", f.name),
                matrix: m,
                fixture: fi,
            });
            count += 1;
        }
    }
    Ok(Outcome::new(true, format!("{count} pairs")))
}

fn check_a10(ctx: &Context, produced: &mut Vec<Produced>) -> Result<Outcome> {
    let mut rng = ctx.rng(10);
    let max = ctx.config.max_order;
    let mut count = 0;
    for (fi, (f, exp, _)) in ctx.fixtures.iter().enumerate() {
        for _ in 0..5 {
            let (a, b) = (
                random_sparse_field(&mut rng, 5),
                random_sparse_field(&mut rng, 5),
            );
            if ell1_n(std::slice::from_ref(&a), exp, max)? != nu1(&a, exp)?
                || ell1_n(&[a.clone(), b.clone()], exp, max)? != ell2(&a, &b, exp)?
            {
                return Ok(Outcome::new(
                    false,
                    format!("{}: n = 1, 2 specialization", f.name),
                ));
            }
        }
        for _ in 0..20 {
            let fields: Vec<WittElement> = (0..3)
                .map(|_| monomial_field(rng.gen_range(-3..=3)))
                .collect();
            let op = ell1_n(&fields, exp, max)?;
            if op != ell1_n_contraction(&fields, exp, max)? {
                let exps: Vec<String> = fields.iter().map(|w| w.coeff.to_string()).collect();
                return Ok(Outcome::new(
                    false,
                    format!("{}: n = 3 routes differ on {exps:?}", f.name),
                ));
            }
            produced.push(Produced {
                kind: "ell1_3",
                label: format!("{} ell1_3", f.name),
                matrix: op,
                fixture: fi,
            });
            count += 1;
        }
    }
    Ok(Outcome::new(true, format!("{count} triples plus n = 1, 2")))
}

fn check_a11(ctx: &Context, produced: &[Produced]) -> Result<Outcome> {
    let mut kinds: Vec<(&str, usize, usize)> = Vec::new();
    let mut first_bad: Option<&str> = None;
    for p in produced {
        let symmetric = p.matrix.is_symmetric(&ctx.fixtures[p.fixture].2);
        if !symmetric && first_bad.is_none() {
            first_bad = Some(&p.label);
        }
        match kinds.iter_mut().find(|(k, _, _)| *k == p.kind) {
            Some(entry) => {
                entry.1 += usize::from(!symmetric);
                entry.2 += 1;
            }
            None => kinds.push((p.kind, usize::from(!symmetric), 1)),
        }
    }
    let summary: Vec<String> = kinds
        .iter()
        .map(|(k, bad, total)| format!("{k} {}/{total}", total - bad))
        .collect();
    let detail = format!("symmetric D·M: {}", summary.join(", "));
    Ok(match first_bad {
        None => Outcome::new(true, detail),
        Some(label) => Outcome::new(false, format!("{detail}; first failure {label}")),
    })
}

fn check_a12(ctx: &Context) -> Result<Outcome> {
    let mut rng = ctx.rng(12);
    let mut count = 0;
    for (f, exp, _) in &ctx.fixtures {
        for _ in 0..10 {
            let (a, b) = (
                random_sparse_field(&mut rng, 5),
                random_sparse_field(&mut rng, 5),
            );
            let ii = fundamental_form_ii(&a, &b, exp)?;
            let diff = ii.representative.sub(&ell2(&a, &b, exp)?);
            if !in_nu1_span(&diff, exp)? {
                return Ok(Outcome::new(
                    false,
                    format!("{}: II - ell2 outside the nu1 span", f.name),
                ));
            }
            count += 1;
        }
    }
    Ok(Outcome::new(true, format!("{count} pairs")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fixtures_parse() {
        let f = default_fixtures();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].curve.genus(), 2);
        assert_eq!(f[1].precision, 48);
        assert_eq!(f[1].expected.as_ref().unwrap().duality_det, "-8/1");
    }

    #[test]
    fn random_fields_are_reproducible() {
        let a = random_sparse_field(&mut ChaCha8Rng::seed_from_u64(7), 5);
        let b = random_sparse_field(&mut ChaCha8Rng::seed_from_u64(7), 5);
        assert_eq!(a, b);
        assert!(!a.coeff.is_zero());
    }
}
