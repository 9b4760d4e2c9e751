//! Specialization of a rational point at a prime `p` into an ideal class of
//! `ℚ(√d)`, `d = p³ + ap + b`.
//!
//! For a point `x = k/e²`, `y = m/e³` set `A = k − p·e²` and
//! `B ≡ m·e⁻³ (mod |A|)`. Reducing `m² = k³ + a·k·e⁴ + b·e⁶` modulo `A`
//! (where `k ≡ p·e²`) gives `m² ≡ e⁶·d`, hence `B² ≡ d (mod |A|)` and
//! `[|A|, B + √d]` is an ideal of `ℤ[√d]`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{self, ArithError, Factorization};
use crate::elliptic::{CanonicalPoint, Curve, CurveError, Point};
use crate::quadforms::{self, ClassGroup, ClassNumber, Discriminant, FormError, QuadForm};
use crate::quadorder::{self, FieldData, IdealError, QuadIdeal};

/// Default bound on `d` for computing full class numbers.
pub const DEFAULT_CLASS_NUMBER_LIMIT: u64 = 1_000_000_000;

/// Default cap on powers tried when no class number bounds an order.
pub const DEFAULT_ORDER_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecializeError {
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("prime {0} is below 3")]
    PrimeTooSmall(BigInt),
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("root identity violated: {root}^2 != {d} mod {modulus}")]
    RootIdentityViolated {
        d: BigInt,
        modulus: BigInt,
        root: BigInt,
    },
    #[error("specialization status is {0}, not Ok")]
    NotOk(SpecStatus),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Outcome of specializing at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpecStatus {
    Ok,
    DNonPositive,
    DSquare,
    DNotSquarefree,
    PointAbovePrime,
    NonInvertible,
    NoOddNormRepresentative,
    FactorizationTimeout,
}

impl SpecStatus {
    pub const ALL: [SpecStatus; 8] = [
        SpecStatus::Ok,
        SpecStatus::DNonPositive,
        SpecStatus::DSquare,
        SpecStatus::DNotSquarefree,
        SpecStatus::PointAbovePrime,
        SpecStatus::NonInvertible,
        SpecStatus::NoOddNormRepresentative,
        SpecStatus::FactorizationTimeout,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SpecStatus::Ok => "Ok",
            SpecStatus::DNonPositive => "DNonPositive",
            SpecStatus::DSquare => "DSquare",
            SpecStatus::DNotSquarefree => "DNotSquarefree",
            SpecStatus::PointAbovePrime => "PointAbovePrime",
            SpecStatus::NonInvertible => "NonInvertible",
            SpecStatus::NoOddNormRepresentative => "NoOddNormRepresentative",
            SpecStatus::FactorizationTimeout => "FactorizationTimeout",
        }
    }
}

impl fmt::Display for SpecStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Primes that are not excluded but are worth a second look.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PrimeFlags {
    /// `p` divides the curve discriminant.
    pub bad_reduction: bool,
    /// `p` divides the denominator `e` of the point.
    pub denominator_prime: bool,
}

impl fmt::Display for PrimeFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.bad_reduction, "bad_reduction"),
            (self.denominator_prime, "denominator_prime"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        f.write_str(&names.join(";"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecializeOptions {
    /// Work in `ℤ[√d]` even when `d` is not squarefree.
    pub order_mode: bool,
    pub rho_budget: u64,
}

impl Default for SpecializeOptions {
    fn default() -> Self {
        SpecializeOptions {
            order_mode: false,
            rho_budget: arith::DEFAULT_RHO_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecializationResult {
    pub p: BigInt,
    /// `p³ + ap + b`.
    pub d: BigInt,
    pub d_factorization: Option<Factorization>,
    pub squarefree: Option<bool>,
    /// Discriminant of `ℚ(√d)`, known once `d` is factored.
    pub fundamental_discriminant: Option<BigInt>,
    pub field: Option<FieldData>,
    pub denominator: BigInt,
    /// `A = k − p·e²`, signed.
    pub a_value: Option<BigInt>,
    /// `B = m·(e³)⁻¹ mod |A|`.
    pub root: Option<BigInt>,
    pub ideal: Option<QuadIdeal>,
    /// Form of discriminant `4d` attached to the ideal.
    pub form: Option<QuadForm>,
    /// Reduced image in the maximal order, of discriminant `Δ_K`.
    pub maximal_form: Option<QuadForm>,
    pub status: SpecStatus,
    pub flags: PrimeFlags,
}

fn fundamental_discriminant(factorization: &Factorization) -> BigInt {
    let core = factorization.squarefree_part();
    if core.mod_floor(&BigInt::from(4)).is_one() {
        core
    } else {
        core * 4
    }
}

/// `p³ + ap + b` for a prime `p ≥ 3`.
pub fn discriminant_value(curve: &Curve, p: &BigInt) -> Result<BigInt, SpecializeError> {
    if !arith::is_prime(p) {
        return Err(SpecializeError::NotPrime(p.clone()));
    }
    if p < &BigInt::from(3) {
        return Err(SpecializeError::PrimeTooSmall(p.clone()));
    }
    Ok(p * p * p + curve.a() * p + curve.b())
}

/// Specializes a canonical point at `p`. Invalid fields or degenerate ideals
/// are reported through [`SpecializationResult::status`].
pub fn specialize_point(
    curve: &Curve,
    point: &CanonicalPoint,
    p: &BigInt,
    options: &SpecializeOptions,
) -> Result<SpecializationResult, SpecializeError> {
    let d = discriminant_value(curve, p)?;
    if !point.e.is_positive() || !point.satisfies(curve) {
        return Err(SpecializeError::PointNotOnCurve);
    }
    let mut result = SpecializationResult {
        p: p.clone(),
        d: d.clone(),
        d_factorization: None,
        squarefree: None,
        fundamental_discriminant: None,
        field: None,
        denominator: point.e.clone(),
        a_value: None,
        root: None,
        ideal: None,
        form: None,
        maximal_form: None,
        status: SpecStatus::Ok,
        flags: PrimeFlags {
            bad_reduction: curve.discriminant().is_multiple_of(p),
            denominator_prime: point.e.is_multiple_of(p),
        },
    };

    if !d.is_positive() {
        result.status = SpecStatus::DNonPositive;
        return Ok(result);
    }
    if arith::is_square(&d) {
        result.status = SpecStatus::DSquare;
        return Ok(result);
    }
    let factorization = match arith::factorize_with_budget(&d, options.rho_budget) {
        Ok(f) => f,
        Err(ArithError::FactorizationTimeout { .. }) => {
            result.status = SpecStatus::FactorizationTimeout;
            return Ok(result);
        }
        Err(e) => return Err(e.into()),
    };
    let squarefree = factorization.is_squarefree();
    result.squarefree = Some(squarefree);
    result.fundamental_discriminant = Some(fundamental_discriminant(&factorization));
    result.d_factorization = Some(factorization);
    if squarefree {
        result.field = Some(FieldData::from_squarefree(d.clone()));
    } else if !options.order_mode {
        result.status = SpecStatus::DNotSquarefree;
        return Ok(result);
    }

    let a_value = &point.k - p * &point.e * &point.e;
    if a_value.is_zero() {
        result.status = SpecStatus::PointAbovePrime;
        return Ok(result);
    }
    let modulus = a_value.abs();
    let e_cubed = &point.e * &point.e * &point.e;
    let root = (&point.m * arith::mod_inverse(&e_cubed, &modulus)?).mod_floor(&modulus);
    if !(&root * &root - &d).is_multiple_of(&modulus) {
        return Err(SpecializeError::RootIdentityViolated { d, modulus, root });
    }
    result.a_value = Some(a_value);
    result.root = Some(root.clone());

    let ideal = QuadIdeal::new(d.clone(), modulus, root)?;
    let form = ideal.to_form();
    result.ideal = Some(ideal.clone());
    result.form = Some(form.clone());
    if !form.is_primitive() {
        result.status = SpecStatus::NonInvertible;
        return Ok(result);
    }
    if let Some(field) = &result.field {
        match quadorder::lift_to_maximal(&ideal, field) {
            Ok(f) => result.maximal_form = Some(f),
            Err(IdealError::NoOddNormRepresentative(_)) => {
                result.status = SpecStatus::NoOddNormRepresentative;
                return Ok(result);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictOptions {
    /// Full class numbers are only computed for `d` up to this bound.
    pub class_number_limit: BigInt,
    /// Cap on powers tried when no class number is available.
    pub order_budget: u64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions {
            class_number_limit: BigInt::from(DEFAULT_CLASS_NUMBER_LIMIT),
            order_budget: DEFAULT_ORDER_BUDGET,
        }
    }
}

/// Class data of a successful specialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVerdict {
    /// Narrow order of the class in `Cl(ℤ[√d])`.
    pub order_in_order: Option<u64>,
    /// Narrow order of the image in the class group of the maximal order.
    pub order_in_maximal: Option<u64>,
    pub wide_order_in_order: Option<u64>,
    pub wide_order_in_maximal: Option<u64>,
    /// Whether the headline class is not widely principal.
    pub nontrivial: bool,
    /// `Δ_K` when the maximal order is available, else `4d`.
    pub headline_discriminant: BigInt,
    pub class_number: Option<ClassNumber>,
}

pub fn class_verdict(result: &SpecializationResult) -> Result<ClassVerdict, SpecializeError> {
    class_verdict_with(result, &VerdictOptions::default())
}

/// Orders and wide principality of the specialized class.
pub fn class_verdict_with(
    result: &SpecializationResult,
    options: &VerdictOptions,
) -> Result<ClassVerdict, SpecializeError> {
    if result.status != SpecStatus::Ok {
        return Err(SpecializeError::NotOk(result.status));
    }
    let form = result.form.as_ref().expect("Ok results carry a form");
    let order_group = ClassGroup::new(Discriminant::new(form.discriminant())?);
    let with_class_number = result.d <= options.class_number_limit;

    let (headline_form, maximal_group) = match (&result.maximal_form, &result.field) {
        (Some(max_form), Some(field)) if field.conductor() == 2 => {
            (max_form, Some(ClassGroup::new(field.discriminant())))
        }
        (Some(max_form), Some(_)) => (max_form, None),
        _ => (form, None),
    };
    let headline_group = maximal_group.as_ref().unwrap_or(&order_group);
    let class_number = if with_class_number {
        Some(quadforms::class_number(headline_group.discriminant())?)
    } else {
        None
    };

    let headline_bound = class_number.map_or(options.order_budget, |h| h.narrow);
    // h(ℤ[√d]) ≤ 3·h(O_K) when the conductor is 2.
    let order_bound = match (&maximal_group, class_number) {
        (Some(_), Some(h)) => 3 * h.narrow,
        (Some(_), None) => options.order_budget,
        (None, _) => headline_bound,
    };

    let order_in_order = order_group.order(form, order_bound)?;
    let wide_order_in_order = order_group.wide_order(form, order_bound)?;
    let (order_in_maximal, wide_order_in_maximal) = match (&result.maximal_form, &maximal_group) {
        (Some(max_form), Some(group)) => (
            group.order(max_form, headline_bound)?,
            group.wide_order(max_form, headline_bound)?,
        ),
        (Some(_), None) => (order_in_order, wide_order_in_order),
        (None, _) => (None, None),
    };
    let nontrivial = !headline_group.is_principal_wide(headline_form)?;

    Ok(ClassVerdict {
        order_in_order,
        order_in_maximal,
        wide_order_in_order,
        wide_order_in_maximal,
        nontrivial,
        headline_discriminant: headline_group.discriminant().value().clone(),
        class_number,
    })
}

/// How one multiple fared in [`homomorphism_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomomorphismOutcome {
    /// Class of `I_{nP}` compared with `class(I_P)ⁿ`.
    Compared {
        /// Equal in the wide class group of `ℤ[√d]`.
        wide: bool,
        /// Equal in the narrow class group of `ℤ[√d]`.
        narrow: bool,
        /// Equal in the wide class group of the maximal order, when defined.
        maximal_wide: Option<bool>,
    },
    /// `nP` or `P` did not specialize cleanly.
    Skipped(SpecStatus),
    /// `nP` is the identity.
    AtInfinity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomomorphismRow {
    pub n: i64,
    pub a_value: Option<BigInt>,
    pub outcome: HomomorphismOutcome,
}

impl HomomorphismRow {
    pub fn matches(&self) -> Option<bool> {
        match self.outcome {
            HomomorphismOutcome::Compared { wide, .. } => Some(wide),
            _ => None,
        }
    }
}

fn form_power(f: &QuadForm, n: i64, disc: &Discriminant) -> QuadForm {
    let base = if n < 0 { f.inverse() } else { f.clone() };
    let mut acc = quadforms::principal_form(disc);
    for _ in 0..n.unsigned_abs() {
        acc = quadforms::compose(&acc, &base).expect("same discriminant, primitive");
    }
    acc.reduce_in(disc)
}

/// Compares `class(I_{nP})` with `class(I_P)ⁿ` for each requested `n`.
pub fn homomorphism_check(
    curve: &Curve,
    point: &Point,
    p: &BigInt,
    multiples: &[i64],
    options: &SpecializeOptions,
) -> Result<Vec<HomomorphismRow>, SpecializeError> {
    let base_point = curve.canonicalize(point)?;
    let base = specialize_point(curve, &base_point, p, options)?;
    let mut rows = Vec::with_capacity(multiples.len());
    for &n in multiples {
        let multiple = curve.scalar_mul(&BigInt::from(n), point)?;
        if multiple.is_infinity() {
            rows.push(HomomorphismRow {
                n,
                a_value: None,
                outcome: HomomorphismOutcome::AtInfinity,
            });
            continue;
        }
        let spec = specialize_point(curve, &curve.canonicalize(&multiple)?, p, options)?;
        let outcome = if base.status != SpecStatus::Ok {
            HomomorphismOutcome::Skipped(base.status)
        } else if spec.status != SpecStatus::Ok {
            HomomorphismOutcome::Skipped(spec.status)
        } else {
            compare_classes(&base, &spec, n)?
        };
        rows.push(HomomorphismRow {
            n,
            a_value: spec.a_value.clone(),
            outcome,
        });
    }
    Ok(rows)
}

fn compare_classes(
    base: &SpecializationResult,
    multiple: &SpecializationResult,
    n: i64,
) -> Result<HomomorphismOutcome, SpecializeError> {
    let (Some(f), Some(g)) = (&base.form, &multiple.form) else {
        unreachable!("Ok results carry forms");
    };
    let disc = Discriminant::new(f.discriminant())?;
    let group = ClassGroup::new(disc.clone());
    let quotient = quadforms::compose(g, &form_power(f, n, &disc).inverse())?;
    let maximal_wide = match (&base.maximal_form, &multiple.maximal_form, &base.field) {
        (Some(fm), Some(gm), Some(field)) => {
            let kdisc = field.discriminant();
            let kgroup = ClassGroup::new(kdisc.clone());
            let q = quadforms::compose(gm, &form_power(fm, n, &kdisc).inverse())?;
            Some(kgroup.is_principal_wide(&q)?)
        }
        _ => None,
    };
    Ok(HomomorphismOutcome::Compared {
        wide: group.is_principal_wide(&quotient)?,
        narrow: group.is_principal(&quotient)?,
        maximal_wide,
    })
}

fn opt_string<T: ToString>(v: &Option<T>) -> Value {
    v.as_ref()
        .map_or(Value::Null, |x| Value::String(x.to_string()))
}

pub(crate) fn form_json(f: &QuadForm) -> Value {
    json!({ "a": f.a().to_string(), "b": f.b().to_string(), "c": f.c().to_string() })
}

impl SpecializationResult {
    /// JSON object with integers as decimal strings.
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p.to_string(),
            "d": self.d.to_string(),
            "d_factorization": opt_string(&self.d_factorization),
            "squarefree": self.squarefree,
            "fundamental_discriminant": opt_string(&self.fundamental_discriminant),
            "e": self.denominator.to_string(),
            "A": opt_string(&self.a_value),
            "B": opt_string(&self.root),
            "ideal": self.ideal.as_ref().map(|i| json!({
                "d": i.d().to_string(),
                "norm": i.norm().to_string(),
                "root": i.root().to_string(),
            })),
            "form": self.form.as_ref().map(form_json),
            "maximal_form": self.maximal_form.as_ref().map(form_json),
            "status": self.status.as_str(),
            "flags": {
                "bad_reduction": self.flags.bad_reduction,
                "denominator_prime": self.flags.denominator_prime,
            },
        })
    }
}

impl ClassVerdict {
    pub fn to_json(&self) -> Value {
        let num = |v: Option<u64>| v.map_or(Value::Null, |x| Value::String(x.to_string()));
        json!({
            "order_in_order_class_group": num(self.order_in_order),
            "order_in_maximal": num(self.order_in_maximal),
            "wide_order_in_order_class_group": num(self.wide_order_in_order),
            "wide_order_in_maximal": num(self.wide_order_in_maximal),
            "nontrivial": self.nontrivial,
            "headline_discriminant": self.headline_discriminant.to_string(),
            "h_narrow": num(self.class_number.map(|h| h.narrow)),
            "h_wide": num(self.class_number.map(|h| h.wide)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_curve() -> (Curve, CanonicalPoint) {
        let curve = Curve::new(0, -2).unwrap();
        let point = curve.canonicalize(&Point::from_integers(3, 5)).unwrap();
        (curve, point)
    }

    #[test]
    fn discriminant_value_examples() {
        let (curve, _) = worked_curve();
        assert_eq!(discriminant_value(&curve, &5.into()).unwrap(), 123.into());
        assert_eq!(discriminant_value(&curve, &3.into()).unwrap(), 25.into());
        assert_eq!(discriminant_value(&curve, &7.into()).unwrap(), 341.into());
        assert!(matches!(
            discriminant_value(&curve, &9.into()),
            Err(SpecializeError::NotPrime(_))
        ));
        assert!(matches!(
            discriminant_value(&curve, &2.into()),
            Err(SpecializeError::PrimeTooSmall(_))
        ));
    }

    #[test]
    fn specialize_at_five() {
        let (curve, point) = worked_curve();
        let r = specialize_point(&curve, &point, &5.into(), &SpecializeOptions::default()).unwrap();
        assert_eq!(r.status, SpecStatus::Ok);
        assert_eq!(r.d, 123.into());
        assert_eq!(r.a_value, Some((-2).into()));
        assert_eq!(r.root, Some(1.into()));
        assert_eq!(r.ideal, Some(QuadIdeal::new(123, 2, 1).unwrap()));
        assert_eq!(r.fundamental_discriminant, Some(492.into()));
        let v = class_verdict(&r).unwrap();
        assert!(!v.nontrivial);
        assert_eq!(v.wide_order_in_maximal, Some(1));
    }

    #[test]
    fn specialize_at_three_is_square() {
        let (curve, point) = worked_curve();
        let r = specialize_point(&curve, &point, &3.into(), &SpecializeOptions::default()).unwrap();
        assert_eq!(r.status, SpecStatus::DSquare);
        assert_eq!(r.a_value, None);
        assert!(r.flags.bad_reduction);
        assert!(matches!(
            class_verdict(&r),
            Err(SpecializeError::NotOk(SpecStatus::DSquare))
        ));
    }

    #[test]
    fn specialize_at_seven() {
        let (curve, point) = worked_curve();
        let r = specialize_point(&curve, &point, &7.into(), &SpecializeOptions::default()).unwrap();
        assert_eq!(r.status, SpecStatus::Ok);
        assert_eq!(r.a_value, Some((-4).into()));
        assert_eq!(r.root, Some(1.into()));
        assert_eq!(r.form, Some(QuadForm::new(4, 2, -85).unwrap()));
        assert_eq!(r.field.as_ref().unwrap().conductor(), 2);
        assert_eq!(r.maximal_form.as_ref().unwrap().discriminant(), 341.into());
    }

    #[test]
    fn unit_ideal_is_trivial() {
        // (4, 9) on y² = x³ + 17 sits at A = −1 over p = 5, d = 142 = 2·71.
        let curve = Curve::new(0, 17).unwrap();
        let point = curve.canonicalize(&Point::from_integers(4, 9)).unwrap();
        let r = specialize_point(&curve, &point, &5.into(), &SpecializeOptions::default()).unwrap();
        assert_eq!(r.status, SpecStatus::Ok);
        assert_eq!(r.ideal, Some(QuadIdeal::unit(142).unwrap()));
        let v = class_verdict(&r).unwrap();
        assert!(!v.nontrivial);
        assert_eq!(v.order_in_order, Some(1));
        assert_eq!(v.order_in_maximal, Some(1));
    }

    #[test]
    fn order_mode_keeps_non_squarefree_d() {
        // (2, 5) over p = 3: d = 44 = 2²·11, A = −1.
        let curve = Curve::new(0, 17).unwrap();
        let point = curve.canonicalize(&Point::from_integers(2, 5)).unwrap();
        let r = specialize_point(&curve, &point, &3.into(), &SpecializeOptions::default()).unwrap();
        assert_eq!(r.status, SpecStatus::DNotSquarefree);
        assert_eq!(r.fundamental_discriminant, Some(44.into()));

        let opts = SpecializeOptions {
            order_mode: true,
            ..Default::default()
        };
        let r = specialize_point(&curve, &point, &3.into(), &opts).unwrap();
        assert_eq!(r.status, SpecStatus::Ok);
        assert_eq!(r.maximal_form, None);
        let v = class_verdict(&r).unwrap();
        assert!(!v.nontrivial);
        assert_eq!(v.order_in_order, Some(1));
        assert_eq!(v.order_in_maximal, None);
        assert_eq!(v.headline_discriminant, 176.into());
    }

    #[test]
    fn flags_render() {
        let f = PrimeFlags {
            bad_reduction: true,
            denominator_prime: true,
        };
        assert_eq!(f.to_string(), "bad_reduction;denominator_prime");
        assert_eq!(PrimeFlags::default().to_string(), "");
    }
}
