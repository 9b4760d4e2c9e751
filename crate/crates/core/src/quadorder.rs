//! Ideals `[a, B + √d]` of the order `ℤ[√d]`, their dictionary with forms of
//! discriminant `4d`, and the extension of ideal classes to the maximal order
//! of `ℚ(√d)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::quadforms::{ClassGroup, Discriminant, FormError, QuadForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("d = {0} must be a positive nonsquare")]
    InvalidRadicand(BigInt),
    #[error("ideal norm must be positive, got {0}")]
    NonPositiveNorm(BigInt),
    #[error("{norm} does not divide {root}^2 - {d}")]
    NotAnIdeal {
        d: BigInt,
        norm: BigInt,
        root: BigInt,
    },
    #[error("form discriminant {found} is not 4d = {expected}")]
    DiscriminantMismatch { expected: BigInt, found: BigInt },
    #[error("d = {0} is not squarefree")]
    NotSquarefree(BigInt),
    #[error("no odd-norm representative in the cycle of {0}")]
    NoOddNormRepresentative(QuadForm),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The ℤ-module `aℤ + (B + √d)ℤ`, stored with `0 ≤ B < a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadIdeal {
    d: BigInt,
    norm: BigInt,
    root: BigInt,
}

impl fmt::Display for QuadIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}+sqrt({})]", self.norm, self.root, self.d)
    }
}

fn check_radicand(d: &BigInt) -> Result<(), IdealError> {
    if !d.is_positive() || arith::is_square(d) {
        return Err(IdealError::InvalidRadicand(d.clone()));
    }
    Ok(())
}

impl QuadIdeal {
    /// Normalizes `root` modulo `norm` and checks `norm | root² − d`.
    pub fn new(
        d: impl Into<BigInt>,
        norm: impl Into<BigInt>,
        root: impl Into<BigInt>,
    ) -> Result<Self, IdealError> {
        let (d, norm, root) = (d.into(), norm.into(), root.into());
        check_radicand(&d)?;
        if !norm.is_positive() {
            return Err(IdealError::NonPositiveNorm(norm));
        }
        let root = root.mod_floor(&norm);
        if !(&root * &root - &d).is_multiple_of(&norm) {
            return Err(IdealError::NotAnIdeal { d, norm, root });
        }
        Ok(QuadIdeal { d, norm, root })
    }

    /// The whole ring `[1, 0 + √d]`.
    pub fn unit(d: impl Into<BigInt>) -> Result<Self, IdealError> {
        QuadIdeal::new(d, 1, 0)
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn norm(&self) -> &BigInt {
        &self.norm
    }

    pub fn root(&self) -> &BigInt {
        &self.root
    }

    /// `(a, 2B, (B² − d)/a)`, of discriminant `4d`.
    pub fn to_form(&self) -> QuadForm {
        let four_d = BigInt::from(4) * &self.d;
        QuadForm::from_ab(self.norm.clone(), BigInt::from(2) * &self.root, &four_d)
    }

    pub fn is_invertible(&self) -> bool {
        self.to_form().is_primitive()
    }
}

pub fn ideal_to_form(ideal: &QuadIdeal) -> QuadForm {
    ideal.to_form()
}

/// An ideal in the class of `f`, which must have discriminant `4d`. Forms
/// with negative leading coefficient are first moved along their ρ-cycle.
pub fn form_to_ideal(f: &QuadForm, d: &BigInt) -> Result<QuadIdeal, IdealError> {
    check_radicand(d)?;
    let expected = BigInt::from(4) * d;
    let found = f.discriminant();
    if found != expected {
        return Err(IdealError::DiscriminantMismatch { expected, found });
    }
    let disc = Discriminant::new(expected)?;
    let positive = if f.a().is_positive() {
        f.clone()
    } else {
        let reduced = f.reduce_in(&disc);
        reduced
            .cycle_in(&disc)
            .into_iter()
            .find(|g| g.a().is_positive())
            .expect("reduced cycles alternate the sign of a")
    };
    QuadIdeal::new(d.clone(), positive.a().clone(), positive.b() / 2)
}

/// Whether the ideal has a single generator, i.e. its form represents ±1.
pub fn is_principal_wide(ideal: &QuadIdeal) -> Result<bool, IdealError> {
    let form = ideal.to_form();
    if !form.is_primitive() {
        return Err(FormError::ImprimitiveForm(form).into());
    }
    let disc = Discriminant::new(form.discriminant())?;
    let cycle = form.reduce_in(&disc).cycle_in(&disc);
    Ok(cycle.iter().any(|g| g.a().abs().is_one()))
}

/// Data of `K = ℚ(√d)` for squarefree `d > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldData {
    d: BigInt,
    fundamental_discriminant: BigInt,
    conductor: u32,
}

impl FieldData {
    pub fn new(d: impl Into<BigInt>) -> Result<Self, IdealError> {
        let d = d.into();
        check_radicand(&d)?;
        if !arith::is_squarefree(&d)? {
            return Err(IdealError::NotSquarefree(d));
        }
        Ok(Self::from_squarefree(d))
    }

    /// Skips the squarefree check; the caller has already factored `d`.
    pub(crate) fn from_squarefree(d: BigInt) -> Self {
        if d.mod_floor(&BigInt::from(4)).is_one() {
            FieldData {
                fundamental_discriminant: d.clone(),
                d,
                conductor: 2,
            }
        } else {
            FieldData {
                fundamental_discriminant: BigInt::from(4) * &d,
                d,
                conductor: 1,
            }
        }
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn fundamental_discriminant(&self) -> &BigInt {
        &self.fundamental_discriminant
    }

    /// Index of `ℤ[√d]` in the maximal order: 2 if `d ≡ 1 (mod 4)`, else 1.
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn discriminant(&self) -> Discriminant {
        Discriminant::new(self.fundamental_discriminant.clone())
            .expect("fundamental discriminant of a real quadratic field")
    }
}

/// Image of the class of `ideal` under extension to the maximal order,
/// as a reduced form of discriminant `Δ_K`.
///
/// With conductor 2 the extension of a class is computed from an odd-norm
/// representative: `[a, B + √d]` with `a` odd maps to `(a, b', ·)` where
/// `b' ≡ B (mod a)` and `b'` is odd.
pub fn lift_to_maximal(ideal: &QuadIdeal, field: &FieldData) -> Result<QuadForm, IdealError> {
    if ideal.d() != field.d() {
        return Err(IdealError::DiscriminantMismatch {
            expected: field.d() * 4,
            found: ideal.d() * 4,
        });
    }
    let form = ideal.to_form();
    if !form.is_primitive() {
        return Err(FormError::ImprimitiveForm(form).into());
    }
    let target = field.discriminant();
    if field.conductor() == 1 {
        return Ok(form.reduce_in(&target));
    }
    let order_disc = Discriminant::new(form.discriminant())?;
    let odd = if form.a().is_odd() {
        form
    } else {
        let reduced = form.reduce_in(&order_disc);
        reduced
            .cycle_in(&order_disc)
            .into_iter()
            .find(|g| g.a().is_odd())
            .ok_or(IdealError::NoOddNormRepresentative(reduced))?
    };
    let a = odd.a().clone();
    let half_b = odd.b() / 2;
    // b' = B + a(B − 1) is odd and congruent to B mod a.
    let b_prime: BigInt = &half_b + &a * (&half_b - 1);
    debug_assert!(b_prime.is_odd());
    Ok(QuadForm::from_ab(a, b_prime, target.value()).reduce_in(&target))
}

/// Principality of a lifted class in the maximal order, in the wide sense.
pub fn is_principal_wide_in_field(form: &QuadForm, field: &FieldData) -> Result<bool, IdealError> {
    Ok(ClassGroup::new(field.discriminant()).is_principal_wide(form)?)
}

/// Convenience: a radicand's field data when it is squarefree, else `None`.
pub fn field_if_squarefree(d: &BigInt) -> Result<Option<FieldData>, IdealError> {
    check_radicand(d)?;
    Ok(arith::is_squarefree(d)?.then(|| FieldData::from_squarefree(d.clone())))
}
