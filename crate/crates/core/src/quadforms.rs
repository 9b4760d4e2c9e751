//! Indefinite binary quadratic forms `ax² + bxy + cy²` of positive nonsquare
//! discriminant: reduction, reduced cycles, composition and class numbers.
//!
//! Equivalence here is proper (`SL₂(ℤ)`) equivalence, i.e. the narrow class
//! group. Two forms are equivalent exactly when their reductions lie on the
//! same ρ-cycle. The wide class group identifies a class with its product by
//! the class of `(−1, b₀, −c₀)`; see [`ClassGroup::is_principal_wide`].
//!
//! All comparisons against `√Δ` use `s = ⌊√Δ⌋`. Since `Δ` is not a square,
//! `t < √Δ ⟺ t ≤ s` for every integer `t`, so the reduction windows are exact.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{self, ArithError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("discriminant {0} is not positive")]
    NonPositiveDiscriminant(BigInt),
    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(BigInt),
    #[error("discriminant {0} is not 0 or 1 mod 4")]
    InvalidResidue(BigInt),
    #[error("forms have different discriminants {0} and {1}")]
    MixedDiscriminants(BigInt, BigInt),
    #[error("form {0} is not primitive")]
    ImprimitiveForm(QuadForm),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A positive nonsquare discriminant `Δ ≡ 0, 1 (mod 4)` together with `⌊√Δ⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Discriminant {
    value: BigInt,
    floor_sqrt: BigInt,
}

impl Discriminant {
    pub fn new(value: impl Into<BigInt>) -> Result<Self, FormError> {
        let value = value.into();
        if !value.is_positive() {
            return Err(FormError::NonPositiveDiscriminant(value));
        }
        let residue = value.mod_floor(&BigInt::from(4));
        if !(residue.is_zero() || residue.is_one()) {
            return Err(FormError::InvalidResidue(value));
        }
        let floor_sqrt = arith::isqrt(&value);
        if &floor_sqrt * &floor_sqrt == value {
            return Err(FormError::SquareDiscriminant(value));
        }
        Ok(Discriminant { value, floor_sqrt })
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn floor_sqrt(&self) -> &BigInt {
        &self.floor_sqrt
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// The form `ax² + bxy + cy²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    /// Builds a form whose discriminant is positive, nonsquare and valid.
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
    ) -> Result<Self, FormError> {
        let form = QuadForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        };
        Discriminant::new(form.discriminant())?;
        Ok(form)
    }

    /// Builds `(a, b, (b² − Δ)/4a)`; the caller guarantees exact division.
    pub(crate) fn from_ab(a: BigInt, b: BigInt, disc: &BigInt) -> Self {
        let num = &b * &b - disc;
        let den = BigInt::from(4) * &a;
        debug_assert!(num.is_multiple_of(&den), "({a}, {b}) does not divide out");
        let c = num / den;
        QuadForm { a, b, c }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// `b² − 4ac`.
    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    /// `(a, −b, c)`, representing the inverse class.
    pub fn inverse(&self) -> Self {
        QuadForm {
            a: self.a.clone(),
            b: -&self.b,
            c: self.c.clone(),
        }
    }

    /// `(−a, b, −c)`: the class multiplied by the class of `(−1, b₀, −c₀)`.
    pub fn sign_twin(&self) -> Self {
        QuadForm {
            a: -&self.a,
            b: self.b.clone(),
            c: -&self.c,
        }
    }

    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// `0 < b < √Δ` and `√Δ − b < 2|a| < √Δ + b`.
    pub fn is_reduced_in(&self, disc: &Discriminant) -> bool {
        let s = disc.floor_sqrt();
        let two_a = BigInt::from(2) * self.a.abs();
        self.b.is_positive() && &self.b <= s && &(&two_a + &self.b) > s && &(&two_a - &self.b) <= s
    }

    pub fn is_reduced(&self) -> bool {
        match Discriminant::new(self.discriminant()) {
            Ok(disc) => self.is_reduced_in(&disc),
            Err(_) => false,
        }
    }

    /// One reduction step `(a, b, c) ↦ (c, r, (r² − Δ)/4c)` with `r ≡ −b
    /// (mod 2c)` normalized relative to `c`.
    pub fn rho_in(&self, disc: &Discriminant) -> Self {
        let r = normalize_b(&-&self.b, &self.c, disc);
        QuadForm::from_ab(self.c.clone(), r, disc.value())
    }

    pub fn rho(&self) -> Result<Self, FormError> {
        Ok(self.rho_in(&Discriminant::new(self.discriminant())?))
    }

    /// Iterates [`QuadForm::rho_in`] until the form is reduced.
    pub fn reduce_in(&self, disc: &Discriminant) -> Self {
        let mut form = self.clone();
        while !form.is_reduced_in(disc) {
            form = form.rho_in(disc);
        }
        form
    }

    pub fn reduce(&self) -> Result<Self, FormError> {
        Ok(self.reduce_in(&Discriminant::new(self.discriminant())?))
    }

    /// The ρ-cycle through `self`, which must already be reduced.
    pub fn cycle_in(&self, disc: &Discriminant) -> Vec<QuadForm> {
        debug_assert!(self.is_reduced_in(disc));
        let mut cycle = vec![self.clone()];
        let mut next = self.rho_in(disc);
        while &next != self {
            let following = next.rho_in(disc);
            cycle.push(next);
            next = following;
        }
        cycle
    }
}

/// Picks `r ≡ b (mod 2|c|)` with `−|c| < r ≤ |c|` when `|c| > √Δ`, and
/// `√Δ − 2|c| < r < √Δ` otherwise.
fn normalize_b(b: &BigInt, c: &BigInt, disc: &Discriminant) -> BigInt {
    let s = disc.floor_sqrt();
    let abs_c = c.abs();
    let modulus = BigInt::from(2) * &abs_c;
    if &abs_c > s {
        let r = b.mod_floor(&modulus);
        if r > abs_c {
            r - modulus
        } else {
            r
        }
    } else {
        s - (s - b).mod_floor(&modulus)
    }
}

/// The reduced form `(1, b₀, (b₀² − Δ)/4)` with `b₀` the largest integer
/// below `√Δ` of the same parity as `Δ`.
pub fn principal_form(disc: &Discriminant) -> QuadForm {
    let s = disc.floor_sqrt();
    let b0 = if (s - disc.value()).is_even() {
        s.clone()
    } else {
        s - 1
    };
    QuadForm::from_ab(BigInt::one(), b0, disc.value())
}

fn same_discriminant(f: &QuadForm, g: &QuadForm) -> Result<Discriminant, FormError> {
    let (df, dg) = (f.discriminant(), g.discriminant());
    if df != dg {
        return Err(FormError::MixedDiscriminants(df, dg));
    }
    Discriminant::new(df)
}

/// `(g, x, y)` with `g = gcd(a, b) ≥ 0` and `ax + by = g`.
fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let egcd = a.extended_gcd(b);
    if egcd.gcd.is_negative() {
        (-egcd.gcd, -egcd.x, -egcd.y)
    } else {
        (egcd.gcd, egcd.x, egcd.y)
    }
}

/// Dirichlet composition of two primitive forms of the same discriminant,
/// followed by reduction.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm, FormError> {
    let disc = same_discriminant(f, g)?;
    for form in [f, g] {
        if !form.is_primitive() {
            return Err(FormError::ImprimitiveForm(form.clone()));
        }
    }
    Ok(compose_in(f, g, &disc))
}

pub(crate) fn compose_in(f: &QuadForm, g: &QuadForm, disc: &Discriminant) -> QuadForm {
    let two = BigInt::from(2);
    let s = (&f.b + &g.b) / &two;
    let (g1, x, y) = ext_gcd(&f.a, &g.a);
    let (e, p, w) = ext_gcd(&g1, &s);
    let v = &p * &y;
    debug_assert_eq!(&p * &x * &f.a + &v * &g.a + &w * &s, e);

    let a3 = &f.a * &g.a / (&e * &e);
    let t = &v * ((&f.b - &g.b) / &two) - &w * &g.c;
    let b3 = &g.b + &two * (&g.a / &e) * t;
    let b3 = normalize_b(&b3, &a3, disc);
    QuadForm::from_ab(a3, b3, disc.value()).reduce_in(disc)
}

/// True iff `f` and `g` are properly equivalent.
pub fn is_equivalent(f: &QuadForm, g: &QuadForm) -> Result<bool, FormError> {
    let disc = same_discriminant(f, g)?;
    let target = g.reduce_in(&disc);
    let start = f.reduce_in(&disc);
    Ok(start.cycle_in(&disc).contains(&target))
}

/// Narrow and wide class numbers of primitive forms of one discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassNumber {
    pub narrow: u64,
    pub wide: u64,
    pub reduced_form_count: u64,
    /// Whether the principal cycle contains a form with `a = −1`, i.e. a unit
    /// of norm −1 exists.
    pub norm_minus_one_unit: bool,
}

/// All primitive reduced forms of discriminant `Δ`, sorted.
///
/// For each admissible `b` the product `ac = (b² − Δ)/4` is factored and
/// every divisor inside the reduction window contributes `(±a, b, ∓c)`.
pub fn reduced_forms(disc: &Discriminant) -> Result<Vec<QuadForm>, FormError> {
    let s = disc.floor_sqrt();
    let parity = disc.value().mod_floor(&BigInt::from(2));
    let mut b = if parity.is_zero() {
        BigInt::from(2)
    } else {
        BigInt::one()
    };
    let mut forms = Vec::new();
    while &b <= s {
        let n = (disc.value() - &b * &b) / 4;
        for t in arith::factorize(&n)?.divisors() {
            let two_t = BigInt::from(2) * &t;
            if &(&two_t + &b) <= s || &(&two_t - &b) > s {
                continue;
            }
            let cofactor = &n / &t;
            if !t.gcd(&b).gcd(&cofactor).is_one() {
                continue;
            }
            forms.push(QuadForm {
                a: t.clone(),
                b: b.clone(),
                c: -&cofactor,
            });
            forms.push(QuadForm {
                a: -t,
                b: b.clone(),
                c: cofactor,
            });
        }
        b += 2;
    }
    forms.sort();
    Ok(forms)
}

/// Partitions the reduced forms into ρ-cycles; each cycle is one narrow
/// class. The first cycle returned is the principal one.
pub fn class_cycles(disc: &Discriminant) -> Result<Vec<Vec<QuadForm>>, FormError> {
    let forms = reduced_forms(disc)?;
    let mut seen: HashSet<QuadForm> = HashSet::with_capacity(forms.len());
    let principal = principal_form(disc);
    let mut cycles = Vec::new();
    for start in std::iter::once(&principal).chain(forms.iter()) {
        if seen.contains(start) {
            continue;
        }
        let cycle = start.cycle_in(disc);
        seen.extend(cycle.iter().cloned());
        cycles.push(cycle);
    }
    debug_assert_eq!(seen.len(), forms.len());
    Ok(cycles)
}

/// Narrow class number = number of ρ-cycles; the wide class number halves it
/// unless a unit of norm −1 exists.
pub fn class_number(disc: &Discriminant) -> Result<ClassNumber, FormError> {
    let forms = reduced_forms(disc)?;
    let mut seen: HashSet<QuadForm> = HashSet::with_capacity(forms.len());
    let principal = principal_form(disc);
    let principal_cycle = principal.cycle_in(disc);
    let norm_minus_one_unit = principal_cycle.iter().any(|f| f.a == BigInt::from(-1));
    let mut narrow = 1u64;
    seen.extend(principal_cycle);
    for start in &forms {
        if seen.contains(start) {
            continue;
        }
        narrow += 1;
        let mut form = start.clone();
        loop {
            let next = form.rho_in(disc);
            seen.insert(form);
            if &next == start {
                break;
            }
            form = next;
        }
    }
    let wide = if norm_minus_one_unit {
        narrow
    } else {
        narrow / 2
    };
    Ok(ClassNumber {
        narrow,
        wide,
        reduced_form_count: forms.len() as u64,
        norm_minus_one_unit,
    })
}

/// Order of the class of `f` in the narrow class group.
pub fn class_order(f: &QuadForm) -> Result<u64, FormError> {
    if !f.is_primitive() {
        return Err(FormError::ImprimitiveForm(f.clone()));
    }
    let disc = Discriminant::new(f.discriminant())?;
    let h = class_number(&disc)?.narrow;
    let group = ClassGroup::new(disc);
    Ok(group
        .order(f, h)?
        .expect("class order exceeds the class number"))
}

/// Principal cycles of one discriminant, for repeated principality and order
/// queries without re-walking cycles.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    disc: Discriminant,
    principal: QuadForm,
    principal_cycle: HashSet<QuadForm>,
    twin_cycle: HashSet<QuadForm>,
    norm_minus_one_unit: bool,
}

impl ClassGroup {
    pub fn new(disc: Discriminant) -> Self {
        let principal = principal_form(&disc);
        let cycle = principal.cycle_in(&disc);
        let twin = principal.sign_twin();
        let principal_cycle: HashSet<QuadForm> = cycle.into_iter().collect();
        let norm_minus_one_unit = principal_cycle.contains(&twin);
        let twin_cycle = if norm_minus_one_unit {
            HashSet::new()
        } else {
            twin.cycle_in(&disc).into_iter().collect()
        };
        ClassGroup {
            disc,
            principal,
            principal_cycle,
            twin_cycle,
            norm_minus_one_unit,
        }
    }

    pub fn discriminant(&self) -> &Discriminant {
        &self.disc
    }

    pub fn principal(&self) -> &QuadForm {
        &self.principal
    }

    pub fn norm_minus_one_unit(&self) -> bool {
        self.norm_minus_one_unit
    }

    pub fn principal_cycle_len(&self) -> usize {
        self.principal_cycle.len()
    }

    fn check(&self, f: &QuadForm) -> Result<(), FormError> {
        let d = f.discriminant();
        if &d != self.disc.value() {
            return Err(FormError::MixedDiscriminants(d, self.disc.value().clone()));
        }
        Ok(())
    }

    fn reduced_is_principal(&self, reduced: &QuadForm) -> bool {
        self.principal_cycle.contains(reduced)
    }

    fn reduced_is_principal_wide(&self, reduced: &QuadForm) -> bool {
        self.principal_cycle.contains(reduced) || self.twin_cycle.contains(reduced)
    }

    /// Narrow principality: `f` properly equivalent to the principal form.
    pub fn is_principal(&self, f: &QuadForm) -> Result<bool, FormError> {
        self.check(f)?;
        Ok(self.reduced_is_principal(&f.reduce_in(&self.disc)))
    }

    /// Wide principality: the cycle of `f` holds a form with `a = ±1`.
    pub fn is_principal_wide(&self, f: &QuadForm) -> Result<bool, FormError> {
        self.check(f)?;
        Ok(self.reduced_is_principal_wide(&f.reduce_in(&self.disc)))
    }

    fn power_order(
        &self,
        f: &QuadForm,
        bound: u64,
        trivial: impl Fn(&QuadForm) -> bool,
    ) -> Result<Option<u64>, FormError> {
        self.check(f)?;
        if !f.is_primitive() {
            return Err(FormError::ImprimitiveForm(f.clone()));
        }
        let base = f.reduce_in(&self.disc);
        let mut power = base.clone();
        for n in 1..=bound {
            if trivial(&power) {
                return Ok(Some(n));
            }
            power = compose_in(&power, &base, &self.disc);
        }
        Ok(None)
    }

    /// Least `n ≤ bound` with `fⁿ` narrowly principal.
    pub fn order(&self, f: &QuadForm, bound: u64) -> Result<Option<u64>, FormError> {
        self.power_order(f, bound, |g| self.reduced_is_principal(g))
    }

    /// Least `n ≤ bound` with `fⁿ` widely principal.
    pub fn wide_order(&self, f: &QuadForm, bound: u64) -> Result<Option<u64>, FormError> {
        self.power_order(f, bound, |g| self.reduced_is_principal_wide(g))
    }
}
