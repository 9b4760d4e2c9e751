//! Independent reference implementations used only by tests.
//!
//! Everything here works on machine integers and shares no code with the
//! library. One counts form classes by exhaustive enumeration of reduced forms
//! and a separately written neighbor walk. The other decides principality of ideals
//! of ℤ[√d] by searching for a generator below an explicit bound derived from
//! the fundamental unit, found along the continued-fraction period of `√d`.

#![allow(dead_code)]

use std::collections::HashMap;

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn isqrt(n: i128) -> i128 {
    assert!(n >= 0);
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && isqrt(n).pow(2) == n
}

/// Reduced in the sense `0 < b < √Δ`, `√Δ − b < 2|a| < √Δ + b`, with every
/// comparison against the irrational `√Δ` done by squaring.
fn is_reduced(a: i128, b: i128, delta: i128) -> bool {
    let two_a = 2 * a.abs();
    b > 0
        && b * b < delta
        && (two_a + b) * (two_a + b) > delta
        && (two_a <= b || (two_a - b) * (two_a - b) < delta)
}

/// All primitive reduced forms of discriminant `delta`, found by brute force
/// over `|a| ≤ √Δ`, `0 < b < √Δ`.
pub fn reduced_forms(delta: i128) -> Vec<(i128, i128, i128)> {
    let s = isqrt(delta);
    let mut out = Vec::new();
    for a in -s..=s {
        if a == 0 {
            continue;
        }
        for b in 1..=s {
            let num = b * b - delta;
            if num % (4 * a) != 0 || !is_reduced(a, b, delta) {
                continue;
            }
            let c = num / (4 * a);
            if gcd(gcd(a, b), c) == 1 {
                out.push((a, b, c));
            }
        }
    }
    out
}

/// The reduced right neighbor `(c, b', ·)` with `b' ≡ −b (mod 2c)` and
/// `√Δ − 2|c| < b' < √Δ`.
fn neighbor((_, b, c): (i128, i128, i128), delta: i128) -> (i128, i128, i128) {
    let m = 2 * c.abs();
    let s = isqrt(delta);
    let mut nb = (-b).rem_euclid(m);
    while nb > s {
        nb -= m;
    }
    while nb + m <= s {
        nb += m;
    }
    (c, nb, (nb * nb - delta) / (4 * c))
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let r = self.find(self.0[i]);
            self.0[i] = r;
        }
        self.0[i]
    }
    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        self.0[ri] = rj;
    }
    fn classes(&mut self) -> usize {
        (0..self.0.len()).filter(|&i| self.find(i) == i).count()
    }
}

pub struct FormClasses {
    pub reduced_form_count: usize,
    pub narrow: usize,
    pub wide: usize,
    /// Narrow class index of each reduced form.
    pub class_of: HashMap<(i128, i128, i128), usize>,
    /// Wide class index of each reduced form.
    pub wide_class_of: HashMap<(i128, i128, i128), usize>,
}

/// Narrow classes are the orbits of the neighbor map on reduced forms;
/// wide classes additionally identify `(a, b, c)` with `(−a, b, −c)`.
pub fn form_classes(delta: i128) -> FormClasses {
    assert!(delta > 0 && !is_square(delta) && matches!(delta.rem_euclid(4), 0 | 1));
    let forms = reduced_forms(delta);
    let index: HashMap<_, _> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut narrow = Dsu((0..forms.len()).collect());
    for (i, f) in forms.iter().enumerate() {
        let g = neighbor(*f, delta);
        let j = *index
            .get(&g)
            .expect("neighbor of a reduced form is reduced");
        narrow.union(i, j);
    }
    let narrow_count = narrow.classes();
    let roots: Vec<usize> = (0..forms.len()).map(|i| narrow.find(i)).collect();
    let mut labels = HashMap::new();
    let mut class_of = HashMap::new();
    for (i, f) in forms.iter().enumerate() {
        let next = labels.len();
        let label = *labels.entry(roots[i]).or_insert(next);
        class_of.insert(*f, label);
    }
    let mut wide = Dsu(roots.clone());
    for (i, &(a, b, c)) in forms.iter().enumerate() {
        wide.union(i, index[&(-a, b, -c)]);
    }
    let wide_class_of = forms
        .iter()
        .enumerate()
        .map(|(i, f)| (*f, wide.find(i)))
        .collect();
    FormClasses {
        reduced_form_count: forms.len(),
        narrow: narrow_count,
        wide: wide.classes(),
        class_of,
        wide_class_of,
    }
}

/// Reduces an arbitrary form of positive nonsquare discriminant by the same
/// neighbor step (normalizing `b` first), for locating it in [`form_classes`].
pub fn walk_reduce((a, b, c): (i128, i128, i128)) -> (i128, i128, i128) {
    let delta = b * b - 4 * a * c;
    let mut f = (a, b, c);
    let mut steps = 0;
    while !is_reduced(f.0, f.1, delta) {
        let (_, b, c) = f;
        let m = 2 * c.abs();
        let s = isqrt(delta);
        let nb = if c.abs() > s {
            // any representative in (−|c|, |c|]
            let r = (-b).rem_euclid(m);
            if r > c.abs() {
                r - m
            } else {
                r
            }
        } else {
            let mut r = (-b).rem_euclid(m);
            while r > s {
                r -= m;
            }
            while r + m <= s {
                r += m;
            }
            r
        };
        f = (c, nb, (nb * nb - delta) / (4 * c));
        steps += 1;
        assert!(steps < 10_000, "reduction did not terminate");
    }
    f
}

/// Fundamental unit `x + y√D` of ℤ[√D] and its norm `±1`, from the first
/// convergent of the continued fraction of `√D` with norm `±1`.
pub fn fundamental_unit(d: i128) -> (i128, i128, i128) {
    assert!(d > 0 && !is_square(d));
    let a0 = isqrt(d);
    let (mut m, mut q, mut a) = (0i128, 1i128, a0);
    let (mut p_prev, mut p) = (1i128, a0);
    let (mut q_prev, mut qq) = (0i128, 1i128);
    loop {
        let norm = p * p - d * qq * qq;
        if norm.abs() == 1 {
            return (p, qq, norm);
        }
        m = q * a - m;
        q = (d - m * m) / q;
        a = (a0 + m) / q;
        (p_prev, p) = (p, a * p + p_prev);
        (q_prev, qq) = (qq, a * qq + q_prev);
    }
}

/// All `(X, y)` with `y ≥ 0` and `X² − d y² = n` inside the search box.
///
/// If `α = X + y√d` has norm `n`, multiplying by a power of the fundamental
/// unit `η` brings `|α/α′|` into `[1/η, η)`, and then
/// `4dy² ≤ (|α| + |α′|)² ≤ |n|(η + 2 + 1/η) ≤ |n|(2x + 4)` where `η = x + y₁√d`.
/// So every principal ideal has a generator with `y² ≤ |n|(x + 2)/(2d)`.
pub fn norm_solutions(d: i128, n: i128) -> Vec<(i128, i128)> {
    let (x1, _, _) = fundamental_unit(d);
    let bound = n.abs() * (x1 + 2) / (2 * d);
    let mut out = Vec::new();
    let mut y = 0i128;
    while y * y <= bound {
        let t = d * y * y + n;
        if is_square(t) {
            let x = isqrt(t);
            out.push((x, y));
            if x != 0 {
                out.push((-x, y));
            }
        }
        y += 1;
    }
    out
}

/// `[a, B + √d]` is principal iff it contains an element
/// `X + y√d` (so `X ≡ By mod a`) of norm `±a`.
pub fn has_generator(d: i128, a: i128, b: i128) -> bool {
    assert!((b * b - d) % a == 0);
    [a, -a].into_iter().any(|n| {
        norm_solutions(d, n)
            .into_iter()
            .any(|(x, y)| (x - b * y).rem_euclid(a) == 0)
    })
}

/// Same as [`has_generator`] but reusing precomputed solutions for `±a`.
pub fn has_generator_with(sols: &[(i128, i128)], a: i128, b: i128) -> bool {
    sols.iter().any(|&(x, y)| (x - b * y).rem_euclid(a) == 0)
}

/// An ideal of ℤ[√d] as `g · [n, r + √d]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ideal {
    pub content: i128,
    pub norm: i128,
    pub root: i128,
}

/// Hermite normal form of a rank-2 lattice given by generators `(x, y)`:
/// returns `(n, (x₀, g))` with the lattice spanned by `(n, 0)` and `(x₀, g)`.
fn hnf(gens: &[(i128, i128)]) -> (i128, (i128, i128)) {
    let mut pivot = gens[0];
    let mut zero_row = 0i128;
    for &g in &gens[1..] {
        let mut v = pivot;
        let mut w = g;
        while w.1 != 0 {
            let q = v.1.div_euclid(w.1);
            v = (v.0 - q * w.0, v.1 - q * w.1);
            std::mem::swap(&mut v, &mut w);
        }
        pivot = v;
        zero_row = gcd(zero_row, w.0);
    }
    if pivot.1 < 0 {
        pivot = (-pivot.0, -pivot.1);
    }
    (zero_row, (pivot.0.rem_euclid(zero_row), pivot.1))
}

fn split_content(n: i128, (x, g): (i128, i128)) -> Ideal {
    assert!(n % g == 0 && x % g == 0, "not an ideal lattice");
    let norm = n / g;
    Ideal {
        content: g,
        norm,
        root: (x / g).rem_euclid(norm),
    }
}

/// Product of `[a1, b1 + √d]` and `[a2, b2 + √d]` in the basis `(1, √d)`.
pub fn ideal_mul(d: i128, (a1, b1): (i128, i128), (a2, b2): (i128, i128)) -> Ideal {
    let (n, pivot) = hnf(&[
        (a1 * a2, 0),
        (a1 * b2, a1),
        (a2 * b1, a2),
        (b1 * b2 + d, b1 + b2),
    ]);
    split_content(n, pivot)
}

/// For `d ≡ 1 (mod 4)`: the extension of `[a, B + √d]` to the maximal order,
/// as `g · [n, r + ω]` with `ω = (1 + √d)/2`, and its form of discriminant `d`.
pub fn extend_to_maximal(d: i128, (a, b): (i128, i128)) -> (Ideal, (i128, i128, i128)) {
    assert_eq!(d.rem_euclid(4), 1);
    // B + √d = (B − 1) + 2ω and (B + √d)ω = (d − 1)/2 + (B + 1)ω.
    let (n, pivot) = hnf(&[(a, 0), (0, a), (b - 1, 2), ((d - 1) / 2, b + 1)]);
    let ideal = split_content(n, pivot);
    let (n, r) = (ideal.norm, ideal.root);
    let bb = 2 * r + 1;
    (ideal, (n, bb, (bb * bb - d) / (4 * n)))
}

/// `[a, B + √d]ⁿ` with contents dropped (they are principal).
pub fn ideal_pow(d: i128, (a, b): (i128, i128), n: u32) -> (i128, i128) {
    let mut acc = (1, 0);
    for _ in 0..n {
        let p = ideal_mul(d, acc, (a, b));
        acc = (p.norm, p.root);
    }
    acc
}

/// Wide-class equality of two invertible ideals: `I · conj(J)` principal.
pub fn same_ideal_class(d: i128, i: (i128, i128), j: (i128, i128)) -> bool {
    let p = ideal_mul(d, i, (j.0, (-j.1).rem_euclid(j.0)));
    has_generator(d, p.norm, p.root)
}
