//! The Veech group `Γ = ⟨T, R⟩` of the staircase, `T = (1 2; 0 1)`, `R = (0 −1; 1 0)`.
//!
//! `Γ` is the index-3 subgroup of `SL₂(ℤ)` of matrices congruent mod 2 to the
//! identity or to the antidiagonal matrix. It acts on slopes by
//! `r ↦ (ar + b)/(cr + d)` and on the disk by the usual Möbius action.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyper::{ratio_f64, DiskPoint};
use crate::saddle::SaddleTable;
use crate::slope::{Rational, Slope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    T,
    TInv,
    R,
}

impl Generator {
    fn matrix(self) -> [[i64; 2]; 2] {
        match self {
            Generator::T => [[1, 2], [0, 1]],
            Generator::TInv => [[1, -2], [0, 1]],
            Generator::R => [[0, -1], [1, 0]],
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::T => "T",
            Generator::TInv => "T⁻¹",
            Generator::R => "R",
        })
    }
}

fn mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Mod-2 membership test for `Γ`.
pub fn in_gamma(m: [[i64; 2]; 2]) -> bool {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let r = m.map(|row| row.map(|v| v.rem_euclid(2)));
    det == 1 && (r == [[1, 0], [0, 1]] || r == [[0, 1], [1, 0]])
}

/// A matrix of `Γ` together with a word in `T, T⁻¹, R` evaluating to it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupElement {
    pub m: [[i64; 2]; 2],
    pub word: Vec<Generator>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            m: [[1, 0], [0, 1]],
            word: Vec::new(),
        }
    }

    pub fn generator(g: Generator) -> Self {
        GroupElement {
            m: g.matrix(),
            word: vec![g],
        }
    }

    pub fn t() -> Self {
        Self::generator(Generator::T)
    }

    pub fn r() -> Self {
        Self::generator(Generator::R)
    }

    /// `T^k`.
    pub fn t_pow(k: i64) -> Self {
        let g = if k >= 0 { Generator::T } else { Generator::TInv };
        GroupElement {
            m: [[1, 2 * k], [0, 1]],
            word: vec![g; k.unsigned_abs() as usize],
        }
    }

    pub fn from_word(word: &[Generator]) -> Self {
        let m = word.iter().fold([[1, 0], [0, 1]], |acc, g| mul(acc, g.matrix()));
        GroupElement { m, word: word.to_vec() }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &GroupElement) -> Self {
        let mut word = self.word.clone();
        for &g in &other.word {
            push_reduced(&mut word, g);
        }
        GroupElement {
            m: mul(self.m, other.m),
            word,
        }
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let mut word = Vec::new();
        for g in self.word.iter().rev() {
            match g {
                Generator::T => word.push(Generator::TInv),
                Generator::TInv => word.push(Generator::T),
                // R⁻¹ = R³
                Generator::R => word.extend([Generator::R; 3]),
            }
        }
        GroupElement {
            m: [[d, -b], [-c, a]],
            word,
        }
    }

    /// `g̃ = (d b; c a)`, the element with `K_{r,r'}(g·z) = K_{g̃r, g̃r'}(z)`.
    /// The tilde reverses words and fixes each generator.
    pub fn dual(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        GroupElement {
            m: [[d, b], [c, a]],
            word: self.word.iter().rev().copied().collect(),
        }
    }

    pub fn word_evaluates(&self) -> bool {
        Self::from_word(&self.word).m == self.m
    }

    pub fn is_member(&self) -> bool {
        in_gamma(self.m)
    }

    /// The word with runs written as powers, e.g. `T⁻³ R T`.
    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            return "id".into();
        }
        let mut parts: Vec<(Generator, usize)> = Vec::new();
        for &g in &self.word {
            match parts.last_mut() {
                Some((h, n)) if *h == g => *n += 1,
                _ => parts.push((g, 1)),
            }
        }
        parts
            .into_iter()
            .map(|(g, n)| match (g, n) {
                (_, 1) => g.to_string(),
                (Generator::TInv, n) => format!("T⁻{}", superscript(n)),
                (g, n) => format!("{g}{}", superscript(n)),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().bytes().map(|b| DIGITS[(b - b'0') as usize]).collect()
}

/// Appends `g`, cancelling `T T⁻¹` and `R⁴ = 1` at the end of the word.
fn push_reduced(word: &mut Vec<Generator>, g: Generator) {
    match (word.last(), g) {
        (Some(Generator::T), Generator::TInv) | (Some(Generator::TInv), Generator::T) => {
            word.pop();
        }
        (_, Generator::R) if word.len() >= 3 && word[word.len() - 3..].iter().all(|&h| h == Generator::R) => {
            word.truncate(word.len() - 3);
        }
        _ => word.push(g),
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.m;
        write!(f, "({a} {b}; {c} {d}) = {}", self.word_string())
    }
}

/// `(ar + b)/(cr + d)`.
pub fn act_on_slope(g: &GroupElement, r: Slope) -> Slope {
    let [[a, b], [c, d]] = g.m;
    Slope::from_vector(a * r.p + b * r.q, c * r.p + d * r.q).expect("invertible matrix")
}

/// Möbius action on the upper half-plane; exact on rational points.
pub fn act_on_point(g: &GroupElement, z: &DiskPoint) -> DiskPoint {
    let [[a, b], [c, d]] = g.m;
    if let Some((x, y)) = z.exact {
        let [a, b, c, d] = [a, b, c, d].map(Rational::from_integer);
        let den = (c * x + d) * (c * x + d) + c * c * y * y;
        let nx = ((a * x + b) * (c * x + d) + a * c * y * y) / den;
        return DiskPoint::exact(nx, y / den).expect("Γ preserves the upper half-plane");
    }
    let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
    let (x, y) = (z.x, z.y);
    let den = (c * x + d).powi(2) + (c * y).powi(2);
    DiskPoint {
        x: ((a * x + b) * (c * x + d) + a * c * y * y) / den,
        y: y / den,
        exact: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SlopeClass {
    /// Orbit of `(0, 1)`: `p ≢ q (mod 2)`.
    EvenClass,
    /// Orbit of `(1, 1)`: `p ≡ q ≡ 1 (mod 2)`.
    OddClass,
}

pub fn orbit_class(p: i64, q: i64) -> Result<SlopeClass> {
    if (p, q) == (0, 0) || p.gcd(&q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    Ok(if (p - q).rem_euclid(2) == 1 {
        SlopeClass::EvenClass
    } else {
        SlopeClass::OddClass
    })
}

pub fn slope_class(r: Slope) -> SlopeClass {
    orbit_class(r.p, r.q).expect("slopes are primitive")
}

/// Brings `z` into `|x| ≤ 1, x² + y² ≥ 1` by translations `T^k` and inversions `R`.
/// Boundary points are sent to the copy with `x ≥ 0`. Returns `(g·z, g)`.
pub fn reduce_to_fundamental_domain(z: &DiskPoint) -> (DiskPoint, GroupElement) {
    let mut g = GroupElement::identity();
    let mut w = *z;
    if let Some((x0, y0)) = z.exact.filter(|&(x, y)| exact_is_safe(x) && exact_is_safe(y)) {
        let one = Rational::from_integer(1);
        let (mut x, mut y) = (x0, y0);
        loop {
            let k = ((x + one) / Rational::from_integer(2)).floor().to_integer();
            if k != 0 {
                x -= Rational::from_integer(2 * k);
                g = GroupElement::t_pow(-k).compose(&g);
            }
            // now -1 ≤ x < 1
            let n2 = x * x + y * y;
            if n2 < one {
                x = -x / n2;
                y /= n2;
                g = GroupElement::r().compose(&g);
                if !(exact_is_safe(x) && exact_is_safe(y)) {
                    // heights grew; finish in floating point
                    w = DiskPoint::new(ratio_f64(x), ratio_f64(y)).expect("y > 0");
                    break;
                }
                continue;
            }
            if x == -one {
                x = one;
                g = GroupElement::t().compose(&g);
            } else if n2 == one && x < Rational::from_integer(0) {
                x = -x;
                g = GroupElement::r().compose(&g);
            }
            return (DiskPoint::exact(x, y).expect("y > 0"), g);
        }
    }
    w.exact = None;
    for _ in 0..10_000 {
        let k = ((w.x + 1.0) / 2.0).floor() as i64;
        if k != 0 {
            w.x -= 2.0 * k as f64;
            g = GroupElement::t_pow(-k).compose(&g);
        }
        let n2 = w.x * w.x + w.y * w.y;
        if n2 < 1.0 {
            w = DiskPoint {
                x: -w.x / n2,
                y: w.y / n2,
                exact: None,
            };
            g = GroupElement::r().compose(&g);
            continue;
        }
        if w.x == -1.0 {
            w.x = 1.0;
            g = GroupElement::t().compose(&g);
        } else if n2 == 1.0 && w.x < 0.0 {
            w.x = -w.x;
            g = GroupElement::r().compose(&g);
        }
        break;
    }
    (w, g)
}

/// Exact coordinates stay on the exact path only while their numerators and
/// denominators are small enough that the quartic expressions used downstream
/// cannot overflow `i64`.
pub fn exact_is_safe(r: Rational) -> bool {
    r.numer().abs() <= EXACT_HEIGHT_LIMIT && *r.denom() <= EXACT_HEIGHT_LIMIT
}

pub const EXACT_HEIGHT_LIMIT: i64 = 10_000;

pub fn in_fundamental_domain(z: &DiskPoint, tol: f64) -> bool {
    z.x.abs() <= 1.0 + tol && z.x * z.x + z.y * z.y >= 1.0 - tol
}

/// `V ∈ Γ` with `V(r) = ∞` for even-class slopes and `V(r) = 1` for odd-class
/// ones, by an even continued-fraction descent.
pub fn slope_to_cusp(r: Slope) -> GroupElement {
    let mut g = GroupElement::identity();
    let mut c = r;
    loop {
        if c.is_infinite() || c == Slope::integer(1) {
            return g;
        }
        if c == Slope::integer(-1) {
            return GroupElement::t().compose(&g);
        }
        let x = c.to_ratio().unwrap();
        // T^{-k} brings c into [-1, 1]
        let k = ((x + Rational::from_integer(1)) / Rational::from_integer(2))
            .floor()
            .to_integer();
        if k != 0 {
            let t = GroupElement::t_pow(-k);
            c = act_on_slope(&t, c);
            g = t.compose(&g);
            continue;
        }
        // 0 ↦ ∞, or |c| < 1 inverted to |c| > 1 with smaller denominator
        c = act_on_slope(&GroupElement::r(), c);
        g = GroupElement::r().compose(&g);
    }
}

/// Group-theoretic End(𝒵) test: `(r, r')` is the image of an integer-endpoint
/// pair. After `V = slope_to_cusp(r)`, with `t = V(r')`:
/// at cusp `∞`, `t ∈ ℤ` or `t = 2k + 1/m`; at cusp `1`, `u = 1/(t − 1)` is in
/// `ℤ` or `u = k + 1/m` (the stabilisers are `⟨T⟩` and `⟨(2 −1; 1 0)⟩`).
pub fn end_of_z_by_group(r: Slope, r_prime: Slope) -> Result<bool> {
    if r == r_prime {
        return Err(Error::EqualSlopes(r.to_string()));
    }
    let v = slope_to_cusp(r);
    let t = act_on_slope(&v, r_prime);
    let one = Rational::from_integer(1);
    let is_unit_fraction = |f: Rational| !f.is_integer() && f.recip().is_integer();
    if act_on_slope(&v, r).is_infinite() {
        let t = t.to_ratio().expect("t ≠ ∞ since r ≠ r'");
        if t.is_integer() {
            return Ok(true);
        }
        let k = (t / Rational::from_integer(2)).floor();
        let f = t - k * Rational::from_integer(2);
        Ok(is_unit_fraction(f) || is_unit_fraction(f - Rational::from_integer(2)))
    } else {
        let u = match t.to_ratio() {
            None => return Ok(true),
            Some(t) => (t - one).recip(),
        };
        Ok(u.is_integer() || is_unit_fraction(u - u.floor()) || is_unit_fraction(u - u.ceil()))
    }
}

/// End(𝒵) membership via the exact intersection ratio: `I_{r,r'} = 1`.
/// Memoised per `(r, r')`; concurrent fills recompute the same value.
pub struct EndZOracle {
    table: SaddleTable,
    cache: RwLock<HashMap<(Slope, Slope), bool>>,
}

impl EndZOracle {
    pub fn new(s: i64) -> Result<Self> {
        Ok(Self::with_table(SaddleTable::new(s)?))
    }

    pub fn with_table(table: SaddleTable) -> Self {
        EndZOracle {
            table,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn table(&self) -> &SaddleTable {
        &self.table
    }

    pub fn is_end(&self, r: Slope, r_prime: Slope) -> Result<bool> {
        let key = if r <= r_prime { (r, r_prime) } else { (r_prime, r) };
        if let Some(&v) = self.cache.read().unwrap().get(&key) {
            return Ok(v);
        }
        let v = self.table.intersection_ratio(r, r_prime)?.value == Rational::from_integer(1);
        self.cache.write().unwrap().insert(key, v);
        Ok(v)
    }

    /// Primary answer, cross-checked against the group-theoretic test.
    pub fn is_end_checked(&self, r: Slope, r_prime: Slope) -> Result<bool> {
        let primary = self.is_end(r, r_prime)?;
        let group = end_of_z_by_group(r, r_prime)?;
        if primary != group {
            return Err(Error::Invariant(format!(
                "End(Z) disagreement at ({r}, {r_prime}): intersection ratio says {primary}, group test says {group}"
            )));
        }
        Ok(primary)
    }
}

pub fn is_end_of_z(s: i64, r: Slope, r_prime: Slope) -> Result<bool> {
    EndZOracle::new(s)?.is_end(r, r_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn generators_are_members() {
        assert!(GroupElement::t().is_member());
        assert!(GroupElement::r().is_member());
        assert!(!in_gamma([[1, 1], [0, 1]]));
        let g = GroupElement::from_word(&[Generator::T, Generator::R, Generator::TInv, Generator::R]);
        assert!(g.is_member() && g.word_evaluates());
        let h = g.inverse();
        assert_eq!(g.compose(&h).m, [[1, 0], [0, 1]]);
        assert!(h.word_evaluates());
        assert!(g.dual().word_evaluates() && g.dual().is_member());
    }

    #[test]
    fn slope_actions() {
        assert_eq!(act_on_slope(&GroupElement::t(), Slope::INFINITY), Slope::INFINITY);
        assert_eq!(act_on_slope(&GroupElement::r(), Slope::integer(1)), Slope::integer(-1));
        assert_eq!(act_on_slope(&GroupElement::r(), Slope::integer(0)), Slope::INFINITY);
        assert_eq!(
            act_on_slope(&GroupElement::t(), Slope::new_ratio(3, 7)),
            Slope::new_ratio(17, 7)
        );
    }

    #[test]
    fn point_actions() {
        let i = DiskPoint::exact(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(act_on_point(&GroupElement::r(), &i).exact, i.exact);
        let z = DiskPoint::exact(q(1, 3), q(2, 1)).unwrap();
        assert_eq!(act_on_point(&GroupElement::t(), &z).exact, Some((q(7, 3), q(2, 1))));
    }

    #[test]
    fn classes() {
        assert_eq!(orbit_class(1, 0).unwrap(), SlopeClass::EvenClass);
        assert_eq!(orbit_class(3, 7).unwrap(), SlopeClass::OddClass);
        assert_eq!(orbit_class(2, 3).unwrap(), SlopeClass::EvenClass);
        assert!(orbit_class(2, 4).is_err());
    }

    #[test]
    fn reduction_examples() {
        let i = DiskPoint::exact(q(0, 1), q(1, 1)).unwrap();
        let (w, g) = reduce_to_fundamental_domain(&i);
        assert_eq!(w.exact, i.exact);
        assert!(g.word.is_empty());
        let (w, g) = reduce_to_fundamental_domain(&DiskPoint::exact(q(5, 2), q(2, 1)).unwrap());
        assert_eq!(w.exact, Some((q(1, 2), q(2, 1))));
        assert_eq!(g.word, vec![Generator::TInv]);
        let (w, g) = reduce_to_fundamental_domain(&DiskPoint::exact(q(0, 1), q(1, 4)).unwrap());
        assert_eq!(w.exact, Some((q(0, 1), q(4, 1))));
        assert_eq!(g.word, vec![Generator::R]);
        // boundary ties go to x ≥ 0
        let (w, _) = reduce_to_fundamental_domain(&DiskPoint::exact(q(-1, 1), q(3, 1)).unwrap());
        assert_eq!(w.exact, Some((q(1, 1), q(3, 1))));
        let (w, _) = reduce_to_fundamental_domain(&DiskPoint::exact(q(-3, 5), q(4, 5)).unwrap());
        assert_eq!(w.exact, Some((q(3, 5), q(4, 5))));
    }

    #[test]
    fn cusp_descent() {
        assert!(slope_to_cusp(Slope::INFINITY).word.is_empty());
        let v = slope_to_cusp(Slope::integer(2));
        assert_eq!(act_on_slope(&v, Slope::integer(2)), Slope::INFINITY);
        let v = slope_to_cusp(Slope::integer(3));
        assert_eq!(act_on_slope(&v, Slope::integer(3)), Slope::integer(1));
        for r in crate::slope::slopes_up_to(15) {
            let v = slope_to_cusp(r);
            let target = match slope_class(r) {
                SlopeClass::EvenClass => Slope::INFINITY,
                SlopeClass::OddClass => Slope::integer(1),
            };
            assert_eq!(act_on_slope(&v, r), target, "{r}");
            assert!(v.is_member() && v.word_evaluates());
        }
    }

    #[test]
    fn end_examples() {
        assert!(is_end_of_z(2, Slope::integer(0), Slope::INFINITY).unwrap());
        assert!(!is_end_of_z(2, Slope::new_ratio(3, 7), Slope::INFINITY).unwrap());
        assert!(is_end_of_z(2, Slope::new_ratio(1, 2), Slope::INFINITY).unwrap());
        assert!(end_of_z_by_group(Slope::new_ratio(1, 2), Slope::INFINITY).unwrap());
        assert!(!end_of_z_by_group(Slope::new_ratio(3, 7), Slope::INFINITY).unwrap());
        assert!(!end_of_z_by_group(Slope::new_ratio(4, 3), Slope::INFINITY).unwrap());
        assert!(is_end_of_z(2, Slope::integer(1), Slope::integer(1)).is_err());
    }

    #[test]
    fn index_three_by_cosets() {
        // right cosets Γm of SL₂(ℤ): m ~ m' iff m m'^{-1} ∈ Γ
        let gens = [[[0, -1], [1, 0]], [[1, 1], [0, 1]]];
        let inv = |m: [[i64; 2]; 2]| [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
        let mut reps: Vec<[[i64; 2]; 2]> = Vec::new();
        let mut queue = VecDeque::from([[[1, 0], [0, 1]]]);
        let mut steps = 0;
        while let Some(m) = queue.pop_front() {
            steps += 1;
            if steps > 2000 {
                break;
            }
            if reps.iter().any(|&r| in_gamma(mul(m, inv(r)))) {
                continue;
            }
            reps.push(m);
            for g in gens {
                queue.push_back(mul(m, g));
            }
        }
        assert_eq!(reps.len(), 3);
    }

    #[test]
    fn words_never_leave_gamma() {
        let mut frontier = vec![GroupElement::identity()];
        for _ in 0..8 {
            let mut next = Vec::new();
            for g in &frontier {
                for gen in [Generator::T, Generator::TInv, Generator::R] {
                    let h = g.compose(&GroupElement::generator(gen));
                    assert!(h.is_member());
                    next.push(h);
                }
            }
            frontier = next;
        }
    }
}
