//! The staircase origami `St(2s−1)`, its homology basis `e_i, f_i` and the
//! algebraic intersection form on that basis.
//!
//! Squares are numbered row by row, bottom to top and left to right: row `i`
//! (for `i < s`) holds squares `2i−1` and `2i`, the top row holds `2s−1` alone.
//! `e_1` is the bottom edge of square 1, `e_i` (`i ≥ 2`) the bottom edge of
//! square `2i−2`, `f_1` the left edge of square 1 and `f_i` (`i ≥ 2`) the left
//! edge of square `2i−1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{1..n}`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Self {
        Permutation(images)
    }

    /// Builds the permutation of `{1..n}` from disjoint cycles written 1-based.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                images[a - 1] = b - 1;
            }
        }
        Permutation(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Image of the 1-based point `k`.
    pub fn apply(&self, k: usize) -> usize {
        self.0[k - 1] + 1
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    /// Disjoint cycles (fixed points included), 1-based, each starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push(k + 1);
                k = self.0[k];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in self.cycles() {
            let items: Vec<String> = cycle.iter().map(|k| k.to_string()).collect();
            write!(f, "({})", items.join(" "))?;
        }
        Ok(())
    }
}

/// `St(2s−1)` as a pair of gluing permutations with its horizontal and vertical cylinders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaircaseSurface {
    pub s: usize,
    pub n: usize,
    pub sigma_right: Permutation,
    pub sigma_up: Permutation,
    pub row_cylinders: Vec<Vec<usize>>,
    pub column_cylinders: Vec<Vec<usize>>,
    sigma_right_inv: Permutation,
    sigma_up_inv: Permutation,
    row_of: Vec<usize>,
    column_of: Vec<usize>,
}

impl StaircaseSurface {
    pub fn new(s: i64) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidGenus(s));
        }
        let s = s as usize;
        let n = 2 * s - 1;
        let right_cycles: Vec<Vec<usize>> = (1..s).map(|i| vec![2 * i - 1, 2 * i]).collect();
        let up_cycles: Vec<Vec<usize>> = (1..s).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let sigma_right = Permutation::from_cycles(n, &right_cycles);
        let sigma_up = Permutation::from_cycles(n, &up_cycles);

        let row_cylinders = sigma_right.cycles();
        let column_cylinders = sigma_up.cycles();
        let mut row_of = vec![0; n];
        let mut column_of = vec![0; n];
        for (i, row) in row_cylinders.iter().enumerate() {
            for &k in row {
                row_of[k - 1] = i + 1;
            }
        }
        for (j, col) in column_cylinders.iter().enumerate() {
            for &k in col {
                column_of[k - 1] = j + 1;
            }
        }

        let surface = StaircaseSurface {
            s,
            n,
            sigma_right_inv: sigma_right.inverse(),
            sigma_up_inv: sigma_up.inverse(),
            sigma_right,
            sigma_up,
            row_cylinders,
            column_cylinders,
            row_of,
            column_of,
        };
        let commutator = surface.commutator().cycles();
        if commutator.len() != 1 || commutator[0].len() != n {
            return Err(Error::Invariant(format!(
                "commutator {} is not a single {n}-cycle",
                surface.commutator()
            )));
        }
        if surface.row_cylinders.len() != s || surface.column_cylinders.len() != s {
            return Err(Error::Invariant("expected s row and s column cylinders".into()));
        }
        Ok(surface)
    }

    /// Number of unit squares, which is also the area.
    pub fn volume(&self) -> usize {
        self.n
    }

    pub fn right(&self, k: usize) -> usize {
        self.sigma_right.apply(k)
    }

    pub fn left(&self, k: usize) -> usize {
        self.sigma_right_inv.apply(k)
    }

    pub fn up(&self, k: usize) -> usize {
        self.sigma_up.apply(k)
    }

    pub fn down(&self, k: usize) -> usize {
        self.sigma_up_inv.apply(k)
    }

    /// Index `1..=s` of the horizontal cylinder containing square `k`.
    pub fn row_of(&self, k: usize) -> usize {
        self.row_of[k - 1]
    }

    /// Index `1..=s` of the vertical cylinder containing square `k`.
    pub fn column_of(&self, k: usize) -> usize {
        self.column_of[k - 1]
    }

    /// `σ_r ∘ σ_u ∘ σ_r⁻¹ ∘ σ_u⁻¹`; its cycles are the cone points.
    pub fn commutator(&self) -> Permutation {
        self.sigma_right
            .compose(&self.sigma_up)
            .compose(&self.sigma_right_inv)
            .compose(&self.sigma_up_inv)
    }
}

/// Integer coordinates `(ε, φ)` of a class in the basis `e_1..e_s, f_1..f_s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyClass {
    pub eps: Vec<i64>,
    pub phi: Vec<i64>,
}

impl HomologyClass {
    pub fn zero(s: usize) -> Self {
        HomologyClass {
            eps: vec![0; s],
            phi: vec![0; s],
        }
    }

    /// `e_i`, 1-based.
    pub fn e(i: usize, s: usize) -> Self {
        let mut h = Self::zero(s);
        h.eps[i - 1] = 1;
        h
    }

    /// `f_i`, 1-based.
    pub fn f(i: usize, s: usize) -> Self {
        let mut h = Self::zero(s);
        h.phi[i - 1] = 1;
        h
    }

    pub fn genus(&self) -> usize {
        self.eps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.eps.iter().chain(&self.phi).all(|&c| c == 0)
    }

    /// Coordinates in the interleaved order `e_1, f_1, e_2, f_2, …`.
    pub fn interleaved(&self) -> Vec<i64> {
        self.eps.iter().zip(&self.phi).flat_map(|(&e, &f)| [e, f]).collect()
    }

    pub fn scale(&self, k: i64) -> Self {
        HomologyClass {
            eps: self.eps.iter().map(|c| c * k).collect(),
            phi: self.phi.iter().map(|c| c * k).collect(),
        }
    }
}

impl Add for &HomologyClass {
    type Output = HomologyClass;
    fn add(self, rhs: &HomologyClass) -> HomologyClass {
        HomologyClass {
            eps: self.eps.iter().zip(&rhs.eps).map(|(a, b)| a + b).collect(),
            phi: self.phi.iter().zip(&rhs.phi).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for HomologyClass {
    type Output = HomologyClass;
    fn add(self, rhs: HomologyClass) -> HomologyClass {
        &self + &rhs
    }
}

impl Sub for &HomologyClass {
    type Output = HomologyClass;
    fn sub(self, rhs: &HomologyClass) -> HomologyClass {
        self + &(-rhs)
    }
}

impl Neg for &HomologyClass {
    type Output = HomologyClass;
    fn neg(self) -> HomologyClass {
        self.scale(-1)
    }
}

impl Mul<&HomologyClass> for i64 {
    type Output = HomologyClass;
    fn mul(self, rhs: &HomologyClass) -> HomologyClass {
        rhs.scale(self)
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (name, coords) in [("e", &self.eps), ("f", &self.phi)] {
            for (i, &c) in coords.iter().enumerate() {
                match c {
                    0 => {}
                    1 => terms.push(format!("{name}{}", i + 1)),
                    -1 => terms.push(format!("-{name}{}", i + 1)),
                    c => terms.push(format!("{c}{name}{}", i + 1)),
                }
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
        }
    }
}

/// Antisymmetric intersection matrix in the basis order `e_1, f_1, …, e_s, f_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionForm {
    pub s: usize,
    pub m: Vec<Vec<i64>>,
}

impl IntersectionForm {
    /// `Int(e_i, f_j) = (−1)^{j−i}` for `j ≥ i`, zero for `j < i`; `e`–`e` and `f`–`f` pairings vanish.
    pub fn staircase(s: usize) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidGenus(s as i64));
        }
        let dim = 2 * s;
        let mut m = vec![vec![0i64; dim]; dim];
        for i in 1..=s {
            for j in i..=s {
                let v = if (j - i) % 2 == 0 { 1 } else { -1 };
                let (ei, fj) = (2 * (i - 1), 2 * (j - 1) + 1);
                m[ei][fj] = v;
                m[fj][ei] = -v;
            }
        }
        let form = IntersectionForm { s, m };
        if !form.is_antisymmetric() {
            return Err(Error::Invariant("intersection form is not antisymmetric".into()));
        }
        if form.determinant() == 0 {
            return Err(Error::Invariant("intersection form is degenerate".into()));
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        2 * self.s
    }

    pub fn is_antisymmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.m[i][j] + self.m[j][i] == 0))
    }

    /// Exact determinant by fraction-free Gaussian elimination.
    pub fn determinant(&self) -> i128 {
        let d = self.dim();
        let mut a: Vec<Vec<i128>> = self
            .m
            .iter()
            .map(|row| row.iter().map(|&v| v as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..d {
            if a[k][k] == 0 {
                match (k + 1..d).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[d - 1][d - 1]
    }

    /// `aᵀ · m · b`.
    pub fn pair(&self, a: &HomologyClass, b: &HomologyClass) -> Result<i64> {
        for h in [a, b] {
            if h.genus() != self.s || h.phi.len() != self.s {
                return Err(Error::DimensionMismatch {
                    expected: self.s,
                    got: h.genus(),
                });
            }
        }
        let (u, v) = (a.interleaved(), b.interleaved());
        Ok(u.iter()
            .zip(&self.m)
            .map(|(ui, row)| ui * row.iter().zip(&v).map(|(m, vj)| m * vj).sum::<i64>())
            .sum())
    }

    /// Recovers `(ε, φ)` from `ε_i = Int(h, β_i)` and `φ_i = −Int(h, α_i)`.
    pub fn coords_from_pairings(&self, h: &HomologyClass) -> Result<(Vec<i64>, Vec<i64>)> {
        let s = self.s;
        let mut eps = Vec::with_capacity(s);
        let mut phi = Vec::with_capacity(s);
        for i in 1..=s {
            eps.push(self.pair(h, &named_class(CurveName::Beta(i), s)?)?);
            phi.push(-self.pair(h, &named_class(CurveName::Alpha(i), s)?)?);
        }
        Ok((eps, phi))
    }
}

/// Named curves on `St(2s−1)`.
///
/// `Alpha`/`Beta` are the horizontal/vertical cylinder core curves, `G`/`GPrime`
/// the `(1, 1)` saddle connections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveName {
    E(usize),
    F(usize),
    Alpha(usize),
    Beta(usize),
    G(usize),
    GPrime(usize),
}

impl fmt::Display for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveName::E(i) => write!(f, "e{i}"),
            CurveName::F(i) => write!(f, "f{i}"),
            CurveName::Alpha(i) => write!(f, "alpha{i}"),
            CurveName::Beta(i) => write!(f, "beta{i}"),
            CurveName::G(i) => write!(f, "g{i}"),
            CurveName::GPrime(i) => write!(f, "g'{i}"),
        }
    }
}

impl FromStr for CurveName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownCurve(s.to_string());
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
        let (name, index) = s.split_at(split);
        let i: usize = index.parse().map_err(|_| bad())?;
        Ok(match name {
            "e" => CurveName::E(i),
            "f" => CurveName::F(i),
            "alpha" | "α" => CurveName::Alpha(i),
            "beta" | "β" => CurveName::Beta(i),
            "g" => CurveName::G(i),
            "g'" | "gp" => CurveName::GPrime(i),
            _ => return Err(bad()),
        })
    }
}

pub fn named_class(name: CurveName, s: usize) -> Result<HomologyClass> {
    let out_of_range = || Error::UnknownCurve(format!("{name} (s = {s})"));
    let (i, max) = match name {
        CurveName::GPrime(i) => (i, s - 1),
        CurveName::E(i) | CurveName::F(i) | CurveName::Alpha(i) | CurveName::Beta(i) | CurveName::G(i) => (i, s),
    };
    if i == 0 || i > max {
        return Err(out_of_range());
    }
    let e = |i| HomologyClass::e(i, s);
    let f = |i| HomologyClass::f(i, s);
    Ok(match name {
        CurveName::E(i) => e(i),
        CurveName::F(i) => f(i),
        CurveName::Alpha(i) if i == s => e(s),
        CurveName::Alpha(i) => e(i) + e(i + 1),
        CurveName::Beta(1) => f(1),
        CurveName::Beta(i) => f(i - 1) + f(i),
        CurveName::G(i) => e(i) + f(i),
        CurveName::GPrime(i) => e(i + 1) + f(i),
    })
}
