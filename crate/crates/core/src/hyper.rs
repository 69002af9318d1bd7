//! Upper half-plane geometry for the Teichmüller disk of the staircase.
//!
//! A point `z = (x, y)` stands for the torus `T(x, y) = ℂ / (ℤ + (x + iy)ℤ)`.
//! Slopes `r = p/q` name directions `p + q z`; their lengths are `l_r(z)`.
//!
//! Sign convention: `K_{r,r'}(z)` is `sech` of the distance from `z` to the
//! geodesic with endpoints `-r` and `-r'` (the length `l_r` vanishes at
//! `x = -r`). Named geodesics such as `γ_{-1,1}` or `γ_{0,2}` are given by
//! their endpoints; see [`Geodesic::for_slopes`] to pass from slopes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::slope::{Rational, Slope};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
    /// Present when both coordinates are rational; enables exact comparisons.
    #[serde(skip)]
    pub exact: Option<(Rational, Rational)>,
}

impl DiskPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if y.is_nan() || y <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::NotInUpperHalfPlane { x, y });
        }
        Ok(DiskPoint { x, y, exact: None })
    }

    pub fn exact(x: Rational, y: Rational) -> Result<Self> {
        let (xf, yf) = (ratio_f64(x), ratio_f64(y));
        if y <= Rational::from_integer(0) {
            return Err(Error::NotInUpperHalfPlane { x: xf, y: yf });
        }
        Ok(DiskPoint {
            x: xf,
            y: yf,
            exact: Some((x, y)),
        })
    }

    /// The minimum point `k = (9/14, √143/14)`.
    pub fn k_point() -> Self {
        DiskPoint {
            x: 9.0 / 14.0,
            y: 143f64.sqrt() / 14.0,
            exact: None,
        }
    }

    pub fn mirror(&self) -> Self {
        DiskPoint {
            x: -self.x,
            y: self.y,
            exact: self.exact.map(|(x, y)| (-x, y)),
        }
    }
}

pub fn ratio_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `√(143/144)`: the value of the covering-family `K` (and of `J_{±1}`) at `k`.
pub fn cover_threshold() -> f64 {
    (143f64 / 144.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geodesic {
    /// The vertical line `x = c`, endpoints `c` and `∞`.
    Vertical(Rational),
    /// The half circle with endpoints `a < b`.
    Semicircle(Rational, Rational),
}

impl std::fmt::Display for Geodesic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = self.endpoints();
        write!(f, "γ[{a}, {b}]")
    }
}

impl Geodesic {
    /// Geodesic with the given endpoints in `ℚ ∪ {∞}`.
    pub fn new(a: Slope, b: Slope) -> Result<Self> {
        if a == b {
            return Err(Error::EqualSlopes(a.to_string()));
        }
        Ok(match (a.to_ratio(), b.to_ratio()) {
            (None, Some(c)) | (Some(c), None) => Geodesic::Vertical(c),
            (Some(a), Some(b)) => Geodesic::Semicircle(a.min(b), a.max(b)),
            (None, None) => unreachable!("distinct endpoints"),
        })
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        Self::new(Slope::integer(a), Slope::integer(b))
    }

    /// The geodesic `K_{r,r'}` measures the distance to: endpoints `-r`, `-r'`.
    pub fn for_slopes(r: Slope, r_prime: Slope) -> Result<Self> {
        Self::new(r.neg(), r_prime.neg())
    }

    pub fn endpoints(&self) -> (Slope, Slope) {
        match *self {
            Geodesic::Vertical(c) => (Slope::from_ratio(c), Slope::INFINITY),
            Geodesic::Semicircle(a, b) => (Slope::from_ratio(a), Slope::from_ratio(b)),
        }
    }

    /// Signed `sinh` of the distance: positive to the right of a vertical line
    /// and outside a half circle.
    pub fn signed_sinh(&self, z: &DiskPoint) -> f64 {
        match *self {
            Geodesic::Vertical(c) => (z.x - ratio_f64(c)) / z.y,
            Geodesic::Semicircle(a, b) => {
                let (a, b) = (ratio_f64(a), ratio_f64(b));
                ((z.x - a) * (z.x - b) + z.y * z.y) / ((b - a) * z.y)
            }
        }
    }

    fn signed_sinh_exact(&self, x: Rational, y: Rational) -> Rational {
        match *self {
            Geodesic::Vertical(c) => (x - c) / y,
            Geodesic::Semicircle(a, b) => ((x - a) * (x - b) + y * y) / ((b - a) * y),
        }
    }
}

pub fn sinh_dist(z: &DiskPoint, g: &Geodesic) -> f64 {
    g.signed_sinh(z).abs()
}

pub fn dist_to_geodesic(z: &DiskPoint, g: &Geodesic) -> f64 {
    sinh_dist(z, g).asinh()
}

/// `sinh² d` as an exact rational, when `z` is rational.
pub fn sinh_dist_squared_exact(z: &DiskPoint, g: &Geodesic) -> Option<Rational> {
    let (x, y) = z.exact?;
    let s = g.signed_sinh_exact(x, y);
    Some(s * s)
}

/// `l_r(z) = |p + q z|`.
pub fn length_l(r: Slope, z: &DiskPoint) -> f64 {
    let (p, q) = (r.p as f64, r.q as f64);
    (p + q * z.x).hypot(q * z.y)
}

pub fn length_l_squared_exact(r: Slope, z: &DiskPoint) -> Option<Rational> {
    let (x, y) = z.exact?;
    let (p, q) = (Rational::from_integer(r.p), Rational::from_integer(r.q));
    Some((p + q * x) * (p + q * x) + (q * y) * (q * y))
}

/// `K_{r,r'}(z) = y |pq' − p'q| / (l_r l_{r'})`.
pub fn k_value(r: Slope, r_prime: Slope, z: &DiskPoint) -> Result<f64> {
    if r == r_prime {
        return Err(Error::EqualSlopes(r.to_string()));
    }
    Ok(z.y * r.det(&r_prime).abs() as f64 / (length_l(r, z) * length_l(r_prime, z)))
}

pub fn k_squared_exact(r: Slope, r_prime: Slope, z: &DiskPoint) -> Result<Option<Rational>> {
    if r == r_prime {
        return Err(Error::EqualSlopes(r.to_string()));
    }
    let Some((_, y)) = z.exact else { return Ok(None) };
    let det = Rational::from_integer(r.det(&r_prime));
    let (l1, l2) = (
        length_l_squared_exact(r, z).unwrap(),
        length_l_squared_exact(r_prime, z).unwrap(),
    );
    Ok(Some(y * y * det * det / (l1 * l2)))
}

/// `sech` of the distance from `z` to the geodesic with endpoints `-r`, `-r'`.
pub fn k_via_distance(r: Slope, r_prime: Slope, z: &DiskPoint) -> Result<f64> {
    let g = Geodesic::for_slopes(r, r_prime)?;
    Ok(sech_from_sinh(sinh_dist(z, &g)))
}

/// `sech(asinh s) = 1/√(1 + s²)`.
pub fn sech_from_sinh(s: f64) -> f64 {
    1.0 / (1.0 + s * s).sqrt()
}

/// `sech` of the distance to a geodesic given by its endpoints.
pub fn k_of_geodesic(z: &DiskPoint, g: &Geodesic) -> f64 {
    sech_from_sinh(sinh_dist(z, g))
}

/// `J_r(z) = y / l_r(z)²`.
pub fn j_value(r: Slope, z: &DiskPoint) -> f64 {
    let l = length_l(r, z);
    z.y / (l * l)
}

pub fn j_exact(r: Slope, z: &DiskPoint) -> Option<Rational> {
    let (_, y) = z.exact?;
    Some(y / length_l_squared_exact(r, z)?)
}

/// The open horodisk `{J_{p/q} > 1}`; for `q = 0` this is the half-plane `y > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Horodisk {
    pub p: i64,
    pub q: i64,
}

impl Horodisk {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        let s = Slope::from_vector(p, q)?;
        if s.p.abs() != p.abs() {
            return Err(Error::NotCoprime { p, q });
        }
        Ok(Horodisk { p: s.p, q: s.q })
    }

    /// Euclidean centre `(-p/q, 1/(2q²))` and radius `1/(2q²)`; `None` at `∞`.
    pub fn circle(&self) -> Option<Circle> {
        (self.q != 0).then(|| {
            let r = 0.5 / (self.q * self.q) as f64;
            Circle {
                cx: -(self.p as f64) / self.q as f64,
                cy: r,
                radius: r,
            }
        })
    }

    pub fn contains(&self, z: &DiskPoint) -> bool {
        let safe = |r: Rational| crate::veech::exact_is_safe(r);
        if let Some((x, y)) = z.exact.filter(|&(x, y)| safe(x) && safe(y) && self.q <= 1000) {
            // J > 1, i.e. y > (p + qx)² + (qy)²
            let (p, q) = (Rational::from_integer(self.p), Rational::from_integer(self.q));
            let (a, b) = (p + q * x, q * y);
            return y > a * a + b * b;
        }
        match self.circle() {
            None => z.y > 1.0,
            Some(c) => c.contains(z.x, z.y),
        }
    }
}

pub fn in_horodisk(z: &DiskPoint, p: i64, q: i64) -> Result<bool> {
    Ok(Horodisk::new(p, q)?.contains(z))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.cx).powi(2) + (y - self.cy).powi(2) < self.radius * self.radius
    }

    /// Points of the circle with the given `x`, upper one first.
    pub fn at_x(&self, x: f64) -> Option<(f64, f64)> {
        let h = self.radius * self.radius - (x - self.cx).powi(2);
        (h >= 0.0).then(|| (self.cy + h.sqrt(), self.cy - h.sqrt()))
    }
}

/// The set `{K_γ > k0}` of points closer than `arcsech k0` to `γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BananaNeighborhood {
    pub geodesic: Geodesic,
    pub k0: f64,
}

impl BananaNeighborhood {
    pub fn new(geodesic: Geodesic, k0: f64) -> Result<Self> {
        if !(k0 > 0.0 && k0 <= 1.0) {
            return Err(Error::InvalidParameter(format!("banana threshold {k0} not in (0, 1]")));
        }
        Ok(BananaNeighborhood { geodesic, k0 })
    }

    /// Banana at the covering threshold `√(143/144)`.
    pub fn covering(geodesic: Geodesic) -> Self {
        BananaNeighborhood {
            geodesic,
            k0: cover_threshold(),
        }
    }

    pub fn contains(&self, z: &DiskPoint) -> bool {
        k_of_geodesic(z, &self.geodesic) > self.k0
    }
}

/// The two circles bounding `V_{-n,1}` at the covering threshold: the first is
/// centred below the real axis (`C_n`), the second above (`C^n`).
pub fn banana_circles(n: i64) -> Result<(Circle, Circle)> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "banana index n = {n} must be at least 1"
        )));
    }
    let s = 143f64.sqrt();
    let m = (1 + n) as f64 / 2.0;
    let cx = (1 - n) as f64 / 2.0;
    let radius = m * (144f64 / 143.0).sqrt();
    Ok((Circle { cx, cy: -m / s, radius }, Circle { cx, cy: m / s, radius }))
}

#[derive(Clone, Copy, Debug)]
enum Vertex {
    Interior(f64, f64),
    Ideal(f64),
    IdealInfinity,
}

fn meet(g: &Geodesic, h: &Geodesic) -> Option<Vertex> {
    let (g0, g1) = g.endpoints();
    let (h0, h1) = h.endpoints();
    for e in [g0, g1] {
        if e == h0 || e == h1 {
            return Some(if e.is_infinite() {
                Vertex::IdealInfinity
            } else {
                Vertex::Ideal(e.to_f64())
            });
        }
    }
    let circle = |g: &Geodesic| match *g {
        Geodesic::Semicircle(a, b) => Some(((ratio_f64(a) + ratio_f64(b)) / 2.0, (ratio_f64(b) - ratio_f64(a)) / 2.0)),
        Geodesic::Vertical(_) => None,
    };
    let (x, m, rho) = match (*g, *h) {
        (Geodesic::Vertical(_), Geodesic::Vertical(_)) => return None,
        (Geodesic::Vertical(c), other) | (other, Geodesic::Vertical(c)) => {
            let (m, rho) = circle(&other).unwrap();
            (ratio_f64(c), m, rho)
        }
        _ => {
            let (m1, r1) = circle(g).unwrap();
            let (m2, r2) = circle(h).unwrap();
            ((r1 * r1 - r2 * r2 + m2 * m2 - m1 * m1) / (2.0 * (m2 - m1)), m1, r1)
        }
    };
    let y2 = rho * rho - (x - m) * (x - m);
    (y2 > 0.0).then(|| Vertex::Interior(x, y2.sqrt()))
}

fn side_sign(g: &Geodesic, v: Vertex) -> f64 {
    let s = match v {
        Vertex::Interior(x, y) => g.signed_sinh(&DiskPoint { x, y, exact: None }),
        Vertex::Ideal(x0) => match *g {
            Geodesic::Vertical(c) => x0 - ratio_f64(c),
            Geodesic::Semicircle(a, b) => (x0 - ratio_f64(a)) * (x0 - ratio_f64(b)),
        },
        Vertex::IdealInfinity => match g {
            Geodesic::Semicircle(..) => 1.0,
            Geodesic::Vertical(_) => 0.0,
        },
    };
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Point equidistant from the three sides of the triangle they bound
/// (vertices may be ideal). Maximises the smallest signed distance to
/// seed, then polishes with damped Newton on `(d₁ − d₂, d₂ − d₃)`.
pub fn incenter(g1: &Geodesic, g2: &Geodesic, g3: &Geodesic) -> Result<DiskPoint> {
    let sides = [*g1, *g2, *g3];
    let mut signs = [0.0; 3];
    let mut interior = Vec::new();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let v = meet(&sides[j], &sides[k]).ok_or(Error::NoTriangle)?;
        if let Vertex::Interior(x, y) = v {
            interior.push((x, y));
        }
        signs[i] = side_sign(&sides[i], v);
        if signs[i] == 0.0 {
            return Err(Error::NoTriangle);
        }
    }
    let dists = |x: f64, y: f64| -> [f64; 3] {
        let z = DiskPoint { x, y, exact: None };
        [0, 1, 2].map(|i| signs[i] * sides[i].signed_sinh(&z).asinh())
    };

    // seed: mean of finite vertices, else of the geodesics' highest points
    let seeds: Vec<(f64, f64)> = if interior.is_empty() {
        sides
            .iter()
            .map(|g| match *g {
                Geodesic::Vertical(c) => (ratio_f64(c), 1.0),
                Geodesic::Semicircle(a, b) => {
                    ((ratio_f64(a) + ratio_f64(b)) / 2.0, (ratio_f64(b) - ratio_f64(a)) / 2.0)
                }
            })
            .collect()
    } else {
        interior
    };
    let n = seeds.len() as f64;
    let sx = seeds.iter().map(|p| p.0).sum::<f64>() / n;
    let sy = seeds.iter().map(|p| p.1).sum::<f64>() / n;

    let objective = |v: &[f64]| -> f64 {
        let d = dists(v[0], v[1].exp());
        -d[0].min(d[1]).min(d[2])
    };
    let opts = NelderMeadOptions {
        max_iter: 2000,
        f_tol: 1e-12,
        x_tol: 1e-9,
    };
    let nm = nelder_mead(objective, &[sx, sy.ln()], &[0.1 * sy, 0.1], opts);
    let (mut x, mut y) = (nm.x[0], nm.x[1].exp());

    let residual = |x: f64, y: f64| -> [f64; 2] {
        let d = dists(x, y);
        [d[0] - d[1], d[1] - d[2]]
    };
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut res = residual(x, y);
    for _ in 0..100 {
        if norm(res) < 1e-13 {
            break;
        }
        let h = 1e-7 * y;
        let rx = residual(x + h, y);
        let ry = residual(x, y + h);
        let jac = [
            [(rx[0] - res[0]) / h, (ry[0] - res[0]) / h],
            [(rx[1] - res[1]) / h, (ry[1] - res[1]) / h],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dx = (res[0] * jac[1][1] - res[1] * jac[0][1]) / det;
        let dy = (jac[0][0] * res[1] - jac[1][0] * res[0]) / det;
        let mut t = 1.0;
        loop {
            let (nx, ny) = (x - t * dx, y - t * dy);
            if ny > 0.0 {
                let nr = residual(nx, ny);
                if norm(nr) < norm(res) {
                    x = nx;
                    y = ny;
                    res = nr;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-6 {
                break;
            }
        }
        if t < 1e-6 {
            break;
        }
    }
    let d = dists(x, y);
    if norm(res) >= 1e-12 || d.iter().any(|&di| di <= 0.0) {
        return Err(Error::NonConvergence(format!(
            "incenter residual {:.3e} at ({x}, {y})",
            norm(res)
        )));
    }
    DiskPoint::new(x, y)
}
