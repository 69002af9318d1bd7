//! KVol on the Teichmüller disk of `St(2s−1)`.
//!
//! On the fundamental domain,
//! `KVol(z) = (2s−1) · max{J₁(z), J₋₁(z), sup_{γ ∈ 𝒵} K_γ(z)}`,
//! where `𝒵` is the `Γ`-orbit of the geodesics with endpoints in `ℤ ∪ {∞}`
//! and `K_γ = sech dist(z, γ)`. Pairs outside `𝒵` never contribute: their
//! `I·K ≤ 9/10` is below `√(143/144)`, which `𝒵` always reaches on the domain.
//!
//! The supremum is searched over orbit points `w = g·z`: since
//! `dist(z, g⁻¹γ) = dist(g·z, γ)`, it is enough to find, for each coset of
//! `⟨T⟩ \ Γ` (a bottom row `(c, d)`), the integer-endpoint geodesic nearest to `w`.

use std::collections::BTreeMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyper::{cover_threshold, j_value, k_of_geodesic, BananaNeighborhood, DiskPoint, Geodesic};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::slope::{Rational, Slope};
use crate::veech::{exact_is_safe, reduce_to_fundamental_domain, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CandidateConfig {
    /// Size of the explicit seed family `γ_{-n,1}`, `n ≤ N`.
    pub base_endpoint_bound: i64,
    /// Initial bound `Λ₀` on `|cz + d|²` for orbit points; doubled each round.
    pub orbit_bound: f64,
    /// Rounds with an unchanged best value before the search stops.
    pub stability_rounds: u32,
    pub tolerance: f64,
    pub max_rounds: u32,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        CandidateConfig {
            base_endpoint_bound: 8,
            orbit_bound: 12.0,
            stability_rounds: 2,
            tolerance: 1e-10,
            max_rounds: 8,
        }
    }
}

impl CandidateConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.base_endpoint_bound > 0
            && self.orbit_bound > 0.0
            && self.stability_rounds > 0
            && self.tolerance > 0.0
            && self.max_rounds > self.stability_rounds;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("candidate config {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeodesicWitness {
    pub r: Slope,
    pub rp: Slope,
    pub k: f64,
}

impl GeodesicWitness {
    /// Slopes of the geodesic: the negated endpoints, sorted.
    fn from_geodesic(g: &Geodesic, k: f64) -> Self {
        let (a, b) = g.endpoints();
        let (r, rp) = (a.neg(), b.neg());
        let (r, rp) = if r <= rp { (r, rp) } else { (rp, r) };
        GeodesicWitness { r, rp, k }
    }

    pub fn geodesic(&self) -> Geodesic {
        Geodesic::for_slopes(self.r, self.rp).expect("distinct slopes")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchDiagnostics {
    pub candidates_examined: usize,
    pub orbit_points: usize,
    pub final_orbit_bound: f64,
    pub pruning_threshold: f64,
    pub rounds: u32,
    pub stable_rounds: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupK {
    pub k: f64,
    /// Every geodesic within tolerance of the best, sorted by `(r, r')`.
    pub witnesses: Vec<GeodesicWitness>,
    pub diagnostics: SearchDiagnostics,
}

/// `(sinh d, endpoints)` of the integer-endpoint geodesics nearest to `(x, y)`
/// (all within a relative `1e-9` of the minimum). `None` stands for `∞`.
pub fn nearest_integer_geodesics(x: f64, y: f64) -> (f64, Vec<(i64, Option<i64>)>) {
    let n = x.floor();
    let u0 = x - n;
    let n = n as i64;
    let y2 = y * y;
    let mut cands: Vec<(f64, (i64, Option<i64>))> = vec![(u0 / y, (n, None)), ((1.0 - u0) / y, (n + 1, None))];
    // half circles [n − i, n + 1 + j]: u = u0 + i, v = 1 − u0 + j
    let f = |u: f64, v: f64| (y2 - u * v).abs() / ((u + v) * y);
    let (umin, vmin) = (u0, 1.0 - u0);
    if vmin >= umin {
        let stop = y2 / vmin + 1.0;
        let mut i = 0i64;
        loop {
            let u = umin + i as f64;
            if u < 1e-9 {
                // circles [n, n + 1 + j] only tend to the vertical line at n
                i += 1;
                continue;
            }
            let jstar = (y2 / u - vmin).floor().max(0.0) as i64;
            for j in [jstar, jstar + 1] {
                cands.push((f(u, vmin + j as f64), (n - i, Some(n + 1 + j))));
            }
            if u > stop {
                break;
            }
            i += 1;
        }
    } else {
        let stop = y2 / umin + 1.0;
        let mut j = 0i64;
        loop {
            let v = vmin + j as f64;
            if v < 1e-9 {
                j += 1;
                continue;
            }
            let istar = (y2 / v - umin).floor().max(0.0) as i64;
            for i in [istar, istar + 1] {
                cands.push((f(umin + i as f64, v), (n - i, Some(n + 1 + j))));
            }
            if v > stop {
                break;
            }
            j += 1;
        }
    }
    let best = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let cut = best * (1.0 + 1e-9) + 1e-14;
    let mut out: Vec<_> = cands.into_iter().filter(|c| c.0 <= cut).map(|c| c.1).collect();
    out.sort();
    out.dedup();
    (best, out)
}

fn apply(m: [[i64; 2]; 2], e: Slope) -> Slope {
    let [[a, b], [c, d]] = m;
    Slope::from_vector(a * e.p + b * e.q, c * e.p + d * e.q).expect("invertible")
}

/// A matrix of `Γ` with bottom row `(c, d)`, `gcd = 1`, `c + d` odd.
fn complete_bottom_row(c: i64, d: i64) -> [[i64; 2]; 2] {
    let eg = d.extended_gcd(&c);
    // eg.x·d + eg.y·c = gcd = ±1
    let sign = eg.gcd.signum();
    let (mut a, mut b) = (sign * eg.x, -sign * eg.y);
    let wrong_parity = if c % 2 == 0 {
        b.rem_euclid(2) == 1
    } else {
        a.rem_euclid(2) == 1
    };
    if wrong_parity {
        a += c;
        b += d;
    }
    [[a, b], [c, d]]
}

/// The explicit covering family and its mirror images, as geodesics by endpoints.
pub fn seed_family(n_max: i64) -> Vec<Geodesic> {
    let mut out = Vec::new();
    let half = Slope::new_ratio(1, 2);
    for n in 1..=n_max {
        // γ_{-n,1}, mirrored (γ_{-1,n}), and under x ↦ 1 − x (γ_{0,n+1}, γ_{-n-1,0})
        for (a, b) in [(-n, 1), (-1, n), (0, n + 1), (-n - 1, 0)] {
            out.push(Geodesic::from_ints(a, b).expect("distinct"));
        }
    }
    out.push(Geodesic::from_ints(0, 2).unwrap());
    out.push(Geodesic::from_ints(-2, 0).unwrap());
    out.push(Geodesic::from_ints(-1, 1).unwrap());
    out.push(Geodesic::new(half, Slope::INFINITY).unwrap());
    out.push(Geodesic::new(half.neg(), Slope::INFINITY).unwrap());
    out.sort_by_key(|g| g.endpoints());
    out.dedup();
    out
}

struct Best {
    k: f64,
    tol: f64,
    ties: BTreeMap<(Slope, Slope), GeodesicWitness>,
}

impl Best {
    fn consider(&mut self, g: &Geodesic, k: f64) {
        if k > self.k + self.tol {
            self.k = k;
            let cut = k - self.tol;
            self.ties.retain(|_, w| w.k >= cut);
        } else if k < self.k - self.tol {
            return;
        } else if k > self.k {
            self.k = k;
        }
        let w = GeodesicWitness::from_geodesic(g, k);
        self.ties.insert((w.r, w.rp), w);
    }
}

/// `sup K_γ(z)` over `γ ∈ 𝒵`, by seeding and iterative deepening over orbit points.
pub fn sup_k_over_z(z: &DiskPoint, cfg: &CandidateConfig) -> Result<SupK> {
    cfg.validate()?;
    let mut best = Best {
        k: 0.0,
        tol: cfg.tolerance,
        ties: BTreeMap::new(),
    };
    let mut examined = 0usize;
    for g in seed_family(cfg.base_endpoint_bound) {
        examined += 1;
        best.consider(&g, k_of_geodesic(z, &g));
    }

    let (x, y) = (z.x, z.y);
    let mut orbit_points = 0usize;
    let mut prev_lambda = 0.0;
    let mut prev_best = best.k;
    let mut stable = 0u32;
    for round in 0..cfg.max_rounds {
        let lambda = cfg.orbit_bound * 2f64.powi(round as i32);
        let cmax = (lambda.sqrt() / y).floor() as i64;
        for c in 0..=cmax {
            let h2 = lambda - (c as f64 * y).powi(2);
            if h2 < 0.0 {
                continue;
            }
            let h = h2.sqrt();
            let centre = -(c as f64) * x;
            let (dlo, dhi) = if c == 0 {
                (1, 1)
            } else {
                ((centre - h).ceil() as i64, (centre + h).floor() as i64)
            };
            for d in dlo..=dhi {
                if (c + d).rem_euclid(2) != 1 || c.gcd(&d) != 1 {
                    continue;
                }
                let norm = (c as f64 * x + d as f64).powi(2) + (c as f64 * y).powi(2);
                if norm > lambda || norm <= prev_lambda {
                    continue;
                }
                orbit_points += 1;
                let m = complete_bottom_row(c, d);
                let [[a, b], _] = m;
                let wx = ((a as f64 * x + b as f64) * (c as f64 * x + d as f64) + (a * c) as f64 * y * y) / norm;
                let wy = y / norm;
                let (sinh, geos) = nearest_integer_geodesics(wx, wy);
                let k = 1.0 / (1.0 + sinh * sinh).sqrt();
                examined += geos.len();
                if k < best.k - best.tol {
                    continue;
                }
                let inv = [[d, -b], [-c, a]];
                for (e0, e1) in geos {
                    let p0 = apply(inv, Slope::integer(e0));
                    let p1 = apply(inv, e1.map_or(Slope::INFINITY, Slope::integer));
                    let g = Geodesic::new(p0, p1)?;
                    best.consider(&g, k_of_geodesic(z, &g));
                }
            }
        }
        prev_lambda = lambda;
        if round > 0 {
            if (best.k - prev_best).abs() <= cfg.tolerance {
                stable += 1;
            } else {
                stable = 0;
            }
        }
        prev_best = best.k;
        let diagnostics = SearchDiagnostics {
            candidates_examined: examined,
            orbit_points,
            final_orbit_bound: lambda,
            pruning_threshold: best.k - cfg.tolerance,
            rounds: round + 1,
            stable_rounds: stable,
        };
        if stable >= cfg.stability_rounds {
            return Ok(SupK {
                k: best.k,
                witnesses: best.ties.into_values().collect(),
                diagnostics,
            });
        }
        if round + 1 == cfg.max_rounds {
            return Err(Error::Unstable(format!(
                "best K {} still moving after {} rounds (Λ = {lambda}, {examined} candidates)",
                best.k, diagnostics.rounds
            )));
        }
    }
    unreachable!("max_rounds > 0")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    #[serde(rename = "J-term")]
    JTerm,
    #[serde(rename = "geodesic-pair")]
    GeodesicPair,
}

impl std::fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WitnessKind::JTerm => "J-term",
            WitnessKind::GeodesicPair => "geodesic-pair",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KVolResult {
    pub s: i64,
    pub input: DiskPoint,
    /// The point in the fundamental domain the formula is applied at.
    pub reduced: DiskPoint,
    pub reduction: String,
    pub value: f64,
    /// `(J₁, J₋₁)` at the reduced point.
    pub j_terms: (f64, f64),
    pub best_geodesic: Option<GeodesicWitness>,
    pub witnesses: Vec<GeodesicWitness>,
    pub witness_kind: WitnessKind,
    /// The slope (`1` or `-1`) of the larger `J` term.
    pub j_slope: i64,
    pub search_diagnostics: SearchDiagnostics,
}

pub fn kvol_at(s: i64, z: &DiskPoint, cfg: &CandidateConfig) -> Result<KVolResult> {
    if s < 2 {
        return Err(Error::InvalidGenus(s));
    }
    let (zr, g) = reduce_to_fundamental_domain(z);
    let (j1, jm1) = (j_value(Slope::integer(1), &zr), j_value(Slope::integer(-1), &zr));
    let sup = sup_k_over_z(&zr, cfg)?;
    let jmax = j1.max(jm1);
    let (m, kind) = if jmax > sup.k + cfg.tolerance {
        (jmax, WitnessKind::JTerm)
    } else {
        (sup.k.max(jmax), WitnessKind::GeodesicPair)
    };
    let best_geodesic = sup.witnesses.iter().copied().max_by(|a, b| a.k.total_cmp(&b.k));
    Ok(KVolResult {
        s,
        input: *z,
        reduced: zr,
        reduction: word_of(&g),
        value: (2 * s - 1) as f64 * m,
        j_terms: (j1, jm1),
        best_geodesic,
        witnesses: sup.witnesses,
        witness_kind: kind,
        j_slope: if j1 >= jm1 { 1 } else { -1 },
        search_diagnostics: sup.diagnostics,
    })
}

fn word_of(g: &GroupElement) -> String {
    g.word_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    InsideV,
    Outside,
}

/// Inside one of the open disks `(x ± 1)² + (y − 1/2)² < 1/4` (the horodisks of `∓1`).
pub fn classify_region(z: &DiskPoint) -> Region {
    let inside = if let Some((x, y)) = z.exact.filter(|&(x, y)| exact_is_safe(x) && exact_is_safe(y)) {
        let one = Rational::from_integer(1);
        let half = Rational::new(1, 2);
        let quarter = Rational::new(1, 4);
        let dy = (y - half) * (y - half);
        (x - one) * (x - one) + dy < quarter || (x + one) * (x + one) + dy < quarter
    } else {
        v_margin(z) < 0.0
    };
    if inside {
        Region::InsideV
    } else {
        Region::Outside
    }
}

/// Signed Euclidean distance to the boundary of `V_{±1}` (negative inside).
pub fn v_margin(z: &DiskPoint) -> f64 {
    let dy = z.y - 0.5;
    let d1 = ((z.x - 1.0).powi(2) + dy * dy).sqrt() - 0.5;
    let d2 = ((z.x + 1.0).powi(2) + dy * dy).sqrt() - 0.5;
    d1.min(d2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub x: f64,
    pub y: f64,
    pub kvol: Option<f64>,
    pub witness_kind: String,
    pub r: String,
    pub rp: String,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub const SCAN_HEADER: &str = "x,y,kvol,witness_kind,r,rp,K";

/// Decimal with 12 significant digits, trailing zeros trimmed.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

impl ScanRow {
    pub fn from_result(x: f64, y: f64, res: Result<KVolResult>) -> Self {
        match res {
            Ok(k) => {
                let (r, rp) = match (k.witness_kind, k.best_geodesic) {
                    (WitnessKind::JTerm, _) => (k.j_slope.to_string(), String::new()),
                    (WitnessKind::GeodesicPair, Some(w)) => (w.r.to_string(), w.rp.to_string()),
                    (WitnessKind::GeodesicPair, None) => (String::new(), String::new()),
                };
                ScanRow {
                    x,
                    y,
                    kvol: Some(k.value),
                    witness_kind: k.witness_kind.to_string(),
                    r,
                    rp,
                    k: k.best_geodesic.map(|w| w.k),
                    error: None,
                }
            }
            Err(e) => ScanRow {
                x,
                y,
                kvol: None,
                witness_kind: "error".into(),
                r: String::new(),
                rp: String::new(),
                k: None,
                error: Some(e.to_string()),
            },
        }
    }

    /// Fields in `SCAN_HEADER` order.
    pub fn record(&self) -> [String; 7] {
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        [
            format_sig(self.x),
            format_sig(self.y),
            opt(self.kvol),
            self.witness_kind.clone(),
            self.r.clone(),
            self.rp.clone(),
            opt(self.k),
        ]
    }

    pub fn to_csv(&self) -> String {
        self.record().join(",")
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if hi < lo {
        return Vec::new();
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Row-major scan (`y` outer, `x` inner). Points are reduced to the domain by
/// `kvol_at`; per-point failures become rows with `witness_kind = error`.
pub fn scan(
    s: i64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    step: f64,
    cfg: &CandidateConfig,
) -> Result<Vec<ScanRow>> {
    if step.is_nan() || step <= 0.0 || !step.is_finite() {
        return Err(Error::InvalidParameter(format!("scan step {step} must be positive")));
    }
    if s < 2 {
        return Err(Error::InvalidGenus(s));
    }
    cfg.validate()?;
    let points: Vec<(f64, f64)> = grid(y_range.0, y_range.1, step)
        .into_iter()
        .flat_map(|y| grid(x_range.0, x_range.1, step).into_iter().map(move |x| (x, y)))
        .collect();
    Ok(points
        .par_iter()
        .map(|&(x, y)| ScanRow::from_result(x, y, DiskPoint::new(x, y).and_then(|z| kvol_at(s, &z, cfg))))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimumResult {
    pub point: DiskPoint,
    pub value: f64,
    pub mirrored_value: f64,
    pub coarse_point: DiskPoint,
    pub coarse_value: f64,
    pub evaluations: usize,
}

/// Coarse grid on `x ∈ [0, 1]` of the domain, then Nelder–Mead restarts from the best cell.
pub fn find_minimum(s: i64, cfg: &CandidateConfig) -> Result<MinimumResult> {
    if s < 2 {
        return Err(Error::InvalidGenus(s));
    }
    cfg.validate()?;
    let step = 0.02;
    let points: Vec<(f64, f64)> = grid(0.0, 1.0, step)
        .into_iter()
        .flat_map(|x| grid(step, 2.0, step).into_iter().map(move |y| (x, y)))
        .filter(|&(x, y)| x * x + y * y >= 1.0)
        .collect();
    let values: Vec<Result<f64>> = points
        .par_iter()
        .map(|&(x, y)| kvol_at(s, &DiskPoint::new(x, y)?, cfg).map(|r| r.value))
        .collect();
    let mut evaluations = points.len();
    let mut coarse = (points[0], f64::INFINITY);
    for (p, v) in points.iter().zip(values) {
        let v = v?;
        if v < coarse.1 {
            coarse = (*p, v);
        }
    }

    let failure = std::sync::Mutex::new(None);
    let objective = |v: &[f64]| -> f64 {
        let Ok(z) = DiskPoint::new(v[0], v[1]) else {
            return f64::INFINITY;
        };
        match kvol_at(s, &z, cfg) {
            Ok(r) => r.value,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let opts = NelderMeadOptions {
        max_iter: 2000,
        f_tol: 1e-14,
        x_tol: 1e-11,
    };
    let (mut x, mut val) = (vec![coarse.0 .0, coarse.0 .1], coarse.1);
    let mut h = step;
    for _ in 0..6 {
        let r = nelder_mead(objective, &x, &[h, h], opts);
        evaluations += r.iterations * 2 + 3;
        let improved = r.value < val - 1e-15;
        if r.value <= val {
            x = r.x;
            val = r.value;
        }
        if !improved && h < 1e-6 {
            break;
        }
        h = (h * 0.1).max(1e-8);
    }
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    if let Some((p, v, n)) = polish_vertex(s, (x[0], x[1]), cfg)? {
        evaluations += n;
        if v < val {
            x = vec![p.0, p.1];
            val = v;
        }
    }
    let point = DiskPoint::new(x[0], x[1])?;
    let mirrored_value = kvol_at(s, &point.mirror(), cfg)?.value;
    if !val.is_finite() {
        return Err(Error::NonConvergence(
            "minimum refinement produced no finite value".into(),
        ));
    }
    Ok(MinimumResult {
        point,
        value: val,
        mirrored_value,
        coarse_point: DiskPoint::new(coarse.0 .0, coarse.0 .1)?,
        coarse_value: coarse.1,
        evaluations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Piece {
    J(i64),
    K(Geodesic),
}

impl Piece {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let z = DiskPoint { x, y, exact: None };
        match self {
            Piece::J(r) => j_value(Slope::integer(*r), &z),
            Piece::K(g) => k_of_geodesic(&z, g),
        }
    }
}

/// `(point, KVol there, evaluations spent)`.
type Polished = ((f64, f64), f64, usize);

/// Refines a kinked minimum: solves `f_a = f_b = f_c` for every triple of the
/// smooth pieces active near `p` and keeps the best point by true KVol.
fn polish_vertex(s: i64, p: (f64, f64), cfg: &CandidateConfig) -> Result<Option<Polished>> {
    let mut pieces = vec![Piece::J(1), Piece::J(-1)];
    let delta = 1e-3;
    let mut evaluations = 0;
    for (dx, dy) in [
        (0.0, 0.0),
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (0.7, 0.7),
        (-0.7, 0.7),
        (0.7, -0.7),
        (-0.7, -0.7),
    ] {
        let z = DiskPoint::new(p.0 + delta * dx, p.1 + delta * dy)?;
        let (zr, _) = reduce_to_fundamental_domain(&z);
        if (zr.x - z.x).abs() > 1e-12 || (zr.y - z.y).abs() > 1e-12 {
            // the pieces are written in the coordinates of p's copy of the domain
            continue;
        }
        evaluations += 1;
        for w in kvol_at(s, &z, cfg)?.witnesses {
            let piece = Piece::K(w.geodesic());
            if !pieces.contains(&piece) {
                pieces.push(piece);
            }
        }
    }
    let mut best: Option<((f64, f64), f64)> = None;
    let m = pieces.len();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let (fa, fb, fc) = (pieces[a], pieces[b], pieces[c]);
                let res = |x: f64, y: f64| [fa.eval(x, y) - fb.eval(x, y), fb.eval(x, y) - fc.eval(x, y)];
                let (mut x, mut y) = p;
                for _ in 0..50 {
                    let r = res(x, y);
                    if r[0].abs().max(r[1].abs()) < 1e-15 {
                        break;
                    }
                    let h = 1e-7;
                    let (rx, ry) = (res(x + h, y), res(x, y + h));
                    let j = [
                        [(rx[0] - r[0]) / h, (ry[0] - r[0]) / h],
                        [(rx[1] - r[1]) / h, (ry[1] - r[1]) / h],
                    ];
                    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                    if det.abs() < 1e-300 {
                        break;
                    }
                    x -= (r[0] * j[1][1] - r[1] * j[0][1]) / det;
                    y -= (j[0][0] * r[1] - j[1][0] * r[0]) / det;
                    if y.is_nan() || y <= 0.0 || !x.is_finite() {
                        break;
                    }
                }
                if y.is_nan() || y <= 0.0 || (x - p.0).hypot(y - p.1) > 10.0 * delta {
                    continue;
                }
                evaluations += 1;
                let v = kvol_at(s, &DiskPoint::new(x, y)?, cfg)?.value;
                if best.is_none_or(|b| v < b.1) {
                    best = Some(((x, y), v));
                }
            }
        }
    }
    Ok(best.map(|(p, v)| (p, v, evaluations)))
}

/// The covering family of region `𝒜`: `V_{0,2}`, `V_{1/2,∞}`, `V_{-n,1}` (`n ≤ n_max`).
pub fn covering_family(n_max: i64) -> Vec<(String, BananaNeighborhood)> {
    let mut out = vec![
        (
            "V_{0,2}".to_string(),
            BananaNeighborhood::covering(Geodesic::from_ints(0, 2).unwrap()),
        ),
        (
            "V_{1/2,inf}".to_string(),
            BananaNeighborhood::covering(Geodesic::new(Slope::new_ratio(1, 2), Slope::INFINITY).unwrap()),
        ),
    ];
    for n in 1..=n_max {
        out.push((
            format!("V_{{-{n},1}}"),
            BananaNeighborhood::covering(Geodesic::from_ints(-n, 1).unwrap()),
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub grid_step: f64,
    pub n_max: i64,
    pub y_max: f64,
    pub samples: usize,
    pub excluded_near_k: usize,
    pub uncovered: Vec<(f64, f64)>,
    /// Whether `k` itself lies in some open banana (it should not).
    pub k_covered: bool,
}

impl CoverReport {
    pub fn passed(&self) -> bool {
        self.uncovered.is_empty() && !self.k_covered
    }
}

/// Samples region `𝒜` (`1/2 ≤ x ≤ 1`, above `γ_{-1,1}`) up to `y = 7`, beyond
/// which the wedge `V_{1/2,∞}` contains all of `𝒜`, minus a `grid_step`-disk at `k`.
pub fn verify_covering(grid_step: f64, n_max: i64) -> Result<CoverReport> {
    if grid_step.is_nan() || grid_step <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "grid step {grid_step} must be positive"
        )));
    }
    if n_max < 1 {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} must be at least 1")));
    }
    let family = covering_family(n_max);
    let k = DiskPoint::k_point();
    let y_max = 7.0;
    let mut samples = 0;
    let mut excluded = 0;
    let mut uncovered = Vec::new();
    for x in grid(0.5, 1.0, grid_step) {
        for y in grid(grid_step, y_max, grid_step) {
            if x * x + y * y < 1.0 - 1e-12 {
                continue;
            }
            if (x - k.x).hypot(y - k.y) < grid_step {
                excluded += 1;
                continue;
            }
            samples += 1;
            let z = DiskPoint::new(x, y)?;
            if !family.iter().any(|(_, b)| b.contains(&z)) {
                uncovered.push((x, y));
            }
        }
    }
    let k_covered = family.iter().any(|(_, b)| b.contains(&k));
    Ok(CoverReport {
        grid_step,
        n_max,
        y_max,
        samples,
        excluded_near_k: excluded,
        uncovered,
        k_covered,
    })
}

/// Points of `𝒵 ∩ 𝒟`, each with a geodesic of `𝒵` (by endpoints) through it.
pub fn z_points_in_domain() -> Vec<(DiskPoint, Geodesic)> {
    let q = |n, d| Rational::new(n, d);
    let ex = |x, y| DiskPoint::exact(x, y).unwrap();
    let fl = |x: f64, y: f64| DiskPoint::new(x, y).unwrap();
    let g = |a, b| Geodesic::from_ints(a, b).unwrap();
    let v = |n, d| Geodesic::Vertical(q(n, d));
    vec![
        (ex(q(0, 1), q(1, 1)), g(-1, 1)),
        (ex(q(0, 1), q(2, 1)), v(0, 1)),
        (ex(q(0, 1), q(3, 1)), v(0, 1)),
        (fl(0.5, 0.75f64.sqrt()), g(-1, 1)),
        (fl(-0.5, 0.75f64.sqrt()), g(-1, 1)),
        (
            ex(q(1, 2), q(2, 1)),
            Geodesic::new(Slope::new_ratio(1, 2), Slope::INFINITY).unwrap(),
        ),
        (ex(q(1, 1), q(3, 2)), v(1, 1)),
        (ex(q(-1, 1), q(2, 1)), v(-1, 1)),
        (fl(0.6, 0.84f64.sqrt()), g(0, 2)),
        (fl(-0.6, 0.84f64.sqrt()), g(-2, 0)),
        (fl(0.5, 1.25f64.sqrt()), g(-2, 1)),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverBoundReport {
    pub s: i64,
    pub grid_points: usize,
    pub grid_violations: Vec<(f64, f64, f64)>,
    pub z_points: Vec<(f64, f64, f64)>,
    pub z_violations: Vec<(f64, f64, f64)>,
    /// Non-`𝒵` pairs examined by the witness search, and those with `I·K` above KVol/(2s−1).
    pub non_end_pairs_checked: usize,
    pub non_end_violations: Vec<String>,
}

impl CoverBoundReport {
    pub fn passed(&self) -> bool {
        self.grid_violations.is_empty() && self.z_violations.is_empty() && self.non_end_violations.is_empty()
    }
}

/// `KVol ≤ 2s−1` off `V_{±1}` on a grid of the domain (`y ≤ 3`), and `= 2s−1` on
/// `𝒵 ∩ 𝒟`. With `witness_search`, every non-`𝒵` pair of height `≤ 6` is also
/// checked at a subset of grid points never to beat the reported value.
pub fn general_cover_bound(
    s: i64,
    grid_n: usize,
    witness_search: bool,
    cfg: &CandidateConfig,
) -> Result<CoverBoundReport> {
    if s < 2 {
        return Err(Error::InvalidGenus(s));
    }
    if grid_n < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points per side".into()));
    }
    let n = (2 * s - 1) as f64;
    let tol = 1e-9;
    let pts: Vec<(f64, f64)> = (0..grid_n)
        .flat_map(|i| {
            (1..=grid_n).map(move |j| {
                (
                    -1.0 + 2.0 * i as f64 / (grid_n - 1) as f64,
                    3.0 * j as f64 / grid_n as f64,
                )
            })
        })
        .filter(|&(x, y)| x * x + y * y >= 1.0)
        .collect();
    let rows: Vec<Result<(f64, f64, f64, bool)>> = pts
        .par_iter()
        .map(|&(x, y)| {
            let z = DiskPoint::new(x, y)?;
            let outside = classify_region(&z) == Region::Outside && v_margin(&z) > tol;
            Ok((x, y, kvol_at(s, &z, cfg)?.value, outside))
        })
        .collect();
    let mut grid_violations = Vec::new();
    let mut grid_points = 0;
    let mut checked_outside = Vec::new();
    for r in rows {
        let (x, y, v, outside) = r?;
        if outside {
            grid_points += 1;
            checked_outside.push((x, y, v));
            if v > n + tol {
                grid_violations.push((x, y, v));
            }
        }
    }
    let mut z_points = Vec::new();
    let mut z_violations = Vec::new();
    for (z, g) in z_points_in_domain() {
        let on = crate::hyper::sinh_dist(&z, &g) < 1e-12;
        let v = kvol_at(s, &z, cfg)?.value;
        z_points.push((z.x, z.y, v));
        if !on || (v - n).abs() > tol {
            z_violations.push((z.x, z.y, v));
        }
    }
    let mut non_end_pairs_checked = 0;
    let mut non_end_violations = Vec::new();
    if witness_search {
        let oracle = crate::veech::EndZOracle::new(s)?;
        let slopes = crate::slope::slopes_up_to(6);
        let mut non_end = Vec::new();
        for (i, &r) in slopes.iter().enumerate() {
            for &rp in &slopes[i + 1..] {
                let ratio = oracle.table().intersection_ratio(r, rp)?.value;
                if ratio != Rational::from_integer(1) {
                    non_end.push((r, rp, crate::hyper::ratio_f64(ratio)));
                }
            }
        }
        for &(x, y, v) in checked_outside.iter().step_by(17) {
            let z = DiskPoint::new(x, y)?;
            for &(r, rp, ratio) in &non_end {
                non_end_pairs_checked += 1;
                let ik = ratio * crate::hyper::k_value(r, rp, &z)?;
                if n * ik > v + tol {
                    non_end_violations.push(format!("({x}, {y}): I·K = {ik} for ({r}, {rp}) beats {v}/{n}"));
                }
            }
        }
    }
    Ok(CoverBoundReport {
        s,
        grid_points,
        grid_violations,
        z_points,
        z_violations,
        non_end_pairs_checked,
        non_end_violations,
    })
}

/// `(2s−1)·√(143/144)`, the minimum value.
pub fn closed_form_minimum(s: i64) -> f64 {
    (2 * s - 1) as f64 * cover_threshold()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_geodesic_closed_cases() {
        // under the Farey arc [0, 1]
        let (s, g) = nearest_integer_geodesics(0.5, 0.3);
        assert_eq!(g, vec![(0, Some(1))]);
        assert!((s - (0.25 - 0.09) / 0.3).abs() < 1e-15);
        // on the unit circle
        let (s, g) = nearest_integer_geodesics(0.0, 1.0);
        assert!(s.abs() < 1e-15);
        assert!(g.contains(&(-1, Some(1))) && g.contains(&(0, None)));
    }

    #[test]
    fn nearest_geodesic_matches_brute_force() {
        let mut rng = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        const R: i64 = 150;
        for _ in 0..60 {
            let (x, y) = (next() * 6.0 - 3.0, 0.05 + next() * 4.0);
            let z = DiskPoint::new(x, y).unwrap();
            let mut brute = f64::INFINITY;
            for a in -R..=R {
                brute = brute.min(crate::hyper::sinh_dist(
                    &z,
                    &Geodesic::Vertical(Rational::from_integer(a)),
                ));
                for b in a + 1..=R {
                    brute = brute.min(crate::hyper::sinh_dist(&z, &Geodesic::from_ints(a, b).unwrap()));
                }
            }
            let (s, geos) = nearest_integer_geodesics(x, y);
            assert!(s <= brute + 1e-12, "({x}, {y}): {s} vs {brute}");
            let in_range = geos
                .iter()
                .any(|&(a, b)| a.abs() <= R && b.is_none_or(|b| b.abs() <= R));
            if in_range {
                assert!((s - brute).abs() < 1e-12, "({x}, {y}): {s} vs {brute}");
            }
            for (a, b) in geos {
                let g = match b {
                    None => Geodesic::Vertical(Rational::from_integer(a)),
                    Some(b) => Geodesic::from_ints(a, b).unwrap(),
                };
                assert!((crate::hyper::sinh_dist(&z, &g) - s).abs() < 1e-9 * s.max(1e-3));
            }
        }
    }

    #[test]
    fn completed_rows_are_in_gamma() {
        for c in 0..12i64 {
            for d in -12..12i64 {
                if (c + d).rem_euclid(2) == 1 && c.gcd(&d) == 1 && (c > 0 || d == 1) {
                    assert!(crate::veech::in_gamma(complete_bottom_row(c, d)), "({c}, {d})");
                }
            }
        }
    }

    #[test]
    fn value_at_i_is_two_s_minus_one() {
        let cfg = CandidateConfig::default();
        for s in 2..=5 {
            let r = kvol_at(s, &DiskPoint::new(0.0, 1.0).unwrap(), &cfg).unwrap();
            assert!((r.value - (2 * s - 1) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn value_at_k() {
        let r = kvol_at(2, &DiskPoint::k_point(), &CandidateConfig::default()).unwrap();
        assert!((r.value - closed_form_minimum(2)).abs() < 1e-12, "{}", r.value);
        let names: Vec<(Slope, Slope)> = r.witnesses.iter().map(|w| (w.r, w.rp)).collect();
        for (a, b) in [(-1, 1), (-1, 2), (-2, 0)] {
            assert!(names.contains(&(Slope::integer(a), Slope::integer(b))), "{names:?}");
        }
    }

    #[test]
    fn regions() {
        let p = |x, y| DiskPoint::new(x, y).unwrap();
        assert_eq!(classify_region(&p(1.0, 0.25)), Region::InsideV);
        assert_eq!(classify_region(&p(-1.0, 0.25)), Region::InsideV);
        assert_eq!(classify_region(&p(0.0, 1.0)), Region::Outside);
        assert_eq!(classify_region(&p(0.99, 0.45)), Region::InsideV);
    }

    #[test]
    fn sig_format() {
        assert_eq!(format_sig(3.0), "3");
        assert_eq!(format_sig(2.98955181282523), "2.98955181283");
        assert_eq!(format_sig(0.000123456789012345), "0.000123456789012");
        assert_eq!(format_sig(-0.5), "-0.5");
    }
}
