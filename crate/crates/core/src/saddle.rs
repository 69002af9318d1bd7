//! Saddle connections of `St(2s−1)` in rational directions.
//!
//! A direction `(p, q)` is traced at the square-tiled point `(x, y) = (0, 1)`,
//! where it is the Euclidean vector `(p, q)`. Every square corner is the single
//! cone point, so the `2s−1` outgoing separatrices leave from one corner of each
//! square (bottom-left when `p ≥ 0`, bottom-right when `p < 0`). Each one crosses
//! `|p| − 1` vertical and `q − 1` horizontal edges before hitting a corner again.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::origami::{HomologyClass, IntersectionForm, StaircaseSurface};
use crate::slope::{Direction, Rational, Slope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Right,
    Left,
    Top,
}

/// One edge crossing: the trace leaves square `from` through `edge` into `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub edge: EdgeKind,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopLeft,
    TopRight,
}

impl Corner {
    fn on_right(self) -> bool {
        matches!(self, Corner::BottomRight | Corner::TopRight)
    }

    fn on_top(self) -> bool {
        matches!(self, Corner::TopLeft | Corner::TopRight)
    }
}

/// Combinatorial record of a traced segment starting at the cone point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start_square: usize,
    pub start_corner: Corner,
    pub crossings: Vec<Crossing>,
    /// `None` while the trace has not reached the cone point again.
    pub end_corner: Option<Corner>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaddleConnection {
    pub direction: Direction,
    pub start_square: usize,
    pub end_square: usize,
    pub crossings: Vec<Crossing>,
    pub homology: HomologyClass,
}

impl SaddleConnection {
    pub fn right_exits(&self) -> usize {
        self.crossings.iter().filter(|c| c.edge != EdgeKind::Top).count()
    }

    pub fn top_exits(&self) -> usize {
        self.crossings.iter().filter(|c| c.edge == EdgeKind::Top).count()
    }
}

/// Side of a unit square through which a straight piece enters or leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Port {
    Corner(Corner),
    Left,
    Right,
    Bottom,
    Top,
}

impl Port {
    fn on_right(self) -> bool {
        match self {
            Port::Corner(c) => c.on_right(),
            Port::Right => true,
            _ => false,
        }
    }

    fn on_top(self) -> bool {
        match self {
            Port::Corner(c) => c.on_top(),
            Port::Top => true,
            _ => false,
        }
    }
}

/// Homology class of a closed trace.
///
/// Each piece inside a square is slid, keeping its endpoints on their edges, to
/// the path entry-midpoint → centre → exit-midpoint. Pairing that path with the
/// core curves pushed slightly right/up gives `Int(h, β_col)` and `−Int(h, α_row)`
/// square by square, which are the coordinates `ε` and `φ`.
pub fn homology_of_trace(surface: &StaircaseSurface, trace: &Trace) -> Result<HomologyClass> {
    let end_corner = trace.end_corner.ok_or_else(|| {
        Error::OpenTrace(format!(
            "trace from square {} never returns to a corner",
            trace.start_square
        ))
    })?;
    let mut h = HomologyClass::zero(surface.s);
    let mut square = trace.start_square;
    let mut entry = Port::Corner(trace.start_corner);
    for crossing in &trace.crossings {
        if crossing.from != square {
            return Err(Error::OpenTrace(format!(
                "crossing leaves square {} but the trace is in square {square}",
                crossing.from
            )));
        }
        let (exit, next_entry, expected) = match crossing.edge {
            EdgeKind::Right => (Port::Right, Port::Left, surface.right(square)),
            EdgeKind::Left => (Port::Left, Port::Right, surface.left(square)),
            EdgeKind::Top => (Port::Top, Port::Bottom, surface.up(square)),
        };
        if crossing.to != expected {
            return Err(Error::OpenTrace(format!(
                "square {square} is not glued to {} across its {:?} edge",
                crossing.to, crossing.edge
            )));
        }
        add_piece(surface, &mut h, square, entry, exit);
        square = crossing.to;
        entry = next_entry;
    }
    add_piece(surface, &mut h, square, entry, Port::Corner(end_corner));
    Ok(h)
}

fn add_piece(surface: &StaircaseSurface, h: &mut HomologyClass, square: usize, entry: Port, exit: Port) {
    let col = surface.column_of(square) - 1;
    let row = surface.row_of(square) - 1;
    h.eps[col] += exit.on_right() as i64 - entry.on_right() as i64;
    h.phi[row] += exit.on_top() as i64 - entry.on_top() as i64;
}

/// Edge crossings of the unrolled segment `t ↦ t(p, q)`, `0 < t < 1`, in order.
fn edge_events(d: Direction) -> Vec<EdgeKind> {
    let a = d.p.unsigned_abs() as i64;
    let b = d.q;
    let side = if d.p < 0 { EdgeKind::Left } else { EdgeKind::Right };
    let mut out = Vec::with_capacity((a + b) as usize);
    let (mut i, mut j) = (1, 1);
    // vertical crossings at t = i/a, horizontal at t = j/b; never simultaneous for coprime (a, b)
    while i < a || j < b {
        if j >= b || (i < a && i * b < j * a) {
            out.push(side);
            i += 1;
        } else {
            out.push(EdgeKind::Top);
            j += 1;
        }
    }
    out
}

fn corners(d: Direction) -> (Corner, Corner) {
    match (d.p.signum(), d.q) {
        (_, 0) => (Corner::BottomLeft, Corner::BottomRight),
        (0, _) => (Corner::BottomLeft, Corner::TopLeft),
        (1, _) => (Corner::BottomLeft, Corner::TopRight),
        _ => (Corner::BottomRight, Corner::TopLeft),
    }
}

fn check_direction(d: Direction) -> Result<()> {
    Slope::direction(d.p, d.q).map(|_| ())
}

/// Traces the separatrix of direction `d` leaving the cone point into `start_square`.
pub fn trace_from(surface: &StaircaseSurface, d: Direction, start_square: usize) -> Result<Trace> {
    check_direction(d)?;
    let (start_corner, end_corner) = corners(d);
    let mut square = start_square;
    let mut crossings = Vec::new();
    for edge in edge_events(d) {
        let to = match edge {
            EdgeKind::Right => surface.right(square),
            EdgeKind::Left => surface.left(square),
            EdgeKind::Top => surface.up(square),
        };
        crossings.push(Crossing { edge, from: square, to });
        square = to;
    }
    Ok(Trace {
        start_square,
        start_corner,
        crossings,
        end_corner: Some(end_corner),
    })
}

/// The `2s−1` saddle connections of direction `d`, one per start square.
pub fn trace_direction(surface: &StaircaseSurface, d: Direction) -> Result<Vec<SaddleConnection>> {
    check_direction(d)?;
    (1..=surface.n)
        .map(|start| {
            let trace = trace_from(surface, d, start)?;
            let homology = homology_of_trace(surface, &trace)?;
            let end_square = trace.crossings.last().map_or(start, |c| c.to);
            Ok(SaddleConnection {
                direction: d,
                start_square: start,
                end_square,
                crossings: trace.crossings,
                homology,
            })
        })
        .collect()
}

/// Which singular cycle a crossing word is read against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveFamily {
    /// Horizontal edges `e_1, e_i, e'_i`.
    E,
    /// Diagonal `(1, 1)` saddle connections `g_i, g'_i`.
    G,
}

impl fmt::Display for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveFamily::E => write!(f, "e-family"),
            CurveFamily::G => write!(f, "g-family"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossingLabel {
    E(usize),
    EPrime(usize),
    G(usize),
    GPrime(usize),
}

impl CrossingLabel {
    /// Bottom edge of square `k`.
    fn bottom_edge(k: usize) -> Self {
        match k {
            1 => CrossingLabel::E(1),
            k if k % 2 == 0 => CrossingLabel::E(k / 2 + 1),
            k => CrossingLabel::EPrime(k.div_ceil(2)),
        }
    }

    /// Bottom-left to top-right diagonal of square `k`.
    fn diagonal(k: usize) -> Self {
        if k % 2 == 1 {
            CrossingLabel::G(k.div_ceil(2))
        } else {
            CrossingLabel::GPrime(k / 2)
        }
    }
}

impl fmt::Display for CrossingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossingLabel::E(i) => write!(f, "e{i}"),
            CrossingLabel::EPrime(i) => write!(f, "e'{i}"),
            CrossingLabel::G(i) => write!(f, "g{i}"),
            CrossingLabel::GPrime(i) => write!(f, "g'{i}"),
        }
    }
}

/// Whether `family` is meaningful for `d`: the e-family needs a non-horizontal
/// direction, the g-family an odd direction other than `(1, 1)`.
pub fn family_applies(d: Direction, family: CurveFamily) -> bool {
    match family {
        CurveFamily::E => d.q != 0,
        CurveFamily::G => d.is_odd() && d.p != d.q,
    }
}

/// Labels of the curves of `family` crossed by the connection, in order along it,
/// with the crossing at the cone point left out.
pub fn crossing_word(
    surface: &StaircaseSurface,
    connection: &SaddleConnection,
    family: CurveFamily,
) -> Result<Vec<CrossingLabel>> {
    let d = connection.direction;
    if connection.start_square == 0 || connection.start_square > surface.n {
        return Err(Error::InvalidParameter(format!(
            "no square {} on St({})",
            connection.start_square, surface.n
        )));
    }
    if !family_applies(d, family) {
        return Err(Error::FamilyMismatch {
            family: family.to_string(),
            direction: format!("({}, {})", d.p, d.q),
        });
    }
    let mut square = connection.start_square;
    match family {
        CurveFamily::E => Ok(connection
            .crossings
            .iter()
            .filter(|c| c.edge == EdgeKind::Top)
            .map(|c| CrossingLabel::bottom_edge(c.to))
            .collect()),
        CurveFamily::G => {
            // diagonals y − x = k are met at t = k/(q − p); edges at i/|p| and j/q
            let span = d.q - d.p;
            let mut diagonal_times: Vec<Rational> = (1..span.abs()).map(|k| Rational::new(k, span.abs())).collect();
            diagonal_times.reverse();
            let (a, b) = (d.p.abs(), d.q);
            let mut edges = connection.crossings.iter();
            let mut edge_time = {
                let (mut i, mut j) = (0i64, 0i64);
                move |c: &Crossing| {
                    if c.edge == EdgeKind::Top {
                        j += 1;
                        Rational::new(j, b)
                    } else {
                        i += 1;
                        Rational::new(i, a)
                    }
                }
            };
            let mut next_edge = edges.next().map(|c| (edge_time(c), *c));
            let mut word = Vec::new();
            while let Some(t) = diagonal_times.pop() {
                while let Some((te, c)) = next_edge {
                    if te < t {
                        square = c.to;
                        next_edge = edges.next().map(|c| (edge_time(c), *c));
                    } else {
                        break;
                    }
                }
                word.push(CrossingLabel::diagonal(square));
            }
            Ok(word)
        }
    }
}

/// Exact `I_{r,r'}` with the pair of start squares realising it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionRatio {
    #[serde(with = "ratio_string")]
    pub value: Rational,
    pub witness: (usize, usize),
}

mod ratio_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        crate::slope::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Saddle-connection classes and `I`-values for one surface, memoised per key.
///
/// Concurrent fills of the same key recompute the same value, so the caches
/// are safe to share across threads.
pub struct SaddleTable {
    surface: StaircaseSurface,
    form: IntersectionForm,
    classes: RwLock<HashMap<Slope, Vec<HomologyClass>>>,
    ratios: RwLock<HashMap<(Slope, Slope), IntersectionRatio>>,
}

impl SaddleTable {
    pub fn new(s: i64) -> Result<Self> {
        let surface = StaircaseSurface::new(s)?;
        let form = IntersectionForm::staircase(surface.s)?;
        Ok(Self::with_form(surface, form))
    }

    /// Uses an arbitrary form, e.g. a deliberately perturbed one.
    pub fn with_form(surface: StaircaseSurface, form: IntersectionForm) -> Self {
        SaddleTable {
            surface,
            form,
            classes: RwLock::new(HashMap::new()),
            ratios: RwLock::new(HashMap::new()),
        }
    }

    pub fn surface(&self) -> &StaircaseSurface {
        &self.surface
    }

    pub fn form(&self) -> &IntersectionForm {
        &self.form
    }

    /// Homology classes of the saddle connections of direction `d`, by start square.
    pub fn classes(&self, d: Slope) -> Result<Vec<HomologyClass>> {
        if let Some(c) = self.classes.read().expect("cache lock").get(&d) {
            return Ok(c.clone());
        }
        let classes: Vec<HomologyClass> = trace_direction(&self.surface, d)?
            .into_iter()
            .map(|c| c.homology)
            .collect();
        self.classes.write().expect("cache lock").insert(d, classes.clone());
        Ok(classes)
    }

    /// `max_{i,j} |Int(α_i, β_j)| / |pq' − p'q|` over the saddle connections of the two directions.
    pub fn intersection_ratio(&self, r: Slope, r_prime: Slope) -> Result<IntersectionRatio> {
        if r == r_prime {
            return Err(Error::EqualSlopes(r.to_string()));
        }
        if let Some(v) = self.ratios.read().expect("cache lock").get(&(r, r_prime)) {
            return Ok(*v);
        }
        let alphas = self.classes(r)?;
        let betas = self.classes(r_prime)?;
        let det = r.det(&r_prime).abs();
        let mut best = (-1i64, (0, 0));
        for (i, a) in alphas.iter().enumerate() {
            for (j, b) in betas.iter().enumerate() {
                let v = self.form.pair(a, b)?.abs();
                if v > best.0 {
                    best = (v, (i + 1, j + 1));
                }
            }
        }
        let ratio = IntersectionRatio {
            value: Rational::new(best.0, det),
            witness: best.1,
        };
        self.ratios.write().expect("cache lock").insert((r, r_prime), ratio);
        Ok(ratio)
    }

    /// `(Σ_{i,j} Int(α_i, β_j), (2s−1)(pq' − p'q))`.
    pub fn sum_rule(&self, r: Slope, r_prime: Slope) -> Result<(i64, i64)> {
        if r == r_prime {
            return Err(Error::EqualSlopes(r.to_string()));
        }
        let total_a = self
            .classes(r)?
            .iter()
            .fold(HomologyClass::zero(self.surface.s), |acc, h| acc + h.clone());
        let total_b = self
            .classes(r_prime)?
            .iter()
            .fold(HomologyClass::zero(self.surface.s), |acc, h| acc + h.clone());
        Ok((
            self.form.pair(&total_a, &total_b)?,
            self.surface.n as i64 * r.det(&r_prime),
        ))
    }
}

pub fn intersection_ratio(s: i64, r: Slope, r_prime: Slope) -> Result<IntersectionRatio> {
    SaddleTable::new(s)?.intersection_ratio(r, r_prime)
}

/// The covering-degree identity `Σ Int(α_i, β_j) = (2s−1)(pq' − p'q)`.
pub fn sum_rule_check(s: i64, r: Slope, r_prime: Slope) -> Result<bool> {
    let (sum, expected) = SaddleTable::new(s)?.sum_rule(r, r_prime)?;
    Ok(sum == expected)
}

/// JSON record emitted by the `saddles` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaddleRecord {
    pub p: i64,
    pub q: i64,
    pub start_square: usize,
    pub end_square: usize,
    pub eps: Vec<i64>,
    pub phi: Vec<i64>,
    pub class: String,
    pub crossings: Vec<Crossing>,
    pub family: Option<CurveFamily>,
    pub crossing_word: Vec<String>,
}

impl SaddleRecord {
    pub fn new(surface: &StaircaseSurface, c: &SaddleConnection) -> Result<Self> {
        let d = c.direction;
        let family = [CurveFamily::G, CurveFamily::E]
            .into_iter()
            .find(|&f| family_applies(d, f) && (f == CurveFamily::G) == d.is_odd());
        let crossing_word = match family {
            Some(f) => crossing_word(surface, c, f)?.iter().map(|l| l.to_string()).collect(),
            None => Vec::new(),
        };
        Ok(SaddleRecord {
            p: d.p,
            q: d.q,
            start_square: c.start_square,
            end_square: c.end_square,
            eps: c.homology.eps.clone(),
            phi: c.homology.phi.clone(),
            class: c.homology.to_string(),
            crossings: c.crossings.clone(),
            family,
            crossing_word,
        })
    }
}

/// `gcd` helper for callers holding raw integers.
pub fn is_primitive(p: i64, q: i64) -> bool {
    (p, q) != (0, 0) && p.gcd(&q) == 1
}
