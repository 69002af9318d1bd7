use proptest::prelude::*;
use staircase_kvol::origami::{HomologyClass, IntersectionForm, StaircaseSurface};
use staircase_kvol::saddle::{crossing_word, trace_direction, CrossingLabel, CurveFamily, SaddleTable};
use staircase_kvol::slope::{Direction, Rational, Slope};
use staircase_kvol::veech::{act_on_slope, is_end_of_z, GroupElement};

/// Homology of the separatrix from `start`, read off by walking the straight
/// segment through the unfolded plane and counting midline crossings.
fn midline_class(surface: &StaircaseSurface, d: Direction, start: usize) -> HomologyClass {
    #[derive(Clone, Copy)]
    enum Ev {
        GridV,
        GridH,
        MidV,
        MidH,
    }
    let a = d.p.abs();
    let q = d.q;
    let mut events: Vec<(Rational, Ev)> = Vec::new();
    for i in 1..a {
        events.push((Rational::new(i, a), Ev::GridV));
    }
    for j in 1..q {
        events.push((Rational::new(j, q), Ev::GridH));
    }
    for i in 0..a {
        events.push((Rational::new(2 * i + 1, 2 * a), Ev::MidV));
    }
    for j in 0..q {
        events.push((Rational::new(2 * j + 1, 2 * q), Ev::MidH));
    }
    events.sort_by_key(|x| x.0);
    let mut h = HomologyClass::zero(surface.s);
    let mut sq = start;
    for (_, ev) in events {
        match ev {
            Ev::GridV if d.p > 0 => sq = surface.right(sq),
            Ev::GridV => sq = surface.left(sq),
            Ev::GridH => sq = surface.up(sq),
            Ev::MidV => h.eps[surface.column_of(sq) - 1] += d.p.signum(),
            Ev::MidH => h.phi[surface.row_of(sq) - 1] += 1,
        }
    }
    h
}

fn direction() -> impl Strategy<Value = Slope> {
    (-25i64..=25, 0i64..=25).prop_filter_map("primitive canonical", |(p, q)| Slope::direction(p, q).ok())
}

/// Odd directions with `0 < q < p − q`, where the g-family cases apply.
fn g_side_direction() -> impl Strategy<Value = Slope> {
    (0i64..8, 0i64..20).prop_filter_map("primitive", |(a, b)| {
        let q = 2 * a + 1;
        Slope::direction(2 * q + 1 + 2 * b, q).ok()
    })
}

fn distinct_pair() -> impl Strategy<Value = (Slope, Slope)> {
    (direction(), direction()).prop_filter("distinct", |(a, b)| a != b)
}

#[test]
fn midline_oracle_gives_known_ratio_at_three_thirteenths() {
    let surface = StaircaseSurface::new(2).unwrap();
    let form = IntersectionForm::staircase(2).unwrap();
    let r = Slope::direction(3, 13).unwrap();
    let inf = Slope::INFINITY;
    let mut best = 0;
    for i in 1..=3 {
        for j in 1..=3 {
            let v = form
                .pair(&midline_class(&surface, r, i), &midline_class(&surface, inf, j))
                .unwrap();
            best = best.max(v.abs());
        }
    }
    assert_eq!(Rational::new(best, 1), Rational::new(9, 1));
    let t = SaddleTable::new(2).unwrap();
    assert_eq!(t.intersection_ratio(r, inf).unwrap().value, Rational::new(9, 13));
    assert_eq!(
        t.intersection_ratio(Slope::direction(3, 7).unwrap(), inf)
            .unwrap()
            .value,
        Rational::new(5, 7)
    );
}

#[test]
fn generator_directions_give_basis_classes() {
    for s in 2..=5usize {
        let surface = StaircaseSurface::new(s as i64).unwrap();
        let horiz = trace_direction(&surface, Slope::INFINITY).unwrap();
        let vert = trace_direction(&surface, Slope::integer(0)).unwrap();
        for k in 1..=surface.n {
            assert_eq!(horiz[k - 1].homology, HomologyClass::e(surface.column_of(k), s));
            assert_eq!(vert[k - 1].homology, HomologyClass::f(surface.row_of(k), s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn one_connection_per_square_with_holonomy(s in 2i64..=6, d in direction()) {
        let surface = StaircaseSurface::new(s).unwrap();
        let conns = trace_direction(&surface, d).unwrap();
        prop_assert_eq!(conns.len(), 2 * s as usize - 1);
        let mut ends: Vec<usize> = conns.iter().map(|c| c.end_square).collect();
        ends.sort();
        ends.dedup();
        prop_assert_eq!(ends.len(), conns.len());
        for c in &conns {
            prop_assert_eq!(c.right_exits() as i64, (d.p.abs() - 1).max(0));
            prop_assert_eq!(c.top_exits() as i64, (d.q - 1).max(0));
        }
    }

    #[test]
    fn tracer_matches_midline_oracle(s in 2i64..=6, d in direction()) {
        let surface = StaircaseSurface::new(s).unwrap();
        for c in trace_direction(&surface, d).unwrap() {
            prop_assert_eq!(&c.homology, &midline_class(&surface, d, c.start_square));
        }
    }

    #[test]
    fn total_class_is_degree_times_holonomy(s in 2i64..=6, d in direction()) {
        let surface = StaircaseSurface::new(s).unwrap();
        let total = trace_direction(&surface, d).unwrap().into_iter()
            .fold(HomologyClass::zero(s as usize), |acc, c| acc + c.homology);
        // every e_i has one square per column crossing; the sum covers the torus 2s−1 times
        let e_sum: i64 = total.eps.iter().sum();
        let f_sum: i64 = total.phi.iter().sum();
        prop_assert_eq!(e_sum, d.p * (2 * s - 1));
        prop_assert_eq!(f_sum, d.q * (2 * s - 1));
    }

    #[test]
    fn sum_rule_holds((r, rp) in distinct_pair(), s in 2i64..=5) {
        let (sum, expected) = SaddleTable::new(s).unwrap().sum_rule(r, rp).unwrap();
        prop_assert_eq!(sum, expected);
    }

    #[test]
    fn ratio_is_gamma_invariant((r, rp) in distinct_pair(), s in 2i64..=4, w in proptest::collection::vec(0u8..3, 0..6)) {
        use staircase_kvol::veech::Generator;
        let word: Vec<Generator> = w.iter().map(|&k| [Generator::T, Generator::TInv, Generator::R][k as usize]).collect();
        let g = GroupElement::from_word(&word);
        let t = SaddleTable::new(s).unwrap();
        let a = t.intersection_ratio(r, rp).unwrap().value;
        let b = t.intersection_ratio(act_on_slope(&g, r), act_on_slope(&g, rp)).unwrap().value;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ratio_is_at_most_one_and_one_exactly_on_end((r, rp) in distinct_pair()) {
        let t = SaddleTable::new(2).unwrap();
        let i = t.intersection_ratio(r, rp).unwrap().value;
        prop_assert!(i > Rational::new(0, 1) && i <= Rational::new(1, 1));
        prop_assert_eq!(i == Rational::new(1, 1), is_end_of_z(2, r, rp).unwrap());
    }

    #[test]
    fn e_family_words_follow_the_staircase(s in 2i64..=5, d in direction()) {
        prop_assume!(d.p > 0 && d.p < d.q);
        let surface = StaircaseSurface::new(s).unwrap();
        let s = s as usize;
        for c in trace_direction(&surface, d).unwrap() {
            let w = crossing_word(&surface, &c, CurveFamily::E).unwrap();
            for pair in w.windows(2) {
                match pair[0] {
                    CrossingLabel::EPrime(i) => prop_assert!(
                        pair[1] == CrossingLabel::E(i) || pair[1] == CrossingLabel::EPrime(i + 1),
                        "{} then {}", pair[0], pair[1]),
                    CrossingLabel::E(i) if i >= 2 => prop_assert!(
                        pair[1] == CrossingLabel::EPrime(i) || pair[1] == CrossingLabel::E(i - 1),
                        "{} then {}", pair[0], pair[1]),
                    _ => {}
                }
                if let CrossingLabel::E(i) = pair[0] {
                    if i >= 2 { prop_assert_ne!(pair[0], pair[1]); }
                }
                prop_assert!(!matches!(pair[0], CrossingLabel::EPrime(i) if i > s));
            }
        }
    }

    #[test]
    fn g_family_never_repeats_interior_curves(s in 2i64..=5, d in g_side_direction()) {
        let surface = StaircaseSurface::new(s).unwrap();
        let s = s as usize;
        for c in trace_direction(&surface, d).unwrap() {
            let w = crossing_word(&surface, &c, CurveFamily::G).unwrap();
            for pair in w.windows(2) {
                let repeat = pair[0] == pair[1];
                match pair[0] {
                    CrossingLabel::G(i) if i < s => prop_assert!(!repeat, "g{} repeated", i),
                    CrossingLabel::GPrime(i) if i >= 2 => prop_assert!(!repeat, "g'{} repeated", i),
                    _ => {}
                }
            }
        }
    }
}
