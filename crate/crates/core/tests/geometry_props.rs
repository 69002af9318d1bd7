use proptest::prelude::*;
use staircase_kvol::hyper::*;
use staircase_kvol::kvol::{closed_form_minimum, kvol_at, CandidateConfig};
use staircase_kvol::slope::{Rational, Slope};
use staircase_kvol::veech::*;

fn slope() -> impl Strategy<Value = Slope> {
    (-12i64..=12, 0i64..=12).prop_filter_map("canonical", |(p, q)| Slope::direction(p, q).ok())
}

fn point() -> impl Strategy<Value = DiskPoint> {
    (-3.0f64..3.0, 0.05f64..4.0).prop_map(|(x, y)| DiskPoint::new(x, y).unwrap())
}

fn element() -> impl Strategy<Value = GroupElement> {
    proptest::collection::vec(0usize..3, 0..7).prop_map(|w| {
        let gens = [Generator::T, Generator::TInv, Generator::R];
        GroupElement::from_word(&w.into_iter().map(|i| gens[i]).collect::<Vec<_>>())
    })
}

/// `(d b; c a)`: the element whose action on slopes matches `g` acting on points.
fn twisted(g: &GroupElement) -> GroupElement {
    let [[a, b], [c, d]] = g.m;
    GroupElement {
        m: [[d, b], [c, a]],
        word: Vec::new(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn k_is_sech_of_distance(r in slope(), rp in slope(), z in point()) {
        prop_assume!(r != rp);
        let k = k_value(r, rp, &z).unwrap();
        let d = k_via_distance(r, rp, &z).unwrap();
        prop_assert!((k - d).abs() < 1e-12, "{k} vs {d}");
        prop_assert!(k > 0.0 && k <= 1.0 + 1e-12);
    }

    #[test]
    fn exact_k_squared_matches_float(r in slope(), rp in slope(), x in -20i64..20, y in 1i64..20, den in 1i64..12) {
        prop_assume!(r != rp);
        let z = DiskPoint::exact(Rational::new(x, den), Rational::new(y, den)).unwrap();
        let k2 = k_squared_exact(r, rp, &z).unwrap().unwrap();
        let k = k_value(r, rp, &z).unwrap();
        prop_assert!((ratio_f64(k2) - k * k).abs() < 1e-12);
    }

    #[test]
    fn horodisk_is_where_j_exceeds_one(p in -6i64..=6, q in 0i64..=6, x in -30i64..30, y in 1i64..40) {
        prop_assume!(Slope::direction(p, q).is_ok());
        let z = DiskPoint::exact(Rational::new(x, 10), Rational::new(y, 20)).unwrap();
        let j = j_exact(Slope::direction(p, q).unwrap(), &z).unwrap();
        prop_assert_eq!(Horodisk::new(p, q).unwrap().contains(&z), j > Rational::from_integer(1));
        let zf = DiskPoint::new(z.x, z.y).unwrap();
        let jf = j_value(Slope::direction(p, q).unwrap(), &zf);
        if (jf - 1.0).abs() > 1e-9 {
            prop_assert_eq!(Horodisk::new(p, q).unwrap().contains(&zf), jf > 1.0);
        }
    }

    #[test]
    fn banana_boundaries_sit_at_the_threshold(n in 1i64..40, t in 0.02f64..0.98) {
        let g = Geodesic::from_ints(-n, 1).unwrap();
        let (low, high) = banana_circles(n).unwrap();
        for c in [low, high] {
            // sweep the part of the circle above the real axis
            let Some((a, b)) = c.at_x(c.cx) else { continue };
            let top = a.max(b);
            if top <= 0.0 { continue; }
            let theta = std::f64::consts::PI * t;
            let (x, y) = (c.cx + c.radius * theta.cos(), c.cy + c.radius * theta.sin());
            if y <= 1e-6 { continue; }
            let k = k_of_geodesic(&DiskPoint::new(x, y).unwrap(), &g);
            prop_assert!((k - cover_threshold()).abs() < 1e-9, "n={n} ({x}, {y}) K={k}");
        }
    }

    #[test]
    fn mobius_law_for_k(r in slope(), rp in slope(), z in point(), g in element()) {
        prop_assume!(r != rp);
        let lhs = k_value(r, rp, &act_on_point(&g, &z)).unwrap();
        let gt = twisted(&g);
        let rhs = k_value(act_on_slope(&gt, r), act_on_slope(&gt, rp), &z).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn reduction_lands_in_domain_and_is_gamma_invariant(z in point(), h in element()) {
        let (w, g) = reduce_to_fundamental_domain(&z);
        prop_assert!(in_fundamental_domain(&w, 1e-9));
        prop_assert!(g.is_member());
        let back = act_on_point(&g, &z);
        prop_assert!((back.x - w.x).abs() < 1e-7 && (back.y - w.y).abs() < 1e-7);
        let (w2, _) = reduce_to_fundamental_domain(&act_on_point(&h, &z));
        // boundary points may land on either side copy
        let near_edge = (w.x.abs() - 1.0).abs() < 1e-6 || (w.x * w.x + w.y * w.y - 1.0).abs() < 1e-6;
        if !near_edge {
            prop_assert!((w2.x - w.x).abs() < 1e-6 && (w2.y - w.y).abs() < 1e-6, "{:?} vs {:?}", w, w2);
        }
    }

    #[test]
    fn exact_reduction_agrees_with_float(x in -40i64..40, y in 1i64..30, den in 1i64..9) {
        let ze = DiskPoint::exact(Rational::new(x, den), Rational::new(y, den * 3)).unwrap();
        let zf = DiskPoint::new(ze.x, ze.y).unwrap();
        let (we, _) = reduce_to_fundamental_domain(&ze);
        let (wf, _) = reduce_to_fundamental_domain(&zf);
        prop_assert!(in_fundamental_domain(&we, 0.0));
        let near_edge = (we.x.abs() - 1.0).abs() < 1e-9 || (we.x * we.x + we.y * we.y - 1.0).abs() < 1e-9;
        if !near_edge {
            prop_assert!((we.x - wf.x).abs() < 1e-9 && (we.y - wf.y).abs() < 1e-9);
        }
    }

    #[test]
    fn reduced_words_still_evaluate(g in element(), h in element()) {
        let gh = g.compose(&h);
        prop_assert!(gh.word_evaluates());
        prop_assert!(gh.compose(&gh.inverse()).word.is_empty());
        prop_assert!(gh.is_member() && gh.inverse().is_member());
        prop_assert_eq!(gh.dual().m, twisted(&gh).m);
    }

    #[test]
    fn slope_class_is_gamma_invariant(r in slope(), g in element()) {
        prop_assert_eq!(slope_class(r), slope_class(act_on_slope(&g, r)));
    }

    #[test]
    fn cusp_descent_reaches_the_right_cusp(r in slope()) {
        let v = slope_to_cusp(r);
        prop_assert!(v.is_member());
        let target = match slope_class(r) {
            SlopeClass::EvenClass => Slope::INFINITY,
            SlopeClass::OddClass => Slope::integer(1),
        };
        prop_assert_eq!(act_on_slope(&v, r), target);
    }

    #[test]
    fn end_of_z_symmetric_and_invariant(r in slope(), rp in slope(), g in element()) {
        prop_assume!(r != rp);
        let oracle = EndZOracle::new(2).unwrap();
        let e = oracle.is_end(r, rp).unwrap();
        prop_assert_eq!(e, oracle.is_end(rp, r).unwrap());
        prop_assert_eq!(e, oracle.is_end(act_on_slope(&g, r), act_on_slope(&g, rp)).unwrap());
        prop_assert_eq!(e, end_of_z_by_group(r, rp).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kvol_is_gamma_invariant_and_mirror_symmetric(z in point(), g in element()) {
        let cfg = CandidateConfig::default();
        let a = kvol_at(2, &z, &cfg).unwrap().value;
        let b = kvol_at(2, &act_on_point(&g, &z), &cfg).unwrap().value;
        let c = kvol_at(2, &z.mirror(), &cfg).unwrap().value;
        prop_assert!((a - b).abs() < 1e-7 * a, "{a} vs {b}");
        prop_assert!((a - c).abs() < 1e-7 * a, "{a} vs {c}");
    }

    #[test]
    fn kvol_never_below_the_minimum(z in point(), s in 2i64..=4) {
        let v = kvol_at(s, &z, &CandidateConfig::default()).unwrap().value;
        prop_assert!(v >= closed_form_minimum(s) - 1e-9, "{v}");
    }

    #[test]
    fn kvol_scales_with_the_number_of_squares(z in point()) {
        let cfg = CandidateConfig::default();
        let v2 = kvol_at(2, &z, &cfg).unwrap().value / 3.0;
        let v3 = kvol_at(3, &z, &cfg).unwrap().value / 5.0;
        prop_assert!((v2 - v3).abs() < 1e-12);
    }

    #[test]
    fn witnesses_are_z_geodesics_with_their_k(z in point()) {
        let res = kvol_at(2, &z, &CandidateConfig::default()).unwrap();
        let oracle = EndZOracle::new(2).unwrap();
        for w in &res.witnesses {
            prop_assert!(oracle.is_end(w.r, w.rp).unwrap(), "{} {}", w.r, w.rp);
            let k = k_value(w.r, w.rp, &res.reduced).unwrap();
            prop_assert!((k - w.k).abs() < 1e-9);
        }
        let n = 3.0;
        prop_assert!(res.value >= n * res.j_terms.0.max(res.j_terms.1) - 1e-12);
    }
}
