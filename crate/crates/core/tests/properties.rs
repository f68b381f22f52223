use hamext::classical::PhaseSpace;
use hamext::expr::BindingOf;
use hamext::quantum::DiffOperator;
use hamext::scalar::{rational_add, rational_mul, Rational};
use hamext::{parse_with, Binding, Complex32, Complex64, Expr, Symbol, SymbolTable};
use num_bigint::BigInt;
use proptest::prelude::*;

fn x() -> Symbol {
    Symbol::coordinate("x")
}

fn y() -> Symbol {
    Symbol::coordinate("y")
}

/// Smooth expressions in `x`, `y` without poles.
fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        (-3i64..=3, 1i64..=4).prop_map(|(a, b)| Expr::frac(a, b)),
        Just(x().expr()),
        Just(y().expr()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| a.sin().exp()),
            (inner, 0i64..=2).prop_map(|(a, n)| a.powi(n)),
        ]
    })
}

fn point() -> impl Strategy<Value = (f64, f64)> {
    (-1.2f64..1.2, -1.2f64..1.2)
}

fn bind(pt: (f64, f64)) -> Binding {
    let mut b = Binding::new();
    b.insert(x(), Complex64::new(pt.0, 0.0));
    b.insert(y(), Complex64::new(pt.1, 0.0));
    b
}

fn at(e: &Expr, pt: (f64, f64)) -> Complex64 {
    e.eval(&bind(pt)).expect("smooth expression evaluates")
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

fn rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| Rational::new(n.into(), d.into())),
        (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n.into(), d.into())),
        (any::<i64>(), any::<i64>(), 1i64..i64::MAX)
            .prop_map(|(a, b, d)| Rational::new(BigInt::from(a) * BigInt::from(b) * 3, d.into())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn interning_gives_equal_handles(e in expr()) {
        let again = parse_with(&e.to_string(), &[x(), y()].into_iter().collect::<SymbolTable>()).unwrap();
        prop_assert_eq!(e.clone() + Expr::zero(), e.clone());
        prop_assert_eq!((e.clone() * Expr::one()).id(), e.id());
        // re-parsing can only change the tree by canonical reordering
        prop_assert_eq!(again.to_string(), e.to_string());
    }

    #[test]
    fn display_parse_round_trip(e in expr(), pt in point()) {
        let table: SymbolTable = [x(), y()].into_iter().collect();
        let back = parse_with(&e.to_string(), &table).unwrap();
        prop_assert!(close(at(&e, pt), at(&back, pt), 1e-12));
    }

    #[test]
    fn derivative_is_linear(f in expr(), g in expr(), a in -3i64..3, pt in point()) {
        let lhs = (Expr::int(a) * &f + &g).diff(&x());
        let rhs = Expr::int(a) * f.diff(&x()) + g.diff(&x());
        prop_assert!(close(at(&lhs, pt), at(&rhs, pt), 1e-11));
    }

    #[test]
    fn derivative_matches_finite_difference(f in expr(), pt in point()) {
        let h = 1e-5;
        let fd = (at(&f, (pt.0 + h, pt.1)) - at(&f, (pt.0 - h, pt.1))) / (2.0 * h);
        let d = at(&f.diff(&x()), pt);
        let scale = 1f64.max(at(&f, pt).norm()).max(d.norm());
        prop_assert!((fd - d).norm() <= 1e-4 * scale, "fd {} vs {}", fd, d);
    }

    #[test]
    fn mixed_partials_commute(f in expr(), pt in point()) {
        let a = f.diff(&x()).diff(&y());
        let b = f.diff(&y()).diff(&x());
        prop_assert!(close(at(&a, pt), at(&b, pt), 1e-10));
    }

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(f in expr(), g in expr(), h in expr(), pt in point()) {
        // x is the coordinate and y its momentum
        let chart = PhaseSpace::new(vec![(x(), y())]);
        let fg = chart.bracket(&f, &g);
        let gf = chart.bracket(&g, &f);
        prop_assert!(close(at(&fg, pt), -at(&gf, pt), 1e-10));
        let lhs = chart.bracket(&f, &(&g * &h));
        let rhs = &fg * &h + &g * chart.bracket(&f, &h);
        prop_assert!(close(at(&lhs, pt), at(&rhs, pt), 1e-9));
    }

    #[test]
    fn operator_composition_matches_sequential_application(
        a in expr(), b in expr(), c in expr(), psi in expr(), pt in point()
    ) {
        let coords = vec![x(), y()];
        let mut p = DiffOperator::partial(coords.clone(), &x(), 1).scale(&a);
        p.add_term(vec![0, 0], b);
        let mut q = DiffOperator::partial(coords.clone(), &y(), 2);
        q.add_term(vec![1, 0], c);
        let composed = p.compose(&q).apply(&psi);
        let sequential = p.apply(&q.apply(&psi));
        prop_assert!(close(at(&composed, pt), at(&sequential, pt), 1e-9));
    }

    #[test]
    fn single_precision_tracks_double(e in expr(), pt in point()) {
        let mut b = BindingOf::<f32>::new();
        b.insert(x(), Complex32::new(pt.0 as f32, 0.0));
        b.insert(y(), Complex32::new(pt.1 as f32, 0.0));
        let lo = e.eval_as(&b).unwrap();
        let hi = at(&e, (pt.0 as f32 as f64, pt.1 as f32 as f64));
        let lo = Complex64::new(lo.re as f64, lo.im as f64);
        prop_assert!(close(lo, hi, 1e-3), "{} vs {}", lo, hi);
    }

    #[test]
    fn rational_fast_paths_agree(a in rational(), b in rational()) {
        prop_assert_eq!(rational_add(&a, &b), &a + &b);
        prop_assert_eq!(rational_mul(&a, &b), &a * &b);
    }
}
