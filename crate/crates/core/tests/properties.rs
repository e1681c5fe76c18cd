use hyperslice::algebra::{complete_basis, Algebra, Completion, HyperNum, ImaginaryUnit, SlicePoint};
use hyperslice::expr::{parse_stem_expr, BinOp, Expr, Func, StemExpr, Var};
use hyperslice::logroot::{exponential, principal_log, principal_nthroot};
use hyperslice::manifolds::{param_deformation, param_sphere, ManifoldChart, Pole, CATALOG};
use hyperslice::stem::{representation_formula, StemFunction};
use hyperslice::{differential, manifolds::ChartParams};
use proptest::prelude::*;

fn algebra() -> impl Strategy<Value = Algebra> {
    prop_oneof![Just(Algebra::Quaternion), Just(Algebra::Octonion)]
}

fn element(a: Algebra) -> impl Strategy<Value = HyperNum> {
    prop::collection::vec(-3.0f64..3.0, a.dim()).prop_map(|c| HyperNum::from_slice(&c).unwrap())
}

fn unit(a: Algebra) -> impl Strategy<Value = ImaginaryUnit> {
    prop::collection::vec(-1.0f64..1.0, a.dim() - 1)
        .prop_filter("nonzero", |c| c.iter().map(|v| v * v).sum::<f64>() > 1e-3)
        .prop_map(|c| ImaginaryUnit::from_imaginary(&HyperNum::from_parts(0.0, &c).unwrap()).unwrap())
}

fn pair() -> impl Strategy<Value = (HyperNum, HyperNum)> {
    algebra().prop_flat_map(|a| (element(a), element(a)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn norm_is_multiplicative((p, q) in pair()) {
        let scale = (p.norm() * q.norm()).max(1e-300);
        prop_assert!(((p * q).norm() - p.norm() * q.norm()).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn alternative_and_anti_involutive((p, q) in pair()) {
        let s = (p.norm_sqr() * q.norm()).max(1.0);
        prop_assert!(((p * p) * q).max_abs_diff(&(p * (p * q))) <= 1e-12 * s);
        prop_assert!(((q * p) * p).max_abs_diff(&(q * (p * p))) <= 1e-12 * s);
        let t = (p.norm() * q.norm()).max(1.0);
        prop_assert!((p * q).conj().max_abs_diff(&(q.conj() * p.conj())) <= 1e-12 * t);
        prop_assert!(p.conj().conj() == p);
    }

    #[test]
    fn inverse_is_two_sided(p in algebra().prop_flat_map(element)) {
        prop_assume!(p.norm() > 1e-3);
        let one = HyperNum::one(p.algebra());
        let inv = p.inv().unwrap();
        prop_assert!((p * inv).max_abs_diff(&one) < 1e-13);
        prop_assert!((inv * p).max_abs_diff(&one) < 1e-13);
    }

    #[test]
    fn completed_basis_is_orthonormal_and_oriented(
        u in algebra().prop_flat_map(unit),
        reverse in any::<bool>(),
    ) {
        let order = if reverse { Completion::Reverse } else { Completion::Forward };
        let b = complete_basis(&u.value(), order).unwrap();
        let m = b.matrix();
        let gram = m.transpose() * &m;
        let id = nalgebra::DMatrix::<f64>::identity(b.dim(), b.dim());
        prop_assert!((gram - id).abs().max() < 1e-13);
        prop_assert!(b.determinant() > 0.0);
        prop_assert!(b.units()[1].max_abs_diff(&u.value()) < 1e-15);
    }

    #[test]
    fn representation_formula_recovers_polynomials(
        (coeffs, m, n, l) in algebra().prop_flat_map(|a| (
            prop::collection::vec(element(a), 1..6),
            unit(a), unit(a), unit(a),
        )),
        x in -2.0f64..2.0,
        y in 0.0f64..2.0,
    ) {
        prop_assume!((m.value() - n.value()).norm() > 1e-2);
        let stem = StemFunction::polynomial(coeffs.clone()).unwrap();
        let at = |u: ImaginaryUnit| stem.eval_slice(&SlicePoint::new(x, y, u).unwrap()).unwrap()[0];
        let predicted = representation_formula(&at(m), &at(n), &m, &n, &l).unwrap();
        let q = SlicePoint::new(x, y, l).unwrap().reconstruct();
        let direct = coeffs.iter().enumerate().fold(HyperNum::zero(q.algebra()), |acc, (k, c)| acc + q.powi(k as u32) * *c);
        prop_assert!(predicted.max_abs_diff(&direct) <= 1e-10 * direct.norm().max(1.0));
    }

    #[test]
    fn log_round_trips(q in algebra().prop_flat_map(element)) {
        let e = exponential(&q);
        prop_assert!(e.logarithm().max_abs_diff(&q) <= 1e-12 * q.norm().max(1.0));
        prop_assume!(q.norm() > 1e-6 && (q.im().norm() > 0.0 || q.re() > 0.0));
        let l = principal_log(&q, None).unwrap();
        prop_assert!(l.exp().max_abs_diff(&q) <= 1e-12 * q.norm().max(1.0));
        prop_assert!(l.im().norm() <= std::f64::consts::PI);
    }

    #[test]
    fn roots_power_back(q in algebra().prop_flat_map(element), n in 2u32..8) {
        prop_assume!(q.norm() > 1e-6 && q.im().norm() > 0.0);
        let w = principal_nthroot(n, &q, None).unwrap();
        prop_assert!(w.powi(n).max_abs_diff(&q) <= 1e-11 * q.norm().max(1.0));
    }

    #[test]
    fn sphere_images_are_unit(a in algebra(), x in -50.0f64..50.0, y in 0.0f64..50.0, north in any::<bool>()) {
        let p = SlicePoint::new(x, y, ImaginaryUnit::default_for(a)).unwrap();
        let pole = if north { Pole::North } else { Pole::South };
        let v = param_sphere(pole, &p);
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-13);
    }

    #[test]
    fn verdicts_do_not_depend_on_the_completion(
        a in algebra(),
        chart_index in 0usize..7,
        seed in any::<u64>(),
    ) {
        let chart = ManifoldChart::from_name(CATALOG[chart_index], &ChartParams { algebra: a, ..Default::default() }).unwrap();
        let p = chart.sample_points(seed, 1)[0];
        let forward = complete_basis(&p.unit.value(), Completion::Forward).unwrap();
        let reverse = complete_basis(&p.unit.value(), Completion::Reverse).unwrap();
        let f = differential::conformality_audit(&chart.jacobian(&p, &forward).unwrap(), 1e-9).unwrap();
        let r = differential::conformality_audit(&chart.jacobian(&p, &reverse).unwrap(), 1e-9).unwrap();
        prop_assert_eq!(f.slice_block.verdict, r.slice_block.verdict);
        prop_assert_eq!(f.perp_block.verdict, r.perp_block.verdict);
        prop_assert_eq!(f.full.verdict, r.full.verdict);
        prop_assert!((f.perp_block.factor - r.perp_block.factor).abs() <= 1e-12 * f.perp_block.factor.max(1.0));
    }

    #[test]
    fn psi_fails_off_the_axes(x in -2.0f64..2.0, y in 0.05f64..3.0, u in unit(Algebra::Quaternion)) {
        let c = u.value();
        // On the coordinate circles ψ is the identity and the block is conformal.
        let axes = (1..4).filter(|&k| c.coeffs()[k].abs() > 1e-3).count();
        prop_assume!(axes >= 2);
        let chart = ManifoldChart::psi(Algebra::Quaternion).unwrap();
        let audit = chart.audit_point(&SlicePoint::new(x, y, u).unwrap(), 1e-9).unwrap();
        prop_assert!(audit.report.slice_block.passes());
        prop_assert!(!audit.report.perp_block.passes());
    }

    #[test]
    fn graphs_of_polynomials_are_slice_conformal(
        (coeffs, u) in algebra().prop_flat_map(|a| (prop::collection::vec(element(a), 1..5), unit(a))),
        x in -1.5f64..1.5,
        y in 0.0f64..1.5,
    ) {
        let a = u.algebra();
        let chart = ManifoldChart::graph(StemFunction::polynomial(coeffs).unwrap(), a).unwrap();
        let audit = chart.audit_point(&SlicePoint::new(x, y, u).unwrap(), 1e-9).unwrap();
        prop_assert!(audit.pass, "{:?}", audit.report);
    }

    #[test]
    fn deformation_is_continuous_in_theta(
        x in -2.0f64..2.0,
        y in 0.0f64..3.0,
        k in 0usize..1570,
    ) {
        let p = SlicePoint::new(x, y, ImaginaryUnit::default_for(Algebra::Quaternion)).unwrap();
        let t0 = k as f64 * 1e-3;
        let t1 = (t0 + 1e-3).min(std::f64::consts::FRAC_PI_2);
        let a = param_deformation(t0, &p).unwrap();
        let b = param_deformation(t1, &p).unwrap();
        let scale = a[0].norm().max(a[1].norm()).max(1.0);
        prop_assert!(a[0].max_abs_diff(&b[0]).max(a[1].max_abs_diff(&b[1])) <= 1e-2 * scale);
    }

    #[test]
    fn printing_reaches_a_fixpoint(e in stem_expr()) {
        let printed = e.to_string();
        let reparsed = parse_stem_expr(&printed).unwrap();
        prop_assert_eq!(&reparsed, &e);
        prop_assert_eq!(reparsed.to_string(), printed);
    }
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..100).prop_map(|v| Expr::Num(v as f64 / 4.0)),
        Just(Expr::Var(Var::X)),
        Just(Expr::Var(Var::Y)),
        Just(Expr::Var(Var::Iota)),
        Just(Expr::Var(Var::Pi)),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow),
        ];
        let func = prop_oneof![
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Sinh),
            Just(Func::Cosh),
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Sqrt),
            Just(Func::Conj),
        ];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, l, r)| Expr::Bin(o, Box::new(l), Box::new(r))),
            (func, inner).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
        ]
    })
}

fn stem_expr() -> impl Strategy<Value = StemExpr> {
    prop::collection::vec(expr(), 1..4).prop_map(|components| StemExpr { components })
}
