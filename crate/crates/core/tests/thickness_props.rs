mod common;

use common::*;
use proptest::prelude::*;
use vck::thickness::thi;
use vck::{
    level_set, plan_class, tau_bisection, tau_distance, thickness, thickness_oracle, CellSet,
    DiscreteSpace, Kernel, PlanClass, PlanMeasure, Rational,
};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

proptest! {
    #![proptest_config(cfg(200))]

    #[test]
    fn certificate_checks_and_bounds((xw, yw, m) in grid(12, 12, 1, any::<bool>())) {
        let (x, y) = (space(&xw), space(&yw));
        let z = mask(xw.len(), yw.len(), &m[0]);
        let cert = thickness(&z, &x, &y).unwrap();
        cert.verify(&z, &x, &y).unwrap();
        prop_assert!(cert.value >= 0.0 && cert.value <= 1.0 + 1e-12);
        prop_assert_eq!(cert.value == 0.0, z.is_empty());
        prop_assert!((cert.fractional.cost(&x, &y) - cert.value).abs() <= 1e-8);
        prop_assert!((cert.integral.cost(&x, &y) - cert.value).abs() <= 1e-8);
        prop_assert!(cert.integral.covers(&z));
    }

    #[test]
    fn monotone_and_subadditive((xw, yw, m) in grid(10, 10, 2, any::<bool>())) {
        let (x, y) = (space(&xw), space(&yw));
        let (r, c) = (xw.len(), yw.len());
        let (a, b) = (mask(r, c, &m[0]), mask(r, c, &m[1]));
        let (ta, tb) = (thi(&a, &x, &y).unwrap(), thi(&b, &x, &y).unwrap());
        let tu = thi(&a.union(&b).unwrap(), &x, &y).unwrap();
        let ti = thi(&a.intersection(&b).unwrap(), &x, &y).unwrap();
        prop_assert!(tu <= ta + tb + 1e-9);
        prop_assert!(ti <= ta.min(tb) + 1e-9);
        prop_assert!(tu + 1e-9 >= ta.max(tb));
    }

    #[test]
    fn measure_is_a_lower_bound((xw, yw, m) in grid(12, 12, 1, any::<bool>())) {
        let (x, y) = (space(&xw), space(&yw));
        let z = mask(xw.len(), yw.len(), &m[0]);
        let product = PlanMeasure::new(
            z.rows(),
            z.cols(),
            z.cells().map(|(i, j)| (i, j, x.weight(i) * y.weight(j))).collect(),
            false,
        )
        .unwrap();
        let class = plan_class(&product, &x, &y).unwrap().class;
        prop_assert!(matches!(class, PlanClass::Submultistochastic | PlanClass::Bistochastic));
        prop_assert!(thi(&z, &x, &y).unwrap() + 1e-12 >= z.measure(&x, &y));
    }

    #[test]
    fn rectangles((xw, yw, m) in grid(10, 10, 1, any::<bool>())) {
        let (x, y) = (space(&xw), space(&yw));
        let rows: Vec<usize> = (0..xw.len()).filter(|&i| m[0][i]).collect();
        let cols: Vec<usize> = (0..yw.len()).filter(|&j| m[0][xw.len() * yw.len() - 1 - j]).collect();
        let z = CellSet::from_fn(xw.len(), yw.len(), |i, j| rows.contains(&i) && cols.contains(&j));
        let expect = if z.is_empty() { 0.0 } else { x.measure(rows.iter().copied()).min(y.measure(cols.iter().copied())) };
        prop_assert!((thi(&z, &x, &y).unwrap() - expect).abs() <= 1e-12);
    }

    #[test]
    fn increasing_chains_attain_the_union((xw, yw, order) in grid(8, 8, 1, any::<u16>())) {
        let (x, y) = (space(&xw), space(&yw));
        let (r, c) = (xw.len(), yw.len());
        let mut cells: Vec<(u16, usize)> = order[0].iter().copied().zip(0..r * c).collect();
        cells.sort();
        let mut z = CellSet::empty(r, c);
        let mut running = 0.0f64;
        for (_, p) in cells {
            z.insert(p / c, p % c);
            let t = thi(&z, &x, &y).unwrap();
            prop_assert!(t + 1e-12 >= running);
            running = running.max(t);
        }
        prop_assert!((running - thi(&z, &x, &y).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn exact_flow_matches_enumeration(
        (xw, yw, m) in (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| (
            prop::collection::vec(0u8..6, r),
            prop::collection::vec(0u8..6, c),
            prop::collection::vec(any::<bool>(), r * c),
        ))
    ) {
        let (x, y) = (exact_space(&xw), exact_space(&yw));
        let z = mask(xw.len(), yw.len(), &m);
        let cert = thickness(&z, &x, &y).unwrap();
        cert.verify(&z, &x, &y).unwrap();
        prop_assert_eq!(cert.gap, Rational::from_integer(0));
        prop_assert_eq!(cert.value, thickness_oracle(&z, &x, &y).unwrap());
    }
}

proptest! {
    #![proptest_config(cfg(300))]

    #[test]
    fn tau_axioms((xw, yw, v) in grid(6, 6, 3, lattice())) {
        let (x, y) = (space(&xw), space(&yw));
        let (r, c) = (xw.len(), yw.len());
        let f = kernel(r, c, &v[0]);
        let g = kernel(r, c, &v[1]);
        let h = kernel(r, c, &v[2]);
        let fg = tau_distance(&f, &g, &x, &y).unwrap().value;
        let gf = tau_distance(&g, &f, &x, &y).unwrap().value;
        let gh = tau_distance(&g, &h, &x, &y).unwrap().value;
        let fh = tau_distance(&f, &h, &x, &y).unwrap().value;
        prop_assert_eq!(fg, gf);
        prop_assert_eq!(fg == 0.0, v[0] == v[1]);
        prop_assert!(fh <= fg + gh + 1e-12);
        prop_assert_eq!(tau_distance(&f, &f, &x, &y).unwrap().value, 0.0);
    }

    #[test]
    fn tau_bounds_and_bisection((xw, yw, v) in grid(8, 8, 2, -1.5f64..1.5)) {
        let (x, y) = (space(&xw), space(&yw));
        let (r, c) = (xw.len(), yw.len());
        let f = kernel(r, c, &v[0]);
        let g = kernel(r, c, &v[1]);
        let tau = tau_distance(&f, &g, &x, &y).unwrap().value;
        let sup = f.zip_with(&g, |a, b| (a - b).abs()).unwrap().max_abs();
        let differ = thi(&CellSet::from_fn(r, c, |i, j| f.get(i, j) != g.get(i, j)), &x, &y).unwrap();
        prop_assert!(tau <= 1.0f64.min(sup).min(differ) + 1e-12);
        let bis = tau_bisection(&f, &g, &x, &y, 1e-7).unwrap();
        prop_assert!((bis - tau).abs() <= 1e-6, "bisection {} exact {}", bis, tau);
        for delta in [1e-6, 1e-3, 0.1] {
            let z = level_set(&f, &g, tau + delta).unwrap();
            prop_assert!(z.measure(&x, &y) <= tau + 1e-12);
        }
    }
}

#[test]
fn named_examples() {
    let u4 = DiscreteSpace::<f64>::uniform(4);
    let diag = CellSet::from_fn(4, 4, |i, j| i == j);
    assert_eq!(thi(&diag, &u4, &u4).unwrap(), 1.0);
    assert_eq!(diag.measure(&u4, &u4), 0.25);

    let u8 = DiscreteSpace::<f64>::uniform(8);
    let rect = CellSet::from_fn(8, 8, |i, j| i < 4 && j < 2);
    assert!((thi(&rect, &u8, &u8).unwrap() - 0.25).abs() < 1e-12);

    let q = DiscreteSpace::<Rational>::uniform(4);
    let band = CellSet::from_fn(4, 4, |i, j| i.abs_diff(j) == 1);
    assert_eq!(thickness_oracle(&band, &q, &q).unwrap(), Rational::from_integer(1));

    let f = Kernel::from_fn(5, 5, |i, j| if i == j { 1.0 } else { 0.0 });
    let u5 = DiscreteSpace::<f64>::uniform(5);
    assert_eq!(tau_distance(&f, &Kernel::constant(5, 5, 0.0), &u5, &u5).unwrap().value, 1.0);
    let shifted = Kernel::constant(5, 5, 0.3);
    assert!((tau_distance(&shifted, &Kernel::constant(5, 5, 0.0), &u5, &u5).unwrap().value - 0.3).abs() < 1e-15);
}

#[test]
fn scalar_types_agree() {
    let z = vck::generate::random_mask(9, 7, 0.3, 11);
    let w64: Vec<f64> = (0..9).map(|i| 1.0 + i as f64).collect();
    let v64: Vec<f64> = (0..7).map(|j| 2.0 + (j % 3) as f64).collect();
    let t64 = thi(&z, &space(&w64), &space(&v64)).unwrap();
    let w32: Vec<f32> = w64.iter().map(|&v| v as f32).collect();
    let v32: Vec<f32> = v64.iter().map(|&v| v as f32).collect();
    let t32 = thi(&z, &DiscreteSpace::new(&w32).unwrap(), &DiscreteSpace::new(&v32).unwrap()).unwrap();
    let wq: Vec<Rational> = w64.iter().map(|&v| Rational::from_integer(v as i64)).collect();
    let vq: Vec<Rational> = v64.iter().map(|&v| Rational::from_integer(v as i64)).collect();
    let tq = thi(&z, &DiscreteSpace::new(&wq).unwrap(), &DiscreteSpace::new(&vq).unwrap()).unwrap();
    assert!((t64 - *tq.numer() as f64 / *tq.denom() as f64).abs() < 1e-12);
    assert!((t32 as f64 - t64).abs() < 1e-5);
}
