use nlstefan::asymptotics::{obstacle_iterate, obstacle_solve};
use nlstefan::conv::{ConvMethod, Convolver};
use nlstefan::geometry::support;
use nlstefan::io::{preset, read_field_csv, write_field_csv, PRESETS};
use nlstefan::solver::{evolve, temperature, Scheme, SolverConfig};
use nlstefan::{Datum, Field, Grid, Kernel, Piece, Profile, Shape};
use proptest::prelude::*;

fn grid() -> Grid<f64> {
    Grid::new(-6.0, 6.0, 385).unwrap()
}

fn blocks() -> impl Strategy<Value = Datum> {
    prop::collection::vec((-2.5f64..2.0, 0.1f64..1.0, 0.0f64..3.0), 1..4).prop_map(|v| {
        Datum::Piecewise(
            v.into_iter()
                .map(|(a, w, c)| Piece { a, b: a + w, shape: Shape::Constant(c) })
                .collect(),
        )
    })
}

fn any_field(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

fn tent() -> Kernel<f64> {
    Kernel::new(Profile::Table(vec![(0.0, 1.0), (1.0, 0.0)]), 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rescaled_kernels_keep_unit_mass(eps in 0.05f64..1.0) {
        for k in [Kernel::polynomial(), Kernel::indicator(), tent()] {
            let r = k.rescale(eps).unwrap();
            let m = r.mass(r.support_radius() / 1000.0).unwrap();
            prop_assert!((m - 1.0).abs() <= 1e-5, "mass {m}");
        }
    }

    #[test]
    fn kernels_are_even_and_compact(x in -3.0f64..3.0, eps in 0.1f64..1.0) {
        for k in [Kernel::polynomial(), Kernel::indicator(), tent()] {
            let r = k.rescale(eps).unwrap();
            prop_assert_eq!(r.evaluate(x), r.evaluate(-x));
            if x.abs() > r.support_radius() {
                prop_assert_eq!(r.evaluate(x), 0.0);
            }
        }
    }

    #[test]
    fn convolution_is_linear(a in any_field(385), b in any_field(385), al in -3.0f64..3.0, be in -3.0f64..3.0) {
        let g = grid();
        let c = Convolver::new(&g, &Kernel::polynomial()).unwrap();
        let fa = Field::new(g, a).unwrap();
        let fb = Field::new(g, b).unwrap();
        let lhs = c.convolve(&fa.axpby(al, &fb, be).unwrap(), ConvMethod::Direct).unwrap();
        let rhs = c.convolve(&fa, ConvMethod::Direct).unwrap()
            .axpby(al, &c.convolve(&fb, ConvMethod::Direct).unwrap(), be).unwrap();
        let scale = 1.0 + lhs.sup_abs();
        prop_assert!(lhs.sup_distance(&rhs).unwrap() <= 1e-12 * scale);
    }

    #[test]
    fn convolution_preserves_sign_and_mass(d in blocks()) {
        let g = grid();
        let f = d.sample(&g);
        for k in [Kernel::polynomial(), Kernel::indicator()] {
            let out = nlstefan::conv::convolve(&f, &k).unwrap();
            prop_assert!(out.values().iter().all(|v| *v >= 0.0));
            prop_assert!((out.integrate() - f.integrate()).abs() <= 1e-12 * (1.0 + f.integrate()));
        }
    }

    #[test]
    fn direct_and_fft_agree(a in any_field(385)) {
        let g = grid();
        let c = Convolver::new(&g, &Kernel::polynomial()).unwrap();
        let f = Field::new(g, a).unwrap();
        let x = c.convolve(&f, ConvMethod::Direct).unwrap();
        let y = c.convolve(&f, ConvMethod::Fft).unwrap();
        prop_assert!(x.sup_distance(&y).unwrap() <= 1e-12 * x.sup_abs().max(1e-300));
    }

    #[test]
    fn field_csv_round_trip(v in any_field(64), lo in -10.0f64..0.0, len in 0.1f64..20.0) {
        let g = Grid::new(lo, lo + len, 64).unwrap();
        let f = Field::new(g, v).unwrap();
        let dir = tempdir();
        let p = dir.join("f.csv");
        write_field_csv(&p, &f).unwrap();
        let back: Field<f64> = read_field_csv(&p).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        prop_assert_eq!(back, f);
    }
}

fn tempdir() -> std::path::PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static N: AtomicUsize = AtomicUsize::new(0);
    let d = std::env::temp_dir().join(format!(
        "nlstefan-prop-{}-{}",
        std::process::id(),
        N.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&d).unwrap();
    d
}

const TIMES: [f64; 3] = [0.25, 0.5, 1.0];

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn evolution_properties(d1 in blocks(), d2 in blocks()) {
        let g = grid();
        let k = Kernel::polynomial();
        let cfg = SolverConfig::new(Scheme::Rk4, 0.02, 1.0).with_snapshots(TIMES);
        let f1 = d1.sample(&g);
        let f2 = d2.sample(&g);
        let t1 = evolve(&f1, &k, &cfg).unwrap();
        let t2 = evolve(&f2, &k, &cfg).unwrap();
        let budget = f1.positive_part_distance(&f2).unwrap();
        for (s1, s2) in t1.snapshots.iter().zip(&t2.snapshots) {
            // order contraction
            prop_assert!(s1.u.positive_part_distance(&s2.u).unwrap() <= budget + 1e-6);
            // mass
            prop_assert!((s1.u.integrate() - f1.integrate()).abs() <= 1e-6 * f1.l1_norm().max(1e-12));
            // positivity and L∞
            prop_assert!(s1.u.min() >= -1e-12);
            prop_assert!(s1.u.sup() <= f1.sup() + 1e-9);
        }
        // retention, nested supports of v
        let snaps = &t1.snapshots;
        for i in 0..snaps.len() {
            for j in i..snaps.len() {
                let decay = (-(snaps[j].t - snaps[i].t)).exp();
                for (a, b) in snaps[i].u.values().iter().zip(snaps[j].u.values()) {
                    prop_assert!(*b >= a * decay - 1e-9);
                }
                let vi = support(&temperature(&snaps[i].u), 1e-8).unwrap();
                let vj = support(&temperature(&snaps[j].u), 1e-8).unwrap();
                prop_assert!(vi.is_subset_of(&vj, g.h()));
            }
        }
    }

    #[test]
    fn mesa_projection_contracts(d1 in blocks(), d2 in blocks()) {
        let g = grid();
        let k = Kernel::polynomial();
        let f1 = d1.sample(&g);
        let f2 = d2.sample(&g);
        let p1 = obstacle_solve(&f1, &k, 1e-10, 1_000_000).unwrap();
        let p2 = obstacle_solve(&f2, &k, 1e-10, 1_000_000).unwrap();
        prop_assert!(p1.mesa.l1_distance(&p2.mesa).unwrap() <= f1.l1_distance(&f2).unwrap() + 1e-6);
        prop_assert!((p1.mesa.integrate() - f1.integrate()).abs() <= 1e-4 * f1.integrate().max(1e-12));
    }

    #[test]
    fn obstacle_iteration_is_monotone_and_ordered(d in blocks(), lift in 0.0f64..1.0) {
        let g = grid();
        let k = Kernel::polynomial();
        let f = d.sample(&g);
        let mut prev = vec![0.0; g.len()];
        let mut monotone = true;
        let lo = obstacle_iterate(&f, &k, 1e-10, 1_000_000, |_, w| {
            monotone &= w.iter().zip(&prev).all(|(a, b)| a >= b);
            prev.copy_from_slice(w);
        }).unwrap();
        prop_assert!(monotone);
        let bigger = Datum::Piecewise(vec![Piece { a: -1.0, b: 1.0, shape: Shape::Constant(lift) }]).sample(&g);
        let hi = obstacle_solve(&f.axpby(1.0, &bigger, 1.0).unwrap(), &k, 1e-10, 1_000_000).unwrap();
        prop_assert!(lo.w.values().iter().zip(hi.w.values()).all(|(a, b)| a <= b));
        let tol = 1e-10;
        for (w, m) in lo.w.values().iter().zip(lo.mesa.values()) {
            if *w > tol {
                prop_assert!((m - 1.0).abs() <= 10.0 * tol + 1e-12);
            } else {
                prop_assert!(*m <= 1.0 + 10.0 * tol);
            }
        }
    }
}

#[test]
fn presets_are_deterministic() {
    for name in PRESETS {
        let a = preset(name).unwrap();
        let b = preset(name).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.resolved(), b.resolved());
        assert_eq!(a.initial_field().unwrap(), b.initial_field().unwrap());
    }
}
