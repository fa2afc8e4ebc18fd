use std::f64::consts::PI;

use hcs_core::coherent::{
    amplitude_closed, amplitude_normalized, evolve, overlap, relative_phase, series_amplitude, LambdaPair,
    SeriesOptions,
};
use hcs_core::geometry::{l_of_u, mdot, rotate_param, rotate_point, u_of_l, validate, CVec3, ParabolicPoint, Rotation};
use hcs_core::observables::{density_shape, expect_position, fit_ellipse, trajectory, KMTheta};
use hcs_core::specfun::{laguerre, log_binomial};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn complex(radius: f64) -> impl Strategy<Value = C> {
    (0.0..radius, 0.0..2.0 * PI).prop_map(|(r, t)| C::from_polar(r, t))
}

fn cvec(radius: f64) -> impl Strategy<Value = CVec3> {
    (complex(radius), complex(radius), complex(radius)).prop_map(|(a, b, c)| CVec3::new(a, b, c))
}

fn admissible() -> impl Strategy<Value = CVec3> {
    cvec(0.5).prop_filter("admissible", |u| validate(*u).is_ok())
}

fn point(radius: f64) -> impl Strategy<Value = ParabolicPoint> {
    (-radius..radius, -radius..radius, -radius..radius).prop_map(|(x, y, z)| ParabolicPoint::from_cartesian(x, y, z))
}

fn axis() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-2)
        .prop_map(|(a, b, c)| [a, b, c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parabolic_round_trip(p in point(10.0)) {
        let q = ParabolicPoint::from_parabolic(p.xi(), p.eta(), p.phi());
        let (a, b) = (p.cartesian(), q.cartesian());
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() < 1e-12 * (1.0 + p.r()));
        }
        prop_assert!((p.r() - 0.5 * (p.xi().powi(2) + p.eta().powi(2))).abs() < 1e-12 * (1.0 + p.r()));
    }

    #[test]
    fn l_is_on_the_unit_hyperboloid(u in cvec(2.0)) {
        prop_assume!((C::new(1.0, 0.0) + u.square()).norm() > 1e-3);
        let l = l_of_u(&u).unwrap();
        let ll = mdot(&l, &l);
        prop_assert!((ll + 1.0).norm() < 1e-9 * (1.0 + u.norm_sqr()).powi(2));
        let back = u_of_l(&l).unwrap();
        prop_assert!(back.max_abs_diff(&u) < 1e-9 * (1.0 + u.norm_sqr()));
    }

    #[test]
    fn admissibility_is_phase_invariant(u in cvec(1.5), theta in 0.0..2.0 * PI) {
        let turned = u.scale(C::from_polar(1.0, theta));
        let (a, b) = (validate(u), validate(turned));
        let margin = a.as_ref().map(|p| p.ww()).unwrap_or(0.0).abs();
        prop_assume!(margin > 1e-9 || a.is_err() && b.is_err());
        prop_assert_eq!(a.is_ok(), b.is_ok());
    }

    #[test]
    fn rotation_covariance(u in admissible(), p in point(4.0), ax in axis(), angle in 0.0..2.0 * PI) {
        let r = Rotation::about_axis(ax, angle).unwrap();
        let a = amplitude_normalized(&u, &p).unwrap();
        let b = amplitude_normalized(&rotate_param(&u, &r), &rotate_point(&p, &r)).unwrap();
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn overlap_is_bounded(u in admissible(), v in admissible()) {
        let uv = overlap(&u, &v).unwrap();
        let vu = overlap(&v, &u).unwrap();
        prop_assert!(uv.norm() <= 1.0 + 1e-12);
        prop_assert!((uv - vu.conj()).norm() < 1e-12);
        prop_assert!((overlap(&u, &u).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn evolution_composes(u in cvec(1.0), a in -10.0..10.0f64, b in -10.0..10.0f64) {
        let twice = evolve(&evolve(&u, a), b);
        prop_assert!(twice.max_abs_diff(&evolve(&u, a + b)) < 1e-12);
    }

    #[test]
    fn density_modulus_matches_amplitude(u in admissible(), p in point(6.0)) {
        let shape = density_shape(&u).unwrap();
        let direct = amplitude_normalized(&u, &p).unwrap().norm();
        prop_assert!((shape.modulus(&p) - direct).abs() < 1e-12);
    }

    #[test]
    fn laguerre_at_zero_is_binomial(n in 0u32..60, alpha in 0u32..20) {
        let want = log_binomial(n + alpha, n).exp();
        prop_assert!((laguerre(n, alpha, 0.0) - want).abs() <= 1e-12 * want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_matches_closed_form(l1 in complex(0.6), l2 in complex(0.6), p in point(5.0)) {
        let lp = LambdaPair::new(l1, l2);
        prop_assume!(lp.modulus() > 1e-3);
        let opts = SeriesOptions::default();
        let reference = ParabolicPoint::from_cartesian(0.0, 0.0, 1.0);
        let phase = relative_phase(
            series_amplitude(&lp, &reference, &opts).unwrap(),
            amplitude_closed(&lp, &reference).unwrap(),
        ).unwrap();
        let s = series_amplitude(&lp, &p, &opts).unwrap() * phase;
        prop_assert!((s - amplitude_closed(&lp, &p).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn trajectories_are_ellipses(
        k in (-0.3..0.3f64, -0.3..0.3f64, -0.3..0.3f64),
        raw in (-0.3..0.3f64, -0.3..0.3f64, -0.3..0.3f64),
        theta in 0.0..2.0 * PI,
    ) {
        let k = [k.0, k.1, k.2];
        let kk: f64 = k.iter().map(|c| c * c).sum();
        prop_assume!(kk > 1e-4);
        let t = (k[0] * raw.0 + k[1] * raw.1 + k[2] * raw.2) / kk;
        let m = [raw.0 - t * k[0], raw.1 - t * k[1], raw.2 - t * k[2]];
        let kmt = KMTheta::new(k, m, theta).unwrap();
        prop_assume!(trajectory(&kmt, 64).is_ok());
        let samples = trajectory(&kmt, 64).unwrap();
        prop_assert!(fit_ellipse(&samples).unwrap().residual < 1e-10);
        let x = expect_position(&kmt.u()).unwrap();
        prop_assert!((0..3).all(|i| (x[i] - samples[0].position[i]).abs() < 1e-15));
    }
}
