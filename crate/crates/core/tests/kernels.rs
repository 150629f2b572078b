use num_complex::Complex64;
use proptest::prelude::*;
use twinbarrier::compensated::{TwoFloat, Wavenumber};
use twinbarrier::geometry::Geometry;
use twinbarrier::linalg::{solve_2x2, symmetric_eigenvalues, Cholesky, ComplexLu, Dense};
use twinbarrier::quadrature::gauss_legendre;

fn spd(n: usize, seed: &[f64]) -> Dense<f64> {
    let r = Dense::from_fn(n, n, |i, j| {
        seed[(i * n + j) % seed.len()] + if i == j { 1.0 } else { 0.0 }
    });
    Dense::from_fn(n, n, |i, j| {
        (0..n).map(|k| r[(k, i)] * r[(k, j)]).sum::<f64>() + if i == j { 0.5 } else { 0.0 }
    })
}

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    let (x, w) = gauss_legendre(8);
    for p in 0..16 {
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
        let want = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
        assert!((q - want).abs() < 1e-14, "degree {p}");
    }
}

#[test]
fn double_double_sine_and_cosine_are_consistent() {
    for &x in &[0.01, 0.5, 1.0, 2.7, 10.0, 123.456] {
        let (s, c) = TwoFloat::from_f64(x).sin_cos();
        assert!((s.to_f64() - x.sin()).abs() < 2e-16);
        assert!((c.to_f64() - x.cos()).abs() < 2e-16);
        let one = s * s + c * c - TwoFloat::from_f64(1.0);
        assert!(one.to_f64().abs() < 1e-30, "{x}: {:e}", one.to_f64());
    }
}

#[test]
fn double_double_resolves_sub_ulp_offsets() {
    let x = TwoFloat::new(1.0, 1e-20);
    let (s, _) = x.sin_cos();
    let (s0, c0) = TwoFloat::from_f64(1.0).sin_cos();
    let ds = (s - s0).to_f64();
    assert!((ds - 1e-20 * c0.to_f64()).abs() < 1e-33);
}

#[test]
fn wavenumber_normalises_its_correction() {
    let k = Wavenumber::new(1.0, 3.0 * f64::EPSILON);
    assert!(k.correction.abs() <= 0.5 * f64::EPSILON * k.value);
    let moved = Wavenumber::from(2.0).offset(1e-25);
    assert_eq!(moved.value, 2.0);
    assert_eq!(moved.correction, 1e-25);
}

#[test]
fn cholesky_rejects_indefinite_matrices() {
    let a = Dense::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 2.0 });
    assert!(Cholesky::factor(&a, "test").is_err());
}

#[test]
fn singular_2x2_is_reported() {
    let one = Complex64::new(1.0, 0.0);
    let r = solve_2x2([[one, one], [one, one]], [one, one]);
    assert!(matches!(r, Err(twinbarrier::Error::NearSingular { .. })));
}

#[test]
fn geometry_rejects_bad_inputs() {
    assert!(Geometry::interval(1.0, 0.95, 0.1, 0.3, 2.0).is_err());
    assert!(Geometry::interval(1.0, 0.45, 0.1, 0.3, 0.2).is_err());
    assert!(Geometry::interval(-1.0, 0.45, 0.1, 0.3, 2.0).is_err());
    assert!(Geometry::interval(1.0, 0.45, 0.0, 0.3, 2.0).is_err());
    let g = Geometry::desk();
    assert!((g.half_cavity() - 0.85).abs() < 1e-15);
    assert!((g.symmetry_plane() - 1.15).abs() < 1e-15);
}

proptest! {
    #[test]
    fn cholesky_solves_spd_systems(seed in prop::collection::vec(-1.0f64..1.0, 25), b in prop::collection::vec(-1.0f64..1.0, 5)) {
        let a = spd(5, &seed);
        let x = Cholesky::factor(&a, "A").unwrap().solve(&b);
        let ax = a.mul_vec(&x);
        for (u, v) in ax.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobi_preserves_trace_and_frobenius_norm(seed in prop::collection::vec(-1.0f64..1.0, 36)) {
        let a = spd(6, &seed);
        let ev = symmetric_eigenvalues(&a);
        let tr: f64 = (0..6).map(|i| a[(i, i)]).sum();
        let fro: f64 = a.as_slice().iter().map(|v| v * v).sum();
        prop_assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-10 * tr.abs().max(1.0));
        prop_assert!((ev.iter().map(|v| v * v).sum::<f64>() - fro).abs() < 1e-9 * fro.max(1.0));
        prop_assert!(ev[0] > 0.0);
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pivoted_lu_solves_complex_systems(re in prop::collection::vec(-1.0f64..1.0, 16), im in prop::collection::vec(-1.0f64..1.0, 16)) {
        let a = Dense::from_fn(4, 4, |i, j| Complex64::new(re[i * 4 + j] + if i == j { 3.0 } else { 0.0 }, im[i * 4 + j]));
        let b: Vec<Complex64> = (0..4).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let lu = ComplexLu::factor(a.clone(), "A").unwrap();
        let x = lu.solve(&b);
        for i in 0..4 {
            let r: Complex64 = (0..4).map(|j| a[(i, j)] * x[j]).sum::<Complex64>() - b[i];
            prop_assert!(r.norm() < 1e-12);
        }
        prop_assert!(lu.condition() >= 1.0);
    }

    #[test]
    fn double_double_products_are_exact_to_working_precision(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        let p = TwoFloat::from_f64(a) * TwoFloat::from_f64(b);
        let exact = a.mul_add(b, -p.hi);
        prop_assert_eq!(p.lo, exact);
        let s = (TwoFloat::from_f64(a) + TwoFloat::from_f64(b)) - TwoFloat::from_f64(a);
        prop_assert!((s.to_f64() - b).abs() <= 1e-300 + 1e-30 * b.abs());
    }

    #[test]
    fn double_double_sqrt_squares_back(x in 1e-3f64..1e3) {
        let r = TwoFloat::from_f64(x).sqrt();
        let back = r * r - TwoFloat::from_f64(x);
        prop_assert!(back.to_f64().abs() < 1e-29 * x);
    }
}
