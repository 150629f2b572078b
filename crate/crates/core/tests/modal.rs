use num_complex::Complex64;
use proptest::prelude::*;
use twinbarrier::geometry::{Aperture, CrossSection, Geometry};
use twinbarrier::linalg::symmetric_eigenvalues;
use twinbarrier::modal::{field_map, Face, FieldPoint, HalfFieldExpansion, HalfProblem, ModalSolver, Truncation};
use twinbarrier::resonance::{find_resonances, FrequencyBand, SearchOptions};
use twinbarrier::Error;

fn desk() -> ModalSolver {
    ModalSolver::new(Geometry::desk(), Truncation::default()).unwrap()
}

fn band_grid(solver: &ModalSolver, count: usize) -> Vec<f64> {
    FrequencyBand::interior(solver, 1e-3, count).grid()
}

#[test]
fn band_edges_are_duct_and_aperture_cutoffs() {
    let s = desk();
    let (lo, hi) = s.band();
    assert!((lo - std::f64::consts::PI).abs() < 1e-14);
    assert!((hi - 2.0 * std::f64::consts::PI).abs() < 1e-14);
}

#[test]
fn out_of_band_wavenumbers_are_rejected() {
    let s = desk();
    for k in [1.0, std::f64::consts::PI, 7.0, f64::NAN] {
        assert!(matches!(s.scattering(k), Err(Error::BandViolation { .. })), "k = {k}");
    }
}

#[test]
fn axial_rates_are_real_and_positive() {
    let s = desk();
    let sp = s.spectrum(4.0).unwrap();
    assert!(sp.gamma1 > 0.0);
    assert!(sp.gamma.iter().chain(&sp.beta).all(|&g| g > 0.0 && g.is_finite()));
    assert!(sp.beta_hat.iter().zip(&sp.beta).all(|(bh, b)| bh >= b));
    assert_eq!(sp.gamma.len(), 199);
}

#[test]
fn operators_are_symmetric_positive_definite_across_band() {
    let s = desk();
    for k in band_grid(&s, 25) {
        let ops = s.operators(&s.spectrum(k).unwrap());
        for (name, a) in [("A0", &ops.a0), ("A1D", &ops.a1_dirichlet), ("A1N", &ops.a1_neumann)] {
            let scale = a.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(a.max_asymmetry() <= 1e-14 * scale, "{name} asymmetric at k = {k}");
            assert!(symmetric_eigenvalues(a)[0] > 0.0, "{name} not positive at k = {k}");
        }
        assert!(ops.coupling.iter().all(|&b| b <= 0.0 && b.is_finite()));
    }
}

#[test]
fn reduced_coefficients_have_the_expected_structure() {
    let s = desk();
    for k in band_grid(&s, 40) {
        for v in HalfProblem::BOTH {
            let (_, r) = s.reduced(k, v).unwrap();
            assert_eq!(r.a.re, 0.0);
            assert_eq!(r.c.re, 0.0);
            assert_eq!(r.b.im, 0.0);
            assert_eq!(r.d.im, 0.0);
            assert!(r.a.im < 0.0, "Im a must be negative");
            assert!(r.d.re > 0.0, "d must be positive");
            // Reciprocity of the two barrier faces: c = -i b.
            assert!((r.c - Complex64::new(0.0, -1.0) * r.b).norm() <= 1e-10 * r.b.norm());
        }
    }
}

#[test]
fn half_reflections_are_unimodular_across_band() {
    let s = desk();
    for k in band_grid(&s, 400) {
        for v in HalfProblem::BOTH {
            let r = s.reflection_half(k, v).unwrap();
            assert!((r.norm() - 1.0).abs() <= 1e-10, "k = {k}, {v:?}: |r| = {}", r.norm());
        }
    }
}

#[test]
fn energy_is_conserved_across_band() {
    let s = desk();
    for k in band_grid(&s, 100) {
        let res = s.scattering(k).unwrap();
        assert!(res.energy_defect <= 1e-10, "k = {k}: {}", res.energy_defect);
    }
}

#[test]
fn block_and_reduced_paths_agree() {
    let s = desk();
    let mut compared = 0;
    for k in band_grid(&s, 60) {
        for v in HalfProblem::BOTH {
            let h = s.solve_half(k, v).unwrap();
            let t = &h.traces;
            if t.block_condition > 1e8 || t.reduced_condition > 1e8 {
                continue;
            }
            for i in 0..2 {
                let (a, b) = (t.block_projections[i], t.reduced_projections[i]);
                assert!(
                    (a - b).norm() <= 1e-10 * a.norm().max(b.norm()).max(1e-300),
                    "k = {k} {v:?} projection {i}"
                );
            }
            let r = h.reflection;
            assert!((r.value - r.block).norm() <= 1e-10);
            assert!((r.value - r.raw_quotient).norm() <= 1e-10);
            compared += 1;
        }
    }
    assert!(compared > 100);
}

#[test]
fn closed_cavity_limit_reflects_totally() {
    // Very small apertures: transmission shuts off and |r1| -> 1 away from resonances.
    let mut prev = f64::INFINITY;
    for delta in [0.2, 0.1, 0.05, 0.025] {
        let g = Geometry::interval(1.0, 0.5 - delta / 2.0, delta, 0.3, 2.0).unwrap();
        let s = ModalSolver::new(g, Truncation::new(200, 30)).unwrap();
        let t = s.scattering(4.0).unwrap().t1.norm();
        assert!(t < prev, "delta = {delta}: |t1| = {t}");
        prev = t;
    }
    assert!(prev < 1e-15);
}

#[test]
fn truncation_refinement_is_monotone_along_fixed_mode_ratio() {
    let g = Geometry::desk();
    let r = |n, m| {
        ModalSolver::new(g, Truncation::new(n, m))
            .unwrap()
            .scattering(4.0)
            .unwrap()
            .r1
    };
    let r1 = r(150, 15);
    let r2 = r(300, 30);
    let r3 = r(600, 60);
    let d1 = (r1 - r2).norm();
    let d2 = (r2 - r3).norm();
    assert!(d2 < d1, "{d1:e} -> {d2:e}");
}

#[test]
fn doubling_check_flags_the_desk_truncation_as_converged_in_modulus() {
    let res = desk().scattering_checked(4.0).unwrap();
    let check = res.convergence.unwrap();
    assert_eq!(check.doubled, Truncation::new(200, 60));
    assert!(check.converged, "{check:?}");
}

#[test]
fn interface_mismatch_decreases_with_aperture_modes() {
    let g = Geometry::desk();
    let mut prev = [f64::INFINITY; 4];
    for m in [10, 20, 40] {
        let s = ModalSolver::new(g, Truncation::new(10 * m, m)).unwrap();
        let sol = s.solve_half(4.0, HalfProblem::Dirichlet).unwrap();
        let e = HalfFieldExpansion::from_solution(&s, &sol);
        let (u0, d0) = e.interface_mismatch(&s, Face::Inlet);
        let (u1, d1) = e.interface_mismatch(&s, Face::Outlet);
        let now = [u0, d0, u1, d1];
        for i in 0..4 {
            assert!(now[i] < prev[i], "M = {m}, residual {i}: {} !< {}", now[i], prev[i]);
        }
        prev = now;
    }
}

#[test]
fn field_vanishes_in_barrier_material_and_decreases_on_faces() {
    let g = Geometry::desk();
    let mut prev = f64::INFINITY;
    for m in [10, 20, 40] {
        let s = ModalSolver::new(g, Truncation::new(10 * m, m)).unwrap();
        let pts: Vec<FieldPoint> = (0..=20)
            .map(|i| FieldPoint {
                x: i as f64 / 20.0,
                y: 0.0,
                z: 0.15,
            })
            .chain((0..=20).map(|i| FieldPoint {
                x: i as f64 / 20.0,
                y: 0.0,
                z: 2.1,
            }))
            .collect();
        let map = field_map(&s, 4.0, &pts).unwrap();
        for (p, v) in map.points.iter().zip(&map.values) {
            if g.in_barrier(p.x, p.y, p.z) {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
        let mut face_max = 0.0f64;
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            if !g.in_aperture(x, 0.0) {
                let [(u, _), _] = map.dirichlet.face_values(&s, Face::Inlet, x, 0.0);
                face_max = face_max.max(u.norm());
            }
        }
        assert!(face_max < prev, "M = {m}: {face_max}");
        prev = face_max;
    }
}

#[test]
fn field_is_continuous_across_the_mid_plane_and_matches_reflection() {
    let s = desk();
    let g = *s.geometry();
    let z0 = g.symmetry_plane();
    let pts = [
        FieldPoint {
            x: 0.3,
            y: 0.0,
            z: z0 - 1e-9,
        },
        FieldPoint {
            x: 0.3,
            y: 0.0,
            z: z0 + 1e-9,
        },
        FieldPoint {
            x: 0.5,
            y: 0.0,
            z: -3.0,
        },
    ];
    let map = field_map(&s, 4.0, &pts).unwrap();
    assert!((map.values[0] - map.values[1]).norm() < 1e-6);
    // Far from the barrier only the fundamental survives.
    let res = s.scattering(4.0).unwrap();
    let sp = s.spectrum(4.0).unwrap();
    let psi1 = 2f64.sqrt() * (std::f64::consts::PI * 0.5).sin();
    let z = -3.0;
    let want = psi1 * (Complex64::from_polar(1.0, sp.gamma1 * z) + res.r1 * Complex64::from_polar(1.0, -sp.gamma1 * z));
    assert!((map.values[2] - want).norm() < 1e-8);
}

#[test]
fn field_concentrates_in_the_cavity_at_resonance() {
    let s = desk();
    let band = FrequencyBand::interior(&s, 1e-3, 400);
    let res = find_resonances(&s, &band, HalfProblem::Dirichlet, &SearchOptions::default()).unwrap();
    assert_eq!(res.len(), 1);
    let g = *s.geometry();
    let mut pts = Vec::new();
    for i in 1..20 {
        for j in 0..=66 {
            let z = -1.0 + j as f64 * 0.05;
            pts.push(FieldPoint {
                x: i as f64 / 20.0,
                y: 0.0,
                z,
            });
        }
    }
    let map = field_map(&s, res[0].k_res, &pts).unwrap();
    let gain = map.cavity_enhancement(&s);
    assert!(gain > 5.0, "cavity enhancement {gain}");
    assert!(g.in_barrier(0.1, 0.0, 0.1));
}

#[test]
fn rectangular_duct_conserves_energy() {
    let section = CrossSection::Rectangle {
        height: 1.0,
        width: 2.0,
    };
    let hole = Aperture {
        x0: 0.4,
        delta: 0.2,
        y0: 0.85,
        delta2: 0.3,
    };
    let g = Geometry::new(section, hole, 0.2, 1.5).unwrap();
    let s = ModalSolver::new(g, Truncation::new(120, 20)).unwrap();
    let (lo, hi) = s.band();
    assert!((lo * lo - std::f64::consts::PI.powi(2) * 1.25).abs() < 1e-12);
    for i in 1..10 {
        let k = lo + (hi - lo) * i as f64 / 10.0;
        let r = s.scattering(k).unwrap();
        assert!(r.energy_defect < 1e-10);
        assert!((r.r1_dirichlet.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn mirror_geometry_gives_identical_scattering() {
    let a = Geometry::interval(1.0, 0.2, 0.15, 0.25, 1.8).unwrap();
    let b = Geometry::interval(1.0, 1.0 - 0.2 - 0.15, 0.15, 0.25, 1.8).unwrap();
    let t = Truncation::new(120, 20);
    let ra = ModalSolver::new(a, t).unwrap().scattering(4.5).unwrap();
    let rb = ModalSolver::new(b, t).unwrap().scattering(4.5).unwrap();
    assert!((ra.r1 - rb.r1).norm() < 1e-12);
    assert!((ra.t1 - rb.t1).norm() < 1e-12);
}

#[test]
fn invalid_truncations_are_rejected() {
    assert!(ModalSolver::new(Geometry::desk(), Truncation::new(1, 5)).is_err());
    assert!(ModalSolver::new(Geometry::desk(), Truncation::new(10, 0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_configurations_are_unimodular_and_conserve_energy(
        x0 in 0.0f64..0.7,
        delta in 0.06f64..0.3,
        w in 0.05f64..0.5,
        gap in 0.2f64..2.0,
        t in 0.01f64..0.99,
    ) {
        let delta = delta.min(1.0 - x0);
        let g = Geometry::interval(1.0, x0, delta, w, w + gap).unwrap();
        let s = ModalSolver::new(g, Truncation::new(60, 10)).unwrap();
        let (lo, hi) = s.band();
        let k = lo + (hi - lo) * t;
        let r = s.scattering(k).unwrap();
        prop_assert!((r.r1_dirichlet.norm() - 1.0).abs() < 1e-10);
        prop_assert!((r.r1_neumann.norm() - 1.0).abs() < 1e-10);
        prop_assert!(r.energy_defect < 1e-10);
    }

    #[test]
    fn evanescent_amplitudes_are_finite(t in 0.01f64..0.99) {
        let s = ModalSolver::new(Geometry::desk(), Truncation::new(100, 15)).unwrap();
        let (lo, hi) = s.band();
        let r = s.scattering(lo + (hi - lo) * t).unwrap();
        prop_assert!(r.rn.iter().chain(&r.tn).all(|v| v.is_finite()));
    }
}
