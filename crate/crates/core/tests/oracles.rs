//! Closed forms checked against references that share no code with them.

mod common;

use std::f64::consts::PI;

use common::{jacobi_eigenvalues, poisson_tail_by_recursion, simpson};
use phasekit::boundary::{cos_sin_transform, GridFunction};
use phasekit::coherent::{coherent_vector, minimal_dim, poisson_tail, CoherentParams};
use phasekit::linalg::{eigen_decompose, inner_product, StateVector};
use phasekit::phase::{
    abs_phase_entry, build_abs_phase, build_cos_phase, build_function_of_phase, sector_overlap,
    PhaseKernel, PhaseSector,
};
use phasekit::quadrature::{integrate, oracle_validate_entry, OracleKernel, QuadratureConfig};
use phasekit::rotator::{abs_theta_matrix, theta_matrix, AlphaExtension, RotatorTruncation};
use phasekit::Complex64;

const SIMPSON_PANELS: usize = 200_000;

fn e(sector: PhaseSector, n: usize, phi: f64) -> f64 {
    let (norm, trig) = match sector {
        PhaseSector::Plus => (
            if n == 0 {
                1.0 / PI.sqrt()
            } else {
                (2.0 / PI).sqrt()
            },
            (n as f64 * phi).cos(),
        ),
        PhaseSector::Minus => ((2.0 / PI).sqrt(), (n as f64 * phi).sin()),
    };
    norm * trig
}

#[test]
fn abs_phase_entries_match_simpson() {
    for sector in PhaseSector::ALL {
        for (n, m) in [(0, 0), (0, 1), (1, 2), (1, 3), (2, 2), (3, 8), (7, 7)] {
            let reference = simpson(
                |p| p * e(sector, n, p) * e(sector, m, p),
                0.0,
                PI,
                SIMPSON_PANELS,
            );
            let reference = if sector == PhaseSector::Minus && (n == 0 || m == 0) {
                0.0
            } else {
                reference
            };
            let closed = abs_phase_entry(sector, n as i64, m as i64).unwrap();
            assert!(
                (closed - reference).abs() < 1e-11,
                "{sector} ({n},{m}): {closed} vs {reference}"
            );
        }
    }
}

#[test]
fn named_abs_phase_values() {
    assert!(
        (abs_phase_entry(PhaseSector::Plus, 0, 1).unwrap() + 2.0 * 2f64.sqrt() / PI).abs() < 1e-15
    );
    assert!((abs_phase_entry(PhaseSector::Minus, 1, 2).unwrap() + 16.0 / (9.0 * PI)).abs() < 1e-15);
}

#[test]
fn oracle_entry_examples() {
    let cfg = QuadratureConfig::adaptive();
    let cases = [
        (PhaseSector::Plus, OracleKernel::Phi, 0, 0, PI / 2.0),
        (
            PhaseSector::Plus,
            OracleKernel::CosPhi,
            0,
            1,
            2f64.sqrt() / 2.0,
        ),
        (
            PhaseSector::Minus,
            OracleKernel::Phi,
            1,
            2,
            -16.0 / (9.0 * PI),
        ),
    ];
    for (sector, kernel, n, m, expected) in cases {
        let entry = oracle_validate_entry(sector, kernel, n, m, &cfg, 1e-12).unwrap();
        assert!(entry.diff <= 1e-12);
        assert!((entry.closed_form - expected).abs() < 1e-15);
        assert!((entry.quadrature - expected).abs() < 1e-12);
    }
}

#[test]
fn cos_phase_matches_simpson() {
    for sector in PhaseSector::ALL {
        let c = build_cos_phase(sector, 6).unwrap();
        for n in 0..6 {
            for m in 0..6 {
                let reference = simpson(
                    |p| p.cos() * e(sector, n, p) * e(sector, m, p),
                    0.0,
                    PI,
                    SIMPSON_PANELS,
                );
                let reference = if sector == PhaseSector::Minus && (n == 0 || m == 0) {
                    0.0
                } else {
                    reference
                };
                assert!(
                    (c.get(n, m).re - reference).abs() < 1e-11,
                    "{sector} ({n},{m})"
                );
            }
        }
    }
    assert!((build_cos_phase(PhaseSector::Plus, 4).unwrap().get(1, 2).re - 0.5).abs() < 1e-15);
}

#[test]
fn constant_kernel_is_identity_by_quadrature() {
    let id = build_function_of_phase(&PhaseKernel::constant(1.0), PhaseSector::Plus, 4).unwrap();
    for n in 0..4 {
        for m in 0..4 {
            let q = simpson(
                |p| e(PhaseSector::Plus, n, p) * e(PhaseSector::Plus, m, p),
                0.0,
                PI,
                20_000,
            );
            assert!((id.get(n, m).re - q).abs() < 1e-12);
        }
    }
}

#[test]
fn abs_phi_series_converges_to_closed_form() {
    let dim = 12;
    let exact = build_abs_phase(PhaseSector::Plus, dim).unwrap();
    let err = |cutoff| {
        build_function_of_phase(&PhaseKernel::abs_phi_series(cutoff), PhaseSector::Plus, dim)
            .unwrap()
            .max_abs_diff(&exact)
            .unwrap()
    };
    // Entries only read harmonics up to 2*dim - 2, so any longer series is exact.
    assert!(err(10) > 1e-3);
    assert!(err(2 * dim - 2) <= 1e-14);
    assert!(err(10_000) <= 1e-3);
}

#[test]
fn eigenvalues_match_jacobi() {
    for sector in PhaseSector::ALL {
        for dim in [8, 24] {
            let a = build_abs_phase(sector, dim).unwrap();
            let dense: Vec<Vec<f64>> = (0..dim)
                .map(|i| (0..dim).map(|j| a.get(i, j).re).collect())
                .collect();
            let reference = jacobi_eigenvalues(dense);
            let spec = eigen_decompose(&a).unwrap();
            for (x, y) in spec.eigenvalues.iter().zip(&reference) {
                assert!((x - y).abs() < 1e-12, "{sector} D={dim}: {x} vs {y}");
            }
            assert!(reference.iter().all(|&l| (-1e-9..=PI + 1e-9).contains(&l)));
        }
    }
}

#[test]
fn rotator_entries_match_quadrature() {
    let t = RotatorTruncation::new(4).unwrap();
    let theta = theta_matrix(t, AlphaExtension::new(0.3).unwrap());
    let abs = abs_theta_matrix(t);
    for i in 0..t.dim() {
        for j in 0..t.dim() {
            let k = (t.quantum_number(j) - t.quantum_number(i)) as f64;
            let re = simpson(|x| x * (k * x).cos(), -PI, PI, SIMPSON_PANELS) / (2.0 * PI);
            let im = simpson(|x| x * (k * x).sin(), -PI, PI, SIMPSON_PANELS) / (2.0 * PI);
            assert!((theta.get(i, j) - Complex64::new(re, im)).norm() < 1e-11);
            let a = simpson(|x| x.abs() * (k * x).cos(), -PI, PI, SIMPSON_PANELS) / (2.0 * PI);
            assert!((abs.get(i, j).re - a).abs() < 1e-11);
            assert_eq!(abs.get(i, j).im, 0.0);
        }
    }
    let z = t.index(0).unwrap();
    assert!((theta.get(z, t.index(1).unwrap()) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    assert!((theta.get(z, t.index(2).unwrap()) - Complex64::new(0.0, -0.5)).norm() < 1e-15);
    assert!((abs.get(z, t.index(1).unwrap()).re + 2.0 / PI).abs() < 1e-15);
    assert_eq!(abs.get(z, t.index(2).unwrap()).re, 0.0);
}

#[test]
fn quadrature_examples_against_closed_forms() {
    for cfg in [
        QuadratureConfig::adaptive(),
        QuadratureConfig::fixed(16).with_min_panels(4),
    ] {
        let v = integrate(
            |p: f64| p * (2.0 / PI) * (5.0 * p).cos().powi(2),
            0.0,
            PI,
            &cfg,
        )
        .unwrap();
        assert!((v.value - PI / 2.0).abs() < 1e-12);
        let v = integrate(
            |p: f64| p * (2.0 / PI) * p.cos() * (2.0 * p).cos(),
            0.0,
            PI,
            &cfg,
        )
        .unwrap();
        assert!((v.value + 20.0 / (9.0 * PI)).abs() < 1e-12);
    }
}

#[test]
fn poisson_tail_matches_recursion() {
    for nbar in [0.5, 4.0, 100.0, 400.0] {
        for dim in [1, 10, (nbar as usize) + 5, (nbar as usize) * 2 + 40] {
            let a = poisson_tail(nbar, dim);
            let b = poisson_tail_by_recursion(nbar, dim);
            assert!((a - b).abs() <= 1e-11 * b, "N={nbar} D={dim}: {a} vs {b}");
        }
    }
    for nbar in [4.0, 100.0, 400.0] {
        let d = minimal_dim(nbar, 1e-12);
        assert!(poisson_tail_by_recursion(nbar, d) <= 1e-12);
        assert!(poisson_tail_by_recursion(nbar, d - 1) > 1e-12);
    }
    let d400 = minimal_dim(400.0, 1e-12);
    assert!(d400 > 400 && d400 < 700, "{d400}");
}

#[test]
fn coherent_amplitudes_match_recursion() {
    let v = coherent_vector(&CoherentParams::new(4.0, 0.0).with_dim(64)).unwrap();
    let mut amp = (-2.0f64).exp();
    for (n, a) in v.amps().iter().enumerate() {
        if n > 0 {
            amp *= 2.0 / (n as f64).sqrt();
        }
        assert!((a.re - amp).abs() <= 1e-12 * amp, "n={n}");
    }
    assert!((1.0 - v.norm_sqr()).abs() <= 1e-12);
}

#[test]
fn overlaps_match_direct_sums() {
    for (phi, psi, dim) in [
        (PI / 2.0, PI / 2.0, 64),
        (0.3, 0.7, 128),
        (PI / 2.0, PI / 2.0, 2),
    ] {
        let direct: f64 = (0..dim)
            .map(|n| {
                e(PhaseSector::Plus, n, phi)
                    * if n == 0 {
                        0.0
                    } else {
                        e(PhaseSector::Minus, n, psi)
                    }
            })
            .sum();
        let got = sector_overlap(phi, psi, dim).unwrap();
        assert!(
            (got.re - direct).abs() <= 1e-14 && got.im == 0.0,
            "{phi} {psi} {dim}"
        );
    }
    assert!(sector_overlap(PI / 2.0, PI / 2.0, 2).unwrap().norm() <= 1e-15);
    assert!(sector_overlap(0.3, 0.7, 128).unwrap().norm() > 1e-3);

    let u: Vec<f64> = (0..64).map(|n| e(PhaseSector::Plus, n, 0.7)).collect();
    let v: Vec<f64> = (0..64)
        .map(|n| {
            if n == 0 {
                0.0
            } else {
                e(PhaseSector::Minus, n, 0.7)
            }
        })
        .collect();
    let direct: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    let ip = inner_product(
        &StateVector::from_real(&u).unwrap(),
        &StateVector::from_real(&v).unwrap(),
    )
    .unwrap();
    assert!((ip.re - direct).abs() < 1e-14);
    assert!(direct.abs() > 1e-6);
}

#[test]
fn transform_matches_direct_quadrature() {
    let r_max = 40.0;
    let f = |r: f64| (3.0 * r).cos() * (-(r / 6.0).powi(2)).exp();
    let g = GridFunction::half_line_with_reflection(r_max, 2049, |r| Complex64::new(f(r), 0.0))
        .unwrap();
    let pair = cos_sin_transform(&g).unwrap();
    for k in [0usize, 40, 38, 100] {
        let chi = pair.chi[k];
        let reference = simpson(|r| f(r) * (chi * r).cos(), 0.0, r_max, 400_000) / PI;
        assert!(
            (pair.cos_components[k].re - reference).abs() < 1e-9,
            "k={k}"
        );
    }
}
