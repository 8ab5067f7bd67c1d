use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use nalgebra::DVector;
use num_complex::Complex64;

use spin_discord::correlations::correlation_point;
use spin_discord::oracle::{
    eigenphase_spectrum, expm_hermitian, mutual_information_exact, projected_state, spin_operator,
    von_neumann_entropy, Axis, Bipartition, CMatrix, DenseOperator, DiscordOptions, ElectronBranch,
    MeasurementAxis, Oracle, PhaseSpectrum, Role,
};
use spin_discord::verify::{random_cases, relative_error};
use spin_discord::{Error, ExperimentConfig, NuclearSpinParam, SequenceKind, SpinBath};

const BETA: f64 = 0.01;

fn pair() -> SpinBath {
    SpinBath::equal(2, 1.0, 0.5).unwrap()
}

// A = 1, ω = 0.5 gives n_x² = 1/2, so the FID v is sin²(tΩ/2).
fn fid_time_for(v: f64) -> f64 {
    let omega = 0.5f64.sqrt();
    2.0 * v.sqrt().asin() / omega
}

fn cmax(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|e| e.norm()).fold(0.0, f64::max)
}

#[test]
fn spin_operator_examples() {
    let z = spin_operator(1, 0, Axis::Z).unwrap();
    assert_eq!(z.matrix()[(0, 0)].re, 0.5);
    assert_eq!(z.matrix()[(1, 1)].re, -0.5);

    let x = spin_operator(2, 0, Axis::X).unwrap();
    assert!(x.trace().norm() < 1e-15);
    let mut eigs: Vec<f64> = x
        .matrix()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    eigs.sort_by(f64::total_cmp);
    for (e, want) in eigs.iter().zip([-0.5, -0.5, 0.5, 0.5]) {
        assert_abs_diff_eq!(*e, want, epsilon = 1e-15);
    }

    for site in 0..3 {
        let ix = spin_operator(3, site, Axis::X).unwrap();
        let iy = spin_operator(3, site, Axis::Y).unwrap();
        let iz = spin_operator(3, site, Axis::Z).unwrap();
        let want = iz.matrix().map(|e| e * Complex64::i());
        assert!(cmax(&ix.commutator(&iy), &want) < 1e-15);
    }
    assert!(matches!(
        spin_operator(2, 2, Axis::X),
        Err(Error::SiteOutOfRange { .. })
    ));
}

#[test]
fn nuclear_hamiltonian_examples() {
    let o = Oracle::default();
    let coupled = SpinBath::equal(1, 1.0, 0.0).unwrap();
    let h = o.nuclear_hamiltonian(&coupled, ElectronBranch::Up).unwrap();
    assert_abs_diff_eq!(h.matrix()[(0, 1)].re, 0.25, epsilon = 1e-16);
    assert_abs_diff_eq!(h.matrix()[(1, 0)].re, 0.25, epsilon = 1e-16);
    assert_abs_diff_eq!(h.matrix()[(0, 0)].norm(), 0.0);

    let free = SpinBath::equal(1, 0.0, 1.0).unwrap();
    let h = o.nuclear_hamiltonian(&free, ElectronBranch::Up).unwrap();
    assert_abs_diff_eq!(h.matrix()[(0, 0)].re, -0.5);
    assert_abs_diff_eq!(h.matrix()[(1, 1)].re, 0.5);

    let bath = SpinBath::new(vec![
        NuclearSpinParam {
            a_x: 0.7,
            omega: -1.3,
        },
        NuclearSpinParam {
            a_x: -1.1,
            omega: 0.4,
        },
        NuclearSpinParam {
            a_x: 0.2,
            omega: 0.9,
        },
    ])
    .unwrap();
    let hp = o.nuclear_hamiltonian(&bath, ElectronBranch::Up).unwrap();
    let hm = o.nuclear_hamiltonian(&bath, ElectronBranch::Down).unwrap();
    let mut want = CMatrix::zeros(8, 8);
    for (j, s) in bath.iter().enumerate() {
        want -= spin_operator(3, j, Axis::Z)
            .unwrap()
            .matrix()
            .map(|e| e * 2.0 * s.omega);
    }
    assert!(cmax(&(hp.matrix() + hm.matrix()), &want) < 1e-15);
}

#[test]
fn single_spin_propagator_closed_form() {
    let (a, w, t) = (1.3, -0.6, 2.7);
    let big = (w * w + a * a / 4.0f64).sqrt();
    let (nx, nz) = (a / (2.0 * big), w / big);
    let ix = spin_operator(1, 0, Axis::X).unwrap();
    let iz = spin_operator(1, 0, Axis::Z).unwrap();
    let axis = ix.matrix().map(|e| e * nx) + iz.matrix().map(|e| e * nz);
    let h = DenseOperator::new(axis.map(|e| e * big), Role::Hamiltonian).unwrap();
    let u = expm_hermitian(&h, t, 1.0).unwrap();
    let want = CMatrix::identity(2, 2).map(|e| e * (big * t / 2.0).cos())
        - axis.map(|e| e * Complex64::new(0.0, 2.0 * (big * t / 2.0).sin()));
    assert!(cmax(u.matrix(), &want) < 1e-14);

    let back = expm_hermitian(&h, t, -1.0).unwrap();
    assert!(cmax(&(u.matrix() * back.matrix()), &CMatrix::identity(2, 2)) < 1e-12);
    let zero = expm_hermitian(&h, 0.0, 1.0).unwrap();
    assert_eq!(zero.matrix(), &CMatrix::identity(2, 2));
}

#[test]
fn evolution_unitary_examples() {
    let o = Oracle::default();
    for seq in SequenceKind::ALL {
        let u = o.evolution_unitary(&pair(), 0.0, seq).unwrap();
        assert!(cmax(u.matrix(), &CMatrix::identity(4, 4)) < 1e-15);
    }

    let single = SpinBath::equal(1, 1.0, 0.5).unwrap();
    let u = o
        .evolution_unitary(&single, fid_time_for(0.5), SequenceKind::Fid)
        .unwrap();
    let spec = eigenphase_spectrum(&u).unwrap();
    assert!(spec.max_mismatch(&PhaseSpectrum::new([PI / 3.0, -PI / 3.0])) < 1e-12);

    let zero_field = SpinBath::new(vec![
        NuclearSpinParam {
            a_x: 1.0,
            omega: 0.0,
        },
        NuclearSpinParam {
            a_x: -0.4,
            omega: 0.0,
        },
    ])
    .unwrap();
    for t in [0.3, 2.0, 17.0] {
        let u = o
            .evolution_unitary(&zero_field, t, SequenceKind::Echo)
            .unwrap();
        assert!(cmax(u.matrix(), &CMatrix::identity(4, 4)) < 1e-12);
    }

    let u = o
        .evolution_unitary(&pair(), fid_time_for(1.0), SequenceKind::Fid)
        .unwrap();
    let spec = eigenphase_spectrum(&u).unwrap();
    assert!(spec.max_mismatch(&PhaseSpectrum::new([PI, 0.0, 0.0, -PI])) < 1e-9);
    assert!(spec.is_negation_closed(1e-9));
}

#[test]
fn oracle_cap_enforced() {
    let big = SpinBath::equal(9, 1.0, 0.5).unwrap();
    assert!(matches!(
        Oracle::default().evolution_unitary(&big, 1.0, SequenceKind::Fid),
        Err(Error::OracleCapExceeded { n: 9, cap: 8 })
    ));
    assert!(Oracle::with_cap(2)
        .density_matrix(
            &SpinBath::equal(3, 1.0, 0.5).unwrap(),
            1.0,
            SequenceKind::Fid,
            BETA
        )
        .is_err());
}

#[test]
fn density_matrix_examples() {
    let o = Oracle::default();
    let rho = o
        .density_matrix(&pair(), 1.7, SequenceKind::Fid, 0.0)
        .unwrap();
    assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), 3.0, epsilon = 1e-12);

    // ⟨S_x⟩ starts at −β/4 and decays with the signal
    let sx = spin_operator(3, 0, Axis::X).unwrap();
    for seq in SequenceKind::ALL {
        for t in [0.0, 0.9, 3.1] {
            let rho = o.density_matrix(&pair(), t, seq, BETA).unwrap();
            let sx_mean = (rho.matrix() * sx.matrix()).trace().re;
            let g = spin_discord::correlations::signal(&pair(), t, seq);
            assert_abs_diff_eq!(sx_mean / (-BETA / 4.0), g, epsilon = 1e-12);
        }
    }
}

#[test]
fn direct_pulse_construction_matches() {
    let o = Oracle::default();
    for n in 1..=3 {
        for case in random_cases(11, n, 10) {
            for seq in SequenceKind::ALL {
                let a = o.density_matrix(&case.bath, case.t, seq, BETA).unwrap();
                let b = o
                    .density_matrix_direct(&case.bath, case.t, seq, BETA)
                    .unwrap();
                assert!(a.max_abs_diff(&b) <= 1e-12, "n={n} {seq} t={}", case.t);
            }
        }
    }
}

#[test]
fn signal_equals_normalized_trace() {
    let o = Oracle::default();
    for n in 1..=4 {
        for case in random_cases(5, n, 25) {
            for seq in SequenceKind::ALL {
                let u = o.evolution_unitary(&case.bath, case.t, seq).unwrap();
                let g = spin_discord::correlations::signal(&case.bath, case.t, seq);
                assert!((u.trace().re / u.dim() as f64 - g).abs() <= 1e-12);
                let thetas: Vec<f64> = case
                    .bath
                    .branches(case.t, seq)
                    .iter()
                    .map(|b| b.theta)
                    .collect();
                let spec = eigenphase_spectrum(&u).unwrap();
                assert!(spec.max_mismatch(&PhaseSpectrum::from_branch_phases(&thetas)) <= 1e-9);
            }
        }
    }
}

#[test]
fn mutual_information_examples() {
    let o = Oracle::default();
    let cfg = ExperimentConfig::default();
    let split = Bipartition::electron_nuclear(2);
    let t = fid_time_for(0.5);
    let rho = o
        .density_matrix(&pair(), t, SequenceKind::Fid, BETA)
        .unwrap();
    let exact = mutual_information_exact(&rho, split).unwrap();
    let analytic = BETA * BETA * (1.0 - 0.0625) / (8.0 * std::f64::consts::LN_2);
    assert_abs_diff_eq!(
        correlation_point(&pair(), t, SequenceKind::Fid, &cfg).i_abs,
        analytic,
        epsilon = 1e-18
    );
    assert!(relative_error(exact, analytic, 0.0) <= 1e-3);

    for beta in [0.01, 0.5, 1.5] {
        let rho = o
            .density_matrix(&pair(), 0.0, SequenceKind::Echo, beta)
            .unwrap();
        assert!(mutual_information_exact(&rho, split).unwrap().abs() <= 1e-14);
    }
    let flat = o
        .density_matrix(&pair(), 2.0, SequenceKind::Fid, 0.0)
        .unwrap();
    assert!(mutual_information_exact(&flat, split).unwrap().abs() <= 1e-14);
}

#[test]
fn projection_examples() {
    let o = Oracle::default();
    let split = Bipartition::electron_nuclear(2);
    let flat = DenseOperator::new(CMatrix::identity(8, 8).map(|e| e / 8.0), Role::Density).unwrap();
    let out = projected_state(&flat, &MeasurementAxis::in_plane(1.1)).unwrap();
    assert!(out.max_abs_diff(&flat) < 1e-16);

    let rho0 = o
        .density_matrix(&pair(), 0.0, SequenceKind::Fid, BETA)
        .unwrap();
    let along_x = projected_state(&rho0, &MeasurementAxis::in_plane(0.0)).unwrap();
    assert!(along_x.max_abs_diff(&rho0) < 1e-16);
    let along_y = projected_state(&rho0, &MeasurementAxis::in_plane(PI / 2.0)).unwrap();
    assert!(along_y.max_abs_diff(&flat) < 1e-16);
    assert!(mutual_information_exact(&along_y, split).unwrap().abs() < 1e-15);

    let rho = o
        .density_matrix(&pair(), 2.3, SequenceKind::Echo, BETA)
        .unwrap();
    for axis in [
        MeasurementAxis::in_plane(0.4),
        MeasurementAxis::new(2.0, -0.6).unwrap(),
    ] {
        let once = projected_state(&rho, &axis).unwrap();
        let twice = projected_state(&once, &axis).unwrap();
        assert!(once.max_abs_diff(&twice) <= 1e-12);
        assert!((once.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
    }
}

#[test]
fn discord_examples() {
    let o = Oracle::default();
    let cfg = ExperimentConfig::default();
    let opts = DiscordOptions::default();

    for case in random_cases(3, 1, 8) {
        for seq in SequenceKind::ALL {
            let r = o
                .discord_exact(&case.bath, case.t, seq, BETA, &opts)
                .unwrap();
            assert!(r.d_bits.abs() <= 1e-7);
        }
    }

    let t1 = fid_time_for(1.0);
    let at_one = o
        .discord_exact(&pair(), t1, SequenceKind::Fid, BETA, &opts)
        .unwrap();
    assert!(at_one.d_bits.abs() <= 1e-9, "{}", at_one.d_bits);
    let split = Bipartition::electron_nuclear(2);
    for k in 0..=20 {
        let t = k as f64 * 0.5;
        let rho = o
            .density_matrix(&pair(), t, SequenceKind::Fid, BETA)
            .unwrap();
        assert!(mutual_information_exact(&rho, split).unwrap() <= at_one.i_bits * (1.0 + 1e-9));
    }

    let t = fid_time_for(0.5);
    let r = o
        .discord_exact(&pair(), t, SequenceKind::Fid, BETA, &opts)
        .unwrap();
    assert!(relative_error(r.d_bits / r.i_bits, 0.4, 0.0) <= 1e-2);
    let p = correlation_point(&pair(), t, SequenceKind::Fid, &cfg);
    assert_abs_diff_eq!(p.ratio, 0.4, epsilon = 1e-12);
    // K < 0 here, so the best in-plane axis is x
    let dist = r.phi_star.min(PI - r.phi_star);
    assert!(dist < 1e-4, "phi* = {}", r.phi_star);
}

#[test]
fn sphere_never_beats_plane() {
    let o = Oracle::default();
    let opts = DiscordOptions {
        sphere: Some(Default::default()),
        ..DiscordOptions::default()
    };
    for n in 1..=3 {
        for case in random_cases(17, n, 3) {
            for seq in SequenceKind::ALL {
                let r = o
                    .discord_exact(&case.bath, case.t, seq, BETA, &opts)
                    .unwrap();
                assert!(r.sphere_c_bits.unwrap() - r.c_bits <= 1e-9);
            }
        }
    }
}

#[test]
fn density_role_checked() {
    let bad = CMatrix::from_diagonal(&DVector::from_vec(vec![
        Complex64::new(0.7, 0.0),
        Complex64::new(0.7, 0.0),
    ]));
    assert!(matches!(
        DenseOperator::new(bad, Role::Density),
        Err(Error::BadTrace(_))
    ));
}
