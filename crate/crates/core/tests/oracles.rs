//! Independent oracles checked against the library.
//!
//! Eigenvalues come from a cyclic Jacobi sweep on the real symmetric
//! embedding of each Hermitian matrix, Born probabilities from explicit
//! Kronecker-product projectors, and partial traces from direct index sums.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use qss_core::belltest::{chsh4_exact, chsh4_sampled, default_settings, SettingsTable, SMOLIN_VALUE};
use qss_core::measurement::{
    bell_measure, bell_probabilities, expectation, measure_all, MeasurementSetting, Outcome, OutcomeTable,
};
use qss_core::qstate::{bell_state, depolarize, partial_trace, partial_transpose, smolin_state, tensor};
use qss_core::{BellLabel, DensityMatrix, Rng};

/// Eigenvalues of a Hermitian matrix via Jacobi rotations on
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is that of `h` doubled.
fn jacobi_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (apk, aqk) = (*x, *y);
                    *x = c * apk - s * aqk;
                    *y = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    // Each eigenvalue appears twice in the embedding.
    ev.into_iter().step_by(2).collect()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
    }
}

#[test]
fn smolin_spectrum_matches_jacobi() {
    let s = smolin_state();
    let oracle = jacobi_eigenvalues(s.matrix());
    let mut expect = vec![0.0; 12];
    expect.extend([0.25; 4]);
    assert_close(&oracle, &expect, 1e-10);
    assert_close(&s.eigenvalues(), &oracle, 1e-10);
}

#[test]
fn partial_transpose_spectra_match_jacobi() {
    let s = smolin_state();
    for cut in [[2usize, 3], [1, 3], [1, 2]] {
        let pt = partial_transpose(&s, &cut).unwrap();
        let oracle = jacobi_eigenvalues(pt.matrix());
        assert!(oracle[0] >= -1e-9, "cut {cut:?}: {}", oracle[0]);
        assert_close(&pt.eigenvalues(), &oracle, 1e-10);
    }
    for q in 0..4 {
        let pt = partial_transpose(&s, &[q]).unwrap();
        let oracle = jacobi_eigenvalues(pt.matrix());
        assert!(oracle[0] < -1e-3);
        assert!((pt.min_eigenvalue() - oracle[0]).abs() < 1e-10);
    }
    let phi = bell_state(BellLabel::PhiPlus).density();
    let oracle = jacobi_eigenvalues(partial_transpose(&phi, &[1]).unwrap().matrix());
    assert!((oracle[0] + 0.5).abs() < 1e-10);
}

#[test]
fn purity_by_direct_product() {
    let s = smolin_state();
    let sq = s.matrix() * s.matrix();
    assert!((sq.trace().re - 0.25).abs() < 1e-12);
    assert!((s.purity() - 0.25).abs() < 1e-12);
}

/// Reduced state on the leading `k` qubits by direct summation.
fn leading_trace(rho: &DensityMatrix, k: usize) -> DMatrix<Complex64> {
    let rest = 1 << (rho.n_qubits() - k);
    let kd = 1 << k;
    DMatrix::from_fn(kd, kd, |i, j| (0..rest).map(|r| rho.entry(i * rest + r, j * rest + r)).sum())
}

#[test]
fn partial_trace_by_direct_summation() {
    let s = smolin_state();
    let direct = leading_trace(&s, 2);
    let lib = partial_trace(&s, &[0, 1]).unwrap();
    assert!((lib.matrix() - &direct).iter().all(|z| z.norm() < 1e-12));
    for (i, z) in direct.iter().enumerate() {
        let expect = if i % 5 == 0 { 0.25 } else { 0.0 };
        assert!((z - Complex64::new(expect, 0.0)).norm() < 1e-12);
    }
    let phi = bell_state(BellLabel::PhiPlus).density();
    let direct = leading_trace(&phi, 1);
    assert!((partial_trace(&phi, &[0]).unwrap().matrix() - direct).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn smolin_swap_symmetry() {
    let s = smolin_state();
    for a in 0..4 {
        for b in a + 1..4 {
            let mut order = [0, 1, 2, 3];
            order.swap(a, b);
            assert!(s.permute_qubits(&order).unwrap().approx_eq(&s, 1e-10), "swap {a}{b}");
        }
    }
}

fn kron_projector(settings: &[MeasurementSetting], mask: usize) -> DMatrix<Complex64> {
    let n = settings.len();
    settings.iter().enumerate().fold(DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)), |acc, (q, s)| {
        let o = if (mask >> (n - 1 - q)) & 1 == 0 { Outcome::Plus } else { Outcome::Minus };
        let p = s.projector(o);
        let p = DMatrix::from_row_slice(2, 2, &[p[0][0], p[0][1], p[1][0], p[1][1]]);
        acc.kronecker(&p)
    })
}

#[test]
fn born_table_matches_kronecker_projectors() {
    let rho = depolarize(&smolin_state(), 0.7).unwrap();
    let t = default_settings();
    for term in 0..4 {
        let settings = t.term_settings(term);
        let table = OutcomeTable::new(&rho, &settings).unwrap();
        for mask in 0..16 {
            let p = (rho.matrix() * kron_projector(&settings, mask)).trace().re;
            assert!((table.probabilities()[mask] - p).abs() < 1e-12);
        }
    }
}

#[test]
fn smolin_x_parity_by_enumeration() {
    let s = smolin_state();
    let xs = [MeasurementSetting::x(); 4];
    for mask in 0..16usize {
        let p = (s.matrix() * kron_projector(&xs, mask)).trace().re;
        if mask.count_ones() % 2 == 1 {
            assert!(p.abs() < 1e-12);
        } else {
            assert!((p - 0.125).abs() < 1e-12);
        }
    }
}

#[test]
fn expectation_oracle_values() {
    let s = smolin_state();
    let (x, y) = (MeasurementSetting::x(), MeasurementSetting::y());
    let op = |settings: &[MeasurementSetting]| {
        settings.iter().fold(DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)), |acc, s| {
            let o = s.observable();
            acc.kronecker(&DMatrix::from_row_slice(2, 2, &[o[0][0], o[0][1], o[1][0], o[1][1]]))
        })
    };
    for settings in [[x, x, x, x], [x, x, y, y], [y, y, y, y], [x, y, x, y]] {
        let direct = (s.matrix() * op(&settings)).trace().re;
        assert!((expectation(&s, &settings).unwrap() - direct).abs() < 1e-12);
    }
}

#[test]
fn bell_label_frequencies_converge() {
    let s = smolin_state();
    let mut rng = Rng::new(17);
    let mut counts = [0usize; 4];
    let n = 100_000;
    for _ in 0..n {
        counts[bell_measure(&s, (0, 1), &mut rng).unwrap().0.index()] += 1;
    }
    for c in counts {
        assert!((c as f64 / n as f64 - 0.25).abs() < 0.01, "{counts:?}");
    }
}

#[test]
fn sampled_products_match_exact_correlations() {
    let s = smolin_state();
    let t = default_settings();
    let mut rng = Rng::new(23);
    let n = 100_000;
    for term in 0..4 {
        let settings = t.term_settings(term);
        let table = OutcomeTable::new(&s, &settings).unwrap();
        let mean = (0..n).map(|_| table.sample(|_| rng.uniform()).product() as f64).sum::<f64>() / n as f64;
        let exact = expectation(&s, &settings).unwrap();
        assert!((mean - exact).abs() <= 4.0 / (n as f64).sqrt(), "term {term}: {mean} vs {exact}");
    }
}

#[test]
fn sequential_measurement_agrees_with_table_in_law() {
    // Frequencies of measure_all and of OutcomeTable::sample against exact probabilities.
    let s = depolarize(&smolin_state(), 0.9).unwrap();
    let settings = default_settings().term_settings(2);
    let exact = OutcomeTable::new(&s, &settings).unwrap();
    let n = 20_000;
    let mut rng = Rng::new(5);
    let mut seq = [0usize; 16];
    for _ in 0..n {
        seq[measure_all(&s, &settings, &mut rng).unwrap().mask] += 1;
    }
    for (mask, &p) in exact.probabilities().iter().enumerate() {
        let f = seq[mask] as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((f - p).abs() <= 5.0 * sigma + 1e-12, "mask {mask}: {f} vs {p}");
    }
}

#[test]
fn noise_grid_is_linear() {
    let s = smolin_state();
    let t = default_settings();
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let v = chsh4_exact(&depolarize(&s, p).unwrap(), &t).unwrap().value;
        assert!((v - SMOLIN_VALUE * p).abs() < 1e-10, "p={p}: {v}");
    }
}

#[test]
fn detection_boundary() {
    use qss_core::belltest::{violation_threshold_check, Verdict};
    let s = smolin_state();
    let t = default_settings();
    for i in 0..=100 {
        let p = i as f64 / 100.0;
        let r = chsh4_exact(&depolarize(&s, p).unwrap(), &t).unwrap();
        let expect = if p > FRAC_1_SQRT_2 { Verdict::Secure } else { Verdict::Insecure };
        assert_eq!(violation_threshold_check(&r, 0.0), expect, "p={p}");
    }
}

#[test]
fn default_settings_are_locally_optimal() {
    let s = smolin_state();
    let base = default_settings();
    let reference = chsh4_exact(&s, &base).unwrap().value;
    for q in 0..4 {
        for k in 0..2 {
            for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 1.0]] {
                for angle in [0.1, -0.1] {
                    let rotated = base.qubits[q][k].rotated(axis, angle).unwrap();
                    // Rotation about a setting's own axis leaves it fixed.
                    if (0..3).all(|i| (rotated.direction()[i] - base.qubits[q][k].direction()[i]).abs() < 1e-12) {
                        continue;
                    }
                    let mut t: SettingsTable = base;
                    t.qubits[q][k] = rotated;
                    let v = chsh4_exact(&s, &t).unwrap().value;
                    assert!(v < reference - 1e-6, "qubit {q} setting {k} axis {axis:?}: {v}");
                }
            }
        }
    }
}

#[test]
fn sampled_std_error_bound() {
    let mut rng = Rng::new(77);
    let r = chsh4_sampled(&smolin_state(), &default_settings(), 100_000, &mut rng).unwrap();
    // Each term has variance at most 1/(rounds/4); four terms add in quadrature.
    let bound = (4.0 * 4.0 / 100_000.0f64).sqrt() * 1.05;
    assert!(r.std_error <= bound && r.std_error <= 0.03, "{}", r.std_error);
}

#[test]
fn chsh2_optimal_on_phi_plus() {
    use qss_core::belltest::{chsh2_exact, optimal_pair_settings};
    let v = chsh2_exact(&bell_state(BellLabel::PhiPlus).density(), &optimal_pair_settings()).unwrap();
    assert!((v - 2.0 * SQRT_2).abs() < 1e-10);
}

#[test]
fn phase3_labels_uniform_by_enumeration() {
    let probs = bell_probabilities(&smolin_state(), (0, 1)).unwrap();
    assert_close(&probs, &[0.25; 4], 1e-12);
}

fn random_density(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = Rng::new(seed);
    let d = 1 << n;
    let a = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.uniform() - 0.5, rng.uniform() - 0.5));
    let mut m = &a * a.adjoint();
    let tr = m.trace();
    m /= tr;
    // Symmetrize away roundoff.
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::from_matrix(n, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_then_trace_recovers_factor(na in 1usize..3, nb in 1usize..3, sa: u64, sb: u64) {
        let a = random_density(na, sa);
        let b = random_density(nb, sb);
        let t = tensor(&a, &b);
        let keep: Vec<usize> = (0..na).collect();
        prop_assert!(partial_trace(&t, &keep).unwrap().approx_eq(&a, 1e-10));
        prop_assert!((t.purity() - a.purity() * b.purity()).abs() < 1e-10);
    }

    #[test]
    fn depolarized_states_stay_valid(seed: u64, p in 0.0f64..=1.0) {
        let rho = random_density(3, seed);
        let out = depolarize(&rho, p).unwrap();
        prop_assert!(out.validate().is_ok());
        let s = depolarize(&smolin_state(), p).unwrap();
        prop_assert!(s.validate().is_ok());
    }

    #[test]
    fn partial_transpose_preserves_trace_and_hermiticity(seed: u64, mask in 0usize..16) {
        let rho = random_density(4, seed);
        let sub: Vec<usize> = (0..4).filter(|q| mask >> q & 1 == 1).collect();
        let pt = partial_transpose(&rho, &sub).unwrap();
        prop_assert!(pt.is_hermitian(1e-12));
        prop_assert!((pt.trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn branch_probabilities_sum_to_one(seed: u64, q in 0usize..3, x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        prop_assume!(x * x + y * y + z * z > 1e-3);
        let rho = random_density(3, seed);
        let s = MeasurementSetting::from_vector([x, y, z]).unwrap();
        let [p, m] = qss_core::measurement::branch_probabilities(&rho, q, &s).unwrap();
        prop_assert!((p + m - 1.0).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&p));
    }
}
