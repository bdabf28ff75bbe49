// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::linalg::{self, max_abs, CMatrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// Independent construction: explicit Kronecker products of 2×2 matrices in the
// (σ^z = −1, σ^z = +1) ordering, site 1 leftmost.
fn pauli2(p: Pauli) -> CMatrix {
    match p {
        Pauli::X => CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        // σ^y = [[0,−i],[i,0]] in (↑,↓) becomes [[0,i],[−i,0]] in (↓,↑)
        Pauli::Y => CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 1.), c(0., -1.), c(0., 0.)]),
        Pauli::Z => CMatrix::from_row_slice(2, 2, &[c(-1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
    }
}

fn kron_string(n: usize, ops: &[(usize, Pauli)]) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for site in 0..n {
        let f = ops
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, p)| pauli2(*p))
            .unwrap_or_else(|| CMatrix::identity(2, 2));
        m = m.kronecker(&f);
    }
    m
}

fn kron_lr_xy(n: usize, j: f64, gamma: f64, alpha: f64, z: usize) -> CMatrix {
    let norm: f64 = (1..=z).map(|r| (r as f64).powf(-alpha)).sum();
    let d = 1 << n;
    let mut h = CMatrix::zeros(d, d);
    for i in 0..n {
        for k in i + 1..n {
            if k - i <= z {
                let coef = j / (norm * ((k - i) as f64).powf(alpha));
                h += kron_string(n, &[(i, Pauli::X), (k, Pauli::X)]).scale(coef);
                h += kron_string(n, &[(i, Pauli::Y), (k, Pauli::Y)]).scale(coef * gamma);
            }
        }
    }
    h
}

fn kron_battery(n: usize, h: f64) -> CMatrix {
    let d = 1 << n;
    let mut m = CMatrix::zeros(d, d);
    for i in 0..n {
        m += kron_string(n, &[(i, Pauli::Z)]).scale(h);
    }
    m
}

#[test]
fn kac_norm_examples() {
    assert_eq!(kac_norm(0.0, 4).unwrap(), 4.0);
    assert!((kac_norm(1.0, 3).unwrap() - 11.0 / 6.0).abs() < 1e-15);
    assert!((kac_norm(2.0, 2).unwrap() - 1.25).abs() < 1e-15);
    assert!(matches!(kac_norm(1.0, 0), Err(Error::Domain(_))));
}

#[test]
fn battery_spectra() {
    let hb = build_battery(2, 1.0, &Basis::full(2)).unwrap();
    assert_eq!(hb.spectrum(), vec![-2.0, 0.0, 0.0, 2.0]);
    let hb = build_battery(1, 0.5, &Basis::full(1)).unwrap();
    assert_eq!(hb.spectrum(), vec![-0.5, 0.5]);
    let hb = build_battery(4, 1.0, &Basis::dicke(4)).unwrap();
    let diag: Vec<f64> = hb.matrix().diagonal().iter().map(|z| z.re).collect();
    assert_eq!(diag, vec![-4.0, -2.0, 0.0, 2.0, 4.0]);
    // ground state is the all-zeros bit string
    let hb = build_battery(3, 1.0, &Basis::full(3)).unwrap();
    assert_eq!(hb.matrix()[(0, 0)].re, -3.0);
    assert!(max_abs(&(hb.matrix() - kron_battery(3, 1.0))) < 1e-15);
}

#[test]
fn battery_multiplicities() {
    let n = 5;
    let spec = build_battery(n, 0.3, &Basis::full(n)).unwrap().spectrum();
    for m in 0..=n {
        let e = 0.3 * (n as f64 - 2.0 * m as f64);
        let count = spec.iter().filter(|v| (*v - e).abs() < 1e-12).count();
        let binom = (0..m).fold(1usize, |acc, k| acc * (n - k) / (k + 1));
        assert_eq!(count, binom);
    }
}

#[test]
fn lr_xy_two_site_xx() {
    let spec = ModelSpec::lr_xy(2, 1.0, 1.0, 0.0, 0.0, 1);
    let h = build_lr_xy(&spec, 1.0, &Basis::full(2)).unwrap();
    let m = h.matrix();
    assert_eq!(m[(0b01, 0b10)].re, 1.0);
    assert_eq!(m[(0b00, 0b11)].re, 1.0);
    assert_eq!(m[(0b00, 0b01)].re, 0.0);
    assert!(max_abs(&(m - kron_lr_xy(2, 1.0, 0.0, 0.0, 1))) < 1e-15);
}

#[test]
fn lr_xy_alpha_zero_couplings_equal() {
    let spec = ModelSpec::lr_xy(3, 1.0, 1.0, 0.3, 0.0, 2);
    let h = build_lr_xy(&spec, 1.0, &Basis::full(3)).unwrap();
    let m = h.matrix();
    // XX on (1,2) and on (1,3) from |000⟩, amplitude (1 − γ)·J/𝒩 with 𝒩 = 2
    let expected = (1.0 - 0.3) / 2.0;
    assert!((m[(0b110, 0b000)].re - expected).abs() < 1e-15);
    assert!((m[(0b101, 0b000)].re - expected).abs() < 1e-15);
}

#[test]
fn lr_xy_commutator_against_hand_computation() {
    // H_int = XX − YY couples |00⟩ ↔ |11⟩ with amplitude 2; H_B = diag(−2,0,0,2);
    // [H_B, H_int] = 8(|11⟩⟨00| − |00⟩⟨11|) with spectral norm 8
    let spec = ModelSpec::lr_xy(2, 1.0, 1.0, -1.0, 0.0, 1);
    let basis = Basis::full(2);
    let hb = spec.battery(&basis).unwrap();
    let hi = spec.interaction(1.0, &basis).unwrap();
    let comm = hb.commutator(&hi).unwrap();
    assert_eq!(comm[(3, 0)].re, 8.0);
    assert_eq!(comm[(0, 3)].re, -8.0);
    assert!((hb.commutator_norm(&hi).unwrap() - 8.0).abs() < 1e-12);
    let brute = linalg::commutator(&kron_battery(2, 1.0), &kron_lr_xy(2, 1.0, -1.0, 0.0, 1));
    assert!(max_abs(&(comm - brute)) < 1e-14);
}

#[test]
fn lr_xy_rejects_large_coordination() {
    let spec = ModelSpec::lr_xy(4, 1.0, 1.0, 0.0, 1.0, 4);
    assert!(matches!(build_lr_xy(&spec, 1.0, &Basis::full(4)), Err(Error::Domain(_))));
    assert!(spec.validate().is_err());
}

#[test]
fn lmg_dicke_term_structure() {
    let spec = ModelSpec::lmg(2, 1.0, 1.0, 1.0);
    let h = build_lmg_dicke(&spec, 1.0).unwrap();
    assert!(h.is_diagonal());
    let spec = ModelSpec::lmg(4, 1.0, 1.0, -1.0);
    let h = build_lmg_dicke(&spec, 1.0).unwrap();
    let m = h.matrix();
    for i in 0..5usize {
        for k in 0..5usize {
            if i.abs_diff(k) != 2 {
                assert_eq!(m[(i, k)].norm(), 0.0, "({i},{k})");
            }
        }
    }
    assert!(m[(0, 2)].norm() > 0.0);
}

#[test]
fn lmg_dicke_spectrum_matches_full_space_symmetric_sector() {
    // The Dicke block is the permutation-symmetric part of the α = 0 chain.
    for &gamma in &[-1.0, -0.3, 0.5] {
        let n = 5;
        let spec = ModelSpec::lmg(n, 1.0, 1.7, gamma);
        let basis = Basis::full(n);
        let full = (&spec.battery(&basis).unwrap() + &spec.interaction(1.0, &basis).unwrap()).spectrum();
        let dicke = (&spec.battery(&Basis::dicke(n)).unwrap()
            + &spec.interaction(1.0, &Basis::dicke(n)).unwrap())
            .spectrum();
        for e in dicke {
            assert!(full.iter().any(|f| (f - e).abs() < 1e-10), "Dicke level {e} missing");
        }
    }
}

#[test]
fn nnn_reductions() {
    let basis = Basis::full(3);
    let spec = ModelSpec::nnn(3, 1.0, 1.0, 0.0, 0.0);
    let h = build_nnn(&spec, 1.0, &basis).unwrap();
    let expected = (kron_string(3, &[(0, Pauli::X), (1, Pauli::X)])
        + kron_string(3, &[(1, Pauli::X), (2, Pauli::X)]))
    .scale(0.5);
    assert!(max_abs(&(h.matrix() - expected)) < 1e-15);

    let spec = ModelSpec::nnn(3, 1.0, 0.0, 1.0, 0.0);
    let h = build_nnn(&spec, 1.0, &basis).unwrap();
    let expected = kron_string(3, &[(0, Pauli::X), (2, Pauli::X)]).scale(0.5);
    assert!(max_abs(&(h.matrix() - expected)) < 1e-15);
}

#[test]
fn nnn_without_j2_equals_nearest_neighbour_lr_xy() {
    for &alpha in &[0.0, 0.7, 3.0] {
        let nnn = ModelSpec::nnn(5, 0.4, 1.3, 0.0, -0.6);
        let lr = ModelSpec::lr_xy(5, 0.4, 1.3 / 2.0, -0.6, alpha, 1);
        let a = build_nnn(&nnn, 1.0, &Basis::full(5)).unwrap();
        let b = build_lr_xy(&lr, lr.j, &Basis::full(5)).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }
}

#[test]
fn nnn_spectrum_matches_kron_oracle() {
    let n = 4;
    let spec = ModelSpec::nnn(n, 0.5, 1.0, 0.5, -1.0);
    let h = build_nnn(&spec, 1.0, &Basis::full(n)).unwrap();
    let mut oracle = CMatrix::zeros(16, 16);
    for i in 0..n {
        for (r, amp) in [(1, 0.5), (2, 0.25)] {
            if i + r < n {
                oracle += kron_string(n, &[(i, Pauli::X), (i + r, Pauli::X)]).scale(amp);
                oracle -= kron_string(n, &[(i, Pauli::Y), (i + r, Pauli::Y)]).scale(amp);
            }
        }
    }
    let a = h.spectrum();
    let b = linalg::hermitian_eigen(&oracle).values;
    for (x, y) in a.iter().zip(b.iter()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn nnn_needs_three_sites() {
    let spec = ModelSpec::nnn(2, 1.0, 1.0, 0.5, 0.0);
    assert!(matches!(build_nnn(&spec, 1.0, &Basis::full(2)), Err(Error::Domain(_))));
}

#[test]
fn extended_xy_nearest_range_is_periodic_xx() {
    let mut spec = ModelSpec::extended_xy(4, 1.0, 1.0, 0.0, 2.0);
    spec.z = 1;
    let h = build_extended_xy(&spec, 1.0, &Basis::full(4)).unwrap();
    let mut oracle = CMatrix::zeros(16, 16);
    for j in 0..4 {
        oracle += kron_string(4, &[(j, Pauli::X), ((j + 1) % 4, Pauli::X)]).scale(0.25);
    }
    assert!(max_abs(&(h.matrix() - oracle)) < 1e-15);
}

#[test]
fn extended_xy_strings_match_kron_oracle() {
    let n = 6;
    let spec = ModelSpec::extended_xy(n, 1.0, 0.8, -0.4, 1.2);
    let h = build_extended_xy(&spec, spec.j, &Basis::full(n)).unwrap();
    let norm = kac_norm(1.2, 3).unwrap();
    let mut oracle = CMatrix::zeros(1 << n, 1 << n);
    for j in 0..n {
        for r in 1..=3usize {
            let coef = 0.8 / (4.0 * norm * (r as f64).powf(1.2));
            for (p, w) in [(Pauli::X, 1.0), (Pauli::Y, -0.4)] {
                let mut ops = vec![(j, p)];
                ops.extend((1..r).map(|l| ((j + l) % n, Pauli::Z)));
                ops.push(((j + r) % n, p));
                oracle += kron_string(n, &ops).scale(coef * w);
            }
        }
    }
    assert!(max_abs(&(h.matrix() - oracle)) < 1e-14);
}

#[test]
fn extended_xy_rejects_odd_ring() {
    let spec = ModelSpec::extended_xy(5, 1.0, 1.0, 0.0, 1.0);
    assert!(matches!(build_extended_xy(&spec, 1.0, &Basis::full(5)), Err(Error::Domain(_))));
}

#[test]
fn isotropic_models_conserve_magnetization() {
    let specs = [
        ModelSpec::lr_xy(5, 0.7, 1.3, 1.0, 0.6, 3),
        ModelSpec::lmg(5, 0.7, 1.3, 1.0),
        ModelSpec::nnn(5, 0.7, 1.3, 0.4, 1.0),
        ModelSpec::extended_xy(6, 0.7, 1.3, 1.0, 0.9),
    ];
    for spec in &specs {
        let basis = Basis::full(spec.sites);
        let hb = spec.battery(&basis).unwrap();
        let hi = spec.interaction(1.0, &basis).unwrap();
        assert!(max_abs(&hb.commutator(&hi).unwrap()) < 1e-12, "{:?}", spec.kind);
    }
    let spec = ModelSpec::lmg(6, 0.7, 1.3, 1.0);
    let hb = spec.battery(&Basis::dicke(6)).unwrap();
    let hi = spec.interaction(1.0, &Basis::dicke(6)).unwrap();
    assert!(max_abs(&hb.commutator(&hi).unwrap()) < 1e-12);
}

#[test]
fn sector_matrices_are_projections_of_full_matrices() {
    let specs = [
        ModelSpec::lr_xy(6, 0.7, 1.3, -0.4, 0.6, 4),
        ModelSpec::nnn(7, 0.7, 1.3, 0.4, -1.0),
        ModelSpec::extended_xy(6, 0.7, 1.3, -1.0, 0.9),
    ];
    for spec in &specs {
        let n = spec.sites;
        let sector = SectorBasis::new(n, true);
        let full = spec.interaction(1.0, &Basis::full(n)).unwrap();
        let reduced = spec.interaction(1.0, &Basis::polarized_sector(n)).unwrap();
        // isometry P with columns the sector basis vectors
        let mut p = CMatrix::zeros(1 << n, sector.dim());
        for i in 0..sector.dim() {
            for (s, a) in sector.components(i) {
                p[(s as usize, i)] = c(a, 0.0);
            }
        }
        let projected = p.adjoint() * full.matrix() * &p;
        assert!(max_abs(&(projected - reduced.matrix())) < 1e-13, "{:?}", spec.kind);
        // invariance: H P = P (P† H P)
        let image = full.matrix() * &p;
        assert!(max_abs(&(&image - &p * reduced.matrix())) < 1e-13);
    }
}

#[test]
fn normalize_spectrum_examples() {
    let b = Basis::KMode;
    let h = HermitianOperator::from_real_diagonal(b.clone(), &[0.0, 4.0]).unwrap();
    assert_eq!(normalize_spectrum(&h).unwrap().spectrum(), vec![-1.0, 1.0]);
    let hb = build_battery(3, 0.7, &Basis::full(3)).unwrap();
    let normed = normalize_spectrum(&hb).unwrap();
    assert!(max_abs(&(normed.matrix() - hb.matrix().scale(1.0 / (3.0 * 0.7)))) < 1e-14);
    let flat = HermitianOperator::from_real_diagonal(b, &[2.0, 2.0]).unwrap();
    assert!(matches!(normalize_spectrum(&flat), Err(Error::DegenerateSpectrum(_))));
}

#[test]
fn normalize_three_level() {
    let h = HermitianOperator::from_real_diagonal(Basis::dicke(2), &[1.0, 2.0, 5.0]).unwrap();
    let n = normalize_spectrum(&h).unwrap();
    let diag: Vec<f64> = n.matrix().diagonal().iter().map(|z| z.re).collect();
    assert_eq!(diag, vec![-1.0, -0.5, 1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lr_xy_matches_kron_oracle(
        n in 2usize..6,
        j in -3.0f64..3.0,
        gamma in -1.0f64..1.0,
        alpha in 0.0f64..3.0,
        zfrac in 0.0f64..1.0,
    ) {
        let z = 1 + ((n - 2) as f64 * zfrac).round() as usize;
        let spec = ModelSpec::lr_xy(n, 1.0, j, gamma, alpha, z);
        let h = build_lr_xy(&spec, j, &Basis::full(n)).unwrap();
        prop_assert!(linalg::hermiticity_defect(h.matrix()) < 1e-12);
        prop_assert!(max_abs(&(h.matrix() - kron_lr_xy(n, j, gamma, alpha, z))) < 1e-13);
    }

    #[test]
    fn kac_nearest_coupling_non_increasing_in_z(alpha in 0.0f64..4.0, z in 1usize..40) {
        let a = 1.0 / kac_norm(alpha, z).unwrap();
        let b = 1.0 / kac_norm(alpha, z + 1).unwrap();
        prop_assert!(b <= a);
    }
}
