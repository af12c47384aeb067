mod common;

use casimir::bem::{make_sphere_mesh, surface_energy_term};
use casimir::materials::{MaterialModel, MediumAssignment};
use casimir::waves::bessel::{bessel_i, bessel_k};
use casimir::waves::{
    green_series, modes, scattering_energy, scattering_energy_full, spherical_wave, tmatrix_from_surface,
    translation_matrix, translation_matrix_21, verify_pw_expansion, FieldType, PartialWaveIndex, Polarization,
    PointWaves, TMatrix, WaveKind,
};
use casimir::Error;
use common::{i_l, k_l, mie, rel};
use faer::c64;
use proptest::prelude::*;

fn dielectric(eps: f64) -> MediumAssignment {
    MediumAssignment::new(MaterialModel::Vacuum, vec![MaterialModel::constant(eps)]).unwrap()
}

#[test]
fn bessel_reference_values() {
    let (i, _) = bessel_i(0, 0.5).unwrap();
    assert!((i[0] - 1.042_190).abs() < 1e-6, "{}", i[0]);
    assert!(rel(i[0], 0.5f64.sinh() / 0.5) < 1e-15);
    let k = bessel_k(0, 1.0).unwrap();
    assert!((k[0] - 0.577_864).abs() < 1e-6);
    for l in 0..6 {
        for z in [0.3, 1.7, 4.0] {
            let (il, _) = i_l(l, z);
            let (kl, _) = k_l(l, z);
            let r = rel(bessel_i(l, z).unwrap().0[l], il);
            assert!(r < 1e-10, "i_{l}({z}): {r:e}");
            assert!(rel(bessel_k(l, z).unwrap()[l], kl) < 1e-12, "k_{l}({z})");
        }
    }
}

fn curl(f: impl Fn([f64; 3]) -> [c64; 3], x: [f64; 3]) -> [c64; 3] {
    let h = 1e-5;
    let d = |j: usize, i: usize| {
        let mut a = x;
        let mut b = x;
        a[j] += h;
        b[j] -= h;
        (f(a)[i] - f(b)[i]) / (2.0 * h)
    };
    [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)]
}

#[test]
fn n_and_m_waves_are_curls_of_each_other() {
    let kappa = 0.9;
    let i = c64::new(0.0, 1.0);
    let x = [0.4, -0.7, 0.5];
    for kind in [WaveKind::Regular, WaveKind::Outgoing] {
        for l in 1..=3 {
            for m in -(l as i64)..=l as i64 {
                let w = |p| move |y| spherical_wave(PartialWaveIndex { p, l, m }, kind, FieldType::E, y, kappa).unwrap();
                let n = w(Polarization::N)(x);
                let m_ = w(Polarization::M)(x);
                let cm = curl(w(Polarization::M), x);
                let cn = curl(w(Polarization::N), x);
                for c in 0..3 {
                    assert!((i / kappa * cm[c] - n[c]).norm() < 1e-7 * (1.0 + n[c].norm()), "{kind:?} {l} {m}");
                    assert!((i / kappa * cn[c] - m_[c]).norm() < 1e-7 * (1.0 + m_[c].norm()), "{kind:?} {l} {m}");
                }
                // H waves are −(1/κ) ∇× E waves
                let hw = spherical_wave(PartialWaveIndex { p: Polarization::M, l, m }, kind, FieldType::H, x, kappa).unwrap();
                for c in 0..3 {
                    assert!((hw[c] + cm[c] / kappa).norm() < 1e-7 * (1.0 + hw[c].norm()));
                }
            }
        }
    }
}

#[test]
fn outgoing_wave_at_origin_is_singular() {
    let idx = PartialWaveIndex::new(Polarization::M, 1, 0).unwrap();
    assert!(matches!(
        spherical_wave(idx, WaveKind::Outgoing, FieldType::E, [0.0; 3], 1.0),
        Err(Error::Singular(_))
    ));
    // regular N_1m is finite and non-zero there, all others vanish
    let n10 = spherical_wave(PartialWaveIndex::new(Polarization::N, 1, 0).unwrap(), WaveKind::Regular, FieldType::E, [0.0; 3], 1.0)
        .unwrap();
    assert!(n10[2].norm() > 0.1);
    let n20 = spherical_wave(PartialWaveIndex::new(Polarization::N, 2, 0).unwrap(), WaveKind::Regular, FieldType::E, [0.0; 3], 1.0)
        .unwrap();
    assert!(n20.iter().all(|v| v.norm() == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn m_waves_are_transverse(x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0, kappa in 0.1f64..3.0) {
        prop_assume!(x * x + y * y + z * z > 1e-2);
        let pos = [x, y, z];
        for kind in [WaveKind::Regular, WaveKind::Outgoing] {
            let pw = PointWaves::new(pos, kappa, kind, 4).unwrap();
            for l in 1..=4usize {
                for m in -(l as i64)..=l as i64 {
                    let w = pw.wave(Polarization::M, l, m);
                    let scale = w.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
                    let d = w[0] * x + w[1] * y + w[2] * z;
                    prop_assert!(d.norm() < 1e-13 * scale * (x * x + y * y + z * z).sqrt());
                }
            }
        }
    }
}

fn at(r: f64, dir: [f64; 3]) -> [f64; 3] {
    let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    [r * dir[0] / n, r * dir[1] / n, r * dir[2] / n]
}

#[test]
fn expansion_matches_green_function() {
    let x = at(0.5, [0.3, 0.2, 0.9]);
    let xp = at(1.5, [-0.6, 0.9, 0.4]);
    let res = verify_pw_expansion(x, xp, 1.0, 15).unwrap();
    assert!(res.max() < 1e-6, "{res:?}");
    assert!(res.imag < 1e-10);
    // truncation error of the exact series falls like l² (r</r>)^l = l² 3^{-l}
    let mut last = f64::INFINITY;
    for l in [10, 15, 20, 25] {
        let r = verify_pw_expansion(x, xp, 1.0, l).unwrap().max();
        assert!(r < last * 3f64.powi(-5) * 2.0, "l_max = {l}: {r} vs {last}");
        last = r;
    }
    assert!(last < 1e-10);
}

#[test]
fn swapped_points_give_the_transpose() {
    let x = at(0.5, [0.3, 0.2, 0.9]);
    let xp = at(1.5, [-0.6, 0.9, 0.4]);
    let a = green_series(x, xp, 0.8, 12).unwrap();
    let b = green_series(xp, x, 0.8, 12).unwrap();
    // G^{αβ}(x, x') = G^{βα}(x', x)ᵀ with the H index carrying its sign
    for (al, be) in [(0, 0), (1, 1)] {
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[al][be][i][j] - b[be][al][j][i]).norm() < 1e-12);
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            assert!((a[0][1][i][j] + b[1][0][j][i]).norm() < 1e-12);
        }
    }
}

fn sphere_t(refinement: usize, eps: f64, kappa: f64, l_max: usize) -> TMatrix {
    let s = make_sphere_mesh(1.0, refinement).unwrap();
    tmatrix_from_surface(&s, &dielectric(eps), kappa, l_max).unwrap()
}

#[test]
fn sphere_tmatrix_against_mie() {
    let t = sphere_t(2, 2.0, 1.0, 3);
    let mut max_diag = 0.0f64;
    for idx in modes(3) {
        max_diag = max_diag.max(t.get(&idx, &idx).norm());
    }
    for idx in modes(3) {
        let v = t.get(&idx, &idx);
        let want = mie(idx.l, 1.0, 2.0, 1.0, idx.p == Polarization::N);
        assert!(v.im.abs() < 1e-10 * max_diag);
        // dipoles are resolved well even on the coarse mesh
        if idx.l == 1 {
            assert!(rel(v.re, want) < 5e-3, "{idx:?}: {} vs {want}", v.re);
        }
        if idx.p == Polarization::N {
            assert!(rel(v.re, want) < 2e-2, "{idx:?}: {} vs {want}", v.re);
        }
        for jdx in modes(3) {
            if jdx != idx {
                assert!(t.get(&idx, &jdx).norm() < 1e-3 * max_diag, "{idx:?} {jdx:?}");
            }
        }
    }
    // m independence
    for l in 1..=3usize {
        for p in [Polarization::M, Polarization::N] {
            let a = t.get(&PartialWaveIndex { p, l, m: 0 }, &PartialWaveIndex { p, l, m: 0 }).re;
            for m in 1..=l as i64 {
                let b = t.get(&PartialWaveIndex { p, l, m }, &PartialWaveIndex { p, l, m }).re;
                assert!(rel(a, b) < 2e-2, "{p:?} {l} {m}");
            }
        }
    }
}

#[test]
fn vacuum_sphere_barely_scatters() {
    let t2 = sphere_t(1, 2.0, 1.0, 2);
    let t1 = sphere_t(1, 1.0, 1.0, 2);
    let big = (0..t2.data.nrows()).map(|i| t2.data[(i, i)].norm()).fold(0.0, f64::max);
    for i in 0..t1.data.nrows() {
        for j in 0..t1.data.ncols() {
            assert!(t1.data[(i, j)].norm() < 1e-2 * big);
        }
    }
}

fn field_sum(t: &casimir::waves::TranslationMatrix, row: usize, y: [f64; 3], kappa: f64, field: FieldType) -> [c64; 3] {
    let pw = PointWaves::new(y, kappa, WaveKind::Regular, t.l_max).unwrap();
    let mut acc = [c64::new(0.0, 0.0); 3];
    for (j, &(p, l)) in t.modes.iter().enumerate() {
        let w = pw.field_wave(field, p, l, t.m);
        for c in 0..3 {
            acc[c] += t.u[(row, j)] * w[c];
        }
    }
    acc
}

#[test]
fn translation_reconstructs_outgoing_waves() {
    let (d, kappa, l_max) = (4.0, 0.7, 22);
    for m in [0i64, 1, -2] {
        let u12 = translation_matrix(d, kappa, l_max, m).unwrap();
        assert!(u12.residual < 1e-6);
        for field in [FieldType::E, FieldType::H] {
            for (row, &(p, l)) in u12.modes.iter().enumerate().take(6) {
                // points near X₂ = d ẑ, field of a wave centred at the origin
                let pts = [[0.3, 0.1, -0.4], [-0.5, 0.2, 0.6], [0.0, 0.0, 0.7]];
                let want: Vec<_> = pts
                    .iter()
                    .map(|y| {
                        let x = [y[0], y[1], y[2] + d];
                        PointWaves::new(x, kappa, WaveKind::Outgoing, l_max).unwrap().field_wave(field, p, l, m)
                    })
                    .collect();
                // some waves vanish on the axis, so scale by the largest sample
                let norm = want.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
                for (y, want) in pts.iter().zip(&want) {
                    let got = field_sum(&u12, row, *y, kappa, field);
                    for c in 0..3 {
                        assert!((got[c] - want[c]).norm() < 1e-6 * norm, "{field:?} m={m} row={row} {y:?}");
                    }
                }
            }
        }
    }
}

/// With these phase conventions the M–N blocks pick up a sign:
/// U21 = S U12† S, S = diag(+1 on M, −1 on N).
#[test]
fn translation_matrices_are_adjoint() {
    for m in [0i64, 1, 3] {
        let u12 = translation_matrix(3.0, 1.2, 8, m).unwrap().u;
        let u21 = translation_matrix_21(3.0, 1.2, 8, m).unwrap().u;
        let scale = (0..u12.nrows()).flat_map(|i| (0..u12.ncols()).map(move |j| (i, j))).map(|(i, j)| u12[(i, j)].norm()).fold(0.0, f64::max);
        for i in 0..u12.nrows() {
            for j in 0..u12.ncols() {
                let s = if (i % 2) == (j % 2) { 1.0 } else { -1.0 };
                assert!((u21[(i, j)] - u12[(j, i)].conj() * s).norm() < 1e-8 * scale, "m={m} ({i},{j})");
            }
        }
    }
    assert!(translation_matrix(0.0, 1.0, 4, 0).is_err());
}

#[test]
fn zero_tmatrix_gives_zero_energy() {
    let t = sphere_t(1, 2.0, 1.0, 4);
    let mut z = t.clone();
    z.data.fill(c64::new(0.0, 0.0));
    assert_eq!(scattering_energy(&t, &z, 4.0, 1.0, 4).unwrap(), 0.0);
}

#[test]
fn scattering_energy_symmetries() {
    let a = sphere_t(1, 2.0, 1.0, 6);
    let b = sphere_t(1, 5.0, 1.0, 6);
    let e = scattering_energy(&a, &b, 3.5, 1.0, 6).unwrap();
    assert!(e < 0.0);
    let swapped = scattering_energy(&b, &a, 3.5, 1.0, 6).unwrap();
    assert!(rel(e, swapped) < 1e-12, "{e} {swapped}");
    let full = scattering_energy_full(&a, &b, 3.5, 1.0, 6).unwrap();
    assert!(rel(e, full) < 1e-12, "{e} {full}");
    assert!(matches!(scattering_energy(&a, &b, 1.5, 1.0, 6), Err(Error::Geometry(_))));
}

#[test]
fn scattering_agrees_with_boundary_elements() {
    let s = make_sphere_mesh(1.0, 2).unwrap();
    let m = dielectric(2.0);
    let t = tmatrix_from_surface(&s, &m, 1.0, 8).unwrap();
    let e_wave = scattering_energy(&t, &t, 4.0, 1.0, 8).unwrap();
    let e_bem = surface_energy_term(&[s.clone(), s.translated([0.0, 0.0, 4.0])], &m, 1.0).unwrap();
    assert!(rel(e_wave, e_bem) < 5e-3, "{e_wave} {e_bem}");
}
