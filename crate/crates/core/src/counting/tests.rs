use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::manybody::{digits, symmetrize_values};

const M: usize = 4;

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn normalize(v: &mut [C64], weight: f64) {
    let n = (v.iter().map(|x| x.norm_sqr()).sum::<f64>() * weight).sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
}

fn random_condensate(rng: &mut ChaCha8Rng) -> Condensate {
    let mut phi = random_vec(rng, M);
    normalize(&mut phi, 1.0);
    Condensate::new(phi, 1.0).unwrap()
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let raw = random_vec(rng, M.pow(n as u32));
    let mut s = symmetrize_values(&raw, n, M);
    normalize(&mut s, 1.0);
    s
}

/// A unit vector orthogonal to φ, obtained by Gram–Schmidt on `seed`.
fn orthogonal_to(cond: &Condensate, seed: &[C64], others: &[Vec<C64>]) -> Vec<C64> {
    let mut v = seed.to_vec();
    let mut basis: Vec<&[C64]> = vec![&cond.phi];
    basis.extend(others.iter().map(|o| o.as_slice()));
    for b in basis {
        let ov: C64 = b.iter().zip(&v).map(|(a, c)| a.conj() * c).sum();
        for (x, y) in v.iter_mut().zip(b) {
            *x -= y * ov;
        }
    }
    normalize(&mut v, 1.0);
    v
}

fn tensor_product(factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for f in factors {
        out = out.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
    }
    out
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn sectors_match_pattern_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        let cond = random_condensate(&mut rng);
        let raw = random_vec(&mut rng, M.pow(n as u32));
        let view = TensorView::new(n, M, 1.0, &raw).unwrap();
        let sectors = occupancy_sectors(&view, &cond).unwrap();
        let mut brute = vec![vec![C64::new(0.0, 0.0); raw.len()]; n + 1];
        for pattern in 0..(1usize << n) {
            let mut v = raw.clone();
            for i in 0..n {
                if pattern >> i & 1 == 1 {
                    apply_q(&mut v, n, &cond, i);
                } else {
                    apply_p(&mut v, n, &cond, i);
                }
            }
            let k = pattern.count_ones() as usize;
            for (a, b) in brute[k].iter_mut().zip(&v) {
                *a += b;
            }
        }
        for k in 0..=n {
            assert!(dist(&sectors[k], &brute[k]) < 1e-12, "N={n} k={k}");
        }
        let total: Vec<C64> = (0..raw.len()).map(|i| sectors.iter().map(|s| s[i]).sum()).collect();
        assert!(dist(&total, &raw) < 1e-12);
    }
}

#[test]
fn shortcut_distribution_agrees_on_symmetric_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 2..=4 {
        let cond = random_condensate(&mut rng);
        let psi = random_symmetric(&mut rng, n);
        let view = TensorView::new(n, M, 1.0, &psi).unwrap();
        let a = occupation_distribution(&view, &cond).unwrap();
        let b = occupation_distribution_symmetric(&view, &cond, 0.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(occupation_distribution_symmetric(&view, &cond, 1e-3).is_err());
    }
}

#[test]
fn alpha_routes_and_density_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 3;
    let cond = random_condensate(&mut rng);
    let psi = random_symmetric(&mut rng, n);
    let view = TensorView::new(n, M, 1.0, &psi).unwrap();
    let g = density_matrix(&view);
    let mut d = [0usize; 3];
    for r in 0..M {
        for s in 0..M {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..M {
                for b in 0..M {
                    acc += psi[(r * M + a) * M + b] * psi[(s * M + a) * M + b].conj();
                }
            }
            assert!((g.matrix[(r, s)] - acc).norm() < 1e-12);
        }
    }
    digits(5, 3, M, &mut d);
    assert_eq!(d, [0, 1, 1]);
    assert!((g.trace() - 1.0).abs() < 1e-12);
    assert!(g.eigenvalues().iter().all(|&e| e > -1e-12));
    let a1 = alpha(&view, &cond).unwrap();
    let a2 = 1.0 - g.expectation(&cond);
    assert!((a1 - a2).abs() < 1e-12);
    let (a3, b3) = alpha_beta_from_distribution(&occupation_distribution(&view, &cond).unwrap());
    assert!((a1 - a3).abs() < 1e-12);
    assert!(a3 <= b3);
}

#[test]
fn sharp_occupancy_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 1..=4 {
        let cond = random_condensate(&mut rng);
        for k in 0..=n {
            let mut excited = Vec::new();
            for _ in 0..k {
                let seed = random_vec(&mut rng, M);
                let v = orthogonal_to(&cond, &seed, &[]);
                excited.push(v);
            }
            let mut factors = vec![cond.phi.clone(); n - k];
            factors.extend(excited);
            let mut psi = symmetrize_values(&tensor_product(&factors), n, M);
            normalize(&mut psi, 1.0);
            let view = TensorView::new(n, M, 1.0, &psi).unwrap();
            let p = occupation_distribution(&view, &cond).unwrap();
            for (j, pj) in p.iter().enumerate() {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((pj - expect).abs() < 1e-10, "N={n} k={k} j={j}");
            }
            let x = k as f64 / n as f64;
            assert!((alpha(&view, &cond).unwrap() - x).abs() < 1e-10);
            assert!((beta(&view, &cond).unwrap() - x.sqrt()).abs() < 1e-10);
            let f = WeightFunction::custom((0..=n).map(|j| j as f64).collect());
            let out = hat_apply(&f, &view, &cond).unwrap();
            let scaled: Vec<C64> = psi.iter().map(|v| v * k as f64).collect();
            assert!(dist(&out, &scaled) < 1e-10);
        }
    }
}

#[test]
fn trace_distance_extremes() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let cond = random_condensate(&mut rng);
    let perp = orthogonal_to(&cond, &random_vec(&mut rng, M), &[]);
    let pure = tensor_product(&[cond.phi.clone(), cond.phi.clone()]);
    let g = density_matrix(&TensorView::new(2, M, 1.0, &pure).unwrap());
    assert!(trace_distance(&g, &cond).unwrap() < 1e-12);
    let other = tensor_product(&[perp.clone(), perp.clone()]);
    let g = density_matrix(&TensorView::new(2, M, 1.0, &other).unwrap());
    assert!((trace_distance(&g, &cond).unwrap() - 2.0).abs() < 1e-12);
    let mut mixed = symmetrize_values(&tensor_product(&[cond.phi.clone(), perp]), 2, M);
    normalize(&mut mixed, 1.0);
    let g = density_matrix(&TensorView::new(2, M, 1.0, &mixed).unwrap());
    let ev = g.eigenvalues();
    assert!((ev[0] - 0.5).abs() < 1e-12 && (ev[1] - 0.5).abs() < 1e-12 && ev[2].abs() < 1e-12);
}

#[test]
fn hat_algebra_and_shift_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let n = 4;
    let cond = random_condensate(&mut rng);
    let psi = random_symmetric(&mut rng, n);
    let view = TensorView::new(n, M, 1.0, &psi).unwrap();
    let f = WeightFunction::custom((0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let g = WeightFunction::custom((0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let gpsi = hat_apply(&g, &view, &cond).unwrap();
    let fg = hat_apply(&f, &TensorView::new(n, M, 1.0, &gpsi).unwrap(), &cond).unwrap();
    let direct = hat_apply(&f.product(&g), &view, &cond).unwrap();
    assert!(dist(&fg, &direct) < 1e-12);
    for j in 0..n {
        let mut pf = hat_apply(&f, &view, &cond).unwrap();
        apply_p(&mut pf, n, &cond, j);
        let mut p = psi.clone();
        apply_p(&mut p, n, &cond, j);
        let fp = hat_apply(&f, &TensorView::new(n, M, 1.0, &p).unwrap(), &cond).unwrap();
        assert!(dist(&pf, &fp) < 1e-12);
    }
    let mult = TwoBodyOperator::Multiplication(random_vec(&mut rng, M * M));
    let dense = TwoBodyOperator::Dense(random_vec(&mut rng, M.pow(4)));
    let patterns = [PairPattern::PP, PairPattern::PQ, PairPattern::QP, PairPattern::QQ];
    for t in [TwoBodyOperator::Identity, mult, dense] {
        for &l in &patterns {
            for &r in &patterns {
                let res = shift_identity_check(&f, l, r, &t, &view, &cond).unwrap();
                assert!(res < 1e-10, "{l:?} {r:?} residual {res}");
            }
        }
    }
}

#[test]
fn weight_difference_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 2..=5 {
        let cond = random_condensate(&mut rng);
        let psi = random_symmetric(&mut rng, n);
        let view = TensorView::new(n, M, 1.0, &psi).unwrap();
        for tag in [WeightTag::KOverN, WeightTag::SqrtKOverN] {
            for l in 1..=2 {
                let (lhs, rhs) = weight_difference_bound_check(tag, l, &view, &cond).unwrap();
                assert!(lhs <= rhs + 1e-10, "N={n} {tag:?} l={l}: {lhs} > {rhs}");
            }
        }
    }
    let cond = random_condensate(&mut rng);
    let pure = tensor_product(&vec![cond.phi.clone(); 3]);
    let view = TensorView::new(3, M, 1.0, &pure).unwrap();
    let (lhs, _) = weight_difference_bound_check(WeightTag::SqrtKOverN, 1, &view, &cond).unwrap();
    assert!(lhs < 1e-12);
}

#[test]
fn tagged_weights() {
    let n = 5;
    let w = WeightFunction::tagged(WeightTag::SqrtKOverN, n);
    for k in 0..=n {
        assert_eq!(w.values[k], (k as f64 / n as f64).sqrt());
    }
    let mu = WeightFunction::tagged(WeightTag::Mu, n);
    let direct: Vec<f64> = (0..=n)
        .map(|k| n as f64 * (w.values[k] - if k >= 1 { w.values[k - 1] } else { 0.0 }))
        .collect();
    for (a, b) in mu.values.iter().zip(&direct) {
        assert!((a - b).abs() < 1e-14);
    }
    let shifted = w.shift(2);
    assert_eq!(shifted.values[n], 0.0);
    assert_eq!(shifted.values[n - 2], 1.0);
    let extended = w.shift_extended(2);
    assert!((extended.values[n] - ((n + 2) as f64 / n as f64).sqrt()).abs() < 1e-15);
    let inv = w.inverse();
    assert_eq!(inv.values[0], 0.0);
}

#[test]
fn corrupted_condensate_is_rejected() {
    assert!(matches!(
        Condensate::new(vec![C64::new(1.1, 0.0), C64::new(0.0, 0.0)], 1.0),
        Err(Error::NotNormalized(_))
    ));
}
