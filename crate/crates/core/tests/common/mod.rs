//! Reference implementations used only by the integration tests. They share
//! no code with the library beyond the state containers.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use geophase::states::{BlochVector, MixedState, PureState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense `n × 2n` mode matrix of the cyclic network, written out entry by entry.
pub fn cyclic_matrix(phases: &[f64]) -> Vec<Vec<C>> {
    let n = phases.len();
    let mut u = vec![vec![C::new(0.0, 0.0); 2 * n]; n];
    for m in 0..n {
        let next = (m + 1) % n;
        let e = C::from_polar(1.0, phases[next]);
        u[m][2 * m] += C::new(0.5, 0.0);
        u[m][2 * m + 1] += C::new(0.0, 0.5);
        u[m][2 * next] += -e * 0.5;
        u[m][2 * next + 1] += e * C::new(0.0, 0.5);
    }
    u
}

/// Permanent by expansion over all permutations (Heap's algorithm).
pub fn permanent(a: &[Vec<C>]) -> C {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let term = |p: &[usize]| (0..n).fold(C::new(1.0, 0.0), |acc, k| acc * a[k][p[k]]);
    let mut total = term(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            total += term(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    total
}

/// Probability that photon `k` (pure internal state `psi[k]`) is found one
/// per port in the distinct ports `ports`, summing over all internal labels.
/// Each photon is a creation operator over (port, internal) modes; the
/// amplitude of a fully labelled outcome is a permanent.
pub fn permanent_probability(u: &[Vec<C>], psi: &[Vec<C>], ports: &[usize]) -> f64 {
    let n = psi.len();
    let dim = psi[0].len();
    let mut labels = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let a: Vec<Vec<C>> = (0..n)
            .map(|k| (0..n).map(|j| u[k][ports[j]] * psi[k][labels[j]]).collect())
            .collect();
        total += permanent(&a).norm_sqr();
        // next label tuple
        let mut pos = 0;
        loop {
            if pos == n {
                return total;
            }
            labels[pos] += 1;
            if labels[pos] < dim {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

/// Probability for mixed inputs as an average over the product ensemble
/// of eigenvector choices, each photon independently.
pub fn ensemble_probability(u: &[Vec<C>], rhos: &[MixedState], ports: &[usize]) -> f64 {
    let comps: Vec<Vec<(f64, Vec<C>)>> = rhos
        .iter()
        .map(|r| {
            r.eigen_decomposition()
                .into_iter()
                .map(|(l, v)| (l, v.amplitudes().to_vec()))
                .collect()
        })
        .collect();
    let n = rhos.len();
    let mut choice = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let weight: f64 = (0..n).map(|k| comps[k][choice[k]].0).product();
        let psi: Vec<Vec<C>> = (0..n).map(|k| comps[k][choice[k]].1.clone()).collect();
        total += weight * permanent_probability(u, &psi, ports);
        let mut pos = 0;
        loop {
            if pos == n {
                return total;
            }
            choice[pos] += 1;
            if choice[pos] < comps[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// `tr[ρ1 ρ2 ⋯ ρN]` by explicit index contraction.
pub fn trace_product(rhos: &[MixedState]) -> C {
    let dim = rhos[0].dim();
    let mut acc: Vec<Vec<C>> = (0..dim)
        .map(|i| (0..dim).map(|j| rhos[0].matrix()[(i, j)]).collect())
        .collect();
    for r in &rhos[1..] {
        let mut next = vec![vec![C::new(0.0, 0.0); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    next[i][j] += acc[i][k] * r.matrix()[(k, j)];
                }
            }
        }
        acc = next;
    }
    (0..dim).map(|i| acc[i][i]).sum()
}

/// Coincidence probability of outcome bits `o` from the closed form.
pub fn closed_form(v: C, phases: &[f64], o: &[u8]) -> f64 {
    let n = phases.len();
    let k: usize = o.iter().map(|&b| b as usize).sum();
    let phi: f64 = phases.iter().sum();
    let sign = if (n + k).is_multiple_of(2) { 1.0 } else { -1.0 };
    (1.0 + sign * (v * C::from_polar(1.0, -phi)).re) / 2f64.powi(2 * n as i32 - 1)
}

pub fn bits(n: usize, index: usize) -> Vec<u8> {
    (0..n).map(|s| ((index >> (n - 1 - s)) & 1) as u8).collect()
}

/// Ports hit by coincidence outcome `o`.
pub fn ports_of(o: &[u8]) -> Vec<usize> {
    o.iter().enumerate().map(|(s, &b)| 2 * s + b as usize).collect()
}

/// Interior angle at `b` of the geodesic triangle `a b c`.
fn vertex_angle(a: &BlochVector, b: &BlochVector, c: &BlochVector) -> f64 {
    let ta = a.sub(&b.scale(a.dot(b)));
    let tc = c.sub(&b.scale(c.dot(b)));
    (ta.dot(&tc) / (ta.norm() * tc.norm())).clamp(-1.0, 1.0).acos()
}

/// Solid angle of a geodesic triangle by Girard's theorem, signed so that
/// the octant `+z → +x → +y` is negative.
pub fn girard_solid_angle(a: &BlochVector, b: &BlochVector, c: &BlochVector) -> f64 {
    let excess = vertex_angle(c, a, b) + vertex_angle(a, b, c) + vertex_angle(b, c, a) - PI;
    -a.dot(&b.cross(c)).signum() * excess
}

pub fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Distance on the circle between two angles.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

pub fn random_pure(dim: usize, rng: &mut impl Rng) -> PureState {
    PureState::random(dim, rng).unwrap()
}

pub fn random_mixed(dim: usize, rng: &mut impl Rng) -> MixedState {
    MixedState::random(dim, rng).unwrap()
}

pub fn random_phases(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-PI..PI)).collect()
}
