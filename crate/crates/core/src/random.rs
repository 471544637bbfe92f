//! Seeded generators for randomized tests and audits: Ginibre matrices,
//! Haar unitaries, random CPTP maps, channels with a prescribed pure fixed
//! point, and the strategy/POVM samplers used by the no-go audits.
//!
//! Everything is driven by an explicit RNG so that a fixed seed reproduces
//! the exact same instances.

use crate::channels::{ChannelWithVacuum, QuantumChannel};
use crate::linops::{kron, CMat, Ket, C64, ONE, ZERO};
use crate::strategies::{DiscriminationStrategy, TwoValuedPOVM};
use rand::SeedableRng;
use rand::{Rng, RngExt};
use rand_chacha::ChaCha12Rng;

pub type SeededRng = ChaCha12Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (Box-Muller), variance 1 per complex entry.
pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    let phi = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * phi.cos(), r * phi.sin())
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-random unitary via QR of a Ginibre matrix with phase normalization.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = ginibre(dim, dim, rng);
    // Gram-Schmidt with two passes: numerically unitary to ~1e-15 at these sizes
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut w = g.column(j);
        for _ in 0..2 {
            for c in &cols {
                let ip: C64 = c.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for i in 0..dim {
                    w[i] -= ip * c[i];
                }
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut w {
            *z /= n;
        }
        cols.push(w);
    }
    CMat::from_columns(dim, &cols)
}

pub fn random_ket(dim: usize, rng: &mut impl Rng) -> Ket {
    let amps: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    Ket::from_vec(amps).normalized()
}

/// Random PSD matrix `G G^†` with unit-scale entries.
pub fn random_psd(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = ginibre(dim, dim, rng);
    g.mul(&g.adjoint()).scale(C64::new(1.0 / dim as f64, 0.0))
}

/// Random density matrix (PSD, trace one).
pub fn random_density(dim: usize, rng: &mut impl Rng) -> CMat {
    let p = random_psd(dim, rng);
    let t = p.trace().re;
    p.scale(C64::new(1.0 / t, 0.0))
}

/// Uniform (Ginibre-induced) CPTP map with the given Kraus rank.
pub fn random_cptp(dim: usize, rank: usize, rng: &mut impl Rng) -> QuantumChannel {
    // Ginibre Choi, then normalize the input marginal to the identity.
    let x = ginibre(dim * dim, rank, rng);
    let j = x.mul(&x.adjoint());
    // input marginal: trace over the output (first) factor
    let marg = crate::linops::partial_trace(&j, dim, dim, crate::linops::Keep::Second).unwrap();
    let (vals, vecs) = crate::linops::hermitian_eig(&marg);
    let mut inv_sqrt = CMat::zeros(dim, dim);
    for (k, &lam) in vals.iter().enumerate() {
        let col = vecs.column(k);
        let w = C64::new(1.0 / lam.max(1e-300).sqrt(), 0.0);
        for a in 0..dim {
            for b in 0..dim {
                inv_sqrt[(a, b)] += w * col[a] * col[b].conj();
            }
        }
    }
    let corr = kron(&CMat::identity(dim), &inv_sqrt);
    let j_norm = corr.mul(&j).mul(&corr.adjoint());
    crate::channels::choi_to_kraus(&j_norm, dim).expect("Ginibre Choi is CPTP by construction")
}

/// Random channel with vacuum: a Stinespring isometry is drawn subject to
/// `V v = e_0 ⊗ v`, so `|v><v|` is a fixed point and maps to a pure state.
pub fn random_pure_fixed_point_channel(
    dim: usize,
    env_dim: usize,
    vacuum: &Ket,
    rng: &mut impl Rng,
) -> ChannelWithVacuum {
    assert_eq!(vacuum.dim(), dim);
    let big = env_dim * dim;
    // column 0: e_0 (x) v ; remaining columns: random completion to an isometry
    let mut cols: Vec<Vec<C64>> = vec![Ket::basis(env_dim, 0).tensor(vacuum).amps().to_vec()];
    // an orthonormal basis of v-perp inside the system space
    let mut sys_basis = vec![vacuum.clone()];
    for _ in 1..dim {
        let mut w = random_ket(dim, rng).amps().to_vec();
        for _ in 0..2 {
            for c in &sys_basis {
                let ip: C64 = c.amps().iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, ci) in w.iter_mut().zip(c.amps()) {
                    *wi -= ip * ci;
                }
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        sys_basis.push(Ket::from_vec(w.into_iter().map(|z| z / n).collect()));
    }
    for _ in 1..dim {
        let mut w: Vec<C64> = (0..big).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let ip: C64 = c.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for i in 0..big {
                    w[i] -= ip * c[i];
                }
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(w.into_iter().map(|z| z / n).collect());
    }
    // columns are images of the sys_basis vectors; rotate to the standard basis
    let v_on_basis = CMat::from_columns(big, &cols);
    let basis_mat = CMat::from_columns(
        dim,
        &sys_basis
            .iter()
            .map(|k| k.amps().to_vec())
            .collect::<Vec<_>>(),
    );
    let v_iso = v_on_basis.mul(&basis_mat.adjoint());
    let kraus: Vec<CMat> = (0..env_dim)
        .map(|e| CMat::from_fn(dim, dim, |i, j| v_iso[(e * dim + i, j)]))
        .collect();
    let channel =
        QuantumChannel::new(dim, dim, kraus).expect("stacked isometry rows form a channel");
    ChannelWithVacuum::new(channel, vacuum.clone()).expect("vacuum is pure by construction")
}

/// Random channel with vacuum that is also mixing (eigenvalue 1 simple, all
/// other eigenvalues inside a disk of radius `max_gap_r`). Rejection-samples
/// the generator above.
pub fn random_mixing_channel(
    dim: usize,
    vacuum: &Ket,
    max_gap_r: f64,
    rng: &mut impl Rng,
) -> ChannelWithVacuum {
    loop {
        let cw = random_pure_fixed_point_channel(dim, dim, vacuum, rng);
        let diag = crate::kwiat::spectral_diagnostics(cw.channel()).expect("channel spectra");
        if diag.one_is_simple && diag.gap_r <= max_gap_r {
            return cw;
        }
    }
}

/// Amplitude-damping style channel: decay of every direction orthogonal to
/// `target` into `target` at rate `gamma`.
pub fn damping_to_pure(target: &Ket, gamma: f64) -> ChannelWithVacuum {
    let d = target.dim();
    let mut perp = Vec::new();
    let mut basis = vec![target.clone()];
    for _ in 1..d {
        let w = orthonormal_step(&basis);
        basis.push(w.clone());
        perp.push(w);
    }
    let mut k0 = target.projector();
    for p in &perp {
        k0 = k0.add(&p.projector().scale(C64::new((1.0 - gamma).sqrt(), 0.0)));
    }
    let mut kraus = vec![k0];
    for p in &perp {
        kraus.push(target.outer(p).scale(C64::new(gamma.sqrt(), 0.0)));
    }
    let t = QuantumChannel::new(d, d, kraus).expect("damping Kraus sum to identity");
    ChannelWithVacuum::new(t, target.clone()).expect("target is a pure fixed point")
}

fn orthonormal_step(have: &[Ket]) -> Ket {
    let d = have[0].dim();
    for cand in 0..d {
        let mut w: Vec<C64> = (0..d).map(|i| if i == cand { ONE } else { ZERO }).collect();
        for _ in 0..2 {
            for c in have {
                let ip: C64 = c.amps().iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, ci) in w.iter_mut().zip(c.amps()) {
                    *wi -= ip * ci;
                }
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            return Ket::from_vec(w.into_iter().map(|z| z / n).collect());
        }
    }
    unreachable!("orthonormal completion always exists below full rank")
}

/// Infeasible channel pair: both channels fix `|v><v|`, both maximal vacuum
/// subspaces collapse to span{v}, so the pair cannot be discriminated in an
/// interaction-free manner. Rejection-samples until the subspace condition
/// holds.
pub fn infeasible_pair(
    dim: usize,
    vacuum: &Ket,
    rng: &mut impl Rng,
) -> (ChannelWithVacuum, ChannelWithVacuum) {
    loop {
        let a = random_pure_fixed_point_channel(dim, dim, vacuum, rng);
        let b = random_pure_fixed_point_channel(dim, dim, vacuum, rng);
        let va = crate::channels::maximal_vacuum_subspace(&a);
        let vb = crate::channels::maximal_vacuum_subspace(&b);
        if va.dim() == 1 && vb.dim() == 1 {
            let dec = crate::channels::decide_discriminability(&a, &b).expect("same vacuum");
            if !dec.feasible {
                return (a, b);
            }
        }
    }
}

/// Random N-step strategy: Haar-random unitary steps interleaved with random
/// CPTP maps, acting on system (x) ancilla, with a random initial state.
pub fn random_strategy(
    sys_dim: usize,
    anc_dim: usize,
    steps: usize,
    rng: &mut impl Rng,
) -> DiscriminationStrategy {
    let full = sys_dim * anc_dim;
    let initial = random_density(full, rng);
    let mut lambdas = Vec::with_capacity(steps + 1);
    for n in 0..=steps {
        let lam = if n % 2 == 0 {
            QuantumChannel::unitary(&haar_unitary(full, rng)).expect("unitary channel")
        } else {
            random_cptp(full, full, rng)
        };
        lambdas.push(lam);
    }
    DiscriminationStrategy::new(sys_dim, anc_dim, initial, lambdas)
        .expect("sampled strategy is consistent")
}

/// Random two-valued POVM on a space of the given dimension.
pub fn random_povm(dim: usize, rng: &mut impl Rng) -> TwoValuedPOVM {
    let p = random_psd(dim, rng);
    let top = crate::linops::hermitian_eig(&p)
        .0
        .last()
        .copied()
        .unwrap_or(1.0);
    let scale: f64 = rng.random::<f64>();
    let pi_a = p.scale(C64::new(scale / top.max(1e-12), 0.0));
    let pi_b = CMat::identity(dim).sub(&pi_a);
    TwoValuedPOVM::new(pi_a, pi_b).expect("scaled PSD pair is a POVM")
}
