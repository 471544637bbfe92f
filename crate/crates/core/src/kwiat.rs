//! The Zeno-style probing protocol: a single-wire strategy that conjugates by
//! `exp(-i H / N)` between channel uses, measured with `{P^⊥, |v><v|}` and
//! repeated `K` times. Also: spectral diagnostics of a channel (gap,
//! simplicity of the eigenvalue 1, mixing), the resolvent-based bound
//! constant, decay-rate fits, the qubit asymptotic formula, and a numerical
//! contour-integral check of the Riesz projection power identity.

use crate::channels::{
    interaction_functional, ChannelWithVacuum, QuantumChannel, SuperoperatorMatrix,
};
use crate::error::{Error, Result};
use crate::linops::{expm_scaled, inverse, kron, CMat, Ket, C64, ONE};
use crate::strategies::DiscriminationStrategy;

/// Eigenvalues within this distance of 1 count as the eigenvalue-1 cluster.
pub const EIG_ONE_CLUSTER_TOL: f64 = 1e-7;
/// Number of grid points used to verify the spectrum condition on `[0, tau]`.
const T_GRID_SAMPLES: usize = 64;

/// Configuration of the probing protocol `D_{H,N,K}`.
#[derive(Clone, Debug)]
pub struct KwiatConfig {
    hamiltonian: CMat,
    steps_n: usize,
    repeats_k: usize,
    vacuum: Ket,
}

impl KwiatConfig {
    pub fn new(hamiltonian: CMat, steps_n: usize, repeats_k: usize, vacuum: Ket) -> Result<Self> {
        if steps_n == 0 || repeats_k == 0 {
            return Err(Error::MalformedStrategy("need N >= 1 and K >= 1".into()));
        }
        let resid = hamiltonian.hermiticity_residual();
        if resid > 1e-10 {
            return Err(Error::NotSelfAdjoint(resid));
        }
        if hamiltonian.rows() != vacuum.dim() {
            return Err(Error::DimensionMismatch(
                "hamiltonian and vacuum dimensions differ".into(),
            ));
        }
        let n = vacuum.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitVector(n));
        }
        let cfg = KwiatConfig {
            hamiltonian,
            steps_n,
            repeats_k,
            vacuum,
        };
        let c = cfg.c_h();
        if c >= 1.0 - 1e-12 {
            return Err(Error::NoRepetitionGain(c));
        }
        Ok(cfg)
    }

    /// The canonical choice: `H = (pi/2) sigma_y` on the plane spanned by the
    /// vacuum and its first orthogonal completion, zero elsewhere. Satisfies
    /// `<v|exp(-iH)v> = 0`, so a single repetition already suffices.
    pub fn half_pi_y(dim: usize, steps_n: usize, repeats_k: usize) -> Result<Self> {
        let vacuum = Ket::basis(dim, 0);
        let h = hamiltonian_half_pi_y(&vacuum);
        KwiatConfig::new(h, steps_n, repeats_k, vacuum)
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.hamiltonian
    }

    pub fn steps_n(&self) -> usize {
        self.steps_n
    }

    pub fn repeats_k(&self) -> usize {
        self.repeats_k
    }

    pub fn vacuum(&self) -> &Ket {
        &self.vacuum
    }

    /// `C_H = |<v| exp(-iH) |v>|`.
    pub fn c_h(&self) -> f64 {
        let u = expm_scaled(&self.hamiltonian, -crate::linops::I);
        let w = u.mul_vec(self.vacuum.amps());
        self.vacuum
            .amps()
            .iter()
            .zip(&w)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm()
    }
}

/// `(pi/2) sigma_y` acting on `span{v, p}` with `p` the deterministic
/// orthogonal completion of `v`, zero on the rest of the space.
pub fn hamiltonian_half_pi_y(vacuum: &Ket) -> CMat {
    let p = crate::linops::orthogonal_completion_vector(vacuum);
    let vp = vacuum.outer(&p);
    let pv = p.outer(vacuum);
    vp.scale(-crate::linops::I)
        .add(&pv.scale(crate::linops::I))
        .scale(C64::new(std::f64::consts::FRAC_PI_2, 0.0))
}

/// The bare N-step probing strategy for an arbitrary self-adjoint generator:
/// `Λ_i = exp(-iH/N) · exp(iH/N)` for `i < N`, `Λ_N = id`, no ancilla, and
/// the vacuum as initial state. No constraint on `<v|exp(-iH)v>` here; the
/// repetition analysis of [`simulate_kwiat`] is what needs it.
pub fn zeno_probe_strategy(h: &CMat, steps: usize, vacuum: &Ket) -> DiscriminationStrategy {
    let d = h.rows();
    let u = expm_scaled(h, -crate::linops::I * C64::new(1.0 / steps as f64, 0.0));
    let step = QuantumChannel::unitary(&u).expect("spectral exponential is unitary");
    let mut lambdas = vec![step; steps];
    lambdas.push(QuantumChannel::identity(d));
    DiscriminationStrategy::new(d, 1, vacuum.projector(), lambdas)
        .expect("probing strategy is consistent")
}

/// Strategy realizing one run of `D_{H,N,K}`.
pub fn build_kwiat_strategy(cfg: &KwiatConfig) -> DiscriminationStrategy {
    zeno_probe_strategy(&cfg.hamiltonian, cfg.steps_n, &cfg.vacuum)
}

/// Outcome of simulating `D_{H,N,K}` against a probe channel.
#[derive(Clone, Debug)]
pub struct KwiatOutcome {
    /// Exact error probability of the K-fold repetition with the
    /// `{P^⊥, |v><v|}` measurement ("decide the alternative only when all K
    /// outcomes land on the vacuum").
    pub p_error: f64,
    /// Interaction probability of the K-fold protocol, present when the
    /// probe carries the configured vacuum.
    pub p_interaction: Option<f64>,
    /// Total transmission of the K-fold protocol under the probe's own
    /// interaction functional, present under the same condition.
    pub transmission: Option<f64>,
}

/// Simulates the protocol exactly: the final state is obtained by running
/// the strategy, the K-fold repetition is folded in analytically
/// (independent runs restart from the vacuum), and the 1-vs-K scaling
/// `T(D_{H,N,K}) = K T(D_{H,N,1})` is applied to the transmission.
pub fn simulate_kwiat(cfg: &KwiatConfig, t: &QuantumChannel) -> Result<KwiatOutcome> {
    if !t.is_square() || t.dim_in() != cfg.vacuum.dim() {
        return Err(Error::DimensionMismatch(format!(
            "probe channel dimension {} does not match the protocol dimension {}",
            t.dim_in(),
            cfg.vacuum.dim()
        )));
    }
    if !t.is_trace_preserving() {
        return Err(Error::ChannelRequired);
    }
    let k = cfg.repeats_k as i32;
    let strategy = build_kwiat_strategy(cfg);
    let rho_n = strategy.final_state(t)?;
    let vacuum_weight = cfg.vacuum.projector().hs_inner(&rho_n).re.clamp(0.0, 1.0);
    let miss = 1.0 - vacuum_weight;
    let c_h = cfg.c_h();
    let p_error = 0.5 * (c_h.powi(2 * k) + (1.0 - (1.0 - miss).powi(k)));

    let (p_interaction, transmission) = match ChannelWithVacuum::new(t.clone(), cfg.vacuum.clone())
    {
        Ok(cw) => {
            let p1 = strategy.interaction_probability(&cw)?;
            let p_k = 1.0 - (1.0 - p1).powi(k);
            let tf = interaction_functional(&cw);
            let tt = strategy.total_transmission(cw.channel(), &tf)? * cfg.repeats_k as f64;
            (Some(p_k), Some(tt))
        }
        Err(_) => (None, None),
    };
    Ok(KwiatOutcome {
        p_error,
        p_interaction,
        transmission,
    })
}

/// `tr(P^⊥ (T ∘ U_{1/N})^N |v><v|)`: the probability of the detection event
/// when probing `t` for `n` steps.
pub fn probe_miss_probability(t: &QuantumChannel, h: &CMat, vacuum: &Ket, n: usize) -> f64 {
    let u = expm_scaled(h, -crate::linops::I * C64::new(1.0 / n as f64, 0.0));
    let u_chan = QuantumChannel::unitary(&u).expect("unitary");
    let mut rho = vacuum.projector();
    for _ in 0..n {
        rho = t.apply(&u_chan.apply(&rho));
    }
    (1.0 - vacuum.projector().hs_inner(&rho).re).max(0.0)
}

/// `tr(P^⊥ Σ_{k<N} (U_{1/N} ∘ T)^k |v><v|)`: the cumulative weight outside
/// the vacuum over all channel-use inputs.
pub fn influence_sum(t: &QuantumChannel, h: &CMat, vacuum: &Ket, n: usize) -> f64 {
    let u = expm_scaled(h, -crate::linops::I * C64::new(1.0 / n as f64, 0.0));
    let u_chan = QuantumChannel::unitary(&u).expect("unitary");
    let p_v = vacuum.projector();
    let mut rho = vacuum.projector();
    let mut sum = 0.0;
    for _ in 0..n {
        sum += (rho.trace().re - p_v.hs_inner(&rho).re).max(0.0);
        rho = u_chan.apply(&t.apply(&rho));
    }
    sum
}

/// Spectral data of a channel's superoperator.
#[derive(Clone, Debug)]
pub struct SpectralDiagnostics {
    pub eigenvalues: Vec<C64>,
    /// Largest modulus over eigenvalues outside the 1-cluster; 1 when every
    /// eigenvalue belongs to the cluster (no gap).
    pub gap_r: f64,
    pub one_is_simple: bool,
    pub mixing: bool,
}

/// Eigenvalues, spectral gap, simplicity of the eigenvalue 1, and the mixing
/// flag (simple eigenvalue 1 and strictly subunit remainder).
pub fn spectral_diagnostics(t: &QuantumChannel) -> Result<SpectralDiagnostics> {
    let eigenvalues = crate::linops::complex_eigenvalues(t.superoperator())?;
    let cluster = eigenvalues
        .iter()
        .filter(|z| (*z - ONE).norm() <= EIG_ONE_CLUSTER_TOL)
        .count();
    let gap_r = eigenvalues
        .iter()
        .filter(|z| (*z - ONE).norm() > EIG_ONE_CLUSTER_TOL)
        .map(|z| z.norm())
        .fold(f64::NAN, f64::max);
    let gap_r = if gap_r.is_nan() { 1.0 } else { gap_r };
    let one_is_simple = cluster == 1;
    let mixing = one_is_simple && gap_r < 1.0 - 1e-8;
    Ok(SpectralDiagnostics {
        eigenvalues,
        gap_r,
        one_is_simple,
        mixing,
    })
}

/// Superoperator-norm surrogate used for the resolvent bound: the operator
/// norm on trace-class inputs is bounded by `sqrt(d)` times the spectral
/// norm of the superoperator matrix.
fn resolvent_norm_bound(m: &CMat, dim: usize) -> f64 {
    (dim as f64).sqrt() * m.op_norm()
}

fn resolvent_at(superop: &CMat, z: C64) -> Result<CMat> {
    let n = superop.rows();
    let shifted = CMat::identity(n).scale(z).sub(superop);
    inverse(&shifted)
}

/// The bound constant
/// `C = max(tau^{-2}, 18 delta^{-1} ||H||^2 max ||(z-T)^{-1}|| ||(z-U_t T)^{-1}||)`
/// with the maximum sampled over `contour_samples` points on each of the two
/// contour circles and a 64-point grid in `t ∈ [0, tau]`.
///
/// The spectrum condition `σ(U_t T) ⊆ D_{1-delta}(0) ∪ {1}` is verified on
/// the same finite `t`-grid (a grid check, not an interval certification).
/// Resolvent norms are the `sqrt(d)`-scaled spectral norms of the
/// superoperator resolvents; the sampled maximum is a lower bound on the
/// true maximum over the contour.
pub fn resolvent_bound_constant(
    t: &QuantumChannel,
    h: &CMat,
    tau: f64,
    delta: f64,
    contour_samples: usize,
) -> Result<f64> {
    if !(0.0 < delta && delta < 1.0) || tau <= 0.0 {
        return Err(Error::Unsupported("need 0 < delta < 1 and tau > 0".into()));
    }
    let resid = h.hermiticity_residual();
    if resid > 1e-10 {
        return Err(Error::NotSelfAdjoint(resid));
    }
    let d = t.dim_in();
    let s_t = t.superoperator().clone();

    // spectrum condition on the t-grid, collecting the composed superoperators
    let mut composed = Vec::with_capacity(T_GRID_SAMPLES);
    for j in 0..T_GRID_SAMPLES {
        let tj = tau * j as f64 / (T_GRID_SAMPLES - 1) as f64;
        let u = expm_scaled(h, -crate::linops::I * C64::new(tj, 0.0));
        let s_ut = kron(&u, &u.conj()).mul(&s_t);
        for lam in crate::linops::complex_eigenvalues(&s_ut)? {
            let inside_disk = lam.norm() <= 1.0 - delta + 1e-9;
            let at_one = (lam - ONE).norm() <= EIG_ONE_CLUSTER_TOL;
            if !inside_disk && !at_one {
                return Err(Error::SpectrumConditionViolated {
                    t: tj,
                    re: lam.re,
                    im: lam.im,
                });
            }
        }
        composed.push(s_ut);
    }

    // Γ: the circle |z| = 1 - δ/2 and the circle |z - 1| = δ/2
    let mut contour = Vec::with_capacity(2 * contour_samples);
    for j in 0..contour_samples {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / contour_samples as f64;
        let (c, s) = (phi.cos(), phi.sin());
        let outer_r = 1.0 - delta / 2.0;
        contour.push(C64::new(outer_r * c, outer_r * s));
        contour.push(C64::new(1.0 + delta / 2.0 * c, delta / 2.0 * s));
    }

    let mut worst = 0.0_f64;
    for z in &contour {
        let r_t = resolvent_norm_bound(&resolvent_at(&s_t, *z)?, d);
        let mut r_ut_max = 0.0_f64;
        for s_ut in &composed {
            r_ut_max = r_ut_max.max(resolvent_norm_bound(&resolvent_at(s_ut, *z)?, d));
        }
        worst = worst.max(r_t * r_ut_max);
    }
    let h_norm = h.op_norm();
    Ok((tau.powi(-2)).max(18.0 / delta * h_norm * h_norm * worst))
}

/// Least-squares fit of `log y` against `log n`.
#[derive(Clone, Copy, Debug)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
}

pub fn decay_rate_fit(values: &[(usize, f64)]) -> Result<FitLine> {
    if values.len() < 3 {
        return Err(Error::TooFewFitPoints(values.len()));
    }
    if values.iter().any(|&(n, y)| n == 0 || y <= 0.0) {
        return Err(Error::NonPositiveFitValue);
    }
    let pts: Vec<(f64, f64)> = values
        .iter()
        .map(|&(n, y)| ((n as f64).ln(), y.ln()))
        .collect();
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    Ok(FitLine { slope, intercept })
}

/// Closed-form qubit limit of `N^2 tr(P^⊥ (T∘U_{1/N})^N |v><v|)` and of
/// `N tr(P^⊥ Σ_{k<N} (U_{1/N}∘T)^k |v><v|)` for `H = (pi/2) sigma_y`:
/// `(pi^2/4) (1-|tau_0|^2) / ((1-tau) |1-tau_0|^2)` with
/// `tau = tr(P^⊥ T(P^⊥))` and `tau_0 = tr(|p><v| T(|v><p|))`.
pub fn qubit_asymptotic(t: &QuantumChannel, vacuum: &Ket) -> Result<f64> {
    if t.dim_in() != 2 || !t.is_square() {
        return Err(Error::DimensionMismatch(
            "qubit asymptotics need a qubit channel".into(),
        ));
    }
    let fixed_resid = t
        .apply(&vacuum.projector())
        .sub(&vacuum.projector())
        .max_abs();
    if fixed_resid > 1e-9 {
        return Err(Error::DegenerateAsymptotics(format!(
            "the vacuum state is not a fixed point (residual {:.3e})",
            fixed_resid
        )));
    }
    let diag = spectral_diagnostics(t)?;
    if !diag.one_is_simple {
        return Err(Error::DegenerateAsymptotics(
            "the vacuum is not the unique fixed state (eigenvalue 1 is degenerate)".into(),
        ));
    }
    let p = crate::linops::orthogonal_completion_vector(vacuum);
    let p_perp = p.projector();
    let tau = p_perp.hs_inner(&t.apply(&p_perp)).re;
    // tr(|p><v| X) = <v| X |p>
    let x = t.apply(&vacuum.outer(&p));
    let x_p = x.mul_vec(p.amps());
    let tau0: C64 = vacuum
        .amps()
        .iter()
        .zip(&x_p)
        .map(|(a, b)| a.conj() * b)
        .sum();
    if tau >= 1.0 - 1e-12 {
        return Err(Error::DegenerateAsymptotics("tau = 1".into()));
    }
    let one_minus = (ONE - tau0).norm_sqr();
    if one_minus < 1e-24 {
        return Err(Error::DegenerateAsymptotics("tau_0 = 1".into()));
    }
    Ok(std::f64::consts::PI.powi(2) / 4.0 * (1.0 - tau0.norm_sqr()) / ((1.0 - tau) * one_minus))
}

/// Numerically integrates `∮ z^n (z-T)^{-1} dz` and `∮ (z-T)^{-1} dz` on a
/// circle around 1 (trapezoid rule on the superoperator resolvent) and
/// returns the max-norm deviation between the two Riesz-type integrals.
/// Requires the eigenvalue 1 to be isolated with margin at least `1e-4`.
pub fn riesz_power_check(t: &QuantumChannel, n: usize, contour_samples: usize) -> Result<f64> {
    let s = t.superoperator().clone();
    let eigs = crate::linops::complex_eigenvalues(&s)?;
    let margin = eigs
        .iter()
        .filter(|z| (*z - ONE).norm() > EIG_ONE_CLUSTER_TOL)
        .map(|z| (*z - ONE).norm())
        .fold(f64::INFINITY, f64::min);
    if margin < 1e-4 {
        return Err(Error::EigenvalueOneNotIsolated(margin));
    }
    let radius = (margin / 2.0).min(0.45);
    let dim2 = s.rows();
    let mut int_n = CMat::zeros(dim2, dim2);
    let mut int_0 = CMat::zeros(dim2, dim2);
    for j in 0..contour_samples {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / contour_samples as f64;
        let z = C64::new(1.0 + radius * phi.cos(), radius * phi.sin());
        let res = resolvent_at(&s, z)?;
        // (1/2πi) f(z) dz with dz = i r e^{iφ} dφ: weight r e^{iφ} / samples
        let w = C64::new(radius * phi.cos(), radius * phi.sin())
            * C64::new(1.0 / contour_samples as f64, 0.0);
        int_n = int_n.add(&res.scale(w * z.powu(n as u32)));
        int_0 = int_0.add(&res.scale(w));
    }
    Ok(int_n.sub(&int_0).max_abs())
}

/// Closed-form deficit `N - λ`, `λ = (1 - cos^N(2θ)) / (2 sin^2 θ)` with
/// `θ = π/(2N)`, for the projective two-outcome counterexample channel; the
/// deficit converges to `π²/4` while the influence sum itself does not decay.
pub fn pinching_influence_deficit(n: usize) -> f64 {
    let theta = std::f64::consts::FRAC_PI_2 / n as f64;
    let lambda = (1.0 - (2.0 * theta).cos().powi(n as i32)) / (2.0 * theta.sin().powi(2));
    n as f64 - lambda
}

/// The two-outcome projective (pinching) channel in the `{v, p}` basis: the
/// canonical example with a degenerate fixed-point space, for which the
/// probing protocol cannot work without reduction.
pub fn pinching_channel(dim: usize) -> QuantumChannel {
    assert_eq!(dim, 2, "the counterexample lives on a qubit");
    let v = Ket::basis(2, 0);
    let p = Ket::basis(2, 1);
    QuantumChannel::pinching(&[v, p]).expect("computational basis is orthonormal")
}

/// Superoperator view of the step map `U_{1/N} ∘ T`, used by callers that
/// inspect spectra of the composed step.
pub fn step_superoperator(t: &QuantumChannel, h: &CMat, n: usize) -> SuperoperatorMatrix {
    let u = expm_scaled(h, -crate::linops::I * C64::new(1.0 / n as f64, 0.0));
    let s = kron(&u, &u.conj()).mul(t.superoperator());
    SuperoperatorMatrix {
        dim_in: t.dim_in(),
        dim_out: t.dim_out(),
        mat: s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelWithVacuum;
    use crate::random;

    fn bomb() -> ChannelWithVacuum {
        let v = Ket::basis(2, 0);
        ChannelWithVacuum::new(QuantumChannel::reset_to_pure(&v).unwrap(), v).unwrap()
    }

    #[test]
    fn zero_hamiltonian_gives_identity_steps() {
        let h = CMat::zeros(2, 2);
        let d = zeno_probe_strategy(&h, 3, &Ket::basis(2, 0));
        for lam in d.lambdas().iter().take(3) {
            assert!(lam.choi_distance(&QuantumChannel::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn half_pi_y_step_rotates_by_expected_angle() {
        let n = 5;
        let cfg = KwiatConfig::half_pi_y(2, n, 1).unwrap();
        let d = build_kwiat_strategy(&cfg);
        let u_expected = expm_scaled(
            &hamiltonian_half_pi_y(cfg.vacuum()),
            -crate::linops::I * C64::new(1.0 / n as f64, 0.0),
        );
        let got = d.lambdas()[0].kraus()[0].clone();
        // same unitary up to global phase
        let phase = got[(0, 0)] / u_expected[(0, 0)];
        assert!(got.sub(&u_expected.scale(phase)).max_abs() < 1e-12);
        // the rotation angle per step is pi/(2N)
        let v = Ket::basis(2, 0);
        let rotated = u_expected.mul_vec(v.amps());
        let angle = (std::f64::consts::FRAC_PI_2 / n as f64).cos();
        assert!((rotated[0].norm() - angle).abs() < 1e-12);
    }

    #[test]
    fn config_rejects_no_gain_hamiltonian() {
        // H = 0 leaves the vacuum invariant: C_H = 1, rejected
        assert!(matches!(
            KwiatConfig::new(CMat::zeros(2, 2), 4, 2, Ket::basis(2, 0)),
            Err(Error::NoRepetitionGain(_))
        ));
    }

    #[test]
    fn single_step_strategy_shape() {
        let cfg = KwiatConfig::half_pi_y(2, 1, 1).unwrap();
        let d = build_kwiat_strategy(&cfg);
        assert_eq!(d.steps(), 1);
        assert_eq!(d.anc_dim(), 1);
    }

    #[test]
    fn simulate_identity_probe() {
        // probing the identity against the identity reference is a coin flip:
        // the exact expression gives (1/2)(C_H^{2K} + 1 - C_H^{2K}) = 1/2
        let h = hamiltonian_half_pi_y(&Ket::basis(2, 0)).scale(C64::new(0.6, 0.0));
        let cfg = KwiatConfig::new(h, 8, 3, Ket::basis(2, 0)).unwrap();
        let out = simulate_kwiat(&cfg, &QuantumChannel::identity(2)).unwrap();
        assert!((out.p_error - 0.5).abs() < 1e-12);
        assert!(out.p_interaction.unwrap().abs() < 1e-10);
        assert!(out.transmission.unwrap().abs() < 1e-10);
    }

    #[test]
    fn simulate_bomb_closed_form() {
        // the absorbing channel returns everything to the vacuum, so its
        // detection branch never errs; with C_H = 0 the discrimination is
        // exact while the interaction probability follows the Zeno product
        for n in [1usize, 7, 40] {
            let cfg = KwiatConfig::half_pi_y(2, n, 1).unwrap();
            let out = simulate_kwiat(&cfg, bomb().channel()).unwrap();
            let theta = std::f64::consts::FRAC_PI_2 / n as f64;
            let survive = theta.cos().powi(2 * n as i32);
            assert!(out.p_error < 1e-12);
            assert!((out.p_interaction.unwrap() - (1.0 - survive)).abs() < 1e-10);
        }
    }

    #[test]
    fn simulate_error_below_union_bound_estimate() {
        // exact P_e <= (1/2)(C_H^{2K} + K tr(P^⊥ rho_N))
        let mut rng = random::seeded_rng(97);
        let h = hamiltonian_half_pi_y(&Ket::basis(2, 0)).scale(C64::new(0.7, 0.0));
        for k in [1usize, 2, 5] {
            let cfg = KwiatConfig::new(h.clone(), 6, k, Ket::basis(2, 0)).unwrap();
            let t = random::random_cptp(2, 3, &mut rng);
            let out = simulate_kwiat(&cfg, &t).unwrap();
            let strategy = build_kwiat_strategy(&cfg);
            let rho_n = strategy.final_state(&t).unwrap();
            let miss = 1.0 - cfg.vacuum().projector().hs_inner(&rho_n).re;
            let estimate = 0.5 * (cfg.c_h().powi(2 * k as i32) + k as f64 * miss);
            assert!(out.p_error <= estimate + 1e-12);
        }
    }

    #[test]
    fn simulate_single_step_bomb_brute_force() {
        let cfg = KwiatConfig::half_pi_y(2, 1, 1).unwrap();
        let out = simulate_kwiat(&cfg, bomb().channel()).unwrap();
        // one step: the rotated vacuum has sin^2(pi/2 / 1 ... theta = pi/2) weight
        // entering the channel; theta = pi/2 rotates v fully onto p
        let theta = std::f64::consts::FRAC_PI_2;
        let expect_pi = 1.0 - theta.cos().powi(2);
        assert!((out.p_interaction.unwrap() - expect_pi).abs() < 1e-12);
    }

    #[test]
    fn kfold_interaction_matches_deferred_measurement_strategy() {
        // cross-check of the analytic K-fold rule against the explicit
        // NK-step deferred-measurement strategy at small N and K
        let n = 3;
        let k = 2;
        let cfg = KwiatConfig::half_pi_y(2, n, k).unwrap();
        let probe = random::damping_to_pure(&Ket::basis(2, 0), 0.35);
        let out = simulate_kwiat(&cfg, probe.channel()).unwrap();

        let deferred = deferred_strategy(&cfg);
        let p_deferred = deferred.interaction_probability(&probe).unwrap();
        assert!((out.p_interaction.unwrap() - p_deferred).abs() < 1e-9);

        // the deferred P_e with the flag POVM matches the analytic formula
        let flag_clear = kron(&CMat::identity(2), &Ket::basis(2, 0).projector());
        let povm = crate::strategies::TwoValuedPOVM::new(
            kron(&CMat::identity(2), &Ket::basis(2, 1).projector()),
            flag_clear,
        )
        .unwrap();
        let p_e = deferred
            .error_probability_pair(&povm, &QuantumChannel::identity(2), probe.channel())
            .unwrap();
        assert!((out.p_error - p_e).abs() < 1e-9);
    }

    /// NK-step deferred-measurement form: an ancilla flag records whether any
    /// of the K per-run measurements saw the detection outcome, and the
    /// system is reset to the vacuum between runs.
    fn deferred_strategy(cfg: &KwiatConfig) -> DiscriminationStrategy {
        let d = cfg.vacuum().dim();
        let n = cfg.steps_n();
        let k = cfg.repeats_k();
        let u = expm_scaled(
            cfg.hamiltonian(),
            -crate::linops::I * C64::new(1.0 / n as f64, 0.0),
        );
        let step = QuantumChannel::unitary(&kron(&u, &CMat::identity(2))).unwrap();

        // measure {P^⊥, |v><v|}, set the flag on the detection outcome, reset to v
        let v = cfg.vacuum();
        let mut kraus = vec![kron(&v.projector(), &CMat::identity(2))];
        for j in 1..d {
            let f = Ket::basis(d, j);
            let sys = v.outer(&f);
            kraus.push(kron(&sys, &Ket::basis(2, 1).outer(&Ket::basis(2, 0))));
            kraus.push(kron(&sys, &Ket::basis(2, 1).outer(&Ket::basis(2, 1))));
        }
        let measure_reset = QuantumChannel::new(2 * d, 2 * d, kraus).unwrap();

        let mut lambdas = Vec::new();
        lambdas.push(step.clone());
        for global in 1..(n * k) {
            if global % n == 0 {
                lambdas.push(step.compose(&measure_reset));
            } else {
                lambdas.push(step.clone());
            }
        }
        lambdas.push(measure_reset);
        let s0 = kron(&v.projector(), &Ket::basis(2, 0).projector());
        DiscriminationStrategy::new(d, 2, s0, lambdas).unwrap()
    }

    #[test]
    fn diagnostics_identity() {
        let d = spectral_diagnostics(&QuantumChannel::identity(2)).unwrap();
        assert_eq!(d.eigenvalues.len(), 4);
        assert!(d.eigenvalues.iter().all(|z| (*z - ONE).norm() < 1e-9));
        assert!((d.gap_r - 1.0).abs() < 1e-12);
        assert!(!d.one_is_simple);
        assert!(!d.mixing);
    }

    #[test]
    fn diagnostics_bomb() {
        let d = spectral_diagnostics(bomb().channel()).unwrap();
        assert!(d.one_is_simple);
        assert!(d.mixing);
        assert!(d.gap_r < 1e-9);
        let ones = d
            .eigenvalues
            .iter()
            .filter(|z| (*z - ONE).norm() < 1e-7)
            .count();
        assert_eq!(ones, 1);
    }

    #[test]
    fn diagnostics_pinching_not_mixing() {
        let d = spectral_diagnostics(&pinching_channel(2)).unwrap();
        let ones = d
            .eigenvalues
            .iter()
            .filter(|z| (*z - ONE).norm() < 1e-7)
            .count();
        assert_eq!(ones, 2);
        assert!(!d.one_is_simple);
        assert!(!d.mixing);
    }

    #[test]
    fn diagnostics_multiplicities_sum() {
        let mut rng = random::seeded_rng(91);
        let t = random::random_cptp(3, 4, &mut rng);
        let d = spectral_diagnostics(&t).unwrap();
        assert_eq!(d.eigenvalues.len(), 9);
        // spectral radius 1 within tolerance, 1 in the spectrum
        assert!(d.eigenvalues.iter().all(|z| z.norm() <= 1.0 + 1e-8));
        assert!(d.eigenvalues.iter().any(|z| (*z - ONE).norm() < 1e-7));
    }

    #[test]
    fn resolvent_bound_bomb_bound_verified_empirically() {
        let h = hamiltonian_half_pi_y(&Ket::basis(2, 0));
        let t = bomb().channel().clone();
        let c = resolvent_bound_constant(&t, &h, 0.2, 0.5, 64).unwrap();
        assert!(c.is_finite() && c > 0.0);
        let v = Ket::basis(2, 0);
        for n in [4usize, 16, 64, 256] {
            let miss = probe_miss_probability(&t, &h, &v, n);
            assert!(
                miss <= c / (n as f64 * n as f64) + 1e-12,
                "bound failed at N={}: {} > {}",
                n,
                miss,
                c / (n as f64 * n as f64)
            );
        }
    }

    #[test]
    fn resolvent_bound_larger_delta_gives_smaller_contour_term() {
        let h = hamiltonian_half_pi_y(&Ket::basis(2, 0));
        let t = bomb().channel().clone();
        // tau large enough that the contour term dominates tau^{-2}
        let c_small_delta = resolvent_bound_constant(&t, &h, 0.2, 0.1, 64).unwrap();
        let c_large_delta = resolvent_bound_constant(&t, &h, 0.2, 0.9, 64).unwrap();
        assert!(c_large_delta < c_small_delta);
    }

    #[test]
    fn resolvent_bound_zero_hamiltonian_is_trivial() {
        // H = 0 never moves the vacuum: the probability side vanishes for
        // every N while the constant collapses to tau^{-2}
        let t = random::damping_to_pure(&Ket::basis(2, 0), 0.5);
        let h = CMat::zeros(2, 2);
        let c = resolvent_bound_constant(t.channel(), &h, 0.5, 0.25, 32).unwrap();
        assert!((c - 4.0).abs() < 1e-12);
        for n in [3usize, 9, 27] {
            let miss = probe_miss_probability(t.channel(), &h, &Ket::basis(2, 0), n);
            assert!(miss < 1e-12);
        }
    }

    #[test]
    fn resolvent_bound_rejects_gapless_channel() {
        let h = hamiltonian_half_pi_y(&Ket::basis(2, 0));
        // pinching channel: eigenvalue 1 with multiplicity 2 violates the condition
        assert!(matches!(
            resolvent_bound_constant(&pinching_channel(2), &h, 0.2, 0.5, 16),
            Err(Error::SpectrumConditionViolated { .. })
        ));
    }

    #[test]
    fn decay_fit_exact_power_laws() {
        let sq: Vec<(usize, f64)> = (1..=12).map(|n| (n, 1.0 / (n * n) as f64)).collect();
        let fit = decay_rate_fit(&sq).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-9);

        let lin: Vec<(usize, f64)> = (1..=12).map(|n| (n, 3.0 / n as f64)).collect();
        let fit = decay_rate_fit(&lin).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-9);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-9);

        assert!(decay_rate_fit(&[(1, 1.0), (2, 0.5)]).is_err());
        assert!(decay_rate_fit(&[(1, 1.0), (2, 0.0), (3, 0.1)]).is_err());
    }

    #[test]
    fn decay_fit_on_simulated_influence() {
        let h = hamiltonian_half_pi_y(&Ket::basis(2, 0));
        let t = bomb().channel().clone();
        let v = Ket::basis(2, 0);
        let pts: Vec<(usize, f64)> = [8usize, 16, 32, 64, 128]
            .iter()
            .map(|&n| (n, influence_sum(&t, &h, &v, n)))
            .collect();
        let fit = decay_rate_fit(&pts).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.2, "slope {}", fit.slope);
    }

    #[test]
    fn qubit_asymptotic_bomb_is_quarter_pi_squared() {
        let t = bomb().channel().clone();
        let lim = qubit_asymptotic(&t, &Ket::basis(2, 0)).unwrap();
        assert!((lim - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_asymptotic_dephased_damping() {
        // pinch-then-damp: tau_0 = 0, tau = 1 - gamma; gamma = 1/2 gives pi^2/2
        let v = Ket::basis(2, 0);
        let damp = random::damping_to_pure(&v, 0.5);
        let t = damp.channel().compose(&pinching_channel(2));
        let lim = qubit_asymptotic(&t, &v).unwrap();
        assert!((lim - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn qubit_asymptotic_matches_simulation() {
        let v = Ket::basis(2, 0);
        let cw = random::damping_to_pure(&v, 0.5);
        let lim = qubit_asymptotic(cw.channel(), &v).unwrap();
        let h = hamiltonian_half_pi_y(&v);
        let n = 2000;
        let sum = influence_sum(cw.channel(), &h, &v, n);
        assert!(
            ((n as f64) * sum - lim).abs() <= 0.05 * lim,
            "N*sum = {} vs limit {}",
            n as f64 * sum,
            lim
        );
    }

    #[test]
    fn qubit_asymptotic_rejects_pinching() {
        assert!(qubit_asymptotic(&pinching_channel(2), &Ket::basis(2, 0)).is_err());
    }

    #[test]
    fn riesz_check_bomb() {
        let dev = riesz_power_check(bomb().channel(), 3, 256).unwrap();
        assert!(dev < 1e-8, "deviation {}", dev);
    }

    #[test]
    fn riesz_check_powers_agree() {
        let t = random::damping_to_pure(&Ket::basis(2, 0), 0.4);
        let d1 = riesz_power_check(t.channel(), 1, 256).unwrap();
        let d2 = riesz_power_check(t.channel(), 2, 256).unwrap();
        assert!(d1 < 1e-8 && d2 < 1e-8);
    }

    #[test]
    fn riesz_check_unitary_with_spread_phases() {
        // eigenvalue 1 of the conjugation superoperator has multiplicity 2
        // but is isolated; the power identity still holds
        let h = CMat::from_real(2, 2, &[0.9, 0.0, 0.0, -0.4]).unwrap();
        let u = expm_scaled(&h, -crate::linops::I);
        let t = QuantumChannel::unitary(&u).unwrap();
        let dev = riesz_power_check(&t, 5, 512).unwrap();
        assert!(dev < 1e-7, "deviation {}", dev);
    }

    #[test]
    fn scaled_decay_sequences_stay_bounded() {
        // for a mixing channel with pure fixed vacuum, N^2 * miss and
        // N * influence stay below the computed bound constant on the grid
        let mut rng = random::seeded_rng(0xb0d);
        let v = Ket::basis(2, 0);
        let cw = random::random_mixing_channel(2, &v, 0.6, &mut rng);
        let h = hamiltonian_half_pi_y(&v);
        let diag = spectral_diagnostics(cw.channel()).unwrap();
        let delta = (1.0 - diag.gap_r) * 2.0 / 3.0;
        let c = resolvent_bound_constant(cw.channel(), &h, 0.05, delta, 64).unwrap();
        for n in [8usize, 32, 128, 512] {
            let nf = n as f64;
            let miss = probe_miss_probability(cw.channel(), &h, &v, n);
            let infl = influence_sum(cw.channel(), &h, &v, n);
            assert!(
                nf * nf * miss <= c + 1e-9,
                "N^2 miss {} vs C {}",
                nf * nf * miss,
                c
            );
            assert!(
                nf * infl <= c + 1e-9,
                "N influence {} vs C {}",
                nf * infl,
                c
            );
        }
    }

    #[test]
    fn step_superoperator_matches_composition() {
        let mut rng = random::seeded_rng(0x57e9);
        let t = random::random_cptp(2, 2, &mut rng);
        let h = hamiltonian_half_pi_y(&Ket::basis(2, 0));
        let n = 7;
        let s = step_superoperator(&t, &h, n);
        let u = expm_scaled(&h, -crate::linops::I * C64::new(1.0 / n as f64, 0.0));
        let composed = QuantumChannel::unitary(&u).unwrap().compose(&t);
        assert!(s.mat.sub(composed.superoperator()).max_abs() < 1e-12);
        // spectrum of the step map stays inside the closed unit disk
        for lam in crate::linops::complex_eigenvalues(&s.mat).unwrap() {
            assert!(lam.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn pinching_deficit_converges() {
        let d = pinching_influence_deficit(2000);
        let target = std::f64::consts::PI.powi(2) / 4.0;
        assert!(
            (d - target).abs() < 0.01 * target,
            "deficit {} vs {}",
            d,
            target
        );
    }

    #[test]
    fn pinching_influence_does_not_decay() {
        let h = hamiltonian_half_pi_y(&Ket::basis(2, 0));
        let t = pinching_channel(2);
        let v = Ket::basis(2, 0);
        let pts: Vec<(usize, f64)> = [16usize, 32, 64, 128, 256]
            .iter()
            .map(|&n| (n, influence_sum(&t, &h, &v, n)))
            .collect();
        let fit = decay_rate_fit(&pts).unwrap();
        assert!(fit.slope > -0.1, "slope {}", fit.slope);
    }
}
