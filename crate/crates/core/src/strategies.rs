//! N-step discrimination strategies: intermediate state maps, error
//! probability over channel sets, interaction probability via the undetected
//! branch, and total transmission.
//!
//! The ancilla is tensored on the right (system ⊗ ancilla); every
//! intermediate channel acts on the full space. The first and last channels
//! may change dimensions, which the reduction protocol uses.

use crate::channels::{
    build_t_down, interaction_functional, ChannelWithVacuum, QuantumChannel,
    TransmissionFunctional, CPTP_TOL,
};
use crate::error::{Error, Result};
use crate::linops::{hermitian_eig, partial_trace, CMat, Keep};

/// Initial state plus the channel sequence `Λ_0 … Λ_N` with `N` uses of the
/// unknown channel in between.
#[derive(Clone, Debug)]
pub struct DiscriminationStrategy {
    sys_dim: usize,
    anc_dim: usize,
    initial_state: CMat,
    lambdas: Vec<QuantumChannel>,
}

impl DiscriminationStrategy {
    pub fn new(
        sys_dim: usize,
        anc_dim: usize,
        initial_state: CMat,
        lambdas: Vec<QuantumChannel>,
    ) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::MalformedStrategy("need at least Λ_0".into()));
        }
        let full = sys_dim * anc_dim;
        let steps = lambdas.len() - 1;
        if lambdas[0].dim_in() != initial_state.rows() {
            return Err(Error::MalformedStrategy(format!(
                "Λ_0 input dimension {} does not match the initial state dimension {}",
                lambdas[0].dim_in(),
                initial_state.rows()
            )));
        }
        for (n, lam) in lambdas.iter().enumerate() {
            if !lam.is_trace_preserving() {
                return Err(Error::MalformedStrategy(format!(
                    "Λ_{} is not trace-preserving",
                    n
                )));
            }
            let out_ok = if n == steps {
                true
            } else {
                lam.dim_out() == full
            };
            let in_ok = if n == 0 { true } else { lam.dim_in() == full };
            if !out_ok || !in_ok {
                return Err(Error::MalformedStrategy(format!(
                    "Λ_{} has dimensions {} -> {}, expected the full space {}",
                    n,
                    lam.dim_in(),
                    lam.dim_out(),
                    full
                )));
            }
        }
        if !initial_state.is_square() {
            return Err(Error::MalformedStrategy(
                "initial state must be square".into(),
            ));
        }
        let (vals, _) = hermitian_eig(&initial_state.symmetrize());
        if vals.first().copied().unwrap_or(0.0) < -CPTP_TOL {
            return Err(Error::NotPositiveSemiDefinite { min_eig: vals[0] });
        }
        let tr = initial_state.trace().re;
        if (tr - 1.0).abs() > CPTP_TOL {
            return Err(Error::NotUnitTrace(tr));
        }
        Ok(DiscriminationStrategy {
            sys_dim,
            anc_dim,
            initial_state,
            lambdas,
        })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn anc_dim(&self) -> usize {
        self.anc_dim
    }

    pub fn steps(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn initial_state(&self) -> &CMat {
        &self.initial_state
    }

    pub fn lambdas(&self) -> &[QuantumChannel] {
        &self.lambdas
    }

    /// Intermediate states `ρ_0 … ρ_N` with `ρ_0 = Λ_0(s_0)` and
    /// `ρ_n = Λ_n((T ⊗ id)(ρ_{n-1}))`. `t` may be a trace non-increasing
    /// operation, in which case the trace decays along the sequence.
    pub fn run_intermediate_states(&self, t: &QuantumChannel) -> Result<Vec<CMat>> {
        if !t.is_square() || t.dim_in() != self.sys_dim {
            return Err(Error::DimensionMismatch(format!(
                "probe channel acts on dimension {}, strategy system is {}",
                t.dim_in(),
                self.sys_dim
            )));
        }
        let t_full = t.tensor_id_right(self.anc_dim);
        let mut states = Vec::with_capacity(self.steps() + 1);
        let mut rho = self.lambdas[0].apply(&self.initial_state);
        states.push(rho.clone());
        for n in 1..=self.steps() {
            rho = self.lambdas[n].apply(&t_full.apply(&rho));
            states.push(rho.clone());
        }
        Ok(states)
    }

    /// Final state `ρ_N` only.
    pub fn final_state(&self, t: &QuantumChannel) -> Result<CMat> {
        Ok(self
            .run_intermediate_states(t)?
            .pop()
            .expect("at least ρ_0"))
    }

    /// Reduced input of the n-th channel use: `tr_Z ρ_n`.
    fn system_marginal(&self, rho: &CMat) -> Result<CMat> {
        partial_trace(rho, self.sys_dim, self.anc_dim, Keep::First)
    }

    /// Interaction probability `Σ_{n<N} i_T(tr_Z ρ_n^{T↓})`, cross-checked
    /// against the telescoped form `1 - tr(ρ_N^{T↓})`.
    pub fn interaction_probability(&self, cw: &ChannelWithVacuum) -> Result<f64> {
        let theta = interaction_functional(cw);
        let down = build_t_down(cw);
        let states = self.run_intermediate_states(&down)?;
        let mut sum = 0.0;
        for rho in states.iter().take(self.steps()) {
            sum += theta.eval(&self.system_marginal(rho)?);
        }
        let terminal = 1.0 - states.last().expect("nonempty").trace().re;
        if (sum - terminal).abs() > 1e-9 {
            return Err(Error::InteractionSumMismatch { sum, terminal });
        }
        Ok(sum)
    }

    /// Total transmission `Σ_{n<N} t(tr_Z ρ_n^T)`, evaluated along the
    /// intermediate states of the full channel.
    pub fn total_transmission(
        &self,
        t: &QuantumChannel,
        tf: &TransmissionFunctional,
    ) -> Result<f64> {
        let states = self.run_intermediate_states(t)?;
        let mut sum = 0.0;
        for rho in states.iter().take(self.steps()) {
            sum += tf.eval(&self.system_marginal(rho)?);
        }
        Ok(sum)
    }

    /// Discrimination error probability for a pair of channels.
    pub fn error_probability_pair(
        &self,
        povm: &TwoValuedPOVM,
        t_a: &QuantumChannel,
        t_b: &QuantumChannel,
    ) -> Result<f64> {
        self.error_probability_sets(povm, std::slice::from_ref(t_a), std::slice::from_ref(t_b))
    }

    /// Error probability against two finite channel sets: the suprema of the
    /// definition are realized as maxima over the supplied lists.
    pub fn error_probability_sets(
        &self,
        povm: &TwoValuedPOVM,
        set_a: &[QuantumChannel],
        set_b: &[QuantumChannel],
    ) -> Result<f64> {
        if set_a.is_empty() || set_b.is_empty() {
            return Err(Error::EmptyChannelSet);
        }
        let mut worst_a: f64 = 0.0;
        for t in set_a {
            let rho = self.final_state(t)?;
            worst_a = worst_a.max(povm.pi_b.hs_inner(&rho).re);
        }
        let mut worst_b: f64 = 0.0;
        for t in set_b {
            let rho = self.final_state(t)?;
            worst_b = worst_b.max(povm.pi_a.hs_inner(&rho).re);
        }
        Ok(0.5 * (worst_a + worst_b))
    }
}

/// Two-outcome measurement `{π_A, π_B}` with `π_A + π_B = 1`.
#[derive(Clone, Debug)]
pub struct TwoValuedPOVM {
    pub pi_a: CMat,
    pub pi_b: CMat,
}

impl TwoValuedPOVM {
    pub fn new(pi_a: CMat, pi_b: CMat) -> Result<Self> {
        for p in [&pi_a, &pi_b] {
            let (vals, _) = hermitian_eig(&p.symmetrize());
            if vals.first().copied().unwrap_or(0.0) < -CPTP_TOL {
                return Err(Error::NotPositiveSemiDefinite { min_eig: vals[0] });
            }
        }
        let resid = pi_a.add(&pi_b).sub(&CMat::identity(pi_a.rows())).max_abs();
        if resid > CPTP_TOL {
            return Err(Error::PovmIncomplete(resid));
        }
        Ok(TwoValuedPOVM { pi_a, pi_b })
    }

    /// Projective measurement from a projector and its complement.
    pub fn from_projector(p: CMat) -> Result<Self> {
        let q = CMat::identity(p.rows()).sub(&p);
        TwoValuedPOVM::new(p, q)
    }
}

/// Bundle of quantities produced by a strategy run.
#[derive(Clone, Debug)]
pub struct SimulationReport {
    pub intermediate_states: Vec<CMat>,
    pub p_error: Option<f64>,
    pub p_interaction: Option<f64>,
    pub total_transmission: Option<f64>,
}

impl SimulationReport {
    /// Checks the state-sequence invariants: PSD states and traces that are
    /// constant (channels) or non-increasing (operations).
    pub fn validate(&self) -> Result<()> {
        let mut prev_trace = f64::INFINITY;
        for rho in &self.intermediate_states {
            let (vals, _) = hermitian_eig(&rho.symmetrize());
            if vals.first().copied().unwrap_or(0.0) < -CPTP_TOL {
                return Err(Error::NotPositiveSemiDefinite { min_eig: vals[0] });
            }
            let tr = rho.trace().re;
            if tr > prev_trace + 1e-9 {
                return Err(Error::MalformedStrategy(
                    "state traces increased along the sequence".into(),
                ));
            }
            prev_trace = tr;
        }
        Ok(())
    }
}

/// The two-wire interferometer step: a rotation by `theta` in the span of
/// `|v p>` and `|p v>` that fixes `|v v>` and `|p p>`. `N` such steps rotate
/// a photon from the lower to the upper wire while the per-step survival
/// amplitude under a blocking object is `cos(theta)`.
pub fn beamsplitter_unitary(theta: f64) -> CMat {
    // basis order on C^2 (x) C^2: vv, vp, pv, pp with v = e0, p = e1
    let (c, s) = (theta.cos(), theta.sin());
    let mut u = CMat::zeros(4, 4);
    u[(0, 0)] = crate::linops::ONE;
    u[(3, 3)] = crate::linops::ONE;
    u[(1, 1)] = C64::new(c, 0.0);
    u[(2, 1)] = C64::new(s, 0.0);
    u[(1, 2)] = C64::new(-s, 0.0);
    u[(2, 2)] = C64::new(c, 0.0);
    u
}

use crate::linops::C64;

/// The two-wire bomb-tester strategy: the unknown channel occupies the first
/// (upper) wire, the ancilla is the lower wire, the photon starts in the
/// lower wire, and every step applies the same beamsplitter.
pub fn two_wire_interferometer_strategy(steps: usize, theta: f64) -> DiscriminationStrategy {
    let u = beamsplitter_unitary(theta);
    let bs = QuantumChannel::unitary(&u).expect("beamsplitter is unitary");
    let mut lambdas = Vec::with_capacity(steps + 1);
    for _ in 0..steps {
        lambdas.push(bs.clone());
    }
    lambdas.push(QuantumChannel::identity(4));
    let v = crate::linops::Ket::basis(2, 0);
    let p = crate::linops::Ket::basis(2, 1);
    let s0 = v.tensor(&p).projector();
    DiscriminationStrategy::new(2, 2, s0, lambdas).expect("two-wire strategy is consistent")
}
