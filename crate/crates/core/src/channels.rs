//! Channel representations (Kraus form with lazily cached Choi and
//! superoperator views), channels with vacuum, maximal vacuum subspaces, the undetected
//! branch `T↓` with its interaction functional, and the decision procedure
//! for interaction-free discriminability.
//!
//! Conventions (fixed once, documented here because the literature varies):
//! - `vec` flattens operators row-major, so the superoperator of
//!   `X -> K X K^†` is `K ⊗ conj(K)`;
//! - the Choi matrix is `J(T) = Σ_ij T(|i><j|) ⊗ |i><j|` (output factor
//!   first), i.e. `(T ⊗ id)` applied to the unnormalized maximally entangled
//!   projector; `tr J = dim` for trace-preserving `T`.
//!
//! Any comparison with external data must state its convention.

use crate::error::{Error, Result};
use crate::linops::{
    hermitian_eig, kernel_basis, kron, trace_norm, CMat, Ket, Subspace, C64, KERNEL_REL_TOL, ONE,
    SUPPORT_TOL, ZERO,
};
use std::sync::OnceLock;

/// Tolerance for trace preservation and Choi positivity.
pub const CPTP_TOL: f64 = 1e-9;
/// Default tolerance for equality of channel restrictions, trace norm per matrix unit.
pub const RESTRICTION_TOL: f64 = 1e-8;

/// Completely positive map in Kraus form. `trace_preserving` distinguishes
/// channels from trace non-increasing operations; both share all machinery.
#[derive(Clone)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMat>,
    trace_preserving: bool,
    choi: OnceLock<CMat>,
    superop: OnceLock<CMat>,
}

impl std::fmt::Debug for QuantumChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "QuantumChannel {{ {} -> {}, {} Kraus, tp: {} }}",
            self.dim_in,
            self.dim_out,
            self.kraus.len(),
            self.trace_preserving
        )
    }
}

fn kraus_sum(kraus: &[CMat]) -> CMat {
    let d = kraus[0].cols();
    let mut acc = CMat::zeros(d, d);
    for k in kraus {
        acc = acc.add(&k.adjoint().mul(k));
    }
    acc
}

fn build_choi(dim_in: usize, dim_out: usize, kraus: &[CMat]) -> CMat {
    let n = dim_in * dim_out;
    let mut j = CMat::zeros(n, n);
    for k in kraus {
        let v = k.vec_flatten();
        for a in 0..n {
            if v[a] == ZERO {
                continue;
            }
            for b in 0..n {
                j[(a, b)] += v[a] * v[b].conj();
            }
        }
    }
    j
}

fn build_superop(kraus: &[CMat]) -> CMat {
    let d_out = kraus[0].rows();
    let d_in = kraus[0].cols();
    let mut s = CMat::zeros(d_out * d_out, d_in * d_in);
    for k in kraus {
        s = s.add(&kron(k, &k.conj()));
    }
    s
}

impl QuantumChannel {
    fn from_kraus_unchecked(dim_in: usize, dim_out: usize, kraus: Vec<CMat>, tp: bool) -> Self {
        QuantumChannel {
            dim_in,
            dim_out,
            kraus,
            trace_preserving: tp,
            choi: OnceLock::new(),
            superop: OnceLock::new(),
        }
    }

    fn check_shapes(dim_in: usize, dim_out: usize, kraus: &[CMat]) -> Result<()> {
        if kraus.is_empty() {
            return Err(Error::DimensionMismatch(
                "channel needs at least one Kraus operator".into(),
            ));
        }
        for k in kraus {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    dim_out,
                    dim_in
                )));
            }
            if !k.is_finite() {
                return Err(Error::NonFiniteEntries);
            }
        }
        Ok(())
    }

    /// Trace-preserving channel; complete positivity holds by Kraus form.
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<CMat>) -> Result<Self> {
        Self::check_shapes(dim_in, dim_out, &kraus)?;
        let resid = kraus_sum(&kraus).sub(&CMat::identity(dim_in)).max_abs();
        if resid > CPTP_TOL {
            return Err(Error::NotTracePreserving(resid));
        }
        Ok(Self::from_kraus_unchecked(dim_in, dim_out, kraus, true))
    }

    /// Trace non-increasing quantum operation: `Σ K^† K <= 1` within tolerance.
    pub fn operation(dim_in: usize, dim_out: usize, kraus: Vec<CMat>) -> Result<Self> {
        Self::check_shapes(dim_in, dim_out, &kraus)?;
        let s = kraus_sum(&kraus);
        let (vals, _) = hermitian_eig(&s.symmetrize());
        let top = vals.last().copied().unwrap_or(0.0);
        if top > 1.0 + CPTP_TOL {
            return Err(Error::NotTraceNonIncreasing(top - 1.0));
        }
        let tp = s.sub(&CMat::identity(dim_in)).max_abs() <= CPTP_TOL;
        Ok(Self::from_kraus_unchecked(dim_in, dim_out, kraus, tp))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_kraus_unchecked(dim, dim, vec![CMat::identity(dim)], true)
    }

    pub fn unitary(u: &CMat) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        let resid = u.adjoint().mul(u).sub(&CMat::identity(u.rows())).max_abs();
        if resid > 1e-10 {
            return Err(Error::NotOrthonormal(resid));
        }
        Ok(Self::from_kraus_unchecked(
            u.rows(),
            u.rows(),
            vec![u.clone()],
            true,
        ))
    }

    /// `X -> tr(X) |target><target|`.
    pub fn reset_to_pure(target: &Ket) -> Result<Self> {
        let d = target.dim();
        let n = target.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitVector(n));
        }
        let kraus = (0..d).map(|j| target.outer(&Ket::basis(d, j))).collect();
        Ok(Self::from_kraus_unchecked(d, d, kraus, true))
    }

    /// Pinching in an orthonormal basis: `X -> Σ_i |b_i><b_i| X |b_i><b_i|`.
    pub fn pinching(basis: &[Ket]) -> Result<Self> {
        let d = basis[0].dim();
        let cols: Vec<Vec<C64>> = basis.iter().map(|b| b.amps().to_vec()).collect();
        let b = CMat::from_columns(d, &cols);
        let resid = b
            .adjoint()
            .mul(&b)
            .sub(&CMat::identity(basis.len()))
            .max_abs();
        if resid > 1e-10 || basis.len() != d {
            return Err(Error::NotOrthonormal(resid));
        }
        let kraus = basis.iter().map(|v| v.projector()).collect();
        Ok(Self::from_kraus_unchecked(d, d, kraus, true))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Choi matrix `J(T) = (T ⊗ id)(|Ω><Ω|)`, `|Ω> = Σ_i |ii>`; built on
    /// first use and cached (instances stay immutable and shareable).
    pub fn choi(&self) -> &CMat {
        self.choi
            .get_or_init(|| build_choi(self.dim_in, self.dim_out, &self.kraus))
    }

    /// Matrix of the channel on row-major vectorized operators; built on
    /// first use and cached.
    pub fn superoperator(&self) -> &CMat {
        self.superop.get_or_init(|| build_superop(&self.kraus))
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        assert_eq!(rho.rows(), self.dim_in, "channel input dimension mismatch");
        let mut out = CMat::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = out.add(&k.sandwich(rho));
        }
        out
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &QuantumChannel) -> QuantumChannel {
        assert_eq!(inner.dim_out, self.dim_in, "composition dimension mismatch");
        let mut kraus = Vec::with_capacity(self.kraus.len() * inner.kraus.len());
        for a in &self.kraus {
            for b in &inner.kraus {
                kraus.push(a.mul(b));
            }
        }
        Self::from_kraus_unchecked(
            inner.dim_in,
            self.dim_out,
            kraus,
            self.trace_preserving && inner.trace_preserving,
        )
    }

    /// `T ⊗ id` on system ⊗ ancilla (ancilla tensored on the right).
    pub fn tensor_id_right(&self, anc_dim: usize) -> QuantumChannel {
        let id = CMat::identity(anc_dim);
        let kraus = self.kraus.iter().map(|k| kron(k, &id)).collect();
        Self::from_kraus_unchecked(
            self.dim_in * anc_dim,
            self.dim_out * anc_dim,
            kraus,
            self.trace_preserving,
        )
    }

    /// Recomputes a minimal Kraus set from the Choi matrix.
    pub fn compressed(&self) -> QuantumChannel {
        if self.kraus.len() <= self.dim_in * self.dim_out {
            return self.clone();
        }
        from_choi(self.choi(), self.dim_out, self.dim_in).expect("own Choi matrix is PSD")
    }

    /// Max-abs distance between the Choi matrices of two maps.
    pub fn choi_distance(&self, other: &QuantumChannel) -> f64 {
        self.choi().sub(other.choi()).max_abs()
    }
}

/// Stinespring dilation in stacked-Kraus form: `V = Σ_i |i>_E ⊗ K_i`.
#[derive(Clone, Debug)]
pub struct StinespringDilation {
    pub env_dim: usize,
    pub isometry: CMat,
}

/// Canonical dilation of a trace-preserving channel.
pub fn stinespring_of(t: &QuantumChannel) -> Result<StinespringDilation> {
    if !t.is_trace_preserving() {
        return Err(Error::ChannelRequired);
    }
    let e = t.kraus().len();
    let (d_out, d_in) = (t.dim_out(), t.dim_in());
    let mut v = CMat::zeros(e * d_out, d_in);
    for (i, k) in t.kraus().iter().enumerate() {
        for a in 0..d_out {
            for b in 0..d_in {
                v[(i * d_out + a, b)] = k[(a, b)];
            }
        }
    }
    Ok(StinespringDilation {
        env_dim: e,
        isometry: v,
    })
}

/// Kraus set from a PSD Choi matrix on a `dim`-dimensional system.
pub fn choi_to_kraus(j: &CMat, dim: usize) -> Result<QuantumChannel> {
    from_choi(j, dim, dim)
}

pub(crate) fn from_choi(j: &CMat, dim_out: usize, dim_in: usize) -> Result<QuantumChannel> {
    let n = dim_out * dim_in;
    if j.rows() != n || j.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix is {}x{}, expected {}x{}",
            j.rows(),
            j.cols(),
            n,
            n
        )));
    }
    let (vals, vecs) = hermitian_eig(&j.symmetrize());
    let scale = vals.iter().fold(1.0_f64, |a, &v| a.max(v.abs()));
    if let Some(&min) = vals.first() {
        if min < -CPTP_TOL * scale {
            return Err(Error::ChoiNotPositive(min));
        }
    }
    let mut kraus = Vec::new();
    for (k, &lam) in vals.iter().enumerate() {
        if lam <= SUPPORT_TOL * scale {
            continue;
        }
        let w = vecs.column(k);
        let s = lam.sqrt();
        kraus.push(CMat::from_fn(dim_out, dim_in, |a, b| {
            C64::new(s, 0.0) * w[a * dim_in + b]
        }));
    }
    if kraus.is_empty() {
        kraus.push(CMat::zeros(dim_out, dim_in));
    }
    QuantumChannel::operation(dim_in, dim_out, kraus)
}

/// Positive linear functional `t(rho) = tr(theta rho)` with PSD `theta`.
#[derive(Clone, Debug)]
pub struct TransmissionFunctional {
    theta: CMat,
}

impl TransmissionFunctional {
    pub fn new(theta: CMat) -> Result<Self> {
        let (vals, _) = hermitian_eig(&theta.symmetrize());
        let scale = vals.iter().fold(1.0_f64, |a, &v| a.max(v.abs()));
        if let Some(&min) = vals.first() {
            if min < -CPTP_TOL * scale {
                return Err(Error::NotPositiveSemiDefinite { min_eig: min });
            }
        }
        Ok(TransmissionFunctional {
            theta: theta.symmetrize(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        TransmissionFunctional {
            theta: CMat::zeros(dim, dim),
        }
    }

    pub fn theta(&self) -> &CMat {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.rows()
    }

    pub fn eval(&self, rho: &CMat) -> f64 {
        self.theta.hs_inner(rho).re.max(0.0)
    }

    /// Functional norm on trace-class operators: the top eigenvalue of theta.
    pub fn norm(&self) -> f64 {
        hermitian_eig(&self.theta)
            .0
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
    }
}

/// Channel together with a unit vector mapped to a pure state.
#[derive(Clone, Debug)]
pub struct ChannelWithVacuum {
    channel: QuantumChannel,
    vacuum: Ket,
}

impl ChannelWithVacuum {
    pub fn new(channel: QuantumChannel, vacuum: Ket) -> Result<Self> {
        if !channel.is_trace_preserving() {
            return Err(Error::ChannelRequired);
        }
        if !channel.is_square() || channel.dim_in() != vacuum.dim() {
            return Err(Error::DimensionMismatch(
                "vacuum vector dimension must match a square channel".into(),
            ));
        }
        let n = vacuum.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitVector(n));
        }
        let out = channel.apply(&vacuum.projector());
        let purity = out.mul(&out).trace().re;
        if (purity - 1.0).abs() > CPTP_TOL {
            return Err(Error::VacuumNotPure(purity));
        }
        Ok(ChannelWithVacuum { channel, vacuum })
    }

    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    pub fn vacuum(&self) -> &Ket {
        &self.vacuum
    }

    pub fn dim(&self) -> usize {
        self.channel.dim_in()
    }

    /// Canonical dilation (stacked Kraus).
    pub fn dilation(&self) -> StinespringDilation {
        stinespring_of(&self.channel).expect("channel with vacuum is trace-preserving")
    }

    /// Environment unit vector `e` with `V v = e ⊗ v'`.
    pub(crate) fn vacuum_env_vector(&self, dil: &StinespringDilation) -> Result<Ket> {
        let d = self.dim();
        let w = dil.isometry.mul_vec(self.vacuum.amps());
        // environment marginal of the pure vector e ⊗ v'
        let mut rho_e = CMat::zeros(dil.env_dim, dil.env_dim);
        for e in 0..dil.env_dim {
            for f in 0..dil.env_dim {
                let mut acc = ZERO;
                for a in 0..d {
                    acc += w[e * d + a] * w[f * d + a].conj();
                }
                rho_e[(e, f)] = acc;
            }
        }
        let rank = crate::linops::psd_rank(&rho_e, SUPPORT_TOL);
        if rank != 1 {
            return Err(Error::VacuumSupportNotRankOne(rank));
        }
        let (vals, vecs) = hermitian_eig(&rho_e);
        let top = vals.len() - 1;
        Ok(Ket::from_vec(vecs.column(top)))
    }
}

/// Rank-one projector on the environment onto the support of
/// `tr_H(V |v><v| V^†)`.
pub fn vacuum_environment_projector(
    cw: &ChannelWithVacuum,
    dil: &StinespringDilation,
) -> Result<CMat> {
    let e = cw.vacuum_env_vector(dil)?;
    Ok(e.projector())
}

/// Maximal vacuum subspace: kernel of `((1 - P_v) ⊗ 1) V`. Contains the
/// vacuum, and the channel is isometric on it.
pub fn maximal_vacuum_subspace(cw: &ChannelWithVacuum) -> Subspace {
    let dil = cw.dilation();
    let eps = cw
        .vacuum_env_vector(&dil)
        .expect("vacuum purity was validated");
    let d = cw.dim();
    let p_perp_env = CMat::identity(dil.env_dim).sub(&eps.projector());
    let blocker = kron(&p_perp_env, &CMat::identity(d)).mul(&dil.isometry);
    let basis = kernel_basis(&blocker, KERNEL_REL_TOL);
    Subspace::new(d, basis).expect("SVD kernel basis is orthonormal")
}

/// If `t` restricted to operators on `v_sub` acts as conjugation by a single
/// isometry, returns that isometry (ambient_dim x k, acting on subspace
/// coordinates); otherwise `None`. Decided via restricted-Choi rank one plus
/// trace preservation.
pub fn isometric_restriction(t: &QuantumChannel, v_sub: &Subspace) -> Option<CMat> {
    let k = v_sub.dim();
    if k == 0 || !t.is_square() || t.dim_in() != v_sub.ambient_dim() {
        return None;
    }
    let d = t.dim_in();
    let n = d * k;
    let mut j = CMat::zeros(n, n);
    for i in 0..k {
        for jj in 0..k {
            let unit = v_sub.basis_ket(i).outer(&v_sub.basis_ket(jj));
            let out = t.apply(&unit);
            if (out.trace() - if i == jj { ONE } else { ZERO }).norm() > RESTRICTION_TOL {
                return None;
            }
            for a in 0..d {
                for b in 0..d {
                    j[(a * k + i, b * k + jj)] = out[(a, b)];
                }
            }
        }
    }
    let (vals, vecs) = hermitian_eig(&j.symmetrize());
    let top = vals.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return None;
    }
    let second = if vals.len() >= 2 {
        vals[vals.len() - 2]
    } else {
        0.0
    };
    if second.abs() > SUPPORT_TOL * top {
        return None;
    }
    let w = vecs.column(vals.len() - 1);
    let s = top.sqrt();
    let iso = CMat::from_fn(d, k, |a, i| C64::new(s, 0.0) * w[a * k + i]);
    Some(iso)
}

/// True iff the two channels agree on all matrix units of the subspace, in
/// trace norm per unit.
pub fn restrictions_equal(
    t_a: &QuantumChannel,
    t_b: &QuantumChannel,
    v_sub: &Subspace,
    tol: f64,
) -> bool {
    restriction_distance(t_a, t_b, v_sub) <= tol
}

/// Max over matrix units of the subspace of the trace-norm difference.
pub fn restriction_distance(t_a: &QuantumChannel, t_b: &QuantumChannel, v_sub: &Subspace) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..v_sub.dim() {
        for j in 0..v_sub.dim() {
            let unit = v_sub.basis_ket(i).outer(&v_sub.basis_ket(j));
            let diff = t_a.apply(&unit).sub(&t_b.apply(&unit));
            worst = worst.max(trace_norm(&diff));
        }
    }
    worst
}

/// The undetected branch `T↓(X) = tr_E((P_v ⊗ 1) V X V^†)`, a trace
/// non-increasing operation with a single Kraus operator.
pub fn build_t_down(cw: &ChannelWithVacuum) -> QuantumChannel {
    let dil = cw.dilation();
    let eps = cw
        .vacuum_env_vector(&dil)
        .expect("vacuum purity was validated");
    let d = cw.dim();
    let mut l = CMat::zeros(d, d);
    for (e, k) in cw.channel().kraus().iter().enumerate() {
        let c = eps.amps()[e].conj();
        if c == ZERO {
            continue;
        }
        l = l.add(&k.scale(c));
    }
    QuantumChannel::operation(d, d, vec![l]).expect("projected Kraus is trace non-increasing")
}

/// Interaction functional of a channel with vacuum:
/// `i_T(X) = tr(P_v^⊥ tr_H(V X V^†)) = tr((1 - L^†L) X)` for the undetected
/// branch Kraus operator `L`.
pub fn interaction_functional(cw: &ChannelWithVacuum) -> TransmissionFunctional {
    let down = build_t_down(cw);
    let l = &down.kraus()[0];
    let theta = CMat::identity(cw.dim()).sub(&l.adjoint().mul(l));
    TransmissionFunctional::new(theta).expect("1 - L^†L is PSD for an isometry block")
}

/// Largest constant with `i_T(rho) >= C tr(P^⊥ rho)` for all PSD `rho`,
/// where `P^⊥` projects onto the complement of the maximal vacuum subspace.
/// Returns `f64::INFINITY` when the maximal vacuum subspace is everything.
pub fn interaction_lower_constant(cw: &ChannelWithVacuum) -> f64 {
    let v_t = maximal_vacuum_subspace(cw);
    if v_t.dim() == cw.dim() {
        return f64::INFINITY;
    }
    let theta = interaction_functional(cw);
    let comp = v_t.orthogonal_complement();
    let compressed = comp.basis().adjoint().mul(theta.theta()).mul(comp.basis());
    hermitian_eig(&compressed.symmetrize())
        .0
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
}

/// Matrix of a channel on row-major vectorized operators.
#[derive(Clone, Debug)]
pub struct SuperoperatorMatrix {
    pub dim_in: usize,
    pub dim_out: usize,
    pub mat: CMat,
}

impl SuperoperatorMatrix {
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        self.mat.mul_vec(v)
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        let out = self.mat.mul_vec(&rho.vec_flatten());
        CMat::unflatten(self.dim_out, self.dim_out, &out)
    }
}

pub fn superoperator_matrix(t: &QuantumChannel) -> SuperoperatorMatrix {
    SuperoperatorMatrix {
        dim_in: t.dim_in(),
        dim_out: t.dim_out(),
        mat: t.superoperator().clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhichChannel {
    A,
    B,
}

/// Outcome of the discriminability decision.
#[derive(Clone, Debug)]
pub struct DiscriminationDecision {
    pub feasible: bool,
    pub witness: Option<Subspace>,
    pub which_isometric: Option<WhichChannel>,
}

/// Decides whether two channels with the same vacuum can be discriminated in
/// an interaction-free manner. Only the two maximal vacuum subspaces need to
/// be examined: the pair is feasible iff the restrictions differ on one of
/// them.
pub fn decide_discriminability(
    cw_a: &ChannelWithVacuum,
    cw_b: &ChannelWithVacuum,
) -> Result<DiscriminationDecision> {
    decide_discriminability_with_tol(cw_a, cw_b, RESTRICTION_TOL)
}

/// [`decide_discriminability`] with a caller-chosen restriction-equality
/// tolerance.
pub fn decide_discriminability_with_tol(
    cw_a: &ChannelWithVacuum,
    cw_b: &ChannelWithVacuum,
    tol: f64,
) -> Result<DiscriminationDecision> {
    if cw_a.dim() != cw_b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channels act on dimensions {} and {}",
            cw_a.dim(),
            cw_b.dim()
        )));
    }
    let overlap = cw_a.vacuum().inner(cw_b.vacuum()).norm();
    if (overlap - 1.0).abs() > 1e-9 {
        return Err(Error::VacuumMismatch);
    }
    let v_a = maximal_vacuum_subspace(cw_a);
    if !restrictions_equal(cw_a.channel(), cw_b.channel(), &v_a, tol) {
        return Ok(DiscriminationDecision {
            feasible: true,
            witness: Some(v_a),
            which_isometric: Some(WhichChannel::A),
        });
    }
    let v_b = maximal_vacuum_subspace(cw_b);
    if !restrictions_equal(cw_a.channel(), cw_b.channel(), &v_b, tol) {
        return Ok(DiscriminationDecision {
            feasible: true,
            witness: Some(v_b),
            which_isometric: Some(WhichChannel::B),
        });
    }
    Ok(DiscriminationDecision {
        feasible: false,
        witness: None,
        which_isometric: None,
    })
}
