//! The no-go side: the proportionality constant built from joint Stinespring
//! dilations, the fidelity and information-interaction inequalities, the
//! Helstrom minimum error, and numerical audits of the no-go and rate-limit
//! theorems on concrete strategy instances.

use crate::channels::{
    build_t_down, decide_discriminability, interaction_lower_constant, maximal_vacuum_subspace,
    restriction_distance, ChannelWithVacuum, QuantumChannel,
};
use crate::error::{Error, Result};
use crate::linops::{
    complete_isometry_to_unitary, fidelity_root, hermitian_eig, matrix_sqrt_psd, partial_trace,
    trace_norm, CMat, Keep, Subspace, C64,
};
use crate::strategies::{DiscriminationStrategy, TwoValuedPOVM};

/// A subspace `V` together with mutually orthogonal parts summing to `V^⊥`.
#[derive(Clone, Debug)]
pub struct OrthogonalDecomposition {
    v_sub: Subspace,
    parts: Vec<Subspace>,
}

impl OrthogonalDecomposition {
    pub fn new(v_sub: Subspace, parts: Vec<Subspace>) -> Result<Self> {
        let d = v_sub.ambient_dim();
        let mut dim_sum = 0;
        let mut proj_sum = CMat::zeros(d, d);
        for (i, w) in parts.iter().enumerate() {
            if w.ambient_dim() != d {
                return Err(Error::BadDecomposition("ambient dimensions differ".into()));
            }
            dim_sum += w.dim();
            proj_sum = proj_sum.add(&w.projector());
            for other in parts.iter().skip(i + 1) {
                let overlap = w.projector().mul(&other.projector()).max_abs();
                if overlap > 1e-10 {
                    return Err(Error::BadDecomposition(format!(
                        "parts are not mutually orthogonal (overlap {:.3e})",
                        overlap
                    )));
                }
            }
        }
        if dim_sum != d - v_sub.dim() {
            return Err(Error::BadDecomposition(format!(
                "parts span dimension {}, complement has dimension {}",
                dim_sum,
                d - v_sub.dim()
            )));
        }
        let p_perp = CMat::identity(d).sub(&v_sub.projector());
        if proj_sum.sub(&p_perp).max_abs() > 1e-9 {
            return Err(Error::BadDecomposition(
                "parts do not sum to the complement".into(),
            ));
        }
        Ok(OrthogonalDecomposition { v_sub, parts })
    }

    /// The coarsest decomposition: a single part carrying all of `V^⊥`.
    pub fn complement_of(v_sub: &Subspace) -> Self {
        let comp = v_sub.orthogonal_complement();
        let parts = if comp.dim() == 0 { vec![] } else { vec![comp] };
        OrthogonalDecomposition {
            v_sub: v_sub.clone(),
            parts,
        }
    }

    pub fn v_sub(&self) -> &Subspace {
        &self.v_sub
    }

    pub fn parts(&self) -> &[Subspace] {
        &self.parts
    }
}

/// Outcome record of a single inequality audit. `holds` is `lhs <= rhs`
/// within a 1e-9 slack.
#[derive(Clone, Copy, Debug)]
pub struct NoGoAudit {
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    pub holds: bool,
}

impl NoGoAudit {
    pub fn new(lhs: f64, rhs: f64, constant_used: f64) -> Self {
        NoGoAudit {
            lhs,
            rhs,
            constant_used,
            holds: lhs <= rhs + 1e-9,
        }
    }
}

/// Dilation-with-projector of a trace non-increasing operation:
/// `T(·) = tr_E((P ⊗ 1) V · V^†)` with an isometry `V` and an environment
/// projector `P` that selects the operation's own Kraus block.
fn operation_dilation(op: &QuantumChannel) -> Result<(CMat, usize, usize)> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch("operation must be square".into()));
    }
    let d = op.dim_in();
    let mut kraus: Vec<CMat> = op.kraus().to_vec();
    let kept = kraus.len();
    let mut deficit = CMat::identity(d);
    for k in &kraus {
        deficit = deficit.sub(&k.adjoint().mul(k));
    }
    if deficit.max_abs() > 1e-12 {
        kraus.push(matrix_sqrt_psd(&deficit)?);
    }
    let env = kraus.len();
    let mut v = CMat::zeros(env * d, d);
    for (e, k) in kraus.iter().enumerate() {
        for a in 0..d {
            for b in 0..d {
                v[(e * d + a, b)] = k[(a, b)];
            }
        }
    }
    Ok((v, env, kept))
}

fn pad_env(v: &CMat, d: usize, env: usize, target_env: usize) -> CMat {
    if env == target_env {
        return v.clone();
    }
    let mut out = CMat::zeros(target_env * d, d);
    for r in 0..env * d {
        for c in 0..d {
            out[(r, c)] = v[(r, c)];
        }
    }
    out
}

fn env_projector(kept: usize, env: usize) -> CMat {
    let mut p = CMat::zeros(env, env);
    for i in 0..kept {
        p[(i, i)] = crate::linops::ONE;
    }
    p
}

/// Constructs the proportionality constant from the common-environment
/// dilation: both operations must be trace-preserving and equal on the
/// decomposition's subspace; the returned value is an upper bound on the
/// infimum and never exceeds 2.
pub fn c_vw_constant(
    t_a_down: &QuantumChannel,
    t_b_down: &QuantumChannel,
    decomp: &OrthogonalDecomposition,
) -> Result<f64> {
    let d = decomp.v_sub().ambient_dim();
    if t_a_down.dim_in() != d || t_b_down.dim_in() != d {
        return Err(Error::DimensionMismatch(
            "operations and decomposition disagree".into(),
        ));
    }
    let (va_raw, env_a, kept_a) = operation_dilation(t_a_down)?;
    let (vb_raw, env_b, kept_b) = operation_dilation(t_b_down)?;
    let env = env_a.max(env_b);
    let va = pad_env(&va_raw, d, env_a, env);
    let vb = pad_env(&vb_raw, d, env_b, env);
    let pa = env_projector(kept_a, env);
    let pb = env_projector(kept_b, env);

    let b = decomp.v_sub().basis();
    let k = decomp.v_sub().dim();

    // trace preservation on V: the environment projector acts trivially there
    for (v, p) in [(&va, &pa), (&vb, &pb)] {
        let vb_mat = v.mul(b);
        let projected = crate::linops::kron(p, &CMat::identity(d)).mul(&vb_mat);
        let resid = projected.sub(&vb_mat).max_abs();
        if resid > 1e-8 {
            return Err(Error::NotTracePreservingOnSubspace(resid));
        }
    }

    // equality of the restrictions, read off the dilation Grams
    let reshape = |v: &CMat| {
        // M[e, (h, j)] = (V B)[(e, h), j]
        let vb_mat = v.mul(b);
        CMat::from_fn(env, d * k, |e, hj| {
            let (h, j) = (hj / k, hj % k);
            vb_mat[(e * d + h, j)]
        })
    };
    let m_a = reshape(&va);
    let m_b = reshape(&vb);
    let gram_a = m_a.adjoint().mul(&m_a);
    let gram_b = m_b.adjoint().mul(&m_b);
    let diff = gram_a.sub(&gram_b).max_abs();
    if diff > 1e-8 {
        return Err(Error::RestrictionsDiffer(diff));
    }

    // unitary rotating one dilation onto the other on the subspace
    let (vals, vecs) = hermitian_eig(&gram_a.symmetrize());
    let smax = vals.last().copied().unwrap_or(0.0).max(1e-300);
    let mut qa_cols = Vec::new();
    let mut qb_cols = Vec::new();
    for (i, &lam) in vals.iter().enumerate() {
        if lam > 1e-12 * smax {
            let u = vecs.column(i);
            let scale = C64::new(1.0 / lam.sqrt(), 0.0);
            qa_cols.push(
                m_a.mul_vec(&u)
                    .iter()
                    .map(|z| z * scale)
                    .collect::<Vec<_>>(),
            );
            qb_cols.push(
                m_b.mul_vec(&u)
                    .iter()
                    .map(|z| z * scale)
                    .collect::<Vec<_>>(),
            );
        }
    }
    let w = if qa_cols.is_empty() {
        CMat::identity(env)
    } else {
        let qa = complete_isometry_to_unitary(&CMat::from_columns(env, &qa_cols))?;
        let qb = complete_isometry_to_unitary(&CMat::from_columns(env, &qb_cols))?;
        qb.mul(&qa.adjoint())
    };

    let w_big = crate::linops::kron(&w, &CMat::identity(d));
    let va_rot = w_big.mul(&va);
    let pa_rot = w.mul(&pa).mul(&w.adjoint());

    let mid = crate::linops::kron(&pa_rot.mul(&pb), &CMat::identity(d));
    let bracket = va_rot.adjoint().mul(&mid).mul(&vb).sub(&CMat::identity(d));

    let mut worst: f64 = 0.0;
    for part in decomp.parts() {
        if part.dim() == 0 {
            continue;
        }
        let pk = part.projector();
        worst = worst.max(pk.mul(&bracket).mul(&pk).op_norm());
    }
    Ok(worst)
}

fn check_psd(m: &CMat) -> Result<()> {
    let (vals, _) = hermitian_eig(&m.symmetrize());
    let scale = vals.iter().fold(1.0_f64, |a, &v| a.max(v.abs()));
    if vals.first().copied().unwrap_or(0.0) < -1e-9 * scale {
        return Err(Error::NotPositiveSemiDefinite { min_eig: vals[0] });
    }
    Ok(())
}

fn check_equal_tp_on_subspace(
    t_a_down: &QuantumChannel,
    t_b_down: &QuantumChannel,
    v_sub: &Subspace,
) -> Result<()> {
    let dist = restriction_distance(t_a_down, t_b_down, v_sub);
    if dist > 1e-8 {
        return Err(Error::RestrictionsDiffer(dist));
    }
    for i in 0..v_sub.dim() {
        let unit = v_sub.basis_ket(i).projector();
        let resid = (t_a_down.apply(&unit).trace().re - 1.0).abs();
        if resid > 1e-8 {
            return Err(Error::NotTracePreservingOnSubspace(resid));
        }
    }
    Ok(())
}

/// Audit of the fidelity inequality
/// `sqrtF(T_A↓ ρ, T_B↓ σ) >= sqrtF(ρ, σ) - 2 sqrtF(P^⊥ρP^⊥, P^⊥σP^⊥)`.
pub fn fidelity_gap_check(
    t_a_down: &QuantumChannel,
    t_b_down: &QuantumChannel,
    v_sub: &Subspace,
    rho: &CMat,
    sigma: &CMat,
) -> Result<NoGoAudit> {
    check_equal_tp_on_subspace(t_a_down, t_b_down, v_sub)?;
    check_psd(rho)?;
    check_psd(sigma)?;
    let p_perp = CMat::identity(v_sub.ambient_dim()).sub(&v_sub.projector());
    let rho_perp = p_perp.mul(rho).mul(&p_perp);
    let sigma_perp = p_perp.mul(sigma).mul(&p_perp);
    let lhs = fidelity_root(rho, sigma)? - 2.0 * fidelity_root(&rho_perp, &sigma_perp)?;
    let rhs = fidelity_root(&t_a_down.apply(rho), &t_b_down.apply(sigma))?;
    Ok(NoGoAudit::new(lhs, rhs, 2.0))
}

/// Audit of the single-use information-interaction tradeoff
/// `sqrtF(ρ,σ) - sqrtF(T_A↓ρ, T_B↓σ) <= C Σ_k sqrt(tr(P_k ρ) tr(P_k σ))`.
pub fn information_tradeoff_check(
    t_a_down: &QuantumChannel,
    t_b_down: &QuantumChannel,
    decomp: &OrthogonalDecomposition,
    rho: &CMat,
    sigma: &CMat,
) -> Result<NoGoAudit> {
    check_equal_tp_on_subspace(t_a_down, t_b_down, decomp.v_sub())?;
    check_psd(rho)?;
    check_psd(sigma)?;
    let c = c_vw_constant(t_a_down, t_b_down, decomp)?;
    let lhs =
        fidelity_root(rho, sigma)? - fidelity_root(&t_a_down.apply(rho), &t_b_down.apply(sigma))?;
    let mut rhs = 0.0;
    for part in decomp.parts() {
        let pk = part.projector();
        rhs += (pk.hs_inner(rho).re.max(0.0) * pk.hs_inner(sigma).re.max(0.0)).sqrt();
    }
    Ok(NoGoAudit::new(lhs, c * rhs, c))
}

/// Minimum two-hypothesis error `1/2 (1 - ||ρ_A - ρ_B||_1 / 2)`.
pub fn helstrom_error(rho_a: &CMat, rho_b: &CMat) -> f64 {
    0.5 * (1.0 - 0.5 * trace_norm(&rho_a.sub(rho_b)))
}

/// Constants entering the no-go and rate-limit bounds for one channel pair.
#[derive(Clone, Copy, Debug)]
pub struct PairConstants {
    pub c_vw: f64,
    pub c_ta: f64,
    pub c_tb: f64,
}

fn strategy_quantities(
    cw_a: &ChannelWithVacuum,
    cw_b: &ChannelWithVacuum,
    d: &DiscriminationStrategy,
    povm: &TwoValuedPOVM,
) -> Result<(f64, f64, f64)> {
    let p_e = d.error_probability_pair(povm, cw_a.channel(), cw_b.channel())?;
    let p_ia = d.interaction_probability(cw_a)?;
    let p_ib = d.interaction_probability(cw_b)?;
    Ok((p_e, p_ia, p_ib))
}

/// Audit of the no-go inequality
/// `(1 - 2 P_e)^2 <= C sqrt(P_I^{T_A} P_I^{T_B})` with
/// `C = 2 C_{V,W} / sqrt(C_{T_A} C_{T_B})` assembled from the coarsest
/// decomposition `W = {V^⊥}`. Errors if the pair is discriminable.
pub fn nogo_inequality_audit(
    cw_a: &ChannelWithVacuum,
    cw_b: &ChannelWithVacuum,
    d: &DiscriminationStrategy,
    povm: &TwoValuedPOVM,
) -> Result<NoGoAudit> {
    let decision = decide_discriminability(cw_a, cw_b)?;
    if decision.feasible {
        return Err(Error::FeasiblePairSupplied);
    }
    let v_sub = maximal_vacuum_subspace(cw_a);
    let decomp = OrthogonalDecomposition::complement_of(&v_sub);
    let c_vw = c_vw_constant(&build_t_down(cw_a), &build_t_down(cw_b), &decomp)?;
    let c_ta = interaction_lower_constant(cw_a);
    let c_tb = interaction_lower_constant(cw_b);
    let constant = 2.0 * c_vw / (c_ta * c_tb).sqrt();
    let (p_e, p_ia, p_ib) = strategy_quantities(cw_a, cw_b, d, povm)?;
    let lhs = (1.0 - 2.0 * p_e).powi(2);
    let rhs = constant * (p_ia * p_ib).sqrt();
    Ok(NoGoAudit::new(lhs, rhs, constant))
}

/// Audit of the master fidelity bound behind the no-go theorem:
/// `1 - sqrtF(ρ_N^{T_A}, ρ_N^{T_B}) <= C_{V,W} Σ_{n,k} sqrt(...)` with the
/// undetected-branch intermediate states on the right-hand side.
pub fn technical_bound_audit(
    cw_a: &ChannelWithVacuum,
    cw_b: &ChannelWithVacuum,
    d: &DiscriminationStrategy,
) -> Result<NoGoAudit> {
    let decision = decide_discriminability(cw_a, cw_b)?;
    if decision.feasible {
        return Err(Error::FeasiblePairSupplied);
    }
    let v_sub = maximal_vacuum_subspace(cw_a);
    let decomp = OrthogonalDecomposition::complement_of(&v_sub);
    let down_a = build_t_down(cw_a);
    let down_b = build_t_down(cw_b);
    let c_vw = c_vw_constant(&down_a, &down_b, &decomp)?;

    let rho_n = d.final_state(cw_a.channel())?;
    let sigma_n = d.final_state(cw_b.channel())?;
    let lhs = 1.0 - fidelity_root(&rho_n, &sigma_n)?;

    let states_a = d.run_intermediate_states(&down_a)?;
    let states_b = d.run_intermediate_states(&down_b)?;
    let mut rhs = 0.0;
    for n in 0..d.steps() {
        let ra = partial_trace(&states_a[n], d.sys_dim(), d.anc_dim(), Keep::First)?;
        let rb = partial_trace(&states_b[n], d.sys_dim(), d.anc_dim(), Keep::First)?;
        for part in decomp.parts() {
            let pk = part.projector();
            rhs += (pk.hs_inner(&ra).re.max(0.0) * pk.hs_inner(&rb).re.max(0.0)).sqrt();
        }
    }
    Ok(NoGoAudit::new(lhs, c_vw * rhs, c_vw))
}

/// Audit of the rate-limit inequality
/// `max(P_I^{T_A}, P_I^{T_B}) >= C (1 - 2 P_e)^4 / N` with the three-part
/// decomposition `W_1 = V^⊥ ∩ V_{T_A}`, `W_2 = V^⊥ ∩ V_{T_B}`, `W_3` the
/// rest, and `C = min(C_{T_A}, C_{T_B}) / (24 C_{V,W}^2)`. The record stores
/// the bound as `lhs` and the achieved maximum as `rhs`.
pub fn rate_limit_audit(
    cw_a: &ChannelWithVacuum,
    cw_b: &ChannelWithVacuum,
    d: &DiscriminationStrategy,
    povm: &TwoValuedPOVM,
) -> Result<NoGoAudit> {
    let v_a = maximal_vacuum_subspace(cw_a);
    let v_b = maximal_vacuum_subspace(cw_b);
    let v_sub = v_a.intersect(&v_b);
    let dist = restriction_distance(cw_a.channel(), cw_b.channel(), &v_sub);
    if dist > 1e-8 {
        return Err(Error::RateLimitHypothesis(format!(
            "restrictions differ on the intersection subspace (residual {:.3e})",
            dist
        )));
    }
    let p_perp = CMat::identity(cw_a.dim()).sub(&v_sub.projector());
    let w1 = project_intersection(&p_perp, &v_a);
    let w2 = project_intersection(&p_perp, &v_b);
    let ortho = w1.projector().mul(&w2.projector()).max_abs();
    if ortho > 1e-9 {
        return Err(Error::RateLimitHypothesis(format!(
            "the two relative complements are not orthogonal (overlap {:.3e})",
            ortho
        )));
    }
    let rest_proj = p_perp.sub(&w1.projector()).sub(&w2.projector());
    let w3 = Subspace::from_span(&crate::linops::support_projection(&rest_proj, 0.5), 1e-9);
    let mut parts = Vec::new();
    for w in [w1, w2, w3] {
        if w.dim() > 0 {
            parts.push(w);
        }
    }
    let decomp = OrthogonalDecomposition::new(v_sub, parts)?;
    let c_vw = c_vw_constant(&build_t_down(cw_a), &build_t_down(cw_b), &decomp)?;
    let c_ta = interaction_lower_constant(cw_a);
    let c_tb = interaction_lower_constant(cw_b);

    let (p_e, p_ia, p_ib) = strategy_quantities(cw_a, cw_b, d, povm)?;
    let margin = (1.0 - 2.0 * p_e).max(0.0).powi(4);
    let n = d.steps().max(1) as f64;
    let lhs = if margin < 1e-60 {
        0.0
    } else {
        c_ta.min(c_tb) / (24.0 * c_vw * c_vw) * margin / n
    };
    let constant = c_ta.min(c_tb) / (24.0 * c_vw * c_vw);
    Ok(NoGoAudit::new(lhs, p_ia.max(p_ib), constant))
}

/// `V^⊥ ∩ U` via the kernel of the sum of the complementary projectors.
fn project_intersection(p_perp: &CMat, u: &Subspace) -> Subspace {
    let d = p_perp.rows();
    let q = CMat::identity(d)
        .sub(p_perp)
        .add(&CMat::identity(d).sub(&u.projector()));
    let (vals, vecs) = hermitian_eig(&q);
    let mut cols = Vec::new();
    for (j, &lam) in vals.iter().enumerate() {
        if lam < 1e-9 {
            cols.push(vecs.column(j));
        }
    }
    if cols.is_empty() {
        return Subspace::zero(d);
    }
    Subspace::from_span(&CMat::from_columns(d, &cols), 1e-9)
}
