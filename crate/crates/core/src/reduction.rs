//! Twirling over the group `{1 ⊕ U}` and the reduction superchannel that
//! collapses a channel-discrimination problem to a qubit: the reduction maps
//! the reference channel (and everything that agrees with it on the
//! protected subspace) to the identity, and every other channel to a qubit
//! channel whose unique fixed state is `|q_0><q_0|`.
//!
//! The twirl is evaluated exactly by projecting onto the commutant (spanned
//! by seven fixed operators, six when the space is a qubit) via a Gram
//! solve in superoperator space. Haar Monte-Carlo averaging is provided as
//! an independent oracle only. For the pre/post realization of the
//! superchannel the Haar integral is replaced by an exact finite averaging
//! set (a phase cycle for a 1-dimensional unitary block, the single-qubit
//! Clifford group for a 2-dimensional one).

use crate::channels::{from_choi, isometric_restriction, QuantumChannel, TransmissionFunctional};
use crate::error::{Error, Result};
use crate::linops::{
    complete_isometry_to_unitary, hermitian_eig, inverse, kron, orthogonal_completion_vector, CMat,
    Ket, Subspace, C64, ONE, ZERO,
};
use rand::Rng;

/// The twirl group `{1_{span v} ⊕ U}` on a space of the given dimension.
#[derive(Clone, Debug)]
pub struct TwirlGroupSpec {
    dim: usize,
    vacuum: Ket,
}

impl TwirlGroupSpec {
    pub fn new(dim: usize, vacuum: Ket) -> Result<Self> {
        if dim < 2 {
            return Err(Error::TwirlDimensionTooSmall(dim));
        }
        if vacuum.dim() != dim {
            return Err(Error::DimensionMismatch(
                "twirl vacuum dimension mismatch".into(),
            ));
        }
        let n = vacuum.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitVector(n));
        }
        Ok(TwirlGroupSpec { dim, vacuum })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vacuum(&self) -> &Ket {
        &self.vacuum
    }

    /// Orthonormal basis of the complement of the vacuum line.
    fn perp_basis(&self) -> CMat {
        let u = complete_isometry_to_unitary(&self.vacuum.as_column())
            .expect("unit vector extends to a unitary");
        CMat::from_fn(self.dim, self.dim - 1, |i, j| u[(i, j + 1)])
    }

    /// Embeds a unitary on the complement block into the full space.
    pub fn embed_block_unitary(&self, u_block: &CMat) -> CMat {
        let b = self.perp_basis();
        self.vacuum
            .projector()
            .add(&b.mul(u_block).mul(&b.adjoint()))
    }

    /// Haar-random group element `1 ⊕ U`.
    pub fn random_element(&self, rng: &mut impl Rng) -> CMat {
        self.embed_block_unitary(&crate::random::haar_unitary(self.dim - 1, rng))
    }
}

/// Superoperators spanning the commutant of the twirl group action. Seven
/// operators in general; the last one vanishes identically on a qubit.
fn commutant_span(spec: &TwirlGroupSpec) -> Vec<CMat> {
    let d = spec.dim;
    let p = spec.vacuum.projector();
    let p_perp = CMat::identity(d).sub(&p);
    let p_perp_scaled = p_perp.scale(C64::new(1.0 / (d as f64 - 1.0), 0.0));
    let vec_outer = |left: &CMat, right: &CMat| {
        // superoperator of X -> tr(right X) left
        let l = left.vec_flatten();
        let r = right.vec_flatten();
        CMat::from_fn(d * d, d * d, |i, j| l[i] * r[j].conj())
    };
    let mut ops = vec![
        vec_outer(&p, &p),
        vec_outer(&p, &p_perp),
        vec_outer(&p_perp_scaled, &p),
        vec_outer(&p_perp_scaled, &p_perp),
        kron(&p_perp, &p.transpose()),
        kron(&p, &p_perp.transpose()),
    ];
    if d >= 3 {
        let sandwich = kron(&p_perp, &p_perp.transpose());
        ops.push(sandwich.sub(&vec_outer(&p_perp_scaled, &p_perp)));
    }
    ops
}

fn reshuffle_superop_to_choi(s: &CMat, d: usize) -> CMat {
    CMat::from_fn(d * d, d * d, |row, col| {
        let (a, i) = (row / d, row % d);
        let (b, j) = (col / d, col % d);
        s[(a * d + b, i * d + j)]
    })
}

/// Exact twirl `S(T) = ∫ U_g T U_g^{-1} dμ_G`, computed by orthogonal
/// projection of the superoperator onto the commutant span via a Gram solve.
pub fn twirl_channel(t: &QuantumChannel, spec: &TwirlGroupSpec) -> Result<QuantumChannel> {
    let s = twirl_superoperator(t.superoperator(), spec)?;
    let choi = reshuffle_superop_to_choi(&s, spec.dim);
    from_choi(&choi, spec.dim, spec.dim)
}

/// The same projection at the superoperator level; usable for maps that are
/// not channels (test oracles compare raw matrices).
pub fn twirl_superoperator(superop: &CMat, spec: &TwirlGroupSpec) -> Result<CMat> {
    let d = spec.dim;
    if superop.rows() != d * d || superop.cols() != d * d {
        return Err(Error::DimensionMismatch(
            "superoperator has the wrong shape".into(),
        ));
    }
    let ops = commutant_span(spec);
    let m = ops.len();
    let mut gram = CMat::zeros(m, m);
    let mut rhs = vec![ZERO; m];
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = ops[i].hs_inner(&ops[j]);
        }
        rhs[i] = ops[i].hs_inner(superop);
    }
    let gram_inv = inverse(&gram).map_err(|_| Error::GramSystemSingular)?;
    let coeffs = gram_inv.mul_vec(&rhs);
    let mut out = CMat::zeros(d * d, d * d);
    for (c, op) in coeffs.iter().zip(&ops) {
        out = out.add(&op.scale(*c));
    }
    Ok(out)
}

/// Twirled functional: `∫ t ∘ U_g^{-1} dμ = t(P^⊥/(d-1)) tr(P^⊥ ·) + t(|v><v|) tr(|v><v| ·)`.
pub fn twirl_functional(
    tf: &TransmissionFunctional,
    spec: &TwirlGroupSpec,
) -> Result<TransmissionFunctional> {
    if tf.dim() != spec.dim {
        return Err(Error::DimensionMismatch(
            "functional dimension mismatch".into(),
        ));
    }
    let d = spec.dim as f64;
    let p = spec.vacuum.projector();
    let p_perp = CMat::identity(spec.dim).sub(&p);
    let c_perp = tf.eval(&p_perp.scale(C64::new(1.0 / (d - 1.0), 0.0)));
    let c_v = tf.eval(&p);
    let theta = p_perp
        .scale(C64::new(c_perp, 0.0))
        .add(&p.scale(C64::new(c_v, 0.0)));
    TransmissionFunctional::new(theta)
}

/// Monte-Carlo Haar average of the conjugated superoperator; test oracle for
/// the exact projection.
pub fn haar_twirl_superoperator(
    t: &QuantumChannel,
    spec: &TwirlGroupSpec,
    samples: usize,
    rng: &mut impl Rng,
) -> CMat {
    let d = spec.dim;
    let mut acc = CMat::zeros(d * d, d * d);
    for _ in 0..samples {
        let g = spec.random_element(rng);
        let conj = kron(&g, &g.conj());
        let conj_inv = kron(&g.adjoint(), &g.transpose());
        acc = acc.add(&conj.mul(t.superoperator()).mul(&conj_inv));
    }
    acc.scale(C64::new(1.0 / samples as f64, 0.0))
}

/// Exact finite averaging set for a unitary block of the given dimension:
/// a fourth-root phase cycle for dimension 1, the single-qubit Clifford
/// group with a fourth-root phase cycle for dimension 2.
pub fn twirl_design(block_dim: usize) -> Result<Vec<CMat>> {
    match block_dim {
        0 => Ok(vec![]),
        1 => Ok((0..4)
            .map(|k| {
                let phi = std::f64::consts::FRAC_PI_2 * k as f64;
                CMat::new(1, 1, vec![C64::new(phi.cos(), phi.sin())]).unwrap()
            })
            .collect()),
        2 => {
            let cliffords = qubit_clifford_group();
            let mut out = Vec::with_capacity(4 * cliffords.len());
            for k in 0..4 {
                let phi = std::f64::consts::FRAC_PI_2 * k as f64;
                let phase = C64::new(phi.cos(), phi.sin());
                for c in &cliffords {
                    out.push(c.scale(phase));
                }
            }
            Ok(out)
        }
        _ => Err(Error::TwirlDesignUnavailable(block_dim)),
    }
}

/// The 24 single-qubit Clifford unitaries modulo phase, generated by closure
/// from the Hadamard and phase gates.
fn qubit_clifford_group() -> Vec<CMat> {
    let inv_sqrt2 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let h = CMat::new(2, 2, vec![inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2]).unwrap();
    let s = CMat::new(2, 2, vec![ONE, ZERO, ZERO, crate::linops::I]).unwrap();
    let same_up_to_phase = |a: &CMat, b: &CMat| {
        // |tr(a^† b)| = 2 iff a and b agree up to a global phase
        (a.adjoint().mul(b).trace().norm() - 2.0).abs() < 1e-9
    };
    let mut group = vec![CMat::identity(2)];
    let mut frontier = vec![CMat::identity(2)];
    while let Some(g) = frontier.pop() {
        for gen in [&h, &s] {
            let cand = gen.mul(&g);
            if !group.iter().any(|u| same_up_to_phase(u, &cand)) {
                group.push(cand.clone());
                frontier.push(cand);
            }
        }
    }
    assert_eq!(group.len(), 24, "single-qubit Clifford closure");
    group
}

/// Pre/post realization of a channel transformation `T -> post ∘ (T ⊗ id) ∘ pre`.
/// For the reduction superchannel the exact twirl data is carried alongside
/// so that [`apply_superchannel`] can evaluate the group integral via
/// [`twirl_channel`] instead of the folded averaging set.
#[derive(Clone, Debug)]
pub struct Superchannel {
    pub in_dim: usize,
    pub sys_dim: usize,
    pub anc_dim: usize,
    pub pre: QuantumChannel,
    pub post: QuantumChannel,
    reduction: Option<ReductionCore>,
}

#[derive(Clone, Debug)]
struct ReductionCore {
    subspace: Subspace,
    vacuum_coords: Ket,
    extension: CMat,
    w_iso: CMat,
}

impl Superchannel {
    /// Plain superchannel from a pre/post channel pair.
    pub fn from_pre_post(
        in_dim: usize,
        sys_dim: usize,
        anc_dim: usize,
        pre: QuantumChannel,
        post: QuantumChannel,
    ) -> Result<Self> {
        if pre.dim_in() != in_dim
            || pre.dim_out() != sys_dim * anc_dim
            || post.dim_in() != sys_dim * anc_dim
            || post.dim_out() != in_dim
        {
            return Err(Error::DimensionMismatch(
                "pre/post channel shapes are inconsistent".into(),
            ));
        }
        if !pre.is_trace_preserving() || !post.is_trace_preserving() {
            return Err(Error::ChannelRequired);
        }
        Ok(Superchannel {
            in_dim,
            sys_dim,
            anc_dim,
            pre,
            post,
            reduction: None,
        })
    }

    pub fn is_reduction(&self) -> bool {
        self.reduction.is_some()
    }
}

/// Builds the reduction superchannel for a reference channel that is
/// isometric on `v_sub` (with the vacuum inside it), using the deterministic
/// unitary extension of the restriction isometry.
pub fn build_reduction(
    t_ref: &QuantumChannel,
    v_sub: &Subspace,
    vacuum: &Ket,
) -> Result<Superchannel> {
    let iso = isometric_restriction(t_ref, v_sub).ok_or(Error::NotIsometricOnSubspace)?;
    let u_b = complete_isometry_to_unitary(v_sub.basis())?;
    let u_w = complete_isometry_to_unitary(&iso)?;
    let extension = u_w.mul(&u_b.adjoint());
    build_reduction_with_extension(t_ref, v_sub, vacuum, &extension)
}

/// Same construction with a caller-supplied unitary extension of the
/// restriction isometry; the result is extension-independent, which tests
/// verify with a second random completion.
pub fn build_reduction_with_extension(
    t_ref: &QuantumChannel,
    v_sub: &Subspace,
    vacuum: &Ket,
    extension: &CMat,
) -> Result<Superchannel> {
    let d = v_sub.ambient_dim();
    let k = v_sub.dim();
    if !t_ref.is_square() || t_ref.dim_in() != d {
        return Err(Error::DimensionMismatch(
            "reference channel and subspace mismatch".into(),
        ));
    }
    if !v_sub.contains(vacuum, 1e-9) {
        return Err(Error::VacuumOutsideSubspace);
    }
    let resid = extension
        .adjoint()
        .mul(extension)
        .sub(&CMat::identity(d))
        .max_abs();
    if resid > 1e-9 {
        return Err(Error::NotOrthonormal(resid));
    }
    // the inverted extension must undo the reference channel on the subspace
    let b = v_sub.basis();
    for i in 0..k {
        for j in 0..k {
            let unit = v_sub.basis_ket(i).outer(&v_sub.basis_ket(j));
            let back = extension.adjoint().mul(&t_ref.apply(&unit)).mul(extension);
            let compressed = b.adjoint().mul(&back).mul(b);
            let want = CMat::from_fn(k, k, |a, c| if (a, c) == (i, j) { ONE } else { ZERO });
            if compressed.sub(&want).max_abs() > 1e-8 {
                return Err(Error::NotIsometricOnSubspace);
            }
        }
    }

    let vacuum_coords = Ket::from_vec(b.adjoint().mul_vec(vacuum.amps())).normalized();
    if k == 1 {
        return build_dim_one(d, vacuum, extension);
    }

    // subspace-coordinate objects
    let psi = orthogonal_completion_vector(&vacuum_coords);
    let phi = vacuum_coords
        .add(&psi)
        .scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    // W: |q_0> -> v (x) a_0, |q_1> -> phi (x) a_1 on C^k (x) C^2
    let mut w_iso = CMat::zeros(2 * k, 2);
    for j in 0..k {
        w_iso[(2 * j, 0)] = vacuum_coords.amps()[j];
        w_iso[(2 * j + 1, 1)] = phi.amps()[j];
    }

    let spec = TwirlGroupSpec::new(k, vacuum_coords.clone())?;
    let design: Vec<CMat> = twirl_design(k - 1)?
        .iter()
        .map(|u| spec.embed_block_unitary(u))
        .collect();
    let m = design.len();
    let anc_dim = 2 * m;
    let weight = C64::new(1.0 / (m as f64).sqrt(), 0.0);

    // pre Kraus, one per group element: embed ∘ g^† on the subspace factor,
    // the element index written into the design register
    let mut pre_kraus = Vec::with_capacity(m);
    for (gi, g) in design.iter().enumerate() {
        let map = b.mul(&g.adjoint()); // d x k
        let mut kk = CMat::zeros(d * anc_dim, 2);
        for q in 0..2 {
            for j in 0..k {
                for a in 0..2 {
                    let wv = w_iso[(2 * j + a, q)];
                    if wv == ZERO {
                        continue;
                    }
                    for ih in 0..d {
                        // ancilla index = design register (x) protocol qubit
                        let row = ih * anc_dim + gi * 2 + a;
                        kk[(row, q)] += weight * map[(ih, j)] * wv;
                    }
                }
            }
        }
        pre_kraus.push(kk);
    }
    let pre = QuantumChannel::new(2, d * anc_dim, pre_kraus)?;

    // post Kraus: g ∘ compress-to-subspace ∘ extension^† on the system,
    // matching design index, then the W-compression to the qubit
    let compress = subspace_compress_kraus(v_sub, &vacuum_coords); // k x d each
    let w_comp = iso_compress_kraus(&w_iso, 2 * k); // 2 x 2k each
    let mut post_kraus = Vec::new();
    for (gi, g) in design.iter().enumerate() {
        for f in &compress {
            let sys = g.mul(f).mul(&extension.adjoint()); // k x d
            for l in &w_comp {
                let mut kk = CMat::zeros(2, d * anc_dim);
                for q in 0..2 {
                    for ih in 0..d {
                        for a in 0..2 {
                            let mut acc = ZERO;
                            for j in 0..k {
                                acc += l[(q, 2 * j + a)] * sys[(j, ih)];
                            }
                            if acc != ZERO {
                                kk[(q, ih * anc_dim + gi * 2 + a)] = acc;
                            }
                        }
                    }
                }
                post_kraus.push(kk);
            }
        }
    }
    let post = QuantumChannel::new(d * anc_dim, 2, post_kraus)?;

    Ok(Superchannel {
        in_dim: 2,
        sys_dim: d,
        anc_dim,
        pre,
        post,
        reduction: Some(ReductionCore {
            subspace: v_sub.clone(),
            vacuum_coords,
            extension: extension.clone(),
            w_iso,
        }),
    })
}

/// Kraus operators of the compression `B_1(H) -> B_1(V)`:
/// `X -> B^† X B + tr((1 - B B^†) X) |v><v|` in subspace coordinates.
fn subspace_compress_kraus(v_sub: &Subspace, vacuum_coords: &Ket) -> Vec<CMat> {
    let b = v_sub.basis();
    let mut kraus = vec![b.adjoint()];
    let comp = v_sub.orthogonal_complement();
    for l in 0..comp.dim() {
        let f = comp.basis_ket(l);
        kraus.push(vacuum_coords.outer(&f));
    }
    kraus
}

/// Kraus operators of `X -> W^† X W + tr((1 - W W^†) X) |q_0><q_0|`.
fn iso_compress_kraus(w_iso: &CMat, big: usize) -> Vec<CMat> {
    let mut kraus = vec![w_iso.adjoint()];
    let proj = CMat::identity(big).sub(&w_iso.mul(&w_iso.adjoint()));
    let (vals, vecs) = hermitian_eig(&proj);
    let q0 = Ket::basis(w_iso.cols(), 0);
    for (j, &lam) in vals.iter().enumerate() {
        if lam > 0.5 {
            kraus.push(q0.outer(&Ket::from_vec(vecs.column(j))));
        }
    }
    kraus
}

fn build_dim_one(d: usize, vacuum: &Ket, extension: &CMat) -> Result<Superchannel> {
    // W sends |q_i> to v (x) a_i on H (x) C^2; no twirl is needed on a line
    let mut w_amb = CMat::zeros(2 * d, 2);
    for i in 0..d {
        w_amb[(2 * i, 0)] = vacuum.amps()[i];
        w_amb[(2 * i + 1, 1)] = vacuum.amps()[i];
    }
    let pre = QuantumChannel::new(2, 2 * d, vec![w_amb.clone()])?;
    let v_dag_big = kron(&extension.adjoint(), &CMat::identity(2));
    let mut post_kraus = Vec::new();
    for l in iso_compress_kraus(&w_amb, 2 * d) {
        post_kraus.push(l.mul(&v_dag_big));
    }
    let post = QuantumChannel::new(2 * d, 2, post_kraus)?;
    Ok(Superchannel {
        in_dim: 2,
        sys_dim: d,
        anc_dim: 2,
        pre,
        post,
        reduction: None,
    })
}

/// Applies a superchannel to a trace-preserving probe. For the reduction
/// superchannel the twirl integral is evaluated exactly via
/// [`twirl_channel`], not through the folded averaging set; both routes
/// agree, which tests assert.
pub fn apply_superchannel(r: &Superchannel, t: &QuantumChannel) -> Result<QuantumChannel> {
    if !t.is_trace_preserving() {
        return Err(Error::ChannelRequired);
    }
    if !t.is_square() || t.dim_in() != r.sys_dim {
        return Err(Error::DimensionMismatch(format!(
            "probe acts on dimension {}, superchannel system is {}",
            t.dim_in(),
            r.sys_dim
        )));
    }
    let out = match &r.reduction {
        Some(core) => apply_reduction_exact(r, core, t)?,
        None => apply_via_pre_post(r, t)?,
    };
    if !out.is_trace_preserving() {
        return Err(Error::NotTracePreserving(f64::NAN));
    }
    Ok(out)
}

fn apply_reduction_exact(
    r: &Superchannel,
    core: &ReductionCore,
    t: &QuantumChannel,
) -> Result<QuantumChannel> {
    let d = r.sys_dim;
    let k = core.subspace.dim();
    let b = core.subspace.basis();
    let comp = core.subspace.orthogonal_complement();
    // compressed probe on subspace coordinates
    let mut m_kraus = Vec::new();
    for kr in t.kraus() {
        let trunk = core.extension.adjoint().mul(kr).mul(b); // d x k
        m_kraus.push(b.adjoint().mul(&trunk));
        for l in 0..comp.dim() {
            let f = comp.basis_ket(l);
            let row = CMat::from_fn(1, k, |_, j| {
                (0..d).map(|i| f.amps()[i].conj() * trunk[(i, j)]).sum()
            });
            m_kraus.push(core.vacuum_coords.as_column().mul(&row));
        }
    }
    let m = QuantumChannel::new(k, k, m_kraus)?;
    let spec = TwirlGroupSpec::new(k, core.vacuum_coords.clone())?;
    let twirled = twirl_channel(&m, &spec)?;
    // wrap with W and its compression
    let w_comp = iso_compress_kraus(&core.w_iso, 2 * k);
    let mut kraus = Vec::new();
    for lj in twirled.kraus() {
        let big = kron(lj, &CMat::identity(2));
        let right = big.mul(&core.w_iso);
        for l in &w_comp {
            kraus.push(l.mul(&right));
        }
    }
    Ok(QuantumChannel::new(2, 2, kraus)?.compressed())
}

/// Evaluates `post ∘ (T ⊗ id_anc) ∘ pre` directly from the pre/post Kraus
/// families, accumulating the Choi matrix of the result.
pub fn apply_via_pre_post(r: &Superchannel, t: &QuantumChannel) -> Result<QuantumChannel> {
    if !t.is_square() || t.dim_in() != r.sys_dim {
        return Err(Error::DimensionMismatch("probe dimension mismatch".into()));
    }
    let anc = r.anc_dim;
    let d = r.sys_dim;
    let q = r.in_dim;
    let mut choi = CMat::zeros(q * q, q * q);
    for kp in r.pre.kraus() {
        for kt in t.kraus() {
            // (K_t (x) 1_anc) · K_pre without materializing the big factor
            let mut mid = CMat::zeros(t.dim_out() * anc, q);
            for col in 0..q {
                for i in 0..d {
                    for x in 0..anc {
                        let v = kp[(i * anc + x, col)];
                        if v == ZERO {
                            continue;
                        }
                        for a in 0..t.dim_out() {
                            let w = kt[(a, i)];
                            if w != ZERO {
                                mid[(a * anc + x, col)] += w * v;
                            }
                        }
                    }
                }
            }
            for ko in r.post.kraus() {
                let z = ko.mul(&mid);
                if z.max_abs() == 0.0 {
                    continue;
                }
                let v = z.vec_flatten();
                for a in 0..q * q {
                    if v[a] == ZERO {
                        continue;
                    }
                    for bb in 0..q * q {
                        choi[(a, bb)] += v[a] * v[bb].conj();
                    }
                }
            }
        }
    }
    from_choi(&choi, q, q)
}

/// Pushes a transmission functional through the superchannel:
/// `t_{R(T)} = t ∘ tr_anc ∘ pre`, i.e. `Θ' = Σ_j K_j^† (Θ ⊗ 1_anc) K_j`
/// over the pre Kraus family.
pub fn transformed_transmission(
    r: &Superchannel,
    tf: &TransmissionFunctional,
) -> Result<TransmissionFunctional> {
    if tf.dim() != r.sys_dim {
        return Err(Error::DimensionMismatch(
            "functional dimension mismatch".into(),
        ));
    }
    let big = kron(tf.theta(), &CMat::identity(r.anc_dim));
    let mut theta = CMat::zeros(r.in_dim, r.in_dim);
    for k in r.pre.kraus() {
        theta = theta.add(&k.adjoint().mul(&big).mul(k));
    }
    TransmissionFunctional::new(theta)
}

/// Confirms, by the finite case analysis of the measure-and-prepare
/// obstruction, that no ancilla-free instrument scheme can map the identity
/// to the identity while giving the two-outcome projective channel a unique
/// `|q_0><q_0|` fixed point: every admissible branch is a unitary
/// conjugation, admissibility forces the conjugated projectors onto the
/// computational pair, and then the complementary projector stays fixed.
pub fn verify_no_classical_shortcut(dim: usize) -> Result<bool> {
    if dim != 2 {
        return Err(Error::Unsupported(
            "the obstruction certificate is a qubit statement".into(),
        ));
    }
    let p0 = Ket::basis(2, 0).projector();
    let p1 = Ket::basis(2, 1).projector();
    let pinch = crate::kwiat::pinching_channel(2);
    let mut rng = crate::random::seeded_rng(0x5c0f);
    let inv_sqrt2 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut branches: Vec<CMat> = vec![
        CMat::identity(2),
        CMat::new(2, 2, vec![inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2])?,
        CMat::new(2, 2, vec![ZERO, ONE, ONE, ZERO])?,
        CMat::new(2, 2, vec![ONE, ZERO, ZERO, crate::linops::I])?,
    ];
    for _ in 0..200 {
        branches.push(crate::random::haar_unitary(2, &mut rng));
    }
    for u in &branches {
        let q = u.adjoint().mul(&p0).mul(u);
        let aligned = q.sub(&p0).max_abs() < 1e-6 || q.sub(&p1).max_abs() < 1e-6;
        let composed = |x: &CMat| {
            u.adjoint()
                .mul(&pinch.apply(&u.mul(x).mul(&u.adjoint())))
                .mul(u)
        };
        if aligned {
            // admissible branch: the complementary projector must stay fixed
            if composed(&p1).sub(&p1).max_abs() > 1e-9 {
                return Ok(false);
            }
        } else {
            // inadmissible branch: it cannot keep |q_0><q_0| fixed
            if composed(&p0).sub(&p0).max_abs() < 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
