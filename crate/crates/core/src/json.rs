//! Wire formats consumed and produced by the CLI. Complex numbers travel as
//! `[re, im]` pairs; matrices as row-major flat lists; every ingested object
//! is re-validated through the owning module's constructors so that a
//! malformed file fails with the name of the violated invariant.

use crate::channels::{ChannelWithVacuum, QuantumChannel};
use crate::error::{Error, Result};
use crate::linops::{CMat, Ket, Subspace, C64};
use crate::reduction::Superchannel;
use crate::strategies::DiscriminationStrategy;
use serde::{Deserialize, Serialize};

fn to_pairs(data: &[C64]) -> Vec<[f64; 2]> {
    data.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|p| C64::new(p[0], p[1])).collect()
}

/// Channel on disk: `{ "dim", "kraus": [flat row-major [re,im] lists],
/// "vacuum": optional [re,im] list }`. Rectangular channels (superchannel
/// legs) carry `dim_in`/`dim_out` instead of `dim`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_out: Option<usize>,
    pub kraus: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vacuum: Option<Vec<[f64; 2]>>,
}

impl ChannelJson {
    pub fn dims(&self) -> Result<(usize, usize)> {
        match (self.dim, self.dim_in, self.dim_out) {
            (Some(d), None, None) => Ok((d, d)),
            (None, Some(i), Some(o)) => Ok((i, o)),
            _ => Err(Error::DimensionMismatch(
                "channel JSON needs either dim or both dim_in and dim_out".into(),
            )),
        }
    }

    pub fn from_channel(t: &QuantumChannel) -> Self {
        let square = t.is_square();
        ChannelJson {
            dim: square.then_some(t.dim_in()),
            dim_in: (!square).then_some(t.dim_in()),
            dim_out: (!square).then_some(t.dim_out()),
            kraus: t.kraus().iter().map(|k| to_pairs(k.data())).collect(),
            vacuum: None,
        }
    }

    pub fn from_channel_with_vacuum(cw: &ChannelWithVacuum) -> Self {
        let mut out = Self::from_channel(cw.channel());
        out.vacuum = Some(to_pairs(cw.vacuum().amps()));
        out
    }

    /// Validated channel; trace-preserving unless `allow_operation`.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let (dim_in, dim_out) = self.dims()?;
        let kraus = self
            .kraus
            .iter()
            .map(|flat| CMat::new(dim_out, dim_in, from_pairs(flat)))
            .collect::<Result<Vec<_>>>()?;
        QuantumChannel::new(dim_in, dim_out, kraus)
    }

    pub fn vacuum_ket(&self) -> Result<Option<Ket>> {
        match &self.vacuum {
            None => Ok(None),
            Some(v) => Ok(Some(Ket::unit(from_pairs(v))?)),
        }
    }

    /// Channel plus vacuum, validated against the vacuum-purity invariant.
    pub fn to_channel_with_vacuum(&self) -> Result<ChannelWithVacuum> {
        let t = self.to_channel()?;
        let vacuum = self
            .vacuum_ket()?
            .ok_or_else(|| Error::DimensionMismatch("channel file carries no vacuum".into()))?;
        ChannelWithVacuum::new(t, vacuum)
    }
}

/// Hermitian matrix on disk (Hamiltonians): `{ "dim", "entries": row-major }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        MatrixJson {
            dim: m.rows(),
            entries: to_pairs(m.data()),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        CMat::new(self.dim, self.dim, from_pairs(&self.entries))
    }
}

/// Strategy on disk. The step channels act on the full system ⊗ ancilla
/// space; strategies with shape-changing first or last steps are an API-only
/// feature.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategyJson {
    pub sys_dim: usize,
    pub anc_dim: usize,
    pub steps: usize,
    pub initial_state: Vec<[f64; 2]>,
    pub lambdas: Vec<ChannelJson>,
}

impl StrategyJson {
    pub fn from_strategy(d: &DiscriminationStrategy) -> Self {
        StrategyJson {
            sys_dim: d.sys_dim(),
            anc_dim: d.anc_dim(),
            steps: d.steps(),
            initial_state: to_pairs(d.initial_state().data()),
            lambdas: d.lambdas().iter().map(ChannelJson::from_channel).collect(),
        }
    }

    pub fn to_strategy(&self) -> Result<DiscriminationStrategy> {
        if self.lambdas.len() != self.steps + 1 {
            return Err(Error::MalformedStrategy(format!(
                "{} steps need {} channels, file has {}",
                self.steps,
                self.steps + 1,
                self.lambdas.len()
            )));
        }
        let full = self.sys_dim * self.anc_dim;
        let initial = CMat::new(full, full, from_pairs(&self.initial_state))?;
        let lambdas = self
            .lambdas
            .iter()
            .map(|c| c.to_channel())
            .collect::<Result<Vec<_>>>()?;
        DiscriminationStrategy::new(self.sys_dim, self.anc_dim, initial, lambdas)
    }
}

/// Superchannel on disk: pre/post channel pair with the ancilla dimension.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuperchannelJson {
    pub in_dim: usize,
    pub sys_dim: usize,
    pub anc_dim: usize,
    pub pre: ChannelJson,
    pub post: ChannelJson,
}

impl SuperchannelJson {
    pub fn from_superchannel(r: &Superchannel) -> Self {
        SuperchannelJson {
            in_dim: r.in_dim,
            sys_dim: r.sys_dim,
            anc_dim: r.anc_dim,
            pre: ChannelJson::from_channel(&r.pre),
            post: ChannelJson::from_channel(&r.post),
        }
    }

    pub fn to_superchannel(&self) -> Result<Superchannel> {
        Superchannel::from_pre_post(
            self.in_dim,
            self.sys_dim,
            self.anc_dim,
            self.pre.to_channel()?,
            self.post.to_channel()?,
        )
    }
}

/// Subspace on disk: orthonormal basis columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<[f64; 2]>>,
}

impl SubspaceJson {
    pub fn from_subspace(s: &Subspace) -> Self {
        SubspaceJson {
            ambient_dim: s.ambient_dim(),
            basis: (0..s.dim())
                .map(|j| to_pairs(s.basis_ket(j).amps()))
                .collect(),
        }
    }

    pub fn to_subspace(&self) -> Result<Subspace> {
        let cols: Vec<Vec<C64>> = self.basis.iter().map(|c| from_pairs(c)).collect();
        for c in &cols {
            if c.len() != self.ambient_dim {
                return Err(Error::DimensionMismatch(
                    "subspace basis vector has the wrong length".into(),
                ));
            }
        }
        Subspace::new(
            self.ambient_dim,
            CMat::from_columns(self.ambient_dim, &cols),
        )
    }
}
