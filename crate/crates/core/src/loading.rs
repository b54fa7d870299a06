//! Storing patterns in a reservoir.
//!
//! Batch loading recomputes the recurrent weights `W̃` by ridge regression so
//! that the undriven network `tanh(W̃ x + b)` reproduces the driven update
//! `tanh(W x + W_in p + b)` on every stored state cloud, and fits a linear
//! readout `W_out` from states back to the driving signal.
//!
//! Incremental loading adds one pattern at a time. Only the components of the
//! new state cloud that fall in the free space `F = ¬A` (with `A` the OR of
//! all stored conceptors) are used as regressors, so earlier patterns keep
//! their dynamics without being revisited.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conceptor::{self, Conceptor, Correlation};
use crate::error::{Error, Result};
use crate::linalg;
use crate::pattern::Pattern;
use crate::reservoir::{Reservoir, StateCloud, DEFAULT_WASHOUT};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadParams {
    pub aperture: f64,
    pub ridge_w: f64,
    pub ridge_out: f64,
    pub washout: usize,
    /// Incremental loads are refused once the occupied quota reaches this.
    pub quota_limit: f64,
}

impl Default for LoadParams {
    fn default() -> Self {
        Self { aperture: 10.0, ridge_w: 1e-4, ridge_out: 1e-2, washout: DEFAULT_WASHOUT, quota_limit: 0.995 }
    }
}

impl LoadParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.aperture > 0.0 && self.aperture.is_finite()) {
            return Err(Error::InvalidParameter("aperture must be positive".into()));
        }
        if !(self.ridge_w > 0.0) {
            return Err(Error::InvalidParameter("ridge_w must be positive".into()));
        }
        if !(self.ridge_out > 0.0) {
            return Err(Error::InvalidParameter("ridge_out must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredPattern {
    pub name: String,
    pub conceptor: Conceptor,
    /// Components that were new relative to the occupied space at storage
    /// time (incremental loading only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub novelty: Option<Conceptor>,
}

/// A reservoir after storing patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadedNetwork {
    version: u32,
    base: Reservoir,
    #[serde(with = "crate::serde_mat")]
    w_loaded: DMatrix<f64>,
    #[serde(with = "crate::serde_mat")]
    w_out: DMatrix<f64>,
    stored: Vec<StoredPattern>,
    occupied: Conceptor,
    params: LoadParams,
}

#[derive(Debug, Clone)]
pub struct MemoryState {
    pub occupied: Conceptor,
    pub free: Conceptor,
    pub quota: f64,
}

fn concat_columns(mats: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = mats.first().map_or(0, |m| m.nrows());
    let cols = mats.iter().map(|m| m.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for m in mats {
        out.columns_mut(at, m.ncols()).copy_from(m);
        at += m.ncols();
    }
    out
}

fn check_pattern(res: &Reservoir, p: &Pattern, washout: usize) -> Result<()> {
    if p.dim() != res.input_dim() {
        return Err(Error::DimensionMismatch { expected: res.input_dim(), got: p.dim() });
    }
    if p.len() <= washout {
        return Err(Error::TooShort { len: p.len(), washout });
    }
    Ok(())
}

/// Batch-stores `patterns` in `res`.
pub fn load_patterns(res: &Reservoir, patterns: &[Pattern], params: &LoadParams) -> Result<LoadedNetwork> {
    params.validate()?;
    if patterns.is_empty() {
        return Ok(LoadedNetwork::empty(res.clone(), params.clone()));
    }
    for p in patterns {
        check_pattern(res, p, params.washout)?;
    }
    let clouds: Vec<StateCloud> = patterns
        .iter()
        .map(|p| res.drive(p, params.washout))
        .collect::<Result<_>>()?;
    let mut stored = Vec::with_capacity(patterns.len());
    for (p, cloud) in patterns.iter().zip(&clouds) {
        let c = Conceptor::from_correlation(&Correlation::from_cloud(cloud)?, params.aperture)?;
        stored.push(StoredPattern { name: p.name().to_string(), conceptor: c, novelty: None });
    }
    let prev = concat_columns(&clouds.iter().map(|c| &c.prev_states).collect::<Vec<_>>());
    let states = concat_columns(&clouds.iter().map(|c| &c.states).collect::<Vec<_>>());
    let inputs = concat_columns(&clouds.iter().map(|c| &c.inputs).collect::<Vec<_>>());
    let targets = res.w() * &prev + res.w_in() * &inputs;
    let w_loaded = linalg::ridge_regression(&prev, &targets, params.ridge_w)?;
    let w_out = linalg::ridge_regression(&states, &inputs, params.ridge_out)?;
    let occupied = conceptor::or_all(res.size(), stored.iter().map(|s| &s.conceptor))?;
    Ok(LoadedNetwork {
        version: FORMAT_VERSION,
        base: res.clone(),
        w_loaded,
        w_out,
        stored,
        occupied,
        params: params.clone(),
    })
}

impl LoadedNetwork {
    /// A network with nothing stored: `W̃ = W`, zero readout, zero occupied space.
    pub fn empty(res: Reservoir, params: LoadParams) -> Self {
        let n = res.size();
        Self {
            version: FORMAT_VERSION,
            w_loaded: res.w().clone(),
            w_out: DMatrix::zeros(res.input_dim(), n),
            stored: Vec::new(),
            occupied: Conceptor::zero(n),
            base: res,
            params,
        }
    }

    pub fn base(&self) -> &Reservoir {
        &self.base
    }

    pub fn size(&self) -> usize {
        self.base.size()
    }

    pub fn w_loaded(&self) -> &DMatrix<f64> {
        &self.w_loaded
    }

    pub fn w_out(&self) -> &DMatrix<f64> {
        &self.w_out
    }

    pub fn stored(&self) -> &[StoredPattern] {
        &self.stored
    }

    pub fn params(&self) -> &LoadParams {
        &self.params
    }

    pub fn conceptor(&self, name: &str) -> Result<&Conceptor> {
        self.stored
            .iter()
            .find(|s| s.name == name)
            .map(|s| &s.conceptor)
            .ok_or_else(|| Error::UnknownPattern(name.to_string()))
    }

    pub fn memory_state(&self) -> MemoryState {
        MemoryState {
            occupied: self.occupied.clone(),
            free: self.occupied.not(),
            quota: self.occupied.quota(),
        }
    }

    pub fn quota(&self) -> f64 {
        self.occupied.quota()
    }

    /// Stores one more pattern in the free space. Returns
    /// [`Error::MemoryExhausted`] when the occupied quota has reached the
    /// limit; the error carries the quota storing would have produced.
    pub fn incremental_load(&self, p: &Pattern) -> Result<LoadedNetwork> {
        self.params.validate()?;
        check_pattern(&self.base, p, self.params.washout)?;
        let cloud = self.base.drive(p, self.params.washout)?;
        let c = Conceptor::from_correlation(&Correlation::from_cloud(&cloud)?, self.params.aperture)?;
        let occupied = self.occupied.or(&c)?;
        let quota = self.occupied.quota();
        if quota >= self.params.quota_limit {
            return Err(Error::MemoryExhausted { quota, would_be: occupied.quota() });
        }
        let novelty = c.diff(&self.occupied)?;
        let free = self.occupied.not();

        let filtered_prev = free.matrix() * &cloud.prev_states;
        let targets = self.base.w() * &cloud.prev_states + self.base.w_in() * &cloud.inputs
            - &self.w_loaded * &cloud.prev_states;
        let delta_w = linalg::ridge_regression(&filtered_prev, &targets, self.params.ridge_w)?;

        let filtered_states = free.matrix() * &cloud.states;
        let out_residual = &cloud.inputs - &self.w_out * &cloud.states;
        let delta_out = linalg::ridge_regression(&filtered_states, &out_residual, self.params.ridge_out)?;

        let mut next = self.clone();
        next.w_loaded += delta_w * free.matrix();
        next.w_out += delta_out * free.matrix();
        next.stored.push(StoredPattern { name: p.name().to_string(), conceptor: c, novelty: Some(novelty) });
        next.occupied = occupied;
        Ok(next)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let net: LoadedNetwork = serde_json::from_str(text)?;
        if net.version != FORMAT_VERSION {
            return Err(Error::Version(net.version));
        }
        Ok(net)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn open(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
