//! A validated run configuration and everything built from it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FqConfig;
use crate::place::PlaceCtx;
use crate::polylog::PolylogSet;
use crate::series::LocalSeries;
use crate::zeta::ZetaEvaluator;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub p: u64,
    pub upsilon: u32,
    /// Monic, packed `F_q` coefficients, constant term first.
    pub pi: Vec<u64>,
    /// Requested absolute precision `N` of reported values.
    pub precision: i64,
    pub i_max: usize,
    pub n_max: usize,
    /// Root index for `c_1, ..., c_delta`; missing entries mean 0.
    pub branch: Vec<usize>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 2,
            upsilon: 1,
            pi: vec![0, 1],
            precision: 64,
            i_max: 14,
            n_max: 6,
            branch: Vec::new(),
            seed: 0x5eed,
        }
    }
}

impl RunConfig {
    pub fn fq(&self) -> Result<FqConfig> {
        FqConfig::new(self.p, self.upsilon)
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.upsilon)
    }

    /// Extra digits carried internally so that `N` digits survive the
    /// divisions by `L_i` and `[i]`.
    pub fn guard(&self) -> i64 {
        let q = self.q().max(2) as i64;
        let mut log = 0;
        let mut acc = 1i64;
        while acc < self.precision {
            acc = acc.saturating_mul(q);
            log += 1;
        }
        4 * self.n_max as i64 + 2 * log + 8
    }

    pub fn working_precision(&self) -> i64 {
        self.precision + self.guard()
    }

    pub fn validate(&self) -> Result<()> {
        self.fq()?;
        if self.precision < 4 {
            return Err(Error::InvalidArgument(format!("precision {} < 4", self.precision)));
        }
        if self.i_max < 1 || self.n_max < 1 {
            return Err(Error::InvalidArgument("i_max and n_max must be at least 1".into()));
        }
        let delta = self.pi.len().saturating_sub(1);
        if self.branch.len() > delta {
            return Err(Error::InvalidArgument(format!(
                "branch has {} entries but deg pi = {delta}",
                self.branch.len()
            )));
        }
        if let Some((step, &index)) = self.branch.iter().enumerate().find(|(_, &b)| b as u64 >= self.q()) {
            return Err(Error::BranchOutOfRange { step: step + 1, index, count: self.q() as usize });
        }
        Ok(())
    }
}

/// Place, polylogarithms and (for `pi = x`) the zeta evaluator of one run.
pub struct Session {
    config: RunConfig,
    place: Arc<PlaceCtx>,
    polylogs: Arc<PolylogSet>,
    zeta: Option<ZetaEvaluator>,
}

impl Session {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let place = Arc::new(PlaceCtx::new(config.fq()?, config.pi.clone(), config.working_precision())?);
        let polylogs = Arc::new(PolylogSet::build(place.clone(), &config.branch, config.i_max, config.n_max)?);
        let zeta = if place.is_pi_x() { Some(ZetaEvaluator::new(polylogs.clone())?) } else { None };
        Ok(Session { config, place, polylogs, zeta })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn place(&self) -> &Arc<PlaceCtx> {
        &self.place
    }

    pub fn polylogs(&self) -> &Arc<PolylogSet> {
        &self.polylogs
    }

    pub fn zeta(&self) -> Result<&ZetaEvaluator> {
        self.zeta.as_ref().ok_or(Error::RequiresPiX)
    }

    /// Requested precision `N`.
    pub fn precision(&self) -> i64 {
        self.config.precision
    }

    /// `s` as reported: truncated to `N`.
    pub fn report(&self, s: &LocalSeries) -> LocalSeries {
        s.truncate_to(self.config.precision)
    }
}
