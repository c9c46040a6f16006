use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::sync::Arc;

use g2hyp::cache::Cache;
use g2hyp::chars::{AddChar, CharTable, GaussTable};
use g2hyp::dft::DEFAULT_DIRECT_THRESHOLD;
use g2hyp::ff::{FieldDesc, DEFAULT_TABLE_LIMIT};
use g2hyp::moments::{Level, Source};
use g2hyp::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Settings shared by every subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    pub table_limit: u64,
    pub dft_threshold: usize,
    #[serde(skip)]
    pub worker_count: usize,
    pub classify_tol: f64,
    /// agreement between methods, relative to `q^{7/2}`
    pub cross_check_tol: f64,
    #[serde(skip)]
    pub ledger: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cache_dir: None,
            table_limit: DEFAULT_TABLE_LIMIT,
            dft_threshold: DEFAULT_DIRECT_THRESHOLD,
            worker_count: 1,
            classify_tol: 0.5,
            cross_check_tol: 1e-7,
            ledger: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.worker_count == 0 {
            return Err(Error::InvalidArgument("worker count must be at least 1".into()));
        }
        for (name, v) in [
            ("classify tolerance", self.classify_tol),
            ("cross-check tolerance", self.cross_check_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the numerically relevant configuration and the command.
    /// Paths and the worker count are excluded: they never change a value.
    pub fn hash(&self, command: &impl Serialize) -> String {
        let doc = serde_json::json!({ "config": self, "command": command });
        let digest = Sha256::digest(doc.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn source(&self) -> CliSource {
        CliSource {
            cache: self
                .cache_dir
                .as_ref()
                .map(|d| Cache::new(d).with_table_limit(self.table_limit))
                // cached Gauss tables were computed with the default threshold
                .filter(|_| self.dft_threshold == DEFAULT_DIRECT_THRESHOLD),
            table_limit: self.table_limit,
            dft_threshold: self.dft_threshold,
        }
    }
}

/// Fields and Gauss tables, from the cache when one is configured.
pub struct CliSource {
    cache: Option<Cache>,
    table_limit: u64,
    dft_threshold: usize,
}

impl Source for CliSource {
    fn field(&mut self, p: u32, n: u32) -> Result<Arc<FieldDesc>> {
        match &self.cache {
            Some(c) => c.field(p, n),
            None => Ok(Arc::new(FieldDesc::build_with_limit(p, n, self.table_limit)?)),
        }
    }

    fn level(&mut self, field: Arc<FieldDesc>, psi: AddChar) -> Result<Level> {
        let table = CharTable::new(field);
        let gauss = match &self.cache {
            Some(c) => c.gauss(&table, psi)?,
            None => GaussTable::compute_with(&table, psi, self.dft_threshold, self.table_limit)?,
        };
        Ok(Level { table, psi, gauss })
    }
}
