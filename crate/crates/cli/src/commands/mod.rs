pub mod annulus;
pub mod meshgen;
pub mod solve;
pub mod verify;
pub mod weierstrass;

use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::CliError;

/// Parsed config plus command-line overrides.
pub struct Ctx {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub refine: usize,
    pub seed: Option<u64>,
}

impl Ctx {
    pub fn new(
        mut cfg: RunConfig,
        out: PathBuf,
        lambda: Option<f64>,
        refine: usize,
        seed: Option<u64>,
    ) -> Self {
        if let Some(l) = lambda {
            if let Some(w) = cfg.weierstrass.as_mut() {
                w.lambda = l;
            }
            if let Some(s) = cfg.solve.as_mut() {
                s.lambda = l;
            }
            if let Some(a) = cfg.annulus.as_mut() {
                a.lambda = l;
            }
            if let Some(s) = cfg.strip.as_mut() {
                s.lambda = l;
            }
            if let Some(v) = cfg.verify.as_mut() {
                v.lambda = l;
            }
        }
        let seed = seed.or(cfg.seed);
        Ctx {
            cfg,
            out,
            refine,
            seed,
        }
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let path = self.out.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn csv(
        &self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io {
            path: name.into(),
            source: std::io::Error::other(e.to_string()),
        })?;
        self.write(name, &String::from_utf8_lossy(&bytes))
    }

    pub fn base_dir(&self) -> &Path {
        &self.cfg.base_dir
    }
}

/// Shortest round-trip decimal, exponent form for very small or large values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Collects failed cross-checks; the command still writes its outputs.
#[derive(Default)]
pub struct Checks {
    failures: Vec<String>,
}

impl Checks {
    pub fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        if self.failures.is_empty() {
            Ok(())
        } else {
            Err(CliError::Check(self.failures.join("; ")))
        }
    }
}
