use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::create;

/// Name of the resolved configuration written into every output directory.
pub const CONFIG_FILE: &str = "run_config.json";

/// Fully resolved settings of one run. Defaults are spelled out, so the
/// recorded `command_line` reruns the same computation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Vec<String>,
    /// Input files by flag name.
    pub inputs: BTreeMap<String, PathBuf>,
    pub out_dir: PathBuf,
    /// Remaining settings by flag name, as they would be passed on the
    /// command line.
    pub settings: BTreeMap<String, String>,
    /// Boolean flags that were set.
    pub switches: Vec<String>,
    pub version: String,
}

impl RunConfig {
    pub fn new(subcommand: &[&str], out_dir: &Path) -> Self {
        Self {
            subcommand: subcommand.iter().map(|s| s.to_string()).collect(),
            out_dir: out_dir.to_path_buf(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }

    pub fn input(&mut self, flag: &str, path: &Path) -> &mut Self {
        self.inputs.insert(flag.to_string(), path.to_path_buf());
        self
    }

    pub fn set(&mut self, flag: &str, value: impl ToString) -> &mut Self {
        self.settings.insert(flag.to_string(), value.to_string());
        self
    }

    pub fn switch(&mut self, flag: &str, on: bool) -> &mut Self {
        if on {
            self.switches.push(flag.to_string());
        }
        self
    }

    /// Equivalent invocation with every setting explicit.
    pub fn command_line(&self) -> Vec<String> {
        let mut args = vec!["divmap".to_string()];
        args.extend(self.subcommand.iter().cloned());
        for (flag, path) in &self.inputs {
            args.push(format!("--{flag}"));
            args.push(path.display().to_string());
        }
        for (flag, value) in &self.settings {
            args.push(format!("--{flag}"));
            args.push(value.clone());
        }
        args.extend(self.switches.iter().map(|s| format!("--{s}")));
        args.push("--out-dir".into());
        args.push(self.out_dir.display().to_string());
        args
    }

    pub fn write(&self) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Stored<'a> {
            #[serde(flatten)]
            config: &'a RunConfig,
            command_line: Vec<String>,
        }
        let path = self.out_dir.join(CONFIG_FILE);
        let mut w = create(&path)?;
        let stored = Stored {
            config: self,
            command_line: self.command_line(),
        };
        serde_json::to_writer_pretty(&mut w, &stored)
            .map_err(|e| Error::format(&path.display().to_string(), e))?;
        use std::io::Write;
        w.write_all(b"\n")
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let r = crate::formats::open(path)?;
        serde_json::from_reader(r).map_err(|e| Error::format(&path.display().to_string(), e))
    }
}
