//! Experiment configuration shared by the run, sweep and ordering protocols.

use serde::{Deserialize, Serialize};
use stmf_core::nmf::NmfInit;
use stmf_core::stmf::OrderingStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Stmf,
    Nmf,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Stmf => "stmf",
            Method::Nmf => "nmf",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stmf" => Ok(Method::Stmf),
            "nmf" => Ok(Method::Nmf),
            other => Err(format!("unknown method '{other}' (expected stmf or nmf)")),
        }
    }
}

/// Model initialization. Random Acol applies to STMF; NNDSVD and plain
/// random apply to NMF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    RandomAcol,
    Nndsvd,
    Random,
}

impl InitStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            InitStrategy::RandomAcol => "random_acol",
            InitStrategy::Nndsvd => "nndsvd",
            InitStrategy::Random => "random",
        }
    }

    /// The paper's default initialization per method.
    pub fn default_for(method: Method) -> Self {
        match method {
            Method::Stmf => InitStrategy::RandomAcol,
            Method::Nmf => InitStrategy::Nndsvd,
        }
    }

    pub fn as_nmf_init(&self) -> Option<NmfInit> {
        match self {
            InitStrategy::Nndsvd => Some(NmfInit::Nndsvd),
            InitStrategy::Random => Some(NmfInit::Random),
            InitStrategy::RandomAcol => None,
        }
    }
}

impl std::str::FromStr for InitStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random_acol" => Ok(InitStrategy::RandomAcol),
            "nndsvd" => Ok(InitStrategy::Nndsvd),
            "random" => Ok(InitStrategy::Random),
            other => Err(format!(
                "unknown init '{other}' (expected random_acol, nndsvd or random)"
            )),
        }
    }
}

/// What the distance correlation compares: the full original matrix against
/// the full prediction (the paper's evaluation), or only the held-out test
/// entries reshaped into vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcorScope {
    Full,
    Test,
}

impl std::str::FromStr for DcorScope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(DcorScope::Full),
            "test" => Ok(DcorScope::Test),
            other => Err(format!("unknown dcor scope '{other}' (expected full or test)")),
        }
    }
}

/// One benchmark protocol invocation: the method, its model parameters, and
/// the masking/repetition schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub method: Method,
    pub rank: usize,
    pub max_iterations: usize,
    pub repetitions: usize,
    pub mask_fraction: f64,
    pub ordering: OrderingStrategy,
    pub init: InitStrategy,
    pub seed: u64,
    pub tolerance: f64,
    pub subset_size: Option<usize>,
    pub dcor_scope: DcorScope,
}

impl ExperimentConfig {
    pub fn new(method: Method, rank: usize) -> Self {
        ExperimentConfig {
            method,
            rank,
            max_iterations: 500,
            repetitions: 10,
            mask_fraction: 0.2,
            ordering: OrderingStrategy::MinAsc,
            init: InitStrategy::default_for(method),
            seed: 42,
            tolerance: 1e-10,
            subset_size: None,
            dcor_scope: DcorScope::Full,
        }
    }

    /// Checks the invariants that clap cannot express.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.mask_fraction > 0.0 && self.mask_fraction < 1.0) {
            return Err(format!(
                "mask fraction must lie strictly between 0 and 1, got {}",
                self.mask_fraction
            ));
        }
        if self.rank == 0 {
            return Err("rank must be at least 1".to_string());
        }
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".to_string());
        }
        if self.max_iterations == 0 {
            return Err("iterations must be at least 1".to_string());
        }
        match (self.method, self.init) {
            (Method::Stmf, InitStrategy::RandomAcol) => Ok(()),
            (Method::Stmf, other) => Err(format!(
                "init '{}' is not valid for stmf (use random_acol)",
                other.name()
            )),
            (Method::Nmf, InitStrategy::RandomAcol) => {
                Err("init 'random_acol' is not valid for nmf (use nndsvd or random)".to_string())
            }
            (Method::Nmf, _) => Ok(()),
        }
    }
}
