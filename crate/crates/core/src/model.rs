//! Jaynes-Cummings-XY Hamiltonian assembly.
//!
//! With ħ = 1 and spin operators written through σ matrices,
//!
//! ```text
//! H = G (a σ_k⁺ + a† σ_k⁻) − J Σ_⟨i,i+1⟩ (σ_i⁺ σ_{i+1}⁻ + σ_i⁻ σ_{i+1}⁺)
//! ```
//!
//! where the bond sum runs over the path 1–2–…–N, plus the bond (N, 1) for
//! a closed ring. Positive J favours ferromagnetic alignment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{
    generator, DenseMatrix, Embedder, Generator, OperatorError, DEFAULT_MAX_DIM,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Open,
    Closed,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Open => "open",
            Topology::Closed => "closed",
        })
    }
}

impl FromStr for Topology {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "open" => Ok(Topology::Open),
            "closed" | "cyclic" => Ok(Topology::Closed),
            other => Err(format!(
                "unknown topology '{other}' (expected open or closed)"
            )),
        }
    }
}

/// Geometry of the chain and where the photon couples; everything except the
/// coupling strengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    pub n_spins: usize,
    pub topology: Topology,
    /// 1-based index of the spin the cavity mode couples to.
    pub coupled_site: usize,
    #[serde(default = "default_max_dim", skip_serializing)]
    pub max_dim: usize,
}

fn default_max_dim() -> usize {
    DEFAULT_MAX_DIM
}

impl Chain {
    pub fn new(n_spins: usize, topology: Topology, coupled_site: usize) -> Self {
        Chain {
            n_spins,
            topology,
            coupled_site,
            max_dim: DEFAULT_MAX_DIM,
        }
    }

    pub fn open(n_spins: usize, coupled_site: usize) -> Self {
        Self::new(n_spins, Topology::Open, coupled_site)
    }

    pub fn closed(n_spins: usize, coupled_site: usize) -> Self {
        Self::new(n_spins, Topology::Closed, coupled_site)
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim;
        self
    }

    pub fn dim(&self) -> usize {
        1 << (self.n_spins + 1)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_spins == 0 {
            return Err(ModelError::Invalid("n_spins must be at least 1".into()));
        }
        if self.coupled_site == 0 || self.coupled_site > self.n_spins {
            return Err(ModelError::Invalid(format!(
                "coupled_site must satisfy 1 <= k <= n_spins, got k = {} with n_spins = {}",
                self.coupled_site, self.n_spins
            )));
        }
        if self.topology == Topology::Closed && self.n_spins < 3 {
            return Err(ModelError::Invalid(format!(
                "closed topology requires n_spins >= 3, got {}",
                self.n_spins
            )));
        }
        Ok(())
    }

    /// Nearest-neighbour bonds as 1-based site pairs.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<_> = (1..self.n_spins).map(|i| (i, i + 1)).collect();
        if self.topology == Topology::Closed {
            bonds.push((self.n_spins, 1));
        }
        bonds
    }

    pub fn with_couplings(self, g: f64, j: f64) -> ModelConfig {
        ModelConfig { chain: self, g, j }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} {} k={}",
            self.n_spins, self.topology, self.coupled_site
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub chain: Chain,
    /// Light-spin coupling G.
    pub g: f64,
    /// Exchange coupling J.
    pub j: f64,
}

impl ModelConfig {
    pub fn new(n_spins: usize, topology: Topology, coupled_site: usize, g: f64, j: f64) -> Self {
        Chain::new(n_spins, topology, coupled_site).with_couplings(g, j)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.chain.validate()?;
        if !self.g.is_finite() || !self.j.is_finite() {
            return Err(ModelError::Invalid(format!(
                "couplings must be finite, got g = {}, j = {}",
                self.g, self.j
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} G={} J={}", self.chain, self.g, self.j)
    }
}

/// The two coupling-independent pieces of H, so that H = g·light + j·exchange.
///
/// All entries are in {0, ±1}; the exact path rebuilds H over the rationals
/// from these patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerms {
    pub chain: Chain,
    /// a σ_k⁺ + a† σ_k⁻
    pub light: DenseMatrix,
    /// −Σ (σ_i⁺ σ_{i+1}⁻ + σ_i⁻ σ_{i+1}⁺)
    pub exchange: DenseMatrix,
}

impl HamiltonianTerms {
    pub fn build(chain: &Chain) -> Result<Self, ModelError> {
        chain.validate()?;
        let emb = Embedder::with_max_dim(chain.n_spins, chain.max_dim)?;
        let a = generator(Generator::A);
        let ad = generator(Generator::ADagger);
        let sp = generator(Generator::SigmaPlus);
        let sm = generator(Generator::SigmaMinus);
        let k = chain.coupled_site;

        let mut light = DenseMatrix::zeros(emb.dim());
        emb.accumulate(&mut light, 1.0, Some(&a), &[(k, sp)])?;
        emb.accumulate(&mut light, 1.0, Some(&ad), &[(k, sm)])?;

        let mut exchange = DenseMatrix::zeros(emb.dim());
        for (i, j) in chain.bonds() {
            emb.accumulate(&mut exchange, -1.0, None, &[(i, sp), (j, sm)])?;
            emb.accumulate(&mut exchange, -1.0, None, &[(i, sm), (j, sp)])?;
        }
        Ok(HamiltonianTerms {
            chain: *chain,
            light,
            exchange,
        })
    }

    pub fn combine(&self, g: f64, j: f64) -> DenseMatrix {
        let n = self.light.dim();
        DenseMatrix::from_fn(n, |r, c| {
            let l = self.light.get(r, c);
            let x = self.exchange.get(r, c);
            // keep structural zeros exact (and avoid 0·∞ noise)
            let mut v = 0.0;
            if l != 0.0 {
                v += g * l;
            }
            if x != 0.0 {
                v += j * x;
            }
            v
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub config: ModelConfig,
    pub matrix: DenseMatrix,
}

pub fn build_hamiltonian(config: &ModelConfig) -> Result<Hamiltonian, ModelError> {
    config.validate()?;
    let terms = HamiltonianTerms::build(&config.chain)?;
    Ok(Hamiltonian {
        config: *config,
        matrix: terms.combine(config.g, config.j),
    })
}

/// S_z^total = ½ Σ_i σ_i^z, diagonal in the product basis.
pub fn total_sz_operator(n_spins: usize) -> Result<DenseMatrix, ModelError> {
    let emb = Embedder::new(n_spins)?;
    let sz = generator(Generator::SigmaZ);
    let mut out = DenseMatrix::zeros(emb.dim());
    for site in 1..=n_spins {
        emb.accumulate(&mut out, 0.5, None, &[(site, sz)])?;
    }
    Ok(out)
}

/// N_ex = a†a + Σ_i ½(σ_i^z + 1): photon number plus number of up spins.
pub fn excitation_number_operator(n_spins: usize) -> Result<DenseMatrix, ModelError> {
    let emb = Embedder::new(n_spins)?;
    let a = generator(Generator::A);
    let ad = generator(Generator::ADagger);
    let sz = generator(Generator::SigmaZ);
    let id = generator(Generator::Identity);
    let mut out = DenseMatrix::zeros(emb.dim());
    emb.accumulate(&mut out, 1.0, Some(&(ad * a)), &[])?;
    let up_projector = (sz + id).scale(0.5.into());
    for site in 1..=n_spins {
        emb.accumulate(&mut out, 1.0, None, &[(site, up_projector)])?;
    }
    Ok(out)
}

/// `ab − ba`.
pub fn commutator(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, ModelError> {
    let ab = a.try_mul(b)?;
    let ba = b.try_mul(a)?;
    Ok(ab.try_sub(&ba)?)
}
