//! JSON file formats for functions, operators and certificates.
//!
//! Rationals cross the file boundary as strings in lowest terms with a
//! positive denominator (`"p"` or `"p/q"`), so round trips are exact and
//! repeated runs are byte-identical.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::counterexample::OscillationCertificate;
use crate::error::{Error, Result};
use crate::measure::{EvSeq, Part, SpaceFunction, SpaceModel};
use crate::operators::{DSOperator, IndexSet, TauMap};
use crate::rational::{format_rational, parse_rational, Rational};

/// Eventually periodic sequence: `{"prefix": [...], "period": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeqFile {
    pub prefix: Vec<String>,
    pub period: Vec<String>,
}

impl SeqFile {
    pub fn to_seq(&self) -> Result<EvSeq> {
        EvSeq::new(
            parse_rationals(&self.prefix)?,
            parse_rationals(&self.period)?,
        )
    }

    pub fn from_seq(seq: &EvSeq) -> Self {
        SeqFile {
            prefix: seq.prefix().iter().map(format_rational).collect(),
            period: seq.period().iter().map(format_rational).collect(),
        }
    }
}

/// Model description inside a function file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    pub cells: bool,
    pub atom_weight: Option<String>,
    #[serde(default)]
    pub exceptional: Vec<String>,
}

/// On-disk form of a [`SpaceFunction`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionFile {
    pub space: SpaceFile,
    pub cell_values: Option<SeqFile>,
    pub atom_values: Option<SeqFile>,
    #[serde(default)]
    pub exceptional_values: Vec<String>,
}

impl FunctionFile {
    pub fn to_function(&self) -> Result<SpaceFunction> {
        let atom_weight = self
            .space
            .atom_weight
            .as_deref()
            .map(|s| parse_rational(s).map_err(Error::Parse))
            .transpose()?;
        let space = SpaceModel::new(
            self.space.cells,
            atom_weight,
            parse_rationals(&self.space.exceptional)?,
        )?;
        let cell_values = self.cell_values.as_ref().map(SeqFile::to_seq).transpose()?;
        let atom_values = self.atom_values.as_ref().map(SeqFile::to_seq).transpose()?;
        SpaceFunction::new(
            space,
            cell_values,
            atom_values,
            parse_rationals(&self.exceptional_values)?,
        )
    }

    pub fn from_function(f: &SpaceFunction) -> Self {
        FunctionFile {
            space: SpaceFile {
                cells: f.space().has_cells(),
                atom_weight: f.space().atom_weight().map(format_rational),
                exceptional: f
                    .space()
                    .exceptional_atoms()
                    .iter()
                    .map(format_rational)
                    .collect(),
            },
            cell_values: f.values(Part::Cell).map(SeqFile::from_seq),
            atom_values: f.values(Part::Atom).map(SeqFile::from_seq),
            exceptional_values: f.exceptional_values().iter().map(format_rational).collect(),
        }
    }
}

/// Location maps inside an operator file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TauFile {
    Identity,
    ShiftWithin { set: SeqFile },
    Permutation { perm: Vec<u64> },
}

impl TauFile {
    fn to_tau(&self) -> Result<TauMap> {
        Ok(match self {
            TauFile::Identity => TauMap::Identity,
            TauFile::ShiftWithin { set } => TauMap::ShiftWithin(IndexSet::new(set.to_seq()?)?),
            TauFile::Permutation { perm } => TauMap::Permutation(perm.clone()),
        })
    }

    fn from_tau(tau: &TauMap) -> Self {
        match tau {
            TauMap::Identity => TauFile::Identity,
            TauMap::ShiftWithin(set) => TauFile::ShiftWithin {
                set: SeqFile::from_seq(set.indicator()),
            },
            TauMap::Permutation(perm) => TauFile::Permutation { perm: perm.clone() },
        }
    }
}

/// On-disk form of a [`DSOperator`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OperatorFile {
    Multiplier {
        part: String,
        phi: SeqFile,
        tau: TauFile,
        #[serde(default)]
        zero_off_part: bool,
    },
    BlockExpectation {
        part: String,
        block_size: u64,
    },
    Lift {
        support: String,
        inner: Box<OperatorFile>,
    },
    Compose {
        outer: Box<OperatorFile>,
        inner: Box<OperatorFile>,
    },
}

impl OperatorFile {
    /// Rebuilds the operator through the validating constructors, except
    /// for block expectations whose part existence is checked at apply
    /// time.
    pub fn to_operator(&self) -> Result<DSOperator> {
        Ok(match self {
            OperatorFile::Multiplier {
                part,
                phi,
                tau,
                zero_off_part,
            } => {
                DSOperator::multiplier(part.parse()?, phi.to_seq()?, tau.to_tau()?, *zero_off_part)?
            }
            OperatorFile::BlockExpectation { part, block_size } => {
                if *block_size == 0 {
                    return Err(Error::Parse("block_size must be >= 1".into()));
                }
                DSOperator::BlockExpectation {
                    part: part.parse()?,
                    block_size: *block_size,
                }
            }
            OperatorFile::Lift { support, inner } => {
                DSOperator::lift(inner.to_operator()?, support.parse()?)
            }
            OperatorFile::Compose { outer, inner } => {
                DSOperator::compose(outer.to_operator()?, inner.to_operator()?)
            }
        })
    }

    pub fn from_operator(op: &DSOperator) -> Self {
        match op {
            DSOperator::Multiplier {
                part,
                phi,
                tau,
                zero_off_part,
            } => OperatorFile::Multiplier {
                part: part.to_string(),
                phi: SeqFile::from_seq(phi),
                tau: TauFile::from_tau(tau),
                zero_off_part: *zero_off_part,
            },
            DSOperator::BlockExpectation { part, block_size } => OperatorFile::BlockExpectation {
                part: part.to_string(),
                block_size: *block_size,
            },
            DSOperator::Lift { support, inner } => OperatorFile::Lift {
                support: support.to_string(),
                inner: Box::new(Self::from_operator(inner)),
            },
            DSOperator::Compose { outer, inner } => OperatorFile::Compose {
                outer: Box::new(Self::from_operator(outer)),
                inner: Box::new(Self::from_operator(inner)),
            },
        }
    }
}

/// On-disk certificate: thresholds, base point, orders and trace. The
/// operator lives in its own file so `simulate` can consume it directly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub a: String,
    pub b: String,
    pub part: String,
    pub m1: u64,
    pub ns: Vec<u64>,
    pub trace: Vec<String>,
}

impl CertificateFile {
    pub fn from_certificate(cert: &OscillationCertificate) -> Self {
        CertificateFile {
            a: format_rational(&cert.band.lower),
            b: format_rational(&cert.band.upper),
            part: cert.band.part.to_string(),
            m1: cert.band.base_index,
            ns: cert.indices.clone(),
            trace: cert.trace.iter().map(format_rational).collect(),
        }
    }

    pub fn part(&self) -> Result<Part> {
        self.part.parse()
    }

    pub fn lower(&self) -> Result<Rational> {
        parse_rational(&self.a).map_err(Error::Parse)
    }

    pub fn trace_values(&self) -> Result<Vec<Rational>> {
        parse_rationals(&self.trace)
    }
}

fn parse_rationals(strings: &[String]) -> Result<Vec<Rational>> {
    strings
        .iter()
        .map(|s| parse_rational(s).map_err(Error::Parse))
        .collect()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn load_function(path: &Path) -> Result<SpaceFunction> {
    read_json::<FunctionFile>(path)?.to_function()
}

pub fn load_operator(path: &Path) -> Result<DSOperator> {
    read_json::<OperatorFile>(path)?.to_operator()
}

pub fn load_certificate(path: &Path) -> Result<CertificateFile> {
    read_json(path)
}
