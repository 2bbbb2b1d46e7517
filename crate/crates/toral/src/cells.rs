//! Algebraic images of the standard spectra: spheres, cells, universal spaces
//! and Thom twists, with a small textual grammar.

use crate::lattice::{Representation, Subgroup};
use crate::sheaf::{SheafError, SheafObject, StandardInjective, Summand};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum NamedObject {
    Sphere { rank: usize },
    BasicCell { h: Subgroup },
    NaturalCell { k: Subgroup },
    EBracket { k: Subgroup },
    /// The universal space for the family of subgroups of `k`.
    EUniversal { k: Subgroup },
    ThomTwist { rep: Representation, inner: Box<NamedObject> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown tag {tag:?} at {pos}")]
    UnknownTag { pos: usize, tag: String },
}

pub fn structure_sheaf(rank: usize) -> SheafObject {
    SheafObject::of(rank, vec![Summand::Structure])
}

/// `I(K̃) = f_{K̃_1}(Σ^c H_*(BG/K̃))`.
pub fn e_bracket(k: &Subgroup) -> SheafObject {
    StandardInjective::new(k.clone(), 0).as_object()
}

pub fn basic_cell(h: &Subgroup) -> SheafObject {
    SheafObject::of(h.rank(), vec![Summand::Cell { h: h.clone() }])
}

/// The subgroups indexing the basic-cell summands of `G/K̃_+`.
pub fn natural_cell(k: &Subgroup) -> Vec<Subgroup> {
    k.subgroups_between()
}

pub fn natural_cell_object(k: &Subgroup) -> SheafObject {
    SheafObject::of(k.rank(), natural_cell(k).into_iter().map(|h| Summand::Cell { h }).collect())
}

pub fn thom_twist(rep: &Representation, m: &SheafObject) -> SheafObject {
    m.twist(rep)
}

impl NamedObject {
    pub fn rank(&self) -> usize {
        match self {
            NamedObject::Sphere { rank } => *rank,
            NamedObject::BasicCell { h } => h.rank(),
            NamedObject::NaturalCell { k } | NamedObject::EBracket { k } | NamedObject::EUniversal { k } => k.rank(),
            NamedObject::ThomTwist { inner, .. } => inner.rank(),
        }
    }

    /// The subgroup the descriptor is built on, if any.
    pub fn subgroup(&self) -> Option<&Subgroup> {
        match self {
            NamedObject::Sphere { .. } | NamedObject::ThomTwist { .. } => None,
            NamedObject::BasicCell { h } => Some(h),
            NamedObject::NaturalCell { k } | NamedObject::EBracket { k } | NamedObject::EUniversal { k } => Some(k),
        }
    }

    pub fn realize(&self) -> Result<SheafObject, SheafError> {
        Ok(match self {
            NamedObject::Sphere { rank } => structure_sheaf(*rank),
            NamedObject::BasicCell { h } => basic_cell(h),
            NamedObject::NaturalCell { k } => natural_cell_object(k),
            NamedObject::EBracket { k } => e_bracket(k),
            NamedObject::EUniversal { k } => SheafObject::of(k.rank(), vec![Summand::Universal { h: k.clone() }]),
            NamedObject::ThomTwist { rep, inner } => thom_twist(rep, &inner.realize()?),
        })
    }

    pub fn parse(rank: usize, s: &str) -> Result<Self, ParseError> {
        parse_at(rank, s, 0)
    }
}

fn parse_at(rank: usize, s: &str, pos: usize) -> Result<NamedObject, ParseError> {
    if s == "sphere" {
        return Ok(NamedObject::Sphere { rank });
    }
    let Some((tag, rest)) = s.split_once(':') else {
        return Err(ParseError::Syntax { pos: pos + s.len(), msg: "expected ':' after the tag".into() });
    };
    let at = pos + tag.len() + 1;
    let subgroup = |r: &str| -> Result<Subgroup, ParseError> {
        let body = r.strip_prefix("ann=").ok_or_else(|| ParseError::Syntax { pos: at, msg: "expected 'ann='".into() })?;
        Subgroup::parse_ann(rank, body).map_err(|msg| ParseError::Syntax { pos: at + 4, msg })
    };
    Ok(match tag {
        "sigma" => NamedObject::BasicCell { h: subgroup(rest)? },
        "cell" => NamedObject::NaturalCell { k: subgroup(rest)? },
        "ebracket" => NamedObject::EBracket { k: subgroup(rest)? },
        "euniversal" => NamedObject::EUniversal { k: subgroup(rest)? },
        "twist" => {
            let (rep, inner) =
                rest.split_once(':').ok_or_else(|| ParseError::Syntax { pos: at + rest.len(), msg: "expected ':' after the representation".into() })?;
            let rep = Representation::parse(rank, rep).map_err(|msg| ParseError::Syntax { pos: at, msg })?;
            NamedObject::ThomTwist { rep, inner: Box::new(parse_at(rank, inner, at + rest.len() - inner.len())?) }
        }
        _ => return Err(ParseError::UnknownTag { pos, tag: tag.to_string() }),
    })
}

impl fmt::Display for NamedObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedObject::Sphere { .. } => write!(f, "sphere"),
            NamedObject::BasicCell { h } => write!(f, "sigma:{h}"),
            NamedObject::NaturalCell { k } => write!(f, "cell:{k}"),
            NamedObject::EBracket { k } => write!(f, "ebracket:{k}"),
            NamedObject::EUniversal { k } => write!(f, "euniversal:{k}"),
            NamedObject::ThomTwist { rep, inner } => write!(f, "twist:{}:{inner}", rep.render()),
        }
    }
}
