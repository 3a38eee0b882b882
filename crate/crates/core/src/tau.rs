//! The descent sequence `τ(s,t)`, its length `ℓ(s,t)` and the value `p(s,t)`.
//!
//! For `s ≺ t` start at `β₀ = dom t` and repeatedly move to the position of
//! the minimum of `t` on `[dom s, βᵢ)` until `dom s` is reached.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{Node, NodeOrRoot};

/// Positions `(β_k, …, β_1)`, strictly increasing as stored.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct TauSeq(Vec<usize>);

impl TauSeq {
    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `β_1`, the last position found by the descent.
    pub fn last_found(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &TauSeq) -> TauSeq {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        TauSeq(v)
    }
}

impl fmt::Display for TauSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// `p(s,t)`: a natural for `s ≺ t`, infinite for `s = t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PValue {
    Finite(u32),
    Infinity,
}

impl PValue {
    pub fn at_least(self, p: u32) -> bool {
        self >= PValue::Finite(p)
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValue::Finite(v) => write!(f, "{v}"),
            PValue::Infinity => write!(f, "∞"),
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PValue::Finite(v) => serializer.serialize_u32(*v),
            PValue::Infinity => serializer.serialize_str("inf"),
        }
    }
}

fn require_precedes(s: &Node, t: &Node) -> Result<()> {
    if s.precedes(t) {
        Ok(())
    } else {
        Err(Error::NotComparable {
            s: s.clone().into(),
            t: t.clone().into(),
        })
    }
}

/// Position of the least value of `t` on `[from, to)`.
fn argmin(t: &Node, from: usize, to: usize) -> usize {
    (from..to)
        .min_by_key(|&k| t.value_at(k))
        .expect("nonempty range")
}

pub fn tau(s: &Node, t: &Node) -> Result<TauSeq> {
    require_precedes(s, t)?;
    let floor = s.len();
    let mut found = Vec::new();
    let mut beta = t.len();
    while beta > floor {
        beta = argmin(t, floor, beta);
        found.push(beta);
    }
    found.reverse();
    Ok(TauSeq(found))
}

pub fn ell(s: &Node, t: &Node) -> Result<usize> {
    tau(s, t).map(|seq| seq.len())
}

pub fn p_value(s: &Node, t: &Node) -> Result<PValue> {
    let seq = tau(s, t)?;
    Ok(match seq.last_found() {
        None => PValue::Infinity,
        Some(b1) => PValue::Finite(t.value_at(b1)),
    })
}

/// A base `r ≺ t` below which `τ(s,u) = τ(s,t) ⌢ τ(t,u)` for every `s ∈ (r,t]`.
///
/// Every finite node has successor domain, so this is `Root` for the empty
/// node and the immediate predecessor otherwise.
pub fn local_extension_base(t: &Node, u: &Node) -> Result<NodeOrRoot> {
    if !t.strictly_precedes(u) {
        return Err(Error::NotComparable {
            s: t.clone().into(),
            t: u.clone().into(),
        });
    }
    Ok(t.predecessor())
}

pub fn check_concatenation(s: &Node, t: &Node, u: &Node) -> Result<bool> {
    let whole = tau(s, u)?;
    let left = tau(s, t)?;
    let right = tau(t, u)?;
    Ok(whole == left.concat(&right))
}
