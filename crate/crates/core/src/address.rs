//! Gorn addresses: finite sequences of positive integers naming tree nodes.
//!
//! The empty address `ε` is the root; `p·i` is the `i`-th child (1-based) of
//! the node at `p`. Addresses are rendered with dots (`1.2.3`) and the root
//! as `e`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressError {
    #[error("address components must be positive, found 0")]
    ZeroComponent,
    #[error("{prefix} is not a prefix of {address}")]
    NotPrefix {
        prefix: GornAddress,
        address: GornAddress,
    },
    #[error("cannot parse address {0:?}")]
    Syntax(String),
}

/// A node address. Ordering is lexicographic on the integer sequence, which
/// is a preorder walk of any tree (parents before children, left before right).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GornAddress(Vec<u32>);

/// How one address relates to another as a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixRelation {
    /// `p ≺ q`: strict prefix.
    Proper,
    /// `p = q`.
    Improper,
    None,
}

impl PrefixRelation {
    pub fn is_prefix(self) -> bool {
        !matches!(self, PrefixRelation::None)
    }
}

impl GornAddress {
    pub fn root() -> Self {
        GornAddress(Vec::new())
    }

    pub fn new(components: Vec<u32>) -> Result<Self, AddressError> {
        if components.contains(&0) {
            return Err(AddressError::ZeroComponent);
        }
        Ok(GornAddress(components))
    }

    /// Builds an address from a slice that is known to be positive.
    ///
    /// Panics on a zero component; intended for literals in tests and fixtures.
    pub fn from_slice(components: &[u32]) -> Self {
        Self::new(components.to_vec()).expect("address literal with zero component")
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// `self · i`
    pub fn child(&self, i: u32) -> Self {
        assert!(i >= 1, "child index must be positive");
        let mut v = self.0.clone();
        v.push(i);
        GornAddress(v)
    }

    /// `self · other`
    pub fn concat(&self, other: &GornAddress) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GornAddress(v)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.0.is_empty() {
            None
        } else {
            Some(GornAddress(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Relation of `self` (as candidate prefix) to `other`.
    pub fn prefix_relation(&self, other: &GornAddress) -> PrefixRelation {
        if !other.0.starts_with(&self.0) {
            PrefixRelation::None
        } else if self.0.len() == other.0.len() {
            PrefixRelation::Improper
        } else {
            PrefixRelation::Proper
        }
    }

    /// `self ⪯ other`
    pub fn is_prefix_of(&self, other: &GornAddress) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `self ≺ other`
    pub fn is_proper_prefix_of(&self, other: &GornAddress) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }

    /// `self − prefix`, the suffix `u` with `prefix · u = self`.
    pub fn difference(&self, prefix: &GornAddress) -> Result<GornAddress, AddressError> {
        if !prefix.is_prefix_of(self) {
            return Err(AddressError::NotPrefix {
                prefix: prefix.clone(),
                address: self.clone(),
            });
        }
        Ok(GornAddress(self.0[prefix.0.len()..].to_vec()))
    }
}

/// Free-function form of [`GornAddress::prefix_relation`].
pub fn is_prefix(p: &GornAddress, q: &GornAddress) -> PrefixRelation {
    p.prefix_relation(q)
}

/// Free-function form of [`GornAddress::difference`]: `q − p`.
pub fn difference(q: &GornAddress, p: &GornAddress) -> Result<GornAddress, AddressError> {
    q.difference(p)
}

/// Where a node at `s` ends up after an auxiliary tree with foot `foot` is
/// adjoined at `at`: unchanged unless `at ≺ s`, in which case the subtree it
/// lives in has been moved under the foot, giving `at · foot · (s − at)`.
pub fn update(s: &GornAddress, foot: &GornAddress, at: &GornAddress) -> GornAddress {
    if at.is_proper_prefix_of(s) {
        let rest = &s.0[at.0.len()..];
        let mut v = Vec::with_capacity(s.0.len() + foot.0.len());
        v.extend_from_slice(&at.0);
        v.extend_from_slice(&foot.0);
        v.extend_from_slice(rest);
        GornAddress(v)
    } else {
        s.clone()
    }
}

impl fmt::Display for GornAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (n, c) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(".")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for GornAddress {
    type Err = AddressError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" || s == "ε" || s.is_empty() {
            return Ok(GornAddress::root());
        }
        let parts = s
            .split(['.', '·'])
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| AddressError::Syntax(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        GornAddress::new(parts)
    }
}

impl Serialize for GornAddress {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GornAddress {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
