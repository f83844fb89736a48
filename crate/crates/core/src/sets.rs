//! Ground sets, subsets as one-word bitmasks, and set families.
//!
//! The ground set is capped at 63 elements so every subset fits a `u64` and
//! all set algebra is branch-free word arithmetic. Families keep their
//! members deduplicated and sorted by `(popcount, numeric value)`, which is
//! also the on-disk order, so equal families serialize identically.

use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on ground-set size; subsets must fit one machine word.
pub const MAX_GROUND_SIZE: usize = 63;

/// The universe `X`: an element count plus optional element names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::GroundSetSize(n));
        }
        Ok(GroundSet { n, labels: None })
    }

    pub fn with_labels(n: usize, labels: Vec<String>) -> Result<Self> {
        let mut ground = GroundSet::new(n)?;
        if labels.len() != n {
            return Err(Error::BadLabels { n });
        }
        let mut seen = std::collections::HashSet::new();
        if !labels.iter().all(|l| seen.insert(l.clone())) {
            return Err(Error::BadLabels { n });
        }
        ground.labels = Some(labels);
        Ok(ground)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Mask with every element set.
    pub fn full_mask(&self) -> SubsetMask {
        SubsetMask((1u64 << self.n) - 1)
    }

    pub fn validate_mask(&self, mask: SubsetMask) -> Result<()> {
        if mask.0 & !self.full_mask().0 != 0 {
            let bad = (64 - mask.0.leading_zeros() - 1) as usize;
            return Err(Error::ElementOutOfRange { index: bad, n: self.n });
        }
        Ok(())
    }
}

/// A subset of the ground set, one bit per element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SubsetMask(u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn from_bits(bits: u64) -> Self {
        SubsetMask(bits)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(ground: &GroundSet, idx: I) -> Result<Self> {
        let mut bits = 0u64;
        for i in idx {
            if i >= ground.size() {
                return Err(Error::ElementOutOfRange { index: i, n: ground.size() });
            }
            bits |= 1 << i;
        }
        Ok(SubsetMask(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, element: usize) -> bool {
        self.0 >> element & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 | other.0)
    }

    pub fn minus(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & !other.0)
    }

    pub fn intersect(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 & other.0)
    }

    /// Element indices in increasing order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Sort key used everywhere a member order is needed: size first, then
    /// numeric value.
    pub fn sort_key(self) -> (usize, u64) {
        (self.size(), self.0)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, e) in self.elements().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A finite collection of subsets over a shared ground set.
///
/// Members are stored deduplicated in `(popcount, value)` order. The empty
/// family and the family `{∅}` are distinct, representable values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    ground: GroundSet,
    members: Vec<SubsetMask>,
}

impl SetFamily {
    pub fn new(ground: GroundSet, members: impl IntoIterator<Item = SubsetMask>) -> Result<Self> {
        let mut members: Vec<SubsetMask> = members.into_iter().collect();
        for &m in &members {
            ground.validate_mask(m)?;
        }
        members.sort_by_key(|m| m.sort_key());
        members.dedup();
        Ok(SetFamily { ground, members })
    }

    /// Build from element-index lists, the family file's "sets" shape.
    pub fn from_index_sets(ground: GroundSet, sets: &[Vec<usize>]) -> Result<Self> {
        let members = sets
            .iter()
            .map(|s| SubsetMask::from_indices(&ground, s.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        SetFamily::new(ground, members)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains_empty_set(&self) -> bool {
        self.members.first().is_some_and(|m| m.is_empty())
    }

    /// Largest member size; 0 for both `{∅}` and the empty family (callers
    /// that care distinguish via `is_empty`).
    pub fn bound_ell(&self) -> usize {
        self.members.iter().map(|m| m.size()).max().unwrap_or(0)
    }

    /// True iff `subset` lies in the up-closure `⟨F⟩`, i.e. some member is
    /// contained in it.
    pub fn contains_member(&self, subset: SubsetMask) -> bool {
        self.members.iter().any(|m| m.is_subset_of(subset))
    }

    /// The inclusion-minimal members. Members arrive sorted by size, so only
    /// earlier (smaller-or-equal) entries can be subsets of later ones.
    pub fn minimal_elements(&self) -> SetFamily {
        let mut kept: Vec<SubsetMask> = Vec::new();
        for &m in &self.members {
            if !kept.iter().any(|k| k.is_subset_of(m)) {
                kept.push(m);
            }
        }
        SetFamily { ground: self.ground.clone(), members: kept }
    }

    /// True iff no member contains another.
    pub fn is_antichain(&self) -> bool {
        self.members.len() == self.minimal_elements().len()
    }

    /// Member-index lists in serialization order.
    pub fn to_index_sets(&self) -> Vec<Vec<usize>> {
        self.members.iter().map(|m| m.elements().collect()).collect()
    }
}

/// On-disk family format: `{"n": .., "sets": [[..], ..]}` plus optional
/// `labels` and a per-element `q` vector.
#[derive(Debug, Serialize, Deserialize)]
struct FamilyFileRaw {
    n: usize,
    sets: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<Vec<f64>>,
}

/// A parsed family file: the family plus the optional probability vector
/// stored alongside it.
#[derive(Debug, Clone)]
pub struct FamilyFile {
    pub family: SetFamily,
    pub q: Option<crate::measure::ProbVector>,
}

/// Parse the documented JSON family format, deduplicating members.
pub fn parse_family(source: impl Read) -> Result<FamilyFile> {
    let raw: FamilyFileRaw =
        serde_json::from_reader(source).map_err(|e| Error::Parse(e.to_string()))?;
    let ground = match raw.labels {
        Some(labels) => GroundSet::with_labels(raw.n, labels)?,
        None => GroundSet::new(raw.n)?,
    };
    let family = SetFamily::from_index_sets(ground, &raw.sets)?;
    let q = raw
        .q
        .map(|values| crate::measure::ProbVector::new(family.ground(), values))
        .transpose()?;
    Ok(FamilyFile { family, q })
}

/// Serialize in the canonical order (members sorted by popcount then value).
pub fn serialize_family(family: &SetFamily, q: Option<&crate::measure::ProbVector>) -> String {
    let raw = FamilyFileRaw {
        n: family.ground().size(),
        sets: family.to_index_sets(),
        labels: family.ground().labels().map(|l| l.to_vec()),
        q: q.map(|q| q.values().to_vec()),
    };
    serde_json::to_string_pretty(&raw).expect("family serialization cannot fail")
}

impl Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

impl Serialize for SetFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut state = serializer.serialize_struct("SetFamily", 2)?;
        state.serialize_field("n", &self.ground.size())?;
        state.serialize_field("sets", &self.members)?;
        state.end()
    }
}
