//! Element subsets and right quotients.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use thiserror::Error;

use crate::group::{Element, Group, IDENTITY};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetError {
    #[error("right quotient of empty set undefined")]
    Empty,
    #[error("set belongs to a group of order {found}, expected order {expected}")]
    OrderMismatch { expected: usize, found: usize },
    #[error("element {index} out of range for group of order {order}")]
    OutOfRange { index: usize, order: usize },
    #[error("{0:?} is not an element index")]
    BadToken(String),
}

/// A subset of the elements of a group of fixed order.
///
/// The order travels with the set so that mixing sets from different groups
/// is caught instead of silently aliasing indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    bits: FixedBitSet,
    order: usize,
}

impl ElementSet {
    pub fn empty(order: usize) -> Self {
        ElementSet {
            bits: FixedBitSet::with_capacity(order),
            order,
        }
    }

    pub fn full(order: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(order);
        bits.insert_range(..);
        ElementSet { bits, order }
    }

    pub fn identity(order: usize) -> Self {
        let mut set = Self::empty(order);
        set.bits.insert(IDENTITY);
        set
    }

    pub fn from_elements(
        order: usize,
        elements: impl IntoIterator<Item = Element>,
    ) -> Result<Self, SetError> {
        let mut set = Self::empty(order);
        for g in elements {
            if g >= order {
                return Err(SetError::OutOfRange { index: g, order });
            }
            set.bits.insert(g);
        }
        Ok(set)
    }

    /// Parses a set literal: whitespace-separated element indices.
    pub fn parse(order: usize, literal: &str) -> Result<Self, SetError> {
        let elements = literal
            .split_whitespace()
            .map(|tok| tok.parse().map_err(|_| SetError::BadToken(tok.into())))
            .collect::<Result<Vec<Element>, _>>()?;
        Self::from_elements(order, elements)
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, g: Element) -> bool {
        self.bits.contains(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    fn same_order(&self, other: &ElementSet) -> Result<(), SetError> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(SetError::OrderMismatch {
                expected: self.order,
                found: other.order,
            })
        }
    }

    pub fn union(&self, other: &ElementSet) -> Result<ElementSet, SetError> {
        self.same_order(other)?;
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        Ok(out)
    }

    pub fn intersection(&self, other: &ElementSet) -> Result<ElementSet, SetError> {
        self.same_order(other)?;
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        Ok(out)
    }

    /// `|self ∩ other|` without allocating.
    pub fn intersection_len(&self, other: &ElementSet) -> Result<usize, SetError> {
        self.same_order(other)?;
        Ok(self.bits.intersection_count(&other.bits))
    }

    pub fn is_subset(&self, other: &ElementSet) -> Result<bool, SetError> {
        self.same_order(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    /// Returns a copy with `g` added.
    pub fn with(&self, g: Element) -> Result<ElementSet, SetError> {
        self.in_range(g)?;
        let mut out = self.clone();
        out.bits.insert(g);
        Ok(out)
    }

    /// Returns a copy with `g` removed.
    pub fn without(&self, g: Element) -> Result<ElementSet, SetError> {
        self.in_range(g)?;
        let mut out = self.clone();
        out.bits.remove(g);
        Ok(out)
    }

    fn in_range(&self, g: Element) -> Result<(), SetError> {
        if g < self.order {
            Ok(())
        } else {
            Err(SetError::OutOfRange {
                index: g,
                order: self.order,
            })
        }
    }

    pub(crate) fn from_bits(bits: FixedBitSet, order: usize) -> Self {
        debug_assert_eq!(bits.len(), order);
        ElementSet { bits, order }
    }

    /// `{x * g : x ∈ self}`.
    pub fn right_translate(&self, group: &Group, g: Element) -> ElementSet {
        let mut out = Self::empty(self.order);
        for x in self.iter() {
            out.bits.insert(group.op(x, g));
        }
        out
    }

    /// `{x^-1 : x ∈ self}`.
    pub fn inverses(&self, group: &Group) -> ElementSet {
        let mut out = Self::empty(self.order);
        for x in self.iter() {
            out.bits.insert(group.inv(x));
        }
        out
    }

    /// Set literal form: indices separated by single spaces.
    pub fn literal(&self) -> String {
        self.iter().join(" ")
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.iter().join(","))
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.literal())
    }
}

/// Orders sets by their sorted element lists.
impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter()
            .cmp(other.iter())
            .then(self.order.cmp(&other.order))
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `Q(X) = {x y^-1 : x, y ∈ X}`, by the plain double loop.
pub fn right_quotient(group: &Group, x: &ElementSet) -> Result<ElementSet, SetError> {
    if x.group_order() != group.order() {
        return Err(SetError::OrderMismatch {
            expected: group.order(),
            found: x.group_order(),
        });
    }
    if x.is_empty() {
        return Err(SetError::Empty);
    }
    let mut out = ElementSet::empty(group.order());
    for a in x.iter() {
        for b in x.iter() {
            out.bits.insert(group.op(a, group.inv(b)));
        }
    }
    Ok(out)
}
