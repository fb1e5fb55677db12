//! Triple Product Property: verification, normalization and the necessary
//! conditions used for pruning.

use std::fmt;

use thiserror::Error;

use crate::group::{Element, Group, IDENTITY};
use crate::setcalc::{right_quotient, ElementSet, SetError};

/// Position of a set within a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    S,
    T,
    U,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::S, Role::T, Role::U];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::S => "S",
            Role::T => "T",
            Role::U => "U",
        })
    }
}

#[derive(Debug, Error)]
pub enum TppError {
    #[error("set {0} is empty")]
    EmptySet(Role),
    #[error("set {role}: {source}")]
    Set {
        role: Role,
        #[source]
        source: SetError,
    },
    #[error("triple does not satisfy the triple product property")]
    NotTpp,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Three nonempty subsets of one group.
#[derive(Clone)]
pub struct TppTriple<'g> {
    group: &'g Group,
    sets: [ElementSet; 3],
}

impl PartialEq for TppTriple<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.sets == other.sets
            && (std::ptr::eq(self.group, other.group) || self.group == other.group)
    }
}

impl Eq for TppTriple<'_> {}

impl<'g> TppTriple<'g> {
    pub fn new(
        group: &'g Group,
        s: ElementSet,
        t: ElementSet,
        u: ElementSet,
    ) -> Result<Self, TppError> {
        let sets = [s, t, u];
        for (role, set) in Role::ALL.into_iter().zip(&sets) {
            if set.group_order() != group.order() {
                return Err(TppError::Set {
                    role,
                    source: SetError::OrderMismatch {
                        expected: group.order(),
                        found: set.group_order(),
                    },
                });
            }
            if set.is_empty() {
                return Err(TppError::EmptySet(role));
            }
        }
        Ok(TppTriple { group, sets })
    }

    /// Builds a triple from element lists.
    pub fn from_slices(
        group: &'g Group,
        s: &[Element],
        t: &[Element],
        u: &[Element],
    ) -> Result<Self, TppError> {
        let make = |role, xs: &[Element]| {
            ElementSet::from_elements(group.order(), xs.iter().copied())
                .map_err(|source| TppError::Set { role, source })
        };
        Self::new(
            group,
            make(Role::S, s)?,
            make(Role::T, t)?,
            make(Role::U, u)?,
        )
    }

    /// `({1}, {1}, {1})`.
    pub fn trivial(group: &'g Group) -> Self {
        let one = ElementSet::identity(group.order());
        TppTriple {
            group,
            sets: [one.clone(), one.clone(), one],
        }
    }

    pub(crate) fn from_parts(group: &'g Group, sets: [ElementSet; 3]) -> Self {
        debug_assert!(sets
            .iter()
            .all(|s| !s.is_empty() && s.group_order() == group.order()));
        TppTriple { group, sets }
    }

    pub fn group(&self) -> &'g Group {
        self.group
    }

    pub fn s(&self) -> &ElementSet {
        &self.sets[0]
    }

    pub fn t(&self) -> &ElementSet {
        &self.sets[1]
    }

    pub fn u(&self) -> &ElementSet {
        &self.sets[2]
    }

    pub fn get(&self, role: Role) -> &ElementSet {
        &self.sets[role.index()]
    }

    pub fn sets(&self) -> &[ElementSet; 3] {
        &self.sets
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sets.each_ref().map(ElementSet::len)
    }

    /// `|S| * |T| * |U|`.
    pub fn product(&self) -> u64 {
        self.sizes().iter().map(|&n| n as u64).product()
    }

    /// `[Q(S), Q(T), Q(U)]`.
    pub fn quotients(&self) -> [ElementSet; 3] {
        self.sets
            .each_ref()
            .map(|x| right_quotient(self.group, x).expect("triple sets are nonempty"))
    }

    /// Canonical ordering key: sizes first, then the element lists.
    pub fn sort_key(&self) -> ([usize; 3], &[ElementSet; 3]) {
        (self.sizes(), &self.sets)
    }

    /// Triple file form: one set literal per line, in the order S, T, U.
    pub fn to_triple_text(&self) -> String {
        self.sets.iter().map(|s| s.literal() + "\n").collect()
    }

    /// Parses the triple file format: three non-comment lines, each a set
    /// literal, in the order S, T, U. Lines starting with `#` and blank lines
    /// are skipped.
    pub fn parse(group: &'g Group, text: &str) -> Result<Self, TppError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.len() != 3 {
            return Err(TppError::Parse {
                line: lines.get(3).map_or(text.lines().count(), |l| l.0),
                message: format!("expected 3 set lines (S, T, U), found {}", lines.len()),
            });
        }
        let mut sets = Vec::with_capacity(3);
        for (role, (line, literal)) in Role::ALL.into_iter().zip(lines) {
            let set = ElementSet::parse(group.order(), literal).map_err(|e| TppError::Parse {
                line,
                message: format!("set {role}: {e}"),
            })?;
            if set.is_empty() {
                return Err(TppError::Parse {
                    line,
                    message: format!("set {role} is empty"),
                });
            }
            sets.push(set);
        }
        let [s, t, u]: [ElementSet; 3] = sets.try_into().unwrap();
        Self::new(group, s, t, u)
    }
}

impl fmt::Debug for TppTriple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?}, {:?}, {:?})",
            self.sets[0], self.sets[1], self.sets[2]
        )
    }
}

impl fmt::Display for TppTriple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S={} T={} U={}",
            self.sets[0], self.sets[1], self.sets[2]
        )
    }
}

/// Decides the TPP from the three right quotients.
///
/// Uses the pair loop: with `u` forced to `(st)^-1`, the property fails iff
/// some `(s, t) != (1, 1)` has `(st)^-1 ∈ Q(U)`. Since `stu = 1` is invariant
/// under cyclic rotation of `(s, t, u)`, the two smallest quotients are used
/// as the loop dimensions.
pub fn tpp_check_quotients(group: &Group, quotients: &[ElementSet; 3]) -> bool {
    let largest = (0..3).max_by_key(|&i| (quotients[i].len(), i)).unwrap();
    // Rotation (a, b, c) with c the largest quotient and stu=1 ⇔ abc=1.
    let (a, b, c) = match largest {
        0 => (&quotients[1], &quotients[2], &quotients[0]),
        1 => (&quotients[2], &quotients[0], &quotients[1]),
        _ => (&quotients[0], &quotients[1], &quotients[2]),
    };
    for x in a.iter() {
        for y in b.iter() {
            if x == IDENTITY && y == IDENTITY {
                continue;
            }
            if c.contains(group.inv(group.op(x, y))) {
                return false;
            }
        }
    }
    true
}

/// Whether the triple satisfies the Triple Product Property.
pub fn tpp_check(triple: &TppTriple<'_>) -> bool {
    tpp_check_quotients(triple.group, &triple.quotients())
}

fn anchor(set: &ElementSet) -> Element {
    if set.contains(IDENTITY) {
        IDENTITY
    } else {
        set.iter().next().expect("triple sets are nonempty")
    }
}

/// Right-translates each set so that it contains the identity.
///
/// Each set `X'` becomes `X' x0^-1` where the anchor `x0` is the identity if
/// present and otherwise the smallest index in `X'`. Sizes and right quotients
/// are preserved, and for a TPP triple the results meet pairwise in exactly
/// the identity.
pub fn normalize<'g>(triple: &TppTriple<'g>) -> Result<TppTriple<'g>, TppError> {
    if !tpp_check(triple) {
        return Err(TppError::NotTpp);
    }
    let group = triple.group;
    let sets = triple
        .sets
        .each_ref()
        .map(|x| x.right_translate(group, group.inv(anchor(x))));
    Ok(TppTriple::from_parts(group, sets))
}

/// `|S∩T| ≤ 1`, `|T∩U| ≤ 1` and `|S∩U| ≤ 1`. Necessary for the TPP, not
/// sufficient.
pub fn minimal_disjointness_ok(triple: &TppTriple<'_>) -> bool {
    pairs(&triple.sets).all(|(x, y)| x.intersection_len(y).unwrap() <= 1)
}

/// `Q(X) ∩ Q(Y) = {1}` for every pair of distinct roles. Necessary for the
/// TPP, not sufficient.
pub fn q_intersections_trivial(triple: &TppTriple<'_>) -> bool {
    quotient_intersections_trivial(&triple.quotients())
}

pub(crate) fn quotient_intersections_trivial(quotients: &[ElementSet; 3]) -> bool {
    // Every right quotient contains the identity, so a count of one means {1}.
    pairs(quotients).all(|(x, y)| x.intersection_len(y).unwrap() == 1)
}

fn pairs(sets: &[ElementSet; 3]) -> impl Iterator<Item = (&ElementSet, &ElementSet)> {
    [(0, 1), (1, 2), (0, 2)]
        .into_iter()
        .map(move |(i, j)| (&sets[i], &sets[j]))
}

/// Additive size bounds of a triple against `|G| + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub sum_sizes: usize,
    pub sum_q_sizes: usize,
    pub limit: usize,
    pub murthy_ok: bool,
    pub q_bound_ok: bool,
}

pub fn bounds(triple: &TppTriple<'_>) -> BoundsReport {
    let limit = triple.group.order() + 2;
    let sum_sizes = triple.sizes().iter().sum();
    let sum_q_sizes = triple.quotients().iter().map(ElementSet::len).sum();
    BoundsReport {
        sum_sizes,
        sum_q_sizes,
        limit,
        murthy_ok: sum_sizes <= limit,
        q_bound_ok: sum_q_sizes <= limit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec};

    fn group(spec: &str) -> Group {
        build_group(&spec.parse::<GroupSpec>().unwrap()).unwrap()
    }

    #[test]
    fn trivial_triple_is_tpp() {
        let z6 = group("cyclic:6");
        let t = TppTriple::trivial(&z6);
        assert!(tpp_check(&t));
        assert!(minimal_disjointness_ok(&t));
        assert!(q_intersections_trivial(&t));
        let b = bounds(&t);
        assert_eq!(b.sum_sizes, 3);
        assert_eq!(b.limit, 8);
        assert!(b.murthy_ok && b.q_bound_ok);
    }

    #[test]
    fn whole_group_with_identities_is_tight() {
        for spec in ["cyclic:1", "cyclic:6", "symmetric:3", "quaternion8"] {
            let g = group(spec);
            let all: Vec<_> = g.elements().collect();
            let t = TppTriple::from_slices(&g, &all, &[0], &[0]).unwrap();
            assert!(tpp_check(&t));
            let b = bounds(&t);
            assert_eq!(b.sum_sizes, g.order() + 2);
            assert_eq!(b.sum_q_sizes, g.order() + 2);
            assert!(b.murthy_ok && b.q_bound_ok);
        }
    }

    #[test]
    fn z2_pair_fails() {
        let z2 = group("cyclic:2");
        let t = TppTriple::from_slices(&z2, &[0, 1], &[0, 1], &[0]).unwrap();
        assert!(!tpp_check(&t));
        assert!(!q_intersections_trivial(&t));
        assert!(!minimal_disjointness_ok(&t));
        assert!(matches!(normalize(&t), Err(TppError::NotTpp)));
    }

    #[test]
    fn disjointness_counts_pairs() {
        let z6 = group("cyclic:6");
        let t = TppTriple::from_slices(&z6, &[0, 1, 2], &[0, 1, 3], &[0]).unwrap();
        assert!(!minimal_disjointness_ok(&t));
    }

    #[test]
    fn normalize_translates_to_identity() {
        let z6 = group("cyclic:6");
        let t = TppTriple::from_slices(&z6, &[2, 3], &[0], &[0]).unwrap();
        let n = normalize(&t).unwrap();
        assert_eq!(n.s().to_vec(), vec![0, 1]);
        assert_eq!(n.t().to_vec(), vec![0]);
        assert_eq!(n.u().to_vec(), vec![0]);
        assert_eq!(normalize(&n).unwrap(), n);
    }

    #[test]
    fn normalized_input_is_unchanged() {
        let z6 = group("cyclic:6");
        let t = TppTriple::from_slices(&z6, &[0, 1], &[0, 2], &[0]).unwrap();
        if tpp_check(&t) {
            assert_eq!(normalize(&t).unwrap(), t);
        }
        let full = TppTriple::from_slices(&z6, &[0, 1, 2, 3, 4, 5], &[0], &[0]).unwrap();
        assert_eq!(normalize(&full).unwrap(), full);
    }

    #[test]
    fn empty_sets_rejected() {
        let z6 = group("cyclic:6");
        assert!(matches!(
            TppTriple::from_slices(&z6, &[0], &[], &[0]),
            Err(TppError::EmptySet(Role::T))
        ));
        assert!(TppTriple::from_slices(&z6, &[0], &[6], &[0]).is_err());
    }

    #[test]
    fn triple_file_parsing() {
        let z6 = group("cyclic:6");
        let t = TppTriple::parse(&z6, "# S\n2 3\n\n0\n# U\n0\n").unwrap();
        assert_eq!(t.s().to_vec(), vec![2, 3]);
        assert_eq!(TppTriple::parse(&z6, &t.to_triple_text()).unwrap(), t);
        assert!(matches!(
            TppTriple::parse(&z6, "0\n0\n"),
            Err(TppError::Parse { .. })
        ));
        assert!(matches!(
            TppTriple::parse(&z6, "0\n0 9\n0\n"),
            Err(TppError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            TppTriple::parse(&z6, "0\n0\n0\n1\n"),
            Err(TppError::Parse { line: 4, .. })
        ));
    }
}
