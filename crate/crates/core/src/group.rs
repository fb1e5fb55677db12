//! Finite groups stored as dense Cayley tables.
//!
//! Elements are the indices `0..order` and index `0` is always the identity.
//! Every constructor funnels through [`Group::from_table`], which validates the
//! group axioms before handing out a value.

use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use itertools::Itertools;
use thiserror::Error;

/// Index of a group element.
pub type Element = usize;

/// The identity is pinned at index 0 in every [`Group`].
pub const IDENTITY: Element = 0;

/// Largest order accepted for a dense table.
pub const MAX_ORDER: usize = 4096;

/// Associativity is always checked at or below this order.
pub const ALWAYS_CHECK_ASSOCIATIVITY: usize = 256;

/// Largest `n` accepted for `symmetric:n`.
pub const MAX_SYMMETRIC_DEGREE: usize = 6;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("unknown group family or missing table file: {0:?}")]
    UnknownFamily(String),
    #[error("invalid parameter for {family}: {reason}")]
    InvalidParameter {
        family: &'static str,
        reason: String,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("group order {order} exceeds the supported maximum {max}")]
    TooLarge { order: usize, max: usize },
    #[error("table entry [{row}][{col}] = {value} is not an element of a group of order {order}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("not a Latin square: {line} {index} repeats element {value}")]
    NotLatinSquare {
        line: &'static str,
        index: usize,
        value: usize,
    },
    #[error("index 0 is not the identity: 0*{g} or {g}*0 differs from {g}")]
    NoIdentity { g: usize },
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element {g} has no two-sided inverse")]
    NoInverse { g: usize },
}

/// Knobs for table validation.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Skip the O(n^3) associativity check for orders above
    /// [`ALWAYS_CHECK_ASSOCIATIVITY`]. Ignored for smaller groups.
    pub skip_large_associativity: bool,
}

/// A finite group given by its Cayley table.
///
/// Immutable after construction; share it freely between threads.
#[derive(Clone, PartialEq, Eq)]
pub struct Group {
    order: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    name: String,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl Group {
    /// Validates `rows` as a Cayley table with identity at index 0.
    ///
    /// Checks run in a fixed order (entry range, rows, columns, identity,
    /// associativity, inverses) and the first failure is reported with its
    /// witness indices.
    pub fn from_table(
        name: impl Into<String>,
        rows: &[Vec<usize>],
        options: BuildOptions,
    ) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::InvalidParameter {
                family: "table",
                reason: "a group needs at least one element".into(),
            });
        }
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge {
                order,
                max: MAX_ORDER,
            });
        }
        let mut table = Vec::with_capacity(order * order);
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != order {
                return Err(GroupError::Parse {
                    line: row + 1,
                    message: format!("row {row} has {} entries, expected {order}", entries.len()),
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryOutOfRange {
                        row,
                        col,
                        value,
                        order,
                    });
                }
                table.push(value as u32);
            }
        }

        let at = |g: usize, h: usize| table[g * order + h] as usize;

        let mut seen = vec![usize::MAX; order];
        for g in 0..order {
            for h in 0..order {
                let v = at(g, h);
                if seen[v] == g {
                    return Err(GroupError::NotLatinSquare {
                        line: "row",
                        index: g,
                        value: v,
                    });
                }
                seen[v] = g;
            }
        }
        seen.fill(usize::MAX);
        for h in 0..order {
            for g in 0..order {
                let v = at(g, h);
                if seen[v] == h {
                    return Err(GroupError::NotLatinSquare {
                        line: "column",
                        index: h,
                        value: v,
                    });
                }
                seen[v] = h;
            }
        }

        if let Some(g) = (0..order).find(|&g| at(IDENTITY, g) != g || at(g, IDENTITY) != g) {
            return Err(GroupError::NoIdentity { g });
        }

        if order <= ALWAYS_CHECK_ASSOCIATIVITY || !options.skip_large_associativity {
            for a in 0..order {
                for b in 0..order {
                    let ab = at(a, b);
                    for c in 0..order {
                        if at(ab, c) != at(a, at(b, c)) {
                            return Err(GroupError::NotAssociative { a, b, c });
                        }
                    }
                }
            }
        }

        let mut inv = Vec::with_capacity(order);
        for g in 0..order {
            // Latin rows guarantee exactly one right inverse.
            let h = (0..order).find(|&h| at(g, h) == IDENTITY).unwrap();
            if at(h, g) != IDENTITY {
                return Err(GroupError::NoInverse { g });
            }
            inv.push(h as u32);
        }

        Ok(Group {
            order,
            table,
            inv,
            name: name.into(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> Range<Element> {
        0..self.order
    }

    /// `g * h`, with range checking.
    pub fn mul(&self, g: Element, h: Element) -> Result<Element, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.op(g, h))
    }

    /// `g^-1`, with range checking.
    pub fn inverse(&self, g: Element) -> Result<Element, GroupError> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    /// Unchecked product for hot loops. Panics if an index is out of range.
    #[inline]
    pub fn op(&self, g: Element, h: Element) -> Element {
        assert!(h < self.order);
        self.table[g * self.order + h] as Element
    }

    /// Unchecked inverse for hot loops. Panics if `g` is out of range.
    #[inline]
    pub fn inv(&self, g: Element) -> Element {
        self.inv[g] as Element
    }

    pub fn check(&self, g: Element) -> Result<(), GroupError> {
        if g < self.order {
            Ok(())
        } else {
            Err(GroupError::IndexOutOfRange {
                index: g,
                order: self.order,
            })
        }
    }

    /// Rows of the Cayley table, as written to a table file.
    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.table.chunks(self.order)
    }

    /// Renders the group in the Cayley table file format.
    pub fn to_table_text(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.name, self.order);
        for row in self.rows() {
            out.push_str(&row.iter().join(" "));
            out.push('\n');
        }
        out
    }
}

/// A parsed group specification string.
///
/// Grammar: `cyclic:n`, `dihedral:n`, `symmetric:n`, `klein4`, `quaternion8`,
/// `product:A,B` (split at the first comma outside parentheses; wrap a nested
/// product operand in parentheses), or a path to a Cayley table file
/// (optionally prefixed with `file:`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Klein4,
    Quaternion8,
    Product(Box<GroupSpec>, Box<GroupSpec>),
    File(PathBuf),
}

impl GroupSpec {
    pub fn product(a: GroupSpec, b: GroupSpec) -> Self {
        GroupSpec::Product(Box::new(a), Box::new(b))
    }

    /// Order of the group this spec builds, without building it. `None` for
    /// table files.
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupSpec::Cyclic(n) => Some(*n),
            GroupSpec::Dihedral(n) => Some(2 * n),
            GroupSpec::Symmetric(n) => Some((1..=*n).product()),
            GroupSpec::Klein4 => Some(4),
            GroupSpec::Quaternion8 => Some(8),
            GroupSpec::Product(a, b) => Some(a.order()? * b.order()?),
            GroupSpec::File(_) => None,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Symmetric(n) => write!(f, "symmetric:{n}"),
            GroupSpec::Klein4 => f.write_str("klein4"),
            GroupSpec::Quaternion8 => f.write_str("quaternion8"),
            GroupSpec::Product(a, b) => {
                f.write_str("product:")?;
                for (i, part) in [a, b].into_iter().enumerate() {
                    if i == 1 {
                        f.write_str(",")?;
                    }
                    if matches!(**part, GroupSpec::Product(..)) {
                        write!(f, "({part})")?;
                    } else {
                        write!(f, "{part}")?;
                    }
                }
                Ok(())
            }
            GroupSpec::File(path) => write!(f, "{}", path.display()),
        }
    }
}

fn parse_param(family: &'static str, text: &str) -> Result<usize, GroupError> {
    text.trim()
        .parse()
        .map_err(|_| GroupError::InvalidParameter {
            family,
            reason: format!("{text:?} is not a non-negative integer"),
        })
}

fn strip_parens(text: &str) -> &str {
    let text = text.trim();
    match text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        Some(inner) => inner,
        None => text,
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (family, rest) = match s.split_once(':') {
            Some((family, rest)) => (family, Some(rest)),
            None => (s, None),
        };
        let spec = match (family, rest) {
            ("cyclic", Some(n)) => {
                let n = parse_param("cyclic", n)?;
                if n < 1 {
                    return Err(GroupError::InvalidParameter {
                        family: "cyclic",
                        reason: "n must be at least 1".into(),
                    });
                }
                GroupSpec::Cyclic(n)
            }
            ("dihedral", Some(n)) => {
                let n = parse_param("dihedral", n)?;
                if n < 3 {
                    return Err(GroupError::InvalidParameter {
                        family: "dihedral",
                        reason: "n must be at least 3".into(),
                    });
                }
                GroupSpec::Dihedral(n)
            }
            ("symmetric", Some(n)) => {
                let n = parse_param("symmetric", n)?;
                if !(1..=MAX_SYMMETRIC_DEGREE).contains(&n) {
                    return Err(GroupError::InvalidParameter {
                        family: "symmetric",
                        reason: format!("n must be in 1..={MAX_SYMMETRIC_DEGREE}"),
                    });
                }
                GroupSpec::Symmetric(n)
            }
            ("klein4", None) => GroupSpec::Klein4,
            ("quaternion8", None) => GroupSpec::Quaternion8,
            ("product", Some(rest)) => {
                let mut depth = 0i32;
                let mut split = None;
                for (i, c) in rest.char_indices() {
                    match c {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        ',' if depth == 0 => {
                            split = Some(i);
                            break;
                        }
                        _ => {}
                    }
                }
                let Some(i) = split else {
                    return Err(GroupError::InvalidParameter {
                        family: "product",
                        reason: format!("expected two comma-separated factors in {rest:?}"),
                    });
                };
                GroupSpec::product(
                    strip_parens(&rest[..i]).parse()?,
                    strip_parens(&rest[i + 1..]).parse()?,
                )
            }
            ("file", Some(path)) => GroupSpec::File(PathBuf::from(path)),
            _ => {
                let path = Path::new(s);
                if path.is_file() {
                    GroupSpec::File(path.to_path_buf())
                } else {
                    return Err(GroupError::UnknownFamily(s.to_string()));
                }
            }
        };
        Ok(spec)
    }
}

/// Builds and validates the group described by `spec`.
///
/// Element enumeration per family:
/// - `cyclic:n`: index `i` is the residue `i` under addition mod `n`.
/// - `dihedral:n`: index `k < n` is the rotation `r^k`, index `n + k` is the
///   reflection `s r^k`, with `s^2 = 1` and `r^k s = s r^-k`.
/// - `symmetric:n`: permutations of `0..n` in lexicographic one-line order,
///   composed right to left (`(g*h)(i) = g(h(i))`).
/// - `klein4`: `Z2 x Z2` with bitwise xor.
/// - `quaternion8`: `1, -1, i, -i, j, -j, k, -k`.
/// - `product:G,H`: the pair `(a, b)` has index `a * |H| + b`.
pub fn build_group(spec: &GroupSpec) -> Result<Group, GroupError> {
    build_group_with(spec, BuildOptions::default())
}

pub fn build_group_with(spec: &GroupSpec, options: BuildOptions) -> Result<Group, GroupError> {
    if let Some(order) = spec.order() {
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge {
                order,
                max: MAX_ORDER,
            });
        }
    }
    let rows = match spec {
        GroupSpec::Cyclic(n) => cyclic_rows(*n),
        GroupSpec::Dihedral(n) => dihedral_rows(*n),
        GroupSpec::Symmetric(n) => symmetric_rows(*n),
        GroupSpec::Klein4 => (0..4).map(|g| (0..4).map(|h| g ^ h).collect()).collect(),
        GroupSpec::Quaternion8 => quaternion_rows(),
        GroupSpec::Product(a, b) => {
            let a = build_group_with(a, options)?;
            let b = build_group_with(b, options)?;
            product_rows(&a, &b)
        }
        GroupSpec::File(path) => {
            let text = fs::read_to_string(path).map_err(|source| GroupError::Io {
                path: path.clone(),
                source,
            })?;
            parse_table(&text)?
        }
    };
    Group::from_table(spec.to_string(), &rows, options)
}

fn cyclic_rows(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|g| (0..n).map(|h| (g + h) % n).collect())
        .collect()
}

fn dihedral_rows(n: usize) -> Vec<Vec<usize>> {
    // (s^f1 r^k1)(s^f2 r^k2) = s^(f1+f2) r^(±k1 + k2), sign negative iff f2 = 1.
    let decode = |g: usize| (g / n, g % n);
    (0..2 * n)
        .map(|g| {
            let (f1, k1) = decode(g);
            (0..2 * n)
                .map(|h| {
                    let (f2, k2) = decode(h);
                    let k1 = if f2 == 1 { (n - k1) % n } else { k1 };
                    ((f1 + f2) % 2) * n + (k1 + k2) % n
                })
                .collect()
        })
        .collect()
}

fn symmetric_rows(n: usize) -> Vec<Vec<usize>> {
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let index: std::collections::HashMap<&[usize], usize> = perms
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i))
        .collect();
    perms
        .iter()
        .map(|g| {
            perms
                .iter()
                .map(|h| {
                    let composed: Vec<usize> = h.iter().map(|&x| g[x]).collect();
                    index[composed.as_slice()]
                })
                .collect()
        })
        .collect()
}

fn quaternion_rows() -> Vec<Vec<usize>> {
    // Units 1, i, j, k as 0..4; products as (sign flip, unit).
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    (0..8)
        .map(|g| {
            (0..8)
                .map(|h| {
                    let (flip, unit) = UNIT[g / 2][h / 2];
                    2 * unit + (g % 2 + h % 2 + flip) % 2
                })
                .collect()
        })
        .collect()
}

fn product_rows(a: &Group, b: &Group) -> Vec<Vec<usize>> {
    let m = b.order();
    let n = a.order() * m;
    (0..n)
        .map(|g| {
            (0..n)
                .map(|h| a.op(g / m, h / m) * m + b.op(g % m, h % m))
                .collect()
        })
        .collect()
}

/// Parses the Cayley table text format: the order `n` on the first
/// non-comment line, then `n` rows of `n` whitespace-separated indices.
/// Lines starting with `#` and blank lines are ignored.
pub fn parse_table(text: &str) -> Result<Vec<Vec<usize>>, GroupError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines.next().ok_or(GroupError::Parse {
        line: 1,
        message: "missing group order".into(),
    })?;
    let n: usize = header.parse().map_err(|_| GroupError::Parse {
        line,
        message: format!("expected group order, found {header:?}"),
    })?;
    if n == 0 || n > MAX_ORDER {
        return Err(GroupError::Parse {
            line,
            message: format!("group order must be in 1..={MAX_ORDER}"),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for (line, text) in lines {
        if rows.len() == n {
            return Err(GroupError::Parse {
                line,
                message: format!("unexpected extra row; the table has {n} rows"),
            });
        }
        let row = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| GroupError::Parse {
                    line,
                    message: format!("{tok:?} is not an element index"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(GroupError::Parse {
                line,
                message: format!("expected {n} entries, found {}", row.len()),
            });
        }
        if let Some(&bad) = row.iter().find(|&&v| v >= n) {
            return Err(GroupError::Parse {
                line,
                message: format!("entry {bad} is out of range 0..{n}"),
            });
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(GroupError::Parse {
            line: text.lines().count(),
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    Ok(rows)
}

/// The built-in list of groups used by sweeps and the acceptance suite,
/// all of order at most 24:
///
/// - `cyclic:1` ..= `cyclic:24`
/// - `dihedral:3` ..= `dihedral:12`
/// - `symmetric:1` ..= `symmetric:4`
/// - `klein4`, `quaternion8`
/// - `product:` of `cyclic:2,cyclic:2`, `cyclic:2,cyclic:4`,
///   `cyclic:2,(product:cyclic:2,cyclic:2)`, `cyclic:3,cyclic:3`,
///   `cyclic:2,cyclic:6`, `cyclic:2,symmetric:3`, `cyclic:2,dihedral:4`,
///   `cyclic:2,quaternion8`, `cyclic:4,cyclic:4`, `cyclic:3,symmetric:3`,
///   `cyclic:2,dihedral:5`
pub fn catalog() -> Vec<GroupSpec> {
    use GroupSpec::*;
    let mut specs: Vec<GroupSpec> = (1..=24).map(Cyclic).collect();
    specs.extend((3..=12).map(Dihedral));
    specs.extend((1..=4).map(Symmetric));
    specs.push(Klein4);
    specs.push(Quaternion8);
    let pairs = [
        (Cyclic(2), Cyclic(2)),
        (Cyclic(2), Cyclic(4)),
        (Cyclic(2), GroupSpec::product(Cyclic(2), Cyclic(2))),
        (Cyclic(3), Cyclic(3)),
        (Cyclic(2), Cyclic(6)),
        (Cyclic(2), Symmetric(3)),
        (Cyclic(2), Dihedral(4)),
        (Cyclic(2), Quaternion8),
        (Cyclic(4), Cyclic(4)),
        (Cyclic(3), Symmetric(3)),
        (Cyclic(2), Dihedral(5)),
    ];
    specs.extend(pairs.into_iter().map(|(a, b)| GroupSpec::product(a, b)));
    specs
}

/// Catalog entries of order at most `max_order`, in catalog order.
pub fn catalog_up_to(max_order: usize) -> Vec<GroupSpec> {
    catalog()
        .into_iter()
        .filter(|s| s.order().is_some_and(|n| n <= max_order))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: &str) -> Group {
        build_group(&spec.parse().unwrap()).unwrap()
    }

    #[test]
    fn cyclic_arithmetic() {
        let z6 = g("cyclic:6");
        assert_eq!(z6.mul(2, 5).unwrap(), 1);
        assert_eq!(z6.inverse(2).unwrap(), 4);
        assert_eq!(z6.inverse(0).unwrap(), 0);
        for h in z6.elements() {
            assert_eq!(z6.mul(0, h).unwrap(), h);
        }
    }

    #[test]
    fn trivial_group() {
        let t = g("cyclic:1");
        assert_eq!(t.order(), 1);
        assert_eq!(t.mul(0, 0).unwrap(), 0);
    }

    #[test]
    fn out_of_range_is_an_error() {
        let z6 = g("cyclic:6");
        assert!(matches!(
            z6.mul(6, 0),
            Err(GroupError::IndexOutOfRange { index: 6, order: 6 })
        ));
        assert!(z6.inverse(17).is_err());
    }

    #[test]
    fn symmetric_transpositions_compose() {
        // Lexicographic order of S3: 012, 021, 102, 120, 201, 210.
        let s3 = g("symmetric:3");
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let compose = |a: [usize; 3], b: [usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
        let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        // (0 1) after (1 2) is the 3-cycle 120.
        assert_eq!(s3.mul(2, 1).unwrap(), 3);
        assert_eq!(s3.mul(1, 2).unwrap(), 4);
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(s3.op(a, b), idx(compose(perms[a], perms[b])));
            }
        }
        for t in [1, 2, 5] {
            assert_eq!(s3.inverse(t).unwrap(), t);
        }
    }

    #[test]
    fn dihedral_layout() {
        let d4 = g("dihedral:4");
        assert_eq!(d4.order(), 8);
        // r * r = r^2, s * s = 1, r * s = s r^-1 = s r^3.
        assert_eq!(d4.op(1, 1), 2);
        assert_eq!(d4.op(4, 4), 0);
        assert_eq!(d4.op(1, 4), 7);
        for k in 4..8 {
            assert_eq!(d4.inv(k), k);
        }
    }

    #[test]
    fn quaternion_relations() {
        let q = g("quaternion8");
        let (minus_one, i, j, k) = (1, 2, 4, 6);
        assert_eq!(q.op(i, i), minus_one);
        assert_eq!(q.op(j, j), minus_one);
        assert_eq!(q.op(k, k), minus_one);
        assert_eq!(q.op(i, j), k);
        assert_eq!(q.op(j, i), k + 1);
    }

    #[test]
    fn product_layout() {
        let p = g("product:cyclic:2,cyclic:3");
        assert_eq!(p.order(), 6);
        // (1,1) * (1,2) = (0,0)
        assert_eq!(p.op(4, 5), 0);
        // (1,0) * (0,1) = (1,1)
        assert_eq!(p.op(3, 1), 4);
    }

    #[test]
    fn spec_round_trips_through_display() {
        for spec in catalog() {
            let text = spec.to_string();
            assert_eq!(text.parse::<GroupSpec>().unwrap(), spec, "{text}");
        }
    }

    #[test]
    fn nested_product_needs_parentheses() {
        let spec: GroupSpec = "product:(product:cyclic:2,cyclic:2),cyclic:3"
            .parse()
            .unwrap();
        assert_eq!(spec.order(), Some(12));
        assert!("product:product:cyclic:2,cyclic:2,cyclic:3"
            .parse::<GroupSpec>()
            .is_err());
    }

    #[test]
    fn bad_specs() {
        for bad in [
            "cyclic:0",
            "dihedral:2",
            "symmetric:7",
            "symmetric:0",
            "klein5",
            "cyclic:x",
            "product:cyclic:2",
        ] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn catalog_contents() {
        let cat = catalog();
        for n in 1..=8 {
            assert!(cat.contains(&GroupSpec::Cyclic(n)));
        }
        assert!(cat.contains(&GroupSpec::Symmetric(3)));
        for spec in &cat {
            let group = build_group(spec).unwrap();
            assert_eq!(Some(group.order()), spec.order());
            assert!(group.order() <= 24);
        }
    }

    #[test]
    fn build_is_deterministic() {
        for spec in catalog() {
            assert_eq!(build_group(&spec).unwrap(), build_group(&spec).unwrap());
        }
    }

    #[test]
    fn table_text_round_trips() {
        let s3 = g("symmetric:3");
        let rows = parse_table(&s3.to_table_text()).unwrap();
        let again = Group::from_table("symmetric:3", &rows, BuildOptions::default()).unwrap();
        assert_eq!(again, s3);
    }

    #[test]
    fn repeated_row_entry_is_not_latin() {
        let text = "# broken\n3\n0 1 2\n1 1 0\n2 0 1\n";
        let rows = parse_table(text).unwrap();
        let err = Group::from_table("x", &rows, BuildOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            GroupError::NotLatinSquare {
                line: "row",
                index: 1,
                value: 1
            }
        ));
        assert!(err.to_string().contains("not a Latin square"));
    }

    #[test]
    fn identity_must_be_index_zero() {
        // Z2 with the identity stored at index 1.
        let rows = vec![vec![1, 0], vec![0, 1]];
        let err = Group::from_table("x", &rows, BuildOptions::default()).unwrap_err();
        assert!(matches!(err, GroupError::NoIdentity { g: 0 }));
    }

    #[test]
    fn non_associative_latin_square_is_rejected() {
        // A loop of order 5 with identity 0 that is not a group.
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = Group::from_table("loop5", &rows, BuildOptions::default()).unwrap_err();
        assert!(matches!(err, GroupError::NotAssociative { .. }), "{err}");
    }

    #[test]
    fn malformed_table_text() {
        assert!(matches!(
            parse_table("2\n0 1\n"),
            Err(GroupError::Parse { .. })
        ));
        assert!(matches!(
            parse_table("2\n0 1\n1 x\n"),
            Err(GroupError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_table("2\n0 1\n1 0 1\n"),
            Err(GroupError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_table("2\n0 1\n1 5\n"),
            Err(GroupError::Parse { line: 3, .. })
        ));
    }
}
