//! Integer group-ring arithmetic and matrix multiplication through a TPP
//! triple.
//!
//! For a triple `(S, T, U)`, an `S×T` matrix `A` embeds as
//! `Σ A[s,t] · s⁻¹t` and a `T×U` matrix `B` as `Σ B[t,u] · t⁻¹u`. Their
//! group-ring product carries `(AB)[s,u]` on the basis element `s⁻¹u`, and
//! the TPP is exactly what keeps unrelated terms off those elements.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use itertools::Itertools;
use rand::Rng;
use thiserror::Error;

use crate::group::{Element, Group, IDENTITY};
use crate::setcalc::ElementSet;
use crate::tpp::{tpp_check, TppTriple};

/// Largest absolute entry used by random matrix fuzzing.
pub const FUZZ_ENTRY_BOUND: i64 = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealizeError {
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("coefficient overflow in 64-bit arithmetic")]
    Overflow,
    #[error("triple does not satisfy the triple product property")]
    NotTpp,
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("duplicate {axis} label {label}")]
    DuplicateLabel { axis: &'static str, label: Element },
    #[error("matrix has {found} entries, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("embedding collision on basis element {0}")]
    EmbeddingCollision(Element),
    #[error("element {index} out of range for group of order {order}")]
    OutOfRange { index: Element, order: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An element of the integer group ring, stored sparsely without zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElement<'g> {
    group: &'g Group,
    coeffs: BTreeMap<Element, i64>,
}

impl<'g> GroupRingElement<'g> {
    pub fn zero(group: &'g Group) -> Self {
        GroupRingElement {
            group,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis element `g` with coefficient 1.
    pub fn basis(group: &'g Group, g: Element) -> Result<Self, RealizeError> {
        Self::from_terms(group, [(g, 1)])
    }

    /// Sums `(element, coefficient)` terms; repeated elements accumulate.
    pub fn from_terms(
        group: &'g Group,
        terms: impl IntoIterator<Item = (Element, i64)>,
    ) -> Result<Self, RealizeError> {
        let mut out = Self::zero(group);
        for (g, c) in terms {
            if g >= group.order() {
                return Err(RealizeError::OutOfRange {
                    index: g,
                    order: group.order(),
                });
            }
            out.add_term(g, c)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, g: Element, c: i64) -> Result<(), RealizeError> {
        if c == 0 {
            return Ok(());
        }
        let slot = self.coeffs.entry(g).or_insert(0);
        *slot = slot.checked_add(c).ok_or(RealizeError::Overflow)?;
        if *slot == 0 {
            self.coeffs.remove(&g);
        }
        Ok(())
    }

    pub fn group(&self) -> &'g Group {
        self.group
    }

    pub fn coeff(&self, g: Element) -> i64 {
        self.coeffs.get(&g).copied().unwrap_or(0)
    }

    /// Nonzero terms in increasing element order.
    pub fn terms(&self) -> impl Iterator<Item = (Element, i64)> + '_ {
        self.coeffs.iter().map(|(&g, &c)| (g, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn same_group(&self, other: &Self) -> Result<(), RealizeError> {
        if std::ptr::eq(self.group, other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(RealizeError::GroupMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, RealizeError> {
        self.same_group(other)?;
        let mut out = self.clone();
        for (g, c) in other.terms() {
            out.add_term(g, c)?;
        }
        Ok(out)
    }

    /// Convolution: `c[g] = Σ_{hk = g} a[h] b[k]`, with checked arithmetic.
    pub fn ring_mul(&self, other: &Self) -> Result<Self, RealizeError> {
        self.same_group(other)?;
        let mut out = Self::zero(self.group);
        for (h, a) in self.terms() {
            for (k, b) in other.terms() {
                let c = a.checked_mul(b).ok_or(RealizeError::Overflow)?;
                out.add_term(self.group.op(h, k), c)?;
            }
        }
        Ok(out)
    }
}

/// A dense integer matrix whose rows and columns are labelled by group
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedMatrix {
    rows: Vec<Element>,
    cols: Vec<Element>,
    entries: Vec<i64>,
}

fn check_labels(axis: &'static str, labels: &[Element]) -> Result<(), RealizeError> {
    let mut seen = HashSet::new();
    for &l in labels {
        if !seen.insert(l) {
            return Err(RealizeError::DuplicateLabel { axis, label: l });
        }
    }
    Ok(())
}

impl IndexedMatrix {
    /// `entries` is row-major.
    pub fn new(
        rows: Vec<Element>,
        cols: Vec<Element>,
        entries: Vec<i64>,
    ) -> Result<Self, RealizeError> {
        check_labels("row", &rows)?;
        check_labels("column", &cols)?;
        if entries.len() != rows.len() * cols.len() {
            return Err(RealizeError::Shape {
                expected: rows.len() * cols.len(),
                found: entries.len(),
            });
        }
        Ok(IndexedMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// A matrix with labels `rows × cols` and entries uniform in
    /// `[-bound, bound]`.
    pub fn random(
        rows: &[Element],
        cols: &[Element],
        bound: i64,
        rng: &mut impl Rng,
    ) -> Result<Self, RealizeError> {
        let entries = (0..rows.len() * cols.len())
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        Self::new(rows.to_vec(), cols.to_vec(), entries)
    }

    pub fn rows(&self) -> &[Element] {
        &self.rows
    }

    pub fn cols(&self) -> &[Element] {
        &self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols.len() + j]
    }

    /// The ordinary `O(n³)` product. Requires `self.cols == other.rows`.
    pub fn schoolbook(&self, other: &IndexedMatrix) -> Result<IndexedMatrix, RealizeError> {
        if self.cols != other.rows {
            return Err(RealizeError::LabelMismatch(
                "left column labels differ from right row labels".into(),
            ));
        }
        let (n, m) = self.shape();
        let p = other.cols.len();
        let mut entries = Vec::with_capacity(n * p);
        for i in 0..n {
            for k in 0..p {
                let mut acc = 0i64;
                for j in 0..m {
                    let term = self
                        .get(i, j)
                        .checked_mul(other.get(j, k))
                        .ok_or(RealizeError::Overflow)?;
                    acc = acc.checked_add(term).ok_or(RealizeError::Overflow)?;
                }
                entries.push(acc);
            }
        }
        IndexedMatrix::new(self.rows.clone(), other.cols.clone(), entries)
    }

    /// Parses the matrix file format: `rows cols`, the row-label line, the
    /// column-label line, then `rows` lines of `cols` integers. Lines
    /// starting with `#` and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, RealizeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next_line = |what: &str| {
            lines.next().ok_or_else(|| RealizeError::Parse {
                line: text.lines().count(),
                message: format!("missing {what}"),
            })
        };
        fn ints<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>, RealizeError> {
            text.split_whitespace()
                .map(|tok| {
                    tok.parse().map_err(|_| RealizeError::Parse {
                        line,
                        message: format!("{tok:?} is not an integer"),
                    })
                })
                .collect()
        }
        let (line, header) = next_line("dimension line")?;
        let dims: Vec<usize> = ints(line, header)?;
        let [nrows, ncols] = dims[..] else {
            return Err(RealizeError::Parse {
                line,
                message: "expected \"rows cols\"".into(),
            });
        };
        let mut labels = |what: &str, n: usize| -> Result<Vec<Element>, RealizeError> {
            let (line, text) = next_line(what)?;
            let v: Vec<Element> = ints(line, text)?;
            if v.len() != n {
                return Err(RealizeError::Parse {
                    line,
                    message: format!("expected {n} {what}, found {}", v.len()),
                });
            }
            Ok(v)
        };
        let rows = labels("row labels", nrows)?;
        let cols = labels("column labels", ncols)?;
        let mut entries = Vec::with_capacity(nrows * ncols);
        for _ in 0..nrows {
            let (line, text) = next_line("matrix row")?;
            let row: Vec<i64> = ints(line, text)?;
            if row.len() != ncols {
                return Err(RealizeError::Parse {
                    line,
                    message: format!("expected {ncols} entries, found {}", row.len()),
                });
            }
            entries.extend(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(RealizeError::Parse {
                line,
                message: "unexpected trailing line".into(),
            });
        }
        IndexedMatrix::new(rows, cols, entries)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.rows.len(), self.cols.len());
        let _ = writeln!(out, "{}", self.rows.iter().join(" "));
        let _ = writeln!(out, "{}", self.cols.iter().join(" "));
        for row in self.entries.chunks(self.cols.len().max(1)) {
            let _ = writeln!(out, "{}", row.iter().join(" "));
        }
        out
    }
}

fn same_labels(what: &str, labels: &[Element], set: &ElementSet) -> Result<(), RealizeError> {
    let as_set = ElementSet::from_elements(set.group_order(), labels.iter().copied())
        .map_err(|e| RealizeError::LabelMismatch(format!("{what}: {e}")))?;
    if as_set.len() == labels.len() && &as_set == set {
        Ok(())
    } else {
        Err(RealizeError::LabelMismatch(format!(
            "{what} are {{{}}}, expected {set}",
            labels.iter().join(" ")
        )))
    }
}

/// Embeds `Σ m[r,c] · r⁻¹c`. With `strict`, two cells mapping to the same
/// basis element is an error; otherwise their coefficients add up.
fn embed<'g>(
    group: &'g Group,
    m: &IndexedMatrix,
    strict: bool,
) -> Result<GroupRingElement<'g>, RealizeError> {
    let mut seen = HashSet::new();
    let mut out = GroupRingElement::zero(group);
    for (i, &r) in m.rows.iter().enumerate() {
        let r_inv = group.inv(r);
        for (j, &c) in m.cols.iter().enumerate() {
            let key = group.op(r_inv, c);
            if strict && !seen.insert(key) {
                return Err(RealizeError::EmbeddingCollision(key));
            }
            out.add_term(key, m.get(i, j))?;
        }
    }
    Ok(out)
}

fn multiply_through(
    group: &Group,
    a: &IndexedMatrix,
    b: &IndexedMatrix,
    strict: bool,
) -> Result<IndexedMatrix, RealizeError> {
    let product = embed(group, a, strict)?.ring_mul(&embed(group, b, strict)?)?;
    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(a.rows.len() * b.cols.len());
    for &s in &a.rows {
        let s_inv = group.inv(s);
        for &u in &b.cols {
            let key = group.op(s_inv, u);
            if strict && !seen.insert(key) {
                return Err(RealizeError::EmbeddingCollision(key));
            }
            entries.push(product.coeff(key));
        }
    }
    IndexedMatrix::new(a.rows.clone(), b.cols.clone(), entries)
}

/// Multiplies `A` (rows labelled by S, columns by T) and `B` (rows by T in
/// the same order as `A`'s columns, columns by U) inside the group ring and
/// reads `C[s,u]` off the coefficient of `s⁻¹u`. For a TPP triple the result
/// equals the schoolbook product exactly.
pub fn matmul_via_group(
    a: &IndexedMatrix,
    b: &IndexedMatrix,
    triple: &TppTriple<'_>,
) -> Result<IndexedMatrix, RealizeError> {
    let group = triple.group();
    for &l in a.rows.iter().chain(&a.cols).chain(&b.rows).chain(&b.cols) {
        if l >= group.order() {
            return Err(RealizeError::OutOfRange {
                index: l,
                order: group.order(),
            });
        }
    }
    same_labels("row labels of A", &a.rows, triple.s())?;
    same_labels("column labels of A", &a.cols, triple.t())?;
    same_labels("column labels of B", &b.cols, triple.u())?;
    if a.cols != b.rows {
        return Err(RealizeError::LabelMismatch(
            "row labels of B must equal the column labels of A, in order".into(),
        ));
    }
    if !tpp_check(triple) {
        return Err(RealizeError::NotTpp);
    }
    multiply_through(group, a, b, true)
}

/// A matrix pair on which the group-ring read-off disagrees with the
/// schoolbook product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionWitness {
    pub a: IndexedMatrix,
    pub b: IndexedMatrix,
    pub row: Element,
    pub col: Element,
    pub expected: i64,
    pub got: i64,
}

/// Runs the embedding without the TPP precondition on up to `trials` random
/// matrix pairs (entries in `[-100, 100]`, labels in increasing order) and
/// returns the first pair whose read-off differs from the schoolbook product.
///
/// Never finds anything for a TPP triple. For a non-TPP triple a witness
/// exists but random trials can miss it.
pub fn collision_witness(
    triple: &TppTriple<'_>,
    trials: usize,
    rng: &mut impl Rng,
) -> Option<CollisionWitness> {
    let group = triple.group();
    let [s, t, u] = triple.sets().each_ref().map(ElementSet::to_vec);
    for _ in 0..trials {
        let a = IndexedMatrix::random(&s, &t, FUZZ_ENTRY_BOUND, rng).ok()?;
        let b = IndexedMatrix::random(&t, &u, FUZZ_ENTRY_BOUND, rng).ok()?;
        let (Ok(expected), Ok(got)) = (a.schoolbook(&b), multiply_through(group, &a, &b, false))
        else {
            continue;
        };
        let (n, p) = expected.shape();
        let mismatch = (0..n)
            .flat_map(|i| (0..p).map(move |k| (i, k)))
            .find(|&(i, k)| expected.get(i, k) != got.get(i, k));
        if let Some((i, k)) = mismatch {
            return Some(CollisionWitness {
                row: s[i],
                col: u[k],
                expected: expected.get(i, k),
                got: got.get(i, k),
                a,
                b,
            });
        }
    }
    None
}

/// `delta(1)`, the unit of the group ring.
pub fn unit(group: &Group) -> GroupRingElement<'_> {
    GroupRingElement::basis(group, IDENTITY).expect("identity is always in range")
}
