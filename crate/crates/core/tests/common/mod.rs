//! Reference implementations used as oracles. Nothing here calls into the
//! search, quotient or TPP code paths it is compared against; only the group
//! table is shared.

#![allow(dead_code)]

use std::collections::BTreeSet;

use tppforge::{build_group, Group, GroupSpec};

pub fn group(spec: &str) -> Group {
    build_group(&spec.parse::<GroupSpec>().unwrap()).unwrap()
}

pub type Triple = [BTreeSet<usize>; 3];

/// `{x y^-1}` by the double loop over plain sets.
pub fn naive_quotient(g: &Group, x: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &a in x {
        for &b in x {
            out.insert(g.op(a, g.inv(b)));
        }
    }
    out
}

/// The definition read literally: a triple loop over Q(S)×Q(T)×Q(U).
pub fn naive_tpp(g: &Group, t: &Triple) -> bool {
    let [qs, qt, qu] = [0, 1, 2].map(|i| naive_quotient(g, &t[i]));
    for &s in &qs {
        for &tt in &qt {
            for &u in &qu {
                if g.op(g.op(s, tt), u) == 0 && !(s == 0 && tt == 0 && u == 0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Every normalized candidate: identity in all sets, each other element in
/// at most one set. Returned in no particular order.
pub fn normalized_candidates(g: &Group) -> Vec<Triple> {
    let n = g.order();
    let mut out = Vec::new();
    let total = 4usize.pow((n - 1) as u32);
    for code in 0..total {
        let mut t: Triple = Default::default();
        for set in t.iter_mut() {
            set.insert(0);
        }
        let mut c = code;
        for e in 1..n {
            let slot = c % 4;
            c /= 4;
            if slot < 3 {
                t[slot].insert(e);
            }
        }
        out.push(t);
    }
    out
}

/// All normalized TPP triples, brute force.
pub fn brute_force_normalized_tpp(g: &Group) -> BTreeSet<Triple> {
    normalized_candidates(g)
        .into_iter()
        .filter(|t| naive_tpp(g, t))
        .collect()
}

pub fn product(t: &Triple) -> u64 {
    t.iter().map(|s| s.len() as u64).product()
}

/// Maximum product and maximizers over the normalized TPP triples.
pub fn brute_force_best(g: &Group) -> (u64, BTreeSet<Triple>) {
    let all = brute_force_normalized_tpp(g);
    let best = all.iter().map(product).max().unwrap();
    (
        best,
        all.into_iter().filter(|t| product(t) == best).collect(),
    )
}

pub fn to_sets(t: &tppforge::TppTriple<'_>) -> Triple {
    t.sets().each_ref().map(|s| s.iter().collect())
}

pub fn schoolbook(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let p = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..p)
                .map(|k| row.iter().zip(b).map(|(x, brow)| x * brow[k]).sum())
                .collect()
        })
        .collect()
}
