//! Branch-and-bound search for TPP triples maximizing `|S|·|T|·|U|`.
//!
//! The search space is the normalized one: the identity sits in all three
//! sets and every other element goes to at most one of them. Elements
//! `1..n` are decided in increasing order, each branching into S, T, U or
//! skip (in that order). Every TPP triple translates onto a normalized one
//! of the same sizes, so the restriction loses no maximum.
//!
//! Right quotients are kept incrementally; a quotient only grows along a
//! branch, which is what makes the additive bounds and the intersection
//! conditions sound as subtree cuts.

use std::env;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use thiserror::Error;

use crate::group::{Element, Group, IDENTITY};
use crate::setcalc::ElementSet;
use crate::tpp::{tpp_check, Role, TppTriple};

/// Default largest group order for exhaustive enumeration.
pub const DEFAULT_ENUM_CAP: usize = 12;

/// Environment variable overriding [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_VAR: &str = "TPPFORGE_ENUM_CAP";

/// The enumeration cap, honouring `TPPFORGE_ENUM_CAP` when it parses.
pub fn enumeration_cap() -> usize {
    env::var(ENUM_CAP_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error(
        "group order {order} exceeds the enumeration cap {cap} (set {ENUM_CAP_VAR} to raise it)"
    )]
    AboveCap { order: usize, cap: usize },
    #[error("unknown pruning mode {0:?}; expected none, murthy, q-bound or all")]
    UnknownPruning(String),
    #[error("worker count must be positive")]
    NoWorkers,
}

/// Which cuts the search may apply.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Pruning {
    /// Full enumeration; every leaf is checked.
    None,
    /// `|S|+|T|+|U| ≤ |G|+2`, also as the optimistic envelope.
    Murthy,
    /// `|Q(S)|+|Q(T)|+|Q(U)| ≤ |G|+2`, also as the optimistic envelope.
    #[default]
    QBound,
    /// Both bounds, pairwise disjointness, trivial quotient intersections
    /// and incremental TPP feasibility.
    All,
}

impl Pruning {
    pub const ALL_MODES: [Pruning; 4] = [
        Pruning::None,
        Pruning::Murthy,
        Pruning::QBound,
        Pruning::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pruning::None => "none",
            Pruning::Murthy => "murthy",
            Pruning::QBound => "q-bound",
            Pruning::All => "all",
        }
    }

    fn uses(self, rule: Rule) -> bool {
        use Pruning::*;
        match rule {
            Rule::Murthy => matches!(self, Murthy | All),
            Rule::QBound => matches!(self, QBound | All),
            Rule::Disjointness | Rule::QIntersection | Rule::Tpp => self == All,
            Rule::Incumbent => self != None,
        }
    }
}

impl fmt::Display for Pruning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pruning {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pruning::ALL_MODES
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SearchError::UnknownPruning(s.to_string()))
    }
}

/// A cut that removed a subtree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Murthy,
    QBound,
    Disjointness,
    QIntersection,
    Tpp,
    /// The optimistic completion cannot reach the incumbent or `min_product`.
    Incumbent,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::Murthy,
        Rule::QBound,
        Rule::Disjointness,
        Rule::QIntersection,
        Rule::Tpp,
        Rule::Incumbent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Murthy => "murthy",
            Rule::QBound => "q-bound",
            Rule::Disjointness => "disjointness",
            Rule::QIntersection => "q-intersection",
            Rule::Tpp => "tpp",
            Rule::Incumbent => "incumbent",
        }
    }
}

/// Per-rule prune counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PruneCounts([u64; 6]);

impl PruneCounts {
    pub fn get(&self, rule: Rule) -> u64 {
        self.0[rule as usize]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Rule, u64)> + '_ {
        Rule::ALL.into_iter().map(|r| (r, self.get(r)))
    }

    fn bump(&mut self, rule: Rule) {
        self.0[rule as usize] += 1;
    }

    fn merge(&mut self, other: &PruneCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub pruning: Pruning,
    pub time_limit: Option<Duration>,
    /// Only triples with at least this product are reported.
    pub min_product: u64,
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            pruning: Pruning::default(),
            time_limit: None,
            min_product: 1,
            workers: 1,
        }
    }
}

impl SearchConfig {
    pub fn with_pruning(pruning: Pruning) -> Self {
        SearchConfig {
            pruning,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport<'g> {
    pub group: &'g Group,
    pub config: SearchConfig,
    /// All maximal triples, sorted by `(|S|, |T|, |U|, S, T, U)`.
    pub best_triples: Vec<TppTriple<'g>>,
    /// Zero when no triple reached `min_product`.
    pub best_product: u64,
    pub nodes_visited: u64,
    pub leaves_checked: u64,
    pub nodes_pruned: PruneCounts,
    pub completed: bool,
    pub elapsed: Duration,
}

impl SearchReport<'_> {
    /// Human-readable `key: value` report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "group: {}", self.group.name());
        let _ = writeln!(out, "order: {}", self.group.order());
        let _ = writeln!(out, "pruning: {}", self.config.pruning);
        let _ = writeln!(out, "workers: {}", self.config.workers);
        let _ = writeln!(out, "min_product: {}", self.config.min_product);
        let _ = writeln!(out, "completed: {}", self.completed);
        let _ = writeln!(out, "best_product: {}", self.best_product);
        let _ = writeln!(out, "best_count: {}", self.best_triples.len());
        let _ = writeln!(out, "nodes_visited: {}", self.nodes_visited);
        let _ = writeln!(out, "leaves_checked: {}", self.leaves_checked);
        for (rule, n) in self.nodes_pruned.iter() {
            let _ = writeln!(out, "pruned_{}: {n}", rule.name());
        }
        let _ = writeln!(out, "elapsed_s: {:.6}", self.elapsed.as_secs_f64());
        for (i, t) in self.best_triples.iter().enumerate() {
            let _ = writeln!(out, "triple_{i}: {t}");
        }
        out
    }

    /// One machine-readable record per best triple.
    pub fn machine_lines(&self) -> Vec<String> {
        self.best_triples
            .iter()
            .map(|t| {
                TripleRecord {
                    group: self.group.name().to_string(),
                    product: t.product(),
                    sets: t.sets().each_ref().map(ElementSet::to_vec),
                    pruning: self.config.pruning,
                    visited: self.nodes_visited,
                    pruned: self.nodes_pruned,
                    completed: self.completed,
                }
                .to_line()
            })
            .collect()
    }
}

/// Machine-readable single-line record of one found triple.
///
/// Tab-separated: `tpp`, then `key=value` fields `group`, `product`, `S`,
/// `T`, `U` (set literals), `pruning`, `visited`, `pruned` (comma-separated
/// `rule:count`) and `completed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleRecord {
    pub group: String,
    pub product: u64,
    pub sets: [Vec<Element>; 3],
    pub pruning: Pruning,
    pub visited: u64,
    pub pruned: PruneCounts,
    pub completed: bool,
}

pub const RECORD_TAG: &str = "tpp";

impl TripleRecord {
    pub fn to_line(&self) -> String {
        let pruned = self
            .pruned
            .iter()
            .map(|(r, n)| format!("{}:{n}", r.name()))
            .join(",");
        format!(
            "{RECORD_TAG}\tgroup={}\tproduct={}\tS={}\tT={}\tU={}\tpruning={}\tvisited={}\tpruned={pruned}\tcompleted={}",
            self.group,
            self.product,
            self.sets[0].iter().join(" "),
            self.sets[1].iter().join(" "),
            self.sets[2].iter().join(" "),
            self.pruning,
            self.visited,
            self.completed,
        )
    }

    pub fn parse(line: &str) -> Result<Self, String> {
        let mut fields = line.trim_end_matches(['\r', '\n']).split('\t');
        if fields.next() != Some(RECORD_TAG) {
            return Err(format!("record must start with {RECORD_TAG:?}"));
        }
        let mut map = std::collections::HashMap::new();
        for field in fields {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| format!("field {field:?} is not key=value"))?;
            map.insert(k, v);
        }
        let get = |k: &str| {
            map.get(k)
                .copied()
                .ok_or_else(|| format!("missing field {k}"))
        };
        let num = |k: &str| -> Result<u64, String> {
            get(k)?
                .parse()
                .map_err(|_| format!("field {k} is not a number"))
        };
        let set = |k: &str| -> Result<Vec<Element>, String> {
            get(k)?
                .split_whitespace()
                .map(|x| {
                    x.parse()
                        .map_err(|_| format!("field {k}: bad element {x:?}"))
                })
                .collect()
        };
        let mut pruned = PruneCounts::default();
        for item in get("pruned")?.split(',').filter(|s| !s.is_empty()) {
            let (name, n) = item
                .split_once(':')
                .ok_or_else(|| format!("bad prune count {item:?}"))?;
            let rule = Rule::ALL
                .into_iter()
                .find(|r| r.name() == name)
                .ok_or_else(|| format!("unknown rule {name:?}"))?;
            pruned.0[rule as usize] = n.parse().map_err(|_| format!("bad prune count {item:?}"))?;
        }
        Ok(TripleRecord {
            group: get("group")?.to_string(),
            product: num("product")?,
            sets: [set("S")?, set("T")?, set("U")?],
            pruning: get("pruning")?
                .parse()
                .map_err(|e: SearchError| e.to_string())?,
            visited: num("visited")?,
            pruned,
            completed: get("completed")? == "true",
        })
    }

    /// The triple in triple-file format.
    pub fn to_triple_text(&self) -> String {
        self.sets
            .iter()
            .map(|s| s.iter().join(" ") + "\n")
            .collect()
    }
}

/// Partial normalized triple with its right quotients.
#[derive(Clone)]
struct Node {
    sets: [FixedBitSet; 3],
    quots: [FixedBitSet; 3],
    sizes: [usize; 3],
    qsizes: [usize; 3],
}

impl Node {
    fn root(order: usize) -> Self {
        let mut one = FixedBitSet::with_capacity(order);
        one.insert(IDENTITY);
        Node {
            sets: [one.clone(), one.clone(), one.clone()],
            quots: [one.clone(), one.clone(), one],
            sizes: [1; 3],
            qsizes: [1; 3],
        }
    }

    /// Adds `x` to one set; returns the child and the quotient elements that
    /// `x` introduced, i.e. `{x y^-1, y x^-1 : y ∈ X ∪ {x}}` minus the old Q(X).
    fn insert(&self, group: &Group, role: Role, x: Element) -> (Node, Vec<Element>) {
        let r = role.index();
        let mut child = self.clone();
        child.sets[r].insert(x);
        child.sizes[r] += 1;
        let x_inv = group.inv(x);
        let mut delta = Vec::new();
        for y in child.sets[r].ones() {
            for q in [group.op(x, group.inv(y)), group.op(y, x_inv)] {
                if !child.quots[r].put(q) {
                    delta.push(q);
                }
            }
        }
        child.qsizes[r] += delta.len();
        (child, delta)
    }

    /// Whether the quotient elements `delta` just added to `role` create a
    /// nontrivial solution of `stu = 1`, assuming the parent had none.
    fn creates_violation(&self, group: &Group, role: Role, delta: &[Element]) -> bool {
        // Rotate so the new elements take the first slot of abc = 1.
        let r = role.index();
        let next = &self.quots[(r + 1) % 3];
        let prev = &self.quots[(r + 2) % 3];
        delta.iter().any(|&a| {
            next.ones()
                .any(|b| prev.contains(group.inv(group.op(a, b))))
        })
    }

    fn pair_counts_exceed(sets: &[FixedBitSet; 3]) -> bool {
        [(0, 1), (1, 2), (0, 2)]
            .into_iter()
            .any(|(i, j)| sets[i].intersection_count(&sets[j]) > 1)
    }

    fn to_triple<'g>(&self, group: &'g Group) -> TppTriple<'g> {
        TppTriple::from_parts(
            group,
            self.sets
                .each_ref()
                .map(|b| ElementSet::from_bits(b.clone(), group.order())),
        )
    }

    fn product(&self) -> u64 {
        self.sizes.iter().map(|&n| n as u64).product()
    }
}

/// Whether some completion of a node can reach a product of `target`.
///
/// `sizes` are the current set sizes and `floors` lower bounds on what each
/// set contributes to the `limit` budget (`sizes` for the size bound, the
/// quotient sizes for the Q-bound). A set grown to `a + x` contributes
/// `max(floor, a + x)`; at most `remaining` elements can be added in total.
fn envelope_reaches(
    sizes: [usize; 3],
    floors: [usize; 3],
    remaining: usize,
    limit: usize,
    target: u64,
) -> bool {
    let cost = |i: usize, x: usize| floors[i].max(sizes[i] + x);
    for x0 in 0..=remaining {
        let c0 = cost(0, x0);
        if c0 + floors[1] + floors[2] > limit {
            break;
        }
        for x1 in 0..=remaining - x0 {
            let used = c0 + cost(1, x1);
            if used + floors[2] > limit {
                break;
            }
            // floors[2] >= sizes[2], so this cannot underflow.
            let x2 = (remaining - x0 - x1).min(limit - used - sizes[2]);
            let p = [sizes[0] + x0, sizes[1] + x1, sizes[2] + x2]
                .iter()
                .map(|&n| n as u64)
                .product::<u64>();
            if p >= target {
                return true;
            }
        }
    }
    false
}

struct Shared<'a> {
    group: &'a Group,
    pruning: Pruning,
    min_product: u64,
    limit: usize,
    incumbent: &'a AtomicU64,
    deadline: Option<Instant>,
    stop: &'a AtomicBool,
}

struct Worker<'a> {
    shared: &'a Shared<'a>,
    visited: u64,
    leaves: u64,
    pruned: PruneCounts,
    best: u64,
    found: Vec<Node>,
}

impl<'a> Worker<'a> {
    fn new(shared: &'a Shared<'a>) -> Self {
        Worker {
            shared,
            visited: 0,
            leaves: 0,
            pruned: PruneCounts::default(),
            best: 0,
            found: Vec::new(),
        }
    }

    fn target(&self) -> u64 {
        self.shared
            .min_product
            .max(self.shared.incumbent.load(Ordering::Relaxed))
    }

    fn prune_rule(
        &self,
        node: &Node,
        next: usize,
        delta: Option<(Role, &[Element])>,
    ) -> Option<Rule> {
        let sh = self.shared;
        let uses = |r| sh.pruning.uses(r);
        if uses(Rule::Murthy) && node.sizes.iter().sum::<usize>() > sh.limit {
            return Some(Rule::Murthy);
        }
        if uses(Rule::QBound) && node.qsizes.iter().sum::<usize>() > sh.limit {
            return Some(Rule::QBound);
        }
        if uses(Rule::Disjointness) && Node::pair_counts_exceed(&node.sets) {
            return Some(Rule::Disjointness);
        }
        if uses(Rule::QIntersection) && Node::pair_counts_exceed(&node.quots) {
            return Some(Rule::QIntersection);
        }
        if uses(Rule::Tpp) {
            if let Some((role, delta)) = delta {
                if node.creates_violation(sh.group, role, delta) {
                    return Some(Rule::Tpp);
                }
            }
        }
        if uses(Rule::Incumbent) {
            let floors = if sh.pruning == Pruning::Murthy {
                node.sizes
            } else {
                node.qsizes
            };
            let remaining = sh.group.order() - next;
            if !envelope_reaches(node.sizes, floors, remaining, sh.limit, self.target()) {
                return Some(Rule::Incumbent);
            }
        }
        None
    }

    fn out_of_time(&mut self) -> bool {
        let sh = self.shared;
        if sh.stop.load(Ordering::Relaxed) {
            return true;
        }
        if self.visited % 256 == 1 {
            if let Some(deadline) = sh.deadline {
                if Instant::now() >= deadline {
                    sh.stop.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        false
    }

    fn visit(&mut self, node: &Node, next: usize, delta: Option<(Role, &[Element])>) {
        self.visited += 1;
        if self.out_of_time() {
            return;
        }
        if let Some(rule) = self.prune_rule(node, next, delta) {
            self.pruned.bump(rule);
            return;
        }
        let group = self.shared.group;
        if next == group.order() {
            self.leaf(node);
            return;
        }
        for role in Role::ALL {
            let (child, delta) = node.insert(group, role, next);
            self.visit(&child, next + 1, Some((role, &delta)));
        }
        self.visit(node, next + 1, None);
    }

    fn leaf(&mut self, node: &Node) {
        self.leaves += 1;
        let product = node.product();
        if product < self.shared.min_product || product < self.best {
            return;
        }
        if !tpp_check(&node.to_triple(self.shared.group)) {
            return;
        }
        if product > self.best {
            self.best = product;
            self.found.clear();
            self.shared.incumbent.fetch_max(product, Ordering::Relaxed);
        }
        self.found.push(node.clone());
    }
}

/// Searches `group` for the TPP triples with the largest `|S|·|T|·|U|`.
///
/// When the report is complete, `best_product` is the true maximum and
/// `best_triples` lists every normalized triple attaining it, independent of
/// the pruning mode and worker count. Node counters are deterministic for a
/// single worker.
pub fn search_max_triple<'g>(
    group: &'g Group,
    config: &SearchConfig,
) -> Result<SearchReport<'g>, SearchError> {
    if config.workers == 0 {
        return Err(SearchError::NoWorkers);
    }
    let start = Instant::now();
    let incumbent = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let shared = Shared {
        group,
        pruning: config.pruning,
        min_product: config.min_product,
        limit: group.order() + 2,
        incumbent: &incumbent,
        deadline: config.time_limit.map(|d| start + d),
        stop: &stop,
    };

    let workers: Vec<Worker<'_>> = if config.workers == 1 || group.order() <= 2 {
        let mut w = Worker::new(&shared);
        w.visit(&Node::root(group.order()), 1, None);
        vec![w]
    } else {
        run_parallel(&shared, config.workers)
    };

    let best_product = workers.iter().map(|w| w.best).max().unwrap_or(0);
    let mut pruned = PruneCounts::default();
    let mut best_triples = Vec::new();
    let (mut visited, mut leaves) = (0, 0);
    for w in &workers {
        visited += w.visited;
        leaves += w.leaves;
        pruned.merge(&w.pruned);
        if w.best == best_product && best_product > 0 {
            best_triples.extend(w.found.iter().map(|n| n.to_triple(group)));
        }
    }
    best_triples.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    best_triples.dedup();

    Ok(SearchReport {
        group,
        config: config.clone(),
        best_triples,
        best_product,
        nodes_visited: visited,
        leaves_checked: leaves,
        nodes_pruned: pruned,
        completed: !stop.load(Ordering::Relaxed),
        elapsed: start.elapsed(),
    })
}

/// Splits the tree at a fixed depth and hands the subtrees out through a
/// shared counter. The incumbent is shared, so counters vary between runs.
type Task = (Node, usize, Option<(Role, Vec<Element>)>);

fn run_parallel<'a>(shared: &'a Shared<'a>, workers: usize) -> Vec<Worker<'a>> {
    let group = shared.group;
    let n = group.order();
    let mut depth = 1;
    while 4usize.pow(depth as u32) < 8 * workers && depth + 1 < n - 1 {
        depth += 1;
    }
    let depth = depth.min(n - 1);

    // Subtree roots in DFS order, with the quotient delta of their last step.
    let mut tasks: Vec<Task> = vec![(Node::root(n), 1, None)];
    for _ in 0..depth {
        tasks = tasks
            .into_iter()
            .flat_map(|(node, next, _)| {
                let mut children: Vec<_> = Role::ALL
                    .into_iter()
                    .map(|role| {
                        let (child, delta) = node.insert(group, role, next);
                        (child, next + 1, Some((role, delta)))
                    })
                    .collect();
                children.push((node, next + 1, None));
                children
            })
            .collect();
    }

    let cursor = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(workers));
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut w = Worker::new(shared);
                loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    let Some((node, next, delta)) = tasks.get(i) else {
                        break;
                    };
                    let delta = delta.as_ref().map(|(r, d)| (*r, d.as_slice()));
                    w.visit(node, *next, delta);
                }
                results.lock().unwrap().push(w);
            });
        }
    });
    results.into_inner().unwrap()
}

/// Iterator over every normalized TPP triple of a group, in search order:
/// elements are decided in increasing index, each trying S, T, U and then
/// skip. Infeasible partial triples are cut (the TPP is inherited by
/// subsets), and every yielded triple is re-verified with [`tpp_check`].
pub struct TppEnumerator<'g> {
    group: &'g Group,
    stack: Vec<(Node, usize)>,
}

impl<'g> Iterator for TppEnumerator<'g> {
    type Item = TppTriple<'g>;

    fn next(&mut self) -> Option<Self::Item> {
        let group = self.group;
        while let Some((node, next)) = self.stack.pop() {
            if next == group.order() {
                let triple = node.to_triple(group);
                assert!(
                    tpp_check(&triple),
                    "enumerator produced a non-TPP triple {triple:?}"
                );
                return Some(triple);
            }
            self.stack.push((node.clone(), next + 1));
            for role in Role::ALL.into_iter().rev() {
                let (child, delta) = node.insert(group, role, next);
                if !child.creates_violation(group, role, &delta) {
                    self.stack.push((child, next + 1));
                }
            }
        }
        None
    }
}

/// Every normalized TPP triple of `group`, refusing groups above
/// [`enumeration_cap`].
pub fn enumerate_all_tpp(group: &Group) -> Result<TppEnumerator<'_>, SearchError> {
    enumerate_all_tpp_with_cap(group, enumeration_cap())
}

pub fn enumerate_all_tpp_with_cap(
    group: &Group,
    cap: usize,
) -> Result<TppEnumerator<'_>, SearchError> {
    if group.order() > cap {
        return Err(SearchError::AboveCap {
            order: group.order(),
            cap,
        });
    }
    Ok(TppEnumerator {
        group,
        stack: vec![(Node::root(group.order()), 1)],
    })
}
