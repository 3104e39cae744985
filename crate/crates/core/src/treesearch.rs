//! Extended dissection trees: enumeration, evaluation and the search for
//! `n`-gc-self-affinities.
//!
//! Trees are enumerated level by level in an arena. Level `k` lists every
//! canonical tree with `k` leaves as a node record pointing into lower levels,
//! in a fixed order that coincides with [`ExtTree`]'s `Ord`. A tree is
//! canonical when at every node `(left, left_flip) <= (right, right_flip)`
//! under the key (leaf count, tree, flag).
//!
//! Evaluation for a fixed leaf class deduplicates the class sets of subtrees
//! and memoizes compositions by set id, so the work at the top level is
//! proportional to the number of distinct subtree sets rather than the number
//! of trees.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::affine_types::{flip, is_affine_kite, AffineClass};
use crate::composition::{compose_prepared, ClassSet, Op};
use crate::ratio::Ratio;

/// Largest leaf count enumerated without an explicit override.
pub const DEFAULT_CAP: usize = 8;
/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "GCDISSECT_SEARCH_CAP";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtTree {
    Leaf,
    Node {
        op: Op,
        left: Box<ExtTree>,
        left_flip: bool,
        right: Box<ExtTree>,
        right_flip: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("{n} leaves exceeds the enumeration cap {cap} (about {estimate} canonical trees)")]
    CapExceeded {
        n: usize,
        cap: usize,
        estimate: String,
    },
    #[error("leaf count must be at least {min}, got {n}")]
    TooFewLeaves { n: usize, min: usize },
    #[error("cannot parse tree {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

impl ExtTree {
    pub fn node(op: Op, left: ExtTree, left_flip: bool, right: ExtTree, right_flip: bool) -> Self {
        ExtTree::Node {
            op,
            left: Box::new(left),
            left_flip,
            right: Box::new(right),
            right_flip,
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            ExtTree::Leaf => 1,
            ExtTree::Node { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    /// The same dissection with children ordered canonically at every node.
    pub fn canonical(&self) -> ExtTree {
        match self {
            ExtTree::Leaf => ExtTree::Leaf,
            ExtTree::Node {
                op,
                left,
                left_flip,
                right,
                right_flip,
            } => {
                let l = left.canonical();
                let r = right.canonical();
                if edge_cmp(&l, *left_flip, &r, *right_flip) == Ordering::Greater {
                    ExtTree::node(*op, r, *right_flip, l, *left_flip)
                } else {
                    ExtTree::node(*op, l, *left_flip, r, *right_flip)
                }
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            ExtTree::Leaf => true,
            ExtTree::Node {
                left,
                left_flip,
                right,
                right_flip,
                ..
            } => {
                left.is_canonical()
                    && right.is_canonical()
                    && edge_cmp(left, *left_flip, right, *right_flip) != Ordering::Greater
            }
        }
    }

    /// Toggles the flip mark on every edge that ends in a leaf.
    pub fn complement_leaf_flips(&self) -> ExtTree {
        match self {
            ExtTree::Leaf => ExtTree::Leaf,
            ExtTree::Node {
                op,
                left,
                left_flip,
                right,
                right_flip,
            } => {
                let lf = if **left == ExtTree::Leaf {
                    !left_flip
                } else {
                    *left_flip
                };
                let rf = if **right == ExtTree::Leaf {
                    !right_flip
                } else {
                    *right_flip
                };
                ExtTree::node(
                    *op,
                    left.complement_leaf_flips(),
                    lf,
                    right.complement_leaf_flips(),
                    rf,
                )
            }
        }
    }

    /// Parses the notation produced by `Display`, e.g. `((L:L^F)·L)`.
    /// `.` may stand for `·`.
    pub fn parse(s: &str) -> Result<ExtTree, SearchError> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let err = |reason: &str| SearchError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let tree = parse_term(&chars, &mut pos).map_err(|r| err(&r))?;
        if pos != chars.len() {
            return Err(err("trailing input"));
        }
        Ok(tree)
    }
}

fn parse_flag(chars: &[char], pos: &mut usize) -> bool {
    if chars.get(*pos) == Some(&'^') && chars.get(*pos + 1) == Some(&'F') {
        *pos += 2;
        true
    } else {
        false
    }
}

fn parse_term(chars: &[char], pos: &mut usize) -> Result<ExtTree, String> {
    match chars.get(*pos) {
        Some('L') => {
            *pos += 1;
            Ok(ExtTree::Leaf)
        }
        Some('(') => {
            *pos += 1;
            let left = parse_term(chars, pos)?;
            let lf = parse_flag(chars, pos);
            let op = match chars.get(*pos) {
                Some('·') | Some('.') => Op::Dot,
                Some(':') => Op::Colon,
                _ => return Err(format!("expected an operation at {}", *pos)),
            };
            *pos += 1;
            let right = parse_term(chars, pos)?;
            let rf = parse_flag(chars, pos);
            if chars.get(*pos) != Some(&')') {
                return Err(format!("expected ')' at {}", *pos));
            }
            *pos += 1;
            Ok(ExtTree::node(op, left, lf, right, rf))
        }
        _ => Err(format!("expected 'L' or '(' at {}", *pos)),
    }
}

fn edge_cmp(a: &ExtTree, fa: bool, b: &ExtTree, fb: bool) -> Ordering {
    a.cmp(b).then(fa.cmp(&fb))
}

impl Ord for ExtTree {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.leaves().cmp(&other.leaves());
        if n != Ordering::Equal {
            return n;
        }
        match (self, other) {
            (ExtTree::Leaf, ExtTree::Leaf) => Ordering::Equal,
            (ExtTree::Leaf, _) => Ordering::Less,
            (_, ExtTree::Leaf) => Ordering::Greater,
            (
                ExtTree::Node {
                    op: o1,
                    left: l1,
                    left_flip: lf1,
                    right: r1,
                    right_flip: rf1,
                },
                ExtTree::Node {
                    op: o2,
                    left: l2,
                    left_flip: lf2,
                    right: r2,
                    right_flip: rf2,
                },
            ) => o1
                .cmp(o2)
                .then_with(|| l1.cmp(l2))
                .then_with(|| lf1.cmp(lf2))
                .then_with(|| r1.cmp(r2))
                .then_with(|| rf1.cmp(rf2)),
        }
    }
}

impl PartialOrd for ExtTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtTree::Leaf => write!(f, "L"),
            ExtTree::Node {
                op,
                left,
                left_flip,
                right,
                right_flip,
            } => write!(
                f,
                "({left}{}{}{right}{})",
                if *left_flip { "^F" } else { "" },
                op.symbol(),
                if *right_flip { "^F" } else { "" }
            ),
        }
    }
}

/// Number of canonical trees with `n` leaves, as a float estimate.
pub fn canonical_count(n: usize) -> f64 {
    let mut t = vec![0.0f64; n.max(1) + 1];
    t[1] = 1.0;
    for k in 2..=n {
        let mut acc = 0.0;
        for a in 1..=k / 2 {
            let b = k - a;
            let ea = 2.0 * t[a];
            let eb = 2.0 * t[b];
            acc += if a == b {
                ea * (ea + 1.0) / 2.0
            } else {
                ea * eb
            };
        }
        t[k] = 2.0 * acc;
    }
    t[n]
}

/// The configured cap: `GCDISSECT_SEARCH_CAP` when set to an integer.
pub fn configured_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

fn check_cap(n: usize, cap: usize) -> Result<(), SearchError> {
    if n > cap {
        return Err(SearchError::CapExceeded {
            n,
            cap,
            estimate: format!("{:.3e}", canonical_count(n)),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct NodeRef {
    op: Op,
    a: u8,
    i: u32,
    f: bool,
    j: u32,
    g: bool,
}

/// All canonical trees with fewer than `n` leaves, stored by level.
struct Arena {
    levels: Vec<Vec<NodeRef>>,
}

fn level_nodes<'a>(levels: &'a [Vec<NodeRef>], k: usize) -> impl Iterator<Item = NodeRef> + 'a {
    [Op::Dot, Op::Colon].into_iter().flat_map(move |op| {
        (1..=k / 2).flat_map(move |a| {
            let b = k - a;
            let na = levels[a].len() as u32;
            let nb = levels[b].len() as u32;
            (0..na).flat_map(move |i| {
                [false, true].into_iter().flat_map(move |f| {
                    (0..nb).flat_map(move |j| {
                        [false, true].into_iter().filter_map(move |g| {
                            if a == b && (j, g) < (i, f) {
                                None
                            } else {
                                Some(NodeRef {
                                    op,
                                    a: a as u8,
                                    i,
                                    f,
                                    j,
                                    g,
                                })
                            }
                        })
                    })
                })
            })
        })
    })
}

impl Arena {
    fn build(below: usize) -> Arena {
        let mut levels: Vec<Vec<NodeRef>> = vec![Vec::new(), vec![dummy_leaf()]];
        for k in 2..below {
            let v: Vec<NodeRef> = level_nodes(&levels, k).collect();
            levels.push(v);
        }
        Arena { levels }
    }

    fn tree(&self, k: usize, idx: u32) -> ExtTree {
        if k == 1 {
            return ExtTree::Leaf;
        }
        let r = self.levels[k][idx as usize];
        self.materialize(k, r)
    }

    fn materialize(&self, k: usize, r: NodeRef) -> ExtTree {
        let a = r.a as usize;
        ExtTree::node(r.op, self.tree(a, r.i), r.f, self.tree(k - a, r.j), r.g)
    }
}

fn dummy_leaf() -> NodeRef {
    NodeRef {
        op: Op::Dot,
        a: 0,
        i: 0,
        f: false,
        j: 0,
        g: false,
    }
}

/// Every canonical tree with `n` leaves, in canonical order.
pub fn enumerate_trees(n: usize) -> Result<impl Iterator<Item = ExtTree>, SearchError> {
    enumerate_trees_capped(n, configured_cap())
}

pub fn enumerate_trees_capped(
    n: usize,
    cap: usize,
) -> Result<impl Iterator<Item = ExtTree>, SearchError> {
    if n == 0 {
        return Err(SearchError::TooFewLeaves { n, min: 1 });
    }
    check_cap(n, cap)?;
    let arena = Arc::new(Arena::build(n));
    let leaf_only = n == 1;
    let nodes: Box<dyn Iterator<Item = ExtTree>> = if leaf_only {
        Box::new(std::iter::once(ExtTree::Leaf))
    } else {
        let a2 = Arc::clone(&arena);
        let refs: Vec<NodeRef> = level_nodes(&arena.levels, n).collect();
        Box::new(refs.into_iter().map(move |r| a2.materialize(n, r)))
    };
    Ok(nodes)
}

/// Class set of the root of `t` with every leaf of class `leaf`.
pub fn evaluate(t: &ExtTree, leaf: &AffineClass) -> ClassSet {
    match t {
        ExtTree::Leaf => ClassSet::single(leaf),
        ExtTree::Node {
            op,
            left,
            left_flip,
            right,
            right_flip,
        } => {
            let l = evaluate(left, leaf);
            let r = evaluate(right, leaf);
            crate::composition::compose_sets(&l, *left_flip, &r, *right_flip, *op)
        }
    }
}

/// Deduplicated class sets of all subtrees for one leaf class.
struct SetTable {
    sets: Vec<ClassSet>,
    flipped: Vec<ClassSet>,
    ids: HashMap<String, u32>,
    memo: HashMap<(Op, u32, bool, u32, bool), u32>,
}

impl SetTable {
    fn new() -> Self {
        SetTable {
            sets: Vec::new(),
            flipped: Vec::new(),
            ids: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn intern(&mut self, s: ClassSet) -> u32 {
        let key = s.key();
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.sets.len() as u32;
        self.flipped.push(s.flipped());
        self.sets.push(s);
        self.ids.insert(key, id);
        id
    }

    fn operand(&self, id: u32, flag: bool) -> &ClassSet {
        if flag {
            &self.flipped[id as usize]
        } else {
            &self.sets[id as usize]
        }
    }

    fn compose(&self, op: Op, x: u32, f: bool, y: u32, g: bool) -> ClassSet {
        compose_prepared(self.operand(x, f), f, self.operand(y, g), g, op)
    }

    fn combine(&mut self, op: Op, x: u32, f: bool, y: u32, g: bool) -> u32 {
        if let Some(&id) = self.memo.get(&(op, x, f, y, g)) {
            return id;
        }
        let s = self.compose(op, x, f, y, g);
        let id = self.intern(s);
        self.memo.insert((op, x, f, y, g), id);
        id
    }
}

/// Set ids of every arena tree below the top level.
struct Evaluation {
    table: SetTable,
    ids: Vec<Vec<u32>>,
}

impl Evaluation {
    fn run(arena: &Arena, leaf: &AffineClass) -> Evaluation {
        let mut table = SetTable::new();
        let leaf_id = table.intern(ClassSet::single(leaf));
        let mut ids = vec![Vec::new(), vec![leaf_id]];
        for k in 2..arena.levels.len() {
            let mut v = Vec::with_capacity(arena.levels[k].len());
            for r in &arena.levels[k] {
                let a = r.a as usize;
                let x = ids[a][r.i as usize];
                let y = ids[k - a][r.j as usize];
                v.push(table.combine(r.op, x, r.f, y, r.g));
            }
            ids.push(v);
        }
        Evaluation { table, ids }
    }

    /// Indices of level-`k` trees grouped by set id, in increasing order.
    fn groups(&self, k: usize) -> Vec<(u32, Vec<u32>)> {
        let mut map: HashMap<u32, Vec<u32>> = HashMap::new();
        for (idx, &id) in self.ids[k].iter().enumerate() {
            map.entry(id).or_default().push(idx as u32);
        }
        let mut v: Vec<(u32, Vec<u32>)> = map.into_iter().collect();
        v.sort_by_key(|(id, _)| *id);
        v
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Membership tolerance; zero demands exact membership.
    pub tol: Ratio,
    /// Apply the target-aware reductions at the sizes they are proven for.
    pub prune: bool,
    pub cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol: Ratio::zero(),
            prune: false,
            cap: configured_cap(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchHit {
    pub tree: ExtTree,
    pub root_set: ClassSet,
    /// The parametrization of the leaf class found in `root_set`.
    pub witness: AffineClass,
    /// Whether the witness is the flipped parametrization of the leaf.
    pub witness_flipped: bool,
}

/// The member of `set` matching `leaf` or, for Q leaves, its flip.
pub fn match_leaf(set: &ClassSet, leaf: &AffineClass, tol: &Ratio) -> Option<(AffineClass, bool)> {
    if set.member(leaf, tol) {
        return Some((leaf.clone(), false));
    }
    if let Ok(f) = flip(leaf) {
        if set.member(&f, tol) {
            return Some((f, true));
        }
    }
    None
}

pub fn search_self_affine(
    leaf: &AffineClass,
    n: usize,
    tol: &Ratio,
) -> Result<Vec<SearchHit>, SearchError> {
    search_with(
        leaf,
        n,
        &SearchOptions {
            tol: tol.clone(),
            ..SearchOptions::default()
        },
    )
}

/// All canonical trees whose root set contains the leaf class, in canonical
/// order. With `prune`, trees removed by [`is_pruned`] are dropped.
pub fn search_with(
    leaf: &AffineClass,
    n: usize,
    opts: &SearchOptions,
) -> Result<Vec<SearchHit>, SearchError> {
    if n < 2 {
        return Err(SearchError::TooFewLeaves { n, min: 2 });
    }
    check_cap(n, opts.cap)?;
    let arena = Arena::build(n);
    let eval = Evaluation::run(&arena, leaf);

    struct Task {
        op: Op,
        a: usize,
        x: u32,
        f: bool,
        y: u32,
        g: bool,
        gx: usize,
        gy: usize,
    }
    let groups: Vec<Vec<(u32, Vec<u32>)>> = (0..n)
        .map(|k| if k == 0 { Vec::new() } else { eval.groups(k) })
        .collect();
    let mut tasks = Vec::new();
    for op in [Op::Dot, Op::Colon] {
        for a in 1..=n / 2 {
            let b = n - a;
            for (gx, (x, _)) in groups[a].iter().enumerate() {
                for f in [false, true] {
                    for (gy, (y, _)) in groups[b].iter().enumerate() {
                        for g in [false, true] {
                            tasks.push(Task {
                                op,
                                a,
                                x: *x,
                                f,
                                y: *y,
                                g,
                                gx,
                                gy,
                            });
                        }
                    }
                }
            }
        }
    }

    let table = &eval.table;
    let matched: Vec<(usize, ClassSet, AffineClass, bool)> = tasks
        .par_iter()
        .enumerate()
        .filter_map(|(ti, t)| {
            let s = table.compose(t.op, t.x, t.f, t.y, t.g);
            match_leaf(&s, leaf, &opts.tol).map(|(w, wf)| (ti, s, w, wf))
        })
        .collect();

    let mut hits: Vec<(NodeRef, ClassSet, AffineClass, bool)> = Vec::new();
    for (ti, set, w, wf) in matched {
        let t = &tasks[ti];
        let b = n - t.a;
        for &i in &groups[t.a][t.gx].1 {
            for &j in &groups[b][t.gy].1 {
                if t.a == b && (j, t.g) < (i, t.f) {
                    continue;
                }
                let r = NodeRef {
                    op: t.op,
                    a: t.a as u8,
                    i,
                    f: t.f,
                    j,
                    g: t.g,
                };
                hits.push((r, set.clone(), w.clone(), wf));
            }
        }
    }
    hits.sort_by(|p, q| {
        let (r, s) = (&p.0, &q.0);
        (r.op, r.a, r.i, r.f, r.j, r.g).cmp(&(s.op, s.a, s.i, s.f, s.j, s.g))
    });
    let mut out = Vec::with_capacity(hits.len());
    for (r, root_set, witness, witness_flipped) in hits {
        let tree = arena.materialize(n, r);
        if opts.prune && is_pruned(&tree, leaf) {
            continue;
        }
        out.push(SearchHit {
            tree,
            root_set,
            witness,
            witness_flipped,
        });
    }
    Ok(out)
}

/// Per-tree evaluation of every canonical tree with `n` leaves, in canonical
/// order. Shares the memoized evaluation used by the search.
pub fn evaluate_all(
    leaf: &AffineClass,
    n: usize,
    cap: usize,
) -> Result<Vec<(ExtTree, ClassSet)>, SearchError> {
    if n == 0 {
        return Err(SearchError::TooFewLeaves { n, min: 1 });
    }
    check_cap(n, cap)?;
    if n == 1 {
        return Ok(vec![(ExtTree::Leaf, ClassSet::single(leaf))]);
    }
    let arena = Arena::build(n);
    let mut eval = Evaluation::run(&arena, leaf);
    let refs: Vec<NodeRef> = level_nodes(&arena.levels, n).collect();
    let mut out = Vec::with_capacity(refs.len());
    for r in refs {
        let a = r.a as usize;
        let x = eval.ids[a][r.i as usize];
        let y = eval.ids[n - a][r.j as usize];
        let id = eval.table.combine(r.op, x, r.f, y, r.g);
        out.push((
            arena.materialize(n, r),
            eval.table.sets[id as usize].clone(),
        ));
    }
    Ok(out)
}

/// Target-aware reductions that provably keep at least one witness of every
/// self-affinity up to complementing all leaf-edge flips. Applied only for
/// three leaves with a Q leaf and for five leaves with a kite Q leaf.
pub fn is_pruned(t: &ExtTree, leaf: &AffineClass) -> bool {
    if !leaf.is_q() {
        return false;
    }
    match t.leaves() {
        3 => pruned_three(t),
        5 if is_affine_kite(leaf) => pruned_kite_five(t),
        _ => false,
    }
}

fn pruned_three(t: &ExtTree) -> bool {
    let ExtTree::Node {
        op: root_op,
        left,
        left_flip,
        right,
        right_flip,
    } = t
    else {
        return false;
    };
    // canonical: the leaf child sorts first
    let (leaf_flip, inner, inner_flip) = if **left == ExtTree::Leaf {
        (*left_flip, right, *right_flip)
    } else {
        (*right_flip, left, *left_flip)
    };
    let ExtTree::Node { op: inner_op, .. } = **inner else {
        return false;
    };
    // no flip between the root and a leaf
    if leaf_flip {
        return true;
    }
    // a trapezoid child cannot be flipped against a non-trapezoid
    if inner_op == Op::Colon && inner_flip {
        return true;
    }
    // parity: exactly one of the two operations is a colon
    (*root_op == Op::Dot) != (inner_op == Op::Colon)
}

fn has_leaf_flip(t: &ExtTree) -> bool {
    match t {
        ExtTree::Leaf => false,
        ExtTree::Node {
            left,
            left_flip,
            right,
            right_flip,
            ..
        } => {
            (**left == ExtTree::Leaf && *left_flip)
                || (**right == ExtTree::Leaf && *right_flip)
                || has_leaf_flip(left)
                || has_leaf_flip(right)
        }
    }
}

/// Whether some leaf is reachable from the root without crossing a flip.
fn unflipped_path(t: &ExtTree) -> bool {
    match t {
        ExtTree::Leaf => true,
        ExtTree::Node {
            left,
            left_flip,
            right,
            right_flip,
            ..
        } => (!left_flip && unflipped_path(left)) || (!right_flip && unflipped_path(right)),
    }
}

fn pruned_kite_five(t: &ExtTree) -> bool {
    if has_leaf_flip(t) || unflipped_path(t) {
        return true;
    }
    let ExtTree::Node {
        op,
        left,
        left_flip,
        right,
        right_flip,
    } = t
    else {
        return false;
    };
    if *op != Op::Colon || !left_flip || !right_flip {
        return true;
    }
    let (two, three) = if left.leaves() == 2 {
        (left, right)
    } else {
        (right, left)
    };
    if three.leaves() != 3 {
        return true;
    }
    !matches!(**two, ExtTree::Node { op: Op::Dot, .. })
}

/// Canonical trees surviving [`is_pruned`] for the given leaf class.
pub fn enumerate_pruned(n: usize, leaf: &AffineClass) -> Result<Vec<ExtTree>, SearchError> {
    Ok(enumerate_trees(n)?
        .filter(|t| !is_pruned(t, leaf))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Sym {
    Q(u32),
    T,
    P,
}

fn sym_combine(a: Sym, fa: bool, b: Sym, fb: bool, op: Op) -> Vec<Sym> {
    use Sym::*;
    let (a, fa, b, fb) = if a > b {
        (b, fb, a, fa)
    } else {
        (a, fa, b, fb)
    };
    match (a, b, op) {
        (Q(k1), Q(k2), Op::Dot) => vec![Q(k1 + k2)],
        (Q(k1), Q(k2), Op::Colon) => {
            let k = k1.abs_diff(k2);
            vec![if k == 0 { T } else { Q(k) }]
        }
        (Q(k), T, Op::Dot) if !fb => vec![Q(k)],
        (T, T, Op::Dot) if !fa && !fb => vec![T],
        (T, T, Op::Dot) if fa && fb => vec![T, P],
        (T, P, Op::Dot) if fa && !fb => vec![T],
        (P, P, Op::Dot) if !fa && !fb => vec![P],
        _ => vec![],
    }
}

fn sym_eval(t: &ExtTree) -> BTreeSet<Sym> {
    match t {
        ExtTree::Leaf => [Sym::Q(1)].into_iter().collect(),
        ExtTree::Node {
            op,
            left,
            left_flip,
            right,
            right_flip,
        } => {
            let l = sym_eval(left);
            let r = sym_eval(right);
            let mut out = BTreeSet::new();
            for &a in &l {
                for &b in &r {
                    out.extend(sym_combine(a, *left_flip, b, *right_flip, *op));
                }
            }
            out
        }
    }
}

/// Exponents `k` such that the root of `t` over a generic Q leaf has a member
/// with affine quotient `(alpha/beta)^k`; trapezoids and `P` count as `k = 0`.
pub fn quotient_exponents(t: &ExtTree) -> BTreeSet<u32> {
    sym_eval(t)
        .into_iter()
        .map(|s| match s {
            Sym::Q(k) => k,
            Sym::T | Sym::P => 0,
        })
        .collect()
}

/// For each `k`, how many canonical trees with `n` leaves reach exponent `k`.
/// Memoized over arena set ids of the symbolic evaluation.
pub fn parity_table(n: usize, cap: usize) -> Result<Vec<(u32, usize)>, SearchError> {
    if n == 0 {
        return Err(SearchError::TooFewLeaves { n, min: 1 });
    }
    check_cap(n, cap)?;
    let mut counts: std::collections::BTreeMap<u32, usize> = Default::default();
    if n == 1 {
        counts.insert(1, 1);
        return Ok(counts.into_iter().collect());
    }
    let arena = Arena::build(n);
    let mut sets: Vec<Vec<BTreeSet<Sym>>> =
        vec![Vec::new(), vec![[Sym::Q(1)].into_iter().collect()]];
    let eval_node = |sets: &Vec<Vec<BTreeSet<Sym>>>, k: usize, r: &NodeRef| {
        let a = r.a as usize;
        let mut out = BTreeSet::new();
        for &x in &sets[a][r.i as usize] {
            for &y in &sets[k - a][r.j as usize] {
                out.extend(sym_combine(x, r.f, y, r.g, r.op));
            }
        }
        out
    };
    for k in 2..n {
        let v: Vec<BTreeSet<Sym>> = arena.levels[k]
            .iter()
            .map(|r| eval_node(&sets, k, r))
            .collect();
        sets.push(v);
    }
    for r in level_nodes(&arena.levels, n) {
        let s = eval_node(&sets, n, &r);
        let ks: BTreeSet<u32> = s
            .into_iter()
            .map(|x| match x {
                Sym::Q(k) => k,
                _ => 0,
            })
            .collect();
        for k in ks {
            *counts.entry(k).or_default() += 1;
        }
    }
    Ok(counts.into_iter().collect())
}
