//! 2-SAT projection of selected clauses and the implication-digraph
//! satisfiability certificate.
//!
//! Literal `x_i` is vertex `2i - 2` and `!x_i` is vertex `2i - 1`, so the
//! complement of a vertex is obtained by flipping its low bit.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clause::{positive_count, Clause};
use crate::error::{invalid, Error, Result};
use crate::oracle::Assignment;

/// A literal, stored as its implication-digraph vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    /// `var` is 1-based.
    pub fn new(var: u32, positive: bool) -> Self {
        debug_assert!(var >= 1);
        Literal(2 * (var - 1) + u32::from(!positive))
    }

    /// `3` is `x3`, `-3` is `!x3`.
    pub fn from_dimacs(lit: i32) -> Self {
        Literal::new(lit.unsigned_abs(), lit > 0)
    }

    pub fn from_vertex(v: u32) -> Self {
        Literal(v)
    }

    pub fn vertex(self) -> u32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0 / 2 + 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Self {
        Literal(self.0 ^ 1)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var());
        if self.is_positive() { v } else { -v }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "!x{}", self.var())
        }
    }
}

/// Sign pattern of a projected 2-clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairType {
    MinusMinus,
    PlusMinus,
    PlusPlus,
}

impl PairType {
    /// 0 for `--`, 1 for `+-`, 2 for `++`: the subscript of its frequency.
    pub fn index(self) -> usize {
        match self {
            PairType::MinusMinus => 0,
            PairType::PlusMinus => 1,
            PairType::PlusPlus => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoClause {
    a: Literal,
    b: Literal,
    pair_type: PairType,
}

impl TwoClause {
    pub fn new(a: Literal, b: Literal) -> Result<Self> {
        if a.var() == b.var() {
            return Err(invalid(format!("2-clause ({a} v {b}) repeats a variable")));
        }
        let pair_type = match (a.is_positive(), b.is_positive()) {
            (true, true) => PairType::PlusPlus,
            (false, false) => PairType::MinusMinus,
            _ => PairType::PlusMinus,
        };
        Ok(Self { a, b, pair_type })
    }

    pub fn literals(&self) -> [Literal; 2] {
        [self.a, self.b]
    }

    pub fn pair_type(&self) -> PairType {
        self.pair_type
    }
}

impl fmt::Display for TwoClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} v {})", self.a, self.b)
    }
}

pub fn two_clause_type(tc: &TwoClause) -> PairType {
    tc.pair_type
}

/// Which qualifying literals a projection keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionPolicy {
    /// The qualifying literals with the smallest variable indices.
    Smallest,
    /// A uniformly random pair of qualifying literals.
    #[default]
    Uniform,
}

impl std::str::FromStr for ProjectionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smallest" => Ok(Self::Smallest),
            "uniform" => Ok(Self::Uniform),
            _ => Err(invalid(format!("unknown projection policy `{s}`"))),
        }
    }
}

/// Projects a k-clause onto a 2-clause by its number of positives `X`:
/// `X = 0` keeps two negatives, `X = 1` keeps the positive and a negative,
/// `X >= 2` keeps two positives. Among qualifying literals the ones with the
/// smallest variable indices are kept, so `rng` is never consumed.
pub fn project<R: Rng + ?Sized>(c: &Clause, _rng: &mut R) -> TwoClause {
    project_smallest(c)
}

/// [`project`] under an explicit policy.
pub fn project_with<R: Rng + ?Sized>(c: &Clause, policy: ProjectionPolicy, rng: &mut R) -> TwoClause {
    match policy {
        ProjectionPolicy::Smallest => project_smallest(c),
        ProjectionPolicy::Uniform => project_uniform(c, rng),
    }
}

fn build_pair(c: &Clause, positive_pair: bool, i: usize, j: usize, x: usize) -> TwoClause {
    let pick = |positive: bool, nth: usize| {
        c.literals()
            .filter(|&(_, s)| s == positive)
            .nth(nth)
            .map(|(v, s)| Literal::new(v, s))
            .expect("sign count checked by caller")
    };
    let (a, b) = match x {
        0 => (pick(false, i), pick(false, j)),
        1 => (pick(true, 0), pick(false, i)),
        _ => (pick(positive_pair, i), pick(positive_pair, j)),
    };
    TwoClause::new(a, b).expect("distinct variables in a canonical clause")
}

pub(crate) fn project_smallest(c: &Clause) -> TwoClause {
    build_pair(c, true, 0, 1, positive_count(c))
}

/// Kept literals drawn uniformly among the qualifying ones; `++` and `--`
/// pairs are stored in ascending variable order, `+-` positive first.
pub fn project_uniform<R: Rng + ?Sized>(c: &Clause, rng: &mut R) -> TwoClause {
    let x = positive_count(c);
    let pool = match x {
        0 => c.k(),
        1 => c.k() - 1,
        _ => x,
    };
    if x == 1 {
        return build_pair(c, true, rng.random_range(0..pool), 0, 1);
    }
    let i = rng.random_range(0..pool);
    let mut j = rng.random_range(0..pool - 1);
    if j >= i {
        j += 1;
    }
    build_pair(c, true, i.min(j), i.max(j), x)
}

/// Directed graph on the `2n` literals; the clause `(a v b)` adds the edges
/// `!a -> b` and `!b -> a`. Parallel edges are kept.
#[derive(Debug, Clone)]
pub struct ImplicationDigraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    clause_count: usize,
}

impl ImplicationDigraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn clause_count(&self) -> usize {
        self.clause_count
    }

    pub fn out_neighbors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn has_edge(&self, from: Literal, to: Literal) -> bool {
        self.out_neighbors(from.vertex()).contains(&to.vertex())
    }
}

pub fn build_digraph(two_clauses: &[TwoClause], n: usize) -> Result<ImplicationDigraph> {
    if let Some(bad) = two_clauses
        .iter()
        .flat_map(|c| c.literals())
        .find(|l| l.var() as usize > n)
    {
        return Err(invalid(format!("literal {bad} outside 1..={n}")));
    }
    let vertices = 2 * n;
    let edges = || {
        two_clauses.iter().flat_map(|c| {
            [(c.a.negate().vertex(), c.b.vertex()), (c.b.negate().vertex(), c.a.vertex())]
        })
    };
    let mut offsets = vec![0usize; vertices + 1];
    for (from, _) in edges() {
        offsets[from as usize + 1] += 1;
    }
    for i in 0..vertices {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut targets = vec![0u32; offsets[vertices]];
    for (from, to) in edges() {
        targets[cursor[from as usize]] = to;
        cursor[from as usize] += 1;
    }
    Ok(ImplicationDigraph { n, offsets, targets, clause_count: two_clauses.len() })
}

/// Strongly connected components. Ids follow reverse topological order of
/// the condensation: an edge between different components always goes from
/// the larger id to the smaller one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPartition {
    component: Vec<u32>,
    count: usize,
}

impl SccPartition {
    pub fn component_of(&self, lit: Literal) -> u32 {
        self.component[lit.vertex() as usize]
    }

    pub fn components(&self) -> &[u32] {
        &self.component
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Iterative Tarjan lowlink.
pub fn strongly_connected_components(g: &ImplicationDigraph) -> SccPartition {
    const UNSET: u32 = u32::MAX;
    let nv = g.vertex_count();
    let mut component = vec![UNSET; nv];
    let mut index = vec![UNSET; nv];
    let mut low = vec![0u32; nv];
    let mut stack: Vec<u32> = Vec::new();
    // (vertex, next edge offset)
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0u32;

    for root in 0..nv as u32 {
        if index[root as usize] != UNSET {
            continue;
        }
        call.push((root, g.offsets[root as usize]));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);

        while let Some(&(u, edge)) = call.last() {
            if edge < g.offsets[u as usize + 1] {
                let w = g.targets[edge];
                call.last_mut().unwrap().1 += 1;
                if index[w as usize] == UNSET {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    call.push((w, g.offsets[w as usize]));
                } else if component[w as usize] == UNSET {
                    low[u as usize] = low[u as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if low[u as usize] == index[u as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    component[w as usize] = count;
                    if w == u {
                        break;
                    }
                }
                count += 1;
            }
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[u as usize]);
            }
        }
    }
    SccPartition { component, count: count as usize }
}

/// True iff no variable shares a component with its negation.
pub fn is_satisfiable(g: &ImplicationDigraph) -> bool {
    let p = strongly_connected_components(g);
    partition_is_consistent(&p)
}

fn partition_is_consistent(p: &SccPartition) -> bool {
    p.component.chunks_exact(2).all(|pair| pair[0] != pair[1])
}

/// A satisfying assignment read off the partition, or `None` when some
/// `x` and `!x` share a component. A literal is made true when its
/// component comes later in topological order than its complement's,
/// i.e. has the smaller id.
pub fn extract_assignment(g: &ImplicationDigraph, p: &SccPartition) -> Option<Assignment> {
    debug_assert_eq!(p.component.len(), g.vertex_count());
    if !partition_is_consistent(p) {
        return None;
    }
    Some(Assignment::new(
        p.component.chunks_exact(2).map(|pair| pair[0] < pair[1]).collect(),
    ))
}

/// `m` uniform 2-clauses on two distinct variables of `1..=n`, `n >= 2`.
pub fn random_two_cnf<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<TwoClause> {
    (0..m)
        .map(|_| {
            let a = rng.random_range(1..=n as u32);
            let mut b = rng.random_range(1..n as u32);
            if b >= a {
                b += 1;
            }
            TwoClause::new(Literal::new(a, rng.random()), Literal::new(b, rng.random())).unwrap()
        })
        .collect()
}

pub const MAX_BICYCLE_VARS: usize = 12;
pub const MAX_BICYCLE_T: usize = 8;

/// Bicycle counts keyed by the number `t` of inner path literals; a bicycle
/// with `t` inner literals uses `t + 1` clauses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BicycleCount {
    pub by_t: BTreeMap<usize, u64>,
}

impl BicycleCount {
    pub fn total(&self) -> u64 {
        self.by_t.values().sum()
    }
}

/// Counts tuples `(v, l1..lt, w)` for `t` in `2..=t_max` where `l1..lt` are
/// strongly distinct (no repeated variable), `v` and `w` are drawn from
/// `{li, !li}`, and the clauses `(!v v l1)`, `(!li v l(i+1))`, `(!lt v w)`
/// are all present.
pub fn count_bicycles(two_clauses: &[TwoClause], n: usize, t_max: usize) -> Result<BicycleCount> {
    if n > MAX_BICYCLE_VARS || t_max > MAX_BICYCLE_T {
        return Err(Error::ResourceLimit(format!(
            "bicycle enumeration limited to n <= {MAX_BICYCLE_VARS}, t <= {MAX_BICYCLE_T} (got n = {n}, t = {t_max})"
        )));
    }
    let g = build_digraph(two_clauses, n)?;
    let nv = g.vertex_count();
    let mut adj = vec![false; nv * nv];
    for u in 0..nv as u32 {
        for &w in g.out_neighbors(u) {
            adj[u as usize * nv + w as usize] = true;
        }
    }
    let edge = |a: u32, b: u32| adj[a as usize * nv + b as usize];

    let mut counts = BicycleCount::default();
    for t in 2..=t_max {
        counts.by_t.insert(t, 0);
    }
    let mut path: Vec<u32> = Vec::with_capacity(t_max);
    let mut used_var = vec![false; n + 1];

    fn extend(
        path: &mut Vec<u32>,
        used_var: &mut [bool],
        nv: usize,
        t_max: usize,
        edge: &dyn Fn(u32, u32) -> bool,
        counts: &mut BicycleCount,
    ) {
        let t = path.len();
        if t >= 2 {
            let ends = || path.iter().flat_map(|&l| [l, l ^ 1]);
            let first = path[0];
            let last = path[t - 1];
            let starts = ends().filter(|&v| edge(v, first)).count() as u64;
            let finishes = ends().filter(|&w| edge(last, w)).count() as u64;
            *counts.by_t.get_mut(&t).unwrap() += starts * finishes;
        }
        if t == t_max {
            return;
        }
        let candidates: Vec<u32> = match path.last() {
            None => (0..nv as u32).collect(),
            Some(&u) => (0..nv as u32).filter(|&w| edge(u, w)).collect(),
        };
        for w in candidates {
            let var = (w / 2 + 1) as usize;
            if used_var[var] {
                continue;
            }
            used_var[var] = true;
            path.push(w);
            extend(path, used_var, nv, t_max, edge, counts);
            path.pop();
            used_var[var] = false;
        }
    }

    if t_max >= 2 {
        extend(&mut path, &mut used_var, nv, t_max, &edge, &mut counts);
    }
    Ok(counts)
}

/// Largest number of other vertices reachable from any single vertex.
pub fn max_reachable_set_size(g: &ImplicationDigraph) -> usize {
    let nv = g.vertex_count();
    let mut stamp = vec![u32::MAX; nv];
    let mut queue: Vec<u32> = Vec::new();
    let mut best = 0;
    for s in 0..nv as u32 {
        if g.out_neighbors(s).is_empty() {
            continue;
        }
        queue.clear();
        queue.push(s);
        stamp[s as usize] = s;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &w in g.out_neighbors(u) {
                if stamp[w as usize] != s {
                    stamp[w as usize] = s;
                    queue.push(w);
                }
            }
        }
        best = best.max(queue.len() - 1);
    }
    best
}
