//! Hereditarily finite sets, hash-consed into a process-wide arena.
//!
//! Every [`HFSet`] is a small handle into the arena, so equality and hashing
//! are O(1). Construction goes through a `Mutex`, which makes building sets
//! from several threads safe; handles are `Copy + Send + Sync`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Mutex, MutexGuard, OnceLock};

use thiserror::Error;

/// Default cap on the number of distinct sets the arena may hold.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("set arena budget of {limit} distinct sets exceeded")]
    BudgetExceeded { limit: usize },
}

/// Handle to an interned hereditarily finite set.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct HFSet(u32);

struct Node {
    elems: Box<[u32]>,
    rank: u32,
}

struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Box<[u32]>, u32>,
    budget: usize,
    text: HashMap<u32, std::sync::Arc<str>>,
}

impl Arena {
    fn new() -> Self {
        let mut arena = Arena {
            nodes: Vec::new(),
            index: HashMap::new(),
            budget: DEFAULT_NODE_BUDGET,
            text: HashMap::new(),
        };
        arena.intern(Vec::new()).expect("empty set fits any budget");
        arena
    }

    fn intern(&mut self, mut elems: Vec<u32>) -> Result<u32, SetError> {
        elems.sort_unstable();
        elems.dedup();
        if let Some(&id) = self.index.get(elems.as_slice()) {
            return Ok(id);
        }
        if self.nodes.len() >= self.budget.max(1) {
            return Err(SetError::BudgetExceeded { limit: self.budget });
        }
        let rank = elems
            .iter()
            .map(|&e| self.nodes[e as usize].rank + 1)
            .max()
            .unwrap_or(0);
        let id = self.nodes.len() as u32;
        let key: Box<[u32]> = elems.into_boxed_slice();
        self.nodes.push(Node { elems: key.clone(), rank });
        self.index.insert(key, id);
        Ok(id)
    }

    fn elems(&self, id: u32) -> &[u32] {
        &self.nodes[id as usize].elems
    }

    fn rank(&self, id: u32) -> u32 {
        self.nodes[id as usize].rank
    }

    fn substitute(&mut self, a: u32, b: u32, memo: &mut HashMap<u32, u32>) -> Result<u32, SetError> {
        if self.elems(a).is_empty() {
            return Ok(b);
        }
        if let Some(&r) = memo.get(&a) {
            return Ok(r);
        }
        let children: Vec<u32> = self.elems(a).to_vec();
        let mut out = Vec::with_capacity(children.len());
        for c in children {
            out.push(self.substitute(c, b, memo)?);
        }
        let r = self.intern(out)?;
        memo.insert(a, r);
        Ok(r)
    }

    fn closure(&self, x: u32) -> HashSet<u32> {
        let mut seen = HashSet::new();
        let mut stack: Vec<u32> = self.elems(x).to_vec();
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend_from_slice(self.elems(n));
            }
        }
        seen
    }

    fn serialize(&mut self, id: u32) -> std::sync::Arc<str> {
        if let Some(s) = self.text.get(&id) {
            return s.clone();
        }
        let mut kids: Vec<(u32, std::sync::Arc<str>)> = self
            .elems(id)
            .to_vec()
            .into_iter()
            .map(|c| (self.rank(c), self.serialize(c)))
            .collect();
        kids.sort();
        let mut s = String::from("{");
        for (i, (_, t)) in kids.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(t);
        }
        s.push('}');
        let s: std::sync::Arc<str> = s.into();
        self.text.insert(id, s.clone());
        s
    }

    fn canonical_cmp(&mut self, a: u32, b: u32) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.rank(a)
            .cmp(&self.rank(b))
            .then_with(|| self.serialize(a).cmp(&self.serialize(b)))
    }

    fn sorted(&mut self, mut ids: Vec<u32>) -> Vec<u32> {
        for &i in &ids {
            self.serialize(i);
        }
        ids.sort_by(|&a, &b| self.canonical_cmp(a, b));
        ids
    }
}

fn arena() -> MutexGuard<'static, Arena> {
    static ARENA: OnceLock<Mutex<Arena>> = OnceLock::new();
    ARENA
        .get_or_init(|| Mutex::new(Arena::new()))
        .lock()
        .unwrap_or_else(|p| p.into_inner())
}

/// Sets the maximum number of distinct sets; existing sets are kept.
pub fn set_node_budget(limit: usize) {
    arena().budget = limit;
}

pub fn node_budget() -> usize {
    arena().budget
}

/// Number of distinct sets interned so far.
pub fn node_count() -> usize {
    arena().nodes.len()
}

impl HFSet {
    pub fn empty() -> HFSet {
        HFSet(0)
    }

    pub fn from_elements<I: IntoIterator<Item = HFSet>>(xs: I) -> Result<HFSet, SetError> {
        let ids = xs.into_iter().map(|x| x.0).collect();
        arena().intern(ids).map(HFSet)
    }

    /// `{x}`
    pub fn singleton(x: HFSet) -> Result<HFSet, SetError> {
        HFSet::from_elements([x])
    }

    /// Canonical identity within this process.
    pub fn id(self) -> u32 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Elements in canonical order.
    pub fn elements(self) -> Vec<HFSet> {
        let mut a = arena();
        let ids = a.elems(self.0).to_vec();
        a.sorted(ids).into_iter().map(HFSet).collect()
    }

    pub fn len(self) -> usize {
        arena().elems(self.0).len()
    }

    pub fn contains(self, x: HFSet) -> bool {
        arena().elems(self.0).binary_search(&x.0).is_ok()
    }

    /// von Neumann rank: 0 for `{}`, otherwise one more than the largest element rank.
    pub fn rank(self) -> u32 {
        arena().rank(self.0)
    }

    /// `{}` = 0, n = {n-1}.
    pub fn zermelo(n: usize) -> Result<HFSet, SetError> {
        let mut a = arena();
        let mut cur = 0u32;
        for _ in 0..n {
            cur = a.intern(vec![cur])?;
        }
        Ok(HFSet(cur))
    }

    /// `{{a},{a,b}}`
    pub fn kuratowski(a: HFSet, b: HFSet) -> Result<HFSet, SetError> {
        let mut ar = arena();
        let sa = ar.intern(vec![a.0])?;
        let sab = ar.intern(vec![a.0, b.0])?;
        ar.intern(vec![sa, sab]).map(HFSet)
    }

    /// The pair (1, 0) = {{1},{1,0}}.
    pub fn diamond() -> Result<HFSet, SetError> {
        HFSet::kuratowski(HFSet::zermelo(1)?, HFSet::empty())
    }

    /// {0, 1}
    pub fn two_v() -> Result<HFSet, SetError> {
        HFSet::from_elements([HFSet::empty(), HFSet::zermelo(1)?])
    }

    /// +n is the diamond with its empty set replaced by n; -n wraps the diamond in n singletons.
    pub fn integer_set(z: i64) -> Result<HFSet, SetError> {
        let d = HFSet::diamond()?;
        let n = z.unsigned_abs() as usize;
        if z >= 0 {
            d.substitute(HFSet::zermelo(n)?)
        } else {
            let mut a = arena();
            let mut cur = d.0;
            for _ in 0..n {
                cur = a.intern(vec![cur])?;
            }
            Ok(HFSet(cur))
        }
    }

    /// Replaces every occurrence of `{}` inside `self` by `b`.
    pub fn substitute(self, b: HFSet) -> Result<HFSet, SetError> {
        let mut memo = HashMap::new();
        arena().substitute(self.0, b.0, &mut memo).map(HFSet)
    }

    /// Every set reachable by iterated membership, excluding `self`, in canonical order.
    pub fn transitive_closure(self) -> Vec<HFSet> {
        let mut a = arena();
        let ids: Vec<u32> = a.closure(self.0).into_iter().collect();
        a.sorted(ids).into_iter().map(HFSet).collect()
    }

    /// `c` is a constituent of `self` when it is `self` or lies in its transitive closure.
    pub fn has_constituent(self, c: HFSet) -> bool {
        is_constituent(c, self)
    }

    /// Canonical text form, e.g. `{{},{{}}}`.
    pub fn serialize(self) -> String {
        arena().serialize(self.0).to_string()
    }

    /// One `(parent, child)` edge per membership among `self` and its closure.
    /// Parents run from the highest canonical position down; children ascend.
    pub fn structure_edges(self) -> Vec<(HFSet, HFSet)> {
        let mut a = arena();
        let mut nodes: Vec<u32> = a.closure(self.0).into_iter().collect();
        nodes.push(self.0);
        let mut nodes = a.sorted(nodes);
        nodes.reverse();
        let mut out = Vec::new();
        for p in nodes {
            let kids = a.elems(p).to_vec();
            for c in a.sorted(kids) {
                out.push((HFSet(p), HFSet(c)));
            }
        }
        out
    }

    /// Graphviz rendering of [`HFSet::structure_edges`]; node names are local indices.
    pub fn to_dot(self) -> String {
        let edges = self.structure_edges();
        let mut a = arena();
        let mut nodes: Vec<u32> = a.closure(self.0).into_iter().collect();
        nodes.push(self.0);
        let nodes = a.sorted(nodes);
        let local: HashMap<u32, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut s = String::from("digraph {\n");
        for &n in &nodes {
            s.push_str(&format!("  \"{}\" [label=\"{}\"];\n", local[&n], a.serialize(n)));
        }
        for (p, c) in edges {
            s.push_str(&format!("  \"{}\" -> \"{}\";\n", local[&p.0], local[&c.0]));
        }
        s.push_str("}\n");
        s
    }
}

pub fn is_constituent(c: HFSet, x: HFSet) -> bool {
    if c == x {
        return true;
    }
    let a = arena();
    let target_rank = a.rank(c.0);
    if a.rank(x.0) <= target_rank {
        return false;
    }
    let mut seen = HashSet::new();
    let mut stack = vec![x.0];
    while let Some(n) = stack.pop() {
        for &e in a.elems(n) {
            if e == c.0 {
                return true;
            }
            if a.rank(e) > target_rank && seen.insert(e) {
                stack.push(e);
            }
        }
    }
    false
}

impl PartialOrd for HFSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by rank, then by text form.
impl Ord for HFSet {
    fn cmp(&self, other: &Self) -> Ordering {
        arena().canonical_cmp(self.0, other.0)
    }
}

impl fmt::Display for HFSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl fmt::Debug for HFSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HFSet#{}{}", self.0, self.serialize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> HFSet {
        HFSet::zermelo(n).unwrap()
    }

    #[test]
    fn builders_match_definitions() {
        assert_eq!(HFSet::from_elements([]).unwrap(), HFSet::empty());
        assert_eq!(HFSet::from_elements([HFSet::empty()]).unwrap(), z(1));
        assert_eq!(HFSet::from_elements([HFSet::empty(), z(1)]).unwrap(), HFSet::two_v().unwrap());
        assert_eq!(HFSet::diamond().unwrap().serialize(), "{{{{}}},{{},{{}}}}");
        assert_eq!(
            HFSet::integer_set(3).unwrap(),
            HFSet::kuratowski(z(4), z(3)).unwrap()
        );
        assert_eq!(
            HFSet::integer_set(-1).unwrap(),
            HFSet::singleton(HFSet::diamond().unwrap()).unwrap()
        );
        assert_eq!(HFSet::integer_set(0).unwrap(), HFSet::diamond().unwrap());
    }

    #[test]
    fn duplicates_collapse() {
        let s = HFSet::from_elements([z(1), z(1), HFSet::empty()]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s, HFSet::two_v().unwrap());
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(z(2).substitute(z(3)).unwrap(), z(5));
        let d = HFSet::diamond().unwrap();
        assert_eq!(d.substitute(HFSet::empty()).unwrap(), d);
        assert_eq!(d.substitute(z(3)).unwrap(), HFSet::kuratowski(z(4), z(3)).unwrap());
    }

    #[test]
    fn constituents() {
        let v = HFSet::two_v().unwrap();
        assert!(is_constituent(z(1), v));
        assert!(!is_constituent(HFSet::integer_set(1).unwrap(), HFSet::integer_set(3).unwrap()));
        assert!(is_constituent(v, v));
        assert_eq!(z(3).transitive_closure(), vec![z(0), z(1), z(2)]);
    }

    #[test]
    fn edges_are_ordered() {
        assert!(HFSet::empty().structure_edges().is_empty());
        assert_eq!(z(2).structure_edges(), vec![(z(2), z(1)), (z(1), z(0))]);
        let v = HFSet::two_v().unwrap();
        assert_eq!(v.structure_edges(), vec![(v, z(0)), (v, z(1)), (z(1), z(0))]);
    }

    #[test]
    fn dot_output_is_stable() {
        let dot = HFSet::two_v().unwrap().to_dot();
        let expected = "digraph {\n  \"0\" [label=\"{}\"];\n  \"1\" [label=\"{{}}\"];\n  \"2\" [label=\"{{},{{}}}\"];\n  \"2\" -> \"0\";\n  \"2\" -> \"1\";\n  \"1\" -> \"0\";\n}\n";
        assert_eq!(dot, expected);
    }
}
