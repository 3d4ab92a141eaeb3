//! Finite T0-spaces given by their open sets.
//!
//! The specialization order is derived from the opens: `y → x` when the
//! closure of `x` sits immediately below the closure of `y`. Subsets are
//! bitmasks over at most 64 points.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceError {
    TooManyPoints(usize),
    DuplicateLabel(String),
    UnknownPoint(String),
    MissingEmptyOrFull,
    NotClosedUnderUnion(String, String),
    NotClosedUnderIntersection(String, String),
    NotT0(String, String),
    Disconnected,
    NotLocallyClosed(String),
}

impl fmt::Display for SpaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceError::TooManyPoints(n) => write!(f, "{n} points given, at most 64 supported"),
            SpaceError::DuplicateLabel(l) => write!(f, "duplicate point label `{l}`"),
            SpaceError::UnknownPoint(l) => write!(f, "unknown point `{l}`"),
            SpaceError::MissingEmptyOrFull => {
                write!(f, "opens must contain the empty set and the whole space")
            }
            SpaceError::NotClosedUnderUnion(a, b) => {
                write!(f, "union of opens {a} and {b} is not open")
            }
            SpaceError::NotClosedUnderIntersection(a, b) => {
                write!(f, "intersection of opens {a} and {b} is not open")
            }
            SpaceError::NotT0(a, b) => write!(f, "points {a} and {b} have the same closure"),
            SpaceError::Disconnected => write!(f, "space is not connected"),
            SpaceError::NotLocallyClosed(s) => write!(f, "{s} is not locally closed"),
        }
    }
}

impl core::error::Error for SpaceError {}

/// A subset of the points, as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n == 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        PointSet(1 << i)
    }

    pub fn from_points(points: impl IntoIterator<Item = usize>) -> Self {
        PointSet(points.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, o: PointSet) -> Self {
        PointSet(self.0 | o.0)
    }

    pub fn intersection(self, o: PointSet) -> Self {
        PointSet(self.0 & o.0)
    }

    pub fn minus(self, o: PointSet) -> Self {
        PointSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: PointSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// `carrier = open ∖ removed` with `removed ⊆ open`, both open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocallyClosedSet {
    pub carrier: PointSet,
    pub open: PointSet,
    pub removed: PointSet,
    pub connected: bool,
}

/// Two distinct directed paths into the same point from a common source.
/// Each path lists points from the source to the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPair {
    pub source: usize,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    labels: Vec<String>,
    opens: Vec<PointSet>,
    closures: Vec<PointSet>,
    minimal_opens: Vec<PointSet>,
}

impl FiniteSpace {
    pub fn new(labels: Vec<String>, opens: Vec<PointSet>) -> Result<Self, SpaceError> {
        let n = labels.len();
        if n > 64 {
            return Err(SpaceError::TooManyPoints(n));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        let full = PointSet::full(n);
        let opens: Vec<PointSet> = opens
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if !opens.contains(&PointSet::EMPTY) || !opens.contains(&full) {
            return Err(SpaceError::MissingEmptyOrFull);
        }
        let mut space = FiniteSpace {
            labels,
            opens,
            closures: Vec::new(),
            minimal_opens: Vec::new(),
        };
        for &a in &space.opens {
            if !a.is_subset(full) {
                return Err(SpaceError::UnknownPoint(format!("bit outside {n} points")));
            }
            for &b in &space.opens {
                if !space.opens.contains(&a.union(b)) {
                    return Err(SpaceError::NotClosedUnderUnion(
                        space.carrier_name(a),
                        space.carrier_name(b),
                    ));
                }
                if !space.opens.contains(&a.intersection(b)) {
                    return Err(SpaceError::NotClosedUnderIntersection(
                        space.carrier_name(a),
                        space.carrier_name(b),
                    ));
                }
            }
        }
        space.minimal_opens = (0..n)
            .map(|x| {
                space
                    .opens
                    .iter()
                    .filter(|u| u.contains(x))
                    .fold(full, |acc, &u| acc.intersection(u))
            })
            .collect();
        space.closures = (0..n)
            .map(|x| PointSet::from_points((0..n).filter(|&y| space.minimal_opens[y].contains(x))))
            .collect();
        for a in 0..n {
            for b in a + 1..n {
                if space.closures[a] == space.closures[b] {
                    return Err(SpaceError::NotT0(
                        space.labels[a].clone(),
                        space.labels[b].clone(),
                    ));
                }
            }
        }
        Ok(space)
    }

    /// Builds a space from point labels and opens listed by label.
    pub fn from_labels(points: &[&str], opens: &[&[&str]]) -> Result<Self, SpaceError> {
        let labels: Vec<String> = points.iter().map(|s| s.to_string()).collect();
        let mut sets = Vec::new();
        for o in opens {
            let mut s = PointSet::EMPTY;
            for l in *o {
                let i = labels
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| SpaceError::UnknownPoint(l.to_string()))?;
                s = s.union(PointSet::singleton(i));
            }
            sets.push(s);
        }
        FiniteSpace::new(labels, sets)
    }

    /// The four-point diamond: `4 → 2, 4 → 3, 2 → 1, 3 → 1`.
    pub fn csp() -> Self {
        FiniteSpace::from_labels(
            &["1", "2", "3", "4"],
            &[
                &[],
                &["4"],
                &["2", "4"],
                &["3", "4"],
                &["2", "3", "4"],
                &["1", "2", "3", "4"],
            ],
        )
        .expect("built-in space is valid")
    }

    /// The four-point pseudo-circle: `3 → 1, 3 → 2, 4 → 1, 4 → 2`.
    pub fn s21() -> Self {
        FiniteSpace::from_labels(
            &["1", "2", "3", "4"],
            &[
                &[],
                &["3"],
                &["4"],
                &["3", "4"],
                &["1", "3", "4"],
                &["2", "3", "4"],
                &["1", "2", "3", "4"],
            ],
        )
        .expect("built-in space is valid")
    }

    pub fn one_point() -> Self {
        FiniteSpace::from_labels(&["1"], &[&[], &["1"]]).expect("built-in space is valid")
    }

    /// Chain on `n` points whose opens are the final segments `{k, …, n}`.
    pub fn chain(n: usize) -> Self {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let opens = (0..=n).map(|k| PointSet::from_points(k..n)).collect();
        FiniteSpace::new(labels, opens).expect("chains are T0 spaces")
    }

    /// Discrete space on `n` points.
    pub fn discrete(n: usize) -> Self {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let opens = (0..1u64 << n).map(PointSet).collect();
        FiniteSpace::new(labels, opens).expect("discrete spaces are T0")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn point(&self, label: &str) -> Result<usize, SpaceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SpaceError::UnknownPoint(label.to_string()))
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn closed_sets(&self) -> Vec<PointSet> {
        self.opens.iter().map(|&u| self.full().minus(u)).collect()
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        self.opens.contains(&s)
    }

    pub fn closure(&self, x: usize) -> PointSet {
        self.closures[x]
    }

    /// Smallest open set containing `x`.
    pub fn smallest_open(&self, x: usize) -> PointSet {
        self.minimal_opens[x]
    }

    /// Smallest open set containing `x`, minus `x`.
    pub fn boundary(&self, x: usize) -> PointSet {
        self.minimal_opens[x].minus(PointSet::singleton(x))
    }

    /// Smallest open set containing `s`.
    pub fn open_hull(&self, s: PointSet) -> PointSet {
        s.iter()
            .fold(PointSet::EMPTY, |acc, x| acc.union(self.minimal_opens[x]))
    }

    /// Points `y` with `y → x`: the closure of `x` lies immediately below that of `y`.
    pub fn specialization_arrows(&self, x: usize) -> Vec<usize> {
        let cx = self.closures[x];
        let above: Vec<usize> = (0..self.len())
            .filter(|&y| y != x && cx.is_subset(self.closures[y]))
            .collect();
        above
            .iter()
            .copied()
            .filter(|&y| {
                !above
                    .iter()
                    .any(|&z| z != y && self.closures[z].is_subset(self.closures[y]))
            })
            .collect()
    }

    /// All arrows `(y, x)` with `y → x`.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|x| {
                self.specialization_arrows(x)
                    .into_iter()
                    .map(move |y| (y, x))
            })
            .collect()
    }

    /// Whether `a` and `b` are comparable in the specialization order.
    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.closures[a].contains(b) || self.closures[b].contains(a)
    }

    /// Connected components of the subspace `s`.
    pub fn components(&self, s: PointSet) -> Vec<PointSet> {
        let mut left = s;
        let mut out = Vec::new();
        while let Some(start) = left.iter().next() {
            let mut comp = PointSet::singleton(start);
            let mut frontier = vec![start];
            while let Some(p) = frontier.pop() {
                for q in left.iter() {
                    if !comp.contains(q) && self.comparable(p, q) {
                        comp = comp.union(PointSet::singleton(q));
                        frontier.push(q);
                    }
                }
            }
            left = left.minus(comp);
            out.push(comp);
        }
        out
    }

    pub fn is_connected_subset(&self, s: PointSet) -> bool {
        self.components(s).len() == 1
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_subset(self.full())
    }

    pub fn locally_closed(&self, s: PointSet) -> Option<LocallyClosedSet> {
        let hull = self.open_hull(s);
        let removed = hull.minus(s);
        self.is_open(removed).then(|| LocallyClosedSet {
            carrier: s,
            open: hull,
            removed,
            connected: !s.is_empty() && self.is_connected_subset(s),
        })
    }

    pub fn is_locally_closed(&self, s: PointSet) -> bool {
        self.locally_closed(s).is_some()
    }

    /// Whether `u` is open in the subspace `y`.
    pub fn is_relatively_open(&self, u: PointSet, y: PointSet) -> bool {
        u.is_subset(y) && self.opens.iter().any(|&o| o.intersection(y) == u)
    }

    /// All connected nonempty locally closed subsets, ordered by size and then
    /// by their sorted point lists.
    pub fn locally_closed_connected(&self) -> Vec<LocallyClosedSet> {
        let mut carriers = BTreeSet::new();
        for &u in &self.opens {
            for &v in &self.opens {
                if v.is_subset(u) && u != v {
                    carriers.insert(u.minus(v));
                }
            }
        }
        let mut out: Vec<LocallyClosedSet> = carriers
            .into_iter()
            .filter_map(|c| self.locally_closed(c))
            .filter(|lc| lc.connected)
            .collect();
        out.sort_by_key(|lc| (lc.carrier.len(), lc.carrier.iter().collect::<Vec<_>>()));
        out
    }

    /// Whether the undirected specialization graph is a simple path.
    pub fn is_accordion(&self) -> Result<bool, SpaceError> {
        if !self.is_connected() {
            return Err(SpaceError::Disconnected);
        }
        let arrows = self.arrows();
        let mut degree = vec![0usize; self.len()];
        for &(y, x) in &arrows {
            degree[y] += 1;
            degree[x] += 1;
        }
        Ok(arrows.len() + 1 == self.len() && degree.iter().all(|&d| d <= 2))
    }

    /// Directed paths of length at least one ending at `x`, listed source first.
    pub fn paths_into(&self, x: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = vec![vec![x]];
        while let Some(rev) = stack.pop() {
            let head = *rev.last().expect("paths are nonempty");
            for y in self.specialization_arrows(head) {
                let mut next = rev.clone();
                next.push(y);
                let mut path = next.clone();
                path.reverse();
                out.push(path);
                stack.push(next);
            }
        }
        out.sort();
        out
    }

    /// Unordered pairs of distinct paths into `x` sharing their source.
    pub fn distinct_path_pairs(&self, x: usize) -> Vec<PathPair> {
        let paths = self.paths_into(x);
        let mut out = Vec::new();
        for (i, p) in paths.iter().enumerate() {
            for q in &paths[i + 1..] {
                if p[0] == q[0] && p != q {
                    out.push(PathPair {
                        source: p[0],
                        first: p.clone(),
                        second: q.clone(),
                    });
                }
            }
        }
        out
    }

    /// Canonical name of a subset: labels in point order, concatenated when
    /// every label is a single character and comma-separated otherwise.
    pub fn carrier_name(&self, s: PointSet) -> String {
        let parts: Vec<&str> = s.iter().map(|i| self.labels[i].as_str()).collect();
        if self.labels.iter().all(|l| l.chars().count() == 1) {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    /// Inverse of [`carrier_name`](Self::carrier_name); order of labels is free.
    pub fn parse_carrier(&self, name: &str) -> Result<PointSet, SpaceError> {
        let mut s = PointSet::EMPTY;
        if self.labels.iter().all(|l| l.chars().count() == 1) && !name.contains(',') {
            for c in name.chars() {
                let mut buf = [0u8; 4];
                s = s.union(PointSet::singleton(self.point(c.encode_utf8(&mut buf))?));
            }
        } else {
            for part in name.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                s = s.union(PointSet::singleton(self.point(part)?));
            }
        }
        Ok(s)
    }
}
