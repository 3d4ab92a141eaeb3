use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::DiagramError;
use crate::finspace::{FiniteSpace, PointSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrowKind {
    /// Map induced by an ideal inclusion.
    I,
    /// Map induced by a quotient.
    R,
    /// Boundary map; flips the degree.
    Delta,
    /// Any other declared map, used for vertices outside the locally closed sets.
    Aux,
}

impl ArrowKind {
    pub fn code(self) -> &'static str {
        match self {
            ArrowKind::I => "i",
            ArrowKind::R => "r",
            ArrowKind::Delta => "d",
            ArrowKind::Aux => "c",
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        match s {
            "i" => Some(ArrowKind::I),
            "r" => Some(ArrowKind::R),
            "d" | "delta" => Some(ArrowKind::Delta),
            "c" => Some(ArrowKind::Aux),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSpec {
    pub name: String,
    pub carrier: Option<PointSet>,
    pub degree: u8,
}

impl VertexSpec {
    pub fn label(&self) -> String {
        format!("{}_{}", self.name, self.degree)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowSpec {
    pub kind: ArrowKind,
    pub src: usize,
    pub dst: usize,
    /// Whether the arrow appears in the generating picture of the shape.
    pub drawn: bool,
}

/// The cyclic sequence `U0 → Y0 → Q0 → U1 → Y1 → Q1 → U0` of an ideal `U`
/// of `Y` with quotient `Q = Y ∖ U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SixTerm {
    pub whole: PointSet,
    pub ideal: PointSet,
    pub quotient: PointSet,
    /// `[i0, r0, δ(Q0→U1), i1, r1, δ(Q1→U0)]`.
    pub arrows: [usize; 6],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationRhs {
    Zero,
    Path(Vec<usize>),
}

/// `lhs = rhs` between composable arrow paths. Paths are written like
/// composites: the first arrow is applied last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Vec<usize>,
    pub rhs: RelationRhs,
}

/// Vertices, arrows, six-term sequences and relations of a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramShape {
    name: String,
    space: FiniteSpace,
    vertices: Vec<VertexSpec>,
    arrows: Vec<ArrowSpec>,
    sequences: Vec<SixTerm>,
    relations: Vec<Relation>,
    vertex_index: BTreeMap<(String, u8), usize>,
    arrow_index: BTreeMap<(ArrowKind, usize, usize), usize>,
}

impl DiagramShape {
    /// An empty shape over `space`; see [`from_pairs`](Self::from_pairs).
    pub fn empty(name: impl Into<String>, space: FiniteSpace) -> Self {
        DiagramShape {
            name: name.into(),
            space,
            vertices: Vec::new(),
            arrows: Vec::new(),
            sequences: Vec::new(),
            relations: Vec::new(),
            vertex_index: BTreeMap::new(),
            arrow_index: BTreeMap::new(),
        }
    }

    /// Shape with both degrees of every carrier and the six arrows of every
    /// declared pair `(Y, U)`, `U` open in `Y`.
    pub fn from_pairs(
        name: impl Into<String>,
        space: FiniteSpace,
        carriers: &[PointSet],
        pairs: &[(PointSet, PointSet)],
    ) -> Result<Self, DiagramError> {
        let mut shape = DiagramShape::empty(name, space);
        for &c in carriers {
            if shape.space.locally_closed(c).is_none() || c.is_empty() {
                return Err(DiagramError::Shape(format!(
                    "{} is not a nonempty locally closed set",
                    shape.space.carrier_name(c)
                )));
            }
            let cname = shape.space.carrier_name(c);
            for d in 0..2 {
                shape.push_vertex(VertexSpec {
                    name: cname.clone(),
                    carrier: Some(c),
                    degree: d,
                })?;
            }
        }
        for &(y, u) in pairs {
            shape.push_sequence(y, u)?;
        }
        Ok(shape)
    }

    /// All connected locally closed carriers and every pair whose ideal and
    /// quotient are connected as well.
    pub fn standard(name: impl Into<String>, space: FiniteSpace) -> Self {
        let carriers: Vec<PointSet> = space
            .locally_closed_connected()
            .iter()
            .map(|lc| lc.carrier)
            .collect();
        let mut pairs = Vec::new();
        for &y in &carriers {
            for &u in &carriers {
                if u != y && space.is_relatively_open(u, y) && carriers.contains(&y.minus(u)) {
                    pairs.push((y, u));
                }
            }
        }
        DiagramShape::from_pairs(name, space, &carriers, &pairs)
            .expect("derived carriers and pairs are consistent")
    }

    fn push_vertex(&mut self, v: VertexSpec) -> Result<usize, DiagramError> {
        let key = (v.name.clone(), v.degree);
        if self.vertex_index.contains_key(&key) {
            return Err(DiagramError::Shape(format!(
                "duplicate vertex {}",
                v.label()
            )));
        }
        let id = self.vertices.len();
        self.vertex_index.insert(key, id);
        self.vertices.push(v);
        Ok(id)
    }

    fn ensure_arrow(&mut self, kind: ArrowKind, src: usize, dst: usize) -> usize {
        if let Some(&a) = self.arrow_index.get(&(kind, src, dst)) {
            return a;
        }
        let id = self.arrows.len();
        self.arrows.push(ArrowSpec {
            kind,
            src,
            dst,
            drawn: false,
        });
        self.arrow_index.insert((kind, src, dst), id);
        id
    }

    fn carrier_vertex(&self, c: PointSet, degree: u8) -> Result<usize, DiagramError> {
        let name = self.space.carrier_name(c);
        self.vertex(&name, degree)
            .ok_or_else(|| DiagramError::MissingVertex(format!("{name}_{degree}")))
    }

    fn push_sequence(&mut self, y: PointSet, u: PointSet) -> Result<(), DiagramError> {
        if u.is_empty() || u == y || !self.space.is_relatively_open(u, y) {
            return Err(DiagramError::Shape(format!(
                "{} is not a proper nonempty open subset of {}",
                self.space.carrier_name(u),
                self.space.carrier_name(y)
            )));
        }
        let q = y.minus(u);
        let (u0, y0, q0) = (
            self.carrier_vertex(u, 0)?,
            self.carrier_vertex(y, 0)?,
            self.carrier_vertex(q, 0)?,
        );
        let (u1, y1, q1) = (
            self.carrier_vertex(u, 1)?,
            self.carrier_vertex(y, 1)?,
            self.carrier_vertex(q, 1)?,
        );
        let arrows = [
            self.ensure_arrow(ArrowKind::I, u0, y0),
            self.ensure_arrow(ArrowKind::R, y0, q0),
            self.ensure_arrow(ArrowKind::Delta, q0, u1),
            self.ensure_arrow(ArrowKind::I, u1, y1),
            self.ensure_arrow(ArrowKind::R, y1, q1),
            self.ensure_arrow(ArrowKind::Delta, q1, u0),
        ];
        self.sequences.push(SixTerm {
            whole: y,
            ideal: u,
            quotient: q,
            arrows,
        });
        Ok(())
    }

    /// Marks an existing arrow as part of the generating picture, in both degrees.
    pub fn mark_drawn(
        &mut self,
        kind: ArrowKind,
        src: &str,
        dst: &str,
    ) -> Result<(), DiagramError> {
        let mut found = false;
        for d in 0..2u8 {
            let dd = if kind == ArrowKind::Delta { 1 - d } else { d };
            if let (Some(s), Some(t)) = (self.vertex(src, d), self.vertex(dst, dd)) {
                if let Some(&a) = self.arrow_index.get(&(kind, s, t)) {
                    self.arrows[a].drawn = true;
                    found = true;
                }
            }
        }
        if found {
            Ok(())
        } else {
            Err(DiagramError::MissingArrow(format!(
                "{}:{src}>{dst}",
                kind.code()
            )))
        }
    }

    /// Adds a vertex that is not a locally closed subset (no carrier).
    pub fn add_extra_vertex(&mut self, name: &str, degree: u8) -> Result<usize, DiagramError> {
        self.push_vertex(VertexSpec {
            name: name.to_string(),
            carrier: None,
            degree,
        })
    }

    pub fn add_arrow(
        &mut self,
        kind: ArrowKind,
        src: usize,
        dst: usize,
        drawn: bool,
    ) -> Result<usize, DiagramError> {
        if src >= self.vertices.len() || dst >= self.vertices.len() {
            return Err(DiagramError::Shape(
                "arrow endpoint out of range".to_string(),
            ));
        }
        let (ds, dd) = (self.vertices[src].degree, self.vertices[dst].degree);
        let ok = match kind {
            ArrowKind::I | ArrowKind::R => ds == dd,
            ArrowKind::Delta => ds != dd,
            ArrowKind::Aux => true,
        };
        if !ok {
            return Err(DiagramError::Shape(format!(
                "arrow {} from degree {ds} to degree {dd}",
                kind.code()
            )));
        }
        let a = self.ensure_arrow(kind, src, dst);
        self.arrows[a].drawn |= drawn;
        Ok(a)
    }

    pub fn add_relation(&mut self, rel: Relation) -> Result<(), DiagramError> {
        let ends = |p: &[usize]| -> Result<(usize, usize), DiagramError> {
            if p.is_empty() {
                return Err(DiagramError::Shape("relation path is empty".to_string()));
            }
            for w in p.windows(2) {
                if self.arrows[w[0]].src != self.arrows[w[1]].dst {
                    return Err(DiagramError::Shape(format!(
                        "{} cannot follow {}",
                        self.arrow_label(w[0]),
                        self.arrow_label(w[1])
                    )));
                }
            }
            Ok((
                self.arrows[*p.last().expect("nonempty")].src,
                self.arrows[p[0]].dst,
            ))
        };
        if rel
            .lhs
            .iter()
            .chain(match &rel.rhs {
                RelationRhs::Path(p) => p.iter(),
                RelationRhs::Zero => [].iter(),
            })
            .any(|&a| a >= self.arrows.len())
        {
            return Err(DiagramError::Shape(
                "relation refers to an unknown arrow".to_string(),
            ));
        }
        let l = ends(&rel.lhs)?;
        if let RelationRhs::Path(p) = &rel.rhs {
            if ends(p)? != l {
                return Err(DiagramError::Shape(
                    "relation sides have different endpoints".to_string(),
                ));
            }
        }
        self.relations.push(rel);
        Ok(())
    }

    /// Parses `lhs = rhs` where each side is a space-separated arrow path and
    /// `rhs` may be `0`.
    pub fn parse_relation(&self, text: &str) -> Result<Relation, DiagramError> {
        let (l, r) = text
            .split_once('=')
            .ok_or_else(|| DiagramError::Shape(format!("relation `{text}` has no `=`")))?;
        let lhs = self.parse_path(l)?;
        let rhs = if r.trim() == "0" {
            RelationRhs::Zero
        } else {
            RelationRhs::Path(self.parse_path(r)?)
        };
        Ok(Relation { lhs, rhs })
    }

    pub fn parse_path(&self, text: &str) -> Result<Vec<usize>, DiagramError> {
        text.split_whitespace()
            .map(|t| self.parse_arrow(t))
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn vertices(&self) -> &[VertexSpec] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[ArrowSpec] {
        &self.arrows
    }

    pub fn sequences(&self) -> &[SixTerm] {
        &self.sequences
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn vertex(&self, name: &str, degree: u8) -> Option<usize> {
        self.vertex_index.get(&(name.to_string(), degree)).copied()
    }

    pub fn carrier_vertex_of(&self, c: PointSet, degree: u8) -> Option<usize> {
        self.vertex(&self.space.carrier_name(c), degree)
    }

    pub fn arrow(&self, kind: ArrowKind, src: usize, dst: usize) -> Option<usize> {
        self.arrow_index.get(&(kind, src, dst)).copied()
    }

    /// Looks up a vertex label like `123_1`.
    pub fn parse_vertex(&self, label: &str) -> Result<usize, DiagramError> {
        let (name, deg) = label
            .rsplit_once('_')
            .ok_or_else(|| DiagramError::MissingVertex(label.to_string()))?;
        let degree: u8 = deg
            .parse()
            .map_err(|_| DiagramError::MissingVertex(label.to_string()))?;
        // Carrier names are accepted in any point order.
        if let Some(v) = self.vertex(name, degree) {
            return Ok(v);
        }
        self.space
            .parse_carrier(name)
            .ok()
            .and_then(|c| self.carrier_vertex_of(c, degree))
            .ok_or_else(|| DiagramError::MissingVertex(label.to_string()))
    }

    /// Looks up an arrow label like `r:1234_1>123_1`.
    pub fn parse_arrow(&self, label: &str) -> Result<usize, DiagramError> {
        let missing = || DiagramError::MissingArrow(label.to_string());
        let (kind, rest) = label.split_once(':').ok_or_else(missing)?;
        let kind = ArrowKind::from_code(kind).ok_or_else(missing)?;
        let (s, t) = rest.split_once('>').ok_or_else(missing)?;
        let (s, t) = (self.parse_vertex(s)?, self.parse_vertex(t)?);
        self.arrow(kind, s, t).ok_or_else(missing)
    }

    pub fn vertex_label(&self, v: usize) -> String {
        self.vertices[v].label()
    }

    pub fn arrow_label(&self, a: usize) -> String {
        let ar = &self.arrows[a];
        format!(
            "{}:{}>{}",
            ar.kind.code(),
            self.vertex_label(ar.src),
            self.vertex_label(ar.dst)
        )
    }

    pub fn path_label(&self, path: &[usize]) -> String {
        path.iter()
            .map(|&a| self.arrow_label(a))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn relation_label(&self, rel: &Relation) -> String {
        let rhs = match &rel.rhs {
            RelationRhs::Zero => "0".to_string(),
            RelationRhs::Path(p) => self.path_label(p),
        };
        format!("{} = {}", self.path_label(&rel.lhs), rhs)
    }

    /// The six vertices of a sequence in order `U0, Y0, Q0, U1, Y1, Q1`.
    pub fn sequence_vertices(&self, s: &SixTerm) -> [usize; 6] {
        let mut out = [0; 6];
        for (k, &a) in s.arrows.iter().enumerate() {
            out[k] = self.arrows[a].src;
        }
        out
    }

    pub fn sequence_label(&self, s: &SixTerm) -> String {
        format!(
            "{} ⊂ {} ⊃ {}",
            self.space.carrier_name(s.ideal),
            self.space.carrier_name(s.whole),
            self.space.carrier_name(s.quotient)
        )
    }

    /// The same vertex in the other degree.
    pub fn degree_partner(&self, v: usize) -> Option<usize> {
        let spec = &self.vertices[v];
        self.vertex(&spec.name, 1 - spec.degree)
    }

    /// The same arrow between the degree partners of its endpoints.
    pub fn arrow_partner(&self, a: usize) -> Option<usize> {
        let ar = &self.arrows[a];
        let (s, t) = (self.degree_partner(ar.src)?, self.degree_partner(ar.dst)?);
        self.arrow(ar.kind, s, t)
    }

    /// Path in the arrow graph from `from` to `to` along arrows of the given
    /// kinds, shortest first; returned in composite order.
    pub fn find_path(&self, from: usize, to: usize, kinds: &[ArrowKind]) -> Option<Vec<usize>> {
        self.find_path_through(from, to, kinds, |_| true)
    }

    /// [`Self::find_path`] restricted to intermediate vertices accepted by `allowed`.
    pub fn find_path_through(
        &self,
        from: usize,
        to: usize,
        kinds: &[ArrowKind],
        allowed: impl Fn(usize) -> bool,
    ) -> Option<Vec<usize>> {
        if from == to {
            return Some(Vec::new());
        }
        let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
        let mut queue = alloc::collections::VecDeque::from([from]);
        let mut seen = alloc::collections::BTreeSet::from([from]);
        while let Some(v) = queue.pop_front() {
            for (a, ar) in self.arrows.iter().enumerate() {
                if ar.src != v
                    || !kinds.contains(&ar.kind)
                    || (ar.dst != to && !allowed(ar.dst))
                    || !seen.insert(ar.dst)
                {
                    continue;
                }
                prev.insert(ar.dst, a);
                if ar.dst == to {
                    let mut path = Vec::new();
                    let mut cur = to;
                    while cur != from {
                        let a = prev[&cur];
                        path.push(a);
                        cur = self.arrows[a].src;
                    }
                    return Some(path);
                }
                queue.push_back(ar.dst);
            }
        }
        None
    }
}

impl fmt::Display for DiagramShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} vertices, {} arrows ({} drawn), {} sequences, {} relations",
            self.name,
            self.vertices.len(),
            self.arrows.len(),
            self.arrows.iter().filter(|a| a.drawn).count(),
            self.sequences.len(),
            self.relations.len()
        )
    }
}
