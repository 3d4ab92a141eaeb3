//! JSON encodings of spaces, shapes, block matrices, groups, modules and
//! homomorphism components.
//!
//! Matrices are row-major arrays of integers; entries that do not fit in an
//! `i64` are written as decimal strings. Groups are either literals such as
//! `Z_2^2+Z` or explicit presentations `{"generators": g, "relations": [...]}`
//! whose relation matrix has one row per generator. Module maps are keyed by
//! arrow label (`r:1234_1>123_1`); a missing map is zero.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use filtk_core::ckk::BlockMatrix;
use filtk_core::diagram::{
    ArrowKind, DiagramError, DiagramModule, DiagramShape, Provenance, Variance,
};
use filtk_core::fgab::{InvariantFactors, PresentedGroup};
use filtk_core::finspace::{FiniteSpace, PointSet};
use filtk_core::intlin::IntMatrix;
use filtk_core::BigInt;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::resources;

pub const MODULE_FORMAT: &str = "filtk-module/1";
pub const SHAPE_FORMAT: &str = "filtk-shape/1";
pub const BLOCK_MATRIX_FORMAT: &str = "filtk-block-matrix/1";
pub const TABLE_FORMAT: &str = "filtk-table/1";
pub const HOM_FORMAT: &str = "filtk-hom/1";

/// A schema or content violation, located by a JSON path.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct FormatError {
    pub path: String,
    pub message: String,
}

fn err(path: impl Into<String>, message: impl fmt::Display) -> FormatError {
    FormatError {
        path: path.into(),
        message: message.to_string(),
    }
}

fn join(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

/// Deserializes `text`, reporting the path of the offending field.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        err(
            if path == "." { "$".to_string() } else { path },
            e.into_inner(),
        )
    })
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("DTOs serialize");
    s.push('\n');
    s
}

fn check_format(found: &Option<String>, want: &str, path: &str) -> Result<(), FormatError> {
    match found {
        Some(f) if f != want => Err(err(
            join(path, "format"),
            format!("expected `{want}`, found `{f}`"),
        )),
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------- entries

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Small(i64),
    Big(String),
}

impl Entry {
    fn from_big(x: &BigInt) -> Self {
        i64::try_from(x)
            .map(Entry::Small)
            .unwrap_or_else(|_| Entry::Big(x.to_string()))
    }

    fn to_big(&self, path: &str) -> Result<BigInt, FormatError> {
        match self {
            Entry::Small(v) => Ok(BigInt::from(*v)),
            Entry::Big(s) => s
                .trim()
                .parse()
                .map_err(|_| err(path, format!("`{s}` is not an integer"))),
        }
    }
}

pub type MatrixDto = Vec<Vec<Entry>>;

pub fn matrix_to_dto(m: &IntMatrix) -> MatrixDto {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(Entry::from_big).collect())
        .collect()
}

/// Reads a matrix; `expect` supplies the size when the array is empty and
/// is checked otherwise.
pub fn matrix_from_dto(
    rows: &MatrixDto,
    expect: Option<(usize, usize)>,
    path: &str,
) -> Result<IntMatrix, FormatError> {
    if rows.is_empty() {
        return match expect {
            Some((r, c)) if r == 0 || c == 0 => Ok(IntMatrix::zeros(r, c)),
            Some((r, c)) => Err(err(
                path,
                format!("empty matrix where a {r}x{c} one is expected"),
            )),
            None => Ok(IntMatrix::zeros(0, 0)),
        };
    }
    let cols = rows[0].len();
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(err(
                format!("{path}[{i}]"),
                format!("row has {} entries, expected {cols}", row.len()),
            ));
        }
        for (j, e) in row.iter().enumerate() {
            data.push(e.to_big(&format!("{path}[{i}][{j}]"))?);
        }
    }
    if let Some((r, c)) = expect {
        if (rows.len(), cols) != (r, c) {
            return Err(err(
                path,
                format!("matrix is {}x{cols}, expected {r}x{c}", rows.len()),
            ));
        }
    }
    Ok(IntMatrix::from_vec(rows.len(), cols, data))
}

// ---------------------------------------------------------------- groups

/// Parses a direct sum like `Z+Z_2` or `Z_2^2 ⊕ Z`, keeping the summands in
/// the written order: `Z+Z_2` has the free generator first.
pub fn parse_group_literal(s: &str) -> Result<PresentedGroup, String> {
    let s = s.trim();
    let mut orders: Vec<BigInt> = Vec::new();
    if s != "0" {
        for term in s.split(['+', '⊕']).map(str::trim) {
            let (base, power) = match term.split_once('^') {
                Some((b, p)) => (
                    b.trim(),
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad exponent in `{term}`"))?,
                ),
                None => (term, 1),
            };
            let order = if base == "Z" {
                BigInt::from(0)
            } else if let Some(n) = base.strip_prefix("Z_") {
                let n: BigInt = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad order in `{term}`"))?;
                if n < BigInt::from(1) {
                    return Err(format!("cyclic order must be positive in `{term}`"));
                }
                n
            } else if base == "0" {
                continue;
            } else {
                return Err(format!("unrecognized summand `{term}`"));
            };
            orders.extend(std::iter::repeat_n(order, power));
        }
    }
    let torsion: Vec<usize> = (0..orders.len())
        .filter(|&i| orders[i] != BigInt::from(0))
        .collect();
    let mut rel = IntMatrix::zeros(orders.len(), torsion.len());
    for (k, &i) in torsion.iter().enumerate() {
        rel.set(i, k, orders[i].clone());
    }
    Ok(PresentedGroup::new(rel))
}

/// The canonical literal of `g`, if `g` is presented exactly as that literal
/// would parse.
pub fn group_literal(g: &PresentedGroup) -> Option<String> {
    let inv = g.invariant_factors();
    (PresentedGroup::from_invariants(&inv) == *g).then(|| inv.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupDto {
    Literal(String),
    Explicit {
        generators: usize,
        relations: MatrixDto,
    },
}

pub fn group_to_dto(g: &PresentedGroup) -> GroupDto {
    match group_literal(g) {
        Some(s) => GroupDto::Literal(s),
        None => GroupDto::Explicit {
            generators: g.generators(),
            relations: matrix_to_dto(g.relations()),
        },
    }
}

pub fn group_from_dto(d: &GroupDto, path: &str) -> Result<PresentedGroup, FormatError> {
    match d {
        GroupDto::Literal(s) => parse_group_literal(s).map_err(|m| err(path, m)),
        GroupDto::Explicit {
            generators,
            relations,
        } => {
            let cols = relations.first().map_or(0, Vec::len);
            let rel = matrix_from_dto(
                relations,
                Some((*generators, cols)),
                &join(path, "relations"),
            )?;
            Ok(PresentedGroup::new(rel))
        }
    }
}

/// Invariants read from a literal, for comparing against tables.
pub fn parse_invariants(s: &str) -> Result<InvariantFactors, String> {
    parse_group_literal(s).map(|g| g.invariant_factors())
}

// ---------------------------------------------------------------- spaces

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceDto {
    Named(String),
    Inline {
        points: Vec<String>,
        opens: Vec<Vec<String>>,
    },
}

pub fn builtin_space(name: &str) -> Option<FiniteSpace> {
    match name {
        "CSP" | "csp" => Some(FiniteSpace::csp()),
        "S21" | "s21" => Some(FiniteSpace::s21()),
        _ => None,
    }
}

pub fn space_to_dto(s: &FiniteSpace) -> SpaceDto {
    if *s == FiniteSpace::csp() {
        return SpaceDto::Named("CSP".into());
    }
    if *s == FiniteSpace::s21() {
        return SpaceDto::Named("S21".into());
    }
    SpaceDto::Inline {
        points: s.labels().to_vec(),
        opens: s
            .opens()
            .iter()
            .map(|o| o.iter().map(|i| s.label(i).to_string()).collect())
            .collect(),
    }
}

pub fn space_from_dto(d: &SpaceDto, path: &str) -> Result<FiniteSpace, FormatError> {
    match d {
        SpaceDto::Named(n) => {
            builtin_space(n).ok_or_else(|| err(path, format!("unknown space `{n}`")))
        }
        SpaceDto::Inline { points, opens } => {
            let mut sets = Vec::with_capacity(opens.len());
            for (k, o) in opens.iter().enumerate() {
                let mut s = PointSet::EMPTY;
                for l in o {
                    let i = points.iter().position(|p| p == l).ok_or_else(|| {
                        err(format!("{path}.opens[{k}]"), format!("unknown point `{l}`"))
                    })?;
                    s = s.union(PointSet::singleton(i));
                }
                sets.push(s);
            }
            FiniteSpace::new(points.clone(), sets).map_err(|e| err(path, e))
        }
    }
}

// ---------------------------------------------------------------- shapes

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraVertexDto {
    pub name: String,
    pub degrees: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraArrowDto {
    pub label: String,
    #[serde(default)]
    pub drawn: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeDto {
    #[serde(default)]
    pub format: Option<String>,
    pub name: String,
    pub space: SpaceDto,
    pub carriers: Vec<String>,
    /// `[whole, ideal]`.
    pub pairs: Vec<[String; 2]>,
    #[serde(default)]
    pub drawn: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub extra_vertices: Vec<ExtraVertexDto>,
    #[serde(default)]
    pub extra_arrows: Vec<ExtraArrowDto>,
}

fn diag(path: &str, e: DiagramError) -> FormatError {
    err(path, e)
}

pub fn shape_from_dto(d: &ShapeDto, path: &str) -> Result<DiagramShape, FormatError> {
    check_format(&d.format, SHAPE_FORMAT, path)?;
    let space = space_from_dto(&d.space, &join(path, "space"))?;
    let carrier = |s: &str, p: String| space.parse_carrier(s).map_err(|e| err(p, e));
    let carriers = d
        .carriers
        .iter()
        .enumerate()
        .map(|(k, c)| carrier(c, format!("{path}.carriers[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let pairs = d
        .pairs
        .iter()
        .enumerate()
        .map(|(k, [y, u])| {
            let p = format!("{path}.pairs[{k}]");
            Ok((carrier(y, p.clone())?, carrier(u, p)?))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let mut shape = DiagramShape::from_pairs(d.name.clone(), space, &carriers, &pairs)
        .map_err(|e| diag(&join(path, "pairs"), e))?;
    for (k, a) in d.drawn.iter().enumerate() {
        let p = format!("{path}.drawn[{k}]");
        let (kind, rest) = a
            .split_once(':')
            .ok_or_else(|| err(&p, format!("`{a}` is not kind:src>dst")))?;
        let kind = ArrowKind::from_code(kind)
            .ok_or_else(|| err(&p, format!("unknown arrow kind `{kind}`")))?;
        let (s, t) = rest
            .split_once('>')
            .ok_or_else(|| err(&p, format!("`{a}` is not kind:src>dst")))?;
        let canon = |x: &str| {
            shape
                .space()
                .parse_carrier(x)
                .map(|c| shape.space().carrier_name(c))
        };
        let (s, t) = (
            canon(s).map_err(|e| err(&p, e))?,
            canon(t).map_err(|e| err(&p, e))?,
        );
        shape.mark_drawn(kind, &s, &t).map_err(|e| diag(&p, e))?;
    }
    for (k, v) in d.extra_vertices.iter().enumerate() {
        for &deg in &v.degrees {
            shape
                .add_extra_vertex(&v.name, deg)
                .map_err(|e| diag(&format!("{path}.extra_vertices[{k}]"), e))?;
        }
    }
    for (k, a) in d.extra_arrows.iter().enumerate() {
        let p = format!("{path}.extra_arrows[{k}]");
        let (kind, rest) = a
            .label
            .split_once(':')
            .ok_or_else(|| err(&p, "label is not kind:src>dst"))?;
        let kind = ArrowKind::from_code(kind)
            .ok_or_else(|| err(&p, format!("unknown arrow kind `{kind}`")))?;
        let (s, t) = rest
            .split_once('>')
            .ok_or_else(|| err(&p, "label is not kind:src>dst"))?;
        let s = shape.parse_vertex(s).map_err(|e| diag(&p, e))?;
        let t = shape.parse_vertex(t).map_err(|e| diag(&p, e))?;
        shape
            .add_arrow(kind, s, t, a.drawn)
            .map_err(|e| diag(&p, e))?;
    }
    for (k, r) in d.relations.iter().enumerate() {
        let p = format!("{path}.relations[{k}]");
        let rel = shape.parse_relation(r).map_err(|e| diag(&p, e))?;
        shape.add_relation(rel).map_err(|e| diag(&p, e))?;
    }
    Ok(shape)
}

pub fn shape_to_dto(shape: &DiagramShape) -> ShapeDto {
    let space = shape.space();
    let name_of = |c: PointSet| space.carrier_name(c);
    let vs = shape.vertices();
    let carriers = vs
        .iter()
        .filter(|v| v.degree == 0 && v.carrier.is_some())
        .map(|v| v.name.clone())
        .collect();
    let pairs = shape
        .sequences()
        .iter()
        .map(|s| [name_of(s.whole), name_of(s.ideal)])
        .collect();
    let mut drawn = Vec::new();
    let mut extra_arrows = Vec::new();
    for (a, ar) in shape.arrows().iter().enumerate() {
        let standard = ar.kind != ArrowKind::Aux
            && vs[ar.src].carrier.is_some()
            && vs[ar.dst].carrier.is_some();
        if !standard {
            extra_arrows.push(ExtraArrowDto {
                label: shape.arrow_label(a),
                drawn: ar.drawn,
            });
        } else if ar.drawn {
            let label = format!("{}:{}>{}", ar.kind.code(), vs[ar.src].name, vs[ar.dst].name);
            if !drawn.contains(&label) {
                drawn.push(label);
            }
        }
    }
    let mut extra_vertices: Vec<ExtraVertexDto> = Vec::new();
    for v in vs.iter().filter(|v| v.carrier.is_none()) {
        match extra_vertices.iter_mut().find(|e| e.name == v.name) {
            Some(e) => e.degrees.push(v.degree),
            None => extra_vertices.push(ExtraVertexDto {
                name: v.name.clone(),
                degrees: vec![v.degree],
            }),
        }
    }
    ShapeDto {
        format: Some(SHAPE_FORMAT.into()),
        name: shape.name().to_string(),
        space: space_to_dto(space),
        carriers,
        pairs,
        drawn,
        relations: shape
            .relations()
            .iter()
            .map(|r| shape.relation_label(r))
            .collect(),
        extra_vertices,
        extra_arrows,
    }
}

/// A shape given by built-in name or inline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeRef {
    Named(String),
    Inline(Box<ShapeDto>),
}

pub fn shape_from_ref(r: &ShapeRef, path: &str) -> Result<Arc<DiagramShape>, FormatError> {
    match r {
        ShapeRef::Named(n) => {
            resources::builtin_shape(n).ok_or_else(|| err(path, format!("unknown shape `{n}`")))
        }
        ShapeRef::Inline(d) => shape_from_dto(d, path).map(Arc::new),
    }
}

pub fn shape_to_ref(shape: &DiagramShape) -> ShapeRef {
    for name in ["CSP", "S21"] {
        if resources::builtin_shape(name).is_some_and(|s| *s == *shape) {
            return ShapeRef::Named(name.into());
        }
    }
    ShapeRef::Inline(Box::new(shape_to_dto(shape)))
}

// ---------------------------------------------------------------- block matrices

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlocksDto {
    /// Block names in matrix order; point labels unless `point_map` renames them.
    pub order: Vec<String>,
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_map: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockMatrixDto {
    #[serde(default)]
    pub format: Option<String>,
    pub space: SpaceDto,
    pub blocks: BlocksDto,
    pub entries: MatrixDto,
}

pub fn block_matrix_from_dto(d: &BlockMatrixDto, path: &str) -> Result<BlockMatrix, FormatError> {
    check_format(&d.format, BLOCK_MATRIX_FORMAT, path)?;
    let space = space_from_dto(&d.space, &join(path, "space"))?;
    let mut order = Vec::with_capacity(d.blocks.order.len());
    for (k, b) in d.blocks.order.iter().enumerate() {
        let p = format!("{path}.blocks.order[{k}]");
        let label = match &d.blocks.point_map {
            Some(m) => m
                .get(b)
                .ok_or_else(|| err(&p, format!("block `{b}` missing from point_map")))?,
            None => b,
        };
        order.push(space.point(label).map_err(|e| err(&p, e))?);
    }
    let n: usize = d.blocks.sizes.iter().sum();
    let entries = matrix_from_dto(
        &d.entries,
        if n == 0 { Some((0, 0)) } else { None },
        &join(path, "entries"),
    )?;
    BlockMatrix::new(space, order, d.blocks.sizes.clone(), entries).map_err(|e| err(path, e))
}

pub fn block_matrix_to_dto(a: &BlockMatrix) -> BlockMatrixDto {
    BlockMatrixDto {
        format: Some(BLOCK_MATRIX_FORMAT.into()),
        space: space_to_dto(a.space()),
        blocks: BlocksDto {
            order: a
                .order()
                .iter()
                .map(|&x| a.space().label(x).to_string())
                .collect(),
            sizes: a.sizes().to_vec(),
            point_map: None,
        },
        entries: matrix_to_dto(a.matrix()),
    }
}

/// Reassigns the point labels of named blocks; used to swap symmetric points.
pub fn relabel_blocks(d: &BlockMatrixDto, swap: (&str, &str)) -> BlockMatrixDto {
    let mut out = d.clone();
    let flip = |l: &str| {
        if l == swap.0 {
            swap.1.to_string()
        } else if l == swap.1 {
            swap.0.to_string()
        } else {
            l.to_string()
        }
    };
    match &mut out.blocks.point_map {
        Some(m) => m.values_mut().for_each(|v| *v = flip(v)),
        None => out.blocks.order.iter_mut().for_each(|v| *v = flip(v)),
    }
    out
}

// ---------------------------------------------------------------- modules

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceDto {
    #[default]
    Covariant,
    Contravariant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceEntryDto {
    /// Space-separated arrow path, empty at the corner.
    pub path: String,
    pub generator: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceDto {
    pub corner: String,
    pub dual: bool,
    pub entries: BTreeMap<String, Vec<ProvenanceEntryDto>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDto {
    #[serde(default)]
    pub format: Option<String>,
    pub shape: ShapeRef,
    #[serde(default)]
    pub variance: VarianceDto,
    pub groups: BTreeMap<String, GroupDto>,
    #[serde(default)]
    pub maps: BTreeMap<String, MatrixDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<ProvenanceDto>,
}

/// Groups keyed by vertex label; every vertex must appear exactly once.
fn groups_from_map(
    shape: &DiagramShape,
    groups: &BTreeMap<String, GroupDto>,
    path: &str,
) -> Result<Vec<PresentedGroup>, FormatError> {
    let mut out: Vec<Option<PresentedGroup>> = vec![None; shape.vertices().len()];
    for (label, g) in groups {
        let p = format!("{path}.groups.{label}");
        let v = shape.parse_vertex(label).map_err(|e| diag(&p, e))?;
        if out[v].is_some() {
            return Err(err(&p, "vertex listed twice"));
        }
        out[v] = Some(group_from_dto(g, &p)?);
    }
    out.into_iter()
        .enumerate()
        .map(|(v, g)| {
            g.ok_or_else(|| {
                err(
                    join(path, "groups"),
                    format!("missing group for {}", shape.vertex_label(v)),
                )
            })
        })
        .collect()
}

fn map_dims(
    shape: &DiagramShape,
    variance: Variance,
    groups: &[PresentedGroup],
    a: usize,
) -> (usize, usize) {
    let ar = &shape.arrows()[a];
    let (from, to) = match variance {
        Variance::Covariant => (ar.src, ar.dst),
        Variance::Contravariant => (ar.dst, ar.src),
    };
    (groups[to].generators(), groups[from].generators())
}

fn maps_from_map(
    shape: &DiagramShape,
    variance: Variance,
    groups: &[PresentedGroup],
    maps: &BTreeMap<String, MatrixDto>,
    path: &str,
) -> Result<Vec<IntMatrix>, FormatError> {
    let mut out: Vec<IntMatrix> = (0..shape.arrows().len())
        .map(|a| {
            let (r, c) = map_dims(shape, variance, groups, a);
            IntMatrix::zeros(r, c)
        })
        .collect();
    for (label, m) in maps {
        let p = format!("{path}.maps.{label}");
        let a = shape.parse_arrow(label).map_err(|e| diag(&p, e))?;
        out[a] = matrix_from_dto(m, Some(map_dims(shape, variance, groups, a)), &p)?;
    }
    Ok(out)
}

pub fn module_from_dto(d: &ModuleDto, path: &str) -> Result<DiagramModule, FormatError> {
    check_format(&d.format, MODULE_FORMAT, path)?;
    let shape = shape_from_ref(&d.shape, &join(path, "shape"))?;
    let variance = match d.variance {
        VarianceDto::Covariant => Variance::Covariant,
        VarianceDto::Contravariant => Variance::Contravariant,
    };
    let groups = groups_from_map(&shape, &d.groups, path)?;
    let maps = maps_from_map(&shape, variance, &groups, &d.maps, path)?;
    let mut m =
        DiagramModule::new(shape.clone(), variance, groups, maps).map_err(|e| diag(path, e))?;
    if let Some(p) = &d.provenance {
        let pp = join(path, "provenance");
        let corner = shape.parse_vertex(&p.corner).map_err(|e| diag(&pp, e))?;
        let mut entries = vec![Vec::new(); shape.vertices().len()];
        for (label, list) in &p.entries {
            let ep = format!("{pp}.entries.{label}");
            let v = shape.parse_vertex(label).map_err(|e| diag(&ep, e))?;
            for e in list {
                let path = shape.parse_path(&e.path).map_err(|x| diag(&ep, x))?;
                entries[v].push((path, e.generator));
            }
        }
        m = m.with_provenance(Provenance {
            corner,
            dual: p.dual,
            entries,
        });
        filtk_core::diagram::validate_provenance(&m).map_err(|e| diag(&pp, e))?;
    }
    Ok(m)
}

pub fn module_to_dto(m: &DiagramModule) -> ModuleDto {
    let shape = m.shape();
    let groups = (0..m.groups().len())
        .map(|v| (shape.vertex_label(v), group_to_dto(m.group(v))))
        .collect();
    let maps = (0..m.maps().len())
        .filter(|&a| !m.map(a).is_zero())
        .map(|a| (shape.arrow_label(a), matrix_to_dto(m.map(a))))
        .collect();
    let provenance = m.provenance().map(|p| ProvenanceDto {
        corner: shape.vertex_label(p.corner),
        dual: p.dual,
        entries: p
            .entries
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_empty())
            .map(|(v, l)| {
                let list = l
                    .iter()
                    .map(|(path, g)| ProvenanceEntryDto {
                        path: shape.path_label(path),
                        generator: *g,
                    })
                    .collect();
                (shape.vertex_label(v), list)
            })
            .collect(),
    });
    ModuleDto {
        format: Some(MODULE_FORMAT.into()),
        shape: shape_to_ref(shape),
        variance: match m.variance() {
            Variance::Covariant => VarianceDto::Covariant,
            Variance::Contravariant => VarianceDto::Contravariant,
        },
        groups,
        maps,
        provenance,
    }
}

pub fn load_module(text: &str) -> Result<DiagramModule, FormatError> {
    module_from_dto(&parse_json(text)?, "$")
}

pub fn dump_module(m: &DiagramModule) -> String {
    to_json_pretty(&module_to_dto(m))
}

// ---------------------------------------------------------------- tables

/// Groups of every vertex together with a few fixed generator matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDto {
    #[serde(default)]
    pub format: Option<String>,
    pub shape: ShapeRef,
    pub groups: BTreeMap<String, GroupDto>,
    #[serde(default)]
    pub pinned: BTreeMap<String, MatrixDto>,
    /// Further maps not part of the transcription.
    #[serde(default)]
    pub derived_maps: BTreeMap<String, MatrixDto>,
}

#[derive(Clone, Debug)]
pub struct GroupTable {
    pub shape: Arc<DiagramShape>,
    /// Literal of every vertex, as written.
    pub literals: Vec<String>,
    pub groups: Vec<PresentedGroup>,
    pub pinned: Vec<(usize, IntMatrix)>,
    pub derived: Vec<(usize, IntMatrix)>,
}

impl GroupTable {
    /// The covariant module with the pinned and derived maps, zero elsewhere.
    pub fn to_module(&self) -> Result<DiagramModule, DiagramError> {
        let mut maps: Vec<IntMatrix> = (0..self.shape.arrows().len())
            .map(|a| {
                let (r, c) = map_dims(&self.shape, Variance::Covariant, &self.groups, a);
                IntMatrix::zeros(r, c)
            })
            .collect();
        for (a, m) in self.pinned.iter().chain(&self.derived) {
            maps[*a] = m.clone();
        }
        DiagramModule::new(
            self.shape.clone(),
            Variance::Covariant,
            self.groups.clone(),
            maps,
        )
    }
}

pub fn table_from_dto(d: &TableDto, path: &str) -> Result<GroupTable, FormatError> {
    check_format(&d.format, TABLE_FORMAT, path)?;
    let shape = shape_from_ref(&d.shape, &join(path, "shape"))?;
    let groups = groups_from_map(&shape, &d.groups, path)?;
    let mut literals = vec![String::new(); groups.len()];
    for (label, g) in &d.groups {
        let v = shape.parse_vertex(label).map_err(|e| diag(path, e))?;
        literals[v] = match g {
            GroupDto::Literal(s) => s.clone(),
            GroupDto::Explicit { .. } => groups[v].invariant_factors().to_string(),
        };
    }
    let read = |maps: &BTreeMap<String, MatrixDto>,
                field: &str|
     -> Result<Vec<(usize, IntMatrix)>, FormatError> {
        maps.iter()
            .map(|(label, m)| {
                let p = format!("{path}.{field}.{label}");
                let a = shape.parse_arrow(label).map_err(|e| diag(&p, e))?;
                Ok((
                    a,
                    matrix_from_dto(
                        m,
                        Some(map_dims(&shape, Variance::Covariant, &groups, a)),
                        &p,
                    )?,
                ))
            })
            .collect()
    };
    let pinned = read(&d.pinned, "pinned")?;
    let derived = read(&d.derived_maps, "derived_maps")?;
    Ok(GroupTable {
        shape,
        literals,
        groups,
        pinned,
        derived,
    })
}

// ---------------------------------------------------------------- homs

/// Components keyed by vertex label; missing components are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentsDto {
    #[serde(default)]
    pub format: Option<String>,
    pub components: BTreeMap<String, MatrixDto>,
}

fn component_dims(src: &DiagramModule, dst: &DiagramModule, v: usize) -> (usize, usize) {
    (dst.group(v).generators(), src.group(v).generators())
}

/// Only the listed components, for pinning.
pub fn pins_from_dto(
    d: &ComponentsDto,
    src: &DiagramModule,
    dst: &DiagramModule,
    path: &str,
) -> Result<BTreeMap<usize, IntMatrix>, FormatError> {
    check_format(&d.format, HOM_FORMAT, path)?;
    let shape = src.shape();
    let mut out = BTreeMap::new();
    for (label, m) in &d.components {
        let p = format!("{path}.components.{label}");
        let v = shape.parse_vertex(label).map_err(|e| diag(&p, e))?;
        out.insert(
            v,
            matrix_from_dto(m, Some(component_dims(src, dst, v)), &p)?,
        );
    }
    Ok(out)
}

/// Every component, zero where not listed.
pub fn components_from_dto(
    d: &ComponentsDto,
    src: &DiagramModule,
    dst: &DiagramModule,
    path: &str,
) -> Result<Vec<IntMatrix>, FormatError> {
    let pins = pins_from_dto(d, src, dst, path)?;
    Ok((0..src.groups().len())
        .map(|v| {
            pins.get(&v).cloned().unwrap_or_else(|| {
                let (r, c) = component_dims(src, dst, v);
                IntMatrix::zeros(r, c)
            })
        })
        .collect())
}

pub fn components_to_dto(shape: &DiagramShape, components: &[IntMatrix]) -> ComponentsDto {
    ComponentsDto {
        format: Some(HOM_FORMAT.into()),
        components: components
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(v, m)| (shape.vertex_label(v), matrix_to_dto(m)))
            .collect(),
    }
}

/// A bare matrix or `{"matrix": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Bare(MatrixDto),
    Wrapped { matrix: MatrixDto },
}

pub fn matrix_from_input(d: &MatrixInput) -> Result<IntMatrix, FormatError> {
    match d {
        MatrixInput::Bare(m) => matrix_from_dto(m, None, "$"),
        MatrixInput::Wrapped { matrix } => matrix_from_dto(matrix, None, "$.matrix"),
    }
}
