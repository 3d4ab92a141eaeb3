//! Case data compiled into the binary from `data/v1`.

use std::sync::{Arc, OnceLock};

use filtk_core::ckk::BlockMatrix;
use filtk_core::diagram::DiagramShape;
use serde::Deserialize;

use crate::formats::{
    block_matrix_from_dto, parse_json, shape_from_dto, table_from_dto, BlockMatrixDto, GroupDto,
    GroupTable, MatrixDto, ShapeDto, TableDto,
};
use std::collections::BTreeMap;

pub const DATA_VERSION: &str = "v1";

/// `(file name, contents)` of every embedded resource.
pub const FILES: &[(&str, &str)] = &[
    ("csp_shape.json", include_str!("../data/v1/csp_shape.json")),
    ("s21_shape.json", include_str!("../data/v1/s21_shape.json")),
    (
        "csp_matrix_A.json",
        include_str!("../data/v1/csp_matrix_A.json"),
    ),
    (
        "csp_table_M.json",
        include_str!("../data/v1/csp_table_M.json"),
    ),
    (
        "csp_table_P.json",
        include_str!("../data/v1/csp_table_P.json"),
    ),
    ("csp_alpha.json", include_str!("../data/v1/csp_alpha.json")),
    (
        "csp_refined_corner.json",
        include_str!("../data/v1/csp_refined_corner.json"),
    ),
    (
        "s21_tables.json",
        include_str!("../data/v1/s21_tables.json"),
    ),
];

/// Checksums of [`FILES`] in `sha256sum` format.
pub const SHA256SUMS: &str = include_str!("../data/v1/SHA256SUMS");

pub fn file(name: &str) -> &'static str {
    FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .expect("embedded resource exists")
}

fn parse<T: serde::de::DeserializeOwned>(name: &str) -> T {
    parse_json(file(name)).unwrap_or_else(|e| panic!("embedded {name}: {e}"))
}

fn shape(name: &str, cell: &'static OnceLock<Arc<DiagramShape>>) -> Arc<DiagramShape> {
    cell.get_or_init(|| {
        let dto: ShapeDto = parse(name);
        Arc::new(shape_from_dto(&dto, "$").unwrap_or_else(|e| panic!("embedded {name}: {e}")))
    })
    .clone()
}

pub fn csp_shape() -> Arc<DiagramShape> {
    static CELL: OnceLock<Arc<DiagramShape>> = OnceLock::new();
    shape("csp_shape.json", &CELL)
}

pub fn s21_shape() -> Arc<DiagramShape> {
    static CELL: OnceLock<Arc<DiagramShape>> = OnceLock::new();
    shape("s21_shape.json", &CELL)
}

pub fn builtin_shape(name: &str) -> Option<Arc<DiagramShape>> {
    match name {
        "CSP" | "csp" => Some(csp_shape()),
        "S21" | "s21" => Some(s21_shape()),
        _ => None,
    }
}

pub fn csp_matrix_dto() -> BlockMatrixDto {
    parse("csp_matrix_A.json")
}

pub fn csp_matrix() -> BlockMatrix {
    block_matrix_from_dto(&csp_matrix_dto(), "$").expect("embedded matrix is admissible")
}

pub fn csp_table_m_dto() -> TableDto {
    parse("csp_table_M.json")
}

pub fn csp_table_p_dto() -> TableDto {
    parse("csp_table_P.json")
}

pub fn csp_table_m() -> GroupTable {
    table_from_dto(&csp_table_m_dto(), "$").expect("embedded table parses")
}

pub fn csp_table_p() -> GroupTable {
    table_from_dto(&csp_table_p_dto(), "$").expect("embedded table parses")
}

#[derive(Clone, Debug, Deserialize)]
pub struct AlphaDto {
    pub format: String,
    pub module: String,
    pub identity_elsewhere: bool,
    pub components: BTreeMap<String, MatrixDto>,
    /// Matrices of `N` at four arrows, as printed next to the squares.
    pub displayed: BTreeMap<String, MatrixDto>,
    /// Arrows at which the off-diagonal entries of `α` cancel.
    pub cancellation: Vec<String>,
}

pub fn csp_alpha() -> AlphaDto {
    parse("csp_alpha.json")
}

#[derive(Clone, Debug, Deserialize)]
pub struct CornerSideDto {
    pub groups: BTreeMap<String, GroupDto>,
    pub map: MatrixDto,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SecondSequenceDto {
    pub ideal: String,
    pub quotient: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct NormalizationDto {
    pub search_bound: i64,
    pub justification: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ObstructionDto {
    pub column: Vec<i64>,
    pub target: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RefinedCornerDto {
    pub format: String,
    pub vertex: String,
    pub ideal: String,
    pub quotient: String,
    /// Degree `i` path `M(quotient_i) → M(ideal_i)`.
    pub vertical: BTreeMap<String, String>,
    pub second_sequence: SecondSequenceDto,
    pub normalization: NormalizationDto,
    #[serde(rename = "M")]
    pub m: CornerSideDto,
    #[serde(rename = "P")]
    pub p: CornerSideDto,
    #[serde(rename = "N")]
    pub n: CornerSideDto,
    pub obstruction: ObstructionDto,
}

pub fn csp_refined_corner() -> RefinedCornerDto {
    parse("csp_refined_corner.json")
}

#[derive(Clone, Debug, Deserialize)]
pub struct SupportTableDto {
    pub variance: crate::formats::VarianceDto,
    pub degree: u8,
    pub support: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct StepDto {
    pub corner: String,
    pub kind: StepKind,
    pub point: String,
    pub checked: Vec<String>,
    pub identities: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Mono,
    Epi,
}

#[derive(Clone, Debug, Deserialize)]
pub struct S21TablesDto {
    pub format: String,
    pub shape: String,
    pub tables: BTreeMap<String, SupportTableDto>,
    pub steps: Vec<StepDto>,
    pub vanishing: Vec<String>,
}

pub fn s21_tables() -> S21TablesDto {
    parse("s21_tables.json")
}
