//! Finitely generated abelian groups given by presentations, homomorphisms
//! between them, and exactness.
//!
//! A [`PresentedGroup`] on `g` generators is `Z^g` modulo the column span of
//! its relation matrix. Presentations are kept raw: only
//! [`PresentedGroup::invariant_factors`] canonicalizes. Homomorphisms are
//! integer matrices acting on generator coordinates, and two homomorphisms
//! are equal when their difference lands in the codomain relation lattice.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::intlin::{
    lattice_basis, nullspace, smith_normal_form, solve_linear, InfeasibilityCertificate, IntMatrix,
    LinearOutcome, ShapeError,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FgabError {
    Shape(ShapeError),
    IllDefined { column: usize },
    NotComposable { left: usize, right: usize },
    NotAComplex,
}

impl fmt::Display for FgabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FgabError::Shape(e) => write!(f, "{e}"),
            FgabError::IllDefined { column } => {
                write!(f, "relation column {column} of the domain is not sent into the codomain relations")
            }
            FgabError::NotComposable { left, right } => {
                write!(f, "cannot compose: inner codomain has {right} generators, outer domain has {left}")
            }
            FgabError::NotAComplex => write!(f, "composite is not zero"),
        }
    }
}

impl core::error::Error for FgabError {}

impl From<ShapeError> for FgabError {
    fn from(e: ShapeError) -> Self {
        FgabError::Shape(e)
    }
}

/// Free rank plus torsion coefficients `d_1 | d_2 | ...`, each at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct InvariantFactors {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl InvariantFactors {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Self {
        // Route through a diagonal presentation so any multiset of orders is
        // brought into divisibility-chain form.
        let mut diag: Vec<BigInt> = torsion;
        diag.extend(core::iter::repeat_n(BigInt::zero(), free_rank));
        PresentedGroup::new(IntMatrix::diagonal(&diag)).invariant_factors()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Invariants of a direct sum.
    pub fn merge(&self, other: &InvariantFactors) -> InvariantFactors {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        InvariantFactors::new(self.free_rank + other.free_rank, t)
    }
}

/// Renders as `Z_2^2+Z`, torsion first in increasing order; `0` when trivial.
impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.torsion.len() {
            let d = &self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|x| *x == d).count();
            parts.push(if run == 1 {
                format!("Z_{d}")
            } else {
                format!("Z_{d}^{run}")
            });
            i += run;
        }
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for InvariantFactors {
    type Err = String;

    /// Parses sums like `Z_2^2+Z`, `Z^3`, `Z_6 + Z_4` or `0`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "0" {
            return Ok(InvariantFactors::default());
        }
        let mut free = 0usize;
        let mut torsion = Vec::new();
        for term in s.split('+').map(str::trim) {
            let (base, power) = match term.split_once('^') {
                Some((b, p)) => (
                    b,
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad exponent in `{term}`"))?,
                ),
                None => (term, 1),
            };
            let base = base.trim();
            if base == "Z" {
                free += power;
            } else if let Some(n) = base.strip_prefix("Z_") {
                let n: BigInt = n.parse().map_err(|_| format!("bad order in `{term}`"))?;
                if n < BigInt::one() {
                    return Err(format!("cyclic order must be positive in `{term}`"));
                }
                torsion.extend(core::iter::repeat_n(n, power));
            } else {
                return Err(format!("unrecognized summand `{term}`"));
            }
        }
        Ok(InvariantFactors::new(free, torsion))
    }
}

/// `Z^g` modulo the column span of `relations` (a `g`-row matrix).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresentedGroup {
    relations: IntMatrix,
}

impl PresentedGroup {
    pub fn new(relations: IntMatrix) -> Self {
        PresentedGroup { relations }
    }

    pub fn free(rank: usize) -> Self {
        PresentedGroup {
            relations: IntMatrix::zeros(rank, 0),
        }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// `Z/n` on one generator; `n = 0` gives `Z`.
    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        if n.is_zero() {
            Self::free(1)
        } else {
            PresentedGroup {
                relations: IntMatrix::column(&[n]),
            }
        }
    }

    /// Diagonal presentation realizing the given invariants.
    pub fn from_invariants(inv: &InvariantFactors) -> Self {
        let g = inv.torsion.len() + inv.free_rank;
        let mut rel = IntMatrix::zeros(g, inv.torsion.len());
        for (i, d) in inv.torsion.iter().enumerate() {
            rel.set(i, i, d.clone());
        }
        PresentedGroup { relations: rel }
    }

    pub fn generators(&self) -> usize {
        self.relations.rows()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn invariant_factors(&self) -> InvariantFactors {
        let snf = smith_normal_form(&self.relations);
        let d = snf.invariant_factors();
        let rank = snf.rank();
        let torsion = d.into_iter().filter(|x| x > &BigInt::one()).collect();
        InvariantFactors {
            free_rank: self.generators() - rank,
            torsion,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.generators() == 0 || self.invariant_factors().is_trivial()
    }

    /// Presented with no effective relations, i.e. literally `Z^g`.
    pub fn is_free_presentation(&self) -> bool {
        self.relations.is_zero()
    }

    pub fn is_isomorphic(&self, other: &PresentedGroup) -> bool {
        self.invariant_factors() == other.invariant_factors()
    }

    /// Whether every column of `elements` is zero in the group.
    pub fn is_zero_element(&self, elements: &IntMatrix) -> bool {
        if elements.is_zero() {
            return true;
        }
        matches!(
            solve_linear(&self.relations, elements),
            Ok(LinearOutcome::Solution(_))
        )
    }

    pub fn direct_sum(parts: &[&PresentedGroup]) -> Biproduct {
        let rels: Vec<&IntMatrix> = parts.iter().map(|p| &p.relations).collect();
        let group = PresentedGroup::new(IntMatrix::block_diag(&rels));
        let total = group.generators();
        let mut injections = Vec::with_capacity(parts.len());
        let mut projections = Vec::with_capacity(parts.len());
        let mut offset = 0;
        for p in parts {
            let g = p.generators();
            let mut inj = IntMatrix::zeros(total, g);
            let mut proj = IntMatrix::zeros(g, total);
            for i in 0..g {
                inj.set(offset + i, i, 1);
                proj.set(i, offset + i, 1);
            }
            injections.push(GroupHom::new_unchecked((*p).clone(), group.clone(), inj));
            projections.push(GroupHom::new_unchecked(group.clone(), (*p).clone(), proj));
            offset += g;
        }
        Biproduct {
            group,
            injections,
            projections,
        }
    }
}

impl fmt::Display for PresentedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.invariant_factors())
    }
}

/// A direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct Biproduct {
    pub group: PresentedGroup,
    pub injections: Vec<GroupHom>,
    pub projections: Vec<GroupHom>,
}

/// A group together with a map into an ambient group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: PresentedGroup,
    pub inclusion: GroupHom,
}

/// Image of a homomorphism: the subgroup plus the corestriction onto it.
#[derive(Clone, Debug)]
pub struct Image {
    pub group: PresentedGroup,
    pub inclusion: GroupHom,
    pub corestriction: GroupHom,
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: PresentedGroup,
    pub projection: GroupHom,
}

/// Outcome of a well-definedness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WellDefinedness {
    /// `matrix * dom.relations == cod.relations * witness`.
    Holds { witness: IntMatrix },
    Fails {
        column: usize,
        certificate: InfeasibilityCertificate,
    },
}

/// A homomorphism given on generators: column `j` is the image of generator `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupHom {
    dom: PresentedGroup,
    cod: PresentedGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Checks dimensions only; see [`well_definedness`](Self::well_definedness).
    pub fn new(
        dom: PresentedGroup,
        cod: PresentedGroup,
        matrix: IntMatrix,
    ) -> Result<Self, FgabError> {
        if matrix.shape() != (cod.generators(), dom.generators()) {
            return Err(ShapeError::new(
                "GroupHom",
                format!(
                    "matrix is {}x{} but the codomain has {} and the domain {} generators",
                    matrix.rows(),
                    matrix.cols(),
                    cod.generators(),
                    dom.generators()
                ),
            )
            .into());
        }
        Ok(GroupHom { dom, cod, matrix })
    }

    /// Dimension-checked constructor that also rejects ill-defined maps.
    pub fn checked(
        dom: PresentedGroup,
        cod: PresentedGroup,
        matrix: IntMatrix,
    ) -> Result<Self, FgabError> {
        let h = Self::new(dom, cod, matrix)?;
        match h.well_definedness() {
            WellDefinedness::Holds { .. } => Ok(h),
            WellDefinedness::Fails { column, .. } => Err(FgabError::IllDefined { column }),
        }
    }

    pub(crate) fn new_unchecked(
        dom: PresentedGroup,
        cod: PresentedGroup,
        matrix: IntMatrix,
    ) -> Self {
        debug_assert_eq!(matrix.shape(), (cod.generators(), dom.generators()));
        GroupHom { dom, cod, matrix }
    }

    pub fn identity(g: &PresentedGroup) -> Self {
        GroupHom::new_unchecked(g.clone(), g.clone(), IntMatrix::identity(g.generators()))
    }

    pub fn zero(dom: &PresentedGroup, cod: &PresentedGroup) -> Self {
        GroupHom::new_unchecked(
            dom.clone(),
            cod.clone(),
            IntMatrix::zeros(cod.generators(), dom.generators()),
        )
    }

    pub fn dom(&self) -> &PresentedGroup {
        &self.dom
    }

    pub fn cod(&self) -> &PresentedGroup {
        &self.cod
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn well_definedness(&self) -> WellDefinedness {
        let image = &self.matrix * self.dom.relations();
        if image.is_zero() {
            return WellDefinedness::Holds {
                witness: IntMatrix::zeros(self.cod.relations().cols(), image.cols()),
            };
        }
        let snf = smith_normal_form(self.cod.relations());
        match crate::intlin::solve_with(&snf, &image) {
            LinearOutcome::Solution(s) => WellDefinedness::Holds {
                witness: s.particular,
            },
            LinearOutcome::Infeasible(c) => WellDefinedness::Fails {
                column: c.column,
                certificate: c,
            },
        }
    }

    pub fn is_well_defined(&self) -> bool {
        matches!(self.well_definedness(), WellDefinedness::Holds { .. })
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom, FgabError> {
        if inner.cod.generators() != self.dom.generators() {
            return Err(FgabError::NotComposable {
                left: self.dom.generators(),
                right: inner.cod.generators(),
            });
        }
        Ok(GroupHom::new_unchecked(
            inner.dom.clone(),
            self.cod.clone(),
            &self.matrix * &inner.matrix,
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.cod.is_zero_element(&self.matrix)
    }

    /// Equality as maps between the presented groups.
    pub fn equals(&self, other: &GroupHom) -> bool {
        self.matrix.shape() == other.matrix.shape()
            && self.cod.is_zero_element(&(&self.matrix - &other.matrix))
    }

    pub fn kernel(&self) -> Subgroup {
        let g = self.dom.generators();
        let stacked =
            IntMatrix::hstack(self.cod.generators(), &[&self.matrix, self.cod.relations()]);
        let null = nullspace(&stacked);
        let rows: Vec<usize> = (0..g).collect();
        let gens = null.select_rows(&rows);
        let (group, incl, _) = sub_presentation(&gens, self.dom.relations());
        Subgroup {
            inclusion: GroupHom::new_unchecked(group.clone(), self.dom.clone(), incl),
            group,
        }
    }

    pub fn image(&self) -> Image {
        let (group, incl, coords) = sub_presentation(&self.matrix, self.cod.relations());
        Image {
            inclusion: GroupHom::new_unchecked(group.clone(), self.cod.clone(), incl),
            corestriction: GroupHom::new_unchecked(self.dom.clone(), group.clone(), coords),
            group,
        }
    }

    pub fn cokernel(&self) -> Quotient {
        let rel = IntMatrix::hstack(self.cod.generators(), &[self.cod.relations(), &self.matrix]);
        let group = PresentedGroup::new(rel);
        Quotient {
            projection: GroupHom::new_unchecked(
                self.cod.clone(),
                group.clone(),
                IntMatrix::identity(self.cod.generators()),
            ),
            group,
        }
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().group.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().group.is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Block-diagonal sum of homomorphisms.
    pub fn direct_sum(parts: &[&GroupHom]) -> GroupHom {
        let doms: Vec<&PresentedGroup> = parts.iter().map(|h| &h.dom).collect();
        let cods: Vec<&PresentedGroup> = parts.iter().map(|h| &h.cod).collect();
        let mats: Vec<&IntMatrix> = parts.iter().map(|h| &h.matrix).collect();
        GroupHom::new_unchecked(
            PresentedGroup::direct_sum(&doms).group,
            PresentedGroup::direct_sum(&cods).group,
            IntMatrix::block_diag(&mats),
        )
    }

    /// A map `⊕ doms → ⊕ cods` from a grid of blocks (`blocks[i][j]`: `doms[j] → cods[i]`).
    pub fn from_blocks(
        doms: &[&PresentedGroup],
        cods: &[&PresentedGroup],
        blocks: &[Vec<IntMatrix>],
    ) -> Result<GroupHom, FgabError> {
        let dom = PresentedGroup::direct_sum(doms).group;
        let cod = PresentedGroup::direct_sum(cods).group;
        let mut m = IntMatrix::zeros(cod.generators(), dom.generators());
        if blocks.len() != cods.len() {
            return Err(ShapeError::new(
                "from_blocks",
                "block rows do not match codomain summands",
            )
            .into());
        }
        let mut r0 = 0;
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != doms.len() {
                return Err(ShapeError::new(
                    "from_blocks",
                    "block columns do not match domain summands",
                )
                .into());
            }
            let mut c0 = 0;
            for (j, b) in row.iter().enumerate() {
                if b.shape() != (cods[i].generators(), doms[j].generators()) {
                    return Err(ShapeError::new(
                        "from_blocks",
                        format!("block ({i},{j}) has the wrong shape"),
                    )
                    .into());
                }
                m.paste(r0, c0, b);
                c0 += doms[j].generators();
            }
            r0 += cods[i].generators();
        }
        GroupHom::new(dom, cod, m)
    }
}

/// The subgroup of `Z^g / span(ambient)` generated by the columns of `gens`.
///
/// Returns a presentation with unit invariant factors stripped, the inclusion
/// matrix, and the coordinates of each given generator in the new basis.
fn sub_presentation(
    gens: &IntMatrix,
    ambient: &IntMatrix,
) -> (PresentedGroup, IntMatrix, IntMatrix) {
    let g = gens.rows();
    let basis = lattice_basis(&IntMatrix::hstack(g, &[gens, ambient]));
    let k = basis.cols();
    let rel_coords = solve_linear(&basis, ambient)
        .ok()
        .and_then(LinearOutcome::solution)
        .expect("ambient relations lie in the lattice they generate")
        .particular;
    let gen_coords = solve_linear(&basis, gens)
        .ok()
        .and_then(LinearOutcome::solution)
        .expect("generators lie in the lattice they generate")
        .particular;
    let snf = smith_normal_form(&rel_coords);
    let d = snf.invariant_factors();
    let factor = |i: usize| d.get(i).cloned().unwrap_or_else(BigInt::zero);
    let keep: Vec<usize> = (0..k).filter(|&i| !factor(i).is_one()).collect();
    let torsion: Vec<usize> = keep
        .iter()
        .copied()
        .filter(|&i| !factor(i).is_zero())
        .collect();
    let mut rel = IntMatrix::zeros(keep.len(), torsion.len());
    for (c, &i) in torsion.iter().enumerate() {
        let row = keep
            .iter()
            .position(|&x| x == i)
            .expect("torsion index is kept");
        rel.set(row, c, factor(i));
    }
    let inclusion = (&basis * &snf.u_inv).select_cols(&keep);
    let coords = (&snf.u * &gen_coords).select_rows(&keep);
    (PresentedGroup::new(rel), inclusion, coords)
}

/// `ker(g) / im(f)` for composable `f`, `g` with `g ∘ f = 0`.
pub fn homology(f: &GroupHom, g: &GroupHom) -> Result<PresentedGroup, FgabError> {
    let gf = g.compose(f)?;
    if !gf.is_zero() {
        return Err(FgabError::NotAComplex);
    }
    let ker = g.kernel();
    let b = f.cod();
    let stacked = IntMatrix::hstack(b.generators(), &[ker.inclusion.matrix(), b.relations()]);
    let k = ker.group.generators();
    let rows: Vec<usize> = (0..k).collect();
    let coords = match solve_linear(&stacked, f.matrix())? {
        LinearOutcome::Solution(s) => s.particular.select_rows(&rows),
        LinearOutcome::Infeasible(_) => unreachable!("the image of f lies in ker g once g f = 0"),
    };
    Ok(PresentedGroup::new(IntMatrix::hstack(
        k,
        &[ker.group.relations(), &coords],
    )))
}

/// Exactness of `A --f--> B --g--> C` at `B`.
pub fn is_exact_at(f: &GroupHom, g: &GroupHom) -> Result<bool, FgabError> {
    match homology(f, g) {
        Ok(h) => Ok(h.is_trivial()),
        Err(FgabError::NotAComplex) => Ok(false),
        Err(e) => Err(e),
    }
}

/// An unknown homomorphism `dom → cod` in a [`HomSystem`].
#[derive(Clone, Debug)]
pub struct HomUnknown {
    pub dom: PresentedGroup,
    pub cod: PresentedGroup,
}

/// `left · X[unknown] · right`.
#[derive(Clone, Debug)]
pub struct HomTerm {
    pub left: IntMatrix,
    pub unknown: usize,
    pub right: IntMatrix,
}

/// `Σ terms ≡ rhs`, column by column, modulo the relations of `target`.
#[derive(Clone, Debug)]
pub struct HomEquation {
    pub target: PresentedGroup,
    pub terms: Vec<HomTerm>,
    pub rhs: IntMatrix,
}

/// A family of unknown homomorphisms constrained by linear equations.
#[derive(Clone, Debug, Default)]
pub struct HomSystem {
    pub unknowns: Vec<HomUnknown>,
    pub equations: Vec<HomEquation>,
}

#[derive(Clone, Debug)]
pub struct HomSolution {
    /// One matrix per unknown.
    pub values: Vec<IntMatrix>,
    /// Generators of the homogeneous solutions, one matrix per unknown each.
    pub directions: Vec<Vec<IntMatrix>>,
}

impl HomSolution {
    /// Whether unknown `u` is the same homomorphism in every solution.
    pub fn is_forced(&self, system: &HomSystem, u: usize) -> bool {
        let cod = &system.unknowns[u].cod;
        self.directions.iter().all(|d| cod.is_zero_element(&d[u]))
    }
}

/// The single column of one equation that already has no solution on its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailingColumn {
    pub equation: usize,
    pub column: usize,
    pub certificate: InfeasibilityCertificate,
}

#[derive(Clone, Debug)]
pub struct HomInfeasible {
    /// Certificate for the full stacked system.
    pub certificate: InfeasibilityCertificate,
    /// A smallest failing piece, when one exists.
    pub culprit: Option<FailingColumn>,
}

#[derive(Clone, Debug)]
pub enum HomOutcome {
    Solved(HomSolution),
    Infeasible(HomInfeasible),
}

struct Layout {
    offsets: Vec<usize>,
    eq_slack: Vec<usize>,
    wd_slack: Vec<usize>,
    total: usize,
}

impl HomSystem {
    fn check_shapes(&self) -> Result<(), FgabError> {
        for (e, eq) in self.equations.iter().enumerate() {
            let s = eq.rhs.cols();
            if eq.rhs.rows() != eq.target.generators() {
                return Err(ShapeError::new(
                    "hom_solve",
                    format!("equation {e}: right-hand side rows"),
                )
                .into());
            }
            for (t, term) in eq.terms.iter().enumerate() {
                let u = self.unknowns.get(term.unknown).ok_or_else(|| {
                    ShapeError::new("hom_solve", format!("equation {e} term {t}: unknown index"))
                })?;
                if term.left.shape() != (eq.target.generators(), u.cod.generators())
                    || term.right.shape() != (u.dom.generators(), s)
                {
                    return Err(ShapeError::new(
                        "hom_solve",
                        format!("equation {e} term {t}: factor shapes"),
                    )
                    .into());
                }
            }
        }
        Ok(())
    }

    fn layout(&self) -> Layout {
        let mut offsets = Vec::new();
        let mut pos = 0;
        for u in &self.unknowns {
            offsets.push(pos);
            pos += u.cod.generators() * u.dom.generators();
        }
        let mut eq_slack = Vec::new();
        for eq in &self.equations {
            eq_slack.push(pos);
            pos += eq.target.relations().cols() * eq.rhs.cols();
        }
        let mut wd_slack = Vec::new();
        for u in &self.unknowns {
            wd_slack.push(pos);
            pos += u.cod.relations().cols() * u.dom.relations().cols();
        }
        Layout {
            offsets,
            eq_slack,
            wd_slack,
            total: pos,
        }
    }

    /// Builds the stacked system over the unknown entries and slack variables.
    fn assemble(&self, lay: &Layout, only: Option<(usize, usize)>) -> (IntMatrix, IntMatrix) {
        let mut blocks: Vec<(IntMatrix, IntMatrix)> = Vec::new();
        for (e, eq) in self.equations.iter().enumerate() {
            let cols: Vec<usize> = match only {
                Some((oe, oc)) if oe == e => vec![oc],
                Some(_) => continue,
                None => (0..eq.rhs.cols()).collect(),
            };
            let rhs = eq.rhs.select_cols(&cols);
            let s = cols.len();
            let t = eq.target.generators();
            let mut a = IntMatrix::zeros(t * s, lay.total);
            for term in &eq.terms {
                let right = term.right.select_cols(&cols);
                let k = right.transpose().kron(&term.left);
                add_block(&mut a, 0, lay.offsets[term.unknown], &k);
            }
            if eq.target.relations().cols() > 0 {
                let slack = IntMatrix::identity(s).kron(&-eq.target.relations());
                add_block(&mut a, 0, lay.eq_slack[e], &slack);
            }
            blocks.push((a, rhs.vec_columns()));
        }
        if only.is_none() {
            for (u, unk) in self.unknowns.iter().enumerate() {
                let rd = unk.dom.relations();
                let rc = unk.cod.relations();
                let rows = unk.cod.generators() * rd.cols();
                if rows == 0 {
                    continue;
                }
                let mut a = IntMatrix::zeros(rows, lay.total);
                add_block(
                    &mut a,
                    0,
                    lay.offsets[u],
                    &rd.transpose()
                        .kron(&IntMatrix::identity(unk.cod.generators())),
                );
                if rc.cols() > 0 {
                    add_block(
                        &mut a,
                        0,
                        lay.wd_slack[u],
                        &-&IntMatrix::identity(rd.cols()).kron(rc),
                    );
                }
                blocks.push((a, IntMatrix::zeros(rows, 1)));
            }
        }
        let a_parts: Vec<&IntMatrix> = blocks.iter().map(|b| &b.0).collect();
        let b_parts: Vec<&IntMatrix> = blocks.iter().map(|b| &b.1).collect();
        (
            IntMatrix::vstack(lay.total, &a_parts),
            IntMatrix::vstack(1, &b_parts),
        )
    }

    fn unpack(&self, lay: &Layout, v: &[BigInt]) -> Vec<IntMatrix> {
        self.unknowns
            .iter()
            .enumerate()
            .map(|(u, unk)| {
                let (r, c) = (unk.cod.generators(), unk.dom.generators());
                IntMatrix::from_column_major(r, c, &v[lay.offsets[u]..lay.offsets[u] + r * c])
            })
            .collect()
    }

    /// Solves for all unknowns at once, reducing to one linear Diophantine system.
    pub fn solve(&self) -> Result<HomOutcome, FgabError> {
        self.check_shapes()?;
        let lay = self.layout();
        let (a, b) = self.assemble(&lay, None);
        match solve_linear(&a, &b)? {
            LinearOutcome::Solution(sol) => {
                let values = self.unpack(&lay, &sol.particular.col(0));
                let directions = (0..sol.homogeneous.cols())
                    .map(|j| self.unpack(&lay, &sol.homogeneous.col(j)))
                    .collect();
                Ok(HomOutcome::Solved(HomSolution { values, directions }))
            }
            LinearOutcome::Infeasible(certificate) => {
                let culprit = self.find_failing_column(&lay);
                Ok(HomOutcome::Infeasible(HomInfeasible {
                    certificate,
                    culprit,
                }))
            }
        }
    }

    fn find_failing_column(&self, lay: &Layout) -> Option<FailingColumn> {
        for (e, eq) in self.equations.iter().enumerate() {
            for c in 0..eq.rhs.cols() {
                let (a, b) = self.assemble(lay, Some((e, c)));
                if let Ok(LinearOutcome::Infeasible(certificate)) = solve_linear(&a, &b) {
                    return Some(FailingColumn {
                        equation: e,
                        column: c,
                        certificate,
                    });
                }
            }
        }
        None
    }
}

fn add_block(a: &mut IntMatrix, r0: usize, c0: usize, m: &IntMatrix) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let e = m.get(i, j);
            if !e.is_zero() {
                let v = a.get(r0 + i, c0 + j) + e;
                a.set(r0 + i, c0 + j, v);
            }
        }
    }
}

/// Convenience wrapper around [`HomSystem::solve`].
pub fn hom_solve(system: &HomSystem) -> Result<HomOutcome, FgabError> {
    system.solve()
}

/// Whether a homomorphism matrix is invertible as a map of presented groups:
/// same invariants on both sides and bijective.
pub fn is_group_isomorphism(h: &GroupHom) -> bool {
    h.dom().is_isomorphic(h.cod()) && h.is_isomorphism()
}
