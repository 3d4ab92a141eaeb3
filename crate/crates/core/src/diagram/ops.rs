use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use alloc::sync::Arc;

use super::hom::{verify_hom, DiagramHom};
use super::module::{DiagramModule, Variance};
use super::shape::{ArrowKind, DiagramShape};
use super::DiagramError;
use crate::fgab::PresentedGroup;
use crate::intlin::IntMatrix;

/// How each generator of a module arises from a single corner vertex.
///
/// `entries[v][j] = (path, g)` says generator `j` at `v` is the image of
/// corner generator `g` along `path` (composite order, a path from the corner
/// to `v` in the module's direction of maps). After [`dualize`] the same data
/// describes coordinates instead: `dual` is then set and coordinate `j` at `v`
/// is corner coordinate `g` read through `path`, now running from `v` to the
/// corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub corner: usize,
    pub dual: bool,
    pub entries: Vec<Vec<(Vec<usize>, usize)>>,
}

/// Checks provenance on a freely presented module.
pub fn validate_provenance(m: &DiagramModule) -> Result<(), DiagramError> {
    let p = m
        .provenance()
        .ok_or_else(|| DiagramError::Provenance("module has none".into()))?;
    let shape = m.shape();
    let bad = |v: usize, j: usize, why: &str| {
        DiagramError::Provenance(format!("generator {j} at {}: {why}", shape.vertex_label(v)))
    };
    if p.entries.len() != m.groups().len() {
        return Err(DiagramError::Provenance(
            "one entry list per vertex expected".into(),
        ));
    }
    let corner_gens = m.group(p.corner).generators();
    for (v, list) in p.entries.iter().enumerate() {
        if !m.group(v).is_free_presentation() {
            return Err(DiagramError::NotFree(shape.vertex_label(v)));
        }
        if list.len() != m.group(v).generators() {
            return Err(bad(v, list.len(), "wrong number of entries"));
        }
        for (j, (path, g)) in list.iter().enumerate() {
            if *g >= corner_gens {
                return Err(bad(v, j, "corner generator out of range"));
            }
            let (start, end) = match (path.first(), path.last()) {
                (Some(&f), Some(&l)) => (shape.arrows()[l].src, shape.arrows()[f].dst),
                _ => (v, v),
            };
            let from_corner = (m.variance() == Variance::Covariant) != p.dual;
            let (want_start, want_end) = if from_corner {
                (p.corner, v)
            } else {
                (v, p.corner)
            };
            if path.is_empty() && v != p.corner {
                return Err(bad(v, j, "empty path away from the corner"));
            }
            if (start, end) != (want_start, want_end) {
                return Err(bad(v, j, "path has the wrong endpoints"));
            }
            let pm = m.path_matrix_or_identity(path, if p.dual { v } else { p.corner })?;
            let ok = if p.dual {
                // Row `g` of the map to the corner must be the coordinate `j`.
                pm.row(*g)
                    .iter()
                    .enumerate()
                    .all(|(k, x)| *x == if k == j { 1.into() } else { 0.into() })
            } else {
                pm.col(*g)
                    .iter()
                    .enumerate()
                    .all(|(k, x)| *x == if k == j { 1.into() } else { 0.into() })
            };
            if !ok {
                return Err(bad(v, j, "path does not carry the corner generator to it"));
            }
        }
    }
    Ok(())
}

/// Swaps the two degrees: the group at `(Y, d)` moves to `(Y, 1 - d)`.
pub fn suspend(m: &DiagramModule) -> Result<DiagramModule, DiagramError> {
    let shape = m.shape();
    let nv = shape.vertices().len();
    let vmap: Vec<usize> = (0..nv)
        .map(|v| {
            shape
                .degree_partner(v)
                .ok_or_else(|| DiagramError::Asymmetric(shape.vertex_label(v)))
        })
        .collect::<Result<_, _>>()?;
    let amap: Vec<usize> = (0..shape.arrows().len())
        .map(|a| {
            shape
                .arrow_partner(a)
                .ok_or_else(|| DiagramError::Asymmetric(shape.arrow_label(a)))
        })
        .collect::<Result<_, _>>()?;
    let groups = vmap.iter().map(|&v| m.group(v).clone()).collect();
    let maps = amap.iter().map(|&a| m.map(a).clone()).collect();
    let provenance = m.provenance().map(|p| Provenance {
        corner: vmap[p.corner],
        dual: p.dual,
        entries: vmap
            .iter()
            .map(|&v| {
                p.entries[v]
                    .iter()
                    .map(|(path, g)| (path.iter().map(|&a| amap[a]).collect(), *g))
                    .collect()
            })
            .collect(),
    });
    Ok(DiagramModule::from_parts_unchecked(
        shape.clone(),
        m.variance(),
        groups,
        maps,
        provenance,
    ))
}

/// `M ⊗ G` vertexwise. Generator `(j, k)` of `M(v) ⊗ G` has index `j·|G| + k`.
pub fn tensor_with_group(m: &DiagramModule, g: &PresentedGroup) -> DiagramModule {
    let n = g.generators();
    let ig = IntMatrix::identity(n);
    let groups = m
        .groups()
        .iter()
        .map(|h| {
            let a = h.relations().kron(&ig);
            let b = IntMatrix::identity(h.generators()).kron(g.relations());
            PresentedGroup::new(IntMatrix::hstack(h.generators() * n, &[&a, &b]))
        })
        .collect();
    let maps = m.maps().iter().map(|x| x.kron(&ig)).collect();
    let provenance = m.provenance().map(|p| Provenance {
        corner: p.corner,
        dual: p.dual,
        entries: p
            .entries
            .iter()
            .map(|list| {
                list.iter()
                    .flat_map(|(path, c)| (0..n).map(move |k| (path.clone(), c * n + k)))
                    .collect()
            })
            .collect(),
    });
    DiagramModule::from_parts_unchecked(m.shape().clone(), m.variance(), groups, maps, provenance)
}

/// `Hom(M, Z)` for a freely presented module: transposed maps, opposite variance.
pub fn dualize(m: &DiagramModule) -> Result<DiagramModule, DiagramError> {
    for (v, g) in m.groups().iter().enumerate() {
        if !g.is_free_presentation() {
            return Err(DiagramError::NotFree(m.shape().vertex_label(v)));
        }
    }
    let groups = m
        .groups()
        .iter()
        .map(|g| PresentedGroup::free(g.generators()))
        .collect();
    let maps = m.maps().iter().map(IntMatrix::transpose).collect();
    let provenance = m.provenance().map(|p| Provenance {
        dual: !p.dual,
        ..p.clone()
    });
    Ok(DiagramModule::from_parts_unchecked(
        m.shape().clone(),
        m.variance().flip(),
        groups,
        maps,
        provenance,
    ))
}

fn inconsistent(h: &DiagramHom) -> Result<(), DiagramError> {
    let report = verify_hom(h);
    if report.holds() {
        return Ok(());
    }
    let mut why: Vec<String> = report
        .ill_defined
        .iter()
        .map(|v| format!("{v} ill defined"))
        .collect();
    why.extend(
        report
            .failures
            .iter()
            .map(|f| format!("square at {} fails", f.label)),
    );
    Err(DiagramError::ExtensionInconsistent(why))
}

fn check_corner_map(
    label: String,
    from: &PresentedGroup,
    to: &PresentedGroup,
    m: &IntMatrix,
) -> Result<(), DiagramError> {
    let h = crate::fgab::GroupHom::new(from.clone(), to.clone(), m.clone())
        .map_err(|_| DiagramError::BadPin(format!("corner map at {label} has the wrong size")))?;
    if !h.is_well_defined() {
        return Err(DiagramError::BadPin(format!(
            "corner map at {label} is not well defined"
        )));
    }
    Ok(())
}

/// The unique natural map `K → target` that is `phi` at the corner of `K`,
/// when `K` is generated from its corner.
pub fn extend_from_corner(
    k: &DiagramModule,
    target: &DiagramModule,
    phi: &IntMatrix,
) -> Result<DiagramHom, DiagramError> {
    let p = k
        .provenance()
        .ok_or_else(|| DiagramError::Provenance("source has none".into()))?;
    if p.dual || k.variance() != target.variance() {
        return Err(DiagramError::Provenance(
            "source provenance runs the wrong way".into(),
        ));
    }
    check_corner_map(
        k.shape().vertex_label(p.corner),
        k.group(p.corner),
        target.group(p.corner),
        phi,
    )?;
    let mut components = Vec::with_capacity(k.groups().len());
    for (v, list) in p.entries.iter().enumerate() {
        let mut c = IntMatrix::zeros(target.group(v).generators(), list.len());
        for (j, (path, g)) in list.iter().enumerate() {
            let col = &target.path_matrix_or_identity(path, p.corner)? * &phi.col_matrix(*g);
            c.paste(0, j, &col);
        }
        components.push(c);
    }
    let h = DiagramHom::new(k.clone(), target.clone(), components)?;
    inconsistent(&h)?;
    Ok(h)
}

/// The unique natural map `source → L` that is `psi` at the corner of `L`,
/// when `L` is cogenerated by its corner (dual provenance).
pub fn co_extend_to_corner(
    source: &DiagramModule,
    l: &DiagramModule,
    psi: &IntMatrix,
) -> Result<DiagramHom, DiagramError> {
    let p = l
        .provenance()
        .ok_or_else(|| DiagramError::Provenance("target has none".into()))?;
    if !p.dual || l.variance() != source.variance() {
        return Err(DiagramError::Provenance(
            "target provenance runs the wrong way".into(),
        ));
    }
    check_corner_map(
        l.shape().vertex_label(p.corner),
        source.group(p.corner),
        l.group(p.corner),
        psi,
    )?;
    let mut components = Vec::with_capacity(l.groups().len());
    for (v, list) in p.entries.iter().enumerate() {
        let mut c = IntMatrix::zeros(list.len(), source.group(v).generators());
        for (j, (path, g)) in list.iter().enumerate() {
            let row = &psi.select_rows(&[*g]) * &source.path_matrix_or_identity(path, v)?;
            c.paste(j, 0, &row);
        }
        components.push(c);
    }
    let h = DiagramHom::new(source.clone(), l.clone(), components)?;
    inconsistent(&h)?;
    Ok(h)
}

/// Module with the given groups, zero maps everywhere.
pub fn concentrated(
    shape: Arc<DiagramShape>,
    variance: Variance,
    groups: Vec<PresentedGroup>,
) -> Result<DiagramModule, DiagramError> {
    let maps = shape
        .arrows()
        .iter()
        .map(|ar| {
            let (from, to) = match variance {
                Variance::Covariant => (ar.src, ar.dst),
                Variance::Contravariant => (ar.dst, ar.src),
            };
            IntMatrix::zeros(
                groups.get(to).map_or(0, PresentedGroup::generators),
                groups.get(from).map_or(0, PresentedGroup::generators),
            )
        })
        .collect();
    DiagramModule::new(shape, variance, groups, maps)
}

/// K-theory of the algebra `C` sitting at a single point: `Z` in the given
/// degree at every carrier containing `point`, identity along `i` and `r`
/// arrows between such carriers, zero elsewhere.
///
/// Over a space where `x̃` is the smallest open neighbourhood of `x`, this is
/// the projective module generated at `x̃` (suspended when `degree` is 1),
/// and also the injective module cogenerated at `{x}`.
pub fn point_module(
    shape: Arc<DiagramShape>,
    point: usize,
    degree: u8,
) -> Result<DiagramModule, DiagramError> {
    let lives = |v: usize| {
        let spec = &shape.vertices()[v];
        spec.degree == degree && spec.carrier.is_some_and(|c| c.contains(point))
    };
    let groups: Vec<PresentedGroup> = (0..shape.vertices().len())
        .map(|v| PresentedGroup::free(usize::from(lives(v))))
        .collect();
    let maps = shape
        .arrows()
        .iter()
        .map(|ar| {
            let (r, c) = (groups[ar.dst].generators(), groups[ar.src].generators());
            if r == 1 && c == 1 && matches!(ar.kind, ArrowKind::I | ArrowKind::R) {
                IntMatrix::identity(1)
            } else {
                IntMatrix::zeros(r, c)
            }
        })
        .collect();
    DiagramModule::new(shape, Variance::Covariant, groups, maps)
}

/// Attaches provenance by searching, for every vertex, a shortest `i`/`r`
/// path through nonzero vertices between it and `corner`. With `dual` unset
/// each generator must be the image of a corner generator; with `dual` set
/// each coordinate must be read off a corner coordinate.
pub fn attach_corner_paths(
    m: DiagramModule,
    corner: usize,
    dual: bool,
) -> Result<DiagramModule, DiagramError> {
    let shape = m.shape().clone();
    let from_corner = (m.variance() == Variance::Covariant) != dual;
    let kinds = [ArrowKind::I, ArrowKind::R];
    let nonzero = |v: usize| m.group(v).generators() > 0;
    let mut entries = Vec::with_capacity(m.groups().len());
    for v in 0..m.groups().len() {
        let n = m.group(v).generators();
        if n == 0 {
            entries.push(Vec::new());
            continue;
        }
        let found = if from_corner {
            shape.find_path_through(corner, v, &kinds, nonzero)
        } else {
            shape.find_path_through(v, corner, &kinds, nonzero)
        };
        let path = found.ok_or_else(|| {
            DiagramError::Provenance(format!(
                "no path between {} and the corner",
                shape.vertex_label(v)
            ))
        })?;
        let pm = m.path_matrix_or_identity(&path, if dual { v } else { corner })?;
        let unit = |j: usize, line: &[crate::BigInt]| {
            line.iter()
                .enumerate()
                .all(|(k, x)| *x == if k == j { 1.into() } else { 0.into() })
        };
        let mut list = Vec::with_capacity(n);
        for j in 0..n {
            let g = (0..m.group(corner).generators()).find(|&g| {
                if dual {
                    unit(j, pm.row(g))
                } else {
                    unit(j, &pm.col(g))
                }
            });
            let g = g.ok_or_else(|| {
                DiagramError::Provenance(format!(
                    "generator {j} at {} is not reached from the corner",
                    shape.vertex_label(v)
                ))
            })?;
            list.push((path.clone(), g));
        }
        entries.push(list);
    }
    let m = m.with_provenance(Provenance {
        corner,
        dual,
        entries,
    });
    validate_provenance(&m)?;
    Ok(m)
}
