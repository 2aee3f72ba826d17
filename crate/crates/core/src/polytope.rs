//! Exact convex polytopes: incremental hull construction with facet
//! enumeration, polar duality, volume by fan triangulation, gauge inradius
//! and halfspace-representation utilities.

use itertools::Itertools;
use nalgebra as na;

use crate::geometry::{self, Vector};
use crate::tolerance::Tolerances;
use crate::{GeometryError, Result};

/// Convex polytope given by its vertex set.
#[derive(Debug, Clone)]
pub struct VPolytope {
    pub vertices: Vec<Vector>,
    pub dim: usize,
}

/// Convex polytope given by halfspaces `normal·x ≤ offset`.
#[derive(Debug, Clone)]
pub struct HPolytope {
    pub halfspaces: Vec<(Vector, f64)>,
    pub dim: usize,
}

/// A facet of the hull: the vertex ids on it, its outward unit-scale normal
/// and the offset of its supporting hyperplane.
#[derive(Debug, Clone)]
pub struct Facet {
    pub vertex_ids: Vec<usize>,
    pub normal: Vector,
    pub offset: f64,
}

/// Facet structure of a hull together with a simplicial triangulation of the
/// boundary. `triangles` lists (n−1)-simplices by vertex id; `interior` is a
/// strictly interior reference point used for orientation and fans.
#[derive(Debug, Clone)]
pub struct FacetComplex {
    pub facets: Vec<Facet>,
    pub triangles: Vec<Vec<usize>>,
    pub interior: Vector,
}

impl VPolytope {
    pub fn new(vertices: Vec<Vector>) -> Self {
        let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
        VPolytope { vertices, dim }
    }

    /// Arithmetic mean of the vertices. Cheap interior point; not the
    /// volumetric centroid.
    pub fn vertex_mean(&self) -> Vector {
        let mut c = Vector::zeros(self.dim);
        for v in &self.vertices {
            c += v;
        }
        c / self.vertices.len() as f64
    }
}

// A simplicial facet during incremental construction.
struct HullFacet {
    verts: Vec<usize>,
    normal: Vector,
    offset: f64,
    alive: bool,
}

/// Incremental beneath–beyond convex hull.
///
/// Returns the canonical polytope (minimal vertex set, deterministic order)
/// and its facet complex. Coplanar simplicial facets are merged into true
/// facets; input points within `tol_geom`-scaled distance of each other are
/// identified.
pub fn convex_hull(points: &[Vector], tol: &Tolerances) -> Result<(VPolytope, FacetComplex)> {
    let n = points.first().map(|p| p.len()).unwrap_or(0);
    if n == 0 || points.len() < n + 1 {
        return Err(GeometryError::DegenerateInput);
    }
    let scale = points
        .iter()
        .map(|p| p.amax())
        .fold(1.0f64, |a, b| a.max(b));
    let eps = tol.tol_geom * scale;

    // Identify near-duplicate points, keeping the first representative.
    let mut pts: Vec<Vector> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| (p - q).norm() <= eps) {
            pts.push(p.clone());
        }
    }
    if pts.len() < n + 1 {
        return Err(GeometryError::DegenerateInput);
    }

    let initial = initial_simplex(&pts, eps)?;
    let mut interior = Vector::zeros(n);
    for &i in &initial {
        interior += &pts[i];
    }
    interior /= (n + 1) as f64;

    let mut facets: Vec<HullFacet> = Vec::new();
    for skip in 0..=n {
        let verts: Vec<usize> = initial
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, &i)| i)
            .collect();
        facets.push(make_facet(&pts, verts, &interior)?);
    }

    let in_initial = |i: usize| initial.contains(&i);
    for idx in 0..pts.len() {
        if in_initial(idx) {
            continue;
        }
        insert_point(&mut facets, &pts, idx, &interior, eps)?;
        facets.retain(|f| f.alive);
    }

    assemble(&pts, facets, interior, eps)
}

/// Greedy choice of n+1 affinely independent points, taking the farthest
/// point from the current affine hull at each step.
fn initial_simplex(pts: &[Vector], eps: f64) -> Result<Vec<usize>> {
    let n = pts[0].len();
    let mut chosen = vec![0usize];
    let mut basis: Vec<Vector> = Vec::new();
    while chosen.len() < n + 1 {
        let p0 = &pts[chosen[0]];
        let mut best = None;
        let mut best_dist = eps;
        for (i, p) in pts.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let d = p - p0;
            let resid = &d - geometry::project_onto(&basis, &d);
            let dist = resid.norm();
            if dist > best_dist {
                best_dist = dist;
                best = Some((i, resid));
            }
        }
        match best {
            Some((i, resid)) => {
                chosen.push(i);
                basis.push(resid.normalize());
            }
            None => return Err(GeometryError::DegenerateInput),
        }
    }
    Ok(chosen)
}

fn make_facet(pts: &[Vector], verts: Vec<usize>, interior: &Vector) -> Result<HullFacet> {
    let p0 = &pts[verts[0]];
    let edges: Vec<Vector> = verts[1..].iter().map(|&i| &pts[i] - p0).collect();
    let mut normal = geometry::generalized_cross(&edges)?;
    let norm = normal.norm();
    if norm == 0.0 {
        return Err(GeometryError::DegenerateInput);
    }
    normal /= norm;
    let mut offset = normal.dot(p0);
    if normal.dot(interior) > offset {
        normal = -normal;
        offset = -offset;
    }
    Ok(HullFacet {
        verts,
        normal,
        offset,
        alive: true,
    })
}

fn insert_point(
    facets: &mut Vec<HullFacet>,
    pts: &[Vector],
    idx: usize,
    interior: &Vector,
    eps: f64,
) -> Result<()> {
    let p = &pts[idx];
    let visible: Vec<usize> = facets
        .iter()
        .enumerate()
        .filter(|(_, f)| f.alive && f.normal.dot(p) > f.offset + eps)
        .map(|(i, _)| i)
        .collect();
    if visible.is_empty() {
        return Ok(());
    }
    // Horizon ridges occur exactly once among the ridges of visible facets.
    let mut ridge_count: std::collections::HashMap<Vec<usize>, usize> =
        std::collections::HashMap::new();
    for &fi in &visible {
        let verts = &facets[fi].verts;
        for skip in 0..verts.len() {
            let mut ridge: Vec<usize> = verts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .map(|(_, &v)| v)
                .collect();
            ridge.sort_unstable();
            *ridge_count.entry(ridge).or_insert(0) += 1;
        }
    }
    for &fi in &visible {
        facets[fi].alive = false;
    }
    let mut new_facets = Vec::new();
    for (ridge, count) in ridge_count {
        if count == 1 {
            let mut verts = ridge;
            verts.push(idx);
            new_facets.push(make_facet(pts, verts, interior)?);
        }
    }
    facets.extend(new_facets);
    Ok(())
}

/// Merge coplanar simplicial facets, collect the canonical vertex set and
/// renumber everything against it.
fn assemble(
    pts: &[Vector],
    facets: Vec<HullFacet>,
    interior: Vector,
    eps: f64,
) -> Result<(VPolytope, FacetComplex)> {
    // Group simplicial facets by supporting hyperplane.
    let mut groups: Vec<(Vector, f64, Vec<usize>)> = Vec::new();
    for (fi, f) in facets.iter().enumerate() {
        let mut placed = false;
        for (gn, go, members) in groups.iter_mut() {
            if f.normal.dot(gn) > 1.0 - 1e-7 && (f.offset - *go).abs() <= eps.max(1e-12) {
                members.push(fi);
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push((f.normal.clone(), f.offset, vec![fi]));
        }
    }

    // Canonical vertex set: every point appearing in some facet, in original
    // input order.
    let mut used: Vec<usize> = facets.iter().flat_map(|f| f.verts.clone()).collect();
    used.sort_unstable();
    used.dedup();
    let remap: std::collections::HashMap<usize, usize> =
        used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let vertices: Vec<Vector> = used.iter().map(|&i| pts[i].clone()).collect();

    let mut out_facets = Vec::new();
    let mut triangles = Vec::new();
    for (normal, offset, members) in groups {
        let mut vertex_ids: Vec<usize> = members
            .iter()
            .flat_map(|&fi| facets[fi].verts.iter().map(|&v| remap[&v]))
            .collect();
        vertex_ids.sort_unstable();
        vertex_ids.dedup();
        out_facets.push(Facet {
            vertex_ids,
            normal,
            offset,
        });
        for &fi in &members {
            triangles.push(facets[fi].verts.iter().map(|&v| remap[&v]).collect());
        }
    }
    // Deterministic facet order: by lexicographic vertex id list.
    out_facets.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));
    triangles.sort();

    let dim = pts[0].len();
    Ok((
        VPolytope { vertices, dim },
        FacetComplex {
            facets: out_facets,
            triangles,
            interior,
        },
    ))
}

/// Volume of the hull described by `fc` over `vertices`, by the fan of
/// boundary simplices from the interior reference point.
pub fn volume_with(fc: &FacetComplex, vertices: &[Vector]) -> f64 {
    let n = fc.interior.len();
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let mut vol = 0.0;
    for tri in &fc.triangles {
        let cols: Vec<Vector> = tri.iter().map(|&i| &vertices[i] - &fc.interior).collect();
        vol += geometry::det_of_columns(&cols).abs();
    }
    vol / factorial
}

/// Exact polytope volume.
pub fn volume(p: &VPolytope, tol: &Tolerances) -> Result<f64> {
    let (vp, fc) = convex_hull(&p.vertices, tol)?;
    Ok(volume_with(&fc, &vp.vertices))
}

/// Volumetric centroid, via the same fan triangulation as [`volume`].
pub fn centroid(p: &VPolytope, tol: &Tolerances) -> Result<Vector> {
    let (vp, fc) = convex_hull(&p.vertices, tol)?;
    let n = vp.dim;
    let mut vol = 0.0;
    let mut acc = Vector::zeros(n);
    for tri in &fc.triangles {
        let cols: Vec<Vector> = tri.iter().map(|&i| &vp.vertices[i] - &fc.interior).collect();
        let v = geometry::det_of_columns(&cols).abs();
        let mut c = fc.interior.clone();
        for &i in tri {
            c += &vp.vertices[i];
        }
        c /= (n + 1) as f64;
        vol += v;
        acc += c * v;
    }
    if vol == 0.0 {
        return Err(GeometryError::DegenerateInput);
    }
    Ok(acc / vol)
}

/// Vertices of the polar body about `z`, one per facet of `p`.
///
/// Fails with [`GeometryError::CenterNotInterior`] when `z` is not strictly
/// interior.
pub fn polar_vertices_about(fc: &FacetComplex, z: &Vector, tol: &Tolerances) -> Result<Vec<Vector>> {
    let mut out = Vec::with_capacity(fc.facets.len());
    for f in &fc.facets {
        let gap = f.offset - f.normal.dot(z);
        if gap <= tol.tol_geom {
            return Err(GeometryError::CenterNotInterior);
        }
        out.push(z + &f.normal / gap);
    }
    Ok(out)
}

/// Polar dual of `p` about `z` as a vertex polytope.
pub fn polar_dual(p: &VPolytope, z: &Vector, tol: &Tolerances) -> Result<VPolytope> {
    let (_, fc) = convex_hull(&p.vertices, tol)?;
    let verts = polar_vertices_about(&fc, z, tol)?;
    let (vp, _) = convex_hull(&verts, tol)?;
    Ok(vp)
}

/// Volume and volumetric centroid of the polar body about `z`, computed from
/// a fixed facet complex of the primal. This is the inner loop of the Santaló
/// solver.
pub fn polar_volume_and_centroid(
    fc: &FacetComplex,
    z: &Vector,
    tol: &Tolerances,
) -> Result<(f64, Vector)> {
    let verts = polar_vertices_about(fc, z, tol)?;
    let (vp, pfc) = convex_hull(&verts, tol)?;
    let n = vp.dim;
    let mut vol = 0.0;
    let mut acc = Vector::zeros(n);
    for tri in &pfc.triangles {
        let cols: Vec<Vector> = tri.iter().map(|&i| &vp.vertices[i] - &pfc.interior).collect();
        let v = geometry::det_of_columns(&cols).abs();
        let mut c = pfc.interior.clone();
        for &i in tri {
            c += &vp.vertices[i];
        }
        c /= (n + 1) as f64;
        vol += v;
        acc += c * v;
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    Ok((vol / factorial, acc / vol))
}

/// Membership test against the facet inequalities, boundary inclusive.
pub fn contains(fc: &FacetComplex, x: &Vector, tol: &Tolerances) -> bool {
    let scale = 1.0 + x.amax();
    fc.facets
        .iter()
        .all(|f| f.normal.dot(x) <= f.offset + tol.tol_geom * scale)
}

/// Largest `r` with `r·T° ⊆ K`: the minimum over facets `(a, b)` of `K` of
/// `b / h_{T°}(a)`, where the support value runs over the vertices of `T°`.
pub fn inradius_gauge(k: &VPolytope, t_polar: &VPolytope, tol: &Tolerances) -> Result<f64> {
    let (_, fc) = convex_hull(&k.vertices, tol)?;
    let mut r = f64::INFINITY;
    for f in &fc.facets {
        if f.offset <= tol.tol_geom {
            return Err(GeometryError::OriginNotInterior);
        }
        let h = t_polar
            .vertices
            .iter()
            .map(|w| f.normal.dot(w))
            .fold(f64::NEG_INFINITY, f64::max);
        if h <= tol.tol_geom {
            return Err(GeometryError::OriginNotInterior);
        }
        r = r.min(f.offset / h);
    }
    Ok(r)
}

/// Vertex enumeration for a halfspace representation, by exhausting the
/// n-subsets of active constraints. Intended for the small systems this
/// crate works with (n ≤ 6, tens of halfspaces).
pub fn h_rep_vertices(h: &HPolytope, tol: &Tolerances) -> Result<Vec<Vector>> {
    let n = h.dim;
    if h.halfspaces.len() < n {
        return Err(GeometryError::DegenerateInput);
    }
    let scale = h
        .halfspaces
        .iter()
        .map(|(a, b)| a.amax().max(b.abs()))
        .fold(1.0f64, f64::max);
    let eps = tol.tol_geom * scale;
    let mut verts: Vec<Vector> = Vec::new();
    for combo in (0..h.halfspaces.len()).combinations(n) {
        let mut m = na::DMatrix::zeros(n, n);
        let mut rhs = Vector::zeros(n);
        for (row, &i) in combo.iter().enumerate() {
            m.set_row(row, &h.halfspaces[i].0.transpose());
            rhs[row] = h.halfspaces[i].1;
        }
        let lu = m.lu();
        if let Some(x) = lu.solve(&rhs) {
            if x.amax() > 1e12 {
                continue;
            }
            let feasible = h
                .halfspaces
                .iter()
                .all(|(a, b)| a.dot(&x) <= b + eps.max(tol.tol_geom * (1.0 + x.amax())));
            if feasible && !verts.iter().any(|v| (v - &x).norm() <= eps) {
                verts.push(x);
            }
        }
    }
    if verts.len() < n + 1 {
        return Err(GeometryError::DegenerateInput);
    }
    Ok(verts)
}

/// Canonical V-representation of a halfspace polytope.
pub fn h_to_v(h: &HPolytope, tol: &Tolerances) -> Result<VPolytope> {
    let verts = h_rep_vertices(h, tol)?;
    let (vp, _) = convex_hull(&verts, tol)?;
    Ok(vp)
}

/// Vertex-antipodality test for central symmetry.
pub fn is_centrally_symmetric(p: &VPolytope, tol: &Tolerances) -> bool {
    let scale = p
        .vertices
        .iter()
        .map(|v| v.amax())
        .fold(1.0f64, f64::max);
    let eps = tol.tol_geom * scale;
    p.vertices
        .iter()
        .all(|v| p.vertices.iter().any(|w| (v + w).norm() <= eps))
}

/// Hausdorff distance between two finite point sets.
pub fn point_set_distance(a: &[Vector], b: &[Vector]) -> f64 {
    let one_sided = |from: &[Vector], to: &[Vector]| -> f64 {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// The n-cube `[-1, 1]^n` as a vertex polytope.
pub fn cube(n: usize) -> VPolytope {
    let mut verts = Vec::with_capacity(1 << n);
    for mask in 0..(1u32 << n) {
        let v = Vector::from_iterator(
            n,
            (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }),
        );
        verts.push(v);
    }
    VPolytope::new(verts)
}

/// The cross-polytope `◊ⁿ`, hull of `±e_i`.
pub fn cross_polytope(n: usize) -> VPolytope {
    let mut verts = Vec::with_capacity(2 * n);
    for i in 0..n {
        verts.push(geometry::unit(n, i));
        verts.push(-geometry::unit(n, i));
    }
    VPolytope::new(verts)
}

/// The regular simplex `△ⁿ` on the vertex frame of
/// [`geometry::simplex_vertices`].
pub fn simplex(n: usize) -> Result<VPolytope> {
    Ok(VPolytope::new(geometry::simplex_vertices(n)?))
}
