//! Signed-volume vectors of boundary patches, cone volumes, the signed
//! estimate, the duality identity, the (BF)-type inequality and the I_k
//! recursion chain.
//!
//! A patch here is the radial graph `{ρ_K(x)·x : x ∈ conv{a_1,…,a_k}}` over a
//! frame of independent vectors. All integrals run over the parameter simplex
//! through a Duffy-style map from the unit cube with a tensor midpoint rule.

use crate::geometry::{self, Vector};
use crate::starbody::StarBody;
use crate::symmetry::{self, Family, GroupSpec};
use crate::tolerance::Tolerances;
use crate::{GeometryError, Result};

/// Signed-volume vector of a boundary patch.
///
/// The scalar normalization carries the `1/(n−1)` factor, the only choice
/// under which the duality identity and the quarter-disk example are mutually
/// consistent.
#[derive(Debug, Clone)]
pub struct PatchVector {
    pub vector: Vector,
    /// Difference against a half-resolution quadrature, as an error estimate.
    pub error_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct EstimateCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct DualityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct BfCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub factor: f64,
    pub pass: bool,
}

/// The I_k recursion record: values `I_1..I_{n−1}`, the per-level factors and
/// pass flags of `I_k ≥ factor_k · I_{k−1}`, and the fully chained bound.
#[derive(Debug, Clone)]
pub struct IkChain {
    pub alpha: f64,
    pub values: Vec<f64>,
    pub factors: Vec<f64>,
    pub recursion_pass: Vec<bool>,
    pub chained_bound: f64,
}

/// Midpoint nodes on the standard simplex `{t ≥ 0, Σt ≤ 1}` of dimension `d`,
/// obtained by transporting a tensor midpoint rule through the smooth cube →
/// simplex map `t_i = u_i·Π_{j<i}(1−u_j)`.
fn simplex_quadrature(d: usize, subdivisions: u32) -> Vec<(Vec<f64>, f64)> {
    if d == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut m = 1usize << subdivisions;
    // Keep the node count bounded in higher parameter dimensions.
    while (m as f64).powi(d as i32) > 2_000_000.0 && m > 2 {
        m /= 2;
    }
    let mut nodes = Vec::new();
    let mut idx = vec![0usize; d];
    let base_w = 1.0 / (m as f64).powi(d as i32);
    loop {
        let mut t = vec![0.0; d];
        let mut w = base_w;
        let mut remaining = 1.0;
        for i in 0..d {
            let u = (idx[i] as f64 + 0.5) / m as f64;
            t[i] = u * remaining;
            // Jacobian factor (1−u_i)^{d−1−i} accumulated via `remaining`.
            w *= remaining;
            remaining *= 1.0 - u;
        }
        nodes.push((t, w));
        // Odometer over the d-dimensional grid.
        let mut i = 0;
        loop {
            if i == d {
                return nodes;
            }
            idx[i] += 1;
            if idx[i] < m {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// The affine chart of the parameter simplex onto `conv{a_1..a_k}`.
fn chart_point(spanning: &[Vector], t: &[f64]) -> Vector {
    let mut s = spanning[0].clone();
    for (i, ti) in t.iter().enumerate() {
        s += (&spanning[i + 1] - &spanning[0]) * *ti;
    }
    s
}

fn check_independent(spanning: &[Vector], tol: &Tolerances) -> Result<f64> {
    let g = geometry::gram_volume(spanning);
    if !(g > tol.tol_geom) {
        return Err(GeometryError::DependentVectors);
    }
    Ok(g)
}

/// `∫_D ρ(s(t))^power dt` at the given resolution.
fn radial_power_integral<F>(rho: &F, spanning: &[Vector], power: i32, subdivisions: u32) -> Result<f64>
where
    F: Fn(&Vector) -> Result<f64>,
{
    let d = spanning.len() - 1;
    let mut acc = 0.0;
    for (t, w) in simplex_quadrature(d, subdivisions) {
        let s = chart_point(spanning, &t);
        acc += w * rho(&s)?.powi(power);
    }
    Ok(acc)
}

/// Signed-volume vector `C̄ = (1/(n−1)) (∫_D ρ^{n−1}(s(t)) dt) · N` of the
/// patch over `n−1` independent vectors, `N` their generalized cross product.
pub fn patch_vector(k: &StarBody, spanning: &[Vector], tol: &Tolerances) -> Result<PatchVector> {
    let n = k.dim();
    if spanning.len() != n - 1 {
        return Err(GeometryError::InvalidArgument(
            "a patch vector needs exactly n−1 spanning vectors".into(),
        ));
    }
    check_independent(spanning, tol)?;
    let normal = geometry::generalized_cross(spanning)?;
    let rho = |s: &Vector| k.radial(s);
    let fine = radial_power_integral(&rho, spanning, n as i32 - 1, tol.quad_subdivisions)?;
    let coarse =
        radial_power_integral(&rho, spanning, n as i32 - 1, tol.quad_subdivisions.saturating_sub(1))?;
    let scalar = fine / (n as f64 - 1.0);
    Ok(PatchVector {
        vector: &normal * scalar,
        error_estimate: ((fine - coarse) / (n as f64 - 1.0) * normal.norm()).abs(),
    })
}

/// `|o*𝒞(a_1..a_k)|_k = (g/k) ∫_D ρ^k(s(t)) dt` with `g` the k-volume of the
/// frame parallelepiped.
pub fn cone_volume(k: &StarBody, spanning: &[Vector], tol: &Tolerances) -> Result<f64> {
    let g = check_independent(spanning, tol)?;
    let kk = spanning.len();
    let rho = |s: &Vector| k.radial(s);
    let integral = radial_power_integral(&rho, spanning, kk as i32, tol.quad_subdivisions)?;
    Ok(g / kk as f64 * integral)
}

/// Same cone volume for the polar body, via `ρ_{K°} = 1/h_K`.
pub fn polar_cone_volume(k: &StarBody, spanning: &[Vector], tol: &Tolerances) -> Result<f64> {
    let g = check_independent(spanning, tol)?;
    let kk = spanning.len();
    let rho = |s: &Vector| Ok(1.0 / k.support(s, tol)?);
    let integral = radial_power_integral(&rho, spanning, kk as i32, tol.quad_subdivisions)?;
    Ok(g / kk as f64 * integral)
}

/// Cone volume of the Λ-image of a patch, measured after orthogonal
/// projection onto `span{a_1..a_k}`. Also reports the largest out-of-span
/// component of the image, which the (BF) hypotheses require to vanish.
fn lambda_image_cone_volume(
    k: &StarBody,
    spanning: &[Vector],
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    check_independent(spanning, tol)?;
    let kk = spanning.len();
    let basis = geometry::orthonormal_span(spanning, tol.tol_geom);
    if basis.len() != kk {
        return Err(GeometryError::DependentVectors);
    }
    // Λ of the radial-graph point over the chart; smooth in t, so central
    // differences in parameter space are valid even just outside D.
    let image = |t: &[f64]| -> Result<Vector> {
        let s = chart_point(spanning, t);
        let r = &s * k.radial(&s)?;
        k.lambda_map(&r, tol)
    };
    let mut out_of_span: f64 = 0.0;
    let mut coords = |t: &[f64]| -> Result<Vector> {
        let y = image(t)?;
        let p = geometry::coords_in(&basis, &y);
        let back = geometry::project_onto(&basis, &y);
        out_of_span = out_of_span.max((y - back).norm());
        Ok(p)
    };
    if kk == 1 {
        let p = coords(&[])?;
        return Ok((p.norm(), out_of_span));
    }
    let d = kk - 1;
    let h = 1e-4;
    let mut acc = 0.0;
    for (t, w) in simplex_quadrature(d, tol.quad_subdivisions) {
        let mut cols = Vec::with_capacity(kk);
        cols.push(coords(&t)?);
        for i in 0..d {
            let mut tp = t.clone();
            let mut tm = t.clone();
            tp[i] += h;
            tm[i] -= h;
            cols.push((coords(&tp)? - coords(&tm)?) / (2.0 * h));
        }
        acc += w * geometry::det_of_columns(&cols);
    }
    Ok((acc.abs() / kk as f64, out_of_span))
}

/// Proposition-2.4-style estimate: with `B = 𝒞(a_1..a_n)` and boundary
/// patches `𝒞(a_1..â_i..a_n)`, checks `C̄·x/n ≤ |o*B|` for `x ∈ K`, where
/// `C̄ = Σ_i (−1)^{i−1} C̄_i`.
pub fn signed_estimate_check(
    k: &StarBody,
    spanning: &[Vector],
    x: &Vector,
    tol: &Tolerances,
) -> Result<EstimateCheck> {
    let n = k.dim();
    if spanning.len() != n {
        return Err(GeometryError::InvalidArgument(
            "the estimate needs a full frame of n vectors".into(),
        ));
    }
    check_independent(spanning, tol)?;
    if x.norm() > 0.0 && k.gauge(x)? > 1.0 + 10.0 * tol.tol_quad {
        return Err(GeometryError::PointOutside);
    }
    let mut total = Vector::zeros(n);
    for i in 0..n {
        let face: Vec<Vector> = spanning
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, a)| a.clone())
            .collect();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        total += patch_vector(k, &face, tol)?.vector * sign;
    }
    let lhs = total.dot(x) / n as f64;
    let rhs = cone_volume(k, spanning, tol)?;
    Ok(EstimateCheck {
        lhs,
        rhs,
        pass: lhs <= rhs + tol.tol_quad,
    })
}

/// The duality identity for a patch over `n−1` vectors spanning `H`:
/// `C̄(𝒞) · C̄(Λ(𝒞)) = |o*𝒞|_{n−1} · |o*π_H Λ(𝒞)|_{n−1}`.
pub fn duality_identity(
    k: &StarBody,
    spanning: &[Vector],
    tol: &Tolerances,
) -> Result<DualityCheck> {
    let n = k.dim();
    if spanning.len() != n - 1 {
        return Err(GeometryError::InvalidArgument(
            "the duality identity needs n−1 spanning vectors".into(),
        ));
    }
    if !k.is_smooth() {
        return Err(GeometryError::NonSmoothKind);
    }
    let primal = patch_vector(k, spanning, tol)?.vector;
    let image_vec = lambda_patch_vector(k, spanning, tol)?;
    let lhs = primal.dot(&image_vec);

    let primal_cone = cone_volume(k, spanning, tol)?;
    let (polar_cone, _) = lambda_image_cone_volume(k, spanning, tol)?;
    let rhs = primal_cone * polar_cone;
    Ok(DualityCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// Signed-volume vector of the Λ-image surface, integrated by pushing the
/// chart through Λ: `(1/(n−1)) ∫ cross(y, ∂_1 y, …, ∂_{n−2} y) dt`.
fn lambda_patch_vector(k: &StarBody, spanning: &[Vector], tol: &Tolerances) -> Result<Vector> {
    let n = k.dim();
    let d = n - 2;
    let image = |t: &[f64]| -> Result<Vector> {
        let s = chart_point(spanning, t);
        let r = &s * k.radial(&s)?;
        k.lambda_map(&r, tol)
    };
    let h = 1e-4;
    let mut acc = Vector::zeros(n);
    for (t, w) in simplex_quadrature(d, tol.quad_subdivisions) {
        let mut args = Vec::with_capacity(n - 1);
        args.push(image(&t)?);
        for i in 0..d {
            let mut tp = t.clone();
            let mut tm = t.clone();
            tp[i] += h;
            tm[i] -= h;
            args.push((image(&tp)? - image(&tm)?) / (2.0 * h));
        }
        acc += geometry::generalized_cross(&args)? * w;
    }
    Ok(acc / (n as f64 - 1.0))
}

/// The Barthe–Fradelizi-type factor `(1−α)/(k(1+(k−2)α))`.
pub fn bf_factor(alpha: f64, k: usize) -> f64 {
    (1.0 - alpha) / (k as f64 * (1.0 + (k as f64 - 2.0) * alpha))
}

/// The (BF) inequality at level `k = frame.len()`:
/// `|o*𝒞(a_1..a_k)|·|o*π_H Λ(𝒞(a_1..a_k))| ≥ factor · |o*𝒞(a_1..a_{k−1})|·|o*Λ(𝒞(a_1..a_{k−1}))|`.
///
/// The frame must be unit equiangular at angle cosine `alpha`; the two
/// numerical hypotheses (equal sub-cone volumes, Λ-images inside their
/// sub-spans) are asserted first.
pub fn bf_inequality(
    k: &StarBody,
    alpha: f64,
    frame: &[Vector],
    tol: &Tolerances,
) -> Result<BfCheck> {
    let kk = frame.len();
    if kk < 2 {
        return Err(GeometryError::InvalidArgument(
            "the (BF) inequality needs at least two frame vectors".into(),
        ));
    }
    if !(alpha.abs() < 1.0) || 1.0 + (kk as f64 - 2.0) * alpha <= 0.0 {
        return Err(GeometryError::InvalidArgument(
            "frame angle parameter out of range".into(),
        ));
    }
    for i in 0..kk {
        for j in 0..kk {
            let want = if i == j { 1.0 } else { alpha };
            if (frame[i].dot(&frame[j]) - want).abs() > 1e-9 {
                return Err(GeometryError::InvalidArgument(
                    "frame is not unit equiangular at the stated alpha".into(),
                ));
            }
        }
    }

    // Hypothesis 1: the k sub-cone volumes at level k−1 agree.
    let mut sub_volumes = Vec::with_capacity(kk);
    for i in 0..kk {
        let sub: Vec<Vector> = frame
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, a)| a.clone())
            .collect();
        sub_volumes.push(cone_volume(k, &sub, tol)?);
    }
    let vmax = sub_volumes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = sub_volumes.iter().cloned().fold(f64::INFINITY, f64::min);
    if (vmax - vmin) / vmax.max(1e-300) > 10.0 * tol.tol_quad {
        return Err(GeometryError::HypothesisViolated(1));
    }

    // Level-(k−1) factors on the first k−1 frame vectors.
    let lower = &frame[..kk - 1];
    let (lower_polar, lower_residual) = lambda_image_cone_volume(k, lower, tol)?;
    if lower_residual > 10.0 * tol.tol_quad {
        return Err(GeometryError::HypothesisViolated(2));
    }
    let lower_primal = cone_volume(k, lower, tol)?;

    let (upper_polar, upper_residual) = lambda_image_cone_volume(k, frame, tol)?;
    if upper_residual > 10.0 * tol.tol_quad && kk == k.dim() {
        // At full level the projection is the identity, so a residual here
        // signals an evaluator defect rather than a failed hypothesis.
        return Err(GeometryError::HypothesisViolated(2));
    }
    let upper_primal = cone_volume(k, frame, tol)?;

    let factor = bf_factor(alpha, kk);
    let lhs = upper_primal * upper_polar;
    let rhs = factor * lower_primal * lower_polar;
    Ok(BfCheck {
        lhs,
        rhs,
        factor,
        pass: lhs >= rhs - tol.tol_quad,
    })
}

/// Runs the whole `I_k` recursion for a G-invariant smooth body: the frame is
/// `e_1..e_{n−1}` at `α = 0` (diamond families) or the simplex vertices at
/// `α = −1/n` (simplex families). The body is dilated first so the frame
/// points lie on its boundary.
pub fn ik_chain(k: &StarBody, spec: GroupSpec, tol: &Tolerances) -> Result<IkChain> {
    let n = k.dim();
    if spec.dim != n {
        return Err(GeometryError::InvalidArgument(
            "group dimension must match the body".into(),
        ));
    }
    let group = symmetry::generate(spec, tol)?;
    let (ok, _) = symmetry::is_invariant_star(k, &group, 64, tol);
    if !ok {
        return Err(GeometryError::NotInvariant);
    }
    let (alpha, frame): (f64, Vec<Vector>) = match spec.family {
        Family::ODiamond | Family::SoDiamond => {
            (0.0, (0..n - 1).map(|i| geometry::unit(n, i)).collect())
        }
        Family::OSimplex | Family::SoSimplex => {
            let v = geometry::simplex_vertices(n)?;
            (-1.0 / n as f64, v[..n - 1].to_vec())
        }
    };
    let body = k.dilate(1.0 / k.radial(&frame[0])?);

    let mut values = Vec::with_capacity(n - 1);
    for level in 1..n {
        let primal = cone_volume(&body, &frame[..level], tol)?;
        let (polar, _) = lambda_image_cone_volume(&body, &frame[..level], tol)?;
        values.push(primal * polar);
    }
    let mut factors = Vec::new();
    let mut recursion_pass = Vec::new();
    let mut chained = values[0];
    for level in 2..n {
        let f = bf_factor(alpha, level);
        factors.push(f);
        recursion_pass.push(values[level - 1] >= f * values[level - 2] - tol.tol_quad);
        chained *= f;
    }
    Ok(IkChain {
        alpha,
        values,
        factors,
        recursion_pass,
        chained_bound: chained,
    })
}
