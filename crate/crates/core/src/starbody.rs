//! Smooth convex bodies represented by their radial function: ℓ_p balls,
//! group-invariant radial perturbations and polytope-backed star bodies.
//! Houses the radial and gauge evaluators, the boundary-to-polar-boundary
//! map Λ (the gauge gradient), support functions and sphere-quadrature
//! volumes.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{orthonormal_span, Vector};
use crate::polytope::{self, VPolytope};
use crate::symmetry::{random_unit, SymmetryGroup};
use crate::tolerance::Tolerances;
use crate::{GeometryError, Result};

/// One term `c · (u·d)^m` of a group-averaged perturbation profile.
#[derive(Debug, Clone)]
pub struct ProfileTerm {
    pub direction: Vector,
    pub power: u32,
    pub coeff: f64,
}

#[derive(Debug, Clone)]
pub enum BodyKind {
    /// Unit ball of `‖·‖_p`, 1 < p < ∞.
    LpBall { p: f64 },
    /// `ρ(u) = ρ_base(u)·(1 + ε·f(u))` with a group-averaged smooth profile f.
    Perturbed {
        base: Box<StarBody>,
        eps: f64,
        profile: Vec<ProfileTerm>,
    },
    /// Radial evaluator backed by an exact polytope. Valid everywhere except
    /// the gauge gradient (not smooth across ridges).
    PolytopeBacked {
        vertices: Vec<Vector>,
        facets: Vec<(Vector, f64)>,
    },
}

/// A star-shaped (here: convex) body given by a positive radial function,
/// with a global dilation factor.
#[derive(Debug, Clone)]
pub struct StarBody {
    dim: usize,
    scale: f64,
    kind: BodyKind,
}

impl StarBody {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    /// The Euclidean unit ball.
    pub fn ball(dim: usize) -> Self {
        Self::lp_ball(dim, 2.0).expect("p = 2 is always valid")
    }

    pub fn lp_ball(dim: usize, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(GeometryError::InvalidArgument(
                "lp ball requires 1 < p < inf".into(),
            ));
        }
        Ok(StarBody {
            dim,
            scale: 1.0,
            kind: BodyKind::LpBall { p },
        })
    }

    /// Star body over an exact polytope with the origin interior.
    pub fn from_polytope(p: &VPolytope, tol: &Tolerances) -> Result<Self> {
        let (vp, fc) = polytope::convex_hull(&p.vertices, tol)?;
        let facets: Vec<(Vector, f64)> = fc
            .facets
            .iter()
            .map(|f| (f.normal.clone(), f.offset))
            .collect();
        if facets.iter().any(|(_, b)| *b <= tol.tol_geom) {
            return Err(GeometryError::OriginNotInterior);
        }
        Ok(StarBody {
            dim: vp.dim,
            scale: 1.0,
            kind: BodyKind::PolytopeBacked {
                vertices: vp.vertices,
                facets,
            },
        })
    }

    pub fn is_smooth(&self) -> bool {
        match &self.kind {
            BodyKind::LpBall { .. } => true,
            BodyKind::Perturbed { base, .. } => base.is_smooth(),
            BodyKind::PolytopeBacked { .. } => false,
        }
    }

    /// Dilate by λ > 0.
    pub fn dilate(&self, lambda: f64) -> Self {
        StarBody {
            dim: self.dim,
            scale: self.scale * lambda,
            kind: self.kind.clone(),
        }
    }

    /// Radial function on the unit sphere.
    pub fn radial_unit(&self, u: &Vector) -> f64 {
        self.scale * kind_radial_unit(&self.kind, u)
    }

    /// Radial function `ρ(x) = max{λ ≥ 0 : λx ∈ K}` for any x ≠ 0.
    pub fn radial(&self, x: &Vector) -> Result<f64> {
        let norm = x.norm();
        if norm == 0.0 {
            return Err(GeometryError::ZeroVector);
        }
        Ok(self.radial_unit(&(x / norm)) / norm)
    }

    /// Gauge function `μ = 1/ρ`.
    pub fn gauge(&self, x: &Vector) -> Result<f64> {
        Ok(1.0 / self.radial(x)?)
    }

    /// The boundary point in direction `u`.
    pub fn boundary_point(&self, u: &Vector) -> Result<Vector> {
        Ok(u * self.radial(u)?)
    }

    /// Gauge gradient `Λ(x) = ∇μ(x)` at a boundary point; maps ∂K → ∂K°.
    ///
    /// Analytic for ℓ_p balls, central finite differences on the gauge
    /// otherwise. Refuses polytope-backed bodies.
    pub fn lambda_map(&self, x: &Vector, tol: &Tolerances) -> Result<Vector> {
        if !self.is_smooth() {
            return Err(GeometryError::NonSmoothKind);
        }
        let mu = self.gauge(x)?;
        if (mu - 1.0).abs() > tol.tol_quad * 10.0 {
            return Err(GeometryError::NotOnBoundary);
        }
        if let BodyKind::LpBall { p } = self.kind {
            // μ(x) = ‖x‖_p / scale; ∇μ_i = sign(x_i)|x_i|^{p−1} / (s·‖x‖_p^{p−1}).
            let norm_p = x.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p);
            let denom = self.scale * norm_p.powf(p - 1.0);
            return Ok(Vector::from_iterator(
                self.dim,
                x.iter().map(|&c| c.signum() * c.abs().powf(p - 1.0) / denom),
            ));
        }
        let h = 1e-5;
        let mut grad = Vector::zeros(self.dim);
        for i in 0..self.dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            grad[i] = (self.gauge(&xp)? - self.gauge(&xm)?) / (2.0 * h);
        }
        Ok(grad)
    }

    /// Support function `h(y) = max_{x ∈ K} x·y`.
    ///
    /// Analytic for ℓ_p balls (Hölder-dual norm) and polytope-backed bodies
    /// (vertex maximum); coarse scan plus spherical hill climbing otherwise.
    pub fn support(&self, y: &Vector, tol: &Tolerances) -> Result<f64> {
        if y.norm() == 0.0 {
            return Err(GeometryError::ZeroVector);
        }
        match &self.kind {
            BodyKind::LpBall { p } => {
                let q = p / (p - 1.0);
                Ok(self.scale * y.iter().map(|c| c.abs().powf(q)).sum::<f64>().powf(1.0 / q))
            }
            BodyKind::PolytopeBacked { vertices, .. } => Ok(self.scale
                * vertices
                    .iter()
                    .map(|v| v.dot(y))
                    .fold(f64::NEG_INFINITY, f64::max)),
            BodyKind::Perturbed { .. } => Ok(self.support_numeric(y, tol)),
        }
    }

    /// Radial function of the polar body, `ρ_{K°}(u) = 1/h_K(u)`.
    pub fn polar_radial_unit(&self, u: &Vector, tol: &Tolerances) -> Result<f64> {
        Ok(1.0 / self.support(u, tol)?)
    }

    fn support_numeric(&self, y: &Vector, _tol: &Tolerances) -> f64 {
        let value = |u: &Vector| self.radial_unit(u) * u.dot(y);
        // The perturbed bodies this path serves are near their base, so the
        // direction of y is a good start; a short deterministic scan guards
        // against a wrong basin.
        let mut best_u = y.normalize();
        let mut best = value(&best_u);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5355_5050);
        for _ in 0..64 {
            let u = random_unit(&mut rng, self.dim);
            let v = value(&u);
            if v > best {
                best = v;
                best_u = u;
            }
        }
        // Hill climbing on the sphere with a shrinking step.
        let mut step = 0.2;
        while step > 1e-8 {
            let tangent = tangent_basis(&best_u);
            let mut improved = false;
            for t in &tangent {
                for s in [step, -step] {
                    let cand = (&best_u + t * s).normalize();
                    let v = value(&cand);
                    if v > best {
                        best = v;
                        best_u = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best
    }
}

fn kind_radial_unit(kind: &BodyKind, u: &Vector) -> f64 {
    match kind {
        BodyKind::LpBall { p } => {
            1.0 / u.iter().map(|c| c.abs().powf(*p)).sum::<f64>().powf(1.0 / p)
        }
        BodyKind::Perturbed { base, eps, profile } => {
            let f: f64 = profile
                .iter()
                .map(|t| t.coeff * t.direction.dot(u).powi(t.power as i32))
                .sum();
            base.radial_unit(u) * (1.0 + eps * f)
        }
        BodyKind::PolytopeBacked { facets, .. } => {
            let m = facets
                .iter()
                .map(|(a, b)| a.dot(u) / b)
                .fold(f64::NEG_INFINITY, f64::max);
            1.0 / m
        }
    }
}

fn tangent_basis(u: &Vector) -> Vec<Vector> {
    let n = u.len();
    let mut vecs = vec![u.clone()];
    for i in 0..n {
        vecs.push(crate::geometry::unit(n, i));
    }
    let basis = orthonormal_span(&vecs, 1e-9);
    basis.into_iter().skip(1).collect()
}

/// A quadrature rule on the unit sphere `S^{n−1}`: weights sum to the sphere
/// surface area and the node set is antipodally symmetric.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub nodes: Vec<Vector>,
    pub weights: Vec<f64>,
}

impl SphereQuadrature {
    /// Default rule for the dimension: uniform angles for n = 2, product
    /// Gauss–Legendre × uniform azimuth for n = 3, antipodally symmetrized
    /// Monte Carlo with a fixed seed for n ≥ 4.
    pub fn new(dim: usize, tol: &Tolerances) -> Result<Self> {
        match dim {
            0 | 1 => Err(GeometryError::InvalidArgument(
                "sphere quadrature needs dimension >= 2".into(),
            )),
            2 => {
                let m = 512usize;
                let w = std::f64::consts::TAU / m as f64;
                let nodes = (0..m)
                    .map(|i| {
                        let a = std::f64::consts::TAU * i as f64 / m as f64;
                        crate::geometry::vec_from(&[a.cos(), a.sin()])
                    })
                    .collect();
                Ok(SphereQuadrature {
                    nodes,
                    weights: vec![w; m],
                })
            }
            3 => {
                let n_theta = 64usize;
                let n_phi = 128usize;
                let (gl_nodes, gl_weights) = gauss_legendre(n_theta);
                let mut nodes = Vec::with_capacity(n_theta * n_phi);
                let mut weights = Vec::with_capacity(n_theta * n_phi);
                let wphi = std::f64::consts::TAU / n_phi as f64;
                for (ct, wt) in gl_nodes.iter().zip(&gl_weights) {
                    let st = (1.0 - ct * ct).sqrt();
                    for j in 0..n_phi {
                        let phi = std::f64::consts::TAU * (j as f64 + 0.5) / n_phi as f64;
                        nodes.push(crate::geometry::vec_from(&[
                            st * phi.cos(),
                            st * phi.sin(),
                            *ct,
                        ]));
                        weights.push(wt * wphi);
                    }
                }
                Ok(SphereQuadrature { nodes, weights })
            }
            n => {
                let m = tol.mc_samples.max(2) / 2 * 2;
                let area = sphere_area(n);
                let w = area / m as f64;
                let mut rng = ChaCha8Rng::seed_from_u64(0x53504852);
                let mut nodes = Vec::with_capacity(m);
                for _ in 0..m / 2 {
                    let u = random_unit(&mut rng, n);
                    nodes.push(u.clone());
                    nodes.push(-u);
                }
                Ok(SphereQuadrature {
                    nodes,
                    weights: vec![w; m],
                })
            }
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Surface area of `S^{n−1}`: `2 π^{n/2} / Γ(n/2)`, with the half-integer
/// gamma values computed by recursion.
pub fn sphere_area(n: usize) -> f64 {
    let gamma_half = |twice: usize| -> f64 {
        // Γ(twice / 2)
        let mut x = twice as f64 / 2.0;
        let mut acc = 1.0;
        while x > 1.0 + 1e-12 {
            x -= 1.0;
            acc *= x;
        }
        if (x - 0.5).abs() < 1e-12 {
            acc * std::f64::consts::PI.sqrt()
        } else {
            acc
        }
    };
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        // Chebyshev-flavored initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(m, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `|K| = (1/n) ∫_{S^{n−1}} ρ_K(u)ⁿ du`.
pub fn volume_star(k: &StarBody, quad: &SphereQuadrature) -> f64 {
    let n = k.dim() as f64;
    let sum: f64 = quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(u, w)| w * k.radial_unit(u).powf(n))
        .sum();
    sum / n
}

/// `|K°| = (1/n) ∫ h_K(u)^{−n} du`, valid because `ρ_{K°} = 1/h_K`.
pub fn polar_volume(k: &StarBody, quad: &SphereQuadrature, tol: &Tolerances) -> Result<f64> {
    let n = k.dim() as f64;
    let mut sum = 0.0;
    for (u, w) in quad.nodes.iter().zip(&quad.weights) {
        let h = k.support(u, tol)?;
        if h <= 0.0 {
            return Err(GeometryError::OriginNotInterior);
        }
        sum += w * h.powf(-n);
    }
    Ok(sum / n)
}

/// Builds a smooth G-invariant perturbation of `base`:
/// `ρ(u) = ρ_base(u)·(1 + ε f(u))` with `f` an orbit-averaged sum of a few
/// polynomial bumps. The result is G-invariant by construction; convexity is
/// asserted by a sampled gauge-midpoint check and [`GeometryError::ConvexityLost`]
/// is returned when it fails.
pub fn perturbed_invariant_body(
    base: &StarBody,
    group: &SymmetryGroup,
    eps: f64,
    seed: u64,
    tol: &Tolerances,
) -> Result<StarBody> {
    if eps == 0.0 {
        return Ok(base.clone());
    }
    let n = base.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps = 3usize;
    let mut raw: Vec<(Vector, u32, f64)> = Vec::new();
    let mut coeff_sum = 0.0;
    for _ in 0..bumps {
        let d = random_unit(&mut rng, n);
        // Even powers ≥ 4: odd powers can average to zero under groups that
        // admit no odd invariants, and quadratics average to a constant.
        let power = *[4u32, 6].choose(&mut rng).unwrap();
        let c: f64 = rng.gen_range(-1.0..1.0);
        coeff_sum += c.abs();
        raw.push((d, power, c));
    }
    // Expand the orbit average into explicit terms:
    // (1/|G|) Σ_g c (gu·d)^m = Σ_g (c/|G|) (u·gᵀd)^m.
    let gsize = group.elements.len() as f64;
    let mut profile = Vec::with_capacity(raw.len() * group.elements.len());
    for (d, power, c) in raw {
        for (g, _) in &group.elements {
            profile.push(ProfileTerm {
                direction: g.transpose() * &d,
                power,
                coeff: c / (coeff_sum * gsize),
            });
        }
    }
    let body = StarBody {
        dim: n,
        scale: base.scale,
        kind: BodyKind::Perturbed {
            base: Box::new(base.clone()),
            eps,
            profile,
        },
    };
    // Sampled convexity: midpoint convexity of the gauge on random pairs.
    let mut check_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0);
    for _ in 0..10_000 {
        let x = random_unit(&mut check_rng, n);
        let y = random_unit(&mut check_rng, n);
        let mid = (&x + &y) * 0.5;
        if mid.norm() < 1e-6 {
            continue;
        }
        // The radial must stay positive for the gauge to mean anything.
        if body.radial_unit(&x) <= tol.tol_geom || body.radial_unit(&y) <= tol.tol_geom {
            return Err(GeometryError::ConvexityLost);
        }
        let lhs = body.gauge(&mid)?;
        let rhs = 0.5 * (body.gauge(&x)? + body.gauge(&y)?);
        if lhs > rhs + 10.0 * tol.tol_geom {
            return Err(GeometryError::ConvexityLost);
        }
    }
    Ok(body)
}
