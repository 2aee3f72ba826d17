//! Discrete symmetry groups of the cross-polytope and the regular simplex as
//! explicit orthogonal matrices, plus orbit machinery, invariance checks and
//! seeded invariant test-body generation.

use itertools::Itertools;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{self, Matrix, Vector};
use crate::polytope::{self, VPolytope};
use crate::starbody::StarBody;
use crate::tolerance::Tolerances;
use crate::{GeometryError, Result};

/// Full enumeration is refused above this group order.
const ORDER_CAP: usize = 1_000_000;

/// The four supported group families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `O(△ⁿ)` ≅ symmetric group of degree n+1.
    OSimplex,
    /// `SO(△ⁿ)` ≅ alternating group of degree n+1.
    SoSimplex,
    /// `O(◊ⁿ)`: all signed permutation matrices, order `2ⁿ·n!`.
    ODiamond,
    /// `SO(◊ⁿ)`: signed permutations of determinant +1, order `2ⁿ⁻¹·n!`.
    SoDiamond,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSpec {
    pub family: Family,
    pub dim: usize,
}

impl GroupSpec {
    pub fn new(family: Family, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(GeometryError::InvalidArgument(
                "group dimension must be at least 2".into(),
            ));
        }
        Ok(GroupSpec { family, dim })
    }

    /// Expected group order.
    pub fn order(&self) -> usize {
        let n = self.dim;
        let fact = |m: usize| (1..=m).product::<usize>();
        match self.family {
            Family::OSimplex => fact(n + 1),
            Family::SoSimplex => fact(n + 1) / 2,
            Family::ODiamond => (1 << n) * fact(n),
            Family::SoDiamond => (1 << (n - 1)) * fact(n),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "o-simplex" => Ok(Family::OSimplex),
            "so-simplex" => Ok(Family::SoSimplex),
            "o-diamond" => Ok(Family::ODiamond),
            "so-diamond" => Ok(Family::SoDiamond),
            other => Err(GeometryError::InvalidArgument(format!(
                "unknown group family '{other}' (expected o-simplex, so-simplex, o-diamond or so-diamond)"
            ))),
        }
    }
}

/// A fully enumerated matrix group.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    pub spec: GroupSpec,
    /// All elements with their determinant sign.
    pub elements: Vec<(Matrix, f64)>,
    /// A small generating subsequence (indices into `elements`).
    pub generators: Vec<usize>,
}

/// The orthogonal matrix mapping simplex vertex `v_i` to `v_{σ(i)}`.
///
/// Uses the tight-frame identity `Σ v_i v_iᵀ = ((n+1)/n)·I`, so
/// `R = (n/(n+1)) · V_σ Vᵀ` fits all n+1 vertex constraints at once.
pub fn permutation_to_matrix(vertices: &[Vector], sigma: &[usize]) -> Result<Matrix> {
    let n = vertices[0].len();
    if vertices.len() != n + 1 || sigma.len() != n + 1 {
        return Err(GeometryError::InvalidArgument(
            "need n+1 simplex vertices and a permutation of them".into(),
        ));
    }
    let mut r = Matrix::zeros(n, n);
    for (i, &si) in sigma.iter().enumerate() {
        r += &vertices[si] * vertices[i].transpose();
    }
    Ok(r * (n as f64 / (n + 1) as f64))
}

fn permutation_sign(sigma: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1.0 } else { -1.0 }
}

/// Enumerates the group as explicit matrices.
pub fn generate(spec: GroupSpec, tol: &Tolerances) -> Result<SymmetryGroup> {
    if spec.order() > ORDER_CAP {
        return Err(GeometryError::TooLarge);
    }
    let n = spec.dim;
    let mut elements: Vec<(Matrix, f64)> = Vec::with_capacity(spec.order());
    match spec.family {
        Family::OSimplex | Family::SoSimplex => {
            let even_only = spec.family == Family::SoSimplex;
            let verts = geometry::simplex_vertices(n)?;
            for sigma in (0..=n).permutations(n + 1) {
                let sign = permutation_sign(&sigma);
                if even_only && sign < 0.0 {
                    continue;
                }
                elements.push((permutation_to_matrix(&verts, &sigma)?, sign));
            }
        }
        Family::ODiamond | Family::SoDiamond => {
            let det_one_only = spec.family == Family::SoDiamond;
            for perm in (0..n).permutations(n) {
                let psign = permutation_sign(&perm);
                for mask in 0..(1u32 << n) {
                    let flips = mask.count_ones() as usize;
                    let det = psign * if flips % 2 == 0 { 1.0 } else { -1.0 };
                    if det_one_only && det < 0.0 {
                        continue;
                    }
                    let mut m = Matrix::zeros(n, n);
                    for (col, &row) in perm.iter().enumerate() {
                        m[(row, col)] = if mask >> col & 1 == 1 { -1.0 } else { 1.0 };
                    }
                    elements.push((m, det));
                }
            }
        }
    }
    debug_assert_eq!(elements.len(), spec.order());
    for (m, det) in &elements {
        if geometry::orthogonality_residual(m) > tol.tol_orth {
            return Err(GeometryError::InvalidArgument(
                "generated element fails the orthogonality tolerance".into(),
            ));
        }
        debug_assert!((geometry::determinant(m) - det).abs() < 1e-6);
    }
    // Convenience generating subsequence: a couple of small non-identity
    // elements. Correctness-critical sweeps always use the full element list.
    let identity = Matrix::identity(n, n);
    let generators = elements
        .iter()
        .enumerate()
        .filter(|(_, (m, _))| (m - &identity).amax() > 0.5)
        .map(|(i, _)| i)
        .take(3)
        .collect();
    Ok(SymmetryGroup {
        spec,
        elements,
        generators,
    })
}

impl SymmetryGroup {
    /// Whether `−Id` is an element.
    pub fn contains_minus_identity(&self) -> bool {
        let n = self.spec.dim;
        let minus = -Matrix::identity(n, n);
        self.elements.iter().any(|(m, _)| (m - &minus).amax() < 1e-9)
    }
}

/// Invariance of a polytope: the largest Hausdorff distance between the
/// vertex set and its image under any group element.
pub fn polytope_invariance_residual(p: &VPolytope, group: &SymmetryGroup) -> f64 {
    let mut worst: f64 = 0.0;
    for (g, _) in &group.elements {
        let image: Vec<Vector> = p.vertices.iter().map(|v| g * v).collect();
        worst = worst.max(polytope::point_set_distance(&image, &p.vertices));
    }
    worst
}

/// Invariance check for a polytope body.
pub fn is_invariant_polytope(p: &VPolytope, group: &SymmetryGroup, tol: &Tolerances) -> (bool, f64) {
    let r = polytope_invariance_residual(p, group);
    (r <= tol.tol_geom, r)
}

/// Invariance check for a star body: max over sampled directions and all
/// elements of `|ρ(gu) − ρ(u)|`.
pub fn is_invariant_star(
    k: &StarBody,
    group: &SymmetryGroup,
    samples: usize,
    tol: &Tolerances,
) -> (bool, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5741);
    let n = k.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = random_unit(&mut rng, n);
        let r = k.radial_unit(&u);
        for (g, _) in &group.elements {
            worst = worst.max((k.radial_unit(&(g * &u)) - r).abs());
        }
    }
    (worst <= tol.tol_geom * 10.0, worst)
}

/// Hull of the orbit of the given points under the full group.
pub fn orbit_hull(points: &[Vector], group: &SymmetryGroup, tol: &Tolerances) -> Result<VPolytope> {
    let mut orbit = Vec::with_capacity(points.len() * group.elements.len());
    for p in points {
        for (g, _) in &group.elements {
            orbit.push(g * p);
        }
    }
    let (vp, _) = polytope::convex_hull(&orbit, tol)?;
    Ok(vp)
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let v = Vector::from_iterator(n, (0..n).map(|_| {
            let x: f64 = rng.sample(rand_distr_standard_normal());
            x
        }));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

// Box-Muller standard normal; keeps the RNG stream stable across rand
// versions.
fn rand_distr_standard_normal() -> impl rand::distributions::Distribution<f64> {
    struct BoxMuller;
    impl rand::distributions::Distribution<f64> for BoxMuller {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        }
    }
    BoxMuller
}

/// Seeded random invariant polytope: the orbit hull of `generators_count`
/// random points with norms in [0.5, 1.5]. Deterministic given the seed.
pub fn random_invariant_body(
    group: &SymmetryGroup,
    seed: u64,
    generators_count: usize,
    tol: &Tolerances,
) -> Result<VPolytope> {
    if generators_count < 1 {
        return Err(GeometryError::InvalidArgument(
            "generators_count must be at least 1".into(),
        ));
    }
    let n = group.spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..10 {
        let points: Vec<Vector> = (0..generators_count)
            .map(|_| {
                let u = random_unit(&mut rng, n);
                let r: f64 = rng.gen_range(0.5..1.5);
                u * r
            })
            .collect();
        match orbit_hull(&points, group, tol) {
            Ok(p) => return Ok(p),
            Err(GeometryError::DegenerateInput) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GeometryError::DegenerateInput)
}

/// Max equivariance residual `‖gΛ(x) − Λ(gx)‖` over sampled boundary points
/// and all group elements.
pub fn check_equivariance(
    k: &StarBody,
    group: &SymmetryGroup,
    samples: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let n = k.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c41);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = random_unit(&mut rng, n);
        let x = &u * k.radial_unit(&u);
        let lx = k.lambda_map(&x, tol)?;
        for (g, _) in &group.elements {
            let gx = g * &x;
            let lgx = k.lambda_map(&gx, tol)?;
            worst = worst.max((g * &lx - lgx).norm());
        }
    }
    Ok(worst)
}
