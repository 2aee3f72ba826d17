//! Symplectic capacities of Lagrangian products `K × T` and the chain of
//! inequalities deriving the systolic (Viterbo-type) bound from the sharp
//! volume-product bound.

use crate::geometry::Vector;
use crate::mahler::{self, BoundKind};
use crate::polytope::{self, VPolytope};
use crate::starbody::{polar_volume, volume_star, SphereQuadrature, StarBody};
use crate::symmetry::{self, Family, GroupSpec};
use crate::tolerance::Tolerances;
use crate::{GeometryError, Matrix, Result};

/// Capacity and systolic-ratio data of one Lagrangian product `K × T`.
#[derive(Debug, Clone)]
pub struct CapacityReport {
    pub inradius: f64,
    pub c_hz: f64,
    pub volume: f64,
    pub viterbo_lhs: f64,
    pub viterbo_rhs: f64,
    pub pass: bool,
}

/// One link of the implication chain, with its numeric slack `rhs − lhs`
/// for inequalities written as `lhs ≤ rhs`.
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

/// A class of bodies for which the sharp symmetric volume-product bound is
/// an established theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MahlerClass {
    /// n ≤ 3: the bound is known for every symmetric body.
    LowDimension,
    /// Invariant under all coordinate sign changes.
    Unconditional,
    /// SO(◊ⁿ)-invariant with n even.
    SoDiamondEven,
}

#[derive(Debug, Clone)]
pub struct ViterboChain {
    pub class: MahlerClass,
    pub links: Vec<ChainLink>,
}

fn require_symmetric(p: &VPolytope, tol: &Tolerances) -> Result<()> {
    if !polytope::is_centrally_symmetric(p, tol) {
        return Err(GeometryError::NotCentrallySymmetric);
    }
    Ok(())
}

fn capacity_report(inradius: f64, vol_k: f64, vol_t: f64, n: usize) -> CapacityReport {
    let c_hz = 4.0 * inradius;
    let volume = vol_k * vol_t;
    let lhs = c_hz.powi(n as i32);
    let rhs = mahler::factorial(n) * volume;
    CapacityReport {
        inradius,
        c_hz,
        volume,
        viterbo_lhs: lhs,
        viterbo_rhs: rhs,
        pass: lhs <= rhs + 1e-9 * rhs.abs().max(1.0),
    }
}

/// `c_HZ(K × T) = 4·inrad_{T°}(K)` for centrally symmetric `K, T`,
/// exact polytope path.
pub fn chz_lagrangian(k: &VPolytope, t: &VPolytope, tol: &Tolerances) -> Result<CapacityReport> {
    require_symmetric(k, tol)?;
    require_symmetric(t, tol)?;
    let n = k.dim;
    let t_polar = polytope::polar_dual(t, &Vector::zeros(n), tol)?;
    let inradius = polytope::inradius_gauge(k, &t_polar, tol)?;
    let vol_k = polytope::volume(k, tol)?;
    let vol_t = polytope::volume(t, tol)?;
    Ok(capacity_report(inradius, vol_k, vol_t, n))
}

/// The same check: the Viterbo-form comparison `(4·inrad)ⁿ ≤ n!·|K|·|T|`.
pub fn viterbo_check(k: &VPolytope, t: &VPolytope, tol: &Tolerances) -> Result<CapacityReport> {
    chz_lagrangian(k, t, tol)
}

/// Quadrature-path variant for smooth bodies:
/// `inrad_{T°}(K) = min_u h_K(u)·ρ_T(u)` since `h_{T°} = μ_T`.
pub fn chz_lagrangian_star(
    k: &StarBody,
    t: &StarBody,
    quad: &SphereQuadrature,
    tol: &Tolerances,
) -> Result<CapacityReport> {
    let n = k.dim();
    for (body, name) in [(k, "K"), (t, "T")] {
        let (sym, _) = is_symmetric_star(body, tol);
        if !sym {
            let _ = name;
            return Err(GeometryError::NotCentrallySymmetric);
        }
    }
    let mut inradius = f64::INFINITY;
    for u in &quad.nodes {
        inradius = inradius.min(k.support(u, tol)? * t.radial_unit(u));
    }
    let vol_k = volume_star(k, quad);
    let vol_t = volume_star(t, quad);
    let _ = polar_volume(k, quad, tol)?; // sanity: o interior on the support path
    Ok(capacity_report(inradius, vol_k, vol_t, n))
}

fn is_symmetric_star(k: &StarBody, _tol: &Tolerances) -> (bool, f64) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xA5);
    let mut residual: f64 = 0.0;
    for _ in 0..128 {
        let u = symmetry::random_unit(&mut rng, k.dim());
        residual = residual.max((k.radial_unit(&u) - k.radial_unit(&(-&u))).abs());
    }
    (residual <= 1e-9, residual)
}

/// Decides which established Mahler class covers `K`, or reports
/// [`GeometryError::HypothesisNotCovered`].
pub fn classify_mahler(k: &VPolytope, tol: &Tolerances) -> Result<MahlerClass> {
    let n = k.dim;
    if n <= 3 {
        return Ok(MahlerClass::LowDimension);
    }
    if is_unconditional(k, tol) {
        return Ok(MahlerClass::Unconditional);
    }
    let spec = GroupSpec::new(Family::SoDiamond, n)?;
    let group = symmetry::generate(spec, tol)?;
    let (invariant, _) = symmetry::is_invariant_polytope(k, &group, tol);
    if invariant && n % 2 == 0 {
        return Ok(MahlerClass::SoDiamondEven);
    }
    // Odd n with only rotational diamond symmetry is exactly the open case.
    Err(GeometryError::HypothesisNotCovered)
}

/// Invariance under every single-axis sign flip.
pub fn is_unconditional(k: &VPolytope, tol: &Tolerances) -> bool {
    let n = k.dim;
    (0..n).all(|axis| {
        let flipped: Vec<Vector> = k
            .vertices
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w[axis] = -w[axis];
                w
            })
            .collect();
        polytope::point_set_distance(&k.vertices, &flipped) <= tol.tol_geom
    })
}

/// The full implication chain for `K × T`:
/// (i) `|K°| ≤ inrad^{−n}·|T|`; (ii) `4ⁿ/n! ≤ |K||K°|`;
/// (iii) therefore `(4·inrad)ⁿ ≤ n!·|K|·|T|`.
///
/// `claimed` may assert the Mahler class when the caller knows it; `None`
/// runs the numeric classification. Either way the odd-dimension rotational
/// diamond case yields [`GeometryError::HypothesisNotCovered`].
pub fn mahler_implies_viterbo_chain(
    k: &VPolytope,
    t: &VPolytope,
    claimed: Option<MahlerClass>,
    tol: &Tolerances,
) -> Result<ViterboChain> {
    require_symmetric(k, tol)?;
    require_symmetric(t, tol)?;
    let n = k.dim;
    let class = match claimed {
        Some(c) => {
            if c == MahlerClass::LowDimension && n > 3 {
                return Err(GeometryError::HypothesisNotCovered);
            }
            c
        }
        None => classify_mahler(k, tol)?,
    };
    if class == MahlerClass::SoDiamondEven && n % 2 == 1 {
        return Err(GeometryError::HypothesisNotCovered);
    }

    let t_polar = polytope::polar_dual(t, &Vector::zeros(n), tol)?;
    let inradius = polytope::inradius_gauge(k, &t_polar, tol)?;
    let k_polar = polytope::polar_dual(k, &Vector::zeros(n), tol)?;
    let vol_k = polytope::volume(k, tol)?;
    let vol_t = polytope::volume(t, tol)?;
    let vol_k_polar = polytope::volume(&k_polar, tol)?;

    let mut links = Vec::new();
    let mut push = |name, lhs: f64, rhs: f64| {
        links.push(ChainLink {
            name,
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs + 1e-9 * rhs.abs().max(1.0),
        });
    };
    push(
        "eq-d",
        vol_k_polar,
        inradius.powi(-(n as i32)) * vol_t,
    );
    push(
        "mahler-bound",
        mahler::mahler_bound(n, BoundKind::Symmetric),
        vol_k * vol_k_polar,
    );
    push(
        "viterbo",
        (4.0 * inradius).powi(n as i32),
        mahler::factorial(n) * vol_k * vol_t,
    );
    Ok(ViterboChain { class, links })
}

/// A regular polygon approximation of the planar disk, used by tests and the
/// CLI's smooth fixtures on the exact path.
pub fn regular_polygon(sides: usize) -> VPolytope {
    let verts = (0..sides)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / sides as f64;
            crate::geometry::vec_from(&[a.cos(), a.sin()])
        })
        .collect();
    VPolytope::new(verts)
}

#[allow(dead_code)]
fn linear_image(p: &VPolytope, m: &Matrix) -> VPolytope {
    VPolytope::new(p.vertices.iter().map(|v| m * v).collect())
}
