//! Body ingestion: built-in named bodies and JSON body-spec files.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use mahler_core::geometry::vec_from;
use mahler_core::polytope::{self, HPolytope, VPolytope};
use mahler_core::starbody::{perturbed_invariant_body, StarBody};
use mahler_core::symmetry::{self, GroupSpec};
use mahler_core::tolerance::Tolerances;
use mahler_core::Vector;

/// A loaded body, on either the exact polytope path or the quadrature path.
pub enum Body {
    Poly(VPolytope),
    Star(StarBody),
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::Poly(p) => p.dim,
            Body::Star(s) => s.dim(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Body::Poly(p) => format!("vpolytope({} vertices, dim {})", p.vertices.len(), p.dim),
            Body::Star(s) => format!("star body(dim {})", s.dim()),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BodySpecFile {
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Hpolytope {
        halfspaces: Vec<HalfspaceSpec>,
        dim: usize,
    },
    LpBall {
        p: f64,
        dim: usize,
    },
    Perturbed {
        base: Box<BodySpecFile>,
        eps: f64,
        group: String,
        dim: usize,
        #[serde(default)]
        seed: u64,
    },
    OrbitHull {
        points: Vec<Vec<f64>>,
        group: String,
        dim: usize,
    },
}

#[derive(Deserialize)]
struct HalfspaceSpec {
    normal: Vec<f64>,
    offset: f64,
}

pub fn parse_group(s: &str, dim: usize) -> Result<GroupSpec> {
    let family = s
        .parse()
        .map_err(|_| anyhow!("unknown group family {s:?} (expected o-simplex, so-simplex, o-diamond or so-diamond)"))?;
    GroupSpec::new(family, dim).map_err(|e| anyhow!("bad group spec: {e}"))
}

fn build(spec: BodySpecFile, tol: &Tolerances) -> Result<Body> {
    match spec {
        BodySpecFile::Vpolytope { vertices } => {
            if vertices.is_empty() {
                bail!("vpolytope needs at least one vertex");
            }
            let dim = vertices[0].len();
            if vertices.iter().any(|v| v.len() != dim) {
                bail!("inconsistent vertex dimensions");
            }
            Ok(Body::Poly(VPolytope::new(
                vertices.iter().map(|v| vec_from(v)).collect(),
            )))
        }
        BodySpecFile::Hpolytope { halfspaces, dim } => {
            let hs: Vec<(Vector, f64)> = halfspaces
                .into_iter()
                .map(|h| {
                    if h.normal.len() != dim {
                        bail!("halfspace normal has wrong dimension");
                    }
                    Ok((vec_from(&h.normal), h.offset))
                })
                .collect::<Result<_>>()?;
            let p = polytope::h_to_v(&HPolytope {
                halfspaces: hs,
                dim,
            }, tol)
            .map_err(|e| anyhow!("halfspace system is not a bounded full body: {e}"))?;
            Ok(Body::Poly(p))
        }
        BodySpecFile::LpBall { p, dim } => Ok(Body::Star(
            StarBody::lp_ball(dim, p).map_err(|e| anyhow!("{e}"))?,
        )),
        BodySpecFile::Perturbed {
            base,
            eps,
            group,
            dim,
            seed,
        } => {
            let base_body = match build(*base, tol)? {
                Body::Star(s) => s,
                Body::Poly(_) => bail!("perturbed bodies need a smooth base"),
            };
            if base_body.dim() != dim {
                bail!("base dimension does not match the perturbed spec");
            }
            let g = symmetry::generate(parse_group(&group, dim)?, tol)
                .map_err(|e| anyhow!("{e}"))?;
            let body = perturbed_invariant_body(&base_body, &g, eps, seed, tol)
                .map_err(|e| anyhow!("perturbation failed: {e}"))?;
            Ok(Body::Star(body))
        }
        BodySpecFile::OrbitHull { points, group, dim } => {
            let g = symmetry::generate(parse_group(&group, dim)?, tol)
                .map_err(|e| anyhow!("{e}"))?;
            let pts: Vec<Vector> = points.iter().map(|v| vec_from(v)).collect();
            if pts.iter().any(|v| v.len() != dim) {
                bail!("orbit point has wrong dimension");
            }
            let p = symmetry::orbit_hull(&pts, &g, tol).map_err(|e| anyhow!("{e}"))?;
            Ok(Body::Poly(p))
        }
    }
}

/// Resolves a `--body` argument: a built-in name (`cube`, `cross`, `simplex`,
/// `ball`, `lp:p`, optionally dimensioned like `cube` with `--dim`) or a path
/// to a JSON body-spec file.
pub fn load(arg: &str, dim: usize, tol: &Tolerances) -> Result<Body> {
    match arg {
        "cube" => return Ok(Body::Poly(polytope::cube(dim))),
        "cross" => return Ok(Body::Poly(polytope::cross_polytope(dim))),
        "simplex" => {
            return Ok(Body::Poly(
                polytope::simplex(dim).map_err(|e| anyhow!("{e}"))?,
            ))
        }
        "ball" => return Ok(Body::Star(StarBody::ball(dim))),
        _ => {}
    }
    if let Some(p) = arg.strip_prefix("lp:") {
        let p: f64 = p.parse().context("bad exponent in lp:p")?;
        return Ok(Body::Star(
            StarBody::lp_ball(dim, p).map_err(|e| anyhow!("{e}"))?,
        ));
    }
    let text = std::fs::read_to_string(arg)
        .with_context(|| format!("cannot read body file {arg:?}"))?;
    let spec: BodySpecFile =
        serde_json::from_str(&text).with_context(|| format!("cannot parse body file {arg:?}"))?;
    build(spec, tol)
}

pub const BUILTIN_HELP: &str = "\
Built-in bodies (use with --dim, default 3):
  cube      the cube [-1,1]^n
  cross     the cross-polytope, conv{±e_i}
  simplex   the centered regular simplex
  ball      the Euclidean unit ball
  lp:p      the unit ball of the p-norm, 1 < p < inf (e.g. lp:2.5)

Body files are JSON with a \"kind\" field:
  {\"kind\":\"vpolytope\",\"vertices\":[[1,1,1],[-1,1,1], ...]}
  {\"kind\":\"hpolytope\",\"dim\":3,\"halfspaces\":[{\"normal\":[1,0,0],\"offset\":1}, ...]}
  {\"kind\":\"lp_ball\",\"p\":2.5,\"dim\":3}
  {\"kind\":\"perturbed\",\"base\":{\"kind\":\"lp_ball\",\"p\":2,\"dim\":3},\"eps\":0.05,\"group\":\"so-diamond\",\"dim\":3,\"seed\":1}
  {\"kind\":\"orbit_hull\",\"points\":[[1.0,0.2,0.1]],\"group\":\"so-diamond\",\"dim\":3}

Groups: o-simplex, so-simplex, o-diamond, so-diamond.";
