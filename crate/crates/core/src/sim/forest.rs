use rand::Rng;

use super::{Bounds, Obstacle};
use crate::error::{Error, Result};
use crate::geometry::Vec2;

const ATTEMPTS_PER_TREE: usize = 1000;

/// Scatters `floor(density * area)` non-overlapping disc trees over `bounds`
/// by rejection sampling, keeping clear of every `keepout` disc.
pub fn generate_forest<R: Rng + ?Sized>(
    density: f64,
    radius_range: (f64, f64),
    keepout: &[(Vec2, f64)],
    bounds: Bounds,
    rng: &mut R,
) -> Result<Vec<Obstacle>> {
    let (r_min, r_max) = radius_range;
    if !(density.is_finite() && density >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "forest density must be >= 0, got {density}"
        )));
    }
    if !(r_min.is_finite() && r_max.is_finite() && r_min > 0.0 && r_min <= r_max) {
        return Err(Error::InvalidInput(format!(
            "tree radius range [{r_min}, {r_max}] must satisfy 0 < min <= max"
        )));
    }

    let count = (density * bounds.area()).floor() as usize;
    let budget = ATTEMPTS_PER_TREE.saturating_mul(count);
    let mut trees: Vec<Obstacle> = Vec::with_capacity(count);
    let mut attempts = 0;
    while trees.len() < count {
        if attempts >= budget {
            return Err(Error::InfeasibleDensity {
                requested: count,
                placed: trees.len(),
                attempts,
            });
        }
        attempts += 1;
        let center = bounds.sample(rng);
        let radius = rng.random_range(r_min..=r_max);
        let blocked = keepout
            .iter()
            .any(|&(c, r)| center.distance(c) < radius + r)
            || trees
                .iter()
                .any(|t| center.distance(t.center) < radius + t.radius);
        if !blocked {
            trees.push(Obstacle { center, radius });
        }
    }
    Ok(trees)
}
