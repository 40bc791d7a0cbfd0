//! Direction-based motion metrics computed from observed path histories.
//!
//! Persistence scores how little a single neighbor's heading varies along its
//! recent path. Similarity scores how closely two neighbors' net directions of
//! travel agree. Both depend only on directions, so they are invariant under
//! translation, rotation, and uniform scaling of the observed positions.

use crate::error::{Error, Result};
use crate::model::PathHistory;

/// Net displacements shorter than this are treated as "no direction".
pub const MIN_NET_DISPLACEMENT: f64 = 1e-9;

/// Path persistence in [0, 1]; 1 for straight motion.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Persistence(f64);

impl Persistence {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Path similarity in [0, 1]; 1 for parallel, 0 for antiparallel motion.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Similarity(f64);

impl Similarity {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Mean over consecutive displacement pairs of `max(0, cos θ)`, θ being the
/// heading change between them.
pub fn path_persistence(h: &PathHistory) -> Result<Persistence> {
    if h.len() < 3 {
        return Err(Error::InsufficientHistory {
            needed: 3,
            got: h.len(),
        });
    }
    let disp: Vec<_> = h.displacements().collect();
    let pairs = disp.len() - 1;
    let sum: f64 = disp
        .windows(2)
        .map(|w| {
            let (newer, older) = (w[0], w[1]);
            if newer.norm() == 0.0 || older.norm() == 0.0 {
                // unreachable through gated updates
                0.0
            } else {
                older.cos_angle(newer).max(0.0)
            }
        })
        .sum();
    Ok(Persistence((sum / pairs as f64).clamp(0.0, 1.0)))
}

/// `(1 + cos φ) / 2` with φ the angle between the two net displacements.
pub fn path_similarity(h_j: &PathHistory, h_l: &PathHistory) -> Result<Similarity> {
    let u = h_j.net_displacement()?;
    let w = h_l.net_displacement()?;
    if u.norm() < MIN_NET_DISPLACEMENT || w.norm() < MIN_NET_DISPLACEMENT {
        return Err(Error::DegenerateDirection);
    }
    Ok(Similarity(((1.0 + u.cos_angle(w)) / 2.0).clamp(0.0, 1.0)))
}
