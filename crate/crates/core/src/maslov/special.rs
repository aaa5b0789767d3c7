use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::Result;
use crate::hypergeo::{leafwise_mean_curvature, tangent_splitting, LevelSetHypersurface};
use crate::scalar::{to_f64, Real};

/// Result of a leafwise special test over sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafwiseSpecial<T: Real> {
    pub special: bool,
    /// Largest `|α^∥|` over the samples.
    pub max_norm: f64,
    /// The sample attaining `max_norm`.
    pub witness: Option<DVector<T>>,
}

/// Whether the canonical grading of `Y` is leafwise parallel at the given
/// points, i.e. whether the leafwise mean curvature one-form vanishes there.
pub fn is_leafwise_special<T: Real>(y: &LevelSetHypersurface<T>, points: &[DVector<T>]) -> Result<LeafwiseSpecial<T>> {
    let norms: Result<Vec<f64>> = points
        .par_iter()
        .map(|p| {
            let split = tangent_splitting(y, p)?;
            Ok(to_f64(leafwise_mean_curvature(y, &split)?.norm()))
        })
        .collect();
    let norms = norms?;
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in norms.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let max_norm = best.map_or(0.0, |(_, v)| v);
    Ok(LeafwiseSpecial {
        special: max_norm < y.space().tol().leafwise_special,
        max_norm,
        witness: best.map(|(i, _)| points[i].clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeo::{cylinder, hyperplane, sphere};
    use crate::symplin::SymplecticSpace;

    #[test]
    fn fixtures() {
        let s = SymplecticSpace::<f64>::new(2).unwrap();
        let y = hyperplane(&s);
        assert!(is_leafwise_special(&y, &y.sample_points(8, 1).unwrap()).unwrap().special);
        for y in [sphere(&s, 1.0), cylinder(&s)] {
            let r = is_leafwise_special(&y, &y.sample_points(8, 1).unwrap()).unwrap();
            assert!(!r.special);
            assert!((r.max_norm - 1.0).abs() < 1e-12);
            assert!(r.witness.is_some());
        }
    }
}
