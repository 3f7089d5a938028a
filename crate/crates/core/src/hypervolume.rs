//! Exact hypervolume for 2 to 4 objectives and the contribution quantities
//! built on it.
//!
//! Two objectives use a sort-and-sweep; three and four objectives slice along
//! the last objective and recurse, keeping only the non-dominated projection
//! of each slab.

use crate::domain::dominates;
use crate::error::{Error, Result};

/// Lebesgue measure of the region dominated by `points` and bounded by
/// `reference`. Points that do not strictly improve on the reference in
/// every objective add no volume and are skipped.
pub fn hv<P: AsRef<[f64]>>(points: &[P], reference: &[f64]) -> Result<f64> {
    let m = reference.len();
    if !(2..=4).contains(&m) {
        return Err(Error::UnsupportedDimension(m));
    }
    let mut inside: Vec<&[f64]> = Vec::with_capacity(points.len());
    for p in points {
        let p = p.as_ref();
        assert_eq!(
            p.len(),
            m,
            "objective vector length differs from reference point"
        );
        if p.iter().zip(reference).all(|(v, r)| v < r) {
            inside.push(p);
        }
    }
    Ok(match m {
        2 => sweep_2d(inside, reference),
        _ => slice(inside.into_iter().map(<[f64]>::to_vec).collect(), reference),
    })
}

/// `hv(front) - hv(front without front[i])`. Panics if `i` is out of range.
pub fn point_hv_contribution<P: AsRef<[f64]>>(
    front: &[P],
    reference: &[f64],
    i: usize,
) -> Result<f64> {
    assert!(
        i < front.len(),
        "contribution index {i} out of range for {} points",
        front.len()
    );
    regional_hv_contribution(front, reference, &[i])
}

/// `hv(front) - hv(front without the listed members)`.
pub fn regional_hv_contribution<P: AsRef<[f64]>>(
    front: &[P],
    reference: &[f64],
    members: &[usize],
) -> Result<f64> {
    if members.is_empty() {
        return Ok(0.0);
    }
    let full = hv(front, reference)?;
    let rest: Vec<&[f64]> = front
        .iter()
        .enumerate()
        .filter(|(j, _)| !members.contains(j))
        .map(|(_, p)| p.as_ref())
        .collect();
    let reduced = hv(&rest, reference)?;
    // The difference of two exact sums can land a hair below zero.
    Ok((full - reduced).max(0.0))
}

fn sweep_2d(mut pts: Vec<&[f64]>, reference: &[f64]) -> f64 {
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap()
            .then(a[1].partial_cmp(&b[1]).unwrap())
    });
    let mut best = reference[1];
    let mut area = 0.0;
    for p in pts {
        if p[1] < best {
            area += (reference[0] - p[0]) * (best - p[1]);
            best = p[1];
        }
    }
    area
}

fn slice(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    let m = reference.len();
    if m == 2 {
        return sweep_2d(pts.iter().map(Vec::as_slice).collect(), reference);
    }
    if pts.is_empty() {
        return 0.0;
    }
    let last = m - 1;
    pts.sort_by(|a, b| a[last].partial_cmp(&b[last]).unwrap());
    let lower_ref = &reference[..last];
    let mut active: Vec<Vec<f64>> = Vec::new();
    let mut volume = 0.0;
    for (i, p) in pts.iter().enumerate() {
        let projected = &p[..last];
        if !active
            .iter()
            .any(|a| dominates(a, projected) || a.as_slice() == projected)
        {
            active.retain(|a| !dominates(projected, a));
            active.push(projected.to_vec());
        }
        let next = pts.get(i + 1).map_or(reference[last], |q| q[last]);
        let height = next - p[last];
        if height > 0.0 {
            volume += height * slice(active.clone(), lower_ref);
        }
    }
    volume
}

/// Monte-Carlo hypervolume estimate, used as an independent check on the
/// exact routines.
pub mod oracle {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::exec::Exec;

    const CHUNK: usize = 1 << 16;

    /// Uniform-sampling estimate over the box `[min(points), reference]`.
    /// Deterministic for a given seed regardless of the execution policy.
    pub fn mc_hv_oracle<P: AsRef<[f64]> + Sync>(
        points: &[P],
        reference: &[f64],
        n_samples: usize,
        seed: u64,
        exec: Exec,
    ) -> f64 {
        let inside: Vec<&[f64]> = points
            .iter()
            .map(|p| p.as_ref())
            .filter(|p| p.iter().zip(reference).all(|(v, r)| v < r))
            .collect();
        if inside.is_empty() || n_samples == 0 {
            return 0.0;
        }
        let m = reference.len();
        let low: Vec<f64> = (0..m)
            .map(|k| inside.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
            .collect();
        let box_volume: f64 = (0..m).map(|k| reference[k] - low[k]).product();
        let chunks = n_samples.div_ceil(CHUNK);
        let hits: usize = exec
            .map_range(chunks, |c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let count = CHUNK.min(n_samples - c * CHUNK);
                let mut z = vec![0.0; m];
                let mut hits = 0usize;
                for _ in 0..count {
                    for k in 0..m {
                        z[k] = low[k] + rng.random::<f64>() * (reference[k] - low[k]);
                    }
                    if inside.iter().any(|p| p.iter().zip(&z).all(|(a, b)| a <= b)) {
                        hits += 1;
                    }
                }
                hits
            })
            .into_iter()
            .sum();
        box_volume * hits as f64 / n_samples as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_box() {
        assert_eq!(hv(&[[0.0, 0.0]], &[1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn two_points_inclusion_exclusion() {
        let pts = [[0.0, 0.5], [0.5, 0.0]];
        assert!((hv(&pts, &[1.0, 1.0]).unwrap() - 0.75).abs() < 1e-15);
        assert!((point_hv_contribution(&pts, &[1.0, 1.0], 0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sole_point_contribution_is_its_box() {
        assert_eq!(
            point_hv_contribution(&[[0.0, 0.0]], &[1.0, 1.0], 0).unwrap(),
            1.0
        );
    }

    #[test]
    fn twins_shadow_each_other() {
        let pts = [[0.2, 0.3], [0.2, 0.3], [0.5, 0.1]];
        assert_eq!(point_hv_contribution(&pts, &[1.0, 1.0], 0).unwrap(), 0.0);
        assert_eq!(point_hv_contribution(&pts, &[1.0, 1.0], 1).unwrap(), 0.0);
        assert!(point_hv_contribution(&pts, &[1.0, 1.0], 2).unwrap() > 0.0);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn contribution_index_checked() {
        let _ = point_hv_contribution(&[[0.0, 0.0]], &[1.0, 1.0], 1);
    }

    #[test]
    fn unsupported_dimensions() {
        assert!(matches!(
            hv(&[[0.0]], &[1.0]),
            Err(Error::UnsupportedDimension(1))
        ));
        assert!(matches!(
            hv(&[[0.0; 5]], &[1.0; 5]),
            Err(Error::UnsupportedDimension(5))
        ));
    }

    #[test]
    fn points_beyond_reference_are_ignored() {
        let pts = [[0.0, 0.0], [2.0, -1.0], [0.5, 1.0]];
        assert_eq!(hv(&pts, &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(hv(&[[2.0, 2.0]], &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn three_and_four_objective_boxes() {
        assert_eq!(hv(&[[0.0, 0.0, 0.0]], &[1.0, 2.0, 3.0]).unwrap(), 6.0);
        // |A ∪ B| = |A| + |B| - |A ∩ B| = 0.5 + 0.25 - 0.125
        let pts = [[0.0, 0.0, 0.5], [0.5, 0.5, 0.0]];
        let v = hv(&pts, &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - 0.625).abs() < 1e-15, "{v}");
        let v4 = hv(&[[0.0, 0.0, 0.0, 0.0], [0.5, 0.5, 0.5, 0.5]], &[1.0; 4]).unwrap();
        assert_eq!(v4, 1.0);
    }

    #[test]
    fn empty_oracle_is_zero() {
        let none: [[f64; 2]; 0] = [];
        assert_eq!(
            oracle::mc_hv_oracle(
                &none,
                &[1.0, 1.0],
                100_000,
                1,
                crate::exec::Exec::Sequential
            ),
            0.0
        );
    }
}
