use crate::error::{Error, Result};
use crate::pfsmg::nondominated_indices;

/// Volume dominated by `front` and bounded by `reference`.
///
/// Two objectives use a sorted sweep, three use slicing along the last
/// objective. Every point must be no worse than the reference.
pub fn hypervolume<V: AsRef<[f64]>>(front: &[V], reference: &[f64]) -> Result<f64> {
    for p in front {
        let p = p.as_ref();
        if p.len() != reference.len() {
            return Err(Error::DimensionMismatch {
                expected: reference.len(),
                got: p.len(),
            });
        }
        if p.iter().zip(reference).any(|(a, r)| !(a <= r)) {
            return Err(Error::invalid(format!(
                "point {p:?} exceeds the hypervolume reference {reference:?}"
            )));
        }
    }
    let pts: Vec<Vec<f64>> = front.iter().map(|p| p.as_ref().to_vec()).collect();
    compute(pts, reference)
}

/// Like [`hypervolume`] but ignores points beyond the reference instead of
/// failing. Used for progress logging.
pub fn hypervolume_clipped<V: AsRef<[f64]>>(front: &[V], reference: &[f64]) -> Result<f64> {
    let pts: Vec<Vec<f64>> = front
        .iter()
        .map(|p| p.as_ref())
        .filter(|p| p.len() == reference.len() && p.iter().zip(reference).all(|(a, r)| a <= r))
        .map(<[f64]>::to_vec)
        .collect();
    compute(pts, reference)
}

fn compute(pts: Vec<Vec<f64>>, reference: &[f64]) -> Result<f64> {
    match reference.len() {
        1 => Ok(pts.iter().map(|p| reference[0] - p[0]).fold(0.0, f64::max)),
        2 => Ok(sweep_2d(pts, reference)),
        3 => Ok(slice_3d(pts, reference)),
        m => Err(Error::invalid(format!(
            "hypervolume is implemented for 1 to 3 objectives, got {m}"
        ))),
    }
}

fn sweep_2d(pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    let keep = nondominated_indices(&pts);
    let mut front: Vec<(f64, f64)> = keep.iter().map(|&i| (pts[i][0], pts[i][1])).collect();
    front.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut hv = 0.0;
    for (j, &(f1, f2)) in front.iter().enumerate() {
        let next = front.get(j + 1).map_or(r[0], |p| p.0);
        hv += (next - f1) * (r[1] - f2);
    }
    hv
}

fn slice_3d(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut hv = 0.0;
    let mut active: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for j in 0..pts.len() {
        active.push(vec![pts[j][0], pts[j][1]]);
        let top = pts.get(j + 1).map_or(r[2], |p| p[2]);
        let depth = top - pts[j][2];
        if depth > 0.0 {
            // keep the slice's 2-D front small for later slices
            let keep = nondominated_indices(&active);
            active = keep.into_iter().map(|i| active[i].clone()).collect();
            hv += depth * sweep_2d(active.clone(), &r[..2]);
        }
    }
    hv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng as _;

    #[test]
    fn staircase_example() {
        let f = [[1.0, 3.0], [2.0, 2.0], [3.0, 1.0]];
        assert!((hypervolume(&f, &[4.0, 4.0]).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn single_box() {
        let hv = hypervolume(&[[0.5, 1.0, 2.0]], &[1.0, 3.0, 2.5]).unwrap();
        assert!((hv - 0.5 * 2.0 * 0.5).abs() < 1e-15);
    }

    #[test]
    fn dominated_point_changes_nothing() {
        let f = vec![vec![1.0, 3.0], vec![2.0, 2.0]];
        let mut g = f.clone();
        g.push(vec![3.0, 3.0]);
        assert_eq!(
            hypervolume(&f, &[4.0, 4.0]).unwrap(),
            hypervolume(&g, &[4.0, 4.0]).unwrap()
        );
    }

    #[test]
    fn reference_violations() {
        assert!(hypervolume(&[[5.0, 0.0]], &[4.0, 4.0]).is_err());
        assert_eq!(
            hypervolume_clipped(&[[5.0, 0.0]], &[4.0, 4.0]).unwrap(),
            0.0
        );
        assert!(hypervolume(&[[1.0, 1.0, 1.0, 1.0]], &[2.0; 4]).is_err());
    }

    #[test]
    fn three_objective_example() {
        // two boxes [0,2]x[0,1]x[0,1] and [0,1]x[0,2]x[0,1], overlap 1
        let f = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
        assert!((hypervolume(&f, &[2.0, 2.0, 1.0]).unwrap() - 3.0).abs() < 1e-15);
    }

    fn grid_count<V: AsRef<[f64]>>(
        front: &[V],
        r: &[f64],
        samples: usize,
        seed: u64,
    ) -> (f64, f64) {
        let mut g = rng::seeded(seed);
        let m = r.len();
        let mut hits = 0usize;
        for _ in 0..samples {
            let z: Vec<f64> = (0..m).map(|i| g.random::<f64>() * r[i]).collect();
            if front
                .iter()
                .any(|p| p.as_ref().iter().zip(&z).all(|(a, b)| a <= b))
            {
                hits += 1;
            }
        }
        let vol: f64 = r.iter().product();
        let p = hits as f64 / samples as f64;
        (vol * p, vol * (p * (1.0 - p) / samples as f64).sqrt())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn agrees_with_monte_carlo(raw in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..15), m in 2usize..4, seed in 0u64..1000) {
            let pts: Vec<Vec<f64>> = raw.into_iter().map(|v| v[..m].to_vec()).collect();
            let r = vec![1.0; m];
            let exact = hypervolume(&pts, &r).unwrap();
            let (est, se) = grid_count(&pts, &r, 100_000, seed);
            prop_assert!((exact - est).abs() <= 4.0 * se + 1e-9, "{} vs {} (se {})", exact, est, se);
        }

        #[test]
        fn adding_a_nondominated_point_increases_volume(raw in prop::collection::vec((0.05f64..0.95, 0.05f64..0.95), 1..20), extra in (0.0f64..1.0, 0.0f64..1.0)) {
            let pts: Vec<Vec<f64>> = raw.iter().map(|&(a, b)| vec![a, b]).collect();
            let e = vec![extra.0, extra.1];
            prop_assume!(!pts.iter().any(|p| p[0] <= e[0] && p[1] <= e[1]));
            let r = [1.0, 1.0];
            let before = hypervolume(&pts, &r).unwrap();
            let mut with = pts.clone();
            with.push(e);
            prop_assert!(hypervolume(&with, &r).unwrap() > before);
        }
    }
}
