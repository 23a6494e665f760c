use super::pareto::non_dominated;

/// Exact hypervolume dominated by `points` and bounded by `z`, by
/// recursive slicing along the last objective. Points not strictly better
/// than `z` in every objective contribute nothing and are dropped.
pub fn hypervolume(points: &[Vec<f64>], z: &[f64]) -> f64 {
    let inside: Vec<Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(z).all(|(a, b)| a < b))
        .cloned()
        .collect();
    let dropped = points.len() - inside.len();
    if dropped > 0 {
        log::debug!("hypervolume: {dropped} point(s) outside the reference box");
    }
    if inside.is_empty() {
        return 0.0;
    }
    let front: Vec<Vec<f64>> = non_dominated(&inside).into_iter().map(|i| inside[i].clone()).collect();
    slice(front, z)
}

fn slice(mut pts: Vec<Vec<f64>>, z: &[f64]) -> f64 {
    let m = z.len();
    if pts.is_empty() {
        return 0.0;
    }
    if m == 1 {
        let best = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return z[0] - best;
    }
    let last = m - 1;
    pts.sort_by(|a, b| a[last].total_cmp(&b[last]));
    let mut volume = 0.0;
    for i in 0..pts.len() {
        let top = if i + 1 < pts.len() { pts[i + 1][last] } else { z[last] };
        let depth = top - pts[i][last];
        if depth <= 0.0 {
            continue;
        }
        let projected: Vec<Vec<f64>> = pts[..=i].iter().map(|p| p[..last].to_vec()).collect();
        let projected: Vec<Vec<f64>> = non_dominated(&projected)
            .into_iter()
            .map(|k| projected[k].clone())
            .collect();
        volume += depth * slice(projected, &z[..last]);
    }
    volume
}

/// Hypervolume after dividing every objective by the matching `z`
/// component, so the reference point becomes all ones.
pub fn normalized_hypervolume(points: &[Vec<f64>], z: &[f64]) -> f64 {
    let scaled: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(z).map(|(a, b)| a / b).collect())
        .collect();
    hypervolume(&scaled, &vec![1.0; z.len()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plug_in_values() {
        assert_eq!(hypervolume(&[vec![0.5, 0.5]], &[1.0, 1.0]), 0.25);
        let two = hypervolume(&[vec![0.2, 0.6], vec![0.6, 0.2]], &[1.0, 1.0]);
        assert!((two - 0.48).abs() < 1e-12);
        assert_eq!(hypervolume(&[vec![1.0, 1.0]], &[1.0, 1.0]), 0.0);
        assert_eq!(hypervolume(&[], &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn three_d_boxes() {
        assert!((hypervolume(&[vec![0.5, 0.5, 0.5]], &[1.0, 1.0, 1.0]) - 0.125).abs() < 1e-15);
        // union of two boxes: 0.5 + 0.5 − 0.25
        let v = hypervolume(&[vec![0.0, 0.5, 0.0], vec![0.5, 0.0, 0.0]], &[1.0, 1.0, 1.0]);
        assert!((v - 0.75).abs() < 1e-12);
    }

    #[test]
    fn dominated_points_change_nothing() {
        let a = hypervolume(&[vec![0.2, 0.6], vec![0.6, 0.2]], &[1.0, 1.0]);
        let b = hypervolume(
            &[vec![0.2, 0.6], vec![0.6, 0.2], vec![0.7, 0.7], vec![1.5, 0.1]],
            &[1.0, 1.0],
        );
        assert_eq!(a, b);
    }
}
