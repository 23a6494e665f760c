/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Fronts of indices into `points`; front 0 is the non-dominated set.
/// Members of each front are in ascending index order.
pub fn fast_non_dominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for a in 0..n {
        for b in (a + 1)..n {
            if dominates(&points[a], &points[b]) {
                dominated_by[a].push(b);
                count[b] += 1;
            } else if dominates(&points[b], &points[a]) {
                dominated_by[b].push(a);
                count[a] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &a in &current {
            for &b in &dominated_by[a] {
                count[b] -= 1;
                if count[b] == 0 {
                    next.push(b);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Rank (0-based front index) of every point.
pub fn ranks(points: &[Vec<f64>]) -> Vec<usize> {
    let mut r = vec![0; points.len()];
    for (k, front) in fast_non_dominated_sort(points).iter().enumerate() {
        for &i in front {
            r[i] = k;
        }
    }
    r
}

/// Crowding distance of each member of `front` (indices into `points`),
/// returned in the order of `front`. Boundary members get `+∞`; a
/// dimension with zero range contributes nothing.
pub fn crowding_distance(points: &[Vec<f64>], front: &[usize]) -> Vec<f64> {
    let k = front.len();
    let mut dist = vec![0.0; k];
    if k == 0 {
        return dist;
    }
    let m = points[front[0]].len();
    let mut order: Vec<usize> = (0..k).collect();
    for d in 0..m {
        order.sort_by(|&a, &b| points[front[a]][d].total_cmp(&points[front[b]][d]).then(a.cmp(&b)));
        let lo = points[front[order[0]]][d];
        let hi = points[front[order[k - 1]]][d];
        dist[order[0]] = f64::INFINITY;
        dist[order[k - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..k.saturating_sub(1) {
            let gap = points[front[order[w + 1]]][d] - points[front[order[w - 1]]][d];
            dist[order[w]] += gap / range;
        }
    }
    dist
}

/// Indices of the non-dominated members of `points`. Exact duplicates are
/// all kept.
pub fn non_dominated(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| dominates(q, &points[i])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[0.1, 0.2, 0.3], &[0.2, 0.2, 0.3]));
        assert!(!dominates(&[0.1, 0.2], &[0.1, 0.2]));
        assert!(!dominates(&[0.1, 0.3], &[0.2, 0.2]));
        assert!(!dominates(&[0.2, 0.2], &[0.1, 0.3]));
    }

    #[test]
    fn chain_and_antichain() {
        let chain = vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![2.0, 2.0]];
        assert_eq!(fast_non_dominated_sort(&chain), vec![vec![0], vec![1], vec![2]]);
        let anti = vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]];
        assert_eq!(fast_non_dominated_sort(&anti), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn crowding_rules() {
        let two = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(crowding_distance(&two, &[0, 1]).iter().all(|d| d.is_infinite()));
        let line = vec![vec![0.0, 2.0], vec![1.0, 1.0], vec![2.0, 0.0]];
        let d = crowding_distance(&line, &[0, 1, 2]);
        assert_eq!(d[1], 2.0);
        let flat = vec![vec![0.0, 5.0], vec![1.0, 5.0], vec![2.0, 5.0]];
        let d = crowding_distance(&flat, &[0, 1, 2]);
        assert_eq!(d[1], 1.0);
    }
}
