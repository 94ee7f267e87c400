use alloc::vec::Vec;

use super::AnalyticsError;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sum in ascending order, so the result does not depend on input order.
fn sorted_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Local outlier factor of every point. Neighbourhoods include every point
/// tied at the k-distance. Reachability means are floored at
/// `f64::EPSILON` times the largest k-distance so duplicates stay finite.
pub fn lof_scores(points: &[Vec<f64>], k: usize) -> Result<Vec<f64>, AnalyticsError> {
    let n = points.len();
    if n < 2 || k == 0 || k >= n {
        return Err(AnalyticsError::InvalidParams("LOF needs 1 <= k < number of points"));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite())) {
        return Err(AnalyticsError::InvalidParams("LOF points must be finite and equal length"));
    }

    // one row of squared distances at a time; only the neighbourhoods are kept
    let mut row = alloc::vec![0.0; n];
    let mut scratch = Vec::with_capacity(n - 1);
    let mut kdist = Vec::with_capacity(n);
    let mut neighbours: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for (i, a) in points.iter().enumerate() {
        for (r, b) in row.iter_mut().zip(points) {
            *r = sq_dist(a, b);
        }
        scratch.clear();
        scratch.extend(row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &d)| d));
        let kd2 = *scratch.select_nth_unstable_by(k - 1, f64::total_cmp).1;
        kdist.push(libm::sqrt(kd2));
        neighbours.push(
            row.iter().enumerate().filter(|&(j, &d)| j != i && d <= kd2).map(|(j, &d)| (j, libm::sqrt(d))).collect(),
        );
    }

    let max_kd = kdist.iter().copied().fold(0.0, f64::max);
    if max_kd == 0.0 {
        return Ok(alloc::vec![1.0; n]);
    }
    let floor = f64::EPSILON * max_kd;
    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let reach = neighbours[i].iter().map(|&(o, d)| kdist[o].max(d)).collect();
            let mean = sorted_sum(reach) / neighbours[i].len() as f64;
            1.0 / mean.max(floor)
        })
        .collect();
    Ok((0..n)
        .map(|i| {
            let dens = neighbours[i].iter().map(|&(o, _)| lrd[o]).collect();
            sorted_sum(dens) / neighbours[i].len() as f64 / lrd[i]
        })
        .collect())
}
