/// Dynamic time warping distance with squared local cost and steps
/// (1,0), (0,1), (1,1); returns the square root of the optimal path cost.
///
/// No warping window is applied.
pub fn dtw_distance(a: &[f64], b: &[f64]) -> f64 {
    dtw_squared_within(a, b, f64::INFINITY)
        .expect("unbounded search")
        .sqrt()
}

/// Squared DTW cost, or `None` as soon as it is certain to exceed `cutoff`.
pub fn dtw_squared_within(a: &[f64], b: &[f64], cutoff: f64) -> Option<f64> {
    assert!(!a.is_empty() && !b.is_empty(), "dtw needs nonempty inputs");
    // Every path matches both pairs of endpoints.
    let ends = if a.len() == 1 && b.len() == 1 {
        (a[0] - b[0]).powi(2)
    } else {
        (a[0] - b[0]).powi(2) + (a[a.len() - 1] - b[b.len() - 1]).powi(2)
    };
    if ends > cutoff {
        return None;
    }
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m];
    let mut curr = vec![f64::INFINITY; m];
    // First row: only horizontal moves.
    let mut acc = 0.0;
    for (c, &y) in curr.iter_mut().zip(b) {
        acc += (a[0] - y) * (a[0] - y);
        *c = acc;
    }
    std::mem::swap(&mut prev, &mut curr);
    for &x in &a[1..] {
        let mut left = f64::INFINITY;
        let mut diag = f64::INFINITY;
        let mut row_min = f64::INFINITY;
        for ((c, &up), &y) in curr.iter_mut().zip(prev.iter()).zip(b) {
            let d = x - y;
            let v = d * d + fmin(left, fmin(up, diag));
            *c = v;
            diag = up;
            left = v;
            row_min = fmin(row_min, v);
        }
        // Costs only grow along a path, so a row entirely above the cutoff
        // ends the search.
        if row_min > cutoff {
            return None;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Some(prev[m - 1]).filter(|&v| v <= cutoff)
}

/// `f64::min` without the NaN handling; inputs here are never NaN.
#[inline(always)]
fn fmin(a: f64, b: f64) -> f64 {
    if a < b {
        a
    } else {
        b
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc + (x - y) * (x - y))
        .sqrt()
}
