//! Soft shrinkage and Euclidean projection onto the l1 ball.

use alloc::vec::Vec;

/// `sign(x) * max(|x| - t, 0)`.
#[inline]
pub(crate) fn shrink(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Projects `x` onto `{ z : ||z||_1 <= radius }` in place (sort-based).
pub(crate) fn project_l1_ball(x: &mut [f64], radius: f64) {
    let total: f64 = x.iter().map(|v| v.abs()).sum();
    if total <= radius {
        return;
    }
    if radius <= 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &m) in mags.iter().enumerate() {
        cumsum += m;
        let candidate = (cumsum - radius) / (j + 1) as f64;
        if m > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    for v in x.iter_mut() {
        *v = shrink(*v, theta);
    }
}
