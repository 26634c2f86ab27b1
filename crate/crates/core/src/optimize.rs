//! One-dimensional maximization: a coarse grid to locate the best bracket,
//! then golden-section refinement inside it.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maps NaN to -inf so comparisons are total.
fn score(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximizes a unimodal `f` on `[lo, hi]` to an interval width of `tol`.
/// Returns `(argmax, max)`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = score(f(c));
    let mut fd = score(f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = score(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = score(f(d));
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Evaluates `f` on `grid_points` evenly spaced points of `[lo, hi]`
/// (endpoints included), then refines by golden section between the
/// neighbours of the best grid point. Ties on the grid go to the smaller
/// argument.
pub fn grid_golden_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid_points: usize,
    tol: f64,
) -> (f64, f64) {
    let points = grid_points.max(3);
    let step = (hi - lo) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect();
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = score(f(x));
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    if best_val == f64::NEG_INFINITY {
        return (grid[0], best_val);
    }
    let left = grid[best.saturating_sub(1)];
    let right = grid[(best + 1).min(points - 1)];
    let (x, v) = golden_section_max(&mut f, left, right, tol);
    if v > best_val {
        (x, v)
    } else {
        (grid[best], best_val)
    }
}
