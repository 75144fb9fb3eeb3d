//! Derivative-free bounded 1-D minimization.

/// Inverse golden ratio, (√5 − 1)/2.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub evaluations: usize,
}

/// `n` points spaced evenly in log between `lo` and `hi` (both included).
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    grid
}

/// Golden-section search on `[lo, hi]` until the bracket is narrower than
/// `tol`. Assumes `f` is unimodal on the interval; otherwise returns some
/// local minimum.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
        // Bracket can no longer shrink in floating point.
        if !(a < c && c <= d && d < b) {
            break;
        }
    }
    let (x, fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum { x, fx, evaluations }
}

/// Scans `grid` for the smallest value and refines within the neighbouring
/// grid cells with golden section. Returns whichever of the grid point and
/// the refined point is lower.
pub fn grid_then_golden<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64) -> Minimum {
    assert!(grid.len() >= 2);
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v < values[best] { i } else { best });
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let refined = golden_section(&mut f, lo, hi, tol);
    let evaluations = grid.len() + refined.evaluations;
    if refined.fx < values[best] {
        Minimum {
            evaluations,
            ..refined
        }
    } else {
        Minimum {
            x: grid[best],
            fx: values[best],
            evaluations,
        }
    }
}
