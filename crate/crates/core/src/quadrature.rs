//! Quadrature rules.

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on `[a, b]`.
pub fn integrate_gl(f: impl FnMut(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    integrate_with(f, a, b, panels, &nodes, &weights)
}

pub fn integrate_with(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, panels: usize, nodes: &[f64], weights: &[f64]) -> f64 {
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mut s = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            s += w * f(lo + 0.5 * width * (1.0 + x));
        }
        total += 0.5 * width * s;
    }
    total
}

/// Composite Simpson weights for `n` (even) intervals of width `h`.
pub fn simpson_weight(k: usize, n: usize, h: f64) -> f64 {
    if k == 0 || k == n {
        h / 3.0
    } else if k % 2 == 1 {
        4.0 * h / 3.0
    } else {
        2.0 * h / 3.0
    }
}

/// Number of Simpson intervals (even, at least 2) of width at most `h` on an
/// interval of length `len`.
pub fn simpson_intervals(len: f64, h: f64) -> usize {
    let n = (len.abs() / h).ceil().max(2.0) as usize;
    n + n % 2
}

/// Composite Simpson rule on `[a, b]` with spacing at most `h`.
pub fn simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, h: f64) -> f64 {
    let n = simpson_intervals(b - a, h);
    let step = (b - a) / n as f64;
    (0..=n).map(|k| simpson_weight(k, n, step) * f(a + step * k as f64)).sum()
}
