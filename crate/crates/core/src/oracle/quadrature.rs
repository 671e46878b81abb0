use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const RULE_ORDER: usize = 16;

/// Composite Gauss–Legendre integral of `f` over `[lo, hi]` using
/// `points / 16` panels of the 16-point rule.
pub(crate) fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Result<f64> {
    if points < RULE_ORDER || !points.is_multiple_of(RULE_ORDER) {
        return Err(Error::InvalidArgument(format!(
            "quadrature points must be a positive multiple of {RULE_ORDER}, got {points}"
        )));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let (x, w) = gauss_legendre(RULE_ORDER);
    let panels = points / RULE_ORDER;
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + h * p as f64;
        let mid = a + 0.5 * h;
        let half = 0.5 * h;
        total += half * x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>();
    }
    Ok(total)
}
