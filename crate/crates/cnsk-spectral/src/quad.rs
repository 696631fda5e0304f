//! Gauss-Legendre and adaptive quadrature.

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence. Exact to machine
/// precision for the orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Integrate `f` over `[a, b]` with a fixed Gauss-Legendre rule.
pub fn integrate_gl(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Integrate over a panel chain `[breaks[0], breaks[1]], ...` with one rule.
pub fn integrate_panels(
    f: &mut impl FnMut(f64) -> f64,
    breaks: &[f64],
    rule: &(Vec<f64>, Vec<f64>),
) -> f64 {
    let mut acc = 0.0;
    for pair in breaks.windows(2) {
        acc += integrate_gl(f, pair[0], pair[1], rule);
    }
    acc
}

/// Adaptive Simpson on `[a, b]` to relative tolerance `rel_tol`.
///
/// The per-subinterval tolerance is floored at 1e-3 of the top-level one so
/// that integrands carrying a little evaluation noise (inner quadratures)
/// terminate instead of recursing to the depth cap.
pub fn adaptive_simpson(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        tol_floor: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol.max(tol_floor) {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, tol_floor, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, tol_floor, depth - 1)
        }
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    let scale = whole.abs().max(1e-300);
    let tol = rel_tol * scale;
    recurse(f, a, b, fa, fm, fb, whole, tol, 1e-3 * tol, 24)
}
