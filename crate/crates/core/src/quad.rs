//! Gauss-Legendre quadrature helpers used by the oracles.

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.755404408355003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// 16-point Gauss-Legendre on [a, b].
pub fn gauss16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..8 {
        s += GL16_W[i] * (f(c + h * GL16_X[i]) + f(c - h * GL16_X[i]));
    }
    s * h
}

/// Composite 16-point Gauss-Legendre over `panels` equal panels.
pub fn gauss_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for i in 0..panels {
        s += gauss16(f, a + i as f64 * h, a + (i + 1) as f64 * h);
    }
    s
}

/// Composite quadrature for integrands oscillating like cos(2 pi x xi):
/// panel width capped so each panel sees at most ~1/4 period.
pub fn gauss_oscillatory<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rate: f64) -> f64 {
    let max_width = if rate.abs() > 1e-12 {
        (0.25 / rate.abs()).min(0.25)
    } else {
        0.25
    };
    let panels = (((b - a) / max_width).ceil() as usize).max(1);
    gauss_panels(f, a, b, panels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_gaussian() {
        let f = |x: f64| (-x * x).exp();
        let v = gauss_panels(&f, -8.0, 8.0, 64);
        assert!((v - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn integrates_oscillatory() {
        // int_0^1 cos(2 pi 10 x) dx = 0
        let f = |x: f64| (2.0 * PI * 10.0 * x).cos();
        assert!(gauss_oscillatory(&f, 0.0, 1.0, 10.0).abs() < 1e-13);
    }
}
