//! Shooting solve of the continuum radial equilibrium
//! `(Φ σ(f'))' = Φ ∂W/∂x^r`, `f'(R_min) = f'(R_max) = 1`, written without the
//! library's discretisation, against the extrapolated grid solutions.

use noneuclid::solver::{solve_equilibrium, ProblemConfig, RadialGrid};

const KB: f64 = 2.0;
const KS: f64 = 0.5;

fn rhs(r: f64, y: [f64; 2]) -> [f64; 2] {
    let (sb, ss) = (KB.sqrt(), KS.sqrt());
    let big = (sb * r).sin() / sb;
    let dbig = (sb * r).cos();
    let phi = (ss * y[0]).sin() / ss;
    let dphi = (ss * y[0]).cos();
    let fp = y[1];
    let q = phi * phi / (big * big);
    let dw_df = 4.0 * phi * dphi / (big * big) * (q - 1.0);
    let sigma = 4.0 * fp * (fp * fp - 1.0);
    let fpp = (big * dw_df - dbig * sigma) / (big * (12.0 * fp * fp - 4.0));
    [fp, fpp]
}

/// `f'(R_max) − 1` and the distance for the trajectory starting at `(a, 1)`.
fn shoot(a: f64) -> (f64, f64) {
    let n = 20_000;
    let h = 0.8 / n as f64;
    let mut y = [a, 1.0];
    for k in 0..n {
        let r = 0.2 + k as f64 * h;
        let step = |y: [f64; 2], k: [f64; 2], s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
        let k1 = rhs(r, y);
        let k2 = rhs(r + 0.5 * h, step(y, k1, 0.5 * h));
        let k3 = rhs(r + 0.5 * h, step(y, k2, 0.5 * h));
        let k4 = rhs(r + h, step(y, k3, h));
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    (y[1] - 1.0, y[0] - a)
}

fn continuum_distance() -> f64 {
    // bracket the root on a coarse scan, then bisect
    let grid: Vec<f64> = (0..=60).map(|k| 0.12 + 0.002 * k as f64).collect();
    let (mut lo, mut hi) = grid
        .windows(2)
        .find_map(|w| {
            let (a, b) = (shoot(w[0]).0, shoot(w[1]).0);
            (a.is_finite() && b.is_finite() && a * b <= 0.0).then_some((w[0], w[1]))
        })
        .expect("no sign change in the shooting residual");
    let g_lo = shoot(lo).0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid).0 * g_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    shoot(0.5 * (lo + hi)).1
}

#[test]
fn grid_solutions_converge_to_continuum() {
    let exact = continuum_distance();
    // frozen from an independent collocation solve (scipy solve_bvp, tol 1e-10)
    assert!((exact - 0.75918475).abs() < 1e-7, "continuum distance {exact}");

    let d = |n: usize| {
        let cfg = ProblemConfig {
            grid: RadialGrid::new(0.2, 1.0, n).unwrap(),
            ..ProblemConfig::default()
        };
        solve_equilibrium(&cfg).unwrap().distance()
    };
    let (d201, d401) = (d(201), d(401));
    let extrapolated = d401 + (d401 - d201) / 3.0;
    assert!((d401 - exact).abs() < 2e-6, "{d401} vs {exact}");
    assert!((extrapolated - exact).abs() < 1e-8, "{extrapolated} vs {exact}");
}
