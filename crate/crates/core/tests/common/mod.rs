//! Test-only oracles that do not share code with the crate.

#![allow(dead_code)]

use hadamard_core::EndpointDerivatives;

const NODES: usize = 20;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
fn legendre_rule() -> Vec<(f64, f64)> {
    let n = NODES;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 20-point Gauss–Legendre with `panels` equal panels.
pub fn gauss<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let rule = legendre_rule();
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * h;
        let half = h / 2.0;
        total += rule.iter().map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half;
    }
    total
}

pub fn unit_integral<F: Fn(f64) -> f64>(f: F) -> f64 {
    gauss(f, 0.0, 1.0, 32)
}

pub fn rel(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / x.abs().max(y.abs())
    }
}

/// `((b−a)/4)·∫₀¹ t·(fa fb)^(s/2)·((fa/fb)^(st/2) + (fb/fa)^(st/2)) dt`.
pub fn t1_oracle(d: &EndpointDerivatives, s: f64, a: f64, b: f64) -> f64 {
    let (fa, fb) = (d.fa_abs(), d.fb_abs());
    let r = fa / fb;
    (b - a) / 4.0
        * (fa * fb).powf(s / 2.0)
        * unit_integral(|t| t * (r.powf(s * t / 2.0) + r.powf(-s * t / 2.0)))
}

/// `((b−a)/(4(p+1)^(1/p)))·{[∫ fa^(sq(1+t)/2) fb^(sq(1−t)/2)]^(1/q) + [∫ fb^(sq(1+t)/2) fa^(sq(1−t)/2)]^(1/q)}`.
pub fn t2_oracle(d: &EndpointDerivatives, s: f64, p: f64, a: f64, b: f64) -> f64 {
    let (fa, fb) = (d.fa_abs(), d.fb_abs());
    let q = p / (p - 1.0);
    let first = unit_integral(|t| fa.powf(s * q * (1.0 + t) / 2.0) * fb.powf(s * q * (1.0 - t) / 2.0));
    let second = unit_integral(|t| fb.powf(s * q * (1.0 + t) / 2.0) * fa.powf(s * q * (1.0 - t) / 2.0));
    (b - a) / (4.0 * (p + 1.0).powf(1.0 / p)) * (first.powf(1.0 / q) + second.powf(1.0 / q))
}

/// `((b−a)/4)(1/2)^(1−1/q)·{|fa/fb|^(s/2)[∫ t|fa/fb|^(sqt/2)]^(1/q) + |fb/fa|^(s/2)[∫ t|fb/fa|^(sqt/2)]^(1/q)}`.
pub fn t3_oracle(d: &EndpointDerivatives, s: f64, q: f64, a: f64, b: f64) -> f64 {
    let r = d.fa_abs() / d.fb_abs();
    let first = unit_integral(|t| t * r.powf(s * q * t / 2.0));
    let second = unit_integral(|t| t * r.powf(-s * q * t / 2.0));
    (b - a) / 4.0
        * 0.5f64.powf(1.0 - 1.0 / q)
        * (r.powf(s / 2.0) * first.powf(1.0 / q) + r.powf(-s / 2.0) * second.powf(1.0 / q))
}

/// The Young-split display
/// `((b−a)/4)|fa fb|^(s/2)·Σ_i [mu_i ∫ t^(1/mu_i) + eta_i ∫ |fa/fb|^(st/(2 eta_i))]`.
pub fn t4_oracle(d: &EndpointDerivatives, s: f64, mu1: f64, mu2: f64, a: f64, b: f64) -> f64 {
    let (fa, fb) = (d.fa_abs(), d.fb_abs());
    let r = fa / fb;
    let part = |mu: f64| {
        let eta = 1.0 - mu;
        mu * unit_integral(|t| t.powf(1.0 / mu)) + eta * unit_integral(|t| r.powf(s * t / (2.0 * eta)))
    };
    (b - a) / 4.0 * (fa * fb).powf(s / 2.0) * (part(mu1) + part(mu2))
}
