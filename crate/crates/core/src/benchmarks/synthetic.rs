//! Closed-form synthetic test problems (minimization form).

use std::f64::consts::PI;

/// DTLZ distance function on the trailing `k = d - m + 1` variables.
fn dtlz_g_multimodal(tail: &[f64]) -> f64 {
    let sum: f64 = tail
        .iter()
        .map(|&x| (x - 0.5).powi(2) - (20.0 * PI * (x - 0.5)).cos())
        .sum();
    100.0 * (tail.len() as f64 + sum)
}

fn dtlz_g_sphere(tail: &[f64]) -> f64 {
    tail.iter().map(|&x| (x - 0.5).powi(2)).sum()
}

/// Linear front scaled by `0.5 (1 + g)`.
pub fn dtlz1(x: &[f64], m: usize) -> Vec<f64> {
    let g = dtlz_g_multimodal(&x[m - 1..]);
    (0..m)
        .map(|i| {
            let idx = m - 1 - i;
            let mut f = 0.5 * (1.0 + g) * x[..idx].iter().product::<f64>();
            if i > 0 {
                f *= 1.0 - x[idx];
            }
            f
        })
        .collect()
}

fn dtlz_spherical(x: &[f64], m: usize, g: f64) -> Vec<f64> {
    (0..m)
        .map(|i| {
            let idx = m - 1 - i;
            let mut f = (1.0 + g)
                * x[..idx]
                    .iter()
                    .map(|&v| (0.5 * PI * v).cos())
                    .product::<f64>();
            if i > 0 {
                f *= (0.5 * PI * x[idx]).sin();
            }
            f
        })
        .collect()
}

pub fn dtlz2(x: &[f64], m: usize) -> Vec<f64> {
    dtlz_spherical(x, m, dtlz_g_sphere(&x[m - 1..]))
}

pub fn dtlz3(x: &[f64], m: usize) -> Vec<f64> {
    dtlz_spherical(x, m, dtlz_g_multimodal(&x[m - 1..]))
}

/// Branin on the affinely rescaled unit square, paired with Currin.
pub fn branin_currin(x: &[f64]) -> Vec<f64> {
    let (u0, u1) = (x[0], x[1]);
    let a = 15.0 * u0 - 5.0;
    let b = 15.0 * u1;
    let branin = (b - 5.1 / (4.0 * PI * PI) * a * a + 5.0 / PI * a - 6.0).powi(2)
        + 10.0 * (1.0 - 1.0 / (8.0 * PI)) * a.cos()
        + 10.0;
    // The factor tends to 1 as u1 -> 0+.
    let factor = if u1 > 0.0 {
        1.0 - (-1.0 / (2.0 * u1)).exp()
    } else {
        1.0
    };
    let numer = 2300.0 * u0.powi(3) + 1900.0 * u0 * u0 + 2092.0 * u0 + 60.0;
    let denom = 100.0 * u0.powi(3) + 500.0 * u0 * u0 + 4.0 * u0 + 20.0;
    vec![branin, factor * numer / denom]
}

pub fn chankong_haimes(x: &[f64]) -> Vec<f64> {
    let (a, b) = (x[0], x[1]);
    vec![
        2.0 + (a - 2.0).powi(2) + (b - 1.0).powi(2),
        9.0 * a - (b - 1.0).powi(2),
    ]
}

/// Component centres, standard deviations and weights of the two mixtures.
const GMM_CENTRES: [[[f64; 2]; 3]; 2] = [
    [[0.2, 0.2], [0.8, 0.2], [0.5, 0.7]],
    [[0.07, 0.2], [0.4, 0.8], [0.85, 0.1]],
];
const GMM_STD: [[f64; 3]; 2] = [[0.20, 0.10, 0.10], [0.2, 0.1, 0.05]];
const GMM_WEIGHTS: [f64; 3] = [0.5, 0.7, 0.7];

/// Negated unnormalized Gaussian mixtures, evaluated at an already perturbed input.
pub fn gmm(x: &[f64]) -> Vec<f64> {
    (0..2)
        .map(|o| {
            -(0..3)
                .map(|c| {
                    let [mx, my] = GMM_CENTRES[o][c];
                    let sq = (x[0] - mx).powi(2) + (x[1] - my).powi(2);
                    GMM_WEIGHTS[c] * (-sq / (2.0 * GMM_STD[o][c].powi(2))).exp()
                })
                .sum::<f64>()
        })
        .collect()
}

pub fn poloni(x: &[f64]) -> Vec<f64> {
    let (a, b) = (x[0], x[1]);
    let a1 = 0.5 * 1f64.sin() - 2.0 * 1f64.cos() + 2f64.sin() - 1.5 * 2f64.cos();
    let a2 = 1.5 * 1f64.sin() - 1f64.cos() + 2.0 * 2f64.sin() - 0.5 * 2f64.cos();
    let b1 = 0.5 * a.sin() - 2.0 * a.cos() + b.sin() - 1.5 * b.cos();
    let b2 = 1.5 * a.sin() - a.cos() + 2.0 * b.sin() - 0.5 * b.cos();
    vec![
        1.0 + (a1 - b1).powi(2) + (a2 - b2).powi(2),
        (a + 3.0).powi(2) + (b + 1.0).powi(2),
    ]
}

pub fn schaffer_n1(x: &[f64]) -> Vec<f64> {
    vec![x[0] * x[0], (x[0] - 2.0).powi(2)]
}

pub fn schaffer_n2(x: &[f64]) -> Vec<f64> {
    let v = x[0];
    let f1 = if v <= 1.0 {
        -v
    } else if v <= 3.0 {
        v - 2.0
    } else if v <= 4.0 {
        4.0 - v
    } else {
        v - 4.0
    };
    vec![f1, (v - 5.0).powi(2)]
}

pub fn test_function4(x: &[f64]) -> Vec<f64> {
    let (a, b) = (x[0], x[1]);
    vec![a * a - b, -0.5 * a - b - 1.0]
}

fn levy(z: &[f64]) -> f64 {
    let w: Vec<f64> = z.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
    let n = w.len();
    let head = (PI * w[0]).sin().powi(2);
    let middle: f64 = w[..n - 1]
        .iter()
        .map(|wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
        .sum();
    let tail = (w[n - 1] - 1.0).powi(2) * (1.0 + (2.0 * PI * w[n - 1]).sin().powi(2));
    head + middle + tail
}

/// Noise-sensitive one-dimensional problem. The second objective evaluates
/// Levy on `[-10, 10]^2` at the image of `0.95 (x, 0) + 0.03`.
pub fn toy_robust(x: &[f64]) -> Vec<f64> {
    let v = x[0];
    let p1 = 2.4 - 10.0 * v - 0.1 * v * v;
    let p2 = 2.0 * v - 0.1 * v * v;
    let smoother = (v - 0.5).powi(2) + 0.1 * (30.0 * v).sin();
    let mask = 1.0 / (1.0 + (-(0.2 - v) / 0.005).exp());
    let f1 = 30.0 * (p1 * mask + p2 * (1.0 - mask) + smoother - 1.0);
    let z = [20.0 * (0.95 * v + 0.03) - 10.0, 20.0 * 0.03 - 10.0];
    let f2 = 0.75 * z[0] * z[0] - levy(&z);
    vec![f1, f2]
}

pub fn kursawe(x: &[f64]) -> Vec<f64> {
    let f1 = (0..x.len() - 1)
        .map(|i| -10.0 * (-0.2 * (x[i] * x[i] + x[i + 1] * x[i + 1]).sqrt()).exp())
        .sum();
    let f2 = x
        .iter()
        .map(|&v| v.abs().powf(0.8) + 5.0 * (v.powi(3)).sin())
        .sum();
    vec![f1, f2]
}
