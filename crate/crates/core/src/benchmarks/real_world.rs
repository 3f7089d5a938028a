//! Engineering problems: vehicle crashworthiness, car side impact and
//! fed-batch penicillin fermentation.
//!
//! Coefficients, constraint polynomials and fermentation constants follow
//! Tanabe & Ishibuchi (2020) and Liang & Lai (2021) as distributed with the
//! BoTorch test-function suite.

pub fn vehicle_safety(x: &[f64]) -> Vec<f64> {
    let (x1, x2, x3, x4, x5) = (x[0], x[1], x[2], x[3], x[4]);
    let f1 = 1640.2823
        + 2.3573285 * x1
        + 2.3220035 * x2
        + 4.5688768 * x3
        + 7.7213633 * x4
        + 4.4559504 * x5;
    let f2 = 6.5856 + 1.15 * x1 - 1.0427 * x2 + 0.9738 * x3 + 0.8364 * x4 - 0.3695 * x1 * x4
        + 0.0861 * x1 * x5
        + 0.3628 * x2 * x4
        - 0.1106 * x1 * x1
        - 0.3437 * x3 * x3
        + 0.1764 * x4 * x4;
    let f3 = -0.0551 + 0.0181 * x1 + 0.1024 * x2 + 0.0421 * x3 - 0.0073 * x1 * x2 + 0.024 * x2 * x3
        - 0.0118 * x2 * x4
        - 0.0204 * x3 * x4
        - 0.008 * x3 * x5
        - 0.0241 * x2 * x2
        + 0.0109 * x4 * x4;
    vec![f1, f2, f3]
}

/// Ten structural constraints, feasible when `g_i >= 0`.
fn car_side_impact_constraints(x: &[f64], f2: f64, v_mbp: f64, v_fd: f64) -> [f64; 10] {
    let (x1, x2, x3, x4, x5, x6, x7) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6]);
    [
        1.0 - 1.16 + 0.3717 * x2 * x4 + 0.0092928 * x3,
        0.32 - 0.261 + 0.0159 * x1 * x2 + 0.06486 * x1 + 0.019 * x2 * x7
            - 0.0144 * x3 * x5
            - 0.0154464 * x6,
        0.32 - 0.214 - 0.00817 * x5 + 0.045195 * x1 + 0.0135168 * x1 - 0.03099 * x2 * x6
            + 0.018 * x2 * x7
            - 0.007176 * x3
            - 0.023232 * x3
            + 0.00364 * x5 * x6
            + 0.018 * x2 * x2,
        0.32 - 0.74 + 0.61 * x2 + 0.031296 * x3 + 0.031872 * x7 - 0.227 * x2 * x2,
        32.0 - 28.98 - 3.818 * x3 + 4.2 * x1 * x2 - 1.27296 * x6 + 2.68065 * x7,
        32.0 - 33.86 - 2.95 * x3 + 5.057 * x1 * x2 + 3.795 * x2 + 3.4431 * x7 - 1.45728,
        32.0 - 46.36 + 9.9 * x2 + 4.4505 * x1,
        4.0 - f2,
        9.9 - v_mbp,
        15.7 - v_fd,
    ]
}

pub fn car_side_impact(x: &[f64]) -> Vec<f64> {
    let (x1, x2, x3, x4, x5, x6, x7) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6]);
    let f1 =
        1.98 + 4.9 * x1 + 6.67 * x2 + 6.98 * x3 + 4.01 * x4 + 1.78 * x5 + 1e-5 * x6 + 2.73 * x7;
    let f2 = 4.72 - 0.5 * x4 - 0.19 * x2 * x3;
    let v_mbp = 10.58 - 0.674 * x1 * x2 - 0.67275 * x2;
    let v_fd = 16.45 - 0.489 * x3 * x7 - 0.843 * x5 * x6;
    let f3 = 0.5 * (v_mbp + v_fd);
    let f4 = car_side_impact_constraints(x, f2, v_mbp, v_fd)
        .iter()
        .map(|g| (-g).max(0.0))
        .sum();
    vec![f1, f2, f3, f4]
}

/// Fermentation model constants.
pub mod penicillin_constants {
    pub const Y_XS: f64 = 0.45;
    pub const Y_PS: f64 = 0.90;
    pub const K_1: f64 = 1e-10;
    pub const K_2: f64 = 7e-5;
    pub const M_X: f64 = 0.014;
    pub const ALPHA_1: f64 = 0.143;
    pub const ALPHA_2: f64 = 4e-7;
    pub const ALPHA_3: f64 = 1e-4;
    pub const MU_X: f64 = 0.092;
    pub const K_X: f64 = 0.15;
    pub const MU_P: f64 = 0.005;
    pub const K_P: f64 = 0.0002;
    pub const K_I: f64 = 0.10;
    pub const K: f64 = 0.04;
    pub const K_G: f64 = 7.0e3;
    pub const E_G: f64 = 5100.0;
    pub const K_D: f64 = 1e33;
    pub const E_D: f64 = 50000.0;
    pub const LAMBDA: f64 = 2.5e-4;
    /// Kelvin.
    pub const T_V: f64 = 273.0;
    pub const T_O: f64 = 373.0;
    /// cal / (mol K).
    pub const R: f64 = 1.9872;
    pub const V_MAX: f64 = 180.0;
    /// Number of unit time steps simulated at most.
    pub const HORIZON: usize = 2500;
}

/// Explicit unit-step integration of the fed-batch model. Inputs are culture
/// volume, biomass, temperature, glucose, feed rate, feed concentration and
/// pH. Returns (negative yield, CO2, fermentation time).
pub fn penicillin(x: &[f64]) -> Vec<f64> {
    use penicillin_constants::*;
    let (mut v, mut biomass, temp, mut s, feed, s_f, ph) =
        (x[0], x[1], x[2], x[3], x[4], x[5], x[6]);
    let h = 10f64.powf(-ph);
    let (mut p, mut co2) = (0.0, 0.0);
    let mut t_final = HORIZON as f64;
    for t in 1..=HORIZON {
        let f_loss = v * LAMBDA * (5.0 * ((temp - T_O) / (T_V - T_O))).exp_m1();
        let dv = feed - f_loss;
        let mu = (MU_X / (1.0 + K_1 / h + h / K_2))
            * (s / (K_X * biomass + s))
            * (K_G * (-E_G / (R * temp)).exp() - K_D * (-E_D / (R * temp)).exp());
        let dx = mu * biomass - (biomass / v) * dv;
        let mu_pp = MU_P * (s / (K_P + s + s * s / K_I));
        let ds = -(mu / Y_XS) * biomass - (mu_pp / Y_PS) * biomass - M_X * biomass + feed * s_f / v
            - (s / v) * dv;
        let dp = mu_pp * biomass - K * p - (p / v) * dv;
        let dco2 = ALPHA_1 * dx + ALPHA_2 * biomass + ALPHA_3;
        p += dp;
        v += dv;
        biomass += dx;
        s += ds;
        co2 += dco2;
        if v > V_MAX || s < 0.0 || dp < 10e-12 {
            t_final = t as f64;
            break;
        }
    }
    vec![-p, co2, t_final]
}
