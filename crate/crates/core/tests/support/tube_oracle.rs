//! Brute-force oracle for the tube-flow coefficient law.
//!
//! It re-implements the deformation recursion from scratch on
//! integer coefficients and shares no code with the crate. With ħ = −1/2 the
//! scaled iterates `w_m = 2^m u_m` satisfy
//! `w_m = (2χ_m − 1)(w_{m−1} − w_{m−1}|_{t=a}) + I L w_{m−1}`,
//! which stays in the integers.

use std::collections::BTreeMap;

/// (time power k, radial exponent n) → integer coefficient.
type Poly = BTreeMap<(u32, i32), i128>;

fn radial_op(p: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&(k, n), &c) in p {
        if n != 0 {
            *out.entry((k, n - 2)).or_insert(0) += c * (n as i128) * (n as i128);
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

// Higher time powers never feed lower ones, so tracking stops here.
const MAX_POWER: u32 = 8;

fn integrate(p: &Poly) -> Poly {
    p.iter()
        .filter(|(&(k, _), _)| k < MAX_POWER)
        .map(|(&(k, n), &c)| ((k + 1, n), c))
        .collect()
}

fn add_scaled(into: &mut Poly, p: &Poly, s: i128) {
    for (&key, &c) in p {
        *into.entry(key).or_insert(0) += s * c;
    }
    into.retain(|_, c| *c != 0);
}

fn at_initial_time(p: &Poly) -> Poly {
    p.iter()
        .filter(|(&(k, _), _)| k == 0)
        .map(|(&key, &c)| (key, c))
        .collect()
}

/// Scaled iterates w_0 … w_M for u(r, a) = r, ν = 1, ħ = −1/2.
pub fn oracle_iterates(m_max: usize) -> Vec<Poly> {
    let mut w = vec![Poly::from([((0, 1), 1)])];
    for m in 1..=m_max {
        let chi = if m <= 1 { 0 } else { 1 };
        let prev = &w[m - 1];
        let mut next = Poly::new();
        add_scaled(&mut next, prev, 2 * chi - 1);
        add_scaled(&mut next, &at_initial_time(prev), -(2 * chi - 1));
        add_scaled(&mut next, &integrate(&radial_op(prev)), 1);
        w.push(next);
    }
    w
}

/// Σ_m u_m at power k, i.e. Σ_m w_m[k] / 2^m, summed until the tail is negligible.
pub fn oracle_coefficients(k_max: u32) -> Vec<f64> {
    let w = oracle_iterates(90);
    (1..=k_max)
        .map(|k| {
            let n = 1 - 2 * k as i32;
            w.iter()
                .enumerate()
                .map(|(m, p)| p.get(&(k, n)).copied().unwrap_or(0) as f64 / 2f64.powi(m as i32))
                .sum()
        })
        .collect()
}
