//! Floating-point quadrature of the Fourier identity
//! `P(S = a) = int_0^1 e(-a t) prod_i (1 - mu + mu cos 2 pi v_i t) dt`.
//!
//! This is the only floating-point code in the crate.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::numeric::Density;
use crate::walks::Word;

/// `cos(2 pi x j / nodes)` with the phase reduced exactly modulo `nodes`.
fn cos_phase(x: &BigInt, j: u64, nodes: u64) -> f64 {
    let r = x.mod_floor(&BigInt::from(nodes)).to_u64().expect("residue fits");
    let phase = ((r as u128 * j as u128) % nodes as u128) as f64 / nodes as f64;
    (TAU * phase).cos()
}

/// Composite trapezoid rule with `nodes` equal subintervals of `[0, 1]`.
///
/// The integrand is 1-periodic and its imaginary part is odd, so the rule reduces to the
/// average of the real part over `t = j / nodes`.
pub fn fourier_quadrature(v: &Word, mu: Density, a: &BigInt, nodes: u64) -> f64 {
    assert!(nodes >= 2, "at least two nodes are required");
    let m = mu.numer() as f64 / mu.denom() as f64;
    let mut total = 0.0;
    for j in 0..nodes {
        let mut f = cos_phase(a, j, nodes);
        for x in v.entries() {
            f *= 1.0 - m + m * cos_phase(x, j, nodes);
        }
        total += f;
    }
    total / nodes as f64
}
