//! Classical precomputation of the constants wired into the networks.

use super::{ArithError, ModulusContext};
use num_integer::Integer;

/// `a·b mod n`.
pub fn mod_mul(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `x^e mod n` by repeated squaring.
pub fn mod_pow(x: u64, mut e: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut base = x % n;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, base, n);
        }
        base = mod_mul(base, base, n);
        e >>= 1;
    }
    acc
}

/// Inverse of `x` modulo `n`.
pub fn mod_inverse(x: u64, n: u64) -> Result<u64, ArithError> {
    let g = (x as i128).extended_gcd(&(n as i128));
    if g.gcd != 1 {
        return Err(ArithError::NotInvertible { x, n });
    }
    Ok(g.x.rem_euclid(n as i128) as u64)
}

/// `[a, 2a, 4a, …]` mod `n`, `k` entries.
pub fn doubling_table(a: u64, n: u64, k: u32) -> Vec<u64> {
    let mut out = Vec::with_capacity(k as usize);
    let mut d = a % n;
    for _ in 0..k {
        out.push(d);
        d = mod_mul(d, 2, n);
    }
    out
}

/// Constants of an exponentiation network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precomputed {
    /// `x^(2^i) mod N` for `i < L`.
    pub powers: Vec<u64>,
    /// Inverses of `powers`.
    pub inverses: Vec<u64>,
}

/// Powers `x^(2^i)` and their inverses for an `l`-bit exponent.
pub fn classical_precompute(x: u64, ctx: ModulusContext, l: u32) -> Result<Precomputed, ArithError> {
    if l == 0 {
        return Err(ArithError::EmptyInput);
    }
    let n = ctx.n();
    ctx.check_operand(x)?;
    let mut powers = Vec::with_capacity(l as usize);
    let mut inverses = Vec::with_capacity(l as usize);
    let mut p = x;
    for _ in 0..l {
        powers.push(p);
        inverses.push(mod_inverse(p, n).map_err(|_| ArithError::NotInvertible { x, n })?);
        p = mod_mul(p, p, n);
    }
    Ok(Precomputed { powers, inverses })
}
