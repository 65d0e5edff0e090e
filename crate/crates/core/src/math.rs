//! Combinatorial helpers shared by the element engine and the closed forms.
//!
//! Factorial weights are accumulated in the log domain; `(2N)!` overflows
//! `u64` at `N = 11` and `f64` a little past `170!`.

use alloc::vec::Vec;

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| libm::log(f64::from(k))).sum()
}

/// `ln(n!!)` with `0!! = 1` and `(-1)!! = 1`.
pub fn ln_double_factorial(n: i64) -> f64 {
    let mut acc = 0.0;
    let mut k = n;
    while k > 1 {
        acc += libm::log(k as f64);
        k -= 2;
    }
    acc
}

/// Table of `ln(k!)` for `k = 0..=n`.
pub fn ln_factorial_table(n: u32) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=n {
        acc += libm::log(f64::from(k));
        table.push(acc);
    }
    table
}

/// Exact binomial coefficient. Valid for every `n <= 66` without overflow.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1)
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// `x^k` by repeated multiplication, with `0^0 = 1`.
pub fn powu(x: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_rows() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 6), 0);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }

    #[test]
    fn factorial_logs() {
        assert!((libm::exp(ln_factorial(5)) - 120.0).abs() < 1e-9);
        assert_eq!(ln_factorial(0), 0.0);
        assert!((libm::exp(ln_double_factorial(5)) - 15.0).abs() < 1e-9);
        assert!((libm::exp(ln_double_factorial(6)) - 48.0).abs() < 1e-9);
        assert_eq!(ln_double_factorial(0), 0.0);
        assert_eq!(ln_double_factorial(-1), 0.0);
        let table = ln_factorial_table(10);
        assert!((table[10] - ln_factorial(10)).abs() < 1e-12);
    }

    #[test]
    fn integer_powers() {
        assert_eq!(powu(0.0, 0), 1.0);
        assert_eq!(powu(2.0, 10), 1024.0);
        assert_eq!(powu(-0.5, 3), -0.125);
    }
}
