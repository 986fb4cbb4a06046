//! Forward discrete Fourier transform for arbitrary lengths.
//!
//! Powers of two use an iterative radix-2 kernel; every other length goes
//! through Bluestein's chirp-z construction on top of it.

#[allow(unused_imports)] // Inherent methods take over when std is linked.
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// `X_k = sum_j x_j exp(-2 pi i k j / n)` for `k = 0..n`.
pub fn fft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    if n <= 1 {
        return input.to_vec();
    }
    if n.is_power_of_two() {
        let mut buf = input.to_vec();
        radix2(&mut buf, false);
        return buf;
    }
    bluestein(input)
}

/// Transform of a real sequence.
pub fn fft_real(values: &[f64]) -> Vec<Complex64> {
    let input: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft(&input)
}

fn twiddle(k: usize, n: usize, inverse: bool) -> Complex64 {
    let angle = 2.0 * PI * k as f64 / n as f64;
    let sign = if inverse { 1.0 } else { -1.0 };
    Complex64::new(angle.cos(), sign * angle.sin())
}

/// In-place unscaled radix-2 transform; `buf.len()` must be a power of two.
fn radix2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let table: Vec<Complex64> = (0..n / 2).map(|k| twiddle(k, n, inverse)).collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let w = table[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w;
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

fn bluestein(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    let m = (2 * n - 1).next_power_of_two();
    // w_k = exp(-i pi k^2 / n); k^2 is reduced mod 2n to keep the angle small.
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k2 = ((k as u128 * k as u128) % (2 * n as u128)) as f64;
            let angle = PI * k2 / n as f64;
            Complex64::new(angle.cos(), -angle.sin())
        })
        .collect();
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for (slot, (x, w)) in a.iter_mut().zip(input.iter().zip(&chirp)) {
        *slot = x * w;
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    radix2(&mut a, false);
    radix2(&mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    radix2(&mut a, true);
    let scale = 1.0 / m as f64;
    (0..n).map(|k| a[k] * scale * chirp[k]).collect()
}
