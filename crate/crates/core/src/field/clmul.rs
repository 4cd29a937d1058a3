//! Carry-less multiplication of 128-bit binary polynomials.
//!
//! Uses PCLMULQDQ when the CPU has it, a 4-bit window table otherwise.

/// Product as (high, low) 128-bit halves.
#[inline]
pub fn mul128(a: u128, b: u128) -> (u128, u128) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: the feature was detected at runtime.
            return unsafe { mul128_pclmul(a, b) };
        }
    }
    mul128_portable(a, b)
}

pub fn hardware_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("pclmulqdq")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

#[inline]
fn combine(lo: u128, mid: u128, hi: u128) -> (u128, u128) {
    (hi ^ (mid >> 64), lo ^ (mid << 64))
}

pub fn mul128_portable(a: u128, b: u128) -> (u128, u128) {
    let (a0, a1) = (a as u64, (a >> 64) as u64);
    let (b0, b1) = (b as u64, (b >> 64) as u64);
    let lo = mul64_portable(a0, b0);
    let hi = mul64_portable(a1, b1);
    let mid = mul64_portable(a0 ^ a1, b0 ^ b1) ^ lo ^ hi;
    combine(lo, mid, hi)
}

fn mul64_portable(a: u64, b: u64) -> u128 {
    let mut table = [0u128; 16];
    table[1] = a as u128;
    for k in 1..8 {
        table[2 * k] = table[k] << 1;
        table[2 * k + 1] = table[2 * k] ^ a as u128;
    }
    let mut acc = 0u128;
    for i in (0..16).rev() {
        acc = (acc << 4) ^ table[((b >> (4 * i)) & 0xf) as usize];
    }
    acc
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn mul128_pclmul(a: u128, b: u128) -> (u128, u128) {
    use std::arch::x86_64::*;
    let va = _mm_set_epi64x((a >> 64) as i64, a as i64);
    let vb = _mm_set_epi64x((b >> 64) as i64, b as i64);
    let lo = _mm_clmulepi64_si128(va, vb, 0x00);
    let hi = _mm_clmulepi64_si128(va, vb, 0x11);
    let m1 = _mm_clmulepi64_si128(va, vb, 0x01);
    let m2 = _mm_clmulepi64_si128(va, vb, 0x10);
    let mid = _mm_xor_si128(m1, m2);
    let to_u128 = |v: __m128i| -> u128 {
        let mut out = [0u8; 16];
        _mm_storeu_si128(out.as_mut_ptr() as *mut __m128i, v);
        u128::from_le_bytes(out)
    };
    combine(to_u128(lo), to_u128(mid), to_u128(hi))
}
