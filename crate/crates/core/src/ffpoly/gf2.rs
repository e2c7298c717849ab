//! Bit-packed polynomials over `F_2` (bit `i` is the coefficient of `x^i`),
//! used to sweep millions of candidates in the pigeonhole search.

fn degree(f: u64) -> u32 {
    63 - f.leading_zeros()
}

#[cfg(test)]
/// Carry-less product of two polynomials of degree < 64.
fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut b = b;
    let a = u128::from(a);
    let mut shift = 0;
    while b != 0 {
        let tz = b.trailing_zeros();
        shift += tz;
        acc ^= a << shift;
        b >>= tz;
        b &= !1;
    }
    acc
}

/// Square via bit spreading.
fn square(a: u64) -> u128 {
    let mut x = u128::from(a);
    x = (x | (x << 32)) & 0x0000_0000_FFFF_FFFF_0000_0000_FFFF_FFFF;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF_0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF_00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333_3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555_5555_5555_5555_5555;
    x
}

fn reduce(mut x: u128, f: u64) -> u64 {
    let n = degree(f);
    let f = u128::from(f);
    while x >> n != 0 {
        let top = 127 - x.leading_zeros();
        x ^= f << (top - n);
    }
    x as u64
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = reduce(u128::from(a), b);
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
pub(crate) fn mul_mod(a: u64, b: u64, f: u64) -> u64 {
    reduce(clmul(a, b), f)
}

/// Rabin's test for a polynomial of degree `1..=63`.
pub(crate) fn is_irreducible(f: u64, prime_divisors_of_degree: &[u32]) -> bool {
    if f < 2 {
        return false;
    }
    let n = degree(f);
    if n == 1 {
        return true;
    }
    // Divisible by x or by x + 1.
    if f & 1 == 0 || f.count_ones().is_multiple_of(2) {
        return false;
    }
    let x = 2u64;
    let mut checkpoints: Vec<u32> = prime_divisors_of_degree.iter().map(|&r| n / r).collect();
    checkpoints.sort_unstable();
    let mut h = x;
    let mut done = 0;
    for &k in &checkpoints {
        while done < k {
            h = reduce(square(h), f);
            done += 1;
        }
        if gcd(f, h ^ x) != 1 {
            return false;
        }
    }
    while done < n {
        h = reduce(square(h), f);
        done += 1;
    }
    h == x
}
