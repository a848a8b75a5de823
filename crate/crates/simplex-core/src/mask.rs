//! Subsets of support positions as bitmasks.

pub type Mask = u16;

pub const MAX_SUPPORT: usize = 16;

pub fn full(n: usize) -> Mask {
    if n >= 16 {
        u16::MAX
    } else {
        ((1u32 << n) - 1) as Mask
    }
}

pub fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..16).filter(move |i| m >> i & 1 == 1)
}

pub fn popcount(m: Mask) -> usize {
    m.count_ones() as usize
}

pub fn is_subset(u: Mask, v: Mask) -> bool {
    u & !v == 0
}

/// Packs the bits of `u` that sit at positions set in `p`.
pub fn compress(u: Mask, p: Mask) -> Mask {
    let mut out = 0;
    for (k, i) in bits(p).enumerate() {
        if u >> i & 1 == 1 {
            out |= 1 << k;
        }
    }
    out
}

/// Inverse of [`compress`].
pub fn expand(c: Mask, p: Mask) -> Mask {
    let mut out = 0;
    for (k, i) in bits(p).enumerate() {
        if c >> k & 1 == 1 {
            out |= 1 << i;
        }
    }
    out
}

/// All subsets of `v`, in increasing numeric order.
pub fn subsets(v: Mask) -> Vec<Mask> {
    let mut out = Vec::with_capacity(1 << popcount(v));
    let mut u: Mask = 0;
    loop {
        out.push(u);
        if u == v {
            break;
        }
        u = (u.wrapping_sub(v)) & v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compress_expand_round_trip() {
        let p = 0b1011_0110;
        for u in subsets(p) {
            assert_eq!(expand(compress(u, p), p), u);
        }
        assert_eq!(compress(0b0100, 0b0110), 0b10);
    }

    #[test]
    fn subsets_of_three_bits() {
        assert_eq!(subsets(0b101), vec![0, 1, 4, 5]);
        assert_eq!(subsets(0).len(), 1);
    }
}
