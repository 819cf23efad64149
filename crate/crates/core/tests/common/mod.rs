//! Reference SplitMix64, written from the published algorithm and kept
//! separate from the library. Nothing here calls into `stagegen`.
#![allow(dead_code)]

pub const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Frozen outputs, computed once by an unrelated implementation.
pub const SEED0_FIRST5: [u64; 5] = [
    0xe220a8397b1dcdaf,
    0x6e789e6aa1b965f4,
    0x06c45d188009454f,
    0xf88bb8a8724c81ec,
    0x1b39896a51a8749b,
];

/// Per seed `k` in `0..10`: output 0, output 999 and an FNV-style fold of
/// outputs 0..1000.
pub const FIRST_1000: [(u64, u64, u64); 10] = [
    (0xe220a8397b1dcdaf, 0x14e0abb2bfcf7c3e, 0xcc684c11d4d3419b),
    (0x910a2dec89025cc1, 0xe71894b1b5034fb7, 0x19982304597e1152),
    (0x975835de1c9756ce, 0x509b3463d01d7ad8, 0x10eb45212020d5f8),
    (0x1d0b14e4db018fed, 0x0ddc241cadf746e9, 0x6dba76eaca2061aa),
    (0x6e73e372e2338aca, 0x510e1b5364640f85, 0x4e172398480ef3e1),
    (0x63033b0ca389c35a, 0x3cb3d30097571af0, 0x7e8c5c71df83e536),
    (0xbd64a5d9adefe000, 0x89d173faa437fab2, 0x71458dc640737b89),
    (0x63cbe1e459320dd7, 0x9793fb91046fffee, 0x9afade105bd58f84),
    (0x9e5651b0ef953636, 0xb12b5e115cc067ef, 0x7925c5f99c6f34d9),
    (0xaeaf52febe706064, 0x0948adcd9e2f27ab, 0x2d79b50a826aaad3),
];

/// Child of `Oracle::new(42)` after one split: state, gamma, first three
/// outputs; then the parent's next output.
pub const SPLIT42: (u64, u64, [u64; 3], u64) = (
    0xbdd732262feb6e95,
    0x077fb59b63a77005,
    [0x97c372be01959835, 0x4b16e43727c1d26c, 0x1043c9a4ab8b3c49],
    0x47526757130f9f52,
);

pub fn fold(words: impl IntoIterator<Item = u64>) -> u64 {
    words
        .into_iter()
        .fold(0, |acc, w| (acc ^ w).wrapping_mul(0x0000_0100_0000_01b3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub seed: u64,
    pub gamma: u64,
}

fn finalize(x: u64) -> u64 {
    let x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    let x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn gamma_of(x: u64) -> u64 {
    let x = (x ^ (x >> 33)).wrapping_mul(0xff51_afd7_ed55_8ccd);
    let x = (x ^ (x >> 33)).wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    let x = (x ^ (x >> 33)) | 1;
    let transitions = (x ^ (x >> 1)).count_ones();
    if transitions < 24 {
        x ^ 0xaaaa_aaaa_aaaa_aaaa
    } else {
        x
    }
}

impl Oracle {
    pub fn new(seed: u64) -> Oracle {
        Oracle { seed, gamma: GOLDEN }
    }

    fn advance(&mut self) -> u64 {
        self.seed = self.seed.wrapping_add(self.gamma);
        self.seed
    }

    pub fn next(&mut self) -> u64 {
        let s = self.advance();
        finalize(s)
    }

    pub fn split(&mut self) -> Oracle {
        let s = self.advance();
        let g = self.advance();
        Oracle {
            seed: finalize(s),
            gamma: gamma_of(g),
        }
    }

    /// Uniform in `[lo, hi]` by masking and rejection; no draw for a
    /// one-element range.
    pub fn below_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        let span = hi.wrapping_sub(lo) as u64;
        if span == 0 {
            return lo;
        }
        let bits = 64 - span.leading_zeros();
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        loop {
            let d = self.next() & mask;
            if d <= span {
                return lo.wrapping_add(d as i64);
            }
        }
    }
}
