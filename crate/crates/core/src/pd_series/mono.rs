use std::fmt;

pub const MAX_VARS: usize = 8;

/// Multi-index packed one byte per variable, variable 0 in the most
/// significant byte, so the integer order is lexicographic with X_1 first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(pub u64);

impl Mono {
    pub const ZERO: Mono = Mono(0);
    pub const MAX_EXP: usize = 255;

    fn shift(v: usize) -> u32 {
        (8 * (MAX_VARS - 1 - v)) as u32
    }

    pub fn from_slice(idx: &[usize]) -> Mono {
        assert!(idx.len() <= MAX_VARS, "too many variables");
        let mut x = 0u64;
        for (v, &e) in idx.iter().enumerate() {
            assert!(e <= Self::MAX_EXP, "exponent too large");
            x |= (e as u64) << Self::shift(v);
        }
        Mono(x)
    }

    pub fn get(self, v: usize) -> usize {
        ((self.0 >> Self::shift(v)) & 0xff) as usize
    }

    pub fn with(self, v: usize, e: usize) -> Mono {
        let s = Self::shift(v);
        Mono((self.0 & !(0xffu64 << s)) | ((e as u64) << s))
    }

    pub fn degree(self) -> usize {
        self.0.to_be_bytes().iter().map(|&b| b as usize).sum()
    }

    /// Bytewise sum; callers keep total degree ≤ 255.
    pub fn add(self, other: Mono) -> Mono {
        Mono(self.0 + other.0)
    }

    pub fn to_vec(self, nvars: usize) -> Vec<usize> {
        (0..nvars).map(|v| self.get(v)).collect()
    }

    /// Shift variables at positions ≥ pos one slot right.
    pub fn insert_zero(self, pos: usize, nvars: usize) -> Mono {
        let mut v = self.to_vec(nvars);
        v.insert(pos, 0);
        Mono::from_slice(&v)
    }

    /// Drop the variable at `pos` (its exponent is discarded).
    pub fn remove(self, pos: usize, nvars: usize) -> Mono {
        let mut v = self.to_vec(nvars);
        v.remove(pos);
        Mono::from_slice(&v)
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = self.0.to_be_bytes();
        let last = bytes.iter().rposition(|&b| b != 0).unwrap_or(0);
        write!(f, "{:?}", &bytes[..=last])
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
