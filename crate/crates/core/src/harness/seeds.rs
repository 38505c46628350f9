//! Deterministic child-seed derivation.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function; a bijection on `u64`.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `root`. Distinct indices give distinct seeds.
pub fn child_seed(root: u64, index: u64) -> u64 {
    splitmix64(root.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

/// Seed layout of one grid cell (sweep value × repetition): slot 0 samples the
/// instance and offline log, slot 1 drives the online environment (shared by
/// every policy of the cell), slot `2 + k` belongs to policy `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSeeds {
    root: u64,
    base: u64,
}

impl CellSeeds {
    pub fn new(root: u64, cell: u64, n_policies: usize) -> Self {
        Self {
            root,
            base: cell * (n_policies as u64 + 2),
        }
    }

    pub fn instance(&self) -> u64 {
        child_seed(self.root, self.base)
    }

    pub fn environment(&self) -> u64 {
        child_seed(self.root, self.base + 1)
    }

    pub fn policy(&self, k: usize) -> u64 {
        child_seed(self.root, self.base + 2 + k as u64)
    }
}
