/// Stateless, counter-based uniform random numbers.
///
/// A value is a pure function of the stream seed and an ordered list of
/// integer coordinates (grid vertex, tree node, draw index, ...), so the same
/// coordinates always reproduce the same number regardless of evaluation
/// order or thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    seed: u64,
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomStream {
    pub const fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Hash of the seed and `coords`, order sensitive.
    #[inline]
    pub fn hash(&self, coords: &[u64]) -> u64 {
        let mut h = mix64(self.seed.wrapping_add(GOLDEN_GAMMA));
        for &c in coords {
            h = mix64(h ^ c.wrapping_add(GOLDEN_GAMMA).wrapping_mul(0xff51_afd7_ed55_8ccd));
        }
        h
    }

    /// Uniform in `[0, 1)` with 32-bit resolution.
    #[inline]
    pub fn uniform(&self, coords: &[u64]) -> f64 {
        (self.hash(coords) >> 32) as f64 * (1.0 / 4_294_967_296.0)
    }

    /// A derived stream, e.g. one per grid vertex.
    pub fn fork(&self, coords: &[u64]) -> RandomStream {
        RandomStream::new(self.hash(coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_order_sensitive() {
        let s = RandomStream::new(42);
        assert_eq!(s.uniform(&[1, 2, 3]), s.uniform(&[1, 2, 3]));
        assert_ne!(s.uniform(&[1, 2, 3]), s.uniform(&[3, 2, 1]));
        assert_ne!(s.uniform(&[1, 2, 3]), RandomStream::new(43).uniform(&[1, 2, 3]));
        let v = s.uniform(&[9]);
        assert!((0.0..1.0).contains(&v));
    }

    #[test]
    fn chi_square_uniformity() {
        // 2¹⁶ buckets, 2²⁴ draws over sequential coordinates.
        let s = RandomStream::new(0xdead_beef);
        let buckets = 1usize << 16;
        let draws = 1u64 << 24;
        let mut counts = vec![0u32; buckets];
        for i in 0..draws {
            let u = s.uniform(&[i >> 12, i & 0xfff, 1]);
            counts[(u * buckets as f64) as usize] += 1;
        }
        let expected = draws as f64 / buckets as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // dof = 65535; mean 65535, sd ≈ 362. Accept within 5 sd.
        let dof = (buckets - 1) as f64;
        assert!((chi2 - dof).abs() < 5.0 * (2.0 * dof).sqrt(), "chi2 = {chi2}");
    }
}
