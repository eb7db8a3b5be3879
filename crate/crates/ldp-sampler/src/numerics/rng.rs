//! Deterministic counter-based random streams.
//!
//! Streams are value types keyed by (seed, labels, indices). Forking a child
//! stream never mutates the parent, so per-client work can be scheduled in any
//! order — including in parallel — without changing the draws.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator with cheap keyed forking.
#[derive(Clone, Copy, Debug)]
pub struct KeyedRng {
    state: u64,
}

impl KeyedRng {
    pub fn new(seed: u64) -> Self {
        KeyedRng {
            state: mix64(seed.wrapping_add(GOLDEN)),
        }
    }

    /// Fork a stream labelled by a string tag. Identical tags on the same
    /// parent yield identical streams.
    pub fn child(&self, tag: &str) -> Self {
        let mut h = self.state;
        for &b in tag.as_bytes() {
            h = mix64(h ^ (b as u64).wrapping_mul(GOLDEN));
        }
        KeyedRng { state: mix64(h) }
    }

    /// Fork a stream labelled by an index (e.g. a client id).
    pub fn child_index(&self, index: u64) -> Self {
        KeyedRng {
            state: mix64(self.state ^ index.wrapping_mul(GOLDEN).wrapping_add(1)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw on [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw on (0, 1); never returns exactly zero.
    pub fn open01(&mut self) -> f64 {
        loop {
            let u = self.next_f64();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Unit-rate exponential draw.
    pub fn exp1(&mut self) -> f64 {
        -self.open01().ln()
    }

    /// Standard Laplace draw (location 0, scale 1) by inverse CDF.
    pub fn laplace_std(&mut self) -> f64 {
        let u = self.open01() - 0.5;
        -u.signum() * (1.0 - 2.0 * u.abs()).ln()
    }

    /// Poisson draw by Knuth's product method (fine for small means).
    pub fn poisson(&mut self, mean: f64) -> u64 {
        assert!(mean >= 0.0, "poisson mean must be nonnegative");
        let limit = (-mean).exp();
        let mut k = 0u64;
        let mut prod = 1.0;
        loop {
            prod *= self.next_f64();
            if prod <= limit {
                return k;
            }
            k += 1;
        }
    }

    /// Index draw from a normalized weight vector by inverse CDF.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        weights.len() - 1
    }
}
