//! Counter-keyed Gaussian increments.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Standard normals keyed by `(seed, trajectory, mode, step)`.
///
/// Each key owns four 64-bit words of a ChaCha8 stream: the stream id is the
/// trajectory and the word position is `((mode << 32) + step) · 8`. Reading
/// a key never depends on which other keys were read before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseStream {
    pub seed: u64,
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Generator positioned at `(trajectory, mode, step)`; successive draws
    /// of four words walk through consecutive steps of the same mode.
    pub fn cursor(&self, trajectory: u64, mode: u64, step: u64) -> NormalCursor {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trajectory);
        rng.set_word_pos((((mode as u128) << 32) + step as u128) * 8);
        NormalCursor { rng }
    }

    pub fn normals(&self, trajectory: u64, mode: u64, step: u64) -> [f64; 4] {
        self.cursor(trajectory, mode, step).next_step()
    }
}

pub struct NormalCursor {
    rng: ChaCha8Rng,
}

impl NormalCursor {
    /// Four standard normals from the next key (Box–Muller on two pairs).
    pub fn next_step(&mut self) -> [f64; 4] {
        let w: [u64; 4] = std::array::from_fn(|_| self.rng.next_u64());
        let (a, b) = box_muller(w[0], w[1]);
        let (c, d) = box_muller(w[2], w[3]);
        [a, b, c, d]
    }
}

fn unit_open(w: u64) -> f64 {
    // (0, 1]
    ((w >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn box_muller(w1: u64, w2: u64) -> (f64, f64) {
    let r = (-2.0 * unit_open(w1).ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * unit_open(w2)).sin_cos();
    (r * c, r * s)
}
