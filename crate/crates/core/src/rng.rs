//! Reproducible random streams.
//!
//! Every experiment is driven by one master seed. Independent tasks (trials,
//! rounds, samples) get their own generator through [`Seed::child`], which
//! mixes the parent seed and the task index with the SplitMix64 finalizer.
//! Because a child depends only on `(parent, index)`, results do not depend
//! on the order in which tasks run.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the toolkit.
pub type QRng = ChaCha8Rng;

/// A node in the seed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Seed of the `index`-th independent sub-task.
    pub fn child(self, index: u64) -> Seed {
        Seed(splitmix64(splitmix64(self.0) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03)))
    }

    pub fn rng(self) -> QRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Draws a fresh seed from an existing generator, so that operations
    /// taking `&mut impl Rng` can fan out into per-task streams.
    pub fn draw<R: RngCore + ?Sized>(rng: &mut R) -> Seed {
        Seed(rng.next_u64())
    }
}

/// Generator for the `stream`-th task under `master`.
pub fn stream(master: u64, stream: u64) -> QRng {
    Seed(master).child(stream).rng()
}
