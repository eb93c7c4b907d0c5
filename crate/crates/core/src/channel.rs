//! The i.i.d. deletion channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{BitString, Trace};

/// Deletion probability and trace count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub p: f64,
    pub t: usize,
}

impl ChannelSpec {
    pub fn new(p: f64, t: usize) -> Option<Self> {
        (p > 0.0 && p < 0.5 && t >= 1).then_some(Self { p, t })
    }

    pub fn generate(&self, x: &BitString, seed: u64) -> Vec<Trace> {
        generate_traces(x, self.p, self.t, seed)
    }
}

/// Deletes each bit independently with probability `p`, drawing exactly one
/// uniform per input bit in index order.
pub fn transmit<R: Rng + ?Sized>(x: &BitString, p: f64, rng: &mut R) -> Trace {
    let mut out = BitString::new();
    for b in x.iter() {
        if rng.gen::<f64>() >= p {
            out.push(b);
        }
    }
    Trace::new(out, x.len())
}

/// `t` independent traces; trace `j` uses the stream seeded by
/// `substream(seed, j)`.
pub fn generate_traces(x: &BitString, p: f64, t: usize, seed: u64) -> Vec<Trace> {
    (0..t)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(substream(seed, j as u64));
            transmit(x, p, &mut rng)
        })
        .collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `seed`: a 64-bit avalanche mix of both.
pub fn substream(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x6a09_e667_f3bc_c909)))
}
