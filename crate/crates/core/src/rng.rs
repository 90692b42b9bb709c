//! Counter-based deterministic random streams.
//!
//! The generator is Philox 4x32-10 with the published round constants, chosen
//! because counter-based generation gives every simulated transaction its own
//! independent substream addressed by (seed, domain, index). Results are
//! therefore identical no matter how work is split across workers, and seeds
//! are portable to any other Philox implementation.
//!
//! This generator is not cryptographically secure and must never be used for
//! secrets.

const MULTIPLIER_0: u32 = 0xD251_1F53;
const MULTIPLIER_1: u32 = 0xCD9E_8D57;
const KEY_BUMP_0: u32 = 0x9E37_79B9;
const KEY_BUMP_1: u32 = 0xBB67_AE85;
const ROUNDS: u32 = 10;

/// One Philox 4x32-10 block: four 32-bit words from a counter and key.
pub fn philox4x32(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let [mut x0, mut x1, mut x2, mut x3] = counter;
    let [mut k0, mut k1] = key;
    for round in 0..ROUNDS {
        let p0 = (MULTIPLIER_0 as u64).wrapping_mul(x0 as u64);
        let p1 = (MULTIPLIER_1 as u64).wrapping_mul(x2 as u64);
        let (hi0, lo0) = ((p0 >> 32) as u32, p0 as u32);
        let (hi1, lo1) = ((p1 >> 32) as u32, p1 as u32);
        x0 = hi1 ^ x1 ^ k0;
        x1 = lo1;
        x2 = hi0 ^ x3 ^ k1;
        x3 = lo0;
        if round < ROUNDS - 1 {
            k0 = k0.wrapping_add(KEY_BUMP_0);
            k1 = k1.wrapping_add(KEY_BUMP_1);
        }
    }
    [x0, x1, x2, x3]
}

/// Independent substream addressed by (seed, domain, index).
///
/// `domain` separates unrelated uses of the same seed (transaction sampling
/// vs. panel noise); `index` is the per-unit address (transaction number,
/// record number). Each block of the substream yields two 64-bit draws.
#[derive(Clone, Debug)]
pub struct Substream {
    key: [u32; 2],
    index: u64,
    domain: u32,
    block: u32,
    buffer: [u32; 4],
    drawn: u8,
}

/// Domain tag for transaction simulation draws.
pub const DOMAIN_TRANSACTIONS: u32 = 0;
/// Domain tag for synthetic-panel noise draws.
pub const DOMAIN_PANEL_NOISE: u32 = 1;

impl Substream {
    pub fn new(seed: u64, domain: u32, index: u64) -> Substream {
        let mut stream = Substream {
            key: [seed as u32, (seed >> 32) as u32],
            index,
            domain,
            block: 0,
            buffer: [0; 4],
            drawn: 2,
        };
        stream.refill();
        stream
    }

    fn refill(&mut self) {
        self.buffer = philox4x32(
            [self.index as u32, (self.index >> 32) as u32, self.block, self.domain],
            self.key,
        );
        self.block = self.block.wrapping_add(1);
        self.drawn = 0;
    }

    /// Next 64-bit draw from this substream.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        if self.drawn == 2 {
            self.refill();
        }
        let half = 2 * self.drawn as usize;
        self.drawn += 1;
        ((self.buffer[half] as u64) << 32) | self.buffer[half + 1] as u64
    }

    /// Uniform draw in the half-open interval (0, 1], suitable for logs.
    #[inline]
    pub fn next_f64_positive(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// One standard normal draw (Box-Muller on two uniform draws).
    pub fn next_standard_normal(&mut self) -> f64 {
        let u1 = self.next_f64_positive();
        let u2 = self.next_f64_positive();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
