//! Counter-based random numbers.
//!
//! Every hidden variable of a trial is addressed by `(seed, trial_index,
//! draw_index)` and produced by a pure function of that address, so an
//! ensemble can be split across any number of workers and still reproduce the
//! same realizations bit for bit.
//!
//! The bit source is Philox4x32-10: the 64-bit seed is the key, the trial and
//! draw indices form the 128-bit counter.

use crate::field::ComplexAmp;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

/// Address of a single hidden-variable draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DrawAddress {
    pub seed: u64,
    pub trial_index: u64,
    pub draw_index: u64,
}

impl DrawAddress {
    pub fn new(seed: u64, trial_index: u64, draw_index: u64) -> Self {
        Self {
            seed,
            trial_index,
            draw_index,
        }
    }
}

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// The Philox4x32 bijection with 10 rounds.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut ctr = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0];
    }
    ctr
}

/// 128 random bits for an address, as two 64-bit words.
#[inline]
pub fn random_words(addr: DrawAddress) -> (u64, u64) {
    let counter = [
        addr.draw_index as u32,
        (addr.draw_index >> 32) as u32,
        addr.trial_index as u32,
        (addr.trial_index >> 32) as u32,
    ];
    let key = [addr.seed as u32, (addr.seed >> 32) as u32];
    let out = philox4x32_10(counter, key);
    (
        u64::from(out[0]) | (u64::from(out[1]) << 32),
        u64::from(out[2]) | (u64::from(out[3]) << 32),
    )
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Uniform on (0, 1].
#[inline(always)]
fn open_unit(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * INV_2_53
}

/// Uniform on [0, 1).
#[inline(always)]
fn half_open_unit(word: u64) -> f64 {
    (word >> 11) as f64 * INV_2_53
}

/// Standard complex Gaussian `z = (x + iy)/sqrt(2)` with `x, y` independent
/// unit normals from a Box-Muller transform of the counter output.
///
/// Since `x^2 + y^2 = -2 ln u1`, the modulus of `z` is `sqrt(-ln u1)`.
#[inline]
pub fn sample_standard_complex_gaussian(addr: DrawAddress) -> ComplexAmp {
    let (w1, w2) = random_words(addr);
    let radius = (-open_unit(w1).ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * half_open_unit(w2)).sin_cos();
    ComplexAmp::new(radius * c, radius * s)
}
