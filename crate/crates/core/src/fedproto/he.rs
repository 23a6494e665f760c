//! Additive homomorphic encryption interface, fixed-point encoding, and the
//! operation counters that drive the training-cost objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional bits of the fixed-point message encoding.
pub const FIXED_POINT_BITS: u32 = 40;
const FIXED_POINT_SCALE: f64 = (1u64 << FIXED_POINT_BITS) as f64;
/// Largest encodable magnitude; sums of many encoded values must still fit in `i128`.
const FIXED_POINT_LIMIT: f64 = (1u128 << 100) as f64;

pub fn encode_fixed(value: f64) -> Result<i128> {
    let scaled = value * FIXED_POINT_SCALE;
    if !scaled.is_finite() || scaled.abs() >= FIXED_POINT_LIMIT {
        return Err(Error::Range { value });
    }
    Ok(scaled.round() as i128)
}

pub fn decode_fixed(message: i128) -> f64 {
    message as f64 / FIXED_POINT_SCALE
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendTag {
    Counting,
    Paillier,
}

/// An additive homomorphic scheme over fixed-point messages.
pub trait AdditiveHe {
    type Ciphertext: Clone + std::fmt::Debug;

    fn tag(&self) -> BackendTag;
    fn encrypt(&mut self, message: i128) -> Result<Self::Ciphertext>;
    fn add(&self, a: &Self::Ciphertext, b: &Self::Ciphertext) -> Self::Ciphertext;
    fn decrypt(&self, ct: &Self::Ciphertext) -> Result<i128>;
}

/// Ciphertext of the counting backend: the plaintext message plus the id of
/// the key that "encrypted" it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingCiphertext {
    key_id: u64,
    message: i128,
}

/// Stores plaintext fixed-point messages. Homomorphic sums are exact, so a
/// run on this backend makes the same decisions as one on a real scheme.
#[derive(Debug, Clone)]
pub struct CountingScheme {
    key_id: u64,
}

impl CountingScheme {
    pub fn new(key_id: u64) -> Self {
        Self { key_id }
    }
}

impl AdditiveHe for CountingScheme {
    type Ciphertext = CountingCiphertext;

    fn tag(&self) -> BackendTag {
        BackendTag::Counting
    }

    fn encrypt(&mut self, message: i128) -> Result<CountingCiphertext> {
        Ok(CountingCiphertext {
            key_id: self.key_id,
            message,
        })
    }

    fn add(&self, a: &CountingCiphertext, b: &CountingCiphertext) -> CountingCiphertext {
        CountingCiphertext {
            key_id: a.key_id,
            message: a.message.wrapping_add(b.message),
        }
    }

    fn decrypt(&self, ct: &CountingCiphertext) -> Result<i128> {
        if ct.key_id != self.key_id {
            return Err(Error::Integrity);
        }
        Ok(ct.message)
    }
}

/// Number of encryptions, decryptions and homomorphic additions performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HeCounters {
    pub enc: u64,
    pub dec: u64,
    pub add: u64,
}

impl HeCounters {
    pub fn since(&self, earlier: &HeCounters) -> HeCounters {
        HeCounters {
            enc: self.enc - earlier.enc,
            dec: self.dec - earlier.dec,
            add: self.add - earlier.add,
        }
    }

    pub fn accumulate(&mut self, delta: &HeCounters) {
        self.enc += delta.enc;
        self.dec += delta.dec;
        self.add += delta.add;
    }

    pub fn is_zero(&self) -> bool {
        self.enc == 0 && self.dec == 0 && self.add == 0
    }
}

/// Seconds per HE operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeCostModel {
    pub t_enc: f64,
    pub t_dec: f64,
    pub t_add: f64,
}

impl Default for HeCostModel {
    fn default() -> Self {
        Self {
            t_enc: 2e-3,
            t_dec: 1e-3,
            t_add: 1e-5,
        }
    }
}

impl HeCostModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t_enc", self.t_enc), ("t_dec", self.t_dec), ("t_add", self.t_add)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be a non-negative finite number of seconds"));
            }
        }
        Ok(())
    }

    /// `c_enc·t_enc + c_dec·t_dec + c_add·t_add`, in seconds.
    pub fn cost(&self, c: &HeCounters) -> f64 {
        c.enc as f64 * self.t_enc + c.dec as f64 * self.t_dec + c.add as f64 * self.t_add
    }
}

/// A scheme plus the counters it charges. All protocol HE traffic goes
/// through here, so both backends count identically.
#[derive(Debug)]
pub struct HeContext<S: AdditiveHe> {
    scheme: S,
    counters: HeCounters,
}

impl<S: AdditiveHe> HeContext<S> {
    pub fn new(scheme: S) -> Self {
        Self {
            scheme,
            counters: HeCounters::default(),
        }
    }

    pub fn counters(&self) -> HeCounters {
        self.counters
    }

    pub fn scheme(&self) -> &S {
        &self.scheme
    }

    pub fn encrypt(&mut self, value: f64) -> Result<S::Ciphertext> {
        let m = encode_fixed(value)?;
        self.counters.enc += 1;
        self.scheme.encrypt(m)
    }

    pub fn add(&mut self, a: &S::Ciphertext, b: &S::Ciphertext) -> S::Ciphertext {
        self.counters.add += 1;
        self.scheme.add(a, b)
    }

    /// Decrypts to the raw fixed-point message.
    pub fn decrypt_fixed(&mut self, ct: &S::Ciphertext) -> Result<i128> {
        self.counters.dec += 1;
        self.scheme.decrypt(ct)
    }

    pub fn decrypt(&mut self, ct: &S::Ciphertext) -> Result<f64> {
        self.decrypt_fixed(ct).map(decode_fixed)
    }
}
