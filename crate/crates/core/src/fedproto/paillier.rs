//! Paillier cryptosystem with `g = n + 1`, over `num-bigint`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::he::{AdditiveHe, BackendTag};
use crate::error::{Error, Result};
use crate::rng::fnv1a;

const SMALL_PRIMES: [u32; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn random_bits(rng: &mut impl RngCore, bits: u64) -> BigUint {
    let bytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; bytes];
    rng.fill_bytes(&mut buf);
    let mut n = BigUint::from_bytes_le(&buf);
    let excess = bytes as u64 * 8 - bits;
    if excess > 0 {
        n >>= excess;
    }
    n
}

/// Uniform in `[1, bound)`.
fn random_below(rng: &mut impl RngCore, bound: &BigUint) -> BigUint {
    let bits = bound.bits();
    loop {
        let r = random_bits(rng, bits);
        if !r.is_zero() && &r < bound {
            return r;
        }
    }
}

/// Miller-Rabin with `rounds` random bases.
pub fn is_probable_prime(n: &BigUint, rounds: usize, rng: &mut impl RngCore) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for p in SMALL_PRIMES.iter().chain(std::iter::once(&2)) {
        let p = BigUint::from(*p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for _ in 0..rounds {
        let a = loop {
            let a = random_below(rng, &n_minus_1);
            if a >= two {
                break a;
            }
        };
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn random_prime(rng: &mut impl RngCore, bits: u64) -> BigUint {
    loop {
        let mut c = random_bits(rng, bits);
        c.set_bit(bits - 1, true);
        c.set_bit(bits - 2, true);
        c.set_bit(0, true);
        if is_probable_prime(&c, 32, rng) {
            return c;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierCiphertext {
    key_id: u64,
    value: BigUint,
}

/// Key pair plus the randomness source for encryption.
#[derive(Debug, Clone)]
pub struct Paillier {
    n: BigUint,
    n_squared: BigUint,
    lambda: BigUint,
    mu: BigUint,
    key_id: u64,
    rng: ChaCha20Rng,
}

impl Paillier {
    /// Generates a key with an `modulus_bits`-bit modulus `n = p q`.
    pub fn generate(modulus_bits: u64, seed: u64) -> Result<Self> {
        if !(64..=4096).contains(&modulus_bits) || !modulus_bits.is_multiple_of(2) {
            return Err(Error::param("modulus_bits", "must be an even bit length in [64, 4096]"));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let half = modulus_bits / 2;
        let (p, q) = loop {
            let p = random_prime(&mut rng, half);
            let q = random_prime(&mut rng, half);
            if p != q {
                break (p, q);
            }
        };
        let n = &p * &q;
        let one = BigUint::one();
        let lambda = (&p - &one).lcm(&(&q - &one));
        // with g = n + 1, L(g^λ mod n²) = λ mod n
        let mu = (&lambda % &n)
            .modinv(&n)
            .ok_or_else(|| Error::param("modulus_bits", "degenerate key, λ not invertible"))?;
        let key_id = fnv1a(&n.to_bytes_le());
        let n_squared = &n * &n;
        Ok(Self {
            n,
            n_squared,
            lambda,
            mu,
            key_id,
            rng,
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    fn to_residue(&self, m: i128) -> BigUint {
        let mag = BigUint::from(m.unsigned_abs());
        if m >= 0 {
            mag % &self.n
        } else {
            &self.n - (mag % &self.n)
        }
    }

    fn from_residue(&self, r: &BigUint) -> Result<i128> {
        let half = &self.n >> 1u32;
        let (mag, negative) = if r > &half {
            (&self.n - r, true)
        } else {
            (r.clone(), false)
        };
        let digits = mag.to_u64_digits();
        if digits.len() > 2 || (digits.len() == 2 && digits[1] >> 63 != 0) {
            return Err(Error::Range { value: f64::INFINITY });
        }
        let v = digits.first().copied().unwrap_or(0) as i128 | ((digits.get(1).copied().unwrap_or(0) as i128) << 64);
        Ok(if negative { -v } else { v })
    }
}

impl AdditiveHe for Paillier {
    type Ciphertext = PaillierCiphertext;

    fn tag(&self) -> BackendTag {
        BackendTag::Paillier
    }

    fn encrypt(&mut self, message: i128) -> Result<PaillierCiphertext> {
        let m = self.to_residue(message);
        let r = loop {
            let r = random_below(&mut self.rng, &self.n);
            if r.gcd(&self.n).is_one() {
                break r;
            }
        };
        // (1 + m n) · r^n mod n²
        let gm = (BigUint::one() + &m * &self.n) % &self.n_squared;
        let rn = r.modpow(&self.n, &self.n_squared);
        Ok(PaillierCiphertext {
            key_id: self.key_id,
            value: (gm * rn) % &self.n_squared,
        })
    }

    fn add(&self, a: &PaillierCiphertext, b: &PaillierCiphertext) -> PaillierCiphertext {
        PaillierCiphertext {
            key_id: a.key_id,
            value: (&a.value * &b.value) % &self.n_squared,
        }
    }

    fn decrypt(&self, ct: &PaillierCiphertext) -> Result<i128> {
        if ct.key_id != self.key_id || ct.value >= self.n_squared {
            return Err(Error::Integrity);
        }
        let u = ct.value.modpow(&self.lambda, &self.n_squared);
        let l = (u - 1u32) / &self.n;
        let m = (l * &self.mu) % &self.n;
        self.from_residue(&m)
    }
}
