use rand::Rng;

use super::genome::Genome;

/// Swaps the bit tails of `a` and `b` after a uniform cut in `1..len`.
pub fn single_point_crossover(a: &mut Genome, b: &mut Genome, rng: &mut impl Rng) {
    let n = a.bits.len();
    if n < 2 {
        return;
    }
    let cut = rng.random_range(1..n);
    for i in cut..n {
        std::mem::swap(&mut a.bits[i], &mut b.bits[i]);
    }
}

/// Flips each bit independently with probability `rate`.
pub fn bit_flip(g: &mut Genome, rate: f64, rng: &mut impl Rng) {
    for b in g.bits.iter_mut() {
        if rng.random::<f64>() < rate {
            *b = !*b;
        }
    }
}

/// Spread factor β of simulated binary crossover for a uniform draw `u`.
pub fn sbx_beta(u: f64, eta_c: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta_c + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta_c + 1.0))
    }
}

/// SBX children of `(x1, x2)` for a given draw `u`, clamped to `[0, 1]`.
pub fn sbx_pair(x1: f64, x2: f64, u: f64, eta_c: f64) -> (f64, f64) {
    let beta = sbx_beta(u, eta_c);
    let c1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2);
    let c2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2);
    (c1.clamp(0.0, 1.0), c2.clamp(0.0, 1.0))
}

/// SBX on every real gene pair, each with probability `prob`.
pub fn sbx(a: &mut Genome, b: &mut Genome, prob: f64, eta_c: f64, rng: &mut impl Rng) {
    for i in 0..a.reals.len() {
        if rng.random::<f64>() < prob {
            let u: f64 = rng.random();
            let (c1, c2) = sbx_pair(a.reals[i], b.reals[i], u, eta_c);
            a.reals[i] = c1;
            b.reals[i] = c2;
        }
    }
}

/// Polynomial mutation on `[0, 1]` of each real gene with probability `prob`.
pub fn polynomial_mutation(g: &mut Genome, prob: f64, eta_m: f64, rng: &mut impl Rng) {
    for x in g.reals.iter_mut() {
        if rng.random::<f64>() < prob {
            let u: f64 = rng.random();
            let delta = if u < 0.5 {
                (2.0 * u).powf(1.0 / (eta_m + 1.0)) - 1.0
            } else {
                1.0 - (2.0 * (1.0 - u)).powf(1.0 / (eta_m + 1.0))
            };
            *x = (*x + delta).clamp(0.0, 1.0);
        }
    }
}
