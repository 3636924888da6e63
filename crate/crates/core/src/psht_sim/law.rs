//! Transition laws of filled-in peeling, prepared once per λ.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hyper_constants::{central_binomial_partial_sums, HyperParams, LAMBDA_C};

/// Mass allowed outside the truncated supports.
const TAIL_TOL: f64 = 1e-15;
/// Largest normalization error tolerated before renormalizing.
const NORM_TOL: f64 = 1e-6;
const MAX_J: usize = 2_000_000;
const MAX_SWALLOW: usize = 20_000;

fn ln_central_binomial(m: usize) -> f64 {
    (1..=m).map(|k| ((m + k) as f64 / k as f64).ln()).sum()
}

/// Log-weights ln(t_q(j) λ^j) for j = 0, 1, ... until the tail is negligible,
/// from the closed form's seeds and two-step ratio. Entry j is −∞ where
/// t_q(j) = 0.
pub(crate) fn ln_terms(q: usize, lambda: f64) -> Result<Vec<f64>> {
    assert!(q >= 1);
    let ll = lambda.ln();
    let r = lambda / LAMBDA_C;
    let ln_r = r.ln();
    let mut lw: Vec<f64> = if q == 1 {
        vec![f64::NEG_INFINITY, ll, 4f64.ln() + 2.0 * ll]
    } else {
        let catalan = ln_central_binomial(q - 2) - ((q - 1) as f64).ln();
        let second = ln_central_binomial(q) - 2f64.ln() + ll;
        vec![catalan, second]
    };
    let qf = q as f64;
    let mut mx = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum_rel: f64 = lw.iter().map(|&x| (x - mx).exp()).sum();
    loop {
        let j = lw.len() - 2;
        let jf = j as f64;
        let ratio = 16.0 * (3.0 * jf + 2.0 * qf - 3.0) * (3.0 * jf + 2.0 * qf - 1.0) * (3.0 * jf + 2.0 * qf + 1.0)
            / ((jf + 1.0) * (jf + 2.0) * (jf + 2.0 * qf + 1.0));
        let next = lw[j] + ratio.ln() + 2.0 * ll;
        lw.push(next);
        if next > mx {
            sum_rel = sum_rel * (mx - next).exp() + 1.0;
            mx = next;
        } else {
            sum_rel += (next - mx).exp();
        }
        let n = lw.len();
        if n > 12 {
            let decaying = lw[n - 9..].windows(2).all(|w| w[1] - w[0] <= ln_r);
            let tail = (lw[n - 1] - mx).exp() * r / (1.0 - r);
            if decaying && tail < TAIL_TOL * sum_rel {
                return Ok(lw);
            }
        }
        if n > MAX_J {
            return Err(Error::TableTooSmall(format!(
                "Z_{q}({lambda}) needs more than {MAX_J} terms"
            )));
        }
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// ln Z_q(λ) in floating point.
pub fn ln_partition(q: usize, lambda: f64) -> Result<f64> {
    Ok(log_sum_exp(&ln_terms(q, lambda)?))
}

/// A finite categorical law stored as its cumulative distribution.
#[derive(Clone, Debug)]
pub struct Cdf {
    cum: Vec<f64>,
}

impl Cdf {
    /// Normalizes nonnegative weights whose sum is expected to be `expected`.
    fn from_weights(w: &[f64], expected: f64, context: impl Fn() -> String) -> Result<Self> {
        let total: f64 = w.iter().sum();
        let deficit = total / expected - 1.0;
        if !(deficit.abs() <= NORM_TOL) {
            return Err(Error::Normalization {
                deficit,
                context: context(),
            });
        }
        let mut acc = 0.0;
        let cum = w
            .iter()
            .map(|x| {
                acc += x / total;
                acc
            })
            .collect();
        Ok(Cdf { cum })
    }

    pub fn len(&self) -> usize {
        self.cum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cum.is_empty()
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.cum[k] - if k == 0 { 0.0 } else { self.cum[k - 1] }
    }

    pub fn sample(&self, u: f64) -> usize {
        self.cum.partition_point(|&c| c <= u).min(self.cum.len() - 1)
    }
}

/// Outcome index of the infinite-hole law at perimeter p:
/// 0 is a new vertex, 1 + 2i + s is a swallow of i edges on side s.
pub fn decode_infinite(k: usize) -> Option<(usize, usize)> {
    (k > 0).then(|| ((k - 1) / 2, (k - 1) % 2))
}

/// Everything the samplers need at one λ: Boltzmann partition functions,
/// hole-volume laws and cached per-perimeter transition laws.
#[derive(Debug)]
pub struct PeelingLaw {
    pub params: HyperParams,
    ln_g: f64,
    // ln Z_q for q = 1..=ln_z.len()
    ln_z: Vec<f64>,
    // s[m] = Σ_{q≤m} binom(2q,q) h^q
    s: Vec<f64>,
    max_swallow: usize,
    stable_p: usize,
    volume: Vec<Cdf>,
    infinite: Vec<OnceLock<Cdf>>,
    finite: Vec<OnceLock<Cdf>>,
}

impl PeelingLaw {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < LAMBDA_C) {
            return Err(Error::Domain(format!(
                "samplers need 0 < lambda < lambda_c, got {lambda}"
            )));
        }
        let params = HyperParams::from_lambda(lambda)?;
        let ln_g = params.growth().ln();

        // Swallow sizes: u_i = Z_{i+1} (8+1/h)^{−i} bounds the weight of i.
        let mut ln_z = Vec::new();
        let mut volume = Vec::new();
        let mut prev_u = f64::INFINITY;
        let mut shrinking = 0;
        loop {
            let q = ln_z.len() + 1;
            let terms = ln_terms(q, lambda)?;
            let lz = log_sum_exp(&terms);
            let w: Vec<f64> = terms.iter().map(|&x| (x - lz).exp()).collect();
            volume.push(Cdf::from_weights(&w, 1.0, || format!("hole volume law, perimeter {q}"))?);
            ln_z.push(lz);
            let i = q - 1;
            let ln_u = lz - i as f64 * ln_g;
            let u = ln_u.exp();
            shrinking = if u < prev_u { shrinking + 1 } else { 0 };
            let ratio = u / prev_u;
            prev_u = u;
            if shrinking >= 4 && ratio < 1.0 && u * ratio / (1.0 - ratio) < TAIL_TOL {
                break;
            }
            if q > MAX_SWALLOW {
                return Err(Error::TableTooSmall(format!(
                    "swallow law at lambda {lambda} needs more than {MAX_SWALLOW} sizes"
                )));
            }
        }
        let max_swallow = ln_z.len() - 1;
        // One extra Z for new-vertex moves out of the largest tabulated disk.
        let extra = 64.max(max_swallow + 2);
        while ln_z.len() < extra {
            ln_z.push(ln_partition(ln_z.len() + 1, lambda)?);
        }

        // S_m converges for h < 1/4; past m_conv its ratios are 1 to rounding.
        let mut s = central_binomial_partial_sums(params.h, 64);
        loop {
            let n = s.len();
            if (s[n - 1] - s[n - 2]) < 1e-18 * s[n - 1] {
                break;
            }
            s = central_binomial_partial_sums(params.h, 2 * n);
        }
        let stable_p = max_swallow + s.len() + 1;
        let infinite = (0..=stable_p).map(|_| OnceLock::new()).collect();
        let finite = (0..=ln_z.len() - 1).map(|_| OnceLock::new()).collect();
        Ok(PeelingLaw {
            params,
            ln_g,
            ln_z,
            s,
            max_swallow,
            stable_p,
            volume,
            infinite,
            finite,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    /// Largest i with non-negligible swallow probability.
    pub fn max_swallow(&self) -> usize {
        self.max_swallow
    }

    pub fn ln_z(&self, q: usize) -> Result<f64> {
        match self.ln_z.get(q - 1) {
            Some(&v) => Ok(v),
            None => ln_partition(q, self.lambda()),
        }
    }

    fn s_at(&self, m: usize) -> f64 {
        self.s[m.min(self.s.len() - 1)]
    }

    /// C_{p'}/C_p = (8+1/h)^{p'−p} S_{p'−1}/S_{p−1}.
    pub fn c_ratio(&self, p_new: usize, p: usize) -> f64 {
        ((p_new as f64 - p as f64) * self.ln_g).exp() * self.s_at(p_new - 1) / self.s_at(p - 1)
    }

    /// Unnormalized weights of the infinite-hole law (see [`decode_infinite`]).
    pub fn infinite_weights(&self, p: usize) -> Vec<f64> {
        let lambda = self.lambda();
        let top = (p - 1).min(self.max_swallow);
        let mut w = Vec::with_capacity(2 * top + 3);
        w.push(lambda * self.c_ratio(p + 1, p));
        for i in 0..=top {
            let x = (self.ln_z[i] ).exp() * self.c_ratio(p - i, p);
            w.push(x);
            w.push(x);
        }
        w
    }

    /// Transition law at infinite perimeter p.
    pub fn infinite_law(&self, p: usize) -> Result<&Cdf> {
        let key = p.min(self.stable_p);
        if let Some(c) = self.infinite[key].get() {
            return Ok(c);
        }
        let cdf = Cdf::from_weights(&self.infinite_weights(key), 1.0, || {
            format!("infinite peeling law at perimeter {key}")
        })?;
        Ok(self.infinite[key].get_or_init(|| cdf))
    }

    /// Inner-vertex law of a Boltzmann (i+1)-gon swallowed by the chain.
    pub fn hole_volume(&self, perimeter: usize) -> &Cdf {
        &self.volume[perimeter - 1]
    }

    /// Weights of the finite q-gon law, divided by Z_q:
    /// index 0 closes a 2-gon, 1 is a new vertex, 1 + k splits at boundary
    /// vertex k (1 ≤ k ≤ q), leaving perimeters k and q − k + 1.
    pub fn finite_weights(&self, q: usize) -> Result<Vec<f64>> {
        let lz = self.ln_z(q)?;
        let mut w = Vec::with_capacity(q + 2);
        w.push(if q == 2 { (-lz).exp() } else { 0.0 });
        w.push((self.lambda().ln() + self.ln_z(q + 1)? - lz).exp());
        for k in 1..=q {
            w.push((self.ln_z(k)? + self.ln_z(q - k + 1)? - lz).exp());
        }
        Ok(w)
    }

    fn build_finite(&self, q: usize) -> Result<Cdf> {
        Cdf::from_weights(&self.finite_weights(q)?, 1.0, || {
            format!("finite disk law at perimeter {q}")
        })
    }

    /// Calls `f` with the finite q-gon law, cached for small q.
    pub fn with_finite_law<T>(&self, q: usize, f: impl FnOnce(&Cdf) -> T) -> Result<T> {
        match self.finite.get(q) {
            Some(cell) => {
                if let Some(c) = cell.get() {
                    return Ok(f(c));
                }
                let c = self.build_finite(q)?;
                Ok(f(cell.get_or_init(|| c)))
            }
            None => Ok(f(&self.build_finite(q)?)),
        }
    }
}
