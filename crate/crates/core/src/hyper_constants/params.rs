use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::brent;

/// Critical weight 1/(12√3), reached at h = 1/4.
pub const LAMBDA_C: f64 = 0.048_112_522_432_468_816;
pub const H_C: f64 = 0.25;
pub const KAPPA_C: f64 = 2.0 / 27.0;

/// λ(h) = h/(1+8h)^{3/2}.
pub fn lambda_of_h(h: f64) -> Result<f64> {
    if !(h > 0.0 && h <= H_C) {
        return Err(Error::Domain(format!("h must lie in (0, 1/4], got {h}")));
    }
    if h == H_C {
        return Ok(LAMBDA_C);
    }
    Ok(h / (1.0 + 8.0 * h).powf(1.5))
}

/// Inverse of [`lambda_of_h`]. λ(h) is increasing with h ≤ λ(h)·(1+8h)^{3/2} ≤ 3^{3/2}λ,
/// which gives a tight relative bracket.
pub fn h_of_lambda(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda >= LAMBDA_C {
        return Ok(H_C);
    }
    let lo = lambda;
    let hi = (lambda * 27f64.sqrt()).min(H_C);
    brent(|h| h / (1.0 + 8.0 * h).powf(1.5) - lambda, lo, hi, 0.0, 1e-15)
}

fn check_lambda(lambda: f64) -> Result<()> {
    // Allow the last bit of rounding on λ_c itself.
    if !(lambda > 0.0 && lambda <= LAMBDA_C * (1.0 + 4.0 * f64::EPSILON)) {
        return Err(Error::Domain(format!(
            "lambda must lie in (0, lambda_c], got {lambda}"
        )));
    }
    Ok(())
}

/// atanh(x)/x, continued through x = 0.
fn atanh_over_x(x: f64) -> f64 {
    let x2 = x * x;
    if x2 < 1e-6 {
        1.0 + x2 / 3.0 + x2 * x2 / 5.0 + x2 * x2 * x2 / 7.0
    } else {
        x.atanh() / x
    }
}

/// Mean inverse root degree as a function of h.
pub fn d_of_h(h: f64) -> f64 {
    let x2 = 1.0 - 4.0 * h;
    if x2 < 1e-6 {
        return 2.0 * h * atanh_over_x(x2.max(0.0).sqrt()) / (1.0 + 8.0 * h);
    }
    let x = x2.sqrt();
    // log((1+x)/(1−x)) with 1−x = 4h/(1+x), accurate for small h.
    let log_ratio = ((1.0 + x) * (1.0 + x) / (4.0 * h)).ln();
    h * log_ratio / ((1.0 + 8.0 * h) * x)
}

/// d(λ) = E[1/deg ρ].
pub fn d_mean_inv_degree(lambda: f64) -> Result<f64> {
    Ok(d_of_h(h_of_lambda(lambda)?))
}

fn h_of_theta(theta: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, 1/2), got {theta}")));
    }
    if theta == 0.0 {
        return Ok(H_C);
    }
    let target = (1.0 - 2.0 * theta) / 6.0;
    // d is increasing in h; solve in h where the problem is well conditioned.
    brent(|h| d_of_h(h) - target, 1e-300, H_C, 0.0, 4.0 * f64::EPSILON)
}

/// Unique λ with d(λ) = (1−2θ)/6.
pub fn lambda_of_theta(theta: f64) -> Result<f64> {
    lambda_of_h(h_of_theta(theta)?)
}

/// The coupled constants of one point of the family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HyperParams {
    pub lambda: f64,
    pub h: f64,
    pub theta: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl HyperParams {
    pub fn from_h(h: f64) -> Result<Self> {
        let lambda = lambda_of_h(h)?;
        Ok(Self::assemble(lambda, h, (1.0 - 6.0 * d_of_h(h)) / 2.0))
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        let h = h_of_lambda(lambda)?;
        Ok(Self::assemble(lambda, h, (1.0 - 6.0 * d_of_h(h)) / 2.0))
    }

    pub fn from_theta(theta: f64) -> Result<Self> {
        let h = h_of_theta(theta)?;
        Ok(Self::assemble(lambda_of_h(h)?, h, theta))
    }

    fn assemble(lambda: f64, h: f64, theta: f64) -> Self {
        let alpha = 1.0 / (1.0 + 2.0 * h);
        HyperParams {
            lambda,
            h,
            theta: theta.max(0.0),
            kappa: h / (1.0 + 2.0 * h).powi(3),
            alpha,
            beta: 1.0 - (1.0 + 2.0 * h) / (1.0 + 8.0 * h).sqrt(),
        }
    }

    pub fn is_critical(&self) -> bool {
        self.h >= H_C
    }

    /// 8 + 1/h, the geometric growth rate of C_p in p.
    pub fn growth(&self) -> f64 {
        8.0 + 1.0 / self.h
    }
}

/// C_p(λ), either as a plain float or, when that would overflow, its logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum CpValue {
    Finite(f64),
    Log(f64),
}

/// S_{m} = Σ_{q=0}^{m} binom(2q,q) h^q for m = 0..=m_max.
pub fn central_binomial_partial_sums(h: f64, m_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m_max + 1);
    let mut term = 1.0;
    let mut sum = 0.0;
    for q in 0..=m_max {
        sum += term;
        out.push(sum);
        term *= 2.0 * (2 * q + 1) as f64 / (q + 1) as f64 * h;
    }
    out
}

/// ln C_p(λ) = −ln λ + (p−1) ln(8+1/h) + ln S_{p−1}.
pub fn ln_c_p(lambda: f64, p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::Domain("C_p needs p >= 1".into()));
    }
    let hp = HyperParams::from_lambda(lambda)?;
    let s = central_binomial_partial_sums(hp.h, p - 1)[p - 1];
    Ok(-lambda.ln() + (p - 1) as f64 * hp.growth().ln() + s.ln())
}

pub fn c_p(lambda: f64, p: usize) -> Result<CpValue> {
    let l = ln_c_p(lambda, p)?;
    let v = l.exp();
    Ok(if v.is_finite() {
        CpValue::Finite(v)
    } else {
        CpValue::Log(l)
    })
}

/// Almost-sure growth rates of perimeter and volume under peeling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Drift {
    pub p_rate: f64,
    /// Infinite at λ_c.
    pub v_rate: f64,
    pub ratio: f64,
    pub critical: bool,
}

pub fn drift(lambda: f64) -> Result<Drift> {
    let h = h_of_lambda(lambda)?;
    let x2 = 1.0 - 4.0 * h;
    let y = 1.0 + 8.0 * h;
    if x2 <= 0.0 {
        return Ok(Drift {
            p_rate: 0.0,
            v_rate: f64::INFINITY,
            ratio: 0.0,
            critical: true,
        });
    }
    Ok(Drift {
        p_rate: (x2 / y).sqrt(),
        v_rate: 1.0 / (y * x2).sqrt(),
        ratio: x2,
        critical: false,
    })
}

/// Constants of the type-I/type-II correspondence at one λ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bridge {
    pub kappa: f64,
    pub beta: f64,
    pub alpha: f64,
    pub mean_block_size: f64,
    pub d_ii: f64,
    pub bridge_value: f64,
    pub d: f64,
    pub residual: f64,
}

/// Mean inverse degree of the type-II PSHT at κ = α²(1−α)/2.
pub fn d_type2(alpha: f64) -> Result<f64> {
    let s = 3.0 * alpha - 2.0;
    if !(alpha < 1.0) || s < -1e-14 {
        return Err(Error::Domain(format!("alpha must lie in [2/3, 1), got {alpha}")));
    }
    let y = (s.max(0.0) / alpha).sqrt();
    Ok(-(1.0 - alpha) / 2.0 + (1.0 - alpha) * atanh_over_x(y))
}

pub fn type2_bridge(lambda: f64) -> Result<Bridge> {
    let hp = HyperParams::from_lambda(lambda)?;
    let h = hp.h;
    let ea = 2.0 * h / (1.0 + 2.0 * h);
    let d_ii = d_type2(hp.alpha)?;
    let bridge_value = (ea + 2.0 * d_ii) / (2.0 * (1.0 + 3.0 * ea));
    let d = d_of_h(h);
    Ok(Bridge {
        kappa: hp.kappa,
        beta: hp.beta,
        alpha: hp.alpha,
        mean_block_size: ea,
        d_ii,
        bridge_value,
        d,
        residual: (d - bridge_value).abs(),
    })
}

/// LHS − RHS of (2x⁴−3x²+3)·x·log((1+x)/(1−x)) ≥ 2x²(3−2x²).
pub fn monotonicity_margin(x: f64) -> f64 {
    if x < 0.2 {
        // Σ_{k≥3} c_k x^{2k}, c_k = 6/(2k−1) − 6/(2k−3) + 4/(2k−5); the x² and x⁴
        // terms cancel exactly.
        let x2 = x * x;
        let mut pow = x2 * x2 * x2;
        let mut sum = 0.0;
        for k in 3..200 {
            let k = k as f64;
            let c = 6.0 / (2.0 * k - 1.0) - 6.0 / (2.0 * k - 3.0) + 4.0 / (2.0 * k - 5.0);
            let term = c * pow;
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
            pow *= x2;
        }
        return sum;
    }
    let x2 = x * x;
    (2.0 * x2 * x2 - 3.0 * x2 + 3.0) * x * 2.0 * x.atanh() - 2.0 * x2 * (3.0 - 2.0 * x2)
}

pub fn monotonicity_inequality(x: f64) -> bool {
    x > 0.0 && x < 1.0 && monotonicity_margin(x) >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lambda_anchors() {
        assert!((LAMBDA_C - 1.0 / (12.0 * 3f64.sqrt())).abs() < 1e-18);
        assert_eq!(lambda_of_h(0.25).unwrap(), LAMBDA_C);
        let l8 = lambda_of_h(0.125).unwrap();
        assert!((l8 - 1.0 / (16.0 * 2f64.sqrt())).abs() < 1e-17);
        assert!((l8 - 0.0441941738).abs() < 1e-10);
        assert!(lambda_of_h(0.3).is_err());
        assert!(h_of_lambda(LAMBDA_C * 1.001).is_err());
        assert_eq!(h_of_lambda(LAMBDA_C).unwrap(), 0.25);
    }

    #[test]
    fn round_trip_grid() {
        for i in 1..=100 {
            let lambda = LAMBDA_C * i as f64 / 100.0;
            let back = lambda_of_h(h_of_lambda(lambda).unwrap()).unwrap();
            assert!((back - lambda).abs() <= 1e-12 * lambda, "{lambda}");
        }
        for i in 1..=100 {
            let h = 0.25 * i as f64 / 100.0;
            let back = h_of_lambda(lambda_of_h(h).unwrap()).unwrap();
            // h is ill-conditioned in λ near 1/4 (dλ/dh = 0 there).
            let tol = if i > 95 { 1e-6 } else { 1e-10 };
            assert!((back - h).abs() <= tol, "{h}");
        }
    }

    #[test]
    fn d_values() {
        assert!((d_of_h(0.25) - 1.0 / 6.0).abs() < 1e-15);
        assert!((d_mean_inv_degree(LAMBDA_C).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let d8 = d_of_h(0.125);
        // h log(...)/((1+8h)x) at h = 1/8, x = 1/√2.
        let x = 0.5f64.sqrt();
        let direct = 0.125 * ((1.0 + x) / (1.0 - x)).ln() / (2.0 * x);
        assert!((d8 - direct).abs() < 1e-15);
        // 30-digit reference: 0.155806310035057628...
        assert!((d8 - 0.155_806_310_035_057_6).abs() < 1e-15);
        assert!((d8 - 0.1558064).abs() < 1e-6);
        // Series branch meets the direct branch.
        let h: f64 = 0.25 - 2.4e-7;
        let x = (1.0 - 4.0 * h).sqrt();
        let direct = h * ((1.0 + x) / (1.0 - x)).ln() / ((1.0 + 8.0 * h) * x);
        assert!((d_of_h(h) - direct).abs() < 1e-12);
        assert!(d_of_h(1e-12) < 1e-10);
    }

    #[test]
    fn d_increasing() {
        let mut prev = 0.0;
        for i in 1..=1000 {
            let d = d_mean_inv_degree(LAMBDA_C * i as f64 / 1000.0).unwrap();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn theta_inversion() {
        assert_eq!(lambda_of_theta(0.0).unwrap(), LAMBDA_C);
        let th = (1.0 - 6.0 * d_of_h(0.125)) / 2.0;
        assert!((th - 0.032_581_069_894_827_11).abs() < 1e-14);
        assert!((th - 0.0325808).abs() < 1e-6);
        let l = lambda_of_theta(0.0325808).unwrap();
        assert!((l - 0.0441942).abs() < 1e-7);
        assert!(lambda_of_theta(0.5).is_err());
        assert!(lambda_of_theta(0.4999999).unwrap() < 1e-7);
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let theta = 0.005 * i as f64;
            let l = lambda_of_theta(theta).unwrap();
            let d = d_mean_inv_degree(l).unwrap();
            assert!((d - (1.0 - 2.0 * theta) / 6.0).abs() < 1e-12);
            assert!(l < prev);
            prev = l;
        }
    }

    #[test]
    fn params_at_h_eighth() {
        let hp = HyperParams::from_h(0.125).unwrap();
        assert!((hp.kappa - 0.064).abs() < 1e-15);
        assert!((hp.alpha - 0.8).abs() < 1e-15);
        assert!((hp.kappa - hp.alpha * hp.alpha * (1.0 - hp.alpha) / 2.0).abs() < 1e-15);
        let crit = HyperParams::from_theta(0.0).unwrap();
        assert!((crit.kappa - KAPPA_C).abs() < 1e-15);
        assert!(crit.is_critical());
        assert!(crit.beta >= 0.0 && crit.beta < 1.0);
    }

    #[test]
    fn c_p_anchors() {
        let lambda = 0.03;
        let h = h_of_lambda(lambda).unwrap();
        let CpValue::Finite(c1) = c_p(lambda, 1).unwrap() else { panic!() };
        assert!((c1 * lambda * lambda - lambda).abs() < 1e-16);
        let CpValue::Finite(c2) = c_p(lambda, 2).unwrap() else { panic!() };
        let expected = (8.0 + 1.0 / h) * (1.0 + 2.0 * h) / lambda;
        assert!((c2 / expected - 1.0).abs() < 1e-13);
        assert!(matches!(c_p(lambda, 2000).unwrap(), CpValue::Log(_)));
        let mut prev = 0.0;
        for p in 1..60 {
            let l = ln_c_p(lambda, p).unwrap();
            assert!(l > prev);
            prev = l;
        }
    }

    #[test]
    fn drift_values() {
        let l = lambda_of_h(0.125).unwrap();
        let dr = drift(l).unwrap();
        assert!((dr.p_rate - 0.5).abs() < 1e-12 && (dr.v_rate - 1.0).abs() < 1e-12);
        assert!((dr.ratio - 0.5).abs() < 1e-12);
        let c = drift(LAMBDA_C).unwrap();
        assert!(c.critical && c.v_rate.is_infinite() && c.p_rate == 0.0);
        let near = drift(LAMBDA_C * (1.0 - 1e-8)).unwrap();
        assert!(near.p_rate < 1e-2);
    }

    #[test]
    fn bridge_at_h_eighth_and_critical() {
        let b = type2_bridge(lambda_of_h(0.125).unwrap()).unwrap();
        assert!((b.mean_block_size - 0.2).abs() < 1e-15);
        assert!((b.d_ii - 0.149_290_096_056_092_2).abs() < 1e-14);
        assert!((b.d_ii - 0.1492905).abs() < 1e-6);
        assert!((b.bridge_value - 0.1558066).abs() < 1e-6);
        assert!(b.residual < 1e-12);
        let c = type2_bridge(LAMBDA_C).unwrap();
        assert!((c.kappa - 2.0 / 27.0).abs() < 1e-15);
        assert!((c.d_ii - 1.0 / 6.0).abs() < 1e-12 && c.residual < 1e-12);
        assert!(d_type2(0.6).is_err());
    }

    #[test]
    fn inequality_near_zero_matches_series_start() {
        let x: f64 = 1e-3;
        assert!((monotonicity_margin(x) / x.powi(6) - 3.2).abs() < 1e-4);
        assert!(monotonicity_inequality(0.5));
        assert!(monotonicity_inequality(1.0 - 1e-12));
        // The two evaluation routes agree where they meet.
        let x = 0.2f64;
        let x2 = x * x;
        let direct = (2.0 * x2 * x2 - 3.0 * x2 + 3.0) * x * ((1.0 + x) / (1.0 - x)).ln()
            - 2.0 * x2 * (3.0 - 2.0 * x2);
        assert!((monotonicity_margin(0.1999999999) - direct).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bridge_identity_holds(h in 1e-6f64..0.25) {
            let l = lambda_of_h(h).unwrap();
            prop_assert!(type2_bridge(l).unwrap().residual < 1e-10);
        }

        #[test]
        fn inequality_holds(x in 1e-6f64..0.999_999) {
            prop_assert!(monotonicity_inequality(x));
        }

        #[test]
        fn parameter_relations(h in 1e-8f64..=0.25) {
            let hp = HyperParams::from_h(h).unwrap();
            prop_assert!((hp.kappa - hp.alpha.powi(2) * (1.0 - hp.alpha) / 2.0).abs() < 1e-12);
            prop_assert!(hp.kappa <= KAPPA_C + 1e-15);
            prop_assert!(hp.alpha >= 2.0 / 3.0 - 1e-15 && hp.alpha < 1.0);
            prop_assert!((0.0..1.0).contains(&hp.beta));
            prop_assert!(hp.theta >= 0.0 && hp.theta < 0.5);
        }
    }
}
