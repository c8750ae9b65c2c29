//! Binary-alphabet information measures, the information-spectrum
//! divergence for finite discrete laws, and the Gaussian/binomial
//! numerical kernels shared by every other module.
//!
//! All logarithms are natural; divergences are in nats. The convention
//! `0·log 0 = 0` applies throughout. Probability mass on a symbol the
//! reference distribution cannot emit is a hard [`Error::Domain`], except
//! in [`DiscreteDist`] where an explicit `+∞` atom is allowed as a guard
//! for conservatively truncated tails.

use crate::channel_model::DiscretizedChannel;
use crate::{Error, Result};

use std::sync::OnceLock;

// --- domain types -------------------------------------------------------

/// A Bernoulli distribution on {0, 1}, identified by `P(1) = p`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BernoulliDist {
    p: f64,
}

impl BernoulliDist {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("Bernoulli parameter {p} not in [0,1]")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// A finite discrete law of a real random variable, as `(value, mass)`
/// atoms. Values must be finite or `+∞`; the `+∞` atoms act as guards
/// that absorb truncated tail mass so quantile-type functionals can only
/// move up, never down.
#[derive(Debug, Clone)]
pub struct DiscreteDist {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDist {
    /// Total mass must be 1 within 1e-12; masses nonnegative; values
    /// finite or `+∞` (no NaN, no `−∞`).
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain("distribution needs at least one atom".into()));
        }
        for &(v, m) in &atoms {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(Error::Domain(format!("atom value {v} not finite or +inf")));
            }
            if !(m >= 0.0) {
                return Err(Error::Domain(format!("atom mass {m} negative or NaN")));
            }
        }
        // Smallest masses first limits cancellation in the total.
        let mut masses: Vec<f64> = atoms.iter().map(|a| a.1).collect();
        masses.sort_unstable_by(f64::total_cmp);
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("atom masses sum to {total}, not 1")));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

/// First three moments of a log-likelihood-ratio law: mean (nats),
/// variance (nats²), and absolute third central moment (nats³).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DivergenceTriple {
    pub mean: f64,
    pub variance: f64,
    pub third_abs_moment: f64,
}

// --- binary divergences -------------------------------------------------

fn check_binary_support(p: f64, q: f64) -> Result<()> {
    if p > 0.0 && q == 0.0 {
        return Err(Error::Domain(format!("p={p} has mass at 1 but q(1)=0")));
    }
    if p < 1.0 && q == 1.0 {
        return Err(Error::Domain(format!("p={p} has mass at 0 but q(0)=0")));
    }
    Ok(())
}

/// Binary relative entropy `d(p‖q) = p log(p/q) + (1−p) log((1−p)/(1−q))`.
pub fn binary_kl(p: BernoulliDist, q: BernoulliDist) -> Result<f64> {
    let (p, q) = (p.p(), q.p());
    check_binary_support(p, q)?;
    let t1 = if p == 0.0 { 0.0 } else { p * (p / q).ln() };
    let t0 = if p == 1.0 { 0.0 } else { (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln() };
    Ok(t1 + t0)
}

/// Variance of the log-likelihood ratio between Bernoulli(p) and
/// Bernoulli(q): `v(p‖q) = p(1−p) log²( (p/(1−p)) · ((1−q)/q) )`.
pub fn binary_varentropy(p: BernoulliDist, q: BernoulliDist) -> Result<f64> {
    let (p, q) = (p.p(), q.p());
    if p == 0.0 || p == 1.0 {
        // The LLR is almost-surely constant.
        return Ok(0.0);
    }
    check_binary_support(p, q)?;
    let l = ((p / (1.0 - p)) * ((1.0 - q) / q)).ln();
    Ok(p * (1.0 - p) * l * l)
}

/// Absolute third central moment of the same log-likelihood ratio:
/// `ξ(p‖q) = p(1−p)(p² + (1−p)²) |log³( (p/(1−p)) · ((1−q)/q) )|`.
pub fn binary_third_abs_moment(p: BernoulliDist, q: BernoulliDist) -> Result<f64> {
    let (p, q) = (p.p(), q.p());
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    check_binary_support(p, q)?;
    let l = ((p / (1.0 - p)) * ((1.0 - q) / q)).ln();
    Ok(p * (1.0 - p) * (p * p + (1.0 - p) * (1.0 - p)) * (l * l * l).abs())
}

/// The q-logarithm `ln_q(u) = (u^{1−q} − 1)/(1−q)`, with `ln_1 = log`.
/// Nonincreasing in the order: `ln_q(u) ≤ ln_r(u)` whenever `q > r`.
pub fn q_logarithm(u: f64, q: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("q-logarithm needs u > 0, got {u}")));
    }
    if q == 1.0 {
        Ok(u.ln())
    } else {
        Ok((u.powf(1.0 - q) - 1.0) / (1.0 - q))
    }
}

// --- channel divergence statistics --------------------------------------

/// Moments of the per-slot log-likelihood ratio `log(W(Y|X)/Q(Y))` for a
/// binary input law `P`, a binary asymmetric channel `W`, and a reference
/// output law `Q`.
///
/// Returns `(conditional, unconditional)`:
/// * `conditional` — mean `D(W‖Q|P)`, variance and third moment taken
///   around each input's own conditional mean `D(W(·|x)‖Q)` and then
///   averaged over `P`. When `Q = PW` the mean is the mutual information
///   `I(P, W)`.
/// * `unconditional` — same mean, but variance `Ṽ` and third moment `Ξ̃`
///   taken around the global mean over the joint law. By the law of total
///   variance, `Ṽ = V + Var_X[D(W(·|X)‖Q)]`.
pub fn channel_divergence_stats(
    input: BernoulliDist,
    channel: &DiscretizedChannel,
    reference_output: BernoulliDist,
) -> Result<(DivergenceTriple, DivergenceTriple)> {
    let p = input.p();
    let q1 = reference_output.p();
    let q = [1.0 - q1, q1];
    let px = [1.0 - p, p];
    // w[x][y] for the binary asymmetric channel.
    let w = [
        [1.0 - channel.a, channel.a],
        [1.0 - channel.b, channel.b],
    ];

    let mut llr = [[0.0f64; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            if px[x] * w[x][y] == 0.0 {
                continue;
            }
            if q[y] == 0.0 {
                return Err(Error::Domain(format!(
                    "reference output has no mass at y={y} but the channel emits it"
                )));
            }
            llr[x][y] = (w[x][y] / q[y]).ln();
        }
    }

    // Per-input conditional means.
    let mut d_x = [0.0f64; 2];
    for x in 0..2 {
        for y in 0..2 {
            if w[x][y] > 0.0 {
                d_x[x] += w[x][y] * llr[x][y];
            }
        }
    }

    let mut mean = 0.0;
    let mut v_cond = 0.0;
    let mut xi_cond = 0.0;
    let mut v_joint = 0.0;
    let mut xi_joint = 0.0;
    for x in 0..2 {
        mean += px[x] * d_x[x];
    }
    for x in 0..2 {
        for y in 0..2 {
            let mass = px[x] * w[x][y];
            if mass == 0.0 {
                continue;
            }
            let dc = llr[x][y] - d_x[x];
            v_cond += mass * dc * dc;
            xi_cond += mass * dc.abs().powi(3);
            let dj = llr[x][y] - mean;
            v_joint += mass * dj * dj;
            xi_joint += mass * dj.abs().powi(3);
        }
    }

    Ok((
        DivergenceTriple { mean, variance: v_cond, third_abs_moment: xi_cond },
        DivergenceTriple { mean, variance: v_joint, third_abs_moment: xi_joint },
    ))
}

// --- information-spectrum divergence -------------------------------------

/// `D_s^ε` of a log-likelihood-ratio law: the largest `R` such that
/// `P[LLR ≤ R] ≤ ε`.
///
/// With `F` the right-continuous CDF of the law, this returns
/// `inf{r : F(r) > ε}`, i.e. the left edge of the first atom (in
/// ascending value order) whose inclusive cumulative mass exceeds `ε`.
/// `+∞` guard atoms sort last, so they can only raise the result.
pub fn info_spectrum_divergence(llr_law: &DiscreteDist, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!("eps {eps} not in [0,1)")));
    }
    let mut atoms = llr_law.atoms().to_vec();
    atoms.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut cum = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let v = atoms[i].0;
        // Fold every atom at exactly this value before comparing.
        let mut group = 0.0;
        while i < atoms.len() && atoms[i].0 == v {
            group += atoms[i].1;
            i += 1;
        }
        cum += group;
        if cum > eps {
            return Ok(v);
        }
    }
    // Rounding left the total a hair below eps: the top atom is the sup.
    Ok(atoms.last().expect("validated nonempty").0)
}

// --- Gaussian kernels ----------------------------------------------------

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// erf via the all-positive-term confluent series
/// `erf(z) = (2/√π) z e^{−z²} Σ_k (2z²)^k / (1·3·5···(2k+1))`,
/// accurate to machine precision for moderate z (no alternating-sign
/// cancellation).
fn erf_series(z: f64) -> f64 {
    let zz2 = 2.0 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0u32;
    while term > sum * 1e-18 && k < 200 {
        k += 1;
        term *= zz2 / (2 * k + 1) as f64;
        sum += term;
    }
    2.0 * FRAC_1_SQRT_PI * z * (-z * z).exp() * sum
}

/// erfc via the continued fraction
/// `√π e^{z²} erfc(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),`
/// evaluated with the modified Lentz algorithm. Accurate for z ≥ ~2.
fn erfc_cont_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..300 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-z * z).exp() * FRAC_1_SQRT_PI / f
}

fn erfc_nonneg(z: f64) -> f64 {
    if z < 2.2 {
        1.0 - erf_series(z)
    } else {
        erfc_cont_fraction(z)
    }
}

/// Standard Gaussian CDF `Φ(u)`, absolute error below 1e-15.
pub fn gaussian_cdf(u: f64) -> f64 {
    let z = u / SQRT_2;
    if u < 0.0 {
        0.5 * erfc_nonneg(-z)
    } else {
        1.0 - 0.5 * erfc_nonneg(z)
    }
}

/// Standard Gaussian density `φ(u)`.
pub fn gaussian_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse Gaussian CDF `Φ⁻¹(eps)`: a high-accuracy rational
/// approximation refined by one Newton step against [`gaussian_cdf`].
/// Absolute round-trip error `|Φ(Φ⁻¹(ε)) − ε|` stays below 1e-9 across
/// `ε ∈ [1e-8, 1 − 1e-8]` (and in practice far below).
pub fn gaussian_quantile(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("quantile needs eps in (0,1), got {eps}")));
    }

    // Rational approximation in three regions (lower tail, central,
    // upper tail), relative error ~1.15e-9 before refinement.
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if eps < P_LOW {
        let q = (-2.0 * eps.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if eps <= 1.0 - P_LOW {
        let q = eps - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - eps).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    };

    // One Newton step against the CDF.
    let pdf = gaussian_pdf(x);
    if pdf > 1e-300 {
        Ok(x - (gaussian_cdf(x) - eps) / pdf)
    } else {
        Ok(x)
    }
}

// --- binomial kernels ----------------------------------------------------

const LN_FACT_TABLE_LEN: usize = 1 << 18;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Compensated summation keeps the absolute error near one ulp of
        // each partial sum, which the 1e-12 pmf-normalization contract
        // needs at n ~ 1000 and beyond.
        let mut table = vec![0.0f64; LN_FACT_TABLE_LEN];
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for i in 2..LN_FACT_TABLE_LEN {
            let y = (i as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            table[i] = sum;
        }
        table
    })
}

/// `log(n!)` — tabulated for n < 2¹⁸, Stirling's series beyond (where the
/// series remainder is far below machine precision).
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACT_TABLE_LEN {
        ln_factorial_table()[n as usize]
    } else {
        let x = n as f64;
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
            + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
    }
}

/// `log C(n,k) + k log p + (n−k) log(1−p)`, with exact `−∞` at the
/// impossible boundary cases for p ∈ {0, 1}.
pub fn log_binomial_pmf(n: u64, k: u64, p: f64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("k={k} exceeds n={n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p={p} not in [0,1]")));
    }
    if p == 0.0 {
        return Ok(if k == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if p == 1.0 {
        return Ok(if k == n { 0.0 } else { f64::NEG_INFINITY });
    }
    let ln_choose = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    Ok(ln_choose + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln())
}

/// A window `[lo, hi]` of the Binomial(n, p) support whose complement
/// carries under ~1e-20 mass (mean ± 10 standard deviations, padded).
/// Callers account the actually-leaked mass `1 − Σ pmf` pessimistically.
pub fn binomial_support(n: u64, p: f64) -> (u64, u64) {
    if n <= 64 {
        return (0, n);
    }
    let mean = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    let half = 10.0 * sd + 15.0;
    let lo = (mean - half).floor().max(0.0) as u64;
    let hi = ((mean + half).ceil() as u64).min(n);
    (lo, hi)
}

/// `log Σ exp(v)` with the usual max-shift; `−∞` entries are skipped.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| (v - m).exp()).sum();
    m + sum.ln()
}

// --- tests ---------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(p: f64) -> BernoulliDist {
        BernoulliDist::new(p).unwrap()
    }

    /// Two-atom brute-force moments of the LLR between Bernoulli laws.
    fn llr_moments_oracle(p: f64, q: f64) -> (f64, f64, f64) {
        let l1 = (p / q).ln();
        let l0 = ((1.0 - p) / (1.0 - q)).ln();
        let mean = p * l1 + (1.0 - p) * l0;
        let var = p * (l1 - mean).powi(2) + (1.0 - p) * (l0 - mean).powi(2);
        let third = p * (l1 - mean).abs().powi(3) + (1.0 - p) * (l0 - mean).abs().powi(3);
        (mean, var, third)
    }

    #[test]
    fn kl_identity_is_zero() {
        assert_eq!(binary_kl(bern(0.3), bern(0.3)).unwrap(), 0.0);
    }

    #[test]
    fn kl_support_collapse() {
        let q = 0.2;
        let v = binary_kl(bern(1.0), bern(q)).unwrap();
        assert!((v - (1.0 / q).ln()).abs() < 1e-15);
    }

    #[test]
    fn kl_frozen_value() {
        // 30-digit evaluation of 0.5 log 2 + 0.5 log(2/3).
        let expected = 0.143_841_036_225_890_463_719_609_502_997_f64;
        let v = binary_kl(bern(0.5), bern(0.25)).unwrap();
        assert!((v - expected).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn kl_rejects_support_mismatch() {
        assert!(binary_kl(bern(0.5), bern(0.0)).is_err());
        assert!(binary_kl(bern(0.5), bern(1.0)).is_err());
        assert!(binary_kl(bern(0.0), bern(0.0)).is_ok());
    }

    #[test]
    fn varentropy_matches_definitional_variance() {
        for &p in &[0.05, 0.3, 0.5, 0.77, 0.99] {
            for &q in &[0.1, 0.25, 0.5, 0.9] {
                let (_, var, third) = llr_moments_oracle(p, q);
                let v = binary_varentropy(bern(p), bern(q)).unwrap();
                let xi = binary_third_abs_moment(bern(p), bern(q)).unwrap();
                assert!((v - var).abs() < 1e-12, "v(p={p},q={q}): {v} vs {var}");
                assert!((xi - third).abs() < 1e-12, "xi(p={p},q={q}): {xi} vs {third}");
            }
        }
    }

    #[test]
    fn varentropy_half_reduction() {
        let q = 0.2;
        let v = binary_varentropy(bern(0.5), bern(q)).unwrap();
        let expected = 0.25 * ((1.0 - q) / q).ln().powi(2);
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn third_moment_symmetry() {
        let a = binary_third_abs_moment(bern(0.9), bern(0.1)).unwrap();
        let b = binary_third_abs_moment(bern(0.1), bern(0.9)).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn q_logarithm_cases() {
        assert_eq!(q_logarithm(1.0, 3.7).unwrap(), 0.0);
        assert_eq!(q_logarithm(1.0, 1.0).unwrap(), 0.0);
        let u = 2.5;
        assert!((q_logarithm(u, 0.0).unwrap() - (u - 1.0)).abs() < 1e-15);
        assert!(q_logarithm(0.0, 1.0).is_err());
        assert!(q_logarithm(-1.0, 0.5).is_err());
    }

    #[test]
    fn q_logarithm_ordering() {
        // ln_q(u) ≤ ln_r(u) for q > r, equality only at u = 1; in
        // particular log u ≤ 2(√u − 1).
        let orders = [0.0, 0.5, 1.0, 2.0];
        let mut u = 0.01;
        while u <= 100.0 {
            for i in 0..orders.len() {
                for j in 0..i {
                    let hi = q_logarithm(u, orders[i]).unwrap();
                    let lo = q_logarithm(u, orders[j]).unwrap();
                    if (u - 1.0).abs() > 1e-9 {
                        assert!(hi < lo + 1e-12, "u={u}: ln_{} {hi} vs ln_{} {lo}", orders[i], orders[j]);
                    }
                }
            }
            let log_u = q_logarithm(u, 1.0).unwrap();
            let half = q_logarithm(u, 0.5).unwrap();
            assert!(log_u <= half + 1e-12);
            assert!((half - 2.0 * (u.sqrt() - 1.0)).abs() < 1e-9 * (1.0 + half.abs()));
            u *= 1.37;
        }
    }

    #[test]
    fn info_spectrum_examples() {
        let single = DiscreteDist::new(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(info_spectrum_divergence(&single, 0.1).unwrap(), 0.0);

        let two = DiscreteDist::new(vec![(-1.0, 0.3), (2.0, 0.7)]).unwrap();
        assert_eq!(info_spectrum_divergence(&two, 0.2).unwrap(), -1.0);
        assert_eq!(info_spectrum_divergence(&two, 0.5).unwrap(), 2.0);
        // Boundary: at eps exactly the CDF value, the sup moves up.
        assert_eq!(info_spectrum_divergence(&two, 0.3).unwrap(), 2.0);
        assert!(info_spectrum_divergence(&two, 1.0).is_err());
    }

    #[test]
    fn info_spectrum_monotone_and_guarded() {
        let law = DiscreteDist::new(vec![(-2.0, 0.25), (0.5, 0.25), (1.0, 0.5)]).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..20 {
            let eps = i as f64 / 20.0;
            let v = info_spectrum_divergence(&law, eps).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // Moving mass to a +inf guard can only raise the result.
        let delta = 0.1;
        let guarded = DiscreteDist::new(vec![
            (-2.0, 0.25),
            (0.5, 0.25),
            (1.0, 0.5 - delta),
            (f64::INFINITY, delta),
        ])
        .unwrap();
        for i in 0..20 {
            let eps = i as f64 / 20.0;
            let plain = info_spectrum_divergence(&law, eps).unwrap();
            let with_guard = info_spectrum_divergence(&guarded, eps).unwrap();
            assert!(with_guard >= plain);
        }
    }

    #[test]
    fn gaussian_cdf_reference_points() {
        assert!((gaussian_cdf(0.0) - 0.5).abs() < 1e-16);
        // 30-digit reference values for Φ at ±1, ±3, 5.
        assert!((gaussian_cdf(1.0) - 0.841_344_746_068_542_948_585_232_545_632).abs() < 1e-15);
        assert!((gaussian_cdf(-1.0) - 0.158_655_253_931_457_051_414_767_454_368).abs() < 1e-15);
        assert!((gaussian_cdf(3.0) - 0.998_650_101_968_369_905_473_348_185_232).abs() < 1e-15);
        assert!((gaussian_cdf(-3.0) - 1.349_898_031_630_094_526_651_814_767_59e-3).abs() < 1e-16);
        assert!((gaussian_cdf(5.0) - 0.999_999_713_348_428_120_806_088_326_248).abs() < 1e-15);
    }

    #[test]
    fn gaussian_quantile_reference_points() {
        assert_eq!(gaussian_quantile(0.5).unwrap(), 0.0);
        let q975 = gaussian_quantile(0.975).unwrap();
        assert!((q975 - 1.959_963_984_540_054_235_524_594_430_31).abs() < 1e-12, "got {q975}");
        assert!(gaussian_quantile(0.0).is_err());
        assert!(gaussian_quantile(1.0).is_err());
    }

    #[test]
    fn gaussian_roundtrip_within_1e9() {
        // Log-spaced grid over [1e-8, 1-1e-8] plus both endpoints.
        let mut grid = vec![1e-8, 1.0 - 1e-8];
        let mut e = 1e-8;
        while e < 0.5 {
            grid.push(e);
            grid.push(1.0 - e);
            e *= 2.3;
        }
        for &eps in &grid {
            let x = gaussian_quantile(eps).unwrap();
            let back = gaussian_cdf(x);
            assert!(
                (back - eps).abs() <= 1e-9,
                "eps={eps}: quantile {x}, roundtrip {back}"
            );
        }
    }

    #[test]
    fn log_binomial_cases() {
        assert_eq!(log_binomial_pmf(7, 0, 0.0).unwrap(), 0.0);
        assert_eq!(log_binomial_pmf(7, 3, 0.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_binomial_pmf(7, 7, 1.0).unwrap(), 0.0);
        assert!(log_binomial_pmf(3, 4, 0.5).is_err());
        // C(10,5)/2^10 = 252/1024.
        let v = log_binomial_pmf(10, 5, 0.5).unwrap();
        assert!((v - (252.0f64 / 1024.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn log_binomial_normalization() {
        for &(n, p) in &[(37u64, 0.11), (500, 0.73), (1000, 0.5), (1000, 0.031)] {
            let mut masses: Vec<f64> =
                (0..=n).map(|k| log_binomial_pmf(n, k, p).unwrap().exp()).collect();
            masses.sort_unstable_by(f64::total_cmp);
            let total: f64 = masses.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n} p={p}: total {total}");
        }
    }

    #[test]
    fn ln_factorial_stirling_consistent_at_table_edge() {
        // The tabulated and series branches must agree where they meet.
        let n = (LN_FACT_TABLE_LEN - 1) as u64;
        let table = ln_factorial(n);
        let x = n as f64;
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let stirling = x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
            + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
        assert!((table - stirling).abs() / table < 1e-14);
    }

    #[test]
    fn channel_stats_degenerate_input() {
        let ch = DiscretizedChannel::from_crossovers(4, 0.25, 0.1, 0.9).unwrap();
        let (cond, joint) =
            channel_divergence_stats(bern(0.0), &ch, bern(0.1)).unwrap();
        for t in [cond, joint] {
            assert!(t.mean.abs() < 1e-15);
            assert!(t.variance.abs() < 1e-15);
            assert!(t.third_abs_moment.abs() < 1e-15);
        }
    }

    #[test]
    fn channel_stats_symmetric_channel_capacity() {
        // Uniform input on a symmetric channel with a = 0.1, b = 0.9 and
        // Q = PW gives mean = log 2 − h(0.1); four-atom brute force.
        let a = 0.1;
        let ch = DiscretizedChannel::from_crossovers(4, 0.25, a, 1.0 - a).unwrap();
        let (cond, _) = channel_divergence_stats(bern(0.5), &ch, bern(0.5)).unwrap();
        let h = -(a * a.ln() + (1.0 - a) * (1.0 - a).ln());
        assert!((cond.mean - (2.0f64.ln() - h)).abs() < 1e-14);
    }

    #[test]
    fn law_of_total_variance() {
        for &(p, a, b) in &[(0.3, 0.05, 0.6), (0.5, 0.2, 0.9), (0.8, 0.01, 0.3)] {
            let ch = DiscretizedChannel::from_crossovers(4, 0.25, a, b).unwrap();
            let r = (1.0 - p) * a + p * b;
            let (cond, joint) = channel_divergence_stats(bern(p), &ch, bern(r)).unwrap();
            let d0 = binary_kl(bern(a), bern(r)).unwrap();
            let d1 = binary_kl(bern(b), bern(r)).unwrap();
            let d_bar = (1.0 - p) * d0 + p * d1;
            let var_of_means = (1.0 - p) * (d0 - d_bar).powi(2) + p * (d1 - d_bar).powi(2);
            assert!(
                (joint.variance - (cond.variance + var_of_means)).abs() < 1e-12,
                "p={p} a={a} b={b}"
            );
        }
    }

    #[test]
    fn chebyshev_dominance_on_product_laws() {
        // Law of a sum of n i.i.d. two-atom LLRs, built from binomial
        // counts; D_s^ε must stay below nD + sqrt(nV/(1−ε)).
        let cases: [(u64, f64, f64); 3] = [(8, 0.3, 0.5), (12, 0.6, 0.2), (10, 0.05, 0.4)];
        for &(n, p, q) in &cases {
            let l1 = (p / q).ln();
            let l0 = ((1.0 - p) / (1.0 - q)).ln();
            let atoms: Vec<(f64, f64)> = (0..=n)
                .map(|k| {
                    let v = k as f64 * l1 + (n - k) as f64 * l0;
                    (v, log_binomial_pmf(n, k, p).unwrap().exp())
                })
                .collect();
            let law = DiscreteDist::new(atoms).unwrap();
            let d = binary_kl(bern(p), bern(q)).unwrap();
            let v = binary_varentropy(bern(p), bern(q)).unwrap();
            for &eps in &[0.05, 0.3, 0.7] {
                let ds = info_spectrum_divergence(&law, eps).unwrap();
                let cheb = n as f64 * d + (n as f64 * v / (1.0 - eps)).sqrt();
                assert!(ds <= cheb + 1e-12, "n={n} p={p} q={q} eps={eps}: {ds} vs {cheb}");
            }
        }
    }
}
