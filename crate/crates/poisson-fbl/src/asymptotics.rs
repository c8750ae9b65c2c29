//! Closed-form coding limits of the channel: capacity `C*`, dispersion
//! `V*`, the third-moment coefficient `Ξ*`, and the analytic helper
//! functions (`g`, `ṽ`, `ξ̃`, `C̃`, `G1`, `G̃2`) that the converse
//! machinery maximizes and bounds against.
//!
//! Everything here is a pure function of the channel constants. The
//! optimal input is Bernoulli with parameter `p* = min{σ, p0}`, where
//! `p0` solves the unconstrained problem; all `s·log(s/…)` terms follow
//! the `0·log 0 = 0` convention so the zero-dark-current (Z-channel)
//! case evaluates cleanly.

use crate::channel_model::PoissonChannelParams;
use crate::info_measures::gaussian_quantile;
use crate::{Error, Result};

/// Capacity-side quantities: `s`, the unconstrained optimum `p0`, the
/// capacity-achieving duty `p* = min{σ, p0}`, and `C*` in nats/sec.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FirstOrder {
    pub s: f64,
    pub p0: f64,
    pub p_star: f64,
    pub c_star: f64,
}

/// Dispersion `V*` (nats²/sec) and third-moment coefficient `Ξ*`
/// (nats³/sec).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SecondOrder {
    pub v_star: f64,
    pub xi_star: f64,
}

/// The normal-approximation value `T·C* + √(T·V*)·Φ⁻¹(ε)` together with
/// the third-order bracket `[(1/2)log T − c1, log T + c2]` it sits in.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct NormalApproxBracket {
    pub horizon: f64,
    pub eps: f64,
    pub main: f64,
    pub third_lo: f64,
    pub third_hi: f64,
    pub c1: f64,
    pub c2: f64,
}

/// `x·ln(x/y)` with the `0·ln 0 = 0` convention in both arguments.
fn x_ln_ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

/// The unconstrained optimal duty `p0 = (1+s)^{1+s}/(s^s·e) − s`, with
/// the analytic limit `p0 = 1/e` at `s = 0` (never `0^0`).
fn p0_of_s(s: f64) -> f64 {
    if s == 0.0 {
        return (-1.0f64).exp();
    }
    // exp((1+s)ln(1+s) − s·ln s − 1) − s, stable for small s.
    ((1.0 + s) * (1.0 + s).ln() - s * s.ln() - 1.0).exp() - s
}

/// Capacity and the optimal duty, per the closed form
/// `C* = A((1−p*)s·ln(s/(p*+s)) + p*(1+s)·ln((1+s)/(p*+s)))`.
pub fn first_order(params: &PoissonChannelParams) -> FirstOrder {
    let s = params.s();
    let a = params.peak_a;
    let p0 = p0_of_s(s);
    let p_star = params.sigma.min(p0);
    let c_star = a
        * ((1.0 - p_star) * x_ln_ratio(s, p_star + s)
            + p_star * x_ln_ratio(1.0 + s, p_star + s));
    FirstOrder { s, p0, p_star, c_star }
}

/// Dispersion and third-moment coefficient at the optimal duty:
/// `V* = ṽ(p*, p*)` and `Ξ*` the signed cubed-log analog.
pub fn second_order(params: &PoissonChannelParams) -> SecondOrder {
    let fo = first_order(params);
    let (v_star, _) = v_tilde_xi_tilde(fo.p_star, fo.p_star, params).expect("p*+s > 0");
    let s = fo.s;
    let p = fo.p_star;
    let l1 = ((1.0 + s) / (p + s)).ln();
    let xi_star = params.peak_a
        * (p * (1.0 + s) * l1.powi(3)
            - if s == 0.0 { 0.0 } else { (1.0 - p) * s * (s / (p + s)).ln().powi(3) });
    SecondOrder { v_star, xi_star }
}

/// The per-duty capacity integrand `g(u)` and its first four
/// derivatives. `g` is strictly concave with `g′(p0) = 0`, which is
/// what makes `p* = min{σ, p0}` optimal.
pub fn g_and_derivatives(u: f64, params: &PoissonChannelParams) -> Result<(f64, f64, f64, f64, f64)> {
    let s = params.s();
    let a = params.peak_a;
    if !(u > 0.0 && u <= 1.0) && !(u >= 0.0 && s > 0.0) {
        return Err(Error::Domain(format!("duty {u} outside (0,1] (or [0,1] when s > 0)")));
    }
    if u + s <= 0.0 {
        return Err(Error::Domain("u + s must be positive".into()));
    }
    let p0 = p0_of_s(s);
    let g = a * ((1.0 - u) * x_ln_ratio(s, u + s) + u * x_ln_ratio(1.0 + s, u + s));
    let g1 = a * ((p0 + s) / (u + s)).ln();
    let g2 = -a / (u + s);
    let g3 = a / (u + s).powi(2);
    let g4 = -2.0 * a / (u + s).powi(3);
    Ok((g, g1, g2, g3, g4))
}

/// Conditional divergence variance `ṽ(t,u)` and the third-moment analog
/// `ξ̃(t,u)` of a duty-`t` input judged against the duty-`u` output:
///
/// ```text
/// ṽ(t,u) = A((1−t)s·ln²(s/(u+s)) + t(1+s)·ln²((1+s)/(u+s)))
/// ξ̃(t,u) = A(t(1+s)·|ln((1+s)/(u+s))|³ + (1−t)s·|ln(s/(u+s))|³)
/// ```
///
/// At `t = u = p*` these reduce to `V*` and (up to the sign convention
/// folded into `Ξ*`) the third-moment coefficient.
pub fn v_tilde_xi_tilde(t: f64, u: f64, params: &PoissonChannelParams) -> Result<(f64, f64)> {
    let s = params.s();
    let a = params.peak_a;
    if u + s <= 0.0 {
        return Err(Error::Domain("u + s must be positive".into()));
    }
    let l1 = ((1.0 + s) / (u + s)).ln();
    let l0 = if s == 0.0 { 0.0 } else { (s / (u + s)).ln() };
    let w0 = if s == 0.0 { 0.0 } else { (1.0 - t) * s };
    let w1 = t * (1.0 + s);
    let v = a * (w0 * l0 * l0 + w1 * l1 * l1);
    let xi = a * (w0 * l0.abs().powi(3) + w1 * l1.abs().powi(3));
    Ok((v, xi))
}

/// The converse's large-deviation ceiling `C̃(u)`: the asymptotic
/// per-second divergence of a duty-`u` input against the `(p*+κ)`-duty
/// output. Strictly decreasing in `u` when `p* = p0 < σ`, with
/// `C̃(p*+κ) < C*`, which is what rules out duty types far above `p*`.
pub fn c_tilde(u: f64, params: &PoissonChannelParams, kappa: f64) -> f64 {
    let s = params.s();
    let a = params.peak_a;
    let fo = first_order(params);
    let shifted = fo.p_star + kappa + s;
    let s_term = if s == 0.0 { 0.0 } else { s * (s / shifted).ln() };
    a * ((fo.p_star + kappa) + u * ((fo.p0 + s) / shifted).ln() + s_term)
}

/// Constants driving the converse's quadratic type-penalty argument:
/// the mixture half-width `κ = (1/2)min{σ, 1/e}`, the curvature bound
/// `G1 > 0`, the net decay rate `γ = G1/2`, and the quantile-slope
/// envelope `G̃2(ε)`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ConverseConstants {
    pub kappa: f64,
    pub g1: f64,
    pub gamma: f64,
    pub g2_tilde: f64,
}

/// `κ`, `G1`, the default `γ = G1/2`, and `G̃2(ε)`.
///
/// `G1 = A(ln((p0+s)/(p*+s)) + (1/(2(p*+s)))(1 − κ/(3(p*+s))))` is the
/// negative-quadratic coefficient controlling how fast the per-type
/// divergence falls off away from `p*`; any net decay `γ < G1` keeps
/// the sifting penalty quadratically dominated.
pub fn converse_constants(params: &PoissonChannelParams, eps: f64) -> Result<ConverseConstants> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps {eps} outside (0,1)")));
    }
    let s = params.s();
    let a = params.peak_a;
    let fo = first_order(params);
    let kappa = 0.5 * params.sigma.min((-1.0f64).exp());
    let ps = fo.p_star + s;
    let g1 = a * (((fo.p0 + s) / ps).ln() + (1.0 / (2.0 * ps)) * (1.0 - kappa / (3.0 * ps)));
    let gamma = g1 / 2.0;
    let z_eps = gaussian_quantile(eps)?;
    let z_mid = gaussian_quantile((1.0 + eps) / 2.0)?;
    let g2_tilde = (2.0 * core::f64::consts::PI).sqrt()
        * (0.5 * z_eps * z_eps).exp().max((0.5 * z_mid * z_mid).exp());
    Ok(ConverseConstants { kappa, g1, gamma, g2_tilde })
}

/// Normal approximation `T·C* + √(T·V*)·Φ⁻¹(ε)` with the third-order
/// bracket `[(1/2)ln T − c1, ln T + c2]`. The constants `c1`, `c2` are
/// caller-supplied (typically fitted from pipeline residuals); nothing
/// here asserts their values.
pub fn normal_approx(
    horizon: f64,
    eps: f64,
    params: &PoissonChannelParams,
    c1: f64,
    c2: f64,
) -> Result<NormalApproxBracket> {
    if !(horizon > 0.0) {
        return Err(Error::Domain(format!("horizon {horizon} must be > 0")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps {eps} outside (0,1)")));
    }
    let fo = first_order(params);
    let so = second_order(params);
    let main = horizon * fo.c_star + (horizon * so.v_star).sqrt() * gaussian_quantile(eps)?;
    let third_lo = 0.5 * horizon.ln() - c1;
    let third_hi = horizon.ln() + c2;
    if third_lo > third_hi {
        return Err(Error::PreconditionFailed(format!(
            "third-order bracket empty: T = {horizon} below e^{{2(c1+c2)}} for c1 = {c1}, c2 = {c2}"
        )));
    }
    Ok(NormalApproxBracket { horizon, eps, main, third_lo, third_hi, c1, c2 })
}

// --- tests ---------------------------------------------------------------
