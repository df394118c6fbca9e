//! Certified bounds on Taylor coefficients and on the finite-size error of
//! truncated series.
//!
//! Everything is evaluated in natural-log space: `b_j` leaves the `f64`
//! range long before the tails used here stop contributing.

use serde::Serialize;

use crate::error::Error;

/// `κ(a) = max_{t ≥ 0} t^(a-t)` with its maximiser `τ` and `ω = a/τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaValue {
    pub a: f64,
    pub tau: f64,
    pub log_kappa: f64,
    pub omega: f64,
}

impl KappaValue {
    pub fn kappa(&self) -> f64 {
        self.log_kappa.exp()
    }

    /// `a/τ - 1 - ln τ`, zero at the exact maximiser.
    pub fn tau_residual(&self) -> f64 {
        self.a / self.tau - 1.0 - self.tau.ln()
    }

    /// `ω + ln ω - 1 - ln a`.
    pub fn omega_residual(&self) -> f64 {
        self.omega + self.omega.ln() - 1.0 - self.a.ln()
    }
}

pub const ROOT_TOLERANCE: f64 = 1e-13;

/// Solves `a/τ - 1 - ln τ = 0` by Newton steps kept inside a shrinking
/// bracket, bisecting whenever a step leaves it.
pub fn kappa(a: f64) -> Result<KappaValue, Error> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("κ(a) needs a finite a > 0, got {a}")));
    }
    let g = |t: f64| a / t - 1.0 - t.ln();
    let (mut lo, mut hi) = (a.min(1.0), a.max(1.0));
    let mut tau = if a > 1.0 { a / (1.0 + a.ln()).max(1.0) } else { 0.5 * (lo + hi) };
    tau = tau.clamp(lo, hi);
    for _ in 0..200 {
        let r = g(tau);
        if r.abs() < ROOT_TOLERANCE * 0.5 || hi - lo <= f64::EPSILON * hi {
            break;
        }
        // g is decreasing: a positive residual puts the root to the right
        if r > 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
        let step = r / (-a / (tau * tau) - 1.0 / tau);
        let next = tau - step;
        tau = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    Ok(KappaValue { a, tau, log_kappa: (a - tau) * tau.ln(), omega: a / tau })
}

pub fn omega(a: f64) -> Result<f64, Error> {
    Ok(kappa(a)?.omega)
}

/// `ln n!`, summed exactly up to 256 and by the Stirling series above.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= 256 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = (n + 1) as f64;
    // ln Γ(x) with three correction terms; error below 1e-15 relative here
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// Which coefficient family a bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BoundClass {
    /// Density coefficients `c_j` of `t^(2j)`.
    Density,
    /// Coefficients `c_{A,j}` of `t^j` for a word of length `ell`.
    Word { ell: usize },
    /// Density-density correlations at distance `d`, bounded as the word
    /// `n_k n_{k+d}` (length `d+1`) at even powers.
    Correlation { d: usize },
}

impl BoundClass {
    /// Power of `t` multiplying the coefficient of order `j`.
    pub fn power(self, j: usize) -> usize {
        match self {
            BoundClass::Density | BoundClass::Correlation { .. } => 2 * j,
            BoundClass::Word { .. } => j,
        }
    }
}

/// `ln b_j`.
///
/// * density: `b_j = 2 (6λ_b)^(2j-1) κ(2j + 1/λ_b - 1) / (2j)!`
/// * word: `b_j = (12λ_b)^j κ(j + ℓ/(2λ_b) - 1) / j!`
/// * correlation: the word bound for `ℓ = d+1` at order `2j`
pub fn coefficient_bound(j: usize, lambda_b: usize, class: BoundClass) -> Result<f64, Error> {
    if j == 0 {
        return Err(Error::InvalidArgument("coefficient bounds start at order 1".into()));
    }
    if lambda_b == 0 {
        return Err(Error::InvalidArgument("blockade range must be at least 1".into()));
    }
    let lb = lambda_b as f64;
    match class {
        BoundClass::Density => {
            let jj = 2 * j;
            let a = jj as f64 + 1.0 / lb - 1.0;
            Ok(2f64.ln() + (jj as f64 - 1.0) * (6.0 * lb).ln() + kappa(a)?.log_kappa - ln_factorial(jj))
        }
        BoundClass::Word { ell } => word_bound(j, lb, ell),
        BoundClass::Correlation { d } => word_bound(2 * j, lb, d + 1),
    }
}

fn word_bound(j: usize, lb: f64, ell: usize) -> Result<f64, Error> {
    if ell == 0 {
        return Err(Error::InvalidArgument("word length must be at least 1".into()));
    }
    let a = j as f64 + ell as f64 / (2.0 * lb) - 1.0;
    Ok(j as f64 * (12.0 * lb).ln() + kappa(a)?.log_kappa - ln_factorial(j))
}

/// `ln` of the word-count bound `2 (6λ_b)^(j-1) κ(j + 1/λ_b - 1)` on the
/// number of terms of `ad^j(n_k)`.
pub fn word_count_bound(j: usize, lambda_b: usize) -> Result<f64, Error> {
    if j == 0 {
        return Err(Error::InvalidArgument("word-count bound starts at order 1".into()));
    }
    let lb = lambda_b as f64;
    Ok(2f64.ln() + (j as f64 - 1.0) * (6.0 * lb).ln() + kappa(j as f64 + 1.0 / lb - 1.0)?.log_kappa)
}

/// Relative size below which tail terms stop the summation.
pub const TAIL_RELATIVE_TOLERANCE: f64 = 1e-18;
/// Hard cap on summed tail terms.
pub const TAIL_MAX_TERMS: usize = 1_000_000;

/// Finite-size error certificate for one lattice size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEnvelope {
    pub sites: usize,
    pub lambda_b: usize,
    pub class: BoundClass,
    /// First order not certified universal; the tail starts here.
    pub first_order: usize,
}

impl BoundEnvelope {
    /// The tail starts one past the ring universality threshold:
    /// `(L-1)/λ_b` for the density, `L-d` for correlations at unit range,
    /// `(L-ℓ)/(2λ_b)` for words (and for correlations at longer range,
    /// in even orders).
    pub fn new(sites: usize, lambda_b: usize, class: BoundClass) -> Result<Self, Error> {
        if lambda_b == 0 || sites == 0 {
            return Err(Error::InvalidArgument("need L ≥ 1 and λ_b ≥ 1".into()));
        }
        let threshold = match class {
            BoundClass::Density => (sites - 1) / lambda_b,
            BoundClass::Word { ell } => sites.saturating_sub(ell) / (2 * lambda_b),
            BoundClass::Correlation { d } => {
                if lambda_b == 1 {
                    sites.saturating_sub(d)
                } else {
                    sites.saturating_sub(d + 1) / (2 * lambda_b) / 2
                }
            }
        };
        Ok(BoundEnvelope { sites, lambda_b, class, first_order: threshold + 1 })
    }

    pub fn log_bound(&self, j: usize) -> Result<f64, Error> {
        coefficient_bound(j, self.lambda_b, self.class)
    }

    /// `(j, ln b_j)` for `j = 1..=jmax`.
    pub fn bound_table(&self, jmax: usize) -> Result<Vec<(usize, f64)>, Error> {
        (1..=jmax).map(|j| Ok((j, self.log_bound(j)?))).collect()
    }

    /// Upper bound on `|ρ(t) - ρ^(L)(t)|`.
    ///
    /// The unit-range density uses the product form
    /// `(2/3) Σ_{j≥L} 36^j t^(2j) / (ω_1 ⋯ ω_{2j})`; every other class sums
    /// `2 Σ_{j ≥ first_order} b_j |t|^power`.
    pub fn evaluate(&self, t: f64) -> Result<f64, Error> {
        let log = self.log_evaluate(t)?;
        let value = log.exp();
        if !value.is_finite() {
            return Err(Error::EnvelopeOverflow { t });
        }
        Ok(value)
    }

    /// `ln E^(L)(t)`, `-∞` at `t = 0`.
    pub fn log_evaluate(&self, t: f64) -> Result<f64, Error> {
        if !t.is_finite() {
            return Err(Error::InvalidTime(format!("time {t} is not finite")));
        }
        if t == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let ln_t = t.abs().ln();
        if self.class == BoundClass::Density && self.lambda_b == 1 {
            let mut ln_omega_prefix = 0.0;
            let mut next_omega = 1usize;
            let mut term = |j: usize| -> Result<f64, Error> {
                while next_omega <= 2 * j {
                    ln_omega_prefix += omega(next_omega as f64)?.ln();
                    next_omega += 1;
                }
                Ok(j as f64 * 36f64.ln() + 2.0 * j as f64 * ln_t - ln_omega_prefix)
            };
            Ok((2.0f64 / 3.0).ln() + sum_log_tail(self.first_order, &mut term)?)
        } else {
            let mut term =
                |j: usize| -> Result<f64, Error> { Ok(self.log_bound(j)? + self.class.power(j) as f64 * ln_t) };
            Ok(2f64.ln() + sum_log_tail(self.first_order, &mut term)?)
        }
    }
}

/// `ln Σ_{j ≥ start} e^{term(j)}`. Stops once terms are decreasing and below
/// the relative tolerance; fails loudly if the cap is hit first.
fn sum_log_tail(start: usize, term: &mut dyn FnMut(usize) -> Result<f64, Error>) -> Result<f64, Error> {
    let ln_tol = TAIL_RELATIVE_TOLERANCE.ln();
    let mut total = f64::NEG_INFINITY;
    let mut previous = f64::INFINITY;
    for (count, j) in (start..).enumerate() {
        if count >= TAIL_MAX_TERMS {
            return Err(Error::TailNotConverged { terms: count });
        }
        let x = term(j)?;
        total = log_add(total, x);
        if x < previous && x < total + ln_tol {
            return Ok(total);
        }
        previous = x;
    }
    unreachable!("the order range is unbounded")
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Envelope for the lattice of `sites` sites, see [`BoundEnvelope::evaluate`].
pub fn error_envelope(sites: usize, lambda_b: usize, class: BoundClass, t: f64) -> Result<f64, Error> {
    BoundEnvelope::new(sites, lambda_b, class)?.evaluate(t)
}

/// Asymptotic ratio of consecutive envelopes `E^(L+2λ_b)/E^(L)`:
/// `12 λ_b |t| / ln(L/(2λ_b))`.
pub fn convergence_ratio(sites: usize, lambda_b: usize, ell: usize, t: f64) -> Result<f64, Error> {
    ratio_preconditions(sites, lambda_b, ell)?;
    let lb = lambda_b as f64;
    Ok(12.0 * lb * t.abs() / (sites as f64 / (2.0 * lb)).ln())
}

/// The non-asymptotic version,
/// `12 λ_b max{1, L/(L-ℓ+2λ_b)} |t| / ω(L/(2λ_b))`.
pub fn rigorous_convergence_ratio(sites: usize, lambda_b: usize, ell: usize, t: f64) -> Result<f64, Error> {
    ratio_preconditions(sites, lambda_b, ell)?;
    let (l, lb) = (sites as f64, lambda_b as f64);
    let widen = (l / (l - ell as f64 + 2.0 * lb)).max(1.0);
    Ok(12.0 * lb * widen * t.abs() / omega(l / (2.0 * lb))?)
}

fn ratio_preconditions(sites: usize, lambda_b: usize, ell: usize) -> Result<(), Error> {
    if lambda_b == 0 || sites + 2 * lambda_b <= ell || sites <= 2 * lambda_b {
        return Err(Error::InvalidArgument(format!(
            "ratio needs L > 2λ_b and L - ℓ + 2λ_b > 0 (L={sites}, λ_b={lambda_b}, ℓ={ell})"
        )));
    }
    Ok(())
}

/// `36 t² / (ω_{2L-1} ω_{2L})`, bounding `E^(L)/E^(L-1)` for the unit-range
/// density.
pub fn density_ratio_bound(sites: usize, t: f64) -> Result<f64, Error> {
    if sites < 1 {
        return Err(Error::InvalidArgument("L must be at least 1".into()));
    }
    let l = sites as f64;
    Ok(36.0 * t * t / (omega(2.0 * l - 1.0)? * omega(2.0 * l)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_at_one() {
        let k = kappa(1.0).unwrap();
        assert!((k.tau - 1.0).abs() < 1e-13);
        assert!(k.log_kappa.abs() < 1e-13);
        assert!((k.omega - 1.0).abs() < 1e-13);
    }

    #[test]
    fn residuals_small_across_scales() {
        for a in [1e-3, 0.2, 0.5, 0.999, 1.5, 2.0, 7.0, 34.0, 1e3, 1e6, 1e9] {
            let k = kappa(a).unwrap();
            assert!(k.tau_residual().abs() < ROOT_TOLERANCE, "a={a} r={}", k.tau_residual());
            assert!(k.omega_residual().abs() < ROOT_TOLERANCE * 10.0, "a={a}");
        }
        assert!(kappa(0.0).is_err());
        assert!(kappa(-1.0).is_err());
    }

    #[test]
    fn kappa_matches_direct_maximisation() {
        for a in [0.5, 2.0, 5.0, 12.5] {
            let k = kappa(a).unwrap();
            let brute = (1..200_000)
                .map(|i| i as f64 * 1e-4)
                .map(|t| (a - t) * t.ln())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(k.log_kappa >= brute - 1e-12 && k.log_kappa - brute < 1e-6, "a={a}");
        }
    }

    #[test]
    fn first_density_bound() {
        // b_1 = 6 κ(2)
        let b1 = coefficient_bound(1, 1, BoundClass::Density).unwrap();
        assert!((b1 - (6f64.ln() + kappa(2.0).unwrap().log_kappa)).abs() < 1e-14);
        assert!(coefficient_bound(0, 1, BoundClass::Word { ell: 1 }).is_err());
    }

    #[test]
    fn ln_factorial_branches_agree() {
        let direct: f64 = (2..=300).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(300) - direct).abs() < 1e-9);
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn envelope_vanishes_like_power() {
        let env = BoundEnvelope::new(6, 1, BoundClass::Density).unwrap();
        assert_eq!(env.evaluate(0.0).unwrap(), 0.0);
        let a = env.evaluate(1e-3).unwrap();
        let b = env.evaluate(2e-3).unwrap();
        assert!((b / a / 2f64.powi(12) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn envelope_overflow_is_reported() {
        let env = BoundEnvelope::new(6, 1, BoundClass::Density).unwrap();
        assert!(env.log_evaluate(2.0).unwrap().is_finite());
        assert!(matches!(env.evaluate(2.0), Err(Error::EnvelopeOverflow { .. })));
        assert!(matches!(env.log_evaluate(50.0), Err(Error::TailNotConverged { .. })));
    }

    #[test]
    fn density_ratio() {
        for l in 5..=20 {
            let e1 = BoundEnvelope::new(l, 1, BoundClass::Density).unwrap().log_evaluate(1.0).unwrap();
            let e0 = BoundEnvelope::new(l - 1, 1, BoundClass::Density).unwrap().log_evaluate(1.0).unwrap();
            assert!(e1 - e0 < density_ratio_bound(l, 1.0).unwrap().ln(), "L={l}");
        }
    }

    #[test]
    fn ratio_formulas() {
        let r = convergence_ratio(100, 1, 1, 1.0).unwrap();
        assert!((r - 12.0 / 50f64.ln()).abs() < 1e-14);
        assert!(convergence_ratio(2, 1, 1, 1.0).is_err());
        let rig = rigorous_convergence_ratio(100, 1, 1, 1.0).unwrap();
        assert!(rig > r);
    }
}
