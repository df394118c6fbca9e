//! Exact evolution of the vacuum on finite lattices, and the exact-integer
//! Taylor oracle built from the same matrices.

use faer::{Col, Mat, Side};
use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{Budget, Letter, ModelSpec, Word};
use crate::error::Error;
use crate::series::{
    even_coefficients, full_terms, observable_coefficients, universality_threshold, ObservableSpec,
    SeriesCoefficients, SeriesLayout, SeriesTerm,
};
use crate::space::{
    hamiltonian_matrix, observable_matrix, parity, BlockadeBasis, ObservableMatrix, SparseIntMatrix, MAX_SITES,
};
use crate::Rational;

/// Largest dimension accepted for dense eigendecomposition.
pub const DIMENSION_BUDGET: usize = 8000;
/// Largest dimension accepted by the big-integer oracle.
pub const ORACLE_DIMENSION_BUDGET: usize = 1 << 21;
/// Largest imaginary part tolerated in an expectation of a self-adjoint
/// observable.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolutionMethod {
    Eigendecomposition,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub model: ModelSpec,
    pub observable: String,
    pub times: Vec<f64>,
    /// `NaN` at undefined points.
    pub values: Vec<f64>,
    pub method: EvolutionMethod,
    /// Largest discarded imaginary part.
    pub max_imaginary: f64,
    /// Indices of times where the value is undefined.
    pub undefined: Vec<usize>,
}

/// Complete spectral decomposition `H = V diag(E) Vᵀ`, energies ascending.
pub struct Eigensystem {
    model: ModelSpec,
    basis: BlockadeBasis,
    hamiltonian: SparseIntMatrix,
    energies: Vec<f64>,
    vectors: Mat<f64>,
}

fn decompose(h: &SparseIntMatrix) -> Result<(Vec<f64>, Mat<f64>), Error> {
    let dense = h.to_dense();
    let evd = dense.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let energies = (0..h.dim()).map(|i| s[i]).collect();
    Ok((energies, evd.U().to_owned()))
}

impl Eigensystem {
    pub fn new(model: &ModelSpec) -> Result<Self, Error> {
        Eigensystem::with_budget(model, DIMENSION_BUDGET)
    }

    pub fn with_budget(model: &ModelSpec, limit: usize) -> Result<Self, Error> {
        let basis = BlockadeBasis::new(model)?;
        if basis.dim() > limit {
            return Err(Error::DimensionOverBudget { dim: basis.dim(), limit });
        }
        let hamiltonian = hamiltonian_matrix(model, &basis)?;
        let (energies, vectors) = decompose(&hamiltonian)?;
        Ok(Eigensystem { model: *model, basis, hamiltonian, energies, vectors })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn basis(&self) -> &BlockadeBasis {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &SparseIntMatrix {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &Mat<f64> {
        &self.vectors
    }

    /// `e^{-iHt}|0⟩` as real and imaginary parts; the vacuum is basis
    /// position 0.
    pub fn state_at(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let v = &self.vectors;
        let cos = Col::<f64>::from_fn(n, |a| v[(0, a)] * (self.energies[a] * t).cos());
        let sin = Col::<f64>::from_fn(n, |a| -v[(0, a)] * (self.energies[a] * t).sin());
        let re = v * &cos;
        let im = v * &sin;
        ((0..n).map(|i| re[i]).collect(), (0..n).map(|i| im[i]).collect())
    }

    /// `⟨ψ(t)| O |ψ(t)⟩ / divisor` as `(re, im)`.
    pub fn expectation_complex(&self, obs: &ObservableMatrix, t: f64) -> (f64, f64) {
        let (re, im) = self.state_at(t);
        let (mut acc_re, mut acc_im) = (0.0, 0.0);
        for &(r, c, v) in obs.matrix.entries() {
            let v = v as f64;
            acc_re += v * (re[r] * re[c] + im[r] * im[c]);
            acc_im += v * (re[r] * im[c] - im[r] * re[c]);
        }
        let d = obs.divisor as f64;
        (acc_re / d, acc_im / d)
    }

    /// Real expectation of a self-adjoint observable matrix.
    pub fn expectation(&self, obs: &ObservableMatrix, t: f64) -> Result<f64, Error> {
        let (re, im) = self.expectation_complex(obs, t);
        if im.abs() >= IMAGINARY_TOLERANCE {
            return Err(Error::Eigen(format!("imaginary residue {im:e} at t = {t}")));
        }
        Ok(re)
    }

    pub fn observable(&self, obs: &ObservableSpec) -> Result<ObservableMatrix, Error> {
        if let ObservableSpec::GeneralWord(w) = obs {
            if !w.is_self_adjoint() {
                return Err(Error::InvalidObservable(format!(
                    "word {w} is not self-adjoint; its expectation is complex"
                )));
            }
        }
        observable_matrix(&self.model, &self.basis, obs)
    }

    pub fn evolve(&self, obs: &ObservableSpec, times: &[f64]) -> Result<EvolutionResult, Error> {
        let matrix = self.observable(obs)?;
        let mut values = Vec::with_capacity(times.len());
        let mut max_imaginary: f64 = 0.0;
        for &t in times {
            check_time(t)?;
            let (re, im) = self.expectation_complex(&matrix, t);
            if im.abs() >= IMAGINARY_TOLERANCE {
                return Err(Error::Eigen(format!("imaginary residue {im:e} at t = {t}")));
            }
            max_imaginary = max_imaginary.max(im.abs());
            values.push(re);
        }
        Ok(EvolutionResult {
            model: self.model,
            observable: obs.label(),
            times: times.to_vec(),
            values,
            method: EvolutionMethod::Eigendecomposition,
            max_imaginary,
            undefined: Vec::new(),
        })
    }

    /// `g_2(d, t) = ⟨n_k n_{k+d}⟩ / (⟨n_k⟩⟨n_{k+d}⟩)` at site `k`. Points with
    /// denominator below `1e-14` are `NaN` and listed as undefined.
    pub fn g2(&self, d: usize, site: i64, times: &[f64]) -> Result<EvolutionResult, Error> {
        let k = site;
        let kd = site + d as i64;
        let pair = Word::from_letters([(k, Letter::Num), (kd, Letter::Num)])?;
        let num = observable_matrix(&self.model, &self.basis, &ObservableSpec::GeneralWord(pair))?;
        let nk = observable_matrix(&self.model, &self.basis, &ObservableSpec::LocalNumber(k))?;
        let nkd = observable_matrix(&self.model, &self.basis, &ObservableSpec::LocalNumber(kd))?;
        let mut values = Vec::with_capacity(times.len());
        let mut undefined = Vec::new();
        for (i, &t) in times.iter().enumerate() {
            check_time(t)?;
            if t == 0.0 {
                return Err(Error::InvalidTime("g2 is undefined at t = 0".into()));
            }
            let den = self.expectation(&nk, t)? * self.expectation(&nkd, t)?;
            if den.abs() < 1e-14 {
                values.push(f64::NAN);
                undefined.push(i);
            } else {
                values.push(self.expectation(&num, t)? / den);
            }
        }
        Ok(EvolutionResult {
            model: self.model,
            observable: format!("g2_d{d}"),
            times: times.to_vec(),
            values,
            method: EvolutionMethod::Eigendecomposition,
            max_imaginary: 0.0,
            undefined,
        })
    }

    /// Parity and spectral diagnostics.
    pub fn spectral_checks(&self) -> SpectralReport {
        let n = self.dim();
        let e = &self.energies;
        let spectrum_symmetry = (0..n).map(|i| (e[i] + e[n - 1 - i]).abs()).fold(0.0, f64::max);
        let signs: Vec<i64> = self.basis.states().iter().map(|&s| parity(s)).collect();
        let mut parity_weight_defect: f64 = 0.0;
        for a in 0..n {
            if e[a].abs() > 1e-8 {
                let even: f64 = (0..n).filter(|&i| signs[i] == 1).map(|i| self.vectors[(i, a)].powi(2)).sum();
                parity_weight_defect = parity_weight_defect.max((even - 0.5).abs());
            }
        }
        let density = observable_matrix(&self.model, &self.basis, &ObservableSpec::DensityPerSite)
            .expect("density exists on every finite lattice");
        let mut evenness_defect: f64 = 0.0;
        let mut norm_defect: f64 = 0.0;
        for &t in &SPECTRAL_SAMPLE_TIMES {
            let plus = self.expectation_complex(&density, t).0;
            let minus = self.expectation_complex(&density, -t).0;
            evenness_defect = evenness_defect.max((plus - minus).abs());
            let (re, im) = self.state_at(t);
            let norm: f64 = re.iter().chain(&im).map(|x| x * x).sum::<f64>().sqrt();
            norm_defect = norm_defect.max((norm - 1.0).abs());
        }
        let p = crate::space::parity_matrix(&self.basis);
        let h = &self.hamiltonian;
        SpectralReport {
            dim: n,
            spectrum_symmetry,
            parity_weight_defect,
            evenness_defect,
            norm_defect,
            zero_modes: e.iter().filter(|x| x.abs() < 1e-8).count(),
            anticommutes: p.matmul(h).add(&h.matmul(&p)).nnz() == 0,
        }
    }
}

/// Times at which evenness and norm are sampled by
/// [`Eigensystem::spectral_checks`].
pub const SPECTRAL_SAMPLE_TIMES: [f64; 3] = [0.3, 1.1, 2.7];

fn check_time(t: f64) -> Result<(), Error> {
    if !t.is_finite() {
        return Err(Error::InvalidTime(format!("time {t} is not finite")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub dim: usize,
    /// `max_i |E_i + E_{dim+1-i}|` over the ascending spectrum.
    pub spectrum_symmetry: f64,
    /// `max |‖Ψ_even‖² - 1/2|` over eigenvectors with `|E| > 1e-8`.
    pub parity_weight_defect: f64,
    /// `max |ρ(t) - ρ(-t)|` over [`SPECTRAL_SAMPLE_TIMES`].
    pub evenness_defect: f64,
    /// `max |‖ψ(t)‖ - 1|` over the same times.
    pub norm_defect: f64,
    pub zero_modes: usize,
    /// `P H + H P = 0` in exact integers.
    pub anticommutes: bool,
}

impl SpectralReport {
    /// An odd-dimensional space must contain a zero mode.
    pub fn zero_mode_consistent(&self) -> bool {
        self.dim % 2 == 0 || self.zero_modes > 0
    }
}

pub fn evolve(model: &ModelSpec, obs: &ObservableSpec, times: &[f64]) -> Result<EvolutionResult, Error> {
    Eigensystem::new(model)?.evolve(obs, times)
}

pub fn g2(model: &ModelSpec, d: usize, site: i64, times: &[f64]) -> Result<EvolutionResult, Error> {
    Eigensystem::new(model)?.g2(d, site, times)
}

pub fn spectral_checks(model: &ModelSpec) -> Result<SpectralReport, Error> {
    Ok(Eigensystem::new(model)?.spectral_checks())
}

/// Exact vacuum moments `⟨ad^j(O)⟩` from matrices, with the derived series.
#[derive(Debug, Clone)]
pub struct TaylorOracleResult {
    /// `⟨ad^j(O)⟩` for `j = 0..=gmax`, divisor applied.
    pub moments: Vec<Rational>,
    pub coefficients: SeriesCoefficients,
}

/// Exact moments from `v_m = H^m |0⟩`:
/// `⟨ad^j(O)⟩ = Σ_m (-1)^m C(j, m) v_{j-m}ᵀ O v_m`.
pub fn matrix_moments(h: &SparseIntMatrix, obs: &ObservableMatrix, gmax: usize) -> Vec<Rational> {
    let n = h.dim();
    let mut v: Vec<Vec<BigInt>> = Vec::with_capacity(gmax + 1);
    let mut e0 = vec![BigInt::zero(); n];
    e0[0] = BigInt::from(1);
    v.push(e0);
    for m in 1..=gmax {
        let next = h.matvec_bigint(&v[m - 1]);
        v.push(next);
    }
    let w: Vec<Vec<BigInt>> = v.iter().map(|x| obs.matrix.matvec_bigint(x)).collect();
    let dot = |a: &[BigInt], b: &[BigInt]| -> BigInt {
        a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
    };
    let divisor = BigInt::from(obs.divisor);
    (0..=gmax)
        .map(|j| {
            let mut acc = BigInt::zero();
            for m in 0..=j {
                let term = dot(&v[j - m], &w[m]) * binomial(BigInt::from(j), BigInt::from(m));
                if m % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            Rational::new(acc, divisor.clone())
        })
        .collect()
}

/// Matrix counterpart of the symbolic series: density, local numbers and
/// correlations in the even layout up to `jmax`, words in the full layout.
pub fn taylor_oracle(model: &ModelSpec, obs: &ObservableSpec, jmax: usize) -> Result<TaylorOracleResult, Error> {
    let basis = BlockadeBasis::new(model)?;
    if basis.dim() > ORACLE_DIMENSION_BUDGET {
        return Err(Error::DimensionOverBudget { dim: basis.dim(), limit: ORACLE_DIMENSION_BUDGET });
    }
    if let ObservableSpec::Correlation(d) = obs {
        if *d <= model.blockade_range() {
            return Err(Error::InvalidObservable(format!(
                "correlation distance {d} is inside the blockade range {}",
                model.blockade_range()
            )));
        }
    }
    let h = hamiltonian_matrix(model, &basis)?;
    let o = observable_matrix(model, &basis, obs)?;
    let (layout, gmax) = match obs {
        ObservableSpec::GeneralWord(_) => (SeriesLayout::Full, jmax),
        _ => (SeriesLayout::Even, 2 * jmax),
    };
    let moments = matrix_moments(&h, &o, gmax);
    let terms = match layout {
        SeriesLayout::Even => even_coefficients(&moments, jmax)
            .into_iter()
            .enumerate()
            .map(|(i, value)| SeriesTerm { order: i + 1, value, imaginary: false })
            .collect(),
        SeriesLayout::Full => full_terms(&moments),
    };
    let observable = match obs {
        ObservableSpec::GeneralWord(w) => ObservableSpec::GeneralWord(model.normalize_word(w)?),
        other => other.clone(),
    };
    Ok(TaylorOracleResult {
        moments,
        coefficients: SeriesCoefficients {
            universal_up_to: universality_threshold(model, &observable),
            observable,
            model: *model,
            layout,
            terms,
        },
    })
}

/// Orders up to which [`universal_coefficients`] uses the symbolic engine.
pub const SYMBOLIC_UNIVERSAL_ORDER: usize = 6;

/// Infinite-lattice coefficients up to `jmax`. Beyond
/// [`SYMBOLIC_UNIVERSAL_ORDER`] they are read off the oracle on the smallest
/// ring whose universality threshold reaches `jmax`, where both agree
/// exactly. Words always go through the symbolic engine.
pub fn universal_coefficients(
    obs: &ObservableSpec,
    lambda_b: usize,
    jmax: usize,
    budget: Budget,
) -> Result<SeriesCoefficients, Error> {
    let infinite = ModelSpec::infinite(lambda_b)?;
    if jmax <= SYMBOLIC_UNIVERSAL_ORDER || matches!(obs, ObservableSpec::GeneralWord(_)) {
        return observable_coefficients(&infinite, obs, jmax, budget);
    }
    let ring = (lambda_b + 1..=MAX_SITES)
        .filter_map(|l| ModelSpec::ring(l, lambda_b).ok())
        .find(|m| universality_threshold(m, obs).is_some_and(|t| t >= jmax))
        .ok_or_else(|| Error::InvalidArgument(format!("no ring of at most {MAX_SITES} sites certifies order {jmax}")))?;
    let mut coefficients = taylor_oracle(&ring, obs, jmax)?.coefficients;
    coefficients.model = infinite;
    coefficients.universal_up_to = None;
    Ok(coefficients)
}

/// First grid time at which two curves differ by more than `eps`.
pub fn universal_window(a: &EvolutionResult, b: &EvolutionResult, eps: f64) -> Option<f64> {
    a.times
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .find(|(_, (x, y))| (*x - *y).abs() > eps)
        .map(|(t, _)| *t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowStatistics {
    pub mean: f64,
    pub variance: f64,
    pub samples: usize,
}

/// Mean and variance of the values with `start ≤ t ≤ end`.
pub fn window_statistics(result: &EvolutionResult, start: f64, end: f64) -> Option<WindowStatistics> {
    let xs: Vec<f64> = result
        .times
        .iter()
        .zip(&result.values)
        .filter(|(t, v)| (start..=end).contains(*t) && v.is_finite())
        .map(|(_, v)| *v)
        .collect();
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let variance = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Some(WindowStatistics { mean, variance, samples: xs.len() })
}

/// Evenly spaced grid of `steps + 1` points from `start` to `stop`.
pub fn time_grid(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![start];
    }
    (0..=steps).map(|i| start + (stop - start) * i as f64 / steps as f64).collect()
}

/// Maximum excitation number over the basis; caps `L·ρ(t)`.
pub fn max_excitations(basis: &BlockadeBasis) -> u32 {
    basis.states().iter().map(|s| s.excitations()).max().unwrap_or(0)
}
