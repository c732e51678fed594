//! Autoregressive processes: coefficient vectors, root factors, stability
//! classification and simulation.
//!
//! Roots are reported as *characteristic roots*, i.e. eigenvalues of the
//! companion matrix. These are the reciprocals of the zeros of the lag
//! polynomial `1 - β₁z - … - β_p z^p`, so a stable process has all
//! characteristic roots strictly inside the unit circle.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use num_traits::Num;
use rand_distr::{Distribution, StandardNormal, StudentT};

use crate::error::{Error, Result};
use crate::rng::SeedKey;
use crate::scalar::Scalar;

/// Tolerance on the largest characteristic-root modulus used by [`classify`].
pub const UNIT_ROOT_TOLERANCE: f64 = 1e-8;

/// Degrees of freedom of the heavy-tailed innovation option.
pub const STUDENT_T_DOF: f64 = 5.0;

/// Coefficients `β₁..β_p` of `y_t = β₁y_{t-1} + … + β_p y_{t-p} + ε_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArCoefficients<S> {
    beta: Vec<S>,
}

impl<S> ArCoefficients<S> {
    pub fn order(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[S] {
        &self.beta
    }

    pub fn into_beta(self) -> Vec<S> {
        self.beta
    }
}

impl<S: Scalar> ArCoefficients<S> {
    pub fn new(beta: Vec<S>) -> Result<Self> {
        if let Some(i) = beta.iter().position(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "coefficient beta_{} is not finite",
                i + 1
            )));
        }
        Ok(Self { beta })
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            beta: vec![S::zero(); order],
        }
    }

    /// True when the highest-lag coefficient is exactly zero, as happens for
    /// an over-specified fit of a lower-order process.
    pub fn is_overspecified(&self) -> bool {
        self.beta.last().is_some_and(|b| b.is_zero())
    }

    /// Lag polynomial coefficients `[1, -β₁, …, -β_p]`.
    pub fn lag_polynomial(&self) -> Vec<S> {
        std::iter::once(S::one())
            .chain(self.beta.iter().map(|&b| -b))
            .collect()
    }

    /// Evaluates `1 - Σ β_k z^k` by Horner's rule.
    pub fn eval_lag_polynomial(&self, z: S) -> S {
        self.lag_polynomial()
            .iter()
            .rev()
            .fold(S::zero(), |acc, &c| acc * z + c)
    }

    pub fn cast<T: Scalar>(&self) -> ArCoefficients<T> {
        ArCoefficients {
            beta: self.beta.iter().map(|b| T::lit(b.to_f64_lossy())).collect(),
        }
    }
}

/// One factor `(1 - r B)^m` of the lag polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootFactor<R> {
    /// Characteristic root `r` (companion eigenvalue).
    pub root: R,
    pub multiplicity: usize,
}

/// Lag polynomial given as a product of real root factors.
#[derive(Debug, Clone, PartialEq)]
pub struct RootFactorSpec<R = f64> {
    factors: Vec<RootFactor<R>>,
}

impl<R> RootFactorSpec<R> {
    pub fn new(factors: Vec<RootFactor<R>>) -> Result<Self> {
        if factors.iter().any(|f| f.multiplicity == 0) {
            return Err(Error::InvalidFactors(
                "root multiplicities must be at least 1".into(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[RootFactor<R>] {
        &self.factors
    }

    /// Total multiplicity, which equals the autoregressive order.
    pub fn order(&self) -> usize {
        self.factors.iter().map(|f| f.multiplicity).sum()
    }
}

impl RootFactorSpec<f64> {
    /// Total multiplicity of roots exactly equal to `value`.
    pub fn multiplicity_of(&self, value: f64) -> usize {
        self.factors
            .iter()
            .filter(|f| f.root == value)
            .map(|f| f.multiplicity)
            .sum()
    }
}

/// Parses `"0.5^2,1.0"`: comma-separated roots, each with an optional
/// `^multiplicity` suffix.
impl FromStr for RootFactorSpec<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidFactors(msg);
        let mut factors = Vec::new();
        for part in s.split(',').map(str::trim) {
            if part.is_empty() {
                return Err(bad(format!("empty factor in {s:?}")));
            }
            let (root, mult) = match part.split_once('^') {
                Some((r, m)) => (r.trim(), m.trim()),
                None => (part, "1"),
            };
            let root: f64 = root
                .parse()
                .map_err(|_| bad(format!("cannot parse root {root:?}")))?;
            if !root.is_finite() {
                return Err(bad(format!("root {root} is not finite")));
            }
            let multiplicity: usize = mult
                .parse()
                .map_err(|_| bad(format!("cannot parse multiplicity {mult:?}")))?;
            factors.push(RootFactor { root, multiplicity });
        }
        Self::new(factors)
    }
}

impl fmt::Display for RootFactorSpec<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", factor.root)?;
            if factor.multiplicity != 1 {
                write!(f, "^{}", factor.multiplicity)?;
            }
        }
        Ok(())
    }
}

/// Expands `Π (1 - r_i B)^{m_i}` and returns `β` with
/// `1 - β₁B - … - β_pB^p` equal to the product.
///
/// Generic over any exact or floating number type; with a rational type the
/// expansion is exact.
pub fn coefficients_from_factors<R>(spec: &RootFactorSpec<R>) -> ArCoefficients<R>
where
    R: Num + Clone,
{
    let mut poly = vec![R::one()];
    for factor in spec.factors() {
        for _ in 0..factor.multiplicity {
            let mut next = poly.clone();
            next.push(R::zero());
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] = next[k + 1].clone() - factor.root.clone() * c.clone();
            }
            poly = next;
        }
    }
    ArCoefficients {
        beta: poly.into_iter().skip(1).map(|c| R::zero() - c).collect(),
    }
}

/// The four simulation designs with roots (0.5, 0.5, r) for
/// r = 1.0, 0.99, 0.95, 0.5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchmarkModel {
    Model1,
    Model2,
    Model3,
    Model4,
}

impl BenchmarkModel {
    pub const ALL: [BenchmarkModel; 4] = [Self::Model1, Self::Model2, Self::Model3, Self::Model4];

    pub fn largest_root(self) -> f64 {
        match self {
            Self::Model1 => 1.0,
            Self::Model2 => 0.99,
            Self::Model3 => 0.95,
            Self::Model4 => 0.5,
        }
    }

    pub fn factors(self) -> RootFactorSpec<f64> {
        let factors = match self {
            Self::Model4 => vec![RootFactor {
                root: 0.5,
                multiplicity: 3,
            }],
            other => vec![
                RootFactor {
                    root: 0.5,
                    multiplicity: 2,
                },
                RootFactor {
                    root: other.largest_root(),
                    multiplicity: 1,
                },
            ],
        };
        RootFactorSpec { factors }
    }

    pub fn coefficients(self) -> ArCoefficients<f64> {
        coefficients_from_factors(&self.factors())
    }
}

impl FromStr for BenchmarkModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "model1" | "m1" => Ok(Self::Model1),
            "2" | "model2" | "m2" => Ok(Self::Model2),
            "3" | "model3" | "m3" => Ok(Self::Model3),
            "4" | "model4" | "m4" => Ok(Self::Model4),
            other => Err(Error::InvalidConfig(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    Stable,
    Unstable,
    Explosive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability<S> {
    pub class: StabilityClass,
    /// Largest characteristic-root modulus.
    pub max_modulus: S,
}

/// Companion-matrix eigenvalues of the process.
///
/// Eigenvalues of a defective companion matrix (repeated roots) come back
/// from the QR iteration as a small cluster around the true value; clusters
/// whose spread is consistent with that perturbation are replaced by their
/// mean, which is accurate to working precision.
pub fn characteristic_roots<S: Scalar>(coeffs: &ArCoefficients<S>) -> Result<Vec<Complex<f64>>> {
    let p = coeffs.order();
    if p == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut companion = DMatrix::<f64>::zeros(p, p);
    for (j, b) in coeffs.beta().iter().enumerate() {
        companion[(0, j)] = b.to_f64_lossy();
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    let raw: Vec<Complex<f64>> = companion.complex_eigenvalues().iter().copied().collect();
    Ok(merge_root_clusters(raw))
}

fn merge_root_clusters(roots: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
    const LINK_RADIUS: f64 = 1e-3;
    let n = roots.len();
    let mut cluster_of: Vec<usize> = (0..n).collect();
    // single linkage by repeated relabelling; n is the AR order, so tiny
    for _ in 0..n {
        for i in 0..n {
            for j in 0..n {
                let scale = roots[i].norm().max(1.0);
                if (roots[i] - roots[j]).norm() < LINK_RADIUS * scale {
                    let c = cluster_of[i].min(cluster_of[j]);
                    cluster_of[i] = c;
                    cluster_of[j] = c;
                }
            }
        }
    }
    let mut out = roots.clone();
    for c in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| cluster_of[i] == c).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        let mean = members.iter().map(|&i| roots[i]).sum::<Complex<f64>>() / m as f64;
        let spread = members
            .iter()
            .map(|&i| (roots[i] - mean).norm())
            .fold(0.0, f64::max);
        let expected = 100.0 * f64::EPSILON.powf(1.0 / m as f64) * mean.norm().max(1.0);
        if spread <= expected {
            for &i in &members {
                out[i] = mean;
            }
        }
    }
    out
}

/// Classifies the process by its largest characteristic-root modulus.
pub fn classify<S: Scalar>(coeffs: &ArCoefficients<S>) -> Result<Stability<S>> {
    let max_modulus = characteristic_roots(coeffs)?
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    let class = if max_modulus < 1.0 - UNIT_ROOT_TOLERANCE {
        StabilityClass::Stable
    } else if max_modulus <= 1.0 + UNIT_ROOT_TOLERANCE {
        StabilityClass::Unstable
    } else {
        StabilityClass::Explosive
    };
    Ok(Stability {
        class,
        max_modulus: S::lit(max_modulus),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    /// Normal innovations with standard deviation `sigma`.
    #[default]
    Gaussian,
    /// Student-t innovations with 5 degrees of freedom, rescaled to
    /// variance `sigma²`.
    StudentT,
    /// No noise: the recursion runs deterministically from its initial values.
    Zero,
}

/// A data-generating autoregressive process.
#[derive(Debug, Clone, PartialEq)]
pub struct ArProcess<S> {
    pub coeffs: ArCoefficients<S>,
    pub sigma: S,
    /// `y_0, y_{-1}, …, y_{1-p}`.
    pub initial_values: Vec<S>,
    pub noise: NoiseKind,
    /// Number of leading simulated values discarded before the sample.
    pub burn_in: usize,
}

impl<S: Scalar> ArProcess<S> {
    /// Gaussian process with zero initial values and no burn-in.
    pub fn new(coeffs: ArCoefficients<S>, sigma: S) -> Result<Self> {
        if !(sigma > S::zero()) || !sigma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "innovation standard deviation must be positive, got {sigma}"
            )));
        }
        let p = coeffs.order();
        Ok(Self {
            coeffs,
            sigma,
            initial_values: vec![S::zero(); p],
            noise: NoiseKind::Gaussian,
            burn_in: 0,
        })
    }

    pub fn with_initial_values(mut self, initial_values: Vec<S>) -> Result<Self> {
        if initial_values.len() != self.coeffs.order() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.order(),
                got: initial_values.len(),
            });
        }
        self.initial_values = initial_values;
        Ok(self)
    }

    pub fn with_noise(mut self, noise: NoiseKind) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }
}

/// A simulated path together with the innovations that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSample<S> {
    pub values: Vec<S>,
    pub innovations: Vec<S>,
    pub seed: SeedKey,
}

impl<S> SeriesSample<S> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Simulates `len` observations with innovations drawn from the stream keyed
/// by `seed` alone.
pub fn simulate<S: Scalar>(process: &ArProcess<S>, len: usize, seed: u64) -> SeriesSample<S> {
    simulate_keyed(process, len, SeedKey::new(seed))
}

/// Simulates `len` observations with innovations from the stream `key`.
/// Output is a pure function of `(process, len, key)`.
pub fn simulate_keyed<S: Scalar>(
    process: &ArProcess<S>,
    len: usize,
    key: SeedKey,
) -> SeriesSample<S> {
    let total = len + process.burn_in;
    let mut rng = key.rng();
    let sigma = process.sigma.to_f64_lossy();
    let innovations: Vec<S> = match process.noise {
        NoiseKind::Gaussian => (0..total)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                S::lit(sigma * z)
            })
            .collect(),
        NoiseKind::StudentT => {
            let dist = StudentT::new(STUDENT_T_DOF).expect("valid degrees of freedom");
            let unit = ((STUDENT_T_DOF - 2.0) / STUDENT_T_DOF).sqrt();
            (0..total)
                .map(|_| S::lit(sigma * unit * dist.sample(&mut rng)))
                .collect()
        }
        NoiseKind::Zero => vec![S::zero(); total],
    };
    let values = run_recursion(&process.coeffs, &process.initial_values, &innovations);
    SeriesSample {
        values: values[process.burn_in..].to_vec(),
        innovations: innovations[process.burn_in..].to_vec(),
        seed: key,
    }
}

/// Iterates the autoregression over the given innovations.
pub fn run_recursion<S: Scalar>(
    coeffs: &ArCoefficients<S>,
    initial_values: &[S],
    innovations: &[S],
) -> Vec<S> {
    let beta = coeffs.beta();
    let mut values: Vec<S> = Vec::with_capacity(innovations.len());
    for (t, &eps) in innovations.iter().enumerate() {
        let mut y = S::zero();
        for (k, &b) in beta.iter().enumerate() {
            let lag = k + 1;
            let past = if t >= lag {
                values[t - lag]
            } else {
                initial_values[lag - t - 1]
            };
            y = y + b * past;
        }
        values.push(y + eps);
    }
    values
}
