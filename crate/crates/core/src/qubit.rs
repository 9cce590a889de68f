//! Closed-form qubit results.
//!
//! A two-outcome qubit measurement is written in Bloch form
//!
//! ```text
//! M± = ((1 ± r0)·I ± r·σ) / 2,        |r0| + |r| ≤ 1
//! ```
//!
//! and Alice encodes along the x, y or z axis with priors `(1±δ)/2`. For the
//! eigenstate with Bloch vector `±ê_a` the `+` outcome has probability
//! `(1 + r0 ± r_a)/2`, which makes every `I_a` a binary-channel information
//! computable without matrices.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::shannon;
use crate::quantum::{ComplexMatrix, HermitianOperator, Povm, C64};

const BLOCH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Position of this axis in the standard qubit family (Z, X, Y).
    pub fn family_index(self) -> usize {
        match self {
            Axis::Z => 0,
            Axis::X => 1,
            Axis::Y => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochMeasurement {
    r0: f64,
    r: [f64; 3],
}

impl BlochMeasurement {
    pub fn new(r0: f64, r: [f64; 3]) -> Result<Self> {
        let meas = Self { r0, r };
        if !(r0.is_finite() && r.iter().all(|x| x.is_finite())) || r0.abs() + meas.radius() > 1.0 + BLOCH_TOL {
            return Err(Error::Argument(format!(
                "|r0| + |r| must not exceed 1 (r0={r0}, r={r:?})"
            )));
        }
        Ok(meas)
    }

    /// Reads `(r0, r)` off the first element of a two-outcome qubit POVM.
    pub fn from_element(plus: &HermitianOperator) -> Result<Self> {
        if plus.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: plus.dim(),
            });
        }
        let (r0, r) = bloch_components(plus);
        Self::new(r0, r)
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn r(&self) -> [f64; 3] {
        self.r
    }

    pub fn radius(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn component(&self, axis: Axis) -> f64 {
        self.r[axis.index()]
    }
}

/// `(r0, r)` with `A = ((1 + r0)·I + r·σ)/2`, for any Hermitian 2×2 `A`.
pub fn bloch_components(op: &HermitianOperator) -> (f64, [f64; 3]) {
    let m = op.matrix();
    let r0 = m[(0, 0)].re + m[(1, 1)].re - 1.0;
    let rx = 2.0 * m[(0, 1)].re;
    let ry = -2.0 * m[(0, 1)].im;
    let rz = m[(0, 0)].re - m[(1, 1)].re;
    (r0, [rx, ry, rz])
}

/// Alice's per-axis prior biases, `p_1 = (1+δ)/2`, `p_2 = (1-δ)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisPriors {
    delta: [f64; 3],
}

impl AxisPriors {
    pub fn new(delta: [f64; 3]) -> Result<Self> {
        if delta.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return Err(Error::Argument(format!("every δ must lie in [0, 1], got {delta:?}")));
        }
        Ok(Self { delta })
    }

    pub fn equal() -> Self {
        Self { delta: [0.0; 3] }
    }

    pub fn delta(&self, axis: Axis) -> f64 {
        self.delta[axis.index()]
    }

    pub fn priors(&self, axis: Axis) -> [f64; 2] {
        let d = self.delta(axis);
        [(1.0 + d) / 2.0, (1.0 - d) / 2.0]
    }
}

pub fn to_povm(meas: &BlochMeasurement) -> Povm {
    let [rx, ry, rz] = meas.r;
    let r0 = meas.r0;
    let element = |sign: f64| {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new((1.0 + sign * r0 + sign * rz) / 2.0, 0.0),
                C64::new(sign * rx / 2.0, -sign * ry / 2.0),
                C64::new(sign * rx / 2.0, sign * ry / 2.0),
                C64::new((1.0 + sign * r0 - sign * rz) / 2.0, 0.0),
            ],
        );
        HermitianOperator::new(m).expect("Bloch elements are Hermitian")
    };
    Povm::new(vec![element(1.0), element(-1.0)]).expect("two 2x2 elements")
}

fn binary_entropy(p: f64) -> f64 {
    shannon([p, 1.0 - p])
}

/// `I_a` in bits for encoding along `axis` with bias `delta`.
pub fn axis_information(meas: &BlochMeasurement, axis: Axis, delta: f64) -> f64 {
    let ra = meas.component(axis);
    let plus_given_up = ((1.0 + meas.r0 + ra) / 2.0).clamp(0.0, 1.0);
    let plus_given_down = ((1.0 + meas.r0 - ra) / 2.0).clamp(0.0, 1.0);
    let (p_up, p_down) = ((1.0 + delta) / 2.0, (1.0 - delta) / 2.0);
    let plus = (p_up * plus_given_up + p_down * plus_given_down).clamp(0.0, 1.0);
    let value = binary_entropy(plus) - p_up * binary_entropy(plus_given_up) - p_down * binary_entropy(plus_given_down);
    value.max(0.0)
}

/// `I_x + I_y + I_z`.
pub fn three_axis_sum(meas: &BlochMeasurement, deltas: &AxisPriors) -> f64 {
    Axis::ALL
        .iter()
        .map(|&a| axis_information(meas, a, deltas.delta(a)))
        .sum()
}

/// Both sides of the series argument for one axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesCheck {
    /// Partial sum of the power series, in bits.
    pub partial_sum: f64,
    /// Closed-form `I_a`, in bits.
    pub closed_form: f64,
    /// `r_a² / |r|²`, the per-axis cap in bits.
    pub ratio_bound: f64,
}

impl SeriesCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.closed_form <= self.ratio_bound + tol
    }
}

/// Evaluates
///
/// ```text
/// I_a·ln2 = Σ_n [ (1+δ)/2·(r0+r_a)^{2n} + (1-δ)/2·(r0-r_a)^{2n} - (r0+δ·r_a)^{2n} ] / (2n(2n-1))
/// ```
///
/// up to `n_terms` terms, next to the closed form and the cap `r_a²/|r|²`.
pub fn series_bound_check(meas: &BlochMeasurement, axis: Axis, delta: f64, n_terms: usize) -> Result<SeriesCheck> {
    let radius = meas.radius();
    if radius == 0.0 {
        return Err(Error::Argument("the cap r_a²/|r|² is undefined for r = 0".into()));
    }
    let ra = meas.component(axis);
    let r0 = meas.r0;
    let (a_up, a_down, a_mean) = (r0 + ra, r0 - ra, r0 + delta * ra);
    let (sq_up, sq_down, sq_mean) = (a_up * a_up, a_down * a_down, a_mean * a_mean);
    let (mut pow_up, mut pow_down, mut pow_mean) = (1.0, 1.0, 1.0);
    let mut sum = 0.0;
    for n in 1..=n_terms {
        pow_up *= sq_up;
        pow_down *= sq_down;
        pow_mean *= sq_mean;
        let nf = n as f64;
        let term = (1.0 + delta) / 2.0 * pow_up + (1.0 - delta) / 2.0 * pow_down - pow_mean;
        sum += term / (2.0 * nf * (2.0 * nf - 1.0));
    }
    Ok(SeriesCheck {
        partial_sum: sum / std::f64::consts::LN_2,
        closed_form: axis_information(meas, axis, delta),
        ratio_bound: ra * ra / (radius * radius),
    })
}

/// Uniform `r0 ∈ [-1, 1]`, `|r|` uniform in `[0, 1 - |r0|]`, isotropic direction.
pub fn random_measurement<R: Rng + ?Sized>(rng: &mut R) -> BlochMeasurement {
    let r0: f64 = rng.random_range(-1.0..=1.0);
    let radius = rng.random_range(0.0..=1.0) * (1.0 - r0.abs());
    let cos_t: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let r = [radius * sin_t * phi.cos(), radius * sin_t * phi.sin(), radius * cos_t];
    // rounding can push |r0| + |r| a hair past 1
    BlochMeasurement::new(r0, r).unwrap_or(BlochMeasurement { r0, r: r.map(|x| x * (1.0 - 1e-15)) })
}

pub fn random_axis_priors<R: Rng + ?Sized>(rng: &mut R) -> AxisPriors {
    AxisPriors {
        delta: [rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)],
    }
}

/// Projective measurement along the unit direction `n` (normalised internally).
pub fn projective_along(n: [f64; 3]) -> Result<BlochMeasurement> {
    let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len.is_nan() || len <= 0.0 {
        return Err(Error::Argument("direction must be nonzero".into()));
    }
    BlochMeasurement::new(0.0, n.map(|x| x / len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::mutual_information;
    use crate::mub::standard_mubs;
    use crate::quantum::validate_povm;
    use crate::sampling::RngSeed;

    fn z_meas() -> BlochMeasurement {
        BlochMeasurement::new(0.0, [0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn povm_construction() {
        let p = to_povm(&z_meas());
        assert_eq!(p.elements()[0], HermitianOperator::diagonal(&[1.0, 0.0]));
        assert_eq!(p.elements()[1], HermitianOperator::diagonal(&[0.0, 1.0]));

        let trivial = to_povm(&BlochMeasurement::new(1.0, [0.0; 3]).unwrap());
        assert_eq!(trivial.elements()[0], HermitianOperator::identity(2));
        assert_eq!(trivial.elements()[1], HermitianOperator::zeros(2));

        let n = 1.0 / 3f64.sqrt();
        let diag = to_povm(&BlochMeasurement::new(0.0, [n, n, n]).unwrap());
        assert!(validate_povm(&diag, 1e-12).passed);
        let (r0, r) = bloch_components(&diag.elements()[0]);
        assert!(r0.abs() < 1e-15 && r.iter().all(|x| (x - n).abs() < 1e-15));

        assert!(BlochMeasurement::new(0.5, [0.0, 0.6, 0.0]).is_err());
    }

    #[test]
    fn axis_information_examples() {
        assert_eq!(axis_information(&z_meas(), Axis::Z, 0.0), 1.0);
        for delta in [0.0, 0.3, 1.0] {
            assert_eq!(axis_information(&z_meas(), Axis::X, delta), 0.0);
        }
        let n = 1.0 / 3f64.sqrt();
        let m = BlochMeasurement::new(0.0, [n, n, n]).unwrap();
        // oracle: 1 - h((1 + 1/√3)/2) with h evaluated directly
        let q = (1.0 + n) / 2.0;
        let expected = 1.0 + q * q.log2() + (1.0 - q) * (1.0 - q).log2();
        assert!((axis_information(&m, Axis::Z, 0.0) - expected).abs() < 1e-15);
        assert!((expected - 0.2560).abs() < 1e-4);
        assert!((three_axis_sum(&m, &AxisPriors::equal()) - 0.768).abs() < 1e-4);
    }

    #[test]
    fn three_axis_sum_saturation() {
        let deltas = AxisPriors::new([0.4, 0.9, 0.0]).unwrap();
        assert!((three_axis_sum(&z_meas(), &deltas) - 1.0).abs() < 1e-15);
        assert!(AxisPriors::new([1.2, 0.0, 0.0]).is_err());
    }

    #[test]
    fn closed_form_matches_matrix_pipeline() {
        let fam = standard_mubs(2, 3).unwrap();
        let mut rng = RngSeed::new(123, 0).rng();
        for _ in 0..2000 {
            let meas = random_measurement(&mut rng);
            let deltas = random_axis_priors(&mut rng);
            let povm = to_povm(&meas);
            for axis in Axis::ALL {
                let priors = deltas.priors(axis);
                let oracle = mutual_information(&priors, &fam.bases()[axis.family_index()], &povm).unwrap();
                let closed = axis_information(&meas, axis, deltas.delta(axis));
                assert!((oracle - closed).abs() < 1e-10, "{axis:?}: {oracle} vs {closed}");
            }
        }
    }

    #[test]
    fn series_examples() {
        let c = series_bound_check(&z_meas(), Axis::Z, 0.0, 200).unwrap();
        assert_eq!(c.ratio_bound, 1.0);
        assert!((c.closed_form - 1.0).abs() < 1e-15);
        assert!(c.holds(1e-9));

        let m = BlochMeasurement::new(0.3, [0.4, 0.0, 0.3]).unwrap();
        let c = series_bound_check(&m, Axis::X, 0.5, 200).unwrap();
        assert!((c.ratio_bound - 0.64).abs() < 1e-15);
        assert!(c.holds(1e-9));
        assert!((c.partial_sum - c.closed_form).abs() < 1e-12);

        let mut last = 0.0;
        for n in 1..=50 {
            let s = series_bound_check(&m, Axis::X, 0.5, n).unwrap().partial_sum;
            assert!(s >= last);
            last = s;
        }
        let zero = BlochMeasurement::new(0.5, [0.0; 3]).unwrap();
        assert!(series_bound_check(&zero, Axis::X, 0.5, 10).is_err());
    }

    #[test]
    fn projective_direction_round_trip() {
        let m = projective_along([1.0, 2.0, -2.0]).unwrap();
        assert!((m.radius() - 1.0).abs() < 1e-15);
        let back = BlochMeasurement::from_element(&to_povm(&m).elements()[0]).unwrap();
        for (a, b) in m.r().iter().zip(back.r()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
