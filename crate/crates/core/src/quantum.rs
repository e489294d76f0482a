//! Finite-dimensional simulation of the depolarized cloning experiment.
//!
//! Inputs are qubits in `span{|a>, |b>}`; clones, ideal copies and their
//! orthogonal partners live in the two-qubit space `C² ⊗ C²` with basis
//! ordering `|ij> -> 2i + j`. All states of the experiment lie in real spans,
//! so amplitudes are stored as complex numbers with zero imaginary part.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::bounds::{ErrorBudget, OverlapParams};
use crate::error::{check_unit, Error, Result};
use crate::optimize::nelder_mead;

pub type C64 = Complex<f64>;

/// Tolerance for the state and operator invariants.
pub const STATE_TOL: f64 = 1e-12;
/// Largest excess over `[0, 1]` a Born probability may carry before it is
/// treated as an error instead of rounding.
pub const BORN_CLIP_TOL: f64 = 1e-10;

const SPAN_COLLAPSE_TOL: f64 = 1e-9;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Unit vector in `C²` or `C⁴`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let d = amplitudes.len();
        if d != 2 && d != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: d,
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::Invariant(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&x| real(x)),
        ))
    }

    /// Normalizes `v` first; fails on the zero vector.
    fn normalized(v: DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if norm < SPAN_COLLAPSE_TOL {
            return Err(Error::Invariant("cannot normalize a null vector".into()));
        }
        Self::new(v / real(norm))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|<self|other>|²`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        PureState { amplitudes: amps }
    }

    pub fn projector(&self) -> DMatrix<C64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Largest imaginary part among the amplitudes.
    pub fn max_imaginary(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }
}

/// A density matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    /// Checks hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || (d != 2 && d != 4) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: d,
            });
        }
        let herm = hermiticity_defect(&matrix);
        if herm > STATE_TOL {
            return Err(Error::Invariant(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Invariant(format!("trace {tr} is not 1")));
        }
        let min_eig = spectrum(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOL {
            return Err(Error::Invariant(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: psi.projector(),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: DMatrix::identity(d, d) * real(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `Tr₂` over the second qubit of a two-qubit operator.
    pub fn partial_trace_second(&self) -> Result<DensityOperator> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: self.dim(),
            });
        }
        let m = DMatrix::from_fn(2, 2, |i, k| {
            (0..2).map(|j| self.matrix[(2 * i + j, 2 * k + j)]).sum()
        });
        DensityOperator::new(m)
    }

    /// Largest eigenvalue deficit below zero and trace error, for reports.
    pub fn invariant_defect(&self) -> f64 {
        let min_eig = spectrum(&self.matrix).into_iter().fold(0.0, f64::min);
        let tr = self.matrix.trace();
        (-min_eig)
            .max((tr.re - 1.0).abs())
            .max(hermiticity_defect(&self.matrix))
    }
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn spectrum(m: &DMatrix<C64>) -> Vec<f64> {
    // symmetrize away rounding before the eigen-solve
    let h = (m + m.adjoint()) * real(0.5);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

/// Largest entrywise modulus of `x - y`.
pub fn max_abs_diff(x: &DMatrix<C64>, y: &DMatrix<C64>) -> f64 {
    (x - y).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A two-outcome measurement given by its outcome-1 effect `E`; outcome 0
/// is `I - E`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcomeMeasurement {
    effect: DMatrix<C64>,
}

impl TwoOutcomeMeasurement {
    pub fn new(effect: DMatrix<C64>) -> Result<Self> {
        let d = effect.nrows();
        if effect.ncols() != d || (d != 2 && d != 4) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: d,
            });
        }
        let herm = hermiticity_defect(&effect);
        if herm > STATE_TOL {
            return Err(Error::Invariant(format!(
                "effect not Hermitian (defect {herm:e})"
            )));
        }
        let eig = spectrum(&effect);
        let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo < -STATE_TOL || hi > 1.0 + STATE_TOL {
            return Err(Error::Invariant(format!(
                "effect spectrum [{lo}, {hi}] leaves [0, 1]"
            )));
        }
        Ok(Self { effect })
    }

    /// `{|psi><psi|, I - |psi><psi|}`.
    pub fn projective(psi: &PureState) -> Self {
        Self {
            effect: psi.projector(),
        }
    }

    /// The test for `psi` after depolarization at level `v`:
    /// `E = (1-v)|psi><psi| + v I/d`.
    pub fn depolarized(psi: &PureState, v: NoiseLevel) -> Self {
        let d = psi.dim();
        let keep = 1.0 - v.value();
        let noise = DMatrix::identity(d, d) * real(v.value() / d as f64);
        Self {
            effect: psi.projector() * real(keep) + noise,
        }
    }

    pub fn effect(&self) -> &DMatrix<C64> {
        &self.effect
    }

    pub fn complement(&self) -> TwoOutcomeMeasurement {
        let d = self.effect.nrows();
        Self {
            effect: DMatrix::identity(d, d) - &self.effect,
        }
    }

    pub fn dim(&self) -> usize {
        self.effect.nrows()
    }
}

/// Depolarizing noise level `v ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NoiseLevel(f64);

impl NoiseLevel {
    pub fn new(v: f64) -> Result<Self> {
        check_unit("v", v).map(Self)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Qubit states with `<a|b> = sqrt(c_ab)`, in the gauge
/// `|a> = (cos θ, sin θ)`, `|b> = (cos θ, -sin θ)`, `cos 2θ = sqrt(c_ab)`.
pub fn make_input_pair(c_ab: f64) -> Result<(PureState, PureState)> {
    let c = check_unit("c_ab", c_ab)?;
    let theta = 0.5 * c.sqrt().acos();
    let (s, co) = theta.sin_cos();
    Ok((
        PureState::from_real(&[co, s])?,
        PureState::from_real(&[co, -s])?,
    ))
}

/// The two-qubit depolarizing channel `(1-v) rho + v I/4`.
pub fn depolarize(rho: &DensityOperator, v: NoiseLevel) -> Result<DensityOperator> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let v = v.value();
    let matrix = rho.matrix() * real(1.0 - v) + DMatrix::identity(4, 4) * real(0.25 * v);
    DensityOperator::new(matrix)
}

/// `Tr[rho E]` for the outcome-1 effect.
pub fn born(rho: &DensityOperator, m: &TwoOutcomeMeasurement) -> Result<f64> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: m.dim(),
        });
    }
    let p = (rho.matrix() * m.effect()).trace();
    if p.im.abs() > BORN_CLIP_TOL {
        return Err(Error::Invariant(format!(
            "Born probability has imaginary part {:e}",
            p.im
        )));
    }
    let p = p.re;
    if !(-BORN_CLIP_TOL..=1.0 + BORN_CLIP_TOL).contains(&p) {
        return Err(Error::ProbabilityOutOfRange { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Unit vector in `span{x, y}` orthogonal to `x`. When the span collapses
/// (`y ∥ x`) the complement is taken in the ambient space: the
/// computational basis vector with the largest component orthogonal to `x`,
/// orthogonalized against `x`. The flag reports the collapse.
fn orthogonal_in_span(x: &PureState, y: &PureState) -> Result<(PureState, bool)> {
    let residual = y.amplitudes() - x.amplitudes() * x.inner(y);
    if residual.norm() > SPAN_COLLAPSE_TOL {
        return Ok((PureState::normalized(residual)?, false));
    }
    let d = x.dim();
    let best = (0..d)
        .map(|k| {
            let e = DVector::from_fn(d, |i, _| real(if i == k { 1.0 } else { 0.0 }));
            let r = &e - x.amplitudes() * x.amplitudes()[k].conj();
            (r.norm(), r)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, r)| r)
        .expect("dimension is at least 2");
    Ok((PureState::normalized(best)?, true))
}

/// The optimal clones `|alpha> = U|a0>`, `|beta> = U|b0>` of the
/// symmetric cloner, written in `span{|aa>, |bb>}`.
///
/// With `|±> ∝ |aa> ± |bb>` they are `cos φ|+> ± sin φ|->`, where
/// `cos 2φ = <a|b>` preserves the input inner product.
pub fn symmetric_clones(c_ab: f64) -> Result<(PureState, PureState)> {
    let c = check_unit("c_ab", c_ab)?;
    let (a, b) = make_input_pair(c)?;
    let aa = a.tensor(&a).amplitudes().clone();
    let bb = b.tensor(&b).amplitudes().clone();
    let s = c.sqrt();
    let cos_phi = ((1.0 + s) / 2.0).sqrt();
    // cos φ/√(2(1+c)) and sin φ/√(2(1-c)) = 1/(2√(1+s)), finite at c = 1
    let plus_w = cos_phi / (2.0 * (1.0 + c)).sqrt();
    let minus_w = 1.0 / (2.0 * (1.0 + s).sqrt());
    let sum = &aa + &bb;
    let diff = &aa - &bb;
    let alpha = &sum * real(plus_w) + &diff * real(minus_w);
    let beta = &sum * real(plus_w) - &diff * real(minus_w);
    Ok((PureState::normalized(alpha)?, PureState::normalized(beta)?))
}

/// All preparations and tests of the depolarized experiment.
///
/// Inputs and their complements are qubit marginals of one depolarization;
/// every two-qubit preparation carries `(1-v)²` pure weight.
#[derive(Debug, Clone)]
pub struct NoisyEnsemble {
    pub v: f64,
    pub c_ab: f64,
    pub rho_a: DensityOperator,
    pub rho_b: DensityOperator,
    pub rho_a_perp: DensityOperator,
    pub rho_b_perp: DensityOperator,
    pub rho_alpha: DensityOperator,
    pub rho_beta: DensityOperator,
    pub rho_alpha_perp: DensityOperator,
    pub rho_beta_perp: DensityOperator,
    pub rho_aa: DensityOperator,
    pub rho_bb: DensityOperator,
    /// Complement of `aa` in `span{alpha, aa}`.
    pub rho_aa_perp: DensityOperator,
    /// Complement of `bb` in `span{beta, bb}`.
    pub rho_bb_perp: DensityOperator,
    /// Complement of `aa` in `span{aa, bb}`.
    pub rho_aa_perp_prime: DensityOperator,
    /// Complement of `bb` in `span{aa, bb}`.
    pub rho_bb_perp_prime: DensityOperator,
    pub m_a: TwoOutcomeMeasurement,
    pub m_b: TwoOutcomeMeasurement,
    pub m_alpha: TwoOutcomeMeasurement,
    pub m_beta: TwoOutcomeMeasurement,
    pub m_aa: TwoOutcomeMeasurement,
    pub m_bb: TwoOutcomeMeasurement,
    /// Set when at least one two-dimensional span collapsed.
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

/// The four operational equivalences checked on a [`NoisyEnsemble`].
pub const EQUIVALENCE_PAIRS: [&str; 4] = ["a,b", "alpha,aa", "beta,bb", "aa,bb"];

impl NoisyEnsemble {
    /// Entrywise residual of `½ρ_s + ½ρ_s⊥ - ½ρ_s' - ½ρ_s'⊥` for each pair
    /// in [`EQUIVALENCE_PAIRS`] order.
    pub fn equivalence_residuals(&self) -> [f64; 4] {
        let half = |x: &DensityOperator, y: &DensityOperator| (x.matrix() + y.matrix()) * real(0.5);
        [
            max_abs_diff(
                &half(&self.rho_a, &self.rho_a_perp),
                &half(&self.rho_b, &self.rho_b_perp),
            ),
            max_abs_diff(
                &half(&self.rho_alpha, &self.rho_alpha_perp),
                &half(&self.rho_aa, &self.rho_aa_perp),
            ),
            max_abs_diff(
                &half(&self.rho_beta, &self.rho_beta_perp),
                &half(&self.rho_bb, &self.rho_bb_perp),
            ),
            max_abs_diff(
                &half(&self.rho_aa, &self.rho_aa_perp_prime),
                &half(&self.rho_bb, &self.rho_bb_perp_prime),
            ),
        ]
    }

    pub fn preparations(&self) -> [(&'static str, &DensityOperator); 14] {
        [
            ("a", &self.rho_a),
            ("b", &self.rho_b),
            ("a_perp", &self.rho_a_perp),
            ("b_perp", &self.rho_b_perp),
            ("alpha", &self.rho_alpha),
            ("beta", &self.rho_beta),
            ("alpha_perp", &self.rho_alpha_perp),
            ("beta_perp", &self.rho_beta_perp),
            ("aa", &self.rho_aa),
            ("bb", &self.rho_bb),
            ("aa_perp", &self.rho_aa_perp),
            ("bb_perp", &self.rho_bb_perp),
            ("aa_perp_prime", &self.rho_aa_perp_prime),
            ("bb_perp_prime", &self.rho_bb_perp_prime),
        ]
    }

    /// `(p(M_s|P_s), p(M_s|P_s⊥))` for `s = a, b, alpha, beta, aa, bb`.
    pub fn o1_statistics(&self) -> Result<[(&'static str, f64, f64); 6]> {
        let stat = |rho: &DensityOperator, perp: &DensityOperator, m: &TwoOutcomeMeasurement| {
            Ok::<_, Error>((born(rho, m)?, born(perp, m)?))
        };
        let rows = [
            ("a", stat(&self.rho_a, &self.rho_a_perp, &self.m_a)?),
            ("b", stat(&self.rho_b, &self.rho_b_perp, &self.m_b)?),
            (
                "alpha",
                stat(&self.rho_alpha, &self.rho_alpha_perp, &self.m_alpha)?,
            ),
            (
                "beta",
                stat(&self.rho_beta, &self.rho_beta_perp, &self.m_beta)?,
            ),
            ("aa", stat(&self.rho_aa, &self.rho_aa_perp, &self.m_aa)?),
            ("bb", stat(&self.rho_bb, &self.rho_bb_perp, &self.m_bb)?),
        ];
        Ok(rows.map(|(s, (pass, leak))| (s, pass, leak)))
    }
}

/// Two applications of the depolarizing channel to a pure two-qubit state.
///
/// The noisy cloner output `N_v∘U(N_v(|x0><x0|))` takes the same form
/// because `U` fixes the identity.
fn doubly_depolarized(psi: &PureState, v: NoiseLevel) -> Result<DensityOperator> {
    let once = depolarize(&DensityOperator::from_pure(psi), v)?;
    depolarize(&once, v)
}

/// Qubit marginal `Tr₂[N_v(|x0><x0|)]`.
fn input_preparation(x: &PureState, v: NoiseLevel) -> Result<DensityOperator> {
    let ancilla = PureState::from_real(&[1.0, 0.0])?;
    depolarize(&DensityOperator::from_pure(&x.tensor(&ancilla)), v)?.partial_trace_second()
}

pub fn noisy_ensemble(v: NoiseLevel, c_ab: f64) -> Result<NoisyEnsemble> {
    let c = check_unit("c_ab", c_ab)?;
    let (a, b) = make_input_pair(c)?;
    let (alpha, beta) = symmetric_clones(c)?;
    let aa = a.tensor(&a);
    let bb = b.tensor(&b);

    let mut degenerate = false;
    let mut warnings = Vec::new();
    let mut perp = |x: &PureState, y: &PureState, label: &str| -> Result<PureState> {
        let (p, collapsed) = orthogonal_in_span(x, y)?;
        if collapsed {
            degenerate = true;
            warnings.push(format!(
                "span for {label} collapsed; complement taken in the ambient space"
            ));
        }
        Ok(p)
    };
    let a_perp = perp(&a, &b, "a_perp")?;
    let b_perp = perp(&b, &a, "b_perp")?;
    let alpha_perp = perp(&alpha, &aa, "alpha_perp")?;
    let aa_perp = perp(&aa, &alpha, "aa_perp")?;
    let beta_perp = perp(&beta, &bb, "beta_perp")?;
    let bb_perp = perp(&bb, &beta, "bb_perp")?;
    let aa_perp_prime = perp(&aa, &bb, "aa_perp_prime")?;
    let bb_perp_prime = perp(&bb, &aa, "bb_perp_prime")?;

    let max_im = [&a, &b, &alpha, &beta, &aa, &bb]
        .iter()
        .map(|s| s.max_imaginary())
        .fold(0.0, f64::max);
    if max_im > STATE_TOL {
        return Err(Error::Invariant(format!(
            "states expected real, imaginary part {max_im:e}"
        )));
    }

    Ok(NoisyEnsemble {
        v: v.value(),
        c_ab: c,
        rho_a: input_preparation(&a, v)?,
        rho_b: input_preparation(&b, v)?,
        rho_a_perp: input_preparation(&a_perp, v)?,
        rho_b_perp: input_preparation(&b_perp, v)?,
        rho_alpha: doubly_depolarized(&alpha, v)?,
        rho_beta: doubly_depolarized(&beta, v)?,
        rho_alpha_perp: doubly_depolarized(&alpha_perp, v)?,
        rho_beta_perp: doubly_depolarized(&beta_perp, v)?,
        rho_aa: doubly_depolarized(&aa, v)?,
        rho_bb: doubly_depolarized(&bb, v)?,
        rho_aa_perp: doubly_depolarized(&aa_perp, v)?,
        rho_bb_perp: doubly_depolarized(&bb_perp, v)?,
        rho_aa_perp_prime: doubly_depolarized(&aa_perp_prime, v)?,
        rho_bb_perp_prime: doubly_depolarized(&bb_perp_prime, v)?,
        m_a: TwoOutcomeMeasurement::depolarized(&a, v),
        m_b: TwoOutcomeMeasurement::depolarized(&b, v),
        m_alpha: TwoOutcomeMeasurement::depolarized(&alpha, v),
        m_beta: TwoOutcomeMeasurement::depolarized(&beta, v),
        m_aa: TwoOutcomeMeasurement::depolarized(&aa, v),
        m_bb: TwoOutcomeMeasurement::depolarized(&bb, v),
        degenerate,
        warnings,
    })
}

/// Output of the clone optimizer.
#[derive(Debug, Clone)]
pub struct CloneSolution {
    pub alpha: PureState,
    pub beta: PureState,
    pub fidelity: f64,
    /// `<alpha|beta>`, which must equal `sqrt(c_ab)`.
    pub overlap: f64,
    /// Objective spread over the final simplex.
    pub residual: f64,
}

const CLONE_GRID: usize = 100;

/// Maximizes `½|<aa|alpha>|² + ½|<bb|beta>|²` over real unit vectors in
/// `span{|aa>, |bb>, e}` (with `e` orthogonal to both) subject to
/// `<alpha|beta> = <a|b>`.
///
/// `alpha` is parametrized by two spherical angles. For fixed `alpha` the
/// best `beta` is `s alpha + sqrt(1-s²) w` with `w` the normalized component
/// of `±|bb>` orthogonal to `alpha`, so the constraint never enters the
/// search. A 100×100 angle grid seeds a Nelder–Mead refinement.
pub fn construct_optimal_clones(c_ab: f64) -> Result<CloneSolution> {
    let c = check_unit("c_ab", c_ab)?;
    let (a, b) = make_input_pair(c)?;
    let aa = a.tensor(&a);
    let bb = b.tensor(&b);
    if c == 0.0 || c == 1.0 {
        let overlap = aa.inner(&bb).re;
        return Ok(CloneSolution {
            alpha: aa,
            beta: bb,
            fidelity: 1.0,
            overlap,
            residual: 0.0,
        });
    }
    let s = c.sqrt();
    let r = (1.0 - s * s).max(0.0).sqrt();

    // Orthonormal frame {e1, e2, e3} of the search subspace.
    let e1 = aa.amplitudes().map(|z| z.re);
    let bb_re = bb.amplitudes().map(|z| z.re);
    let e2 = {
        let w = &bb_re - &e1 * e1.dot(&bb_re);
        &w / w.norm()
    };
    let e3 = (0..4)
        .map(|k| {
            let mut e = DVector::<f64>::zeros(4);
            e[k] = 1.0;
            let w = &e - &e1 * e1[k] - &e2 * e2[k];
            (w.norm(), w)
        })
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(n, w)| w / n)
        .expect("four candidates");
    let frame = [e1, e2, e3];
    let aa3 = nalgebra::Vector3::new(1.0, 0.0, 0.0);
    let bb3 = nalgebra::Vector3::new(
        frame[0].dot(&bb_re),
        frame[1].dot(&bb_re),
        frame[2].dot(&bb_re),
    );

    let alpha_at = |angles: &[f64; 2]| {
        let (st, ct) = angles[0].sin_cos();
        let (sp, cp) = angles[1].sin_cos();
        nalgebra::Vector3::new(st * cp, st * sp, ct)
    };
    let beta_for = |alpha: &nalgebra::Vector3<f64>| {
        let p = bb3.dot(alpha);
        let w = bb3 - alpha * p;
        let w_norm = w.norm();
        let w = if w_norm > 1e-14 {
            w / w_norm
        } else {
            // bb ∥ alpha: any unit vector orthogonal to alpha
            let trial = if alpha.x.abs() < 0.9 {
                nalgebra::Vector3::x()
            } else {
                nalgebra::Vector3::y()
            };
            let u = trial - alpha * alpha.dot(&trial);
            u / u.norm()
        };
        let sign = if p >= 0.0 { 1.0 } else { -1.0 };
        alpha * s + w * (sign * r)
    };
    let objective = |angles: &[f64; 2]| {
        let alpha = alpha_at(angles);
        let beta = beta_for(&alpha);
        0.5 * aa3.dot(&alpha).powi(2) + 0.5 * bb3.dot(&beta).powi(2)
    };

    let mut seed = [0.0, 0.0];
    let mut seed_val = f64::NEG_INFINITY;
    for i in 0..CLONE_GRID {
        let theta = (i as f64 + 0.5) * std::f64::consts::PI / CLONE_GRID as f64;
        for j in 0..CLONE_GRID {
            let phi = j as f64 * std::f64::consts::TAU / CLONE_GRID as f64;
            let val = objective(&[theta, phi]);
            if val > seed_val {
                seed_val = val;
                seed = [theta, phi];
            }
        }
    }

    let min = nelder_mead(|x| -objective(x), seed, 0.02, 1e-16, 1e-9, 20_000);
    if !min.converged {
        return Err(Error::NonConvergence {
            residual: min.spread,
        });
    }

    let lift = |v: &nalgebra::Vector3<f64>| {
        let w = &frame[0] * v.x + &frame[1] * v.y + &frame[2] * v.z;
        PureState::normalized(w.map(real))
    };
    let alpha3 = alpha_at(&min.x);
    let alpha = lift(&alpha3)?;
    let beta = lift(&beta_for(&alpha3))?;
    let fidelity = 0.5 * aa.overlap(&alpha) + 0.5 * bb.overlap(&beta);
    if (fidelity + min.value).abs() > 1e-10 {
        return Err(Error::Invariant(format!(
            "lifted clones give {fidelity}, search frame gave {}",
            -min.value
        )));
    }
    let overlap = alpha.inner(&beta).re;
    Ok(CloneSolution {
        alpha,
        beta,
        fidelity,
        overlap,
        residual: min.spread,
    })
}

/// Everything an experimenter would tabulate from the noisy run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub overlaps: OverlapParams,
    pub budget: ErrorBudget,
    pub f_global: f64,
    /// Largest entrywise residual over the four operational equivalences.
    pub o2_residual: f64,
}

/// Runs the depolarized experiment through the Born rule.
///
/// Each `eps_s` is the smallest value consistent with the observed O1
/// statistics, `max(1 - p(M_s|P_s), p(M_s|P_s⊥))`.
pub fn simulate_confusabilities(v: NoiseLevel, c_ab: f64) -> Result<ExperimentRecord> {
    let ens = noisy_ensemble(v, c_ab)?;
    let overlaps = OverlapParams::new(
        born(&ens.rho_a, &ens.m_b)?,
        born(&ens.rho_b, &ens.m_a)?,
        born(&ens.rho_aa, &ens.m_bb)?,
        born(&ens.rho_bb, &ens.m_aa)?,
    )?;
    let o1 = ens.o1_statistics()?;
    let eps: Vec<f64> = o1
        .iter()
        .map(|&(_, pass, leak)| (1.0 - pass).max(leak).clamp(0.0, 1.0))
        .collect();
    let budget = ErrorBudget::new(eps[0], eps[1], eps[2], eps[3], eps[4], eps[5])?;
    let f_global = 0.5 * born(&ens.rho_alpha, &ens.m_aa)? + 0.5 * born(&ens.rho_beta, &ens.m_bb)?;
    let o2_residual = ens.equivalence_residuals().into_iter().fold(0.0, f64::max);
    Ok(ExperimentRecord {
        overlaps,
        budget,
        f_global,
        o2_residual,
    })
}
