//! Closed-form fidelities and noncontextual bounds.
//!
//! Everything here is a pure scalar function of the observed confusabilities
//! and the error budget. Inputs outside `[0, 1]` are rejected with
//! [`Error::Domain`].

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Result};

/// Observed confusabilities feeding the noncontextual bounds.
///
/// `c_ab = p(M_b | P_a)`, `c_ba = p(M_a | P_b)`, `c_aabb = p(M_bb | P_aa)` and
/// `c_bbaa = p(M_aa | P_bb)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapParams {
    pub c_ab: f64,
    pub c_ba: f64,
    pub c_aabb: f64,
    pub c_bbaa: f64,
}

impl OverlapParams {
    pub fn new(c_ab: f64, c_ba: f64, c_aabb: f64, c_bbaa: f64) -> Result<Self> {
        Ok(Self {
            c_ab: check_unit("c_ab", c_ab)?,
            c_ba: check_unit("c_ba", c_ba)?,
            c_aabb: check_unit("c_aabb", c_aabb)?,
            c_bbaa: check_unit("c_bbaa", c_bbaa)?,
        })
    }

    /// Overlaps of an ideal pure-state experiment: `c_ab = c_ba = c` and
    /// `c_aabb = c_bbaa = c²`.
    pub fn symmetric(c: f64) -> Result<Self> {
        let c = check_unit("c_ab", c)?;
        Ok(Self {
            c_ab: c,
            c_ba: c,
            c_aabb: c * c,
            c_bbaa: c * c,
        })
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.c_ab, self.c_ba, self.c_aabb, self.c_bbaa).map(|_| ())
    }
}

/// The six O1ni error parameters `p(M_s|P_s) >= 1 - eps_s`, `p(M_s|P_s⊥) <= eps_s`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub eps_a: f64,
    pub eps_b: f64,
    pub eps_alpha: f64,
    pub eps_beta: f64,
    pub eps_aa: f64,
    pub eps_bb: f64,
}

impl ErrorBudget {
    pub fn new(
        eps_a: f64,
        eps_b: f64,
        eps_alpha: f64,
        eps_beta: f64,
        eps_aa: f64,
        eps_bb: f64,
    ) -> Result<Self> {
        Ok(Self {
            eps_a: check_unit("eps_a", eps_a)?,
            eps_b: check_unit("eps_b", eps_b)?,
            eps_alpha: check_unit("eps_alpha", eps_alpha)?,
            eps_beta: check_unit("eps_beta", eps_beta)?,
            eps_aa: check_unit("eps_aa", eps_aa)?,
            eps_bb: check_unit("eps_bb", eps_bb)?,
        })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Every parameter set to the same `eps`.
    pub fn uniform(eps: f64) -> Result<Self> {
        Self::new(eps, eps, eps, eps, eps, eps)
    }

    fn validate(&self) -> Result<()> {
        Self::new(
            self.eps_a,
            self.eps_b,
            self.eps_alpha,
            self.eps_beta,
            self.eps_aa,
            self.eps_bb,
        )
        .map(|_| ())
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.eps_a,
            self.eps_b,
            self.eps_alpha,
            self.eps_beta,
            self.eps_aa,
            self.eps_bb,
        ]
    }
}

/// A bound as computed, never truncated. `clamped` is set when the raw value
/// exceeds 1 and the bound is therefore vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub clamped: bool,
}

impl BoundValue {
    fn raw(value: f64) -> Self {
        debug_assert!(value.is_finite());
        Self {
            value,
            clamped: value > 1.0,
        }
    }

    /// The bound capped at 1.
    pub fn effective(&self) -> f64 {
        self.value.min(1.0)
    }
}

/// Optimal global fidelity of state-dependent cloning of two pure states with
/// confusability `c_ab = |<a|b>|²`.
pub fn quantum_optimal_fidelity(c_ab: f64) -> Result<f64> {
    let c = check_unit("c_ab", c_ab)?;
    let s = c.sqrt();
    let root = ((1.0 + c) * (1.0 + s)).sqrt() + ((1.0 - c) * (1.0 - s)).sqrt();
    Ok(0.25 * root * root)
}

/// Largest global fidelity any noncontextual model can reach under perfect
/// O1 correlations: `1 - c_ab/2 + c_aabb/2`.
pub fn nc_bound_ideal(c_ab: f64, c_aabb: f64) -> Result<f64> {
    let c_ab = check_unit("c_ab", c_ab)?;
    let c_aabb = check_unit("c_aabb", c_aabb)?;
    Ok(1.0 - 0.5 * c_ab + 0.5 * c_aabb)
}

/// The additive error term of the noise-robust bound,
/// `(eps_b + 2 eps_bb + eps_aa) / 2`.
pub fn err_thm2(eb: &ErrorBudget) -> f64 {
    0.5 * (eb.eps_b + 2.0 * eb.eps_bb + eb.eps_aa)
}

/// Noise-robust noncontextual bound `1 - c_ab/2 + c_aabb/2 + Err`.
pub fn nc_bound_noisy(ov: &OverlapParams, eb: &ErrorBudget) -> Result<BoundValue> {
    ov.validate()?;
    eb.validate()?;
    Ok(BoundValue::raw(
        1.0 - 0.5 * ov.c_ab + 0.5 * ov.c_aabb + err_thm2(eb),
    ))
}

/// The tighter bound that uses both orderings of every confusability.
/// Never exceeds [`nc_bound_noisy`] on the same input.
pub fn nc_bound_noisy_symmetric(ov: &OverlapParams, eb: &ErrorBudget) -> Result<BoundValue> {
    ov.validate()?;
    eb.validate()?;
    let input_term = (eb.eps_b - ov.c_ab).min(eb.eps_a - ov.c_ba);
    let target_term = (ov.c_aabb + eb.eps_bb).min(ov.c_bbaa + eb.eps_aa);
    Ok(BoundValue::raw(
        1.0 + 0.5 * input_term + 0.5 * target_term + 0.5 * (eb.eps_aa + eb.eps_bb),
    ))
}

/// Noncontextual bound on the probability of discriminating `P_a` from `P_b`.
pub fn nc_discrimination_bound(c_ab: f64, eps_b: f64) -> Result<f64> {
    let c_ab = check_unit("c_ab", c_ab)?;
    let eps_b = check_unit("eps_b", eps_b)?;
    Ok(1.0 - 0.5 * (c_ab - eps_b))
}

/// Error budget of the depolarizing experiment at noise level `v`.
///
/// Input preparations see one qubit-marginal depolarization, so
/// `eps_a = eps_b = v - v²/2`. Outputs and target copies carry `(1-v)²` pure
/// weight against a `(1-v)` measurement, giving
/// `eps_alpha = eps_beta = eps_aa = eps_bb = (3/4) v (3 - 3v + v²)`.
pub fn depolarizing_epsilons(v: f64) -> Result<ErrorBudget> {
    let v = check_unit("v", v)?;
    let input = v - 0.5 * v * v;
    let output = 0.75 * v * (3.0 - 3.0 * v + v * v);
    Ok(ErrorBudget {
        eps_a: input,
        eps_b: input,
        eps_alpha: output,
        eps_beta: output,
        eps_aa: output,
        eps_bb: output,
    })
}

/// Variants of the additive error term for depolarizing noise.
///
/// They do not agree with each other; all of them are reported and the
/// caller picks one explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrTerms {
    /// `(eps_b + 2 eps_bb + eps_aa)/2` with the depolarizing epsilons.
    pub err_thm2: f64,
    /// `(1/2) v (31 - 29v + 9v²)`.
    pub err_appendix: f64,
    /// `(1/8) v (31 - 21v + 9v²)`.
    pub err_prime: f64,
    /// `v (31 - 21v + 9v²) / 16`, the symmetric `eps` with `Err = 2 eps`.
    pub eps_effective: f64,
}

pub fn err_terms(v: f64) -> Result<ErrTerms> {
    let eb = depolarizing_epsilons(v)?;
    let poly_21 = 31.0 - 21.0 * v + 9.0 * v * v;
    Ok(ErrTerms {
        err_thm2: err_thm2(&eb),
        err_appendix: 0.5 * v * (31.0 - 29.0 * v + 9.0 * v * v),
        err_prime: v * poly_21 / 8.0,
        eps_effective: v * poly_21 / 16.0,
    })
}

/// Global fidelity of the noiseless-optimal cloner when preparations,
/// transformation and measurements are all depolarized at level `v`.
pub fn quantum_noisy_fidelity(v: f64, c_ab: f64) -> Result<f64> {
    let v = check_unit("v", v)?;
    let f_opt = quantum_optimal_fidelity(c_ab)?;
    let keep = 1.0 - v;
    Ok(keep * keep * keep * f_opt + 0.25 * v * (3.0 - 3.0 * v + v * v))
}

/// Confusabilities an experimenter would observe in the depolarizing
/// experiment with ideal overlap `c_ab`:
/// `c_ab^obs = (1-v)² c + v(1-v) + v²/2` and
/// `c_aabb^obs = (1-v)³ c² + v(3 - 3v + v²)/4`. Both orderings coincide.
pub fn depolarized_overlaps(v: f64, c_ab: f64) -> Result<OverlapParams> {
    let v = check_unit("v", v)?;
    let c = check_unit("c_ab", c_ab)?;
    let keep = 1.0 - v;
    let input = keep * keep * c + v * keep + 0.5 * v * v;
    let target = keep * keep * keep * c * c + 0.25 * v * (3.0 - 3.0 * v + v * v);
    Ok(OverlapParams {
        c_ab: input,
        c_ba: input,
        c_aabb: target,
        c_bbaa: target,
    })
}

#[cfg(test)]
#[allow(clippy::approx_constant, clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    // 50-digit evaluations of the optimal fidelity formula (mpmath, dps=50).
    const F_OPT_GOLDEN: [(f64, f64); 6] = [
        (0.05, 0.992_320_331_326_830_397_444_0),
        (0.1, 0.987_775_369_977_410_092_806_1),
        (0.25, 0.981_762_745_781_210_568_076_7),
        (0.5, 0.982_962_913_144_534_143_374_9),
        (0.75, 0.990_118_983_360_701_404_442_7),
        (0.9, 0.995_827_727_883_182_318_659_6),
    ];

    #[test]
    fn optimal_fidelity_golden() {
        for (c, want) in F_OPT_GOLDEN {
            let got = quantum_optimal_fidelity(c).unwrap();
            assert!((got - want).abs() < 1e-14, "c={c}: {got} vs {want}");
        }
    }

    #[test]
    fn optimal_fidelity_endpoints() {
        assert_eq!(quantum_optimal_fidelity(0.0).unwrap(), 1.0);
        assert_eq!(quantum_optimal_fidelity(1.0).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            quantum_optimal_fidelity(1.5),
            Err(Error::Domain { name: "c_ab", .. })
        ));
        assert!(quantum_optimal_fidelity(-0.1).is_err());
        assert!(quantum_optimal_fidelity(f64::NAN).is_err());
        assert!(nc_bound_ideal(0.5, 1.01).is_err());
        assert!(depolarizing_epsilons(-1e-3).is_err());
        assert!(OverlapParams::new(0.1, 0.2, 0.3, 2.0).is_err());
        assert!(ErrorBudget::uniform(1.2).is_err());
    }

    #[test]
    fn ideal_bound_values() {
        assert_eq!(nc_bound_ideal(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(nc_bound_ideal(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(nc_bound_ideal(0.5, 0.25).unwrap(), 0.875);
    }

    #[test]
    fn noisy_bound_reduces_and_adds_two_eps() {
        for c in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let ov = OverlapParams::symmetric(c).unwrap();
            let b = nc_bound_noisy(&ov, &ErrorBudget::zero()).unwrap();
            assert_eq!(b.value, nc_bound_ideal(c, c * c).unwrap());
            assert!(!b.clamped);
        }
        let ov = OverlapParams::symmetric(0.5).unwrap();
        let b = nc_bound_noisy(&ov, &ErrorBudget::uniform(0.01).unwrap()).unwrap();
        assert!((b.value - 0.895).abs() < 1e-15);
    }

    #[test]
    fn noisy_bound_near_interval_edge() {
        let v = 0.015;
        let ov = OverlapParams::symmetric(0.318).unwrap();
        let b = nc_bound_noisy(&ov, &depolarizing_epsilons(v).unwrap()).unwrap();
        let q = quantum_noisy_fidelity(v, 0.318).unwrap();
        assert!((b.value - q).abs() < 0.05);
    }

    #[test]
    fn clamped_flag_for_large_budget() {
        let ov = OverlapParams::symmetric(0.1).unwrap();
        let b = nc_bound_noisy(&ov, &ErrorBudget::uniform(0.5).unwrap()).unwrap();
        assert!(b.clamped);
        assert!(b.value > 1.0);
        assert_eq!(b.effective(), 1.0);
    }

    #[test]
    fn symmetric_bound_example_and_branches() {
        let ov = OverlapParams::new(0.4, 0.5, 0.16, 0.25).unwrap();
        let eb = ErrorBudget::uniform(0.02).unwrap();
        let b = nc_bound_noisy_symmetric(&ov, &eb).unwrap();
        assert!((b.value - 0.87).abs() < 1e-15);

        // Exhaust all four combinations of min branches against a direct
        // case split.
        for (c_ab, c_ba, c_aabb, c_bbaa) in [
            (0.4, 0.5, 0.16, 0.25),
            (0.5, 0.4, 0.16, 0.25),
            (0.4, 0.5, 0.25, 0.16),
            (0.5, 0.4, 0.25, 0.16),
        ] {
            let ov = OverlapParams::new(c_ab, c_ba, c_aabb, c_bbaa).unwrap();
            let e = 0.02;
            let first = if e - c_ab <= e - c_ba {
                e - c_ab
            } else {
                e - c_ba
            };
            let second = if c_aabb + e <= c_bbaa + e {
                c_aabb + e
            } else {
                c_bbaa + e
            };
            let want = 1.0 + first / 2.0 + second / 2.0 + e;
            let got = nc_bound_noisy_symmetric(&ov, &eb).unwrap().value;
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_bound_zero_budget() {
        let ov = OverlapParams::symmetric(0.3).unwrap();
        let b = nc_bound_noisy_symmetric(&ov, &ErrorBudget::zero()).unwrap();
        assert!((b.value - nc_bound_ideal(0.3, 0.09).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn discrimination_bound() {
        assert_eq!(nc_discrimination_bound(1.0, 0.0).unwrap(), 0.5);
        assert_eq!(nc_discrimination_bound(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(nc_discrimination_bound(0.5, 0.0).unwrap(), 0.75);
    }

    #[test]
    fn depolarizing_epsilon_values() {
        let zero = depolarizing_epsilons(0.0).unwrap();
        assert_eq!(zero.as_array(), [0.0; 6]);
        let eb = depolarizing_epsilons(0.015).unwrap();
        assert!((eb.eps_a - 0.0148875).abs() < 1e-15);
        assert!((eb.eps_aa - 0.03324628125).abs() < 1e-15);
        assert_eq!(eb.eps_b, eb.eps_a);
        assert_eq!(eb.eps_alpha, eb.eps_aa);
        // Values quoted to four decimals.
        assert!(((1.0 - eb.eps_a) - 0.9851).abs() < 1e-4);
        assert!(((1.0 - eb.eps_aa) - 0.9667).abs() < 1e-4);
    }

    #[test]
    fn err_term_values() {
        let zero = err_terms(0.0).unwrap();
        assert_eq!(
            [
                zero.err_thm2,
                zero.err_appendix,
                zero.err_prime,
                zero.eps_effective
            ],
            [0.0; 4]
        );
        let t = err_terms(0.015).unwrap();
        assert!((t.err_thm2 - 0.057313171875).abs() < 1e-15);
        assert!((t.err_prime - 0.057538171875).abs() < 1e-15);
        assert!((t.err_appendix - 0.2292526875).abs() < 1e-15);
        assert_eq!(t.err_prime, 2.0 * t.eps_effective);
        // The readings disagree; the gap is what gets documented.
        assert!((t.err_prime - t.err_thm2).abs() > 1e-4);
    }

    #[test]
    fn noisy_quantum_fidelity() {
        for c in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(
                quantum_noisy_fidelity(0.0, c).unwrap(),
                quantum_optimal_fidelity(c).unwrap()
            );
            assert!((quantum_noisy_fidelity(1.0, c).unwrap() - 0.25).abs() < 1e-15);
        }
        // 50-digit evaluations.
        for (v, c, want) in [
            (0.015, 0.5, 0.950_471_858_269_570_804_667_0),
            (0.1, 0.25, 0.783_455_041_674_502_504_127_9),
            (0.3, 0.75, 0.503_860_811_292_720_581_723_9),
        ] {
            let got = quantum_noisy_fidelity(v, c).unwrap();
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn depolarized_overlaps_noiseless() {
        let ov = depolarized_overlaps(0.0, 0.37).unwrap();
        assert_eq!(ov, OverlapParams::symmetric(0.37).unwrap());
    }

    #[test]
    fn quantum_beats_ideal_bound_on_grid() {
        for i in 1..1000 {
            let c = i as f64 / 1000.0;
            let q = quantum_optimal_fidelity(c).unwrap();
            let nc = nc_bound_ideal(c, c * c).unwrap();
            assert!(q > nc, "c={c}");
        }
    }

    fn unit() -> impl Strategy<Value = f64> {
        0.0..=1.0f64
    }

    proptest! {
        #[test]
        fn symmetric_never_exceeds_thm2(
            c in prop::array::uniform4(unit()),
            e in prop::array::uniform6(unit()),
        ) {
            let ov = OverlapParams::new(c[0], c[1], c[2], c[3]).unwrap();
            let eb = ErrorBudget::new(e[0], e[1], e[2], e[3], e[4], e[5]).unwrap();
            let sym = nc_bound_noisy_symmetric(&ov, &eb).unwrap().value;
            let thm2 = nc_bound_noisy(&ov, &eb).unwrap().value;
            prop_assert!(sym <= thm2 + 1e-15);
        }

        #[test]
        fn epsilons_monotone(v1 in unit(), v2 in unit()) {
            let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
            let a = depolarizing_epsilons(lo).unwrap().as_array();
            let b = depolarizing_epsilons(hi).unwrap().as_array();
            for (x, y) in a.iter().zip(b.iter()) {
                prop_assert!(x <= y);
            }
        }

        #[test]
        fn optimal_fidelity_range(c in unit()) {
            let f = quantum_optimal_fidelity(c).unwrap();
            prop_assert!((0.5..=1.0 + 1e-15).contains(&f));
        }

        #[test]
        fn optimal_fidelity_continuous(c in 0.0..0.999f64) {
            let d = 1e-9;
            let f0 = quantum_optimal_fidelity(c).unwrap();
            let f1 = quantum_optimal_fidelity(c + d).unwrap();
            // sqrt(c) makes the slope unbounded at 0; 1e-4 covers it.
            prop_assert!((f1 - f0).abs() < 1e-4);
        }
    }
}
