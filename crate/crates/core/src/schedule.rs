//! Exact-rational parameter schedule for the phased construction: stage
//! boundaries, radius/distance/degree sequences, the rescaled internal ε and
//! the additive term β. No floating point enters any threshold.

use num::bigint::BigInt;
use num::{BigRational, One, Zero};
use serde_json::json;
use thiserror::Error;

use crate::rational::{ceil_pow, ceil_to_u64, floor_log2, rat_u64, RationalRepr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonMode {
    /// The epsilon argument is the user-facing ε′; the internal ε is rescaled
    /// so that stretch (1+ε′)d + β is guaranteed.
    Guaranteed,
    /// The epsilon argument is used directly as the internal ε. Structural
    /// invariants hold for any ε ∈ (0,1); the stretch bound is only
    /// guaranteed when ε ≤ 1/10 and ρ ≥ 10ε.
    Exploratory,
}

#[derive(Debug, Clone)]
pub struct ScheduleParams {
    pub n: u64,
    pub kappa: u64,
    pub c: u64,
    pub mode: EpsilonMode,
    pub eps_arg: BigRational,
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Debug, Clone)]
pub struct PhaseSchedule {
    pub n: u64,
    pub kappa: u64,
    /// ρ = 1/c for integer c.
    pub rho: BigRational,
    pub c: u64,
    /// User-facing ε′ (equals the internal ε in exploratory mode).
    pub eps_user: BigRational,
    /// Internal ε driving every per-phase quantity.
    pub eps_internal: BigRational,
    pub ell: u64,
    pub i0: u64,
    pub i1: u64,
    /// R_0..R_ell.
    pub r: Vec<BigRational>,
    /// delta_0..delta_ell.
    pub delta: Vec<BigRational>,
    /// deg_0..deg_ell.
    pub deg: Vec<u64>,
    /// Additive stretch term β = ε^{-ell}.
    pub beta: BigRational,
    pub mode: EpsilonMode,
    /// Whether the (1+ε′)d + β stretch bound is actually guaranteed for this
    /// parameter point (always true in guaranteed mode).
    pub stretch_bound_holds: bool,
}

impl PhaseSchedule {
    /// ε^{-i}, exact.
    pub fn eps_pow_neg(&self, i: u64) -> BigRational {
        let mut v = BigRational::one();
        let inv = self.eps_internal.recip();
        for _ in 0..i {
            v *= &inv;
        }
        v
    }

    /// Ruling-set separation parameter q_i = ceil(2 * delta_i).
    pub fn q(&self, i: usize) -> u64 {
        ceil_to_u64(&(rat_u64(2, 1) * &self.delta[i]))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "kappa": self.kappa,
            "c": self.c,
            "rho": RationalRepr::of(&self.rho),
            "epsUser": RationalRepr::of(&self.eps_user),
            "epsInternal": RationalRepr::of(&self.eps_internal),
            "ell": self.ell,
            "i0": self.i0,
            "i1": self.i1,
            "R": self.r.iter().map(RationalRepr::of).collect::<Vec<_>>(),
            "delta": self.delta.iter().map(RationalRepr::of).collect::<Vec<_>>(),
            "deg": self.deg,
            "beta": RationalRepr::of(&self.beta),
            "mode": match self.mode {
                EpsilonMode::Guaranteed => "guaranteed",
                EpsilonMode::Exploratory => "exploratory",
            },
            "stretchBoundHolds": self.stretch_bound_holds,
        })
    }
}

pub fn build_schedule(params: &ScheduleParams) -> Result<PhaseSchedule, ScheduleError> {
    let ScheduleParams {
        n,
        kappa,
        c,
        mode,
        ref eps_arg,
    } = *params;
    let cfg = |msg: String| ScheduleError::Config(msg);
    if n < 2 {
        return Err(cfg(format!("n must be >= 2, got {n}")));
    }
    if kappa < 3 {
        return Err(cfg(format!("kappa must be >= 3, got {kappa}")));
    }
    if c < 3 {
        return Err(cfg(format!("c must be >= 3, got {c}")));
    }
    if c > kappa {
        return Err(cfg(format!(
            "need 1/kappa <= 1/c, i.e. c <= kappa; got c = {c} > kappa = {kappa}"
        )));
    }
    let rho = rat_u64(1, c);
    let kappa_rho = rat_u64(kappa, c);
    if kappa_rho < BigRational::one() {
        return Err(cfg(format!(
            "kappa * rho = {kappa}/{c} < 1 is outside the supported range"
        )));
    }
    let i0 = floor_log2(&kappa_rho);
    // ceil((kappa + 1) / (kappa * rho)) = ceil(c * (kappa + 1) / kappa)
    let tail = ceil_to_u64(&rat_u64(c * (kappa + 1), kappa));
    let ell = i0 + tail - 1;
    assert!(ell >= 1, "ell >= 1 for all accepted parameters");
    let i1 = ell - 1;

    let eps_user;
    let eps_internal;
    match mode {
        EpsilonMode::Guaranteed => {
            if !(eps_arg > &BigRational::zero() && eps_arg <= &BigRational::one()) {
                return Err(cfg(format!(
                    "guaranteed mode needs eps' in (0, 1], got {eps_arg}"
                )));
            }
            eps_user = eps_arg.clone();
            eps_internal = eps_arg * &rho / BigRational::from(BigInt::from(30 * ell));
        }
        EpsilonMode::Exploratory => {
            if !(eps_arg > &BigRational::zero() && eps_arg < &BigRational::one()) {
                return Err(cfg(format!(
                    "exploratory mode needs eps in (0, 1), got {eps_arg}"
                )));
            }
            eps_user = eps_arg.clone();
            eps_internal = eps_arg.clone();
        }
    }

    let two_over_rho = rat_u64(2 * c, 1);
    let five_over_rho = rat_u64(5 * c, 1);
    let eps_inv = eps_internal.recip();

    let mut r = Vec::with_capacity(ell as usize + 1);
    let mut delta = Vec::with_capacity(ell as usize + 1);
    r.push(BigRational::zero());
    let mut eps_pow = BigRational::one(); // eps^{-i}
    delta.push(&eps_pow + rat_u64(2, 1) * &r[0]);
    for i in 0..ell as usize {
        let next = &two_over_rho * &eps_pow + &five_over_rho * &r[i];
        r.push(next);
        eps_pow *= &eps_inv;
        let d = &eps_pow + rat_u64(2, 1) * &r[i + 1];
        delta.push(d);
    }

    let deg_cap = ceil_pow(n, 1, c);
    let deg: Vec<u64> = (0..=ell)
        .map(|i| {
            if i <= i0 {
                ceil_pow(n, 1u64 << i, kappa)
            } else {
                deg_cap
            }
        })
        .collect();

    let beta = {
        let mut b = BigRational::one();
        for _ in 0..ell {
            b *= &eps_inv;
        }
        b
    };

    let stretch_bound_holds = match mode {
        EpsilonMode::Guaranteed => true,
        EpsilonMode::Exploratory => {
            eps_internal <= rat_u64(1, 10) && rho >= rat_u64(10, 1) * &eps_internal
        }
    };

    Ok(PhaseSchedule {
        n,
        kappa,
        rho,
        c,
        eps_user,
        eps_internal,
        ell,
        i0,
        i1,
        r,
        delta,
        deg,
        beta,
        mode,
        stretch_bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_u64;
    use proptest::prelude::*;

    fn exploratory(n: u64, kappa: u64, c: u64, p: u64, q: u64) -> PhaseSchedule {
        build_schedule(&ScheduleParams {
            n,
            kappa,
            c,
            mode: EpsilonMode::Exploratory,
            eps_arg: rat_u64(p, q),
        })
        .unwrap()
    }

    #[test]
    fn stage_boundaries_kappa4_c3() {
        let s = exploratory(256, 4, 3, 1, 2);
        assert_eq!(s.i0, 0);
        assert_eq!(s.ell, 3);
        assert_eq!(s.i1, 2);
        assert_eq!(s.deg[0], 4); // ceil(256^{1/4})
        assert_eq!(s.deg[1], ceil_pow(256, 1, 3));
    }

    #[test]
    fn r_recurrence_values() {
        // Hand-evaluated recurrence at eps = 1/2, rho = 1/3:
        // R_1 = 6, R_2 = 6*2 + 15*6 = 102, delta_2 = 4 + 204 = 208.
        let s = exploratory(256, 4, 3, 1, 2);
        assert_eq!(s.r[0], BigRational::zero());
        assert_eq!(s.r[1], rat_u64(6, 1));
        assert_eq!(s.r[2], rat_u64(102, 1));
        assert_eq!(s.delta[2], rat_u64(208, 1));
        assert_eq!(s.delta[0], rat_u64(1, 1));
    }

    #[test]
    fn r1_is_two_over_rho() {
        for c in 3..8 {
            let s = exploratory(100, 8, c, 1, 3);
            assert_eq!(s.r[1], rat_u64(2 * c, 1));
        }
    }

    #[test]
    fn guaranteed_mode_rescaling() {
        let s = build_schedule(&ScheduleParams {
            n: 64,
            kappa: 4,
            c: 3,
            mode: EpsilonMode::Guaranteed,
            eps_arg: rat_u64(1, 1),
        })
        .unwrap();
        // eps = eps' * rho / (30 ell) = 1/(3*90) = 1/270; beta = 270^3.
        assert_eq!(s.eps_internal, rat_u64(1, 270));
        assert_eq!(s.beta, rat_u64(270u64.pow(3), 1));
        assert!(s.stretch_bound_holds);
        assert!(s.eps_internal <= rat_u64(1, 10));
        assert!(s.rho >= rat_u64(10, 1) * &s.eps_internal);
    }

    #[test]
    fn exploratory_flag() {
        assert!(!exploratory(64, 4, 3, 1, 2).stretch_bound_holds);
        // eps = 1/30: eps <= 1/10 and rho = 1/3 >= 10/30.
        assert!(exploratory(64, 4, 3, 1, 30).stretch_bound_holds);
        assert!(!exploratory(64, 4, 3, 1, 29).stretch_bound_holds);
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = |n, kappa, c, p: u64, q: u64| {
            build_schedule(&ScheduleParams {
                n,
                kappa,
                c,
                mode: EpsilonMode::Exploratory,
                eps_arg: rat_u64(p, q),
            })
            .is_err()
        };
        assert!(bad(1, 4, 3, 1, 2)); // n too small
        assert!(bad(64, 2, 3, 1, 2)); // kappa too small
        assert!(bad(64, 4, 2, 1, 2)); // c too small
        assert!(bad(64, 3, 4, 1, 2)); // c > kappa => kappa*rho < 1
        assert!(bad(64, 4, 3, 1, 1)); // eps = 1 not allowed in exploratory
        assert!(bad(64, 4, 3, 0, 1)); // eps = 0
    }

    #[test]
    fn json_round_trip_fields() {
        let s = exploratory(64, 4, 3, 1, 2);
        let v = s.to_json();
        assert_eq!(v["ell"], 3);
        assert_eq!(v["R"].as_array().unwrap().len(), 4);
        assert_eq!(v["beta"]["num"], "8");
    }

    proptest! {
        #[test]
        fn recurrence_matches_closed_form(kappa in 3u64..12, c in 3u64..12, p in 1u64..6, q in 2u64..9) {
            prop_assume!(c <= kappa && p < q);
            let s = exploratory(128, kappa, c, p, q);
            // Closed form: R_i = sum_{j=0}^{i-1} (2/rho) eps^{-j} (5/rho)^{i-1-j}.
            for i in 0..=s.ell {
                let mut sum = BigRational::zero();
                for j in 0..i {
                    let mut term = rat_u64(2 * c, 1) * s.eps_pow_neg(j);
                    for _ in 0..(i - 1 - j) {
                        term *= rat_u64(5 * c, 1);
                    }
                    sum += term;
                }
                prop_assert_eq!(&s.r[i as usize], &sum);
            }
        }

        #[test]
        fn monotone_and_capped(kappa in 3u64..12, c in 3u64..12, p in 1u64..6, q in 2u64..9, n in 2u64..4000) {
            prop_assume!(c <= kappa && p < q);
            let s = exploratory(n, kappa, c, p, q);
            let cap = ceil_pow(n, 1, c);
            for i in 1..=s.ell as usize {
                prop_assert!(s.r[i] > s.r[i - 1]);
                prop_assert!(s.delta[i] > s.delta[i - 1]);
                prop_assert!(s.deg[i] <= cap);
            }
        }

        #[test]
        fn delta_bounded_when_rho_large(kappa in 3u64..12, c in 3u64..8, q in 30u64..90) {
            prop_assume!(c <= kappa && 10 * c <= q);
            // rho = 1/c >= 10/q = 10 eps.
            let s = exploratory(128, kappa, c, 1, q);
            prop_assert!(s.stretch_bound_holds);
            for i in 0..=s.ell {
                prop_assert!(s.delta[i as usize] <= rat_u64(2, 1) * s.eps_pow_neg(i));
            }
        }
    }
}
