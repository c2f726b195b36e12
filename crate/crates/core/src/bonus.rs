//! Exploration bonuses: the four-term reference-based width `u`, its Hoeffding
//! cap, and the clipped bonus `b = scale * min(u, cap)`.
//!
//! Log factors:
//!
//! * `L_T2 = ln(2 S A H T / δ')`
//! * `L_T3 = ln(3 S A H T / δ')`
//! * `L_K  = ln(2 S A H K / δ')`
//!
//! with `T = K H` and `δ' = δ / 5`.

use serde::{Deserialize, Serialize};

use crate::dims::{dot, Dims};
use crate::error::{Error, Result};
use crate::model::EmpiricalModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BonusMode {
    /// `b = scale * min(u, cap)`.
    #[default]
    Reference,
    /// `b = scale * cap`; the reference terms are still reported but unused.
    NaiveHoeffding,
}

/// Confidence parameters shared by every bonus evaluation in a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BonusConfig {
    pub dims: Dims,
    /// Overall failure probability `δ`.
    pub delta: f64,
    /// Episode budget `K`.
    pub episodes: usize,
    /// Reference trigger constant `C0`.
    pub c0: f64,
    /// Uniform multiplier on the final bonus.
    pub scale: f64,
    pub mode: BonusMode,
}

impl BonusConfig {
    /// Defaults: `C0 = sqrt(S³ A H³)`, `scale = 1`, reference mode.
    pub fn new(dims: Dims, episodes: usize, delta: f64) -> Result<Self> {
        let (s, a, h) = (dims.states as f64, dims.actions as f64, dims.horizon as f64);
        let cfg = Self {
            dims,
            delta,
            episodes,
            c0: (s.powi(3) * a * h.powi(3)).sqrt(),
            scale: 1.0,
            mode: BonusMode::Reference,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_mode(mut self, mode: BonusMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bonus scale must be positive, got {}",
                self.scale
            )));
        }
        if !(self.c0.is_finite() && self.c0 >= 0.0) {
            return Err(Error::InvalidArgument(format!("C0 must be nonnegative, got {}", self.c0)));
        }
        if self.episodes == 0 {
            return Err(Error::InvalidArgument("episode budget must be at least 1".into()));
        }
        Ok(())
    }

    /// `δ' = δ / 5`.
    pub fn delta_prime(&self) -> f64 {
        self.delta / 5.0
    }

    /// `T = K H`.
    pub fn total_steps(&self) -> usize {
        self.episodes * self.dims.horizon
    }

    fn sah(&self) -> f64 {
        (self.dims.states * self.dims.actions * self.dims.horizon) as f64
    }

    pub fn log_t2(&self) -> f64 {
        (2.0 * self.sah() * self.total_steps() as f64 / self.delta_prime()).ln()
    }

    pub fn log_t3(&self) -> f64 {
        (3.0 * self.sah() * self.total_steps() as f64 / self.delta_prime()).ln()
    }

    pub fn log_k(&self) -> f64 {
        (2.0 * self.sah() * self.episodes as f64 / self.delta_prime()).ln()
    }

    /// Hoeffding cap `sqrt(2 L_T2 / n) + H sqrt(4 S L_T3 / n)`, unscaled.
    pub fn cap(&self, n: u64) -> f64 {
        let n = n as f64;
        let (s, h) = (self.dims.states as f64, self.dims.horizon as f64);
        (2.0 * self.log_t2() / n).sqrt() + h * (4.0 * s * self.log_t3() / n).sqrt()
    }
}

/// The four terms of `u`, the cap and the applied bonus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BonusBreakdown {
    pub term_i: f64,
    pub term_ii: f64,
    pub term_iii: f64,
    pub term_iv: f64,
    pub u: f64,
    pub cap: f64,
    pub b: f64,
}

/// `Σ p(y) v(y)² - (Σ p(y) v(y))²`, clamped at zero.
pub fn weighted_variance(p: &[f64], v: &[f64]) -> Result<f64> {
    if p.len() != v.len() {
        return Err(Error::Dimension(format!(
            "probability row has {} entries, value row has {}",
            p.len(),
            v.len()
        )));
    }
    if (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("probability row does not sum to 1".into()));
    }
    Ok(variance_of(p, v))
}

#[inline]
fn variance_of(p: &[f64], v: &[f64]) -> f64 {
    let mean = dot(p, v);
    let second: f64 = p.iter().zip(v).map(|(pi, vi)| pi * vi * vi).sum();
    (second - mean * mean).max(0.0)
}

/// Bonus at a pair visited `n ≥ 1` times with empirical row `p_hat`.
///
/// `v_next` is the learner's `V_{h+1}` and `v_ref_next` the reference
/// `V^ref_{h+1}`. At `n = 1` the `n - 1` denominator of the third term is
/// replaced by 1.
pub fn bonus_terms(
    cfg: &BonusConfig,
    n: u64,
    p_hat: &[f64],
    v_next: &[f64],
    v_ref_next: &[f64],
) -> BonusBreakdown {
    debug_assert!(n >= 1);
    let s = cfg.dims.states as f64;
    let a = cfg.dims.actions as f64;
    let h = cfg.dims.horizon as f64;
    let k = cfg.episodes as f64;
    let nf = n as f64;
    let lt2 = cfg.log_t2();
    let lt3 = cfg.log_t3();
    let lk = cfg.log_k();

    let term_i = (2.0 * lt2 / nf).sqrt();

    let var_ref = variance_of(p_hat, v_ref_next);
    let term_ii = (6.0 * var_ref * lk / nf).sqrt()
        + (4.0 * h * lk / (s * nf)).sqrt()
        + 8.0 * (s * h * h).sqrt() * lk / (3.0 * nf);

    let denom = (nf - 1.0).max(1.0);
    let term_iii: f64 = p_hat
        .iter()
        .zip(v_next.iter().zip(v_ref_next))
        .map(|(&p, (&v, &r))| {
            let width = (2.0 * p * (1.0 - p) * lk / denom).sqrt() + 7.0 * lk / (3.0 * nf);
            width * (v - r).abs()
        })
        .sum();

    let term_iv = (4.0 * h * lt3 / nf).sqrt()
        + 7.0 * s * h * lk / (3.0 * nf)
        + 2.0 * s.powf(1.5) * a.powf(0.25) * h.powf(1.75) * k.powf(0.25) * lk.sqrt() / nf;

    let u = term_i + term_ii + term_iii + term_iv;
    let cap = cfg.cap(n);
    let b = match cfg.mode {
        BonusMode::Reference => cfg.scale * u.min(cap),
        BonusMode::NaiveHoeffding => cfg.scale * cap,
    };
    BonusBreakdown {
        term_i,
        term_ii,
        term_iii,
        term_iv,
        u,
        cap,
        b,
    }
}

/// Bonus at `(h, s, a)` from the current empirical model, or `None` when the
/// pair has never been visited.
pub fn compute_bonus(
    model: &EmpiricalModel,
    h: usize,
    s: usize,
    a: usize,
    v_next: &[f64],
    v_ref_next: &[f64],
    cfg: &BonusConfig,
) -> Option<BonusBreakdown> {
    let n = model.n_sa(h, s, a);
    let p_hat = model.transition_row(h, s, a)?;
    Some(bonus_terms(cfg, n, p_hat, v_next, v_ref_next))
}

/// One row of the bonus diagnostic dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BonusRow {
    pub k: usize,
    pub h: usize,
    pub s: usize,
    pub a: usize,
    pub n: u64,
    pub term_i: f64,
    pub term_ii: f64,
    pub term_iii: f64,
    pub term_iv: f64,
    pub u: f64,
    pub cap: f64,
    pub b: f64,
}

impl BonusRow {
    pub fn new(k: usize, h: usize, s: usize, a: usize, n: u64, br: &BonusBreakdown) -> Self {
        Self {
            k,
            h,
            s,
            a,
            n,
            term_i: br.term_i,
            term_ii: br.term_ii,
            term_iii: br.term_iii,
            term_iv: br.term_iv,
            u: br.u,
            cap: br.cap,
            b: br.b,
        }
    }
}

/// Writes bonus rows as CSV with header `k,h,s,a,n,term_i,…,u,cap,b`.
pub fn write_bonus_csv<W: std::io::Write>(rows: &[BonusRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<bonus csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> BonusConfig {
        BonusConfig::new(Dims::new(2, 2, 2).unwrap(), 100, 0.1).unwrap()
    }

    #[test]
    fn variance_examples() {
        assert_eq!(weighted_variance(&[0.2, 0.8], &[3.0, 3.0]).unwrap(), 0.0);
        assert!((weighted_variance(&[0.5, 0.5], &[0.0, 1.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!(weighted_variance(&[0.5, 0.5], &[0.0]).is_err());
        assert!(weighted_variance(&[0.5, 0.6], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn variance_matches_centered_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let raw: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let v: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * 4.0).collect();
            let mean: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
            let mut centered = 0.0;
            for i in 0..5 {
                centered += p[i] * (v[i] - mean) * (v[i] - mean);
            }
            assert!((weighted_variance(&p, &v).unwrap() - centered).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_prime_and_defaults() {
        let c = cfg();
        assert_eq!(c.delta_prime(), 0.1 / 5.0);
        assert_eq!(c.total_steps(), 200);
        assert!((c.c0 - (8.0f64 * 2.0 * 8.0).sqrt()).abs() < 1e-12);
        assert_eq!(c.scale, 1.0);
        assert!(BonusConfig::new(Dims::new(2, 2, 2).unwrap(), 100, 1.0).is_err());
        assert!(cfg().with_scale(0.0).validate().is_err());
    }

    #[test]
    fn worked_example_matches_frozen_values() {
        // independent transcription, evaluated outside this crate
        let br = bonus_terms(&cfg(), 10, &[0.3, 0.7], &[1.0, 0.0], &[0.0, 0.0]);
        let expect = [
            (br.term_i, 1.5480910240819798),
            (br.term_ii, 10.640354480989512),
            (br.term_iii, 3.3601312526108877),
            (br.term_iv, 37.72765524677679),
            (br.u, 53.276232004459175),
            (br.cap, 7.8443487576438145),
            (br.b, 7.8443487576438145),
        ];
        for (got, want) in expect {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn instability_term_vanishes_at_reference() {
        let v = [0.7, 1.9, 0.1];
        let c = BonusConfig::new(Dims::new(3, 2, 2).unwrap(), 50, 0.05).unwrap();
        let br = bonus_terms(&c, 7, &[0.2, 0.3, 0.5], &v, &v);
        assert_eq!(br.term_iii, 0.0);
    }

    #[test]
    fn constant_reference_leaves_two_remainders() {
        let c = cfg();
        let n = 12.0;
        let br = bonus_terms(&c, 12, &[0.4, 0.6], &[1.0, 1.0], &[2.0, 2.0]);
        let lk = c.log_k();
        let expected = (4.0 * 2.0 * lk / (2.0 * n)).sqrt() + 8.0 * (2.0f64 * 4.0).sqrt() * lk / (3.0 * n);
        assert!((br.term_ii - expected).abs() < 1e-12);
    }

    #[test]
    fn naive_mode_uses_cap() {
        let c = cfg().with_mode(BonusMode::NaiveHoeffding).with_scale(0.5);
        let br = bonus_terms(&c, 1000, &[0.5, 0.5], &[0.0, 0.0], &[0.0, 0.0]);
        assert_eq!(br.b, 0.5 * br.cap);
    }

    #[test]
    fn single_visit_uses_unit_denominator() {
        let br = bonus_terms(&cfg(), 1, &[1.0, 0.0], &[1.0, 0.0], &[0.0, 0.0]);
        assert!(br.term_iii.is_finite());
    }

    #[test]
    fn compute_bonus_signals_unvisited() {
        let m = EmpiricalModel::new(Dims::new(2, 2, 2).unwrap());
        assert!(compute_bonus(&m, 0, 0, 0, &[0.0, 0.0], &[0.0, 0.0], &cfg()).is_none());
    }

    #[test]
    fn bonus_csv_header() {
        let br = bonus_terms(&cfg(), 3, &[0.5, 0.5], &[0.0, 1.0], &[0.0, 0.0]);
        let mut buf = Vec::new();
        write_bonus_csv(&[BonusRow::new(1, 0, 1, 0, 3, &br)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,h,s,a,n,term_i,term_ii,term_iii,term_iv,u,cap,b\n"));
    }

    proptest! {
        #[test]
        fn clipping_and_monotonicity(
            n in 1u64..100_000,
            p0 in 0.0f64..1.0,
            v in prop::collection::vec(0.0f64..2.0, 2),
            r in prop::collection::vec(0.0f64..2.0, 2),
            scale in 0.01f64..2.0,
        ) {
            let c = cfg().with_scale(scale);
            let p = [p0, 1.0 - p0];
            let br = bonus_terms(&c, n, &p, &v, &r);
            prop_assert!(br.b <= scale * br.cap * (1.0 + 1e-15));
            prop_assert!(br.b <= scale * br.u * (1.0 + 1e-15));
            prop_assert!((br.u - (br.term_i + br.term_ii + br.term_iii + br.term_iv)).abs() <= 1e-12 * br.u.max(1.0));
            for x in [br.term_i, br.term_ii, br.term_iii, br.term_iv, br.u, br.cap, br.b] {
                prop_assert!(x >= 0.0);
            }
            prop_assert!(c.cap(n + 1) < c.cap(n));
            let doubled = bonus_terms(&c, 2 * n, &p, &v, &r);
            prop_assert!(doubled.term_i <= br.term_i);
            let first_iv = |m: u64| (4.0 * 2.0 * c.log_t3() / m as f64).sqrt();
            prop_assert!(first_iv(2 * n) <= first_iv(n));
        }
    }
}
