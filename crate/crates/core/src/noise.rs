//! Noise parameters, the outcome bit-flip channel and drifting schedules.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::{OutcomeDistribution, SampleSet};
use crate::rng::{self, domain};
use crate::walsh::{fwht_in_place, spectrum_of};

fn check_rate(name: &'static str, value: f64, max: f64) -> Result<()> {
    if (0.0..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::param(name, format!("{value} outside [0, {max}]")))
    }
}

/// Gate-level noise: depolarizing rates after one- and two-qubit gates and
/// a symmetric readout flip.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GateNoise {
    pub r1: f64,
    pub r2: f64,
    #[serde(default)]
    pub eps_readout: f64,
}

impl GateNoise {
    pub fn new(r1: f64, r2: f64, eps_readout: f64) -> Result<Self> {
        let noise = Self {
            r1,
            r2,
            eps_readout,
        };
        noise.validate()?;
        Ok(noise)
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn depolarizing(rate: f64) -> Result<Self> {
        Self::new(rate, rate, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        check_rate("r1", self.r1, 1.0)?;
        check_rate("r2", self.r2, 1.0)?;
        check_rate("eps_readout", self.eps_readout, 0.5)
    }

    pub fn is_noiseless(&self) -> bool {
        self.r1 == 0.0 && self.r2 == 0.0 && self.eps_readout == 0.0
    }

    /// These rates with the scheduled parameter replaced by its value at `position`.
    pub fn at(&self, schedule: &NoiseSchedule, position: f64) -> Result<GateNoise> {
        let value = schedule_value(schedule, position)?;
        let mut out = *self;
        match schedule.target {
            ScheduleTarget::GateRates => {
                out.r1 = value;
                out.r2 = value;
            }
            ScheduleTarget::SingleQubit => out.r1 = value,
            ScheduleTarget::TwoQubit => out.r2 = value,
            ScheduleTarget::Readout | ScheduleTarget::BitFlip => out.eps_readout = value,
        }
        Ok(out)
    }
}

/// Independent symmetric flip of every outcome bit with probability `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionNoise {
    eps: f64,
}

impl DistributionNoise {
    pub fn new(eps: f64) -> Result<Self> {
        check_rate("eps", eps, 0.5)?;
        Ok(Self { eps })
    }

    /// Flip rate whose correlation is `rho`.
    pub fn from_rho(rho: f64) -> Result<Self> {
        check_rate("rho", rho, 1.0)?;
        Self::new((1.0 - rho) / 2.0)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Per-bit correlation `1 − 2·eps`.
    pub fn rho(&self) -> f64 {
        1.0 - 2.0 * self.eps
    }
}

/// Convolves `p` with independent per-bit flips. Computed spectrally: the
/// coefficient of subset `S` is multiplied by `rho^|S|`.
pub fn apply_bitflip_noise(
    p: &OutcomeDistribution,
    noise: DistributionNoise,
) -> OutcomeDistribution {
    if noise.eps == 0.0 {
        return p.clone();
    }
    let n = p.n();
    let rho = noise.rho();
    let powers: Vec<f64> = (0..=n as i32).map(|d| rho.powi(d)).collect();
    let mut coefficients = spectrum_of(p).coefficients().to_vec();
    for (subset, c) in coefficients.iter_mut().enumerate() {
        *c *= powers[subset.count_ones() as usize];
    }
    fwht_in_place(&mut coefficients);
    let scale = 1.0 / coefficients.len() as f64;
    coefficients.iter_mut().for_each(|v| *v *= scale);
    OutcomeDistribution::from_computed(n, coefficients)
}

fn flip_mask(rng: &mut impl Rng, n: usize, eps: f64) -> u32 {
    if eps == 0.0 {
        return 0;
    }
    (0..n).fold(0u32, |mask, bit| {
        if rng.gen::<f64>() < eps {
            mask | (1 << bit)
        } else {
            mask
        }
    })
}

/// Flips each bit of each sample independently with probability `eps`.
/// Sample `i` draws from the stream keyed by `(seed, i)`.
pub fn corrupt_samples(s: &SampleSet, noise: DistributionNoise, seed: u64) -> SampleSet {
    corrupt_with(s, seed, |_| Ok(noise.eps)).expect("constant rate is always legal")
}

/// Like [`corrupt_samples`], with the flip rate of sample `i` read from the
/// schedule at its normalized stream position.
pub fn corrupt_samples_scheduled(
    s: &SampleSet,
    schedule: &NoiseSchedule,
    seed: u64,
) -> Result<SampleSet> {
    if !matches!(
        schedule.target,
        ScheduleTarget::BitFlip | ScheduleTarget::Readout
    ) {
        return Err(Error::param(
            "schedule.target",
            "sample corruption is driven by a bitflip schedule",
        ));
    }
    let len = s.len();
    corrupt_with(s, seed, |i| {
        schedule_value(schedule, stream_position(i, len))
    })
}

fn corrupt_with(
    s: &SampleSet,
    seed: u64,
    eps_at: impl Fn(usize) -> Result<f64> + Sync,
) -> Result<SampleSet> {
    let n = s.n();
    let outcomes = s
        .outcomes()
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let eps = eps_at(i)?;
            let mut rng = rng::stream(seed, domain::CORRUPTION, i as u64);
            Ok(x ^ flip_mask(&mut rng, n, eps))
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(SampleSet::new(n, outcomes)?.with_meta(s.meta.clone()))
}

/// Normalized position of sample `i` in a stream of `len` samples; the
/// first sample sits at 0 and the last at 1.
pub fn stream_position(i: usize, len: usize) -> f64 {
    if len <= 1 {
        0.0
    } else {
        i as f64 / (len - 1) as f64
    }
}

/// Which parameter a schedule drives; fixes the legal output range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleTarget {
    /// Both depolarizing rates.
    #[default]
    GateRates,
    SingleQubit,
    TwoQubit,
    Readout,
    /// Outcome bit-flip rate used by sample corruption.
    BitFlip,
}

impl ScheduleTarget {
    pub fn legal_range(&self) -> (f64, f64) {
        match self {
            ScheduleTarget::GateRates | ScheduleTarget::SingleQubit | ScheduleTarget::TwoQubit => {
                (0.0, 1.0)
            }
            ScheduleTarget::Readout | ScheduleTarget::BitFlip => (0.0, 0.5),
        }
    }
}

fn default_resolution() -> usize {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant {
        value: f64,
    },
    Linear {
        start: f64,
        end: f64,
    },
    /// `mean + amplitude·sin(2π·position/period)`
    Sinusoid {
        mean: f64,
        amplitude: f64,
        period: f64,
    },
    /// `resolution` clamped ±`step` moves across the unit interval.
    RandomWalk {
        start: f64,
        step: f64,
        seed: u64,
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ScheduleSpec {
    #[serde(flatten)]
    kind: ScheduleKind,
    #[serde(default)]
    target: ScheduleTarget,
}

/// A noise rate as a function of normalized stream position in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleSpec", into = "ScheduleSpec")]
pub struct NoiseSchedule {
    kind: ScheduleKind,
    target: ScheduleTarget,
    walk: Vec<f64>,
}

impl TryFrom<ScheduleSpec> for NoiseSchedule {
    type Error = Error;

    fn try_from(spec: ScheduleSpec) -> Result<Self> {
        NoiseSchedule::new(spec.kind, spec.target)
    }
}

impl From<NoiseSchedule> for ScheduleSpec {
    fn from(s: NoiseSchedule) -> Self {
        ScheduleSpec {
            kind: s.kind,
            target: s.target,
        }
    }
}

impl NoiseSchedule {
    pub fn new(kind: ScheduleKind, target: ScheduleTarget) -> Result<Self> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} is not finite")))
            }
        };
        let walk = match &kind {
            ScheduleKind::Constant { value } => {
                finite("value", *value)?;
                Vec::new()
            }
            ScheduleKind::Linear { start, end } => {
                finite("start", *start)?;
                finite("end", *end)?;
                Vec::new()
            }
            ScheduleKind::Sinusoid {
                mean,
                amplitude,
                period,
            } => {
                finite("mean", *mean)?;
                finite("amplitude", *amplitude)?;
                if !(*period > 0.0 && period.is_finite()) {
                    return Err(Error::param("period", format!("{period} must be positive")));
                }
                Vec::new()
            }
            ScheduleKind::RandomWalk {
                start,
                step,
                seed,
                resolution,
            } => {
                finite("start", *start)?;
                if !(*step >= 0.0 && step.is_finite()) {
                    return Err(Error::param("step", format!("{step} must be nonnegative")));
                }
                if *resolution == 0 {
                    return Err(Error::param("resolution", "must be at least 1"));
                }
                let (lo, hi) = target.legal_range();
                let mut value = start.clamp(lo, hi);
                let mut walk = Vec::with_capacity(resolution + 1);
                walk.push(value);
                for k in 0..*resolution {
                    let mut rng = rng::stream(*seed, domain::RANDOM_WALK, k as u64);
                    let delta = if rng.gen::<bool>() { *step } else { -*step };
                    value = (value + delta).clamp(lo, hi);
                    walk.push(value);
                }
                walk
            }
        };
        Ok(Self { kind, target, walk })
    }

    pub fn constant(value: f64, target: ScheduleTarget) -> Result<Self> {
        Self::new(ScheduleKind::Constant { value }, target)
    }

    pub fn linear(start: f64, end: f64, target: ScheduleTarget) -> Result<Self> {
        Self::new(ScheduleKind::Linear { start, end }, target)
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn target(&self) -> ScheduleTarget {
        self.target
    }
}

/// Rate emitted by the schedule at `position`, clamped to the target's legal range.
pub fn schedule_value(schedule: &NoiseSchedule, position: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&position) {
        return Err(Error::param(
            "position",
            format!("{position} outside [0, 1]"),
        ));
    }
    let raw = match schedule.kind {
        ScheduleKind::Constant { value } => value,
        ScheduleKind::Linear { start, end } => start + (end - start) * position,
        ScheduleKind::Sinusoid {
            mean,
            amplitude,
            period,
        } => mean + amplitude * (std::f64::consts::TAU * position / period).sin(),
        ScheduleKind::RandomWalk { resolution, .. } => {
            let k = ((position * resolution as f64).floor() as usize).min(resolution);
            schedule.walk[k]
        }
    };
    let (lo, hi) = schedule.target.legal_range();
    Ok(raw.clamp(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::{empirical_distribution, tv_distance};
    use crate::walsh::{degree_profile, fwht};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_distribution(n: usize, rng: &mut impl Rng) -> OutcomeDistribution {
        OutcomeDistribution::from_weights(n, (0..1 << n).map(|_| rng.gen::<f64>()).collect())
            .unwrap()
    }

    /// Explicit 2^n × 2^n transition matrix: P(x → y) = eps^d (1−eps)^(n−d), d = |x ⊕ y|.
    fn convolve_directly(p: &OutcomeDistribution, eps: f64) -> Vec<f64> {
        let n = p.n();
        let dim = 1usize << n;
        let mut out = vec![0.0; dim];
        for y in 0..dim {
            for x in 0..dim {
                let d = (x ^ y).count_ones() as i32;
                out[y] += p.probabilities()[x] * eps.powi(d) * (1.0 - eps).powi(n as i32 - d);
            }
        }
        out
    }

    #[test]
    fn zero_flip_rate_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_distribution(4, &mut rng);
        assert_eq!(
            apply_bitflip_noise(&p, DistributionNoise::new(0.0).unwrap()),
            p
        );
    }

    #[test]
    fn half_flip_rate_gives_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let p = random_distribution(n, &mut rng);
            let out = apply_bitflip_noise(&p, DistributionNoise::new(0.5).unwrap());
            for v in out.probabilities() {
                assert!((v - 1.0 / (1 << n) as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_bit_flip() {
        let p = OutcomeDistribution::new(1, vec![1.0, 0.0]).unwrap();
        let out = apply_bitflip_noise(&p, DistributionNoise::new(0.1).unwrap());
        assert!((out.probabilities()[0] - 0.9).abs() < 1e-15);
        assert!((out.probabilities()[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn matches_transition_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_distribution(3, &mut rng);
        let out = apply_bitflip_noise(&p, DistributionNoise::new(0.2).unwrap());
        for (a, b) in out.probabilities().iter().zip(convolve_directly(&p, 0.2)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_action_on_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [1, 4, 7, 10] {
            let p = random_distribution(n, &mut rng);
            let before = spectrum_of(&p);
            for eps in [0.01, 0.1, 0.3] {
                let noise = DistributionNoise::new(eps).unwrap();
                let after = spectrum_of(&apply_bitflip_noise(&p, noise));
                for s in 0..1usize << n {
                    let expect = noise.rho().powi(s.count_ones() as i32) * before.coefficient(s);
                    assert!((after.coefficient(s) - expect).abs() < 1e-12);
                }
                let ideal = degree_profile(&before).attenuated(noise.rho());
                let noisy = degree_profile(&after);
                for d in 0..=n {
                    assert!((noisy.weights[d] - ideal.weights[d]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn inverse_of_noisy_spectrum_recovers_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = random_distribution(5, &mut rng);
        let noisy = apply_bitflip_noise(&p, DistributionNoise::new(0.15).unwrap());
        let q: Vec<f64> = noisy.probabilities().iter().map(|v| v * 32.0).collect();
        let recovered = crate::walsh::inverse_fwht(&fwht(&q).unwrap());
        for (a, b) in recovered.iter().zip(&q) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_validation() {
        assert!(DistributionNoise::new(0.6).is_err());
        assert!(DistributionNoise::new(-0.1).is_err());
        assert!(GateNoise::new(0.1, 1.1, 0.0).is_err());
        assert!(GateNoise::new(0.1, 0.1, 0.6).is_err());
        assert_eq!(DistributionNoise::new(0.2).unwrap().rho(), 1.0 - 2.0 * 0.2);
    }

    #[test]
    fn corruption_with_zero_rate_is_identity() {
        let s = OutcomeDistribution::uniform(5).unwrap().sample(1000, 1);
        assert_eq!(
            corrupt_samples(&s, DistributionNoise::new(0.0).unwrap(), 9),
            s
        );
    }

    #[test]
    fn corruption_is_seeded() {
        let s = OutcomeDistribution::delta(4, 0).unwrap().sample(500, 1);
        let noise = DistributionNoise::new(0.2).unwrap();
        assert_eq!(corrupt_samples(&s, noise, 3), corrupt_samples(&s, noise, 3));
        assert_ne!(corrupt_samples(&s, noise, 3), corrupt_samples(&s, noise, 4));
    }

    #[test]
    fn full_corruption_is_uniform() {
        let s = OutcomeDistribution::delta(3, 5).unwrap().sample(100_000, 1);
        let out = corrupt_samples(&s, DistributionNoise::new(0.5).unwrap(), 2);
        let tv = tv_distance(
            &empirical_distribution(&out).unwrap(),
            &OutcomeDistribution::uniform(3).unwrap(),
        )
        .unwrap();
        assert!(tv < 0.02, "tv {tv}");
    }

    #[test]
    fn corruption_converges_to_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_distribution(4, &mut rng);
        let s = p.sample(1_000_000, 10);
        let noise = DistributionNoise::new(0.1).unwrap();
        let analytic = apply_bitflip_noise(&empirical_distribution(&s).unwrap(), noise);
        let observed = empirical_distribution(&corrupt_samples(&s, noise, 11)).unwrap();
        let tv = tv_distance(&analytic, &observed).unwrap();
        assert!(tv < 0.01, "tv {tv}");
    }

    #[test]
    fn corruption_commutes_with_splitting() {
        // Corrupting the whole stream then splitting must give halves with the
        // same statistics as corrupting each half separately.
        let p = OutcomeDistribution::delta(3, 0).unwrap();
        let s = p.sample(200_000, 1);
        let noise = DistributionNoise::new(0.2).unwrap();
        let whole = corrupt_samples(&s, noise, 21);
        let half = s.len() / 2;
        let first_after = empirical_distribution(&whole.slice(0, half)).unwrap();
        let first_before =
            empirical_distribution(&corrupt_samples(&s.slice(0, half), noise, 22)).unwrap();
        let tv = tv_distance(&first_after, &first_before).unwrap();
        assert!(tv < 0.01, "tv {tv}");
    }

    #[test]
    fn schedule_examples() {
        let c = NoiseSchedule::constant(0.03, ScheduleTarget::GateRates).unwrap();
        for pos in [0.0, 0.3, 1.0] {
            assert_eq!(schedule_value(&c, pos).unwrap(), 0.03);
        }
        let l = NoiseSchedule::linear(0.01, 0.05, ScheduleTarget::GateRates).unwrap();
        assert!((schedule_value(&l, 0.5).unwrap() - 0.03).abs() < 1e-15);
        assert!(schedule_value(&l, 1.5).is_err());
        assert!(schedule_value(&l, -0.1).is_err());
    }

    #[test]
    fn schedules_clamp_to_target_range() {
        let s = NoiseSchedule::new(
            ScheduleKind::Sinusoid {
                mean: 0.45,
                amplitude: 0.2,
                period: 0.5,
            },
            ScheduleTarget::BitFlip,
        )
        .unwrap();
        assert_eq!(schedule_value(&s, 0.125).unwrap(), 0.5);
        let l = NoiseSchedule::linear(-0.2, 0.2, ScheduleTarget::Readout).unwrap();
        assert_eq!(schedule_value(&l, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn random_walk_stays_in_bounds() {
        for seed in 0..20 {
            let s = NoiseSchedule::new(
                ScheduleKind::RandomWalk {
                    start: 0.0,
                    step: 0.005,
                    seed,
                    resolution: 4096,
                },
                ScheduleTarget::BitFlip,
            )
            .unwrap();
            let values: Vec<f64> = (0..10_000)
                .map(|i| schedule_value(&s, stream_position(i, 10_000)).unwrap())
                .collect();
            assert!(values.iter().all(|v| (0.0..=0.5).contains(v)));
            // walk is a function of its seed
            let again = NoiseSchedule::new(s.kind().clone(), s.target()).unwrap();
            assert_eq!(
                schedule_value(&again, 0.77).unwrap(),
                schedule_value(&s, 0.77).unwrap()
            );
        }
    }

    #[test]
    fn schedule_serializes_as_descriptor() {
        let s = NoiseSchedule::linear(0.01, 0.05, ScheduleTarget::BitFlip).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"linear","start":0.01,"end":0.05,"target":"bit_flip"}"#
        );
        let back: NoiseSchedule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<NoiseSchedule>(
            r#"{"kind":"sinusoid","mean":0.1,"amplitude":0.1,"period":0}"#
        )
        .is_err());
    }

    #[test]
    fn scheduled_gate_noise() {
        let base = GateNoise::new(0.01, 0.02, 0.03).unwrap();
        let l = NoiseSchedule::linear(0.0, 0.1, ScheduleTarget::TwoQubit).unwrap();
        let at = base.at(&l, 1.0).unwrap();
        assert_eq!((at.r1, at.r2, at.eps_readout), (0.01, 0.1, 0.03));
    }

    #[test]
    fn scheduled_corruption_follows_drift() {
        let s = OutcomeDistribution::delta(8, 0).unwrap().sample(20_000, 1);
        let sched = NoiseSchedule::linear(0.0, 0.4, ScheduleTarget::BitFlip).unwrap();
        let out = corrupt_samples_scheduled(&s, &sched, 5).unwrap();
        let ones = |part: &[u32]| {
            part.iter().map(|x| x.count_ones() as f64).sum::<f64>() / (8.0 * part.len() as f64)
        };
        let first = ones(&out.outcomes()[..2000]);
        let last = ones(&out.outcomes()[18_000..]);
        assert!(first < 0.05 && last > 0.3, "{first} {last}");
        let wrong = NoiseSchedule::linear(0.0, 0.4, ScheduleTarget::GateRates).unwrap();
        assert!(corrupt_samples_scheduled(&s, &wrong, 5).is_err());
    }

    proptest! {
        #[test]
        fn channel_is_stochastic(n in 1usize..=8, seed in any::<u64>(), eps in 0.0f64..=0.5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_distribution(n, &mut rng);
            let out = apply_bitflip_noise(&p, DistributionNoise::new(eps).unwrap());
            prop_assert!(out.probabilities().iter().all(|&v| v >= 0.0));
            prop_assert!((out.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn channels_compose(n in 1usize..=8, seed in any::<u64>(), e1 in 0.0f64..=0.5, e2 in 0.0f64..=0.5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_distribution(n, &mut rng);
            let a = DistributionNoise::new(e1).unwrap();
            let b = DistributionNoise::new(e2).unwrap();
            let twice = apply_bitflip_noise(&apply_bitflip_noise(&p, a), b);
            let once = apply_bitflip_noise(&p, DistributionNoise::from_rho(a.rho() * b.rho()).unwrap());
            for (x, y) in twice.probabilities().iter().zip(once.probabilities()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
