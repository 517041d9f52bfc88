//! Synthetic measurement campaigns from parametric architecture-class
//! profiles.
//!
//! For every (system, application) pair the generator decides support, then
//! draws a log-normal per-application affinity:
//!
//! ```text
//! perf = base_perf · exp(g · affinity_spread),   g ~ N(0, 1)
//! exec_time_s = W / perf
//! energy_j = energy_per_op_j · W,   avg_power_w = energy_j / exec_time_s
//! ```
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with the
//! caller's `u64` seed, so a given seed reproduces the same campaign.
//!
//! The bundled presets are illustrative. They are calibrated only to the
//! qualitative spread between classes, not to measured hardware.

use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::model::{
    Application, ArchClass, Campaign, Measurement, MeasurementStatus, SystemUnderTest,
    WorkloadProvenance,
};
use crate::workload::{analytic_workload, KernelSpec};

/// Intrinsic ops/s of the CPU preset; the other presets are multiples.
pub const CPU_BASE_PERF: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportModel {
    /// Each application is supported independently with this probability.
    Probability(f64),
    /// Exactly one application, chosen uniformly, is supported.
    SingleApp,
}

impl fmt::Display for SupportModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupportModel::Probability(p) => write!(f, "{p}"),
            SupportModel::SingleApp => f.write_str("single"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassProfile {
    pub arch_class: ArchClass,
    /// ops/s
    pub base_perf: f64,
    /// Standard deviation of the log of per-application speedups.
    pub affinity_spread: f64,
    pub support: SupportModel,
    pub energy_per_op_j: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid profile for {class}: {message}")]
    Profile { class: ArchClass, message: String },
    #[error("{0}")]
    Parameter(String),
}

impl ClassProfile {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |message: &str| {
            Err(SynthError::Profile {
                class: self.arch_class,
                message: message.to_string(),
            })
        };
        if !(self.base_perf.is_finite() && self.base_perf > 0.0) {
            return bad("base_perf must be positive");
        }
        if !(self.affinity_spread.is_finite() && self.affinity_spread >= 0.0) {
            return bad("affinity_spread must be non-negative");
        }
        if let SupportModel::Probability(p) = self.support {
            if !(0.0..=1.0).contains(&p) {
                return bad("support probability must lie in [0, 1]");
            }
        }
        if !(self.energy_per_op_j.is_finite() && self.energy_per_op_j > 0.0) {
            return bad("energy_per_op_j must be positive");
        }
        Ok(())
    }

    pub fn to_config_line(&self) -> String {
        format!(
            "profile {} base {} spread {} support {} epo {}",
            self.arch_class, self.base_perf, self.affinity_spread, self.support, self.energy_per_op_j
        )
    }
}

pub fn cpu_preset() -> ClassProfile {
    ClassProfile {
        arch_class: ArchClass::Cpu,
        base_perf: CPU_BASE_PERF,
        affinity_spread: 0.2,
        support: SupportModel::Probability(1.0),
        energy_per_op_j: 1e-9,
    }
}

pub fn gpu_preset() -> ClassProfile {
    ClassProfile {
        arch_class: ArchClass::Gpu,
        base_perf: 20.0 * CPU_BASE_PERF,
        affinity_spread: 1.2,
        support: SupportModel::Probability(0.9),
        energy_per_op_j: 1e-10,
    }
}

pub fn dsp_preset() -> ClassProfile {
    ClassProfile {
        arch_class: ArchClass::Dsp,
        base_perf: 2.0 * CPU_BASE_PERF,
        affinity_spread: 0.8,
        support: SupportModel::Probability(0.95),
        energy_per_op_j: 2e-10,
    }
}

pub fn asic_preset() -> ClassProfile {
    ClassProfile {
        arch_class: ArchClass::Asic,
        base_perf: 500.0 * CPU_BASE_PERF,
        affinity_spread: 0.0,
        support: SupportModel::SingleApp,
        energy_per_op_j: 1e-12,
    }
}

/// CPU, GPU, DSP and ASIC presets, in that order.
pub fn default_presets() -> Vec<ClassProfile> {
    vec![cpu_preset(), gpu_preset(), dsp_preset(), asic_preset()]
}

/// Parses `profile <class> base <v> spread <v> support <v|single> epo <v>`
/// lines. Keys may appear in any order; `#` starts a comment.
pub fn parse_profiles(text: &str) -> Result<Vec<ClassProfile>, SynthError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| SynthError::Config { line, message };
        let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        let (class, kv) = match toks.as_slice() {
            [] => continue,
            ["profile", class, kv @ ..] => (class, kv),
            _ => return Err(err("expected 'profile <class> <key> <value>...'".into())),
        };
        let arch_class: ArchClass = class.parse().map_err(|e: crate::model::UnknownToken| err(e.to_string()))?;
        if kv.len() % 2 != 0 {
            return Err(err("keys and values must come in pairs".into()));
        }
        let (mut base, mut spread, mut support, mut epo) = (None, None, None, None);
        for pair in kv.chunks(2) {
            let (key, value) = (pair[0], pair[1]);
            let number = || {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("bad number '{value}' for '{key}'")))
            };
            let slot_taken = match key {
                "base" => base.replace(number()?).is_some(),
                "spread" => spread.replace(number()?).is_some(),
                "epo" => epo.replace(number()?).is_some(),
                "support" => {
                    let s = if value == "single" {
                        SupportModel::SingleApp
                    } else {
                        SupportModel::Probability(number()?)
                    };
                    support.replace(s).is_some()
                }
                _ => return Err(err(format!("unknown key '{key}'"))),
            };
            if slot_taken {
                return Err(err(format!("key '{key}' given twice")));
            }
        }
        let missing = |k: &str| err(format!("missing key '{k}'"));
        let p = ClassProfile {
            arch_class,
            base_perf: base.ok_or_else(|| missing("base"))?,
            affinity_spread: spread.ok_or_else(|| missing("spread"))?,
            support: support.ok_or_else(|| missing("support"))?,
            energy_per_op_j: epo.ok_or_else(|| missing("epo"))?,
        };
        p.validate().map_err(|e| err(e.to_string()))?;
        out.push(p);
    }
    Ok(out)
}

/// Kernels assigned to synthetic applications, cycled when more are needed.
const KERNEL_CYCLE: [KernelSpec; 14] = [
    KernelSpec::Matmul { n: 16 },
    KernelSpec::Matmul { n: 64 },
    KernelSpec::Matmul { n: 256 },
    KernelSpec::Fir { n_samples: 4096, k_taps: 8 },
    KernelSpec::Fir { n_samples: 16384, k_taps: 32 },
    KernelSpec::Fir { n_samples: 1024, k_taps: 128 },
    KernelSpec::Dot { n: 1024 },
    KernelSpec::Dot { n: 1 << 20 },
    KernelSpec::Fft { n: 64 },
    KernelSpec::Fft { n: 1024 },
    KernelSpec::Fft { n: 1 << 14 },
    KernelSpec::Fft { n: 1 << 18 },
    KernelSpec::Matmul { n: 1024 },
    KernelSpec::Fir { n_samples: 1 << 20, k_taps: 16 },
];

fn synth_kernel(j: usize) -> KernelSpec {
    let round = (j / KERNEL_CYCLE.len()) as u64;
    match KERNEL_CYCLE[j % KERNEL_CYCLE.len()] {
        KernelSpec::Matmul { n } => KernelSpec::Matmul { n: n * (round + 1) },
        KernelSpec::Fir { n_samples, k_taps } => KernelSpec::Fir {
            n_samples: n_samples * (round + 1),
            k_taps,
        },
        KernelSpec::Dot { n } => KernelSpec::Dot { n: n * (round + 1) },
        KernelSpec::Fft { n } => KernelSpec::Fft { n: n << round.min(8) },
    }
}

fn synth_applications(n_apps: usize) -> Result<Vec<Application>, SynthError> {
    (0..n_apps)
        .map(|j| {
            let k = synth_kernel(j);
            let workload = analytic_workload(k).map_err(|e| SynthError::Parameter(e.to_string()))?;
            Ok(Application {
                id: format!("app{j:02}"),
                name: k.label(),
                workload,
                workload_provenance: WorkloadProvenance::Analytic,
            })
        })
        .collect()
}

/// Generates a campaign with `count` systems for each profile and `n_apps`
/// applications. Deterministic in `seed`.
pub fn synth_campaign(
    profiles: &[(ClassProfile, usize)],
    n_apps: usize,
    seed: u64,
) -> Result<Campaign, SynthError> {
    if n_apps == 0 {
        return Err(SynthError::Parameter("n_apps must be at least 1".into()));
    }
    for (p, count) in profiles {
        p.validate()?;
        if *count == 0 {
            return Err(SynthError::Parameter(format!(
                "system count for {} must be at least 1",
                p.arch_class
            )));
        }
    }
    let applications = synth_applications(n_apps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut campaign = Campaign {
        applications,
        ..Campaign::default()
    };
    let mut per_class = std::collections::BTreeMap::<ArchClass, usize>::new();

    for (profile, count) in profiles {
        for _ in 0..*count {
            let k = per_class.entry(profile.arch_class).or_insert(0);
            *k += 1;
            let id = format!("{}{:02}", profile.arch_class.as_str().to_lowercase(), k);
            let mut system = SystemUnderTest::new(id.clone(), profile.arch_class);
            system.name = format!("synthetic {} #{k}", profile.arch_class);
            system.notes = "synthetic".into();

            let single = match profile.support {
                SupportModel::SingleApp => Some(rng.random_range(0..n_apps)),
                SupportModel::Probability(_) => None,
            };
            for (j, app) in campaign.applications.iter().enumerate() {
                let u: f64 = rng.random();
                let g: f64 = StandardNormal.sample(&mut rng);
                let supported = match profile.support {
                    SupportModel::Probability(p) => u < p,
                    SupportModel::SingleApp => single == Some(j),
                };
                if !supported {
                    campaign.measurements.push(Measurement::with_status(
                        &id,
                        &app.id,
                        MeasurementStatus::Unsupported,
                    ));
                    continue;
                }
                let w = app.workload.total() as f64;
                let perf = profile.base_perf * (g * profile.affinity_spread).exp();
                let exec_time_s = w / perf;
                let energy_j = profile.energy_per_op_j * w;
                campaign.measurements.push(Measurement {
                    system_id: id.clone(),
                    app_id: app.id.clone(),
                    status: MeasurementStatus::Ok,
                    exec_time_s: Some(exec_time_s),
                    energy_j: Some(energy_j),
                    avg_power_w: Some(energy_j / exec_time_s),
                });
            }
            campaign.systems.push(system);
        }
    }
    Ok(campaign)
}

/// Splits `total` systems over `n_profiles` round-robin, earlier profiles
/// taking the remainder.
pub fn distribute(total: usize, n_profiles: usize) -> Vec<usize> {
    (0..n_profiles)
        .map(|i| total / n_profiles + usize::from(i < total % n_profiles))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{score_campaign, FlexibilityEstimator};
    use crate::model::validate_campaign;

    fn presets(count: usize) -> Vec<(ClassProfile, usize)> {
        default_presets().into_iter().map(|p| (p, count)).collect()
    }

    #[test]
    fn same_seed_same_campaign() {
        let a = synth_campaign(&presets(2), 14, 42).unwrap();
        let b = synth_campaign(&presets(2), 14, 42).unwrap();
        assert_eq!(a, b);
        let c = synth_campaign(&presets(2), 14, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_campaigns_validate() {
        for seed in 0..20 {
            let c = synth_campaign(&presets(3), 1 + seed as usize, seed).unwrap();
            assert!(validate_campaign(&c).is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn asic_supports_exactly_one_app() {
        let c = synth_campaign(&[(asic_preset(), 5)], 14, 7).unwrap();
        for s in &c.systems {
            let ok = c
                .measurements
                .iter()
                .filter(|m| m.system_id == s.id && m.status == MeasurementStatus::Ok)
                .count();
            assert_eq!(ok, 1);
        }
        for s in score_campaign(&c, FlexibilityEstimator::GmOverAm).unwrap() {
            assert_eq!(s.flexibility, 0.0);
            assert!((s.peak_perf - 500.0 * CPU_BASE_PERF).abs() <= 1e-6 * s.peak_perf);
        }
    }

    #[test]
    fn zero_spread_full_support_is_uniform() {
        let p = ClassProfile {
            arch_class: ArchClass::Synthetic,
            base_perf: 3e8,
            affinity_spread: 0.0,
            support: SupportModel::Probability(1.0),
            energy_per_op_j: 1e-9,
        };
        let c = synth_campaign(&[(p, 4)], 14, 1).unwrap();
        for s in score_campaign(&c, FlexibilityEstimator::GmOverAm).unwrap() {
            assert!((s.flexibility - 1.0).abs() < 1e-12, "{}", s.flexibility);
            assert_eq!(s.versatility, 1.0);
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(synth_campaign(&presets(1), 0, 1).is_err());
        assert!(synth_campaign(&presets(0), 3, 1).is_err());
        let mut p = cpu_preset();
        p.support = SupportModel::Probability(1.5);
        assert!(synth_campaign(&[(p, 1)], 3, 1).is_err());
        let mut p = cpu_preset();
        p.base_perf = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn config_round_trips() {
        let text: String = default_presets()
            .iter()
            .map(|p| p.to_config_line() + "\n")
            .collect();
        assert_eq!(parse_profiles(&text).unwrap(), default_presets());
    }

    #[test]
    fn config_errors_have_lines() {
        let e = parse_profiles("# presets\nprofile CPU base 1 spread 0 support 1\n").unwrap_err();
        assert_eq!(e, SynthError::Config { line: 2, message: "missing key 'epo'".into() });
        assert!(parse_profiles("profile TPU base 1 spread 0 support 1 epo 1").is_err());
        assert!(parse_profiles("profile CPU base x spread 0 support 1 epo 1").is_err());
        assert!(parse_profiles("profile CPU base 1 spread 0 support 2 epo 1").is_err());
        assert!(parse_profiles("profile CPU base 1 base 2 spread 0 support 1 epo 1").is_err());
        assert!(parse_profiles("profile CPU base 1 spread 0 support 1 epo 1 color red").is_err());
    }

    #[test]
    fn distribute_spreads_remainder() {
        assert_eq!(distribute(25, 4), vec![7, 6, 6, 6]);
        assert_eq!(distribute(20, 4), vec![5; 4]);
    }

    #[test]
    fn apps_beyond_one_cycle_stay_distinct_and_valid() {
        let apps = synth_applications(30).unwrap();
        assert_eq!(apps.len(), 30);
        assert_ne!(apps[0].workload, apps[14].workload);
    }
}
