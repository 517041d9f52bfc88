//! Normalized performance, flexibility, versatility and efficiency figures.
//!
//! Performance is normalized by intrinsic workload, giving intrinsic
//! operations per second that are comparable across architectures. A system's
//! flexibility is a unitless score in `[0, 1]` describing how uniformly it
//! performs over the applications in scope:
//!
//! * [`FlexibilityEstimator::GmOverAm`] (default): geometric mean over
//!   arithmetic mean. Any unsupported application (a zero) collapses it to 0.
//! * [`FlexibilityEstimator::GmOverMax`]: geometric mean over the maximum.
//! * [`FlexibilityEstimator::InvOnePlusCv`]: `1 / (1 + σ/μ)` over the
//!   supported entries only.
//!
//! All three are degree-0 homogeneous, so rescaling a row (changing workload
//! units, say) leaves the score unchanged.
//!
//! ```
//! use flexmeter::metrics::{flexibility, FlexibilityEstimator};
//!
//! let f = flexibility(&[2.0, 8.0], FlexibilityEstimator::GmOverAm).unwrap();
//! assert!((f - 0.8).abs() < 1e-12);
//! ```

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::model::{
    validate_campaign, ArchClass, Campaign, IntrinsicWorkload, Measurement, MeasurementStatus,
    SystemUnderTest, UnknownToken, Violation,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("measurement for ('{system_id}', '{app_id}') failed; treated as a data gap")]
    DataGap { system_id: String, app_id: String },
    #[error("measurement for ('{system_id}', '{app_id}') has no positive exec_time_s")]
    MissingTime { system_id: String, app_id: String },
    #[error("performance row is empty")]
    EmptyRow,
    #[error("performance entry {index} is {value}; entries must be finite and non-negative")]
    BadEntry { index: usize, value: f64 },
    #[error("campaign is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidCampaign(Vec<Violation>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FlexibilityEstimator {
    #[default]
    GmOverAm,
    GmOverMax,
    InvOnePlusCv,
}

impl FlexibilityEstimator {
    pub const ALL: [FlexibilityEstimator; 3] = [
        FlexibilityEstimator::GmOverAm,
        FlexibilityEstimator::GmOverMax,
        FlexibilityEstimator::InvOnePlusCv,
    ];

    pub fn flag(self) -> &'static str {
        match self {
            FlexibilityEstimator::GmOverAm => "gm_am",
            FlexibilityEstimator::GmOverMax => "gm_max",
            FlexibilityEstimator::InvOnePlusCv => "inv_cv",
        }
    }
}

impl fmt::Display for FlexibilityEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for FlexibilityEstimator {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FlexibilityEstimator::ALL
            .into_iter()
            .find(|e| e.flag() == s)
            .ok_or_else(|| UnknownToken {
                kind: "estimator",
                value: s.to_string(),
            })
    }
}

/// One cell of the performance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerfEntry {
    Supported(f64),
    Unsupported,
}

impl PerfEntry {
    pub fn value(self) -> f64 {
        match self {
            PerfEntry::Supported(v) => v,
            PerfEntry::Unsupported => 0.0,
        }
    }

    pub fn is_supported(self) -> bool {
        matches!(self, PerfEntry::Supported(_))
    }
}

/// Intrinsic operations per second for one measurement.
pub fn normalized_performance(
    w: &IntrinsicWorkload,
    m: &Measurement,
) -> Result<PerfEntry, MetricsError> {
    match m.status {
        MeasurementStatus::Unsupported => Ok(PerfEntry::Unsupported),
        MeasurementStatus::Failed => Err(MetricsError::DataGap {
            system_id: m.system_id.clone(),
            app_id: m.app_id.clone(),
        }),
        MeasurementStatus::Ok => match m.exec_time_s {
            Some(t) if t > 0.0 && t.is_finite() => Ok(PerfEntry::Supported(w.total() as f64 / t)),
            _ => Err(MetricsError::MissingTime {
                system_id: m.system_id.clone(),
                app_id: m.app_id.clone(),
            }),
        },
    }
}

/// Intrinsic operations per joule, or `None` without energy data.
pub fn energy_efficiency(w: &IntrinsicWorkload, m: &Measurement) -> Option<f64> {
    if m.status != MeasurementStatus::Ok {
        return None;
    }
    let e = m.energy()?;
    (e > 0.0 && e.is_finite()).then(|| w.total() as f64 / e)
}

/// Peak intrinsic operations per second per mm², or `None` without area.
pub fn area_efficiency(peak_perf: f64, s: &SystemUnderTest) -> Option<f64> {
    s.area_mm2.map(|a| peak_perf / a)
}

/// How FAILED or missing (system, app) pairs are handled when scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapPolicy {
    /// Drop an application for every system if any system has a gap on it.
    #[default]
    ExcludeColumn,
    /// Drop gaps per system only. Scores are then computed over different
    /// application sets and are marked non-comparable.
    PerSystem,
}

/// Systems × applications grid of normalized performance.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    pub system_ids: Vec<String>,
    pub app_ids: Vec<String>,
    /// Intrinsic ops/s; 0 where unsupported or a gap.
    pub perf: Vec<Vec<f64>>,
    pub supported: Vec<Vec<bool>>,
    /// FAILED or missing measurements.
    pub gap: Vec<Vec<bool>>,
    /// Energy efficiency (ops/J) of each supported cell, where known.
    pub energy_eff: Vec<Vec<Option<f64>>>,
    energy_j: Vec<Vec<Option<f64>>>,
    workload: Vec<u64>,
}

impl PerformanceMatrix {
    pub fn n_systems(&self) -> usize {
        self.system_ids.len()
    }

    pub fn n_apps(&self) -> usize {
        self.app_ids.len()
    }

    /// Column indices scored for system `i` under `policy`.
    pub fn scope(&self, i: usize, policy: GapPolicy) -> Vec<usize> {
        (0..self.n_apps())
            .filter(|&j| match policy {
                GapPolicy::ExcludeColumn => !self.gap.iter().any(|row| row[j]),
                GapPolicy::PerSystem => !self.gap[i][j],
            })
            .collect()
    }

    pub fn has_gaps(&self) -> bool {
        self.gap.iter().flatten().any(|&g| g)
    }
}

/// Builds the performance matrix of a valid campaign. Rows follow system id
/// order and columns application id order.
pub fn build_matrix(c: &Campaign) -> Result<PerformanceMatrix, MetricsError> {
    let violations = validate_campaign(c);
    if !violations.is_empty() {
        return Err(MetricsError::InvalidCampaign(violations));
    }
    let mut systems: Vec<&SystemUnderTest> = c.systems.iter().collect();
    systems.sort_by(|a, b| a.id.cmp(&b.id));
    let mut apps: Vec<_> = c.applications.iter().collect();
    apps.sort_by(|a, b| a.id.cmp(&b.id));

    let sys_idx: BTreeMap<&str, usize> =
        systems.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let app_idx: BTreeMap<&str, usize> =
        apps.iter().enumerate().map(|(j, a)| (a.id.as_str(), j)).collect();

    let (ns, na) = (systems.len(), apps.len());
    let mut perf = vec![vec![0.0; na]; ns];
    let mut supported = vec![vec![false; na]; ns];
    let mut gap = vec![vec![true; na]; ns];
    let mut energy_eff = vec![vec![None; na]; ns];
    let mut energy_j = vec![vec![None; na]; ns];

    for m in &c.measurements {
        let (i, j) = (sys_idx[m.system_id.as_str()], app_idx[m.app_id.as_str()]);
        let w = &apps[j].workload;
        match normalized_performance(w, m) {
            Ok(PerfEntry::Supported(p)) => {
                perf[i][j] = p;
                supported[i][j] = true;
                gap[i][j] = false;
                energy_eff[i][j] = energy_efficiency(w, m);
                energy_j[i][j] = energy_eff[i][j].and(m.energy());
            }
            Ok(PerfEntry::Unsupported) => gap[i][j] = false,
            Err(_) => {}
        }
    }

    Ok(PerformanceMatrix {
        system_ids: systems.iter().map(|s| s.id.clone()).collect(),
        app_ids: apps.iter().map(|a| a.id.clone()).collect(),
        perf,
        supported,
        gap,
        energy_eff,
        energy_j,
        workload: apps.iter().map(|a| a.workload.total()).collect(),
    })
}

fn check_row(row: &[f64]) -> Result<(), MetricsError> {
    if row.is_empty() {
        return Err(MetricsError::EmptyRow);
    }
    match row.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(index) => Err(MetricsError::BadEntry {
            index,
            value: row[index],
        }),
        None => Ok(()),
    }
}

/// Geometric mean computed as `exp(mean(ln x))`. A zero entry short-circuits
/// to 0 without taking logarithms.
pub fn geometric_mean(row: &[f64]) -> Result<f64, MetricsError> {
    check_row(row)?;
    if row.contains(&0.0) {
        return Ok(0.0);
    }
    let max = row.iter().copied().fold(0.0, f64::max);
    Ok(max * relative_gm(&sorted_relative(row, max)))
}

/// Geometric mean of a row already divided by its maximum, so uniform rows
/// give exactly 1.
fn relative_gm(rel: &[f64]) -> f64 {
    let mean_log = rel.iter().map(|r| r.ln()).sum::<f64>() / rel.len() as f64;
    mean_log.exp()
}

/// `row / max` in ascending order. Summing in a fixed order makes the
/// estimators exactly invariant under permutation of the row.
fn sorted_relative(row: &[f64], max: f64) -> Vec<f64> {
    let mut rel: Vec<f64> = row.iter().map(|&x| x / max).collect();
    rel.sort_by(f64::total_cmp);
    rel
}

/// Flexibility score in `[0, 1]` of one performance row. Zeros mark
/// unsupported applications.
///
/// All estimators work on the row divided by its maximum, which cancels in
/// every ratio, so uniform rows score exactly 1.
pub fn flexibility(row: &[f64], e: FlexibilityEstimator) -> Result<f64, MetricsError> {
    check_row(row)?;
    let max = row.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    let rel = sorted_relative(row, max);
    let score = match e {
        FlexibilityEstimator::GmOverAm | FlexibilityEstimator::GmOverMax if rel[0] == 0.0 => 0.0,
        FlexibilityEstimator::GmOverAm => {
            let am = rel.iter().sum::<f64>() / rel.len() as f64;
            relative_gm(&rel) / am
        }
        FlexibilityEstimator::GmOverMax => relative_gm(&rel),
        FlexibilityEstimator::InvOnePlusCv => {
            let rel: Vec<f64> = rel.into_iter().filter(|&r| r > 0.0).collect();
            let n = rel.len() as f64;
            let mean = rel.iter().sum::<f64>() / n;
            let var = rel.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
            1.0 / (1.0 + var.sqrt() / mean)
        }
    };
    Ok(score.clamp(0.0, 1.0))
}

/// Fraction of applications supported (positive entries).
pub fn versatility(row: &[f64]) -> Result<f64, MetricsError> {
    check_row(row)?;
    Ok(row.iter().filter(|&&x| x > 0.0).count() as f64 / row.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemScore {
    pub system_id: String,
    pub arch_class: ArchClass,
    pub flexibility: f64,
    pub versatility: f64,
    pub peak_perf: f64,
    pub mean_perf: f64,
    pub energy_eff: Option<f64>,
    pub area_eff: Option<f64>,
    /// Applications the score was computed over.
    pub apps_in_scope: usize,
    /// False when gaps left systems scored over different application sets.
    pub comparable: bool,
}

/// Scores every system of a campaign with the default gap policy.
pub fn score_campaign(
    c: &Campaign,
    e: FlexibilityEstimator,
) -> Result<Vec<SystemScore>, MetricsError> {
    score_campaign_with(c, e, GapPolicy::default())
}

/// Scores every system; output is sorted by system id.
///
/// `energy_eff` is the suite-level ratio of intrinsic operations to joules
/// over the supported in-scope applications, present only when every one of
/// them has energy data. A system with no application in scope scores 0.
pub fn score_campaign_with(
    c: &Campaign,
    e: FlexibilityEstimator,
    policy: GapPolicy,
) -> Result<Vec<SystemScore>, MetricsError> {
    let m = build_matrix(c)?;
    let scopes: Vec<Vec<usize>> = (0..m.n_systems()).map(|i| m.scope(i, policy)).collect();
    let comparable = scopes.windows(2).all(|w| w[0] == w[1]);
    let mut out = Vec::with_capacity(m.n_systems());
    for (i, id) in m.system_ids.iter().enumerate() {
        let scope = &scopes[i];
        let row: Vec<f64> = scope.iter().map(|&j| m.perf[i][j]).collect();
        let (flex, vers) = if row.is_empty() {
            (0.0, 0.0)
        } else {
            (flexibility(&row, e)?, versatility(&row)?)
        };
        let supported: Vec<usize> = scope.iter().copied().filter(|&j| m.supported[i][j]).collect();
        let peak_perf = supported.iter().map(|&j| m.perf[i][j]).fold(0.0, f64::max);
        let mean_perf = if supported.is_empty() {
            0.0
        } else {
            supported.iter().map(|&j| m.perf[i][j]).sum::<f64>() / supported.len() as f64
        };
        let energy_eff = if supported.is_empty() {
            None
        } else {
            supported
                .iter()
                .map(|&j| m.energy_j[i][j])
                .sum::<Option<f64>>()
                .map(|joules| {
                    supported.iter().map(|&j| m.workload[j] as f64).sum::<f64>() / joules
                })
        };
        let system = c.system(id).expect("matrix rows come from campaign systems");
        out.push(SystemScore {
            system_id: id.clone(),
            arch_class: system.arch_class,
            flexibility: flex,
            versatility: vers,
            peak_perf,
            mean_perf,
            energy_eff,
            area_eff: area_efficiency(peak_perf, system),
            apps_in_scope: scope.len(),
            comparable,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankKey {
    Flexibility,
    PeakPerf,
    EnergyEff,
}

impl RankKey {
    pub const ALL: [RankKey; 3] = [RankKey::Flexibility, RankKey::PeakPerf, RankKey::EnergyEff];

    pub fn name(self) -> &'static str {
        match self {
            RankKey::Flexibility => "flexibility",
            RankKey::PeakPerf => "peak_perf",
            RankKey::EnergyEff => "energy_eff",
        }
    }

    pub fn value(self, s: &SystemScore) -> Option<f64> {
        match self {
            RankKey::Flexibility => Some(s.flexibility),
            RankKey::PeakPerf => Some(s.peak_perf),
            RankKey::EnergyEff => s.energy_eff,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    pub system_id: String,
    pub value: Option<f64>,
    /// The ranking key was missing for this system; it is placed last.
    pub flagged: bool,
}

/// Descending order by `key`, ties broken by ascending system id, systems
/// missing the key last (also by id) and flagged.
pub fn rank_systems(scores: &[SystemScore], key: RankKey) -> Vec<Ranked> {
    let mut ranked: Vec<Ranked> = scores
        .iter()
        .map(|s| {
            let value = key.value(s);
            Ranked {
                system_id: s.system_id.clone(),
                value,
                flagged: value.is_none(),
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        let by_value = match (a.value, b.value) {
            (Some(x), Some(y)) => y.total_cmp(&x),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        by_value.then_with(|| a.system_id.cmp(&b.system_id))
    });
    ranked
}
