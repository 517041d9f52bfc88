//! Shared domain types for measurement campaigns and their validation rules.
//!
//! Everything here is plain data. A [`Campaign`] is assembled by the readers in
//! [`crate::campaign_io`] or the generator in [`crate::synth`], and checked with
//! [`validate_campaign`] before any scoring happens.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::workload::{OperationClass, OperationKind};

/// Relative tolerance for the `energy_j ≈ avg_power_w · exec_time_s` check.
pub const ENERGY_POWER_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArchClass {
    Cpu,
    Gpu,
    Dsp,
    Fpga,
    Asip,
    Asic,
    Synthetic,
}

impl ArchClass {
    pub const ALL: [ArchClass; 7] = [
        ArchClass::Cpu,
        ArchClass::Gpu,
        ArchClass::Dsp,
        ArchClass::Fpga,
        ArchClass::Asip,
        ArchClass::Asic,
        ArchClass::Synthetic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArchClass::Cpu => "CPU",
            ArchClass::Gpu => "GPU",
            ArchClass::Dsp => "DSP",
            ArchClass::Fpga => "FPGA",
            ArchClass::Asip => "ASIP",
            ArchClass::Asic => "ASIC",
            ArchClass::Synthetic => "SYNTHETIC",
        }
    }
}

impl fmt::Display for ArchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} '{value}'")]
pub struct UnknownToken {
    pub kind: &'static str,
    pub value: String,
}

impl FromStr for ArchClass {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArchClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownToken {
                kind: "arch_class",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemUnderTest {
    pub id: String,
    pub name: String,
    pub arch_class: ArchClass,
    pub area_mm2: Option<f64>,
    pub tdp_watts: Option<f64>,
    pub notes: String,
}

impl SystemUnderTest {
    pub fn new(id: impl Into<String>, arch_class: ArchClass) -> Self {
        let id = id.into();
        SystemUnderTest {
            name: id.clone(),
            id,
            arch_class,
            area_mm2: None,
            tdp_watts: None,
            notes: String::new(),
        }
    }
}

/// Architecture-neutral count of fundamental compute operations for one
/// application.
///
/// Only COMPUTE-kind classes are stored and zero counts are dropped, so two
/// workloads with the same non-zero breakdown compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntrinsicWorkload {
    counts_by_class: BTreeMap<OperationClass, u64>,
    total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorkloadError {
    #[error("no compute operations")]
    NoComputeOperations,
    #[error("class '{0}' is overhead and cannot carry intrinsic work")]
    OverheadClass(OperationClass),
    #[error("operation count overflow")]
    Overflow,
}

impl IntrinsicWorkload {
    /// Builds a workload from per-class counts. Overhead classes are rejected;
    /// a zero total is rejected.
    pub fn from_counts(
        counts: impl IntoIterator<Item = (OperationClass, u64)>,
    ) -> Result<Self, WorkloadError> {
        let mut counts_by_class = BTreeMap::new();
        let mut total: u64 = 0;
        for (class, n) in counts {
            if class.kind() != OperationKind::Compute {
                return Err(WorkloadError::OverheadClass(class));
            }
            if n == 0 {
                continue;
            }
            let slot = counts_by_class.entry(class).or_insert(0u64);
            *slot = slot.checked_add(n).ok_or(WorkloadError::Overflow)?;
            total = total.checked_add(n).ok_or(WorkloadError::Overflow)?;
        }
        if total == 0 {
            return Err(WorkloadError::NoComputeOperations);
        }
        Ok(IntrinsicWorkload {
            counts_by_class,
            total,
        })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts_by_class(&self) -> &BTreeMap<OperationClass, u64> {
        &self.counts_by_class
    }

    pub fn count(&self, class: OperationClass) -> u64 {
        self.counts_by_class.get(&class).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WorkloadProvenance {
    Analytic,
    Extracted,
    Declared,
}

impl WorkloadProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            WorkloadProvenance::Analytic => "ANALYTIC",
            WorkloadProvenance::Extracted => "EXTRACTED",
            WorkloadProvenance::Declared => "DECLARED",
        }
    }
}

impl fmt::Display for WorkloadProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WorkloadProvenance {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            WorkloadProvenance::Analytic,
            WorkloadProvenance::Extracted,
            WorkloadProvenance::Declared,
        ]
        .into_iter()
        .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
        .ok_or_else(|| UnknownToken {
            kind: "provenance",
            value: s.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Application {
    pub id: String,
    pub name: String,
    pub workload: IntrinsicWorkload,
    pub workload_provenance: WorkloadProvenance,
}

/// Outcome of running one application on one system.
///
/// `Unsupported` means the application cannot be mapped onto the system and
/// counts against its flexibility. `Failed` is a measurement error and is
/// treated as a data gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasurementStatus {
    Ok,
    Unsupported,
    Failed,
}

impl MeasurementStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementStatus::Ok => "OK",
            MeasurementStatus::Unsupported => "UNSUPPORTED",
            MeasurementStatus::Failed => "FAILED",
        }
    }
}

impl fmt::Display for MeasurementStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasurementStatus {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            MeasurementStatus::Ok,
            MeasurementStatus::Unsupported,
            MeasurementStatus::Failed,
        ]
        .into_iter()
        .find(|st| st.as_str().eq_ignore_ascii_case(s.trim()))
        .ok_or_else(|| UnknownToken {
            kind: "status",
            value: s.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub system_id: String,
    pub app_id: String,
    pub status: MeasurementStatus,
    pub exec_time_s: Option<f64>,
    pub energy_j: Option<f64>,
    pub avg_power_w: Option<f64>,
}

impl Measurement {
    pub fn ok(system_id: impl Into<String>, app_id: impl Into<String>, exec_time_s: f64) -> Self {
        Measurement {
            system_id: system_id.into(),
            app_id: app_id.into(),
            status: MeasurementStatus::Ok,
            exec_time_s: Some(exec_time_s),
            energy_j: None,
            avg_power_w: None,
        }
    }

    pub fn with_status(
        system_id: impl Into<String>,
        app_id: impl Into<String>,
        status: MeasurementStatus,
    ) -> Self {
        Measurement {
            system_id: system_id.into(),
            app_id: app_id.into(),
            status,
            exec_time_s: None,
            energy_j: None,
            avg_power_w: None,
        }
    }

    /// Energy in joules, taken from `energy_j` or derived as power × time.
    pub fn energy(&self) -> Option<f64> {
        self.energy_j
            .or_else(|| Some(self.avg_power_w? * self.exec_time_s?))
    }
}

/// The uniqueness key for measurements within a campaign.
pub fn dedupe_key(m: &Measurement) -> (&str, &str) {
    (m.system_id.as_str(), m.app_id.as_str())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Campaign {
    pub systems: Vec<SystemUnderTest>,
    pub applications: Vec<Application>,
    pub measurements: Vec<Measurement>,
}

impl Campaign {
    pub fn is_empty(&self) -> bool {
        self.systems.is_empty() && self.applications.is_empty() && self.measurements.is_empty()
    }

    pub fn system(&self, id: &str) -> Option<&SystemUnderTest> {
        self.systems.iter().find(|s| s.id == id)
    }

    pub fn application(&self, id: &str) -> Option<&Application> {
        self.applications.iter().find(|a| a.id == id)
    }

    /// Sorts every list by id (measurements by key) so that two campaigns
    /// holding the same entities compare equal regardless of input order.
    pub fn canonicalize(&mut self) {
        self.systems.sort_by(|a, b| a.id.cmp(&b.id));
        self.applications.sort_by(|a, b| a.id.cmp(&b.id));
        self.measurements
            .sort_by(|a, b| dedupe_key(a).cmp(&dedupe_key(b)));
    }
}

/// The entity a [`Violation`] is about.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityRef {
    System(String),
    Application(String),
    Measurement { system_id: String, app_id: String },
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityRef::System(id) => write!(f, "system '{id}'"),
            EntityRef::Application(id) => write!(f, "application '{id}'"),
            EntityRef::Measurement { system_id, app_id } => {
                write!(f, "measurement ('{system_id}', '{app_id}')")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    InvalidId,
    DuplicateSystemId,
    DuplicateApplicationId,
    NonPositiveArea,
    NonPositiveTdp,
    EmptyWorkload,
    InconsistentWorkload,
    UnknownSystem,
    UnknownApplication,
    DuplicateMeasurement,
    MissingExecTime,
    NonPositiveExecTime,
    NonPositiveEnergy,
    NonPositivePower,
    EnergyPowerMismatch,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::InvalidId => "id must be a non-empty token without whitespace or commas",
            Rule::DuplicateSystemId => "system id must be unique",
            Rule::DuplicateApplicationId => "application id must be unique",
            Rule::NonPositiveArea => "area_mm2 must be positive when present",
            Rule::NonPositiveTdp => "tdp_watts must be positive when present",
            Rule::EmptyWorkload => "workload total must be positive",
            Rule::InconsistentWorkload => {
                "workload total must equal the sum of its compute-class counts"
            }
            Rule::UnknownSystem => "measurement references an unknown system id",
            Rule::UnknownApplication => "measurement references an unknown application id",
            Rule::DuplicateMeasurement => "at most one measurement per (system, app) pair",
            Rule::MissingExecTime => "status OK requires exec_time_s",
            Rule::NonPositiveExecTime => "exec_time_s must be positive",
            Rule::NonPositiveEnergy => "energy_j must be positive when present",
            Rule::NonPositivePower => "avg_power_w must be positive when present",
            Rule::EnergyPowerMismatch => "energy_j and avg_power_w * exec_time_s differ by more than 1%",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub entity: EntityRef,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule.describe())?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

fn is_token(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(|c| c.is_whitespace() || c == ',' || c == '#')
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// True when `energy_j` and `avg_power_w * exec_time_s` differ by more than
/// [`ENERGY_POWER_TOLERANCE`] relative to `energy_j`.
pub fn energy_power_mismatch(energy_j: f64, avg_power_w: f64, exec_time_s: f64) -> bool {
    let derived = avg_power_w * exec_time_s;
    (energy_j - derived).abs() > ENERGY_POWER_TOLERANCE * energy_j.abs()
}

/// Checks every campaign invariant and returns the violations found, sorted.
///
/// The result does not depend on the order of the campaign's lists.
pub fn validate_campaign(c: &Campaign) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    let mut push = |entity: EntityRef, rule: Rule, detail: String| {
        out.insert(Violation {
            entity,
            rule,
            detail,
        });
    };

    let mut system_ids: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &c.systems {
        *system_ids.entry(s.id.as_str()).or_default() += 1;
        let e = || EntityRef::System(s.id.clone());
        if !is_token(&s.id) {
            push(e(), Rule::InvalidId, String::new());
        }
        if let Some(a) = s.area_mm2 {
            if !positive(a) {
                push(e(), Rule::NonPositiveArea, format!("area_mm2 = {a}"));
            }
        }
        if let Some(t) = s.tdp_watts {
            if !positive(t) {
                push(e(), Rule::NonPositiveTdp, format!("tdp_watts = {t}"));
            }
        }
    }
    for (id, n) in &system_ids {
        if *n > 1 {
            push(
                EntityRef::System(id.to_string()),
                Rule::DuplicateSystemId,
                format!("{n} occurrences"),
            );
        }
    }

    let mut app_ids: BTreeMap<&str, usize> = BTreeMap::new();
    for a in &c.applications {
        *app_ids.entry(a.id.as_str()).or_default() += 1;
        let e = || EntityRef::Application(a.id.clone());
        if !is_token(&a.id) {
            push(e(), Rule::InvalidId, String::new());
        }
        let w = &a.workload;
        if w.total() == 0 {
            push(e(), Rule::EmptyWorkload, String::new());
        }
        let sum: u128 = w.counts_by_class().values().map(|&n| n as u128).sum();
        let all_compute = w
            .counts_by_class()
            .keys()
            .all(|c| c.kind() == OperationKind::Compute);
        if sum != w.total() as u128 || !all_compute {
            push(e(), Rule::InconsistentWorkload, String::new());
        }
    }
    for (id, n) in &app_ids {
        if *n > 1 {
            push(
                EntityRef::Application(id.to_string()),
                Rule::DuplicateApplicationId,
                format!("{n} occurrences"),
            );
        }
    }

    let mut keys: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for m in &c.measurements {
        *keys.entry(dedupe_key(m)).or_default() += 1;
        let e = || EntityRef::Measurement {
            system_id: m.system_id.clone(),
            app_id: m.app_id.clone(),
        };
        if !system_ids.contains_key(m.system_id.as_str()) {
            push(e(), Rule::UnknownSystem, format!("unknown system id '{}'", m.system_id));
        }
        if !app_ids.contains_key(m.app_id.as_str()) {
            push(
                e(),
                Rule::UnknownApplication,
                format!("unknown application id '{}'", m.app_id),
            );
        }
        match m.exec_time_s {
            None if m.status == MeasurementStatus::Ok => {
                push(e(), Rule::MissingExecTime, String::new())
            }
            Some(t) if !positive(t) => {
                push(e(), Rule::NonPositiveExecTime, format!("exec_time_s = {t}"))
            }
            _ => {}
        }
        if let Some(en) = m.energy_j {
            if !positive(en) {
                push(e(), Rule::NonPositiveEnergy, format!("energy_j = {en}"));
            }
        }
        if let Some(p) = m.avg_power_w {
            if !positive(p) {
                push(e(), Rule::NonPositivePower, format!("avg_power_w = {p}"));
            }
        }
        if let (Some(en), Some(p), Some(t)) = (m.energy_j, m.avg_power_w, m.exec_time_s) {
            if positive(en) && positive(p) && positive(t) && energy_power_mismatch(en, p, t) {
                push(
                    e(),
                    Rule::EnergyPowerMismatch,
                    format!("energy_j = {en}, avg_power_w * exec_time_s = {}", p * t),
                );
            }
        }
    }
    for ((s, a), n) in &keys {
        if *n > 1 {
            push(
                EntityRef::Measurement {
                    system_id: s.to_string(),
                    app_id: a.to_string(),
                },
                Rule::DuplicateMeasurement,
                format!("{n} occurrences"),
            );
        }
    }

    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn workload(n: u64) -> IntrinsicWorkload {
        IntrinsicWorkload::from_counts([(OperationClass::FpAdd, n)]).unwrap()
    }

    fn app(id: &str) -> Application {
        Application {
            id: id.into(),
            name: id.into(),
            workload: workload(100),
            workload_provenance: WorkloadProvenance::Declared,
        }
    }

    fn grid(n_sys: usize, n_app: usize) -> Campaign {
        let mut c = Campaign::default();
        for i in 0..n_sys {
            c.systems.push(SystemUnderTest::new(format!("s{i}"), ArchClass::Cpu));
        }
        for j in 0..n_app {
            c.applications.push(app(&format!("a{j}")));
        }
        for i in 0..n_sys {
            for j in 0..n_app {
                c.measurements
                    .push(Measurement::ok(format!("s{i}"), format!("a{j}"), 1.0 + j as f64));
            }
        }
        c
    }

    #[test]
    fn full_grid_is_valid() {
        let c = grid(25, 14);
        assert_eq!(c.measurements.len(), 350);
        assert!(validate_campaign(&c).is_empty());
    }

    #[test]
    fn empty_campaign_is_valid() {
        assert!(validate_campaign(&Campaign::default()).is_empty());
    }

    #[test]
    fn unknown_system_is_named() {
        let mut c = grid(1, 1);
        c.measurements.push(Measurement::ok("x9", "a0", 1.0));
        let v = validate_campaign(&c);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::UnknownSystem);
        assert!(v[0].to_string().contains("x9"));
    }

    #[test]
    fn dedupe_key_projects_ids() {
        let m = Measurement::ok("cpu1", "fir", 1.0);
        assert_eq!(dedupe_key(&m), ("cpu1", "fir"));
        let other = Measurement::ok("cpu1", "fft", 1.0);
        assert_ne!(dedupe_key(&m), dedupe_key(&other));
    }

    #[test]
    fn duplicate_measurement_reported() {
        let mut c = grid(1, 1);
        c.measurements.push(Measurement::ok("s0", "a0", 3.0));
        let v = validate_campaign(&c);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::DuplicateMeasurement);
    }

    #[test]
    fn duplicate_ids_reported() {
        let mut c = grid(1, 1);
        c.systems.push(SystemUnderTest::new("s0", ArchClass::Gpu));
        c.applications.push(app("a0"));
        let rules: Vec<Rule> = validate_campaign(&c).into_iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::DuplicateSystemId));
        assert!(rules.contains(&Rule::DuplicateApplicationId));
    }

    #[test]
    fn ok_requires_exec_time() {
        let mut c = grid(1, 1);
        c.measurements[0].exec_time_s = None;
        let v = validate_campaign(&c);
        assert_eq!(v[0].rule, Rule::MissingExecTime);

        c.measurements[0].status = MeasurementStatus::Unsupported;
        assert!(validate_campaign(&c).is_empty());
    }

    #[test]
    fn optional_fields_must_be_positive() {
        let mut c = grid(1, 1);
        c.systems[0].area_mm2 = Some(0.0);
        c.systems[0].tdp_watts = Some(-1.0);
        c.measurements[0].energy_j = Some(f64::NAN);
        let rules: BTreeSet<Rule> = validate_campaign(&c).into_iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::NonPositiveArea));
        assert!(rules.contains(&Rule::NonPositiveTdp));
        assert!(rules.contains(&Rule::NonPositiveEnergy));
    }

    #[test]
    fn energy_power_check_triggers_above_one_percent() {
        // E = 100 J, T = 1 s; P = 101 W is exactly 1% off, 101.01 W is not.
        assert!(!energy_power_mismatch(100.0, 101.0, 1.0));
        assert!(!energy_power_mismatch(100.0, 99.0, 1.0));
        assert!(energy_power_mismatch(100.0, 101.01, 1.0));
        assert!(energy_power_mismatch(100.0, 98.99, 1.0));

        let mut c = grid(1, 1);
        c.measurements[0].energy_j = Some(2.0);
        c.measurements[0].avg_power_w = Some(2.0);
        assert!(validate_campaign(&c).is_empty());
        c.measurements[0].avg_power_w = Some(2.1);
        assert_eq!(validate_campaign(&c)[0].rule, Rule::EnergyPowerMismatch);
    }

    #[test]
    fn ids_must_be_tokens() {
        let mut c = grid(1, 1);
        c.systems.push(SystemUnderTest::new("bad id", ArchClass::Cpu));
        let v = validate_campaign(&c);
        assert_eq!(v[0].rule, Rule::InvalidId);
    }

    #[test]
    fn workload_rejects_overhead_and_zero() {
        assert_eq!(
            IntrinsicWorkload::from_counts([(OperationClass::MemMove, 3)]),
            Err(WorkloadError::OverheadClass(OperationClass::MemMove))
        );
        assert_eq!(
            IntrinsicWorkload::from_counts([(OperationClass::FpMul, 0)]),
            Err(WorkloadError::NoComputeOperations)
        );
        let w = IntrinsicWorkload::from_counts([
            (OperationClass::FpMul, 64),
            (OperationClass::FpAdd, 48),
            (OperationClass::FpAdd, 0),
        ])
        .unwrap();
        assert_eq!(w.total(), 112);
        assert_eq!(w.counts_by_class().len(), 2);
    }

    #[test]
    fn tokens_parse_case_insensitively() {
        assert_eq!("gpu".parse::<ArchClass>().unwrap(), ArchClass::Gpu);
        assert_eq!("Failed".parse::<MeasurementStatus>().unwrap(), MeasurementStatus::Failed);
        assert!("tpu".parse::<ArchClass>().is_err());
    }
}
