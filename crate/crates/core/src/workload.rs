//! Intrinsic workload extraction.
//!
//! An [`OperationProfile`] holds dynamic execution counts per mnemonic. A
//! [`ClassificationTable`] maps each mnemonic to an [`OperationClass`]; the
//! COMPUTE classes (arithmetic, logic and compares on algorithm data) form the
//! intrinsic workload, while memory moves, address arithmetic and control flow
//! are overhead of one particular mapping and are excluded.
//!
//! ```
//! use flexmeter::workload::{classify, default_table, intrinsic_workload, parse_profile};
//!
//! let profile = parse_profile("op fmul 64\nop fadd 48\nop ld 128\nop st 16\n").unwrap();
//! let classes = classify(&profile, &default_table());
//! let extraction = intrinsic_workload(&classes).unwrap();
//! assert_eq!(extraction.workload.total(), 112);
//! assert_eq!(extraction.excluded_total, 144);
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::model::{IntrinsicWorkload, UnknownToken, WorkloadError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperationKind {
    Compute,
    Overhead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperationClass {
    IntAdd,
    IntMul,
    IntDiv,
    FpAdd,
    FpMul,
    FpDiv,
    Logic,
    Compare,
    MemMove,
    AddrCalc,
    Control,
    OtherOverhead,
}

impl OperationClass {
    pub const ALL: [OperationClass; 12] = [
        OperationClass::IntAdd,
        OperationClass::IntMul,
        OperationClass::IntDiv,
        OperationClass::FpAdd,
        OperationClass::FpMul,
        OperationClass::FpDiv,
        OperationClass::Logic,
        OperationClass::Compare,
        OperationClass::MemMove,
        OperationClass::AddrCalc,
        OperationClass::Control,
        OperationClass::OtherOverhead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperationClass::IntAdd => "int_add",
            OperationClass::IntMul => "int_mul",
            OperationClass::IntDiv => "int_div",
            OperationClass::FpAdd => "fp_add",
            OperationClass::FpMul => "fp_mul",
            OperationClass::FpDiv => "fp_div",
            OperationClass::Logic => "logic",
            OperationClass::Compare => "compare",
            OperationClass::MemMove => "mem_move",
            OperationClass::AddrCalc => "addr_calc",
            OperationClass::Control => "control",
            OperationClass::OtherOverhead => "other_overhead",
        }
    }

    pub fn kind(self) -> OperationKind {
        match self {
            OperationClass::MemMove
            | OperationClass::AddrCalc
            | OperationClass::Control
            | OperationClass::OtherOverhead => OperationKind::Overhead,
            _ => OperationKind::Compute,
        }
    }

    pub fn is_compute(self) -> bool {
        self.kind() == OperationKind::Compute
    }
}

impl fmt::Display for OperationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperationClass {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperationClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownToken {
                kind: "operation class",
                value: s.to_string(),
            })
    }
}

/// Aggregated dynamic operation counts for one application run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperationProfile {
    entries: BTreeMap<String, u64>,
    pub source: String,
}

impl OperationProfile {
    pub fn new(source: impl Into<String>) -> Self {
        OperationProfile {
            entries: BTreeMap::new(),
            source: source.into(),
        }
    }

    /// Adds `count` executions of `mnemonic` (lower-cased). Returns `false` on
    /// overflow or an empty mnemonic, leaving the profile unchanged.
    pub fn add(&mut self, mnemonic: &str, count: u64) -> bool {
        let key = mnemonic.trim().to_lowercase();
        if key.is_empty() {
            return false;
        }
        let slot = self.entries.entry(key).or_insert(0);
        match slot.checked_add(count) {
            Some(v) => {
                *slot = v;
                true
            }
            None => false,
        }
    }

    pub fn entries(&self) -> &BTreeMap<String, u64> {
        &self.entries
    }

    pub fn get(&self, mnemonic: &str) -> u64 {
        self.entries.get(mnemonic).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.entries.values().map(|&n| n as u128).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Renders the profile in the line format read by [`parse_profile`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.source.is_empty() {
            out.push_str("# source: ");
            out.push_str(&self.source.replace('\n', " "));
            out.push('\n');
        }
        for (m, n) in &self.entries {
            out.push_str(&format!("op {m} {n}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_count(tok: &str, line: usize) -> Result<u64, ParseError> {
    if tok.starts_with('-') {
        return Err(ParseError::new(line, format!("negative count '{tok}'")));
    }
    tok.parse::<u64>()
        .map_err(|_| ParseError::new(line, format!("count '{tok}' is not a non-negative integer")))
}

/// Parses the `op <mnemonic> <count>` profile format. Duplicate mnemonics are
/// summed.
pub fn parse_profile(text: &str) -> Result<OperationProfile, ParseError> {
    let mut profile = OperationProfile::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        match toks.as_slice() {
            [] => continue,
            ["op", mnemonic, count] => {
                let n = parse_count(count, line_no)?;
                if !profile.add(mnemonic, n) {
                    return Err(ParseError::new(line_no, format!("count overflow for '{mnemonic}'")));
                }
            }
            ["op", ..] => {
                return Err(ParseError::new(
                    line_no,
                    format!("expected 'op <mnemonic> <count>', found {} fields", toks.len()),
                ))
            }
            [other, ..] => {
                return Err(ParseError::new(line_no, format!("unknown directive '{other}'")))
            }
        }
    }
    Ok(profile)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Exact(String),
    Prefix(String),
}

impl Pattern {
    pub fn parse(s: &str) -> Pattern {
        let s = s.to_lowercase();
        match s.strip_suffix('*') {
            Some(p) => Pattern::Prefix(p.to_string()),
            None => Pattern::Exact(s),
        }
    }

    pub fn matches(&self, mnemonic: &str) -> bool {
        match self {
            Pattern::Exact(p) => p == mnemonic,
            Pattern::Prefix(p) => mnemonic.starts_with(p.as_str()),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Exact(p) => f.write_str(p),
            Pattern::Prefix(p) => write!(f, "{p}*"),
        }
    }
}

/// Ordered mnemonic-to-class rules. The first matching rule wins and
/// `default_class` catches everything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationTable {
    pub rules: Vec<(Pattern, OperationClass)>,
    pub default_class: OperationClass,
}

impl ClassificationTable {
    pub fn lookup(&self, mnemonic: &str) -> OperationClass {
        let m = mnemonic.to_lowercase();
        self.rules
            .iter()
            .find(|(p, _)| p.matches(&m))
            .map(|(_, c)| *c)
            .unwrap_or(self.default_class)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in &self.rules {
            out.push_str(&format!("class {p} {c}\n"));
        }
        out.push_str(&format!("default {}\n", self.default_class));
        out
    }
}

/// Parses `class <pattern> <class_name>` lines plus exactly one
/// `default <class_name>` line.
pub fn parse_table(text: &str) -> Result<ClassificationTable, ParseError> {
    let mut rules = Vec::new();
    let mut default_class = None;
    let class_of = |tok: &str, line: usize| {
        tok.parse::<OperationClass>()
            .map_err(|e| ParseError::new(line, e.to_string()))
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        match toks.as_slice() {
            [] => continue,
            ["class", pattern, class] => {
                if pattern.trim_end_matches('*').is_empty() && !pattern.ends_with('*') {
                    return Err(ParseError::new(line_no, "empty pattern"));
                }
                rules.push((Pattern::parse(pattern), class_of(class, line_no)?));
            }
            ["default", class] => {
                if default_class.is_some() {
                    return Err(ParseError::new(line_no, "more than one 'default' line"));
                }
                default_class = Some(class_of(class, line_no)?);
            }
            [d @ ("class" | "default"), ..] => {
                return Err(ParseError::new(line_no, format!("wrong number of fields for '{d}'")))
            }
            [other, ..] => {
                return Err(ParseError::new(line_no, format!("unknown directive '{other}'")))
            }
        }
    }
    let default_class = default_class
        .ok_or_else(|| ParseError::new(text.lines().count().max(1), "missing 'default' line"))?;
    Ok(ClassificationTable {
        rules,
        default_class,
    })
}

/// The bundled table for common scalar mnemonics.
pub fn default_table() -> ClassificationTable {
    use OperationClass::*;
    let exact: &[(&str, OperationClass)] = &[
        ("add", IntAdd),
        ("sub", IntAdd),
        ("mul", IntMul),
        ("div", IntDiv),
        ("rem", IntDiv),
        ("fadd", FpAdd),
        ("fsub", FpAdd),
        ("fmul", FpMul),
        ("fdiv", FpDiv),
        ("and", Logic),
        ("or", Logic),
        ("xor", Logic),
        ("not", Logic),
        ("shl", Logic),
        ("shr", Logic),
        ("cmp", Compare),
        ("fcmp", Compare),
        ("ld", MemMove),
        ("load", MemMove),
        ("st", MemMove),
        ("store", MemMove),
        ("mov", MemMove),
        ("br", Control),
        ("jmp", Control),
        ("call", Control),
        ("ret", Control),
        ("lea", AddrCalc),
        ("addr", AddrCalc),
    ];
    let prefix: &[(&str, OperationClass)] = &[
        ("fcmp", Compare),
        ("cmp", Compare),
        ("ld", MemMove),
        ("st", MemMove),
        ("b", Control),
        ("j", Control),
    ];
    let mut rules: Vec<(Pattern, OperationClass)> = exact
        .iter()
        .map(|(m, c)| (Pattern::Exact(m.to_string()), *c))
        .collect();
    rules.extend(
        prefix
            .iter()
            .map(|(m, c)| (Pattern::Prefix(m.to_string()), *c)),
    );
    ClassificationTable {
        rules,
        default_class: OtherOverhead,
    }
}

/// Assigns every profile count to exactly one class.
pub fn classify(p: &OperationProfile, t: &ClassificationTable) -> BTreeMap<OperationClass, u128> {
    let mut out = BTreeMap::new();
    for (m, &n) in p.entries() {
        *out.entry(t.lookup(m)).or_insert(0u128) += n as u128;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub workload: IntrinsicWorkload,
    /// Operations in OVERHEAD classes, reported but not counted.
    pub excluded_total: u128,
}

/// Keeps the COMPUTE classes of a classified profile as the intrinsic
/// workload.
pub fn intrinsic_workload(
    classified: &BTreeMap<OperationClass, u128>,
) -> Result<Extraction, WorkloadError> {
    let mut excluded_total = 0u128;
    let mut compute = Vec::new();
    for (&class, &n) in classified {
        if class.is_compute() {
            compute.push((class, u64::try_from(n).map_err(|_| WorkloadError::Overflow)?));
        } else {
            excluded_total += n;
        }
    }
    Ok(Extraction {
        workload: IntrinsicWorkload::from_counts(compute)?,
        excluded_total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSpec {
    Matmul { n: u64 },
    Fir { n_samples: u64, k_taps: u64 },
    Dot { n: u64 },
    Fft { n: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("kernel parameter '{0}' must be positive")]
    NonPositive(&'static str),
    #[error("FFT size {0} is not a power of two")]
    NotPowerOfTwo(u64),
    #[error("FFT size must be at least 2")]
    FftTooSmall,
    #[error("kernel operation count overflow")]
    Overflow,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            KernelSpec::Matmul { n } | KernelSpec::Dot { n } if n == 0 => {
                Err(KernelError::NonPositive("n"))
            }
            KernelSpec::Fir { n_samples: 0, .. } => Err(KernelError::NonPositive("n_samples")),
            KernelSpec::Fir { k_taps: 0, .. } => Err(KernelError::NonPositive("k_taps")),
            KernelSpec::Fft { n: 0 } => Err(KernelError::NonPositive("n")),
            KernelSpec::Fft { n: 1 } => Err(KernelError::FftTooSmall),
            KernelSpec::Fft { n } if !n.is_power_of_two() => Err(KernelError::NotPowerOfTwo(n)),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            KernelSpec::Matmul { n } => format!("matmul{n}"),
            KernelSpec::Fir { n_samples, k_taps } => format!("fir{n_samples}x{k_taps}"),
            KernelSpec::Dot { n } => format!("dot{n}"),
            KernelSpec::Fft { n } => format!("fft{n}"),
        }
    }
}

/// Closed-form operation counts for the reference kernels.
///
/// The FFT follows the radix-2 convention of 4 real multiplies and 6 real
/// adds per butterfly, `n/2 · log2 n` butterflies, i.e. `5 n log2 n` real
/// operations split as `2 n log2 n` multiplies and `3 n log2 n` adds.
///
/// ```
/// use flexmeter::workload::{analytic_workload, KernelSpec};
///
/// assert_eq!(analytic_workload(KernelSpec::Matmul { n: 4 }).unwrap().total(), 112);
/// assert_eq!(analytic_workload(KernelSpec::Fft { n: 8 }).unwrap().total(), 120);
/// ```
pub fn analytic_workload(k: KernelSpec) -> Result<IntrinsicWorkload, KernelError> {
    k.validate()?;
    let ovf = || KernelError::Overflow;
    let (mul, add) = match k {
        KernelSpec::Matmul { n } => {
            let n2 = n.checked_mul(n).ok_or_else(ovf)?;
            (n2.checked_mul(n).ok_or_else(ovf)?, n2.checked_mul(n - 1).ok_or_else(ovf)?)
        }
        KernelSpec::Dot { n } => (n, n - 1),
        KernelSpec::Fir { n_samples, k_taps } => (
            n_samples.checked_mul(k_taps).ok_or_else(ovf)?,
            n_samples.checked_mul(k_taps - 1).ok_or_else(ovf)?,
        ),
        KernelSpec::Fft { n } => {
            let nlog = n.checked_mul(n.trailing_zeros() as u64).ok_or_else(ovf)?;
            (
                nlog.checked_mul(2).ok_or_else(ovf)?,
                nlog.checked_mul(3).ok_or_else(ovf)?,
            )
        }
    };
    IntrinsicWorkload::from_counts([(OperationClass::FpMul, mul), (OperationClass::FpAdd, add)])
        .map_err(|_| ovf())
}

/// Formats a workload as one `workloads.txt` line.
pub fn workload_line(app_id: &str, w: &IntrinsicWorkload) -> String {
    let mut s = format!("app {app_id} total {}", w.total());
    for (c, n) in w.counts_by_class() {
        s.push_str(&format!(" {c} {n}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_transcribes_lines() {
        let p = parse_profile("op fmul 64\nop fadd 48").unwrap();
        assert_eq!(p.get("fmul"), 64);
        assert_eq!(p.get("fadd"), 48);
        assert_eq!(p.entries().len(), 2);
    }

    #[test]
    fn parse_empty_document() {
        assert!(parse_profile("").unwrap().is_empty());
        assert!(parse_profile("# only a comment\n\n   \n").unwrap().is_empty());
    }

    #[test]
    fn duplicate_lines_are_summed() {
        let p = parse_profile("op fmul 32\nop fmul 32").unwrap();
        assert_eq!(p.get("fmul"), 32 + 32);
        let p = parse_profile("op FMUL 1\nop fmul 2 # trailing comment").unwrap();
        assert_eq!(p.get("fmul"), 3);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_profile("op fmul 1\nop fadd\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_profile("\nop fadd -3").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("negative"));
        let e = parse_profile("op fadd 1.5").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_profile("opx fadd 1").unwrap_err();
        assert!(e.message.contains("unknown directive"));
        let e = parse_profile(&format!("op a {}\nop a 1", u64::MAX)).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn default_table_lookups() {
        let t = default_table();
        assert_eq!(t.lookup("fadd"), OperationClass::FpAdd);
        assert_eq!(t.lookup("br"), OperationClass::Control);
        assert_eq!(t.lookup("frobnicate"), OperationClass::OtherOverhead);
        assert_eq!(t.lookup("ldr"), OperationClass::MemMove);
        assert_eq!(t.lookup("FMUL"), OperationClass::FpMul);
        assert_eq!(t.lookup("fcmp"), OperationClass::Compare);
    }

    #[test]
    fn classify_exact_rules() {
        let t = default_table();
        let c = classify(&parse_profile("op fmul 64\nop fadd 48").unwrap(), &t);
        assert_eq!(c, BTreeMap::from([(OperationClass::FpMul, 64), (OperationClass::FpAdd, 48)]));
        let c = classify(&parse_profile("op ld 100\nop st 50").unwrap(), &t);
        assert_eq!(c, BTreeMap::from([(OperationClass::MemMove, 150)]));
    }

    #[test]
    fn first_matching_rule_wins() {
        let t = parse_table("class fm* logic\nclass fmul fp_mul\ndefault control\n").unwrap();
        assert_eq!(t.lookup("fmul"), OperationClass::Logic);
        assert_eq!(t.lookup("add"), OperationClass::Control);
    }

    #[test]
    fn table_parse_errors() {
        assert!(parse_table("class fmul fp_mul\n").unwrap_err().message.contains("default"));
        assert!(parse_table("default logic\ndefault logic\n").is_err());
        let e = parse_table("default logic\nclass x quantum\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_table("default logic\nclass x\n").is_err());
    }

    #[test]
    fn table_text_round_trips() {
        let t = default_table();
        assert_eq!(parse_table(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn extraction_splits_compute_and_overhead() {
        let classified = BTreeMap::from([
            (OperationClass::FpMul, 64u128),
            (OperationClass::FpAdd, 48),
            (OperationClass::MemMove, 150),
        ]);
        let x = intrinsic_workload(&classified).unwrap();
        assert_eq!(x.workload.total(), 112);
        assert_eq!(x.excluded_total, 150);

        let overhead_only = BTreeMap::from([(OperationClass::MemMove, 10u128)]);
        let err = intrinsic_workload(&overhead_only).unwrap_err();
        assert_eq!(err.to_string(), "no compute operations");

        let single = BTreeMap::from([(OperationClass::IntAdd, 1u128)]);
        assert_eq!(intrinsic_workload(&single).unwrap().workload.total(), 1);
    }

    #[test]
    fn analytic_counts() {
        let m = analytic_workload(KernelSpec::Matmul { n: 4 }).unwrap();
        assert_eq!((m.count(OperationClass::FpMul), m.count(OperationClass::FpAdd)), (64, 48));
        let d = analytic_workload(KernelSpec::Dot { n: 1 }).unwrap();
        assert_eq!((d.total(), d.count(OperationClass::FpMul), d.count(OperationClass::FpAdd)), (1, 1, 0));
        let f = analytic_workload(KernelSpec::Fft { n: 8 }).unwrap();
        assert_eq!((f.count(OperationClass::FpMul), f.count(OperationClass::FpAdd), f.total()), (48, 72, 120));
        let r = analytic_workload(KernelSpec::Fir { n_samples: 10, k_taps: 3 }).unwrap();
        assert_eq!((r.count(OperationClass::FpMul), r.count(OperationClass::FpAdd)), (30, 20));
    }

    #[test]
    fn analytic_rejects_bad_specs() {
        assert_eq!(analytic_workload(KernelSpec::Fft { n: 12 }), Err(KernelError::NotPowerOfTwo(12)));
        assert_eq!(analytic_workload(KernelSpec::Fft { n: 1 }), Err(KernelError::FftTooSmall));
        assert!(analytic_workload(KernelSpec::Matmul { n: 0 }).is_err());
        assert!(analytic_workload(KernelSpec::Fir { n_samples: 4, k_taps: 0 }).is_err());
        assert_eq!(
            analytic_workload(KernelSpec::Matmul { n: u64::MAX / 2 }),
            Err(KernelError::Overflow)
        );
    }

    #[test]
    fn workload_line_format() {
        let w = analytic_workload(KernelSpec::Matmul { n: 4 }).unwrap();
        assert_eq!(workload_line("matmul4", &w), "app matmul4 total 112 fp_add 48 fp_mul 64");
    }
}
