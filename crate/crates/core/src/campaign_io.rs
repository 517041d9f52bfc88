//! Reading and writing measurement campaigns.
//!
//! A campaign on disk is four kinds of file:
//!
//! | file               | contents                                                   |
//! |--------------------|------------------------------------------------------------|
//! | `systems.csv`      | `id,name,arch_class,area_mm2,tdp_watts,notes`              |
//! | `applications.csv` | `id,name,workload_ref,provenance`                          |
//! | `measurements.csv` | `system_id,app_id,status,exec_time_s,energy_j,avg_power_w` |
//! | `workloads.txt`    | `app <id> total <n> [<class> <n>]...`                      |
//!
//! CSV files are recognised by their header row, so a section may be split
//! across several files with any names. Empty CSV cells mean "absent".
//! Units are fixed: seconds, joules, watts, mm².

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::model::{
    validate_campaign, Application, ArchClass, Campaign, EntityRef, IntrinsicWorkload,
    Measurement, MeasurementStatus, SystemUnderTest, Violation, WorkloadError,
    WorkloadProvenance,
};
use crate::workload::{workload_line, OperationClass};

pub const FORMAT_VERSION: u32 = 1;

pub const SYSTEMS_FILE: &str = "systems.csv";
pub const APPLICATIONS_FILE: &str = "applications.csv";
pub const MEASUREMENTS_FILE: &str = "measurements.csv";
pub const WORKLOADS_FILE: &str = "workloads.txt";

const SYSTEM_COLUMNS: [&str; 6] = ["id", "name", "arch_class", "area_mm2", "tdp_watts", "notes"];
const APPLICATION_COLUMNS: [&str; 4] = ["id", "name", "workload_ref", "provenance"];
const MEASUREMENT_COLUMNS: [&str; 6] = [
    "system_id",
    "app_id",
    "status",
    "exec_time_s",
    "energy_j",
    "avg_power_w",
];

/// Where something was read from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Location {
    pub file: String,
    pub line: u64,
    pub column: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)?;
        if let Some(c) = &self.column {
            write!(f, " (column '{c}')")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{location}: {message}")]
    Format { location: Location, message: String },
    #[error("{}", format_violations(.0))]
    Invalid(Vec<(Option<Location>, Violation)>),
}

fn format_violations(vs: &[(Option<Location>, Violation)]) -> String {
    let mut lines = vec![format!("campaign has {} violation(s)", vs.len())];
    for (loc, v) in vs {
        match loc {
            Some(l) => lines.push(format!("  {l}: {v}")),
            None => lines.push(format!("  {v}")),
        }
    }
    lines.join("\n")
}

impl IoError {
    fn format(file: &str, line: u64, column: Option<&str>, message: impl Into<String>) -> Self {
        IoError::Format {
            location: Location {
                file: file.to_string(),
                line,
                column: column.map(str::to_string),
            },
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// True for failures reading or writing the file system.
    pub fn is_io(&self) -> bool {
        matches!(self, IoError::Io { .. })
    }
}

/// A named in-memory document.
#[derive(Debug, Clone)]
pub struct Source {
    pub name: String,
    pub text: String,
}

impl Source {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        Source {
            name: name.into(),
            text: text.into(),
        }
    }
}

/// One application row before its workload reference is resolved.
struct AppRow {
    id: String,
    name: String,
    workload_ref: String,
    provenance: WorkloadProvenance,
    loc: Location,
}

#[derive(Default)]
struct Loader {
    systems: Vec<(SystemUnderTest, Location)>,
    apps: Vec<AppRow>,
    measurements: Vec<(Measurement, Location)>,
    workloads: BTreeMap<String, (IntrinsicWorkload, Location)>,
}

enum Section {
    Systems,
    Applications,
    Measurements,
}

impl Section {
    fn columns(&self) -> &'static [&'static str] {
        match self {
            Section::Systems => &SYSTEM_COLUMNS,
            Section::Applications => &APPLICATION_COLUMNS,
            Section::Measurements => &MEASUREMENT_COLUMNS,
        }
    }

    fn required(&self) -> &'static [&'static str] {
        match self {
            Section::Systems => &["id", "name", "arch_class"],
            Section::Applications => &["id", "name", "workload_ref", "provenance"],
            Section::Measurements => &["system_id", "app_id", "status"],
        }
    }

    /// The section sharing the most column names with `header`.
    fn detect(header: &[&str]) -> Option<Section> {
        let overlap = |s: &Section| header.iter().filter(|h| s.columns().contains(h)).count();
        let mut ranked: Vec<(usize, Section)> =
            [Section::Systems, Section::Applications, Section::Measurements]
                .into_iter()
                .map(|s| (overlap(&s), s))
                .collect();
        ranked.sort_by_key(|r| std::cmp::Reverse(r.0));
        match ranked.as_slice() {
            [(best, _), (second, _), ..] if *best == 0 || best == second => None,
            _ => ranked.into_iter().next().map(|(_, s)| s),
        }
    }
}

fn looks_like_csv(src: &Source) -> bool {
    if src.name.ends_with(".csv") {
        return true;
    }
    if src.name.ends_with(".txt") {
        return false;
    }
    let first = src.text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    first.contains(',')
}

/// A parsed CSV row with access to named cells.
struct Row<'a> {
    file: &'a str,
    line: u64,
    record: &'a csv::StringRecord,
    index: &'a BTreeMap<&'static str, usize>,
}

impl Row<'_> {
    fn cell(&self, col: &str) -> Option<&str> {
        let v = self.record.get(*self.index.get(col)?)?.trim();
        (!v.is_empty()).then_some(v)
    }

    fn err(&self, col: &str, msg: impl Into<String>) -> IoError {
        IoError::format(self.file, self.line, Some(col), msg)
    }

    fn text(&self, col: &str) -> Result<String, IoError> {
        self.cell(col)
            .map(str::to_string)
            .ok_or_else(|| self.err(col, format!("missing value for '{col}'")))
    }

    fn number(&self, col: &str) -> Result<Option<f64>, IoError> {
        let Some(v) = self.cell(col) else {
            return Ok(None);
        };
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(self.err(col, format!("bad number '{v}'"))),
        }
    }

    fn token<T: std::str::FromStr>(&self, col: &str) -> Result<T, IoError>
    where
        T::Err: fmt::Display,
    {
        let v = self.text(col)?;
        v.parse::<T>().map_err(|e| self.err(col, e.to_string()))
    }

    fn location(&self) -> Location {
        Location {
            file: self.file.to_string(),
            line: self.line,
            column: None,
        }
    }
}

impl Loader {
    fn load(&mut self, src: &Source) -> Result<(), IoError> {
        if looks_like_csv(src) {
            self.load_csv(src)
        } else {
            self.load_workloads(src)
        }
    }

    fn load_csv(&mut self, src: &Source) -> Result<(), IoError> {
        let file = src.name.as_str();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(src.text.as_bytes());
        let header = rdr
            .headers()
            .map_err(|e| IoError::format(file, 1, None, e.to_string()))?
            .clone();
        let names: Vec<&str> = header.iter().map(str::trim).collect();
        if names.iter().all(|n| n.is_empty()) {
            // empty file
            return Ok(());
        }
        let section = Section::detect(&names).ok_or_else(|| {
            IoError::format(file, 1, None, format!("unrecognised header '{}'", names.join(",")))
        })?;
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            let Some(col) = section.columns().iter().find(|c| *c == n) else {
                return Err(IoError::format(file, 1, Some(n), format!("unknown column '{n}'")));
            };
            if index.insert(*col, i).is_some() {
                return Err(IoError::format(file, 1, Some(n), format!("duplicate column '{n}'")));
            }
        }
        if let Some(missing) = section.required().iter().find(|c| !index.contains_key(*c)) {
            return Err(IoError::format(
                file,
                1,
                Some(missing),
                format!("missing required column '{missing}'"),
            ));
        }

        for result in rdr.records() {
            let record = result.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                IoError::format(file, line, None, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let row = Row {
                file,
                line,
                record: &record,
                index: &index,
            };
            match section {
                Section::Systems => {
                    let s = SystemUnderTest {
                        id: row.text("id")?,
                        name: row.cell("name").unwrap_or_default().to_string(),
                        arch_class: row.token::<ArchClass>("arch_class")?,
                        area_mm2: row.number("area_mm2")?,
                        tdp_watts: row.number("tdp_watts")?,
                        notes: row.cell("notes").unwrap_or_default().to_string(),
                    };
                    self.systems.push((s, row.location()));
                }
                Section::Applications => self.apps.push(AppRow {
                    id: row.text("id")?,
                    name: row.cell("name").unwrap_or_default().to_string(),
                    workload_ref: row.text("workload_ref")?,
                    provenance: row.token::<WorkloadProvenance>("provenance")?,
                    loc: row.location(),
                }),
                Section::Measurements => {
                    let m = Measurement {
                        system_id: row.text("system_id")?,
                        app_id: row.text("app_id")?,
                        status: row.token::<MeasurementStatus>("status")?,
                        exec_time_s: row.number("exec_time_s")?,
                        energy_j: row.number("energy_j")?,
                        avg_power_w: row.number("avg_power_w")?,
                    };
                    self.measurements.push((m, row.location()));
                }
            }
        }
        Ok(())
    }

    fn load_workloads(&mut self, src: &Source) -> Result<(), IoError> {
        for (id, w, loc) in parse_workload_lines(src)? {
            if let Some((_, first)) = self.workloads.get(&id) {
                return Err(IoError::Format {
                    location: loc,
                    message: format!("duplicate app id '{id}' (first defined at {first})"),
                });
            }
            self.workloads.insert(id, (w, loc));
        }
        Ok(())
    }

    fn finish(self) -> Result<Campaign, IoError> {
        let mut provenance: BTreeMap<EntityRef, Location> = BTreeMap::new();
        let mut campaign = Campaign::default();
        for (s, loc) in self.systems {
            provenance.entry(EntityRef::System(s.id.clone())).or_insert(loc);
            campaign.systems.push(s);
        }
        for row in self.apps {
            let Some((w, _)) = self.workloads.get(&row.workload_ref) else {
                return Err(IoError::Format {
                    location: Location {
                        column: Some("workload_ref".into()),
                        ..row.loc
                    },
                    message: format!("unresolved workload_ref '{}'", row.workload_ref),
                });
            };
            provenance
                .entry(EntityRef::Application(row.id.clone()))
                .or_insert(row.loc);
            campaign.applications.push(Application {
                id: row.id,
                name: row.name,
                workload: w.clone(),
                workload_provenance: row.provenance,
            });
        }
        for (m, loc) in self.measurements {
            provenance
                .entry(EntityRef::Measurement {
                    system_id: m.system_id.clone(),
                    app_id: m.app_id.clone(),
                })
                .or_insert(loc);
            campaign.measurements.push(m);
        }
        campaign.canonicalize();

        let violations = validate_campaign(&campaign);
        if !violations.is_empty() {
            return Err(IoError::Invalid(
                violations
                    .into_iter()
                    .map(|v| (provenance.get(&v.entity).cloned(), v))
                    .collect(),
            ));
        }
        Ok(campaign)
    }
}

/// Parses workload-bundle lines into `(app id, workload, location)` triples,
/// checking the optional `version` line.
fn parse_workload_lines(
    src: &Source,
) -> Result<Vec<(String, IntrinsicWorkload, Location)>, IoError> {
    let file = src.name.as_str();
    let mut out = Vec::new();
    for (idx, raw) in src.text.lines().enumerate() {
        let line = idx as u64 + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let err = |msg: String| IoError::format(file, line, None, msg);
        match toks.as_slice() {
            [] => continue,
            ["version", v] => match v.parse::<u32>() {
                Ok(FORMAT_VERSION) => {}
                _ => {
                    return Err(err(format!(
                        "version mismatch: found '{v}', expected {FORMAT_VERSION}"
                    )))
                }
            },
            ["app", id, "total", total, rest @ ..] => {
                let total: u64 = total
                    .parse()
                    .map_err(|_| err(format!("bad total '{total}'")))?;
                if total == 0 {
                    return Err(err(format!("app '{id}': {}", WorkloadError::NoComputeOperations)));
                }
                if rest.is_empty() {
                    return Err(err(format!("app '{id}': missing class breakdown")));
                }
                if rest.len() % 2 != 0 {
                    return Err(err(format!("app '{id}': class counts must come in pairs")));
                }
                let mut counts = Vec::new();
                for pair in rest.chunks(2) {
                    let class: OperationClass =
                        pair[0].parse().map_err(|e: crate::model::UnknownToken| err(e.to_string()))?;
                    let n: u64 = pair[1]
                        .parse()
                        .map_err(|_| err(format!("bad count '{}' for class {}", pair[1], pair[0])))?;
                    counts.push((class, n));
                }
                let w = IntrinsicWorkload::from_counts(counts)
                    .map_err(|e| err(format!("app '{id}': {e}")))?;
                if w.total() != total {
                    return Err(err(format!(
                        "app '{id}': total {total} does not equal class sum {}",
                        w.total()
                    )));
                }
                out.push((
                    id.to_string(),
                    w,
                    Location {
                        file: file.to_string(),
                        line,
                        column: None,
                    },
                ));
            }
            _ => {
                return Err(err(
                    "expected 'app <id> total <n> [<class> <n>]...' or 'version <n>'".to_string(),
                ))
            }
        }
    }
    Ok(out)
}

/// Reads a workload bundle into one workload per application id.
pub fn read_workload_bundle(path: &Path) -> Result<BTreeMap<String, IntrinsicWorkload>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_workload_bundle(&Source::new(path.display().to_string(), text))
}

pub fn parse_workload_bundle(src: &Source) -> Result<BTreeMap<String, IntrinsicWorkload>, IoError> {
    let mut loader = Loader::default();
    loader.load_workloads(src)?;
    Ok(loader
        .workloads
        .into_iter()
        .map(|(id, (w, _))| (id, w))
        .collect())
}

/// Merges and validates in-memory documents into a campaign.
pub fn read_campaign_sources(sources: &[Source]) -> Result<Campaign, IoError> {
    let mut loader = Loader::default();
    for s in sources {
        loader.load(s)?;
    }
    loader.finish()
}

/// Expands directories into their `.csv` and `.txt` files, sorted by name.
fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, IoError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| IoError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.is_file()
                        && matches!(f.extension().and_then(|x| x.to_str()), Some("csv" | "txt"))
                })
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Reads, merges and validates campaign files. Directories contribute every
/// `.csv` and `.txt` file they contain.
pub fn read_campaign(paths: &[PathBuf]) -> Result<Campaign, IoError> {
    let mut sources = Vec::new();
    for p in expand(paths)? {
        let text = fs::read_to_string(&p).map_err(|e| IoError::io(&p, e))?;
        sources.push(Source::new(p.display().to_string(), text));
    }
    read_campaign_sources(&sources)
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Serialized documents for a campaign, keyed by canonical file name.
///
/// Lists are written in id order and numbers as their shortest round-trip
/// decimal form, so equal campaigns serialize to identical bytes.
pub fn serialize_campaign(c: &Campaign) -> Vec<(&'static str, String)> {
    let mut c = c.clone();
    c.canonicalize();
    let systems = csv_text(
        &SYSTEM_COLUMNS,
        c.systems.iter().map(|s| {
            vec![
                s.id.clone(),
                s.name.clone(),
                s.arch_class.to_string(),
                num(s.area_mm2),
                num(s.tdp_watts),
                s.notes.clone(),
            ]
        }),
    );
    let apps = csv_text(
        &APPLICATION_COLUMNS,
        c.applications.iter().map(|a| {
            vec![
                a.id.clone(),
                a.name.clone(),
                a.id.clone(),
                a.workload_provenance.to_string(),
            ]
        }),
    );
    let measurements = csv_text(
        &MEASUREMENT_COLUMNS,
        c.measurements.iter().map(|m| {
            vec![
                m.system_id.clone(),
                m.app_id.clone(),
                m.status.to_string(),
                num(m.exec_time_s),
                num(m.energy_j),
                num(m.avg_power_w),
            ]
        }),
    );
    let mut workloads = format!("version {FORMAT_VERSION}\n");
    for a in &c.applications {
        workloads.push_str(&workload_line(&a.id, &a.workload));
        workloads.push('\n');
    }
    vec![
        (SYSTEMS_FILE, systems),
        (APPLICATIONS_FILE, apps),
        (MEASUREMENTS_FILE, measurements),
        (WORKLOADS_FILE, workloads),
    ]
}

/// Writes the four campaign files into directory `dir`, creating it if
/// needed. The campaign must be valid.
pub fn write_campaign(c: &Campaign, dir: &Path) -> Result<(), IoError> {
    let violations = validate_campaign(c);
    if !violations.is_empty() {
        return Err(IoError::Invalid(violations.into_iter().map(|v| (None, v)).collect()));
    }
    fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    for (name, text) in serialize_campaign(c) {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| IoError::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Rule;

    const SYSTEMS: &str = "id,name,arch_class,area_mm2,tdp_watts,notes\n\
        cpu1,Desktop CPU,CPU,150,65,\"quad core, 3 GHz\"\n\
        dsp1,Audio DSP,DSP,,2.5,\n";
    const APPS: &str = "id,name,workload_ref,provenance\n\
        matmul4,4x4 matmul,mm4,ANALYTIC\n\
        fir,FIR filter,fir,DECLARED\n";
    const MEAS: &str = "system_id,app_id,status,exec_time_s,energy_j,avg_power_w\n\
        cpu1,matmul4,OK,0.001,0.05,50\n\
        cpu1,fir,OK,2,,\n\
        dsp1,matmul4,UNSUPPORTED,,,\n\
        dsp1,fir,FAILED,,,\n";
    const WORK: &str = "# bundle\nversion 1\napp mm4 total 112 fp_mul 64 fp_add 48\n\
        app fir total 30 fp_mul 20 fp_add 10\n";

    fn sources() -> Vec<Source> {
        vec![
            Source::new("systems.csv", SYSTEMS),
            Source::new("applications.csv", APPS),
            Source::new("measurements.csv", MEAS),
            Source::new("workloads.txt", WORK),
        ]
    }

    fn format_err(r: Result<Campaign, IoError>) -> (Location, String) {
        match r {
            Err(IoError::Format { location, message }) => (location, message),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn reads_small_campaign() {
        let c = read_campaign_sources(&sources()).unwrap();
        assert_eq!(c.systems.len(), 2);
        assert_eq!(c.systems[0].notes, "quad core, 3 GHz");
        assert_eq!(c.systems[1].area_mm2, None);
        let mm = c.application("matmul4").unwrap();
        assert_eq!(mm.workload.total(), 112);
        assert_eq!(c.measurements.len(), 4);
    }

    #[test]
    fn split_files_merge_identically() {
        let whole = read_campaign_sources(&sources()).unwrap();
        let mut lines = MEAS.lines();
        let header = lines.next().unwrap();
        let rows: Vec<&str> = lines.collect();
        let part = |rs: &[&str]| format!("{header}\n{}\n", rs.join("\n"));
        let mut split = vec![
            Source::new("m_b.csv", part(&rows[2..])),
            Source::new("w.txt", WORK),
            Source::new("m_a.csv", part(&rows[..2])),
        ];
        split.extend(sources().into_iter().take(2));
        assert_eq!(read_campaign_sources(&split).unwrap(), whole);
    }

    #[test]
    fn bad_number_names_file_line_column() {
        let bad = MEAS.replace("cpu1,fir,OK,2,,", "cpu1,fir,OK,abc,,");
        let mut s = sources();
        s[2] = Source::new("measurements.csv", bad);
        let (loc, msg) = format_err(read_campaign_sources(&s));
        assert_eq!(loc.file, "measurements.csv");
        assert_eq!(loc.line, 3);
        assert_eq!(loc.column.as_deref(), Some("exec_time_s"));
        assert!(msg.contains("abc"));
    }

    #[test]
    fn unknown_column_is_error() {
        let mut s = sources();
        s[0] = Source::new("systems.csv", "id,name,arch_class,clock_ghz\ncpu1,x,CPU,3\n");
        let (loc, msg) = format_err(read_campaign_sources(&s));
        assert_eq!(loc.line, 1);
        assert!(msg.contains("clock_ghz"));
    }

    #[test]
    fn unresolved_reference_is_error() {
        let mut s = sources();
        s[1] = Source::new("applications.csv", "id,name,workload_ref,provenance\nx,x,nope,DECLARED\n");
        let (loc, msg) = format_err(read_campaign_sources(&s));
        assert_eq!(loc.line, 2);
        assert!(msg.contains("nope"));
    }

    #[test]
    fn violations_carry_provenance() {
        let mut s = sources();
        s[2] = Source::new(
            "measurements.csv",
            format!("{MEAS}x9,fir,OK,1,,\n"),
        );
        match read_campaign_sources(&s) {
            Err(IoError::Invalid(vs)) => {
                assert_eq!(vs.len(), 1);
                let (loc, v) = &vs[0];
                assert_eq!(v.rule, Rule::UnknownSystem);
                assert_eq!(loc.as_ref().unwrap().line, 6);
                let msg = IoError::Invalid(vs.clone()).to_string();
                assert!(msg.contains("measurements.csv:6") && msg.contains("x9"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn version_mismatch_is_error() {
        let mut s = sources();
        s[3] = Source::new("workloads.txt", WORK.replace("version 1", "version 2"));
        let (loc, msg) = format_err(read_campaign_sources(&s));
        assert_eq!(loc.line, 2);
        assert!(msg.contains("version"));
    }

    #[test]
    fn workload_bundle_rules() {
        let ok = parse_workload_bundle(&Source::new("w.txt", "app matmul4 total 112 fp_mul 64 fp_add 48")).unwrap();
        assert_eq!(ok["matmul4"].total(), 112);

        let dup = parse_workload_bundle(&Source::new(
            "w.txt",
            "app fir total 2 fp_mul 2\napp fir total 2 fp_mul 2\n",
        ))
        .unwrap_err();
        assert!(dup.to_string().contains("w.txt:2") && dup.to_string().contains("duplicate"));

        let zero = parse_workload_bundle(&Source::new("w.txt", "app x total 0")).unwrap_err();
        assert!(zero.to_string().contains("no compute operations"));

        for bad in [
            "app x total 5 fp_mul 4",
            "app x total 5",
            "app x total 5 fp_mul",
            "app x total 5 mem_move 5",
            "app x total 5 warp 5",
            "app x total five fp_mul 5",
            "apps x",
        ] {
            assert!(parse_workload_bundle(&Source::new("w.txt", bad)).is_err(), "{bad}");
        }
    }

    #[test]
    fn write_then_read_round_trips() {
        let c = read_campaign_sources(&sources()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_campaign(&c, dir.path()).unwrap();
        let back = read_campaign(&[dir.path().to_path_buf()]).unwrap();
        assert_eq!(back, c);
        assert_eq!(serialize_campaign(&back), serialize_campaign(&c));
    }

    #[test]
    fn empty_campaign_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        write_campaign(&Campaign::default(), dir.path()).unwrap();
        let back = read_campaign(&[dir.path().to_path_buf()]).unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_campaign(&[PathBuf::from("/nonexistent/flexmeter/systems.csv")]).unwrap_err();
        assert!(err.is_io());
    }
}
