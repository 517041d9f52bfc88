//! Score tables, rankings and flexibility scatter plots.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::metrics::{rank_systems, RankKey, SystemScore};
use crate::model::{ArchClass, UnknownToken};

/// The y quantity of a flexibility scatter plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    PeakPerf,
    EnergyEff,
    AreaEff,
    MeanPerf,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::PeakPerf, Axis::EnergyEff, Axis::AreaEff, Axis::MeanPerf];

    pub fn name(self) -> &'static str {
        match self {
            Axis::PeakPerf => "peak_perf",
            Axis::EnergyEff => "energy_eff",
            Axis::AreaEff => "area_eff",
            Axis::MeanPerf => "mean_perf",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Axis::PeakPerf | Axis::MeanPerf => "ops/s",
            Axis::EnergyEff => "ops/J",
            Axis::AreaEff => "ops/s/mm²",
        }
    }

    pub fn value(self, s: &SystemScore) -> Option<f64> {
        match self {
            Axis::PeakPerf => Some(s.peak_perf),
            Axis::MeanPerf => Some(s.mean_perf),
            Axis::EnergyEff => s.energy_eff,
            Axis::AreaEff => s.area_eff,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownToken {
                kind: "axis",
                value: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AxisScale {
    pub log_x: bool,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub system_id: String,
    pub arch_class: ArchClass,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scatter {
    pub axis: Axis,
    pub points: Vec<ScatterPoint>,
    /// `(system_id, reason)` for systems left out of this plot.
    pub omitted: Vec<(String, String)>,
}

/// Flexibility (x) against `axis` (y), one point per system with the data.
/// Points are ordered by system id. On a log axis non-positive values cannot
/// be placed and are omitted too.
pub fn scatter(scores: &[SystemScore], axis: Axis, scale: AxisScale) -> Scatter {
    let mut sorted: Vec<&SystemScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.system_id.cmp(&b.system_id));
    let mut points = Vec::new();
    let mut omitted = Vec::new();
    for s in sorted {
        let Some(y) = axis.value(s) else {
            omitted.push((s.system_id.clone(), format!("no {} data", axis)));
            continue;
        };
        if scale.log_y && y <= 0.0 {
            omitted.push((s.system_id.clone(), format!("{axis} = {y} on log axis")));
            continue;
        }
        if scale.log_x && s.flexibility <= 0.0 {
            omitted.push((
                s.system_id.clone(),
                format!("flexibility = {} on log axis", s.flexibility),
            ));
            continue;
        }
        points.push(ScatterPoint {
            system_id: s.system_id.clone(),
            arch_class: s.arch_class,
            x: s.flexibility,
            y,
        });
    }
    Scatter {
        axis,
        points,
        omitted,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Score table ranked by flexibility (ties by id). Missing values are empty
/// cells.
pub fn scores_csv(scores: &[SystemScore]) -> String {
    let by_id: BTreeMap<&str, &SystemScore> =
        scores.iter().map(|s| (s.system_id.as_str(), s)).collect();
    let mut out =
        String::from("system_id,arch_class,flexibility,versatility,peak_perf,mean_perf,energy_eff,area_eff\n");
    for r in rank_systems(scores, RankKey::Flexibility) {
        let s = by_id[r.system_id.as_str()];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.system_id,
            s.arch_class,
            s.flexibility,
            s.versatility,
            s.peak_perf,
            s.mean_perf,
            opt(s.energy_eff),
            opt(s.area_eff)
        );
    }
    out
}

pub fn ranking_csv(scores: &[SystemScore], key: RankKey) -> String {
    let mut out = format!("rank,system_id,{},flagged\n", key.name());
    for (i, r) in rank_systems(scores, key).iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", i + 1, r.system_id, opt(r.value), r.flagged);
    }
    out
}

pub fn scatter_csv(sc: &Scatter) -> String {
    let mut out = String::from("system_id,arch_class,x,y\n");
    for p in &sc.points {
        let _ = writeln!(out, "{},{},{},{}", p.system_id, p.arch_class, p.x, p.y);
    }
    out
}

pub fn omitted_txt(scatters: &[Scatter]) -> String {
    let mut out = String::new();
    for sc in scatters {
        for (id, reason) in &sc.omitted {
            let _ = writeln!(out, "{} {} {}", sc.axis, id, reason);
        }
    }
    out
}

fn class_color(c: ArchClass) -> &'static str {
    match c {
        ArchClass::Cpu => "#1f77b4",
        ArchClass::Gpu => "#2ca02c",
        ArchClass::Dsp => "#ff7f0e",
        ArchClass::Fpga => "#9467bd",
        ArchClass::Asip => "#8c564b",
        ArchClass::Asic => "#d62728",
        ArchClass::Synthetic => "#7f7f7f",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Maps data values onto `[0, 1]` along one axis.
struct Range {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Range {
    fn new(values: impl Iterator<Item = f64>, log: bool, fixed: Option<(f64, f64)>) -> Range {
        let t = |v: f64| if log { v.log10() } else { v };
        let (lo, hi) = match fixed {
            Some((lo, hi)) => (t(lo), t(hi)),
            None => {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for v in values {
                    lo = lo.min(t(v));
                    hi = hi.max(t(v));
                }
                if !lo.is_finite() {
                    (0.0, 1.0)
                } else if hi - lo < 1e-12 * hi.abs().max(1.0) {
                    (lo - 0.5, hi + 0.5)
                } else {
                    (lo, hi)
                }
            }
        };
        Range { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn label(&self, f: f64) -> String {
        let v = self.lo + f * (self.hi - self.lo);
        if self.log {
            format!("1e{v:.1}")
        } else {
            format!("{v:.3e}")
        }
    }
}

/// A labeled scatter plot with one `<circle class="mark">` per point and a
/// legend keyed by architecture class.
pub fn scatter_svg(sc: &Scatter, scale: AxisScale) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 140.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 60.0;
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);

    let xr = if scale.log_x {
        Range::new(sc.points.iter().map(|p| p.x), true, None)
    } else {
        Range::new(std::iter::empty(), false, Some((0.0, 1.0)))
    };
    let yr = Range::new(sc.points.iter().map(|p| p.y), scale.log_y, None);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">flexibility vs {}</text>"#,
        LEFT + pw / 2.0,
        sc.axis
    );
    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (x, y) = (LEFT + f * pw, TOP + ph - f * ph);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + ph + 15.0,
            xr.label(f)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            yr.label(f)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">flexibility{}</text>"#,
        LEFT + pw / 2.0,
        H - 15.0,
        if scale.log_x { " (log)" } else { "" }
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.1}" text-anchor="middle" transform="rotate(-90 15 {:.1})">{} [{}]{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        sc.axis,
        escape(sc.axis.unit()),
        if scale.log_y { " (log)" } else { "" }
    );

    for p in &sc.points {
        let cx = LEFT + xr.frac(p.x) * pw;
        let cy = TOP + ph - yr.frac(p.y) * ph;
        let _ = writeln!(
            s,
            r#"<circle class="mark" cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{}"><title>{} ({})</title></circle>"#,
            class_color(p.arch_class),
            escape(&p.system_id),
            p.arch_class
        );
    }

    let classes: std::collections::BTreeSet<ArchClass> =
        sc.points.iter().map(|p| p.arch_class).collect();
    for (i, c) in classes.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        let x = W - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<rect class="legend" x="{x}" y="{:.1}" width="10" height="10" fill="{}"/>"#,
            y - 9.0,
            class_color(*c)
        );
        let _ = writeln!(s, r#"<text x="{}" y="{y:.1}">{c}</text>"#, x + 15.0);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn score(id: &str, class: ArchClass, flex: f64, peak: f64, area: Option<f64>) -> SystemScore {
        SystemScore {
            system_id: id.into(),
            arch_class: class,
            flexibility: flex,
            versatility: 1.0,
            peak_perf: peak,
            mean_perf: peak / 2.0,
            energy_eff: None,
            area_eff: area,
            apps_in_scope: 3,
            comparable: true,
        }
    }

    fn sample() -> Vec<SystemScore> {
        vec![
            score("g1", ArchClass::Gpu, 0.4, 2e10, Some(1e7)),
            score("c1", ArchClass::Cpu, 0.9, 1e9, None),
            score("c2", ArchClass::Cpu, 0.9, 2e9, Some(1e6)),
        ]
    }

    #[test]
    fn scores_table_is_ranked() {
        let csv = scores_csv(&sample());
        let ids: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(ids, ["c1", "c2", "g1"]);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,"));
    }

    #[test]
    fn missing_axis_data_is_omitted() {
        let sc = scatter(&sample(), Axis::AreaEff, AxisScale::default());
        assert_eq!(sc.points.len(), 2);
        assert_eq!(sc.omitted, vec![("c1".to_string(), "no area_eff data".to_string())]);
        assert!(omitted_txt(&[sc]).starts_with("area_eff c1 "));
    }

    #[test]
    fn log_axis_drops_non_positive() {
        let mut s = sample();
        s[0].flexibility = 0.0;
        let sc = scatter(&s, Axis::PeakPerf, AxisScale { log_x: true, log_y: true });
        assert_eq!(sc.points.len(), 2);
        assert_eq!(sc.omitted[0].0, "g1");
    }

    #[test]
    fn ranking_flags_missing() {
        let csv = ranking_csv(&sample(), RankKey::EnergyEff);
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    }

    #[test]
    fn svg_has_one_mark_per_point() {
        for scale in [AxisScale::default(), AxisScale { log_x: true, log_y: true }] {
            let sc = scatter(&sample(), Axis::PeakPerf, scale);
            let svg = scatter_svg(&sc, scale);
            assert_eq!(svg.matches("<circle").count(), sc.points.len());
            assert_eq!(svg.matches(r#"class="legend""#).count(), 2);
        }
    }

    #[test]
    fn axis_names_parse() {
        for a in Axis::ALL {
            assert_eq!(a.name().parse::<Axis>().unwrap(), a);
        }
        assert!("power".parse::<Axis>().is_err());
    }
}
