//! The bundled example campaign: 25 illustrative systems (CPUs, GPUs, DSPs,
//! FPGAs and two ASIPs) measured on 14 applications.
//!
//! The numbers are made up to look plausible. They are not measurements of
//! real products.

use crate::campaign_io::{read_campaign_sources, Source};
use crate::model::Campaign;

pub const SYSTEMS_CSV: &str = include_str!("../data/example/systems.csv");
pub const APPLICATIONS_CSV: &str = include_str!("../data/example/applications.csv");
pub const MEASUREMENTS_CSV: &str = include_str!("../data/example/measurements.csv");
pub const WORKLOADS_TXT: &str = include_str!("../data/example/workloads.txt");

/// Directory holding the example files in the source tree.
pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example")
}

pub fn sources() -> Vec<Source> {
    vec![
        Source::new("systems.csv", SYSTEMS_CSV),
        Source::new("applications.csv", APPLICATIONS_CSV),
        Source::new("measurements.csv", MEASUREMENTS_CSV),
        Source::new("workloads.txt", WORKLOADS_TXT),
    ]
}

pub fn campaign() -> Campaign {
    read_campaign_sources(&sources()).expect("bundled example campaign is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_campaign;

    #[test]
    fn example_shape() {
        let c = campaign();
        assert_eq!(c.systems.len(), 25);
        assert_eq!(c.applications.len(), 14);
        assert_eq!(c.measurements.len(), 25 * 14);
        assert!(validate_campaign(&c).is_empty());
    }
}
