#![no_main]

use libfuzzer_sys::fuzz_target;
use tetrad_audit::Chart;
use tetrad_audit_cli::{GridSpec, MAX_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for chart in [Chart::Cartesian, Chart::Spherical] {
        if let Ok(g) = GridSpec::parse(text, chart) {
            assert!(g.len() <= MAX_POINTS);
            let pts = g.points();
            assert_eq!(pts.len(), g.len());
            assert!(pts.iter().flatten().all(|c| c.is_finite()));
        }
    }
    let _ = tetrad_audit_cli::config::parse_point(text);
});
