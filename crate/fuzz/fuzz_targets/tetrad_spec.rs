#![no_main]

use libfuzzer_sys::fuzz_target;
use tetrad_audit::MetricSpec;
use tetrad_audit_cli::TetradSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<TetradSpec>() {
        let again: TetradSpec = spec.to_string().parse().expect("display form reparses");
        assert_eq!(again, spec);
        spec.build(&MetricSpec::minkowski()).expect("valid spec builds");
    }
});
