#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let report = index_lint::lint_corpus(text);
    let lines = text.lines().count();
    for d in &report.diagnostics {
        assert!(d.line >= 1 && d.line <= lines);
        assert!(d.column >= 1);
    }
});
