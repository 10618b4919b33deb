#![no_main]

use index_lint::{lint_expr, parse_expr, SymbolTable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let table = SymbolTable::default_table();
    for d in lint_expr(text, &table) {
        assert!(d.span.start <= d.span.end && d.span.end <= text.len());
    }
    if let Ok(e) = parse_expr(text, &table) {
        let printed = e.to_string();
        let again = parse_expr(&printed, &table).expect("unparsed text reparses");
        assert!(e.same_structure(&again));
    }
});
