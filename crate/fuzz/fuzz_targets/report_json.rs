#![no_main]

use libfuzzer_sys::fuzz_target;
use tetrad_audit_cli::decode_json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = decode_json(text) {
        let encoded = doc.to_json().expect("decoded report re-encodes");
        let again = decode_json(&encoded).expect("re-encoded report decodes");
        assert_eq!(again, doc);
        let _ = doc.to_csv();
    }
});
