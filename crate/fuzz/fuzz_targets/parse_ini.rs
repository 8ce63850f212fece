#![no_main]

use libfuzzer_sys::fuzz_target;
use tunefree::harness::parse_ini;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ini) = parse_ini(text) {
        let lines = text.lines().count().max(1);
        for s in &ini.sections {
            assert!(s.line >= 1 && s.line <= lines);
            for e in &s.entries {
                assert!(e.line > s.line && e.line <= lines);
                assert!(!e.key.is_empty());
            }
        }
    }
});
