#![no_main]

use libfuzzer_sys::fuzz_target;
use tunefree::harness::{read_runs, write_runs};

fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 20 {
        return;
    }
    let Ok(rows) = read_runs(data) else { return };
    // anything we accept must survive a write/read round trip
    let mut buf = Vec::new();
    write_runs(&mut buf, &rows).expect("writing accepted rows");
    let again = read_runs(buf.as_slice()).expect("reading our own output");
    assert_eq!(format!("{rows:?}"), format!("{again:?}"));
});
