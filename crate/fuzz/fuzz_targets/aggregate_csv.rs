#![no_main]

use libfuzzer_sys::fuzz_target;
use tricode_cli::aggregate::{read_aggregate, write_rows};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_aggregate(data) else {
        return;
    };
    if rows.is_empty() {
        return;
    }
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows).expect("rows serialize");
    let again = read_aggregate(buf.as_slice()).expect("written table reads back");
    assert_eq!(again.len(), rows.len());
});
