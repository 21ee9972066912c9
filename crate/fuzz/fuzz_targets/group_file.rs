#![no_main]

use kleinian::groupfile::{parse_group, write_group};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(group) = parse_group(text) {
        let again = parse_group(&write_group(&group)).expect("written group files parse");
        assert_eq!(again.generators().len(), group.generators().len());
    }
});
