#![no_main]

use coinwalk_cli::parse_start;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((j, k)) = parse_start(text) {
        assert_eq!(parse_start(&format!("{j},{k}")), Ok((j, k)));
    }
});
