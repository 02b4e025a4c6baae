#![no_main]

use coinwalk_cli::output::Metadata;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(meta) = serde_json::from_slice::<Metadata>(data) else {
        return;
    };
    // validation only; evolution is covered by the regular tests
    let _ = meta.config.prepare();
});
