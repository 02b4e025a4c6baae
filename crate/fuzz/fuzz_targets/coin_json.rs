#![no_main]

use coinwalk::coin::parse_coin_json;
use coinwalk::graph::PortGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = parse_coin_json(text) {
        // building may fail (non-unitary, wrong size) but must not panic
        let _ = config.build(&PortGraph::cycle(5).unwrap());
    }
});
