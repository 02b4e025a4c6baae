#![no_main]

use coinwalk::graph::{parse_graph_json, PortGraph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = parse_graph_json(text) {
        // accepted graphs are involutive and survive a round trip
        for j in 0..g.num_vertices() {
            for k in 0..g.degree() {
                if let Ok(end) = g.zeta(j, k) {
                    let back = g.zeta(end.vertex, end.port).expect("partner port is used");
                    assert_eq!((back.vertex, back.port), (j, k));
                }
            }
        }
        let again: PortGraph = g.to_file().into_graph().expect("round trip");
        assert_eq!(again, g);
    }
});
