#![no_main]

use headtrack::io;
use libfuzzer_sys::fuzz_target;

// Whatever parses must survive write -> parse -> write byte for byte.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = io::parse_detections(text) {
        let once = io::write_detections(map.values().flatten());
        let again = io::parse_detections(&once).expect("rewritten detections parse");
        assert_eq!(io::write_detections(again.values().flatten()), once);
    }
    if let Ok(results) = io::parse_tracks(text) {
        let once = io::write_tracks(&results);
        let again = io::parse_tracks(&once).expect("rewritten tracks parse");
        assert_eq!(io::write_tracks(&again), once);
    }
    if let Ok(gt) = io::parse_ground_truth(text) {
        let once = io::write_ground_truth(&gt);
        let again = io::parse_ground_truth(&once).expect("rewritten ground truth parses");
        assert_eq!(io::write_ground_truth(&again), once);
    }
});
