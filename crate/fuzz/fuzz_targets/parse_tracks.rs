#![no_main]

use headtrack::{io, Error};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Err(e) = io::parse_tracks(text) {
        match e {
            Error::Parse { line, .. } => assert!(line >= 1 && line <= text.lines().count().max(1)),
            other => panic!("unlocated error {other:?}"),
        }
    }
});
