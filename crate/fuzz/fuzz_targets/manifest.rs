#![no_main]

use std::path::Path;

use dco_cli::manifest::decode_manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = decode_manifest(data, Path::new("/seq"));
});
