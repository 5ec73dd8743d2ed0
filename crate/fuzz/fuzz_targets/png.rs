#![no_main]

use dco_core::imgcore::codec::png::decode_png;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = decode_png(data);
});
