#![no_main]

use dco_core::imgcore::codec::{decode_pfm, encode_pfm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(map) = decode_pfm(data) else { return };
    let again = decode_pfm(&encode_pfm(&map)).expect("re-encoded map decodes");
    assert_eq!(map, again);
});
