#![no_main]

use dco_core::flow::{decode_flo, encode_flo};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(field) = decode_flo(data) else { return };
    let again = decode_flo(&encode_flo(&field)).expect("re-encoded field decodes");
    assert_eq!(field.dims(), again.dims());
});
