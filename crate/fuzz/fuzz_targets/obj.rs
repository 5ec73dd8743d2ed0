#![no_main]

use dco_core::occlude::{decode_obj, encode_obj};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(mesh) = decode_obj(data) else { return };
    let again = decode_obj(encode_obj(&mesh).as_bytes()).expect("re-encoded mesh decodes");
    assert_eq!(mesh.triangles(), again.triangles());
    assert_eq!(mesh.vertices(), again.vertices());
});
