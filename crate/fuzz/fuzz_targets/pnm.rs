#![no_main]

use dco_core::imgcore::codec::{decode_pnm, encode_pgm, encode_ppm};
use dco_core::imgcore::Image;
use libfuzzer_sys::fuzz_target;

fn dims(img: &Image) -> (usize, usize) {
    match img {
        Image::Gray(g) => g.dims(),
        Image::Color(c) => c.dims(),
    }
}

fuzz_target!(|data: &[u8]| {
    let Ok(img) = decode_pnm(data) else { return };
    let bytes = match &img {
        Image::Gray(g) => encode_pgm(g),
        Image::Color(c) => encode_ppm(c),
    };
    let again = decode_pnm(&bytes).expect("re-encoded image decodes");
    assert_eq!(dims(&img), dims(&again));
});
