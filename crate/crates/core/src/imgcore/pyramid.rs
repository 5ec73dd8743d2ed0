use crate::error::{Error, Result};
use crate::imgcore::GrayImage;

/// Smallest side allowed for the coarsest pyramid level.
pub const MIN_PYRAMID_DIM: usize = 8;

/// Halves each dimension by averaging 2x2 blocks (quarter area).
///
/// Odd trailing rows/columns are dropped.
pub fn downsample_half(img: &GrayImage) -> Result<GrayImage> {
    let (w, h) = img.dims();
    if w < 2 || h < 2 {
        return Err(Error::Dimension(format!("cannot halve a {w}x{h} image")));
    }
    let (ow, oh) = (w / 2, h / 2);
    let src = img.data();
    let mut data = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        let r0 = &src[2 * y * w..];
        let r1 = &src[(2 * y + 1) * w..];
        for x in 0..ow {
            let s = r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1];
            data.push((0.25 * s).clamp(0.0, 1.0));
        }
    }
    GrayImage::new(ow, oh, data)
}

/// Level 0 is `img`; each further level is [`downsample_half`] of the previous.
pub fn build_pyramid(img: &GrayImage, levels: usize) -> Result<Vec<GrayImage>> {
    if levels == 0 {
        return Err(Error::Dimension("pyramid needs at least one level".into()));
    }
    let (w, h) = img.dims();
    let shrink = 1usize << (levels - 1);
    if w / shrink < MIN_PYRAMID_DIM || h / shrink < MIN_PYRAMID_DIM {
        return Err(Error::Dimension(format!(
            "{levels} levels on {w}x{h} leaves a coarsest level below {MIN_PYRAMID_DIM}px"
        )));
    }
    let mut out = Vec::with_capacity(levels);
    out.push(img.clone());
    for _ in 1..levels {
        let next = downsample_half(out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn halves_hd_frame() {
        let img = GrayImage::filled(1280, 720, 0.3);
        assert_eq!(downsample_half(&img).unwrap().dims(), (640, 360));
    }

    #[test]
    fn block_mean() {
        let img = GrayImage::new(2, 2, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let out = downsample_half(&img).unwrap();
        assert_eq!(out.dims(), (1, 1));
        assert_eq!(out.get(0, 0), 0.5);
    }

    #[test]
    fn constant_preserved_and_odd_dims_floor() {
        let img = GrayImage::filled(7, 5, 0.37);
        let out = downsample_half(&img).unwrap();
        assert_eq!(out.dims(), (3, 2));
        assert!(out.data().iter().all(|&v| (v - 0.37).abs() < 1e-7));
    }

    #[test]
    fn degenerate_dimension() {
        assert!(matches!(
            downsample_half(&GrayImage::filled(1, 8, 0.0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn pyramid_levels() {
        let img = GrayImage::filled(320, 180, 0.5);
        let p = build_pyramid(&img, 3).unwrap();
        let dims: Vec<_> = p.iter().map(|l| l.dims()).collect();
        assert_eq!(dims, vec![(320, 180), (160, 90), (80, 45)]);
        let single = build_pyramid(&img, 1).unwrap();
        assert_eq!(single, vec![img]);
        assert!(matches!(
            build_pyramid(&GrayImage::filled(8, 8, 0.0), 4),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        #[test]
        fn downsample_commutes_with_shift(
            w in 2usize..12, h in 2usize..12, c in 0.0f32..0.3, seed in any::<u64>()
        ) {
            let mut s = seed;
            let img = GrayImage::from_fn(w, h, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 40) as f32 / (1u64 << 24) as f32 * 0.7
            });
            let shifted = GrayImage::from_fn(w, h, |x, y| img.get(x, y) + c);
            let a = downsample_half(&shifted).unwrap();
            let b = downsample_half(&img).unwrap();
            for (x, y) in a.data().iter().zip(b.data()) {
                prop_assert!((x - (y + c)).abs() < 1e-6);
            }
        }
    }
}
