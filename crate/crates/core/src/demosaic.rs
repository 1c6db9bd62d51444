//! Nearest-neighbor color-difference demosaic.
//!
//! Three passes over each 2x2 CFA tile:
//!
//! 1. Missing G at R/B sites is copied from the tile's reference green, the
//!    first G site of the tile in row-major order (always at distance 1).
//! 2. `R - G` and `B - G` are formed at the R and B sites.
//! 3. Those differences are spread nearest-neighbor over the tile and added
//!    back to the green plane.
//!
//! Neighbor lookup never leaves the tile. Every pixel whose green *is* the
//! reference green therefore reconstructs the tile's R and B samples exactly,
//! which is what makes a top-left 2x downsample of the output consist purely
//! of sensor samples. Differences are taken in `f64`.

use crate::error::{Error, Result};
use crate::raw::{BayerPlane, Channel, RgbImage};

/// Tile geometry for a CFA: site offsets of R, B, reference G and other G.
#[derive(Debug, Clone, Copy)]
struct TileSites {
    r: (usize, usize),
    b: (usize, usize),
    g_ref: (usize, usize),
    g_other: (usize, usize),
}

impl TileSites {
    fn for_plane(plane: &BayerPlane) -> Self {
        let cfa = plane.cfa();
        let mut r = (0, 0);
        let mut b = (0, 0);
        let mut greens = Vec::with_capacity(2);
        for dy in 0..2 {
            for dx in 0..2 {
                match cfa.color_at(dx, dy) {
                    Channel::R => r = (dx, dy),
                    Channel::B => b = (dx, dy),
                    Channel::G => greens.push((dx, dy)),
                }
            }
        }
        TileSites {
            r,
            b,
            g_ref: greens[0],
            g_other: greens[1],
        }
    }
}

pub fn nn_demosaic(plane: &BayerPlane) -> Result<RgbImage> {
    let (w, h) = (plane.width(), plane.height());
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::InvalidDimensions {
            width: w,
            height: h,
            reason: "demosaic needs even dimensions",
        });
    }
    if plane.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "mosaic contains non-finite samples".into(),
        ));
    }
    let sites = TileSites::for_plane(plane);
    let mut out = RgbImage::filled(w, h, [0.0; 3]);

    for ty in (0..h).step_by(2) {
        for tx in (0..w).step_by(2) {
            let at = |(dx, dy): (usize, usize)| f64::from(plane.get(tx + dx, ty + dy));
            let r = at(sites.r);
            let b = at(sites.b);
            let g_ref = at(sites.g_ref);

            // Steps 1 and 2: reference green fills R/B sites, differences at R/B.
            let r_minus_g = r - g_ref;
            let b_minus_g = b - g_ref;

            // Step 3. Pixels whose green is the reference green get back the
            // tile samples exactly; the second green site gets corrected R/B.
            let anchored = [r as f32, g_ref as f32, b as f32];
            for site in [sites.r, sites.b, sites.g_ref] {
                out.set(tx + site.0, ty + site.1, anchored);
            }
            let g = at(sites.g_other);
            out.set(
                tx + sites.g_other.0,
                ty + sites.g_other.1,
                [(g + r_minus_g) as f32, g as f32, (g + b_minus_g) as f32],
            );
        }
    }
    Ok(out)
}
