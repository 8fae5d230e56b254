use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::dimension::attractor_points;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::io::RunConfig;
use crate::scalar::Scalar;
use crate::symbolic::IfsSystem;

pub const MAX_IMAGE_SIZE: u32 = 4096;
/// Height of the strip a 1D attractor is drawn on.
pub const STRIP_HEIGHT: u32 = 32;

/// Occupancy grid, row 0 at the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    pub occupied: Vec<bool>,
}

impl Raster {
    pub fn occupied_pixels(&self) -> usize {
        self.occupied.iter().filter(|&&b| b).count()
    }

    pub fn occupied_fraction(&self) -> f64 {
        self.occupied_pixels() as f64 / self.occupied.len() as f64
    }

    /// Maximal horizontal runs of occupied pixels in row `y`.
    pub fn runs_in_row(&self, y: u32) -> usize {
        let row = &self.occupied[(y * self.width) as usize..((y + 1) * self.width) as usize];
        row.iter()
            .enumerate()
            .filter(|&(i, &b)| b && (i == 0 || !row[i - 1]))
            .count()
    }
}

/// Bins `cloud ∩ [0,1]^d` to a `size`-pixel grid; pixel `k` covers
/// `[k/size, (k+1)/size)` with 1 folded into the last pixel. The y-axis
/// points up. Points within `1e-9` pixel of an edge count as on it, so
/// rounding in `k/size` never drops them into pixel `k-1`.
pub fn rasterize(cloud: &PointCloud, size: u32) -> Result<Raster> {
    if size == 0 || size > MAX_IMAGE_SIZE {
        return Err(Error::OutOfRange {
            name: "size",
            value: size.to_string(),
            range: "[1, 4096]",
        });
    }
    let dim = cloud.dim();
    let height = if dim == 1 { STRIP_HEIGHT } else { size };
    let mut occupied = vec![false; (size * height) as usize];
    let bin = |v: f64| -> Option<u32> {
        if !(0.0..=1.0).contains(&v) {
            return None;
        }
        Some(((v * size as f64 + 1e-9).floor() as u32).min(size - 1))
    };
    for p in cloud.points() {
        let Some(x) = bin(p[0]) else { continue };
        if dim == 1 {
            for y in 0..height {
                occupied[(y * size + x) as usize] = true;
            }
        } else if let Some(y) = bin(p[1]) {
            occupied[((size - 1 - y) * size + x) as usize] = true;
        }
    }
    Ok(Raster {
        width: size,
        height,
        occupied,
    })
}

fn latin1(s: &str) -> String {
    s.chars()
        .map(|c| if (c as u32) < 256 && !c.is_control() { c } else { '?' })
        .collect()
}

/// Writes an 8-bit grayscale PNG, black on white, with the run config as
/// text chunks.
pub fn render_attractor(
    ifs: &IfsSystem,
    resolution: &Scalar,
    size: u32,
    out: impl AsRef<Path>,
    config: &RunConfig,
) -> Result<Raster> {
    let raster = rasterize(&attractor_points(ifs, resolution)?, size)?;
    let path = out.as_ref();
    let err = |e: &dyn std::fmt::Display| Error::Invalid(format!("{}: {e}", path.display()));
    let file = File::create(path).map_err(|e| err(&e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), raster.width, raster.height);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    for (k, v) in config.entries() {
        let key: String = latin1(k).chars().take(79).collect();
        enc.add_text_chunk(key, latin1(v)).map_err(|e| err(&e))?;
    }
    let mut w = enc.write_header().map_err(|e| err(&e))?;
    let data: Vec<u8> = raster
        .occupied
        .iter()
        .map(|&b| if b { 0 } else { 255 })
        .collect();
    w.write_image_data(&data).map_err(|e| err(&e))?;
    w.finish().map_err(|e| err(&e))?;
    Ok(raster)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{example_document, ExampleParams};
    use crate::scalar::Backend;

    fn example(name: &str) -> IfsSystem {
        example_document(name, &ExampleParams::new())
            .unwrap()
            .build(None)
            .unwrap()
    }

    /// Independent count: pixels hit by the left endpoints of level-7 intervals.
    fn cantor_oracle(size: u64) -> (usize, usize) {
        let mut px = std::collections::BTreeSet::new();
        for w in 0u64..128 {
            // numerator over 3^7 from the base-3 digits {0, 2}
            let num: u64 = (0..7).map(|i| ((w >> (6 - i)) & 1) * 2 * 3u64.pow(6 - i as u32)).sum();
            px.insert((num * size / 2187).min(size - 1));
        }
        let v: Vec<u64> = px.into_iter().collect();
        let runs = v.iter().enumerate().filter(|&(i, &p)| i == 0 || v[i - 1] + 1 != p).count();
        (v.len(), runs)
    }

    #[test]
    fn cantor_strip() {
        let ifs = example("cantor-1d");
        let res = Scalar::from_ratio(1, 2187, Backend::Exact);
        let cloud = attractor_points(&ifs, &res).unwrap();
        for size in [1024u32, 2187, 4096] {
            let r = rasterize(&cloud, size).unwrap();
            let (pixels, runs) = cantor_oracle(size as u64);
            assert_eq!(r.height, STRIP_HEIGHT);
            assert_eq!(r.occupied_pixels(), pixels * STRIP_HEIGHT as usize);
            assert_eq!(r.runs_in_row(0), runs);
        }
        assert_eq!(cantor_oracle(2187), (128, 128));
    }

    #[test]
    fn plane_raster_and_determinism() {
        let ifs = example("plane-intermediate");
        let res = Scalar::from_ratio(1, 625, Backend::Exact);
        let mut cfg = RunConfig::new();
        cfg.set("command", "render").set("spec", "plane-intermediate");
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.png"), dir.path().join("b.png"));
        let r = render_attractor(&ifs, &res, 256, &a, &cfg).unwrap();
        render_attractor(&ifs, &res, 256, &b, &cfg).unwrap();
        let f = r.occupied_fraction();
        assert!(f > 0.0 && f < 0.5);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert!(rasterize(&attractor_points(&ifs, &res).unwrap(), 5000).is_err());
    }
}
