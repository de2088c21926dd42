//! Binary PGM (P5) rendering of navigation maps.

use crate::geometry::InteractionZone;
use crate::navmap::NavMap;

pub fn encode_pgm(width: usize, height: usize, comment: &str, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n# {comment}\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

fn header_comment(map: &NavMap) -> String {
    format!(
        "resolution {} scale {:.6} m/px center {:.6} {:.6} agent {}",
        map.resolution(),
        map.scale(),
        map.center().x,
        map.center().y,
        map.agent_name()
    )
}

/// 255 for walkable pixels, 0 otherwise. Image row 0 is the smallest `z`.
pub fn render_navmap(map: &NavMap) -> Vec<u8> {
    let px: Vec<u8> = map
        .grid()
        .iter()
        .map(|&w| if w { 255 } else { 0 })
        .collect();
    encode_pgm(
        map.resolution(),
        map.resolution(),
        &header_comment(map),
        &px,
    )
}

/// Region `l` of `n` gets gray `round(l * 255 / n)`; non-walkable is 0.
pub fn render_regions(map: &NavMap) -> Vec<u8> {
    let labels = map.labels();
    let n = labels.region_count().max(1) as f64;
    let px: Vec<u8> = labels
        .labels
        .iter()
        .map(|&l| (l as f64 * 255.0 / n).round() as u8)
        .collect();
    encode_pgm(
        map.resolution(),
        map.resolution(),
        &header_comment(map),
        &px,
    )
}

/// Zone pixels 255, other walkable pixels 96, the rest 0.
pub fn render_zone_mask(map: &NavMap, zones: &[InteractionZone]) -> Vec<u8> {
    let mut px: Vec<u8> = map.grid().iter().map(|&w| if w { 96 } else { 0 }).collect();
    for z in zones {
        for i in map.rasterize_polygon(&z.polygon) {
            px[i] = 255;
        }
    }
    encode_pgm(
        map.resolution(),
        map.resolution(),
        &header_comment(map),
        &px,
    )
}
