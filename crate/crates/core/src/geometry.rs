//! Small geometric helpers shared by the cost terms.

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Distance in the xy-plane from point `p` to the segment `a`-`b`
/// (z coordinates are ignored).
pub fn point_segment_distance_xy(p: (f64, f64), a: &Vec3, b: &Vec3) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let (px, py) = (p.0 - a.x, p.1 - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        ((px * dx + py * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (px - t * dx).hypot(py - t * dy)
}

pub fn xy_norm(v: &Vec3) -> f64 {
    v.x.hypot(v.y)
}
