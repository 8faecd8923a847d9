//! Axis-aligned boxes and the overlap / distance metrics built on them.

use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle in continuous pixel coordinates.
///
/// `(x, y)` is the top-left corner. Width and height are strictly positive
/// for every box built through [`BoundingBox::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    /// Returns `None` unless all fields are finite and `w, h > 0`.
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Option<Self> {
        let valid = x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite();
        (valid && w > 0.0 && h > 0.0).then_some(Self { x, y, w, h })
    }

    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Option<Self> {
        Self::new(cx - w / 2.0, cy - h / 2.0, w, h)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    /// Overlap rectangle, `None` when the overlap has zero area.
    pub fn intersection(&self, other: &BoundingBox) -> Option<BoundingBox> {
        // measured from the later-starting edge so identical boxes intersect exactly
        let span = |a0: f64, aw: f64, b0: f64, bw: f64| {
            if a0 >= b0 {
                (a0, aw.min(bw - (a0 - b0)))
            } else {
                (b0, bw.min(aw - (b0 - a0)))
            }
        };
        let (x0, w) = span(self.x, self.w, other.x, other.w);
        let (y0, h) = span(self.y, self.h, other.y, other.h);
        BoundingBox::new(x0, y0, w, h)
    }

    /// Clip to `[0, width] × [0, height]`; `None` if nothing remains.
    pub fn clip(&self, width: f64, height: f64) -> Option<BoundingBox> {
        let x0 = self.x.max(0.0);
        let y0 = self.y.max(0.0);
        let x1 = self.right().min(width);
        let y1 = self.bottom().min(height);
        BoundingBox::new(x0, y0, x1 - x0, y1 - y0)
    }

    /// Same center, sides multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> BoundingBox {
        let (cx, cy) = self.center();
        BoundingBox {
            x: cx - self.w * factor / 2.0,
            y: cy - self.h * factor / 2.0,
            w: self.w * factor,
            h: self.h * factor,
        }
    }
}

/// Intersection over union. Touching or disjoint boxes give 0.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    match a.intersection(b) {
        None => 0.0,
        Some(inter) => {
            let i = inter.area();
            let union = a.area() + b.area() - i;
            (i / union).clamp(0.0, 1.0)
        }
    }
}

/// Euclidean distance between box centers.
pub fn center_error(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox::new(x, y, w, h).unwrap()
    }

    /// Counts unit pixels covered by integer boxes.
    fn raster_iou(a: (i64, i64, i64, i64), b: (i64, i64, i64, i64)) -> f64 {
        let inside = |r: (i64, i64, i64, i64), px: i64, py: i64| {
            px >= r.0 && px < r.0 + r.2 && py >= r.1 && py < r.1 + r.3
        };
        let (mut inter, mut union) = (0u64, 0u64);
        let x0 = a.0.min(b.0);
        let y0 = a.1.min(b.1);
        let x1 = (a.0 + a.2).max(b.0 + b.2);
        let y1 = (a.1 + a.3).max(b.1 + b.3);
        for py in y0..y1 {
            for px in x0..x1 {
                let (ia, ib) = (inside(a, px, py), inside(b, px, py));
                inter += (ia && ib) as u64;
                union += (ia || ib) as u64;
            }
        }
        inter as f64 / union as f64
    }

    #[test]
    fn iou_examples() {
        assert_eq!(iou(&bb(0., 0., 10., 10.), &bb(0., 0., 10., 10.)), 1.0);
        assert_eq!(iou(&bb(0., 0., 10., 10.), &bb(20., 20., 5., 5.)), 0.0);
        let v = iou(&bb(0., 0., 10., 10.), &bb(5., 0., 10., 10.));
        assert!((v - 50.0 / 150.0).abs() < 1e-15);
    }

    #[test]
    fn touching_edges_have_zero_overlap() {
        assert_eq!(iou(&bb(0., 0., 10., 10.), &bb(10., 0., 10., 10.)), 0.0);
        assert_eq!(iou(&bb(0., 0., 10., 10.), &bb(10., 10., 3., 3.)), 0.0);
    }

    #[test]
    fn center_error_examples() {
        let a = bb(0., 0., 10., 10.);
        assert_eq!(center_error(&a, &a), 0.0);
        assert_eq!(center_error(&a, &bb(3., 4., 10., 10.)), 5.0);
        let d = center_error(&bb(0., 0., 2., 2.), &bb(0., 0., 4., 4.));
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_boxes() {
        assert!(BoundingBox::new(0., 0., 0., 1.).is_none());
        assert!(BoundingBox::new(0., 0., 1., -1.).is_none());
        assert!(BoundingBox::new(f64::NAN, 0., 1., 1.).is_none());
    }

    #[test]
    fn clip_to_frame() {
        let c = bb(-5., -5., 20., 20.).clip(10., 10.).unwrap();
        assert_eq!(c, bb(0., 0., 10., 10.));
        assert!(bb(20., 20., 5., 5.).clip(10., 10.).is_none());
    }

    fn any_box() -> impl Strategy<Value = BoundingBox> {
        (-50.0..50.0f64, -50.0..50.0f64, 0.1..40.0f64, 0.1..40.0f64)
            .prop_map(|(x, y, w, h)| bb(x, y, w, h))
    }

    fn int_box() -> impl Strategy<Value = (i64, i64, i64, i64)> {
        (-10i64..10, -10i64..10, 1i64..12, 1i64..12)
    }

    proptest! {
        #[test]
        fn iou_symmetric(a in any_box(), b in any_box()) {
            prop_assert_eq!(iou(&a, &b), iou(&b, &a));
            let v = iou(&a, &b);
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn iou_self_is_one(a in any_box()) {
            prop_assert_eq!(iou(&a, &a), 1.0);
        }

        #[test]
        fn iou_matches_rasterization(a in int_box(), b in int_box()) {
            let fa = bb(a.0 as f64, a.1 as f64, a.2 as f64, a.3 as f64);
            let fb = bb(b.0 as f64, b.1 as f64, b.2 as f64, b.3 as f64);
            prop_assert_eq!(iou(&fa, &fb), raster_iou(a, b));
        }

        #[test]
        fn center_error_triangle(a in any_box(), b in any_box(), c in any_box()) {
            let lhs = center_error(&a, &c);
            let rhs = center_error(&a, &b) + center_error(&b, &c);
            prop_assert!(lhs <= rhs + 1e-9);
        }
    }
}
