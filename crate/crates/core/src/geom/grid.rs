//! Uniform grid index over items with a bounding box.
//!
//! Queries return candidate supersets; callers do their own exact filtering.

use super::{Point2, Rect};
use std::collections::HashMap;

pub(crate) struct GridIndex {
    cell: f64,
    map: HashMap<(i64, i64), Vec<u32>>,
}

impl GridIndex {
    pub fn new(cell: f64) -> Self {
        GridIndex {
            cell: cell.max(1e-9),
            map: HashMap::new(),
        }
    }

    fn key(&self, x: f64, y: f64) -> (i64, i64) {
        ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, id: u32, rect: &Rect<f64>) {
        let (x0, y0) = self.key(rect.min.x, rect.min.y);
        let (x1, y1) = self.key(rect.max.x, rect.max.y);
        for ix in x0..=x1 {
            for iy in y0..=y1 {
                self.map.entry((ix, iy)).or_default().push(id);
            }
        }
    }

    pub fn insert_point(&mut self, id: u32, p: &Point2<f64>) {
        let k = self.key(p.x, p.y);
        self.map.entry(k).or_default().push(id);
    }

    /// All item ids whose cells intersect `rect`, sorted and deduplicated.
    pub fn query_rect(&self, rect: &Rect<f64>) -> Vec<u32> {
        let (x0, y0) = self.key(rect.min.x, rect.min.y);
        let (x1, y1) = self.key(rect.max.x, rect.max.y);
        let mut out = Vec::new();
        for ix in x0..=x1 {
            for iy in y0..=y1 {
                if let Some(v) = self.map.get(&(ix, iy)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Candidate ids within `r` of `p` (superset; cells touched by the disk).
    pub fn query_within(&self, p: &Point2<f64>, r: f64) -> Vec<u32> {
        let rect = Rect {
            min: Point2::new(p.x - r, p.y - r),
            max: Point2::new(p.x + r, p.y + r),
        };
        self.query_rect(&rect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_query_finds_inserted_items() {
        let mut g = GridIndex::new(10.0);
        g.insert(7, &Rect { min: Point2::new(0.0, 0.0), max: Point2::new(5.0, 5.0) });
        g.insert(9, &Rect { min: Point2::new(50.0, 50.0), max: Point2::new(55.0, 55.0) });
        let hits = g.query_rect(&Rect { min: Point2::new(-1.0, -1.0), max: Point2::new(2.0, 2.0) });
        assert_eq!(hits, vec![7]);
        let all = g.query_rect(&Rect { min: Point2::new(0.0, 0.0), max: Point2::new(60.0, 60.0) });
        assert_eq!(all, vec![7, 9]);
    }
}
