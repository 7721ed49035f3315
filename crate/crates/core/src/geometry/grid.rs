//! Uniform hash grid for broad-phase obstacle lookup.

use std::collections::HashMap;

use crate::math::Vec2;

use super::obstacles::ObstacleSet;

/// Handle to one obstacle primitive in an [`ObstacleSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObstacleRef {
    /// Index into `ObstacleSet::circles`.
    Circle(u32),
    /// Polyline index and segment index within it.
    Segment { polyline: u32, segment: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CellSpan {
    min: (i32, i32),
    max: (i32, i32),
}

impl CellSpan {
    fn cells(self) -> impl Iterator<Item = (i32, i32)> {
        (self.min.0..=self.max.0)
            .flat_map(move |i| (self.min.1..=self.max.1).map(move |j| (i, j)))
    }
}

/// Map from integer cell coordinates to the obstacles whose bounds touch
/// the cell. Circles are binned by the box around center ± radius and
/// polyline segments by their bounding box.
#[derive(Debug, Clone)]
pub struct HashGrid {
    cell_size: f64,
    inv_cell: f64,
    cells: HashMap<(i32, i32), Vec<ObstacleRef>>,
    circle_spans: Vec<Option<CellSpan>>,
}

/// Grid granularity when no circles are present.
pub const FALLBACK_CELL_SIZE: f64 = 50.0;

impl HashGrid {
    pub fn new(cell_size: f64) -> Self {
        let cell_size = if cell_size.is_finite() && cell_size > 0.0 {
            cell_size
        } else {
            FALLBACK_CELL_SIZE
        };
        Self {
            cell_size,
            inv_cell: 1.0 / cell_size,
            cells: HashMap::new(),
            circle_spans: Vec::new(),
        }
    }

    /// Cell size of four times the largest circle radius.
    pub fn default_cell_size(set: &ObstacleSet) -> f64 {
        let r = set.max_circle_radius();
        if r > 0.0 {
            4.0 * r
        } else {
            FALLBACK_CELL_SIZE
        }
    }

    pub fn build(set: &ObstacleSet) -> Self {
        Self::build_with_cell_size(set, Self::default_cell_size(set))
    }

    pub fn build_with_cell_size(set: &ObstacleSet, cell_size: f64) -> Self {
        let mut grid = Self::new(cell_size);
        grid.circle_spans = vec![None; set.circles.len()];
        for (i, c) in set.circles.iter().enumerate() {
            grid.insert_circle(i, c.center, c.radius);
        }
        for (pi, poly) in set.polylines.iter().enumerate() {
            for (si, (a, b)) in poly.segments().enumerate() {
                let span = grid.span(
                    Vec2::new(a.x.min(b.x), a.y.min(b.y)),
                    Vec2::new(a.x.max(b.x), a.y.max(b.y)),
                );
                let r = ObstacleRef::Segment {
                    polyline: pi as u32,
                    segment: si as u32,
                };
                for cell in span.cells() {
                    grid.cells.entry(cell).or_default().push(r);
                }
            }
        }
        grid
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    #[inline]
    fn cell_of(&self, p: Vec2) -> (i32, i32) {
        (
            (p.x * self.inv_cell).floor() as i32,
            (p.y * self.inv_cell).floor() as i32,
        )
    }

    fn span(&self, lo: Vec2, hi: Vec2) -> CellSpan {
        CellSpan {
            min: self.cell_of(lo),
            max: self.cell_of(hi),
        }
    }

    fn insert_circle(&mut self, index: usize, center: Vec2, radius: f64) {
        let r = Vec2::new(radius, radius);
        let span = self.span(center - r, center + r);
        let handle = ObstacleRef::Circle(index as u32);
        for cell in span.cells() {
            self.cells.entry(cell).or_default().push(handle);
        }
        if self.circle_spans.len() <= index {
            self.circle_spans.resize(index + 1, None);
        }
        self.circle_spans[index] = Some(span);
    }

    fn remove_circle(&mut self, index: usize) {
        let Some(span) = self.circle_spans.get_mut(index).and_then(Option::take) else {
            return;
        };
        let handle = ObstacleRef::Circle(index as u32);
        for cell in span.cells() {
            if let Some(list) = self.cells.get_mut(&cell) {
                list.retain(|r| *r != handle);
                if list.is_empty() {
                    self.cells.remove(&cell);
                }
            }
        }
    }

    /// Re-bins circle `index` after it moved; segments are untouched.
    pub fn update_circle(&mut self, index: usize, center: Vec2, radius: f64) {
        let r = Vec2::new(radius, radius);
        let new_span = self.span(center - r, center + r);
        if self.circle_spans.get(index).copied().flatten() == Some(new_span) {
            return;
        }
        self.remove_circle(index);
        self.insert_circle(index, center, radius);
    }

    /// Re-bins every circle of `set` (call after advancing moving obstacles).
    pub fn update_circles(&mut self, set: &ObstacleSet) {
        for (i, c) in set.circles.iter().enumerate() {
            self.update_circle(i, c.center, c.radius);
        }
    }

    /// Every obstacle whose binned bounds touch the square around the disc
    /// `(p, radius)`; a superset of the obstacles intersecting the disc.
    /// Sorted and free of duplicates.
    pub fn query(&self, p: Vec2, radius: f64) -> Vec<ObstacleRef> {
        let mut out = Vec::new();
        self.query_into(p, radius, &mut out);
        out
    }

    pub fn query_into(&self, p: Vec2, radius: f64, out: &mut Vec<ObstacleRef>) {
        out.clear();
        let r = Vec2::new(radius.max(0.0), radius.max(0.0));
        let span = self.span(p - r, p + r);
        for cell in span.cells() {
            if let Some(list) = self.cells.get(&cell) {
                out.extend_from_slice(list);
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    /// Query covering the disc-swept segment from `p0` to `p1`.
    pub fn query_swept(&self, p0: Vec2, p1: Vec2, radius: f64) -> Vec<ObstacleRef> {
        let mid = p0.lerp(p1, 0.5);
        self.query(mid, 0.5 * p0.distance(p1) + radius)
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }

    #[cfg(test)]
    pub(crate) fn cells_containing(&self, handle: ObstacleRef) -> Vec<(i32, i32)> {
        let mut cells: Vec<_> = self
            .cells
            .iter()
            .filter(|(_, list)| list.contains(&handle))
            .map(|(k, _)| *k)
            .collect();
        cells.sort_unstable();
        cells
    }
}
