//! Uniform bucket grid for nearest-point queries on a PPP.

use super::ppp::Point;

pub struct GridIndex {
    origin: Point,
    cell: f64,
    cols: usize,
    rows: usize,
    /// `starts[c]..starts[c + 1]` indexes `order` for cell `c`
    starts: Vec<u32>,
    order: Vec<u32>,
    /// points copied in bucket order, for cache-friendly scans
    sorted: Vec<Point>,
}

impl GridIndex {
    /// Cells are sized for about `per_cell` points each.
    pub fn new(points: &[Point], per_cell: f64) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let (w, h) = ((hi[0] - lo[0]).max(1e-9), (hi[1] - lo[1]).max(1e-9));
        let cells_wanted = (points.len() as f64 / per_cell).max(1.0);
        let cell = (w * h / cells_wanted).sqrt().max(1e-9);
        let cols = ((w / cell).floor() as usize + 1).min(1 << 15);
        let rows = ((h / cell).floor() as usize + 1).min(1 << 15);

        let mut grid = GridIndex {
            origin: lo,
            cell,
            cols,
            rows,
            starts: vec![0; cols * rows + 1],
            order: Vec::new(),
            sorted: Vec::new(),
        };
        let ids: Vec<u32> = points.iter().map(|p| grid.cell_of(p) as u32).collect();
        for &c in &ids {
            grid.starts[c as usize + 1] += 1;
        }
        for c in 0..cols * rows {
            grid.starts[c + 1] += grid.starts[c];
        }
        let mut fill = grid.starts.clone();
        grid.order = vec![0; points.len()];
        grid.sorted = vec![[0.0; 2]; points.len()];
        for (i, &c) in ids.iter().enumerate() {
            let slot = fill[c as usize] as usize;
            grid.order[slot] = i as u32;
            grid.sorted[slot] = points[i];
            fill[c as usize] += 1;
        }
        grid
    }

    fn coords(&self, p: &Point) -> (usize, usize) {
        let cx = ((p[0] - self.origin[0]) / self.cell).floor().clamp(0.0, (self.cols - 1) as f64) as usize;
        let cy = ((p[1] - self.origin[1]) / self.cell).floor().clamp(0.0, (self.rows - 1) as f64) as usize;
        (cx, cy)
    }

    fn cell_of(&self, p: &Point) -> usize {
        let (cx, cy) = self.coords(p);
        cy * self.cols + cx
    }

    #[inline]
    fn scan_cell(&self, c: usize, q: Point, best: &mut (usize, f64)) {
        for slot in self.starts[c] as usize..self.starts[c + 1] as usize {
            let p = self.sorted[slot];
            let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
            if d2 <= best.1 {
                let i = self.order[slot] as usize;
                if d2 < best.1 || i < best.0 {
                    *best = (i, d2);
                }
            }
        }
    }

    /// Index and squared distance of the point closest to `q`, or `None` when empty.
    pub fn nearest(&self, q: Point) -> Option<(usize, f64)> {
        if self.sorted.is_empty() {
            return None;
        }
        let (cx, cy) = self.coords(&q);
        let (cx, cy) = (cx as isize, cy as isize);
        // distance from q to the boundary of its own (clamped) cell block
        let fx = (q[0] - self.origin[0]) / self.cell - cx as f64;
        let fy = (q[1] - self.origin[1]) / self.cell - cy as f64;
        let slack = fx.min(1.0 - fx).min(fy).min(1.0 - fy).max(0.0) * self.cell;

        let mut best = (usize::MAX, f64::INFINITY);
        let max_ring = self.cols.max(self.rows) as isize;
        for ring in 0..=max_ring {
            if best.0 != usize::MAX {
                // every point in ring `ring` is at least this far away
                let reach = slack + (ring - 1).max(0) as f64 * self.cell;
                if reach * reach > best.1 {
                    break;
                }
            }
            let (x0, x1) = ((cx - ring).max(0), (cx + ring).min(self.cols as isize - 1));
            for y in (cy - ring).max(0)..=(cy + ring).min(self.rows as isize - 1) {
                let row = y as usize * self.cols;
                if (y - cy).abs() == ring {
                    for x in x0..=x1 {
                        self.scan_cell(row + x as usize, q, &mut best);
                    }
                } else {
                    // side columns only
                    for x in [cx - ring, cx + ring] {
                        if x >= x0 && x <= x1 {
                            self.scan_cell(row + x as usize, q, &mut best);
                        }
                    }
                }
            }
        }
        Some(best)
    }
}
