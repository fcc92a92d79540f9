//! Uniform grid for fixed-radius neighbor queries.
//!
//! Sites are bucketed by `floor((p - origin) / cell_size)` over the bounding
//! box of their positions. Only occupied cells are stored: site indices are
//! sorted by row-major cell key, and a sorted directory maps each occupied
//! key to its slice. Memory is O(S) whatever the ratio of extent to cell size.
//!
//! A query scans the 3x3 block of cells around the center's cell. With
//! `cell_size >= r` this covers the whole radius-`r` disc.

use crate::geom::Point2;
use crate::sampler::SiteCloud;

#[derive(Debug, Clone)]
pub struct UniformGrid {
    cell_size: f64,
    inv_cell_size: f64,
    origin: Point2,
    dims: (i64, i64),
    /// Site indices ordered by (cell key, site index).
    order: Vec<u32>,
    /// Occupied cell keys, ascending.
    keys: Vec<u64>,
    /// `starts[k]..starts[k + 1]` is the slice of `order` for `keys[k]`.
    starts: Vec<u32>,
}

impl UniformGrid {
    pub fn build(cloud: &SiteCloud, cell_size: f64) -> Self {
        Self::from_positions(&cloud.positions(), cell_size)
    }

    /// Panics if `cell_size` is not positive and finite.
    pub fn from_positions(positions: &[Point2], cell_size: f64) -> Self {
        assert!(
            cell_size > 0.0 && cell_size.is_finite(),
            "cell_size must be positive, got {cell_size}"
        );
        assert!(positions.len() <= u32::MAX as usize);
        let inv_cell_size = 1.0 / cell_size;

        let (mut lo, mut hi) = (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in positions {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if positions.is_empty() {
            lo = Point2::ZERO;
            hi = Point2::ZERO;
        }
        let origin = lo;
        let nx = ((hi.x - lo.x) * inv_cell_size).floor() as i64 + 1;
        let ny = ((hi.y - lo.y) * inv_cell_size).floor() as i64 + 1;

        let mut grid = Self {
            cell_size,
            inv_cell_size,
            origin,
            dims: (nx, ny),
            order: Vec::new(),
            keys: Vec::new(),
            starts: Vec::new(),
        };

        let mut keyed: Vec<(u64, u32)> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let (ix, iy) = grid.cell_of(p);
                (grid.key(ix, iy), i as u32)
            })
            .collect();
        keyed.sort_unstable();

        grid.order = keyed.iter().map(|&(_, i)| i).collect();
        for (n, &(key, _)) in keyed.iter().enumerate() {
            if grid.keys.last() != Some(&key) {
                grid.keys.push(key);
                grid.starts.push(n as u32);
            }
        }
        grid.starts.push(keyed.len() as u32);
        grid
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn dims(&self) -> (i64, i64) {
        self.dims
    }

    pub fn occupied_cells(&self) -> usize {
        self.keys.len()
    }

    /// Cell coordinates of `p`; may lie outside `dims` for points off the
    /// grid's bounding box.
    pub fn cell_of(&self, p: Point2) -> (i64, i64) {
        (
            ((p.x - self.origin.x) * self.inv_cell_size).floor() as i64,
            ((p.y - self.origin.y) * self.inv_cell_size).floor() as i64,
        )
    }

    #[inline]
    fn key(&self, ix: i64, iy: i64) -> u64 {
        debug_assert!((0..self.dims.0).contains(&ix) && (0..self.dims.1).contains(&iy));
        (iy as u64) * (self.dims.0 as u64) + ix as u64
    }

    /// Site indices stored in cell `(ix, iy)`, ascending.
    pub fn bucket(&self, ix: i64, iy: i64) -> &[u32] {
        if !(0..self.dims.0).contains(&ix) || !(0..self.dims.1).contains(&iy) {
            return &[];
        }
        match self.keys.binary_search(&self.key(ix, iy)) {
            Ok(k) => &self.order[self.starts[k] as usize..self.starts[k + 1] as usize],
            Err(_) => &[],
        }
    }

    /// Calls `f(i)` for every site with `|positions[i] - center| < r`.
    ///
    /// `positions` must be the array the grid was built from. Visit order is
    /// deterministic: row by row, then by cell, then by site index.
    #[inline]
    pub fn for_each_neighbor(
        &self,
        positions: &[Point2],
        center: Point2,
        r: f64,
        mut f: impl FnMut(usize),
    ) {
        if self.keys.is_empty() {
            return;
        }
        let r2 = r * r;
        let (cx, cy) = self.cell_of(center);
        let x0 = (cx - 1).max(0);
        let x1 = (cx + 1).min(self.dims.0 - 1);
        if x0 > x1 {
            return;
        }
        for iy in (cy - 1).max(0)..=(cy + 1).min(self.dims.1 - 1) {
            let first = self.key(x0, iy);
            let last = self.key(x1, iy);
            let start = self.keys.partition_point(|&k| k < first);
            for k in start..self.keys.len() {
                if self.keys[k] > last {
                    break;
                }
                let slice = &self.order[self.starts[k] as usize..self.starts[k + 1] as usize];
                for &i in slice {
                    let i = i as usize;
                    if (positions[i] - center).norm_squared() < r2 {
                        f(i);
                    }
                }
            }
        }
    }

    /// Indices of sites strictly within `r` of `center`, in visit order.
    pub fn neighbors(&self, positions: &[Point2], center: Point2, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_neighbor(positions, center, r, |i| out.push(i));
        out
    }
}
