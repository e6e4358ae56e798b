use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::quadrature::fourier::FourierShape;

/// A maximal run of occupied cells along the last axis.
///
/// `prefix` holds the indices along the leading `N-1` axes (unused slots are
/// zero); `start..=end` is the index range along the last axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Run {
    pub prefix: [i64; 2],
    pub start: i64,
    pub end: i64,
}

impl Run {
    pub fn len(&self) -> i64 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

/// A union of cubic cells of side `h` on a lattice in `R^N`, `N ∈ {2, 3}`.
///
/// Cell `i` covers `origin + h·[i, i+1)`. Cells are stored as sorted,
/// merged runs along the last axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GridShape {
    dim: usize,
    cell_size: f64,
    origin: Vec<f64>,
    runs: Vec<Run>,
    cells: u64,
}

impl GridShape {
    /// Builds a shape from a list of cell indices (duplicates are merged).
    pub fn from_cells<I>(dim: usize, cell_size: f64, origin: Vec<f64>, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<i64>>,
    {
        check_header(dim, cell_size, &origin)?;
        let mut keyed: Vec<([i64; 2], i64)> = Vec::new();
        for c in cells {
            if c.len() != dim {
                return Err(Error::param(format!(
                    "cell index has {} coordinates, expected {dim}",
                    c.len()
                )));
            }
            let mut prefix = [0; 2];
            prefix[..dim - 1].copy_from_slice(&c[..dim - 1]);
            keyed.push((prefix, c[dim - 1]));
        }
        keyed.sort_unstable();
        keyed.dedup();
        let mut runs: Vec<Run> = Vec::new();
        for (prefix, x) in keyed {
            match runs.last_mut() {
                Some(r) if r.prefix == prefix && r.end + 1 == x => r.end = x,
                _ => runs.push(Run {
                    prefix,
                    start: x,
                    end: x,
                }),
            }
        }
        Self::from_runs(dim, cell_size, origin, runs)
    }

    /// Builds a shape from runs, normalising order and merging overlaps.
    pub fn from_runs(dim: usize, cell_size: f64, origin: Vec<f64>, mut runs: Vec<Run>) -> Result<Self> {
        check_header(dim, cell_size, &origin)?;
        if runs.iter().any(|r| r.is_empty()) {
            return Err(Error::param("run with end before start"));
        }
        if dim == 2 && runs.iter().any(|r| r.prefix[1] != 0) {
            return Err(Error::param("2-D runs carry a single prefix index"));
        }
        runs.sort_unstable();
        let mut merged: Vec<Run> = Vec::with_capacity(runs.len());
        for r in runs {
            match merged.last_mut() {
                Some(last) if last.prefix == r.prefix && r.start <= last.end + 1 => {
                    last.end = last.end.max(r.end)
                }
                _ => merged.push(r),
            }
        }
        let cells = merged.iter().map(|r| r.len() as u64).sum();
        if cells == 0 {
            return Err(Error::param("grid shape has no cells"));
        }
        Ok(GridShape {
            dim,
            cell_size,
            origin,
            runs: merged,
            cells,
        })
    }

    /// Cells whose centres lie strictly inside the centred ball of `radius`.
    pub fn ball(dim: usize, radius: f64, cell_size: f64) -> Result<Self> {
        check_header(dim, cell_size, &vec![0.0; dim])?;
        if !(radius > 0.0) {
            return Err(Error::param("ball radius must be positive"));
        }
        let r = radius / cell_size;
        let lim = r.ceil() as i64 + 1;
        let mut runs = Vec::new();
        let centre = |i: i64| i as f64 + 0.5;
        let mut push_row = |prefix: [i64; 2], rest: f64| {
            let left = r * r - rest;
            if left <= 0.0 {
                return;
            }
            let half = left.sqrt();
            // centres c = i + 1/2 with |c| < half
            let start = (-half - 0.5).floor() as i64 + 1;
            let end = (half - 0.5).ceil() as i64 - 1;
            if start <= end {
                runs.push(Run { prefix, start, end });
            }
        };
        match dim {
            2 => {
                for i in -lim..lim {
                    push_row([i, 0], centre(i).powi(2));
                }
            }
            _ => {
                for i in -lim..lim {
                    for j in -lim..lim {
                        push_row([i, j], centre(i).powi(2) + centre(j).powi(2));
                    }
                }
            }
        }
        if runs.is_empty() {
            return Err(Error::param("ball is smaller than one cell"));
        }
        Self::from_runs(dim, cell_size, vec![0.0; dim], runs)
    }

    /// The ball of volume `mass` centred at the origin.
    pub fn ball_of_mass(dim: usize, mass: f64, cell_size: f64) -> Result<Self> {
        let w = crate::params::unit_ball_volume(dim)?;
        Self::ball(dim, (mass / w).powf(1.0 / dim as f64), cell_size)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn cell_count(&self) -> u64 {
        self.cells
    }

    /// Lebesgue measure, `cells · h^N`.
    pub fn measure(&self) -> f64 {
        self.cells as f64 * self.cell_size.powi(self.dim as i32)
    }

    /// Iterator over all occupied cell indices in lexicographic order.
    pub fn cells(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let d = self.dim;
        self.runs.iter().flat_map(move |r| {
            (r.start..=r.end).map(move |x| {
                let mut v = r.prefix[..d - 1].to_vec();
                v.push(x);
                v
            })
        })
    }

    /// Per-axis `(min, max)` cell index.
    pub fn index_bounds(&self) -> Vec<(i64, i64)> {
        let mut b = vec![(i64::MAX, i64::MIN); self.dim];
        for r in &self.runs {
            for (bk, &p) in b.iter_mut().zip(&r.prefix[..self.dim - 1]) {
                bk.0 = bk.0.min(p);
                bk.1 = bk.1.max(p);
            }
            let last = &mut b[self.dim - 1];
            last.0 = last.0.min(r.start);
            last.1 = last.1.max(r.end);
        }
        b
    }

    /// Upper bound on the diameter of the occupied set.
    pub fn diameter_bound(&self) -> f64 {
        let span2: f64 = self
            .index_bounds()
            .iter()
            .map(|(lo, hi)| ((hi - lo + 1) as f64).powi(2))
            .sum();
        span2.sqrt() * self.cell_size
    }

    /// Whether the point lies in an occupied cell.
    pub fn contains(&self, point: &[f64]) -> bool {
        let mut idx = [0i64; 3];
        for k in 0..self.dim {
            let t = ((point[k] - self.origin[k]) / self.cell_size).floor();
            if !(t.abs() < 4e18) {
                return false;
            }
            idx[k] = t as i64;
        }
        let mut prefix = [0; 2];
        prefix[..self.dim - 1].copy_from_slice(&idx[..self.dim - 1]);
        let x = idx[self.dim - 1];
        let pos = self.runs.partition_point(|r| (r.prefix, r.start) <= (prefix, x));
        pos > 0 && {
            let r = &self.runs[pos - 1];
            r.prefix == prefix && r.end >= x
        }
    }

    /// Shift every cell by an integer offset; the origin is unchanged.
    pub fn translated(&self, offset: &[i64]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::param("offset dimension mismatch"));
        }
        let d = self.dim;
        let runs = self
            .runs
            .iter()
            .map(|r| {
                let mut prefix = r.prefix;
                for k in 0..d - 1 {
                    prefix[k] += offset[k];
                }
                Run {
                    prefix,
                    start: r.start + offset[d - 1],
                    end: r.end + offset[d - 1],
                }
            })
            .collect();
        Self::from_runs(d, self.cell_size, self.origin.clone(), runs)
    }

    /// Mirror image under `i_axis -> -1 - i_axis`.
    pub fn reflected(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::param("reflection axis out of range"));
        }
        let d = self.dim;
        let runs = self
            .runs
            .iter()
            .map(|r| {
                let mut r = *r;
                if axis == d - 1 {
                    let (s, e) = (-1 - r.end, -1 - r.start);
                    r.start = s;
                    r.end = e;
                } else {
                    r.prefix[axis] = -1 - r.prefix[axis];
                }
                r
            })
            .collect();
        Self::from_runs(d, self.cell_size, self.origin.clone(), runs)
    }

    /// Run-length text form: a header line `N h o_1 .. o_N`, then one line
    /// per row, `i_1 .. i_{N-1}: a-b c-d ...` with inclusive index ranges
    /// along the last axis.
    pub fn to_rle(&self) -> String {
        let mut out = String::new();
        write!(out, "{} {}", self.dim, self.cell_size).unwrap();
        for o in &self.origin {
            write!(out, " {o}").unwrap();
        }
        out.push('\n');
        let mut i = 0;
        while i < self.runs.len() {
            let prefix = self.runs[i].prefix;
            let labels: Vec<String> = prefix[..self.dim - 1].iter().map(|p| p.to_string()).collect();
            out.push_str(&labels.join(" "));
            out.push(':');
            while i < self.runs.len() && self.runs[i].prefix == prefix {
                write!(out, " {}-{}", self.runs[i].start, self.runs[i].end).unwrap();
                i += 1;
            }
            out.push('\n');
        }
        out
    }

    pub fn from_rle(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::param("empty grid shape file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let dim: usize = fields
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::param("bad dimension in grid header"))?;
        if !(2..=3).contains(&dim) || fields.len() != 2 + dim {
            return Err(Error::param(
                "grid header must be `N h o_1 .. o_N` with N in {2,3}",
            ));
        }
        let nums = fields[1..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::param(format!("bad number in grid header: {e}")))?;
        let (h, origin) = (nums[0], nums[1..].to_vec());
        let mut runs = Vec::new();
        for line in lines {
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| Error::param(format!("missing ':' in row `{line}`")))?;
            let idx = head
                .split_whitespace()
                .map(|s| s.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::param(format!("bad row index: {e}")))?;
            if idx.len() != dim - 1 {
                return Err(Error::param(format!("row `{line}` needs {} indices", dim - 1)));
            }
            let mut prefix = [0; 2];
            prefix[..dim - 1].copy_from_slice(&idx);
            for range in tail.split_whitespace() {
                let (a, b) = parse_range(range)?;
                runs.push(Run {
                    prefix,
                    start: a,
                    end: b,
                });
            }
        }
        Self::from_runs(dim, h, origin, runs)
    }
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    // the separator is the first '-' that is not a leading sign
    let split = s
        .char_indices()
        .skip(1)
        .find(|&(_, c)| c == '-')
        .map(|(i, _)| i)
        .ok_or_else(|| Error::param(format!("bad range `{s}`")))?;
    let a = s[..split].parse::<i64>();
    let b = s[split + 1..].parse::<i64>();
    match (a, b) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        _ => Err(Error::param(format!("bad range `{s}`"))),
    }
}

fn check_header(dim: usize, h: f64, origin: &[f64]) -> Result<()> {
    if !(2..=3).contains(&dim) {
        return Err(Error::param(format!("grid dimension must be 2 or 3, got {dim}")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param(format!("cell size must be positive, got {h}")));
    }
    if origin.len() != dim || origin.iter().any(|o| !o.is_finite()) {
        return Err(Error::param("origin must have N finite coordinates"));
    }
    Ok(())
}

/// Occupies the cells whose centres satisfy `|x| < r(θ(x))`.
pub fn rasterize(shape: &FourierShape, h: f64) -> Result<GridShape> {
    rasterize_on(shape, h, [0.0, 0.0])
}

/// As [`rasterize`], on the lattice whose cells are `origin + h·[i, i+1)`.
pub fn rasterize_on(shape: &FourierShape, h: f64, origin: [f64; 2]) -> Result<GridShape> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param(format!("cell size must be positive, got {h}")));
    }
    if origin.iter().any(|o| !o.is_finite()) {
        return Err(Error::param("lattice origin must be finite"));
    }
    let rmax = shape.max_radius_bound();
    let range = |o: f64| ((-rmax - o) / h).floor() as i64 - 1..((rmax - o) / h).ceil() as i64 + 1;
    let (xs, ys) = (range(origin[0]), range(origin[1]));
    let mut runs = Vec::new();
    for iy in ys {
        let y = origin[1] + (iy as f64 + 0.5) * h;
        if y.abs() >= rmax {
            continue;
        }
        let mut open: Option<i64> = None;
        for ix in xs.start..=xs.end {
            let x = origin[0] + (ix as f64 + 0.5) * h;
            let inside = ix < xs.end && {
                let rho = x.hypot(y);
                rho < rmax && rho < shape.radius(y.atan2(x))
            };
            match (inside, open) {
                (true, None) => open = Some(ix),
                (false, Some(s)) => {
                    runs.push(Run {
                        prefix: [iy, 0],
                        start: s,
                        end: ix - 1,
                    });
                    open = None;
                }
                _ => {}
            }
        }
    }
    if runs.is_empty() {
        return Err(Error::param("shape is smaller than one cell"));
    }
    GridShape::from_runs(2, h, origin.to_vec(), runs)
}

/// Exposed cell faces times `h^{N-1}`: the ℓ¹ (axis-anisotropic) perimeter
/// of the cell union, not its Euclidean perimeter.
pub fn perimeter_grid(g: &GridShape) -> f64 {
    let d = g.dim;
    let by_prefix: HashMap<[i64; 2], Vec<(i64, i64)>> = g.runs.iter().fold(HashMap::new(), |mut m, r| {
        m.entry(r.prefix).or_default().push((r.start, r.end));
        m
    });
    let mut faces: i64 = 2 * g.runs.len() as i64;
    for r in &g.runs {
        for axis in 0..d - 1 {
            for step in [-1, 1] {
                let mut p = r.prefix;
                p[axis] += step;
                let covered: i64 = by_prefix
                    .get(&p)
                    .map(|v| {
                        v.iter()
                            .map(|&(a, b)| (b.min(r.end) - a.max(r.start) + 1).max(0))
                            .sum()
                    })
                    .unwrap_or(0);
                faces += r.len() - covered;
            }
        }
    }
    faces as f64 * g.cell_size.powi(d as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn runs_merge_and_count() {
        let g = GridShape::from_cells(
            2,
            1.0,
            vec![0.0, 0.0],
            vec![vec![0, 0], vec![0, 1], vec![0, 3], vec![1, 0], vec![0, 1]],
        )
        .unwrap();
        assert_eq!(g.cell_count(), 4);
        assert_eq!(g.runs().len(), 3);
        assert!(GridShape::from_cells(2, 1.0, vec![0.0, 0.0], Vec::<Vec<i64>>::new()).is_err());
    }

    #[test]
    fn grid_perimeter_small_sets() {
        let one = GridShape::from_cells(2, 0.5, vec![0.0, 0.0], vec![vec![0, 0]]).unwrap();
        assert_eq!(perimeter_grid(&one), 4.0 * 0.5);
        let pair = GridShape::from_cells(2, 0.5, vec![0.0, 0.0], vec![vec![0, 0], vec![0, 1]]).unwrap();
        assert_eq!(perimeter_grid(&pair), 6.0 * 0.5);
        let pair = GridShape::from_cells(2, 0.5, vec![0.0, 0.0], vec![vec![0, 0], vec![1, 0]]).unwrap();
        assert_eq!(perimeter_grid(&pair), 6.0 * 0.5);
        let cube = GridShape::from_cells(3, 1.0, vec![0.0; 3], vec![vec![0, 0, 0]]).unwrap();
        assert_eq!(perimeter_grid(&cube), 6.0);
    }

    #[test]
    fn rasterized_disk_l1_perimeter_tends_to_eight() {
        let disk = FourierShape::disk(1.0).unwrap();
        for h in [0.01, 0.002] {
            let p = perimeter_grid(&rasterize(&disk, h).unwrap());
            assert!((p - 8.0).abs() < 4.0 * h, "h={h}: {p}");
        }
    }

    #[test]
    fn rasterized_disk_area() {
        let g = rasterize(&FourierShape::disk(1.0).unwrap(), 0.01).unwrap();
        assert!((g.measure() / PI - 1.0).abs() < 0.01);
        let b = GridShape::ball(2, 1.0, 0.01).unwrap();
        assert_eq!(b.runs(), g.runs());
    }

    #[test]
    fn ball_cells_are_strictly_inside() {
        let b = GridShape::ball(3, 1.0, 0.1).unwrap();
        for c in b.cells() {
            let r2: f64 = c.iter().map(|&i| ((i as f64 + 0.5) * 0.1).powi(2)).sum();
            assert!(r2 < 1.0);
        }
        assert!((b.measure() / (4.0 * PI / 3.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn contains_matches_cells() {
        let g = rasterize(&FourierShape::new(1.0, vec![0.0, 0.3], vec![0.1]).unwrap(), 0.05).unwrap();
        for c in g.cells().step_by(7) {
            let p: Vec<f64> = c.iter().map(|&i| (i as f64 + 0.5) * 0.05).collect();
            assert!(g.contains(&p));
        }
        assert!(!g.contains(&[5.0, 5.0]));
        assert!(!g.contains(&[0.0, 1.6]));
    }

    #[test]
    fn rle_format() {
        let g = GridShape::from_cells(
            2,
            0.25,
            vec![0.5, -1.0],
            vec![vec![-1, -3], vec![-1, -2], vec![-1, 2], vec![4, 0]],
        )
        .unwrap();
        let text = g.to_rle();
        assert_eq!(text, "2 0.25 0.5 -1\n-1: -3--2 2-2\n4: 0-0\n");
        assert_eq!(GridShape::from_rle(&text).unwrap(), g);
        assert!(GridShape::from_rle("2 0.1 0\n").is_err());
        assert!(GridShape::from_rle("2 0.1 0 0\n1 2: 0-1\n").is_err());
    }

    #[test]
    fn reflection_and_translation_preserve_measure() {
        let g = rasterize(&FourierShape::new(1.0, vec![0.2], vec![0.0, 0.1]).unwrap(), 0.05).unwrap();
        let t = g.translated(&[3, -7]).unwrap();
        assert_eq!(t.cell_count(), g.cell_count());
        let r = g.reflected(1).unwrap();
        assert_eq!(r.cell_count(), g.cell_count());
        assert_eq!(perimeter_grid(&r), perimeter_grid(&g));
    }
}
