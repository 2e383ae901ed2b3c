//! Uniform Cartesian grids with two layers of ghost cells.

use crate::kinetic::{Axis, Dim, Primitive};
use serde::{Deserialize, Serialize};

pub const GHOST: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub two_d: bool,
}

impl Grid {
    pub fn line(nx: usize, x: (f64, f64)) -> Self {
        Grid { nx, ny: 1, x, y: (0.0, 1.0), two_d: false }
    }

    pub fn plane(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> Self {
        Grid { nx, ny, x, y, two_d: true }
    }

    pub fn dim(&self) -> Dim {
        if self.two_d {
            Dim::Two
        } else {
            Dim::One
        }
    }

    pub fn dx(&self) -> f64 {
        (self.x.1 - self.x.0) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y.1 - self.y.0) / self.ny as f64
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx(),
            Axis::Y => self.dy(),
        }
    }

    pub fn cell_volume(&self) -> f64 {
        if self.two_d {
            self.dx() * self.dy()
        } else {
            self.dx()
        }
    }

    pub fn width(&self) -> usize {
        self.nx + 2 * GHOST
    }

    pub fn height(&self) -> usize {
        if self.two_d {
            self.ny + 2 * GHOST
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Storage index of cell (i, j); negative indices address ghosts. `j` is ignored in 1D.
    #[inline(always)]
    pub fn idx(&self, i: isize, j: isize) -> usize {
        let col = (i + GHOST as isize) as usize;
        if self.two_d {
            (j + GHOST as isize) as usize * self.width() + col
        } else {
            col
        }
    }

    /// Inverse of [`Grid::idx`].
    pub fn position(&self, k: usize) -> (isize, isize) {
        let g = GHOST as isize;
        let w = self.width();
        ((k % w) as isize - g, if self.two_d { (k / w) as isize - g } else { 0 })
    }

    /// Neighbour of (i, j) shifted by `d` along `axis`.
    #[inline(always)]
    pub fn shift(&self, i: isize, j: isize, axis: Axis, d: isize) -> (isize, isize) {
        match axis {
            Axis::X => (i + d, j),
            Axis::Y => (i, j + d),
        }
    }

    pub fn center(&self, i: isize, j: isize) -> (f64, f64) {
        let x = self.x.0 + (i as f64 + 0.5) * self.dx();
        let y = if self.two_d { self.y.0 + (j as f64 + 0.5) * self.dy() } else { 0.0 };
        (x, y)
    }

    /// Interior cells in row-major order.
    pub fn interior(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        let ny = if self.two_d { self.ny } else { 1 };
        (0..ny as isize).flat_map(move |j| (0..self.nx as isize).map(move |i| (i, j)))
    }

    /// Axes along which the solution varies.
    pub fn axes(&self) -> &'static [Axis] {
        if self.two_d {
            &[Axis::X, Axis::Y]
        } else {
            &[Axis::X]
        }
    }

    /// Number of cells along `axis`.
    pub fn count(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.nx,
            Axis::Y => self.ny,
        }
    }
}

/// Boundary condition on one side of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Zero-gradient extrapolation.
    Outflow,
    /// Slip wall: mirrored state with the normal velocity reversed.
    Reflective,
    /// Fixed inflow state for |y| < half_width, reflective elsewhere.
    Inflow {
        state: Primitive,
        half_width: f64,
    },
    /// Ghost cells sampled from the exact solution.
    Exact,
    /// Slip wall held at a fixed temperature, pressure mirrored.
    Isothermal {
        temperature: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundaries {
    pub left: Boundary,
    pub right: Boundary,
    pub bottom: Boundary,
    pub top: Boundary,
}

impl Boundaries {
    pub fn all(b: Boundary) -> Self {
        Boundaries { left: b, right: b, bottom: b, top: b }
    }
}

/// A ghost cell that needs a problem-specific value.
#[derive(Debug, Clone, Copy)]
pub struct GhostRequest<'a> {
    pub boundary: &'a Boundary,
    pub axis: Axis,
    pub ghost: (isize, isize),
    /// The interior cell mirrored across the wall.
    pub mirror: (isize, isize),
}

/// Fill all ghost layers. Periodic and outflow sides are handled here; other
/// sides ask `rule` for the ghost value given the mirrored interior value.
pub fn fill_ghosts<T: Copy>(
    grid: &Grid,
    data: &mut [T],
    bcs: &Boundaries,
    mut rule: impl FnMut(GhostRequest<'_>, T) -> T,
) {
    let g = GHOST as isize;
    let nx = grid.nx as isize;
    let rows: Vec<isize> = if grid.two_d { (0..grid.ny as isize).collect() } else { vec![0] };
    for &j in &rows {
        for k in 0..g {
            let targets = [(-1 - k, &bcs.left, 0isize), (nx + k, &bcs.right, nx - 1)];
            for (gi, bc, edge) in targets {
                let periodic = if gi < 0 { gi + nx } else { gi - nx };
                let mirror = if gi < 0 { -1 - gi } else { 2 * nx - 1 - gi };
                let v = match bc {
                    Boundary::Periodic => data[grid.idx(periodic, j)],
                    Boundary::Outflow => data[grid.idx(edge, j)],
                    other => rule(
                        GhostRequest { boundary: other, axis: Axis::X, ghost: (gi, j), mirror: (mirror, j) },
                        data[grid.idx(mirror, j)],
                    ),
                };
                data[grid.idx(gi, j)] = v;
            }
        }
    }
    if !grid.two_d {
        return;
    }
    let ny = grid.ny as isize;
    for i in -g..nx + g {
        for k in 0..g {
            let targets = [(-1 - k, &bcs.bottom, 0isize), (ny + k, &bcs.top, ny - 1)];
            for (gj, bc, edge) in targets {
                let periodic = if gj < 0 { gj + ny } else { gj - ny };
                let mirror = if gj < 0 { -1 - gj } else { 2 * ny - 1 - gj };
                let v = match bc {
                    Boundary::Periodic => data[grid.idx(i, periodic)],
                    Boundary::Outflow => data[grid.idx(i, edge)],
                    other => rule(
                        GhostRequest { boundary: other, axis: Axis::Y, ghost: (i, gj), mirror: (i, mirror) },
                        data[grid.idx(i, mirror)],
                    ),
                };
                data[grid.idx(i, gj)] = v;
            }
        }
    }
}
