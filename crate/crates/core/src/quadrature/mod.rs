//! Perimeter and Riesz integrals of explicit shapes.
//!
//! Planar shapes are [`FourierShape`] boundaries; both planar and spatial
//! shapes can be rasterized to a [`GridShape`] for the double integrals.
//! The grid perimeter counts exposed faces and converges to the ℓ¹
//! perimeter, so Euclidean perimeters always come from the boundary curve.

pub mod cell;
pub mod fourier;
pub mod grid;
pub mod pairs;

pub use cell::{cell_distance_cdf, cell_self_integral, cell_self_integral_mc, CACHE_DIR_ENV};
pub use fourier::{perimeter_fourier, FourierShape};
pub use grid::{perimeter_grid, rasterize, rasterize_on, GridShape, Run};
pub use pairs::{
    layer_cake_check, moment_integral, pair_distance_counts, riesz_energy_grid, riesz_energy_mc,
    LayerCakeReport, PairDistanceCounts,
};

use crate::error::{Error, Result};
use crate::params::{EnergyBreakdown, RieszParams};

/// `Per Ω + D(Ω)` for a planar shape.
///
/// The perimeter is the spectrally accurate boundary integral with `nodes`
/// points. The Riesz term is [`riesz_energy_grid`] on the raster of cell
/// size `h`, rescaled by `(area / grid measure)^{(2N-λ)/N}` so that the
/// raster's volume error does not enter at first order. The lattice is
/// anchored at the centroid, so a translated shape rasterizes identically.
pub fn total_energy(
    shape: &FourierShape,
    params: &RieszParams,
    h: f64,
    nodes: usize,
) -> Result<EnergyBreakdown> {
    if params.dimension() != 2 {
        return Err(Error::param(format!(
            "boundary shapes are planar, got N={}",
            params.dimension()
        )));
    }
    let perimeter = perimeter_fourier(shape, nodes)?;
    let grid = rasterize_on(shape, h, shape.centroid())?;
    let raw = riesz_energy_grid(&grid, params.exponent())?;
    let riesz = raw * (shape.area() / grid.measure()).powf(params.riesz_exp());
    Ok(EnergyBreakdown::new(perimeter, riesz))
}
