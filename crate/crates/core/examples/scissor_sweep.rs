//! Bound states of the quantum scissor over `[π/2, 0.97π]`, all four sectors.
//!
//! Writes the CSV table to stdout and a per-sector count to stderr.
//! Takes about half a minute in release mode.

use skeleton_spectra::kernels::SectorLabel;
use skeleton_spectra::quadrature::QuadratureRule;
use skeleton_spectra::scissor::{default_theta_grid, sweep};
use skeleton_spectra::skeleton::DEFAULT_MARGIN;

fn main() -> skeleton_spectra::Result<()> {
    let thetas = default_theta_grid();
    let rule = QuadratureRule::half_line(400, 1.0)?;
    let table = sweep(&thetas, &SectorLabel::ALL, &rule, DEFAULT_MARGIN)?;
    print!("{}", table.to_csv());
    for sector in SectorLabel::ALL {
        eprintln!("{sector}: {} rows", table.in_sector(sector).count());
    }
    Ok(())
}
