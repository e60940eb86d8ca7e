//! Band structure table of a scenario's lattice.

use std::fmt::Write as _;

use crossstitch::{band_structure, group_velocity};

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::run::preamble;

/// `k,E_flat,E_dispersive,group_velocity` on `n_k` momenta, preceded by the band
/// edges and the gap.
pub fn render_bands(config: &ScenarioConfig, n_k: usize) -> Result<String> {
    let l = &config.lattice;
    let bands = band_structure(l, n_k).map_err(|e| CliError::config("bands", e.to_string()))?;
    let mut s = preamble(config, None);
    let _ = writeln!(s, "# flat_band={}", l.flat_energy());
    let _ = writeln!(
        s,
        "# dispersive_band=[{}, {}] edge_curvature={}",
        l.dispersive_minimum().0,
        l.dispersive_maximum(),
        l.band_edge_curvature()
    );
    let _ = writeln!(s, "# gap_present={}", l.gap_present());
    s.push_str("k,E_flat,E_dispersive,group_velocity\n");
    for (i, &k) in bands.k_grid.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:.12e},{:.12e},{:.12e},{:.12e}",
            k,
            bands.flat_branch[i],
            bands.dispersive_energies[i],
            group_velocity(l, k)
        );
    }
    Ok(s)
}
