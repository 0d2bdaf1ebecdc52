use super::write_artifact;
use crate::atomic::{deviation_csv, deviation_report, fit_ecp, fitted_spectrum, EcpFitOptions};
use crate::data::{load_basis, load_core_parameters, load_levels, BasisVariant, DataDir, Element, Series};
use crate::integrals::EcpSpec;
use crate::Result;
use std::path::{Path, PathBuf};

/// Atom/series combinations with tabulated core parameters.
pub const FIT_TARGETS: [(Element, Series); 11] = [
    (Element::Li, Series::A),
    (Element::Li, Series::B),
    (Element::Na, Series::A),
    (Element::Na, Series::B),
    (Element::K, Series::A),
    (Element::K, Series::B),
    (Element::Rb, Series::A),
    (Element::Rb, Series::B),
    (Element::Cs, Series::A),
    (Element::Cs, Series::B),
    (Element::Cs, Series::C),
];

#[derive(Debug, Clone)]
pub struct AtomFitOutcome {
    pub atom: Element,
    pub series: Series,
    pub converged: bool,
    /// Residual of the lowest s, p, d level (cm⁻¹, computed − experiment).
    pub lowest_residuals_cm1: [f64; 3],
    pub rho: [f64; 4],
    pub written: Vec<PathBuf>,
}

/// Fits ECP and cutoff radii of one atom and writes `<atom>_<series>.ecp`,
/// `.core` and a level deviation table into `out_dir`.
pub fn run_atom_fit(data: &DataDir, atom: Element, series: Series, variant: BasisVariant, out_dir: &Path) -> Result<AtomFitOutcome> {
    let basis = load_basis(&data.basis_path(atom, series, variant))?;
    let core = load_core_parameters(&data.core_path(atom, series))?;
    let levels = load_levels(&data.levels_path(atom))?;
    let seed = EcpSpec::load(&data.seed_ecp_path(atom))?;
    let fit = fit_ecp(&basis, &core, &levels, &seed, &EcpFitOptions::default())?;
    let header = vec![format!("alkdimer {}", env!("CARGO_PKG_VERSION")), format!("fitted for {atom} series {series} ({variant} basis)")];
    let stem = format!("{atom}_{series}");
    let mut written = vec![
        write_artifact(out_dir, &format!("{stem}.ecp"), &header, &fit.ecp.to_text())?,
        write_artifact(out_dir, &format!("{stem}.core"), &header, &fit.core.to_text())?,
    ];
    let spectrum = fitted_spectrum(&basis, &fit)?;
    let rows = deviation_report(&spectrum, &levels);
    written.push(write_artifact(out_dir, &format!("{stem}_levels.csv"), &header, &deviation_csv(&rows))?);
    let mut lowest = [f64::NAN; 3];
    for c in &fit.report.channels {
        if c.l < 3 {
            lowest[c.l] = c.residuals_cm1.first().copied().unwrap_or(f64::NAN);
        }
    }
    Ok(AtomFitOutcome {
        atom,
        series,
        converged: fit.report.converged,
        lowest_residuals_cm1: lowest,
        rho: fit.core.rho,
        written,
    })
}
