use super::config::{JobConfig, StateName};
use super::write_artifact;
use crate::corecore::{assemble, summarize, CurveSummary};
use crate::curve::Curve;
use crate::data::{load_basis, load_core_parameters, CoreParameters, DataDir, Element};
use crate::electronic::{compute_point, ElectronicOptions};
use crate::integrals::{CenterSpec, EcpSpec, GeometrySpec};
use crate::units::{au_to_debye, fmt12};
use crate::{Error, Result};
use rayon::prelude::*;
use std::path::PathBuf;

/// Per-R results of both spin blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValues {
    pub n_functions: usize,
    pub scf_energy: f64,
    pub scf_iterations: usize,
    /// Indexed by state: X then a.
    pub energies: [f64; 2],
    pub dipoles_debye: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub r: f64,
    pub result: std::result::Result<PointValues, String>,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub points: Vec<PointOutcome>,
    pub failures: usize,
    pub summaries: Vec<(StateName, Option<CurveSummary>)>,
    pub written: Vec<PathBuf>,
}

fn state_index(s: StateName) -> usize {
    match s {
        StateName::X => 0,
        StateName::A => 1,
    }
}

/// Basis, fitted core parameters and fitted ECP of both atoms.
pub fn load_centers(cfg: &JobConfig, data: &DataDir) -> Result<[CenterSpec; 2]> {
    let (a, b) = cfg.atoms()?;
    let series = cfg.series_of();
    let load = |atom: Element, i: usize| -> Result<CenterSpec> {
        let s = series[i];
        let core_path = data.fitted_core_path(atom, s);
        let ecp_path = data.fitted_ecp_path(atom, s);
        if !core_path.exists() || !ecp_path.exists() {
            return Err(Error::Config(format!(
                "no fitted parameters for {atom} series {s} in {}; run atom-fit first",
                core_path.parent().map(|p| p.display().to_string()).unwrap_or_default()
            )));
        }
        Ok(CenterSpec {
            element: atom,
            basis: load_basis(&data.basis_path(atom, s, cfg.basis_variant))?,
            core: load_core_parameters(&core_path)?,
            ecp: EcpSpec::load(&ecp_path)?,
        })
    };
    Ok([load(a, 0)?, load(b, 1)?])
}

pub fn cores(centers: &[CenterSpec; 2]) -> [&CoreParameters; 2] {
    [&centers[0].core, &centers[1].core]
}

fn point(centers: &[CenterSpec; 2], r: f64, opts: &ElectronicOptions) -> Result<PointValues> {
    let geom = GeometrySpec::new(centers[0].clone(), centers[1].clone(), r)?;
    let p = compute_point(&geom, opts)?;
    Ok(PointValues {
        n_functions: p.n_functions,
        scf_energy: p.scf_energy,
        scf_iterations: p.scf_iterations,
        energies: [p.singlet.state.energy, p.triplet.state.energy],
        dipoles_debye: [au_to_debye(p.singlet.dipole_au), au_to_debye(p.triplet.dipole_au)],
    })
}

/// Electronic structure at every grid distance on `jobs` worker threads.
/// Failed points are recorded, not fatal.
pub fn scan_points(cfg: &JobConfig, centers: &[CenterSpec; 2], jobs: usize) -> Result<Vec<PointOutcome>> {
    let grid = cfg.grid.resolve()?;
    let opts = cfg.numerics.electronic_options();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        grid.par_iter()
            .map(|&r| {
                let result = point(centers, r, &opts).map_err(|e| e.to_string());
                match &result {
                    Ok(v) => log::info!("{} R = {r}: E_X = {:.10}, D_X = {:.5} D", cfg.molecule, v.energies[0], v.dipoles_debye[0]),
                    Err(e) => log::warn!("{} R = {r}: {e}", cfg.molecule),
                }
                PointOutcome { r, result }
            })
            .collect()
    }))
}

pub fn energy_file(s: StateName) -> String {
    format!("{}_energy.csv", s.tag())
}
pub fn dipole_file(s: StateName) -> String {
    format!("{}_dipole.csv", s.tag())
}
pub fn vprime_file(s: StateName) -> String {
    format!("{}_Vprime.csv", s.tag())
}
pub fn v_file(s: StateName) -> String {
    format!("{}_V.csv", s.tag())
}

fn points_csv(points: &[PointOutcome]) -> String {
    let mut s = String::from("R_bohr,status,n_functions,scf_energy,scf_iterations,E_X,D_X_debye,absD_X_debye,E_a,D_a_debye,absD_a_debye\n");
    for p in points {
        match &p.result {
            Ok(v) => s.push_str(&format!(
                "{},ok,{},{},{},{},{},{},{},{},{}\n",
                fmt12(p.r),
                v.n_functions,
                fmt12(v.scf_energy),
                v.scf_iterations,
                fmt12(v.energies[0]),
                fmt12(v.dipoles_debye[0]),
                fmt12(v.dipoles_debye[0].abs()),
                fmt12(v.energies[1]),
                fmt12(v.dipoles_debye[1]),
                fmt12(v.dipoles_debye[1].abs()),
            )),
            Err(e) => s.push_str(&format!("{},\"{}\",,,,,,,,,\n", fmt12(p.r), e.replace('"', "'"))),
        }
    }
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt12).unwrap_or_default()
}

pub const SUMMARY_HEADER: &str = "state,R_e_bohr,D_e_cm1,R_m_bohr,R_d_bohr,D_Re_debye,D_Rd_debye";

/// Curves and characteristic distances of one state from the electronic
/// energy and dipole curves.
pub struct StateCurves {
    pub v_prime: Curve,
    pub v: Curve,
    pub summary: Option<CurveSummary>,
    pub r_m: Option<f64>,
}

pub fn state_curves(cfg: &JobConfig, centers: &[CenterSpec; 2], energy: &Curve, dipole: &Curve) -> Result<StateCurves> {
    let assembled = assemble(energy, cores(centers), &cfg.corecore)?;
    let summary = summarize(&assembled.v, Some(dipole)).ok();
    let r_m = summarize(&assembled.v_prime, None).ok().map(|s| s.r_e);
    Ok(StateCurves {
        v_prime: assembled.v_prime,
        v: assembled.v,
        summary,
        r_m,
    })
}

pub fn summary_line(state: StateName, c: &StateCurves) -> String {
    let s = c.summary;
    format!(
        "{},{},{},{},{},{},{}\n",
        state.tag(),
        opt(s.map(|s| s.r_e)),
        opt(s.map(|s| s.d_e_cm1)),
        opt(c.r_m),
        opt(s.and_then(|s| s.r_d)),
        opt(s.and_then(|s| s.d_re)),
        opt(s.and_then(|s| s.d_rd)),
    )
}

/// Runs the scan and writes every artifact into the output directory.
pub fn run_scan(cfg: &JobConfig, data: &DataDir, jobs: usize) -> Result<ScanOutcome> {
    let centers = load_centers(cfg, data)?;
    let points = scan_points(cfg, &centers, jobs)?;
    let header = cfg.header();
    let dir = &cfg.output_dir;
    let mut written = vec![write_artifact(dir, "points.csv", &header, &points_csv(&points))?];
    let mut summaries = Vec::new();
    let mut summary_text = format!("{SUMMARY_HEADER}\n");
    let ok: Vec<(f64, &PointValues)> = points.iter().filter_map(|p| p.result.as_ref().ok().map(|v| (p.r, v))).collect();
    let label = |s: StateName, what: &str| format!("{} {} {} {what}", cfg.molecule, cfg.series, s.tag());
    for &state in &cfg.states {
        let k = state_index(state);
        let r: Vec<f64> = ok.iter().map(|p| p.0).collect();
        if r.len() < 3 {
            summaries.push((state, None));
            continue;
        }
        let energy = Curve::new(r.clone(), ok.iter().map(|p| p.1.energies[k]).collect(), label(state, "E_CI"))?;
        let dipole = Curve::new(r, ok.iter().map(|p| p.1.dipoles_debye[k]).collect(), label(state, "dipole"))?;
        written.push(write_artifact(dir, &energy_file(state), &[], &energy.to_csv("hartree", &header))?);
        written.push(write_artifact(dir, &dipole_file(state), &[], &dipole.to_csv("debye", &header))?);
        let curves = state_curves(cfg, &centers, &energy, &dipole)?;
        written.push(write_artifact(dir, &vprime_file(state), &[], &curves.v_prime.to_csv("hartree", &header))?);
        written.push(write_artifact(dir, &v_file(state), &[], &curves.v.to_csv("hartree", &header))?);
        summary_text.push_str(&summary_line(state, &curves));
        summaries.push((state, curves.summary));
    }
    written.push(write_artifact(dir, "summary.csv", &header, &summary_text)?);
    let failures = points.iter().filter(|p| p.result.is_err()).count();
    Ok(ScanOutcome {
        points,
        failures,
        summaries,
        written,
    })
}
