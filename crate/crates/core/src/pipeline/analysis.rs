use super::config::{JobConfig, StateName};
use super::scan::{dipole_file, energy_file, load_centers, state_curves, v_file, vprime_file};
use super::{read_text, write_artifact};
use crate::corecore::{induced_dipole_term, london_dispersion, repulsion_term, CoreCoreModel};
use crate::curve::Curve;
use crate::data::{load_core_parameters, parse_molecule, DataDir, ReferenceDipoleTable, ReferenceRow, Series};
use crate::units::{fmt12, hartree_to_cm1};
use crate::vibrational::{average_dipole, reduced_mass, solve_levels, SplinePotential, VibrationalTable};
use crate::{Error, Result};
use std::path::PathBuf;

pub fn vib_file(s: StateName) -> String {
    format!("{}_vib.csv", s.tag())
}

fn load_curve(cfg: &JobConfig, name: &str) -> Result<Curve> {
    let path = cfg.output_dir.join(name);
    if !path.exists() {
        return Err(Error::Config(format!("missing artifact {}; run the scan first", path.display())));
    }
    Curve::load(&path)
}

#[derive(Debug, Clone)]
pub struct VibOutcome {
    pub tables: Vec<(StateName, VibrationalTable)>,
    /// Levels dropped because they reach beyond the computed curves.
    pub dropped: Vec<(StateName, usize)>,
    pub written: Vec<PathBuf>,
}

/// Vibrational levels and averaged dipoles on V = V′ + corrections, from
/// the stored electronic energy and dipole curves.
pub fn run_vib(cfg: &JobConfig, data: &DataDir) -> Result<VibOutcome> {
    let centers = load_centers(cfg, data)?;
    let iso = cfg.vibrational.isotopes;
    let m = [
        centers[0].core.mass_amu(iso.map(|i| i[0]))?,
        centers[1].core.mass_amu(iso.map(|i| i[1]))?,
    ];
    let mass_numbers = iso.unwrap_or([centers[0].core.default_isotope, centers[1].core.default_isotope]);
    let mu = reduced_mass(m[0], m[1]);
    let mut header = cfg.header();
    header.push(format!(
        "isotopes = {}{} {}{}",
        mass_numbers[0], centers[0].element, mass_numbers[1], centers[1].element
    ));
    let mut out = VibOutcome {
        tables: Vec::new(),
        dropped: Vec::new(),
        written: Vec::new(),
    };
    for &state in &cfg.states {
        let energy = load_curve(cfg, &energy_file(state))?;
        let dipole = load_curve(cfg, &dipole_file(state))?;
        let curves = state_curves(cfg, &centers, &energy, &dipole)?;
        let pot = SplinePotential::new(&curves.v);
        let mut table = match solve_levels(&pot, mu, &cfg.vibrational.options()) {
            Ok(t) => t,
            Err(Error::NoWell(_)) | Err(Error::NoBoundLevel(_)) if state == StateName::A => {
                log::warn!("{} {}: no bound vibrational level", cfg.molecule, state.tag());
                continue;
            }
            Err(e) => return Err(e),
        };
        let dropped = table.truncate_to_support(dipole.r_max(), 1e-8);
        if dropped > 0 {
            log::info!("{} {}: {dropped} levels extend beyond R = {}", cfg.molecule, state.tag(), dipole.r_max());
        }
        average_dipole(&mut table, &dipole)?;
        if let Some(dev) = table.cross_check_deviation() {
            header.push(format!("{} DVR-Numerov max deviation cm-1 = {}", state.tag(), fmt12(dev)));
        }
        out.written.push(write_artifact(&cfg.output_dir, &vib_file(state), &[], &table.to_csv(&header))?);
        header.retain(|h| !h.contains("DVR-Numerov"));
        out.dropped.push((state, dropped));
        out.tables.push((state, table));
    }
    Ok(out)
}

/// Characteristic dipole values of the X state recomputed from artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputedRow {
    pub molecule: String,
    pub series: Series,
    /// Signed values in debye (negative: excess electron on M).
    pub d_re: f64,
    pub re: f64,
    pub d_rd: f64,
    pub rd: f64,
    pub d_v0: f64,
    pub r_m: Option<f64>,
}

pub fn computed_row(cfg: &JobConfig, data: &DataDir) -> Result<ComputedRow> {
    let centers = load_centers(cfg, data)?;
    let energy = load_curve(cfg, &energy_file(StateName::X))?;
    let dipole = load_curve(cfg, &dipole_file(StateName::X))?;
    let curves = state_curves(cfg, &centers, &energy, &dipole)?;
    let s = curves
        .summary
        .ok_or_else(|| Error::NoWell(format!("{} X state has no well on the scanned grid", cfg.molecule)))?;
    let vib_path = cfg.output_dir.join(vib_file(StateName::X));
    let text = read_text(&vib_path).map_err(|_| Error::Config(format!("missing artifact {}; run vib first", vib_path.display())))?;
    let d_v0 = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .nth(1)
        .and_then(|l| l.split(',').nth(2))
        .and_then(|v| v.parse::<f64>().ok())
        .ok_or_else(|| Error::parse(&vib_path, 0, "no v = 0 dipole"))?;
    let missing = |what: &str| Error::Numerical(format!("{}: no {what}", cfg.molecule));
    Ok(ComputedRow {
        molecule: cfg.molecule.clone(),
        series: cfg.series,
        d_re: s.d_re.ok_or_else(|| missing("dipole at R_e"))?,
        re: s.r_e,
        d_rd: s.d_rd.ok_or_else(|| missing("dipole extremum"))?,
        rd: s.r_d.ok_or_else(|| missing("dipole extremum"))?,
        d_v0,
        r_m: curves.r_m,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub computed: ComputedRow,
    pub reference: Option<ReferenceRow>,
}

impl ComparisonRow {
    /// (name, |computed|, reference) for the compared quantities.
    pub fn fields(&self) -> Vec<(&'static str, f64, Option<f64>)> {
        let c = &self.computed;
        let r = self.reference.as_ref();
        vec![
            ("D_Re", c.d_re.abs(), r.map(|r| r.d_re)),
            ("Re", c.re, r.map(|r| r.re)),
            ("D_Rd", c.d_rd.abs(), r.map(|r| r.d_rd)),
            ("Rd", c.rd, r.map(|r| r.rd)),
            ("D_v0", c.d_v0.abs(), r.map(|r| r.d_v0)),
        ]
    }

    pub fn relative_deviation(&self, field: &str) -> Option<f64> {
        self.fields()
            .into_iter()
            .find(|f| f.0 == field)
            .and_then(|(_, c, r)| r.map(|r| (c - r) / r))
    }
}

/// Molecules sorted by decreasing |D(v=0)|, computed versus reference.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingCheck {
    pub computed: Vec<String>,
    pub reference: Vec<String>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub ordering: OrderingCheck,
}

fn by_decreasing(mut v: Vec<(String, f64)>) -> Vec<String> {
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v.into_iter().map(|x| x.0).collect()
}

pub fn run_compare(rows: Vec<ComputedRow>, reference: &ReferenceDipoleTable) -> ComparisonReport {
    let rows: Vec<ComparisonRow> = rows
        .into_iter()
        .map(|c| {
            let reference = reference.get(&c.molecule, c.series).cloned();
            ComparisonRow { computed: c, reference }
        })
        .collect();
    let with_ref: Vec<&ComparisonRow> = rows.iter().filter(|r| r.reference.is_some()).collect();
    let computed = by_decreasing(with_ref.iter().map(|r| (r.computed.molecule.clone(), r.computed.d_v0.abs())).collect());
    let reference = by_decreasing(
        with_ref
            .iter()
            .map(|r| (r.computed.molecule.clone(), r.reference.as_ref().map_or(0.0, |x| x.d_v0)))
            .collect(),
    );
    let matches = computed == reference;
    ComparisonReport {
        rows,
        ordering: OrderingCheck {
            computed,
            reference,
            matches,
        },
    }
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("molecule,series,quantity,computed,reference,abs_deviation,rel_deviation\n");
        for row in &self.rows {
            for (name, c, r) in row.fields() {
                let (abs, rel) = match r {
                    Some(r) => (fmt12(c - r), fmt12((c - r) / r)),
                    None => (String::new(), String::new()),
                };
                s.push_str(&format!(
                    "{},{},{name},{},{},{abs},{rel}\n",
                    row.computed.molecule,
                    row.computed.series,
                    fmt12(c),
                    r.map(fmt12).unwrap_or_default()
                ));
            }
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("Dipole moments of the X state (magnitudes in debye, distances in bohr)\n\n");
        s.push_str(&format!(
            "{:<6} {:<2} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
            "mol", "s", "D(v=0)", "ref", "rel", "D(Re)", "ref", "Re", "ref", "Rd"
        ));
        for row in &self.rows {
            let c = &row.computed;
            let r = row.reference.as_ref();
            let f = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
            s.push_str(&format!(
                "{:<6} {:<2} {:>8.3} {:>8} {:>8} {:>8.3} {:>8} {:>8.2} {:>8} {:>8.2}\n",
                c.molecule,
                c.series.to_string(),
                c.d_v0.abs(),
                f(r.map(|r| r.d_v0)),
                row.relative_deviation("D_v0").map(|v| format!("{:+.1}%", 100.0 * v)).unwrap_or_else(|| "-".into()),
                c.d_re.abs(),
                f(r.map(|r| r.d_re)),
                c.re,
                f(r.map(|r| r.re)),
                c.rd,
            ));
        }
        s.push_str(&format!(
            "\nordering by |D(v=0)|\n  computed:  {}\n  reference: {}\n  {}\n",
            self.ordering.computed.join(" > "),
            self.ordering.reference.join(" > "),
            if self.ordering.matches { "orderings agree" } else { "orderings differ" }
        ));
        s
    }

    /// Rows whose |D(v=0)| deviates by more than `threshold` (relative), and
    /// an ordering mismatch.
    pub fn breaches(&self, threshold: f64) -> Vec<String> {
        let mut out: Vec<String> = self
            .rows
            .iter()
            .filter_map(|r| {
                let d = r.relative_deviation("D_v0")?;
                (d.abs() > threshold).then(|| format!("{} {}: D(v=0) off by {:+.1}%", r.computed.molecule, r.computed.series, 100.0 * d))
            })
            .collect();
        if !self.ordering.matches {
            out.push("ordering of |D(v=0)| differs from the reference".into());
        }
        out
    }
}

/// Long-format rows `molecule,series,state,quantity,x,value` of every
/// stored curve and vibrational table.
pub fn plot_data(cfgs: &[JobConfig]) -> Result<String> {
    let mut s = String::from("molecule,series,state,quantity,x,value\n");
    for cfg in cfgs {
        for &state in &cfg.states {
            for (name, quantity) in [
                (energy_file(state), "E_CI_hartree"),
                (vprime_file(state), "Vprime_hartree"),
                (v_file(state), "V_hartree"),
                (dipole_file(state), "D_debye"),
            ] {
                let path = cfg.output_dir.join(&name);
                if !path.exists() {
                    continue;
                }
                let c = Curve::load(&path)?;
                for (r, v) in c.r.iter().zip(&c.values) {
                    s.push_str(&format!("{},{},{},{quantity},{},{}\n", cfg.molecule, cfg.series, state.tag(), fmt12(*r), fmt12(*v)));
                }
            }
            let vib = cfg.output_dir.join(vib_file(state));
            if let Ok(text) = read_text(&vib) {
                for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
                    let f: Vec<&str> = line.split(',').collect();
                    if f.len() < 3 {
                        continue;
                    }
                    s.push_str(&format!("{},{},{},vib_E_cm1,{},{}\n", cfg.molecule, cfg.series, state.tag(), f[0], f[1]));
                    if !f[2].is_empty() {
                        s.push_str(&format!("{},{},{},vib_D_debye,{},{}\n", cfg.molecule, cfg.series, state.tag(), f[0], f[2]));
                    }
                }
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VccRow {
    pub molecule: String,
    pub r: f64,
    pub induced_cm1: f64,
    pub dispersion_cm1: f64,
    pub repulsion_cm1: Option<f64>,
}

/// Core-core terms at fixed distances (cm⁻¹), using the tabulated core
/// parameters of the given series. The dispersion column is evaluated
/// without cutoff.
pub fn run_vcc_table(data: &DataDir, entries: &[(String, f64)], series: Series, model: &CoreCoreModel) -> Result<Vec<VccRow>> {
    entries
        .iter()
        .map(|(molecule, r)| {
            let (a, b) = parse_molecule(molecule)?;
            let ca = load_core_parameters(&data.core_path(a, series))?;
            let cb = load_core_parameters(&data.core_path(b, series))?;
            Ok(VccRow {
                molecule: molecule.clone(),
                r: *r,
                induced_cm1: hartree_to_cm1(induced_dipole_term(&ca, &cb, *r)?),
                dispersion_cm1: hartree_to_cm1(london_dispersion(&ca, &cb, *r, model.dispersion_source)?),
                repulsion_cm1: model.repulsion.map(|rep| hartree_to_cm1(repulsion_term(rep, *r))),
            })
        })
        .collect()
}

pub fn vcc_csv(rows: &[VccRow]) -> String {
    let mut s = String::from("molecule,Re,V_ind_cm1,V_disp_cm1,V_rep_cm1\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.molecule,
            fmt12(r.r),
            fmt12(r.induced_cm1),
            fmt12(r.dispersion_cm1),
            r.repulsion_cm1.map(fmt12).unwrap_or_default()
        ));
    }
    s
}
