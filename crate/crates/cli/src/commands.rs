use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use twinbarrier::linalg::symmetric_eigenvalues;
use twinbarrier::modal::{field_map, FieldPoint};
use twinbarrier::resonance::{find_resonances, sweep as run_sweep, transmission_half_width, SearchOptions};
use twinbarrier::spectral::{overlap_matrix, overlap_matrix_quadrature};
use twinbarrier::{CrossSection, HalfProblem, ModalSolver};
use twinbarrier_fdfd::{Domain, Fdfd};

use crate::config::{Prepared, RunConfig};
use crate::error::CliError;

pub const SWEEP_HEADER: [&str; 9] = [
    "k",
    "re_r1",
    "im_r1",
    "re_t1",
    "im_t1",
    "R",
    "T",
    "energy_defect",
    "h_res",
];

/// Agreement required between modal and oracle coefficients.
pub const ORACLE_TOLERANCE: f64 = 0.02;

/// Rendered command result.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    /// False when a check failed; maps to exit code 1.
    pub passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.into_iter().map(num)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn kind_name(kind: HalfProblem) -> &'static str {
    match kind {
        HalfProblem::Dirichlet => "dirichlet",
        HalfProblem::Neumann => "neumann",
    }
}

fn require_open(p: &Prepared, command: &str) -> Result<(), CliError> {
    if p.is_closed() {
        return Err(CliError::Config(format!(
            "{command} needs an open aperture (hole.delta > 0)"
        )));
    }
    Ok(())
}

pub fn sweep(p: &Prepared) -> Result<Output, CliError> {
    require_open(p, "sweep")?;
    let samples = run_sweep(&p.solver, &p.band)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let rows = samples.iter().map(|s| {
        vec![
            s.k,
            s.r1.re,
            s.r1.im,
            s.t1.re,
            s.t1.im,
            s.reflectance,
            s.transmittance,
            s.energy_defect,
            s.resonance_function,
        ]
    });
    Ok(Output::ok(csv_table(&SWEEP_HEADER, rows)))
}

pub fn resonance(p: &Prepared) -> Result<Output, CliError> {
    require_open(p, "resonance")?;
    let opts = SearchOptions::default();
    let mut entries = Vec::new();
    for kind in HalfProblem::BOTH {
        for r in find_resonances(&p.solver, &p.band, kind, &opts)? {
            let width = transmission_half_width(&p.solver, &r).ok();
            entries.push(json!({
                "kind": kind_name(kind),
                "k_res": r.k_res,
                "k_correction": r.k_correction,
                "residual": r.residual,
                "residual_scale": r.residual_scale,
                "re_r1": r.r1_at_res.re,
                "im_r1": r.r1_at_res.im,
                "re_t1": r.t1_at_res.re,
                "im_t1": r.t1_at_res.im,
                "closed_cavity": r.closed_cavity,
                "order": r.order,
                "bracket": [r.bracket.0, r.bracket.1],
                "transmission_fwhm": width,
            }));
        }
    }
    entries.sort_by(|a, b| a["k_res"].as_f64().unwrap().total_cmp(&b["k_res"].as_f64().unwrap()));
    let status = if entries.is_empty() { "none found" } else { "found" };
    let report = json!({
        "band": { "kmin": p.band.kmin, "kmax": p.band.kmax },
        "status": status,
        "count": entries.len(),
        "resonances": entries,
    });
    Ok(Output::ok(serde_json::to_string_pretty(&report).expect("json") + "\n"))
}

/// One entry of the validation summary.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value.
    pub value: f64,
    pub tolerance: f64,
    pub samples: usize,
}

impl Check {
    fn at_most(name: &'static str, value: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            name,
            passed: value <= tolerance,
            value,
            tolerance,
            samples,
        }
    }
}

/// Runs every invariant suite; the band grid falls back to 100 points when empty.
pub fn validation_checks(p: &Prepared, cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let s = &p.solver;
    let mut band = p.band;
    if band.points == 0 {
        band.points = 100;
    }
    let grid = band.grid();

    let mut unimodular = 0.0f64;
    let mut energy = 0.0f64;
    let mut dual = 0.0f64;
    let mut dual_samples = 0;
    let mut min_eig = f64::INFINITY;
    for &k in &grid {
        let res = s.scattering(k)?;
        energy = energy.max(res.energy_defect);
        for v in HalfProblem::BOTH {
            let h = s.solve_half(k, v)?;
            unimodular = unimodular.max((h.reflection.value.norm() - 1.0).abs());
            let ev0 = symmetric_eigenvalues(&h.operators.a0)[0];
            let ev1 = symmetric_eigenvalues(h.operators.a1(v))[0];
            min_eig = min_eig.min(ev0).min(ev1);
            let t = &h.traces;
            if t.block_condition <= 1e8 && t.reduced_condition <= 1e8 {
                for i in 0..2 {
                    let (a, b) = (t.block_projections[i], t.reduced_projections[i]);
                    dual = dual.max((a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE));
                }
                dual_samples += 1;
            }
        }
    }

    let n = cfg.validate.convergence_points;
    let doubled = ModalSolver::new(*s.geometry(), s.truncation().doubled())?;
    let mut conv = 0.0f64;
    for i in 0..n {
        let k = band.kmin + (band.kmax - band.kmin) * (i + 1) as f64 / (n + 1) as f64;
        let a = s.scattering(k)?.r1;
        let b = doubled.scattering(k)?.r1;
        conv = conv.max((a - b).norm());
    }

    let basis = s.basis();
    let exact = overlap_matrix(&basis.duct, &basis.hole);
    let quad = overlap_matrix_quadrature(&basis.duct, &basis.hole, 128);
    let overlap = exact
        .as_slice()
        .iter()
        .zip(quad.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    Ok(vec![
        Check::at_most("unimodularity", unimodular, 1e-10, 2 * grid.len()),
        Check::at_most("energy", energy, 1e-8, grid.len()),
        Check::at_most("dual_path", dual, 1e-10, dual_samples),
        Check {
            name: "spd",
            passed: min_eig > 0.0,
            value: min_eig,
            tolerance: 0.0,
            samples: 2 * grid.len(),
        },
        Check::at_most("convergence", conv, cfg.validate.convergence_tol, n),
        Check::at_most("overlap_quadrature", overlap, 1e-10, exact.as_slice().len()),
    ])
}

pub fn validate(p: &Prepared, cfg: &RunConfig) -> Result<Output, CliError> {
    require_open(p, "validate")?;
    let checks = validation_checks(p, cfg)?;
    let passed = checks.iter().all(|c| c.passed);
    let t = p.solver.truncation();
    let report = json!({
        "passed": passed,
        "truncation": { "N": t.duct_modes, "M": t.hole_modes },
        "band": { "kmin": p.band.kmin, "kmax": p.band.kmax },
        "checks": checks,
    });
    Ok(Output {
        text: serde_json::to_string_pretty(&report).expect("json") + "\n",
        passed,
    })
}

fn check_in_band(p: &Prepared, ks: &[f64]) -> Result<(), CliError> {
    let (lo, hi) = p.solver.band();
    match ks.iter().find(|&&k| !(k > lo && k < hi)) {
        Some(k) => Err(CliError::Usage(format!(
            "--k {k} is outside the single-mode band ({lo}, {hi})"
        ))),
        None => Ok(()),
    }
}

/// Default oracle sample: cell midpoints of ten equal slices of the band.
pub fn default_oracle_points(p: &Prepared) -> Vec<f64> {
    let (a, b) = (p.band.kmin, p.band.kmax);
    (0..10).map(|i| a + (b - a) * (i as f64 + 0.5) / 10.0).collect()
}

struct ModalRow {
    r1: Complex64,
    t1: Complex64,
    halves: [Complex64; 2],
}

fn modal_row(p: &Prepared, k: f64) -> Result<ModalRow, CliError> {
    if p.is_closed() {
        // Solid wall at z = 0.
        let minus = Complex64::new(-1.0, 0.0);
        return Ok(ModalRow {
            r1: minus,
            t1: Complex64::new(0.0, 0.0),
            halves: [minus, minus],
        });
    }
    let res = p.solver.scattering(k)?;
    Ok(ModalRow {
        r1: res.r1,
        t1: res.t1,
        halves: [res.r1_dirichlet, res.r1_neumann],
    })
}

pub fn compare_oracle(p: &Prepared, ks: Option<&[f64]>, halves: bool) -> Result<Output, CliError> {
    let ks = match ks {
        Some(ks) if !ks.is_empty() => ks.to_vec(),
        _ => default_oracle_points(p),
    };
    check_in_band(p, &ks)?;
    let oracle = Fdfd::new(*p.geometry(), p.grid)?.with_barriers(p.barriers);
    let mut header = vec![
        "k",
        "re_r1_modal",
        "im_r1_modal",
        "re_r1_fdfd",
        "im_r1_fdfd",
        "re_t1_modal",
        "im_t1_modal",
        "re_t1_fdfd",
        "im_t1_fdfd",
        "abs_dr1",
        "abs_dt1",
    ];
    if halves {
        header.extend([
            "re_r1d_modal",
            "im_r1d_modal",
            "re_r1d_fdfd",
            "im_r1d_fdfd",
            "abs_dr1d",
            "re_r1n_modal",
            "im_r1n_modal",
            "re_r1n_fdfd",
            "im_r1n_fdfd",
            "abs_dr1n",
        ]);
    }
    let mut rows = Vec::with_capacity(ks.len());
    let mut worst = 0.0f64;
    for &k in &ks {
        let m = modal_row(p, k)?;
        let f = oracle.solve(k, Domain::Full)?;
        let ft1 = f.t1.unwrap_or_default();
        let (dr, dt) = ((m.r1 - f.r1).norm(), (m.t1 - ft1).norm());
        worst = worst.max(dr).max(dt);
        let mut row = vec![
            k, m.r1.re, m.r1.im, f.r1.re, f.r1.im, m.t1.re, m.t1.im, ft1.re, ft1.im, dr, dt,
        ];
        if halves {
            for (i, v) in HalfProblem::BOTH.into_iter().enumerate() {
                let fh = oracle.solve(k, Domain::Half(v))?.r1;
                let mh = m.halves[i];
                let d = (mh - fh).norm();
                worst = worst.max(d);
                row.extend([mh.re, mh.im, fh.re, fh.im, d]);
            }
        }
        rows.push(row);
    }
    Ok(Output {
        text: csv_table(&header, rows),
        passed: worst <= ORACLE_TOLERANCE,
    })
}

/// Sampling lattice of the `field` command.
pub fn field_points(p: &Prepared, cfg: &RunConfig) -> Vec<FieldPoint> {
    let g = p.geometry();
    let y = match g.section() {
        CrossSection::Interval { .. } => 0.0,
        CrossSection::Rectangle { width, .. } => 0.5 * width,
    };
    let f = cfg.field;
    let (z_lo, z_hi) = (-f.margin, g.outlet() + f.margin);
    let mut pts = Vec::with_capacity(f.nx * f.nz);
    for j in 0..f.nz {
        let z = z_lo + (z_hi - z_lo) * j as f64 / (f.nz - 1) as f64;
        for i in 0..f.nx {
            let x = g.height() * i as f64 / (f.nx - 1) as f64;
            pts.push(FieldPoint { x, y, z });
        }
    }
    pts
}

pub fn field(p: &Prepared, cfg: &RunConfig, k: f64) -> Result<Output, CliError> {
    require_open(p, "field")?;
    check_in_band(p, &[k])?;
    let pts = field_points(p, cfg);
    let map = field_map(&p.solver, k, &pts)?;
    let rows = map
        .points
        .iter()
        .zip(&map.values)
        .map(|(q, u)| vec![q.x, q.z, u.re, u.im]);
    let mut text = csv_table(&["x", "z", "re_u", "im_u"], rows);
    text.push_str(&format!("# k={}\n", num(k)));
    text.push_str(&format!("# y={}\n", num(pts[0].y)));
    text.push_str(&format!(
        "# cavity_enhancement={}\n",
        num(map.cavity_enhancement(&p.solver))
    ));
    Ok(Output::ok(text))
}
