use nalgebra::Vector3;
use serde::Serialize;
use shp_core::evolution::{self, GaussianShape, InvariantPotential, Model, MomentumPacket, PhasePoint};
use shp_core::little_group::wigner_d;
use shp_core::palacios::{self, EmissionConfig, FeasibilityReport, InterferenceResult};
use shp_core::units::{self, ELECTRON_MASS_EV, HBAR_C_EV_NM, HBAR_EV_FS, H_EV_FS};
use shp_core::verify::{self, VerificationReport, VerifyOptions};
use shp_core::{FourVector, SL2CElement};

use crate::args::{Common, EvolveMode, Format};
use crate::config::{parse_list, ConfigFile};
use crate::error::{CliError, EXIT_VERIFICATION_FAILED};
use crate::output::{format_f64, to_json, Table, SCHEMA_VERSION};

/// What a command produced; the caller decides where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub primary: String,
    /// Side document (the interference summary when the scan is CSV).
    pub summary: Option<String>,
    /// Human-readable lines for stderr.
    pub notes: Vec<String>,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(primary: String) -> Self {
        Self {
            primary,
            summary: None,
            notes: Vec::new(),
            exit_code: 0,
        }
    }
}

fn load_config(common: &Common) -> Result<ConfigFile, CliError> {
    common.config.as_deref().map_or_else(|| Ok(ConfigFile::default()), ConfigFile::load)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: &'static str,
    command: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

fn json_doc<T: Serialize>(command: &'static str, body: &T) -> Result<String, CliError> {
    to_json(&Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    })
}

pub fn verify(common: &Common, tolerance: Option<f64>, suite: Option<String>) -> Result<Outcome, CliError> {
    let mut cfg = load_config(common)?;
    let seed = match common.seed {
        Some(s) => {
            cfg.overridden("seed");
            s
        }
        None => cfg.take_or("seed", verify::DEFAULT_SEED)?,
    };
    let samples = match common.samples {
        Some(n) => {
            cfg.overridden("samples");
            n
        }
        None => cfg.take_or("samples", verify::DEFAULT_SAMPLES)?,
    };
    let tolerance = match tolerance {
        Some(t) => {
            cfg.overridden("tolerance");
            Some(t)
        }
        None => cfg.take("tolerance")?,
    };
    let suite = match suite {
        Some(s) => {
            cfg.overridden("suite");
            Some(s)
        }
        None => cfg.take::<String>("suite")?,
    };
    if samples == 0 {
        return Err(cfg.invalid("samples", "sample count must be positive"));
    }
    if let Some(t) = tolerance {
        if !(t > 0.0) {
            return Err(cfg.invalid("tolerance", format!("tolerance must be positive, got {t}")));
        }
    }
    if let Some(name) = &suite {
        if !verify::SUITES.iter().any(|(n, _)| n == name) {
            let known: Vec<&str> = verify::SUITES.iter().map(|(n, _)| *n).collect();
            return Err(cfg.invalid("suite", format!("unknown suite '{name}' (known: {})", known.join(", "))));
        }
    }
    cfg.finish()?;

    let options = VerifyOptions { seed, samples, tolerance };
    let report = match &suite {
        None => verify::run(&options)?,
        Some(name) => {
            let single = verify::run_suite(name, &options)?;
            VerificationReport {
                seed,
                samples,
                passed: single.passed(),
                suites: vec![single],
                convention_flags: verify::convention_flags(&options)?,
            }
        }
    };

    let primary = match common.format.unwrap_or(Format::Json) {
        Format::Json => json_doc("verify", &report)?,
        Format::Csv => {
            let mut t = Table::new(&["suite", "id", "equation", "samples", "max_deviation", "tolerance", "passed", "convention_flags"]);
            for s in &report.suites {
                for r in &s.records {
                    t.push(vec![
                        s.suite.into(),
                        r.id.into(),
                        r.equation.into(),
                        r.samples.to_string(),
                        format_f64(r.max_deviation),
                        format_f64(r.tolerance),
                        r.passed.to_string(),
                        r.convention_flags.join(";"),
                    ]);
                }
            }
            t.to_csv()?
        }
    };
    let notes: Vec<String> = report
        .failures()
        .map(|(s, r)| format!("FAIL {s}/{}: max deviation {:.3e} > tolerance {:.3e}", r.id, r.max_deviation, r.tolerance))
        .collect();
    Ok(Outcome {
        primary,
        summary: None,
        notes,
        exit_code: if report.passed { 0 } else { EXIT_VERIFICATION_FAILED },
    })
}

fn unit_axis(cfg: &ConfigFile, key: &str, v: Vector3<f64>) -> Result<Vector3<f64>, CliError> {
    let norm = v.norm();
    if !(norm > 0.0) {
        return Err(cfg.invalid(key, "axis must be non-zero"));
    }
    Ok(v / norm)
}

fn flag_list(cfg: &ConfigFile, key: &str, text: &str, len: usize) -> Result<Vec<f64>, CliError> {
    parse_list(text, len).map_err(|m| cfg.invalid(key, m))
}

#[derive(Serialize)]
struct BoostJson {
    rapidity: f64,
    axis: [f64; 3],
}

#[derive(Serialize)]
struct WignerJson {
    boost1: BoostJson,
    boost2: BoostJson,
    n: [f64; 4],
    /// Rows of `D` as `[re, im]` pairs.
    rotation_matrix: [[[f64; 2]; 2]; 2],
    angle: f64,
    axis: Option<[f64; 3]>,
    /// Spatial 3x3 rotation induced by `D`.
    so3: [[f64; 3]; 3],
    unitarity_deviation: f64,
    determinant: [f64; 2],
}

pub fn wigner(
    common: &Common,
    boost1: Option<f64>,
    axis1: Option<String>,
    boost2: Option<f64>,
    axis2: Option<String>,
    n: Option<String>,
) -> Result<Outcome, CliError> {
    let mut cfg = load_config(common)?;
    let w1 = match boost1 {
        Some(w) => {
            cfg.overridden("boost1");
            w
        }
        None => cfg.take_or("boost1", 1.0)?,
    };
    let w2 = match boost2 {
        Some(w) => {
            cfg.overridden("boost2");
            w
        }
        None => cfg.take_or("boost2", 1.0)?,
    };
    let a1 = match axis1 {
        Some(t) => {
            cfg.overridden("axis1");
            Vector3::from_vec(flag_list(&cfg, "axis1", &t, 3)?)
        }
        None => cfg.take_vec3("axis1")?.unwrap_or_else(Vector3::x),
    };
    let a2 = match axis2 {
        Some(t) => {
            cfg.overridden("axis2");
            Vector3::from_vec(flag_list(&cfg, "axis2", &t, 3)?)
        }
        None => cfg.take_vec3("axis2")?.unwrap_or_else(Vector3::y),
    };
    let n = match n {
        Some(t) => {
            cfg.overridden("n");
            FourVector::from_array(flag_list(&cfg, "n", &t, 4)?.try_into().expect("length checked"))
        }
        None => cfg.take_four("n")?.unwrap_or_else(FourVector::rest),
    };
    for (key, w) in [("boost1", w1), ("boost2", w2)] {
        if !w.is_finite() {
            return Err(cfg.invalid(key, "rapidity must be finite"));
        }
    }
    let a1 = unit_axis(&cfg, "axis1", a1)?;
    let a2 = unit_axis(&cfg, "axis2", a2)?;
    cfg.finish()?;

    let a = SL2CElement::boost(w1, a1).mul(&SL2CElement::boost(w2, a2))?;
    let d = wigner_d(&a, &n)?;
    let m = d.matrix();
    let so3 = d.so3().spatial_block();
    let det = m.determinant();
    let body = WignerJson {
        boost1: BoostJson { rapidity: w1, axis: a1.into() },
        boost2: BoostJson { rapidity: w2, axis: a2.into() },
        n: n.to_array(),
        rotation_matrix: std::array::from_fn(|r| std::array::from_fn(|c| [m[(r, c)].re, m[(r, c)].im])),
        angle: d.angle(),
        axis: d.axis().map(Into::into),
        so3: std::array::from_fn(|r| std::array::from_fn(|c| so3[(r, c)])),
        unitarity_deviation: (m.adjoint() * m - nalgebra::Matrix2::identity()).camax(),
        determinant: [det.re, det.im],
    };
    let primary = match common.format.unwrap_or(Format::Json) {
        Format::Json => json_doc("wigner", &body)?,
        Format::Csv => {
            let mut t = Table::new(&[
                "angle", "axis_x", "axis_y", "axis_z", "d00_re", "d00_im", "d01_re", "d01_im", "d10_re", "d10_im", "d11_re", "d11_im",
            ]);
            let axis = body.axis.unwrap_or([f64::NAN; 3]);
            let mut row = vec![body.angle, axis[0], axis[1], axis[2]];
            row.extend(body.rotation_matrix.iter().flatten().flatten());
            t.push_numbers(&row);
            t.to_csv()?
        }
    };
    Ok(Outcome::ok(primary))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceSettings {
    pub emission: EmissionConfig,
    pub dt_min_fs: f64,
    pub dt_max_fs: f64,
    pub samples: usize,
}

pub const DEFAULT_SCAN_SAMPLES: usize = 2001;

impl InterferenceSettings {
    pub fn from_config(cfg: &mut ConfigFile, samples: Option<usize>) -> Result<Self, CliError> {
        let base = EmissionConfig::reference();
        let emission = EmissionConfig {
            e1_ev: cfg.take_or("e1_ev", base.e1_ev)?,
            e2_ev: cfg.take_or("e2_ev", base.e2_ev)?,
            k1_dir: cfg.take_vec3("k1_dir")?.unwrap_or(base.k1_dir),
            k2_dir: cfg.take_vec3("k2_dir")?.unwrap_or(base.k2_dir),
            t_emit1_fs: cfg.take_or("t_emit1_fs", base.t_emit1_fs)?,
            t_emit2_fs: cfg.take_or("t_emit2_fs", base.t_emit2_fs)?,
            sigma_t_fs: cfg.take_or("sigma_t_fs", base.sigma_t_fs)?,
            mass_ev: cfg.take_or("mass_ev", base.mass_ev)?,
            detector_nm: cfg.take_vec3("detector_nm")?.unwrap_or(base.detector_nm),
            n: cfg.take_four("n")?.unwrap_or(base.n),
        };
        let dt_min_fs = cfg.take_or("dt_min_fs", -4.0)?;
        let dt_max_fs = cfg.take_or("dt_max_fs", 4.0)?;
        let samples = match samples {
            Some(n) => {
                cfg.overridden("samples");
                n
            }
            None => cfg.take_or("samples", DEFAULT_SCAN_SAMPLES)?,
        };
        if samples < 2 {
            return Err(cfg.invalid("samples", "a scan needs at least 2 grid points"));
        }
        if !(dt_max_fs > dt_min_fs) {
            return Err(cfg.invalid("dt_max_fs", format!("scan range [{dt_min_fs}, {dt_max_fs}] is empty")));
        }
        emission.validate()?;
        Ok(Self {
            emission,
            dt_min_fs,
            dt_max_fs,
            samples,
        })
    }
}

#[derive(Serialize)]
struct EmissionJson {
    e1_ev: f64,
    e2_ev: f64,
    delta_e_ev: f64,
    t_emit1_fs: f64,
    t_emit2_fs: f64,
    sigma_t_fs: f64,
    mass_ev: f64,
    dt_min_fs: f64,
    dt_max_fs: f64,
    samples: usize,
}

#[derive(Serialize)]
struct InterferenceSummary<'a> {
    parameters: EmissionJson,
    fringe_period_fs: Option<f64>,
    predicted_period_fs: Option<f64>,
    visibility: f64,
    window_contrast: f64,
    /// Set when the energies coincide and the fringe term does not oscillate.
    flat_oscillation: bool,
    feasibility: &'a FeasibilityReport,
}

#[derive(Serialize)]
struct ScanColumns<'a> {
    delta_t_fs: &'a [f64],
    probability: &'a [f64],
    envelope: &'a [f64],
    interference_term: &'a [f64],
}

#[derive(Serialize)]
struct InterferenceFull<'a> {
    #[serde(flatten)]
    summary: InterferenceSummary<'a>,
    scan: ScanColumns<'a>,
}

pub fn scan_table(result: &InterferenceResult) -> Table {
    let mut t = Table::new(&["delta_t_fs", "probability", "envelope", "interference_term"]);
    for i in 0..result.delta_t_fs.len() {
        t.push_numbers(&[result.delta_t_fs[i], result.probability[i], result.envelope[i], result.interference_term[i]]);
    }
    t
}

pub fn interference(common: &Common) -> Result<Outcome, CliError> {
    let mut cfg = load_config(common)?;
    let settings = InterferenceSettings::from_config(&mut cfg, common.samples)?;
    cfg.finish()?;
    let e = &settings.emission;
    let result = palacios::scan_interference(e, settings.dt_min_fs, settings.dt_max_fs, settings.samples).map_err(|err| match err {
        shp_core::Error::Aliasing { .. } => CliError::Usage(format!(
            "{err}; the fringe period is {:.4} fs, so use more grid points (--samples) or a narrower dt range",
            e.predicted_period_fs().unwrap_or(f64::NAN)
        )),
        other => other.into(),
    })?;
    let feasibility = palacios::feasibility_report(e);
    let summary = InterferenceSummary {
        parameters: EmissionJson {
            e1_ev: e.e1_ev,
            e2_ev: e.e2_ev,
            delta_e_ev: e.delta_e_ev(),
            t_emit1_fs: e.t_emit1_fs,
            t_emit2_fs: e.t_emit2_fs,
            sigma_t_fs: e.sigma_t_fs,
            mass_ev: e.mass_ev,
            dt_min_fs: settings.dt_min_fs,
            dt_max_fs: settings.dt_max_fs,
            samples: settings.samples,
        },
        fringe_period_fs: result.fringe_period_fs,
        predicted_period_fs: result.predicted_period_fs,
        visibility: result.visibility,
        window_contrast: result.window_contrast,
        flat_oscillation: result.predicted_period_fs.is_none(),
        feasibility: &feasibility,
    };
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(Outcome {
            primary: scan_table(&result).to_csv()?,
            summary: Some(json_doc("interference", &summary)?),
            notes: Vec::new(),
            exit_code: 0,
        }),
        Format::Json => {
            let full = InterferenceFull {
                summary,
                scan: ScanColumns {
                    delta_t_fs: &result.delta_t_fs,
                    probability: &result.probability,
                    envelope: &result.envelope,
                    interference_term: &result.interference_term,
                },
            };
            Ok(Outcome::ok(json_doc("interference", &full)?))
        }
    }
}

#[derive(Serialize)]
struct ColumnsJson<'a> {
    mode: &'static str,
    columns: &'a [&'static str],
    rows: Vec<Vec<f64>>,
}

fn render_rows(command: &'static str, mode: &'static str, header: &[&'static str], rows: Vec<Vec<f64>>, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut t = Table::new(header);
            for r in &rows {
                t.push_numbers(r);
            }
            t.to_csv()
        }
        Format::Json => json_doc(command, &ColumnsJson { mode, columns: header, rows }),
    }
}

pub fn evolve(common: &Common, mode: Option<EvolveMode>) -> Result<Outcome, CliError> {
    let mut cfg = load_config(common)?;
    let mode = match mode {
        Some(m) => {
            cfg.overridden("mode");
            m
        }
        None => cfg.take_or("mode", EvolveMode::Classical)?,
    };
    let mass: f64 = cfg.take_or("mass", 1.0)?;
    let steps = match common.samples {
        Some(n) => {
            cfg.overridden("steps");
            n
        }
        None => cfg.take_or("steps", 1000usize)?,
    };
    let dtau: f64 = cfg.take_or("dtau", 0.01)?;
    let dump_every: usize = cfg.take_or("dump_every", 10)?;
    if !(mass > 0.0) {
        return Err(cfg.invalid("mass", "mass must be positive"));
    }
    if !(dtau > 0.0) || !dtau.is_finite() {
        return Err(cfg.invalid("dtau", "step must be positive"));
    }
    if dump_every == 0 {
        return Err(cfg.invalid("dump_every", "must be positive"));
    }
    let format = common.format.unwrap_or(Format::Csv);
    let primary = match mode {
        EvolveMode::Classical => {
            let x0 = cfg.take_four("x0")?.unwrap_or_else(FourVector::zero);
            let p0 = cfg.take_four("p0")?.unwrap_or_else(|| FourVector::new(1.25, 0.0, 0.0, 0.75));
            let potential: String = cfg.take_or("potential", "free".to_owned())?;
            let spring: f64 = cfg.take_or("spring", 1.0)?;
            let model = match potential.as_str() {
                "free" => Model::Free { mass },
                "harmonic" => Model::Invariant {
                    mass,
                    potential: InvariantPotential::harmonic(spring),
                },
                other => return Err(cfg.invalid("potential", format!("expected 'free' or 'harmonic', got '{other}'"))),
            };
            cfg.finish()?;
            let traj = evolution::classical_integrate(&PhasePoint::new(x0, p0, 0.0), &model, dtau, steps)?;
            let last = traj.len() - 1;
            let rows = traj
                .iter()
                .enumerate()
                .filter(|(i, _)| i % dump_every == 0 || *i == last)
                .map(|(i, pt)| {
                    let (a, b) = if i + 1 < traj.len() { (i, i + 1) } else { (i.saturating_sub(1), i) };
                    let m = 0.5 * (evolution::observed_mass(&traj[a].p) + evolution::observed_mass(&traj[b].p));
                    let check = if a == b { 0.0 } else { evolution::proper_time_rate(&traj[a], &traj[b]) - m / mass };
                    let [t, x, y, z] = pt.x.to_array();
                    let [e, px, py, pz] = pt.p.to_array();
                    vec![pt.tau, t, x, y, z, e, px, py, pz, model.hamiltonian(pt), check]
                })
                .collect();
            render_rows(
                "evolve",
                "classical",
                &["tau", "t", "x", "y", "z", "E", "px", "py", "pz", "K", "on_shell_check"],
                rows,
                format,
            )?
        }
        EvolveMode::Quantum => {
            let center = cfg.take_four("center")?.unwrap_or_else(|| FourVector::new(10.0, 0.5, 0.0, 0.0));
            let widths = cfg.take_four("widths")?.map_or([0.3, 0.1, 0.1, 0.1], |w| w.to_array());
            let points: usize = cfg.take_or("grid_points", evolution::DEFAULT_GRID)?;
            let half_span: f64 = cfg.take_or("half_span", 16.0)?;
            cfg.finish()?;
            let mut packet = MomentumPacket::gaussian_grid(GaussianShape { center, widths }, mass, &[0], points, half_span)?;
            let mut rows = Vec::new();
            let mut dump = |packet: &MomentumPacket, tau: f64| {
                let norm = packet.norm();
                for (p, a) in packet.samples().unwrap_or_default() {
                    rows.push(vec![tau, p.t(), a.norm_sqr(), a.arg(), norm]);
                }
            };
            dump(&packet, 0.0);
            for step in 1..=steps {
                packet = evolution::free_evolve(&packet, dtau);
                if step % dump_every == 0 || step == steps {
                    dump(&packet, step as f64 * dtau);
                }
            }
            render_rows("evolve", "quantum", &["tau", "axis_value", "amplitude_sq", "phase", "norm"], rows, format)?
        }
    };
    Ok(Outcome::ok(primary))
}

#[derive(Serialize)]
struct Constant {
    name: &'static str,
    value: f64,
    unit: &'static str,
}

pub fn constants(common: &Common) -> Result<Outcome, CliError> {
    let cfg = load_config(common)?;
    cfg.finish()?;
    let table = [
        Constant { name: "hbar", value: HBAR_EV_FS, unit: "eV fs" },
        Constant { name: "h", value: H_EV_FS, unit: "eV fs" },
        Constant { name: "hbar_c", value: HBAR_C_EV_NM, unit: "eV nm" },
        Constant { name: "electron_mass", value: ELECTRON_MASS_EV, unit: "eV" },
        Constant { name: "angular_frequency_per_ev", value: units::angular_frequency(1.0), unit: "rad/fs per eV" },
        Constant { name: "fringe_period_at_1_ev", value: units::fringe_period_fs(1.0), unit: "fs" },
        Constant { name: "min_energy_spread_at_1_fs", value: units::min_energy_spread_ev(1.0), unit: "eV" },
    ];
    let primary = match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                constants: &'a [Constant],
            }
            json_doc("constants", &Body { constants: &table })?
        }
        Format::Csv => {
            let mut t = Table::new(&["name", "value", "unit"]);
            for c in &table {
                t.push(vec![c.name.into(), format_f64(c.value), c.unit.into()]);
            }
            t.to_csv()?
        }
    };
    Ok(Outcome::ok(primary))
}
