//! Command-line front end: loads scenario files, runs the simulations, and
//! emits profiles, ledgers, and reports. `verify` replays the whole
//! pipeline against the published reference table.
//!
//! Exit codes: 0 on success (and all `verify` rows passing), 1 when any
//! `verify` row fails, 2 on configuration or I/O errors.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wiregrid_core::complementarity::{complementarity_report, squarewave_profile};
use wiregrid_core::diffraction::{
    normalize_single_beam, sample_fraction_profile, single_beam_intensity_shape,
    two_beam_slit_intensity_closed, Provenance,
};
use wiregrid_core::experiment::{validate, DerivedParams, DetectorBank, OpticalSetup, WireGrid};
use wiregrid_core::ledger::{
    blocked_fraction, solve_single_beam_ledger, solve_two_beam_ledger, wire_loss_two_beam,
    AmplitudeModel, EnergyLedger,
};
use wiregrid_core::numerics::{disc_area, disc_strip_area, QuadratureSpec, Strip, StripModel};
use wiregrid_core::reference::{reference_table, EntryKind};
use wiregrid_core::scenario::Scenario;
use wiregrid_core::{dark_fringe_positions, format_float, Placement};

#[derive(Parser)]
#[command(
    name = "wiregrid",
    version,
    about = "Wire-grid diffraction simulator: ledgers, profiles, and duality figures"
)]
struct Cli {
    /// Path to a scenario JSON file.
    #[arg(long, global = true, value_name = "PATH")]
    scenario: Option<PathBuf>,

    /// Use the built-in reference scenario instead of a file.
    #[arg(long, global = true, conflicts_with = "scenario")]
    paper_defaults: bool,

    /// Directory for emitted files.
    #[arg(long, global = true, default_value = ".", value_name = "PATH")]
    out_dir: PathBuf,

    /// Override the detection half-angle, in radians.
    #[arg(long, global = true, value_name = "RAD")]
    theta_max: Option<f64>,

    /// Profile output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Wire-area model for the loss integrals.
    #[arg(long, global = true, value_enum, default_value_t = Model::Strip)]
    model: Model,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-beam ledger and slit-grid intensity profile.
    SingleBeam,
    /// Two-beam ledger and the six-slit closed-form profile.
    TwoBeam,
    /// Photon budget, which-way parameter, visibility bound, duality value.
    Complementarity,
    /// Recompute every published constant and print a pass/fail table.
    Verify,
    /// Dark-fringe positions of the two-beam interference pattern.
    FringeMap {
        /// First fringe index.
        #[arg(long, allow_hyphen_values = true)]
        min_index: Option<i64>,
        /// Last fringe index.
        #[arg(long, allow_hyphen_values = true)]
        max_index: Option<i64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Strip,
    Chord,
}

impl Model {
    fn strip_model(self) -> StripModel {
        match self {
            Model::Strip => StripModel::FullDiameterStrip,
            Model::Chord => StripModel::ChordExact,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Everything the loaded scenario pins down, ready for the command bodies.
struct Context {
    scenario: Scenario,
    setup: OpticalSetup,
    grid: WireGrid,
    derived: DerivedParams,
    spec: QuadratureSpec,
    strip_model: StripModel,
}

impl Context {
    fn metadata_lines(&self) -> Vec<String> {
        vec![
            format!("tool: wiregrid {}", env!("CARGO_PKG_VERSION")),
            format!("scenario_hash: {}", self.scenario.content_hash()),
            format!("strip_model: {}", self.strip_model.label()),
            format!("theta_max_rad: {}", self.setup.detection_half_angle),
            format!("R_m: {}", self.setup.grid_to_detector_distance),
            format!(
                "detector_half_angle_rad: {}",
                self.setup.detector_half_angle
            ),
            format!(
                "quadrature: rel {} abs {} max_subdivisions {}",
                self.spec.relative_tolerance,
                self.spec.absolute_tolerance,
                self.spec.max_subdivisions
            ),
            "normalization: FractionOfIncident profiles integrate to the transmitted fraction \
             over the detection region"
                .to_string(),
            "calibration: detector_half_angle of the built-in scenario is fitted to the \
             published single-beam deflection (see README)"
                .to_string(),
        ]
    }

    fn metadata_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tool": format!("wiregrid {}", env!("CARGO_PKG_VERSION")),
            "scenario_hash": self.scenario.content_hash(),
            "strip_model": self.strip_model.label(),
            "theta_max_rad": self.setup.detection_half_angle,
            "R_m": self.setup.grid_to_detector_distance,
            "detector_half_angle_rad": self.setup.detector_half_angle,
            "quadrature": {
                "relative_tolerance": self.spec.relative_tolerance,
                "absolute_tolerance": self.spec.absolute_tolerance,
                "max_subdivisions": self.spec.max_subdivisions,
            },
            "notes": [
                "FractionOfIncident profiles integrate to the transmitted fraction over the detection region",
                "detector_half_angle of the built-in scenario is fitted to the published single-beam deflection",
            ],
        })
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let scenario = load_scenario(cli)?;
    let setup = {
        let mut setup = scenario.optical_setup();
        if let Some(theta_max) = cli.theta_max {
            setup.detection_half_angle = theta_max;
        }
        setup
    };
    let grid = scenario.wire_grid();
    let derived = validate(&setup, &grid).map_err(|e| e.to_string())?;
    let context = Context {
        scenario,
        setup,
        grid,
        derived,
        spec: QuadratureSpec::default(),
        strip_model: cli.model.strip_model(),
    };

    std::fs::create_dir_all(&cli.out_dir)
        .map_err(|e| format!("cannot create {}: {e}", cli.out_dir.display()))?;

    match &cli.command {
        Command::SingleBeam => run_single_beam(cli, &context).map(|_| ExitCode::SUCCESS),
        Command::TwoBeam => run_two_beam(cli, &context).map(|_| ExitCode::SUCCESS),
        Command::Complementarity => run_complementarity(cli, &context).map(|_| ExitCode::SUCCESS),
        Command::Verify => run_verify(&context),
        Command::FringeMap {
            min_index,
            max_index,
        } => run_fringe_map(cli, &context, *min_index, *max_index).map(|_| ExitCode::SUCCESS),
    }
}

fn load_scenario(cli: &Cli) -> Result<Scenario, String> {
    if cli.paper_defaults {
        let placement = match cli.command {
            Command::SingleBeam => Placement::SingleBeamCentered,
            _ => Placement::AtDarkFringes,
        };
        return Ok(Scenario::published_reference(placement));
    }
    let path = cli
        .scenario
        .as_ref()
        .ok_or("either --scenario <PATH> or --paper-defaults is required")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Scenario::from_json(&text).map_err(|e| e.to_string())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, String> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

fn ledger_document(context: &Context, ledger: &EnergyLedger) -> String {
    let document = serde_json::json!({
        "metadata": context.metadata_json(),
        "ledger": ledger,
        "detector_decrease_percent": wiregrid_core::round_significant(
            ledger.detector_decrease_percent(),
            6
        ),
    });
    serde_json::to_string_pretty(&document).expect("ledger document serializes")
}

fn emit_profile(
    cli: &Cli,
    context: &Context,
    profile: &wiregrid_core::AngularIntensityProfile,
    stem: &str,
) -> Result<PathBuf, String> {
    match cli.format {
        Format::Csv => write_file(
            &cli.out_dir,
            &format!("{stem}.csv"),
            &profile.to_csv(&context.metadata_lines()),
        ),
        Format::Json => {
            let document = serde_json::json!({
                "metadata": context.metadata_json(),
                "profile": profile,
            });
            write_file(
                &cli.out_dir,
                &format!("{stem}.json"),
                &serde_json::to_string_pretty(&document).expect("profile serializes"),
            )
        }
    }
}

fn run_single_beam(cli: &Cli, context: &Context) -> Result<(), String> {
    let Context {
        setup,
        grid,
        derived,
        spec,
        strip_model,
        ..
    } = context;
    let bank = DetectorBank::single_beam(setup);
    let ledger = solve_single_beam_ledger(setup, grid, derived, &bank, *strip_model, spec)
        .map_err(|e| e.to_string())?;
    let path = write_file(
        &cli.out_dir,
        "single_beam_ledger.json",
        &ledger_document(context, &ledger),
    )?;
    println!("wrote {}", path.display());

    let transmitted = ledger.f_wires_percent / 100.0;
    let shape = |theta: f64| single_beam_intensity_shape(grid, derived, theta);
    let profile = sample_fraction_profile(
        shape,
        setup.detection_half_angle,
        transmitted,
        Provenance::SingleBeamGrating,
        spec,
    )
    .map_err(|e| e.to_string())?;
    let path = emit_profile(cli, context, &profile, "single_beam_profile")?;
    println!("wrote {}", path.display());

    let norm = normalize_single_beam(grid, setup, derived, transmitted, spec)
        .map_err(|e| e.to_string())?;
    println!(
        "field normalization: Lambda/E0 = {}",
        format_float(norm.lambda_over_e0)
    );
    Ok(())
}

fn run_two_beam(cli: &Cli, context: &Context) -> Result<(), String> {
    let Context {
        setup,
        grid,
        derived,
        spec,
        strip_model,
        ..
    } = context;
    let bank = DetectorBank::two_beam(setup);
    let ledger = solve_two_beam_ledger(
        setup,
        grid,
        derived,
        &bank,
        AmplitudeModel::Linearized,
        *strip_model,
        spec,
    )
    .map_err(|e| e.to_string())?;
    let path = write_file(
        &cli.out_dir,
        "two_beam_ledger.json",
        &ledger_document(context, &ledger),
    )?;
    println!("wrote {}", path.display());

    let total = ledger.f_wires_percent / 100.0;
    let shape = |theta: f64| {
        two_beam_slit_intensity_closed(grid, setup, derived, theta)
            .expect("six-slit grid validated")
    };
    let profile = sample_fraction_profile(
        shape,
        setup.detection_half_angle,
        total,
        Provenance::TwoBeamSlitGrid,
        spec,
    )
    .map_err(|e| e.to_string())?;
    let path = emit_profile(cli, context, &profile, "two_beam_profile")?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_complementarity(cli: &Cli, context: &Context) -> Result<(), String> {
    let Context {
        setup,
        grid,
        derived,
        spec,
        strip_model,
        ..
    } = context;
    let bank = DetectorBank::two_beam(setup);
    let ledger = solve_two_beam_ledger(
        setup,
        grid,
        derived,
        &bank,
        AmplitudeModel::Linearized,
        *strip_model,
        spec,
    )
    .map_err(|e| e.to_string())?;
    let report = complementarity_report(&ledger, setup, grid, 100_000, spec)
        .map_err(|e| e.to_string())?;
    let document = serde_json::json!({
        "metadata": context.metadata_json(),
        "report": report,
    });
    let path = write_file(
        &cli.out_dir,
        "complementarity_report.json",
        &serde_json::to_string_pretty(&document).expect("report serializes"),
    )?;
    println!("wrote {}", path.display());

    let wave = squarewave_profile(&report.visibility, setup, grid);
    let path = write_file(
        &cli.out_dir,
        "squarewave.csv",
        &wave.to_csv(&context.metadata_lines()),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_fringe_map(
    cli: &Cli,
    context: &Context,
    min_index: Option<i64>,
    max_index: Option<i64>,
) -> Result<(), String> {
    let n = context.grid.count as i64;
    let lo = min_index.unwrap_or(-(n / 2));
    let hi = max_index.unwrap_or(lo + n - 1);
    if hi < lo {
        return Err(format!("empty fringe range {lo}..={hi}"));
    }
    let positions = dark_fringe_positions(&context.derived, lo..=hi);
    let mut csv = String::new();
    for line in context.metadata_lines() {
        csv.push_str("# ");
        csv.push_str(&line);
        csv.push('\n');
    }
    csv.push_str("n,y_m\n");
    for (index, y) in (lo..=hi).zip(&positions) {
        csv.push_str(&format!("{index},{}\n", format_float(*y)));
    }
    let path = write_file(&cli.out_dir, "fringes.csv", &csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Every reproducible constant recomputed for the verify table.
fn computed_constants(context: &Context) -> Result<Vec<(&'static str, f64)>, String> {
    let spec = &context.spec;
    let err = |e: wiregrid_core::Error| e.to_string();

    // Single-beam branch (forced placement; verify always runs both).
    let single_scenario = Scenario {
        grid: wiregrid_core::scenario::GridSection {
            placement: Placement::SingleBeamCentered,
            ..context.scenario.grid.clone()
        },
        ..context.scenario.clone()
    };
    let mut single_setup = single_scenario.optical_setup();
    single_setup.detection_half_angle = context.setup.detection_half_angle;
    let single_grid = single_scenario.wire_grid();
    let single_derived = validate(&single_setup, &single_grid).map_err(err)?;
    let single_bank = DetectorBank::single_beam(&single_setup);
    let single_ledger = solve_single_beam_ledger(
        &single_setup,
        &single_grid,
        &single_derived,
        &single_bank,
        StripModel::FullDiameterStrip,
        spec,
    )
    .map_err(err)?;
    let transmitted = blocked_fraction(
        &single_setup,
        &single_grid,
        StripModel::FullDiameterStrip,
        spec,
    )
    .map_err(err)?;
    let norm = normalize_single_beam(
        &single_grid,
        &single_setup,
        &single_derived,
        transmitted,
        spec,
    )
    .map_err(err)?;
    let deflection = single_ledger
        .detector_cross_terms
        .iter()
        .find(|t| t.label == "detector 2")
        .map(|t| t.percent)
        .unwrap_or(0.0);

    // Two-beam branch.
    let two_scenario = Scenario {
        grid: wiregrid_core::scenario::GridSection {
            placement: Placement::AtDarkFringes,
            ..context.scenario.grid.clone()
        },
        ..context.scenario.clone()
    };
    let mut two_setup = two_scenario.optical_setup();
    two_setup.detection_half_angle = context.setup.detection_half_angle;
    let two_grid = two_scenario.wire_grid();
    let two_derived = validate(&two_setup, &two_grid).map_err(err)?;
    let two_bank = DetectorBank::two_beam(&two_setup);
    let two_ledger = solve_two_beam_ledger(
        &two_setup,
        &two_grid,
        &two_derived,
        &two_bank,
        AmplitudeModel::Linearized,
        StripModel::FullDiameterStrip,
        spec,
    )
    .map_err(err)?;
    let exact_cosine = wire_loss_two_beam(
        &two_setup,
        &two_grid,
        &two_derived,
        AmplitudeModel::ExactCosine,
        StripModel::FullDiameterStrip,
        spec,
    )
    .map_err(err)?;
    let capture_fraction = two_ledger
        .detector_cross_terms
        .last()
        .map(|t| t.percent / 100.0)
        .unwrap_or(0.0);
    let report =
        complementarity_report(&two_ledger, &two_setup, &two_grid, 100_000, spec).map_err(err)?;

    let strips: Vec<Strip> = two_grid
        .wire_centers()
        .into_iter()
        .map(|center_y| Strip {
            center_y,
            width: two_grid.thickness,
        })
        .collect();
    let wire_area =
        disc_strip_area(two_setup.beam_diameter, &strips, StripModel::ChordExact, spec)
            .map_err(err)?;
    let open_area = disc_area(two_setup.beam_diameter) - wire_area;

    Ok(vec![
        ("lambda_over_e0", norm.lambda_over_e0),
        ("single_beam_wire_loss_pct", single_ledger.f_wires_percent),
        (
            "single_beam_diffracted_away_pct",
            single_ledger.f_diffracted_away_percent,
        ),
        ("single_beam_detector_pct", single_ledger.f_detector_percent),
        ("single_beam_second_detector_pct", deflection),
        ("two_beam_wire_loss_pct", two_ledger.f_wires_percent),
        ("two_beam_wire_loss_exact_cosine_pct", exact_cosine),
        (
            "two_beam_lost_diffraction_pct",
            two_ledger.f_diffracted_away_percent,
        ),
        ("two_beam_detector_pct", two_ledger.f_detector_percent),
        ("detector_diffraction_capture", capture_fraction),
        (
            "stopped_photons_of_100k",
            report.photon_budget.stopped_at_wires as f64,
        ),
        (
            "direct_photons_of_100k",
            report.photon_budget.direct_with_which_way as f64,
        ),
        ("i_min_proxy", report.visibility.i_min_proxy),
        ("i_max_proxy", report.visibility.i_max_proxy),
        ("visibility_lower_bound", report.visibility.visibility),
        (
            "duality_value",
            report.duality.map(|d| d.value).unwrap_or(f64::NAN),
        ),
        ("wire_area_chord_mm2", wire_area * 1e6),
        ("open_disc_area_mm2", open_area * 1e6),
    ])
}

fn run_verify(context: &Context) -> Result<ExitCode, String> {
    let computed = computed_constants(context)?;
    let lookup = |name: &str| {
        computed
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, value)| *value)
    };

    println!(
        "{:<38} {:>15} {:>15} {:>11} {:>10}  result",
        "constant", "expected", "computed", "rel dev", "tolerance"
    );
    let mut failures = 0usize;
    for entry in reference_table() {
        match entry.kind {
            EntryKind::Reproduced => {
                let value = lookup(entry.name)
                    .ok_or_else(|| format!("no computed value for {}", entry.name))?;
                let ok = entry.tolerance.check(entry.value, value);
                let deviation = if entry.value != 0.0 {
                    (value - entry.value) / entry.value
                } else {
                    value
                };
                println!(
                    "{:<38} {:>15.6e} {:>15.6e} {:>11.3e} {:>10}  {}",
                    entry.name,
                    entry.value,
                    value,
                    deviation,
                    entry.tolerance.describe(),
                    if ok { "PASS" } else { "FAIL" }
                );
                if !ok {
                    failures += 1;
                }
            }
            EntryKind::MeasuredComparison => {
                println!(
                    "{:<38} {:>15.6e} {:>15} {:>11} {:>10}  comparison",
                    entry.name, entry.value, "-", "-", "-"
                );
            }
        }
    }
    if failures == 0 {
        println!("verify: all constants reproduced");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verify: {failures} constant(s) outside tolerance");
        Ok(ExitCode::from(1))
    }
}
