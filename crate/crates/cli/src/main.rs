//! `vrcalc`: Vietoris-Rips barcodes, barcode calculus, and metric
//! invariants from the command line.
//!
//! Exit codes: 0 success, 1 domain error (bad input data, file problems),
//! 2 usage error, 3 assertion or suite failure.

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vrcalc::algebra::{
    kunneth_product, oracle_circle, oracle_linf_sphere, oracle_linf_square,
    oracle_sphere_fundamental, wedge_sum,
};
use vrcalc::barcode::{Barcode, Interval};
use vrcalc::bottleneck::bottleneck;
use vrcalc::complex::{check_cech_vr, vr_filtration};
use vrcalc::invariants::{bounds_report, BoundsConfig, DEFAULT_SUBSET_BUDGET};
use vrcalc::io::{
    barcode_to_json, invariant_report_to_json, matching_to_json, read_barcode_json,
    read_matrix_auto, render_svg, write_matrix_csv, write_matrix_json, Json,
};
use vrcalc::linf::{
    conical_inequality_holds, katz_property_check, reversibility_holds, LinfVector,
};
use vrcalc::metric::{
    linf_distortion, linf_product, perturb, sample_circle, sample_linf_sphere, DistanceMatrix,
    SpaceSpec,
};
use vrcalc::persistence::compute_barcode;

type CliError = Box<dyn Error>;

#[derive(Parser)]
#[command(
    name = "vrcalc",
    version,
    about = "Vietoris-Rips persistence barcodes and barcode calculus for finite metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    CircleGeodesic,
    SphereGeodesic,
    CircleLinf,
    SphereLinf,
    BoxBoundaryLinf,
    Tree,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Circle,
    LinfSphere,
    LinfSquare,
    SphereFundamental,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    CechVr,
    Katz,
    Kunneth,
    OracleCircle,
    Stability,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a model space and write its distance matrix (CSV or JSON by
    /// extension).
    Sample {
        /// SpaceSpec JSON file; overrides the flag-based parameters
        #[arg(long, conflicts_with = "kind")]
        spec: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<SampleKind>,
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the barcode of a distance matrix file.
    Barcode {
        input: PathBuf,
        /// Coefficient field characteristic
        #[arg(long, default_value_t = 2)]
        field: u32,
        /// Largest homology dimension to report
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
        /// Filtration cutoff; defaults to just past the diameter
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render the barcode to this SVG file
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Bottleneck distance between two barcode files in one dimension.
    Bottleneck {
        input1: PathBuf,
        input2: PathBuf,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Metric invariants of a distance matrix, checked against its barcode.
    Invariants {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        field: u32,
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
        #[arg(long)]
        r_max: Option<f64>,
        /// Exit 3 if an asserted bound fails
        #[arg(long, default_value_t = false)]
        assert: bool,
        /// Births at or below this count as zero for the filling-radius
        /// estimate
        #[arg(long, default_value_t = 0.0)]
        birth_tol: f64,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
        subset_budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Künneth product of two barcode files.
    Kunneth {
        input1: PathBuf,
        input2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wedge (reduced direct sum) of two barcode files.
    Wedge {
        input1: PathBuf,
        input2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form barcode of a model space.
    Oracle {
        #[arg(long, value_enum)]
        kind: OracleKind,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Highest circle harmonic 2l+1 to include
        #[arg(long, default_value_t = 3)]
        l_max: usize,
        /// Ambient dimension (linf oracles) or sphere dimension
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        field: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify Čech(r) = VR(2r) on coordinates from a matrix JSON file.
    CechCheck {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the geodesic bicombing property suite on seeded inputs.
    BicombingCheck {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a canned verification suite; exits 3 on failure.
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
    },
    /// Render a barcode file to SVG.
    Render {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit(text: String, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_matrix(path: &Path) -> Result<DistanceMatrix, CliError> {
    Ok(read_matrix_auto(&fs::read_to_string(path)?)?)
}

fn load_barcode(path: &Path) -> Result<Barcode, CliError> {
    Ok(read_barcode_json(&fs::read_to_string(path)?)?)
}

/// Default cutoff: one ulp past the diameter, so the full complex (a cone)
/// is never built unless asked.
fn effective_r_max(d: &DistanceMatrix, r_max: Option<f64>) -> f64 {
    r_max.unwrap_or_else(|| f64::next_up(d.diameter().max(f64::MIN_POSITIVE)))
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Sample {
            spec,
            kind,
            count,
            radius,
            dim,
            seed,
            out,
        } => {
            let space_spec = match (spec, kind) {
                (Some(path), _) => serde_json::from_str::<SpaceSpec>(&fs::read_to_string(path)?)?,
                (None, Some(kind)) => match kind {
                    SampleKind::CircleGeodesic => SpaceSpec::CircleGeodesic { count, radius },
                    SampleKind::SphereGeodesic => SpaceSpec::SphereGeodesic { count, dim, seed },
                    SampleKind::CircleLinf => SpaceSpec::CircleLinf { count },
                    SampleKind::SphereLinf => SpaceSpec::SphereLinf { count, dim, seed },
                    SampleKind::BoxBoundaryLinf => SpaceSpec::BoxBoundaryLinf { count, dim, seed },
                    SampleKind::Tree => SpaceSpec::Tree { count, seed },
                },
                (None, None) => return Err("pass either --spec or --kind".into()),
            };
            let m = space_spec.sample()?;
            let is_csv = out
                .as_deref()
                .and_then(Path::extension)
                .is_some_and(|e| e == "csv");
            let text = if is_csv {
                write_matrix_csv(&m)
            } else {
                write_matrix_json(&m)
            };
            emit(text.trim_end().to_string(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Barcode {
            input,
            field,
            max_dim,
            r_max,
            out,
            svg,
        } => {
            let m = load_matrix(&input)?;
            let r = effective_r_max(&m, r_max);
            let f = vr_filtration(&m, max_dim + 1, r)?;
            let b = compute_barcode(&f, field, max_dim)?;
            let truncated = r < m.diameter();
            let json = barcode_to_json(&b, vec![("truncated", Json::Bool(truncated))]);
            emit(json.render(), out.as_deref())?;
            if let Some(svg_path) = svg {
                fs::write(svg_path, render_svg(&b))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bottleneck {
            input1,
            input2,
            dim,
            out,
        } => {
            let b1 = load_barcode(&input1)?;
            let b2 = load_barcode(&input2)?;
            if b1.field_char() != b2.field_char() {
                return Err(format!(
                    "coefficient fields differ: F{} vs F{}",
                    b1.field_char(),
                    b2.field_char()
                )
                .into());
            }
            let (dist, matching) = bottleneck(b1.in_dim(dim), b2.in_dim(dim));
            let json = Json::obj(vec![
                ("dim", Json::Int(dim as i64)),
                ("distance", Json::Float(dist)),
                ("matching", matching_to_json(&matching)),
            ]);
            emit(json.render(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Invariants {
            input,
            field,
            max_dim,
            r_max,
            assert,
            birth_tol,
            subset_budget,
            out,
        } => {
            let m = load_matrix(&input)?;
            let r = effective_r_max(&m, r_max);
            let f = vr_filtration(&m, max_dim + 1, r)?;
            let b = compute_barcode(&f, field, max_dim)?;
            let cfg = BoundsConfig {
                subset_budget,
                birth_tol,
            };
            let report = bounds_report(&m, &b, &cfg)?;
            emit(invariant_report_to_json(&report).render(), out.as_deref())?;
            if assert && !report.asserted_bounds_hold() {
                eprintln!("asserted bound violated");
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Kunneth {
            input1,
            input2,
            out,
        } => {
            let product = kunneth_product(&load_barcode(&input1)?, &load_barcode(&input2)?)?;
            emit(barcode_to_json(&product, vec![]).render(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Wedge {
            input1,
            input2,
            out,
        } => {
            let sum = wedge_sum(&load_barcode(&input1)?, &load_barcode(&input2)?)?;
            emit(barcode_to_json(&sum, vec![]).render(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            kind,
            radius,
            l_max,
            n,
            field,
            out,
        } => {
            let b = match kind {
                OracleKind::Circle => oracle_circle(radius, l_max, field)?,
                OracleKind::LinfSphere => oracle_linf_sphere(n, field)?,
                OracleKind::LinfSquare => oracle_linf_square(n, field),
                OracleKind::SphereFundamental => {
                    let bar = oracle_sphere_fundamental(n);
                    Barcode::from_intervals(field, vec![bar])
                }
            };
            emit(barcode_to_json(&b, vec![]).render(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CechCheck {
            input,
            max_dim,
            out,
        } => {
            let m = load_matrix(&input)?;
            let coords = m
                .coords
                .as_ref()
                .ok_or("matrix file carries no coords; sample an linf space")?;
            let report = check_cech_vr(coords, max_dim)?;
            let mut fields = vec![
                ("ok", Json::Bool(report.ok)),
                (
                    "simplices_checked",
                    Json::Int(report.simplices_checked as i64),
                ),
            ];
            if let Some((verts, twice_cech, vr)) = &report.first_mismatch {
                fields.push((
                    "first_mismatch",
                    Json::obj(vec![
                        (
                            "vertices",
                            Json::Arr(verts.iter().map(|&v| Json::Int(v as i64)).collect()),
                        ),
                        ("twice_cech_value", Json::Float(*twice_cech)),
                        ("vr_value", Json::Float(*vr)),
                    ]),
                ));
            }
            emit(Json::obj(fields).render(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::BicombingCheck {
            trials,
            dim,
            seed,
            out,
        } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let vector = |rng: &mut rand_chacha::ChaCha8Rng| {
                LinfVector((0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect())
            };
            let mut failures = 0i64;
            for _ in 0..trials {
                let f = vector(&mut rng);
                let g = vector(&mut rng);
                let h = vector(&mut rng);
                let (a, b) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let (s, t) = if a <= b { (a, b) } else { (b, a) };
                if !katz_property_check(&f, &g, &h, s, t)?.all_hold() {
                    failures += 1;
                }
            }
            let zero = LinfVector(vec![0.0, 0.0]);
            let g = LinfVector(vec![4.0, 5.0]);
            let g2 = LinfVector(vec![1.0, 5.0]);
            let conical_violated = !conical_inequality_holds(&zero, &g, &zero, &g2, 0.9)?;
            let reversible_violated = !reversibility_holds(&zero, &g, 0.2)?;
            let json = Json::obj(vec![
                ("trials", Json::Int(trials as i64)),
                ("property_failures", Json::Int(failures)),
                ("all_hold", Json::Bool(failures == 0)),
                (
                    "counterexample_conical_violated",
                    Json::Bool(conical_violated),
                ),
                (
                    "counterexample_reversible_violated",
                    Json::Bool(reversible_violated),
                ),
            ]);
            emit(json.render(), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { name } => run_suite(name),
        Command::Render { input, out } => {
            let b = load_barcode(&input)?;
            fs::write(out, render_svg(&b))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

// ---------------------------------------------------------------------------
// canned suites
// ---------------------------------------------------------------------------

fn check(name: &str, ok: bool, detail: String, failures: &mut usize) {
    if ok {
        println!("PASS {name}: {detail}");
    } else {
        println!("FAIL {name}: {detail}");
        *failures += 1;
    }
}

fn random_metric(n: usize, seed: u64, lo: f64, hi: f64) -> DistanceMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut raw = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(lo..hi);
            raw[i][j] = v;
            raw[j][i] = v;
        }
    }
    DistanceMatrix::validate(&raw).expect("entries in [lo, hi] with hi <= 2 lo form a metric")
}

fn full_barcode(d: &DistanceMatrix, hmax: usize) -> Result<Barcode, CliError> {
    let f = vr_filtration(d, hmax + 1, f64::INFINITY)?;
    Ok(compute_barcode(&f, 2, hmax)?)
}

fn run_suite(name: SuiteName) -> Result<ExitCode, CliError> {
    let mut failures = 0usize;
    match name {
        SuiteName::CechVr => {
            use rand::{Rng, SeedableRng};
            let mut all = true;
            let mut total = 0;
            for seed in 0..20u64 {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let n = rng.gen_range(3..=9);
                let pts: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect();
                let rep = check_cech_vr(&pts, 3)?;
                all &= rep.ok;
                total += rep.simplices_checked;
            }
            let circle = sample_linf_sphere(24, 2, 0)?;
            let rep = check_cech_vr(circle.coords.as_ref().unwrap(), 3)?;
            all &= rep.ok;
            total += rep.simplices_checked;
            check(
                "cech-vr",
                all,
                format!(
                    "Cech(r) = VR(2r) on {total} simplices across 20 random sets + linf circle"
                ),
                &mut failures,
            );
        }
        SuiteName::Katz => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            let mut all = true;
            for _ in 0..1000 {
                let v = |rng: &mut rand_chacha::ChaCha8Rng| {
                    LinfVector((0..5).map(|_| rng.gen_range(-5.0..5.0)).collect())
                };
                let f = v(&mut rng);
                let g = v(&mut rng);
                let h = v(&mut rng);
                let (a, b) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let (s, t) = if a <= b { (a, b) } else { (b, a) };
                all &= katz_property_check(&f, &g, &h, s, t)?.all_hold();
            }
            check(
                "katz properties",
                all,
                "six properties on 1000 seeded triples".into(),
                &mut failures,
            );
            let zero = LinfVector(vec![0.0, 0.0]);
            let g = LinfVector(vec![4.0, 5.0]);
            let g2 = LinfVector(vec![1.0, 5.0]);
            check(
                "katz counterexamples",
                !conical_inequality_holds(&zero, &g, &zero, &g2, 0.9)?
                    && !reversibility_holds(&zero, &g, 0.2)?,
                "conicality and reversibility both violated on the printed inputs".into(),
                &mut failures,
            );
        }
        SuiteName::Kunneth => {
            use rand::{Rng, SeedableRng};
            let mut exact = true;
            for seed in 0..10u64 {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(500 + seed);
                let na = rng.gen_range(2..=5);
                let nb = rng.gen_range(2..=5);
                let a = random_metric(na, 600 + seed, 1.0, 2.0);
                let b = random_metric(nb, 700 + seed, 1.0, 2.0);
                let product = linf_product(&a, &b)?;
                let computed = full_barcode(&product, 2)?;
                let predicted = kunneth_product(&full_barcode(&a, 2)?, &full_barcode(&b, 2)?)?
                    .truncated_to_dim(2);
                exact &= computed.same_multiset(&predicted);
            }
            check(
                "kunneth",
                exact,
                "product barcodes match tensor barcodes exactly, 10 pairs".into(),
                &mut failures,
            );
            let c = oracle_circle(1.0, 3, 2)?;
            let torus = kunneth_product(&c, &c)?;
            let tau = std::f64::consts::TAU;
            let ok = torus.in_dim(1).len() == 2
                && torus.in_dim(2).len() == 1
                && torus.in_dim(4).is_empty()
                && torus.in_dim(8).is_empty()
                && torus
                    .in_dim(1)
                    .iter()
                    .all(|i| i.birth == 0.0 && i.death == tau / 3.0);
            check(
                "torus closed form",
                ok,
                "two-copy odd rows, empty 4k+4 rows".into(),
                &mut failures,
            );
        }
        SuiteName::OracleCircle => {
            let tau = std::f64::consts::TAU;
            let d = sample_circle(64, 1.0)?;
            let f = vr_filtration(&d, 2, f64::INFINITY)?;
            let b = compute_barcode(&f, 2, 1)?;
            let oracle = [Interval::new(1, 0.0, tau / 3.0)];
            let (dist, _) = bottleneck(b.in_dim(1), &oracle);
            let tol = tau / 64.0 + 1e-12;
            check(
                "circle dgm1 vs oracle",
                dist <= tol,
                format!("d_B = {dist:.6} <= {tol:.6} on 64 samples"),
                &mut failures,
            );
            let f = vr_filtration(&d, 4, 2.7)?;
            let b = compute_barcode(&f, 2, 3)?;
            let target = (tau / 3.0, 2.0 * tau / 5.0);
            let hit = b
                .in_dim(3)
                .iter()
                .any(|i| (i.birth - target.0).abs() <= tol && (i.death - target.1).abs() <= tol);
            check(
                "circle dgm3 bar",
                hit,
                format!("bar within {tol:.4} of ({:.4}, {:.4}]", target.0, target.1),
                &mut failures,
            );
        }
        SuiteName::Stability => {
            let eps = 0.01;
            let mut ok = true;
            let mut worst: f64 = 0.0;
            for seed in 0..5u64 {
                let d = random_metric(8, 900 + seed, 1.2, 1.8);
                let p = perturb(&d, eps, 1000 + seed)?;
                let delta = linf_distortion(&d, &p)?;
                let bd = full_barcode(&d, 2)?;
                let bp = full_barcode(&p, 2)?;
                for dim in 0..=2 {
                    let (dist, _) = bottleneck(bd.in_dim(dim), bp.in_dim(dim));
                    ok &= dist <= delta + 1e-12;
                    worst = worst.max(dist);
                }
            }
            check(
                "stability",
                ok,
                format!("d_B <= linf distortion on 5 perturbed pairs (worst {worst:.5})"),
                &mut failures,
            );
        }
    }
    if failures == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}
