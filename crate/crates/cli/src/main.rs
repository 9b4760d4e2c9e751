use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::panic;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use ellclass::elliptic::{self, CurveError};
use ellclass::quadforms::{self, Discriminant, FormError};
use ellclass::quadorder::FieldData;
use ellclass::scan::{self, ScanError, ScanOptions};
use ellclass::specialize::{self, SpecStatus, SpecializeError, SpecializeOptions};
use ellclass::{arith, Curve, Point};

#[derive(Parser)]
#[command(
    name = "ellclass",
    version,
    about = "Rational points of elliptic curves and class groups of real quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curve properties.
    #[command(subcommand)]
    Curve(CurveCommand),
    /// Point membership, multiplication and torsion.
    #[command(subcommand)]
    Point(PointCommand),
    /// Class numbers of a discriminant.
    Classgroup(ClassgroupArgs),
    /// Specialize a point at one prime.
    Specialize(SpecializeArgs),
    /// Specialize a point at every prime up to a bound.
    Scan(ScanArgs),
}

#[derive(Subcommand)]
enum CurveCommand {
    /// Discriminant and singularity of y² = x³ + ax + b.
    #[command(allow_negative_numbers = true)]
    Info(CurveArgs),
}

#[derive(Subcommand)]
enum PointCommand {
    /// Whether the point lies on the curve.
    #[command(allow_negative_numbers = true)]
    Check(PointArgs),
    /// The multiple nP.
    #[command(allow_negative_numbers = true)]
    Mul {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        n: BigInt,
    },
    /// The torsion order of the point, if finite.
    #[command(allow_negative_numbers = true)]
    Torsion(PointArgs),
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    a: BigInt,
    #[arg(long)]
    b: BigInt,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Integer or fraction such as 129/100.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
}

#[derive(Args)]
#[command(allow_negative_numbers = true, group(ArgGroup::new("input").required(true).args(["delta", "d"])))]
struct ClassgroupArgs {
    /// Discriminant of the forms.
    #[arg(long)]
    delta: Option<BigInt>,
    /// Radicand: uses the field discriminant when squarefree, else 4d.
    #[arg(long)]
    d: Option<BigInt>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SpecializeArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long)]
    p: BigInt,
    /// Keep non-squarefree d and work in ℤ[√d].
    #[arg(long)]
    order_mode: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ScanArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long)]
    pmax: u64,
    #[arg(long)]
    order_mode: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Scan even if the point has finite order.
    #[arg(long)]
    allow_torsion: bool,
    /// A second point, recorded in the report metadata.
    #[arg(long, value_name = "X2,Y2", allow_hyphen_values = true)]
    aux_point: Option<String>,
}

enum Failure {
    Invalid(String),
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<CurveError> for Failure {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::LutzNagellViolation { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<SpecializeError> for Failure {
    fn from(e: SpecializeError) -> Self {
        match e {
            SpecializeError::NotPrime(_)
            | SpecializeError::PrimeTooSmall(_)
            | SpecializeError::PointNotOnCurve => Failure::Invalid(e.to_string()),
            SpecializeError::Curve(inner) => inner.into(),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::TorsionPoint(_) | ScanError::PointAtInfinity => {
                Failure::Invalid(e.to_string())
            }
            ScanError::Curve(inner) => inner.into(),
            ScanError::Specialize(inner) => inner.into(),
            ScanError::Io(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn curve(args: &CurveArgs) -> Result<Curve, Failure> {
    Ok(Curve::new(args.a.clone(), args.b.clone())?)
}

fn point_on_curve(args: &PointArgs) -> Result<(Curve, Point), Failure> {
    let curve = curve(&args.curve)?;
    let point = Point::parse(&args.x, &args.y)?;
    if !curve.on_curve(&point) {
        return Err(CurveError::NotOnCurve(point).into());
    }
    Ok((curve, point))
}

fn point_json(p: &Point) -> Value {
    match (p.x(), p.y()) {
        (Some(x), Some(y)) => json!({ "x": x.to_string(), "y": y.to_string() }),
        _ => json!({ "infinity": true }),
    }
}

fn curve_info(args: &CurveArgs) -> Value {
    let disc = elliptic::discriminant(&args.a, &args.b);
    json!({
        "a": args.a.to_string(),
        "b": args.b.to_string(),
        "discriminant": disc.to_string(),
        "singular": disc == BigInt::from(0),
    })
}

fn point_command(cmd: &PointCommand) -> Result<Value, Failure> {
    match cmd {
        PointCommand::Check(args) => {
            let curve = curve(&args.curve)?;
            let point = Point::parse(&args.x, &args.y)?;
            Ok(json!({ "point": point_json(&point), "on_curve": curve.on_curve(&point) }))
        }
        PointCommand::Mul { point, n } => {
            let (curve, p) = point_on_curve(point)?;
            let q = curve.scalar_mul(n, &p)?;
            Ok(json!({ "n": n.to_string(), "result": point_json(&q) }))
        }
        PointCommand::Torsion(args) => {
            let (curve, p) = point_on_curve(args)?;
            let order = curve.torsion_order(&p)?;
            Ok(json!({
                "point": point_json(&p),
                "torsion": order.is_some(),
                "order": order.map(|o| o.to_string()),
            }))
        }
    }
}

fn classgroup(args: &ClassgroupArgs) -> Result<Value, Failure> {
    let disc = match (&args.delta, &args.d) {
        (Some(delta), _) => Discriminant::new(delta.clone())?,
        (None, Some(d)) => {
            if d <= &BigInt::from(0) || arith::is_square(d) {
                return Err(Failure::Invalid(format!(
                    "d = {d} must be a positive nonsquare"
                )));
            }
            match FieldData::new(d.clone()) {
                Ok(field) => field.discriminant(),
                Err(_) => Discriminant::new(BigInt::from(4) * d)?,
            }
        }
        (None, None) => unreachable!("clap requires one of --delta, --d"),
    };
    let h = quadforms::class_number(&disc)?;
    Ok(json!({
        "delta": disc.value().to_string(),
        "h_narrow": h.narrow.to_string(),
        "h_wide": h.wide.to_string(),
        "reduced_form_count": h.reduced_form_count.to_string(),
    }))
}

fn specialize_command(args: &SpecializeArgs) -> Result<Value, Failure> {
    let (curve, point) = point_on_curve(&args.point)?;
    let canonical = curve.canonicalize(&point)?;
    let opts = SpecializeOptions {
        order_mode: args.order_mode,
        ..Default::default()
    };
    let result = specialize::specialize_point(&curve, &canonical, &args.p, &opts)?;
    let mut out = result.to_json();
    if result.status == SpecStatus::Ok {
        out["verdict"] = specialize::class_verdict(&result)?.to_json();
    }
    Ok(out)
}

fn parse_aux_point(curve: &Curve, s: &str) -> Result<Point, Failure> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Failure::Invalid(format!("--aux-point expects X2,Y2, got {s:?}")))?;
    let p = Point::parse(x, y)?;
    if !curve.on_curve(&p) {
        return Err(CurveError::NotOnCurve(p).into());
    }
    Ok(p)
}

fn scan_command(args: &ScanArgs) -> Result<(), Failure> {
    let (curve, point) = point_on_curve(&args.point)?;
    let aux_point = args
        .aux_point
        .as_deref()
        .map(|s| parse_aux_point(&curve, s))
        .transpose()?;
    let opts = ScanOptions {
        order_mode: args.order_mode,
        jobs: args.jobs as usize,
        allow_torsion: args.allow_torsion,
        aux_point,
        ..Default::default()
    };
    let report = scan::scan(&curve, &point, args.pmax, &opts)?;
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).map_err(|e| {
                Failure::Invalid(format!("cannot write {path}: {e}"))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match args.format {
        Format::Csv => scan::write_csv(&report.rows, &mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report.to_json())
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            writeln!(out).map_err(ScanError::from)?;
        }
    }
    out.flush().map_err(ScanError::from)?;
    let s = &report.summary;
    eprintln!(
        "primes {}, ok {}, nontrivial {}",
        s.primes_considered, s.ok_count, s.nontrivial_count
    );
    Ok(())
}

fn print_json(v: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("JSON values serialize")
    );
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Curve(CurveCommand::Info(args)) => print_json(&curve_info(&args)),
        Command::Point(cmd) => print_json(&point_command(&cmd)?),
        Command::Classgroup(args) => print_json(&classgroup(&args)?),
        Command::Specialize(args) => print_json(&specialize_command(&args)?),
        Command::Scan(args) => scan_command(&args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
