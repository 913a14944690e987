use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use romlab::pod::H1Convention;
use romlab::rom::Linearization;
use romlab::study::{run_study, write_csv, write_plot_data, FinalErrorKind, StudyConfig, StudyKind, StudyResult};

const EXIT_INVALID: u8 = 2;
const EXIT_POINT_FAILURES: u8 = 3;
const EXIT_NO_REGRESSION: u8 = 4;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    FilterDelta,
    FilterR,
    LromDt,
    LromDelta,
    LromR,
}

impl From<Kind> for StudyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::FilterDelta => StudyKind::FilterDelta,
            Kind::FilterR => StudyKind::FilterR,
            Kind::LromDt => StudyKind::LromDt,
            Kind::LromDelta => StudyKind::LromDelta,
            Kind::LromR => StudyKind::LromR,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    PicardImplicit,
    SemiImplicit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FinalError {
    /// ||u^M - u_r^M||
    RomState,
    /// ||u^M - filtered u^M||
    FilteredSnapshot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    Full,
    Seminorm,
}

/// Runs one of the filter / Leray ROM convergence studies and writes its
/// CSV table and log-log plot data.
#[derive(Debug, Parser)]
#[command(name = "romlab", version)]
struct Cli {
    /// Study to run.
    #[arg(value_enum)]
    kind: Kind,
    /// Cells per side of the unit-square mesh.
    #[arg(long)]
    mesh_n: Option<usize>,
    /// Number of POD modes (ignored by the r sweeps).
    #[arg(long)]
    r: Option<usize>,
    /// Filter radius (ignored by the delta sweeps).
    #[arg(long)]
    delta: Option<f64>,
    /// Time step (ignored by the dt sweep).
    #[arg(long)]
    dt: Option<f64>,
    /// Viscosity.
    #[arg(long)]
    nu: Option<f64>,
    /// Final time.
    #[arg(long)]
    t_final: Option<f64>,
    /// Comma-separated sweep values; defaults to the study's reference grid.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<f64>>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-data path; defaults to the CSV path with extension `dat`.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Directory for the cached POD basis.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Treatment of the nonlinear term in each time step.
    #[arg(long, value_enum, default_value = "picard-implicit")]
    linearization: Mode,
    /// Final-time error reported by the ROM studies.
    #[arg(long, value_enum, default_value = "rom-state")]
    final_error: FinalError,
    /// Mode norm used in Lambda_H1.
    #[arg(long, value_enum, default_value = "full")]
    h1_convention: Convention,
}

impl Cli {
    fn config(&self) -> StudyConfig {
        let mut cfg = StudyConfig::paper_defaults(self.kind.into());
        if let Some(n) = self.mesh_n {
            cfg.mesh_n = n;
        }
        if let Some(r) = self.r {
            cfg.r = r;
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(nu) = self.nu {
            cfg.nu = nu;
        }
        if let Some(t) = self.t_final {
            cfg.t_final = t;
        }
        if let Some(s) = &self.sweep {
            cfg.sweep = s.clone();
        }
        cfg.out = self.out.clone();
        cfg.cache_dir = self.cache.clone();
        cfg.linearization = match self.linearization {
            Mode::PicardImplicit => Linearization::PicardImplicit,
            Mode::SemiImplicit => Linearization::SemiImplicit,
        };
        cfg.final_error = match self.final_error {
            FinalError::RomState => FinalErrorKind::RomState,
            FinalError::FilteredSnapshot => FinalErrorKind::FilteredSnapshot,
        };
        cfg.convention = match self.h1_convention {
            Convention::Full => H1Convention::Full,
            Convention::Seminorm => H1Convention::Seminorm,
        };
        cfg
    }
}

fn write_outputs(cli: &Cli, result: &StudyResult) -> io::Result<()> {
    match &cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_csv(result, &mut w).map_err(io::Error::other)?;
            w.flush()?;
        }
        None => write_csv(result, io::stdout().lock()).map_err(io::Error::other)?,
    }
    let plot = cli.plot.clone().or_else(|| cli.out.as_ref().map(|p| p.with_extension("dat")));
    if let Some(path) = plot {
        let mut w = BufWriter::new(File::create(path)?);
        write_plot_data(result, &mut w).map_err(io::Error::other)?;
        w.flush()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.config();
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INVALID);
    }
    let result = match run_study(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if let Err(e) = write_outputs(&cli, &result) {
        eprintln!("error: writing output: {e}");
        return ExitCode::FAILURE;
    }
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    for (name, fit) in [("e_l2", result.l2_fit), ("e_h1", result.h1_fit)] {
        if let Some(f) = fit {
            eprintln!("{name}: slope {:.4}, R^2 {:.4}", f.slope, f.r_squared);
        }
    }
    if result.l2_fit.is_none() {
        ExitCode::from(EXIT_NO_REGRESSION)
    } else if result.failures() > 0 {
        ExitCode::from(EXIT_POINT_FAILURES)
    } else {
        ExitCode::SUCCESS
    }
}
