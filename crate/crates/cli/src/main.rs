use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optosqueeze_core::{ConfigDocument, DetuningConvention, SystemConfig, ThermalNoise};
use optosqueeze_cli::{
    run_figure, run_point, run_sweep, spectrum_csv, Axis, BranchPolicy, CliError, EvalOptions,
    FigureTask, Quantity, SweepSpec, VarianceMethod,
};

#[derive(Parser)]
#[command(name = "optosqueeze", version, about = "Mechanical squeezing with linear and quadratic optomechanical coupling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Thermal noise model (overrides the config file)
    #[arg(long, value_parser = parse_thermal)]
    thermal_mode: Option<ThermalNoise>,
    /// Detuning convention (overrides the config file)
    #[arg(long, value_parser = parse_convention)]
    detuning_convention: Option<DetuningConvention>,
    /// Variance method
    #[arg(long, default_value = "both", value_parser = parse_method)]
    method: VarianceMethod,
    /// Worker threads, 0 for all cores
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single operating point
    Point {
        #[command(flatten)]
        common: Common,
        /// Directory for point.csv and spectrum.csv
        #[arg(long)]
        out: Option<PathBuf>,
        /// Frequencies in spectrum.csv
        #[arg(long, default_value_t = 400)]
        spectrum_points: usize,
    },
    /// Sweep one or two parameters
    Sweep {
        #[command(flatten)]
        common: Common,
        /// name=lin:LO:HI:N, name=log:LO:HI:N or name=values:V1,V2 (once or twice)
        #[arg(long, required = true)]
        axis: Vec<String>,
        /// Comma-separated quantities
        #[arg(long, default_value = "I,normalized_spring,var_x,var_p")]
        quantities: String,
        /// all | followed
        #[arg(long, default_value = "all")]
        branch_policy: String,
        /// Output directory for sweep.csv (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a reference dataset
    Figure {
        /// spring-map | intensity-stability | damping-map | variance-curves
        id: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// List parameter presets
    Presets,
}

fn parse_thermal(s: &str) -> Result<ThermalNoise, String> {
    s.parse()
}

fn parse_convention(s: &str) -> Result<DetuningConvention, String> {
    s.parse()
}

fn parse_method(s: &str) -> Result<VarianceMethod, String> {
    s.parse()
}

fn load(common: &Common) -> Result<(SystemConfig, EvalOptions), CliError> {
    let mut doc = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            ConfigDocument::parse(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => ConfigDocument::default(),
    };
    if let Some(mode) = common.thermal_mode {
        doc.options.thermal_noise = mode;
    }
    if let Some(convention) = common.detuning_convention {
        doc.system.detuning_convention = convention;
    }
    doc.system.validate()?;
    let options = EvalOptions {
        model: doc.options,
        method: common.method,
        skip_variances: false,
    };
    Ok((doc.system, options))
}

fn write_or_print(out: Option<&Path>, name: &str, contents: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, contents)?;
            log::info!("wrote {}", path.display());
        }
        None => print!("{contents}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Presets => {
            for name in SystemConfig::preset_names() {
                let doc = ConfigDocument {
                    system: SystemConfig::preset(name).expect("listed preset"),
                    ..ConfigDocument::default()
                };
                println!("# preset = {name}\n{doc}");
            }
            Ok(())
        }
        Command::Point { common, out, spectrum_points } => {
            let (config, options) = load(&common)?;
            let report = run_point(&config, &options)?;
            print!("{}", report.text);
            if let Some(dir) = out.as_deref() {
                let axis = Axis::values("input_power", vec![config.input_power])?;
                let quantities = Quantity::ALL.to_vec();
                let table = run_sweep(&SweepSpec::new(axis, quantities, config), &options, common.workers)?;
                write_or_print(Some(dir), "point.csv", &table.to_csv())?;
                if report.selected().is_some() {
                    write_or_print(Some(dir), "spectrum.csv", &spectrum_csv(&report, &options, spectrum_points)?)?;
                }
            }
            report.outcome()
        }
        Command::Sweep { common, axis, quantities, branch_policy, out } => {
            let (config, options) = load(&common)?;
            if axis.len() > 2 {
                return Err(CliError::Config("at most two --axis flags".into()));
            }
            let mut axes = axis.iter().map(|a| a.parse::<Axis>()).collect::<Result<Vec<_>, _>>()?;
            let quantities = quantities
                .split(',')
                .filter(|q| !q.trim().is_empty())
                .map(str::parse)
                .collect::<Result<Vec<Quantity>, _>>()?;
            let axis2 = if axes.len() == 2 { axes.pop() } else { None };
            let mut spec = SweepSpec::new(axes.remove(0), quantities, config);
            spec.axis2 = axis2;
            spec.policy = branch_policy.parse::<BranchPolicy>()?;
            let result = run_sweep(&spec, &options, common.workers)?;
            write_or_print(out.as_deref(), "sweep.csv", &result.to_csv())
        }
        Command::Figure { id, common, out } => {
            let task: FigureTask = id.parse()?;
            let (config, options) = load(&common)?;
            let path = run_figure(task, config, &options, common.workers, &out)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
