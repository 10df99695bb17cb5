//! `vafr`: foveation, LP ray casting, buffer statistics and shading-rate
//! analysis from the command line.

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vafr::baselines::{self, GazeSpec, SweepSpec};
use vafr::lpbuffer::{layout_stats, LpLayout};
use vafr::presets::{table_presets, Resolution, PRESETS};
use vafr::raycast::{self, SceneFile};
use vafr::{AaMode, DeltaSpec, FoveationParams, Foveator, Image, OutsidePolicy, VafrError};

mod config;

use config::{build_context, load_model, resolve_cr, Config, ModelOptions};

#[derive(Debug)]
pub enum Failure {
    Core(VafrError),
    Invalid(String),
    Io(PathBuf, std::io::Error),
}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Io(path.to_path_buf(), e)
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) => e.exit_code() as u8,
            Failure::Invalid(_) => 2,
            Failure::Io(..) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Invalid(msg) => f.write_str(msg),
            Failure::Io(path, e) => write!(f, "I/O error on {}: {e}", path.display()),
        }
    }
}

impl From<VafrError> for Failure {
    fn from(e: VafrError) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T = ()> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "vafr", version, about = "Visual-acuity-consistent foveated rendering tools")]
#[command(after_help = "Exit codes: 0 ok, 2 invalid input, 3 I/O failure, 4 numeric domain error.")]
struct Cli {
    /// Worker threads (default: all hardware threads).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Foveate an image through the log-polar buffer.
    Foveate(FoveateArgs),
    /// Ray-cast a scene into the LP buffer (vafr) or at native resolution (gt).
    Render(RenderArgs),
    /// Sample shading-rate curves of VaFR and the baseline methods as CSV.
    Analyze(AnalyzeArgs),
    /// Per-eye pixel/ray counts for the named display resolutions.
    BufferStats(StatsArgs),
    /// Cap the acuity model at a display's foveal density.
    Adapt(AdaptArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct ModelArgs {
    /// JSON config file; flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Acuity model JSON: {"pivots": [[eccentricity deg, acuity cpd], ...], "e_max": deg}.
    #[arg(long, value_name = "PATH")]
    acuity: Option<PathBuf>,
    /// Display foveal density cap in cycles per degree (cpd), e.g. 9.
    #[arg(long, value_name = "CPD", allow_negative_numbers = true)]
    device_cap: Option<f64>,
    /// Tangential/radial rate ratio: a number, constant:R, or table:E:R,E:R,... with E in degrees.
    #[arg(long, value_name = "SPEC", value_parser = parse_delta)]
    delta: Option<DeltaSpec>,
}

impl ModelArgs {
    fn options(&self, cfg: &Config) -> ModelOptions {
        ModelOptions {
            acuity: self.acuity.clone(),
            device_cap: self.device_cap,
            delta: self.delta.clone().or_else(|| cfg.delta.clone()),
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
struct CameraArgs {
    /// Film (sensor) height in millimetres.
    #[arg(long = "film", value_name = "MM", allow_negative_numbers = true)]
    film_height_mm: Option<f64>,
    /// Focal length in millimetres.
    #[arg(long = "focal", value_name = "MM", allow_negative_numbers = true)]
    focal_length_mm: Option<f64>,
    /// Per-pixel ratio c_r, so that tan(eccentricity) = c_r * radius in pixels. Overrides --film/--focal.
    #[arg(long = "cr", value_name = "RATIO", allow_negative_numbers = true)]
    c_r: Option<f64>,
}

#[derive(Args, Debug)]
struct FoveateArgs {
    /// Input image (PNG or PPM).
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Output image [default: <input stem>_foveated.png].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Gaze point in pixels as x,y, or "center" [default: image centre].
    #[arg(long, value_name = "X,Y", value_parser = parse_gaze)]
    gaze: Option<GazeSpec>,
    /// Anti-aliasing applied in the LP buffer [default: fxaa].
    #[arg(long, value_enum)]
    aa: Option<AaArg>,
    /// Pixels beyond the model's maximum eccentricity (degrees): clamp, passthrough, or solid:R,G,B[,A].
    #[arg(long, value_name = "POLICY", value_parser = parse_outside)]
    outside: Option<OutsidePolicy>,
    /// Also write the LP buffer as an image (u across, v down; magenta marks unused texels).
    #[arg(long, value_name = "PATH")]
    dump_lp: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    camera: CameraArgs,
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// Scene JSON file, or fixture:N for the built-in scene with N point lights.
    #[arg(long, value_name = "PATH|fixture:N")]
    scene: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Vafr)]
    mode: ModeArg,
    /// Display resolution in pixels as WxH, or a preset (1080p, 2K, 4K, 6K, 8K, retinal).
    #[arg(long, value_name = "WxH", default_value = "1920x1080", value_parser = parse_res)]
    res: Resolution,
    /// Gaze point in pixels as x,y, or "center".
    #[arg(long, value_name = "X,Y", value_parser = parse_gaze)]
    gaze: Option<GazeSpec>,
    /// Output image [default: render_<mode>.png].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write ray counts and per-stage timings (milliseconds) as JSON.
    #[arg(long, value_name = "PATH")]
    stats_out: Option<PathBuf>,
    /// Anti-aliasing in the LP buffer (vafr mode) [default: fxaa].
    #[arg(long, value_enum)]
    aa: Option<AaArg>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// CSV destination [default: stdout].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Emit rows for both centre and top-left-corner gaze.
    #[arg(long)]
    gaze_sweep: bool,
    /// Method set to evaluate.
    #[arg(long, value_enum, default_value_t = PresetSet::Paper)]
    presets: PresetSet,
    /// Eccentricity step in degrees; samples run from the step up to 55 degrees.
    #[arg(long, value_name = "DEG", default_value_t = 0.5, allow_negative_numbers = true)]
    e_step: f64,
    /// Restrict to these display resolutions (WxH or preset names, pixels).
    #[arg(long, value_name = "WxH", value_parser = parse_res)]
    res: Vec<Resolution>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Displays to list (WxH or preset names, pixels) [default: 2K 4K 6K 8K retinal].
    #[arg(long, value_name = "WxH", value_parser = parse_res)]
    res: Vec<Resolution>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct AdaptArgs {
    /// Display foveal density cap in cycles per degree (cpd).
    #[arg(long, value_name = "CPD", allow_negative_numbers = true)]
    device_cap: f64,
    /// Acuity model JSON to adapt [default: built-in model].
    #[arg(long, value_name = "PATH")]
    acuity: Option<PathBuf>,
    /// Write the adapted model JSON here [default: stdout].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AaArg {
    None,
    Fxaa,
}

impl From<AaArg> for AaMode {
    fn from(a: AaArg) -> Self {
        match a {
            AaArg::None => AaMode::None,
            AaArg::Fxaa => AaMode::LpFxaa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Vafr,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetSet {
    Paper,
}

fn parse_res(s: &str) -> Result<Resolution, String> {
    s.parse().map_err(|e: VafrError| e.to_string())
}

fn parse_gaze(s: &str) -> Result<GazeSpec, String> {
    s.parse().map_err(|e: VafrError| e.to_string())
}

fn parse_delta(s: &str) -> Result<DeltaSpec, String> {
    s.parse().map_err(|e: VafrError| e.to_string())
}

fn parse_outside(s: &str) -> Result<OutsidePolicy, String> {
    match s {
        "clamp" | "clamp-ring" => return Ok(OutsidePolicy::ClampRing),
        "passthrough" => return Ok(OutsidePolicy::PassthroughSource),
        _ => {}
    }
    let bad = || format!("expected clamp, passthrough or solid:R,G,B[,A], got {s:?}");
    let rest = s.strip_prefix("solid:").ok_or_else(bad)?;
    let parts: Vec<u8> = rest.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    match parts[..] {
        [r, g, b] => Ok(OutsidePolicy::SolidColor([r, g, b, 255])),
        [r, g, b, a] => Ok(OutsidePolicy::SolidColor([r, g, b, a])),
        _ => Err(bad()),
    }
}

fn default_foveated_path(input: &Path) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    input.with_file_name(format!("{stem}_foveated.png"))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn print(text: &str) -> CliResult {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))
}

fn cmd_foveate(args: FoveateArgs) -> CliResult {
    let cfg = Config::load(args.model.config.as_deref())?;
    let opts = args.model.options(&cfg);
    let img = Image::open(&args.input)?;
    let (w, h) = (img.width(), img.height());
    if let Some([cw, ch]) = cfg.display {
        if (cw, ch) != (w, h) {
            return Err(Failure::Invalid(format!("config display {cw}x{ch} does not match the {w}x{h} input")));
        }
    }
    let model = load_model(&cfg, &opts)?;
    let c_r = resolve_cr(&cfg, args.camera.c_r, args.camera.film_height_mm, args.camera.focal_length_mm, h)?;
    let res = Resolution::new(w, h);
    let gaze = args.gaze.map(|g| g.resolve(res)).or(cfg.gaze.map(|g| (g[0], g[1])));
    let ctx = build_context(model, c_r, (w, h), gaze, opts.delta.unwrap_or_default())?;

    let params = FoveationParams {
        gaze: ctx.gaze(),
        aa_mode: args.aa.map(AaMode::from).or(cfg.aa_mode).unwrap_or_default(),
        outside_policy: args.outside.or(cfg.outside_policy).unwrap_or_default(),
    };
    let mut fov = Foveator::new(ctx);
    let out_img = fov.foveate(&img, &params)?;
    let out = args.out.or_else(|| cfg.out.as_deref().map(|p| cfg.resolve(p))).unwrap_or_else(|| default_foveated_path(&args.input));
    out_img.save(&out)?;
    if let Some(dump) = args.dump_lp.or_else(|| cfg.dump_lp.as_deref().map(|p| cfg.resolve(p))) {
        fov.buffer().to_debug_image().save(&dump)?;
    }
    let ctx = fov.context();
    print(&format!(
        "lp buffer {}x{}, valid_count {}\nwrote {}\n",
        ctx.lp_w(),
        ctx.lp_h(),
        fov.buffer().valid_count(),
        out.display()
    ))
}

fn load_scene(spec: &str, cfg: &Config) -> CliResult<SceneFile> {
    if let Some(n) = spec.strip_prefix("fixture:") {
        let lights: usize =
            n.parse().map_err(|_| Failure::Invalid(format!("fixture light count must be an integer, got {n:?}")))?;
        return Ok(raycast::fixture_scene(lights)?);
    }
    Ok(SceneFile::load(cfg.resolve(Path::new(spec)))?)
}

fn cmd_render(args: RenderArgs) -> CliResult {
    let cfg = Config::load(args.model.config.as_deref())?;
    let opts = args.model.options(&cfg);
    let spec = args
        .scene
        .or_else(|| cfg.scene.clone())
        .ok_or_else(|| Failure::Invalid("--scene is required (a JSON path or fixture:N)".into()))?;
    let file = load_scene(&spec, &cfg)?;
    let res = args.res;
    let cam = file.camera.build((res.width, res.height))?;

    let (img, stats) = match args.mode {
        ModeArg::Gt => raycast::render_gt(&file.scene, &cam)?,
        ModeArg::Vafr => {
            let model = load_model(&cfg, &opts)?;
            let gaze = args.gaze.map(|g| g.resolve(res)).or(cfg.gaze.map(|g| (g[0], g[1])));
            let ctx = build_context(model, cam.c_r(), (res.width, res.height), gaze, opts.delta.unwrap_or_default())?;
            let aa = args.aa.map(AaMode::from).or(cfg.aa_mode).unwrap_or_default();
            raycast::render_vafr(&file.scene, &cam, &ctx, aa)?
        }
    };
    let mode = match args.mode {
        ModeArg::Vafr => "vafr",
        ModeArg::Gt => "gt",
    };
    let out = args
        .out
        .or_else(|| cfg.out.as_deref().map(|p| cfg.resolve(p)))
        .unwrap_or_else(|| PathBuf::from(format!("render_{mode}.png")));
    img.save(&out)?;
    if let Some(path) = args.stats_out.or_else(|| cfg.stats_out.as_deref().map(|p| cfg.resolve(p))) {
        let json = serde_json::to_string_pretty(&stats).map_err(VafrError::from)?;
        write_text(&path, &(json + "\n"))?;
    }
    print(&format!(
        "{mode} {}: {} primary rays, {} shadow rays, {:.1} ms\nwrote {}\n",
        res,
        stats.primary_rays,
        stats.shadow_rays,
        stats.total_ms,
        out.display()
    ))
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult {
    let PresetSet::Paper = args.presets;
    let mut spec = SweepSpec::paper(args.e_step, args.gaze_sweep)?;
    if !args.res.is_empty() {
        spec.resolutions = args.res;
    }
    let rows = baselines::analyze(&spec)?;
    let csv = baselines::to_csv(&rows);
    match args.out {
        Some(path) => write_text(&path, &csv),
        None => print(&csv),
    }
}

fn group_thousands(n: u64) -> String {
    let s = n.to_string();
    let mut out = String::with_capacity(s.len() + s.len() / 3);
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn cmd_buffer_stats(args: StatsArgs) -> CliResult {
    let cfg = Config::load(args.model.config.as_deref())?;
    let opts = args.model.options(&cfg);
    let displays: Vec<(String, Resolution)> = if args.res.is_empty() {
        table_presets().iter().map(|p| (p.name.to_string(), p.resolution)).collect()
    } else {
        args.res
            .iter()
            .map(|r| {
                let name = PRESETS.iter().find(|p| p.resolution == *r).map_or_else(|| r.to_string(), |p| p.name.to_string());
                (name, *r)
            })
            .collect()
    };
    let model = load_model(&cfg, &opts)?;
    // valid_count depends only on the model and Δ; the display is nominal
    let first = displays[0].1;
    let ctx = build_context(model, 1.0 / f64::from(first.height), (first.width, first.height), None, opts.delta.unwrap_or_default())?;
    let layout = LpLayout::new(&ctx);
    let stats = layout_stats(&layout, &ctx);
    let rows = baselines::pixel_table(&ctx, &displays);

    if args.json {
        let json = serde_json::json!({
            "lp_width": stats.width,
            "lp_height": stats.height,
            "valid_count": stats.valid_count,
            "fill_ratio": stats.fill_ratio,
            "rows": rows,
        });
        let text = serde_json::to_string_pretty(&json).map_err(VafrError::from)?;
        return print(&(text + "\n"));
    }
    let mut out = format!(
        "LP buffer {}x{}, {} valid shading points ({:.1}% filled)\n\n",
        stats.width,
        stats.height,
        group_thousands(stats.valid_count),
        100.0 * stats.fill_ratio
    );
    let header = ["Quantity", "VaFR", "LaFR(2.2)", "LaFR(1.8)", "GT"];
    out.push_str(&format!("{:<10} {:>12} {:>12} {:>12} {:>12}\n", header[0], header[1], header[2], header[3], header[4]));
    for r in &rows {
        out.push_str(&format!(
            "{:<10} {:>12} {:>12} {:>12} {:>12}\n",
            r.name,
            group_thousands(r.vafr),
            group_thousands(r.lafr_2_2),
            group_thousands(r.lafr_1_8),
            group_thousands(r.gt)
        ));
    }
    print(&out)
}

fn cmd_adapt(args: AdaptArgs) -> CliResult {
    let opts = ModelOptions { acuity: args.acuity, device_cap: None, delta: None };
    let base = load_model(&Config::default(), &opts)?;
    let adapted = base.adapt_to_device(args.device_cap)?;
    let count = |m| -> CliResult<u64> {
        let ctx = build_context(m, 1e-3, (1000, 1000), None, DeltaSpec::default())?;
        Ok(LpLayout::new(&ctx).valid_count())
    };
    let before = count(base)?;
    let after = count(adapted.clone())?;
    let json = adapted.to_json() + "\n";
    match args.out {
        Some(path) => {
            write_text(&path, &json)?;
            print(&format!("wrote {}\n", path.display()))?;
        }
        None => print(&json)?,
    }
    eprintln!(
        "valid shading points {} -> {} ({:.1}% fewer)",
        group_thousands(before),
        group_thousands(after),
        100.0 * (before - after) as f64 / before as f64
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Invalid(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Foveate(a) => cmd_foveate(a),
        Command::Render(a) => cmd_render(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::BufferStats(a) => cmd_buffer_stats(a),
        Command::Adapt(a) => cmd_adapt(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vafr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
