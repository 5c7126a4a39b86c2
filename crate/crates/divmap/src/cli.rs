//! Command-line front end. `main` only parses arguments and maps errors to
//! exit codes; everything else lives here so tests can drive it in-process.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use divmap_core::{
    aggregate_profiles, build_basemap, distance_matrix, diversity_report, filter_orgs,
    gen_basemap_path, gen_profile, layout_fr, overlay, path_length_distribution, Basemap, Binning,
    Counting, Fill, Metric, NodeStyle, OverlayPolicy, RankTable, ReportOptions, ResearchProfile,
    SynthSpec, DEFAULT_THRESHOLD,
};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::export::{save_map, MapFormat};
use crate::formats::{
    load_basemap, load_citation_matrix, load_profiles, load_records, load_scores, save_basemap,
    save_with, variant_pairs, write_distance_matrix, write_histogram, write_profiles,
    write_rank_table, write_report, write_scores, GraphFormat,
};

#[derive(Debug, Parser)]
#[command(
    name = "divmap",
    version,
    about = "Diversity and polarization of research portfolios"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a basemap from a citation matrix or import an existing one.
    #[command(subcommand)]
    Basemap(BasemapCommand),
    /// Score organizations, rank them and compare the rankings.
    Analyze(AnalyzeArgs),
    /// Lay out the basemap and export one competence map per organization.
    Map(MapArgs),
    /// Distribution of shortest path lengths over all SC pairs.
    Pathstats(PathstatsArgs),
    /// Generate synthetic portfolios on a path basemap.
    Synth(SynthArgs),
}

#[derive(Debug, Subcommand)]
pub enum BasemapCommand {
    Build(BuildArgs),
    Import(ImportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountingArg {
    Full,
    Fractional,
}

impl From<CountingArg> for Counting {
    fn from(c: CountingArg) -> Self {
        match c {
            CountingArg::Full => Counting::Full,
            CountingArg::Fractional => Counting::Fractional,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Error,
    DropRenormalize,
    DropKeep,
}

impl From<PolicyArg> for OverlayPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Error => OverlayPolicy::Error,
            PolicyArg::DropRenormalize => OverlayPolicy::DropRenormalize,
            PolicyArg::DropKeep => OverlayPolicy::DropKeep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Polarized,
    Spread,
    Concentrated,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Square citation-count CSV.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Keep edges with similarity at or above this value.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Ignore self-citations.
    #[arg(long)]
    pub zero_diagonal: bool,
    #[arg(long, default_value = "csv")]
    pub format: GraphFormat,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    /// Edge-list CSV or GraphML basemap.
    #[arg(long)]
    pub input: PathBuf,
    /// Format of the input; guessed from the extension by default.
    #[arg(long)]
    pub input_format: Option<GraphFormat>,
    /// Drop edges below this similarity after loading.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value = "csv")]
    pub format: GraphFormat,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProfileInput {
    /// Paper records `org_id,paper_id,subject_categories`.
    #[arg(long, group = "source")]
    pub records: Option<PathBuf>,
    /// Pre-aggregated counts `org_id,subject_category,count`.
    #[arg(long, group = "source")]
    pub profiles: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CountingArg::Full)]
    pub counting: CountingArg,
    /// Keep organizations with at least this many distinct papers.
    #[arg(long)]
    pub min_papers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: ProfileInput,
    /// Precomputed `org_id,div_<variant>,...` scores; skips scoring.
    #[arg(long, group = "source")]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub basemap: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PolicyArg::DropRenormalize)]
    pub policy: PolicyArg,
    #[arg(long, value_delimiter = ',', default_values_t = Metric::ALL)]
    pub variants: Vec<Metric>,
    /// Distance for SC pairs without a connecting path (default: the
    /// largest finite distance).
    #[arg(long)]
    pub disconnected: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub input: ProfileInput,
    #[arg(long)]
    pub basemap: PathBuf,
    #[arg(long, value_enum, default_value_t = PolicyArg::DropRenormalize)]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [MapFormat::Svg, MapFormat::Csv])]
    pub formats: Vec<MapFormat>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PathstatsArgs {
    #[arg(long)]
    pub basemap: PathBuf,
    #[arg(long, default_value_t = Metric::Path)]
    pub variant: Metric,
    /// Bin width for real-valued distances; hop counts use integer bins.
    #[arg(long, default_value_t = 0.05)]
    pub bin_width: f64,
    /// Also write the full distance matrix.
    #[arg(long)]
    pub export_distances: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Path basemap size; ignored with `--basemap`.
    #[arg(long, default_value_t = 5)]
    pub nodes: usize,
    /// Cosine distance of every path edge.
    #[arg(long, default_value_t = 0.15)]
    pub edge_w: f64,
    /// Place portfolios on this basemap instead of a generated path.
    #[arg(long)]
    pub basemap: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [KindArg::Polarized, KindArg::Spread])]
    pub kinds: Vec<KindArg>,
    #[arg(long, default_value_t = 2)]
    pub poles: usize,
    /// Active SCs of a spread portfolio.
    #[arg(long, default_value_t = 3)]
    pub n_active: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Standard output and error streams of a run.
pub struct Console<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

macro_rules! say {
    ($w:expr, $($arg:tt)*) => {
        // console output is best effort
        let _ = writeln!($w, $($arg)*);
    };
}

pub fn run(cli: &Cli, console: &mut Console<'_>) -> Result<()> {
    match &cli.command {
        Command::Basemap(BasemapCommand::Build(a)) => cmd_basemap_build(a, console),
        Command::Basemap(BasemapCommand::Import(a)) => cmd_basemap_import(a, console),
        Command::Analyze(a) => cmd_analyze(a, console),
        Command::Map(a) => cmd_map(a, console),
        Command::Pathstats(a) => cmd_pathstats(a, console),
        Command::Synth(a) => cmd_synth(a, console),
    }
}

fn basemap_file(format: GraphFormat) -> &'static str {
    match format {
        GraphFormat::Csv => "basemap.csv",
        GraphFormat::Graphml => "basemap.graphml",
    }
}

fn summarize(bm: &Basemap, out: &mut dyn Write) {
    let degrees: Vec<usize> = (0..bm.node_count()).map(|i| bm.degree(i)).collect();
    let labels = bm.components();
    let mut distinct = labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    say!(out, "nodes: {}", bm.node_count());
    say!(out, "edges: {}", bm.edge_count());
    if !degrees.is_empty() {
        let mean = degrees.iter().sum::<usize>() as f64 / degrees.len() as f64;
        say!(
            out,
            "degree: min {} max {} mean {:.3}",
            degrees.iter().min().unwrap_or(&0),
            degrees.iter().max().unwrap_or(&0),
            mean
        );
    }
    say!(
        out,
        "isolated: {}",
        degrees.iter().filter(|&&d| d == 0).count()
    );
    say!(out, "components: {}", distinct.len());
}

pub fn cmd_basemap_build(a: &BuildArgs, c: &mut Console<'_>) -> Result<()> {
    let mut cm = load_citation_matrix(&a.matrix)?;
    if a.zero_diagonal {
        cm.zero_diagonal();
    }
    let bm = build_basemap(&cm, a.threshold)?;
    save_basemap(&bm, &a.out_dir.join(basemap_file(a.format)), a.format)?;
    summarize(&bm, c.out);
    say!(c.out, "threshold: {}", a.threshold);
    RunConfig::new(&["basemap", "build"], &a.out_dir)
        .input("matrix", &a.matrix)
        .set("threshold", a.threshold)
        .set("format", a.format)
        .switch("zero-diagonal", a.zero_diagonal)
        .write()?;
    Ok(())
}

fn read_basemap(path: &Path) -> Result<Basemap> {
    load_basemap(path, GraphFormat::from_path(path), None)
}

pub fn cmd_basemap_import(a: &ImportArgs, c: &mut Console<'_>) -> Result<()> {
    let input_format = a
        .input_format
        .unwrap_or_else(|| GraphFormat::from_path(&a.input));
    let mut bm = load_basemap(&a.input, input_format, None)?;
    if let Some(t) = a.threshold {
        bm = bm.with_threshold(t)?;
    }
    save_basemap(&bm, &a.out_dir.join(basemap_file(a.format)), a.format)?;
    summarize(&bm, c.out);
    let mut config = RunConfig::new(&["basemap", "import"], &a.out_dir);
    config
        .input("input", &a.input)
        .set("input-format", input_format)
        .set("format", a.format);
    if let Some(t) = a.threshold {
        config.set("threshold", t);
    }
    config.write()?;
    Ok(())
}

/// Loads, aggregates and filters profiles, recording the choices in
/// `config`.
fn load_input(
    input: &ProfileInput,
    config: &mut RunConfig,
    c: &mut Console<'_>,
) -> Result<Vec<ResearchProfile>> {
    let profiles = match (&input.records, &input.profiles) {
        (Some(path), _) => {
            config
                .input("records", path)
                .set("counting", value_name(&input.counting));
            aggregate_profiles(&load_records(path)?, input.counting.into())?
        }
        (None, Some(path)) => {
            config.input("profiles", path);
            load_profiles(path)?
        }
        (None, None) => {
            return Err(Error::Usage(
                "one of --records or --profiles is required".into(),
            ))
        }
    };
    let Some(min) = input.min_papers else {
        return Ok(profiles);
    };
    config.set("min-papers", min);
    let outcome = filter_orgs(profiles, min)?;
    say!(
        c.out,
        "organizations: {} of {} retained at {} papers",
        outcome.retained.len(),
        outcome.total,
        min
    );
    if outcome.unknown > 0 {
        say!(
            c.err,
            "warning: paper counts unknown for {} pre-aggregated organizations; kept unfiltered",
            outcome.unknown
        );
    }
    if outcome.retained.is_empty() {
        return Err(Error::Usage(format!(
            "no organization has at least {min} papers"
        )));
    }
    Ok(outcome.retained)
}

fn fill_of(disconnected: Option<f64>) -> Fill {
    disconnected.map_or(Fill::Diameter, Fill::Value)
}

fn variants_setting(variants: &[Metric]) -> String {
    variants
        .iter()
        .map(|m| m.label())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn cmd_analyze(a: &AnalyzeArgs, c: &mut Console<'_>) -> Result<()> {
    if a.variants.is_empty() {
        return Err(Error::Usage("at least one variant is required".into()));
    }
    let mut config = RunConfig::new(&["analyze"], &a.out_dir);
    config.set("variants", variants_setting(&a.variants));
    let report_path = a.out_dir.join("report.csv");
    let mut failed = 0;

    let table = if let Some(scores) = &a.scores {
        config.input("scores", scores);
        let all = load_scores(scores)?;
        let columns: Vec<(Metric, Vec<f64>)> = all
            .columns()
            .iter()
            .filter(|col| a.variants.contains(&col.metric))
            .map(|col| (col.metric, col.scores.clone()))
            .collect();
        if columns.is_empty() {
            return Err(Error::Usage(format!(
                "{} has none of the requested variants",
                scores.display()
            )));
        }
        let rt = RankTable::new(all.orgs().to_vec(), columns)?;
        save_with(&report_path, |w| write_scores(&rt, w))?;
        Some(rt)
    } else {
        let basemap = a
            .basemap
            .as_ref()
            .ok_or_else(|| Error::Usage("--basemap is required unless --scores is given".into()))?;
        config
            .input("basemap", basemap)
            .set("policy", value_name(&a.policy));
        if let Some(v) = a.disconnected {
            config.set("disconnected", v);
        }
        let profiles = load_input(&a.input, &mut config, c)?;
        let bm = read_basemap(basemap)?;
        let options = ReportOptions {
            policy: a.policy.into(),
            fill: fill_of(a.disconnected),
        };
        let report = diversity_report(&profiles, &bm, &a.variants, options)?;
        for row in &report.rows {
            if let Some(e) = &row.error {
                failed += 1;
                say!(c.err, "error: {}: {e}", row.org_id);
            } else if !row.unmapped.is_empty() {
                say!(
                    c.err,
                    "warning: {}: SCs not on the basemap dropped: {}",
                    row.org_id,
                    row.unmapped.join(", ")
                );
            }
            for (m, v) in report.metrics.iter().zip(&row.values) {
                let bound = if *m == Metric::Cosine {
                    1.0
                } else {
                    f64::INFINITY
                };
                if !(v.is_finite() && *v >= 0.0 && *v <= bound) {
                    return Err(Error::Invariant(format!(
                        "{} scored {v} under {m}",
                        row.org_id
                    )));
                }
            }
        }
        save_with(&report_path, |w| write_report(&report, w))?;
        (failed < report.rows.len())
            .then(|| RankTable::from_report(&report))
            .transpose()?
    };

    if let Some(rt) = &table {
        save_with(&a.out_dir.join("ranks.csv"), |w| write_rank_table(rt, w))?;
        let summary = comparison(rt);
        for line in &summary {
            say!(c.out, "{line}");
        }
        let path = a.out_dir.join("comparison.txt");
        save_with(&path, |mut w| {
            for line in &summary {
                writeln!(w, "{line}").map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
            }
            w.flush().map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })
        })?;
    }
    config.write()?;
    if failed > 0 {
        return Err(Error::Usage(format!(
            "{failed} organization(s) could not be scored"
        )));
    }
    Ok(())
}

/// Rank correlation for every variant pair; with exactly two organizations,
/// also the ratio of their scores per variant.
pub fn comparison(rt: &RankTable) -> Vec<String> {
    let n = rt.orgs().len();
    let mut lines = vec![format!("organizations: {n}")];
    if n < 2 {
        lines.push("rank comparison needs at least 2 organizations".into());
        return lines;
    }
    for (a, b) in variant_pairs(rt) {
        match rt.spearman(a, b) {
            Ok(r) => lines.push(format!("spearman {a} {b}: {r:.4}")),
            Err(e) => lines.push(format!("spearman {a} {b}: undefined ({e})")),
        }
    }
    if n == 2 {
        let (first, second) = (&rt.orgs()[0], &rt.orgs()[1]);
        for col in rt.columns() {
            let ratio = col.scores[0] / col.scores[1];
            lines.push(format!("ratio {first}/{second} {}: {ratio:.4}", col.metric));
        }
    }
    lines
}

/// File stem for an organization; anything but `[A-Za-z0-9._-]` becomes `_`.
pub fn file_stem(org: &str) -> String {
    let stem: String = org
        .chars()
        .map(|ch| {
            if ch.is_ascii_alphanumeric() || "._-".contains(ch) {
                ch
            } else {
                '_'
            }
        })
        .collect();
    if stem.is_empty() || stem.starts_with('.') {
        format!("org_{stem}")
    } else {
        stem
    }
}

pub fn cmd_map(a: &MapArgs, c: &mut Console<'_>) -> Result<()> {
    if a.formats.is_empty() {
        return Err(Error::Usage("at least one format is required".into()));
    }
    let mut config = RunConfig::new(&["map"], &a.out_dir);
    config
        .input("basemap", &a.basemap)
        .set("policy", value_name(&a.policy))
        .set("seed", a.seed)
        .set("iterations", a.iterations)
        .set(
            "formats",
            a.formats
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    let profiles = load_input(&a.input, &mut config, c)?;
    let bm = read_basemap(&a.basemap)?;
    let coords = layout_fr(&bm, a.seed, a.iterations)?;
    let style = NodeStyle::default();

    let mut stems: Vec<String> = Vec::new();
    for p in &profiles {
        let stem = file_stem(p.org_id());
        if stems.contains(&stem) {
            return Err(Error::Usage(format!(
                "organization ids collide on file name `{stem}`"
            )));
        }
        stems.push(stem);
    }
    let mut written = 0;
    for (p, stem) in profiles.iter().zip(&stems) {
        let cm = overlay(p, &bm, a.policy.into())?;
        if !cm.unmapped().is_empty() {
            let names: Vec<&str> = cm.unmapped().keys().map(String::as_str).collect();
            say!(
                c.err,
                "warning: {}: SCs not on the basemap: {}",
                p.org_id(),
                names.join(", ")
            );
        }
        for &format in &a.formats {
            let path = a.out_dir.join(format!("{stem}.{}", format.extension()));
            save_map(&cm, &coords, &style, format, &path)?;
            written += 1;
        }
    }
    say!(c.out, "maps written: {written}");
    config.write()?;
    Ok(())
}

pub fn cmd_pathstats(a: &PathstatsArgs, c: &mut Console<'_>) -> Result<()> {
    let bm = read_basemap(&a.basemap)?;
    let dm = distance_matrix(&bm, a.variant, Fill::Diameter)?;
    let binning = match a.variant {
        Metric::Path => Binning::Integer,
        _ => Binning::Width(a.bin_width),
    };
    let hist = path_length_distribution(&dm, binning)?;
    let name = format!("pathstats_{}.csv", a.variant);
    save_with(&a.out_dir.join(&name), |w| write_histogram(&hist, w))?;
    if a.export_distances {
        save_with(
            &a.out_dir.join(format!("distances_{}.csv", a.variant)),
            |w| write_distance_matrix(&dm, w),
        )?;
    }
    for b in &hist.bins {
        say!(c.out, "{}\t{}", b.start, b.count);
    }
    say!(c.out, "unreachable pairs: {}", hist.unreachable);
    let mut config = RunConfig::new(&["pathstats"], &a.out_dir);
    config
        .input("basemap", &a.basemap)
        .set("variant", a.variant)
        .set("bin-width", a.bin_width)
        .switch("export-distances", a.export_distances);
    config.write()?;
    Ok(())
}

pub fn cmd_synth(a: &SynthArgs, c: &mut Console<'_>) -> Result<()> {
    let mut config = RunConfig::new(&["synth"], &a.out_dir);
    let bm = match &a.basemap {
        Some(path) => {
            config.input("basemap", path);
            read_basemap(path)?
        }
        None => {
            config.set("nodes", a.nodes).set("edge-w", a.edge_w);
            let bm = gen_basemap_path(a.nodes, a.edge_w)?;
            save_basemap(&bm, &a.out_dir.join("basemap.csv"), GraphFormat::Csv)?;
            bm
        }
    };
    let kinds = &a.kinds;
    config
        .set(
            "kinds",
            kinds.iter().map(value_name).collect::<Vec<_>>().join(","),
        )
        .set("poles", a.poles)
        .set("n-active", a.n_active)
        .set("seed", a.seed);

    let mut profiles = Vec::new();
    for kind in kinds {
        let spec = match kind {
            KindArg::Polarized => SynthSpec::polarized(a.poles, a.seed),
            KindArg::Spread => SynthSpec::spread(a.n_active, a.seed),
            KindArg::Concentrated => SynthSpec::concentrated(a.seed),
        };
        let org = value_name(kind);
        let p = gen_profile(&spec, &bm, &org)?;
        let active: Vec<&str> = p.shares().keys().map(String::as_str).collect();
        say!(c.out, "{org}: {}", active.join(" "));
        profiles.push(p);
    }
    profiles.sort_by(|x, y| x.org_id().cmp(y.org_id()));
    if profiles.windows(2).any(|w| w[0].org_id() == w[1].org_id()) {
        return Err(Error::Usage(
            "each portfolio kind may be requested once".into(),
        ));
    }
    save_with(&a.out_dir.join("profiles.csv"), |w| {
        write_profiles(&profiles, w)
    })?;
    config.write()?;
    Ok(())
}
