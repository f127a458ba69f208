//! `deckctl`: offline deck validation, conflict reports, jargon checks,
//! repository commands and the service launcher.
//!
//! Exit codes: 0 success, 1 domain violation, 2 malformed input,
//! 3 provider failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::constraints::{compute_conflicts, compute_timeline, ratio_to_f64, ConflictLevel, ConflictReport};
use crate::deck::{deserialize, serialize, validate_deck, Deck, DeckError, EntryId, Presentation, SlideId};
use crate::jargon::{
    detect_jargon, expand_audience_context, HideState, JargonError, JargonProvider, LlmProvider,
    MockProvider,
};
use crate::repository::{
    FileStore, Granularity, ImportTarget, Imported, RepoError, Repository, SaveValue,
};
use crate::service::{ServiceConfig, StartupError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_PROVIDER: i32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Human,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "deckctl", version, about = "Deck authoring tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a deck file against the schema and model invariants.
    Validate { deck: PathBuf },
    /// Print the emphasis/time conflict report.
    Conflicts {
        deck: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: ReportFormat,
    },
    /// Check one slide for jargon.
    Jargon {
        deck: PathBuf,
        #[arg(long)]
        slide: String,
        /// Lexicon JSON for the offline provider.
        #[arg(long, conflicts_with = "live")]
        mock_lexicon: Option<PathBuf>,
        /// Use the configured language-model provider (JARGON_* variables).
        #[arg(long)]
        live: bool,
        /// One-line description of the talk passed to the provider.
        #[arg(long)]
        context: Option<String>,
    },
    /// Slide repository commands.
    Repo {
        #[arg(long, env = "STORE_DIR")]
        store: PathBuf,
        #[command(subcommand)]
        action: RepoAction,
    },
    /// Run the authoring service until interrupted.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        bind: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum RepoAction {
    /// Save a presentation, section or slide from a deck file.
    Save {
        deck: PathBuf,
        #[arg(long, value_enum, default_value = "presentation")]
        granularity: GranularityArg,
        /// Section or slide id (required unless saving the whole presentation).
        #[arg(long)]
        id: Option<String>,
        /// Rewrite the deck file so its slides point at the saved lineages.
        #[arg(long)]
        write_back: bool,
    },
    /// Import an entry: a presentation as a new deck, or a section into `--into`.
    Import {
        entry_id: String,
        #[arg(long)]
        into: Option<PathBuf>,
        #[arg(long)]
        position: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ranked keyword search.
    Search {
        query: String,
        #[arg(long, value_enum)]
        granularity: Option<GranularityArg>,
        #[arg(long, value_enum, default_value_t)]
        format: ReportFormat,
    },
    /// List saved entries.
    List,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GranularityArg {
    Presentation,
    Section,
    Slide,
}

impl From<GranularityArg> for Granularity {
    fn from(g: GranularityArg) -> Self {
        match g {
            GranularityArg::Presentation => Granularity::Presentation,
            GranularityArg::Section => Granularity::Section,
            GranularityArg::Slide => Granularity::Slide,
        }
    }
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<DeckError> for Failure {
    fn from(e: DeckError) -> Self {
        let code = match e {
            DeckError::MalformedDocument(_) | DeckError::UnsupportedSchemaVersion(_) => EXIT_MALFORMED,
            _ => EXIT_VIOLATION,
        };
        Self::new(code, e.to_string())
    }
}

impl From<RepoError> for Failure {
    fn from(e: RepoError) -> Self {
        match e {
            RepoError::Deck(d) => d.into(),
            other => Self::new(EXIT_VIOLATION, other.to_string()),
        }
    }
}

impl From<JargonError> for Failure {
    fn from(e: JargonError) -> Self {
        let code = match e {
            JargonError::Provider(_) => EXIT_PROVIDER,
            JargonError::DuplicateLexiconTerm(_) | JargonError::InvalidLexicon(_) => EXIT_MALFORMED,
            JargonError::InvalidAudience | JargonError::EmptySlide => EXIT_VIOLATION,
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new(EXIT_VIOLATION, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Validate { deck } => validate(&deck, out),
        Command::Conflicts { deck, format } => conflicts(&deck, format, out),
        Command::Jargon {
            deck,
            slide,
            mock_lexicon,
            live,
            context,
        } => jargon(&deck, &slide, mock_lexicon.as_deref(), live, context.as_deref(), out),
        Command::Repo { store, action } => repo(&store, action, out),
        Command::Serve { config, store, bind } => serve(config.as_deref(), store, bind, out),
    }
}

fn read_deck(path: &Path) -> Result<Deck, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::new(EXIT_MALFORMED, format!("{}: {e}", path.display())))?;
    Ok(deserialize(&bytes)?)
}

/// Reads a deck and insists it is valid.
fn read_valid_deck(path: &Path) -> Result<Deck, Failure> {
    let deck = read_deck(path)?;
    let violations = validate_deck(&deck);
    match violations.first() {
        None => Ok(deck),
        Some(first) => Err(Failure::new(
            EXIT_VIOLATION,
            format!("{} violation(s), first: {first}", violations.len()),
        )),
    }
}

fn validate(path: &Path, out: &mut dyn Write) -> CmdResult {
    let deck = read_deck(path)?;
    let violations = validate_deck(&deck);
    if violations.is_empty() {
        writeln!(out, "ok")?;
        return Ok(());
    }
    for v in &violations {
        writeln!(out, "{v}")?;
    }
    Err(Failure::new(
        EXIT_VIOLATION,
        format!("{} violation(s)", violations.len()),
    ))
}

fn format_level(level: ConflictLevel) -> String {
    match level {
        ConflictLevel::NoConflict => "none".into(),
        other => other.as_str().to_uppercase(),
    }
}

/// One line per section: `Title: LEVEL (r=0.50)  0s-240s`, with the ratio of
/// the most severe pair and ` OVERFLOW` appended past the time budget.
pub fn human_report(p: &Presentation, report: &ConflictReport) -> String {
    let mut s = String::new();
    for (entry, section) in compute_timeline(p).iter().zip(&p.sections) {
        let c = report.section(&section.id).expect("report covers every section");
        s.push_str(&format!("{}: {}", section.title, format_level(c.conflict_level)));
        if c.conflict_level != ConflictLevel::NoConflict {
            if let Some(worst) = c.pairs.iter().map(|pair| pair.ratio).min() {
                s.push_str(&format!(" (r={:.2})", ratio_to_f64(&worst)));
            }
        }
        s.push_str(&format!("  {}s-{}s", entry.start_s, entry.end_s));
        if c.overflow {
            s.push_str(" OVERFLOW");
        }
        s.push('\n');
    }
    s.push_str(&format!(
        "total: {}s of {}s\n",
        report.sum_duration_s, report.total_duration_s
    ));
    s
}

fn conflicts(path: &Path, format: ReportFormat, out: &mut dyn Write) -> CmdResult {
    let deck = read_valid_deck(path)?;
    let report = compute_conflicts(&deck.presentation);
    match format {
        ReportFormat::Json => write!(out, "{}", report.to_json())?,
        ReportFormat::Human => write!(out, "{}", human_report(&deck.presentation, &report))?,
    }
    Ok(())
}

fn runtime() -> Result<tokio::runtime::Runtime, Failure> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::new(EXIT_VIOLATION, e.to_string()))
}

fn jargon(
    path: &Path,
    slide_id: &str,
    mock_lexicon: Option<&Path>,
    live: bool,
    context: Option<&str>,
    out: &mut dyn Write,
) -> CmdResult {
    let deck = read_valid_deck(path)?;
    let p = &deck.presentation;
    let slide = p
        .slide(&SlideId::from(slide_id))
        .ok_or_else(|| Failure::new(EXIT_VIOLATION, format!("unknown slide `{slide_id}`")))?;
    let provider: Arc<dyn JargonProvider> = if live {
        Arc::new(LlmProvider::from_env()?)
    } else if let Some(lex) = mock_lexicon {
        let bytes = std::fs::read(lex)
            .map_err(|e| Failure::new(EXIT_MALFORMED, format!("{}: {e}", lex.display())))?;
        Arc::new(MockProvider::from_json(&bytes)?)
    } else {
        Arc::new(MockProvider::bundled())
    };
    let pc = context.or(p.topic.as_deref());
    let terms = runtime()?.block_on(async {
        let ctx = expand_audience_context(provider.as_ref(), &p.audience, pc).await?;
        detect_jargon(provider.as_ref(), slide, &ctx, &HideState::default(), pc).await
    })?;
    let json = serde_json::to_string_pretty(&terms).expect("terms serialize");
    writeln!(out, "{json}")?;
    Ok(())
}

fn write_output(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => out.write_all(bytes)?,
    }
    Ok(())
}

fn repo(store: &Path, action: RepoAction, out: &mut dyn Write) -> CmdResult {
    let repo = Repository::open(FileStore::open(store)?)?;
    match action {
        RepoAction::Save {
            deck: path,
            granularity,
            id,
            write_back,
        } => {
            let deck = read_valid_deck(&path)?;
            let p = &deck.presentation;
            let need_id = || {
                id.clone()
                    .ok_or_else(|| Failure::new(EXIT_MALFORMED, "--id is required for this granularity"))
            };
            let value = match granularity {
                GranularityArg::Presentation => SaveValue::Presentation(p.clone()),
                GranularityArg::Section => {
                    let sid = need_id()?.into();
                    let s = p.section(&sid).ok_or(DeckError::UnknownSection(sid))?;
                    SaveValue::Section(s.clone())
                }
                GranularityArg::Slide => {
                    let sid = need_id()?.into();
                    let s = p.slide(&sid).ok_or(DeckError::UnknownSlide(sid))?;
                    SaveValue::Slide(s.clone())
                }
            };
            let entry = repo.save(value, Some(p.id.clone()))?;
            if write_back {
                let mut next = p.clone();
                for saved in entry.payload.slides() {
                    if let Some((si, pi)) = next.slide_position(&saved.id) {
                        next.sections[si].slides[pi].lineage_ref = saved.lineage_ref.clone();
                    }
                }
                std::fs::write(&path, serialize(&Deck::new(next)))?;
            }
            writeln!(out, "{}", entry.entry_id)?;
        }
        RepoAction::Import {
            entry_id,
            into,
            position,
            out: out_path,
        } => {
            let entry_id = EntryId::from(entry_id);
            let imported = match &into {
                None => repo.import(&entry_id, ImportTarget::Workspace)?,
                Some(target) => {
                    let deck = read_valid_deck(target)?;
                    let position = position.unwrap_or(deck.presentation.sections.len());
                    repo.import(
                        &entry_id,
                        ImportTarget::Into {
                            presentation: &deck.presentation,
                            position,
                        },
                    )?
                }
            };
            let p = match imported {
                Imported::Presentation(p) => p,
                Imported::Section { presentation, .. } => presentation,
            };
            write_output(out_path.as_deref(), &serialize(&Deck::new(p)), out)?;
        }
        RepoAction::Search {
            query,
            granularity,
            format,
        } => {
            let hits = repo.search(&query, granularity.map(Into::into))?;
            match format {
                ReportFormat::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&hits).expect("hits serialize")
                )?,
                ReportFormat::Human => {
                    for h in &hits {
                        let target = match &h.target {
                            crate::repository::HitTarget::Entry { entry_id } => entry_id.to_string(),
                            crate::repository::HitTarget::SlideVersion {
                                lineage_id,
                                version_index,
                            } => format!("{lineage_id}@{version_index}"),
                        };
                        writeln!(
                            out,
                            "{:>3}  {:<12} {}  [{}]",
                            h.score,
                            h.granularity.as_str(),
                            h.title,
                            target
                        )?;
                    }
                }
            }
        }
        RepoAction::List => {
            for e in repo.entries() {
                writeln!(
                    out,
                    "{}  {:<12} {}  {}",
                    e.entry_id,
                    e.granularity().as_str(),
                    e.payload.title(),
                    e.saved_at.to_rfc3339()
                )?;
            }
        }
    }
    Ok(())
}

fn serve(
    config: Option<&Path>,
    store: Option<PathBuf>,
    bind: Option<String>,
    out: &mut dyn Write,
) -> CmdResult {
    let startup = |e: StartupError| {
        let code = match e {
            StartupError::Config(_) => EXIT_MALFORMED,
            StartupError::Provider(JargonError::Provider(_)) => EXIT_PROVIDER,
            _ => EXIT_VIOLATION,
        };
        Failure::new(code, e.to_string())
    };
    let mut cfg = match config {
        Some(path) => ServiceConfig::from_file(path).map_err(startup)?,
        None => ServiceConfig::default(),
    }
    .with_process_env();
    if let Some(s) = store {
        cfg.store_dir = Some(s);
    }
    if let Some(b) = bind {
        cfg.bind_addr = b;
    }
    let rt = runtime()?;
    rt.block_on(async {
        let running = crate::service::start(&cfg).await.map_err(startup)?;
        writeln!(out, "listening on {}", running.url())?;
        out.flush()?;
        tokio::signal::ctrl_c().await?;
        running.shutdown().await?;
        Ok(())
    })
}
