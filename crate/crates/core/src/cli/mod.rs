//! Command-line front end: reads input documents, runs a pipeline per
//! document and renders a report.

pub mod document;
pub mod fixtures;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cechgysin::{self, PushforwardSpec, SimplicialGysin};
use crate::corner;
use crate::filt::{self, SpectralSequence};
use crate::simp::{self, GoodCompData};
use crate::torus::{graded_matrix, AlgebraElement, TorusAlgebra, TorusHom};
use crate::gf2::BitMatrix;
use crate::weight;

use document::{Bundle, Document, GoodCompDoc, InputError, ResolvedSquare, TorusQueryDoc};
use report::{Check, PagesSection, Report, SubjectReport, TableSection};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Structured,
}

#[derive(Parser, Debug)]
#[command(name = "z2weight", version, about = "Weight filtration on Z/2 homology of real algebraic varieties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    /// Barycentric subdivisions allowed to reach normal crossings.
    #[arg(long, global = true, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub subdivide: u8,
    /// Include spectral sequence pages in weight, corner and assemble reports.
    #[arg(long, global = true)]
    pub emit_pages: bool,
    /// Second input whose weight table is compared with the first.
    #[arg(long, global = true)]
    pub compare: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simplicial manifold and normal crossing checks.
    Validate { input: String },
    /// Corner compactification and its filtration.
    Corner { input: String },
    /// Weight table of each good compactification.
    Weight { input: String },
    /// Pages of the corner spectral sequence.
    Pages { input: String },
    /// Gysin complex of the divisor.
    Gysin { input: String },
    /// Čech complexes and the cellular pullback.
    Cech { input: String },
    /// Annihilator duality with Borel–Moore weights.
    Duality { input: String },
    /// Weight complex of each hyperresolution.
    Assemble { input: String },
    /// Checks on blowup squares.
    BlowupCheck { input: String },
    /// Weight tables of two compactifications agree.
    Independence { input: String },
    /// Group algebra queries, one per line.
    Torus { input: String },
    /// Writes corpus documents.
    Fixtures {
        /// A corpus name or `all`.
        name: String,
        /// Output directory; prints to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Corner { .. } => "corner",
            Command::Weight { .. } => "weight",
            Command::Pages { .. } => "pages",
            Command::Gysin { .. } => "gysin",
            Command::Cech { .. } => "cech",
            Command::Duality { .. } => "duality",
            Command::Assemble { .. } => "assemble",
            Command::BlowupCheck { .. } => "blowup-check",
            Command::Independence { .. } => "independence",
            Command::Torus { .. } => "torus",
            Command::Fixtures { .. } => "fixtures",
        }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Parses `args`, runs, prints and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            if report.passed() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("invalid input: {e}");
            EXIT_INVALID
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Report, InputError> {
    let command = cli.command.name().to_string();
    let subjects = match &cli.command {
        Command::Fixtures { name, out } => vec![write_fixtures(name, out.as_ref())?],
        Command::Torus { input } => torus_command(input)?,
        Command::Independence { input } => vec![independence_command(cli, input)?],
        Command::Validate { input } => {
            let bundle = Bundle::read(input)?;
            let docs: Vec<&Document> = bundle.documents.iter().collect();
            parallel(&docs, |d| validate_document(&bundle, d, cli.subdivide as usize))?
        }
        Command::Assemble { input } => {
            let bundle = Bundle::read(input)?;
            let docs: Vec<_> = bundle
                .documents
                .iter()
                .filter_map(|d| if let Document::Hyperresolution(h) = d { Some(h) } else { None })
                .collect();
            if docs.is_empty() {
                return Err(InputError::Field { location: input.clone(), message: "no hyperresolution documents".into() });
            }
            parallel(&docs, |h| assemble_subject(cli, &h.name, &h.to_input(&bundle)?))?
        }
        Command::BlowupCheck { input } => {
            let bundle = Bundle::read(input)?;
            let docs: Vec<_> = bundle
                .documents
                .iter()
                .filter_map(|d| if let Document::BlowupSquare(b) = d { Some(b) } else { None })
                .collect();
            if docs.is_empty() {
                return Err(InputError::Field { location: input.clone(), message: "no blowup_square documents".into() });
            }
            parallel(&docs, |b| blowup_subject(&b.name, b.resolve(&bundle)?))?
        }
        Command::Corner { input }
        | Command::Weight { input }
        | Command::Pages { input }
        | Command::Gysin { input }
        | Command::Cech { input }
        | Command::Duality { input } => {
            let bundle = Bundle::read(input)?;
            let docs = compactifications(&bundle)?;
            let compare = match &cli.compare {
                Some(path) => Some(prepared(first_compactification(&Bundle::read(path)?, path)?, cli.subdivide as usize)?),
                None => None,
            };
            parallel(&docs, |d| {
                let g = prepared(d, cli.subdivide as usize)?;
                smooth_subject(cli, &g, compare.as_ref())
            })?
        }
    };
    Ok(Report { command, subjects })
}

/// One worker per item; results keep input order.
fn parallel<T: Sync, F>(items: &[T], f: F) -> Result<Vec<SubjectReport>, InputError>
where
    F: Fn(&T) -> Result<SubjectReport, InputError> + Sync,
{
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.iter().map(|item| scope.spawn(|| f(item))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn compactifications(bundle: &Bundle) -> Result<Vec<&GoodCompDoc>, InputError> {
    let docs: Vec<_> = bundle.compactifications().collect();
    if docs.is_empty() {
        return Err(InputError::Field { location: "input".into(), message: "no good_compactification documents".into() });
    }
    Ok(docs)
}

fn first_compactification<'a>(bundle: &'a Bundle, path: &str) -> Result<&'a GoodCompDoc, InputError> {
    bundle
        .compactifications()
        .next()
        .ok_or_else(|| InputError::Field { location: path.into(), message: "no good_compactification documents".into() })
}

/// Converts, validates and subdivides until normal crossings hold.
fn prepared(d: &GoodCompDoc, subdivide: usize) -> Result<GoodCompData, InputError> {
    let g = d.to_data()?;
    let named = |e: simp::SimpError| InputError::Field { location: d.name.clone(), message: e.to_string() };
    let g = simp::prepare(&g, subdivide).map_err(named)?;
    Ok(g)
}

/// Compactifications get manifold and normal crossing checks; other kinds
/// must resolve their references and shapes.
fn validate_document(bundle: &Bundle, d: &Document, subdivide: usize) -> Result<SubjectReport, InputError> {
    match d {
        Document::GoodCompactification(g) => validate_subject(g, subdivide),
        Document::Hyperresolution(h) => {
            let mut s = SubjectReport::new(&h.name);
            let input = h.to_input(bundle)?;
            let check = match input.validate() {
                Ok(()) => Check::new("hyperresolution", true, format!("{} nodes, {} arrows", input.nodes.len(), input.arrows.len())),
                Err(e) => Check::new("hyperresolution", false, e.to_string()),
            };
            s.checks.push(check);
            Ok(s)
        }
        Document::BlowupSquare(b) => {
            let mut s = SubjectReport::new(&b.name);
            b.resolve(bundle)?;
            s.checks.push(Check::new("blowup_square", true, "references and shapes resolve"));
            Ok(s)
        }
        Document::TorusQuery(t) => {
            let mut s = SubjectReport::new(&t.name);
            let ok = TorusAlgebra::new(t.rank).is_ok();
            s.checks.push(Check::new("torus_query", ok, format!("rank {}", t.rank)));
            Ok(s)
        }
    }
}

fn validate_subject(d: &GoodCompDoc, subdivide: usize) -> Result<SubjectReport, InputError> {
    let mut s = SubjectReport::new(&d.name);
    let g = d.to_data()?;
    let rep = simp::validate(&g);
    let issues: Vec<String> = rep.issues.iter().map(|i| i.detail.clone()).collect();
    s.checks.push(Check::new("simplicial_manifold", rep.is_valid(), issues.join("; ")));
    if rep.is_valid() {
        let check = match simp::prepare(&g, subdivide) {
            Ok(p) => Check::new(
                "normal_crossing",
                true,
                format!("{} vertices, {} top simplices after subdivision", p.complex.vertex_count(), p.complex.count(p.n())),
            ),
            Err(e) => Check::new("normal_crossing", false, e.to_string()),
        };
        s.checks.push(check);
    }
    Ok(s)
}

fn weight_window(g: &GoodCompData) -> (i32, i32) {
    (-(g.n() as i32) - 1, 0)
}

fn smooth_subject(cli: &Cli, g: &GoodCompData, compare: Option<&GoodCompData>) -> Result<SubjectReport, InputError> {
    let invalid = |e: String| InputError::Field { location: g.name.clone(), message: e };
    let mut s = SubjectReport::new(&g.name);
    let (lo, hi) = weight_window(g);
    match &cli.command {
        Command::Corner { .. } => {
            let cf = corner::corner_complex(g).map_err(|e| invalid(e.to_string()))?;
            let table = filt::homology_filtration(&cf.filtered);
            let (flo, fhi) = cf.filtered.index_range();
            s.weight_table = Some(TableSection {
                source: format!("corner filtration on H_*(X') of {}", g.name),
                rows: table.rows(flo, fhi),
            });
            s.checks.push(Check::new("filtration", filt::validate_filtration(&cf.filtered).is_valid(), ""));
            s.checks.push(Check::empty("local_model", &corner::local_model_mismatches(&cf)));
            let ex = corner::pi_pushforward_exactness(&cf);
            s.checks.push(Check::new(
                "pi_exactness",
                ex.passed(),
                format!("surjective failures {:?}, kernel failures {:?}", ex.surjective_failures, ex.kernel_failures),
            ));
            let psi: Vec<usize> = (0..=g.n()).filter(|&p| !corner::graded_iso_psi(&cf, p).passed()).collect();
            s.checks.push(Check::empty("graded_iso_psi", &psi));
            if cli.emit_pages {
                let ss = filt::spectral_sequence(&cf.filtered);
                s.pages = Some(PagesSection::from_sequence(format!("corner spectral sequence of {}", g.name), &ss, 1));
            }
        }
        Command::Weight { .. } => {
            let wc = weight::weight_complex(g).map_err(|e| invalid(e.to_string()))?;
            let table = wc.table_with_pages();
            s.weight_table =
                Some(TableSection { source: format!("weight complex (decalage of corner filtration) of {}", g.name), rows: table.rows(lo, hi) });
            let ss = table.spectral_sequence.as_ref().expect("pages requested");
            s.checks.push(Check::empty("abutment", &filt::abutment_mismatches(&table, ss)));
            let b = weight::smooth_bounds(&wc);
            s.checks.push(Check::new("bounds", b.passed(), if b.passed() { String::new() } else { format!("{b:?}") }));
            let kr = weight::kernel_characterization(g).map_err(|e| invalid(e.to_string()))?;
            let bad: Vec<i32> = kr.entries.iter().filter(|e| !e.equal).map(|e| e.k).collect();
            s.checks.push(Check::empty("kernel_characterization", &bad));
            if let Some(other) = compare {
                let ind = weight::independence_check(g, other).map_err(|e| invalid(e.to_string()))?;
                s.checks.push(Check::new("compare", ind.equal, format!("against {}", other.name)));
            }
            if cli.emit_pages {
                s.pages = Some(PagesSection::from_sequence(format!("weight spectral sequence of {}", g.name), ss, 1));
            }
        }
        Command::Pages { .. } => {
            let cf = corner::corner_complex(g).map_err(|e| invalid(e.to_string()))?;
            let ss = filt::spectral_sequence(&cf.filtered);
            s.pages = Some(PagesSection::from_sequence(format!("corner spectral sequence of {}", g.name), &ss, 1));
            let homology = cf.filtered.complex.homology_dims();
            let abut = ss.abutment_dims();
            let bad: Vec<i32> =
                homology.keys().chain(abut.keys()).copied().filter(|k| homology.get(k).unwrap_or(&0) != abut.get(k).unwrap_or(&0)).collect();
            s.checks.push(Check::empty("abutment", &bad));
            let gy = cechgysin::gysin_complex(g);
            s.checks.push(Check::empty("e1_equals_gysin", &gy.page_mismatches(&ss)));
            s.checks.push(Check::empty("e2_equals_gysin_homology", &gy.second_page_mismatches(&ss)));
            let dec = filt::spectral_sequence(&filt::decalage(&cf.filtered));
            s.checks.push(Check::empty("decalage_pages", &weight::decalage_page_mismatches(&ss, &dec)));
        }
        Command::Gysin { .. } => {
            let gy = cechgysin::gysin_complex(g);
            s.pages = Some(gysin_pages(g, &gy));
            s.checks.push(Check::new("squares_to_zero", gy.squares_to_zero(), ""));
            s.checks.push(Check::empty("stratum_homology", &gy.stratum_mismatches()));
            let sg = SimplicialGysin::new(g).map_err(|e| invalid(e.to_string()))?;
            let bad: Vec<(usize, i32)> = gy.differentials.keys().copied().filter(|&(p, k)| gy.rank(p, k) != sg.rank(p, k)).collect();
            s.checks.push(Check::empty("dual_cell_ranks", &bad));
        }
        Command::Cech { .. } => {
            let cr = cechgysin::cech_report(g);
            s.other_tables.insert(
                "cech_total_homology".into(),
                TableSection {
                    source: format!("total homology of the cohomological Čech complex of {}", g.name),
                    rows: cr.total_dims.iter().map(|(&t, &d)| (t, vec![(0, d)])).collect(),
                },
            );
            s.checks.push(Check::new("cech_total", cr.total_dims == cr.relative_dims && cr.total_dims == cr.complement_dims, ""));
            s.checks.push(Check::new("dual_cell_iso", cr.dual_cell_iso, ""));
            s.checks.push(Check::new("transpose_dual", cr.transpose_dual, ""));
            let phi = corner::cellular_pullback_phi(g).map_err(|e| invalid(e.to_string()))?;
            let pr = corner::pullback_report(&phi);
            s.checks.push(Check::new("phi_chain_map", pr.chain_map, ""));
            s.checks.push(Check::new("phi_filtered", pr.filtered, ""));
            s.checks.push(Check::empty("phi_graded_quasi_iso", &pr.graded_failures));
        }
        Command::Duality { .. } => {
            let dr = cechgysin::duality_report(g).map_err(|e| invalid(e.to_string()))?;
            let wc = weight::weight_complex(g).map_err(|e| invalid(e.to_string()))?;
            s.weight_table = Some(TableSection { source: format!("weight complex of {}", g.name), rows: wc.table().rows(lo, hi) });
            s.other_tables.insert(
                "borel_moore_weight_table".into(),
                TableSection { source: format!("homological Čech complex of {}", g.name), rows: dr.bm_table.clone() },
            );
            s.checks.push(Check::empty("annihilator", &dr.failures()));
        }
        _ => unreachable!("not a per-compactification command"),
    }
    Ok(s)
}

/// `E¹_{-p, k+p} = ⊕_{|J|=p} H_k(D_J)` as a page dump.
fn gysin_pages(g: &GoodCompData, gy: &cechgysin::GysinComplex) -> PagesSection {
    let rows = gy
        .dims
        .iter()
        .filter(|(_, &d)| d > 0)
        .map(|(&(p, k), &dim)| report::PageRow { p: -(p as i32), q: k + p as i32, dim, d_rank: gy.rank(p, k) })
        .collect::<Vec<_>>();
    let mut rows = rows;
    rows.sort_by_key(|r| (r.p, r.q));
    PagesSection { source: format!("Gysin complex of the divisor of {}", g.name), pages: [(1, rows)].into_iter().collect() }
}

fn assemble_subject(cli: &Cli, name: &str, h: &weight::HyperresolutionInput) -> Result<SubjectReport, InputError> {
    let mut s = SubjectReport::new(name);
    let a = weight::assemble(h).map_err(|e| InputError::Field { location: name.into(), message: e.to_string() })?;
    let n = a.weight.n as i32;
    let table = a.weight.table_with_pages();
    s.weight_table = Some(TableSection { source: format!("assembled weight complex of {name}"), rows: table.rows(-n - 1, 0) });
    let b = weight::singular_bounds(&a.weight);
    s.checks.push(Check::new("bounds", b.passed(), if b.passed() { String::new() } else { format!("{b:?}") }));
    let ss: &SpectralSequence = table.spectral_sequence.as_ref().expect("pages requested");
    s.checks.push(Check::empty("abutment", &filt::abutment_mismatches(&table, ss)));
    if cli.emit_pages {
        s.pages = Some(PagesSection::from_sequence(format!("weight spectral sequence of {name}"), ss, 1));
    }
    Ok(s)
}

fn blowup_subject(name: &str, sq: ResolvedSquare) -> Result<SubjectReport, InputError> {
    let invalid = |e: weight::WeightError| InputError::Field { location: name.into(), message: e.to_string() };
    let mut s = SubjectReport::new(name);
    match sq {
        ResolvedSquare::Matrices(data) => {
            let rep = weight::blowup_square_checks(&data).map_err(invalid)?;
            for d in &rep.degrees {
                let (e, c, mt, m) = d.dims;
                let detail = format!("dims E={e} C={c} M~={mt} M={m}");
                s.checks.push(Check::new(&format!("k={}_commutes", d.k), d.commutes, detail));
                s.checks.push(Check::new(&format!("k={}_exact", d.k), d.exact && d.q_surjective && d.kernel_iso, ""));
                s.checks.push(Check::new(&format!("k={}_degree_one", d.k), d.degree_one && d.split_m_tilde, ""));
                s.checks.push(Check::new(&format!("k={}_gysin_square", d.k), d.gysin_commutes && d.split_e, ""));
                s.checks.push(Check::new(
                    &format!("k={}_q_tilde", d.k),
                    d.q_tilde_unique && d.q_tilde_section && d.gysin_square_commutes && d.gysin_square_acyclic,
                    format!("{:?}", d.q_tilde),
                ));
            }
        }
        ResolvedSquare::Transverse(pairs) => {
            let rep = weight::transverse_blowup_check(&pairs).map_err(invalid)?;
            let nonzero: Vec<_> = rep.total_homology.iter().filter(|(_, &d)| d > 0).collect();
            s.checks.push(Check::empty("simple_complex_acyclic", &nonzero));
            s.checks.push(Check::empty("graded_pieces_acyclic", &rep.graded_failures));
        }
        ResolvedSquare::Contained { blown_up, base, blowdown, exponents } => {
            let rep = weight::contained_blowup_check(&blown_up, &base, &blowdown).map_err(invalid)?;
            s.checks.push(Check::new("filtered_map", rep.filtered, ""));
            s.checks.push(Check::empty("graded_quasi_iso", &rep.graded_failures));
            s.checks.push(Check::new("same_weight_tables", rep.same_tables, ""));
            if let Some(exponents) = exponents {
                let spec = PushforwardSpec { exponents };
                let (_, pr) = cechgysin::weighted_pushforward(&blowdown, &blown_up, &base, &spec)
                    .map_err(|e| InputError::Field { location: name.into(), message: e.to_string() })?;
                s.checks.push(Check::new("weighted_pushforward", pr.passed(), if pr.passed() { String::new() } else { format!("{pr:?}") }));
            }
        }
    }
    Ok(s)
}

fn independence_command(cli: &Cli, input: &str) -> Result<SubjectReport, InputError> {
    let bundle = Bundle::read(input)?;
    let mut docs: Vec<GoodCompDoc> = bundle.compactifications().cloned().collect();
    if let Some(path) = &cli.compare {
        docs.truncate(1);
        docs.push(first_compactification(&Bundle::read(path)?, path)?.clone());
    }
    if docs.len() != 2 {
        return Err(InputError::Field {
            location: input.into(),
            message: format!("independence needs two good_compactification documents, found {}", docs.len()),
        });
    }
    let g1 = prepared(&docs[0], cli.subdivide as usize)?;
    let g2 = prepared(&docs[1], cli.subdivide as usize)?;
    let rep = weight::independence_check(&g1, &g2).map_err(|e| InputError::Field { location: input.into(), message: e.to_string() })?;
    let mut s = SubjectReport::new(&format!("{} vs {}", g1.name, g2.name));
    s.weight_table = Some(TableSection { source: format!("weight complex of {}", g1.name), rows: rep.first.clone() });
    s.other_tables.insert("compared_weight_table".into(), TableSection { source: format!("weight complex of {}", g2.name), rows: rep.second.clone() });
    s.checks.push(Check::new("same_weight_dims", rep.equal, ""));
    Ok(s)
}

// ====================================================================
// Torus queries
// ====================================================================

fn torus_command(input: &str) -> Result<Vec<SubjectReport>, InputError> {
    let text = std::fs::read_to_string(input).map_err(|e| InputError::Io { path: input.into(), message: e.to_string() })?;
    let trimmed = text.trim_start();
    let docs: Vec<TorusQueryDoc> = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Bundle::parse(&text)?
            .documents
            .into_iter()
            .filter_map(|d| if let Document::TorusQuery(t) = d { Some(t) } else { None })
            .collect()
    } else {
        vec![parse_torus_text(input, &text)?]
    };
    if docs.is_empty() {
        return Err(InputError::Field { location: input.into(), message: "no torus_query documents".into() });
    }
    docs.iter().map(run_torus_queries).collect()
}

/// `rank N` followed by one query per line; `#` starts a comment.
pub fn parse_torus_text(name: &str, text: &str) -> Result<TorusQueryDoc, InputError> {
    let mut rank = None;
    let mut queries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if rank.is_none() {
            let n = line
                .strip_prefix("rank")
                .and_then(|r| r.trim().parse::<usize>().ok())
                .ok_or_else(|| InputError::Syntax { line: i + 1, column: 1, message: "expected `rank N`".into() })?;
            rank = Some(n);
        } else {
            queries.push(line.to_string());
        }
    }
    let rank = rank.ok_or_else(|| InputError::Syntax { line: 1, column: 1, message: "missing `rank N`".into() })?;
    Ok(TorusQueryDoc { name: name.to_string(), rank, queries })
}

fn run_torus_queries(doc: &TorusQueryDoc) -> Result<SubjectReport, InputError> {
    let algebra =
        TorusAlgebra::new(doc.rank).map_err(|e| InputError::Field { location: format!("{}.rank", doc.name), message: e.to_string() })?;
    let mut s = SubjectReport::new(&doc.name);
    for (i, q) in doc.queries.iter().enumerate() {
        let out = torus_query(&algebra, q).map_err(|message| InputError::Field { location: format!("{}.queries[{i}]", doc.name), message })?;
        s.lines.push(format!("{q} => {out}"));
    }
    Ok(s)
}

fn parse_element(rank: usize, text: &str) -> Result<AlgebraElement, String> {
    if text == "0" {
        return Ok(AlgebraElement::zero(rank));
    }
    let mut terms = Vec::new();
    for t in text.split('+') {
        let g = match t {
            "1" => 0,
            _ => t
                .strip_prefix('g')
                .and_then(|d| d.parse::<usize>().ok())
                .ok_or_else(|| format!("bad term `{t}`; expected `1` or `g<mask>`"))?,
        };
        if g >> rank != 0 {
            return Err(format!("group element {g} does not fit rank {rank}"));
        }
        terms.push(g);
    }
    Ok(AlgebraElement::from_support(rank, terms))
}

fn format_element(a: &AlgebraElement) -> String {
    let terms: Vec<String> = a.elements().map(|g| if g == 0 { "1".to_string() } else { format!("g{g}") }).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

fn parse_matrix(text: &str) -> Result<BitMatrix, String> {
    let rows: Vec<Vec<u8>> = text
        .split(';')
        .map(|r| r.chars().map(|c| c.to_digit(2).map(|d| d as u8).ok_or_else(|| format!("bad matrix entry `{c}`"))).collect())
        .collect::<Result<_, _>>()?;
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err("ragged matrix".into());
    }
    let mut m = BitMatrix::zeros(rows.len(), width);
    for (i, r) in rows.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            if x == 1 {
                m.set(i, j, true);
            }
        }
    }
    Ok(m)
}

fn format_matrix(m: &BitMatrix) -> String {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| if m.get(i, j) { '1' } else { '0' }).collect::<String>()).collect::<Vec<_>>().join(";")
}

fn parse_number(text: Option<&str>, what: &str) -> Result<usize, String> {
    text.and_then(|t| t.parse().ok()).ok_or_else(|| format!("expected {what}"))
}

/// One line: `add A B`, `mul A B`, `translate A g`, `augmentation A`,
/// `filtration A`, `graded A p`, `dims`, `hom ROWS p`.
pub fn torus_query(algebra: &TorusAlgebra, line: &str) -> Result<String, String> {
    let n = algebra.rank();
    let words: Vec<&str> = line.split_whitespace().collect();
    let elem = |i: usize| words.get(i).ok_or_else(|| "missing element".to_string()).and_then(|t| parse_element(n, t));
    let arity = |k: usize| if words.len() == k + 1 { Ok(()) } else { Err(format!("`{}` takes {k} arguments", words[0])) };
    match words.first().copied() {
        Some("add") => {
            arity(2)?;
            Ok(format_element(&elem(1)?.add(&elem(2)?).map_err(|e| e.to_string())?))
        }
        Some("mul") => {
            arity(2)?;
            Ok(format_element(&elem(1)?.mul(&elem(2)?).map_err(|e| e.to_string())?))
        }
        Some("translate") => {
            arity(2)?;
            let g = parse_number(words.get(2).copied(), "a group element mask")?;
            if g >> n != 0 {
                return Err(format!("group element {g} does not fit rank {n}"));
            }
            Ok(format_element(&elem(1)?.translate(g)))
        }
        Some("augmentation") => {
            arity(1)?;
            Ok(u8::from(elem(1)?.augmentation()).to_string())
        }
        Some("filtration") => {
            arity(1)?;
            let a = elem(1)?;
            if a.is_zero() {
                return Ok("zero".into());
            }
            let p = (0..=n).rev().find(|&p| algebra.ideal_power(p).contains(a.support())).unwrap_or(0);
            Ok(p.to_string())
        }
        Some("graded") => {
            arity(2)?;
            let p = parse_number(words.get(2).copied(), "a degree")?;
            let coords = algebra.graded_coordinates(&elem(1)?, p).map_err(|e| e.to_string())?;
            let sets = TorusAlgebra::coordinate_sets(n, p);
            let hit: Vec<String> = sets
                .iter()
                .enumerate()
                .filter(|&(i, _)| coords.get(i))
                .map(|(_, j)| format!("{{{}}}", j.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
                .collect();
            Ok(if hit.is_empty() { "0".into() } else { hit.join(" ") })
        }
        Some("dims") => {
            arity(0)?;
            Ok((0..=n).map(|p| format!("p={p}:{}", algebra.graded_dim(p))).collect::<Vec<_>>().join(" "))
        }
        Some("hom") => {
            arity(2)?;
            let m = parse_matrix(words[1])?;
            let p = parse_number(words.get(2).copied(), "a degree")?;
            Ok(format_matrix(&graded_matrix(&TorusHom::new(m), p)))
        }
        Some(other) => Err(format!("unknown query `{other}`")),
        None => Err("empty query".into()),
    }
}

// ====================================================================
// Fixtures
// ====================================================================

fn write_fixtures(name: &str, out: Option<&PathBuf>) -> Result<SubjectReport, InputError> {
    let names: Vec<&str> = if name == "all" { fixtures::NAMES.to_vec() } else { vec![name] };
    let mut s = SubjectReport::new(name);
    if name == "all" && out.is_none() {
        return Err(InputError::Field { location: "fixtures".into(), message: "`all` needs --out".into() });
    }
    let bundles: Vec<(String, Bundle)> = std::thread::scope(|scope| {
        let handles: Vec<_> = names.iter().map(|&n| scope.spawn(move || (n.to_string(), fixtures::fixture(n)))).collect();
        handles
            .into_iter()
            .map(|h| {
                let (n, b) = h.join().expect("fixture worker");
                b.map(|b| (n.clone(), b)).ok_or_else(|| InputError::Field {
                    location: "fixtures".into(),
                    message: format!("unknown fixture `{n}`; known: {}", fixtures::NAMES.join(", ")),
                })
            })
            .collect::<Result<_, _>>()
    })?;
    for (n, b) in bundles {
        match out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| InputError::Io { path: dir.display().to_string(), message: e.to_string() })?;
                let path = dir.join(format!("{n}.json"));
                std::fs::write(&path, b.to_json()).map_err(|e| InputError::Io { path: path.display().to_string(), message: e.to_string() })?;
                s.lines.push(path.display().to_string());
            }
            None => s.lines.push(b.to_json().trim_end().to_string()),
        }
    }
    Ok(s)
}
