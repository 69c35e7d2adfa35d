use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::{CharsumArgs, Common, ExportArgs, Failure, Format, GapArgs, Report, VerifyArgs};
use crate::error::Error;
use crate::gap::{self, GapReport};
use crate::matfq::{MatFq, MatrixSpace};
use crate::oracle::{spectrum_via_graph, verify_eigenvector, verify_simplicity, CayleyGraph};
use crate::spectra::{
    antidiagonal_sum_closed, charsum_histograms, contract_histogram, eig_solve_r3_from_trace,
    mult_landsberg, n1_closed, n2_closed, spectrum_charsum, spectrum_closed, DiagonalCounts,
    Spectrum, SpectrumLine,
};

type CmdResult = Result<Report, Failure>;

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn render_spectrum(s: &Spectrum, format: Format) -> String {
    match format {
        Format::Json => json(s),
        Format::Csv => s.to_csv(),
        Format::Text => {
            let mut out = format!("unit-graph on Mat_{}(F_{})\n", s.n, s.q);
            for l in &s.lines {
                let _ = writeln!(
                    out,
                    "rank {}: eigenvalue {}, multiplicity {}",
                    l.rank, l.eigenvalue, l.multiplicity
                );
            }
            out
        }
    }
}

pub fn spectrum(c: &Common) -> CmdResult {
    let ctx = c.field()?;
    let s = match c.n {
        1 | 3 => spectrum_closed(ctx.q() as u64, c.n)?,
        n => spectrum_charsum(&ctx, n, c.enum_config())?,
    };
    Ok(Report::ok(render_spectrum(&s, c.format)))
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Serialize)]
struct Check {
    name: String,
    status: Status,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    q: u64,
    n: usize,
    checks: Vec<Check>,
}

fn check(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        status: if ok { Status::Pass } else { Status::Fail },
        detail: detail.into(),
    }
}

fn fmt_list<T: std::fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(T::to_string).collect();
    format!("({})", parts.join(", "))
}

pub fn verify(v: &VerifyArgs) -> CmdResult {
    let c = &v.common;
    let ctx = c.field()?;
    let cfg = c.enum_config();
    let (q, n) = (ctx.q() as u64, c.n);
    let mut checks = Vec::new();

    let reps = (0..=n)
        .map(|r| MatFq::rank_representative(&ctx, n, r))
        .collect::<Result<Vec<_>, _>>()?;
    let hists = charsum_histograms(&reps, cfg)?;
    let eigs = hists
        .iter()
        .map(|h| contract_histogram(ctx.p(), h))
        .collect::<Result<Vec<_>, _>>()?;
    let closed = match spectrum_closed(q, n) {
        Ok(s) => Some(s),
        Err(Error::UnsupportedDimension { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    for (r, &lambda) in eigs.iter().enumerate() {
        let name = format!("eigenvalue rank {r}");
        checks.push(match &closed {
            Some(s) => check(
                name,
                s.lines[r].eigenvalue == lambda,
                format!(
                    "closed form {}, character sum {lambda}",
                    s.lines[r].eigenvalue
                ),
            ),
            None => check(
                name,
                true,
                format!("character sum {lambda}; no closed form for n = {n}"),
            ),
        });
    }

    let landsberg = (0..=n)
        .map(|r| mult_landsberg(q, n, r))
        .collect::<Result<Vec<_>, _>>()?;
    let census: Vec<i128> = MatrixSpace::new(&ctx, n, cfg.cap)?
        .rank_census(cfg.workers)
        .into_iter()
        .map(i128::from)
        .collect();
    checks.push(check(
        "multiplicities",
        census == landsberg,
        format!(
            "census {}, Landsberg {}",
            fmt_list(&census),
            fmt_list(&landsberg)
        ),
    ));

    let lines: Vec<SpectrumLine> = (0..=n)
        .map(|r| SpectrumLine {
            rank: r,
            eigenvalue: eigs[r],
            multiplicity: landsberg[r],
        })
        .collect();
    let spectrum = Spectrum::unchecked(q, n, lines);
    let weighted = spectrum.weighted_sum()?;
    checks.push(check(
        "trace identity",
        spectrum.validate().is_ok(),
        format!("sum of multiplicity times eigenvalue = {weighted}"),
    ));
    if n == 3 {
        let solved = eig_solve_r3_from_trace(q)?;
        checks.push(check(
            "rank-3 eigenvalue from trace",
            solved == eigs[3],
            format!("solved {solved}, character sum {}", eigs[3]),
        ));
    }

    let order = (q as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if order <= c.graph_cap as u128 {
        match CayleyGraph::build(&ctx, n, c.graph_cap, cfg.workers) {
            Ok(g) => {
                checks.push(check(
                    "graph simplicity",
                    verify_simplicity(&g),
                    format!("{order} vertices"),
                ));
                checks.push(check(
                    "graph regularity",
                    true,
                    format!("every vertex has degree {}", g.row_degree()),
                ));
                checks.push(match spectrum_via_graph(&g, cfg) {
                    Ok(s) => check(
                        "eigenvectors",
                        s == spectrum,
                        format!(
                            "{order} character vectors verified; spectrum {}",
                            fmt_list(&s.eigenvalues())
                        ),
                    ),
                    Err(e) => check("eigenvectors", false, e.to_string()),
                });
            }
            Err(e @ Error::SizeTooLarge { .. }) => return Err(e.into()),
            Err(e) => checks.push(check("graph simplicity", false, e.to_string())),
        }
    } else if v.extended {
        let g = CayleyGraph::streamed(&ctx, n, cfg.cap, cfg.workers)?;
        checks.push(check(
            "graph simplicity",
            verify_simplicity(&g),
            format!("{order} vertices, rows generated on demand"),
        ));
        let mut failure = None;
        for (r, rep) in reps.iter().enumerate() {
            match verify_eigenvector(&g, rep, cfg) {
                Ok(lambda) if lambda == eigs[r] => {}
                Ok(lambda) => failure = Some(format!("rank {r}: {lambda} vs {}", eigs[r])),
                Err(e) => failure = Some(format!("rank {r}: {e}")),
            }
            if failure.is_some() {
                break;
            }
        }
        let ok = failure.is_none();
        checks.push(check(
            "eigenvectors",
            ok,
            failure
                .unwrap_or_else(|| "character vectors of all rank representatives verified".into()),
        ));
    } else {
        checks.push(Check {
            name: "graph".into(),
            status: Status::Skipped,
            detail: format!(
                "order {order} over the graph cap {}; use --extended to stream rows",
                c.graph_cap
            ),
        });
    }

    let failure = checks
        .iter()
        .find(|ch| ch.status == Status::Fail)
        .map(|ch| format!("check failed: {}", ch.name));
    let report = VerifyReport { q, n, checks };
    let text = match c.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut out = String::from("check,status,detail\n");
            for ch in &report.checks {
                let _ = writeln!(out, "{},{},\"{}\"", ch.name, ch.status.as_str(), ch.detail);
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for ch in &report.checks {
                let tag = ch.status.as_str().to_uppercase();
                let _ = writeln!(out, "{tag} {}: {}", ch.name, ch.detail);
            }
            out
        }
    };
    Ok(Report { text, failure })
}

#[derive(Serialize)]
struct CharsumEntry {
    label_index: u64,
    rank: usize,
    label: MatFq,
    histogram: Vec<u64>,
    eigenvalue: i128,
}

#[derive(Serialize)]
struct CharsumReport {
    q: u64,
    n: usize,
    results: Vec<CharsumEntry>,
}

pub fn charsum(a: &CharsumArgs) -> CmdResult {
    let c = &a.common;
    let ctx = c.field()?;
    let n = c.n;
    let space = MatrixSpace::new(&ctx, n, c.enum_cap)?;
    let labels = match (a.rank, a.label_index) {
        (Some(r), _) => vec![MatFq::rank_representative(&ctx, n, r)?],
        (None, Some(i)) => gap::subset_from_indices(&space, &[i])?,
        (None, None) => (0..=n)
            .map(|r| MatFq::rank_representative(&ctx, n, r))
            .collect::<Result<_, _>>()?,
    };
    let hists = charsum_histograms(&labels, c.enum_config())?;
    let results = labels
        .into_iter()
        .zip(hists)
        .map(|(label, histogram)| {
            Ok(CharsumEntry {
                label_index: space.index_of(&label)?,
                rank: label.rank(),
                eigenvalue: contract_histogram(ctx.p(), &histogram)?,
                label,
                histogram,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let report = CharsumReport {
        q: ctx.q() as u64,
        n,
        results,
    };
    let text = match c.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut out = String::from("label_index,rank,eigenvalue,histogram\n");
            for e in &report.results {
                let h: Vec<String> = e.histogram.iter().map(u64::to_string).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    e.label_index,
                    e.rank,
                    e.eigenvalue,
                    h.join(" ")
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for e in &report.results {
                let _ = writeln!(
                    out,
                    "label {} (index {}, rank {}): eigenvalue {}, trace histogram {}",
                    e.label,
                    e.label_index,
                    e.rank,
                    e.eigenvalue,
                    fmt_list(&e.histogram)
                );
            }
            out
        }
    };
    Ok(Report::ok(text))
}

fn read_indices(path: &Path) -> Result<Vec<u64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<u64>().map_err(|_| {
                Failure::usage(format!(
                    "{} line {}: `{}` is not an index",
                    path.display(),
                    i + 1,
                    l.trim()
                ))
            })
        })
        .collect()
}

pub fn gap(a: &GapArgs) -> CmdResult {
    let c = &a.common;
    if c.n != 3 {
        return Err(Error::UnsupportedDimension {
            expected: 3,
            got: c.n,
        }
        .into());
    }
    let ctx = c.field()?;
    let space = MatrixSpace::new(&ctx, 3, u64::MAX)?;
    let reports: Vec<GapReport> = if let Some(path) = &a.subset_file {
        let x = gap::subset_from_indices(&space, &read_indices(path)?)?;
        if x.is_empty() {
            return Err(Failure::usage(format!(
                "{} lists no indices",
                path.display()
            )));
        }
        if a.single {
            vec![gap::gap_check_single(&x)?]
        } else {
            let y = match &a.subset_file_y {
                Some(py) => gap::subset_from_indices(&space, &read_indices(py)?)?,
                None => x.clone(),
            };
            if y.is_empty() {
                return Err(Failure::usage("subset Y is empty"));
            }
            vec![gap::gap_check(&x, &y)?]
        }
    } else if let Some(size) = a.random_size {
        if a.trials == 0 {
            return Err(Failure::usage("--trials must be at least 1"));
        }
        if size == 0 {
            return Err(Failure::usage("--random-size must be at least 1"));
        }
        gap::soundness_sweep(&ctx, size, a.trials, a.seed)?
    } else {
        return Err(Failure::usage("give --subset-file or --random-size"));
    };
    let text = match c.format {
        Format::Json => json(&reports),
        Format::Csv => {
            let mut out = String::from(
                "q,x_size,y_size,n_star_num,n_star_den,integer_bound,guaranteed,exceeds_rational_threshold,seed,witness_x_pos,witness_y_pos\n",
            );
            for r in &reports {
                let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
                let (wx, wy) = r
                    .witness
                    .as_ref()
                    .map(|w| (w.x_pos.to_string(), w.y_pos.to_string()))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{seed},{wx},{wy}",
                    r.q,
                    r.set_sizes.0,
                    r.set_sizes.1,
                    r.n_star_num,
                    r.n_star_den,
                    r.integer_bound,
                    r.guaranteed,
                    r.exceeds_rational_threshold
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &reports {
                let seed = r.seed.map(|s| format!(" seed {s}:")).unwrap_or_default();
                let witness = match &r.witness {
                    Some(w) => format!("witness A = {}, B = {}", w.a, w.b),
                    None => "no witness".into(),
                };
                let _ = writeln!(
                    out,
                    "q {}:{seed} |X| = {}, |Y| = {}, bound {} (n_* = {}/{}), guaranteed {}, {witness}",
                    r.q,
                    r.set_sizes.0,
                    r.set_sizes.1,
                    r.integer_bound,
                    r.n_star_num,
                    r.n_star_den,
                    r.guaranteed
                );
            }
            out
        }
    };
    Ok(Report::ok(text))
}

#[derive(Serialize)]
struct Row<K: Serialize> {
    key: K,
    count: i128,
    closed: i128,
    equal: bool,
}

fn row<K: Serialize>(key: K, count: impl Into<i128>, closed: i128) -> Row<K> {
    let count = count.into();
    Row {
        key,
        count,
        closed,
        equal: count == closed,
    }
}

#[derive(Serialize)]
struct DiagonalTables {
    n1: Vec<Row<u32>>,
    n2: Vec<Row<(u32, u32)>>,
    antidiagonal_sum: Row<&'static str>,
    lambda1: Row<&'static str>,
    lambda2: Row<&'static str>,
}

#[derive(Serialize)]
struct CensusReport {
    q: u64,
    n: usize,
    ranks: Vec<Row<usize>>,
    diagonal_counts: Option<DiagonalTables>,
}

pub fn census(c: &Common) -> CmdResult {
    let ctx = c.field()?;
    let cfg = c.enum_config();
    let (q, n) = (ctx.q() as u64, c.n);
    let census = MatrixSpace::new(&ctx, n, cfg.cap)?.rank_census(cfg.workers);
    let ranks = census
        .iter()
        .enumerate()
        .map(|(r, &m)| Ok(row(r, m, mult_landsberg(q, n, r)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let diagonal_counts = if n == 3 {
        let d = DiagonalCounts::compute(&ctx, cfg)?;
        let qq = ctx.q();
        let n1 = (0..qq)
            .map(|a| Ok(row(a, d.n1_table()[a as usize], n1_closed(q, a == 0)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let n2 = (0..qq * qq)
            .map(|i| {
                let (a, b) = (i / qq, i % qq);
                Ok(row(
                    (a, b),
                    d.n2_table()[i as usize],
                    n2_closed(q, a == 0, b == 0)?,
                ))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        let closed = spectrum_closed(q, 3)?;
        Some(DiagonalTables {
            n1,
            n2,
            antidiagonal_sum: row(
                "sum N(a,-a)",
                d.antidiagonal_sum(),
                antidiagonal_sum_closed(q)?,
            ),
            lambda1: row("N(0) - N(1)", d.lambda1(), closed.lines[1].eigenvalue),
            lambda2: row(
                "sum N(a,-a) - 2N(0,1) - sum N(a,1-a)",
                d.lambda2(),
                closed.lines[2].eigenvalue,
            ),
        })
    } else {
        None
    };
    let report = CensusReport {
        q,
        n,
        ranks,
        diagonal_counts,
    };
    let mut all_equal = report.ranks.iter().all(|r| r.equal);
    if let Some(d) = &report.diagonal_counts {
        all_equal &= d.n1.iter().all(|r| r.equal)
            && d.n2.iter().all(|r| r.equal)
            && d.antidiagonal_sum.equal
            && d.lambda1.equal
            && d.lambda2.equal;
    }
    let text = match c.format {
        Format::Json => json(&report),
        Format::Csv | Format::Text => {
            let sep = if c.format == Format::Csv { "," } else { " " };
            let mut out = String::new();
            if c.format == Format::Csv {
                out.push_str("table,key,count,closed,equal\n");
            }
            let mut push = |table: &str, key: String, count: i128, closed: i128, equal: bool| {
                let fields = [
                    table.to_string(),
                    key,
                    count.to_string(),
                    closed.to_string(),
                    equal.to_string(),
                ];
                let _ = writeln!(out, "{}", fields.join(sep));
            };
            for r in &report.ranks {
                push("rank", r.key.to_string(), r.count, r.closed, r.equal);
            }
            if let Some(d) = &report.diagonal_counts {
                for r in &d.n1 {
                    push("N1", r.key.to_string(), r.count, r.closed, r.equal);
                }
                for r in &d.n2 {
                    push(
                        "N2",
                        format!("{}:{}", r.key.0, r.key.1),
                        r.count,
                        r.closed,
                        r.equal,
                    );
                }
                for r in [&d.antidiagonal_sum, &d.lambda1, &d.lambda2] {
                    push(
                        "identity",
                        format!("\"{}\"", r.key),
                        r.count,
                        r.closed,
                        r.equal,
                    );
                }
            }
            out
        }
    };
    Ok(Report {
        text,
        failure: (!all_equal).then(|| "a census count differs from its closed form".to_string()),
    })
}

pub fn export_graph(a: &ExportArgs, out: &mut dyn Write) -> CmdResult {
    let c = &a.common;
    let ctx = c.field()?;
    let order = (ctx.q() as u128)
        .checked_pow((c.n * c.n) as u32)
        .unwrap_or(u128::MAX);
    let g = if order <= c.graph_cap as u128 || !a.extended {
        CayleyGraph::build(&ctx, c.n, c.graph_cap, c.workers)?
    } else {
        CayleyGraph::streamed(&ctx, c.n, c.enum_cap, c.workers)?
    };
    let io_err = |e: std::io::Error| Failure::check(format!("write failed: {e}"));
    match &a.output {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            g.write_edge_list(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
        None => {
            let mut w = std::io::BufWriter::new(out);
            g.write_edge_list(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
    }
    Ok(Report::ok(String::new()))
}
