use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use quandle_quiver::coloring::{count_colorings_oracle, LinearColoringSystem};
use quandle_quiver::counting::{predict_count, verify_counts, CandidateSource, CountCase, SweepGrid, SweepOptions};
use quandle_quiver::error::{ColoringError, CountingError, LinalgError, QuandleError};
use quandle_quiver::export::{to_csv, to_dot, to_json, ExportFormat, ExportOptions, Params, QuiverDocument};
use quandle_quiver::isomorphism::{isomorphic_with_budget, IsoVerdict};
use quandle_quiver::quandle::{affine_endomorphisms, brute_force_endomorphisms, DihedralQuandle};
use quandle_quiver::quiver::{build_quiver, check_quiver_invariants, quiver_form_for_count, realize};
use quandle_quiver::LinkSpec;

use crate::ranges::parse_list;
use crate::{Backend, Caps, CountArgs, EndoSource, Format, QuiverArgs, VerifyArgs};

/// Run outcome, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Ambiguous,
    CapExceeded,
    Mismatch,
}

impl Status {
    pub fn exit_code(self) -> ExitCode {
        ExitCode::from(match self {
            Status::Ok => 0,
            Status::Mismatch => 2,
            Status::Ambiguous => 3,
            Status::CapExceeded => 4,
        })
    }

    fn raise(&mut self, other: Status) {
        *self = (*self).max(other);
    }
}

pub fn is_cap_error(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<ColoringError>(),
            Some(
                ColoringError::OracleCapExceeded { .. }
                    | ColoringError::Linalg(LinalgError::EnumerationTooLarge { .. })
            )
        ) || matches!(
            cause.downcast_ref::<LinalgError>(),
            Some(LinalgError::EnumerationTooLarge { .. })
        ) || matches!(
            cause.downcast_ref::<QuandleError>(),
            Some(QuandleError::SearchBudgetExceeded { .. })
        ) || matches!(
            cause.downcast_ref::<CountingError>(),
            Some(CountingError::Coloring(ColoringError::OracleCapExceeded { .. }))
        )
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn check_modulus(n: usize) -> Result<()> {
    if n < 2 {
        bail!("modulus must be at least 2, got {n}");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CountRecord {
    link: String,
    n: usize,
    count: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<u128>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    formula: Vec<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    case: Option<CountCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    winner: Option<CandidateSource>,
    status: &'static str,
}

pub fn count(args: &CountArgs, caps: &Caps) -> Result<Status> {
    let spec = LinkSpec::parse(&args.link, args.strands)?;
    let ns = parse_list(&args.n)?;
    if ns.is_empty() {
        bail!("no modulus given");
    }
    let word = spec.word();
    let want = |b: Backend| args.backend == b || args.backend == Backend::All;
    if args.backend == Backend::Formula && spec.torus().is_none() {
        bail!("the formula backend only covers torus links");
    }
    let system = want(Backend::Linear).then(|| LinearColoringSystem::new(&word));

    let mut status = Status::Ok;
    let mut records = Vec::new();
    for n in ns {
        check_modulus(n)?;
        let mut cell = Status::Ok;
        let linear = system.as_ref().map(|s| s.count(n)).transpose()?;
        let oracle = if want(Backend::Oracle) {
            let quandle = DihedralQuandle::new(n)?.to_quandle();
            match count_colorings_oracle(&word, &quandle, caps.oracle_cap) {
                Ok(c) => Some(c),
                Err(e @ ColoringError::OracleCapExceeded { .. }) if args.backend == Backend::All => {
                    eprintln!("{spec} n={n}: oracle skipped: {e}");
                    cell.raise(Status::CapExceeded);
                    None
                }
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        let prediction = match spec.torus() {
            Some(t) if want(Backend::Formula) => match predict_count(t.p, t.q, n) {
                Ok(p) => Some(p),
                Err(e) if args.backend == Backend::All => {
                    eprintln!("{spec} n={n}: no formula: {e}");
                    None
                }
                Err(e) => return Err(e.into()),
            },
            _ => None,
        };

        let computed = linear.or(oracle);
        if let (Some(a), Some(b)) = (linear, oracle) {
            if a != b {
                cell.raise(Status::Mismatch);
            }
        }
        let mut winner = None;
        if let Some(p) = &prediction {
            match (p.count, computed) {
                (Some(f), Some(c)) if f != c => cell.raise(Status::Mismatch),
                (None, Some(c)) => match p.candidates.iter().find(|k| k.count == c) {
                    Some(k) => {
                        winner = Some(k.source);
                        cell.raise(Status::Ambiguous);
                    }
                    None => cell.raise(Status::Mismatch),
                },
                (None, None) => cell.raise(Status::Ambiguous),
                _ => {}
            }
        }
        let count = computed.or(prediction.as_ref().and_then(|p| p.count));
        let formula = prediction.as_ref().map(|p| p.possible_counts()).unwrap_or_default();

        let mut line = format!("{spec} n={n} count={}", count.map_or("?".into(), |c| c.to_string()));
        if let Some(v) = linear {
            line += &format!(" linear={v}");
        }
        if let Some(v) = oracle {
            line += &format!(" oracle={v}");
        }
        if let Some(p) = &prediction {
            let values: Vec<String> = formula.iter().map(u128::to_string).collect();
            line += &format!(" formula={} case={}", values.join("|"), p.case);
        }
        if let Some(w) = winner {
            line += &format!(" winner={}", w.as_str());
        }
        if cell == Status::Mismatch {
            line += " MISMATCH";
        }
        println!("{line}");

        records.push(CountRecord {
            link: spec.to_string(),
            n,
            count,
            linear,
            oracle,
            formula,
            case: prediction.as_ref().map(|p| p.case),
            winner,
            status: match cell {
                Status::Ok => "ok",
                Status::Ambiguous => "ambiguous",
                Status::CapExceeded => "cap-exceeded",
                Status::Mismatch => "mismatch",
            },
        });
        status.raise(cell);
    }
    if let Some(path) = &args.out {
        write_output(Some(path), &to_json(&records))?;
    }
    Ok(status)
}

pub fn quiver(args: &QuiverArgs, caps: &Caps) -> Result<Status> {
    let spec = LinkSpec::parse(&args.link, args.strands)?;
    check_modulus(args.n)?;
    let n = args.n;
    let export = args.format.map(|f| ExportOptions {
        format: match f {
            Format::Dot => ExportFormat::Dot,
            Format::Json => ExportFormat::Json,
            Format::Csv => ExportFormat::Csv,
        },
        collapse_blocks: args.collapse,
        include_loops: args.include_loops,
        output: args.out.clone(),
    });
    match &export {
        Some(opts) => {
            opts.validate()?;
            if opts.format == ExportFormat::Csv {
                bail!("CSV export is only available for verify reports");
            }
        }
        None if args.collapse => bail!("--collapse needs --format dot"),
        None => {}
    }
    // keep stdout for the export when it is going there
    let summary_to_stderr = export.as_ref().is_some_and(|o| o.output.is_none());
    let say = |line: String| {
        if summary_to_stderr {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    };

    let word = spec.word();
    let colorings = LinearColoringSystem::new(&word).colorings(n, caps.enum_cap)?;
    if !colorings.is_enumerated() {
        eprintln!(
            "error: {spec} over R_{n} has {} colorings, above the enumeration cap of {}",
            colorings.count(),
            caps.enum_cap
        );
        return Ok(Status::CapExceeded);
    }
    let endos = match args.endos {
        EndoSource::Affine => affine_endomorphisms(n),
        EndoSource::Brute => brute_force_endomorphisms(&DihedralQuandle::new(n)?.to_quandle(), caps.endo_cap)?,
    };
    let quiver = build_quiver(&colorings, &endos)?;
    let mut status = Status::Ok;
    say(format!(
        "{spec} n={n} N={} endomorphisms={}",
        quiver.vertex_count(),
        endos.len()
    ));
    if let Err(e) = check_quiver_invariants(&quiver, &colorings, endos.len()) {
        say(format!("invariants=violated ({e})"));
        status.raise(Status::Mismatch);
    }

    let torus = spec.torus();
    let prediction = torus.and_then(|t| predict_count(t.p, t.q, n).ok());
    if args.compare {
        match torus {
            None => say("compare=skipped (no closed form for braid words)".into()),
            Some(t) => {
                let computed = colorings.count();
                if let Some(p) = &prediction {
                    if !p.possible_counts().contains(&computed) {
                        say(format!(
                            "predicted count {:?} but computed {computed}",
                            p.possible_counts()
                        ));
                        status.raise(Status::Mismatch);
                    } else if p.is_ambiguous() {
                        say(format!(
                            "count prediction ambiguous; comparing against the N={computed} branch"
                        ));
                        status.raise(Status::Ambiguous);
                    }
                }
                match quiver_form_for_count(t.p, n, computed) {
                    Err(e) => say(format!("compare=skipped ({e})")),
                    Ok(form) => {
                        say(format!("predicted={form}"));
                        let verdict = isomorphic_with_budget(&quiver, &realize(&form), caps.iso_budget);
                        say(format!("isomorphic={}", verdict.as_str()));
                        match verdict {
                            IsoVerdict::Isomorphic(_) => {}
                            IsoVerdict::NotIsomorphic => status.raise(Status::Mismatch),
                            IsoVerdict::Undecided => status.raise(Status::CapExceeded),
                        }
                    }
                }
            }
        }
    }

    if let Some(opts) = &export {
        let text = match opts.format {
            ExportFormat::Dot => to_dot(&quiver, opts),
            _ => {
                let params = Params {
                    p: torus.map_or(word.strands(), |t| t.p),
                    q: torus.map(|t| t.q),
                    n,
                };
                to_json(&QuiverDocument::from_quiver(&quiver).with_params(params, prediction.map(|p| p.case)))
            }
        };
        write_output(opts.output.as_deref(), &text)?;
    }
    Ok(status)
}

pub fn verify(args: &VerifyArgs, caps: &Caps) -> Result<Status> {
    let ps = parse_list(&args.p)?;
    let qs = parse_list(&args.q)?;
    let ns = parse_list(&args.n)?;
    let opts = match args.backend {
        Backend::All => SweepOptions {
            linear: true,
            oracle: true,
            oracle_cap: caps.oracle_cap,
            skip_over_cap: true,
        },
        Backend::Linear => SweepOptions {
            linear: true,
            oracle: false,
            oracle_cap: caps.oracle_cap,
            skip_over_cap: false,
        },
        Backend::Oracle => SweepOptions {
            linear: false,
            oracle: true,
            oracle_cap: caps.oracle_cap,
            skip_over_cap: false,
        },
        Backend::Formula => bail!("verify needs a computing backend: linear, oracle or all"),
    };
    let ns_for = |p: usize| -> Vec<usize> {
        ns.iter()
            .copied()
            .filter(|&n| {
                args.max_np
                    .is_none_or(|cap| (n as u128).checked_pow(p as u32).is_some_and(|v| v <= cap))
            })
            .collect()
    };
    let mut report = quandle_quiver::SweepReport::default();
    for &p in &ps {
        let grid = SweepGrid::new(vec![p], qs.clone(), ns_for(p));
        report.cells.extend(verify_counts(&grid, &opts)?.cells);
    }

    let format = args.format.or_else(|| {
        args.out.as_ref().map(|p| match p.extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        })
    });
    let text = match format {
        Some(Format::Csv) => Some(to_csv(&report)),
        Some(Format::Json) => Some(to_json(&report)),
        Some(Format::Dot) => bail!("verify reports are written as JSON or CSV"),
        None => None,
    };
    let summary_to_stderr = text.is_some() && args.out.is_none();
    let mut summary = Vec::new();
    let mut status = Status::Ok;
    for cell in report.mismatches() {
        summary.push(format!(
            "mismatch T({},{}) n={}: predicted {:?} computed linear={:?} oracle={:?}",
            cell.p, cell.q, cell.n, cell.predicted, cell.computed_linear, cell.computed_oracle
        ));
        status.raise(Status::Mismatch);
    }
    for cell in report.cells.iter().filter(|c| c.winner.is_some()) {
        summary.push(format!(
            "ambiguous T({},{}) n={}: computed {} picks {}",
            cell.p,
            cell.q,
            cell.n,
            cell.computed,
            cell.winner.map_or("", |w| w.as_str())
        ));
        status.raise(Status::Ambiguous);
    }
    let skipped = if opts.oracle && opts.linear {
        report.cells.iter().filter(|c| c.computed_oracle.is_none()).count()
    } else {
        0
    };
    if skipped > 0 {
        summary.push(format!(
            "oracle skipped in {skipped} cells above the cap of {}",
            caps.oracle_cap
        ));
        status.raise(Status::CapExceeded);
    }
    summary.push(format!(
        "cells={} match={} ambiguous-resolved={} mismatch={}",
        report.cells.len(),
        report.count_status(quandle_quiver::counting::CellStatus::Match),
        report.count_status(quandle_quiver::counting::CellStatus::AmbiguousResolved),
        report.count_status(quandle_quiver::counting::CellStatus::Mismatch),
    ));
    for line in summary {
        if summary_to_stderr {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    if let Some(text) = text {
        write_output(args.out.as_deref(), &text)?;
    }
    Ok(status)
}
