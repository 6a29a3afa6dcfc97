//! Reference tables, regions and the manifest naming what was written.

use std::path::{Path, PathBuf};

use bcregions::bc_state::bsc_mixture;
use bcregions::gaussian::dpc::dpc_gap;
use bcregions::gaussian::{GaussianBC, Scalar};
use bcregions::orderings::{example3_atlas, AtlasOrdering};
use bcregions::region::{RateRegion, Sweep};
use bcregions::regions::{
    blackwell_state_region, capacities, finite_field_pair, finite_field_region, marton_rtd_sumrate,
    superposition_supports, tdcs_region, uv_outer_supports, MartonOptions,
};
use bcregions::search::GridSpec;
use bcregions::{Error, Result};
use serde::Serialize;

use crate::region::{sweep, BLACKWELL_RESOLUTION};
use crate::{output, Options, ReproArgs, Target};

#[derive(Debug, Serialize)]
struct Entry {
    target: &'static str,
    files: Vec<String>,
    notes: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    seed: u64,
    targets: Vec<Entry>,
}

#[derive(Debug, Serialize)]
struct Vertex {
    p1: f64,
    p2: f64,
    r1: f64,
    r2: f64,
}

#[derive(Debug, Serialize)]
struct Quantity {
    quantity: &'static str,
    value: f64,
    reference: &'static str,
}

#[derive(Debug, Serialize)]
struct GapRow {
    lambda: f64,
    gap: f64,
    superposition: f64,
    dpc: f64,
    corner: bool,
    power: f64,
    alpha: f64,
}

#[derive(Debug, Serialize)]
struct AtlasRow {
    p: f64,
    e: f64,
    ordering: AtlasOrdering,
    expected: bool,
    certified: bool,
    excluded: bool,
}

struct Writer<'a> {
    dir: &'a Path,
    options: &'a Options,
    files: Vec<String>,
    notes: Vec<String>,
}

impl Writer<'_> {
    fn path(&mut self, stem: &str, ext: &str) -> PathBuf {
        let name = format!("{stem}.{ext}");
        self.files.push(name.clone());
        self.dir.join(name)
    }

    fn region(&mut self, stem: &str, region: &RateRegion) -> Result<()> {
        let path = self.path(stem, self.options.format.extension());
        output::emit_region(Some(&path), region, self.options.format)
    }

    fn table<T: Serialize>(&mut self, stem: &str, rows: &[T]) -> Result<()> {
        let path = self.path(stem, "csv");
        output::emit_table(&path, rows)
    }

    fn finish(self, target: &'static str) -> Entry {
        Entry {
            target,
            files: self.files,
            notes: self.notes,
        }
    }
}

fn vertices(p1: f64, p2: f64, region: &RateRegion, scale: f64) -> Vec<Vertex> {
    region
        .vertices
        .iter()
        .map(|v| Vertex {
            p1,
            p2,
            r1: v.r1 / scale,
            r2: v.r2 / scale,
        })
        .collect()
}

fn fig4(w: &mut Writer) -> Result<()> {
    let sweep = sweep(w.options)?;
    let resolution = w.options.resolution.unwrap_or(BLACKWELL_RESOLUTION);
    let mut all = Vec::new();
    for (p1, p2) in [(0.5, 0.5), (0.7, 0.3), (1.0, 0.0)] {
        let r = blackwell_state_region(p1, p2, &sweep.directions(&Sweep::breakpoints(p1, p2)), resolution)?;
        w.region(&format!("fig4_{p1}_{p2}"), &r)?;
        all.extend(vertices(p1, p2, &r, 1.0));
    }
    w.table("fig4_vertices", &all)
}

fn fig5(w: &mut Writer, args: &ReproArgs) -> Result<()> {
    let (p1, p2) = (args.p1.unwrap_or(0.7), args.p2.unwrap_or(0.4));
    let k = args.field;
    let dirs = sweep(w.options)?.directions(&Sweep::breakpoints(p1.max(p2), p1.min(p2)));
    let scale = (k as f64).log2();
    let closed = finite_field_region(k, p1, p2, &dirs)?;
    w.region("fig5_region", &closed)?;
    w.table("fig5_vertices", &vertices(p1, p2, &closed, scale))?;
    let pair = finite_field_pair(k, [[1, 0], [1, 1]])?;
    if pair.input_size() <= 4 {
        let g = GridSpec::default_for(pair.input_size()).with_resolution(w.options.resolution);
        let generic = tdcs_region(&pair, p1, p2, &dirs, g)?;
        w.region("fig5_tdcs_region", &generic)?;
        w.table("fig5_tdcs_vertices", &vertices(p1, p2, &generic, scale))?;
    } else {
        w.notes.push(format!("field of size {k} exceeds the generic search; closed form only"));
    }
    Ok(())
}

fn bsc4(w: &mut Writer) -> Result<()> {
    let bc = bsc_mixture(&[0.28, 0.04, 0.02, 0.18], &[0.38, 0.62, 0.0, 0.0], &[0.0, 0.0, 0.38, 0.62])?;
    let grid = GridSpec::default_for(2).with_resolution(w.options.resolution);
    let (c1, c2) = capacities(&bc, grid)?;
    let sum = vec![vec![1.0, 1.0]];
    let sup = superposition_supports(&bc, &sum, grid)?[0].value;
    let uv = uv_outer_supports(&bc, &sum, grid)?[0].value;
    let (marton, _) = marton_rtd_sumrate(
        &bc,
        MartonOptions {
            seed: w.options.seed,
            ..MartonOptions::default()
        },
    )?;
    let rows = [
        Quantity { quantity: "C1", value: c1, reference: "0.5247" },
        Quantity { quantity: "C2", value: c2, reference: "0.5246" },
        Quantity { quantity: "superposition_sum", value: sup, reference: "0.5247" },
        Quantity { quantity: "marton_rtd_sum", value: marton, reference: ">= 0.5250" },
        Quantity { quantity: "uv_sum", value: uv, reference: ">= 0.5256" },
        Quantity { quantity: "uv_minus_marton", value: uv - marton, reference: "> 0" },
    ];
    w.table("bsc4", &rows)
}

fn atlas(w: &mut Writer) -> Result<()> {
    let report = example3_atlas(50, 0.02)?;
    let rows: Vec<AtlasRow> = report
        .cells
        .iter()
        .map(|c| AtlasRow {
            p: c.p,
            e: c.e,
            ordering: c.ordering,
            expected: c.expected,
            certified: c.certified,
            excluded: c.excluded,
        })
        .collect();
    w.notes.push(format!("{} of {} compared cells disagree", report.mismatches, report.compared));
    w.table("example3_atlas", &rows)
}

fn gap(w: &mut Writer, args: &ReproArgs) -> Result<()> {
    let bc = GaussianBC::scalar(Scalar {
        g: 1.0,
        n1: 1.0,
        n2: 2.0,
        power: 10.0,
        p1: args.p1.unwrap_or(0.8),
        p2: args.p2.unwrap_or(0.3),
    })?;
    let mut lambdas: Vec<f64> = sweep(w.options)?.lambdas().into_iter().filter(|l| *l > 1.0).collect();
    lambdas.push(2.0);
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let rows = lambdas
        .into_iter()
        .map(|l| {
            let g = dpc_gap(&bc, l)?;
            Ok(GapRow {
                lambda: g.lambda,
                gap: g.gap,
                superposition: g.superposition,
                dpc: g.dpc,
                corner: g.corner,
                power: g.power,
                alpha: g.alpha,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    w.table("dpc_gap", &rows)
}

pub fn run(args: &ReproArgs) -> Result<()> {
    let mut targets = args.targets.clone();
    if targets.contains(&Target::All) {
        targets = vec![Target::Fig4, Target::Fig5, Target::Bsc4, Target::Example3Atlas, Target::DpcGap];
    }
    targets.sort();
    targets.dedup();
    for p in [args.p1, args.p2].into_iter().flatten() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidModel(format!("state probability {p} outside [0, 1]")));
        }
    }
    std::fs::create_dir_all(&args.out)?;
    let mut entries = Vec::new();
    for t in targets {
        let mut w = Writer {
            dir: &args.out,
            options: &args.options,
            files: Vec::new(),
            notes: Vec::new(),
        };
        let name = match t {
            Target::Fig4 => {
                fig4(&mut w)?;
                "fig4"
            }
            Target::Fig5 => {
                fig5(&mut w, args)?;
                "fig5"
            }
            Target::Bsc4 => {
                bsc4(&mut w)?;
                "bsc4-table"
            }
            Target::Example3Atlas => {
                atlas(&mut w)?;
                "example3-atlas"
            }
            Target::DpcGap => {
                gap(&mut w, args)?;
                "dpc-gap"
            }
            Target::All => unreachable!("expanded above"),
        };
        entries.push(w.finish(name));
    }
    output::emit(
        Some(&args.out.join("manifest.json")),
        &Manifest {
            seed: args.options.seed,
            targets: entries,
        },
    )
}
