use bcregions::bc_state::{DiscreteModel, Receiver, StateBC};
use bcregions::gaussian::dpc::dpc_region;
use bcregions::gaussian::{prop1_region, Prop1Options};
use bcregions::prob::Pmf;
use bcregions::region::{RateRegion, Support, Sweep};
use bcregions::regions::{
    bec_region, blackwell_state_region, common_message_supports, finite_field_region, marton_rtd_point,
    marton_rtd_sumrate, superposition_region, tdcs_region, three_bsc_region, uv_outer_region, CommonGrid,
    MartonOptions,
};
use bcregions::search::GridSpec;
use bcregions::{Error, Result};

use crate::models::{self, BecModel, Bsc3Model, FieldModel, StatesModel};
use crate::{output, Kind, Options, RegionArgs};

pub const BLACKWELL_RESOLUTION: usize = 200;

/// Weights of rate 0 combined with every two-dimensional direction.
const COMMON_WEIGHTS: [f64; 3] = [0.0, 0.5, 1.0];

pub fn sweep(options: &Options) -> Result<Sweep> {
    options.sweep.as_deref().map(Sweep::parse).transpose().map(Option::unwrap_or_default)
}

fn grid(options: &Options, inputs: usize) -> GridSpec {
    GridSpec::default_for(inputs).with_resolution(options.resolution)
}

fn first_state(bc: &StateBC) -> Option<(f64, f64)> {
    (bc.k() == 2).then(|| (bc.state_pmf(Receiver::One)[0], bc.state_pmf(Receiver::Two)[0]))
}

fn deterministic(model: DiscreteModel) -> Result<(bcregions::bc_state::DeterministicPair, f64, f64)> {
    match model {
        DiscreteModel::Deterministic { pair, p1, p2 } => Ok((pair, p1, p2)),
        DiscreteModel::State(_) => Err(Error::InvalidModel("this kind needs a deterministic model".into())),
    }
}

pub fn compute(kind: Kind, model: &std::path::Path, options: &Options) -> Result<RateRegion> {
    let sweep = sweep(options)?;
    match kind {
        Kind::Tdcs => {
            let (pair, p1, p2) = deterministic(models::discrete(model)?)?;
            let dirs = sweep.directions(&Sweep::breakpoints(p1.max(p2), p1.min(p2)));
            tdcs_region(&pair, p1, p2, &dirs, grid(options, pair.input_size()))
        }
        Kind::Uv | Kind::Superposition => {
            let bc = models::discrete(model)?.state_bc()?;
            let breaks = first_state(&bc).map(|(a, b)| Sweep::breakpoints(a.max(b), a.min(b)));
            let dirs = sweep.directions(breaks.as_deref().unwrap_or(&[]));
            let g = grid(options, bc.input_size());
            if kind == Kind::Uv {
                uv_outer_region(&bc, &dirs, g)
            } else {
                superposition_region(&bc, &dirs, g)
            }
        }
        Kind::MartonRtd => {
            let bc = models::discrete(model)?.state_bc()?;
            let (_, params) = marton_rtd_sumrate(
                &bc,
                MartonOptions {
                    seed: options.seed,
                    ..MartonOptions::default()
                },
            )?;
            let point = marton_rtd_point(&bc, &params)?;
            let support = Support::new(vec![1.0, 1.0], point).with_params(serde_json::to_value(&params)?);
            Ok(RateRegion::from_supports(vec![support], &[]))
        }
        Kind::Bec => {
            let m: BecModel = models::read(model)?;
            bec_region(&m.eps, &Pmf::new(m.p1)?, &Pmf::new(m.p2)?, &sweep.directions(&[]))
        }
        Kind::Bsc3 => {
            let m: Bsc3Model = models::read(model)?;
            three_bsc_region(m.alpha, &Pmf::new(m.p)?, &Pmf::new(m.q)?, &sweep.directions(&[]))
        }
        Kind::Blackwell => {
            let m: StatesModel = models::read(model)?;
            let dirs = sweep.directions(&Sweep::breakpoints(m.p1, m.p2));
            blackwell_state_region(m.p1, m.p2, &dirs, options.resolution.unwrap_or(BLACKWELL_RESOLUTION))
        }
        Kind::FiniteField => {
            let m: FieldModel = models::read(model)?;
            finite_field_region(m.k, m.p1, m.p2, &sweep.directions(&Sweep::breakpoints(m.p1.max(m.p2), m.p1.min(m.p2))))
        }
        Kind::Gaussian => {
            let bc = models::gaussian(model)?;
            let opts = Prop1Options {
                seed: options.seed,
                resolution: options.resolution.unwrap_or(Prop1Options::default().resolution),
                ..Prop1Options::default()
            };
            prop1_region(&bc, &sweep.directions(&[]), &opts)
        }
        Kind::Dpc => dpc_region(&models::gaussian(model)?, &sweep.directions(&[])),
        Kind::Common => {
            let (pair, p1, p2) = deterministic(models::discrete(model)?)?;
            let mut dirs: Vec<Vec<f64>> = vec![vec![1.0, 0.0, 0.0]];
            for w in COMMON_WEIGHTS {
                dirs.extend(sweep.directions(&[]).into_iter().map(|d| vec![w, d[0], d[1]]));
            }
            let supports = common_message_supports(&pair, p1, p2, &dirs, CommonGrid::default())?;
            Ok(RateRegion::from_supports(supports, &[]))
        }
    }
}

pub fn run(args: &RegionArgs) -> Result<()> {
    let region = compute(args.kind, &args.model, &args.options)?;
    output::emit_region(args.out.as_deref(), &region, args.options.format)
}
