use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::balance::nmi;
use crate::blockmodel::fit_blockmodel;
use crate::classify::{self, PairClass};
use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::partition::{louvain_signed, spectral_signed, Partition};
use crate::rng::{self, stream};

/// Parameters of the planted signed-partition model: equal-sized groups with
/// within-group edge probabilities `P+`/`P-` and between-group probabilities
/// `eps+`/`eps-`. Each dyad carries at most one signed edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlantedParams {
    pub n: usize,
    pub groups: usize,
    pub p_pos_in: f64,
    pub p_neg_in: f64,
    pub p_pos_out: f64,
    pub p_neg_out: f64,
    pub seed: u64,
}

impl PlantedParams {
    pub fn validate(&self) -> Result<()> {
        if self.groups == 0 || self.n == 0 {
            return Err(Error::InvalidParameter(
                "need at least one group and one node".into(),
            ));
        }
        if !self.n.is_multiple_of(self.groups) {
            return Err(Error::InvalidParameter(format!(
                "n = {} not divisible by groups = {}",
                self.n, self.groups
            )));
        }
        for (name, p) in [
            ("p_pos_in", self.p_pos_in),
            ("p_neg_in", self.p_neg_in),
            ("p_pos_out", self.p_pos_out),
            ("p_neg_out", self.p_neg_out),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {p} outside [0,1]"
                )));
            }
        }
        if self.p_pos_in + self.p_neg_in > 1.0 {
            return Err(Error::InvalidParameter(
                "p_pos_in + p_neg_in <= 1 violated (one dyad carries at most one signed edge)"
                    .into(),
            ));
        }
        if self.p_pos_out + self.p_neg_out > 1.0 {
            return Err(Error::InvalidParameter(
                "p_pos_out + p_neg_out <= 1 violated (one dyad carries at most one signed edge)"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Samples a planted signed network; the returned partition is the ground
/// truth. Every dyad independently becomes a positive edge, a negative edge,
/// or stays empty, with within- or between-group probabilities.
/// Deterministic given `params.seed`.
pub fn generate_planted(params: &PlantedParams) -> Result<(SignedGraph, Partition)> {
    params.validate()?;
    let group_size = params.n / params.groups;
    let block_of = |i: u32| i as usize / group_size;
    let mut rng = rng::stream_rng(params.seed, &[stream::PLANTED]);
    let mut edges = Vec::new();
    for u in 0..params.n as u32 {
        for v in (u + 1)..params.n as u32 {
            let (p_pos, p_neg) = if block_of(u) == block_of(v) {
                (params.p_pos_in, params.p_neg_in)
            } else {
                (params.p_pos_out, params.p_neg_out)
            };
            let x: f64 = rng.random();
            if x < p_pos {
                edges.push((u, v, 1i8));
            } else if x < p_pos + p_neg {
                edges.push((u, v, -1i8));
            }
        }
    }
    let graph = SignedGraph::new(params.n, edges)?;
    let labels: Vec<u32> = (0..params.n as u32).map(|i| block_of(i) as u32).collect();
    Ok((graph, Partition::from_labels(&labels)))
}

/// Partitioners available in sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodId {
    Louvain,
    Spectral,
    Blockmodel,
    /// Returns the planted ground truth; a baseline for sweep plumbing.
    Oracle,
}

impl MethodId {
    pub fn name(self) -> &'static str {
        match self {
            MethodId::Louvain => "louvain",
            MethodId::Spectral => "spectral",
            MethodId::Blockmodel => "blockmodel",
            MethodId::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<MethodId> {
        match s {
            "louvain" => Ok(MethodId::Louvain),
            "spectral" => Ok(MethodId::Spectral),
            "blockmodel" => Ok(MethodId::Blockmodel),
            "oracle" => Ok(MethodId::Oracle),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected louvain|spectral|blockmodel|oracle)"
            ))),
        }
    }
}

const SWEEP_LOUVAIN_RESTARTS: usize = 8;
const SWEEP_BLOCKMODEL_RESTARTS: usize = 4;

/// One aggregated sweep cell.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub ratio: f64,
    pub method: String,
    pub replicates: usize,
    pub nmi_mean: f64,
    pub nmi_std: f64,
    pub balanced_frac_mean: f64,
    pub balanced_frac_std: f64,
}

/// Result grid of a `P-/P+` sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Fixed-header CSV rendering; byte-stable for a given result.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "ratio,method,replicates,nmi_mean,nmi_std,balanced_frac_mean,balanced_frac_std\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6},{:.6},{:.6}\n",
                row.ratio,
                row.method,
                row.replicates,
                row.nmi_mean,
                row.nmi_std,
                row.balanced_frac_mean,
                row.balanced_frac_std
            ));
        }
        out
    }
}

/// Fraction of community pairs classified balanced (positive channel
/// assortative, negative channel disassortative, prime or not) under `p`.
/// Partitions with fewer than two blocks score 0.
pub fn balanced_pair_fraction(g: &SignedGraph, p: &Partition, tol: f64) -> Result<f64> {
    if p.block_count() < 2 {
        return Ok(0.0);
    }
    let (relations, _) = classify::classify_all(g, p, tol)?;
    let balanced = relations
        .iter()
        .filter(|r| {
            r.pos_type == PairClass::Assortative && r.neg_type == PairClass::Disassortative
        })
        .count();
    Ok(balanced as f64 / relations.len() as f64)
}

fn run_method(g: &SignedGraph, method: MethodId, truth: &Partition, seed: u64) -> Result<Partition> {
    match method {
        MethodId::Louvain => louvain_signed(g, seed, SWEEP_LOUVAIN_RESTARTS),
        MethodId::Spectral => spectral_signed(g, truth.block_count(), seed),
        MethodId::Blockmodel => Ok(fit_blockmodel(
            g,
            2 * truth.block_count(),
            seed,
            SWEEP_BLOCKMODEL_RESTARTS,
        )?
        .partition),
        MethodId::Oracle => Ok(truth.clone()),
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Runs the planted-partition sweep: for each `P-/P+` ratio, method, and
/// replicate, generates a network (with `p_neg_in = ratio * p_pos_in`),
/// partitions it, and records NMI against the ground truth plus the balanced
/// pair fraction of the detected partition. Deterministic given `seed`.
pub fn run_sweep(
    base: &PlantedParams,
    ratios: &[f64],
    methods: &[MethodId],
    replicates: usize,
    seed: u64,
) -> Result<SweepResult> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    // Validate every cell's parameters up front so failures name the ratio.
    let mut cell_params = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        if ratio < 0.0 {
            return Err(Error::InvalidParameter(format!("negative ratio {ratio}")));
        }
        let params = PlantedParams {
            p_neg_in: ratio * base.p_pos_in,
            ..*base
        };
        params.validate().map_err(|e| {
            Error::InvalidParameter(format!("ratio {ratio}: {e}"))
        })?;
        cell_params.push(params);
    }
    let tol = classify::DEFAULT_TOL;
    let cells: Vec<(usize, usize)> = (0..ratios.len())
        .flat_map(|ri| (0..methods.len()).map(move |mi| (ri, mi)))
        .collect();
    let per_cell: Vec<Result<(Vec<f64>, Vec<f64>)>> = cells
        .par_iter()
        .map(|&(ri, mi)| {
            let mut nmis = Vec::with_capacity(replicates);
            let mut fracs = Vec::with_capacity(replicates);
            for rep in 0..replicates {
                let cell_seed = rng::derive_seed(
                    seed,
                    &[stream::SWEEP, ri as u64, mi as u64, rep as u64],
                );
                let params = PlantedParams {
                    seed: cell_seed,
                    ..cell_params[ri]
                };
                let (g, truth) = generate_planted(&params)?;
                let detected = run_method(&g, methods[mi], &truth, cell_seed)?;
                nmis.push(nmi(&detected, &truth)?);
                fracs.push(balanced_pair_fraction(&g, &detected, tol)?);
            }
            Ok((nmis, fracs))
        })
        .collect();
    let mut rows = Vec::with_capacity(cells.len());
    for (&(ri, mi), cell) in cells.iter().zip(per_cell) {
        let (nmis, fracs) = cell?;
        let (nmi_mean, nmi_std) = mean_std(&nmis);
        let (frac_mean, frac_std) = mean_std(&fracs);
        rows.push(SweepRow {
            ratio: ratios[ri],
            method: methods[mi].name().to_string(),
            replicates,
            nmi_mean,
            nmi_std,
            balanced_frac_mean: frac_mean,
            balanced_frac_std: frac_std,
        });
    }
    Ok(SweepResult { rows })
}
