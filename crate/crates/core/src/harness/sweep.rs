use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::bounds::{omega, regime_bound, TRUNCATION_A};
use crate::binomial::prob_at_least_two;
use crate::constructions::{
    build_attribute_partition, matched_er_probability, thin_with, AttrPartitionConfig, PartitionMode,
};
use crate::error::{Result, RigError};
use crate::graph::{
    model_moments, project, sample_er_with, sample_incidence_sparse_with, sample_incidence_with, Graph, RigParams,
};
use crate::modularity::{louvain, score, DEFAULT_LEVELS};
use crate::rng::{rng_from_seed, stream_seed};
use crate::stats::{e2_count, pair_cover};

/// Default cap on expected stored memberships plus clique pairs per replication.
pub const DEFAULT_MEMORY_CAP: f64 = 2e8;

/// Below this `P(V_i >= 2)` the sweep samples edges-only incidences.
const SPARSE_SWITCH: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Cor1,
    Thm2,
    Thm3,
    Thm4,
    Custom,
}

impl FromStr for Regime {
    type Err = RigError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cor1" => Ok(Self::Cor1),
            "thm2" => Ok(Self::Thm2),
            "thm3" => Ok(Self::Thm3),
            "thm4" => Ok(Self::Thm4),
            "custom" => Ok(Self::Custom),
            other => Err(RigError::InvalidParams(format!("unknown regime {other:?}"))),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cor1 => "cor1",
            Self::Thm2 => "thm2",
            Self::Thm3 => "thm3",
            Self::Thm4 => "thm4",
            Self::Custom => "custom",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub n: usize,
    pub m: usize,
    pub p: f64,
}

impl GridPoint {
    /// Parses a grid file: one `n m p` triple per line, `#` starts a comment.
    pub fn parse_grid(text: &str) -> Result<Vec<Self>> {
        let mut grid = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| RigError::Parse {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [n, m, p] = toks[..] else {
                return Err(bad("expected `n m p`"));
            };
            let n = n.parse::<f64>().map_err(|_| bad("bad n"))?;
            let m = m.parse::<f64>().map_err(|_| bad("bad m"))?;
            let p = p.parse::<f64>().map_err(|_| bad("bad p"))?;
            if n.fract() != 0.0 || m.fract() != 0.0 || n < 1.0 || m < 1.0 {
                return Err(bad("n and m must be positive integers"));
            }
            grid.push(GridPoint {
                n: n as usize,
                m: m as usize,
                p,
            });
        }
        Ok(grid)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub regime: Regime,
    pub grid: Vec<GridPoint>,
    pub reps: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub mode: PartitionMode,
    pub memory_cap: f64,
    /// Fills `runtime_ms`; off by default because timings break byte-identical reruns.
    pub record_timing: bool,
    /// Worker count; `None` falls back to `RIGMOD_THREADS`, then to rayon's default.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(regime: Regime, grid: Vec<GridPoint>, reps: usize, master_seed: u64) -> Self {
        Self {
            regime,
            grid,
            reps,
            master_seed,
            epsilon: 0.1,
            mode: PartitionMode::NonemptyExclusive,
            memory_cap: DEFAULT_MEMORY_CAP,
            record_timing: false,
            threads: None,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(RigError::InvalidParams("reps must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(RigError::InvalidParams("grid is empty".into()));
        }
        AttrPartitionConfig::new(self.epsilon, self.mode)?;
        for pt in &self.grid {
            RigParams::new(pt.n, pt.m, pt.p, 0)?;
            let needed = expected_storage(pt.n, pt.m, pt.p);
            if needed > self.memory_cap {
                return Err(RigError::BudgetExceeded {
                    needed,
                    cap: self.memory_cap,
                });
            }
        }
        Ok(())
    }

    fn worker_count(&self) -> Option<usize> {
        self.threads
            .or_else(|| std::env::var("RIGMOD_THREADS").ok()?.trim().parse().ok())
            .filter(|&t| t > 0)
    }
}

fn uses_sparse_path(n: usize, p: f64) -> bool {
    prob_at_least_two(n as u64, p) < SPARSE_SWITCH
}

/// Expected number of stored memberships plus projected clique pairs for
/// one replication at this grid point.
pub fn expected_storage(n: usize, m: usize, p: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let pairs = mf * nf * (nf - 1.0) / 2.0 * p * p;
    let memberships = if uses_sparse_path(n, p) {
        mf * nf * p * (1.0 - (1.0 - p).powf(nf - 1.0))
    } else {
        mf * nf * p + mf
    };
    memberships + pairs
}

/// One replication of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub regime: Regime,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub seed: u64,
    pub d: f64,
    pub np: f64,
    pub mp: f64,
    pub mp2: f64,
    pub p_hat: f64,
    pub edges: usize,
    pub e1: u64,
    pub e2: u64,
    pub louvain_mod: Option<f64>,
    pub attr_partition_mod: Option<f64>,
    pub er_p_bar: f64,
    pub er_louvain_mod: Option<f64>,
    pub proof_bound: Option<f64>,
    pub runtime_ms: Option<f64>,
    pub omega: f64,
    pub edges_only: bool,
    pub hat_edges: usize,
    pub delta: usize,
    pub hat_contained: bool,
    pub rep: usize,
    pub flag: &'static str,
}

pub const CSV_HEADER: &[&str] = &[
    "regime",
    "n",
    "m",
    "p",
    "seed",
    "d",
    "np",
    "mp",
    "mp2",
    "p_hat",
    "edges",
    "e1",
    "e2",
    "louvain_mod",
    "attr_partition_mod",
    "er_p_bar",
    "er_louvain_mod",
    "proof_bound",
    "runtime_ms",
    "omega",
    "edges_only",
    "hat_edges",
    "delta",
    "hat_contained",
    "rep",
    "flag",
];

/// `%.12g`-style formatting: 12 significant digits, shortest form.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl SweepRow {
    fn fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        vec![
            self.regime.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            format_sig(self.p),
            self.seed.to_string(),
            format_sig(self.d),
            format_sig(self.np),
            format_sig(self.mp),
            format_sig(self.mp2),
            format_sig(self.p_hat),
            self.edges.to_string(),
            self.e1.to_string(),
            self.e2.to_string(),
            opt(self.louvain_mod),
            opt(self.attr_partition_mod),
            format_sig(self.er_p_bar),
            opt(self.er_louvain_mod),
            opt(self.proof_bound),
            opt(self.runtime_ms),
            format_sig(self.omega),
            u8::from(self.edges_only).to_string(),
            self.hat_edges.to_string(),
            self.delta.to_string(),
            u8::from(self.hat_contained).to_string(),
            self.rep.to_string(),
            self.flag.to_string(),
        ]
    }
}

fn modularity_or_none(graph: &Graph, seed: u64) -> Result<Option<f64>> {
    if graph.edge_count() == 0 {
        return Ok(None);
    }
    Ok(Some(louvain(graph, seed, DEFAULT_LEVELS)?.score))
}

fn run_replication(config: &SweepConfig, grid_index: usize, rep: usize) -> Result<SweepRow> {
    let started = Instant::now();
    let GridPoint { n, m, p } = config.grid[grid_index];
    let seed = stream_seed(config.master_seed, &[grid_index as u64, rep as u64]);
    let mut rng = rng_from_seed(seed);
    let params = RigParams::new(n, m, p, seed)?;

    let edges_only = uses_sparse_path(n, p);
    let incidence = if edges_only {
        sample_incidence_sparse_with(&mut rng, n, m, p, true)
    } else {
        sample_incidence_with(&mut rng, n, m, p)
    };
    let g = project(&incidence);
    let cover = pair_cover(&incidence);
    let e2 = e2_count(&incidence, TRUNCATION_A)?;

    let louvain_mod = modularity_or_none(&g, seed)?;
    let attr_partition_mod = if edges_only || g.edge_count() == 0 {
        None
    } else {
        let cfg = AttrPartitionConfig::new(config.epsilon, config.mode)?;
        let ap = build_attribute_partition(&incidence, &params, &cfg)?;
        Some(score(&g, &ap.partition)?.score)
    };

    let g_hat = thin_with(&mut rng, &incidence);
    let hat_contained = g_hat.is_subgraph_of(&g);

    let er_p_bar = if n >= 2 {
        matched_er_probability(n, m, p)?.p_bar
    } else {
        0.0
    };
    let er = sample_er_with(&mut rng, n, er_p_bar);
    let er_louvain_mod = modularity_or_none(&er, seed)?;

    let w = omega(n);
    let proof_bound = regime_bound(config.regime, n, m, p, config.epsilon, w).ok();
    let moments = model_moments(n, m, p);

    Ok(SweepRow {
        regime: config.regime,
        n,
        m,
        p,
        seed,
        d: moments.d,
        np: params.np(),
        mp: params.mp(),
        mp2: params.mp() * p,
        p_hat: moments.p_hat,
        edges: g.edge_count(),
        e1: cover.double_covered,
        e2,
        louvain_mod,
        attr_partition_mod,
        er_p_bar,
        er_louvain_mod,
        proof_bound,
        runtime_ms: config.record_timing.then(|| started.elapsed().as_secs_f64() * 1e3),
        omega: w,
        edges_only,
        hat_edges: g_hat.edge_count(),
        delta: g.edge_count() - g_hat.edge_count(),
        hat_contained,
        rep,
        flag: if g.edge_count() == 0 { "empty_graph" } else { "" },
    })
}

/// Runs every replication of every grid point. Rows come back in
/// `(grid_index, rep)` order whatever the worker count.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.grid.len())
        .flat_map(|g| (0..config.reps).map(move |r| (g, r)))
        .collect();
    let run = || {
        jobs.par_iter()
            .map(|&(g, r)| run_replication(config, g, r))
            .collect::<Result<Vec<_>>>()
    };
    match config.worker_count() {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| RigError::InvalidParams(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record(row.fields())?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(1e-4), "0.0001");
        assert_eq!(format_sig(1e-6), "1e-6");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
        assert_eq!(format_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_sig(-2.5), "-2.5");
    }

    #[test]
    fn complete_graph_row() {
        let cfg = SweepConfig::new(Regime::Custom, vec![GridPoint { n: 6, m: 2, p: 1.0 }], 1, 9);
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].edges, 15);
        assert_eq!(rows[0].louvain_mod, Some(0.0));
        assert_eq!(rows[0].proof_bound, None);
        assert!(rows[0].hat_contained);
    }

    #[test]
    fn empty_graph_row_is_flagged() {
        let cfg = SweepConfig::new(Regime::Custom, vec![GridPoint { n: 20, m: 5, p: 0.0 }], 2, 9);
        let rows = run_sweep(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.flag == "empty_graph" && r.louvain_mod.is_none()));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert!(text.lines().nth(1).unwrap().ends_with(",empty_graph"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn config_validation() {
        let pt = GridPoint { n: 10, m: 10, p: 0.1 };
        assert!(SweepConfig::new(Regime::Custom, vec![], 1, 0).validate().is_err());
        assert!(SweepConfig::new(Regime::Custom, vec![pt], 0, 0).validate().is_err());
        let bad_p = GridPoint { p: 1.5, ..pt };
        assert!(SweepConfig::new(Regime::Custom, vec![bad_p], 1, 0).validate().is_err());
        let huge = GridPoint {
            n: 100_000,
            m: 1_000_000,
            p: 0.1,
        };
        assert!(matches!(
            SweepConfig::new(Regime::Custom, vec![huge], 1, 0).validate(),
            Err(RigError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn rows_do_not_depend_on_worker_count() {
        let grid = vec![
            GridPoint { n: 80, m: 60, p: 0.05 },
            GridPoint {
                n: 200,
                m: 3000,
                p: 0.001,
            },
        ];
        let mut cfg = SweepConfig::new(Regime::Custom, grid, 4, 77);
        cfg.threads = Some(1);
        let serial = run_sweep(&cfg).unwrap();
        cfg.threads = Some(3);
        let parallel = run_sweep(&cfg).unwrap();
        assert_eq!(serial, parallel);
        assert!(serial.iter().any(|r| r.edges_only) && serial.iter().any(|r| !r.edges_only));
    }

    #[test]
    fn grid_file_parsing() {
        let g = GridPoint::parse_grid("# n m p\n300 3000 0.01\n\n1e5 100 1e-4 # strong\n").unwrap();
        assert_eq!(
            g,
            vec![
                GridPoint {
                    n: 300,
                    m: 3000,
                    p: 0.01
                },
                GridPoint {
                    n: 100_000,
                    m: 100,
                    p: 1e-4
                }
            ]
        );
        assert!(GridPoint::parse_grid("1 2\n").is_err());
        assert!(GridPoint::parse_grid("1.5 2 0.1\n").is_err());
    }
}
