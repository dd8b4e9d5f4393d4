//! Data tables behind each figure.

use rayon::prelude::*;

use super::config::{ExperimentConfig, FigureId};
use crate::decoherence::{decoherent_mixing_times, decoherent_tvd_curves};
use crate::distribution::Distribution;
use crate::error::Result;
use crate::metrics::{aharonov_bound, coherent_average_tvd_curves, coherent_instantaneous_tvd_curve, MixingResult};
use crate::spectral::{binomial_profile, stationary_pi_by_weight, stationary_pi_closed};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    /// No value, e.g. a threshold not reached within the horizon.
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<usize>> for Cell {
    fn from(v: Option<usize>) -> Self {
        v.map_or(Cell::Missing, Cell::from)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let idx = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[idx]).collect())
    }
}

/// Column names of each figure's table.
pub fn columns(figure: FigureId) -> &'static [&'static str] {
    match figure {
        FigureId::PiX => &["x", "hamming_weight", "pi"],
        FigureId::HammingProfile => &["hamming_weight", "profile", "binomial", "pi_per_vertex"],
        FigureId::TvdCoherent => &[
            "t",
            "avg_tvd_stationary",
            "avg_tvd_uniform",
            "inst_tvd_stationary",
            "inst_tvd_uniform",
            "aharonov_bound",
        ],
        FigureId::MixingVsN => &[
            "n",
            "epsilon",
            "t_max",
            "average_mixing_time",
            "inst_time_stationary",
            "inst_time_uniform",
        ],
        FigureId::TvdDecoherent => &[
            "p",
            "t",
            "avg_tvd_uniform",
            "avg_tvd_uniform_se",
            "avg_tvd_stationary",
            "avg_tvd_stationary_se",
            "inst_tvd_uniform",
            "inst_tvd_uniform_se",
        ],
        FigureId::MixingVsP => &["n", "p", "epsilon", "t_max", "mixing_time"],
        FigureId::MixingVsNDeco => &["n", "p", "epsilon", "t_max", "mixing_time", "coherent_mixing_time"],
    }
}

/// Computes the table for `config.figure`. Sweep points run on the current
/// rayon pool and are emitted in configuration order.
pub fn generate(config: &ExperimentConfig) -> Result<Table> {
    let mut table = Table::new(columns(config.figure));
    match config.figure {
        FigureId::PiX => pi_x(config, &mut table)?,
        FigureId::HammingProfile => profile(config, &mut table)?,
        FigureId::TvdCoherent => tvd_coherent(config, &mut table)?,
        FigureId::MixingVsN => mixing_vs_n(config, &mut table)?,
        FigureId::TvdDecoherent => tvd_decoherent(config, &mut table)?,
        FigureId::MixingVsP => mixing_vs_p(config, &mut table)?,
        FigureId::MixingVsNDeco => mixing_vs_n_deco(config, &mut table)?,
    }
    Ok(table)
}

fn pi_x(config: &ExperimentConfig, table: &mut Table) -> Result<()> {
    let pi = stationary_pi_closed(config.n)?;
    for (x, &v) in pi.probs().iter().enumerate() {
        table.push(vec![x.into(), (x.count_ones() as usize).into(), v.into()]);
    }
    Ok(())
}

fn profile(config: &ExperimentConfig, table: &mut Table) -> Result<()> {
    let n = config.n;
    let per_weight = stationary_pi_by_weight(n)?;
    let profile = crate::spectral::hamming_profile_from_weights(&per_weight);
    let binomial = binomial_profile(n);
    for h in 0..=n {
        table.push(vec![
            h.into(),
            profile[h].into(),
            binomial[h].into(),
            per_weight[h].into(),
        ]);
    }
    Ok(())
}

fn tvd_coherent(config: &ExperimentConfig, table: &mut Table) -> Result<()> {
    let n = config.n;
    let t_max = config.horizon(n);
    let pi = stationary_pi_closed(n)?;
    let uniform = Distribution::uniform(n);
    let avg = coherent_average_tvd_curves(n, &[&pi, &uniform], t_max)?;
    let inst_pi = coherent_instantaneous_tvd_curve(n, &pi, t_max)?;
    let inst_u = coherent_instantaneous_tvd_curve(n, &uniform, t_max)?;
    for t in 1..=t_max {
        table.push(vec![
            t.into(),
            avg[0][t].into(),
            avg[1][t].into(),
            inst_pi[t].into(),
            inst_u[t].into(),
            aharonov_bound(n, t).into(),
        ]);
    }
    Ok(())
}

fn mixing_vs_n(config: &ExperimentConfig, table: &mut Table) -> Result<()> {
    let points: Vec<Result<Vec<Vec<Cell>>>> = config
        .ns
        .par_iter()
        .map(|&n| {
            let t_max = config.horizon(n);
            let pi = stationary_pi_closed(n)?;
            let uniform = Distribution::uniform(n);
            let avg = coherent_average_tvd_curves(n, &[&pi], t_max)?.remove(0);
            let inst_pi = coherent_instantaneous_tvd_curve(n, &pi, t_max)?;
            let inst_u = coherent_instantaneous_tvd_curve(n, &uniform, t_max)?;
            config
                .epsilons
                .iter()
                .map(|&eps| {
                    let m = MixingResult::from_average_curve(avg.clone(), eps)?;
                    let ip = MixingResult::from_instantaneous_curve(inst_pi.clone(), eps)?;
                    let iu = MixingResult::from_instantaneous_curve(inst_u.clone(), eps)?;
                    Ok(vec![
                        n.into(),
                        eps.into(),
                        t_max.into(),
                        m.time.into(),
                        ip.time.into(),
                        iu.time.into(),
                    ])
                })
                .collect()
        })
        .collect();
    for rows in points {
        rows?.into_iter().for_each(|r| table.push(r));
    }
    Ok(())
}

fn tvd_decoherent(config: &ExperimentConfig, table: &mut Table) -> Result<()> {
    let n = config.n;
    let pi = stationary_pi_closed(n)?;
    let uniform = Distribution::uniform(n);
    for &p in &config.ps {
        let cfg = config.ensemble(n, p);
        let curves = decoherent_tvd_curves(&cfg, &[&uniform, &pi])?;
        let [au, api] = [&curves.average[0], &curves.average[1]];
        let iu = &curves.instantaneous[0];
        for t in 1..=cfg.t_max {
            table.push(vec![
                p.into(),
                t.into(),
                au.values[t].into(),
                au.stderr[t].into(),
                api.values[t].into(),
                api.stderr[t].into(),
                iu.values[t].into(),
                iu.stderr[t].into(),
            ]);
        }
    }
    Ok(())
}

fn mixing_vs_p(config: &ExperimentConfig, table: &mut Table) -> Result<()> {
    let n = config.n;
    let points: Vec<Result<Vec<MixingResult>>> = config
        .ps
        .par_iter()
        .map(|&p| decoherent_mixing_times(&config.ensemble(n, p), &config.epsilons))
        .collect();
    for (&p, results) in config.ps.iter().zip(points) {
        for m in results? {
            table.push(vec![
                n.into(),
                p.into(),
                m.epsilon.into(),
                m.horizon.into(),
                m.time.into(),
            ]);
        }
    }
    Ok(())
}

fn mixing_vs_n_deco(config: &ExperimentConfig, table: &mut Table) -> Result<()> {
    let grid: Vec<(usize, f64)> = config
        .ns
        .iter()
        .flat_map(|&n| config.ps.iter().map(move |&p| (n, p)))
        .collect();
    let points: Vec<Result<Vec<Vec<Cell>>>> = grid
        .par_iter()
        .map(|&(n, p)| {
            let cfg = config.ensemble(n, p);
            let deco = decoherent_mixing_times(&cfg, &config.epsilons)?;
            let pi = stationary_pi_closed(n)?;
            let coh = coherent_average_tvd_curves(n, &[&pi], cfg.t_max)?.remove(0);
            deco.into_iter()
                .map(|m| {
                    let c = MixingResult::from_average_curve(coh.clone(), m.epsilon)?;
                    Ok(vec![
                        n.into(),
                        p.into(),
                        m.epsilon.into(),
                        m.horizon.into(),
                        m.time.into(),
                        c.time.into(),
                    ])
                })
                .collect()
        })
        .collect();
    for rows in points {
        rows?.into_iter().for_each(|r| table.push(r));
    }
    Ok(())
}
