//! Module pipelines behind each job kind.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use spinlab_core::models::{build_chain, build_kerr};
use spinlab_core::{Boundary, ChainSpec, KerrSpec};
use spinlab_hpa::{classify_phase, evaluate_point, region_components, PhaseLabel, Rates};
use spinlab_liouville::{lobe_weights, observables, spectrum, steady_state, tail_mass, vectorize, SpectrumOptions, Strategy};
use spinlab_meanfield::{cmf_solve, integrate_mf, Bias, CmfSpec, MfOptions, MfParams, MfState};
use spinlab_quench::{stability_map, QuenchParams};
use spinlab_twa::{correlation_fit, run_ensemble, symmetry_restoration_time, InitialSpec, TwaConfig};

use crate::config::*;
use crate::error::{CliError, CliResult};
use crate::svg::{category_raster, xy_plot, Mark, Series};
use crate::table::{Field, Table};

/// Sectors above this dimension are handled by shift-invert Arnoldi in
/// the gap scans, which only need the slowest modes.
const DENSE_LIMIT: usize = 512;

/// A grid point whose module call failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub index: usize,
    pub point: BTreeMap<String, f64>,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct JobOutput {
    /// `(file stem, table)`.
    pub tables: Vec<(String, Table)>,
    /// `(file stem, svg text)`.
    pub plots: Vec<(String, String)>,
    pub total_points: usize,
    pub errors: Vec<PointError>,
}

impl JobOutput {
    fn table(&mut self, stem: &str, table: Table) {
        self.tables.push((stem.to_string(), table));
    }

    fn plot(&mut self, stem: &str, svg: String) {
        self.plots.push((stem.to_string(), svg));
    }
}

/// Maps `f` over `points` in parallel; results keep the point order.
fn sweep<P, R, F>(points: &[P], f: F) -> Vec<Result<R, String>>
where
    P: Sync,
    R: Send,
    F: Fn(&P) -> Result<R, String> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

/// Splits sweep results into successes and recorded point errors.
fn collect<P, R>(
    out: &mut JobOutput,
    points: &[P],
    results: Vec<Result<R, String>>,
    describe: impl Fn(&P) -> BTreeMap<String, f64>,
) -> Vec<(usize, R)> {
    out.total_points += points.len();
    let mut ok = Vec::new();
    for (index, (p, r)) in points.iter().zip(results).enumerate() {
        match r {
            Ok(v) => ok.push((index, v)),
            Err(message) => out.errors.push(PointError { index, point: describe(p), message }),
        }
    }
    ok
}

fn named(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn execute(cfg: &JobConfig) -> CliResult<JobOutput> {
    let mut out = JobOutput::default();
    match &cfg.model {
        Model::PhaseDiagram(m) => phase_diagram(cfg, m.h, None, &mut out),
        Model::HpaScan(m) => phase_diagram(cfg, m.h, Some(m.lattice), &mut out),
        Model::DimerExact(m) => dimer_exact(cfg, m, &mut out),
        Model::Kerr(m) => kerr(cfg, m, &mut out),
        Model::Spectrum(m) => spectrum_job(cfg, m, &mut out)?,
        Model::Meanfield(m) => meanfield(cfg, m, &mut out),
        Model::Cmf(m) => cmf(cfg, m, &mut out),
        Model::Twa(m) => twa(cfg, m, &mut out)?,
        Model::QuenchMap(m) => quench(cfg, m, &mut out),
    }
    Ok(out)
}

fn orientation_name(sign: f64) -> &'static str {
    if sign > 0.0 {
        "up"
    } else {
        "down"
    }
}

/// Phase raster over `(gamma_g, gamma_l)`; with `hpa = Some(lattice)` every
/// pixel also carries the fluctuation-theory observables.
fn phase_diagram(cfg: &JobConfig, h: f64, hpa: Option<bool>, out: &mut JobOutput) {
    let gg = cfg.grid("gamma_g").values();
    let gl = cfg.grid("gamma_l").values();
    let labels: Vec<Vec<PhaseLabel>> = gg.iter().map(|&a| gl.iter().map(|&b| classify_phase(a, b, 1.0, h)).collect()).collect();
    let points: Vec<(f64, f64)> = gg.iter().flat_map(|&a| gl.iter().map(move |&b| (a, b))).collect();
    match hpa {
        None => {
            out.total_points += points.len();
            let mut t = Table::new(&["gamma_g", "gamma_l", "phase"]);
            for (i, &a) in gg.iter().enumerate() {
                for (j, &b) in gl.iter().enumerate() {
                    t.push(vec![a.into(), b.into(), labels[i][j].name().into()]);
                }
            }
            out.table("phases", t);
        }
        Some(lattice) => {
            let results = sweep(&points, |&(a, b)| Ok(evaluate_point(&Rates::new(a, b, 1.0, h), lattice)));
            let rows = collect(out, &points, results, |&(a, b)| named(&[("gamma_g", a), ("gamma_l", b)]));
            let mut t = Table::new(&[
                "gamma_g", "gamma_l", "phase", "orientation_a", "orientation_b", "n_a", "n_b", "xi", "purity", "negativity",
            ]);
            for (_, p) in rows {
                let (oa, ob): (Field, Field) = match &p.magnetizations {
                    Some(m) => (orientation_name(m.orientation_a.sign()).into(), orientation_name(m.orientation_b.sign()).into()),
                    None => (Field::Empty, Field::Empty),
                };
                t.push(vec![
                    p.gamma_g.into(),
                    p.gamma_l.into(),
                    p.phase.clone().into(),
                    oa,
                    ob,
                    p.occupations.map(|o| o.0).into(),
                    p.occupations.map(|o| o.1).into(),
                    p.xi.into(),
                    p.purity.into(),
                    p.negativity.into(),
                ]);
            }
            out.table("hpa", t);
        }
    }
    let mut regions = Table::new(&["phase", "components"]);
    for (name, count) in region_components(&labels) {
        regions.push(vec![name.into(), count.into()]);
    }
    out.table("regions", regions);
    if cfg.output.svg {
        let names: Vec<Vec<String>> = labels.iter().map(|row| row.iter().map(PhaseLabel::name).collect()).collect();
        out.plot("phases", category_raster(&format!("phases at h = {h}"), "gamma_g / g", "gamma_l / g", &gg, &gl, &names));
    }
}

struct DimerRow {
    gap: Option<(f64, i64)>,
    purity: f64,
    impurity: f64,
    order: f64,
    sz: (f64, f64),
    residual: f64,
}

fn dimer_point(s: f64, gamma_g: f64, gamma_l: f64, with_spectrum: bool) -> Result<DimerRow, String> {
    if gamma_g < 0.0 || gamma_l < 0.0 {
        return Err(format!("negative rate (gamma_g = {gamma_g}, gamma_l = {gamma_l})"));
    }
    let model = build_chain(&ChainSpec::dimer(s, 1.0, gamma_g, gamma_l)).map_err(|e| e.to_string())?;
    let l = vectorize(&model).map_err(|e| e.to_string())?;
    let st = steady_state(&l).map_err(|e| e.to_string())?;
    let obs = observables(&st, &model).map_err(|e| e.to_string())?;
    let gap = if with_spectrum {
        let mut opts = SpectrumOptions::new(6, Strategy::Auto);
        opts.per_sector = 6;
        opts.dense_limit = DENSE_LIMIT;
        let res = spectrum(&l, opts).map_err(|e| e.to_string())?;
        Some((res.gap, res.gap_sector))
    } else {
        None
    };
    Ok(DimerRow {
        gap,
        purity: obs.purity,
        impurity: obs.impurity,
        order: obs.order_parameter.unwrap_or(f64::NAN),
        sz: (obs.magnetization[0][2], obs.magnetization[1][2]),
        residual: st.residual,
    })
}

fn dimer_exact(cfg: &JobConfig, m: &DimerModel, out: &mut JobOutput) {
    let gbar = cfg.grid("gamma_bar").values();
    let points: Vec<(f64, f64)> = m.s.iter().flat_map(|&s| gbar.iter().map(move |&g| (s, g))).collect();
    let dg = m.delta_gamma;
    let results = sweep(&points, |&(s, g)| dimer_point(s, g + dg / 2.0, g - dg / 2.0, m.spectrum));
    let rows = collect(out, &points, results, |&(s, g)| named(&[("s", s), ("gamma_bar", g)]));
    let mut t = Table::new(&[
        "s", "gamma_bar", "gamma_g", "gamma_l", "gap", "gap_sector", "purity", "impurity", "scaled_impurity", "order_parameter", "sz_a", "sz_b",
        "residual",
    ]);
    let mut gap_series: Vec<Series> = Vec::new();
    let mut mix_series: Vec<Series> = Vec::new();
    for (index, r) in rows {
        let (s, g) = points[index];
        let scaled = r.impurity / (2.0 * s + 1.0).powi(2);
        t.push(vec![
            s.into(),
            g.into(),
            (g + dg / 2.0).into(),
            (g - dg / 2.0).into(),
            r.gap.map(|x| x.0).into(),
            r.gap.map_or(Field::Empty, |x| x.1.into()),
            r.purity.into(),
            r.impurity.into(),
            scaled.into(),
            r.order.into(),
            r.sz.0.into(),
            r.sz.1.into(),
            r.residual.into(),
        ]);
        let name = format!("S = {s}");
        if gap_series.last().map_or(true, |x| x.name != name) {
            gap_series.push(Series { name: name.clone(), points: Vec::new() });
            mix_series.push(Series { name, points: Vec::new() });
        }
        if let Some((gap, _)) = r.gap {
            gap_series.last_mut().unwrap().points.push((g, gap));
        }
        mix_series.last_mut().unwrap().points.push((g, scaled));
    }
    out.table("dimer", t);
    if cfg.output.svg {
        if m.spectrum {
            out.plot("gap", xy_plot("Liouvillian gap", "gamma_bar / g", "gap / g", &gap_series, Mark::Line));
        }
        out.plot("impurity", xy_plot("scaled impurity", "gamma_bar / g", "I / (2S+1)^2", &mix_series, Mark::Line));
    }
}

struct KerrRow {
    gap: f64,
    near_zero: usize,
    photon_number: f64,
    purity: f64,
    lobes: Option<(f64, f64)>,
    tail: f64,
    distribution: Vec<f64>,
}

fn kerr_point(m: &KerrModel, f: f64) -> Result<KerrRow, String> {
    let mut spec = KerrSpec::with_default_cutoff(m.delta, m.u, f, m.gamma, m.d);
    if let Some(c) = m.cutoff {
        spec.cutoff = c;
    }
    let model = build_kerr(&spec).map_err(|e| e.to_string())?;
    let l = vectorize(&model).map_err(|e| e.to_string())?;
    let mut opts = SpectrumOptions::new(6, Strategy::Auto);
    opts.per_sector = 6;
    opts.dense_limit = DENSE_LIMIT;
    let res = spectrum(&l, opts).map_err(|e| e.to_string())?;
    let st = steady_state(&l).map_err(|e| e.to_string())?;
    let obs = observables(&st, &model).map_err(|e| e.to_string())?;
    let p = obs.photon_distribution.unwrap_or_default();
    Ok(KerrRow {
        gap: res.gap,
        near_zero: res.count_near_zero(m.near_zero_tol * m.gamma),
        photon_number: obs.photon_number.unwrap_or(f64::NAN),
        purity: obs.purity,
        lobes: lobe_weights(&p),
        tail: tail_mass(&p, spec.cutoff.saturating_sub(spec.cutoff / 10)),
        distribution: p,
    })
}

fn kerr(cfg: &JobConfig, m: &KerrModel, out: &mut JobOutput) {
    let drives = cfg.grid("f").values();
    let results = sweep(&drives, |&f| kerr_point(m, f));
    let rows = collect(out, &drives, results, |&f| named(&[("f", f)]));
    let mut t = Table::new(&["f", "f_over_gamma", "gap", "near_zero", "photon_number", "purity", "lobe_low", "lobe_high", "tail_mass"]);
    let mut dist = Table::new(&["f", "n", "probability"]);
    let mut gaps = Series { name: "gap".into(), points: Vec::new() };
    for (index, r) in rows {
        let f = drives[index];
        t.push(vec![
            f.into(),
            (f / m.gamma).into(),
            r.gap.into(),
            r.near_zero.into(),
            r.photon_number.into(),
            r.purity.into(),
            r.lobes.map(|l| l.0).into(),
            r.lobes.map(|l| l.1).into(),
            r.tail.into(),
        ]);
        gaps.points.push((f / m.gamma, r.gap.max(1e-300).log10()));
        if m.distributions {
            for (n, p) in r.distribution.iter().enumerate() {
                dist.push(vec![f.into(), n.into(), (*p).into()]);
            }
        }
    }
    out.table("kerr", t);
    if m.distributions {
        out.table("photon_distribution", dist);
    }
    if cfg.output.svg {
        out.plot("gap", xy_plot("Kerr Liouvillian gap", "F / gamma", "log10(gap / gamma)", &[gaps], Mark::Line));
    }
}

fn spectrum_job(cfg: &JobConfig, m: &SpectrumModel, out: &mut JobOutput) -> CliResult<()> {
    out.total_points = 1;
    let spec = ChainSpec {
        n_cells: m.n_cells,
        s: m.s,
        g: 1.0,
        h: m.h,
        gamma_g: m.gamma_g,
        gamma_l: m.gamma_l,
        boundary: if m.periodic { Boundary::Periodic } else { Boundary::Open },
    };
    spec.validate().map_err(|e| CliError::Config(format!("model: {e}")))?;
    let strategy = match m.strategy {
        StrategyName::Auto => Strategy::Auto,
        StrategyName::Dense => Strategy::Dense,
        StrategyName::ShiftInvert => Strategy::ShiftInvert,
    };
    let result = build_chain(&spec)
        .map_err(|e| e.to_string())
        .and_then(|model| vectorize(&model).map_err(|e| e.to_string()))
        .and_then(|l| {
            let mut opts = SpectrumOptions::new(m.k, strategy);
            opts.per_sector = m.k.max(6);
            spectrum(&l, opts).map_err(|e| e.to_string())
        });
    let res = match result {
        Ok(r) => r,
        Err(message) => {
            out.errors.push(PointError { index: 0, point: BTreeMap::new(), message });
            return Ok(());
        }
    };
    let mut t = Table::new(&["index", "re", "im", "sector"]);
    for (i, (z, q)) in res.eigenvalues.iter().zip(&res.sectors).enumerate() {
        t.push(vec![i.into(), z.re.into(), z.im.into(), (*q).into()]);
    }
    out.table("spectrum", t);
    let mut summary = Table::new(&["key", "value"]);
    summary.push(vec!["gap".into(), res.gap.into()]);
    summary.push(vec!["gap_sector".into(), res.gap_sector.into()]);
    summary.push(vec!["complete".into(), res.complete.into()]);
    out.table("summary", summary);
    if cfg.output.svg {
        let pts = Series { name: "eigenvalues".into(), points: res.eigenvalues.iter().map(|z| (z.re, z.im)).collect() };
        out.plot("spectrum", xy_plot("Liouvillian spectrum", "Re lambda / g", "Im lambda / g", &[pts], Mark::Dots));
    }
    Ok(())
}

fn meanfield(cfg: &JobConfig, m: &MeanfieldModel, out: &mut JobOutput) {
    let gbar = cfg.grid("gamma_bar").values();
    let dg = m.delta_gamma;
    let results = sweep(&gbar, |&g| {
        let p = MfParams { s: m.s, g: 1.0, h: m.h, gamma_g: g + dg / 2.0, gamma_l: g - dg / 2.0 };
        integrate_mf(MfState::tilted(m.s, m.theta_a, m.theta_b), &p, m.t_max, MfOptions::default()).map_err(|e| e.to_string())
    });
    let rows = collect(out, &gbar, results, |&g| named(&[("gamma_bar", g)]));
    let mut t = Table::new(&["gamma_bar", "gamma_g", "gamma_l", "kind_a", "kind_b", "s_perp_a", "s_perp_b", "sz_a", "sz_b", "period_b"]);
    let (mut perp, mut sz) = (
        vec![Series { name: "a".into(), points: vec![] }, Series { name: "b".into(), points: vec![] }],
        vec![Series { name: "a".into(), points: vec![] }, Series { name: "b".into(), points: vec![] }],
    );
    for (index, tr) in rows {
        let g = gbar[index];
        let mean = tr.tail_mean;
        let (pa, pb) = mean.transverse();
        let (pa, pb, za, zb) = (pa / m.s, pb / m.s, mean.0[2] / m.s, mean.0[5] / m.s);
        t.push(vec![
            g.into(),
            (g + dg / 2.0).into(),
            (g - dg / 2.0).into(),
            format!("{:?}", tr.kind_a).into(),
            format!("{:?}", tr.kind_b).into(),
            pa.into(),
            pb.into(),
            za.into(),
            zb.into(),
            tr.period_b.into(),
        ]);
        perp[0].points.push((g, pa));
        perp[1].points.push((g, pb));
        sz[0].points.push((g, za));
        sz[1].points.push((g, zb));
    }
    out.table("meanfield", t);
    if cfg.output.svg {
        out.plot("s_perp", xy_plot("mean-field transverse order", "gamma_bar / g", "|S_perp| / S", &perp, Mark::Line));
        out.plot("sz", xy_plot("mean-field magnetization", "gamma_bar / g", "S^z / S", &sz, Mark::Line));
    }
}

fn cmf(cfg: &JobConfig, m: &CmfModel, out: &mut JobOutput) {
    let gbar = cfg.grid("gamma_bar").values();
    let points: Vec<(usize, f64)> = m.n_c.iter().flat_map(|&n| gbar.iter().map(move |&g| (n, g))).collect();
    let results = sweep(&points, |&(n_c, g)| {
        let mut spec = if m.transformed { CmfSpec::transformed(n_c, m.s, 1.0, g) } else { CmfSpec::untransformed(n_c, m.s, 1.0, m.h, g, g) };
        spec.window = m.window;
        spec.tol = m.tol;
        spec.max_windows = m.max_windows;
        cmf_solve(&spec, Bias::Tilt { theta: m.tilt, phi: 0.0 }).map_err(|e| e.to_string())
    });
    let rows = collect(out, &points, results, |&(n, g)| named(&[("n_c", n as f64), ("gamma_bar", g)]));
    let mut t = Table::new(&["n_c", "gamma_bar", "s_perp", "s_perp_over_s", "sz_gain", "sz_loss", "windows", "last_change", "time"]);
    let mut series: Vec<Series> = Vec::new();
    for (index, r) in rows {
        let (n_c, g) = points[index];
        let step = if r.transformed { 1 } else { 2 };
        let mean = |sites: Vec<f64>| if sites.is_empty() { None } else { Some(sites.iter().sum::<f64>() / sites.len() as f64) };
        let sz_gain = mean(r.s_z.iter().step_by(step).copied().collect());
        let sz_loss = if r.transformed { None } else { mean(r.s_z.iter().skip(1).step_by(2).copied().collect()) };
        t.push(vec![
            n_c.into(),
            g.into(),
            r.s_perp.into(),
            (r.s_perp / m.s).into(),
            sz_gain.into(),
            sz_loss.into(),
            r.windows.into(),
            r.last_change.into(),
            r.time.into(),
        ]);
        let name = format!("n_c = {n_c}");
        if series.last().map_or(true, |x| x.name != name) {
            series.push(Series { name, points: Vec::new() });
        }
        series.last_mut().unwrap().points.push((g, r.s_perp / m.s));
    }
    out.table("cmf", t);
    if cfg.output.svg {
        out.plot("s_perp", xy_plot("cluster mean-field transverse order", "gamma_bar / g", "|S_perp| / S", &series, Mark::Line));
    }
}

/// Builds the trajectory-ensemble configuration of a twa job.
pub fn twa_config(m: &TwaModel, seed: u64) -> CliResult<TwaConfig> {
    let mut c = TwaConfig::new(m.n_cells, m.s, 1.0, m.h, m.gamma_g, m.gamma_l);
    c.n_traj = m.n_traj;
    if let Some(dt) = m.dt {
        c.dt = dt;
    }
    c.t_max = m.t_max;
    c.seed = seed;
    c.periodic = m.periodic;
    c.scheme = m.scheme;
    c.noise = m.noise;
    c.sampling = m.sampling;
    c.steady_from = m.steady_from.unwrap_or(m.t_max / 2.0);
    c.record_every = ((m.record_dt / c.dt).round() as usize).max(1);
    c.validate().map_err(|e| CliError::Config(format!("model: {e}")))?;
    Ok(c)
}

fn twa(cfg: &JobConfig, m: &TwaModel, out: &mut JobOutput) -> CliResult<()> {
    let c = twa_config(m, cfg.seed)?;
    out.total_points = 1;
    let fail = |out: &mut JobOutput, message: String| out.errors.push(PointError { index: 0, point: BTreeMap::new(), message });
    match m.mode {
        TwaMode::Steady => {
            let initial = InitialSpec::Sublattice { a: (m.theta_a, m.phi_a), b: (m.theta_b, m.phi_b) };
            let series = match run_ensemble(&c, &initial) {
                Ok(s) => s,
                Err(e) => {
                    fail(out, e.to_string());
                    return Ok(());
                }
            };
            let mut t = Table::new(&["t", "observable", "mean", "stderr"]);
            let columns = [
                ("sz_a", &series.sz_a),
                ("sz_b", &series.sz_b),
                ("var_sz_a", &series.var_sz_a),
                ("var_sz_b", &series.var_sz_b),
                ("s_perp_a", &series.s_perp_a),
                ("s_perp_b", &series.s_perp_b),
            ];
            for (k, &time) in series.times.iter().enumerate() {
                for (name, col) in &columns {
                    t.push(vec![time.into(), (*name).into(), col[k].mean.into(), col[k].stderr.into()]);
                }
            }
            out.table("series", t);
            let mut corr = Table::new(&["separation", "re", "im", "stderr"]);
            for p in &series.steady_correlator {
                corr.push(vec![p.separation.into(), p.mean.re.into(), p.mean.im.into(), p.stderr.into()]);
            }
            out.table("correlator", corr);
            let mut summary = Table::new(&["key", "value", "stderr"]);
            summary.push(vec!["sz_a".into(), series.steady_sz[0].mean.into(), series.steady_sz[0].stderr.into()]);
            summary.push(vec!["sz_b".into(), series.steady_sz[1].mean.into(), series.steady_sz[1].stderr.into()]);
            summary.push(vec!["var_sz_a".into(), series.steady_var_sz[0].mean.into(), series.steady_var_sz[0].stderr.into()]);
            summary.push(vec!["var_sz_b".into(), series.steady_var_sz[1].mean.into(), series.steady_var_sz[1].stderr.into()]);
            match correlation_fit(&series) {
                Ok(fit) => {
                    summary.push(vec!["xi".into(), fit.xi.into(), Field::Empty]);
                    summary.push(vec!["xi_r2".into(), fit.r2.into(), Field::Empty]);
                }
                Err(e) => summary.push(vec!["xi".into(), Field::Empty, e.to_string().into()]),
            }
            summary.push(vec!["steady_from".into(), series.steady_window.0.into(), Field::Empty]);
            summary.push(vec!["steady_to".into(), series.steady_window.1.into(), Field::Empty]);
            summary.push(vec!["n_traj".into(), series.n_traj.into(), Field::Empty]);
            summary.push(vec!["excluded".into(), series.excluded.into(), Field::Empty]);
            out.table("summary", summary);
            if cfg.output.svg {
                let pick = |name: &str, col: &[spinlab_twa::Stat]| Series {
                    name: name.into(),
                    points: series.times.iter().zip(col).map(|(t, s)| (*t, s.mean / m.s)).collect(),
                };
                out.plot(
                    "sz",
                    xy_plot("sublattice magnetization", "t g", "S^z / S", &[pick("a", &series.sz_a), pick("b", &series.sz_b)], Mark::Line),
                );
                let c = Series {
                    name: "|C(d)|".into(),
                    points: series.steady_correlator.iter().map(|p| (p.separation as f64, p.mean.norm().max(1e-300).log10())).collect(),
                };
                out.plot("correlator", xy_plot("steady correlator", "d", "log10 |C(d)|", &[c], Mark::Dots));
            }
        }
        TwaMode::Restoration => {
            let r = match symmetry_restoration_time(&c, &InitialSpec::x_polarized()) {
                Ok(r) => r,
                Err(e) => {
                    fail(out, e.to_string());
                    return Ok(());
                }
            };
            let mut t = Table::new(&["t", "s_perp"]);
            for (time, v) in r.times.iter().zip(&r.s_perp) {
                t.push(vec![(*time).into(), (*v).into()]);
            }
            out.table("restoration", t);
            let mut summary = Table::new(&["key", "value"]);
            summary.push(vec!["tau".into(), r.tau.into()]);
            summary.push(vec!["tau_stderr".into(), r.stderr.into()]);
            summary.push(vec!["censored".into(), r.censored.into()]);
            out.table("summary", summary);
            if cfg.output.svg {
                let s = Series { name: "|<S+_a>|".into(), points: r.times.iter().zip(&r.s_perp).map(|(t, v)| (*t, *v / m.s)).collect() };
                out.plot("restoration", xy_plot("transverse polarization", "t g", "|S_perp| / S", &[s], Mark::Line));
            }
        }
    }
    Ok(())
}

fn quench(cfg: &JobConfig, m: &QuenchModel, out: &mut JobOutput) {
    out.total_points = 1;
    let params = QuenchParams { gamma_g: m.gamma_g, gamma_l: m.gamma_l, g: 1.0, h: m.h, periodic: m.periodic };
    let map = match stability_map(&params, m.n_cells, false) {
        Ok(map) => map,
        Err(e) => {
            out.errors.push(PointError { index: 0, point: BTreeMap::new(), message: e.to_string() });
            return;
        }
    };
    let mut t = Table::new(&["configuration", "index", "mu_re", "mu_im", "class"]);
    let mut by_class: BTreeMap<&str, Series> = BTreeMap::new();
    for r in &map.records {
        t.push(vec![
            r.configuration.to_string().into(),
            (r.configuration.index() as i64).into(),
            r.mu_max.re.into(),
            r.mu_max.im.into(),
            r.class.name().into(),
        ]);
        by_class
            .entry(r.class.name())
            .or_insert_with(|| Series { name: r.class.name().into(), points: Vec::new() })
            .points
            .push((r.mu_max.re, r.mu_max.im));
    }
    out.table("quench", t);
    let mut summary = Table::new(&["class", "count"]);
    summary.push(vec!["stable".into(), map.counts.stable.into()]);
    summary.push(vec!["neutral".into(), map.counts.neutral.into()]);
    summary.push(vec!["unstable".into(), map.counts.unstable.into()]);
    out.table("summary", summary);
    if cfg.output.svg {
        let series: Vec<Series> = by_class.into_values().collect();
        out.plot("quench", xy_plot("largest fluctuation eigenvalue", "Re mu_max / g", "Im mu_max / g", &series, Mark::Dots));
    }
}
