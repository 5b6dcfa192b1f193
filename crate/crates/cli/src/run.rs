//! The verbs. Each frequency point is computed independently on a bounded
//! thread pool; files are written afterwards in frequency order.

use crate::config::{CascadeConfig, Format, RunConfig, SystemConfig, ToleranceConfig};
use crate::csvio::{num, write_matrix, write_rect, write_table};
use crate::error::{CliError, Result};
use crate::report::{CascadeErrors, PointReport, Provenance, RunReport};
use crate::systems::{build_cascade, build_system, propagating_guide_modes, CascadeParts};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use wsdelay::cascade::{cascade_against, QuadratureSettings};
use wsdelay::linalg::{block, hermiticity_residual, permute_symmetric, relative_difference, select};
use wsdelay::modes::{mode_profile, Family, ModeSpec, Transverse};
use wsdelay::reference::{fd_s_prime, FdConfig};
use wsdelay::ws::{
    gamma, gamma_residual, i_r_permutation, identity_report, q_tilde_converged, s_prime_from_q, spatial_shift,
    ws_modes, IdentityReport, Tolerances, WsModes,
};
use wsdelay::CMat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Modes,
    Wsq,
    Wsmodes,
    Cascade,
    Convergence,
    Verify,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Modes => "modes",
            Verb::Wsq => "wsq",
            Verb::Wsmodes => "wsmodes",
            Verb::Cascade => "cascade",
            Verb::Convergence => "convergence",
            Verb::Verify => "verify",
        }
    }
}

pub struct Context {
    pub cfg: RunConfig,
    pub config_text: String,
    pub out: PathBuf,
    pub jobs: usize,
}

impl Context {
    fn quad(&self) -> QuadratureSettings {
        QuadratureSettings {
            tol: self.cfg.tolerances.quadrature,
            ..QuadratureSettings::default()
        }
    }

    fn tol(&self) -> ToleranceConfig {
        self.cfg.tolerances
    }

    fn system(&self) -> Result<&SystemConfig> {
        self.cfg
            .system
            .as_ref()
            .ok_or_else(|| CliError::Config("this verb needs a [system] table".into()))
    }

    fn cascade(&self) -> Result<&CascadeConfig> {
        self.cfg
            .cascade
            .as_ref()
            .ok_or_else(|| CliError::Config("this verb needs a [cascade] table".into()))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn csv(&self) -> bool {
        self.cfg.output.wants(Format::Csv)
    }

    /// Map `f` over the frequency list on the configured pool, in order.
    fn sweep<T: Send>(&self, f: impl Fn(f64) -> Result<T> + Sync) -> Result<Vec<T>> {
        let freqs = self.cfg.frequencies()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .map_err(|e| CliError::Pool(e.to_string()))?;
        pool.install(|| freqs.par_iter().map(|&hz| f(hz)).collect())
    }

    fn finish(&self, verb: Verb, points: Vec<PointReport>) -> Result<bool> {
        let report = RunReport::new(Provenance::new(verb.name(), &self.config_text), self.tol(), points)?;
        if self.cfg.output.wants(Format::Json) {
            report.write(&self.path("report.json"))?;
        }
        Ok(report.pass)
    }
}

fn omega(hz: f64) -> f64 {
    2.0 * PI * hz
}

fn labels(modes: &[ModeSpec]) -> Vec<String> {
    modes.iter().map(|m| m.label()).collect()
}

/// Validate everything that can fail before any solve: build each system
/// at each frequency.
pub fn preflight(ctx: &Context, verb: Verb) -> Result<()> {
    for hz in ctx.cfg.frequencies()? {
        let w = omega(hz);
        match verb {
            Verb::Cascade => {
                build_cascade(ctx.cascade()?, w, None)?;
            }
            Verb::Convergence if ctx.cfg.cascade.is_some() => {
                for &m in &shared_counts(ctx)? {
                    build_cascade(ctx.cascade()?, w, Some(m))?;
                }
            }
            Verb::Verify => {
                if let Some(s) = &ctx.cfg.system {
                    build_system(s, w)?;
                }
                if let Some(c) = &ctx.cfg.cascade {
                    build_cascade(c, w, None)?;
                }
            }
            _ => {
                build_system(ctx.system()?, w)?;
            }
        }
    }
    Ok(())
}

pub fn run(ctx: &Context, verb: Verb) -> Result<bool> {
    preflight(ctx, verb)?;
    std::fs::create_dir_all(&ctx.out).map_err(|e| CliError::io(&ctx.out, e))?;
    match verb {
        Verb::Modes => cmd_modes(ctx),
        Verb::Wsq => cmd_wsq(ctx, true),
        Verb::Wsmodes => cmd_wsmodes(ctx),
        Verb::Cascade => cmd_cascade(ctx),
        Verb::Convergence => cmd_convergence(ctx),
        Verb::Verify => cmd_verify(ctx),
    }
}

fn cmd_modes(ctx: &Context) -> Result<bool> {
    let sys = ctx.system()?;
    let snaps = ctx.sweep(|hz| {
        let solved = build_system(sys, omega(hz))?.solve(omega(hz))?;
        Ok((hz, solved.snapshot().modes.clone()))
    })?;
    let mut rows = Vec::new();
    println!(
        "{:>12} {:>4} {:>10} {:>4} {:>14} {:>24} {:>24} {:>12}",
        "freq_hz", "port", "mode", "fam", "cutoff_rad_m", "beta_rad_m", "z_ohm", "class"
    );
    for (hz, modes) in &snaps {
        for m in modes {
            println!(
                "{:>12.6e} {:>4} {:>10} {:>4} {:>14.6e} {:>24} {:>24} {:>12}",
                hz,
                m.port_id,
                m.index.to_string(),
                m.family.to_string(),
                m.cutoff,
                format!("{:.6e}{:+.6e}j", m.beta.re, m.beta.im),
                format!("{:.6e}{:+.6e}j", m.impedance.re, m.impedance.im),
                m.class.to_string()
            );
            rows.push(vec![
                num(*hz),
                m.port_id.to_string(),
                m.family.to_string(),
                m.index.to_string(),
                num(m.cutoff),
                num(m.beta.re),
                num(m.beta.im),
                num(m.impedance.re),
                num(m.impedance.im),
                m.class.to_string(),
            ]);
        }
    }
    if ctx.csv() {
        write_table(
            &ctx.path("modes.csv"),
            &[
                "freq_hz", "port", "family", "index", "cutoff_rad_m", "beta_re", "beta_im", "z_re", "z_im", "class",
            ],
            &rows,
        )?;
    }
    let points = snaps
        .iter()
        .map(|(hz, modes)| PointReport {
            freq_hz: *hz,
            modes: modes.len(),
            propagating: modes.iter().filter(|m| m.is_propagating()).count(),
            pass: true,
            ..Default::default()
        })
        .collect();
    ctx.finish(Verb::Modes, points)
}

/// Everything computed for one frequency of a single system.
struct WsPoint {
    report: PointReport,
    identity: IdentityReport,
    fd: CMat,
    s_prime_gamma: Option<CMat>,
    modes: Option<WsModes>,
}

fn ws_point(ctx: &Context, sys: &SystemConfig, hz: f64) -> Result<WsPoint> {
    let w = omega(hz);
    let tol = ctx.tol();
    let quad = ctx.quad();
    let built = build_system(sys, w)?;
    let solved = built.solve(w)?;
    let qr = q_tilde_converged(solved.provider(), quad.base, quad.tol, quad.max_order)?;
    let identity = identity_report(solved.snapshot(), &qr.q)?;
    let fd = permute_symmetric(&fd_s_prime(|x| built.s_matrix(x), w, FdConfig::default())?, &identity.permutation);
    let snap = &identity.snapshot;
    let analytic = snap.s_prime.as_ref().ok_or(wsdelay::Error::Missing("analytic S'"))?;
    let mut rep = PointReport {
        freq_hz: hz,
        modes: snap.len(),
        propagating: snap.propagating_count(),
        ws_residual: identity.residual.map(|r| r.value),
        unitarity: Some(identity.unitarity),
        fd_mismatch: Some(relative_difference(analytic, &fd)),
        quadrature_order: Some(qr.order),
        quadrature_converged: Some(qr.converged),
        ..Default::default()
    };
    if !qr.converged {
        rep.notes.push(format!("quadrature not converged at order {}", qr.order));
    }
    let tolerances = Tolerances {
        unitarity: tol.unitarity,
        hermiticity: tol.hermiticity,
    };
    let s_prime_gamma = match gamma(&snap.s, &snap.modes, tolerances) {
        Ok(g) => {
            rep.gamma_residual = Some(gamma_residual(&g, &snap.s, &identity.corrections));
            Some(s_prime_from_q(&g, &identity.q)?)
        }
        Err(e) => {
            rep.notes.push(format!("inversion-free S' unavailable: {e}"));
            None
        }
    };
    let mp = snap.propagating_count();
    let mut modes = None;
    if mp > 0 {
        let q_prop = identity.q_prop();
        rep.hermiticity = Some(hermiticity_residual(&q_prop));
        let permutation = if built.is_floquet() {
            match i_r_permutation(&snap.modes[..mp]) {
                Ok(p) => {
                    rep.notes
                        .push("Floquet ports: S_PP diagonalisation measured on I_r S_PP (conjugate-pair rows)".into());
                    Some(p)
                }
                Err(e) => {
                    rep.notes.push(format!("I_r pairing unavailable: {e}"));
                    None
                }
            }
        } else {
            None
        };
        let sp_pp = block(analytic, 0, 0, mp, mp);
        match ws_modes(&q_prop, &snap.s_pp(), Some(&sp_pp), permutation.as_ref(), tolerances) {
            Ok(m) => {
                rep.delays_s = m.delays.clone();
                rep.shifts_m = spatial_shift(&m.delays);
                rep.s_diag_residual = Some(m.s_diag_residual);
                rep.s_prime_diag_residual = m.s_prime_diag_residual;
                rep.degenerate = Some(m.degenerate);
                if m.degenerate {
                    rep.notes.push("degenerate delays: W not rotated within degenerate blocks".into());
                }
                modes = Some(m);
            }
            Err(e) => rep.notes.push(format!("WS modes unavailable: {e}")),
        }
    }
    rep.pass = rep.ws_residual.is_some_and(|r| r < tol.residual)
        && identity.unitarity < tol.unitarity
        && rep.hermiticity.is_none_or(|h| h < tol.hermiticity)
        && rep.fd_mismatch.is_some_and(|d| d < tol.fd_mismatch)
        && rep.gamma_residual.is_some()
        && (mp == 0 || modes.is_some());
    Ok(WsPoint {
        report: rep,
        identity,
        fd,
        s_prime_gamma,
        modes,
    })
}

fn write_delays(path: &Path, delays: &[f64]) -> Result<()> {
    let shifts = spatial_shift(delays);
    let rows: Vec<Vec<String>> = delays
        .iter()
        .zip(&shifts)
        .enumerate()
        .map(|(i, (d, s))| vec![i.to_string(), num(*d), num(*s)])
        .collect();
    write_table(path, &["ws_mode", "delay_s", "shift_m"], &rows)
}

fn cmd_wsq(ctx: &Context, matrices: bool) -> Result<bool> {
    let sys = ctx.system()?;
    let points = ctx.sweep(|hz| ws_point(ctx, sys, hz))?;
    if ctx.csv() {
        for (k, p) in points.iter().enumerate() {
            let id = &p.identity;
            let lab = labels(&id.snapshot.modes);
            let mp = id.snapshot.propagating_count();
            let prefix = |name: &str| ctx.path(&format!("f{k:03}_{name}.csv"));
            if matrices {
                write_matrix(&prefix("s"), &id.snapshot.s, &lab)?;
                if let Some(sp) = &id.snapshot.s_prime {
                    write_matrix(&prefix("s_prime"), sp, &lab)?;
                }
                write_matrix(&prefix("s_prime_fd"), &p.fd, &lab)?;
                if let Some(sg) = &p.s_prime_gamma {
                    write_matrix(&prefix("s_prime_gamma"), sg, &lab)?;
                }
                write_matrix(&prefix("q_tilde"), &id.q_tilde, &lab)?;
                write_matrix(&prefix("q"), &id.q, &lab)?;
                write_matrix(&prefix("q_prop"), &id.q_prop(), &lab[..mp])?;
            }
            if let Some(m) = &p.modes {
                let cols: Vec<String> = (0..m.w.ncols()).map(|i| format!("ws{i}")).collect();
                write_rect(&prefix("w"), &m.w, &lab[..mp], &cols)?;
                write_delays(&prefix("delays"), &m.delays)?;
            }
        }
        let rows: Vec<Vec<String>> = points
            .iter()
            .map(|p| {
                let r = &p.report;
                let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
                vec![
                    num(r.freq_hz),
                    r.modes.to_string(),
                    r.propagating.to_string(),
                    opt(r.ws_residual),
                    opt(r.unitarity),
                    opt(r.hermiticity),
                    opt(r.fd_mismatch),
                    opt(r.gamma_residual),
                ]
            })
            .collect();
        write_table(
            &ctx.path("residuals.csv"),
            &[
                "freq_hz",
                "modes",
                "propagating",
                "ws_residual",
                "unitarity",
                "hermiticity",
                "fd_mismatch",
                "gamma_residual",
            ],
            &rows,
        )?;
    }
    ctx.finish(Verb::Wsq, points.into_iter().map(|p| p.report).collect())
}

/// Transverse WS-mode profiles at each port plane along `ζ = 0`.
fn write_profiles(path: &Path, modes: &[ModeSpec], w: &CMat, samples: usize) -> Result<()> {
    let mp = w.nrows();
    let mut header = vec!["port".to_string(), "eta_m".to_string()];
    for k in 0..w.ncols() {
        for part in ["eta.re", "eta.im", "zeta.re", "zeta.im"] {
            header.push(format!("ws{k}.{part}"));
        }
    }
    let mut ports: Vec<usize> = modes[..mp].iter().map(|m| m.port_id).collect();
    ports.dedup();
    ports.sort_unstable();
    ports.dedup();
    let mut rows = Vec::new();
    for port in ports {
        let idx: Vec<usize> = (0..mp).filter(|&i| modes[i].port_id == port).collect();
        let extent = match modes[idx[0]].transverse {
            Transverse::Guide { width } => width,
            Transverse::Floquet { period_eta, .. } => period_eta,
        };
        for s in 0..samples {
            let eta = extent * (s as f64 + 0.5) / samples as f64;
            let mut row = vec![port.to_string(), num(eta)];
            for k in 0..w.ncols() {
                let mut e = [wsdelay::C64::new(0.0, 0.0); 2];
                for &i in &idx {
                    let x = mode_profile(&modes[i], eta, 0.0);
                    e[0] += w[(i, k)] * x[0];
                    e[1] += w[(i, k)] * x[1];
                }
                row.extend([num(e[0].re), num(e[0].im), num(e[1].re), num(e[1].im)]);
            }
            rows.push(row);
        }
    }
    let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_table(path, &header, &rows)
}

fn cmd_wsmodes(ctx: &Context) -> Result<bool> {
    let sys = ctx.system()?;
    let points = ctx.sweep(|hz| ws_point(ctx, sys, hz))?;
    if ctx.csv() {
        let mut table = Vec::new();
        for (k, p) in points.iter().enumerate() {
            let Some(m) = &p.modes else { continue };
            let modes = &p.identity.snapshot.modes;
            let mp = m.w.nrows();
            let lab = labels(&modes[..mp]);
            let cols: Vec<String> = (0..m.w.ncols()).map(|i| format!("ws{i}")).collect();
            write_rect(&ctx.path(&format!("f{k:03}_w.csv")), &m.w, &lab, &cols)?;
            write_delays(&ctx.path(&format!("f{k:03}_delays.csv")), &m.delays)?;
            if ctx.cfg.output.profile_samples > 0 {
                write_profiles(
                    &ctx.path(&format!("f{k:03}_profiles.csv")),
                    modes,
                    &m.w,
                    ctx.cfg.output.profile_samples,
                )?;
            }
            for (i, (d, s)) in m.delays.iter().zip(spatial_shift(&m.delays)).enumerate() {
                table.push(vec![num(p.report.freq_hz), i.to_string(), num(*d), num(s)]);
            }
        }
        write_table(&ctx.path("wsmodes.csv"), &["freq_hz", "ws_mode", "delay_s", "shift_m"], &table)?;
    }
    for p in &points {
        for (i, s) in p.report.shifts_m.iter().enumerate() {
            println!("{:.6e} Hz  ws{i}  shift {:.9e} m", p.report.freq_hz, s);
        }
    }
    ctx.finish(Verb::Wsmodes, points.into_iter().map(|p| p.report).collect())
}

fn cascade_point(ctx: &Context, parts: &CascadeParts, hz: f64, mono_q: Option<&CMat>) -> Result<(CascadeErrors, CMat, CMat)> {
    let w = omega(hz);
    let quad = ctx.quad();
    let a = parts.a.solve(w)?;
    let b = parts.b.solve(w)?;
    let mono = parts.mono.solve(w)?;
    let owned;
    let mq = match mono_q {
        Some(q) => q,
        None => {
            owned = q_tilde_converged(mono.provider(), quad.base, quad.tol, quad.max_order)?.q;
            &owned
        }
    };
    let r = cascade_against(
        (a.snapshot(), a.provider()),
        (b.snapshot(), b.provider()),
        mono.snapshot(),
        mq,
        quad,
    )?;
    let shared = a.snapshot().modes.iter().filter(|m| m.port_id == 1).count();
    Ok((
        CascadeErrors {
            shared_modes: shared,
            err_s: r.err_s,
            err_q: r.err_q,
            maps_residual: r.maps_residual,
        },
        r.composite.s,
        mono.snapshot().s.clone(),
    ))
}

fn cmd_cascade(ctx: &Context) -> Result<bool> {
    let cfg = ctx.cascade()?;
    let tol = ctx.tol();
    let results = ctx.sweep(|hz| {
        let parts = build_cascade(cfg, omega(hz), None)?;
        let mono_modes = parts.mono.solve(omega(hz))?.snapshot().modes.clone();
        let (errs, composite, mono) = cascade_point(ctx, &parts, hz, None)?;
        Ok((hz, errs, composite, mono, mono_modes))
    })?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (k, (hz, errs, composite, mono, modes)) in results.into_iter().enumerate() {
        if ctx.csv() {
            let lab = labels(&modes);
            write_matrix(&ctx.path(&format!("f{k:03}_s_composed.csv")), &composite, &lab)?;
            write_matrix(&ctx.path(&format!("f{k:03}_s_mono.csv")), &mono, &lab)?;
        }
        rows.push(vec![
            num(hz),
            errs.shared_modes.to_string(),
            num(errs.err_s),
            num(errs.err_q),
            num(errs.maps_residual),
        ]);
        println!("{hz:.6e} Hz  err(S) {:.3e}  err(Q) {:.3e}", errs.err_s, errs.err_q);
        points.push(PointReport {
            freq_hz: hz,
            modes: modes.len(),
            propagating: modes.iter().filter(|m| m.is_propagating()).count(),
            pass: errs.err_s < tol.cascade && errs.err_q < tol.cascade,
            cascade: vec![errs],
            ..Default::default()
        });
    }
    if ctx.csv() {
        write_table(
            &ctx.path("cascade.csv"),
            &["freq_hz", "shared_modes", "err_s", "err_q", "maps_residual"],
            &rows,
        )?;
    }
    ctx.finish(Verb::Cascade, points)
}

fn shared_counts(ctx: &Context) -> Result<Vec<usize>> {
    if !ctx.cfg.sweep.shared_modes.is_empty() {
        return Ok(ctx.cfg.sweep.shared_modes.clone());
    }
    Ok(match ctx.cascade()? {
        CascadeConfig::DoubleStep { narrow_modes, .. } => (1..=*narrow_modes).collect(),
        CascadeConfig::ThruThru { modes, .. } | CascadeConfig::ThruShort { modes, .. } => vec![*modes],
    })
}

fn cmd_convergence(ctx: &Context) -> Result<bool> {
    if ctx.cfg.cascade.is_some() {
        cascade_convergence(ctx)
    } else {
        truncation_convergence(ctx)
    }
}

fn cascade_convergence(ctx: &Context) -> Result<bool> {
    let cfg = ctx.cascade()?;
    let counts = shared_counts(ctx)?;
    let tol = ctx.tol();
    let quad = ctx.quad();
    let results = ctx.sweep(|hz| {
        let w = omega(hz);
        // the double-step reference does not depend on the shared count
        let mono_q = match cfg {
            CascadeConfig::DoubleStep { .. } => {
                let parts = build_cascade(cfg, w, Some(counts[0]))?;
                let mono = parts.mono.solve(w)?;
                Some(q_tilde_converged(mono.provider(), quad.base, quad.tol, quad.max_order)?.q)
            }
            _ => None,
        };
        let mut errs = Vec::new();
        for &m in &counts {
            let parts = build_cascade(cfg, w, Some(m))?;
            errs.push(cascade_point(ctx, &parts, hz, mono_q.as_ref())?.0);
        }
        let propagating = match *cfg {
            CascadeConfig::ThruThru { width_mm, family, .. } | CascadeConfig::ThruShort { width_mm, family, .. } => {
                propagating_guide_modes(width_mm, 1.0, w, family.into())?
            }
            CascadeConfig::DoubleStep { narrow_width_mm, .. } => {
                propagating_guide_modes(narrow_width_mm, 1.0, w, Family::Te)?
            }
        };
        Ok((hz, propagating, errs))
    })?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (hz, propagating, errs) in results {
        for e in &errs {
            rows.push(vec![
                num(hz),
                e.shared_modes.to_string(),
                e.shared_modes.saturating_sub(propagating).to_string(),
                num(e.err_s),
                num(e.err_q),
                num(e.maps_residual),
            ]);
        }
        let last = errs.last().expect("non-empty sweep");
        points.push(PointReport {
            freq_hz: hz,
            pass: last.err_s < tol.cascade && last.err_q < tol.cascade,
            cascade: errs,
            ..Default::default()
        });
    }
    if ctx.csv() {
        write_table(
            &ctx.path("convergence.csv"),
            &["freq_hz", "shared_modes", "shared_evanescent", "err_s", "err_q", "maps_residual"],
            &rows,
        )?;
    }
    ctx.finish(Verb::Convergence, points)
}

/// Keep the first `P + extra` modes of every port (port-major order).
fn truncation(modes: &[ModeSpec], extra: usize) -> Vec<usize> {
    let mut keep = Vec::new();
    let mut start = 0;
    while start < modes.len() {
        let port = modes[start].port_id;
        let end = modes[start..]
            .iter()
            .position(|m| m.port_id != port)
            .map_or(modes.len(), |i| start + i);
        let p = modes[start..end].iter().filter(|m| m.is_propagating()).count();
        keep.extend(start..(start + p + extra).min(end));
        start = end;
    }
    keep
}

fn truncation_convergence(ctx: &Context) -> Result<bool> {
    let sys = ctx.system()?;
    let tol = ctx.tol();
    let quad = ctx.quad();
    let results = ctx.sweep(|hz| {
        let w = omega(hz);
        let solved = build_system(sys, w)?.solve(w)?;
        let snap = solved.snapshot();
        let qt = q_tilde_converged(solved.provider(), quad.base, quad.tol, quad.max_order)?.q;
        let extras = if ctx.cfg.sweep.evanescent.is_empty() {
            (0..=snap.len()).collect()
        } else {
            ctx.cfg.sweep.evanescent.clone()
        };
        let mut rows = Vec::new();
        let mut last_keep = 0;
        for extra in extras {
            let keep = truncation(&snap.modes, extra);
            if keep.len() == last_keep && ctx.cfg.sweep.evanescent.is_empty() {
                break;
            }
            last_keep = keep.len();
            let rep = identity_report(&snap.restricted(&keep), &select(&qt, &keep, &keep))?;
            let res = rep.residual.ok_or(wsdelay::Error::Missing("analytic S'"))?.value;
            rows.push((extra, keep.len(), res));
        }
        Ok((hz, rows))
    })?;
    let mut table = Vec::new();
    let mut points = Vec::new();
    for (hz, rows) in results {
        for (extra, kept, res) in &rows {
            table.push(vec![num(hz), extra.to_string(), kept.to_string(), num(*res)]);
        }
        let last = rows.last().map(|r| r.2);
        points.push(PointReport {
            freq_hz: hz,
            modes: rows.last().map_or(0, |r| r.1),
            ws_residual: last,
            pass: last.is_some_and(|r| r < tol.residual),
            ..Default::default()
        });
    }
    if ctx.csv() {
        write_table(
            &ctx.path("convergence.csv"),
            &["freq_hz", "evanescent_per_port", "modes_kept", "ws_residual"],
            &table,
        )?;
    }
    ctx.finish(Verb::Convergence, points)
}

fn cmd_verify(ctx: &Context) -> Result<bool> {
    let tol = ctx.tol();
    let mut points = Vec::new();
    if let Some(sys) = &ctx.cfg.system {
        for p in ctx.sweep(|hz| ws_point(ctx, sys, hz))? {
            let r = p.report;
            println!(
                "[{}] {:.6e} Hz  residual {:.3e}  unitarity {:.3e}  fd {:.3e}  gamma {:.3e}",
                if r.pass { "PASS" } else { "FAIL" },
                r.freq_hz,
                r.ws_residual.unwrap_or(f64::NAN),
                r.unitarity.unwrap_or(f64::NAN),
                r.fd_mismatch.unwrap_or(f64::NAN),
                r.gamma_residual.unwrap_or(f64::NAN),
            );
            points.push(r);
        }
    }
    if let Some(cfg) = &ctx.cfg.cascade {
        let errs = ctx.sweep(|hz| {
            let parts = build_cascade(cfg, omega(hz), None)?;
            Ok((hz, cascade_point(ctx, &parts, hz, None)?.0))
        })?;
        for (hz, e) in errs {
            let pass = e.err_s < tol.cascade && e.err_q < tol.cascade;
            println!(
                "[{}] {hz:.6e} Hz  cascade err(S) {:.3e}  err(Q) {:.3e}",
                if pass { "PASS" } else { "FAIL" },
                e.err_s,
                e.err_q
            );
            points.push(PointReport {
                freq_hz: hz,
                pass,
                cascade: vec![e],
                ..Default::default()
            });
        }
    }
    ctx.finish(Verb::Verify, points)
}
