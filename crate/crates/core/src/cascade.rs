//! Cascading two systems through one shared port.
//!
//! System A has an outer port 1 and the shared port 2; system B has the
//! shared port 2 and an outer port 3. Both snapshots are port-major (A: outer
//! modes then shared; B: shared then outer) and must expose the same
//! shared-port modes at the same reference plane. The composite system C has
//! ports 1 and 3 and its excitations are ordered `[A1, B3]`.

use crate::error::{Error, Result};
use crate::linalg::{self, block, condition_number, frobenius, relative_difference, spectral_radius, CMat, C64};
use crate::modes::ModeSpec;
use crate::quadrature::Cell;
use crate::ws::{assemble_q, corrections, q_tilde_converged, FieldProvider, PointFields, ScatteringSnapshot};

/// Condition number of `I − S^A₂₂S^B₂₂` beyond which the interface is
/// treated as resonant.
pub const MAX_INTERFACE_CONDITION: f64 = 1e12;

/// Interface wave maps and the excitation projectors of both subsystems.
///
/// For a composite excitation `x₁` at port 1 the wave leaving A through the
/// shared port is `T_x x₁` and the wave returning from B is `R_x x₁`; for
/// `y₃` at port 3 the wave leaving B is `T_y y₃` and the wave returning
/// from A is `R_y y₃`.
#[derive(Debug, Clone)]
pub struct CascadeMaps {
    pub r_x: CMat,
    pub t_x: CMat,
    pub r_y: CMat,
    pub t_y: CMat,
    /// `[[I, 0], [R_x, T_y]]`: incoming waves of A per composite excitation.
    pub p_a: CMat,
    /// `[[T_x, R_y], [0, I]]`: incoming waves of B per composite excitation.
    pub p_b: CMat,
    pub outer_a: usize,
    pub shared: usize,
    pub outer_b: usize,
}

/// Sizes of A's and B's port partitions.
fn sizes(sa: &CMat, outer_a: usize, sb: &CMat, outer_b: usize) -> Result<(usize, usize, usize)> {
    if sa.nrows() != sa.ncols() || sb.nrows() != sb.ncols() {
        return Err(Error::dim("subsystem S", "square", "rectangular"));
    }
    if outer_a > sa.nrows() || outer_b > sb.nrows() {
        return Err(Error::dim("outer port count", "at most the system size", format!("{outer_a}/{outer_b}")));
    }
    let shared = sa.nrows() - outer_a;
    if sb.nrows() - outer_b != shared {
        return Err(Error::dim("shared port", shared, sb.nrows() - outer_b));
    }
    Ok((outer_a, shared, outer_b))
}

fn interface_solve(lhs: &CMat, rhs: &CMat, a22: &CMat, b22: &CMat) -> Result<CMat> {
    let resonant = || {
        Error::Singular(format!(
            "spectral radius of S^A22 S^B22 is {:.6}",
            spectral_radius(&(a22 * b22))
        ))
    };
    if lhs.nrows() > 0 && !(condition_number(lhs) <= MAX_INTERFACE_CONDITION) {
        return Err(resonant());
    }
    linalg::solve(lhs, rhs).map_err(|_| resonant())
}

/// Interface maps by linear solves with `I − S^B₂₂S^A₂₂` and `I − S^A₂₂S^B₂₂`.
pub fn interface_maps(sa: &CMat, outer_a: usize, sb: &CMat, outer_b: usize) -> Result<CascadeMaps> {
    let (n1, n2, n3) = sizes(sa, outer_a, sb, outer_b)?;
    let a21 = block(sa, n1, 0, n2, n1);
    let a22 = block(sa, n1, n1, n2, n2);
    let b22 = block(sb, 0, 0, n2, n2);
    let b23 = block(sb, 0, n2, n2, n3);
    let id = CMat::identity(n2, n2);
    let ba = &id - &b22 * &a22;
    let ab = &id - &a22 * &b22;
    let r_x = interface_solve(&ba, &(&b22 * &a21), &a22, &b22)?;
    let t_x = interface_solve(&ab, &a21, &a22, &b22)?;
    let r_y = interface_solve(&ab, &(&a22 * &b23), &a22, &b22)?;
    let t_y = interface_solve(&ba, &b23, &a22, &b22)?;
    let mut p_a = CMat::zeros(n1 + n2, n1 + n3);
    p_a.view_mut((0, 0), (n1, n1)).fill_with_identity();
    p_a.view_mut((n1, 0), (n2, n1)).copy_from(&r_x);
    p_a.view_mut((n1, n1), (n2, n3)).copy_from(&t_y);
    let mut p_b = CMat::zeros(n2 + n3, n1 + n3);
    p_b.view_mut((0, 0), (n2, n1)).copy_from(&t_x);
    p_b.view_mut((0, n1), (n2, n3)).copy_from(&r_y);
    p_b.view_mut((n2, n1), (n3, n3)).fill_with_identity();
    Ok(CascadeMaps {
        r_x,
        t_x,
        r_y,
        t_y,
        p_a,
        p_b,
        outer_a: n1,
        shared: n2,
        outer_b: n3,
    })
}

/// Largest residual of the four defining relations, e.g.
/// `‖(I − S^B₂₂S^A₂₂)R_x − S^B₂₂S^A₂₁‖_F`.
pub fn maps_residual(sa: &CMat, sb: &CMat, maps: &CascadeMaps) -> f64 {
    let (n1, n2, n3) = (maps.outer_a, maps.shared, maps.outer_b);
    let a21 = block(sa, n1, 0, n2, n1);
    let a22 = block(sa, n1, n1, n2, n2);
    let b22 = block(sb, 0, 0, n2, n2);
    let b23 = block(sb, 0, n2, n2, n3);
    let id = CMat::identity(n2, n2);
    let ba = &id - &b22 * &a22;
    let ab = &id - &a22 * &b22;
    [
        frobenius(&(&ba * &maps.r_x - &b22 * &a21)),
        frobenius(&(&ab * &maps.t_x - &a21)),
        frobenius(&(&ab * &maps.r_y - &a22 * &b23)),
        frobenius(&(&ba * &maps.t_y - &b23)),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Outgoing waves of C: `[S^A₁₁ + S^A₁₂R_x, S^A₁₂T_y; S^B₃₂T_x, S^B₃₃ + S^B₃₂R_y]`.
pub fn compose_s(sa: &CMat, sb: &CMat, maps: &CascadeMaps) -> CMat {
    let (n1, n2, n3) = (maps.outer_a, maps.shared, maps.outer_b);
    let a11 = block(sa, 0, 0, n1, n1);
    let a12 = block(sa, 0, n1, n1, n2);
    let b32 = block(sb, n2, 0, n3, n2);
    let b33 = block(sb, n2, n2, n3, n3);
    let mut s = CMat::zeros(n1 + n3, n1 + n3);
    s.view_mut((0, 0), (n1, n1)).copy_from(&(&a11 + &a12 * &maps.r_x));
    s.view_mut((0, n1), (n1, n3)).copy_from(&(&a12 * &maps.t_y));
    s.view_mut((n1, 0), (n3, n1)).copy_from(&(&b32 * &maps.t_x));
    s.view_mut((n1, n1), (n3, n3)).copy_from(&(&b33 + &b32 * &maps.r_y));
    s
}

/// Frequency derivative of the composite `S`, by differentiating the
/// interface system `[I, −S^A₂₂; −S^B₂₂, I][u; v] = [S^A₂₁, 0; 0, S^B₂₃]`.
pub fn compose_s_prime(sa: &CMat, sap: &CMat, sb: &CMat, sbp: &CMat, maps: &CascadeMaps) -> Result<CMat> {
    let (n1, n2, n3) = (maps.outer_a, maps.shared, maps.outer_b);
    let nc = n1 + n3;
    // u: waves into B, v: waves into A, both per composite excitation
    let u = maps.p_b.rows(0, n2).into_owned();
    let v = maps.p_a.rows(n1, n2).into_owned();
    let a22p = block(sap, n1, n1, n2, n2);
    let b22p = block(sbp, 0, 0, n2, n2);
    let a22 = block(sa, n1, n1, n2, n2);
    let b22 = block(sb, 0, 0, n2, n2);
    let mut m = CMat::identity(2 * n2, 2 * n2);
    m.view_mut((0, n2), (n2, n2)).copy_from(&(-&a22));
    m.view_mut((n2, 0), (n2, n2)).copy_from(&(-&b22));
    let mut rhs = CMat::zeros(2 * n2, nc);
    rhs.view_mut((0, 0), (n2, n1)).copy_from(&block(sap, n1, 0, n2, n1));
    rhs.view_mut((n2, n1), (n2, n3)).copy_from(&block(sbp, 0, n2, n2, n3));
    let mut head = rhs.view_mut((0, 0), (n2, nc));
    head += &a22p * &v;
    let top = rhs.rows(n2, n2).into_owned() + &b22p * &u;
    rhs.view_mut((n2, 0), (n2, nc)).copy_from(&top);
    let y = linalg::solve(&m, &rhs)?;
    let up = y.rows(0, n2).into_owned();
    let vp = y.rows(n2, n2).into_owned();

    let a11p = block(sap, 0, 0, n1, n1);
    let a12 = block(sa, 0, n1, n1, n2);
    let a12p = block(sap, 0, n1, n1, n2);
    let b32 = block(sb, n2, 0, n3, n2);
    let b32p = block(sbp, n2, 0, n3, n2);
    let b33p = block(sbp, n2, n2, n3, n3);
    let mut sp = CMat::zeros(nc, nc);
    let top = &a12p * &v + &a12 * &vp;
    sp.view_mut((0, 0), (n1, nc)).copy_from(&top);
    let bottom = &b32p * &u + &b32 * &up;
    sp.view_mut((n1, 0), (n3, nc)).copy_from(&bottom);
    let mut d11 = sp.view_mut((0, 0), (n1, n1));
    d11 += &a11p;
    let mut d33 = sp.view_mut((n1, n1), (n3, n3));
    d33 += &b33p;
    Ok(sp)
}

/// `Q̃^C = P_A†Q̃^A P_A + P_B†Q̃^B P_B`.
pub fn compose_q_tilde(qa: &CMat, qb: &CMat, maps: &CascadeMaps) -> Result<CMat> {
    let na = maps.outer_a + maps.shared;
    let nb = maps.shared + maps.outer_b;
    if qa.shape() != (na, na) {
        return Err(Error::dim("Q-tilde of A", format!("{na}x{na}"), format!("{:?}", qa.shape())));
    }
    if qb.shape() != (nb, nb) {
        return Err(Error::dim("Q-tilde of B", format!("{nb}x{nb}"), format!("{:?}", qb.shape())));
    }
    Ok(maps.p_a.adjoint() * qa * &maps.p_a + maps.p_b.adjoint() * qb * &maps.p_b)
}

/// Which subsystem an excitation index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Total fields of C: A's fields combined through `P_A` inside A's region,
/// B's fields through `P_B` inside B's region.
pub struct ComposedFields<'a> {
    a: &'a dyn FieldProvider,
    b: &'a dyn FieldProvider,
    a_cells: Vec<Cell>,
    maps: CascadeMaps,
}

impl<'a> ComposedFields<'a> {
    pub fn new(a: &'a dyn FieldProvider, b: &'a dyn FieldProvider, maps: CascadeMaps) -> Result<Self> {
        if a.excitation_count() != maps.p_a.nrows() || b.excitation_count() != maps.p_b.nrows() {
            return Err(Error::dim(
                "subsystem fields",
                format!("{}/{}", maps.p_a.nrows(), maps.p_b.nrows()),
                format!("{}/{}", a.excitation_count(), b.excitation_count()),
            ));
        }
        Ok(Self {
            a,
            b,
            a_cells: a.region(),
            maps,
        })
    }

    /// Composite excitation index of a subsystem excitation; shared-port
    /// modes are not excitations of C.
    pub fn excitation(&self, side: Side, index: usize) -> Result<usize> {
        let (n1, n2, n3) = (self.maps.outer_a, self.maps.shared, self.maps.outer_b);
        match side {
            Side::A if index < n1 => Ok(index),
            Side::B if index >= n2 && index < n2 + n3 => Ok(n1 + index - n2),
            _ => Err(Error::NotExternal(index)),
        }
    }

    pub fn maps(&self) -> &CascadeMaps {
        &self.maps
    }
}

fn combine(pf: PointFields, p: &CMat) -> PointFields {
    let nc = p.ncols();
    let zero = [C64::new(0.0, 0.0); 3];
    let mut e = vec![zero; nc];
    let mut h = vec![zero; nc];
    for c in 0..nc {
        for k in 0..p.nrows() {
            let w = p[(k, c)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..3 {
                e[c][i] += pf.e[k][i] * w;
                h[c][i] += pf.h[k][i] * w;
            }
        }
    }
    PointFields {
        epsilon: pf.epsilon,
        mu: pf.mu,
        e,
        h,
    }
}

impl FieldProvider for ComposedFields<'_> {
    fn excitation_count(&self) -> usize {
        self.maps.outer_a + self.maps.outer_b
    }

    fn region(&self) -> Vec<Cell> {
        let mut cells = self.a_cells.clone();
        cells.extend(self.b.region());
        cells
    }

    fn quadrature_orders(&self, base: usize) -> [usize; 3] {
        let (oa, ob) = (self.a.quadrature_orders(base), self.b.quadrature_orders(base));
        [oa[0].max(ob[0]), oa[1].max(ob[1]), oa[2].max(ob[2])]
    }

    fn fields(&self, point: [f64; 3]) -> Result<PointFields> {
        if self.a_cells.iter().any(|c| c.contains(point, 0.0)) {
            Ok(combine(self.a.fields(point)?, &self.maps.p_a))
        } else {
            Ok(combine(self.b.fields(point)?, &self.maps.p_b))
        }
    }
}

/// Shared-port compatibility: same modes, same order, same `β` and `Z`.
pub fn check_shared_modes(a: &[ModeSpec], b: &[ModeSpec]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::dim("shared port modes", a.len(), b.len()));
    }
    for (x, y) in a.iter().zip(b) {
        let same = x.family == y.family
            && x.index == y.index
            && x.transverse == y.transverse
            && (x.beta - y.beta).norm() <= 1e-12 * x.beta.norm().max(1e-300)
            && (x.impedance - y.impedance).norm() <= 1e-12 * x.impedance.norm();
        if !same {
            return Err(Error::invalid(
                "shared_port",
                format!("mode {} of A does not match mode {} of B", x.label(), y.label()),
            ));
        }
    }
    Ok(())
}

fn port_count(snapshot: &ScatteringSnapshot, port: usize) -> usize {
    snapshot.modes.iter().filter(|m| m.port_id == port).count()
}

/// Composite snapshot (with `S'` when both inputs carry one) and the maps.
pub fn compose_snapshots(a: &ScatteringSnapshot, b: &ScatteringSnapshot) -> Result<(ScatteringSnapshot, CascadeMaps)> {
    let n1 = port_count(a, 0);
    let n3 = port_count(b, 1);
    check_shared_modes(&a.modes[n1..], &b.modes[..b.len() - n3])?;
    let maps = interface_maps(&a.s, n1, &b.s, n3)?;
    let s = compose_s(&a.s, &b.s, &maps);
    let sp = match (&a.s_prime, &b.s_prime) {
        (Some(ap), Some(bp)) => Some(compose_s_prime(&a.s, ap, &b.s, bp, &maps)?),
        _ => None,
    };
    let mut modes: Vec<ModeSpec> = a.modes[..n1].to_vec();
    modes.extend(b.modes[b.len() - n3..].iter().map(|m| m.with_port(1)));
    Ok((ScatteringSnapshot::new(a.omega, modes, s, sp)?, maps))
}

/// Quadrature settings used when `Q̃` is integrated from fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub base: usize,
    pub tol: f64,
    pub max_order: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            base: 16,
            tol: 1e-10,
            max_order: 256,
        }
    }
}

/// Composed-versus-monolithic comparison at one truncation.
#[derive(Debug, Clone)]
pub struct CascadeComparison {
    /// `‖S_mono − S_C‖_F / ‖S_mono‖_F`.
    pub err_s: f64,
    /// `‖Q_mono − Q_C‖_F / ‖Q_mono‖_F`, both with outer-port corrections.
    pub err_q: f64,
    pub composite: ScatteringSnapshot,
    pub q_tilde: CMat,
    pub maps_residual: f64,
}

/// Compose `A` and `B` (snapshots plus fields) and compare with the
/// monolithic system in both `S` and `Q`.
pub fn cascade_full(
    a: (&ScatteringSnapshot, &dyn FieldProvider),
    b: (&ScatteringSnapshot, &dyn FieldProvider),
    mono: (&ScatteringSnapshot, &dyn FieldProvider),
    quad: QuadratureSettings,
) -> Result<CascadeComparison> {
    let qm = q_tilde_converged(mono.1, quad.base, quad.tol, quad.max_order)?.q;
    cascade_against(a, b, mono.0, &qm, quad)
}

/// As [`cascade_full`], with the monolithic `Q̃` already integrated (it does
/// not change along a shared-port truncation sweep).
pub fn cascade_against(
    a: (&ScatteringSnapshot, &dyn FieldProvider),
    b: (&ScatteringSnapshot, &dyn FieldProvider),
    mono: &ScatteringSnapshot,
    mono_q_tilde: &CMat,
    quad: QuadratureSettings,
) -> Result<CascadeComparison> {
    let (composite, maps) = compose_snapshots(a.0, b.0)?;
    if composite.len() != mono.len() {
        return Err(Error::dim("monolithic reference", composite.len(), mono.len()));
    }
    let maps_residual = maps_residual(&a.0.s, &b.0.s, &maps);
    let qa = q_tilde_converged(a.1, quad.base, quad.tol, quad.max_order)?.q;
    let qb = q_tilde_converged(b.1, quad.base, quad.tol, quad.max_order)?.q;
    let q_tilde = compose_q_tilde(&qa, &qb, &maps)?;
    let q_c = assemble_q(&q_tilde, &composite.s, &corrections(&composite.modes)?)?;
    let q_m = assemble_q(mono_q_tilde, &mono.s, &corrections(&mono.modes)?)?;
    Ok(CascadeComparison {
        err_s: relative_difference(&composite.s, &mono.s),
        err_q: relative_difference(&q_c, &q_m),
        composite,
        q_tilde,
        maps_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::J;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn no_inter_reflection_when_a22_vanishes() {
        let sa = CMat::from_row_slice(2, 2, &[c(0.1, 0.0), c(0.0, 0.9), c(0.0, 0.9), c(0.0, 0.0)]);
        let sb = CMat::from_row_slice(2, 2, &[c(0.3, 0.2), c(0.5, 0.0), c(0.5, 0.0), c(0.1, 0.0)]);
        let m = interface_maps(&sa, 1, &sb, 1).unwrap();
        assert_eq!(m.r_y[(0, 0)], c(0.0, 0.0));
        assert_eq!(m.t_x[(0, 0)], sa[(1, 0)]);
        assert_eq!(m.t_y[(0, 0)], sb[(0, 1)]);
        assert!((m.r_x[(0, 0)] - sb[(0, 0)] * sa[(1, 0)]).norm() < 1e-16);
        assert!(maps_residual(&sa, &sb, &m) < 1e-15);
    }

    #[test]
    fn resonant_interface_is_rejected() {
        let sa = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let sb = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let err = interface_maps(&sa, 1, &sb, 1).unwrap_err();
        match err {
            Error::Singular(msg) => assert!(msg.contains("1.000000"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_outer_port_composes() {
        let phase = (-J * 0.4).exp();
        let sa = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), phase, phase, c(0.0, 0.0)]);
        let sb = CMat::from_element(1, 1, c(-1.0, 0.0));
        let m = interface_maps(&sa, 1, &sb, 0).unwrap();
        let s = compose_s(&sa, &sb, &m);
        assert_eq!(s.shape(), (1, 1));
        assert!((s[(0, 0)] + phase * phase).norm() < 1e-15);
    }

    #[test]
    fn composed_q_tilde_stays_hermitian() {
        let sa = CMat::from_fn(3, 3, |i, j| c(0.1 * (i + j) as f64, 0.05 * i as f64));
        let sb = CMat::from_fn(3, 3, |i, j| c(0.07 * (i * j) as f64, -0.02));
        let m = interface_maps(&sa, 1, &sb, 1).unwrap();
        let g = CMat::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, (i as f64) - 1.0));
        let qa = g.adjoint() * &g;
        let qb = &g * g.adjoint();
        let q = compose_q_tilde(&qa, &qb, &m).unwrap();
        assert!(linalg::hermiticity_residual(&q) < 1e-15);
        assert!(compose_q_tilde(&qb.view((0, 0), (2, 2)).into_owned(), &qb, &m).is_err());
    }
}
