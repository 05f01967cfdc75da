//! Right-hand sides of the six-field system and the difference system.

use crate::error::Result;
use crate::grid::{l2_norm_sq, laplacian_apply, Grid, ScalarField};
use crate::model::Parameters;

/// The six unknowns `(u1, v1, w1, u2, v2, w2)` sampled on one grid.
///
/// Also used for time derivatives of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub u1: ScalarField,
    pub v1: ScalarField,
    pub w1: ScalarField,
    pub u2: ScalarField,
    pub v2: ScalarField,
    pub w2: ScalarField,
}

/// U = u1 − u2, V = v1 − v2, W = w1 − w2.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceState {
    pub u: ScalarField,
    pub v: ScalarField,
    pub w: ScalarField,
}

impl PairState {
    pub fn from_fields(fields: [ScalarField; 6]) -> Self {
        let [u1, v1, w1, u2, v2, w2] = fields;
        PairState {
            u1,
            v1,
            w1,
            u2,
            v2,
            w2,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, [0.0; 6])
    }

    pub fn constant(grid: &Grid, values: [f64; 6]) -> Self {
        Self::from_fields(values.map(|v| grid.constant(v)))
    }

    /// Builds a state node by node from a pointwise generator.
    pub fn from_nodes(len: usize, mut node: impl FnMut(usize) -> [f64; 6]) -> Self {
        let mut fields: [Vec<f64>; 6] = Default::default();
        for f in fields.iter_mut() {
            f.reserve(len);
        }
        for k in 0..len {
            for (f, v) in fields.iter_mut().zip(node(k)) {
                f.push(v);
            }
        }
        Self::from_fields(fields.map(ScalarField::new))
    }

    pub fn fields(&self) -> [&ScalarField; 6] {
        [&self.u1, &self.v1, &self.w1, &self.u2, &self.v2, &self.w2]
    }

    pub fn len(&self) -> usize {
        self.u1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u1.is_empty()
    }

    /// The six values at node `k`.
    pub fn node(&self, k: usize) -> [f64; 6] {
        self.fields().map(|f| f[k])
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        self.fields().iter().try_for_each(|f| grid.check(f))
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.is_finite())
    }

    pub fn map_fields(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::from_fields(self.fields().map(f))
    }

    pub fn zip_fields(
        &self,
        other: &Self,
        f: impl Fn(&ScalarField, &ScalarField) -> ScalarField,
    ) -> Self {
        let a = self.fields();
        let b = other.fields();
        Self::from_fields([0, 1, 2, 3, 4, 5].map(|i| f(a[i], b[i])))
    }

    /// `self + scale * other`, field by field.
    pub fn axpy(&self, scale: f64, other: &Self) -> Self {
        self.zip_fields(other, |a, b| a.axpy(scale, b))
    }

    pub fn scaled(&self, scale: f64) -> Self {
        self.map_fields(|f| f.scaled(scale))
    }

    /// Exchanges the roles of neuron 1 and neuron 2.
    pub fn swapped(&self) -> Self {
        PairState {
            u1: self.u2.clone(),
            v1: self.v2.clone(),
            w1: self.w2.clone(),
            u2: self.u1.clone(),
            v2: self.v1.clone(),
            w2: self.w1.clone(),
        }
    }

    pub fn difference(&self) -> DifferenceState {
        DifferenceState {
            u: self.u1.zip_map(&self.u2, |a, b| a - b),
            v: self.v1.zip_map(&self.v2, |a, b| a - b),
            w: self.w1.zip_map(&self.w2, |a, b| a - b),
        }
    }

    /// ‖g‖² in H, the sum of the six squared L² norms.
    pub fn norm_sq(&self, grid: &Grid) -> Result<f64> {
        self.fields().iter().map(|f| l2_norm_sq(grid, f)).sum()
    }

    /// Largest absolute nodal value over all six fields.
    pub fn max_abs(&self) -> f64 {
        self.fields().iter().fold(0.0, |m, f| m.max(f.max_abs()))
    }
}

/// Pointwise reaction of one neuron: `(au² − bu³ + v − w + J, α − v − βu², q(u − c) − rw)`.
#[inline]
pub fn neuron_reaction(params: &Parameters, u: f64, v: f64, w: f64) -> [f64; 3] {
    [
        params.a * u * u - params.b * u * u * u + v - w + params.j,
        params.alpha - v - params.beta * u * u,
        params.q * (u - params.c) - params.r * w,
    ]
}

/// Pointwise reaction plus coupling for the six values at one node.
/// This is the right-hand side of the spatially homogeneous ODE.
#[inline]
pub fn node_rhs(params: &Parameters, y: [f64; 6]) -> [f64; 6] {
    let [u1, v1, w1, u2, v2, w2] = y;
    let [du1, dv1, dw1] = neuron_reaction(params, u1, v1, w1);
    let [du2, dv2, dw2] = neuron_reaction(params, u2, v2, w2);
    [
        du1 + params.p * (u2 - u1),
        dv1,
        dw1,
        du2 + params.p * (u1 - u2),
        dv2,
        dw2,
    ]
}

/// Reaction rates of both neurons, without diffusion or coupling.
pub fn reaction_rhs(params: &Parameters, s: &PairState) -> PairState {
    PairState::from_nodes(s.len(), |k| {
        let [u1, v1, w1, u2, v2, w2] = s.node(k);
        let [a, b, c] = neuron_reaction(params, u1, v1, w1);
        let [d, e, f] = neuron_reaction(params, u2, v2, w2);
        [a, b, c, d, e, f]
    })
}

/// Coupling rates `(p(u2 − u1), 0, 0, p(u1 − u2), 0, 0)`.
pub fn coupling_rhs(params: &Parameters, s: &PairState) -> PairState {
    let p = params.p;
    let zero = ScalarField::new(vec![0.0; s.len()]);
    PairState {
        u1: s.u2.zip_map(&s.u1, |u2, u1| p * (u2 - u1)),
        v1: zero.clone(),
        w1: zero.clone(),
        u2: s.u1.zip_map(&s.u2, |u1, u2| p * (u1 - u2)),
        v2: zero.clone(),
        w2: zero,
    }
}

/// Full time derivative: `dΔ_h` on the membrane potentials plus reaction and coupling.
pub fn full_rhs(grid: &Grid, params: &Parameters, s: &PairState) -> Result<PairState> {
    s.check(grid)?;
    let mut rate = PairState::from_nodes(s.len(), |k| node_rhs(params, s.node(k)));
    let lap1 = laplacian_apply(grid, &s.u1)?;
    let lap2 = laplacian_apply(grid, &s.u2)?;
    rate.u1 = rate.u1.axpy(params.d, &lap1);
    rate.u2 = rate.u2.axpy(params.d, &lap2);
    Ok(rate)
}

/// L² norms of the residuals of the difference system, with the L² norm
/// of the largest term of each equation as the cancellation scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceResidual {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub scale: f64,
}

impl DifferenceResidual {
    pub fn max(&self) -> f64 {
        self.u.max(self.v).max(self.w)
    }

    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.max()
        } else {
            self.max() / self.scale
        }
    }
}

/// Evaluates the residuals of
///
/// ```text
/// U_t = dΔU + a(u1 + u2)U − b(u1² + u1u2 + u2²)U + V − W − 2pU
/// V_t = −V − β(u1 + u2)U
/// W_t = qU − rW
/// ```
///
/// using `ds_dt` for the time derivatives. When `ds_dt` comes from
/// [`full_rhs`] the residuals vanish up to roundoff.
pub fn difference_residual(
    grid: &Grid,
    params: &Parameters,
    s: &PairState,
    ds_dt: &PairState,
) -> Result<DifferenceResidual> {
    s.check(grid)?;
    ds_dt.check(grid)?;
    let diff = s.difference();
    let rate = ds_dt.difference();
    let lap_u = laplacian_apply(grid, &diff.u)?;
    let n = s.len();
    let Parameters {
        a,
        b,
        beta,
        q,
        r,
        d,
        p,
        ..
    } = *params;

    let mut res = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    // one column per term of each equation
    let mut terms_u = vec![vec![0.0; n]; 7];
    let mut terms_v = vec![vec![0.0; n]; 3];
    let mut terms_w = vec![vec![0.0; n]; 3];
    for k in 0..n {
        let (u1, u2) = (s.u1[k], s.u2[k]);
        let (uu, vv, ww) = (diff.u[k], diff.v[k], diff.w[k]);
        let tu = [
            rate.u[k],
            -d * lap_u[k],
            -a * (u1 + u2) * uu,
            b * (u1 * u1 + u1 * u2 + u2 * u2) * uu,
            -vv,
            ww,
            2.0 * p * uu,
        ];
        let tv = [rate.v[k], vv, beta * (u1 + u2) * uu];
        let tw = [rate.w[k], -q * uu, r * ww];
        res[0][k] = tu.iter().sum();
        res[1][k] = tv.iter().sum();
        res[2][k] = tw.iter().sum();
        for (col, t) in terms_u.iter_mut().zip(tu) {
            col[k] = t;
        }
        for (col, t) in terms_v.iter_mut().zip(tv) {
            col[k] = t;
        }
        for (col, t) in terms_w.iter_mut().zip(tw) {
            col[k] = t;
        }
    }

    let norm = |v: Vec<f64>| l2_norm_sq(grid, &ScalarField::new(v)).map(f64::sqrt);
    let mut scale: f64 = 0.0;
    for col in terms_u.into_iter().chain(terms_v).chain(terms_w) {
        scale = scale.max(norm(col)?);
    }
    let [ru, rv, rw] = res;
    Ok(DifferenceResidual {
        u: norm(ru)?,
        v: norm(rv)?,
        w: norm(rw)?,
        scale,
    })
}
