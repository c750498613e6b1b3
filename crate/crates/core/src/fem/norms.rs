use serde::Serialize;

use super::assembly::FormMatrix;
use super::quadrature::QuadratureRule;
use super::space::FeSpace;
use crate::error::FemError;
use crate::mesh::RegionSet;

/// Smooth reference field with its gradient.
pub trait ScalarField: Sync {
    fn value(&self, x: [f64; 2]) -> f64;
    fn gradient(&self, x: [f64; 2]) -> [f64; 2];
}

/// Closure-backed [`ScalarField`].
pub struct FnField<F, G>(pub F, pub G);

impl<F, G> ScalarField for FnField<F, G>
where
    F: Fn([f64; 2]) -> f64 + Sync,
    G: Fn([f64; 2]) -> [f64; 2] + Sync,
{
    fn value(&self, x: [f64; 2]) -> f64 {
        (self.0)(x)
    }
    fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        (self.1)(x)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl ScalarField for ZeroField {
    fn value(&self, _: [f64; 2]) -> f64 {
        0.0
    }
    fn gradient(&self, _: [f64; 2]) -> [f64; 2] {
        [0.0, 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
}

/// `‖u − u_h‖_{L²}` and `|u − u_h|_{H¹}` over the union of tagged elements.
pub fn error_norms(
    space: &FeSpace<'_>,
    coeffs: &[f64],
    exact: &dyn ScalarField,
    region: RegionSet,
) -> Result<ErrorNorms, FemError> {
    if coeffs.len() != space.n_dofs() {
        return Err(FemError::Dimension { expected: space.n_dofs(), got: coeffs.len() });
    }
    if region.is_empty() {
        return Err(FemError::EmptyRegion);
    }
    let q = QuadratureRule::triangle_degree4();
    let mesh = space.mesh();
    let parts = space.exec().map_range(mesh.n_triangles(), |t| {
        if !region.contains(mesh.tag(t)) {
            return (0.0, 0.0);
        }
        let geo = space.element_geometry(t);
        let (mut l2, mut h1) = (0.0, 0.0);
        for (l, w) in q.points.iter().zip(&q.weights) {
            let x = geo.point(*l);
            let (uh, guh) = space.eval_local(t, &geo, coeffs, *l);
            let g = exact.gradient(x);
            let jw = 2.0 * geo.area * w;
            l2 += jw * (exact.value(x) - uh).powi(2);
            h1 += jw * ((g[0] - guh[0]).powi(2) + (g[1] - guh[1]).powi(2));
        }
        (l2, h1)
    });
    let (l2, h1) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    Ok(ErrorNorms { l2: l2.sqrt(), h1_semi: h1.sqrt() })
}

/// Norms of the discrete function itself.
pub fn fe_norms(space: &FeSpace<'_>, coeffs: &[f64], region: RegionSet) -> Result<ErrorNorms, FemError> {
    error_norms(space, coeffs, &ZeroField, region)
}

/// `|||(u, z)||| = (uᵀSu + zᵀA₀z + uᵀM_ωu)^{1/2}`.
pub fn triple_norm(
    u: &[f64],
    z: &[f64],
    stab: &FormMatrix,
    mass_omega: &FormMatrix,
    a0: &FormMatrix,
) -> Result<f64, FemError> {
    let check = |m: &FormMatrix, v: &[f64]| {
        if m.matrix.n_cols() != v.len() || m.matrix.n_rows() != v.len() {
            Err(FemError::Dimension { expected: m.matrix.n_cols(), got: v.len() })
        } else {
            Ok(())
        }
    };
    check(stab, u)?;
    check(mass_omega, u)?;
    check(a0, z)?;
    let bil = |m: &FormMatrix, v: &[f64]| m.matrix.bilinear(v, v).expect("checked");
    Ok((bil(stab, u) + bil(a0, z) + bil(mass_omega, u)).max(0.0).sqrt())
}
