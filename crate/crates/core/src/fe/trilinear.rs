use super::quadrature::TriangleRule;
use super::space::{FeField, Tabulation, VelocitySpace};
use crate::error::{check_dim, Result};

/// Skew-symmetric convection form
/// `b*(u, v, w) = 1/2 [((u . grad) v, w) - ((u . grad) w, v)]`
/// integrated with the space's quadrature rule.
pub fn trilinear_bstar(space: &VelocitySpace, u: &FeField, v: &FeField, w: &FeField) -> Result<f64> {
    let tab = space.tabulation();
    integrate(space, space.rule(), tab, u, v, w)
}

/// As [`trilinear_bstar`] with an explicit quadrature rule.
pub fn trilinear_bstar_with_rule(
    space: &VelocitySpace,
    rule: &TriangleRule,
    u: &FeField,
    v: &FeField,
    w: &FeField,
) -> Result<f64> {
    integrate(space, rule, &Tabulation::new(rule), u, v, w)
}

fn integrate(
    space: &VelocitySpace,
    rule: &TriangleRule,
    tab: &Tabulation,
    u: &FeField,
    v: &FeField,
    w: &FeField,
) -> Result<f64> {
    for f in [u, v, w] {
        check_dim(space.dofs(), f.len())?;
    }
    let ns = space.scalar_dofs();
    let mut total = 0.0;
    for (e, dofs) in space.dofmap().iter().enumerate() {
        let geo = &space.geometry()[e];
        let mut elem = 0.0;
        for (q, wq) in rule.weights().iter().enumerate() {
            let phi = &tab.values[q];
            let grads = tab.gradients[q].map(|g| geo.physical_gradient(g));
            let eval = |f: &FeField| {
                let mut val = [0.0; 2];
                let mut grad = [[0.0; 2]; 2];
                for (a, &k) in dofs.iter().enumerate() {
                    for c in 0..2 {
                        let coef = f.values()[c * ns + k];
                        val[c] += coef * phi[a];
                        grad[c][0] += coef * grads[a][0];
                        grad[c][1] += coef * grads[a][1];
                    }
                }
                (val, grad)
            };
            let (uu, _) = eval(u);
            let (vv, gv) = eval(v);
            let (ww, gw) = eval(w);
            let mut s = 0.0;
            for c in 0..2 {
                let adv_v = uu[0] * gv[c][0] + uu[1] * gv[c][1];
                let adv_w = uu[0] * gw[c][0] + uu[1] * gw[c][1];
                s += adv_v * ww[c] - adv_w * vv[c];
            }
            elem += wq * s;
        }
        total += 0.5 * elem * geo.det.abs();
    }
    Ok(total)
}
