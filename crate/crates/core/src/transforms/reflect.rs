use crate::grid::{GridFunction, ModalField};

/// `R(β)(z) = −(1/π) ∫_D z·conj(β(ξ)) / (1 − conj(ξ) z) dm(ξ)`.
///
/// Expanding the kernel geometrically, output mode `k + 1` is
/// `−2 r^{k+1} ∫_0^1 conj(β̂_{−k}(ρ)) ρ^{k+1} dρ` for `k ≥ 0`; the result is
/// holomorphic and vanishes at the origin.
pub fn reflect_transform(beta: &GridFunction) -> GridFunction {
    beta.assert_transformable("reflect_transform");
    let g = beta.grid();
    let t = g.tables();
    let modal = beta.modal();
    let mut out = ModalField::zeros(g.n_r(), g.n_theta());
    for k in 0..(g.n_theta() / 2 - 1) as i64 {
        let conj: Vec<_> = modal
            .profile(-k)
            .radial_values
            .iter()
            .map(|v| v.conj())
            .collect();
        let q = (k + 1) as usize;
        let moment = t.moment(q, &conj) * -2.0;
        let prof: Vec<_> = g
            .radii()
            .iter()
            .map(|r| moment * r.powi(q as i32))
            .collect();
        out.set_profile(k + 1, &prof);
    }
    GridFunction::from_modal(g, &out)
}
