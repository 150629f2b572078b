use num_complex::Complex64;

use crate::grid::{GridField, Layout, LeadModes, LeadRate};

/// Forward (`+z`) and backward modal amplitudes in a lead.
///
/// Propagating amplitudes multiply `e^{±iγz}` with absolute `z`; evanescent
/// ones multiply `e^{∓κ(z - reference)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadAmplitudes {
    pub forward: Vec<Complex64>,
    pub backward: Vec<Complex64>,
}

fn basis(rate: LeadRate, z: f64, reference: f64) -> (Complex64, Complex64) {
    match rate {
        LeadRate::Propagating(g) => (Complex64::from_polar(1.0, g * z), Complex64::from_polar(1.0, -g * z)),
        LeadRate::Evanescent(q) => {
            let s = z - reference;
            (Complex64::new((-q * s).exp(), 0.0), Complex64::new((q * s).exp(), 0.0))
        }
    }
}

/// Separates the two directions of every lead mode from two field slices
/// at `z_a != z_b`, both inside the same homogeneous lead.
pub fn extract_coefficients(
    slice_a: &[Complex64],
    z_a: f64,
    slice_b: &[Complex64],
    z_b: f64,
    leads: &LeadModes,
    reference: f64,
) -> LeadAmplitudes {
    let ca = leads.project(slice_a);
    let cb = leads.project(slice_b);
    let mut forward = Vec::with_capacity(leads.len());
    let mut backward = Vec::with_capacity(leads.len());
    for n in 0..leads.len() {
        let (pa, ma) = basis(leads.rate(n), z_a, reference);
        let (pb, mb) = basis(leads.rate(n), z_b, reference);
        let det = pa * mb - ma * pb;
        forward.push((ca[n] * mb - ma * cb[n]) / det);
        backward.push((pa * cb[n] - ca[n] * pb) / det);
    }
    LeadAmplitudes { forward, backward }
}

/// Offset in nodes between the two extraction slices.
fn separation(layout: &Layout) -> usize {
    ((0.25 / layout.spacing()).round() as usize).max(1)
}

pub(crate) fn inlet_amplitudes(field: &GridField, leads: &LeadModes, layout: &Layout) -> LeadAmplitudes {
    let ja = layout.inlet_face() - 1;
    let jb = ja.saturating_sub(separation(layout));
    let jb = if jb == ja { ja - 1 } else { jb };
    extract_coefficients(field.slice(ja), field.z(ja), field.slice(jb), field.z(jb), leads, 0.0)
}

pub(crate) fn outlet_amplitudes(field: &GridField, leads: &LeadModes, layout: &Layout, outlet: f64) -> LeadAmplitudes {
    let ja = layout.outlet_face() + 1;
    let jb = (ja + separation(layout)).min(layout.nz() - 1);
    extract_coefficients(
        field.slice(ja),
        field.z(ja),
        field.slice(jb),
        field.z(jb),
        leads,
        outlet,
    )
}
