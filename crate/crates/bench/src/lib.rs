//! Fixtures shared by the criterion benchmarks.

use arcshot_core::{find_discontinuities, generate_arc, scenarios, ArcShotSpec, Discontinuity, QuadModel, World};

/// The bundled Fig. 2-style scene and its single blocked span.
pub fn figure2_discontinuity() -> (World, ArcShotSpec, Discontinuity) {
    let (world, spec) = scenarios::figure2();
    let arc = generate_arc(&spec).expect("valid bundled arc");
    let d = find_discontinuities(&arc, &world, &QuadModel::default(), 2)
        .expect("free endpoints")
        .remove(0);
    (world, spec, d)
}
