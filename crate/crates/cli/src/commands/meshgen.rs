use elastica2d::mesh_elasticity::TriangleMesh;

use super::{Checks, Ctx};
use crate::error::CliError;

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let spec = ctx
        .cfg
        .meshgen
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [meshgen] section".into()))?;
    let mut mesh = spec.build()?;
    for _ in 0..ctx.refine {
        mesh = mesh.refine();
    }
    let text = mesh.to_text();
    let mut checks = Checks::default();
    let reloaded = TriangleMesh::from_text(&text)?;
    checks.require(
        reloaded.vertices() == mesh.vertices() && reloaded.triangles() == mesh.triangles(),
        || "mesh does not survive a write/read round trip".into(),
    );
    checks.require(mesh.geometry().iter().all(|g| g.area > 0.0), || {
        "mesh has a triangle with non-positive area".into()
    });
    let loops = reloaded.boundary_loops()?.len();
    ctx.write("mesh.txt", &text)?;
    println!(
        "vertices {}  triangles {}  boundary vertices {}  boundary loops {}  euler characteristic {}",
        mesh.vertex_count(),
        mesh.triangle_count(),
        mesh.boundary_vertices().len(),
        loops,
        mesh.euler_characteristic()
    );
    checks.finish()
}
