//! Trace serialization: one CSV row per control tick. Variable-length
//! parts (per-track state) pack into a single delimited column so the
//! table stays rectangular for downstream plotting.

use std::io::Write;

use asaa_core::sim::TraceRow;

use crate::error::CliError;

fn f(v: f64) -> String {
    format!("{v}")
}

/// Packs confirmed tracks as `id:x:y:z:sigma` entries joined by `|`.
fn pack_tracks(row: &TraceRow) -> String {
    let parts: Vec<String> = row
        .tracks
        .iter()
        .map(|t| {
            format!(
                "{}:{}:{}:{}:{}",
                t.id, t.position.x, t.position.y, t.position.z, t.sigma
            )
        })
        .collect();
    parts.join("|")
}

pub fn write_trace_csv<W: Write>(writer: W, rows: &[TraceRow]) -> Result<(), CliError> {
    let buckets = rows.first().map_or(0, |r| r.sud.len());
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = [
        "t", "px", "py", "pz", "vx", "vy", "vz", "yaw", "mount_cmd", "mount", "yaw_cmd", "plan",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..buckets).map(|i| format!("sud_{i:02}")));
    header.push("tracks".into());
    header.push("collisions_moving".into());
    header.push("collisions_hovering".into());
    w.write_record(&header)?;

    for row in rows {
        let mut rec: Vec<String> = vec![
            f(row.t),
            f(row.position.x),
            f(row.position.y),
            f(row.position.z),
            f(row.velocity.x),
            f(row.velocity.y),
            f(row.velocity.z),
            f(row.yaw),
            f(row.mount_cmd),
            f(row.mount_angle),
            f(row.yaw_cmd),
            (if row.plan_hover { "hover" } else { "primitive" }).to_string(),
        ];
        rec.extend(row.sud.iter().map(|v| f(*v)));
        rec.push(pack_tracks(row));
        rec.push(row.collisions_moving.to_string());
        rec.push(row.collisions_hovering.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
