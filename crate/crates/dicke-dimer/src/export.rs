//! Text serialization of results: CSV tables and JSON documents.
//!
//! Every floating-point number is printed with 17 significant digits
//! (`{:.16e}`), enough for bit-exact f64 round trips, so re-running a
//! deterministic computation reproduces its artifacts byte for byte.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::dynamics::{RampResult, Trajectory};
use crate::error::{DickeError, Result};
use crate::phasemap::PhaseDiagram;

/// Formats one float with 17 significant digits.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Pretty JSON formatter whose floats carry 17 significant digits.
pub struct SigDigitFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for SigDigitFormatter<'_> {
    fn default() -> Self {
        Self {
            inner: PrettyFormatter::new(),
        }
    }
}

impl Formatter for SigDigitFormatter<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.8e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object_value(writer)
    }
}

/// Serializes any value to pretty JSON with 17-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter::default());
    value
        .serialize(&mut ser)
        .map_err(|e| DickeError::InvalidState(format!("JSON serialization failed: {e}")))?;
    String::from_utf8(buf)
        .map_err(|e| DickeError::InvalidState(format!("JSON output is not UTF-8: {e}")))
}

/// Column names of the trajectory table, without the optional energy column.
pub const TRAJECTORY_COLUMNS: &str =
    "t,re_g1,im_g1,x1,y1,z1,re_g2,im_g2,x2,y2,z2,J,norm_err1,norm_err2";

/// Renders a trajectory as CSV, one row per sample. The energy column
/// appears exactly when the trajectory carries the conserved energy.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 + traj.len() * 24 * 15);
    out.push_str(TRAJECTORY_COLUMNS);
    if traj.energy.is_some() {
        out.push_str(",energy");
    }
    out.push('\n');
    for i in 0..traj.len() {
        push_f64(&mut out, traj.times[i]);
        for v in traj.states[i].to_array() {
            out.push(',');
            push_f64(&mut out, v);
        }
        out.push(',');
        push_f64(&mut out, traj.j_values[i]);
        out.push(',');
        push_f64(&mut out, traj.norm_errs[i].0);
        out.push(',');
        push_f64(&mut out, traj.norm_errs[i].1);
        if let Some(energy) = &traj.energy {
            out.push(',');
            push_f64(&mut out, energy[i]);
        }
        out.push('\n');
    }
    out
}

/// Renders the branch-tracking error of a ramp as CSV.
pub fn ramp_tracking_csv(ramp: &RampResult) -> String {
    let mut out = String::from("t,J,tracking_abs,tracking_rel\n");
    for i in 0..ramp.trajectory.len() {
        push_f64(&mut out, ramp.trajectory.times[i]);
        out.push(',');
        push_f64(&mut out, ramp.trajectory.j_values[i]);
        out.push(',');
        push_f64(&mut out, ramp.tracking_abs[i]);
        out.push(',');
        push_f64(&mut out, ramp.tracking_rel[i]);
        out.push('\n');
    }
    out
}

/// Renders a phase diagram as CSV: the axis value columns followed by the
/// label, one row per cell in sweep order.
pub fn phase_diagram_csv(diagram: &PhaseDiagram) -> String {
    let mut out = String::new();
    for axis in &diagram.axes {
        out.push_str(&axis.name.to_string());
        out.push(',');
    }
    out.push_str("label\n");
    for cell in &diagram.cells {
        for &v in &cell.axis_values {
            push_f64(&mut out, v);
            out.push(',');
        }
        out.push_str(&cell.label.to_string());
        out.push('\n');
    }
    out
}

/// Renders an (x, y) polyline as a two-column CSV.
pub fn xy_csv(x_name: &str, y_name: &str, points: &[(f64, f64)]) -> String {
    let mut out = format!("{x_name},{y_name}\n");
    for &(x, y) in points {
        push_f64(&mut out, x);
        out.push(',');
        push_f64(&mut out, y);
        out.push('\n');
    }
    out
}

fn push_f64(out: &mut String, value: f64) {
    use std::fmt::Write as _;
    let _ = write!(out, "{value:.16e}");
}
