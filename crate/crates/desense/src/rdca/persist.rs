//! Versioned textual persistence for fitted RDCA models.

use std::io::{BufRead, Write};

use super::RdcaModel;
use crate::error::{Error, Result};
use crate::model_io::{fmt_real, write_reals, LineReader};

const HEADER: &str = "desense-model rdca v1";

/// Write a model in the v1 text format. Reals carry 17 significant digits,
/// so `load_rdca_model` restores them bit-exactly.
pub fn save_rdca_model(model: &RdcaModel, w: &mut impl Write) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<model>".into(),
        source,
    };
    let m = model.num_features();
    (|| -> std::io::Result<()> {
        writeln!(w, "{HEADER}")?;
        writeln!(w, "label {}", model.label_name)?;
        writeln!(w, "classes {}", model.class_names.len())?;
        for name in &model.class_names {
            writeln!(w, "{name}")?;
        }
        writeln!(w, "ridge {}", fmt_real(model.ridge))?;
        writeln!(w, "dim {m}")?;
        write_reals(w, "mean", &model.mean)?;
        write_reals(w, "powers", &model.powers)?;
        writeln!(w, "components")?;
        for i in 0..m {
            let row = model.components.row(i);
            let mut line = String::new();
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&fmt_real(*v));
            }
            writeln!(w, "{line}")?;
        }
        writeln!(w, "end")
    })()
    .map_err(io_err)
}

pub fn load_rdca_model(r: &mut impl BufRead) -> Result<RdcaModel> {
    let mut lr = LineReader::new(r);
    lr.expect(HEADER)?;
    let label_name = lr.keyed("label")?;
    let num_classes = lr.keyed_usize("classes")?;
    let mut class_names = Vec::with_capacity(num_classes);
    for _ in 0..num_classes {
        class_names.push(lr.next_line()?);
    }
    let ridge = lr.keyed_real("ridge")?;
    let dim = lr.keyed_usize("dim")?;
    let mean = lr.keyed_reals("mean", dim)?;
    let powers = lr.keyed_reals("powers", dim)?;
    lr.expect("components")?;
    let components = lr.matrix(dim, dim)?;
    lr.expect("end")?;
    Ok(RdcaModel {
        mean,
        components,
        powers,
        num_classes,
        ridge,
        label_name,
        class_names,
    })
}
