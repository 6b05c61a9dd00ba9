//! Inputs shared by the benchmarks.

use cobperturb::synth::SYNTH_PROGRAMS;
use cobperturb::{fixed_to_free, CobolUnit, SourceForm, UnitKind};

/// The synthetic programs, fixed form.
pub fn fixed_programs() -> Vec<CobolUnit> {
    SYNTH_PROGRAMS
        .iter()
        .map(|p| CobolUnit::parse(&p.text(), SourceForm::Fixed, UnitKind::Program).unwrap())
        .collect()
}

/// The synthetic programs, free form.
pub fn free_programs() -> Vec<CobolUnit> {
    fixed_programs().iter().map(|u| fixed_to_free(u).unwrap().0).collect()
}
