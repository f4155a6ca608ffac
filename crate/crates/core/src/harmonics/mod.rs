//! Real hyperspherical harmonic bases, Gaunt tables and the circulant
//! fourth-cumulant reduction.

mod basis;
mod circulant;
mod gaunt;

pub use basis::{build_basis, HarmonicBasis, HarmonicLabel, MAX_BASIS_SIZE};
pub use circulant::{circulant_closed, circulant_sum, cum4_ratio, CirculantClosed, Cum4Ratio};
pub use gaunt::{gaunt_table, lemcg_check, GauntTable, LemcgResiduals, GAUNT_WORK_BUDGET};
