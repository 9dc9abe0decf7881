//! Configuration, result tables and the figure pipelines.

mod config;
mod pipelines;
mod table;

pub use config::{
    ExperimentConfig, HeightRange, MaterialBlock, MixingScheme, ModelBlock, OutputBlock,
    ResponseBlock, RetardationChoice, SlabBlock, SweepBlock,
};
pub use pipelines::{
    run_fig1, run_fig2, run_fig3, run_scf, run_spd, write_figure, FigureOutput, FAR_HEIGHT_NM,
    FIG1_HEIGHTS, FIG1_OMEGAS, FIG2_HEIGHTS, FIG2_OMEGAS, FIG3_HEIGHTS, FIG3_OMEGAS,
    INTERFACE_HEIGHT_NM,
};
pub use table::{Model, SpectrumRow, SpectrumTable, TABLE_VERSION};
