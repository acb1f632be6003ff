use crate::compiler::CompilerError;
use crate::dds::DdsError;
use crate::entangle::EntangleError;
use crate::grape::GrapeError;
use crate::numerics::NumericsError;
use crate::pulses::PulseError;
use crate::siv::SivError;
use crate::thermal::ThermalError;

/// Any failure raised by the library, tagged with the originating module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("numerics: {0}")]
    Numerics(#[from] NumericsError),
    #[error("siv: {0}")]
    Siv(#[from] SivError),
    #[error("pulses: {0}")]
    Pulses(#[from] PulseError),
    #[error("grape: {0}")]
    Grape(#[from] GrapeError),
    #[error("dds: {0}")]
    Dds(#[from] DdsError),
    #[error("thermal: {0}")]
    Thermal(#[from] ThermalError),
    #[error("entangle: {0}")]
    Entangle(#[from] EntangleError),
    #[error("compiler: {0}")]
    Compiler(#[from] CompilerError),
}
