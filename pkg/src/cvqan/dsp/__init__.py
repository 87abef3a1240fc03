"""Multi-user FDM signal chain: modulation, channel, recovery, estimation."""

from .pipeline import FrameRecord, SimulationReport, SimulationSettings, run_simulation
from .receiver import (
    EstimationResult,
    FilterSpec,
    ReceiverChain,
    bandpass,
    coherent_demod,
    downsample_symbols,
    estimate_channel,
    frame_sync,
    phase_recovery,
    reference_constellation,
)
from .signals import (
    ChannelSpec,
    SymbolFrame,
    UserTx,
    Waveform,
    assign_carriers,
    channel_and_detect,
    decode_symbols,
    encode_symbols,
    modulate,
    symbols_to_complex,
)

__all__ = [
    "ChannelSpec",
    "EstimationResult",
    "FilterSpec",
    "FrameRecord",
    "ReceiverChain",
    "SimulationReport",
    "SimulationSettings",
    "SymbolFrame",
    "UserTx",
    "Waveform",
    "assign_carriers",
    "bandpass",
    "channel_and_detect",
    "coherent_demod",
    "decode_symbols",
    "downsample_symbols",
    "encode_symbols",
    "estimate_channel",
    "frame_sync",
    "modulate",
    "phase_recovery",
    "reference_constellation",
    "run_simulation",
    "symbols_to_complex",
]
