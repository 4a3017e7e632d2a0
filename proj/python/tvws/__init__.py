"""TV white-space sensing: sweeps, min/max threshold detection and comparison."""

from ._tvws import (
    ArgumentError,
    BandPlan,
    ChannelDecision,
    ComparisonReport,
    ConfigError,
    Emitter,
    EmitterKind,
    Error,
    FrontEndConfig,
    FrontEndMode,
    OutOfBandError,
    ParseError,
    Scene,
    SimulatedFrontEnd,
    SweepConfig,
    SweepRecord,
    Threshold,
    TuneError,
    Verdict,
    band_power,
    channel_of,
    classify,
    compare,
    compute_threshold,
    generate_iq,
    make_bandplan,
    run_sweep,
    samples_per_channel,
    white_spaces,
)

__all__ = [name for name in dir() if not name.startswith("_")]
